//! Exact coefficient arithmetic: arbitrary-precision rationals and sparse
//! Laurent polynomials in the level symbol `k`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::Error;

/// Exact rational scalar. Always reduced, denominator positive.
pub type Rat = BigRational;

pub fn rat(num: i64, den: i64) -> Rat {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat_to_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Sparse Laurent polynomial in the level symbol `k` with rational
/// coefficients. No zero coefficients are stored; the zero polynomial is the
/// empty map. `k` is kept transcendental throughout the engine and only
/// specialized by [`LaurentK::eval`] in reporting and tests.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct LaurentK {
    terms: BTreeMap<i64, Rat>,
}

impl LaurentK {
    pub fn zero() -> Self {
        LaurentK {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::monomial(0, rat_int(1))
    }

    /// The symbol `k` itself.
    pub fn k() -> Self {
        Self::monomial(1, rat_int(1))
    }

    /// `coeff * k^exp`; drops explicit zeros.
    pub fn monomial(exp: i64, coeff: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exp, coeff);
        }
        LaurentK { terms }
    }

    pub fn from_rat(r: Rat) -> Self {
        Self::monomial(0, r)
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rat(rat_int(n))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).map(|c| c.is_one()).unwrap_or(false)
    }

    /// Constant (k^0) coefficient.
    pub fn constant_part(&self) -> Rat {
        self.terms.get(&0).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &Rat)> {
        self.terms.iter()
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LaurentK {
            terms: self
                .terms
                .iter()
                .map(|(e, v)| (*e, v * c))
                .collect(),
        }
    }

    /// Multiply by `k^exp`.
    pub fn shift(&self, exp: i64) -> Self {
        LaurentK {
            terms: self.terms.iter().map(|(e, v)| (e + exp, v.clone())).collect(),
        }
    }

    fn insert_add(terms: &mut BTreeMap<i64, Rat>, exp: i64, val: Rat) {
        if val.is_zero() {
            return;
        }
        match terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(val);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &val;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    /// Substitutes `k := value` exactly. Fails when `value = 0` and the
    /// polynomial has negative exponents.
    pub fn eval(&self, value: &Rat) -> Result<Rat, Error> {
        let mut acc = Rat::zero();
        for (e, c) in &self.terms {
            if *e < 0 && value.is_zero() {
                return Err(Error::DivisionByZero(
                    "evaluation of a negative k-power at k = 0".into(),
                ));
            }
            let p = if *e >= 0 {
                pow_rat(value, *e as u32)
            } else {
                pow_rat(value, (-*e) as u32).recip()
            };
            acc += c * p;
        }
        Ok(acc)
    }
}

fn pow_rat(r: &Rat, n: u32) -> Rat {
    let mut acc = Rat::one();
    for _ in 0..n {
        acc *= r;
    }
    acc
}

impl Add for &LaurentK {
    type Output = LaurentK;
    fn add(self, rhs: &LaurentK) -> LaurentK {
        let mut terms = self.terms.clone();
        for (e, v) in &rhs.terms {
            LaurentK::insert_add(&mut terms, *e, v.clone());
        }
        LaurentK { terms }
    }
}

impl Sub for &LaurentK {
    type Output = LaurentK;
    fn sub(self, rhs: &LaurentK) -> LaurentK {
        self + &(-rhs)
    }
}

impl Neg for &LaurentK {
    type Output = LaurentK;
    fn neg(self) -> LaurentK {
        LaurentK {
            terms: self.terms.iter().map(|(e, v)| (*e, -v)).collect(),
        }
    }
}

impl Mul for &LaurentK {
    type Output = LaurentK;
    fn mul(self, rhs: &LaurentK) -> LaurentK {
        let mut terms = BTreeMap::new();
        for (e1, v1) in &self.terms {
            for (e2, v2) in &rhs.terms {
                LaurentK::insert_add(&mut terms, e1 + e2, v1 * v2);
            }
        }
        LaurentK { terms }
    }
}

impl fmt::Display for LaurentK {
    /// Deterministic exponent-descending rendering, e.g. `3/2*k^2 - k^-1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let coeff_str = rat_to_string(&mag);
            if *e == 0 {
                write!(f, "{coeff_str}")?;
            } else {
                let kpow = if *e == 1 {
                    "k".to_string()
                } else {
                    format!("k^{e}")
                };
                if mag.is_one() {
                    write!(f, "{kpow}")?;
                } else {
                    write!(f, "{coeff_str}*{kpow}")?;
                }
            }
        }
        Ok(())
    }
}
