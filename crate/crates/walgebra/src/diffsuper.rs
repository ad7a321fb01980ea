//! Differential superpolynomial algebra `C_diff[u_i | i in I]` over the
//! Laurent coefficient ring in `k`, with the even derivation `d`, left/right
//! partial derivatives, variational derivatives and lambda-polynomials.
//!
//! A monomial keeps its even factors in a sparse exponent map and its odd
//! factors as a strictly ascending list of `(generator, order)` pairs; the
//! Koszul sign of sorting is folded into the coefficient, so equality of
//! normal forms is structural equality.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::scalars::{rat_int, LaurentK, Rat};
use crate::Error;

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn xor(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn of_count(n: usize) -> Parity {
        if n % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }
}

/// Koszul sign `(-1)^{p(a)p(b)}` as a rational `+-1`.
pub fn koszul(a: Parity, b: Parity) -> Rat {
    if a.is_odd() && b.is_odd() {
        rat_int(-1)
    } else {
        rat_int(1)
    }
}

pub type VarIx = usize;

/// Signature of a variable universe: names, parities and optional conformal
/// weights, one entry per generator index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenSig {
    pub names: Vec<String>,
    pub parity: Vec<Parity>,
    pub weights: Option<Vec<Rat>>,
}

impl GenSig {
    pub fn new(names: Vec<String>, parity: Vec<Parity>) -> Self {
        assert_eq!(names.len(), parity.len());
        GenSig {
            names,
            parity,
            weights: None,
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<VarIx> {
        self.names.iter().position(|n| n == name)
    }

    pub fn weight(&self, ix: VarIx) -> Option<&Rat> {
        self.weights.as_ref().map(|w| &w[ix])
    }
}

/// `(generator index, derivative order)`.
pub type Var = (VarIx, u32);

/// Canonical monomial key. Even factors are a sparse `(var, order) -> power`
/// map; odd factors are strictly ascending (an odd square is zero).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonKey {
    pub evens: Vec<(Var, u32)>,
    pub odds: Vec<Var>,
}

impl MonKey {
    pub fn unit() -> Self {
        MonKey {
            evens: Vec::new(),
            odds: Vec::new(),
        }
    }

    pub fn degree(&self) -> u64 {
        self.evens.iter().map(|(_, p)| *p as u64).sum::<u64>() + self.odds.len() as u64
    }

    fn diff_order(&self) -> u64 {
        self.evens
            .iter()
            .map(|((_, n), p)| *n as u64 * *p as u64)
            .sum::<u64>()
            + self.odds.iter().map(|(_, n)| *n as u64).sum::<u64>()
    }

    pub fn parity(&self) -> Parity {
        Parity::of_count(self.odds.len())
    }

    fn is_unit(&self) -> bool {
        self.evens.is_empty() && self.odds.is_empty()
    }
}

impl PartialOrd for MonKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MonKey {
    /// Graded order: total degree, then total derivative order, then the
    /// variable lists. Purely a storage/printing order.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.diff_order().cmp(&other.diff_order()))
            .then_with(|| self.evens.cmp(&other.evens))
            .then_with(|| self.odds.cmp(&other.odds))
    }
}

/// Element of the differential superpolynomial algebra in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DiffPoly {
    terms: BTreeMap<MonKey, LaurentK>,
}

/// Merges two ascending odd-factor lists, counting the Koszul transpositions.
/// Returns `None` when a factor repeats (odd squares vanish).
fn merge_odds(a: &[Var], b: &[Var]) -> Option<(Vec<Var>, bool)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut i = 0;
    let mut j = 0;
    let mut inversions: u64 = 0;
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            Ordering::Greater => {
                // b[j] jumps over the remaining elements of a
                inversions += (a.len() - i) as u64;
                out.push(b[j]);
                j += 1;
            }
            Ordering::Equal => return None,
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    Some((out, inversions % 2 == 1))
}

/// Sorts an arbitrary odd-factor list into canonical order, tracking the sign
/// of the permutation. `None` when a factor repeats.
fn canonicalize_odds(mut v: Vec<Var>) -> Option<(Vec<Var>, bool)> {
    // insertion sort with transposition counting; lists are tiny
    let mut swaps: u64 = 0;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            swaps += 1;
            j -= 1;
        }
    }
    for w in v.windows(2) {
        if w[0] == w[1] {
            return None;
        }
    }
    Some((v, swaps % 2 == 1))
}

impl DiffPoly {
    pub fn zero() -> Self {
        DiffPoly::default()
    }

    pub fn one() -> Self {
        Self::constant(LaurentK::one())
    }

    pub fn constant(c: LaurentK) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(MonKey::unit(), c);
        }
        DiffPoly { terms }
    }

    pub fn constant_rat(r: Rat) -> Self {
        Self::constant(LaurentK::from_rat(r))
    }

    /// The variable `d^order u_ix`.
    pub fn variable(sig: &GenSig, ix: VarIx, order: u32) -> Self {
        let key = match sig.parity[ix] {
            Parity::Even => MonKey {
                evens: vec![((ix, order), 1)],
                odds: Vec::new(),
            },
            Parity::Odd => MonKey {
                evens: Vec::new(),
                odds: vec![(ix, order)],
            },
        };
        let mut terms = BTreeMap::new();
        terms.insert(key, LaurentK::one());
        DiffPoly { terms }
    }

    pub fn var_named(sig: &GenSig, name: &str) -> Self {
        Self::variable(sig, sig.index_of(name).expect("unknown variable"), 0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MonKey, &LaurentK)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Constant (unit-monomial) coefficient.
    pub fn constant_part(&self) -> LaurentK {
        self.terms
            .get(&MonKey::unit())
            .cloned()
            .unwrap_or_else(LaurentK::zero)
    }

    fn insert_add(terms: &mut BTreeMap<MonKey, LaurentK>, key: MonKey, val: LaurentK) {
        if val.is_zero() {
            return;
        }
        match terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(val);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = &*e.get() + &val;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, c: &LaurentK) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        DiffPoly {
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.clone(), v * c))
                .collect(),
        }
    }

    pub fn scale_rat(&self, r: &Rat) -> Self {
        self.scale(&LaurentK::from_rat(r.clone()))
    }

    pub fn scale_int(&self, n: i64) -> Self {
        self.scale_rat(&rat_int(n))
    }

    /// Parity of the polynomial when homogeneous; `None` when mixed.
    /// The zero polynomial counts as even.
    pub fn parity(&self) -> Option<Parity> {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return Some(Parity::Even);
        };
        let p = first.parity();
        if it.all(|k| k.parity() == p) {
            Some(p)
        } else {
            None
        }
    }

    /// Splits into (even part, odd part).
    pub fn parity_split(&self) -> (DiffPoly, DiffPoly) {
        let mut even = DiffPoly::zero();
        let mut odd = DiffPoly::zero();
        for (k, v) in &self.terms {
            let target = if k.parity().is_odd() { &mut odd } else { &mut even };
            target.terms.insert(k.clone(), v.clone());
        }
        (even, odd)
    }

    /// Conformal weight of a weight-homogeneous polynomial (constants have
    /// weight zero only if they are the whole polynomial). `None` when mixed
    /// or when the signature carries no weights.
    pub fn weight(&self, sig: &GenSig) -> Option<Rat> {
        let weights = sig.weights.as_ref()?;
        let mut result: Option<Rat> = None;
        for key in self.terms.keys() {
            let mut w = Rat::from_integer(0.into());
            for ((ix, n), p) in &key.evens {
                w += (&weights[*ix] + rat_int(*n as i64)) * rat_int(*p as i64);
            }
            for (ix, n) in &key.odds {
                w += &weights[*ix] + rat_int(*n as i64);
            }
            match &result {
                None => result = Some(w),
                Some(prev) if *prev == w => {}
                _ => return None,
            }
        }
        result.or_else(|| Some(Rat::from_integer(0.into())))
    }

    fn mul_monomials(a: (&MonKey, &LaurentK), b: (&MonKey, &LaurentK)) -> Option<(MonKey, LaurentK)> {
        let (odds, negate) = merge_odds(&a.0.odds, &b.0.odds)?;
        let mut evens: BTreeMap<Var, u32> = a.0.evens.iter().cloned().collect();
        for (v, p) in &b.0.evens {
            *evens.entry(*v).or_insert(0) += p;
        }
        let mut coeff = a.1 * b.1;
        if negate {
            coeff = -&coeff;
        }
        Some((
            MonKey {
                evens: evens.into_iter().collect(),
                odds,
            },
            coeff,
        ))
    }

    /// Total derivative: the even derivation with `d(d^n u) = d^{n+1} u`.
    pub fn d(&self) -> Self {
        let mut out = BTreeMap::new();
        for (key, coeff) in &self.terms {
            // even factors
            for (pos, ((ix, n), p)) in key.evens.iter().enumerate() {
                let mut evens: BTreeMap<Var, u32> = key.evens.iter().cloned().collect();
                if *p == 1 {
                    evens.remove(&(*ix, *n));
                } else {
                    evens.insert((*ix, *n), p - 1);
                }
                *evens.entry((*ix, n + 1)).or_insert(0) += 1;
                let _ = pos;
                let new_key = MonKey {
                    evens: evens.into_iter().collect(),
                    odds: key.odds.clone(),
                };
                Self::insert_add(&mut out, new_key, coeff.scale(&rat_int(*p as i64)));
            }
            // odd factors: derivation is even, so no sign from passing through
            for t in 0..key.odds.len() {
                let (ix, n) = key.odds[t];
                let mut odds = key.odds.clone();
                odds[t] = (ix, n + 1);
                let Some((odds, negate)) = canonicalize_odds(odds) else {
                    continue;
                };
                let new_key = MonKey {
                    evens: key.evens.clone(),
                    odds,
                };
                let c = if negate { -coeff } else { coeff.clone() };
                Self::insert_add(&mut out, new_key, c);
            }
        }
        DiffPoly { terms: out }
    }

    pub fn d_n(&self, n: u32) -> Self {
        let mut p = self.clone();
        for _ in 0..n {
            p = p.d();
        }
        p
    }

    /// Left or right partial derivative with respect to `d^order u_ix`.
    /// Whether the variable is even or odd is read off the monomial itself.
    pub fn partial(&self, var: Var, side: Side) -> Self {
        let mut out = BTreeMap::new();
        for (key, coeff) in &self.terms {
            if let Some(epos) = key.evens.iter().position(|(v, _)| *v == var) {
                let ((ix, n), p) = key.evens[epos];
                let mut evens: BTreeMap<Var, u32> = key.evens.iter().cloned().collect();
                if p == 1 {
                    evens.remove(&(ix, n));
                } else {
                    evens.insert((ix, n), p - 1);
                }
                let new_key = MonKey {
                    evens: evens.into_iter().collect(),
                    odds: key.odds.clone(),
                };
                Self::insert_add(&mut out, new_key, coeff.scale(&rat_int(p as i64)));
            } else if let Some(t) = key.odds.iter().position(|v| *v == var) {
                let k = key.odds.len();
                let negate = match side {
                    Side::Left => t % 2 == 1,          // (-1)^{t-1}, 1-based t
                    Side::Right => (k - 1 - t) % 2 == 1, // (-1)^{k-t}, 1-based t
                };
                let mut odds = key.odds.clone();
                odds.remove(t);
                let new_key = MonKey {
                    evens: key.evens.clone(),
                    odds,
                };
                let c = if negate { -coeff } else { coeff.clone() };
                Self::insert_add(&mut out, new_key, c);
            }
        }
        DiffPoly { terms: out }
    }

    /// Largest derivative order of generator `ix` occurring in the polynomial.
    pub fn max_order(&self, ix: VarIx) -> Option<u32> {
        let mut max = None;
        for key in self.terms.keys() {
            for ((i, n), _) in &key.evens {
                if *i == ix {
                    max = Some(max.map_or(*n, |m: u32| m.max(*n)));
                }
            }
            for (i, n) in &key.odds {
                if *i == ix {
                    max = Some(max.map_or(*n, |m: u32| m.max(*n)));
                }
            }
        }
        max
    }

    /// All generator indices occurring in the polynomial.
    pub fn vars_used(&self) -> Vec<VarIx> {
        let mut seen = std::collections::BTreeSet::new();
        for key in self.terms.keys() {
            for ((i, _), _) in &key.evens {
                seen.insert(*i);
            }
            for (i, _) in &key.odds {
                seen.insert(*i);
            }
        }
        seen.into_iter().collect()
    }

    /// Variational derivative `sum_n (-d)^n partial(., (ix, n))`.
    pub fn var_deriv(&self, ix: VarIx, side: Side) -> Self {
        let Some(max) = self.max_order(ix) else {
            return Self::zero();
        };
        let mut acc = Self::zero();
        for n in 0..=max {
            let mut term = self.partial((ix, n), side);
            term = term.d_n(n);
            if n % 2 == 1 {
                term = -&term;
            }
            acc = &acc + &term;
        }
        acc
    }

    /// Replaces `d^n u_i` by `d^n(map[i])` for every mapped generator;
    /// unmapped generators pass through. The parity of each image must match
    /// the parity of the generator it replaces.
    pub fn substitute(&self, map: &BTreeMap<VarIx, DiffPoly>) -> Result<Self, Error> {
        for (ix, img) in map {
            // the required parity is read from occurrences below; here we
            // only insist the image itself is homogeneous
            if img.parity().is_none() {
                return Err(Error::ParityMismatch(format!(
                    "substitution image for generator {ix} is not parity-homogeneous"
                )));
            }
        }
        let mut memo: BTreeMap<Var, DiffPoly> = BTreeMap::new();
        let mut image_at = |ix: VarIx, n: u32, map: &BTreeMap<VarIx, DiffPoly>| -> DiffPoly {
            if let Some(p) = memo.get(&(ix, n)) {
                return p.clone();
            }
            let img = map.get(&ix).expect("mapped").d_n(n);
            memo.insert((ix, n), img.clone());
            img
        };
        let mut out = Self::zero();
        for (key, coeff) in &self.terms {
            let mut acc = Self::constant(coeff.clone());
            for ((ix, n), p) in &key.evens {
                let factor = if map.contains_key(ix) {
                    let img = image_at(*ix, *n, map);
                    if img.parity() == Some(Parity::Odd) {
                        return Err(Error::ParityMismatch(format!(
                            "odd image substituted for even generator {ix}"
                        )));
                    }
                    img
                } else {
                    let mut terms = BTreeMap::new();
                    terms.insert(
                        MonKey {
                            evens: vec![((*ix, *n), 1)],
                            odds: vec![],
                        },
                        LaurentK::one(),
                    );
                    DiffPoly { terms }
                };
                for _ in 0..*p {
                    acc = &acc * &factor;
                }
            }
            for (ix, n) in &key.odds {
                let factor = if map.contains_key(ix) {
                    let img = image_at(*ix, *n, map);
                    if img.parity() == Some(Parity::Even) && !img.is_zero() {
                        return Err(Error::ParityMismatch(format!(
                            "even image substituted for odd generator {ix}"
                        )));
                    }
                    img
                } else {
                    let mut terms = BTreeMap::new();
                    terms.insert(
                        MonKey {
                            evens: vec![],
                            odds: vec![(*ix, *n)],
                        },
                        LaurentK::one(),
                    );
                    DiffPoly { terms }
                };
                acc = &acc * &factor;
            }
            out = &out + &acc;
        }
        Ok(out)
    }

    /// Deterministic text rendering, e.g. `f - x^2 - k*D[x]`.
    pub fn render(&self, sig: &GenSig) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut s = String::new();
        let mut first = true;
        for (key, coeff) in &self.terms {
            let cs = coeff.to_string();
            let (neg, mag) = match cs.strip_prefix('-') {
                Some(rest) if !cs.contains(" - ") && !cs.contains(" + ") => (true, rest.to_string()),
                _ => (false, cs),
            };
            let multi = mag.contains(" - ") || mag.contains(" + ");
            if first {
                if neg {
                    s.push('-');
                }
                first = false;
            } else if neg {
                s.push_str(" - ");
            } else {
                s.push_str(" + ");
            }
            let mut factors: Vec<String> = Vec::new();
            for ((ix, n), p) in &key.evens {
                factors.push(render_var(sig, *ix, *n, *p));
            }
            for (ix, n) in &key.odds {
                factors.push(render_var(sig, *ix, *n, 1));
            }
            if factors.is_empty() {
                if multi {
                    let _ = write!(s, "({mag})");
                } else {
                    s.push_str(&mag);
                }
            } else if mag == "1" {
                s.push_str(&factors.join("*"));
            } else if multi {
                let _ = write!(s, "({mag})*{}", factors.join("*"));
            } else {
                let _ = write!(s, "{mag}*{}", factors.join("*"));
            }
        }
        s
    }
}

fn render_var(sig: &GenSig, ix: VarIx, order: u32, power: u32) -> String {
    let name = &sig.names[ix];
    let base = match order {
        0 => name.clone(),
        1 => format!("D[{name}]"),
        n => format!("D{n}[{name}]"),
    };
    if power == 1 {
        base
    } else {
        format!("{base}^{power}")
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Add for &DiffPoly {
    type Output = DiffPoly;
    fn add(self, rhs: &DiffPoly) -> DiffPoly {
        let mut terms = self.terms.clone();
        for (k, v) in &rhs.terms {
            DiffPoly::insert_add(&mut terms, k.clone(), v.clone());
        }
        DiffPoly { terms }
    }
}

impl Sub for &DiffPoly {
    type Output = DiffPoly;
    fn sub(self, rhs: &DiffPoly) -> DiffPoly {
        self + &(-rhs)
    }
}

impl Neg for &DiffPoly {
    type Output = DiffPoly;
    fn neg(self) -> DiffPoly {
        DiffPoly {
            terms: self.terms.iter().map(|(k, v)| (k.clone(), -v)).collect(),
        }
    }
}

impl Mul for &DiffPoly {
    type Output = DiffPoly;
    fn mul(self, rhs: &DiffPoly) -> DiffPoly {
        let mut terms = BTreeMap::new();
        for a in &self.terms {
            for b in &rhs.terms {
                if let Some((k, v)) = DiffPoly::mul_monomials(a, b) {
                    DiffPoly::insert_add(&mut terms, k, v);
                }
            }
        }
        DiffPoly { terms }
    }
}

/// Polynomial in the formal variable lambda with `DiffPoly` coefficients.
/// Trailing zero coefficients are trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LambdaPoly {
    coeffs: Vec<DiffPoly>,
}

impl LambdaPoly {
    pub fn zero() -> Self {
        LambdaPoly { coeffs: Vec::new() }
    }

    pub fn from_poly(p: DiffPoly) -> Self {
        let mut l = LambdaPoly { coeffs: vec![p] };
        l.trim();
        l
    }

    pub fn from_coeffs(coeffs: Vec<DiffPoly>) -> Self {
        let mut l = LambdaPoly { coeffs };
        l.trim();
        l
    }

    fn trim(&mut self) {
        while self.coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, n: usize) -> DiffPoly {
        self.coeffs.get(n).cloned().unwrap_or_else(DiffPoly::zero)
    }

    pub fn coeffs(&self) -> &[DiffPoly] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    /// Value at lambda = 0, i.e. the constant lambda-coefficient.
    pub fn at_zero(&self) -> DiffPoly {
        self.coeff(0)
    }

    /// Applies `lambda + d` once: lambda shifts coefficients up, `d` acts on
    /// each coefficient.
    pub fn shift(&self) -> Self {
        let mut coeffs = vec![DiffPoly::zero(); self.coeffs.len() + 1];
        for (p, c) in self.coeffs.iter().enumerate() {
            coeffs[p + 1] = &coeffs[p + 1] + c;
            coeffs[p] = &coeffs[p] + &c.d();
        }
        Self::from_coeffs(coeffs)
    }

    /// `(lambda + d)^n` (sign +1) or `(-lambda - d)^n` (sign -1).
    pub fn shift_n(&self, n: u32, sign: i32) -> Self {
        let mut out = self.clone();
        for _ in 0..n {
            out = out.shift();
        }
        if sign < 0 && n % 2 == 1 {
            out = -&out;
        }
        out
    }

    /// Left multiplication by a polynomial coefficient.
    pub fn mul_left(&self, p: &DiffPoly) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|c| p * c).collect())
    }

    pub fn scale(&self, c: &LaurentK) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|x| x.scale(c)).collect())
    }

    /// Substitutes `lambda -> -lambda - d`, the operator acting on each
    /// coefficient (used by the skew-symmetry axiom).
    pub fn subst_neg(&self) -> Self {
        let mut acc = LambdaPoly::zero();
        for (p, c) in self.coeffs.iter().enumerate() {
            let t = LambdaPoly::from_poly(c.clone()).shift_n(p as u32, -1);
            acc = &acc + &t;
        }
        acc
    }

    pub fn map_coeffs(&self, f: impl Fn(&DiffPoly) -> DiffPoly) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(f).collect())
    }

    pub fn render(&self, sig: &GenSig) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (p, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let cs = c.render(sig);
            let lam = match p {
                0 => String::new(),
                1 => "*lam".to_string(),
                n => format!("*lam^{n}"),
            };
            if p == 0 {
                parts.push(cs);
            } else if c.num_terms() > 1 {
                parts.push(format!("({cs}){lam}"));
            } else {
                parts.push(format!("{cs}{lam}"));
            }
        }
        parts.join(" + ")
    }
}

impl Add for &LambdaPoly {
    type Output = LambdaPoly;
    fn add(self, rhs: &LambdaPoly) -> LambdaPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            coeffs.push(&self.coeff(i) + &rhs.coeff(i));
        }
        LambdaPoly::from_coeffs(coeffs)
    }
}

impl Sub for &LambdaPoly {
    type Output = LambdaPoly;
    fn sub(self, rhs: &LambdaPoly) -> LambdaPoly {
        self + &(-rhs)
    }
}

impl Neg for &LambdaPoly {
    type Output = LambdaPoly;
    fn neg(self) -> LambdaPoly {
        LambdaPoly::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig2() -> GenSig {
        // one even variable x, two odd variables a < b
        GenSig::new(
            vec!["x".into(), "a".into(), "b".into()],
            vec![Parity::Even, Parity::Odd, Parity::Odd],
        )
    }

    #[test]
    fn odd_square_vanishes() {
        let sig = sig2();
        let a = DiffPoly::var_named(&sig, "a");
        assert!((&a * &a).is_zero());
    }

    #[test]
    fn distinct_odd_factors_anticommute() {
        let sig = sig2();
        let a = DiffPoly::var_named(&sig, "a");
        let da = DiffPoly::variable(&sig, 1, 1);
        let left = &da * &a;
        let right = &a * &da;
        assert_eq!(left, -&right);
        assert!(!left.is_zero());
    }

    #[test]
    fn square_of_odd_pair_vanishes() {
        let sig = sig2();
        let a = DiffPoly::var_named(&sig, "a");
        let b = DiffPoly::var_named(&sig, "b");
        let ba = &b * &a;
        assert!((&ba * &ba).is_zero());
    }

    #[test]
    fn supercommutativity_randomized() {
        let sig = sig2();
        // monomial basis of small degree
        let gens = [
            DiffPoly::var_named(&sig, "x"),
            DiffPoly::variable(&sig, 0, 1),
            DiffPoly::var_named(&sig, "a"),
            DiffPoly::variable(&sig, 1, 1),
            DiffPoly::var_named(&sig, "b"),
        ];
        let mut state: u64 = 12345;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            state
        };
        for _ in 0..100 {
            let mut p = DiffPoly::one();
            for _ in 0..(next() % 3 + 1) {
                p = &p * &gens[(next() % 5) as usize];
            }
            let mut q = DiffPoly::one();
            for _ in 0..(next() % 3 + 1) {
                q = &q * &gens[(next() % 5) as usize];
            }
            let (pp, pq) = (p.parity(), q.parity());
            let (Some(pp), Some(pq)) = (pp, pq) else { continue };
            let sign = koszul(pp, pq);
            assert_eq!(&p * &q, (&q * &p).scale_rat(&sign));
        }
    }

    #[test]
    fn total_derivative_leibniz() {
        let sig = sig2();
        let x = DiffPoly::var_named(&sig, "x");
        let x2 = &x * &x;
        // d(x^2) = 2 x dx
        let expected = (&x * &DiffPoly::variable(&sig, 0, 1)).scale_int(2);
        assert_eq!(x2.d(), expected);

        let a = DiffPoly::var_named(&sig, "a");
        let b = DiffPoly::var_named(&sig, "b");
        let ab = &a * &b;
        let expected =
            &(&DiffPoly::variable(&sig, 1, 1) * &b) + &(&a * &DiffPoly::variable(&sig, 2, 1));
        assert_eq!(ab.d(), expected);

        // d(k * dx) = k * d2x
        let kdx = DiffPoly::variable(&sig, 0, 1).scale(&LaurentK::k());
        assert_eq!(kdx.d(), DiffPoly::variable(&sig, 0, 2).scale(&LaurentK::k()));
    }

    #[test]
    fn left_right_partials_on_odd_pair() {
        let sig = sig2();
        let a = DiffPoly::var_named(&sig, "a");
        let b = DiffPoly::var_named(&sig, "b");
        let ab = &a * &b; // canonical order a < b
        assert_eq!(ab.partial((1, 0), Side::Left), b);
        assert_eq!(ab.partial((2, 0), Side::Left), -&a);
        assert_eq!(ab.partial((2, 0), Side::Right), a);
        assert_eq!(ab.partial((1, 0), Side::Right), -&b);

        let x = DiffPoly::var_named(&sig, "x");
        let x2 = &x * &x;
        assert_eq!(x2.partial((0, 0), Side::Left), x.scale_int(2));
        assert_eq!(x2.partial((0, 0), Side::Right), x.scale_int(2));
    }

    #[test]
    fn var_deriv_kills_total_derivatives() {
        let sig = sig2();
        let x = DiffPoly::var_named(&sig, "x");
        let a = DiffPoly::var_named(&sig, "a");
        let b = DiffPoly::var_named(&sig, "b");
        let p = &(&x * &(&a * &b)) + &(&x * &x).scale(&LaurentK::k());
        let dp = p.d();
        for ix in 0..3 {
            assert!(dp.var_deriv(ix, Side::Left).is_zero(), "ix {ix}");
            assert!(dp.var_deriv(ix, Side::Right).is_zero(), "ix {ix}");
        }
    }

    #[test]
    fn var_deriv_example() {
        // delta/delta x of (f - x^2 - k dx) = -2x, where f is a second even var
        let sig = GenSig::new(
            vec!["x".into(), "f".into()],
            vec![Parity::Even, Parity::Even],
        );
        let x = DiffPoly::var_named(&sig, "x");
        let f = DiffPoly::var_named(&sig, "f");
        let phi = &(&f - &(&x * &x)) - &DiffPoly::variable(&sig, 0, 1).scale(&LaurentK::k());
        assert_eq!(phi.var_deriv(0, Side::Left), x.scale_int(-2));
        assert_eq!(phi.var_deriv(1, Side::Left), DiffPoly::one());
    }

    #[test]
    fn commutator_partial_with_d() {
        // [partial/partial u^(n), d] = partial/partial u^(n-1) on random polys
        let sig = sig2();
        let gens = [
            DiffPoly::var_named(&sig, "x"),
            DiffPoly::variable(&sig, 0, 1),
            DiffPoly::var_named(&sig, "a"),
            DiffPoly::variable(&sig, 1, 1),
            DiffPoly::var_named(&sig, "b"),
            DiffPoly::variable(&sig, 2, 2),
        ];
        let mut state: u64 = 999;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            state
        };
        for _ in 0..60 {
            let mut p = DiffPoly::one();
            for _ in 0..(next() % 4 + 1) {
                p = &p * &gens[(next() % 6) as usize];
            }
            for (ix, n) in [(0usize, 1u32), (1, 1), (2, 2)] {
                let lhs = &p.d().partial((ix, n), Side::Left)
                    - &p.partial((ix, n), Side::Left).d();
                let rhs = p.partial((ix, n - 1), Side::Left);
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn left_right_var_deriv_sign_relation() {
        // delta phi / delta u_i = (-1)^{p(u_i) p(phi u_i)} delta_R phi / delta_R u_i
        let sig = sig2();
        let gens = [
            DiffPoly::var_named(&sig, "x"),
            DiffPoly::var_named(&sig, "a"),
            DiffPoly::variable(&sig, 1, 1),
            DiffPoly::var_named(&sig, "b"),
        ];
        let mut state: u64 = 4242;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            state
        };
        for _ in 0..80 {
            let mut p = DiffPoly::one();
            for _ in 0..(next() % 3 + 1) {
                p = &p * &gens[(next() % 4) as usize];
            }
            let Some(pp) = p.parity() else { continue };
            for ix in 0..3usize {
                let pu = sig.parity[ix];
                let sign = koszul(pu, pp.xor(pu));
                let lhs = p.var_deriv(ix, Side::Left);
                let rhs = p.var_deriv(ix, Side::Right).scale_rat(&sign);
                assert_eq!(lhs, rhs, "poly {:?} ix {ix}", p);
            }
        }
    }

    #[test]
    fn substitution_identity_and_parity_guard() {
        let sig = sig2();
        let x = DiffPoly::var_named(&sig, "x");
        let a = DiffPoly::var_named(&sig, "a");
        let p = &(&x * &a) + &DiffPoly::variable(&sig, 0, 2);
        let mut idmap = BTreeMap::new();
        idmap.insert(0usize, x.clone());
        idmap.insert(1usize, a.clone());
        assert_eq!(p.substitute(&idmap).unwrap(), p);

        let mut bad = BTreeMap::new();
        bad.insert(1usize, x.clone()); // even image for odd generator
        assert!(p.substitute(&bad).is_err());
    }

    #[test]
    fn lambda_shift_examples() {
        let sig = sig2();
        let x = DiffPoly::var_named(&sig, "x");
        // (lambda + d) applied to 1 = lambda
        let l = LambdaPoly::from_poly(DiffPoly::one()).shift_n(1, 1);
        assert_eq!(l.coeff(0), DiffPoly::zero());
        assert_eq!(l.coeff(1), DiffPoly::one());

        // (lambda + d)^2 x = lambda^2 x + 2 lambda dx + d2x
        let l = LambdaPoly::from_poly(x.clone()).shift_n(2, 1);
        assert_eq!(l.coeff(2), x);
        assert_eq!(l.coeff(1), DiffPoly::variable(&sig, 0, 1).scale_int(2));
        assert_eq!(l.coeff(0), DiffPoly::variable(&sig, 0, 2));

        // (-lambda - d) x^2 = -lambda x^2 - 2 x dx
        let x2 = &x * &x;
        let l = LambdaPoly::from_poly(x2.clone()).shift_n(1, -1);
        assert_eq!(l.coeff(1), -&x2);
        assert_eq!(l.coeff(0), -&x2.d());
    }

    #[test]
    fn weight_additivity() {
        let mut sig = sig2();
        sig.weights = Some(vec![
            crate::scalars::rat(2, 1),
            crate::scalars::rat(3, 2),
            crate::scalars::rat(3, 2),
        ]);
        let x = DiffPoly::var_named(&sig, "x");
        let a = DiffPoly::var_named(&sig, "a");
        let p = &x * &a;
        assert_eq!(p.weight(&sig), Some(crate::scalars::rat(7, 2)));
        assert_eq!(p.d().weight(&sig), Some(crate::scalars::rat(9, 2)));
        let mixed = &p + &x;
        assert_eq!(mixed.weight(&sig), None);
    }

    #[test]
    fn render_examples() {
        let sig = GenSig::new(
            vec!["x".into(), "f".into()],
            vec![Parity::Even, Parity::Even],
        );
        let x = DiffPoly::var_named(&sig, "x");
        let f = DiffPoly::var_named(&sig, "f");
        let phi = &(&f - &(&x * &x)) - &DiffPoly::variable(&sig, 0, 1).scale(&LaurentK::k());
        assert_eq!(phi.render(&sig), "f - k*D[x] - x^2");
        assert_eq!(DiffPoly::zero().render(&sig), "0");
    }
}
