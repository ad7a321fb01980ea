//! Finite-dimensional Lie superalgebras with an invariant even supersymmetric
//! bilinear form, sl2-triples, Dynkin gradings, the distinguished graded
//! subspaces and the loop grading of `g((z^-1))`.

use num_traits::{One, Signed, Zero};

use crate::diffsuper::Parity;
use crate::linalg::QMat;
use crate::scalars::{rat, rat_int, Rat};
use crate::Error;

/// Structure constants and Gram matrix over a fixed homogeneous basis.
#[derive(Clone, Debug)]
pub struct LieSuperAlgebra {
    pub names: Vec<String>,
    pub parity: Vec<Parity>,
    /// `bracket[i][j]` = coordinates of `[b_i, b_j]`.
    bracket: Vec<Vec<Vec<Rat>>>,
    /// Gram matrix `form[(i,j)] = (b_i | b_j)`.
    form: QMat,
}

impl LieSuperAlgebra {
    pub fn new(
        names: Vec<String>,
        parity: Vec<Parity>,
        bracket: Vec<Vec<Vec<Rat>>>,
        form: QMat,
    ) -> Result<Self, Error> {
        let alg = LieSuperAlgebra {
            names,
            parity,
            bracket,
            form,
        };
        alg.check_structure()?;
        Ok(alg)
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn basis_vector(&self, i: usize) -> Vec<Rat> {
        let mut v = vec![Rat::zero(); self.dim()];
        v[i] = Rat::one();
        v
    }

    pub fn bracket_basis(&self, i: usize, j: usize) -> &[Rat] {
        &self.bracket[i][j]
    }

    pub fn bracket_vec(&self, x: &[Rat], y: &[Rat]) -> Vec<Rat> {
        let n = self.dim();
        let mut out = vec![Rat::zero(); n];
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if y[j].is_zero() {
                    continue;
                }
                let c = &x[i] * &y[j];
                for (l, s) in self.bracket[i][j].iter().enumerate() {
                    if !s.is_zero() {
                        out[l] += &c * s;
                    }
                }
            }
        }
        out
    }

    pub fn form_basis(&self, i: usize, j: usize) -> &Rat {
        &self.form[(i, j)]
    }

    pub fn form_vec(&self, x: &[Rat], y: &[Rat]) -> Rat {
        let mut acc = Rat::zero();
        for i in 0..self.dim() {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..self.dim() {
                if !y[j].is_zero() && !self.form[(i, j)].is_zero() {
                    acc += &(&x[i] * &y[j]) * &self.form[(i, j)];
                }
            }
        }
        acc
    }

    pub fn rescale_form(&mut self, c: &Rat) {
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                let v = &self.form[(i, j)] * c;
                self.form[(i, j)] = v;
            }
        }
    }

    /// Parity of a coordinate vector when homogeneous.
    pub fn parity_of_vec(&self, x: &[Rat]) -> Option<Parity> {
        let mut p = None;
        for (i, c) in x.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            match p {
                None => p = Some(self.parity[i]),
                Some(q) if q == self.parity[i] => {}
                _ => return None,
            }
        }
        Some(p.unwrap_or(Parity::Even))
    }

    /// Matrix of `ad x` acting on coordinates.
    pub fn ad(&self, x: &[Rat]) -> QMat {
        let n = self.dim();
        let mut m = QMat::zeros(n, n);
        for j in 0..n {
            let img = self.bracket_vec(x, &self.basis_vector(j));
            for i in 0..n {
                m[(i, j)] = img[i].clone();
            }
        }
        m
    }

    fn check_structure(&self) -> Result<(), Error> {
        let n = self.dim();
        let sgn = |i: usize, j: usize| -> Rat {
            if self.parity[i].is_odd() && self.parity[j].is_odd() {
                rat_int(-1)
            } else {
                rat_int(1)
            }
        };
        // super skew-symmetry and grading of the bracket by parity
        for i in 0..n {
            for j in 0..n {
                let pij = self.parity[i].xor(self.parity[j]);
                for (l, c) in self.bracket[i][j].iter().enumerate() {
                    if !c.is_zero() && self.parity[l] != pij {
                        return Err(Error::NotSl2Triple(format!(
                            "bracket [{}, {}] not parity-homogeneous",
                            self.names[i], self.names[j]
                        )));
                    }
                }
                let s = sgn(i, j);
                for l in 0..n {
                    let lhs = &self.bracket[i][j][l];
                    let rhs = -(&s * &self.bracket[j][i][l]);
                    if *lhs != rhs {
                        return Err(Error::NotSl2Triple(format!(
                            "super skew-symmetry fails at [{}, {}]",
                            self.names[i], self.names[j]
                        )));
                    }
                }
            }
        }
        // super Jacobi on all basis triples:
        // [a,[b,c]] = [[a,b],c] + (-1)^{p(a)p(b)} [b,[a,c]]
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let lhs = self.bracket_vec(&self.basis_vector(a), &self.bracket[b][c]);
                    let t1 = self.bracket_vec(&self.bracket[a][b], &self.basis_vector(c));
                    let t2 = self.bracket_vec(&self.basis_vector(b), &self.bracket[a][c]);
                    let s = sgn(a, b);
                    for l in 0..n {
                        let rhs = &t1[l] + &(&s * &t2[l]);
                        if lhs[l] != rhs {
                            return Err(Error::NotSl2Triple(format!(
                                "super Jacobi fails at ({}, {}, {})",
                                self.names[a], self.names[b], self.names[c]
                            )));
                        }
                    }
                }
            }
        }
        // form: even, supersymmetric, invariant, nondegenerate
        for i in 0..n {
            for j in 0..n {
                if self.parity[i] != self.parity[j] && !self.form[(i, j)].is_zero() {
                    return Err(Error::DegenerateForm(format!(
                        "form pairs different parities at ({}, {})",
                        self.names[i], self.names[j]
                    )));
                }
                let s = sgn(i, j);
                if self.form[(i, j)] != &s * &self.form[(j, i)] {
                    return Err(Error::DegenerateForm(format!(
                        "form not supersymmetric at ({}, {})",
                        self.names[i], self.names[j]
                    )));
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let lhs = self.form_vec(&self.bracket[a][b], &self.basis_vector(c));
                    let rhs = self.form_vec(&self.basis_vector(a), &self.bracket[b][c]);
                    if lhs != rhs {
                        return Err(Error::DegenerateForm(format!(
                            "form not invariant at ({}, {}, {})",
                            self.names[a], self.names[b], self.names[c]
                        )));
                    }
                }
            }
        }
        if self.form.rank() != n {
            return Err(Error::DegenerateForm(
                "Gram matrix is singular".into(),
            ));
        }
        Ok(())
    }
}

/// An sl2-triple with its `ad(h/2)` grading on a rebased eigenbasis.
#[derive(Clone, Debug)]
pub struct Sl2Data {
    pub e: Vec<Rat>,
    pub h: Vec<Rat>,
    pub f: Vec<Rat>,
    /// Per-basis-index eigenvalue of `ad(h/2)`; half-integers.
    pub grading: Vec<Rat>,
    /// Largest eigenvalue with a nonzero eigenspace.
    pub d: Rat,
    pub is_zero_triple: bool,
}

/// Verifies `[h,e] = 2e`, `[h,f] = -2f`, `[e,f] = h` (all-zero triple allowed),
/// rebases the algebra to a parity-homogeneous `ad(h/2)` eigenbasis, rescales
/// the form so `(e|f) = 1`, and runs the good-grading checks.
pub fn attach_sl2(
    alg: &LieSuperAlgebra,
    e: &[Rat],
    h: &[Rat],
    f: &[Rat],
) -> Result<(LieSuperAlgebra, Sl2Data), Error> {
    let n = alg.dim();
    let is_zero = |v: &[Rat]| v.iter().all(|c| c.is_zero());
    let zero_triple = is_zero(e) && is_zero(h) && is_zero(f);

    let check_eq = |got: Vec<Rat>, want: Vec<Rat>, what: &str| -> Result<(), Error> {
        if got != want {
            Err(Error::NotSl2Triple(format!("{what} fails")))
        } else {
            Ok(())
        }
    };
    let scale = |v: &[Rat], c: i64| -> Vec<Rat> { v.iter().map(|x| x * rat_int(c)).collect() };
    check_eq(alg.bracket_vec(h, e), scale(e, 2), "[h,e] = 2e")?;
    check_eq(alg.bracket_vec(h, f), scale(f, -2), "[h,f] = -2f")?;
    check_eq(alg.bracket_vec(e, f), h.to_vec(), "[e,f] = h")?;
    for (v, name) in [(e, "e"), (h, "h"), (f, "f")] {
        if alg.parity_of_vec(v) != Some(Parity::Even) {
            return Err(Error::NotSl2Triple(format!("{name} is not even")));
        }
    }

    // ad(h/2)
    let h2: Vec<Rat> = h.iter().map(|c| c / rat_int(2)).collect();
    let adh2 = alg.ad(&h2);

    // Gershgorin bound, then scan half-integer candidates.
    let mut bound = Rat::zero();
    for i in 0..n {
        let mut row = Rat::zero();
        for j in 0..n {
            row += adh2[(i, j)].abs();
        }
        if row > bound {
            bound = row;
        }
    }
    let two_bound = (&bound * rat_int(2)).ceil().to_integer();
    let two_bound: i64 = i64::try_from(two_bound.clone()).map_err(|_| {
        Error::NonHalfIntegerSpectrum("grading bound overflow".into())
    })?;

    struct Block {
        eigenvalue: Rat,
        parity: Parity,
        vectors: Vec<(Vec<Rat>, Option<String>)>, // coords in old basis, kept name
    }
    let mut blocks: Vec<Block> = Vec::new();
    let mut total = 0usize;

    for two_lambda in -two_bound..=two_bound {
        let lambda = rat(two_lambda, 2);
        // kernel of (ad h/2 - lambda) per parity block
        for par in [Parity::Even, Parity::Odd] {
            let idxs: Vec<usize> = (0..n).filter(|&i| alg.parity[i] == par).collect();
            if idxs.is_empty() {
                continue;
            }
            let mut m = QMat::zeros(idxs.len(), idxs.len());
            for (r, &i) in idxs.iter().enumerate() {
                for (c, &j) in idxs.iter().enumerate() {
                    m[(r, c)] = adh2[(i, j)].clone();
                    if r == c {
                        let v = &m[(r, c)] - &lambda;
                        m[(r, c)] = v;
                    }
                }
            }
            let ker = m.kernel();
            if ker.is_empty() {
                continue;
            }
            // candidate original basis vectors inside this block
            let mut vectors: Vec<(Vec<Rat>, Option<String>)> = Vec::new();
            let mut span: Vec<Vec<Rat>> = Vec::new();
            let in_span = |span: &Vec<Vec<Rat>>, v: &Vec<Rat>| -> bool {
                if v.iter().all(|c| c.is_zero()) {
                    return true;
                }
                if span.is_empty() {
                    return false;
                }
                let r0 = QMat::from_cols(span.clone()).rank();
                let mut aug = span.clone();
                aug.push(v.clone());
                QMat::from_cols(aug).rank() == r0
            };
            let expand = |v_small: &[Rat]| -> Vec<Rat> {
                let mut full = vec![Rat::zero(); n];
                for (pos, &i) in idxs.iter().enumerate() {
                    full[i] = v_small[pos].clone();
                }
                full
            };
            let zero = Rat::zero();
            for &i in &idxs {
                // original basis vector i is an eigenvector iff column i of
                // (ad h/2 - lambda) restricted is zero
                let col = adh2.col(i);
                let mut ok = true;
                for (r, ci) in col.iter().enumerate() {
                    let expect = if r == i { &lambda } else { &zero };
                    if ci != expect {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    let v = alg.basis_vector(i);
                    if !in_span(&span, &v) {
                        span.push(v.clone());
                        vectors.push((v, Some(alg.names[i].clone())));
                    }
                }
            }
            for kvec in &ker {
                if vectors.len() == ker.len() {
                    break;
                }
                let v = expand(kvec);
                if !in_span(&span, &v) {
                    span.push(v.clone());
                    vectors.push((v, None));
                }
            }
            if vectors.len() != ker.len() {
                return Err(Error::NonDiagonalizable(format!(
                    "could not complete eigenbasis at eigenvalue {lambda}"
                )));
            }
            total += vectors.len();
            blocks.push(Block {
                eigenvalue: lambda.clone(),
                parity: par,
                vectors,
            });
        }
    }
    if total != n {
        return Err(Error::NonDiagonalizable(format!(
            "eigenspaces of ad h/2 span dimension {total} of {n}"
        )));
    }

    // Degree-zero even block: keep the h-line as a basis direction and
    // complete it with the form-orthogonal complement of h inside the block.
    if !zero_triple {
        for block in &mut blocks {
            if !block.eigenvalue.is_zero() || block.parity != Parity::Even {
                continue;
            }
            let old = std::mem::take(&mut block.vectors);
            let mut new_vectors: Vec<(Vec<Rat>, Option<String>)> = Vec::new();
            // the h-direction: reuse an original basis vector when one spans it
            let mut h_done = false;
            for (v, name) in &old {
                if name.is_some() && is_proportional(v, h) {
                    new_vectors.push((v.clone(), name.clone()));
                    h_done = true;
                    break;
                }
            }
            if !h_done {
                new_vectors.push((h.to_vec(), Some("h".to_string())));
            }
            // orthogonal complement of h within the block
            let cols: Vec<Vec<Rat>> = old.iter().map(|(v, _)| v.clone()).collect();
            if cols.len() > 1 {
                let mut pairing = QMat::zeros(1, cols.len());
                for (j, v) in cols.iter().enumerate() {
                    pairing[(0, j)] = alg.form_vec(h, v);
                }
                let ker = pairing.kernel();
                let mut counter = 1;
                for kvec in ker {
                    let mut full = vec![Rat::zero(); n];
                    for (j, c) in kvec.iter().enumerate() {
                        for i in 0..n {
                            full[i] += c * &cols[j][i];
                        }
                    }
                    // keep an original name when the vector is proportional
                    // to an original basis vector
                    let mut name = None;
                    for (v, nm) in &old {
                        if nm.is_some() && is_proportional(&full, v) {
                            name = nm.clone();
                            break;
                        }
                    }
                    let name = name.unwrap_or_else(|| {
                        let s = if cols.len() == 2 {
                            "tau".to_string()
                        } else {
                            format!("tau{counter}")
                        };
                        counter += 1;
                        s
                    });
                    new_vectors.push((full, Some(name)));
                }
            }
            if new_vectors.len() != old.len() {
                return Err(Error::FormNormalization(
                    "degree-zero block completion failed (is (h|h) = 0?)".into(),
                ));
            }
            block.vectors = new_vectors;
        }
    }

    // assemble transition matrix: order blocks by (eigenvalue, parity)
    blocks.sort_by(|a, b| {
        a.eigenvalue
            .cmp(&b.eigenvalue)
            .then_with(|| a.parity.cmp(&b.parity))
    });
    let mut cols = Vec::with_capacity(n);
    let mut names = Vec::with_capacity(n);
    let mut parity = Vec::with_capacity(n);
    let mut grading = Vec::with_capacity(n);
    let mut fresh = 1usize;
    for block in &blocks {
        for (v, name) in &block.vectors {
            cols.push(v.clone());
            names.push(name.clone().unwrap_or_else(|| {
                let s = format!("v{fresh}");
                fresh += 1;
                s
            }));
            parity.push(block.parity);
            grading.push(block.eigenvalue.clone());
        }
    }
    let t = QMat::from_cols(cols.clone());
    let t_inv = t
        .inverse()
        .ok_or_else(|| Error::NonDiagonalizable("eigenbasis is singular".into()))?;

    // transform structure constants and form
    let mut bracket = vec![vec![vec![Rat::zero(); n]; n]; n];
    for i in 0..n {
        for j in 0..n {
            let br = alg.bracket_vec(&cols[i], &cols[j]);
            bracket[i][j] = t_inv.apply(&br);
        }
    }
    let mut form = QMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            form[(i, j)] = alg.form_vec(&cols[i], &cols[j]);
        }
    }
    let to_new = |v: &[Rat]| t_inv.apply(v);
    let (e, h, f) = (to_new(e), to_new(h), to_new(f));

    let mut new_alg = LieSuperAlgebra::new(names, parity, bracket, form)?;

    // rescale so (e|f) = 1
    if !zero_triple {
        let ef = new_alg.form_vec(&e, &f);
        if ef.is_zero() {
            return Err(Error::FormNormalization("(e|f) = 0".into()));
        }
        new_alg.rescale_form(&ef.recip());
        debug_assert_eq!(new_alg.form_vec(&h, &h), rat_int(2));
    }

    let d = grading
        .iter()
        .cloned()
        .max()
        .unwrap_or_else(Rat::zero);
    let sl2 = Sl2Data {
        e,
        h,
        f,
        grading,
        d,
        is_zero_triple: zero_triple,
    };

    // Setup conditions: ad f injective on degrees >= 1/2 and surjective
    // from degrees <= 1/2 onto degrees <= -1/2.
    let adf = new_alg.ad(&sl2.f);
    let half = rat(1, 2);
    let high: Vec<usize> = (0..n).filter(|&i| sl2.grading[i] >= half).collect();
    if !high.is_empty() {
        let m = QMat::from_cols(high.iter().map(|&i| adf.col(i)).collect());
        if m.rank() != high.len() {
            return Err(Error::NotSl2Triple(
                "ad f not injective on degrees >= 1/2 (not a good grading)".into(),
            ));
        }
    }
    let low_src: Vec<usize> = (0..n).filter(|&i| sl2.grading[i] <= half).collect();
    let low_tgt: Vec<usize> = (0..n)
        .filter(|&i| sl2.grading[i] <= -half.clone())
        .collect();
    if !low_tgt.is_empty() {
        let mut m = QMat::zeros(low_tgt.len(), low_src.len());
        for (c, &j) in low_src.iter().enumerate() {
            let col = adf.col(j);
            for (r, &i) in low_tgt.iter().enumerate() {
                m[(r, c)] = col[i].clone();
            }
        }
        if m.rank() != low_tgt.len() {
            return Err(Error::NotSl2Triple(
                "ad f not surjective onto degrees <= -1/2 (not a good grading)".into(),
            ));
        }
    }

    Ok((new_alg, sl2))
}

fn is_proportional(a: &[Rat], b: &[Rat]) -> bool {
    // nonzero proportionality
    let mut ratio: Option<Rat> = None;
    for (x, y) in a.iter().zip(b.iter()) {
        match (x.is_zero(), y.is_zero()) {
            (true, true) => {}
            (false, false) => {
                let r = x / y;
                match &ratio {
                    None => ratio = Some(r),
                    Some(prev) if *prev == r => {}
                    _ => return false,
                }
            }
            _ => return false,
        }
    }
    ratio.is_some()
}

/// The graded subspaces of the reduction setup. After `attach_sl2` the basis
/// is grading-homogeneous, so subspaces are plain index sets; the dual basis
/// of `p` is stored as coordinate vectors over the `p` indices.
#[derive(Clone, Debug)]
pub struct GradedSubspaces {
    /// indices of n = (+) degrees > 0
    pub n: Vec<usize>,
    /// indices of m = (+) degrees >= 1
    pub m: Vec<usize>,
    /// indices of p = (+) degrees < 1
    pub p: Vec<usize>,
    /// indices of m-perp = (+) degrees > -1
    pub mperp: Vec<usize>,
    /// kernel of ad f, as coordinate vectors
    pub gf: Vec<Vec<Rat>>,
    /// kernel of ad e, as coordinate vectors
    pub ge: Vec<Vec<Rat>>,
    /// `dual_p[a]` = coordinates over `p` of the vector `q^a` dual to the
    /// m-perp basis vector `mperp[a]`: `(q_{mperp[a]} | q^b) = delta_ab`.
    pub dual_p: Vec<Vec<Rat>>,
}

pub fn subspaces(alg: &LieSuperAlgebra, sl2: &Sl2Data) -> Result<GradedSubspaces, Error> {
    let n_dim = alg.dim();
    let zero = Rat::zero();
    let one = Rat::one();
    let idx = |pred: &dyn Fn(&Rat) -> bool| -> Vec<usize> {
        (0..n_dim).filter(|&i| pred(&sl2.grading[i])).collect()
    };
    let n = idx(&|g| *g > zero);
    let m = idx(&|g| *g >= one);
    let p = idx(&|g| *g < one);
    let mperp = idx(&|g| *g > -Rat::one());
    if mperp.len() != p.len() {
        return Err(Error::SubspaceInconsistency(format!(
            "dim m-perp {} != dim p {}",
            mperp.len(),
            p.len()
        )));
    }
    let gf = alg.ad(&sl2.f).kernel();
    let ge = alg.ad(&sl2.e).kernel();

    // pairing matrix of m-perp basis against p basis
    let k = p.len();
    let mut gram = QMat::zeros(k, k);
    for (a, &i) in mperp.iter().enumerate() {
        for (b, &j) in p.iter().enumerate() {
            gram[(a, b)] = alg.form_basis(i, j).clone();
        }
    }
    let inv = gram
        .inverse()
        .ok_or_else(|| Error::SingularPairing("m-perp / p pairing".into()))?;
    // (q_{mperp[a]} | q^b) = delta requires q^b = sum_c inv[(c, b)]... rows of
    // inv give coordinates: q^a = sum_b inv[(b, a)] p_b.
    let dual_p: Vec<Vec<Rat>> = (0..k).map(|a| inv.col(a)).collect();

    // verify the pairing identity
    for (a, &i) in mperp.iter().enumerate() {
        for b in 0..k {
            let mut vec_full = vec![Rat::zero(); n_dim];
            for (c, &j) in p.iter().enumerate() {
                vec_full[j] = dual_p[b][c].clone();
            }
            let val = alg.form_vec(&alg.basis_vector(i), &vec_full);
            let expect = if a == b { Rat::one() } else { Rat::zero() };
            if val != expect {
                return Err(Error::SingularPairing(
                    "dual basis verification failed".into(),
                ));
            }
        }
    }

    Ok(GradedSubspaces {
        n,
        m,
        p,
        mperp,
        gf,
        ge,
        dual_p,
    })
}

/// Picks an even element of top degree `d` with `[s, n] = 0`; `explicit`
/// overrides the default (first even basis vector of degree `d`).
pub fn pick_s(
    alg: &LieSuperAlgebra,
    sl2: &Sl2Data,
    sub: &GradedSubspaces,
    explicit: Option<Vec<Rat>>,
) -> Result<Vec<Rat>, Error> {
    let s = match explicit {
        Some(v) => v,
        None => {
            let i = (0..alg.dim())
                .find(|&i| sl2.grading[i] == sl2.d && alg.parity[i] == Parity::Even)
                .ok_or_else(|| {
                    Error::NoEvenTopElement(format!("no even element in degree {}", sl2.d))
                })?;
            alg.basis_vector(i)
        }
    };
    if alg.parity_of_vec(&s) != Some(Parity::Even) {
        return Err(Error::NoEvenTopElement("s is not even".into()));
    }
    for &a in &sub.n {
        let br = alg.bracket_vec(&s, &alg.basis_vector(a));
        if br.iter().any(|c| !c.is_zero()) {
            return Err(Error::NoEvenTopElement(format!(
                "[s, {}] != 0",
                alg.names[a]
            )));
        }
    }
    Ok(s)
}

/// Loop degree of `b_i z^m`: `grading(i) - m (d + 1)`.
pub fn loop_degree(sl2: &Sl2Data, i: usize, m: i64) -> Rat {
    &sl2.grading[i] - rat_int(m) * (&sl2.d + Rat::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;

    #[test]
    fn sl2_subspaces_and_grading() {
        let alg = families::build_algebra(families::Family::Sl, 2, 0).unwrap();
        let (e, h, f) = families::nilpotent_from_partitions(2, 0, &[2], &[]).unwrap();
        let (alg, sl2) = attach_sl2(&alg, &e, &h, &f).unwrap();
        assert_eq!(sl2.d, rat_int(1));
        let grading: Vec<Rat> = sl2.grading.clone();
        let by_name = |n: &str| alg.names.iter().position(|x| x == n).unwrap();
        assert_eq!(grading[by_name("e")], rat_int(1));
        assert_eq!(grading[by_name("x")], rat_int(0));
        assert_eq!(grading[by_name("f")], rat_int(-1));

        let sub = subspaces(&alg, &sl2).unwrap();
        assert_eq!(sub.n, vec![by_name("e")]);
        assert_eq!(sub.m, vec![by_name("e")]);
        assert_eq!(sub.p.len(), 2);
        assert_eq!(sub.mperp.len(), 2);

        let s = pick_s(&alg, &sl2, &sub, None).unwrap();
        assert_eq!(s, alg.basis_vector(by_name("e")));
    }

    #[test]
    fn spo21_matches_paper_brackets() {
        let alg = families::build_algebra(families::Family::Spo, 2, 1).unwrap();
        assert_eq!(alg.dim(), 5);
        let ix = |n: &str| alg.names.iter().position(|x| x == n).unwrap();
        let (e, h, f, eod, fod) = (ix("e"), ix("h"), ix("f"), ix("eod"), ix("fod"));
        let bco = |i: usize, j: usize, l: usize| alg.bracket_basis(i, j)[l].clone();
        // [e_od, e_od] = 2e, [f_od, f_od] = -2f, [e_od, f_od] = -h
        assert_eq!(bco(eod, eod, e), rat_int(2));
        assert_eq!(bco(fod, fod, f), rat_int(-2));
        assert_eq!(bco(eod, fod, h), rat_int(-1));
        // [h, e_od] = e_od, [e_od, f] = -f_od, [f_od, e] = -e_od
        assert_eq!(bco(h, eod, eod), rat_int(1));
        assert_eq!(bco(eod, f, fod), rat_int(-1));
        assert_eq!(bco(fod, e, eod), rat_int(-1));
        // (h|h) = 2(e|f) = 2, (e_od|f_od) = -2
        assert_eq!(*alg.form_basis(h, h), rat_int(2));
        assert_eq!(*alg.form_basis(e, f), rat_int(1));
        assert_eq!(*alg.form_basis(eod, fod), rat_int(-2));
    }

    #[test]
    fn spo21_grading_and_subspaces() {
        let (alg, sl2, sub) = families::spo21_reduction_setup().unwrap();
        let by_name = |n: &str| alg.names.iter().position(|x| x == n).unwrap();
        assert_eq!(sl2.grading[by_name("e")], rat_int(1));
        assert_eq!(sl2.grading[by_name("eod")], rat(1, 2));
        assert_eq!(sl2.grading[by_name("h")], rat_int(0));
        assert_eq!(sl2.grading[by_name("fod")], rat(-1, 2));
        assert_eq!(sl2.grading[by_name("f")], rat_int(-1));
        assert_eq!(sub.m, vec![by_name("e")]);
        assert_eq!(sub.n.len(), 2);
        assert!(sub.n.contains(&by_name("eod")));
        assert_eq!(sub.p.len(), 4);
    }

    #[test]
    fn sl21_has_tau_and_half_integer_grading() {
        let alg = families::build_algebra(families::Family::Sl, 2, 1).unwrap();
        assert_eq!(alg.dim(), 8);
        let (e, h, f) = families::nilpotent_from_partitions(2, 1, &[2], &[1]).unwrap();
        let (alg, sl2) = attach_sl2(&alg, &e, &h, &f).unwrap();
        assert_eq!(sl2.d, rat_int(1));
        let tau = alg.names.iter().position(|x| x == "tau");
        assert!(tau.is_some(), "names: {:?}", alg.names);
        let tau = tau.unwrap();
        // tau is even, degree 0, and satisfies (h|tau) = 0
        assert_eq!(alg.parity[tau], Parity::Even);
        assert_eq!(sl2.grading[tau], rat_int(0));
        assert_eq!(alg.form_vec(&sl2.h, &alg.basis_vector(tau)), rat_int(0));
        // two odd basis directions in degree 1/2
        let odd_half: Vec<usize> = (0..alg.dim())
            .filter(|&i| sl2.grading[i] == rat(1, 2) && alg.parity[i] == Parity::Odd)
            .collect();
        assert_eq!(odd_half.len(), 2);

        let sub = subspaces(&alg, &sl2).unwrap();
        assert_eq!(sub.p.len(), 7);
        assert_eq!(sub.mperp.len(), 7);
        let s = pick_s(&alg, &sl2, &sub, None).unwrap();
        // s = e (the unique even top-degree element up to scale)
        assert_eq!(s, sl2.e);
    }

    #[test]
    fn sl_nn_rejected() {
        let err = families::build_algebra(families::Family::Sl, 2, 2).unwrap_err();
        assert!(matches!(err, Error::DegenerateForm(_)));
    }

    #[test]
    fn zero_nilpotent_accepted() {
        let alg = families::build_algebra(families::Family::Sl, 2, 1).unwrap();
        let (e, h, f) = families::nilpotent_from_partitions(2, 1, &[1, 1], &[1]).unwrap();
        assert!(e.iter().all(|c| c.is_zero()));
        let (alg2, sl2) = attach_sl2(&alg, &e, &h, &f).unwrap();
        assert!(sl2.is_zero_triple);
        assert!(sl2.grading.iter().all(|g| g.is_zero()));
        assert_eq!(alg2.dim(), 8);
    }

    #[test]
    fn loop_degree_examples() {
        let alg = families::build_algebra(families::Family::Sl, 2, 0).unwrap();
        let (e, h, f) = families::nilpotent_from_partitions(2, 0, &[2], &[]).unwrap();
        let (alg, sl2) = attach_sl2(&alg, &e, &h, &f).unwrap();
        let by_name = |n: &str| alg.names.iter().position(|x| x == n).unwrap();
        assert_eq!(loop_degree(&sl2, by_name("f"), 0), rat_int(-1));
        assert_eq!(loop_degree(&sl2, by_name("e"), 1), rat_int(-1));

        let (alg, sl2, _) = families::spo21_reduction_setup().unwrap();
        let fod = alg.names.iter().position(|x| x == "fod").unwrap();
        assert_eq!(loop_degree(&sl2, fod, -1), rat(3, 2));
    }

    #[test]
    fn dual_pairing_identity_and_complement() {
        for setup in [
            families::spo21_reduction_setup().unwrap(),
            families::sl21_reduction_setup().unwrap(),
        ] {
            let (alg, sl2, sub) = setup;
            // m-perp = [f, n] (+) (g^e cap m-perp): per-degree dimension count
            let adf = alg.ad(&sl2.f);
            let fn_cols: Vec<Vec<Rat>> = sub.n.iter().map(|&i| adf.col(i)).collect();
            let ge_in_mperp: Vec<Vec<Rat>> = sub
                .ge
                .iter()
                .filter(|v| {
                    (0..alg.dim()).all(|i| v[i].is_zero() || sub.mperp.contains(&i))
                })
                .cloned()
                .collect();
            let mut all = fn_cols.clone();
            all.extend(ge_in_mperp.iter().cloned());
            assert_eq!(all.len(), sub.mperp.len());
            assert_eq!(QMat::from_cols(all).rank(), sub.mperp.len());
        }
    }

    #[test]
    fn grading_additivity() {
        let (alg, sl2, _) = families::sl21_reduction_setup().unwrap();
        for i in 0..alg.dim() {
            for j in 0..alg.dim() {
                let br = alg.bracket_basis(i, j);
                let target = &sl2.grading[i] + &sl2.grading[j];
                for (l, c) in br.iter().enumerate() {
                    if !c.is_zero() {
                        assert_eq!(sl2.grading[l], target);
                    }
                }
            }
        }
    }
}
