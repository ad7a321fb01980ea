//! Matrix realizations of the gl, sl and spo families, the supertrace form,
//! and sl2-triples built from partition pairs.

use num_traits::{One, Zero};

use crate::diffsuper::Parity;
use crate::liesuper::{attach_sl2, subspaces, GradedSubspaces, LieSuperAlgebra, Sl2Data};
use crate::linalg::QMat;
use crate::scalars::{rat_int, Rat};
use crate::Error;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Family {
    Gl,
    Sl,
    Spo,
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "gl" => Ok(Family::Gl),
            "sl" => Ok(Family::Sl),
            "spo" => Ok(Family::Spo),
            other => Err(Error::UnsupportedFamily(other.to_string())),
        }
    }
}

type Mat = Vec<Vec<Rat>>;

fn mat_zero(n: usize) -> Mat {
    vec![vec![Rat::zero(); n]; n]
}

fn mat_unit(n: usize, i: usize, j: usize) -> Mat {
    let mut m = mat_zero(n);
    m[i][j] = Rat::one();
    m
}

fn mat_add_scaled(a: &mut Mat, b: &Mat, c: &Rat) {
    for (ra, rb) in a.iter_mut().zip(b.iter()) {
        for (x, y) in ra.iter_mut().zip(rb.iter()) {
            *x += y * c;
        }
    }
}

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let mut out = mat_zero(n);
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                if !b[k][j].is_zero() {
                    out[i][j] += &a[i][k] * &b[k][j];
                }
            }
        }
    }
    out
}

/// Matrix realization of a basis: matrices, index parities and the supertrace.
struct MatrixBasis {
    size: usize,
    even_size: usize,
    names: Vec<String>,
    parity: Vec<Parity>,
    mats: Vec<Mat>,
}

impl MatrixBasis {
    fn index_parity(&self, i: usize) -> Parity {
        if i < self.even_size {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    fn matrix_parity(&self, m: &Mat) -> Option<Parity> {
        let mut p = None;
        for i in 0..self.size {
            for j in 0..self.size {
                if m[i][j].is_zero() {
                    continue;
                }
                let q = self.index_parity(i).xor(self.index_parity(j));
                match p {
                    None => p = Some(q),
                    Some(prev) if prev == q => {}
                    _ => return None,
                }
            }
        }
        Some(p.unwrap_or(Parity::Even))
    }

    fn supertrace(&self, m: &Mat) -> Rat {
        let mut acc = Rat::zero();
        for i in 0..self.size {
            if self.index_parity(i).is_odd() {
                acc -= &m[i][i];
            } else {
                acc += &m[i][i];
            }
        }
        acc
    }

    fn super_bracket(&self, x: &Mat, px: Parity, y: &Mat, py: Parity) -> Mat {
        let mut out = mat_mul(x, y);
        let sign = if px.is_odd() && py.is_odd() {
            Rat::one()
        } else {
            -Rat::one()
        };
        mat_add_scaled(&mut out, &mat_mul(y, x), &sign);
        out
    }

    fn vectorize(&self, m: &Mat) -> Vec<Rat> {
        m.iter().flatten().cloned().collect()
    }

    /// Builds the abstract algebra: structure constants by expanding brackets
    /// over the basis, form by supertrace.
    fn into_algebra(self) -> Result<(LieSuperAlgebra, MatrixSolver), Error> {
        let dim = self.mats.len();
        let e = QMat::from_cols(self.mats.iter().map(|m| self.vectorize(m)).collect());
        let left_inv = left_inverse(&e)?;
        let coords = |vec: &[Rat]| -> Option<Vec<Rat>> {
            let c = left_inv.apply(vec);
            if e.apply(&c) == vec {
                Some(c)
            } else {
                None
            }
        };
        let mut bracket = vec![vec![vec![Rat::zero(); dim]; dim]; dim];
        for i in 0..dim {
            for j in 0..dim {
                let br = self.super_bracket(
                    &self.mats[i],
                    self.parity[i],
                    &self.mats[j],
                    self.parity[j],
                );
                bracket[i][j] = coords(&self.vectorize(&br)).ok_or_else(|| {
                    Error::UnsupportedFamily(format!(
                        "bracket [{}, {}] escapes the span of the basis",
                        self.names[i], self.names[j]
                    ))
                })?;
            }
        }
        let mut form = QMat::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                form[(i, j)] = self.supertrace(&mat_mul(&self.mats[i], &self.mats[j]));
            }
        }
        let alg = LieSuperAlgebra::new(self.names.clone(), self.parity.clone(), bracket, form)?;
        Ok((
            alg,
            MatrixSolver {
                basis: self,
                e,
                left_inv,
            },
        ))
    }
}

fn left_inverse(e: &QMat) -> Result<QMat, Error> {
    let (rows, cols) = (e.rows, e.cols);
    let mut aug = QMat::zeros(rows, cols + rows);
    for i in 0..rows {
        for j in 0..cols {
            aug[(i, j)] = e[(i, j)].clone();
        }
        aug[(i, cols + i)] = Rat::one();
    }
    let pivots = aug.rref();
    if pivots.len() < cols || pivots[..cols].iter().enumerate().any(|(r, &c)| c != r) {
        return Err(Error::UnsupportedFamily(
            "basis matrices are linearly dependent".into(),
        ));
    }
    let mut left_inv = QMat::zeros(cols, rows);
    for i in 0..cols {
        for j in 0..rows {
            left_inv[(i, j)] = aug[(i, cols + j)].clone();
        }
    }
    Ok(left_inv)
}

/// Solves "matrix -> basis coordinates" via a precomputed left inverse.
pub struct MatrixSolver {
    basis: MatrixBasis,
    e: QMat,
    left_inv: QMat,
}

impl MatrixSolver {
    fn coords(&self, vec: &[Rat]) -> Option<Vec<Rat>> {
        let c = self.left_inv.apply(vec);
        let back = self.e.apply(&c);
        if back == vec {
            Some(c)
        } else {
            None
        }
    }

    /// Coordinates of an explicit matrix in the family basis.
    pub fn matrix_coords(&self, m: &Mat) -> Result<Vec<Rat>, Error> {
        self.coords(&self.basis.vectorize(m)).ok_or_else(|| {
            Error::Config("matrix is not an element of the algebra".into())
        })
    }

    pub fn matrix_size(&self) -> usize {
        self.basis.size
    }

    pub fn even_size(&self) -> usize {
        self.basis.even_size
    }
}

fn index_label(even: usize, i: usize) -> String {
    if i < even {
        format!("{}", i + 1)
    } else {
        format!("{}'", i + 1 - even)
    }
}

fn gl_basis(m: usize, n: usize) -> MatrixBasis {
    let size = m + n;
    let mut names = Vec::new();
    let mut parity = Vec::new();
    let mut mats = Vec::new();
    for i in 0..size {
        for j in 0..size {
            names.push(format!("E({},{})", index_label(m, i), index_label(m, j)));
            parity.push(if (i < m) == (j < m) {
                Parity::Even
            } else {
                Parity::Odd
            });
            mats.push(mat_unit(size, i, j));
        }
    }
    MatrixBasis {
        size,
        even_size: m,
        names,
        parity,
        mats,
    }
}

fn sl_basis(m: usize, n: usize) -> MatrixBasis {
    let size = m + n;
    if (m, n) == (2, 0) {
        // basis (e, x, f) with x = h/2, matching the classical presentation
        let mut x = mat_zero(2);
        x[0][0] = Rat::new(1.into(), 2.into());
        x[1][1] = Rat::new((-1).into(), 2.into());
        return MatrixBasis {
            size,
            even_size: m,
            names: vec!["e".into(), "x".into(), "f".into()],
            parity: vec![Parity::Even; 3],
            mats: vec![mat_unit(2, 0, 1), x, mat_unit(2, 1, 0)],
        };
    }
    let mut names = Vec::new();
    let mut parity = Vec::new();
    let mut mats = Vec::new();
    for i in 0..size {
        for j in 0..size {
            if i == j {
                continue;
            }
            names.push(format!("E({},{})", index_label(m, i), index_label(m, j)));
            parity.push(if (i < m) == (j < m) {
                Parity::Even
            } else {
                Parity::Odd
            });
            mats.push(mat_unit(size, i, j));
        }
    }
    // supertraceless diagonal chain
    for i in 0..size - 1 {
        let mut mat = mat_unit(size, i, i);
        let sign = if i + 1 == m { Rat::one() } else { -Rat::one() };
        mat[i + 1][i + 1] = sign;
        names.push(format!("H{}", i + 1));
        parity.push(Parity::Even);
        mats.push(mat);
    }
    MatrixBasis {
        size,
        even_size: m,
        names,
        parity,
        mats,
    }
}

fn spo_basis(m: usize, n: usize) -> Result<MatrixBasis, Error> {
    if m % 2 != 0 || m == 0 {
        return Err(Error::UnsupportedFamily(format!(
            "spo({m}|{n}) requires a positive even symplectic dimension"
        )));
    }
    let r = m / 2;
    let size = m + n;
    // symplectic Gram on the even part
    let mut jmat = mat_zero(m);
    for a in 0..r {
        jmat[a][a + r] = Rat::one();
        jmat[a + r][a] = -Rat::one();
    }
    let mut names = Vec::new();
    let mut parity = Vec::new();
    let mut mats = Vec::new();
    let minimal = (m, n) == (2, 1);
    // A-part: [[X, 0], [0, -X^T]]
    // laid out so that spo(2|1) comes out as (e, h, f, eod, fod)
    let push = |name: String, p: Parity, mat: Mat, mats: &mut Vec<Mat>, names: &mut Vec<String>, parities: &mut Vec<Parity>| {
        names.push(name);
        parities.push(p);
        mats.push(mat);
    };
    // Y-part (strictly upper in the sp sense first, to get e first for r = 1)
    for a in 0..r {
        for b in a..r {
            let mut mat = mat_zero(size);
            mat[a][b + r] = Rat::one();
            if a != b {
                mat[b][a + r] = Rat::one();
            }
            let name = if minimal { "e".into() } else { format!("Y({},{})", a + 1, b + 1) };
            push(name, Parity::Even, mat, &mut mats, &mut names, &mut parity);
        }
    }
    for a in 0..r {
        for b in 0..r {
            let mut mat = mat_zero(size);
            mat[a][b] = Rat::one();
            mat[b + r][a + r] = -Rat::one();
            let name = if minimal { "h".into() } else { format!("A({},{})", a + 1, b + 1) };
            push(name, Parity::Even, mat, &mut mats, &mut names, &mut parity);
        }
    }
    for a in 0..r {
        for b in a..r {
            let mut mat = mat_zero(size);
            mat[a + r][b] = Rat::one();
            if a != b {
                mat[b + r][a] = Rat::one();
            }
            let name = if minimal { "f".into() } else { format!("Z({},{})", a + 1, b + 1) };
            push(name, Parity::Even, mat, &mut mats, &mut names, &mut parity);
        }
    }
    for a in 0..n {
        for b in (a + 1)..n {
            let mut mat = mat_zero(size);
            mat[m + a][m + b] = Rat::one();
            mat[m + b][m + a] = -Rat::one();
            push(
                format!("O({},{})", a + 1, b + 1),
                Parity::Even,
                mat,
                &mut mats,
                &mut names,
                &mut parity,
            );
        }
    }
    // odd part: B free, C = B^T J
    for i in 0..m {
        for k in 0..n {
            let mut mat = mat_zero(size);
            mat[i][m + k] = Rat::one();
            for l in 0..m {
                if !jmat[i][l].is_zero() {
                    mat[m + k][l] = jmat[i][l].clone();
                }
            }
            let name = if minimal {
                if i == 0 { "eod".into() } else { "fod".into() }
            } else {
                format!("B({},{})", i + 1, k + 1)
            };
            push(name, Parity::Odd, mat, &mut mats, &mut names, &mut parity);
        }
    }
    Ok(MatrixBasis {
        size,
        even_size: m,
        names,
        parity,
        mats,
    })
}

/// Builds the family algebra with the supertrace form from the defining
/// matrix realization.
pub fn build_algebra(family: Family, m: usize, n: usize) -> Result<LieSuperAlgebra, Error> {
    Ok(build_algebra_with_solver(family, m, n)?.0)
}

pub fn build_algebra_with_solver(
    family: Family,
    m: usize,
    n: usize,
) -> Result<(LieSuperAlgebra, MatrixSolver), Error> {
    if m == 0 && n == 0 {
        return Err(Error::UnsupportedFamily("empty algebra".into()));
    }
    let basis = match family {
        Family::Gl => gl_basis(m, n),
        Family::Sl => {
            if m == n {
                return Err(Error::DegenerateForm(format!(
                    "sl({m}|{n}) has a degenerate supertrace form; use gl or m != n"
                )));
            }
            sl_basis(m, n)
        }
        Family::Spo => spo_basis(m, n)?,
    };
    basis.into_algebra()
}

fn check_partition(lambda: &[usize], total: usize) -> Result<(), Error> {
    if lambda.iter().any(|&p| p == 0) {
        return Err(Error::BadPartition("zero part".into()));
    }
    if lambda.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::BadPartition("parts must be non-increasing".into()));
    }
    if lambda.iter().sum::<usize>() != total {
        return Err(Error::BadPartition(format!(
            "parts sum to {} but the block has dimension {total}",
            lambda.iter().sum::<usize>()
        )));
    }
    Ok(())
}

/// Block-Jordan sl2-triple for `sl(m|n)` from partitions of `m` and `n`,
/// returned as coordinate vectors in the family basis.
pub fn nilpotent_from_partitions(
    m: usize,
    n: usize,
    lambda: &[usize],
    mu: &[usize],
) -> Result<(Vec<Rat>, Vec<Rat>, Vec<Rat>), Error> {
    check_partition(lambda, m)?;
    check_partition(mu, n)?;
    let (_, solver) = build_algebra_with_solver(Family::Sl, m, n)?;
    let size = m + n;
    let mut e = mat_zero(size);
    let mut h = mat_zero(size);
    let mut f = mat_zero(size);
    let fill_block = |offset: usize, r: usize, e: &mut Mat, h: &mut Mat, f: &mut Mat| {
        for i in 1..=r {
            h[offset + i - 1][offset + i - 1] = rat_int((r as i64) + 1 - 2 * (i as i64));
        }
        for i in 1..r {
            f[offset + i][offset + i - 1] = Rat::one();
            e[offset + i - 1][offset + i] = rat_int((i as i64) * ((r as i64) - (i as i64)));
        }
    };
    let mut off = 0;
    for &part in lambda {
        fill_block(off, part, &mut e, &mut h, &mut f);
        off += part;
    }
    let mut off = m;
    for &part in mu {
        fill_block(off, part, &mut e, &mut h, &mut f);
        off += part;
    }
    Ok((
        solver.matrix_coords(&e)?,
        solver.matrix_coords(&h)?,
        solver.matrix_coords(&f)?,
    ))
}

/// Principal sl2-triple of the sp(2)-block of `spo(2|n)`. Partition-based
/// triples for larger symplectic blocks need explicit matrices.
pub fn spo_principal_triple(
    alg: &LieSuperAlgebra,
    lambda: &[usize],
    mu: &[usize],
) -> Result<(Vec<Rat>, Vec<Rat>, Vec<Rat>), Error> {
    if lambda != [2] || mu.iter().any(|&p| p != 1) {
        return Err(Error::BadPartition(
            "spo partitions support only lambda = (2), mu = (1,...,1); \
             give the triple as explicit matrices instead"
                .into(),
        ));
    }
    let ix = |n: &str| {
        alg.names
            .iter()
            .position(|x| x == n)
            .ok_or_else(|| Error::BadPartition(format!("missing basis element {n}")))
    };
    Ok((
        alg.basis_vector(ix("e")?),
        alg.basis_vector(ix("h")?),
        alg.basis_vector(ix("f")?),
    ))
}

pub fn sl2_reduction_setup() -> Result<(LieSuperAlgebra, Sl2Data, GradedSubspaces), Error> {
    let alg = build_algebra(Family::Sl, 2, 0)?;
    let (e, h, f) = nilpotent_from_partitions(2, 0, &[2], &[])?;
    let (alg, sl2) = attach_sl2(&alg, &e, &h, &f)?;
    let sub = subspaces(&alg, &sl2)?;
    Ok((alg, sl2, sub))
}

pub fn spo21_reduction_setup() -> Result<(LieSuperAlgebra, Sl2Data, GradedSubspaces), Error> {
    let alg = build_algebra(Family::Spo, 2, 1)?;
    let (e, h, f) = spo_principal_triple(&alg, &[2], &[1])?;
    let (alg, sl2) = attach_sl2(&alg, &e, &h, &f)?;
    let sub = subspaces(&alg, &sl2)?;
    Ok((alg, sl2, sub))
}

pub fn sl21_reduction_setup() -> Result<(LieSuperAlgebra, Sl2Data, GradedSubspaces), Error> {
    let alg = build_algebra(Family::Sl, 2, 1)?;
    let (e, h, f) = nilpotent_from_partitions(2, 1, &[2], &[1])?;
    let (alg, sl2) = attach_sl2(&alg, &e, &h, &f)?;
    let sub = subspaces(&alg, &sl2)?;
    Ok((alg, sl2, sub))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sl2_triple_from_partition() {
        let alg = build_algebra(Family::Sl, 2, 0).unwrap();
        let (e, h, f) = nilpotent_from_partitions(2, 0, &[2], &[]).unwrap();
        // f = e21 is the third basis vector (e, x, f); h = 2x
        assert_eq!(f, alg.basis_vector(2));
        assert_eq!(e, alg.basis_vector(0));
        assert_eq!(h, vec![rat_int(0), rat_int(2), rat_int(0)]);
    }

    #[test]
    fn sl21_f_is_e21() {
        let alg = build_algebra(Family::Sl, 2, 1).unwrap();
        let (_, _, f) = nilpotent_from_partitions(2, 1, &[2], &[1]).unwrap();
        let ix = alg.names.iter().position(|n| n == "E(2,1)").unwrap();
        assert_eq!(f, alg.basis_vector(ix));
    }

    #[test]
    fn gl_builds_and_is_nondegenerate() {
        let alg = build_algebra(Family::Gl, 1, 1).unwrap();
        assert_eq!(alg.dim(), 4);
    }

    #[test]
    fn bad_partitions_rejected() {
        assert!(nilpotent_from_partitions(3, 1, &[1, 2], &[1]).is_err());
        assert!(nilpotent_from_partitions(2, 1, &[3], &[1]).is_err());
        assert!(nilpotent_from_partitions(2, 1, &[2, 0], &[1]).is_err());
    }
}
