//! Dense complex linear algebra and polynomial helpers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{CsosError, Result};

pub type Mat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Terms whose max entry is below this are treated as zero operators.
pub const ZERO_OPERATOR: f64 = 1e-13;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn eye(d: usize) -> Mat {
    Mat::identity(d, d)
}

pub fn max_abs(m: &Mat) -> f64 {
    m.iter().fold(0.0, |a, z| a.max(z.norm()))
}

pub fn vmax_abs(v: &CVec) -> f64 {
    v.iter().fold(0.0, |a, z| a.max(z.norm()))
}

/// Kronecker product of a list; the first factor is the most significant index.
pub fn kron_list(ms: &[Mat]) -> Mat {
    let mut out = Mat::from_element(1, 1, C64::new(1.0, 0.0));
    for m in ms {
        out = out.kronecker(m);
    }
    out
}

pub fn mat_pow(m: &Mat, n: usize) -> Mat {
    let mut out = eye(m.nrows());
    for _ in 0..n {
        out = &out * m;
    }
    out
}

pub fn comm(a: &Mat, b: &Mat) -> Mat {
    a * b - b * a
}

/// Outcome of checking `sum(terms) == 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Residual {
    /// max|Σ terms| / max_k max|term_k|
    pub scaled: f64,
    /// max_k max|term_k|
    pub scale: f64,
    /// every term is (numerically) the zero operator
    pub vacuous: bool,
}

impl Residual {
    pub fn passes(&self, tol: f64) -> bool {
        self.scaled < tol
    }

    pub fn worst(a: Residual, b: Residual) -> Residual {
        Residual {
            scaled: a.scaled.max(b.scaled),
            scale: a.scale.max(b.scale),
            vacuous: a.vacuous && b.vacuous,
        }
    }

    pub fn zero() -> Residual {
        Residual { scaled: 0.0, scale: 0.0, vacuous: true }
    }
}

pub fn residual_of(terms: &[Mat]) -> Residual {
    assert!(!terms.is_empty());
    let scale = terms.iter().map(max_abs).fold(0.0, f64::max);
    let mut sum = terms[0].clone();
    for t in &terms[1..] {
        sum += t;
    }
    let abs = max_abs(&sum);
    if scale < ZERO_OPERATOR {
        return Residual { scaled: 0.0, scale, vacuous: true };
    }
    Residual { scaled: abs / scale, scale, vacuous: false }
}

/// As [`residual_of`], but terms all below `floor` count as the zero operator.
pub fn residual_floor(terms: &[Mat], floor: f64) -> Residual {
    let r = residual_of(terms);
    if r.scale < floor {
        return Residual { scaled: 0.0, scale: r.scale, vacuous: true };
    }
    r
}

pub fn scalar_residual(terms: &[C64]) -> Residual {
    let scale = terms.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let sum: C64 = terms.iter().sum();
    if scale < ZERO_OPERATOR {
        return Residual { scaled: 0.0, scale, vacuous: true };
    }
    Residual { scaled: sum.norm() / scale, scale, vacuous: false }
}

/// Eigenvalues of a general complex matrix via the complex Schur form.
pub fn eigenvalues(m: &Mat) -> Result<Vec<C64>> {
    if m.nrows() == 0 {
        return Ok(vec![]);
    }
    let schur = nalgebra::linalg::Schur::try_new(m.clone(), 1e-15, 10_000)
        .ok_or_else(|| CsosError::NoConvergence("Schur decomposition".into()))?;
    let (_, t) = schur.unpack();
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

/// Orthonormal basis of the numerical null space (relative tolerance on singular values).
pub fn null_space(m: &Mat, rel_tol: f64) -> Mat {
    let n = m.ncols();
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t.expect("v_t requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cut = rel_tol * smax.max(1e-300);
    // nalgebra returns min(r,c) singular values; pad for wide/tall cases
    let k = svd.singular_values.len();
    let mut cols: Vec<CVec> = Vec::new();
    for i in 0..k {
        if svd.singular_values[i] <= cut {
            cols.push(vt.row(i).adjoint());
        }
    }
    if k < n {
        // remaining right vectors are not returned by a thin svd; fall back to a square one
        let mut sq = Mat::zeros(n, n);
        sq.view_mut((0, 0), (m.nrows().min(n), n)).copy_from(&m.rows(0, m.nrows().min(n)));
        return null_space(&sq, rel_tol);
    }
    if cols.is_empty() {
        return Mat::zeros(n, 0);
    }
    Mat::from_columns(&cols)
}

/// Least-squares solve via SVD; returns (solution, residual norm).
pub fn lstsq(a: &Mat, b: &CVec) -> (CVec, f64) {
    if a.ncols() == 0 {
        return (CVec::zeros(0), b.norm());
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let x = svd
        .solve(b, 1e-14 * smax.max(1e-300))
        .unwrap_or_else(|_| CVec::zeros(a.ncols()));
    let r = (a * &x - b).norm();
    (x, r)
}

pub fn solve(a: &Mat, b: &CVec) -> Result<CVec> {
    a.clone()
        .lu()
        .solve(b)
        .ok_or_else(|| CsosError::Singular("linear solve".into()))
}

// ---- polynomials: coefficient vectors, lowest degree first ----

pub fn poly_eval(p: &[C64], x: C64) -> C64 {
    p.iter().rev().fold(C64::new(0.0, 0.0), |acc, &a| acc * x + a)
}

pub fn poly_mul(a: &[C64], b: &[C64]) -> Vec<C64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![C64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (k, &y) in b.iter().enumerate() {
            out[i + k] += x * y;
        }
    }
    out
}

pub fn poly_add(a: &[C64], b: &[C64]) -> Vec<C64> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| a.get(i).copied().unwrap_or_default() + b.get(i).copied().unwrap_or_default())
        .collect()
}

pub fn poly_scale(a: &[C64], s: C64) -> Vec<C64> {
    a.iter().map(|&x| x * s).collect()
}

/// p(s·t) as a polynomial in t.
pub fn poly_dilate(a: &[C64], s: C64) -> Vec<C64> {
    let mut f = C64::new(1.0, 0.0);
    a.iter()
        .map(|&x| {
            let v = x * f;
            f *= s;
            v
        })
        .collect()
}

/// (1 - a t)^n
pub fn linear_power(a: C64, n: usize) -> Vec<C64> {
    let mut p = vec![C64::new(1.0, 0.0)];
    for _ in 0..n {
        p = poly_mul(&p, &[C64::new(1.0, 0.0), -a]);
    }
    p
}

/// Roots of a polynomial via companion-matrix eigenvalues.
pub fn poly_roots(p: &[C64]) -> Result<Vec<C64>> {
    let mut deg = p.len();
    while deg > 0 && p[deg - 1].norm() == 0.0 {
        deg -= 1;
    }
    if deg <= 1 {
        return Ok(vec![]);
    }
    let n = deg - 1;
    let lead = p[n];
    let mut comp = Mat::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    for i in 0..n {
        comp[(i, n - 1)] = -p[i] / lead;
    }
    eigenvalues(&comp)
}

/// Interpolating polynomial through (nodes, values); degree nodes.len()-1.
pub fn interpolate(nodes: &[C64], values: &[C64]) -> Result<Vec<C64>> {
    let n = nodes.len();
    let v = Mat::from_fn(n, n, |i, k| nodes[i].powu(k as u32));
    let b = CVec::from_column_slice(values);
    Ok(solve(&v, &b)?.iter().copied().collect())
}

/// Matrix-valued interpolation: coefficient operators of a polynomial sampled at nodes.
pub fn interpolate_mats(nodes: &[C64], values: &[Mat]) -> Result<Vec<Mat>> {
    let n = nodes.len();
    let v = Mat::from_fn(n, n, |i, k| nodes[i].powu(k as u32));
    let inv = v
        .try_inverse()
        .ok_or_else(|| CsosError::Singular("interpolation nodes".into()))?;
    let (r, cc) = values[0].shape();
    let mut out = vec![Mat::zeros(r, cc); n];
    for (k, o) in out.iter_mut().enumerate() {
        for i in 0..n {
            *o += &values[i] * inv[(k, i)];
        }
    }
    Ok(out)
}

/// Nodes r·exp(2πi(k + phase)/n), k = 0..n.
pub fn circle_nodes(n: usize, radius: f64, phase: f64) -> Vec<C64> {
    (0..n)
        .map(|k| C64::from_polar(radius, 2.0 * std::f64::consts::PI * (k as f64 + phase) / n as f64))
        .collect()
}

/// Independent reproducible stream `stream` of the master seed.
pub fn seeded_rng(seed: u64, stream: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Point with modulus uniform in [rmin, rmax] and uniform phase.
pub fn random_point<R: rand::Rng>(rng: &mut R, rmin: f64, rmax: f64) -> C64 {
    let r = rng.random_range(rmin..rmax);
    let th = rng.random_range(0.0..std::f64::consts::TAU);
    C64::from_polar(r, th)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_of_known_cubic() {
        // (t-1)(t-2)(t+3) = t^3 - 7t + 6
        let p = [c(6.0, 0.0), c(-7.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        let mut r: Vec<f64> = poly_roots(&p).unwrap().iter().map(|z| z.re).collect();
        r.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((r[0] + 3.0).abs() < 1e-12 && (r[1] - 1.0).abs() < 1e-12 && (r[2] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn eigenvalues_of_triangular() {
        let m = Mat::from_row_slice(2, 2, &[c(1.0, 1.0), c(5.0, 0.0), c(0.0, 0.0), c(-2.0, 0.0)]);
        let mut e = eigenvalues(&m).unwrap();
        e.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((e[0] - c(-2.0, 0.0)).norm() < 1e-12);
        assert!((e[1] - c(1.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn null_space_of_rank_one() {
        let m = Mat::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)]);
        let ns = null_space(&m, 1e-10);
        assert_eq!(ns.ncols(), 1);
        assert!(((&m) * ns.column(0)).norm() < 1e-12);
    }

    #[test]
    fn interpolation_round_trip() {
        let p = vec![c(1.0, 2.0), c(-0.5, 0.0), c(0.0, 3.0)];
        let nodes = circle_nodes(3, 1.3, 0.1);
        let vals: Vec<C64> = nodes.iter().map(|&x| poly_eval(&p, x)).collect();
        let q = interpolate(&nodes, &vals).unwrap();
        for (a, b) in p.iter().zip(&q) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn kron_order() {
        let a = Mat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let k = kron_list(&[a.clone(), eye(2)]);
        // first factor acts on the most significant bit
        assert_eq!(k[(0, 2)], c(1.0, 0.0));
    }
}
