//! Edge-space state model, monodromy operators and their coefficients, sector
//! transfer matrices, and the chiral Potts row-to-row matrices.

use num_complex::Complex64 as C64;

use crate::csosweights::{u22, u2j_edges, ulj_edges};
use crate::curveweights::{
    block_factors, related_point, u_ell_square4b, weight_w, weight_wbar, RapidityPoint,
};
use crate::linalg::{circle_nodes, interpolate_mats, kron_list, max_abs, residual_of, Mat, Residual};
use crate::qarith::RootOfUnity;
use crate::{CsosError, Result};

/// Hard cap on dense operator dimension.
pub const DIM_CAP: usize = 4096;
/// Interpolation radius for coefficient extraction.
pub const EXTRACT_RADIUS: f64 = 1.37;

/// Edge configurations (n_1..n_L), n_i in [0, j-1], first site most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeBasis {
    pub l: usize,
    pub j: usize,
    pub n: usize,
    pub states: Vec<Vec<usize>>,
}

impl EdgeBasis {
    pub fn new(l: usize, j: usize, n: usize) -> Result<Self> {
        if l == 0 || j == 0 {
            return Err(CsosError::InvalidArgument("L and j must be positive".into()));
        }
        let dim = (j as u64).checked_pow(l as u32).unwrap_or(u64::MAX);
        if dim > DIM_CAP as u64 {
            return Err(CsosError::DimensionCap { dim: dim as usize, cap: DIM_CAP });
        }
        let dim = dim as usize;
        let states = (0..dim)
            .map(|mut i| {
                let mut s = vec![0; l];
                for k in (0..l).rev() {
                    s[k] = i % j;
                    i /= j;
                }
                s
            })
            .collect();
        Ok(EdgeBasis { l, j, n, states })
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn index(&self, s: &[usize]) -> usize {
        s.iter().fold(0, |acc, &x| acc * self.j + x)
    }

    pub fn total(&self, i: usize) -> usize {
        self.states[i].iter().sum()
    }

    pub fn charge(&self, i: usize) -> usize {
        self.total(i) % self.n
    }

    pub fn charge_block(&self, c: usize) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.charge(i) == c % self.n).collect()
    }

    /// |0,..,0>
    pub fn omega_state(&self) -> usize {
        0
    }

    /// |j-1,..,j-1>
    pub fn omega_bar_state(&self) -> usize {
        self.dim() - 1
    }
}

pub fn restrict(m: &Mat, block: &[usize]) -> Mat {
    Mat::from_fn(block.len(), block.len(), |r, c| m[(block[r], block[c])])
}

/// ℓ×ℓ array of operators; blocks[a0][aL] maps edge column states to rows.
#[derive(Clone, Debug)]
pub struct Monodromy {
    pub ell: usize,
    pub blocks: Vec<Vec<Mat>>,
}

impl Monodromy {
    pub fn get(&self, a: usize, b: usize) -> &Mat {
        &self.blocks[a][b]
    }

    /// Σ_α ω^{-Qα} M^{αα}
    pub fn weighted_trace(&self, q: i64, ctx: &RootOfUnity) -> Mat {
        let d = self.blocks[0][0].nrows();
        let mut out = Mat::zeros(d, d);
        for a in 0..self.ell {
            out += &self.blocks[a][a] * ctx.w(-q * a as i64);
        }
        out
    }
}

/// Product over sites of the single-site operators S^{αβ}[n', n] = face(α, β, n).
pub fn build_monodromy<F>(basis: &EdgeBasis, ell: usize, face: F) -> Monodromy
where
    F: Fn(usize, usize, usize) -> C64,
{
    let j = basis.j;
    let site: Vec<Vec<Mat>> = (0..ell)
        .map(|a| {
            (0..ell)
                .map(|b| {
                    let mut s = Mat::zeros(j, j);
                    for n in 0..j {
                        let n2 = n as i64 - a as i64 + b as i64;
                        if (0..j as i64).contains(&n2) {
                            s[(n2 as usize, n)] = face(a, b, n);
                        }
                    }
                    s
                })
                .collect()
        })
        .collect();
    let mut part = site.clone();
    for _ in 1..basis.l {
        let mut next = Vec::with_capacity(ell);
        for a0 in 0..ell {
            let mut row = Vec::with_capacity(ell);
            for b in 0..ell {
                let d = part[a0][0].nrows() * j;
                let mut acc = Mat::zeros(d, d);
                for a in 0..ell {
                    acc += part[a0][a].kronecker(&site[a][b]);
                }
                row.push(acc);
            }
            next.push(row);
        }
        part = next;
    }
    Monodromy { ell, blocks: part }
}

/// The 2×2 monodromy at t.
pub fn build_monodromy2(basis: &EdgeBasis, t: C64, ctx: &RootOfUnity) -> Monodromy {
    let j = basis.j;
    build_monodromy(basis, 2, |a, b, n| u2j_edges(a, b, n, t, j, ctx))
}

/// The ℓ-dimensional fused monodromy at t.
pub fn build_monodromy_l(basis: &EdgeBasis, ell: usize, t: C64, ctx: &RootOfUnity) -> Monodromy {
    let j = basis.j;
    build_monodromy(basis, ell, |a, b, n| ulj_edges(a, b, n, t, ell, j, ctx))
}

/// Polynomial variable of an `OperatorPoly`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolyVar {
    /// powers of (-ω t)
    MinusOmegaT,
    /// powers of t
    T,
}

#[derive(Clone, Debug)]
pub struct OperatorPoly {
    pub coeffs: Vec<Mat>,
    pub var: PolyVar,
    pub omega: C64,
}

impl OperatorPoly {
    pub fn eval(&self, t: C64) -> Mat {
        let s = match self.var {
            PolyVar::MinusOmegaT => -self.omega * t,
            PolyVar::T => t,
        };
        let d = self.coeffs[0].nrows();
        let mut out = Mat::zeros(d, d);
        for c in self.coeffs.iter().rev() {
            out = out * s + c;
        }
        out
    }

    /// Coefficient n, zero beyond the stored range.
    pub fn coeff(&self, n: i64) -> Mat {
        let d = self.coeffs[0].nrows();
        if n < 0 || n as usize >= self.coeffs.len() {
            return Mat::zeros(d, d);
        }
        self.coeffs[n as usize].clone()
    }

    pub fn degree(&self) -> usize {
        self.coeffs
            .iter()
            .rposition(|c| max_abs(c) > 1e-12)
            .unwrap_or(0)
    }
}

/// A, B, C, D in coefficient form.
#[derive(Clone, Debug)]
pub struct Monodromy2 {
    pub l: usize,
    pub j: usize,
    pub a: OperatorPoly,
    pub b: OperatorPoly,
    pub c: OperatorPoly,
    pub d: OperatorPoly,
    /// size of the discarded degree L+1 coefficient (should vanish)
    pub truncation: f64,
}

impl Monodromy2 {
    pub fn at(&self, t: C64) -> [Mat; 4] {
        [self.a.eval(t), self.b.eval(t), self.c.eval(t), self.d.eval(t)]
    }
}

/// Interpolates the monodromy at L+2 nodes and reads off coefficients in (-ωt)^n.
pub fn extract_coefficients(basis: &EdgeBasis, ctx: &RootOfUnity) -> Result<Monodromy2> {
    let l = basis.l;
    let w = ctx.w(1);
    let nodes = circle_nodes(l + 2, EXTRACT_RADIUS, 0.21);
    let ms: Vec<Monodromy> = nodes.iter().map(|&s| build_monodromy2(basis, -s / w, ctx)).collect();
    let mut polys = Vec::new();
    let mut trunc: f64 = 0.0;
    for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        let vals: Vec<Mat> = ms.iter().map(|m| m.get(a, b).clone()).collect();
        let mut cs = interpolate_mats(&nodes, &vals)?;
        let top = cs.pop().expect("L+2 coefficients");
        trunc = trunc.max(max_abs(&top));
        polys.push(OperatorPoly { coeffs: cs, var: PolyVar::MinusOmegaT, omega: w });
    }
    let mut it = polys.into_iter();
    Ok(Monodromy2 {
        l,
        j: basis.j,
        a: it.next().unwrap(),
        b: it.next().unwrap(),
        c: it.next().unwrap(),
        d: it.next().unwrap(),
        truncation: trunc,
    })
}

/// Single-site Z^{(j)} = diag(ω^k).
pub fn site_z(j: usize, ctx: &RootOfUnity) -> Mat {
    Mat::from_fn(j, j, |r, c| if r == c { ctx.w(r as i64) } else { C64::new(0.0, 0.0) })
}

/// Closed forms of A_0, D_0, A_L, D_L.
pub fn leading_coefficients(basis: &EdgeBasis, ctx: &RootOfUnity) -> [Mat; 4] {
    let (l, j) = (basis.l as i64, basis.j as i64);
    let zall = kron_list(&vec![site_z(basis.j, ctx); basis.l]);
    let id = Mat::identity(basis.dim(), basis.dim());
    [
        id.clone(),
        &zall * ctx.w((1 - j) * l),
        &zall * ctx.w(-j * l),
        id * ctx.w(-j * l),
    ]
}

/// A(t) + ω^{-Q} D(t)
pub fn tau2q(m: &Monodromy2, t: C64, q: i64, ctx: &RootOfUnity) -> Mat {
    m.a.eval(t) + m.d.eval(t) * ctx.w(-q)
}

/// Direct build of A(t) + ω^{-Q} D(t) without coefficient extraction.
pub fn tau2q_direct(basis: &EdgeBasis, t: C64, q: i64, ctx: &RootOfUnity) -> Mat {
    build_monodromy2(basis, t, ctx).weighted_trace(q, ctx)
}

/// Fused transfer matrix Σ_α ω^{-Qα} M^{αα}(t).
pub fn tau_ljq(basis: &EdgeBasis, ell: usize, t: C64, q: i64, ctx: &RootOfUnity) -> Result<Mat> {
    if ell == 0 || ell > basis.n {
        return Err(CsosError::InvalidArgument(format!("ell = {ell} outside [1, N]")));
    }
    Ok(build_monodromy_l(basis, ell, t, ctx).weighted_trace(q, ctx))
}

/// ‖big(M_r, M_q) R − R big(M_q, M_r)‖ scaled, with R = P·u22(t_q/t_r).
pub fn monodromy_yang_baxter(basis: &EdgeBasis, t_r: C64, t_q: C64, ctx: &RootOfUnity) -> Residual {
    let mr = build_monodromy2(basis, t_r, ctx);
    let mq = build_monodromy2(basis, t_q, ctx);
    let u = u22(t_q / t_r, ctx);
    // swap of the two auxiliary factors
    let r = Mat::from_fn(4, 4, |row, col| u[(2 * (row % 2) + row / 2, col)]);
    let big = |m1: &Monodromy, m2: &Monodromy, a: usize, b: usize| -> Mat {
        m1.get(a / 2, b / 2) * m2.get(a % 2, b % 2)
    };
    let mut worst = Residual::zero();
    for a in 0..4 {
        for c in 0..4 {
            let mut terms = Vec::new();
            for b in 0..4 {
                if r[(b, c)].norm() > 0.0 {
                    terms.push(big(&mr, &mq, a, b) * r[(b, c)]);
                }
                if r[(a, b)].norm() > 0.0 {
                    terms.push(big(&mq, &mr, b, c) * (-r[(a, b)]));
                }
            }
            if !terms.is_empty() {
                worst = Residual::worst(worst, residual_of(&terms));
            }
        }
    }
    worst
}

/// Spin configurations (σ_1..σ_L) in Z_N^L.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinBasis {
    pub l: usize,
    pub n: usize,
    pub states: Vec<Vec<usize>>,
}

impl SpinBasis {
    pub fn new(l: usize, n: usize) -> Result<Self> {
        let dim = (n as u64).checked_pow(l as u32).unwrap_or(u64::MAX);
        if dim > 1000 {
            return Err(CsosError::DimensionCap { dim: dim as usize, cap: 1000 });
        }
        let e = EdgeBasis::new(l, n, n)?;
        Ok(SpinBasis { l, n, states: e.states })
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn index(&self, s: &[usize]) -> usize {
        s.iter().fold(0, |acc, &x| acc * self.n + x)
    }

    /// (𝒳^k)[s, s'] = 1 iff s' = s - k.
    pub fn shift(&self, k: i64) -> Mat {
        let d = self.dim();
        let mut m = Mat::zeros(d, d);
        for (i, s) in self.states.iter().enumerate() {
            let t: Vec<usize> = s.iter().map(|&x| (x as i64 - k).rem_euclid(self.n as i64) as usize).collect();
            m[(i, self.index(&t))] = C64::new(1.0, 0.0);
        }
        m
    }
}

/// T_q[σ, σ'] = ∏ W_pq(σ_i − σ'_i) W̄_p'q(σ_{i+1} − σ'_i)
pub fn cp_transfer(
    basis: &SpinBasis,
    p: &RapidityPoint,
    pp: &RapidityPoint,
    q: &RapidityPoint,
    ctx: &RootOfUnity,
) -> Result<Mat> {
    let l = basis.l;
    let d = basis.dim();
    let mut m = Mat::zeros(d, d);
    for (r, s) in basis.states.iter().enumerate() {
        for (c, e) in basis.states.iter().enumerate() {
            let mut v = C64::new(1.0, 0.0);
            for i in 0..l {
                let (si, sn, ei) = (s[i] as i64, s[(i + 1) % l] as i64, e[i] as i64);
                v *= weight_w(p, q, si - ei, ctx)? * weight_wbar(pp, q, sn - ei, ctx)?;
            }
            m[(r, c)] = v;
        }
    }
    Ok(m)
}

/// T̂_{q'}[σ, σ'] = ∏ W̄_pq'(σ_i − σ'_i) W_p'q'(σ_i − σ'_{i+1})
pub fn cp_transfer_hat(
    basis: &SpinBasis,
    p: &RapidityPoint,
    pp: &RapidityPoint,
    qq: &RapidityPoint,
    ctx: &RootOfUnity,
) -> Result<Mat> {
    let l = basis.l;
    let d = basis.dim();
    let mut m = Mat::zeros(d, d);
    for (r, e) in basis.states.iter().enumerate() {
        for (c, s) in basis.states.iter().enumerate() {
            let mut v = C64::new(1.0, 0.0);
            for i in 0..l {
                let (ei, si, sn) = (e[i] as i64, s[i] as i64, s[(i + 1) % l] as i64);
                v *= weight_wbar(p, qq, ei - si, ctx)? * weight_w(pp, qq, ei - sn, ctx)?;
            }
            m[(r, c)] = v;
        }
    }
    Ok(m)
}

/// τ_ℓ(t_q) on spins: ∏ U^{(ℓ)}(σ_i, σ_{i+1}, σ'_{i+1}, σ'_i), vertical differences below ℓ.
pub fn cp_tau_l(
    basis: &SpinBasis,
    p: &RapidityPoint,
    pp: &RapidityPoint,
    q: &RapidityPoint,
    ell: usize,
    ctx: &RootOfUnity,
) -> Mat {
    let (l, n) = (basis.l, basis.n as i64);
    let d = basis.dim();
    let mut m = Mat::zeros(d, d);
    for (r, s) in basis.states.iter().enumerate() {
        for (c, s2) in basis.states.iter().enumerate() {
            if (0..l).any(|i| (s[i] as i64 - s2[i] as i64).rem_euclid(n) >= ell as i64) {
                continue;
            }
            let mut v = C64::new(1.0, 0.0);
            for i in 0..l {
                let k = (i + 1) % l;
                v *= u_ell_square4b(
                    p, pp, q, ell as i64, s[i] as i64, s[k] as i64, s2[k] as i64, s2[i] as i64, ctx,
                );
            }
            m[(r, c)] = v;
        }
    }
    m
}

/// Both sides of T_q T̂_{q'} = A^L τ_ℓ(t_q) + Â^L 𝒳^ℓ τ_{N−ℓ}(ω^ℓ t_q).
pub fn funtt_sides(
    basis: &SpinBasis,
    p: &RapidityPoint,
    pp: &RapidityPoint,
    q: &RapidityPoint,
    ell: usize,
    ctx: &RootOfUnity,
) -> Result<(Mat, Mat)> {
    let qq = related_point(q, ell as i64, ctx);
    let lhs = cp_transfer(basis, p, pp, q, ctx)? * cp_transfer_hat(basis, p, pp, &qq, ctx)?;
    let f = block_factors(p, pp, q, ell as i64, ctx)?;
    let l = basis.l as i32;
    let upper = cp_tau_l(basis, p, pp, q, ell, ctx) * f.a.powi(l);
    let lower = if ell < basis.n {
        basis.shift(ell as i64) * cp_tau_l(basis, p, pp, &qq, basis.n - ell, ctx) * f.ahat.powi(l)
    } else {
        Mat::zeros(basis.dim(), basis.dim())
    };
    Ok((lhs, upper + lower))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curveweights::{make_point, CurveModuli};
    use crate::linalg::c;

    #[test]
    fn basis_counts() {
        let b = EdgeBasis::new(6, 2, 3).unwrap();
        assert_eq!(b.charge_block(0).len(), 22);
        assert!(matches!(EdgeBasis::new(13, 2, 3), Err(CsosError::DimensionCap { .. })));
    }

    #[test]
    fn vacuum_eigenvalues() {
        let ctx = RootOfUnity::new(3).unwrap();
        for j in 2..=3 {
            let b = EdgeBasis::new(3, j, 3).unwrap();
            let t = c(0.3, 0.4);
            let m = build_monodromy2(&b, t, &ctx);
            let a = (1.0 - ctx.w(1 - j as i64) * t).powi(3);
            let o = b.omega_state();
            let ob = b.omega_bar_state();
            for r in 0..b.dim() {
                let ea = if r == o { a } else { c(0.0, 0.0) };
                assert!((m.get(0, 0)[(r, o)] - ea).norm() < 1e-13);
                let ed = if r == ob { a } else { c(0.0, 0.0) };
                assert!((m.get(1, 1)[(r, ob)] - ed).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn coefficients_and_closed_forms() {
        let ctx = RootOfUnity::new(3).unwrap();
        let b = EdgeBasis::new(3, 2, 3).unwrap();
        let m = extract_coefficients(&b, &ctx).unwrap();
        assert!(m.truncation < 1e-11);
        assert!(max_abs(&m.b.coeff(0)) < 1e-11);
        assert!(max_abs(&m.c.coeff(3)) < 1e-11);
        let [a0, d0, al, dl] = leading_coefficients(&b, &ctx);
        assert!(max_abs(&(m.a.coeff(0) - a0)) < 1e-11);
        assert!(max_abs(&(m.d.coeff(0) - d0)) < 1e-11);
        assert!(max_abs(&(m.a.coeff(3) - al)) < 1e-11);
        assert!(max_abs(&(m.d.coeff(3) - dl)) < 1e-11);
        let t = c(-0.2, 0.77);
        let direct = build_monodromy2(&b, t, &ctx);
        let ev = m.at(t);
        assert!(max_abs(&(&ev[1] - direct.get(0, 1))) < 1e-10);
    }

    #[test]
    fn b_raises_and_c_lowers() {
        let ctx = RootOfUnity::new(3).unwrap();
        let b = EdgeBasis::new(3, 3, 3).unwrap();
        let m = build_monodromy2(&b, c(0.4, 0.1), &ctx);
        for r in 0..b.dim() {
            for col in 0..b.dim() {
                let (tr, tc) = (b.total(r) as i64, b.total(col) as i64);
                if m.get(0, 1)[(r, col)].norm() > 0.0 {
                    assert_eq!(tr, tc + 1);
                }
                if m.get(1, 0)[(r, col)].norm() > 0.0 {
                    assert_eq!(tr, tc - 1);
                }
                if m.get(0, 0)[(r, col)].norm() > 0.0 || m.get(1, 1)[(r, col)].norm() > 0.0 {
                    assert_eq!(tr, tc);
                }
            }
        }
    }

    #[test]
    fn commuting_family() {
        let ctx = RootOfUnity::new(3).unwrap();
        let b = EdgeBasis::new(3, 2, 3).unwrap();
        for q in 0..3 {
            let x = tau2q_direct(&b, c(0.3, 0.2), q, &ctx);
            let y = tau2q_direct(&b, c(-0.6, 0.5), q, &ctx);
            let z = tau_ljq(&b, 3, c(0.1, -0.9), q, &ctx).unwrap();
            assert!(max_abs(&(&x * &y - &y * &x)) < 1e-12);
            assert!(max_abs(&(&x * &z - &z * &x)) < 1e-12);
            let f2 = tau_ljq(&b, 2, c(0.3, 0.2), q, &ctx).unwrap();
            assert!(max_abs(&(f2 - x)) < 1e-12);
        }
    }

    #[test]
    fn monodromy_ybe() {
        let ctx = RootOfUnity::new(4).unwrap();
        let b = EdgeBasis::new(3, 3, 4).unwrap();
        let r = monodromy_yang_baxter(&b, c(0.3, 0.2), c(-0.4, 0.9), &ctx);
        assert!(r.passes(1e-12), "{r:?}");
    }

    #[test]
    fn funtt_small() {
        let ctx = RootOfUnity::new(3).unwrap();
        let m = CurveModuli::from_kprime(c(0.6, 0.0)).unwrap();
        let p = make_point(m, c(0.7, 0.3), 0, 0, &ctx).unwrap();
        let pp = make_point(m, c(1.3, -0.4), 1, 2, &ctx).unwrap();
        let q = make_point(m, c(0.5, 0.9), 2, 1, &ctx).unwrap();
        let basis = SpinBasis::new(3, 3).unwrap();
        for ell in 1..3 {
            let (l, r) = funtt_sides(&basis, &p, &pp, &q, ell, &ctx).unwrap();
            let res = residual_of(&[l, -r]);
            assert!(res.passes(1e-10), "ell={ell} {res:?}");
        }
        let t = cp_transfer(&basis, &p, &pp, &q, &ctx).unwrap();
        let x = basis.shift(1);
        assert!(max_abs(&(&x * &t - &t * &x)) < 1e-10 * max_abs(&t));
    }
}
