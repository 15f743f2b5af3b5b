//! Chiral Potts rapidity points, the weights W and W̄, the star-square weight
//! and its block-triangular decomposition.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;

use crate::error::{CsosError, Result};
use crate::qarith::{phi, pochhammer, RootOfUnity};

const POLE: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveModuli {
    pub k: C64,
    pub kprime: C64,
}

impl CurveModuli {
    /// k = +sqrt(1 - k'^2).
    pub fn from_kprime(kprime: C64) -> Result<Self> {
        let k = (C64::new(1.0, 0.0) - kprime * kprime).sqrt();
        Self::new(k, kprime)
    }

    pub fn new(k: C64, kprime: C64) -> Result<Self> {
        if k.norm() < POLE {
            return Err(CsosError::InvalidArgument("modulus k must be nonzero".into()));
        }
        let r = (k * k + kprime * kprime - 1.0).norm();
        if r > 1e-12 {
            return Err(CsosError::InvalidArgument(format!("k^2 + k'^2 - 1 = {r:e}")));
        }
        Ok(CurveModuli { k, kprime })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RapidityPoint {
    pub x: C64,
    pub y: C64,
    pub mu: C64,
    pub lambda: C64,
    pub t: C64,
    pub moduli: CurveModuli,
    /// (branch_x, branch_y): x = principal root · ω^branch_x, likewise y
    pub branch: (usize, usize),
}

impl RapidityPoint {
    /// The three defining-relation residuals.
    pub fn residuals(&self, ctx: &RootOfUnity) -> [f64; 3] {
        let n = ctx.n as i32;
        let CurveModuli { k, kprime: kp } = self.moduli;
        let one = C64::new(1.0, 0.0);
        [
            (k * self.y.powi(n) - (one - kp * self.lambda)).norm(),
            (k * self.x.powi(n) - (one - kp / self.lambda)).norm(),
            (k * k * self.t.powi(n) - (one + kp * kp - kp * (self.lambda + one / self.lambda))).norm(),
        ]
    }

    pub fn on_curve(&self, ctx: &RootOfUnity) -> bool {
        let r = self.residuals(ctx);
        r[0] < 1e-11 && r[1] < 1e-11 && r[2] < 1e-10
    }
}

fn nth_root(z: C64, n: usize) -> C64 {
    if z.norm() == 0.0 {
        return z;
    }
    z.powf(1.0 / n as f64)
}

pub fn make_point(
    moduli: CurveModuli,
    mu: C64,
    branch_x: i64,
    branch_y: i64,
    ctx: &RootOfUnity,
) -> Result<RapidityPoint> {
    if mu.norm() < POLE {
        return Err(CsosError::InvalidArgument("mu must be nonzero".into()));
    }
    let n = ctx.n;
    let one = C64::new(1.0, 0.0);
    let lambda = mu.powi(n as i32);
    let ry = one - moduli.kprime * lambda;
    if ry.norm() < POLE {
        return Err(CsosError::Pole("1 - k' mu^N = 0 (branch point)".into()));
    }
    let rx = one - moduli.kprime / lambda;
    let (bx, by) = (ctx.wrap(branch_x), ctx.wrap(branch_y));
    let y = nth_root(ry / moduli.k, n) * ctx.w(by as i64);
    let x = nth_root(rx / moduli.k, n) * ctx.w(bx as i64);
    Ok(RapidityPoint { x, y, mu, lambda, t: x * y, moduli, branch: (bx, by) })
}

/// (y_p, ω^ℓ x_p, 1/μ_p)
pub fn related_point(p: &RapidityPoint, shift: i64, ctx: &RootOfUnity) -> RapidityPoint {
    let x = p.y;
    let y = ctx.w(shift) * p.x;
    let mu = C64::new(1.0, 0.0) / p.mu;
    RapidityPoint {
        x,
        y,
        mu,
        lambda: C64::new(1.0, 0.0) / p.lambda,
        t: x * y,
        moduli: p.moduli,
        branch: (p.branch.1, ctx.wrap(p.branch.0 as i64 + shift)),
    }
}

/// A point with prescribed t: λ from the quadratic λ + 1/λ = (1 + k'^2 - k^2 t^N)/k',
/// then the x-branch is searched so that x·y = t.
pub fn point_with_t(moduli: CurveModuli, t: C64, root: usize, ctx: &RootOfUnity) -> Result<RapidityPoint> {
    let one = C64::new(1.0, 0.0);
    let CurveModuli { k, kprime: kp } = moduli;
    if kp.norm() < POLE {
        return Err(CsosError::InvalidArgument("k' = 0".into()));
    }
    let s = (one + kp * kp - k * k * t.powi(ctx.n as i32)) / kp;
    let disc = (s * s - 4.0).sqrt();
    let lambda = if root == 0 { (s + disc) / 2.0 } else { (s - disc) / 2.0 };
    let mu = nth_root(lambda, ctx.n);
    for bx in 0..ctx.n as i64 {
        let p = make_point(moduli, mu, bx, 0, ctx)?;
        if (p.t - t).norm() < 1e-9 * t.norm().max(1.0) {
            return Ok(p);
        }
    }
    Err(CsosError::NoSolution(format!("no branch with t = {t}")))
}

fn guard(num: C64, den: C64, what: &str) -> Result<C64> {
    if den.norm() < POLE {
        return Err(CsosError::Pole(what.into()));
    }
    Ok(num / den)
}

pub fn weight_w(p: &RapidityPoint, q: &RapidityPoint, n: i64, ctx: &RootOfUnity) -> Result<C64> {
    let n = ctx.wrap(n) as i64;
    let mut r = (p.mu / q.mu).powi(n as i32);
    for m in 1..=n {
        r *= guard(q.y - p.x * ctx.w(m), p.y - q.x * ctx.w(m), "W: y_p - x_q w^m = 0")?;
    }
    Ok(r)
}

pub fn weight_wbar(p: &RapidityPoint, q: &RapidityPoint, n: i64, ctx: &RootOfUnity) -> Result<C64> {
    let n = ctx.wrap(n) as i64;
    let mut r = (p.mu * q.mu).powi(n as i32);
    for m in 1..=n {
        r *= guard(ctx.omega * p.x - q.x * ctx.w(m), q.y - p.y * ctx.w(m), "Wbar: y_q - y_p w^m = 0")?;
    }
    Ok(r)
}

/// Σ_e W_pq(a-e) W̄_pq'(e-d) W̄_p'q(b-e) W_p'q'(e-c)
#[allow(clippy::too_many_arguments)]
pub fn star_square(
    p: &RapidityPoint,
    pp: &RapidityPoint,
    q: &RapidityPoint,
    qq: &RapidityPoint,
    a: i64,
    b: i64,
    c: i64,
    d: i64,
    ctx: &RootOfUnity,
) -> Result<C64> {
    let mut s = C64::new(0.0, 0.0);
    for e in 0..ctx.n as i64 {
        s += weight_w(p, q, a - e, ctx)?
            * weight_wbar(p, qq, e - d, ctx)?
            * weight_wbar(pp, q, b - e, ctx)?
            * weight_w(pp, qq, e - c, ctx)?;
    }
    Ok(s)
}

fn poch(x: C64, n: i64, ctx: &RootOfUnity) -> C64 {
    // only called with n >= 0, where no division happens
    pochhammer(x, n, ctx).unwrap_or_default()
}

/// F_pq(ℓ, α, m) = (μ_p/y_p)^α x_p^m Φ(1, ω^α t_q/t_p)_m^{α, ℓ-α-1}
pub fn f_pq(p: &RapidityPoint, q: &RapidityPoint, ell: i64, alpha: i64, m: i64, ctx: &RootOfUnity) -> C64 {
    let alpha = ctx.wrap(alpha) as i64;
    (p.mu / p.y).powi(alpha as i32)
        * p.x.powi(m as i32)
        * phi(C64::new(1.0, 0.0), ctx.w(alpha) * q.t / p.t, alpha, ell - alpha - 1, m, ctx)
}

/// η_{q,ℓ,m} = (ω^ℓ t_q)^m (ω^{1+m}; ω)_{N-ℓ}
pub fn eta(q: &RapidityPoint, ell: i64, m: i64, ctx: &RootOfUnity) -> C64 {
    let m = ctx.wrap(m) as i64;
    (ctx.w(ell) * q.t).powi(m as i32) * poch(ctx.w(1 + m), ctx.n as i64 - ell, ctx)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlockFactors {
    pub a: C64,
    pub ahat: C64,
    pub omega: C64,
}

/// A_{pp'q}, Â_{pp'q}, Ω_{pp'q}.
pub fn block_factors(
    p: &RapidityPoint,
    pp: &RapidityPoint,
    q: &RapidityPoint,
    ell: i64,
    ctx: &RootOfUnity,
) -> Result<BlockFactors> {
    let n = ctx.n as i32;
    let one = C64::new(1.0, 0.0);
    let nn = C64::new(ctx.n as f64, 0.0);
    let den_y = one - q.y.powi(n) / pp.y.powi(n);
    let p1 = poch(ctx.omega * q.x / p.y, ell - 1, ctx);
    let omega = guard(
        (one - q.y / pp.y) * poch(q.x / pp.x, ell, ctx),
        den_y * p1,
        "Omega denominator",
    )?;
    let a = guard(
        nn * (one - q.y / pp.y) * poch(q.x / pp.x, ell, ctx) * poch(ctx.w(ell) * q.t / pp.t, ctx.n as i64 - ell, ctx),
        den_y * (one - q.x.powi(n) / pp.x.powi(n)) * p1,
        "A denominator",
    )?;
    let pre = (ctx.omega * p.mu * pp.mu * p.x * pp.x / (p.y * pp.y)).powi(ell as i32);
    let ahat = guard(
        pre * nn * omega * poch(q.t / p.t, ell, ctx),
        one - q.x.powi(n) / p.y.powi(n),
        "Ahat denominator",
    )?;
    Ok(BlockFactors { a, ahat, omega })
}

fn restricted_common(p: &RapidityPoint, q: &RapidityPoint, j: i64, ctx: &RootOfUnity) -> Result<(C64, C64)> {
    let n = ctx.n as i32;
    let one = C64::new(1.0, 0.0);
    let num = (one - ctx.w(-j) * q.y / p.x) * (one - q.x / p.y);
    let dy = one - q.y.powi(n) / p.x.powi(n);
    let dx = one - q.x.powi(n) / p.y.powi(n);
    let omega = guard(num, dy, "Omega_pq denominator")?;
    let bracket = guard(C64::new(ctx.n as f64, 0.0) * num, dy * dx, "A_pq denominator")?;
    Ok((omega, bracket))
}

/// Restricted factors (A_pq, Â_pq, Ω_pq) for the CSOS specialization p' = (y_p, ω^j x_p, 1/μ_p).
pub fn restricted_block_factors(
    p: &RapidityPoint,
    q: &RapidityPoint,
    ell: i64,
    j: i64,
    ctx: &RootOfUnity,
) -> Result<BlockFactors> {
    let (omega, bracket) = restricted_common(p, q, j, ctx)?;
    let r = q.t / p.t;
    Ok(BlockFactors {
        a: poch(ctx.w(ell - j) * r, ctx.n as i64 - ell, ctx) * bracket,
        ahat: ctx.w((1 - j) * ell) * poch(r, ell, ctx) * bracket,
        omega,
    })
}

/// U^{(ℓ)} via F_pq products with μ_p' powers.
#[allow(clippy::too_many_arguments)]
pub fn u_ell_square4a(
    p: &RapidityPoint,
    pp: &RapidityPoint,
    q: &RapidityPoint,
    ell: i64,
    a: i64,
    b: i64,
    c: i64,
    d: i64,
    ctx: &RootOfUnity,
) -> C64 {
    let al = ctx.wrap(a - d) as i64;
    let be = ctx.wrap(b - c) as i64;
    (0..ell)
        .map(|m| {
            ctx.w((d - b) * m)
                * pp.mu.powi((be - m) as i32)
                * f_pq(p, q, ell, al, m, ctx)
                * f_pq(pp, q, ell, m, be, ctx)
        })
        .sum()
}

/// U^{(ℓ)} via the η-ratio form.
#[allow(clippy::too_many_arguments)]
pub fn u_ell_square4b(
    p: &RapidityPoint,
    pp: &RapidityPoint,
    q: &RapidityPoint,
    ell: i64,
    a: i64,
    b: i64,
    c: i64,
    d: i64,
    ctx: &RootOfUnity,
) -> C64 {
    let al = ctx.wrap(a - d) as i64;
    let be = ctx.wrap(b - c) as i64;
    (0..ell)
        .map(|m| {
            ctx.w((d - b) * m) * f_pq(p, q, ell, al, m, ctx) * f_pq(pp, q, ell, be, m, ctx) * eta(q, ell, be, ctx)
                / eta(q, ell, m, ctx)
        })
        .sum()
}

/// Both evaluation paths of U^{(ℓ)}.
#[allow(clippy::too_many_arguments)]
pub fn u_ell_block(
    p: &RapidityPoint,
    pp: &RapidityPoint,
    q: &RapidityPoint,
    ell: i64,
    a: i64,
    b: i64,
    c: i64,
    d: i64,
    ctx: &RootOfUnity,
) -> (C64, C64) {
    (
        u_ell_square4a(p, pp, q, ell, a, b, c, d, ctx),
        u_ell_square4b(p, pp, q, ell, a, b, c, d, ctx),
    )
}

/// Lower block kernel for ℓ ≤ α, β ≤ N-1 (η index taken at α-ℓ).
#[allow(clippy::too_many_arguments)]
pub fn u_lower_block(
    p: &RapidityPoint,
    pp: &RapidityPoint,
    q: &RapidityPoint,
    ell: i64,
    a: i64,
    b: i64,
    c: i64,
    d: i64,
    ctx: &RootOfUnity,
) -> C64 {
    let qq = related_point(q, ell, ctx);
    let nl = ctx.n as i64 - ell;
    let al = ctx.wrap(a - d) as i64;
    let be = ctx.wrap(b - c) as i64;
    (0..nl)
        .map(|m| {
            ctx.w((d - b + ell) * m)
                * f_pq(pp, &qq, nl, be - ell, m, ctx)
                * f_pq(p, &qq, nl, al - ell, m, ctx)
                * eta(&qq, nl, al - ell, ctx)
                / eta(&qq, nl, m, ctx)
        })
        .sum()
}

/// Right-hand side of the upper-block factorization: A (y_q/μ_q)^{α-β} U^{(ℓ)}.
#[allow(clippy::too_many_arguments)]
pub fn square_upper_rhs(
    p: &RapidityPoint,
    pp: &RapidityPoint,
    q: &RapidityPoint,
    ell: i64,
    a: i64,
    b: i64,
    c: i64,
    d: i64,
    ctx: &RootOfUnity,
) -> Result<C64> {
    let f = block_factors(p, pp, q, ell, ctx)?;
    let al = ctx.wrap(a - d) as i32;
    let be = ctx.wrap(b - c) as i32;
    Ok(f.a * (q.y / q.mu).powi(al - be) * u_ell_square4a(p, pp, q, ell, a, b, c, d, ctx))
}

/// Right-hand side of the lower-block factorization: Â (x_q μ_q)^{β-α} ω^{ℓ(d-c)} U^{(N-ℓ)}.
#[allow(clippy::too_many_arguments)]
pub fn square_lower_rhs(
    p: &RapidityPoint,
    pp: &RapidityPoint,
    q: &RapidityPoint,
    ell: i64,
    a: i64,
    b: i64,
    c: i64,
    d: i64,
    ctx: &RootOfUnity,
) -> Result<C64> {
    let f = block_factors(p, pp, q, ell, ctx)?;
    let al = ctx.wrap(a - d) as i32;
    let be = ctx.wrap(b - c) as i32;
    Ok(f.ahat * (q.x * q.mu).powi(be - al) * ctx.w(ell * (d - c)) * u_lower_block(p, pp, q, ell, a, b, c, d, ctx))
}

/// Block structure of the star-square weight at q' = (y_q, ω^ℓ x_q, 1/μ_q):
/// residuals of the vanishing corner, the upper and lower factorizations and
/// the two forms of U^{(ℓ)}, all relative to the largest square entry.
pub fn square_decomposition_residuals(
    p: &RapidityPoint,
    pp: &RapidityPoint,
    q: &RapidityPoint,
    ell: i64,
    ctx: &RootOfUnity,
) -> Result<[f64; 4]> {
    let n = ctx.n as i64;
    let qq = related_point(q, ell, ctx);
    let mut scale: f64 = 0.0;
    let (mut tri, mut up, mut low, mut dual) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let u = star_square(p, pp, q, &qq, a, b, c, d, ctx)?;
                    scale = scale.max(u.norm());
                    let al = ctx.wrap(a - d) as i64;
                    let be = ctx.wrap(b - c) as i64;
                    if al < ell && be >= ell {
                        tri = tri.max(u.norm());
                    }
                    if al < ell && be < ell {
                        up = up.max((u - square_upper_rhs(p, pp, q, ell, a, b, c, d, ctx)?).norm());
                        let (x, y) = u_ell_block(p, pp, q, ell, a, b, c, d, ctx);
                        dual = dual.max((x - y).norm());
                    }
                    if al >= ell && be >= ell {
                        low = low.max((u - square_lower_rhs(p, pp, q, ell, a, b, c, d, ctx)?).norm());
                    }
                }
            }
        }
    }
    let s = scale.max(1e-300);
    Ok([tri / s, up / s, low / s, dual / s.max(1.0)])
}

/// Entries of one diagonal block keyed by (α, β, δ = (d-b) mod N).
#[derive(Clone, Debug, PartialEq)]
pub struct SquareWeightBlock {
    pub ell: usize,
    pub entries: BTreeMap<(usize, usize, usize), C64>,
}

impl SquareWeightBlock {
    /// Upper ℓ×ℓ block of U^{(ℓ)} (η-ratio path).
    pub fn upper(p: &RapidityPoint, pp: &RapidityPoint, q: &RapidityPoint, ell: usize, ctx: &RootOfUnity) -> Self {
        let mut entries = BTreeMap::new();
        for al in 0..ell {
            for be in 0..ell {
                for de in 0..ctx.n {
                    // d = 0, b = -δ, a = α, c = b - β
                    let (a, d) = (al as i64, 0i64);
                    let b = -(de as i64);
                    let c = b - be as i64;
                    entries.insert((al, be, de), u_ell_square4b(p, pp, q, ell as i64, a, b, c, d, ctx));
                }
            }
        }
        SquareWeightBlock { ell, entries }
    }

    pub fn get(&self, alpha: usize, beta: usize, delta: usize) -> Option<C64> {
        self.entries.get(&(alpha, beta, delta)).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (RootOfUnity, RapidityPoint, RapidityPoint, RapidityPoint) {
        let ctx = RootOfUnity::new(3).unwrap();
        let m = CurveModuli::from_kprime(C64::new(0.6, 0.0)).unwrap();
        let p = make_point(m, C64::new(0.7, 0.3), 0, 0, &ctx).unwrap();
        let pp = make_point(m, C64::new(1.3, -0.4), 1, 2, &ctx).unwrap();
        let q = make_point(m, C64::new(0.5, 0.9), 2, 1, &ctx).unwrap();
        (ctx, p, pp, q)
    }

    #[test]
    fn simple_point() {
        let ctx = RootOfUnity::new(3).unwrap();
        let m = CurveModuli::from_kprime(C64::new(0.6, 0.0)).unwrap();
        let p = make_point(m, C64::new(1.0, 0.0), 0, 0, &ctx).unwrap();
        assert!((p.y - C64::new(0.5f64.powf(1.0 / 3.0), 0.0)).norm() < 1e-14);
        let p1 = make_point(m, C64::new(1.0, 0.0), 0, 1, &ctx).unwrap();
        assert!((p1.y - p.y * ctx.omega).norm() < 1e-14);
        assert!(p.on_curve(&ctx));
    }

    #[test]
    fn branch_point_signalled() {
        let ctx = RootOfUnity::new(3).unwrap();
        let m = CurveModuli::from_kprime(C64::new(0.5, 0.0)).unwrap();
        let mu = C64::new(2.0f64.powf(1.0 / 3.0), 0.0);
        assert!(matches!(make_point(m, mu, 0, 0, &ctx), Err(CsosError::Pole(_))));
    }

    #[test]
    fn related_point_on_curve() {
        let (ctx, _, _, q) = setup();
        for l in 0..3 {
            let r = related_point(&q, l, &ctx);
            assert!(r.on_curve(&ctx));
            assert!((r.mu * q.mu - 1.0).norm() < 1e-14);
        }
    }

    #[test]
    fn unit_weights_at_equal_rapidity() {
        let (ctx, p, _, _) = setup();
        for n in 0..6 {
            assert!((weight_w(&p, &p, n, &ctx).unwrap() - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn triangular_and_factorized() {
        let (ctx, p, pp, q) = setup();
        for l in 1..3i64 {
            let [tri, up, low, dual] = square_decomposition_residuals(&p, &pp, &q, l, &ctx).unwrap();
            assert!(tri < 1e-9, "tri {tri}");
            assert!(up < 1e-9, "upper {up}");
            assert!(low < 1e-9, "lower {low}");
            assert!(dual < 1e-10, "dual {dual}");
        }
    }

    #[test]
    fn f_vanishes_beyond_block() {
        let (ctx, p, _, q) = setup();
        for l in 1..=3 {
            for al in 0..l {
                for m in l..6 {
                    assert!(f_pq(&p, &q, l, al, m, &ctx).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn point_with_unit_t() {
        let ctx = RootOfUnity::new(3).unwrap();
        let m = CurveModuli::from_kprime(C64::new(0.4, 0.0)).unwrap();
        let p = point_with_t(m, C64::new(1.0, 0.0), 0, &ctx).unwrap();
        assert!((p.t - 1.0).norm() < 1e-10);
        assert!(p.on_curve(&ctx));
    }
}
