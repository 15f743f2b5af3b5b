//! Root-of-unity scalar arithmetic: q-integers, Gaussian binomials,
//! ω-Pochhammer symbols, the Φ coefficients and terminating ₂Φ₁.
//!
//! Every function takes a [`RootOfUnity`]; with `eps != 0` all of them are
//! evaluated at the deformed root ω_eps, so callers can take limits.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{CsosError, Result};

const ONE: C64 = C64 { re: 1.0, im: 0.0 };
const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// ω = e^{2πi/N}, q = e^{πi/N} and their deformations ω·e^{eps}, q·e^{eps/2}.
///
/// `eps` is complex so that divided powers can be averaged on a circle around 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RootOfUnity {
    pub n: usize,
    pub omega: C64,
    pub q: C64,
    pub eps: C64,
    pub omega_eps: C64,
    pub q_eps: C64,
}

impl RootOfUnity {
    pub fn new(n: usize) -> Result<Self> {
        Self::deformed_complex(n, ZERO)
    }

    pub fn deformed(n: usize, eps: f64) -> Result<Self> {
        if eps < 0.0 {
            return Err(CsosError::InvalidArgument("eps must be nonnegative".into()));
        }
        Self::deformed_complex(n, C64::new(eps, 0.0))
    }

    pub fn deformed_complex(n: usize, eps: C64) -> Result<Self> {
        if n < 2 {
            return Err(CsosError::InvalidArgument(format!("N = {n} < 2")));
        }
        let omega = C64::from_polar(1.0, 2.0 * PI / n as f64);
        let q = C64::from_polar(1.0, PI / n as f64);
        Ok(RootOfUnity { n, omega, q, eps, omega_eps: omega * eps.exp(), q_eps: q * (eps / 2.0).exp() })
    }

    pub fn is_deformed(&self) -> bool {
        self.eps != ZERO
    }

    /// The same N at a different deformation.
    pub fn with_eps(&self, eps: C64) -> Self {
        Self::deformed_complex(self.n, eps).expect("N already validated")
    }

    /// ω_eps^k, with the angle reduced mod 2π so that ω^N = 1 holds to rounding.
    pub fn w(&self, k: i64) -> C64 {
        let r = k.rem_euclid(self.n as i64) as f64;
        C64::from_polar(1.0, 2.0 * PI * r / self.n as f64) * (self.eps * k as f64).exp()
    }

    /// q_eps^k.
    pub fn qp(&self, k: i64) -> C64 {
        let m = 2 * self.n as i64;
        let r = k.rem_euclid(m) as f64;
        C64::from_polar(1.0, PI * r / self.n as f64) * (self.eps * (k as f64 / 2.0)).exp()
    }

    /// q_eps^{k/2}, with q^{1/2} = e^{iπ/(2N)}.
    pub fn qh(&self, k: i64) -> C64 {
        let m = 4 * self.n as i64;
        let r = k.rem_euclid(m) as f64;
        C64::from_polar(1.0, PI * r / (2.0 * self.n as f64)) * (self.eps * (k as f64 / 4.0)).exp()
    }

    /// Reduce an index into [0, N-1].
    pub fn wrap(&self, a: i64) -> usize {
        a.rem_euclid(self.n as i64) as usize
    }
}

/// [n] = (1 - ω^n)/(1 - ω).
pub fn q_integer(ctx: &RootOfUnity, n: i64) -> C64 {
    (ONE - ctx.w(n)) / (ONE - ctx.w(1))
}

/// [n]_q = (q^n - q^{-n})/(q - q^{-1}).
pub fn sym_q_integer(ctx: &RootOfUnity, n: i64) -> C64 {
    (ctx.qp(n) - ctx.qp(-n)) / (ctx.qp(1) - ctx.qp(-1))
}

/// ([n]!, [n]_q!).
pub fn q_factorials(ctx: &RootOfUnity, n: usize) -> (C64, C64) {
    let mut b = ONE;
    let mut s = ONE;
    for k in 1..=n as i64 {
        b *= q_integer(ctx, k);
        s *= sym_q_integer(ctx, k);
    }
    (b, s)
}

/// Gaussian ω-binomial [n, k] = (ω^{1+n-k}; ω)_k / (ω; ω)_k, for k < N or deformed ω.
pub fn omega_binomial(ctx: &RootOfUnity, n: i64, k: i64) -> C64 {
    if k < 0 || k > n {
        return ZERO;
    }
    let mut r = ONE;
    for i in 0..k {
        r *= (ONE - ctx.w(1 + n - k + i)) / (ONE - ctx.w(1 + i));
    }
    r
}

fn binomial_u(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

/// Symmetric q-binomial [n choose k]_q.
///
/// Undeformed: q-Lucas reduction, [aN+p choose bN+r]_q = q^{-k(n-k)} C(a,b) [p, r]_ω,
/// so no 0/0 is ever formed. Deformed: direct product of q-integers.
pub fn gauss_binomial(ctx: &RootOfUnity, n: usize, k: usize) -> Result<C64> {
    if k > n {
        return Err(CsosError::InvalidArgument(format!("k = {k} > n = {n}")));
    }
    if ctx.is_deformed() {
        let mut r = ONE;
        for i in 1..=k as i64 {
            r *= sym_q_integer(ctx, n as i64 - k as i64 + i) / sym_q_integer(ctx, i);
        }
        return Ok(r);
    }
    let nn = ctx.n;
    let (a, p) = (n / nn, n % nn);
    let (b, r) = (k / nn, k % nn);
    if r > p {
        return Ok(ZERO);
    }
    let kk = k as i64;
    let lucas = binomial_u(a as u64, b as u64) * omega_binomial(ctx, p as i64, r as i64);
    Ok(ctx.qp(-kk * (n as i64 - kk)) * lucas)
}

/// ω-Pochhammer (x; ω)_n, with (x; ω)_{-n} = 1/(ω^{-n} x; ω)_n.
pub fn pochhammer(x: C64, n: i64, ctx: &RootOfUnity) -> Result<C64> {
    if n >= 0 {
        let mut r = ONE;
        for m in 0..n {
            r *= ONE - x * ctx.w(m);
        }
        return Ok(r);
    }
    let d = pochhammer(ctx.w(n) * x, -n, ctx)?;
    if d.norm() < 1e-13 {
        return Err(CsosError::Singular(format!("(x; ω)_{n}")));
    }
    Ok(ONE / d)
}

fn poch(x: C64, n: i64, ctx: &RootOfUnity) -> C64 {
    pochhammer(x, n, ctx).expect("nonnegative order")
}

fn wrap_logged(ctx: &RootOfUnity, a: i64, name: &str) -> i64 {
    if a < 0 || a >= ctx.n as i64 {
        let r = ctx.wrap(a) as i64;
        log::debug!("Φ index {name}={a} reduced mod {} to {r}", ctx.n);
        r
    } else {
        a
    }
}

/// Φ(x,y)_n^{α,β}: coefficient of u^n in (ωux; ω)_α (ωuy; ω)_β, by the closed double sum.
///
/// α, β outside [0, N-1] are reduced mod N.
pub fn phi(x: C64, y: C64, alpha: i64, beta: i64, n: i64, ctx: &RootOfUnity) -> C64 {
    let alpha = wrap_logged(ctx, alpha, "alpha");
    let beta = wrap_logged(ctx, beta, "beta");
    if n < 0 || n > alpha + beta {
        return ZERO;
    }
    let sign = if n % 2 == 0 { ONE } else { -ONE };
    let pre = sign * ctx.w(n * (n + 1) / 2);
    let mut s = ZERO;
    for k in 0..=n {
        if k > alpha || n - k > beta {
            continue;
        }
        s += omega_binomial(ctx, alpha, k)
            * omega_binomial(ctx, beta, n - k)
            * ctx.w(k * (k - n))
            * x.powi(k as i32)
            * y.powi((n - k) as i32);
    }
    pre * s
}

/// Φ by expanding the generating product and reading off the u^n coefficient.
pub fn phi_by_expansion(x: C64, y: C64, alpha: i64, beta: i64, n: i64, ctx: &RootOfUnity) -> C64 {
    let alpha = wrap_logged(ctx, alpha, "alpha");
    let beta = wrap_logged(ctx, beta, "beta");
    let mut p = vec![ONE];
    let mut push = |z: C64| {
        let mut q = vec![ZERO; p.len() + 1];
        for (i, &a) in p.iter().enumerate() {
            q[i] += a;
            q[i + 1] -= a * z;
        }
        p = q;
    };
    for m in 1..=alpha {
        push(x * ctx.w(m));
    }
    for m in 1..=beta {
        push(y * ctx.w(m));
    }
    if n < 0 {
        return ZERO;
    }
    p.get(n as usize).copied().unwrap_or(ZERO)
}

/// Terminating ₂Φ₁(a, b; c; z) = Σ_k (a;ω)_k (b;ω)_k / ((c;ω)_k (ω;ω)_k) z^k.
///
/// The sum stops at the first vanishing numerator factor; reaching `terms`
/// first is an error, as is a vanishing denominator before termination.
pub fn hyp2phi1(a: C64, b: C64, c: C64, z: C64, terms: usize, ctx: &RootOfUnity) -> Result<C64> {
    const HIT: f64 = 1e-12;
    let mut sum = ONE;
    let mut term = ONE;
    for k in 0..terms as i64 {
        let na = ONE - a * ctx.w(k);
        let nb = ONE - b * ctx.w(k);
        if na.norm() < HIT || nb.norm() < HIT {
            return Ok(sum);
        }
        let dc = ONE - c * ctx.w(k);
        let dq = ONE - ctx.w(k + 1);
        if dc.norm() < HIT || dq.norm() < HIT {
            return Err(CsosError::Singular(format!("₂Φ₁ denominator at k={k}")));
        }
        term *= na * nb / (dc * dq) * z;
        sum += term;
    }
    if z.norm() == 0.0 {
        return Ok(ONE);
    }
    Err(CsosError::NonTerminating(format!("no vanishing numerator within {terms} terms")))
}

/// Right side of the hypergeometric form of Φ:
/// (-1)^n ω^{n(n+1)/2} (ω^{1+β-n};ω)_n y^n/(ω;ω)_n · ₂Φ₁(ω^{-n}, ω^{-α}; ω^{1+β-n}; xω^{α+1}/y).
pub fn phi_via_hypergeometric(x: C64, y: C64, alpha: i64, beta: i64, n: i64, ctx: &RootOfUnity) -> Result<C64> {
    let sign = if n % 2 == 0 { ONE } else { -ONE };
    let pre = sign * ctx.w(n * (n + 1) / 2) * poch(ctx.w(1 + beta - n), n, ctx) * y.powi(n as i32)
        / poch(ctx.w(1), n, ctx);
    let h = hyp2phi1(ctx.w(-n), ctx.w(-alpha), ctx.w(1 + beta - n), x * ctx.w(alpha + 1) / y, n as usize + 2, ctx)?;
    Ok(pre * h)
}

/// Both sides of the Φ index-swap identity:
/// Φ(1, ω^n y)_α^{n,ℓ-n-1} vs (ω^ℓ y)^{α-n} (ω^{1+α};ω)_{N-ℓ}/(ω^{1+n};ω)_{N-ℓ} Φ(1, ω^α y)_n^{α,ℓ-α-1}.
pub fn phi_swap_sides(y: C64, ell: i64, n: i64, alpha: i64, ctx: &RootOfUnity) -> (C64, C64) {
    let nn = ctx.n as i64;
    let lhs = phi(ONE, ctx.w(n) * y, n, ell - n - 1, alpha, ctx);
    let rhs = (ctx.w(ell) * y).powi((alpha - n) as i32) * poch(ctx.w(1 + alpha), nn - ell, ctx)
        / poch(ctx.w(1 + n), nn - ell, ctx)
        * phi(ONE, ctx.w(alpha) * y, alpha, ell - alpha - 1, n, ctx);
    (lhs, rhs)
}

/// Both sides of Φ(1, ω^{ℓ-β-1}t)_{N-m-1}^{N-β-1, N+β-ℓ} = (ω^ℓ t;ω)_{N-ℓ} Φ(1, ω^m t)_β^{m, ℓ-1-m}.
pub fn bbp_sides(t: C64, ell: i64, m: i64, beta: i64, ctx: &RootOfUnity) -> (C64, C64) {
    let nn = ctx.n as i64;
    let lhs = phi(ONE, ctx.w(ell - beta - 1) * t, nn - beta - 1, nn + beta - ell, nn - m - 1, ctx);
    let rhs = poch(ctx.w(ell) * t, nn - ell, ctx) * phi(ONE, ctx.w(m) * t, m, ell - 1 - m, beta, ctx);
    (lhs, rhs)
}

/// Both sides of the root-of-unity ₂Φ₁ transformation with integer exponents (α, β, γ):
/// ₂Φ₁(ω^α, ω^β; ω^γ; t) = (ω^{α+β-γ}t;ω)_{N-α-β+γ} ₂Φ₁(ω^{γ-α}, ω^{γ-β}; ω^γ; ω^{α+β-γ}t).
pub fn transformation_sides(alpha: i64, beta: i64, gamma: i64, t: C64, ctx: &RootOfUnity) -> Result<(C64, C64)> {
    let nn = ctx.n as i64;
    let cap = 2 * ctx.n + 2;
    let lhs = hyp2phi1(ctx.w(alpha), ctx.w(beta), ctx.w(gamma), t, cap, ctx)?;
    let s = ctx.w(alpha + beta - gamma) * t;
    let rhs = pochhammer(s, nn - alpha - beta + gamma, ctx)?
        * hyp2phi1(ctx.w(gamma - alpha), ctx.w(gamma - beta), ctx.w(gamma), s, cap, ctx)?;
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn q_integer_examples() {
        let ctx = RootOfUnity::new(3).unwrap();
        assert!(q_integer(&ctx, 3).norm() < 1e-15);
        assert!(close(q_integer(&ctx, 1), ONE, 1e-15));
        // (1-ω²)/(1-ω) = 1 + ω
        assert!(close(q_integer(&ctx, 2), ONE + ctx.omega, 1e-14));
        assert!(close(q_integer(&ctx, 5), q_integer(&ctx, 2), 1e-14));
    }

    #[test]
    fn factorial_examples() {
        let ctx = RootOfUnity::new(3).unwrap();
        assert_eq!(q_factorials(&ctx, 0), (ONE, ONE));
        let (b3, s3) = q_factorials(&ctx, 3);
        assert!(b3.norm() < 1e-14 && s3.norm() < 1e-14);
        let (b2, s2) = q_factorials(&ctx, 2);
        assert!(close(b2, ONE + ctx.omega, 1e-14));
        assert!(close(s2, ctx.q + ONE / ctx.q, 1e-14));
        assert!(close(b2, ctx.q * s2, 1e-14));
    }

    #[test]
    fn factorial_relation_deformed() {
        let ctx = RootOfUnity::deformed(5, 0.01).unwrap();
        for n in 0..9 {
            let (b, s) = q_factorials(&ctx, n);
            let n = n as i64;
            assert!(close(b, ctx.qp(n * (n - 1) / 2) * s, 1e-12 * b.norm().max(1.0)));
        }
    }

    #[test]
    fn binomial_examples() {
        let ctx = RootOfUnity::new(3).unwrap();
        assert!(close(gauss_binomial(&ctx, 7, 0).unwrap(), ONE, 1e-15));
        assert!(close(gauss_binomial(&ctx, 4, 1).unwrap(), -ONE, 1e-14));
        assert!(gauss_binomial(&ctx, 3, 1).unwrap().norm() < 1e-14);
        assert!(gauss_binomial(&ctx, 1, 2).is_err());
    }

    #[test]
    fn binomial_matches_deformed_limit() {
        // away from the 0/0 cases the cyclic rule must agree with the plain product
        let ctx = RootOfUnity::new(4).unwrap();
        let d = RootOfUnity::deformed(4, 1e-9).unwrap();
        for n in 0..11 {
            for k in 0..=n {
                let lucas = gauss_binomial(&ctx, n, k).unwrap();
                let near = gauss_binomial(&d, n, k).unwrap();
                assert!((lucas - near).norm() < 1e-6, "n={n} k={k} {lucas} {near}");
            }
        }
    }

    #[test]
    fn pochhammer_examples() {
        let ctx = RootOfUnity::new(3).unwrap();
        let two = C64::new(2.0, 0.0);
        assert_eq!(pochhammer(two, 0, &ctx).unwrap(), ONE);
        assert!(close(pochhammer(two, 3, &ctx).unwrap(), C64::new(-7.0, 0.0), 1e-13));
        let h = C64::new(0.5, 0.0);
        let want = ONE / (ONE - h / ctx.omega);
        assert!(close(pochhammer(h, -1, &ctx).unwrap(), want, 1e-14));
        // (x;ω)_{-1} with ω^{-1}x = 1
        assert!(pochhammer(ctx.omega, -1, &ctx).is_err());
    }

    #[test]
    fn phi_small_cases() {
        let ctx = RootOfUnity::new(3).unwrap();
        let y = ctx.omega * 0.3;
        assert_eq!(phi(ONE, y, 1, 0, 0, &ctx), ONE);
        assert_eq!(phi(ONE, y, 1, 0, 2, &ctx), ZERO);
        // (1 - ω u)(generating side with β=0): coefficient of u is -ω
        assert!(close(phi(ONE, y, 1, 0, 1, &ctx), -ctx.omega, 1e-14));
    }

    #[test]
    fn phi_two_paths() {
        let ctx = RootOfUnity::new(5).unwrap();
        let x = C64::new(0.3, -1.1);
        let y = C64::new(-0.7, 0.4);
        for a in 0..5 {
            for b in 0..5 {
                for n in 0..=(a + b) {
                    let p = phi(x, y, a, b, n, &ctx);
                    let q = phi_by_expansion(x, y, a, b, n, &ctx);
                    assert!(close(p, q, 1e-12), "{a} {b} {n}");
                }
            }
        }
    }

    #[test]
    fn hyp_basic() {
        let ctx = RootOfUnity::new(3).unwrap();
        assert_eq!(hyp2phi1(ctx.w(-2), ONE, ONE * 0.5, ZERO, 5, &ctx).unwrap(), ONE);
        assert_eq!(hyp2phi1(ONE, ctx.w(1), ONE * 0.5, ONE * 0.7, 5, &ctx).unwrap(), ONE);
        assert!(hyp2phi1(ONE * 0.5, ONE * 0.25, ONE * 0.1, ONE * 0.3, 4, &ctx).is_err());
        // n=2, α=1, N=3: the hypergeometric form of Φ requires n ≤ β
        let x = C64::new(0.4, 0.2);
        let y = C64::new(-0.3, 0.9);
        let want = phi(x, y, 1, 2, 2, &ctx);
        let got = phi_via_hypergeometric(x, y, 1, 2, 2, &ctx).unwrap();
        assert!(close(want, got, 1e-12));
    }
}
