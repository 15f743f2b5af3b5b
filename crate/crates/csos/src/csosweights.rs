//! CSOS face weights U^{(2,2)}, U^{(2,j)}, U^{(ℓ,j)} in the ratio variable t,
//! and the face-level Yang–Baxter check.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;

use crate::linalg::{circle_nodes, interpolate, poly_eval, Mat};
use crate::qarith::{phi, RootOfUnity};
use crate::{CsosError, Result};

/// Asymmetric six-vertex matrix, index 2α + n' by 2β + n.
pub fn u22(t: C64, ctx: &RootOfUnity) -> Mat {
    let one = C64::new(1.0, 0.0);
    let w = ctx.omega;
    let a = one - t / w;
    let b = one - t;
    let c = one - one / w;
    let z = C64::new(0.0, 0.0);
    Mat::from_row_slice(4, 4, &[a, z, z, z, z, b, t * c, z, z, c, b / w, z, z, z, z, a])
}

/// Face weight by aux transition (α → β) on edge n = a - b; n' = n - α + β.
pub fn u2j_edges(alpha: usize, beta: usize, n: usize, t: C64, j: usize, ctx: &RootOfUnity) -> C64 {
    let n2 = n as i64 - alpha as i64 + beta as i64;
    if alpha > 1 || beta > 1 || n >= j || n2 < 0 || n2 >= j as i64 {
        return C64::new(0.0, 0.0);
    }
    let (n, j) = (n as i64, j as i64);
    let one = C64::new(1.0, 0.0);
    match (alpha, beta) {
        (0, 0) => one - ctx.w(1 - j + n) * t,
        (0, 1) => -ctx.w(1 - j) * t * (one - ctx.w(1 + n)),
        (1, 0) => one - ctx.w(n - j),
        _ => ctx.w(1 - j) * (ctx.w(n) - t),
    }
}

/// U^{(2,j)}(a,b,c,d); spins are reduced mod N.
pub fn u2j(a: i64, b: i64, c: i64, d: i64, t: C64, j: usize, ctx: &RootOfUnity) -> C64 {
    let al = ctx.wrap(a - d);
    let be = ctx.wrap(b - c);
    let n = ctx.wrap(a - b);
    let n2 = ctx.wrap(d - c);
    if n2 as i64 != n as i64 - al as i64 + be as i64 {
        return C64::new(0.0, 0.0);
    }
    u2j_edges(al, be, n, t, j, ctx)
}

/// U^{(ℓ,j)} from (α, β, δ = d - b); no admissibility test.
pub fn ulj_raw(alpha: i64, beta: i64, delta: i64, t: C64, ell: i64, j: i64, ctx: &RootOfUnity) -> C64 {
    let one = C64::new(1.0, 0.0);
    (0..ell)
        .map(|m| {
            ctx.w((delta - j) * m)
                * phi(one, ctx.w(alpha) * t, alpha, ell - alpha - 1, m, ctx)
                * phi(one, ctx.w(m - j) * t, m, ell - 1 - m, beta, ctx)
        })
        .sum()
}

/// Face weight of the fused model on edges: aux α → β, edge n.
pub fn ulj_edges(alpha: usize, beta: usize, n: usize, t: C64, ell: usize, j: usize, ctx: &RootOfUnity) -> C64 {
    let n2 = n as i64 - alpha as i64 + beta as i64;
    if alpha >= ell || beta >= ell || n >= j || n2 < 0 || n2 >= j as i64 {
        return C64::new(0.0, 0.0);
    }
    ulj_raw(alpha as i64, beta as i64, n as i64 - alpha as i64, t, ell as i64, j as i64, ctx)
}

#[allow(clippy::too_many_arguments)]
pub fn ulj(a: i64, b: i64, c: i64, d: i64, t: C64, ell: usize, j: usize, ctx: &RootOfUnity) -> C64 {
    let al = ctx.wrap(a - d);
    let be = ctx.wrap(b - c);
    let n = ctx.wrap(a - b);
    let n2 = ctx.wrap(d - c);
    if n2 as i64 != n as i64 - al as i64 + be as i64 {
        return C64::new(0.0, 0.0);
    }
    ulj_edges(al, be, n, t, ell, j, ctx)
}

/// Weights of one fused model as polynomials in t, keyed by (α, β, δ = (d-b) mod N).
#[derive(Clone, Debug, PartialEq)]
pub struct FaceWeightTable {
    pub n: usize,
    pub ell: usize,
    pub j: usize,
    /// coefficients, lowest degree first
    pub weight: BTreeMap<(usize, usize, usize), Vec<C64>>,
}

impl FaceWeightTable {
    /// ell = 2 uses the closed forms; other ell the Φ-sum.
    pub fn new(ell: usize, j: usize, ctx: &RootOfUnity) -> Result<Self> {
        let n = ctx.n;
        if ell == 0 || ell > n || j == 0 || j > n {
            return Err(CsosError::InvalidArgument(format!("need 1 <= ell, j <= N (ell={ell}, j={j})")));
        }
        // ℓ nodes suffice for degree ℓ-1; take one spare for ell=1 safety
        let nodes = circle_nodes(ell.max(2), 1.0, 0.13);
        let mut weight = BTreeMap::new();
        for al in 0..ell {
            for be in 0..ell {
                for de in 0..n {
                    let e = (de + al) % n;
                    let f = |t: C64| {
                        if ell == 2 {
                            u2j_edges(al, be, e, t, j, ctx)
                        } else {
                            ulj_edges(al, be, e, t, ell, j, ctx)
                        }
                    };
                    let vals: Vec<C64> = nodes.iter().map(|&t| f(t)).collect();
                    if vals.iter().all(|v| v.norm() == 0.0) {
                        continue;
                    }
                    let mut p = interpolate(&nodes, &vals)?;
                    while p.len() > 1 && p.last().unwrap().norm() < 1e-13 {
                        p.pop();
                    }
                    weight.insert((al, be, de), p);
                }
            }
        }
        Ok(FaceWeightTable { n, ell, j, weight })
    }

    pub fn eval(&self, a: i64, b: i64, c: i64, d: i64, t: C64) -> C64 {
        let n = self.n as i64;
        let w = |x: i64| x.rem_euclid(n) as usize;
        let (al, be, de) = (w(a - d), w(b - c), w(d - b));
        let (e, e2) = (w(a - b), w(d - c));
        if e2 as i64 != e as i64 - al as i64 + be as i64 {
            return C64::new(0.0, 0.0);
        }
        self.weight.get(&(al, be, de)).map_or(C64::new(0.0, 0.0), |p| poly_eval(p, t))
    }

    pub fn max_degree(&self) -> usize {
        self.weight.values().map(|p| p.len().saturating_sub(1)).max().unwrap_or(0)
    }
}

/// max |LHS - RHS| over all external spins of
/// Σ_g U_r(a,g,e,f) U_q(b,c,g,a) R(c,d,e,g) = Σ_g R(b,g,f,a) U_q(g,d,e,f) U_r(b,c,d,g)
/// with R = weights_rq at t_q/t_r, U_r at t_r, U_q at t_q.
pub fn face_yang_baxter_check(
    weights_rq: &FaceWeightTable,
    weights_ppr: &FaceWeightTable,
    weights_ppq: &FaceWeightTable,
    t_r: C64,
    t_q: C64,
) -> f64 {
    let n = weights_rq.n as i64;
    let s = t_q / t_r;
    let r = |a, b, c, d| weights_rq.eval(a, b, c, d, s);
    let ur = |a, b, c, d| weights_ppr.eval(a, b, c, d, t_r);
    let uq = |a, b, c, d| weights_ppq.eval(a, b, c, d, t_q);
    let mut worst: f64 = 0.0;
    // translation invariance: fix a = 0
    let a = 0;
    for b in 0..n {
        for c in 0..n {
            for d in 0..n {
                for e in 0..n {
                    for f in 0..n {
                        let mut l = C64::new(0.0, 0.0);
                        let mut rr = C64::new(0.0, 0.0);
                        for g in 0..n {
                            l += ur(a, g, e, f) * uq(b, c, g, a) * r(c, d, e, g);
                            rr += r(b, g, f, a) * uq(g, d, e, f) * ur(b, c, d, g);
                        }
                        worst = worst.max((l - rr).norm());
                    }
                }
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn u22_zeros() {
        let ctx = RootOfUnity::new(3).unwrap();
        let m = u22(C64::new(1.0, 0.0), &ctx);
        assert!(m[(1, 1)].norm() < 1e-15);
        let m = u22(ctx.omega, &ctx);
        assert!(m[(0, 0)].norm() < 1e-15);
    }

    #[test]
    fn u22_is_u2j_at_two() {
        let ctx = RootOfUnity::new(4).unwrap();
        let t = C64::new(0.3, -0.7);
        let m = u22(t, &ctx);
        for al in 0..2 {
            for be in 0..2 {
                for n in 0..2usize {
                    let n2 = n as i64 - al as i64 + be as i64;
                    if !(0..2).contains(&n2) {
                        continue;
                    }
                    let u = u2j_edges(al, be, n, t, 2, &ctx);
                    assert!((m[(2 * al + n2 as usize, 2 * be + n)] - u).norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn closed_form_cases() {
        let ctx = RootOfUnity::new(5).unwrap();
        let t = C64::new(0.2, 0.4);
        let j = 3;
        assert!((u2j(2, 2, 2, 2, t, j, &ctx) - (1.0 - ctx.w(1 - 3) * t)).norm() < 1e-15);
        // U(a,b,b-1,a) at a-b = j-1 lies outside its range
        assert_eq!(u2j(4, 2, 1, 4, t, j, &ctx), C64::new(0.0, 0.0));
        // U(a,b,b-1,a-1) vanishes at t = ω^{a-b}
        assert!(u2j(3, 2, 1, 2, ctx.omega, j, &ctx).norm() < 1e-15);
    }

    #[test]
    fn fused_two_equals_closed_form() {
        let ctx = RootOfUnity::new(4).unwrap();
        let t = C64::new(-0.4, 0.6);
        for j in 2..=4 {
            for al in 0..2 {
                for be in 0..2 {
                    for n in 0..j {
                        let x = ulj_edges(al, be, n, t, 2, j, &ctx);
                        let y = u2j_edges(al, be, n, t, j, &ctx);
                        assert!((x - y).norm() < 1e-12, "j={j} {al}{be}{n}: {x} vs {y}");
                    }
                }
            }
        }
    }

    #[test]
    fn degree_bound() {
        let ctx = RootOfUnity::new(4).unwrap();
        for ell in 1..=4 {
            let tab = FaceWeightTable::new(ell, 3, &ctx).unwrap();
            assert!(tab.max_degree() <= ell.max(2) - 1);
            for (&(al, be, _), _) in &tab.weight {
                assert!(al < ell && be < ell);
            }
        }
    }

    #[test]
    fn yang_baxter_small() {
        for (n, j) in [(3, 2), (4, 3)] {
            let ctx = RootOfUnity::new(n).unwrap();
            let r = FaceWeightTable::new(2, 2, &ctx).unwrap();
            let u = FaceWeightTable::new(2, j, &ctx).unwrap();
            let res = face_yang_baxter_check(&r, &u, &u, C64::new(0.3, 0.2), C64::new(-0.4, 0.9));
            assert!(res < 1e-10, "N={n} j={j}: {res}");
            let res = face_yang_baxter_check(&r, &u, &u, C64::new(0.3, 0.2), C64::new(0.3, 0.2));
            assert!(res < 1e-12);
        }
    }
}
