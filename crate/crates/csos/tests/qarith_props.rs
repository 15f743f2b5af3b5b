use csos::qarith::*;
use csos::C64;
use proptest::prelude::*;

fn cplx() -> impl Strategy<Value = C64> {
    (-1.5f64..1.5, -1.5f64..1.5).prop_map(|(a, b)| C64::new(a, b))
}

fn scale(a: C64, b: C64) -> f64 {
    a.norm().max(b.norm()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn concatenation(n in 2usize..7, a in 0i64..14, b in 0i64..14, x in cplx()) {
        prop_assume!(a <= 2 * n as i64 && b <= 2 * n as i64);
        let ctx = RootOfUnity::new(n).unwrap();
        let l = pochhammer(x, a, &ctx).unwrap() * pochhammer(ctx.w(a) * x, b, &ctx).unwrap();
        let r = pochhammer(x, a + b, &ctx).unwrap();
        prop_assert!((l - r).norm() < 1e-12 * scale(l, r));
    }

    #[test]
    fn flip(n in 2usize..7, x in cplx()) {
        let ctx = RootOfUnity::new(n).unwrap();
        let l = pochhammer(x, n as i64, &ctx).unwrap();
        let r = C64::new(1.0, 0.0) - x.powi(n as i32);
        prop_assert!((l - r).norm() < 1e-12 * scale(l, r));
    }

    #[test]
    fn reversal(n in 2usize..7, k in 0i64..7, x in cplx()) {
        prop_assume!(x.norm() > 0.2);
        let ctx = RootOfUnity::new(n).unwrap();
        let l = pochhammer(x, k, &ctx).unwrap();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let r = sign * ctx.w(k * (k - 1) / 2) * x.powi(k as i32)
            * pochhammer(ctx.w(1 - k) / x, k, &ctx).unwrap();
        prop_assert!((l - r).norm() < 1e-12 * scale(l, r));
    }

    #[test]
    fn phi_index_swap(n in 2usize..7, ell in 1i64..7, a in 0i64..6, m in 0i64..6, y in cplx()) {
        prop_assume!(ell <= n as i64 && a < ell && m < ell);
        let ctx = RootOfUnity::new(n).unwrap();
        let (l, r) = phi_swap_sides(y, ell, m, a, &ctx);
        prop_assert!((l - r).norm() < 1e-10 * scale(l, r));
    }

    #[test]
    fn bbp_identity(n in 2usize..7, ell in 1i64..7, m in 0i64..6, b in 0i64..6, t in cplx()) {
        prop_assume!(ell <= n as i64 && m < ell && b < ell);
        let ctx = RootOfUnity::new(n).unwrap();
        let (l, r) = bbp_sides(t, ell, m, b, &ctx);
        prop_assert!((l - r).norm() < 1e-10 * scale(l, r));
    }

    #[test]
    fn transformation_in_bbp_shape(n in 2usize..7, ell in 1i64..7, m in 0i64..6, b in 0i64..6, t in cplx()) {
        prop_assume!(ell <= n as i64 && m < ell && b < ell);
        let ctx = RootOfUnity::new(n).unwrap();
        // skip parameter sets where a denominator vanishes before termination
        if let Ok((l, r)) = transformation_sides(m + 1, ell - b, 1 + m - b, t, &ctx) {
            prop_assert!((l - r).norm() < 1e-10 * scale(l, r));
        }
    }

    #[test]
    fn phi_vanishing(n in 2usize..7, ell in 1i64..7, a in 0i64..6, k in 0i64..6, y in cplx()) {
        prop_assume!(ell <= n as i64 && a < ell);
        let ctx = RootOfUnity::new(n).unwrap();
        let v = phi(C64::new(1.0, 0.0), ctx.w(a) * y, a, ell - a - 1, ell + k, &ctx);
        prop_assert!(v.norm() < 1e-12);
    }

    #[test]
    fn phi_paths_agree(n in 2usize..7, a in 0i64..6, b in 0i64..6, k in 0i64..12, x in cplx(), y in cplx()) {
        prop_assume!(a < n as i64 && b < n as i64);
        let ctx = RootOfUnity::new(n).unwrap();
        let p = phi(x, y, a, b, k, &ctx);
        let q = phi_by_expansion(x, y, a, b, k, &ctx);
        prop_assert!((p - q).norm() < 1e-12 * scale(p, q));
    }

    #[test]
    fn hypergeometric_form(n in 2usize..7, a in 0i64..6, b in 0i64..6, k in 0i64..6, x in cplx(), y in cplx()) {
        prop_assume!(a < n as i64 && b < n as i64 && k <= b && y.norm() > 0.2);
        let ctx = RootOfUnity::new(n).unwrap();
        let p = phi(x, y, a, b, k, &ctx);
        let h = phi_via_hypergeometric(x, y, a, b, k, &ctx).unwrap();
        prop_assert!((p - h).norm() < 1e-10 * scale(p, h));
    }

    #[test]
    fn q_integer_period(n in 2usize..7, k in -20i64..20) {
        let ctx = RootOfUnity::new(n).unwrap();
        let a = q_integer(&ctx, k);
        let b = q_integer(&ctx, k + n as i64);
        prop_assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn deformed_square_root(n in 2usize..7, e in 0.0f64..0.5) {
        let ctx = RootOfUnity::deformed(n, e).unwrap();
        prop_assert!((ctx.q_eps * ctx.q_eps - ctx.omega_eps).norm() < 1e-14);
        prop_assert!((ctx.qp(2) - ctx.w(1)).norm() < 1e-14);
        prop_assert!((ctx.qh(2) - ctx.qp(1)).norm() < 1e-14);
    }
}

#[test]
fn primitivity() {
    for n in 2..=6 {
        let ctx = RootOfUnity::new(n).unwrap();
        assert!((ctx.omega.powi(n as i32) - 1.0).norm() < 1e-14);
        for k in 1..n as i64 {
            assert!((ctx.w(k) - 1.0).norm() > 1e-3);
        }
    }
    assert!(RootOfUnity::new(1).is_err());
}
