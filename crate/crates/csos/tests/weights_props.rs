use csos::csosweights::{face_yang_baxter_check, u2j_edges, ulj_edges, FaceWeightTable};
use csos::curveweights::{make_point, related_point, weight_w, CurveModuli};
use csos::qarith::RootOfUnity;
use csos::C64;
use proptest::prelude::*;

fn cplx(lo: f64, hi: f64) -> impl Strategy<Value = C64> {
    (lo..hi, 0.0..std::f64::consts::TAU).prop_map(|(r, th)| C64::from_polar(r, th))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn face_yang_baxter(nj in prop::sample::select(vec![(3usize, 2usize), (3, 3), (4, 2), (4, 4)]),
                        tr in cplx(0.3, 1.6), tq in cplx(0.3, 1.6)) {
        let (n, j) = nj;
        let ctx = RootOfUnity::new(n).unwrap();
        let r = FaceWeightTable::new(2, 2, &ctx).unwrap();
        let u = FaceWeightTable::new(2, j, &ctx).unwrap();
        let abs = face_yang_baxter_check(&r, &u, &u, tr, tq);
        let scale = n as f64 * (1.0 + tr.norm()) * (1.0 + tq.norm()) * (1.0 + (tq / tr).norm());
        prop_assert!(abs < 1e-12 * scale, "{abs}");
    }

    #[test]
    fn fused_two_is_closed_form(n in 3usize..6, j in 2usize..6, t in cplx(0.1, 2.0)) {
        prop_assume!(j <= n);
        let ctx = RootOfUnity::new(n).unwrap();
        for al in 0..2 {
            for be in 0..2 {
                for k in 0..j {
                    let a = ulj_edges(al, be, k, t, 2, j, &ctx);
                    let b = u2j_edges(al, be, k, t, j, &ctx);
                    prop_assert!((a - b).norm() < 1e-12 * a.norm().max(1.0));
                }
            }
        }
    }

    #[test]
    fn points_stay_on_curve(n in 3usize..6, mu in cplx(0.5, 1.7), kp in 0.2f64..0.9, bx in 0i64..6, by in 0i64..6, shift in 0i64..6) {
        let ctx = RootOfUnity::new(n).unwrap();
        let moduli = CurveModuli::from_kprime(C64::new(kp, 0.0)).unwrap();
        if let Ok(p) = make_point(moduli, mu, bx, by, &ctx) {
            prop_assert!(p.on_curve(&ctx));
            prop_assert!((p.t - p.x * p.y).norm() < 1e-12 * p.t.norm().max(1.0));
            let q = related_point(&p, shift, &ctx);
            prop_assert!(q.on_curve(&ctx));
        }
    }

    #[test]
    fn w_is_unit_at_equal_rapidity(n in 3usize..6, mu in cplx(0.5, 1.7), k in -6i64..6) {
        let ctx = RootOfUnity::new(n).unwrap();
        let moduli = CurveModuli::from_kprime(C64::new(0.6, 0.0)).unwrap();
        if let Ok(p) = make_point(moduli, mu, 0, 0, &ctx) {
            prop_assert!((weight_w(&p, &p, k, &ctx).unwrap() - 1.0).norm() < 1e-10);
        }
    }
}
