use csos::curveweights::CurveModuli;
use csos::linalg::seeded_rng;
use csos::qarith::RootOfUnity;
use csos::spectrum::{analyze_sector, degeneracy_report, m_e, random_curve_points, Verdict};
use csos::transfer::{extract_coefficients, EdgeBasis};
use csos::C64;

fn report(n: usize, j: usize, l: usize) -> csos::spectrum::DegeneracyReport {
    let ctx = RootOfUnity::new(n).unwrap();
    let b = EdgeBasis::new(l, j, n).unwrap();
    let m = extract_coefficients(&b, &ctx).unwrap();
    let moduli = CurveModuli::from_kprime(C64::new(0.6, 0.0)).unwrap();
    let pts = random_curve_points(&mut seeded_rng(3, 9), moduli, 6, &ctx);
    let qs: Vec<usize> = (0..n).collect();
    degeneracy_report(&m, &b, &ctx, &qs, &[0], moduli, &pts).unwrap()
}

#[test]
fn multiplicity_is_two_to_m_e() {
    for (n, j, l) in [(3, 2, 3), (3, 3, 3), (4, 2, 4)] {
        let r = report(n, j, l);
        assert!(r.ambiguous_sectors.is_empty());
        for e in &r.entries {
            assert_eq!(e.verdict, Verdict::Pass, "N={n} j={j} L={l} Q={} cluster {}", e.q, e.cluster);
            assert_eq!(e.multiplicity, 1 << e.m_e.unwrap());
        }
    }
}

#[test]
fn solutions_close_and_phases_match() {
    let (n, j, l) = (4, 2, 4);
    let ctx = RootOfUnity::new(n).unwrap();
    let b = EdgeBasis::new(l, j, n).unwrap();
    let m = extract_coefficients(&b, &ctx).unwrap();
    for q in 0..n {
        let an = analyze_sector(&m, &b, &ctx, q, 0).unwrap();
        let total: usize = an.spectrum.clusters.iter().map(|c| c.multiplicity).sum();
        assert_eq!(total, an.spectrum.block.len());
        for sols in &an.solutions {
            let sols = sols.as_ref().unwrap();
            assert!(!sols.is_empty());
            for s in sols {
                assert!(s.tq_residual < 1e-8 && s.bae_residual < 1e-7 && s.reconstruction_residual < 1e-9);
                assert_eq!(s.roots.len(), s.r);
                assert_eq!((s.pa + n - s.pb) % n, ((j - 1) * l + q) % n);
                assert!(m_e(l, j, n, s.r, s.pa, s.pb) >= 0);
            }
        }
    }
}
