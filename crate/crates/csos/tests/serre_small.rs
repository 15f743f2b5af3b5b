use csos::algebra::{cyclic_order, cyclic_serre_suite, loop_serre, serre_suite, DividedPowers};
use csos::qarith::RootOfUnity;
use csos::transfer::EdgeBasis;

#[test]
fn serre_cyclic_and_loop_at_l2() {
    let (n, j, l) = (3, 2, 2);
    let ctx = RootOfUnity::new(n).unwrap();
    let dp = DividedPowers::with_schedule(l, j, n, cyclic_order(n, n - 1), (0.01, 0.004), 1e-6).unwrap();
    let basis = EdgeBasis::new(l, j, n).unwrap();
    let mut checks = serre_suite(&dp, &ctx).unwrap();
    for q in 0..n {
        checks.extend(cyclic_serre_suite(&dp, q).unwrap());
        checks.extend(loop_serre(&dp, q, Some(&basis)).unwrap());
    }
    for c in &checks {
        assert!(c.passed(), "{} {} {:?}", c.name, c.params, c.residual);
    }
}

#[test]
fn schedule_radii_must_differ() {
    assert!(DividedPowers::with_schedule(2, 2, 3, 4, (0.01, 0.01), 1e-6).is_err());
    assert!(DividedPowers::with_schedule(2, 2, 3, 4, (0.0, 0.01), 1e-6).is_err());
}
