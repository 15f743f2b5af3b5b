//! Suite runners: each turns library checks into report entries.

use std::sync::OnceLock;
use std::time::Instant;

use csos::algebra::{
    appendix_c_suite, closed_form_check, cyclic_order, cyclic_serre_suite,
    degeneracy_commutator_check, exchange_identities_check, explicit_generator_check, loop_serre, serre_suite,
    uq_sl2_check, DividedPowers, GeneratorSet,
};
use csos::check::{Check, TOL_EXACT};
use csos::csosweights::{face_yang_baxter_check, u22, u2j_edges, ulj_edges, FaceWeightTable};
use csos::curveweights::{make_point, square_decomposition_residuals, CurveModuli, RapidityPoint};
use csos::linalg::{random_point, residual_of, seeded_rng, Residual};
use csos::qarith::{
    bbp_sides, phi, phi_by_expansion, phi_swap_sides, phi_via_hypergeometric, transformation_sides, RootOfUnity,
};
use csos::spectrum::{
    analyze_sector, bethe_vector_suite, curve_transfer_formulas, degeneracy_report, drinfeld, random_curve_points,
    tau_formula_vector_check, BetheSolution, DegeneracyReport, Verdict, VectorKind,
};
use csos::transfer::{extract_coefficients, funtt_sides, monodromy_yang_baxter, EdgeBasis, Monodromy2, SpinBasis};
use csos::{CsosError, C64};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::config::{ExperimentConfig, Suite};
use crate::registry;
use crate::report::{Entry, LedgerRow, Outcome, Status, SuiteReport};

/// Identities known to fail as printed; they are reported but never fail a run.
const KNOWN_MISPRINTS: &[&str] = &["ADBC1"];

const QARITH_DRAWS: usize = 500;
const YBE_PAIRS: usize = 100;
const FUNTT_DRAWS: usize = 5;
const CURVE_POINTS: usize = 10;
const BETHE_VECTOR_TOL: f64 = 1e-8;
const TAULJT_TOL: f64 = 1e-8;
const CLUSTER_TOL: f64 = 1e-8;
const TQ_TOL: f64 = 1e-8;
const BAE_TOL: f64 = 1e-7;
const RECONSTRUCTION_TOL: f64 = 1e-9;

type Res<T> = std::result::Result<T, CsosError>;

fn lazy<T>(cell: &OnceLock<Result<T, String>>, f: impl FnOnce() -> Res<T>) -> Res<&T> {
    cell.get_or_init(|| f().map_err(|e| e.to_string()))
        .as_ref()
        .map_err(|e| CsosError::InvalidArgument(e.clone()))
}

/// Objects shared between suites, built on first use.
pub struct Shared<'a> {
    pub cfg: &'a ExperimentConfig,
    pub ctx: RootOfUnity,
    basis: OnceLock<Result<EdgeBasis, String>>,
    mono: OnceLock<Result<Monodromy2, String>>,
    dp: OnceLock<Result<DividedPowers, String>>,
    degeneracy: OnceLock<Result<DegeneracyReport, String>>,
}

impl<'a> Shared<'a> {
    pub fn new(cfg: &'a ExperimentConfig) -> Res<Self> {
        Ok(Shared {
            cfg,
            ctx: RootOfUnity::new(cfg.n)?,
            basis: OnceLock::new(),
            mono: OnceLock::new(),
            dp: OnceLock::new(),
            degeneracy: OnceLock::new(),
        })
    }

    fn basis(&self) -> Res<&EdgeBasis> {
        lazy(&self.basis, || EdgeBasis::new(self.cfg.l, self.cfg.j, self.cfg.n))
    }

    fn mono(&self) -> Res<&Monodromy2> {
        let b = self.basis()?;
        lazy(&self.mono, || extract_coefficients(b, &self.ctx))
    }

    fn dp(&self) -> Res<&DividedPowers> {
        let c = self.cfg;
        let qmax = c.q_list.iter().copied().max().unwrap_or(0);
        let order = cyclic_order(c.n, qmax).max((c.j - 1) * c.l);
        lazy(&self.dp, || DividedPowers::with_schedule(c.l, c.j, c.n, order, c.eps_schedule, 1e-6))
    }

    fn moduli(&self) -> Res<CurveModuli> {
        CurveModuli::from_kprime(C64::new(self.cfg.kprime, 0.0))
    }

    /// curve points drawn from the degeneracy stream so the degeneracy and
    /// curve suites see the same ledger
    fn degeneracy(&self) -> Res<&DegeneracyReport> {
        let m = self.mono()?;
        let b = self.basis()?;
        let moduli = self.moduli()?;
        lazy(&self.degeneracy, || {
            let mut rng = seeded_rng(self.cfg.rng_seed, Suite::Degeneracy.stream() | 1 << 32);
            let pts = random_curve_points(&mut rng, moduli, CURVE_POINTS, &self.ctx);
            degeneracy_report(m, b, &self.ctx, &self.cfg.q_list, &[0], moduli, &pts)
        })
    }

    fn rng(&self, suite: Suite) -> ChaCha8Rng {
        seeded_rng(self.cfg.rng_seed, suite.stream())
    }
}

struct Sink<'c> {
    cfg: &'c ExperimentConfig,
    entries: Vec<Entry>,
}

impl Sink<'_> {
    fn push(&mut self, id: String, parameters: String, outcome: Outcome, status: Status, ms: f64) {
        let anchor = match registry::key_for(&id) {
            Some(i) => i.anchor.to_string(),
            None => String::new(),
        };
        // an unregistered name can only come from a bug; make it visible
        let status = if anchor.is_empty() { Status::Fail } else { status };
        self.entries.push(Entry { id, anchor, parameters, outcome, status, wall_time_ms: ms });
    }

    fn residual(&mut self, name: String, params: String, r: Residual, default_tol: f64, ms: f64) {
        let key = registry::key_for(&name).map(|i| i.key).unwrap_or("");
        let tol = self.cfg.tol_for(key, default_tol);
        let status = if r.passes(tol) {
            Status::Pass
        } else if KNOWN_MISPRINTS.contains(&name.as_str()) {
            Status::Flagged
        } else {
            Status::Fail
        };
        let outcome = Outcome::Residual { residual: r.scaled, scale: r.scale, tol, vacuous: r.vacuous };
        self.push(name, params, outcome, status, ms);
    }

    fn checks(&mut self, checks: Vec<Check>, ms: f64) {
        for c in checks {
            self.residual(c.name, c.params, c.residual, c.tol, ms);
        }
    }

    fn note(&mut self, name: String, params: String, text: String, status: Status, ms: f64) {
        self.push(name, params, Outcome::Note { text }, status, ms);
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let t0 = Instant::now();
    let v = f();
    (v, t0.elapsed().as_secs_f64() * 1e3)
}

fn rel(a: C64, b: C64) -> Residual {
    let scale = a.norm().max(b.norm()).max(1.0);
    Residual { scaled: (a - b).norm() / scale, scale, vacuous: false }
}

fn plain(scaled: f64) -> Residual {
    Residual { scaled, scale: 1.0, vacuous: false }
}

fn params(cfg: &ExperimentConfig) -> String {
    format!("N={} j={} L={}", cfg.n, cfg.j, cfg.l)
}

pub fn run_suite(suite: Suite, sh: &Shared) -> SuiteReport {
    let mut sink = Sink { cfg: sh.cfg, entries: Vec::new() };
    let (res, ms) = timed(|| match suite {
        Suite::Qarith => qarith(sh, &mut sink),
        Suite::Weights => weights(sh, &mut sink),
        Suite::Yangbaxter => yang_baxter(sh, &mut sink),
        Suite::AppendixC => appendix_c(sh, &mut sink),
        Suite::Serre => serre(sh, &mut sink),
        Suite::Loop => loop_suite(sh, &mut sink),
        Suite::Spectrum => spectrum(sh, &mut sink),
        Suite::Functional => functional(sh, &mut sink),
        Suite::Degeneracy => degeneracy(sh, &mut sink),
        Suite::Curve => curve(sh, &mut sink),
    });
    SuiteReport {
        suite: suite.name().to_string(),
        entries: sink.entries,
        error: res.err().map(|e| e.to_string()),
        wall_time_ms: ms,
    }
}

#[derive(Default)]
struct WorstScalar {
    worst: Vec<(String, Residual, String)>,
}

impl WorstScalar {
    fn add(&mut self, name: &str, r: Residual, at: impl FnOnce() -> String) {
        match self.worst.iter_mut().find(|w| w.0 == name) {
            Some(w) => {
                if r.scaled > w.1.scaled {
                    *w = (name.to_string(), r, at());
                }
            }
            None => self.worst.push((name.to_string(), r, at())),
        }
    }
}

fn qarith(sh: &Shared, sink: &mut Sink) -> Res<()> {
    let ctx = &sh.ctx;
    let n = ctx.n as i64;
    let mut rng = sh.rng(Suite::Qarith);
    let (w, ms) = timed(|| -> Res<WorstScalar> {
        let mut w = WorstScalar::default();
        for draw in 0..QARITH_DRAWS {
            let ell = rng.random_range(1..=n);
            let a = rng.random_range(0..ell);
            let m = rng.random_range(0..ell);
            let b = rng.random_range(0..ell);
            let y = random_point(&mut rng, 0.2, 1.5);
            let t = random_point(&mut rng, 0.2, 1.5);
            let at = || format!("draw {draw}: ell={ell} a={a} m={m} b={b}");
            let (l, r) = phi_swap_sides(y, ell, m, a, ctx);
            w.add("Phi6", rel(l, r), at);
            let (l, r) = bbp_sides(t, ell, m, b, ctx);
            w.add("BBP333b", rel(l, r), at);
            // a denominator can vanish before the series terminates; such draws are skipped
            if let Ok((l, r)) = transformation_sides(m + 1, ell - b, 1 + m - b, t, ctx) {
                w.add("coro10", rel(l, r), at);
            }
            let x = random_point(&mut rng, 0.2, 1.5);
            let (al, be) = (rng.random_range(0..n), rng.random_range(0..n));
            let k = rng.random_range(0..2 * n);
            let v = phi(x, y, al, be, k, ctx);
            w.add("Phi expansion", rel(v, phi_by_expansion(x, y, al, be, k, ctx)), at);
            // the hypergeometric form needs n <= beta
            let kh = rng.random_range(0..=be);
            let vh = phi(x, y, al, be, kh, ctx);
            w.add("Phi hypergeometric", rel(vh, phi_via_hypergeometric(x, y, al, be, kh, ctx)?), at);
        }
        Ok(w)
    });
    for (name, r, at) in w?.worst {
        sink.residual(name, format!("N={n} {QARITH_DRAWS} draws, worst at {at}"), r, TOL_EXACT, ms);
    }
    Ok(())
}

fn weights(sh: &Shared, sink: &mut Sink) -> Res<()> {
    let cfg = sh.cfg;
    let ctx = &sh.ctx;
    let moduli = sh.moduli()?;
    let mut rng = sh.rng(Suite::Weights);
    let (pts, ms) = timed(|| -> Res<Vec<RapidityPoint>> {
        let mut pts = vec![make_point(moduli, cfg.mu(), 0, 0, ctx)?];
        pts.extend(random_curve_points(&mut rng, moduli, 8, ctx));
        Ok(pts)
    });
    let pts = pts?;
    let worst = pts.iter().flat_map(|p| p.residuals(ctx)).fold(0.0, f64::max);
    sink.residual("curve point".into(), format!("k'={} {} points", cfg.kprime, pts.len()), plain(worst), 1e-10, ms);

    for &ell in &cfg.ell_list {
        let (r, ms) = timed(|| -> Res<[f64; 4]> {
            let mut worst = [0.0f64; 4];
            for d in 0..3 {
                let (p, pp, q) = (&pts[0], &pts[1 + 2 * d], &pts[2 + 2 * d]);
                let r = square_decomposition_residuals(p, pp, q, ell as i64, ctx)?;
                for i in 0..4 {
                    worst[i] = worst[i].max(r[i]);
                }
            }
            Ok(worst)
        });
        let r = r?;
        let p = format!("N={} ell={ell} 3 draws", cfg.n);
        for (i, name) in ["square3b corner", "square4a upper", "square4b lower", "square6a dual"].iter().enumerate() {
            sink.residual(name.to_string(), p.clone(), plain(r[i]), 1e-9, ms);
        }
    }

    let t = random_point(&mut rng, 0.3, 1.3);
    let (r, ms) = timed(|| {
        let mut worst = Residual::zero();
        for al in 0..2 {
            for be in 0..2 {
                for k in 0..cfg.j {
                    let a = ulj_edges(al, be, k, t, 2, cfg.j, ctx);
                    let b = u2j_edges(al, be, k, t, cfg.j, ctx);
                    worst = Residual::worst(worst, rel(a, b));
                }
            }
        }
        worst
    });
    sink.residual("U2j fused two".into(), params(cfg), r, 1e-12, ms);

    let (r, ms) = timed(|| {
        let m = u22(t, ctx);
        let mut worst = Residual::zero();
        for al in 0..2usize {
            for be in 0..2usize {
                for k in 0..2usize {
                    let k2 = k as i64 - al as i64 + be as i64;
                    if (0..2).contains(&k2) {
                        let u = u2j_edges(al, be, k, t, 2, ctx);
                        worst = Residual::worst(worst, rel(m[(2 * al + k2 as usize, 2 * be + k)], u));
                    }
                }
            }
        }
        worst
    });
    sink.residual("u22 from U2j".into(), format!("N={}", cfg.n), r, 1e-12, ms);
    Ok(())
}

fn yang_baxter(sh: &Shared, sink: &mut Sink) -> Res<()> {
    let cfg = sh.cfg;
    let ctx = &sh.ctx;
    let mut rng = sh.rng(Suite::Yangbaxter);
    let pairs: Vec<(C64, C64)> =
        (0..YBE_PAIRS).map(|_| (random_point(&mut rng, 0.3, 1.6), random_point(&mut rng, 0.3, 1.6))).collect();
    let (r, ms) = timed(|| -> Res<Residual> {
        let r22 = FaceWeightTable::new(2, 2, ctx)?;
        let u = FaceWeightTable::new(2, cfg.j, ctx)?;
        let mut worst = Residual::zero();
        for &(tr, tq) in &pairs {
            let abs = face_yang_baxter_check(&r22, &u, &u, tr, tq);
            // each side is a sum of N products of three weights linear in t
            let scale = cfg.n as f64 * (1.0 + tr.norm()) * (1.0 + tq.norm()) * (1.0 + (tq / tr).norm());
            worst = Residual::worst(worst, Residual { scaled: abs / scale, scale, vacuous: false });
        }
        Ok(worst)
    });
    sink.residual("ybeUU".into(), format!("N={} j={} {YBE_PAIRS} pairs", cfg.n, cfg.j), r?, TOL_EXACT, ms);

    let l = cfg.l.min(4);
    let (r, ms) = timed(|| -> Res<Residual> {
        let basis = EdgeBasis::new(l, cfg.j, cfg.n)?;
        Ok(pairs.iter().fold(Residual::zero(), |w, &(tr, tq)| {
            Residual::worst(w, monodromy_yang_baxter(&basis, tr, tq, ctx))
        }))
    });
    sink.residual("YBEuUU".into(), format!("N={} j={} L={l} {YBE_PAIRS} pairs", cfg.n, cfg.j), r?, TOL_EXACT, ms);
    Ok(())
}

fn appendix_c(sh: &Shared, sink: &mut Sink) -> Res<()> {
    let ctx = &sh.ctx;
    let cfg = sh.cfg;
    let mut rng = sh.rng(Suite::AppendixC);
    let m = sh.mono()?;
    let pts: Vec<(C64, C64)> =
        (0..8).map(|_| (random_point(&mut rng, 0.3, 1.5), random_point(&mut rng, 0.3, 1.5))).collect();
    let (c, ms) = timed(|| appendix_c_suite(m, ctx, &pts));
    sink.checks(c, ms);
    let (c, ms) = timed(|| closed_form_check(m, ctx));
    sink.checks(c, ms);
    let xs: Vec<C64> = (0..3).map(|_| random_point(&mut rng, 0.4, 1.4)).collect();
    let (c, ms) = timed(|| exchange_identities_check(sh.basis()?, ctx, &xs));
    sink.checks(c?, ms);
    let (c, ms) = timed(|| {
        let g = GeneratorSet::new(cfg.l, cfg.j, ctx);
        let mut c = uq_sl2_check(&g, ctx);
        c.extend(explicit_generator_check(&g, ctx));
        c
    });
    sink.checks(c, ms);
    Ok(())
}

fn serre(sh: &Shared, sink: &mut Sink) -> Res<()> {
    let (dp, ms) = timed(|| sh.dp());
    let dp = dp?;
    let stab = dp.all().filter(|d| d.converged).map(|d| d.extrapolation_error).fold(0.0, f64::max);
    let singular = dp.all().filter(|d| !d.converged).count();
    sink.residual(
        "eps stability".into(),
        format!(
            "N={} j={} L={} orders <= {} radii {:?}, {singular} divided powers without a limit",
            dp.n, dp.j, dp.l, dp.max_order, sh.cfg.eps_schedule
        ),
        plain(stab),
        1e-6,
        ms,
    );
    let (c, ms2) = timed(|| serre_suite(dp, &sh.ctx));
    sink.checks(c?, ms + ms2);
    for &q in &sh.cfg.q_list {
        let (c, ms) = timed(|| cyclic_serre_suite(dp, q));
        sink.checks(c?, ms);
    }
    Ok(())
}

fn loop_suite(sh: &Shared, sink: &mut Sink) -> Res<()> {
    let dp = sh.dp()?;
    let basis = sh.basis()?;
    for &q in &sh.cfg.q_list {
        let (c, ms) = timed(|| loop_serre(dp, q, Some(basis)));
        sink.checks(c?, ms);
    }
    Ok(())
}

fn first_solution(s: &Res<Vec<BetheSolution>>) -> Option<BetheSolution> {
    s.as_ref().ok().and_then(|v| v.first().cloned())
}

fn kind_index(k: VectorKind) -> u8 {
    match k {
        VectorKind::Omega => 1,
        VectorKind::OmegaBar => 2,
        VectorKind::Hat => 3,
        VectorKind::Tilde => 4,
    }
}

fn spectrum(sh: &Shared, sink: &mut Sink) -> Res<()> {
    let cfg = sh.cfg;
    let ctx = &sh.ctx;
    let m = sh.mono()?;
    let basis = sh.basis()?;
    let mut rng = sh.rng(Suite::Spectrum);
    for &q in &cfg.q_list {
        let p = format!("N={} j={} L={} Q={q} charge 0", cfg.n, cfg.j, cfg.l);
        let (an, ms) = timed(|| analyze_sector(m, basis, ctx, q, 0));
        let an = an?;
        let sp = &an.spectrum;
        let total: usize = sp.clusters.iter().map(|c| c.multiplicity).sum();
        let complete = if total == sp.block.len() { 0.0 } else { 1.0 };
        sink.residual("completeness".into(), format!("{p} dim {}", sp.block.len()), plain(complete), 0.5, ms);
        let status = if sp.ambiguous { Status::Flagged } else { Status::Pass };
        let text = format!("{} clusters, spectral radius {:.6e}", sp.clusters.len(), sp.spectral_radius);
        sink.note("sector ambiguous".into(), p.clone(), text, status, ms);
        for (ci, (cl, sols)) in sp.clusters.iter().zip(&an.solutions).enumerate() {
            let cp = format!("{p} cluster {ci} multiplicity {}", cl.multiplicity);
            sink.residual(format!("cluster {ci}"), cp.clone(), plain(cl.residual), CLUSTER_TOL, ms);
            match first_solution(sols) {
                Some(s) => {
                    let sp = format!("{cp} R={} Pa={} Pb={}", s.r, s.pa, s.pb);
                    sink.residual(format!("TQ cluster {ci}"), sp.clone(), plain(s.tq_residual), TQ_TOL, ms);
                    sink.residual(format!("bethe cluster {ci}"), sp.clone(), plain(s.bae_residual), BAE_TOL, ms);
                    sink.residual(
                        format!("reconstruction cluster {ci}"),
                        sp,
                        plain(s.reconstruction_residual),
                        RECONSTRUCTION_TOL,
                        ms,
                    );
                }
                None => {
                    let why = match sols {
                        Err(e) => e.to_string(),
                        Ok(_) => "no solution".into(),
                    };
                    sink.note(format!("TQ cluster {ci}"), cp, why, Status::Fail, ms);
                }
            }
        }
        let sols: Vec<Option<BetheSolution>> = an.solutions.iter().map(first_solution).collect();
        let t = random_point(&mut rng, 0.4, 1.3);
        let (r, ms) = timed(|| tau_formula_vector_check(basis, ctx, sp, &sols, t));
        sink.residual("tauljt".into(), format!("{p} 2 <= ell <= N"), r?, TAULJT_TOL, ms);

        let points: Vec<C64> = (0..3).map(|_| random_point(&mut rng, 0.4, 1.3)).collect();
        let dp = sh.dp()?;
        let (outs, ms) = timed(|| bethe_vector_suite(m, basis, dp, ctx, &an, &points));
        for o in outs? {
            let k = kind_index(o.kind);
            let name = format!("vector{k} cluster {}", o.cluster);
            let vp = format!("{p} R={} ell={} n={}", o.r, o.ell, o.extra_n);
            match o.residual {
                None => sink.note(name, vp, "zero vector at every admissible ell".into(), Status::Flagged, ms),
                Some(r) if o.kind == VectorKind::Tilde && r >= BETHE_VECTOR_TOL => {
                    // the tilde construction rests on finite-size evidence only
                    let outcome = Outcome::Residual { residual: r, scale: 1.0, tol: BETHE_VECTOR_TOL, vacuous: false };
                    sink.push(name, vp, outcome, Status::Flagged, ms);
                }
                Some(r) => sink.residual(name, vp, plain(r), BETHE_VECTOR_TOL, ms),
            }
        }
    }
    Ok(())
}

fn functional(sh: &Shared, sink: &mut Sink) -> Res<()> {
    let basis = sh.basis()?;
    let mut rng = sh.rng(Suite::Functional);
    for &q in &sh.cfg.q_list {
        let pts: Vec<C64> = (0..3).map(|_| random_point(&mut rng, 0.4, 1.3)).collect();
        let (c, ms) = timed(|| csos::spectrum::functional_relation_suite(basis, &sh.ctx, q, &[0], &pts));
        sink.checks(c?, ms);
    }
    Ok(())
}

fn ledger_row(e: &csos::spectrum::DegeneracyEntry) -> LedgerRow {
    LedgerRow {
        q: e.q,
        charge: e.charge,
        cluster: e.cluster,
        r: e.solution.as_ref().map(|s| s.r),
        pa: e.solution.as_ref().map(|s| s.pa),
        pb: e.solution.as_ref().map(|s| s.pb),
        m_e: e.m_e,
        multiplicity: e.multiplicity,
        verdict: e.verdict.as_str().to_string(),
    }
}

fn degeneracy(sh: &Shared, sink: &mut Sink) -> Res<()> {
    let cfg = sh.cfg;
    let (rep, ms) = timed(|| sh.degeneracy());
    let rep = rep?;
    for &(q, c) in &rep.ambiguous_sectors {
        sink.note(
            "sector ambiguous".into(),
            format!("{} Q={q} charge {c}", params(cfg)),
            "clusters closer than ten clustering tolerances".into(),
            Status::Flagged,
            ms,
        );
    }
    for e in &rep.entries {
        let status = match e.verdict {
            Verdict::Pass => Status::Pass,
            Verdict::Fail => Status::Fail,
            Verdict::Anomaly | Verdict::Unresolved => Status::Flagged,
        };
        let mut p = format!("{} Q={} charge {}", params(cfg), e.q, e.charge);
        if let Some(h) = e.hat_t {
            p.push_str(&format!(" hatT={h:.3e}"));
        }
        sink.push(format!("degeneracy cluster {}", e.cluster), p, Outcome::Cluster(ledger_row(e)), status, ms);
    }
    let m = sh.mono()?;
    let basis = sh.basis()?;
    let dp = sh.dp()?;
    let mut rng = sh.rng(Suite::Degeneracy);
    for &q in &cfg.q_list {
        let x = random_point(&mut rng, 0.4, 1.3);
        let (c, ms) = timed(|| degeneracy_commutator_check(m, dp, basis, &sh.ctx, q, x));
        sink.checks(c?, ms);
    }
    Ok(())
}

fn curve(sh: &Shared, sink: &mut Sink) -> Res<()> {
    let cfg = sh.cfg;
    let ctx = &sh.ctx;
    let moduli = sh.moduli()?;
    let mut rng = sh.rng(Suite::Curve);
    let p = make_point(moduli, cfg.mu(), 0, 0, ctx)?;
    let spins = SpinBasis::new(cfg.l, cfg.n)?;
    for &ell in &cfg.ell_list {
        let (r, ms) = timed(|| -> Res<Residual> {
            let mut worst = Residual::zero();
            for _ in 0..FUNTT_DRAWS {
                let d = random_curve_points(&mut rng, moduli, 2, ctx);
                let (lhs, rhs) = funtt_sides(&spins, &p, &d[0], &d[1], ell, ctx)?;
                worst = Residual::worst(worst, residual_of(&[lhs, -rhs]));
            }
            Ok(worst)
        });
        sink.residual(
            format!("funtt ell={ell}"),
            format!("N={} L={} ell={ell} {FUNTT_DRAWS} draws", cfg.n, cfg.l),
            r?,
            1e-8,
            ms,
        );
    }

    let rep = sh.degeneracy()?;
    let pts = random_curve_points(&mut rng, moduli, CURVE_POINTS, ctx);
    for e in &rep.entries {
        let Some(sol) = &e.solution else { continue };
        let cp = format!("{} Q={} cluster {} R={} Pa={} Pb={}", params(cfg), e.q, e.cluster, sol.r, sol.pa, sol.pb);
        let (dd, ms) = timed(|| drinfeld(sol, cfg.l, cfg.j, ctx, &moduli));
        let dd = dd?;
        if dd.m_e >= 0 {
            sink.residual(format!("Drinfeld purity cluster {}", e.cluster), cp.clone(), plain(dd.purity), 1e-9, ms);
            let deg = if dd.degree_ok { 0.0 } else { 1.0 };
            sink.residual(
                format!("Drinfeld degree cluster {}", e.cluster),
                format!("{cp} m_E={}", dd.m_e),
                plain(deg),
                0.5,
                ms,
            );
        }
        let (rep, ms) = timed(|| curve_transfer_formulas(sol, &dd, moduli, e.q, &pts, cfg.l, cfg.j, ctx));
        for c in rep?.checks {
            let name = format!("{} cluster {}", c.name, e.cluster);
            sink.residual(name, cp.clone(), c.residual, c.tol, ms);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn misprints_are_registered() {
        for k in KNOWN_MISPRINTS {
            assert!(registry::lookup(k).is_some());
        }
    }

    #[test]
    fn vector_names_resolve() {
        for k in 1..=4u8 {
            let kind = VectorKind::from_index(k).unwrap();
            assert_eq!(kind_index(kind), k);
            assert!(registry::key_for(&format!("vector{k} cluster 0")).is_some());
        }
    }
}
