//! Operator identities: the quadratic exchange relations, U_q(sl_2) generators,
//! divided powers at roots of unity, Serre relations and loop generators.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;

use crate::check::{Check, Worst, TOL_EXACT, TOL_LIMIT, TOL_SERREMD};
use crate::linalg::{eye, kron_list, max_abs, residual_floor, residual_of, Mat, Residual};
use crate::qarith::{q_factorials, q_integer, RootOfUnity};
use crate::transfer::{build_monodromy2, EdgeBasis, Monodromy2};
use crate::{CsosError, Result};

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

/// Single-site operators for alphabet size j.
#[derive(Clone, Debug)]
pub struct SiteOps {
    pub z: Mat,
    /// truncated shift, X[k+1, k] = 1, no wrap entry
    pub x: Mat,
    pub ehat: Mat,
    pub fhat: Mat,
}

pub fn site_ops(j: usize, ctx: &RootOfUnity) -> SiteOps {
    let z = Mat::from_fn(j, j, |r, c| if r == c { ctx.w(r as i64) } else { C64::default() });
    let x = Mat::from_fn(j, j, |r, c| if r == c + 1 { one() } else { C64::default() });
    let id = eye(j);
    let ehat = x.transpose() * (&id - &z * ctx.w(-(j as i64)));
    let fhat = (&id - &z) * &x;
    SiteOps { z, x, ehat, fhat }
}

/// Operator acting as `op` on site n, `left` on sites before and `right` on sites after.
fn placed(l: usize, n: usize, left: &Mat, op: &Mat, right: &Mat) -> Mat {
    let mut fs = Vec::with_capacity(l);
    for i in 0..l {
        fs.push(if i < n {
            left.clone()
        } else if i == n {
            op.clone()
        } else {
            right.clone()
        });
    }
    kron_list(&fs)
}

/// B_L, C_0, B_1, C_{L-1} as sums of site operators.
#[derive(Clone, Debug)]
pub struct ClosedForms {
    pub b_l: Mat,
    pub c_0: Mat,
    pub b_1: Mat,
    pub c_lm1: Mat,
}

pub fn closed_form_generators(l: usize, j: usize, ctx: &RootOfUnity) -> ClosedForms {
    let s = site_ops(j, ctx);
    let id = eye(j);
    let d = j.pow(l as u32);
    let (li, ji) = (l as i64, j as i64);
    let mut b_l = Mat::zeros(d, d);
    let mut c_0 = Mat::zeros(d, d);
    let mut b_1 = Mat::zeros(d, d);
    let mut c_lm1 = Mat::zeros(d, d);
    for n in 0..l {
        let ni = n as i64;
        b_l += placed(l, n, &s.z, &s.fhat, &id);
        c_0 += placed(l, n, &s.z, &s.ehat, &id) * ctx.w(ni * (1 - ji));
        b_1 += placed(l, n, &id, &s.fhat, &s.z) * ctx.w((li - 1 - ni) * (1 - ji));
        c_lm1 += placed(l, n, &id, &s.ehat, &s.z);
    }
    ClosedForms {
        b_l: b_l * ctx.w(-ji * li),
        c_0,
        b_1: b_1 * ctx.w(-ji),
        c_lm1: c_lm1 * ctx.w(-ji * (li - 1)),
    }
}

/// Closed forms against interpolated coefficients.
pub fn closed_form_check(m: &Monodromy2, ctx: &RootOfUnity) -> Vec<Check> {
    let cf = closed_form_generators(m.l, m.j, ctx);
    let l = m.l as i64;
    let params = format!("L={} j={}", m.l, m.j);
    [
        ("B_L", &cf.b_l, m.b.coeff(l)),
        ("C_0", &cf.c_0, m.c.coeff(0)),
        ("B_1", &cf.b_1, m.b.coeff(1)),
        ("C_L-1", &cf.c_lm1, m.c.coeff(l - 1)),
    ]
    .into_iter()
    .map(|(name, a, b)| Check::new(format!("closed form {name}"), params.clone(), residual_of(&[a.clone(), -b]), TOL_EXACT))
    .collect()
}

/// Generators T_i, E_i, F_i and the single-site building blocks.
#[derive(Clone, Debug)]
pub struct GeneratorSet {
    pub l: usize,
    pub j: usize,
    pub e0: Mat,
    pub f0: Mat,
    pub e1: Mat,
    pub f1: Mat,
    pub t0: Mat,
    pub t1: Mat,
    /// T_0^{1/2}
    pub t0_half: Mat,
    pub mu0: C64,
    pub nu0: C64,
    pub mu1: C64,
    pub nu1: C64,
    pub zj: Mat,
    pub xj: Mat,
    /// ê_n, f̂_n embedded at each site
    pub ehat_n: Vec<Mat>,
    pub fhat_n: Vec<Mat>,
    pub eprime: Mat,
    pub fprime: Mat,
    pub tprime: Mat,
    pub closed: ClosedForms,
}

impl GeneratorSet {
    pub fn new(l: usize, j: usize, ctx: &RootOfUnity) -> Self {
        let closed = closed_form_generators(l, j, ctx);
        let s = site_ops(j, ctx);
        let (li, ji) = (l as i64, j as i64);
        let d = j.pow(l as u32);
        // T_0^{1/2} is diagonal: q^{-(1-j)L/2} ∏ q^{-n_i}
        let basis_sum = |mut i: usize| {
            let mut t = 0i64;
            for _ in 0..l {
                t += (i % j) as i64;
                i /= j;
            }
            t
        };
        let t0_half = Mat::from_fn(d, d, |r, c| {
            if r == c {
                ctx.qh(-((1 - ji) * li) - 2 * basis_sum(r))
            } else {
                C64::default()
            }
        });
        let t0 = &t0_half * &t0_half;
        let t1 = Mat::from_fn(d, d, |r, c| if r == c { one() / t0[(r, r)] } else { C64::default() });
        let qq = ctx.qp(1) - ctx.qp(-1);
        let mu0 = -ctx.w(-ji * li) * ctx.qh(-(ji - 1));
        let nu0 = ctx.qh(ji - 1 - 2);
        let mu1 = -ctx.w(-ji) * ctx.qh(ji - 1 - 2 * li * (ji - 1));
        let nu1 = ctx.w(-ji * (li - 1)) * ctx.qh(-(ji + 1) + 2 * li * (ji - 1));
        let e0 = &closed.c_0 * &t0_half / (qq * nu0);
        let f0 = &t0_half * &closed.b_l / (qq * mu0);
        let e1 = &t0_half * &closed.b_1 / (qq * mu1);
        let f1 = &closed.c_lm1 * &t0_half / (qq * nu1);
        let id = eye(j);
        let ehat_n = (0..l).map(|n| placed(l, n, &id, &s.ehat, &id)).collect();
        let fhat_n = (0..l).map(|n| placed(l, n, &id, &s.fhat, &id)).collect();
        let qd = Mat::from_fn(j, j, |r, c| if r == c { ctx.qp(r as i64) } else { C64::default() });
        let qi = Mat::from_fn(j, j, |r, c| if r == c { ctx.qp(-(r as i64)) } else { C64::default() });
        let eprime = s.x.transpose() * (&qi * ctx.qp(ji) - &qd * ctx.qp(-ji)) / qq;
        let fprime = (&qd - &qi) * &s.x / qq;
        let tprime = &qi * &qi * ctx.qp(ji - 1);
        GeneratorSet {
            l,
            j,
            e0,
            f0,
            e1,
            f1,
            t0,
            t1,
            t0_half,
            mu0,
            nu0,
            mu1,
            nu1,
            zj: s.z,
            xj: s.x,
            ehat_n,
            fhat_n,
            eprime,
            fprime,
            tprime,
            closed,
        }
    }

    pub fn get(&self, g: Gen) -> &Mat {
        match g {
            Gen::BL => &self.closed.b_l,
            Gen::C0 => &self.closed.c_0,
            Gen::B1 => &self.closed.b_1,
            Gen::CL1 => &self.closed.c_lm1,
            Gen::E0 => &self.e0,
            Gen::E1 => &self.e1,
            Gen::F0 => &self.f0,
            Gen::F1 => &self.f1,
        }
    }
}

/// T_i^{-1}F_j = q^{a_ij}F_jT_i^{-1}, T_iE_j = q^{a_ij}E_jT_i, [E_i, F_j] = δ_ij (T_i - T_i^{-1})/(q - q^{-1}).
pub fn uq_sl2_check(g: &GeneratorSet, ctx: &RootOfUnity) -> Vec<Check> {
    let params = format!("L={} j={}", g.l, g.j);
    let qq = ctx.qp(1) - ctx.qp(-1);
    let t = [&g.t0, &g.t1];
    let ti = [&g.t1, &g.t0];
    let e = [&g.e0, &g.e1];
    let f = [&g.f0, &g.f1];
    let mut out = Vec::new();
    for i in 0..2 {
        for k in 0..2 {
            let a = if i == k { 2 } else { -2 };
            let qa = ctx.qp(a);
            out.push(Check::new(
                format!("TF {i}{k}"),
                params.clone(),
                residual_of(&[ti[i] * f[k], -(f[k] * ti[i]) * qa]),
                TOL_EXACT,
            ));
            out.push(Check::new(
                format!("TE {i}{k}"),
                params.clone(),
                residual_of(&[t[i] * e[k], -(e[k] * t[i]) * qa]),
                TOL_EXACT,
            ));
            let mut terms = vec![e[i] * f[k], -(f[k] * e[i])];
            if i == k {
                terms.push(-(t[i] - ti[i]) / qq);
            }
            out.push(Check::new(format!("EF {i}{k}"), params.clone(), residual_of(&terms), TOL_EXACT));
        }
    }
    out.push(Check::new("T1 T0", params, residual_of(&[&g.t1 * &g.t0, -eye(g.t0.nrows())]), TOL_EXACT));
    out
}

/// E_0, E_1, F_0, F_1 from the primed single-site generators, sites n = 1..L.
pub fn explicit_generators(g: &GeneratorSet, ctx: &RootOfUnity) -> [Mat; 4] {
    let (l, j) = (g.l, g.j as i64);
    // t'^{1/2} = q^{(j-1)/2} Q^{-1}
    let th = Mat::from_fn(g.j, g.j, |r, c| if r == c { ctx.qh(j - 1 - 2 * r as i64) } else { C64::default() });
    let thi = Mat::from_fn(g.j, g.j, |r, c| if r == c { one() / th[(r, r)] } else { C64::default() });
    let sum = |op: &Mat, left: &Mat, right: &Mat, sgn: i64| {
        let d = g.j.pow(l as u32);
        let mut tot = Mat::zeros(d, d);
        for n in 1..=l {
            tot += placed(l, n - 1, left, op, right) * ctx.qp(sgn * n as i64 * (j - 1));
        }
        tot
    };
    [
        sum(&g.eprime, &thi, &th, -1),
        sum(&g.fprime, &th, &thi, 1),
        sum(&g.fprime, &thi, &th, 1),
        sum(&g.eprime, &th, &thi, -1),
    ]
}

pub fn explicit_generator_check(g: &GeneratorSet, ctx: &RootOfUnity) -> Vec<Check> {
    let [e0, e1, f0, f1] = explicit_generators(g, ctx);
    let params = format!("L={} j={}", g.l, g.j);
    [("E0", &g.e0, e0), ("E1", &g.e1, e1), ("F0", &g.f0, f0), ("F1", &g.f1, f1)]
        .into_iter()
        .map(|(n, a, b)| Check::new(format!("explicit {n}"), params.clone(), residual_of(&[a.clone(), -b]), TOL_EXACT))
        .collect()
}

/// Names of the operators with divided powers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gen {
    BL,
    C0,
    B1,
    CL1,
    E0,
    E1,
    F0,
    F1,
}

impl Gen {
    pub const ALL: [Gen; 8] = [Gen::BL, Gen::C0, Gen::B1, Gen::CL1, Gen::E0, Gen::E1, Gen::F0, Gen::F1];

    /// E, F use the symmetric q-factorial; B, C the ω-factorial.
    pub fn symmetric(self) -> bool {
        matches!(self, Gen::E0 | Gen::E1 | Gen::F0 | Gen::F1)
    }
}

/// M^{(n)} as the eps → 0 limit of M(eps)^n / [n]!(eps).
#[derive(Clone, Debug)]
pub struct DividedPower {
    pub gen: Gen,
    pub n: usize,
    pub limit: Mat,
    /// (radius, half radius) of the eps circles
    pub eps_schedule: (f64, f64),
    /// max |limit(r) - limit(r/2)| / max(|limit|, 1)
    pub extrapolation_error: f64,
    /// largest |a_{-m}| r^{-m} of the Laurent expansion, relative
    pub singular_part: f64,
    pub converged: bool,
}

/// Divided powers of all eight generators up to a maximal order.
#[derive(Clone, Debug)]
pub struct DividedPowers {
    pub l: usize,
    pub j: usize,
    pub n: usize,
    pub max_order: usize,
    pub threshold: f64,
    table: BTreeMap<(Gen, usize), DividedPower>,
}

/// Larger circles alias nearby singularities of the deformation.
pub const DEFAULT_EPS_RADIUS: f64 = 0.01;
/// Circle samples per radius.
pub const CIRCLE_POINTS: usize = 16;
/// Laurent orders probed for a singular part.
const LAURENT_PROBE: usize = 4;

fn factorial_at(ctx: &RootOfUnity, g: Gen, n: usize) -> C64 {
    let (bracket, sym) = q_factorials(ctx, n);
    if g.symmetric() {
        sym
    } else {
        bracket
    }
}

impl DividedPowers {
    /// radius: eps-circle radius (halved for the stability check); threshold: convergence bound.
    pub fn new(l: usize, j: usize, n: usize, max_order: usize, radius: f64, threshold: f64) -> Result<Self> {
        Self::with_schedule(l, j, n, max_order, (radius, radius / 2.0), threshold)
    }

    /// Two explicit eps-circle radii; the first gives the limit, the second the stability check.
    pub fn with_schedule(
        l: usize,
        j: usize,
        n: usize,
        max_order: usize,
        schedule: (f64, f64),
        threshold: f64,
    ) -> Result<Self> {
        let (radius, radius2) = schedule;
        if radius <= 0.0 || radius2 <= 0.0 || radius2 == radius {
            return Err(CsosError::InvalidArgument("eps radii must be positive and distinct".into()));
        }
        let base = RootOfUnity::new(n)?;
        let d = j.pow(l as u32);
        let gs0 = GeneratorSet::new(l, j, &base);
        let mut table = BTreeMap::new();
        // regular orders: direct quotient at eps = 0
        for g in Gen::ALL {
            let m = gs0.get(g);
            let mut p = eye(d);
            for k in 0..=max_order.min(n - 1) {
                if k > 0 {
                    p = &p * m;
                }
                let f = factorial_at(&base, g, k);
                table.insert(
                    (g, k),
                    DividedPower {
                        gen: g,
                        n: k,
                        limit: &p / f,
                        eps_schedule: (0.0, 0.0),
                        extrapolation_error: 0.0,
                        singular_part: 0.0,
                        converged: true,
                    },
                );
            }
        }
        if max_order >= n {
            let radii = [radius, radius2];
            // acc[r][g][k - n]: circle mean; lau[r][g][k - n][m]: Laurent probes
            let span = max_order - n + 1;
            let mut acc = vec![vec![vec![Mat::zeros(d, d); span]; 8]; 2];
            let mut lau = vec![vec![vec![vec![Mat::zeros(d, d); LAURENT_PROBE]; span]; 8]; 2];
            for (ri, &r) in radii.iter().enumerate() {
                for s in 0..CIRCLE_POINTS {
                    let th = std::f64::consts::TAU * (s as f64 + 0.5) / CIRCLE_POINTS as f64;
                    let eps = C64::from_polar(r, th);
                    let ctx = base.with_eps(eps);
                    let gs = GeneratorSet::new(l, j, &ctx);
                    for (gi, g) in Gen::ALL.into_iter().enumerate() {
                        let m = gs.get(g);
                        let mut p = eye(d);
                        for k in 1..=max_order {
                            p = &p * m;
                            if k < n {
                                continue;
                            }
                            let v = &p / factorial_at(&ctx, g, k);
                            let mut e = eps;
                            for lm in lau[ri][gi][k - n].iter_mut() {
                                *lm += &v * e;
                                e *= eps;
                            }
                            acc[ri][gi][k - n] += v;
                        }
                    }
                }
            }
            let kk = CIRCLE_POINTS as f64;
            for (gi, g) in Gen::ALL.into_iter().enumerate() {
                for k in n..=max_order {
                    let a = &acc[0][gi][k - n] / C64::new(kk, 0.0);
                    let b = &acc[1][gi][k - n] / C64::new(kk, 0.0);
                    let scale = max_abs(&a).max(1.0);
                    let err = max_abs(&(&a - &b)) / scale;
                    let mut sing: f64 = 0.0;
                    for (mi, lm) in lau[0][gi][k - n].iter().enumerate() {
                        let am = max_abs(lm) / kk;
                        sing = sing.max(am / radius.powi(mi as i32 + 1) / scale);
                    }
                    table.insert(
                        (g, k),
                        DividedPower {
                            gen: g,
                            n: k,
                            limit: a,
                            eps_schedule: (radii[0], radii[1]),
                            extrapolation_error: err,
                            singular_part: sing,
                            converged: err < threshold && sing < threshold,
                        },
                    );
                }
            }
        }
        Ok(DividedPowers { l, j, n, max_order, threshold, table })
    }

    /// Default schedule: radius 0.01, convergence threshold 1e-6.
    pub fn with_defaults(l: usize, j: usize, n: usize, max_order: usize) -> Result<Self> {
        Self::new(l, j, n, max_order, DEFAULT_EPS_RADIUS, 1e-6)
    }

    pub fn info(&self, g: Gen, k: usize) -> Result<&DividedPower> {
        self.table
            .get(&(g, k))
            .ok_or_else(|| CsosError::InvalidArgument(format!("divided power {g:?}^({k}) beyond order {}", self.max_order)))
    }

    /// The limit operator; errors when the limit did not converge.
    pub fn get(&self, g: Gen, k: usize) -> Result<&Mat> {
        let dp = self.info(g, k)?;
        if !dp.converged {
            return Err(CsosError::NoConvergence(format!(
                "{g:?}^({k}): stability {:.1e}, singular part {:.1e}",
                dp.extrapolation_error, dp.singular_part
            )));
        }
        Ok(&dp.limit)
    }

    pub fn worst_stability(&self) -> f64 {
        self.table.values().map(|d| d.extrapolation_error.max(d.singular_part)).fold(0.0, f64::max)
    }

    pub fn all(&self) -> impl Iterator<Item = &DividedPower> {
        self.table.values()
    }
}

fn residual_checked(terms: Result<Vec<Mat>>) -> Result<Residual> {
    Ok(residual_of(&terms?))
}

/// Quantum Serre relations in E and F form and the modified relations on raw coefficients.
pub fn serre_suite(dp: &DividedPowers, ctx: &RootOfUnity) -> Result<Vec<Check>> {
    let params = format!("N={} j={} L={}", dp.n, dp.j, dp.l);
    let p = |g, k| dp.get(g, k);
    let w = ctx.omega;
    let mut out = Vec::new();
    for (i, k) in [(0, 1), (1, 0)] {
        for (tag, gs) in [("E", [Gen::E0, Gen::E1]), ("F", [Gen::F0, Gen::F1])] {
            let (a, b) = (gs[i], gs[k]);
            let r = residual_checked((|| {
                Ok(vec![
                    p(a, 1)? * p(b, 3)?,
                    -(p(b, 1)? * p(a, 1)? * p(b, 2)?),
                    p(b, 2)? * p(a, 1)? * p(b, 1)?,
                    -(p(b, 3)? * p(a, 1)?),
                ])
            })())?;
            out.push(Check::new(format!("serre2 {tag}{i},{tag}{k}"), params.clone(), r, TOL_LIMIT));
        }
    }
    // X^(3)Y - X^(2)YX + ω XYX^(2) - ω^3 YX^(3)
    let md1 = |x: Gen, y: Gen| -> Result<Residual> {
        let (x1, y1) = (p(x, 1)?, p(y, 1)?);
        Ok(residual_of(&[
            p(x, 3)? * y1,
            -(p(x, 2)? * y1 * x1),
            x1 * y1 * p(x, 2)? * w,
            -(y1 * p(x, 3)?) * w.powi(3),
        ]))
    };
    // X Y^(3) - Y X Y^(2) + ω Y^(2) X Y - ω^3 Y^(3) X
    let md2 = |x: Gen, y: Gen| -> Result<Residual> {
        let (x1, y1) = (p(x, 1)?, p(y, 1)?);
        Ok(residual_of(&[
            x1 * p(y, 3)?,
            -(y1 * x1 * p(y, 2)?),
            p(y, 2)? * x1 * y1 * w,
            -(p(y, 3)? * x1) * w.powi(3),
        ]))
    };
    out.push(Check::new("serremd1 C0,B1", params.clone(), md1(Gen::C0, Gen::B1)?, TOL_SERREMD));
    out.push(Check::new("serremd2 C0,B1", params.clone(), md2(Gen::C0, Gen::B1)?, TOL_SERREMD));
    out.push(Check::new("serremd2 CL-1,BL", params.clone(), md1(Gen::CL1, Gen::BL)?, TOL_SERREMD));
    out.push(Check::new("serremd2 CL-1,BL (B cubed)", params.clone(), md2(Gen::CL1, Gen::BL)?, TOL_SERREMD));
    Ok(out)
}

fn binom(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Order needed by the cyclic suite for sector Q.
pub fn cyclic_order(n: usize, q: usize) -> usize {
    3 * n + q
}

/// θ^{(N+Q)}θ'^{(Q)}θ^{(Q)} = θ^{(Q)}θ'^{(Q)}θ^{(N+Q)}, the four-term identity, and the C_0 products.
pub fn cyclic_serre_suite(dp: &DividedPowers, q: usize) -> Result<Vec<Check>> {
    let n = dp.n;
    let params = format!("N={} j={} L={} Q={q}", n, dp.j, dp.l);
    let p = |g, k| dp.get(g, k);
    let mut out = Vec::new();
    let pairs = [
        ("E0,E1", Gen::E0, Gen::E1),
        ("E1,E0", Gen::E1, Gen::E0),
        ("F0,F1", Gen::F0, Gen::F1),
        ("F1,F0", Gen::F1, Gen::F0),
        ("C0,B1", Gen::C0, Gen::B1),
    ];
    for (tag, a, b) in pairs {
        let r = residual_of(&[p(a, n + q)? * p(b, q)? * p(a, q)?, -(p(a, q)? * p(b, q)? * p(a, n + q)?)]);
        out.push(Check::new(format!("thetaij {tag}"), params.clone(), r, TOL_LIMIT));
        let r = residual_of(&[
            p(a, 3 * n + q)? * p(b, n + q)? * p(a, q)?,
            -(p(a, 2 * n + q)? * p(b, n + q)? * p(a, n + q)?),
            p(a, n + q)? * p(b, n + q)? * p(a, 2 * n + q)?,
            -(p(a, q)? * p(b, n + q)? * p(a, 3 * n + q)?),
        ]);
        out.push(Check::new(format!("thetaiji {tag}"), params.clone(), r, TOL_LIMIT));
    }
    for (jj, k) in [(1usize, 1usize), (1, 2), (2, 1)] {
        let c = binom((jj + k) as u64, jj as u64);
        let r = residual_of(&[
            p(Gen::C0, jj * n + q)? * p(Gen::C0, k * n)?,
            -(p(Gen::C0, (jj + k) * n + q)? * C64::new(c, 0.0)),
        ]);
        out.push(Check::new(format!("mulo j={jj} k={k}"), params.clone(), r, TOL_LIMIT));
        let r = residual_of(&[
            p(Gen::C0, jj * n + q)? * p(Gen::B1, q)? * p(Gen::C0, k * n + q)?,
            -(p(Gen::C0, q)? * p(Gen::B1, q)? * p(Gen::C0, (jj + k) * n + q)? * C64::new(c, 0.0)),
        ]);
        out.push(Check::new(format!("CBCjk j={jj} k={k}"), params.clone(), r, TOL_LIMIT));
    }
    for jj in 1..=3usize {
        let r = residual_of(&[
            p(Gen::C0, jj * n + q)? * p(Gen::B1, q)? * p(Gen::C0, q)?,
            -(p(Gen::C0, q)? * p(Gen::B1, q)? * p(Gen::C0, jj * n + q)?),
        ]);
        out.push(Check::new(format!("CBCj j={jj}"), params.clone(), r, TOL_LIMIT));
    }
    Ok(out)
}

/// x^+_{0,Q}, x^-_{1,Q}, x̄^+_{-1,Q}, x̄^-_{0,Q} with unit proportionality constants.
pub struct LoopGenerators {
    pub xp0: Mat,
    pub xm1: Mat,
    pub xbp_m1: Mat,
    pub xbm0: Mat,
}

pub fn loop_generators(dp: &DividedPowers, q: usize) -> Result<LoopGenerators> {
    let n = dp.n;
    let p = |g, k| dp.get(g, k);
    Ok(LoopGenerators {
        xp0: p(Gen::C0, n + q)? * p(Gen::B1, q)?,
        xm1: p(Gen::C0, q)? * p(Gen::B1, n + q)?,
        xbp_m1: p(Gen::CL1, n + q)? * p(Gen::BL, q)?,
        xbm0: p(Gen::CL1, q)? * p(Gen::BL, n + q)?,
    })
}

fn triple_commutator(a: &Mat, b: &Mat) -> Vec<Mat> {
    let b2 = b * b;
    let b3 = &b2 * b;
    vec![a * &b3, -(b * a * &b2) * C64::new(3.0, 0.0), (&b2 * a * b) * C64::new(3.0, 0.0), -(&b3 * a)]
}

/// [[[a,b],b],b] = 0 for the four loop-generator pairs; `sectors` adds per-charge restrictions.
pub fn loop_serre(dp: &DividedPowers, q: usize, basis: Option<&EdgeBasis>) -> Result<Vec<Check>> {
    let g = loop_generators(dp, q)?;
    let params = format!("N={} j={} L={} Q={q}", dp.n, dp.j, dp.l);
    let pairs = [
        ("x-1,x+0", &g.xm1, &g.xp0),
        ("x+0,x-1", &g.xp0, &g.xm1),
        ("xbar-0,xbar+-1", &g.xbm0, &g.xbp_m1),
        ("xbar+-1,xbar-0", &g.xbp_m1, &g.xbm0),
    ];
    let mut out = Vec::new();
    for (tag, a, b) in pairs {
        let terms = triple_commutator(a, b);
        out.push(Check::new(format!("loop serre {tag}"), params.clone(), residual_of(&terms), TOL_LIMIT));
        if let Some(bs) = basis {
            for c in 0..dp.n {
                let blk = bs.charge_block(c);
                if blk.is_empty() {
                    continue;
                }
                let cols: Vec<Mat> = terms.iter().map(|t| t.select_columns(&blk)).collect();
                out.push(Check::new(
                    format!("loop serre {tag} charge {c}"),
                    params.clone(),
                    residual_of(&cols),
                    TOL_LIMIT,
                ));
            }
        }
    }
    Ok(out)
}

/// The quadratic relations in (x, y) and the coefficient corollaries.
pub fn appendix_c_suite(m: &Monodromy2, ctx: &RootOfUnity, points: &[(C64, C64)]) -> Vec<Check> {
    let w = ctx.omega;
    let params = format!("N={} j={} L={}", ctx.n, m.j, m.l);
    let mut worst = Worst::default();
    for &(x, y) in points {
        let [ax, bx, cx, dx] = m.at(x);
        let [ay, by, cy, dy] = m.at(y);
        let wyx = w * y - x;
        let yx = y - x;
        let rel: Vec<(&str, Vec<Mat>)> = vec![
            ("[A,A]", vec![&ax * &ay, -(&ay * &ax)]),
            ("[B,B]", vec![&bx * &by, -(&by * &bx)]),
            ("[C,C]", vec![&cx * &cy, -(&cy * &cx)]),
            ("[D,D]", vec![&dx * &dy, -(&dy * &dx)]),
            ("AB", vec![&ax * &by * wyx, -(&by * &ax) * (w * yx), -(&ay * &bx) * (y * (w - 1.0))]),
            ("DB", vec![&by * &dx * wyx, -(&dx * &by) * yx, -(&bx * &dy) * (y * (w - 1.0))]),
            ("AB2", vec![&bx * &ay * wyx, -(&by * &ax) * ((w - 1.0) * x), -(&ay * &bx) * yx]),
            ("DB2", vec![&dy * &bx * wyx, -(&bx * &dy) * (w * yx), -(&dx * &by) * (x * (w - 1.0))]),
            ("AB3", vec![&ax * &by, &bx * &ay, -(&by * &ax), -(&ay * &bx)]),
            (
                "AB4",
                vec![&ax * &by * x, -(&by * &ax) * (w * x), -(&ay * &bx) * y, (&bx * &ay) * (w * y)],
            ),
            ("AC first", vec![&cy * &ax * wyx, -(&cx * &ay) * ((w - 1.0) * x), -(&ax * &cy) * (w * yx)]),
            ("AC second", vec![&ay * &cx * wyx, -(&ax * &cy) * ((w - 1.0) * y), -(&cx * &ay) * yx]),
            ("DC first", vec![&cx * &dy * wyx, -(&dy * &cx) * (w * yx), -(&cy * &dx) * (y * (w - 1.0))]),
            ("DC second", vec![&dx * &cy * wyx, -(&cy * &dx) * yx, -(&dy * &cx) * (x * (w - 1.0))]),
            (
                "ADBC1",
                vec![
                    (&dy * &ax - &ax * &dy) * yx,
                    -(&cx * &by) * ((1.0 - w) * x),
                    (&cy * &bx) * ((1.0 - w) * y),
                ],
            ),
            (
                "ADBC1 with 1-1/w",
                vec![
                    (&dy * &ax - &ax * &dy) * yx,
                    -(&cx * &by) * ((1.0 - 1.0 / w) * x),
                    (&cy * &bx) * ((1.0 - 1.0 / w) * y),
                ],
            ),
            (
                "ADBC2",
                vec![
                    (&dx * &ay - &ay * &dx) * yx,
                    -(&by * &cx) * ((w - 1.0) * x),
                    (&bx * &cy) * ((w - 1.0) * y),
                ],
            ),
            (
                "ADBC3",
                vec![(&cy * &bx - (&bx * &cy) * w) * yx, -(&dx * &ay - &dy * &ax) * ((w - 1.0) * x)],
            ),
            (
                "ADBC4",
                vec![(&cx * &by - (&by * &cx) * w) * yx, -(&ay * &dx - &ax * &dy) * ((w - 1.0) * y)],
            ),
            (
                "CB symmetric",
                vec![(&cx * &by - (&by * &cx) * w) * x, -(&cy * &bx - (&bx * &cy) * w) * y],
            ),
            ("AD symmetric", vec![&ax * &dy - &dy * &ax, -(&ay * &dx - &dx * &ay)]),
        ];
        for (name, terms) in rel {
            worst.add(name, residual_of(&terms));
        }
        // leading x^{L+1} and y^{L+1} consequences
        let al = m.a.coeff(m.l as i64);
        let dl = m.d.coeff(m.l as i64);
        let bl = m.b.coeff(m.l as i64);
        worst.add("A_L B(y)", residual_of(&[&al * &by, -(&by * &al) * w]));
        worst.add("B(y) D_L", residual_of(&[&by * &dl, -(&dl * &by)]));
        worst.add(
            "A(x) B_L",
            residual_of(&[&ax * &bl, -(&bl * &ax), -(&al * &bx) * (1.0 - 1.0 / w)]),
        );
        worst.add("A_L B(x) order", residual_of(&[(&al * &bx) * (1.0 - 1.0 / w), (&bx * &al) * (1.0 - w)]));
        worst.add("D(x) B_L", residual_of(&[&dx * &bl, -(&bl * &dx) * w, -(&dl * &bx) * (1.0 - w)]));
        worst.add("D_L B(x) order", residual_of(&[&dl * &bx, -(&bx * &dl)]));
    }
    let mut out = worst.into_checks(&params, TOL_EXACT);
    out.extend(coefficient_corollaries(m, ctx));
    out
}

/// Coefficient relations in A_n, B_n, C_n, D_n.
pub fn coefficient_corollaries(m: &Monodromy2, ctx: &RootOfUnity) -> Vec<Check> {
    let w = ctx.omega;
    let l = m.l as i64;
    let params = format!("N={} j={} L={}", ctx.n, m.j, m.l);
    let a = |n: i64| m.a.coeff(n);
    let b = |n: i64| m.b.coeff(n);
    let c = |n: i64| m.c.coeff(n);
    let d = |n: i64| m.d.coeff(n);
    // products with a numerically zero coefficient (B_0, C_L) are noise, not relations
    let cmax = [&m.a, &m.b, &m.c, &m.d].iter().flat_map(|p| p.coeffs.iter()).map(max_abs).fold(0.0, f64::max);
    let floor = 1e-11 * cmax;
    let residual_of = |t: &[Mat]| residual_floor(t, floor);
    let mut worst = Worst::default();
    for li in 0..=l {
        for mi in 0..=l {
            worst.add("ABlm first", residual_of(&[b(mi) * a(li), -(a(li) * b(mi)), -(b(li) * a(mi)), a(mi) * b(li)]));
            worst.add(
                "ABlm second",
                residual_of(&[
                    a(li) * b(mi),
                    -(b(mi) * a(li)) * w,
                    -(a(mi - 1) * b(li + 1)),
                    (b(li + 1) * a(mi - 1)) * w,
                ]),
            );
            worst.add(
                "BDml first",
                residual_of(&[(b(mi) * d(li)) * w, -(d(li) * b(mi)), -(b(li) * d(mi)) * w, d(mi) * b(li)]),
            );
            worst.add(
                "BDml second",
                residual_of(&[d(li) * b(mi), -(b(mi) * d(li)), -(d(mi - 1) * b(li + 1)), b(li + 1) * d(mi - 1)]),
            );
            worst.add(
                "CA lm first",
                residual_of(&[c(mi) * a(li), -(a(li) * c(mi)) * w, -(c(li) * a(mi)), (a(mi) * c(li)) * w]),
            );
            worst.add(
                "CA lm second",
                residual_of(&[a(li) * c(mi), -(c(mi) * a(li)), -(a(mi + 1) * c(li - 1)), c(li - 1) * a(mi + 1)]),
            );
            worst.add(
                "CD lm first",
                residual_of(&[c(mi) * d(li), -(d(li) * c(mi)), -(c(li) * d(mi)), d(mi) * c(li)]),
            );
            worst.add(
                "CD lm second",
                residual_of(&[
                    (d(li) * c(mi)) * w,
                    -(c(mi) * d(li)),
                    -(d(mi + 1) * c(li - 1)) * w,
                    c(li - 1) * d(mi + 1),
                ]),
            );
            worst.add(
                "CBshift first",
                residual_of(&[a(mi) * d(li), -(d(li) * a(mi)), -(a(li) * d(mi)), d(mi) * a(li)]),
            );
            worst.add(
                "CBshift second",
                residual_of(&[
                    c(li) * b(mi),
                    -(b(mi) * c(li)) * w,
                    -(c(mi - 1) * b(li + 1)),
                    (b(li + 1) * c(mi - 1)) * w,
                ]),
            );
            let dd = (d(mi) * a(li) - d(li) * a(mi)) * (1.0 - w);
            worst.add(
                "CB from ADBC3 first",
                residual_of(&[
                    c(li) * b(mi),
                    -(b(mi) * c(li)) * w,
                    -(c(li - 1) * b(mi + 1)),
                    (b(mi + 1) * c(li - 1)) * w,
                    -dd.clone(),
                ]),
            );
            worst.add(
                "CB from ADBC3 second",
                residual_of(&[c(li) * b(mi), -(b(mi) * c(li)) * w, -(c(mi) * b(li)), (b(li) * c(mi)) * w, -dd]),
            );
        }
        let mm = li;
        worst.add("A0D0Bm A", residual_of(&[a(0) * b(mm), -(b(mm) * a(0))]));
        worst.add("A0D0Bm D", residual_of(&[d(0) * b(mm), -(b(mm) * d(0)) * w]));
        worst.add(
            "AlB1",
            residual_of(&[a(li) * b(1), -(b(1) * a(li)) * w, -(b(li + 1) * a(0)) * (1.0 - w)]),
        );
        worst.add(
            "AlB1 middle",
            residual_of(&[a(li) * b(1), -(b(1) * a(li)) * w, -(a(0) * b(li + 1)), (b(li + 1) * a(0)) * w]),
        );
        worst.add(
            "DmB1",
            residual_of(&[d(mm) * b(1), -(b(1) * d(mm)), -(b(mm + 1) * d(0)) * (w - 1.0)]),
        );
        worst.add(
            "DmB1 middle",
            residual_of(&[d(mm) * b(1), -(b(1) * d(mm)), -(d(0) * b(mm + 1)), b(mm + 1) * d(0)]),
        );
        worst.add("ACD0 A0Cm", residual_of(&[a(0) * c(mm), -(c(mm) * a(0))]));
        worst.add("ACD0 D0Cm", residual_of(&[(d(0) * c(mm)) * w, -(c(mm) * d(0))]));
        worst.add(
            "ACD0 C0Al",
            residual_of(&[c(0) * a(li), -(a(li) * c(0)) * w, -(c(li) * a(0)) * (1.0 - w)]),
        );
        worst.add(
            "ACD0 C0Dl",
            residual_of(&[c(0) * d(li), -(d(li) * c(0)), -(d(0) * c(li)) * (w - 1.0)]),
        );
        worst.add(
            "C0Bm",
            residual_of(&[c(0) * b(mm), -(b(mm) * c(0)) * w, -(d(mm) * a(0) - d(0) * a(mm)) * (1.0 - w)]),
        );
        worst.add(
            "CBL",
            residual_of(&[c(li) * b(l), -(b(l) * c(li)) * w, -(d(l) * a(li) - d(li) * a(l)) * (1.0 - w)]),
        );
    }
    worst.add(
        "CB0L",
        residual_of(&[c(0) * b(l), -(b(l) * c(0)) * w, -(d(l) * a(0) - d(0) * a(l)) * (1.0 - w)]),
    );
    worst.add(
        "CB0L middle",
        residual_of(&[c(0) * b(l), -(b(l) * c(0)) * w, -(c(l - 1) * b(1)), (b(1) * c(l - 1)) * w]),
    );
    worst.add(
        "C0B1",
        residual_of(&[c(0) * b(1), -(b(1) * c(0)) * w, -(d(1) * a(0) - d(0) * a(1)) * (1.0 - w)]),
    );
    worst.add(
        "CL-1BL",
        residual_of(&[
            c(l - 1) * b(l),
            -(b(l) * c(l - 1)) * w,
            -(d(l) * a(l - 1) - d(l - 1) * a(l)) * (1.0 - w),
        ]),
    );
    worst.into_checks(&params, TOL_EXACT)
}

fn f_fn(z: C64, w: C64) -> C64 {
    (z - w) / (w * (z - 1.0))
}

fn g_fn(z: C64, w: C64) -> C64 {
    (1.0 - w) / (w * (z - 1.0))
}

fn product(ms: impl Iterator<Item = Mat>, d: usize) -> Mat {
    ms.fold(eye(d), |acc, m| acc * m)
}

/// A(x_0)∏B(x_i), D(x_0)∏B(x_i) and the C versions; points[0] = x_0.
pub fn exchange_identities_check(basis: &EdgeBasis, ctx: &RootOfUnity, points: &[C64]) -> Result<Vec<Check>> {
    let w = ctx.omega;
    let r = points.len().saturating_sub(1);
    if r == 0 {
        return Err(CsosError::InvalidArgument("need x_0 and at least one x_i".into()));
    }
    for (i, &a) in points.iter().enumerate() {
        if a.norm() < 1e-12 {
            return Err(CsosError::InvalidArgument("points must be nonzero".into()));
        }
        for (k, &b) in points.iter().enumerate() {
            if i != k {
                let z = a / b;
                if (z - 1.0).norm() < 1e-9 || (z - w).norm() < 1e-9 {
                    return Err(CsosError::Singular("point ratio equals 1 or ω".into()));
                }
            }
        }
    }
    let d = basis.dim();
    let ms: Vec<_> = points.iter().map(|&x| build_monodromy2(basis, x, ctx)).collect();
    let f = |i: usize, k: usize| f_fn(points[i] / points[k], w);
    let g = |i: usize, k: usize| g_fn(points[i] / points[k], w);
    let prod_of = |blk: (usize, usize), skip: Option<usize>, with0: bool| {
        let start = if with0 { 0 } else { 1 };
        product((start..=r).filter(|&k| Some(k) != skip).map(|k| ms[k].get(blk.0, blk.1).clone()), d)
    };
    let params = format!("N={} j={} L={} R={r}", ctx.n, basis.j, basis.l);
    let wr = w.powi(r as i32);
    let mut out = Vec::new();
    for (tag, blk, sign_d) in [("B", (0usize, 1usize), true), ("C", (1, 0), false)] {
        let pb = prod_of(blk, None, false);
        // A side
        let lhs = ms[0].get(0, 0) * &pb;
        let mut terms = vec![lhs];
        let mut lead = one();
        for i in 1..=r {
            lead *= if sign_d { f(i, 0) } else { f(0, i) };
        }
        let pre = if sign_d { wr } else { one() };
        terms.push(-(&pb * ms[0].get(0, 0)) * (pre * lead));
        for i in 1..=r {
            let mut cf = one();
            for k in (1..=r).filter(|&k| k != i) {
                cf *= if sign_d { f(k, i) } else { f(i, k) };
            }
            cf *= if sign_d { g(0, i) } else { g(i, 0) };
            terms.push(-(prod_of(blk, Some(i), true) * ms[i].get(0, 0)) * (pre * cf));
        }
        out.push(Check::new(format!("ADprod{tag} A"), params.clone(), residual_of(&terms), 1e-9));
        // D side
        let mut terms = vec![ms[0].get(1, 1) * &pb];
        let mut lead = one();
        for i in 1..=r {
            lead *= if sign_d { f(0, i) } else { f(i, 0) };
        }
        terms.push(-(&pb * ms[0].get(1, 1)) * (pre * lead));
        for i in 1..=r {
            let mut cf = one();
            for k in (1..=r).filter(|&k| k != i) {
                cf *= if sign_d { f(i, k) } else { f(k, i) };
            }
            cf *= if sign_d { g(0, i) } else { g(i, 0) };
            terms.push((prod_of(blk, Some(i), true) * ms[i].get(1, 1)) * (pre * cf));
        }
        out.push(Check::new(format!("ADprod{tag} D"), params.clone(), residual_of(&terms), 1e-9));
    }
    Ok(out)
}

/// commABn, commABnn, the sector commutators and A_L - D_L on the zero-charge block.
pub fn degeneracy_commutator_check(
    m: &Monodromy2,
    dp: &DividedPowers,
    basis: &EdgeBasis,
    ctx: &RootOfUnity,
    q: usize,
    x: C64,
) -> Result<Vec<Check>> {
    let n = ctx.n;
    let w = ctx.omega;
    let l = m.l as i64;
    let in_hyp = m.l % n == 0;
    let params = format!("N={n} j={} L={} Q={q}{}", m.j, m.l, if in_hyp { "" } else { " (L not a multiple of N)" });
    let [ax, bx, _cx, dx] = m.at(x);
    let al = m.a.coeff(l);
    let dl = m.d.coeff(l);
    let bl = m.b.coeff(l);
    let d = basis.dim();
    let mut out = Vec::new();
    let mut pw = vec![eye(d)];
    for k in 1..n {
        let p = &pw[k - 1] * &bl;
        pw.push(p);
    }
    for k in 1..n {
        let qk = q_integer(ctx, k as i64);
        let r1 = residual_of(&[
            &ax * &pw[k],
            -(&pw[k] * &ax),
            (&bx * &pw[k - 1] * &al) * ((1.0 - w) * qk),
        ]);
        out.push(Check::new(format!("commABn A n={k}"), params.clone(), r1, TOL_EXACT));
        let r2 = residual_of(&[
            &dx * &pw[k],
            -(&pw[k] * &dx) * w.powi(k as i32),
            -(&bx * &pw[k - 1] * &dl) * ((1.0 - w) * qk),
        ]);
        out.push(Check::new(format!("commABn D n={k}"), params.clone(), r2, TOL_EXACT));
    }
    let apd = &ax + &dx;
    for k in 1..=n {
        let bk = dp.get(Gen::BL, k)?;
        let bk1 = dp.get(Gen::BL, k - 1)?;
        let r = residual_of(&[
            &apd * bk,
            -(bk * (&ax + &dx * w.powi(k as i32))),
            -(&bx * bk1 * (&al - &dl)) * (w - 1.0),
        ]);
        let tol = if k >= n { TOL_LIMIT } else { TOL_EXACT };
        out.push(Check::new(format!("commABnn n={k}"), params.clone(), r, tol));
    }
    let blk0 = basis.charge_block(0);
    let amd = (&al - &dl).select_columns(&blk0);
    out.push(Check::new(
        "A_L - D_L on zero charge",
        params.clone(),
        Residual { scaled: max_abs(&amd), scale: 1.0, vacuous: false },
        1e-12,
    ));
    let wq = ctx.w(q as i64);
    let wmq = ctx.w(-(q as i64));
    let tau_m = &ax + &dx * wmq;
    let tau_p = &ax + &dx * wq;
    for nn in 0..2usize {
        for mm in 0..2usize {
            let c0 = dp.get(Gen::C0, nn * n + q)?;
            let b1 = dp.get(Gen::B1, mm * n + q)?;
            let bll = dp.get(Gen::BL, mm * n + q)?;
            let cl1 = dp.get(Gen::CL1, nn * n + q)?;
            let ops = [
                ("C0 B1", &tau_m, c0 * b1),
                ("B1 C0", &tau_p, b1 * c0),
                ("BL CL-1", &tau_m, bll * cl1),
                ("CL-1 BL", &tau_p, cl1 * bll),
            ];
            for (tag, tau, xop) in ops {
                let terms = [(tau * &xop).select_columns(&blk0), -(&xop * tau).select_columns(&blk0)];
                out.push(Check::new(
                    format!("comm {tag} n={nn} m={mm}"),
                    params.clone(),
                    residual_of(&terms),
                    TOL_LIMIT,
                ));
            }
        }
    }
    Ok(out)
}
