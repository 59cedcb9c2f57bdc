//! Experiment runners: condition checks, per-function norm ratios and verdicts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::conditions::{
    check_adams_integral, check_adams_phi, check_prag38, check_spanne_integral, check_spanne_pair,
};
use crate::error::{Error, Result};
use crate::field::{Field, Symmetry};
use crate::geom::{Point, MAX_DIM};
use crate::grid::{argmax, relative_change, LogGrid, STABILITY_TOL};
use crate::hardy::{
    best_constant_b, hardy_inequality_check, identity_embedding_check, HalfLineFunction, Monotone,
};
use crate::kernel::{check_doubling, check_growth, tail_integral, Kernel};
use crate::operators::{
    maximal_apply, maximal_grid, two_term_with_far, LocalNorms, PotentialProfile, Strength,
};
use crate::report::{ConditionReport, Extended, Extremal};
use crate::spaces::{
    default_threshold_grid, morrey_profile, PhiFunction, SingularField, TestFunction,
};
use crate::weights::{
    apq_characteristic, holder_lower_bound_check, reverse_doubling_check, ExponentSet, Weight,
};

use super::config::{ExperimentConfig, ExperimentKind};
use super::report::{
    BoundednessReport, ChainRow, HardySummary, HedbergRow, Row, RunStats, Verdict,
    RADIUS_CONVENTION, REPORT_SCHEMA,
};

const KERNEL_TAIL_TOL: f64 = 1e-8;

/// Run whatever the config's `kind` asks for.
pub fn run(cfg: &ExperimentConfig) -> Result<BoundednessReport> {
    cfg.validate()?;
    match cfg.kind {
        ExperimentKind::Spanne => run_spanne(cfg),
        ExperimentKind::WeakType => run_spanne_weak(cfg),
        ExperimentKind::Adams => run_adams(cfg),
        ExperimentKind::LemmaLocal => run_lemma_local(cfg),
        ExperimentKind::Hardy => run_hardy(cfg),
        ExperimentKind::ConditionsOnly => run_conditions(cfg),
    }
}

fn kind_error(cfg: &ExperimentConfig, want: &str) -> Error {
    Error::Config(format!("expected a {want} config, got {:?}", cfg.kind))
}

// ---------------------------------------------------------------------------
// shared pieces

struct Setup {
    kernel: Kernel,
    w: Weight,
    e: ExponentSet,
    x0: Point,
    centers: Vec<Point>,
    functions: Vec<(String, Result<TestFunction>)>,
}

impl Setup {
    fn new(cfg: &ExperimentConfig) -> Result<Self> {
        let kernel = cfg
            .kernel
            .as_ref()
            .ok_or_else(|| Error::Config("missing `kernel`".into()))?
            .build(cfg.n)?;
        let functions = cfg
            .functions
            .iter()
            .map(|f| (f.id.clone(), f.build(cfg.n)))
            .collect();
        Ok(Setup {
            kernel,
            w: cfg.weight.build(cfg.n)?,
            e: cfg.exponent_set()?,
            x0: cfg.x0_point()?,
            centers: cfg.center_points()?,
            functions,
        })
    }
}

fn phi_of(cfg: &ExperimentConfig, which: &str, default_p: f64) -> Result<PhiFunction> {
    let spec = match which {
        "phi1" => cfg.phi1.as_ref(),
        "phi2" => cfg.phi2.as_ref(),
        _ => cfg.phi.as_ref(),
    };
    spec.ok_or_else(|| Error::Config(format!("missing `{which}`")))?
        .build(cfg.n, default_p)
}

/// A check that could not be evaluated counts as not holding.
fn guard(id: &str, r: Result<ConditionReport>) -> ConditionReport {
    r.unwrap_or_else(|e| {
        ConditionReport::new(id, false, Extended::Divergent, Extremal::None, false)
            .with_note(format!("not evaluated: {e}"))
    })
}

fn kernel_conditions(cfg: &ExperimentConfig, kernel: &Kernel) -> Vec<ConditionReport> {
    let grid = LogGrid::kernel_default();
    let tail = tail_integral(kernel, KERNEL_TAIL_TOL)
        .map(|v| ConditionReport::new("kernel-tail", v.is_finite(), v, Extremal::None, true));
    vec![
        guard("kernel-tail", tail),
        guard("growth", check_growth(kernel, &cfg.growth, &grid)),
        guard("doubling", check_doubling(kernel, &grid)),
    ]
}

fn weight_condition(cfg: &ExperimentConfig, w: &Weight, e: &ExponentSet) -> ConditionReport {
    let r = cfg
        .ball_grid()
        .and_then(|g| apq_characteristic(w, e, &g))
        .map(|s| {
            ConditionReport::new(
                "apq",
                s.value.is_finite(),
                s.value,
                Extremal::from(s.ball),
                s.stable,
            )
        });
    guard("apq", r)
}

fn prag38(cfg: &ExperimentConfig, s: &Setup) -> ConditionReport {
    guard(
        "prag38",
        cfg.ball_grid()
            .and_then(|g| check_prag38(&s.kernel, &s.w, &s.e, &g)),
    )
}

/// One side of a norm ratio: exponent, φ, weight power and strong/weak.
#[derive(Clone, Copy)]
struct Side<'a> {
    p: f64,
    phi: &'a PhiFunction,
    power: f64,
    weak: bool,
}

/// Supremum of the Morrey quotient over the centers, on the configured grid and on
/// its refinement (computed once: the refined grid keeps every base node at even index).
fn sup_pair(
    f: &dyn SingularField,
    side: Side,
    w: &Weight,
    centers: &[Point],
    grid: &LogGrid,
) -> Result<(f64, f64, f64)> {
    let fine = grid.refined();
    let lam = side.weak.then(|| default_threshold_grid(f));
    let (mut base, mut all, mut at) = (0.0f64, 0.0f64, grid.lo);
    for c in centers {
        let prof = morrey_profile(f, side.p, side.phi, w, side.power, c, &fine, lam.as_ref())?;
        let step = if grid.n == 1 { 1 } else { 2 };
        for (i, &(r, v)) in prof.iter().enumerate() {
            if i % step == 0 && v > base {
                base = v;
                at = r;
            }
            all = all.max(v);
        }
    }
    Ok((base, all, at))
}

fn profile_range(grid: &LogGrid, centers: &[Point], pole: &Point) -> (f64, f64) {
    let reach = centers.iter().map(|c| c.distance(pole)).fold(0.0, f64::max) + grid.hi;
    ((grid.lo * 1e-4).min(1e-6), (reach * 1e4).max(1e6))
}

fn potential_profile(
    cfg: &ExperimentConfig,
    s: &Setup,
    f: &TestFunction,
    centers: &[Point],
) -> Result<PotentialProfile> {
    let pole = match f.symmetry() {
        Symmetry::Radial(p) => p,
        _ => Point::origin(cfg.n),
    };
    let (lo, hi) = profile_range(&cfg.r_grid, centers, &pole);
    PotentialProfile::build(f, &s.kernel, &cfg.quadrature, lo, hi)
}

fn ratio_of(target: f64, source: f64) -> Extended {
    Extended::from_f64(target / source)
}

fn morrey_row(
    cfg: &ExperimentConfig,
    s: &Setup,
    id: &str,
    f: &TestFunction,
    src: Side,
    tgt: Side,
    centers: &[Point],
) -> Result<(Row, Option<(PotentialProfile, f64)>)> {
    if f.is_zero() {
        return Ok((Row::degenerate(id), None));
    }
    let (s0, s1, _) = sup_pair(f, src, &s.w, centers, &cfg.r_grid)?;
    if s0 == 0.0 {
        return Ok((Row::degenerate(id), None));
    }
    let profile = potential_profile(cfg, s, f, centers)?;
    let (t0, t1, at) = sup_pair(&profile, tgt, &s.w, centers, &cfg.r_grid)?;
    let (r0, r1) = (ratio_of(t0, s0), ratio_of(t1, s1));
    let stable =
        r0.is_finite() && r1.is_finite() && relative_change(r0.value(), r1.value()) < STABILITY_TOL;
    let row = Row {
        function_id: id.to_string(),
        source_norm: Some(s0),
        target_norm: Some(t0),
        ratio: Some(r0),
        ratio_refined: Some(r1),
        stable,
        degenerate: false,
        at: Some(at),
        error: None,
    };
    Ok((row, Some((profile, s0))))
}

struct Summary {
    sup: Option<Extended>,
    sup_refined: Option<Extended>,
    stable: bool,
    constant: Option<Extended>,
}

fn ext_max(a: Option<Extended>, b: Extended) -> Option<Extended> {
    Some(match a {
        None => b,
        Some(a) if a.is_divergent() || b.is_divergent() => Extended::Divergent,
        Some(a) => Extended::Finite(a.value().max(b.value())),
    })
}

fn summarise(rows: &[Row]) -> Summary {
    let (mut sup, mut sup_refined) = (None, None);
    for r in rows.iter().filter(|r| !r.degenerate && r.error.is_none()) {
        if let Some(v) = r.ratio {
            sup = ext_max(sup, v);
        }
        if let Some(v) = r.ratio_refined {
            sup_refined = ext_max(sup_refined, v);
        }
    }
    let stable = match (sup, sup_refined) {
        (Some(Extended::Finite(a)), Some(Extended::Finite(b))) => {
            relative_change(a, b) < STABILITY_TOL
        }
        _ => false,
    };
    let constant = match (sup, sup_refined) {
        (Some(a), Some(b)) => ext_max(Some(a), b),
        (a, None) => a,
        (None, b) => b,
    };
    Summary {
        sup,
        sup_refined,
        stable,
        constant,
    }
}

fn theorem_verdict(
    conditions: &[ConditionReport],
    rows: &[Row],
    summary: &Summary,
    extra_ok: bool,
) -> Verdict {
    if rows.iter().all(|r| r.degenerate) {
        return Verdict::Vacuous;
    }
    if conditions.iter().any(|c| !c.holds) {
        return Verdict::ConditionsFail;
    }
    let clean = rows
        .iter()
        .all(|r| r.error.is_none() && r.ratio.is_none_or(|v| v.is_finite()));
    if clean && summary.stable && extra_ok {
        Verdict::BoundedEvidence
    } else {
        Verdict::Inconclusive
    }
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    cfg: &ExperimentConfig,
    conditions: Vec<ConditionReport>,
    diagnostics: Vec<ConditionReport>,
    rows: Vec<Row>,
    notes: Vec<String>,
    verdict: Verdict,
    summary: Summary,
) -> BoundednessReport {
    let stats = RunStats {
        rows: rows.len(),
        row_errors: rows.iter().filter(|r| r.error.is_some()).count(),
        conditions: conditions.len() + diagnostics.len(),
        grid_points: cfg.r_grid.n,
    };
    BoundednessReport {
        schema: REPORT_SCHEMA,
        name: cfg.name.clone(),
        kind: cfg.kind,
        seed: cfg.seed,
        radius_convention: RADIUS_CONVENTION,
        conditions,
        diagnostics,
        rows,
        sup_ratio: summary.sup,
        sup_ratio_refined: summary.sup_refined,
        ratio_stable: summary.stable,
        operator_constant: summary.constant,
        hedberg: Vec::new(),
        chain: Vec::new(),
        hardy: None,
        notes,
        verdict,
        stats,
    }
}

// ---------------------------------------------------------------------------
// Spanne type

fn spanne_rows(cfg: &ExperimentConfig, s: &Setup, src: Side, tgt: Side) -> Vec<Row> {
    let centers = [s.x0];
    s.functions
        .par_iter()
        .map(|(id, f)| {
            let r = f
                .as_ref()
                .map_err(Clone::clone)
                .and_then(|f| morrey_row(cfg, s, id, f, src, tgt, &centers));
            match r {
                Ok((row, _)) => row,
                Err(e) => Row::failed(id, &e),
            }
        })
        .collect()
}

fn spanne_conditions(
    cfg: &ExperimentConfig,
    s: &Setup,
    phi1: &PhiFunction,
    phi2: &PhiFunction,
) -> Vec<ConditionReport> {
    let mut c = kernel_conditions(cfg, &s.kernel);
    c.push(weight_condition(cfg, &s.w, &s.e));
    c.push(prag38(cfg, s));
    c.push(guard(
        "spanne-pair",
        check_spanne_pair(phi1, phi2, &s.e, &s.x0, &cfg.r_grid),
    ));
    c.push(guard(
        "spanne-integral",
        check_spanne_integral(phi1, phi2, &s.kernel, &s.w, &s.e, &s.x0, &cfg.r_grid),
    ));
    c
}

fn spanne_like(cfg: &ExperimentConfig, weak: bool) -> Result<BoundednessReport> {
    let s = Setup::new(cfg)?;
    let (p, q) = (s.e.p, s.e.q);
    if weak != (p == 1.0) {
        return Err(Error::Config(format!(
            "{:?} experiment with p = {p}: use `spanne` for p > 1 and `weak-type` for p = 1",
            cfg.kind
        )));
    }
    let phi1 = phi_of(cfg, "phi1", p)?;
    let phi2 = phi_of(cfg, "phi2", q)?;
    let conditions = spanne_conditions(cfg, &s, &phi1, &phi2);
    let src = Side {
        p,
        phi: &phi1,
        power: p,
        weak: false,
    };
    let tgt = Side {
        p: q,
        phi: &phi2,
        power: q,
        weak,
    };
    let rows = spanne_rows(cfg, &s, src, tgt);
    let summary = summarise(&rows);
    let verdict = theorem_verdict(&conditions, &rows, &summary, true);
    Ok(assemble(
        cfg,
        conditions,
        Vec::new(),
        rows,
        Vec::new(),
        verdict,
        summary,
    ))
}

/// Strong-type Spanne experiment (p > 1): local Morrey norms at x0.
pub fn run_spanne(cfg: &ExperimentConfig) -> Result<BoundednessReport> {
    if cfg.kind != ExperimentKind::Spanne {
        return Err(kind_error(cfg, "spanne"));
    }
    spanne_like(cfg, false)
}

/// Weak-type Spanne experiment (p = 1): weak local Morrey norm of the potential.
pub fn run_spanne_weak(cfg: &ExperimentConfig) -> Result<BoundednessReport> {
    if cfg.kind != ExperimentKind::WeakType {
        return Err(kind_error(cfg, "weak-type"));
    }
    spanne_like(cfg, true)
}

// ---------------------------------------------------------------------------
// Adams type

/// r with ρ(r) = target, by bisection in log r; clamped to [1e-12, 1e12].
fn solve_rho(kernel: &Kernel, target: f64) -> f64 {
    let (mut lo, mut hi) = (1e-12f64.ln(), 1e12f64.ln());
    if kernel.eval(lo.exp()) >= target {
        return lo.exp();
    }
    if kernel.eval(hi.exp()) <= target {
        return hi.exp();
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if kernel.eval(mid.exp()) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi)).exp()
}

fn unit_ball_sample(rng: &mut ChaCha8Rng, n: usize) -> [f64; MAX_DIM] {
    loop {
        let mut v = [0.0; MAX_DIM];
        for c in v.iter_mut().take(n) {
            *c = rng.gen_range(-1.0..=1.0);
        }
        if v.iter().map(|c| c * c).sum::<f64>() <= 1.0 {
            return v;
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn hedberg_row(
    cfg: &ExperimentConfig,
    s: &Setup,
    id: &str,
    index: usize,
    f: &TestFunction,
    profile: &PotentialProfile,
    norm: f64,
) -> HedbergRow {
    let (p, q) = (s.e.p, s.e.q);
    let n = cfg.n;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64);
    let span = s.centers.iter().map(|c| c.norm()).fold(1.0, f64::max) * 2.0;
    let xs: Vec<([f64; MAX_DIM], [f64; MAX_DIM])> = (0..cfg.hedberg_samples)
        .map(|_| {
            let mut x = [0.0; MAX_DIM];
            for c in x.iter_mut().take(n) {
                *c = rng.gen_range(-span..=span);
            }
            (x, unit_ball_sample(&mut rng, n))
        })
        .collect();
    let origin = Point::origin(n);
    let vals: Vec<Result<f64>> = xs
        .par_iter()
        .map(|(x, u)| {
            let x = origin.add_scaled(x, 1.0);
            let mf = maximal_apply(f, &x, &maximal_grid())?.value;
            if !(mf > 0.0) {
                return Err(Error::precondition(
                    "maximal function vanishes at a sample point",
                ));
            }
            let r = solve_rho(&s.kernel, (norm / mf).powf((q - p) / q));
            let y = x.add_scaled(u, r);
            let iy = profile.value(y.distance(&profile.pole())).abs();
            Ok(iy / (mf.powf(p / q) * norm.powf(1.0 - p / q)))
        })
        .collect();
    let mut max = 0.0f64;
    let mut min = f64::INFINITY;
    let mut error = None;
    for v in vals {
        match v {
            Ok(v) => {
                max = max.max(v);
                min = min.min(v);
            }
            Err(e) => {
                error.get_or_insert(e.to_string());
            }
        }
    }
    let max_constant = Extended::from_f64(max);
    HedbergRow {
        function_id: id.to_string(),
        samples: cfg.hedberg_samples,
        max_constant,
        min_constant: if min.is_finite() { min } else { 0.0 },
        uniform: error.is_none() && max_constant.is_finite(),
        error,
    }
}

/// Adams experiment: global Morrey norms with φ^{1/p} and φ^{1/q}, plus the pointwise
/// Hedberg diagnostic at the balancing radius.
pub fn run_adams(cfg: &ExperimentConfig) -> Result<BoundednessReport> {
    if cfg.kind != ExperimentKind::Adams {
        return Err(kind_error(cfg, "adams"));
    }
    let s = Setup::new(cfg)?;
    let (p, q) = (s.e.p, s.e.q);
    let phi = phi_of(cfg, "phi", 1.0)?;
    let (phi_p, phi_q) = (phi.pow(1.0 / p), phi.pow(1.0 / q));

    let mut conditions = kernel_conditions(cfg, &s.kernel);
    conditions.push(weight_condition(cfg, &s.w, &s.e));
    let mut diagnostics = Vec::new();
    let mut notes = Vec::new();
    match check_adams_phi(&phi, &s.centers, &cfg.r_grid) {
        Ok(r) => {
            conditions.push(r.one_sided);
            diagnostics.push(r.two_sided);
            notes.push(
                "verdict uses the one-sided phi comparability; the two-sided form is a diagnostic"
                    .into(),
            );
        }
        Err(e) => conditions.push(guard("adams-phi-one-sided", Err(e))),
    }
    conditions.push(guard(
        "adams-integral",
        check_adams_integral(&phi, &s.kernel, &s.w, &s.e, &s.centers, &cfg.r_grid),
    ));

    let src = Side {
        p,
        phi: &phi_p,
        power: 1.0,
        weak: false,
    };
    let tgt = Side {
        p: q,
        phi: &phi_q,
        power: 1.0,
        weak: p == 1.0,
    };
    let out: Vec<(Row, Option<HedbergRow>)> = s
        .functions
        .par_iter()
        .enumerate()
        .map(|(i, (id, f))| {
            let f = match f {
                Ok(f) => f,
                Err(e) => return (Row::failed(id, e), None),
            };
            match morrey_row(cfg, &s, id, f, src, tgt, &s.centers) {
                Ok((row, Some((profile, norm)))) => {
                    let h = (cfg.hedberg_samples > 0)
                        .then(|| hedberg_row(cfg, &s, id, i, f, &profile, norm));
                    (row, h)
                }
                Ok((row, None)) => (row, None),
                Err(e) => (Row::failed(id, &e), None),
            }
        })
        .collect();
    let (rows, hedberg): (Vec<Row>, Vec<Option<HedbergRow>>) = out.into_iter().unzip();
    let hedberg: Vec<HedbergRow> = hedberg.into_iter().flatten().collect();
    let summary = summarise(&rows);
    let verdict = theorem_verdict(
        &conditions,
        &rows,
        &summary,
        hedberg.iter().all(|h| h.uniform),
    );
    let mut report = assemble(cfg, conditions, diagnostics, rows, notes, verdict, summary);
    report.hedberg = hedberg;
    Ok(report)
}

// ---------------------------------------------------------------------------
// local two-term estimate

fn lemma_row(
    cfg: &ExperimentConfig,
    s: &Setup,
    id: &str,
    f: &TestFunction,
    strength: Strength,
) -> Result<(Row, ChainRow)> {
    let chain_none = || ChainRow {
        function_id: id.to_string(),
        term1_over_term2: Extended::Finite(0.0),
    };
    if f.is_zero() {
        return Ok((Row::degenerate(id), chain_none()));
    }
    match f.symmetry() {
        Symmetry::Radial(c) if c == s.x0 => {}
        Symmetry::Constant(_) => {}
        _ => {
            return Err(Error::Unsupported(
                "local estimate needs f radial about x0".into(),
            ))
        }
    }
    let profile = potential_profile(cfg, s, f, &[s.x0])?;
    let fine = cfg.r_grid.refined();
    let radii = fine.points();
    let p = if strength == Strength::Weak {
        1.0
    } else {
        s.e.p
    };
    let norms = LocalNorms {
        f,
        w: &s.w,
        p,
        q: s.e.q,
        x0: s.x0,
    };
    let starts: Vec<f64> = radii.iter().map(|r| 2.0 * r).collect();
    let far = norms.far_integrals(&s.kernel, &starts, 1e-8)?;
    let recs = radii
        .par_iter()
        .zip(far.par_iter())
        .map(|(&r, &far)| two_term_with_far(&profile, f, &s.w, s.e.p, s.e.q, r, far, strength))
        .collect::<Result<Vec<_>>>()?;
    let step = if cfg.r_grid.n == 1 { 1 } else { 2 };
    let cs: Vec<f64> = recs.iter().map(|r| r.empirical_c.unwrap_or(0.0)).collect();
    let base: Vec<f64> = cs.iter().step_by(step).copied().collect();
    if recs.iter().all(|r| r.empirical_c.is_none()) {
        return Ok((Row::degenerate(id), chain_none()));
    }
    let (i, c0) = argmax(&base).ok_or(Error::EmptyGrid)?;
    let c1 = argmax(&cs).map_or(0.0, |x| x.1);
    let at = &recs[i * step];
    let mut chain = 0.0f64;
    for r in &recs {
        if r.term1 > 0.0 {
            chain = if r.term2 == 0.0 {
                f64::INFINITY
            } else {
                chain.max(r.term1 / r.term2)
            };
        }
    }
    let (r0, r1) = (Extended::from_f64(c0), Extended::from_f64(c1));
    let row = Row {
        function_id: id.to_string(),
        source_norm: Some(at.term1 + at.term2),
        target_norm: Some(at.lhs),
        ratio: Some(r0),
        ratio_refined: Some(r1),
        stable: r0.is_finite() && r1.is_finite() && relative_change(c0, c1) < STABILITY_TOL,
        degenerate: false,
        at: Some(at.r),
        error: None,
    };
    Ok((
        row,
        ChainRow {
            function_id: id.to_string(),
            term1_over_term2: Extended::from_f64(chain),
        },
    ))
}

/// Sweep of the two-term local estimate over (f, r); the ratio is the empirical constant.
pub fn run_lemma_local(cfg: &ExperimentConfig) -> Result<BoundednessReport> {
    if cfg.kind != ExperimentKind::LemmaLocal {
        return Err(kind_error(cfg, "lemma-local"));
    }
    let s = Setup::new(cfg)?;
    let strength = if s.e.p == 1.0 {
        Strength::Weak
    } else {
        Strength::Strong
    };
    let mut conditions = kernel_conditions(cfg, &s.kernel);
    conditions.push(weight_condition(cfg, &s.w, &s.e));
    conditions.push(prag38(cfg, &s));
    let out: Vec<(Row, Option<ChainRow>)> = s
        .functions
        .par_iter()
        .map(|(id, f)| {
            match f
                .as_ref()
                .map_err(Clone::clone)
                .and_then(|f| lemma_row(cfg, &s, id, f, strength))
            {
                Ok((row, chain)) => (row, Some(chain)),
                Err(e) => (Row::failed(id, &e), None),
            }
        })
        .collect();
    let (rows, chain): (Vec<Row>, Vec<Option<ChainRow>>) = out.into_iter().unzip();
    let summary = summarise(&rows);
    let verdict = theorem_verdict(&conditions, &rows, &summary, true);
    let notes = vec!["ratio is the empirical constant of the two-term local estimate".to_string()];
    let mut report = assemble(cfg, conditions, Vec::new(), rows, notes, verdict, summary);
    report.chain = chain.into_iter().flatten().collect();
    Ok(report)
}

// ---------------------------------------------------------------------------
// Hardy

fn hardy_row(
    id: &str,
    g: &HalfLineFunction,
    w: (&HalfLineFunction, &HalfLineFunction, &HalfLineFunction),
    constant: f64,
    grid: &LogGrid,
) -> Result<Row> {
    if g.is_zero() {
        return Ok(Row::degenerate(id));
    }
    let base = hardy_inequality_check(g, w.0, w.1, w.2, constant, grid)?;
    let fine = hardy_inequality_check(g, w.0, w.1, w.2, constant, &grid.refined())?;
    if base.rhs == Extended::Finite(0.0) {
        return Ok(Row::degenerate(id));
    }
    let ratio = |h: &crate::hardy::HardyInequality| match (h.lhs, h.rhs) {
        (Extended::Finite(l), Extended::Finite(r)) => Extended::Finite(l / r),
        _ => Extended::Divergent,
    };
    let (r0, r1) = (ratio(&base), ratio(&fine));
    let stable =
        r0.is_finite() && r1.is_finite() && relative_change(r0.value(), r1.value()) < STABILITY_TOL;
    Ok(Row {
        function_id: id.to_string(),
        source_norm: Some(base.rhs.value()),
        target_norm: Some(base.lhs.value()),
        ratio: Some(r0),
        ratio_refined: Some(r1),
        stable: stable && base.holds && fine.holds,
        degenerate: false,
        at: None,
        error: None,
    })
}

/// Best constant of the weighted Hardy inequality on the cone of non-decreasing
/// functions, and the inequality itself on the configured test functions.
pub fn run_hardy(cfg: &ExperimentConfig) -> Result<BoundednessReport> {
    if cfg.kind != ExperimentKind::Hardy {
        return Err(kind_error(cfg, "hardy"));
    }
    let h = cfg
        .hardy
        .as_ref()
        .ok_or_else(|| Error::Config("missing `hardy`".into()))?;
    let (w1, w2, w) = (h.w1.build()?, h.w2.build()?, h.w.build()?);
    let b = best_constant_b(&w1, &w2, &w, &cfg.t_grid)?;
    let summary_b = HardySummary {
        b_estimate: b.b_estimate,
        divergent: b.divergent,
        t_star: b.t_star,
        stable: b.stable,
    };
    let conditions = vec![ConditionReport::new(
        "hardy-b",
        b.b_estimate.is_finite(),
        b.b_estimate,
        Extremal::Radius { r: b.t_star },
        b.stable,
    )];
    let diagnostics = vec![guard(
        "identity-embedding",
        identity_embedding_check(&w1, &w2, &cfg.t_grid),
    )];
    let constant = b.b_estimate.value() * (1.0 + 1e-6);
    let rows: Vec<Row> =
        h.g.par_iter()
            .map(|t| {
                let r =
                    t.g.build()
                        .and_then(|g| {
                            if g.monotone() == Monotone::NonDecreasing || g.is_zero() {
                                Ok(g)
                            } else {
                                g.with_monotone(Monotone::NonDecreasing)
                            }
                        })
                        .and_then(|g| hardy_row(&t.id, &g, (&w1, &w2, &w), constant, &cfg.t_grid));
                r.unwrap_or_else(|e| Row::failed(&t.id, &e))
            })
            .collect();
    let summary = summarise(&rows);
    let holds = rows.iter().all(|r| r.degenerate || r.stable);
    let verdict = theorem_verdict(&conditions, &rows, &summary, holds && b.stable);
    let notes = vec![
        "ratio is sup w2 H_w g / sup w1 g; each row is checked against B (1 + 1e-6)".to_string(),
    ];
    let mut report = assemble(cfg, conditions, diagnostics, rows, notes, verdict, summary);
    report.stats.grid_points = cfg.t_grid.n;
    report.hardy = Some(summary_b);
    Ok(report)
}

// ---------------------------------------------------------------------------
// conditions only

/// Every condition the config has enough information for; no norms are computed.
pub fn condition_reports(
    cfg: &ExperimentConfig,
) -> Result<(Vec<ConditionReport>, Vec<ConditionReport>)> {
    let mut conditions = Vec::new();
    let mut diagnostics = Vec::new();
    let kernel = cfg.kernel.as_ref().map(|k| k.build(cfg.n)).transpose()?;
    let w = cfg.weight.build(cfg.n)?;
    let e = cfg.exponents.map(|_| cfg.exponent_set()).transpose()?;
    if let Some(k) = &kernel {
        conditions.extend(kernel_conditions(cfg, k));
    }
    if let Some(e) = &e {
        conditions.push(weight_condition(cfg, &w, e));
    }
    if let (Some(k), Some(e)) = (&kernel, &e) {
        let x0 = cfg.x0_point()?;
        let centers = cfg.center_points()?;
        conditions.push(guard(
            "prag38",
            cfg.ball_grid().and_then(|g| check_prag38(k, &w, e, &g)),
        ));
        if let (Some(_), Some(_)) = (&cfg.phi1, &cfg.phi2) {
            let phi1 = phi_of(cfg, "phi1", e.p)?;
            let phi2 = phi_of(cfg, "phi2", e.q)?;
            conditions.push(guard(
                "spanne-pair",
                check_spanne_pair(&phi1, &phi2, e, &x0, &cfg.r_grid),
            ));
            conditions.push(guard(
                "spanne-integral",
                check_spanne_integral(&phi1, &phi2, k, &w, e, &x0, &cfg.r_grid),
            ));
        }
        if cfg.phi.is_some() {
            let phi = phi_of(cfg, "phi", 1.0)?;
            match check_adams_phi(&phi, &centers, &cfg.r_grid) {
                Ok(r) => {
                    conditions.push(r.one_sided);
                    diagnostics.push(r.two_sided);
                }
                Err(err) => conditions.push(guard("adams-phi-one-sided", Err(err))),
            }
            conditions.push(guard(
                "adams-integral",
                check_adams_integral(&phi, k, &w, e, &centers, &cfg.r_grid),
            ));
        }
    }
    Ok((conditions, diagnostics))
}

fn run_conditions(cfg: &ExperimentConfig) -> Result<BoundednessReport> {
    let (conditions, diagnostics) = condition_reports(cfg)?;
    let verdict = if conditions.iter().all(|c| c.holds) {
        Verdict::ConditionsHold
    } else {
        Verdict::ConditionsFail
    };
    let summary = Summary {
        sup: None,
        sup_refined: None,
        stable: false,
        constant: None,
    };
    Ok(assemble(
        cfg,
        conditions,
        diagnostics,
        Vec::new(),
        Vec::new(),
        verdict,
        summary,
    ))
}

/// Kernel conditions (tail, growth, doubling) for the config's kernel.
pub fn kernel_reports(cfg: &ExperimentConfig) -> Result<Vec<ConditionReport>> {
    let kernel = cfg
        .kernel
        .as_ref()
        .ok_or_else(|| Error::Config("missing `kernel`".into()))?
        .build(cfg.n)?;
    Ok(kernel_conditions(cfg, &kernel))
}

/// A_{p,q} class, the Hölder lower bound and reverse doubling of w^q (factor 2, constant 0.9).
pub fn weight_reports(cfg: &ExperimentConfig) -> Result<Vec<ConditionReport>> {
    let w = cfg.weight.build(cfg.n)?;
    let e = cfg.exponent_set()?;
    let grid = cfg.ball_grid()?;
    Ok(vec![
        weight_condition(cfg, &w, &e),
        guard(
            "holder-lower-bound",
            holder_lower_bound_check(&w, &e, &grid),
        ),
        guard(
            "reverse-doubling",
            reverse_doubling_check(&w, e.q, 2.0, 0.9, &grid),
        ),
    ])
}
