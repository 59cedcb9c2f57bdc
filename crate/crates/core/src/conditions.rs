//! Sufficiency conditions of the Spanne- and Adams-type estimates, checked on grids.
//!
//! Every check returns a [`ConditionReport`]. A divergent constant means the
//! quantity is infinite (a divergent integral, a growing supremal transform, or
//! a supremum that keeps growing when the grid is extended). For the two
//! integral conditions a finite integral whose ratio keeps growing at the grid
//! ends is reported as finite with `holds = false`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::geom::{Ball, Point};
use crate::grid::{scan_sup, scan_sup_cells, GridSup, LogGrid, STABILITY_TOL};
use crate::hardy::supremal_fn;
use crate::kernel::Kernel;
use crate::quad::{self, SeriesOutcome};
use crate::report::{ConditionReport, Extended, Extremal};
use crate::spaces::PhiFunction;
use crate::weights::{ball_mass, BallGrid, ExponentSet, Weight, MASS_TOL};

const TAIL_TOL: f64 = 1e-8;

/// sup_{s > t} φ(x, s): exact for powers, a tail-grid supremum otherwise.
pub fn phi_tail_sup(phi: &PhiFunction, x: &Point, t: f64) -> f64 {
    if let Some(e) = phi.power_exponent() {
        return if e > 0.0 {
            f64::INFINITY
        } else {
            phi.eval(x, t)
        };
    }
    let hi = (t * 1e3).max(1e7);
    let n = ((hi / t).log10() * 16.0).ceil() as usize + 1;
    supremal_fn(&|s| phi.eval(x, s), t, &LogGrid { lo: t, hi, n }).value()
}

fn tail_value<F: Fn(f64) -> Result<f64>>(h: &F, a: f64, onset: f64) -> Result<f64> {
    match quad::tail_fallible(h, a, onset.max(a), TAIL_TOL)? {
        SeriesOutcome::Converged { value, .. } => Ok(value),
        SeriesOutcome::Divergent { .. } => Ok(f64::INFINITY),
    }
}

fn average(w: &Weight, power: f64, center: &Point, t: f64) -> Result<f64> {
    if w.is_constant() {
        return Ok(w.at(center).powf(power));
    }
    let b = Ball::new(*center, t)?;
    Ok(ball_mass(w, power, &b, MASS_TOL)? / b.volume())
}

fn sup_to_report(id: &str, s: &GridSup, extremal: Extremal, integral: bool) -> ConditionReport {
    if s.value.is_infinite() || (!integral && s.grows) {
        let r = ConditionReport::new(id, false, Extended::Divergent, extremal, s.stable);
        return if s.value.is_finite() {
            r.with_note("grows without bound as the grid is extended")
        } else {
            r
        };
    }
    let r = ConditionReport::new(id, !s.grows, Extended::Finite(s.value), extremal, s.stable);
    if s.grows {
        r.with_note("finite at every radius but the ratio grows as the grid is extended")
    } else {
        r
    }
}

/// sup over balls of (ρ(r)/r^n) (∫_B w^q)^{1/q} (∫_B w^{-p'})^{1/p'}; for p = 1 the
/// last factor is ess sup_B 1/w.
pub fn check_prag38(
    kernel: &Kernel,
    w: &Weight,
    e: &ExponentSet,
    grid: &BallGrid,
) -> Result<ConditionReport> {
    grid.validate()?;
    let n = kernel.n();
    if grid.centers[0].dim() != n {
        return Err(Error::invalid("ball grid and kernel dimensions differ"));
    }
    let value = |c: usize, r: f64| -> Result<f64> {
        let rho = kernel.eval(r);
        if rho == 0.0 {
            return Ok(0.0);
        }
        let ball = Ball::new(grid.centers[c], r)?;
        let a = ball_mass(w, e.q, &ball, MASS_TOL)?.powf(1.0 / e.q);
        let b = if e.p == 1.0 {
            w.ess_sup_inverse(&ball)?.value()
        } else {
            let pp = e.p_prime();
            ball_mass(w, -pp, &ball, MASS_TOL)?.powf(1.0 / pp)
        };
        Ok(rho / r.powi(n as i32) * a * b)
    };
    let s = scan_sup_cells(&value, grid.centers.len(), &grid.radii)?;
    Ok(sup_to_report(
        "prag38",
        &s,
        Extremal::CenterRadius {
            center: grid.centers[s.cell],
            r: s.at,
        },
        false,
    ))
}

/// sup_t [ess sup_{s>t} φ1(x0,s)] t^{n/p} / (φ2(x0,t/2) t^{n/q}).
pub fn check_spanne_pair(
    phi1: &PhiFunction,
    phi2: &PhiFunction,
    e: &ExponentSet,
    x0: &Point,
    t_grid: &LogGrid,
) -> Result<ConditionReport> {
    let n = x0.dim() as f64;
    let ratio = |t: f64| -> Result<f64> {
        let den = phi2.eval(x0, 0.5 * t);
        if !(den > 0.0 && den.is_finite()) {
            return Err(Error::precondition(format!(
                "phi2 must be positive and finite, got {den} at r = {}",
                0.5 * t
            )));
        }
        let sup = phi_tail_sup(phi1, x0, t);
        if sup == 0.0 {
            return Ok(0.0);
        }
        Ok(sup * t.powf(n / e.p) / (den * t.powf(n / e.q)))
    };
    let s = scan_sup(&ratio, t_grid)?;
    Ok(sup_to_report(
        "spanne-pair",
        &s,
        Extremal::Radius { r: s.at },
        false,
    ))
}

/// Left side of the Spanne integral condition at radius r:
/// ∫_r^∞ [ess sup_{s>t} φ1(x0,s)] (w^p(B(x0,t)))^{1/p} ρ(t) / ((avg_{B(x0,t)} w^q)^{1/q} t^{n/p}) dt/t.
pub fn spanne_integral_lhs(
    phi1: &PhiFunction,
    kernel: &Kernel,
    w: &Weight,
    e: &ExponentSet,
    x0: &Point,
    r: f64,
) -> Result<f64> {
    let n = kernel.n();
    let h = |t: f64| -> Result<f64> {
        let rho = kernel.eval(t);
        if rho == 0.0 {
            return Ok(0.0);
        }
        let sup = phi_tail_sup(phi1, x0, t);
        if sup == 0.0 {
            return Ok(0.0);
        }
        let vol = Ball::new(*x0, t)?.volume();
        let num = (average(w, e.p, x0, t)? * vol).powf(1.0 / e.p);
        let den = average(w, e.q, x0, t)?.powf(1.0 / e.q) * t.powf(n as f64 / e.p);
        Ok(sup * num * rho / (den * t))
    };
    tail_value(&h, r, kernel_onset(kernel))
}

fn kernel_onset(kernel: &Kernel) -> f64 {
    kernel.breaks().into_iter().fold(1.0, f64::max)
}

/// sup_r LHS(r) / φ2(x0, r) for the Spanne integral condition.
#[allow(clippy::too_many_arguments)]
pub fn check_spanne_integral(
    phi1: &PhiFunction,
    phi2: &PhiFunction,
    kernel: &Kernel,
    w: &Weight,
    e: &ExponentSet,
    x0: &Point,
    r_grid: &LogGrid,
) -> Result<ConditionReport> {
    let ratio = |r: f64| -> Result<f64> {
        let lhs = spanne_integral_lhs(phi1, kernel, w, e, x0, r)?;
        if lhs == 0.0 {
            return Ok(0.0);
        }
        Ok(lhs / phi2.eval(x0, r))
    };
    let s = scan_sup(&ratio, r_grid)?;
    Ok(sup_to_report(
        "spanne-integral",
        &s,
        Extremal::Radius { r: s.at },
        true,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdamsPhiReport {
    pub two_sided: ConditionReport,
    pub one_sided: ConditionReport,
}

// (two-sided c, one-sided C, pair attaining C) over one radius grid
fn phi_spreads(phi: &PhiFunction, xs: &[Point], grid: &LogGrid) -> (f64, f64, (f64, f64)) {
    let pts = grid.points();
    let mut two: f64 = 1.0;
    let mut one: f64 = 1.0;
    let mut pair = (pts[0], pts[0]);
    for x in xs {
        let v: Vec<f64> = pts.iter().map(|&r| phi.eval(x, r)).collect();
        let hi = v.iter().copied().fold(f64::MIN, f64::max);
        let lo = v.iter().copied().fold(f64::MAX, f64::min);
        two = two.max(hi / lo);
        // running max from the right gives sup_{t ≥ r} φ(t)
        let mut best = (v[v.len() - 1], v.len() - 1);
        for i in (0..v.len()).rev() {
            if v[i] > best.0 {
                best = (v[i], i);
            }
            let c = best.0 / v[i];
            if c > one {
                one = c;
                pair = (pts[i], pts[best.1]);
            }
        }
    }
    (two, one, pair)
}

/// Two-sided comparability c^{-1} φ(x,r) ≤ φ(x,t) ≤ c φ(x,r) over all grid pairs,
/// and the one-sided form sup_{t>r} φ(x,t) ≤ C φ(x,r).
pub fn check_adams_phi(
    phi: &PhiFunction,
    x_grid: &[Point],
    rt_grid: &LogGrid,
) -> Result<AdamsPhiReport> {
    rt_grid.validate()?;
    if x_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    for x in x_grid {
        for r in rt_grid.points() {
            let v = phi.eval(x, r);
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::precondition(format!(
                    "phi must be positive and finite, got {v} at r = {r}"
                )));
            }
        }
    }
    let (two, one, pair) = phi_spreads(phi, x_grid, rt_grid);
    let (two_p, one_p, _) = phi_spreads(phi, x_grid, &rt_grid.probe());
    let verdict = |id: &str, base: f64, probe: f64, extremal: Extremal| {
        let stable = crate::grid::relative_change(base, probe) < STABILITY_TOL;
        if probe > base * (1.0 + STABILITY_TOL) {
            ConditionReport::new(id, false, Extended::Divergent, extremal, stable).with_note(
                format!("grows with the grid span: {base} on the grid, {probe} one decade wider"),
            )
        } else {
            ConditionReport::new(id, true, Extended::Finite(base), extremal, stable)
        }
    };
    Ok(AdamsPhiReport {
        two_sided: verdict("adams-phi-two-sided", two, two_p, Extremal::None),
        one_sided: verdict(
            "adams-phi-one-sided",
            one,
            one_p,
            Extremal::Pair {
                r: pair.0,
                t: pair.1,
            },
        ),
    })
}

/// Left side of the Adams integral condition at (x, r):
/// ∫_r^∞ [ess sup_{s>t} φ(x,s)]^{1/p} (avg_{B(x,t)} w)^{1/p - 1/q} ρ(t) dt/t.
pub fn adams_integral_lhs(
    phi: &PhiFunction,
    kernel: &Kernel,
    w: &Weight,
    e: &ExponentSet,
    x: &Point,
    r: f64,
) -> Result<f64> {
    let h = |t: f64| -> Result<f64> {
        let rho = kernel.eval(t);
        if rho == 0.0 {
            return Ok(0.0);
        }
        let sup = phi_tail_sup(phi, x, t);
        if sup == 0.0 {
            return Ok(0.0);
        }
        let avg = average(w, 1.0, x, t)?;
        Ok(sup.powf(1.0 / e.p) * avg.powf(1.0 / e.p - 1.0 / e.q) * rho / t)
    };
    tail_value(&h, r, kernel_onset(kernel))
}

/// sup over (x, r) of LHS(x, r) ρ(r)^{p/(q-p)}.
pub fn check_adams_integral(
    phi: &PhiFunction,
    kernel: &Kernel,
    w: &Weight,
    e: &ExponentSet,
    x_grid: &[Point],
    r_grid: &LogGrid,
) -> Result<ConditionReport> {
    if x_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let value = |c: usize, r: f64| -> Result<f64> {
        let rho = kernel.eval(r);
        if rho == 0.0 {
            return Ok(0.0);
        }
        let lhs = adams_integral_lhs(phi, kernel, w, e, &x_grid[c], r)?;
        if lhs == 0.0 {
            return Ok(0.0);
        }
        Ok(lhs * rho.powf(e.p / (e.q - e.p)))
    };
    let s = scan_sup_cells(&value, x_grid.len(), r_grid)?;
    Ok(sup_to_report(
        "adams-integral",
        &s,
        Extremal::CenterRadius {
            center: x_grid[s.cell],
            r: s.at,
        },
        true,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn o() -> Point {
        Point::origin(1)
    }

    fn r_grid() -> LogGrid {
        LogGrid::radius_default()
    }

    #[test]
    fn prag38_classical_is_constant() {
        let k = Kernel::power(1, 0.25).unwrap();
        let w = Weight::unit(1);
        let grid = BallGrid::new(vec![o(), Point::on_axis(1, 1.0)], r_grid()).unwrap();
        let r = check_prag38(&k, &w, &ExponentSet::new(2.0, 4.0).unwrap(), &grid).unwrap();
        assert!(r.holds && r.stable);
        // (2r)^{1/4} (2r)^{1/2} r^{-3/4}
        assert_relative_eq!(r.empirical_c.value(), 2f64.powf(0.75), max_relative = 1e-8);
        let r = check_prag38(&k, &w, &ExponentSet::new(2.0, 3.5).unwrap(), &grid).unwrap();
        assert!(!r.holds && r.empirical_c.is_divergent());
        let zero = Kernel::table(1, vec![1.0, 2.0], vec![0.0, 0.0]).unwrap();
        let r = check_prag38(&zero, &w, &ExponentSet::new(2.0, 4.0).unwrap(), &grid).unwrap();
        assert!(r.holds);
        assert_eq!(r.empirical_c, Extended::Finite(0.0));
    }

    #[test]
    fn spanne_pair_classical() {
        // n = 1, p = 2, q = 4, λ = 1/4, μ = 1/2
        let phi1 = PhiFunction::morrey(0.25, 1, 2.0).unwrap();
        let phi2 = PhiFunction::morrey(0.5, 1, 4.0).unwrap();
        let e = ExponentSet::new(2.0, 4.0).unwrap();
        let r = check_spanne_pair(&phi1, &phi2, &e, &o(), &r_grid()).unwrap();
        assert!(r.holds && r.stable);
        // φ2(t/2) = 2^{(n-μ)/q} φ2(t) sits in the denominator
        assert_relative_eq!(
            r.empirical_c.value(),
            2f64.powf(-0.5 / 4.0),
            max_relative = 1e-10
        );
        let big = PhiFunction::morrey(1.5, 1, 2.0).unwrap();
        let r = check_spanne_pair(&big, &phi2, &e, &o(), &r_grid()).unwrap();
        assert!(!r.holds && r.empirical_c.is_divergent());
        assert!(ExponentSet::new(2.0, 2.0).is_err());
    }

    #[test]
    fn spanne_integral_classical_and_endpoint() {
        let k = Kernel::power(1, 0.25).unwrap();
        let w = Weight::unit(1);
        let e = ExponentSet::new(2.0, 4.0).unwrap();
        let phi1 = PhiFunction::morrey(0.25, 1, 2.0).unwrap();
        let phi2 = PhiFunction::morrey(0.5, 1, 4.0).unwrap();
        let r = check_spanne_integral(&phi1, &phi2, &k, &w, &e, &o(), &r_grid()).unwrap();
        assert!(r.holds && r.stable, "{r:?}");
        // 2^{1/2} ∫_1^∞ t^{-1/8} dt/t = 8·√2
        assert_relative_eq!(
            r.empirical_c.value(),
            8.0 * 2f64.sqrt(),
            max_relative = 1e-6
        );

        // λ = n - αp = 1/2
        let phi1 = PhiFunction::morrey(0.5, 1, 2.0).unwrap();
        let phi2 = PhiFunction::morrey(1.0, 1, 4.0).unwrap();
        let r = check_spanne_integral(&phi1, &phi2, &k, &w, &e, &o(), &r_grid()).unwrap();
        assert!(!r.holds && r.empirical_c.is_divergent());

        let zero = Kernel::table(1, vec![1.0, 2.0], vec![0.0, 0.0]).unwrap();
        let r = check_spanne_integral(&phi1, &phi2, &zero, &w, &e, &o(), &r_grid()).unwrap();
        assert!(r.holds);
        assert_eq!(r.empirical_c, Extended::Finite(0.0));
    }

    #[test]
    fn adams_phi_examples() {
        let g = LogGrid::radius_default();
        let xs = [o()];
        let r = check_adams_phi(&PhiFunction::power(-0.1).unwrap(), &xs, &g).unwrap();
        assert!(r.one_sided.holds);
        assert_eq!(r.one_sided.empirical_c, Extended::Finite(1.0));
        assert!(!r.two_sided.holds);
        let r = check_adams_phi(&PhiFunction::power(0.0).unwrap(), &xs, &g).unwrap();
        assert_eq!(r.one_sided.empirical_c, Extended::Finite(1.0));
        assert_eq!(r.two_sided.empirical_c, Extended::Finite(1.0));
        let r = check_adams_phi(&PhiFunction::power(1.0).unwrap(), &xs, &g).unwrap();
        assert!(!r.one_sided.holds && r.one_sided.empirical_c.is_divergent());
    }

    #[test]
    fn adams_integral_classical() {
        // n = 1, λ = 1/2, α = 1/8, p = 2; 1/p - 1/q = α/(n - λ) gives q = 4
        let k = Kernel::power(1, 0.125).unwrap();
        let w = Weight::unit(1);
        let phi = PhiFunction::power(-0.5).unwrap();
        let e = ExponentSet::new(2.0, 4.0).unwrap();
        let xs = [o(), Point::on_axis(1, 1.0)];
        let r = check_adams_integral(&phi, &k, &w, &e, &xs, &r_grid()).unwrap();
        assert!(r.holds && r.stable, "{r:?}");
        // ∫_r^∞ t^{-1/4 + 1/8 - 1} dt = 8 r^{-1/8}, times r^{1/8}
        assert_relative_eq!(r.empirical_c.value(), 8.0, max_relative = 1e-6);

        let k = Kernel::power(1, 0.25).unwrap();
        let r = check_adams_integral(&phi, &k, &w, &e, &xs, &r_grid()).unwrap();
        assert!(!r.holds && r.empirical_c.is_divergent());

        let zero = Kernel::table(1, vec![1.0, 2.0], vec![0.0, 0.0]).unwrap();
        let r = check_adams_integral(&phi, &zero, &w, &e, &xs, &r_grid()).unwrap();
        assert!(r.holds);
    }
}
