//! One-dimensional quadrature: Gauss–Legendre and Gauss–Kronrod rules, adaptive
//! bisection, dyadic grading towards singular endpoints, and dyadic tails to
//! infinity with a geometric-ratio divergence detector.
//!
//! All stopping rules are relative, so integrals of `c * f` follow the same node
//! sequence as integrals of `f`.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Panel ratio at or above which a dyadic sequence counts as non-decaying.
pub const NON_DECAY_RATIO: f64 = 1.0 - 1e-3;
/// Consecutive non-decaying panels that declare divergence.
pub const DIVERGENCE_RUN: usize = 8;

const GRADED_ORDER: usize = 16;
const MAX_GRADED_PANELS: usize = 400;
const GRADED_STALL_AFTER: usize = 20;
const EXHAUSTED_RUN: usize = 3;
const MAX_TAIL_PANELS: usize = 900;
const MAX_ADAPTIVE_INTERVALS: usize = 400;

/// Gauss–Legendre nodes and weights on [-1, 1], by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            if n == 1 {
                p1 = z;
                p0 = 1.0;
            } else {
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
            }
            // p1 = P_n(z), p0 = P_{n-1}(z)
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn graded_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GRADED_ORDER))
}

/// Fixed-order Gauss–Legendre on [a, b].
pub fn gl_fixed<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<f64> {
    let (x, w) = graded_rule();
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    let mut s = 0.0;
    for (xi, wi) in x.iter().zip(w) {
        let t = c + h * xi;
        s += wi * checked(f, t)?;
    }
    Ok(s * h)
}

// Kronrod 15-point extension of the 7-point Gauss rule (QUADPACK constants).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[inline]
fn checked<F: Fn(f64) -> f64>(f: &F, t: f64) -> Result<f64> {
    let v = f(t);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Evaluation {
            at: t,
            what: format!("integrand returned {v}"),
        })
    }
}

/// One GK15 panel: (Kronrod value, |Kronrod - Gauss|).
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<(f64, f64)> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = checked(f, c)?;
    let mut rk = fc * WGK[7];
    let mut rg = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = checked(f, c - dx)?;
        let f2 = checked(f, c + dx)?;
        rk += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            rg += WG[j / 2] * (f1 + f2);
        }
    }
    Ok((rk * h, ((rk - rg) * h).abs()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quad {
    pub value: f64,
    pub abs_error: f64,
}

/// Globally adaptive GK15 bisection on a finite interval.
pub fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> Result<Quad> {
    if a == b {
        return Ok(Quad {
            value: 0.0,
            abs_error: 0.0,
        });
    }
    let (v, e) = gk15(f, a, b)?;
    let mut intervals = vec![(a, b, v, e)];
    let mut total = v;
    let mut err = e;
    while err > rel_tol * total.abs() && intervals.len() < MAX_ADAPTIVE_INTERVALS {
        let (idx, _) = intervals
            .iter()
            .enumerate()
            .fold(
                (0, -1.0),
                |acc, (i, iv)| if iv.3 > acc.1 { (i, iv.3) } else { acc },
            );
        let (lo, hi, pv, pe) = intervals.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            intervals.push((lo, hi, pv, 0.0));
            err -= pe;
            continue;
        }
        let (v1, e1) = gk15(f, lo, mid)?;
        let (v2, e2) = gk15(f, mid, hi)?;
        total += v1 + v2 - pv;
        err += e1 + e2 - pe;
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
    // re-sum to shed accumulated cancellation
    let value: f64 = intervals.iter().map(|iv| iv.2).sum();
    let abs_error: f64 = intervals.iter().map(|iv| iv.3).sum();
    Ok(Quad { value, abs_error })
}

/// Outcome of summing a dyadic panel sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeriesOutcome {
    Converged { value: f64, panels: usize },
    Divergent { panels: usize, last_ratio: f64 },
}

impl SeriesOutcome {
    pub fn value(&self) -> Option<f64> {
        match self {
            SeriesOutcome::Converged { value, .. } => Some(*value),
            SeriesOutcome::Divergent { .. } => None,
        }
    }
}

/// Accumulates dyadic panels and decides convergence by geometric-tail
/// extrapolation or divergence by a run of non-decaying panel ratios.
struct PanelSeries {
    rel_tol: f64,
    sum: f64,
    prev: Option<f64>,
    prev_ratio: Option<f64>,
    zero_run: usize,
    /// Panels required before an all-zero sum may be declared converged.
    min_zero: usize,
    stall_run: usize,
    /// Like `stall_run` but ignoring `stall_after`; read only when the panels run out.
    raw_run: usize,
    /// Panels that never count toward a divergence run.
    stall_after: usize,
    stable_run: usize,
    count: usize,
}

impl PanelSeries {
    fn new(rel_tol: f64, min_zero: usize, stall_after: usize) -> Self {
        PanelSeries {
            rel_tol,
            sum: 0.0,
            prev: None,
            prev_ratio: None,
            zero_run: 0,
            min_zero,
            stall_run: 0,
            raw_run: 0,
            stall_after,
            stable_run: 0,
            count: 0,
        }
    }

    /// `count_stall`: whether this panel may contribute to a divergence run or
    /// to a run of zero panels that ends the sum.
    fn push(&mut self, p: f64, count_stall: bool) -> Option<SeriesOutcome> {
        self.count += 1;
        self.sum += p;
        let ratio = match self.prev {
            Some(q) if q != 0.0 => Some(p / q),
            Some(_) if p == 0.0 => Some(0.0),
            Some(_) => Some(f64::INFINITY),
            None => None,
        };
        self.prev = Some(p);

        if p == 0.0 {
            self.zero_run += 1;
            if count_stall && self.zero_run >= 3 && self.count >= self.min_zero {
                return Some(SeriesOutcome::Converged {
                    value: self.sum,
                    panels: self.count,
                });
            }
        } else {
            self.zero_run = 0;
        }

        let r = ratio?;
        if p != 0.0 && r >= NON_DECAY_RATIO {
            self.raw_run += 1;
        } else {
            self.raw_run = 0;
        }
        if count_stall && self.count > self.stall_after && p != 0.0 && r >= NON_DECAY_RATIO {
            self.stall_run += 1;
            if self.stall_run >= DIVERGENCE_RUN {
                return Some(SeriesOutcome::Divergent {
                    panels: self.count,
                    last_ratio: r,
                });
            }
        } else {
            self.stall_run = 0;
        }

        if !count_stall {
            self.prev_ratio = Some(r);
            self.stable_run = 0;
            return None;
        }
        let scale = self.sum.abs();
        if scale == 0.0 && self.count < self.min_zero {
            return None;
        }
        if (0.0..NON_DECAY_RATIO).contains(&r) {
            let tail = p * r / (1.0 - r);
            let dr = self.prev_ratio.map_or(f64::INFINITY, |q| (r - q).abs());
            if dr <= 1e-7 {
                self.stable_run += 1;
            } else {
                self.stable_run = 0;
            }
            self.prev_ratio = Some(r);
            if tail.abs() <= self.rel_tol * scale {
                return Some(SeriesOutcome::Converged {
                    value: self.sum + tail,
                    panels: self.count,
                });
            }
            if self.stable_run >= 3 && tail.abs() * dr / (1.0 - r) <= self.rel_tol * scale {
                return Some(SeriesOutcome::Converged {
                    value: self.sum + tail,
                    panels: self.count,
                });
            }
        } else {
            self.prev_ratio = Some(r);
            self.stable_run = 0;
            if p.abs() <= 1e-3 * self.rel_tol * scale && r.abs() < 1.0 {
                return Some(SeriesOutcome::Converged {
                    value: self.sum,
                    panels: self.count,
                });
            }
        }
        None
    }

    fn exhausted(&self) -> SeriesOutcome {
        match self.prev_ratio {
            Some(r) if (0.0..NON_DECAY_RATIO).contains(&r) => {
                let p = self.prev.unwrap_or(0.0);
                SeriesOutcome::Converged {
                    value: self.sum + p * r / (1.0 - r),
                    panels: self.count,
                }
            }
            // one rounding-level jump at the very end is not a singularity
            Some(r) if self.raw_run >= EXHAUSTED_RUN => SeriesOutcome::Divergent {
                panels: self.count,
                last_ratio: r,
            },
            _ => SeriesOutcome::Converged {
                value: self.sum,
                panels: self.count,
            },
        }
    }
}

/// ∫ over the segment between `sing` and `other` (always in increasing
/// orientation, whichever endpoint is singular), with panels whose distance
/// to `sing` halves at each step. Handles integrable power-type endpoint
/// singularities and endpoint jumps; reports divergence for non-integrable ones.
pub fn graded<F: Fn(f64) -> f64>(
    f: &F,
    sing: f64,
    other: f64,
    rel_tol: f64,
) -> Result<SeriesOutcome> {
    let h = other - sing;
    if h == 0.0 {
        return Ok(SeriesOutcome::Converged {
            value: 0.0,
            panels: 0,
        });
    }
    // a segment that vanishes away from `sing` may still carry mass near it. Growth
    // toward structure near (not at) `sing` looks singular until the panels are smaller
    // than its distance, so divergence runs start once the distance to `sing` is below
    // both |sing| and 2^-GRADED_STALL_AFTER of the segment.
    let scale = h.abs() * 0.5f64.powi(GRADED_STALL_AFTER as i32);
    let onset = if sing == 0.0 {
        scale
    } else {
        scale.min(sing.abs())
    };
    let halvings = (h.abs() / onset).log2().ceil().max(0.0) as usize;
    let mut series = PanelSeries::new(rel_tol, 64, halvings);
    let mut far = h;
    for _ in 0..MAX_GRADED_PANELS {
        let near = 0.5 * far;
        let (a, b) = (sing + near, sing + far);
        // below a few ulps of `sing` the nodes are quantised and ratios are noise
        if a == sing || (b - a).abs() <= 64.0 * f64::EPSILON * sing.abs() {
            break;
        }
        let mut p = gl_fixed(f, a, b)?;
        if h < 0.0 {
            p = -p;
        }
        if let Some(out) = series.push(p, true) {
            return Ok(out);
        }
        far = near;
    }
    Ok(series.exhausted())
}

/// ∫_a^∞ f by dyadic panels [a 2^k, a 2^{k+1}]. Divergence runs only start
/// counting once the panel's left end reaches `onset`.
pub fn tail<F: Fn(f64) -> f64>(f: &F, a: f64, onset: f64, rel_tol: f64) -> Result<SeriesOutcome> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::invalid(format!(
            "tail start must be positive, got {a}"
        )));
    }
    let mut series = PanelSeries::new(rel_tol, 4, 0);
    let mut lo = a;
    for _ in 0..MAX_TAIL_PANELS {
        let hi = 2.0 * lo;
        if !hi.is_finite() {
            break;
        }
        let q = adaptive(f, lo, hi, rel_tol.min(1e-10) * 1e-2)?;
        if let Some(out) = series.push(q.value, lo >= onset) {
            return Ok(out);
        }
        lo = hi;
    }
    Ok(series.exhausted())
}

/// `tail` for an integrand that may fail; the first failure is returned.
pub fn tail_fallible<F: Fn(f64) -> Result<f64>>(
    f: &F,
    a: f64,
    onset: f64,
    rel_tol: f64,
) -> Result<SeriesOutcome> {
    let err = std::cell::RefCell::new(None);
    let g = |t: f64| match f(t) {
        Ok(v) => v,
        Err(e) => {
            err.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let out = tail(&g, a, onset, rel_tol);
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    out
}

/// Convenience: `tail` that must converge.
pub fn tail_finite<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    onset: f64,
    rel_tol: f64,
    what: &str,
) -> Result<f64> {
    match tail(f, a, onset, rel_tol)? {
        SeriesOutcome::Converged { value, .. } => Ok(value),
        SeriesOutcome::Divergent { .. } => Err(Error::Divergent(what.to_string())),
    }
}

/// ∫_a^b f with interior breakpoints where `f` may jump, kink, or have an
/// integrable power singularity. Endpoints are treated the same way when
/// flagged in `hard_ends`.
pub fn integrate_pieces<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    breaks: &[f64],
    hard_ends: (bool, bool),
    rel_tol: f64,
) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    let mut nodes: Vec<(f64, bool)> = vec![(a, hard_ends.0)];
    let mut inner: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|&x| x > a && x < b && (x - a) > 1e-14 * b.abs() && (b - x) > 1e-14 * b.abs())
        .collect();
    inner.sort_by(|x, y| x.partial_cmp(y).unwrap());
    inner.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * x.abs().max(1.0));
    nodes.extend(inner.into_iter().map(|x| (x, true)));
    nodes.push((b, hard_ends.1));

    let mut total = 0.0;
    for w in nodes.windows(2) {
        let ((x0, h0), (x1, h1)) = (w[0], w[1]);
        total += piece(f, x0, x1, h0, h1, rel_tol)?;
    }
    Ok(total)
}

fn piece<F: Fn(f64) -> f64>(
    f: &F,
    x0: f64,
    x1: f64,
    h0: bool,
    h1: bool,
    rel_tol: f64,
) -> Result<f64> {
    let need = |o: SeriesOutcome, at: f64| -> Result<f64> {
        o.value().ok_or(Error::Evaluation {
            at,
            what: "non-integrable singularity".into(),
        })
    };
    match (h0, h1) {
        (true, true) => {
            let mid = 0.5 * (x0 + x1);
            let left = need(graded(f, x0, mid, rel_tol)?, x0)?;
            let right = need(graded(f, x1, mid, rel_tol)?, x1)?;
            Ok(left + right)
        }
        (true, false) => need(graded(f, x0, x1, rel_tol)?, x0),
        (false, true) => need(graded(f, x1, x0, rel_tol)?, x1),
        (false, false) => Ok(adaptive(f, x0, x1, rel_tol)?.value),
    }
}

/// ∫_a^b for a smooth positive-scale integrand spread over many decades:
/// geometric panels [a 2^k, a 2^{k+1}] clipped at `b`.
pub fn integrate_geometric<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    if a <= 0.0 {
        return Err(Error::invalid("geometric panels need a > 0"));
    }
    let mut s = 0.0;
    let mut lo = a;
    while lo < b {
        let hi = (2.0 * lo).min(b);
        s += adaptive(f, lo, hi, rel_tol)?.value;
        lo = hi;
    }
    Ok(s)
}
