//! Zero counting and root polishing for analytic maps of one complex
//! variable, shared by the scattering and resonance modules.
//!
//! Counting uses the argument principle with continuous phase tracking
//! along rectangle boundaries: edges are sampled densely enough that no
//! adjacent phase step reaches a quarter turn, which pins the winding
//! number without derivatives. Scanning subdivides a rectangle until each
//! cell holds at most one zero (by winding), then polishes from the cell
//! centre with a complex secant iteration (Muller step as fallback).
//!
//! The engine is variable-agnostic: callers hand in any analytic map
//! (in `k`, in `z`, ...) as a closure returning `Result<Complex64, String>`
//! so evaluation failures travel up with context instead of panicking.

use num_complex::Complex64;
use std::fmt;

/// Axis-aligned closed rectangle `[re.0, re.1] x [im.0, im.1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub re: (f64, f64),
    pub im: (f64, f64),
}

impl Rect {
    pub fn new(re_lo: f64, re_hi: f64, im_lo: f64, im_hi: f64) -> Self {
        Rect {
            re: (re_lo.min(re_hi), re_lo.max(re_hi)),
            im: (im_lo.min(im_hi), im_lo.max(im_hi)),
        }
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.re.0 + self.re.1), 0.5 * (self.im.0 + self.im.1))
    }

    pub fn diameter(&self) -> f64 {
        let dr = self.re.1 - self.re.0;
        let di = self.im.1 - self.im.0;
        (dr * dr + di * di).sqrt()
    }

    pub fn contains(&self, k: Complex64) -> bool {
        k.re >= self.re.0 && k.re <= self.re.1 && k.im >= self.im.0 && k.im <= self.im.1
    }

    /// Grow every side outward by `pad` (absolute units).
    fn padded(&self, pad: f64) -> Rect {
        Rect {
            re: (self.re.0 - pad, self.re.1 + pad),
            im: (self.im.0 - pad, self.im.1 + pad),
        }
    }

    fn quarters(&self) -> [Rect; 4] {
        let rm = 0.5 * (self.re.0 + self.re.1);
        let im = 0.5 * (self.im.0 + self.im.1);
        [
            Rect { re: (self.re.0, rm), im: (self.im.0, im) },
            Rect { re: (rm, self.re.1), im: (self.im.0, im) },
            Rect { re: (self.re.0, rm), im: (im, self.im.1) },
            Rect { re: (rm, self.re.1), im: (im, self.im.1) },
        ]
    }

    /// The four corners in positive (counter-clockwise) orientation.
    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re.0, self.im.0),
            Complex64::new(self.re.1, self.im.0),
            Complex64::new(self.re.1, self.im.1),
            Complex64::new(self.re.0, self.im.1),
        ]
    }
}

#[derive(Debug, Clone)]
pub enum ZeroError {
    /// A zero sits on (or numerically on) the contour and jittering the
    /// boundary did not shake it off.
    BoundaryZero { at: Complex64 },
    /// The underlying map failed to evaluate.
    Eval(String),
    /// Root polishing ran out of iterations.
    NoConvergence { last: Complex64, residual: f64 },
    /// Quadtree hit the depth cap before isolating zeros; the zeros found
    /// so far are reported alongside.
    DepthExceeded { found: Vec<FoundZero> },
}

impl fmt::Display for ZeroError {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZeroError::BoundaryZero { at } => {
                write!(fm, "zero on the counting contour near {at}")
            }
            ZeroError::Eval(msg) => write!(fm, "evaluation failed: {msg}"),
            ZeroError::NoConvergence { last, residual } => write!(
                fm,
                "root refinement did not converge (last iterate {last}, residual {residual:.3e})"
            ),
            ZeroError::DepthExceeded { found } => write!(
                fm,
                "subdivision depth exhausted with {} zero(s) isolated",
                found.len()
            ),
        }
    }
}

impl std::error::Error for ZeroError {}

/// A polished zero with its winding-number multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoundZero {
    pub location: Complex64,
    pub order: u32,
}

/// Highest multiplicity the scanner resolves before giving up on
/// splitting a cluster; generic maps have simple zeros.
pub const MAX_ORDER: u32 = 3;

const BASE_SAMPLES_PER_EDGE: usize = 64;
const MAX_SAMPLES_PER_EDGE: usize = 32_768;
const JITTER_RETRIES: usize = 3;

/// Winding number of `f` around `rect` (counter-clockwise), by adaptive
/// continuous phase tracking. Fails with [`ZeroError::BoundaryZero`] when a
/// phase step refuses to settle below a quarter turn, which is the signature
/// of a zero on the contour.
pub fn winding_number<F>(f: &F, rect: &Rect) -> Result<i64, ZeroError>
where
    F: Fn(Complex64) -> Result<Complex64, String>,
{
    let corners = rect.corners();
    let mut total = 0.0f64;
    for e in 0..4 {
        total += edge_phase_change(f, corners[e], corners[(e + 1) % 4])?;
    }
    let winding = total / std::f64::consts::TAU;
    let rounded = winding.round();
    if (winding - rounded).abs() > 0.25 {
        // Phase bookkeeping should close exactly; a broken closure means a
        // sample landed indistinguishably close to a zero.
        return Err(ZeroError::BoundaryZero { at: rect.center() });
    }
    Ok(rounded as i64)
}

/// Accumulated change of `arg f` along one straight edge.
fn edge_phase_change<F>(f: &F, a: Complex64, b: Complex64) -> Result<f64, ZeroError>
where
    F: Fn(Complex64) -> Result<Complex64, String>,
{
    let point = |t: f64| a + (b - a) * t;
    let eval = |t: f64| -> Result<Complex64, ZeroError> {
        let w = f(point(t)).map_err(ZeroError::Eval)?;
        if !w.re.is_finite() || !w.im.is_finite() {
            return Err(ZeroError::Eval(format!("non-finite value at {}", point(t))));
        }
        if w.norm() < 1e-280 {
            return Err(ZeroError::BoundaryZero { at: point(t) });
        }
        Ok(w)
    };

    // Seed samples, then bisect any segment whose phase step is too coarse.
    let n = BASE_SAMPLES_PER_EDGE;
    let mut ts: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
    let mut ws: Vec<Complex64> = Vec::with_capacity(ts.len());
    for &t in &ts {
        ws.push(eval(t)?);
    }

    let mut total = 0.0;
    let mut i = 0;
    let mut budget = MAX_SAMPLES_PER_EDGE;
    while i + 1 < ts.len() {
        let step = (ws[i + 1] / ws[i]).arg();
        if step.abs() < std::f64::consts::FRAC_PI_2 {
            total += step;
            i += 1;
            continue;
        }
        if budget == 0 || ts[i + 1] - ts[i] < 1e-12 {
            // The step cannot be resolved: a zero is pinned to the contour.
            return Err(ZeroError::BoundaryZero {
                at: point(0.5 * (ts[i] + ts[i + 1])),
            });
        }
        let tm = 0.5 * (ts[i] + ts[i + 1]);
        ts.insert(i + 1, tm);
        ws.insert(i + 1, eval(tm)?);
        budget -= 1;
    }
    Ok(total)
}

/// Winding number with boundary-zero recovery: on a contour hit, the
/// rectangle is padded outward by a growing whisker and recounted, up to
/// [`JITTER_RETRIES`] times. Returns the count and the rectangle actually
/// used (so callers can keep scan bookkeeping consistent).
pub fn count_with_jitter<F>(f: &F, rect: &Rect) -> Result<(i64, Rect), ZeroError>
where
    F: Fn(Complex64) -> Result<Complex64, String>,
{
    let mut attempt = 0;
    let mut last = ZeroError::BoundaryZero { at: rect.center() };
    loop {
        let candidate = if attempt == 0 {
            *rect
        } else {
            rect.padded(rect.diameter() * 2.3e-4 * attempt as f64)
        };
        match winding_number(f, &candidate) {
            Ok(n) => return Ok((n, candidate)),
            Err(e @ ZeroError::BoundaryZero { .. }) => {
                last = e;
                attempt += 1;
                if attempt > JITTER_RETRIES {
                    return Err(last);
                }
            }
            Err(e) => return Err(e),
        }
    }
}

/// Polish a root of `f` starting from `guess`: complex secant iteration
/// with a Muller (three-point quadratic) step when the secant stalls.
/// Convergence requires the step to drop below `tol`; the caller judges the
/// final residual against its own scale.
pub fn refine<F>(f: &F, guess: Complex64, tol: f64, max_iter: usize) -> Result<Complex64, ZeroError>
where
    F: Fn(Complex64) -> Result<Complex64, String>,
{
    let eval = |k: Complex64| -> Result<Complex64, ZeroError> {
        let w = f(k).map_err(ZeroError::Eval)?;
        if !w.re.is_finite() || !w.im.is_finite() {
            return Err(ZeroError::Eval(format!("non-finite value at {k}")));
        }
        Ok(w)
    };

    // Two nearby starters for the secant; the offset is scale-aware.
    let offset = (guess.norm() * 1e-5).max(1e-7);
    let mut k0 = guess + Complex64::new(offset, 0.5 * offset);
    let mut k1 = guess;
    let mut w0 = eval(k0)?;
    let mut w1 = eval(k1)?;
    if w1.norm() == 0.0 {
        return Ok(k1);
    }

    // Previous-previous point for Muller.
    let mut k2_prev: Option<(Complex64, Complex64)> = None;

    for _ in 0..max_iter {
        let denom = w1 - w0;
        let secant_ok = denom.norm() > 1e-300;
        let mut step = if secant_ok {
            -w1 * (k1 - k0) / denom
        } else {
            Complex64::new(0.0, 0.0)
        };

        // Muller step when the secant is degenerate or wildly large.
        let max_step = 0.25 * (1.0 + k1.norm());
        if (!secant_ok || step.norm() > max_step) && k2_prev.is_some() {
            let (km, wm) = k2_prev.unwrap();
            if let Some(m) = muller_step(km, wm, k0, w0, k1, w1) {
                step = m;
            }
        }
        if step.norm() > max_step {
            step *= max_step / step.norm();
        }

        let k_next = k1 + step;
        let w_next = eval(k_next)?;

        k2_prev = Some((k0, w0));
        k0 = k1;
        w0 = w1;
        k1 = k_next;
        w1 = w_next;

        if step.norm() < tol {
            return Ok(k1);
        }
    }
    Err(ZeroError::NoConvergence {
        last: k1,
        residual: w1.norm(),
    })
}

/// Root of the quadratic through three points, taken on the branch closest
/// to `k2` (the most recent iterate). Returns the step from `k2`.
fn muller_step(
    k0: Complex64,
    w0: Complex64,
    k1: Complex64,
    w1: Complex64,
    k2: Complex64,
    w2: Complex64,
) -> Option<Complex64> {
    let q = (k2 - k1) / (k1 - k0);
    let a = q * w2 - q * (1.0 + q) * w1 + q * q * w0;
    let b = (2.0 * q + 1.0) * w2 - (1.0 + q) * (1.0 + q) * w1 + q * q * w0;
    let cc = (1.0 + q) * w2;
    let disc = (b * b - 4.0 * a * cc).sqrt();
    let d1 = b + disc;
    let d2 = b - disc;
    let denom = if d1.norm() >= d2.norm() { d1 } else { d2 };
    if denom.norm() < 1e-300 {
        return None;
    }
    Some(-(k2 - k1) * 2.0 * cc / denom)
}

/// A rough local magnitude scale of `f` near `k`: the median of `|f|` over
/// a small circle, for residual-acceptance decisions at polished roots.
pub fn local_scale<F>(f: &F, k: Complex64, radius: f64) -> Result<f64, ZeroError>
where
    F: Fn(Complex64) -> Result<Complex64, String>,
{
    let mut mags = Vec::with_capacity(8);
    for j in 0..8 {
        let ang = std::f64::consts::TAU * j as f64 / 8.0;
        let w = f(k + radius * Complex64::new(ang.cos(), ang.sin())).map_err(ZeroError::Eval)?;
        mags.push(w.norm());
    }
    mags.sort_by(f64::total_cmp);
    Ok(0.5 * (mags[3] + mags[4]))
}

/// All zeros of `f` in `rect`: quadtree subdivision until each cell winds
/// at most once (clusters that refuse to split within `max_depth` are
/// reported as higher-order zeros up to [`MAX_ORDER`]), then polishing and
/// deduplication at `10 * tol`.
pub fn scan<F>(
    f: &F,
    rect: &Rect,
    max_depth: usize,
    tol: f64,
) -> Result<Vec<FoundZero>, ZeroError>
where
    F: Fn(Complex64) -> Result<Complex64, String>,
{
    let mut found: Vec<FoundZero> = Vec::new();
    let mut stack = vec![(*rect, 0usize)];
    let mut depth_hit = false;

    while let Some((cell, depth)) = stack.pop() {
        let (count, counted) = count_with_jitter(f, &cell)?;
        if count <= 0 {
            continue;
        }
        let tiny = counted.diameter() < 1000.0 * tol;
        if count == 1 || (tiny && count <= MAX_ORDER as i64) {
            let mut root = refine(f, counted.center(), tol, 50)?;
            if count > 1 {
                // A genuinely multiple zero defeats the secant's local
                // model; the cell is tiny, so its centre is already the
                // best available location.
                root = counted.center();
            }
            found.push(FoundZero {
                location: root,
                order: count as u32,
            });
            continue;
        }
        if depth >= max_depth {
            depth_hit = true;
            continue;
        }
        for q in counted.quarters() {
            stack.push((q, depth + 1));
        }
    }

    // Deterministic order + dedup (jittered cells can overlap slightly).
    found.sort_by(|a, b| {
        a.location
            .re
            .total_cmp(&b.location.re)
            .then(a.location.im.total_cmp(&b.location.im))
    });
    let mut merged: Vec<FoundZero> = Vec::new();
    for z in found {
        match merged.last() {
            Some(last) if (last.location - z.location).norm() < 10.0 * tol => {}
            _ => merged.push(z),
        }
    }

    if depth_hit {
        return Err(ZeroError::DepthExceeded { found: merged });
    }
    Ok(merged)
}
