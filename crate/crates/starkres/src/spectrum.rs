//! Bound states of the field-free operator `H = p^2 + V`.
//!
//! Compact support makes the negative spectrum concrete: an eigenfunction is
//! a pure exponential on either side of the support, `kappa_minus
//! e^{sqrt(-lambda0) x}` to the left and `kappa_plus e^{-sqrt(-lambda0) x}`
//! to the right. Eigenvalues are located by scanning the Wronskian of the
//! left- and right-decaying solutions over a grid in `(-max|V|, 0)` and
//! bisecting each sign change. The returned [`BoundState`] carries everything
//! the small-field width prediction consumes: the tail amplitude
//! `kappa_minus` and the first perturbation coefficient
//! `lambda1 = (phi, x phi)`, with the tail portions of all integrals done in
//! closed form.

use num_complex::Complex64;

use crate::potential::Potential;
use crate::schrodinger::{self, BoundaryData, OdeError};

/// Points in the initial Wronskian sign scan over `(-max|V|, 0)`.
const SCAN_POINTS: usize = 400;
/// Absolute bisection tolerance on an eigenvalue.
const LAMBDA_TOL: f64 = 1e-12;
/// Stored eigenfunction samples (odd, so the origin is a node).
const PHI_SAMPLES: usize = 641;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// One negative eigenvalue of `H = p^2 + V` with its normalized
/// eigenfunction and the derived quantities the width formula needs.
#[derive(Debug, Clone)]
pub struct BoundState {
    /// The eigenvalue, strictly negative.
    pub lambda0: f64,
    /// `(x, phi(x))` samples on a uniform grid spanning the support plus two
    /// decay lengths on each side.
    pub phi: Vec<(f64, f64)>,
    /// Left tail amplitude: `phi(x) = kappa_minus e^{sqrt(-lambda0) x}` for
    /// `x <= -L`. Positive by construction.
    pub kappa_minus: f64,
    /// Right tail amplitude: `phi(x) = kappa_plus e^{-sqrt(-lambda0) x}` for
    /// `x >= L`. Sign carries the parity of the state.
    pub kappa_plus: f64,
    /// First perturbation coefficient `lambda1 = int x phi(x)^2 dx`.
    pub lambda1: f64,
    /// `|int phi^2 - 1|` re-measured by an independent one-sided sweep
    /// across the support; grows when the eigenvalue is off.
    pub norm_check: f64,
}

#[derive(Debug)]
pub enum SpectrumError {
    Ode(OdeError),
    Domain(String),
}

impl std::fmt::Display for SpectrumError {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SpectrumError::Ode(e) => write!(fm, "propagation failed: {e}"),
            SpectrumError::Domain(msg) => write!(fm, "{msg}"),
        }
    }
}

impl std::error::Error for SpectrumError {}

impl From<OdeError> for SpectrumError {
    fn from(e: OdeError) -> Self {
        SpectrumError::Ode(e)
    }
}

/// Wronskian at the origin of the left-decaying solution (seed
/// `(1, sqrt(-lambda))` at `-L`) against the right-decaying one (seed
/// `(1, -sqrt(-lambda))` at `+L`). Vanishes exactly at the eigenvalues.
fn matching_wronskian(p: &Potential, lambda: f64) -> Result<f64, OdeError> {
    let l = p.half_width();
    let kappa = (-lambda).sqrt();
    let z = c(lambda, 0.0);
    let left = schrodinger::propagate(
        p,
        z,
        0.0,
        &BoundaryData::new(-l, c(1.0, 0.0), c(kappa, 0.0)),
        0.0,
    )?;
    let right = schrodinger::propagate(
        p,
        z,
        0.0,
        &BoundaryData::new(l, c(1.0, 0.0), c(-kappa, 0.0)),
        0.0,
    )?;
    Ok((left.psi * right.dpsi - left.dpsi * right.psi).re)
}

/// All negative eigenvalues of `H = p^2 + V`, ascending. Empty when the
/// potential holds nothing (in particular for `V = 0` and pure barriers).
pub fn bound_states(p: &Potential) -> Result<Vec<BoundState>, SpectrumError> {
    let depth = p.max_abs();
    if depth == 0.0 {
        return Ok(Vec::new());
    }

    // Sign scan from -max|V| up to 0, then bisect each bracket. Every
    // eigenvalue sits strictly inside the interval, and in one dimension
    // they are simple, so transversal sign changes are all there is.
    let mut brackets: Vec<(f64, f64)> = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for j in 0..=SCAN_POINTS {
        let lam = -depth * (1.0 - j as f64 / SCAN_POINTS as f64);
        let w = matching_wronskian(p, lam)?;
        if let Some((lam_prev, w_prev)) = prev {
            if w_prev == 0.0 {
                brackets.push((lam_prev, lam_prev));
            } else if w_prev * w < 0.0 {
                brackets.push((lam_prev, lam));
            }
        }
        prev = Some((lam, w));
    }

    let mut states = Vec::with_capacity(brackets.len());
    for (mut a, mut b) in brackets {
        if a < b {
            let mut wa = matching_wronskian(p, a)?;
            while b - a > LAMBDA_TOL {
                let mid = 0.5 * (a + b);
                let wm = matching_wronskian(p, mid)?;
                if wm == 0.0 {
                    a = mid;
                    b = mid;
                    break;
                }
                if wa * wm < 0.0 {
                    b = mid;
                } else {
                    a = mid;
                    wa = wm;
                }
            }
        }
        states.push(assemble_state(p, 0.5 * (a + b))?);
    }
    Ok(states)
}

/// Build the normalized eigenfunction and read off `kappa_minus`,
/// `kappa_plus` and `lambda1`. The two decaying pieces are each propagated
/// inward (their growing, numerically stable direction) and glued at the
/// origin.
fn assemble_state(p: &Potential, lambda0: f64) -> Result<BoundState, SpectrumError> {
    let l = p.half_width();
    let kappa = (-lambda0).sqrt();
    let z = c(lambda0, 0.0);

    let ml = schrodinger::propagate_moments(
        p,
        z,
        0.0,
        &BoundaryData::new(-l, c(1.0, 0.0), c(kappa, 0.0)),
        0.0,
    )?;
    let mr = schrodinger::propagate_moments(
        p,
        z,
        0.0,
        &BoundaryData::new(l, c(1.0, 0.0), c(-kappa, 0.0)),
        0.0,
    )?;

    // Scale the right piece onto the left one at the origin, matching by
    // whichever of (psi, psi') is larger there -- odd states have a node at
    // the centre of a symmetric potential. At a true eigenvalue both ratios
    // agree because the Wronskian vanishes. The match uses plain propagation
    // (closed-form steps where available), not the quadrature sweep, so the
    // ratio is as accurate as the stored samples it has to glue.
    let left0 = schrodinger::propagate(
        p,
        z,
        0.0,
        &BoundaryData::new(-l, c(1.0, 0.0), c(kappa, 0.0)),
        0.0,
    )?;
    let right0 = schrodinger::propagate(
        p,
        z,
        0.0,
        &BoundaryData::new(l, c(1.0, 0.0), c(-kappa, 0.0)),
        0.0,
    )?;
    let s = if left0.psi.norm() >= left0.dpsi.norm() {
        (left0.psi / right0.psi).re
    } else {
        (left0.dpsi / right0.dpsi).re
    };

    // Interior integrals (the right-piece moments are signed from +L down to
    // 0, hence the minus), plus closed-form tails of the raw, unnormalized
    // pieces: the left piece is exactly e^{kappa(x+L)} for x <= -L and the
    // scaled right piece is s e^{-kappa(x-L)} for x >= L.
    let tail_n = 1.0 / (2.0 * kappa);
    let tail_x_left = -l / (2.0 * kappa) - 1.0 / (4.0 * kappa * kappa);
    let tail_x_right = l / (2.0 * kappa) + 1.0 / (4.0 * kappa * kappa);
    let s2 = s * s;
    let total_norm = ml.norm.re - s2 * mr.norm.re + tail_n + s2 * tail_n;
    let total_first = ml.first.re - s2 * mr.first.re + tail_x_left + s2 * tail_x_right;
    let scale = total_norm.sqrt().recip();

    let kappa_minus = scale * (kappa * l).exp();
    let kappa_plus = scale * s * (kappa * l).exp();
    let lambda1 = total_first / total_norm;

    // Independent re-measurement of the norm: one sweep left to right with
    // the normalized left seed, tails attached from the endpoint values. Any
    // eigenvalue error leaks the growing solution into the sweep and shows
    // up here.
    let os = schrodinger::propagate_moments(
        p,
        z,
        0.0,
        &BoundaryData::new(-l, c(scale, 0.0), c(kappa * scale, 0.0)),
        l,
    )?;
    let one_sided =
        os.norm.re + scale * scale * tail_n + os.end.psi.re * os.end.psi.re / (2.0 * kappa);
    let norm_check = (one_sided - 1.0).abs();

    let phi = sample_phi(p, lambda0, scale, s)?;

    Ok(BoundState {
        lambda0,
        phi,
        kappa_minus,
        kappa_plus,
        lambda1,
        norm_check,
    })
}

/// Uniform samples of the normalized eigenfunction over the support widened
/// by two decay lengths, using the analytic tails outside `[-L, L]`.
fn sample_phi(
    p: &Potential,
    lambda0: f64,
    scale: f64,
    s: f64,
) -> Result<Vec<(f64, f64)>, OdeError> {
    let l = p.half_width();
    let kappa = (-lambda0).sqrt();
    let z = c(lambda0, 0.0);
    let l_ext = l + 2.0 / kappa;
    let xs: Vec<f64> = (0..PHI_SAMPLES)
        .map(|i| -l_ext + 2.0 * l_ext * i as f64 / (PHI_SAMPLES - 1) as f64)
        .collect();
    let kappa_minus = scale * (kappa * l).exp();
    let kappa_plus = scale * s * (kappa * l).exp();

    let left_stations: Vec<f64> = xs.iter().copied().filter(|&x| x > -l && x <= 0.0).collect();
    let left_vals = schrodinger::sample_solution(
        p,
        z,
        0.0,
        &BoundaryData::new(-l, c(scale, 0.0), c(kappa * scale, 0.0)),
        &left_stations,
    )?;
    let mut right_stations: Vec<f64> =
        xs.iter().copied().filter(|&x| x > 0.0 && x < l).collect();
    right_stations.reverse();
    let right_vals = schrodinger::sample_solution(
        p,
        z,
        0.0,
        &BoundaryData::new(l, c(scale * s, 0.0), c(-kappa * scale * s, 0.0)),
        &right_stations,
    )?;

    let mut phi = Vec::with_capacity(PHI_SAMPLES);
    let mut li = 0;
    let mut ri = right_vals.len();
    for &x in &xs {
        let value = if x <= -l {
            kappa_minus * (kappa * x).exp()
        } else if x <= 0.0 {
            li += 1;
            left_vals[li - 1].psi.re
        } else if x < l {
            ri -= 1;
            right_vals[ri].psi.re
        } else {
            kappa_plus * (-kappa * x).exp()
        };
        phi.push((x, value));
    }
    Ok(phi)
}

/// Small-field prediction for the resonance width `-Im lambda(f)`:
/// `sqrt(-lambda0) kappa_minus^2 e^{-(4/3f)(-lambda0 - f lambda1)^{3/2}}`.
/// The equivalent coupling form `(2 kappa_minus sqrt(-lambda0))^2 /
/// (4 sqrt(-lambda0))` times the same exponential is evaluated alongside as
/// a consistency cross-check.
pub fn predicted_width(bs: &BoundState, f: f64) -> Result<f64, SpectrumError> {
    if !(f > 0.0) {
        return Err(SpectrumError::Domain(format!(
            "field strength must be positive, got {f}"
        )));
    }
    let shifted = -bs.lambda0 - f * bs.lambda1;
    if shifted <= 0.0 {
        return Err(SpectrumError::Domain(format!(
            "shifted eigenvalue -lambda0 - f lambda1 = {shifted} is not positive"
        )));
    }
    let kappa = (-bs.lambda0).sqrt();
    let damping = (-(4.0 / (3.0 * f)) * shifted.powf(1.5)).exp();
    let direct = kappa * bs.kappa_minus * bs.kappa_minus * damping;
    let coupling = -2.0 * bs.kappa_minus * kappa;
    let via_coupling = coupling * coupling / (4.0 * kappa) * damping;
    assert!(
        (direct - via_coupling).abs() <= 1e-9 * direct.abs().max(f64::MIN_POSITIVE),
        "width forms disagree: {direct:e} vs {via_coupling:e}"
    );
    Ok(direct)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::Segment;

    fn seg(x_lo: f64, x_hi: f64, v: f64) -> Segment {
        Segment { x_lo, x_hi, v }
    }

    /// Two-segment well, deeper on the left; the workhorse for everything
    /// that needs `lambda1 != 0`.
    fn lopsided_well() -> Potential {
        Potential::from_segments(vec![seg(-1.0, 0.0, -2.5), seg(0.0, 1.0, -1.0)], None).unwrap()
    }

    /// Bisect a 1D function with a sign change to near machine precision.
    fn bisect(mut lo: f64, mut hi: f64, g: impl Fn(f64) -> f64) -> f64 {
        let mut glo = g(lo);
        assert!(glo * g(hi) < 0.0, "oracle bracket");
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let gm = g(mid);
            if gm == 0.0 || hi - lo < 1e-15 {
                return mid;
            }
            if glo * gm < 0.0 {
                hi = mid;
            } else {
                lo = mid;
                glo = gm;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn nothing_to_hold_nothing_held() {
        assert!(bound_states(&Potential::zero()).unwrap().is_empty());
        assert!(bound_states(&Potential::square_barrier(2.0, 1.0))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn square_well_ground_state_matches_transcendental_oracle() {
        let p = Potential::square_well(-2.0, 1.0);
        let states = bound_states(&p).unwrap();
        assert_eq!(states.len(), 1);
        let bs = &states[0];

        // Even-state quantization for the unit-half-width well of depth 2:
        // sqrt(-lambda) = k' tan k' with k' = sqrt(2 + lambda).
        let oracle = bisect(-1.999, -1e-6, |lam| {
            let kp = (2.0 + lam).sqrt();
            (-lam).sqrt() - kp * kp.tan()
        });
        assert!(
            (bs.lambda0 - oracle).abs() < 1e-9,
            "lambda0 = {} vs oracle {}",
            bs.lambda0,
            oracle
        );

        assert!(bs.norm_check < 1e-8, "norm residual {}", bs.norm_check);
        // Even ground state of a symmetric well: equal tails, no first
        // moment.
        assert!((bs.kappa_minus - bs.kappa_plus).abs() < 1e-9);
        assert!(bs.lambda1.abs() < 1e-9);
        // The two halves of phi come from independent propagations; their
        // mirror agreement checks the glue.
        let n = bs.phi.len();
        for i in 0..n {
            let (x, v) = bs.phi[i];
            let (xm, vm) = bs.phi[n - 1 - i];
            assert!((x + xm).abs() < 1e-12);
            assert!((v - vm).abs() < 1e-9, "parity defect at x = {x}");
        }
    }

    #[test]
    fn deep_well_holds_two_states_of_alternating_parity() {
        let p = Potential::square_well(-8.0, 1.0);
        let states = bound_states(&p).unwrap();
        assert_eq!(states.len(), 2);
        assert!(states[0].lambda0 < states[1].lambda0);

        // Even branch lives below the tan pole at lambda = pi^2/4 - 8.
        let even = bisect(-7.999, -5.54, |lam| {
            let kp = (8.0 + lam).sqrt();
            (-lam).sqrt() - kp * kp.tan()
        });
        let odd = bisect(-4.0, -1e-3, |lam| {
            let kp = (8.0 + lam).sqrt();
            (-lam).sqrt() + kp / kp.tan()
        });
        assert!((states[0].lambda0 - even).abs() < 1e-9);
        assert!((states[1].lambda0 - odd).abs() < 1e-9);

        for bs in &states {
            assert!(bs.lambda1.abs() < 1e-9, "symmetric well lambda1");
            assert!(bs.norm_check < 1e-8);
        }
        // Parity shows in the tail amplitudes.
        assert!((states[0].kappa_minus - states[0].kappa_plus).abs() < 1e-9);
        assert!((states[1].kappa_minus + states[1].kappa_plus).abs() < 1e-9);
    }

    #[test]
    fn eigenfunction_residual_is_small_on_the_grid() {
        let p = Potential::square_well(-2.0, 1.0);
        let bs = &bound_states(&p).unwrap()[0];
        let h = bs.phi[1].0 - bs.phi[0].0;
        let scale = bs
            .phi
            .iter()
            .map(|&(x, v)| ((p.eval(x) - bs.lambda0) * v).abs())
            .fold(0.0f64, f64::max);
        let mut checked = 0;
        for i in 2..bs.phi.len() - 2 {
            let x = bs.phi[i].0;
            // Keep the five-point stencil clear of the edges of the step,
            // where phi'' jumps.
            if (x.abs() - 1.0).abs() < 3.0 * h {
                continue;
            }
            let d2 = (-bs.phi[i - 2].1 + 16.0 * bs.phi[i - 1].1 - 30.0 * bs.phi[i].1
                + 16.0 * bs.phi[i + 1].1
                - bs.phi[i + 2].1)
                / (12.0 * h * h);
            let residual = d2 - (p.eval(x) - bs.lambda0) * bs.phi[i].1;
            assert!(
                residual.abs() < 1e-7 * scale,
                "residual {residual:e} at x = {x}"
            );
            checked += 1;
        }
        assert!(checked > 500);
    }

    #[test]
    fn coupling_integral_reproduces_left_tail_amplitude() {
        let p = lopsided_well();
        let bs = &bound_states(&p).unwrap()[0];
        let kappa = (-bs.lambda0).sqrt();

        // Composite Simpson of V(x) e^{-kappa x} phi(x) piece by piece (the
        // integrand is smooth inside each step). Fresh solution samples, not
        // the stored grid, so the node placement suits the quadrature. Both
        // pieces are reached by propagating the normalized tail seed inward
        // from -L.
        let phi_at_support_edge = bs.kappa_minus * (-kappa).exp();
        let mut total = 0.0;
        for (lo, hi, v) in [(-1.0, 0.0, -2.5), (0.0, 1.0, -1.0)] {
            let n = 400;
            let hstep = (hi - lo) / n as f64;
            let stations: Vec<f64> = (0..=n).map(|i| lo + hstep * i as f64).collect();
            let vals = schrodinger::sample_solution(
                &p,
                c(bs.lambda0, 0.0),
                0.0,
                &BoundaryData::new(
                    -1.0,
                    c(phi_at_support_edge, 0.0),
                    c(kappa * phi_at_support_edge, 0.0),
                ),
                &stations,
            )
            .unwrap();
            let g =
                |i: usize| v * (-kappa * stations[i]).exp() * vals[i].psi.re;
            let mut acc = g(0) + g(n);
            for i in (1..n).step_by(2) {
                acc += 4.0 * g(i);
            }
            for i in (2..n).step_by(2) {
                acc += 2.0 * g(i);
            }
            total += acc * hstep / 3.0;
        }
        let identity = -2.0 * bs.kappa_minus * kappa;
        assert!(
            (total - identity).abs() < 1e-6 * identity.abs(),
            "coupling integral {total} vs -2 kappa_minus sqrt(-lambda0) = {identity}"
        );
        // Lopsided well leans left, so the mean position is negative.
        assert!(bs.lambda1 < -0.01);
    }

    #[test]
    fn width_forms_agree_and_domains_are_enforced() {
        let p = Potential::square_well(-2.0, 1.0);
        let bs = &bound_states(&p).unwrap()[0];
        let w = predicted_width(bs, 0.15).unwrap();
        let kappa = (-bs.lambda0).sqrt();
        let by_hand = kappa
            * bs.kappa_minus
            * bs.kappa_minus
            * (-(4.0 / (3.0 * 0.15)) * (-bs.lambda0 - 0.15 * bs.lambda1).powf(1.5)).exp();
        assert!((w - by_hand).abs() < 1e-12 * by_hand);
        // lambda1 vanishes here up to quadrature noise (~1e-10), so zeroing
        // it shifts the exponent by 2 sqrt(-lambda0) lambda1 at most.
        let mut flat = bs.clone();
        flat.lambda1 = 0.0;
        let ratio = predicted_width(&flat, 1e-2).unwrap() / predicted_width(bs, 1e-2).unwrap();
        assert!((ratio - 1.0).abs() < 1e-8);

        assert!(matches!(
            predicted_width(bs, 0.0),
            Err(SpectrumError::Domain(_))
        ));
        let mut bad = bs.clone();
        bad.lambda1 = 2.0 / 0.5 * (-bad.lambda0);
        assert!(matches!(
            predicted_width(&bad, 0.5),
            Err(SpectrumError::Domain(_))
        ));
    }

    /// `lambda1` really is the first-order response of the eigenvalue to the
    /// perturbation `f x` on a window much wider than the state: compare
    /// against eigenvalues of `V + f x 1_{[-8,8]}` built as a staircase, at
    /// two field strengths with Richardson extrapolation in between.
    #[test]
    fn lambda1_matches_perturbed_eigenvalues() {
        let base = lopsided_well();
        let bs0 = &bound_states(&base).unwrap()[0];

        let perturbed = |f: f64| -> f64 {
            let r = 8.0;
            let n = 4000;
            // Shared edge list keeps adjacent steps exactly touching.
            let edges: Vec<f64> = (0..=n).map(|j| -r + 2.0 * r * j as f64 / n as f64).collect();
            let segments: Vec<Segment> = (0..n)
                .map(|j| {
                    let mid = 0.5 * (edges[j] + edges[j + 1]);
                    seg(edges[j], edges[j + 1], base.eval(mid) + f * mid)
                })
                .collect();
            let p = Potential::from_segments(segments, None).unwrap();
            bound_states(&p).unwrap()[0].lambda0
        };

        let (f1, f2) = (1e-3, 1e-4);
        let s1 = (perturbed(f1) - bs0.lambda0) / f1;
        let s2 = (perturbed(f2) - bs0.lambda0) / f2;
        assert!((s1 - bs0.lambda1).abs() < 5e-3);
        assert!((s2 - bs0.lambda1).abs() < (s1 - bs0.lambda1).abs());
        let extrapolated = (f1 * s2 - f2 * s1) / (f1 - f2);
        assert!(
            (extrapolated - bs0.lambda1).abs() < 1e-5,
            "Richardson {extrapolated} vs lambda1 {}",
            bs0.lambda1
        );
    }
}
