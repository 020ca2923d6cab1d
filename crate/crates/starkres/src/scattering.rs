//! Field-free scattering data of `H = p^2 + V`: transmission and reflection
//! amplitudes, their analytic continuation into the lower half k-plane, the
//! reflection object `F(k) = 2ik * rho(k)`, and the zeros of `F` in the
//! sector `-pi/3 < arg k < 0`.
//!
//! Everything is phrased through one propagation: seed the pure left-moving
//! wave `e^{-ikx}` at `x = -L`, carry it across the support, and read the
//! plane-wave coefficients off at `x = +L`. For real `k` this produces the
//! textbook S-matrix entries; for complex `k` the same formulas *are* the
//! analytic continuation, because the propagation map is entire in `z = k^2`
//! and the plane-wave projections are entire in `k`.

use num_complex::Complex64;

use crate::potential::Potential;
use crate::schrodinger::{self, BoundaryData, OdeError};
use crate::zeros::{self, Rect, ZeroError};
use std::fmt;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Amplitudes at one wavenumber. With the left seed `e^{-ikx}`, the solution
/// right of the support is `c1 e^{ikx} + c2 e^{-ikx}`; `t = 1/c2` and
/// `rho = c1/c2` (the right reflection amplitude, continued), while `r_left`
/// comes from the mirror construction.
#[derive(Debug, Clone, Copy)]
pub struct ScatteringAmplitudes {
    pub k: Complex64,
    pub t: Complex64,
    pub rho: Complex64,
    pub r_left: Complex64,
    pub c1: Complex64,
    pub c2: Complex64,
}

impl ScatteringAmplitudes {
    /// The continued reflection object `F(k) = 2ik * rho(k)` whose zeros in
    /// the open sector are the non-string resonance limit points.
    pub fn big_f(&self) -> Complex64 {
        2.0 * I * self.k * self.rho
    }
}

/// A zero of `F` in the closed sector, with its winding-number order and,
/// for simple zeros, the derivative there.
#[derive(Debug, Clone, Copy)]
pub struct ReflectionZero {
    pub k0: Complex64,
    pub order: u32,
    pub f_prime: Option<Complex64>,
}

#[derive(Debug, Clone)]
pub enum ScatteringError {
    Ode(OdeError),
    /// `F` is identically zero (no reflection at all): V = 0 or numerically
    /// indistinguishable from it.
    DegenerateAmplitude,
    /// `c2` vanished: `t` has a pole at this wavenumber.
    TransmissionPole { k: Complex64 },
    /// Wavenumber too close to the `k = 0` branch point.
    NearBranchPoint { k: Complex64 },
    Zeros(ZeroError),
}

impl fmt::Display for ScatteringError {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScatteringError::Ode(e) => write!(fm, "propagation failed: {e}"),
            ScatteringError::DegenerateAmplitude => {
                write!(fm, "reflection object is identically zero (free potential)")
            }
            ScatteringError::TransmissionPole { k } => {
                write!(fm, "transmission pole encountered at k = {k}")
            }
            ScatteringError::NearBranchPoint { k } => {
                write!(fm, "wavenumber {k} too close to the k = 0 branch point")
            }
            ScatteringError::Zeros(e) => write!(fm, "zero search failed: {e}"),
        }
    }
}

impl std::error::Error for ScatteringError {}

impl From<OdeError> for ScatteringError {
    fn from(e: OdeError) -> Self {
        ScatteringError::Ode(e)
    }
}

impl From<ZeroError> for ScatteringError {
    fn from(e: ZeroError) -> Self {
        ScatteringError::Zeros(e)
    }
}

/// Unnormalized right-edge amplitude pair `(2ik c1, 2ik c2)` obtained by
/// propagating the left-moving seed `e^{-ikx}` across the support. Both
/// entries are entire in `k` (boundary data of an ODE solution analytic in
/// `k^2`, times exponentials), which makes the first one the right object for
/// argument-principle scans: `F = 2ik c1/c2` vanishes exactly where it does,
/// while `F` itself also carries poles at the zeros of the second. The two
/// cannot vanish together -- that would force `psi` and `psi'` to vanish at
/// the same point and hence the whole solution.
fn right_amplitude_pair(
    p: &Potential,
    k: Complex64,
) -> Result<(Complex64, Complex64), ScatteringError> {
    let l = p.half_width();
    let ik = I * k;
    let left = BoundaryData::new(-l, (ik * l).exp(), -ik * (ik * l).exp());
    let at_r = schrodinger::propagate(p, k * k, 0.0, &left, l)?;
    let n1 = (at_r.dpsi + ik * at_r.psi) * (-ik * l).exp();
    let n2 = (ik * at_r.psi - at_r.dpsi) * (ik * l).exp();
    Ok((n1, n2))
}

/// Scattering amplitudes of `H = p^2 + V` at (possibly complex) `k`.
pub fn amplitudes(p: &Potential, k: Complex64) -> Result<ScatteringAmplitudes, ScatteringError> {
    if k.norm() < 1e-8 {
        return Err(ScatteringError::NearBranchPoint { k });
    }
    let l = p.half_width();
    let ik = I * k;
    let z = k * k;

    let (n1, n2) = right_amplitude_pair(p, k)?;
    let c1 = n1 / (2.0 * ik);
    let c2 = n2 / (2.0 * ik);
    if c2.norm() < 1e-13 * c1.norm().max(1e-30) {
        return Err(ScatteringError::TransmissionPole { k });
    }

    // Mirror construction for the left reflection amplitude: seed the pure
    // right-moving wave at +L and propagate backwards.
    let seed_r = (ik * l).exp();
    let right = BoundaryData::new(l, seed_r, ik * seed_r);
    let at_l = schrodinger::propagate(p, z, 0.0, &right, -l)?;
    let d1 = (ik * at_l.psi - at_l.dpsi) * (-ik * l).exp() / (2.0 * ik);
    let d2 = (ik * at_l.psi + at_l.dpsi) * (ik * l).exp() / (2.0 * ik);
    if d2.norm() < 1e-13 * d1.norm().max(1e-30) {
        return Err(ScatteringError::TransmissionPole { k });
    }

    Ok(ScatteringAmplitudes {
        k,
        t: c2.inv(),
        rho: c1 / c2,
        r_left: d1 / d2,
        c1,
        c2,
    })
}

/// `F(k) = 2ik * rho(k)`.
pub fn big_f(p: &Potential, k: Complex64) -> Result<Complex64, ScatteringError> {
    Ok(amplitudes(p, k)?.big_f())
}

/// First derivative by the Cauchy integral over a small circle (16-point
/// trapezoid, spectrally accurate for an analytic integrand).
fn cauchy_derivative<E>(
    f: impl Fn(Complex64) -> Result<Complex64, E>,
    k: Complex64,
) -> Result<Complex64, E> {
    const RADIUS: f64 = 1e-3;
    const N: usize = 16;
    let mut acc = c(0.0, 0.0);
    for j in 0..N {
        let ang = std::f64::consts::TAU * j as f64 / N as f64;
        let dir = c(ang.cos(), ang.sin());
        acc += f(k + RADIUS * dir)? / dir;
    }
    Ok(acc / (N as f64 * RADIUS))
}

/// `F'(k)`. Valid where `F` is analytic on the surrounding circle of radius
/// `1e-3`; near a transmission pole prefer the quotient form used inside
/// [`find_big_f_zeros`].
pub fn big_f_derivative(p: &Potential, k: Complex64) -> Result<Complex64, ScatteringError> {
    cauchy_derivative(|k| big_f(p, k), k)
}

/// All zeros of `F` inside `window` (a rectangle in the k-plane expected to
/// sit inside the sector `-pi/3 < arg k < 0`, `|k| > 0.1`), located by
/// argument-principle counting with quadtree subdivision and polished by the
/// shared root engine. An identically-zero `F` (free potential) is rejected
/// up front by a magnitude floor test.
pub fn find_big_f_zeros(
    p: &Potential,
    window: &Rect,
) -> Result<Vec<ReflectionZero>, ScatteringError> {
    if p.is_zero() {
        return Err(ScatteringError::DegenerateAmplitude);
    }
    // Magnitude floor: a coarse probe across the window. Reflection from a
    // genuine obstacle cannot be uniformly at rounding level.
    let mut peak = 0.0f64;
    for i in 0..5 {
        for j in 0..5 {
            let k = c(
                window.re.0 + (window.re.1 - window.re.0) * i as f64 / 4.0,
                window.im.0 + (window.im.1 - window.im.0) * j as f64 / 4.0,
            );
            if let Ok(v) = big_f(p, k) {
                peak = peak.max(v.norm());
            }
        }
    }
    if peak < 1e-12 {
        return Err(ScatteringError::DegenerateAmplitude);
    }

    // Scan the entire numerator n(k) = 2ik c1(k) instead of F itself. The
    // denominator zeros (transmission poles, i.e. the resonances of H with no
    // field) sit in the same lower half-plane and subtract from the winding
    // count of F, which can hide a genuine zero sitting next to one.
    let eval = |k: Complex64| -> Result<Complex64, String> {
        right_amplitude_pair(p, k)
            .map(|(n1, _)| n1)
            .map_err(|e| e.to_string())
    };
    let tol = 1e-10 * window.center().norm().max(0.1);
    let found = zeros::scan(&eval, window, 24, tol)?;
    let mut out = Vec::with_capacity(found.len());
    for z in found {
        let f_prime = if z.order == 1 {
            // Quotient rule at a zero of the numerator: F = 2ik n1/n2, so
            // F'(k0) = 2ik0 n1'(k0)/n2(k0), with n1' again by a Cauchy
            // circle -- safe even when a transmission pole sits close by,
            // since n1 is entire.
            let dn = cauchy_derivative(|k| right_amplitude_pair(p, k).map(|(n1, _)| n1), z.location)?;
            let (_, n2) = right_amplitude_pair(p, z.location)?;
            Some(2.0 * I * z.location * dn / n2)
        } else {
            None
        };
        out.push(ReflectionZero {
            k0: z.location,
            order: z.order,
            f_prime,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Closed-form square-well amplitudes (width 2a, depth v0):
    /// with k' = sqrt(k^2 - v0),
    ///   D    = cos(2k'a) - (i/2)(k/k' + k'/k) sin(2k'a)
    ///   t    = e^{-2ika} / D
    ///   r    = (i/2)(k'/k - k/k') sin(2k'a) e^{-2ika} / D
    /// (symmetric potential: both reflection amplitudes equal r).
    fn well_closed_form(v0: f64, a: f64, k: Complex64) -> (Complex64, Complex64) {
        let kp = (k * k - v0).sqrt();
        let arg = (2.0 * a) * kp;
        let (s, co) = (arg.sin(), arg.cos());
        let d = co - 0.5 * I * (k / kp + kp / k) * s;
        let phase = (-2.0 * I * k * a).exp();
        let t = phase / d;
        let r = 0.5 * I * (kp / k - k / kp) * s * phase / d;
        (t, r)
    }

    #[test]
    fn free_potential_transmits_perfectly() {
        let p = Potential::zero();
        let amp = amplitudes(&p, c(1.3, -0.2)).unwrap();
        assert!((amp.t - 1.0).norm() < 1e-12);
        assert!(amp.rho.norm() < 1e-12);
        assert!(amp.r_left.norm() < 1e-12);
        assert!(matches!(
            find_big_f_zeros(&p, &Rect::new(0.5, 2.0, -0.5, -0.01)),
            Err(ScatteringError::DegenerateAmplitude)
        ));
    }

    #[test]
    fn square_well_matches_closed_form() {
        let p = Potential::square_well(-2.0, 1.0);
        for k in [
            c(0.7, 0.0),
            c(1.9, 0.0),
            c(4.4, 0.0),
            c(1.2, -0.3),
            c(0.9, -0.45),
            c(2.4, 0.35),
        ] {
            let amp = amplitudes(&p, k).unwrap();
            let (t, r) = well_closed_form(-2.0, 1.0, k);
            assert!((amp.t - t).norm() / t.norm() < 1e-9, "t mismatch at k = {k}");
            assert!((amp.rho - r).norm() < 1e-9 * r.norm().max(1.0), "rho at k = {k}");
            assert!(
                (amp.r_left - r).norm() < 1e-9 * r.norm().max(1.0),
                "r_left at k = {k}"
            );
        }
    }

    #[test]
    fn unitarity_symmetry_and_off_diagonal() {
        let corpus = [
            Potential::square_well(-2.0, 1.0),
            Potential::square_barrier(2.0, 1.0),
            Potential::double_bump(2.0, 0.5, 1.0),
            Potential::from_samples(
                -1.0,
                0.25,
                vec![0.0, 0.3, 1.1, 1.8, 1.1, 0.3, 0.05, 0.01, 0.0],
                None,
            )
            .unwrap(),
        ];
        for p in &corpus {
            for i in 0..50 {
                let k = c(0.2 + 4.8 * i as f64 / 49.0, 0.0);
                let amp = amplitudes(p, k).unwrap();
                let uni = amp.rho.norm_sqr() + amp.t.norm_sqr() - 1.0;
                assert!(uni.abs() < 1e-9, "unitarity {uni:e} at k = {k}");
                let off = amp.rho.conj() * amp.t + amp.r_left * amp.t.conj();
                assert!(off.norm() < 1e-9, "off-diagonal {off} at k = {k}");
                assert!(
                    (amp.rho.norm() - amp.r_left.norm()).abs() < 1e-9,
                    "|rho| vs |r_left| at k = {k}"
                );
                // |c1|^2/(1+|c1|^2) < 1 packaged as the bounded ratio.
                let ratio = amp.c1.norm_sqr() / (1.0 + amp.c1.norm_sqr());
                assert!(ratio < 1.0);
            }
        }
    }

    /// Transmission computed from either side must coincide (t = t across
    /// directions); exercised off the real axis too.
    #[test]
    fn transmission_is_direction_independent() {
        let p = Potential::double_bump(2.0, 0.5, 1.0);
        for k in [c(0.8, 0.0), c(1.7, -0.25), c(2.5, -0.4)] {
            let amp = amplitudes(&p, k).unwrap();
            // Mirror transmission: seed e^{ikx} at +L, read d2 at -L; the
            // amplitudes routine already did this internally, so recompute
            // directly from a reversed propagation for independence.
            let l = p.half_width();
            let ik = I * k;
            let seed = (ik * l).exp();
            let at_l = schrodinger::propagate(
                &p,
                k * k,
                0.0,
                &BoundaryData::new(l, seed, ik * seed),
                -l,
            )
            .unwrap();
            let d2 = (ik * at_l.psi + at_l.dpsi) * (ik * l).exp() / (2.0 * ik);
            let t_left = d2.inv();
            assert!(
                (amp.t - t_left).norm() < 1e-9 * amp.t.norm(),
                "direction mismatch at k = {k}"
            );
        }
    }

    /// Square-well reflection zeros sit exactly at k^2 = v0 + (n pi / 2a)^2
    /// on the real axis — the boundary of the sector. Windows strictly
    /// inside the open sector must count zero; a window straddling the axis
    /// catches the real zero.
    #[test]
    fn sector_interior_is_clear_for_square_well() {
        let p = Potential::square_well(-2.0, 1.0);
        let k1 = (std::f64::consts::PI.powi(2) / 4.0 - 2.0).sqrt(); // n = 1
        assert!((big_f(&p, c(k1, 0.0)).unwrap()).norm() < 1e-9);

        let eval = |k: Complex64| big_f(&p, k).map_err(|e| e.to_string());
        let inside = Rect::new(k1 - 0.2, k1 + 0.2, -0.3, -0.02);
        let (n, _) = zeros::count_with_jitter(&eval, &inside).unwrap();
        assert_eq!(n, 0);

        let straddling = Rect::new(k1 - 0.2, k1 + 0.2, -0.15, 0.1);
        let (n, _) = zeros::count_with_jitter(&eval, &straddling).unwrap();
        assert_eq!(n, 1);
    }

    #[test]
    fn cauchy_derivative_agrees_with_finite_difference() {
        let p = Potential::square_barrier(2.0, 1.0);
        let k = c(1.2, -0.2);
        let exact = big_f_derivative(&p, k).unwrap();
        let h = 1e-5;
        let fd = (big_f(&p, k + c(h, 0.0)).unwrap() - big_f(&p, k - c(h, 0.0)).unwrap())
            / (2.0 * h);
        assert!(
            (exact - fd).norm() < 1e-6 * exact.norm().max(1.0),
            "cauchy {exact} vs fd {fd}"
        );
    }

    /// Zero counts in the double-bump window must match an independent
    /// dense-grid search: local |F| minima polished by the secant,
    /// deduplicated, restricted to the window. The symmetric pair has only
    /// real reflection zeros (perfect transmission at its cavity modes), so
    /// the interior window is empty; breaking the height symmetry moves one
    /// zero into the open sector.
    #[test]
    fn double_bump_counts_match_dense_grid_oracle() {
        let cases = [
            (Potential::double_bump(2.0, 0.5, 1.0), 0usize),
            (Potential::double_bump_uneven(2.0, 3.0, 0.5, 1.0), 1usize),
        ];
        let window = Rect::new(0.5, 2.5, -0.5, -0.01);
        for (p, expected) in &cases {
            let found = find_big_f_zeros(p, &window).unwrap();

            // Dense-grid oracle.
            let (nr, ni) = (120, 40);
            let mut grid = vec![vec![0.0f64; ni]; nr];
            let at = |i: usize, j: usize| {
                c(
                    window.re.0 + (window.re.1 - window.re.0) * i as f64 / (nr - 1) as f64,
                    window.im.0 + (window.im.1 - window.im.0) * j as f64 / (ni - 1) as f64,
                )
            };
            for (i, row) in grid.iter_mut().enumerate() {
                for (j, cell) in row.iter_mut().enumerate() {
                    *cell = big_f(p, at(i, j)).unwrap().norm();
                }
            }
            let eval = |k: Complex64| big_f(p, k).map_err(|e| e.to_string());
            let mut oracle: Vec<Complex64> = Vec::new();
            for i in 1..nr - 1 {
                for j in 1..ni - 1 {
                    let v = grid[i][j];
                    let is_min = (-1..=1).all(|di: i32| {
                        (-1..=1).all(|dj: i32| {
                            (di == 0 && dj == 0)
                                || grid[(i as i32 + di) as usize][(j as i32 + dj) as usize] >= v
                        })
                    });
                    if !is_min {
                        continue;
                    }
                    if let Ok(root) = zeros::refine(&eval, at(i, j), 1e-10, 50) {
                        let scale = zeros::local_scale(&eval, root, 0.05).unwrap();
                        if window.contains(root)
                            && big_f(p, root).unwrap().norm() <= 1e-8 * scale
                            && !oracle.iter().any(|&r| (r - root).norm() < 1e-6)
                        {
                            oracle.push(root);
                        }
                    }
                }
            }
            assert_eq!(found.len(), *expected, "scan count");
            assert_eq!(
                found.len(),
                oracle.len(),
                "winding scan found {:?}, dense oracle found {:?}",
                found.iter().map(|z| z.k0).collect::<Vec<_>>(),
                oracle
            );
            for z in &found {
                assert!(oracle.iter().any(|&r| (r - z.k0).norm() < 1e-6));
                assert_eq!(z.order, 1);
                let fp = z.f_prime.expect("derivative for simple zero");
                // The quotient-rule derivative must agree with the direct
                // Cauchy circle on F (no pole inside radius 1e-3 here).
                let direct = big_f_derivative(p, z.k0).unwrap();
                assert!((fp - direct).norm() < 1e-6 * direct.norm());
            }
        }
    }

    /// The uneven pair's sector zero, pinned against an independent Newton
    /// polish of F itself, stays fixed: this is the reference location used
    /// by the field-tracking acceptance work.
    #[test]
    fn uneven_bump_zero_location_is_stable() {
        let p = Potential::double_bump_uneven(2.0, 3.0, 0.5, 1.0);
        let zs = find_big_f_zeros(&p, &Rect::new(1.0, 1.7, -0.3, -0.01)).unwrap();
        assert_eq!(zs.len(), 1);
        let k0 = zs[0].k0;
        assert!((k0 - c(1.357360040980, -0.102086598684)).norm() < 1e-9);
        assert!(big_f(&p, k0).unwrap().norm() < 1e-10);
        // Inside the open sector -pi/3 < arg k < 0.
        assert!(k0.arg() > -std::f64::consts::FRAC_PI_3 && k0.arg() < 0.0);
    }
}
