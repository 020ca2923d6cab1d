//! Sweep the scaled Airy evaluator against the high-precision series oracle
//! across every evaluation path, and enforce the rotation identity that ties
//! the three sectors together. Differences are measured against the local
//! pair scale |Ai| + |Ai'|/(1+√|w|) so the check stays honest near zeros of
//! Ai without going vacuous.

use num_complex::Complex64;
use starkres::airy::{self, Method};
use std::f64::consts::PI;

const RADII: [f64; 8] = [0.3, 1.0, 2.5, 4.0, 5.5, 7.5, 10.0, 20.0];
const N_ANGLES: usize = 25;

fn sweep_points() -> Vec<Complex64> {
    let mut pts = Vec::new();
    for &r in &RADII {
        for i in 0..N_ANGLES {
            // Closed sweep [-π, π] so the anti-Stokes ray itself is hit.
            let th = -PI + 2.0 * PI * (i as f64) / ((N_ANGLES - 1) as f64);
            pts.push(Complex64::from_polar(r, th));
        }
    }
    pts
}

#[test]
fn oracle_agreement_to_1e10() {
    let mut worst = (0.0f64, Complex64::new(0.0, 0.0));
    let mut seen = [false; 3];
    for w in sweep_points() {
        let e = airy::ai(w).unwrap();
        seen[match e.method {
            Method::Series => 0,
            Method::Asymptotic => 1,
            Method::Connection => 2,
        }] = true;
        let (ov, od) = airy_oracle::ai(w);
        let scale = ov.norm() + od.norm() / (1.0 + w.norm().sqrt());
        let err = ((e.value() - ov).norm() + (e.derivative() - od).norm() / (1.0 + w.norm().sqrt()))
            / scale;
        if err > worst.0 {
            worst = (err, w);
        }
        assert!(
            err <= 1e-10,
            "oracle mismatch {err:.3e} at w = {w} (|w| = {}, method {})",
            w.norm(),
            e.method
        );
    }
    assert!(seen.iter().all(|&s| s), "sweep failed to exercise all three methods");
    println!("worst relative deviation {:.3e} at w = {}", worst.0, worst.1);
}

#[test]
fn rotation_identity_across_sectors() {
    // Ai(w) + e^{2πi/3} Ai(w e^{2πi/3}) + e^{-2πi/3} Ai(w e^{-2πi/3}) = 0,
    // checked unscaled against the size of the dominant term. Radius 35 spots
    // extend the check beyond the oracle's reach.
    let omega = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
    let mut pts = sweep_points();
    for i in 0..N_ANGLES {
        let th = -PI + 2.0 * PI * (i as f64) / ((N_ANGLES - 1) as f64);
        pts.push(Complex64::from_polar(35.0, th));
    }
    for w in pts {
        let a0 = airy::ai(w).unwrap();
        let a1 = airy::ai(w * omega).unwrap();
        let a2 = airy::ai(w * omega.conj()).unwrap();
        let (v0, v1, v2) = (a0.value(), a1.value(), a2.value());
        let sum = v0 + omega * v1 + omega.conj() * v2;
        let dominant = v0.norm().max(v1.norm()).max(v2.norm());
        assert!(
            sum.norm() <= 1e-10 * dominant,
            "rotation identity residual {:.3e} at w = {w}",
            sum.norm() / dominant
        );
    }
}

#[test]
fn zeros_of_ai_are_reproduced() {
    // The evaluator's mantissa must vanish (to pair-scale 1e-10) at the
    // oracle-located zeros on the negative axis, deep in the oscillatory
    // sector where the connection path does the work.
    for n in 1..=6 {
        let x = airy_oracle::ai_zero(n);
        let e = airy::ai(Complex64::new(x, 0.0)).unwrap();
        let ratio = e.value_mantissa.norm() / e.derivative_mantissa.norm();
        assert!(ratio < 1e-10, "mantissa at zero #{n} ({x:.12}) has ratio {ratio:.2e}");
    }
}
