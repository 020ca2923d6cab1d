//! Reference Airy values by Maclaurin summation in ~115-digit arithmetic.
//!
//! This crate exists to check fast evaluators, so it is deliberately the
//! opposite of clever: one globally convergent series, huge working precision,
//! and internal identities (gamma reflection, connection formula, Wronskian)
//! that the test suite uses to police the oracle itself. Usable for |w| up to
//! roughly 25, far beyond which the intended consumers switch methods anyway;
//! the cancellation loss there (~52 digits) still leaves ~60 good digits.

mod bigfloat;

pub use bigfloat::{ai_origin, aip_origin, gamma_one_third, gamma_two_thirds, ln2, pi};
pub use bigfloat::{BigFloat, CBig};

use num_complex::Complex64;

/// Ai and Ai' from the entire-series representation
///   Ai(w) = Ai(0) f(w) + Ai'(0) g(w),
///   f = Σ c_k w^{3k},  c_0 = 1,  c_{k+1} = c_k / ((3k+2)(3k+3)),
///   g = Σ d_k w^{3k+1}, d_0 = 1,  d_{k+1} = d_k / ((3k+3)(3k+4)).
pub fn ai_big(w: &CBig) -> (CBig, CBig) {
    let w2 = w.mul(w);
    let w3 = w2.mul(w);

    // Partial sums for f, g, f', g' with their own term recurrences.
    let one = CBig::from_f64(1.0, 0.0);
    let mut tf = one.clone(); // c_k w^{3k}
    let mut tg = w.clone(); // d_k w^{3k+1}
    let mut tfp = w2.div_i64(2); // c_k (3k) w^{3k-1}, k >= 1 (first term k=1: w^2/2)
    let mut tgp = one.clone(); // d_k (3k+1) w^{3k}
    let mut f = tf.clone();
    let mut g = tg.clone();
    let mut fp = tfp.clone();
    let mut gp = tgp.clone();

    let mut peak = f.mag2().max(g.mag2());
    for k in 0i64..4000 {
        tf = tf.mul(&w3).div_i64((3 * k + 2) * (3 * k + 3));
        tg = tg.mul(&w3).div_i64((3 * k + 3) * (3 * k + 4));
        // tfp holds the k+1 term already at loop entry; advance from k+1 to k+2:
        tfp = tfp.mul(&w3).div_i64((3 * k + 3) * (3 * k + 5));
        tgp = tgp.mul(&w3).div_i64((3 * k + 1) * (3 * k + 3));
        f = f.add(&tf);
        g = g.add(&tg);
        fp = fp.add(&tfp);
        gp = gp.add(&tgp);
        let m = tf.mag2().max(tg.mag2());
        peak = peak.max(m);
        if m < peak - (bigfloat::PREC as i64 + 48) {
            break;
        }
    }

    let alpha = ai_origin();
    let beta = aip_origin(); // negative
    let ai = f.scale(alpha).add(&g.scale(beta));
    let aip = fp.scale(alpha).add(&gp.scale(beta));
    (ai, aip)
}

/// Unscaled (Ai(w), Ai'(w)) rounded to f64 at the end. Panics beyond |w| = 25,
/// where the result may leave the comfortable zone of this series.
pub fn ai(w: Complex64) -> (Complex64, Complex64) {
    assert!(w.norm() <= 25.0, "oracle supports |w| <= 25, got {}", w.norm());
    let wb = CBig::from_f64(w.re, w.im);
    let (a, ap) = ai_big(&wb);
    (a.to_c64(), ap.to_c64())
}

/// n-th negative-axis zero of Ai (n = 1 is the one nearest the origin),
/// located by sign bisection of the high-precision series.
pub fn ai_zero(n: usize) -> f64 {
    assert!(n >= 1 && n <= 8, "zeros supported for n in 1..=8");
    let sign_at = |x: f64| -> i8 {
        let (a, _) = ai_big(&CBig::from_f64(x, 0.0));
        if a.re.is_negative() {
            -1
        } else {
            1
        }
    };
    // March down in coarse steps collecting sign changes.
    let mut found = 0usize;
    let mut x = 0.0f64;
    let mut s = sign_at(x);
    let (mut lo, mut hi) = (0.0, 0.0);
    while found < n {
        let xn = x - 0.05;
        let sn = sign_at(xn);
        if sn != s {
            found += 1;
            lo = xn;
            hi = x;
        }
        x = xn;
        s = sn;
        assert!(x > -13.0, "zero search ran away");
    }
    let mut slo = sign_at(lo);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let sm = sign_at(mid);
        if sm == slo {
            lo = mid;
            slo = sm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
