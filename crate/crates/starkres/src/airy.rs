//! Scaled complex Airy evaluation.
//!
//! Everything downstream manipulates Ai through the factorization
//! Ai(w) = m·e^{s} with s = -ζ(w), ζ = (2/3)w^{3/2} (principal branch), so that
//! resonance residuals can be formed at argument sizes where Ai itself
//! over/underflows f64 by thousands of orders of magnitude. Three evaluation
//! paths cover the plane:
//!
//!   |w| ≤ 7                      Maclaurin series (compensated arithmetic)
//!   |w| > 7, |arg w| ≤ 5π/6      Poincaré asymptotic expansion, 12 terms
//!   |w| > 7, |arg w| > 5π/6      connection formula onto two rotated
//!                                asymptotic evaluations
//!
//! The switch radius sits where the 12-term truncation floor of the expansion
//! drops below the sweep tolerance used by the test suite; both branches are
//! cross-checked against each other on the shell |w| ∈ [6.5, 7.5] and against
//! an independent high-precision series oracle in the integration tests.

use crate::dd::{Cdd, Dd};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt;

/// Radius where the series hands over to the asymptotic expansion.
pub const SWITCH_RADIUS: f64 = 7.0;

/// |arg w| beyond which the connection formula replaces the direct expansion.
/// The direct expansion omits the subdominant exponential, a relative error of
/// e^{2 Re ζ} = e^{2|ζ|cos(3·arg w/2)}; at 0.7π and |w| ≥ 6.5 that is ≤ 4e-10,
/// while the two rotated arguments of the connection formula still sit safely
/// inside their own pure sectors (|arg| ≤ 0.64π). Anywhere nearer the
/// anti-Stokes ray arg w = π the compound form is mandatory.
pub const CONNECTION_ARG: f64 = 0.7 * PI;

const ASYMPTOTIC_TERMS: usize = 12;

// Ai(0) and Ai'(0) as double-double pairs (hi exact f64, lo the residual),
// pinned against the high-precision oracle in tests/airy_sweep.rs.
const AI0: Dd = Dd::new(3.550_280_538_878_172_4e-1, 2.052_336_324_362_119_9e-17);
const AIP0: Dd = Dd::new(-2.588_194_037_928_068_2e-1, 2.522_243_111_610_832_1e-17);
// 1/(2√π), same provenance.
const INV_TWO_SQRT_PI: Complex64 = Complex64::new(2.820_947_917_738_781_4e-1, 0.0);

/// e^{+2πi/3} and e^{-2πi/3} with exact real parts.
fn rot(sector: i32) -> Complex64 {
    Complex64::new(-0.5, f64::from(sector) * 3f64.sqrt() / 2.0)
}

/// e^{±iπ/3}
fn half_rot(sign: i32) -> Complex64 {
    Complex64::new(0.5, f64::from(sign) * 3f64.sqrt() / 2.0)
}

/// ζ(w) = (2/3) w^{3/2}, principal branch (cut along the negative real axis).
pub fn zeta(w: Complex64) -> Complex64 {
    let s = w.sqrt();
    (2.0 / 3.0) * s * s * s
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Series,
    Asymptotic,
    Connection,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Series => write!(f, "series"),
            Method::Asymptotic => write!(f, "asymptotic"),
            Method::Connection => write!(f, "connection"),
        }
    }
}

/// Ai(w) = value_mantissa · e^{scale_exponent}, and likewise the w-derivative
/// Ai'(w) = derivative_mantissa · e^{scale_exponent}. `scale_exponent` is
/// always -ζ(w) for the *evaluation* argument, so rotated evaluations carry
/// the rotated scale.
#[derive(Clone, Copy, Debug)]
pub struct AiryEval {
    pub value_mantissa: Complex64,
    pub derivative_mantissa: Complex64,
    pub scale_exponent: Complex64,
    pub method: Method,
    /// Coarse relative error bound for the mantissa pair (truncation estimate
    /// for the asymptotic branches, cancellation estimate for the series).
    pub accuracy: f64,
}

impl AiryEval {
    /// Unscaled Ai(w); over/underflows exactly where e^{-ζ} does.
    pub fn value(&self) -> Complex64 {
        self.value_mantissa * self.scale_exponent.exp()
    }

    /// Unscaled Ai'(w).
    pub fn derivative(&self) -> Complex64 {
        self.derivative_mantissa * self.scale_exponent.exp()
    }
}

/// Ai(w) = coeff_plus·e^{phase} + coeff_minus·e^{-phase} with
/// phase = i(2/3)(-w)^{3/2}; dcoeff_* are the matching decomposition of Ai'.
/// Only defined within π/3 of the negative real axis, where both exponentials
/// are comparably sized.
#[derive(Clone, Copy, Debug)]
pub struct OscillatoryParts {
    pub phase: Complex64,
    pub coeff_plus: Complex64,
    pub coeff_minus: Complex64,
    pub dcoeff_plus: Complex64,
    pub dcoeff_minus: Complex64,
}

#[derive(Debug, Clone)]
pub enum AiryError {
    NonFinite(Complex64),
    InvalidSector(i32),
    /// log-derivative requested too close to a zero of Ai
    PoleProximity {
        w: Complex64,
        mantissa_ratio: f64,
    },
    /// oscillatory decomposition requested outside |arg w - π| < π/3
    OutsideOscillatorySector(Complex64),
}

impl fmt::Display for AiryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AiryError::NonFinite(w) => write!(f, "non-finite Airy argument {w}"),
            AiryError::InvalidSector(s) => write!(f, "rotation sector must be +1 or -1, got {s}"),
            AiryError::PoleProximity { w, mantissa_ratio } => write!(
                f,
                "log-derivative at {w} is within {mantissa_ratio:.1e} of an Airy zero"
            ),
            AiryError::OutsideOscillatorySector(w) => {
                write!(f, "oscillatory decomposition needs |arg w| > 2π/3, got arg {}", w.arg())
            }
        }
    }
}

impl std::error::Error for AiryError {}

/// Scaled Airy evaluation, valid on the whole complex plane.
pub fn ai(w: Complex64) -> Result<AiryEval, AiryError> {
    if !w.re.is_finite() || !w.im.is_finite() {
        return Err(AiryError::NonFinite(w));
    }
    let r = w.norm();
    if r <= SWITCH_RADIUS {
        Ok(series(w))
    } else if w.arg().abs() <= CONNECTION_ARG {
        Ok(asymptotic(w))
    } else {
        Ok(connection(w))
    }
}

/// Ai(w·e^{sector·2πi/3}) with the chain-rule factor folded into the
/// derivative mantissa, so the result differentiates with respect to w.
/// The scale stays -ζ(rotated argument).
pub fn ai_rotated(w: Complex64, sector: i32) -> Result<AiryEval, AiryError> {
    if sector != 1 && sector != -1 {
        return Err(AiryError::InvalidSector(sector));
    }
    let r = rot(sector);
    let mut eval = ai(w * r)?;
    eval.derivative_mantissa *= r;
    Ok(eval)
}

/// Ai'(w)/Ai(w). Fails within ~1e-13 (mantissa ratio) of an Airy zero, where
/// the quotient sheds all its accuracy; callers fall back to bilinear forms.
pub fn ai_logderiv(w: Complex64) -> Result<Complex64, AiryError> {
    let e = ai(w)?;
    let vn = e.value_mantissa.norm();
    let dn = e.derivative_mantissa.norm();
    if vn <= 1e-13 * dn {
        return Err(AiryError::PoleProximity { w, mantissa_ratio: vn / dn });
    }
    Ok(e.derivative_mantissa / e.value_mantissa)
}

/// Split Ai near the negative real axis into incoming/outgoing exponentials.
pub fn decompose_oscillatory(w: Complex64) -> Result<OscillatoryParts, AiryError> {
    if !w.re.is_finite() || !w.im.is_finite() {
        return Err(AiryError::NonFinite(w));
    }
    if w.arg().abs() <= 2.0 * PI / 3.0 {
        return Err(AiryError::OutsideOscillatorySector(w));
    }
    let phase = {
        let s = (-w).sqrt();
        Complex64::new(0.0, 2.0 / 3.0) * s * s * s
    };
    let ep = ai(w * rot(1))?;
    let em = ai(w * rot(-1))?;
    // Branch bookkeeping: on this sector ζ(w·e^{+2πi/3}) = -phase and
    // ζ(w·e^{-2πi/3}) = +phase hold exactly; the scales of the two rotated
    // evaluations therefore *are* ±phase and no rescaling is needed.
    debug_assert!(
        (ep.scale_exponent - phase).norm() <= 1e-10 * (1.0 + phase.norm()),
        "plus-rotation scale drifted from +phase"
    );
    debug_assert!(
        (em.scale_exponent + phase).norm() <= 1e-10 * (1.0 + phase.norm()),
        "minus-rotation scale drifted from -phase"
    );
    Ok(OscillatoryParts {
        phase,
        coeff_plus: half_rot(-1) * ep.value_mantissa,
        coeff_minus: half_rot(1) * em.value_mantissa,
        dcoeff_plus: half_rot(1) * ep.derivative_mantissa,
        dcoeff_minus: half_rot(-1) * em.derivative_mantissa,
    })
}

// ---------------------------------------------------------------------------
// Series branch
// ---------------------------------------------------------------------------

fn series(w: Complex64) -> AiryEval {
    let wc = Cdd::from_c64(w);
    let w2 = wc.mul(wc);
    let w3 = w2.mul(wc);

    let one = Cdd { re: Dd::from_f64(1.0), im: Dd::ZERO };
    let mut tf = one; // c_k w^{3k}
    let mut tg = wc; // d_k w^{3k+1}
    let mut tfp = w2.div_f64(2.0); // c_k(3k) w^{3k-1}, entering at k = 1
    let mut tgp = one; // d_k(3k+1) w^{3k}
    let mut f = tf;
    let mut g = tg;
    let mut fp = tfp;
    let mut gp = tgp;

    let mut peak: f64 = f.mag().max(g.mag());
    for k in 0i64..400 {
        let a = ((3 * k + 2) * (3 * k + 3)) as f64;
        let b = ((3 * k + 3) * (3 * k + 4)) as f64;
        let c = ((3 * k + 3) * (3 * k + 5)) as f64;
        let d = ((3 * k + 1) * (3 * k + 3)) as f64;
        tf = tf.mul(w3).div_f64(a);
        tg = tg.mul(w3).div_f64(b);
        tfp = tfp.mul(w3).div_f64(c);
        tgp = tgp.mul(w3).div_f64(d);
        f = f.add(tf);
        g = g.add(tg);
        fp = fp.add(tfp);
        gp = gp.add(tgp);
        let m = tf.mag().max(tg.mag());
        peak = peak.max(m);
        if m < 1e-34 * peak && k > 3 {
            break;
        }
    }

    let ai_dd = f.scale(AI0).add(g.scale(AIP0));
    let aip_dd = fp.scale(AI0).add(gp.scale(AIP0));
    let ai_v = ai_dd.to_c64();
    let ai_d = aip_dd.to_c64();

    let z = zeta(w);
    let grow = z.exp(); // |ζ| ≤ 12.4 inside the switch radius: no overflow
    // Cancellation estimate: dd carries ~31 digits, the sum dropped
    // peak/|Ai| of them, and the final f64 rounding adds 1e-16.
    let cancel = peak / ai_v.norm().max(f64::MIN_POSITIVE);
    let accuracy = (1e-31 * cancel).max(1e-16);

    AiryEval {
        value_mantissa: ai_v * grow,
        derivative_mantissa: ai_d * grow,
        scale_exponent: -z,
        method: Method::Series,
        accuracy,
    }
}

// ---------------------------------------------------------------------------
// Asymptotic branch
// ---------------------------------------------------------------------------

/// u_s, v_s coefficient pairs of the large-|w| expansions
///   Ai(w)  ~  e^{-ζ}/(2√π w^{1/4}) Σ (-1)^s u_s ζ^{-s}
///   Ai'(w) ~ -w^{1/4} e^{-ζ}/(2√π) Σ (-1)^s v_s ζ^{-s}
fn uv_coefficients() -> ([f64; ASYMPTOTIC_TERMS + 2], [f64; ASYMPTOTIC_TERMS + 2]) {
    let mut u = [0.0; ASYMPTOTIC_TERMS + 2];
    let mut v = [0.0; ASYMPTOTIC_TERMS + 2];
    u[0] = 1.0;
    v[0] = 1.0;
    for s in 1..ASYMPTOTIC_TERMS + 2 {
        let sf = s as f64;
        u[s] = u[s - 1] * (6.0 * sf - 5.0) * (6.0 * sf - 3.0) * (6.0 * sf - 1.0)
            / (216.0 * sf * (2.0 * sf - 1.0));
        v[s] = u[s] * (6.0 * sf + 1.0) / (1.0 - 6.0 * sf);
    }
    (u, v)
}

fn asymptotic(w: Complex64) -> AiryEval {
    let z = zeta(w);
    let zi = z.inv();
    let (u, v) = uv_coefficients();

    let mut su = Complex64::new(0.0, 0.0);
    let mut sv = Complex64::new(0.0, 0.0);
    for s in (0..=ASYMPTOTIC_TERMS).rev() {
        let sign = if s % 2 == 0 { 1.0 } else { -1.0 };
        su = su * zi + sign * u[s];
        sv = sv * zi + sign * v[s];
    }

    let wq = w.sqrt().sqrt(); // principal w^{1/4}
    let value = INV_TWO_SQRT_PI * su / wq;
    let deriv = -wq * INV_TWO_SQRT_PI * sv;
    let zn = z.norm();
    let truncation = u[ASYMPTOTIC_TERMS + 1] / zn.powi(ASYMPTOTIC_TERMS as i32 + 1);

    AiryEval {
        value_mantissa: value,
        derivative_mantissa: deriv,
        scale_exponent: -z,
        method: Method::Asymptotic,
        accuracy: truncation.max(1e-16),
    }
}

// ---------------------------------------------------------------------------
// Connection branch: Ai(w) = e^{iπ/3} Ai(w e^{-2πi/3}) + e^{-iπ/3} Ai(w e^{+2πi/3})
// ---------------------------------------------------------------------------

fn connection(w: Complex64) -> AiryEval {
    let s = -zeta(w);
    let ep = asymptotic(w * rot(1));
    let em = asymptotic(w * rot(-1));
    // One rotated scale equals s, the other -s; the rescale factors
    // e^{scale± - s} are ≤ 1 in magnitude on this sector (the dominant branch
    // keeps the full weight, the recessive one is damped).
    let fp = (ep.scale_exponent - s).exp();
    let fm = (em.scale_exponent - s).exp();

    let term_vp = half_rot(-1) * ep.value_mantissa * fp;
    let term_vm = half_rot(1) * em.value_mantissa * fm;
    let term_dp = half_rot(1) * ep.derivative_mantissa * fp;
    let term_dm = half_rot(-1) * em.derivative_mantissa * fm;

    let value = term_vp + term_vm;
    let deriv = term_dp + term_dm;
    let amplification =
        (term_vp.norm() + term_vm.norm()) / value.norm().max(f64::MIN_POSITIVE);
    let accuracy = ep.accuracy.max(em.accuracy) * amplification.max(1.0);

    AiryEval {
        value_mantissa: value,
        derivative_mantissa: deriv,
        scale_exponent: s,
        method: Method::Connection,
        accuracy,
    }
}
