//! Arbitrary-precision binary floats on top of `BigInt`, sized for ~115
//! significant decimal digits. Only the operations the Airy series needs are
//! implemented; rounding is truncation, which costs < 1 ulp per operation and
//! is far below the precision budget of any consumer of this crate.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::OnceLock;

/// Working precision in bits (~115.6 decimal digits).
pub const PREC: u64 = 384;
const DIV_GUARD: u64 = 32;

/// value = mant * 2^exp, |mant| < 2^PREC after normalization.
#[derive(Clone, Debug)]
pub struct BigFloat {
    mant: BigInt,
    exp: i64,
}

impl BigFloat {
    pub fn zero() -> Self {
        BigFloat { mant: BigInt::zero(), exp: 0 }
    }

    pub fn from_i64(n: i64) -> Self {
        BigFloat { mant: BigInt::from(n), exp: 0 }.normalized()
    }

    pub fn from_bigint(n: BigInt) -> Self {
        BigFloat { mant: n, exp: 0 }.normalized()
    }

    /// Exact ratio of two small integers.
    pub fn from_ratio(num: i64, den: i64) -> Self {
        &Self::from_i64(num) / &Self::from_i64(den)
    }

    /// Exact conversion: every finite f64 is a dyadic rational.
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "BigFloat::from_f64 on non-finite input");
        if x == 0.0 {
            return Self::zero();
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let biased = ((bits >> 52) & 0x7ff) as i64;
        let frac = (bits & ((1u64 << 52) - 1)) as i64;
        let (m, e) = if biased == 0 {
            (frac, -1074) // subnormal
        } else {
            (frac + (1i64 << 52), biased - 1075)
        };
        BigFloat { mant: BigInt::from(sign * m), exp: e }.normalized()
    }

    pub fn to_f64(&self) -> f64 {
        if self.mant.is_zero() {
            return 0.0;
        }
        let m = self.mant.to_f64().expect("BigInt::to_f64 is total");
        ldexp(m, self.exp)
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn abs(&self) -> Self {
        BigFloat { mant: self.mant.abs(), exp: self.exp }
    }

    /// floor(log2 |x|) + 1; 0 for x = 0. Used for cheap magnitude tests.
    pub fn mag2(&self) -> i64 {
        if self.mant.is_zero() {
            i64::MIN
        } else {
            self.exp + self.mant.bits() as i64
        }
    }

    /// Multiply by 2^k exactly.
    pub fn scalb(&self, k: i64) -> Self {
        if self.mant.is_zero() {
            return Self::zero();
        }
        BigFloat { mant: self.mant.clone(), exp: self.exp + k }
    }

    fn normalized(mut self) -> Self {
        if self.mant.is_zero() {
            self.exp = 0;
            return self;
        }
        let bits = self.mant.bits();
        if bits > PREC {
            let drop = (bits - PREC) as i64;
            self.mant = &self.mant >> drop;
            self.exp += drop;
        }
        self
    }

    pub fn cmp_abs(&self, other: &Self) -> Ordering {
        // Compare |self| vs |other| without allocating a subtraction.
        let (a, b) = (self.mag2(), other.mag2());
        if a != b || self.mant.is_zero() || other.mant.is_zero() {
            return a.cmp(&b);
        }
        (&self.clone().abs() - &other.abs()).mant.sign().cmp(&num_bigint::Sign::NoSign)
    }

    /// Newton square root; panics on negative input.
    pub fn sqrt(&self) -> Self {
        assert!(!self.is_negative(), "sqrt of negative BigFloat");
        if self.mant.is_zero() {
            return Self::zero();
        }
        // Seed from an f64 computed out of the leading bits so huge/tiny
        // exponents cannot overflow the conversion.
        let bits = self.mant.bits() as i64;
        let mut e2 = self.exp + bits; // value ≈ frac * 2^e2, frac in [1/2, 1)
        let mut frac = {
            let shift = bits - 53;
            let top = if shift > 0 { &self.mant >> shift } else { self.mant.clone() };
            top.to_f64().unwrap() * (2f64).powi(-(bits.min(53)) as i32)
        };
        if e2.rem_euclid(2) != 0 {
            e2 += 1;
            frac *= 0.5;
        }
        let seed = BigFloat::from_f64(frac.sqrt()).scalb(e2 / 2);
        let half = BigFloat::from_ratio(1, 2);
        let mut y = seed;
        for _ in 0..9 {
            y = &half * &(&y + &(self / &y));
        }
        y
    }
}

fn ldexp(x: f64, e: i64) -> f64 {
    let mut v = x;
    let mut rem = e;
    while rem > 900 {
        v *= (2f64).powi(900);
        rem -= 900;
    }
    while rem < -900 {
        v *= (2f64).powi(-900);
        rem += 900;
    }
    v * (2f64).powi(rem as i32)
}

impl Add for &BigFloat {
    type Output = BigFloat;
    fn add(self, rhs: &BigFloat) -> BigFloat {
        if self.mant.is_zero() {
            return rhs.clone();
        }
        if rhs.mant.is_zero() {
            return self.clone();
        }
        let (lo, hi) = if self.exp <= rhs.exp { (self, rhs) } else { (rhs, self) };
        let shift = hi.exp - lo.exp;
        // Beyond-precision addends cannot change the result.
        if shift > (PREC + 64) as i64 + lo.mant.bits() as i64 {
            return hi.clone();
        }
        let mant = (&hi.mant << shift) + &lo.mant;
        BigFloat { mant, exp: lo.exp }.normalized()
    }
}

impl Sub for &BigFloat {
    type Output = BigFloat;
    fn sub(self, rhs: &BigFloat) -> BigFloat {
        self + &(-rhs)
    }
}

impl Neg for &BigFloat {
    type Output = BigFloat;
    fn neg(self) -> BigFloat {
        BigFloat { mant: -&self.mant, exp: self.exp }
    }
}

impl Mul for &BigFloat {
    type Output = BigFloat;
    fn mul(self, rhs: &BigFloat) -> BigFloat {
        BigFloat { mant: &self.mant * &rhs.mant, exp: self.exp + rhs.exp }.normalized()
    }
}

impl Div for &BigFloat {
    type Output = BigFloat;
    fn div(self, rhs: &BigFloat) -> BigFloat {
        assert!(!rhs.mant.is_zero(), "BigFloat division by zero");
        if self.mant.is_zero() {
            return BigFloat::zero();
        }
        let shift = (PREC + DIV_GUARD) as i64 + rhs.mant.bits() as i64 - self.mant.bits() as i64;
        let shift = shift.max(0);
        let mant = (&self.mant << shift) / &rhs.mant;
        BigFloat { mant, exp: self.exp - rhs.exp - shift }.normalized()
    }
}

/// Multiply/divide by small integers without building a second BigFloat.
impl BigFloat {
    pub fn mul_i64(&self, k: i64) -> Self {
        BigFloat { mant: &self.mant * BigInt::from(k), exp: self.exp }.normalized()
    }

    pub fn div_i64(&self, k: i64) -> Self {
        self / &BigFloat::from_i64(k)
    }
}

// ---------------------------------------------------------------------------
// Transcendental constants and functions, all computed from scratch so the
// oracle contains no trusted decimal literals.
// ---------------------------------------------------------------------------

fn series_atanh(u: &BigFloat) -> BigFloat {
    // atanh u = u + u^3/3 + u^5/5 + ...  (|u| <= 1/3 in every use here)
    let u2 = u * u;
    let mut term = u.clone();
    let mut sum = u.clone();
    let mut n = 1i64;
    loop {
        term = &term * &u2;
        n += 2;
        let contrib = term.div_i64(n);
        if contrib.mag2() < sum.mag2() - (PREC as i64 + 16) {
            break;
        }
        sum = &sum + &contrib;
        if n > 4000 {
            break;
        }
    }
    sum
}

fn series_atan(u: &BigFloat) -> BigFloat {
    let u2 = u * u;
    let mut term = u.clone();
    let mut sum = u.clone();
    let mut n = 1i64;
    let mut sign = -1i64;
    loop {
        term = &term * &u2;
        n += 2;
        let contrib = term.div_i64(sign * n);
        if contrib.mag2() < sum.mag2() - (PREC as i64 + 16) {
            break;
        }
        sum = &sum + &contrib;
        sign = -sign;
        if n > 4000 {
            break;
        }
    }
    sum
}

pub fn ln2() -> &'static BigFloat {
    static LN2: OnceLock<BigFloat> = OnceLock::new();
    LN2.get_or_init(|| series_atanh(&BigFloat::from_ratio(1, 3)).scalb(1))
}

pub fn pi() -> &'static BigFloat {
    static PI: OnceLock<BigFloat> = OnceLock::new();
    PI.get_or_init(|| {
        // Machin: pi = 16 atan(1/5) - 4 atan(1/239)
        let a = series_atan(&BigFloat::from_ratio(1, 5));
        let b = series_atan(&BigFloat::from_ratio(1, 239));
        &a.mul_i64(16) - &b.mul_i64(4)
    })
}

pub fn ln(x: &BigFloat) -> BigFloat {
    assert!(!x.is_negative() && !x.is_zero(), "ln domain");
    // x = m * 2^k with m in [1, 2)
    let k = x.mag2() - 1;
    let m = x.scalb(-k);
    let one = BigFloat::from_i64(1);
    let u = &(&m - &one) / &(&m + &one);
    let lnm = series_atanh(&u).scalb(1);
    &ln2().mul_i64(k) + &lnm
}

pub fn exp(y: &BigFloat) -> BigFloat {
    let n = (y.to_f64() / std::f64::consts::LN_2).round();
    assert!(n.abs() < 9e15, "exp argument out of range");
    let n = n as i64;
    let r = y - &ln2().mul_i64(n);
    let mut term = BigFloat::from_i64(1);
    let mut sum = BigFloat::from_i64(1);
    let mut k = 0i64;
    loop {
        k += 1;
        term = (&term * &r).div_i64(k);
        if term.mag2() < sum.mag2() - (PREC as i64 + 16) {
            break;
        }
        sum = &sum + &term;
        if k > 500 {
            break;
        }
    }
    sum.scalb(n)
}

// --- Bernoulli numbers (exact rationals) and log-gamma -----------------------

#[derive(Clone)]
struct Rat {
    n: BigInt,
    d: BigInt,
}

impl Rat {
    fn new(n: BigInt, d: BigInt) -> Self {
        let g = n.gcd(&d);
        let (mut n, mut d) = (n / &g, d / &g);
        if d.is_negative() {
            n = -n;
            d = -d;
        }
        Rat { n, d }
    }

    fn add(&self, other: &Rat) -> Rat {
        Rat::new(&self.n * &other.d + &other.n * &self.d, &self.d * &other.d)
    }

    fn mul_int(&self, k: &BigInt) -> Rat {
        Rat::new(&self.n * k, self.d.clone())
    }

    fn div_int(&self, k: &BigInt) -> Rat {
        Rat::new(self.n.clone(), &self.d * k)
    }

    fn to_bigfloat(&self) -> BigFloat {
        &BigFloat::from_bigint(self.n.clone()) / &BigFloat::from_bigint(self.d.clone())
    }
}

fn binomial(n: u64, k: u64) -> BigInt {
    let k = k.min(n - k);
    let mut c = BigInt::from(1);
    for i in 1..=k {
        c = c * BigInt::from(n - k + i) / BigInt::from(i);
    }
    c
}

/// B_0 .. B_max, recurrence sum_{j<=m} C(m+1, j) B_j = 0.
fn bernoulli(max: usize) -> Vec<Rat> {
    let mut b: Vec<Rat> = Vec::with_capacity(max + 1);
    b.push(Rat::new(BigInt::from(1), BigInt::from(1)));
    for m in 1..=max {
        let mut acc = Rat::new(BigInt::from(0), BigInt::from(1));
        for (j, bj) in b.iter().enumerate() {
            acc = acc.add(&bj.mul_int(&binomial(m as u64 + 1, j as u64)));
        }
        let bm = acc.div_int(&BigInt::from(-(m as i64 + 1)));
        b.push(bm);
    }
    b
}

/// ln Γ(x) by the Stirling series; x must be large enough (≥ 50) that the
/// truncated tail is below working precision.
fn lngamma_stirling(x: &BigFloat) -> BigFloat {
    const N_TERMS: usize = 64;
    let bern = bernoulli(2 * N_TERMS);
    let half = BigFloat::from_ratio(1, 2);
    let lnx = ln(x);
    let mut s = &(&(x - &half) * &lnx) - x;
    // + (1/2) ln(2π)
    let two_pi = pi().scalb(1);
    s = &s + &ln(&two_pi).scalb(-1);
    let inv_x = &BigFloat::from_i64(1) / x;
    let inv_x2 = &inv_x * &inv_x;
    let mut p = inv_x.clone();
    for n in 1..=N_TERMS {
        let coeff = bern[2 * n]
            .div_int(&BigInt::from(2 * n as i64))
            .div_int(&BigInt::from(2 * n as i64 - 1))
            .to_bigfloat();
        s = &s + &(&coeff * &p);
        p = &p * &inv_x2;
    }
    s
}

/// Γ(num/3) for num = 1 or 2, via Γ(num/3 + SHIFT) and downward recursion.
fn gamma_thirds(num: i64) -> BigFloat {
    const SHIFT: i64 = 64;
    let frac = BigFloat::from_ratio(num, 3);
    let x = &frac + &BigFloat::from_i64(SHIFT);
    let g_shifted = exp(&lngamma_stirling(&x));
    let mut prod = BigFloat::from_i64(1);
    for j in 0..SHIFT {
        prod = &prod * &BigFloat::from_ratio(num + 3 * j, 3);
    }
    &g_shifted / &prod
}

pub fn gamma_one_third() -> &'static BigFloat {
    static G: OnceLock<BigFloat> = OnceLock::new();
    G.get_or_init(|| gamma_thirds(1))
}

pub fn gamma_two_thirds() -> &'static BigFloat {
    static G: OnceLock<BigFloat> = OnceLock::new();
    G.get_or_init(|| gamma_thirds(2))
}

/// Ai(0) = 3^(-2/3) / Γ(2/3)
pub fn ai_origin() -> &'static BigFloat {
    static V: OnceLock<BigFloat> = OnceLock::new();
    V.get_or_init(|| {
        let ln3 = ln(&BigFloat::from_i64(3));
        let p = exp(&(&ln3.mul_i64(-2)).div_i64(3));
        &p / gamma_two_thirds()
    })
}

/// Ai'(0) = -3^(-1/3) / Γ(1/3)
pub fn aip_origin() -> &'static BigFloat {
    static V: OnceLock<BigFloat> = OnceLock::new();
    V.get_or_init(|| {
        let ln3 = ln(&BigFloat::from_i64(3));
        let p = exp(&(&ln3.mul_i64(-1)).div_i64(3));
        -&(&p / gamma_one_third())
    })
}

// ---------------------------------------------------------------------------
// Complex arithmetic over BigFloat — just enough for the Airy series.
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct CBig {
    pub re: BigFloat,
    pub im: BigFloat,
}

impl CBig {
    pub fn zero() -> Self {
        CBig { re: BigFloat::zero(), im: BigFloat::zero() }
    }

    pub fn from_f64(re: f64, im: f64) -> Self {
        CBig { re: BigFloat::from_f64(re), im: BigFloat::from_f64(im) }
    }

    pub fn add(&self, o: &CBig) -> CBig {
        CBig { re: &self.re + &o.re, im: &self.im + &o.im }
    }

    pub fn sub(&self, o: &CBig) -> CBig {
        CBig { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    pub fn mul(&self, o: &CBig) -> CBig {
        CBig {
            re: &(&self.re * &o.re) - &(&self.im * &o.im),
            im: &(&self.re * &o.im) + &(&self.im * &o.re),
        }
    }

    pub fn scale(&self, s: &BigFloat) -> CBig {
        CBig { re: &self.re * s, im: &self.im * s }
    }

    pub fn div_i64(&self, k: i64) -> CBig {
        CBig { re: self.re.div_i64(k), im: self.im.div_i64(k) }
    }

    /// Larger of the two component magnitudes (log2 scale).
    pub fn mag2(&self) -> i64 {
        self.re.mag2().max(self.im.mag2())
    }

    pub fn to_c64(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}
