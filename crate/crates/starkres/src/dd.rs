//! Compensated (double-double) arithmetic for the Airy Maclaurin branch.
//!
//! Summing Ai = Ai(0)·f(w) + Ai'(0)·g(w) loses e^{2|ζ(w)|} of precision to
//! cancellation — about 8 decimal digits at w = +6 — so plain f64 cannot hold
//! the 1e-10 accuracy target on the recessive side. Two error-free transforms
//! (Knuth two-sum, FMA two-product) buy back ~16 digits at negligible cost.

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    Dd { hi: s, lo: (a - (s - bb)) + (b - bb) }
}

#[inline]
fn two_prod(a: f64, b: f64) -> Dd {
    let p = a * b;
    Dd { hi: p, lo: f64::mul_add(a, b, -p) }
}

#[inline]
fn renorm(hi: f64, lo: f64) -> Dd {
    let s = hi + lo;
    Dd { hi: s, lo: lo - (s - hi) }
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    pub const fn new(hi: f64, lo: f64) -> Dd {
        Dd { hi, lo }
    }

    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn add(self, o: Dd) -> Dd {
        let s = two_sum(self.hi, o.hi);
        renorm(s.hi, s.lo + self.lo + o.lo)
    }

    #[inline]
    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    #[inline]
    pub fn mul(self, o: Dd) -> Dd {
        let p = two_prod(self.hi, o.hi);
        renorm(p.hi, p.lo + self.hi * o.lo + self.lo * o.hi)
    }

    #[inline]
    pub fn div_f64(self, d: f64) -> Dd {
        let q1 = self.hi / d;
        let r = self.add(two_prod(q1, d).neg());
        renorm(q1, (r.hi + r.lo) / d)
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

/// Complex double-double, only the operations the series needs.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Cdd {
    pub re: Dd,
    pub im: Dd,
}

impl Cdd {
    pub const ZERO: Cdd = Cdd { re: Dd::ZERO, im: Dd::ZERO };

    pub fn from_c64(z: num_complex::Complex64) -> Cdd {
        Cdd { re: Dd::from_f64(z.re), im: Dd::from_f64(z.im) }
    }

    #[inline]
    pub fn add(self, o: Cdd) -> Cdd {
        Cdd { re: self.re.add(o.re), im: self.im.add(o.im) }
    }

    #[inline]
    pub fn mul(self, o: Cdd) -> Cdd {
        Cdd {
            re: self.re.mul(o.re).sub(self.im.mul(o.im)),
            im: self.re.mul(o.im).add(self.im.mul(o.re)),
        }
    }

    #[inline]
    pub fn scale(self, s: Dd) -> Cdd {
        Cdd { re: self.re.mul(s), im: self.im.mul(s) }
    }

    #[inline]
    pub fn div_f64(self, d: f64) -> Cdd {
        Cdd { re: self.re.div_f64(d), im: self.im.div_f64(d) }
    }

    /// Cheap magnitude estimate (no dd precision needed for loop control).
    #[inline]
    pub fn mag(self) -> f64 {
        self.re.hi.abs().max(self.im.hi.abs())
    }

    pub fn to_c64(self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}
