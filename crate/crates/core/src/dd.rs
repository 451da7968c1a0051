//! Double-double arithmetic (~31 significant digits).
//!
//! The closed-form tables are alternating sums of exponential terms: at high
//! SNR the individual addends sit many orders of magnitude above the final
//! probability, so plain f64 accumulation loses the answer entirely.  All
//! term assembly therefore runs on `Dd` values built from error-free
//! transforms (Knuth two-sum, Dekker/Veltkamp two-product), with `exp`/`expm1`
//! ported from the classic qd library recipe (range reduction by ln 2 and
//! 2⁻⁹, truncated Taylor series, repeated squaring).

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

const SPLIT: f64 = 134_217_729.0; // 2^27 + 1

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    // requires |a| >= |b|
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn split(a: f64) -> (f64, f64) {
    let t = SPLIT * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ahi, alo) = split(a);
    let (bhi, blo) = split(b);
    (p, ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo)
}

pub(crate) const LN2: Dd = Dd {
    hi: 0.693_147_180_559_945_3,
    lo: 2.319_046_813_846_299_6e-17,
};

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[inline]
    pub fn from_f64(a: f64) -> Dd {
        Dd { hi: a, lo: 0.0 }
    }

    /// Exact quotient of two small integers.
    pub fn from_ratio(num: f64, den: f64) -> Dd {
        Dd::from_f64(num).div(Dd::from_f64(den))
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    #[cfg(test)]
    pub fn abs(self) -> Dd {
        if self.hi < 0.0 { self.neg() } else { self }
    }

    #[inline]
    pub fn add(self, other: Dd) -> Dd {
        if !self.hi.is_finite() || !other.hi.is_finite() {
            return Dd::from_f64(self.hi + other.hi);
        }
        let (s1, s2) = two_sum(self.hi, other.hi);
        let (t1, t2) = two_sum(self.lo, other.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Dd { hi, lo }
    }

    #[inline]
    pub fn sub(self, other: Dd) -> Dd {
        self.add(other.neg())
    }

    #[inline]
    pub fn add_f64(self, other: f64) -> Dd {
        let (s1, s2) = two_sum(self.hi, other);
        let (hi, lo) = quick_two_sum(s1, s2 + self.lo);
        Dd { hi, lo }
    }

    #[inline]
    pub fn mul(self, other: Dd) -> Dd {
        if !self.hi.is_finite() || !other.hi.is_finite() {
            return Dd::from_f64(self.hi * other.hi);
        }
        let (p1, p2) = two_prod(self.hi, other.hi);
        let p2 = p2 + self.hi * other.lo + self.lo * other.hi;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }

    #[inline]
    pub fn mul_f64(self, other: f64) -> Dd {
        if !self.hi.is_finite() || !other.is_finite() {
            return Dd::from_f64(self.hi * other);
        }
        let (p1, p2) = two_prod(self.hi, other);
        let (hi, lo) = quick_two_sum(p1, p2 + self.lo * other);
        Dd { hi, lo }
    }

    /// Multiply by an exact power of two (component-wise, no rounding).
    #[inline]
    pub fn scale_pow2(self, k: f64) -> Dd {
        Dd { hi: self.hi * k, lo: self.lo * k }
    }

    pub fn div(self, other: Dd) -> Dd {
        if !self.hi.is_finite() || !other.hi.is_finite() {
            return Dd::from_f64(self.hi / other.hi);
        }
        let q1 = self.hi / other.hi;
        let r = self.sub(other.mul_f64(q1));
        let q2 = r.hi / other.hi;
        let r = r.sub(other.mul_f64(q2));
        let q3 = r.hi / other.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add_f64(q3)
    }

    pub fn recip(self) -> Dd {
        Dd::ONE.div(self)
    }

    /// Integer power by repeated squaring.
    pub fn powi(self, mut k: u32) -> Dd {
        let mut base = self;
        let mut acc = Dd::ONE;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(base);
            }
            base = base.mul(base);
            k >>= 1;
        }
        acc
    }

    /// e^self.  Arguments at or below -708 flush to zero (stays clear of the
    /// subnormal range so the final 2^m rescale is exact).
    pub fn exp(self) -> Dd {
        debug_assert!(!self.hi.is_nan());
        if self.hi <= -708.0 {
            return Dd::ZERO;
        }
        if self.hi >= 709.0 {
            return Dd::from_f64(f64::INFINITY);
        }
        if self.hi == 0.0 && self.lo == 0.0 {
            return Dd::ONE;
        }
        let m = (self.hi / LN2.hi + 0.5).floor();
        let r = self.sub(LN2.mul_f64(m)).scale_pow2(1.0 / 512.0);
        let s = Self::expm1_reduced(r);
        let s = Self::double_out(s, 9);
        s.add_f64(1.0).scale_pow2(pow2(m as i32))
    }

    /// e^self - 1, accurate near zero.
    pub fn expm1(self) -> Dd {
        if self.hi.abs() < 0.5 {
            let r = self.scale_pow2(1.0 / 512.0);
            let s = Self::expm1_reduced(r);
            Self::double_out(s, 9)
        } else {
            self.exp().add_f64(-1.0)
        }
    }

    /// Taylor series of e^r - 1 for |r| <= ln2/1024.
    fn expm1_reduced(r: Dd) -> Dd {
        let r2 = r.mul(r);
        let mut s = r.add(r2.scale_pow2(0.5));
        let mut p = r2.mul(r);
        let mut fact = 6.0;
        let mut k = 4.0;
        loop {
            let term = p.div(Dd::from_f64(fact));
            s = s.add(term);
            if term.hi.abs() < 1e-40 {
                break;
            }
            p = p.mul(r);
            fact *= k;
            k += 1.0;
        }
        s
    }

    /// (1+s)^(2^k) - 1 via s <- 2s + s^2.
    fn double_out(mut s: Dd, k: u32) -> Dd {
        for _ in 0..k {
            s = s.scale_pow2(2.0).add(s.mul(s));
        }
        s
    }
}

/// 2^k as f64 for |k| < 1023.
fn pow2(k: i32) -> f64 {
    f64::from_bits(((1023 + k) as u64) << 52)
}

impl std::ops::Add for Dd {
    type Output = Dd;
    fn add(self, rhs: Dd) -> Dd {
        Dd::add(self, rhs)
    }
}

impl std::ops::Sub for Dd {
    type Output = Dd;
    fn sub(self, rhs: Dd) -> Dd {
        Dd::sub(self, rhs)
    }
}

impl std::ops::Mul for Dd {
    type Output = Dd;
    fn mul(self, rhs: Dd) -> Dd {
        Dd::mul(self, rhs)
    }
}

impl std::ops::Div for Dd {
    type Output = Dd;
    fn div(self, rhs: Dd) -> Dd {
        Dd::div(self, rhs)
    }
}

impl std::ops::Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd::neg(self)
    }
}

impl std::ops::AddAssign for Dd {
    fn add_assign(&mut self, rhs: Dd) {
        *self = Dd::add(*self, rhs);
    }
}

impl From<f64> for Dd {
    fn from(a: f64) -> Dd {
        Dd::from_f64(a)
    }
}
