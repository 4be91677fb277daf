//! Complex numbers with an extended exponent, `m · e^s`.
//!
//! Used where orbit images leave the `f64` range (exponential growth of
//! conjugated orbits, `sinh` of arguments in the thousands).

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtComplex {
    /// Mantissa, normalized to `|m| ∈ [1, e)` unless zero.
    pub m: Complex64,
    /// Natural-log scale.
    pub s: f64,
}

impl ExtComplex {
    pub const ZERO: ExtComplex = ExtComplex {
        m: Complex64 { re: 0.0, im: 0.0 },
        s: 0.0,
    };

    pub fn new(m: Complex64, s: f64) -> Self {
        ExtComplex { m, s }.normalized()
    }

    pub fn from_complex(z: Complex64) -> Self {
        ExtComplex::new(z, 0.0)
    }

    /// `e^z` without overflow.
    pub fn exp(z: Complex64) -> Self {
        ExtComplex::new(Complex64::from_polar(1.0, z.im), z.re)
    }

    fn normalized(self) -> Self {
        let a = self.m.norm();
        if a == 0.0 || !a.is_finite() {
            return ExtComplex {
                m: if a == 0.0 { Complex64::new(0.0, 0.0) } else { self.m },
                s: 0.0,
            };
        }
        let k = a.ln().floor();
        ExtComplex {
            m: self.m * (-k).exp(),
            s: self.s + k,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.m.re == 0.0 && self.m.im == 0.0
    }

    /// `ln |z|`; `-inf` for zero.
    pub fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.m.norm().ln() + self.s
        }
    }

    pub fn arg(&self) -> f64 {
        self.m.arg()
    }

    /// Principal logarithm as an ordinary complex number.
    pub fn ln(&self) -> Complex64 {
        Complex64::new(self.ln_abs(), self.arg())
    }

    /// Converts back, saturating to `inf`/`0` outside the `f64` range.
    pub fn to_complex(&self) -> Complex64 {
        self.m * self.s.exp()
    }

    pub fn conj(&self) -> Self {
        ExtComplex {
            m: self.m.conj(),
            s: self.s,
        }
    }

    pub fn neg(&self) -> Self {
        ExtComplex {
            m: -self.m,
            s: self.s,
        }
    }

    pub fn add(&self, other: &ExtComplex) -> Self {
        if self.is_zero() {
            return *other;
        }
        if other.is_zero() {
            return *self;
        }
        let s = self.s.max(other.s);
        let a = self.m * (self.s - s).exp();
        let b = other.m * (other.s - s).exp();
        ExtComplex::new(a + b, s)
    }

    pub fn sub(&self, other: &ExtComplex) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &ExtComplex) -> Self {
        ExtComplex::new(self.m * other.m, self.s + other.s)
    }

    pub fn div(&self, other: &ExtComplex) -> Self {
        ExtComplex::new(self.m / other.m, self.s - other.s)
    }

    pub fn scale(&self, k: Complex64) -> Self {
        ExtComplex::new(self.m * k, self.s)
    }

    pub fn powf(&self, p: f64, branch_center: f64) -> Self {
        if self.is_zero() {
            return ExtComplex::ZERO;
        }
        let mut theta = self.arg();
        while theta - branch_center > std::f64::consts::PI {
            theta -= 2.0 * std::f64::consts::PI;
        }
        while theta - branch_center <= -std::f64::consts::PI {
            theta += 2.0 * std::f64::consts::PI;
        }
        let lr = self.ln_abs();
        ExtComplex::new(Complex64::from_polar(1.0, p * theta), p * lr)
    }

    /// Real part as `(sign, ln|re|)`.
    pub fn re_ln(&self) -> (f64, f64) {
        (self.m.re.signum(), self.m.re.abs().ln() + self.s)
    }

    /// Imaginary part as `(sign, ln|im|)`.
    pub fn im_ln(&self) -> (f64, f64) {
        (self.m.im.signum(), self.m.im.abs().ln() + self.s)
    }
}

/// `ln(e^a + e^b)` without overflow.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// `ln sinh x` for `x > 0`, stable for large arguments.
pub fn ln_sinh(x: f64) -> f64 {
    assert!(x > 0.0, "ln_sinh needs a positive argument");
    if x < 1.0 {
        x.sinh().ln()
    } else {
        x - std::f64::consts::LN_2 + (-(-2.0 * x).exp()).ln_1p()
    }
}
