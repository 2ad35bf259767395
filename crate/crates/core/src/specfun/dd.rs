//! Double-double arithmetic for series that lose many digits to cancellation.

use std::ops::{Add, Mul};

use num_complex::Complex64 as C64;

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    pub(crate) fn new(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    pub(crate) fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    fn neg(self) -> Self {
        Self { hi: -self.hi, lo: -self.lo }
    }

    pub(crate) fn div_f64(self, d: f64) -> Self {
        let q1 = self.hi / d;
        let (p, e) = two_prod(q1, d);
        let (s, f) = two_sum(self.hi, -p);
        let r = s + (f - e + self.lo);
        let (hi, lo) = quick_two_sum(q1, r / d);
        Self { hi, lo }
    }
}

impl Add for Dd {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Self { hi, lo }
    }
}

impl Mul for Dd {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (p, e) = two_prod(self.hi, o.hi);
        let (hi, lo) = quick_two_sum(p, e + (self.hi * o.lo + self.lo * o.hi));
        Self { hi, lo }
    }
}

/// Complex number with double-double parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct CDd {
    pub(crate) re: Dd,
    pub(crate) im: Dd,
}

impl CDd {
    pub(crate) fn new(re: Dd, im: Dd) -> Self {
        Self { re, im }
    }

    pub(crate) fn from_c64(z: C64) -> Self {
        Self { re: Dd::new(z.re), im: Dd::new(z.im) }
    }

    pub(crate) fn to_c64(self) -> C64 {
        C64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub(crate) fn norm(self) -> f64 {
        self.to_c64().norm()
    }

    pub(crate) fn add_f64(self, x: f64) -> Self {
        Self { re: self.re + Dd::new(x), im: self.im }
    }

    pub(crate) fn div_f64(self, d: f64) -> Self {
        Self { re: self.re.div_f64(d), im: self.im.div_f64(d) }
    }

    pub(crate) fn sqr(self) -> Self {
        let two_re = self.re + self.re;
        Self { re: self.re * self.re + (self.im * self.im).neg(), im: two_re * self.im }
    }
}

impl Add for CDd {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { re: self.re + o.re, im: self.im + o.im }
    }
}

impl Mul for CDd {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self {
            re: self.re * o.re + (self.im * o.im).neg(),
            im: self.re * o.im + self.im * o.re,
        }
    }
}
