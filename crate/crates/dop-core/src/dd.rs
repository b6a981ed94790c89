//! Double-double arithmetic (about 32 significant digits) on pairs of `f64`.

use core::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

pub(crate) fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    Dd {
        hi: s,
        lo: (a - (s - bb)) + (b - bb),
    }
}

pub(crate) fn split(a: f64) -> (f64, f64) {
    let t = 134_217_729.0 * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

pub(crate) fn two_prod(a: f64, b: f64) -> Dd {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    Dd {
        hi: p,
        lo: ((ah * bh - p) + ah * bl + al * bh) + al * bl,
    }
}

impl Dd {
    pub const fn new(hi: f64, lo: f64) -> Self {
        Dd { hi, lo }
    }
    pub fn from(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }
    pub fn norm(s: f64, e: f64) -> Self {
        let hi = s + e;
        Dd {
            hi,
            lo: e - (hi - s),
        }
    }
    pub fn div_f(self, d: f64) -> Self {
        let q1 = self.hi / d;
        let p = two_prod(q1, d);
        let r = (self.hi - p.hi - p.lo + self.lo) / d;
        Dd::norm(q1, r)
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, o: Dd) -> Dd {
        let s = two_sum(self.hi, o.hi);
        let t = two_sum(self.lo, o.lo);
        let u = Dd::norm(s.hi, s.lo + t.hi);
        Dd::norm(u.hi, u.lo + t.lo)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd::new(-self.hi, -self.lo)
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, o: Dd) -> Dd {
        self + (-o)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, o: Dd) -> Dd {
        let p = two_prod(self.hi, o.hi);
        Dd::norm(p.hi, p.lo + (self.hi * o.lo + self.lo * o.hi))
    }
}
