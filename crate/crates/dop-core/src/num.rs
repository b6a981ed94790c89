use num_complex::Complex;
#[allow(unused_imports)]
use num_traits::Float;

pub type C64 = Complex<f64>;

/// Boundary side for one-sided limits on the real axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Above,
    Below,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Above => 1.0,
            Side::Below => -1.0,
        }
    }

    pub fn of(z: C64) -> Side {
        if z.im < 0.0 {
            Side::Below
        } else {
            Side::Above
        }
    }

    pub fn flip(self) -> Side {
        match self {
            Side::Above => Side::Below,
            Side::Below => Side::Above,
        }
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.c
    }
}

impl core::iter::FromIterator<f64> for Kahan {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut k = Kahan::new();
        for x in iter {
            k.add(x);
        }
        k
    }
}

pub(crate) fn ksum<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    it.into_iter().collect::<Kahan>().value()
}

/// Principal square root; on the negative real axis the side selects the limit.
pub(crate) fn sqrt_side(z: C64, side: Side) -> C64 {
    if z.im == 0.0 && z.re < 0.0 {
        C64::new(0.0, side.sign() * (-z.re).sqrt())
    } else {
        z.sqrt()
    }
}

/// Principal power `z^p`; on the negative real axis the side selects the limit.
pub(crate) fn pow_side(z: C64, p: f64, side: Side) -> C64 {
    if z.im == 0.0 {
        if z.re > 0.0 {
            return C64::new(z.re.powf(p), 0.0);
        }
        if z.re < 0.0 {
            let m = (-z.re).powf(p);
            let a = side.sign() * core::f64::consts::PI * p;
            return C64::new(m * a.cos(), m * a.sin());
        }
        return C64::new(0.0, 0.0);
    }
    let r = z.norm().powf(p);
    let a = z.im.atan2(z.re) * p;
    C64::new(r * a.cos(), r * a.sin())
}

/// Principal logarithm; on the negative real axis the side selects the limit.
pub(crate) fn ln_side(z: C64, side: Side) -> C64 {
    if z.im == 0.0 && z.re < 0.0 {
        C64::new((-z.re).ln(), side.sign() * core::f64::consts::PI)
    } else {
        z.ln()
    }
}

pub(crate) fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

pub(crate) fn horner_c(c: &[f64], z: C64) -> C64 {
    c.iter().rev().fold(C64::new(0.0, 0.0), |acc, &a| acc * z + a)
}
