//! Airy functions `Ai`, `Bi` and derivatives for complex arguments.
//!
//! Small `|z|` uses the Maclaurin series in double-double arithmetic, large
//! `|z|` the asymptotic expansion of `Ai` plus the rotation identities.

use core::f64::consts::PI;
use core::ops::{Add, Mul, Sub};

#[allow(unused_imports)]
use crate::prelude::*;
use crate::dd::Dd;

/// Radius below which the Maclaurin series is used.
pub const SERIES_RADIUS: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryPair {
    pub ai: C64,
    pub aip: C64,
    pub bi: C64,
    pub bip: C64,
}

impl AiryPair {
    pub fn wronskian(&self) -> C64 {
        self.ai * self.bip - self.aip * self.bi
    }
}

pub fn airy(z: C64) -> AiryPair {
    if z.norm() <= SERIES_RADIUS {
        airy_series(z)
    } else {
        airy_asymptotic(z)
    }
}

/// Real-argument convenience: `(Ai, Ai', Bi, Bi')`.
pub fn airy_real(x: f64) -> [f64; 4] {
    let p = airy(C64::new(x, 0.0));
    [p.ai.re, p.aip.re, p.bi.re, p.bip.re]
}

#[derive(Debug, Clone, Copy, Default)]
struct Cdd {
    re: Dd,
    im: Dd,
}

impl Cdd {
    fn from(z: C64) -> Self {
        Cdd {
            re: Dd::from(z.re),
            im: Dd::from(z.im),
        }
    }
    fn one() -> Self {
        Cdd::from(C64::new(1.0, 0.0))
    }
    fn scale(self, d: Dd) -> Self {
        Cdd {
            re: self.re * d,
            im: self.im * d,
        }
    }
    fn div_f(self, d: f64) -> Self {
        Cdd {
            re: self.re.div_f(d),
            im: self.im.div_f(d),
        }
    }
    fn abs_hi(self) -> f64 {
        self.re.hi.hypot(self.im.hi)
    }
    fn to_c64(self) -> C64 {
        C64::new(self.re.hi + self.re.lo, self.im.hi + self.im.lo)
    }
}

impl Add for Cdd {
    type Output = Cdd;
    fn add(self, o: Cdd) -> Cdd {
        Cdd {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }
}

impl Sub for Cdd {
    type Output = Cdd;
    fn sub(self, o: Cdd) -> Cdd {
        Cdd {
            re: self.re - o.re,
            im: self.im - o.im,
        }
    }
}

impl Mul for Cdd {
    type Output = Cdd;
    fn mul(self, o: Cdd) -> Cdd {
        Cdd {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
}

const AI0: Dd = Dd::new(0.3550280538878172, 2.05233632436212e-17);
const MAIP0: Dd = Dd::new(0.2588194037928068, -2.522243111610832e-17);
const SQRT3: Dd = Dd::new(1.7320508075688772, 1.0035084221806903e-16);

/// Maclaurin series, accurate for `|z| ≤ 8` despite the cancellation on the negative axis.
pub fn airy_series(z: C64) -> AiryPair {
    let zd = Cdd::from(z);
    let z3 = zd * zd * zd;
    // f = Σ a_k z^{3k}, g = Σ b_k z^{3k+1} and their derivatives
    let mut tf = Cdd::one();
    let mut tg = zd;
    let mut tfp = Cdd::default();
    let mut tgp = Cdd::one();
    let (mut f, mut g, mut fp, mut gp) = (tf, tg, tfp, tgp);
    let mut peak = 1.0f64;
    for k in 1..400 {
        let kf = k as f64;
        tf = (tf * z3).div_f((3.0 * kf - 1.0) * (3.0 * kf));
        tg = (tg * z3).div_f((3.0 * kf + 1.0) * (3.0 * kf));
        tfp = if k == 1 {
            (zd * zd).div_f(2.0)
        } else {
            (tfp * z3).div_f(3.0 * (kf - 1.0) * (3.0 * kf - 1.0))
        };
        tgp = (tgp * z3).div_f((3.0 * kf - 2.0) * (3.0 * kf));
        f = f + tf;
        g = g + tg;
        fp = fp + tfp;
        gp = gp + tgp;
        let m = tf.abs_hi().max(tg.abs_hi()).max(tfp.abs_hi()).max(tgp.abs_hi());
        peak = peak.max(m);
        if m < 1e-34 * peak {
            break;
        }
    }
    let ai = f.scale(AI0) - g.scale(MAIP0);
    let aip = fp.scale(AI0) - gp.scale(MAIP0);
    let bi = (f.scale(AI0) + g.scale(MAIP0)).scale(SQRT3);
    let bip = (fp.scale(AI0) + gp.scale(MAIP0)).scale(SQRT3);
    AiryPair {
        ai: ai.to_c64(),
        aip: aip.to_c64(),
        bi: bi.to_c64(),
        bip: bip.to_c64(),
    }
}

/// Asymptotic `(Ai, Ai')` for `|arg z| ≤ 2π/3`, optimally truncated.
fn ai_sector(z: C64) -> (C64, C64) {
    let zeta = z.powf(1.5) * (2.0 / 3.0);
    let inv = 1.0 / zeta;
    let (mut su, mut sv) = (C64::new(1.0, 0.0), C64::new(1.0, 0.0));
    let mut u = 1.0f64;
    let mut pw = C64::new(1.0, 0.0);
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
        let v = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u;
        pw = -pw * inv;
        let tu = pw * u;
        let m = tu.norm();
        if m >= last || m < 1e-18 {
            break;
        }
        last = m;
        su += tu;
        sv += pw * v;
    }
    let e = (-zeta).exp() / (2.0 * PI.sqrt());
    let q = z.powf(0.25);
    (e / q * su, -e * q * sv)
}

fn ai_any(z: C64) -> (C64, C64) {
    if z.arg().abs() <= 2.0 * PI / 3.0 {
        return ai_sector(z);
    }
    let w = C64::from_polar(1.0, 2.0 * PI / 3.0);
    let w2 = w * w;
    let (a1, d1) = ai_sector(w * z);
    let (a2, d2) = ai_sector(w2 * z);
    (-w * a1 - w2 * a2, -w2 * d1 - w * d2)
}

/// Large-`|z|` evaluation; accurate to about 1e-13 relative for `|z| ≥ 8`.
pub fn airy_asymptotic(z: C64) -> AiryPair {
    let (ai, aip) = ai_any(z);
    let w = C64::from_polar(1.0, 2.0 * PI / 3.0);
    let e6 = C64::from_polar(1.0, PI / 6.0);
    let (ap, dp) = ai_any(w * z);
    let (am, dm) = ai_any(w.conj() * z);
    AiryPair {
        ai,
        aip,
        bi: e6 * ap + e6.conj() * am,
        bip: e6 * w * dp + e6.conj() * w.conj() * dm,
    }
}
