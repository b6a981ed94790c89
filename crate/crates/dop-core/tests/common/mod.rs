//! Test oracles shared by the integration tests.

#![allow(dead_code)]

use dop_core::exact::LatticeSpec;
use dop_core::Potential;

/// Double-double number `hi + lo`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub fn new(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    fn norm(hi: f64, lo: f64) -> Self {
        let (h, l) = two_sum(hi, lo);
        Dd { hi: h, lo: l }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Dd::new(0.0);
        }
        let s = self.hi.sqrt();
        let (p, e) = two_prod(s, s);
        let r = ((self.hi - p) - e + self.lo) / (2.0 * s);
        Dd::norm(s, r)
    }
}

impl std::ops::Add for Dd {
    type Output = Dd;
    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = (s, e + t);
        let (s, e) = two_sum(s, e);
        Dd::norm(s, e + f)
    }
}

impl std::ops::Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl std::ops::Sub for Dd {
    type Output = Dd;
    fn sub(self, o: Dd) -> Dd {
        self + (-o)
    }
}

impl std::ops::Mul for Dd {
    type Output = Dd;
    fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        Dd::norm(p, e + self.hi * o.lo + self.lo * o.hi)
    }
}

impl std::ops::Div for Dd {
    type Output = Dd;
    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self - o * Dd::new(q1);
        let q2 = r.hi / o.hi;
        let r = r - o * Dd::new(q2);
        let q3 = r.hi / o.hi;
        Dd::norm(q1, q2) + Dd::new(q3)
    }
}

/// Recurrence data from double-double modified Gram–Schmidt on the lattice,
/// in the same normalization as `RecurrenceTable` (`log_h` includes `−N min V`).
pub struct GramSchmidt {
    pub log_h: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma2: Vec<f64>,
}

pub fn gram_schmidt_dd(lat: &LatticeSpec, v: &Potential, n_max: usize) -> GramSchmidt {
    let nf = lat.n as f64;
    let xs: Vec<f64> = lat.nodes().collect();
    let vmin = xs.iter().map(|&x| v.eval(x)).fold(f64::INFINITY, f64::min);
    let w: Vec<Dd> = xs.iter().map(|&x| Dd::new((-nf * (v.eval(x) - vmin)).exp())).collect();
    let x: Vec<Dd> = xs.iter().map(|&x| Dd::new(x)).collect();
    let ip = |a: &[Dd], b: &[Dd]| {
        a.iter().zip(b).zip(&w).fold(Dd::new(0.0), |s, ((p, q), wk)| s + *p * *q * *wk)
    };
    let mut polys: Vec<Vec<Dd>> = vec![vec![Dd::new(1.0); xs.len()]];
    let mut h = vec![ip(&polys[0], &polys[0])];
    for k in 1..=n_max {
        let mut p: Vec<Dd> = polys[k - 1].iter().zip(&x).map(|(a, b)| *a * *b).collect();
        for _ in 0..2 {
            for (q, hq) in polys.iter().zip(&h) {
                let c = ip(&p, q) / *hq;
                for (pi, qi) in p.iter_mut().zip(q) {
                    *pi = *pi - c * *qi;
                }
            }
        }
        h.push(ip(&p, &p));
        polys.push(p);
    }
    let mut beta = Vec::new();
    let mut gamma2 = vec![0.0];
    for k in 0..=n_max {
        let xp: Vec<Dd> = polys[k].iter().zip(&x).map(|(a, b)| *a * *b).collect();
        beta.push((ip(&xp, &polys[k]) / h[k]).to_f64());
        if k > 0 {
            gamma2.push((h[k] / h[k - 1]).to_f64());
        }
    }
    let log_h = h
        .iter()
        .map(|hk| -nf * vmin + hk.hi.ln() + (hk.lo / hk.hi).ln_1p())
        .collect();
    GramSchmidt { log_h, beta, gamma2 }
}

/// `max_k |β_k| + γ_k + γ_{k+1}`, the scale for absolute errors in `β`.
pub fn jacobi_norm(gs: &GramSchmidt) -> f64 {
    let g = |k: usize| gs.gamma2.get(k).map_or(0.0, |v| v.sqrt());
    (0..gs.beta.len()).map(|k| gs.beta[k].abs() + g(k) + g(k + 1)).fold(0.0, f64::max)
}

/// `Σ_k P_a(x_k) P_b(x_k) w_k` by direct summation in double-double.
pub fn direct_inner(lat: &LatticeSpec, v: &Potential, pa: impl Fn(f64) -> f64, pb: impl Fn(f64) -> f64) -> f64 {
    let nf = lat.n as f64;
    let xs: Vec<f64> = lat.nodes().collect();
    let vmin = xs.iter().map(|&x| v.eval(x)).fold(f64::INFINITY, f64::min);
    xs.iter()
        .fold(Dd::new(0.0), |s, &x| s + Dd::new(pa(x)) * Dd::new(pb(x)) * Dd::new((-nf * (v.eval(x) - vmin)).exp()))
        .to_f64()
}

/// `θ(0 | τ = i) = π^{1/4} / Γ(3/4)`.
pub const THETA_ZERO_TAU_I: f64 = 1.086_434_811_213_308;
