use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::linalg::{solve, Mat};
use crate::num::{horner, horner_c, sqrt_side};
#[allow(unused_imports)]
use crate::prelude::*;
use crate::quad::Rule;
use crate::{Error, Potential, Result};

/// Saturated gap `(β_j, α_{j+1})` with the split `1/r = t(s)/sqrt((s−β)(α−s))`.
#[derive(Debug, Clone)]
struct SatGap {
    beta: f64,
    alpha: f64,
    /// Outer limits of the region where `t` is analytic on the real line.
    lo: f64,
    hi: f64,
    left: Vec<f64>,
    right: Vec<f64>,
    sign: f64,
    nodes: Vec<f64>,
    tvals: Vec<f64>,
    weight: f64,
}

impl SatGap {
    fn new(edges: &[f64], j: usize, n: usize) -> SatGap {
        let q = edges.len() / 2;
        let (beta, alpha) = (edges[2 * j + 1], edges[2 * j + 2]);
        let left = edges[..2 * j + 1].to_vec();
        let right = edges[2 * j + 3..].to_vec();
        let sign = if (q - 1 - j) % 2 == 0 { 1.0 } else { -1.0 };
        let mut g = SatGap {
            beta,
            alpha,
            lo: edges[2 * j],
            hi: edges[2 * j + 3],
            left,
            right,
            sign,
            nodes: Vec::new(),
            tvals: Vec::new(),
            weight: PI / n as f64,
        };
        let (c, h) = ((beta + alpha) / 2.0, (alpha - beta) / 2.0);
        g.nodes = Rule::chebyshev(n).nodes.iter().map(|x| c + h * x).collect();
        g.tvals = g.nodes.iter().map(|&s| g.t(C64::new(s, 0.0)).re).collect();
        g
    }

    fn t(&self, z: C64) -> C64 {
        let mut p = C64::new(1.0, 0.0);
        for &e in &self.left {
            p *= (z - e).sqrt();
        }
        for &e in &self.right {
            p *= (C64::new(e, 0.0) - z).sqrt();
        }
        C64::new(self.sign, 0.0) / p
    }

    /// `∫_gap ds / (r(s)(s − z))`, one-sided for real `z` inside the gap.
    fn cauchy(&self, z: C64, side: Side) -> C64 {
        let plain = z.im == 0.0 && (z.re <= self.lo || z.re >= self.hi);
        let mut s = C64::new(0.0, 0.0);
        if plain {
            for (x, t) in self.nodes.iter().zip(&self.tvals) {
                s += C64::new(*t, 0.0) / (C64::new(*x, 0.0) - z);
            }
            return s * self.weight;
        }
        let tz = self.t(z);
        for (x, t) in self.nodes.iter().zip(&self.tvals) {
            let d = C64::new(*x, 0.0) - z;
            if d.norm() < 1e-13 * (self.alpha - self.beta) {
                let h = 1e-6 * (self.alpha - self.beta);
                s += (self.t(z + h) - self.t(z - h)) / (2.0 * h);
            } else {
                s += (C64::new(*t, 0.0) - tz) / d;
            }
        }
        let jw = -PI / (sqrt_side(z - self.beta, side) * sqrt_side(z - self.alpha, side));
        s * self.weight + tz * jw
    }
}

/// Analytic description of a regular equilibrium measure from its edges:
/// `F(z) = ∫ρ(s)ds/(z−s) = V'(z)/2 − r(z)Q(z)` with `r = Π sqrt(z−e)`.
#[derive(Debug, Clone)]
pub struct BandStructure {
    v: Potential,
    edges: Vec<f64>,
    saturated: Vec<bool>,
    pol: Vec<f64>,
    laurent: Vec<f64>,
    sat: Vec<SatGap>,
    rule: Rule,
    path: Rule,
    nq: usize,
    l: f64,
}

impl BandStructure {
    /// Builds the structure for given edges (no refinement).
    pub fn new(v: &Potential, edges: &[f64], saturated: &[bool], nq: usize) -> Result<Self> {
        let mut b = Self::raw(v, edges, saturated, nq)?;
        b.l = b.compute_l();
        Ok(b)
    }

    fn raw(v: &Potential, edges: &[f64], saturated: &[bool], nq: usize) -> Result<Self> {
        let q = edges.len() / 2;
        if edges.len() % 2 != 0 || q == 0 || saturated.len() + 1 != q {
            return Err(Error::InvalidArgument("edge list / gap tags mismatch".into()));
        }
        if edges.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::EdgeRefinement(format!("edges not increasing: {edges:?}")));
        }
        let sat: Vec<SatGap> = (0..q - 1)
            .filter(|&j| saturated[j])
            .map(|j| SatGap::new(edges, j, nq + 1))
            .collect();
        let (pol, laurent) = laurent(v.deriv_coeffs(), edges);
        Ok(BandStructure {
            v: v.clone(),
            edges: edges.to_vec(),
            saturated: saturated.to_vec(),
            pol,
            laurent,
            sat,
            rule: Rule::legendre(nq),
            path: Rule::legendre(96),
            nq,
            l: 0.0,
        })
    }

    /// Newton refinement of the `2q` edges from an initial guess.
    pub fn solve(v: &Potential, guess: &[f64], saturated: &[bool], nq: usize) -> Result<Self> {
        let mut e = guess.to_vec();
        let n = e.len();
        let scale = e[n - 1] - e[0];
        let mut res = Self::raw(v, &e, saturated, nq)?.residuals();
        let norm = |r: &[f64]| r.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for _ in 0..60 {
            if norm(&res) < 1e-14 {
                break;
            }
            let h = 1e-7 * scale;
            let mut jac = Mat::zeros(n);
            for k in 0..n {
                let mut e2 = e.clone();
                e2[k] += h;
                let r2 = Self::raw(v, &e2, saturated, nq)?.residuals();
                for i in 0..n {
                    jac.set(i, k, (r2[i] - res[i]) / h);
                }
            }
            let step = solve(jac, &res)
                .map_err(|_| Error::EdgeRefinement("singular Jacobian".into()))?;
            let mut t = 1.0;
            let mut improved = false;
            for _ in 0..30 {
                let cand: Vec<f64> = e.iter().zip(&step).map(|(a, s)| a - t * s).collect();
                if cand.windows(2).all(|w| w[1] > w[0]) {
                    if let Ok(b) = Self::raw(v, &cand, saturated, nq) {
                        let r = b.residuals();
                        if norm(&r) < norm(&res) || norm(&r) < 1e-14 {
                            e = cand;
                            res = r;
                            improved = true;
                            break;
                        }
                    }
                }
                t *= 0.5;
            }
            if !improved {
                break;
            }
        }
        if norm(&res) > 1e-9 {
            return Err(Error::EdgeRefinement(format!(
                "endpoint equations not solved (residual {:e})",
                norm(&res)
            )));
        }
        let b = Self::new(v, &e, saturated, nq)?;
        for k in 0..b.q() {
            let (a, bb) = (e[2 * k], e[2 * k + 1]);
            for i in 1..8 {
                let x = a + (bb - a) * i as f64 / 8.0;
                if !(b.rho(x) > 0.0 && b.rho(x) < 1.0) {
                    return Err(Error::Irregular(format!("density leaves (0,1) at x = {x}")));
                }
            }
        }
        Ok(b)
    }

    pub fn potential(&self) -> &Potential {
        &self.v
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn q(&self) -> usize {
        self.edges.len() / 2
    }

    pub fn saturated(&self) -> &[bool] {
        &self.saturated
    }

    pub fn quadrature_size(&self) -> usize {
        self.nq
    }

    pub fn lagrange_l(&self) -> f64 {
        self.l
    }

    pub fn rule(&self) -> &Rule {
        &self.rule
    }

    pub fn path_rule(&self) -> &Rule {
        &self.path
    }

    /// Support width `β_q − α_1`.
    pub fn width(&self) -> f64 {
        self.edges[self.edges.len() - 1] - self.edges[0]
    }

    /// Band index containing `x` (closed bands).
    pub fn band_of(&self, x: f64) -> Option<usize> {
        (0..self.q()).find(|&k| self.edges[2 * k] <= x && x <= self.edges[2 * k + 1])
    }

    /// Interior gap index with `β_j < x < α_{j+1}`.
    pub fn gap_of(&self, x: f64) -> Option<usize> {
        (0..self.q() - 1).find(|&j| self.edges[2 * j + 1] < x && x < self.edges[2 * j + 2])
    }

    pub fn in_saturated(&self, x: f64) -> bool {
        self.gap_of(x).map(|j| self.saturated[j]).unwrap_or(false)
    }

    /// Residuals of the endpoint equations (zero for the true edges).
    pub fn residuals(&self) -> Vec<f64> {
        let q = self.q();
        let mu = |k: i32| -> f64 {
            self.sat
                .iter()
                .map(|g| {
                    g.nodes
                        .iter()
                        .zip(&g.tvals)
                        .map(|(s, t)| t * s.powi(k))
                        .sum::<f64>()
                        * g.weight
                })
                .sum()
        };
        let mut res = Vec::with_capacity(2 * q);
        for k in 1..=q {
            res.push(self.laurent[k] + mu(k as i32 - 1));
        }
        res.push(self.laurent[q + 1] + mu(q as i32) - 1.0);
        for j in 0..q - 1 {
            let (b, a) = (self.edges[2 * j + 1], self.edges[2 * j + 2]);
            let val = self.rule.cos_sub(b, a, |s| C64::new(self.rq(C64::new(s, 0.0), Side::Above).re, 0.0));
            res.push(val.re);
        }
        res
    }

    pub fn r(&self, z: C64, side: Side) -> C64 {
        self.edges
            .iter()
            .fold(C64::new(1.0, 0.0), |p, &e| p * sqrt_side(z - e, side))
    }

    pub fn q_fn(&self, z: C64, side: Side) -> C64 {
        let mut s = horner_c(&self.pol, z);
        for g in &self.sat {
            s += g.cauchy(z, side);
        }
        s
    }

    /// `r(z)Q(z) = V'(z)/2 − F(z)`.
    pub fn rq(&self, z: C64, side: Side) -> C64 {
        if z.im == 0.0 {
            if let Some(i) = self.edges.iter().position(|&e| e == z.re) {
                let sat_side = (i % 2 == 1 && i / 2 < self.q() - 1 && self.saturated[i / 2])
                    || (i % 2 == 0 && i > 0 && self.saturated[i / 2 - 1]);
                return if sat_side { C64::new(0.0, PI * side.sign()) } else { C64::new(0.0, 0.0) };
            }
        }
        self.r(z, side) * self.q_fn(z, side)
    }

    /// Resolvent `F(z) = g'(z)`.
    pub fn resolvent(&self, z: C64, side: Side) -> C64 {
        self.v.deriv_c(z) * 0.5 - self.rq(z, side)
    }

    pub fn rho(&self, x: f64) -> f64 {
        if self.in_saturated(x) {
            return 1.0;
        }
        if self.band_of(x).is_none() {
            return 0.0;
        }
        (self.rq(C64::new(x, 0.0), Side::Above).im / PI).clamp(0.0, 1.0)
    }

    /// `1 − ρ(x)` without cancellation near saturated edges.
    pub fn one_minus_rho(&self, x: f64) -> f64 {
        if self.band_of(x).is_none() {
            return if self.in_saturated(x) { 0.0 } else { 1.0 };
        }
        ((PI - self.rq(C64::new(x, 0.0), Side::Above).im) / PI).clamp(0.0, 1.0)
    }

    /// `∫_a^b ρ`.
    pub fn mass(&self, a: f64, b: f64) -> f64 {
        if b < a {
            return -self.mass(b, a);
        }
        let mut pts = vec![a];
        pts.extend(self.edges.iter().copied().filter(|&e| e > a && e < b));
        pts.push(b);
        let mut total = 0.0;
        for w in pts.windows(2) {
            let (u, v) = (w[0], w[1]);
            if v <= u {
                continue;
            }
            let m = 0.5 * (u + v);
            if self.band_of(m).is_some() {
                total += self.rule.cos_sub_real(u, v, |s| self.rho(s));
            } else if self.in_saturated(m) {
                total += v - u;
            }
        }
        total
    }

    /// `∫_{α_1}^{β_q} log|x−t| ρ(t) dt` by direct quadrature (accurate away from the support).
    pub fn log_potential_direct(&self, x: f64) -> f64 {
        self.log_integral(C64::new(x, 0.0), Side::Above).re
    }

    /// `∫ log(z−t) ρ(t) dt` with principal logs, summing band quadratures and
    /// closed-form saturated pieces.
    pub(crate) fn log_integral(&self, z: C64, side: Side) -> C64 {
        let mut s = C64::new(0.0, 0.0);
        for k in 0..self.q() {
            let (a, b) = (self.edges[2 * k], self.edges[2 * k + 1]);
            s += self
                .rule
                .cos_sub(a, b, |t| crate::num::ln_side(z - t, side) * self.rho(t));
        }
        let anti = |w: C64| -> C64 {
            if w.norm() == 0.0 {
                C64::new(0.0, 0.0)
            } else {
                w * crate::num::ln_side(w, side) - w
            }
        };
        for (j, &sat) in self.saturated.iter().enumerate() {
            if sat {
                let (b, a) = (self.edges[2 * j + 1], self.edges[2 * j + 2]);
                s += anti(z - b) - anti(z - a);
            }
        }
        s
    }

    /// `∫_e^x Re(rQ)` along the real axis from an edge, `√`-graded at `e`.
    pub(crate) fn real_path(&self, e: f64, x: f64) -> f64 {
        let d = x - e;
        self.path
            .unit(|u| {
                let s = e + d * u * u;
                C64::new(self.rq(C64::new(s, 0.0), Side::Above).re * 2.0 * d * u, 0.0)
            })
            .re
    }

    /// `L(x) = ∫ log|x−t| ρ(t) dt`.
    pub fn log_potential(&self, x: f64) -> f64 {
        let (a1, bq) = (self.edges[0], self.edges[self.edges.len() - 1]);
        let w = self.width();
        if x < a1 - 2.0 * w || x > bq + 2.0 * w {
            return self.log_potential_direct(x);
        }
        let base = 0.5 * (self.v.eval(x) + self.l);
        if self.band_of(x).is_some() {
            return base;
        }
        let e = self.nearest_edge(x);
        base - self.real_path(e, x)
    }

    pub(crate) fn nearest_edge(&self, x: f64) -> f64 {
        *self
            .edges
            .iter()
            .min_by(|a, b| (*a - x).abs().total_cmp(&(*b - x).abs()))
            .expect("edges")
    }

    fn compute_l(&self) -> f64 {
        let bq = self.edges[self.edges.len() - 1];
        let x = bq + 0.5 * self.width();
        let lx = self.log_potential_direct(x);
        2.0 * lx - self.v.eval(x) + 2.0 * self.real_path(bq, x)
    }

    /// Square-root constant `C` at edge `i`: `ρ ≈ C√|x−e|` on a band-void
    /// edge, `1−ρ ≈ C√|x−e|` on a band-saturated one.
    pub fn edge_constant(&self, i: usize) -> f64 {
        let e = self.edges[i];
        let d = 1e-9 * self.width();
        let x = if i % 2 == 0 { e + d } else { e - d };
        let sat = self.edge_is_saturated(i);
        let y = if sat { self.one_minus_rho(x) } else { self.rho(x) };
        y / d.sqrt()
    }

    pub fn edge_is_saturated(&self, i: usize) -> bool {
        let q = self.q();
        if i % 2 == 1 {
            i / 2 < q - 1 && self.saturated[i / 2]
        } else {
            i > 0 && self.saturated[i / 2 - 1]
        }
    }

    /// Effective potential `2L(x) − V(x)`.
    pub fn effective(&self, x: f64) -> f64 {
        2.0 * self.log_potential(x) - self.v.eval(x)
    }
}

/// Polynomial part and `z^{-k}` coefficients of `V'(z) / (2 r(z))`.
fn laurent(dv: &[f64], edges: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let q = edges.len() / 2;
    let kk = dv.len() + q + 6;
    let mut s = vec![0.0; kk];
    s[0] = 1.0;
    for &e in edges {
        let mut c = vec![0.0; kk];
        c[0] = 1.0;
        for k in 1..kk {
            c[k] = c[k - 1] * (k as f64 - 0.5) / k as f64 * e;
        }
        let mut out = vec![0.0; kk];
        for i in 0..kk {
            for j in 0..kk - i {
                out[i + j] += s[i] * c[j];
            }
        }
        s = out;
    }
    let coef = |p: i64| -> f64 {
        dv.iter()
            .enumerate()
            .filter_map(|(m, vm)| {
                let nn = m as i64 - q as i64 - p;
                (nn >= 0 && (nn as usize) < kk).then(|| 0.5 * vm * s[nn as usize])
            })
            .sum()
    };
    let deg = dv.len() as i64 - 1 - q as i64;
    let pol = (0..=deg.max(-1)).map(coef).collect();
    let lau = (0..q as i64 + 3).map(|k| coef(-k)).collect();
    (pol, lau)
}

#[allow(dead_code)]
fn poly_eval(c: &[f64], x: f64) -> f64 {
    horner(c, x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn semicircle() {
        let v = Potential::preset("gaussian").unwrap();
        let b = BandStructure::solve(&v, &[-1.3, 1.35], &[], 128).unwrap();
        let s2 = 2f64.sqrt();
        assert!((b.edges()[1] - s2).abs() < 1e-13);
        assert!((b.rho(0.0) - s2 / PI).abs() < 1e-13);
        assert!((b.mass(-2.0, 2.0) - 1.0).abs() < 1e-13);
        assert!((b.lagrange_l() + 1.0 + 2f64.ln()).abs() < 1e-12, "{}", b.lagrange_l());
        // L(3) = log((3+sqrt(7))/2) + (3 - sqrt 7)^2 ... compare with direct quadrature
        assert!((b.log_potential(3.0) - b.log_potential_direct(3.0)).abs() < 1e-12);
        assert!((b.edge_constant(1) - (2.0 * s2).sqrt() / PI).abs() < 1e-6);
    }

    #[test]
    fn saturated_two_band() {
        let v = Potential::preset("saturated").unwrap();
        let b = BandStructure::solve(&v, &[-0.52, -0.48, 0.48, 0.52], &[true], 256).unwrap();
        let e = b.edges();
        assert!((e[3] - 0.51274634).abs() < 1e-7, "{e:?}");
        assert!((e[2] - 0.48559516).abs() < 1e-7);
        assert!((b.mass(-1.0, 1.0) - 1.0).abs() < 1e-12);
        assert!((b.lagrange_l() + 4.50073).abs() < 1e-4, "{}", b.lagrange_l());
        assert_eq!(b.rho(0.1), 1.0);
        let c = b.edge_constant(2);
        assert!(c > 0.0);
        // effective potential: = l on bands, > l in the saturated gap
        let mid = 0.5 * (e[2] + e[3]);
        assert!((b.effective(mid) - b.lagrange_l()).abs() < 1e-12);
        assert!(b.effective(0.2) > b.lagrange_l());
        assert!(b.effective(0.7) < b.lagrange_l());
    }
}
