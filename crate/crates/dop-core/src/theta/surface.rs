//! Hyperelliptic surface `w² = Π(z−α_j)(z−β_j)`: normalized differentials,
//! periods, Abel map, Riemann constants and gap zeros.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::linalg::{cholesky, inverse, Mat};
use crate::num::{pow_side, sqrt_side};
#[allow(unused_imports)]
use crate::prelude::*;
use crate::quad::Rule;
use crate::{Error, Result};

use super::riemann::ThetaEvaluator;

#[derive(Debug, Clone)]
pub struct SurfaceData {
    edges: Vec<f64>,
    rule: Rule,
    /// Row `k` holds the coefficients of `ω_k = Σ_m c_{km} s^m ds / r(s)`.
    pub c: Mat<f64>,
    pub tau: Mat<C64>,
    pub u_infinity: Vec<C64>,
    /// Leading decay `u(z) ≈ u(∞) − u'(∞)/z`.
    pub u_infinity_derivative: Vec<f64>,
    pub gap_zeros: Vec<f64>,
    pub riemann_k: Vec<C64>,
    pub d: Vec<C64>,
    /// `true` when the raw period matrix had `−iτ` negative and all signs were flipped.
    pub orientation_flipped: bool,
}

impl SurfaceData {
    pub fn genus(&self) -> usize {
        self.edges.len() / 2 - 1
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    fn width(&self) -> f64 {
        self.edges[self.edges.len() - 1] - self.edges[0]
    }

    pub fn r(&self, s: C64, side: Side) -> C64 {
        self.edges
            .iter()
            .fold(C64::new(1.0, 0.0), |p, &e| p * sqrt_side(s - e, side))
    }

    fn add_powers(&self, s: C64, side: Side, ds: C64, acc: &mut [C64]) {
        let f = ds / self.r(s, side);
        let mut p = C64::new(1.0, 0.0);
        for a in acc.iter_mut() {
            *a += f * p;
            p *= s;
        }
    }

    /// `∫_u^v s^m ds / r_side(s)` along the real axis, square-root graded at both ends.
    fn seg(&self, rule: &Rule, u: f64, v: f64, side: Side) -> Vec<C64> {
        let mut acc = vec![C64::new(0.0, 0.0); self.genus()];
        if u == v {
            return acc;
        }
        let h = (v - u) / 2.0;
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            let th = 0.5 * PI * (x + 1.0);
            // offsets from both ends in closed form: on short segments `s` rounds onto an edge
            let (du, dv) = (2.0 * h * (0.5 * th).sin().powi(2), 2.0 * h * (0.5 * th).cos().powi(2));
            let s = if du < dv { u + du } else { v - dv };
            let r = self.edges.iter().fold(C64::new(1.0, 0.0), |p, &e| {
                let d = if e == u { du } else if e == v { -dv } else { s - e };
                p * sqrt_side(C64::new(d, 0.0), side)
            });
            let f = C64::new(th.sin() * w * 0.5 * PI * h, 0.0) / r;
            let mut p = C64::new(1.0, 0.0);
            for a in acc.iter_mut() {
                *a += f * p;
                p *= s;
            }
        }
        acc
    }

    /// `∫ s^m ds / r(s)` along `s = a + d·t²`, `t ∈ [0, 1]`.
    fn graded(&self, a: C64, d: C64, side: Side) -> Vec<C64> {
        let mut acc = vec![C64::new(0.0, 0.0); self.genus()];
        for (x, w) in self.rule.nodes.iter().zip(&self.rule.weights) {
            let t = 0.5 * (x + 1.0);
            self.add_powers(a + d * (t * t), side, d * (t * w), &mut acc);
        }
        acc
    }

    /// `∫` along the segment `a → a + d`, graded at `a`, in `pieces` parts.
    fn composite(&self, a: C64, d: C64, side: Side, pieces: usize) -> Vec<C64> {
        let h = 1.0 / pieces as f64;
        let mut acc = self.graded(a, d * h, side);
        for p in 1..pieces {
            let t0 = p as f64 * h;
            for (x, w) in self.rule.nodes.iter().zip(&self.rule.weights) {
                let t = t0 + 0.5 * h * (x + 1.0);
                self.add_powers(a + d * t, side, d * (0.5 * h * w), &mut acc);
            }
        }
        acc
    }

    /// `∫_z^∞` along the outward ray `s = z/t`; needs `|z|` beyond every edge.
    fn ray_tail(&self, z: C64) -> Vec<C64> {
        let mut acc = vec![C64::new(0.0, 0.0); self.genus()];
        let side = Side::of(z);
        for (x, w) in self.rule.nodes.iter().zip(&self.rule.weights) {
            let t = 0.5 * (x + 1.0);
            self.add_powers(z / t, side, z / (t * t) * (0.5 * w), &mut acc);
        }
        acc
    }

    /// `∫_a^∞` along the real axis for `a > β_q`.
    fn real_tail(&self, a: f64) -> Vec<C64> {
        let w = self.width();
        let mut acc = vec![C64::new(0.0, 0.0); self.genus()];
        for (x, wt) in self.rule.nodes.iter().zip(&self.rule.weights) {
            let t = 0.5 * (x + 1.0);
            let s = a - w + w / t;
            self.add_powers(C64::new(s, 0.0), Side::Above, C64::new(w / (t * t) * 0.5 * wt, 0.0), &mut acc);
        }
        acc
    }

    /// `J(x) = ∫_{β_q}^x s^m ds / r_side(s)` along the real axis.
    fn j_real(&self, x: f64, side: Side) -> Vec<C64> {
        let g = self.genus();
        let e = &self.edges;
        let bq = e[e.len() - 1];
        let w = self.width();
        if x >= bq {
            if x - bq <= 4.0 * w {
                return self.seg(&self.rule, bq, x, side);
            }
            let near = self.seg(&self.rule, bq, bq + w, side);
            let t1 = self.real_tail(bq + w);
            let t2 = self.real_tail(x);
            return (0..g).map(|m| near[m] + t1[m] - t2[m]).collect();
        }
        let mut pts = vec![x];
        pts.extend(e.iter().copied().filter(|&t| t > x && t < bq));
        pts.push(bq);
        let mut acc = vec![C64::new(0.0, 0.0); g];
        for p in pts.windows(2) {
            let part = self.seg(&self.rule, p[0], p[1], side);
            for m in 0..g {
                acc[m] -= part[m];
            }
        }
        acc
    }

    fn apply_c(&self, j: &[C64]) -> Vec<C64> {
        let g = self.genus();
        (0..g)
            .map(|k| (0..g).map(|m| j[m] * self.c.get(k, m)).sum())
            .collect()
    }

    /// Raw Abel map `u(z) = ∫_{β_q}^z ω` (no reduction). Real `z` uses the `side` limit.
    pub fn abel_raw(&self, z: C64, side: Side) -> Result<Vec<C64>> {
        let g = self.genus();
        if g == 0 {
            return Ok(Vec::new());
        }
        let e = &self.edges;
        let (a1, bq) = (e[0], e[e.len() - 1]);
        let reach = e.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let w = self.width();
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::Domain(format!("z = {z} is not finite")));
        }
        if z.im == 0.0 && z.re > a1 - 4.0 * w {
            return Ok(self.apply_c(&self.j_real(z.re, side)));
        }
        if z.norm() > 2.0 * reach + w || z.im == 0.0 {
            let t = self.apply_c(&self.ray_tail(z));
            return Ok((0..g).map(|k| self.u_infinity[k] - t[k]).collect());
        }
        let s = Side::of(z);
        if z.im.abs() < 0.25 * w && z.re > a1 - 0.25 * w && z.re < bq + 0.25 * w {
            // along the real axis, then vertically
            let mut j = self.j_real(z.re, s);
            let v = self.graded(C64::new(z.re, 0.0), C64::new(0.0, z.im), s);
            for m in 0..g {
                j[m] += v[m];
            }
            return Ok(self.apply_c(&j));
        }
        Ok(self.apply_c(&self.composite(C64::new(bq, 0.0), z - bq, s, 8)))
    }

    /// Abel map reduced to real parts in `[−1/2, 1/2)`.
    pub fn abel_map(&self, z: C64, side: Side) -> Result<Vec<C64>> {
        Ok(self.abel_raw(z, side)?.into_iter().map(reduce).collect())
    }

    /// Abel map by the straight path from `β_q`; an independent route for checks.
    pub fn abel_straight(&self, z: C64) -> Vec<C64> {
        let bq = self.edges[self.edges.len() - 1];
        self.apply_c(&self.composite(C64::new(bq, 0.0), z - bq, Side::of(z), 8))
    }

    /// `γ(z) = Π ((z−α_j)/(z−β_j))^{1/4}`, `γ → 1` at infinity, cut on the bands.
    pub fn gamma_quarter(&self, z: C64, side: Side) -> Result<C64> {
        if z.im == 0.0 && self.edges.contains(&z.re) {
            return Err(Error::Domain(format!("gamma is singular at the edge {}", z.re)));
        }
        let mut v = C64::new(1.0, 0.0);
        for p in self.edges.chunks(2) {
            v *= pow_side(z - p[0], 0.25, side) / pow_side(z - p[1], 0.25, side);
        }
        Ok(v)
    }

    /// `max |∫_{A_j} ω_k − δ_{jk}|` recomputed with a finer rule. The cycle
    /// orientation follows the sign convention fixed by `orientation_flipped`.
    pub fn a_normalization_residual(&self) -> f64 {
        let g = self.genus();
        let orient = if self.orientation_flipped { -2.0 } else { 2.0 };
        let fine = Rule::legendre(2 * self.rule.len() + 7);
        let mut worst = 0.0f64;
        for j in 0..g {
            let a = self.seg(&fine, self.edges[2 * j + 1], self.edges[2 * j + 2], Side::Above);
            let per = self.apply_c(&a);
            for k in 0..g {
                let want = if j == k { 1.0 } else { 0.0 };
                worst = worst.max((per[k] * orient - want).norm());
            }
        }
        worst
    }

    /// Symmetry, imaginary-part and definiteness diagnostics for `τ`.
    pub fn tau_checks(&self) -> (f64, f64, bool) {
        let g = self.genus();
        let mut asym = 0.0f64;
        let mut re = 0.0f64;
        for i in 0..g {
            for j in 0..g {
                asym = asym.max((self.tau.get(i, j) - self.tau.get(j, i)).norm());
                re = re.max(self.tau.get(i, j).re.abs());
            }
        }
        let t = Mat::from_fn(g, |i, j| self.tau.get(i, j).im);
        (asym, re, g == 0 || cholesky(&t).is_some())
    }
}

pub(crate) fn reduce(z: C64) -> C64 {
    C64::new(z.re - (z.re + 0.5).floor(), z.im)
}

/// Builds the surface for the bands `[edges[2k], edges[2k+1]]` with an `nq`-point rule.
pub fn build_surface(edges: &[f64], nq: usize) -> Result<SurfaceData> {
    if edges.len() < 2 || edges.len() % 2 != 0 {
        return Err(Error::InvalidArgument(format!("need an even number of edges, got {}", edges.len())));
    }
    if edges.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument("edges must be strictly increasing".into()));
    }
    let q = edges.len() / 2;
    let g = q - 1;
    let mut sd = SurfaceData {
        edges: edges.to_vec(),
        rule: Rule::legendre(nq),
        c: Mat::zeros(g),
        tau: Mat::zeros(g),
        u_infinity: Vec::new(),
        u_infinity_derivative: Vec::new(),
        gap_zeros: Vec::new(),
        riemann_k: Vec::new(),
        d: Vec::new(),
        orientation_flipped: false,
    };
    if g == 0 {
        return Ok(sd);
    }
    let mut a = Mat::zeros(g);
    let mut b = Mat::<C64>::zeros(g);
    let bands: Vec<Vec<C64>> = (0..q)
        .map(|k| sd.seg(&sd.rule, edges[2 * k], edges[2 * k + 1], Side::Above))
        .collect();
    for j in 0..g {
        let gap = sd.seg(&sd.rule, edges[2 * j + 1], edges[2 * j + 2], Side::Above);
        for m in 0..g {
            a.set(j, m, 2.0 * gap[m].re);
            let s: C64 = (0..=j).map(|k| bands[k][m] * 2.0).sum();
            b.set(j, m, s);
        }
    }
    let c = inverse(&a.transpose()).map_err(|_| Error::DegenerateSurface("A-period matrix is singular".into()))?;
    let mut tau = Mat::from_fn(g, |i, j| (0..g).map(|m| b.get(i, m) * c.get(j, m)).sum::<C64>());
    let mut c = c;
    let t = Mat::from_fn(g, |i, j| tau.get(i, j).im);
    if cholesky(&t).is_none() {
        let neg = Mat::from_fn(g, |i, j| -t.get(i, j));
        if cholesky(&neg).is_none() {
            return Err(Error::DegenerateSurface("−iτ is indefinite".into()));
        }
        c = Mat::from_fn(g, |i, j| -c.get(i, j));
        tau = Mat::from_fn(g, |i, j| -tau.get(i, j));
        sd.orientation_flipped = true;
    }
    sd.c = c;
    sd.tau = tau;
    let bq = edges[2 * q - 1];
    let w = sd.width();
    let near = sd.seg(&sd.rule, bq, bq + w, Side::Above);
    let tail = sd.real_tail(bq + w);
    let jinf: Vec<C64> = (0..g).map(|m| near[m] + tail[m]).collect();
    sd.u_infinity = sd.apply_c(&jinf);
    sd.u_infinity_derivative = (0..g).map(|k| sd.c.get(k, g - 1)).collect();

    let mut zeros = Vec::with_capacity(g);
    for j in 0..g {
        let (lo, hi) = (edges[2 * j + 1], edges[2 * j + 2]);
        let h = |x: f64| -> f64 {
            edges.chunks(2).map(|p| (x - p[0]) / (x - p[1])).product::<f64>() - 1.0
        };
        let eps = 1e-14 * (hi - lo).max(1.0);
        let (mut a0, mut b0) = (lo + eps, hi - eps);
        let (fa, fb) = (h(a0), h(b0));
        if !(fa.signum() != fb.signum()) {
            return Err(Error::DegenerateSurface(format!("no sign change for the gap zero in ({lo}, {hi})")));
        }
        for _ in 0..200 {
            let m = 0.5 * (a0 + b0);
            if m <= a0 || m >= b0 {
                break;
            }
            if h(m).signum() == fa.signum() {
                a0 = m;
            } else {
                b0 = m;
            }
        }
        zeros.push(0.5 * (a0 + b0));
    }
    let mut kc = vec![C64::new(0.0, 0.0); g];
    for j in 0..g {
        let u = sd.abel_raw(C64::new(edges[2 * j + 1], 0.0), Side::Above)?;
        for k in 0..g {
            kc[k] -= u[k];
        }
    }
    let mut d: Vec<C64> = kc.iter().map(|k| -*k).collect();
    for &x in &zeros {
        let u = sd.abel_raw(C64::new(x, 0.0), Side::Above)?;
        for k in 0..g {
            d[k] += u[k];
        }
    }
    sd.gap_zeros = zeros;
    sd.riemann_k = kc;
    sd.d = d;
    Ok(sd)
}

/// `𝓜₁, 𝓜₂` built from `γ`, the Abel map and four theta ratios.
pub fn model_functions_m(
    surface: &SurfaceData,
    theta: &ThetaEvaluator,
    omega_n: &[f64],
    z: C64,
    side: Side,
) -> Result<(C64, C64)> {
    let g = surface.genus();
    let gm = surface.gamma_quarter(z, side)?;
    let (p, m) = ((gm + 1.0 / gm) * 0.5, (gm - 1.0 / gm) * 0.5);
    if g == 0 {
        return Ok((p, m));
    }
    if omega_n.len() != g {
        return Err(Error::InvalidArgument(format!("Ω_N has length {}, genus is {g}", omega_n.len())));
    }
    let w = surface.width();
    // M₂ has a removable 0/0 at the gap zeros: average across
    if let Some(&xj) = surface.gap_zeros.iter().find(|&&x| (z - x).norm() < 1e-7 * w) {
        let h = 1e-5 * w;
        let a = model_functions_m(surface, theta, omega_n, C64::new(xj - h, z.im), side)?;
        let b = model_functions_m(surface, theta, omega_n, C64::new(xj + h, z.im), side)?;
        return Ok(((a.0 + b.0) * 0.5, (a.1 + b.1) * 0.5));
    }
    let s: Vec<f64> = omega_n.iter().map(|o| o / (2.0 * PI)).collect();
    let u = surface.abel_raw(z, side)?;
    let d = &surface.d;
    let ui = &surface.u_infinity;
    let comb = |base: &[C64], sgn_s: f64, sgn_d: f64| -> Vec<C64> {
        (0..g).map(|k| base[k] + s[k] * sgn_s + d[k] * sgn_d).collect()
    };
    let t_inf_d = theta.theta(&comb(ui, 0.0, 1.0))?;
    let t_inf_sd = theta.theta(&comb(ui, 1.0, 1.0))?;
    let t_usd = theta.theta(&comb(&u, 1.0, 1.0))?;
    let t_ud = theta.theta(&comb(&u, 0.0, 1.0))?;
    let t_umsd = theta.theta(&comb(&u, -1.0, -1.0))?;
    let t_umd = theta.theta(&comb(&u, 0.0, -1.0))?;
    for (name, v) in [("θ(u(∞)+s+d)", t_inf_sd), ("θ(u+d)", t_ud), ("θ(u−d)", t_umd)] {
        if v.norm() < 1e-12 {
            return Err(Error::ThetaDegenerate(format!("{name} = {v} at z = {z}")));
        }
    }
    let pre = t_inf_d / t_inf_sd;
    Ok((pre * p * t_usd / t_ud, pre * m * t_umsd / t_umd))
}

#[cfg(test)]
mod tests {
    use super::*;

    const GENUS2: [f64; 6] = [-2.0, -1.2, -0.5, 0.3, 0.9, 1.7];

    #[test]
    fn abel_map_finite_next_to_edges() {
        let s = build_surface(&GENUS2, 64).unwrap();
        for &e in &GENUS2 {
            for h in [1e-7, 4.5e-8, 1e-12] {
                for x in [e - h, e + h] {
                    let u = s.abel_raw(C64::new(x, 0.0), Side::Above).unwrap();
                    assert!(u.iter().all(|v| v.re.is_finite() && v.im.is_finite()), "{x}: {u:?}");
                }
            }
        }
    }

    #[test]
    fn genus_zero_is_trivial() {
        let s = build_surface(&[-1.0, 1.0], 64).unwrap();
        assert_eq!(s.genus(), 0);
        assert!(s.abel_map(C64::new(3.0, 1.0), Side::Above).unwrap().is_empty());
        let gm = s.gamma_quarter(C64::new(2.0, 0.0), Side::Above).unwrap();
        assert!((gm.re - 3f64.powf(0.25)).abs() < 1e-14 && gm.im == 0.0);
        let th = ThetaEvaluator::new(&s.tau, 1e-16, 40).unwrap();
        let (m1, m2) = model_functions_m(&s, &th, &[], C64::new(2.0, 0.0), Side::Above).unwrap();
        assert!((m1 - (gm + 1.0 / gm) * 0.5).norm() < 1e-15);
        assert!((m2 - (gm - 1.0 / gm) * 0.5).norm() < 1e-15);
    }

    #[test]
    fn symmetric_two_band() {
        let s = build_surface(&[-0.7, -0.3, 0.3, 0.7], 96).unwrap();
        let (asym, re, pd) = s.tau_checks();
        assert!(asym < 1e-12 && re < 1e-12 && pd);
        assert!(s.gap_zeros[0].abs() < 1e-13);
        assert!(s.a_normalization_residual() < 1e-10);
    }

    #[test]
    fn period_matrix_genus_two() {
        let s = build_surface(&GENUS2, 128).unwrap();
        let (asym, re, pd) = s.tau_checks();
        assert!(asym < 1e-10, "{asym}");
        assert!(re < 1e-10 && pd);
        assert!(s.a_normalization_residual() < 1e-9);
        for (j, x) in s.gap_zeros.iter().enumerate() {
            assert!(*x > GENUS2[2 * j + 1] && *x < GENUS2[2 * j + 2]);
        }
    }

    #[test]
    fn abel_map_paths_agree() {
        let s = build_surface(&GENUS2, 128).unwrap();
        assert!(s.abel_raw(C64::new(1.7, 0.0), Side::Above).unwrap().iter().all(|u| u.norm() == 0.0));
        for z in [C64::new(0.2, 0.1), C64::new(-1.5, -0.3), C64::new(4.0, 2.0), C64::new(-0.8, 0.05)] {
            let a = s.abel_map(z, Side::Above).unwrap();
            let b: Vec<C64> = s.abel_straight(z).into_iter().map(reduce).collect();
            for k in 0..2 {
                let dk = reduce(a[k] - b[k]);
                assert!(dk.norm() < 1e-8, "{z}: {} vs {}", a[k], b[k]);
            }
        }
        // far field: u(z) → u(∞) like u'(∞)/z
        let z = C64::new(1e6, 3e5);
        let u = s.abel_raw(z, Side::Above).unwrap();
        for k in 0..2 {
            let pred = s.u_infinity[k] - s.u_infinity_derivative[k] / z;
            assert!((u[k] - pred).norm() < 1e-11);
        }
        // the same limit reached along the real axis
        let u = s.abel_raw(C64::new(1e4, 0.0), Side::Above).unwrap();
        for k in 0..2 {
            assert!((u[k] - s.u_infinity[k]).norm() < 1e-3);
        }
    }

    #[test]
    fn gap_zeros_are_theta_zeros() {
        let s = build_surface(&GENUS2, 128).unwrap();
        let th = ThetaEvaluator::new(&s.tau, 1e-16, 40).unwrap();
        for &x in &s.gap_zeros {
            let u = s.abel_raw(C64::new(x, 0.0), Side::Above).unwrap();
            let arg: Vec<C64> = (0..2).map(|k| u[k] - s.d[k]).collect();
            assert!(th.theta(&arg).unwrap().norm() < 1e-8);
            let gm = s.gamma_quarter(C64::new(x, 0.0), Side::Above).unwrap();
            assert!((gm - 1.0 / gm).norm() < 1e-8);
        }
        for z in [C64::new(0.0, 0.5), C64::new(3.0, 0.0), C64::new(-1.0, -1.0)] {
            let u = s.abel_raw(z, Side::Above).unwrap();
            let arg: Vec<C64> = (0..2).map(|k| u[k] + s.d[k]).collect();
            assert!(th.theta(&arg).unwrap().norm() > 1e-3);
        }
    }

    #[test]
    fn model_functions_limits() {
        let s = build_surface(&GENUS2, 128).unwrap();
        let th = ThetaEvaluator::new(&s.tau, 1e-16, 40).unwrap();
        let om = [1.3, -2.1];
        let (m1, _) = model_functions_m(&s, &th, &om, C64::new(1e6, 1.0), Side::Above).unwrap();
        assert!((m1 - 1.0).norm() < 1e-5);
        let z = C64::new(0.1, 0.4);
        let a = model_functions_m(&s, &th, &om, z, Side::Above).unwrap();
        let shifted = [om[0] + 2.0 * PI * 3.0, om[1] - 2.0 * PI];
        let b = model_functions_m(&s, &th, &shifted, z, Side::Above).unwrap();
        assert!((a.0 - b.0).norm() < 1e-10 && (a.1 - b.1).norm() < 1e-10);
        // finite at a gap zero
        let x = s.gap_zeros[1];
        let c = model_functions_m(&s, &th, &om, C64::new(x, 0.0), Side::Above).unwrap();
        assert!(c.1.norm().is_finite());
    }
}
