//! The g-function `g(z) = ∫ log(z−s) dν(s)` and the scalar quantities built from it.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::equilibrium::BandStructure;
use crate::num::pow_side;
#[allow(unused_imports)]
use crate::prelude::*;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsiVariant {
    /// Built from `∫ρ`.
    BandVoid,
    /// Built from `∫(1−ρ)`.
    BandSaturated,
}

#[derive(Debug, Clone)]
pub struct GFunctionData {
    bands: BandStructure,
    omega: Vec<f64>,
    constants: Vec<f64>,
}

impl GFunctionData {
    pub fn new(bands: BandStructure) -> Self {
        let q = bands.q();
        let e = bands.edges().to_vec();
        let bq = e[2 * q - 1];
        let omega = (0..q - 1)
            .map(|j| {
                let a = e[2 * j + 2];
                let m = 2.0 * PI * bands.mass(a, bq);
                if bands.saturated()[j] {
                    m + 2.0 * PI * a
                } else {
                    m
                }
            })
            .collect();
        let constants = (0..2 * q).map(|i| bands.edge_constant(i)).collect();
        GFunctionData {
            bands,
            omega,
            constants,
        }
    }

    pub fn bands(&self) -> &BandStructure {
        &self.bands
    }

    pub fn lagrange_l(&self) -> f64 {
        self.bands.lagrange_l()
    }

    pub fn edges(&self) -> &[f64] {
        self.bands.edges()
    }

    /// `Ω_j`, `j = 1..q−1` (index `j−1`).
    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    /// `Ω_{j,N}` for `j = 0..q`.
    pub fn omega_jn(&self, j: usize, n: usize) -> f64 {
        let q = self.bands.q();
        let nf = n as f64;
        if j == 0 {
            2.0 * PI * nf
        } else if j == q {
            0.0
        } else if self.bands.saturated()[j - 1] {
            PI + nf * self.omega[j - 1]
        } else {
            nf * self.omega[j - 1]
        }
    }

    /// `Ω_N = (Ω_{1,N}, …, Ω_{q−1,N})`.
    pub fn omega_n(&self, n: usize) -> Vec<f64> {
        (1..self.bands.q()).map(|j| self.omega_jn(j, n)).collect()
    }

    pub fn phase_phi(&self, x: f64) -> f64 {
        let e = self.edges();
        let bq = e[e.len() - 1];
        if x >= bq {
            return 0.0;
        }
        if x <= e[0] {
            return 1.0;
        }
        // integrate over the shorter side
        if bq - x <= x - e[0] {
            self.bands.mass(x, bq)
        } else {
            1.0 - self.bands.mass(e[0], x)
        }
    }

    pub fn log_potential_l(&self, x: f64) -> f64 {
        self.bands.log_potential(x)
    }

    /// `g_±(x) = L(x) ± iπφ(x)`.
    pub fn g_boundary(&self, x: f64, side: Side) -> C64 {
        C64::new(self.log_potential_l(x), side.sign() * PI * self.phase_phi(x))
    }

    /// `G(x) = g_+(x) − g_−(x)`.
    pub fn g_jump(&self, x: f64) -> C64 {
        C64::new(0.0, 2.0 * PI * self.phase_phi(x))
    }

    pub fn g_eval(&self, z: C64) -> Result<C64> {
        let e = self.edges();
        let (a1, bq) = (e[0], e[e.len() - 1]);
        if z.im == 0.0 && z.re <= bq {
            return Err(Error::Domain(format!("z = {z} lies on the cut (-inf, beta_q]")));
        }
        let w = self.bands.width();
        let dist = (z - z.re.clamp(a1, bq)).norm();
        if dist >= 0.25 * w {
            return Ok(self.bands.log_integral(z, Side::of(z)));
        }
        let side = Side::of(z);
        let x0 = z.re;
        if z.im == 0.0 {
            return Ok(C64::new(self.log_potential_l(x0), 0.0));
        }
        let base = self.g_boundary(x0, side);
        let y = z.im;
        let rule = self.bands.path_rule();
        let int = rule.unit(|u| {
            let zeta = C64::new(x0, y * u * u);
            self.bands.resolvent(zeta, side) * C64::new(0.0, 2.0 * y * u)
        });
        Ok(base + int)
    }

    /// `g'(z) = F(z)`.
    pub fn g_prime(&self, z: C64) -> C64 {
        self.bands.resolvent(z, Side::of(z))
    }

    fn check_edge(&self, i: usize, variant: PsiVariant) -> Result<f64> {
        let e = self.edges();
        if i >= e.len() {
            return Err(Error::InvalidArgument(format!("edge index {i} out of range")));
        }
        let sat = self.bands.edge_is_saturated(i);
        match (variant, sat) {
            (PsiVariant::BandVoid, false) | (PsiVariant::BandSaturated, true) => Ok(e[i]),
            _ => Err(Error::InvalidArgument(format!(
                "edge {i} does not match the {variant:?} map"
            ))),
        }
    }

    /// Radius of the disk around edge `i` where the local map is used.
    pub fn edge_radius(&self, i: usize) -> f64 {
        let e = self.edges();
        let mut d = f64::INFINITY;
        for (k, &x) in e.iter().enumerate() {
            if k != i {
                d = d.min((x - e[i]).abs());
            }
        }
        if e.len() == 2 {
            d = e[1] - e[0];
        }
        0.5 * d
    }

    /// `(2/3) ψ^{3/2}` at `z`, integrated from the edge.
    pub fn psi_w(&self, i: usize, variant: PsiVariant, z: C64, side: Side) -> Result<C64> {
        let e = self.check_edge(i, variant)?;
        let sigma = if z.im == 0.0 { side.sign() } else { z.im.signum() };
        let s = if z.im == 0.0 { side } else { Side::of(z) };
        let f = |zeta: C64| -> C64 {
            let rq = if zeta.im == 0.0 {
                let v = self.bands.rq(C64::new(zeta.re, 0.0), Side::Above);
                if s == Side::Below { v.conj() } else { v }
            } else {
                self.bands.rq(zeta, s)
            };
            match variant {
                PsiVariant::BandVoid => rq,
                PsiVariant::BandSaturated => C64::new(0.0, PI * sigma) - rq,
            }
        };
        let d = z - e;
        if d.norm() == 0.0 {
            return Ok(C64::new(0.0, 0.0));
        }
        Ok(self.bands.path_rule().unit(|u| {
            let zeta = C64::new(e, 0.0) + d * (u * u);
            f(zeta) * d * (2.0 * u)
        }))
    }

    /// Edge map `ψ` at edge `i`; real on the real axis, `ψ(edge) = 0`,
    /// positive on the void/saturated side.
    pub fn psi_edge(&self, i: usize, variant: PsiVariant, z: C64) -> Result<C64> {
        self.psi_edge_side(i, variant, z, Side::Above)
    }

    pub fn psi_edge_side(&self, i: usize, variant: PsiVariant, z: C64, side: Side) -> Result<C64> {
        let e = self.check_edge(i, variant)?;
        if (z - e).norm() >= self.edge_radius(i) {
            return Err(Error::Domain(format!("z = {z} outside the disk around edge {e}")));
        }
        let w = self.psi_w(i, variant, z, side)? * 1.5;
        let right = i % 2 == 1;
        if z.im == 0.0 {
            let m = w.norm().powf(2.0 / 3.0);
            let band_side = if right { z.re < e } else { z.re > e };
            return Ok(C64::new(if band_side { -m } else { m }, 0.0));
        }
        let slope = self.psi_slope(i);
        let guess = (z - e) * slope;
        let base = w.powf(2.0 / 3.0);
        let rot = C64::from_polar(1.0, 2.0 * PI / 3.0);
        let cands = [base, base * rot, base * rot * rot];
        Ok(*cands
            .iter()
            .min_by(|a, b| (**a - guess).norm().total_cmp(&(**b - guess).norm()))
            .expect("three candidates"))
    }

    /// `ψ'(edge) = ±(πC)^{2/3}`, positive at right endpoints.
    pub fn psi_slope(&self, i: usize) -> f64 {
        let s = (PI * self.constants[i]).powf(2.0 / 3.0);
        if i % 2 == 1 {
            s
        } else {
            -s
        }
    }

    /// `ψ^p` with the boundary value from `side` on the band side of the real axis.
    pub fn psi_pow(&self, i: usize, variant: PsiVariant, z: C64, side: Side, p: f64) -> Result<C64> {
        let psi = self.psi_edge_side(i, variant, z, side)?;
        if z.im != 0.0 {
            return Ok(psi.powf(p));
        }
        // ψ increases through right edges: the upper limit of a negative ψ has arg +π there
        let s = if i % 2 == 1 { side } else { side.flip() };
        Ok(pow_side(psi, p, s))
    }

    pub fn edge_constant(&self, i: usize) -> f64 {
        self.constants[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Potential;

    fn gauss() -> GFunctionData {
        let v = Potential::preset("gaussian").unwrap();
        GFunctionData::new(BandStructure::solve(&v, &[-1.4, 1.4], &[], 128).unwrap())
    }

    fn sat() -> GFunctionData {
        let v = Potential::preset("saturated").unwrap();
        GFunctionData::new(
            BandStructure::solve(&v, &[-0.51, -0.49, 0.49, 0.51], &[true], 256).unwrap(),
        )
    }

    #[test]
    fn semicircle_resolvent() {
        let g = gauss();
        let z = C64::new(2.0, 0.0);
        let h = 1e-4;
        let d = (g.g_eval(z + h).unwrap() - g.g_eval(z - h).unwrap()) / (2.0 * h);
        assert!((d.re - (2.0 - 2f64.sqrt())).abs() < 1e-7, "{d}");
        assert!(g.g_eval(z).unwrap().im.abs() < 1e-15);
        assert!(g.g_eval(C64::new(-1.0, 0.0)).is_err());
    }

    #[test]
    fn near_and_far_g_agree() {
        let g = sat();
        for z in [C64::new(0.3, 0.2), C64::new(-0.4, -0.15), C64::new(0.6, 0.05)] {
            let near = g.g_eval(z).unwrap();
            let far = g.bands().log_integral(z, Side::of(z));
            assert!((near - far).norm() < 1e-9, "{z}: {near} vs {far}");
        }
    }

    #[test]
    fn phases_and_periods() {
        let g = gauss();
        assert!((g.phase_phi(0.0) - 0.5).abs() < 1e-14);
        assert_eq!(g.phase_phi(2.0), 0.0);
        assert_eq!(g.phase_phi(-2.0), 1.0);
        let s = sat();
        assert!((s.omega()[0] - PI).abs() < 1e-12);
        // saturated gap: G(x) = iΩ − 2πix
        let x = 0.2;
        assert!((s.g_jump(x).im - (s.omega()[0] - 2.0 * PI * x)).abs() < 1e-12);
        assert_eq!(s.omega_jn(0, 7), 14.0 * PI);
        assert_eq!(s.omega_jn(2, 7), 0.0);
    }

    #[test]
    fn variational_identity_on_bands() {
        let s = sat();
        let x = 0.5;
        let v = s.bands().potential().eval(x);
        let sum = s.g_boundary(x, Side::Above) + s.g_boundary(x, Side::Below);
        assert!((sum.re - v - s.lagrange_l()).abs() < 1e-12);
        assert!(sum.im.abs() < 1e-15);
    }

    #[test]
    fn psi_edge_properties() {
        let g = gauss();
        let b = g.edges()[1];
        assert!((b - 2f64.sqrt()).abs() < 1e-13);
        assert_eq!(g.psi_edge(1, PsiVariant::BandVoid, C64::new(b, 0.0)).unwrap(), C64::new(0.0, 0.0));
        let h = 1e-5;
        let p1 = g.psi_edge(1, PsiVariant::BandVoid, C64::new(b + h, 0.0)).unwrap().re;
        let p0 = g.psi_edge(1, PsiVariant::BandVoid, C64::new(b - h, 0.0)).unwrap().re;
        assert!(p1 > 0.0 && p0 < 0.0);
        let slope = (p1 - p0) / (2.0 * h);
        assert!((slope - g.psi_slope(1)).abs() < 1e-4 * slope, "{slope} {}", g.psi_slope(1));
        // band side: (2/3)ψ^{3/2}_+ = −πi ∫_x^β ρ
        let x = 1.3;
        let w = g.psi_w(1, PsiVariant::BandVoid, C64::new(x, 0.0), Side::Above).unwrap();
        assert!((w.im + PI * g.bands().mass(x, b)).abs() < 1e-12);
        assert!(g.psi_edge(1, PsiVariant::BandSaturated, C64::new(b, 0.0)).is_err());
        assert!(g.psi_edge(1, PsiVariant::BandVoid, C64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn psi_is_analytic_near_edge() {
        let g = gauss();
        let b = g.edges()[1];
        let r = 0.05;
        let pts: Vec<C64> = (0..16)
            .map(|k| C64::new(b, 0.0) + C64::from_polar(r, 2.0 * PI * (k as f64 + 0.5) / 16.0))
            .collect();
        let vals: Vec<C64> = pts.iter().map(|&z| g.psi_edge(1, PsiVariant::BandVoid, z).unwrap()).collect();
        // Taylor coefficients by the trapezoid rule on the circle; ψ(b)=0 means a_0 ≈ 0
        let coef = |k: i32| -> C64 {
            pts.iter().zip(&vals).map(|(z, v)| *v * (*z - b).powi(-k)).sum::<C64>() / 16.0
        };
        assert!(coef(0).norm() < 1e-8);
        assert!((coef(1).re - g.psi_slope(1)).abs() < 1e-5);
        let z = C64::new(b + 0.01, 0.02);
        let taylor: C64 = (1..5).map(|k| coef(k) * (z - b).powi(k)).sum();
        let direct = g.psi_edge(1, PsiVariant::BandVoid, z).unwrap();
        assert!((taylor - direct).norm() < 1e-6 * direct.norm());
    }

    #[test]
    fn saturated_psi_signs() {
        let s = sat();
        let e = s.edges().to_vec();
        // alpha_2 = e[2]: saturated side to the left
        let left = s.psi_edge(2, PsiVariant::BandSaturated, C64::new(e[2] - 0.01, 0.0)).unwrap().re;
        let right = s.psi_edge(2, PsiVariant::BandSaturated, C64::new(e[2] + 0.01, 0.0)).unwrap().re;
        assert!(left > 0.0 && right < 0.0);
        assert!(s.psi_slope(2) < 0.0 && s.psi_slope(1) > 0.0);
        let w = s.psi_w(2, PsiVariant::BandSaturated, C64::new(e[2] - 0.01, 0.0), Side::Above).unwrap();
        assert!(w.im.abs() < 1e-10 * w.norm() && w.re > 0.0, "{w}");
    }
}
