//! Large-`N` formulas for the recurrence data and for `P_N` in voids, bands,
//! saturated regions and at the edges.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::airy::airy;
use crate::equilibrium::BandStructure;
use crate::gfunction::{GFunctionData, PsiVariant};
#[allow(unused_imports)]
use crate::prelude::*;
use crate::theta::{build_surface, model_functions_m, SurfaceData, ThetaEvaluator};
use crate::{Error, Result};

/// Reading of the undefined shift `b` in the `β_{N−1}` formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ShiftReading {
    /// `b = Ω_N/2π + d`.
    #[default]
    OmegaPlusD,
    /// `b = Ω_N/2π − d`.
    OmegaMinusD,
    /// `b = −Ω_N/2π + d`.
    MinusOmegaPlusD,
    /// `b = d`.
    D,
}

#[derive(Debug, Clone)]
pub struct AsymptoticOptions {
    pub n_min: usize,
    /// Minimum distance from an edge for the bulk formulas.
    pub margin: f64,
    pub shift_reading: ShiftReading,
    pub theta_eps: f64,
    pub theta_max_radius: usize,
    pub surface_nodes: usize,
}

impl Default for AsymptoticOptions {
    fn default() -> Self {
        AsymptoticOptions {
            n_min: 4,
            margin: 1e-3,
            shift_reading: ShiftReading::OmegaPlusD,
            theta_eps: 1e-16,
            theta_max_radius: 40,
            surface_nodes: 128,
        }
    }
}

/// `N`-independent data: g-function, surface and theta function.
#[derive(Debug, Clone)]
pub struct AsymptoticModel {
    pub gfun: GFunctionData,
    pub surface: SurfaceData,
    pub theta: ThetaEvaluator,
    pub options: AsymptoticOptions,
}

impl AsymptoticModel {
    pub fn new(bands: BandStructure, options: AsymptoticOptions) -> Result<Self> {
        let surface = build_surface(bands.edges(), options.surface_nodes)?;
        let theta = ThetaEvaluator::new(&surface.tau, options.theta_eps, options.theta_max_radius)?;
        Ok(AsymptoticModel {
            gfun: GFunctionData::new(bands),
            surface,
            theta,
            options,
        })
    }

    pub fn bands(&self) -> &BandStructure {
        self.gfun.bands()
    }

    pub fn at(&self, n: usize) -> Result<AsymptoticContext<'_>> {
        if n < self.options.n_min {
            return Err(Error::InvalidArgument(format!(
                "N = {n} is below the configured floor {}",
                self.options.n_min
            )));
        }
        let omega_n = self.gfun.omega_n(n);
        let shift = omega_n.iter().map(|o| o / (2.0 * PI)).collect();
        Ok(AsymptoticContext {
            model: self,
            n,
            omega_n,
            shift,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecurrenceAsymptotics {
    pub h_n: f64,
    pub h_n_minus_1: f64,
    pub gamma2_n: f64,
    pub beta_n_minus_1: f64,
}

/// Pieces of the saturated-region formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaturatedAsymptotics {
    pub value: f64,
    /// `N·L(x)`, the log of the envelope `e^{NL(x)}`.
    pub log_envelope: f64,
    /// `2 sin(Nπx)`; vanishes at the nodes, where only the `O(e^{−Nε})` channel remains.
    pub oscillation: f64,
    /// `Im(e^{iNΩ_j/2} 𝓜₁₊(x))`.
    pub amplitude: f64,
}

/// Edge formula value with the Airy-modulus envelope used to normalize errors
/// where `P_N` oscillates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeValue {
    pub value: C64,
    pub envelope: f64,
}

/// Band formula value with its local amplitude `2e^{N(V+l)/2}|𝓜₁₊|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandValue {
    pub value: f64,
    pub amplitude: f64,
}

#[derive(Debug, Clone)]
pub struct AsymptoticContext<'a> {
    pub model: &'a AsymptoticModel,
    pub n: usize,
    /// `Ω_N = (Ω_{1,N}, …, Ω_{g,N})`.
    pub omega_n: Vec<f64>,
    /// `Ω_N / 2π`.
    pub shift: Vec<f64>,
}

impl AsymptoticContext<'_> {
    fn nf(&self) -> f64 {
        self.n as f64
    }

    fn edges(&self) -> &[f64] {
        self.model.gfun.edges()
    }

    fn l(&self) -> f64 {
        self.model.gfun.lagrange_l()
    }

    fn th(&self, a: &[C64], sa: f64, da: f64) -> Result<C64> {
        let v = self.vec(a, sa, da);
        let t = self.model.theta.theta(&v)?;
        if t.norm() < 1e-12 {
            return Err(Error::ThetaDegenerate(format!("theta vanishes at {v:?}")));
        }
        Ok(t)
    }

    fn vec(&self, a: &[C64], sa: f64, da: f64) -> Vec<C64> {
        let d = &self.model.surface.d;
        (0..a.len())
            .map(|k| a[k] + self.shift[k] * sa + d[k] * da)
            .collect()
    }

    /// `𝓜₁, 𝓜₂` at `z` (boundary value from `side` on the real axis).
    pub fn model_functions(&self, z: C64, side: Side) -> Result<(C64, C64)> {
        model_functions_m(&self.model.surface, &self.model.theta, &self.omega_n, z, side)
    }

    pub fn recurrence(&self) -> Result<RecurrenceAsymptotics> {
        let e = self.edges();
        let sum_len: f64 = e.chunks(2).map(|p| p[1] - p[0]).sum();
        let sum_sq: f64 = e.chunks(2).map(|p| p[1] * p[1] - p[0] * p[0]).sum();
        let nf = self.nf();
        let enl = (nf * self.l()).exp();
        let ui = &self.model.surface.u_infinity;
        let g = self.model.surface.genus();
        let mut out = RecurrenceAsymptotics {
            h_n: 0.5 * nf * PI * enl * sum_len,
            h_n_minus_1: 8.0 * nf * PI * enl / sum_len,
            gamma2_n: (sum_len / 4.0).powi(2),
            beta_n_minus_1: sum_sq / (2.0 * sum_len),
        };
        if g == 0 {
            return Ok(out);
        }
        let t = |sa: f64, da: f64| self.th(ui, sa, da);
        let (p_d, m_d) = (t(0.0, 1.0)?, t(0.0, -1.0)?);
        let (pp, mm) = (t(1.0, 1.0)?, t(-1.0, -1.0)?);
        let (pm, mp) = (t(1.0, -1.0)?, t(-1.0, 1.0)?);
        out.h_n *= (p_d * mm / (m_d * pp)).re;
        out.h_n_minus_1 *= (m_d * mp / (p_d * pm)).re;
        out.gamma2_n *= (p_d * p_d * mm * pm / (m_d * m_d * pp * mp)).re;
        let (sb, db) = match self.model.options.shift_reading {
            ShiftReading::OmegaPlusD => (1.0, 1.0),
            ShiftReading::OmegaMinusD => (1.0, -1.0),
            ShiftReading::MinusOmegaPlusD => (-1.0, 1.0),
            ShiftReading::D => (0.0, 1.0),
        };
        let log_grad = |sa: f64, da: f64| -> Result<Vec<C64>> {
            let (v, gr) = self.model.theta.theta_grad(&self.vec(ui, sa, da))?;
            if v.norm() < 1e-12 {
                return Err(Error::ThetaDegenerate(format!("theta vanishes in the β_(N−1) formula (shift {sa}, {da})")));
            }
            Ok(gr.into_iter().map(|x| x / v).collect())
        };
        let a = log_grad(1.0, -1.0)?;
        let b = log_grad(1.0, 1.0)?;
        let c = log_grad(sb, db)?;
        let dd = log_grad(0.0, -1.0)?;
        let up = &self.model.surface.u_infinity_derivative;
        let corr: C64 = (0..g).map(|k| (a[k] - b[k] + c[k] - dd[k]) * up[k]).sum();
        out.beta_n_minus_1 += corr.re;
        Ok(out)
    }

    fn dist_to_support(&self, z: C64) -> f64 {
        let e = self.edges();
        let mut d = f64::INFINITY;
        for p in e.chunks(2) {
            d = d.min((z - z.re.clamp(p[0], p[1])).norm());
        }
        d
    }

    /// `e^{Ng(z)} 𝓜₁(z)` away from the support; real `z` in a gap uses the upper limit.
    pub fn void(&self, z: C64) -> Result<C64> {
        let dist = self.dist_to_support(z);
        if dist < self.model.options.margin {
            return Err(Error::Domain(format!("z = {z} is within the margin of the support; use the edge formulas")));
        }
        let gf = &self.model.gfun;
        let bq = self.edges()[self.edges().len() - 1];
        let g = if z.im == 0.0 && z.re <= bq {
            gf.g_boundary(z.re, Side::Above)
        } else {
            gf.g_eval(z)?
        };
        let (m1, _) = self.model_functions(z, Side::Above)?;
        Ok((g * self.nf()).exp() * m1)
    }

    fn interior_check(&self, x: f64, want_band: bool) -> Result<()> {
        let b = self.model.bands();
        let ok = if want_band { b.band_of(x).is_some() } else { b.in_saturated(x) };
        let near = self.edges().iter().any(|&e| (x - e).abs() < self.model.options.margin);
        if !ok || near {
            let what = if want_band { "band" } else { "saturated region" };
            return Err(Error::Domain(format!("x = {x} is not inside a {what} with margin")));
        }
        Ok(())
    }

    pub fn band_detail(&self, x: f64) -> Result<BandValue> {
        self.interior_check(x, true)?;
        let nf = self.nf();
        let v = self.model.bands().potential().eval(x);
        let phi = self.model.gfun.phase_phi(x);
        let (m1, _) = self.model_functions(C64::new(x, 0.0), Side::Above)?;
        let ph = C64::from_polar(1.0, nf * PI * phi);
        let amp = 2.0 * (0.5 * nf * (v + self.l())).exp();
        Ok(BandValue {
            value: amp * (ph * m1).re,
            amplitude: amp * m1.norm(),
        })
    }

    pub fn band(&self, x: f64) -> Result<f64> {
        Ok(self.band_detail(x)?.value)
    }

    pub fn saturated_detail(&self, x: f64) -> Result<SaturatedAsymptotics> {
        self.interior_check(x, false)?;
        let j = self.model.bands().gap_of(x).expect("saturated points lie in a gap");
        let nf = self.nf();
        let (m1, _) = self.model_functions(C64::new(x, 0.0), Side::Above)?;
        let amp = (C64::from_polar(1.0, 0.5 * nf * self.model.gfun.omega()[j]) * m1).im;
        let osc = 2.0 * (nf * PI * x).sin();
        let log_env = nf * self.model.gfun.log_potential_l(x);
        Ok(SaturatedAsymptotics {
            value: log_env.exp() * osc * amp,
            log_envelope: log_env,
            oscillation: osc,
            amplitude: amp,
        })
    }

    pub fn saturated(&self, x: f64) -> Result<f64> {
        Ok(self.saturated_detail(x)?.value)
    }

    /// Shared Airy-edge assembly; `z` exactly at the edge is resolved by averaging across it.
    fn edge_formula(&self, i: usize, variant: PsiVariant, z: C64, side: Side) -> Result<EdgeValue> {
        let e = self.edges()[i];
        let w = self.model.bands().width();
        if (z - e).norm() < 1e-9 * w {
            let h = 1e-6 * w;
            let a = self.edge_formula(i, variant, C64::new(e - h, z.im), side)?;
            let b = self.edge_formula(i, variant, C64::new(e + h, z.im), side)?;
            return Ok(EdgeValue {
                value: (a.value + b.value) * 0.5,
                envelope: 0.5 * (a.envelope + b.envelope),
            });
        }
        let gf = &self.model.gfun;
        let s = if z.im == 0.0 { side } else { Side::of(z) };
        let nf = self.nf();
        let psi = gf.psi_edge_side(i, variant, z, s)?;
        let p4 = gf.psi_pow(i, variant, z, s, 0.25)?;
        let zeta = psi * nf.powf(2.0 / 3.0);
        let a = airy(zeta);
        let (m1, m2) = self.model_functions(z, s)?;
        let om = gf.omega_jn(i.div_ceil(2), self.n);
        let t = C64::from_polar(1.0, 0.5 * om * s.sign());
        let pre = (self.model.bands().potential().eval_c(z) + self.l()) * (0.5 * nf);
        let pre = pre.exp() * PI.sqrt();
        let (n6, n6i) = (nf.powf(1.0 / 6.0), nf.powf(-1.0 / 6.0));
        let right = i % 2 == 1;
        let (plus, minus) = (t * m1 + m2 / t, t * m1 - m2 / t);
        let (first, second) = match (variant, right) {
            (PsiVariant::BandVoid, true) | (PsiVariant::BandSaturated, false) => (plus, minus),
            _ => (minus, plus),
        };
        let modulus = (a.ai.norm_sqr() + a.bi.norm_sqr()).sqrt();
        let dmodulus = (a.aip.norm_sqr() + a.bip.norm_sqr()).sqrt();
        let envelope = pre.norm()
            * (n6 * p4.norm() * first.norm() * modulus + n6i / p4.norm() * second.norm() * dmodulus);
        let val = match variant {
            PsiVariant::BandVoid => {
                if right {
                    p4 * a.ai * plus * n6 - a.aip / p4 * minus * n6i
                } else {
                    p4 * a.ai * minus * n6 - a.aip / p4 * plus * n6i
                }
            }
            PsiVariant::BandSaturated => {
                let (c, sn) = ((z * nf * PI).cos(), (z * nf * PI).sin());
                if right {
                    let b1 = c * a.ai + sn * a.bi;
                    let b2 = c * a.aip + sn * a.bip;
                    -(p4 * b1 * plus * n6) - b2 / p4 * minus * n6i
                } else {
                    let b3 = c * a.ai - sn * a.bi;
                    let b4 = c * a.aip - sn * a.bip;
                    p4 * b3 * minus * n6 + b4 / p4 * plus * n6i
                }
            }
        };
        Ok(EdgeValue {
            value: pre * val,
            envelope,
        })
    }

    /// Airy-type formula at a band-void edge `edges[i]`.
    pub fn edge_band_void(&self, i: usize, z: C64, side: Side) -> Result<C64> {
        Ok(self.edge_formula(i, PsiVariant::BandVoid, z, side)?.value)
    }

    /// `Ai`/`Bi` formula at a band-saturated edge `edges[i]`.
    pub fn edge_band_saturated(&self, i: usize, z: C64, side: Side) -> Result<C64> {
        Ok(self.edge_formula(i, PsiVariant::BandSaturated, z, side)?.value)
    }

    /// Whichever edge formula matches the type of `edges[i]`, with its envelope.
    pub fn edge_detail(&self, i: usize, z: C64, side: Side) -> Result<EdgeValue> {
        let variant = if self.model.bands().edge_is_saturated(i) {
            PsiVariant::BandSaturated
        } else {
            PsiVariant::BandVoid
        };
        self.edge_formula(i, variant, z, side)
    }

    /// Real `x` near `edges[i]` with `N^{2/3}ψ(x) = t`; positive `t` lies off the band.
    pub fn edge_point(&self, i: usize, t: f64) -> Result<f64> {
        let gf = &self.model.gfun;
        let e = self.edges()[i];
        let variant = if self.model.bands().edge_is_saturated(i) {
            PsiVariant::BandSaturated
        } else {
            PsiVariant::BandVoid
        };
        let target = t * self.nf().powf(-2.0 / 3.0);
        let r = 0.999 * gf.edge_radius(i);
        // ψ increases through right edges and decreases through left ones
        let dir = if (i % 2 == 1) == (t > 0.0) { 1.0 } else { -1.0 };
        let psi = |x: f64| gf.psi_edge(i, variant, C64::new(x, 0.0)).map(|p| p.re);
        let far = e + dir * r;
        if psi(far)?.abs() < target.abs() {
            return Err(Error::Domain(format!("Airy offset {t} lies outside the edge disk at N = {}", self.n)));
        }
        let (mut lo, mut hi) = (0.0, r);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if psi(e + dir * mid)?.abs() < target.abs() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(e + dir * 0.5 * (lo + hi))
    }
}
