//! Riemann theta function `θ(s) = Σ_{m∈ℤ^g} exp(2πi⟨m,s⟩ + πi⟨m,τm⟩)`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::linalg::{inverse, sym_eigenvalues, Mat};
#[allow(unused_imports)]
use crate::prelude::*;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct ThetaEvaluator {
    tau: Mat<C64>,
    /// `T = Im τ`.
    t: Mat<f64>,
    t_inv: Mat<f64>,
    lambda_min: f64,
    eps_tail: f64,
    max_radius: usize,
}

impl ThetaEvaluator {
    pub fn new(tau: &Mat<C64>, eps_tail: f64, max_radius: usize) -> Result<Self> {
        let g = tau.n;
        let t = Mat::from_fn(g, |i, j| tau.get(i, j).im);
        let (t_inv, lambda_min) = if g == 0 {
            (Mat::zeros(0), 1.0)
        } else {
            let lam = sym_eigenvalues(&t)[0];
            if !(lam > 0.0) {
                return Err(Error::ThetaDegenerate(format!("Im τ is not positive definite (λ_min = {lam})")));
            }
            (inverse(&t)?, lam)
        };
        Ok(ThetaEvaluator {
            tau: tau.clone(),
            t,
            t_inv,
            lambda_min,
            eps_tail,
            max_radius,
        })
    }

    pub fn genus(&self) -> usize {
        self.tau.n
    }

    pub fn tau(&self) -> &Mat<C64> {
        &self.tau
    }

    /// Bound on the omitted terms, relative to the largest term, for a box of radius `m`.
    pub fn tail_bound(&self, m: usize) -> f64 {
        let g = self.genus() as i32;
        let mut s = 0.0;
        for n in (m + 1)..(m + 200) {
            let nf = n as f64;
            let term = (2.0 * nf + 2.0).powi(g) * (-PI * self.lambda_min * (nf - 1.0).powi(2)).exp();
            s += term;
            if term < 1e-30 * s {
                break;
            }
        }
        s
    }

    pub fn radius(&self) -> Result<usize> {
        (1..=self.max_radius)
            .find(|&m| self.tail_bound(m) < self.eps_tail)
            .ok_or(Error::ThetaTruncation {
                eps: self.eps_tail,
                max_radius: self.max_radius,
            })
    }

    /// `θ(s)` and `∇θ(s)`.
    pub fn theta_grad(&self, s: &[C64]) -> Result<(C64, Vec<C64>)> {
        let g = self.genus();
        if s.len() != g {
            return Err(Error::InvalidArgument(format!("argument has length {}, genus is {g}", s.len())));
        }
        if g == 0 {
            return Ok((C64::new(1.0, 0.0), Vec::new()));
        }
        let radius = self.radius()? as i64;
        // the largest terms sit near c = −T⁻¹ Im s
        let ims: Vec<f64> = s.iter().map(|z| z.im).collect();
        let center: Vec<i64> = self.t_inv.matvec(&ims).iter().map(|c| (-c).round() as i64).collect();
        let mut m: Vec<i64> = center.iter().map(|c| c - radius).collect();
        let mut total = C64::new(0.0, 0.0);
        let mut grad = vec![C64::new(0.0, 0.0); g];
        loop {
            let mut ex = C64::new(0.0, 0.0);
            for i in 0..g {
                let mi = m[i] as f64;
                ex += C64::new(0.0, 2.0 * PI) * s[i] * mi;
                for j in 0..g {
                    ex += C64::new(0.0, PI) * self.tau.get(i, j) * (mi * m[j] as f64);
                }
            }
            let term = ex.exp();
            total += term;
            for i in 0..g {
                grad[i] += term * C64::new(0.0, 2.0 * PI * m[i] as f64);
            }
            let mut k = 0;
            loop {
                if k == g {
                    return Ok((total, grad));
                }
                m[k] += 1;
                if m[k] <= center[k] + radius {
                    break;
                }
                m[k] = center[k] - radius;
                k += 1;
            }
        }
    }

    pub fn theta(&self, s: &[C64]) -> Result<C64> {
        Ok(self.theta_grad(s)?.0)
    }

    pub fn im_tau(&self) -> &Mat<f64> {
        &self.t
    }
}
