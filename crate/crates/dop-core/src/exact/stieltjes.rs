use alloc::vec;
use alloc::vec::Vec;

use super::LatticeSpec;
use crate::num::ksum;
#[allow(unused_imports)]
use crate::prelude::*;
use crate::{Error, Potential, Result};

/// Recurrence data of the monic lattice polynomials:
/// `x P_n = P_{n+1} + β_n P_n + γ_n² P_{n-1}`, `Σ P_m P_n w = h_n δ_mn`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceTable {
    pub n: usize,
    pub n_max: usize,
    /// `log h_n`; `h_n` itself underflows for large `N`.
    pub log_h: Vec<f64>,
    pub beta: Vec<f64>,
    /// `gamma2[0]` is unused and set to zero.
    pub gamma2: Vec<f64>,
}

impl RecurrenceTable {
    pub fn h(&self, k: usize) -> f64 {
        self.log_h[k].exp()
    }

    /// Monic `P_k(x)`.
    pub fn eval(&self, k: usize, x: f64) -> f64 {
        assert!(k <= self.n_max);
        let (mut p0, mut p1) = (0.0, 1.0);
        for j in 0..k {
            let p2 = (x - self.beta[j]) * p1 - self.gamma2[j] * p0;
            p0 = p1;
            p1 = p2;
        }
        p1
    }

    pub fn eval_c(&self, k: usize, z: C64) -> C64 {
        assert!(k <= self.n_max);
        let (mut p0, mut p1) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
        for j in 0..k {
            let p2 = (z - self.beta[j]) * p1 - p0 * self.gamma2[j];
            p0 = p1;
            p1 = p2;
        }
        p1
    }

    /// `(log|P_k(x)|, sign)` with rescaling, immune to overflow.
    pub fn eval_log(&self, k: usize, x: f64) -> (f64, f64) {
        let (l, ph) = self.eval_log_c(k, C64::new(x, 0.0));
        (l, if ph.re < 0.0 { -1.0 } else { 1.0 })
    }

    /// `(log|P_k(z)|, P_k/|P_k|)`.
    pub fn eval_log_c(&self, k: usize, z: C64) -> (f64, C64) {
        assert!(k <= self.n_max);
        let (mut p0, mut p1) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
        let mut scale = 0.0;
        for j in 0..k {
            let p2 = (z - self.beta[j]) * p1 - p0 * self.gamma2[j];
            p0 = p1;
            p1 = p2;
            let m = p1.norm().max(p0.norm());
            if m > 1e100 || (m < 1e-100 && m > 0.0) {
                p0 /= m;
                p1 /= m;
                scale += m.ln();
            }
        }
        let a = p1.norm();
        if a == 0.0 {
            return (f64::NEG_INFINITY, C64::new(1.0, 0.0));
        }
        (scale + a.ln(), p1 / a)
    }

    /// Orthonormal vectors `P_k(x_i) sqrt(w_i / h_k)` are not stored; this
    /// recomputes the discrete inner product `Σ P_j P_k w / sqrt(h_j h_k)`.
    pub fn orthogonality_residual(&self, lattice: &LatticeSpec, v: &Potential) -> f64 {
        let nf = lattice.n as f64;
        let (_, vmin) = v.min();
        let xs: Vec<f64> = lattice.nodes().collect();
        let mut vals: Vec<Vec<f64>> = Vec::with_capacity(self.n_max + 1);
        for &x in &xs {
            let sw = (-0.5 * nf * (v.eval(x) - vmin)).exp();
            let (mut p0, mut p1) = (0.0, 1.0);
            let mut row = vec![0.0; self.n_max + 1];
            row[0] = sw;
            for j in 0..self.n_max {
                let p2 = (x - self.beta[j]) * p1 - self.gamma2[j] * p0;
                p0 = p1;
                p1 = p2;
                row[j + 1] = p1 * sw;
            }
            vals.push(row);
        }
        let shift = -nf * vmin;
        let mut worst: f64 = 0.0;
        for a in 0..=self.n_max {
            for b in 0..a {
                let s = ksum(vals.iter().map(|r| r[a] * r[b]));
                let norm = (0.5 * (self.log_h[a] + self.log_h[b]) - shift).exp();
                worst = worst.max((s / norm).abs());
            }
        }
        worst
    }
}

/// Discretized Stieltjes procedure on orthonormal vectors with full
/// reorthogonalization (two passes).
pub fn stieltjes_orthogonalize(
    lattice: &LatticeSpec,
    v: &Potential,
    n_max: usize,
) -> Result<RecurrenceTable> {
    let m = lattice.len();
    if m <= n_max {
        return Err(Error::InvalidArgument("lattice too small for requested degree".into()));
    }
    let nf = lattice.n as f64;
    let xs: Vec<f64> = lattice.nodes().collect();
    let vmin = xs.iter().map(|&x| v.eval(x)).fold(f64::INFINITY, f64::min);
    let wh: Vec<f64> = xs.iter().map(|&x| (-nf * (v.eval(x) - vmin)).exp()).collect();
    let s0 = ksum(wh.iter().copied());
    if !(s0 > 0.0) {
        return Err(Error::PrecisionExhausted(0));
    }
    let mut log_h = vec![0.0; n_max + 1];
    let mut beta = vec![0.0; n_max + 1];
    let mut gamma2 = vec![0.0; n_max + 1];
    log_h[0] = -nf * vmin + s0.ln();
    let inv = 1.0 / s0.sqrt();
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(n_max + 1);
    q.push(wh.iter().map(|w| w.sqrt() * inv).collect());
    let dot = |a: &[f64], b: &[f64]| ksum(a.iter().zip(b).map(|(x, y)| x * y));
    for k in 0..=n_max {
        beta[k] = ksum(q[k].iter().zip(&xs).map(|(qi, x)| x * qi * qi));
        if k == n_max {
            break;
        }
        let g = gamma2[k].sqrt();
        let mut nv: Vec<f64> = (0..m)
            .map(|i| {
                let prev = if k > 0 { g * q[k - 1][i] } else { 0.0 };
                (xs[i] - beta[k]) * q[k][i] - prev
            })
            .collect();
        for _ in 0..2 {
            for qj in &q {
                let c = dot(&nv, qj);
                for (a, b) in nv.iter_mut().zip(qj) {
                    *a -= c * b;
                }
            }
        }
        let nn = dot(&nv, &nv);
        if !(nn > 1e-280) || !nn.is_finite() {
            return Err(Error::PrecisionExhausted(k + 1));
        }
        gamma2[k + 1] = nn;
        log_h[k + 1] = log_h[k] + nn.ln();
        let r = 1.0 / nn.sqrt();
        q.push(nv.iter().map(|a| a * r).collect());
    }
    Ok(RecurrenceTable {
        n: lattice.n,
        n_max,
        log_h,
        beta,
        gamma2,
    })
}
