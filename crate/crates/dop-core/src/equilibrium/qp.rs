use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{Lu, Mat};
use crate::num::ksum;
#[allow(unused_imports)]
use crate::prelude::*;
use crate::{Error, Result};

/// `Φ(t) = t²/2·log|t| − 3t²/4`, second antiderivative of `log|t|`.
fn phi(t: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        0.5 * t * t * t.abs().ln() - 0.75 * t * t
    }
}

/// First row of the Toeplitz matrix `A_ij = ∫∫_{cell_i × cell_j} log|x−y|`.
pub(crate) fn kernel_row(n: usize, delta: f64) -> Vec<f64> {
    (0..n)
        .map(|k| {
            if k == 0 {
                2.0 * phi(delta)
            } else {
                let t = k as f64 * delta;
                phi(t + delta) - 2.0 * phi(t) + phi(t - delta)
            }
        })
        .collect()
}

pub(crate) fn toeplitz_mul(a: &[f64], x: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|i| {
            let mut s = 0.0;
            for (j, xj) in x.iter().enumerate() {
                if *xj != 0.0 {
                    s += a[i.abs_diff(j)] * xj;
                }
            }
            s
        })
        .collect()
}

pub(crate) struct Problem<'a> {
    pub a: Vec<f64>,
    pub vbar: &'a [f64],
    pub delta: f64,
}

impl Problem<'_> {
    pub fn energy(&self, rho: &[f64], arho: &[f64]) -> f64 {
        let q = ksum(rho.iter().zip(arho).map(|(r, a)| r * a));
        let lin = ksum(rho.iter().zip(self.vbar).map(|(r, v)| r * v));
        -q + self.delta * lin
    }

    pub fn effective(&self, arho: &[f64]) -> Vec<f64> {
        arho.iter()
            .zip(self.vbar)
            .map(|(a, v)| 2.0 * a / self.delta - v)
            .collect()
    }
}

/// Euclidean projection onto `{0 ≤ ρ ≤ 1, Δ Σ ρ = 1}`.
pub(crate) fn project(y: &[f64], delta: f64) -> Vec<f64> {
    let target = 1.0 / delta;
    let mass = |th: f64| ksum(y.iter().map(|v| (v - th).clamp(0.0, 1.0)));
    let (mut lo, mut hi) = (
        y.iter().fold(f64::INFINITY, |m, v| m.min(*v)) - 1.0,
        y.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v)),
    );
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if mass(m) > target {
            lo = m;
        } else {
            hi = m;
        }
        if hi - lo < 1e-17 * (1.0 + hi.abs()) {
            break;
        }
    }
    let th = 0.5 * (lo + hi);
    let mut out: Vec<f64> = y.iter().map(|v| (v - th).clamp(0.0, 1.0)).collect();
    let free: Vec<usize> = (0..out.len()).filter(|&i| out[i] > 0.0 && out[i] < 1.0).collect();
    if !free.is_empty() {
        let err = (target - ksum(out.iter().copied())) / free.len() as f64;
        for &i in &free {
            out[i] = (out[i] + err).clamp(0.0, 1.0);
        }
    }
    out
}

/// Multiplier minimizing the worst KKT violation, and that violation.
pub(crate) fn kkt(rho: &[f64], e: &[f64]) -> (f64, f64) {
    let res = |l: f64| {
        rho.iter().zip(e).fold(0.0f64, |m, (&r, &ei)| {
            let v = if r <= 0.0 {
                (ei - l).max(0.0)
            } else if r >= 1.0 {
                (l - ei).max(0.0)
            } else {
                (ei - l).abs()
            };
            m.max(v)
        })
    };
    let (mut lo, mut hi) = (
        e.iter().fold(f64::INFINITY, |m, v| m.min(*v)),
        e.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v)),
    );
    for _ in 0..200 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if res(m1) <= res(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let l = 0.5 * (lo + hi);
    (l, res(l))
}

pub(crate) struct QpOutcome {
    pub rho: Vec<f64>,
    pub l: f64,
    pub residual: f64,
    pub energy_history: Vec<f64>,
    pub iterations: usize,
}

/// Primal-dual active-set iteration: solve the equality-constrained problem on
/// the free cells, then move cells between bounds by the sign of `E − l`.
/// Returns `None` when the sets cycle or the linear solve fails.
pub(crate) fn active_set(p: &Problem, init: &[f64], tol: f64, max_iter: usize) -> Option<QpOutcome> {
    let n = init.len();
    // 0 free, 1 lower, 2 upper
    let mut state: Vec<u8> = init.iter().map(|&r| if r <= 0.0 { 1 } else if r >= 1.0 { 2 } else { 0 }).collect();
    let mut seen: Vec<Vec<u8>> = Vec::new();
    let mut history = Vec::new();
    for it in 0..max_iter {
        let free: Vec<usize> = (0..n).filter(|&i| state[i] == 0).collect();
        let up: Vec<usize> = (0..n).filter(|&i| state[i] == 2).collect();
        let nf = free.len();
        let mut rho: Vec<f64> = state.iter().map(|&s| if s == 2 { 1.0 } else { 0.0 }).collect();
        if nf > 0 {
            let mut m = Mat::zeros(nf + 1);
            let mut rhs = Vec::with_capacity(nf + 1);
            for (r, &i) in free.iter().enumerate() {
                let row = &mut m.data[r * (nf + 1)..(r + 1) * (nf + 1)];
                for (c, &j) in free.iter().enumerate() {
                    row[c] = p.a[i.abs_diff(j)];
                }
                row[nf] = -0.5 * p.delta;
                rhs.push(0.5 * p.delta * p.vbar[i] - ksum(up.iter().map(|&j| p.a[i.abs_diff(j)])));
            }
            for c in 0..nf {
                m.data[nf * (nf + 1) + c] = 1.0;
            }
            rhs.push(1.0 / p.delta - up.len() as f64);
            let sol = Lu::new(m).ok()?.solve(&rhs);
            for (r, &i) in free.iter().enumerate() {
                rho[i] = sol[r];
            }
        }
        let arho = toeplitz_mul(&p.a, &rho);
        let e = p.effective(&arho);
        let (l, _) = kkt(&rho.iter().map(|r| r.clamp(0.0, 1.0)).collect::<Vec<_>>(), &e);
        let next: Vec<u8> = (0..n)
            .map(|i| match state[i] {
                0 if rho[i] < 0.0 => 1,
                0 if rho[i] > 1.0 => 2,
                1 if e[i] > l => 0,
                2 if e[i] < l => 0,
                s => s,
            })
            .collect();
        if next == state {
            let (l, res) = kkt(&rho, &e);
            history.push(p.energy(&rho, &arho));
            return (res <= tol).then_some(QpOutcome {
                rho,
                l,
                residual: res,
                energy_history: history,
                iterations: it + 1,
            });
        }
        history.push(p.energy(&rho.iter().map(|r| r.clamp(0.0, 1.0)).collect::<Vec<_>>(), &arho));
        if seen.contains(&next) {
            return None;
        }
        seen.push(core::mem::replace(&mut state, next));
    }
    None
}

/// Projected Newton on the free set with Armijo backtracking along the
/// projection arc; energy is non-increasing.
pub(crate) fn projected_newton(
    p: &Problem,
    mut rho: Vec<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<QpOutcome> {
    let n = rho.len();
    let mut arho = toeplitz_mul(&p.a, &rho);
    let mut en = p.energy(&rho, &arho);
    let mut history = vec![en];
    let mut res_history = Vec::new();
    for it in 0..max_iter {
        let e = p.effective(&arho);
        let (l, res) = kkt(&rho, &e);
        res_history.push(res);
        if res <= tol {
            return Ok(QpOutcome {
                rho,
                l,
                residual: res,
                energy_history: history,
                iterations: it,
            });
        }
        let free: Vec<usize> = (0..n)
            .filter(|&i| {
                let lower = rho[i] <= 0.0 && e[i] < l;
                let upper = rho[i] >= 1.0 && e[i] > l;
                !(lower || upper)
            })
            .collect();
        let grad: Vec<f64> = (0..n).map(|i| -p.delta * e[i]).collect();
        let mut dir = vec![0.0; n];
        if !free.is_empty() {
            let nf = free.len();
            let mut m = Mat::zeros(nf + 1);
            for (r, &i) in free.iter().enumerate() {
                let row = &mut m.data[r * (nf + 1)..(r + 1) * (nf + 1)];
                for (c, &j) in free.iter().enumerate() {
                    row[c] = -2.0 * p.a[i.abs_diff(j)];
                }
                row[nf] = 1.0;
            }
            for c in 0..nf {
                m.data[nf * (nf + 1) + c] = 1.0;
            }
            let mut rhs: Vec<f64> = free.iter().map(|&i| -grad[i]).collect();
            rhs.push(0.0);
            if let Ok(lu) = Lu::new(m) {
                let sol = lu.solve(&rhs);
                for (r, &i) in free.iter().enumerate() {
                    dir[i] = sol[r];
                }
            }
        }
        let mut accepted = line_search(p, &rho, &grad, &dir, en);
        if accepted.is_none() {
            // projected gradient fallback
            let h = 2.0 * p.a[0].abs();
            let g: Vec<f64> = grad.iter().map(|v| -v / h).collect();
            accepted = line_search(p, &rho, &grad, &g, en);
        }
        match accepted {
            Some((r, ar, e2)) => {
                let stalled = (en - e2).abs() <= 1e-15 * en.abs().max(1e-300) && r == rho;
                rho = r;
                arho = ar;
                en = e2;
                history.push(en);
                if stalled {
                    break;
                }
            }
            None => break,
        }
    }
    let e = p.effective(&arho);
    let (l, res) = kkt(&rho, &e);
    if res <= tol {
        return Ok(QpOutcome {
            rho,
            l,
            residual: res,
            energy_history: history,
            iterations: max_iter,
        });
    }
    res_history.push(res);
    Err(Error::NoConvergence {
        iterations: res_history.len(),
        residual: res,
        history: res_history,
    })
}

fn line_search(
    p: &Problem,
    rho: &[f64],
    grad: &[f64],
    dir: &[f64],
    en: f64,
) -> Option<(Vec<f64>, Vec<f64>, f64)> {
    if dir.iter().all(|d| *d == 0.0) {
        return None;
    }
    let mut alpha = 1.0;
    for _ in 0..40 {
        let y: Vec<f64> = rho.iter().zip(dir).map(|(r, d)| r + alpha * d).collect();
        let cand = project(&y, p.delta);
        let ar = toeplitz_mul(&p.a, &cand);
        let e2 = p.energy(&cand, &ar);
        let dec = ksum(grad.iter().zip(cand.iter().zip(rho)).map(|(g, (c, r))| g * (c - r)));
        if e2 <= en + 1e-4 * dec.min(0.0) && e2 <= en {
            return Some((cand, ar, e2));
        }
        alpha *= 0.5;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_matches_quadrature() {
        // cell pair at offset 3 with width 0.1
        let d = 0.1;
        let a = kernel_row(5, d);
        let r = crate::quad::Rule::legendre(40);
        let v = r.integrate(0.0, d, |x| r.integrate(3.0 * d, 4.0 * d, |y| (x - y).abs().ln()));
        assert!((a[3] - v).abs() < 1e-14);
        assert!((a[0] - d * d * (d.ln() - 1.5)).abs() < 1e-16);
    }

    #[test]
    fn projection_is_feasible() {
        let y = [3.0, -1.0, 0.2, 0.9, 0.5, 0.1];
        let p = project(&y, 0.5);
        assert!(p.iter().all(|v| (0.0..=1.0).contains(v)));
        assert!((p.iter().sum::<f64>() * 0.5 - 1.0).abs() < 1e-14);
    }
}
