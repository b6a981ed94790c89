//! Gauss rules on `[-1, 1]` and endpoint-adapted substitutions.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use crate::prelude::*;

#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    /// Gauss–Legendre rule with `n` nodes.
    pub fn legendre(n: usize) -> Rule {
        assert!(n >= 1);
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_pd(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_pd(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Rule { nodes, weights }
    }

    /// Gauss–Chebyshev (first kind) rule: `∫ f(x)/sqrt(1-x²) dx ≈ Σ w f(x)`.
    pub fn chebyshev(n: usize) -> Rule {
        let nodes = (0..n)
            .map(|k| -((2 * k + 1) as f64 * PI / (2 * n) as f64).cos())
            .collect();
        Rule {
            nodes,
            weights: alloc::vec![PI / n as f64; n],
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `∫_a^b f`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let (c, h) = ((a + b) / 2.0, (b - a) / 2.0);
        let mut s = crate::Kahan::new();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s.add(w * f(c + h * x));
        }
        h * s.value()
    }

    /// `∫_a^b f` for complex integrands along the real segment.
    pub fn integrate_c<F: FnMut(f64) -> C64>(&self, a: f64, b: f64, mut f: F) -> C64 {
        let (c, h) = ((a + b) / 2.0, (b - a) / 2.0);
        let mut s = C64::new(0.0, 0.0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s += f(c + h * x) * *w;
        }
        s * h
    }

    /// `∫_0^1 f(t) dt` mapped from the reference interval.
    pub fn unit<F: FnMut(f64) -> C64>(&self, mut f: F) -> C64 {
        let mut s = C64::new(0.0, 0.0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s += f(0.5 * (x + 1.0)) * (0.5 * w);
        }
        s
    }

    /// `∫_u^v f(s) ds` through `s = c - h cos θ`, which absorbs square-root
    /// behavior (zero or inverse) at either end.
    pub fn cos_sub<F: FnMut(f64) -> C64>(&self, u: f64, v: f64, mut f: F) -> C64 {
        let (c, h) = ((u + v) / 2.0, (v - u) / 2.0);
        let mut s = C64::new(0.0, 0.0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let th = 0.5 * PI * (x + 1.0);
            s += f(c - h * th.cos()) * (th.sin() * w);
        }
        s * (0.5 * PI * h)
    }

    pub fn cos_sub_real<F: FnMut(f64) -> f64>(&self, u: f64, v: f64, mut f: F) -> f64 {
        self.cos_sub(u, v, |s| C64::new(f(s), 0.0)).re
    }
}

fn legendre_pd(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_is_exact_for_polynomials() {
        let r = Rule::legendre(12);
        for k in 0..24 {
            let got = r.integrate(-1.0, 1.0, |x| x.powi(k));
            let want = if k % 2 == 0 { 2.0 / (k as f64 + 1.0) } else { 0.0 };
            assert!((got - want).abs() < 1e-14, "k={k}");
        }
        assert!((r.weights.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn large_rule_weights_sum() {
        let r = Rule::legendre(400);
        assert!((r.weights.iter().sum::<f64>() - 2.0).abs() < 1e-13);
        assert!((r.integrate(0.0, PI, |x| x.sin()) - 2.0).abs() < 1e-13);
    }

    #[test]
    fn chebyshev_weight() {
        let r = Rule::chebyshev(20);
        let s: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x * x).sum();
        assert!((s - PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn cos_sub_handles_sqrt_ends() {
        let r = Rule::legendre(40);
        // ∫_0^1 sqrt(x(1-x)) = π/8 and ∫_0^1 1/sqrt(x) = 2
        let a = r.cos_sub_real(0.0, 1.0, |x| (x * (1.0 - x)).sqrt());
        assert!((a - PI / 8.0).abs() < 1e-14);
        let b = r.cos_sub_real(0.0, 1.0, |x| 1.0 / x.sqrt());
        assert!((b - 2.0).abs() < 1e-12);
    }
}
