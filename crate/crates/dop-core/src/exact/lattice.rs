use alloc::format;

#[allow(unused_imports)]
use crate::prelude::*;
use crate::{Error, Potential, Result};

pub const DEFAULT_GUARD: f64 = 1e-300;

/// Symmetric truncation `{k/N : |k/N| ≤ X}` of the lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSpec {
    pub n: usize,
    pub radius: f64,
    pub kmin: i64,
    pub kmax: i64,
    pub guard: f64,
}

impl LatticeSpec {
    pub fn len(&self) -> usize {
        (self.kmax - self.kmin + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.kmax < self.kmin
    }

    pub fn node(&self, i: usize) -> f64 {
        (self.kmin + i as i64) as f64 / self.n as f64
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (self.kmin..=self.kmax).map(move |k| k as f64 / self.n as f64)
    }
}

pub fn build_lattice(v: &Potential, n: usize, n_max: usize) -> Result<LatticeSpec> {
    build_lattice_with_guard(v, n, n_max, DEFAULT_GUARD)
}

/// Smallest radius `X` such that every excluded node has
/// `e^{-N(V(x)-min V)} (1+|x|)^{2 n_max} < guard`.
pub fn build_lattice_with_guard(
    v: &Potential,
    n: usize,
    n_max: usize,
    guard: f64,
) -> Result<LatticeSpec> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be >= 1".into()));
    }
    if !(guard > 0.0 && guard < 1.0) {
        return Err(Error::InvalidArgument(format!("guard {guard} outside (0,1)")));
    }
    let nf = n as f64;
    let (_, vmin) = v.min();
    let lg = guard.ln();
    let f = |x: f64| -nf * (v.eval(x) - vmin) + 2.0 * n_max as f64 * (1.0 + x.abs()).ln() - lg;
    let fp = |x: f64| -nf * v.deriv(x) + 2.0 * n_max as f64 * x.signum() / (1.0 + x.abs());
    let mut radius: f64 = 0.0;
    for s in [1.0, -1.0] {
        let mut far = v.critical_bound().max(1.0);
        while f(s * far) >= 0.0 || s * fp(s * far) >= 0.0 {
            far *= 2.0;
            if far > 1e8 {
                return Err(Error::NotConfining("truncation radius diverges".into()));
            }
        }
        let steps = 20000;
        let h = far / steps as f64;
        let mut last = None;
        for i in 0..=steps {
            if f(s * i as f64 * h) >= 0.0 {
                last = Some(i);
            }
        }
        let x = match last {
            None => 0.0,
            Some(i) => {
                let (mut a, mut b) = (i as f64 * h, (i + 1) as f64 * h);
                for _ in 0..80 {
                    let m = 0.5 * (a + b);
                    if f(s * m) >= 0.0 {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                b
            }
        };
        radius = radius.max(x);
    }
    let kmax = (radius * nf).floor() as i64;
    let spec = LatticeSpec {
        n,
        radius,
        kmin: -kmax,
        kmax,
        guard,
    };
    if spec.len() <= n_max {
        return Err(Error::InvalidArgument(format!(
            "{} nodes cannot support degree {n_max}",
            spec.len()
        )));
    }
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_n1_radius() {
        let v = Potential::preset("gaussian").unwrap();
        let l = build_lattice(&v, 1, 0).unwrap();
        assert!((l.radius - 690.7755f64.sqrt()).abs() < 1e-3, "{}", l.radius);
        assert_eq!(l.kmax, 26);
    }

    #[test]
    fn guard_holds_beyond_radius() {
        let v = Potential::preset("gaussian").unwrap();
        let l = build_lattice(&v, 16, 16).unwrap();
        for k in l.kmax + 1..l.kmax + 200 {
            let x = k as f64 / 16.0;
            let lb = -16.0 * x * x + 32.0 * (1.0 + x).ln();
            assert!(lb < DEFAULT_GUARD.ln());
        }
        let x = l.radius * 0.999;
        assert!(-16.0 * x * x + 32.0 * (1.0 + x).ln() > DEFAULT_GUARD.ln());
    }

    #[test]
    fn node_listing() {
        let v = Potential::preset("gaussian").unwrap();
        let l = build_lattice(&v, 4, 4).unwrap();
        assert_eq!(l.nodes().count(), l.len());
        assert_eq!(l.node(0), l.kmin as f64 / 4.0);
    }
}
