//! Polynomial external fields `V`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::num::{horner, horner_c};
#[allow(unused_imports)]
use crate::prelude::*;
use crate::{Error, Result};

/// A confining polynomial potential, coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    coeffs: Vec<f64>,
    dcoeffs: Vec<f64>,
    label: String,
    vmin: f64,
    xmin: f64,
}

impl Potential {
    pub fn new(coeffs: &[f64]) -> Result<Potential> {
        let mut c: Vec<f64> = coeffs.to_vec();
        while c.len() > 1 && c.last() == Some(&0.0) {
            c.pop();
        }
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::NotConfining("non-finite coefficient".into()));
        }
        let deg = c.len() - 1;
        if deg < 2 || deg % 2 == 1 || c[deg] <= 0.0 {
            return Err(Error::NotConfining(format!(
                "need even degree >= 2 with positive leading coefficient, got degree {deg} leading {}",
                c[deg]
            )));
        }
        let dcoeffs: Vec<f64> = c.iter().enumerate().skip(1).map(|(k, a)| k as f64 * a).collect();
        let mut p = Potential {
            label: format_poly(&c),
            coeffs: c,
            dcoeffs,
            vmin: 0.0,
            xmin: 0.0,
        };
        p.growth_probe()?;
        let (xmin, vmin) = p.locate_min();
        p.xmin = xmin;
        p.vmin = vmin;
        Ok(p)
    }

    /// Named presets: `gaussian` (x²), `saturated` (10x²), `saturated6` (6x²), `quartic` (x⁴).
    pub fn preset(name: &str) -> Result<Potential> {
        let c: &[f64] = match name {
            "gaussian" | "x2" => &[0.0, 0.0, 1.0],
            "saturated" | "10x2" => &[0.0, 0.0, 10.0],
            "saturated6" | "6x2" => &[0.0, 0.0, 6.0],
            "quartic" | "x4" => &[0.0, 0.0, 0.0, 0.0, 1.0],
            _ => return Err(Error::InvalidArgument(format!("unknown potential preset `{name}`"))),
        };
        let mut p = Potential::new(c)?;
        p.label = name.into();
        Ok(p)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn deriv_coeffs(&self) -> &[f64] {
        &self.dcoeffs
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        horner(&self.coeffs, x)
    }

    pub fn deriv(&self, x: f64) -> f64 {
        horner(&self.dcoeffs, x)
    }

    pub fn eval_c(&self, z: C64) -> C64 {
        horner_c(&self.coeffs, z)
    }

    pub fn deriv_c(&self, z: C64) -> C64 {
        horner_c(&self.dcoeffs, z)
    }

    pub fn is_even(&self) -> bool {
        self.coeffs.iter().skip(1).step_by(2).all(|&c| c == 0.0)
    }

    /// Global minimum `(x, V(x))`.
    pub fn min(&self) -> (f64, f64) {
        (self.xmin, self.vmin)
    }

    /// Bound on the real critical points (Cauchy bound for the roots of V').
    pub fn critical_bound(&self) -> f64 {
        let d = &self.dcoeffs;
        let lead = d[d.len() - 1];
        1.0 + d[..d.len() - 1].iter().fold(0.0f64, |m, a| m.max((a / lead).abs()))
    }

    /// Smallest `R` with `V(x) − 2 log(1+|x|) − min V > margin` for all `|x| ≥ R`.
    pub fn confinement_radius(&self, margin: f64) -> f64 {
        let f = |x: f64| self.eval(x) - 2.0 * (1.0 + x.abs()).ln() - self.vmin - margin;
        let mut big = self.critical_bound().max(1.0);
        while f(big) <= 0.0 || f(-big) <= 0.0 {
            big *= 2.0;
        }
        let steps = 8000;
        let h = 2.0 * big / steps as f64;
        let mut r: f64 = 0.0;
        for i in 0..=steps {
            let x = -big + i as f64 * h;
            if f(x) <= 0.0 {
                r = r.max(x.abs() + h);
            }
        }
        r
    }

    fn growth_probe(&self) -> Result<()> {
        let mut prev = f64::NEG_INFINITY;
        for k in 1..=4 {
            let x = 10f64.powi(k);
            let g = self.eval(x).min(self.eval(-x)) / (x * x + 1.0).ln();
            if !(g > prev) || !g.is_finite() {
                return Err(Error::NotConfining(format!(
                    "V(x)/log(x²+1) not increasing at |x| = {x}"
                )));
            }
            prev = g;
        }
        if prev < 10.0 {
            return Err(Error::NotConfining(format!("V(x)/log(x²+1) = {prev} at |x| = 1e4")));
        }
        Ok(())
    }

    fn locate_min(&self) -> (f64, f64) {
        let b = self.critical_bound();
        let n = 20000;
        let (mut xb, mut vb) = (0.0, f64::INFINITY);
        for i in 0..=n {
            let x = -b + 2.0 * b * i as f64 / n as f64;
            let v = self.eval(x);
            if v < vb {
                vb = v;
                xb = x;
            }
        }
        let d2: Vec<f64> = self.dcoeffs.iter().enumerate().skip(1).map(|(k, a)| k as f64 * a).collect();
        let mut x = xb;
        for _ in 0..50 {
            let h = horner(&d2, x);
            if h <= 0.0 {
                break;
            }
            let dx = self.deriv(x) / h;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        if self.eval(x) > vb {
            x = xb;
        }
        (x, self.eval(x))
    }
}

fn format_poly(c: &[f64]) -> String {
    let mut s = String::new();
    for (k, a) in c.iter().enumerate() {
        if *a == 0.0 {
            continue;
        }
        if !s.is_empty() {
            s.push_str(" + ");
        }
        match k {
            0 => s.push_str(&format!("{a}")),
            1 => s.push_str(&format!("{a}x")),
            _ => s.push_str(&format!("{a}x^{k}")),
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_confining() {
        assert!(matches!(Potential::new(&[0.0, 0.0, -1.0]), Err(Error::NotConfining(_))));
        assert!(Potential::new(&[0.0, 0.0, 0.0, 1.0]).is_err());
        assert!(Potential::new(&[1.0]).is_err());
        assert!(Potential::preset("nope").is_err());
    }

    #[test]
    fn evaluates() {
        let v = Potential::new(&[1.0, 0.0, -3.0, 0.0, 1.0]).unwrap();
        assert_eq!(v.eval(2.0), 1.0 - 12.0 + 16.0);
        assert_eq!(v.deriv(2.0), -12.0 + 32.0);
        let (x, m) = v.min();
        assert!((x.abs() - 1.5f64.sqrt()).abs() < 1e-8);
        assert!((m - (1.0 - 9.0 / 4.0)).abs() < 1e-12);
        assert!(v.is_even());
    }

    #[test]
    fn confinement_radius_for_gaussian() {
        let v = Potential::preset("gaussian").unwrap();
        let r = v.confinement_radius(2.0);
        let f = |x: f64| x * x - 2.0 * (1.0 + x).ln() - 2.0;
        assert!(f(r) > 0.0 && f(r - 0.01) < 0.0, "r = {r}");
    }
}
