//! Constrained equilibrium measure: `0 ≤ ρ ≤ 1`, unit mass, minimal log-energy in the field `V`.

mod analytic;
mod qp;

use alloc::format;
use alloc::vec::Vec;

pub use analytic::BandStructure;

#[allow(unused_imports)]
use crate::prelude::*;
use crate::{Error, Potential, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    pub tol_kkt: f64,
    pub max_iter: usize,
    /// Solve on successively halved grids first and interpolate upward.
    pub multilevel: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol_kkt: 1e-6,
            max_iter: 200,
            multilevel: true,
        }
    }
}

/// Grid solution of the discretized constrained energy problem.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumMeasure {
    pub interval: (f64, f64),
    /// Cell midpoints.
    pub grid: Vec<f64>,
    pub delta: f64,
    pub rho: Vec<f64>,
    /// Effective potential `2∫log|x−y|dν − V` at the midpoints.
    pub effective: Vec<f64>,
    pub lagrange_l: f64,
    pub kkt_residual: f64,
    pub energy_history: Vec<f64>,
    pub iterations: usize,
}

impl EquilibriumMeasure {
    pub fn mass(&self) -> f64 {
        crate::num::ksum(self.rho.iter().copied()) * self.delta
    }

    pub fn energy(&self) -> f64 {
        *self.energy_history.last().unwrap_or(&f64::NAN)
    }

    /// Piecewise-constant density value at `x`.
    pub fn density_at(&self, x: f64) -> f64 {
        let (a, b) = self.interval;
        if x < a || x >= b {
            return 0.0;
        }
        let i = (((x - a) / self.delta) as usize).min(self.rho.len() - 1);
        self.rho[i]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GapKind {
    Void,
    Saturated,
}

/// Edges `α_1 < β_1 < … < α_q < β_q` and the kind of each interior gap.
#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub edges: Vec<f64>,
    pub gaps: Vec<GapKind>,
    /// Cell index ranges `[first, last]` of each band.
    pub band_cells: Vec<(usize, usize)>,
}

impl Classification {
    pub fn q(&self) -> usize {
        self.edges.len() / 2
    }

    pub fn saturated(&self) -> Vec<bool> {
        self.gaps.iter().map(|g| *g == GapKind::Saturated).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    BandVoid,
    BandSaturated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeFit {
    pub x: f64,
    /// `ρ ≈ C√|x−e|` (band-void) or `1−ρ ≈ C√|x−e|` (band-saturated).
    pub c: f64,
    pub kind: EdgeKind,
    /// True for a right endpoint `β_j`.
    pub right: bool,
    pub near_singular: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegularityCertificate {
    pub q1_interior_min: f64,
    pub q2_interior_min: f64,
    pub edge_slopes: Vec<f64>,
    pub gap_margin: f64,
    pub isolated_point_flag: bool,
    pub valid: bool,
}

/// Cell average of `V` by 3-point Gauss.
fn cell_average(v: &Potential, x: f64, d: f64) -> f64 {
    let h = 0.5 * d * (0.6f64).sqrt();
    (5.0 * v.eval(x - h) + 8.0 * v.eval(x) + 5.0 * v.eval(x + h)) / 18.0
}

pub fn solve_equilibrium(
    v: &Potential,
    grid_size: usize,
    interval: (f64, f64),
    opts: &SolverOptions,
) -> Result<EquilibriumMeasure> {
    let (a, b) = interval;
    if !(b > a) || grid_size < 10 {
        return Err(Error::InvalidArgument(format!(
            "bad grid: {grid_size} cells on [{a}, {b}]"
        )));
    }
    if b - a <= 1.0 {
        return Err(Error::SupportTouchesBoundary(a, b));
    }
    let mut sizes = alloc::vec![grid_size];
    if opts.multilevel {
        while sizes[sizes.len() - 1] / 2 >= 100 {
            let s = sizes[sizes.len() - 1] / 2;
            sizes.push(s);
        }
    }
    sizes.reverse();
    let mut prev: Option<(Vec<f64>, f64)> = None;
    let mut out = None;
    for (level, &n) in sizes.iter().enumerate() {
        let d = (b - a) / n as f64;
        let grid: Vec<f64> = (0..n).map(|i| a + (i as f64 + 0.5) * d).collect();
        let vbar: Vec<f64> = grid.iter().map(|&x| cell_average(v, x, d)).collect();
        let init = match &prev {
            None => alloc::vec![1.0 / (b - a); n],
            Some((r, dp)) => {
                let y: Vec<f64> = grid
                    .iter()
                    .map(|&x| r[(((x - a) / dp) as usize).min(r.len() - 1)])
                    .collect();
                qp::project(&y, d)
            }
        };
        let p = qp::Problem {
            a: qp::kernel_row(n, d),
            vbar: &vbar,
            delta: d,
        };
        let tol = if level + 1 == sizes.len() { opts.tol_kkt } else { opts.tol_kkt * 10.0 };
        let o = match qp::active_set(&p, &init, tol, 30) {
            Some(o) => o,
            None => qp::projected_newton(&p, init, tol, opts.max_iter)?,
        };
        let arho = qp::toeplitz_mul(&p.a, &o.rho);
        let eff = p.effective(&arho);
        prev = Some((o.rho.clone(), d));
        out = Some(EquilibriumMeasure {
            interval,
            grid,
            delta: d,
            rho: o.rho,
            effective: eff,
            lagrange_l: o.l,
            kkt_residual: o.residual,
            energy_history: o.energy_history,
            iterations: o.iterations,
        });
    }
    let m = out.expect("at least one level");
    let tb = 1e-4;
    if m.rho[0] > tb || m.rho[m.rho.len() - 1] > tb {
        return Err(Error::SupportTouchesBoundary(a, b));
    }
    Ok(m)
}

/// Symmetric default interval from the confinement probe, enlarged by 1.5×
/// whenever the support touches its ends.
pub fn solve_equilibrium_auto(
    v: &Potential,
    grid_size: usize,
    opts: &SolverOptions,
) -> Result<EquilibriumMeasure> {
    let (xm, _) = v.min();
    let mut r = v.confinement_radius(2.0).max(0.75);
    for _ in 0..8 {
        let iv = (xm.min(0.0) - r, xm.max(0.0) + r);
        match solve_equilibrium(v, grid_size, iv, opts) {
            Err(Error::SupportTouchesBoundary(..)) => r *= 1.5,
            other => return other,
        }
    }
    Err(Error::UnresolvedStructure("support keeps touching the bounding interval".into()))
}

pub fn classify_regions(m: &EquilibriumMeasure, tol_band: f64) -> Result<Classification> {
    let kind = |r: f64| -> u8 {
        if r <= tol_band {
            0
        } else if r >= 1.0 - tol_band {
            2
        } else {
            1
        }
    };
    let mut runs: Vec<(u8, usize, usize)> = Vec::new();
    for (i, &r) in m.rho.iter().enumerate() {
        let k = kind(r);
        match runs.last_mut() {
            Some(last) if last.0 == k => last.2 = i,
            _ => runs.push((k, i, i)),
        }
    }
    if runs.first().map(|r| r.0) != Some(0) || runs.last().map(|r| r.0) != Some(0) {
        return Err(Error::SupportTouchesBoundary(m.interval.0, m.interval.1));
    }
    let mut edges = Vec::new();
    let mut gaps = Vec::new();
    let mut band_cells = Vec::new();
    let mut pending: Option<u8> = None;
    let edge_at = |i: usize| m.interval.0 + i as f64 * m.delta;
    for (idx, &(k, s, e)) in runs.iter().enumerate() {
        if k == 1 {
            if e + 1 - s < 3 {
                return Err(Error::UnresolvedStructure(format!(
                    "band of {} cells near x = {:.4}; refine grid",
                    e + 1 - s,
                    m.grid[s]
                )));
            }
            if let Some(g) = pending.take() {
                gaps.push(if g == 2 { GapKind::Saturated } else { GapKind::Void });
            }
            edges.push(edge_at(s));
            edges.push(edge_at(e + 1));
            band_cells.push((s, e));
        } else if idx > 0 && !edges.is_empty() {
            match pending {
                Some(p) if p != k => {
                    return Err(Error::UnresolvedStructure(format!(
                        "void and saturated cells adjacent near x = {:.4}",
                        m.grid[s]
                    )))
                }
                _ => pending = Some(k),
            }
        }
    }
    if edges.is_empty() {
        return Err(Error::UnresolvedStructure("no band found".into()));
    }
    Ok(Classification {
        edges,
        gaps,
        band_cells,
    })
}

/// Least-squares fit of `ρ²` (or `(1−ρ)²`) linear near each edge.
pub fn refine_edges(m: &EquilibriumMeasure, c: &Classification) -> Result<Vec<EdgeFit>> {
    let q = c.q();
    let mut fits = Vec::with_capacity(2 * q);
    for (k, &(s, e)) in c.band_cells.iter().enumerate() {
        let width = e + 1 - s;
        let win = (width / 10).clamp(4, 12);
        for right in [false, true] {
            let sat = if right {
                k + 1 < q && c.gaps[k] == GapKind::Saturated
            } else {
                k > 0 && c.gaps[k - 1] == GapKind::Saturated
            };
            let skip = if width >= 20 { 2 } else { 0 };
            let idx: Vec<usize> = (skip..skip + win)
                .map(|o| if right { e - o.min(e - s) } else { s + o.min(e - s) })
                .collect();
            let pts: Vec<(f64, f64)> = idx
                .iter()
                .map(|&i| {
                    let y = if sat { 1.0 - m.rho[i] } else { m.rho[i] };
                    (m.grid[i], y * y)
                })
                .collect();
            let nf = pts.len() as f64;
            let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
            let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
            let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
            let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
            let slope = sxy / sxx;
            let fallback = if right { m.interval.0 + (e + 1) as f64 * m.delta } else { m.interval.0 + s as f64 * m.delta };
            let x = if slope != 0.0 && slope.is_finite() { mx - my / slope } else { fallback };
            let x = if (x - fallback).abs() > 3.0 * m.delta { fallback } else { x };
            let cc = slope.abs().sqrt();
            fits.push(EdgeFit {
                x,
                c: cc,
                kind: if sat { EdgeKind::BandSaturated } else { EdgeKind::BandVoid },
                right,
                near_singular: !(cc > 1e-3),
            });
        }
    }
    if fits.iter().any(|f| !f.x.is_finite()) {
        return Err(Error::EdgeRefinement("non-finite edge fit".into()));
    }
    Ok(fits)
}

pub fn certify_regularity(
    m: &EquilibriumMeasure,
    c: &Classification,
    fits: &[EdgeFit],
) -> RegularityCertificate {
    let pad = |s: usize, e: usize| {
        let w = e + 1 - s;
        let p = (w / 10).max(3).min(w / 3);
        (s + p, e - p)
    };
    let mut q1 = f64::INFINITY;
    let mut q2 = f64::INFINITY;
    for &(s, e) in &c.band_cells {
        let (a, b) = pad(s, e);
        for i in a..=b {
            let r = m.rho[i];
            q1 = q1.min((core::f64::consts::PI * r).powi(2));
            q2 = q2.min((core::f64::consts::PI * (1.0 - r)).powi(2));
        }
    }
    let l = m.lagrange_l;
    let mut margin = f64::INFINITY;
    let n = m.rho.len();
    let mut gap_ranges: Vec<(usize, usize, GapKind)> = Vec::new();
    gap_ranges.push((0, c.band_cells[0].0.saturating_sub(1), GapKind::Void));
    for (k, w) in c.band_cells.windows(2).enumerate() {
        gap_ranges.push((w[0].1 + 1, w[1].0 - 1, c.gaps[k]));
    }
    gap_ranges.push((c.band_cells[c.band_cells.len() - 1].1 + 1, n - 1, GapKind::Void));
    for (s, e, kind) in gap_ranges {
        if e < s + 6 {
            continue;
        }
        for i in s + 3..=e - 3 {
            let d = match kind {
                GapKind::Void => l - m.effective[i],
                GapKind::Saturated => m.effective[i] - l,
            };
            margin = margin.min(d);
        }
    }
    let isolated = margin <= 10.0 * m.kkt_residual.max(1e-9);
    let slopes: Vec<f64> = fits.iter().map(|f| f.c).collect();
    let floor = 1e-6;
    let valid = q1 > floor
        && q2 > floor
        && !isolated
        && fits.iter().all(|f| !f.near_singular);
    RegularityCertificate {
        q1_interior_min: q1,
        q2_interior_min: q2,
        edge_slopes: slopes,
        gap_margin: margin,
        isolated_point_flag: isolated,
        valid,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn semicircle_on_coarse_grid() {
        let v = Potential::preset("gaussian").unwrap();
        let m = solve_equilibrium_auto(&v, 400, &SolverOptions::default()).unwrap();
        assert!((m.mass() - 1.0).abs() < 1e-10);
        assert!(m.kkt_residual <= 1e-6);
        for w in m.energy_history.windows(2) {
            assert!(w[1] <= w[0]);
        }
        let c = classify_regions(&m, 1e-4).unwrap();
        assert_eq!(c.q(), 1);
        let f = refine_edges(&m, &c).unwrap();
        assert!((f[1].x - 2f64.sqrt()).abs() < 5e-3, "{:?}", f);
        let cert = certify_regularity(&m, &c, &f);
        assert!(cert.valid, "{cert:?}");
    }

    #[test]
    fn saturated_structure() {
        let v = Potential::preset("saturated").unwrap();
        let m = solve_equilibrium_auto(&v, 800, &SolverOptions::default()).unwrap();
        let c = classify_regions(&m, 1e-4).unwrap();
        assert_eq!(c.q(), 2);
        assert_eq!(c.gaps, alloc::vec![GapKind::Saturated]);
        let f = refine_edges(&m, &c).unwrap();
        assert_eq!(f[1].kind, EdgeKind::BandSaturated);
    }

    #[test]
    fn pinched_band_is_not_regular() {
        let v = Potential::preset("gaussian").unwrap();
        let mut m = solve_equilibrium_auto(&v, 400, &SolverOptions::default()).unwrap();
        let c = classify_regions(&m, 1e-4).unwrap();
        let f = refine_edges(&m, &c).unwrap();
        let mid = (c.band_cells[0].0 + c.band_cells[0].1) / 2;
        m.rho[mid] = 1e-9;
        let cert = certify_regularity(&m, &c, &f);
        assert!(!cert.valid);
    }
}
