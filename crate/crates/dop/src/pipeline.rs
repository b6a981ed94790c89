//! End-to-end runs: equilibrium, refinement, surface, asymptotics and exact comparison.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use dop_core::asymptotics::{AsymptoticContext, AsymptoticModel, AsymptoticOptions};
use dop_core::equilibrium::{
    certify_regularity, classify_regions, refine_edges, solve_equilibrium_auto, BandStructure,
    Classification, EquilibriumMeasure, RegularityCertificate, SolverOptions,
};
use dop_core::exact::{build_lattice, count_zeros, stieltjes_orthogonalize, RecurrenceTable};
use dop_core::{Potential, Side, C64};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{PipelineError, Stage, StageExt};
use crate::fit::{fit_slope, SlopeFit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Region {
    /// Recurrence data; no location.
    Global,
    Void,
    Band,
    Saturated,
    EdgeBandVoid,
    EdgeBandSaturated,
}

impl Region {
    pub fn as_str(self) -> &'static str {
        match self {
            Region::Global => "global",
            Region::Void => "void",
            Region::Band => "band",
            Region::Saturated => "saturated",
            Region::EdgeBandVoid => "edge-band-void",
            Region::EdgeBandSaturated => "edge-band-saturated",
        }
    }
}

/// One exact-versus-asymptotic comparison. Complex points store moduli in
/// `exact`/`asympt`; `rel_err` is always computed from the full values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub quantity: String,
    pub n: usize,
    pub x_re: f64,
    pub x_im: f64,
    pub region: Region,
    pub exact: f64,
    pub asympt: f64,
    pub rel_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRecord {
    pub quantity: String,
    /// Location for fixed-point fits, `None` for per-`N` means over a point set.
    pub location: Option<[f64; 2]>,
    pub points: Vec<(usize, f64)>,
    pub fit: Option<SlopeFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityEcho {
    pub q1_interior_min: f64,
    pub q2_interior_min: f64,
    pub edge_slopes: Vec<f64>,
    pub gap_margin: f64,
    pub isolated_point_flag: bool,
    pub valid: bool,
}

impl From<&RegularityCertificate> for RegularityEcho {
    fn from(c: &RegularityCertificate) -> Self {
        RegularityEcho {
            q1_interior_min: c.q1_interior_min,
            q2_interior_min: c.q2_interior_min,
            edge_slopes: c.edge_slopes.clone(),
            gap_margin: c.gap_margin,
            isolated_point_flag: c.isolated_point_flag,
            valid: c.valid,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceEcho {
    pub genus: usize,
    pub tau_im: Vec<f64>,
    pub tau_asymmetry: f64,
    pub tau_real_part: f64,
    pub positive_definite: bool,
    pub a_normalization_residual: f64,
    pub gap_zero_theta: f64,
    pub orientation_flipped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificates {
    pub kkt_residual: f64,
    pub solver_iterations: usize,
    pub interval: (f64, f64),
    pub grid_edges: Vec<f64>,
    pub edges: Vec<f64>,
    pub saturated_gaps: Vec<bool>,
    pub lagrange_l_grid: f64,
    pub lagrange_l: f64,
    pub analytic_residual: f64,
    pub regularity: RegularityEcho,
    pub surface: SurfaceEcho,
    pub valid: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub config: RunConfig,
    pub certificates: Certificates,
    pub records: Vec<Record>,
    pub fits: Vec<FitRecord>,
}

impl ValidationReport {
    pub fn records_for<'a>(&'a self, quantity: &'a str) -> impl Iterator<Item = &'a Record> + 'a {
        self.records.iter().filter(move |r| r.quantity == quantity)
    }

    pub fn fit(&self, quantity: &str) -> Option<&FitRecord> {
        self.fits.iter().find(|f| f.quantity == quantity && f.location.is_none())
    }
}

/// Solved equilibrium problem with every derived structure the comparisons need.
#[derive(Debug, Clone)]
pub struct Solved {
    pub potential: Potential,
    pub measure: EquilibriumMeasure,
    pub classification: Classification,
    pub regularity: RegularityCertificate,
    pub model: AsymptoticModel,
}

pub fn solve_stage(config: &RunConfig) -> Result<Solved, PipelineError> {
    config.validate()?;
    let v = config.potential.build().stage(Stage::Potential)?;
    let opts = SolverOptions {
        tol_kkt: config.tolerances.kkt,
        ..SolverOptions::default()
    };
    let measure = solve_equilibrium_auto(&v, config.grid_size, &opts).stage(Stage::Equilibrium)?;
    let classification = classify_regions(&measure, config.tolerances.band).stage(Stage::Equilibrium)?;
    let fits = refine_edges(&measure, &classification).stage(Stage::Equilibrium)?;
    let regularity = certify_regularity(&measure, &classification, &fits);
    let guess: Vec<f64> = fits.iter().map(|f| f.x).collect();
    let bands = BandStructure::solve(&v, &guess, &classification.saturated(), config.quadrature_nodes)
        .stage(Stage::Refinement)?;
    let aopts = AsymptoticOptions {
        margin: config.tolerances.margin,
        shift_reading: config.shift_reading.into(),
        theta_eps: config.tolerances.theta_tail,
        surface_nodes: config.quadrature_nodes.min(256),
        ..AsymptoticOptions::default()
    };
    let model = AsymptoticModel::new(bands, aopts).stage(Stage::Surface)?;
    Ok(Solved {
        potential: v,
        measure,
        classification,
        regularity,
        model,
    })
}

fn certificates(s: &Solved, tol_kkt: f64) -> Result<Certificates, PipelineError> {
    let sd = &s.model.surface;
    let (asym, re, pd) = sd.tau_checks();
    let g = sd.genus();
    let mut gap_zero_theta = 0.0f64;
    for &x in &sd.gap_zeros {
        let u = sd.abel_raw(C64::new(x, 0.0), Side::Above).stage(Stage::Surface)?;
        let arg: Vec<C64> = (0..g).map(|k| u[k] - sd.d[k]).collect();
        gap_zero_theta = gap_zero_theta.max(s.model.theta.theta(&arg).stage(Stage::Surface)?.norm());
    }
    let b = s.model.bands();
    let analytic_residual = b.residuals().iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let surface = SurfaceEcho {
        genus: g,
        tau_im: sd.tau.data.iter().map(|t| t.im).collect(),
        tau_asymmetry: asym,
        tau_real_part: re,
        positive_definite: pd,
        a_normalization_residual: sd.a_normalization_residual(),
        gap_zero_theta,
        orientation_flipped: sd.orientation_flipped,
    };
    let valid = s.measure.kkt_residual <= tol_kkt
        && s.regularity.valid
        && analytic_residual < 1e-8
        && pd
        && asym < 1e-10
        && re < 1e-10
        && surface.a_normalization_residual < 1e-8
        && gap_zero_theta < 1e-8;
    Ok(Certificates {
        kkt_residual: s.measure.kkt_residual,
        solver_iterations: s.measure.iterations,
        interval: s.measure.interval,
        grid_edges: s.classification.edges.clone(),
        edges: b.edges().to_vec(),
        saturated_gaps: b.saturated().to_vec(),
        lagrange_l_grid: s.measure.lagrange_l,
        lagrange_l: b.lagrange_l(),
        analytic_residual,
        regularity: (&s.regularity).into(),
        surface,
        valid,
    })
}

struct Collector {
    n: usize,
    out: Vec<Record>,
}

impl Collector {
    #[allow(clippy::too_many_arguments)]
    fn push(&mut self, quantity: &str, z: C64, region: Region, exact: f64, asympt: f64, rel_err: f64) {
        if rel_err.is_finite() && exact.is_finite() && asympt.is_finite() {
            self.out.push(Record {
                quantity: quantity.into(),
                n: self.n,
                x_re: z.re,
                x_im: z.im,
                region,
                exact,
                asympt,
                rel_err,
            });
        }
    }
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Region of a real point according to the refined band structure.
pub fn region_at(b: &BandStructure, x: f64) -> Region {
    if b.band_of(x).is_some() {
        Region::Band
    } else if b.in_saturated(x) {
        Region::Saturated
    } else {
        Region::Void
    }
}

fn compare_n(
    config: &RunConfig,
    s: &Solved,
    n: usize,
) -> Result<Vec<Record>, PipelineError> {
    let v = &s.potential;
    let lat = build_lattice(v, n, n + 1).stage(Stage::Exact)?;
    let t = stieltjes_orthogonalize(&lat, v, n + 1).stage(Stage::Exact)?;
    let ctx = s.model.at(n).stage(Stage::Asymptotics)?;
    let mut c = Collector { n, out: Vec::new() };
    recurrence_records(&mut c, &t, &ctx)?;
    pointwise_records(&mut c, config, s, &t, &ctx)?;
    edge_records(&mut c, config, s, &t, &ctx)?;
    Ok(c.out)
}

fn recurrence_records(c: &mut Collector, t: &RecurrenceTable, ctx: &AsymptoticContext) -> Result<(), PipelineError> {
    let n = c.n;
    let nf = n as f64;
    let r = ctx.recurrence().stage(Stage::Asymptotics)?;
    let o = C64::new(0.0, 0.0);
    let g2 = t.gamma2[n];
    c.push("gamma2", o, Region::Global, g2, r.gamma2_n, (g2 / r.gamma2_n - 1.0).abs());
    let (a, b) = (t.log_h[n] / nf, r.h_n.ln() / nf);
    c.push("log_h/N", o, Region::Global, a, b, (a - b).abs());
    let (a, b) = (t.log_h[n - 1] / nf, r.h_n_minus_1.ln() / nf);
    c.push("log_h_prev/N", o, Region::Global, a, b, (a - b).abs());
    let (a, b) = (t.beta[n - 1], r.beta_n_minus_1);
    c.push("beta_prev", o, Region::Global, a, b, (a - b).abs());
    Ok(())
}

fn pointwise_records(
    c: &mut Collector,
    config: &RunConfig,
    s: &Solved,
    t: &RecurrenceTable,
    ctx: &AsymptoticContext,
) -> Result<(), PipelineError> {
    let n = c.n;
    let nf = n as f64;
    let b = s.model.bands();
    let e = b.edges().to_vec();
    let q = b.q();
    let pos = &config.sampling.positions;
    let near = config.tolerances.near_zero;

    // voids: exterior, interior gaps, complex probes
    let mut voids: Vec<C64> = vec![
        real(e[0] - config.sampling.exterior_offset),
        real(e[2 * q - 1] + config.sampling.exterior_offset),
    ];
    for j in 0..q - 1 {
        if !b.saturated()[j] {
            let (lo, hi) = (e[2 * j + 1], e[2 * j + 2]);
            voids.extend(pos.iter().map(|p| real(lo + p * (hi - lo))));
        }
    }
    voids.extend(config.sampling.complex_points.iter().map(|p| C64::new(p[0], p[1])));
    for z in voids {
        let asym = ctx.void(z).stage(Stage::Asymptotics)?;
        if z.im == 0.0 {
            let ex = t.eval(n, z.re);
            c.push("void", z, Region::Void, ex, asym.re, (ex / asym.re - 1.0).abs());
        } else {
            let ex = t.eval_c(n, z);
            c.push("void", z, Region::Void, ex.norm(), asym.norm(), (ex / asym - 1.0).norm());
        }
    }

    for k in 0..q {
        let (lo, hi) = (e[2 * k], e[2 * k + 1]);
        let cnt = count_zeros(t, n, lo, hi) as f64;
        let want = nf * b.mass(lo, hi);
        c.push("band_zeros", real(0.5 * (lo + hi)), Region::Band, cnt, want, (cnt - want).abs());
        for p in pos {
            let x = lo + p * (hi - lo);
            let Ok(bv) = ctx.band_detail(x) else { continue };
            if bv.value.abs() < near * bv.amplitude {
                continue;
            }
            let ex = t.eval(n, x);
            c.push("band", real(x), Region::Band, ex, bv.value, (ex / bv.value - 1.0).abs());
        }
    }

    for j in 0..q - 1 {
        if !b.saturated()[j] {
            continue;
        }
        let (lo, hi) = (e[2 * j + 1], e[2 * j + 2]);
        for p in pos {
            let x = lo + p * (hi - lo);
            let Ok(sd) = ctx.saturated_detail(x) else { continue };
            let (m1, _) = ctx.model_functions(real(x), Side::Above).stage(Stage::Asymptotics)?;
            if (0.5 * sd.oscillation).abs() < near || sd.amplitude.abs() < near * m1.norm() {
                continue;
            }
            let (lp, _) = t.eval_log(n, x);
            let l = s.model.gfun.log_potential_l(x);
            c.push("saturated_log_envelope", real(x), Region::Saturated, lp / nf, l, (lp / nf - l).abs());
            let ex = t.eval(n, x);
            c.push("saturated", real(x), Region::Saturated, ex, sd.value, (ex / sd.value - 1.0).abs());
        }
    }
    Ok(())
}

/// Bulk formula at `x` and its local amplitude, chosen by region.
fn bulk_at(ctx: &AsymptoticContext, b: &BandStructure, x: f64) -> Option<(f64, f64, Region)> {
    match region_at(b, x) {
        Region::Band => ctx.band_detail(x).ok().map(|v| (v.value, v.amplitude, Region::Band)),
        Region::Saturated => {
            let s = ctx.saturated_detail(x).ok()?;
            let (m1, _) = ctx.model_functions(real(x), Side::Above).ok()?;
            Some((s.value, 2.0 * s.log_envelope.exp() * m1.norm(), Region::Saturated))
        }
        _ => {
            let v = ctx.void(real(x)).ok()?;
            Some((v.re, v.norm(), Region::Void))
        }
    }
}

fn edge_records(
    c: &mut Collector,
    config: &RunConfig,
    s: &Solved,
    t: &RecurrenceTable,
    ctx: &AsymptoticContext,
) -> Result<(), PipelineError> {
    let n = c.n;
    let b = s.model.bands();
    for i in 0..b.edges().len() {
        let sat = b.edge_is_saturated(i);
        let (name, region) = if sat {
            ("edge_band_saturated", Region::EdgeBandSaturated)
        } else {
            ("edge_band_void", Region::EdgeBandVoid)
        };
        for &off in &config.sampling.edge_offsets {
            for tt in [-off, off] {
                let Ok(x) = ctx.edge_point(i, tt) else { continue };
                let d = ctx.edge_detail(i, real(x), Side::Above).stage(Stage::Asymptotics)?;
                let ex = t.eval(n, x);
                // off the band of a band-void edge nothing oscillates
                let scale = if !sat && tt > 0.0 { d.value.norm() } else { d.envelope };
                c.push(name, real(x), region, ex, d.value.re, (ex - d.value.re).abs() / scale);
            }
        }
        for &off in &config.sampling.overlap_offsets {
            for tt in [-off, off] {
                let Ok(x) = ctx.edge_point(i, tt) else { continue };
                let Some((bulk, amp, reg)) = bulk_at(ctx, b, x) else { continue };
                let d = ctx.edge_detail(i, real(x), Side::Above).stage(Stage::Asymptotics)?;
                c.push("edge_overlap", real(x), reg, d.value.re, bulk, (d.value.re - bulk).abs() / amp);
            }
        }
    }
    Ok(())
}

fn location_fits(records: &[Record], quantity: &str) -> Vec<FitRecord> {
    let mut by_loc: BTreeMap<(u64, u64), Vec<(usize, f64)>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.quantity == quantity) {
        by_loc.entry((r.x_re.to_bits(), r.x_im.to_bits())).or_default().push((r.n, r.rel_err));
    }
    by_loc
        .into_iter()
        .map(|((a, b), points)| {
            let fit = fit_slope(&points.iter().map(|&(n, e)| (n as f64, e)).collect::<Vec<_>>());
            FitRecord {
                quantity: quantity.into(),
                location: Some([f64::from_bits(a), f64::from_bits(b)]),
                points,
                fit,
            }
        })
        .collect()
}

fn mean_fit(records: &[Record], quantity: &str, ns: &[usize]) -> Option<FitRecord> {
    let points: Vec<(usize, f64)> = ns
        .iter()
        .filter_map(|&n| {
            let errs: Vec<f64> = records
                .iter()
                .filter(|r| r.quantity == quantity && r.n == n)
                .map(|r| r.rel_err)
                .collect();
            (!errs.is_empty()).then(|| (n, errs.iter().sum::<f64>() / errs.len() as f64))
        })
        .collect();
    if points.is_empty() {
        return None;
    }
    let fit = fit_slope(&points.iter().map(|&(n, e)| (n as f64, e)).collect::<Vec<_>>());
    Some(FitRecord {
        quantity: quantity.into(),
        location: None,
        points,
        fit,
    })
}

pub const FITTED_QUANTITIES: [&str; 10] = [
    "gamma2",
    "log_h/N",
    "log_h_prev/N",
    "beta_prev",
    "void",
    "band",
    "saturated",
    "saturated_log_envelope",
    "edge_band_void",
    "edge_band_saturated",
];

pub fn run_pipeline(config: &RunConfig) -> Result<ValidationReport, PipelineError> {
    let solved = solve_stage(config)?;
    run_with(config, &solved)
}

/// Comparisons for an already solved configuration.
pub fn run_with(config: &RunConfig, solved: &Solved) -> Result<ValidationReport, PipelineError> {
    let certificates = certificates(solved, config.tolerances.kkt)?;
    let per_n: Vec<Result<Vec<Record>, PipelineError>> = config
        .n_list
        .par_iter()
        .map(|&n| compare_n(config, solved, n))
        .collect();
    let mut records = Vec::new();
    for r in per_n {
        records.extend(r?);
    }
    records.sort_by(|a, b| {
        a.quantity
            .cmp(&b.quantity)
            .then(a.n.cmp(&b.n))
            .then(a.x_re.total_cmp(&b.x_re))
            .then(a.x_im.total_cmp(&b.x_im))
    });
    let mut fits = Vec::new();
    for q in FITTED_QUANTITIES {
        fits.extend(mean_fit(&records, q, &config.n_list));
    }
    fits.extend(mean_fit(&records, "edge_overlap", &config.n_list));
    fits.extend(location_fits(&records, "void"));
    Ok(ValidationReport {
        config: config.clone(),
        certificates,
        records,
        fits,
    })
}

/// Phase `Nπφ(x)` of the band formula, exposed for reports.
pub fn band_phase(s: &Solved, n: usize, x: f64) -> f64 {
    n as f64 * PI * s.model.gfun.phase_phi(x)
}
