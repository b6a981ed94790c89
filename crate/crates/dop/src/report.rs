//! CSV/JSON emission and plotting grids.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use dop_core::{Side, C64};

use crate::error::PipelineError;
use crate::pipeline::{Record, Solved, ValidationReport};

pub const CSV_HEADER: [&str; 8] = ["quantity", "N", "x_re", "x_im", "region", "exact", "asympt", "rel_err"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Both,
}

/// 15 significant digits.
pub fn fmt15(x: f64) -> String {
    format!("{x:.14e}")
}

fn out_err(path: &Path, e: impl std::fmt::Display) -> PipelineError {
    PipelineError::Output(format!("{}: {e}", path.display()))
}

pub fn write_csv<W: Write>(records: &[Record], w: W) -> csv::Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(CSV_HEADER)?;
    for r in records {
        wr.write_record([
            r.quantity.clone(),
            r.n.to_string(),
            fmt15(r.x_re),
            fmt15(r.x_im),
            r.region.as_str().to_string(),
            fmt15(r.exact),
            fmt15(r.asympt),
            fmt15(r.rel_err),
        ])?;
    }
    wr.flush()?;
    Ok(())
}

pub fn to_json(report: &ValidationReport) -> String {
    serde_json::to_string_pretty(report).expect("report serializes")
}

pub fn from_json(text: &str) -> serde_json::Result<ValidationReport> {
    serde_json::from_str(text)
}

/// Writes `records.csv` and/or `report.json` under `dir`, returning the paths written.
pub fn emit(report: &ValidationReport, dir: &Path, format: Format) -> Result<Vec<PathBuf>, PipelineError> {
    fs::create_dir_all(dir).map_err(|e| out_err(dir, e))?;
    let mut written = Vec::new();
    if matches!(format, Format::Csv | Format::Both) {
        let p = dir.join("records.csv");
        let f = fs::File::create(&p).map_err(|e| out_err(&p, e))?;
        write_csv(&report.records, f).map_err(|e| out_err(&p, e))?;
        written.push(p);
    }
    if matches!(format, Format::Json | Format::Both) {
        let p = dir.join("report.json");
        fs::write(&p, to_json(report)).map_err(|e| out_err(&p, e))?;
        written.push(p);
    }
    Ok(written)
}

/// Density, log-potential, effective potential and `g` on a uniform grid around the support,
/// plus the grid solution itself.
pub fn dump_grids(s: &Solved, dir: &Path, points: usize) -> Result<Vec<PathBuf>, PipelineError> {
    fs::create_dir_all(dir).map_err(|e| out_err(dir, e))?;
    let b = s.model.bands();
    let e = b.edges();
    let w = e[e.len() - 1] - e[0];
    let (lo, hi) = (e[0] - 0.5 * w, e[e.len() - 1] + 0.5 * w);
    let gf = &s.model.gfun;

    let p = dir.join("density.csv");
    let mut wr = csv::Writer::from_path(&p).map_err(|e| out_err(&p, e))?;
    let io = |e: csv::Error| out_err(&p, e);
    wr.write_record(["x", "rho", "log_potential", "effective", "g_re", "g_im"]).map_err(io)?;
    for k in 0..points {
        let x = lo + (hi - lo) * (k as f64 + 0.5) / points as f64;
        let g = gf.g_boundary(x, Side::Above);
        wr.write_record([
            fmt15(x),
            fmt15(b.rho(x)),
            fmt15(gf.log_potential_l(x)),
            fmt15(b.effective(x)),
            fmt15(g.re),
            fmt15(g.im),
        ])
        .map_err(io)?;
    }
    wr.flush().map_err(|e| out_err(&p, e))?;

    let q = dir.join("grid_solution.csv");
    let mut wr = csv::Writer::from_path(&q).map_err(|e| out_err(&q, e))?;
    let io = |e: csv::Error| out_err(&q, e);
    wr.write_record(["x", "rho", "effective"]).map_err(io)?;
    for ((x, r), f) in s.measure.grid.iter().zip(&s.measure.rho).zip(&s.measure.effective) {
        wr.write_record([fmt15(*x), fmt15(*r), fmt15(*f)]).map_err(io)?;
    }
    wr.flush().map_err(|e| out_err(&q, e))?;

    let r = dir.join("g_plane.csv");
    let mut wr = csv::Writer::from_path(&r).map_err(|e| out_err(&r, e))?;
    let io = |e: csv::Error| out_err(&r, e);
    wr.write_record(["x_re", "x_im", "g_re", "g_im"]).map_err(io)?;
    let side = (points as f64).sqrt().ceil() as usize;
    for i in 0..side {
        for j in 1..=side {
            let z = C64::new(lo + (hi - lo) * (i as f64 + 0.5) / side as f64, w * j as f64 / side as f64);
            if let Ok(g) = gf.g_eval(z) {
                wr.write_record([fmt15(z.re), fmt15(z.im), fmt15(g.re), fmt15(g.im)]).map_err(io)?;
            }
        }
    }
    wr.flush().map_err(|e| out_err(&r, e))?;
    Ok(vec![p, q, r])
}
