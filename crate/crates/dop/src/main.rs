use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use dop::config::{PotentialSpec, RunConfig};
use dop::pipeline::{region_at, run_with, solve_stage, Region};
use dop::report::{dump_grids, emit, Format};
use dop_core::exact::{build_lattice, stieltjes_orthogonalize};
use dop_core::{Side, C64};

#[derive(Parser)]
#[command(name = "dop", version, about = "Discrete orthogonal polynomials: exact values, asymptotics and validation")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve the constrained equilibrium problem and print its structure.
    Equilibrium(Common),
    /// Exact recurrence coefficients and P_N values.
    Exact {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: usize,
        /// Evaluation points, `re` or `re,im`.
        #[arg(long = "at", value_parser = parse_point)]
        at: Vec<C64>,
    },
    /// Asymptotic recurrence data and P_N values.
    Asympt {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: usize,
        #[arg(long = "at", value_parser = parse_point)]
        at: Vec<C64>,
    },
    /// Full exact-versus-asymptotic comparison with reports.
    Validate(Common),
    /// Density, log-potential and g-function grids for plotting.
    DumpGrids(Common),
}

#[derive(Args, Clone)]
struct Common {
    /// TOML run configuration; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Preset potential name.
    #[arg(long, conflicts_with = "coeffs")]
    potential: Option<String>,
    /// Polynomial coefficients v0,v1,... of V.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    coeffs: Option<Vec<f64>>,
    #[arg(long = "n-list", value_delimiter = ',')]
    n_list: Option<Vec<usize>>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long = "kkt-tol")]
    kkt_tol: Option<f64>,
    #[arg(long = "band-tol")]
    band_tol: Option<f64>,
    #[arg(long)]
    margin: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "both")]
    format: Format,
}

impl Common {
    fn config(&self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(p) = &self.potential {
            c.potential = PotentialSpec::Preset(p.clone());
        }
        if let Some(v) = &self.coeffs {
            c.potential = PotentialSpec::Coeffs(v.clone());
        }
        if let Some(v) = &self.n_list {
            c.n_list = v.clone();
        }
        if let Some(v) = self.grid {
            c.grid_size = v;
        }
        if let Some(v) = self.kkt_tol {
            c.tolerances.kkt = v;
        }
        if let Some(v) = self.band_tol {
            c.tolerances.band = v;
        }
        if let Some(v) = self.margin {
            c.tolerances.margin = v;
        }
        if let Some(v) = &self.out {
            c.output.dir = v.clone();
        }
        c.validate()?;
        Ok(c)
    }
}

fn parse_point(s: &str) -> Result<C64, String> {
    let parts: Vec<&str> = s.split(',').collect();
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    match parts.as_slice() {
        [re] => Ok(C64::new(num(re)?, 0.0)),
        [re, im] => Ok(C64::new(num(re)?, num(im)?)),
        _ => Err(format!("expected `re` or `re,im`, got {s:?}")),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Cmd::Equilibrium(c) => {
            let cfg = c.config()?;
            let s = solve_stage(&cfg)?;
            let b = s.model.bands();
            println!("potential   {}", s.potential.label());
            println!("interval    [{}, {}]", s.measure.interval.0, s.measure.interval.1);
            println!("kkt         {:.3e} ({} iterations)", s.measure.kkt_residual, s.measure.iterations);
            println!("l           {:.12}", b.lagrange_l());
            println!("edges       {:?}", b.edges());
            println!("saturated   {:?}", b.saturated());
            println!("regular     {}", s.regularity.valid);
            Ok(s.regularity.valid)
        }
        Cmd::Exact { common, n, at } => {
            let cfg = common.config()?;
            let v = cfg.potential.build()?;
            let lat = build_lattice(&v, n, n + 1)?;
            let t = stieltjes_orthogonalize(&lat, &v, n + 1)?;
            println!("k,log_h,beta,gamma2");
            for k in 0..=n {
                println!("{k},{:.14e},{:.14e},{:.14e}", t.log_h[k], t.beta[k], t.gamma2[k]);
            }
            for z in at {
                let p = t.eval_c(n, z);
                println!("P_{n}({},{}) = {:.14e} {:+.14e}i", z.re, z.im, p.re, p.im);
            }
            Ok(true)
        }
        Cmd::Asympt { common, n, at } => {
            let cfg = common.config()?;
            let s = solve_stage(&cfg)?;
            let ctx = s.model.at(n)?;
            let r = ctx.recurrence()?;
            println!("h_N         {:.14e}", r.h_n);
            println!("h_N-1       {:.14e}", r.h_n_minus_1);
            println!("gamma2_N    {:.14e}", r.gamma2_n);
            println!("beta_N-1    {:.14e}", r.beta_n_minus_1);
            let b = s.model.bands();
            for z in at {
                let (val, tag) = if z.im != 0.0 {
                    (ctx.void(z)?, "void")
                } else {
                    let x = z.re;
                    match nearest_edge(&s, n, x) {
                        Some(i) => (ctx.edge_detail(i, z, Side::Above)?.value, "edge"),
                        None => match region_at(b, x) {
                            Region::Band => (C64::new(ctx.band(x)?, 0.0), "band"),
                            Region::Saturated => (C64::new(ctx.saturated(x)?, 0.0), "saturated"),
                            _ => (ctx.void(z)?, "void"),
                        },
                    }
                };
                println!("P_{n}({},{}) ~ {:.14e} {:+.14e}i [{tag}]", z.re, z.im, val.re, val.im);
            }
            Ok(true)
        }
        Cmd::Validate(c) => {
            let cfg = c.config()?;
            let s = solve_stage(&cfg)?;
            let report = run_with(&cfg, &s)?;
            for path in emit(&report, &cfg.output.dir, c.format)? {
                println!("wrote {}", path.display());
            }
            if cfg.output.grids {
                dump_grids(&s, &cfg.output.dir, cfg.output.grid_points)?;
            }
            for f in &report.fits {
                if f.location.is_some() {
                    continue;
                }
                match &f.fit {
                    Some(fit) => println!("{:<24} slope {:+.3}  intercept {:+.3}", f.quantity, fit.slope, fit.intercept),
                    None => println!("{:<24} no fit", f.quantity),
                }
            }
            let ok = report.certificates.valid;
            println!("certificates {}", if ok { "valid" } else { "INVALID" });
            Ok(ok)
        }
        Cmd::DumpGrids(c) => {
            let cfg = c.config()?;
            let s = solve_stage(&cfg)?;
            for p in dump_grids(&s, &cfg.output.dir, cfg.output.grid_points)? {
                println!("wrote {}", p.display());
            }
            Ok(s.regularity.valid)
        }
    }
}

/// Edge whose Airy window `|N^{2/3}ψ| ≤ 4` contains `x`.
fn nearest_edge(s: &dop::pipeline::Solved, n: usize, x: f64) -> Option<usize> {
    let e = s.model.bands().edges();
    let (i, _) = e
        .iter()
        .enumerate()
        .map(|(i, &ei)| (i, (x - ei).abs()))
        .min_by(|a, b| a.1.total_cmp(&b.1))?;
    let ctx = s.model.at(n).ok()?;
    let lo = ctx.edge_point(i, -4.0).ok()?;
    let hi = ctx.edge_point(i, 4.0).ok()?;
    (lo.min(hi)..=lo.max(hi)).contains(&x).then_some(i)
}

