//! Acceptance run: one PASS/FAIL line per criterion. Exits non-zero when a
//! criterion fails that is not listed in `EXPECTED_FAIL`.

#[path = "../../dop-core/tests/common/mod.rs"]
mod common;

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use dop::config::{PotentialSpec, RunConfig};
use dop::pipeline::{run_with, solve_stage, Solved, ValidationReport};
use dop_core::airy::airy;
use dop_core::equilibrium::{classify_regions, refine_edges, solve_equilibrium_auto, SolverOptions};
use dop_core::exact::{
    build_lattice, count_zeros, count_zeros_open, stieltjes_orthogonalize, zeros_at, NODE_RESOLUTION,
};
use dop_core::theta::{build_surface, SurfaceData, ThetaEvaluator};
use dop_core::{Potential, Side, C64};

/// Criteria whose tolerance cannot be met by a faithful implementation:
/// 2 (the exact γ_N² for V = x² equals its limit to roundoff, so no rate exists)
/// and 8 (the two-term Airy expansion is only good to ~5e-5 at |z| = 12).
const EXPECTED_FAIL: [u8; 2] = [2, 8];

const LADDER: [usize; 4] = [8, 16, 32, 64];

struct Line {
    id: u8,
    pass: bool,
    detail: String,
}

struct Run {
    solved: Solved,
    report: ValidationReport,
}

fn run(preset: &str) -> Run {
    let cfg = RunConfig {
        potential: PotentialSpec::Preset(preset.into()),
        n_list: LADDER.to_vec(),
        ..RunConfig::default()
    };
    let solved = solve_stage(&cfg).unwrap_or_else(|e| panic!("{preset}: {e}"));
    let report = run_with(&cfg, &solved).unwrap_or_else(|e| panic!("{preset}: {e}"));
    Run { solved, report }
}

fn in_band(s: f64) -> bool {
    (-1.3..=-0.7).contains(&s)
}

fn slope_of(r: &ValidationReport, q: &str) -> f64 {
    r.fit(q).and_then(|f| f.fit.as_ref()).map_or(f64::NAN, |f| f.slope)
}

fn located_slope(r: &ValidationReport, q: &str, at: [f64; 2]) -> f64 {
    r.fits
        .iter()
        .find(|f| f.quantity == q && f.location.is_some_and(|l| (l[0] - at[0]).abs() < 1e-12 && l[1] == at[1]))
        .and_then(|f| f.fit.as_ref())
        .map_or(f64::NAN, |f| f.slope)
}

fn criterion_1() -> Line {
    let v = Potential::preset("gaussian").unwrap();
    let t0 = Instant::now();
    let m = solve_equilibrium_auto(&v, 2000, &SolverOptions::default()).unwrap();
    let c = classify_regions(&m, 1e-4).unwrap();
    let fits = refine_edges(&m, &c).unwrap();
    let secs = t0.elapsed().as_secs_f64();
    let r2 = 2f64.sqrt();
    let de = (fits[0].x + r2).abs().max((fits[1].x - r2).abs());
    let drho = (m.density_at(0.0) - r2 / PI).abs();
    Line {
        id: 1,
        pass: fits.len() == 2 && de <= 1e-3 && drho <= 1e-3 && m.kkt_residual <= 1e-6 && secs < 60.0,
        detail: format!(
            "edge err {de:.1e}, rho(0) err {drho:.1e}, kkt {:.1e}, {secs:.2} s at grid 2000",
            m.kkt_residual
        ),
    }
}

fn criterion_2(g: &Run) -> Line {
    let r = &g.report;
    let errs: Vec<f64> = r.records_for("gamma2").map(|x| x.rel_err).collect();
    let decreasing = errs.windows(2).all(|w| w[1] < w[0]);
    let slope = slope_of(r, "gamma2");
    let gamma_ok = decreasing && in_band(slope);
    let h_worst = r
        .records
        .iter()
        .filter(|x| x.quantity == "log_h/N" || x.quantity == "log_h_prev/N")
        .map(|x| x.rel_err / (5.0 / x.n as f64))
        .fold(0.0f64, f64::max);
    let errs_s: Vec<String> = errs.iter().map(|e| format!("{e:.1e}")).collect();
    Line {
        id: 2,
        pass: gamma_ok && h_worst <= 1.0,
        detail: format!(
            "gamma2 errors [{}] slope {slope:.2} (roundoff floor, no rate); h dev max {:.3} of 5/N",
            errs_s.join(", "),
            h_worst
        ),
    }
}

fn criterion_3(runs: &[(&str, &Run)]) -> Line {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, run) in runs {
        let bq = *run.solved.model.bands().edges().last().unwrap();
        let s_out = located_slope(&run.report, "void", [bq + 0.5, 0.0]);
        let s_2i = located_slope(&run.report, "void", [0.0, 2.0]);
        pass &= in_band(s_out) && in_band(s_2i);
        parts.push(format!("{name}: beta+0.5 {s_out:.3}, 2i {s_2i:.3}"));
    }
    Line { id: 3, pass, detail: format!("slopes {}", parts.join("; ")) }
}

fn criterion_4(required: &[(&str, &Run)], info: &[(&str, &Run)]) -> Line {
    let mut pass = true;
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for (name, run) in required.iter().chain(info) {
        for z in run.report.records_for("band_zeros") {
            worst = worst.max(z.rel_err);
        }
        let s = slope_of(&run.report, "band");
        if required.iter().any(|(n, _)| n == name) {
            pass &= in_band(s);
            parts.push(format!("{name} {s:.3}"));
        } else {
            parts.push(format!("{name} {s:.3} (not required)"));
        }
    }
    pass &= worst <= 2.0;
    Line {
        id: 4,
        pass,
        detail: format!("max |zeros - N mass| {worst:.2}; band slopes {}", parts.join(", ")),
    }
}

fn criterion_5(s: &Run) -> Line {
    let r = &s.report;
    let slope = slope_of(r, "saturated");
    let env = r
        .records_for("saturated_log_envelope")
        .map(|x| x.rel_err * x.n as f64 / 5.0)
        .fold(0.0f64, f64::max);
    let genus = r.certificates.surface.genus;
    Line {
        id: 5,
        pass: r.certificates.valid && genus == 1 && slope <= -0.7 && env <= 1.0,
        detail: format!("genus {genus}, saturated slope {slope:.3}, log envelope dev max {env:.3} of 5/N"),
    }
}

fn criterion_6(runs: &[(&str, &Run)]) -> Line {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, run) in runs {
        let over = run
            .report
            .records_for("edge_overlap")
            .map(|x| x.rel_err * x.n as f64 / 10.0)
            .fold(0.0f64, f64::max);
        let count = run.report.records_for("edge_overlap").count();
        let mut jump = 0.0f64;
        let mut finite = true;
        let b = run.solved.model.bands();
        for &n in &LADDER {
            let ctx = run.solved.model.at(n).unwrap();
            for i in 0..b.edges().len() {
                let mut vals = Vec::new();
                for t in [-1e-3, -1e-6, 1e-6, 1e-3] {
                    let x = ctx.edge_point(i, t).unwrap();
                    let d = ctx.edge_detail(i, C64::new(x, 0.0), Side::Above).unwrap();
                    finite &= d.value.re.is_finite() && d.envelope.is_finite();
                    vals.push((d.value.re, d.envelope));
                }
                jump = jump.max((vals[2].0 - vals[1].0).abs() / vals[1].1);
                jump = jump.max((vals[3].0 - vals[0].0).abs() / vals[0].1 / 1e2);
            }
        }
        pass &= count > 0 && over <= 1.0 && finite && jump <= 1e-2;
        parts.push(format!("{name}: overlap dev max {over:.3} of 10/N over {count} pts, jump across psi=0 {jump:.1e}"));
    }
    Line { id: 6, pass, detail: parts.join("; ") }
}

/// Largest violation of the two quasi-periodicity identities at a few points.
fn periodicity_residual(th: &ThetaEvaluator) -> f64 {
    let g = th.genus();
    let tau = th.tau();
    let mut worst = 0.0f64;
    for p in 0..4 {
        let s: Vec<C64> = (0..g)
            .map(|j| C64::new(0.13 * (p + j) as f64 - 0.2, 0.07 * (p as f64 - 1.5) + 0.05 * j as f64))
            .collect();
        let base = th.theta(&s).unwrap();
        for k in 0..g {
            let mut a = s.clone();
            a[k] += 1.0;
            worst = worst.max((th.theta(&a).unwrap() - base).norm() / base.norm());
            let b: Vec<C64> = (0..g).map(|j| s[j] + tau.get(j, k)).collect();
            let f = (C64::new(0.0, -PI) * tau.get(k, k) - C64::new(0.0, 2.0 * PI) * s[k]).exp();
            let lhs = th.theta(&b).unwrap();
            worst = worst.max((lhs - f * base).norm() / lhs.norm().max((f * base).norm()));
        }
    }
    worst
}

fn surface_suite(sd: &SurfaceData) -> (f64, f64, bool, f64, f64, f64) {
    let th = ThetaEvaluator::new(&sd.tau, 1e-16, 40).unwrap();
    let (asym, re, chol) = sd.tau_checks();
    let g = sd.genus();
    let mut zero = 0.0f64;
    for &x in &sd.gap_zeros {
        let u = sd.abel_raw(C64::new(x, 0.0), Side::Above).unwrap();
        let arg: Vec<C64> = (0..g).map(|k| u[k] - sd.d[k]).collect();
        zero = zero.max(th.theta(&arg).unwrap().norm());
    }
    (asym, re, chol, periodicity_residual(&th), zero, sd.a_normalization_residual())
}

fn criterion_7(runs: &[(&str, &Run)]) -> Line {
    let t0 = Instant::now();
    let mut cases: Vec<(String, SurfaceData)> = runs
        .iter()
        .map(|(name, r)| (name.to_string(), build_surface(r.solved.model.bands().edges(), 128).unwrap()))
        .collect();
    cases.push(("genus-2 edges".into(), build_surface(&[-2.0, -1.2, -0.5, 0.3, 0.9, 1.7], 128).unwrap()));
    let mut pass = true;
    let mut parts = Vec::new();
    let mut worst = [0.0f64; 5];
    let mut genus_max = 0;
    for (_, sd) in &cases {
        let (asym, re, chol, per, zero, anorm) = surface_suite(sd);
        pass &= asym <= 1e-10 && re <= 1e-10 && chol && per <= 1e-9 && zero <= 1e-8 && anorm <= 1e-8;
        for (w, v) in worst.iter_mut().zip([asym, re, per, zero, anorm]) {
            *w = w.max(v);
        }
        genus_max = genus_max.max(sd.genus());
        parts.push(sd.genus().to_string());
    }
    let secs = t0.elapsed().as_secs_f64();
    pass &= secs < 10.0;
    Line {
        id: 7,
        pass,
        detail: format!(
            "genera [{}]: tau asym {:.1e}, |Re tau| {:.1e}, periodicity {:.1e}, theta(u(x_j)-d) {:.1e}, A-norm {:.1e}, {secs:.2} s",
            parts.join(", "),
            worst[0],
            worst[1],
            worst[2],
            worst[3],
            worst[4]
        ),
    }
}

fn criterion_8() -> Line {
    const AI0: f64 = 0.355_028_053_887_817_239_26;
    const AIP0: f64 = -0.258_819_403_792_806_798_41;
    let p0 = airy(C64::new(0.0, 0.0));
    let d0 = (p0.ai.re - AI0).abs().max((p0.aip.re - AIP0).abs());

    let mut wr = 0.0f64;
    for i in 0..10 {
        for j in 0..10 {
            let z = C64::new(-9.0 + 2.0 * i as f64, -9.0 + 2.0 * j as f64);
            let p = airy(z);
            let w = p.ai * p.bip - p.aip * p.bi;
            let scale = (p.ai.norm() * p.bip.norm()).max(p.aip.norm() * p.bi.norm()).max(1.0 / PI);
            wr = wr.max((w - 1.0 / PI).norm() / scale);
        }
    }

    let mut two_term = 0.0f64;
    for k in -7..=7 {
        let z = C64::from_polar(12.0, k as f64 * PI / 8.0);
        let p = airy(z);
        let z32 = z.powf(1.5);
        let e = (-2.0 / 3.0 * z32).exp();
        let pre = 1.0 / (2.0 * PI.sqrt());
        let ai = pre * z.powf(-0.25) * e * (1.0 - 5.0 / 48.0 / z32);
        let aip = -pre * z.powf(0.25) * e * (1.0 + 7.0 / 48.0 / z32);
        two_term = two_term.max((ai / p.ai - 1.0).norm()).max((aip / p.aip - 1.0).norm());
    }
    Line {
        id: 8,
        pass: d0 <= 1e-12 && wr <= 1e-10 && two_term <= 1e-6,
        detail: format!(
            "Ai(0), Ai'(0) err {d0:.1e}; Wronskian err {wr:.1e} on 100 pts; two-term expansion at |z|=12 rel err {two_term:.1e} (target 1e-6)"
        ),
    }
}

fn criterion_9() -> Line {
    let mut pass = true;
    let mut checked = 0;
    let mut ties = 0;
    for name in ["gaussian", "saturated", "saturated6", "quartic"] {
        let v = Potential::preset(name).unwrap();
        for &n in &LADDER {
            let lat = build_lattice(&v, n, n).unwrap();
            let t = stieltjes_orthogonalize(&lat, &v, n).unwrap();
            let nodes: Vec<f64> = lat.nodes().collect();
            for deg in 1..=n {
                for w in nodes.windows(2) {
                    pass &= count_zeros_open(&t, deg, w[0], w[1], NODE_RESOLUTION) <= 1;
                }
                ties += nodes.iter().map(|&x| zeros_at(&t, deg, x, NODE_RESOLUTION)).sum::<usize>();
                pass &= count_zeros(&t, deg, f64::NEG_INFINITY, f64::INFINITY) == deg;
                checked += 1;
            }
        }
    }
    Line {
        id: 9,
        pass,
        detail: format!(
            "{checked} polynomials over 4 potentials, N up to 64; {ties} zeros within {NODE_RESOLUTION:e} of a node counted as ties"
        ),
    }
}

fn criterion_10() -> Line {
    let mut worst = 0.0f64;
    let pots = [
        Potential::preset("gaussian").unwrap(),
        Potential::preset("saturated").unwrap(),
        Potential::preset("quartic").unwrap(),
        Potential::new(&[0.0, 0.4, 1.0, -0.3, 0.5]).unwrap(),
    ];
    for v in &pots {
        for n in 1..=8 {
            let lat = build_lattice(v, n, 8).unwrap();
            let t = stieltjes_orthogonalize(&lat, v, 8).unwrap();
            let gs = common::gram_schmidt_dd(&lat, v, 8);
            for k in 0..=8 {
                worst = worst.max((t.log_h[k] - gs.log_h[k]).exp_m1().abs());
                let scale = common::jacobi_norm(&gs);
                worst = worst.max((t.beta[k] - gs.beta[k]).abs() / scale);
                if k > 0 {
                    worst = worst.max((t.gamma2[k] / gs.gamma2[k] - 1.0).abs());
                }
            }
        }
    }
    Line {
        id: 10,
        pass: worst <= 1e-10,
        detail: format!("max relative difference {worst:.1e} in h, beta, gamma2 (N, n <= 8)"),
    }
}

fn main() -> ExitCode {
    let t0 = Instant::now();
    let gaussian = run("gaussian");
    let saturated = run("saturated");
    let saturated6 = run("saturated6");
    let lines = vec![
        criterion_1(),
        criterion_2(&gaussian),
        criterion_3(&[("x^2", &gaussian), ("10x^2", &saturated)]),
        criterion_4(&[("x^2", &gaussian), ("10x^2", &saturated)], &[("6x^2", &saturated6)]),
        criterion_5(&saturated),
        criterion_6(&[("x^2", &gaussian), ("6x^2", &saturated6)]),
        criterion_7(&[("10x^2", &saturated), ("6x^2", &saturated6)]),
        criterion_8(),
        criterion_9(),
        criterion_10(),
    ];
    let mut unexpected = 0;
    println!();
    for l in &lines {
        let tag = match (l.pass, EXPECTED_FAIL.contains(&l.id)) {
            (true, _) => "PASS",
            (false, true) => "FAIL (expected)",
            (false, false) => {
                unexpected += 1;
                "FAIL"
            }
        };
        println!("criterion {:>2}: {tag:<15} {}", l.id, l.detail);
    }
    println!("acceptance finished in {:.1} s", t0.elapsed().as_secs_f64());
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
