use anyhow::Context;
use qprenorm_core::dynamics::{eps_ladder, richardson_intercept, richardson_slope, scan};
use qprenorm_core::families::Unforced;
use qprenorm_core::qprenorm::spectrum_sweep;
use qprenorm_core::{
    dr_spectrum, default_initial, slopes, solve_fixed_point, superstable_alpha, trace_boundary,
    Branch, Complex64, FixedPointArtifact, Flm, NormalizedFamily, RenormConfig,
};
use rayon::prelude::*;
use std::path::Path;

use crate::output::{num, Run, Table};
use crate::{CliError, Command, Common};

const FIXED_POINT_FILE: &str = "fixed_point.json";

pub fn dispatch(common: &Common, command: Command) -> anyhow::Result<()> {
    let cfg = load_config(common.config.as_deref())?;
    let out = common.out.as_path();
    match command {
        Command::FixedPoint => fixed_point(out, &cfg),
        Command::Spectrum { omega_grid, top, one_dim } => spectrum(out, &cfg, omega_grid, top, one_dim),
        Command::Superstable { n_max } => superstable(out, &cfg, n_max),
        Command::Slopes { n_max, unforced, family } => {
            slopes_cmd(out, &cfg, n_max, unforced, family.as_deref())
        }
        Command::Verify { n_max, tol, family } => verify(out, &cfg, n_max, tol, family.as_deref()),
        Command::Scan {
            n,
            alpha_min,
            alpha_max,
            alpha_steps,
            eps_min,
            eps_max,
            eps_steps,
            family,
        } => {
            let alphas = linspace("alpha", alpha_min, alpha_max, alpha_steps)?;
            let epss = linspace("eps", eps_min, eps_max, eps_steps)?;
            scan_cmd(out, &cfg, n, &alphas, &epss, family.as_deref())
        }
    }
}

fn load_config(path: Option<&Path>) -> anyhow::Result<RenormConfig> {
    let cfg = match path {
        None => RenormConfig::default(),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
        }
    };
    cfg.validate()?;
    Ok(cfg)
}

fn load_family(path: Option<&Path>) -> anyhow::Result<Flm> {
    match path {
        None => Ok(Flm::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
            Ok(serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?)
        }
    }
}

/// The fixed point written by `fixed-point`, checked against the configuration.
fn load_fixed_point(out: &Path, cfg: &RenormConfig) -> anyhow::Result<FixedPointArtifact> {
    let path = out.join(FIXED_POINT_FILE);
    if !path.exists() {
        return Err(CliError::MissingArtifact(format!(
            "{} not found; run `qprenorm fixed-point` first",
            path.display()
        ))
        .into());
    }
    let art = FixedPointArtifact::load(&path)?;
    if art.n_x != cfg.n_x || art.delta != cfg.delta {
        return Err(CliError::Config(format!(
            "{} was computed with n_x = {}, delta = {}; configuration has n_x = {}, delta = {}",
            path.display(),
            art.n_x,
            art.delta,
            cfg.n_x,
            cfg.delta
        ))
        .into());
    }
    Ok(art)
}

fn linspace(name: &str, lo: f64, hi: f64, steps: usize) -> anyhow::Result<Vec<f64>> {
    if steps == 0 || !(lo <= hi) {
        return Err(CliError::Config(format!("{name} grid needs steps >= 1 and min <= max")).into());
    }
    if steps == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..steps)
        .map(|j| lo + (hi - lo) * j as f64 / (steps - 1) as f64)
        .collect())
}

fn fixed_point(out: &Path, cfg: &RenormConfig) -> anyhow::Result<()> {
    let mut run = Run::new(out, "fixed-point", cfg)?;
    let fp = solve_fixed_point(&default_initial(cfg), cfg)?;
    let art = FixedPointArtifact::new(&fp, cfg)?;
    run.write(FIXED_POINT_FILE, &(art.to_json()? + "\n"))?;
    println!("a = {}", num(art.a));
    println!("residual = {:e}", art.residual);
    println!("iterations = {}", art.iterations);
    println!("delta = {}", num(art.feigenbaum_delta));
    run.finish()
}

fn eigen_cells(j: usize, z: Complex64) -> Vec<String> {
    vec![j.to_string(), num(z.re), num(z.im), num(z.norm())]
}

fn spectrum(out: &Path, cfg: &RenormConfig, grid: usize, top: usize, one_dim: bool) -> anyhow::Result<()> {
    if top == 0 {
        return Err(CliError::Config("--top must be positive".into()).into());
    }
    if grid == 0 {
        return Err(CliError::Config("--omega-grid must be positive".into()).into());
    }
    let art = load_fixed_point(out, cfg)?;
    let mut run = Run::new(out, if one_dim { "spectrum-one-dim" } else { "spectrum" }, cfg)?;
    if one_dim {
        let sp = dr_spectrum(&art.phi, cfg)?;
        let mut t = Table::new(&["index", "re", "im", "modulus"]);
        for (j, z) in sp.iter().take(top).enumerate() {
            t.row(&eigen_cells(j, *z));
        }
        run.table("dr_spectrum.csv", &t)?;
        println!("leading eigenvalue {}", num(sp[0].re));
    } else {
        let omegas: Vec<f64> = (0..grid).map(|j| j as f64 / grid as f64).collect();
        let sw = spectrum_sweep(&art.phi, &omegas, top, cfg)?;
        let mut t = Table::new(&["omega", "index", "re", "im", "modulus", "pair_defect"]);
        for ((w, ev), defect) in sw.omega_grid.iter().zip(&sw.eigenvalues).zip(&sw.pair_defect) {
            for (j, z) in ev.iter().take(top).enumerate() {
                let mut cells = vec![num(*w)];
                cells.extend(eigen_cells(j, *z));
                cells.push(num(*defect));
                t.row(&cells);
            }
        }
        run.table("spectrum_sweep.csv", &t)?;
        let worst = sw.pair_defect.iter().copied().fold(0.0, f64::max);
        println!("{grid} rotation numbers, worst conjugate-pair defect {worst:e}");
    }
    run.finish()
}

fn superstable(out: &Path, cfg: &RenormConfig, n_max: usize) -> anyhow::Result<()> {
    let mut run = Run::new(out, "superstable", cfg)?;
    let alphas: Vec<f64> = (0..=n_max).map(superstable_alpha).collect::<Result<_, _>>()?;
    let mut t = Table::new(&["n", "alpha", "ratio"]);
    for (n, a) in alphas.iter().enumerate() {
        // (alpha_n - alpha_{n-1}) / (alpha_{n+1} - alpha_n)
        let ratio = if n >= 1 && n < n_max {
            num((a - alphas[n - 1]) / (alphas[n + 1] - a))
        } else {
            String::new()
        };
        println!("{n:>3} {} {ratio}", num(*a));
        t.row(&[n.to_string(), num(*a), ratio]);
    }
    run.table("superstable.csv", &t)?;
    run.finish()
}

fn slopes_cmd(
    out: &Path,
    cfg: &RenormConfig,
    n_max: usize,
    unforced: bool,
    family: Option<&Path>,
) -> anyhow::Result<()> {
    if n_max == 0 {
        return Err(CliError::Config("--n-max must be at least 1".into()).into());
    }
    load_fixed_point(out, cfg)?;
    let flm = load_family(family)?;
    let fam: Box<dyn NormalizedFamily> = if unforced { Box::new(Unforced(flm)) } else { Box::new(flm) };
    let mut run = Run::new(out, "slopes", cfg)?;
    let results = (1..=n_max)
        .into_par_iter()
        .map(|n| slopes(n, cfg.omega, fam.as_ref(), cfg))
        .collect::<Result<Vec<_>, _>>()?;
    let mut t = Table::new(&[
        "n",
        "alpha_n",
        "slope_plus",
        "slope_minus",
        "theta_star_plus",
        "theta_star_minus",
        "degenerate",
    ]);
    for s in &results {
        println!("{:>3} {} {} {}", s.n, num(s.alpha_n), num(s.slope_plus), num(s.slope_minus));
        t.row(&[
            s.n.to_string(),
            num(s.alpha_n),
            num(s.slope_plus),
            num(s.slope_minus),
            num(s.theta_star_plus),
            num(s.theta_star_minus),
            s.degenerate.to_string(),
        ]);
    }
    run.table("slopes.csv", &t)?;
    run.finish()
}

struct Traced {
    slope: f64,
    intercept: f64,
    table: Table,
}

fn verify(out: &Path, cfg: &RenormConfig, n_max: usize, tol: f64, family: Option<&Path>) -> anyhow::Result<()> {
    if n_max == 0 {
        return Err(CliError::Config("--n-max must be at least 1".into()).into());
    }
    if !(tol > 0.0) {
        return Err(CliError::Config("--tol must be positive".into()).into());
    }
    load_fixed_point(out, cfg)?;
    let fam = load_family(family)?;
    let mut run = Run::new(out, "verify", cfg)?;
    let formulas = (1..=n_max)
        .into_par_iter()
        .map(|n| slopes(n, cfg.omega, &fam, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    let jobs: Vec<(usize, Branch)> = (1..=n_max)
        .flat_map(|n| [(n, Branch::Plus), (n, Branch::Minus)])
        .collect();
    let traced = jobs
        .par_iter()
        .map(|&(n, which)| -> anyhow::Result<Traced> {
            let alpha_n = formulas[n - 1].alpha_n;
            let pts = trace_boundary(n as u32, cfg.omega, &fam, &eps_ladder(n as u32), which, cfg)
                .with_context(|| format!("tracing n = {n}, {}", which.name()))?;
            let mut table = Table::new(&["eps", "alpha", "indicator_min", "indicator_max", "lyapunov"]);
            for p in &pts {
                table.row(&[num(p.eps), num(p.alpha), num(p.indicator_min), num(p.indicator_max), num(p.lyapunov)]);
            }
            Ok(Traced {
                slope: richardson_slope(alpha_n, &pts).0,
                intercept: richardson_intercept(&pts),
                table,
            })
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let mut t = Table::new(&[
        "n",
        "slope_formula_plus",
        "slope_dynamics_plus",
        "rel_err_plus",
        "slope_formula_minus",
        "slope_dynamics_minus",
        "rel_err_minus",
        "intercept_plus",
        "intercept_minus",
        "alpha_n",
    ]);
    let mut failed = Vec::new();
    println!("  n      formula+     dynamics+    rel_err+      formula-     dynamics-    rel_err-");
    for (n, s) in formulas.iter().enumerate().map(|(i, s)| (i + 1, s)) {
        let (plus, minus) = (&traced[2 * (n - 1)], &traced[2 * n - 1]);
        for (which, tr) in [("plus", plus), ("minus", minus)] {
            run.table(&format!("boundary_n{n}_{which}.csv"), &tr.table)?;
        }
        let rel_p = (plus.slope - s.slope_plus).abs() / s.slope_plus.abs();
        let rel_m = (minus.slope - s.slope_minus).abs() / s.slope_minus.abs();
        if !(rel_p <= tol && rel_m <= tol) {
            failed.push(n);
        }
        println!(
            "{n:>3} {:>13.6} {:>13.6} {:>11.2e} {:>13.6} {:>13.6} {:>11.2e}",
            s.slope_plus, plus.slope, rel_p, s.slope_minus, minus.slope, rel_m
        );
        t.row(&[
            n.to_string(),
            num(s.slope_plus),
            num(plus.slope),
            num(rel_p),
            num(s.slope_minus),
            num(minus.slope),
            num(rel_m),
            num(plus.intercept),
            num(minus.intercept),
            num(s.alpha_n),
        ]);
    }
    run.table("verify.csv", &t)?;
    run.finish()?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(format!("relative slope error above {tol} for n = {failed:?}")).into())
    }
}

fn scan_cmd(
    out: &Path,
    cfg: &RenormConfig,
    n: u32,
    alphas: &[f64],
    epss: &[f64],
    family: Option<&Path>,
) -> anyhow::Result<()> {
    let fam = load_family(family)?;
    let mut run = Run::new(out, "scan", cfg)?;
    let pts = scan(&fam, cfg.omega, n, alphas, epss, cfg);
    let mut t = Table::new(&["alpha", "eps", "indicator_min", "indicator_max", "lyapunov", "classification"]);
    for p in &pts {
        t.row(&[
            num(p.alpha),
            num(p.eps),
            num(p.indicator_min),
            num(p.indicator_max),
            num(p.lyapunov),
            p.classification.name().to_string(),
        ]);
    }
    run.table("scan.csv", &t)?;
    println!("{} grid points", pts.len());
    run.finish()
}
