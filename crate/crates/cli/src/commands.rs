use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use bayes_exec_core::costs::sample_intervals;
use bayes_exec_core::{
    cost_report, deviation_test, el_residual, sample, solve, uniform_grid, EquilibriumSolution,
    Error, Firm, Scenario, VerificationReport,
};
use serde::Serialize;

use crate::config::RunConfig;
use crate::input::{load_scenario, scenario_to_csv};
use crate::output::{ensure_dir, fmt_f64, fmt_label, write_csv, write_json};
use crate::sweep::SweepSpec;

fn strategy_header(s: &Scenario) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    for prefix in ["s", "v"] {
        h.extend((1..=s.k()).map(|k| format!("{prefix}1_{k}")));
        h.extend((1..=s.m()).map(|m| format!("{prefix}2_{m}")));
    }
    h
}

fn write_strategies(path: &Path, sol: &EquilibriumSolution, points: usize) -> Result<PathBuf> {
    let tr = sample(sol, &uniform_grid(points))?;
    let rows: Vec<Vec<String>> = (0..points)
        .map(|j| {
            std::iter::once(tr.grid[j])
                .chain(tr.positions.iter().map(|p| p[j]))
                .chain(tr.rates.iter().map(|r| r[j]))
                .map(fmt_f64)
                .collect()
        })
        .collect();
    write_csv(path, &strategy_header(&sol.scenario), &rows)
}

#[derive(Serialize)]
struct Conditionals {
    firm1: Vec<Vec<f64>>,
    firm2: Vec<Vec<f64>>,
}

fn conditionals(s: &Scenario) -> Result<Conditionals> {
    let b = s.beliefs()?;
    Ok(Conditionals {
        firm1: b.p1.to_rows(),
        firm2: b.p2.to_rows(),
    })
}

#[derive(Serialize)]
struct SolutionSummary<'a> {
    mode: bayes_exec_core::Mode,
    labels: Option<&'a [String]>,
    targets: &'a [f64],
    conditionals: Conditionals,
    system_matrix: Vec<Vec<f64>>,
    initial_rates: &'a [f64],
    forcing: &'a [f64],
    el_residual: f64,
    boundary_error: f64,
    grid_points: usize,
    seed: u64,
    verification: Option<VerificationReport>,
}

/// Writes `strategies.csv`, `solution.json` and `scenario.csv`.
pub fn cmd_solve(scenario_path: &Path, cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    let (scenario, labels) = load_scenario(scenario_path)?;
    let sol = solve(&scenario, cfg.mode)?;
    ensure_dir(&cfg.output_dir)?;
    let grid = uniform_grid(cfg.grid_points);
    let verification = if cfg.verify_trials > 0 {
        Some(deviation_test(
            &sol,
            &scenario,
            cfg.verify_trials,
            1e-2,
            cfg.seed,
        )?)
    } else {
        None
    };
    let summary = SolutionSummary {
        mode: sol.mode,
        labels: labels.as_deref(),
        targets: &sol.targets,
        conditionals: conditionals(&scenario)?,
        system_matrix: sol.m.to_rows(),
        initial_rates: &sol.v0,
        forcing: &sol.c,
        el_residual: el_residual(&sol, &scenario, &grid)?,
        boundary_error: sol.boundary_error()?,
        grid_points: cfg.grid_points,
        seed: cfg.seed,
        verification,
    };
    let dir = &cfg.output_dir;
    let scenario_csv = dir.join("scenario.csv");
    std::fs::write(&scenario_csv, scenario_to_csv(&scenario)?)
        .with_context(|| format!("writing {}", scenario_csv.display()))?;
    Ok(vec![
        write_strategies(&dir.join("strategies.csv"), &sol, cfg.grid_points)?,
        write_json(&dir.join("solution.json"), &summary)?,
        scenario_csv,
    ])
}

/// Writes `costs.csv`: one row per active type pair and evaluation κ.
pub fn cmd_costs(scenario_path: &Path, cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    let (scenario, _) = load_scenario(scenario_path)?;
    let sol = solve(&scenario, cfg.mode)?;
    let rows = cost_report(&sol, &cfg.eval_kappas, cfg.normalized, cfg.quadrature)?;
    ensure_dir(&cfg.output_dir)?;
    let header = [
        "firm1_type",
        "firm2_type",
        "eval_kappa",
        "cost1",
        "exp1",
        "cost2",
        "exp2",
        "normalized",
    ];
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                (r.firm1_type + 1).to_string(),
                (r.firm2_type + 1).to_string(),
                fmt_f64(r.eval_kappa),
                fmt_f64(r.cost1),
                fmt_f64(r.exp1),
                fmt_f64(r.cost2),
                fmt_f64(r.exp2),
                r.normalized.to_string(),
            ]
        })
        .collect();
    Ok(vec![write_csv(
        &cfg.output_dir.join("costs.csv"),
        &header,
        &body,
    )?])
}

/// Writes `cumulative_k{k}_m{m}.csv` for every active type pair, with the
/// cost-to-date of both firms under each evaluation κ.
pub fn cmd_cumulative(scenario_path: &Path, cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    let (scenario, _) = load_scenario(scenario_path)?;
    let sol = solve(&scenario, cfg.mode)?;
    if cfg.normalized {
        for firm in [Firm::One, Firm::Two] {
            if let Some(i) = scenario.types(firm).iter().position(|t| t.target == 0.0) {
                return Err(Error::Normalization {
                    firm: firm.number(),
                    index: i,
                }
                .into());
            }
        }
    }
    let grid = uniform_grid(cfg.grid_points);
    let samples = sample_intervals(&sol, &grid, cfg.quadrature)?;
    ensure_dir(&cfg.output_dir)?;
    let k = scenario.k();
    let mut written = Vec::new();
    for i in 0..k {
        for j in 0..scenario.m() {
            let (s1, s2) = (i, k + j);
            let (n1, n2) = if cfg.normalized {
                (
                    scenario.firm1_types[i].target,
                    scenario.firm2_types[j].target,
                )
            } else {
                (1.0, 1.0)
            };
            let mut header = vec!["t".to_string()];
            let mut columns = Vec::new();
            for &ke in &cfg.eval_kappas {
                header.push(format!("cost1_eval{}", fmt_label(ke)));
                header.push(format!("cost2_eval{}", fmt_label(ke)));
                columns.push((samples.cumulative(s1, s2, ke).values, n1));
                columns.push((samples.cumulative(s2, s1, ke).values, n2));
            }
            let rows: Vec<Vec<String>> = (0..grid.len())
                .map(|r| {
                    std::iter::once(fmt_f64(grid[r]))
                        .chain(columns.iter().map(|(c, n)| fmt_f64(c[r] / n)))
                        .collect()
                })
                .collect();
            let path = cfg
                .output_dir
                .join(format!("cumulative_k{}_m{}.csv", i + 1, j + 1));
            written.push(write_csv(&path, &header, &rows)?);
        }
    }
    Ok(written)
}

#[derive(Serialize)]
struct SweepEntry {
    index: usize,
    value: f64,
    file: String,
    prior: Vec<Vec<f64>>,
    conditionals: Conditionals,
    targets: Vec<f64>,
    boundary_error: f64,
}

#[derive(Serialize)]
struct SweepIndex {
    path: String,
    mode: bayes_exec_core::Mode,
    grid_points: usize,
    entries: Vec<SweepEntry>,
}

/// Writes `sweep_{i}.csv` strategies for every value plus `index.json`.
pub fn cmd_sweep(scenario_path: &Path, spec: &SweepSpec, cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    if spec.values.is_empty() {
        return Err(Error::Argument("sweep needs at least one value".into()).into());
    }
    let (base, _) = load_scenario(scenario_path)?;
    let variants = spec
        .values
        .iter()
        .map(|&v| {
            spec.path
                .apply(&base, v)
                .with_context(|| format!("{} = {v}", spec.path))
        })
        .collect::<Result<Vec<_>>>()?;
    ensure_dir(&cfg.output_dir)?;
    let mut written = Vec::new();
    let mut entries = Vec::new();
    for (i, (scenario, &value)) in variants.iter().zip(&spec.values).enumerate() {
        let sol = solve(scenario, cfg.mode).with_context(|| format!("{} = {value}", spec.path))?;
        let file = format!("sweep_{:03}.csv", i + 1);
        written.push(write_strategies(
            &cfg.output_dir.join(&file),
            &sol,
            cfg.grid_points,
        )?);
        entries.push(SweepEntry {
            index: i + 1,
            value,
            file,
            prior: scenario.prior.to_rows(),
            conditionals: conditionals(scenario)?,
            targets: sol.targets.clone(),
            boundary_error: sol.boundary_error()?,
        });
    }
    let index = SweepIndex {
        path: spec.path.to_string(),
        mode: cfg.mode,
        grid_points: cfg.grid_points,
        entries,
    };
    written.push(write_json(&cfg.output_dir.join("index.json"), &index)?);
    Ok(written)
}
