//! Sweep evaluation for each subcommand.

use lzbounded::analytic::{evolve_on_grid, uniform_grid};
use lzbounded::approx::{approximation_report, lz_validity_window, crossover_time};
use lzbounded::observables::{final_infidelity_with, find_infidelity_zeros_with};
use lzbounded::oracle::compare_series;
use lzbounded::specfun::{hyp2f1_wronskian_residual, pcf_wronskian_residual};
use lzbounded::{evolve_series_with, Complex64, Error, PathSpec, SolverKind, SolverOptions, Variant};
use rayon::prelude::*;
use serde::Serialize;

use crate::output::{CrossoverRow, EvolveRow, FinalRow, ZeroRow};

/// Every (path, x0, z0, T) combination, in row-major order.
pub fn cells(paths: &[Variant], x0: &[f64], z0: &[f64], durations: &[f64]) -> Result<Vec<PathSpec>, Error> {
    let mut out = Vec::with_capacity(paths.len() * x0.len() * z0.len() * durations.len());
    for &v in paths {
        for &x in x0 {
            for &z in z0 {
                for &t in durations {
                    out.push(PathSpec::new(v, x, z, t)?);
                }
            }
        }
    }
    Ok(out)
}

fn flatten<R>(parts: Vec<Result<Vec<R>, Error>>) -> Result<Vec<R>, Error> {
    let mut rows = Vec::new();
    for p in parts {
        rows.extend(p?);
    }
    Ok(rows)
}

pub fn evolve(specs: &[PathSpec], samples: usize, solver: SolverKind, opts: &SolverOptions) -> Result<Vec<EvolveRow>, Error> {
    let parts = specs
        .par_iter()
        .map(|s| {
            let series = evolve_series_with(s, samples, solver, opts)?;
            if solver == SolverKind::Auto && series.solver == SolverKind::Oracle {
                log::info!("{} ({}, {}, {}) fell back to the oracle", s.variant, s.x0, s.z0, s.duration);
            }
            Ok(series
                .times
                .iter()
                .zip(&series.amplitudes)
                .zip(&series.infidelity)
                .map(|((&t, a), &i)| EvolveRow {
                    path: s.variant.to_string(),
                    x0: s.x0,
                    z0: s.z0,
                    duration: s.duration,
                    t,
                    a0_re: a.a0.re,
                    a0_im: a.a0.im,
                    a1_re: a.a1.re,
                    a1_im: a.a1.im,
                    infidelity: i,
                    solver: series.solver.to_string(),
                })
                .collect())
        })
        .collect();
    flatten(parts)
}

pub fn final_rows(specs: &[PathSpec], solver: SolverKind, opts: &SolverOptions) -> Result<Vec<FinalRow>, Error> {
    specs
        .par_iter()
        .map(|s| {
            let report = approximation_report(s);
            let window = report.lz_window.bounds();
            Ok(FinalRow {
                path: s.variant.to_string(),
                x0: s.x0,
                z0: s.z0,
                duration: s.duration,
                i_exact: final_infidelity_with(s, solver, opts)?,
                i_lz: report.lz_value,
                i_apt: report.apt_value,
                apt_envelope: report.apt_envelope,
                t_minus: window.map(|w| w.0),
                t_plus: window.map(|w| w.1),
                t_c: report.crossover_time,
            })
        })
        .collect()
}

pub fn zeros(
    specs: &[PathSpec],
    solver: SolverKind,
    zero_tol: Option<f64>,
    opts: &SolverOptions,
) -> Result<Vec<ZeroRow>, Error> {
    let parts = specs
        .par_iter()
        .map(|s| {
            let list = find_infidelity_zeros_with(s, solver, zero_tol, opts)?;
            Ok(list
                .points
                .iter()
                .enumerate()
                .map(|(k, p)| ZeroRow {
                    path: s.variant.to_string(),
                    x0: s.x0,
                    z0: s.z0,
                    duration: s.duration,
                    k,
                    t_k: p.t,
                    infidelity: p.value,
                })
                .collect())
        })
        .collect();
    flatten(parts)
}

pub fn crossover(x0: &[f64], z0: &[f64]) -> Vec<CrossoverRow> {
    let mut rows = Vec::new();
    for &x in x0 {
        for &z in z0 {
            let window = lz_validity_window(x, z).bounds();
            rows.push(CrossoverRow {
                x0: x,
                z0: z,
                t_minus: window.map(|w| w.0),
                t_plus: window.map(|w| w.1),
                t_c: crossover_time(x, z),
            });
        }
    }
    rows
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Thresholds {
    pub deviation: f64,
    pub norm_drift: f64,
    pub wronskian: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CellFailure {
    pub path: String,
    pub x0: f64,
    pub z0: f64,
    #[serde(rename = "T")]
    pub duration: f64,
    pub error: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct PathSummary {
    pub path: String,
    pub cells: usize,
    pub max_deviation: f64,
    pub max_norm_drift_analytic: f64,
    pub max_norm_drift_oracle: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct WronskianSummary {
    pub pcf_samples: usize,
    pub pcf_max_residual: f64,
    pub hyp2f1_samples: usize,
    pub hyp2f1_max_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub pass: bool,
    pub samples: usize,
    pub oracle_rel_tol: f64,
    pub oracle_abs_tol: f64,
    pub thresholds: Thresholds,
    pub paths: Vec<PathSummary>,
    pub wronskian: WronskianSummary,
    pub failures: Vec<CellFailure>,
}

struct CellResult {
    deviation: f64,
    drift_analytic: f64,
    drift_oracle: f64,
    pcf: Option<f64>,
    hyp: Option<f64>,
}

fn validate_cell(s: &PathSpec, samples: usize, opts: &SolverOptions) -> Result<CellResult, Error> {
    let grid = uniform_grid(s.duration, samples);
    let exact = evolve_on_grid(s, &grid, SolverKind::Analytic, opts)?;
    let oracle = evolve_on_grid(s, &grid, SolverKind::Oracle, opts)?;
    let mut pcf = None;
    let mut hyp = None;
    match s.variant {
        Variant::A => {
            let eta = Complex64::new(0.0, 0.25 * s.x0 * s.x0 * s.duration / s.z0);
            let xi = Complex64::new(1.0, -1.0) * (0.5 * s.z0 * s.duration).sqrt();
            pcf = Some(pcf_wronskian_residual(eta, xi, &opts.series)?);
        }
        Variant::B => {
            let a = Complex64::new(0.0, -s.x0 * s.duration / (4.0 * s.alpha0()));
            let q0 = (s.x0 / s.r0()).powi(2);
            hyp = Some(hyp2f1_wronskian_residual(a, a, 0.5 + 2.0 * a, q0, &opts.series)?);
        }
        Variant::C => {}
    }
    Ok(CellResult {
        deviation: compare_series(&exact, &oracle)?,
        drift_analytic: exact.norm_drift,
        drift_oracle: oracle.norm_drift,
        pcf,
        hyp,
    })
}

pub fn validate(specs: &[PathSpec], samples: usize, opts: &SolverOptions, thresholds: Thresholds) -> ValidationReport {
    let results: Vec<_> = specs.par_iter().map(|s| validate_cell(s, samples, opts)).collect();
    let mut paths: Vec<PathSummary> = Vec::new();
    let mut failures = Vec::new();
    let mut wronskian = WronskianSummary {
        pcf_samples: 0,
        pcf_max_residual: 0.0,
        hyp2f1_samples: 0,
        hyp2f1_max_residual: 0.0,
    };
    for (s, r) in specs.iter().zip(results) {
        let name = s.variant.to_string();
        let idx = match paths.iter().position(|p| p.path == name) {
            Some(i) => i,
            None => {
                paths.push(PathSummary {
                    path: name.clone(),
                    cells: 0,
                    max_deviation: 0.0,
                    max_norm_drift_analytic: 0.0,
                    max_norm_drift_oracle: 0.0,
                });
                paths.len() - 1
            }
        };
        let summary = &mut paths[idx];
        summary.cells += 1;
        match r {
            Ok(c) => {
                summary.max_deviation = summary.max_deviation.max(c.deviation);
                summary.max_norm_drift_analytic = summary.max_norm_drift_analytic.max(c.drift_analytic);
                summary.max_norm_drift_oracle = summary.max_norm_drift_oracle.max(c.drift_oracle);
                if let Some(v) = c.pcf {
                    wronskian.pcf_samples += 1;
                    wronskian.pcf_max_residual = wronskian.pcf_max_residual.max(v);
                }
                if let Some(v) = c.hyp {
                    wronskian.hyp2f1_samples += 1;
                    wronskian.hyp2f1_max_residual = wronskian.hyp2f1_max_residual.max(v);
                }
            }
            Err(e) => failures.push(CellFailure {
                path: name,
                x0: s.x0,
                z0: s.z0,
                duration: s.duration,
                error: e.to_string(),
            }),
        }
    }
    let pass = failures.is_empty()
        && paths.iter().all(|p| {
            p.max_deviation < thresholds.deviation
                && p.max_norm_drift_analytic < thresholds.norm_drift
                && p.max_norm_drift_oracle < thresholds.norm_drift
        })
        && wronskian.pcf_max_residual < thresholds.wronskian
        && wronskian.hyp2f1_max_residual < thresholds.wronskian;
    ValidationReport {
        pass,
        samples,
        oracle_rel_tol: opts.integrator.rel_tol,
        oracle_abs_tol: opts.integrator.abs_tol,
        thresholds,
        paths,
        wronskian,
        failures,
    }
}
