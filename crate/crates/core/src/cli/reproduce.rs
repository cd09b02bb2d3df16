//! The three worked examples: error surfaces plus a JSON summary.

use std::path::Path;

use serde::Serialize;

use super::{write_file, CliError, ParamsConfig, Preset, RunConfig};
use crate::analysis::ErrorSurface;
use crate::bivariate::{BivariateOperator, BivariateParams};
use crate::field::ScalarField;

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub label: String,
    pub file: String,
    pub params: ParamsConfig,
    pub max_error: f64,
    pub mean_error: f64,
    pub grid: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReproduceSummary {
    pub preset: String,
    pub function: String,
    pub runs: Vec<RunSummary>,
    /// Example 1: largest pointwise gap between the two error surfaces.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub surfaces_linf_distance: Option<f64>,
    /// Example 2: whether the larger degree has the smaller maximum error.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub higher_degree_smaller_max_error: Option<bool>,
    /// Example 3: label of the run with the smaller mean error.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub smaller_mean_error: Option<String>,
    #[serde(skip)]
    pub files: Vec<String>,
}

struct Setting {
    label: &'static str,
    degree: usize,
    alphas: (f64, f64),
    betas: (f64, f64),
}

fn settings(preset: Preset) -> (&'static str, Vec<Setting>) {
    match preset {
        Preset::Example1 => (
            "example1",
            vec![
                Setting {
                    label: "alpha_0.8_0.8",
                    degree: 25,
                    alphas: (0.8, 0.8),
                    betas: (0.5, 0.5),
                },
                Setting {
                    label: "alpha_0.3_0.4",
                    degree: 25,
                    alphas: (0.3, 0.4),
                    betas: (0.5, 0.5),
                },
            ],
        ),
        Preset::Example2 => (
            "example2",
            [20, 30]
                .into_iter()
                .map(|degree| Setting {
                    label: if degree == 20 { "n20" } else { "n30" },
                    degree,
                    alphas: (0.5, 0.4),
                    betas: (0.8, 0.8),
                })
                .collect(),
        ),
        Preset::Example3 => (
            "example3",
            vec![
                Setting {
                    label: "beta_0.5_0.4",
                    degree: 10,
                    alphas: (0.9, 0.8),
                    betas: (0.5, 0.4),
                },
                Setting {
                    label: "beta_0.3_0.3",
                    degree: 10,
                    alphas: (0.9, 0.8),
                    betas: (0.3, 0.3),
                },
            ],
        ),
    }
}

/// Writes one `x,y,value` surface per parameter setting and `summary.json`
/// into `dir`. Grid size and quadrature node count come from `cfg`.
pub fn reproduce(preset: Preset, cfg: &RunConfig, dir: &Path) -> Result<ReproduceSummary, CliError> {
    if cfg.grid < 2 {
        return Err(CliError::Config(format!("grid must be at least 2, got {}", cfg.grid)));
    }
    let (name, settings) = settings(preset);
    let f = ScalarField::builtin(name).expect("presets use catalog functions");
    let formula = crate::field::catalog()
        .iter()
        .find(|b| b.name == name)
        .map_or(name, |b| b.formula);

    let mut surfaces = Vec::new();
    let mut runs = Vec::new();
    let mut files = Vec::new();
    for s in &settings {
        let params = BivariateParams::new(s.degree, s.degree, s.alphas.0, s.alphas.1, s.betas.0, s.betas.1)?
            .with_quad_nodes(cfg.params.quad_nodes)?;
        let op = BivariateOperator::new(&params)?;
        let surface = ErrorSurface::compute(&op, &f, cfg.grid)?;
        let file = format!("{}.csv", s.label);
        write_file(&dir.join(&file), &surface.to_csv())?;
        runs.push(RunSummary {
            label: s.label.to_string(),
            file: file.clone(),
            params: ParamsConfig::from_bivariate(&params),
            max_error: surface.max_error(),
            mean_error: surface.mean_error(),
            grid: cfg.grid,
        });
        files.push(file);
        surfaces.push(surface);
    }

    let mut summary = ReproduceSummary {
        preset: name.to_string(),
        function: formula.to_string(),
        runs,
        surfaces_linf_distance: None,
        higher_degree_smaller_max_error: None,
        smaller_mean_error: None,
        files: Vec::new(),
    };
    match preset {
        Preset::Example1 => {
            summary.surfaces_linf_distance = Some(surfaces[0].linf_distance(&surfaces[1])?);
        }
        Preset::Example2 => {
            summary.higher_degree_smaller_max_error =
                Some(summary.runs[1].max_error < summary.runs[0].max_error);
        }
        Preset::Example3 => {
            let best = if summary.runs[0].mean_error <= summary.runs[1].mean_error { 0 } else { 1 };
            summary.smaller_mean_error = Some(summary.runs[best].label.clone());
        }
    }

    let mut text = serde_json::to_string_pretty(&summary)
        .map_err(|e| CliError::Config(format!("cannot serialize summary: {e}")))?;
    text.push('\n');
    write_file(&dir.join("summary.json"), &text)?;
    files.push("summary.json".to_string());
    summary.files = files;
    Ok(summary)
}
