//! The five run modes. Each returns its artifacts in memory; nothing is
//! written until every artifact has been computed.

use std::fmt::Write as _;
use std::time::Instant;

use intertopo::complex::vr_filtration;
use intertopo::export;
use intertopo::field::{Coefficients, F2};
use intertopo::homology::{persistent_barcode, persistent_barcode_over, wu_of_complex, Barcode};
use intertopo::interaction::{enumerate_cells, GradedBasis};
use intertopo::spectral::{
    classic_laplacian_curve, gap_curve, pairs_curve, snapshot_curve, CurveGrid, SpectrumSeries, ZeroTolerance,
};
use serde_json::Value;

use crate::config::{Mode, RunConfig};
use crate::input::Source;
use crate::CliError;

/// One output file.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

impl Artifact {
    fn new(name: impl Into<String>, contents: impl Into<String>) -> Self {
        Self { name: name.into(), contents: contents.into() }
    }

    fn json(name: impl Into<String>, value: &Value) -> Self {
        Self::new(name, serde_json::to_string_pretty(value).expect("json values serialize") + "\n")
    }
}

fn internal(e: impl std::fmt::Display) -> CliError {
    CliError::Internal(e.to_string())
}

pub fn execute(cfg: &RunConfig, source: &Source) -> Result<Vec<Artifact>, CliError> {
    match cfg.mode {
        Mode::Barcode => cmd_barcode(cfg, source),
        Mode::Spectra => cmd_spectra(cfg, source),
        Mode::Wu => cmd_wu(cfg, source),
        Mode::Benchmark => cmd_benchmark(cfg, source),
        Mode::Classic => cmd_classic(cfg, source),
    }
}

fn basis_for(cfg: &RunConfig, source: &Source, max_degree: usize) -> GradedBasis {
    match source {
        Source::Cloud(sys) => sys.basis(max_degree, cfg.max_scale),
        Source::Complexes(ks) => enumerate_cells(ks, max_degree, cfg.max_scale).expect("loader yields two or more factors"),
    }
}

fn critical_values(source: &Source) -> Vec<f64> {
    match source {
        Source::Cloud(sys) => sys.critical_values(),
        Source::Complexes(_) => vec![0.0],
    }
}

pub fn cmd_barcode(cfg: &RunConfig, source: &Source) -> Result<Vec<Artifact>, CliError> {
    let basis = basis_for(cfg, source, cfg.max_degree + 1);
    let (barcode, label): (Barcode, &str) = match cfg.field {
        Coefficients::Rational => (persistent_barcode(&basis), "q"),
        Coefficients::F2 => (persistent_barcode_over::<F2>(&basis), "f2"),
    };
    let mut out = Vec::new();
    for p in 0..=cfg.max_degree {
        let mut json = export::barcode_json(&barcode, &[p]);
        for entry in json.as_array_mut().expect("barcode json is an array") {
            entry["field"] = Value::from(label);
        }
        out.push(Artifact::json(format!("barcode_p{p}.json"), &json));
        out.push(Artifact::new(format!("barcode_p{p}.csv"), export::barcode_csv(&barcode, &[p])));
        out.push(Artifact::new(format!("barcode_p{p}.svg"), export::barcode_svg(&barcode, p)));
    }
    if cfg.dump_cells {
        out.push(Artifact::new("cells.txt", basis.dump()));
    }
    Ok(out)
}

fn curve_grid(cfg: &RunConfig, grid: Vec<f64>) -> CurveGrid {
    match cfg.persistence_window {
        Some(w) => CurveGrid::Pairs(grid.into_iter().map(|t| (t, t + w)).collect()),
        None => CurveGrid::Snapshot(grid),
    }
}

fn series_artifacts(series: &SpectrumSeries) -> [Artifact; 3] {
    let p = series.degree;
    [
        Artifact::json(format!("spectra_p{p}.json"), &export::spectrum_json(series)),
        Artifact::new(format!("spectra_p{p}.csv"), export::spectrum_csv(series)),
        Artifact::new(format!("spectra_p{p}.svg"), export::spectrum_svg(series)),
    ]
}

pub fn cmd_spectra(cfg: &RunConfig, source: &Source) -> Result<Vec<Artifact>, CliError> {
    let grid = curve_grid(cfg, cfg.grid.resolve(&critical_values(source), cfg.max_scale)?);
    let tol = ZeroTolerance(cfg.tol);
    let mut out = Vec::new();
    for p in 0..=cfg.max_degree {
        let series = match source {
            Source::Cloud(sys) => gap_curve(sys, p, &grid, tol),
            Source::Complexes(_) => {
                let basis = basis_for(cfg, source, p + 1);
                match &grid {
                    CurveGrid::Snapshot(ts) => snapshot_curve(&basis, p, ts, tol),
                    CurveGrid::Pairs(pairs) => pairs_curve(&basis, p, pairs, tol),
                }
            }
        }
        .map_err(internal)?;
        out.extend(series_artifacts(&series));
    }
    Ok(out)
}

pub fn cmd_classic(cfg: &RunConfig, source: &Source) -> Result<Vec<Artifact>, CliError> {
    let Source::Cloud(sys) = source else {
        return Err(CliError::Usage("classic mode needs point-cloud input".into()));
    };
    if cfg.persistence_window.is_some() {
        return Err(CliError::Usage("classic mode computes snapshot spectra only".into()));
    }
    let union = sys.union();
    let grid = cfg.grid.resolve(&sys.distances().critical_values(&union), cfg.max_scale)?;
    let mut out = Vec::new();
    for p in 0..=cfg.max_degree {
        let series = classic_laplacian_curve(sys.distances(), &union, p, &grid, ZeroTolerance(cfg.tol)).map_err(internal)?;
        out.extend(series_artifacts(&series));
    }
    Ok(out)
}

pub fn cmd_wu(cfg: &RunConfig, source: &Source) -> Result<Vec<Artifact>, CliError> {
    let complex = match source {
        Source::Complexes(ks) => {
            if ks.len() != 2 || ks[0] != ks[1] {
                return Err(CliError::Usage("wu mode needs two identical complexes".into()));
            }
            ks[0].clone()
        }
        Source::Cloud(sys) => {
            let groups = sys.groups();
            if groups.len() != 2 || groups[0] != groups[1] {
                return Err(CliError::Usage("wu mode needs two groups selecting the same points".into()));
            }
            // The Rips skeleton of dimension max_degree at max_scale.
            vr_filtration(&groups[0], sys.distances(), cfg.max_degree, cfg.max_scale)
        }
    };
    let report = wu_of_complex(&complex);
    Ok(vec![Artifact::json("wu.json", &export::wu_json(&report))])
}

/// Wall-clock time of the classic union pipeline and the interaction
/// pipeline on one grid, degrees 0 and 1.
pub fn cmd_benchmark(cfg: &RunConfig, source: &Source) -> Result<Vec<Artifact>, CliError> {
    let Source::Cloud(sys) = source else {
        return Err(CliError::Usage("benchmark mode needs point-cloud input".into()));
    };
    let grid = cfg.grid.resolve(&sys.critical_values(), cfg.max_scale)?;
    let union = sys.union();
    let tol = ZeroTolerance(cfg.tol);
    let mut csv = String::from("pipeline,degree,grid_points,seconds,gap_sum\n");
    for p in 0..=1 {
        let start = Instant::now();
        let classic = classic_laplacian_curve(sys.distances(), &union, p, &grid, tol).map_err(internal)?;
        let classic_time = start.elapsed().as_secs_f64();
        let start = Instant::now();
        let interaction = gap_curve(sys, p, &CurveGrid::Snapshot(grid.clone()), tol).map_err(internal)?;
        let interaction_time = start.elapsed().as_secs_f64();
        for (name, series, seconds) in [("classic", &classic, classic_time), ("interaction", &interaction, interaction_time)] {
            let gap_sum: f64 = series.gaps().iter().sum();
            let _ = writeln!(csv, "{name},{p},{},{seconds:.9},{gap_sum}", grid.len());
        }
    }
    Ok(vec![Artifact::new("benchmark.csv", csv)])
}
