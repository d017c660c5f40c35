//! Command-line flags, the optional TOML config file, and their merge into a
//! validated [`RunConfig`]. Flags win over file values.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use intertopo::field::Coefficients;
use intertopo::geometry::GroupingSpec;
use intertopo::spectral::{auto_grid, DEFAULT_ZERO_TOLERANCE};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Xyz,
    Csv,
    /// One simplex per line; `---` separates factor complexes.
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Barcode,
    #[default]
    Spectra,
    Wu,
    Benchmark,
    Classic,
}

#[derive(Debug, Default, Parser)]
#[command(name = "intertopo", version, about = "Persistent interaction homology and Laplacian spectra of grouped point clouds")]
pub struct Args {
    /// TOML file with defaults for any of the flags below.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Input format; inferred from the file extension when omitted.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Label groups, e.g. "C,B;C,H".
    #[arg(long)]
    pub groups: Option<String>,
    #[arg(long)]
    pub max_degree: Option<usize>,
    #[arg(long)]
    pub max_scale: Option<f64>,
    /// auto | start:stop:step | v1,v2,...
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Coefficient field for barcodes: q or f2.
    #[arg(long)]
    pub field: Option<String>,
    /// Relative tolerance below which an eigenvalue counts as zero.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Spectra of the persistent Laplacian on (t, t + window) instead of snapshots.
    #[arg(long)]
    pub persistence_window: Option<f64>,
    /// Also write the interaction cells to cells.txt (barcode mode).
    #[arg(long)]
    pub dump_cells: bool,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    input: Option<PathBuf>,
    format: Option<Format>,
    groups: Option<String>,
    max_degree: Option<usize>,
    max_scale: Option<f64>,
    grid: Option<String>,
    mode: Option<Mode>,
    field: Option<String>,
    tol: Option<f64>,
    out: Option<PathBuf>,
    persistence_window: Option<f64>,
    dump_cells: Option<bool>,
}

/// Filtration parameters at which curves are sampled.
#[derive(Debug, Clone, PartialEq)]
pub enum GridSpec {
    /// Critical values plus midpoints.
    Auto,
    Range { start: f64, stop: f64, step: f64 },
    Values(Vec<f64>),
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "auto" {
            return Ok(Self::Auto);
        }
        let number = |t: &str| -> Result<f64, String> {
            let v: f64 = t.trim().parse().map_err(|_| format!("bad grid value {t:?}"))?;
            if v.is_finite() && v >= 0.0 {
                Ok(v)
            } else {
                Err(format!("grid values must be finite and non-negative, got {t:?}"))
            }
        };
        if s.contains(':') {
            let parts: Vec<&str> = s.split(':').collect();
            let [a, b, step] = parts.as_slice() else {
                return Err(format!("grid range must be start:stop:step, got {s:?}"));
            };
            let (start, stop, step) = (number(a)?, number(b)?, number(step)?);
            if step <= 0.0 || start > stop {
                return Err(format!("grid range needs start <= stop and step > 0, got {s:?}"));
            }
            return Ok(Self::Range { start, stop, step });
        }
        let mut values = s.split(',').map(number).collect::<Result<Vec<_>, _>>()?;
        values.sort_by(f64::total_cmp);
        values.dedup();
        Ok(Self::Values(values))
    }
}

impl GridSpec {
    /// Sorted, nonempty grid. `Auto` uses `critical` capped at `max_scale`.
    pub fn resolve(&self, critical: &[f64], max_scale: f64) -> Result<Vec<f64>, CliError> {
        let grid = match self {
            Self::Auto => auto_grid(critical).into_iter().filter(|&t| t <= max_scale).collect(),
            Self::Range { start, stop, step } => {
                let n = ((stop - start) / step + 1e-9).floor() as usize;
                (0..=n).map(|k| (start + k as f64 * step).min(*stop)).collect()
            }
            Self::Values(v) => v.clone(),
        };
        if grid.is_empty() {
            return Err(CliError::Usage("the parameter grid is empty".into()));
        }
        if let Some(&t) = grid.iter().find(|&&t| t > max_scale) {
            return Err(CliError::Usage(format!("grid value {t} exceeds --max-scale {max_scale}")));
        }
        Ok(grid)
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub input: PathBuf,
    pub format: Format,
    pub groups: Option<GroupingSpec>,
    pub max_degree: usize,
    pub max_scale: f64,
    pub grid: GridSpec,
    pub mode: Mode,
    pub field: Coefficients,
    pub tol: f64,
    pub out: PathBuf,
    pub persistence_window: Option<f64>,
    pub dump_cells: bool,
}

fn infer_format(path: &Path) -> Result<Format, CliError> {
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("xyz") => Ok(Format::Xyz),
        Some("csv") => Ok(Format::Csv),
        Some("cplx" | "txt" | "complex") => Ok(Format::Complex),
        _ => Err(CliError::Usage(format!("cannot infer the format of {}; pass --format", path.display()))),
    }
}

impl RunConfig {
    pub fn from_args(args: Args) -> Result<Self, CliError> {
        let (file, base) = match &args.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
                let file: FileConfig =
                    toml::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
                (file, path.parent().map(Path::to_path_buf).unwrap_or_default())
            }
            None => (FileConfig::default(), PathBuf::new()),
        };
        let relative = |p: PathBuf| if p.is_absolute() { p } else { base.join(p) };

        let input = args
            .input
            .or_else(|| file.input.map(relative))
            .ok_or_else(|| CliError::Usage("--input is required".into()))?;
        let format = match args.format.or(file.format) {
            Some(f) => f,
            None => infer_format(&input)?,
        };
        let groups = args
            .groups
            .or(file.groups)
            .map(|g| GroupingSpec::parse(&g))
            .transpose()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        if groups.is_none() && format != Format::Complex {
            return Err(CliError::Usage("--groups is required for point-cloud input".into()));
        }
        let max_scale = args.max_scale.or(file.max_scale).unwrap_or(f64::INFINITY);
        if max_scale.is_nan() || max_scale < 0.0 {
            return Err(CliError::Usage(format!("--max-scale must be non-negative, got {max_scale}")));
        }
        let grid = args.grid.or(file.grid).as_deref().unwrap_or("auto").parse().map_err(CliError::Usage)?;
        let field = args.field.or(file.field).as_deref().unwrap_or("q").parse().map_err(CliError::Usage)?;
        let tol = args.tol.or(file.tol).unwrap_or(DEFAULT_ZERO_TOLERANCE);
        if !(tol.is_finite() && tol > 0.0) {
            return Err(CliError::Usage(format!("--tol must be positive, got {tol}")));
        }
        let persistence_window = args.persistence_window.or(file.persistence_window);
        if let Some(w) = persistence_window {
            if !(w.is_finite() && w >= 0.0) {
                return Err(CliError::Usage(format!("--persistence-window must be non-negative, got {w}")));
            }
        }
        Ok(Self {
            input,
            format,
            groups,
            max_degree: args.max_degree.or(file.max_degree).unwrap_or(1),
            max_scale,
            grid,
            mode: args.mode.or(file.mode).unwrap_or_default(),
            field,
            tol,
            out: args.out.or_else(|| file.out.map(relative)).unwrap_or_else(|| PathBuf::from("out")),
            persistence_window,
            dump_cells: args.dump_cells || file.dump_cells.unwrap_or(false),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_forms() {
        assert_eq!("auto".parse::<GridSpec>().unwrap(), GridSpec::Auto);
        assert_eq!("2,1,1".parse::<GridSpec>().unwrap(), GridSpec::Values(vec![1.0, 2.0]));
        let range: GridSpec = "0:1:0.25".parse().unwrap();
        assert_eq!(range.resolve(&[], f64::INFINITY).unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let thirds: GridSpec = "0:1:0.1".parse().unwrap();
        assert_eq!(thirds.resolve(&[], 2.0).unwrap().len(), 11);
        for bad in ["1:0:0.1", "0:1:0", "0:1", "a,b", "-1", "nan"] {
            assert!(bad.parse::<GridSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn auto_grid_is_capped() {
        let g = GridSpec::Auto.resolve(&[0.0, 1.0, 2.0], 1.0).unwrap();
        assert_eq!(g, vec![0.0, 0.5, 1.0]);
        assert!(GridSpec::Values(vec![3.0]).resolve(&[], 1.0).is_err());
    }

    #[test]
    fn flags_override_file_values() {
        let dir = std::env::temp_dir().join(format!("intertopo-config-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.toml");
        fs::write(&path, "input = \"cloud.xyz\"\ngroups = \"C;H\"\nmax_degree = 2\nmode = \"barcode\"\n").unwrap();
        let args = Args { config: Some(path), max_degree: Some(0), ..Args::default() };
        let cfg = RunConfig::from_args(args).unwrap();
        assert_eq!(cfg.max_degree, 0);
        assert_eq!(cfg.mode, Mode::Barcode);
        assert_eq!(cfg.format, Format::Xyz);
        assert_eq!(cfg.input, dir.join("cloud.xyz"));
        fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        assert!(toml::from_str::<FileConfig>("colour = 1").is_err());
    }
}
