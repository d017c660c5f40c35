//! Loading point clouds and explicit complexes from disk.

use std::fs;
use std::path::Path;

use intertopo::complex::FilteredComplex;
use intertopo::geometry::{parse_csv, parse_xyz, GroupingSpec};
use intertopo::spectral::InteractionSystem;

use crate::config::Format;
use crate::CliError;

/// What the numeric commands operate on.
#[derive(Debug)]
pub enum Source {
    Cloud(InteractionSystem),
    /// Factor complexes with every simplex born at 0.
    Complexes(Vec<FilteredComplex>),
}

pub fn load(path: &Path, format: Format, groups: Option<&GroupingSpec>) -> Result<Source, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let input_error = |e: &dyn std::fmt::Display| CliError::Usage(format!("{}: {e}", path.display()));
    match format {
        Format::Xyz | Format::Csv => {
            let cloud = if format == Format::Xyz { parse_xyz(&text) } else { parse_csv(&text) }.map_err(|e| input_error(&e))?;
            let groups = groups.ok_or_else(|| CliError::Usage("--groups is required for point-cloud input".into()))?;
            InteractionSystem::from_cloud(&cloud, groups).map(Source::Cloud).map_err(|e| input_error(&e))
        }
        Format::Complex => parse_complexes(&text).map(Source::Complexes).map_err(|e| input_error(&e)),
    }
}

/// One simplex per line as whitespace-separated vertex ids; `#` starts a
/// comment; a line `---` starts the next factor. A single factor interacts
/// with itself.
pub fn parse_complexes(text: &str) -> Result<Vec<FilteredComplex>, String> {
    let mut blocks: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line == "---" {
            blocks.push(Vec::new());
            continue;
        }
        let simplex = line
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|_| format!("line {}: bad vertex id {t:?}", n + 1)))
            .collect::<Result<Vec<_>, _>>()?;
        blocks.last_mut().expect("at least one block").push(simplex);
    }
    if let Some(i) = blocks.iter().position(Vec::is_empty) {
        return Err(format!("factor {i} has no simplices"));
    }
    let mut complexes: Vec<FilteredComplex> = blocks
        .iter()
        .map(|b| FilteredComplex::from_maximal(b).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    if complexes.len() == 1 {
        complexes.push(complexes[0].clone());
    }
    Ok(complexes)
}
