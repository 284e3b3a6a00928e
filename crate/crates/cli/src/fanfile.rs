//! Fan files: `{ "dim": 2, "rays": [[1,0],...], "max_cones": [[0,1],...], "complete": true }`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use toric_zeta_core::toric::{Fan, ValidatedFan};

use crate::CliError;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FanFile {
    dim: usize,
    rays: Vec<Vec<i64>>,
    max_cones: Vec<Vec<usize>>,
    complete: bool,
}

/// Parses and validates fan text. Syntax errors carry line and column,
/// validation errors name the offending ray or cone.
pub fn parse_fan_str(text: &str) -> Result<ValidatedFan, CliError> {
    let raw: FanFile = serde_json::from_str(text)
        .map_err(|e| CliError::new("FanParse", format!("line {}, column {}: {e}", e.line(), e.column())))?;
    let fan = Fan { dim: raw.dim, rays: raw.rays, max_cones: raw.max_cones, complete: raw.complete };
    fan.validate().map_err(CliError::from)
}

pub fn parse_fan_file(path: &Path) -> Result<ValidatedFan, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::new("Io", format!("{}: {e}", path.display())))?;
    parse_fan_str(&text).map_err(|e| e.context(&path.display().to_string()))
}

/// One line per ray and cone, so diffs stay readable.
pub fn dump_fan(fan: &Fan) -> String {
    let list = |rows: Vec<String>| rows.join(",\n    ");
    let rays = list(fan.rays.iter().map(|r| format!("{r:?}").replace(' ', "")).collect());
    let cones = list(fan.max_cones.iter().map(|c| format!("{c:?}").replace(' ', "")).collect());
    format!(
        "{{\n  \"dim\": {},\n  \"rays\": [\n    {rays}\n  ],\n  \"max_cones\": [\n    {cones}\n  ],\n  \"complete\": {}\n}}\n",
        fan.dim, fan.complete
    )
}
