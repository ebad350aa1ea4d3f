//! The on-disk state format: a JSON object with local dimensions, per-factor
//! party labels, and the real/imaginary parts of the row-major matrix.
//!
//! ```json
//! {"dims": [2, 2], "party": ["A", "B"], "re": [[...], ...], "im": [[...], ...]}
//! ```
//!
//! Values round-trip bit-exactly: floats are emitted in shortest
//! representation that parses back to the identical bit pattern.

use std::path::Path;

use serde::{Deserialize, Serialize};
use symext_core::linalg::{ComplexMatrix, DensityMatrix, DimensionProfile, Party, C64};

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateFile {
    pub dims: Vec<usize>,
    pub party: Vec<String>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

pub fn to_state_file(rho: &DensityMatrix) -> StateFile {
    let n = rho.side();
    let mat = rho.matrix();
    StateFile {
        dims: rho.profile().dims().to_vec(),
        party: rho
            .profile()
            .party()
            .iter()
            .map(|p| match p {
                Party::A => "A".to_string(),
                Party::B => "B".to_string(),
            })
            .collect(),
        re: (0..n)
            .map(|i| (0..n).map(|j| mat.at(i, j).re).collect())
            .collect(),
        im: (0..n)
            .map(|i| (0..n).map(|j| mat.at(i, j).im).collect())
            .collect(),
    }
}

pub fn from_state_file(file: &StateFile) -> Result<DensityMatrix, CliError> {
    let party = file
        .party
        .iter()
        .map(|s| match s.as_str() {
            "A" => Ok(Party::A),
            "B" => Ok(Party::B),
            other => Err(CliError::validation(format!(
                "party label must be \"A\" or \"B\", got {other:?}"
            ))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let profile = DimensionProfile::new(file.dims.clone(), party)?;
    let n = profile.total_dim();
    if file.re.len() != n
        || file.im.len() != n
        || file.re.iter().any(|r| r.len() != n)
        || file.im.iter().any(|r| r.len() != n)
    {
        return Err(CliError::validation(format!(
            "matrix must be {n}x{n} to match the dims"
        )));
    }
    let mat = ComplexMatrix::from_fn(n, n, |i, j| C64::new(file.re[i][j], file.im[i][j]));
    Ok(DensityMatrix::new(mat, profile)?)
}

pub fn read_state(path: &Path) -> Result<DensityMatrix, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::validation(format!("cannot read {}: {e}", path.display())))?;
    let file: StateFile = serde_json::from_str(&text)
        .map_err(|e| CliError::validation(format!("malformed state file: {e}")))?;
    from_state_file(&file)
}

pub fn write_state(path: &Path, rho: &DensityMatrix) -> Result<(), CliError> {
    let text = serde_json::to_string(&to_state_file(rho))?;
    std::fs::write(path, text)?;
    Ok(())
}
