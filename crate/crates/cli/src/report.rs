//! Serializable mirrors of the core result types for JSON and CSV output.

use serde::Serialize;
use symext_core::analysis::{
    DistillMode, DistillSearchReport, KeyBoundReport, LockingDemoReport, WernerScanRow,
};
use symext_core::bsa::BsaDecomposition;
use symext_core::extendibility::{ExtendibilityVerdict, Method};
use symext_core::linalg::ComplexMatrix;

use crate::stateio::{to_state_file, StateFile};

#[derive(Debug, Serialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            re: (0..m.rows())
                .map(|i| (0..m.cols()).map(|j| m.at(i, j).re).collect())
                .collect(),
            im: (0..m.rows())
                .map(|i| (0..m.cols()).map(|j| m.at(i, j).im).collect())
                .collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct VerdictJson {
    pub k: usize,
    pub feasible: bool,
    pub margin: f64,
    pub boundary: bool,
    pub method: &'static str,
    pub witness: Option<StateFile>,
}

impl VerdictJson {
    pub fn new(v: &ExtendibilityVerdict, include_witness: bool) -> Self {
        Self {
            k: v.k,
            feasible: v.feasible,
            margin: v.margin,
            boundary: v.boundary,
            method: match v.method {
                Method::Sdp => "sdp",
                Method::Analytic => "analytic",
            },
            witness: if include_witness {
                v.witness.as_ref().map(to_state_file)
            } else {
                None
            },
        }
    }
}

#[derive(Debug, Serialize)]
pub struct BsaJson {
    pub lambda_max: f64,
    pub ess: f64,
    pub sigma_ext: Option<StateFile>,
    pub sigma_next: Option<StateFile>,
    pub extension: Option<StateFile>,
}

impl BsaJson {
    pub fn new(b: &BsaDecomposition, include_states: bool) -> Self {
        Self {
            lambda_max: b.lambda_max,
            ess: 1.0 - b.lambda_max,
            sigma_ext: include_states
                .then(|| b.sigma_ext.as_ref().map(to_state_file))
                .flatten(),
            sigma_next: include_states
                .then(|| b.sigma_next.as_ref().map(to_state_file))
                .flatten(),
            extension: include_states
                .then(|| b.extension.as_ref().map(to_state_file))
                .flatten(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct DistanceJson {
    pub epsilon: f64,
    pub nearest: StateFile,
}

#[derive(Debug, Serialize)]
pub struct KeyBoundJson {
    pub eps: f64,
    pub d_a: usize,
    pub bound: f64,
}

impl From<&KeyBoundReport> for KeyBoundJson {
    fn from(r: &KeyBoundReport) -> Self {
        Self {
            eps: r.eps,
            d_a: r.d_a,
            bound: r.bound,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct DistillJson {
    pub trials: usize,
    pub skipped: usize,
    pub seed: u64,
    pub mode: &'static str,
    pub best_trial: usize,
    pub best_coherent_info: f64,
    pub best_success_probability: f64,
    pub best_filter: MatrixJson,
    pub best_unitary: MatrixJson,
}

impl From<&DistillSearchReport> for DistillJson {
    fn from(r: &DistillSearchReport) -> Self {
        Self {
            trials: r.trials,
            skipped: r.skipped,
            seed: r.seed,
            mode: match r.mode {
                DistillMode::Full => "full",
                DistillMode::Proj2 => "proj2",
            },
            best_trial: r.best_trial,
            best_coherent_info: r.best_coherent_info,
            best_success_probability: r.best_success_probability,
            best_filter: MatrixJson::from_matrix(&r.best_filter),
            best_unitary: MatrixJson::from_matrix(&r.best_unitary),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct LockingJson {
    pub d: usize,
    pub pre: Option<VerdictJson>,
    pub post: VerdictJson,
}

impl From<&LockingDemoReport> for LockingJson {
    fn from(r: &LockingDemoReport) -> Self {
        Self {
            d: r.d,
            pre: r.pre.as_ref().map(|v| VerdictJson::new(v, false)),
            post: VerdictJson::new(&r.post, false),
        }
    }
}

/// CSV header for scan output.
pub const SCAN_CSV_HEADER: &str = "alpha,separable,npt,extendible,margin,coherent_info";

pub fn scan_row_csv(row: &WernerScanRow) -> String {
    format!(
        "{},{},{},{},{},{}",
        row.alpha,
        row.separable,
        row.npt,
        row.extendible.feasible,
        row.extendible.margin,
        row.coherent_info
    )
}

#[derive(Debug, Serialize)]
pub struct ScanRowJson {
    pub alpha: f64,
    pub separable: bool,
    pub npt: bool,
    pub extendible: bool,
    pub margin: f64,
    pub coherent_info: f64,
}

impl From<&WernerScanRow> for ScanRowJson {
    fn from(r: &WernerScanRow) -> Self {
        Self {
            alpha: r.alpha,
            separable: r.separable,
            npt: r.npt,
            extendible: r.extendible.feasible,
            margin: r.extendible.margin,
            coherent_info: r.coherent_info,
        }
    }
}
