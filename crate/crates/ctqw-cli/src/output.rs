//! Serialization helpers shared by the subcommands.
//!
//! Data files must be byte-identical across runs with the same
//! configuration, so floats are written with a fixed 12-significant-digit
//! format and nothing time- or host-dependent is emitted unless the user
//! asks for the version header.

use serde::Serialize;

/// Fixed 12-significant-digit form used in CSV columns.
pub fn sig12(x: f64) -> String {
    format!("{:.11e}", x)
}

/// Rounds to the same 12 significant digits before a value enters a JSON
/// document, so both formats carry identical information.
pub fn round12(x: f64) -> f64 {
    sig12(x).parse().expect("formatted float parses back")
}

/// JSON-safe float: finite values rounded, missing values `null`.
pub fn json_num(x: f64) -> Option<f64> {
    x.is_finite().then(|| round12(x))
}

/// CSV field for the quantum/classical ratio; missing ratios stay empty.
pub fn ratio_field(x: f64) -> String {
    if x.is_finite() {
        sig12(x)
    } else {
        String::new()
    }
}

pub const CSV_HEADER: &str = "t,j,k,p,pi,ratio";

/// One row of the propagation schema shared by `propagate`, `collapse`, and
/// `compare`.
pub struct PropagationRow {
    pub t: f64,
    pub j: usize,
    pub k: usize,
    pub p: f64,
    pub pi: f64,
    pub ratio: f64,
}

impl PropagationRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            sig12(self.t),
            self.j,
            self.k,
            sig12(self.p.max(0.0)),
            sig12(self.pi),
            ratio_field(self.ratio),
        )
    }
}

#[derive(Serialize)]
pub struct TimeSlice {
    pub t: f64,
    pub p: Vec<f64>,
    pub pi: Vec<f64>,
    pub ratio: Vec<Option<f64>>,
}

#[derive(Serialize)]
pub struct SpectrumDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub version: Option<String>,
    pub n: usize,
    pub tolerance: f64,
    pub eigenvalues: Vec<f64>,
    pub groups: Vec<GroupDoc>,
}

#[derive(Serialize)]
pub struct GroupDoc {
    pub value: f64,
    pub indices: Vec<usize>,
}

#[derive(Serialize)]
pub struct LimitDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub version: Option<String>,
    pub start: usize,
    pub chi: Vec<f64>,
}

#[derive(Serialize)]
pub struct PropagateDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub version: Option<String>,
    pub start: usize,
    pub gamma: f64,
    pub nodes: usize,
    pub series: Vec<TimeSlice>,
}

#[derive(Serialize)]
pub struct StructureDoc {
    pub generation: u32,
    pub direction: String,
    pub clusters: Vec<Vec<usize>>,
    pub sizes: Vec<usize>,
    pub bonds: Vec<usize>,
    pub functionality: Vec<usize>,
    pub matrix: Vec<Vec<f64>>,
}

#[derive(Serialize)]
pub struct CollapseDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub version: Option<String>,
    #[serde(flatten)]
    pub structure: StructureDoc,
    pub start: usize,
    pub gamma: f64,
    pub chi: Vec<f64>,
    pub series: Vec<TimeSlice>,
}

#[derive(Serialize)]
pub struct CompareRow {
    pub t: f64,
    pub j: usize,
    pub k: usize,
    pub p: f64,
    pub pi: f64,
    pub ratio: Option<f64>,
}

#[derive(Serialize)]
pub struct CompareDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub version: Option<String>,
    pub gamma: f64,
    pub rows: Vec<CompareRow>,
}

pub fn to_json(doc: &impl Serialize) -> String {
    let mut text = serde_json::to_string_pretty(doc).expect("serializable document");
    text.push('\n');
    text
}
