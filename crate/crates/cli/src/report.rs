use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use qlocal::causality::{CausalityReport, Picture};
use qlocal::localizer::{AssemblyReport, VerificationReport};
use qlocal::qca::BlockRepresentation;

use crate::format::Conventions;

/// Machine-readable record of one invocation. Floats are written in their
/// shortest round-trip form, so every residual parses back bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub conventions: Conventions,
    pub command: String,
    pub inputs: BTreeMap<String, String>,
    pub settings: Settings,
    pub verdict: Verdict,
    pub exit_code: i32,
    pub message: Option<String>,
    pub causality: Option<CausalitySection>,
    pub sampled: Option<CausalitySection>,
    pub inverse: Option<CausalitySection>,
    pub decomposition: Option<DecompositionSection>,
    pub synthesis_failures: Vec<SynthesisFailure>,
    pub verification: Option<VerificationSection>,
    pub block_representation: Option<BlockSection>,
    pub timing_ms: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    InputError,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub tol: f64,
    pub verify_tol: f64,
    pub samples: usize,
    pub seed: u64,
    pub inverse: bool,
    pub schedule: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeEntry {
    pub node: usize,
    pub passed: bool,
    pub residual: f64,
    pub witness: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CausalitySection {
    pub picture: String,
    /// Set for the inverse check, which runs on the transposed graph.
    pub transposed_graph: bool,
    pub overall: bool,
    pub unitarity_residual: f64,
    pub max_residual: f64,
    pub failing_nodes: Vec<usize>,
    pub nodes: Vec<NodeEntry>,
}

impl CausalitySection {
    pub fn new(r: &CausalityReport, transposed_graph: bool) -> Self {
        CausalitySection {
            picture: match r.picture {
                Picture::Heisenberg => "heisenberg".into(),
                Picture::StateSampled => "state-sampled".into(),
            },
            transposed_graph,
            overall: r.overall,
            unitarity_residual: r.unitarity_residual,
            max_residual: r.max_residual(),
            failing_nodes: r.failing_nodes(),
            nodes: r
                .per_node
                .iter()
                .map(|v| NodeEntry {
                    node: v.node,
                    passed: v.passed,
                    residual: v.residual,
                    witness: v.witness,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeSection {
    pub max_out: usize,
    pub max_in: usize,
    pub max_closed_in: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionSection {
    pub layer_count: usize,
    pub depth: usize,
    pub degree: DegreeSection,
    /// `max|N^T_x ∪ {x}|²`.
    pub layer_bound: usize,
    pub depth_bound: usize,
    pub within_bound: bool,
    /// Origin nodes per K-layer.
    pub layers: Vec<Vec<usize>>,
    pub localization_residuals: Vec<f64>,
    pub unitarity_residuals: Vec<f64>,
    pub max_commutator: f64,
    pub quiescent_fixed: bool,
    pub uncompute: bool,
}

impl DecompositionSection {
    pub fn new(r: &AssemblyReport, layers: Vec<Vec<usize>>, uncompute: bool) -> Self {
        let bound = r.degree.layer_bound();
        DecompositionSection {
            layer_count: r.layer_count,
            depth: r.depth,
            degree: DegreeSection {
                max_out: r.degree.max_out,
                max_in: r.degree.max_in,
                max_closed_in: r.degree.max_closed_in,
            },
            layer_bound: bound,
            depth_bound: bound + 2,
            within_bound: r.within_layer_bound && r.depth <= bound + 2,
            layers,
            localization_residuals: r.localization_residuals.clone(),
            unitarity_residuals: r.unitarity_residuals.clone(),
            max_commutator: r.max_commutator,
            quiescent_fixed: r.quiescent_fixed,
            uncompute,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisFailure {
    pub node: usize,
    /// `localization` or `block-unitarity`.
    pub kind: String,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationSection {
    pub max_deviation: f64,
    pub worst_input: String,
    pub inputs_checked: usize,
    pub passed: bool,
}

impl VerificationSection {
    pub fn new(r: &VerificationReport, tol: f64) -> Self {
        VerificationSection {
            max_deviation: r.max_deviation,
            worst_input: r.worst_input.clone(),
            inputs_checked: r.inputs_checked,
            passed: r.max_deviation <= tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockSection {
    pub axes: Vec<usize>,
    /// Finite tori wrap around; results concern the periodic instance only.
    pub periodic_boundary: bool,
    pub doubled_alphabet_dim: usize,
    pub layer_count: usize,
    pub expected_layers: usize,
    pub layers: Vec<Vec<usize>>,
    pub translation_deviation: f64,
    pub he_eg_deviation: f64,
    pub worst_input: String,
    pub inputs_checked: usize,
    pub s_stage_is_swap: bool,
    pub h_unitarity_residual: Option<f64>,
    pub h_shift_deviation: Option<f64>,
}

impl BlockSection {
    pub fn new(r: &BlockRepresentation, axes: &[usize]) -> Self {
        let d = (r.doubled_alphabet_dim as f64).sqrt().round() as usize;
        let is_swap = r.s_stage.indexed_iter().all(|((i, j), z)| {
            let expect = if i == (j % d) * d + j / d { 1.0 } else { 0.0 };
            z.re == expect && z.im == 0.0
        });
        BlockSection {
            axes: axes.to_vec(),
            periodic_boundary: true,
            doubled_alphabet_dim: r.doubled_alphabet_dim,
            layer_count: r.layers.len(),
            expected_layers: 1 << axes.len(),
            layers: r.layers.clone(),
            translation_deviation: r.translation_deviation,
            he_eg_deviation: r.he_eg_deviation,
            worst_input: r.worst_input.clone(),
            inputs_checked: r.inputs_checked,
            s_stage_is_swap: is_swap,
            h_unitarity_residual: r.automaton.as_ref().map(|a| a.unitarity_residual),
            h_shift_deviation: r.automaton.as_ref().map(|a| a.shift_deviation),
        }
    }
}

impl ReportDocument {
    pub fn new(command: &str, settings: Settings) -> Self {
        ReportDocument {
            conventions: Conventions::default(),
            command: command.to_string(),
            inputs: BTreeMap::new(),
            settings,
            verdict: Verdict::Pass,
            exit_code: 0,
            message: None,
            causality: None,
            sampled: None,
            inverse: None,
            decomposition: None,
            synthesis_failures: Vec::new(),
            verification: None,
            block_representation: None,
            timing_ms: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports are plain data");
        s.push('\n');
        s
    }

    pub fn parse(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}
