//! JSON documents for graphs, operators and circuits.
//!
//! Every document starts with a conventions header fixing the basis order:
//! slots sorted by node then tape, first slot most significant.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use qlocal::graph::{NodeLabel, QuantumLabeledGraph};
use qlocal::localizer::{Circuit, Decoding, DoubledLayout, Encoding, LocalGate};
use qlocal::tensor::{DenseOperator, Slot, SpaceLayout, Support, COMPUTED, UNCOMPUTED};

pub const INDEX_ORDER: &str = "node-ascending,first-most-significant";
pub const TAPES: [&str; 2] = ["computed", "uncomputed"];

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported conventions: {0}")]
    Conventions(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] qlocal::Error),
}

pub type Result<T> = std::result::Result<T, FormatError>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conventions {
    pub index_order: String,
    pub tapes: Vec<String>,
}

impl Default for Conventions {
    fn default() -> Self {
        Conventions {
            index_order: INDEX_ORDER.to_string(),
            tapes: TAPES.iter().map(|t| t.to_string()).collect(),
        }
    }
}

impl Conventions {
    fn check(&self) -> Result<()> {
        if *self != Conventions::default() {
            return Err(FormatError::Conventions(format!(
                "expected index_order {INDEX_ORDER:?} and tapes {TAPES:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeDoc {
    pub dim: usize,
    pub quiescent: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphBody {
    pub nodes: Vec<NodeDoc>,
    pub edges: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDoc {
    pub conventions: Conventions,
    #[serde(flatten)]
    pub graph: GraphBody,
}

/// Square complex matrix, row-major `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixDoc {
    pub side: usize,
    pub entries: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorDoc {
    pub conventions: Conventions,
    #[serde(flatten)]
    pub matrix: MatrixDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotDoc {
    pub tape: u8,
    pub node: usize,
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodingDoc {
    pub ancilla_tape: u8,
    pub quiescent: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateDoc {
    pub origin_node: usize,
    /// `[tape, node]` pairs in canonical order.
    pub support: Vec<[usize; 2]>,
    pub block: MatrixDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodingDoc {
    pub swap_tapes: bool,
    pub uncompute: Option<Vec<MatrixDoc>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitDoc {
    pub conventions: Conventions,
    pub graph: GraphBody,
    pub doubled_layout: Vec<SlotDoc>,
    pub encoding: EncodingDoc,
    pub layers: Vec<Vec<GateDoc>>,
    pub decoding: DecodingDoc,
    pub depth: usize,
}

fn graph_body(g: &QuantumLabeledGraph) -> GraphBody {
    GraphBody {
        nodes: g
            .nodes()
            .iter()
            .map(|n| NodeDoc {
                dim: n.dim,
                quiescent: n.quiescent,
            })
            .collect(),
        edges: g.edges().iter().map(|&(x, y)| [x, y]).collect(),
    }
}

fn graph_from_body(body: &GraphBody) -> Result<QuantumLabeledGraph> {
    let nodes = body.nodes.iter().map(|n| NodeLabel::new(n.dim, n.quiescent)).collect();
    Ok(QuantumLabeledGraph::new(nodes, body.edges.iter().map(|e| (e[0], e[1])))?)
}

pub fn matrix_doc(op: &DenseOperator) -> MatrixDoc {
    MatrixDoc {
        side: op.dim(),
        entries: op.matrix().iter().map(|z| [z.re, z.im]).collect(),
    }
}

fn operator_from_doc(doc: &MatrixDoc, layout: SpaceLayout) -> Result<DenseOperator> {
    if doc.entries.len() != doc.side * doc.side {
        return Err(FormatError::Invalid(format!(
            "a side-{} matrix needs {} entries, found {}",
            doc.side,
            doc.side * doc.side,
            doc.entries.len()
        )));
    }
    if layout.total_dim() != doc.side {
        return Err(qlocal::Error::DimensionMismatch {
            expected: layout.total_dim(),
            found: doc.side,
        }
        .into());
    }
    let entries: Vec<Complex64> = doc.entries.iter().map(|e| Complex64::new(e[0], e[1])).collect();
    Ok(DenseOperator::from_rows(layout, &entries)?)
}

fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents are plain data");
    s.push('\n');
    s
}

pub fn graph_to_json(g: &QuantumLabeledGraph) -> String {
    to_json(&GraphDoc {
        conventions: Conventions::default(),
        graph: graph_body(g),
    })
}

pub fn parse_graph(text: &str) -> Result<QuantumLabeledGraph> {
    let doc: GraphDoc = serde_json::from_str(text)?;
    doc.conventions.check()?;
    graph_from_body(&doc.graph)
}

pub fn operator_to_json(op: &DenseOperator) -> String {
    to_json(&OperatorDoc {
        conventions: Conventions::default(),
        matrix: matrix_doc(op),
    })
}

/// Operator on a flat space of the document's side.
pub fn parse_operator(text: &str) -> Result<DenseOperator> {
    let doc: OperatorDoc = serde_json::from_str(text)?;
    doc.conventions.check()?;
    operator_from_doc(&doc.matrix, SpaceLayout::flat(doc.matrix.side)?)
}

/// Operator on the configuration space of `g`; the side must equal the product of node dimensions.
pub fn parse_operator_for(text: &str, g: &QuantumLabeledGraph) -> Result<DenseOperator> {
    let doc: OperatorDoc = serde_json::from_str(text)?;
    doc.conventions.check()?;
    operator_from_doc(&doc.matrix, g.layout())
}

pub fn circuit_doc(c: &Circuit) -> CircuitDoc {
    let layout = c.doubled().layout();
    CircuitDoc {
        conventions: Conventions::default(),
        graph: graph_body(c.doubled().base()),
        doubled_layout: layout
            .slots()
            .iter()
            .zip(layout.dims())
            .map(|(s, &d)| SlotDoc {
                tape: s.tape,
                node: s.node,
                dim: d,
            })
            .collect(),
        encoding: EncodingDoc {
            ancilla_tape: c.encoding().ancilla_tape,
            quiescent: c.encoding().quiescent.clone(),
        },
        layers: c
            .layers()
            .iter()
            .map(|layer| {
                layer
                    .iter()
                    .map(|g| GateDoc {
                        origin_node: g.origin_node,
                        support: g.support.iter().map(|s| [s.tape as usize, s.node]).collect(),
                        block: matrix_doc(&g.block),
                    })
                    .collect()
            })
            .collect(),
        decoding: DecodingDoc {
            swap_tapes: true,
            uncompute: c.decoding().uncompute.as_ref().map(|ws| ws.iter().map(matrix_doc).collect()),
        },
        depth: c.depth(),
    }
}

pub fn circuit_to_json(c: &Circuit) -> String {
    to_json(&circuit_doc(c))
}

pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let doc: CircuitDoc = serde_json::from_str(text)?;
    doc.conventions.check()?;
    let g = graph_from_body(&doc.graph)?;
    let doubled = DoubledLayout::new(&g);
    let declared: Vec<(Slot, usize)> = doc
        .doubled_layout
        .iter()
        .map(|s| (Slot::new(s.tape, s.node), s.dim))
        .collect();
    let layout = doubled.layout();
    let expected: Vec<(Slot, usize)> = layout.slots().iter().copied().zip(layout.dims().iter().copied()).collect();
    if declared != expected {
        return Err(FormatError::Invalid("doubled layout does not match the graph".into()));
    }
    if !doc.decoding.swap_tapes {
        return Err(FormatError::Invalid("decoding must swap the tapes".into()));
    }
    let mut layers = Vec::with_capacity(doc.layers.len());
    for layer in &doc.layers {
        let mut gates = Vec::with_capacity(layer.len());
        for gate in layer {
            let mut slots = Vec::with_capacity(gate.support.len());
            for &[tape, node] in &gate.support {
                let tape = match tape {
                    0 => COMPUTED,
                    1 => UNCOMPUTED,
                    t => return Err(FormatError::Invalid(format!("unknown tape {t}"))),
                };
                slots.push(Slot::new(tape, node));
            }
            let support = Support::new(slots)?;
            let block = operator_from_doc(&gate.block, layout.sub_layout(&support)?)?;
            gates.push(LocalGate {
                block,
                support,
                origin_node: gate.origin_node,
            });
        }
        layers.push(gates);
    }
    let uncompute = match &doc.decoding.uncompute {
        None => None,
        Some(ws) => Some(
            ws.iter()
                .map(|w| operator_from_doc(w, SpaceLayout::flat(w.side)?))
                .collect::<Result<Vec<_>>>()?,
        ),
    };
    let encoding = Encoding {
        ancilla_tape: doc.encoding.ancilla_tape,
        quiescent: doc.encoding.quiescent.clone(),
    };
    let circuit = Circuit::new(doubled, encoding, layers, Decoding { uncompute })?;
    if circuit.depth() != doc.depth {
        return Err(FormatError::Invalid(format!(
            "declared depth {} but the circuit has depth {}",
            doc.depth,
            circuit.depth()
        )));
    }
    Ok(circuit)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_graph() {
        let text = r#"{"conventions":{"index_order":"node-ascending,first-most-significant","tapes":["computed","uncomputed"]},
            "nodes":[{"dim":2,"quiescent":0}],"edges":[[0,0]]}"#;
        let g = parse_graph(text).unwrap();
        assert_eq!(g.neighbors(0).unwrap(), vec![0]);
        assert_eq!(parse_graph(&graph_to_json(&g)).unwrap(), g);
    }

    #[test]
    fn conventions_are_enforced() {
        let text = r#"{"conventions":{"index_order":"little-endian","tapes":["computed","uncomputed"]},
            "nodes":[{"dim":2,"quiescent":0}],"edges":[]}"#;
        assert!(matches!(parse_graph(text), Err(FormatError::Conventions(_))));
    }

    #[test]
    fn identity_operator() {
        let id = DenseOperator::identity(SpaceLayout::flat(4).unwrap());
        let op = parse_operator(&operator_to_json(&id)).unwrap();
        assert!(qlocal::tensor::check_unitary(&op, 1e-12).0);
        assert_eq!(op, id);
    }

    #[test]
    fn operator_side_must_match_graph() {
        let g = QuantumLabeledGraph::isolated(&[2, 2]).unwrap();
        let five = DenseOperator::identity(SpaceLayout::flat(5).unwrap());
        let err = parse_operator_for(&operator_to_json(&five), &g).unwrap_err();
        assert!(matches!(
            err,
            FormatError::Core(qlocal::Error::DimensionMismatch { expected: 4, found: 5 })
        ));
    }

    #[test]
    fn entry_count_and_finiteness_are_checked() {
        let bad = r#"{"conventions":{"index_order":"node-ascending,first-most-significant","tapes":["computed","uncomputed"]},
            "side":2,"entries":[[1,0],[0,0],[0,0]]}"#;
        assert!(matches!(parse_operator(bad), Err(FormatError::Invalid(_))));
        let nan = r#"{"conventions":{"index_order":"node-ascending,first-most-significant","tapes":["computed","uncomputed"]},
            "side":1,"entries":[[null,0]]}"#;
        assert!(parse_operator(nan).is_err());
    }
}
