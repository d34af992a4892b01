use std::fs;
use std::path::Path;
use std::time::Instant;

use qlocal::causality::{check_causal_heisenberg, check_causal_state_sampled, check_inverse_causal};
use qlocal::graph::QuantumLabeledGraph;
use qlocal::localizer::{assemble, representation_deviation, synthesize_k, Assembly, Schedule, DEFAULT_TOL, DEFAULT_VERIFY_TOL};
use qlocal::qca::{block_representation, BlockOptions};
use qlocal::tensor::DenseOperator;
use qlocal::zoo;
use qlocal::Error;

use crate::format::{circuit_to_json, graph_to_json, operator_to_json, parse_circuit, parse_graph, parse_operator_for};
use crate::report::{
    BlockSection, CausalitySection, DecompositionSection, ReportDocument, Settings, SynthesisFailure, Verdict,
    VerificationSection,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// Demo names besides the zoo instances themselves.
pub const DEMO_ALIASES: &[(&str, &str)] = &[("shift", "shift-4"), ("counterexample", "distant-swap")];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleKind {
    Greedy,
    TorusOffsets,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Options {
    pub tol: f64,
    pub verify_tol: f64,
    pub samples: usize,
    pub seed: u64,
    pub inverse: bool,
    pub schedule: ScheduleKind,
    pub axes: Option<Vec<usize>>,
    pub timing: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            tol: DEFAULT_TOL,
            verify_tol: DEFAULT_VERIFY_TOL,
            samples: qlocal::causality::DEFAULT_SAMPLES,
            seed: 0,
            inverse: false,
            schedule: ScheduleKind::Greedy,
            axes: None,
            timing: true,
        }
    }
}

impl Options {
    fn settings(&self) -> Settings {
        Settings {
            tol: self.tol,
            verify_tol: self.verify_tol,
            samples: self.samples,
            seed: self.seed,
            inverse: self.inverse,
            schedule: match self.schedule {
                ScheduleKind::Greedy => "greedy".into(),
                ScheduleKind::TorusOffsets => "torus-offsets".into(),
            },
        }
    }

    fn schedule(&self) -> Result<Schedule, String> {
        match (self.schedule, &self.axes) {
            (ScheduleKind::Greedy, _) => Ok(Schedule::Greedy),
            (ScheduleKind::TorusOffsets, Some(axes)) => Ok(Schedule::TorusOffsets(axes.clone())),
            (ScheduleKind::TorusOffsets, None) => Err("--schedule torus-offsets needs --axes".into()),
        }
    }
}

/// Exit code, the report, and human-readable lines for stdout.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub exit_code: i32,
    pub report: ReportDocument,
    pub lines: Vec<String>,
}

struct Run {
    report: ReportDocument,
    lines: Vec<String>,
    start: Instant,
    timing: bool,
}

impl Run {
    fn new(command: &str, opts: &Options) -> Self {
        Run {
            report: ReportDocument::new(command, opts.settings()),
            lines: Vec::new(),
            start: Instant::now(),
            timing: opts.timing,
        }
    }

    fn input(&mut self, key: &str, value: impl Into<String>) {
        self.report.inputs.insert(key.to_string(), value.into());
    }

    fn say(&mut self, line: impl Into<String>) {
        self.lines.push(line.into());
    }

    fn finish(mut self, verdict: Verdict, message: Option<String>) -> Outcome {
        let exit_code = match verdict {
            Verdict::Pass => EXIT_OK,
            Verdict::Fail => EXIT_FAILURE,
            Verdict::InputError => EXIT_INPUT,
        };
        if let Some(m) = &message {
            self.lines.push(m.clone());
        }
        self.report.verdict = verdict;
        self.report.exit_code = exit_code;
        self.report.message = message;
        if self.timing {
            self.report.timing_ms = Some(self.start.elapsed().as_secs_f64() * 1e3);
        }
        Outcome {
            exit_code,
            report: self.report,
            lines: self.lines,
        }
    }

    fn input_error(self, e: impl std::fmt::Display) -> Outcome {
        self.finish(Verdict::InputError, Some(format!("error: {e}")))
    }
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn load_pair(graph_path: &Path, op_path: &Path) -> Result<(QuantumLabeledGraph, DenseOperator), String> {
    let g = parse_graph(&read(graph_path)?).map_err(|e| format!("{}: {e}", graph_path.display()))?;
    let u = parse_operator_for(&read(op_path)?, &g).map_err(|e| format!("{}: {e}", op_path.display()))?;
    Ok((g, u))
}

fn verdict(ok: bool) -> Verdict {
    if ok {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

fn pass_word(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

/// Runs both causality pictures (and the inverse check if asked) and records them.
/// Returns `Err` with an input-error message when the operator is not unitary.
fn certify(run: &mut Run, u: &DenseOperator, g: &QuantumLabeledGraph, opts: &Options, inverse: bool) -> Result<bool, String> {
    let h = match check_causal_heisenberg(u, g, opts.tol) {
        Ok(r) => r,
        Err(Error::NonUnitary { residual }) => {
            return Err(format!("operator is not unitary (residual {residual:e})"));
        }
        Err(e) => return Err(e.to_string()),
    };
    let s = check_causal_state_sampled(u, g, opts.samples, opts.seed, opts.tol).map_err(|e| e.to_string())?;
    run.say(format!(
        "heisenberg: {} (max residual {:e}, failing nodes {:?})",
        pass_word(h.overall),
        h.max_residual(),
        h.failing_nodes()
    ));
    run.say(format!(
        "state-sampled ({} per node, seed {}): {} (max residual {:e}, failing nodes {:?})",
        opts.samples,
        opts.seed,
        pass_word(s.overall),
        s.max_residual(),
        s.failing_nodes()
    ));
    let mut ok = h.overall && s.overall;
    if h.overall != s.overall {
        run.say("pictures disagree");
    }
    run.report.causality = Some(CausalitySection::new(&h, false));
    run.report.sampled = Some(CausalitySection::new(&s, false));
    if inverse {
        let inv = check_inverse_causal(u, g, opts.tol).map_err(|e| e.to_string())?;
        run.say(format!(
            "inverse on transposed graph: {} (max residual {:e})",
            pass_word(inv.overall),
            inv.max_residual()
        ));
        ok &= inv.overall;
        run.report.inverse = Some(CausalitySection::new(&inv, true));
    }
    Ok(ok)
}

pub fn cmd_check(graph_path: &Path, op_path: &Path, opts: &Options) -> Outcome {
    let mut run = Run::new("check", opts);
    run.input("graph", graph_path.display().to_string());
    run.input("operator", op_path.display().to_string());
    let (g, u) = match load_pair(graph_path, op_path) {
        Ok(p) => p,
        Err(e) => return run.input_error(e),
    };
    match certify(&mut run, &u, &g, opts, opts.inverse) {
        Ok(ok) => run.finish(verdict(ok), None),
        Err(e) => run.input_error(e),
    }
}

/// Per-node synthesis failures, for a diagnostic after assembly was refused.
fn synthesis_failures(u: &DenseOperator, g: &QuantumLabeledGraph, tol: f64) -> Vec<SynthesisFailure> {
    (0..g.num_nodes())
        .filter_map(|x| match synthesize_k(u, g, x, tol) {
            Err(Error::LocalizationViolation { residual, .. }) => Some(SynthesisFailure {
                node: x,
                kind: "localization".into(),
                residual,
            }),
            Err(Error::NonUnitaryBlock { residual, .. }) => Some(SynthesisFailure {
                node: x,
                kind: "block-unitarity".into(),
                residual,
            }),
            _ => None,
        })
        .collect()
}

enum Decomposed {
    Done(Box<Assembly>),
    Refused(String),
    Input(String),
}

fn decompose(run: &mut Run, u: &DenseOperator, g: &QuantumLabeledGraph, schedule: &Schedule, tol: f64) -> Decomposed {
    match assemble(u, g, tol, schedule) {
        Ok(a) => {
            let layers = a
                .circuit
                .layers()
                .iter()
                .map(|l| l.iter().map(|gate| gate.origin_node).collect())
                .collect();
            let section = DecompositionSection::new(&a.report, layers, a.circuit.decoding().uncompute.is_some());
            run.say(format!(
                "K-layers {}, depth {} (bound {} + 2 = {}: {}), degrees out {} in {} closed-in {}",
                section.layer_count,
                section.depth,
                section.layer_bound,
                section.depth_bound,
                pass_word(section.within_bound),
                section.degree.max_out,
                section.degree.max_in,
                section.degree.max_closed_in
            ));
            run.say(format!(
                "max localization residual {:e}, max commutator {:e}, uncompute {}",
                section.localization_residuals.iter().copied().fold(0.0, f64::max),
                section.max_commutator,
                section.uncompute
            ));
            run.report.decomposition = Some(section);
            Decomposed::Done(Box::new(a))
        }
        Err(e @ (Error::LocalizationViolation { .. } | Error::NonUnitaryBlock { .. })) => {
            let failures = synthesis_failures(u, g, tol);
            for f in &failures {
                run.say(format!("node {}: {} residual {:e}", f.node, f.kind, f.residual));
            }
            run.report.synthesis_failures = failures;
            Decomposed::Refused(format!("synthesis failed: {e}"))
        }
        Err(e) => Decomposed::Input(format!("error: {e}")),
    }
}

pub fn cmd_decompose(graph_path: &Path, op_path: &Path, out_path: &Path, opts: &Options) -> Outcome {
    let mut run = Run::new("decompose", opts);
    run.input("graph", graph_path.display().to_string());
    run.input("operator", op_path.display().to_string());
    run.input("circuit", out_path.display().to_string());
    let (g, u) = match load_pair(graph_path, op_path) {
        Ok(p) => p,
        Err(e) => return run.input_error(e),
    };
    let schedule = match opts.schedule() {
        Ok(s) => s,
        Err(e) => return run.input_error(e),
    };
    match decompose(&mut run, &u, &g, &schedule, opts.tol) {
        Decomposed::Done(a) => {
            if let Err(e) = fs::write(out_path, circuit_to_json(&a.circuit)) {
                return run.input_error(format!("cannot write {}: {e}", out_path.display()));
            }
            run.say(format!("circuit written to {}", out_path.display()));
            run.finish(Verdict::Pass, None)
        }
        Decomposed::Refused(m) => run.finish(Verdict::Fail, Some(m)),
        Decomposed::Input(m) => run.finish(Verdict::InputError, Some(m)),
    }
}

pub fn cmd_verify(circuit_path: &Path, op_path: &Path, opts: &Options) -> Outcome {
    let mut run = Run::new("verify", opts);
    run.input("circuit", circuit_path.display().to_string());
    run.input("operator", op_path.display().to_string());
    let loaded = read(circuit_path)
        .and_then(|t| parse_circuit(&t).map_err(|e| format!("{}: {e}", circuit_path.display())))
        .and_then(|c| {
            let u = read(op_path)
                .and_then(|t| parse_operator_for(&t, c.doubled().base()).map_err(|e| format!("{}: {e}", op_path.display())))?;
            Ok((c, u))
        });
    let (circuit, u) = match loaded {
        Ok(p) => p,
        Err(e) => return run.input_error(e),
    };
    match representation_deviation(&circuit, &u, opts.samples, opts.seed) {
        Ok(r) => {
            let section = VerificationSection::new(&r, opts.verify_tol);
            run.say(format!(
                "max deviation {:e} over {} inputs (worst: {}), tolerance {:e}: {}",
                r.max_deviation,
                r.inputs_checked,
                r.worst_input,
                opts.verify_tol,
                pass_word(section.passed)
            ));
            let ok = section.passed;
            run.report.verification = Some(section);
            run.finish(verdict(ok), None)
        }
        Err(e) => run.input_error(e),
    }
}

fn write_artifact(dir: &Path, name: &str, text: &str) -> Result<(), String> {
    fs::write(dir.join(name), text).map_err(|e| format!("cannot write {}: {e}", dir.join(name).display()))
}

/// Runs a zoo instance end to end. Causal instances must certify, decompose
/// and verify; non-causal ones must be rejected by both certifiers and by
/// synthesis. Either outcome as designed exits 0.
pub fn cmd_demo(name: &str, opts: &Options, out_dir: Option<&Path>) -> Outcome {
    let mut run = Run::new("demo", opts);
    run.input("name", name);
    let resolved = DEMO_ALIASES.iter().find(|(a, _)| *a == name).map_or(name, |(_, n)| *n);
    let Some(entry) = zoo::entry(resolved) else {
        let known: Vec<&str> = DEMO_ALIASES.iter().map(|(a, _)| *a).chain(zoo::names()).collect();
        return run.input_error(format!("unknown demo {name:?}; known: {}", known.join(", ")));
    };
    run.input("instance", entry.name);
    run.say(format!("{}: {}", entry.name, entry.description));
    if let Some(dir) = out_dir {
        let written = write_artifact(dir, "graph.json", &graph_to_json(&entry.graph))
            .and_then(|_| write_artifact(dir, "operator.json", &operator_to_json(&entry.unitary)));
        if let Err(e) = written {
            return run.input_error(e);
        }
    }

    let certified = match certify(&mut run, &entry.unitary, &entry.graph, opts, entry.causal) {
        Ok(ok) => ok,
        Err(e) => return run.input_error(e),
    };
    if !entry.causal {
        let both_fail = run.report.causality.as_ref().is_some_and(|c| !c.overall)
            && run.report.sampled.as_ref().is_some_and(|c| !c.overall);
        let refused = matches!(
            decompose(&mut run, &entry.unitary, &entry.graph, &Schedule::Greedy, opts.tol),
            Decomposed::Refused(_)
        );
        let ok = both_fail && refused;
        run.say(format!("non-causal control rejected as designed: {}", pass_word(ok)));
        return run.finish(verdict(ok), None);
    }

    let assembly = match decompose(&mut run, &entry.unitary, &entry.graph, &entry.schedule, opts.tol) {
        Decomposed::Done(a) => a,
        Decomposed::Refused(m) => return run.finish(Verdict::Fail, Some(m)),
        Decomposed::Input(m) => return run.finish(Verdict::InputError, Some(m)),
    };
    if let Some(dir) = out_dir {
        if let Err(e) = write_artifact(dir, "circuit.json", &circuit_to_json(&assembly.circuit)) {
            return run.input_error(e);
        }
    }
    let verified = match representation_deviation(&assembly.circuit, &entry.unitary, opts.samples, opts.seed) {
        Ok(r) => {
            let section = VerificationSection::new(&r, opts.verify_tol);
            run.say(format!(
                "circuit vs |phi> (x) U|psi>: max deviation {:e} over {} inputs: {}",
                r.max_deviation,
                r.inputs_checked,
                pass_word(section.passed)
            ));
            let ok = section.passed;
            run.report.verification = Some(section);
            ok
        }
        Err(e) => return run.input_error(e),
    };
    let mut ok = certified && verified && run.report.decomposition.as_ref().is_some_and(|d| d.within_bound);

    if let Some(spec) = &entry.torus {
        let block_opts = BlockOptions {
            tol: opts.tol,
            verify_tol: opts.verify_tol,
            num_random: opts.samples,
            seed: opts.seed,
        };
        match block_representation(&entry.unitary, spec, &block_opts) {
            Ok(rep) => {
                let section = BlockSection::new(&rep, spec.axes());
                run.say(format!(
                    "block representation: {} layers (expected {}), K translation deviation {:e}, |HE - EG| {:e}",
                    section.layer_count, section.expected_layers, section.translation_deviation, section.he_eg_deviation
                ));
                ok &= section.layer_count == section.expected_layers && section.s_stage_is_swap;
                run.report.block_representation = Some(section);
            }
            Err(e) => {
                run.say(format!("block representation failed: {e}"));
                ok = false;
            }
        }
    }
    run.finish(verdict(ok), None)
}

