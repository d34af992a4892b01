//! End-to-end acceptance run. Prints one line per criterion and exits
//! non-zero if any criterion fails.

use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use qlocal::causality::{check_causal_heisenberg, check_causal_state_sampled, check_inverse_causal};
use qlocal::localizer::{assemble, synthesize_k, verify_representation, Schedule};
use qlocal::qca::{block_representation, make_shift_qca, make_torus_graph, shift_graph, BlockOptions, TorusSpec};
use qlocal::zoo::{self, ZooEntry};
use qlocal::Error;
use qlocal_cli::commands::{cmd_check, cmd_decompose, cmd_demo, cmd_verify, Options, EXIT_FAILURE};
use qlocal_cli::format::{
    circuit_to_json, graph_to_json, operator_to_json, parse_circuit, parse_graph, parse_operator_for,
};
use qlocal_cli::report::ReportDocument;

const TOL: f64 = 1e-9;
const VERIFY_TOL: f64 = 1e-8;
const SAMPLES: usize = 20;
const SEED: u64 = 0;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);
type ReportRun<'a> = Box<dyn Fn() -> ReportDocument + 'a>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn causal() -> Vec<ZooEntry> {
    zoo::CAUSAL.iter().map(|n| zoo::entry(n).unwrap()).collect()
}

fn non_causal() -> Vec<ZooEntry> {
    zoo::NON_CAUSAL.iter().map(|n| zoo::entry(n).unwrap()).collect()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let good = causal();
    for e in &good {
        let h = check_causal_heisenberg(&e.unitary, &e.graph, TOL).map_err(|x| format!("{}: {x}", e.name))?;
        let s = check_causal_state_sampled(&e.unitary, &e.graph, SAMPLES, SEED, TOL).map_err(|x| format!("{}: {x}", e.name))?;
        ensure(h.overall, || format!("{} fails the Heisenberg certificate: {:?}", e.name, h.failing_nodes()))?;
        ensure(s.overall, || format!("{} fails the sampled certificate: {:?}", e.name, s.failing_nodes()))?;
    }
    let bad = non_causal();
    for e in &bad {
        let h = check_causal_heisenberg(&e.unitary, &e.graph, TOL).map_err(|x| format!("{}: {x}", e.name))?;
        let s = check_causal_state_sampled(&e.unitary, &e.graph, SAMPLES, SEED, TOL).map_err(|x| format!("{}: {x}", e.name))?;
        ensure(!h.overall && !s.overall, || format!("{} was not rejected by both certifiers", e.name))?;
        let witnessed = |r: &qlocal::causality::CausalityReport| r.per_node.iter().any(|v| !v.passed && v.witness.is_some());
        ensure(witnessed(&h) && witnessed(&s), || format!("{} rejected without a witness", e.name))?;
        ensure(h.failing_nodes() == s.failing_nodes(), || format!("{}: pictures disagree on failing nodes", e.name))?;
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 60.0, || format!("took {secs:.1} s"))?;
    Ok(format!("{} causal pass both pictures, {} controls fail both with witnesses, {secs:.1} s", good.len(), bad.len()))
}

fn criterion_2() -> Outcome {
    let good = causal();
    for e in &good {
        let r = check_inverse_causal(&e.unitary, &e.graph, TOL).map_err(|x| format!("{}: {x}", e.name))?;
        ensure(r.overall, || format!("{}: adjoint not causal on the transpose, nodes {:?}", e.name, r.failing_nodes()))?;
    }
    Ok(format!("{} adjoints certified on transposed graphs", good.len()))
}

fn criterion_3() -> Outcome {
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    let good = causal();
    for e in &good {
        let a = assemble(&e.unitary, &e.graph, TOL, &e.schedule).map_err(|x| format!("{}: {x}", e.name))?;
        let base = e.graph.layout().total_dim();
        let v = verify_representation(&a.circuit, &e.unitary, SAMPLES, SEED, VERIFY_TOL).map_err(|x| format!("{}: {x}", e.name))?;
        ensure(v.inputs_checked == base + SAMPLES, || format!("{}: checked {} inputs", e.name, v.inputs_checked))?;
        let loc = a.report.localization_residuals.iter().copied().fold(0.0, f64::max);
        ensure(loc <= TOL, || format!("{}: localization residual {loc:e}", e.name))?;
        ensure(a.report.max_commutator <= TOL, || format!("{}: commutator {:e}", e.name, a.report.max_commutator))?;
        worst = (worst.0.max(v.max_deviation), worst.1.max(loc), worst.2.max(a.report.max_commutator));
    }
    Ok(format!(
        "{} circuits; max deviation {:.3e}, max localization residual {:.3e}, max commutator {:.3e}",
        good.len(),
        worst.0,
        worst.1,
        worst.2
    ))
}

fn criterion_4() -> Outcome {
    let mut rows = Vec::new();
    for e in causal() {
        let a = assemble(&e.unitary, &e.graph, TOL, &e.schedule).map_err(|x| format!("{}: {x}", e.name))?;
        let deg = a.report.degree.max_closed_in;
        let bound = deg * deg;
        ensure(a.report.layer_count <= bound && a.report.depth <= bound + 2, || {
            format!("{}: {} layers, depth {}, bound {bound}", e.name, a.report.layer_count, a.report.depth)
        })?;
        rows.push(format!("{} {}/{} d{}", e.name, a.report.layer_count, bound, a.report.depth));
    }
    Ok(format!("layers/bound depth: {}", rows.join(", ")))
}

fn criterion_5() -> Outcome {
    let mut parts = Vec::new();
    for (name, layers) in [("qca-1d", 2usize), ("qca-2d", 4)] {
        let start = Instant::now();
        let e = zoo::entry(name).unwrap();
        let spec = e.torus.clone().unwrap();
        let opts = BlockOptions {
            tol: TOL,
            verify_tol: VERIFY_TOL,
            num_random: SAMPLES,
            seed: SEED,
        };
        let rep = block_representation(&e.unitary, &spec, &opts).map_err(|x| format!("{name}: {x}"))?;
        ensure(rep.layers.len() == layers, || format!("{name}: {} layers", rep.layers.len()))?;
        ensure(rep.inputs_checked == spec.layout().total_dim() + SAMPLES, || format!("{name}: too few inputs"))?;
        ensure(rep.he_eg_deviation <= VERIFY_TOL, || format!("{name}: |HE-EG| {:e}", rep.he_eg_deviation))?;
        ensure(rep.translation_deviation <= TOL, || format!("{name}: K translation {:e}", rep.translation_deviation))?;
        let d = spec.cell_dim();
        let swap_ok = rep.s_stage.indexed_iter().all(|((i, j), z)| {
            let want = if i == (j % d) * d + j / d { 1.0 } else { 0.0 };
            z.re == want && z.im == 0.0
        });
        ensure(swap_ok, || format!("{name}: S stage is not the tape swap"))?;
        let secs = start.elapsed().as_secs_f64();
        ensure(secs < 300.0, || format!("{name}: took {secs:.1} s"))?;
        parts.push(format!(
            "{name} {} layers |HE-EG| {:.2e} K-shift {:.2e} ({secs:.1} s)",
            rep.layers.len(),
            rep.he_eg_deviation,
            rep.translation_deviation
        ));
    }
    Ok(parts.join("; "))
}

fn criterion_6() -> Outcome {
    let spec = TorusSpec::new(vec![4], 2, 0).unwrap();
    let shift = make_shift_qca(&spec).unwrap();
    let torus = make_torus_graph(&spec);
    let h = check_causal_heisenberg(&shift, &torus, TOL).map_err(|e| e.to_string())?;
    ensure(!h.overall, || "shift certified on the radius-half torus".into())?;
    ensure(
        matches!(assemble(&shift, &torus, TOL, &Schedule::TorusOffsets(vec![4])), Err(Error::LocalizationViolation { .. })),
        || "shift decomposed on the radius-half torus".into(),
    )?;
    let ring = shift_graph(&spec).unwrap();
    let a = assemble(&shift, &ring, TOL, &Schedule::Greedy).map_err(|e| e.to_string())?;
    let v = verify_representation(&a.circuit, &shift, SAMPLES, SEED, VERIFY_TOL).map_err(|e| e.to_string())?;
    Ok(format!(
        "radius-half: failing nodes {:?}; edges (x,x-1): {} layer, depth {}, deviation {:.2e}",
        h.failing_nodes(),
        a.report.layer_count,
        a.circuit.depth(),
        v.max_deviation
    ))
}

fn write_instance(dir: &Path, e: &ZooEntry) -> (std::path::PathBuf, std::path::PathBuf) {
    let g = dir.join(format!("{}.graph.json", e.name));
    let u = dir.join(format!("{}.operator.json", e.name));
    fs::write(&g, graph_to_json(&e.graph)).unwrap();
    fs::write(&u, operator_to_json(&e.unitary)).unwrap();
    (g, u)
}

fn quiet() -> Options {
    Options {
        timing: false,
        ..Options::default()
    }
}

fn criterion_7() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut total = 0;
    for e in non_causal() {
        let (g, u) = write_instance(dir.path(), &e);
        let out = dir.path().join(format!("{}.circuit.json", e.name));
        let run = cmd_decompose(&g, &u, &out, &quiet());
        ensure(run.exit_code == EXIT_FAILURE, || format!("{}: exit {}", e.name, run.exit_code))?;
        ensure(!out.exists(), || format!("{}: circuit written despite failure", e.name))?;
        let parsed = ReportDocument::parse(&run.report.to_json()).map_err(|x| x.to_string())?;
        let failures = &parsed.synthesis_failures;
        ensure(failures.iter().any(|f| f.kind == "localization"), || format!("{}: no localization failure", e.name))?;
        // recompute from the inputs named in the report
        let graph = parse_graph(&fs::read_to_string(&parsed.inputs["graph"]).unwrap()).map_err(|x| x.to_string())?;
        let op = parse_operator_for(&fs::read_to_string(&parsed.inputs["operator"]).unwrap(), &graph)
            .map_err(|x| x.to_string())?;
        for f in failures {
            match synthesize_k(&op, &graph, f.node, parsed.settings.tol) {
                Err(Error::LocalizationViolation { node: Some(n), residual }) => {
                    ensure(n == f.node && residual.to_bits() == f.residual.to_bits(), || {
                        format!("{} node {}: recomputed {residual:e} vs reported {:e}", e.name, f.node, f.residual)
                    })?;
                }
                other => return Err(format!("{} node {}: recomputation gave {other:?}", e.name, f.node)),
            }
        }
        total += failures.len();
    }
    Ok(format!("{total} reported failures recomputed bit for bit"))
}

fn criterion_8() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let opts = quiet();
    let mut reports = 0;
    let mut artifacts = 0;
    for e in zoo::zoo() {
        let (g, u) = write_instance(dir.path(), &e);
        let graph_text = graph_to_json(&e.graph);
        let parsed_graph = parse_graph(&graph_text).map_err(|x| x.to_string())?;
        ensure(parsed_graph == e.graph && graph_to_json(&parsed_graph) == graph_text, || format!("{}: graph", e.name))?;
        let op_text = operator_to_json(&e.unitary);
        let parsed_op = parse_operator_for(&op_text, &e.graph).map_err(|x| x.to_string())?;
        ensure(parsed_op == e.unitary.relabel(e.graph.layout()).unwrap(), || format!("{}: operator", e.name))?;
        ensure(operator_to_json(&parsed_op) == op_text, || format!("{}: operator text", e.name))?;
        artifacts += 2;
        if let Ok(a) = assemble(&e.unitary, &e.graph, TOL, &e.schedule) {
            let text = circuit_to_json(&a.circuit);
            let back = parse_circuit(&text).map_err(|x| format!("{}: {x}", e.name))?;
            ensure(back == a.circuit && circuit_to_json(&back) == text, || format!("{}: circuit", e.name))?;
            artifacts += 1;
        }

        let out = dir.path().join(format!("{}.circuit.json", e.name));
        let runs: Vec<ReportRun> = vec![
            Box::new(|| cmd_check(&g, &u, &Options { inverse: true, ..opts.clone() }).report),
            Box::new(|| cmd_decompose(&g, &u, &out, &opts).report),
            Box::new(|| cmd_demo(e.name, &opts, None).report),
        ];
        for run in &runs {
            let first = run().to_json();
            let second = run().to_json();
            ensure(first == second, || format!("{}: report differs between runs", e.name))?;
            let parsed = ReportDocument::parse(&first).map_err(|x| x.to_string())?;
            ensure(parsed.to_json() == first, || format!("{}: report round trip", e.name))?;
            reports += 1;
        }
        if out.exists() {
            let first = cmd_verify(&out, &u, &opts).report.to_json();
            ensure(first == cmd_verify(&out, &u, &opts).report.to_json(), || format!("{}: verify report", e.name))?;
            reports += 1;
        }
    }
    Ok(format!("{reports} reports byte-stable, {artifacts} artifacts round-trip exactly"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 causality pictures agree on the zoo", criterion_1),
        ("2 adjoints are causal on transposed graphs", criterion_2),
        ("3 circuits represent every causal instance", criterion_3),
        ("4 layer count within the degree bound", criterion_4),
        ("5 QCA block representation with 2^n layers", criterion_5),
        ("6 shift needs ancillas", criterion_6),
        ("7 synthesis failures recompute from reports", criterion_7),
        ("8 determinism and round trips", criterion_8),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
