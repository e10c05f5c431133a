use std::path::{Path, PathBuf};
use std::process::ExitCode;

use digrid::analysis::{
    analyze_in_structure, analyze_out_structure, dominated_to_bidirected, main_pipeline,
};
use digrid::contraction::contract as contract_family;
use digrid::grids::natural_certificate;
use digrid::io::{sigma_doc, to_dot, DotStyle, GraphDoc};
use digrid::necklaces::{
    arch_separation, check_arch_separation, check_girder_obstruction, girder_crossings,
    necklace_grid_certificate, necklace_pipeline, NecklaceKind,
};
use digrid::rays::build_spine;
use digrid::verdict::Verdict;
use digrid::{EdgeId, GridKind, MultiDigraph, Orientation};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::docs::{self, GridDoc, NecklaceDoc, GRID, NECKLACE};
use crate::hosts::{frozen_spec, resolve, spec_for};
use crate::{read_input, write_output, CliError, Common, Format, HostArgs, NecklaceCheck};

fn extra(pairs: Value) -> Map<String, Value> {
    match pairs {
        Value::Object(m) => m,
        _ => Map::new(),
    }
}

/// Removes `count` distinct girder edges chosen by `seed`.
fn delete_edges(g: &mut MultiDigraph, girder: &[EdgeId], count: usize, seed: u64) -> Vec<EdgeId> {
    let mut pool = girder.to_vec();
    pool.sort();
    pool.dedup();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked: Vec<EdgeId> = pool.choose_multiple(&mut rng, count).copied().collect();
    picked.sort();
    for e in &picked {
        g.remove_edge(*e);
    }
    picked
}

fn emit_grid(doc: &GridDoc, more: Value, common: &Common) -> Result<ExitCode, CliError> {
    let text = match common.format {
        Format::Json => docs::tagged(GRID, doc, extra(more)),
        Format::Dot => {
            let g = doc.graph.to_graph()?;
            to_dot(&g, &docs::grid_style(&doc.certificate, &g))
        }
    };
    write_output(common.out.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

fn emit_necklace(doc: &NecklaceDoc, more: Value, common: &Common) -> Result<ExitCode, CliError> {
    let text = match common.format {
        Format::Json => docs::tagged(NECKLACE, doc, extra(more)),
        Format::Dot => to_dot(
            &doc.graph.to_graph()?,
            &docs::necklace_style(&doc.certificate),
        ),
    };
    write_output(common.out.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

pub fn gen(kind: &str, delete: usize, common: &Common) -> Result<ExitCode, CliError> {
    let (levels, depth) = (common.levels, common.depth());
    let spec = spec_for(kind, levels)?;
    let more = |deleted: &[EdgeId]| {
        if deleted.is_empty() {
            json!({})
        } else {
            json!({ "deleted_edges": deleted })
        }
    };
    if GridKind::from_slug(kind).is_some() {
        let host = digrid::catalog::instantiate(&spec)?;
        let (mut g, certificate) = natural_certificate(&host, levels, depth)?;
        let girder: Vec<EdgeId> = certificate
            .girders
            .iter()
            .flat_map(|gd| gd.path().edges)
            .collect();
        let deleted = delete_edges(&mut g, &girder, delete, common.seed);
        let doc = GridDoc {
            host: spec,
            depth,
            graph: GraphDoc::from_graph(&g),
            certificate,
        };
        return emit_grid(&doc, more(&deleted), common);
    }
    let Some(nk) = NecklaceKind::from_slug(kind) else {
        return Err(CliError::usage(format!("unknown kind {kind:?}")));
    };
    let (mut g, certificate) = necklace_grid_certificate(nk, levels, depth)?;
    let girder: Vec<EdgeId> = certificate
        .girders
        .iter()
        .flat_map(|gd| gd.jumps.iter().flat_map(|p| p.edges.clone()))
        .collect();
    let deleted = delete_edges(&mut g, &girder, delete, common.seed);
    let doc = NecklaceDoc {
        host: spec,
        depth,
        graph: GraphDoc::from_graph(&g),
        certificate,
    };
    emit_necklace(&doc, more(&deleted), common)
}

fn verdict_json(input: &Path, kind: &str, v: &Verdict) -> Value {
    let mut out = json!({
        "schema": digrid::io::SCHEMA,
        "kind": "verdict",
        "input": input.display().to_string(),
        "certificate": kind,
    });
    let fields = match v {
        Ok(()) => json!({ "verdict": "accept" }),
        Err(r) => json!({ "verdict": "reject", "reason": r.reason, "detail": r.detail }),
    };
    out.as_object_mut().expect("object").extend(extra(fields));
    out
}

/// Validates every input on its own thread; one verdict line per input, in order.
pub fn validate(inputs: &[PathBuf]) -> Result<ExitCode, CliError> {
    let texts: Vec<String> = inputs
        .iter()
        .map(|p| read_input(p))
        .collect::<Result<_, _>>()?;
    let results: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = texts
            .iter()
            .map(|t| s.spawn(|| docs::validate_text(t)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("validation thread panicked"))
            .collect()
    });
    let mut lines = String::new();
    let mut rejected = false;
    for (path, r) in inputs.iter().zip(results) {
        let (kind, verdict) = r.map_err(|e| CliError {
            message: format!("{}: {}", path.display(), e.message),
            ..e
        })?;
        rejected |= verdict.is_err();
        lines.push_str(&verdict_json(path, &kind, &verdict).to_string());
        lines.push('\n');
    }
    write_output(None, &lines)?;
    Ok(if rejected {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

pub fn contract(
    args: &HostArgs,
    rounds: Option<usize>,
    common: &Common,
) -> Result<ExitCode, CliError> {
    let depth = common.depth();
    let (spec, host) = resolve(args, common.levels)?;
    let j = host.truncate(depth).ray_indices();
    let rounds = rounds.unwrap_or(depth);
    let spine = build_spine(&host, rounds, depth)?;
    let c = contract_family(&host, &spine, &j, common.threshold)?;
    let text = match common.format {
        Format::Dot => to_dot(&c.collapsed(), &DotStyle::default()),
        Format::Json => {
            let body = json!({
                "host": spec,
                "depth": depth,
                "rounds": rounds,
                "orientation": c.orientation,
                "j_set": c.j_set,
                "graph": GraphDoc::from_graph(&c.dj),
                "sigma": sigma_doc(&c.sigma),
                "loops": c.loops.len(),
                "unbounded_out": c.unbounded_out,
                "unbounded_in": c.unbounded_in,
                "dinf": {
                    "graph": GraphDoc::from_graph(&c.dinf.graph),
                    "provenance": c.dinf.provenance,
                    "approximate": c.dinf.approximate,
                },
            });
            docs::tagged("contraction", &body, Map::new())
        }
    };
    write_output(common.out.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

pub fn analyze(
    args: &HostArgs,
    size: Option<usize>,
    common: &Common,
) -> Result<ExitCode, CliError> {
    let depth = common.depth();
    let (spec, host) = resolve(args, common.levels)?;
    let size = size.unwrap_or(common.levels as usize);
    let verdict = match host.orientation {
        Orientation::Out => analyze_out_structure(&host, depth, common.threshold, size)?,
        Orientation::In => analyze_in_structure(&host, depth, common.threshold, size)?,
    };
    let body = json!({ "host": spec, "depth": depth, "structure": verdict });
    write_output(
        common.out.as_deref(),
        &docs::tagged("structure", &body, Map::new()),
    )?;
    Ok(ExitCode::SUCCESS)
}

pub fn pipeline(args: &HostArgs, common: &Common) -> Result<ExitCode, CliError> {
    let depth = common.depth();
    let (spec, host) = resolve(args, common.levels)?;
    let run = main_pipeline(&host, common.levels, depth, common.threshold)?;
    let stages: Vec<Value> = run
        .audit
        .iter()
        .map(|a| json!({ "stage": a.stage, "inputs": a.inputs, "outputs": a.outputs }))
        .collect();
    let doc = GridDoc {
        host: spec,
        depth,
        graph: GraphDoc::from_graph(&run.graph),
        certificate: run.certificate,
    };
    emit_grid(&doc, json!({ "route": run.route, "audit": stages }), common)
}

pub fn transform(args: &HostArgs, common: &Common) -> Result<ExitCode, CliError> {
    let depth = common.depth();
    let (spec, host) = resolve(args, common.levels)?;
    let tr = dominated_to_bidirected(&host, common.levels, depth)?;
    let doc = GridDoc {
        host: frozen_spec(&tr.host, depth),
        depth,
        graph: GraphDoc::from_graph(&tr.graph),
        certificate: tr.certificate,
    };
    let witnesses: Vec<Value> = tr
        .witnesses
        .iter()
        .map(|w| json!({ "vertical": w.i, "original": w.j, "forward": w.forward.len(), "backward": w.backward.len() }))
        .collect();
    let rerouted = tr.state.connections.iter().filter(|c| c.rerouted).count();
    emit_grid(
        &doc,
        json!({ "original_host": spec, "witnesses": witnesses, "rerouted_connections": rerouted }),
        common,
    )
}

fn check_report(
    kind: &str,
    v: &Verdict,
    report: Value,
    common: &Common,
) -> Result<ExitCode, CliError> {
    let mut body = verdict_json(Path::new("-"), kind, v);
    body.as_object_mut().expect("object").remove("input");
    body.as_object_mut()
        .expect("object")
        .insert("report".into(), report);
    let mut text = serde_json::to_string_pretty(&body).expect("serializable");
    text.push('\n');
    write_output(common.out.as_deref(), &text)?;
    Ok(if v.is_ok() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

pub fn necklace(
    args: &HostArgs,
    check: NecklaceCheck,
    tail: usize,
    common: &Common,
) -> Result<ExitCode, CliError> {
    let depth = common.depth();
    let (spec, host) = resolve(args, common.levels)?;
    match check {
        NecklaceCheck::Grid => {
            let run = necklace_pipeline(&host, common.levels, depth)?;
            let doc = NecklaceDoc {
                host: spec,
                depth,
                graph: GraphDoc::from_graph(&run.graph),
                certificate: run.certificate,
            };
            let more = json!({ "minor_route": run.inner.route, "transversal_paths": run.transversal.paths.len() });
            emit_necklace(&doc, more, common)
        }
        NecklaceCheck::ArchSeparation => {
            let v = check_arch_separation(&host, tail, depth)?;
            let control = arch_separation(&host, tail, depth, None, false)?;
            let cut = arch_separation(&host, tail, depth, None, true)?;
            let report = json!({
                "arch": cut.arch.vertices,
                "route": cut.path.vertices,
                "component_size": cut.component.len(),
                "control_reaches_frontier": control.reaches_frontier,
            });
            check_report("arch-separation", &v, report, common)
        }
        NecklaceCheck::GirderObstruction => {
            let v = check_girder_obstruction(&host, depth)?;
            let open = girder_crossings(&host, depth, false)?;
            let report =
                json!({ "control_paths": open.iter().map(|p| &p.vertices).collect::<Vec<_>>() });
            check_report("girder-obstruction", &v, report, common)
        }
    }
}

pub fn export_dot(input: &Path, out: Option<&Path>) -> Result<ExitCode, CliError> {
    let dot = docs::dot_of_text(&read_input(input)?)?;
    write_output(out, &dot)?;
    Ok(ExitCode::SUCCESS)
}
