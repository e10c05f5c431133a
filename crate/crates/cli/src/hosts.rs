use std::path::Path;

use digrid::catalog::{instantiate, HostSpec};
use digrid::io::{HostDoc, RayFamilyDoc};
use digrid::necklaces::NecklaceKind;
use digrid::{GridKind, RayedHost};
use serde_json::json;

use crate::{CliError, HostArgs};

/// Host names accepted by `--host`.
pub const HOST_NAMES: &str =
    "bidirected-qg, inward-ddqg, outward-ddqg, chain-in, chain-out, funnel, \
     bidirected-ng, inward-ng, outward-ng";

/// The catalog spec behind a short host name. Grid and necklace names get
/// `levels` rays.
pub fn spec_for(name: &str, levels: u32) -> Result<HostSpec, CliError> {
    if GridKind::from_slug(name).is_some() {
        return Ok(HostSpec::new(
            "canonical-grid",
            json!({ "kind": name, "levels": levels }),
        ));
    }
    if NecklaceKind::from_slug(name).is_some() {
        return Ok(HostSpec::new(
            "necklace-grid",
            json!({ "kind": name, "levels": levels }),
        ));
    }
    match name {
        "chain-in" => Ok(HostSpec::new("chain-dinf", json!({ "orientation": "in" }))),
        "chain-out" => Ok(HostSpec::new("chain-dinf", json!({ "orientation": "out" }))),
        "funnel" => Ok(HostSpec::new("funnel", json!({}))),
        other => Err(CliError::usage(format!(
            "unknown host {other:?}; expected one of {HOST_NAMES}"
        ))),
    }
}

pub fn read_spec(path: &Path) -> Result<HostSpec, CliError> {
    let text = crate::read_input(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

/// A host from `--host` or `--spec`, with the spec that rebuilds it.
pub fn resolve(args: &HostArgs, levels: u32) -> Result<(HostSpec, RayedHost), CliError> {
    let spec = match (&args.host, &args.spec) {
        (Some(n), None) => spec_for(n, args.host_levels.unwrap_or(levels))?,
        (None, Some(p)) => read_spec(p)?,
        _ => return Err(CliError::usage("give exactly one of --host and --spec")),
    };
    let host = instantiate(&spec)?;
    Ok((spec, host))
}

/// A custom-finite spec freezing the truncation of `host` at `depth`.
pub fn frozen_spec(host: &RayedHost, depth: usize) -> HostSpec {
    let t = host.truncate(depth);
    let doc = HostDoc {
        schema: digrid::io::SCHEMA.to_string(),
        graph: digrid::io::GraphDoc::from_graph(&t.graph),
        family: RayFamilyDoc::from_rays(host.orientation, t.rays.values()),
    };
    HostSpec::new("custom-finite", json!({ "host": doc }))
}
