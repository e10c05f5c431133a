//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use digrid::analysis::{dominated_to_bidirected, main_pipeline, Route, WITNESS_PATHS};
use digrid::catalog::{canonical_grid, chain_dinf, funnel};
use digrid::contraction::{contract, degree_dichotomy, ContractionResult, Dichotomy};
use digrid::graph::{disjoint_paths, shortest_path, PathQuery};
use digrid::grids::{
    build_special_out_ray, build_staircase, natural_certificate, validate_grid, validate_staircase,
    verify_special_out_ray,
};
use digrid::necklaces::{
    arch_separation, build_transversal_paths, check_arch_separation, check_girder_obstruction,
    girder_crossings, necklace_grid_certificate, necklace_grid_host, necklace_pipeline,
    necklace_to_ray_minor, validate_necklace_grid, NecklaceKind,
};
use digrid::rays::{build_spine, build_spine_with, validate_witness, Schedule};
use digrid::{EdgeId, GridKind, MultiDigraph, Orientation, PathSeq, RayIndex, RayedHost, VertexId};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);
/// Name, host, depth, and the routes that count as the intended branch.
type BranchCase = (&'static str, RayedHost, usize, fn(&Route) -> bool);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

/// Sample `count` girder edges (with replacement) and check each deletion
/// is rejected by `check`.
fn deletions_reject(
    rng: &mut ChaCha8Rng,
    g: &MultiDigraph,
    girder_edges: &[EdgeId],
    count: usize,
    check: impl Fn(&MultiDigraph) -> bool,
) -> Result<(), String> {
    for _ in 0..count {
        let e = *girder_edges.choose(rng).ok_or("no girder edges")?;
        let mut h = g.clone();
        h.remove_edge(e).ok_or(format!("edge {e:?} missing"))?;
        ensure!(!check(&h), "deleting {e:?} was accepted");
    }
    Ok(())
}

fn round_trip() -> Outcome {
    const BUDGET: Duration = Duration::from_secs(30);
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut instances = 0;
    for n in 2..=8u32 {
        let depth = 2 * n as usize + 2;
        for kind in GridKind::ALL {
            let host = canonical_grid(kind, n);
            let (g, cert) = natural_certificate(&host, n, depth).map_err(|e| e.to_string())?;
            validate_grid(&g, &cert, &host, depth).map_err(|r| format!("{kind:?} n={n}: {r}"))?;
            let edges: Vec<EdgeId> = cert.girders.iter().flat_map(|gd| gd.path().edges).collect();
            deletions_reject(&mut rng, &g, &edges, 50, |h| {
                validate_grid(h, &cert, &host, depth).is_ok()
            })
            .map_err(|m| format!("{kind:?} n={n}: {m}"))?;
            instances += 1;
        }
        for kind in NecklaceKind::ALL {
            let (g, cert) = necklace_grid_certificate(kind, n, depth).map_err(|e| e.to_string())?;
            validate_necklace_grid(&g, &cert).map_err(|r| format!("{kind:?} n={n}: {r}"))?;
            let edges: Vec<EdgeId> = cert
                .girders
                .iter()
                .flat_map(|gd| gd.jumps.iter().flat_map(|p| p.edges.clone()))
                .collect();
            deletions_reject(&mut rng, &g, &edges, 50, |h| {
                validate_necklace_grid(h, &cert).is_ok()
            })
            .map_err(|m| format!("{kind:?} n={n}: {m}"))?;
            instances += 1;
        }
    }
    let took = start.elapsed();
    ensure!(took < BUDGET, "took {took:?}, budget {BUDGET:?}");
    Ok(format!(
        "{instances} instances, 50 deletions each, {took:.1?}"
    ))
}

fn disjoint_path_oracle() -> Outcome {
    const BUDGET: Duration = Duration::from_secs(60);
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for case in 0..200 {
        let n = rng.gen_range(1..=7);
        let p = rng.gen_range(0.1..0.6);
        let g = common::random_digraph(&mut rng, n, p);
        let a = common::random_subset(&mut rng, n);
        let b = common::random_subset(&mut rng, n);
        let forbidden: BTreeSet<VertexId> =
            (0..n).filter(|_| rng.gen_bool(0.1)).map(VertexId).collect();
        let got = disjoint_paths(&g, &a, &b, &forbidden, usize::MAX)
            .map_err(|e| e.to_string())?
            .len();
        let want = common::brute_disjoint_count(&g, &a, &b, &forbidden);
        ensure!(
            got == want,
            "case {case}: flow found {got}, enumeration {want}"
        );
    }
    let took = start.elapsed();
    ensure!(took < BUDGET, "took {took:?}, budget {BUDGET:?}");
    Ok(format!("200/200 exact, {took:.1?}"))
}

fn quotient(host: &RayedHost, rounds: usize, depth: usize) -> Result<ContractionResult, String> {
    let spine = build_spine(host, rounds, depth).map_err(|e| e.to_string())?;
    let j = host.truncate(depth).ray_indices();
    contract(host, &spine, &j, None).map_err(|e| e.to_string())
}

/// What the dichotomy must say, recounted edge by edge from the quotient.
fn census_answer(
    c: &ContractionResult,
    finite: &BTreeSet<RayIndex>,
    direction: Orientation,
    threshold: Option<u64>,
) -> Dichotomy {
    let out = direction == Orientation::Out;
    let ends = |tail: RayIndex, head: RayIndex| if out { (tail, head) } else { (head, tail) };
    for &j in finite {
        let mut seen = BTreeSet::new();
        for e in c.dj.edges() {
            let (me, other) = ends(RayIndex::from_vertex(e.tail), RayIndex::from_vertex(e.head));
            if me == j && other != j {
                seen.insert(other);
            }
        }
        let certified = if out {
            &c.unbounded_out
        } else {
            &c.unbounded_in
        }
        .contains(&j);
        if certified || threshold.is_some_and(|t| seen.len() as u64 >= t) {
            return Dichotomy::InfiniteDegreeVertex(j);
        }
    }
    for (&(u, v), m) in &c.multiplicity {
        let unbounded = match (m, threshold) {
            (digrid::Multiplicity::CertifiedUnbounded, _) => true,
            (digrid::Multiplicity::Finite(k), Some(t)) => *k >= t,
            _ => false,
        };
        let (me, other) = ends(u, v);
        if unbounded && finite.contains(&me) && !finite.contains(&other) {
            return Dichotomy::CrossEdge(u, v);
        }
    }
    Dichotomy::Undetermined(Vec::new())
}

fn dichotomy_census() -> Outcome {
    let depth = 12;
    let hosts = [
        ("chain-dinf in", chain_dinf(GridKind::InwardDDQG)),
        ("chain-dinf out", chain_dinf(GridKind::OutwardDDQG)),
        ("funnel", funnel()),
    ];
    let mut checked = 0;
    for (name, host) in &hosts {
        let c = quotient(host, 12, depth)?;
        let rays: Vec<RayIndex> = c.j_set.iter().copied().take(10).collect();
        for mask in 1u32..(1 << rays.len()) {
            let finite: BTreeSet<RayIndex> = (0..rays.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| rays[i])
                .collect();
            for direction in [Orientation::Out, Orientation::In] {
                for threshold in [None, Some(3)] {
                    let got = degree_dichotomy(&c, &finite, direction, threshold);
                    let want = census_answer(&c, &finite, direction, threshold);
                    let same = match (&got, &want) {
                        (Dichotomy::Undetermined(_), Dichotomy::Undetermined(_)) => true,
                        _ => got == want,
                    };
                    ensure!(same, "{name} {finite:?} {direction:?} {threshold:?}: got {got:?}, census {want:?}");
                    checked += 1;
                }
            }
        }
    }
    Ok(format!(
        "{checked} (host, subset, direction, threshold) cases exact"
    ))
}

fn staircase_avoidance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let depth = 24;
    let hosts: Vec<(RayedHost, ContractionResult)> = GridKind::ALL
        .into_iter()
        .map(|k| {
            let h = canonical_grid(k, 5);
            quotient(&h, 16, depth).map(|c| (h, c))
        })
        .collect::<Result<_, _>>()?;
    for trial in 0..100 {
        let (host, c) = &hosts[trial % hosts.len()];
        // a random walk of distinct rays along unbounded quotient edges
        let dinf = &c.dinf.graph;
        let rays: Vec<RayIndex> = c.j_set.iter().copied().collect();
        let mut seq = vec![*rays.choose(&mut rng).unwrap()];
        let len = rng.gen_range(2..=5);
        while seq.len() < len {
            let here = seq.last().unwrap().vertex();
            let next: Vec<RayIndex> = dinf
                .out_neighbors(here)
                .into_iter()
                .map(RayIndex::from_vertex)
                .filter(|r| !seq.contains(r))
                .collect();
            let Some(r) = next.choose(&mut rng) else {
                break;
            };
            seq.push(*r);
        }
        if seq.len() < 2 {
            return Err(format!(
                "trial {trial}: ray {:?} has no unbounded out-edge",
                seq[0]
            ));
        }
        let t = host.truncate(depth);
        let low: Vec<VertexId> = t
            .graph
            .vertices()
            .iter()
            .copied()
            .filter(|v| digrid::layout::grid_coords(*v).1 < 6)
            .collect();
        let count = rng.gen_range(0..=6);
        let x: BTreeSet<VertexId> = low.choose_multiple(&mut rng, count).copied().collect();
        let s = build_staircase(host, c, &seq, &x, depth)
            .map_err(|e| format!("trial {trial} {seq:?}: {e}"))?;
        validate_staircase(&s, host, depth).map_err(|r| format!("trial {trial}: {r}"))?;
        ensure!(
            s.path().vertex_set().is_disjoint(&x),
            "trial {trial}: staircase meets x"
        );
        ensure!(
            s.sequence == seq,
            "trial {trial}: sequence {:?} != {seq:?}",
            s.sequence
        );
    }
    Ok("100/100 avoid x and validate".into())
}

fn catalog_hosts() -> Vec<(String, RayedHost)> {
    let mut out: Vec<(String, RayedHost)> = GridKind::ALL
        .into_iter()
        .map(|k| (format!("canonical {}", k.slug()), canonical_grid(k, 4)))
        .collect();
    out.push(("chain-dinf in".into(), chain_dinf(GridKind::InwardDDQG)));
    out.push(("chain-dinf out".into(), chain_dinf(GridKind::OutwardDDQG)));
    out.push(("funnel".into(), funnel()));
    out.extend(
        NecklaceKind::ALL
            .into_iter()
            .map(|k| (format!("necklace {}", k.slug()), necklace_grid_host(k, 3))),
    );
    out
}

fn spine_prefixes() -> Outcome {
    let depth = 24;
    let hosts = catalog_hosts();
    for (name, host) in &hosts {
        let first3: Vec<RayIndex> = host
            .truncate(depth)
            .ray_indices()
            .into_iter()
            .take(3)
            .collect();
        let three = Schedule::round_robin(first3.iter().copied());
        // the full round-robin never returns to ray 1 by round 9 on hosts with
        // one ray per level, so visits are counted on the first three rays' schedule
        for (label, schedule) in [("all rays", None), ("first three", Some(&three))] {
            let spines: Vec<_> = (1..=11)
                .map(|r| match schedule {
                    None => build_spine(host, r, depth),
                    Some(s) => build_spine_with(host, r, depth, s, &BTreeSet::new()),
                })
                .map(|s| s.map_err(|e| format!("{name} ({label}): {e}")))
                .collect::<Result<_, _>>()?;
            for (r, w) in spines.windows(2).enumerate() {
                ensure!(
                    w[0].root_first_path().is_prefix_of(&w[1].root_first_path()),
                    "{name} ({label}): round {} is not a prefix of round {}",
                    r + 1,
                    r + 2
                );
            }
            if schedule.is_some() {
                for r in &first3 {
                    let seen = spines[8].visit_count(*r);
                    ensure!(
                        seen >= 3,
                        "{name}: ray {r:?} visited {seen} times by round 9"
                    );
                }
            }
        }
    }
    Ok(format!("{} catalog hosts, rounds 1..=11", hosts.len()))
}

/// True when `piece` is a run of consecutive vertices of `ray`.
fn is_ray_piece(piece: &[VertexId], ray: &[VertexId]) -> bool {
    !piece.is_empty() && ray.windows(piece.len()).any(|w| w == piece)
}

fn pipeline_branches() -> Outcome {
    const BUDGET: Duration = Duration::from_secs(120);
    let cases: [BranchCase; 4] = [
        (
            "strong component",
            canonical_grid(GridKind::BidirectedQG, 5),
            16,
            |r| *r == Route::StrongComponent,
        ),
        ("in-ray", chain_dinf(GridKind::InwardDDQG), 16, |r| {
            *r == Route::InRay
        }),
        ("out-ray", chain_dinf(GridKind::OutwardDDQG), 16, |r| {
            *r == Route::OutRay
        }),
        ("path family", funnel(), 32, |r| {
            matches!(r, Route::Restricted { .. } | Route::ConnectingSpine)
        }),
    ];
    let mut lines = Vec::new();
    for (name, host, depth, branch) in &cases {
        let start = Instant::now();
        let run = main_pipeline(host, 4, *depth, None).map_err(|e| format!("{name}: {e}"))?;
        let took = start.elapsed();
        ensure!(branch(&run.route), "{name}: took route {:?}", run.route);
        ensure!(
            run.certificate.levels() == 4,
            "{name}: {} levels",
            run.certificate.levels()
        );
        validate_grid(&run.graph, &run.certificate, host, *depth)
            .map_err(|r| format!("{name}: {r}"))?;
        let t = host.truncate(*depth);
        for v in run.certificate.verticals.values() {
            let ray = &t.ray(v.index).map_err(|e| e.to_string())?.vertices;
            ensure!(
                is_ray_piece(&v.vertices, ray),
                "{name}: vertical {:?} is not a piece of its ray",
                v.index
            );
        }
        ensure!(took < BUDGET, "{name}: took {took:?}");
        lines.push(format!("{name} {took:.1?}"));
    }
    Ok(format!("4/4 ({})", lines.join(", ")))
}

fn transform_witnesses() -> Outcome {
    let depth = 16;
    for kind in [GridKind::InwardDDQG, GridKind::OutwardDDQG] {
        let host = chain_dinf(kind);
        let tr = dominated_to_bidirected(&host, 3, depth).map_err(|e| format!("{kind:?}: {e}"))?;
        ensure!(
            tr.certificate.kind == GridKind::BidirectedQG,
            "{kind:?}: got {:?}",
            tr.certificate.kind
        );
        validate_grid(&tr.graph, &tr.certificate, &tr.host, depth)
            .map_err(|r| format!("{kind:?}: {r}"))?;
        let original = host.truncate(depth);
        let new = tr.host.truncate(depth);
        ensure!(
            tr.witnesses.len() == 3,
            "{kind:?}: {} witnesses",
            tr.witnesses.len()
        );
        for w in &tr.witnesses {
            let set =
                |ray: &digrid::RayPrefix| ray.vertices.iter().copied().collect::<BTreeSet<_>>();
            let ri = set(new.ray(w.i).map_err(|e| e.to_string())?);
            let rj = set(original.ray(w.j).map_err(|e| e.to_string())?);
            validate_witness(w, &original.graph, &ri, &rj)
                .map_err(|m| format!("{kind:?} {:?}: {m}", w.i))?;
            ensure!(
                w.forward.len() >= WITNESS_PATHS
                    && w.backward.len() >= WITNESS_PATHS
                    && WITNESS_PATHS >= 3,
                "{kind:?} {:?}: {} forward, {} backward",
                w.i,
                w.forward.len(),
                w.backward.len()
            );
        }
    }
    Ok("inward and outward: bidirected grid, 3 witnesses each with >= 3 paths both ways".into())
}

fn minor_lifting() -> Outcome {
    let depth = 12;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for kind in NecklaceKind::ALL {
        let host = necklace_grid_host(kind, 3);
        let tr = build_transversal_paths(&host, 6, depth).map_err(|e| format!("{kind:?}: {e}"))?;
        let minor = necklace_to_ray_minor(&host, &tr).map_err(|e| format!("{kind:?}: {e}"))?;
        let a: Vec<VertexId> = minor.graph.vertices().iter().copied().collect();
        let path = |s: VertexId, t: VertexId, avoid: &BTreeSet<VertexId>| {
            let (from, to) = (BTreeSet::from([s]), BTreeSet::from([t]));
            shortest_path(&minor.graph, &PathQuery::new(&from, &to, avoid))
        };
        let mut checked = 0;
        for _ in 0..5000 {
            if checked == 20 {
                break;
            }
            let pick: Vec<VertexId> = a.choose_multiple(&mut rng, 4).copied().collect();
            let Some(p) = path(pick[0], pick[1], &BTreeSet::new()) else {
                continue;
            };
            let Some(q) = path(pick[2], pick[3], &p.vertex_set()) else {
                continue;
            };
            let lift = |m: &PathSeq| minor.expand(m).map_err(|e| format!("{kind:?}: {e}"));
            let (hp, hq) = (lift(&p)?, lift(&q)?);
            for (h, m) in [(&hp, &p), (&hq, &q)] {
                h.check_in(&minor.original)
                    .map_err(|e| format!("{kind:?}: {e}"))?;
                ensure!(
                    minor.part_of(h.first()) == Some(m.first()),
                    "{kind:?}: start of lift leaves its part"
                );
                ensure!(
                    minor.part_of(h.last()) == Some(m.last()),
                    "{kind:?}: end of lift leaves its part"
                );
            }
            ensure!(
                hp.vertex_set().is_disjoint(&hq.vertex_set()),
                "{kind:?}: lifts intersect"
            );
            checked += 1;
        }
        ensure!(
            checked == 20,
            "{kind:?}: only {checked} disjoint pairs found"
        );
    }
    for kind in NecklaceKind::ALL {
        let run = necklace_pipeline(&necklace_grid_host(kind, 3), 3, depth)
            .map_err(|e| format!("{kind:?}: {e}"))?;
        validate_necklace_grid(&run.graph, &run.certificate)
            .map_err(|r| format!("{kind:?}: {r}"))?;
        ensure!(
            run.certificate.levels() == 3,
            "{kind:?}: {} levels",
            run.certificate.levels()
        );
    }
    Ok("20 disjoint lifts per kind; 3-level necklace grids on all three kinds".into())
}

fn separations() -> Outcome {
    let depth = 10;
    let dominated = necklace_grid_host(NecklaceKind::OutwardDominatedNG, 3);
    let verdict = check_arch_separation(&dominated, 6, depth).map_err(|e| e.to_string())?;
    ensure!(verdict.is_ok(), "separation rejected: {verdict:?}");
    let control = arch_separation(&dominated, 6, depth, None, false).map_err(|e| e.to_string())?;
    ensure!(
        control.reaches_frontier,
        "control (route kept) stays finite"
    );
    let bidirected = necklace_grid_host(NecklaceKind::BidirectedNG, 3);
    let verdict = check_girder_obstruction(&bidirected, depth).map_err(|e| e.to_string())?;
    ensure!(verdict.is_ok(), "obstruction rejected: {verdict:?}");
    let blocked = girder_crossings(&bidirected, depth, true).map_err(|e| e.to_string())?;
    ensure!(
        blocked.is_empty(),
        "{} paths with the middle tail blocked",
        blocked.len()
    );
    let control = girder_crossings(&bidirected, depth, false).map_err(|e| e.to_string())?;
    ensure!(
        !control.is_empty(),
        "control (middle tail open) found no path"
    );
    Ok("arch cut accepts, control reaches frontier; 0 crossings blocked, 1 open".into())
}

fn special_out_ray_markers() -> Outcome {
    let depth = 12;
    let host = chain_dinf(GridKind::OutwardDDQG);
    let c = quotient(&host, 12, depth)?;
    let out_ray: Vec<RayIndex> = (1..=9).map(RayIndex).collect();
    let t = host.truncate(depth);
    for n in 1..=4 {
        let sh = build_special_out_ray(&host, &c, &out_ray, n, depth)
            .map_err(|e| format!("n={n}: {e}"))?;
        let path = &sh.path.vertices;
        ensure!(sh.markers.len() == n, "n={n}: {} markers", sh.markers.len());
        let at = |v: VertexId| path.iter().position(|w| *w == v);
        for (k, m) in sh.markers.iter().enumerate() {
            let (Some(px), Some(py)) = (at(m.x), at(m.y)) else {
                return Err(format!("n={n}: marker {k} off the path"));
            };
            ensure!(
                out_ray.get(m.label) == Some(&m.ray),
                "n={n}: marker {k} label {} names another ray",
                m.label
            );
            if k > 0 {
                ensure!(
                    m.label > sh.markers[k - 1].label,
                    "n={n}: labels do not increase at {k}"
                );
            }
            // (c) x is where the path first meets its ray, and y is the next ray vertex
            let first = path
                .iter()
                .position(|v| t.ray_position(*v).is_some_and(|(r, _)| r == m.ray));
            ensure!(
                first == Some(px),
                "n={n}: marker {k} is not the first visit to {:?}",
                m.ray
            );
            let (rx, ry) = (t.ray_position(m.x), t.ray_position(m.y));
            ensure!(
                py == px + 1
                    && matches!((rx, ry), (Some((a, i)), Some((b, j))) if a == m.ray && b == m.ray && j == i + 1),
                "n={n}: marker {k} is not a ray edge on the path"
            );
            // (b) after y the path stays above everything the path reached up to x
            let mut reach: BTreeMap<RayIndex, usize> = BTreeMap::new();
            for v in &path[..=px] {
                if let Some((r, i)) = t.ray_position(*v) {
                    let e = reach.entry(r).or_insert(i);
                    *e = (*e).max(i);
                }
            }
            let dips = path[py..].iter().any(|v| {
                t.ray_position(*v)
                    .is_some_and(|(r, i)| reach.get(&r).is_some_and(|top| i <= *top))
            });
            ensure!(!dips, "n={n}: path after marker {k} dips below it");
            // (a) a valid staircase from the first marker's ray up to this one, ending at x
            if k == 0 {
                continue;
            }
            let stair = m
                .staircase
                .as_ref()
                .ok_or(format!("n={n}: marker {k} has no staircase"))?;
            validate_staircase(stair, &host, depth)
                .map_err(|r| format!("n={n} marker {k}: {r}"))?;
            ensure!(
                stair.sequence[..] == out_ray[sh.markers[0].label..=m.label],
                "n={n}: staircase {k} climbs {:?}",
                stair.sequence
            );
            let sp = stair.path().vertices;
            let prev_y = at(sh.markers[k - 1].y).expect("checked");
            let s = at(sp[0]).ok_or(format!("n={n}: staircase {k} off the path"))?;
            ensure!(
                s >= prev_y && path[s..=px] == sp[..],
                "n={n}: staircase {k} is not the stretch before x"
            );
        }
        verify_special_out_ray(&sh, &host).map_err(|r| format!("n={n}: {r}"))?;
    }
    Ok("n = 1..=4: labels, (a) staircases, (b) avoidance, (c) first visits".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("1 generator/recognizer round-trip", round_trip),
        ("2 disjoint-path oracle equivalence", disjoint_path_oracle),
        ("3 degree dichotomy census", dichotomy_census),
        ("4 staircase avoidance", staircase_avoidance),
        ("5 spine prefixes and visits", spine_prefixes),
        ("6 main pipeline branches", pipeline_branches),
        ("7 dominated-to-bidirected transform", transform_witnesses),
        ("8 necklace minor lifting and pipeline", minor_lifting),
        ("9 necklace separations", separations),
        ("10 special out-ray markers", special_out_ray_markers),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("PASS criterion {name}: {detail} [{:.1?}]", start.elapsed()),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name}: {detail} [{:.1?}]", start.elapsed());
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
