use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use super::*;
use crate::catalog::{canonical_grid, chain_dinf, funnel};
use crate::graph::{strong_components, MultiDigraph, VertexId};
use crate::layout::GridKind;
use crate::rays::{Orientation, RayIndex};

fn graph(n: u64, edges: &[(u64, u64)]) -> MultiDigraph {
    let mut g = MultiDigraph::new();
    for v in 0..n {
        g.add_vertex(VertexId(v));
    }
    for &(a, b) in edges {
        g.add_edge(VertexId(a), VertexId(b)).unwrap();
    }
    g
}

#[test]
fn forward_chain_escapes_along_itself() {
    let edges: Vec<(u64, u64)> = (0..9).map(|k| (k, k + 1)).collect();
    let g = graph(10, &edges);
    let open = BTreeSet::from([VertexId(9)]);
    match escape_ray(&g, &open, 6, 0).unwrap() {
        Escape::OutPath { path } => {
            assert_eq!(path.vertices, (0..6).map(VertexId).collect::<Vec<_>>())
        }
        other => panic!("expected an out-path, got {other:?}"),
    }
}

#[test]
fn in_star_reports_its_centre() {
    let edges: Vec<(u64, u64)> = (1..8).map(|k| (k, 0)).collect();
    let g = graph(8, &edges);
    match escape_ray(&g, &BTreeSet::new(), 4, 0).unwrap() {
        Escape::InfiniteInDegreeVertex { vertex, in_degree } => {
            assert_eq!(vertex, VertexId(0));
            assert_eq!(in_degree, 7);
        }
        other => panic!("expected the centre, got {other:?}"),
    }
}

#[test]
fn escape_without_evidence_is_an_obstruction() {
    let g = graph(2, &[(0, 1)]);
    assert!(matches!(
        escape_ray(&g, &BTreeSet::new(), 5, 3),
        Err(crate::Error::ObstructionAtDepth { depth: 3, .. })
    ));
}

proptest! {
    #[test]
    fn escape_paths_meet_components_contiguously(
        edges in prop::collection::vec((0u64..12, 0u64..12), 0..40),
        open in prop::collection::btree_set(0u64..12, 0..4),
    ) {
        let edges: Vec<_> = edges.into_iter().filter(|(a, b)| a != b).collect();
        let g = graph(12, &edges);
        let open: BTreeSet<VertexId> = open.into_iter().map(VertexId).collect();
        if let Ok(Escape::OutPath { path }) = escape_ray(&g, &open, 5, 0) {
            path.check_in(&g).unwrap();
            prop_assert_eq!(path.vertices.len(), 5);
            prop_assert!(path.is_simple());
            let sc = strong_components(&g);
            let comps: Vec<usize> = path.vertices.iter().map(|v| sc.component_of[v]).collect();
            let mut seen = BTreeSet::new();
            for (k, c) in comps.iter().enumerate() {
                if k == 0 || comps[k - 1] != *c {
                    prop_assert!(seen.insert(*c), "component {} entered twice", c);
                }
            }
        }
    }
}

#[test]
fn bidirected_grid_has_a_component() {
    let host = canonical_grid(GridKind::BidirectedQG, 4);
    let v = analyze_out_structure(&host, 10, None, 3).unwrap();
    match v.branch {
        Branch::InfiniteStrongComponent { component } => assert_eq!(component.len(), 4),
        other => panic!("expected a component, got {other:?}"),
    }
    assert!(!v.approximate);
}

#[test]
fn inward_chain_is_an_in_ray() {
    let host = chain_dinf(GridKind::InwardDDQG);
    let v = analyze_out_structure(&host, 10, None, 4).unwrap();
    match v.branch {
        Branch::DirectedRayInDinf { orientation, rays } => {
            assert_eq!(orientation, Orientation::In);
            assert_eq!(rays[0], RayIndex(1));
            assert!(rays.len() >= 4);
        }
        other => panic!("expected a ray, got {other:?}"),
    }
}

#[test]
fn funnel_gives_a_forward_family() {
    let host = funnel();
    let depth = 14;
    let v = analyze_out_structure(&host, depth, None, 4).unwrap();
    let Branch::PathFamily { family } = v.branch else {
        panic!("expected a path family")
    };
    assert_eq!(family.direction, FamilyDirection::Forward);
    assert_eq!(family.indices.len(), 4);
    validate_path_family(&family, &host, depth).unwrap();
}

#[test]
fn reversed_funnel_gives_a_backward_family() {
    let host = funnel().reversed();
    let depth = 14;
    let v = analyze_in_structure(&host, depth, None, 4).unwrap();
    let Branch::PathFamily { family } = v.branch else {
        panic!("expected a path family")
    };
    assert_eq!(family.direction, FamilyDirection::Backward);
    validate_path_family(&family, &host, depth).unwrap();
}

#[test]
fn family_mutations_are_rejected() {
    let host = funnel();
    let depth = 14;
    let Branch::PathFamily { family } =
        analyze_out_structure(&host, depth, None, 3).unwrap().branch
    else {
        panic!("expected a path family")
    };
    let mut missing = family.clone();
    missing.paths.pop();
    assert_eq!(
        validate_path_family(&missing, &host, depth)
            .unwrap_err()
            .reason,
        crate::RejectReason::BadInstance
    );
    let mut backwards = family.clone();
    backwards.direction = FamilyDirection::Backward;
    assert!(validate_path_family(&backwards, &host, depth).is_err());
    // two paths from the same ray forced through one vertex
    let mut clash = family.clone();
    let a = clash
        .paths
        .iter()
        .position(|p| p.from == family.indices[0])
        .unwrap();
    let b = clash
        .paths
        .iter()
        .rposition(|p| p.from == family.indices[0])
        .unwrap();
    assert_ne!(a, b);
    clash.paths[b].path = clash.paths[a].path.clone();
    assert!(validate_path_family(&clash, &host, depth).is_err());
}

fn run_and_validate(host: &crate::rays::RayedHost, n: u32, depth: usize) -> PipelineRun {
    let run = main_pipeline(host, n, depth, None).unwrap();
    crate::grids::validate_grid(&run.graph, &run.certificate, host, depth).unwrap();
    assert_eq!(run.certificate.levels(), n);
    assert!(!run.audit.is_empty());
    run
}

#[test]
fn pipeline_on_bidirected_canonical_takes_the_component_route() {
    let run = run_and_validate(&canonical_grid(GridKind::BidirectedQG, 4), 3, 12);
    assert_eq!(run.route, Route::StrongComponent);
}

#[test]
fn pipeline_on_funnel_finishes_in_the_restricted_host() {
    let host = funnel();
    let run = run_and_validate(&host, 4, 32);
    assert!(
        matches!(run.route, Route::Restricted { .. }),
        "{:?}",
        run.route
    );
    let t = host.truncate(32);
    for v in run.certificate.verticals.values() {
        let ray = t.ray(v.index).unwrap();
        assert_eq!(v.vertices[..], ray.vertices[..v.vertices.len()]);
    }
}

#[test]
fn pipeline_on_inward_chain_takes_the_in_ray_route() {
    let run = run_and_validate(&chain_dinf(GridKind::InwardDDQG), 3, 12);
    assert_eq!(run.route, Route::InRay);
}

#[test]
fn pipeline_on_reversed_host_flips_the_certificate() {
    let host = canonical_grid(GridKind::BidirectedQG, 4).reversed();
    let run = run_and_validate(&host, 3, 12);
    assert_eq!(run.certificate.orientation, Orientation::In);
}

#[test]
fn pipeline_audit_digests_are_stable() {
    let host = canonical_grid(GridKind::BidirectedQG, 4);
    let a = main_pipeline(&host, 3, 12, None).unwrap();
    let b = main_pipeline(&host, 3, 12, None).unwrap();
    assert_eq!(a.audit, b.audit);
    assert!(a
        .audit
        .iter()
        .all(|e| e.inputs.len() == 16 && e.outputs.len() == 16));
}

#[test]
fn pipeline_on_outward_chain_takes_the_out_ray_route() {
    let run = run_and_validate(&chain_dinf(GridKind::OutwardDDQG), 4, 16);
    assert_eq!(run.route, Route::OutRay);
}

fn check_transform(host: &crate::rays::RayedHost, n: u32, depth: usize) -> Transform {
    let tr = dominated_to_bidirected(host, n, depth).unwrap();
    assert_eq!(tr.certificate.kind, GridKind::BidirectedQG);
    assert_eq!(tr.certificate.orientation, host.orientation);
    assert_eq!(tr.certificate.levels(), n);
    crate::grids::validate_grid(&tr.graph, &tr.certificate, &tr.host, depth).unwrap();
    assert_eq!(tr.witnesses.len(), n as usize);
    for w in &tr.witnesses {
        assert!(w.forward.len() >= WITNESS_PATHS && w.backward.len() >= WITNESS_PATHS);
    }
    for pair in tr.state.history.windows(2) {
        let grew =
            pair[1].iter().zip(&pair[0]).any(|(a, b)| a > b) || pair[1].len() > pair[0].len();
        assert!(grew);
    }
    tr
}

#[test]
fn transform_schedule_walks_up_and_down() {
    assert_eq!(
        transform_schedule(3),
        vec![(1, 2), (2, 1), (1, 2), (2, 3), (3, 2), (2, 1)]
    );
    assert!(transform_schedule(1).is_empty());
}

#[test]
fn transform_inward_chain() {
    let tr = check_transform(&chain_dinf(GridKind::InwardDDQG), 3, 16);
    assert!(tr.state.connections.iter().any(|c| c.rerouted));
}

#[test]
fn transform_outward_chain() {
    let tr = check_transform(&chain_dinf(GridKind::OutwardDDQG), 3, 16);
    assert!(tr.state.connections.iter().any(|c| c.rerouted));
}

#[test]
fn transform_keeps_bidirected_hosts_direct() {
    let tr = check_transform(&canonical_grid(GridKind::BidirectedQG, 3), 3, 12);
    assert!(tr.state.connections.iter().all(|c| !c.rerouted));
}

#[test]
fn transform_rejects_one_level() {
    assert!(matches!(
        dominated_to_bidirected(&funnel(), 1, 4),
        Err(crate::error::Error::BadParameters(_))
    ));
}

#[test]
fn transform_of_an_in_family_comes_back_reversed() {
    let host = chain_dinf(GridKind::InwardDDQG).reversed();
    check_transform(&host, 3, 16);
}

#[test]
fn transform_four_levels() {
    check_transform(&chain_dinf(GridKind::InwardDDQG), 4, 24);
    // outward reroutes climb `n` rays first, so they need the wider blocks
    check_transform(&chain_dinf(GridKind::OutwardDDQG), 4, 32);
    assert!(dominated_to_bidirected(&chain_dinf(GridKind::OutwardDDQG), 4, 16).is_err());
}

#[test]
fn pair_schedule_covers_every_ordered_pair() {
    let r = |i| RayIndex(i);
    assert_eq!(pair_schedule(&[r(1), r(2)], 1), vec![r(1), r(2), r(1)]);
    let seq = pair_schedule(&[r(1), r(2), r(3)], 2);
    let mut seen: BTreeMap<(RayIndex, RayIndex), usize> = BTreeMap::new();
    for w in seq.windows(2) {
        *seen.entry((w[0], w[1])).or_default() += 1;
    }
    for a in 1..=3 {
        for b in (1..=3).filter(|b| *b != a) {
            assert!(seen[&(r(a), r(b))] >= 2, "{a}->{b}");
        }
    }
    assert_eq!(pair_schedule(&[r(5)], 3), vec![r(5)]);
}

/// Four rays of ten vertices (`100 * ray + height`) with the single edges
/// a two-ray window needs to pass both ways through rays 3 and 4.
fn passage_host() -> (crate::rays::RayedHost, PathFamily, PathFamily) {
    let mut g = MultiDigraph::new();
    let v = |r: u64, h: u64| VertexId(100 * r + h);
    let mut rays = BTreeMap::new();
    for r in 1..=4 {
        let vs: Vec<VertexId> = (0..10).map(|h| v(r, h)).collect();
        for w in vs.windows(2) {
            g.add_vertex(w[0]);
            g.add_vertex(w[1]);
            g.add_edge(w[0], w[1]).unwrap();
        }
        let index = RayIndex(r as u32);
        rays.insert(
            index,
            crate::rays::RayPrefix {
                index,
                orientation: Orientation::Out,
                vertices: vs,
            },
        );
    }
    let mut edge = |a, b| {
        g.add_edge(a, b).unwrap();
        (a, b)
    };
    let fwd = [
        (1, 3, edge(v(1, 1), v(3, 1))),
        (2, 4, edge(v(2, 5), v(4, 1))),
    ];
    let bwd = [
        (3, 2, edge(v(3, 5), v(2, 3))),
        (4, 1, edge(v(4, 5), v(1, 7))),
    ];
    let family =
        |direction, list: &[(u32, u32, (VertexId, VertexId))], g: &MultiDigraph| PathFamily {
            direction,
            indices: (1..=4).map(RayIndex).collect(),
            paths: list
                .iter()
                .map(|&(a, b, (x, y))| FamilyPath {
                    from: RayIndex(a),
                    to: RayIndex(b),
                    path: crate::graph::PathSeq::from_vertices(g, vec![x, y]).unwrap(),
                })
                .collect(),
        };
    let forward = family(FamilyDirection::Forward, &fwd, &g);
    let backward = family(FamilyDirection::Backward, &bwd, &g);
    let host =
        crate::catalog::finite_host("passages", g, rays, Orientation::Out, Default::default());
    (host, forward, backward)
}

#[test]
fn connecting_spine_uses_one_reserve_ray_per_passage() {
    let (host, forward, backward) = passage_host();
    let window = [RayIndex(1), RayIndex(2)];
    let spine = strongly_connecting_spine(
        &host,
        &forward,
        &backward,
        &window,
        &[RayIndex(3), RayIndex(4)],
        1,
        10,
    )
    .unwrap();
    assert_eq!(spine.path.first(), VertexId(100));
    assert_eq!(spine.path.last(), VertexId(107));
    assert!(spine.visits.contains_key(&RayIndex(3)) && spine.visits.contains_key(&RayIndex(4)));
    // a second round has no reserve left
    let again = strongly_connecting_spine(
        &host,
        &forward,
        &backward,
        &window,
        &[RayIndex(3), RayIndex(4)],
        2,
        10,
    );
    assert!(matches!(again, Err(crate::error::Error::ReserveExhausted)));
}

#[test]
fn connecting_spine_checks_its_inputs() {
    let (host, forward, backward) = passage_host();
    let overlapping = strongly_connecting_spine(
        &host,
        &forward,
        &backward,
        &[RayIndex(1), RayIndex(3)],
        &[RayIndex(3)],
        1,
        10,
    );
    assert!(matches!(
        overlapping,
        Err(crate::error::Error::BadParameters(_))
    ));
    let swapped = strongly_connecting_spine(
        &host,
        &backward,
        &forward,
        &[RayIndex(1)],
        &[RayIndex(3)],
        1,
        10,
    );
    assert!(matches!(swapped, Err(crate::error::Error::InvalidInput(_))));
}

#[test]
fn avoiding_subfamily_stays_off_the_initial_pieces() {
    let host = funnel();
    let depth = 32;
    let t = host.truncate(depth);
    let cuts: BTreeMap<RayIndex, VertexId> = (1..=3)
        .map(|i| (RayIndex(i), t.rays[&RayIndex(i)].vertices[1]))
        .collect();
    let found = find_avoiding_subfamily(&host, &cuts, 3, depth).unwrap();
    assert!(found.indices.len() >= 3);
    let on_path = found.spine.path.vertex_set();
    for (r, cut) in &cuts {
        let ray = &t.rays[r];
        let upto = ray.position(*cut).unwrap();
        assert!(
            ray.vertices[..=upto].iter().all(|v| !on_path.contains(v)),
            "ray {r}"
        );
    }
    for r in &found.indices {
        assert!(found.spine.visits.contains_key(r));
    }
    assert!(find_avoiding_subfamily(&host, &cuts, 3, 4).is_err());
    assert!(find_avoiding_subfamily(&host, &BTreeMap::new(), 3, depth).is_err());
}
