use std::collections::BTreeSet;

use super::*;
use crate::catalog::{canonical_grid, chain_dinf, funnel};
use crate::layout::GridKind;
use crate::rays::build_spine;

fn all_rays(host: &RayedHost, depth: usize) -> BTreeSet<RayIndex> {
    host.truncate(depth).ray_indices()
}

/// Every sigma path runs in the host from ray u to ray v without touching
/// another contracted ray in its interior.
fn assert_sigma_sound(host: &RayedHost, c: &ContractionResult) {
    let t = host.truncate(c.depth);
    for e in c.dj.edges() {
        let p = &c.sigma[&e.id];
        p.check_in(&t.graph).unwrap();
        let (u, v) = (RayIndex::from_vertex(e.tail), RayIndex::from_vertex(e.head));
        assert_eq!(t.ray_position(p.first()).map(|x| x.0), Some(u));
        assert_eq!(t.ray_position(p.last()).map(|x| x.0), Some(v));
        for w in p.interior() {
            let on_j = t
                .ray_position(*w)
                .is_some_and(|(r, _)| c.j_set.contains(&r));
            assert!(
                !on_j,
                "interior of sigma({:?}) meets a contracted ray",
                e.id
            );
        }
    }
}

#[test]
fn bidirected_canonical_quotient_is_certified_both_ways() {
    let host = canonical_grid(GridKind::BidirectedQG, 3);
    let s = build_spine(&host, 12, 10).unwrap();
    let j = all_rays(&host, 10);
    let c = contract(&host, &s, &j, None).unwrap();
    assert_sigma_sound(&host, &c);
    assert!(!c.dinf.approximate);
    assert!(c.dinf.graph.edge_count() > 0);
    for e in c.dinf.graph.edges() {
        let (u, v) = (
            RayIndex::from_vertex(e.tail).0,
            RayIndex::from_vertex(e.head).0,
        );
        assert_eq!(u.abs_diff(v), 1, "only neighbouring rays repeat");
    }
}

#[test]
fn segment_counts_add_up() {
    let host = canonical_grid(GridKind::InwardDDQG, 4);
    let s = build_spine(&host, 16, 14).unwrap();
    let j = all_rays(&host, 14);
    let c = contract(&host, &s, &j, Some(2)).unwrap();
    let t = host.truncate(14);
    // oracle: walk the spine and count maximal stretches between visits
    let path = s.root_first_path();
    let marks: Vec<usize> = (0..path.vertices.len())
        .filter(|&i| t.ray_position(path.vertices[i]).is_some())
        .collect();
    let mut off_ray = 0;
    for w in marks.windows(2) {
        let (a, b) = (w[0], w[1]);
        let same = t.ray_position(path.vertices[a]).unwrap().0
            == t.ray_position(path.vertices[b]).unwrap().0;
        let along = same
            && b == a + 1
            && t.graph
                .find_edge(path.vertices[a], path.vertices[b])
                .is_some_and(|id| id.0 & 1 == 0);
        if !along {
            off_ray += 1;
        }
    }
    assert_eq!(c.dj.edge_count() + c.loops.len(), off_ray);
    assert_sigma_sound(&host, &c);
}

#[test]
fn chain_inward_has_unbounded_first_ray() {
    let host = chain_dinf(GridKind::InwardDDQG);
    let s = build_spine(&host, 10, 9).unwrap();
    let j = all_rays(&host, 9);
    let c = contract(&host, &s, &j, None).unwrap();
    assert_sigma_sound(&host, &c);
    let finite = BTreeSet::from([RayIndex(1)]);
    assert_eq!(
        degree_dichotomy(&c, &finite, Orientation::Out, None),
        Dichotomy::InfiniteDegreeVertex(RayIndex(1))
    );
    for e in c.dinf.graph.edges() {
        assert!(e.head < e.tail, "inward chain only points towards ray 1");
    }
}

#[test]
fn funnel_quotient_points_into_first_ray() {
    let host = funnel();
    let s = build_spine(&host, 10, 9).unwrap();
    let j = all_rays(&host, 9);
    let c = contract(&host, &s, &j, None).unwrap();
    assert_sigma_sound(&host, &c);
    for e in c.dinf.graph.edges() {
        assert_eq!(e.head, RayIndex(1).vertex());
    }
}

#[test]
fn cross_edge_found_when_degrees_bounded() {
    let host = canonical_grid(GridKind::BidirectedQG, 3);
    let s = build_spine(&host, 12, 10).unwrap();
    let j = all_rays(&host, 10);
    let c = contract(&host, &s, &j, None).unwrap();
    let finite = BTreeSet::from([RayIndex(1)]);
    assert_eq!(
        degree_dichotomy(&c, &finite, Orientation::Out, None),
        Dichotomy::CrossEdge(RayIndex(1), RayIndex(2))
    );
    let everything = j.clone();
    assert!(matches!(
        degree_dichotomy(&c, &everything, Orientation::Out, None),
        Dichotomy::Undetermined(_)
    ));
}

#[test]
fn threshold_tier_is_flagged() {
    let host = canonical_grid(GridKind::BidirectedQG, 3);
    let s = build_spine(&host, 12, 10).unwrap();
    let j = all_rays(&host, 10);
    let mut c = contract(&host, &s, &j, None).unwrap();
    c.multiplicity = c
        .multiplicity
        .into_keys()
        .map(|k| (k, Multiplicity::Finite(5)))
        .collect();
    let d = d_infinity(&c, Some(3));
    assert!(d.approximate);
    assert_eq!(d.provenance, Provenance::Threshold { threshold: 3 });
    assert_eq!(d_infinity(&c, None).graph.edge_count(), 0);
}

#[test]
fn restriction_keeps_edges_between_kept_rays() {
    let host = canonical_grid(GridKind::BidirectedQG, 4);
    let s = build_spine(&host, 16, 14).unwrap();
    let full = all_rays(&host, 14);
    let c = contract(&host, &s, &full, None).unwrap();
    let sub: BTreeSet<RayIndex> = [RayIndex(1), RayIndex(2)].into();
    let d = contract(&host, &s, &sub, None).unwrap();
    for e in c.dj.edges() {
        let (u, v) = (RayIndex::from_vertex(e.tail), RayIndex::from_vertex(e.head));
        if sub.contains(&u) && sub.contains(&v) {
            assert!(d.multiplicity.contains_key(&(u, v)));
        }
    }
}

#[test]
fn in_ray_host_contracts_by_reversal() {
    let host = chain_dinf(GridKind::OutwardDDQG).reversed();
    let s = build_spine(&host, 8, 8).unwrap();
    let j = all_rays(&host, 8);
    let c = contract(&host, &s, &j, None).unwrap();
    assert_eq!(c.orientation, Orientation::In);
    assert_sigma_sound(&host, &c);
}
