use proptest::prelude::*;
use redgw::tropical::{
    align, enumerate_boundary_divisors, enumerate_types, image_order, is_well_spaced, linalg, Cone, CombinatorialType,
    StrataQuery, TEdge, TVertex,
};

/// A relative-interior point of `cone`: a positive combination of the
/// generators of its closure.
fn interior_point(cone: &Cone, weights: &[i64]) -> Vec<i64> {
    let gens = cone.generators();
    let mut x = vec![0; cone.ncoords()];
    for (i, g) in gens.iter().enumerate() {
        x = linalg::add(&x, &linalg::scale(g, weights[i % weights.len()]));
    }
    x
}

fn small_types() -> Vec<CombinatorialType> {
    let mut out = Vec::new();
    for genus in 0..=1u8 {
        for (d, t) in [(1u32, vec![1u32, 0]), (2, vec![2, 0]), (2, vec![1, 1, 0]), (3, vec![3, 0])] {
            out.extend(enumerate_types(genus, d, &t, 3, 4));
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    /// Every point of the input cone lies in exactly one output cone.
    #[test]
    fn subdivisions_partition_the_cone(pick in any::<prop::sample::Index>(), weights in prop::collection::vec(1i64..7, 1..6)) {
        let types = small_types();
        let ct = &types[pick.index(types.len())];
        let base = ct.unordered_cone();
        let x = interior_point(&base, &weights);
        prop_assert!(base.contains(&x));
        let hits = image_order(ct).iter().filter(|c| c.contains(&x)).count();
        prop_assert_eq!(hits, 1, "image order of {}", ct.to_text());
        let cone = ct.cone();
        if cone.is_feasible() {
            let y = interior_point(&cone, &weights);
            let hits = align(&cone, ct).unwrap().iter().filter(|(c, _)| c.contains(&y)).count();
            prop_assert_eq!(hits, 1, "alignment of {}", ct.to_text());
        }
    }
}

/// A contracted genus-one core on level 1 joined by horizontal edges to
/// vertices that each carry one leg of slope `slopes[i]`.
fn star(slopes: &[u32]) -> CombinatorialType {
    let mut vertices = vec![TVertex { genus: 1, degree: 0, level: 1, markings: Vec::new() }];
    let mut edges = Vec::new();
    for (i, &s) in slopes.iter().enumerate() {
        vertices.push(TVertex { genus: 0, degree: s, level: 1, markings: vec![i] });
        edges.push(TEdge { ends: (0, i + 1), slope: 0 });
    }
    CombinatorialType::build(vertices, edges, slopes).unwrap()
}

/// Well-spacedness of `star(slopes)` at arm lengths `lengths`.
fn well_spaced_at(slopes: &[u32], lengths: &[i64]) -> bool {
    let ct = star(slopes);
    let cone = ct.cone();
    let mut x = vec![0; ct.ncoords()];
    for v in 0..ct.nv() {
        x = linalg::add(&x, &ct.position_form(v));
    }
    for (e, &l) in lengths.iter().enumerate() {
        x = linalg::add(&x, &linalg::scale(&ct.length_form(e), l));
    }
    let cells = align(&cone, &ct).unwrap();
    let (_, al) = cells.iter().find(|(c, _)| c.contains(&x)).expect("point in some cell");
    is_well_spaced(&ct, al)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn well_spaced_iff_nearest_flag_is_repeated(arms in prop::collection::vec((1u32..4, 1i64..5), 1..4)) {
        let slopes: Vec<u32> = arms.iter().map(|a| a.0).collect();
        let lengths: Vec<i64> = arms.iter().map(|a| a.1).collect();
        let min = *lengths.iter().min().unwrap();
        let nearest = lengths.iter().filter(|&&l| l == min).count();
        prop_assert_eq!(well_spaced_at(&slopes, &lengths), nearest >= 2);
    }

    /// Adding a flag at the minimal distance never breaks well-spacedness.
    #[test]
    fn well_spacedness_is_monotone(arms in prop::collection::vec((1u32..4, 1i64..5), 1..4), s in 1u32..4) {
        let mut slopes: Vec<u32> = arms.iter().map(|a| a.0).collect();
        let mut lengths: Vec<i64> = arms.iter().map(|a| a.1).collect();
        let before = well_spaced_at(&slopes, &lengths);
        slopes.push(s);
        lengths.push(*lengths.iter().min().unwrap());
        let after = well_spaced_at(&slopes, &lengths);
        prop_assert!(after);
        prop_assert!(after >= before);
    }
}

#[test]
fn divisors_are_rays() {
    for genus in 0..=1u8 {
        for (d, t) in [(2u32, vec![2u32, 0]), (3, vec![2, 1, 0]), (3, vec![3, 0, 0])] {
            for mark in 0..t.len() {
                let mut q = StrataQuery::new(genus, d, t.clone(), mark);
                q.prune = false;
                for b in enumerate_boundary_divisors(&q).unwrap() {
                    assert_eq!(b.cone.dim(), 1, "{}", b.describe());
                    assert_eq!(b.cone.generators().len(), 1, "{}", b.describe());
                }
            }
        }
    }
}

#[test]
fn pruning_only_removes_rays() {
    let mut q = StrataQuery::new(1, 3, vec![3, 0], 1);
    let pruned: Vec<String> = enumerate_boundary_divisors(&q).unwrap().iter().map(|b| b.canonical_key()).collect();
    q.prune = false;
    let all: Vec<String> = enumerate_boundary_divisors(&q).unwrap().iter().map(|b| b.canonical_key()).collect();
    assert!(pruned.len() < all.len());
    assert!(pruned.iter().all(|k| all.contains(k)));
}
