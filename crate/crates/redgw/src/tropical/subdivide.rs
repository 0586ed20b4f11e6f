//! Image-ordering and central-alignment subdivisions, well-spacedness.

use std::collections::VecDeque;

use once_cell::sync::Lazy;

use crate::error::{Error, Result};

use super::linalg::{self, Row};
use super::{CombinatorialType, Cone};

/// Ordered set partitions of `items`.
pub(crate) fn ordered_partitions(items: &[usize]) -> Vec<Vec<Vec<usize>>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let (first, rest) = (items[0], &items[1..]);
    let mut out = Vec::new();
    for p in ordered_partitions(rest) {
        // join an existing class
        for i in 0..p.len() {
            let mut q = p.clone();
            q[i].insert(0, first);
            out.push(q);
        }
        // or form a new class anywhere
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, vec![first]);
            out.push(q);
        }
    }
    out
}

fn order_constraints(forms: &[Row], classes: &[Vec<usize>]) -> (Vec<Row>, Vec<Row>) {
    let mut rel = Vec::new();
    let mut strict = Vec::new();
    for c in classes {
        for w in c.windows(2) {
            rel.push(linalg::sub(&forms[w[1]], &forms[w[0]]));
        }
    }
    for w in classes.windows(2) {
        strict.push(linalg::sub(&forms[w[1][0]], &forms[w[0][0]]));
    }
    (rel, strict)
}

/// Subdivision of the type's unordered cone by the total preorder of the
/// images of its positive-level vertices.
pub fn image_order(ct: &CombinatorialType) -> Vec<Cone> {
    let base = ct.unordered_cone();
    if !base.is_feasible() {
        return Vec::new();
    }
    let upper: Vec<usize> = (0..ct.nv()).filter(|&v| ct.vertices[v].level > 0).collect();
    let forms: Vec<Row> = (0..ct.nv()).map(|v| ct.position_form(v)).collect();
    ordered_partitions(&upper)
        .into_iter()
        .filter_map(|classes| {
            let (rel, strict) = order_constraints(&forms, &classes);
            let c = base.with(&rel, &strict);
            c.is_feasible().then_some(c)
        })
        .collect()
}

/// Central alignment of one cone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlignmentData {
    /// The radius: distance to the nearest vertex of positive degree, or 0
    /// when the core itself has positive degree.
    pub delta: Row,
    /// `lambda(v)`: total length of the path from `v` to the core.
    pub distances: Vec<Row>,
    /// Vertices within the radius by increasing distance; the first class is
    /// the core, the last lies on the circle. Empty in genus zero.
    pub order: Vec<Vec<usize>>,
}

impl AlignmentData {
    /// Index of the class holding `v`, if `v` lies within the radius.
    pub fn class_of(&self, v: usize) -> Option<usize> {
        self.order.iter().position(|c| c.contains(&v))
    }

    /// Per-vertex class labels, `u32::MAX` outside the radius.
    pub fn labels(&self, nv: usize) -> Vec<u32> {
        (0..nv).map(|v| self.class_of(v).map_or(u32::MAX, |c| c as u32)).collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.order.len() <= 1
    }

    /// Vertices on the circle of radius delta.
    pub fn circle(&self) -> &[usize] {
        if self.order.len() > 1 {
            self.order.last().map(Vec::as_slice).unwrap_or(&[])
        } else {
            &[]
        }
    }
}

/// `lambda(v)` for every vertex as linear forms in the cone coordinates.
pub fn core_distances(ct: &CombinatorialType) -> Option<Vec<Row>> {
    let core = ct.core()?;
    let core_edges = ct.core_edges();
    let n = ct.ncoords();
    let mut dist: Vec<Option<Row>> = vec![None; ct.nv()];
    let mut queue = VecDeque::new();
    for &c in &core {
        dist[c] = Some(vec![0; n]);
        queue.push_back(c);
    }
    while let Some(v) = queue.pop_front() {
        for (i, e) in ct.edges.iter().enumerate() {
            if core_edges.contains(&i) {
                continue;
            }
            for (a, b) in [(e.ends.0, e.ends.1), (e.ends.1, e.ends.0)] {
                if a == v && dist[b].is_none() {
                    let d = linalg::add(dist[v].as_ref().unwrap(), &ct.length_form(i));
                    dist[b] = Some(d);
                    queue.push_back(b);
                }
            }
        }
    }
    dist.into_iter().collect()
}

fn trivial_alignment(ct: &CombinatorialType) -> AlignmentData {
    let n = ct.ncoords();
    AlignmentData {
        delta: vec![0; n],
        distances: core_distances(ct).unwrap_or_else(|| vec![vec![0; n]; ct.nv()]),
        order: ct.core().map(|c| vec![c]).unwrap_or_default(),
    }
}

/// Ordered set partitions of `0..k`, cached for small `k`.
fn index_partitions(k: usize) -> &'static [Vec<Vec<usize>>] {
    static CACHE: Lazy<Vec<Vec<Vec<Vec<usize>>>>> =
        Lazy::new(|| (0..=6).map(|k| ordered_partitions(&(0..k).collect::<Vec<_>>())).collect());
    &CACHE[k]
}

/// Candidate alignment cells of `cone` before the feasibility check: extra
/// equalities, extra strict inequalities and the alignment data. With
/// `max_dim`, patterns whose ties cannot bring the dimension down to
/// `max_dim` are skipped.
pub(crate) fn alignment_patterns(
    cone: &Cone,
    ct: &CombinatorialType,
    max_dim: Option<usize>,
) -> Vec<(Vec<Row>, Vec<Row>, AlignmentData)> {
    let trivial = trivial_alignment(ct);
    let Some(core) = ct.core() else { return vec![(Vec::new(), Vec::new(), trivial)] };
    let positive: Vec<bool> = ct.vertices.iter().map(|v| v.degree > 0).collect();
    if ct.core_degree() != Some(0) || !positive.contains(&true) {
        return vec![(Vec::new(), Vec::new(), trivial)];
    }
    let base_dim = cone.dim();
    let lam = trivial.distances.clone();
    let parent = core_parents(ct);
    let others: Vec<usize> = (0..ct.nv()).filter(|v| !core.contains(v)).collect();
    let mut out = Vec::new();
    for mask in 1u32..(1 << others.len()) {
        let is_in = |v: usize| core.contains(&v) || others.iter().position(|&w| w == v).map_or(false, |i| mask >> i & 1 == 1);
        let inside: Vec<usize> =
            others.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| v).collect();
        // A vertex within the radius drags the path to the core with it.
        if inside.iter().any(|&v| !is_in(parent[v])) {
            continue;
        }
        let outside: Vec<usize> =
            others.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 0).map(|(_, &v)| v).collect();
        for pattern in index_partitions(inside.len()) {
            let ties: usize = pattern.iter().map(|c| c.len() - 1).sum();
            if max_dim.map_or(false, |m| base_dim > m + ties) {
                continue;
            }
            let classes: Vec<Vec<usize>> = pattern.iter().map(|c| c.iter().map(|&i| inside[i]).collect()).collect();
            let (last, earlier) = classes.split_last().unwrap();
            if !last.iter().any(|&v| positive[v]) || earlier.iter().flatten().any(|&v| positive[v]) {
                continue;
            }
            let class_of = |v: usize| -> usize {
                if core.contains(&v) {
                    0
                } else {
                    1 + classes.iter().position(|c| c.contains(&v)).unwrap()
                }
            };
            // Distances grow away from the core.
            if inside.iter().any(|&v| class_of(parent[v]) >= class_of(v)) {
                continue;
            }
            let mut order = vec![core.clone()];
            order.extend(classes.iter().cloned());
            // The core sits at distance zero and every other distance is
            // positive, so the core class needs no constraint.
            let (mut rel, mut strict) = order_constraints(&lam, &order[1..]);
            let delta = lam[last[0]].clone();
            for &w in &outside {
                strict.push(linalg::sub(&lam[w], &delta));
            }
            rel.retain(|r| r.iter().any(|&x| x != 0));
            out.push((rel, strict, AlignmentData { delta, distances: lam.clone(), order }));
        }
    }
    out
}

/// Neighbour of each non-core vertex on its path to the core.
fn core_parents(ct: &CombinatorialType) -> Vec<usize> {
    let core = ct.core().unwrap_or_default();
    let core_edges = ct.core_edges();
    let mut parent: Vec<usize> = (0..ct.nv()).collect();
    let mut seen: Vec<bool> = (0..ct.nv()).map(|v| core.contains(&v)).collect();
    let mut queue: VecDeque<usize> = core.iter().copied().collect();
    while let Some(v) = queue.pop_front() {
        for (i, e) in ct.edges.iter().enumerate() {
            if core_edges.contains(&i) {
                continue;
            }
            for (a, b) in [(e.ends.0, e.ends.1), (e.ends.1, e.ends.0)] {
                if a == v && !seen[b] {
                    seen[b] = true;
                    parent[b] = v;
                    queue.push_back(b);
                }
            }
        }
    }
    parent
}

/// Central-alignment subdivision of `cone`, a cone in the coordinates of
/// `ct`. Trivial in genus zero, when the core has positive degree, and when
/// no vertex has positive degree.
pub fn align(cone: &Cone, ct: &CombinatorialType) -> Result<Vec<(Cone, AlignmentData)>> {
    if cone.coords != ct.coordinate_names() {
        return Err(Error::Validation("cone and type use different coordinates".into()));
    }
    Ok(alignment_patterns(cone, ct, None)
        .into_iter()
        .filter_map(|(rel, strict, al)| {
            let c = cone.with(&rel, &strict);
            c.is_feasible().then_some((c, al))
        })
        .collect())
}

/// Well-spacedness of a genus-one type in an aligned cell.
///
/// True when the core maps to level 0, when some flag at the core has
/// nonzero slope, or when the flags of nonzero slope leaving the contracted
/// neighbourhood of the core attain their minimal core distance at least
/// twice. Genus-zero types are trivially well spaced.
pub fn is_well_spaced(ct: &CombinatorialType, al: &AlignmentData) -> bool {
    let Some(core) = ct.core() else { return true };
    if core.iter().any(|&v| ct.vertices[v].level == 0) {
        return true;
    }
    let nonzero_flags = |v: usize| -> usize {
        let legs = ct.vertices[v].markings.iter().filter(|&&i| ct.legs[i].slope > 0).count();
        let edges = ct
            .edges
            .iter()
            .map(|e| (e.slope > 0) as usize * ((e.ends.0 == v) as usize + (e.ends.1 == v) as usize))
            .sum::<usize>();
        legs + edges
    };
    if core.iter().any(|&v| nonzero_flags(v) > 0) {
        return true;
    }
    // The contracted region: reachable from the core through slope-0 edges.
    let mut region = core.clone();
    let mut queue: VecDeque<usize> = core.iter().copied().collect();
    while let Some(v) = queue.pop_front() {
        for e in ct.edges.iter().filter(|e| e.slope == 0) {
            for (a, b) in [(e.ends.0, e.ends.1), (e.ends.1, e.ends.0)] {
                if a == v && !region.contains(&b) {
                    region.push(b);
                    queue.push_back(b);
                }
            }
        }
    }
    for class in &al.order {
        let k: usize = class.iter().filter(|v| region.contains(v)).map(|&v| nonzero_flags(v)).sum();
        if k > 0 {
            return k >= 2;
        }
    }
    false
}
