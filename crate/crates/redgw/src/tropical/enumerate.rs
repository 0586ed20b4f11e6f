//! Enumeration of combinatorial types and of the rays of the aligned,
//! well-spaced complex.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, Mutex};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use once_cell::sync::Lazy;

use crate::error::{Error, Result};
use crate::multiplicities;
use crate::rat::Rat;

use super::linalg::{self, Row};
use super::subdivide::{alignment_patterns, is_well_spaced, AlignmentData};
use super::{CombinatorialType, Cone, TEdge, TVertex};

/// Vertex cap for enumerations; enough for every type of degree at most 3
/// with at most 3 markings that can carry a ray.
pub const DEFAULT_MAX_VERTICES: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DivisorKind {
    /// Genus-zero ray.
    Rational,
    /// Genus-one vertex at level 0.
    I,
    /// Cycle core.
    II,
    /// Genus-one vertex on a positive level.
    III,
    /// Core of degree zero.
    Dagger,
}

impl DivisorKind {
    pub const ALL: [DivisorKind; 5] =
        [DivisorKind::Rational, DivisorKind::I, DivisorKind::II, DivisorKind::III, DivisorKind::Dagger];

    pub fn name(self) -> &'static str {
        match self {
            DivisorKind::Rational => "rational",
            DivisorKind::I => "I",
            DivisorKind::II => "II",
            DivisorKind::III => "III",
            DivisorKind::Dagger => "dagger",
        }
    }
}

impl fmt::Display for DivisorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DivisorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<DivisorKind> {
        match s.to_ascii_lowercase().as_str() {
            "rational" | "r" => Ok(DivisorKind::Rational),
            "i" => Ok(DivisorKind::I),
            "ii" => Ok(DivisorKind::II),
            "iii" => Ok(DivisorKind::III),
            "dagger" | "d" | "+" => Ok(DivisorKind::Dagger),
            _ => Err(Error::Parse(format!("unknown divisor kind {s:?}"))),
        }
    }
}

/// A level-0 component of a split divisor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub vertex: usize,
    pub genus: u8,
    pub degree: u32,
    pub markings: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SplitData {
    /// Rational, I, II, III: slopes of the splitting nodes and the level-0
    /// pieces.
    Split { slopes: Vec<u32>, pieces: Vec<Piece> },
    /// Circle vertices at level 0 and on positive levels.
    Dagger { levels: u32, lambda0: Vec<usize>, lambda_pos: Vec<usize> },
}

/// Why a ray's contribution vanishes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PruneReason {
    /// More than one vertex over a point of a positive level.
    CrowdedLevel { level: u32, vertices: usize },
    /// An edge leaves the strict interior of the circle: its outer end is
    /// strictly outside, so the circle meets it in a bivalent semistable
    /// point.
    CircleCrossing { edge: usize },
}

impl fmt::Display for PruneReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PruneReason::CrowdedLevel { level, vertices } => write!(f, "{vertices} vertices on level {level}"),
            PruneReason::CircleCrossing { edge } => write!(f, "edge {edge} crosses the circle"),
        }
    }
}

pub fn classify(ct: &CombinatorialType) -> DivisorKind {
    let Some(core) = ct.core() else { return DivisorKind::Rational };
    if ct.core_degree() == Some(0) {
        return DivisorKind::Dagger;
    }
    match ct.vertices.iter().find(|v| v.genus == 1) {
        Some(v) if v.level == 0 => DivisorKind::I,
        Some(_) => DivisorKind::III,
        None => {
            debug_assert!(!core.is_empty());
            DivisorKind::II
        }
    }
}

pub fn prune_reason(ct: &CombinatorialType, al: &AlignmentData) -> Option<PruneReason> {
    for level in 1..=ct.target_levels {
        let n = ct.vertices.iter().filter(|v| v.level == level).count();
        if n > 1 {
            return Some(PruneReason::CrowdedLevel { level, vertices: n });
        }
    }
    if classify(ct) == DivisorKind::Dagger && !al.is_trivial() {
        let last = al.order.len() - 1;
        let strictly_inside = |v: usize| al.class_of(v).map_or(false, |c| c < last);
        let outside = |v: usize| al.class_of(v).is_none();
        for (i, e) in ct.edges.iter().enumerate() {
            let (a, b) = e.ends;
            if (strictly_inside(a) && outside(b)) || (strictly_inside(b) && outside(a)) {
                return Some(PruneReason::CircleCrossing { edge: i });
            }
        }
    }
    None
}

#[derive(Clone, Debug)]
pub struct StrataQuery {
    pub genus: u8,
    pub degree: u32,
    /// Contact orders of the markings; 0 for interior markings.
    pub tangency: Vec<u32>,
    /// The recursion marking.
    pub mark: usize,
    /// `None` keeps every kind.
    pub kinds: Option<BTreeSet<DivisorKind>>,
    /// Drop rays whose contribution provably vanishes.
    pub prune: bool,
    pub max_vertices: usize,
}

impl StrataQuery {
    pub fn new(genus: u8, degree: u32, tangency: Vec<u32>, mark: usize) -> StrataQuery {
        StrataQuery { genus, degree, tangency, mark, kinds: None, prune: true, max_vertices: DEFAULT_MAX_VERTICES }
    }
}

#[derive(Clone, Debug)]
pub struct BoundaryDivisor {
    pub ctype: CombinatorialType,
    /// The ray as a cone in the coordinates of `ctype`.
    pub cone: Cone,
    pub alignment: AlignmentData,
    pub kind: DivisorKind,
    pub split: SplitData,
    /// The recursion marking.
    pub mark: usize,
}

impl BoundaryDivisor {
    fn new(ctype: CombinatorialType, cone: Cone, alignment: AlignmentData, mark: usize) -> BoundaryDivisor {
        let kind = classify(&ctype);
        let split = if kind == DivisorKind::Dagger {
            let circle = alignment.circle();
            let (lambda0, lambda_pos) = circle.iter().partition(|&&v| ctype.vertices[v].level == 0);
            SplitData::Dagger { levels: ctype.target_levels, lambda0, lambda_pos }
        } else {
            let mut slopes: Vec<u32> = ctype
                .edges
                .iter()
                .filter(|e| ctype.vertices[e.ends.0].level == 0 && ctype.vertices[e.ends.1].level > 0)
                .map(|e| e.slope)
                .collect();
            slopes.sort();
            let pieces = (0..ctype.nv())
                .filter(|&v| ctype.vertices[v].level == 0)
                .map(|v| {
                    let x = &ctype.vertices[v];
                    Piece { vertex: v, genus: x.genus, degree: x.degree, markings: x.markings.clone() }
                })
                .collect();
            SplitData::Split { slopes, pieces }
        };
        BoundaryDivisor { ctype, cone, alignment, kind, split, mark }
    }

    /// Isomorphism-invariant identity of the ray: kind, type and alignment.
    pub fn canonical_key(&self) -> String {
        let labels = self.alignment.labels(self.ctype.nv());
        format!("{}|{}", self.kind, self.ctype.canonical_with(&labels).0)
    }

    /// Splitting-node slopes; empty for dagger rays.
    pub fn slopes(&self) -> &[u32] {
        match &self.split {
            SplitData::Split { slopes, .. } => slopes,
            SplitData::Dagger { .. } => &[],
        }
    }

    pub fn prune_reason(&self) -> Option<PruneReason> {
        prune_reason(&self.ctype, &self.alignment)
    }

    /// Linear forms, each with a divisor, cutting out the lattice of the
    /// ray: the target segments between consecutive levels, the pieces of
    /// every edge over them (segment / slope), and the lengths of horizontal
    /// edges.
    fn lattice_forms(&self) -> Result<Vec<(Row, i64)>> {
        let ct = &self.ctype;
        let level = |t: u32| ct.level_form(t).ok_or_else(|| Error::Internal(format!("empty level {t}")));
        let mut segs = Vec::new();
        for t in 0..ct.target_levels {
            segs.push(linalg::sub(&level(t + 1)?, &level(t)?));
        }
        let mut forms: Vec<(Row, i64)> = segs.iter().map(|s| (s.clone(), 1)).collect();
        for (i, e) in ct.edges.iter().enumerate() {
            if e.slope == 0 {
                forms.push((ct.length_form(i), 1));
                continue;
            }
            let (a, b) = (ct.vertices[e.ends.0].level, ct.vertices[e.ends.1].level);
            for seg in &segs[a as usize..b as usize] {
                forms.push((seg.clone(), e.slope as i64));
            }
        }
        Ok(forms)
    }

    /// Height of the recursion marking's vertex at the primitive generator
    /// of the ray.
    pub fn marking_height(&self) -> Result<BigInt> {
        let r = self.cone.ray_direction()?;
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for (f, m) in self.lattice_forms()? {
            let q = Rat::new(linalg::dot(&f, &r), m)?;
            if q.is_zero() {
                continue;
            }
            num_gcd = num_gcd.gcd(q.numer());
            den_lcm = den_lcm.lcm(q.denom());
        }
        if num_gcd.is_zero() {
            return Err(Error::Internal("ray without lattice forms".into()));
        }
        let scale = Rat::from_big(den_lcm, num_gcd)?;
        let v = self.ctype.legs[self.mark].vertex;
        let h = Rat::int(linalg::dot(&self.ctype.position_form(v), &r)) * &scale;
        if !h.is_integer() {
            return Err(Error::Internal(format!("marking height {h} is not integral")));
        }
        Ok(h.numer().clone())
    }

    /// One line: kind, type, slopes and multiplicity data.
    pub fn describe(&self) -> String {
        let mut s = format!("{}\t{}", self.kind, self.ctype.to_text());
        match &self.split {
            SplitData::Split { slopes, .. } if !slopes.is_empty() => {
                let m: Vec<u64> = slopes.iter().map(|&x| x as u64).collect();
                if let Ok(data) = multiplicities::MultiplicityData::of(&m) {
                    s.push_str(&format!(
                        "\tslopes={:?}\tsplitting_degree={}\tvanishing_order={}\tcontribution={}",
                        slopes, data.splitting_degree, data.vanishing_order, data.contribution_factor
                    ));
                }
            }
            SplitData::Split { .. } => s.push_str("\tslopes=[]"),
            SplitData::Dagger { levels, lambda0, lambda_pos } => {
                s.push_str(&format!("\tlevels={levels}\tcircle0={lambda0:?}\tcircle+={lambda_pos:?}"));
            }
        }
        if let Ok(h) = self.marking_height() {
            s.push_str(&format!("\theight={h}"));
        }
        s
    }
}

/// Connected multigraph skeletons on `nv` vertices with first Betti number
/// `betti`, one per isomorphism class.
fn skeletons(nv: usize, betti: usize) -> Vec<Vec<(usize, usize)>> {
    let mut trees: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
    for i in 1..nv {
        trees = trees
            .into_iter()
            .flat_map(|t| {
                (0..i).map(move |j| {
                    let mut t = t.clone();
                    t.push((j, i));
                    t
                })
            })
            .collect();
    }
    let mut graphs = trees;
    for _ in 0..betti {
        graphs = graphs
            .into_iter()
            .flat_map(|g| {
                let mut out = Vec::new();
                for a in 0..nv {
                    for b in a..nv {
                        let mut h = g.clone();
                        h.push((a, b));
                        out.push(h);
                    }
                }
                out
            })
            .collect();
    }
    let mut seen = BTreeMap::new();
    for g in graphs {
        seen.entry(bare_canonical(nv, &g)).or_insert(g);
    }
    seen.into_values().collect()
}

fn bare_canonical(nv: usize, edges: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut best: Option<Vec<(usize, usize)>> = None;
    let mut perm: Vec<usize> = (0..nv).collect();
    permutations(&mut perm, 0, &mut |p| {
        let mut s: Vec<(usize, usize)> = edges.iter().map(|&(a, b)| (p[a].min(p[b]), p[a].max(p[b]))).collect();
        s.sort();
        if best.as_ref().map_or(true, |b| s < *b) {
            best = Some(s);
        }
    });
    best.unwrap_or_default()
}

fn permutations(v: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permutations(v, k + 1, f);
        v.swap(k, i);
    }
}

fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Vertices on the unique cycle of a unicyclic multigraph.
fn cycle_vertices(nv: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut alive = vec![true; nv];
    loop {
        let mut changed = false;
        for v in 0..nv {
            if !alive[v] {
                continue;
            }
            let val: usize = edges
                .iter()
                .map(|&(a, b)| (a == v && alive[b]) as usize + (b == v && alive[a]) as usize)
                .sum();
            if val <= 1 {
                alive[v] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    (0..nv).filter(|&v| alive[v]).collect()
}

/// Upward flows `x_e` (from `e.0` to `e.1`) with net outflow `rhs[v]` at
/// every vertex; `fixed` pins one edge. Loops carry no flow.
fn solve_flows(nv: usize, edges: &[(usize, usize)], rhs: &[i64], fixed: Option<(usize, i64)>) -> Option<Vec<i64>> {
    let mut x: Vec<Option<i64>> = edges.iter().map(|&(a, b)| (a == b).then_some(0)).collect();
    if let Some((e, t)) = fixed {
        x[e] = Some(t);
    }
    let net = |x: &[Option<i64>], v: usize| -> i64 {
        edges
            .iter()
            .zip(x)
            .map(|(&(a, b), xe)| match xe {
                Some(f) if a != b => (a == v) as i64 * f - (b == v) as i64 * f,
                _ => 0,
            })
            .sum()
    };
    loop {
        let mut progress = false;
        for v in 0..nv {
            let open: Vec<usize> =
                (0..edges.len()).filter(|&e| x[e].is_none() && (edges[e].0 == v || edges[e].1 == v)).collect();
            if open.len() == 1 {
                let e = open[0];
                let need = rhs[v] - net(&x, v);
                x[e] = Some(if edges[e].0 == v { need } else { -need });
                progress = true;
            }
        }
        if !progress {
            break;
        }
    }
    let x: Vec<i64> = x.into_iter().collect::<Option<Vec<_>>>()?;
    let xs: Vec<Option<i64>> = x.iter().map(|&f| Some(f)).collect();
    (0..nv).all(|v| net(&xs, v) == rhs[v]).then_some(x)
}

/// Level functions compatible with the edge orientations, with positive
/// levels filling `1..=s`.
fn level_assignments(nv: usize, edges: &[(usize, usize)], flows: &[i64]) -> Vec<Vec<u32>> {
    fn rec(
        v: usize,
        nv: usize,
        edges: &[(usize, usize)],
        flows: &[i64],
        cur: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) {
        if v == nv {
            let used: BTreeSet<u32> = cur.iter().copied().filter(|&l| l > 0).collect();
            if used.iter().copied().eq(1..=used.len() as u32) {
                out.push(cur.clone());
            }
            return;
        }
        'level: for l in 0..=nv as u32 {
            for (&(a, b), &f) in edges.iter().zip(flows) {
                let (la, lb) = if a == v && b < v {
                    (l, cur[b])
                } else if b == v && a < v {
                    (cur[a], l)
                } else {
                    continue;
                };
                let ok = match f.signum() {
                    1 => la < lb,
                    -1 => la > lb,
                    _ => la == lb,
                };
                if !ok {
                    continue 'level;
                }
            }
            cur.push(l);
            rec(v + 1, nv, edges, flows, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, nv, edges, flows, &mut Vec::new(), &mut out);
    out
}

/// All valid combinatorial types of the given genus and degree with these
/// contact orders, cone dimension at most `max_codim` and at most
/// `max_vertices` vertices, one per isomorphism class, in canonical order.
pub fn enumerate_types(
    genus: u8,
    degree: u32,
    tangency: &[u32],
    max_codim: usize,
    max_vertices: usize,
) -> Vec<CombinatorialType> {
    let mut found: BTreeMap<Vec<u32>, CombinatorialType> = BTreeMap::new();
    if genus > 1 || tangency.iter().sum::<u32>() != degree {
        return Vec::new();
    }
    for nv in 1..=max_vertices {
        for betti in 0..=genus as usize {
            for skel in skeletons(nv, betti) {
                decorate(genus, degree, tangency, nv, &skel, betti, max_codim, &mut found);
            }
        }
    }
    found.into_values().collect()
}

#[allow(clippy::too_many_arguments)]
fn decorate(
    genus: u8,
    degree: u32,
    tangency: &[u32],
    nv: usize,
    skel: &[(usize, usize)],
    betti: usize,
    max_codim: usize,
    found: &mut BTreeMap<Vec<u32>, CombinatorialType>,
) {
    let n = tangency.len();
    let valence: Vec<usize> =
        (0..nv).map(|v| skel.iter().map(|&(a, b)| (a == v) as usize + (b == v) as usize).sum()).collect();
    let genus_choices: Vec<Option<usize>> =
        if genus as usize > betti { (0..nv).map(Some).collect() } else { vec![None] };
    let cycle = if betti == 1 { cycle_vertices(nv, skel) } else { Vec::new() };
    let cycle_edge = skel.iter().position(|&(a, b)| a != b && cycle.contains(&a) && cycle.contains(&b));
    let nassign = nv.pow(n as u32);
    for gv in &genus_choices {
        let core: Vec<usize> = match gv {
            Some(v) => vec![*v],
            None => cycle.clone(),
        };
        for degs in compositions(degree, nv) {
            if genus == 1 && core.iter().map(|&v| degs[v]).sum::<u32>() == 1 {
                continue;
            }
            for code in 0..nassign {
                let mut owner = vec![0usize; n];
                let mut c = code;
                for o in owner.iter_mut() {
                    *o = c % nv;
                    c /= nv;
                }
                let stable = (0..nv).all(|v| {
                    let sp = valence[v] + owner.iter().filter(|&&o| o == v).count();
                    let g1 = *gv == Some(v);
                    degs[v] > 0 || if g1 { sp >= 1 } else { sp >= 3 }
                });
                if !stable {
                    continue;
                }
                let rhs: Vec<i64> = (0..nv)
                    .map(|v| {
                        degs[v] as i64
                            - owner.iter().zip(tangency).filter(|(&o, _)| o == v).map(|(_, &a)| a as i64).sum::<i64>()
                    })
                    .collect();
                let fixes: Vec<Option<(usize, i64)>> = match cycle_edge {
                    Some(e) => (-(degree as i64)..=degree as i64).map(|t| Some((e, t))).collect(),
                    None => vec![None],
                };
                for fix in fixes {
                    let Some(flows) = solve_flows(nv, skel, &rhs, fix) else { continue };
                    if flows.iter().any(|f| f.unsigned_abs() > degree as u64) {
                        continue;
                    }
                    let h = flows.iter().filter(|&&f| f == 0).count();
                    for levels in level_assignments(nv, skel, &flows) {
                        let s = levels.iter().copied().max().unwrap_or(0) as usize;
                        if s + h > max_codim {
                            continue;
                        }
                        let vertices: Vec<TVertex> = (0..nv)
                            .map(|v| TVertex {
                                genus: (*gv == Some(v)) as u8,
                                degree: degs[v],
                                level: levels[v],
                                markings: (0..n).filter(|&i| owner[i] == v).collect(),
                            })
                            .collect();
                        let edges: Vec<TEdge> = skel
                            .iter()
                            .zip(&flows)
                            .map(|(&(a, b), &f)| {
                                let ends = if f < 0 { (b, a) } else { (a, b) };
                                TEdge { ends, slope: f.unsigned_abs() as u32 }
                            })
                            .collect();
                        match CombinatorialType::build(vertices, edges, tangency) {
                            Ok(ct) => {
                                let (code, pos) = ct.canonical_code(&vec![0; nv]);
                                found.entry(code).or_insert_with(|| ct.relabel(&pos));
                            }
                            Err(e) => debug_assert!(false, "generated an invalid type: {e}"),
                        }
                    }
                }
            }
        }
    }
}

/// A ray of the aligned, well-spaced complex before the choice of a
/// recursion marking.
#[derive(Clone, Debug)]
struct RawRay {
    ctype: CombinatorialType,
    cone: Cone,
    alignment: AlignmentData,
    kind: DivisorKind,
    pruned: bool,
}

type RayKey = (u8, u32, Vec<u32>, usize);

/// Every ray with some marking on a positive level, one per isomorphism
/// class; shared between queries that differ only in the marking, the kind
/// filter or pruning.
fn raw_rays(genus: u8, degree: u32, tangency: &[u32], max_vertices: usize) -> Arc<Vec<RawRay>> {
    static CACHE: Lazy<Mutex<HashMap<RayKey, Arc<Vec<RawRay>>>>> = Lazy::new(Default::default);
    let key = (genus, degree, tangency.to_vec(), max_vertices);
    if let Some(r) = CACHE.lock().unwrap().get(&key) {
        return r.clone();
    }
    let mut out: BTreeMap<String, RawRay> = BTreeMap::new();
    // A ray has dimension one; every type's dimension is at most its vertex
    // count, so larger types are never needed.
    for ct in enumerate_types(genus, degree, tangency, max_vertices, max_vertices) {
        if ct.legs.iter().all(|l| ct.vertices[l.vertex].level == 0) {
            continue;
        }
        let kind = classify(&ct);
        let dim = ct.target_levels as usize + ct.horizontal_edges();
        if (kind != DivisorKind::Dagger && dim != 1) || dim > ct.nv() {
            continue;
        }
        let base = ct.cone();
        for (rel, strict, al) in alignment_patterns(&base, &ct, Some(1)) {
            // Cheap filters first; feasibility is the expensive part.
            let cell = base.with(&rel, &strict);
            if cell.dim() != 1 || !is_well_spaced(&ct, &al) || !cell.is_feasible() {
                continue;
            }
            let labels = al.labels(ct.nv());
            let key = format!("{}|{}", kind, ct.canonical_with(&labels).0);
            let pruned = prune_reason(&ct, &al).is_some();
            out.entry(key).or_insert_with(|| RawRay { ctype: ct.clone(), cone: cell, alignment: al, kind, pruned });
        }
    }
    let rays = Arc::new(out.into_values().collect::<Vec<_>>());
    CACHE.lock().unwrap().insert(key, rays.clone());
    rays
}

/// Rays of the aligned, well-spaced complex with the recursion marking on a
/// positive level, classified, optionally pruned, in canonical order.
pub fn enumerate_boundary_divisors(q: &StrataQuery) -> Result<Vec<BoundaryDivisor>> {
    if q.degree == 0 {
        return Err(Error::Validation("boundary divisors need degree at least 1".into()));
    }
    if q.mark >= q.tangency.len() {
        return Err(Error::Validation(format!("recursion marking {} out of range", q.mark)));
    }
    let rays = raw_rays(q.genus, q.degree, &q.tangency, q.max_vertices);
    Ok(rays
        .iter()
        .filter(|r| r.ctype.vertices[r.ctype.legs[q.mark].vertex].level > 0)
        .filter(|r| q.kinds.as_ref().map_or(true, |ks| ks.contains(&r.kind)))
        .filter(|r| !(q.prune && r.pruned))
        .map(|r| BoundaryDivisor::new(r.ctype.clone(), r.cone.clone(), r.alignment.clone(), q.mark))
        .collect())
}
