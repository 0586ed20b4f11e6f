//! Tropical shadow of the moduli space: decorated dual graphs of maps to
//! the half-line with its level structure, their cones, the image-ordering
//! and central-alignment subdivisions, well-spacedness and the enumeration
//! of boundary divisors that drive the recursion.
//!
//! Level 0 is the ambient space; levels `1..=s` are the rubber components of
//! the expanded target. Legs point towards infinity. At every vertex
//!
//! ```text
//! degree = sum(upward slopes) + sum(leg slopes) - sum(downward slopes)
//! ```

pub mod cone;
mod enumerate;
pub mod linalg;
mod subdivide;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::error::{Error, Result};

pub use cone::{Cone, ConeComplex};
pub use enumerate::{
    classify, enumerate_boundary_divisors, enumerate_types, prune_reason, BoundaryDivisor, DivisorKind, Piece,
    PruneReason, SplitData, StrataQuery, DEFAULT_MAX_VERTICES,
};
pub use linalg::Row;
pub use subdivide::{align, image_order, is_well_spaced, AlignmentData};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TVertex {
    pub genus: u8,
    pub degree: u32,
    pub level: u32,
    pub markings: Vec<usize>,
}

/// `ends.0` sits on the lower level (or the smaller index on a common level).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TEdge {
    pub ends: (usize, usize),
    pub slope: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Leg {
    pub vertex: usize,
    pub slope: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CombinatorialType {
    pub vertices: Vec<TVertex>,
    pub edges: Vec<TEdge>,
    /// One leg per marking, indexed by marking.
    pub legs: Vec<Leg>,
    pub target_levels: u32,
}

impl CombinatorialType {
    /// Builds a type from vertices and edges; legs are read off the vertex
    /// markings with the given slopes, edges are oriented upward.
    pub fn build(vertices: Vec<TVertex>, edges: Vec<TEdge>, leg_slopes: &[u32]) -> Result<CombinatorialType> {
        let mut legs = vec![None; leg_slopes.len()];
        for (v, vx) in vertices.iter().enumerate() {
            for &i in &vx.markings {
                let slot = legs
                    .get_mut(i)
                    .ok_or_else(|| Error::Validation(format!("marking {i} has no slope")))?;
                if slot.is_some() {
                    return Err(Error::Validation(format!("marking {i} on two vertices")));
                }
                *slot = Some(Leg { vertex: v, slope: leg_slopes[i] });
            }
        }
        let legs = legs
            .into_iter()
            .enumerate()
            .map(|(i, l)| l.ok_or_else(|| Error::Validation(format!("marking {i} on no vertex"))))
            .collect::<Result<Vec<_>>>()?;
        let target_levels = vertices.iter().map(|v| v.level).max().unwrap_or(0);
        let mut edges = edges;
        for e in edges.iter_mut() {
            let (a, b) = e.ends;
            let (la, lb) = (
                vertices.get(a).map(|v| v.level).unwrap_or(0),
                vertices.get(b).map(|v| v.level).unwrap_or(0),
            );
            if la > lb || (la == lb && a > b) {
                e.ends = (b, a);
            }
        }
        let ct = CombinatorialType { vertices, edges, legs, target_levels };
        ct.validate()?;
        Ok(ct)
    }

    pub fn nv(&self) -> usize {
        self.vertices.len()
    }

    pub fn degree(&self) -> u32 {
        self.vertices.iter().map(|v| v.degree).sum()
    }

    /// First Betti number of the graph.
    pub fn betti(&self) -> usize {
        (self.edges.len() + 1).saturating_sub(self.nv())
    }

    pub fn genus(&self) -> usize {
        self.betti() + self.vertices.iter().map(|v| v.genus as usize).sum::<usize>()
    }

    /// Number of edges of slope 0.
    pub fn horizontal_edges(&self) -> usize {
        self.edges.iter().filter(|e| e.slope == 0).count()
    }

    /// Edges at `v`, loops listed twice.
    pub fn incident(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if e.ends.0 == v {
                out.push(i);
            }
            if e.ends.1 == v {
                out.push(i);
            }
        }
        out
    }

    /// Markings plus half-edges.
    pub fn special_points(&self, v: usize) -> usize {
        self.vertices[v].markings.len() + self.incident(v).len()
    }

    /// `sum(up) + sum(legs) - sum(down)` at `v`.
    pub fn balance(&self, v: usize) -> i64 {
        let mut s: i64 = self.vertices[v].markings.iter().map(|&i| self.legs[i].slope as i64).sum();
        for e in &self.edges {
            if e.ends.0 == v {
                s += e.slope as i64;
            }
            if e.ends.1 == v {
                s -= e.slope as i64;
            }
        }
        s
    }

    pub fn is_stable_vertex(&self, v: usize) -> bool {
        let vx = &self.vertices[v];
        let sp = self.special_points(v);
        match vx.genus {
            0 => vx.degree > 0 || sp >= 3,
            _ => vx.degree > 0 || sp >= 1,
        }
    }

    pub fn is_connected(&self) -> bool {
        if self.nv() == 0 {
            return false;
        }
        let mut seen = vec![false; self.nv()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for e in &self.edges {
                for (a, b) in [(e.ends.0, e.ends.1), (e.ends.1, e.ends.0)] {
                    if a == v && !seen[b] {
                        seen[b] = true;
                        queue.push_back(b);
                    }
                }
            }
        }
        seen.into_iter().all(|x| x)
    }

    /// Vertices carrying the genus: the genus-one vertex or the cycle.
    /// `None` in genus zero.
    pub fn core(&self) -> Option<Vec<usize>> {
        if let Some(v) = self.vertices.iter().position(|v| v.genus == 1) {
            return Some(vec![v]);
        }
        if self.betti() == 0 {
            return None;
        }
        // Peel leaves; what remains is the cycle.
        let mut alive = vec![true; self.nv()];
        loop {
            let mut changed = false;
            for v in 0..self.nv() {
                if !alive[v] {
                    continue;
                }
                let val = self
                    .edges
                    .iter()
                    .map(|e| {
                        (e.ends.0 == v && alive[e.ends.1]) as usize + (e.ends.1 == v && alive[e.ends.0]) as usize
                    })
                    .sum::<usize>();
                if val <= 1 {
                    alive[v] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        Some((0..self.nv()).filter(|&v| alive[v]).collect())
    }

    pub fn core_degree(&self) -> Option<u32> {
        self.core().map(|c| c.iter().map(|&v| self.vertices[v].degree).sum())
    }

    /// Edges inside the core (the cycle's edges, loops included).
    pub fn core_edges(&self) -> Vec<usize> {
        let Some(core) = self.core() else { return Vec::new() };
        if self.vertices.iter().any(|v| v.genus == 1) {
            return Vec::new();
        }
        (0..self.edges.len())
            .filter(|&i| core.contains(&self.edges[i].ends.0) && core.contains(&self.edges[i].ends.1))
            .collect()
    }

    /// Structural checks: marking bookkeeping, orientation, slopes, levels,
    /// balancing, connectivity, genus at most one, stability.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Validation(msg));
        let nv = self.nv();
        if nv == 0 {
            return bad("type without vertices".into());
        }
        for (i, leg) in self.legs.iter().enumerate() {
            if leg.vertex >= nv || !self.vertices[leg.vertex].markings.contains(&i) {
                return bad(format!("leg {i} does not match the vertex markings"));
            }
        }
        let nmarks: usize = self.vertices.iter().map(|v| v.markings.len()).sum();
        if nmarks != self.legs.len() {
            return bad("vertex markings and legs disagree".into());
        }
        for (i, e) in self.edges.iter().enumerate() {
            let (a, b) = e.ends;
            if a >= nv || b >= nv {
                return bad(format!("edge {i} has an endpoint out of range"));
            }
            let (la, lb) = (self.vertices[a].level, self.vertices[b].level);
            if la > lb {
                return bad(format!("edge {i} is not oriented upward"));
            }
            if (la == lb) != (e.slope == 0) {
                return bad(format!("edge {i}: slope {} between levels {la} and {lb}", e.slope));
            }
        }
        let used: BTreeSet<u32> = self.vertices.iter().map(|v| v.level).filter(|&l| l > 0).collect();
        if used.len() as u32 != self.target_levels || used.iter().any(|&l| l > self.target_levels) {
            return bad(format!("levels {used:?} do not fill 1..={}", self.target_levels));
        }
        for v in 0..nv {
            let b = self.balance(v);
            if b != self.vertices[v].degree as i64 {
                return bad(format!("balancing fails at vertex {v}: degree {} but slopes give {b}", self.vertices[v].degree));
            }
            if self.vertices[v].genus > 1 {
                return bad(format!("vertex {v} has genus {}", self.vertices[v].genus));
            }
        }
        if !self.is_connected() {
            return bad("graph is disconnected".into());
        }
        if self.genus() > 1 {
            return bad(format!("total genus {} exceeds one", self.genus()));
        }
        if let Some(v) = (0..nv).find(|&v| !self.is_stable_vertex(v)) {
            return bad(format!("vertex {v} is unstable"));
        }
        Ok(())
    }

    /// Index of each cone coordinate: positions of positive-level vertices,
    /// then edge lengths.
    pub fn coordinate_names(&self) -> Vec<String> {
        let mut names: Vec<String> =
            (0..self.nv()).filter(|&v| self.vertices[v].level > 0).map(|v| format!("p{v}")).collect();
        names.extend((0..self.edges.len()).map(|e| format!("l{e}")));
        names
    }

    pub fn ncoords(&self) -> usize {
        self.vertices.iter().filter(|v| v.level > 0).count() + self.edges.len()
    }

    /// Linear form giving the position of `v` in the target.
    pub fn position_form(&self, v: usize) -> Row {
        let mut row = vec![0; self.ncoords()];
        if self.vertices[v].level > 0 {
            let i = self.vertices[..v].iter().filter(|x| x.level > 0).count();
            row[i] = 1;
        }
        row
    }

    /// Linear form giving the length of edge `e`.
    pub fn length_form(&self, e: usize) -> Row {
        let np = self.ncoords() - self.edges.len();
        let mut row = vec![0; self.ncoords()];
        row[np + e] = 1;
        row
    }

    /// The cone before the image order is fixed: every vertex position is
    /// free apart from the edge relations.
    pub fn unordered_cone(&self) -> Cone {
        let mut cone = Cone::new(self.coordinate_names());
        for v in 0..self.nv() {
            if self.vertices[v].level > 0 {
                cone.strict.push(self.position_form(v));
            }
        }
        for (i, e) in self.edges.iter().enumerate() {
            let l = self.length_form(i);
            let diff = linalg::sub(&self.position_form(e.ends.1), &self.position_form(e.ends.0));
            let rel = linalg::sub(&diff, &linalg::scale(&l, e.slope as i64));
            if rel.iter().any(|&x| x != 0) {
                cone.relations.push(rel);
            }
            cone.strict.push(l);
        }
        cone
    }

    /// The cone of the type: vertices on a common level share a position and
    /// the levels increase.
    pub fn cone(&self) -> Cone {
        let mut cone = self.unordered_cone();
        let (rel, strict) = self.level_constraints();
        cone.relations.extend(rel);
        cone.strict.extend(strict);
        cone
    }

    fn level_constraints(&self) -> (Vec<Row>, Vec<Row>) {
        let mut rel = Vec::new();
        let mut strict = Vec::new();
        let mut rep: BTreeMap<u32, usize> = BTreeMap::new();
        for v in 0..self.nv() {
            let l = self.vertices[v].level;
            if l == 0 {
                continue;
            }
            match rep.get(&l) {
                Some(&w) => rel.push(linalg::sub(&self.position_form(v), &self.position_form(w))),
                None => {
                    rep.insert(l, v);
                }
            }
        }
        let reps: Vec<usize> = rep.values().copied().collect();
        for w in reps.windows(2) {
            strict.push(linalg::sub(&self.position_form(w[1]), &self.position_form(w[0])));
        }
        (rel, strict)
    }

    /// Position form of level `t` (zero for level 0).
    pub fn level_form(&self, t: u32) -> Option<Row> {
        if t == 0 {
            return Some(vec![0; self.ncoords()]);
        }
        self.vertices.iter().position(|v| v.level == t).map(|v| self.position_form(v))
    }

    /// Canonical text, invariant under relabelling vertices.
    pub fn canonical_form(&self) -> String {
        self.canonical_with(&vec![0; self.nv()]).0
    }

    /// Canonical text of the type with extra per-vertex labels, and the
    /// position of every vertex in the canonical order.
    pub fn canonical_with(&self, extra: &[u32]) -> (String, Vec<usize>) {
        let (code, pos) = self.canonical_code(extra);
        let text: Vec<String> = code.iter().map(u32::to_string).collect();
        (text.join("."), pos)
    }

    /// Colour refinement, then the least code over all orderings that
    /// respect the stable colouring.
    pub(crate) fn canonical_code(&self, extra: &[u32]) -> (Vec<u32>, Vec<usize>) {
        let nv = self.nv();
        let mut ranks = rank_keys(
            &(0..nv)
                .map(|v| {
                    let x = &self.vertices[v];
                    let mut key = vec![extra[v], x.level, x.genus as u32, x.degree, x.markings.len() as u32];
                    let mut marks = x.markings.clone();
                    marks.sort();
                    for i in marks {
                        key.extend([i as u32, self.legs[i].slope]);
                    }
                    key
                })
                .collect::<Vec<_>>(),
        );
        loop {
            let keys: Vec<Vec<u32>> = (0..nv)
                .map(|v| {
                    let mut nb: Vec<[u32; 3]> = Vec::new();
                    for e in &self.edges {
                        if e.ends.0 == v {
                            nb.push([0, e.slope, ranks[e.ends.1]]);
                        }
                        if e.ends.1 == v {
                            nb.push([1, e.slope, ranks[e.ends.0]]);
                        }
                    }
                    nb.sort();
                    let mut key = vec![ranks[v]];
                    key.extend(nb.into_iter().flatten());
                    key
                })
                .collect();
            let next = rank_keys(&keys);
            let before = ranks.iter().max().copied().unwrap_or(0);
            let after = next.iter().max().copied().unwrap_or(0);
            ranks = next;
            if after == before {
                break;
            }
        }
        let mut classes: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for v in 0..nv {
            classes.entry(ranks[v]).or_default().push(v);
        }
        let classes: Vec<Vec<usize>> = classes.into_values().collect();
        let mut best: Option<(Vec<u32>, Vec<usize>)> = None;
        let mut pos = vec![0; nv];
        for_each_product_perm(&classes, &mut |order: &[usize]| {
            for (i, &v) in order.iter().enumerate() {
                pos[v] = i;
            }
            let code = self.code(order, &pos, extra);
            if best.as_ref().map_or(true, |(b, _)| code < *b) {
                best = Some((code, pos.clone()));
            }
        });
        best.expect("at least one ordering")
    }

    fn code(&self, order: &[usize], pos: &[usize], extra: &[u32]) -> Vec<u32> {
        let mut out = Vec::with_capacity(8 * order.len() + 3 * self.edges.len());
        for &v in order {
            let x = &self.vertices[v];
            out.extend([extra[v], x.genus as u32, x.degree, x.level, x.markings.len() as u32]);
            let mut marks = x.markings.clone();
            marks.sort();
            out.extend(marks.into_iter().map(|i| i as u32));
        }
        let mut edges: Vec<[u32; 3]> = self
            .edges
            .iter()
            .map(|e| {
                let (a, b) = (pos[e.ends.0] as u32, pos[e.ends.1] as u32);
                if e.slope == 0 {
                    [a.min(b), a.max(b), 0]
                } else {
                    [a, b, e.slope]
                }
            })
            .collect();
        edges.sort();
        out.extend(edges.into_iter().flatten());
        out
    }

    /// The same type with vertices renumbered into canonical order.
    pub fn canonicalized(&self) -> CombinatorialType {
        let (_, pos) = self.canonical_with(&vec![0; self.nv()]);
        self.relabel(&pos)
    }

    /// Renumbers vertex `v` as `pos[v]`.
    pub fn relabel(&self, pos: &[usize]) -> CombinatorialType {
        let mut vertices = vec![self.vertices[0].clone(); self.nv()];
        for (v, x) in self.vertices.iter().enumerate() {
            vertices[pos[v]] = x.clone();
        }
        let mut edges: Vec<TEdge> = self
            .edges
            .iter()
            .map(|e| {
                let (a, b) = (pos[e.ends.0], pos[e.ends.1]);
                let ends = if e.slope == 0 { (a.min(b), a.max(b)) } else { (a, b) };
                TEdge { ends, slope: e.slope }
            })
            .collect();
        edges.sort();
        let legs = self.legs.iter().map(|l| Leg { vertex: pos[l.vertex], slope: l.slope }).collect();
        CombinatorialType { vertices, edges, legs, target_levels: self.target_levels }
    }

    /// Bracketed edge-list text; round-trips through `FromStr`.
    ///
    /// ```text
    /// [v0 g1 d2 l0 x0:2; v1 g0 d0 l1 x1:0] [0-1:2] s=1
    /// ```
    pub fn to_text(&self) -> String {
        let mut out = String::from("[");
        for (v, x) in self.vertices.iter().enumerate() {
            if v > 0 {
                out.push_str("; ");
            }
            let _ = write!(out, "v{v} g{} d{} l{}", x.genus, x.degree, x.level);
            for &i in &x.markings {
                let _ = write!(out, " x{i}:{}", self.legs[i].slope);
            }
        }
        out.push_str("] [");
        let edges: Vec<String> =
            self.edges.iter().map(|e| format!("{}-{}:{}", e.ends.0, e.ends.1, e.slope)).collect();
        out.push_str(&edges.join(", "));
        let _ = write!(out, "] s={}", self.target_levels);
        out
    }

    /// Graphviz rendering of the dual graph; vertices are ranked by level.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = format!("graph {name} {{\n  rankdir=BT;\n");
        for (v, x) in self.vertices.iter().enumerate() {
            let shape = if x.genus == 1 { "doublecircle" } else { "circle" };
            let fill = if x.degree == 0 { "white" } else { "black" };
            let font = if x.degree == 0 { "black" } else { "white" };
            let _ = writeln!(
                out,
                "  v{v} [shape={shape}, style=filled, fillcolor={fill}, fontcolor={font}, label=\"d{} L{}\"];",
                x.degree, x.level
            );
        }
        let mut by_level: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (v, x) in self.vertices.iter().enumerate() {
            by_level.entry(x.level).or_default().push(v);
        }
        for vs in by_level.values() {
            let names: Vec<String> = vs.iter().map(|v| format!("v{v}")).collect();
            let _ = writeln!(out, "  {{ rank=same; {} }}", names.join("; "));
        }
        for e in &self.edges {
            let _ = writeln!(out, "  v{} -- v{} [label=\"{}\"];", e.ends.0, e.ends.1, e.slope);
        }
        for (i, l) in self.legs.iter().enumerate() {
            let _ = writeln!(out, "  x{i} [shape=plaintext, label=\"x{i}\"];");
            let _ = writeln!(out, "  v{} -- x{i} [label=\"{}\", style=dashed];", l.vertex, l.slope);
        }
        out.push_str("}\n");
        out
    }
}

impl fmt::Display for CombinatorialType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for CombinatorialType {
    type Err = Error;

    fn from_str(s: &str) -> Result<CombinatorialType> {
        let bad = |m: &str| Error::Parse(format!("combinatorial type: {m} in {s:?}"));
        let s = s.trim();
        let (vpart, rest) = s
            .strip_prefix('[')
            .and_then(|r| r.split_once(']'))
            .ok_or_else(|| bad("missing vertex list"))?;
        let (epart, tail) = rest
            .trim_start()
            .strip_prefix('[')
            .and_then(|r| r.split_once(']'))
            .ok_or_else(|| bad("missing edge list"))?;
        let s_levels: u32 = tail
            .trim()
            .strip_prefix("s=")
            .and_then(|x| x.parse().ok())
            .ok_or_else(|| bad("missing s="))?;
        let num = |t: &str, p: char| -> Result<u32> {
            t.strip_prefix(p).and_then(|x| x.parse().ok()).ok_or_else(|| bad(&format!("bad field {t:?}")))
        };
        let mut vertices = Vec::new();
        let mut slopes: BTreeMap<usize, u32> = BTreeMap::new();
        for (idx, chunk) in vpart.split(';').enumerate() {
            let toks: Vec<&str> = chunk.split_whitespace().collect();
            if toks.len() < 4 || num(toks[0], 'v')? as usize != idx {
                return Err(bad("vertices must be listed as v0, v1, ..."));
            }
            let mut markings = Vec::new();
            for t in &toks[4..] {
                let (i, m) = t.strip_prefix('x').and_then(|x| x.split_once(':')).ok_or_else(|| bad(t))?;
                let i: usize = i.parse().map_err(|_| bad(t))?;
                let m: u32 = m.parse().map_err(|_| bad(t))?;
                markings.push(i);
                slopes.insert(i, m);
            }
            vertices.push(TVertex {
                genus: num(toks[1], 'g')? as u8,
                degree: num(toks[2], 'd')?,
                level: num(toks[3], 'l')?,
                markings,
            });
        }
        let mut edges = Vec::new();
        for t in epart.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (ab, m) = t.split_once(':').ok_or_else(|| bad(t))?;
            let (a, b) = ab.split_once('-').ok_or_else(|| bad(t))?;
            edges.push(TEdge {
                ends: (a.parse().map_err(|_| bad(t))?, b.parse().map_err(|_| bad(t))?),
                slope: m.parse().map_err(|_| bad(t))?,
            });
        }
        if slopes.keys().copied().ne(0..slopes.len()) {
            return Err(bad("markings must be numbered 0..n"));
        }
        let leg_slopes: Vec<u32> = slopes.into_values().collect();
        let ct = CombinatorialType::build(vertices, edges, &leg_slopes)?;
        if ct.target_levels != s_levels {
            return Err(bad("s= disagrees with the vertex levels"));
        }
        Ok(ct)
    }
}

/// Dense ranks of the keys in sorted order.
fn rank_keys(keys: &[Vec<u32>]) -> Vec<u32> {
    let sorted: BTreeSet<&Vec<u32>> = keys.iter().collect();
    let index: BTreeMap<&Vec<u32>, u32> = sorted.into_iter().enumerate().map(|(i, k)| (k, i as u32)).collect();
    keys.iter().map(|k| index[k]).collect()
}

/// Calls `f` on every concatenation of permutations of the classes.
fn for_each_product_perm(classes: &[Vec<usize>], f: &mut dyn FnMut(&[usize])) {
    fn rec(classes: &[Vec<usize>], i: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if i == classes.len() {
            f(cur);
            return;
        }
        let mut c = classes[i].clone();
        permute(&mut c, 0, &mut |p| {
            let n = cur.len();
            cur.extend_from_slice(p);
            rec(classes, i + 1, cur, f);
            cur.truncate(n);
        });
    }
    fn permute(v: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
        if k == v.len() {
            f(v);
            return;
        }
        for i in k..v.len() {
            v.swap(k, i);
            permute(v, k + 1, f);
            v.swap(k, i);
        }
    }
    rec(classes, 0, &mut Vec::new(), f);
}
