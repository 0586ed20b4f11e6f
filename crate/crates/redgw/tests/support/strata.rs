//! Exhaustive generate-and-filter enumeration of boundary rays, written
//! without the library's enumeration, cones or alignment code.
//!
//! Types are generated as level-sorted labelled multigraphs whose degrees
//! are read off from balancing. Rays of the alignment subdivision are found
//! as kernels of subsets of the tie hyperplanes `lambda(a) = lambda(b)` and
//! every predicate is evaluated numerically at the ray generator.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_rational::Rational64 as Q;
use num_traits::{One, Signed, Zero};

use redgw::tropical::{enumerate_boundary_divisors, BoundaryDivisor, CombinatorialType, StrataQuery};

pub const OUTSIDE: u32 = u32::MAX;

/// A decorated graph in the oracle's own representation. Edges are
/// `(lower, upper, slope)`; on a common level the order is arbitrary.
#[derive(Clone, Debug)]
pub struct Graph {
    pub level: Vec<u32>,
    pub genus: Vec<u8>,
    pub degree: Vec<i64>,
    pub owner: Vec<usize>,
    /// Leg slopes, one per marking.
    pub alpha: Vec<u32>,
    pub edges: Vec<(usize, usize, u32)>,
}

impl Graph {
    fn nv(&self) -> usize {
        self.level.len()
    }

    pub fn from_type(ct: &CombinatorialType) -> Graph {
        Graph {
            level: ct.vertices.iter().map(|v| v.level).collect(),
            genus: ct.vertices.iter().map(|v| v.genus).collect(),
            degree: ct.vertices.iter().map(|v| v.degree as i64).collect(),
            owner: ct.legs.iter().map(|l| l.vertex).collect(),
            alpha: ct.legs.iter().map(|l| l.slope).collect(),
            edges: ct.edges.iter().map(|e| (e.ends.0, e.ends.1, e.slope)).collect(),
        }
    }

    /// Minimal encoding over all relabellings, with an extra label per
    /// vertex. Only vertices with equal invariants are permuted.
    pub fn code(&self, extra: &[u32]) -> Vec<u32> {
        let n = self.nv();
        let inv: Vec<Vec<u32>> = (0..n)
            .map(|v| {
                let mut k = vec![self.level[v], self.genus[v] as u32, self.degree[v] as u32, extra[v]];
                k.extend((0..self.owner.len()).filter(|&i| self.owner[i] == v).map(|i| i as u32));
                k.push(u32::MAX);
                k
            })
            .collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| inv[a].cmp(&inv[b]));
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for &v in &order {
            match blocks.last_mut() {
                Some(b) if inv[b[0]] == inv[v] => b.push(v),
                _ => blocks.push(vec![v]),
            }
        }
        let head: Vec<u32> = order.iter().flat_map(|&v| inv[v].iter().copied()).collect();
        let mut best: Option<Vec<u32>> = None;
        let mut pos = vec![0usize; n];
        block_perms(&blocks, 0, 0, &mut pos, &mut |pos| {
            let mut es: Vec<(usize, usize, u32)> = self
                .edges
                .iter()
                .map(|&(a, b, m)| {
                    let (x, y) = (pos[a], pos[b]);
                    if self.level[a] == self.level[b] {
                        (x.min(y), x.max(y), m)
                    } else {
                        (x, y, m)
                    }
                })
                .collect();
            es.sort();
            let code: Vec<u32> = es.iter().flat_map(|&(a, b, m)| [a as u32, b as u32, m]).collect();
            if best.as_ref().map_or(true, |b| code < *b) {
                best = Some(code);
            }
        });
        let mut out = head;
        out.push(u32::MAX);
        out.extend(best.unwrap_or_default());
        out
    }
}

fn block_perms(blocks: &[Vec<usize>], bi: usize, start: usize, pos: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if bi == blocks.len() {
        f(pos);
        return;
    }
    let b = &blocks[bi];
    let mut perm: Vec<usize> = (0..b.len()).collect();
    loop {
        for (i, &v) in b.iter().enumerate() {
            pos[v] = start + perm[i];
        }
        block_perms(blocks, bi + 1, start + b.len(), pos, f);
        if !next_permutation(&mut perm) {
            break;
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Every stable, balanced, connected graph with a positive level and at most
/// `max_v` vertices, as labelled graphs (with repetitions).
fn generate(genus: u8, d: u32, alpha: &[u32], max_v: usize, f: &mut dyn FnMut(Graph)) {
    for nv in 1..=max_v {
        for level in level_sequences(nv) {
            let s = *level.last().unwrap();
            let mut items = Vec::new();
            for i in 0..nv {
                for j in i..nv {
                    if level[i] == level[j] {
                        items.push((i, j, 0));
                    } else {
                        items.extend((1..=d).map(|m| (i, j, m)));
                    }
                }
            }
            for betti in 0..=genus as usize {
                let ne = nv - 1 + betti;
                let mut chosen = Vec::new();
                let mut flux = vec![0u32; s as usize + 1];
                pick_edges(&items, 0, ne, &level, d, &mut flux, &mut chosen, &mut |edges| {
                    // Ties among the non-core vertices cut at most nv - 2
                    // dimensions, so a ray needs s + h <= nv.
                    let h = edges.iter().filter(|e| e.2 == 0).count();
                    if s as usize + h > nv || !connected(nv, edges) {
                        return;
                    }
                    let gchoices: Vec<Option<usize>> =
                        if genus as usize > betti { (0..nv).map(Some).collect() } else { vec![None] };
                    let mut base = vec![0i64; nv];
                    let mut valence = vec![0usize; nv];
                    for &(a, b, m) in edges {
                        base[a] += m as i64;
                        base[b] -= m as i64;
                        valence[a] += 1;
                        valence[b] += 1;
                    }
                    let n = alpha.len();
                    let mut owner = vec![0; n];
                    let mut degree = vec![0i64; nv];
                    let mut special = vec![0usize; nv];
                    for code in 0..nv.pow(n as u32) {
                        let mut c = code;
                        for o in owner.iter_mut() {
                            *o = c % nv;
                            c /= nv;
                        }
                        if owner.iter().all(|&o| level[o] == 0) {
                            continue;
                        }
                        degree.copy_from_slice(&base);
                        special.copy_from_slice(&valence);
                        for (i, &o) in owner.iter().enumerate() {
                            degree[o] += alpha[i] as i64;
                            special[o] += 1;
                        }
                        if degree.iter().any(|&x| x < 0) {
                            continue;
                        }
                        for gv in &gchoices {
                            let stable = (0..nv).all(|v| {
                                degree[v] > 0 || if *gv == Some(v) { special[v] >= 1 } else { special[v] >= 3 }
                            });
                            if !stable {
                                continue;
                            }
                            let g = Graph {
                                level: level.clone(),
                                genus: (0..nv).map(|v| (*gv == Some(v)) as u8).collect(),
                                degree: degree.clone(),
                                owner: owner.clone(),
                                alpha: alpha.to_vec(),
                                edges: edges.to_vec(),
                            };
                            if genus == 1 {
                                let core = core_of(&g);
                                if core.iter().map(|&v| g.degree[v]).sum::<i64>() == 1 {
                                    continue;
                                }
                            }
                            f(g);
                        }
                    }
                });
            }
        }
    }
}

/// Nondecreasing level sequences starting at 0 or 1 with unit steps and a
/// positive top level.
fn level_sequences(nv: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for first in 0..=1u32 {
        for steps in 0..1u32 << (nv - 1) {
            let mut seq = vec![first];
            for i in 0..nv - 1 {
                seq.push(seq[i] + (steps >> i & 1));
            }
            if *seq.last().unwrap() > 0 {
                out.push(seq);
            }
        }
    }
    out
}

/// Multisets of `ne` edges from `items`, cutting early once the total slope
/// crossing some level exceeds `d` (balancing bounds it by the total
/// contact order).
#[allow(clippy::too_many_arguments)]
fn pick_edges(
    items: &[(usize, usize, u32)],
    start: usize,
    ne: usize,
    level: &[u32],
    d: u32,
    flux: &mut Vec<u32>,
    chosen: &mut Vec<(usize, usize, u32)>,
    f: &mut dyn FnMut(&[(usize, usize, u32)]),
) {
    if chosen.len() == ne {
        f(chosen);
        return;
    }
    for k in start..items.len() {
        let (a, b, m) = items[k];
        let (lo, hi) = (level[a], level[b]);
        let ok = (lo + 1..=hi).all(|c| flux[c as usize] + m <= d);
        if !ok {
            continue;
        }
        for c in lo + 1..=hi {
            flux[c as usize] += m;
        }
        chosen.push(items[k]);
        pick_edges(items, k, ne, level, d, flux, chosen, f);
        chosen.pop();
        for c in lo + 1..=hi {
            flux[c as usize] -= m;
        }
    }
}

fn connected(nv: usize, edges: &[(usize, usize, u32)]) -> bool {
    let mut seen = vec![false; nv];
    seen[0] = true;
    let mut stack = vec![0];
    while let Some(v) = stack.pop() {
        for &(a, b, _) in edges {
            for (x, y) in [(a, b), (b, a)] {
                if x == v && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    seen.iter().all(|&s| s)
}

/// The genus-one vertex, or the vertices of the cycle; empty in genus zero.
fn core_of(g: &Graph) -> Vec<usize> {
    if let Some(v) = g.genus.iter().position(|&x| x == 1) {
        return vec![v];
    }
    let n = g.nv();
    if g.edges.len() < n {
        return Vec::new();
    }
    let mut alive = vec![true; n];
    loop {
        let mut changed = false;
        for v in 0..n {
            let deg: usize = g
                .edges
                .iter()
                .map(|&(a, b, _)| (alive[a] && alive[b]) as usize * ((a == v) as usize + (b == v) as usize))
                .sum();
            if alive[v] && deg <= 1 {
                alive[v] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    (0..n).filter(|&v| alive[v]).collect()
}

type Vector = Vec<Q>;

fn rank_and_kernel(rows: &[Vector], k: usize) -> (usize, Vec<Vector>) {
    let mut m: Vec<Vector> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..k {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let piv = m[r][c];
        for x in m[r].iter_mut() {
            *x /= piv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c];
                for j in 0..k {
                    let t = m[r][j] * f;
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let kernel = (0..k)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![Q::zero(); k];
            v[free] = Q::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -m[i][free];
            }
            v
        })
        .collect();
    (pivots.len(), kernel)
}

fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// One ray of the aligned complex of some type.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct OracleRay {
    pub kind: &'static str,
    pub code: Vec<u32>,
    /// Whether the projection-formula pruning removes the ray.
    pub pruned: bool,
    /// Per marking: does it sit on a positive level?
    pub raised: Vec<bool>,
}

pub fn kind_of(g: &Graph) -> &'static str {
    let core = core_of(g);
    if core.is_empty() {
        return "rational";
    }
    if core.iter().all(|&v| g.degree[v] == 0) {
        return "dagger";
    }
    match g.genus.iter().position(|&x| x == 1) {
        Some(v) if g.level[v] == 0 => "I",
        Some(_) => "III",
        None => "II",
    }
}

/// Distances to the core as linear forms in the parameters: the gaps
/// between consecutive levels, then the lengths of horizontal edges.
fn distances(g: &Graph, core: &[usize]) -> (usize, Vec<Vector>) {
    let s = *g.level.iter().max().unwrap() as usize;
    let horizontal: Vec<usize> = (0..g.edges.len()).filter(|&i| g.edges[i].2 == 0).collect();
    let k = s + horizontal.len();
    let length = |i: usize| -> Vector {
        let (a, b, m) = g.edges[i];
        let mut v = vec![Q::zero(); k];
        if m == 0 {
            v[s + horizontal.iter().position(|&h| h == i).unwrap()] = Q::one();
        } else {
            for gap in g.level[a]..g.level[b] {
                v[gap as usize] = Q::new(1, m as i64);
            }
        }
        v
    };
    let mut lam: Vec<Option<Vector>> = vec![None; g.nv()];
    let mut queue = VecDeque::new();
    for &c in core {
        lam[c] = Some(vec![Q::zero(); k]);
        queue.push_back(c);
    }
    while let Some(v) = queue.pop_front() {
        for (i, &(a, b, _)) in g.edges.iter().enumerate() {
            if core.contains(&a) && core.contains(&b) {
                continue;
            }
            for (x, y) in [(a, b), (b, a)] {
                if x == v && lam[y].is_none() {
                    let base = lam[v].clone().unwrap();
                    lam[y] = Some(base.iter().zip(length(i)).map(|(p, q)| p + q).collect());
                    queue.push_back(y);
                }
            }
        }
    }
    (k, lam.into_iter().map(|l| l.unwrap()).collect())
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if n < k {
        return Vec::new();
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Rays of the aligned complex of one type, with their alignment labels.
fn rays_of(g: &Graph) -> Vec<OracleRay> {
    let kind = kind_of(g);
    let core = core_of(g);
    let n = g.nv();
    let crowded = (1..=*g.level.iter().max().unwrap())
        .any(|l| g.level.iter().filter(|&&x| x == l).count() > 1);
    let raised: Vec<bool> = g.owner.iter().map(|&v| g.level[v] > 0).collect();
    let s = *g.level.iter().max().unwrap() as usize;
    let h = g.edges.iter().filter(|e| e.2 == 0).count();
    let k = s + h;
    let trivial = core.is_empty() || core.iter().any(|&v| g.degree[v] > 0);
    if trivial {
        if k != 1 {
            return Vec::new();
        }
        return vec![OracleRay {
            kind,
            code: g.code(&vec![OUTSIDE; n]),
            pruned: crowded,
            raised,
        }];
    }
    let (k, lam) = distances(g, &core);
    let others: Vec<usize> = (0..n).filter(|v| !core.contains(v)).collect();
    let mut planes: Vec<Vector> = Vec::new();
    for (i, &a) in others.iter().enumerate() {
        for &b in &others[i + 1..] {
            let p: Vector = lam[a].iter().zip(&lam[b]).map(|(x, y)| x - y).collect();
            if p.iter().any(|x| !x.is_zero()) {
                planes.push(p);
            }
        }
    }
    let mut found: BTreeMap<Vec<u32>, OracleRay> = BTreeMap::new();
    for sub in subsets(planes.len(), k - 1) {
        let rows: Vec<Vector> = sub.iter().map(|&i| planes[i].clone()).collect();
        let (_, ker) = rank_and_kernel(&rows, k);
        if ker.len() != 1 {
            continue;
        }
        let mut w = ker[0].clone();
        if w.iter().all(|x| x.is_negative()) {
            w = w.iter().map(|x| -x).collect();
        }
        if !w.iter().all(|x| x.is_positive()) {
            continue;
        }
        let val: Vec<Q> = lam.iter().map(|l| dot(l, &w)).collect();
        let delta = (0..n).filter(|&v| g.degree[v] > 0).map(|v| val[v]).min().unwrap();
        let mut radii: Vec<Q> = others.iter().map(|&v| val[v]).filter(|&x| x <= delta).collect();
        radii.sort();
        radii.dedup();
        let labels: Vec<u32> = (0..n)
            .map(|v| {
                if core.contains(&v) {
                    0
                } else {
                    radii.iter().position(|&r| r == val[v]).map_or(OUTSIDE, |i| i as u32 + 1)
                }
            })
            .collect();
        let mut ties = Vec::new();
        for (i, &a) in others.iter().enumerate() {
            for &b in &others[i + 1..] {
                if labels[a] != OUTSIDE && labels[a] == labels[b] {
                    ties.push(lam[a].iter().zip(&lam[b]).map(|(x, y)| x - y).collect());
                }
            }
        }
        if k - rank_and_kernel(&ties, k).0 != 1 {
            continue;
        }
        if !well_spaced(g, &core, &val) {
            continue;
        }
        let crossing = kind == "dagger"
            && g.edges.iter().any(|&(a, b, _)| {
                (val[a] < delta && val[b] > delta) || (val[b] < delta && val[a] > delta)
            });
        let code = g.code(&labels);
        found.entry(code.clone()).or_insert(OracleRay { kind, code, pruned: crowded || crossing, raised: raised.clone() });
    }
    found.into_values().collect()
}

/// Directly from the definition, at a point with distances `val`.
fn well_spaced(g: &Graph, core: &[usize], val: &[Q]) -> bool {
    if core.iter().any(|&v| g.level[v] == 0) {
        return true;
    }
    let moving = |v: usize| {
        g.edges.iter().any(|&(a, b, m)| m > 0 && (a == v || b == v))
            || g.owner.iter().enumerate().any(|(i, &o)| o == v && g.alpha[i] > 0)
    };
    if core.iter().any(|&v| moving(v)) {
        return true;
    }
    // The region contracted together with the core.
    let mut region: BTreeSet<usize> = core.iter().copied().collect();
    let mut grew = true;
    while grew {
        grew = false;
        for &(a, b, m) in &g.edges {
            if m == 0 && region.contains(&a) != region.contains(&b) {
                region.insert(a);
                region.insert(b);
                grew = true;
            }
        }
    }
    let mut flags: Vec<Q> = Vec::new();
    for &v in &region {
        for &(a, b, m) in &g.edges {
            if m > 0 {
                flags.extend((a == v).then_some(val[v]));
                flags.extend((b == v).then_some(val[v]));
            }
        }
        for (i, &o) in g.owner.iter().enumerate() {
            if o == v && g.alpha[i] > 0 {
                flags.push(val[v]);
            }
        }
    }
    let Some(&min) = flags.iter().min() else { return true };
    flags.iter().filter(|&&x| x == min).count() >= 2
}

/// All rays for genus `genus`, degree `d` and contact orders `alpha`, for
/// every choice of recursion marking at once.
pub fn oracle_rays(genus: u8, d: u32, alpha: &[u32], max_v: usize) -> Vec<OracleRay> {
    let mut types: BTreeMap<Vec<u32>, Graph> = BTreeMap::new();
    generate(genus, d, alpha, max_v, &mut |g| {
        let code = g.code(&vec![0; g.nv()]);
        types.entry(code).or_insert(g);
    });
    let mut rays: BTreeMap<Vec<u32>, OracleRay> = BTreeMap::new();
    for g in types.values() {
        for r in rays_of(g) {
            rays.entry(r.code.clone()).or_insert(r);
        }
    }
    rays.into_values().collect()
}

/// The library's rays in the oracle's canonical form.
pub fn library_key(b: &BoundaryDivisor) -> (&'static str, Vec<u32>) {
    let g = Graph::from_type(&b.ctype);
    let labels: Vec<u32> = if b.alignment.is_trivial() {
        vec![OUTSIDE; g.nv()]
    } else {
        (0..g.nv()).map(|v| b.alignment.class_of(v).map_or(OUTSIDE, |c| c as u32)).collect()
    };
    (b.kind.name(), g.code(&labels))
}

/// Tangency vectors with at most three markings, some possibly interior.
pub fn contact_vectors(d: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for n in 1..=3usize {
        let mut v = vec![0u32; n];
        fn rec(v: &mut Vec<u32>, i: usize, left: u32, max: u32, out: &mut Vec<Vec<u32>>) {
            if i == v.len() {
                if left == 0 {
                    out.push(v.clone());
                }
                return;
            }
            for x in (0..=left.min(max)).rev() {
                v[i] = x;
                rec(v, i + 1, left - x, x, out);
            }
        }
        rec(&mut v, 0, d, d, &mut out);
    }
    out
}

/// Compares the library's rays with the oracle's for every genus <= 1,
/// degree <= `max_d`, contact vector with at most three markings, recursion
/// marking and pruning flag. Returns the number of ray sets compared.
pub fn compare_with_library(max_d: u32, max_v: usize) -> Result<usize, String> {
    let mut n = 0;
    for genus in 0..=1u8 {
        for d in 1..=max_d {
            for alpha in contact_vectors(d) {
                let oracle = oracle_rays(genus, d, &alpha, max_v);
                for mark in 0..alpha.len() {
                    for prune in [false, true] {
                        let want: BTreeSet<_> = oracle
                            .iter()
                            .filter(|r| r.raised[mark] && !(prune && r.pruned))
                            .map(|r| (r.kind, r.code.clone()))
                            .collect();
                        let mut q = StrataQuery::new(genus, d, alpha.clone(), mark);
                        q.prune = prune;
                        q.max_vertices = max_v;
                        let got: BTreeSet<_> = enumerate_boundary_divisors(&q)
                            .map_err(|e| e.to_string())?
                            .iter()
                            .map(library_key)
                            .collect();
                        if got != want {
                            return Err(format!(
                                "g={genus} d={d} alpha={alpha:?} mark={mark} prune={prune}: {} rays vs oracle {}",
                                got.len(),
                                want.len()
                            ));
                        }
                        n += 1;
                    }
                }
            }
        }
    }
    Ok(n)
}
