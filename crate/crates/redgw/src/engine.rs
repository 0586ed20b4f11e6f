//! The recursion engine.
//!
//! A relative invariant with an interior marking `x_k` carrying `H^a`,
//! `a >= 1`, is rewritten by moving `x_k` onto H: the curve breaks into a
//! rubber part over H that holds `x_k` (now with `H^{a-1}`) and some relative
//! markings, and level-0 pieces, each meeting H in one point (genus 0 or 1) or
//! in two points (a genus-0 piece closing a loop). The diagonal of H is
//! inserted at every node. Rubber and absolute genus-one invariants are
//! reduced to relative ones; genus zero ends in WDVV.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

use crate::dm;
use crate::error::{Error, Result};
use crate::genus0::{G0Marking, G0Provider};
use crate::key::{normalize_key, primary_key, InvariantKey, Theory};
use crate::rat::Rat;
use crate::store::Store;
use crate::multiplicities::contribution_factor;
use crate::tropical::{align, is_well_spaced, prune_reason, CombinatorialType, TEdge, TVertex};
use crate::trace::{Derivation, RecursionTrace, Rule, TraceNode, TraceTerm};

/// Which interior marking drives a tangency step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MarkingChoice {
    /// Largest class first.
    #[default]
    MaxClass,
    MinClass,
    /// First admissible marking in canonical order.
    First,
    /// Last admissible marking in canonical order.
    Last,
}

#[derive(Clone, Debug)]
pub struct EngineOptions {
    pub choice: MarkingChoice,
    /// Worker threads for the top-level split; 1 runs inline.
    pub jobs: usize,
    /// Record a derivation for every computed key.
    pub trace: bool,
    /// Evaluate the dagger terms removed by tropical pruning anyway and fail
    /// unless they vanish.
    pub check_pruned: bool,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions { choice: MarkingChoice::MaxClass, jobs: 1, trace: false, check_pruned: false }
    }
}

/// `(contact order, class)`.
type Mk = (i64, u32);
/// Sorted multiset of marking types.
type Marks = Vec<(Mk, u32)>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Sig {
    rubber: bool,
    genus: u8,
    m: u32,
    d: u32,
    marks: Marks,
}

/// Well-founded order on keys; every recursive call strictly descends.
type Measure = (u32, u32, u8, usize);

fn measure(theory: Theory, m: u32, d: u32, n: usize) -> Measure {
    match theory {
        Theory::Relative => (m, d, 0, n),
        Theory::AbsoluteAmbient => (m, d, 1, n),
        Theory::AbsoluteDivisor => (m - 1, d, 2, n),
        Theory::Rubber => (m - 1, d, 3, n),
    }
}

fn key_measure(k: &InvariantKey) -> Measure {
    measure(k.theory, k.m, k.degree, k.n())
}

fn count(list: &[Mk]) -> Marks {
    let mut map: BTreeMap<Mk, u32> = BTreeMap::new();
    for &t in list {
        *map.entry(t).or_default() += 1;
    }
    map.into_iter().collect()
}

fn expand(marks: &Marks) -> Vec<Mk> {
    marks.iter().flat_map(|&(t, c)| std::iter::repeat(t).take(c as usize)).collect()
}

fn n_of(marks: &Marks) -> usize {
    marks.iter().map(|x| x.1 as usize).sum()
}

fn marks_of(k: &InvariantKey) -> Marks {
    let list: Vec<Mk> = k
        .tangency
        .entries
        .iter()
        .zip(&k.insertions)
        .map(|(&a, ins)| (a, ins.class))
        .collect();
    count(&list)
}

fn sig_key(s: &Sig) -> Result<InvariantKey> {
    let theory = if s.rubber { Theory::Rubber } else { Theory::Relative };
    normalize_key(&primary_key(theory, s.genus, s.m, s.d, &expand(&s.marks)))
}

/// One level-0 piece: the markings it takes (per type), its genus and its
/// contact orders with H.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Piece {
    sub: Vec<u32>,
    genus: u8,
    contacts: Vec<u32>,
}

struct Config {
    w0: Rat,
    m0: Vec<u32>,
    pieces: Vec<Piece>,
    wp: Rat,
}

fn subvecs(v: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for &c in v {
        let mut next = Vec::new();
        for p in &out {
            for x in 0..=c {
                let mut q = p.clone();
                q.push(x);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

fn factorial_u(n: u32) -> Rat {
    Rat::factorial(n as u64)
}

/// Multisets of pieces using up `rest` exactly, with total contact at most
/// `budget` and genus at most `g`, weighted by the number of ways of
/// distributing labelled markings over unlabelled pieces.
fn piece_multisets(rest: &[u32], budget: u32, g: u8) -> Vec<(Vec<Piece>, Rat)> {
    fn opts(budget: u32) -> Vec<(u8, Vec<u32>)> {
        let mut v = Vec::new();
        for c in 1..=budget {
            v.push((0, vec![c]));
            v.push((1, vec![c]));
        }
        for c1 in 1..=budget {
            for c2 in c1..=budget.saturating_sub(c1) {
                v.push((0, vec![c1, c2]));
            }
        }
        v
    }
    #[allow(clippy::too_many_arguments)]
    fn rec(
        remaining: &[u32],
        budget: u32,
        gleft: u8,
        pieces: &mut Vec<Piece>,
        out: &mut Vec<(Vec<Piece>, Rat)>,
    ) {
        if remaining.iter().all(|&x| x == 0) {
            let mut w = Rat::one();
            for p in pieces.iter() {
                for &b in &p.sub {
                    w = w / factorial_u(b);
                }
            }
            let mut mult: BTreeMap<&Piece, u32> = BTreeMap::new();
            for p in pieces.iter() {
                *mult.entry(p).or_default() += 1;
            }
            for &v in mult.values() {
                w = w / factorial_u(v);
            }
            out.push((pieces.clone(), w));
        }
        for sub in subvecs(remaining) {
            for (gi, cs) in opts(budget) {
                let gg = gi + cs.len() as u8 - 1;
                if gg > gleft {
                    continue;
                }
                let piece = Piece { sub: sub.clone(), genus: gi, contacts: cs };
                if let Some(last) = pieces.last() {
                    if &piece > last {
                        continue;
                    }
                }
                let left: Vec<u32> = remaining.iter().zip(&sub).map(|(r, s)| r - s).collect();
                let used: u32 = piece.contacts.iter().sum();
                pieces.push(piece);
                rec(&left, budget - used, gleft - gg, pieces, out);
                pieces.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(rest, budget, g, &mut Vec::new(), &mut out);
    let num: Rat = rest.iter().map(|&c| factorial_u(c)).product();
    out.into_iter().map(|(p, w)| (p, w * &num)).collect()
}

/// Evaluates invariants through a shared [`Store`].
pub struct Engine {
    store: Arc<Store>,
    g0: G0Provider,
    opts: EngineOptions,
    memo: Mutex<HashMap<Sig, Rat>>,
    pieces: Mutex<HashMap<(Vec<u32>, u32, u8), Arc<Vec<(Vec<Piece>, Rat)>>>>,
    derivations: Mutex<HashMap<InvariantKey, Derivation>>,
    pruned: Mutex<HashMap<Vec<u32>, bool>>,
    pruned_terms: AtomicUsize,
    pool: Option<rayon::ThreadPool>,
}

impl Engine {
    pub fn new(store: Arc<Store>) -> Engine {
        Engine::with_options(store, EngineOptions::default())
    }

    pub fn with_options(store: Arc<Store>, opts: EngineOptions) -> Engine {
        let pool = if opts.jobs > 1 {
            rayon::ThreadPoolBuilder::new().num_threads(opts.jobs).build().ok()
        } else {
            None
        };
        Engine {
            store,
            g0: G0Provider::new(),
            opts,
            memo: Mutex::new(HashMap::new()),
            pieces: Mutex::new(HashMap::new()),
            derivations: Mutex::new(HashMap::new()),
            pruned: Mutex::new(HashMap::new()),
            pruned_terms: AtomicUsize::new(0),
            pool,
        }
    }

    pub fn store(&self) -> &Arc<Store> {
        &self.store
    }

    pub fn options(&self) -> &EngineOptions {
        &self.opts
    }

    /// Number of dagger configurations skipped (or, with `check_pruned`,
    /// verified to vanish) because their tropical ray is pruned.
    pub fn pruned_terms(&self) -> usize {
        self.pruned_terms.load(Ordering::Relaxed)
    }

    /// Value of `key`, from the store when present.
    pub fn compute(&self, key: &InvariantKey) -> Result<Rat> {
        let k = normalize_key(key)?;
        match &self.pool {
            Some(pool) => pool.install(|| self.value(&k, true)),
            None => self.value(&k, false),
        }
    }

    /// Recomputes `key` from its children even when it is stored, and
    /// checks the result against the stored value (fixture conflicts are
    /// reported).
    pub fn recompute(&self, key: &InvariantKey) -> Result<Rat> {
        let k = normalize_key(key)?;
        let run = || {
            self.store.verify(&k, || {
                let (v, der) = self.derive(&k, None, self.pool.is_some())?;
                self.record(&k, der);
                Ok(v)
            })
        };
        match &self.pool {
            Some(pool) => pool.install(run),
            None => run(),
        }
    }

    /// Indices (in canonical order of the normalized key) of the interior
    /// markings that may drive the first tangency step, one per marking type.
    pub fn admissible_markings(key: &InvariantKey) -> Result<Vec<usize>> {
        let k = normalize_key(key)?;
        if k.theory != Theory::Relative || !k.is_primary() {
            return Ok(Vec::new());
        }
        let mut seen = Vec::new();
        let mut out = Vec::new();
        for (i, ins) in k.insertions.iter().enumerate() {
            let t = (k.tangency.entries[i], ins.class);
            if t.0 == 0 && t.1 >= 1 && !seen.contains(&t) {
                seen.push(t);
                out.push(i);
            }
        }
        Ok(out)
    }

    /// Evaluates a relative key with the first step driven by marking `idx`
    /// of the normalized key. Deeper steps follow the configured strategy.
    /// The result is not stored.
    pub fn compute_with_marking(&self, key: &InvariantKey, idx: usize) -> Result<Rat> {
        let k = normalize_key(key)?;
        if !Engine::admissible_markings(&k)?.iter().any(|&i| k.insertions[i].class == k.insertions[idx].class && k.tangency.entries[idx] == 0) {
            return Err(Error::Validation(format!("marking {} cannot drive a tangency step", idx + 1)));
        }
        self.derive(&k, Some(idx), false).map(|(v, _)| v)
    }

    /// Alternatives for the genus-one rubber reduction: for every relative
    /// marking without insertion, the coefficient and the absolute key.
    pub fn rubber_reductions(key: &InvariantKey) -> Result<Vec<(usize, Rat, InvariantKey)>> {
        let k = normalize_key(key)?;
        let mut out = Vec::new();
        if k.theory != Theory::Rubber || k.genus != 1 || !k.is_primary() {
            return Ok(out);
        }
        for i in 0..k.n() {
            let a = k.tangency.entries[i];
            if a != 0 && k.insertions[i].class == 0 {
                let rest: Vec<Mk> = (0..k.n()).filter(|&j| j != i).map(|j| (0, k.insertions[j].class)).collect();
                let child = normalize_key(&primary_key(Theory::AbsoluteDivisor, 1, k.m, k.degree, &rest))?;
                out.push((i, Rat::int(a * a), child));
            }
        }
        Ok(out)
    }

    /// The derivation DAG below `key`. Needs `trace` in the options for keys
    /// that are not yet stored; stored keys give an empty trace.
    pub fn trace(&self, key: &InvariantKey) -> Result<RecursionTrace> {
        let root = normalize_key(key)?;
        self.compute(&root)?;
        let mut nodes = BTreeMap::new();
        let mut queue = VecDeque::from([root.clone()]);
        let ders = self.derivations.lock().unwrap().clone();
        while let Some(k) = queue.pop_front() {
            if nodes.contains_key(&k) {
                continue;
            }
            let value = match self.store.get(&k) {
                Some(v) => v,
                None => self.compute(&k)?,
            };
            let derivation = ders.get(&k).cloned();
            if let Some(d) = &derivation {
                queue.extend(d.children().cloned());
            }
            nodes.insert(k, TraceNode { value, derivation });
        }
        Ok(RecursionTrace { root, nodes })
    }

    fn record(&self, k: &InvariantKey, der: Derivation) {
        if self.opts.trace {
            self.derivations.lock().unwrap().insert(k.clone(), der);
        }
    }

    fn value(&self, k: &InvariantKey, parallel: bool) -> Result<Rat> {
        self.store.get_or_compute(k, || {
            let (v, der) = self.derive(k, None, parallel)?;
            self.record(k, der);
            Ok(v)
        })
    }

    fn child(&self, parent: Measure, k: &InvariantKey) -> Result<Rat> {
        if key_measure(k) >= parent {
            return Err(Error::Internal(format!("recursion does not descend at {k}")));
        }
        self.value(k, false)
    }

    fn sig_value(&self, parent: Measure, s: &Sig) -> Result<Rat> {
        if let Some(v) = self.memo.lock().unwrap().get(s) {
            return Ok(v.clone());
        }
        let theory = if s.rubber { Theory::Rubber } else { Theory::Relative };
        if measure(theory, s.m, s.d, n_of(&s.marks)) >= parent {
            return Err(Error::Internal(format!("recursion does not descend at {s:?}")));
        }
        let v = if self.trivially_zero(s) {
            Rat::zero()
        } else {
            self.value(&sig_key(s)?, false)?
        };
        self.memo.lock().unwrap().insert(s.clone(), v.clone());
        Ok(v)
    }

    /// Class bounds and dimension; such keys are not stored.
    fn trivially_zero(&self, s: &Sig) -> bool {
        let list = expand(&s.marks);
        let m = s.m as i64;
        let g = s.genus as i64;
        let d = s.d as i64;
        let n = list.len() as i64;
        let classes: i64 = list.iter().map(|x| x.1 as i64).sum();
        if s.rubber {
            list.iter().any(|x| x.1 as i64 > m - 1) || classes != m * d + (m - 3) * (1 - g) + n - 1
        } else {
            let alpha: i64 = list.iter().map(|x| x.0).sum();
            list.iter().any(|x| x.1 as i64 > m || (x.0 > 0 && x.1 as i64 > m - 1))
                || classes != (m + 1) * d + (m - 3) * (1 - g) + n - alpha
        }
    }

    fn pieces_for(&self, rest: &[u32], budget: u32, g: u8) -> Arc<Vec<(Vec<Piece>, Rat)>> {
        let key = (rest.to_vec(), budget, g);
        if let Some(v) = self.pieces.lock().unwrap().get(&key) {
            return v.clone();
        }
        let v = Arc::new(piece_multisets(rest, budget, g));
        self.pieces.lock().unwrap().insert(key, v.clone());
        v
    }

    /// Value and derivation of a normalized key, computed from children.
    fn derive(&self, k: &InvariantKey, forced: Option<usize>, parallel: bool) -> Result<(Rat, Derivation)> {
        let mu = key_measure(k);
        let tgt = k.target_dim();
        if !k.dimension_matches() || k.insertions.iter().any(|i| i.class > tgt) {
            return Ok((Rat::zero(), Derivation::leaf(Rule::Dimension, Rat::zero())));
        }
        if k.theory == Theory::Relative
            && k.tangency.entries.iter().zip(&k.insertions).any(|(&a, i)| a > 0 && i.class + 1 > k.m)
        {
            return Ok((Rat::zero(), Derivation::leaf(Rule::Dimension, Rat::zero())));
        }
        let classes: Vec<u32> = k.insertions.iter().map(|i| i.class).collect();
        let psi: Vec<u32> = k.insertions.iter().map(|i| i.psi).collect();
        let has_forget = k.insertions.iter().any(|i| !i.forget.is_empty());
        let g0_marks = || -> Vec<G0Marking> {
            k.insertions
                .iter()
                .map(|i| G0Marking { class: i.class, psi: i.psi, forget: i.forget.clone() })
                .collect()
        };
        let need_primary = |what: &str| -> Result<()> {
            if k.is_primary() {
                Ok(())
            } else {
                Err(Error::Unsupported(format!("descendant insertions in {what}: {k}")))
            }
        };
        let d = k.degree;
        let leaf = |rule, v: Rat| Ok((v.clone(), Derivation::leaf(rule, v)));
        let single = |rule, coef: Rat, child: InvariantKey, label: &str| -> Result<(Rat, Derivation)> {
            let v = coef.clone() * self.child(mu, &child)?;
            let term = TraceTerm { rule, label: label.to_string(), coef, factors: vec![child] };
            Ok((v, Derivation::sum(rule, vec![term])))
        };
        let fictitious = |m: u32| -> Result<InvariantKey> {
            let mut marks: Vec<Mk> = classes.iter().map(|&c| (0, c)).collect();
            marks.extend(std::iter::repeat((1, 0)).take(d as usize));
            normalize_key(&primary_key(Theory::Relative, 1, m, d, &marks))
        };
        match (k.theory, k.genus) {
            (Theory::AbsoluteAmbient, 0) => leaf(Rule::Wdvv, self.g0.absolute(k.m, d, &g0_marks())?),
            (Theory::AbsoluteDivisor, 0) => leaf(Rule::Wdvv, self.g0.absolute(k.m - 1, d, &g0_marks())?),
            (Theory::AbsoluteAmbient | Theory::AbsoluteDivisor, _) => {
                let dim = k.target_dim();
                if d == 0 {
                    if has_forget {
                        return Err(Error::Unsupported(format!("collapsed psi classes in genus one: {k}")));
                    }
                    return leaf(Rule::BaseD0, dm::obstruction_d0(dim, &classes, &psi)?);
                }
                if d == 1 {
                    return leaf(Rule::Step2b, Rat::zero());
                }
                need_primary("genus-one absolute invariants")?;
                let rule = if k.theory == Theory::AbsoluteAmbient { Rule::Step1 } else { Rule::Step2a };
                if dim < 2 {
                    return leaf(Rule::Dimension, Rat::zero());
                }
                let coef = Rat::factorial(d as u64).recip()?;
                single(rule, coef, fictitious(dim)?, "fictitious completion")
            }
            (Theory::Relative, g) => {
                if d == 0 {
                    let mut child = k.clone();
                    child.theory = Theory::AbsoluteAmbient;
                    return single(Rule::BaseD0, Rat::one(), normalize_key(&child)?, "degree 0");
                }
                if g == 1 && d == 1 {
                    return leaf(Rule::Step2b, Rat::zero());
                }
                need_primary("relative invariants")?;
                let marks = marks_of(k);
                let kt = match forced {
                    Some(i) => (k.tangency.entries[i], k.insertions[i].class),
                    None => self.pick(&marks)?,
                };
                let mut terms = Vec::new();
                let v = self.specialize(g, k.m, d, &marks, kt, mu, parallel, &mut terms)?;
                Ok((v, Derivation::sum(Rule::Step3, terms)))
            }
            (Theory::Rubber, 0) => {
                if d == 0 {
                    return leaf(Rule::BaseD0, self.g0.absolute(k.m - 1, 0, &g0_marks())?);
                }
                need_primary("genus-zero rubber invariants")?;
                let rest: Vec<Mk> = classes.iter().map(|&c| (0, c)).collect();
                let child = normalize_key(&primary_key(Theory::AbsoluteDivisor, 0, k.m, d, &rest))?;
                single(Rule::Step4b, Rat::one(), child, "rubber to hyperplane")
            }
            (Theory::Rubber, _) => {
                if d == 0 {
                    if has_forget {
                        return Err(Error::Unsupported(format!("collapsed psi classes in genus one: {k}")));
                    }
                    return leaf(
                        Rule::BaseD0,
                        dm::rubber_d0(k.m - 1, &k.tangency.entries, &classes, &psi)?,
                    );
                }
                need_primary("genus-one rubber invariants")?;
                match Engine::rubber_reductions(k)?.into_iter().next() {
                    Some((_, coef, child)) => single(Rule::Step4a, coef, child, "bare relative marking"),
                    None => Err(Error::Unsupported(format!(
                        "genus-one rubber with insertions at every relative marking: {k}"
                    ))),
                }
            }
        }
    }

    /// Whether the tropical ray of a dagger configuration, a degree-zero
    /// genus-one rubber vertex over rational level-0 pieces meeting it with
    /// these slopes, is removed by pruning.
    fn dagger_pruned(&self, contacts: &[u32]) -> Result<bool> {
        let mut key = contacts.to_vec();
        key.sort();
        if let Some(&p) = self.pruned.lock().unwrap().get(&key) {
            return Ok(p);
        }
        let total: u32 = key.iter().sum();
        let mut vertices = vec![TVertex { genus: 1, degree: 0, level: 1, markings: vec![0, 1] }];
        let mut edges = Vec::new();
        for (i, &c) in key.iter().enumerate() {
            vertices.push(TVertex { genus: 0, degree: c, level: 0, markings: Vec::new() });
            edges.push(TEdge { ends: (i + 1, 0), slope: c });
        }
        let ct = CombinatorialType::build(vertices, edges, &[0, total])?;
        let mut pruned = false;
        for (cell, al) in align(&ct.cone(), &ct)? {
            if cell.dim() == 1 && is_well_spaced(&ct, &al) && prune_reason(&ct, &al).is_some() {
                pruned = true;
            }
        }
        self.pruned.lock().unwrap().insert(key, pruned);
        Ok(pruned)
    }

    fn pick(&self, marks: &Marks) -> Result<Mk> {
        let cands: Vec<Mk> = marks.iter().map(|x| x.0).filter(|t| t.0 == 0 && t.1 >= 1).collect();
        let pick = match self.opts.choice {
            MarkingChoice::MaxClass => cands.iter().max_by_key(|t| t.1),
            MarkingChoice::MinClass => cands.iter().min_by_key(|t| t.1),
            MarkingChoice::First => cands.first(),
            MarkingChoice::Last => cands.last(),
        };
        pick.copied().ok_or_else(|| {
            Error::Unsupported("relative invariant without interior insertion of positive codimension".into())
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn specialize(
        &self,
        g: u8,
        m: u32,
        d: u32,
        marks: &Marks,
        kt: Mk,
        mu: Measure,
        parallel: bool,
        terms: &mut Vec<TraceTerm>,
    ) -> Result<Rat> {
        let _ = d;
        let types: Vec<Mk> = marks.iter().map(|x| x.0).collect();
        let cnt: Vec<u32> = marks.iter().map(|&(t, c)| if t == kt { c - 1 } else { c }).collect();
        let mut configs = Vec::new();
        for m0 in subvecs(&cnt) {
            let pos: i64 = types.iter().zip(&m0).map(|(t, &x)| t.0 * x as i64).sum();
            if pos <= 0 {
                continue;
            }
            let w0: Rat = cnt.iter().zip(&m0).map(|(&c, &x)| Rat::binomial(c as i64, x as i64)).product();
            let rest: Vec<u32> = cnt.iter().zip(&m0).map(|(c, x)| c - x).collect();
            for (pieces, wp) in self.pieces_for(&rest, pos as u32, g).iter() {
                configs.push(Config { w0: w0.clone(), m0: m0.clone(), pieces: pieces.clone(), wp: wp.clone() });
            }
        }
        let run = |c: &Config| -> Result<(Rat, Vec<TraceTerm>)> {
            let mut t = Vec::new();
            let v = self.configuration(g, m, &types, kt, c, mu, &mut t)?;
            Ok((v, t))
        };
        let results: Vec<Result<(Rat, Vec<TraceTerm>)>> = if parallel {
            configs.par_iter().map(run).collect()
        } else {
            configs.iter().map(run).collect()
        };
        let mut total = Rat::zero();
        for r in results {
            let (v, t) = r?;
            total += v;
            terms.extend(t);
        }
        Ok(total)
    }

    #[allow(clippy::too_many_arguments)]
    fn configuration(
        &self,
        g: u8,
        m: u32,
        types: &[Mk],
        kt: Mk,
        c: &Config,
        mu: Measure,
        terms: &mut Vec<TraceTerm>,
    ) -> Result<Rat> {
        let pos: i64 = types.iter().zip(&c.m0).map(|(t, &x)| t.0 * x as i64).sum();
        let used: u32 = c.pieces.iter().map(|p| p.contacts.iter().sum::<u32>()).sum();
        let gsum: u8 = c.pieces.iter().map(|p| p.genus + p.contacts.len() as u8 - 1).sum();
        if gsum > g {
            return Ok(Rat::zero());
        }
        let g0v = g - gsum;
        let d0 = (pos - used as i64) as u32;
        let rule = if g == 0 {
            Rule::Rational
        } else if g0v == 1 {
            if d0 == 0 {
                Rule::TypeDagger
            } else {
                Rule::TypeIII
            }
        } else if c.pieces.iter().any(|p| p.genus == 1) {
            Rule::TypeI
        } else {
            Rule::TypeII
        };
        let edges: Vec<u32> = c.pieces.iter().flat_map(|p| p.contacts.iter().copied()).collect();
        let pruned = rule == Rule::TypeDagger && self.dagger_pruned(&edges)?;
        if pruned {
            self.pruned_terms.fetch_add(1, Ordering::Relaxed);
        }
        if pruned && !self.opts.check_pruned {
            return Ok(Rat::zero());
        }
        let slopes: Vec<u64> = edges.iter().map(|&x| x as u64).collect();
        let mut mult = if slopes.is_empty() { Rat::one() } else { Rat::from_big(contribution_factor(&slopes)?, 1.into())? };
        // A loop with equal slopes has an automorphism swapping its edges.
        for p in &c.pieces {
            if p.contacts.len() == 2 && p.contacts[0] == p.contacts[1] {
                mult = mult / Rat::int(2);
            }
        }
        let coef = c.w0.clone() * &c.wp * &mult;
        let m0_list: Vec<Mk> =
            types.iter().zip(&c.m0).flat_map(|(&t, &x)| std::iter::repeat(t).take(x as usize)).collect();
        let label = format!("d0={d0} slopes={edges:?}");
        let mut total = Rat::zero();
        let ne = edges.len();
        let mut js = vec![0u32; ne];
        loop {
            let mut rub: Vec<Mk> = vec![(kt.0, kt.1 - 1)];
            rub.extend(&m0_list);
            rub.extend(edges.iter().zip(&js).map(|(&e, &j)| (-(e as i64), j)));
            let rs = Sig { rubber: true, genus: g0v, m, d: d0, marks: count(&rub) };
            let rv = self.sig_value(mu, &rs)?;
            if !rv.is_zero() || (self.opts.trace && rule == Rule::TypeDagger) {
                let mut prod = rv.clone();
                let mut factors = Vec::new();
                if self.opts.trace {
                    factors.push(sig_key(&rs)?);
                }
                let mut ei = 0;
                if !rv.is_zero() {
                    for p in &c.pieces {
                        let mut pm: Vec<Mk> = types
                            .iter()
                            .zip(&p.sub)
                            .flat_map(|(&t, &x)| std::iter::repeat(t).take(x as usize))
                            .collect();
                        for &cc in &p.contacts {
                            pm.push((cc as i64, m - 1 - js[ei]));
                            ei += 1;
                        }
                        let di = pm.iter().map(|x| x.0).sum::<i64>() as u32;
                        let ps = Sig { rubber: false, genus: p.genus, m, d: di, marks: count(&pm) };
                        let pv = self.sig_value(mu, &ps)?;
                        if self.opts.trace {
                            factors.push(sig_key(&ps)?);
                        }
                        prod *= pv;
                        if prod.is_zero() && !self.opts.trace {
                            break;
                        }
                    }
                }
                total += coef.clone() * &prod;
                if self.opts.trace && !pruned && (!prod.is_zero() || rule == Rule::TypeDagger) {
                    if rv.is_zero() {
                        factors.truncate(1);
                    }
                    terms.push(TraceTerm { rule, label: format!("{label} j={js:?}"), coef: coef.clone(), factors });
                }
            }
            // next diagonal index
            let mut i = 0;
            while i < ne {
                js[i] += 1;
                if js[i] < m {
                    break;
                }
                js[i] = 0;
                i += 1;
            }
            if i == ne {
                break;
            }
        }
        if pruned && !total.is_zero() {
            return Err(Error::Internal(format!("pruned dagger term {label} contributes {total}")));
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eng() -> Engine {
        Engine::new(Arc::new(Store::new()))
    }

    #[test]
    fn plane_relative_genus_zero_matches_absolute() {
        // Full tangency 1 at d points is d! times the absolute count.
        let e = eng();
        for d in 1..=3u32 {
            let mut marks = vec![(0, 2); 3 * d as usize - 1];
            marks.extend(std::iter::repeat((1, 0)).take(d as usize));
            let rel = e.compute(&primary_key(Theory::Relative, 0, 2, d, &marks)).unwrap();
            let abs = e
                .compute(&primary_key(Theory::AbsoluteAmbient, 0, 2, d, &vec![(0, 2); 3 * d as usize - 1]))
                .unwrap();
            assert_eq!(rel, abs * Rat::factorial(d as u64));
        }
    }

    #[test]
    fn piece_weights_count_labelled_distributions() {
        // Two markings of one type into pieces with contact 1, budget 2:
        // {ab}, {a}{b} and {ab}{} (a piece may carry no marking).
        let v = piece_multisets(&[2], 2, 0);
        let total: Rat = v.iter().filter(|(p, _)| p.iter().all(|x| x.contacts == vec![1])).map(|x| x.1.clone()).sum();
        assert_eq!(total, Rat::int(3));
    }

    #[test]
    fn plane_cubics_genus_one() {
        let e = eng();
        let k = primary_key(Theory::AbsoluteAmbient, 1, 2, 3, &vec![(0, 2); 9]);
        assert_eq!(e.compute(&k).unwrap(), Rat::one());
    }
}
