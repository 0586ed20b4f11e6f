//! Invariant signatures: tangency vectors, insertions and `InvariantKey`.
//!
//! Markings are numbered from 1 in every text format (forget sets included)
//! and from 0 in the API.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Contact orders with the hyperplane, plus the fictitious subset.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TangencyVector {
    pub entries: Vec<i64>,
    pub fictitious: BTreeSet<usize>,
    pub degree: u32,
}

impl TangencyVector {
    pub fn new(entries: Vec<i64>, fictitious: BTreeSet<usize>, degree: u32) -> Result<Self> {
        let tv = TangencyVector { entries, fictitious, degree };
        tv.check()?;
        Ok(tv)
    }

    /// A tangency vector with no fictitious markings.
    pub fn plain(entries: Vec<i64>, degree: u32) -> Result<Self> {
        Self::new(entries, BTreeSet::new(), degree)
    }

    fn check(&self) -> Result<()> {
        for &i in &self.fictitious {
            match self.entries.get(i) {
                None => return Err(Error::Validation(format!("fictitious index {} out of range", i + 1))),
                Some(&1) => {}
                Some(&a) => {
                    return Err(Error::Validation(format!(
                        "fictitious marking {} has tangency {a}, expected 1",
                        i + 1
                    )))
                }
            }
        }
        let t = self.true_tangency();
        if t < 0 || t > self.degree as i64 {
            return Err(Error::Validation(format!("true tangency {t} outside 0..={}", self.degree)));
        }
        Ok(())
    }

    pub fn true_tangency(&self) -> i64 {
        self.entries
            .iter()
            .enumerate()
            .filter(|(i, _)| !self.fictitious.contains(i))
            .map(|(_, a)| a)
            .sum()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// `ev^*H^class * fgt_forget^* psi^psi` at one marking.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Insertion {
    pub mark: usize,
    pub class: u32,
    pub psi: u32,
    pub forget: BTreeSet<usize>,
}

impl Insertion {
    pub fn primary(mark: usize, class: u32) -> Insertion {
        Insertion { mark, class, psi: 0, forget: BTreeSet::new() }
    }

    pub fn is_trivial(&self) -> bool {
        self.class == 0 && self.psi == 0 && self.forget.is_empty()
    }

    pub fn codim(&self) -> i64 {
        self.class as i64 + self.psi as i64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Theory {
    /// Maps to the ambient projective space.
    AbsoluteAmbient,
    /// Maps to the hyperplane H, itself a projective space of dimension m-1.
    AbsoluteDivisor,
    /// Maps to (P^m, H) with contact orders.
    Relative,
    /// Non-rigid maps to the projective bundle P(O_H + O_H(1)) relative to both sections.
    Rubber,
}

impl Theory {
    pub fn name(self) -> &'static str {
        match self {
            Theory::AbsoluteAmbient => "absolute-X",
            Theory::AbsoluteDivisor => "absolute-Y",
            Theory::Relative => "relative",
            Theory::Rubber => "rubber",
        }
    }
}

impl FromStr for Theory {
    type Err = Error;
    fn from_str(s: &str) -> Result<Theory> {
        Ok(match s {
            "absolute-X" | "absolute-X-g0" | "absolute-x" => Theory::AbsoluteAmbient,
            "absolute-Y" | "absolute-y" => Theory::AbsoluteDivisor,
            "relative" => Theory::Relative,
            "rubber" => Theory::Rubber,
            _ => return Err(Error::Parse(format!("unknown theory {s:?}"))),
        })
    }
}

/// One invariant. `insertions[i]` belongs to marking `i`; `tangency.entries[i]`
/// is its contact order (0 for interior markings and for absolute theories).
///
/// For the rubber theory `degree` is the degree of the projection to H and the
/// signed contact orders sum to it: positive entries meet the zero section,
/// negative entries the infinity section.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InvariantKey {
    pub theory: Theory,
    pub genus: u8,
    pub m: u32,
    pub degree: u32,
    pub tangency: TangencyVector,
    pub insertions: Vec<Insertion>,
}

impl InvariantKey {
    pub fn n(&self) -> usize {
        self.insertions.len()
    }

    /// Dimension of the target the markings map to.
    pub fn target_dim(&self) -> u32 {
        match self.theory {
            Theory::AbsoluteAmbient | Theory::Relative => self.m,
            Theory::AbsoluteDivisor | Theory::Rubber => self.m - 1,
        }
    }

    /// Virtual dimension of the moduli space.
    pub fn virtual_dim(&self) -> i64 {
        let m = self.m as i64;
        let d = self.degree as i64;
        let n = self.n() as i64;
        let g = self.genus as i64;
        let alpha: i64 = self.tangency.entries.iter().sum();
        match self.theory {
            Theory::AbsoluteAmbient => (m + 1) * d + (m - 3) * (1 - g) + n,
            Theory::AbsoluteDivisor => m * d + (m - 4) * (1 - g) + n,
            Theory::Relative => (m + 1) * d + (m - 3) * (1 - g) + n - alpha,
            Theory::Rubber => m * d + (m - 3) * (1 - g) + n - 1,
        }
    }

    pub fn insertion_codim(&self) -> i64 {
        self.insertions.iter().map(Insertion::codim).sum()
    }

    pub fn dimension_matches(&self) -> bool {
        self.virtual_dim() == self.insertion_codim()
    }

    pub fn is_primary(&self) -> bool {
        self.insertions.iter().all(|i| i.psi == 0 && i.forget.is_empty())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |s: String| Err(Error::Validation(s));
        if self.genus > 1 {
            return bad(format!("genus {} unsupported", self.genus));
        }
        if self.m < 1 {
            return bad("target dimension must be at least 1".into());
        }
        if matches!(self.theory, Theory::AbsoluteDivisor | Theory::Rubber | Theory::Relative) && self.m < 2 {
            return bad("the hyperplane needs m >= 2".into());
        }
        if self.tangency.degree != self.degree {
            return bad(format!("tangency degree {} != key degree {}", self.tangency.degree, self.degree));
        }
        if self.tangency.len() != self.insertions.len() {
            return bad(format!(
                "{} contact orders for {} insertions",
                self.tangency.len(),
                self.insertions.len()
            ));
        }
        self.tangency.check()?;
        let n = self.n();
        for (i, ins) in self.insertions.iter().enumerate() {
            if ins.mark != i {
                return bad(format!("insertion {} carries mark index {}", i + 1, ins.mark + 1));
            }
            if ins.class > self.m {
                return bad(format!("class H^{} exceeds target dimension {}", ins.class, self.m));
            }
            if ins.forget.contains(&i) {
                return bad(format!("marking {} forgets itself", i + 1));
            }
            if ins.forget.iter().any(|&j| j >= n) {
                return bad(format!("forget set of marking {} out of range", i + 1));
            }
        }
        let sum: i64 = self.tangency.entries.iter().sum();
        match self.theory {
            Theory::AbsoluteAmbient | Theory::AbsoluteDivisor => {
                if self.tangency.entries.iter().any(|&a| a != 0) {
                    return bad("absolute theories take no contact orders".into());
                }
            }
            Theory::Relative => {
                if self.tangency.entries.iter().any(|&a| a < 0) {
                    return bad("relative contact orders must be nonnegative".into());
                }
                if sum > self.degree as i64 {
                    return bad(format!("contact orders sum to {sum} > d = {}", self.degree));
                }
            }
            Theory::Rubber => {
                if sum != self.degree as i64 {
                    return bad(format!("signed contact orders sum to {sum}, expected {}", self.degree));
                }
            }
        }
        Ok(())
    }

    fn marking_sig(&self, i: usize) -> (i64, u32, u32, usize) {
        let ins = &self.insertions[i];
        (self.tangency.entries[i], ins.class, ins.psi, ins.forget.len())
    }

    /// Reorders markings by `perm` (new position `p` holds old marking `perm[p]`).
    fn permuted(&self, perm: &[usize]) -> InvariantKey {
        let mut inv = vec![0; perm.len()];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let entries = perm.iter().map(|&o| self.tangency.entries[o]).collect();
        let fictitious = self.tangency.fictitious.iter().map(|&o| inv[o]).collect();
        let insertions = perm
            .iter()
            .enumerate()
            .map(|(new, &o)| {
                let old = &self.insertions[o];
                Insertion {
                    mark: new,
                    class: old.class,
                    psi: old.psi,
                    forget: old.forget.iter().map(|&j| inv[j]).collect(),
                }
            })
            .collect();
        InvariantKey {
            theory: self.theory,
            genus: self.genus,
            m: self.m,
            degree: self.degree,
            tangency: TangencyVector { entries, fictitious, degree: self.tangency.degree },
            insertions,
        }
    }
}

/// Canonical representative: relative keys are completed with tangency-1
/// fictitious markings up to full tangency, the fictitious set is recomputed
/// as "tangency 1 and no insertion", and markings are sorted by
/// (tangency, class, psi, forget set).
pub fn normalize_key(key: &InvariantKey) -> Result<InvariantKey> {
    key.validate()?;
    let mut k = key.clone();
    if k.theory == Theory::Relative {
        let sum: i64 = k.tangency.entries.iter().sum();
        for _ in sum..k.degree as i64 {
            let i = k.insertions.len();
            k.tangency.entries.push(1);
            k.insertions.push(Insertion::primary(i, 0));
        }
    }
    let n = k.n();
    // Colour refinement on (own signature, signatures of forget-set members,
    // signatures of markings forgetting us) before breaking remaining ties.
    let mut colour: Vec<u64> = {
        let sigs: Vec<_> = (0..n).map(|i| k.marking_sig(i)).collect();
        rank(&sigs)
    };
    loop {
        let sigs: Vec<(u64, Vec<u64>, Vec<u64>)> = (0..n)
            .map(|i| {
                let mut fwd: Vec<u64> = k.insertions[i].forget.iter().map(|&j| colour[j]).collect();
                let mut back: Vec<u64> =
                    (0..n).filter(|&j| k.insertions[j].forget.contains(&i)).map(|j| colour[j]).collect();
                fwd.sort();
                back.sort();
                (colour[i], fwd, back)
            })
            .collect();
        let next = rank(&sigs);
        let classes = |c: &[u64]| c.iter().collect::<BTreeSet<_>>().len();
        if classes(&next) == classes(&colour) {
            colour = next;
            break;
        }
        colour = next;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (colour[i], i));
    let mut best = k.permuted(&order);
    // Ties that touch forget sets are broken by trying the permutations inside
    // each tied group and keeping the smallest encoding.
    let involved: Vec<bool> = (0..n)
        .map(|i| !k.insertions[i].forget.is_empty() || k.insertions.iter().any(|x| x.forget.contains(&i)))
        .collect();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        match groups.last_mut() {
            Some(g) if colour[g[0]] == colour[i] => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    let ambiguous: Vec<usize> =
        (0..groups.len()).filter(|&g| groups[g].len() > 1 && groups[g].iter().any(|&i| involved[i])).collect();
    let budget: usize = ambiguous.iter().map(|&g| (1..=groups[g].len()).product::<usize>()).product();
    if !ambiguous.is_empty() && budget <= 40_320 {
        let mut best_text = best.to_string();
        let mut current = groups.clone();
        search_ties(&k, &mut current, &ambiguous, 0, &mut best, &mut best_text);
    }
    let fict: BTreeSet<usize> = (0..n)
        .filter(|&i| {
            best.theory == Theory::Relative
                && best.tangency.entries[i] == 1
                && best.insertions[i].is_trivial()
                && !best.insertions.iter().any(|x| x.forget.contains(&i))
        })
        .collect();
    best.tangency.fictitious = fict;
    Ok(best)
}

fn search_ties(
    k: &InvariantKey,
    groups: &mut Vec<Vec<usize>>,
    ambiguous: &[usize],
    at: usize,
    best: &mut InvariantKey,
    best_text: &mut String,
) {
    if at == ambiguous.len() {
        let order: Vec<usize> = groups.iter().flatten().copied().collect();
        let cand = k.permuted(&order);
        let text = cand.to_string();
        if text < *best_text {
            *best_text = text;
            *best = cand;
        }
        return;
    }
    let g = ambiguous[at];
    let len = groups[g].len();
    let mut c = vec![0usize; len];
    search_ties(k, groups, ambiguous, at + 1, best, best_text);
    // Heap's algorithm over the group.
    let mut i = 0;
    while i < len {
        if c[i] < i {
            if i % 2 == 0 {
                groups[g].swap(0, i);
            } else {
                groups[g].swap(c[i], i);
            }
            search_ties(k, groups, ambiguous, at + 1, best, best_text);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

fn rank<T: Ord + Clone>(sigs: &[T]) -> Vec<u64> {
    let sorted: BTreeSet<T> = sigs.iter().cloned().collect();
    let sorted: Vec<T> = sorted.into_iter().collect();
    sigs.iter().map(|s| sorted.binary_search(s).unwrap() as u64).collect()
}

/// Renders one insertion in the `H^a*psi^k!{i,j}` grammar (1-based forget set).
pub fn format_insertion(ins: &Insertion) -> String {
    let mut parts = Vec::new();
    match ins.class {
        0 => {}
        1 => parts.push("H".to_string()),
        a => parts.push(format!("H^{a}")),
    }
    match ins.psi {
        0 => {}
        1 => parts.push("psi".to_string()),
        k => parts.push(format!("psi^{k}")),
    }
    let mut s = if parts.is_empty() { "1".to_string() } else { parts.join("*") };
    if !ins.forget.is_empty() {
        let idx: Vec<String> = ins.forget.iter().map(|j| (j + 1).to_string()).collect();
        s.push_str(&format!("!{{{}}}", idx.join(",")));
    }
    s
}

/// One parsed insertion item; `repeat` comes from an optional `xN` suffix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InsertionSpec {
    pub class: u32,
    pub psi: u32,
    pub forget: BTreeSet<usize>,
    pub repeat: usize,
}

/// Parses a comma list of `H^a*psi^k!{i,j}` items. `1` is the trivial
/// insertion, `xN` after an item repeats it, forget sets are 1-based.
pub fn parse_insertions(spec: &str) -> Result<Vec<InsertionSpec>> {
    let mut items = Vec::new();
    let mut depth = 0;
    let mut cur = String::new();
    for ch in spec.chars() {
        match ch {
            '{' => {
                depth += 1;
                cur.push(ch)
            }
            '}' => {
                if depth == 0 {
                    return Err(Error::Parse(format!("unbalanced '}}' in {spec:?}")));
                }
                depth -= 1;
                cur.push(ch)
            }
            ',' if depth == 0 => items.push(std::mem::take(&mut cur)),
            c if c.is_whitespace() => {}
            c => cur.push(c),
        }
    }
    if depth != 0 {
        return Err(Error::Parse(format!("unbalanced '{{' in {spec:?}")));
    }
    if !cur.is_empty() || !items.is_empty() {
        items.push(cur);
    }
    items.iter().map(|s| parse_item(s)).collect()
}

fn parse_item(item: &str) -> Result<InsertionSpec> {
    let bad = |why: &str| Error::Parse(format!("insertion {item:?}: {why}"));
    if item.is_empty() {
        return Err(bad("empty item"));
    }
    let (item_body, repeat) = match item.rfind('x') {
        Some(p) => {
            let n: usize = item[p + 1..].parse().map_err(|_| bad("repeat suffix must be xN"))?;
            if n == 0 {
                return Err(bad("repeat count 0"));
            }
            (&item[..p], n)
        }
        None => (item, 1),
    };
    let (body, forget) = match item_body.split_once('!') {
        Some((b, f)) => {
            let inner = f
                .strip_prefix('{')
                .and_then(|f| f.strip_suffix('}'))
                .ok_or_else(|| bad("forget set must look like !{i,j}"))?;
            let mut set = BTreeSet::new();
            for t in inner.split(',').filter(|t| !t.is_empty()) {
                let i: usize = t.parse().map_err(|_| bad("forget index is not a number"))?;
                if i == 0 {
                    return Err(bad("forget indices start at 1"));
                }
                set.insert(i - 1);
            }
            (b, set)
        }
        None => (item_body, BTreeSet::new()),
    };
    let mut class = 0;
    let mut psi = 0;
    for factor in body.split('*') {
        let (base, exp) = match factor.split_once('^') {
            Some((b, e)) => (b, e.parse::<u32>().map_err(|_| bad("exponent is not a number"))?),
            None => (factor, 1),
        };
        match base {
            "H" => class += exp,
            "psi" => psi += exp,
            "1" if exp == 1 => {}
            _ => return Err(bad("factors are H, psi or 1")),
        }
    }
    Ok(InsertionSpec { class, psi, forget, repeat })
}

/// Parses a comma list of integers such as a tangency vector.
pub fn parse_int_list(s: &str) -> Result<Vec<i64>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|_| Error::Parse(format!("not an integer: {t:?} in {s:?}"))))
        .collect()
}

impl fmt::Display for InvariantKey {
    /// `theory=relative genus=1 m=2 d=3 marks=[0|H^2][1|1|F]`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "theory={} genus={} m={} d={} marks=",
            self.theory.name(),
            self.genus,
            self.m,
            self.degree
        )?;
        for (i, ins) in self.insertions.iter().enumerate() {
            write!(f, "[{}|{}", self.tangency.entries[i], format_insertion(ins))?;
            if self.tangency.fictitious.contains(&i) {
                write!(f, "|F")?;
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

impl FromStr for InvariantKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<InvariantKey> {
        let bad = |why: &str| Error::Parse(format!("key {s:?}: {why}"));
        let mut theory = None;
        let mut genus = None;
        let mut m = None;
        let mut d = None;
        let mut marks = None;
        for field in s.split_whitespace() {
            let (k, v) = field.split_once('=').ok_or_else(|| bad("expected field=value"))?;
            match k {
                "theory" => theory = Some(v.parse::<Theory>()?),
                "genus" => genus = Some(v.parse::<u8>().map_err(|_| bad("genus"))?),
                "m" => m = Some(v.parse::<u32>().map_err(|_| bad("m"))?),
                "d" => d = Some(v.parse::<u32>().map_err(|_| bad("d"))?),
                "marks" => marks = Some(v),
                _ => return Err(bad("unknown field")),
            }
        }
        let (theory, genus, m, degree) = match (theory, genus, m, d) {
            (Some(t), Some(g), Some(m), Some(d)) => (t, g, m, d),
            _ => return Err(bad("missing field")),
        };
        let marks = marks.ok_or_else(|| bad("missing marks"))?;
        let mut entries = Vec::new();
        let mut fictitious = BTreeSet::new();
        let mut insertions = Vec::new();
        let mut rest = marks;
        while !rest.is_empty() {
            let body = rest.strip_prefix('[').ok_or_else(|| bad("marks must be [..] groups"))?;
            let close = body.find(']').ok_or_else(|| bad("unclosed ["))?;
            let group = &body[..close];
            rest = &body[close + 1..];
            let mut parts = group.split('|');
            let alpha: i64 = parts
                .next()
                .and_then(|a| a.parse().ok())
                .ok_or_else(|| bad("contact order"))?;
            let ins = parts.next().ok_or_else(|| bad("missing insertion"))?;
            let mut spec = parse_insertions(ins)?;
            if spec.len() != 1 || spec[0].repeat != 1 {
                return Err(bad("one insertion per marking"));
            }
            let spec = spec.pop().unwrap();
            match parts.next() {
                None => {}
                Some("F") => {
                    fictitious.insert(entries.len());
                }
                Some(_) => return Err(bad("unknown marking flag")),
            }
            insertions.push(Insertion {
                mark: entries.len(),
                class: spec.class,
                psi: spec.psi,
                forget: spec.forget,
            });
            entries.push(alpha);
        }
        Ok(InvariantKey {
            theory,
            genus,
            m,
            degree,
            tangency: TangencyVector { entries, fictitious, degree },
            insertions,
        })
    }
}

/// Convenience constructor for primary keys: `(contact order, class)` per marking.
pub fn primary_key(theory: Theory, genus: u8, m: u32, degree: u32, marks: &[(i64, u32)]) -> InvariantKey {
    InvariantKey {
        theory,
        genus,
        m,
        degree,
        tangency: TangencyVector {
            entries: marks.iter().map(|x| x.0).collect(),
            fictitious: BTreeSet::new(),
            degree,
        },
        insertions: marks.iter().enumerate().map(|(i, x)| Insertion::primary(i, x.1)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn true_tangency_examples() {
        let tv = TangencyVector::new(vec![2, 1, 1], [1, 2].into(), 4).unwrap();
        assert_eq!(tv.true_tangency(), 2);
        assert_eq!(TangencyVector::plain(vec![5], 5).unwrap().true_tangency(), 5);
        let tv = TangencyVector::new(vec![1, 1], [0, 1].into(), 2).unwrap();
        assert_eq!(tv.true_tangency(), 0);
    }

    #[test]
    fn fictitious_must_have_tangency_one() {
        assert!(TangencyVector::new(vec![2], [0].into(), 2).is_err());
    }

    #[test]
    fn permutation_collides() {
        let a = primary_key(Theory::Relative, 0, 2, 3, &[(1, 1), (2, 0), (0, 2)]);
        let b = primary_key(Theory::Relative, 0, 2, 3, &[(0, 2), (1, 1), (2, 0)]);
        assert_eq!(normalize_key(&a).unwrap(), normalize_key(&b).unwrap());
    }

    #[test]
    fn degree_mismatch_is_rejected() {
        let k = primary_key(Theory::Relative, 0, 2, 2, &[(3, 0)]);
        assert!(matches!(normalize_key(&k), Err(Error::Validation(_))));
    }

    #[test]
    fn relative_keys_get_fictitious_completion() {
        let k = primary_key(Theory::Relative, 1, 2, 3, &[(0, 2)]);
        let n = normalize_key(&k).unwrap();
        assert_eq!(n.n(), 4);
        assert_eq!(n.tangency.true_tangency(), 0);
        assert_eq!(n.tangency.fictitious.len(), 3);
    }

    #[test]
    fn text_round_trip() {
        let mut k = primary_key(Theory::AbsoluteAmbient, 0, 3, 2, &[(0, 2), (0, 1), (0, 0)]);
        k.insertions[0].psi = 2;
        k.insertions[0].forget = [2].into();
        let k = normalize_key(&k).unwrap();
        let text = k.to_string();
        assert_eq!(text.parse::<InvariantKey>().unwrap(), k, "{text}");
    }

    #[test]
    fn insertion_grammar() {
        let v = parse_insertions("H^2*psi^3!{1,4}, H, 1, psi, H^2x3").unwrap();
        assert_eq!(v.len(), 5);
        assert_eq!((v[0].class, v[0].psi), (2, 3));
        assert_eq!(v[0].forget, [0, 3].into());
        assert_eq!((v[1].class, v[1].psi), (1, 0));
        assert_eq!((v[2].class, v[2].psi), (0, 0));
        assert_eq!((v[3].class, v[3].psi), (0, 1));
        assert_eq!((v[4].class, v[4].repeat), (2, 3));
        assert!(parse_insertions("H^x").is_err());
        assert!(parse_insertions("Q").is_err());
        assert!(parse_insertions("psi!{0}").is_err());
        assert_eq!(parse_insertions("").unwrap(), vec![]);
    }

    #[test]
    fn dimensions() {
        // Lines through two points of P^2.
        let k = primary_key(Theory::AbsoluteAmbient, 0, 2, 1, &[(0, 2), (0, 2)]);
        assert!(k.dimension_matches());
        // Plane cubics through nine points in genus one.
        let k = primary_key(Theory::AbsoluteAmbient, 1, 2, 3, &[(0, 2); 9]);
        assert!(k.dimension_matches());
    }
}
