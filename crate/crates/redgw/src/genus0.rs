//! Genus-zero Gromov-Witten invariants of projective spaces.
//!
//! Primary invariants come from WDVV on `P^N`; descendants are reduced to
//! primaries by the genus-zero topological recursion relation and, for one or
//! two markings, by running the divisor equation backwards. Collapsed psi
//! classes `fgt_S^* psi_i` are expanded into ordinary psi classes minus
//! degree-0 bubble loci.

use std::collections::{BTreeSet, HashMap};
use std::sync::Mutex;

use crate::dm::genus0_closed_form;
use crate::error::{Error, Result};
use crate::rat::Rat;

/// One marking of a genus-zero absolute invariant.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct G0Marking {
    pub class: u32,
    pub psi: u32,
    pub forget: BTreeSet<usize>,
}

impl G0Marking {
    pub fn primary(class: u32) -> G0Marking {
        G0Marking { class, psi: 0, forget: BTreeSet::new() }
    }
}

/// Memoized genus-zero theory of `P^N` for all `N`.
#[derive(Default)]
pub struct G0Provider {
    primary: Mutex<HashMap<(u32, u32, Vec<u32>), Rat>>,
    descendant: Mutex<HashMap<(u32, u32, Vec<(u32, u32)>), Rat>>,
}

impl G0Provider {
    pub fn new() -> G0Provider {
        G0Provider::default()
    }

    /// `<H^{c_1} ... H^{c_n}>_{0,d}` on `P^N`.
    pub fn primary(&self, n_dim: u32, d: u32, classes: &[u32]) -> Rat {
        let mut cls = classes.to_vec();
        cls.sort_unstable();
        self.prim(n_dim, d, cls)
    }

    fn prim(&self, nd: u32, d: u32, cls: Vec<u32>) -> Rat {
        let n = cls.len() as i64;
        if cls.iter().any(|&a| a > nd) {
            return Rat::zero();
        }
        let total: i64 = cls.iter().map(|&a| a as i64).sum();
        if (nd as i64 + 1) * d as i64 + nd as i64 - 3 + n != total {
            return Rat::zero();
        }
        if d == 0 {
            return if n == 3 { Rat::one() } else { Rat::zero() };
        }
        if cls.contains(&0) {
            return Rat::zero();
        }
        if nd == 1 {
            // On P^1 every class here is a point, so dimension forces d = 1.
            return if d == 1 { Rat::one() } else { Rat::zero() };
        }
        if n <= 2 {
            return if d == 1 && n == 2 && cls == [nd, nd] { Rat::one() } else { Rat::zero() };
        }
        let key = (nd, d, cls.clone());
        if let Some(v) = self.primary.lock().unwrap().get(&key) {
            return v.clone();
        }
        let v = self.prim_reduce(nd, d, &cls);
        self.primary.lock().unwrap().insert(key, v.clone());
        v
    }

    fn prim_reduce(&self, nd: u32, d: u32, cls: &[u32]) -> Rat {
        // Divisor equation removes hyperplane insertions.
        if let Some(i) = cls.iter().position(|&a| a == 1) {
            let mut rest = cls.to_vec();
            rest.remove(i);
            return Rat::int(d as i64) * self.prim(nd, d, rest);
        }
        // WDVV with T1 = H, T2 = a marking of class a = 1 + (a-1): write
        // H^a = H * H^{a-1} and move the H across the four-point relation.
        let n = cls.len();
        let i1 = (0..n).min_by_key(|&i| (cls[i], i)).unwrap();
        let others: Vec<usize> = (0..n).filter(|&i| i != i1).collect();
        let i2 = *others.iter().max_by_key(|&&i| (cls[i], i)).unwrap();
        let i3 = *others.iter().find(|&&i| i != i2).unwrap();
        let a = cls[i1];
        let t3 = cls[i2];
        let t4 = cls[i3];
        let s: Vec<u32> = (0..n).filter(|&i| i != i1 && i != i2 && i != i3).map(|i| cls[i]).collect();
        self.pairs(nd, d, &s, [1, t3, a - 1, t4], false) - self.pairs(nd, d, &s, [1, a - 1, t3, t4], true)
    }

    /// `sum_{d1+d2=d, S1+S2=S, j} <T1 T2 S1 H^j>_{d1} <H^{N-j} T3 T4 S2>_{d2}`.
    fn pairs(&self, nd: u32, d: u32, s: &[u32], t: [u32; 4], skip_unstable: bool) -> Rat {
        let mut tot = Rat::zero();
        for d1 in 0..=d {
            let d2 = d - d1;
            for mask in 0u32..(1 << s.len()) {
                let s1: Vec<u32> = (0..s.len()).filter(|&i| mask >> i & 1 == 1).map(|i| s[i]).collect();
                let s2: Vec<u32> = (0..s.len()).filter(|&i| mask >> i & 1 == 0).map(|i| s[i]).collect();
                if skip_unstable && d1 == 0 && s1.is_empty() {
                    continue;
                }
                for j in 0..=nd {
                    let mut l = vec![t[0], t[1], j];
                    l.extend(&s1);
                    l.sort_unstable();
                    let x = self.prim(nd, d1, l);
                    if x.is_zero() {
                        continue;
                    }
                    let mut r = vec![nd - j, t[2], t[3]];
                    r.extend(&s2);
                    r.sort_unstable();
                    let y = self.prim(nd, d2, r);
                    tot += x * y;
                }
            }
        }
        tot
    }

    /// `<tau_{k_1}(H^{c_1}) ...>_{0,d}` on `P^N` with ordinary psi classes.
    pub fn descendant(&self, nd: u32, d: u32, marks: &[(u32, u32)]) -> Rat {
        let mut m = marks.to_vec();
        m.sort_unstable();
        self.desc(nd, d, m)
    }

    fn desc(&self, nd: u32, d: u32, marks: Vec<(u32, u32)>) -> Rat {
        let n = marks.len() as i64;
        if marks.iter().any(|&(a, _)| a > nd) {
            return Rat::zero();
        }
        let total: i64 = marks.iter().map(|&(a, k)| a as i64 + k as i64).sum();
        if (nd as i64 + 1) * d as i64 + nd as i64 - 3 + n != total {
            return Rat::zero();
        }
        if marks.iter().all(|&(_, k)| k == 0) {
            return self.prim(nd, d, marks.iter().map(|&(a, _)| a).collect());
        }
        if d == 0 {
            let c: u32 = marks.iter().map(|&(a, _)| a).sum();
            if n < 3 || c != nd {
                return Rat::zero();
            }
            let psi: Vec<u32> = marks.iter().map(|&(_, k)| k).collect();
            return genus0_closed_form(&psi);
        }
        let key = (nd, d, marks.clone());
        if let Some(v) = self.descendant.lock().unwrap().get(&key) {
            return v.clone();
        }
        let v = if n <= 2 { self.desc_divisor_up(nd, d, &marks) } else { self.desc_trr(nd, d, &marks) };
        self.descendant.lock().unwrap().insert(key, v.clone());
        v
    }

    /// Divisor equation read backwards: adds an `H` marking.
    fn desc_divisor_up(&self, nd: u32, d: u32, marks: &[(u32, u32)]) -> Rat {
        let mut with_h = marks.to_vec();
        with_h.push((1, 0));
        let mut v = self.desc(nd, d, sorted(with_h));
        for i in 0..marks.len() {
            let (a, k) = marks[i];
            if k == 0 {
                continue;
            }
            let mut m = marks.to_vec();
            m[i] = (a + 1, k - 1);
            v -= self.desc(nd, d, sorted(m));
        }
        v / Rat::int(d as i64)
    }

    /// `psi_1 = D(1 | 2,3)` on the space of stable maps.
    fn desc_trr(&self, nd: u32, d: u32, marks: &[(u32, u32)]) -> Rat {
        let i1 = (0..marks.len()).rev().find(|&i| marks[i].1 > 0).unwrap();
        let rest: Vec<usize> = (0..marks.len()).filter(|&i| i != i1).collect();
        let (i2, i3) = (rest[0], rest[1]);
        let s: Vec<(u32, u32)> = rest[2..].iter().map(|&i| marks[i]).collect();
        let (a1, k1) = marks[i1];
        let mut tot = Rat::zero();
        for d1 in 0..=d {
            let d2 = d - d1;
            for mask in 0u32..(1 << s.len()) {
                let mut left = vec![(a1, k1 - 1)];
                let mut right = vec![marks[i2], marks[i3]];
                for (i, &x) in s.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        left.push(x)
                    } else {
                        right.push(x)
                    }
                }
                if d1 == 0 && left.len() < 2 {
                    continue;
                }
                for j in 0..=nd {
                    let mut l = left.clone();
                    l.push((j, 0));
                    let x = self.desc(nd, d1, sorted(l));
                    if x.is_zero() {
                        continue;
                    }
                    let mut r = right.clone();
                    r.push((nd - j, 0));
                    tot += x * self.desc(nd, d2, sorted(r));
                }
            }
        }
        tot
    }

    /// General genus-zero absolute invariant of `P^N`, collapsed psi classes
    /// included. Supported collapsed classes: `fgt_S^* psi_i` with exponent 1,
    /// pairwise disjoint forget sets whose members carry no forget sets and
    /// are not themselves forgotten-from markings.
    pub fn absolute(&self, nd: u32, d: u32, marks: &[G0Marking]) -> Result<Rat> {
        let n = marks.len();
        let Some(i) = marks.iter().position(|x| !x.forget.is_empty()) else {
            let simple: Vec<(u32, u32)> = marks.iter().map(|x| (x.class, x.psi)).collect();
            return Ok(self.descendant(nd, d, &simple));
        };
        let total: i64 = marks.iter().map(|x| x.class as i64 + x.psi as i64).sum();
        if (nd as i64 + 1) * d as i64 + nd as i64 - 3 + n as i64 != total {
            return Ok(Rat::zero());
        }
        let s = &marks[i].forget;
        if marks[i].psi != 1 {
            return Err(Error::Unsupported(format!("collapsed psi^{} with a forget set", marks[i].psi)));
        }
        let mut seen = BTreeSet::new();
        for (j, x) in marks.iter().enumerate() {
            if x.forget.iter().any(|f| !seen.insert(*f)) {
                return Err(Error::Unsupported("overlapping forget sets".into()));
            }
            if !x.forget.is_empty() && marks.iter().any(|y| y.forget.contains(&j)) {
                return Err(Error::Unsupported("nested forget sets".into()));
            }
        }
        if d == 0 && n - s.len() < 3 {
            return Err(Error::Unsupported("forgetting leaves an unstable degree-0 curve".into()));
        }
        // fgt_S^* psi_i = psi_i - sum_{T subset S nonempty} D_{i u T}.
        let mut plain = marks.to_vec();
        plain[i].forget.clear();
        let mut v = self.absolute(nd, d, &plain)?;
        let members: Vec<usize> = s.iter().copied().collect();
        for mask in 1u32..(1 << members.len()) {
            let t: Vec<usize> = (0..members.len()).filter(|&b| mask >> b & 1 == 1).map(|b| members[b]).collect();
            let on_bubble: BTreeSet<usize> = t.iter().copied().chain([i]).collect();
            let main: Vec<usize> = (0..n).filter(|j| !on_bubble.contains(j)).collect();
            if d == 0 && main.len() + 1 < 3 {
                continue;
            }
            // Bubble: marking i (class only, its psi consumed by the divisor), T, node.
            let bubble_psi: Vec<u32> = t.iter().map(|&j| marks[j].psi).chain([0, 0]).collect();
            let bubble_int = genus0_closed_form(&bubble_psi);
            if bubble_int.is_zero() {
                continue;
            }
            let c: u32 = marks[i].class + t.iter().map(|&j| marks[j].class).sum::<u32>();
            if c > nd {
                continue;
            }
            let reindex: HashMap<usize, usize> = main.iter().enumerate().map(|(new, &old)| (old, new)).collect();
            let mut rest: Vec<G0Marking> = main
                .iter()
                .map(|&j| G0Marking {
                    class: marks[j].class,
                    psi: marks[j].psi,
                    forget: marks[j].forget.iter().map(|f| reindex[f]).collect(),
                })
                .collect();
            // Diagonal: the bubble takes H^{N-c}, the main side the dual H^c.
            rest.push(G0Marking::primary(c));
            v -= bubble_int * self.absolute(nd, d, &rest)?;
        }
        Ok(v)
    }
}

fn sorted(mut v: Vec<(u32, u32)>) -> Vec<(u32, u32)> {
    v.sort_unstable();
    v
}
