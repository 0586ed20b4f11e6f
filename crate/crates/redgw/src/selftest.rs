//! Built-in consistency checks behind `redgw selftest`.
//!
//! Each check recomputes something with a known answer: closed forms,
//! classical counts, structural identities of the recursion, and every
//! fixture of the store it is handed.

use std::sync::Arc;
use std::time::{Duration, Instant};

use crate::dm::{self, DMKey};
use crate::engine::{Engine, EngineOptions};
use crate::error::{Error, Result};
use crate::key::{primary_key, Theory};
use crate::multiplicities;
use crate::rat::Rat;
use crate::store::Store;
use crate::tropical::{enumerate_boundary_divisors, StrataQuery};

#[derive(Clone, Debug)]
pub struct Check {
    pub name: &'static str,
    pub outcome: std::result::Result<String, String>,
    pub elapsed: Duration,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.outcome.is_ok()
    }

    pub fn line(&self) -> String {
        match &self.outcome {
            Ok(msg) => format!("PASS {:<22} {msg} ({:.2?})", self.name, self.elapsed),
            Err(msg) => format!("FAIL {:<22} {msg} ({:.2?})", self.name, self.elapsed),
        }
    }
}

fn run_check(name: &'static str, f: impl FnOnce() -> Result<String>) -> Check {
    let t = Instant::now();
    let outcome = f().map_err(|e| e.to_string());
    Check { name, outcome, elapsed: t.elapsed() }
}

fn fail(msg: String) -> Error {
    Error::Validation(msg)
}

fn slope_vectors(max_len: usize, max_entry: u64) -> Vec<Vec<u64>> {
    let mut out: Vec<Vec<u64>> = vec![Vec::new()];
    let mut all = Vec::new();
    for _ in 0..max_len {
        out = out
            .into_iter()
            .flat_map(|v| {
                (1..=max_entry).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
        all.extend(out.iter().cloned());
    }
    all
}

fn multiplicities_check() -> Result<String> {
    let vs = slope_vectors(4, 6);
    for m in &vs {
        let data = multiplicities::MultiplicityData::of(m)?;
        if !data.splitting_degree.is_integer()
            || data.splitting_degree.clone() * Rat::from(data.vanishing_order.clone())
                != Rat::from(data.contribution_factor.clone())
        {
            return Err(fail(format!("identity fails at {m:?}")));
        }
    }
    Ok(format!("{} slope vectors", vs.len()))
}

fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    (0..=total)
        .flat_map(|first| {
            compositions(total - first, parts - 1).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

/// String and dilaton equations for every psi/lambda monomial with at most
/// `max_n` markings after adding one, and the genus-0 closed form.
pub fn dm_identities(genus: u8, max_n: usize) -> Result<usize> {
    let mut count = 0;
    let lambdas = if genus == 0 { 0..=0 } else { 0..=1u32 };
    let min_n = if genus == 0 { 3 } else { 1 };
    for n in min_n..max_n {
        let dim = |k: usize| if genus == 0 { k as u32 - 3 } else { k as u32 };
        for lambda in lambdas.clone() {
            // String: psi exponents for n + 1 markings, the last one bare.
            for psi in compositions(dim(n + 1) - lambda, n) {
                let mut with = psi.clone();
                with.push(0);
                let lhs = dm::dm_integral(&DMKey::new(genus, with, lambda))?;
                let mut rhs = Rat::zero();
                for i in (0..n).filter(|&i| psi[i] > 0) {
                    let mut p = psi.clone();
                    p[i] -= 1;
                    rhs += dm::dm_integral(&DMKey::new(genus, p, lambda))?;
                }
                if lhs != rhs {
                    return Err(fail(format!("string equation fails at genus {genus} {psi:?} lambda^{lambda}")));
                }
                count += 1;
            }
            // Dilaton: an extra psi^1 marking multiplies by 2g - 2 + n.
            for psi in compositions(dim(n) - lambda, n) {
                let v = dm::dm_integral(&DMKey::new(genus, psi.clone(), lambda))?;
                if genus == 0 && v != dm::genus0_closed_form(&psi) {
                    return Err(fail(format!("genus 0 closed form fails at {psi:?}")));
                }
                let mut with = psi.clone();
                with.push(1);
                let factor = Rat::int(2 * genus as i64 - 2 + n as i64);
                if dm::dm_integral(&DMKey::new(genus, with, lambda))? != factor * v {
                    return Err(fail(format!("dilaton equation fails at genus {genus} {psi:?} lambda^{lambda}")));
                }
                count += 1;
            }
        }
    }
    Ok(count)
}

fn dm_check(max_n0: usize, max_n1: usize) -> Result<String> {
    let count = dm_identities(0, max_n0)? + dm_identities(1, max_n1)?;
    Ok(format!("{count} identities"))
}

fn engine() -> Engine {
    Engine::new(Arc::new(Store::new()))
}

fn expect(got: Rat, want: i64, what: &str) -> Result<()> {
    if got == Rat::int(want) {
        Ok(())
    } else {
        Err(fail(format!("{what}: got {got}, expected {want}")))
    }
}

fn plane_counts(genus: u8, degrees: &[(u32, i64)]) -> Result<String> {
    let e = engine();
    for &(d, want) in degrees {
        let n = 3 * d as usize - 1 + genus as usize;
        let v = e.compute(&primary_key(Theory::AbsoluteAmbient, genus, 2, d, &vec![(0, 2); n]))?;
        expect(v, want, &format!("genus {genus} plane curves of degree {d}"))?;
    }
    Ok(degrees.iter().map(|x| x.1.to_string()).collect::<Vec<_>>().join(", "))
}

fn vanishing_check() -> Result<String> {
    let e = engine();
    for m in 2..=4u32 {
        // Lines in H = P^{m-1} through the right number of points.
        let dim = m - 1;
        for c in 0..=dim {
            let k = primary_key(Theory::AbsoluteDivisor, 1, m, 1, &[(0, c)]);
            expect(e.compute(&k)?, 0, &format!("degree-1 genus-1 invariant {k}"))?;
        }
    }
    let opts = EngineOptions { check_pruned: true, ..EngineOptions::default() };
    let e = Engine::with_options(Arc::new(Store::new()), opts);
    expect(e.compute(&primary_key(Theory::AbsoluteAmbient, 1, 2, 3, &vec![(0, 2); 9]))?, 1, "plane cubics")?;
    Ok(format!("{} pruned dagger terms vanish", e.pruned_terms()))
}

/// Rubber keys over H = P^2 whose bare relative marking reduces them to
/// genus-one plane curves through `3d` points.
pub fn rubber_reduction_keys(max_d: u32) -> Vec<crate::key::InvariantKey> {
    let mut out = Vec::new();
    for d in 1..=max_d {
        for contacts in [vec![d as i64], vec![d as i64 + 1, -1], vec![d as i64 + 2, -1, -1], vec![1, d as i64 - 1]] {
            // The first contact marking is bare, the others carry points.
            let mut marks: Vec<(i64, u32)> =
                contacts.iter().enumerate().map(|(i, &a)| (a, if i == 0 { 0 } else { 2 })).collect();
            marks.extend(vec![(0i64, 2u32); 3 * d as usize + 1 - contacts.len()]);
            out.push(primary_key(Theory::Rubber, 1, 3, d, &marks));
        }
    }
    out
}

fn rubber_check(max_d: u32) -> Result<String> {
    let e = engine();
    let mut n = 0;
    let mut nonzero = 0;
    for k in rubber_reduction_keys(max_d) {
        let lhs = e.compute(&k)?;
        for (_, coef, child) in Engine::rubber_reductions(&k)? {
            let rhs = coef * e.compute(&child)?;
            if lhs != rhs {
                return Err(fail(format!("{k}: {lhs} vs {rhs}")));
            }
            n += 1;
        }
        nonzero += !lhs.is_zero() as usize;
    }
    Ok(format!("{n} reductions, {nonzero} nonzero"))
}

fn strata_check() -> Result<String> {
    let mut q = StrataQuery::new(1, 2, vec![2], 0);
    let pruned = enumerate_boundary_divisors(&q)?.len();
    q.prune = false;
    let all = enumerate_boundary_divisors(&q)?.len();
    if (pruned, all) != (6, 8) {
        return Err(fail(format!("tangent conics: {pruned} pruned and {all} unpruned rays, expected 6 and 8")));
    }
    Ok("tangent conics: 6 of 8 rays survive pruning".into())
}

fn fixtures_check(store: &Store) -> Result<String> {
    let fixtures = store.fixtures();
    let e = engine();
    for (k, v) in &fixtures {
        let got = e.compute(k)?;
        if &got != v {
            return Err(fail(format!("fixture {k} holds {v}, recomputed {got}")));
        }
    }
    Ok(format!("{} fixtures", fixtures.len()))
}

/// Runs the checks; `quick` keeps the total well under ten seconds.
pub fn run(quick: bool, store: Option<&Store>) -> Vec<Check> {
    let mut out = vec![
        run_check("multiplicities", multiplicities_check),
        run_check("dm-integrals", || if quick { dm_check(6, 3) } else { dm_check(7, 5) }),
        run_check("strata", strata_check),
    ];
    let g0: &[(u32, i64)] = if quick { &[(1, 1), (2, 1), (3, 12)] } else { &[(1, 1), (2, 1), (3, 12), (4, 620)] };
    out.push(run_check("genus-0 plane curves", || plane_counts(0, g0)));
    let g1: &[(u32, i64)] = if quick { &[(3, 1)] } else { &[(3, 1), (4, 225)] };
    out.push(run_check("genus-1 plane curves", || plane_counts(1, g1)));
    out.push(run_check("vanishing", vanishing_check));
    out.push(run_check("rubber reduction", || rubber_check(3)));
    if let Some(s) = store {
        out.push(run_check("fixtures", || fixtures_check(s)));
    }
    out
}
