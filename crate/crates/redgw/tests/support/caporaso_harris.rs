//! Irreducible plane curves of geometric genus 0 or 1 with prescribed
//! contact with a line, by specializing one point to the line.
//!
//! `alpha[k]` counts fixed contact points of order k + 1 and `beta[k]`
//! moving ones; the count is of curves, with moving contacts unlabelled.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

type V = Vec<u32>;

fn weight(v: &[u32]) -> u32 {
    v.iter().enumerate().map(|(k, &x)| (k as u32 + 1) * x).sum()
}

fn card(v: &[u32]) -> u32 {
    v.iter().sum()
}

fn fact(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, i| a * i)
}

fn choose(n: u32, k: u32) -> BigInt {
    fact(n) / (fact(k) * fact(n - k))
}

fn points(d: u32, g: u32, beta: &[u32]) -> i64 {
    2 * d as i64 + g as i64 - 1 + card(beta) as i64
}

#[derive(Clone)]
struct Comp {
    d: u32,
    g: u32,
    alpha: V,
    beta: V,
}

/// All vectors `w` with `w[k] <= v[k]`.
fn below(v: &[u32]) -> Vec<V> {
    let mut out = vec![Vec::new()];
    for &x in v {
        out = out
            .into_iter()
            .flat_map(|w: V| {
                (0..=x).map(move |y| {
                    let mut w = w.clone();
                    w.push(y);
                    w
                })
            })
            .collect();
    }
    out
}

#[derive(Default)]
pub struct Oracle {
    memo: HashMap<(u32, u32, V, V), BigRational>,
}

impl Oracle {
    pub fn new() -> Oracle {
        Oracle::default()
    }

    pub fn count(&mut self, d: u32, g: u32, alpha: &[u32], beta: &[u32]) -> BigRational {
        let key = (d, g, alpha.to_vec(), beta.to_vec());
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let v = self.eval(d, g, alpha, beta);
        self.memo.insert(key, v.clone());
        v
    }

    fn eval(&mut self, d: u32, g: u32, alpha: &[u32], beta: &[u32]) -> BigRational {
        let zero = BigRational::zero();
        if d == 0 || (d >= 2 && g > (d - 1) * (d - 2) / 2) || (d < 3 && g > 0) {
            return zero;
        }
        if weight(alpha) + weight(beta) != d {
            return zero;
        }
        let n = points(d, g, beta);
        if n < 1 {
            return zero;
        }
        // The point lands on a moving contact, which becomes fixed...
        let mut total = zero;
        for k in 0..beta.len() {
            if beta[k] > 0 {
                let (mut a, mut b) = (alpha.to_vec(), beta.to_vec());
                a[k] += 1;
                b[k] -= 1;
                total += self.count(d, g, &a, &b) * BigInt::from(k as u32 + 1);
            }
        }
        // ...or the curve breaks off the line.
        total + self.split(d - 1, g, alpha, beta, n as u32 - 1)
    }

    fn components(max_d: u32, len: usize) -> Vec<Comp> {
        let mut out = Vec::new();
        for d in 1..=max_d {
            let max_g = if d >= 3 { (d - 1) * (d - 2) / 2 } else { 0 };
            let bound: V = (0..len).map(|k| d / (k as u32 + 1)).collect();
            for g in 0..=max_g {
                for a in below(&bound) {
                    if weight(&a) > d {
                        continue;
                    }
                    for b in below(&bound) {
                        if weight(&a) + weight(&b) == d {
                            out.push(Comp { d, g, alpha: a.clone(), beta: b });
                        }
                    }
                }
            }
        }
        out
    }

    /// Ordered tuples of components of total degree `rest_d`, divided by l!.
    fn split(&mut self, rest_d: u32, g: u32, alpha: &[u32], beta: &[u32], npts: u32) -> BigRational {
        let all = if rest_d > 0 { Self::components(rest_d, alpha.len()) } else { Vec::new() };
        let mut sum = BigRational::zero();
        let mut chosen = Vec::new();
        self.tuples(&all, rest_d, &mut chosen, g, alpha, beta, npts, &mut sum);
        sum
    }

    #[allow(clippy::too_many_arguments)]
    fn tuples(
        &mut self,
        all: &[Comp],
        left: u32,
        chosen: &mut Vec<Comp>,
        g: u32,
        alpha: &[u32],
        beta: &[u32],
        npts: u32,
        sum: &mut BigRational,
    ) {
        if left == 0 {
            *sum += self.tuple_value(chosen, g, alpha, beta, npts);
            return;
        }
        for c in all {
            if c.d <= left {
                chosen.push(c.clone());
                self.tuples(all, left - c.d, chosen, g, alpha, beta, npts, sum);
                chosen.pop();
            }
        }
    }

    fn tuple_value(&mut self, chosen: &[Comp], g: u32, alpha: &[u32], beta: &[u32], npts: u32) -> BigRational {
        let zero = BigRational::zero();
        let len = alpha.len();
        let used: V = (0..len).map(|k| chosen.iter().map(|c| c.alpha[k]).sum()).collect();
        if (0..len).any(|k| used[k] > alpha[k]) {
            return zero;
        }
        let pts: Vec<i64> = chosen.iter().map(|c| points(c.d, c.g, &c.beta)).collect();
        if pts.iter().sum::<i64>() != npts as i64 || pts.iter().any(|&p| p < 0) {
            return zero;
        }
        // Which fixed contacts and which of the points go to which component.
        let mut coef = BigRational::one();
        for k in 0..len {
            coef *= BigRational::new(fact(alpha[k]), fact(alpha[k] - used[k]));
            for c in chosen {
                coef /= BigRational::from_integer(fact(c.alpha[k]));
            }
        }
        coef *= BigRational::from_integer(fact(npts));
        for &p in &pts {
            coef /= BigRational::from_integer(fact(p as u32));
        }
        coef /= BigRational::from_integer(fact(chosen.len() as u32));
        let mut acc = zero;
        self.assign(chosen, 0, beta.to_vec(), BigRational::one(), 0, g, &mut acc);
        acc * coef
    }

    /// Distributes the old moving contacts among components; the rest of
    /// each component's moving contacts are new nodes with the line.
    #[allow(clippy::too_many_arguments)]
    fn assign(
        &mut self,
        chosen: &[Comp],
        i: usize,
        left: V,
        acc: BigRational,
        nodes: u32,
        g: u32,
        out: &mut BigRational,
    ) {
        if i == chosen.len() {
            let sg: u32 = chosen.iter().map(|c| c.g).sum();
            if left.iter().all(|&x| x == 0) && sg + nodes == g + chosen.len() as u32 {
                *out += acc;
            }
            return;
        }
        let c = &chosen[i];
        let v = self.count(c.d, c.g, &c.alpha, &c.beta);
        if v.is_zero() {
            return;
        }
        for old in below(&c.beta) {
            if (0..left.len()).any(|k| old[k] > left[k]) {
                continue;
            }
            let new: V = c.beta.iter().zip(&old).map(|(b, o)| b - o).collect();
            if card(&new) < 1 {
                continue;
            }
            let mut f = BigInt::one();
            for k in 0..new.len() {
                f *= choose(c.beta[k], old[k]) * BigInt::from(k as u32 + 1).pow(new[k]);
            }
            let rest: V = left.iter().zip(&old).map(|(l, o)| l - o).collect();
            let a = acc.clone() * BigRational::from_integer(f) * v.clone();
            self.assign(chosen, i + 1, rest, a, nodes + card(&new), g, out);
        }
    }
}

/// Vector of length `d` with `counts` at the given orders.
pub fn profile(d: u32, orders: &[u32]) -> V {
    let mut v = vec![0; d as usize];
    for &o in orders {
        v[o as usize - 1] += 1;
    }
    v
}
