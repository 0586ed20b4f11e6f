//! Psi and lambda integrals on the Deligne-Mumford spaces of genus 0 and 1,
//! the genus-one double ramification main component, and the degree-0
//! obstruction integrals built from them.

use std::collections::HashMap;
use std::sync::Mutex;

use once_cell::sync::Lazy;

use crate::error::{Error, Result};
use crate::rat::Rat;

/// `int_{M_{g,n}} prod psi_i^{k_i} * lambda_1^lambda`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DMKey {
    pub genus: u8,
    pub psi: Vec<u32>,
    pub lambda: u32,
}

impl DMKey {
    pub fn new(genus: u8, psi: Vec<u32>, lambda: u32) -> DMKey {
        DMKey { genus, psi, lambda }
    }

    pub fn n(&self) -> usize {
        self.psi.len()
    }

    pub fn dim(&self) -> i64 {
        match self.genus {
            0 => self.n() as i64 - 3,
            _ => self.n() as i64,
        }
    }

    fn canonical(&self) -> DMKey {
        let mut psi = self.psi.clone();
        psi.sort_unstable();
        DMKey { genus: self.genus, psi, lambda: self.lambda }
    }
}

/// Seed values on the one-pointed genus-one space.
pub const SEED_PSI: (i64, i64) = (1, 24);
pub const SEED_LAMBDA: (i64, i64) = (1, 24);

static MEMO: Lazy<Mutex<HashMap<DMKey, Rat>>> = Lazy::new(|| Mutex::new(HashMap::new()));

/// Evaluates a DM integral by the string and dilaton equations.
pub fn dm_integral(key: &DMKey) -> Result<Rat> {
    match key.genus {
        0 if key.n() < 3 => return Err(Error::Validation(format!("genus 0 needs n >= 3, got {}", key.n()))),
        0 | 1 => {}
        g => return Err(Error::Validation(format!("genus {g} is out of range"))),
    }
    if key.genus == 1 && key.n() == 0 {
        return Err(Error::Validation("genus 1 needs n >= 1".into()));
    }
    Ok(eval(&key.canonical()))
}

fn eval(key: &DMKey) -> Rat {
    let total: i64 = key.psi.iter().map(|&k| k as i64).sum::<i64>() + key.lambda as i64;
    if total != key.dim() {
        return Rat::zero();
    }
    if key.lambda > 1 || (key.genus == 0 && key.lambda > 0) {
        // lambda_1 vanishes in genus 0 and squares to zero in genus 1.
        return Rat::zero();
    }
    if let Some(v) = MEMO.lock().unwrap().get(key) {
        return v.clone();
    }
    let v = reduce(key);
    MEMO.lock().unwrap().insert(key.clone(), v.clone());
    v
}

fn reduce(key: &DMKey) -> Rat {
    let n = key.n();
    match (key.genus, n) {
        (0, 3) => return Rat::one(),
        (1, 1) => {
            let (p, q) = if key.lambda == 1 { SEED_LAMBDA } else { SEED_PSI };
            return Rat::new(p, q).unwrap();
        }
        _ => {}
    }
    // psi is sorted, so a zero sits at the front.
    if key.psi[0] == 0 {
        let rest = &key.psi[1..];
        let mut sum = Rat::zero();
        for j in 0..rest.len() {
            if rest[j] == 0 {
                continue;
            }
            let mut psi = rest.to_vec();
            psi[j] -= 1;
            psi.sort_unstable();
            sum += eval(&DMKey { genus: key.genus, psi, lambda: key.lambda });
        }
        return sum;
    }
    if key.psi[0] == 1 {
        let psi = key.psi[1..].to_vec();
        let factor = 2 * key.genus as i64 - 2 + (n as i64 - 1);
        return Rat::int(factor) * eval(&DMKey { genus: key.genus, psi, lambda: key.lambda });
    }
    // Every exponent >= 2 is impossible under the dimension constraint.
    Rat::zero()
}

/// Closed form `(n-3)! / prod k_i!` in genus 0.
pub fn genus0_closed_form(psi: &[u32]) -> Rat {
    let n = psi.len() as i64;
    let total: i64 = psi.iter().map(|&k| k as i64).sum();
    if n < 3 || total != n - 3 {
        return Rat::zero();
    }
    let mut v = Rat::factorial((n - 3) as u64);
    for &k in psi {
        v = v / Rat::factorial(k as u64);
    }
    v
}

/// Integral of `prod psi^k * lambda_1^lambda` over the main component of the
/// genus-one double ramification cycle with weights `a` (summing to 0).
///
/// The main component is the full cycle minus, with coefficient 1, every
/// boundary divisor `delta_0^S` whose rational tail carries all markings of
/// nonzero weight (a contracted elliptic curve holding only weight-0 markings):
///
/// `DR_1(a) = -lambda_1 + sum a_j^2/2 psi_j - 1/2 sum_{|S|>=2} a_S^2 delta_0^S`.
///
/// With all weights zero the main component is not a cycle of the right
/// dimension and dimension-matched requests are rejected.
pub fn dr1_base(a: &[i64], psi: &[u32], lambda: u32) -> Result<Rat> {
    if a.iter().sum::<i64>() != 0 {
        return Err(Error::Validation(format!("double ramification weights {a:?} do not sum to 0")));
    }
    if a.len() != psi.len() {
        return Err(Error::Validation("one psi exponent per weight".into()));
    }
    let n = a.len();
    if n == 0 {
        return Err(Error::Validation("double ramification needs a marking".into()));
    }
    let total: i64 = psi.iter().map(|&k| k as i64).sum::<i64>() + lambda as i64;
    if total != n as i64 - 1 {
        return Ok(Rat::zero());
    }
    if a.iter().all(|&x| x == 0) {
        return Err(Error::Unsupported("double ramification main component with all weights 0".into()));
    }
    let support: u64 = (0..n).filter(|&i| a[i] != 0).map(|i| 1u64 << i).sum();
    let g1 = |psi: Vec<u32>, lambda: u32| dm_integral(&DMKey::new(1, psi, lambda));
    let mut v = -g1(psi.to_vec(), lambda + 1)?;
    for j in 0..n {
        let mut p = psi.to_vec();
        p[j] += 1;
        v += Rat::new(a[j] * a[j], 2)? * g1(p, lambda)?;
    }
    for mask in 1u64..(1 << n) {
        let s: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        if s.len() < 2 {
            continue;
        }
        let w: i64 = s.iter().map(|&i| a[i]).sum();
        let term = boundary_term(psi, lambda, &s)?;
        if w != 0 {
            v -= Rat::new(w * w, 2)? * term.clone();
        }
        if mask & support == support {
            v -= term;
        }
    }
    Ok(v)
}

/// `int_{delta_0^S} prod psi^k lambda^l`: genus-one side keeps the complement
/// plus the node, the rational tail carries S plus the node.
fn boundary_term(psi: &[u32], lambda: u32, s: &[usize]) -> Result<Rat> {
    let mut ell = vec![0];
    let mut rat = vec![0];
    for (i, &k) in psi.iter().enumerate() {
        if s.contains(&i) {
            rat.push(k);
        } else {
            ell.push(k);
        }
    }
    Ok(dm_integral(&DMKey::new(1, ell, lambda))? * dm_integral(&DMKey::new(0, rat, 0))?)
}

/// Degree-0 genus-one invariant of `P^dim` with classes `H^c_i` and psi powers:
/// `int_{M_{1,n} x P^dim} (c_dim(T) - lambda_1 c_{dim-1}(T)) prod psi^k ev^*H^c`.
pub fn obstruction_d0(dim: u32, classes: &[u32], psi: &[u32]) -> Result<Rat> {
    if classes.is_empty() {
        return Ok(Rat::zero());
    }
    let c: u32 = classes.iter().sum();
    let top = Rat::binomial(dim as i64 + 1, dim as i64);
    let sub = Rat::binomial(dim as i64 + 1, dim as i64 - 1);
    let mut v = Rat::zero();
    if c == 0 {
        v += top * dm_integral(&DMKey::new(1, psi.to_vec(), 0))?;
    }
    if c == 1 {
        v -= sub * dm_integral(&DMKey::new(1, psi.to_vec(), 1))?;
    }
    Ok(v)
}

/// Genus-one rubber invariant over `P^dim` with base degree 0: main double
/// ramification component times the obstruction class.
pub fn rubber_d0(dim: u32, a: &[i64], classes: &[u32], psi: &[u32]) -> Result<Rat> {
    let c: u32 = classes.iter().sum();
    let mut v = Rat::zero();
    if c == 0 {
        v += Rat::binomial(dim as i64 + 1, dim as i64) * dr1_base(a, psi, 0)?;
    }
    if c == 1 {
        v -= Rat::binomial(dim as i64 + 1, dim as i64 - 1) * dr1_base(a, psi, 1)?;
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dm(g: u8, psi: &[u32], l: u32) -> Rat {
        dm_integral(&DMKey::new(g, psi.to_vec(), l)).unwrap()
    }

    #[test]
    fn genus_zero_values() {
        assert_eq!(dm(0, &[1, 0, 0, 0], 0), Rat::one());
        assert_eq!(dm(0, &[2, 0, 0, 0, 0], 0), Rat::one());
        assert_eq!(dm(0, &[1, 1, 0, 0, 0], 0), Rat::int(2));
        assert!(dm_integral(&DMKey::new(0, vec![0, 0], 0)).is_err());
    }

    #[test]
    fn genus_one_values() {
        let t = Rat::new(1, 24).unwrap();
        assert_eq!(dm(1, &[1], 0), t);
        assert_eq!(dm(1, &[0], 1), t);
        assert_eq!(dm(1, &[1, 1], 0), t);
        assert_eq!(dm(1, &[2, 0], 0), t);
        assert_eq!(dm(1, &[1, 0], 1), t);
        assert_eq!(dm(1, &[1], 1), Rat::zero());
    }

    #[test]
    fn dr_main_component_small_cases() {
        // Two markings: (a^2-1)/24 against psi_1, psi_2 or lambda_1.
        for a in 1..6i64 {
            let want = Rat::new(a * a - 1, 24).unwrap();
            assert_eq!(dr1_base(&[a, -a], &[1, 0], 0).unwrap(), want);
            assert_eq!(dr1_base(&[a, -a], &[0, 1], 0).unwrap(), want);
            assert_eq!(dr1_base(&[a, -a], &[0, 0], 1).unwrap(), want);
        }
        assert!(dr1_base(&[1, 1], &[0, 1], 0).is_err());
        assert!(dr1_base(&[0, 0], &[1, 0], 0).is_err());
        assert_eq!(dr1_base(&[0, 0, 0], &[0, 0, 0], 0).unwrap(), Rat::zero());
    }

    #[test]
    fn dr_main_component_pulls_back() {
        // A weight-0 marking is free, so the main component is a pullback and
        // obeys the string and dilaton equations in that marking.
        let a = [3i64, -1, -2];
        for k in [[2u32, 0, 0], [1, 1, 0], [0, 1, 1], [0, 0, 2]] {
            let mut p = k.to_vec();
            p.push(0);
            let lhs = dr1_base(&[a[0], a[1], a[2], 0], &p, 0).unwrap();
            let mut rhs = Rat::zero();
            for j in 0..3 {
                if k[j] > 0 {
                    let mut q = k.to_vec();
                    q[j] -= 1;
                    rhs += dr1_base(&a, &q, 0).unwrap();
                }
            }
            assert_eq!(lhs, rhs, "string at {k:?}");
        }
        for k in [[1u32, 0, 0], [0, 1, 0], [0, 0, 1]] {
            let mut p = k.to_vec();
            p.push(1);
            let lhs = dr1_base(&[a[0], a[1], a[2], 0], &p, 0).unwrap();
            let rhs = Rat::int(3) * dr1_base(&a, &k, 0).unwrap();
            assert_eq!(lhs, rhs, "dilaton at {k:?}");
        }
    }

    #[test]
    fn degree_zero_obstruction() {
        // <H>_{1,0} of P^m is -(m+1 choose 2)/24.
        for m in 1..5u32 {
            let want = -Rat::binomial(m as i64 + 1, 2) * Rat::new(1, 24).unwrap();
            assert_eq!(obstruction_d0(m, &[1], &[0]).unwrap(), want);
        }
    }
}
