//! Splitting degree, vanishing order and contribution factor of a boundary
//! divisor with splitting-node slopes `m_1..m_r`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use crate::error::{Error, Result};
use crate::rat::Rat;
use crate::tropical::{BoundaryDivisor, DivisorKind};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplicityData {
    pub slopes: Vec<u64>,
    pub splitting_degree: Rat,
    pub vanishing_order: BigInt,
    pub contribution_factor: BigInt,
}

impl MultiplicityData {
    pub fn of(slopes: &[u64]) -> Result<MultiplicityData> {
        Ok(MultiplicityData {
            slopes: slopes.to_vec(),
            splitting_degree: splitting_degree(slopes)?,
            vanishing_order: vanishing_order(slopes)?,
            contribution_factor: contribution_factor(slopes)?,
        })
    }
}

fn check(m: &[u64]) -> Result<()> {
    if m.is_empty() {
        return Err(Error::Validation("empty slope vector".into()));
    }
    if m.contains(&0) {
        return Err(Error::Validation("slopes must be positive".into()));
    }
    Ok(())
}

/// `lcm(m_1..m_r)`.
pub fn vanishing_order(m: &[u64]) -> Result<BigInt> {
    check(m)?;
    Ok(m.iter().fold(BigInt::one(), |acc, &x| acc.lcm(&BigInt::from(x))))
}

/// `prod m_i`.
pub fn contribution_factor(m: &[u64]) -> Result<BigInt> {
    check(m)?;
    Ok(m.iter().map(|&x| BigInt::from(x)).product())
}

/// `prod m_i / lcm(m_i)`; always an integer.
pub fn splitting_degree(m: &[u64]) -> Result<Rat> {
    let p = contribution_factor(m)?;
    let l = vanishing_order(m)?;
    let (q, r) = p.div_rem(&l);
    if r != BigInt::from(0) {
        return Err(Error::Internal(format!("splitting degree of {m:?} is not integral")));
    }
    Ok(Rat::from(q))
}

/// Index of the piecewise-linear function "height of the recursion marking's
/// vertex" on the lattice of a ray: its value on the primitive generator.
///
/// For rays of kind I, II or III this is `lcm(m_i)`; a ray whose marking stays
/// at level 0 gives 0.
pub fn dagger_vanishing_order(ray: &BoundaryDivisor) -> Result<BigInt> {
    if ray.kind != DivisorKind::Dagger {
        return Err(Error::Validation("dagger_vanishing_order needs a dagger ray".into()));
    }
    ray.marking_height()
}
