//! Relatively open rational polyhedral cones: named coordinates, integral
//! equalities, strict inequalities.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

use super::linalg::{self, Row};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cone {
    pub coords: Vec<String>,
    /// `row . x = 0`.
    pub relations: Vec<Row>,
    /// `row . x > 0` on the relative interior.
    pub strict: Vec<Row>,
}

impl Cone {
    pub fn new(coords: Vec<String>) -> Cone {
        Cone { coords, relations: Vec::new(), strict: Vec::new() }
    }

    pub fn ncoords(&self) -> usize {
        self.coords.len()
    }

    /// `#coordinates - rank(relations)`.
    pub fn dim(&self) -> usize {
        self.ncoords() - linalg::rank(&self.relations, self.ncoords())
    }

    pub fn is_feasible(&self) -> bool {
        linalg::feasible(&self.relations, &self.strict, self.ncoords())
    }

    /// Refinement by extra equalities and strict inequalities.
    pub fn with(&self, relations: &[Row], strict: &[Row]) -> Cone {
        let mut c = self.clone();
        c.relations.extend(relations.iter().cloned());
        c.strict.extend(strict.iter().cloned());
        c
    }

    /// Membership of a point in the relative interior.
    pub fn contains(&self, x: &[i64]) -> bool {
        self.relations.iter().all(|r| linalg::dot(r, x) == 0) && self.strict.iter().all(|r| linalg::dot(r, x) > 0)
    }

    /// Membership in the closure.
    pub fn closure_contains(&self, x: &[i64]) -> bool {
        self.relations.iter().all(|r| linalg::dot(r, x) == 0) && self.strict.iter().all(|r| linalg::dot(r, x) >= 0)
    }

    /// Primitive integral generators of the extremal rays of the closure.
    pub fn generators(&self) -> Vec<Row> {
        let n = self.ncoords();
        let basis = linalg::nullspace(&self.relations, n);
        let k = basis.len();
        let mut out: BTreeSet<Row> = BTreeSet::new();
        if k == 0 || !self.is_feasible() {
            return Vec::new();
        }
        // Inequalities in the coordinates of the kernel basis.
        let ineq: Vec<Row> = self.strict.iter().map(|a| basis.iter().map(|b| linalg::dot(a, b)).collect()).collect();
        let lift = |y: &[i64]| -> Row { (0..n).map(|i| basis.iter().zip(y).map(|(b, c)| b[i] * c).sum()).collect() };
        let mut try_dir = |y: Row| {
            for s in [1i64, -1] {
                let ys = linalg::scale(&y, s);
                if ineq.iter().all(|a| linalg::dot(a, &ys) >= 0) {
                    out.insert(linalg::primitive(&lift(&ys)));
                }
            }
        };
        if k == 1 {
            try_dir(vec![1]);
        } else {
            for subset in subsets(ineq.len(), k - 1) {
                let rows: Vec<Row> = subset.iter().map(|&i| ineq[i].clone()).collect();
                if linalg::rank(&rows, k) != k - 1 {
                    continue;
                }
                let ns = linalg::nullspace(&rows, k);
                try_dir(ns[0].clone());
            }
        }
        out.into_iter().collect()
    }

    /// Same closure: double inclusion of generators and equal dimension.
    pub fn same_as(&self, other: &Cone) -> bool {
        if self.coords != other.coords || self.dim() != other.dim() {
            return false;
        }
        let a = self.generators();
        let b = other.generators();
        let inside = |gens: &[Row], c: &Cone| gens.iter().all(|g| c.closure_contains(g));
        inside(&a, other) && inside(&b, self)
    }

    /// The spanning direction of a one-dimensional cone, oriented inward.
    pub fn ray_direction(&self) -> Result<Row> {
        if self.dim() != 1 {
            return Err(Error::Validation(format!("cone of dimension {} is not a ray", self.dim())));
        }
        let v = linalg::nullspace(&self.relations, self.ncoords()).remove(0);
        let inward = self.strict.iter().all(|a| linalg::dot(a, &v) > 0);
        if inward {
            return Ok(v);
        }
        let w: Row = v.into_iter().map(|x| -x).collect();
        if self.strict.iter().all(|a| linalg::dot(a, &w) > 0) {
            Ok(w)
        } else {
            Err(Error::Validation("empty ray".into()))
        }
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// A finite collection of cones in common coordinates.
#[derive(Clone, Debug, Default)]
pub struct ConeComplex {
    pub cones: Vec<Cone>,
}

impl ConeComplex {
    pub fn new(cones: Vec<Cone>) -> ConeComplex {
        ConeComplex { cones }
    }

    /// All cones having `cone` as a face, itself included.
    pub fn star(&self, cone: &Cone) -> Result<ConeComplex> {
        if !self.cones.iter().any(|c| c.same_as(cone)) {
            return Err(Error::Validation("cone is not in the complex".into()));
        }
        let gens: BTreeSet<Row> = cone.generators().into_iter().collect();
        let cones = self
            .cones
            .iter()
            .filter(|c| {
                let g: BTreeSet<Row> = c.generators().into_iter().collect();
                gens.is_subset(&g)
            })
            .cloned()
            .collect();
        Ok(ConeComplex { cones })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(v: &[i64]) -> Row {
        v.to_vec()
    }

    fn quadrant_fan() -> (ConeComplex, Cone) {
        let q = Cone::new(vec!["a".into(), "b".into()]);
        let lo = q.with(&[], &[r(&[1, 0]), r(&[0, 1]), r(&[-1, 1])]);
        let hi = q.with(&[], &[r(&[1, 0]), r(&[0, 1]), r(&[1, -1])]);
        let diag = q.with(&[r(&[1, -1])], &[r(&[1, 0])]);
        let axis_a = q.with(&[r(&[0, 1])], &[r(&[1, 0])]);
        let axis_b = q.with(&[r(&[1, 0])], &[r(&[0, 1])]);
        let origin = q.with(&[r(&[1, 0]), r(&[0, 1])], &[]);
        (ConeComplex::new(vec![lo, hi, diag.clone(), axis_a, axis_b, origin]), diag)
    }

    #[test]
    fn generators_of_a_wedge() {
        let (fan, diag) = quadrant_fan();
        assert_eq!(diag.dim(), 1);
        assert_eq!(diag.generators(), vec![vec![1, 1]]);
        assert_eq!(fan.cones[0].generators().len(), 2);
    }

    #[test]
    fn star_of_a_ray_between_two_chambers() {
        let (fan, diag) = quadrant_fan();
        let st = fan.star(&diag).unwrap();
        let dims: Vec<usize> = st.cones.iter().map(Cone::dim).collect();
        assert_eq!(dims.iter().filter(|&&d| d == 1).count(), 1);
        assert_eq!(dims.iter().filter(|&&d| d == 2).count(), 2);
        assert_eq!(st.cones.len(), 3);
    }

    #[test]
    fn star_of_extremes() {
        let (fan, _) = quadrant_fan();
        let origin = fan.cones[5].clone();
        assert_eq!(fan.star(&origin).unwrap().cones.len(), fan.cones.len());
        let top = fan.cones[0].clone();
        assert_eq!(fan.star(&top).unwrap().cones.len(), 1);
        let stranger = Cone::new(vec!["a".into(), "b".into()]).with(&[r(&[1, -2])], &[r(&[1, 0])]);
        assert!(fan.star(&stranger).is_err());
    }
}
