//! Exterior powers of based sublattices of `M` and interior products.
//!
//! Wedge bases are indexed by lexicographically ordered subsets of basis
//! positions. Matrices act on column coordinate vectors.

use std::collections::BTreeMap;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{is_saturated, right_inverse, LatticeMatrix, LatticeVector};
use crate::polyhedral::{Cone, FacetIncidence, Fan};

/// A saturated sublattice of `M` with an ordered basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasedSublattice {
    ambient_rank: usize,
    basis: Vec<LatticeVector>,
}

impl BasedSublattice {
    pub fn new(ambient_rank: usize, basis: Vec<LatticeVector>) -> Result<Self> {
        let mat = LatticeMatrix::from_rows(ambient_rank, &basis);
        if mat.rational_rank() != basis.len() {
            return Err(Error::Identity("sublattice basis is linearly dependent".into()));
        }
        if !is_saturated(ambient_rank, &basis) {
            return Err(Error::NotSaturated);
        }
        Ok(BasedSublattice { ambient_rank, basis })
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[LatticeVector] {
        &self.basis
    }

    /// Basis vectors as rows.
    pub fn matrix(&self) -> LatticeMatrix {
        LatticeMatrix::from_rows(self.ambient_rank, &self.basis)
    }
}

/// `M ∩ σ^⊥` with its canonical (Hermite-reduced) basis.
pub fn annihilator_basis(sigma: &Cone) -> BasedSublattice {
    BasedSublattice { ambient_rank: sigma.ambient_rank(), basis: sigma.annihilator().to_vec() }
}

/// `C(rank, k)`, zero outside `0..=rank`.
pub fn wedge_dim(rank: usize, k: isize) -> usize {
    if k < 0 || k as usize > rank {
        return 0;
    }
    let k = k as usize;
    (0..k).fold(1usize, |acc, i| acc * (rank - i) / (i + 1))
}

/// The basis of `Λ^k` of a rank-`rank` lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WedgeSpace {
    pub rank: usize,
    pub degree: isize,
    pub basis_index: Vec<Vec<usize>>,
}

impl WedgeSpace {
    pub fn new(rank: usize, degree: isize) -> Self {
        let basis_index = if degree < 0 || degree as usize > rank { Vec::new() } else { (0..rank).combinations(degree as usize).collect() };
        WedgeSpace { rank, degree, basis_index }
    }

    pub fn dim(&self) -> usize {
        self.basis_index.len()
    }

    pub fn position(&self, subset: &[usize]) -> Option<usize> {
        self.basis_index.binary_search_by(|s| s.as_slice().cmp(subset)).ok()
    }
}

/// `Λ^k(A)`: the matrix of k×k minors, rows and columns indexed by
/// lexicographic k-subsets.
pub fn compound_matrix(a: &LatticeMatrix, k: usize) -> LatticeMatrix {
    let rows: Vec<Vec<usize>> = (0..a.nrows()).combinations(k).collect();
    let cols: Vec<Vec<usize>> = (0..a.ncols()).combinations(k).collect();
    let mut out = LatticeMatrix::zeros(rows.len(), cols.len());
    for (i, r) in rows.iter().enumerate() {
        for (j, c) in cols.iter().enumerate() {
            out[(i, j)] = a.select(r, c).determinant();
        }
    }
    out
}

/// Matrix of `ι_n : Λ^k(source) → Λ^{k−1}(target)`, where the image must lie
/// in `Λ^{k−1}(target)`.
///
/// `ι_n(m_1∧…∧m_k) = Σ_i (−1)^{i−1} ⟨m_i, n⟩ m_1∧…∧m̂_i∧…∧m_k`.
pub fn interior_product_matrix(source: &BasedSublattice, target: &BasedSublattice, n: &LatticeVector, k: usize) -> Result<LatticeMatrix> {
    let src_space = WedgeSpace::new(source.rank(), k as isize);
    let tgt_space = WedgeSpace::new(target.rank(), k as isize - 1);
    let mut out = LatticeMatrix::zeros(tgt_space.dim(), src_space.dim());
    if k == 0 || src_space.dim() == 0 || tgt_space.dim() == 0 {
        return Ok(out);
    }
    let pairing: Vec<BigInt> = source.basis().iter().map(|m| m.dot(n)).collect();
    let low_space = WedgeSpace::new(source.rank(), k as isize - 1);
    let src_to_ambient = compound_matrix(&source.matrix(), k - 1);
    let tgt_mat = target.matrix();
    let tgt_to_ambient = compound_matrix(&tgt_mat, k - 1);
    let inverse = right_inverse(&tgt_mat).ok_or(Error::NotSaturated)?;
    let ambient_to_tgt = compound_matrix(&inverse, k - 1);

    for (col, subset) in src_space.basis_index.iter().enumerate() {
        let mut low = LatticeVector::zero(low_space.dim());
        for (a, &i) in subset.iter().enumerate() {
            if pairing[i].is_zero() {
                continue;
            }
            let rest: Vec<usize> = subset.iter().copied().filter(|&j| j != i).collect();
            let pos = low_space.position(&rest).expect("subset of a basis subset");
            let term = if a % 2 == 0 { pairing[i].clone() } else { -pairing[i].clone() };
            low.0[pos] += term;
        }
        let ambient = src_to_ambient.apply_left(&low);
        let coords = ambient_to_tgt.apply_left(&ambient);
        if tgt_to_ambient.apply_left(&coords) != ambient {
            return Err(Error::CoordinateSolve(format!("degree {k}, source column {col}")));
        }
        for (row, c) in coords.0.into_iter().enumerate() {
            out[(row, col)] = c;
        }
    }
    Ok(out)
}

/// The `(σ, τ)` block of Ishida's coboundary on `Λ^k(M ∩ σ^⊥)`.
pub fn contraction_matrix(fan: &Fan, inc: &FacetIncidence, k: usize) -> Result<LatticeMatrix> {
    let source = annihilator_basis(fan.cone(inc.sigma));
    let target = annihilator_basis(fan.cone(inc.tau));
    interior_product_matrix(&source, &target, &inc.lift, k)
}

/// An element of `Λ^•(Z^r)` in the standard basis, keyed by sorted index
/// subsets. Used to cross-check the matrix routines.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Multivector {
    terms: BTreeMap<Vec<usize>, BigInt>,
}

impl Multivector {
    pub fn scalar(c: BigInt) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        Multivector { terms }
    }

    pub fn from_vector(v: &LatticeVector) -> Self {
        let terms = v.entries().iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (vec![i], c.clone())).collect();
        Multivector { terms }
    }

    /// `v_1 ∧ … ∧ v_k`.
    pub fn decomposable(vs: &[LatticeVector]) -> Self {
        vs.iter().fold(Self::scalar(BigInt::one()), |acc, v| acc.wedge(&Self::from_vector(v)))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<Vec<usize>, BigInt> {
        &self.terms
    }

    fn insert(&mut self, key: Vec<usize>, c: BigInt) {
        let e = self.terms.entry(key).or_insert_with(BigInt::zero);
        *e += c;
        if e.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, other: &Multivector) -> Multivector {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.insert(k.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &BigInt) -> Multivector {
        let mut out = Multivector::default();
        for (k, v) in &self.terms {
            out.insert(k.clone(), v * c);
        }
        out
    }

    pub fn wedge(&self, other: &Multivector) -> Multivector {
        let mut out = Multivector::default();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if a.iter().any(|x| b.contains(x)) {
                    continue;
                }
                // sign of the shuffle sorting a ++ b
                let inversions = a.iter().map(|x| b.iter().filter(|y| *y < x).count()).sum::<usize>();
                let mut key: Vec<usize> = a.iter().chain(b).copied().collect();
                key.sort_unstable();
                let c = ca * cb;
                out.insert(key, if inversions % 2 == 0 { c } else { -c });
            }
        }
        out
    }

    /// Interior product with `n ∈ N`, contracting from the left.
    pub fn interior(&self, n: &LatticeVector) -> Multivector {
        let mut out = Multivector::default();
        for (key, c) in &self.terms {
            for (pos, &i) in key.iter().enumerate() {
                if n[i].is_zero() {
                    continue;
                }
                let rest: Vec<usize> = key.iter().copied().filter(|&j| j != i).collect();
                let t = c * &n[i];
                out.insert(rest, if pos % 2 == 0 { t } else { -t });
            }
        }
        out
    }

    /// Homogeneous degree when all terms share one.
    pub fn degree(&self) -> Option<usize> {
        let mut degs = self.terms.keys().map(Vec::len);
        let d = degs.next()?;
        degs.all(|e| e == d).then_some(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyhedral::gamma_pi;

    fn v(e: &[i64]) -> LatticeVector {
        LatticeVector::from_i64s(e)
    }

    #[test]
    fn wedge_dims() {
        assert_eq!(wedge_dim(3, 2), 3);
        assert_eq!(wedge_dim(2, 0), 1);
        assert_eq!(wedge_dim(2, 3), 0);
        assert_eq!(wedge_dim(2, -1), 0);
        assert_eq!(WedgeSpace::new(4, 2).basis_index[0], vec![0, 1]);
        assert_eq!(WedgeSpace::new(4, 2).dim(), 6);
    }

    #[test]
    fn annihilators() {
        let ray = Cone::from_i64s(2, &[&[1, 0]]).unwrap();
        assert_eq!(annihilator_basis(&ray).basis(), &[v(&[0, 1])]);
        assert_eq!(annihilator_basis(&Cone::zero(2)).basis(), &[v(&[1, 0]), v(&[0, 1])]);
        let ray = Cone::from_i64s(2, &[&[1, 2]]).unwrap();
        assert_eq!(annihilator_basis(&ray).basis(), &[v(&[2, -1])]);
    }

    #[test]
    fn contraction_from_zero_cone() {
        let fan = gamma_pi(&Cone::from_i64s(2, &[&[1, 0]]).unwrap());
        let inc = fan.facet_incidence(0, 1).unwrap();
        let m1 = contraction_matrix(&fan, &inc, 1).unwrap();
        assert_eq!(m1, LatticeMatrix::from_i64_rows(2, &[&[1, 0]]));
        let m2 = contraction_matrix(&fan, &inc, 2).unwrap();
        assert_eq!(m2, LatticeMatrix::from_i64_rows(1, &[&[1]]));
        let m0 = contraction_matrix(&fan, &inc, 0).unwrap();
        assert_eq!((m0.nrows(), m0.ncols()), (0, 1));
    }

    #[test]
    fn contraction_along_a_ray() {
        let fan = gamma_pi(&Cone::from_i64s(2, &[&[1, 0], &[1, 2]]).unwrap());
        let s = fan.ray_cone(&v(&[1, 0])).unwrap();
        let t = fan.cones_of_dim(2).start;
        let inc = fan.facet_incidence(s, t).unwrap();
        assert_eq!(contraction_matrix(&fan, &inc, 1).unwrap(), LatticeMatrix::from_i64_rows(1, &[&[1]]));
    }

    #[test]
    fn compound_is_multiplicative() {
        let a = LatticeMatrix::from_i64_rows(3, &[&[1, 2, 0], &[0, 1, 3], &[2, 0, 1]]);
        let b = LatticeMatrix::from_i64_rows(3, &[&[1, 0, 1], &[1, 1, 0], &[0, 2, 1]]);
        for k in 0..=3 {
            assert_eq!(compound_matrix(&(&a * &b), k), &compound_matrix(&a, k) * &compound_matrix(&b, k));
        }
    }

    #[test]
    fn multivector_basics() {
        let e0 = v(&[1, 0, 0]);
        let e1 = v(&[0, 1, 0]);
        let a = Multivector::decomposable(&[e0.clone(), e1.clone()]);
        let b = Multivector::decomposable(&[e1.clone(), e0.clone()]);
        assert_eq!(a.add(&b), Multivector::default());
        assert_eq!(a.interior(&v(&[1, 0, 0])), Multivector::from_vector(&e1));
        assert_eq!(a.interior(&v(&[0, 1, 0])), Multivector::from_vector(&e0).scale(&BigInt::from(-1)));
        assert_eq!(a.degree(), Some(2));
    }
}
