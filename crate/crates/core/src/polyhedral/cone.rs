//! Strongly convex rational polyhedral cones.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};

use itertools::Itertools;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{kernel_basis, primitive, right_inverse, saturate, LatticeMatrix, LatticeVector};

/// Facets of the cone generated by a finite set of vectors, computed in the
/// coordinates of the generators' linear span.
pub(crate) struct DualDescription {
    /// HNF basis of the saturated span of the generators.
    pub span: Vec<LatticeVector>,
    /// HNF basis of the annihilator of the span.
    pub annihilator: Vec<LatticeVector>,
    /// Inward facet normals, lifted to the dual of the ambient lattice.
    pub facets: Vec<LatticeVector>,
    /// Generator coordinates in the span basis.
    coords: Vec<LatticeVector>,
    /// Facet normals as functionals on span coordinates.
    span_facets: Vec<LatticeVector>,
}

impl DualDescription {
    pub fn compute(ambient: usize, gens: &[LatticeVector]) -> Self {
        let span = saturate(gens);
        let annihilator = kernel_basis(&LatticeMatrix::from_rows(ambient, gens));
        let d = span.len();
        if d == 0 {
            return DualDescription { span, annihilator, facets: Vec::new(), coords: Vec::new(), span_facets: Vec::new() };
        }
        let span_mat = LatticeMatrix::from_rows(ambient, &span);
        let lift = right_inverse(&span_mat).expect("saturated basis has an integral right inverse");
        let coords: Vec<LatticeVector> = gens.iter().map(|g| lift.apply_left(g)).collect();
        let distinct: Vec<&LatticeVector> = coords.iter().collect::<BTreeSet<_>>().into_iter().collect();

        let mut span_facets = BTreeSet::new();
        for subset in distinct.iter().copied().combinations(d - 1) {
            let Some(f) = hyperplane_normal(d, &subset) else { continue };
            let f = &f;
            let vals: Vec<_> = coords.iter().map(|c| c.dot(f)).collect();
            if vals.iter().all(|x| !x.is_negative()) {
                span_facets.insert(f.clone());
            } else if vals.iter().all(|x| !x.is_positive()) {
                span_facets.insert(f.neg());
            }
        }
        let span_facets: Vec<LatticeVector> = span_facets.into_iter().collect();
        let facets = span_facets.iter().map(|f| lift.apply(f)).collect();
        DualDescription { span, annihilator, facets, coords, span_facets }
    }

    /// The generated cone contains no line.
    pub fn pointed(&self) -> bool {
        let d = self.span.len();
        d == 0 || LatticeMatrix::from_rows(d, &self.span_facets).rational_rank() == d
    }

    /// Whether generator `i` spans an extremal ray.
    pub fn extremal(&self, i: usize) -> bool {
        let d = self.span.len();
        let tight: Vec<LatticeVector> = self.span_facets.iter().filter(|f| self.coords[i].dot(f).is_zero()).cloned().collect();
        LatticeMatrix::from_rows(d, &tight).rational_rank() + 1 == d
    }
}

/// Primitive normal of the hyperplane spanned by `d - 1` vectors in `Z^d`,
/// from the signed maximal minors; `None` if they are dependent.
fn hyperplane_normal(d: usize, rows: &[&LatticeVector]) -> Option<LatticeVector> {
    let minors: Vec<_> = (0..d)
        .map(|skip| {
            let minor: Vec<LatticeVector> =
                rows.iter().map(|r| LatticeVector(r.entries().iter().enumerate().filter(|&(j, _)| j != skip).map(|(_, e)| e.clone()).collect())).collect();
            let det = LatticeMatrix::from_rows(d - 1, &minor).determinant();
            if skip % 2 == 0 { det } else { -det }
        })
        .collect();
    primitive(&LatticeVector(minors)).ok()
}

/// A strongly convex rational polyhedral cone, given by its primitive ray
/// generators (sorted) together with its H-representation.
#[derive(Clone)]
pub struct Cone {
    ambient: usize,
    rays: Vec<LatticeVector>,
    facet_normals: Vec<LatticeVector>,
    span: Vec<LatticeVector>,
    annihilator: Vec<LatticeVector>,
}

impl Cone {
    /// The cone `{0}` in a lattice of the given rank.
    pub fn zero(ambient: usize) -> Self {
        Cone {
            ambient,
            rays: Vec::new(),
            facet_normals: Vec::new(),
            span: Vec::new(),
            annihilator: LatticeMatrix::identity(ambient).row_vectors(),
        }
    }

    /// Cone generated by the given vectors. Generators are made primitive,
    /// duplicates and non-extremal generators are dropped.
    pub fn new(ambient: usize, gens: &[LatticeVector]) -> Result<Self> {
        let mut prim = BTreeSet::new();
        for g in gens {
            if g.len() != ambient {
                return Err(Error::DimensionMismatch { expected: ambient, found: g.len() });
            }
            prim.insert(primitive(g)?);
        }
        if prim.is_empty() {
            return Ok(Self::zero(ambient));
        }
        let prim: Vec<LatticeVector> = prim.into_iter().collect();
        let dd = DualDescription::compute(ambient, &prim);
        if !dd.pointed() {
            return Err(Error::NotStronglyConvex { rays: fmt_rays(&prim) });
        }
        let rays = prim.iter().enumerate().filter(|(i, _)| dd.extremal(*i)).map(|(_, r)| r.clone()).collect();
        Ok(Cone { ambient, rays, facet_normals: dd.facets, span: dd.span, annihilator: dd.annihilator })
    }

    pub fn from_i64s(ambient: usize, gens: &[&[i64]]) -> Result<Self> {
        let gens: Vec<LatticeVector> = gens.iter().map(|g| LatticeVector::from_i64s(g)).collect();
        Self::new(ambient, &gens)
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient
    }

    pub fn rays(&self) -> &[LatticeVector] {
        &self.rays
    }

    pub fn dim(&self) -> usize {
        self.span.len()
    }

    pub fn is_simplicial(&self) -> bool {
        self.rays.len() == self.dim()
    }

    /// Inward normals `m` with `⟨m, x⟩ ≥ 0` on the cone, one per facet.
    pub fn facet_normals(&self) -> &[LatticeVector] {
        &self.facet_normals
    }

    /// HNF basis of `N ∩ R·cone`.
    pub fn span_basis(&self) -> &[LatticeVector] {
        &self.span
    }

    /// HNF basis of `M ∩ cone^⊥`.
    pub fn annihilator(&self) -> &[LatticeVector] {
        &self.annihilator
    }

    pub fn contains(&self, v: &LatticeVector) -> bool {
        self.annihilator.iter().all(|m| m.dot(v).is_zero()) && self.facet_normals.iter().all(|m| !m.dot(v).is_negative())
    }

    /// Membership in the relative interior.
    pub fn relint_contains(&self, v: &LatticeVector) -> bool {
        self.annihilator.iter().all(|m| m.dot(v).is_zero()) && self.facet_normals.iter().all(|m| m.dot(v).is_positive())
    }

    /// Whether the cone generated by `subset` (a subset of this cone's
    /// rays) is a face of this cone.
    pub fn is_face_rays(&self, subset: &[LatticeVector]) -> bool {
        if subset.iter().any(|r| self.rays.binary_search(r).is_err()) {
            return false;
        }
        if subset.is_empty() {
            return true;
        }
        let tight: Vec<&LatticeVector> = self.facet_normals.iter().filter(|m| subset.iter().all(|r| m.dot(r).is_zero())).collect();
        let closure: BTreeSet<&LatticeVector> = self.rays.iter().filter(|r| tight.iter().all(|m| m.dot(r).is_zero())).collect();
        closure == subset.iter().collect()
    }

    pub fn is_face_of(&self, other: &Cone) -> bool {
        self.ambient == other.ambient && other.is_face_rays(&self.rays)
    }

    /// Facets (codimension-one faces).
    pub fn facets(&self) -> Vec<Cone> {
        if self.is_simplicial() {
            return (0..self.rays.len())
                .map(|skip| {
                    let rays: Vec<LatticeVector> = self.rays.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, r)| r.clone()).collect();
                    Cone::new(self.ambient, &rays).expect("face of a strongly convex cone")
                })
                .collect();
        }
        self.facet_normals
            .iter()
            .map(|m| {
                let rays: Vec<LatticeVector> = self.rays.iter().filter(|r| m.dot(r).is_zero()).cloned().collect();
                Cone::new(self.ambient, &rays).expect("face of a strongly convex cone")
            })
            .collect()
    }

    /// All faces, including `{0}` and the cone itself, in canonical order.
    pub fn faces(&self) -> Vec<Cone> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![self.clone()];
        while let Some(c) = stack.pop() {
            if seen.contains(&c) {
                continue;
            }
            stack.extend(c.facets().into_iter().filter(|f| !seen.contains(f)));
            seen.insert(c);
        }
        seen.into_iter().collect()
    }

    /// Primitive extremal rays of `self ∩ other`.
    pub fn intersection_rays(&self, other: &Cone) -> Vec<LatticeVector> {
        assert_eq!(self.ambient, other.ambient);
        let mut gens: Vec<LatticeVector> = Vec::new();
        for c in [self, other] {
            gens.extend(c.facet_normals.iter().cloned());
            for m in &c.annihilator {
                gens.push(m.clone());
                gens.push(m.neg());
            }
        }
        if gens.is_empty() {
            return Vec::new();
        }
        let dd = DualDescription::compute(self.ambient, &gens);
        let mut rays: Vec<LatticeVector> = dd.facets.iter().map(|f| primitive(f).expect("nonzero facet normal")).collect();
        rays.sort();
        rays
    }

    /// `self ∩ other` is a face of both.
    pub fn meets_properly(&self, other: &Cone) -> bool {
        let common = self.intersection_rays(other);
        self.is_face_rays(&common) && other.is_face_rays(&common)
    }
}

impl PartialEq for Cone {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.rays == other.rays
    }
}

impl Eq for Cone {}

impl Hash for Cone {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.ambient.hash(state);
        self.rays.hash(state);
    }
}

impl Ord for Cone {
    /// Dimension first, then the sorted ray list.
    fn cmp(&self, other: &Self) -> Ordering {
        (self.ambient, self.dim(), &self.rays).cmp(&(other.ambient, other.dim(), &other.rays))
    }
}

impl PartialOrd for Cone {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub(crate) fn fmt_rays(rays: &[LatticeVector]) -> String {
    if rays.is_empty() {
        return "{0}".to_string();
    }
    format!("cone[{}]", rays.iter().map(|r| r.to_string()).join(", "))
}

impl fmt::Display for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_rays(&self.rays))
    }
}

impl fmt::Debug for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(e: &[i64]) -> LatticeVector {
        LatticeVector::from_i64s(e)
    }

    #[test]
    fn primitivizes_generators() {
        let c = Cone::from_i64s(2, &[&[2, 0], &[0, 3]]).unwrap();
        assert_eq!(c.rays(), &[v(&[0, 1]), v(&[1, 0])]);
        assert!(c.is_simplicial());
        assert_eq!(c.dim(), 2);
    }

    #[test]
    fn rejects_lines() {
        assert!(matches!(Cone::from_i64s(2, &[&[1, 0], &[-1, 0]]), Err(Error::NotStronglyConvex { .. })));
        assert!(matches!(Cone::from_i64s(2, &[&[1, 0], &[-1, 0], &[0, 1]]), Err(Error::NotStronglyConvex { .. })));
    }

    #[test]
    fn drops_interior_generator() {
        // (1,1,1) lies inside the positive orthant
        let c = Cone::from_i64s(3, &[&[1, 0, 0], &[0, 1, 0], &[1, 1, 1], &[0, 0, 1]]).unwrap();
        assert_eq!(c.rays().len(), 3);
        assert!(c.is_simplicial());
        assert!(!c.rays().contains(&v(&[1, 1, 1])));
    }

    #[test]
    fn square_cone_faces() {
        let c = Cone::from_i64s(3, &[&[1, 0, 1], &[0, 1, 1], &[-1, 0, 1], &[0, -1, 1]]).unwrap();
        assert!(!c.is_simplicial());
        assert_eq!(c.dim(), 3);
        assert_eq!(c.facet_normals().len(), 4);
        let faces = c.faces();
        assert_eq!(faces.len(), 10);
        let by_dim = (0..=3).map(|d| faces.iter().filter(|f| f.dim() == d).count()).collect::<Vec<_>>();
        assert_eq!(by_dim, vec![1, 4, 4, 1]);
    }

    #[test]
    fn simplicial_faces() {
        let c = Cone::from_i64s(2, &[&[1, 0], &[0, 1]]).unwrap();
        assert_eq!(c.faces().len(), 4);
        let ray = Cone::from_i64s(2, &[&[1, 2]]).unwrap();
        assert_eq!(ray.faces(), vec![Cone::zero(2), ray.clone()]);
    }

    #[test]
    fn lower_dimensional_cone_has_facets_in_its_span() {
        let c = Cone::from_i64s(3, &[&[1, 0, 0], &[0, 1, 0]]).unwrap();
        assert_eq!(c.dim(), 2);
        assert_eq!(c.annihilator(), &[v(&[0, 0, 1])]);
        assert_eq!(c.facet_normals().len(), 2);
        assert!(c.contains(&v(&[2, 3, 0])));
        assert!(!c.contains(&v(&[2, 3, 1])));
        assert!(!c.contains(&v(&[-1, 3, 0])));
        assert!(c.relint_contains(&v(&[1, 1, 0])));
        assert!(!c.relint_contains(&v(&[1, 0, 0])));
    }

    #[test]
    fn intersections() {
        let a = Cone::from_i64s(2, &[&[1, 0], &[0, 1]]).unwrap();
        let b = Cone::from_i64s(2, &[&[0, 1], &[-1, 0]]).unwrap();
        assert_eq!(a.intersection_rays(&b), vec![v(&[0, 1])]);
        assert!(a.meets_properly(&b));
        let c = Cone::from_i64s(2, &[&[1, 1], &[-1, 1]]).unwrap();
        // a ∩ c = cone((1,1),(0,1)), not a face of either
        assert_eq!(a.intersection_rays(&c), vec![v(&[0, 1]), v(&[1, 1])]);
        assert!(!a.meets_properly(&c));
        let d = Cone::from_i64s(2, &[&[-1, 0], &[0, -1]]).unwrap();
        assert!(a.intersection_rays(&d).is_empty());
        assert!(a.meets_properly(&d));
    }
}
