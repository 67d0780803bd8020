//! Finite rational fans with their face relation.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use itertools::Itertools;
use num_traits::{Signed, Zero};

use super::cone::Cone;
use crate::error::{Error, Result};
use crate::linalg::{primitive, right_inverse, LatticeMatrix, LatticeVector};

/// A finite fan for `N = Z^r`.
///
/// Cones are stored in canonical order: by dimension, then by their sorted
/// primitive ray lists. The zero cone is always index 0.
#[derive(Clone)]
pub struct Fan {
    rank: usize,
    rays: Vec<LatticeVector>,
    cones: Vec<Cone>,
    ray_ids: Vec<Vec<usize>>,
    lookup: HashMap<Vec<usize>, usize>,
    dim_start: Vec<usize>,
    facets: Vec<Vec<usize>>,
    cofacets: Vec<Vec<usize>>,
}

/// A codimension-one face relation `σ ≺ τ` in a fan, with the primitive
/// normal class of `τ` relative to `σ`.
#[derive(Clone, Debug)]
pub struct FacetIncidence {
    pub sigma: usize,
    pub tau: usize,
    /// Primitive generator of the image of `τ` in `N/(N ∩ Rσ)`, in the
    /// coordinates given by the annihilator basis of `σ`.
    pub normal_class: LatticeVector,
    /// A lift of `normal_class` to `N`.
    pub lift: LatticeVector,
}

impl Fan {
    /// Validate the given cones pairwise and close them under faces.
    pub fn from_cones(rank: usize, cones: Vec<Cone>) -> Result<Fan> {
        for c in &cones {
            if c.ambient_rank() != rank {
                return Err(Error::DimensionMismatch { expected: rank, found: c.ambient_rank() });
            }
        }
        let distinct: Vec<Cone> = cones.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        let maximal: Vec<&Cone> =
            distinct.iter().filter(|c| !distinct.iter().any(|d| d != *c && c.dim() < d.dim() && c.is_face_of(d))).collect();
        for (a, b) in maximal.iter().tuple_combinations() {
            if !a.meets_properly(b) {
                return Err(Error::NotAFan { first: a.to_string(), second: b.to_string() });
            }
        }
        let mut all = BTreeSet::new();
        all.insert(Cone::zero(rank));
        for c in maximal {
            all.extend(c.faces());
        }
        Ok(Self::assemble(rank, all))
    }

    /// Fan from a ray table and maximal cones given by ray indices.
    pub fn from_ray_indices(rank: usize, rays: &[LatticeVector], cones: &[Vec<usize>]) -> Result<Fan> {
        let cones = cones
            .iter()
            .map(|ids| {
                let gens: Vec<LatticeVector> = ids.iter().map(|&i| rays[i].clone()).collect();
                Cone::new(rank, &gens)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_cones(rank, cones)
    }

    /// Build indexes for a face-closed, already validated set of cones.
    pub(crate) fn assemble(rank: usize, all: BTreeSet<Cone>) -> Fan {
        let cones: Vec<Cone> = all.into_iter().collect();
        let rays: Vec<LatticeVector> = cones.iter().filter(|c| c.dim() == 1).map(|c| c.rays()[0].clone()).collect();
        let ray_ids: Vec<Vec<usize>> =
            cones.iter().map(|c| c.rays().iter().map(|r| rays.binary_search(r).expect("ray of a face-closed set")).collect()).collect();
        let lookup = ray_ids.iter().enumerate().map(|(i, ids)| (ids.clone(), i)).collect();
        let mut dim_start = vec![0; rank + 2];
        for d in 0..=rank + 1 {
            dim_start[d] = cones.iter().take_while(|c| c.dim() < d).count();
        }
        let mut facets = vec![Vec::new(); cones.len()];
        let mut cofacets = vec![Vec::new(); cones.len()];
        for t in 0..cones.len() {
            let d = cones[t].dim();
            if d == 0 {
                continue;
            }
            for s in dim_start[d - 1]..dim_start[d] {
                if ray_ids[s].iter().all(|r| ray_ids[t].contains(r)) {
                    facets[t].push(s);
                    cofacets[s].push(t);
                }
            }
        }
        Fan { rank, rays, cones, ray_ids, lookup, dim_start, facets, cofacets }
    }

    /// The fan `{0}`.
    pub fn trivial(rank: usize) -> Fan {
        Self::assemble(rank, [Cone::zero(rank)].into_iter().collect())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rays(&self) -> &[LatticeVector] {
        &self.rays
    }

    pub fn cones(&self) -> &[Cone] {
        &self.cones
    }

    pub fn cone(&self, i: usize) -> &Cone {
        &self.cones[i]
    }

    pub fn len(&self) -> usize {
        self.cones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cones.is_empty()
    }

    /// Indices into `rays()` of the rays of cone `i`.
    pub fn ray_ids(&self, i: usize) -> &[usize] {
        &self.ray_ids[i]
    }

    /// Index of the cone spanned by the given rays (by ray index).
    pub fn index_of_ray_ids(&self, ids: &[usize]) -> Option<usize> {
        let mut key = ids.to_vec();
        key.sort_unstable();
        self.lookup.get(&key).copied()
    }

    pub fn index_of(&self, cone: &Cone) -> Option<usize> {
        if cone.ambient_rank() != self.rank {
            return None;
        }
        let ids: Option<Vec<usize>> = cone.rays().iter().map(|r| self.rays.binary_search(r).ok()).collect();
        self.lookup.get(&ids?).copied().filter(|&i| &self.cones[i] == cone)
    }

    /// Index of the one-dimensional cone through the given vector.
    pub fn ray_cone(&self, ray: &LatticeVector) -> Option<usize> {
        let p = primitive(ray).ok()?;
        let id = self.rays.binary_search(&p).ok()?;
        self.index_of_ray_ids(&[id])
    }

    /// Indices of the cones of dimension `q`.
    pub fn cones_of_dim(&self, q: usize) -> std::ops::Range<usize> {
        if q > self.rank {
            return 0..0;
        }
        self.dim_start[q]..self.dim_start[q + 1]
    }

    /// `|Δ(q)|` for `q = 0..=r`.
    pub fn f_vector(&self) -> Vec<usize> {
        (0..=self.rank).map(|q| self.cones_of_dim(q).len()).collect()
    }

    pub fn facets_of(&self, i: usize) -> &[usize] {
        &self.facets[i]
    }

    pub fn cofacets_of(&self, i: usize) -> &[usize] {
        &self.cofacets[i]
    }

    /// `a ≺ b` (faces in a fan are exactly the cones spanned by a subset of rays).
    pub fn is_face(&self, a: usize, b: usize) -> bool {
        self.ray_ids[a].iter().all(|r| self.ray_ids[b].contains(r))
    }

    pub fn is_simplicial(&self) -> bool {
        self.cones.iter().all(Cone::is_simplicial)
    }

    pub fn maximal_cones(&self) -> Vec<usize> {
        (0..self.cones.len()).filter(|&i| self.cofacets[i].is_empty()).collect()
    }

    /// Every maximal cone has dimension r.
    pub fn is_pure_full_dimensional(&self) -> bool {
        self.maximal_cones().iter().all(|&i| self.cones[i].dim() == self.rank)
    }

    /// Pairs `(facet, maximal cone)` where an (r−1)-cone lies in exactly one r-cone.
    pub fn boundary_facets(&self) -> Vec<(usize, usize)> {
        if self.rank == 0 {
            return Vec::new();
        }
        self.cones_of_dim(self.rank - 1)
            .filter_map(|f| {
                let top: Vec<usize> = self.cofacets[f].iter().copied().filter(|&t| self.cones[t].dim() == self.rank).collect();
                (top.len() == 1).then(|| (f, top[0]))
            })
            .collect()
    }

    /// `|Δ| = N_R`.
    pub fn is_complete(&self) -> bool {
        if self.rank == 0 {
            return true;
        }
        !self.cones_of_dim(self.rank).is_empty()
            && self.is_pure_full_dimensional()
            && self.cones_of_dim(self.rank - 1).all(|f| self.cofacets[f].len() == 2)
    }

    /// Inward inequalities of the boundary facets of the support.
    pub fn boundary_inequalities(&self) -> Vec<LatticeVector> {
        let mut out = BTreeSet::new();
        for (f, t) in self.boundary_facets() {
            let facet = &self.cones[f];
            let normal = self.cones[t]
                .facet_normals()
                .iter()
                .find(|m| facet.rays().iter().all(|r| m.dot(r).is_zero()))
                .expect("facet of a full-dimensional cone has a normal");
            out.insert(normal.clone());
        }
        out.into_iter().collect()
    }

    /// `|Δ|` is convex and r-dimensional.
    ///
    /// For a pure r-dimensional fan, the support is convex exactly when all
    /// rays satisfy every boundary facet inequality.
    pub fn support_is_convex_full_dimensional(&self) -> bool {
        if self.rank == 0 {
            return true;
        }
        if self.cones_of_dim(self.rank).is_empty() || !self.is_pure_full_dimensional() {
            return false;
        }
        let ineqs = self.boundary_inequalities();
        self.rays.iter().all(|r| ineqs.iter().all(|m| !m.dot(r).is_negative()))
    }

    /// Whether `v` lies in the interior of a convex support.
    pub fn support_interior_contains(&self, v: &LatticeVector) -> bool {
        let ineqs = self.boundary_inequalities();
        let inside = self.cones_of_dim(self.rank).any(|t| self.cones[t].contains(v));
        inside && ineqs.iter().all(|m| m.dot(v).is_positive())
    }

    /// `Star_σ(Δ) = {τ ∈ Δ : σ ≺ τ}`.
    pub fn star(&self, sigma: usize) -> Vec<usize> {
        (0..self.cones.len()).filter(|&t| self.is_face(sigma, t)).collect()
    }

    pub fn facet_incidence(&self, sigma: usize, tau: usize) -> Result<FacetIncidence> {
        let (s, t) = (&self.cones[sigma], &self.cones[tau]);
        if t.dim() != s.dim() + 1 || !self.is_face(sigma, tau) {
            return Err(Error::Identity(format!("{s} is not a facet of {t}")));
        }
        let proj = LatticeMatrix::from_rows(self.rank, s.annihilator());
        let outside = t.rays().iter().find(|r| !s.rays().contains(r)).expect("tau has a ray outside sigma");
        let normal_class = primitive(&proj.apply(outside))?;
        let lift = right_inverse(&proj).expect("annihilator basis is saturated").apply(&normal_class);
        Ok(FacetIncidence { sigma, tau, normal_class, lift })
    }

    /// Sorted list of maximal cones as ray-index lists.
    pub fn maximal_ray_ids(&self) -> Vec<Vec<usize>> {
        self.maximal_cones().into_iter().filter(|&i| self.cones[i].dim() > 0).map(|i| self.ray_ids[i].clone()).collect()
    }

    /// One-line description used by the CLI.
    pub fn summary(&self) -> String {
        let kind = match (self.is_complete(), self.is_simplicial()) {
            (true, true) => "complete simplicial",
            (true, false) => "complete non-simplicial",
            (false, true) => "simplicial",
            (false, false) => "non-simplicial",
        };
        format!("{kind}, r={}, f-vector ({})", self.rank, self.f_vector().iter().join(","))
    }
}

impl PartialEq for Fan {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && self.cones == other.cones
    }
}

impl Eq for Fan {}

impl fmt::Debug for Fan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fan(rank {}, maximal {:?})", self.rank, self.maximal_cones().iter().map(|&i| &self.cones[i]).collect::<Vec<_>>())
    }
}
