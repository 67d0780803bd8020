//! Fan constructions: standard builders, star removal, the quotient fan
//! along a ray, graph fans of a piecewise-linear function, and completion
//! of a fan with convex support.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::cone::Cone;
use super::fan::Fan;
use crate::error::{Error, Result};
use crate::linalg::{primitive, LatticeMatrix, LatticeVector};

/// Fan of `P^r`: rays `e_1..e_r, -(e_1+..+e_r)`, all r-subsets as cones.
pub fn projective_space_fan(r: usize) -> Fan {
    let mut rays: Vec<LatticeVector> = (0..r).map(|i| LatticeVector::unit(r, i)).collect();
    rays.push(LatticeVector(vec![-BigInt::one(); r]));
    let cones: Vec<Vec<usize>> = (0..=r).combinations(r).collect();
    Fan::from_ray_indices(r, &rays, &cones).expect("projective space fan is valid")
}

/// Hirzebruch surface `F_a`: rays (1,0), (0,1), (-1,a), (0,-1).
pub fn hirzebruch_fan(a: i64) -> Fan {
    let rays = [[1, 0], [0, 1], [-1, a], [0, -1]].map(|r| LatticeVector::from_i64s(&r));
    Fan::from_ray_indices(2, &rays, &[vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]]).expect("Hirzebruch fan is valid")
}

/// `Γ_π`: all faces of a single cone.
pub fn gamma_pi(cone: &Cone) -> Fan {
    Fan::from_cones(cone.ambient_rank(), vec![cone.clone()]).expect("faces of one cone form a fan")
}

/// Product fan in `N_1 ⊕ N_2`.
pub fn product_fan(f1: &Fan, f2: &Fan) -> Fan {
    let (r1, r2) = (f1.rank(), f2.rank());
    let embed = |v: &LatticeVector, first: bool| {
        let mut out = LatticeVector::zero(r1 + r2);
        let off = if first { 0 } else { r1 };
        for (i, e) in v.entries().iter().enumerate() {
            out.0[off + i] = e.clone();
        }
        out
    };
    let mut cones = Vec::new();
    for a in f1.maximal_cones() {
        for b in f2.maximal_cones() {
            let gens: Vec<LatticeVector> =
                f1.cone(a).rays().iter().map(|v| embed(v, true)).chain(f2.cone(b).rays().iter().map(|v| embed(v, false))).collect();
            cones.push(Cone::new(r1 + r2, &gens).expect("product of strongly convex cones"));
        }
    }
    Fan::from_cones(r1 + r2, cones).expect("product of fans is a fan")
}

/// Image of a fan under `v ↦ g·v` for a unimodular `g`.
pub fn transform_fan(fan: &Fan, g: &LatticeMatrix) -> Result<Fan> {
    if g.nrows() != fan.rank() || g.ncols() != fan.rank() || !g.determinant().abs().is_one() {
        return Err(Error::Identity("transformation is not unimodular".into()));
    }
    let cones = fan
        .maximal_cones()
        .into_iter()
        .map(|i| {
            let gens: Vec<LatticeVector> = fan.cone(i).rays().iter().map(|v| g.apply(v)).collect();
            Cone::new(fan.rank(), &gens)
        })
        .collect::<Result<Vec<_>>>()?;
    Fan::from_cones(fan.rank(), cones)
}

/// Stellar subdivision at `v`: every maximal cone containing `v` is replaced
/// by the cones spanned by `v` and its facets not containing `v`.
pub fn star_subdivision(fan: &Fan, v: &LatticeVector) -> Result<Fan> {
    let v = primitive(v)?;
    let mut cones = Vec::new();
    for i in fan.maximal_cones() {
        let c = fan.cone(i);
        if !c.contains(&v) || c.rays().contains(&v) {
            cones.push(c.clone());
            continue;
        }
        for f in c.faces() {
            if f.contains(&v) {
                continue;
            }
            let mut gens = f.rays().to_vec();
            gens.push(v.clone());
            let new = Cone::new(fan.rank(), &gens)?;
            if new.dim() == f.dim() + 1 {
                cones.push(new);
            }
        }
    }
    Fan::from_cones(fan.rank(), cones)
}

/// `Δ̃ \ Star_ρ(Δ̃)`.
pub fn star_removal(tilde: &Fan, rho: usize) -> Result<Fan> {
    if tilde.cone(rho).dim() != 1 {
        return Err(Error::NotARay(tilde.cone(rho).to_string()));
    }
    let kept: Vec<Cone> = (0..tilde.len()).filter(|&t| !tilde.is_face(rho, t)).map(|t| tilde.cone(t).clone()).collect();
    Fan::from_cones(tilde.rank(), kept)
}

/// The fan `Σ̄` of images of `Star_ρ(Δ̃)` in `N̄ = N / Z(N ∩ ρ)`.
#[derive(Clone, Debug)]
pub struct QuotientFan {
    pub fan: Fan,
    /// `(r−1) × r`, rows a basis of `M̄ = M ∩ ρ^⊥`.
    pub projection: LatticeMatrix,
    /// Index in the original fan ↦ index of its image.
    pub image_of: BTreeMap<usize, usize>,
}

pub fn quotient_fan(tilde: &Fan, rho: usize) -> Result<QuotientFan> {
    let ray_cone = tilde.cone(rho);
    if ray_cone.dim() != 1 {
        return Err(Error::NotARay(ray_cone.to_string()));
    }
    let rho_vec = &ray_cone.rays()[0];
    let projection = LatticeMatrix::from_rows(tilde.rank(), ray_cone.annihilator());
    let qr = tilde.rank() - 1;
    let star = tilde.star(rho);
    let mut images = BTreeMap::new();
    for &s in &star {
        let gens: Vec<LatticeVector> = tilde.cone(s).rays().iter().filter(|r| *r != rho_vec).map(|r| projection.apply(r)).collect();
        images.insert(s, Cone::new(qr, &gens)?);
    }
    let fan = Fan::from_cones(qr, images.values().cloned().collect())?;
    let image_of = images.into_iter().map(|(s, c)| (s, fan.index_of(&c).expect("image cone lies in the quotient fan"))).collect();
    Ok(QuotientFan { fan, projection, image_of })
}

/// `Φ̃ ⊃ Φ ⊃ Φ♭` built from a complete simplicial fan `Σ̄` and integer values
/// of a `Σ̄`-piecewise-linear function on its rays, in `N = N̄ ⊕ Z·n₀` with
/// `n₀` the last coordinate vector.
#[derive(Clone, Debug)]
pub struct GraphFans {
    pub phi_tilde: Fan,
    pub phi: Fan,
    pub phi_flat: Fan,
    /// Index in `Φ̃` of `ρ = R≥0(−n₀)`.
    pub rho: usize,
}

pub fn graph_fans(sigma_bar: &Fan, eta: &[BigInt]) -> Result<GraphFans> {
    if !sigma_bar.is_complete() || !sigma_bar.is_simplicial() {
        return Err(Error::Hypothesis("complete simplicial (graph fans need a complete simplicial base)".into()));
    }
    if eta.len() != sigma_bar.rays().len() {
        return Err(Error::Format(format!("eta has {} values for {} rays", eta.len(), sigma_bar.rays().len())));
    }
    let qr = sigma_bar.rank();
    let r = qr + 1;
    let lift = |v: &LatticeVector, h: BigInt| {
        let mut out = v.0.clone();
        out.push(h);
        LatticeVector(out)
    };
    let n0 = LatticeVector::unit(r, qr);
    let mut flat = Vec::new();
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for i in sigma_bar.maximal_cones() {
        let gens: Vec<LatticeVector> = sigma_bar.ray_ids(i).iter().map(|&k| lift(&sigma_bar.rays()[k], eta[k].clone())).collect();
        flat.push(Cone::new(r, &gens)?);
        let mut up = gens.clone();
        up.push(n0.clone());
        upper.push(Cone::new(r, &up)?);
        let mut down = gens;
        down.push(n0.neg());
        lower.push(Cone::new(r, &down)?);
    }
    let phi_flat = Fan::from_cones(r, flat.clone())?;
    let phi = Fan::from_cones(r, upper.clone())?;
    let phi_tilde = Fan::from_cones(r, upper.into_iter().chain(lower).collect())?;
    let rho = phi_tilde.ray_cone(&n0.neg()).expect("−n₀ is a ray of Φ̃");
    Ok(GraphFans { phi_tilde, phi, phi_flat, rho })
}

/// A complete simplicial fan `Δ̃` with a ray `ρ` such that `Δ = Δ̃ \ Star_ρ(Δ̃)`.
#[derive(Clone, Debug)]
pub struct Completion {
    pub tilde: Fan,
    pub rho: usize,
    /// Primitive generator of `ρ`; `−n°` lies in the interior of `|Δ|`.
    pub n_circ: LatticeVector,
}

pub fn complete_from_convex(delta: &Fan) -> Result<Completion> {
    if !delta.is_simplicial() {
        return Err(Error::Hypothesis("simplicial".into()));
    }
    if delta.is_complete() {
        return Err(Error::Hypothesis("incomplete (fan is already complete)".into()));
    }
    if !delta.support_is_convex_full_dimensional() {
        return Err(Error::Hypothesis("of convex full-dimensional support".into()));
    }
    let r = delta.rank();
    let ineqs = delta.boundary_inequalities();
    let sum_all = delta.rays().iter().fold(LatticeVector::zero(r), |acc, v| acc.add(v));
    let sum_weighted = delta
        .cones_of_dim(r)
        .flat_map(|t| delta.cone(t).rays().to_vec())
        .fold(LatticeVector::zero(r), |acc, v| acc.add(&v));
    let interior = [sum_all, sum_weighted]
        .into_iter()
        .find(|p| !p.is_zero() && delta.support_interior_contains(p))
        .ok_or_else(|| Error::Identity("no interior point of the support found".into()))?;
    let n_circ = primitive(&interior.neg())?;
    let boundary: Vec<usize> = (0..delta.len())
        .filter(|&s| ineqs.iter().any(|m| delta.cone(s).rays().iter().all(|v| m.dot(v).is_zero())))
        .collect();
    let mut cones: Vec<Cone> = delta.maximal_cones().into_iter().map(|i| delta.cone(i).clone()).collect();
    for s in boundary {
        let mut gens = delta.cone(s).rays().to_vec();
        gens.push(n_circ.clone());
        cones.push(Cone::new(r, &gens)?);
    }
    let tilde = Fan::from_cones(r, cones)?;
    let rho = tilde.ray_cone(&n_circ).expect("n° spans a ray of the completion");
    if !tilde.is_complete() || !tilde.is_simplicial() {
        return Err(Error::Identity("completion is not complete simplicial".into()));
    }
    let removed = star_removal(&tilde, rho)?;
    if &removed != delta {
        return Err(Error::Identity("completion minus the star of rho differs from the input".into()));
    }
    Ok(Completion { tilde, rho, n_circ })
}

/// Ray-set equality of two fans after mapping by `g`; used to compare fans up
/// to a lattice automorphism.
pub fn fans_equal_under(a: &Fan, b: &Fan, g: &LatticeMatrix) -> bool {
    let mapped: BTreeSet<Vec<LatticeVector>> = a
        .maximal_cones()
        .into_iter()
        .map(|i| {
            let mut rays: Vec<LatticeVector> = a.cone(i).rays().iter().map(|v| g.apply(v)).collect();
            rays.sort();
            rays
        })
        .collect();
    let target: BTreeSet<Vec<LatticeVector>> = b.maximal_cones().into_iter().map(|i| b.cone(i).rays().to_vec()).collect();
    mapped == target
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(e: &[i64]) -> LatticeVector {
        LatticeVector::from_i64s(e)
    }

    fn ints(e: &[i64]) -> Vec<BigInt> {
        e.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn builders_are_complete() {
        assert_eq!(projective_space_fan(1).f_vector(), vec![1, 2]);
        assert_eq!(projective_space_fan(3).f_vector(), vec![1, 4, 6, 4]);
        for a in 0..4 {
            let f = hirzebruch_fan(a);
            assert!(f.is_complete() && f.is_simplicial());
            assert_eq!(f.f_vector(), vec![1, 4, 4]);
        }
        let p1p1 = product_fan(&projective_space_fan(1), &projective_space_fan(1));
        assert_eq!(p1p1.f_vector(), vec![1, 4, 4]);
        assert!(p1p1.is_complete());
    }

    #[test]
    fn star_removal_examples() {
        let p2 = projective_space_fan(2);
        let e1 = p2.ray_cone(&v(&[1, 0])).unwrap();
        let d = star_removal(&p2, e1).unwrap();
        assert_eq!(d.f_vector(), vec![1, 2, 1]);
        assert!(d.ray_cone(&v(&[0, 1])).is_some() && d.ray_cone(&v(&[-1, -1])).is_some());

        let p1 = projective_space_fan(1);
        let plus = p1.ray_cone(&v(&[1])).unwrap();
        let d = star_removal(&p1, plus).unwrap();
        assert_eq!(d.rays(), &[v(&[-1])]);

        let g = gamma_pi(&Cone::from_i64s(1, &[&[1]]).unwrap());
        let d = star_removal(&g, 1).unwrap();
        assert_eq!(d, Fan::trivial(1));
    }

    #[test]
    fn star_and_removal_partition() {
        let f = hirzebruch_fan(2);
        for rho in f.cones_of_dim(1) {
            let removed = star_removal(&f, rho).unwrap();
            assert_eq!(removed.len() + f.star(rho).len(), f.len());
        }
    }

    #[test]
    fn quotient_examples() {
        let p2 = projective_space_fan(2);
        let rho = p2.ray_cone(&v(&[-1, -1])).unwrap();
        let q = quotient_fan(&p2, rho).unwrap();
        assert!(q.fan.is_complete());
        assert_eq!(q.fan.f_vector(), vec![1, 2]);

        let p1 = projective_space_fan(1);
        let q = quotient_fan(&p1, p1.ray_cone(&v(&[1])).unwrap()).unwrap();
        assert_eq!(q.fan, Fan::trivial(0));

        let p1p1 = product_fan(&projective_space_fan(1), &projective_space_fan(1));
        let q = quotient_fan(&p1p1, p1p1.ray_cone(&v(&[0, 1])).unwrap()).unwrap();
        assert_eq!(q.fan, projective_space_fan(1));
    }

    #[test]
    fn graph_fans_flat_eta() {
        let p1 = projective_space_fan(1);
        let g = graph_fans(&p1, &ints(&[0, 0])).unwrap();
        assert_eq!(g.phi_flat.f_vector(), vec![1, 2, 0]);
        assert_eq!(g.phi.f_vector(), vec![1, 3, 2]);
        assert_eq!(g.phi_tilde.len(), 9);
        let p1p1 = product_fan(&p1, &p1);
        assert_eq!(g.phi_tilde, p1p1);
    }

    #[test]
    fn graph_fans_give_hirzebruch_one() {
        // rays of P¹ are sorted as (-1), (1)
        let p1 = projective_space_fan(1);
        assert_eq!(p1.rays(), &[v(&[-1]), v(&[1])]);
        let g = graph_fans(&p1, &ints(&[0, -1])).unwrap();
        assert!(g.phi_tilde.is_complete());
        // (x, y) ↦ (x, -x - y) carries the graph fan onto the standard F_1 rays
        let map = LatticeMatrix::from_i64_rows(2, &[&[1, 0], &[-1, -1]]);
        assert!(fans_equal_under(&g.phi_tilde, &hirzebruch_fan(1), &map));
        assert!(!fans_equal_under(&g.phi_tilde, &hirzebruch_fan(0), &map));
    }

    #[test]
    fn completion_of_half_plane() {
        let rays = [v(&[1, 0]), v(&[0, 1]), v(&[-1, 0])];
        let d = Fan::from_ray_indices(2, &rays, &[vec![0, 1], vec![1, 2]]).unwrap();
        let c = complete_from_convex(&d).unwrap();
        assert_eq!(c.n_circ, v(&[0, -1]));
        assert!(c.tilde.is_complete());
        assert_eq!(c.tilde.f_vector(), vec![1, 4, 4]);
        assert!(complete_from_convex(&projective_space_fan(2)).is_err());
    }

    #[test]
    fn completion_of_single_cone() {
        let g = gamma_pi(&Cone::from_i64s(2, &[&[1, 0], &[0, 1]]).unwrap());
        let c = complete_from_convex(&g).unwrap();
        assert!(c.tilde.is_complete());
        let pi = g.cone(g.cones_of_dim(2).start);
        assert!(pi.relint_contains(&c.n_circ.neg()));
    }

    #[test]
    fn stellar_subdivision_of_p2() {
        let f = star_subdivision(&projective_space_fan(2), &v(&[1, 1])).unwrap();
        assert!(f.is_complete());
        assert_eq!(f.f_vector(), vec![1, 4, 4]);
        let f3 = star_subdivision(&projective_space_fan(3), &v(&[1, 1, 0])).unwrap();
        assert!(f3.is_complete() && f3.is_simplicial());
        assert_eq!(f3.f_vector(), vec![1, 5, 9, 6]);
    }
}
