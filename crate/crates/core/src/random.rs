//! Seeded random fans and the invariant checks run on them.

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exterior::{annihilator_basis, contraction_matrix, interior_product_matrix, Multivector};
use crate::homology::{checked_rank, cohomology, euler_characteristic, euler_oracle, CohomologyGroup};
use crate::ishida::build_ishida;
use crate::linalg::{primitive, LatticeMatrix, LatticeVector};
use crate::polyhedral::{projective_space_fan, star_subdivision, transform_fan, Cone, Fan};

/// Deterministic generator for case `index` of a run started with `seed`.
pub fn case_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ index)
}

pub fn random_vector(rng: &mut impl Rng, rank: usize, bound: i64) -> LatticeVector {
    LatticeVector((0..rank).map(|_| BigInt::from(rng.gen_range(-bound..=bound))).collect())
}

pub fn random_primitive(rng: &mut impl Rng, rank: usize, bound: i64) -> LatticeVector {
    loop {
        let v = random_vector(rng, rank, bound);
        if let Ok(p) = primitive(&v) {
            return p;
        }
    }
}

/// A simplicial cone on `k` random linearly independent primitive vectors.
pub fn random_simplicial_cone(rng: &mut impl Rng, rank: usize, k: usize, bound: i64) -> Cone {
    assert!(k <= rank);
    loop {
        let gens: Vec<LatticeVector> = (0..k).map(|_| random_primitive(rng, rank, bound)).collect();
        if LatticeMatrix::from_rows(rank, &gens).rational_rank() != k {
            continue;
        }
        if let Ok(c) = Cone::new(rank, &gens) {
            if c.rays().len() == k {
                return c;
            }
        }
    }
}

/// Random simplicial fan: random primitive rays, then greedy insertion of
/// random simplicial cones compatible with those already accepted.
pub fn random_simplicial_fan(rng: &mut impl Rng, rank: usize, n_rays: usize, attempts: usize, bound: i64) -> Fan {
    if rank == 0 {
        return Fan::trivial(0);
    }
    let mut rays: Vec<LatticeVector> = Vec::new();
    for _ in 0..20 * n_rays.max(1) {
        if rays.len() >= n_rays.max(1) {
            break;
        }
        let v = random_primitive(rng, rank, bound);
        if !rays.contains(&v) {
            rays.push(v);
        }
    }
    let mut accepted: Vec<Cone> = Vec::new();
    for _ in 0..attempts {
        let k = rng.gen_range(1..=rank.min(rays.len()));
        let gens: Vec<LatticeVector> = rays.choose_multiple(rng, k).cloned().collect();
        if LatticeMatrix::from_rows(rank, &gens).rational_rank() != k {
            continue;
        }
        let Ok(cone) = Cone::new(rank, &gens) else { continue };
        if accepted.iter().any(|c| cone.is_face_of(c)) {
            continue;
        }
        if accepted.iter().all(|c| c.meets_properly(&cone)) {
            accepted.retain(|c| !c.is_face_of(&cone));
            accepted.push(cone);
        }
    }
    Fan::from_cones(rank, accepted).expect("greedy insertion keeps a fan")
}

/// Complete simplicial rank-2 fan from `P²` by `steps` random stellar
/// subdivisions of 2-cones.
pub fn random_complete_rank2(rng: &mut impl Rng, steps: usize) -> Fan {
    let mut fan = projective_space_fan(2);
    for _ in 0..steps {
        let tops: Vec<usize> = fan.cones_of_dim(2).collect();
        let t = *tops.choose(rng).expect("complete fan has 2-cones");
        let rays = fan.cone(t).rays();
        let (a, b) = (BigInt::from(rng.gen_range(1..=2)), BigInt::from(rng.gen_range(1..=2)));
        let v = primitive(&rays[0].scaled(&a).add(&rays[1].scaled(&b))).expect("interior vector is nonzero");
        fan = star_subdivision(&fan, &v).expect("subdividing a complete fan at an interior vector");
    }
    fan
}

/// Random matrix of determinant ±1.
pub fn random_unimodular(rng: &mut impl Rng, rank: usize, steps: usize) -> LatticeMatrix {
    let mut g = LatticeMatrix::identity(rank);
    if rank < 2 {
        if rank == 1 && rng.gen_bool(0.5) {
            g = g.neg();
        }
        return g;
    }
    for _ in 0..steps {
        let i = rng.gen_range(0..rank);
        let mut j = rng.gen_range(0..rank - 1);
        if j >= i {
            j += 1;
        }
        let c = BigInt::from(rng.gen_range(-2..=2));
        let mut e = LatticeMatrix::identity(rank);
        e[(i, j)] = c;
        g = &e * &g;
    }
    g
}

/// Same fan, maximal cones listed with a shuffled ray table.
pub fn reorder_rays(fan: &Fan, rng: &mut impl Rng) -> Fan {
    let mut perm: Vec<usize> = (0..fan.rays().len()).collect();
    perm.shuffle(rng);
    let rays: Vec<LatticeVector> = perm.iter().map(|&i| fan.rays()[i].clone()).collect();
    let inverse: Vec<usize> = {
        let mut inv = vec![0; perm.len()];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        inv
    };
    let mut cones: Vec<Vec<usize>> = fan.maximal_ray_ids().iter().map(|c| c.iter().map(|&i| inverse[i]).rev().collect()).collect();
    cones.shuffle(rng);
    Fan::from_ray_indices(fan.rank(), &rays, &cones).expect("reordered fan is valid")
}

fn table_of(fan: &Fan) -> Result<Vec<Vec<CohomologyGroup>>> {
    (0..=fan.rank()).map(|p| cohomology(&build_ishida(fan, p)?)).collect()
}

/// Checks every invariant and returns a description of each failure.
pub fn check_invariants(fan: &Fan, rng: &mut impl Rng) -> Vec<String> {
    let mut failures = Vec::new();
    let r = fan.rank();

    // δ∘δ = 0 is asserted inside the build; two-method ranks inside cohomology
    let table = match table_of(fan) {
        Ok(t) => t,
        Err(e) => {
            failures.push(format!("build: {e}"));
            return failures;
        }
    };
    for (p, groups) in table.iter().enumerate() {
        let cx = build_ishida(fan, p).expect("built above");
        let chi: i64 = groups.iter().enumerate().map(|(q, g)| if q % 2 == 0 { 1 } else { -1 } * g.free_rank as i64).sum();
        if chi != euler_characteristic(&cx) {
            failures.push(format!("Euler characteristic of the complex differs at p={p}"));
        }
        if fan.is_simplicial() && Some(chi) != euler_oracle(fan, p).ok() {
            failures.push(format!("Euler oracle disagrees at p={p}"));
        }
        for d in &cx.coboundaries {
            if let Err(e) = checked_rank(d) {
                failures.push(format!("p={p}: {e}"));
            }
        }
    }

    // lift independence: shifting n by N ∩ Rσ leaves the contraction unchanged
    for s in 0..fan.len() {
        for &t in fan.cofacets_of(s) {
            let Ok(inc) = fan.facet_incidence(s, t) else {
                failures.push("facet incidence".into());
                continue;
            };
            let shift = fan.cone(s).rays().iter().fold(LatticeVector::zero(r), |acc, v| acc.add(&v.scaled(&BigInt::from(rng.gen_range(-3..=3)))));
            let moved = inc.lift.add(&shift);
            let src = annihilator_basis(fan.cone(s));
            let dst = annihilator_basis(fan.cone(t));
            for k in 0..=src.rank() {
                let a = contraction_matrix(fan, &inc, k);
                let b = interior_product_matrix(&src, &dst, &moved, k);
                match (a, b) {
                    (Ok(a), Ok(b)) if a == b => {}
                    _ => failures.push(format!("contraction depends on the lift for {} < {}", fan.cone(s), fan.cone(t))),
                }
            }
        }
    }

    // Leibniz: ι(a∧b) = ι(a)∧b + (−1)^{deg a} a∧ι(b)
    if r > 0 {
        let n = random_vector(rng, r, 3);
        let deg_a = rng.gen_range(0..=r);
        let deg_b = rng.gen_range(0..=r - deg_a);
        let a = Multivector::decomposable(&(0..deg_a).map(|_| random_vector(rng, r, 3)).collect::<Vec<_>>());
        let b = Multivector::decomposable(&(0..deg_b).map(|_| random_vector(rng, r, 3)).collect::<Vec<_>>());
        let lhs = a.wedge(&b).interior(&n);
        let sign = if deg_a % 2 == 0 { BigInt::from(1) } else { BigInt::from(-1) };
        let rhs = a.interior(&n).wedge(&b).add(&a.wedge(&b.interior(&n)).scale(&sign));
        if lhs != rhs {
            failures.push("Leibniz identity for the interior product".into());
        }
        if !a.interior(&n).interior(&n).is_zero() {
            failures.push("interior product does not square to zero".into());
        }
    }

    // different input order and a unimodular change of coordinates
    let reordered = reorder_rays(fan, rng);
    match table_of(&reordered) {
        Ok(t) if t == table => {}
        _ => failures.push("cohomology changed under ray reordering".into()),
    }
    let g = random_unimodular(rng, r, 2 * r + 2);
    match transform_fan(fan, &g).and_then(|f| table_of(&f)) {
        Ok(t) if t == table => {}
        Ok(_) => failures.push("cohomology changed under a unimodular change of basis".into()),
        Err(e) => failures.push(format!("transformed fan: {e}")),
    }
    failures
}

/// One fuzz case: the generated fan and the invariant failures found.
#[derive(Clone, Debug)]
pub struct FuzzCase {
    pub index: u64,
    pub fan: Fan,
    pub failures: Vec<String>,
}

/// Generate `count` random simplicial fans of the given rank from `seed` and
/// check every invariant.
pub fn fuzz(seed: u64, count: u64, rank: usize) -> Result<Vec<FuzzCase>> {
    if rank > 4 {
        return Err(Error::Format(format!("fuzzing supports rank 0..=4, got {rank}")));
    }
    Ok((0..count)
        .map(|index| {
            let mut rng = case_rng(seed, index);
            let n_rays = rng.gen_range(1..=2 * rank + 2);
            let fan = random_simplicial_fan(&mut rng, rank, n_rays, 6 * rank + 4, 2);
            let failures = check_invariants(&fan, &mut rng);
            FuzzCase { index, fan, failures }
        })
        .collect())
}
