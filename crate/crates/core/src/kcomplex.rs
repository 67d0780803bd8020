//! The orientation-twisted double complex
//! `K^{i,j} = ⊕_{φ∈Δ(r−i)} ⊕_{σ∈Δ(j), σ≺φ} Λ^{p−j}(M ∩ σ^⊥) ⊗ (det φ)^{−1}`
//! of a complete simplicial fan, over Q.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exterior::{contraction_matrix, wedge_dim, Multivector};
use crate::homology::{map_degrees, rational_ranks, Check, ComputeOptions, Report, Verdict};
use crate::ishida::build_ishida;
use crate::linalg::{LatticeMatrix, LatticeVector, RationalMatrix};
use crate::polyhedral::Fan;

/// `det φ = Λ^{dim φ}(N ∩ Rφ)` with generator the wedge of the primitive rays
/// of `φ` in canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrientationModule {
    pub cone: usize,
    pub generator: Vec<LatticeVector>,
}

impl OrientationModule {
    pub fn new(fan: &Fan, cone: usize) -> Self {
        OrientationModule { cone, generator: fan.cone(cone).rays().to_vec() }
    }

    pub fn wedge(&self) -> Multivector {
        Multivector::decomposable(&self.generator)
    }
}

/// The rational `c` with `n ∧ gen ψ = c · gen φ`, where `n ∈ N ∩ Rφ` lifts
/// the primitive normal class of `φ` relative to its facet `ψ`.
pub fn orientation_map(fan: &Fan, psi: usize, phi: usize) -> Result<BigRational> {
    let (s, t) = (fan.cone(psi), fan.cone(phi));
    if !s.is_simplicial() || !t.is_simplicial() {
        return Err(Error::Hypothesis("simplicial".into()));
    }
    let inc = fan.facet_incidence(psi, phi)?;
    let outside = t.rays().iter().find(|v| !s.rays().contains(v)).expect("facet misses one ray");
    // the class of `outside` is `index` times the primitive normal class
    let proj = LatticeMatrix::from_rows(fan.rank(), s.annihilator());
    let image = proj.apply(outside);
    let index = image.content();
    if inc.normal_class.scaled(&index) != image {
        return Err(Error::Identity("normal class is not a multiple of the ray image".into()));
    }
    let lhs = Multivector::from_vector(outside).wedge(&OrientationModule::new(fan, psi).wedge());
    let rhs = OrientationModule::new(fan, phi).wedge();
    let (key, denom) = rhs.terms().iter().next().ok_or_else(|| Error::Identity("zero orientation generator".into()))?;
    let numer = lhs.terms().get(key).cloned().unwrap_or_else(BigInt::zero);
    let ratio = BigRational::new(numer, denom.clone());
    let check = rhs.scale(ratio.numer()).add(&lhs.scale(&-ratio.denom()));
    if !check.is_zero() {
        return Err(Error::Identity("n ∧ gen ψ is not proportional to gen φ".into()));
    }
    Ok(ratio / BigRational::from_integer(index))
}

/// One summand `(φ, σ)` of `K^{i,j}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KBlock {
    pub phi: usize,
    pub sigma: usize,
    pub offset: usize,
    pub len: usize,
}

/// `K^{i,j}` for `0 ≤ i, j ≤ r` with `d′: K^{i,j} → K^{i+1,j}` and
/// `d″: K^{i,j} → K^{i,j+1}`.
#[derive(Clone, Debug)]
pub struct DoubleComplex {
    pub rank: usize,
    pub p: usize,
    pub blocks: Vec<Vec<Vec<KBlock>>>,
    pub dims: Vec<Vec<usize>>,
    pub d_prime: Vec<Vec<RationalMatrix>>,
    pub d_second: Vec<Vec<RationalMatrix>>,
}

fn set_rational_block(m: &mut RationalMatrix, r0: usize, c0: usize, block: &LatticeMatrix, scale: &BigRational) {
    for i in 0..block.nrows() {
        for j in 0..block.ncols() {
            m[(r0 + i, c0 + j)] = BigRational::from_integer(block[(i, j)].clone()) * scale;
        }
    }
}

pub fn build_k(fan: &Fan, p: usize) -> Result<DoubleComplex> {
    if !fan.is_simplicial() {
        return Err(Error::Hypothesis("simplicial".into()));
    }
    if !fan.is_complete() {
        return Err(Error::Hypothesis("complete".into()));
    }
    let r = fan.rank();
    if p > r {
        return Err(Error::DegreeOutOfRange { p, rank: r });
    }
    let mut blocks = vec![vec![Vec::new(); r + 1]; r + 1];
    let mut dims = vec![vec![0; r + 1]; r + 1];
    for i in 0..=r {
        for phi in fan.cones_of_dim(r - i) {
            for j in 0..=r - i {
                for sigma in fan.cones_of_dim(j).filter(|&s| fan.is_face(s, phi)) {
                    let len = wedge_dim(r - j, p as isize - j as isize);
                    blocks[i][j].push(KBlock { phi, sigma, offset: dims[i][j], len });
                    dims[i][j] += len;
                }
            }
        }
    }
    let dim = |i: usize, j: usize| if i <= r && j <= r { dims[i][j] } else { 0 };
    let find = |i: usize, j: usize, phi: usize, sigma: usize| blocks[i][j].iter().find(|b| b.phi == phi && b.sigma == sigma);

    let mut d_prime = Vec::with_capacity(r + 1);
    let mut d_second = Vec::with_capacity(r + 1);
    for i in 0..=r {
        let mut row_p = Vec::with_capacity(r + 1);
        let mut row_s = Vec::with_capacity(r + 1);
        for j in 0..=r {
            let mut dp = RationalMatrix::zeros(dim(i + 1, j), dims[i][j]);
            let mut ds = RationalMatrix::zeros(dim(i, j + 1), dims[i][j]);
            let sign = if j % 2 == 0 { BigRational::one() } else { -BigRational::one() };
            for b in &blocks[i][j] {
                if b.len == 0 {
                    continue;
                }
                if i < r {
                    for &psi in fan.facets_of(b.phi) {
                        if let Some(t) = find(i + 1, j, psi, b.sigma) {
                            let c = orientation_map(fan, psi, b.phi)? * &sign;
                            set_rational_block(&mut dp, t.offset, b.offset, &LatticeMatrix::identity(b.len), &c);
                        }
                    }
                }
                if j < r {
                    for &tau in fan.cofacets_of(b.sigma) {
                        if let Some(t) = find(i, j + 1, b.phi, tau) {
                            let inc = fan.facet_incidence(b.sigma, tau)?;
                            let block = contraction_matrix(fan, &inc, p - j)?;
                            set_rational_block(&mut ds, t.offset, b.offset, &block, &BigRational::one());
                        }
                    }
                }
            }
            row_p.push(dp);
            row_s.push(ds);
        }
        d_prime.push(row_p);
        d_second.push(row_s);
    }
    let k = DoubleComplex { rank: r, p, blocks, dims, d_prime, d_second };
    k.check_identities()?;
    Ok(k)
}

impl DoubleComplex {
    /// `(d′)² = (d″)² = d′d″ + d″d′ = 0`.
    pub fn check_identities(&self) -> Result<()> {
        let r = self.rank;
        for i in 0..=r {
            for j in 0..=r {
                if i + 1 < r + 1 && !self.d_prime[i + 1][j].mul(&self.d_prime[i][j]).is_zero() {
                    return Err(Error::Identity(format!("(d')^2 != 0 at ({i},{j})")));
                }
                if j + 1 < r + 1 && !self.d_second[i][j + 1].mul(&self.d_second[i][j]).is_zero() {
                    return Err(Error::Identity(format!("(d'')^2 != 0 at ({i},{j})")));
                }
                if i < r && j < r {
                    let a = self.d_second[i + 1][j].mul(&self.d_prime[i][j]);
                    let b = self.d_prime[i][j + 1].mul(&self.d_second[i][j]);
                    if !a.add(&b).is_zero() {
                        return Err(Error::Identity(format!("d'd'' + d''d' != 0 at ({i},{j})")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Total complex `T^k = ⊕_{i+j=k} K^{i,j}` with differential `d′ + d″`.
    pub fn total(&self) -> (Vec<usize>, Vec<RationalMatrix>) {
        let r = self.rank;
        let n = 2 * r + 1;
        let offsets: Vec<Vec<usize>> = (0..n)
            .map(|k| {
                let mut acc = 0;
                (0..=r)
                    .map(|i| {
                        let o = acc;
                        if k >= i && k - i <= r {
                            acc += self.dims[i][k - i];
                        }
                        o
                    })
                    .collect()
            })
            .collect();
        let tdims: Vec<usize> =
            (0..n).map(|k| (0..=r).filter(|&i| k >= i && k - i <= r).map(|i| self.dims[i][k - i]).sum()).collect();
        let mut diffs = Vec::with_capacity(n);
        for k in 0..n {
            let next = if k + 1 < n { tdims[k + 1] } else { 0 };
            let mut d = RationalMatrix::zeros(next, tdims[k]);
            for i in (0..=r).filter(|&i| k >= i && k - i <= r) {
                let j = k - i;
                let col0 = offsets[k][i];
                if i < r && self.dims[i + 1][j] > 0 {
                    copy_into(&mut d, offsets[k + 1][i + 1], col0, &self.d_prime[i][j]);
                }
                if j < r && self.dims[i][j + 1] > 0 {
                    copy_into(&mut d, offsets[k + 1][i], col0, &self.d_second[i][j]);
                }
            }
            diffs.push(d);
        }
        (tdims, diffs)
    }

    /// Rational ranks of the total cohomology `H^k`, `0 ≤ k ≤ 2r`.
    pub fn total_ranks(&self) -> Result<Vec<usize>> {
        let (dims, diffs) = self.total();
        for k in 0..diffs.len().saturating_sub(1) {
            if !diffs[k + 1].mul(&diffs[k]).is_zero() {
                return Err(Error::Identity(format!("total differential squares to nonzero in degree {k}")));
            }
        }
        Ok(complex_ranks(&dims, &diffs))
    }

    /// Ranks of `H_II^j(K^{i,·})` for fixed `i`.
    pub fn row_ranks(&self, i: usize) -> Vec<usize> {
        complex_ranks(&self.dims[i], &self.d_second[i])
    }

    /// Ranks of `H_I^i(K^{·,j})` for fixed `j`.
    pub fn column_ranks(&self, j: usize) -> Vec<usize> {
        let dims: Vec<usize> = (0..=self.rank).map(|i| self.dims[i][j]).collect();
        let maps: Vec<RationalMatrix> = (0..=self.rank).map(|i| self.d_prime[i][j].clone()).collect();
        complex_ranks(&dims, &maps)
    }
}

fn copy_into(dst: &mut RationalMatrix, r0: usize, c0: usize, src: &RationalMatrix) {
    for i in 0..src.nrows() {
        for j in 0..src.ncols() {
            if !src[(i, j)].is_zero() {
                dst[(r0 + i, c0 + j)] = src[(i, j)].clone();
            }
        }
    }
}

fn complex_ranks(dims: &[usize], maps: &[RationalMatrix]) -> Vec<usize> {
    let ranks: Vec<usize> = maps.iter().map(RationalMatrix::rank).collect();
    (0..dims.len()).map(|k| dims[k] - ranks[k] - if k == 0 { 0 } else { ranks[k - 1] }).collect()
}

/// Comparison of the double complex with Ishida's complex for one `p`.
#[derive(Clone, Debug)]
pub struct KCheck {
    pub p: usize,
    pub total: Vec<usize>,
    pub ishida: Vec<usize>,
    pub rows_ok: bool,
    pub columns_ok: bool,
}

pub fn total_cohomology_check(fan: &Fan, p: usize) -> Result<KCheck> {
    let k = build_k(fan, p)?;
    let r = fan.rank();
    let total = k.total_ranks()?;
    let mut ishida = rational_ranks(&build_ishida(fan, p)?)?;
    ishida.resize(total.len(), 0);
    let rows_ok = (0..=r).all(|i| {
        let h = k.row_ranks(i);
        let expected = fan.cones_of_dim(r - i).len() * wedge_dim(i, p as isize);
        h[0] == expected && h[1..].iter().all(|&x| x == 0)
    });
    let columns_ok = (0..=r).all(|j| {
        let h = k.column_ranks(j);
        let expected = fan.cones_of_dim(j).len() * wedge_dim(r - j, p as isize - j as isize);
        h[0] == expected && h[1..].iter().all(|&x| x == 0)
    });
    Ok(KCheck { p, total, ishida, rows_ok, columns_ok })
}

/// Double-complex cross-check over all `p`.
pub fn verify_kcomplex(fan: &Fan, opts: ComputeOptions) -> Report {
    let theorem = "prop4.1-kcomplex";
    let regime = "complete-simplicial";
    if !fan.is_simplicial() || !fan.is_complete() {
        let what = if fan.is_simplicial() { "complete" } else { "simplicial" };
        return Report {
            theorem: theorem.into(),
            regime: regime.into(),
            verdict: Verdict::HypothesisViolation,
            reason: Some(format!("fan is not {what}")),
            checks: Vec::new(),
            table: None,
        };
    }
    let ps: Vec<usize> = (0..=fan.rank()).collect();
    let results = map_degrees(&ps, opts.threads, |p| total_cohomology_check(fan, p));
    let mut checks = Vec::new();
    for (p, res) in results.into_iter().enumerate() {
        match res {
            Ok(c) => {
                let fmt = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
                checks.push(Check::new(format!("p={p}: d' and d'' identities"), true, ""));
                checks.push(Check::new(
                    format!("p={p}: total cohomology ranks equal Ishida ranks"),
                    c.total == c.ishida,
                    format!("total ({}) ishida ({})", fmt(&c.total), fmt(&c.ishida)),
                ));
                checks.push(Check::new(format!("p={p}: row cohomology concentrated at j=0"), c.rows_ok, ""));
                checks.push(Check::new(format!("p={p}: column cohomology concentrated at i=0"), c.columns_ok, ""));
            }
            Err(e) => checks.push(Check::new(format!("p={p}: build"), false, e.to_string())),
        }
    }
    let verdict = if checks.iter().all(|c| c.passed) { Verdict::Pass } else { Verdict::Fail };
    Report { theorem: theorem.into(), regime: regime.into(), verdict, reason: None, checks, table: None }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyhedral::{gamma_pi, product_fan, projective_space_fan, Cone};

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn orientation_examples() {
        let fan = gamma_pi(&Cone::from_i64s(2, &[&[1, 0], &[0, 1]]).unwrap());
        let e1 = fan.ray_cone(&LatticeVector::from_i64s(&[1, 0])).unwrap();
        let top = fan.cones_of_dim(2).start;
        // canonical order lists (0,1) first, so gen φ = e2∧e1
        assert_eq!(OrientationModule::new(&fan, top).generator[0], LatticeVector::from_i64s(&[0, 1]));
        assert_eq!(orientation_map(&fan, e1, top).unwrap(), q(1, 1));
        let e2 = fan.ray_cone(&LatticeVector::from_i64s(&[0, 1])).unwrap();
        assert_eq!(orientation_map(&fan, e2, top).unwrap(), q(-1, 1));
        assert_eq!(orientation_map(&fan, 0, e1).unwrap(), q(1, 1));

        let fan = gamma_pi(&Cone::from_i64s(2, &[&[1, 0], &[1, 2]]).unwrap());
        let e1 = fan.ray_cone(&LatticeVector::from_i64s(&[1, 0])).unwrap();
        let top = fan.cones_of_dim(2).start;
        assert_eq!(orientation_map(&fan, e1, top).unwrap(), q(-1, 2));
    }

    #[test]
    fn block_dimensions() {
        let k = build_k(&projective_space_fan(2), 1).unwrap();
        assert_eq!(k.dims[0][0], 6);
        let k = build_k(&projective_space_fan(1), 1).unwrap();
        assert_eq!((k.dims[0][0], k.dims[0][1], k.dims[1][0]), (2, 2, 1));
        assert_eq!(k.total_ranks().unwrap(), vec![0, 1, 0]);
        let k = build_k(&projective_space_fan(2), 0).unwrap();
        assert!((0..=2).all(|i| (1..=2).all(|j| k.dims[i][j] == 0)));
    }

    #[test]
    fn total_matches_ishida() {
        let p1 = projective_space_fan(1);
        for fan in [p1.clone(), projective_space_fan(2), product_fan(&p1, &p1)] {
            for p in 0..=fan.rank() {
                let c = total_cohomology_check(&fan, p).unwrap();
                assert_eq!(c.total, c.ishida, "p = {p}");
                assert!(c.rows_ok && c.columns_ok, "p = {p}");
            }
        }
    }

    #[test]
    fn rejects_incomplete() {
        let fan = gamma_pi(&Cone::from_i64s(2, &[&[1, 0], &[0, 1]]).unwrap());
        assert!(matches!(build_k(&fan, 1), Err(Error::Hypothesis(_))));
        assert_eq!(verify_kcomplex(&fan, ComputeOptions::default()).verdict, Verdict::HypothesisViolation);
    }
}
