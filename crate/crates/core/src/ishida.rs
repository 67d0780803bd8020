//! Ishida's p-th complex `C^q(Δ, Λ^p) = ⊕_{σ∈Δ(q)} Λ^{p−q}(M ∩ σ^⊥)`.

use num_traits::{One, Signed};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{annihilator_basis, compound_matrix, contraction_matrix, wedge_dim};
use crate::linalg::{right_inverse, LatticeMatrix};
use crate::polyhedral::{quotient_fan, Fan, QuotientFan};

/// Position of one cone's summand inside `C^q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Block {
    /// Index of the cone in its fan.
    pub cone: usize,
    pub offset: usize,
    pub len: usize,
}

/// An integer cochain complex `C^0 → … → C^r` with block structure.
///
/// `coboundaries[q]` is `D^q : C^q → C^{q+1}`, of shape
/// `ranks[q+1] × ranks[q]`; the last one maps to the zero module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CochainComplex {
    pub p: usize,
    pub ranks: Vec<usize>,
    pub coboundaries: Vec<LatticeMatrix>,
    pub blocks: Vec<Vec<Block>>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct BuildOptions {
    /// Negate one coboundary block. Exists only to exercise failure paths.
    #[doc(hidden)]
    pub inject_fault: bool,
}

impl CochainComplex {
    /// The complex with every term zero, `len` degrees long.
    pub fn zero(p: usize, len: usize) -> Self {
        CochainComplex {
            p,
            ranks: vec![0; len],
            coboundaries: (0..len).map(|_| LatticeMatrix::zeros(0, 0)).collect(),
            blocks: vec![Vec::new(); len],
        }
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    /// `D^q`, with `D^{−1}` the zero map into `C^0`.
    pub fn incoming(&self, q: usize) -> LatticeMatrix {
        if q == 0 {
            LatticeMatrix::zeros(self.ranks[0], 0)
        } else {
            self.coboundaries[q - 1].clone()
        }
    }

    pub fn block_of(&self, q: usize, cone: usize) -> Option<&Block> {
        self.blocks[q].iter().find(|b| b.cone == cone)
    }

    fn locate(&self, q: usize, row: usize) -> usize {
        self.blocks[q].iter().find(|b| b.offset <= row && row < b.offset + b.len).expect("row inside a block").cone
    }

    /// Check `D^{q+1} D^q = 0`, naming a cone triple on failure.
    pub fn check_square_zero(&self, fan: &Fan) -> Result<()> {
        for q in 0..self.len().saturating_sub(1) {
            let prod = &self.coboundaries[q + 1] * &self.coboundaries[q];
            for i in 0..prod.nrows() {
                for j in 0..prod.ncols() {
                    if prod[(i, j)] != 0.into() {
                        let (s, u) = (self.locate(q, j), self.locate(q + 2, i));
                        let t = fan.facets_of(u).iter().copied().find(|&t| fan.is_face(s, t)).unwrap_or(s);
                        return Err(Error::CoboundarySquare {
                            q,
                            sigma: fan.cone(s).to_string(),
                            tau: fan.cone(t).to_string(),
                            upsilon: fan.cone(u).to_string(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// JSON dump: ranks, coboundary matrices, and the block index table.
    pub fn to_json(&self, fan: &Fan) -> serde_json::Value {
        let blocks: Vec<serde_json::Value> = self
            .blocks
            .iter()
            .enumerate()
            .flat_map(|(q, bs)| {
                bs.iter().map(move |b| {
                    serde_json::json!({
                        "q": q,
                        "rays": fan.cone(b.cone).rays(),
                        "range": [b.offset, b.offset + b.len],
                    })
                })
            })
            .collect();
        let mats: Vec<serde_json::Value> = self
            .coboundaries
            .iter()
            .map(|d| {
                let rows: Vec<serde_json::Value> = d.row_vectors().iter().map(|r| serde_json::to_value(r).expect("vector serializes")).collect();
                serde_json::json!({ "shape": [d.nrows(), d.ncols()], "rows": rows })
            })
            .collect();
        serde_json::json!({ "p": self.p, "ranks": self.ranks, "coboundaries": mats, "blocks": blocks })
    }
}

pub fn build_ishida(fan: &Fan, p: usize) -> Result<CochainComplex> {
    build_ishida_with(fan, p, BuildOptions::default())
}

pub fn build_ishida_with(fan: &Fan, p: usize, opts: BuildOptions) -> Result<CochainComplex> {
    let all: Vec<usize> = (0..fan.len()).collect();
    build_on(fan, p, &all, opts)
}

/// Ishida's complex supported on a subset of the cones of `fan` that is either
/// closed under faces or closed under cofaces (a star), with the fan's
/// coboundary blocks.
pub fn build_on_cones(fan: &Fan, p: usize, cones: &[usize]) -> Result<CochainComplex> {
    build_on(fan, p, cones, BuildOptions::default())
}

fn build_on(fan: &Fan, p: usize, cones: &[usize], opts: BuildOptions) -> Result<CochainComplex> {
    let r = fan.rank();
    if p > r {
        return Err(Error::DegreeOutOfRange { p, rank: r });
    }
    let mut member = vec![false; fan.len()];
    for &c in cones {
        member[c] = true;
    }
    let mut ranks = vec![0; r + 1];
    let mut blocks = vec![Vec::new(); r + 1];
    for q in 0..=r {
        for s in fan.cones_of_dim(q).filter(|&s| member[s]) {
            let len = wedge_dim(fan.cone(s).annihilator().len(), p as isize - q as isize);
            blocks[q].push(Block { cone: s, offset: ranks[q], len });
            ranks[q] += len;
        }
    }
    let fault_degree = if (0..r).any(|q| q >= 1 && !blocks[q].is_empty() && p > q) { 1 } else { 0 };
    let mut fault_pending = opts.inject_fault;
    let mut coboundaries = Vec::with_capacity(r + 1);
    for q in 0..=r {
        let next_rank = if q < r { ranks[q + 1] } else { 0 };
        let mut d = LatticeMatrix::zeros(next_rank, ranks[q]);
        if q < r && p > q {
            for b in &blocks[q] {
                for &t in fan.cofacets_of(b.cone) {
                    let Some(tb) = blocks[q + 1].iter().find(|x| x.cone == t) else { continue };
                    let inc = fan.facet_incidence(b.cone, t)?;
                    let mut block = contraction_matrix(fan, &inc, p - q)?;
                    if fault_pending && q == fault_degree && !block.is_zero() {
                        block = block.neg();
                        fault_pending = false;
                    }
                    d.set_block(tb.offset, b.offset, &block);
                }
            }
        }
        coboundaries.push(d);
    }
    let cx = CochainComplex { p, ranks, coboundaries, blocks };
    cx.check_square_zero(fan)?;
    Ok(cx)
}

/// The short exact sequence `0 → C(Star_ρ Δ̃) → C(Δ̃) → C(Δ) → 0`.
#[derive(Clone, Debug)]
pub struct SubcomplexSequence {
    pub star: CochainComplex,
    pub tilde: CochainComplex,
    pub delta: CochainComplex,
    /// Degreewise `C^q(Star) → C^q(Δ̃)`.
    pub inclusion: Vec<LatticeMatrix>,
    /// Degreewise `C^q(Δ̃) → C^q(Δ)`.
    pub restriction: Vec<LatticeMatrix>,
}

fn block_embedding(sub: &CochainComplex, big: &CochainComplex, q: usize) -> LatticeMatrix {
    let mut m = LatticeMatrix::zeros(big.ranks[q], sub.ranks[q]);
    for b in &sub.blocks[q] {
        let target = big.block_of(q, b.cone).expect("subcomplex block exists in the full complex");
        for k in 0..b.len {
            m[(target.offset + k, b.offset + k)] = 1.into();
        }
    }
    m
}

pub fn subcomplex_sequence(tilde: &Fan, rho: usize, p: usize) -> Result<SubcomplexSequence> {
    if tilde.cone(rho).dim() != 1 {
        return Err(Error::NotARay(tilde.cone(rho).to_string()));
    }
    let star_cones = tilde.star(rho);
    let rest: Vec<usize> = (0..tilde.len()).filter(|c| !star_cones.contains(c)).collect();
    let star = build_on_cones(tilde, p, &star_cones)?;
    let full = build_ishida(tilde, p)?;
    let delta = build_on_cones(tilde, p, &rest)?;
    let len = full.len();
    let inclusion: Vec<LatticeMatrix> = (0..len).map(|q| block_embedding(&star, &full, q)).collect();
    let restriction: Vec<LatticeMatrix> = (0..len).map(|q| block_embedding(&delta, &full, q).transpose()).collect();
    let seq = SubcomplexSequence { star, tilde: full, delta, inclusion, restriction };
    seq.check_exact()?;
    Ok(seq)
}

impl SubcomplexSequence {
    /// Degreewise exactness and compatibility with the coboundaries.
    pub fn check_exact(&self) -> Result<()> {
        for q in 0..self.tilde.len() {
            let (i, r) = (&self.inclusion[q], &self.restriction[q]);
            if self.star.ranks[q] + self.delta.ranks[q] != self.tilde.ranks[q] {
                return Err(Error::Identity(format!("ranks do not add in degree {q}")));
            }
            if i.rational_rank() != i.ncols() || r.rational_rank() != r.nrows() || !(r * i).is_zero() {
                return Err(Error::Identity(format!("sequence is not exact in degree {q}")));
            }
            if q + 1 < self.tilde.len() {
                let lhs = &self.tilde.coboundaries[q] * i;
                let rhs = &self.inclusion[q + 1] * &self.star.coboundaries[q];
                let lhs2 = &self.restriction[q + 1] * &self.tilde.coboundaries[q];
                let rhs2 = &self.delta.coboundaries[q] * r;
                if lhs != rhs || lhs2 != rhs2 {
                    return Err(Error::Identity(format!("maps do not commute with coboundaries in degree {q}")));
                }
            }
        }
        Ok(())
    }
}

/// `C^{q−1}(Σ̄, Λ^{p−1}) ≅ C^q(Star_ρ Δ̃, Λ^p)` as explicit degreewise matrices.
#[derive(Clone, Debug)]
pub struct StarShift {
    pub quotient: QuotientFan,
    /// `C^·(Σ̄, Λ^{p−1})`, or the zero complex when `p = 0`.
    pub base: CochainComplex,
    pub star: CochainComplex,
    /// `maps[q]: C^{q−1}(Σ̄) → C^q(Star)` for `q ≥ 1`; `maps[0]` is the zero map.
    pub maps: Vec<LatticeMatrix>,
}

pub fn star_shift_iso(tilde: &Fan, rho: usize, p: usize) -> Result<StarShift> {
    let r = tilde.rank();
    let quotient = quotient_fan(tilde, rho)?;
    let qfan = &quotient.fan;
    let star = build_on_cones(tilde, p, &tilde.star(rho))?;
    let base = if p == 0 { CochainComplex::zero(0, r) } else { build_ishida(qfan, p - 1)? };
    let mut maps = vec![LatticeMatrix::zeros(star.ranks[0], 0)];
    for q in 1..=r {
        let mut m = LatticeMatrix::zeros(star.ranks[q], base.ranks[q - 1]);
        for b in &star.blocks[q] {
            let image = quotient.image_of[&b.cone];
            let Some(src) = base.block_of(q - 1, image) else { continue };
            let bar_basis = LatticeMatrix::from_rows(qfan.rank(), qfan.cone(image).annihilator());
            let lifted = &bar_basis * &quotient.projection;
            let target = annihilator_basis(tilde.cone(b.cone)).matrix();
            let inverse = right_inverse(&target).ok_or(Error::NotSaturated)?;
            let change = &lifted * &inverse;
            if &change * &target != lifted {
                return Err(Error::Identity("quotient annihilator does not lift into the star annihilator".into()));
            }
            if b.len == 0 {
                continue;
            }
            let wedge = compound_matrix(&change, p - q).transpose();
            m.set_block(b.offset, src.offset, &wedge);
        }
        maps.push(m);
    }
    let shift = StarShift { quotient, base, star, maps };
    shift.check_commutes()?;
    Ok(shift)
}

impl StarShift {
    pub fn check_commutes(&self) -> Result<()> {
        for q in 1..self.star.len() {
            let m = &self.maps[q];
            if m.nrows() != m.ncols() || !m.determinant().abs().is_one() {
                return Err(Error::Identity(format!("star shift is not invertible in degree {q}")));
            }
            if q + 1 < self.star.len() {
                let lhs = &self.star.coboundaries[q] * m;
                let rhs = &self.maps[q + 1] * &self.base.coboundaries[q - 1];
                if lhs != rhs {
                    return Err(Error::Identity(format!("star shift does not commute with coboundaries in degree {q}")));
                }
            }
        }
        Ok(())
    }
}
