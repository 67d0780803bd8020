//! Cohomology of integer cochain complexes, Betti numbers, and the
//! vanishing-theorem drivers.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::wedge_dim;
use crate::ishida::{build_ishida_with, star_shift_iso, subcomplex_sequence, BuildOptions, CochainComplex, SubcomplexSequence};
use crate::linalg::{invariant_factors, json_int, kernel_basis, LatticeMatrix, LatticeVector, RationalMatrix};
use crate::polyhedral::{complete_from_convex, graph_fans, quotient_fan, star_removal, Fan};

/// `Z^free_rank ⊕ ⊕ Z/t_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CohomologyGroup {
    #[serde(rename = "rank")]
    pub free_rank: usize,
    #[serde(serialize_with = "ser_torsion")]
    pub torsion: Vec<BigInt>,
}

fn ser_torsion<S: serde::Serializer>(t: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    struct Wrap<'a>(&'a BigInt);
    impl Serialize for Wrap<'_> {
        fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
            json_int::serialize(self.0, s)
        }
    }
    s.collect_seq(t.iter().map(Wrap))
}

impl CohomologyGroup {
    pub fn zero() -> Self {
        CohomologyGroup { free_rank: 0, torsion: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }
}

impl std::fmt::Display for CohomologyGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            n => parts.push(format!("Z^{n}")),
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Rank of an integer matrix, computed by Smith form and by rational
/// elimination; the two must agree.
pub fn checked_rank(a: &LatticeMatrix) -> Result<(usize, Vec<BigInt>)> {
    let factors = invariant_factors(a);
    let gauss = RationalMatrix::from_integer(a).rank();
    if factors.len() != gauss {
        return Err(Error::RankDisagreement { smith: factors.len(), gauss });
    }
    Ok((gauss, factors))
}

pub fn cohomology(cx: &CochainComplex) -> Result<Vec<CohomologyGroup>> {
    let n = cx.len();
    let mut ranks = Vec::with_capacity(n);
    let mut factors = Vec::with_capacity(n);
    for d in &cx.coboundaries {
        let (r, f) = checked_rank(d)?;
        ranks.push(r);
        factors.push(f);
    }
    Ok((0..n)
        .map(|q| {
            let kernel = cx.ranks[q] - ranks[q];
            let (image, torsion) = if q == 0 {
                (0, Vec::new())
            } else {
                (ranks[q - 1], factors[q - 1].iter().filter(|t| !t.is_one()).cloned().collect())
            };
            CohomologyGroup { free_rank: kernel - image, torsion }
        })
        .collect())
}

/// Rational ranks of `H^q` for each `q`.
pub fn rational_ranks(cx: &CochainComplex) -> Result<Vec<usize>> {
    Ok(cohomology(cx)?.into_iter().map(|g| g.free_rank).collect())
}

/// `Σ_q (−1)^q` of the cochain ranks.
pub fn euler_characteristic(cx: &CochainComplex) -> i64 {
    cx.ranks.iter().enumerate().map(|(q, &r)| if q % 2 == 0 { r as i64 } else { -(r as i64) }).sum()
}

/// `χ_p = Σ_q (−1)^q |Δ(q)| C(r−q, p−q)` from face counts.
pub fn euler_oracle(fan: &Fan, p: usize) -> Result<i64> {
    if !fan.is_simplicial() {
        return Err(Error::Hypothesis("simplicial".into()));
    }
    let r = fan.rank();
    Ok(fan
        .f_vector()
        .iter()
        .enumerate()
        .map(|(q, &f)| {
            let term = (f * wedge_dim(r - q, p as isize - q as isize)) as i64;
            if q % 2 == 0 {
                term
            } else {
                -term
            }
        })
        .sum())
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ComputeOptions {
    /// Worker threads across values of `p`; 0 or 1 runs serially.
    pub threads: usize,
    #[doc(hidden)]
    pub inject_fault: bool,
}

impl ComputeOptions {
    fn build(&self) -> BuildOptions {
        BuildOptions { inject_fault: self.inject_fault }
    }
}

/// Evaluate `f` on each `p`, on up to `threads` scoped threads, keeping input order.
pub fn map_degrees<T: Send>(ps: &[usize], threads: usize, f: impl Fn(usize) -> T + Sync) -> Vec<T> {
    if threads <= 1 || ps.len() <= 1 {
        return ps.iter().map(|&p| f(p)).collect();
    }
    let workers = threads.min(ps.len());
    let f = &f;
    let mut slots: Vec<Option<T>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| s.spawn(move || ps.iter().enumerate().skip(w).step_by(workers).map(|(i, &p)| (i, f(p))).collect::<Vec<_>>()))
            .collect();
        let mut slots: Vec<Option<T>> = (0..ps.len()).map(|_| None).collect();
        for h in handles {
            for (i, v) in h.join().expect("worker thread panicked") {
                slots[i] = Some(v);
            }
        }
        slots
    });
    slots.iter_mut().map(|s| s.take().expect("every degree evaluated")).collect()
}

/// `H^q(Δ, Λ^p)` over a range of `p`, with Betti numbers when available.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyTable {
    pub rank: usize,
    pub ps: Vec<usize>,
    pub entries: BTreeMap<(usize, usize), CohomologyGroup>,
    pub simplicial: bool,
    /// `b_0 … b_{2r}`, present when every `p` was computed and the fan is
    /// simplicial or the check was overridden.
    pub betti: Option<Vec<usize>>,
    pub note: Option<String>,
}

impl CohomologyTable {
    pub fn get(&self, p: usize, q: usize) -> CohomologyGroup {
        self.entries.get(&(p, q)).cloned().unwrap_or_else(CohomologyGroup::zero)
    }

    pub fn rank_at(&self, p: usize, q: usize) -> usize {
        self.entries.get(&(p, q)).map_or(0, |g| g.free_rank)
    }

    /// Diagonal ranks `h_p = dim H^p(Δ, Λ^p)_Q`.
    pub fn diagonal(&self) -> Vec<usize> {
        self.ps.iter().map(|&p| self.rank_at(p, p)).collect()
    }

    /// `(p, q)` with `q ≠ p` and nonzero rational rank.
    pub fn off_diagonal(&self) -> Vec<(usize, usize)> {
        self.entries.iter().filter(|((p, q), g)| p != q && g.free_rank > 0).map(|(&k, _)| k).collect()
    }

    fn assemble_betti(&self) -> Vec<usize> {
        let mut b = vec![0; 2 * self.rank + 1];
        for (&(p, q), g) in &self.entries {
            b[p + q] += g.free_rank;
        }
        b
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut table = serde_json::Map::new();
        for (&(p, q), g) in &self.entries {
            table.insert(format!("{p},{q}"), serde_json::to_value(g).expect("group serializes"));
        }
        let mut out = serde_json::json!({ "rank": self.rank, "p": self.ps, "table": table, "betti": self.betti });
        if let Some(note) = &self.note {
            out["note"] = note.clone().into();
        }
        out
    }

    /// Plain-text rendering: one row per `p`, one column per `q`.
    pub fn render(&self) -> String {
        let cells: BTreeMap<(usize, usize), String> = self.entries.iter().map(|(&k, g)| (k, g.to_string())).collect();
        let width = cells.values().map(String::len).max().unwrap_or(1).max(3);
        let mut out = String::new();
        let _ = write!(out, "{:>5} |", "p\\q");
        for q in 0..=self.rank {
            let _ = write!(out, " {q:>width$}");
        }
        out.push('\n');
        out.push_str(&"-".repeat(7 + (width + 1) * (self.rank + 1)));
        out.push('\n');
        for &p in &self.ps {
            let _ = write!(out, "{p:>5} |");
            for q in 0..=self.rank {
                let _ = write!(out, " {:>width$}", cells.get(&(p, q)).map_or("0", String::as_str));
            }
            out.push('\n');
        }
        match (&self.betti, &self.note) {
            (Some(b), _) => {
                let _ = writeln!(out, "betti: {}", b.iter().map(usize::to_string).collect::<Vec<_>>().join(" "));
            }
            (None, Some(note)) => {
                let _ = writeln!(out, "note: {note}");
            }
            _ => {}
        }
        out
    }
}

/// Cohomology of Ishida's complexes for the given `p`.
pub fn cohomology_table(fan: &Fan, ps: &[usize], force: bool, opts: ComputeOptions) -> Result<CohomologyTable> {
    let r = fan.rank();
    if let Some(&p) = ps.iter().find(|&&p| p > r) {
        return Err(Error::DegreeOutOfRange { p, rank: r });
    }
    let groups = map_degrees(ps, opts.threads, |p| build_ishida_with(fan, p, opts.build()).and_then(|cx| cohomology(&cx)));
    let mut entries = BTreeMap::new();
    for (&p, gs) in ps.iter().zip(groups) {
        for (q, g) in gs?.into_iter().enumerate() {
            entries.insert((p, q), g);
        }
    }
    let simplicial = fan.is_simplicial();
    let mut table = CohomologyTable { rank: r, ps: ps.to_vec(), entries, simplicial, betti: None, note: None };
    let full = (0..=r).all(|p| ps.contains(&p));
    if !simplicial && !force {
        table.note = Some("fan is not simplicial; Betti numbers suppressed (pass --force to assemble them anyway)".into());
    } else if !full {
        table.note = Some("Betti numbers need every p in 0..=r".into());
    } else {
        table.betti = Some(table.assemble_betti());
        if !simplicial {
            table.note = Some("fan is not simplicial; Betti numbers are the formal sums only".into());
        }
    }
    Ok(table)
}

/// The full table over `0 ≤ p ≤ r` with Betti numbers.
pub fn betti_numbers(fan: &Fan, require_simplicial: bool) -> Result<CohomologyTable> {
    if require_simplicial && !fan.is_simplicial() {
        return Err(Error::Hypothesis("simplicial".into()));
    }
    let ps: Vec<usize> = (0..=fan.rank()).collect();
    cohomology_table(fan, &ps, true, ComputeOptions::default())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "HYPOTHESIS-VIOLATION")]
    HypothesisViolation,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::HypothesisViolation => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::HypothesisViolation => "HYPOTHESIS-VIOLATION",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed, detail: detail.into() }
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub theorem: String,
    pub regime: String,
    pub verdict: Verdict,
    pub reason: Option<String>,
    pub checks: Vec<Check>,
    pub table: Option<CohomologyTable>,
}

impl Report {
    fn from_outcome(theorem: &str, regime: &str, outcome: Result<(Vec<Check>, Option<CohomologyTable>)>) -> Report {
        let (verdict, reason, checks, table) = match outcome {
            Ok((checks, table)) => {
                let verdict = if checks.iter().all(|c| c.passed) { Verdict::Pass } else { Verdict::Fail };
                (verdict, None, checks, table)
            }
            Err(Error::Hypothesis(h)) => (Verdict::HypothesisViolation, Some(format!("fan is not {h}")), Vec::new(), None),
            Err(e) => (Verdict::Fail, Some(e.to_string()), vec![Check::new("computation", false, e.to_string())], None),
        };
        Report { theorem: theorem.into(), regime: regime.into(), verdict, reason, checks, table }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut out = serde_json::json!({
            "theorem": self.theorem,
            "regime": self.regime,
            "verdict": self.verdict,
            "checks": self.checks,
        });
        if let Some(r) = &self.reason {
            out["reason"] = r.clone().into();
        }
        if let Some(t) = &self.table {
            let tj = t.to_json();
            out["table"] = tj["table"].clone();
            out["betti"] = tj["betti"].clone();
        }
        out
    }

    pub fn render(&self) -> String {
        let mut out = format!("{} ({}): {}\n", self.theorem, self.regime, self.verdict.as_str());
        if let Some(r) = &self.reason {
            let _ = writeln!(out, "  {r}");
        }
        for c in &self.checks {
            let mark = if c.passed { "ok  " } else { "FAIL" };
            if c.detail.is_empty() {
                let _ = writeln!(out, "  [{mark}] {}", c.name);
            } else {
                let _ = writeln!(out, "  [{mark}] {}: {}", c.name, c.detail);
            }
        }
        if let Some(t) = &self.table {
            out.push_str(&t.render());
        }
        out
    }
}

/// Which vanishing statement to check, with its witness data.
#[derive(Clone, Debug)]
pub enum Regime {
    /// Face fan of one simplicial cone.
    Cone,
    CompleteSimplicial,
    /// `Δ = Δ̃ ∖ Star_ρ(Δ̃)` for the given complete simplicial `Δ̃`.
    StarRemoval { tilde: Fan, rho: usize },
    /// Simplicial fan with convex r-dimensional support.
    ConvexSupport,
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::Cone => "cone",
            Regime::CompleteSimplicial => "complete-simplicial",
            Regime::StarRemoval { .. } => "star-removal",
            Regime::ConvexSupport => "convex-support",
        }
    }

    pub fn theorem(&self) -> &'static str {
        match self {
            Regime::Cone => "prop2.1",
            Regime::CompleteSimplicial => "prop4.1",
            Regime::StarRemoval { .. } => "thm4.2",
            Regime::ConvexSupport => "cor4.4",
        }
    }
}

fn full_table(fan: &Fan, opts: ComputeOptions) -> Result<CohomologyTable> {
    let ps: Vec<usize> = (0..=fan.rank()).collect();
    cohomology_table(fan, &ps, false, opts)
}

fn fmt_pairs(pairs: &[(usize, usize)]) -> String {
    pairs.iter().map(|(p, q)| format!("H^{q}(Λ^{p})")).collect::<Vec<_>>().join(", ")
}

fn join(v: &[usize]) -> String {
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

fn vanishing_checks(table: &CohomologyTable, fan: &Fan) -> Result<Vec<Check>> {
    let off = table.off_diagonal();
    let mut checks = vec![Check::new("off-diagonal rational ranks vanish", off.is_empty(), fmt_pairs(&off))];
    let betti = table.betti.clone().unwrap_or_default();
    let odd: Vec<usize> = (1..betti.len()).step_by(2).filter(|&l| betti[l] != 0).collect();
    checks.push(Check::new("odd Betti numbers vanish", odd.is_empty(), join(&odd)));
    let mut euler_bad = Vec::new();
    for p in 0..=fan.rank() {
        let chi: i64 = (0..=fan.rank()).map(|q| if q % 2 == 0 { 1 } else { -1 } * table.rank_at(p, q) as i64).sum();
        if chi != euler_oracle(fan, p)? {
            euler_bad.push(p);
        }
    }
    checks.push(Check::new("Euler characteristic matches face counts", euler_bad.is_empty(), join(&euler_bad)));
    Ok(checks)
}

fn complete_checks(table: &CohomologyTable, fan: &Fan) -> Result<Vec<Check>> {
    let r = fan.rank();
    let h = table.diagonal();
    let mut checks = vanishing_checks(table, fan)?;
    let dual: Vec<usize> = (0..=r).filter(|&p| h[p] != h[r - p]).collect();
    checks.push(Check::new("duality h_p = h_(r-p)", dual.is_empty(), format!("h = ({})", join(&h))));
    checks.push(Check::new("h_0 = h_r = 1", h[0] == 1 && h[r] == 1, format!("h_0 = {}, h_r = {}", h[0], h[r])));
    let mut euler_bad = Vec::new();
    for (p, &hp) in h.iter().enumerate() {
        let chi = euler_oracle(fan, p)?;
        let signed = if p % 2 == 0 { chi } else { -chi };
        if signed != hp as i64 {
            euler_bad.push(p);
        }
    }
    checks.push(Check::new("h_p = (-1)^p chi_p", euler_bad.is_empty(), join(&euler_bad)));
    Ok(checks)
}

/// Ranks of the maps in the long exact sequence of a short exact sequence of
/// complexes, as `α_q: H^q(Star) → H^q(Δ̃)`, `β_q: H^q(Δ̃) → H^q(Δ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LongExactRanks {
    pub star: Vec<usize>,
    pub tilde: Vec<usize>,
    pub delta: Vec<usize>,
    pub alpha: Vec<usize>,
    pub beta: Vec<usize>,
    /// Ranks of the connecting maps `H^q(Δ) → H^{q+1}(Star)`.
    pub gamma: Vec<usize>,
}

impl LongExactRanks {
    /// Dimension counts required by exactness at every term.
    pub fn consistent(&self) -> bool {
        let n = self.tilde.len();
        (0..n).all(|q| {
            let at_tilde = self.alpha[q] + self.beta[q] == self.tilde[q];
            let into_star = if q == 0 { 0 } else { self.gamma[q - 1] };
            let at_star = into_star + self.alpha[q] == self.star[q];
            let at_delta = self.beta[q] + self.gamma[q] == self.delta[q];
            at_tilde && at_star && at_delta
        })
    }
}

/// Rank of the map on cohomology induced by `f: A^q → B^q`.
fn induced_rank(f: &LatticeMatrix, src_out: &LatticeMatrix, dst_in: &LatticeMatrix) -> usize {
    let cycles = kernel_basis(src_out);
    let mut rows: Vec<LatticeVector> = cycles.iter().map(|z| f.apply(z)).collect();
    let boundaries = dst_in.transpose().row_vectors();
    let base = LatticeMatrix::from_rows(f.nrows(), &boundaries).rational_rank();
    rows.extend(boundaries);
    LatticeMatrix::from_rows(f.nrows(), &rows).rational_rank() - base
}

pub fn long_exact_ranks(seq: &SubcomplexSequence) -> Result<LongExactRanks> {
    let star = rational_ranks(&seq.star)?;
    let tilde = rational_ranks(&seq.tilde)?;
    let delta = rational_ranks(&seq.delta)?;
    let n = tilde.len();
    let alpha: Vec<usize> =
        (0..n).map(|q| induced_rank(&seq.inclusion[q], &seq.star.coboundaries[q], &seq.tilde.incoming(q))).collect();
    let beta: Vec<usize> =
        (0..n).map(|q| induced_rank(&seq.restriction[q], &seq.tilde.coboundaries[q], &seq.delta.incoming(q))).collect();
    let gamma: Vec<usize> = (0..n).map(|q| delta[q].saturating_sub(beta[q])).collect();
    Ok(LongExactRanks { star, tilde, delta, alpha, beta, gamma })
}

/// Checks for `Δ = Δ̃ ∖ Star_ρ(Δ̃)`, over all `p`.
fn star_removal_checks(delta: &Fan, tilde: &Fan, rho: usize, opts: ComputeOptions) -> Result<Vec<Check>> {
    let r = tilde.rank();
    let ps: Vec<usize> = (0..=r).collect();
    let per_p = map_degrees(&ps, opts.threads, |p| -> Result<LongExactRanks> {
        let seq = subcomplex_sequence(tilde, rho, p)?;
        long_exact_ranks(&seq)
    });
    let mut les_bad = Vec::new();
    let mut inj_bad = Vec::new();
    let mut star_bad = Vec::new();
    let mut chi_bad = Vec::new();
    for (p, les) in per_p.into_iter().enumerate() {
        let les = les?;
        if !les.consistent() {
            les_bad.push(p);
        }
        if les.alpha[p] != les.star[p] {
            inj_bad.push(p);
        }
        if (0..=r).any(|q| q != p && les.star[q] != 0) {
            star_bad.push(p);
        }
    }
    let star_ids = tilde.star(rho);
    for p in 0..=r {
        let chi_tilde = euler_oracle(tilde, p)?;
        let chi_delta = euler_oracle(delta, p)?;
        let chi_star: i64 = star_ids
            .iter()
            .map(|&s| {
                let q = tilde.cone(s).dim();
                let t = wedge_dim(r - q, p as isize - q as isize) as i64;
                if q % 2 == 0 {
                    t
                } else {
                    -t
                }
            })
            .sum();
        if chi_star + chi_delta != chi_tilde {
            chi_bad.push(p);
        }
    }
    Ok(vec![
        Check::new("0 -> C(Star) -> C(tilde) -> C(delta) -> 0 exact", true, ""),
        Check::new("star cohomology concentrated in degree p", star_bad.is_empty(), join(&star_bad)),
        Check::new("H^p(Star) -> H^p(tilde) injective", inj_bad.is_empty(), join(&inj_bad)),
        Check::new("long exact sequence rank bookkeeping", les_bad.is_empty(), join(&les_bad)),
        Check::new("chi_p(Star) + chi_p(delta) = chi_p(tilde)", chi_bad.is_empty(), join(&chi_bad)),
    ])
}

pub fn verify_vanishing(fan: &Fan, regime: &Regime, opts: ComputeOptions) -> Report {
    let outcome = (|| -> Result<(Vec<Check>, Option<CohomologyTable>)> {
        match regime {
            Regime::Cone => {
                let maximal = fan.maximal_cones();
                if maximal.len() != 1 {
                    return Err(Error::Hypothesis("the face fan of a single cone".into()));
                }
                let pi = fan.cone(maximal[0]);
                if !pi.is_simplicial() {
                    return Err(Error::Hypothesis("the face fan of a simplicial cone".into()));
                }
                let table = full_table(fan, opts)?;
                let r = fan.rank();
                let h0: Vec<usize> = (0..=r).map(|p| table.rank_at(p, 0)).collect();
                let expected: Vec<usize> = (0..=r).map(|p| wedge_dim(r - pi.dim(), p as isize)).collect();
                let higher: Vec<(usize, usize)> = table.entries.iter().filter(|((_, q), g)| *q > 0 && g.free_rank > 0).map(|(&k, _)| k).collect();
                let checks = vec![
                    Check::new("H^0(Λ^p) has rank C(r - dim π, p)", h0 == expected, format!("ranks ({}) expected ({})", join(&h0), join(&expected))),
                    Check::new("H^q vanishes for q > 0", higher.is_empty(), fmt_pairs(&higher)),
                ];
                Ok((checks, Some(table)))
            }
            Regime::CompleteSimplicial => {
                if !fan.is_simplicial() {
                    return Err(Error::Hypothesis("simplicial".into()));
                }
                if !fan.is_complete() {
                    return Err(Error::Hypothesis("complete".into()));
                }
                let table = full_table(fan, opts)?;
                Ok((complete_checks(&table, fan)?, Some(table)))
            }
            Regime::StarRemoval { tilde, rho } => {
                if !tilde.is_simplicial() || !tilde.is_complete() {
                    return Err(Error::Hypothesis("obtained from a complete simplicial fan (the witness is not complete simplicial)".into()));
                }
                if tilde.rank() != fan.rank() || tilde.cone(*rho).dim() != 1 {
                    return Err(Error::Hypothesis("obtained by removing the star of a ray (witness ray invalid)".into()));
                }
                if &star_removal(tilde, *rho)? != fan {
                    return Err(Error::Hypothesis("the star removal of the given witness".into()));
                }
                let table = full_table(fan, opts)?;
                let mut checks = vanishing_checks(&table, fan)?;
                checks.extend(star_removal_checks(fan, tilde, *rho, opts)?);
                Ok((checks, Some(table)))
            }
            Regime::ConvexSupport => {
                if !fan.is_simplicial() {
                    return Err(Error::Hypothesis("simplicial".into()));
                }
                if !fan.support_is_convex_full_dimensional() {
                    return Err(Error::Hypothesis("of convex full-dimensional support".into()));
                }
                let table = full_table(fan, opts)?;
                let mut checks = vanishing_checks(&table, fan)?;
                if !fan.is_complete() {
                    let completion = complete_from_convex(fan)?;
                    checks.push(Check::new(
                        "completion witness",
                        true,
                        format!("rho = {}, completion {}", completion.n_circ, completion.tilde.summary()),
                    ));
                    checks.extend(star_removal_checks(fan, &completion.tilde, completion.rho, opts)?);
                }
                Ok((checks, Some(table)))
            }
        }
    })();
    Report::from_outcome(regime.theorem(), regime.name(), outcome)
}

/// Graph-fan checks over a complete simplicial base `Σ̄` with ray values `η`.
pub fn verify_phi_transfer(sigma_bar: &Fan, eta: &[BigInt], opts: ComputeOptions) -> Report {
    let outcome = (|| -> Result<(Vec<Check>, Option<CohomologyTable>)> {
        let graphs = graph_fans(sigma_bar, eta)?;
        let base = full_table(sigma_bar, opts)?;
        let phi = full_table(&graphs.phi, opts)?;
        let flat = full_table(&graphs.phi_flat, opts)?;
        let r = graphs.phi.rank();
        let mut mismatch = Vec::new();
        for p in 0..=r {
            for q in 0..=r {
                if phi.rank_at(p, q) != base.rank_at(p, q) {
                    mismatch.push((p, q));
                }
            }
        }
        let flat_bad: Vec<(usize, usize)> = flat.off_diagonal().into_iter().filter(|&(p, q)| q + 1 != p).collect();
        let quotient = quotient_fan(&graphs.phi_tilde, graphs.rho)?;
        let mut shift_bad = Vec::new();
        for p in 0..=r {
            if let Err(e) = star_shift_iso(&graphs.phi_tilde, graphs.rho, p) {
                shift_bad.push(format!("p={p}: {e}"));
            }
        }
        let mut checks = vec![
            Check::new("rank H^q(Φ, Λ^p) = rank H^q(Σ̄, Λ^p)", mismatch.is_empty(), fmt_pairs(&mismatch)),
            Check::new("H^q(Φ♭, Λ^p) vanishes for q ∉ {p-1, p}", flat_bad.is_empty(), fmt_pairs(&flat_bad)),
            Check::new("quotient of Φ̃ along ρ is Σ̄", quotient.fan == *sigma_bar, ""),
            Check::new("star shift isomorphism commutes with coboundaries", shift_bad.is_empty(), shift_bad.join("; ")),
        ];
        checks.extend(star_removal_checks(&graphs.phi, &graphs.phi_tilde, graphs.rho, opts)?);
        Ok((checks, Some(phi)))
    })();
    Report::from_outcome("lem4.3", "graph-fans", outcome)
}
