//! Exact integer and rational linear algebra.
//!
//! Everything here works over arbitrary-precision integers. Matrices act on
//! column vectors; lattice bases are stored as matrix rows.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element of `Z^n`, used for both `N` and its dual `M`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeVector(pub Vec<BigInt>);

/// Serde adapter writing a `BigInt` as a plain JSON integer of any size.
pub mod json_int {
    use num_bigint::BigInt;
    use serde::de::Error as _;
    use serde::ser::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        let n: serde_json::Number = v.to_string().parse().map_err(S::Error::custom)?;
        n.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let n = serde_json::Number::deserialize(d)?;
        let text = n.to_string();
        text.parse().map_err(|_| D::Error::custom(format!("expected an integer, found {text}")))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(transparent)]
struct JsonInt(#[serde(with = "json_int")] BigInt);

impl Serialize for LatticeVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(|c| JsonInt(c.clone())))
    }
}

impl<'de> Deserialize<'de> for LatticeVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v: Vec<JsonInt> = Vec::deserialize(d)?;
        Ok(LatticeVector(v.into_iter().map(|c| c.0).collect()))
    }
}

impl LatticeVector {
    pub fn zero(len: usize) -> Self {
        LatticeVector(vec![BigInt::zero(); len])
    }

    pub fn from_i64s(entries: &[i64]) -> Self {
        LatticeVector(entries.iter().map(|&e| BigInt::from(e)).collect())
    }

    /// The i-th standard basis vector of `Z^len`.
    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zero(len);
        v.0[i] = BigInt::one();
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.0
    }

    pub fn dot(&self, other: &LatticeVector) -> BigInt {
        assert_eq!(self.len(), other.len(), "dot product of vectors of different length");
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    /// gcd of the entries; zero for the zero vector.
    pub fn content(&self) -> BigInt {
        self.0.iter().fold(BigInt::zero(), |g, e| g.gcd(e))
    }

    pub fn scaled(&self, c: &BigInt) -> LatticeVector {
        LatticeVector(self.0.iter().map(|e| e * c).collect())
    }

    pub fn add(&self, other: &LatticeVector) -> LatticeVector {
        LatticeVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &LatticeVector) -> LatticeVector {
        LatticeVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> LatticeVector {
        LatticeVector(self.0.iter().map(|e| -e).collect())
    }

    pub fn to_i64s(&self) -> Option<Vec<i64>> {
        use num_traits::ToPrimitive;
        self.0.iter().map(ToPrimitive::to_i64).collect()
    }
}

impl Index<usize> for LatticeVector {
    type Output = BigInt;
    fn index(&self, i: usize) -> &BigInt {
        &self.0[i]
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// Divide a nonzero vector by the gcd of its entries.
pub fn primitive(v: &LatticeVector) -> Result<LatticeVector> {
    let g = v.content();
    if g.is_zero() {
        return Err(Error::ZeroVector);
    }
    Ok(LatticeVector(v.0.iter().map(|e| e / &g).collect()))
}

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LatticeMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl LatticeMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        LatticeMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_i64_rows(cols: usize, rows: &[&[i64]]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged matrix");
            for (j, &e) in row.iter().enumerate() {
                m[(i, j)] = BigInt::from(e);
            }
        }
        m
    }

    /// Stack vectors as rows. `cols` is needed to give an empty list a shape.
    pub fn from_rows(cols: usize, rows: &[LatticeVector]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "row length mismatch");
            for j in 0..cols {
                m[(i, j)] = row.0[j].clone();
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> LatticeVector {
        LatticeVector(self.data[i * self.cols..(i + 1) * self.cols].to_vec())
    }

    pub fn column(&self, j: usize) -> LatticeVector {
        LatticeVector((0..self.rows).map(|i| self[(i, j)].clone()).collect())
    }

    pub fn row_vectors(&self) -> Vec<LatticeVector> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> LatticeMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn neg(&self) -> LatticeMatrix {
        LatticeMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|e| -e).collect() }
    }

    pub fn add(&self, other: &LatticeMatrix) -> LatticeMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch in add");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        LatticeMatrix { rows: self.rows, cols: self.cols, data }
    }

    /// Matrix-vector product `A·v`.
    pub fn apply(&self, v: &LatticeVector) -> LatticeVector {
        assert_eq!(self.cols, v.len(), "shape mismatch in apply");
        LatticeVector((0..self.rows).map(|i| self.row_slice(i).iter().zip(&v.0).map(|(a, b)| a * b).sum()).collect())
    }

    /// Row-vector product `v·A`.
    pub fn apply_left(&self, v: &LatticeVector) -> LatticeVector {
        assert_eq!(self.rows, v.len(), "shape mismatch in apply_left");
        let mut out = vec![BigInt::zero(); self.cols];
        for (i, c) in v.0.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o += c * &self[(i, j)];
            }
        }
        LatticeVector(out)
    }

    /// Submatrix on the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> LatticeMatrix {
        let mut m = Self::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                m[(a, b)] = self[(i, j)].clone();
            }
        }
        m
    }

    /// Place `block` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &LatticeMatrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)].clone();
            }
        }
    }

    fn row_slice(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row_dst += c * row_src
    fn add_row_multiple(&mut self, dst: usize, src: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let t = &self.data[src * self.cols + j] * c;
            self.data[dst * self.cols + j] += t;
        }
    }

    /// col_dst += c * col_src
    fn add_col_multiple(&mut self, dst: usize, src: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let t = &self.data[i * self.cols + src] * c;
            self.data[i * self.cols + dst] += t;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let e = &mut self.data[i * self.cols + j];
            *e = -std::mem::take(e);
        }
    }

    /// Replace rows (a, b) by (x·a + y·b, u·a + v·b).
    fn combine_rows(&mut self, a: usize, b: usize, coeffs: [&BigInt; 4]) {
        let [x, y, u, v] = coeffs;
        for j in 0..self.cols {
            let ra = self.data[a * self.cols + j].clone();
            let rb = self.data[b * self.cols + j].clone();
            self.data[a * self.cols + j] = x * &ra + y * &rb;
            self.data[b * self.cols + j] = u * &ra + v * &rb;
        }
    }


    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                    Some(i) => {
                        a.swap_rows(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                    a[(i, j)] = v;
                }
                a[(i, k)] = BigInt::zero();
            }
            prev = a[(k, k)].clone();
        }
        sign * &a[(n - 1, n - 1)]
    }

    /// Rank over Q by fraction-free Gaussian elimination, independent of the
    /// Smith normal form code path.
    pub fn rational_rank(&self) -> usize {
        let mut a = self.clone();
        let mut rank = 0;
        for col in 0..a.cols {
            if rank == a.rows {
                break;
            }
            let Some(p) = (rank..a.rows).find(|&i| !a[(i, col)].is_zero()) else {
                continue;
            };
            a.swap_rows(p, rank);
            let pivot = a[(rank, col)].clone();
            for i in rank + 1..a.rows {
                let f = a[(i, col)].clone();
                if f.is_zero() {
                    continue;
                }
                for j in col..a.cols {
                    let v = &a[(i, j)] * &pivot - &f * &a[(rank, j)];
                    a[(i, j)] = v;
                }
                let g = a.row_slice(i).iter().fold(BigInt::zero(), |g, e| g.gcd(e));
                if g > BigInt::one() {
                    for j in 0..a.cols {
                        a[(i, j)] = &a[(i, j)] / &g;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows).map(|i| self.row(i).to_i64s()).collect()
    }

    /// Entries as nested vectors of big integers (for serialization).
    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row_slice(i).to_vec()).collect()
    }
}

impl Index<(usize, usize)> for LatticeMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for LatticeMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &LatticeMatrix {
    type Output = LatticeMatrix;
    fn mul(self, rhs: &LatticeMatrix) -> LatticeMatrix {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in matrix product");
        let mut out = LatticeMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let t = a * &rhs[(k, j)];
                    out[(i, j)] += t;
                }
            }
        }
        out
    }
}

impl fmt::Debug for LatticeMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LatticeMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:?}", self.row_slice(i).iter().map(|e| e.to_string()).collect::<Vec<_>>())?;
        }
        write!(f, "]")
    }
}

/// `(g, x, y)` with `x·a + y·b = g = gcd(a, b) ≥ 0`.
pub fn extended_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let (mut old_r, mut r) = (a.clone(), b.clone());
    let (mut old_s, mut s) = (BigInt::one(), BigInt::zero());
    let (mut old_t, mut t) = (BigInt::zero(), BigInt::one());
    while !r.is_zero() {
        let q = old_r.div_floor(&r);
        let nr = &old_r - &q * &r;
        old_r = std::mem::replace(&mut r, nr);
        let ns = &old_s - &q * &s;
        old_s = std::mem::replace(&mut s, ns);
        let nt = &old_t - &q * &t;
        old_t = std::mem::replace(&mut t, nt);
    }
    if old_r.is_negative() {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Row Hermite normal form: returns `(H, U)` with `U` unimodular and
/// `U·A = H`. Pivots are positive, entries above a pivot lie in
/// `[0, pivot)`, zero rows come last.
pub fn hnf(a: &LatticeMatrix) -> (LatticeMatrix, LatticeMatrix) {
    let mut h = a.clone();
    let mut u = LatticeMatrix::identity(a.rows);
    let mut pivot_row = 0;
    for col in 0..h.cols {
        if pivot_row == h.rows {
            break;
        }
        for i in pivot_row + 1..h.rows {
            if h[(i, col)].is_zero() {
                continue;
            }
            let p = h[(pivot_row, col)].clone();
            let b = h[(i, col)].clone();
            let (g, x, y) = extended_gcd(&p, &b);
            let u_coef = -(&b / &g);
            let v_coef = &p / &g;
            h.combine_rows(pivot_row, i, [&x, &y, &u_coef, &v_coef]);
            u.combine_rows(pivot_row, i, [&x, &y, &u_coef, &v_coef]);
        }
        if h[(pivot_row, col)].is_zero() {
            continue;
        }
        if h[(pivot_row, col)].is_negative() {
            h.negate_row(pivot_row);
            u.negate_row(pivot_row);
        }
        let pivot = h[(pivot_row, col)].clone();
        for i in 0..pivot_row {
            let q = h[(i, col)].div_floor(&pivot);
            if !q.is_zero() {
                let nq = -q;
                h.add_row_multiple(i, pivot_row, &nq);
                u.add_row_multiple(i, pivot_row, &nq);
            }
        }
        pivot_row += 1;
    }
    (h, u)
}

/// `U·A·V = D` with `U`, `V` unimodular and `D` diagonal, nonnegative,
/// with each diagonal entry dividing the next.
#[derive(Clone, Debug)]
pub struct SmithDecomposition {
    pub u: LatticeMatrix,
    pub d: LatticeMatrix,
    pub v: LatticeMatrix,
}

impl SmithDecomposition {
    /// Nonzero diagonal entries of `D`, in order.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        let k = self.d.rows.min(self.d.cols);
        (0..k).map(|i| self.d[(i, i)].clone()).filter(|e| !e.is_zero()).collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

struct SmithWork {
    d: LatticeMatrix,
    u: Option<LatticeMatrix>,
    v: Option<LatticeMatrix>,
}

impl SmithWork {
    fn swap_rows(&mut self, a: usize, b: usize) {
        self.d.swap_rows(a, b);
        if let Some(u) = &mut self.u {
            u.swap_rows(a, b);
        }
    }
    fn swap_cols(&mut self, a: usize, b: usize) {
        self.d.swap_cols(a, b);
        if let Some(v) = &mut self.v {
            v.swap_cols(a, b);
        }
    }
    fn add_row(&mut self, dst: usize, src: usize, c: &BigInt) {
        self.d.add_row_multiple(dst, src, c);
        if let Some(u) = &mut self.u {
            u.add_row_multiple(dst, src, c);
        }
    }
    fn add_col(&mut self, dst: usize, src: usize, c: &BigInt) {
        self.d.add_col_multiple(dst, src, c);
        if let Some(v) = &mut self.v {
            v.add_col_multiple(dst, src, c);
        }
    }
    fn negate_row(&mut self, i: usize) {
        self.d.negate_row(i);
        if let Some(u) = &mut self.u {
            u.negate_row(i);
        }
    }

    fn run(&mut self) {
        let (m, n) = (self.d.rows, self.d.cols);
        for t in 0..m.min(n) {
            loop {
                // pivot: smallest nonzero |entry| in the trailing block
                let mut best: Option<(usize, usize)> = None;
                for i in t..m {
                    for j in t..n {
                        let e = &self.d[(i, j)];
                        if e.is_zero() {
                            continue;
                        }
                        if best.is_none_or(|(bi, bj)| e.abs() < self.d[(bi, bj)].abs()) {
                            best = Some((i, j));
                        }
                    }
                }
                let Some((pi, pj)) = best else { return };
                self.swap_rows(t, pi);
                self.swap_cols(t, pj);
                let pivot = self.d[(t, t)].clone();
                let mut clean = true;
                for i in t + 1..m {
                    let q = self.d[(i, t)].div_floor(&pivot);
                    self.add_row(i, t, &-q);
                    clean &= self.d[(i, t)].is_zero();
                }
                for j in t + 1..n {
                    let q = self.d[(t, j)].div_floor(&pivot);
                    self.add_col(j, t, &-q);
                    clean &= self.d[(t, j)].is_zero();
                }
                if !clean {
                    continue;
                }
                let offender = (t + 1..m).find(|&i| (t + 1..n).any(|j| !self.d[(i, j)].is_multiple_of(&pivot)));
                match offender {
                    Some(i) => self.add_row(t, i, &BigInt::one()),
                    None => break,
                }
            }
            if self.d[(t, t)].is_negative() {
                self.negate_row(t);
            }
        }
    }
}

/// Smith normal form with both transforms.
pub fn snf(a: &LatticeMatrix) -> SmithDecomposition {
    let mut w = SmithWork {
        d: a.clone(),
        u: Some(LatticeMatrix::identity(a.rows)),
        v: Some(LatticeMatrix::identity(a.cols)),
    };
    w.run();
    SmithDecomposition { u: w.u.unwrap(), d: w.d, v: w.v.unwrap() }
}

/// Nonzero invariant factors only; skips transform bookkeeping.
pub fn invariant_factors(a: &LatticeMatrix) -> Vec<BigInt> {
    let mut w = SmithWork { d: a.clone(), u: None, v: None };
    w.run();
    let k = a.rows.min(a.cols);
    (0..k).map(|i| w.d[(i, i)].clone()).filter(|e| !e.is_zero()).collect()
}

/// Z-basis of `{x ∈ Z^n : A·x = 0}`, in row Hermite normal form.
pub fn kernel_basis(a: &LatticeMatrix) -> Vec<LatticeVector> {
    let (h, u) = hnf(&a.transpose());
    let rank = (0..h.rows).take_while(|&i| !h.row_slice(i).iter().all(Zero::is_zero)).count();
    let kernel: Vec<LatticeVector> = (rank..u.rows).map(|i| u.row(i)).collect();
    hnf_rows(a.cols, &kernel)
}

/// Nonzero rows of the Hermite normal form of the given row vectors.
pub fn hnf_rows(cols: usize, rows: &[LatticeVector]) -> Vec<LatticeVector> {
    if rows.is_empty() {
        return Vec::new();
    }
    let (h, _) = hnf(&LatticeMatrix::from_rows(cols, rows));
    h.row_vectors().into_iter().filter(|r| !r.is_zero()).collect()
}

/// Basis of `span_Q(B) ∩ Z^n`, in row Hermite normal form.
pub fn saturate(b: &[LatticeVector]) -> Vec<LatticeVector> {
    let Some(first) = b.first() else { return Vec::new() };
    let n = first.len();
    let orth = kernel_basis(&LatticeMatrix::from_rows(n, b));
    kernel_basis(&LatticeMatrix::from_rows(n, &orth))
}

/// Whether the Z-span of the vectors equals its saturation.
pub fn is_saturated(n: usize, b: &[LatticeVector]) -> bool {
    if b.is_empty() {
        return true;
    }
    invariant_factors(&LatticeMatrix::from_rows(n, b)).iter().all(One::is_one)
}

/// A surjection `Z^n → Z^{n-k}` whose kernel is a given saturated
/// sublattice of rank `k`.
#[derive(Clone, Debug)]
pub struct QuotientLattice {
    /// `(n-k) × n`; rows are an HNF basis of the annihilator of the sublattice.
    pub projection: LatticeMatrix,
    /// Rank of the quotient.
    pub rank: usize,
}

pub fn quotient_lattice(ambient_rank: usize, sub: &[LatticeVector]) -> Result<QuotientLattice> {
    if sub.iter().any(|v| v.len() != ambient_rank) {
        return Err(Error::DimensionMismatch { expected: ambient_rank, found: sub.iter().map(LatticeVector::len).find(|&l| l != ambient_rank).unwrap() });
    }
    if !is_saturated(ambient_rank, sub) {
        return Err(Error::NotSaturated);
    }
    let rows = kernel_basis(&LatticeMatrix::from_rows(ambient_rank, sub));
    let rank = rows.len();
    Ok(QuotientLattice { projection: LatticeMatrix::from_rows(ambient_rank, &rows), rank })
}

/// For `A` (k×n) whose rows are a basis of a saturated sublattice, an integer
/// `R` (n×k) with `A·R = I_k`. `None` when no integral right inverse exists.
pub fn right_inverse(a: &LatticeMatrix) -> Option<LatticeMatrix> {
    let k = a.rows;
    let s = snf(a);
    if (0..k).any(|i| i >= a.cols || !s.d[(i, i)].is_one()) {
        return None;
    }
    let cols: Vec<usize> = (0..k).collect();
    let all_rows: Vec<usize> = (0..a.cols).collect();
    let v_head = s.v.select(&all_rows, &cols);
    let r = &v_head * &s.u;
    debug_assert_eq!(&(a * &r), &LatticeMatrix::identity(k));
    Some(r)
}

/// Dense matrix over Q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix { rows, cols, data: vec![BigRational::zero(); rows * cols] }
    }

    pub fn from_integer(m: &LatticeMatrix) -> Self {
        RationalMatrix { rows: m.rows, cols: m.cols, data: m.data.iter().map(|e| BigRational::from_integer(e.clone())).collect() }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &RationalMatrix) -> RationalMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch in add");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        RationalMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn mul(&self, rhs: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in matrix product");
        let mut out = RationalMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let t = a * &rhs[(k, j)];
                    out[(i, j)] += t;
                }
            }
        }
        out
    }

    /// Rank by Gaussian elimination over Q.
    pub fn rank(&self) -> usize {
        let mut a = self.clone();
        let mut rank = 0;
        for col in 0..a.cols {
            if rank == a.rows {
                break;
            }
            let Some(p) = (rank..a.rows).find(|&i| !a[(i, col)].is_zero()) else {
                continue;
            };
            if p != rank {
                for j in 0..a.cols {
                    a.data.swap(p * a.cols + j, rank * a.cols + j);
                }
            }
            let pivot = a[(rank, col)].clone();
            for i in rank + 1..a.rows {
                if a[(i, col)].is_zero() {
                    continue;
                }
                let f = &a[(i, col)] / &pivot;
                for j in col..a.cols {
                    let t = &f * &a[(rank, j)];
                    a[(i, j)] -= t;
                }
            }
            rank += 1;
        }
        rank
    }
}

impl Index<(usize, usize)> for RationalMatrix {
    type Output = BigRational;
    fn index(&self, (i, j): (usize, usize)) -> &BigRational {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RationalMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigRational {
        &mut self.data[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(cols: usize, rows: &[&[i64]]) -> LatticeMatrix {
        LatticeMatrix::from_i64_rows(cols, rows)
    }

    fn v(e: &[i64]) -> LatticeVector {
        LatticeVector::from_i64s(e)
    }

    #[test]
    fn hnf_of_small_matrix() {
        let a = m(2, &[&[2, 4], &[6, 8]]);
        let (h, u) = hnf(&a);
        assert_eq!(h, m(2, &[&[2, 0], &[0, 4]]));
        assert_eq!(&u * &a, h);
        assert_eq!(u.determinant().abs(), BigInt::one());
    }

    #[test]
    fn hnf_fixed_points() {
        let id = LatticeMatrix::identity(3);
        let (h, u) = hnf(&id);
        assert_eq!(h, id);
        assert_eq!(u, id);
        let z = LatticeMatrix::zeros(2, 2);
        let (h, u) = hnf(&z);
        assert_eq!(h, z);
        assert_eq!(u, LatticeMatrix::identity(2));
    }

    #[test]
    fn hnf_reduces_above_pivots() {
        let a = m(3, &[&[3, 5, 7], &[0, 2, 9], &[1, 1, 1]]);
        let (h, u) = hnf(&a);
        assert_eq!(&u * &a, h);
        // pivots at (0,0), (1,1), (2,2); above-pivot entries reduced
        for c in 0..3 {
            let p = &h[(c, c)];
            assert!(p.is_positive());
            for r in 0..c {
                assert!(!h[(r, c)].is_negative() && &h[(r, c)] < p);
            }
        }
    }

    #[test]
    fn snf_examples() {
        let s = snf(&m(2, &[&[2, 4], &[6, 8]]));
        assert_eq!(s.invariant_factors(), vec![BigInt::from(2), BigInt::from(4)]);
        let s = snf(&LatticeMatrix::identity(3));
        assert_eq!(s.d, LatticeMatrix::identity(3));
        let a = m(2, &[&[1, 0], &[0, 1], &[-1, -1]]);
        let s = snf(&a);
        assert_eq!(&(&s.u * &a) * &s.v, s.d);
        assert_eq!(s.invariant_factors(), vec![BigInt::one(), BigInt::one()]);
    }

    #[test]
    fn snf_fixes_divisibility() {
        // diag(2,3) is not in Smith form; its form is diag(1,6)
        let a = m(2, &[&[2, 0], &[0, 3]]);
        let s = snf(&a);
        assert_eq!(s.invariant_factors(), vec![BigInt::one(), BigInt::from(6)]);
        assert_eq!(&(&s.u * &a) * &s.v, s.d);
    }

    #[test]
    fn kernel_examples() {
        let k = kernel_basis(&m(3, &[&[1, 1, 1]]));
        assert_eq!(k.len(), 2);
        for x in &k {
            assert!(m(3, &[&[1, 1, 1]]).apply(x).is_zero());
        }
        assert!(kernel_basis(&LatticeMatrix::identity(3)).is_empty());
        let k = kernel_basis(&LatticeMatrix::zeros(2, 3));
        assert_eq!(k, LatticeMatrix::identity(3).row_vectors());
    }

    #[test]
    fn saturate_examples() {
        assert_eq!(saturate(&[v(&[2, 0])]), vec![v(&[1, 0])]);
        assert_eq!(saturate(&[v(&[1, 1]), v(&[1, -1])]), vec![v(&[1, 0]), v(&[0, 1])]);
        assert!(saturate(&[]).is_empty());
    }

    #[test]
    fn quotient_examples() {
        let q = quotient_lattice(2, &[v(&[1, 0])]).unwrap();
        assert_eq!(q.projection, m(2, &[&[0, 1]]));
        assert_eq!(q.rank, 1);
        let q = quotient_lattice(3, &[]).unwrap();
        assert_eq!(q.projection, LatticeMatrix::identity(3));
        let q = quotient_lattice(2, &[v(&[1, 2])]).unwrap();
        assert_eq!(q.projection, m(2, &[&[2, -1]]));
        assert!(q.projection.apply(&v(&[1, 2])).is_zero());
        assert!(matches!(quotient_lattice(2, &[v(&[2, 0])]), Err(Error::NotSaturated)));
    }

    #[test]
    fn primitive_examples() {
        assert_eq!(primitive(&v(&[2, 4, 6])).unwrap(), v(&[1, 2, 3]));
        assert_eq!(primitive(&v(&[0, -3])).unwrap(), v(&[0, -1]));
        assert_eq!(primitive(&v(&[5])).unwrap(), v(&[1]));
        assert!(matches!(primitive(&v(&[0, 0])), Err(Error::ZeroVector)));
    }

    #[test]
    fn right_inverse_of_saturated_rows() {
        let a = m(3, &[&[1, 2, 3], &[0, 1, 4]]);
        let r = right_inverse(&a).unwrap();
        assert_eq!(&a * &r, LatticeMatrix::identity(2));
        assert!(right_inverse(&m(2, &[&[2, 0]])).is_none());
    }

    #[test]
    fn determinant_and_ranks() {
        let a = m(3, &[&[2, 0, 1], &[1, 3, 2], &[1, 1, 2]]);
        assert_eq!(a.determinant(), BigInt::from(6));
        let b = m(3, &[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(b.determinant(), BigInt::zero());
        assert_eq!(b.rational_rank(), 2);
        assert_eq!(RationalMatrix::from_integer(&b).rank(), 2);
        assert_eq!(invariant_factors(&b).len(), 2);
    }
}
