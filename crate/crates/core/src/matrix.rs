//! Dense square matrices over a [`FieldSpec`] with exact elimination, and
//! canonical enumeration of the full matrix algebra.

use std::fmt;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};

type Scratch = SmallVec<[FieldElement; 36]>;

/// Row echelon elimination in place; returns the rank of the `rows x cols`
/// row-major buffer. Pivot = first nonzero entry at or below the current row.
pub(crate) fn rank_in_place(
    f: &FieldSpec,
    m: &mut [FieldElement],
    rows: usize,
    cols: usize,
) -> usize {
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot) = (rank..rows).find(|&r| !m[r * cols + c].is_zero()) else {
            continue;
        };
        if pivot != rank {
            for j in c..cols {
                m.swap(pivot * cols + j, rank * cols + j);
            }
        }
        let pinv = f.inv(m[rank * cols + c]).expect("pivot is nonzero");
        for r in rank + 1..rows {
            let lead = m[r * cols + c];
            if lead.is_zero() {
                continue;
            }
            let factor = f.mul(lead, pinv);
            for j in c..cols {
                let t = f.mul(factor, m[rank * cols + j]);
                m[r * cols + j] = f.sub(m[r * cols + j], t);
            }
        }
        rank += 1;
    }
    rank
}

/// Determinant of an `n x n` row-major buffer, destroying it.
pub(crate) fn det_in_place(f: &FieldSpec, m: &mut [FieldElement], n: usize) -> FieldElement {
    let mut det = FieldElement::ONE;
    for c in 0..n {
        let Some(pivot) = (c..n).find(|&r| !m[r * n + c].is_zero()) else {
            return FieldElement::ZERO;
        };
        if pivot != c {
            for j in c..n {
                m.swap(pivot * n + j, c * n + j);
            }
            det = f.neg(det);
        }
        let p = m[c * n + c];
        det = f.mul(det, p);
        let pinv = f.inv(p).expect("pivot is nonzero");
        for r in c + 1..n {
            let lead = m[r * n + c];
            if lead.is_zero() {
                continue;
            }
            let factor = f.mul(lead, pinv);
            for j in c..n {
                let t = f.mul(factor, m[c * n + j]);
                m[r * n + j] = f.sub(m[r * n + j], t);
            }
        }
    }
    det
}

/// Rank of a row-major slice without allocating for matrices up to 6x6.
pub(crate) fn rank_of(f: &FieldSpec, entries: &[FieldElement], rows: usize, cols: usize) -> usize {
    let mut buf: Scratch = SmallVec::from_slice(entries);
    rank_in_place(f, &mut buf, rows, cols)
}

/// A witness `(P, Q, r)` with `P * A * Q = diag(I_r, 0)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankFactorization {
    pub p: Matrix,
    pub q: Matrix,
    pub rank: usize,
}

/// An `n x n` matrix over a finite field, stored row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    n: usize,
    entries: Vec<FieldElement>,
    field: FieldSpec,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix[{}]({})", self.field, self.to_literal())
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_literal())
    }
}

impl Matrix {
    pub fn from_entries(field: &FieldSpec, n: usize, entries: Vec<FieldElement>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "matrix side must be positive".into(),
            ));
        }
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                left: n * n,
                right: entries.len(),
            });
        }
        if let Some(bad) = entries.iter().find(|e| !field.contains(**e)) {
            return Err(Error::ElementOutOfRange {
                code: bad.code() as u64,
                q: field.order(),
            });
        }
        Ok(Matrix {
            n,
            entries,
            field: field.clone(),
        })
    }

    pub fn from_codes(field: &FieldSpec, n: usize, codes: &[u32]) -> Result<Self> {
        let entries = codes
            .iter()
            .map(|&c| field.element(c as u64))
            .collect::<Result<Vec<_>>>()?;
        Self::from_entries(field, n, entries)
    }

    pub fn zero(field: &FieldSpec, n: usize) -> Self {
        assert!(n > 0, "matrix side must be positive");
        Matrix {
            n,
            entries: vec![FieldElement::ZERO; n * n],
            field: field.clone(),
        }
    }

    pub fn identity(field: &FieldSpec, n: usize) -> Self {
        Self::canonical_rank_matrix(field, n, n).expect("r = n is in range")
    }

    /// The matrix unit with a single 1 at `(i, j)`, zero-based.
    pub fn unit(field: &FieldSpec, n: usize, i: usize, j: usize) -> Result<Self> {
        if i >= n || j >= n {
            return Err(Error::InvalidParameter(format!(
                "unit ({i},{j}) outside {n}x{n}"
            )));
        }
        let mut m = Self::zero(field, n);
        m.entries[i * n + j] = FieldElement::ONE;
        Ok(m)
    }

    /// `diag(I_r, 0)`: the canonical representative of rank `r`.
    pub fn canonical_rank_matrix(field: &FieldSpec, n: usize, r: usize) -> Result<Self> {
        if n == 0 || r > n {
            return Err(Error::InvalidParameter(format!(
                "rank {r} outside [0, {n}]"
            )));
        }
        let mut m = Self::zero(field, n);
        for i in 0..r {
            m.entries[i * n + i] = FieldElement::ONE;
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn entries(&self) -> &[FieldElement] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> FieldElement {
        self.entries[i * self.n + j]
    }

    /// Column `j` as a vector view (top to bottom).
    pub fn column(&self, j: usize) -> Vec<FieldElement> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let n = self.n;
        let entries = (0..n * n)
            .map(|t| self.entries[(t % n) * n + t / n])
            .collect();
        Matrix {
            n,
            entries,
            field: self.field.clone(),
        }
    }

    fn check_compatible(&self, other: &Matrix) -> Result<()> {
        if self.field != other.field {
            return Err(Error::MixedField);
        }
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    fn zip_with(
        &self,
        other: &Matrix,
        op: impl Fn(FieldElement, FieldElement) -> FieldElement,
    ) -> Result<Matrix> {
        self.check_compatible(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| op(a, b))
            .collect();
        Ok(Matrix {
            n: self.n,
            entries,
            field: self.field.clone(),
        })
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        let f = &self.field;
        self.zip_with(other, |a, b| f.add(a, b))
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        let f = &self.field;
        self.zip_with(other, |a, b| f.sub(a, b))
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        self.check_compatible(other)?;
        let (n, f) = (self.n, &self.field);
        let mut entries = vec![FieldElement::ZERO; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let t = f.mul(a, other.entries[k * n + j]);
                    entries[i * n + j] = f.add(entries[i * n + j], t);
                }
            }
        }
        Ok(Matrix {
            n,
            entries,
            field: f.clone(),
        })
    }

    pub fn scalar_mul(&self, c: FieldElement) -> Matrix {
        let f = &self.field;
        Matrix {
            n: self.n,
            entries: self.entries.iter().map(|&a| f.mul(c, a)).collect(),
            field: f.clone(),
        }
    }

    pub fn neg(&self) -> Matrix {
        let f = &self.field;
        Matrix {
            n: self.n,
            entries: self.entries.iter().map(|&a| f.neg(a)).collect(),
            field: f.clone(),
        }
    }

    pub fn rank(&self) -> usize {
        rank_of(&self.field, &self.entries, self.n, self.n)
    }

    pub fn determinant(&self) -> FieldElement {
        let mut buf: Scratch = SmallVec::from_slice(&self.entries);
        det_in_place(&self.field, &mut buf, self.n)
    }

    /// Invertibility via rank.
    pub fn is_invertible(&self) -> bool {
        self.rank() == self.n
    }

    /// Invertibility via the determinant; agrees with [`Matrix::is_invertible`].
    pub fn is_invertible_by_det(&self) -> bool {
        !self.determinant().is_zero()
    }

    /// Gauss-Jordan on `[A | I]`. Returns the reduced left block, the
    /// accumulated row operations and the pivot columns.
    fn gauss_jordan(&self) -> (Vec<FieldElement>, Vec<FieldElement>, Vec<usize>) {
        let (n, f) = (self.n, &self.field);
        let mut a = self.entries.clone();
        let mut p = Self::identity(f, n).entries;
        let mut pivots = Vec::with_capacity(n);
        for c in 0..n {
            let row = pivots.len();
            if row == n {
                break;
            }
            let Some(pv) = (row..n).find(|&r| !a[r * n + c].is_zero()) else {
                continue;
            };
            for j in 0..n {
                a.swap(pv * n + j, row * n + j);
                p.swap(pv * n + j, row * n + j);
            }
            let inv = f.inv(a[row * n + c]).expect("pivot is nonzero");
            for j in 0..n {
                a[row * n + j] = f.mul(inv, a[row * n + j]);
                p[row * n + j] = f.mul(inv, p[row * n + j]);
            }
            for r in 0..n {
                let lead = a[r * n + c];
                if r == row || lead.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let ta = f.mul(lead, a[row * n + j]);
                    a[r * n + j] = f.sub(a[r * n + j], ta);
                    let tp = f.mul(lead, p[row * n + j]);
                    p[r * n + j] = f.sub(p[r * n + j], tp);
                }
            }
            pivots.push(c);
        }
        (a, p, pivots)
    }

    pub fn inverse(&self) -> Result<Matrix> {
        let (_, p, pivots) = self.gauss_jordan();
        if pivots.len() < self.n {
            return Err(Error::Singular);
        }
        Ok(Matrix {
            n: self.n,
            entries: p,
            field: self.field.clone(),
        })
    }

    /// Invertible `P`, `Q` with `P * self * Q = diag(I_r, 0)`.
    ///
    /// `P` records the row operations reducing `self` to reduced row echelon
    /// form; `Q` clears the non-pivot columns and moves pivot columns to the
    /// front.
    pub fn rank_factorize(&self) -> RankFactorization {
        let (n, f) = (self.n, &self.field);
        let (mut b, p, pivots) = self.gauss_jordan();
        let mut q = Self::identity(f, n).entries;
        let non_pivots: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        for (i, &pc) in pivots.iter().enumerate() {
            for &j in &non_pivots {
                let factor = b[i * n + j];
                if factor.is_zero() {
                    continue;
                }
                // col_j -= factor * col_pc
                for r in 0..n {
                    let tb = f.mul(factor, b[r * n + pc]);
                    b[r * n + j] = f.sub(b[r * n + j], tb);
                    let tq = f.mul(factor, q[r * n + pc]);
                    q[r * n + j] = f.sub(q[r * n + j], tq);
                }
            }
        }
        let order: Vec<usize> = pivots.iter().chain(&non_pivots).copied().collect();
        let permuted: Vec<FieldElement> =
            (0..n * n).map(|t| q[(t / n) * n + order[t % n]]).collect();
        RankFactorization {
            p: Matrix {
                n,
                entries: p,
                field: f.clone(),
            },
            q: Matrix {
                n,
                entries: permuted,
                field: f.clone(),
            },
            rank: pivots.len(),
        }
    }

    /// Invertible with no nonzero fixed vector: both `A` and `A - I` invertible.
    pub fn is_linear_derangement(&self) -> bool {
        if !self.is_invertible() {
            return false;
        }
        let f = &self.field;
        let mut shifted: Scratch = SmallVec::from_slice(&self.entries);
        for i in 0..self.n {
            let d = i * self.n + i;
            shifted[d] = f.sub(shifted[d], FieldElement::ONE);
        }
        rank_in_place(f, &mut shifted, self.n, self.n) == self.n
    }

    /// `det(v1, a2, .., an) != 0` and `a1 + v1` lies in the span of
    /// `a2, .., an`, where `a_i` are the columns and `v1 = e_1`.
    pub fn det_lemma_rhs(&self) -> bool {
        let (n, f) = (self.n, &self.field);
        let mut swapped: Scratch = SmallVec::from_slice(&self.entries);
        for i in 0..n {
            swapped[i * n] = if i == 0 {
                FieldElement::ONE
            } else {
                FieldElement::ZERO
            };
        }
        if det_in_place(f, &mut swapped, n).is_zero() {
            return false;
        }
        // rows of [a2 .. an] and of [a2 .. an | a1 + v1]
        let mut rest: Scratch = SmallVec::new();
        let mut extended: Scratch = SmallVec::new();
        for i in 0..n {
            rest.extend_from_slice(&self.entries[i * n + 1..(i + 1) * n]);
            extended.extend_from_slice(&self.entries[i * n + 1..(i + 1) * n]);
            let shifted = if i == 0 {
                f.add(self.entries[0], FieldElement::ONE)
            } else {
                self.entries[i * n]
            };
            extended.push(shifted);
        }
        rank_in_place(f, &mut rest, n, n - 1) == rank_in_place(f, &mut extended, n, n)
    }

    /// Parses `"1,0;0,1"`: rows separated by `;`, entries by `,`, entries as
    /// element codes.
    pub fn parse_literal(field: &FieldSpec, s: &str) -> Result<Matrix> {
        let rows: Vec<&str> = s.trim().split(';').collect();
        let n = rows.len();
        let mut codes = Vec::with_capacity(n * n);
        for row in &rows {
            let before = codes.len();
            for tok in row.split(',') {
                let code: u64 = tok
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad matrix entry {tok:?} in {s:?}")))?;
                codes.push(field.element(code)?);
            }
            if codes.len() - before != n {
                return Err(Error::Parse(format!("matrix literal {s:?} is not square")));
            }
        }
        Matrix::from_entries(field, n, codes)
    }

    pub fn to_literal(&self) -> String {
        self.entries
            .chunks(self.n)
            .map(|row| {
                row.iter()
                    .map(|e| e.code().to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect::<Vec<_>>()
            .join(";")
    }
}

/// Position of a matrix in the canonical enumeration of `M_n(F)`: the base-`q`
/// number whose digits are the entry codes in row-major order, entry `(0,0)`
/// least significant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MatrixIndex(pub u64);

/// The full matrix algebra `M_n(F)` as an enumerable index range.
#[derive(Debug, Clone)]
pub struct MatrixSpace {
    n: usize,
    field: FieldSpec,
    size: u64,
}

/// `q^e` saturating at `u128::MAX`.
pub(crate) fn checked_power(q: u64, e: u64) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..e {
        acc = match acc.checked_mul(q as u128) {
            Some(v) => v,
            None => return u128::MAX,
        };
    }
    acc
}

impl MatrixSpace {
    /// `M_n(F)`, refused when `q^(n^2)` exceeds `budget`.
    pub fn new(field: &FieldSpec, n: usize, budget: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "matrix side must be positive".into(),
            ));
        }
        let required = checked_power(field.order() as u64, (n * n) as u64);
        if required > budget as u128 {
            return Err(Error::BudgetExceeded {
                what: "matrices",
                required,
                budget,
            });
        }
        Ok(MatrixSpace {
            n,
            field: field.clone(),
            size: required as u64,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn index_to_matrix(&self, index: MatrixIndex) -> Result<Matrix> {
        if index.0 >= self.size {
            return Err(Error::IndexOutOfRange {
                index: index.0,
                size: self.size,
            });
        }
        let q = self.field.order() as u64;
        let mut rest = index.0;
        let entries = (0..self.n * self.n)
            .map(|_| {
                let d = rest % q;
                rest /= q;
                self.field.element(d).expect("digit below q")
            })
            .collect();
        Ok(Matrix {
            n: self.n,
            entries,
            field: self.field.clone(),
        })
    }

    pub fn matrix_to_index(&self, m: &Matrix) -> Result<MatrixIndex> {
        if m.field != self.field {
            return Err(Error::MixedField);
        }
        if m.n != self.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: m.n,
            });
        }
        let q = self.field.order() as u64;
        Ok(MatrixIndex(
            m.entries
                .iter()
                .rev()
                .fold(0u64, |acc, e| acc * q + e.code() as u64),
        ))
    }

    /// Every matrix in index order.
    pub fn iter(&self) -> MatrixIter {
        self.range(0, self.size).expect("full range is valid")
    }

    /// Matrices with index in `[lo, hi)`.
    pub fn range(&self, lo: u64, hi: u64) -> Result<MatrixIter> {
        if lo > hi || hi > self.size {
            return Err(Error::IndexOutOfRange {
                index: hi.max(lo),
                size: self.size,
            });
        }
        let current = if lo < self.size {
            Some(self.index_to_matrix(MatrixIndex(lo))?)
        } else {
            None
        };
        Ok(MatrixIter {
            current,
            remaining: hi - lo,
        })
    }

    /// Visits `[lo, hi)` in index order, reusing one matrix buffer.
    pub fn for_each_in(&self, lo: u64, hi: u64, mut visit: impl FnMut(&Matrix)) {
        if lo >= hi {
            return;
        }
        let mut m = self.index_to_matrix(MatrixIndex(lo)).expect("lo in range");
        for i in lo..hi {
            visit(&m);
            if i + 1 < hi {
                increment(&mut m);
            }
        }
    }

    /// Contiguous chunk bounds covering the whole space.
    fn chunks(&self) -> Vec<(u64, u64)> {
        let pieces = (rayon::current_num_threads() as u64 * 8).clamp(1, self.size.max(1));
        let step = self.size.div_ceil(pieces);
        (0..pieces)
            .map(|c| (c * step, ((c + 1) * step).min(self.size)))
            .filter(|(lo, hi)| lo < hi)
            .collect()
    }

    /// Partitioned reduction over the whole space. Each chunk folds into its
    /// own accumulator; accumulators are merged in chunk order.
    pub fn par_fold<A, Fold, Merge>(
        &self,
        init: impl Fn() -> A + Sync,
        fold: Fold,
        merge: Merge,
    ) -> A
    where
        A: Send,
        Fold: Fn(&mut A, &Matrix) + Sync,
        Merge: Fn(A, A) -> A + Sync,
    {
        use rayon::prelude::*;
        let parts: Vec<A> = self
            .chunks()
            .into_par_iter()
            .map(|(lo, hi)| {
                let mut acc = init();
                self.for_each_in(lo, hi, |m| fold(&mut acc, m));
                acc
            })
            .collect();
        parts.into_iter().fold(init(), merge)
    }

    /// Number of matrices satisfying `pred`.
    pub fn count_where(&self, pred: impl Fn(&Matrix) -> bool + Sync) -> u64 {
        self.par_fold(
            || 0u64,
            |acc, m| {
                if pred(m) {
                    *acc += 1;
                }
            },
            |a, b| a + b,
        )
    }
}

fn increment(m: &mut Matrix) {
    let q = m.field.order();
    for e in m.entries.iter_mut() {
        let next = e.code() + 1;
        if next < q {
            *e = FieldElement::from_code_unchecked(next);
            return;
        }
        *e = FieldElement::ZERO;
    }
}

/// Iterator over a contiguous index range of a [`MatrixSpace`].
pub struct MatrixIter {
    current: Option<Matrix>,
    remaining: u64,
}

impl Iterator for MatrixIter {
    type Item = Matrix;

    fn next(&mut self) -> Option<Matrix> {
        if self.remaining == 0 {
            return None;
        }
        let m = self.current.as_mut()?;
        let out = m.clone();
        self.remaining -= 1;
        if self.remaining > 0 {
            increment(m);
        }
        Some(out)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let r = usize::try_from(self.remaining).unwrap_or(usize::MAX);
        (r, Some(r))
    }
}
