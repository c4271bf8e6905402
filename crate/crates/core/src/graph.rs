//! The unitary Cayley graph `Cay(M_n(F), GL_n(F))`: vertices are matrices,
//! `A ~ B` iff `A - B` is invertible.
//!
//! Common-neighbour counts depend only on `rank(A - B)`, so strong regularity
//! is decided from one intersection count per rank class. [`ExplicitGraph`]
//! materialises the whole adjacency relation for tiny cases and checks every
//! vertex pair from scratch.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use smallvec::SmallVec;

use crate::census::{gl_order, intersection_count_oracle, srg_parameters_n2};
use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::matrix::{checked_power, rank_in_place, Matrix, MatrixIndex, MatrixSpace};

/// Largest vertex count [`ExplicitGraph::build`] accepts.
pub const EXPLICIT_VERTEX_CAP: u64 = 1 << 16;

fn check_member(space: &MatrixSpace, m: &Matrix) -> Result<()> {
    if m.field() != space.field() {
        return Err(Error::MixedField);
    }
    if m.n() != space.n() {
        return Err(Error::DimensionMismatch {
            left: space.n(),
            right: m.n(),
        });
    }
    Ok(())
}

#[inline]
fn difference_invertible(a: &Matrix, b: &Matrix) -> bool {
    let f = a.field();
    let n = a.n();
    let mut diff: SmallVec<[FieldElement; 36]> = a
        .entries()
        .iter()
        .zip(b.entries())
        .map(|(&x, &y)| f.sub(x, y))
        .collect();
    rank_in_place(f, &mut diff, n, n) == n
}

/// `A ~ B` iff `A - B` is invertible.
pub fn adjacent(a: &Matrix, b: &Matrix) -> Result<bool> {
    if a.field() != b.field() {
        return Err(Error::MixedField);
    }
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch {
            left: a.n(),
            right: b.n(),
        });
    }
    Ok(difference_invertible(a, b))
}

/// `|N(A) ∩ N(B)|` by scanning every vertex.
pub fn common_neighbors_bruteforce(space: &MatrixSpace, a: &Matrix, b: &Matrix) -> Result<u64> {
    check_member(space, a)?;
    check_member(space, b)?;
    Ok(space.count_where(|c| difference_invertible(c, a) && difference_invertible(c, b)))
}

/// `|N(A) ∩ N(B)|` as the rank-`r` intersection count, `r = rank(A - B)`.
pub fn common_neighbors_by_rank(space: &MatrixSpace, a: &Matrix, b: &Matrix) -> Result<u64> {
    check_member(space, a)?;
    check_member(space, b)?;
    let r = a.sub(b)?.rank();
    if r == 0 {
        return Err(Error::IdenticalVertices);
    }
    intersection_count_oracle(space, r)
}

/// Degree of `v` by scanning every vertex.
pub fn vertex_degree(space: &MatrixSpace, v: &Matrix) -> Result<u64> {
    check_member(space, v)?;
    Ok(space.count_where(|c| difference_invertible(c, v)))
}

/// `count` seeded pairs of distinct vertices, drawn uniformly.
pub fn sample_distinct_pairs(
    space: &MatrixSpace,
    count: usize,
    seed: u64,
) -> Result<Vec<(Matrix, Matrix)>> {
    if space.size() < 2 {
        return Err(Error::InvalidParameter("need at least two vertices".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let (i, j) = (
            rng.gen_range(0..space.size()),
            rng.gen_range(0..space.size()),
        );
        if i != j {
            out.push((
                space.index_to_matrix(MatrixIndex(i))?,
                space.index_to_matrix(MatrixIndex(j))?,
            ));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RegularityMode {
    /// Degree of the zero vertex only; translations act transitively on vertices.
    #[default]
    SingleVertex,
    Exhaustive,
    Sampled {
        seed: u64,
        samples: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Regularity {
    pub degree: u64,
    pub uniform: bool,
}

/// Checks that every inspected vertex has degree `|GL_n(F)|`. Exhaustive mode
/// needs `q^(2n^2)` within `budget`.
pub fn regularity_check(
    space: &MatrixSpace,
    mode: RegularityMode,
    budget: u64,
) -> Result<Regularity> {
    let expected = gl_order(space.n() as u32, space.field().order() as u64)?;
    let vertices: Vec<u64> = match mode {
        RegularityMode::SingleVertex => vec![0],
        RegularityMode::Exhaustive => {
            let work = checked_power(space.size(), 2);
            if work > budget as u128 {
                return Err(Error::BudgetExceeded {
                    what: "vertex pairs",
                    required: work,
                    budget,
                });
            }
            (0..space.size()).collect()
        }
        RegularityMode::Sampled { seed, samples } => {
            let work = (space.size() as u128).saturating_mul(samples as u128);
            if work > budget as u128 {
                return Err(Error::BudgetExceeded {
                    what: "sampled vertex scans",
                    required: work,
                    budget,
                });
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..samples)
                .map(|_| rng.gen_range(0..space.size()))
                .collect()
        }
    };
    let mut degrees = BTreeSet::new();
    for v in vertices {
        let m = space.index_to_matrix(MatrixIndex(v))?;
        degrees.insert(vertex_degree(space, &m)?);
    }
    let degree = *degrees
        .iter()
        .next()
        .expect("at least one vertex inspected");
    Ok(Regularity {
        degree,
        uniform: degrees.len() == 1 && num_bigint::BigUint::from(degree) == expected,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub rank_pair: [u32; 2],
    pub counts: [u64; 2],
}

/// Outcome of [`srg_decide`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SrgReport {
    pub n: u32,
    pub q: u64,
    pub order: u64,
    pub degree: u64,
    pub lambda: u64,
    pub mu_by_rank: BTreeMap<u32, u64>,
    pub is_srg: bool,
    pub parameters: Option<[u64; 4]>,
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Decides strong regularity from per-rank common-neighbour counts.
///
/// `λ` is the rank-`n` count and `μ_r` the rank-`r` count for `1 <= r < n`.
/// The graph is strongly regular iff every `μ_r` coincides. At `n = 1` the
/// graph is complete and is reported as not strongly regular. For `n >= 3`
/// the witness realises ranks 1 and 2 by `E_11` and `diag(1,1,0,..,0)`
/// against the zero vertex.
pub fn srg_decide(space: &MatrixSpace) -> Result<SrgReport> {
    let n = space.n();
    let f = space.field();
    let q = f.order() as u64;
    let degree = intersection_count_oracle(space, 0)?;
    if num_bigint::BigUint::from(degree) != gl_order(n as u32, q)? {
        return Err(Error::Inconsistent(format!(
            "degree {degree} differs from |GL_{n}({q})|"
        )));
    }
    let lambda = intersection_count_oracle(space, n)?;
    let mut mu_by_rank = BTreeMap::new();
    for r in 1..n {
        mu_by_rank.insert(r as u32, intersection_count_oracle(space, r)?);
    }
    let mut report = SrgReport {
        n: n as u32,
        q,
        order: space.size(),
        degree,
        lambda,
        mu_by_rank,
        is_srg: false,
        parameters: None,
        witness: None,
        note: None,
    };
    if n == 1 {
        report.note = Some(format!(
            "complete graph K_{q}: no non-adjacent pairs, complete graphs are not counted as strongly regular"
        ));
        return Ok(report);
    }
    let mus: BTreeSet<u64> = report.mu_by_rank.values().copied().collect();
    report.is_srg = mus.len() == 1;
    if report.is_srg {
        let mu = *mus.iter().next().expect("one value");
        report.parameters = Some([report.order, degree, lambda, mu]);
        if n == 2 {
            let want = srg_parameters_n2(q)?;
            let got = [report.order, degree, lambda, mu].map(num_bigint::BigUint::from);
            if got != [want.v, want.k, want.lambda, want.mu] {
                return Err(Error::Inconsistent(format!(
                    "n = 2 parameters {:?} disagree with the closed form",
                    report.parameters
                )));
            }
        }
    } else {
        report.witness = Some(non_srg_witness(space, &report.mu_by_rank)?);
    }
    Ok(report)
}

fn non_srg_witness(space: &MatrixSpace, mu_by_rank: &BTreeMap<u32, u64>) -> Result<Witness> {
    let (r1, r2) = if mu_by_rank.get(&1) != mu_by_rank.get(&2) {
        (1, 2)
    } else {
        let first = mu_by_rank[&1];
        let other = mu_by_rank
            .iter()
            .find(|(_, &v)| v != first)
            .map(|(&r, _)| r)
            .expect("some rank class differs");
        (1, other)
    };
    let f = space.field();
    let zero = Matrix::zero(f, space.n());
    let mut counts = [0u64; 2];
    for (slot, r) in [r1, r2].into_iter().enumerate() {
        let rep = Matrix::canonical_rank_matrix(f, space.n(), r as usize)?;
        counts[slot] = common_neighbors_bruteforce(space, &rep, &zero)?;
        if counts[slot] != mu_by_rank[&r] {
            return Err(Error::Inconsistent(format!(
                "rank-{r} representative has {} common neighbours, rank class says {}",
                counts[slot], mu_by_rank[&r]
            )));
        }
    }
    Ok(Witness {
        rank_pair: [r1, r2],
        counts,
    })
}

/// From-scratch strong-regularity test over every vertex pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExplicitVerdict {
    pub vertices: u64,
    pub edges: u64,
    pub degrees: BTreeSet<u64>,
    pub lambdas: BTreeSet<u64>,
    pub mus: BTreeSet<u64>,
    pub is_srg: bool,
    pub parameters: Option<[u64; 4]>,
}

/// Full adjacency relation of `Cay(M_n(F), GL_n(F))`, one bit per ordered
/// vertex pair, vertices keyed by [`MatrixIndex`].
pub struct ExplicitGraph {
    vertices: u64,
    words_per_row: usize,
    rows: Vec<Vec<u64>>,
}

impl ExplicitGraph {
    pub fn build(space: &MatrixSpace) -> Result<Self> {
        if space.size() > EXPLICIT_VERTEX_CAP {
            return Err(Error::BudgetExceeded {
                what: "explicit graph vertices",
                required: space.size() as u128,
                budget: EXPLICIT_VERTEX_CAP,
            });
        }
        let v = space.size();
        let f = space.field();
        let q = f.order() as u64;
        let cells = space.n() * space.n();
        let invertible: Vec<bool> = space.iter().map(|m| m.is_invertible()).collect();
        let digits: Vec<FieldElement> = space.iter().flat_map(|m| m.entries().to_vec()).collect();
        let words_per_row = (v as usize).div_ceil(64);
        let rows = (0..v as usize)
            .into_par_iter()
            .map(|i| {
                let mut row = vec![0u64; words_per_row];
                let di = &digits[i * cells..(i + 1) * cells];
                for j in 0..v as usize {
                    let dj = &digits[j * cells..(j + 1) * cells];
                    let diff = di
                        .iter()
                        .zip(dj)
                        .rev()
                        .fold(0u64, |acc, (&x, &y)| acc * q + f.sub(x, y).code() as u64);
                    if invertible[diff as usize] {
                        row[j / 64] |= 1 << (j % 64);
                    }
                }
                row
            })
            .collect();
        Ok(ExplicitGraph {
            vertices: v,
            words_per_row,
            rows,
        })
    }

    pub fn vertex_count(&self) -> u64 {
        self.vertices
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.rows[i][j / 64] >> (j % 64) & 1 == 1
    }

    pub fn degree(&self, i: usize) -> u64 {
        self.rows[i].iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn edge_count(&self) -> u64 {
        (0..self.vertices as usize)
            .map(|i| self.degree(i))
            .sum::<u64>()
            / 2
    }

    pub fn common_neighbors(&self, i: usize, j: usize) -> u64 {
        (0..self.words_per_row)
            .map(|w| (self.rows[i][w] & self.rows[j][w]).count_ones() as u64)
            .sum()
    }

    /// Examines every unordered pair. Complete and edgeless graphs are not
    /// strongly regular.
    pub fn srg_test(&self) -> ExplicitVerdict {
        let v = self.vertices as usize;
        let degrees: BTreeSet<u64> = (0..v).map(|i| self.degree(i)).collect();
        let (lambdas, mus) = (0..v)
            .into_par_iter()
            .map(|i| {
                let mut lambdas = BTreeSet::new();
                let mut mus = BTreeSet::new();
                for j in i + 1..v {
                    let c = self.common_neighbors(i, j);
                    if self.adjacent(i, j) {
                        lambdas.insert(c);
                    } else {
                        mus.insert(c);
                    }
                }
                (lambdas, mus)
            })
            .reduce(
                || (BTreeSet::new(), BTreeSet::new()),
                |mut a, b| {
                    a.0.extend(b.0);
                    a.1.extend(b.1);
                    a
                },
            );
        let is_srg = degrees.len() == 1 && lambdas.len() == 1 && mus.len() == 1;
        let parameters = is_srg.then(|| {
            let first = |s: &BTreeSet<u64>| *s.iter().next().expect("nonempty");
            [self.vertices, first(&degrees), first(&lambdas), first(&mus)]
        });
        ExplicitVerdict {
            vertices: self.vertices,
            edges: self.edge_count(),
            degrees,
            lambdas,
            mus,
            is_srg,
            parameters,
        }
    }
}
