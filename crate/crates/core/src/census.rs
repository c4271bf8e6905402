//! Closed-form counts and the brute-force oracles that check them.
//!
//! Every count here is the size of a set of the form
//! `(diag(I_r, 0) + GL_n(F)) ∩ GL_n(F)` for some rank `r`, or one of the
//! auxiliary quantities used to derive those sizes. Formulas are evaluated in
//! arbitrary precision; oracles enumerate `M_n(F)` in full.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{prime_power_parts, FieldElement};
use crate::matrix::{rank_of, Matrix, MatrixSpace};

fn check_q(q: u64) -> Result<()> {
    prime_power_parts(q)
        .map(|_| ())
        .ok_or(Error::NotPrimePower(q))
}

fn pow(q: u64, e: u32) -> BigInt {
    BigInt::from(q).pow(e)
}

fn to_count(v: BigInt, what: &str) -> Result<BigUint> {
    v.to_biguint()
        .ok_or_else(|| Error::Inconsistent(format!("{what} evaluated to a negative count")))
}

/// `prod_{k=lo}^{hi} (q^n - q^k)`; empty products are 1.
fn tail_product(n: u32, q: u64, lo: u32, hi: u32) -> BigInt {
    let qn = pow(q, n);
    (lo..=hi).fold(BigInt::one(), |acc, k| acc * (&qn - pow(q, k)))
}

/// `|GL_n(F_q)| = prod_{k=1}^{n} (q^n - q^(k-1))`.
pub fn gl_order(n: u32, q: u64) -> Result<BigUint> {
    if n < 1 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    check_q(q)?;
    to_count(tail_product(n, q, 0, n - 1), "gl_order")
}

/// Number of linear derangements `e_n` in `M_n(F_q)`, from
/// `e_n = e_{n-1} (q^n - 1) q^(n-1) + (-1)^n q^(n(n-1)/2)` with `e_0 = 1`.
pub fn derangements_formula(n: u32, q: u64) -> Result<BigUint> {
    check_q(q)?;
    let mut e = BigInt::one();
    for m in 1..=n {
        let sign = if m % 2 == 0 {
            BigInt::one()
        } else {
            -BigInt::one()
        };
        e = e * (pow(q, m) - 1) * pow(q, m - 1) + sign * pow(q, m * (m - 1) / 2);
    }
    to_count(e, "derangements_formula")
}

/// `|(E_11 + GL_n) ∩ GL_n| = (q^n - q^(n-1) - 1) prod_{k=1}^{n-1} (q^n - q^k)`.
pub fn lemma31_formula(n: u32, q: u64) -> Result<BigUint> {
    if n < 1 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    check_q(q)?;
    let lead = pow(q, n) - pow(q, n - 1) - 1;
    to_count(lead * tail_product(n, q, 1, n - 1), "lemma31_formula")
}

/// `|(diag(1,1,0,..,0) + GL_n) ∩ GL_n|
///   = (q^2n - q^(2n-1) - q^(2n-2) + q^(2n-3) + q^(n-1) - q^(n+1) + q) prod_{k=2}^{n-1} (q^n - q^k)`.
pub fn lemma32_formula(n: u32, q: u64) -> Result<BigUint> {
    if n < 2 {
        return Err(Error::InvalidParameter("rank-2 count needs n >= 2".into()));
    }
    check_q(q)?;
    let lead =
        pow(q, 2 * n) - pow(q, 2 * n - 1) - pow(q, 2 * n - 2) + pow(q, 2 * n - 3) + pow(q, n - 1)
            - pow(q, n + 1)
            + BigInt::from(q);
    to_count(lead * tail_product(n, q, 2, n - 1), "lemma32_formula")
}

/// Split of the rank-2 intersection count by the rank of the leading 2x2
/// block. Fields are named by that rank.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CaseCounts<T> {
    pub rank2: T,
    pub rank0: T,
    pub rank1: T,
}

impl<T: Clone + std::iter::Sum<T>> CaseCounts<T> {
    pub fn total(&self) -> T {
        [self.rank2.clone(), self.rank0.clone(), self.rank1.clone()]
            .into_iter()
            .sum()
    }
}

/// Per-case closed forms, valid for `n >= 3`:
/// rank 2: `e_2 q^(2n-4) P`, rank 0: `(q^(n-2) - 1)(q^(n-2) - q) P`,
/// rank 1: `[(q^2 - 1)(q^2 - q) - e_2 - 1] q^(n-2) (q^(n-2) - 1) P`,
/// with `P = prod_{k=2}^{n-1} (q^n - q^k)`.
pub fn lemma32_case_formulas(n: u32, q: u64) -> Result<CaseCounts<BigUint>> {
    if n < 3 {
        return Err(Error::InvalidParameter(
            "case decomposition needs n >= 3".into(),
        ));
    }
    let e2 = BigInt::from(derangements_formula(2, q)?);
    let prod = tail_product(n, q, 2, n - 1);
    let qm = pow(q, n - 2);
    let m1 = (pow(q, 2) - 1) * (pow(q, 2) - q);
    Ok(CaseCounts {
        rank2: to_count(&e2 * pow(q, 2 * n - 4) * &prod, "case 1")?,
        rank0: to_count((&qm - 1) * (&qm - q) * &prod, "case 2")?,
        rank1: to_count((m1 - &e2 - 1) * &qm * (&qm - 1) * &prod, "case 3")?,
    })
}

/// Closed form for the rank-`r` intersection count, where one is known:
/// `r = 0` (the group order), `r = n` (derangements), `r = 1`, `r = 2`.
pub fn formula_for_rank(n: u32, q: u64, r: u32) -> Result<Option<BigUint>> {
    if r > n {
        return Err(Error::InvalidParameter(format!(
            "rank {r} outside [0, {n}]"
        )));
    }
    Ok(match r {
        0 => Some(gl_order(n, q)?),
        r if r == n => Some(derangements_formula(n, q)?),
        1 => Some(lemma31_formula(n, q)?),
        2 => Some(lemma32_formula(n, q)?),
        _ => None,
    })
}

/// `(v, k, λ, μ)` of a strongly regular graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SrgParameters<T> {
    pub v: T,
    pub k: T,
    pub lambda: T,
    pub mu: T,
}

/// Parameters of `Cay(M_2(F_q), GL_2(F_q))`:
/// `(q^4, q^4 - q^3 - q^2 + q, q^4 - 2q^3 - q^2 + 3q, q^4 - 2q^3 + q)`.
pub fn srg_parameters_n2(q: u64) -> Result<SrgParameters<BigUint>> {
    check_q(q)?;
    let (q1, q2, q3, q4) = (BigInt::from(q), pow(q, 2), pow(q, 3), pow(q, 4));
    Ok(SrgParameters {
        v: to_count(q4.clone(), "v")?,
        k: to_count(&q4 - &q3 - &q2 + &q1, "k")?,
        lambda: to_count(&q4 - 2 * &q3 - &q2 + 3 * &q1, "lambda")?,
        mu: to_count(&q4 - 2 * &q3 + &q1, "mu")?,
    })
}

/// Counts linear derangements by enumerating all of `M_n(F)`.
pub fn derangements_oracle(space: &MatrixSpace) -> u64 {
    space.count_where(Matrix::is_linear_derangement)
}

/// `M` invertible and `M - diag(I_r, 0)` invertible.
fn in_shifted_intersection(m: &Matrix, r: usize) -> bool {
    let (n, f) = (m.n(), m.field());
    if rank_of(f, m.entries(), n, n) < n {
        return false;
    }
    let mut shifted: smallvec::SmallVec<[FieldElement; 36]> =
        smallvec::SmallVec::from_slice(m.entries());
    for i in 0..r {
        shifted[i * n + i] = f.sub(shifted[i * n + i], FieldElement::ONE);
    }
    crate::matrix::rank_in_place(f, &mut shifted, n, n) == n
}

/// `|(diag(I_r, 0) + GL_n(F)) ∩ GL_n(F)|` by full enumeration of `M_n(F)`.
pub fn intersection_count_oracle(space: &MatrixSpace, r: usize) -> Result<u64> {
    if r > space.n() {
        return Err(Error::InvalidParameter(format!(
            "rank {r} outside [0, {}]",
            space.n()
        )));
    }
    Ok(space.count_where(|m| in_shifted_intersection(m, r)))
}

/// Enumerates `{A in GL_n : I_2 + A_1 in GL_2}`, `A_1` the leading 2x2 block
/// of `A`, and classifies each member by `rank(A_1)`. This set is in
/// bijection with the rank-2 intersection (via `M -> -M^{-1}`), so the case
/// totals sum to `intersection_count_oracle(space, 2)`.
pub fn lemma32_case_decomposition(space: &MatrixSpace) -> Result<CaseCounts<u64>> {
    let n = space.n();
    if n < 3 {
        return Err(Error::InvalidParameter(
            "case decomposition needs n >= 3".into(),
        ));
    }
    let counts = space.par_fold(
        || [0u64; 3],
        |acc, a| {
            let f = a.field();
            let block = [a.get(0, 0), a.get(0, 1), a.get(1, 0), a.get(1, 1)];
            let shifted = [
                f.add(block[0], FieldElement::ONE),
                block[1],
                block[2],
                f.add(block[3], FieldElement::ONE),
            ];
            if rank_of(f, &shifted, 2, 2) == 2 && a.is_invertible() {
                acc[rank_of(f, &block, 2, 2)] += 1;
            }
        },
        |a, b| [a[0] + b[0], a[1] + b[1], a[2] + b[2]],
    );
    Ok(CaseCounts {
        rank2: counts[2],
        rank0: counts[0],
        rank1: counts[1],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Formula,
    Oracle,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Formula => "formula",
            Method::Oracle => "oracle",
        })
    }
}

/// One count of `|(diag(I_r, 0) + GL_n(F_q)) ∩ GL_n(F_q)|`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRecord {
    pub n: u32,
    pub q: u64,
    pub rank: u32,
    pub method: Method,
    #[serde(with = "decimal_string")]
    pub count: BigUint,
}

mod decimal_string {
    use num_bigint::BigUint;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_str_radix(10))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        BigUint::parse_bytes(s.as_bytes(), 10)
            .ok_or_else(|| D::Error::custom(format!("bad count {s:?}")))
    }
}

impl CensusRecord {
    pub fn formula(n: u32, q: u64, rank: u32) -> Result<Option<CensusRecord>> {
        Ok(formula_for_rank(n, q, rank)?.map(|count| CensusRecord {
            n,
            q,
            rank,
            method: Method::Formula,
            count,
        }))
    }

    pub fn oracle(space: &MatrixSpace, rank: u32) -> Result<CensusRecord> {
        let count = intersection_count_oracle(space, rank as usize)?;
        Ok(CensusRecord {
            n: space.n() as u32,
            q: space.field().order() as u64,
            rank,
            method: Method::Oracle,
            count: BigUint::from(count),
        })
    }
}

/// Returns `true` when the recurrence step holds at `n`; `n >= 1`.
pub fn recurrence_holds(n: u32, q: u64) -> Result<bool> {
    if n < 1 {
        return Err(Error::InvalidParameter("recurrence starts at n = 1".into()));
    }
    let prev = BigInt::from(derangements_formula(n - 1, q)?);
    let sign = if n.is_multiple_of(2) {
        BigInt::one()
    } else {
        -BigInt::one()
    };
    let rhs: BigInt = prev * (pow(q, n) - 1) * pow(q, n - 1) + sign * pow(q, n * (n - 1) / 2);
    Ok(!rhs.is_negative() && BigInt::from(derangements_formula(n, q)?) == rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn space(p: u64, k: u32, n: usize) -> MatrixSpace {
        MatrixSpace::new(&make_field(p, k).unwrap(), n, 1 << 22).unwrap()
    }

    /// Independent count of `GL_n(F_q)`: enumerate and test invertibility.
    fn gl_brute(s: &MatrixSpace) -> u64 {
        s.iter().filter(Matrix::is_invertible).count() as u64
    }

    #[test]
    fn gl_order_examples() {
        assert_eq!(gl_order(1, 2).unwrap(), big(1));
        assert_eq!(gl_order(2, 2).unwrap(), big(gl_brute(&space(2, 1, 2))));
        assert_eq!(gl_order(2, 2).unwrap(), big(6));
        assert_eq!(gl_order(2, 3).unwrap(), big(gl_brute(&space(3, 1, 2))));
        assert_eq!(gl_order(2, 3).unwrap(), big(48));
        assert!(gl_order(0, 2).is_err());
        assert_eq!(gl_order(2, 6).unwrap_err(), Error::NotPrimePower(6));
    }

    #[test]
    fn gl_order_exceeds_u64_without_overflow() {
        let g = gl_order(6, 9).unwrap();
        assert!(g > BigUint::from(u64::MAX));
    }

    #[test]
    fn derangement_base_case_matches_enumeration() {
        // e_1 counts field elements other than 0 and 1
        for q in [2u64, 3, 4, 5, 7, 8, 9] {
            assert_eq!(derangements_formula(1, q).unwrap(), big(q - 2));
            assert_eq!(derangements_formula(0, q).unwrap(), big(1));
        }
        assert_eq!(derangements_formula(1, 3).unwrap(), big(1));
        assert_eq!(derangements_formula(2, 2).unwrap(), big(2));
    }

    #[test]
    fn derangement_oracle_examples() {
        assert_eq!(derangements_oracle(&space(2, 1, 1)), 0);
        assert_eq!(derangements_oracle(&space(3, 1, 1)), 1);
        assert_eq!(derangements_oracle(&space(2, 1, 2)), 2);
    }

    #[test]
    fn lemma31_examples() {
        for q in [2u64, 3, 4, 5] {
            assert_eq!(lemma31_formula(1, q).unwrap(), big(q - 2));
        }
        assert_eq!(lemma31_formula(2, 2).unwrap(), big(2));
        assert_eq!(lemma31_formula(3, 2).unwrap(), big(72));
        assert_eq!(intersection_count_oracle(&space(2, 1, 3), 1).unwrap(), 72);
    }

    #[test]
    fn lemma32_examples() {
        for q in [2u64, 3, 4, 5, 7, 8, 9, 11] {
            let q_ = q as i128;
            let want = q_.pow(4) - 2 * q_.pow(3) - q_.pow(2) + 3 * q_;
            assert_eq!(lemma32_formula(2, q).unwrap(), BigUint::from(want as u128));
            assert_eq!(
                lemma32_formula(2, q).unwrap(),
                derangements_formula(2, q).unwrap()
            );
        }
        assert_eq!(lemma32_formula(3, 2).unwrap(), big(56));
        assert!(lemma32_formula(1, 2).is_err());
        let oracle = intersection_count_oracle(&space(3, 1, 3), 2).unwrap();
        assert_eq!(lemma32_formula(3, 3).unwrap(), big(oracle));
    }

    #[test]
    fn intersection_oracle_endpoints() {
        for (p, k, n) in [(2, 1, 2), (3, 1, 2), (2, 2, 2), (2, 1, 3)] {
            let s = space(p, k, n);
            let q = s.field().order() as u64;
            assert_eq!(
                big(intersection_count_oracle(&s, 0).unwrap()),
                gl_order(n as u32, q).unwrap()
            );
            assert_eq!(
                intersection_count_oracle(&s, n).unwrap(),
                derangements_oracle(&s)
            );
        }
        assert_eq!(intersection_count_oracle(&space(2, 1, 2), 1).unwrap(), 2);
        assert!(intersection_count_oracle(&space(2, 1, 2), 3).is_err());
    }

    #[test]
    fn case_decomposition_small() {
        let s = space(2, 1, 3);
        let cases = lemma32_case_decomposition(&s).unwrap();
        assert_eq!(cases.rank2, 32);
        assert_eq!(cases.total(), intersection_count_oracle(&s, 2).unwrap());
        let formulas = lemma32_case_formulas(3, 2).unwrap();
        assert_eq!(formulas.rank2, big(cases.rank2));
        assert_eq!(formulas.rank0, big(cases.rank0));
        assert_eq!(formulas.rank1, big(cases.rank1));
        assert_eq!(formulas.total(), lemma32_formula(3, 2).unwrap());
        assert!(lemma32_case_decomposition(&space(2, 1, 2)).is_err());
    }

    #[test]
    fn case_formulas_sum_to_total() {
        for n in 3..=7 {
            for q in [2u64, 3, 4, 5, 7, 8, 9] {
                assert_eq!(
                    lemma32_case_formulas(n, q).unwrap().total(),
                    lemma32_formula(n, q).unwrap(),
                    "n={n} q={q}"
                );
            }
        }
    }

    #[test]
    fn formula_oracle_agreement_sweep() {
        // every (n, q) with q^(n^2) <= 2^20
        for (p, k, n) in [
            (2, 1, 1),
            (3, 1, 1),
            (2, 2, 1),
            (5, 1, 1),
            (2, 1, 2),
            (3, 1, 2),
            (2, 2, 2),
            (5, 1, 2),
            (7, 1, 2),
            (2, 3, 2),
            (3, 2, 2),
            (2, 1, 3),
        ] {
            let s = space(p, k, n);
            let q = s.field().order() as u64;
            for r in 0..=n as u32 {
                if let Some(formula) = formula_for_rank(n as u32, q, r).unwrap() {
                    let oracle = intersection_count_oracle(&s, r as usize).unwrap();
                    assert_eq!(formula, big(oracle), "n={n} q={q} r={r}");
                }
            }
            assert_eq!(
                derangements_formula(n as u32, q).unwrap(),
                big(derangements_oracle(&s)),
                "n={n} q={q}"
            );
        }
    }

    #[test]
    fn recurrence_regression() {
        for n in 1..=8 {
            for q in [2u64, 3, 4, 5, 7, 9] {
                assert!(recurrence_holds(n, q).unwrap());
            }
        }
    }

    #[test]
    fn rank1_and_rank2_counts_differ_beyond_n2() {
        for n in 3..=6 {
            for q in [2u64, 3, 4, 5, 7, 8, 9] {
                assert_ne!(
                    lemma31_formula(n, q).unwrap(),
                    lemma32_formula(n, q).unwrap()
                );
            }
        }
    }

    #[test]
    fn srg_parameters_examples() {
        let p2 = srg_parameters_n2(2).unwrap();
        assert_eq!(
            (p2.v, p2.k, p2.lambda, p2.mu),
            (big(16), big(6), big(2), big(2))
        );
        let p3 = srg_parameters_n2(3).unwrap();
        assert_eq!(
            (p3.v, p3.k, p3.lambda, p3.mu),
            (big(81), big(48), big(27), big(30))
        );
        for q in [2u64, 3, 4, 5, 7, 8, 9] {
            let p = srg_parameters_n2(q).unwrap();
            assert_eq!(p.k, gl_order(2, q).unwrap());
            assert_eq!(p.lambda, derangements_formula(2, q).unwrap());
            assert_eq!(p.mu, lemma31_formula(2, q).unwrap());
        }
    }

    #[test]
    fn record_json_uses_decimal_string() {
        let rec = CensusRecord::formula(3, 2, 1).unwrap().unwrap();
        let json = serde_json::to_string(&rec).unwrap();
        assert_eq!(
            json,
            r#"{"n":3,"q":2,"rank":1,"method":"formula","count":"72"}"#
        );
        let back: CensusRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back, rec);
        assert_eq!(CensusRecord::formula(4, 2, 3).unwrap(), None);
    }
}
