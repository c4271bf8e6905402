use cayley_core::graph::adjacent;
use cayley_core::{make_field, FieldSpec, Matrix, MatrixIndex, MatrixSpace};
use proptest::prelude::*;

const FIELDS: [(u64, u32); 6] = [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (3, 2)];

fn field(i: usize) -> FieldSpec {
    let (p, k) = FIELDS[i];
    make_field(p, k).unwrap()
}

fn matrix(f: &FieldSpec, n: usize, raw: &[u32]) -> Matrix {
    let codes: Vec<u32> = raw[..n * n].iter().map(|c| c % f.order()).collect();
    Matrix::from_codes(f, n, &codes).unwrap()
}

fn raw() -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(any::<u32>(), 16)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn index_round_trip(fi in 0..FIELDS.len(), n in 1usize..=3, seed in any::<u64>()) {
        let f = field(fi);
        let space = MatrixSpace::new(&f, n, 1 << 62).unwrap();
        let i = MatrixIndex(seed % space.size());
        let m = space.index_to_matrix(i).unwrap();
        prop_assert_eq!(space.matrix_to_index(&m).unwrap(), i);
    }

    #[test]
    fn rank_factorization_postcondition(fi in 0..FIELDS.len(), n in 1usize..=4, a in raw()) {
        let f = field(fi);
        let a = matrix(&f, n, &a);
        let rf = a.rank_factorize();
        prop_assert!(rf.p.is_invertible() && rf.q.is_invertible());
        let reduced = rf.p.mul(&a).unwrap().mul(&rf.q).unwrap();
        prop_assert_eq!(reduced, Matrix::canonical_rank_matrix(&f, n, rf.rank).unwrap());
        prop_assert_eq!(rf.rank, a.rank());
    }

    #[test]
    fn rank_is_two_sided_gl_invariant(fi in 0..FIELDS.len(), n in 1usize..=4, a in raw(), p in raw(), q in raw()) {
        let f = field(fi);
        let (a, p, q) = (matrix(&f, n, &a), matrix(&f, n, &p), matrix(&f, n, &q));
        prop_assume!(p.is_invertible() && q.is_invertible());
        prop_assert_eq!(p.mul(&a).unwrap().mul(&q).unwrap().rank(), a.rank());
    }

    #[test]
    fn determinant_and_rank_agree(fi in 0..FIELDS.len(), n in 1usize..=4, a in raw()) {
        let f = field(fi);
        let a = matrix(&f, n, &a);
        prop_assert_eq!(a.is_invertible(), a.is_invertible_by_det());
        prop_assert_eq!(a.is_invertible(), a.inverse().is_ok());
    }

    #[test]
    fn adjacency_translation_invariant(fi in 0..FIELDS.len(), n in 1usize..=4, a in raw(), b in raw(), c in raw()) {
        let f = field(fi);
        let (a, b, c) = (matrix(&f, n, &a), matrix(&f, n, &b), matrix(&f, n, &c));
        let shifted = adjacent(&a.add(&c).unwrap(), &b.add(&c).unwrap()).unwrap();
        prop_assert_eq!(adjacent(&a, &b).unwrap(), shifted);
        prop_assert_eq!(adjacent(&a, &b).unwrap(), adjacent(&b, &a).unwrap());
        prop_assert!(!adjacent(&a, &a).unwrap());
    }

    #[test]
    fn adjacency_gl_invariant(fi in 0..FIELDS.len(), n in 1usize..=4, a in raw(), b in raw(), p in raw(), q in raw()) {
        let f = field(fi);
        let (a, b, p, q) = (matrix(&f, n, &a), matrix(&f, n, &b), matrix(&f, n, &p), matrix(&f, n, &q));
        prop_assume!(p.is_invertible() && q.is_invertible());
        let pa = p.mul(&a).unwrap().mul(&q).unwrap();
        let pb = p.mul(&b).unwrap().mul(&q).unwrap();
        prop_assert_eq!(adjacent(&a, &b).unwrap(), adjacent(&pa, &pb).unwrap());
    }

    #[test]
    fn literal_round_trip(fi in 0..FIELDS.len(), n in 1usize..=4, a in raw()) {
        let f = field(fi);
        let a = matrix(&f, n, &a);
        prop_assert_eq!(Matrix::parse_literal(&f, &a.to_literal()).unwrap(), a);
    }
}

#[test]
fn large_field_factorizations() {
    // randomized sample above the table limit
    let f = FieldSpec::new(3, 6, 1 << 20).unwrap();
    let space = MatrixSpace::new(&f, 2, u64::MAX).unwrap();
    for (a, _) in cayley_core::graph::sample_distinct_pairs(&space, 50, 11).unwrap() {
        let rf = a.rank_factorize();
        let reduced = rf.p.mul(&a).unwrap().mul(&rf.q).unwrap();
        assert_eq!(
            reduced,
            Matrix::canonical_rank_matrix(&f, 2, rf.rank).unwrap()
        );
    }
}
