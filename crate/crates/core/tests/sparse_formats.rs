use proptest::prelude::*;
use sparsefhe_core::sparse::{
    generate_random_sparse, io, CscMatrix, CsrMatrix, DenseMatrix, VcscMatrix, VcsrMatrix,
};

fn matrices() -> impl Strategy<Value = DenseMatrix> {
    (1usize..=12, 0.0f64..=1.0, any::<u64>())
        .prop_map(|(n, s, seed)| generate_random_sparse(n, s, seed).unwrap())
}

proptest! {
    #[test]
    fn every_layout_roundtrips_exactly(m in matrices(), g in 1usize..=6) {
        let csr = CsrMatrix::from_dense(&m);
        let csc = CscMatrix::from_dense(&m);
        let vcsr = VcsrMatrix::from_dense(&m, g).unwrap();
        let vcsc = VcscMatrix::from_dense(&m, g).unwrap();
        prop_assert_eq!(&csr.to_dense(), &m);
        prop_assert_eq!(&csc.to_dense(), &m);
        prop_assert_eq!(&vcsr.to_dense(), &m);
        prop_assert_eq!(&vcsc.to_dense(), &m);
        let k = m.nnz();
        prop_assert!([csr.nnz(), csc.nnz(), vcsr.nnz(), vcsc.nnz()].iter().all(|&x| x == k));
    }

    #[test]
    fn converted_parts_satisfy_validation(m in matrices(), g in 1usize..=6) {
        let n = m.dim();
        let csr = CsrMatrix::from_dense(&m);
        for i in 0..n {
            let cols = &csr.col_indices()[csr.range(i)];
            prop_assert!(cols.windows(2).all(|w| w[0] < w[1]));
        }
        let rebuilt = CsrMatrix::from_parts(n, csr.row_offsets().to_vec(), csr.col_indices().to_vec(), csr.values().to_vec());
        prop_assert_eq!(rebuilt.unwrap(), csr);
        let csc = CscMatrix::from_dense(&m);
        let rebuilt = CscMatrix::from_parts(n, csc.col_offsets().to_vec(), csc.row_indices().to_vec(), csc.values().to_vec());
        prop_assert_eq!(rebuilt.unwrap(), csc);
        let v = VcsrMatrix::from_dense(&m, g).unwrap();
        let rebuilt = VcsrMatrix::from_parts(n, g, v.slice_offsets().to_vec(), v.entry_rows().to_vec(), v.entry_cols().to_vec(), v.values().to_vec());
        prop_assert_eq!(rebuilt.unwrap(), v);
        let v = VcscMatrix::from_dense(&m, g).unwrap();
        let rebuilt = VcscMatrix::from_parts(n, g, v.slice_offsets().to_vec(), v.entry_rows().to_vec(), v.entry_cols().to_vec(), v.values().to_vec());
        prop_assert_eq!(rebuilt.unwrap(), v);
    }

    #[test]
    fn matrix_market_roundtrip(m in matrices()) {
        let mut buf = Vec::new();
        io::write_matrix_market(&mut buf, &m).unwrap();
        prop_assert_eq!(io::read_matrix_market(buf.as_slice()).unwrap(), m);
    }

    #[test]
    fn generated_zero_count_is_exact(n in 1usize..=16, s in 0.0f64..=1.0, seed in any::<u64>()) {
        let m = generate_random_sparse(n, s, seed).unwrap();
        let expected = (s * (n * n) as f64 + 0.5).floor() as usize;
        prop_assert_eq!(n * n - m.nnz(), expected);
    }
}

#[test]
fn half_sparse_eight_by_eight_roundtrips() {
    let m = generate_random_sparse(8, 0.5, 2024).unwrap();
    assert_eq!(m.nnz(), 32);
    assert_eq!(CsrMatrix::from_dense(&m).to_dense(), m);
    let small = generate_random_sparse(4, 0.5, 9).unwrap();
    assert_eq!(VcsrMatrix::from_dense(&small, 2).unwrap().to_dense(), small);
}
