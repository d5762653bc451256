//! Ready-made models used throughout the tests, the guide and the CLI fixtures.

use num_bigint::BigInt;

use crate::lattice::IntersectionModel;

/// The plane-like surface: `H² = 1`, `K = −3H`, tested against `H` alone.
pub fn plane_model() -> IntersectionModel {
    let g = |v: i64| BigInt::from(v);
    IntersectionModel::new(
        vec!["K".into(), "H".into()],
        vec![vec![g(9), g(-3)], vec![g(-3), g(1)]],
        &["H".to_string()],
        None,
    )
    .expect("well-formed")
}

/// The synthetic surface with two curve blocks.
///
/// Generators `K, H, C1..C18` with `K² = 0`, `K·H = 0`, `H² = 2`,
/// `H·C_i = 1`, `K·C_i = 1`, curves pairwise disjoint, `C_i² = −3` on
/// `C1..C9` and `−5` on `C10..C18`. Test classes are `H` and every `C_i`.
pub fn reference_model() -> IntersectionModel {
    let names: Vec<String> = ["K", "H"]
        .iter()
        .map(|s| s.to_string())
        .chain((1..=18).map(|i| format!("C{i}")))
        .collect();
    let n = names.len();
    let mut gram = vec![vec![BigInt::from(0); n]; n];
    let mut set = |i: usize, j: usize, v: i64| {
        gram[i][j] = BigInt::from(v);
        gram[j][i] = BigInt::from(v);
    };
    set(1, 1, 2);
    for c in 2..n {
        set(0, c, 1);
        set(1, c, 1);
        set(c, c, if c < 11 { -3 } else { -5 });
    }
    let tests: Vec<String> = names[1..].to_vec();
    let a_block = names[2..11].to_vec();
    let b_block = names[11..].to_vec();
    IntersectionModel::new(names, gram, &tests, Some((a_block, b_block))).expect("well-formed")
}
