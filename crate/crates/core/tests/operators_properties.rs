use hamlearn::linalg::{eig_hermitian, ComplexMatrix};
use hamlearn::operators::{
    assemble, basis_generic, basis_two_local, embed_two_local, expectation, eigenstate_measurements,
    random_hermitian, LatticeSpec, OperatorBasis,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pauli(k: usize) -> ComplexMatrix {
    let (z, o, i) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0));
    let rows = match k {
        0 => vec![vec![o, z], vec![z, o]],
        1 => vec![vec![z, o], vec![o, z]],
        2 => vec![vec![z, -i], vec![i, z]],
        _ => vec![vec![o, z], vec![z, -o]],
    };
    ComplexMatrix::from_rows(&rows).unwrap()
}

fn pauli_string(labels: &[usize]) -> ComplexMatrix {
    labels.iter().skip(1).fold(pauli(labels[0]), |acc, &k| acc.kron(&pauli(k)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn embedding_matches_kronecker_products(n in 2usize..=5, a in 0usize..4, b in 0usize..4, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let i = rng.random_range(1..n);
        let j = rng.random_range(i + 1..=n);
        let local = pauli(a).kron(&pauli(b));
        let embedded = embed_two_local(&local, i, j, n).unwrap();
        let mut labels = vec![0; n];
        labels[i - 1] = a;
        labels[j - 1] = b;
        prop_assert!(embedded.max_abs_diff(&pauli_string(&labels)) < 1e-15);
    }

    #[test]
    fn embedding_preserves_spectrum_up_to_multiplicity(n in 2usize..=4, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let local = random_hermitian(4, &mut rng).unwrap();
        let embedded = embed_two_local(&local, 1, n, n).unwrap();
        let small = eig_hermitian(&local).unwrap().values;
        let big = eig_hermitian(&embedded).unwrap().values;
        let copies = 1usize << (n - 2);
        for (k, v) in big.iter().enumerate() {
            prop_assert!((v - small[k / copies]).abs() < 1e-10);
        }
    }

    #[test]
    fn measurements_are_consistent(seed in any::<u64>(), m in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let basis = basis_generic(8, m, &mut rng).unwrap();
        let c: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..1.0)).collect();
        let k = rng.random_range(0..8);
        let record = eigenstate_measurements(&basis, &c, k, None).unwrap();
        let truth = record.truth.as_ref().unwrap();
        // sum c_i <A_i> = <H> = lambda
        let lambda: f64 = c.iter().zip(&record.a).map(|(ci, ai)| ci * ai).sum();
        prop_assert!((lambda - truth.lambda_true).abs() < 1e-10);
        let eig = eig_hermitian(&assemble(&basis, &c).unwrap()).unwrap();
        prop_assert!((eig.values[k] - truth.lambda_true).abs() < 1e-10);
        prop_assert!(record.validate_against(&basis).is_ok());
        let psi = eig.vector(k);
        for (op, a) in basis.operators().zip(&record.a) {
            prop_assert!((expectation(op, &psi).unwrap() - a).abs() < 1e-10);
        }
    }
}

#[test]
fn lattice_shapes() {
    let full = LatticeSpec::fully_connected(4);
    assert_eq!(full.edges.len(), 6);
    let chain = LatticeSpec::chain(7);
    assert_eq!(chain.edges, (1..7).map(|i| (i, i + 1)).collect::<Vec<_>>());
    assert!(LatticeSpec::new(3, vec![(2, 2)]).is_err());
    assert!(LatticeSpec::new(3, vec![(1, 4)]).is_err());
}

#[test]
fn two_local_basis_terms_act_on_their_pair() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let basis = basis_two_local(&LatticeSpec::chain(4), &mut rng).unwrap();
    assert_eq!(basis.dim, 16);
    assert_eq!(basis.n_qubits, 4);
    for (term, op) in basis.terms.iter().zip(basis.operators()) {
        let (i, j) = term.support.unwrap();
        // commutes with any Pauli on a qubit outside the pair
        let spectator = (1..=4).find(|q| *q != i && *q != j).unwrap();
        let mut labels = vec![0; 4];
        labels[spectator - 1] = 1;
        assert!(op.commutator(&pauli_string(&labels)).frobenius_norm() < 1e-12);
    }
}

#[test]
fn basis_round_trips_through_json() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let basis = basis_two_local(&LatticeSpec::chain(3), &mut rng).unwrap();
    let json = serde_json::to_string(&basis).unwrap();
    let back = OperatorBasis::from_json(&json).unwrap();
    assert_eq!(back.labels(), basis.labels());
    for (a, b) in back.operators().zip(basis.operators()) {
        assert_eq!(a.max_abs_diff(b), 0.0);
    }
}

#[test]
fn inconsistent_measurement_is_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let basis = basis_generic(4, 2, &mut rng).unwrap();
    let high = eig_hermitian(basis.operators().next().unwrap()).unwrap().values[3];
    assert!(hamlearn::operators::validate_measurements(&basis, &[high + 1.0, 0.0]).is_err());
    assert!(hamlearn::operators::validate_measurements(&basis, &[0.0]).is_err());
}
