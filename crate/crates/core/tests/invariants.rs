use pauliverify::analysis::{binomial_pmf_range, binomial_tail_at_least, binomial_tail_at_most, hoeffding_bound};
use pauliverify::circuit::{conjugate_through_circuit, CircuitSpec};
use pauliverify::decompose::decompose_in_pauli_basis;
use pauliverify::hypergraph::HypergraphSpec;
use pauliverify::kernels::{AdaptiveTest, PauliTermTest, SingleCopyTest};
use pauliverify::pauli::{Pauli, PauliString};
use pauliverify::protocol::ThresholdRule;
use pauliverify::random::{random_circuit, random_density_matrix};
use pauliverify::rng::stream;
use pauliverify::state::{max_abs_diff, pauli_matrix, pauli_sum_matrix, Operator};
use pauliverify::Complex64;
use proptest::prelude::*;

fn pauli_string(n: usize) -> impl Strategy<Value = PauliString> {
    prop::collection::vec(0u8..4, n).prop_map(|codes| {
        let ps: Vec<Pauli> = codes.into_iter().map(|c| [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][c as usize]).collect();
        PauliString::from_paulis(&ps, 1.0)
    })
}

fn hypergraph() -> impl Strategy<Value = HypergraphSpec> {
    (2usize..=5).prop_flat_map(|n| {
        let edge = prop::sample::subsequence((0..n).collect::<Vec<_>>(), 2..=3.min(n));
        prop::collection::vec(edge, 0..6).prop_map(move |mut edges| {
            edges.sort();
            edges.dedup();
            HypergraphSpec::new(n, edges).unwrap()
        })
    })
}

fn phase(k: u8) -> Complex64 {
    [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(-1.0, 0.0), Complex64::new(0.0, -1.0)][k as usize % 4]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_matches_dense(a in pauli_string(3), b in pauli_string(3)) {
        let (k, ab) = a.mul(&b);
        let dense = pauli_matrix(&a).unwrap() * pauli_matrix(&b).unwrap();
        let ours = pauli_matrix(&ab).unwrap() * phase(k);
        prop_assert!(max_abs_diff(&dense, &ours) < 1e-12);
    }

    #[test]
    fn commutation_matches_dense(a in pauli_string(3), b in pauli_string(3)) {
        let (pa, pb) = (pauli_matrix(&a).unwrap(), pauli_matrix(&b).unwrap());
        let commutator = &pa * &pb - &pb * &pa;
        prop_assert_eq!(a.commutes_with(&b), commutator.iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn decomposition_round_trips(seed in any::<u64>(), n in 1usize..=3) {
        let rho = random_density_matrix(n, 2, &mut stream(seed, &[])).unwrap().density_matrix().unwrap();
        let terms = decompose_in_pauli_basis(&rho).unwrap();
        prop_assert!(max_abs_diff(&pauli_sum_matrix(n, &terms).unwrap(), &rho) < 1e-10);
    }

    #[test]
    fn hypergraph_stabilizers_square_to_identity_and_fix_state(g in hypergraph()) {
        let n = g.n_vertices();
        let dim = 1 << n;
        let id = Operator::identity(dim, dim);
        let psi = g.build_state().unwrap();
        let amps = Operator::from_column_slice(dim, 1, psi.amplitudes().unwrap());
        for i in 0..n {
            let gi = g.stabilizer_dense(i).unwrap();
            prop_assert!(max_abs_diff(&(&gi * &gi), &id) < 1e-12);
            prop_assert!(max_abs_diff(&(&gi * &amps), &amps) < 1e-12);
            prop_assert!(max_abs_diff(&g.adaptive_form(i).unwrap().expansion_dense().unwrap(), &gi) < 1e-12);
        }
    }

    #[test]
    fn adaptive_branch_sum_matches_closed_form(g in hypergraph(), seed in any::<u64>()) {
        let n = g.n_vertices();
        let rho = random_density_matrix(n, 2, &mut stream(seed, &[])).unwrap();
        for i in 0..n {
            let test = AdaptiveTest::new(&g.adaptive_form(i).unwrap());
            let closed = test.exact_ppass(&rho).unwrap();
            let branch = test.branch_sum_ppass(&rho).unwrap();
            prop_assert!((closed - branch).abs() < 1e-12);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&closed));
        }
    }

    #[test]
    fn conjugated_stabilizer_matches_dense(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = stream(seed, &[]);
        let c: CircuitSpec = random_circuit(n, 8, &mut rng).unwrap();
        let u = c.unitary().unwrap();
        for i in 0..n {
            let d = conjugate_through_circuit(&c, i).unwrap();
            let dense = &u * pauli_matrix(&PauliString::single(n, i, Pauli::X, 1.0)).unwrap() * u.adjoint();
            prop_assert!(max_abs_diff(&pauli_sum_matrix(n, d.terms()).unwrap(), &dense) < 1e-10);
            // The honest state sits at the top of the test: p = 1/2 + 1/(2R_i).
            let p = PauliTermTest::stabilizer(&d).unwrap().exact_ppass(&c.prepare_state().unwrap()).unwrap();
            prop_assert!((p - (0.5 + 0.5 / d.r())).abs() < 1e-10);
        }
    }

    #[test]
    fn binomial_tails_respect_hoeffding(k in 1u64..400, p in 0.0f64..1.0, t in 0.0f64..0.5) {
        let above = ((p + t) * k as f64).ceil() as u64;
        if above <= k {
            prop_assert!(binomial_tail_at_least(k, p, above) <= hoeffding_bound(k, t) + 1e-12);
        }
        let below = (p - t) * k as f64;
        if below >= 0.0 {
            prop_assert!(binomial_tail_at_most(k, p, below.floor() as u64) <= hoeffding_bound(k, t) + 1e-12);
        }
        prop_assert!((binomial_pmf_range(k, p, 0, k) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn thresholds_are_monotone_in_count(k in 1u64..500, eps in 0.01f64..0.99, r in 1.0f64..20.0) {
        let rules = [
            (ThresholdRule::ground(eps, r).unwrap(), false),
            (ThresholdRule::circuit(eps, r).unwrap(), true),
            (ThresholdRule::hypergraph(eps).unwrap(), true),
        ];
        for (rule, upward) in rules {
            let verdicts: Vec<bool> = (0..=k).map(|c| rule.passes(c, k)).collect();
            let flips = verdicts.windows(2).filter(|w| w[0] != w[1]).count();
            prop_assert!(flips <= 1);
            if flips == 1 {
                prop_assert_eq!(verdicts[k as usize], upward);
            }
        }
    }
}
