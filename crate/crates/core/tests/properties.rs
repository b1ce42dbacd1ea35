use hyperqubo::cut::{total_cut, CutFunction, CutKind};
use hyperqubo::hypergraph::{generate_random_uniform, parse_hmetis, serialize_hmetis, Hypergraph, NodePartition};
use hyperqubo::pbo::{
    build_two_way_cut, parse_model_text, quadratize_rosenberg, to_ising, write_ising_text,
    write_poly_text, BinaryPolynomial, EncodingSpec, ModelText,
};
use hyperqubo::solvers::{
    exact_balanced, exact_min_poly, select_best_balanced, simulated_annealing, SaParams,
};
use proptest::prelude::*;

fn hypergraph(max_n: usize) -> impl Strategy<Value = Hypergraph> {
    (3..=max_n).prop_flat_map(|n| {
        let edge = proptest::sample::subsequence((0..n).collect::<Vec<_>>(), 2..=n.min(5));
        proptest::collection::vec((edge, 1u8..4), 1..=2 * n).prop_map(move |edges| {
            let (edges, weights): (Vec<_>, Vec<_>) = edges.into_iter().map(|(e, w)| (e, w as f64)).unzip();
            Hypergraph::with_weights(n, edges, weights).unwrap()
        })
    })
}

fn polynomial(max_vars: usize) -> impl Strategy<Value = BinaryPolynomial> {
    (1..=max_vars).prop_flat_map(|n| {
        let term = (proptest::sample::subsequence((0..n).collect::<Vec<_>>(), 0..=n.min(4)), -4i32..=4);
        proptest::collection::vec(term, 0..8).prop_map(move |terms| {
            BinaryPolynomial::from_terms(n, terms.into_iter().map(|(k, c)| (k, c as f64))).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn two_way_polynomials_match_direct_cut(h in hypergraph(8), bits in any::<u16>()) {
        let n = h.num_vertices();
        let x: Vec<u8> = (0..n).map(|i| (bits >> i & 1) as u8).collect();
        let p = NodePartition::new(x.iter().map(|&b| b as usize).collect(), 2).unwrap();
        for (kind, f) in [(CutKind::Aon, CutFunction::Aon), (CutKind::Quadratic, CutFunction::Quadratic)] {
            let poly = build_two_way_cut(&h, kind).unwrap();
            prop_assert_eq!(poly.evaluate(&x).unwrap(), total_cut(&h, &p, &f).unwrap());
        }
    }

    #[test]
    fn hmetis_round_trip(h in hypergraph(10)) {
        prop_assert_eq!(parse_hmetis(&serialize_hmetis(&h)).unwrap(), h);
    }

    #[test]
    fn text_formats_round_trip(p in polynomial(6)) {
        match parse_model_text(&write_poly_text(&p)).unwrap() {
            ModelText::Binary(q) => prop_assert_eq!(q, p.clone()),
            ModelText::Ising(_) => prop_assert!(false, "binary text parsed as Ising"),
        }
        let (q, _) = quadratize_rosenberg(&p);
        let m = to_ising(&q).unwrap();
        match parse_model_text(&write_ising_text(&m)).unwrap() {
            ModelText::Ising(back) => prop_assert_eq!(back, m.clone()),
            ModelText::Binary(_) => prop_assert!(false, "Ising text parsed as binary"),
        }
        let again = m.to_binary();
        for bits in 0u64..1 << q.num_vars() {
            let x: Vec<u8> = (0..q.num_vars()).map(|i| (bits >> i & 1) as u8).collect();
            prop_assert!((again.evaluate(&x).unwrap() - q.evaluate(&x).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn quadratization_preserves_minimum(p in polynomial(6)) {
        let (q, aux) = quadratize_rosenberg(&p);
        prop_assert!(q.degree() <= 2);
        prop_assert_eq!(q.num_vars(), p.num_vars() + aux);
        let (pmin, _) = exact_min_poly(&p).unwrap();
        let (qmin, _) = exact_min_poly(&q).unwrap();
        prop_assert!((pmin - qmin).abs() < 1e-9);
    }

    #[test]
    fn selection_is_feasible_when_possible(seed in any::<u64>(), weights in proptest::collection::vec(0.0f64..1.0, 64)) {
        let h = generate_random_uniform(6, 3, 3.0, seed).unwrap();
        let problem = EncodingSpec::new(2, 1.0, CutFunction::Aon).encode(&h).unwrap();
        let total: f64 = weights.iter().sum();
        let dist: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let mut order: Vec<usize> = (0..64).collect();
        order.sort_by(|&a, &b| dist[b].total_cmp(&dist[a]).then(a.cmp(&b)));
        let any_feasible = order[..10].iter().any(|&b| (b as u32).count_ones() == 3);
        let r = select_best_balanced(&dist, &problem, 10).unwrap();
        prop_assert_eq!(r.feasible, any_feasible);
    }
}

#[test]
fn large_lambda_argmins_are_balanced_optima() {
    for seed in 0..20 {
        let n = 6 + (seed as usize % 7);
        let h = generate_random_uniform(n, 3, 5.0, seed).unwrap();
        let lambda = h.total_weight() + 1.0;
        let problem = EncodingSpec::new(2, lambda, CutFunction::Aon).encode(&h).unwrap();
        let (opt, best) = exact_balanced(&h, &CutFunction::Aon, 2).unwrap();
        let (min, args) = exact_min_poly(&problem.energy).unwrap();
        // Odd n leaves a balance penalty of lambda / 4 on every balanced split.
        let floor = problem.energy.evaluate(&problem.encode_partition(&best)).unwrap();
        assert!((floor - opt - lambda * (n % 2) as f64 / 4.0).abs() < 1e-9);
        assert!((min - floor).abs() < 1e-9, "seed {seed}");
        for x in args {
            let p = problem.decode(&x).unwrap();
            assert!(p.is_balanced());
            assert!((total_cut(&h, &p, &CutFunction::Aon).unwrap() - opt).abs() < 1e-9);
        }
    }
}

#[test]
fn annealing_is_reproducible_and_improves() {
    let h = generate_random_uniform(12, 3, 5.0, 7).unwrap();
    let problem = EncodingSpec::new(2, 1.0, CutFunction::Aon).encode(&h).unwrap();
    let params = SaParams { reads: 20, sweeps: 200, seed: 99, ..Default::default() };
    let a = simulated_annealing(&problem.energy, &params).unwrap();
    assert_eq!(a, simulated_annealing(&problem.energy, &params).unwrap());

    let start = SaParams { sweeps: 1, beta_min: 1e-9, beta_max: 1e-8, ..params };
    let mean = |s: &[hyperqubo::solvers::Sample]| s.iter().map(|r| r.energy).sum::<f64>() / s.len() as f64;
    let random = simulated_annealing(&problem.energy, &start).unwrap();
    assert!(mean(&a) < mean(&random));
}

#[test]
fn multiway_exact_matches_minimum_of_energy() {
    let h = generate_random_uniform(6, 3, 3.0, 11).unwrap();
    for cut in [CutFunction::Aon, CutFunction::KMinus1, CutFunction::QuadraticMulti] {
        let problem = EncodingSpec::new(3, 10.0, cut.clone()).encode(&h).unwrap();
        let (opt, _) = exact_balanced(&h, &cut, 3).unwrap();
        let (min, args) = exact_min_poly(&problem.energy).unwrap();
        assert!((min - opt).abs() < 1e-9, "{cut:?}");
        assert!(args.iter().all(|x| problem.decode(x).is_some_and(|p| p.is_balanced())));
    }
}
