//! Acceptance checks, one line per criterion. Run with
//! `cargo test -p hyperqubo --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use hyperqubo::cut::hrwc_conductance;
use hyperqubo::harness::{emit_report, run_experiment, ExperimentConfig, ExperimentReport, ReportFormat};
use hyperqubo::pbo::{
    build_hrwc, build_multi_cut, build_two_way_cut, one_hot_index, quadratize_rosenberg, to_ising,
    BinaryPolynomial, EncodingSpec,
};
use hyperqubo::solvers::SolverKind;
use hyperqubo::{generate_random_uniform, CutFunction, CutKind, Hypergraph, NodePartition, TransitionMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EXACT_TOL: f64 = 1e-9;
const C1_LIMIT: Duration = Duration::from_secs(10);
const C2_LIMIT: Duration = Duration::from_secs(1);
const C4_LIMIT: Duration = Duration::from_secs(30);
const C6_MIN: f64 = 0.99;
const C7_MAX: f64 = 0.15;
const C9_MIN: f64 = 0.5;
const C9_LIMIT: Duration = Duration::from_secs(600);
const C10_LIMIT: Duration = Duration::from_secs(1800);

struct Check {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Check {
    Check {
        pass,
        detail: detail.into(),
    }
}

fn random_hypergraph(rng: &mut ChaCha8Rng, n: usize) -> Hypergraph {
    let m = rng.gen_range(1..=2 * n);
    let edges = (0..m)
        .map(|_| {
            let size = rng.gen_range(2..=n.min(5));
            rand::seq::index::sample(rng, n, size).into_vec()
        })
        .collect();
    Hypergraph::new(n, edges).unwrap()
}

fn labels_from_code(mut code: usize, n: usize, k: usize) -> Vec<usize> {
    (0..n)
        .map(|_| {
            let l = code % k;
            code /= k;
            l
        })
        .collect()
}

fn one_hot(labels: &[usize], k: usize) -> Vec<u8> {
    let mut x = vec![0; labels.len() * k];
    for (i, &l) in labels.iter().enumerate() {
        x[one_hot_index(i, l, k)] = 1;
    }
    x
}

fn is_balanced(labels: &[usize], k: usize) -> bool {
    let mut sizes = vec![0usize; k];
    labels.iter().for_each(|&l| sizes[l] += 1);
    sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1
}

// Oracles below work on raw labels and share no code with the library.

fn oracle_aon(h: &Hypergraph, labels: &[usize]) -> f64 {
    h.edges()
        .iter()
        .filter(|e| e.iter().any(|&v| labels[v] != labels[e[0]]))
        .count() as f64
}

fn oracle_ordered_pairs(h: &Hypergraph, labels: &[usize]) -> f64 {
    let mut total = 0;
    for e in h.edges() {
        for &i in e {
            for &j in e {
                total += (labels[i] == 1 && labels[j] == 0) as usize;
            }
        }
    }
    total as f64
}

fn oracle_k_minus_1(h: &Hypergraph, labels: &[usize]) -> f64 {
    h.edges()
        .iter()
        .map(|e| {
            let mut seen: Vec<usize> = e.iter().map(|&v| labels[v]).collect();
            seen.sort_unstable();
            seen.dedup();
            (seen.len() - 1) as f64
        })
        .sum()
}

fn oracle_quadratic_multi(h: &Hypergraph, labels: &[usize], k: usize) -> f64 {
    h.edges()
        .iter()
        .map(|e| {
            let pairs: usize = (0..k)
                .map(|c| {
                    let inside = e.iter().filter(|&&v| labels[v] == c).count();
                    inside * (e.len() - inside)
                })
                .sum();
            pairs as f64 / e.len() as f64
        })
        .sum()
}

fn oracle_phi(p: &[Vec<f64>], labels: &[usize], k: usize) -> f64 {
    (0..k)
        .map(|c| {
            let members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == c).collect();
            let escape: f64 = members
                .iter()
                .flat_map(|&i| (0..labels.len()).filter(|&j| labels[j] != c).map(move |j| p[i][j]))
                .sum();
            escape / members.len() as f64
        })
        .sum::<f64>()
        / k as f64
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut points = 0usize;
    let mut mismatches = 0usize;
    for n in 4..=10 {
        for _ in 0..20 {
            let h = random_hypergraph(&mut rng, n);
            let aon = build_two_way_cut(&h, CutKind::Aon).unwrap().compile();
            let quad = build_two_way_cut(&h, CutKind::Quadratic).unwrap().compile();
            for bits in 0u64..1 << n {
                let labels: Vec<usize> = (0..n).map(|i| (bits >> i & 1) as usize).collect();
                points += 1;
                if aon.evaluate_bits(bits) != oracle_aon(&h, &labels)
                    || quad.evaluate_bits(bits) != oracle_ordered_pairs(&h, &labels)
                {
                    mismatches += 1;
                }
            }
        }
    }
    let t = start.elapsed();
    check(
        mismatches == 0 && t < C1_LIMIT,
        format!("{points} assignments over 140 instances, {mismatches} mismatches, {t:.2?} (limit {C1_LIMIT:?})"),
    )
}

fn criterion_2() -> Check {
    let start = Instant::now();
    let mut max_degree = 0;
    for seed in 0..50 {
        let n = 6 + (seed as usize % 10);
        let h = generate_random_uniform(n, 3, 5.0, seed).unwrap();
        max_degree = max_degree.max(build_two_way_cut(&h, CutKind::Aon).unwrap().degree());
    }
    let t = start.elapsed();
    check(
        max_degree <= 2 && t < C2_LIMIT,
        format!("max degree {max_degree} over 50 3-uniform instances, {t:.2?}"),
    )
}

fn criterion_3() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut cut_points, mut cut_bad) = (0usize, 0usize);
    let (mut phi_points, mut phi_bad) = (0usize, 0usize);
    let mut off_divisor = 0usize;
    for k in [2usize, 3] {
        for n in k..=6 {
            for _ in 0..5 {
                let h = random_hypergraph(&mut rng, n);
                let polys = [CutKind::Aon, CutKind::KMinus1, CutKind::QuadraticMulti]
                    .map(|kind| build_multi_cut(&h, k, kind).unwrap());
                // Rational transition weights: multiples of 1/8.
                let p: Vec<Vec<f64>> = (0..n)
                    .map(|i| (0..n).map(|j| if i == j { 0.0 } else { rng.gen_range(0..8) as f64 / 8.0 }).collect())
                    .collect();
                let hrwc = build_hrwc(&TransitionMatrix::from_rows(&p).unwrap(), n, k).unwrap();
                for code in 0..k.pow(n as u32) {
                    let labels = labels_from_code(code, n, k);
                    let x = one_hot(&labels, k);
                    let want = [
                        oracle_aon(&h, &labels),
                        oracle_k_minus_1(&h, &labels),
                        oracle_quadratic_multi(&h, &labels, k),
                    ];
                    for (poly, w) in polys.iter().zip(want) {
                        cut_points += 1;
                        if (poly.evaluate(&x).unwrap() - w).abs() > EXACT_TOL {
                            cut_bad += 1;
                        }
                    }
                    if !is_balanced(&labels, k) {
                        continue;
                    }
                    let phi = oracle_phi(&p, &labels, k);
                    let lib_phi = hrwc_conductance(
                        &TransitionMatrix::from_rows(&p).unwrap(),
                        &NodePartition::new(labels.clone(), k).unwrap(),
                    )
                    .unwrap();
                    let value = hrwc.evaluate(&x).unwrap();
                    if n % k == 0 {
                        phi_points += 1;
                        if (value - phi).abs() > EXACT_TOL || (lib_phi - phi).abs() > EXACT_TOL {
                            phi_bad += 1;
                        }
                    } else if (value - phi).abs() > EXACT_TOL {
                        off_divisor += 1;
                    }
                }
            }
        }
    }
    check(
        cut_bad == 0 && phi_bad == 0,
        format!(
            "{cut_points} one-hot cut evaluations ({cut_bad} off), {phi_points} balanced HRWC checks with k | n \
             ({phi_bad} off); for k not dividing n the polynomial uses 1/n instead of 1/|C| and differs from Phi \
             on {off_divisor} balanced partitions"
        ),
    )
}

fn random_hubo(rng: &mut ChaCha8Rng) -> BinaryPolynomial {
    let n = rng.gen_range(4..=8);
    let terms: Vec<(Vec<usize>, f64)> = (0..rng.gen_range(2..=6))
        .map(|_| {
            let deg = rng.gen_range(1..=n.min(5));
            let coeff = loop {
                let c = rng.gen_range(-5i32..=5);
                if c != 0 {
                    break c as f64;
                }
            };
            (rand::seq::index::sample(rng, n, deg).into_vec(), coeff)
        })
        .collect();
    BinaryPolynomial::from_terms(n, terms).unwrap()
}

fn criterion_4() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut tested, mut bad, mut skipped, mut points) = (0usize, 0usize, 0usize, 0usize);
    while tested < 200 {
        let p = random_hubo(&mut rng);
        let (q, aux) = quadratize_rosenberg(&p);
        if q.num_vars() > 12 || p.degree() < 3 {
            skipped += 1;
            continue;
        }
        tested += 1;
        let n = p.num_vars();
        let (pc, qc) = (p.compile(), q.compile());
        let sound = q.degree() <= 2
            && (0u64..1 << n).all(|x| {
                points += 1;
                let min = (0u64..1 << aux)
                    .map(|y| qc.evaluate_bits(x | y << n))
                    .fold(f64::INFINITY, f64::min);
                min == pc.evaluate_bits(x)
            });
        bad += !sound as usize;
    }
    let t = start.elapsed();
    check(
        bad == 0 && t < C4_LIMIT,
        format!("{tested} HUBOs ({skipped} redrawn), {points} assignments, {bad} unsound, {t:.2?}"),
    )
}

fn criterion_5() -> Check {
    let mut cases: Vec<BinaryPolynomial> = Vec::new();
    for n in 4..=12 {
        let degree = if n < 6 { 2.0 } else { 5.0 };
        let h = generate_random_uniform(n, 3, degree, n as u64).unwrap();
        for lambda in [0.3, 1.0, 3.0] {
            for cut in [CutFunction::Aon, CutFunction::Quadratic] {
                cases.push(EncodingSpec::new(2, lambda, cut).encode(&h).unwrap().energy);
            }
        }
    }
    for (n, k, cut) in [(6, 2, CutFunction::QuadraticMulti), (4, 3, CutFunction::QuadraticMulti)] {
        let h = generate_random_uniform(n, 2, 2.0, 5).unwrap();
        cases.push(EncodingSpec::new(k, 1.0, cut).encode(&h).unwrap().energy);
    }
    let mut worst: f64 = 0.0;
    let mut points = 0usize;
    for poly in &cases {
        let model = to_ising(poly).unwrap();
        let n = poly.num_vars();
        let compiled = poly.compile();
        for bits in 0u64..1 << n {
            let z: Vec<i8> = (0..n).map(|i| if bits >> i & 1 == 1 { 1 } else { -1 }).collect();
            worst = worst.max((model.energy(&z).unwrap() - compiled.evaluate_bits(bits)).abs());
            points += 1;
        }
    }
    check(
        worst <= EXACT_TOL,
        format!("{} QUBOs, {points} points, max |diff| {worst:.2e}", cases.len()),
    )
}

fn sa_rows(report: &ExperimentReport, lambda: f64) -> Vec<(usize, f64, f64)> {
    (8..=15)
        .map(|n| {
            let r = report.row("sa", lambda, n).expect("row present");
            (n, r.feasibility_mean, r.optimality_mean)
        })
        .collect()
}

fn fmt_rates(rows: &[(usize, f64, f64)], optimality: bool) -> String {
    rows.iter()
        .map(|(n, f, o)| {
            if optimality {
                format!("{n}:{f:.3}/{o:.3}")
            } else {
                format!("{n}:{f:.3}")
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn criteria_6_to_10() -> Vec<Check> {
    let config = ExperimentConfig::default();
    let start = Instant::now();
    let report = run_experiment(&config).expect("default experiment");
    let first = start.elapsed();
    let csv = emit_report(&report, ReportFormat::Csv).unwrap();

    let rows = sa_rows(&report, 3.0);
    let c6 = check(
        rows.iter().all(|&(_, f, o)| f >= C6_MIN && o >= C6_MIN),
        format!("SA lambda=3 feasibility/optimality per n: {} (min {C6_MIN})", fmt_rates(&rows, true)),
    );

    let rows = sa_rows(&report, 0.3);
    let c7 = check(
        rows.iter().all(|&(_, f, _)| f <= C7_MAX),
        format!("SA lambda=0.3 feasibility per n: {} (max {C7_MAX})", fmt_rates(&rows, false)),
    );

    let (feasible, violations): (usize, usize) = report
        .run_counts("sa", 1.0)
        .fold((0, 0), |(f, v), c| (f + c.feasible, v + c.feasible - c.optimal));
    let c8 = check(
        violations == 0,
        format!("SA lambda=1: {feasible} feasible results, {violations} above the exact optimum"),
    );

    let full_row = report.row("qaoa", 1.0, 8).expect("qaoa row").clone();
    let sub = ExperimentConfig {
        n_values: vec![8],
        lambda_values: vec![1.0],
        solvers: vec![SolverKind::Qaoa],
        ..ExperimentConfig::default()
    };
    let t = Instant::now();
    let sub_report = run_experiment(&sub).expect("qaoa subset");
    let qaoa_time = t.elapsed();
    let consistent = sub_report.row("qaoa", 1.0, 8) == Some(&full_row);
    let c9 = check(
        full_row.optimality_mean >= C9_MIN && qaoa_time < C9_LIMIT && consistent,
        format!(
            "QAOA depth 1, n=8, lambda=1: optimality {:.3} +/- {:.3} (min {C9_MIN}; reference 0.86 +/- 0.11), \
             standalone {qaoa_time:.2?}, matches full run: {consistent}",
            full_row.optimality_mean, full_row.optimality_se
        ),
    );

    let t = Instant::now();
    let second = emit_report(&run_experiment(&config).expect("rerun"), ReportFormat::Csv).unwrap();
    let second_time = t.elapsed();
    let identical = csv == second;
    let c10 = check(
        first < C10_LIMIT && identical,
        format!(
            "full default experiment {first:.1?} and {second_time:.1?} (limit {C10_LIMIT:?}), \
             {} CSV bytes, byte-identical: {identical}",
            csv.len()
        ),
    );
    vec![c6, c7, c8, c9, c10]
}

fn main() -> ExitCode {
    let names = [
        "two-way encodings match cut oracles",
        "AoN on 3-uniform edges is quadratic",
        "multi-way encodings match oracles",
        "Rosenberg quadratization is sound",
        "QUBO and Ising energies agree",
        "SA lambda=3 feasible and optimal",
        "SA lambda=0.3 mostly infeasible",
        "SA lambda=1 feasible implies optimal",
        "QAOA depth-1 optimality at n=8",
        "runtime and determinism",
    ];
    let mut checks = vec![criterion_1(), criterion_2(), criterion_3(), criterion_4(), criterion_5()];
    checks.extend(criteria_6_to_10());

    let mut failed = 0;
    for (i, (c, name)) in checks.iter().zip(names).enumerate() {
        let verdict = if c.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {verdict}: {name}: {}", i + 1, c.detail);
        failed += !c.pass as usize;
    }
    if failed == 0 {
        println!("acceptance: all {} criteria passed", checks.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of {} criteria failed", checks.len());
        ExitCode::FAILURE
    }
}
