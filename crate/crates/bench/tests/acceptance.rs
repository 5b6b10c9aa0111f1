//! Acceptance suite. Runs every criterion in sequence (timings are measured,
//! so nothing else should share the machine), prints one line per criterion
//! and exits non-zero if any failed.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Normal};
use splitobs::datagen::{self, Distribution, SampleSpec, TargetFn, NOISE_FRACTIONS};
use splitobs::{AttributeObserver, EbstObserver, QoObserver, RadiusPolicy, VarStats};
use splitobs_bench::{collect_matrix, run_bench, BenchRecord, MatrixFilter, ObserverConfig, RunOptions};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

const QO_VARIANTS: [ObserverConfig; 3] = [
    ObserverConfig::Qo(RadiusPolicy::Fixed(0.01)),
    ObserverConfig::Qo(RadiusPolicy::StdFraction(2.0)),
    ObserverConfig::Qo(RadiusPolicy::StdFraction(3.0)),
];

fn stats(values: &[f64]) -> VarStats {
    VarStats::from_values(values.iter().copied()).unwrap()
}

/// Merit agreement: absolute difference measured against the merit itself,
/// or the parent variance when the merit is close to zero.
fn merit_close(got: f64, expected: f64, parent_variance: f64, tol: f64) -> bool {
    (got - expected).abs() <= tol * expected.abs().max(parent_variance)
}

fn protocol_spec(i: usize, size: usize, rng: &mut ChaCha8Rng) -> SampleSpec {
    SampleSpec {
        size,
        distribution: Distribution::protocol()[i % 9],
        target_fn: TargetFn::ALL[rng.random_range(0..2)],
        noise_fraction: NOISE_FRACTIONS[rng.random_range(0..2)],
        repetition: 0,
        seed: rng.random(),
    }
}

fn robust_statistics_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut merge_err, mut diff_err) = (0.0f64, 0.0f64);
    let mut failures = 0;
    for _ in 0..1000 {
        let n = rng.random_range(4..=10_000);
        let loc = rng.random_range(-1.0..1.0) * 10f64.powf(rng.random_range(-2.0..4.0));
        let scale = 10f64.powf(rng.random_range(-2.0..2.0));
        let noise = Normal::new(loc, scale).unwrap();
        let values: Vec<f64> = (0..n).map(|_| noise.sample(&mut rng)).collect();

        // merge of 2..=8 contiguous parts
        let k = rng.random_range(2..=8usize);
        let mut cuts: Vec<usize> = (0..k - 1).map(|_| rng.random_range(1..n)).collect();
        cuts.push(0);
        cuts.push(n);
        cuts.sort_unstable();
        let merged = cuts
            .windows(2)
            .filter(|w| w[0] < w[1])
            .map(|w| stats(&values[w[0]..w[1]]))
            .fold(VarStats::new(), |acc, s| acc.merge(&s));
        let expected = common::sample_variance(&values);
        let e = common::rel_err(merged.variance(), expected);
        merge_err = merge_err.max(e);

        // (A + B) - B recovers A; both parts keep at least two values
        let cut = rng.random_range(2..=n - 2);
        let (a, b) = (&values[..cut], &values[cut..]);
        let back = stats(a).merge(&stats(b)).difference(&stats(b)).unwrap();
        let d = common::rel_err(back.variance(), common::sample_variance(a));
        diff_err = diff_err.max(d);

        if e > 1e-9 || d > 1e-8 || back.count() != a.len() as f64 {
            failures += 1;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        failures == 0 && elapsed < Duration::from_secs(10),
        format!(
            "1000 samples, {failures} failing; worst merge err {merge_err:.1e}, worst difference err {diff_err:.1e}, {:.2}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn stability_demonstration() -> Outcome {
    let mut worst_robust = 0.0f64;
    let mut naive_ok = true;
    let mut naive_detail = String::new();
    for seed in 0..10 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise = Normal::new(0.0, 1.0).unwrap();
        let values: Vec<f64> = (0..10_000).map(|_| 1e9 + noise.sample(&mut rng)).collect();
        let oracle = common::sample_variance(&values);
        worst_robust = worst_robust.max(common::rel_err(stats(&values).variance(), oracle));
        let naive = common::naive_variance(&values);
        if !(naive < 0.0 || common::rel_err(naive, oracle) > 1e-3) {
            naive_ok = false;
        }
        if seed == 0 {
            naive_detail = format!("naive {naive:.3e} vs oracle {oracle:.4}");
        }
    }
    outcome(
        worst_robust < 1e-6 && naive_ok,
        format!("10 samples of 1e9 + N(0,1); worst robust err {worst_robust:.1e}; {naive_detail}"),
    )
}

fn ebst_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut failures = Vec::new();
    for i in 0..200 {
        let spec = protocol_spec(i, rng.random_range(2..=2000), &mut rng);
        let sample = datagen::generate_sample(&spec).unwrap();
        let mut ebst = EbstObserver::new();
        for &(x, y) in &sample.pairs {
            ebst.update(x, y, 1.0).unwrap();
        }
        let total = stats(&sample.ys().collect::<Vec<_>>());
        let got = ebst.best_split(&total).map(|s| (s.cut_point, s.merit));
        let expected = common::brute_force_ebst(&sample.pairs);
        let ok = match (got, expected) {
            (Some((c, m)), Some((ec, em))) => c == ec && merit_close(m, em, total.variance(), 1e-9),
            (None, None) => true,
            _ => false,
        };
        if !ok {
            failures.push(format!("{} n={}: {got:?} vs {expected:?}", spec.distribution, spec.size));
        }
    }
    let first = failures.first().map(|f| format!(", first: {f}")).unwrap_or_default();
    outcome(failures.is_empty(), format!("200 samples, {} mismatches{first}", failures.len()))
}

fn qo_merit_fidelity() -> Outcome {
    let start = Instant::now();
    let fixed = QO_VARIANTS[0];
    let std3 = QO_VARIANTS[2];
    let options = RunOptions {
        filter: MatrixFilter { sizes: vec![1_000, 10_000], ..Default::default() },
        observers: vec![ObserverConfig::Ebst, fixed, std3],
        ..RunOptions::default()
    };
    let records = collect_matrix(&options).unwrap();
    let cells = records.len() / 3;
    let (mut fixed_ok, mut std3_ok) = (0, 0);
    for cell in records.chunks(3) {
        let ebst = cell[0].merit;
        if cell[1].merit >= 0.95 * ebst {
            fixed_ok += 1;
        }
        if cell[2].merit >= 0.80 * ebst {
            std3_ok += 1;
        }
    }
    let elapsed = start.elapsed();
    let (f, s) = (fixed_ok as f64 / cells as f64, std3_ok as f64 / cells as f64);
    outcome(
        f >= 0.90 && s >= 0.90 && elapsed < Duration::from_secs(300),
        format!(
            "{cells} cells; QO_fixed_0.01 >= 0.95x in {:.1}%, QO_std_div_3 >= 0.80x in {:.1}%, {:.1}s",
            100.0 * f,
            100.0 * s,
            elapsed.as_secs_f64()
        ),
    )
}

/// Every protocol cell at n = 1e5 (both targets, both noise levels, all
/// repetitions) for E-BST and the three QO variants, run serially.
fn large_cells() -> (Vec<SampleSpec>, Vec<BenchRecord>) {
    let options = RunOptions {
        filter: MatrixFilter { sizes: vec![100_000], ..Default::default() },
        observers: std::iter::once(ObserverConfig::Ebst).chain(QO_VARIANTS).collect(),
        ..RunOptions::default()
    };
    let specs = splitobs_bench::plan(&options).unwrap();
    (specs, collect_matrix(&options).unwrap())
}

fn memory_dominance(specs: &[SampleSpec], records: &[BenchRecord]) -> Outcome {
    let mut bound_violations = 0;
    // (variant, distribution) -> worst ratio to E-BST
    let mut over_budget: Vec<(String, String, f64)> = Vec::new();
    let mut worst = [0.0f64; 3];
    for (spec, cell) in specs.iter().zip(records.chunks(4)) {
        let sample = datagen::generate_sample(spec).unwrap();
        let xs: Vec<f64> = sample.xs().collect();
        let std = stats(&xs).std_dev();
        let range = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - xs.iter().cloned().fold(f64::INFINITY, f64::min);
        let ebst = cell[0].n_elements as f64;
        for (k, (config, record)) in QO_VARIANTS.iter().zip(&cell[1..]).enumerate() {
            let ObserverConfig::Qo(policy) = config else { unreachable!() };
            let r = policy.resolve(std).unwrap();
            if record.n_elements as f64 > 1.0 + (range / r).ceil() {
                bound_violations += 1;
            }
            let ratio = record.n_elements as f64 / ebst;
            worst[k] = worst[k].max(ratio);
            if ratio > 0.01 {
                let label = spec.distribution.to_string();
                match over_budget.iter_mut().find(|(n, d, _)| *n == record.observer && *d == label) {
                    Some(entry) => entry.2 = entry.2.max(ratio),
                    None => over_budget.push((record.observer.clone(), label, ratio)),
                }
            }
        }
    }
    let listed: Vec<String> =
        over_budget.iter().map(|(o, d, r)| format!("{o} on {d} at {:.2}%", 100.0 * r)).collect();
    outcome(
        bound_violations == 0 && over_budget.is_empty(),
        format!(
            "{} cells; slot bound violations {bound_violations}; worst slots/E-BST nodes: fixed_0.01 {:.3}%, std_div_2 {:.4}%, std_div_3 {:.4}%; over 1%: [{}]",
            specs.len(),
            100.0 * worst[0],
            100.0 * worst[1],
            100.0 * worst[2],
            listed.join(", ")
        ),
    )
}

fn per_insert_seconds(size: usize, config: ObserverConfig) -> f64 {
    let mut total = 0.0;
    for (i, distribution) in Distribution::protocol().into_iter().enumerate() {
        let spec = SampleSpec {
            size,
            distribution,
            target_fn: TargetFn::Lin,
            noise_fraction: 0.0,
            repetition: 0,
            seed: datagen::cell_seed(datagen::DEFAULT_SEED, &[i as u64, 0, 0, size as u64, 0]),
        };
        // best of three runs damps scheduler noise
        let best = (0..3)
            .map(|_| run_bench(&spec, &[config]).unwrap()[0].observe_time_s)
            .fold(f64::INFINITY, f64::min);
        total += best / size as f64;
    }
    total / 9.0
}

fn time_dominance(records: &[BenchRecord]) -> Outcome {
    let cells = records.len() / 4;
    let mut faster = [0usize; 3];
    for cell in records.chunks(4) {
        for (k, qo) in cell[1..].iter().enumerate() {
            if qo.observe_time_s < cell[0].observe_time_s && qo.query_time_s < cell[0].query_time_s {
                faster[k] += 1;
            }
        }
    }
    let shares: Vec<f64> = faster.iter().map(|&f| f as f64 / cells as f64).collect();
    let ratios: Vec<f64> =
        QO_VARIANTS.iter().map(|&c| per_insert_seconds(1_000_000, c) / per_insert_seconds(100_000, c)).collect();
    outcome(
        shares.iter().all(|&s| s >= 0.95) && ratios.iter().all(|&r| r <= 1.5),
        format!(
            "{cells} cells at n=1e5, QO faster on both timings in {:.1}% / {:.1}% / {:.1}%; per-insert time 1e6 vs 1e5: {:.2}x / {:.2}x / {:.2}x (fixed_0.01 / std_div_2 / std_div_3)",
            100.0 * shares[0],
            100.0 * shares[1],
            100.0 * shares[2],
            ratios[0],
            ratios[1],
            ratios[2]
        ),
    )
}

fn refinement_convergence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    let mut failures = 0;
    for i in 0..50 {
        let spec = protocol_spec(i, 500, &mut rng);
        let sample = datagen::generate_sample(&spec).unwrap();
        let xs: Vec<f64> = sample.xs().collect();
        let total = stats(&sample.ys().collect::<Vec<_>>());
        let mut ebst = EbstObserver::new();
        let mut qo = QoObserver::new(common::singleton_radius(&xs)).unwrap();
        for &(x, y) in &sample.pairs {
            ebst.update(x, y, 1.0).unwrap();
            qo.update(x, y, 1.0).unwrap();
        }
        let e = ebst.best_split(&total).unwrap().merit;
        let q = qo.best_split(&total).unwrap().merit;
        worst = worst.max((e - q).abs() / e.abs().max(total.variance()));
        if !merit_close(q, e, total.variance(), 1e-9) {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("50 samples of n=500, {failures} failing, worst relative gap {worst:.1e}"))
}

fn harness_determinism() -> Outcome {
    let start = Instant::now();
    let first = collect_matrix(&RunOptions::default()).unwrap();
    let second = collect_matrix(&RunOptions::default()).unwrap();
    let differing = first
        .iter()
        .zip(&second)
        .filter(|(a, b)| {
            a.merit.to_bits() != b.merit.to_bits()
                || a.cut_point.map(f64::to_bits) != b.cut_point.map(f64::to_bits)
                || a.n_elements != b.n_elements
        })
        .count();
    outcome(
        first.len() == second.len() && first.len() == 16 * 9 * 2 * 2 * 10 * 5 && differing == 0,
        format!("2 x {} rows, {differing} differing, {:.0}s", first.len(), start.elapsed().as_secs_f64()),
    )
}

fn worked_example() -> Outcome {
    let pairs = [(1.0, 0.0), (2.0, 0.0), (3.0, 10.0), (4.0, 10.0)];
    let total = stats(&[0.0, 0.0, 10.0, 10.0]);
    let mut observers: Vec<(Box<dyn AttributeObserver>, f64, f64)> = vec![
        (Box::new(EbstObserver::new()), 2.0, 100.0 / 3.0),
        (Box::new(QoObserver::new(2.0).unwrap()), 1.75, 25.0 / 3.0),
        (Box::new(QoObserver::new(1.0).unwrap()), 2.5, 100.0 / 3.0),
    ];
    let mut got = Vec::new();
    let mut pass = true;
    for (observer, cut, merit) in &mut observers {
        for &(x, y) in &pairs {
            observer.update(x, y, 1.0).unwrap();
        }
        let s = observer.best_split(&total).unwrap();
        pass &= s.cut_point == *cut && (s.merit - *merit).abs() < 1e-12;
        got.push(format!("cut {} merit {:.6}", s.cut_point, s.merit));
    }
    outcome(pass, format!("E-BST {}; QO r=2 {}; QO r=1 {}", got[0], got[1], got[2]))
}

fn main() {
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    let mut report = |n: u32, name: &'static str, o: Outcome| {
        println!("criterion {n} {name}: {} ({})", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        results.push((n, name, o));
    };

    report(1, "robust statistics oracle", robust_statistics_oracle());
    report(2, "stability demonstration", stability_demonstration());
    report(3, "E-BST exactness", ebst_exactness());
    report(4, "QO merit fidelity", qo_merit_fidelity());
    let (specs, records) = large_cells();
    report(5, "memory dominance", memory_dominance(&specs, &records));
    report(6, "time dominance", time_dominance(&records));
    report(7, "refinement convergence", refinement_convergence());
    report(8, "harness determinism", harness_determinism());
    report(9, "worked example", worked_example());

    let failed: Vec<u32> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", results.len());
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
