//! Acceptance suite. Each test checks one criterion and prints one
//! `criterion N PASS|FAIL: ...` line; run with `--nocapture` to see them.

use cftp_core::bounding::BoundingState;
use cftp_core::coupling::{
    realizable_blocked_sets, seeding_size_law, subsets_up_to, Compress, Disjoint, LocalCoupling,
    LpInstance, Seeding,
};
use cftp_core::engine::{
    coalescence_threshold, construct_block_observed, lll_partition, resample_budget, Stage,
};
use cftp_core::oracle::{
    audit_coupling_at_worst_case, binomial_sigma, build_worst_case, chi_square_uniform,
    complete_graph_colorings, enumerate_colorings,
    lower_bound_value, relaxed_optimum, AuditCoupling, ColoringIndex, GofReport,
};
use cftp_core::coupling::lp::LP_TOLERANCE;
use cftp_core::seed::{SeedStream, SubSeedAddress};
use cftp_core::{ColorSet, Graph, Sampler, SamplerConfig};

const ROOT_SEED: u64 = 20_240_601;

fn report(criterion: &str, pass: bool, detail: String) {
    println!("criterion {criterion} {}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {criterion}: {detail}");
}

fn set(xs: &[usize]) -> ColorSet {
    xs.iter().copied().collect()
}

/// Threshold palette `ceil((2.5 + η)Δ) + 1`.
fn threshold_q(delta: usize) -> usize {
    coalescence_threshold(delta).ceil() as usize + 1
}

// ---- 1. exact uniformity on K4 ----

const K4_Q: usize = 13;
const K4_SAMPLES: u64 = 200_000;
const K4_MIN_P: f64 = 0.001;
const K4_MAX_TV: f64 = 0.02;

fn k4_goodness_of_fit() -> GofReport {
    let g = Graph::complete(4);
    let universe = enumerate_colorings(&g, K4_Q).unwrap();
    assert_eq!(universe.len() as u64, complete_graph_colorings(4, K4_Q));
    assert_eq!(universe.len(), 17_160);
    let index = ColoringIndex::new(&universe);
    let root = SeedStream::new(ROOT_SEED);
    let mut counts = vec![0u64; universe.len()];
    for i in 0..K4_SAMPLES {
        let config = SamplerConfig::new(K4_Q, root.fork(i).master_seed());
        let out = Sampler::new(&g, config).unwrap().sample().unwrap();
        counts[index.get(&out.coloring).expect("improper sample")] += 1;
    }
    chi_square_uniform(&counts)
}

/// Expected empirical TV of an exact uniform sampler with `n` draws over
/// `k` cells (Poisson approximation of each cell count).
fn expected_tv_of_exact_sampler(n: f64, k: f64) -> f64 {
    let lambda = n / k;
    k * (2.0 * lambda / std::f64::consts::PI).sqrt() / (2.0 * n)
}

#[test]
fn criterion_01_k4_chi_square() {
    let r = k4_goodness_of_fit();
    let floor = expected_tv_of_exact_sampler(K4_SAMPLES as f64, r.cells as f64);
    println!(
        "criterion 1 TV {}: tv {:.4} (target < {K4_MAX_TV}, exact-sampler expectation {floor:.4})",
        if r.tv < K4_MAX_TV { "PASS" } else { "FAIL" },
        r.tv
    );
    report(
        "1 chi-square",
        r.p_value > K4_MIN_P,
        format!("chi2 {:.1} dof {} p {:.4} (> {K4_MIN_P})", r.chi_square, r.dof, r.p_value),
    );
}

/// Not reachable at this sample size: even an exact uniform sampler has an
/// expected empirical TV near 0.117 here. Run with `--ignored` to see it fail.
#[test]
#[ignore = "TV < 0.02 needs far more than 2e5 samples over 17160 cells"]
fn criterion_01_k4_total_variation() {
    let r = k4_goodness_of_fit();
    let floor = expected_tv_of_exact_sampler(K4_SAMPLES as f64, r.cells as f64);
    report(
        "1 TV",
        r.tv < K4_MAX_TV,
        format!("tv {:.4} (< {K4_MAX_TV}; exact-sampler expectation {floor:.4})", r.tv),
    );
}

// ---- 2. coalescence rate ----

const COALESCENCE_BLOCKS: u64 = 200;
const MIN_COALESCENCE_RATE: f64 = 0.40;

#[test]
fn criterion_02_coalescence_rate() {
    let mut worst = f64::INFINITY;
    let mut lines = Vec::new();
    for delta in [6, 8] {
        for n in [100, 200] {
            let g = Graph::random_regular(n, delta, ROOT_SEED + n as u64, 1000).unwrap();
            let q = threshold_q(delta);
            let sampler = Sampler::new(&g, SamplerConfig::new(q, ROOT_SEED)).unwrap();
            let hits = (1..=COALESCENCE_BLOCKS)
                .filter(|&t| sampler.block(t).phi.is_some())
                .count();
            let rate = hits as f64 / COALESCENCE_BLOCKS as f64;
            worst = worst.min(rate);
            lines.push(format!("Δ={delta} n={n} q={q} rate={rate:.3}"));
        }
    }
    report(
        "2",
        worst >= MIN_COALESCENCE_RATE,
        format!("min rate {worst:.3} (>= {MIN_COALESCENCE_RATE}); {}", lines.join(", ")),
    );
}

// ---- 3. seeding size law ----

#[test]
fn criterion_03_seeding_size_law() {
    let (delta, s, q) = (12, 24, 30);
    let expected = 23.0 / 36.0;
    let c = Seeding::for_slack((0..s).collect(), q, delta).unwrap();
    assert!((c.law().r(3) - expected).abs() < 1e-12);
    let trials = 100_000;
    let stream = SeedStream::new(ROOT_SEED);
    let mut threes = 0;
    let mut outside = 0;
    for u in 0..trials {
        match c.predict(&stream, SubSeedAddress::new(1, u)).unwrap().0.len() {
            3 => threes += 1,
            2 => {}
            _ => outside += 1,
        }
    }
    let f = threes as f64 / trials as f64;
    let sigma = binomial_sigma(expected, trials as usize);
    report(
        "3",
        (f - expected).abs() <= 3.0 * sigma && outside == 0,
        format!("Pr[|L|=3] {f:.5} vs {expected:.5} ± {:.5}; sizes outside {{2,3}}: {outside}", 3.0 * sigma),
    );
}

// ---- 4. marginals of the three couplings ----

const MARGINAL_DECODES: u64 = 100_000;
const MARGINAL_MIN_P: f64 = 0.001;

struct MarginalOutcome {
    cases: usize,
    min_p: f64,
    containment_failures: usize,
}

/// Draw once per address and decode against every blocked set, so each set
/// gets `MARGINAL_DECODES` decodes.
fn check_marginals<C: LocalCoupling>(c: &C, q: usize, blocked: &[ColorSet], seed: u64) -> MarginalOutcome {
    let stream = SeedStream::new(seed);
    let mut counts = vec![vec![0u64; q]; blocked.len()];
    let mut containment_failures = 0;
    for u in 0..MARGINAL_DECODES {
        let (pred, draw) = c.predict(&stream, SubSeedAddress::new(1, u)).unwrap();
        for (b, row) in blocked.iter().zip(counts.iter_mut()) {
            let out = c.decode(&draw, b).unwrap();
            if !pred.contains(out) || b.contains(out) {
                containment_failures += 1;
            }
            row[out] += 1;
        }
    }
    let min_p = blocked
        .iter()
        .zip(&counts)
        .map(|(b, row)| {
            let cells: Vec<u64> = b.complement(q).iter().map(|c| row[c]).collect();
            chi_square_uniform(&cells).p_value
        })
        .fold(1.0, f64::min);
    MarginalOutcome {
        cases: blocked.len(),
        min_p,
        containment_failures,
    }
}

#[test]
fn criterion_04_coupling_marginals() {
    let mut outcomes = Vec::new();

    let q = 10;
    let compress = Compress::new(set(&[0, 2, 5, 7]), q, 4).unwrap();
    let all = subsets_up_to(&ColorSet::full(q), 4);
    outcomes.push(("compress q=10 Δ=4", check_marginals(&compress, q, &all, 41)));

    let s = set(&[0, 1, 2, 3, 4]);
    let closed = Seeding::new(s, seeding_size_law(5, 3, 8).unwrap(), 8, 3).unwrap();
    outcomes.push(("seeding |S|=5 Δ=3 q=8", check_marginals(&closed, 8, &subsets_up_to(&s, 3), 42)));

    let s = set(&[1, 2, 3, 4, 5, 6]);
    let relaxed = LpInstance::new(6, 4, 8).solve_relaxed_lp().unwrap();
    let relaxed = Seeding::new(s, relaxed, 8, 4).unwrap();
    outcomes.push(("seeding |S|=6 Δ=4 q=8", check_marginals(&relaxed, 8, &subsets_up_to(&s, 4), 43)));

    let fixture = [set(&[5]), set(&[6]), set(&[1, 2]), set(&[3, 4])];
    let disjoint = Disjoint::from_neighbor_lists(&fixture, 10).unwrap();
    let sets = realizable_blocked_sets(&fixture);
    outcomes.push(("disjoint fixture", check_marginals(&disjoint, 10, &sets, 44)));

    let mixed = [set(&[7]), set(&[1, 2]), set(&[2, 3]), set(&[4, 5])];
    let disjoint = Disjoint::from_neighbor_lists(&mixed, 10).unwrap();
    let sets = realizable_blocked_sets(&mixed);
    outcomes.push(("disjoint shared colors", check_marginals(&disjoint, 10, &sets, 45)));

    let min_p = outcomes.iter().map(|(_, o)| o.min_p).fold(1.0, f64::min);
    let failures: usize = outcomes.iter().map(|(_, o)| o.containment_failures).sum();
    let detail: Vec<String> = outcomes
        .iter()
        .map(|(name, o)| format!("{name}: {} sets, min p {:.4}", o.cases, o.min_p))
        .collect();
    report(
        "4",
        min_p > MARGINAL_MIN_P && failures == 0,
        format!("min p {min_p:.4} (> {MARGINAL_MIN_P}), containment failures {failures}; {}", detail.join("; ")),
    );
}

// ---- 5. phase invariants ----

#[test]
fn criterion_05_phase_invariants() {
    let runs = 50;
    let mut violations = 0;
    let mut seed_vertices = 0;
    let mut checked = 0;
    for run in 0..runs {
        let (n, delta) = if run % 2 == 0 { (100, 24) } else { (100, 32) };
        let g = Graph::random_regular(n, delta, ROOT_SEED + run, 1000).unwrap();
        let config = SamplerConfig::new(threshold_q(delta), ROOT_SEED ^ run);
        let sampler = Sampler::new(&g, config.clone()).unwrap();
        let seeds = sampler.seeds();
        seed_vertices += seeds.len();
        let mut observe = |stage: Stage, state: &BoundingState| {
            let (members, ok): (Vec<usize>, fn(usize) -> bool) = match stage {
                Stage::PhaseIInit => (seeds.vertices(), |k| k == 2 || k == 3),
                Stage::PhaseIIConvert => ((0..n).filter(|&v| !seeds.contains(v)).collect(), |k| k == 1 || k == 2),
                _ => return,
            };
            checked += members.len();
            violations += members.iter().filter(|&&v| !ok(state.list(v).len())).count();
        };
        let block = construct_block_observed(&g, seeds, &config, 1, sampler.stream(), &mut observe);
        assert!(block.abort.is_none(), "{:?}", block.abort);
    }
    report(
        "5",
        violations == 0 && seed_vertices > 0,
        format!("{runs} runs, {checked} list checks, {seed_vertices} seed vertices, violations {violations}"),
    );
}

// ---- 6. LLL partition ----

#[test]
fn criterion_06_partition_audit() {
    let mut partitions = 0;
    let mut violations = 0;
    let mut over_budget = 0;
    let mut max_resamples = 0;
    for delta in [6, 8, 16, 24, 32] {
        for n in [100, 200, 400, 800, 1600] {
            let g = Graph::random_regular(n, delta, ROOT_SEED + (n * delta) as u64, 1000).unwrap();
            for seed in 0..5 {
                let stream = SamplerConfig::new(threshold_q(delta), ROOT_SEED + seed).stream();
                match lll_partition(&g, &stream) {
                    Ok(p) => {
                        violations += p.audit(&g).len();
                        max_resamples = max_resamples.max(p.resamples());
                        if p.resamples() > resample_budget(&g) {
                            over_budget += 1;
                        }
                    }
                    Err(_) => over_budget += 1,
                }
                partitions += 1;
            }
        }
    }
    report(
        "6",
        violations == 0 && over_budget == 0,
        format!("{partitions} partitions, degree violations {violations}, over budget {over_budget}, max resamples {max_resamples}"),
    );
}

// ---- 7. LP characterization ----

fn exact_to_f64(q: &cftp_core::oracle::lp_vertices::Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

#[test]
fn criterion_07_lp_characterization() {
    let mut points = 0;
    let mut row_failures = Vec::new();
    let mut optimum_gaps = Vec::new();
    for delta in 3..=16usize {
        for s in delta + 1..=2 * delta {
            for q in (7 * delta).div_ceil(3)..=3 * delta {
                points += 1;
                let inst = LpInstance::new(s, delta, q);
                let law = inst.solve_relaxed_lp().unwrap();
                let rows_ok = (1..=delta).all(|j| {
                    inst.lp_constraint_lhs(&law, j) <= inst.row_bound(j) + LP_TOLERANCE
                });
                if !rows_ok {
                    row_failures.push((delta, s, q));
                }
                let best = exact_to_f64(&relaxed_optimum(s, delta, q).unwrap().expected_size());
                if (law.expected_size() - best).abs() > LP_TOLERANCE {
                    optimum_gaps.push((delta, s, q, law.expected_size(), best));
                }
            }
        }
    }
    report(
        "7",
        row_failures.is_empty() && optimum_gaps.is_empty(),
        format!("{points} grid points, row failures {row_failures:?}, optimum mismatches {optimum_gaps:?}"),
    );
}

// ---- 8. lower-bound obstruction ----

#[test]
fn criterion_08_lower_bound() {
    let mut cases = 0;
    let mut min_bound = f64::INFINITY;
    for delta in (4usize..=20).step_by(2) {
        let upper = 2.5 * delta as f64 - 1.0;
        for q in (3 * delta).div_ceil(2).. {
            if q as f64 >= upper {
                break;
            }
            min_bound = min_bound.min(lower_bound_value(delta, q).unwrap());
            cases += 1;
        }
    }
    let inst = build_worst_case(4, 8, 1).unwrap();
    assert!(inst.audit());
    let audit = audit_coupling_at_worst_case(
        &inst,
        0,
        AuditCoupling::Seeding,
        100_000,
        &SeedStream::new(ROOT_SEED),
    );
    let ci_low = audit.ci_low.expect("seeding applies at the worst case");
    report(
        "8",
        min_bound > 2.0 && ci_low > 2.0,
        format!(
            "min bound {min_bound:.4} over {cases} (Δ, q) pairs; seeding E|L| {:.4} CI [{ci_low:.4}, {:.4}] (floor {:.4})",
            audit.mean.unwrap(),
            audit.ci_high.unwrap(),
            inst.bound
        ),
    );
}

// ---- 9. disjoint success probability ----

#[test]
fn criterion_09_disjoint_success() {
    let lists = [set(&[5]), set(&[6]), set(&[1, 2]), set(&[3, 4])];
    let c = Disjoint::from_neighbor_lists(&lists, 10).unwrap();
    assert_eq!(c.slack(), &set(&[1, 2, 3, 4, 5, 6]));
    assert_eq!(c.singles(), &set(&[5, 6]));
    assert_eq!(c.pair_colors(), &set(&[1, 2, 3, 4]));
    let trials = 100_000;
    let stream = SeedStream::new(ROOT_SEED);
    let ones = (0..trials)
        .filter(|&u| c.predict(&stream, SubSeedAddress::new(1, u)).unwrap().0.len() == 1)
        .count();
    let f = ones as f64 / trials as f64;
    let target = 2.0 / 3.0;
    let sigma = binomial_sigma(target, trials as usize);
    report(
        "9",
        f >= target - 3.0 * sigma,
        format!("Pr[|L'|=1] {f:.5} (>= {:.5}); analytic {:.5}", target - 3.0 * sigma, c.size_one_probability()),
    );
}

// ---- 10. scaling ----

const SCALING_SAMPLES: u64 = 8;
const MIN_R_SQUARED: f64 = 0.95;
const MAX_MEAN_BLOCKS: f64 = 2.5;

#[test]
fn criterion_10_scaling() {
    let delta = 8;
    let q = threshold_q(delta);
    let root = SeedStream::new(ROOT_SEED);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut blocks = 0;
    let mut samples = 0;
    for n in [100usize, 200, 400, 800, 1600] {
        let g = Graph::random_regular(n, delta, ROOT_SEED + n as u64, 1000).unwrap();
        let mut updates = 0;
        for i in 0..SCALING_SAMPLES {
            let config = SamplerConfig::new(q, root.fork(n as u64 * 1000 + i).master_seed());
            let out = Sampler::new(&g, config).unwrap().sample().unwrap();
            updates += out.stats.updates;
            blocks += out.stats.blocks_used;
            samples += 1;
        }
        xs.push(n as f64 * (n as f64).ln());
        ys.push(updates as f64 / SCALING_SAMPLES as f64);
    }
    // Least squares through the origin, R² against the mean.
    let c = xs.iter().zip(&ys).map(|(x, y)| x * y).sum::<f64>() / xs.iter().map(|x| x * x).sum::<f64>();
    let mean = ys.iter().sum::<f64>() / ys.len() as f64;
    let ss_res: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - c * x).powi(2)).sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - mean).powi(2)).sum();
    let r2 = 1.0 - ss_res / ss_tot;
    let mean_blocks = blocks as f64 / samples as f64;
    report(
        "10",
        r2 >= MIN_R_SQUARED && mean_blocks <= MAX_MEAN_BLOCKS,
        format!("c {c:.3}, R² {r2:.4} (>= {MIN_R_SQUARED}), mean blocks {mean_blocks:.3} (<= {MAX_MEAN_BLOCKS}))"),
    );
}
