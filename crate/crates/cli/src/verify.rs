use serde_json::{json, Value};

use cftp_core::coupling::{
    realizable_blocked_sets, subsets_up_to, Compress, Disjoint, LocalCoupling, Seeding,
};
use cftp_core::oracle::{binomial_sigma, chi_square_uniform, enumerate_colorings, ColoringIndex};
use cftp_core::seed::PermutationMode;
use cftp_core::{ColorSet, Graph, Sampler, SamplerConfig, SeedStream, SubSeedAddress};

use crate::output::{self, Meta};
use crate::tables::lp_grid;
use crate::{resolve_seed, Format, VerifyArgs, EXIT_FAILURE, EXIT_OK};

/// Family-wise significance level of each marginal suite.
const ALPHA: f64 = 0.001;
/// Allowed deviation of the size-law frequency, in binomial standard deviations.
const SIZE_LAW_SIGMAS: f64 = 4.0;

struct Check {
    name: String,
    passed: bool,
    detail: Value,
}

fn set(xs: &[usize]) -> ColorSet {
    xs.iter().copied().collect()
}

/// Chi-square of every blocked set against Uniform([q] \ B) at a
/// Bonferroni-corrected level, plus containment in the predicted set.
fn marginal_check<C: LocalCoupling>(
    name: &str,
    c: &C,
    q: usize,
    blocked: &[ColorSet],
    trials: u64,
    stream: &SeedStream,
) -> Vec<Check> {
    let mut counts = vec![vec![0u64; q]; blocked.len()];
    let mut escapes = 0u64;
    for u in 0..trials {
        let (pred, draw) = c.predict(stream, SubSeedAddress::new(1, u)).expect("valid fixture");
        for (b, row) in blocked.iter().zip(counts.iter_mut()) {
            let out = c.decode(&draw, b).expect("realizable blocked set");
            escapes += u64::from(!pred.contains(out) || b.contains(out));
            row[out] += 1;
        }
    }
    let level = ALPHA / blocked.len() as f64;
    let min_p = blocked
        .iter()
        .zip(&counts)
        .map(|(b, row)| {
            let cells: Vec<u64> = b.complement(q).iter().map(|c| row[c]).collect();
            chi_square_uniform(&cells).p_value
        })
        .fold(1.0, f64::min);
    vec![
        Check {
            name: format!("{name} marginals"),
            passed: min_p > level,
            detail: json!({"blocked_sets": blocked.len(), "trials": trials, "min_p": min_p, "level": level}),
        },
        Check {
            name: format!("{name} containment"),
            passed: escapes == 0,
            detail: json!({"escapes": escapes}),
        },
    ]
}

fn statistical_suites(trials: u64, stream: &SeedStream, mode: PermutationMode) -> Vec<Check> {
    let mut checks = Vec::new();

    let compress = Compress::new(set(&[0, 1, 2]), 6, 3).expect("fixture");
    let all = subsets_up_to(&ColorSet::full(6), 3);
    checks.extend(marginal_check("compress", &compress, 6, &all, trials, stream));

    let s = set(&[0, 1, 2, 3, 4]);
    let seeding = Seeding::for_slack(s, 8, 3).expect("fixture");
    checks.extend(marginal_check("seeding", &seeding, 8, &subsets_up_to(&s, 3), trials, stream));

    let lists = [set(&[5]), set(&[6]), set(&[1, 2]), set(&[3, 4])];
    let disjoint = Disjoint::from_neighbor_lists(&lists, 10).expect("fixture");
    let sets = realizable_blocked_sets(&lists);
    checks.extend(marginal_check("disjoint", &disjoint, 10, &sets, trials, stream));

    let law_fixture = Seeding::for_slack((0..24).collect(), 30, 12).expect("fixture");
    let r3 = law_fixture.law().r(3);
    let mut threes = 0u64;
    let mut other = 0u64;
    for u in 0..trials {
        match law_fixture.predict(stream, SubSeedAddress::new(2, u)).expect("fixture").0.len() {
            3 => threes += 1,
            2 => {}
            _ => other += 1,
        }
    }
    let f = threes as f64 / trials as f64;
    let sigma = binomial_sigma(r3, trials as usize);
    checks.push(Check {
        name: "seeding size law".into(),
        passed: (f - r3).abs() <= SIZE_LAW_SIGMAS * sigma && other == 0,
        detail: json!({"frequency": f, "expected": r3, "sigma": sigma, "sizes_outside": other}),
    });

    let g = Graph::complete(3);
    let q = 9;
    let universe = enumerate_colorings(&g, q).expect("small instance");
    let index = ColoringIndex::new(&universe);
    let mut counts = vec![0u64; universe.len()];
    let samples = (trials / 5).max(universe.len() as u64 * 5);
    for i in 0..samples {
        let mut config = SamplerConfig::new(q, stream.fork(i).master_seed());
        config.permutation_mode = mode;
        let coloring = Sampler::new(&g, config)
            .and_then(|s| s.sample())
            .map(|o| o.coloring);
        match coloring.ok().and_then(|c| index.get(&c)) {
            Some(cell) => counts[cell] += 1,
            None => {
                checks.push(Check {
                    name: "uniformity K3 q=9".into(),
                    passed: false,
                    detail: json!({"error": "sampler failed or produced an improper coloring", "sample": i}),
                });
                return checks;
            }
        }
    }
    let r = chi_square_uniform(&counts);
    checks.push(Check {
        name: "uniformity K3 q=9".into(),
        passed: r.p_value > ALPHA,
        detail: json!(r),
    });
    checks
}

fn lp_checks(delta: &str) -> anyhow::Result<Vec<Check>> {
    let rows = lp_grid(delta)?;
    let infeasible: Vec<_> = rows.iter().filter(|r| !r.feasible()).map(|r| (r.delta, r.s, r.q)).collect();
    let suboptimal: Vec<_> = rows
        .iter()
        .filter(|r| !r.matches_optimum())
        .map(|r| (r.delta, r.s, r.q))
        .collect();
    Ok(vec![
        Check {
            name: "closed form satisfies every row".into(),
            passed: infeasible.is_empty(),
            detail: json!({"points": rows.len(), "failures": infeasible}),
        },
        Check {
            name: "closed form equals the vertex optimum".into(),
            passed: suboptimal.is_empty(),
            detail: json!({"points": rows.len(), "failures": suboptimal}),
        },
    ])
}

pub fn run(args: VerifyArgs) -> anyhow::Result<u8> {
    let mode = if args.inject_fault {
        PermutationMode::NaiveSwap
    } else {
        PermutationMode::FisherYates
    };
    let (checks, seed) = if args.lp {
        (lp_checks(&args.delta)?, None)
    } else {
        let seed = resolve_seed(args.seed);
        let stream = SeedStream::new(seed).with_permutation_mode(mode);
        (statistical_suites(args.trials, &stream, mode), Some(seed))
    };
    let passed = checks.iter().all(|c| c.passed);
    let config = json!({
        "lp": args.lp,
        "delta": args.delta,
        "inject_fault": args.inject_fault,
        "trials": args.trials,
    });
    let meta = match seed {
        Some(seed) => Meta::new("verify", seed, config),
        None => Meta::unseeded("verify", config),
    };
    let text = match args.output.format {
        Format::Json => {
            let checks: Vec<Value> = checks
                .iter()
                .map(|c| json!({"name": c.name, "passed": c.passed, "detail": c.detail}))
                .collect();
            output::json_document(&meta, json!({"passed": passed, "checks": checks}))
        }
        Format::Csv => {
            let mut csv = output::csv_header(&meta, "check,passed,detail");
            for c in &checks {
                let detail = c.detail.to_string().replace('"', "\"\"");
                csv.push_str(&format!("{},{},\"{detail}\"\n", c.name, c.passed));
            }
            csv
        }
    };
    output::emit(&args.output, "verify", seed, &text)?;
    for c in checks.iter().filter(|c| !c.passed) {
        eprintln!("FAILED: {}", c.name);
    }
    Ok(if passed { EXIT_OK } else { EXIT_FAILURE })
}
