use std::time::Instant;

use rayon::prelude::*;
use serde_json::{json, Value};

use cftp_core::engine::{coalescence_threshold, resample_budget};
use cftp_core::error::EngineError;
use cftp_core::{Graph, Sampler, SamplerConfig, SeedStream};

use crate::output::{self, Meta};
use crate::source::list;
use crate::{resolve_seed, BenchArgs, Exit, Format, EXIT_FAILURE, EXIT_OK};

const REGULAR_RESTARTS: usize = 1000;

/// `auto`, an integer, or a multiple of Δ written `2d` / `2.5d`.
fn resolve_q(token: &str, delta: usize) -> Result<usize, Exit> {
    let token = token.trim();
    if token == "auto" {
        return Ok(coalescence_threshold(delta).ceil() as usize + 1);
    }
    if let Some(factor) = token.strip_suffix('d') {
        let factor: f64 = factor
            .parse()
            .map_err(|_| Exit::usage(format!("bad palette `{token}`")))?;
        return Ok((factor * delta as f64).ceil() as usize);
    }
    token
        .parse()
        .map_err(|_| Exit::usage(format!("bad palette `{token}`")))
}

struct Rep {
    coalesced: bool,
    blocks: u64,
    updates: u64,
    wall_ms: f64,
    seed_set_size: usize,
    resamples: usize,
    violations: usize,
    abort: Option<String>,
}

fn run_rep(g: &Graph, config: SamplerConfig) -> Result<Rep, EngineError> {
    let start = Instant::now();
    let max_blocks = config.max_blocks;
    let sampler = Sampler::new(g, config)?;
    let seeds = sampler.seeds();
    let (seed_set_size, resamples, violations) = (seeds.len(), seeds.resamples(), seeds.audit(g).len());
    let rep = |coalesced, blocks, updates, abort| Rep {
        coalesced,
        blocks,
        updates,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
        seed_set_size,
        resamples,
        violations,
        abort,
    };
    match sampler.sample() {
        Ok(out) => Ok(rep(true, out.stats.blocks_used, out.stats.updates, out.stats.last_abort)),
        Err(EngineError::NoCoalescence { updates, last_abort, .. }) => Ok(rep(false, max_blocks, updates, last_abort)),
        Err(e) => Err(e),
    }
}

struct Row {
    delta: usize,
    n: usize,
    q: usize,
    threshold: f64,
    reps: Vec<Rep>,
    budget: usize,
}

impl Row {
    fn mean(&self, f: impl Fn(&Rep) -> f64) -> f64 {
        self.reps.iter().map(f).sum::<f64>() / self.reps.len() as f64
    }

    fn successes(&self) -> usize {
        self.reps.iter().filter(|r| r.coalesced).count()
    }

    fn blocks_tried(&self) -> u64 {
        self.reps.iter().map(|r| r.blocks).sum()
    }

    /// Coalescing blocks over blocks built; each successful run ends with
    /// exactly one coalescing block.
    fn coalesced_fraction(&self) -> f64 {
        self.successes() as f64 / self.blocks_tried().max(1) as f64
    }

    fn violations(&self) -> usize {
        self.reps.iter().map(|r| r.violations).sum()
    }

    fn to_json(&self) -> Value {
        json!({
            "delta": self.delta,
            "n": self.n,
            "q": self.q,
            "threshold": self.threshold,
            "reps": self.reps.len(),
            "successes": self.successes(),
            "blocks_tried": self.blocks_tried(),
            "coalesced_fraction": self.coalesced_fraction(),
            "mean_blocks_used": self.mean(|r| r.blocks as f64),
            "mean_updates": self.mean(|r| r.updates as f64),
            "mean_wall_ms": self.mean(|r| r.wall_ms),
            "seed_set_size": self.reps.first().map(|r| r.seed_set_size),
            "max_partition_resamples": self.reps.iter().map(|r| r.resamples).max(),
            "partition_budget": self.budget,
            "partition_violations": self.violations(),
            "last_abort": self.reps.iter().rev().find_map(|r| r.abort.clone()),
        })
    }
}

const CSV_HEADER: &str = "delta,n,q,threshold,reps,successes,blocks_tried,coalesced_fraction,mean_blocks_used,mean_updates,mean_wall_ms,seed_set_size,max_partition_resamples,partition_budget,partition_violations";

pub fn run(args: BenchArgs) -> anyhow::Result<u8> {
    let deltas: Vec<usize> = list(&args.delta, "Δ")?;
    let ns: Vec<usize> = list(&args.n, "n")?;
    let q_tokens: Vec<&str> = args.q.split(',').collect();
    if args.reps == 0 {
        return Err(Exit::usage("--reps must be positive").into());
    }
    let mut plan = Vec::new();
    for &delta in &deltas {
        for token in &q_tokens {
            let q = resolve_q(token, delta)?;
            let threshold = coalescence_threshold(delta);
            if (q as f64) < threshold && !args.force {
                return Err(Exit::usage(format!(
                    "q = {q} is below the threshold {threshold:.2} for Δ = {delta}; pass --force to run it"
                ))
                .into());
            }
            if q < delta + 2 {
                return Err(Exit::usage(format!("q = {q} must be at least Δ + 2 = {}", delta + 2)).into());
            }
            for &n in &ns {
                if n <= delta || n * delta % 2 == 1 {
                    return Err(Exit::usage(format!("no {delta}-regular graph on {n} vertices")).into());
                }
                plan.push((delta, n, q, threshold));
            }
        }
    }

    let seed = resolve_seed(args.seed);
    let root = SeedStream::new(seed);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads.unwrap_or(0))
        .build()?;
    let mut rows = Vec::new();
    for (k, &(delta, n, q, threshold)) in plan.iter().enumerate() {
        let graph_seed = root.fork(u64::MAX - k as u64).master_seed();
        let g = Graph::random_regular(n, delta, graph_seed, REGULAR_RESTARTS)?;
        let base = k as u64 * args.reps;
        let reps: Result<Vec<Rep>, EngineError> = pool.install(|| {
            (0..args.reps)
                .into_par_iter()
                .map(|i| {
                    let config = SamplerConfig::new(q, root.fork(base + i).master_seed())
                        .with_max_blocks(args.max_blocks)
                        .with_force(args.force);
                    run_rep(&g, config)
                })
                .collect()
        });
        let row = Row {
            delta,
            n,
            q,
            threshold,
            reps: reps?,
            budget: resample_budget(&g),
        };
        eprintln!(
            "Δ={delta} n={n} q={q}: coalesced fraction {:.3}, mean updates {:.0}",
            row.coalesced_fraction(),
            row.mean(|r| r.updates as f64)
        );
        rows.push(row);
    }

    let meta = Meta::new(
        "bench",
        seed,
        json!({
            "delta": deltas, "n": ns, "q": args.q, "reps": args.reps,
            "max_blocks": args.max_blocks, "force": args.force,
            "threads": pool.current_num_threads(),
        }),
    );
    let text = match args.output.format {
        Format::Json => output::json_document(&meta, json!({"rows": rows.iter().map(Row::to_json).collect::<Vec<_>>()})),
        Format::Csv => {
            let mut csv = output::csv_header(&meta, CSV_HEADER);
            for r in &rows {
                csv.push_str(&format!(
                    "{},{},{},{:.4},{},{},{},{:.4},{:.4},{:.1},{:.3},{},{},{},{}\n",
                    r.delta,
                    r.n,
                    r.q,
                    r.threshold,
                    r.reps.len(),
                    r.successes(),
                    r.blocks_tried(),
                    r.coalesced_fraction(),
                    r.mean(|x| x.blocks as f64),
                    r.mean(|x| x.updates as f64),
                    r.mean(|x| x.wall_ms),
                    r.reps.first().map_or(0, |x| x.seed_set_size),
                    r.reps.iter().map(|x| x.resamples).max().unwrap_or(0),
                    r.budget,
                    r.violations(),
                ));
            }
            csv
        }
    };
    output::emit(&args.output, "bench", seed, &text)?;
    let violations: usize = rows.iter().map(Row::violations).sum();
    Ok(if violations == 0 { EXIT_OK } else { EXIT_FAILURE })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn palette_tokens() {
        assert_eq!(resolve_q("auto", 8).unwrap(), 31);
        assert_eq!(resolve_q("auto", 6).unwrap(), 25);
        assert_eq!(resolve_q("2d", 8).unwrap(), 16);
        assert_eq!(resolve_q("2.5d", 7).unwrap(), 18);
        assert_eq!(resolve_q("40", 8).unwrap(), 40);
        assert!(resolve_q("x", 8).is_err());
    }
}
