use serde_json::{json, Value};

use cftp_core::coupling::{seeding_size_law, LpInstance, SizeLaw};
use cftp_core::engine::{eta, inclusion_probability, lll_partition, resample_budget};
use cftp_core::oracle::{
    audit_coupling_at_worst_case, build_worst_case, lower_bound_value, relaxed_optimum,
    AuditCoupling, AuditReport,
};
use cftp_core::SeedStream;

use crate::output::{self, Meta};
use crate::source::{self, inclusive_range};
use crate::{resolve_seed, Exit, Format, LowerboundArgs, LpArgs, PartitionArgs, EXIT_FAILURE, EXIT_OK};

pub fn partition(args: PartitionArgs) -> anyhow::Result<u8> {
    let src = source::load(&args.graph)?;
    let g = &src.graph;
    let seed = resolve_seed(args.seed);
    let seeds = lll_partition(g, &SeedStream::new(seed))?;
    let violations = seeds.audit(g);
    let delta = g.max_degree();
    let meta = Meta::new("partition", seed, json!({ "graph": src.describe() }));
    let text = match args.output.format {
        Format::Json => output::json_document(
            &meta,
            json!({
                "eta": eta(delta),
                "inclusion_probability": inclusion_probability(delta),
                "seed_set_size": seeds.len(),
                "seed_set": seeds.vertices(),
                "resamples": seeds.resamples(),
                "resample_budget": resample_budget(g),
                "violations": violations,
            }),
        ),
        Format::Csv => {
            let mut csv = output::csv_header(&meta, "vertex,in_seed_set,inside,outside");
            for v in 0..g.n() {
                let inside = g.neighbors(v).iter().filter(|&&u| seeds.contains(u)).count();
                csv.push_str(&format!("{v},{},{inside},{}\n", seeds.contains(v) as u8, g.degree(v) - inside));
            }
            csv
        }
    };
    output::emit(&args.output, "partition", seed, &text)?;
    if violations.is_empty() {
        Ok(EXIT_OK)
    } else {
        eprintln!("partition audit failed at {} vertices", violations.len());
        Ok(EXIT_FAILURE)
    }
}

fn audit_columns(report: &AuditReport) -> [String; 3] {
    let f = |x: Option<f64>| x.map(|x| format!("{x:.4}")).unwrap_or_default();
    [f(report.mean), f(report.ci_low), f(report.ci_high)]
}

pub fn lowerbound(args: LowerboundArgs) -> anyhow::Result<u8> {
    let (lo, hi) = inclusive_range(&args.delta)?;
    let seed = args.audit.then(|| resolve_seed(args.seed));
    let stream = SeedStream::new(seed.unwrap_or(0));
    let mut rows = Vec::new();
    for delta in (lo.max(2)..=hi).filter(|d| d % 2 == 0) {
        let upper = 2.5 * delta as f64 - 1.0;
        for q in (3 * delta).div_ceil(2).. {
            if q as f64 >= upper {
                break;
            }
            let bound = lower_bound_value(delta, q)?;
            let audits: Vec<AuditReport> = if args.audit {
                let inst = build_worst_case(delta, q, 1)?;
                [AuditCoupling::Seeding, AuditCoupling::Compress, AuditCoupling::Disjoint]
                    .into_iter()
                    .map(|c| audit_coupling_at_worst_case(&inst, 0, c, args.trials as usize, &stream))
                    .collect()
            } else {
                Vec::new()
            };
            rows.push((delta, q, bound, audits));
        }
    }
    let config = json!({ "delta": args.delta, "audit": args.audit, "trials": args.trials });
    let meta = match seed {
        Some(seed) => Meta::new("lowerbound", seed, config),
        None => Meta::unseeded("lowerbound", config),
    };
    let text = match args.output.format {
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|(delta, q, bound, audits)| {
                    json!({"delta": delta, "q": q, "m": delta / 2, "r": q - 3 * (delta / 2), "bound": bound, "audits": audits})
                })
                .collect();
            output::json_document(&meta, json!({ "rows": rows }))
        }
        Format::Csv => {
            let header = if args.audit {
                "delta,q,m,r,bound,seeding_mean,seeding_ci_low,seeding_ci_high,compress_mean,disjoint_mean"
            } else {
                "delta,q,m,r,bound"
            };
            let mut csv = output::csv_header(&meta, header);
            for (delta, q, bound, audits) in &rows {
                let m = delta / 2;
                csv.push_str(&format!("{delta},{q},{m},{},{bound:.6}", q - 3 * m));
                if let [seeding, compress, disjoint] = audits.as_slice() {
                    let [mean, low, high] = audit_columns(seeding);
                    csv.push_str(&format!(
                        ",{mean},{low},{high},{},{}",
                        audit_columns(compress)[0],
                        audit_columns(disjoint)[0]
                    ));
                }
                csv.push('\n');
            }
            csv
        }
    };
    output::emit(&args.output, "lowerbound", seed, &text)?;
    Ok(EXIT_OK)
}

/// One point of the LP grid.
pub struct LpRow {
    pub delta: usize,
    pub s: usize,
    pub q: usize,
    pub law: SizeLaw,
    pub lp_optimum: f64,
    pub violated_rows: Vec<usize>,
    pub seeding_r3: Option<f64>,
}

impl LpRow {
    pub fn matches_optimum(&self) -> bool {
        (self.law.expected_size() - self.lp_optimum).abs() <= cftp_core::coupling::lp::LP_TOLERANCE
    }

    pub fn feasible(&self) -> bool {
        self.violated_rows.is_empty()
    }
}

/// Every `(Δ, |S|, q)` with `Δ < |S| <= 2Δ` and `ceil(7Δ/3) <= q <= 3Δ`.
pub fn lp_grid(delta_range: &str) -> anyhow::Result<Vec<LpRow>> {
    let (lo, hi) = inclusive_range(delta_range)?;
    if lo < 1 || hi > 40 {
        return Err(Exit::usage("Δ range must lie within 1..40").into());
    }
    let mut rows = Vec::new();
    for delta in lo..=hi {
        for s in delta + 1..=2 * delta {
            for q in (7 * delta).div_ceil(3)..=3 * delta {
                let inst = LpInstance::new(s, delta, q);
                let law = inst
                    .solve_relaxed_lp()
                    .map_err(|e| anyhow::anyhow!("(Δ, |S|, q) = ({delta}, {s}, {q}): {e}"))?;
                let optimum = relaxed_optimum(s, delta, q)
                    .map(|e| {
                        let e = e.expected_size();
                        *e.numer() as f64 / *e.denom() as f64
                    })
                    .unwrap_or(f64::NAN);
                rows.push(LpRow {
                    delta,
                    s,
                    q,
                    violated_rows: inst.verify_full_lp(&law),
                    law,
                    lp_optimum: optimum,
                    seeding_r3: seeding_size_law(s, delta, q).ok().map(|l| l.r(3)),
                });
            }
        }
    }
    Ok(rows)
}

pub fn lp(args: LpArgs) -> anyhow::Result<u8> {
    let rows = lp_grid(&args.delta)?;
    let meta = Meta::unseeded("lp", json!({ "delta": args.delta }));
    let text = match args.output.format {
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "delta": r.delta, "s": r.s, "q": r.q,
                        "law": r.law.weights(),
                        "expected_size": r.law.expected_size(),
                        "lp_optimum": r.lp_optimum,
                        "seeding_r3": r.seeding_r3,
                        "violated_rows": r.violated_rows,
                        "feasible": r.feasible(),
                    })
                })
                .collect();
            output::json_document(&meta, json!({ "rows": rows }))
        }
        Format::Csv => {
            let mut csv = output::csv_header(
                &meta,
                "delta,s,q,r1,r2,r3,r_rest,expected_size,lp_optimum,seeding_r3,feasible",
            );
            for r in &rows {
                let rest = (4..=r.law.max_size()).map(|k| r.law.r(k)).sum::<f64>() + 0.0;
                csv.push_str(&format!(
                    "{},{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{},{}\n",
                    r.delta,
                    r.s,
                    r.q,
                    r.law.r(1),
                    r.law.r(2),
                    r.law.r(3),
                    rest,
                    r.law.expected_size(),
                    r.lp_optimum,
                    r.seeding_r3.map(|x| format!("{x:.6}")).unwrap_or_default(),
                    r.feasible()
                ));
            }
            csv
        }
    };
    output::emit(&args.output, "lp", None, &text)?;
    Ok(EXIT_OK)
}
