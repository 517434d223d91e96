use std::fs;

use anyhow::Context;
use serde_json::{json, Value};

use cftp_core::oracle::build_worst_case;
use cftp_core::Graph;

use crate::{Exit, GraphArgs};

/// Restarts allowed when generating a random regular graph.
const REGULAR_RESTARTS: usize = 1000;

pub struct GraphSource {
    pub graph: Graph,
    pub spec: String,
}

impl GraphSource {
    pub fn describe(&self) -> Value {
        json!({
            "source": self.spec,
            "n": self.graph.n(),
            "edges": self.graph.num_edges(),
            "max_degree": self.graph.max_degree(),
        })
    }
}

pub fn load(args: &GraphArgs) -> anyhow::Result<GraphSource> {
    match (&args.generator, &args.graph) {
        (Some(spec), None) => Ok(GraphSource {
            graph: generate(spec)?,
            spec: spec.clone(),
        }),
        (None, Some(path)) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let graph = Graph::parse_edge_list(&text).with_context(|| format!("parsing {}", path.display()))?;
            Ok(GraphSource {
                graph,
                spec: format!("file:{}", path.display()),
            })
        }
        _ => Err(Exit::usage("give exactly one of --gen or --graph").into()),
    }
}

fn numbers(spec: &str, params: &str, count: usize) -> Result<Vec<usize>, Exit> {
    let values: Result<Vec<usize>, _> = params.split(',').map(|p| p.trim().parse()).collect();
    match values {
        Ok(v) if v.len() == count => Ok(v),
        _ => Err(Exit::usage(format!("generator `{spec}` expects {count} comma-separated integers"))),
    }
}

/// Parse a generator spec such as `regular:200,8`. Random generators take
/// their seed from the spec's parameters so a graph is the same across runs.
pub fn generate(spec: &str) -> anyhow::Result<Graph> {
    let (name, params) = spec.split_once(':').unwrap_or((spec, ""));
    let graph = match name {
        "k4" if params.is_empty() => Graph::complete(4),
        "bipartite" => Graph::complete_bipartite(numbers(spec, params, 1)?[0])?,
        "regular" => {
            let v = numbers(spec, params, 2)?;
            let seed = (v[0] as u64) << 32 | v[1] as u64;
            Graph::random_regular(v[0], v[1], seed, REGULAR_RESTARTS)?
        }
        "worstcase" => {
            let v = numbers(spec, params, 3)?;
            build_worst_case(v[0], v[1], v[2])?.graph
        }
        _ => {
            return Err(Exit::usage(format!(
                "unknown generator `{spec}`; use k4, bipartite:D, regular:n,d or worstcase:delta,q,copies"
            ))
            .into())
        }
    };
    Ok(graph)
}

/// Parse an inclusive range `a..b` or a single value.
pub fn inclusive_range(text: &str) -> Result<(usize, usize), Exit> {
    let bad = || Exit::usage(format!("expected a range like 3..16, got `{text}`"));
    let (lo, hi) = match text.split_once("..") {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim_start_matches('=').trim().parse().map_err(|_| bad())?),
        None => {
            let v = text.trim().parse().map_err(|_| bad())?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

pub fn list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, Exit> {
    text.split(',')
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| Exit::usage(format!("bad {what} `{p}` in `{text}`")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators() {
        assert_eq!(generate("k4").unwrap().num_edges(), 6);
        assert_eq!(generate("bipartite:3").unwrap().n(), 6);
        let g = generate("regular:20,4").unwrap();
        assert_eq!((g.n(), g.max_degree()), (20, 4));
        assert_eq!(generate("regular:20,4").unwrap().edges(), g.edges());
        assert_eq!(generate("worstcase:4,8,2").unwrap().n(), 16);
        assert!(generate("petersen").is_err());
        assert!(generate("regular:20").is_err());
    }

    #[test]
    fn ranges() {
        assert_eq!(inclusive_range("3..16").unwrap(), (3, 16));
        assert_eq!(inclusive_range("3..=16").unwrap(), (3, 16));
        assert_eq!(inclusive_range("7").unwrap(), (7, 7));
        assert!(inclusive_range("9..3").is_err());
        assert_eq!(list::<usize>("1, 2,3", "n").unwrap(), vec![1, 2, 3]);
    }
}
