use cftp_core::coupling::{Compress, LocalCoupling, LpInstance};
use cftp_core::error::OracleError;
use cftp_core::oracle::{
    audit_coupling_at_worst_case, build_worst_case, chi_square_uniform, complete_graph_colorings,
    count_colorings, cycle_colorings, enumerate_colorings, goodness_of_fit, lower_bound_value,
    relaxed_optimum, relaxed_vertices, tree_colorings, AuditCoupling,
};
use cftp_core::seed::{PermutationMode, SeedStream, SubSeedAddress};
use cftp_core::{ColorSet, Graph};

#[test]
fn enumeration_matches_chromatic_polynomials() {
    assert_eq!(count_colorings(&Graph::complete(4), 13).unwrap(), 17160);
    for (n, q) in [(3, 3), (4, 5), (5, 4), (7, 3)] {
        assert_eq!(count_colorings(&Graph::complete(n), q).unwrap(), complete_graph_colorings(n, q));
        if n >= 3 {
            assert_eq!(count_colorings(&Graph::cycle(n).unwrap(), q).unwrap(), cycle_colorings(n, q));
        }
        assert_eq!(count_colorings(&Graph::path(n), q).unwrap(), tree_colorings(n, q));
    }
    assert_eq!(count_colorings(&Graph::complete(3), 2).unwrap(), 0);
}

#[test]
fn enumeration_budget_is_enforced() {
    let g = Graph::cycle(12).unwrap();
    assert!(matches!(
        enumerate_colorings(&g, 20),
        Err(OracleError::EnumerationBudget { .. })
    ));
}

#[test]
fn goodness_of_fit_rejects_improper_samples() {
    let g = Graph::complete(2);
    let universe = enumerate_colorings(&g, 3).unwrap();
    let samples = vec![vec![0, 1], vec![1, 1]];
    assert!(matches!(
        goodness_of_fit(&samples, &universe),
        Err(OracleError::SampleOutsideUniverse { index: 1 })
    ));
}

#[test]
fn chi_square_detects_a_biased_shuffle() {
    // Compress falls back to the first unblocked color of its permutation,
    // so a biased shuffle shows up in the marginal.
    let a: ColorSet = [0, 1, 2].into_iter().collect();
    let c = Compress::new(a, 6, 3).unwrap();
    let blocked: ColorSet = [3, 4].into_iter().collect();
    let run = |mode| {
        let stream = SeedStream::new(12).with_permutation_mode(mode);
        let mut counts = [0u64; 6];
        for u in 0..100_000 {
            let (_, draw) = c.predict(&stream, SubSeedAddress::new(1, u)).unwrap();
            counts[c.decode(&draw, &blocked).unwrap()] += 1;
        }
        chi_square_uniform(&[counts[0], counts[1], counts[2], counts[5]]).p_value
    };
    assert!(run(PermutationMode::FisherYates) > 0.001);
    assert!(run(PermutationMode::NaiveSwap) < 1e-6);
}

/// The closed form reaches the optimum value and is one of the optimal
/// vertices; ties between vertices happen when `z(i) = w` exactly.
#[test]
fn relaxed_vertices_agree_with_closed_form() {
    for delta in 3usize..=8 {
        for s in delta + 1..=2 * delta {
            for q in (7 * delta).div_ceil(3).max(s + 1)..=3 * delta {
                let best = relaxed_optimum(s, delta, q).unwrap().expected_size();
                let best = *best.numer() as f64 / *best.denom() as f64;
                let closed = LpInstance::new(s, delta, q).solve_relaxed_lp().unwrap();
                assert!((closed.expected_size() - best).abs() < 1e-9, "({delta},{s},{q})");
                let matches_vertex = relaxed_vertices(s, delta, q).iter().any(|v| {
                    let v = v.to_f64();
                    (1..=delta).all(|k| (v[k - 1] - closed.r(k)).abs() < 1e-9)
                });
                assert!(matches_vertex, "({delta},{s},{q})");
            }
        }
    }
}

#[test]
fn lower_bound_table() {
    assert!((lower_bound_value(4, 8).unwrap() - (4.0 / 5.0 + 2.0 / 4.0 + 1.0)).abs() < 1e-12);
    assert!(lower_bound_value(5, 10).is_err());
    assert!(lower_bound_value(4, 5).is_err());
}

#[test]
fn worst_case_instance_shape() {
    let inst = build_worst_case(6, 12, 2).unwrap();
    assert_eq!(inst.graph.n(), 24);
    assert_eq!(inst.graph.max_degree(), 6);
    assert!(inst.audit());
    assert!(inst.lists.lists().iter().all(|l| l.len() == 2));
}

#[test]
fn audits_report_failed_preconditions() {
    let inst = build_worst_case(4, 8, 1).unwrap();
    let stream = SeedStream::new(3);
    let compress = audit_coupling_at_worst_case(&inst, 0, AuditCoupling::Compress, 2000, &stream);
    assert_eq!(compress.mean, Some(5.0));
    let disjoint = audit_coupling_at_worst_case(&inst, 0, AuditCoupling::Disjoint, 2000, &stream);
    if let Some(mean) = disjoint.mean {
        assert!(mean > 1.0);
    } else {
        assert!(disjoint.note.is_some());
    }
}
