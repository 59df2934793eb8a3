//! Property test: the key=value configuration format inverts itself.

use kacgap::intervals::IntervalSet;
use kacgap_cli::config::RunConfig;
use proptest::prelude::*;

fn config_strategy() -> impl Strategy<Value = RunConfig> {
    let sampling = (
        prop::sample::select(vec!["gaussian", "rademacher", "uniform3", "uniform:0.5"]),
        prop::collection::vec(2u32..5000, 1..4),
        1u64..10_000,
        any::<u64>(),
        0.5f64..40.0,
        prop::collection::vec((0.0f64..5.0, 0.0f64..5.0), 0..3),
        0.01f64..0.3,
    );
    let solver = (
        1e-12f64..1e-6,
        10u32..500,
        any::<bool>(),
        0.05f64..0.95,
        1.0f64..500.0,
        0usize..16,
    );
    (sampling, solver).prop_map(
        |(
            (law, degrees, trials, seed, k, u_pieces, beta),
            (tol, iters, polish, r0, cutoff, threads),
        )| {
            let mut u_sets = std::collections::BTreeMap::new();
            for (i, (a, len)) in u_pieces.into_iter().enumerate() {
                u_sets.insert(format!("U{i}"), IntervalSet::interval(a, a + len).unwrap());
            }
            RunConfig {
                law: law.to_string(),
                degrees,
                trials,
                seed,
                k,
                u_sets,
                beta,
                smooth_exp: 0.15,
                residual_tol: tol,
                max_iters: iters,
                polish,
                r0,
                gap_cutoff: cutoff,
                threads,
                out: "out.jsonl".to_string(),
            }
        },
    )
}

proptest! {
    #[test]
    fn parse_inverts_serialize(cfg in config_strategy()) {
        let text = cfg.to_kv();
        let parsed = RunConfig::parse(&text).unwrap();
        prop_assert_eq!(&parsed, &cfg);
        prop_assert_eq!(parsed.hash(), cfg.hash());
    }
}
