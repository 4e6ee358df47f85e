use nac_core::baselines::Method;
use nac_core::dcsbm::DimCase;
use nac_core::harness::{
    aggregate, audit_records, format_records, mean, run_sweep, run_sweep_with_threads, Profile, Study,
    SweepConfig,
};

fn small(study: Study) -> SweepConfig {
    SweepConfig {
        n: 150,
        reps: 3,
        values: vec![study.range(DimCase::LowDim).0, study.range(DimCase::LowDim).1],
        methods: vec![Method::Nac, Method::NetRegLaplacian, Method::CovOnly],
        restarts: 5,
        ..SweepConfig::new(study, DimCase::LowDim, Profile::Desk)
    }
}

#[test]
fn records_are_ordered_and_bounded() {
    let cfg = small(Study::PMatrix);
    let recs = run_sweep(&cfg).unwrap();
    assert_eq!(recs.len(), 2 * 3 * 3);
    for r in &recs {
        for e in [r.error, r.error_dense, r.error_sparse_good, r.error_good].into_iter().flatten() {
            assert!((0.0..=1.0).contains(&e));
        }
        assert!((0.0..=1.0).contains(&r.epsilon));
    }
    let keys: Vec<_> = recs.iter().map(|r| (r.value.to_bits(), r.rep, r.method)).collect();
    let mut sorted = keys.clone();
    sorted.sort_by(|a, b| f64::from_bits(a.0).total_cmp(&f64::from_bits(b.0)).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    assert_eq!(keys, sorted);
}

#[test]
fn output_does_not_depend_on_thread_count() {
    let cfg = small(Study::Misspec);
    let one = format_records(&run_sweep_with_threads(&cfg, 1).unwrap());
    let four = format_records(&run_sweep_with_threads(&cfg, 4).unwrap());
    assert_eq!(one, four);
}

#[test]
fn aggregate_means_match_records() {
    let cfg = small(Study::Signal);
    let recs = run_sweep(&cfg).unwrap();
    for row in aggregate(&recs) {
        let errs: Vec<f64> = recs
            .iter()
            .filter(|r| r.value == row.value && r.method == row.method)
            .filter_map(|r| r.error)
            .collect();
        assert_eq!(errs.len(), row.reps_ok);
        assert!((mean(&errs) - row.mean_error).abs() <= 1e-12);
    }
}

#[test]
fn stored_errors_survive_audit() {
    let cfg = small(Study::Misspec);
    let recs = run_sweep(&cfg).unwrap();
    assert_eq!(audit_records(&cfg, &recs, 5, 1).unwrap(), 5);

    let mut tampered = recs.clone();
    for r in &mut tampered {
        r.error = r.error.map(|e| (e + 0.5) % 1.0);
    }
    assert!(audit_records(&cfg, &tampered, 5, 1).is_err());
}

#[test]
fn strong_signal_without_misspecification_recovers_dense_nodes() {
    let cfg = SweepConfig {
        n: 600,
        reps: 3,
        values: vec![0.0],
        methods: vec![Method::Nac],
        mu: 1.5,
        ..SweepConfig::new(Study::Misspec, DimCase::LowDim, Profile::Desk)
    };
    let recs = run_sweep(&cfg).unwrap();
    for r in &recs {
        assert_eq!(r.epsilon, 0.0);
        assert!(r.error_dense.unwrap() <= 0.02, "{r:?}");
    }
}
