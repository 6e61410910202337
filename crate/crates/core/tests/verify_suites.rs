use finobs_core::verify::{run_criterion, DEFAULT_SEED};

#[test]
fn every_criterion_passes_at_the_default_seed() {
    for id in 1..=13 {
        let started = std::time::Instant::now();
        let report = run_criterion(id, DEFAULT_SEED).unwrap();
        eprintln!("{report} [{:?}]", started.elapsed());
        assert!(report.passed, "{report}");
    }
}
