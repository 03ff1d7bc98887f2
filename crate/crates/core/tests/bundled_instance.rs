use morrap_core::pipeline::{run_pipeline, Consistency, RunOptions};
use morrap_core::reduction::{km_centroid, nie_tan};
use morrap_core::{ProblemConfig, Profile, Reduction, DEFAULT_GRID};

#[test]
fn doubling_the_grid_barely_moves_any_value() {
    let config = ProblemConfig::bundled();
    for f in config.it2_reliabilities() {
        for r in [Reduction::KarnikMendel, Reduction::UncertaintyBounds, Reduction::NieTan] {
            let a = r.defuzzify(f, DEFAULT_GRID).unwrap();
            let b = r.defuzzify(f, 2 * DEFAULT_GRID - 1).unwrap();
            assert!((a - b).abs() < 5e-4, "{r} on {f}: {a} vs {b}");
        }
    }
}

#[test]
fn km_interval_contains_nie_tan_and_stays_in_support() {
    let config = ProblemConfig::bundled();
    for f in config.it2_reliabilities() {
        let km = km_centroid(f, DEFAULT_GRID).unwrap();
        assert!(km.contains(nie_tan(f, DEFAULT_GRID).unwrap()), "{f}");
        let (lo, hi) = (f.upper().left(), f.upper().right());
        for r in Reduction::IT2_METHODS {
            let v = r.defuzzify(f, DEFAULT_GRID).unwrap();
            assert!((lo..=hi).contains(&v), "{r} on {f}: {v}");
        }
    }
}

#[test]
fn published_crisp_values_reproduce_the_published_compromises() {
    let config = ProblemConfig::bundled();
    let opts = RunOptions {
        profile: Profile::Reproduce,
        reference_values: true,
        ..RunOptions::default()
    };
    let report = run_pipeline(&config, &opts).unwrap();
    assert_eq!(report.reliabilities.source, "reference");
    let matched: Vec<_> = report
        .solutions
        .iter()
        .map(|s| (s.method.as_str(), s.params.as_str(), s.matches_reference))
        .collect();
    assert_eq!(
        matched,
        [
            ("global", "p=2", Some(true)),
            ("weighted", "w=0.5,0.5", Some(true)),
            ("desirability", "t1=1,t2=0.1", Some(true)),
            ("desirability", "t1=0.5,t2=0.1", Some(true)),
            ("fuzzy", "", Some(true)),
            ("nimbus", "reliability=free,cost=improve", Some(false)),
        ]
    );
    let statuses: Vec<_> = report.reference_checks.iter().map(|c| c.status).collect();
    assert_eq!(statuses.iter().filter(|s| **s == Consistency::Consistent).count(), 3);
    assert!(report.calibration.unwrap().matched.is_some());
}

#[test]
fn strict_profile_caps_every_count_at_three() {
    let config = ProblemConfig::bundled();
    let report = run_pipeline(&config, &RunOptions::default()).unwrap();
    assert_eq!(report.feasible_designs, 3usize.pow(10));
    for s in &report.solutions {
        assert!(s.design.counts().iter().all(|&n| (1..=3).contains(&n)));
    }
}

#[test]
fn type1_runs_report_generated_inputs_as_unverifiable() {
    let config = ProblemConfig::bundled();
    let opts = RunOptions {
        reduction: Reduction::T1Centroid,
        profile: Profile::Reproduce,
        ..RunOptions::default()
    };
    let report = run_pipeline(&config, &opts).unwrap();
    assert_eq!(report.reliabilities.source, "generated");
    assert!(report
        .reference_checks
        .iter()
        .all(|c| c.status == Consistency::Unverifiable));
}
