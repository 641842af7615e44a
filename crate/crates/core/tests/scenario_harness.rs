//! The remaining named scenarios, run end to end at the default gauge.

use mtf_core::verify::{emit_report, run_scenario, ReportFormat, ScenarioConfig};

#[test]
fn minimizer_map_scenario_passes() {
    let report = run_scenario("minimizer-map", &ScenarioConfig::gauge_default()).unwrap();
    assert!(
        report.passed,
        "{}",
        emit_report(&report, ReportFormat::Text)
    );
}

#[test]
fn roundtrip_scenario_passes() {
    let report = run_scenario("roundtrip", &ScenarioConfig::gauge_default()).unwrap();
    assert!(
        report.passed,
        "{}",
        emit_report(&report, ReportFormat::Text)
    );
}

#[test]
fn scenarios_run_under_non_gauge_configs() {
    // q = 2 electrons, Z = 2: physical parameters rather than the gauge
    let sc = ScenarioConfig {
        cfg: mtf_core::AtomConfig::new(2.0, 2.0, 2.0).unwrap(),
        n: 256,
        ..ScenarioConfig::gauge_default()
    };
    for name in ["isometry", "convexity", "rearrangement"] {
        let report = run_scenario(name, &sc).unwrap();
        assert!(
            report.passed,
            "{name}: {}",
            emit_report(&report, ReportFormat::Text)
        );
    }
}
