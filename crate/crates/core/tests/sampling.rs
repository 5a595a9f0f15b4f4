//! Logging decimation only thins the trace; metrics should not move by more
//! than 2% between the default 100 Hz log and finer or coarser ones.

use tvbarrier_core::controller::ControllerKind;
use tvbarrier_core::metrics::{MetricsReport, Window};
use tvbarrier_core::plant::PlantParams;
use tvbarrier_core::scenario::{build_pick_place, PickPlaceOptions};
use tvbarrier_core::sim::{run, SimConfig, SimTrace, TraceRow};

const DEFAULT_DECIMATION: usize = 10;
const OTHER_DECIMATIONS: [usize; 3] = [1, 5, 20];
const TOLERANCE: f64 = 0.02;

fn full_rate() -> SimTrace {
    let scenario = build_pick_place(&PickPlaceOptions::default()).unwrap();
    run(
        &scenario,
        &PlantParams::default(),
        ControllerKind::Proposed,
        &SimConfig { decimation: 1, ..SimConfig::default() },
    )
    .unwrap()
}

fn thinned(rows: &[TraceRow], decimation: usize) -> Vec<TraceRow> {
    rows.iter().step_by(decimation).copied().collect()
}

fn report(rows: &[TraceRow]) -> MetricsReport {
    MetricsReport::from_rows(ControllerKind::Proposed, rows, Window { lo: 20.0, hi: 150.0 }).unwrap()
}

/// Largest relative change of the selected metric against the default log.
fn worst_change(trace: &SimTrace, pick: fn(&MetricsReport) -> [f64; 2]) -> f64 {
    let reference = pick(&report(&thinned(&trace.rows, DEFAULT_DECIMATION)));
    let mut worst = 0.0f64;
    for d in OTHER_DECIMATIONS {
        let other = pick(&report(&thinned(&trace.rows, d)));
        for j in 0..2 {
            let change = (other[j] - reference[j]).abs() / reference[j];
            println!(
                "decimation {d}, joint {}: {:.5} vs {:.5} ({:.2}%)",
                j + 1,
                other[j],
                reference[j],
                100.0 * change
            );
            worst = worst.max(change);
        }
    }
    worst
}

#[test]
fn decimation_only_thins_rows() {
    let scenario = build_pick_place(&PickPlaceOptions { t_end: 5.0, ..PickPlaceOptions::default() }).unwrap();
    let plant = PlantParams::default();
    let fine = run(&scenario, &plant, ControllerKind::Proposed, &SimConfig { decimation: 1, ..SimConfig::default() });
    let coarse = run(&scenario, &plant, ControllerKind::Proposed, &SimConfig::default());
    assert_eq!(thinned(&fine.unwrap().rows, DEFAULT_DECIMATION), coarse.unwrap().rows);
}

#[test]
fn position_metrics_are_decimation_invariant() {
    let trace = full_rate();
    assert!(worst_change(&trace, |m| m.rms_position_deg) <= TOLERANCE);
    assert!(worst_change(&trace, |m| m.peak_position_deg) <= TOLERANCE);
}

// Known failure: ė has millisecond reaching snaps that a 100 Hz log aliases.
#[test]
fn velocity_metrics_are_decimation_invariant() {
    let trace = full_rate();
    assert!(worst_change(&trace, |m| m.rms_velocity_deg) <= TOLERANCE);
    assert!(worst_change(&trace, |m| m.peak_velocity_deg) <= TOLERANCE);
}
