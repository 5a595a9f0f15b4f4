//! Error statistics over simulation traces.

use crate::controller::ControllerKind;
use crate::sim::{SimTrace, Termination, TraceRow, DOF};
use crate::{to_deg, Error, Result};

/// Scalar series that can be extracted from a trace row.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Column {
    PositionError(usize),
    VelocityError(usize),
    Surface(usize),
    SurfaceNorm,
    Torque(usize),
    Gain(usize),
}

impl Column {
    pub fn value(&self, row: &TraceRow) -> f64 {
        match *self {
            Column::PositionError(j) => row.e[j],
            Column::VelocityError(j) => row.edot[j],
            Column::Surface(j) => row.s[j],
            Column::SurfaceNorm => row.s_norm(),
            Column::Torque(j) => row.tau[j],
            Column::Gain(j) => row.k_hat[j],
        }
    }
}

/// Closed time window `[lo, hi]` in seconds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.lo - 1e-9 && t <= self.hi + 1e-9
    }
}

fn samples<'a>(rows: &'a [TraceRow], column: Column, window: Window) -> impl Iterator<Item = f64> + 'a {
    rows.iter().filter(move |r| window.contains(r.t)).map(move |r| column.value(r))
}

/// Root mean square of a column over the rows inside `window`.
pub fn rms(rows: &[TraceRow], column: Column, window: Window) -> Result<f64> {
    rms_of(samples(rows, column, window)).ok_or(Error::EmptyWindow { lo: window.lo, hi: window.hi })
}

/// Largest absolute value of a column over the rows inside `window`.
pub fn peak(rows: &[TraceRow], column: Column, window: Window) -> Result<f64> {
    peak_of(samples(rows, column, window)).ok_or(Error::EmptyWindow { lo: window.lo, hi: window.hi })
}

pub fn rms_of(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    let (mut n, mut sum) = (0usize, 0.0);
    for v in values {
        n += 1;
        sum += v * v;
    }
    (n > 0).then(|| libm::sqrt(sum / n as f64))
}

pub fn peak_of(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    values.into_iter().map(f64::abs).fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.max(v))))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Violation {
    pub t: f64,
    pub joint: usize,
    pub error: f64,
    pub bound: f64,
}

/// First logged sample with `|e_i| >= b_i`.
pub fn violation_scan(rows: &[TraceRow]) -> Option<Violation> {
    rows.iter().find_map(|r| {
        (0..DOF).find(|&j| !(r.e[j].abs() < r.b[j])).map(|j| Violation {
            t: r.t,
            joint: j,
            error: r.e[j],
            bound: r.b[j],
        })
    })
}

/// Earliest violation from the logged samples or the run's termination.
pub fn first_violation(trace: &SimTrace) -> Option<Violation> {
    let scanned = violation_scan(&trace.rows);
    let stopped = match trace.termination {
        Termination::Breach { t, joint, error, bound } => Some(Violation { t, joint, error, bound }),
        Termination::Completed => None,
    };
    match (scanned, stopped) {
        (Some(a), Some(b)) => Some(if a.t <= b.t { a } else { b }),
        (a, b) => a.or(b),
    }
}

/// Per-joint statistics in degrees and degrees per second.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricsReport {
    pub controller: ControllerKind,
    pub rms_position_deg: [f64; DOF],
    pub rms_velocity_deg: [f64; DOF],
    pub peak_position_deg: [f64; DOF],
    pub peak_velocity_deg: [f64; DOF],
    /// Window actually used, clipped to the trace span.
    pub window: Window,
    pub first_violation: Option<Violation>,
}

impl MetricsReport {
    pub fn from_rows(controller: ControllerKind, rows: &[TraceRow], window: Window) -> Result<Self> {
        let end = rows.last().map_or(f64::NEG_INFINITY, |r| r.t);
        let window = Window::new(window.lo, window.hi.min(end));
        let stat =
            |f: fn(&[TraceRow], Column, Window) -> Result<f64>, col: fn(usize) -> Column| -> Result<[f64; DOF]> {
                let mut out = [0.0; DOF];
                for (j, o) in out.iter_mut().enumerate() {
                    *o = to_deg(f(rows, col(j), window)?);
                }
                Ok(out)
            };
        Ok(Self {
            controller,
            rms_position_deg: stat(rms, Column::PositionError)?,
            rms_velocity_deg: stat(rms, Column::VelocityError)?,
            peak_position_deg: stat(peak, Column::PositionError)?,
            peak_velocity_deg: stat(peak, Column::VelocityError)?,
            window,
            first_violation: violation_scan(rows),
        })
    }

    pub fn compute(trace: &SimTrace, window: Window) -> Result<Self> {
        let mut report = Self::from_rows(trace.controller, &trace.rows, window)?;
        report.first_violation = first_violation(trace);
        Ok(report)
    }
}

/// Percentage reduction of `value` relative to `baseline`.
pub fn improvement_percent(baseline: f64, value: f64) -> f64 {
    100.0 * (baseline - value) / baseline
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn rows(errors: &[f64], bound: f64) -> Vec<TraceRow> {
        errors
            .iter()
            .enumerate()
            .map(|(k, &e)| TraceRow {
                t: k as f64,
                q: [0.0; 2],
                qd: [0.0; 2],
                q_des: [0.0; 2],
                qd_des: [0.0; 2],
                e: [e, 0.0],
                edot: [0.0; 2],
                b: [bound; 2],
                s: [0.0; 2],
                chi: [1.0, 0.0, 0.0, 0.0, 0.0],
                k_hat: [0.0; 5],
                tau: [0.0; 2],
                payload_mass: 0.0,
            })
            .collect()
    }

    const ALL: Window = Window::new(f64::NEG_INFINITY, f64::INFINITY);

    #[test]
    fn rms_examples() {
        assert_eq!(rms(&rows(&[1.0; 7], 9.0), Column::PositionError(0), ALL), Ok(1.0));
        assert_eq!(rms(&rows(&[0.0; 7], 9.0), Column::PositionError(0), ALL), Ok(0.0));
        let r = rms(&rows(&[3.0, 4.0], 9.0), Column::PositionError(0), ALL).unwrap();
        assert!((r - 3.535_533_905_932_737_6).abs() < 1e-15);
    }

    #[test]
    fn peak_examples() {
        assert_eq!(peak(&rows(&[1.0; 4], 9.0), Column::PositionError(0), ALL), Ok(1.0));
        assert_eq!(peak(&rows(&[-5.0, 3.0], 9.0), Column::PositionError(0), ALL), Ok(5.0));
    }

    #[test]
    fn window_selects_rows() {
        let r = rows(&[10.0, 1.0, 1.0, 10.0], 99.0);
        assert_eq!(peak(&r, Column::PositionError(0), Window::new(1.0, 2.0)), Ok(1.0));
        assert!(matches!(rms(&r, Column::PositionError(0), Window::new(7.0, 8.0)), Err(Error::EmptyWindow { .. })));
    }

    #[test]
    fn violation_scan_examples() {
        assert_eq!(violation_scan(&rows(&[0.5, -0.5, 0.5], 1.0)), None);
        let v = violation_scan(&rows(&[0.5, 0.5, -1.2, 0.5], 1.0)).unwrap();
        assert_eq!((v.t, v.joint), (2.0, 0));
    }

    #[test]
    fn rms_never_exceeds_peak() {
        let r = rows(&[0.3, -2.0, 1.1, 0.0, 0.7], 9.0);
        let c = Column::PositionError(0);
        assert!(rms(&r, c, ALL).unwrap() <= peak(&r, c, ALL).unwrap());
    }

    #[test]
    fn report_clips_window_to_trace() {
        let r = rows(&[0.0, 0.01, 0.02], 1.0);
        let rep = MetricsReport::from_rows(ControllerKind::Ablf, &r, Window::new(1.0, 69.0)).unwrap();
        assert_eq!(rep.window, Window::new(1.0, 2.0));
        assert!((rep.peak_position_deg[0] - to_deg(0.02)).abs() < 1e-12);
    }

    #[test]
    fn improvement_is_relative_reduction() {
        assert!((improvement_percent(2.296, 0.182) - 92.07).abs() < 0.01);
    }
}
