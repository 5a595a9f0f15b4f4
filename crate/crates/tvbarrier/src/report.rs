//! Per-run metadata, metrics files and the controller comparison table.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use tvbarrier_core::controller::ControllerKind;
use tvbarrier_core::metrics::{improvement_percent, MetricsReport, Violation};
use tvbarrier_core::sim::{SimTrace, Termination};
use tvbarrier_core::to_deg;

/// Envelope breach or violation, joints numbered from 1, angles in degrees.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViolationMeta {
    pub t: f64,
    pub joint: usize,
    pub error_deg: f64,
    pub bound_deg: f64,
}

impl From<Violation> for ViolationMeta {
    fn from(v: Violation) -> Self {
        Self { t: v.t, joint: v.joint + 1, error_deg: to_deg(v.error), bound_deg: to_deg(v.bound) }
    }
}

impl From<ViolationMeta> for Violation {
    fn from(v: ViolationMeta) -> Self {
        Self {
            t: v.t,
            joint: v.joint.saturating_sub(1),
            error: tvbarrier_core::deg(v.error_deg),
            bound: tvbarrier_core::deg(v.bound_deg),
        }
    }
}

/// Contents of `meta_<controller>.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub controller: String,
    pub dt: f64,
    pub substeps: usize,
    pub decimation: usize,
    pub t_end: f64,
    /// `false` when the reference contains step changes, which break the
    /// smoothness assumption of the barrier design.
    pub smooth_reference: bool,
    pub completed: bool,
    /// Set when the run stopped at an envelope breach.
    pub breach: Option<ViolationMeta>,
    /// Metrics window requested in the config, seconds.
    pub window: [f64; 2],
    pub rows: usize,
}

impl RunMeta {
    pub fn new(trace: &SimTrace, t_end: f64, window: [f64; 2]) -> Self {
        let breach = match trace.termination {
            Termination::Completed => None,
            Termination::Breach { t, joint, error, bound } => Some(Violation { t, joint, error, bound }.into()),
        };
        Self {
            controller: trace.controller.name().to_string(),
            dt: trace.dt,
            substeps: trace.substeps,
            decimation: trace.decimation,
            t_end,
            smooth_reference: trace.smooth_reference,
            completed: breach.is_none(),
            breach,
            window,
            rows: trace.rows.len(),
        }
    }
}

/// Contents of `metrics_<controller>.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsMeta {
    pub controller: String,
    pub rms_position_deg: [f64; 2],
    pub rms_velocity_deg_s: [f64; 2],
    pub peak_position_deg: [f64; 2],
    pub peak_velocity_deg_s: [f64; 2],
    /// Window actually used, clipped to the trace.
    pub window: [f64; 2],
    pub first_violation: Option<ViolationMeta>,
}

impl From<&MetricsReport> for MetricsMeta {
    fn from(m: &MetricsReport) -> Self {
        Self {
            controller: m.controller.name().to_string(),
            rms_position_deg: m.rms_position_deg,
            rms_velocity_deg_s: m.rms_velocity_deg,
            peak_position_deg: m.peak_position_deg,
            peak_velocity_deg_s: m.peak_velocity_deg,
            window: [m.window.lo, m.window.hi],
            first_violation: m.first_violation.map(Into::into),
        }
    }
}

/// One controller's entry in the comparison table; `metrics` is `None` when
/// the run ended before the metrics window started.
#[derive(Clone, Debug, PartialEq)]
pub struct TableEntry {
    pub controller: ControllerKind,
    pub metrics: Option<MetricsMeta>,
}

/// Row order of the table: baselines first, then the proposed law.
const ORDER: [ControllerKind; 3] = [ControllerKind::Ablf, ControllerKind::Asmc, ControllerKind::Proposed];

fn label(kind: ControllerKind) -> &'static str {
    match kind {
        ControllerKind::Ablf => "ABLF",
        ControllerKind::Asmc => "ASMC",
        ControllerKind::Proposed => "proposed",
    }
}

fn sorted(entries: &[TableEntry]) -> Vec<&TableEntry> {
    ORDER.iter().filter_map(|k| entries.iter().find(|e| e.controller == *k)).collect()
}

fn rms_row(m: &MetricsMeta) -> [f64; 4] {
    [m.rms_position_deg[0], m.rms_position_deg[1], m.rms_velocity_deg_s[0], m.rms_velocity_deg_s[1]]
}

fn peak_row(m: &MetricsMeta) -> [f64; 4] {
    [m.peak_position_deg[0], m.peak_position_deg[1], m.peak_velocity_deg_s[0], m.peak_velocity_deg_s[1]]
}

/// Improvement of the proposed law's RMS values over each baseline present.
pub fn improvements(entries: &[TableEntry]) -> Vec<(ControllerKind, [f64; 4])> {
    let find = |k| entries.iter().find(|e| e.controller == k).and_then(|e| e.metrics.as_ref());
    let Some(proposed) = find(ControllerKind::Proposed) else { return Vec::new() };
    let p = rms_row(proposed);
    [ControllerKind::Ablf, ControllerKind::Asmc]
        .into_iter()
        .filter_map(|k| {
            let b = rms_row(find(k)?);
            Some((k, std::array::from_fn(|i| improvement_percent(b[i], p[i]))))
        })
        .collect()
}

fn cells(values: Option<[f64; 4]>) -> String {
    match values {
        Some(v) => v.iter().map(|x| format!("{x:>10.3}")).collect(),
        None => format!("{:>10}", "n/a").repeat(4),
    }
}

/// Plain-text table laid out like the usual RMS/peak comparison.
pub fn render_text(entries: &[TableEntry]) -> String {
    let rows = sorted(entries);
    let mut out = String::new();
    let cols = format!("{:<16}{:>10}{:>10}{:>10}{:>10}\n", "", "theta1", "theta2", "dtheta1", "dtheta2");

    out.push_str("                RMS error (deg)     RMS vel. error (deg/s)\n");
    out.push_str(&cols);
    for e in &rows {
        let _ = writeln!(out, "{:<16}{}", label(e.controller), cells(e.metrics.as_ref().map(rms_row)));
    }
    for (k, v) in improvements(entries) {
        let _ = writeln!(out, "{:<16}{}", format!("% impr. vs {}", label(k)), cells(Some(v)));
    }

    out.push_str("\n                Peak error (deg)    Peak vel. error (deg/s)\n");
    out.push_str(&cols);
    for e in &rows {
        let _ = writeln!(out, "{:<16}{}", label(e.controller), cells(e.metrics.as_ref().map(peak_row)));
    }

    out.push('\n');
    for e in &rows {
        match &e.metrics {
            Some(m) => {
                let _ = write!(out, "{}: window [{}, {}] s", label(e.controller), m.window[0], m.window[1]);
                match m.first_violation {
                    Some(v) => {
                        let _ = writeln!(
                            out,
                            "; first envelope violation at t = {:.3} s, joint {} (|e| = {:.3} deg >= b = {:.3} deg)",
                            v.t,
                            v.joint,
                            v.error_deg.abs(),
                            v.bound_deg
                        );
                    }
                    None => out.push_str("; no envelope violation\n"),
                }
            }
            None => {
                let _ = writeln!(out, "{}: run ended before the metrics window", label(e.controller));
            }
        }
    }
    out
}

/// Machine-readable rows: one per controller and one per improvement.
pub fn render_csv(entries: &[TableEntry]) -> csv::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "row",
        "rms_q1_deg",
        "rms_q2_deg",
        "rms_qd1_deg_s",
        "rms_qd2_deg_s",
        "peak_q1_deg",
        "peak_q2_deg",
        "peak_qd1_deg_s",
        "peak_qd2_deg_s",
        "window_lo_s",
        "window_hi_s",
        "first_violation_t_s",
    ])?;
    let num = |x: f64| x.to_string();
    for e in sorted(entries) {
        let mut rec = vec![e.controller.name().to_string()];
        match &e.metrics {
            Some(m) => {
                rec.extend(rms_row(m).into_iter().chain(peak_row(m)).chain(m.window).map(num));
                rec.push(m.first_violation.map(|v| num(v.t)).unwrap_or_default());
            }
            None => rec.extend(std::iter::repeat_n(String::new(), 11)),
        }
        w.write_record(&rec)?;
    }
    for (k, v) in improvements(entries) {
        let mut rec = vec![format!("improvement_vs_{}", k.name())];
        rec.extend(v.into_iter().map(num));
        rec.extend(std::iter::repeat_n(String::new(), 7));
        w.write_record(&rec)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
