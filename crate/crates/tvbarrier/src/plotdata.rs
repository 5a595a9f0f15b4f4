//! Whitespace-separated columns for external plotting tools.
//!
//! One file per figure and controller: `angles_*`, `errors_*` (with the
//! envelope), `velocity_errors_*` and `torques_*`, all with a `#` header.

use std::fmt::Write as _;

use tvbarrier_core::sim::TraceRow;
use tvbarrier_core::to_deg;

pub struct PlotFile {
    pub stem: &'static str,
    pub header: &'static str,
    pub columns: fn(&TraceRow) -> Vec<f64>,
}

pub const FILES: [PlotFile; 4] = [
    PlotFile {
        stem: "angles",
        header: "t_s q1_deg q2_deg q_d1_deg q_d2_deg",
        columns: |r| vec![r.t, to_deg(r.q[0]), to_deg(r.q[1]), to_deg(r.q_des[0]), to_deg(r.q_des[1])],
    },
    PlotFile {
        stem: "errors",
        header: "t_s e1_deg e2_deg b1_deg b2_deg",
        columns: |r| vec![r.t, to_deg(r.e[0]), to_deg(r.e[1]), to_deg(r.b[0]), to_deg(r.b[1])],
    },
    PlotFile {
        stem: "velocity_errors",
        header: "t_s edot1_deg_s edot2_deg_s",
        columns: |r| vec![r.t, to_deg(r.edot[0]), to_deg(r.edot[1])],
    },
    PlotFile { stem: "torques", header: "t_s tau1_Nm tau2_Nm", columns: |r| vec![r.t, r.tau[0], r.tau[1]] },
];

pub fn render(file: &PlotFile, rows: &[TraceRow]) -> String {
    let mut out = format!("# {}\n", file.header);
    for row in rows {
        let cols = (file.columns)(row);
        let line: Vec<String> = cols.iter().map(|v| format!("{:.6e}", v + 0.0)).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    out
}
