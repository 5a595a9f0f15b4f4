//! Trace CSV schema.
//!
//! Columns, in order: `t, q1, q2, qd1, qd2, q_d1, q_d2, e1, e2, edot1, edot2,
//! b1, b2, s1, s2, chi0..chi4, khat0..khat4, tau1, tau2, payload_mass`.
//! Angles and bounds in degrees, rates in degrees per second, torques in N·m,
//! time in seconds, payload in kg. `s`, `chi` and `khat` are written as
//! computed (radian-based internal units).

use std::io::{Read, Write};

use tvbarrier_core::sim::TraceRow;
use tvbarrier_core::{deg, to_deg};

pub const COLUMNS: usize = 28;

pub const HEADER: [&str; COLUMNS] = [
    "t",
    "q1",
    "q2",
    "qd1",
    "qd2",
    "q_d1",
    "q_d2",
    "e1",
    "e2",
    "edot1",
    "edot2",
    "b1",
    "b2",
    "s1",
    "s2",
    "chi0",
    "chi1",
    "chi2",
    "chi3",
    "chi4",
    "khat0",
    "khat1",
    "khat2",
    "khat3",
    "khat4",
    "tau1",
    "tau2",
    "payload_mass",
];

fn to_record(r: &TraceRow) -> [f64; COLUMNS] {
    let d = to_deg;
    [
        r.t,
        d(r.q[0]),
        d(r.q[1]),
        d(r.qd[0]),
        d(r.qd[1]),
        d(r.q_des[0]),
        d(r.q_des[1]),
        d(r.e[0]),
        d(r.e[1]),
        d(r.edot[0]),
        d(r.edot[1]),
        d(r.b[0]),
        d(r.b[1]),
        r.s[0],
        r.s[1],
        r.chi[0],
        r.chi[1],
        r.chi[2],
        r.chi[3],
        r.chi[4],
        r.k_hat[0],
        r.k_hat[1],
        r.k_hat[2],
        r.k_hat[3],
        r.k_hat[4],
        r.tau[0],
        r.tau[1],
        r.payload_mass,
    ]
}

fn from_record(v: &[f64; COLUMNS]) -> TraceRow {
    let r = |i: usize| deg(v[i]);
    TraceRow {
        t: v[0],
        q: [r(1), r(2)],
        qd: [r(3), r(4)],
        q_des: [r(5), r(6)],
        qd_des: [0.0, 0.0],
        e: [r(7), r(8)],
        edot: [r(9), r(10)],
        b: [r(11), r(12)],
        s: [v[13], v[14]],
        chi: [v[15], v[16], v[17], v[18], v[19]],
        k_hat: [v[20], v[21], v[22], v[23], v[24]],
        tau: [v[25], v[26]],
        payload_mass: v[27],
    }
}

pub fn write_trace<W: Write>(out: W, rows: &[TraceRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for row in rows {
        // `+ 0.0` folds -0 into 0.
        w.write_record(to_record(row).iter().map(|v| (v + 0.0).to_string()))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, thiserror::Error)]
pub enum ReadError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("unexpected header; expected {expected}")]
    Header { expected: String },
    #[error("row {row}: {reason}")]
    Row { row: usize, reason: String },
}

/// Reads a trace written by [`write_trace`]. The desired velocity is not
/// stored and comes back as zero.
pub fn read_trace<R: Read>(input: R) -> Result<Vec<TraceRow>, ReadError> {
    let mut r = csv::Reader::from_reader(input);
    if r.headers()?.iter().ne(HEADER) {
        return Err(ReadError::Header { expected: HEADER.join(",") });
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        if rec.len() != COLUMNS {
            return Err(ReadError::Row { row: i + 1, reason: format!("{} fields, expected {COLUMNS}", rec.len()) });
        }
        let mut v = [0.0; COLUMNS];
        for (slot, field) in v.iter_mut().zip(rec.iter()) {
            *slot = field.parse().map_err(|e| ReadError::Row { row: i + 1, reason: format!("{field:?}: {e}") })?;
        }
        rows.push(from_record(&v));
    }
    Ok(rows)
}
