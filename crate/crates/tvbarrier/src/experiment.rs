//! Runs the selected controllers and writes every output file.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use tvbarrier_core::controller::ControllerKind;
use tvbarrier_core::metrics::{MetricsReport, Window};
use tvbarrier_core::sim::{run, SimTrace};

use crate::config::RunConfig;
use crate::plotdata;
use crate::report::{render_csv, render_text, MetricsMeta, RunMeta, TableEntry};
use crate::trace::{read_trace, write_trace};

pub struct RunOutcome {
    pub trace: SimTrace,
    /// `None` when the trace ends before the metrics window begins.
    pub metrics: Option<MetricsReport>,
    pub meta: RunMeta,
}

impl RunOutcome {
    pub fn table_entry(&self) -> TableEntry {
        TableEntry { controller: self.trace.controller, metrics: self.metrics.as_ref().map(MetricsMeta::from) }
    }
}

fn metrics_for(trace: &SimTrace, window: Window) -> Result<Option<MetricsReport>> {
    match MetricsReport::compute(trace, window) {
        Ok(m) => Ok(Some(m)),
        Err(tvbarrier_core::Error::EmptyWindow { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// Simulates one controller. Baselines tolerate envelope breaches and return
/// the prefix; a breach by the proposed law is an error.
pub fn run_one(cfg: &RunConfig, kind: ControllerKind) -> Result<RunOutcome> {
    let scenario = cfg.scenario()?;
    let mut sim = cfg.sim_config();
    sim.tolerate_breach = kind != ControllerKind::Proposed;
    let trace = run(&scenario, &cfg.plant(), kind, &sim).with_context(|| format!("{kind} run failed"))?;
    let window = cfg.window_for(kind);
    let metrics = metrics_for(&trace, window)?;
    let meta = RunMeta::new(&trace, scenario.t_end, [window.lo, window.hi]);
    Ok(RunOutcome { trace, metrics, meta })
}

/// Runs every configured controller, one thread each, in config order.
pub fn run_all(cfg: &RunConfig) -> Result<Vec<RunOutcome>> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = cfg.run.controllers.iter().map(|&kind| scope.spawn(move || run_one(cfg, kind))).collect();
        handles.into_iter().map(|h| h.join().expect("simulation thread panicked")).collect()
    })
}

/// Output files are staged in memory and written only once every run has
/// succeeded; a failed write removes whatever was already written.
pub struct OutputSet {
    files: Vec<(String, Vec<u8>)>,
}

impl OutputSet {
    pub fn new() -> Self {
        Self { files: Vec::new() }
    }

    pub fn add(&mut self, name: impl Into<String>, contents: impl Into<Vec<u8>>) {
        self.files.push((name.into(), contents.into()));
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.iter().map(|(n, _)| n.as_str())
    }

    pub fn write_to(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let created_dir = !dir.exists();
        fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))?;
        if !dir.is_dir() {
            bail!("{} is not a directory", dir.display());
        }
        let mut written = Vec::new();
        for (name, contents) in &self.files {
            let path = dir.join(name);
            if let Err(e) = fs::write(&path, contents) {
                for p in &written {
                    let _ = fs::remove_file(p);
                }
                if created_dir {
                    let _ = fs::remove_dir(dir);
                }
                return Err(e).with_context(|| format!("cannot write {}", path.display()));
            }
            written.push(path);
        }
        Ok(written)
    }
}

impl Default for OutputSet {
    fn default() -> Self {
        Self::new()
    }
}

fn table_files(out: &mut OutputSet, entries: &[TableEntry]) -> Result<String> {
    let text = render_text(entries);
    out.add("comparison.txt", text.clone());
    out.add("comparison.csv", render_csv(entries)?);
    Ok(text)
}

/// Builds the full output set for a finished experiment. Returns the
/// comparison table text alongside.
pub fn outputs(outcomes: &[RunOutcome]) -> Result<(OutputSet, String)> {
    let mut out = OutputSet::new();
    for o in outcomes {
        let name = o.trace.controller.name();
        let mut csv = Vec::new();
        write_trace(&mut csv, &o.trace.rows)?;
        out.add(format!("trace_{name}.csv"), csv);
        out.add(format!("meta_{name}.json"), serde_json::to_string_pretty(&o.meta)? + "\n");
        let metrics = o.metrics.as_ref().map(MetricsMeta::from);
        out.add(format!("metrics_{name}.json"), serde_json::to_string_pretty(&metrics)? + "\n");
        for file in &plotdata::FILES {
            out.add(format!("{}_{name}.dat", file.stem), plotdata::render(file, &o.trace.rows));
        }
    }
    let entries: Vec<_> = outcomes.iter().map(RunOutcome::table_entry).collect();
    let text = table_files(&mut out, &entries)?;
    Ok((out, text))
}

/// Rebuilds the comparison table from the traces and metadata in `dir`.
pub fn regenerate_table(dir: &Path) -> Result<String> {
    let mut entries = Vec::new();
    for kind in ControllerKind::ALL {
        let name = kind.name();
        let trace_path = dir.join(format!("trace_{name}.csv"));
        if !trace_path.exists() {
            continue;
        }
        let meta_path = dir.join(format!("meta_{name}.json"));
        let meta: RunMeta = serde_json::from_slice(
            &fs::read(&meta_path).with_context(|| format!("cannot read {}", meta_path.display()))?,
        )
        .with_context(|| format!("malformed {}", meta_path.display()))?;
        let file = fs::File::open(&trace_path).with_context(|| format!("cannot read {}", trace_path.display()))?;
        let rows = read_trace(file).with_context(|| format!("malformed {}", trace_path.display()))?;

        let metrics = match MetricsReport::from_rows(kind, &rows, Window::new(meta.window[0], meta.window[1])) {
            Ok(mut m) => {
                // A breach that stopped the run happens after the last logged row.
                if m.first_violation.is_none() {
                    m.first_violation = meta.breach.map(Into::into);
                }
                Some(MetricsMeta::from(&m))
            }
            Err(tvbarrier_core::Error::EmptyWindow { .. }) => None,
            Err(e) => return Err(e.into()),
        };
        entries.push(TableEntry { controller: kind, metrics });
    }
    if entries.is_empty() {
        bail!("no trace_<controller>.csv files in {}", dir.display());
    }
    let mut out = OutputSet::new();
    let text = table_files(&mut out, &entries)?;
    out.write_to(dir)?;
    Ok(text)
}

/// Fails early when `dir` cannot become an output directory: it, or its
/// closest existing ancestor, must be a directory.
pub fn check_out_dir(dir: &Path) -> Result<()> {
    match dir.ancestors().find(|p| p.exists()) {
        Some(p) if !p.is_dir() => bail!("{} is not a directory", p.display()),
        _ => Ok(()),
    }
}
