use std::path::{Path, PathBuf};

use stc_core::controller::SimulationTrace;
use stc_core::Vector;

use super::{csv_writer, opt_to_string};
use crate::artifact::SynthesisArtifact;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone)]
pub struct SimulateReport {
    pub trajectory_path: PathBuf,
    pub events_path: PathBuf,
    pub trace: SimulationTrace,
}

impl SimulateReport {
    pub fn mean_inter_event(&self) -> Option<f64> {
        self.trace.mean_inter_event()
    }

    pub fn steps_to_target(&self) -> usize {
        self.trace.termination_step
    }
}

/// Parses a comma-separated state such as `0,-4`.
pub fn parse_state(text: &str) -> CliResult<Vector> {
    let values = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Usage(format!("bad state vector {text:?}: {e}")))?;
    Ok(Vector::from_vec(values))
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}

pub fn run(artifact: &Path, x0: &Vector, max_steps: usize, out_prefix: &Path) -> CliResult<SimulateReport> {
    let art = SynthesisArtifact::load(artifact)?;
    let sys = art.system()?;
    let cl = art.closed_loop(&sys, &art.graph)?;
    let trace = cl.run(x0, max_steps).map_err(CliError::core("simulation"))?;

    let trajectory_path = with_suffix(out_prefix, "_trajectory.csv");
    let events_path = with_suffix(out_prefix, "_events.csv");
    write_trajectory(&trajectory_path, &trace)?;
    write_events(&events_path, &trace)?;
    Ok(SimulateReport {
        trajectory_path,
        events_path,
        trace,
    })
}

fn write_trajectory(path: &Path, trace: &SimulationTrace) -> CliResult<()> {
    let n = trace.states[0].len();
    let m = trace.inputs.first().map_or(0, |u| u.len());
    let mut w = csv_writer(path)?;
    let mut header = vec!["k".to_string()];
    header.extend((1..=n).map(|i| format!("x{i}")));
    header.extend((1..=m).map(|i| format!("u{i}")));
    header.extend(["eventFlag", "phase", "locatedA"].map(String::from));
    w.write_record(&header)?;

    let mut events = trace.events.iter().peekable();
    let mut phase = "";
    for (k, x) in trace.states.iter().enumerate() {
        let event = events.next_if(|e| e.k == k);
        if let Some(e) = event {
            phase = e.phase.as_str();
        }
        let mut row = vec![k.to_string()];
        row.extend(x.iter().map(f64::to_string));
        match trace.inputs.get(k) {
            Some(u) => row.extend(u.iter().map(f64::to_string)),
            None => row.extend(std::iter::repeat_n(String::new(), m)),
        }
        row.push(u8::from(event.is_some()).to_string());
        row.push(phase.to_string());
        row.push(opt_to_string(event.and_then(|e| e.located_scale)));
        w.write_record(&row)?;
    }
    w.flush().map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_events(path: &Path, trace: &SimulationTrace) -> CliResult<()> {
    let mut w = csv_writer(path)?;
    w.write_record([
        "m", "k", "phase", "steps", "fromNode", "toNode", "locatedA", "gauge", "epsilon",
    ])?;
    for (m, e) in trace.events.iter().enumerate() {
        w.write_record([
            m.to_string(),
            e.k.to_string(),
            e.phase.as_str().to_string(),
            e.steps.to_string(),
            opt_to_string(e.node),
            opt_to_string(e.next_node),
            opt_to_string(e.located_scale),
            e.gauge.to_string(),
            e.epsilon.to_string(),
        ])?;
    }
    w.flush().map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}
