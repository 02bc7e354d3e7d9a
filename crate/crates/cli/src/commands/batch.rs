use std::path::{Path, PathBuf};

use rayon::prelude::*;
use stc_core::controller::default_step_budget;
use stc_core::Vector;

use super::csv_writer;
use crate::artifact::SynthesisArtifact;
use crate::error::{CliError, CliResult};
use crate::sampling::{sample_shell, trial_rng};

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub trial: usize,
    pub x0: Vector,
    pub events: usize,
    pub mean_inter_event: f64,
    pub convergence_steps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchSummary {
    pub trials: Vec<TrialResult>,
    /// Average over trials of each trial's mean inter-event steps.
    pub mean_inter_event: f64,
    pub mean_convergence: f64,
    pub summary_path: PathBuf,
}

pub struct BatchOptions {
    pub trials: usize,
    pub seed: u64,
    /// Edge weights; the artifact's own when `None`.
    pub pq: Option<(f64, f64)>,
}

/// `out` with `_summary` spliced before the extension.
pub fn summary_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    out.with_file_name(format!("{stem}_summary.csv"))
}

/// Runs `trials` closed loops from uniform draws in `P_max \ P0`.
/// Trial `i` uses stream `i` of the seeded generator, so results do not
/// depend on scheduling.
pub fn run(artifact: &Path, opts: &BatchOptions, out: &Path) -> CliResult<BatchSummary> {
    if opts.trials == 0 {
        return Err(CliError::Usage("trials must be >= 1".into()));
    }
    let art = SynthesisArtifact::load(artifact)?;
    let summary = run_loaded(&art, opts)?;
    let summary = BatchSummary {
        summary_path: summary_path(out),
        ..summary
    };
    write(out, &summary)?;
    Ok(summary)
}

pub fn run_loaded(art: &SynthesisArtifact, opts: &BatchOptions) -> CliResult<BatchSummary> {
    let sys = art.system()?;
    let graph = match opts.pq {
        Some((p, q)) => art.with_weights(p, q)?,
        None => art.graph.clone(),
    };
    let cl = art.closed_loop(&sys, &graph)?;
    let tol = art.config.tolerances;
    let p0 = &art.target.polytope;
    let a_max = art.family.a_max;
    let (lo, hi) = p0
        .scale(a_max)?
        .bounding_box(&tol)
        .map_err(CliError::core("domain bounding box"))?;
    let budget = default_step_budget(&art.family);

    let trials = (0..opts.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(opts.seed, trial as u64);
            let x0 = sample_shell(&mut rng, p0, 1.0 + tol.mem_tol, a_max, (&lo, &hi))?;
            let trace = cl.run_to_target(&x0, budget).map_err(CliError::core("batch trial"))?;
            let events = trace.self_triggered_events().count();
            Ok(TrialResult {
                trial,
                x0,
                events,
                mean_inter_event: trace.mean_inter_event().unwrap_or(0.0),
                convergence_steps: trace.termination_step,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let n = trials.len() as f64;
    let mean_inter_event = trials.iter().map(|t| t.mean_inter_event).sum::<f64>() / n;
    let mean_convergence = trials.iter().map(|t| t.convergence_steps as f64).sum::<f64>() / n;
    Ok(BatchSummary {
        trials,
        mean_inter_event,
        mean_convergence,
        summary_path: PathBuf::new(),
    })
}

fn write(out: &Path, summary: &BatchSummary) -> CliResult<()> {
    let n = summary.trials.first().map_or(0, |t| t.x0.len());
    let mut w = csv_writer(out)?;
    let mut header = vec!["trial".to_string()];
    header.extend((1..=n).map(|i| format!("x0_{i}")));
    header.extend(["events", "meanInterEvent", "convergenceSteps"].map(String::from));
    w.write_record(&header)?;
    for t in &summary.trials {
        let mut row = vec![t.trial.to_string()];
        row.extend(t.x0.iter().map(f64::to_string));
        row.push(t.events.to_string());
        row.push(t.mean_inter_event.to_string());
        row.push(t.convergence_steps.to_string());
        w.write_record(&row)?;
    }
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| CliError::Io { path, source }
    };
    w.flush().map_err(io(out))?;

    let mut w = csv_writer(&summary.summary_path)?;
    w.write_record(["trials", "meanInterEvent", "meanConvergenceSteps"])?;
    w.write_record([
        summary.trials.len().to_string(),
        summary.mean_inter_event.to_string(),
        summary.mean_convergence.to_string(),
    ])?;
    w.flush().map_err(io(&summary.summary_path))
}
