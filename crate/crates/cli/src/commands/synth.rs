use std::path::Path;

use crate::artifact::SynthesisArtifact;
use crate::config::ProblemConfig;
use crate::error::CliResult;

/// Synthesizes from `config` and writes the artifact to `out`.
pub fn run(config: &Path, out: &Path) -> CliResult<SynthesisArtifact> {
    let cfg = ProblemConfig::load(config)?;
    let art = SynthesisArtifact::synthesize(&cfg)?;
    art.save(out)?;
    Ok(art)
}
