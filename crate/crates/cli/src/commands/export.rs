use std::path::Path;

use stc_core::graph::export_dot;

use crate::artifact::SynthesisArtifact;
use crate::error::{CliError, CliResult};

pub fn run(artifact: &Path, out: &Path) -> CliResult<()> {
    let art = SynthesisArtifact::load(artifact)?;
    std::fs::write(out, export_dot(&art.graph)).map_err(|source| CliError::Io {
        path: out.to_path_buf(),
        source,
    })
}
