pub mod batch;
pub mod export;
pub mod simulate;
pub mod synth;
pub mod verify;

use std::fs::File;
use std::path::Path;

use crate::error::{CliError, CliResult};

pub(crate) fn csv_writer(path: &Path) -> CliResult<csv::Writer<File>> {
    let file = File::create(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(csv::Writer::from_writer(file))
}

pub(crate) fn opt_to_string<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}
