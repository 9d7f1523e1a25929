//! One module per subcommand. Each `run` never panics on bad numerics: a
//! pipeline error becomes a failed check and an `error` entry.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use darboux_core::fields::{write_columns_csv, write_field_csv};
use darboux_core::{Grid2D, ScalarField};
use serde::Serialize;

use crate::report::{Check, Report};

pub mod appendix;
pub mod curvature;
pub mod identities;
pub mod metric;
pub mod reduce;
pub mod scan;

pub type DynResult<T> = std::result::Result<T, Box<dyn std::error::Error + Send + Sync>>;

/// Default seed of the randomized suites.
pub const DEFAULT_SEED: u64 = 20_240_917;

pub(crate) fn finish<C: Serialize>(command: &str, config: &C, checks: Vec<Check>, outcome: DynResult<()>) -> Report {
    let config = serde_json::to_value(config).expect("config serializes");
    match outcome {
        Ok(()) => Report::new(command, config, checks),
        Err(e) => Report::aborted(command, config, checks, e.to_string()),
    }
}

pub(crate) fn dump_field(out: Option<&Path>, name: &str, field: &ScalarField, grid: &Grid2D) -> DynResult<()> {
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        write_field_csv(BufWriter::new(File::create(dir.join(name))?), field, grid)?;
    }
    Ok(())
}

pub(crate) fn dump_columns(
    out: Option<&Path>,
    name: &str,
    grid: &Grid2D,
    names: &[&str],
    fields: &[&ScalarField],
) -> DynResult<()> {
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        write_columns_csv(BufWriter::new(File::create(dir.join(name))?), grid, names, fields)?;
    }
    Ok(())
}
