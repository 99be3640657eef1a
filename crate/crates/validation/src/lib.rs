//! Paths shared by the acceptance suite.

use std::path::{Path, PathBuf};

/// A configuration shipped with the `hetnet` binary, by file stem.
pub fn figure_config_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../cli/configs")
        .join(format!("{name}.json"))
}
