use std::fs;
use std::path::Path;

use anyhow::{Context, Result};

use crate::pipeline::Outputs;

/// Write `outputs` into `out_dir`. Files are written to a staging directory
/// inside `out_dir` first and renamed into place once all writes succeed.
/// An existing `components/` directory is replaced as a whole.
pub fn write_outputs(out_dir: &Path, outputs: &Outputs) -> Result<()> {
    fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create output directory {}", out_dir.display()))?;
    let staging = tempfile::Builder::new()
        .prefix(".emwave-staging-")
        .tempdir_in(out_dir)
        .with_context(|| format!("output directory {} is not writable", out_dir.display()))?;

    if let Some(components) = &outputs.components {
        let dir = staging.path().join("components");
        fs::create_dir(&dir)?;
        for (name, text) in components {
            fs::write(dir.join(name), text).with_context(|| format!("cannot write components/{name}"))?;
        }
    }
    for (name, text) in &outputs.files {
        fs::write(staging.path().join(name), text).with_context(|| format!("cannot write {name}"))?;
    }

    if outputs.components.is_some() {
        let target = out_dir.join("components");
        if target.is_dir() {
            fs::remove_dir_all(&target)
                .with_context(|| format!("cannot replace {}", target.display()))?;
        }
        fs::rename(staging.path().join("components"), &target)?;
    }
    for (name, _) in &outputs.files {
        fs::rename(staging.path().join(name), out_dir.join(name))
            .with_context(|| format!("cannot move {name} into place"))?;
    }
    Ok(())
}
