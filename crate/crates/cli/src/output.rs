use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::manifest::RunManifest;

#[derive(Serialize)]
struct WithManifest<'a, T: Serialize> {
    #[serde(flatten)]
    payload: &'a T,
    manifest: &'a RunManifest,
}

pub fn render<T: Serialize>(payload: &T, manifest: &RunManifest) -> serde_json::Result<String> {
    let mut text = serde_json::to_string_pretty(&WithManifest { payload, manifest })?;
    text.push('\n');
    Ok(text)
}

/// Writes through a temporary file in the destination directory and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifest::ManifestBuilder;
    use serde_json::value::RawValue;

    #[derive(Serialize)]
    struct Sample {
        kind: &'static str,
        deviation: Box<RawValue>,
    }

    #[test]
    fn manifest_is_appended_and_raw_numbers_survive() {
        let manifest = ManifestBuilder::start(vec![]).finish();
        let payload = Sample {
            kind: "sample",
            deviation: sicprob::io::scientific(0.1),
        };
        let text = render(&payload, &manifest).unwrap();
        assert!(text.contains("1.0000000000000001e-1"));
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["kind"], "sample");
        assert!(value["manifest"]["tool_version"].is_string());
    }

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.json");
        write_atomic(&path, "first").unwrap();
        write_atomic(&path, "second").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "second");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
