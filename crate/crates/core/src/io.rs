//! Manifest and leaf files.
//!
//! Writes go to a temporary file in the target directory and are renamed
//! into place, so readers never see a partial file.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::builder::{FoliationManifest, LeafCurve, MANIFEST_VERSION};
use crate::error::{Error, Result};
use crate::scalar::{Dd, Real};

/// Atomically replace `path` with `bytes`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Pretty JSON with a trailing newline.
pub fn to_json<S: Serialize>(value: &S) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<S: Serialize>(path: &Path, value: &S) -> Result<()> {
    write_atomic(path, to_json(value)?.as_bytes())
}

/// A manifest in whichever precision it was built.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyManifest {
    F64(FoliationManifest<f64>),
    Dd(FoliationManifest<Dd>),
}

impl AnyManifest {
    pub fn scalar(&self) -> &'static str {
        match self {
            AnyManifest::F64(_) => f64::NAME,
            AnyManifest::Dd(_) => Dd::NAME,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            AnyManifest::F64(m) => m.len(),
            AnyManifest::Dd(m) => m.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn n(&self) -> usize {
        match self {
            AnyManifest::F64(m) => m.n,
            AnyManifest::Dd(m) => m.n,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        match self {
            AnyManifest::F64(m) => to_json(m),
            AnyManifest::Dd(m) => to_json(m),
        }
    }
}

impl From<FoliationManifest<f64>> for AnyManifest {
    fn from(m: FoliationManifest<f64>) -> Self {
        AnyManifest::F64(m)
    }
}

impl From<FoliationManifest<Dd>> for AnyManifest {
    fn from(m: FoliationManifest<Dd>) -> Self {
        AnyManifest::Dd(m)
    }
}

/// Parse a manifest, dispatching on its `scalar` field. Only the format is
/// checked here; see [`FoliationManifest::validate`] for the invariants.
pub fn parse_manifest(text: &str) -> Result<AnyManifest> {
    let v: serde_json::Value = serde_json::from_str(text)?;
    let version = v.get("version").and_then(|x| x.as_str()).unwrap_or("");
    if version != MANIFEST_VERSION {
        return Err(Error::Manifest(format!(
            "unsupported version `{version}`, expected `{MANIFEST_VERSION}`"
        )));
    }
    match v.get("scalar").and_then(|x| x.as_str()) {
        Some(s) if s == f64::NAME => Ok(AnyManifest::F64(serde_json::from_value(v)?)),
        Some(s) if s == Dd::NAME => Ok(AnyManifest::Dd(serde_json::from_value(v)?)),
        other => Err(Error::Manifest(format!("unsupported scalar {other:?}"))),
    }
}

pub fn read_manifest(path: &Path) -> Result<AnyManifest> {
    parse_manifest(&std::fs::read_to_string(path)?)
}

pub fn write_manifest<T: Real>(path: &Path, m: &FoliationManifest<T>) -> Result<()> {
    write_json(path, m)
}

/// CSV with columns `t, x_1, ..., x_{2n}`, full precision.
pub fn leaf_csv<T: Real>(leaf: &LeafCurve<T>) -> Result<Vec<u8>> {
    let dim = leaf.base.anchor.len();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["t".to_string()];
    header.extend((1..=dim).map(|i| format!("x_{i}")));
    w.write_record(&header)?;
    for (t, x) in leaf.params.iter().zip(&leaf.samples) {
        let mut row = vec![t.to_sci()];
        row.extend(x.iter().map(|c| c.to_sci()));
        w.write_record(&row)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

pub fn write_leaf_csv<T: Real>(path: &Path, leaf: &LeafCurve<T>) -> Result<()> {
    write_atomic(path, &leaf_csv(leaf)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::{build, BuildParams};
    use crate::geometry::{Domain, Point};

    #[test]
    fn manifest_round_trips_bit_exactly() {
        let m = build(Domain::<Dd>::polydisc(2, 1.0), 5, BuildParams::new(4)).unwrap();
        let text = to_json(&m).unwrap();
        match parse_manifest(&text).unwrap() {
            AnyManifest::Dd(back) => {
                assert_eq!(back, m);
                assert_eq!(to_json(&back).unwrap(), text);
            }
            other => panic!("wrong scalar {}", other.scalar()),
        }
        let m = build(Domain::<f64>::polydisc(1, 1.0), 5, BuildParams::new(3)).unwrap();
        let text = to_json(&m).unwrap();
        assert_eq!(parse_manifest(&text).unwrap(), AnyManifest::F64(m));
    }

    #[test]
    fn foreign_versions_and_scalars_are_rejected() {
        let m = build(Domain::<f64>::polydisc(1, 1.0), 5, BuildParams::new(1)).unwrap();
        let text = to_json(&m).unwrap();
        let bad = text.replace(MANIFEST_VERSION, "folia-manifest/0");
        assert!(matches!(parse_manifest(&bad), Err(Error::Manifest(_))));
        let bad = text.replace("\"scalar\": \"f64\"", "\"scalar\": \"f16\"");
        assert!(matches!(parse_manifest(&bad), Err(Error::Manifest(_))));
    }

    #[test]
    fn atomic_write_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.json");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn leaf_csv_layout() {
        let m = build(Domain::<f64>::polydisc(1, 1.0), 5, BuildParams::new(2)).unwrap();
        let leaf = m.leaf_through(&Point(vec![0.0, 0.9]), 10).unwrap();
        let text = String::from_utf8(leaf_csv(&leaf).unwrap()).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,x_1,x_2"));
        let rows: Vec<Vec<f64>> = lines
            .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
            .collect();
        assert_eq!(rows.len(), leaf.len());
        assert_eq!(rows[0][0], leaf.params[0]);
        assert_eq!(rows[0][1], leaf.samples[0][0]);
    }
}
