//! Build and test configuration files. Command-line flags override fields.

use std::path::Path;

use folia::geometry::{Domain, DomainKind, Point};
use folia::{BuildParams, Thresholds};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    F64,
    Dd,
}

/// Domain as written in a config: the center defaults to the origin and the
/// radii to 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub kind: DomainKind,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
}

impl Default for DomainSpec {
    fn default() -> Self {
        DomainSpec {
            kind: DomainKind::Polydisc,
            n: 1,
            center: None,
            radii: None,
        }
    }
}

impl DomainSpec {
    pub fn to_domain(&self) -> folia::Result<Domain<f64>> {
        let center = self.center.clone().unwrap_or_else(|| vec![0.0; 2 * self.n]);
        let count = match self.kind {
            DomainKind::Box => 2 * self.n,
            DomainKind::Polydisc => self.n,
            DomainKind::Ball => 1,
        };
        let radii = self.radii.clone().unwrap_or_else(|| vec![1.0; count]);
        let d = Domain {
            kind: self.kind,
            n: self.n,
            center: Point(center),
            radii,
        };
        d.validate()?;
        Ok(d)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BuildConfig {
    pub domain: DomainSpec,
    pub stages: usize,
    pub seed: u64,
    pub precision: Precision,
    pub resolution_target: f64,
    pub flow_steps: usize,
    /// Bend constant; the kernel's certified choice when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_bend: Option<f64>,
}

impl Default for BuildConfig {
    fn default() -> Self {
        let p = BuildParams::new(10);
        BuildConfig {
            domain: DomainSpec::default(),
            stages: p.max_stages,
            seed: 0,
            precision: Precision::Dd,
            resolution_target: p.resolution_target,
            flow_steps: p.flow_steps,
            k_bend: None,
        }
    }
}

impl BuildConfig {
    pub fn params(&self) -> BuildParams {
        let mut p = BuildParams::new(self.stages);
        p.resolution_target = self.resolution_target;
        p.flow_steps = self.flow_steps;
        if let Some(k) = self.k_bend {
            p.k_bend = k;
        }
        p
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TestConfig {
    pub function: Option<String>,
    pub oracle: bool,
    pub thresholds: Option<Thresholds>,
}

pub fn load<C: for<'de> Deserialize<'de>>(path: &Path) -> Result<C, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_config_round_trips() {
        let c = BuildConfig {
            domain: DomainSpec {
                kind: DomainKind::Ball,
                n: 2,
                center: Some(vec![0.1, 0.0, 0.0, 0.0]),
                radii: Some(vec![2.0]),
            },
            stages: 20,
            seed: 9,
            precision: Precision::F64,
            resolution_target: 0.1,
            flow_steps: 128,
            k_bend: Some(0.2),
        };
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<BuildConfig>(&text).unwrap(), c);
    }

    #[test]
    fn partial_config_takes_defaults() {
        let c: BuildConfig = serde_json::from_str(r#"{"domain": {"kind": "polydisc", "n": 2}, "seed": 7}"#).unwrap();
        assert_eq!(c.stages, 10);
        assert_eq!(c.precision, Precision::Dd);
        let d = c.domain.to_domain().unwrap();
        assert_eq!(d.radii, vec![1.0, 1.0]);
        assert!(serde_json::from_str::<BuildConfig>(r#"{"stage": 3}"#).is_err());
    }
}
