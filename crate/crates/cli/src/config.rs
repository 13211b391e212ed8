//! Run configuration embedded in every output file, and the writers that embed it.

use std::fs;
use std::path::{Path, PathBuf};

use eddycorner_core::extraction::MomentVariant;
use eddycorner_core::shadow_engine::ChainKind;
use eddycorner_core::singular_functions::{DomainConfig, PhysicalInputs};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusGrid {
    pub r_max: f64,
    pub r_min: f64,
    pub count: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiskGrid {
    pub r_domain: f64,
    pub n_r: usize,
    pub n_theta: usize,
    /// Innermost ring over `r_domain`.
    pub r_min_rel: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldSource {
    Manufactured,
    Solver,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    QuasiDual,
    Moments,
}

/// Everything a command needs; fields that do not apply stay empty.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub command: String,
    pub omega: f64,
    /// 1/m.
    pub zeta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub physical: Option<PhysicalInputs>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub k: Vec<i32>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub p: Vec<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<ChainKind>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub m: Vec<usize>,
    /// Chain depth J.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    /// Order of a manufactured field, or composite orders of a reconstruction.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radii: Option<RadiusGrid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_theta: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub disk: Option<DiskGrid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_small: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<FieldSource>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<Method>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<MomentVariant>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub lambdas: Vec<(i32, u8, Complex64)>,
    pub verify: bool,
    pub out_dir: PathBuf,
    pub seed: u64,
}

impl RunConfig {
    pub fn new(command: &str, omega: f64, zeta: f64, out_dir: PathBuf, seed: u64) -> Self {
        RunConfig {
            command: command.into(),
            omega,
            zeta,
            out_dir,
            seed,
            ..Default::default()
        }
    }

    pub fn domain(&self) -> eddycorner_core::Result<DomainConfig> {
        match self.physical {
            Some(phys) => DomainConfig::from_physical(self.omega, phys),
            None => DomainConfig::new(self.omega, self.zeta),
        }
    }

    /// Checks the combinations no single flag parser can see.
    pub fn validate(&self) -> Result<(), String> {
        self.domain().map_err(|e| e.to_string())?;
        if let Some(&k) = self.k.iter().find(|&&k| k < 0) {
            return Err(format!("k must be >= 0, got {k}"));
        }
        if let Some(&p) = self.p.iter().find(|&&p| p > 1) {
            return Err(format!("p must be 0 or 1, got {p}"));
        }
        if self.p.contains(&1) && self.k.contains(&0) {
            return Err("there is no p = 1 function for k = 0".into());
        }
        if let Some(g) = self.radii {
            if !(g.r_min > 0.0 && g.r_max > g.r_min && g.count >= 2) {
                return Err(format!(
                    "bad radius range {} .. {} with {} points",
                    g.r_max, g.r_min, g.count
                ));
            }
            if let Some(d) = self.disk {
                if g.r_max >= d.r_domain || g.r_min <= d.r_min_rel * d.r_domain {
                    return Err("radii must lie strictly inside the solver grid".into());
                }
            }
        }
        if let Some(d) = self.disk {
            if !(d.r_domain > 0.0 && d.r_min_rel > 0.0 && d.r_min_rel < 1.0) {
                return Err("disk radius must be positive and r_min_rel in (0, 1)".into());
            }
        }
        Ok(())
    }

    fn header(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        format!("# eddycorner {VERSION}\n# config: {json}\n")
    }

    fn path(&self, name: &str) -> std::io::Result<PathBuf> {
        fs::create_dir_all(&self.out_dir)?;
        Ok(self.out_dir.join(name))
    }

    /// CSV body behind `#` header lines carrying the version and this configuration.
    pub fn write_csv(&self, name: &str, body: &str) -> std::io::Result<PathBuf> {
        let path = self.path(name)?;
        fs::write(&path, format!("{}{body}", self.header()))?;
        Ok(path)
    }

    pub fn write_text(&self, name: &str, body: &str) -> std::io::Result<PathBuf> {
        self.write_csv(name, body)
    }

    /// `{"version", "config", "result"}`.
    pub fn write_json(&self, name: &str, result: &impl Serialize) -> std::io::Result<PathBuf> {
        let path = self.path(name)?;
        let doc = serde_json::json!({ "version": VERSION, "config": self, "result": result });
        fs::write(
            &path,
            serde_json::to_string_pretty(&doc).expect("result serializes") + "\n",
        )?;
        Ok(path)
    }
}

/// Reads the configuration back from a file written by this crate.
pub fn read_config(path: &Path) -> Result<RunConfig, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    if let Some(line) = text.lines().find_map(|l| l.strip_prefix("# config: ")) {
        return serde_json::from_str(line).map_err(|e| e.to_string());
    }
    let doc: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    serde_json::from_value(doc["config"].clone()).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_through_files() {
        let dir = std::env::temp_dir().join(format!("eddycorner-config-{}", std::process::id()));
        let mut cfg = RunConfig::new("extract", 0.7, 2.0, dir.clone(), 7);
        cfg.k = vec![0, 2];
        cfg.lambdas = vec![(1, 0, Complex64::new(2.0, -1.0))];
        cfg.radii = Some(RadiusGrid {
            r_max: 0.4,
            r_min: 1e-4,
            count: 20,
        });
        let csv = cfg.write_csv("a.csv", "x\n1\n").unwrap();
        let json = cfg.write_json("a.json", &[1.0, 2.0]).unwrap();
        assert_eq!(read_config(&csv).unwrap(), cfg);
        assert_eq!(read_config(&json).unwrap(), cfg);
        fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn validation() {
        let mut cfg = RunConfig::new("eval", 0.7, 0.0, PathBuf::from("out"), 0);
        assert!(cfg.validate().is_ok());
        cfg.k = vec![0];
        cfg.p = vec![1];
        assert!(cfg.validate().is_err());
        cfg.p = vec![0];
        cfg.omega = 7.0;
        assert!(cfg.validate().is_err());
    }
}
