//! Case description files: flat `key = value` TOML.
//!
//! ```toml
//! id = "t2-reddy-m11"
//! analysis = "static"          # static | modal | buckling
//! material = "material_i"      # material_i | material_ii (needs e1_over_e2)
//! layup = [0.0, 90.0]          # ply angles in degrees, bottom to top
//! layup_kind = "cross_ply"     # cross_ply | angle_ply
//! a_over_h = 10.0              # square plate a = b = 1; or give a, b, h
//! bc = "SSSS"                  # edges y = 0, x = a, y = b, x = 0
//! shear_model = "reddy"        # reddy | shimpi | arya | karama | fisdt
//! load = "sinusoidal"          # sinusoidal | uniform (static); uniaxial | biaxial (buckling)
//! ```
//!
//! `load` is not needed for modal analysis. Optional keys: `fractions` (ply thickness fractions, default equal),
//! `degree` (3), `mesh` (11 elements per side), `load_magnitude` (1),
//! `modes` (1), `mode_line` (`y_mid` | `x_mid`), `profile_points` (11 per
//! ply, 0 disables the thickness profile), `output`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::assembly::{LoadKind, LoadSpec, PrebucklingLoad};
use crate::boundary::{EdgeCondition, LayupKind};
use crate::error::{Error, Result};
use crate::laminate::{Lamina, Layup, Orthotropic, ShearModel};
use crate::postproc::AxisLine;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Analysis {
    Static,
    Modal,
    Buckling,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaterialKind {
    MaterialI,
    MaterialIi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoadType {
    Sinusoidal,
    Uniform,
    Uniaxial,
    Biaxial,
}

impl LoadType {
    fn is_transverse(&self) -> bool {
        matches!(self, LoadType::Sinusoidal | LoadType::Uniform)
    }
}

fn default_degree() -> usize {
    3
}

fn default_mesh() -> usize {
    11
}

fn one_f64() -> f64 {
    1.0
}

fn one_usize() -> usize {
    1
}

fn default_profile_points() -> usize {
    11
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseConfig {
    pub id: String,
    pub analysis: Analysis,
    pub material: MaterialKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e1_over_e2: Option<f64>,
    pub layup: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fractions: Option<Vec<f64>>,
    pub layup_kind: LayupKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_over_h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    pub bc: String,
    pub shear_model: ShearModel,
    #[serde(default = "default_degree")]
    pub degree: usize,
    #[serde(default = "default_mesh")]
    pub mesh: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub load: Option<LoadType>,
    #[serde(default = "one_f64")]
    pub load_magnitude: f64,
    #[serde(default = "one_usize")]
    pub modes: usize,
    #[serde(default)]
    pub mode_line: AxisLine,
    #[serde(default = "default_profile_points")]
    pub profile_points: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

/// Plate dimensions in consistent length units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dimensions {
    pub a: f64,
    pub b: f64,
    pub h: f64,
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Config(format!("`{name}` must be positive, got {v}")))
    }
}

impl CaseConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: CaseConfig = toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("case configuration serializes to TOML")
    }

    /// Check every field that `run_case` relies on.
    pub fn validate(&self) -> Result<()> {
        if self.id.trim().is_empty() {
            return Err(Error::Config("`id` must not be empty".into()));
        }
        self.material()?;
        self.layup()?;
        self.dimensions()?;
        self.edge_condition()?;
        if self.degree < 2 {
            return Err(Error::Config(format!(
                "`degree` = {} too low: the bending terms need C¹ continuity (degree ≥ 2)",
                self.degree
            )));
        }
        if self.mesh == 0 {
            return Err(Error::Config("`mesh` must be at least 1".into()));
        }
        if self.modes == 0 {
            return Err(Error::Config("`modes` must be at least 1".into()));
        }
        if self.profile_points == 1 {
            return Err(Error::Config("`profile_points` must be 0 or at least 2".into()));
        }
        if !self.load_magnitude.is_finite() {
            return Err(Error::Config("`load_magnitude` must be finite".into()));
        }
        let transverse = self.load.map(|l| l.is_transverse());
        match (self.analysis, transverse) {
            (Analysis::Static, Some(false) | None) => Err(Error::Config(
                "static analysis needs `load` = sinusoidal or uniform".into(),
            )),
            (Analysis::Buckling, Some(true) | None) => Err(Error::Config(
                "buckling analysis needs `load` = uniaxial or biaxial".into(),
            )),
            _ => Ok(()),
        }
    }

    pub fn material(&self) -> Result<Orthotropic> {
        match (self.material, self.e1_over_e2) {
            (MaterialKind::MaterialI, None) => Ok(Orthotropic::material_i()),
            (MaterialKind::MaterialI, Some(_)) => Err(Error::Config(
                "`e1_over_e2` applies to material_ii only".into(),
            )),
            (MaterialKind::MaterialIi, Some(r)) => Ok(Orthotropic::material_ii(positive("e1_over_e2", r)?)),
            (MaterialKind::MaterialIi, None) => {
                Err(Error::Config("material_ii needs `e1_over_e2`".into()))
            }
        }
    }

    pub fn dimensions(&self) -> Result<Dimensions> {
        match (self.a_over_h, self.a, self.b, self.h) {
            (Some(r), None, None, None) => Ok(Dimensions {
                a: 1.0,
                b: 1.0,
                h: 1.0 / positive("a_over_h", r)?,
            }),
            (None, Some(a), Some(b), Some(h)) => Ok(Dimensions {
                a: positive("a", a)?,
                b: positive("b", b)?,
                h: positive("h", h)?,
            }),
            _ => Err(Error::Config(
                "give either `a_over_h` alone or all of `a`, `b`, `h`".into(),
            )),
        }
    }

    pub fn layup(&self) -> Result<Layup> {
        let material = self.material()?;
        if self.layup.is_empty() {
            return Err(Error::Config("`layup` must list at least one ply angle".into()));
        }
        let fractions = match &self.fractions {
            Some(f) if f.len() != self.layup.len() => {
                return Err(Error::Config(format!(
                    "`fractions` has {} entries but `layup` has {}",
                    f.len(),
                    self.layup.len()
                )))
            }
            Some(f) => f.clone(),
            None => vec![1.0 / self.layup.len() as f64; self.layup.len()],
        };
        let laminas = self
            .layup
            .iter()
            .zip(fractions)
            .map(|(&theta_deg, thickness_fraction)| Lamina {
                material,
                theta_deg,
                thickness_fraction,
            })
            .collect();
        Layup::new(laminas, self.dimensions()?.h).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn edge_condition(&self) -> Result<EdgeCondition> {
        EdgeCondition::from_code(&self.bc, self.layup_kind)
    }

    pub fn transverse_load(&self) -> Option<LoadSpec> {
        let d = self.dimensions().ok()?;
        let kind = match self.load? {
            LoadType::Sinusoidal => LoadKind::Sinusoidal,
            LoadType::Uniform => LoadKind::Uniform,
            _ => return None,
        };
        Some(LoadSpec {
            kind,
            q0: self.load_magnitude,
            a: d.a,
            b: d.b,
        })
    }

    pub fn prebuckling_load(&self) -> Option<PrebucklingLoad> {
        match self.load? {
            LoadType::Uniaxial => Some(PrebucklingLoad::uniaxial(self.load_magnitude)),
            LoadType::Biaxial => Some(PrebucklingLoad::biaxial(self.load_magnitude)),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TABLE2: &str = r#"
id = "t2-reddy-m11"
analysis = "static"
material = "material_i"
layup = [0.0, 90.0]
layup_kind = "cross_ply"
a_over_h = 10.0
bc = "SSSS"
shear_model = "reddy"
load = "sinusoidal"
"#;

    #[test]
    fn parses_with_defaults() {
        let cfg = CaseConfig::from_toml_str(TABLE2).unwrap();
        assert_eq!(cfg.degree, 3);
        assert_eq!(cfg.mesh, 11);
        assert_eq!(cfg.modes, 1);
        assert_eq!(cfg.mode_line, AxisLine::MidY);
        assert_eq!(cfg.dimensions().unwrap(), Dimensions { a: 1.0, b: 1.0, h: 0.1 });
        assert_eq!(cfg.layup().unwrap().laminas().len(), 2);
        assert_eq!(cfg.transverse_load().unwrap().kind, LoadKind::Sinusoidal);
    }

    #[test]
    fn load_depends_on_analysis() {
        let modal = TABLE2
            .replace("\"static\"", "\"modal\"")
            .replace("load = \"sinusoidal\"\n", "");
        let cfg = CaseConfig::from_toml_str(&modal).unwrap();
        assert_eq!(cfg.load, None);
        assert!(!cfg.to_toml_string().contains("load ="));
        let buckling = TABLE2
            .replace("\"static\"", "\"buckling\"")
            .replace("\"sinusoidal\"", "\"biaxial\"");
        let cfg = CaseConfig::from_toml_str(&buckling).unwrap();
        assert_eq!(cfg.prebuckling_load(), Some(PrebucklingLoad::biaxial(1.0)));
        assert!(cfg.transverse_load().is_none());
        let missing = TABLE2.replace("load = \"sinusoidal\"\n", "");
        assert!(CaseConfig::from_toml_str(&missing).is_err());
    }

    #[test]
    fn round_trip() {
        let mut cfg = CaseConfig::from_toml_str(TABLE2).unwrap();
        cfg.fractions = Some(vec![0.3, 0.7]);
        cfg.output = Some(PathBuf::from("out/t2"));
        cfg.mode_line = AxisLine::MidX;
        let back = CaseConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn unknown_model_lists_valid_names() {
        let text = TABLE2.replace("\"reddy\"", "\"NoSuchModel\"");
        let err = CaseConfig::from_toml_str(&text).unwrap_err().to_string();
        assert!(err.contains("NoSuchModel"), "{err}");
        for name in ["reddy", "shimpi", "arya", "karama", "fisdt"] {
            assert!(err.contains(name), "{err}");
        }
    }

    #[test]
    fn rejects_bad_values() {
        let cases = [
            TABLE2.replace("\"SSSS\"", "\"SSXS\""),
            TABLE2.replace("a_over_h = 10.0", "a_over_h = -1.0"),
            TABLE2.replace("a_over_h = 10.0", "a = 1.0"),
            TABLE2.replace("\"sinusoidal\"", "\"uniaxial\""),
            TABLE2.replace("\"material_i\"", "\"material_ii\""),
            TABLE2.replace("[0.0, 90.0]", "[]"),
            format!("{TABLE2}fractions = [0.5]\n"),
            format!("{TABLE2}mesh = 0\n"),
            format!("{TABLE2}degree = 1\n"),
            format!("{TABLE2}colour = \"red\"\n"),
        ];
        for text in &cases {
            assert!(
                matches!(CaseConfig::from_toml_str(text), Err(Error::Config(_))),
                "{text}"
            );
        }
        let err = CaseConfig::from_toml_str(&cases[0]).unwrap_err().to_string();
        assert!(err.contains("SSXS"), "{err}");
    }
}
