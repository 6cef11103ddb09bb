//! Run configuration and oracle selection.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::losses::{
    make_rigid_motion_oracle, make_static_oracle, make_target_oracle, ArapConfig, GuidanceOracle,
    LaConfig,
};
use crate::optim::TrainConfig;
use crate::sketch::SketchVideo;

use super::export::read_frame_dir;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExportConfig {
    pub svg: bool,
    pub ppm: bool,
    pub loss_csv: bool,
    pub metrics: bool,
    pub checkpoint: bool,
}

impl Default for ExportConfig {
    fn default() -> Self {
        ExportConfig {
            svg: true,
            ppm: false,
            loss_csv: true,
            metrics: true,
            checkpoint: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
    /// Oracle selector, e.g. `rigid:angle=0.1,tx=1`, `static`, `target:dir=runs/t`.
    pub oracle: String,
    pub la: LaConfig,
    pub arap: ArapConfig,
    pub train: TrainConfig,
    pub export: ExportConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            input: None,
            out: None,
            oracle: "rigid:angle=0.1".into(),
            la: LaConfig::default(),
            arap: ArapConfig::default(),
            train: TrainConfig::default(),
            export: ExportConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))
    }

    /// Checks every numeric field and the oracle selector. Paths are checked
    /// when they are opened.
    pub fn validate(&self) -> Result<()> {
        self.la.validate()?;
        self.arap.validate()?;
        self.train.validate()?;
        self.oracle_spec()?;
        if self.input.is_none() {
            return Err(Error::InvalidConfig("no input sketch given".into()));
        }
        if self.out.is_none() {
            return Err(Error::InvalidConfig("no output directory given".into()));
        }
        Ok(())
    }

    pub fn oracle_spec(&self) -> Result<OracleSpec> {
        self.oracle.parse()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OracleSpec {
    Rigid {
        angle: f64,
        translate: Point2,
        weight: f64,
    },
    Static {
        weight: f64,
    },
    Target {
        dir: PathBuf,
        weight: f64,
    },
}

impl FromStr for OracleSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| Error::InvalidConfig(format!("oracle '{s}': {msg}"));
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut args = Vec::new();
        for part in rest.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key=value, got '{part}'")))?;
            args.push((k.trim(), v.trim()));
        }
        let num = |key: &str, default: f64| -> Result<f64> {
            match args.iter().find(|(k, _)| *k == key) {
                None => Ok(default),
                Some((_, v)) => v
                    .parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| bad(format!("{key} must be a finite number, got '{v}'"))),
            }
        };
        let allowed: &[&str] = match kind.trim() {
            "rigid" => &["angle", "tx", "ty", "weight"],
            "static" => &["weight"],
            "target" => &["dir", "weight"],
            other => return Err(bad(format!("unknown oracle kind '{other}'"))),
        };
        if let Some((k, _)) = args.iter().find(|(k, _)| !allowed.contains(k)) {
            return Err(bad(format!("unknown parameter '{k}'")));
        }
        let weight = num("weight", 1.0)?;
        if weight < 0.0 {
            return Err(bad("weight must be >= 0".into()));
        }
        Ok(match kind.trim() {
            "rigid" => OracleSpec::Rigid {
                angle: num("angle", 0.0)?,
                translate: Point2::new(num("tx", 0.0)?, num("ty", 0.0)?),
                weight,
            },
            "static" => OracleSpec::Static { weight },
            _ => OracleSpec::Target {
                dir: args
                    .iter()
                    .find(|(k, _)| *k == "dir")
                    .map(|(_, v)| PathBuf::from(v))
                    .ok_or_else(|| bad("target oracle needs dir=<frame directory>".into()))?,
                weight,
            },
        })
    }
}

impl OracleSpec {
    /// Instantiates the oracle for a video of `frames` frames.
    pub fn build(&self, frames: usize) -> Result<Box<dyn GuidanceOracle>> {
        Ok(match self {
            OracleSpec::Rigid {
                angle,
                translate,
                weight,
            } => Box::new(make_rigid_motion_oracle(*angle, *translate, *weight)),
            OracleSpec::Static { weight } => Box::new(make_static_oracle(*weight)),
            OracleSpec::Target { dir, weight } => {
                let targets = SketchVideo::new(read_frame_dir(dir)?)?;
                if targets.frame_count() != frames {
                    return Err(Error::InvalidConfig(format!(
                        "target directory {} holds {} frames, run uses {frames}",
                        dir.display(),
                        targets.frame_count()
                    )));
                }
                Box::new(make_target_oracle(&targets, *weight))
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_specs() {
        assert_eq!(
            "rigid:angle=0.1,ty=-2".parse::<OracleSpec>().unwrap(),
            OracleSpec::Rigid {
                angle: 0.1,
                translate: Point2::new(0.0, -2.0),
                weight: 1.0
            }
        );
        assert_eq!(
            "static".parse::<OracleSpec>().unwrap(),
            OracleSpec::Static { weight: 1.0 }
        );
        assert_eq!(
            "target:dir=a/b,weight=2".parse::<OracleSpec>().unwrap(),
            OracleSpec::Target {
                dir: "a/b".into(),
                weight: 2.0
            }
        );
        for bad in [
            "sds",
            "rigid:angle",
            "rigid:angle=x",
            "static:angle=1",
            "target",
            "rigid:weight=-1",
        ] {
            assert!(
                matches!(bad.parse::<OracleSpec>(), Err(Error::InvalidConfig(_))),
                "{bad}"
            );
        }
    }

    #[test]
    fn partial_json_uses_defaults() {
        let cfg: RunConfig =
            serde_json::from_str(r#"{"train": {"iterations": 5}, "la": {"lambda_l": 0.5}}"#)
                .unwrap();
        assert_eq!(cfg.train.iterations, 5);
        assert_eq!(cfg.train.frames, 24);
        assert_eq!(cfg.la.lambda_l, 0.5);
        assert_eq!(cfg.la.lambda_a, 1e-5);
        assert!(serde_json::from_str::<RunConfig>(r#"{"trian": {}}"#).is_err());
    }

    #[test]
    fn validation() {
        let mut cfg = RunConfig {
            input: Some("x.svg".into()),
            out: Some("out".into()),
            ..RunConfig::default()
        };
        cfg.validate().unwrap();
        cfg.train.iterations = 0;
        assert!(matches!(cfg.validate(), Err(Error::InvalidConfig(_))));
        cfg.train.iterations = 1;
        cfg.arap.lambda_arap = -1.0;
        assert!(cfg.validate().is_err());
    }
}
