use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::process::{Mode, ProcessParams};
use crate::{Error, Result};

/// Which process and cycle notion a trial runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Directed process, COL, one monochromatic cycle per color.
    Directed,
    /// Undirected process, COL-ORIENT, one monochromatic cycle per color.
    Undirected,
    /// Undirected process with `q = 1`, COL-ORIENT, rainbow relabeling.
    Rainbow,
}

impl Variant {
    pub fn process_mode(self) -> Mode {
        match self {
            Variant::Directed => Mode::Directed,
            Variant::Undirected | Variant::Rainbow => Mode::Undirected,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Directed => "directed",
            Variant::Undirected => "undirected",
            Variant::Rainbow => "rainbow",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "directed" => Ok(Variant::Directed),
            "undirected" => Ok(Variant::Undirected),
            "rainbow" => Ok(Variant::Rainbow),
            other => Err(Error::Config(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub ns: Vec<usize>,
    pub qs: Vec<usize>,
    pub variant: Variant,
    /// `params.q` is ignored; each trial uses its entry of `qs`.
    pub params: ProcessParams,
    pub trials: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    /// Also write each trial's coloring and cycles under `out/artifacts`.
    #[serde(default)]
    pub artifacts: bool,
    /// Worker threads; 0 uses every available core.
    pub jobs: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            ns: vec![500],
            qs: vec![1],
            variant: Variant::Directed,
            params: ProcessParams::default(),
            trials: 1,
            seed: 0,
            out: None,
            artifacts: false,
            jobs: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ns.is_empty() {
            return Err(Error::Config("the n list is empty".into()));
        }
        if self.qs.is_empty() {
            return Err(Error::Config("the q list is empty".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.variant == Variant::Rainbow && self.qs.iter().any(|&q| q != 1) {
            return Err(Error::Config("rainbow mode runs with q = 1 only".into()));
        }
        for &n in &self.ns {
            for &q in &self.qs {
                self.params_for(q)
                    .validate(n)
                    .map_err(|e| Error::Config(e.to_string()))?;
            }
        }
        Ok(())
    }

    pub fn params_for(&self, q: usize) -> ProcessParams {
        ProcessParams {
            q,
            ..self.params.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_lists_are_config_errors() {
        let c = ExperimentConfig {
            ns: vec![],
            ..Default::default()
        };
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        let c = ExperimentConfig {
            qs: vec![],
            ..Default::default()
        };
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        assert!(ExperimentConfig::default().validate().is_ok());
    }

    #[test]
    fn rainbow_needs_q1() {
        let c = ExperimentConfig {
            variant: Variant::Rainbow,
            qs: vec![2],
            ..Default::default()
        };
        assert!(c.validate().is_err());
        assert_eq!("rainbow".parse::<Variant>().unwrap(), Variant::Rainbow);
    }
}
