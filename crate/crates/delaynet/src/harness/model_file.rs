//! Model definition files.
//!
//! A model file is a JSON document tagged by `type`:
//!
//! * `"xu-wu"`: the specialized model (step `h`, rates `a`, weights `b`,
//!   inputs `input`, `activations`, shared `delay`, `delay_bound`).
//! * `"hopfield"`: the general model (`c`, `interactions`, `envelopes`,
//!   `delays`, `delay_bound`).
//! * `"continuous"`: a continuous-time description to be discretized
//!   (`rates`, `interactions`, `delays`, `delay_sup`).
//!
//! Sequence-valued fields use `{"kind": "constant" | "periodic" | "table"
//! | "prefix-periodic", ...}`; all reals are 64-bit floats. The `models/`
//! directory of this crate holds commented-by-name examples of each form.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::engine::{self, Trajectory};
use crate::model::{ContinuousHopfieldSpec, HistorySegment, HopfieldModel, XuWuModel};

use super::HarnessError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum ModelFile {
    XuWu(XuWuModel),
    Hopfield(HopfieldModel),
    Continuous(ContinuousHopfieldSpec),
}

impl ModelFile {
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.display().to_string(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| HarnessError::Json {
            path: path.display().to_string(),
            source,
        })
    }

    /// The discrete model to operate on; continuous specs must be
    /// discretized first.
    pub fn as_discrete(&self) -> Result<DiscreteModel, HarnessError> {
        match self {
            ModelFile::XuWu(model) => Ok(DiscreteModel::XuWu(Arc::new(model.clone()))),
            ModelFile::Hopfield(model) => Ok(DiscreteModel::Hopfield(Arc::new(model.clone()))),
            ModelFile::Continuous(_) => Err(HarnessError::NeedsDiscretization),
        }
    }
}

/// A loaded discrete model with both representations available.
#[derive(Debug, Clone)]
pub enum DiscreteModel {
    XuWu(Arc<XuWuModel>),
    Hopfield(Arc<HopfieldModel>),
}

impl DiscreteModel {
    pub fn dim(&self) -> usize {
        match self {
            DiscreteModel::XuWu(m) => m.dim(),
            DiscreteModel::Hopfield(m) => m.dim(),
        }
    }

    pub fn r(&self) -> i32 {
        match self {
            DiscreteModel::XuWu(m) => m.r(),
            DiscreteModel::Hopfield(m) => m.r(),
        }
    }

    /// The general representation (conversion for specialized models).
    pub fn general(&self) -> Arc<HopfieldModel> {
        match self {
            DiscreteModel::XuWu(m) => Arc::new(m.as_general()),
            DiscreteModel::Hopfield(m) => Arc::clone(m),
        }
    }

    pub fn as_xu_wu(&self) -> Option<&XuWuModel> {
        match self {
            DiscreteModel::XuWu(m) => Some(m),
            DiscreteModel::Hopfield(_) => None,
        }
    }

    /// Simulate in the model's native representation.
    pub fn solve(
        &self,
        n: i64,
        alpha: &HistorySegment,
        horizon: i64,
    ) -> Result<Trajectory, engine::EngineError> {
        match self {
            DiscreteModel::XuWu(m) => engine::solve_xu_wu(m, n, alpha, horizon),
            DiscreteModel::Hopfield(m) => engine::solve(m, n, alpha, horizon),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xu_wu_file_round_trips() {
        let json = r#"{
            "type": "xu-wu",
            "h": 1.0,
            "a": [{"kind": "constant", "value": 1.0}],
            "b": [[{"kind": "constant", "value": 0.3}]],
            "input": [{"kind": "constant", "value": 0.0}],
            "activations": [{"kind": "tanh", "gain": 1.0}],
            "delay": {"kind": "constant", "value": 0.0},
            "delay_bound": 0
        }"#;
        let file: ModelFile = serde_json::from_str(json).unwrap();
        let discrete = file.as_discrete().unwrap();
        assert_eq!(discrete.dim(), 1);
        assert!(discrete.as_xu_wu().is_some());
        let text = serde_json::to_string(&file).unwrap();
        let again: ModelFile = serde_json::from_str(&text).unwrap();
        assert_eq!(again.as_discrete().unwrap().dim(), 1);
    }

    #[test]
    fn invalid_model_is_rejected_at_parse_time() {
        let json = r#"{
            "type": "xu-wu",
            "h": -1.0,
            "a": [{"kind": "constant", "value": 1.0}],
            "b": [[{"kind": "constant", "value": 0.3}]],
            "input": [{"kind": "constant", "value": 0.0}],
            "activations": [{"kind": "identity"}],
            "delay": {"kind": "constant", "value": 0.0},
            "delay_bound": 0
        }"#;
        assert!(serde_json::from_str::<ModelFile>(json).is_err());
    }

    #[test]
    fn continuous_files_require_discretization() {
        let json = r#"{
            "type": "continuous",
            "rates": [{"kind": "constant", "value": 1.0}],
            "interactions": [[{
                "activation": {"kind": "identity"},
                "gain": {"kind": "constant", "value": 0.0},
                "offset": {"kind": "constant", "value": 0.0}
            }]],
            "delays": [[{"kind": "constant", "value": 0.0}]],
            "delay_sup": 0.0
        }"#;
        let file: ModelFile = serde_json::from_str(json).unwrap();
        assert!(matches!(
            file.as_discrete(),
            Err(HarnessError::NeedsDiscretization)
        ));
    }
}
