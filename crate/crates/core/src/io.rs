//! JSON file formats.
//!
//! Two schemas: `operator/v1` carries a labeled operator (regions, declared
//! causal class, dense matrix of `[re, im]` pairs in row-major canonical
//! order), and `scenario/v1` carries a scenario builder name plus its
//! ingredients, either inline or as `{"path": "..."}` references to operator
//! files resolved relative to the spec file. Serialization uses shortest
//! round-trip decimal encoding, so save/load is bit-exact.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::conditional::{CausalClass, JointState};
use crate::error::{Error, Result};
use crate::hybrid::{
    ClassicalDistribution, EnsemblePreparation, HybridState, Instrument, LikelihoodOperator,
};
use crate::linalg::CMat;
use crate::operator::LabeledOperator;
use crate::region::Region;
use crate::scenario::{
    instrument_scenario, postprocess_scenario, preparation_scenario, remote_measurement_scenario,
    retrodiction_scenario, sequential_measurement_scenario, two_direct_scenario,
    two_preparation_scenario, two_remote_scenario, Provenance, Scenario, StochasticMap,
};
use crate::tolerance::Tolerance;

pub const OPERATOR_SCHEMA: &str = "operator/v1";
pub const SCENARIO_SCHEMA: &str = "scenario/v1";

/// Dense complex matrix as nested `[re, im]` pairs.
pub type MatrixData = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_data(m: &CMat) -> MatrixData {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn matrix_from_data(data: &MatrixData) -> Result<CMat> {
    let rows = data.len();
    let cols = data.first().map(|r| r.len()).unwrap_or(0);
    if data.iter().any(|r| r.len() != cols) {
        return Err(Error::Invalid("matrix rows have unequal lengths".into()));
    }
    Ok(CMat::from_fn(rows, cols, |i, j| {
        num_complex::Complex64::new(data[i][j][0], data[i][j][1])
    }))
}

/// On-disk form of a labeled operator.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorFile {
    pub schema: String,
    pub regions: Vec<Region>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub causal_class: Option<CausalClass>,
    pub matrix: MatrixData,
}

impl OperatorFile {
    pub fn from_operator(op: &LabeledOperator, class: Option<CausalClass>) -> Self {
        Self {
            schema: OPERATOR_SCHEMA.into(),
            regions: op.factors().to_vec(),
            causal_class: class,
            matrix: matrix_to_data(op.matrix()),
        }
    }

    pub fn from_state(s: &JointState) -> Self {
        Self::from_operator(s.op(), Some(s.class().clone()))
    }

    pub fn to_operator(&self) -> Result<LabeledOperator> {
        if self.schema != OPERATOR_SCHEMA {
            return Err(Error::Invalid(format!(
                "expected schema `{OPERATOR_SCHEMA}`, found `{}`",
                self.schema
            )));
        }
        LabeledOperator::new(self.regions.clone(), matrix_from_data(&self.matrix)?)
    }

    /// Parse and validate as a state, honoring the declared causal class
    /// (default acausal).
    pub fn to_state(&self, tol: &Tolerance) -> Result<JointState> {
        let op = self.to_operator()?;
        let class = self.causal_class.clone().unwrap_or(CausalClass::Acausal);
        JointState::new(op, class, tol)
    }
}

pub fn parse_operator(text: &str) -> Result<OperatorFile> {
    Ok(serde_json::from_str(text)?)
}

pub fn serialize_operator(file: &OperatorFile) -> Result<String> {
    Ok(serde_json::to_string_pretty(file)?)
}

pub fn load_operator(path: &Path) -> Result<OperatorFile> {
    parse_operator(&std::fs::read_to_string(path)?)
}

pub fn save_operator(path: &Path, file: &OperatorFile) -> Result<()> {
    Ok(std::fs::write(path, serialize_operator(file)? + "\n")?)
}

/// An operator ingredient: inline, or a reference to an operator file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OperatorRef {
    Path { path: PathBuf },
    Inline(OperatorFile),
}

impl OperatorRef {
    pub fn resolve(&self, base_dir: &Path) -> Result<OperatorFile> {
        match self {
            OperatorRef::Inline(f) => Ok(f.clone()),
            OperatorRef::Path { path } => load_operator(&base_dir.join(path)),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistSpec {
    pub region: Region,
    pub probs: Vec<f64>,
}

impl DistSpec {
    pub fn build(&self) -> Result<ClassicalDistribution> {
        ClassicalDistribution::new(self.region.clone(), self.probs.clone())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub label: Region,
    pub quantum: Vec<Region>,
    pub states: Vec<MatrixData>,
}

impl EnsembleSpec {
    pub fn build(&self, tol: &Tolerance) -> Result<EnsemblePreparation> {
        let states = self.states.iter().map(matrix_from_data).collect::<Result<_>>()?;
        EnsemblePreparation::new(self.label.clone(), self.quantum.clone(), states, tol)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PovmSpec {
    pub outcome: Region,
    pub quantum: Vec<Region>,
    pub effects: Vec<MatrixData>,
}

impl PovmSpec {
    pub fn build(&self, tol: &Tolerance) -> Result<LikelihoodOperator> {
        let effects = self.effects.iter().map(matrix_from_data).collect::<Result<_>>()?;
        LikelihoodOperator::new(self.outcome.clone(), self.quantum.clone(), effects, tol)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstrumentSpec {
    pub outcome: Region,
    pub input: Region,
    pub output: Region,
    pub branches: Vec<Vec<MatrixData>>,
}

impl InstrumentSpec {
    pub fn build(&self, tol: &Tolerance) -> Result<Instrument> {
        let branches = self
            .branches
            .iter()
            .map(|b| b.iter().map(matrix_from_data).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        Instrument::new(
            self.outcome.clone(),
            self.input.clone(),
            self.output.clone(),
            branches,
            tol,
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StochasticSpec {
    pub output: Region,
    pub rows: Vec<Vec<f64>>,
}

impl StochasticSpec {
    pub fn build(&self) -> Result<StochasticMap> {
        StochasticMap::new(self.output.clone(), self.rows.clone())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComponentSpec {
    pub values: Vec<usize>,
    pub matrix: MatrixData,
}

/// Builder name plus ingredients.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "builder", rename_all = "snake_case")]
pub enum ScenarioBuilder {
    /// Explicit hybrid components (used for literal tabulated scenarios).
    Hybrid {
        classical: Vec<Region>,
        quantum: Vec<Region>,
        components: Vec<ComponentSpec>,
    },
    Preparation {
        pz: DistSpec,
        prep: EnsembleSpec,
    },
    RemoteMeasurement {
        state: OperatorRef,
        povm: PovmSpec,
    },
    Retrodiction {
        state: OperatorRef,
        povm: PovmSpec,
    },
    Instrument {
        state: OperatorRef,
        instrument: InstrumentSpec,
    },
    Postprocess {
        base: Box<ScenarioFile>,
        proc: StochasticSpec,
    },
    TwoPreparation {
        pz: DistSpec,
        prep: EnsembleSpec,
        l1: StochasticSpec,
        l2: StochasticSpec,
    },
    TwoRemote {
        state: OperatorRef,
        povm1: PovmSpec,
        povm2: PovmSpec,
    },
    TwoDirect {
        state: OperatorRef,
        povm: PovmSpec,
        l1: StochasticSpec,
        l2: StochasticSpec,
    },
    SequentialMeasurement {
        state: OperatorRef,
        inst1: InstrumentSpec,
        inst2: InstrumentSpec,
    },
}

/// On-disk form of a scenario spec.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub schema: String,
    #[serde(flatten)]
    pub spec: ScenarioBuilder,
}

pub fn parse_scenario(text: &str) -> Result<ScenarioFile> {
    Ok(serde_json::from_str(text)?)
}

pub fn serialize_scenario(file: &ScenarioFile) -> Result<String> {
    Ok(serde_json::to_string_pretty(file)?)
}

pub fn load_scenario(path: &Path) -> Result<ScenarioFile> {
    parse_scenario(&std::fs::read_to_string(path)?)
}

pub fn save_scenario(path: &Path, file: &ScenarioFile) -> Result<()> {
    Ok(std::fs::write(path, serialize_scenario(file)? + "\n")?)
}

/// Resolve ingredients (relative to `base_dir`) and run the named builder.
pub fn build_scenario(file: &ScenarioFile, base_dir: &Path, tol: &Tolerance) -> Result<Scenario> {
    if file.schema != SCENARIO_SCHEMA {
        return Err(Error::Invalid(format!(
            "expected schema `{SCENARIO_SCHEMA}`, found `{}`",
            file.schema
        )));
    }
    match &file.spec {
        ScenarioBuilder::Hybrid {
            classical,
            quantum,
            components,
        } => {
            let mut map = std::collections::BTreeMap::new();
            for c in components {
                map.insert(c.values.clone(), matrix_from_data(&c.matrix)?);
            }
            let joint = HybridState::new(classical.clone(), quantum.clone(), map, tol)?;
            Ok(Scenario {
                joint,
                provenance: Provenance {
                    builder: "hybrid".into(),
                    digest: digest_of(file)?,
                },
            })
        }
        ScenarioBuilder::Preparation { pz, prep } => {
            preparation_scenario(&pz.build()?, &prep.build(tol)?, tol)
        }
        ScenarioBuilder::RemoteMeasurement { state, povm } => remote_measurement_scenario(
            &state.resolve(base_dir)?.to_state(tol)?,
            &povm.build(tol)?,
            tol,
        ),
        ScenarioBuilder::Retrodiction { state, povm } => retrodiction_scenario(
            &state.resolve(base_dir)?.to_state(tol)?,
            &povm.build(tol)?,
            tol,
        ),
        ScenarioBuilder::Instrument { state, instrument } => instrument_scenario(
            &state.resolve(base_dir)?.to_state(tol)?,
            &instrument.build(tol)?,
            tol,
        ),
        ScenarioBuilder::Postprocess { base, proc } => {
            let base_scenario = build_scenario(base, base_dir, tol)?;
            postprocess_scenario(&base_scenario.joint, &proc.build()?, tol)
        }
        ScenarioBuilder::TwoPreparation { pz, prep, l1, l2 } => two_preparation_scenario(
            &pz.build()?,
            &prep.build(tol)?,
            &l1.build()?,
            &l2.build()?,
            tol,
        ),
        ScenarioBuilder::TwoRemote {
            state,
            povm1,
            povm2,
        } => two_remote_scenario(
            &state.resolve(base_dir)?.to_state(tol)?,
            &povm1.build(tol)?,
            &povm2.build(tol)?,
            tol,
        ),
        ScenarioBuilder::TwoDirect {
            state,
            povm,
            l1,
            l2,
        } => two_direct_scenario(
            &state.resolve(base_dir)?.to_state(tol)?,
            &povm.build(tol)?,
            &l1.build()?,
            &l2.build()?,
            tol,
        ),
        ScenarioBuilder::SequentialMeasurement {
            state,
            inst1,
            inst2,
        } => sequential_measurement_scenario(
            &state.resolve(base_dir)?.to_state(tol)?,
            &inst1.build(tol)?,
            &inst2.build(tol)?,
            tol,
        ),
    }
}

fn digest_of(file: &ScenarioFile) -> Result<String> {
    use sha2::{Digest, Sha256};
    let mut hasher = Sha256::new();
    hasher.update(serde_json::to_string(file)?.as_bytes());
    Ok(format!("{:x}", hasher.finalize()))
}
