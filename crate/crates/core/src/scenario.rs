//! JSON scenario files and the shipped presets.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::coefficient::CoefficientFunction;
use crate::constants::Constants;
use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianSpec;
use crate::state::GaussianState;
use crate::symplectic::Stepper;

/// Time series that can be written by a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Series {
    Mean,
    Iwasawa,
    Thermo,
    Wigner,
}

impl Series {
    pub const ALL: [Series; 4] = [Series::Mean, Series::Iwasawa, Series::Thermo, Series::Wigner];

    pub fn name(self) -> &'static str {
        match self {
            Series::Mean => "mean",
            Series::Iwasawa => "iwasawa",
            Series::Thermo => "thermo",
            Series::Wigner => "wigner",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub series: Series,
    pub path: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialMeans {
    pub mean_q: Vec<f64>,
    pub mean_p: Vec<f64>,
}

type CoefficientMatrix = Vec<Vec<CoefficientFunction>>;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HamiltonianFile {
    n: usize,
    a: CoefficientMatrix,
    b: CoefficientMatrix,
    c: CoefficientMatrix,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    name: String,
    #[serde(default)]
    constants: Constants,
    hamiltonian: HamiltonianFile,
    initial: InitialMeans,
    t_end: f64,
    steps: usize,
    #[serde(default, skip_serializing_if = "is_default_stepper")]
    stepper: Stepper,
    #[serde(default)]
    outputs: Vec<OutputSpec>,
}

fn is_default_stepper(s: &Stepper) -> bool {
    *s == Stepper::default()
}

/// A validated simulation scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub constants: Constants,
    pub hamiltonian: HamiltonianSpec,
    pub initial: InitialMeans,
    pub t_end: f64,
    pub steps: usize,
    pub stepper: Stepper,
    pub outputs: Vec<OutputSpec>,
}

impl Scenario {
    /// Validate and build. Errors name the offending field.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        constants: Constants,
        hamiltonian: HamiltonianSpec,
        initial: InitialMeans,
        t_end: f64,
        steps: usize,
        stepper: Stepper,
        outputs: Vec<OutputSpec>,
    ) -> Result<Self> {
        constants
            .validate()
            .map_err(|e| Error::Validation(format!("constants: {e}")))?;
        let n = hamiltonian.n();
        if initial.mean_q.len() != n {
            return Err(Error::Validation(format!(
                "initial.mean_q: expected {n} entries, got {}",
                initial.mean_q.len()
            )));
        }
        if initial.mean_p.len() != n {
            return Err(Error::Validation(format!(
                "initial.mean_p: expected {n} entries, got {}",
                initial.mean_p.len()
            )));
        }
        if initial.mean_q.iter().chain(&initial.mean_p).any(|x| !x.is_finite()) {
            return Err(Error::Validation("initial: non-finite mean".into()));
        }
        if !(t_end > 0.0 && t_end.is_finite()) {
            return Err(Error::Validation(format!("t_end: must be > 0, got {t_end}")));
        }
        if steps == 0 {
            return Err(Error::Validation("steps: must be >= 1".into()));
        }
        Ok(Self {
            name: name.into(),
            constants,
            hamiltonian,
            initial,
            t_end,
            steps,
            stepper,
            outputs,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ScenarioFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let h = file.hamiltonian;
        let hamiltonian = HamiltonianSpec::new(h.n, h.a, h.b, h.c)?;
        Self::new(
            file.name,
            file.constants,
            hamiltonian,
            file.initial,
            file.t_end,
            file.steps,
            file.stepper,
            file.outputs,
        )
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        let h = &self.hamiltonian;
        let file = ScenarioFile {
            name: self.name.clone(),
            constants: self.constants,
            hamiltonian: HamiltonianFile {
                n: h.n(),
                a: h.a().clone(),
                b: h.b().clone(),
                c: h.c().clone(),
            },
            initial: self.initial.clone(),
            t_end: self.t_end,
            steps: self.steps,
            stepper: self.stepper,
            outputs: self.outputs.clone(),
        };
        serde_json::to_string_pretty(&file).expect("scenario serializes")
    }

    pub fn initial_state(&self) -> Result<GaussianState> {
        GaussianState::initial_ground_with(
            self.constants,
            self.hamiltonian.n(),
            &self.initial.mean_q,
            &self.initial.mean_p,
        )
    }
}

pub const PRESET_NAMES: [&str; 4] = [
    "harmonic_oscillator",
    "free_particle",
    "parametric_oscillator",
    "coupled_2d",
];

fn all_outputs(name: &str) -> Vec<OutputSpec> {
    Series::ALL
        .iter()
        .map(|&series| OutputSpec {
            series,
            path: format!("{name}_{}.csv", series.name()),
        })
        .collect()
}

/// A shipped preset scenario by name.
pub fn preset(name: &str) -> Result<Scenario> {
    let (spec, q, p, t_end, steps) = match name {
        "harmonic_oscillator" => (
            HamiltonianSpec::harmonic_oscillator(),
            vec![1.0],
            vec![0.0],
            2.0 * std::f64::consts::PI,
            1000,
        ),
        "free_particle" => (HamiltonianSpec::free_particle(), vec![0.0], vec![1.0], 5.0, 1000),
        "parametric_oscillator" => (
            HamiltonianSpec::parametric_oscillator(),
            vec![0.5],
            vec![0.0],
            20.0,
            10_000,
        ),
        "coupled_2d" => (
            HamiltonianSpec::coupled_2d(),
            vec![0.5, -0.3],
            vec![0.2, 0.4],
            5.0,
            5000,
        ),
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown preset `{other}` (available: {})",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    Scenario::new(
        name,
        Constants::default(),
        spec,
        InitialMeans { mean_q: q, mean_p: p },
        t_end,
        steps,
        Stepper::Midpoint,
        all_outputs(name),
    )
}
