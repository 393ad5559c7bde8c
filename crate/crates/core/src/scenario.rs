//! Scenario files: one JSON document describing a generator pair, grid,
//! initial state, synthesis options, output directory and tolerance
//! overrides. Unknown fields are rejected so typos fail loudly.
//!
//! Matrices are nested arrays of `[re, im]` pairs, row-major:
//! `[[[0,0],[1,0]],[[1,0],[0,0]]]` is the 2x2 matrix with ones on the
//! antidiagonal. Profiles are tagged by `kind`: `{"kind":"const","value":c}`,
//! `{"kind":"poly","coeffs":[c0,c1,...]}` or
//! `{"kind":"cos","amplitude":a,"omega":w,"phase":p}`.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::linalg::{CMatrix, CVector, RVector};
use crate::network::SynthesisPolicy;
use crate::quantum::{HamiltonianSpec, Profile, Term};

/// Gate values for every check the commands can run. All overridable per
/// scenario; the defaults are the contract tolerances.
#[derive(Clone, Copy, Debug)]
pub struct Tolerances {
    pub intertwining: f64,
    pub map_deviation: f64,
    pub derivative_consistency: f64,
    pub group_laws: f64,
    pub equivalence: f64,
    pub state_transport: f64,
    pub conjugation: f64,
    pub unitarity: f64,
    pub three_path: f64,
    pub roundtrip: f64,
    pub reconstruction: f64,
    pub netlist_fidelity: f64,
    pub norm_drift: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            intertwining: 1e-6,
            map_deviation: 1e-6,
            derivative_consistency: 1e-4,
            group_laws: 1e-9,
            equivalence: 1e-6,
            state_transport: 1e-7,
            conjugation: 1e-7,
            unitarity: 1e-7,
            three_path: 1e-7,
            roundtrip: 1e-6,
            reconstruction: 1e-12,
            netlist_fidelity: 1e-10,
            norm_drift: 1e-7,
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ToleranceConfig {
    intertwining: Option<f64>,
    map_deviation: Option<f64>,
    derivative_consistency: Option<f64>,
    group_laws: Option<f64>,
    equivalence: Option<f64>,
    state_transport: Option<f64>,
    conjugation: Option<f64>,
    unitarity: Option<f64>,
    three_path: Option<f64>,
    roundtrip: Option<f64>,
    reconstruction: Option<f64>,
    netlist_fidelity: Option<f64>,
    norm_drift: Option<f64>,
}

impl ToleranceConfig {
    fn resolve(&self) -> Result<Tolerances> {
        let d = Tolerances::default();
        let pick = |name: &str, v: Option<f64>, fallback: f64| -> Result<f64> {
            match v {
                None => Ok(fallback),
                Some(x) if x.is_finite() && x > 0.0 => Ok(x),
                Some(x) => {
                    Err(Error::Config(format!("tolerance {name} must be positive, got {x}")))
                }
            }
        };
        Ok(Tolerances {
            intertwining: pick("intertwining", self.intertwining, d.intertwining)?,
            map_deviation: pick("map_deviation", self.map_deviation, d.map_deviation)?,
            derivative_consistency: pick(
                "derivative_consistency",
                self.derivative_consistency,
                d.derivative_consistency,
            )?,
            group_laws: pick("group_laws", self.group_laws, d.group_laws)?,
            equivalence: pick("equivalence", self.equivalence, d.equivalence)?,
            state_transport: pick("state_transport", self.state_transport, d.state_transport)?,
            conjugation: pick("conjugation", self.conjugation, d.conjugation)?,
            unitarity: pick("unitarity", self.unitarity, d.unitarity)?,
            three_path: pick("three_path", self.three_path, d.three_path)?,
            roundtrip: pick("roundtrip", self.roundtrip, d.roundtrip)?,
            reconstruction: pick("reconstruction", self.reconstruction, d.reconstruction)?,
            netlist_fidelity: pick("netlist_fidelity", self.netlist_fidelity, d.netlist_fidelity)?,
            norm_drift: pick("norm_drift", self.norm_drift, d.norm_drift)?,
        })
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridConfig {
    t0: f64,
    t1: f64,
    steps: usize,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermConfig {
    profile: Profile,
    matrix: Vec<Vec<[f64; 2]>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct HamiltonianConfig {
    dim: usize,
    hermitian: bool,
    terms: Vec<TermConfig>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SynthesisConfig {
    /// Per-port capacitances; defaults to all ones.
    capacitance: Option<Vec<f64>>,
    /// Explicit tandem inductances; absent means the default frequency
    /// assignment `L_k = 1 / (C_k B_kk)`.
    inductance: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioConfig {
    name: String,
    source: HamiltonianConfig,
    target: Option<HamiltonianConfig>,
    /// Initial state entries as `[re, im]` pairs, stamped at the grid start.
    initial_state: Option<Vec<[f64; 2]>>,
    grid: GridConfig,
    #[serde(default)]
    synthesis: SynthesisConfig,
    output_dir: Option<String>,
    seed: Option<u64>,
    #[serde(default)]
    tolerances: ToleranceConfig,
}

/// A validated scenario ready to run.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub source: HamiltonianSpec,
    pub target: Option<HamiltonianSpec>,
    pub initial_state: Option<CVector>,
    pub grid: TimeGrid,
    pub capacitance: Option<RVector>,
    pub inductance: Option<RVector>,
    pub output_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub tolerances: Tolerances,
}

fn matrix_from_config(rows: &[Vec<[f64; 2]>], dim: usize, what: &str) -> Result<CMatrix> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(Error::Config(format!("{what}: matrix must be {dim}x{dim} rows of [re, im] pairs")));
    }
    Ok(CMatrix::from_fn(dim, dim, |j, k| Complex64::new(rows[j][k][0], rows[j][k][1])))
}

fn hamiltonian_from_config(cfg: &HamiltonianConfig, what: &str) -> Result<HamiltonianSpec> {
    let terms = cfg
        .terms
        .iter()
        .enumerate()
        .map(|(i, t)| {
            Ok(Term {
                profile: t.profile.clone(),
                matrix: matrix_from_config(&t.matrix, cfg.dim, &format!("{what} term {i}"))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    HamiltonianSpec::new(cfg.dim, terms, cfg.hermitian)
}

fn positive_vector_from_config(v: &[f64], dim: usize, what: &str) -> Result<RVector> {
    if v.len() != dim {
        return Err(Error::Config(format!("{what}: expected {dim} entries, got {}", v.len())));
    }
    for (k, x) in v.iter().enumerate() {
        if !(x.is_finite() && *x > 0.0) {
            return Err(Error::Config(format!("{what}: entry {} must be positive, got {x}", k + 1)));
        }
    }
    Ok(RVector::from_column_slice(v))
}

impl Scenario {
    fn from_config(cfg: ScenarioConfig) -> Result<Self> {
        if cfg.name.trim().is_empty() {
            return Err(Error::Config("scenario name must be non-empty".into()));
        }
        let source = hamiltonian_from_config(&cfg.source, "source")?;
        let dim = source.dim();
        let target = cfg
            .target
            .as_ref()
            .map(|t| hamiltonian_from_config(t, "target"))
            .transpose()?;
        if let Some(t) = &target {
            if t.dim() != dim {
                return Err(Error::Config(format!(
                    "target dimension {} does not match source dimension {dim}",
                    t.dim()
                )));
            }
        }
        if cfg.grid.steps < 2 {
            return Err(Error::Config(format!(
                "grid must have at least 2 steps, got {}",
                cfg.grid.steps
            )));
        }
        let grid = TimeGrid::new(cfg.grid.t0, cfg.grid.t1, cfg.grid.steps)?;
        let initial_state = cfg
            .initial_state
            .as_ref()
            .map(|entries| -> Result<CVector> {
                if entries.len() != dim {
                    return Err(Error::Config(format!(
                        "initial state has {} entries for dimension {dim}",
                        entries.len()
                    )));
                }
                let v = CVector::from_fn(dim, |k, _| Complex64::new(entries[k][0], entries[k][1]));
                if v.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                    return Err(Error::Config("initial state entries must be finite".into()));
                }
                Ok(v)
            })
            .transpose()?;
        let capacitance = cfg
            .synthesis
            .capacitance
            .as_ref()
            .map(|v| positive_vector_from_config(v, dim, "capacitance"))
            .transpose()?;
        let inductance = cfg
            .synthesis
            .inductance
            .as_ref()
            .map(|v| positive_vector_from_config(v, dim, "inductance"))
            .transpose()?;
        Ok(Scenario {
            name: cfg.name,
            source,
            target,
            initial_state,
            grid,
            capacitance,
            inductance,
            output_dir: cfg.output_dir.map(PathBuf::from),
            seed: cfg.seed,
            tolerances: cfg.tolerances.resolve()?,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = serde_json::from_str(text)?;
        Scenario::from_config(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Scenario::from_json(&text)
    }

    pub fn dim(&self) -> usize {
        self.source.dim()
    }

    /// Capacitance vector with the unit-capacitance default applied.
    pub fn capacitance_or_default(&self) -> RVector {
        self.capacitance
            .clone()
            .unwrap_or_else(|| RVector::from_element(self.dim(), 1.0))
    }

    /// Synthesis policy implied by the configuration: explicit inductances
    /// when given, otherwise the default frequency assignment.
    pub fn synthesis_policy(&self) -> SynthesisPolicy {
        match &self.inductance {
            Some(l) => SynthesisPolicy::ExplicitInductance(l.clone()),
            None => SynthesisPolicy::DefaultFrequencies,
        }
    }
}
