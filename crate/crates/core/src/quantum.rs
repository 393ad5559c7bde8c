//! Finite-dimensional quantum systems and their Schrodinger dynamics.
//!
//! A Hamiltonian is a finite sum of profile-weighted constant matrices,
//! `H(t) = sum_k f_k(t) H_k`, evaluated exactly at any time. States and
//! propagators are integrated with the shared fixed-step RK4 driver
//! (`i d_t psi = H psi`, natural units), so trajectories are deterministic
//! for fixed inputs.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::linalg::{self, CMatrix, CVector};
use crate::ode;

/// Scalar time profile with exact evaluation and antiderivative.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Profile {
    Const { value: f64 },
    /// `sum_k coeffs[k] * t^k`
    Poly { coeffs: Vec<f64> },
    /// `amplitude * cos(omega * t + phase)`
    Cos { amplitude: f64, omega: f64, phase: f64 },
}

impl Profile {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Profile::Const { value } => *value,
            Profile::Poly { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c),
            Profile::Cos { amplitude, omega, phase } => amplitude * (omega * t + phase).cos(),
        }
    }

    /// Exact `int_a^b f(t) dt`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        match self {
            Profile::Const { value } => value * (b - a),
            Profile::Poly { coeffs } => {
                let anti = |t: f64| {
                    coeffs
                        .iter()
                        .enumerate()
                        .map(|(k, c)| c * t.powi(k as i32 + 1) / (k as f64 + 1.0))
                        .sum::<f64>()
                };
                anti(b) - anti(a)
            }
            Profile::Cos { amplitude, omega, phase } => {
                if *omega == 0.0 {
                    amplitude * phase.cos() * (b - a)
                } else {
                    amplitude / omega * ((omega * b + phase).sin() - (omega * a + phase).sin())
                }
            }
        }
    }

    /// `Some(c)` when the profile is the constant `c` for all t.
    pub fn constant_value(&self) -> Option<f64> {
        match self {
            Profile::Const { value } => Some(*value),
            Profile::Poly { coeffs } => {
                if coeffs.iter().skip(1).all(|c| *c == 0.0) {
                    Some(coeffs.first().copied().unwrap_or(0.0))
                } else {
                    None
                }
            }
            Profile::Cos { amplitude, omega, phase } => {
                if *amplitude == 0.0 {
                    Some(0.0)
                } else if *omega == 0.0 {
                    Some(amplitude * phase.cos())
                } else {
                    None
                }
            }
        }
    }

    fn is_finite(&self) -> bool {
        match self {
            Profile::Const { value } => value.is_finite(),
            Profile::Poly { coeffs } => coeffs.iter().all(|c| c.is_finite()),
            Profile::Cos { amplitude, omega, phase } => {
                amplitude.is_finite() && omega.is_finite() && phase.is_finite()
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct Term {
    pub profile: Profile,
    pub matrix: CMatrix,
}

/// Time-dependent Hamiltonian `H(t) = sum_k f_k(t) H_k`.
///
/// `hermitian_hint` is a declaration, not a computation: when set, every
/// evaluation re-checks `max |H - H^dagger| <= 1e-12` and a violation is an
/// error. Non-Hermitian specs are accepted with the hint unset.
#[derive(Clone, Debug)]
pub struct HamiltonianSpec {
    dim: usize,
    terms: Vec<Term>,
    hermitian_hint: bool,
}

/// Tolerance for the lazy hermiticity verification of declared-Hermitian specs.
pub const HERMITICITY_TOL: f64 = 1e-12;

impl HamiltonianSpec {
    pub fn new(dim: usize, terms: Vec<Term>, hermitian_hint: bool) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Dimension("Hamiltonian dimension must be at least 1".into()));
        }
        for (k, term) in terms.iter().enumerate() {
            if term.matrix.nrows() != dim || term.matrix.ncols() != dim {
                return Err(Error::Dimension(format!(
                    "term {k} matrix is {}x{}, spec dimension is {dim}",
                    term.matrix.nrows(),
                    term.matrix.ncols()
                )));
            }
            if !linalg::all_finite(&term.matrix) || !term.profile.is_finite() {
                return Err(Error::Config(format!("term {k} contains non-finite entries")));
            }
        }
        Ok(HamiltonianSpec { dim, terms, hermitian_hint })
    }

    /// Constant Hamiltonian from a single matrix.
    pub fn constant(matrix: CMatrix, hermitian_hint: bool) -> Result<Self> {
        let dim = matrix.nrows();
        Self::new(
            dim,
            vec![Term { profile: Profile::Const { value: 1.0 }, matrix }],
            hermitian_hint,
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn hermitian_hint(&self) -> bool {
        self.hermitian_hint
    }

    /// Evaluation without the hermiticity verification; used by the checker
    /// itself and by diagnostics that want the defect rather than an error.
    pub fn eval_unchecked(&self, t: f64) -> CMatrix {
        let mut h = CMatrix::zeros(self.dim, self.dim);
        for term in &self.terms {
            h += &term.matrix * Complex64::new(term.profile.eval(t), 0.0);
        }
        h
    }

    /// `H(t)`, verifying the Hermitian declaration lazily.
    pub fn eval(&self, t: f64) -> Result<CMatrix> {
        let h = self.eval_unchecked(t);
        if self.hermitian_hint {
            let defect = linalg::hermiticity_defect(&h);
            if defect > HERMITICITY_TOL {
                return Err(Error::Hermiticity { t, defect });
            }
        }
        Ok(h)
    }

    /// `Some(H)` when the spec is constant in time.
    pub fn constant_matrix(&self) -> Option<CMatrix> {
        let mut h = CMatrix::zeros(self.dim, self.dim);
        for term in &self.terms {
            h += &term.matrix * Complex64::new(term.profile.constant_value()?, 0.0);
        }
        Some(h)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|t| t.profile.constant_value().is_some())
    }

    /// True when the family `{H(t)}` commutes with itself at all times, so a
    /// single exponential of the exact time integral solves the dynamics:
    /// constant specs and single-term `f(t) H_0` specs.
    pub fn commuting_family(&self) -> bool {
        self.is_constant() || self.terms.len() <= 1
    }

    /// Exact `int_a^b H(t) dt` (profiles have closed-form antiderivatives).
    pub fn exact_time_integral(&self, a: f64, b: f64) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for term in &self.terms {
            m += &term.matrix * Complex64::new(term.profile.integral(a, b), 0.0);
        }
        m
    }
}

/// State `psi` at a time stamp. The norm is reported where useful but never
/// forced to 1, since non-Hermitian generators are allowed.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    pub time: f64,
    pub data: CVector,
}

impl StateVector {
    pub fn new(time: f64, data: CVector) -> Result<Self> {
        if !time.is_finite() || !data.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::Config("state vector entries must be finite".into()));
        }
        Ok(StateVector { time, data })
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn norm(&self) -> f64 {
        self.data.norm()
    }
}

/// Standard basis vector `e_k`.
pub fn basis_state(dim: usize, k: usize) -> CVector {
    let mut v = CVector::zeros(dim);
    v[k] = Complex64::new(1.0, 0.0);
    v
}

/// Evolution operators `U(t_j, t0)` sampled on a grid.
#[derive(Clone, Debug)]
pub struct PropagatorGrid {
    grid: TimeGrid,
    u: Vec<CMatrix>,
}

impl PropagatorGrid {
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.u[0].nrows()
    }

    /// `U(t_j, t0)`.
    pub fn at_node(&self, j: usize) -> &CMatrix {
        &self.u[j]
    }

    /// `U(t_i, t_j) = U(t_i, t0) U(t_j, t0)^{-1}`, defined while the second
    /// factor is nonsingular (always, for Hermitian generators).
    pub fn between(&self, i: usize, j: usize) -> Result<CMatrix> {
        if i >= self.u.len() || j >= self.u.len() {
            return Err(Error::GridMismatch(format!(
                "propagator node index out of range: ({i}, {j}) with {} nodes",
                self.u.len()
            )));
        }
        let inv = linalg::try_inverse(&self.u[j], "propagator base point")?;
        Ok(&self.u[i] * inv)
    }

    pub fn unitarity_defect_max(&self) -> f64 {
        self.u.iter().map(linalg::unitarity_defect).fold(0.0, f64::max)
    }
}

pub(crate) fn check_time_alignment(expected: f64, got: f64, what: &str) -> Result<()> {
    if (got - expected).abs() > 1e-9 * (1.0 + expected.abs()) {
        return Err(Error::GridMismatch(format!(
            "{what} time stamp {got} does not match grid node {expected}"
        )));
    }
    Ok(())
}

/// `H(t)` exactly as specified.
pub fn eval_hamiltonian(spec: &HamiltonianSpec, t: f64) -> Result<CMatrix> {
    if !t.is_finite() {
        return Err(Error::Config(format!("evaluation time must be finite, got {t}")));
    }
    spec.eval(t)
}

/// Integrates `i d_t psi = H(t) psi` across the grid, returning the state at
/// every node.
pub fn evolve_state(
    spec: &HamiltonianSpec,
    psi0: &StateVector,
    grid: &TimeGrid,
) -> Result<Vec<StateVector>> {
    if psi0.dim() != spec.dim() {
        return Err(Error::Dimension(format!(
            "state dimension {} does not match Hamiltonian dimension {}",
            psi0.dim(),
            spec.dim()
        )));
    }
    check_time_alignment(grid.t0(), psi0.time, "initial state")?;
    let path = ode::rk4_path(psi0.data.clone(), grid, "state evolution", |t, psi: &CVector| {
        let h = spec.eval(t)?;
        Ok(h * psi * Complex64::new(0.0, -1.0))
    })?;
    Ok(path
        .into_iter()
        .enumerate()
        .map(|(j, data)| StateVector { time: grid.node(j), data })
        .collect())
}

/// Integrates the matrix ODE `i d_t U = H(t) U`, `U(t0, t0) = I`, with the
/// same scheme as `evolve_state`; column j of `U(t_j, t0)` reproduces
/// `evolve_state` started from the basis vector `e_j`.
pub fn propagator(spec: &HamiltonianSpec, grid: &TimeGrid) -> Result<PropagatorGrid> {
    let n = spec.dim();
    let u = ode::rk4_path(linalg::identity(n), grid, "propagator", |t, m: &CMatrix| {
        let h = spec.eval(t)?;
        Ok(h * m * Complex64::new(0.0, -1.0))
    })?;
    Ok(PropagatorGrid { grid: grid.clone(), u })
}

/// Max over grid nodes of `max |H(t) - H(t)^dagger|`.
pub fn hermiticity_check(spec: &HamiltonianSpec, grid: &TimeGrid) -> f64 {
    (0..grid.num_nodes())
        .map(|j| linalg::hermiticity_defect(&spec.eval_unchecked(grid.node(j))))
        .fold(0.0, f64::max)
}

/// Max node-wise departure of the state norm from its initial value.
pub fn norm_drift(path: &[StateVector]) -> f64 {
    if path.is_empty() {
        return 0.0;
    }
    let n0 = path[0].norm();
    path.iter().map(|s| (s.norm() - n0).abs()).fold(0.0, f64::max)
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
        ],
    )
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, 0.0),
        ],
    )
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(-1.0, 0.0),
        ],
    )
}
