//! Realification of complex Schrodinger dynamics.
//!
//! Splitting `psi = phi1 + i phi2` and `H = H1 + i H2` (entrywise real and
//! imaginary parts), the equation `i d_t psi = H psi` becomes the coupled
//! real first-order system
//!
//! ```text
//! d_t phi1 =  H2 phi1 + H1 phi2
//! d_t phi2 = -H1 phi1 + H2 phi2
//! ```
//!
//! i.e. `d_t (phi1, phi2) = G (phi1, phi2)` with block generator
//! `G = [[H2, H1], [-H1, H2]]`. The direction of these signs is pinned by
//! the requirement that the real paths reproduce the real and imaginary
//! parts of the complex integration exactly (see the oracle tests below).
//!
//! When `H1` is invertible, eliminating one component yields a second-order
//! system satisfied by `phi1` and `phi2` separately:
//!
//! ```text
//! phi_ddot + Aq phi_dot + Bq phi = 0,
//! Aq = -(H2 + H1 H2 H1^-1),   Bq = H1^2 + H1 H2 H1^-1 H2.
//! ```
//!
//! Both components obey the same equation, so initial data for either can be
//! propagated through it. `H1` singular is a reported condition, not an
//! error: the coupled form is always available, the decoupled one is not.
//!
//! The decoupled form presumes a generator frozen at a single evaluation
//! time; time dependence is handled upstream by gauge-transforming to a
//! constant generator first.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::linalg::{self, CVector, RMatrix, RVector};
use crate::ode;
use crate::quantum::{self, HamiltonianSpec, StateVector};

/// Real image of a state: `phi1 = Re psi`, `phi2 = Im psi`.
#[derive(Clone, Debug, PartialEq)]
pub struct RealState {
    pub phi1: RVector,
    pub phi2: RVector,
    pub time: f64,
}

impl RealState {
    pub fn new(time: f64, phi1: RVector, phi2: RVector) -> Result<Self> {
        if phi1.len() != phi2.len() {
            return Err(Error::Dimension(format!(
                "real state components have lengths {} and {}",
                phi1.len(),
                phi2.len()
            )));
        }
        if !time.is_finite() || !linalg::all_finite_rvec(&phi1) || !linalg::all_finite_rvec(&phi2) {
            return Err(Error::NonFinite("real state entries must be finite".into()));
        }
        Ok(RealState { phi1, phi2, time })
    }

    pub fn dim(&self) -> usize {
        self.phi1.len()
    }

    /// `|phi1|^2 + |phi2|^2`, the squared norm of the complex state.
    pub fn norm_squared(&self) -> f64 {
        self.phi1.norm_squared() + self.phi2.norm_squared()
    }
}

/// Split of a frozen generator into its real dynamics.
#[derive(Clone, Debug)]
pub struct RealSystem {
    dim: usize,
    h1: RMatrix,
    h2: RMatrix,
    coupled: RMatrix,
    aq: Option<RMatrix>,
    bq: Option<RMatrix>,
    decoupled_valid: bool,
    diagnostic: Option<String>,
}

impl RealSystem {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entrywise real part of the generator.
    pub fn h1(&self) -> &RMatrix {
        &self.h1
    }

    /// Entrywise imaginary part of the generator.
    pub fn h2(&self) -> &RMatrix {
        &self.h2
    }

    /// Block generator `[[H2, H1], [-H1, H2]]` of the coupled first-order
    /// system on stacked `(phi1, phi2)`.
    pub fn coupled_generator(&self) -> &RMatrix {
        &self.coupled
    }

    pub fn aq(&self) -> Option<&RMatrix> {
        self.aq.as_ref()
    }

    pub fn bq(&self) -> Option<&RMatrix> {
        self.bq.as_ref()
    }

    /// True when the second-order coefficients exist (`H1` invertible).
    pub fn decoupled_valid(&self) -> bool {
        self.decoupled_valid
    }

    /// Human-readable reason the decoupled form is unavailable.
    pub fn diagnostic(&self) -> Option<&str> {
        self.diagnostic.as_deref()
    }

    fn decoupled_coefficients(&self, context: &str) -> Result<(&RMatrix, &RMatrix)> {
        match (&self.aq, &self.bq) {
            (Some(a), Some(b)) => Ok((a, b)),
            _ => Err(Error::DecoupledUnavailable(format!(
                "{context}: second-order coefficients are unavailable ({}); use the coupled first-order form instead",
                self.diagnostic.as_deref().unwrap_or("decoupling was not requested")
            ))),
        }
    }
}

/// `psi -> (Re psi, Im psi)` at the same time stamp. Exact.
pub fn decomplexify(psi: &StateVector) -> RealState {
    let n = psi.dim();
    RealState {
        phi1: RVector::from_fn(n, |k, _| psi.data[k].re),
        phi2: RVector::from_fn(n, |k, _| psi.data[k].im),
        time: psi.time,
    }
}

/// `(phi1, phi2) -> phi1 + i phi2`. Exact inverse of [`decomplexify`].
pub fn recomplexify(state: &RealState) -> StateVector {
    let n = state.dim();
    StateVector {
        time: state.time,
        data: CVector::from_fn(n, |k, _| Complex64::new(state.phi1[k], state.phi2[k])),
    }
}

/// Splits `H(t_eval)` into its real dynamics. The coupled generator is
/// always produced; the second-order coefficients are computed when
/// `want_decoupled` is set and `H1` is invertible. A singular `H1` is
/// reported through `decoupled_valid = false` plus a diagnostic, never as an
/// error.
pub fn build_real_system(
    spec: &HamiltonianSpec,
    t_eval: f64,
    want_decoupled: bool,
) -> Result<RealSystem> {
    let h = quantum::eval_hamiltonian(spec, t_eval)?;
    let n = spec.dim();
    let h1 = linalg::real_part(&h);
    let h2 = linalg::imag_part(&h);
    let mut coupled = RMatrix::zeros(2 * n, 2 * n);
    coupled.view_mut((0, 0), (n, n)).copy_from(&h2);
    coupled.view_mut((0, n), (n, n)).copy_from(&h1);
    coupled.view_mut((n, 0), (n, n)).copy_from(&(-&h1));
    coupled.view_mut((n, n), (n, n)).copy_from(&h2);

    let mut sys = RealSystem {
        dim: n,
        h1,
        h2,
        coupled,
        aq: None,
        bq: None,
        decoupled_valid: false,
        diagnostic: None,
    };
    if !want_decoupled {
        return Ok(sys);
    }
    let rc = linalg::rcond(&linalg::complexify(&sys.h1));
    if rc <= linalg::RCOND_FLOOR {
        sys.diagnostic = Some(format!(
            "real part of the generator is singular (rcond = {rc:.3e}); the decoupled second-order form does not exist"
        ));
        return Ok(sys);
    }
    let h1_inv = linalg::try_inverse_real(&sys.h1, "decoupling the realified system")?;
    let conj = &sys.h1 * &sys.h2 * &h1_inv;
    sys.aq = Some(-(&sys.h2 + &conj));
    sys.bq = Some(&sys.h1 * &sys.h1 + conj * &sys.h2);
    sys.decoupled_valid = true;
    Ok(sys)
}

/// Integrates the coupled first-order system `d_t (phi1, phi2) = G (phi1,
/// phi2)` across the grid.
pub fn evolve_coupled(
    sys: &RealSystem,
    state0: &RealState,
    grid: &TimeGrid,
) -> Result<Vec<RealState>> {
    let n = sys.dim();
    if state0.dim() != n {
        return Err(Error::Dimension(format!(
            "initial state dimension {} does not match system dimension {n}",
            state0.dim()
        )));
    }
    quantum::check_time_alignment(grid.t0(), state0.time, "initial real state")?;
    let mut y0 = RVector::zeros(2 * n);
    y0.rows_mut(0, n).copy_from(&state0.phi1);
    y0.rows_mut(n, n).copy_from(&state0.phi2);
    let g = sys.coupled_generator();
    let path = ode::rk4_path(y0, grid, "coupled real evolution", |_t, y: &RVector| Ok(g * y))?;
    Ok(path
        .into_iter()
        .enumerate()
        .map(|(j, y)| RealState {
            phi1: y.rows(0, n).into_owned(),
            phi2: y.rows(n, n).into_owned(),
            time: grid.node(j),
        })
        .collect())
}

/// Integrates `phi_ddot + Aq phi_dot + Bq phi = 0` from one component's
/// initial data. Valid for either component, since both satisfy the same
/// equation.
pub fn evolve_decoupled(
    sys: &RealSystem,
    phi0: &RVector,
    phidot0: &RVector,
    grid: &TimeGrid,
) -> Result<Vec<(RVector, RVector)>> {
    let (aq, bq) = sys.decoupled_coefficients("decoupled evolution")?;
    if phi0.len() != sys.dim() || phidot0.len() != sys.dim() {
        return Err(Error::Dimension(format!(
            "initial data dimensions ({}, {}) do not match system dimension {}",
            phi0.len(),
            phidot0.len(),
            sys.dim()
        )));
    }
    ode::rk4_second_order(aq, bq, phi0, phidot0, grid, "decoupled real evolution")
}

/// Initial data `(phi1, phidot1, phi2, phidot2)` for the second-order system
/// from a quantum state, using the coupled equations at the initial time:
/// `phidot1 = H2 phi1 + H1 phi2`, `phidot2 = -H1 phi1 + H2 phi2`.
pub fn initial_conditions_from_quantum(
    sys: &RealSystem,
    psi0: &StateVector,
) -> Result<(RVector, RVector, RVector, RVector)> {
    if psi0.dim() != sys.dim() {
        return Err(Error::Dimension(format!(
            "state dimension {} does not match system dimension {}",
            psi0.dim(),
            sys.dim()
        )));
    }
    let real = decomplexify(psi0);
    let phidot1 = sys.h2() * &real.phi1 + sys.h1() * &real.phi2;
    let phidot2 = -(sys.h1() * &real.phi1) + sys.h2() * &real.phi2;
    Ok((real.phi1, phidot1, real.phi2, phidot2))
}

/// Largest centered-difference residual of `phi_ddot + Aq phi_dot + Bq phi`
/// along a sampled path, normalized by `max(1, |Bq|)`. Interior nodes only.
pub fn second_order_residual(
    sys: &RealSystem,
    path: &[(RVector, RVector)],
    grid: &TimeGrid,
) -> Result<f64> {
    let (aq, bq) = sys.decoupled_coefficients("second-order residual")?;
    if path.len() != grid.num_nodes() {
        return Err(Error::GridMismatch(format!(
            "path has {} samples for {} grid nodes",
            path.len(),
            grid.num_nodes()
        )));
    }
    let h = grid.h();
    let scale = linalg::max_abs_real(bq).max(1.0);
    let mut worst: f64 = 0.0;
    for j in 1..path.len().saturating_sub(1) {
        let ddot = (&path[j + 1].0 - &path[j].0 * 2.0 + &path[j - 1].0) / (h * h);
        let res = ddot + aq * &path[j].1 + bq * &path[j].0;
        worst = worst.max(linalg::max_abs_rvec(&res));
    }
    Ok(worst / scale)
}

/// Convenience stack of a real state into a single `2n` vector
/// `(phi1, phi2)`.
pub fn stack_state(state: &RealState) -> DVector<f64> {
    let n = state.dim();
    let mut y = DVector::zeros(2 * n);
    y.rows_mut(0, n).copy_from(&state.phi1);
    y.rows_mut(n, n).copy_from(&state.phi2);
    y
}
