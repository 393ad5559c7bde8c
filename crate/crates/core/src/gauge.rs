//! Gauge transformations between time-dependent generators.
//!
//! A time-dependent invertible frame `omega(t)` acts on a generator by
//!
//! ```text
//! Omega_omega(H) = omega H omega^-1 + i omega_dot omega^-1
//! ```
//!
//! and `omega` connects a source generator `H` to a target `H'` exactly when
//! it solves the intertwining equation `i omega_dot = H' omega - omega H`.
//! Two one-sided solutions always exist and multiply into a connector:
//!
//! * `omega1` with `i d_t omega1 = H' omega1` (source term absent),
//! * `omega2` with `i d_t omega2 = -omega2 H` (target term absent),
//! * `omega = omega1 omega2` solves the full equation by the product rule.
//!
//! Solutions are stored as node-aligned sample paths of `omega` and
//! `omega_dot` on a uniform grid. `omega_dot` is taken from the defining
//! right-hand side, so the residual of the intertwining equation is exact by
//! construction up to integrator error in `omega` itself; the honest internal
//! consistency check is [`GaugeSolution::derivative_consistency`], which
//! compares the stored derivative against a finite difference of the stored
//! path and is sensitive to any mismatch between the two.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::linalg::{self, CMatrix};
use crate::ode;
use crate::quantum::{self, HamiltonianSpec, PropagatorGrid, StateVector};

/// A frame whose unitarity defect stays below this bound at every node is
/// classified unitary, which switches inverse-dependent operations to the
/// adjoint.
pub const UNITARY_CLASSIFY_TOL: f64 = 1e-9;

/// How a gauge solution was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GaugeBackend {
    /// Single exponential of the exact time integral (commuting family).
    MagnusConstant,
    /// Runge-Kutta integration of the defining ODE.
    Rk4Integrated,
    /// Product of two closed-form one-sided solutions.
    AnalyticProduct,
    /// Derived from other solutions (composition, inversion, mixed product).
    Composed,
}

impl GaugeBackend {
    pub fn name(self) -> &'static str {
        match self {
            GaugeBackend::MagnusConstant => "magnus_constant",
            GaugeBackend::Rk4Integrated => "rk4_integrated",
            GaugeBackend::AnalyticProduct => "analytic_product",
            GaugeBackend::Composed => "composed",
        }
    }
}

/// Source and target generators of equal dimension.
#[derive(Clone, Debug)]
pub struct GaugePair {
    pub source: HamiltonianSpec,
    pub target: HamiltonianSpec,
}

impl GaugePair {
    pub fn new(source: HamiltonianSpec, target: HamiltonianSpec) -> Result<Self> {
        if source.dim() != target.dim() {
            return Err(Error::Dimension(format!(
                "source dimension {} does not match target dimension {}",
                source.dim(),
                target.dim()
            )));
        }
        Ok(GaugePair { source, target })
    }

    pub fn dim(&self) -> usize {
        self.source.dim()
    }

    /// The same pair with the roles of source and target exchanged.
    pub fn swapped(&self) -> GaugePair {
        GaugePair { source: self.target.clone(), target: self.source.clone() }
    }
}

/// Node-aligned samples of an invertible frame and its time derivative.
///
/// Construction validates shape, finiteness and pointwise invertibility
/// (rcond above the singularity floor); a frame that loses invertibility
/// anywhere on the grid is rejected outright rather than flagged.
#[derive(Clone, Debug)]
pub struct GaugeSolution {
    grid: TimeGrid,
    dim: usize,
    omega: Vec<CMatrix>,
    omega_dot: Vec<CMatrix>,
    backend: GaugeBackend,
    unitary: bool,
}

impl GaugeSolution {
    pub fn new(
        grid: TimeGrid,
        omega: Vec<CMatrix>,
        omega_dot: Vec<CMatrix>,
        backend: GaugeBackend,
        context: &str,
    ) -> Result<Self> {
        let nodes = grid.num_nodes();
        if omega.len() != nodes || omega_dot.len() != nodes {
            return Err(Error::GridMismatch(format!(
                "{context}: frame has {} samples and {} derivative samples for {nodes} grid nodes",
                omega.len(),
                omega_dot.len()
            )));
        }
        let dim = omega[0].nrows();
        if dim == 0 {
            return Err(Error::Dimension(format!("{context}: frame dimension must be at least 1")));
        }
        let mut max_defect: f64 = 0.0;
        for (j, (w, wd)) in omega.iter().zip(&omega_dot).enumerate() {
            if w.nrows() != dim || w.ncols() != dim || wd.nrows() != dim || wd.ncols() != dim {
                return Err(Error::Dimension(format!(
                    "{context}: sample at node {j} is not {dim}x{dim}"
                )));
            }
            if !linalg::all_finite(w) || !linalg::all_finite(wd) {
                return Err(Error::NonFinite(format!("{context}: non-finite frame at node {j}")));
            }
            let rc = linalg::rcond(w);
            if rc <= linalg::RCOND_FLOOR {
                return Err(Error::Singular {
                    context: format!("{context}: frame at node {j} (t = {})", grid.node(j)),
                    rcond: rc,
                });
            }
            max_defect = max_defect.max(linalg::unitarity_defect(w));
        }
        let unitary = max_defect <= UNITARY_CLASSIFY_TOL;
        Ok(GaugeSolution { grid, dim, omega, omega_dot, backend, unitary })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn backend(&self) -> GaugeBackend {
        self.backend
    }

    /// True when every node passed the unitarity classification at
    /// [`UNITARY_CLASSIFY_TOL`].
    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    pub fn omega_at(&self, j: usize) -> &CMatrix {
        &self.omega[j]
    }

    pub fn omega_dot_at(&self, j: usize) -> &CMatrix {
        &self.omega_dot[j]
    }

    pub fn omega(&self) -> &[CMatrix] {
        &self.omega
    }

    pub fn omega_dot(&self) -> &[CMatrix] {
        &self.omega_dot
    }

    /// Largest unitarity defect over the grid (0 for exactly unitary frames).
    pub fn unitarity_defect(&self) -> f64 {
        self.omega.iter().map(linalg::unitarity_defect).fold(0.0, f64::max)
    }

    /// Relative disagreement between the stored derivative and a second-order
    /// finite difference of the stored path:
    /// `max_j |FD_j - omega_dot_j| / max(1, max_j |omega_dot_j|)`.
    ///
    /// The stored derivative comes from the defining right-hand side, so this
    /// is the check that actually ties the path to its derivative; it is
    /// limited by the `O(h^2)` truncation of the difference stencil.
    pub fn derivative_consistency(&self) -> f64 {
        let n = self.omega.len();
        let h = self.grid.h();
        let scale = self
            .omega_dot
            .iter()
            .map(linalg::max_abs)
            .fold(1.0_f64, f64::max);
        let mut worst: f64 = 0.0;
        for j in 0..n {
            let fd = if n == 2 {
                (&self.omega[1] - &self.omega[0]) / Complex64::new(h, 0.0)
            } else if j == 0 {
                (&self.omega[2] * Complex64::new(-1.0, 0.0) + &self.omega[1] * Complex64::new(4.0, 0.0)
                    - &self.omega[0] * Complex64::new(3.0, 0.0))
                    / Complex64::new(2.0 * h, 0.0)
            } else if j == n - 1 {
                (&self.omega[n - 1] * Complex64::new(3.0, 0.0)
                    - &self.omega[n - 2] * Complex64::new(4.0, 0.0)
                    + &self.omega[n - 3])
                    / Complex64::new(2.0 * h, 0.0)
            } else {
                (&self.omega[j + 1] - &self.omega[j - 1]) / Complex64::new(2.0 * h, 0.0)
            };
            worst = worst.max(linalg::max_abs(&(fd - &self.omega_dot[j])));
        }
        worst / scale
    }
}

/// `Omega_omega(H) = omega H omega^-1 + i omega_dot omega^-1` for a single
/// sample of the frame.
pub fn apply_gauge_map(omega: &CMatrix, omega_dot: &CMatrix, h: &CMatrix) -> Result<CMatrix> {
    let n = omega.nrows();
    if omega.ncols() != n
        || omega_dot.nrows() != n
        || omega_dot.ncols() != n
        || h.nrows() != n
        || h.ncols() != n
    {
        return Err(Error::Dimension(
            "gauge map needs square frame, derivative and generator of one dimension".into(),
        ));
    }
    let inv = linalg::try_inverse(omega, "gauge map application")?;
    Ok(omega * h * &inv + omega_dot * inv * Complex64::new(0.0, 1.0))
}

/// The mapped generator `Omega_omega(H(t_j))` at every node.
pub fn apply_gauge_path(g: &GaugeSolution, source: &HamiltonianSpec) -> Result<Vec<CMatrix>> {
    if source.dim() != g.dim() {
        return Err(Error::Dimension(format!(
            "generator dimension {} does not match frame dimension {}",
            source.dim(),
            g.dim()
        )));
    }
    (0..g.grid().num_nodes())
        .map(|j| {
            let h = source.eval(g.grid().node(j))?;
            apply_gauge_map(g.omega_at(j), g.omega_dot_at(j), &h)
        })
        .collect()
}

/// Largest node-wise residual of `i omega_dot - (H' omega - omega H)`.
pub fn intertwining_residual(g: &GaugeSolution, pair: &GaugePair) -> Result<f64> {
    if pair.dim() != g.dim() {
        return Err(Error::Dimension(format!(
            "pair dimension {} does not match frame dimension {}",
            pair.dim(),
            g.dim()
        )));
    }
    let mut worst: f64 = 0.0;
    for j in 0..g.grid().num_nodes() {
        let t = g.grid().node(j);
        let hs = pair.source.eval(t)?;
        let ht = pair.target.eval(t)?;
        let res = g.omega_dot_at(j) * Complex64::new(0.0, 1.0) - (&ht * g.omega_at(j) - g.omega_at(j) * hs);
        worst = worst.max(linalg::max_abs(&res));
    }
    Ok(worst)
}

/// Largest node-wise deviation `|Omega_omega(H(t_j)) - H'(t_j)|`.
pub fn mapped_deviation(g: &GaugeSolution, pair: &GaugePair) -> Result<f64> {
    let mapped = apply_gauge_path(g, &pair.source)?;
    let mut worst: f64 = 0.0;
    for (j, m) in mapped.iter().enumerate() {
        let ht = pair.target.eval(g.grid().node(j))?;
        worst = worst.max(linalg::max_abs(&(m - ht)));
    }
    Ok(worst)
}

fn validated_seed(seed: Option<&CMatrix>, dim: usize, context: &str) -> Result<CMatrix> {
    match seed {
        None => Ok(linalg::identity(dim)),
        Some(s) => {
            if s.nrows() != dim || s.ncols() != dim {
                return Err(Error::Dimension(format!(
                    "{context}: seed is {}x{}, expected {dim}x{dim}",
                    s.nrows(),
                    s.ncols()
                )));
            }
            if !linalg::all_finite(s) {
                return Err(Error::NonFinite(format!("{context}: seed has non-finite entries")));
            }
            let rc = linalg::rcond(s);
            if rc <= linalg::RCOND_FLOOR {
                return Err(Error::Singular { context: format!("{context}: seed frame"), rcond: rc });
            }
            Ok(s.clone())
        }
    }
}

/// Solves `i d_t omega1 = H'(t) omega1`, `omega1(t0) = seed` (identity when
/// `None`). Commuting families get the closed form
/// `exp(-i int_{t0}^{t} H') seed`; everything else is integrated with the
/// shared fourth-order scheme. The stored derivative is the right-hand side
/// evaluated on the solved path.
pub fn solve_omega1(
    target: &HamiltonianSpec,
    grid: &TimeGrid,
    seed: Option<&CMatrix>,
) -> Result<GaugeSolution> {
    let dim = target.dim();
    let seed = validated_seed(seed, dim, "one-sided target solve")?;
    let (omega, backend) = if target.commuting_family() {
        let mut omega = Vec::with_capacity(grid.num_nodes());
        for j in 0..grid.num_nodes() {
            let k = target.exact_time_integral(grid.t0(), grid.node(j));
            omega.push(linalg::expm(&(k * Complex64::new(0.0, -1.0))) * &seed);
        }
        (omega, GaugeBackend::MagnusConstant)
    } else {
        let path = ode::rk4_path(seed, grid, "one-sided target solve", |t, w: &CMatrix| {
            Ok(target.eval(t)? * w * Complex64::new(0.0, -1.0))
        })?;
        (path, GaugeBackend::Rk4Integrated)
    };
    let omega_dot = omega
        .iter()
        .enumerate()
        .map(|(j, w)| Ok(target.eval(grid.node(j))? * w * Complex64::new(0.0, -1.0)))
        .collect::<Result<Vec<_>>>()?;
    GaugeSolution::new(grid.clone(), omega, omega_dot, backend, "one-sided target solve")
}

/// Solves `i d_t omega2 = -omega2 H(t)`, `omega2(t0) = seed` (identity when
/// `None`). Commuting families get `seed exp(+i int_{t0}^{t} H)`.
pub fn solve_omega2(
    source: &HamiltonianSpec,
    grid: &TimeGrid,
    seed: Option<&CMatrix>,
) -> Result<GaugeSolution> {
    let dim = source.dim();
    let seed = validated_seed(seed, dim, "one-sided source solve")?;
    let (omega, backend) = if source.commuting_family() {
        let mut omega = Vec::with_capacity(grid.num_nodes());
        for j in 0..grid.num_nodes() {
            let k = source.exact_time_integral(grid.t0(), grid.node(j));
            omega.push(&seed * linalg::expm(&(k * Complex64::new(0.0, 1.0))));
        }
        (omega, GaugeBackend::MagnusConstant)
    } else {
        let path = ode::rk4_path(seed, grid, "one-sided source solve", |t, w: &CMatrix| {
            Ok(w * source.eval(t)? * Complex64::new(0.0, 1.0))
        })?;
        (path, GaugeBackend::Rk4Integrated)
    };
    let omega_dot = omega
        .iter()
        .enumerate()
        .map(|(j, w)| Ok(w * source.eval(grid.node(j))? * Complex64::new(0.0, 1.0)))
        .collect::<Result<Vec<_>>>()?;
    GaugeSolution::new(grid.clone(), omega, omega_dot, backend, "one-sided source solve")
}

/// Connector for a pair: `omega = omega1 omega2` with the product-rule
/// derivative, which solves `i omega_dot = H' omega - omega H`. The seed is
/// the value of the composite frame at `t0` (applied to the target-side
/// factor). When both factors are closed-form exponentials the result is
/// tagged [`GaugeBackend::AnalyticProduct`].
pub fn transitive_solution(
    pair: &GaugePair,
    grid: &TimeGrid,
    seed: Option<&CMatrix>,
) -> Result<GaugeSolution> {
    let g1 = solve_omega1(&pair.target, grid, seed)?;
    let g2 = solve_omega2(&pair.source, grid, None)?;
    let backend = if g1.backend() == GaugeBackend::MagnusConstant
        && g2.backend() == GaugeBackend::MagnusConstant
    {
        GaugeBackend::AnalyticProduct
    } else {
        GaugeBackend::Composed
    };
    product_solution(&g1, &g2, backend, "transitive connector")
}

fn product_solution(
    left: &GaugeSolution,
    right: &GaugeSolution,
    backend: GaugeBackend,
    context: &str,
) -> Result<GaugeSolution> {
    if !left.grid().same_layout(right.grid()) {
        return Err(Error::GridMismatch(format!("{context}: factor grids differ")));
    }
    if left.dim() != right.dim() {
        return Err(Error::Dimension(format!(
            "{context}: factor dimensions {} and {} differ",
            left.dim(),
            right.dim()
        )));
    }
    let n = left.grid().num_nodes();
    let mut omega = Vec::with_capacity(n);
    let mut omega_dot = Vec::with_capacity(n);
    for j in 0..n {
        omega.push(left.omega_at(j) * right.omega_at(j));
        omega_dot.push(
            left.omega_dot_at(j) * right.omega_at(j) + left.omega_at(j) * right.omega_dot_at(j),
        );
    }
    GaugeSolution::new(left.grid().clone(), omega, omega_dot, backend, context)
}

/// Node-wise product `outer(t) inner(t)`; the induced maps compose as
/// `Omega_{outer inner} = Omega_outer after Omega_inner`.
pub fn compose(outer: &GaugeSolution, inner: &GaugeSolution) -> Result<GaugeSolution> {
    product_solution(outer, inner, GaugeBackend::Composed, "frame composition")
}

/// Node-wise inverse frame with derivative
/// `d_t omega^-1 = -omega^-1 omega_dot omega^-1`; its induced map undoes the
/// original one.
pub fn inverse_gauge(g: &GaugeSolution) -> Result<GaugeSolution> {
    let n = g.grid().num_nodes();
    let mut omega = Vec::with_capacity(n);
    let mut omega_dot = Vec::with_capacity(n);
    for j in 0..n {
        let inv = linalg::try_inverse(g.omega_at(j), "frame inversion")?;
        omega_dot.push(&inv * g.omega_dot_at(j) * &inv * Complex64::new(-1.0, 0.0));
        omega.push(inv);
    }
    GaugeSolution::new(g.grid().clone(), omega, omega_dot, GaugeBackend::Composed, "frame inversion")
}

/// Transports a node-aligned state path into the target frame:
/// `psi'(t_j) = omega(t_j) psi(t_j)`.
pub fn map_state(g: &GaugeSolution, path: &[StateVector]) -> Result<Vec<StateVector>> {
    if path.len() != g.grid().num_nodes() {
        return Err(Error::GridMismatch(format!(
            "state path has {} samples for {} grid nodes",
            path.len(),
            g.grid().num_nodes()
        )));
    }
    let mut out = Vec::with_capacity(path.len());
    for (j, psi) in path.iter().enumerate() {
        if psi.dim() != g.dim() {
            return Err(Error::Dimension(format!(
                "state dimension {} does not match frame dimension {}",
                psi.dim(),
                g.dim()
            )));
        }
        quantum::check_time_alignment(g.grid().node(j), psi.time, "state path")?;
        out.push(StateVector { time: psi.time, data: g.omega_at(j) * &psi.data });
    }
    Ok(out)
}

/// Conjugates a propagator into the target frame:
/// `U'(t, s) = omega(t) U(t, s) omega(s)^-1`, with the adjoint in place of
/// the inverse when the frame is classified unitary. The frame and the
/// propagator must live on the same grid.
pub fn conjugate_propagator(
    g: &GaugeSolution,
    u: &PropagatorGrid,
    s_index: usize,
    t_index: usize,
) -> Result<CMatrix> {
    if !g.grid().same_layout(u.grid()) {
        return Err(Error::GridMismatch(
            "frame and propagator grids differ in layout".into(),
        ));
    }
    if g.dim() != u.dim() {
        return Err(Error::Dimension(format!(
            "frame dimension {} does not match propagator dimension {}",
            g.dim(),
            u.dim()
        )));
    }
    let n = g.grid().num_nodes();
    if s_index >= n || t_index >= n {
        return Err(Error::GridMismatch(format!(
            "propagator conjugation indices ({s_index}, {t_index}) out of range for {n} nodes"
        )));
    }
    let u_ts = u.between(t_index, s_index)?;
    let base = if g.is_unitary() {
        g.omega_at(s_index).adjoint()
    } else {
        linalg::try_inverse(g.omega_at(s_index), "propagator conjugation base point")?
    };
    Ok(g.omega_at(t_index) * u_ts * base)
}

/// The identity frame on a grid; its induced map leaves every generator
/// fixed.
pub fn identity_gauge(dim: usize, grid: &TimeGrid) -> Result<GaugeSolution> {
    let n = grid.num_nodes();
    let omega = vec![linalg::identity(dim); n];
    let omega_dot = vec![CMatrix::zeros(dim, dim); n];
    GaugeSolution::new(grid.clone(), omega, omega_dot, GaugeBackend::MagnusConstant, "identity frame")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use crate::quantum::{basis_state, evolve_state, pauli_x, pauli_z, propagator, Profile, Term};
    use crate::sample;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// `exp(i theta s)` for involutory `s` (`s^2 = I`).
    fn rot(s: &CMatrix, theta: f64) -> CMatrix {
        linalg::identity(s.nrows()) * c(theta.cos(), 0.0) + s * c(0.0, theta.sin())
    }

    fn const_spec(m: CMatrix) -> HamiltonianSpec {
        HamiltonianSpec::constant(m, true).unwrap()
    }

    /// Constant sigma_z written as two genuinely time-dependent terms so the
    /// commuting-family shortcut cannot fire.
    fn sigma_z_rk4_forced() -> HamiltonianSpec {
        HamiltonianSpec::new(
            2,
            vec![
                Term { profile: Profile::Poly { coeffs: vec![0.0, 1.0] }, matrix: pauli_z() },
                Term { profile: Profile::Poly { coeffs: vec![1.0, -1.0] }, matrix: pauli_z() },
            ],
            true,
        )
        .unwrap()
    }

    #[test]
    fn identity_frame_fixes_generators() {
        let h = sample::random_hermitian(3, &mut sample::rng_from_seed(1));
        let w = linalg::identity(3);
        let wd = CMatrix::zeros(3, 3);
        let mapped = apply_gauge_map(&w, &wd, &h).unwrap();
        assert_eq!(max_abs(&(mapped - h)), 0.0);
    }

    #[test]
    fn commuting_exponential_frame_cancels_its_generator() {
        // omega = exp(i H t) gives omega H omega^-1 = H and the derivative
        // term contributes -H, so the map sends H to zero.
        let h = pauli_x();
        let t = 0.7;
        let w = rot(&h, t);
        let wd = &h * &w * c(0.0, 1.0);
        let mapped = apply_gauge_map(&w, &wd, &h).unwrap();
        assert!(max_abs(&mapped) < 1e-12);
    }

    #[test]
    fn product_frame_maps_sigma_z_to_sigma_x() {
        // omega(t) = exp(-i sx t) exp(i sz t) at t = 0.7.
        let sx = pauli_x();
        let sz = pauli_z();
        let t = 0.7;
        let w = rot(&sx, -t) * rot(&sz, t);
        let wd = &sx * &w * c(0.0, -1.0) + rot(&sx, -t) * (&sz * c(0.0, 1.0)) * rot(&sz, t);
        let mapped = apply_gauge_map(&w, &wd, &sz).unwrap();
        assert!(max_abs(&(mapped - sx)) < 1e-10);
    }

    #[test]
    fn singular_frame_is_rejected() {
        let w = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]);
        let wd = CMatrix::zeros(2, 2);
        let err = apply_gauge_map(&w, &wd, &pauli_z()).unwrap_err();
        assert!(matches!(err, Error::Singular { .. }));
    }

    #[test]
    fn zero_target_gives_identity_frame() {
        let grid = TimeGrid::new(0.0, 1.0, 10).unwrap();
        let zero = const_spec(CMatrix::zeros(2, 2));
        let g = solve_omega1(&zero, &grid, None).unwrap();
        assert_eq!(g.backend(), GaugeBackend::MagnusConstant);
        for j in 0..grid.num_nodes() {
            assert!(max_abs(&(g.omega_at(j) - linalg::identity(2))) < 1e-15);
            assert!(max_abs(g.omega_dot_at(j)) < 1e-15);
        }
    }

    #[test]
    fn constant_diagonal_target_matches_scalar_phases() {
        let grid = TimeGrid::new(0.0, std::f64::consts::PI, 200).unwrap();
        let g = solve_omega1(&const_spec(pauli_z()), &grid, None).unwrap();
        assert_eq!(g.backend(), GaugeBackend::MagnusConstant);
        assert!(g.is_unitary());
        for j in 0..grid.num_nodes() {
            let t = grid.node(j);
            let expected = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
                c(t.cos(), -t.sin()),
                c(t.cos(), t.sin()),
            ]));
            assert!(max_abs(&(g.omega_at(j) - expected)) < 1e-12);
        }
    }

    #[test]
    fn single_term_profile_uses_exact_integral() {
        // H'(t) = t sx, so omega1(t) = exp(-i (t^2/2) sx) = rot(sx, -t^2/2).
        let spec = HamiltonianSpec::new(
            2,
            vec![Term { profile: Profile::Poly { coeffs: vec![0.0, 1.0] }, matrix: pauli_x() }],
            true,
        )
        .unwrap();
        let grid = TimeGrid::new(0.0, 2.0, 100).unwrap();
        let g = solve_omega1(&spec, &grid, None).unwrap();
        assert_eq!(g.backend(), GaugeBackend::MagnusConstant);
        for j in 0..grid.num_nodes() {
            let t = grid.node(j);
            let expected = rot(&pauli_x(), -0.5 * t * t);
            assert!(max_abs(&(g.omega_at(j) - expected)) < 1e-12);
        }
    }

    #[test]
    fn rk4_branch_agrees_with_closed_form() {
        let grid = TimeGrid::new(0.0, 1.0, 400).unwrap();
        let forced = sigma_z_rk4_forced();
        let g = solve_omega1(&forced, &grid, None).unwrap();
        assert_eq!(g.backend(), GaugeBackend::Rk4Integrated);
        let exact = solve_omega1(&const_spec(pauli_z()), &grid, None).unwrap();
        let mut worst: f64 = 0.0;
        for j in 0..grid.num_nodes() {
            worst = worst.max(max_abs(&(g.omega_at(j) - exact.omega_at(j))));
        }
        assert!(worst < 1e-9, "rk4 deviation {worst}");
    }

    #[test]
    fn source_solve_carries_opposite_phase() {
        let grid = TimeGrid::new(0.0, 1.5, 150).unwrap();
        let g = solve_omega2(&const_spec(pauli_z()), &grid, None).unwrap();
        for j in 0..grid.num_nodes() {
            let t = grid.node(j);
            let expected = rot(&pauli_z(), t);
            assert!(max_abs(&(g.omega_at(j) - expected)) < 1e-12);
        }
        // As a connector it maps the source onto the zero generator.
        let pair =
            GaugePair::new(const_spec(pauli_z()), const_spec(CMatrix::zeros(2, 2))).unwrap();
        assert!(intertwining_residual(&g, &pair).unwrap() < 1e-13);
    }

    #[test]
    fn transitive_connector_satisfies_all_invariants() {
        let grid = TimeGrid::new(0.0, 2.0 * std::f64::consts::PI, 2000).unwrap();
        let pair = GaugePair::new(const_spec(pauli_z()), const_spec(pauli_x())).unwrap();
        let g = transitive_solution(&pair, &grid, None).unwrap();
        assert_eq!(g.backend(), GaugeBackend::AnalyticProduct);
        assert!(g.is_unitary());
        assert!(g.unitarity_defect() < 1e-13);

        let mut worst: f64 = 0.0;
        for j in 0..grid.num_nodes() {
            let t = grid.node(j);
            let expected = rot(&pauli_x(), -t) * rot(&pauli_z(), t);
            worst = worst.max(max_abs(&(g.omega_at(j) - expected)));
        }
        assert!(worst < 1e-12, "closed-form deviation {worst}");

        assert!(intertwining_residual(&g, &pair).unwrap() < 1e-12);
        assert!(mapped_deviation(&g, &pair).unwrap() < 1e-10);
        let fd = g.derivative_consistency();
        assert!(fd < 1e-4, "finite-difference consistency {fd}");
    }

    #[test]
    fn reflexive_connector_is_identity() {
        let grid = TimeGrid::new(0.0, 3.0, 60).unwrap();
        let pair = GaugePair::new(const_spec(pauli_x()), const_spec(pauli_x())).unwrap();
        let g = transitive_solution(&pair, &grid, None).unwrap();
        for j in 0..grid.num_nodes() {
            assert!(max_abs(&(g.omega_at(j) - linalg::identity(2))) < 1e-13);
        }
    }

    #[test]
    fn mixed_product_is_tagged_composed() {
        let grid = TimeGrid::new(0.0, 1.0, 100).unwrap();
        let pair = GaugePair::new(const_spec(pauli_z()), sigma_z_rk4_forced()).unwrap();
        let g = transitive_solution(&pair, &grid, None).unwrap();
        assert_eq!(g.backend(), GaugeBackend::Composed);
        // Numerically this is still the sigma_z reflexive connector.
        for j in 0..grid.num_nodes() {
            assert!(max_abs(&(g.omega_at(j) - linalg::identity(2))) < 1e-9);
        }
    }

    #[test]
    fn seed_is_applied_at_the_initial_node() {
        let grid = TimeGrid::new(0.0, 1.0, 50).unwrap();
        let seed = sample::random_well_conditioned(2, &mut sample::rng_from_seed(5));
        let g = solve_omega1(&const_spec(pauli_z()), &grid, Some(&seed)).unwrap();
        assert!(max_abs(&(g.omega_at(0) - &seed)) < 1e-14);
        let pair = GaugePair::new(const_spec(CMatrix::zeros(2, 2)), const_spec(pauli_z())).unwrap();
        assert!(intertwining_residual(&g, &pair).unwrap() < 1e-12);
    }

    #[test]
    fn bad_seeds_are_rejected() {
        let grid = TimeGrid::new(0.0, 1.0, 10).unwrap();
        let spec = const_spec(pauli_z());
        let wrong_dim = linalg::identity(3);
        assert!(matches!(
            solve_omega1(&spec, &grid, Some(&wrong_dim)).unwrap_err(),
            Error::Dimension(_)
        ));
        let singular = CMatrix::zeros(2, 2);
        assert!(matches!(
            solve_omega1(&spec, &grid, Some(&singular)).unwrap_err(),
            Error::Singular { .. }
        ));
    }

    #[test]
    fn composition_with_inverse_collapses_to_identity() {
        let grid = TimeGrid::new(0.0, 2.0, 200).unwrap();
        let pair = GaugePair::new(const_spec(pauli_z()), const_spec(pauli_x())).unwrap();
        let g = transitive_solution(&pair, &grid, None).unwrap();
        let ginv = inverse_gauge(&g).unwrap();
        let prod = compose(&g, &ginv).unwrap();
        for j in 0..grid.num_nodes() {
            assert!(max_abs(&(prod.omega_at(j) - linalg::identity(2))) < 1e-10);
            assert!(max_abs(prod.omega_dot_at(j)) < 1e-10);
        }
    }

    #[test]
    fn inverse_of_unitary_frame_is_its_adjoint() {
        let grid = TimeGrid::new(0.0, 1.0, 40).unwrap();
        let g = solve_omega1(&const_spec(pauli_x()), &grid, None).unwrap();
        assert!(g.is_unitary());
        let ginv = inverse_gauge(&g).unwrap();
        for j in 0..grid.num_nodes() {
            assert!(max_abs(&(ginv.omega_at(j) - g.omega_at(j).adjoint())) < 1e-12);
        }
    }

    #[test]
    fn induced_maps_compose_like_their_frames() {
        let mut rng = sample::rng_from_seed(7);
        for _ in 0..5 {
            let w1 = sample::random_well_conditioned(4, &mut rng);
            let w2 = sample::random_well_conditioned(4, &mut rng);
            let wd1 = sample::random_matrix(4, &mut rng);
            let wd2 = sample::random_matrix(4, &mut rng);
            let h = sample::random_hermitian(4, &mut rng);
            let step1 = apply_gauge_map(&w1, &wd1, &h).unwrap();
            let two_step = apply_gauge_map(&w2, &wd2, &step1).unwrap();
            let w = &w2 * &w1;
            let wd = &wd2 * &w1 + &w2 * &wd1;
            let one_step = apply_gauge_map(&w, &wd, &h).unwrap();
            let dev = max_abs(&(two_step - one_step));
            assert!(dev < 1e-9, "composition law deviation {dev}");
        }
    }

    #[test]
    fn inverse_frame_undoes_the_induced_map() {
        let mut rng = sample::rng_from_seed(9);
        for _ in 0..5 {
            let w = sample::random_well_conditioned(3, &mut rng);
            let wd = sample::random_matrix(3, &mut rng);
            let h = sample::random_hermitian(3, &mut rng);
            let winv = linalg::try_inverse(&w, "test").unwrap();
            let wdinv = &winv * &wd * &winv * c(-1.0, 0.0);
            let there = apply_gauge_map(&w, &wd, &h).unwrap();
            let back = apply_gauge_map(&winv, &wdinv, &there).unwrap();
            let dev = max_abs(&(back - h));
            assert!(dev < 1e-9, "inverse law deviation {dev}");
        }
    }

    #[test]
    fn frames_from_one_commuting_family_yield_commuting_maps() {
        let grid = TimeGrid::new(0.0, 1.0, 30).unwrap();
        let ga = solve_omega1(&const_spec(pauli_z() * c(0.7, 0.0)), &grid, None).unwrap();
        let gb = solve_omega1(&const_spec(pauli_z() * c(-1.3, 0.0)), &grid, None).unwrap();
        let h = sample::random_hermitian(2, &mut sample::rng_from_seed(3));
        for j in [0, 15, 30] {
            let ab = apply_gauge_map(
                gb.omega_at(j),
                gb.omega_dot_at(j),
                &apply_gauge_map(ga.omega_at(j), ga.omega_dot_at(j), &h).unwrap(),
            )
            .unwrap();
            let ba = apply_gauge_map(
                ga.omega_at(j),
                ga.omega_dot_at(j),
                &apply_gauge_map(gb.omega_at(j), gb.omega_dot_at(j), &h).unwrap(),
            )
            .unwrap();
            assert!(max_abs(&(ab - ba)) < 1e-9);
        }
    }

    #[test]
    fn state_transport_commutes_with_evolution() {
        // Evolving under sigma_z then mapping must match evolving the mapped
        // initial state under sigma_x.
        let grid = TimeGrid::new(0.0, std::f64::consts::PI, 1000).unwrap();
        let pair = GaugePair::new(const_spec(pauli_z()), const_spec(pauli_x())).unwrap();
        let g = transitive_solution(&pair, &grid, None).unwrap();
        let psi0 = StateVector::new(0.0, basis_state(2, 0)).unwrap();
        let source_path = evolve_state(&pair.source, &psi0, &grid).unwrap();
        let mapped = map_state(&g, &source_path).unwrap();
        let psi0_target = StateVector::new(0.0, g.omega_at(0) * &psi0.data).unwrap();
        let target_path = evolve_state(&pair.target, &psi0_target, &grid).unwrap();
        let mut worst: f64 = 0.0;
        for (m, t) in mapped.iter().zip(&target_path) {
            worst = worst.max((&m.data - &t.data).norm());
        }
        assert!(worst < 1e-7, "two-path deviation {worst}");
        // Unitary transport preserves norms along the whole path.
        for m in &mapped {
            assert!((m.norm() - 1.0).abs() < 1e-7);
        }
    }

    #[test]
    fn conjugated_propagator_matches_target_propagator() {
        let grid = TimeGrid::new(0.0, std::f64::consts::PI, 600).unwrap();
        let pair = GaugePair::new(const_spec(pauli_z()), const_spec(pauli_x())).unwrap();
        let g = transitive_solution(&pair, &grid, None).unwrap();
        let u = propagator(&pair.source, &grid).unwrap();
        for t_index in [0, 300, 600] {
            let conj = conjugate_propagator(&g, &u, 0, t_index).unwrap();
            let expected = rot(&pauli_x(), -grid.node(t_index));
            assert!(max_abs(&(conj - expected)) < 1e-7);
        }
    }

    #[test]
    fn conjugation_rejects_layout_and_index_mismatches() {
        let grid = TimeGrid::new(0.0, 1.0, 50).unwrap();
        let other = TimeGrid::new(0.0, 1.0, 60).unwrap();
        let spec = const_spec(pauli_z());
        let g = solve_omega1(&spec, &grid, None).unwrap();
        let u_other = propagator(&spec, &other).unwrap();
        assert!(matches!(
            conjugate_propagator(&g, &u_other, 0, 1).unwrap_err(),
            Error::GridMismatch(_)
        ));
        let u = propagator(&spec, &grid).unwrap();
        assert!(matches!(
            conjugate_propagator(&g, &u, 0, 51).unwrap_err(),
            Error::GridMismatch(_)
        ));
    }

    #[test]
    fn unitarity_classification_follows_the_seed() {
        let grid = TimeGrid::new(0.0, 1.0, 40).unwrap();
        let spec = const_spec(pauli_x());
        let mut rng = sample::rng_from_seed(21);
        let useed = sample::random_unitary(2, &mut rng);
        let g = solve_omega1(&spec, &grid, Some(&useed)).unwrap();
        assert!(g.is_unitary());

        let mut skew = sample::random_well_conditioned(2, &mut rng);
        while linalg::unitarity_defect(&skew) < 1e-3 {
            skew = sample::random_well_conditioned(2, &mut rng);
        }
        let g2 = solve_omega1(&spec, &grid, Some(&skew)).unwrap();
        assert!(!g2.is_unitary());
        // Non-unitary frames still connect the pair exactly.
        let pair = GaugePair::new(const_spec(CMatrix::zeros(2, 2)), spec).unwrap();
        assert!(intertwining_residual(&g2, &pair).unwrap() < 1e-12);
    }

    #[test]
    fn derivative_consistency_detects_corrupted_derivatives() {
        let grid = TimeGrid::new(0.0, 1.0, 100).unwrap();
        let g = solve_omega1(&const_spec(pauli_z()), &grid, None).unwrap();
        assert!(g.derivative_consistency() < 1e-4);
        let mut omega_dot = g.omega_dot().to_vec();
        omega_dot[50][(0, 0)] += c(0.1, 0.0);
        let bad = GaugeSolution::new(
            grid.clone(),
            g.omega().to_vec(),
            omega_dot,
            GaugeBackend::Composed,
            "corrupted",
        )
        .unwrap();
        assert!(bad.derivative_consistency() > 1e-3);
    }

    #[test]
    fn pair_dimension_mismatch_is_rejected() {
        let a = const_spec(pauli_z());
        let b = const_spec(linalg::identity(3));
        assert!(matches!(GaugePair::new(a, b).unwrap_err(), Error::Dimension(_)));
    }

    #[test]
    fn swapped_pair_accepts_the_inverse_connector() {
        let grid = TimeGrid::new(0.0, 2.0, 400).unwrap();
        let pair = GaugePair::new(const_spec(pauli_z()), const_spec(pauli_x())).unwrap();
        let g = transitive_solution(&pair, &grid, None).unwrap();
        let ginv = inverse_gauge(&g).unwrap();
        assert!(intertwining_residual(&ginv, &pair.swapped()).unwrap() < 1e-10);
    }
}
