//! Electrical-network synthesis for real second-order systems.
//!
//! A system `v_ddot + A v_dot + B v = 0` on n ports is realized by per-port
//! parallel L-C tandems to ground plus an interaction network of resistors
//! and inductors whose admittance is `Y(s) = alpha + beta / s`. The
//! parameter relations are
//!
//! ```text
//! A = C^-1 alpha,    B = omega0^2 + C^-1 beta,    omega0^2 = (L C)^-1
//! ```
//!
//! with diagonal capacitance `C` and tandem inductance `L`. Synthesis
//! inverts these relations; the default frequency assignment puts all of
//! `diag(B)` into the tandem frequencies so the coupling matrix `beta` has a
//! zero diagonal and the interaction network carries coupling only.
//!
//! Realizability is diagnosed, never enforced: a branch whose physical value
//! would have to be negative is emitted as a diagnostic comment in the
//! netlist, and passivity indicators (symmetry and positive semidefiniteness
//! of `alpha`, symmetry of `beta`) are reported as flags.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::linalg::{self, CMatrix, RMatrix, RVector};
use crate::ode;
use crate::quantum::{evolve_state, HamiltonianSpec, StateVector};
use crate::realify::{self, RealSystem};

/// `v_ddot + A v_dot + B v = 0` on n ports.
#[derive(Clone, Debug)]
pub struct ClassicalSystem {
    dim: usize,
    a: RMatrix,
    b: RMatrix,
}

impl ClassicalSystem {
    pub fn new(a: RMatrix, b: RMatrix) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n || b.nrows() != n || b.ncols() != n {
            return Err(Error::Dimension(format!(
                "classical system needs square matrices of one size, got {}x{} and {}x{}",
                a.nrows(),
                a.ncols(),
                b.nrows(),
                b.ncols()
            )));
        }
        if n == 0 {
            return Err(Error::Dimension("classical system dimension must be at least 1".into()));
        }
        if !linalg::all_finite_real(&a) || !linalg::all_finite_real(&b) {
            return Err(Error::NonFinite("classical system matrices must be finite".into()));
        }
        Ok(ClassicalSystem { dim: n, a, b })
    }

    /// The second-order coefficients of a decoupled realified system.
    pub fn from_real_system(sys: &RealSystem) -> Result<Self> {
        match (sys.aq(), sys.bq()) {
            (Some(aq), Some(bq)) => ClassicalSystem::new(aq.clone(), bq.clone()),
            _ => Err(Error::DecoupledUnavailable(format!(
                "no second-order form to synthesize ({})",
                sys.diagnostic().unwrap_or("decoupling was not requested")
            ))),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn a(&self) -> &RMatrix {
        &self.a
    }

    pub fn b(&self) -> &RMatrix {
        &self.b
    }
}

/// Passivity indicators, reported alongside a synthesized network.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PassivityFlags {
    pub alpha_symmetric: bool,
    pub alpha_psd: bool,
    pub beta_symmetric: bool,
}

fn symmetry_defect(m: &RMatrix) -> f64 {
    linalg::max_abs_real(&(m - m.transpose()))
}

const SYMMETRY_TOL: f64 = 1e-12;

/// Relative floor for classifying row-sum-derived element values. Shunt
/// conductances and merged tandem inductances are sums of synthesized
/// parameters, and a sum whose intended value is zero lands within a few
/// ulps of it, not on it; magnitudes below this floor (times the sum of
/// absolute summands) count as open branches, not negative-element defects.
const ROW_SUM_TOL: f64 = 1e-12;

/// Network parameters: per-port capacitances and tandem inductances plus the
/// interaction matrices of `Y(s) = alpha + beta / s`.
#[derive(Clone, Debug)]
pub struct NetworkSpec {
    c: RVector,
    l: RVector,
    alpha: RMatrix,
    beta: RMatrix,
    omega0_sq: RVector,
    passivity: PassivityFlags,
}

impl NetworkSpec {
    pub fn new(c: RVector, l: RVector, alpha: RMatrix, beta: RMatrix) -> Result<Self> {
        let n = c.len();
        if l.len() != n || alpha.nrows() != n || alpha.ncols() != n || beta.nrows() != n || beta.ncols() != n {
            return Err(Error::Dimension(format!(
                "network parameter shapes disagree: C has {n} ports, L has {}, alpha is {}x{}, beta is {}x{}",
                l.len(),
                alpha.nrows(),
                alpha.ncols(),
                beta.nrows(),
                beta.ncols()
            )));
        }
        if n == 0 {
            return Err(Error::Dimension("network needs at least one port".into()));
        }
        for k in 0..n {
            if !(c[k].is_finite() && c[k] > 0.0) {
                return Err(Error::Config(format!(
                    "capacitance at port {} must be positive and finite, got {}",
                    k + 1,
                    c[k]
                )));
            }
            if !(l[k].is_finite() && l[k] > 0.0) {
                return Err(Error::Config(format!(
                    "inductance at port {} must be positive and finite, got {}",
                    k + 1,
                    l[k]
                )));
            }
        }
        if !linalg::all_finite_real(&alpha) || !linalg::all_finite_real(&beta) {
            return Err(Error::NonFinite("network coupling matrices must be finite".into()));
        }
        let omega0_sq = RVector::from_fn(n, |k, _| 1.0 / (l[k] * c[k]));
        let scale_a = linalg::max_abs_real(&alpha).max(1.0);
        let scale_b = linalg::max_abs_real(&beta).max(1.0);
        let alpha_symmetric = symmetry_defect(&alpha) <= SYMMETRY_TOL * scale_a;
        let beta_symmetric = symmetry_defect(&beta) <= SYMMETRY_TOL * scale_b;
        let sym_part = (&alpha + alpha.transpose()) * 0.5;
        let alpha_psd = sym_part
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .all(|ev| *ev >= -1e-10 * scale_a);
        Ok(NetworkSpec {
            c,
            l,
            alpha,
            beta,
            omega0_sq,
            passivity: PassivityFlags { alpha_symmetric, alpha_psd, beta_symmetric },
        })
    }

    pub fn ports(&self) -> usize {
        self.c.len()
    }

    pub fn c(&self) -> &RVector {
        &self.c
    }

    pub fn l(&self) -> &RVector {
        &self.l
    }

    pub fn alpha(&self) -> &RMatrix {
        &self.alpha
    }

    pub fn beta(&self) -> &RMatrix {
        &self.beta
    }

    /// Tandem proper frequencies `omega0_k^2 = 1 / (L_k C_k)`.
    pub fn omega0_sq(&self) -> &RVector {
        &self.omega0_sq
    }

    pub fn passivity(&self) -> PassivityFlags {
        self.passivity
    }

    /// Inverts the parameter relations back to the second-order system:
    /// `A = C^-1 alpha`, `B = omega0^2 + C^-1 beta`.
    pub fn reconstruct(&self) -> ClassicalSystem {
        let n = self.ports();
        let a = RMatrix::from_fn(n, n, |j, k| self.alpha[(j, k)] / self.c[j]);
        let mut b = RMatrix::from_fn(n, n, |j, k| self.beta[(j, k)] / self.c[j]);
        for k in 0..n {
            b[(k, k)] += self.omega0_sq[k];
        }
        ClassicalSystem { dim: n, a, b }
    }

    /// Interaction-network admittance `Y(s) = alpha + beta / s`.
    pub fn admittance(&self, s: Complex64) -> Result<CMatrix> {
        admittance(self, s)
    }
}

/// How tandem inductances are assigned during synthesis.
#[derive(Clone, Debug, PartialEq)]
pub enum SynthesisPolicy {
    /// `L_k = 1 / (C_k B_kk)`: each port's tandem carries its proper
    /// frequency and `beta` gets a zero diagonal. Requires `B_kk > 0`.
    DefaultFrequencies,
    /// Caller-supplied positive tandem inductances; the full residual
    /// `B - omega0^2` lands in `beta`, diagonal included.
    ExplicitInductance(RVector),
}

/// Solves `A = C^-1 alpha`, `B = omega0^2 + C^-1 beta` for the network
/// parameters given the capacitances and a frequency-assignment policy.
pub fn synthesize(
    sys: &ClassicalSystem,
    c: &RVector,
    policy: &SynthesisPolicy,
) -> Result<NetworkSpec> {
    let n = sys.dim();
    if c.len() != n {
        return Err(Error::Dimension(format!(
            "capacitance vector has {} entries for {n} ports",
            c.len()
        )));
    }
    for k in 0..n {
        if !(c[k].is_finite() && c[k] > 0.0) {
            return Err(Error::Config(format!(
                "capacitance at port {} must be positive and finite, got {}",
                k + 1,
                c[k]
            )));
        }
    }
    let alpha = RMatrix::from_fn(n, n, |j, k| c[j] * sys.a()[(j, k)]);
    let l = match policy {
        SynthesisPolicy::DefaultFrequencies => {
            let mut l = RVector::zeros(n);
            for k in 0..n {
                let bkk = sys.b()[(k, k)];
                if !(bkk > 0.0) {
                    return Err(Error::FrequencyAssignment { port: k + 1, value: bkk });
                }
                l[k] = 1.0 / (c[k] * bkk);
            }
            l
        }
        SynthesisPolicy::ExplicitInductance(l) => {
            if l.len() != n {
                return Err(Error::Dimension(format!(
                    "inductance vector has {} entries for {n} ports",
                    l.len()
                )));
            }
            for k in 0..n {
                if !(l[k].is_finite() && l[k] > 0.0) {
                    return Err(Error::Config(format!(
                        "inductance at port {} must be positive and finite, got {}",
                        k + 1,
                        l[k]
                    )));
                }
            }
            l.clone()
        }
    };
    let beta = RMatrix::from_fn(n, n, |j, k| {
        let omega0_sq_j = 1.0 / (l[j] * c[j]);
        let residual = if j == k { sys.b()[(j, k)] - omega0_sq_j } else { sys.b()[(j, k)] };
        c[j] * residual
    });
    NetworkSpec::new(c.clone(), l, alpha, beta)
}

/// `Y(s) = alpha + beta / s`; the inverse-inductance part has a pole at
/// `s = 0`.
pub fn admittance(net: &NetworkSpec, s: Complex64) -> Result<CMatrix> {
    if s == Complex64::new(0.0, 0.0) {
        return Err(Error::AdmittancePole);
    }
    let n = net.ports();
    Ok(CMatrix::from_fn(n, n, |j, k| {
        Complex64::new(net.alpha[(j, k)], 0.0) + Complex64::new(net.beta[(j, k)], 0.0) / s
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ElementKind {
    Capacitor,
    Inductor,
    Resistor,
}

impl ElementKind {
    fn letter(self) -> char {
        match self {
            ElementKind::Capacitor => 'C',
            ElementKind::Inductor => 'L',
            ElementKind::Resistor => 'R',
        }
    }
}

/// One netlist entry: a physical element or an in-band diagnostic for a
/// value that is not realizable with passive parts.
#[derive(Clone, Debug, PartialEq)]
pub enum NetlistEntry {
    Element { kind: ElementKind, index: usize, node_pos: usize, node_neg: usize, value: f64 },
    Diagnostic { message: String },
}

/// Rendered network: per-port tandems, interaction branches and shunt
/// completions, with diagnostics where a value came out negative.
#[derive(Clone, Debug)]
pub struct Netlist {
    ports: usize,
    entries: Vec<NetlistEntry>,
}

impl Netlist {
    pub fn ports(&self) -> usize {
        self.ports
    }

    pub fn entries(&self) -> &[NetlistEntry] {
        &self.entries
    }

    pub fn diagnostics(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().filter_map(|e| match e {
            NetlistEntry::Diagnostic { message } => Some(message.as_str()),
            _ => None,
        })
    }

    pub fn has_diagnostics(&self) -> bool {
        self.diagnostics().next().is_some()
    }

    /// Plain-text rendering, one entry per line: `<kind><index> <node+>
    /// <node-> <value>` with node 0 as ground and ports on nodes 1..n;
    /// diagnostics render as `* diag: <message>` comment lines.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for entry in &self.entries {
            match entry {
                NetlistEntry::Element { kind, index, node_pos, node_neg, value } => {
                    out.push_str(&format!(
                        "{}{} {} {} {}\n",
                        kind.letter(),
                        index,
                        node_pos,
                        node_neg,
                        value
                    ));
                }
                NetlistEntry::Diagnostic { message } => {
                    out.push_str(&format!("* diag: {message}\n"));
                }
            }
        }
        out
    }

    /// Node-admittance matrix assembled from the emitted elements at a given
    /// frequency: capacitors stamp `sC`, inductors `1/(sL)`, resistors
    /// `1/R`; a two-port branch stamps its admittance onto the usual four
    /// positions. Diagnostics stamp nothing.
    pub fn node_admittance(&self, s: Complex64) -> Result<CMatrix> {
        if s == Complex64::new(0.0, 0.0) {
            return Err(Error::AdmittancePole);
        }
        let n = self.ports;
        let mut y = CMatrix::zeros(n, n);
        for entry in &self.entries {
            let NetlistEntry::Element { kind, node_pos, node_neg, value, .. } = entry else {
                continue;
            };
            let adm = match kind {
                ElementKind::Capacitor => s * Complex64::new(*value, 0.0),
                ElementKind::Inductor => (s * Complex64::new(*value, 0.0)).inv(),
                ElementKind::Resistor => Complex64::new(1.0 / *value, 0.0),
            };
            for node in [*node_pos, *node_neg] {
                if node > 0 {
                    y[(node - 1, node - 1)] += adm;
                }
            }
            if *node_pos > 0 && *node_neg > 0 {
                y[(*node_pos - 1, *node_neg - 1)] -= adm;
                y[(*node_neg - 1, *node_pos - 1)] -= adm;
            }
        }
        Ok(y)
    }
}

/// Renders the network as elements. Per port: the capacitor and a tandem
/// inductor whose inverse inductance absorbs the row sum of `beta` (shunt
/// completion), plus a shunt resistor carrying the row sum of `alpha`. Per
/// port pair `j < k`: a resistor of conductance `-alpha_jk` and an inductor
/// of inverse inductance `-beta_jk`. Exact zeros are open branches and emit
/// nothing; negative values emit diagnostics; asymmetric couplings cannot be
/// carried by a two-terminal branch and are also diagnosed.
pub fn emit_netlist(net: &NetworkSpec) -> Netlist {
    let n = net.ports();
    let mut entries = Vec::new();
    let mut inductor_index = n;
    let mut resistor_index = n;

    for k in 0..n {
        entries.push(NetlistEntry::Element {
            kind: ElementKind::Capacitor,
            index: k + 1,
            node_pos: k + 1,
            node_neg: 0,
            value: net.c[k],
        });
        let row_sum: f64 = (0..n).map(|j| net.beta[(k, j)]).sum();
        let inv_l = 1.0 / net.l[k] + row_sum;
        let floor = ROW_SUM_TOL * (1.0 / net.l[k] + (0..n).map(|j| net.beta[(k, j)].abs()).sum::<f64>());
        if inv_l > floor {
            entries.push(NetlistEntry::Element {
                kind: ElementKind::Inductor,
                index: k + 1,
                node_pos: k + 1,
                node_neg: 0,
                value: 1.0 / inv_l,
            });
        } else if inv_l < -floor {
            entries.push(NetlistEntry::Diagnostic {
                message: format!(
                    "port {} tandem requires negative inverse inductance {inv_l} 1/H",
                    k + 1
                ),
            });
        }
    }

    for k in 0..n {
        let g: f64 = (0..n).map(|j| net.alpha[(k, j)]).sum();
        let floor = ROW_SUM_TOL * (0..n).map(|j| net.alpha[(k, j)].abs()).sum::<f64>();
        if g > floor {
            entries.push(NetlistEntry::Element {
                kind: ElementKind::Resistor,
                index: k + 1,
                node_pos: k + 1,
                node_neg: 0,
                value: 1.0 / g,
            });
        } else if g < -floor {
            entries.push(NetlistEntry::Diagnostic {
                message: format!("port {} shunt requires negative conductance {g} S", k + 1),
            });
        }
    }

    let scale_a = linalg::max_abs_real(&net.alpha).max(1.0);
    let scale_b = linalg::max_abs_real(&net.beta).max(1.0);
    for j in 0..n {
        for k in (j + 1)..n {
            if (net.alpha[(j, k)] - net.alpha[(k, j)]).abs() > SYMMETRY_TOL * scale_a {
                entries.push(NetlistEntry::Diagnostic {
                    message: format!(
                        "conductance coupling between ports {} and {} is asymmetric ({} vs {}) and cannot be carried by one branch",
                        j + 1,
                        k + 1,
                        net.alpha[(j, k)],
                        net.alpha[(k, j)]
                    ),
                });
            }
            let g = -net.alpha[(j, k)];
            if g > 0.0 {
                resistor_index += 1;
                entries.push(NetlistEntry::Element {
                    kind: ElementKind::Resistor,
                    index: resistor_index,
                    node_pos: j + 1,
                    node_neg: k + 1,
                    value: 1.0 / g,
                });
            } else if g < 0.0 {
                entries.push(NetlistEntry::Diagnostic {
                    message: format!(
                        "coupling between ports {} and {} requires negative conductance {g} S",
                        j + 1,
                        k + 1
                    ),
                });
            }

            if (net.beta[(j, k)] - net.beta[(k, j)]).abs() > SYMMETRY_TOL * scale_b {
                entries.push(NetlistEntry::Diagnostic {
                    message: format!(
                        "inductive coupling between ports {} and {} is asymmetric ({} vs {}) and cannot be carried by one branch",
                        j + 1,
                        k + 1,
                        net.beta[(j, k)],
                        net.beta[(k, j)]
                    ),
                });
            }
            let gamma = -net.beta[(j, k)];
            if gamma > 0.0 {
                inductor_index += 1;
                entries.push(NetlistEntry::Element {
                    kind: ElementKind::Inductor,
                    index: inductor_index,
                    node_pos: j + 1,
                    node_neg: k + 1,
                    value: 1.0 / gamma,
                });
            } else if gamma < 0.0 {
                entries.push(NetlistEntry::Diagnostic {
                    message: format!(
                        "coupling between ports {} and {} requires negative inverse inductance {gamma} 1/H",
                        j + 1,
                        k + 1
                    ),
                });
            }
        }
    }

    Netlist { ports: n, entries }
}

/// Expected node-admittance matrix of the full network (tandems plus
/// interaction): `s C + diag(1/L)/s + alpha + beta/s`.
pub fn expected_node_admittance(net: &NetworkSpec, s: Complex64) -> Result<CMatrix> {
    let mut y = admittance(net, s)?;
    for k in 0..net.ports() {
        y[(k, k)] += s * Complex64::new(net.c[k], 0.0)
            + Complex64::new(1.0 / net.l[k], 0.0) / s;
    }
    Ok(y)
}

/// Largest deviation between the node admittance reassembled from emitted
/// elements and the expected one, over the given frequencies. Only
/// meaningful when the netlist carries no diagnostics.
pub fn netlist_fidelity_defect(
    net: &NetworkSpec,
    list: &Netlist,
    frequencies: &[Complex64],
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for s in frequencies {
        let assembled = list.node_admittance(*s)?;
        let expected = expected_node_admittance(net, *s)?;
        worst = worst.max(linalg::max_abs(&(assembled - expected)));
    }
    Ok(worst)
}

/// Frequencies at which netlist fidelity is checked.
pub fn fidelity_frequencies() -> [Complex64; 3] {
    [Complex64::new(1.0, 0.0), Complex64::new(1.0, 1.0), Complex64::new(0.0, 10.0)]
}

/// Transient response of `v_ddot + A v_dot + B v = 0`. Shares its
/// integrator with the decoupled realified evolution, so identical inputs
/// produce bit-identical trajectories.
pub fn simulate_network(
    sys: &ClassicalSystem,
    v0: &RVector,
    vdot0: &RVector,
    grid: &TimeGrid,
) -> Result<Vec<(RVector, RVector)>> {
    ode::rk4_second_order(sys.a(), sys.b(), v0, vdot0, grid, "network simulation")
}

/// Deviations between circuit port voltages and the complex trajectory.
#[derive(Clone, Copy, Debug)]
pub struct RoundtripReport {
    /// `max_{t,k} |v_k(t) - Re psi_k(t)|` for the run seeded with the real
    /// track's initial conditions.
    pub re_deviation: f64,
    /// Same for the mirrored run tracking `Im psi`.
    pub im_deviation: f64,
}

impl RoundtripReport {
    pub fn max_deviation(&self) -> f64 {
        self.re_deviation.max(self.im_deviation)
    }
}

/// Full quantum-to-circuit loop: realify the (constant) generator,
/// synthesize the network with unit capacitances, rebuild the classical
/// system from the synthesized parameters, simulate both tracks from the
/// quantum initial conditions and compare against the complex integration.
pub fn quantum_roundtrip(
    spec: &HamiltonianSpec,
    psi0: &StateVector,
    grid: &TimeGrid,
) -> Result<RoundtripReport> {
    if !spec.is_constant() {
        return Err(Error::Config(
            "the circuit round trip needs a constant generator; gauge-transform to one first"
                .into(),
        ));
    }
    let real = realify::build_real_system(spec, grid.t0(), true)?;
    let sys = ClassicalSystem::from_real_system(&real)?;
    let c = RVector::from_element(sys.dim(), 1.0);
    let net = synthesize(&sys, &c, &SynthesisPolicy::DefaultFrequencies)?;
    let rebuilt = net.reconstruct();

    let complex_path = evolve_state(spec, psi0, grid)?;
    let (phi1, phidot1, phi2, phidot2) = realify::initial_conditions_from_quantum(&real, psi0)?;
    let re_track = simulate_network(&rebuilt, &phi1, &phidot1, grid)?;
    let im_track = simulate_network(&rebuilt, &phi2, &phidot2, grid)?;

    let mut re_deviation: f64 = 0.0;
    let mut im_deviation: f64 = 0.0;
    for (j, psi) in complex_path.iter().enumerate() {
        for k in 0..sys.dim() {
            re_deviation = re_deviation.max((re_track[j].0[k] - psi.data[k].re).abs());
            im_deviation = im_deviation.max((im_track[j].0[k] - psi.data[k].im).abs());
        }
    }
    Ok(RoundtripReport { re_deviation, im_deviation })
}
