//! One interface node: parameters, steady-state displacement and the full
//! and linearized Hamiltonians.
//!
//! Rates are in units of the total cavity decay κ. The linearized
//! Hamiltonian is written in the dressed qubit basis, where the drive term
//! `(Ω/2)σ_x` becomes `(Ω/2)S_z` and the magnetomechanical term
//! `Λ(b†+b)σ_z` becomes `Λ(b†+b)S_x`.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{annihilation_op, embed, qubit_ops, Operator, SubsystemLayout};

pub const STEADY_STATE_TOL: f64 = 1e-10;
pub const STEADY_STATE_MAX_ITER: usize = 10_000;
pub const STEADY_STATE_DAMPING: f64 = 0.5;

/// Rates and detunings of one node.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeParams {
    pub omega_m: f64,
    pub kappa_i: f64,
    /// Coupling into the fibre; `ξ = κ_ex/(κ_i + κ_ex)`.
    pub kappa_ex: f64,
    pub gamma_q: f64,
    pub gamma_m: f64,
    pub g0: f64,
    pub lambda: f64,
    /// Qubit Rabi frequency Ω.
    pub omega: f64,
    /// Bare cavity detuning Δ'_c.
    pub delta_c_prime: f64,
    pub delta_q: f64,
    pub epsilon: C64,
    pub nbar_init: f64,
    /// When set, the drive is back-solved so that `|α_s|·g0 = G_target`.
    pub g_target: Option<f64>,
}

impl NodeParams {
    /// Node with total decay `kappa`, fibre fraction `xi` and every other
    /// rate zero.
    pub fn new(kappa: f64, xi: f64) -> Self {
        Self {
            omega_m: 0.0,
            kappa_i: kappa * (1.0 - xi),
            kappa_ex: kappa * xi,
            gamma_q: 0.0,
            gamma_m: 0.0,
            g0: 0.0,
            lambda: 0.0,
            omega: 0.0,
            delta_c_prime: 0.0,
            delta_q: 0.0,
            epsilon: C64::new(0.0, 0.0),
            nbar_init: 0.0,
            g_target: None,
        }
    }

    pub fn kappa(&self) -> f64 {
        self.kappa_i + self.kappa_ex
    }

    pub fn xi(&self) -> f64 {
        self.kappa_ex / self.kappa()
    }

    pub fn validate(&self) -> Result<()> {
        let rates = [
            ("omega_m", self.omega_m),
            ("kappa_i", self.kappa_i),
            ("kappa_ex", self.kappa_ex),
            ("gamma_q", self.gamma_q),
            ("gamma_m", self.gamma_m),
            ("g0", self.g0),
            ("Lambda", self.lambda),
            ("Omega", self.omega),
            ("nbar_init", self.nbar_init),
        ];
        for (name, v) in rates {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::param(name, format!("must be finite and >= 0, got {v}")));
            }
        }
        for (name, v) in [("Delta_c_prime", self.delta_c_prime), ("Delta_q", self.delta_q)] {
            if !v.is_finite() {
                return Err(Error::param(name, "must be finite"));
            }
        }
        if !(self.kappa() > 0.0) {
            return Err(Error::param("kappa", "total cavity decay must be positive"));
        }
        if let Some(g) = self.g_target {
            if !g.is_finite() || g < 0.0 {
                return Err(Error::param("G_target", format!("must be finite and >= 0, got {g}")));
            }
            if g > 0.0 && self.g0 == 0.0 {
                return Err(Error::param("G_target", "needs a nonzero g0 to back-solve the drive"));
            }
        }
        Ok(())
    }
}

/// Steady-state displacement and the shifted quantities of the linearized
/// model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteadyState {
    pub alpha_s: C64,
    pub beta_s: f64,
    pub delta_c: f64,
    pub delta_q_tilde: f64,
    pub eta: f64,
    pub g: C64,
    /// Drive amplitude consistent with `alpha_s` (equal to the input drive
    /// unless `G_target` was set).
    pub epsilon: C64,
    pub iterations: usize,
}

impl SteadyState {
    /// Steady state for a node specified directly by its linearized
    /// coupling and shifted detuning, bypassing the drive.
    pub fn from_linearized(g: C64, delta_c: f64) -> Self {
        Self {
            alpha_s: C64::new(0.0, 0.0),
            beta_s: 0.0,
            delta_c,
            delta_q_tilde: 0.0,
            eta: 0.0,
            g,
            epsilon: C64::new(0.0, 0.0),
            iterations: 0,
        }
    }

    /// Largest relative residual of the four self-consistency relations
    /// under `p`.
    pub fn residual(&self, p: &NodeParams) -> f64 {
        let kappa = p.kappa();
        let n = self.alpha_s.norm_sqr();
        let shift = 2.0 * self.eta * self.eta * p.omega_m * n;
        let alpha_rhs = self.epsilon.conj() / C64::new(self.delta_c, kappa);
        let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1.0);
        [
            (self.alpha_s - alpha_rhs).norm() / self.alpha_s.norm().max(alpha_rhs.norm()).max(1e-300),
            rel(self.delta_c, p.delta_c_prime - shift),
            rel(self.beta_s, -self.eta * n),
            rel(self.delta_q_tilde, p.delta_q + 2.0 * self.beta_s * p.lambda),
        ]
        .into_iter()
        .map(|r| if r.is_nan() { 0.0 } else { r })
        .fold(0.0, f64::max)
    }
}

/// Self-consistent solution of
/// `α_s = ε*/(Δ_c + iκ)`, `Δ_c = Δ'_c − 2η²ω_m|α_s|²`, `β_s = −η|α_s|²`,
/// `Δ̃_q = Δ_q + 2β_sΛ`.
///
/// With `g_target` set, `|α_s| = G_target/g0` is fixed (real, positive) and
/// the drive is back-solved; otherwise damped Picard iteration is used.
pub fn steady_state_amplitudes(p: &NodeParams) -> Result<SteadyState> {
    p.validate()?;
    let kappa = p.kappa();
    let eta = if p.g0 == 0.0 { 0.0 } else { p.g0 / p.omega_m };
    if !eta.is_finite() {
        return Err(Error::param("omega_m", "must be positive when g0 is nonzero"));
    }
    let shift_of = |alpha: C64| 2.0 * eta * eta * p.omega_m * alpha.norm_sqr();
    let finish = |alpha_s: C64, epsilon: C64, iterations: usize| {
        let n = alpha_s.norm_sqr();
        let beta_s = -eta * n;
        SteadyState {
            alpha_s,
            beta_s,
            delta_c: p.delta_c_prime - shift_of(alpha_s),
            delta_q_tilde: p.delta_q + 2.0 * beta_s * p.lambda,
            eta,
            g: alpha_s * p.g0,
            epsilon,
            iterations,
        }
    };

    if let Some(g_target) = p.g_target {
        let alpha = C64::new(if g_target == 0.0 { 0.0 } else { g_target / p.g0 }, 0.0);
        let delta_c = p.delta_c_prime - shift_of(alpha);
        let epsilon = (alpha * C64::new(delta_c, kappa)).conj();
        return Ok(finish(alpha, epsilon, 0));
    }

    let eps_conj = p.epsilon.conj();
    if eps_conj.norm() == 0.0 {
        return Ok(finish(C64::new(0.0, 0.0), p.epsilon, 0));
    }
    let map = |alpha: C64| eps_conj / C64::new(p.delta_c_prime - shift_of(alpha), kappa);
    let mut alpha = eps_conj / C64::new(p.delta_c_prime, kappa);
    let mut residual = f64::INFINITY;
    for it in 1..=STEADY_STATE_MAX_ITER {
        let target = map(alpha);
        residual = (target - alpha).norm() / target.norm().max(alpha.norm());
        if residual < STEADY_STATE_TOL {
            return Ok(finish(target, p.epsilon, it));
        }
        alpha = alpha * (1.0 - STEADY_STATE_DAMPING) + target * STEADY_STATE_DAMPING;
    }
    Err(Error::NonConvergence { iterations: STEADY_STATE_MAX_ITER, residual })
}

/// Drive that makes a coherent cavity amplitude `alpha` stationary under the
/// mean-field equation `dα/dt = −iΔ_c α − iε* − (κ/2)α` of a cavity damped
/// by `κ D[a]`.
pub fn stationary_drive(delta_c: f64, kappa: f64, alpha: C64) -> C64 {
    (-alpha * C64::new(delta_c, -0.5 * kappa)).conj()
}

fn check_node_layout(layout: &SubsystemLayout) -> Result<()> {
    let d = layout.dims();
    if d.len() != 3 || d[0] != 2 || d[1] < 2 || d[2] < 2 {
        return Err(Error::LayoutMismatch { expected: vec![2, 0, 0], found: d.to_vec() });
    }
    Ok(())
}

/// Node operators embedded at subsystem offset `offset` of a (possibly
/// larger) layout. Qubit operators are the matrices of the basis the
/// Hamiltonian is written in: lab σ for the full model, dressed S for the
/// linearized one.
#[derive(Clone, Debug)]
pub struct NodeOperators {
    pub a: Operator,
    pub b: Operator,
    pub sigma_x: Operator,
    pub sigma_z: Operator,
    pub lower: Operator,
    /// Projector on the qubit level at index 0 (|e⟩, or dressed excited).
    pub excited: Operator,
}

impl NodeOperators {
    pub fn new(layout: &SubsystemLayout, offset: usize) -> Result<Self> {
        let dims = layout.dims();
        if offset + 3 > dims.len() || dims[offset] != 2 {
            return Err(Error::InvalidSelection(format!("no node at offset {offset} of layout {dims:?}")));
        }
        let q = qubit_ops();
        let a = annihilation_op(dims[offset + 1])?;
        let b = annihilation_op(dims[offset + 2])?;
        Ok(Self {
            a: embed(&a, layout, offset + 1)?,
            b: embed(&b, layout, offset + 2)?,
            sigma_x: embed(&q.sigma_x, layout, offset)?,
            sigma_z: embed(&q.sigma_z, layout, offset)?,
            excited: embed(&(&q.s_plus * &q.s_minus), layout, offset)?,
            lower: embed(&q.s_minus, layout, offset)?,
        })
    }

    pub fn n_a(&self) -> Operator {
        &self.a.dagger() * &self.a
    }

    pub fn n_b(&self) -> Operator {
        &self.b.dagger() * &self.b
    }

    pub fn x_b(&self) -> Operator {
        &self.b.dagger() + &self.b
    }
}

/// Full three-body Hamiltonian in the lab qubit basis:
/// `Δ'_c a†a + ω_m b†b + g0 a†a(b†+b) + Λ(b†+b)σ_z + (Ω/2)σ_x + (Δ_q/2)σ_z
///  + (ε a + ε* a†)`.
pub fn build_h_full(p: &NodeParams, layout: &SubsystemLayout) -> Result<Operator> {
    check_node_layout(layout)?;
    let ops = NodeOperators::new(layout, 0)?;
    let n_a = ops.n_a();
    let x_b = ops.x_b();
    let mut h = p.delta_c_prime * &n_a + p.omega_m * ops.n_b();
    h = h + p.g0 * (&n_a * &x_b) + p.lambda * (&x_b * &ops.sigma_z);
    h = h + (0.5 * p.omega) * &ops.sigma_x;
    if p.delta_q != 0.0 {
        h = h + (0.5 * p.delta_q) * &ops.sigma_z;
    }
    h = h + p.epsilon * &ops.a + p.epsilon.conj() * &ops.a.dagger();
    Ok(h)
}

/// Linearized Hamiltonian in the dressed qubit basis:
/// `Δ_c a†a + ω_m b†b + (G a† + G* a)(b†+b) + (Ω/2)S_z + Λ(b†+b)S_x
///  + (Δ̃_q/2)S_x`.
pub fn build_h_linearized(p: &NodeParams, ss: &SteadyState, layout: &SubsystemLayout) -> Result<Operator> {
    check_node_layout(layout)?;
    node_h_linearized(p, ss, &NodeOperators::new(layout, 0)?)
}

/// Linearized node Hamiltonian built from already-embedded operators, so the
/// same code serves single nodes and networks.
pub(crate) fn node_h_linearized(p: &NodeParams, ss: &SteadyState, ops: &NodeOperators) -> Result<Operator> {
    let x_b = ops.x_b();
    let (s_z, s_x) = (&ops.sigma_z, &ops.sigma_x);
    let mut h = ss.delta_c * ops.n_a() + p.omega_m * ops.n_b();
    let field = ss.g * &ops.a.dagger() + ss.g.conj() * &ops.a;
    h = h + &field * &x_b;
    h = h + (0.5 * p.omega) * s_z + p.lambda * (&x_b * s_x);
    if ss.delta_q_tilde != 0.0 {
        h = h + (0.5 * ss.delta_q_tilde) * s_x;
    }
    Ok(h)
}

/// Change of qubit basis into the dressed frame.
#[derive(Clone, Debug)]
pub struct DressedBasis {
    /// Hadamard-type unitary with `U σ_x U† = S_z`, `U σ_z U† = S_x`.
    pub u: Operator,
    pub s_x: Operator,
    pub s_z: Operator,
    pub s_minus: Operator,
    pub s_plus: Operator,
}

/// The dressed-basis map `σ_z → S_x`, `σ_x → S_z`. The returned S operators
/// are matrices in the dressed eigenbasis of `S_z` (excited first).
pub fn dressed_basis_map() -> DressedBasis {
    let q = qubit_ops();
    let u = (&q.sigma_x + &q.sigma_z).scale(FRAC_1_SQRT_2);
    DressedBasis {
        s_x: q.sigma_z.conjugate_by(&u),
        s_z: q.sigma_x.conjugate_by(&u),
        s_minus: q.s_minus,
        s_plus: q.s_plus,
        u,
    }
}

/// Effective Raman coupling `ζ = ΛG/(Δ_c − ω_m)` of the far-detuned
/// qubit–mechanics–cavity exchange.
pub fn effective_raman_coupling(lambda: f64, g: C64, delta_c: f64, omega_m: f64) -> Result<C64> {
    let denom = delta_c - omega_m;
    if denom.abs() <= f64::EPSILON * delta_c.abs().max(omega_m.abs()).max(1.0) {
        return Err(Error::Resonance(format!(
            "Delta_c = omega_m = {omega_m}: the Raman description does not apply on resonance"
        )));
    }
    Ok(g * lambda / denom)
}
