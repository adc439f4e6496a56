//! Full three-body dynamics against the linearized model.
//!
//! The full model is driven so that the cavity sits at a coherent amplitude
//! `α_s` and the mirror at `β = −g0|α_s|²/ω_m`; the linearized model starts
//! from the undisplaced state with `G = g0 α_s`. Both are written in the
//! dressed qubit basis and the excited-state populations are compared.

use serde_json::json;

use super::bundle::ResultBundle;
use super::config::{ParamEcho, ScenarioConfig, ScenarioKind, Source};
use super::runs::{NodeInputs, RunControl};
use crate::error::{Error, Result};
use crate::network::{assemble_generator, propagate, Dissipator, NetworkGenerator, NetworkSpec, Propagation};
use crate::node::{build_h_full, dressed_basis_map, stationary_drive, NodeOperators, NodeParams};
use crate::quantum::{coherent_state, displacement_op, embed, fock_state, pure_qubit, thermal_state, Operator, SubsystemLayout};
use crate::C64;

/// Maximum allowed deviation of the dressed excited-state population.
pub const LINEARIZATION_TOLERANCE: f64 = 0.05;

pub fn run_linearization_check(cfg: &ScenarioConfig) -> Result<ResultBundle> {
    let mut echo = ParamEcho::default();
    let alpha = echo.pick("alpha_s", cfg.alpha_s, 2.0);
    if !(0.0..=3.0).contains(&alpha) {
        return Err(Error::Config(format!("alpha_s must lie in [0, 3], got {alpha}")));
    }
    let defaults = NodeInputs {
        g: 5.0,
        lambda: 5.0,
        omega: 0.0,
        delta_c: 0.0,
        omega_m: 33.0 / 0.9,
        gamma_q: 0.002,
        gamma_m: 0.0,
        g0: 0.0,
        xi: 1.0,
        nbar: 0.2,
    };
    if cfg.g0.is_some() {
        return Err(Error::Config("g0 is fixed by G/alpha_s in linearization_check".into()));
    }
    let mut inputs = NodeInputs::resolve(cfg, &mut echo, defaults, 0.9)?;
    echo.entries.remove("g0");
    if alpha == 0.0 {
        inputs.g = 0.0;
        echo.record("G", 0.0, Source::Derived);
    }
    let g0 = if alpha > 0.0 { inputs.g / alpha } else { 0.0 };
    echo.derived("g0", g0);

    let n_a = echo.pick_usize("N_a", cfg.N_a, 4);
    let n_b = echo.pick_usize("N_b", cfg.N_b, 6);
    let min_full = (alpha * alpha + 4.0 * alpha).ceil() as usize;
    let n_a_full = echo.pick_usize("N_a_full", cfg.N_a_full, (min_full + 4).max(n_a));
    let n_b_full = echo.pick_usize("N_b_full", cfg.N_b_full, n_b + 2);
    if n_a < 2 || n_b < 2 || n_a_full < min_full.max(2) || n_b_full < 2 {
        return Err(Error::Config(format!("truncations too small: N_a_full must be at least {min_full}")));
    }
    let ctl = RunControl::resolve(cfg, &mut echo, 1.0, 1)?;
    if !ctl.wigner_times.is_empty() {
        return Err(Error::Config("wigner_snapshots are not supported by linearization_check".into()));
    }

    // linearized model in the displaced frame
    let lin_node = NodeInputs { g0: 0.0, ..inputs }.build(&mut echo)?;
    let lin_spec = NetworkSpec::new(vec![lin_node], n_a, n_b)?;
    let lin_gen = assemble_generator(&lin_spec)?;
    let dt = ctl.dt(lin_spec.omega_max());
    echo.derived("dt", dt);

    // full model, lab qubit basis rotated into the dressed frame
    let beta = if inputs.omega_m > 0.0 { -g0 * alpha * alpha / inputs.omega_m } else { 0.0 };
    let mut p = NodeParams::new(1.0, inputs.xi);
    p.omega_m = inputs.omega_m;
    p.gamma_q = inputs.gamma_q;
    p.lambda = inputs.lambda;
    p.omega = inputs.omega;
    p.g0 = g0;
    p.delta_c_prime = inputs.delta_c - 2.0 * g0 * beta;
    p.delta_q = -4.0 * beta * inputs.lambda;
    p.epsilon = stationary_drive(inputs.delta_c, p.kappa(), C64::new(alpha, 0.0));
    echo.derived("beta", beta);
    echo.derived("Delta_c_prime", p.delta_c_prime);
    echo.derived("Delta_q", p.delta_q);
    echo.derived("epsilon_re", p.epsilon.re);
    echo.derived("epsilon_im", p.epsilon.im);

    let full_layout = SubsystemLayout::node(n_a_full, n_b_full)?;
    let u = embed(&dressed_basis_map().u, &full_layout, 0)?;
    let h_full = build_h_full(&p, &full_layout)?.conjugate_by(&u);
    let ops = NodeOperators::new(&full_layout, 0)?;
    let width = spectral_width(&h_full);
    let (_, h) = Propagation::new(ctl.t_end, dt).grid();
    let sub = ((h / ctl.dt(width)).ceil() as usize).max(1);
    echo.derived("full_substeps", sub);
    let full_gen = NetworkGenerator::from_parts(
        h_full,
        vec![
            Dissipator { label: "gamma_q".into(), rate: p.gamma_q, jump: ops.lower.clone() },
            Dissipator { label: "kappa".into(), rate: p.kappa(), jump: ops.a.clone() },
        ],
        vec![],
        width.max(lin_spec.omega_max()),
    )?;

    let lin_rho0 = pure_qubit(true).kron(&fock_state(0, n_a)?).kron(&thermal_state(inputs.nbar, n_b)?);
    let mech = thermal_state(inputs.nbar, n_b_full)?.transform(&displacement_op(C64::new(beta, 0.0), n_b_full)?)?;
    let full_rho0 = pure_qubit(true).kron(&coherent_state(C64::new(alpha, 0.0), n_a_full)?).kron(&mech);

    let lin_ops = NodeOperators::new(&lin_spec.layout(), 0)?;
    let lin = propagate(
        &lin_gen,
        &lin_rho0,
        &[("pop_e".into(), lin_ops.excited.clone())],
        &Propagation::new(ctl.t_end, dt).sample_every(ctl.sample_every).monitor(vec![1, 2]),
    )?;
    let full = propagate(
        &full_gen,
        &full_rho0,
        &[("pop_e".into(), ops.excited.clone())],
        &Propagation::new(ctl.t_end, h / sub as f64).sample_every(ctl.sample_every * sub).monitor(vec![1, 2]),
    )?;

    let lin_pop = lin.trajectory.column("pop_e").unwrap_or_default();
    let full_pop = full.trajectory.column("pop_e").unwrap_or_default();
    if lin_pop.len() != full_pop.len() {
        return Err(Error::InvalidSelection("linearized and full sample grids differ".into()));
    }
    let deviation: Vec<f64> = lin_pop.iter().zip(full_pop).map(|(a, b)| (a - b).abs()).collect();
    let max_dev = deviation.iter().copied().fold(0.0, f64::max);

    let mut traj = lin.trajectory.clone();
    traj.columns.clear();
    traj.push_column("pop_e_full", full_pop.to_vec())?;
    traj.push_column("pop_e_linear", lin_pop.to_vec())?;
    traj.push_column("deviation", deviation)?;
    traj.meta.max_trace_drift = lin.trajectory.meta.max_trace_drift.max(full.trajectory.meta.max_trace_drift);
    traj.meta.max_hermiticity_error = lin.trajectory.meta.max_hermiticity_error.max(full.trajectory.meta.max_hermiticity_error);

    let mut bundle = ResultBundle::new(ScenarioKind::LinearizationCheck, echo);
    let lin_leak = ctl.check_leakage(&lin.trajectory, &["qubit", "cavity", "mechanics"], &mut bundle.warnings)?;
    let full_leak = ctl.check_leakage(&full.trajectory, &["qubit", "cavity_full", "mechanics_full"], &mut bundle.warnings)?;
    bundle.set("max_deviation", max_dev);
    bundle.set("tolerance", LINEARIZATION_TOLERANCE);
    bundle.set("pass", max_dev < LINEARIZATION_TOLERANCE);
    bundle.set("eta", if inputs.omega_m > 0.0 { g0 / inputs.omega_m } else { 0.0 });
    bundle.set("leakage_max", json!({ "linear": lin_leak, "full": full_leak }));
    bundle.set("max_trace_drift", traj.meta.max_trace_drift);
    if max_dev >= LINEARIZATION_TOLERANCE {
        bundle.warnings.push(format!("linearization deviation {max_dev:.3e} exceeds {LINEARIZATION_TOLERANCE}"));
    }
    bundle.trajectory = Some(traj);
    Ok(bundle)
}

/// `E_max − E_min` of a Hermitian operator.
fn spectral_width(h: &Operator) -> f64 {
    let e = h.matrix().clone().symmetric_eigenvalues();
    e.max() - e.min()
}
