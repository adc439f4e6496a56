//! Single-node swap, two-node transfer and ξ sweep.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde_json::{json, Value};

use super::bundle::{ResultBundle, Table, WignerSnapshot};
use super::config::{check_range, ParamEcho, ScenarioConfig, ScenarioKind};
use super::peaks::{first_prominent_maximum, global_maximum, refine, value_at, PEAK_PROMINENCE};
use crate::error::{Error, Result};
use crate::network::{
    assemble_generator, collective_mode_observables, propagate, NetworkNode, NetworkSpec, Propagation, PropagationResult,
    Trajectory, STEPS_PER_PERIOD,
};
use crate::node::{effective_raman_coupling, steady_state_amplitudes, NodeOperators, NodeParams, SteadyState};
use crate::quantum::{
    embed, fock_state, partial_trace, pure_qubit, thermal_state, wigner, DensityMatrix, GridSpec, Operator, SubsystemLayout,
};
use crate::C64;

/// Quoted bare optomechanical coupling, 2π·8.3 kHz over κ = 2π·10 MHz.
pub const DEFAULT_G0: f64 = 8.3e-4;
/// Top-Fock-level population above which a run warns.
pub const DEFAULT_LEAKAGE_THRESHOLD: f64 = 1e-3;

/// Integration and output controls shared by the dynamical scenarios.
#[derive(Clone, Debug)]
pub(crate) struct RunControl {
    pub t_end: f64,
    pub dt_factor: f64,
    pub sample_every: usize,
    pub leakage_threshold: f64,
    pub leakage_strict: bool,
    pub wigner_times: Vec<f64>,
    pub grid: GridSpec,
}

impl RunControl {
    pub fn resolve(cfg: &ScenarioConfig, echo: &mut ParamEcho, t_end: f64, sample_every: usize) -> Result<Self> {
        let t_end = echo.pick("t_end", cfg.t_end, t_end);
        if !(t_end > 0.0 && t_end.is_finite()) {
            return Err(Error::Config(format!("t_end must be positive, got {t_end}")));
        }
        let dt_factor = echo.pick("dt_factor", cfg.dt_factor, STEPS_PER_PERIOD);
        if !(dt_factor >= STEPS_PER_PERIOD) {
            return Err(Error::Config(format!("dt_factor must be at least {STEPS_PER_PERIOD}, got {dt_factor}")));
        }
        let sample_every = echo.pick_usize("sample_every", cfg.sample_every, sample_every);
        if sample_every == 0 {
            return Err(Error::Config("sample_every must be at least 1".into()));
        }
        let leakage_threshold = echo.pick("leakage_threshold", cfg.leakage_threshold, DEFAULT_LEAKAGE_THRESHOLD);
        let leakage_strict = cfg.leakage_strict.unwrap_or(false);
        echo.record(
            "leakage_strict",
            leakage_strict,
            if cfg.leakage_strict.is_some() { super::config::Source::Config } else { super::config::Source::Default },
        );
        let mut wigner_times = cfg.wigner_snapshots.clone().unwrap_or_default();
        wigner_times.sort_by(f64::total_cmp);
        wigner_times.dedup();
        for &t in &wigner_times {
            check_range("wigner_snapshots", t, 0.0, t_end)?;
        }
        let mut grid = GridSpec::default();
        if !wigner_times.is_empty() {
            echo.record("wigner_snapshots", wigner_times.clone(), super::config::Source::Config);
            let extent = echo.pick("wigner_extent", cfg.wigner_extent, grid.x_max);
            let points = echo.pick_usize("wigner_points", cfg.wigner_points, grid.nx);
            if !(extent > 0.0) || points < 2 {
                return Err(Error::Config("wigner_extent must be positive and wigner_points at least 2".into()));
            }
            grid = GridSpec { x_min: -extent, x_max: extent, nx: points, p_min: -extent, p_max: extent, np: points };
        }
        Ok(Self { t_end, dt_factor, sample_every, leakage_threshold, leakage_strict, wigner_times, grid })
    }

    pub fn dt(&self, omega_max: f64) -> f64 {
        2.0 * PI / omega_max / self.dt_factor
    }

    pub fn propagation(&self, dt: f64, monitored: Vec<usize>) -> Propagation {
        Propagation::new(self.t_end, dt)
            .sample_every(self.sample_every)
            .monitor(monitored)
            .snapshots(self.wigner_times.clone())
    }

    /// Turns leakage maxima into warnings, or an error in strict mode.
    pub fn check_leakage(&self, traj: &Trajectory, names: &[&str], warnings: &mut Vec<String>) -> Result<BTreeMap<String, f64>> {
        let mut out = BTreeMap::new();
        for &(sub, pop) in &traj.meta.leakage {
            let name = names.get(sub).copied().unwrap_or("subsystem");
            out.insert(name.to_string(), pop);
            if pop > self.leakage_threshold {
                if self.leakage_strict {
                    return Err(Error::Leakage { subsystem: sub, population: pop, threshold: self.leakage_threshold });
                }
                warnings.push(format!(
                    "top Fock level of {name} reached population {pop:.3e} (threshold {:.1e}); truncation may be too small",
                    self.leakage_threshold
                ));
            }
        }
        Ok(out)
    }
}

/// Node rates in κ-units as read from a configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct NodeInputs {
    pub g: f64,
    pub lambda: f64,
    pub omega: f64,
    pub delta_c: f64,
    pub omega_m: f64,
    pub gamma_q: f64,
    pub gamma_m: f64,
    pub g0: f64,
    pub xi: f64,
    pub nbar: f64,
}

impl NodeInputs {
    /// Reads node parameters; `ratio` sets the default `Δ_c = Ω = ratio·ω_m`.
    pub fn resolve(cfg: &ScenarioConfig, echo: &mut ParamEcho, d: NodeInputs, ratio: f64) -> Result<Self> {
        let omega_m = echo.pick("omega_m", cfg.omega_m, d.omega_m);
        let out = Self {
            g: echo.pick("G", cfg.G, d.g),
            lambda: echo.pick("Lambda", cfg.Lambda, d.lambda),
            omega: echo.pick("Omega", cfg.Omega, ratio * omega_m),
            delta_c: echo.pick("Delta_c", cfg.Delta_c, ratio * omega_m),
            omega_m,
            gamma_q: echo.pick("gamma_q", cfg.gamma_q, d.gamma_q),
            gamma_m: echo.pick("gamma_m", cfg.gamma_m, d.gamma_m),
            g0: echo.pick("g0", cfg.g0, d.g0),
            xi: echo.pick("xi", cfg.xi, d.xi),
            nbar: echo.pick("nbar_init", cfg.nbar_init, d.nbar),
        };
        for (name, v) in [
            ("G", out.g),
            ("Lambda", out.lambda),
            ("Omega", out.omega),
            ("omega_m", out.omega_m),
            ("gamma_q", out.gamma_q),
            ("gamma_m", out.gamma_m),
            ("g0", out.g0),
            ("nbar_init", out.nbar),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be finite and non-negative, got {v}")));
            }
        }
        if !out.delta_c.is_finite() {
            return Err(Error::Config("Delta_c must be finite".into()));
        }
        check_range("xi", out.xi, 0.0, 1.0)?;
        Ok(out)
    }

    /// Node whose linearized couplings are exactly `G`, `Δ_c` and `Δ̃_q = 0`.
    ///
    /// With `g0 > 0` the drive, bare detunings and steady-state amplitudes
    /// that produce these values are solved for and echoed.
    pub fn build(&self, echo: &mut ParamEcho) -> Result<NetworkNode> {
        let mut p = NodeParams::new(1.0, self.xi);
        p.omega_m = self.omega_m;
        p.gamma_q = self.gamma_q;
        p.gamma_m = self.gamma_m;
        p.lambda = self.lambda;
        p.omega = self.omega;
        p.nbar_init = self.nbar;
        let mut steady = if self.g0 > 0.0 && self.g > 0.0 {
            if !(self.omega_m > 0.0) {
                return Err(Error::Config("omega_m must be positive when g0 is set".into()));
            }
            p.g0 = self.g0;
            p.g_target = Some(self.g);
            p.delta_c_prime = self.delta_c + 2.0 * self.g * self.g / self.omega_m;
            p.delta_q = 2.0 * self.g * self.g * self.lambda / (self.g0 * self.omega_m);
            let ss = steady_state_amplitudes(&p)?;
            echo.derived("alpha_s", ss.alpha_s.re);
            echo.derived("beta_s", ss.beta_s);
            echo.derived("Delta_c_prime", p.delta_c_prime);
            echo.derived("Delta_q", p.delta_q);
            echo.derived("epsilon_re", ss.epsilon.re);
            echo.derived("epsilon_im", ss.epsilon.im);
            ss
        } else {
            SteadyState::from_linearized(C64::new(self.g, 0.0), self.delta_c)
        };
        steady.g = C64::new(self.g, 0.0);
        steady.delta_c = self.delta_c;
        steady.delta_q_tilde = 0.0;
        Ok(NetworkNode { params: p, steady })
    }
}

fn node_state(excited: bool, n_a: usize, n_b: usize, nbar: f64) -> Result<DensityMatrix> {
    Ok(pure_qubit(excited).kron(&fock_state(0, n_a)?).kron(&thermal_state(nbar, n_b)?))
}

fn truncation(cfg: &ScenarioConfig, echo: &mut ParamEcho, n_a: usize, n_b: usize) -> Result<(usize, usize)> {
    let n_a = echo.pick_usize("N_a", cfg.N_a, n_a);
    let n_b = echo.pick_usize("N_b", cfg.N_b, n_b);
    if n_a < 2 || n_b < 2 {
        return Err(Error::Config("N_a and N_b must be at least 2".into()));
    }
    Ok((n_a, n_b))
}

fn snapshots_to_wigners(res: &PropagationResult, ctl: &RunControl, subsystems: &[(usize, &str)]) -> Result<Vec<WignerSnapshot>> {
    let mut out = Vec::new();
    for (&requested, (time, rho)) in ctl.wigner_times.iter().zip(&res.snapshots) {
        for &(pos, name) in subsystems {
            let reduced = partial_trace(rho, &[pos])?;
            out.push(WignerSnapshot { subsystem: name.to_string(), requested, time: *time, grid: wigner(&reduced, &ctl.grid)? });
        }
    }
    Ok(out)
}

fn record_meta(bundle: &mut ResultBundle, traj: &Trajectory, leakage: BTreeMap<String, f64>) {
    bundle.set("steps", traj.meta.steps);
    bundle.set("dt", traj.meta.dt);
    bundle.set("max_trace_drift", traj.meta.max_trace_drift);
    bundle.set("max_hermiticity_error", traj.meta.max_hermiticity_error);
    bundle.set("leakage_max", json!(leakage));
}

fn opt(v: Option<f64>) -> Value {
    v.map_or(Value::Null, Value::from)
}

/// Swap-point summary of a single-node trajectory.
///
/// `t1` is the first prominent maximum of `n_a` (the photon has been
/// emitted) and `F1` the photon fidelity there; `t2`, `F2` the next
/// prominent maximum of the qubit fidelity. The first prominent maximum of
/// the photon fidelity itself is reported separately.
pub fn summarize_single(traj: &Trajectory) -> Result<BTreeMap<String, Value>> {
    let col = |name: &str| traj.column(name).ok_or_else(|| Error::InvalidSelection(format!("missing column {name}")));
    let (t, n_a, f_photon, f_qubit) = (&traj.times, col("n_a")?, col("F_photon")?, col("F_qubit")?);
    let mut s = BTreeMap::new();
    let swap = first_prominent_maximum(n_a, 0, PEAK_PROMINENCE).map(|i| refine(t, n_a, i));
    s.insert("t1".into(), opt(swap.map(|p| p.time)));
    s.insert("n_a_peak".into(), opt(swap.map(|p| p.value)));
    s.insert("F1".into(), opt(swap.map(|p| value_at(t, f_photon, &p))));
    let back = swap
        .and_then(|p| first_prominent_maximum(f_qubit, p.index + 1, PEAK_PROMINENCE))
        .map(|i| refine(t, f_qubit, i));
    s.insert("t2".into(), opt(back.map(|p| p.time)));
    s.insert("F2".into(), opt(back.map(|p| p.value)));
    let fp = first_prominent_maximum(f_photon, 0, PEAK_PROMINENCE).map(|i| refine(t, f_photon, i));
    s.insert("t_F_photon_peak".into(), opt(fp.map(|p| p.time)));
    s.insert("F_photon_peak".into(), opt(fp.map(|p| p.value)));
    Ok(s)
}

/// Transfer summary of a two-node trajectory: global maximum of `pop_e_B`
/// and the decay-limited bound `exp(−γ_q t_d)`.
pub fn summarize_two_node(traj: &Trajectory, gamma_q: f64) -> Result<BTreeMap<String, Value>> {
    let col = |name: &str| traj.column(name).ok_or_else(|| Error::InvalidSelection(format!("missing column {name}")));
    let pop_b = col("pop_e_B")?;
    let max_of = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut s = BTreeMap::new();
    let peak = global_maximum(pop_b).map(|i| refine(&traj.times, pop_b, i));
    s.insert("peak_pop_e_B".into(), opt(peak.map(|p| p.value)));
    s.insert("t_d".into(), opt(peak.map(|p| p.time)));
    s.insert("F_B_peak".into(), opt(peak.map(|p| p.value.max(0.0).sqrt())));
    s.insert("decay_bound".into(), opt(peak.map(|p| (-gamma_q * p.time).exp())));
    s.insert("max_n_sym".into(), json!(max_of(col("n_sym")?)));
    s.insert("max_n_antisym".into(), json!(max_of(col("n_antisym")?)));
    Ok(s)
}

/// `√max(x, 0)` column-wise.
fn sqrt_column(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| x.max(0.0).sqrt()).collect()
}

fn projector(level: usize, dim: usize, layout: &SubsystemLayout, pos: usize) -> Result<Operator> {
    let p = fock_state(level, dim)?.as_operator();
    embed(&p, layout, pos)
}

pub fn run_single_node_swap(cfg: &ScenarioConfig) -> Result<ResultBundle> {
    let mut echo = ParamEcho::default();
    let defaults = NodeInputs {
        g: 5.0,
        lambda: 5.0,
        omega: 0.0,
        delta_c: 0.0,
        omega_m: 33.0 / 0.9,
        gamma_q: 0.002,
        gamma_m: 0.0,
        g0: DEFAULT_G0,
        xi: 1.0,
        nbar: 0.2,
    };
    let inputs = NodeInputs::resolve(cfg, &mut echo, defaults, 0.9)?;
    let (n_a, n_b) = truncation(cfg, &mut echo, 4, 6)?;
    let ctl = RunControl::resolve(cfg, &mut echo, 1.0, 1)?;
    let node = inputs.build(&mut echo)?;
    let spec = NetworkSpec::new(vec![node], n_a, n_b)?;
    let layout = spec.layout();
    let gen = assemble_generator(&spec)?;
    let dt = ctl.dt(spec.omega_max());
    echo.derived("omega_max", spec.omega_max());
    echo.derived("dt", dt);

    let ops = NodeOperators::new(&layout, 0)?;
    let observables = vec![
        ("pop_e".to_string(), ops.excited.clone()),
        ("n_a".to_string(), ops.n_a()),
        ("n_b".to_string(), ops.n_b()),
        ("p1_photon".to_string(), projector(1, n_a, &layout, 1)?),
    ];
    let rho0 = node_state(true, n_a, n_b, inputs.nbar)?;
    let res = propagate(&gen, &rho0, &observables, &ctl.propagation(dt, vec![1, 2]))?;

    let mut traj = res.trajectory.clone();
    let p1 = traj.columns.pop().map(|(_, c)| c).unwrap_or_default();
    let f_photon = sqrt_column(&p1);
    let f_qubit = sqrt_column(traj.column("pop_e").unwrap_or_default());
    traj.push_column("F_photon", f_photon)?;
    traj.push_column("F_qubit", f_qubit)?;
    traj.validate()?;

    let mut bundle = ResultBundle::new(ScenarioKind::SingleNodeSwap, echo);
    let leakage = ctl.check_leakage(&traj, &["qubit", "cavity", "mechanics"], &mut bundle.warnings)?;
    for (k, v) in summarize_single(&traj)? {
        if v.is_null() {
            bundle.warnings.push(format!("{k}: no qualifying peak in the simulated window"));
        }
        bundle.summary.insert(k, v);
    }
    record_meta(&mut bundle, &traj, leakage);
    bundle.wigners = snapshots_to_wigners(&res, &ctl, &[(1, "cavity"), (2, "mechanics")])?;
    bundle.trajectory = Some(traj);
    Ok(bundle)
}

fn two_node_defaults() -> NodeInputs {
    NodeInputs {
        g: 1.8,
        lambda: 4.0,
        omega: 0.0,
        delta_c: 0.0,
        omega_m: 36.67,
        gamma_q: 0.002,
        gamma_m: 0.0,
        g0: DEFAULT_G0,
        xi: 1.0,
        nbar: 0.1,
    }
}

pub fn run_two_node_transfer(cfg: &ScenarioConfig) -> Result<ResultBundle> {
    let mut echo = ParamEcho::default();
    let inputs = NodeInputs::resolve(cfg, &mut echo, two_node_defaults(), 0.1)?;
    two_node_with(cfg, echo, inputs)
}

fn two_node_with(cfg: &ScenarioConfig, mut echo: ParamEcho, inputs: NodeInputs) -> Result<ResultBundle> {
    let (n_a, n_b) = truncation(cfg, &mut echo, 3, 3)?;
    let ctl = RunControl::resolve(cfg, &mut echo, 100.0, 5)?;
    let fibre_phase = echo.pick("fibre_phase", cfg.fibre_phase, 0.0);
    let node = inputs.build(&mut echo)?;
    let mut spec = NetworkSpec::new(vec![node.clone(), node], n_a, n_b)?;
    spec.fibre_phase = fibre_phase;
    let layout = spec.layout();
    let gen = assemble_generator(&spec)?;
    let dt = ctl.dt(spec.omega_max());
    echo.derived("omega_max", spec.omega_max());
    echo.derived("dt", dt);
    if inputs.delta_c != inputs.omega_m {
        let zeta = effective_raman_coupling(inputs.lambda, C64::new(inputs.g, 0.0), inputs.delta_c, inputs.omega_m)?;
        echo.derived("zeta_abs", zeta.norm());
    }

    let a = NodeOperators::new(&layout, 0)?;
    let b = NodeOperators::new(&layout, 3)?;
    let (n_sym, n_antisym) = collective_mode_observables(&layout)?;
    let observables = vec![
        ("pop_e_A".to_string(), a.excited.clone()),
        ("pop_e_B".to_string(), b.excited.clone()),
        ("n_a1".to_string(), a.n_a()),
        ("n_a2".to_string(), b.n_a()),
        ("n_b1".to_string(), a.n_b()),
        ("n_b2".to_string(), b.n_b()),
        ("n_sym".to_string(), n_sym),
        ("n_antisym".to_string(), n_antisym),
    ];
    let rho0 = node_state(true, n_a, n_b, inputs.nbar)?.kron(&node_state(false, n_a, n_b, inputs.nbar)?);
    let res = propagate(&gen, &rho0, &observables, &ctl.propagation(dt, vec![1, 2, 4, 5]))?;
    let mut traj = res.trajectory.clone();
    let f_b = sqrt_column(traj.column("pop_e_B").unwrap_or_default());
    traj.push_column("F_B", f_b)?;
    traj.validate()?;

    let mut bundle = ResultBundle::new(ScenarioKind::TwoNodeTransfer, echo);
    let names = ["qubit_A", "cavity_A", "mechanics_A", "qubit_B", "cavity_B", "mechanics_B"];
    let leakage = ctl.check_leakage(&traj, &names, &mut bundle.warnings)?;
    bundle.summary.extend(summarize_two_node(&traj, inputs.gamma_q)?);
    record_meta(&mut bundle, &traj, leakage);
    bundle.wigners = snapshots_to_wigners(&res, &ctl, &[(1, "cavity_A"), (2, "mechanics_A"), (4, "cavity_B"), (5, "mechanics_B")])?;
    bundle.trajectory = Some(traj);
    Ok(bundle)
}

/// Runs the two-node transfer once per ξ in `cfg.xi_values`.
pub fn run_xi_sweep(cfg: &ScenarioConfig) -> Result<ResultBundle> {
    let values = cfg.xi_values.clone().unwrap_or_default();
    if values.is_empty() {
        return Err(Error::Config("xi_sweep needs a non-empty `xi_values` list".into()));
    }
    if cfg.xi.is_some() {
        return Err(Error::Config("set `xi_values`, not `xi`, for a sweep".into()));
    }
    for &xi in &values {
        check_range("xi_values", xi, 0.0, 1.0)?;
    }
    let mut echo = ParamEcho::default();
    echo.record("xi_values", values.clone(), super::config::Source::Config);
    let mut bundle = ResultBundle::new(ScenarioKind::XiSweep, ParamEcho::default());
    let mut table = Table { headers: ["xi", "peak_pop_e_B", "F_B_peak", "t_d"].map(String::from).to_vec(), rows: Vec::new() };
    for (k, &xi) in values.iter().enumerate() {
        let mut point_echo = ParamEcho::default();
        let mut inputs = NodeInputs::resolve(cfg, &mut point_echo, two_node_defaults(), 0.1)?;
        inputs.xi = xi;
        point_echo.record("xi", xi, super::config::Source::Config);
        let child = two_node_with(cfg, point_echo, inputs)?;
        let get = |key: &str| child.scalar(key).unwrap_or(f64::NAN);
        table.rows.push(vec![xi, get("peak_pop_e_B"), get("F_B_peak"), get("t_d")]);
        bundle.warnings.extend(child.warnings.iter().map(|w| format!("xi = {xi}: {w}")));
        if k == 0 {
            echo.entries.extend(child.echo.entries.iter().filter(|(name, _)| name.as_str() != "xi").map(|(k, v)| (k.clone(), v.clone())));
        }
        bundle.children.push((format!("xi_{}", super::bundle::time_label(xi)), child));
    }
    bundle.echo = echo;
    let monotone = sweep_is_monotone(&table.rows);
    if !monotone {
        bundle.warnings.push("peak fidelity is not monotone in xi".into());
    }
    bundle.set("monotone_in_xi", monotone);
    bundle.set("xi", json!(table.rows.iter().map(|r| r[0]).collect::<Vec<_>>()));
    bundle.set("F_B_peak", json!(table.rows.iter().map(|r| r[2]).collect::<Vec<_>>()));
    bundle.set("peak_pop_e_B", json!(table.rows.iter().map(|r| r[1]).collect::<Vec<_>>()));
    bundle.set("t_d", json!(table.rows.iter().map(|r| r[3]).collect::<Vec<_>>()));
    bundle.tables.push(("sweep".into(), table));
    Ok(bundle)
}

/// Peak fidelity is nonincreasing as ξ decreases, across points at least
/// 0.05 apart in ξ.
pub fn sweep_is_monotone(rows: &[Vec<f64>]) -> bool {
    let mut pts: Vec<(f64, f64)> = rows.iter().map(|r| (r[0], r[2])).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.iter().enumerate().all(|(i, &(xi, f))| pts[i + 1..].iter().filter(|(x, _)| x - xi >= 0.05 - 1e-12).all(|&(_, g)| g >= f))
}
