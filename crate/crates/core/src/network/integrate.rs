use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::{generator::NetworkGenerator, trajectory::{Trajectory, TrajectoryMeta}};
use crate::error::{Error, Result};
use crate::quantum::{max_abs, top_level_population, trace_of_product, DensityMatrix, Operator};

/// Minimum number of RK4 steps per period of the fastest frequency.
pub const STEPS_PER_PERIOD: f64 = 40.0;
pub const TRACE_DRIFT_TOL: f64 = 1e-8;
pub const HERMITICITY_TOL: f64 = 1e-9;
pub const POSITIVITY_FLOOR: f64 = -1e-6;
/// Sampling stride used when none is given.
pub const DEFAULT_SAMPLE_EVERY: usize = 100;

/// Largest step allowed by the fastest frequency `omega_max`.
pub fn max_step(omega_max: f64) -> f64 {
    if omega_max > 0.0 {
        TAU / omega_max / STEPS_PER_PERIOD
    } else {
        f64::INFINITY
    }
}

/// Settings for [`propagate`].
#[derive(Clone, Debug)]
pub struct Propagation {
    pub t_end: f64,
    pub dt: f64,
    pub sample_every: usize,
    /// Subsystems whose top Fock level population is tracked.
    pub monitored: Vec<usize>,
    /// Times at which full states are kept (nearest step).
    pub snapshot_times: Vec<f64>,
}

impl Propagation {
    pub fn new(t_end: f64, dt: f64) -> Self {
        Self { t_end, dt, sample_every: DEFAULT_SAMPLE_EVERY, monitored: Vec::new(), snapshot_times: Vec::new() }
    }

    pub fn sample_every(mut self, n: usize) -> Self {
        self.sample_every = n;
        self
    }

    pub fn monitor(mut self, subsystems: Vec<usize>) -> Self {
        self.monitored = subsystems;
        self
    }

    pub fn snapshots(mut self, times: Vec<f64>) -> Self {
        self.snapshot_times = times;
        self
    }

    /// Number of steps and the effective (possibly shortened) step.
    pub fn grid(&self) -> (usize, f64) {
        let steps = ((self.t_end / self.dt) - 1e-9).ceil().max(1.0) as usize;
        (steps, self.t_end / steps as f64)
    }
}

/// Output of [`propagate`].
#[derive(Clone, Debug)]
pub struct PropagationResult {
    pub trajectory: Trajectory,
    pub snapshots: Vec<(f64, DensityMatrix)>,
    pub final_state: DensityMatrix,
}

/// Classic fixed-step RK4 over the full density matrix, recording the named
/// observables every `sample_every` steps (and at the final step).
///
/// At every sample the trace drift, Hermiticity and positivity guards are
/// enforced; a violation is an error.
pub fn propagate(
    gen: &NetworkGenerator,
    rho0: &DensityMatrix,
    observables: &[(String, Operator)],
    opts: &Propagation,
) -> Result<PropagationResult> {
    gen.layout.check_same(rho0.layout())?;
    for (_, op) in observables {
        gen.layout.check_same(op.layout())?;
    }
    if !(opts.t_end > 0.0) || !(opts.dt > 0.0) {
        return Err(Error::param("t_end/dt", "must both be positive"));
    }
    if opts.sample_every == 0 {
        return Err(Error::param("sample_every", "must be at least 1"));
    }
    let limit = max_step(gen.omega_max);
    if opts.dt > limit * (1.0 + 1e-12) {
        return Err(Error::StepTooLarge { dt: opts.dt, limit });
    }
    let (steps, dt) = opts.grid();
    let snapshot_steps: Vec<usize> = opts
        .snapshot_times
        .iter()
        .map(|&t| ((t / dt).round().max(0.0) as usize).min(steps))
        .collect();

    let n = rho0.dim();
    let trace0 = rho0.trace().re;
    let mut rho = rho0.matrix().clone();
    rho = (&rho + rho.adjoint()) * C64::new(0.5, 0.0);
    let mut scratch = rho.clone();
    let mut k1 = DMatrix::<C64>::zeros(n, n);
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut stage = k1.clone();

    let mut traj = Trajectory::default();
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); observables.len()];
    let mut meta = TrajectoryMeta { steps, dt, ..Default::default() };
    meta.leakage = opts.monitored.iter().map(|&s| (s, 0.0)).collect();
    let mut snapshots = Vec::new();

    for step in 0..=steps {
        let t = step as f64 * dt;
        let is_sample = step % opts.sample_every == 0 || step == steps;
        let is_snapshot = snapshot_steps.contains(&step);
        if is_sample || is_snapshot {
            let state = DensityMatrix::new_unchecked(gen.layout.clone(), rho.clone())?;
            if is_sample {
                check_guards(&state, trace0, t, &mut meta)?;
                traj.times.push(t);
                for (col, (_, op)) in cols.iter_mut().zip(observables) {
                    col.push(trace_of_product(op.matrix(), &rho).re);
                }
                for entry in meta.leakage.iter_mut() {
                    entry.1 = entry.1.max(top_level_population(&state, entry.0)?);
                }
            }
            if is_snapshot {
                snapshots.push((t, state));
            }
        }
        if step == steps {
            break;
        }
        gen.apply_hermitian_into(&rho, &mut k1, &mut scratch);
        stage.copy_from(&rho);
        axpy(&mut stage, C64::new(0.5 * dt, 0.0), &k1);
        gen.apply_hermitian_into(&stage, &mut k2, &mut scratch);
        stage.copy_from(&rho);
        axpy(&mut stage, C64::new(0.5 * dt, 0.0), &k2);
        gen.apply_hermitian_into(&stage, &mut k3, &mut scratch);
        stage.copy_from(&rho);
        axpy(&mut stage, C64::new(dt, 0.0), &k3);
        gen.apply_hermitian_into(&stage, &mut k4, &mut scratch);
        let w = C64::new(dt / 6.0, 0.0);
        axpy(&mut rho, w, &k1);
        axpy(&mut rho, w * 2.0, &k2);
        axpy(&mut rho, w * 2.0, &k3);
        axpy(&mut rho, w, &k4);
    }

    for ((name, _), col) in observables.iter().zip(cols) {
        traj.push_column(name.clone(), col)?;
    }
    traj.meta = meta;
    let final_state = DensityMatrix::new_unchecked(gen.layout.clone(), rho)?;
    Ok(PropagationResult { trajectory: traj, snapshots, final_state })
}

fn axpy(y: &mut DMatrix<C64>, a: C64, x: &DMatrix<C64>) {
    for (yi, xi) in y.as_mut_slice().iter_mut().zip(x.as_slice()) {
        *yi += a * xi;
    }
}

/// RK4 integration returning the sampled observables.
pub fn integrate(
    gen: &NetworkGenerator,
    rho0: &DensityMatrix,
    t_end: f64,
    dt: f64,
    observables: &[(String, Operator)],
    sample_every: usize,
) -> Result<Trajectory> {
    let opts = Propagation::new(t_end, dt).sample_every(sample_every);
    Ok(propagate(gen, rho0, observables, &opts)?.trajectory)
}

fn check_guards(state: &DensityMatrix, trace0: f64, t: f64, meta: &mut TrajectoryMeta) -> Result<()> {
    let rho = state.matrix();
    let drift = (rho.trace().re - trace0).abs();
    meta.max_trace_drift = meta.max_trace_drift.max(drift);
    if !(drift < TRACE_DRIFT_TOL) {
        return Err(Error::NumericalGuard { time: t, reason: format!("trace drift {drift:e}") });
    }
    let herm = max_abs(&(rho - rho.adjoint()));
    meta.max_hermiticity_error = meta.max_hermiticity_error.max(herm);
    if !(herm < HERMITICITY_TOL) {
        return Err(Error::NumericalGuard { time: t, reason: format!("hermiticity error {herm:e}") });
    }
    if !positive_above(rho, POSITIVITY_FLOOR) {
        return Err(Error::NumericalGuard {
            time: t,
            reason: format!("density matrix has an eigenvalue below {POSITIVITY_FLOOR:e}"),
        });
    }
    Ok(())
}

/// True when every eigenvalue of the Hermitian part of `rho` exceeds
/// `floor`: `ρ − floor·I` then admits a Cholesky factorisation.
pub(crate) fn positive_above(rho: &DMatrix<C64>, floor: f64) -> bool {
    let n = rho.nrows();
    let mut shifted = (rho + rho.adjoint()) * C64::new(0.5, 0.0);
    for i in 0..n {
        shifted[(i, i)] -= C64::new(floor, 0.0);
    }
    nalgebra::Cholesky::new(shifted).is_some()
}
