use super::{
    generator::{assemble_generator, NetworkSpec},
    integrate::{propagate, Propagation},
};
use crate::error::{Error, Result};
use crate::quantum::{partial_trace, trace_distance, DensityMatrix};

/// Maximum trace distance between the reduced states of node 1 when node 2's
/// couplings `(G, Λ, Ω)` are at their configured values versus switched off.
/// A cascaded network gives a result at integrator round-off.
pub fn unidirectionality_check(spec: &NetworkSpec, rho0: &DensityMatrix, t_end: f64, dt: f64, sample_every: usize) -> Result<f64> {
    if spec.nodes.len() != 2 {
        return Err(Error::Unsupported("unidirectionality check needs exactly two nodes".into()));
    }
    let mut decoupled = spec.clone();
    {
        let node = &mut decoupled.nodes[1];
        node.params.lambda = 0.0;
        node.params.omega = 0.0;
        node.steady.g = num_complex::Complex64::new(0.0, 0.0);
    }
    let node1: Vec<usize> = (0..spec.node_layout.len()).collect();
    let times: Vec<f64> = {
        let opts = Propagation::new(t_end, dt);
        let (steps, h) = opts.grid();
        (0..=steps).step_by(sample_every.max(1)).map(|s| s as f64 * h).collect()
    };
    let run = |s: &NetworkSpec| -> Result<Vec<DensityMatrix>> {
        let gen = assemble_generator(s)?;
        let opts = Propagation::new(t_end, dt).sample_every(sample_every).snapshots(times.clone());
        propagate(&gen, rho0, &[], &opts)?
            .snapshots
            .into_iter()
            .map(|(_, rho)| partial_trace(&rho, &node1))
            .collect()
    };
    let coupled = run(spec)?;
    let free = run(&decoupled)?;
    let dists = coupled.iter().zip(&free).map(|(a, b)| trace_distance(a, b)).collect::<Result<Vec<_>>>()?;
    Ok(dists.into_iter().fold(0.0, f64::max))
}
