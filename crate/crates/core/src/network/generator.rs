use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::sparse::Csr;
use crate::error::{Error, Result};
use crate::node::{node_h_linearized, NodeOperators, NodeParams, SteadyState};
use crate::quantum::{embed, DensityMatrix, Operator, SubsystemLayout};

/// One node of a network: its parameters and linearization point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkNode {
    pub params: NodeParams,
    pub steady: SteadyState,
}

/// Nodes in cascade order (node i feeds node j for i < j), each with the
/// layout `(2, N_a, N_b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkSpec {
    pub nodes: Vec<NetworkNode>,
    pub node_layout: SubsystemLayout,
    /// Propagation phase φ of the fibre between consecutive nodes. The
    /// collective output mode is `√κ_i a_i + e^{iφ}√κ_j a_j`.
    pub fibre_phase: f64,
}

impl NetworkSpec {
    pub fn new(nodes: Vec<NetworkNode>, n_a: usize, n_b: usize) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidSelection("network needs at least one node".into()));
        }
        for n in &nodes {
            n.params.validate()?;
        }
        Ok(Self { nodes, node_layout: SubsystemLayout::node(n_a, n_b)?, fibre_phase: 0.0 })
    }

    pub fn layout(&self) -> SubsystemLayout {
        let mut layout = self.node_layout.clone();
        for _ in 1..self.nodes.len() {
            layout = layout.concat(&self.node_layout);
        }
        layout
    }

    /// Subsystem offset of node `j` in the network layout.
    pub fn offset(&self, j: usize) -> usize {
        j * self.node_layout.len()
    }

    /// Fastest frequency scale `max(ω_m, |Δ_c|, Ω, |G|, Λ, κ)` over all nodes.
    pub fn omega_max(&self) -> f64 {
        self.nodes
            .iter()
            .map(|n| {
                [n.params.omega_m, n.steady.delta_c.abs(), n.params.omega, n.steady.g.norm(), n.params.lambda, n.params.kappa()]
                    .into_iter()
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }
}

/// `rate · D[jump]` with `D[A]ρ = AρA† − ½{A†A, ρ}`.
#[derive(Clone, Debug)]
pub struct Dissipator {
    pub label: String,
    pub rate: f64,
    pub jump: Operator,
}

/// Cascaded coupling from `upstream` (a_i) into `downstream` (a_j):
/// `−strength (e^{−iφ}[a_j†, a_i ρ] + e^{iφ}[ρ a_i†, a_j])`.
#[derive(Clone, Debug)]
pub struct CascadePair {
    pub strength: f64,
    pub phase: f64,
    pub upstream: Operator,
    pub downstream: Operator,
}

/// Right-hand side of the network master equation.
#[derive(Clone, Debug)]
pub struct NetworkGenerator {
    pub layout: SubsystemLayout,
    pub hamiltonian: Operator,
    pub dissipators: Vec<Dissipator>,
    pub cascade_pairs: Vec<CascadePair>,
    /// Fastest frequency scale, used for the step-size rule.
    pub omega_max: f64,
    compiled: Compiled,
}

/// `rhs(X) = −i(K X − X K†) + Σ c A X B†`.
///
/// `halves` holds one term of each Hermitian-conjugate pair of sandwiches
/// (dissipators at half weight), so that for Hermitian X the sandwich sum
/// is `S + S†`.
#[derive(Clone, Debug)]
struct Compiled {
    k: Csr,
    sandwiches: Vec<(C64, Csr, Csr)>,
    halves: Vec<(C64, Csr, Csr)>,
}

impl NetworkGenerator {
    /// Generator from explicit parts.
    pub fn from_parts(
        hamiltonian: Operator,
        dissipators: Vec<Dissipator>,
        cascade_pairs: Vec<CascadePair>,
        omega_max: f64,
    ) -> Result<Self> {
        let layout = hamiltonian.layout().clone();
        for d in &dissipators {
            layout.check_same(d.jump.layout())?;
            if !(d.rate >= 0.0) {
                return Err(Error::param(&d.label, format!("dissipator rate must be >= 0, got {}", d.rate)));
            }
        }
        for c in &cascade_pairs {
            layout.check_same(c.upstream.layout())?;
            layout.check_same(c.downstream.layout())?;
        }
        let i = C64::new(0.0, 1.0);
        let mut k = hamiltonian.clone();
        let mut sandwiches = Vec::new();
        let mut halves = Vec::new();
        for d in dissipators.iter().filter(|d| d.rate > 0.0) {
            let jdj = &d.jump.dagger() * &d.jump;
            k = k - jdj.scale(0.5 * d.rate * i);
            let j = Csr::from_dense(d.jump.matrix());
            sandwiches.push((C64::new(d.rate, 0.0), j.clone(), j.clone()));
            halves.push((C64::new(0.5 * d.rate, 0.0), j.clone(), j));
        }
        for c in cascade_pairs.iter().filter(|c| c.strength != 0.0) {
            let w = C64::from_polar(c.strength, -c.phase);
            k = k + (&c.downstream.dagger() * &c.upstream).scale(-i * w);
            let up = Csr::from_dense(c.upstream.matrix());
            let down = Csr::from_dense(c.downstream.matrix());
            sandwiches.push((w, up.clone(), down.clone()));
            halves.push((w, up.clone(), down.clone()));
            sandwiches.push((w.conj(), down, up));
        }
        let compiled = Compiled { k: Csr::from_dense(k.matrix()), sandwiches, halves };
        Ok(Self { layout, hamiltonian, dissipators, cascade_pairs, omega_max, compiled })
    }

    /// Applies the generator to an arbitrary matrix.
    pub fn apply(&self, x: &DMatrix<C64>) -> DMatrix<C64> {
        let mut out = DMatrix::zeros(x.nrows(), x.ncols());
        self.apply_into(x, &mut out);
        out
    }

    /// `out = rhs(x)`; `out` must already have the shape of `x`.
    pub(crate) fn apply_into(&self, x: &DMatrix<C64>, out: &mut DMatrix<C64>) {
        let i = C64::new(0.0, 1.0);
        out.fill(C64::new(0.0, 0.0));
        self.compiled.k.left_acc(x, -i, out);
        self.compiled.k.right_adjoint_acc(x, i, out);
        for (c, a, b) in &self.compiled.sandwiches {
            Csr::sandwich_acc(a, b, x, *c, out);
        }
    }

    /// `out = rhs(x)` for Hermitian `x`, using `K X = (X K†)†` and pairing
    /// each sandwich with its adjoint. The result is exactly Hermitian.
    pub(crate) fn apply_hermitian_into(&self, x: &DMatrix<C64>, out: &mut DMatrix<C64>, scratch: &mut DMatrix<C64>) {
        let i = C64::new(0.0, 1.0);
        scratch.fill(C64::new(0.0, 0.0));
        self.compiled.k.right_adjoint_acc(x, i, scratch);
        for (c, a, b) in &self.compiled.halves {
            Csr::sandwich_acc(a, b, x, *c, scratch);
        }
        let n = x.nrows();
        let ss = scratch.as_slice();
        let os = out.as_mut_slice();
        for c in 0..n {
            for r in c..n {
                let v = ss[c * n + r] + ss[r * n + c].conj();
                os[c * n + r] = v;
                os[r * n + c] = v.conj();
            }
        }
    }

    pub fn nnz(&self) -> usize {
        self.compiled.k.nnz()
    }
}

/// Assembles the master-equation generator for one or two nodes:
///
/// `rhs(ρ) = −i[H, ρ] + Σ_j γ_q D[S_−,j]ρ + Σ_j κ_j D[a_j]ρ
///          + Σ_j γ_m ((n̄+1)D[b_j] + n̄ D[b_j†])ρ
///          − Σ_{i<j} √(ξ_iξ_jκ_iκ_j)(e^{−iφ}[a_j†, a_iρ] + e^{iφ}[ρa_i†, a_j])`
///
/// with H the sum of the linearized node Hamiltonians. A fibre phase φ = π
/// gives the opposite overall sign of the cross term.
pub fn assemble_generator(spec: &NetworkSpec) -> Result<NetworkGenerator> {
    if spec.nodes.len() > 2 {
        return Err(Error::Unsupported(format!("{} nodes; only one- and two-node networks are supported", spec.nodes.len())));
    }
    let layout = spec.layout();
    let mut h = Operator::zeros(&layout);
    let mut dissipators = Vec::new();
    let mut node_ops = Vec::with_capacity(spec.nodes.len());
    for (j, node) in spec.nodes.iter().enumerate() {
        let ops = NodeOperators::new(&layout, spec.offset(j))?;
        let p = &node.params;
        h = h + node_h_linearized(p, &node.steady, &ops)?;
        dissipators.push(Dissipator { label: format!("gamma_q[{j}]"), rate: p.gamma_q, jump: ops.lower.clone() });
        dissipators.push(Dissipator { label: format!("kappa[{j}]"), rate: p.kappa(), jump: ops.a.clone() });
        if p.gamma_m > 0.0 {
            let nbar = p.nbar_init;
            dissipators.push(Dissipator { label: format!("gamma_m[{j}]"), rate: p.gamma_m * (nbar + 1.0), jump: ops.b.clone() });
            if nbar > 0.0 {
                dissipators.push(Dissipator { label: format!("gamma_m_heat[{j}]"), rate: p.gamma_m * nbar, jump: ops.b.dagger() });
            }
        }
        node_ops.push(ops);
    }
    let mut cascade_pairs = Vec::new();
    for i in 0..spec.nodes.len() {
        for j in i + 1..spec.nodes.len() {
            let (pi, pj) = (&spec.nodes[i].params, &spec.nodes[j].params);
            let strength = (pi.xi() * pj.xi() * pi.kappa() * pj.kappa()).sqrt();
            cascade_pairs.push(CascadePair {
                strength,
                phase: spec.fibre_phase,
                upstream: node_ops[i].a.clone(),
                downstream: node_ops[j].a.clone(),
            });
        }
    }
    NetworkGenerator::from_parts(h, dissipators, cascade_pairs, spec.omega_max())
}

/// `dρ/dt` for a density matrix.
pub fn rhs(gen: &NetworkGenerator, rho: &DensityMatrix) -> Result<DensityMatrix> {
    gen.layout.check_same(rho.layout())?;
    DensityMatrix::new_unchecked(gen.layout.clone(), gen.apply(rho.matrix()))
}

/// Number operators of the collective cavity modes `c_± = (a₁ ± a₂)/√2`,
/// returned as `(n_sym, n_antisym)`.
pub fn collective_mode_observables(layout: &SubsystemLayout) -> Result<(Operator, Operator)> {
    let d = layout.dims();
    if d.len() != 6 || d[..3] != d[3..] || d[0] != 2 {
        return Err(Error::InvalidSelection(format!("collective modes need a two-node layout, got {d:?}")));
    }
    let a = crate::quantum::annihilation_op(d[1])?;
    let a1 = embed(&a, layout, 1)?;
    let a2 = embed(&a, layout, 4)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let plus = (&a1 + &a2).scale(s);
    let minus = (&a1 - &a2).scale(s);
    Ok((&plus.dagger() * &plus, &minus.dagger() * &minus))
}
