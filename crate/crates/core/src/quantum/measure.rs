use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::{
    layout::SubsystemLayout,
    operator::{DensityMatrix, Operator},
};
use crate::error::{Error, Result};

/// Imaginary part tolerated when reading a Hermitian observable.
const OBSERVABLE_IMAG_TOL: f64 = 1e-8;

/// `tr(op · ρ)`.
pub fn expectation(op: &Operator, rho: &DensityMatrix) -> Result<C64> {
    op.layout().check_same(rho.layout())?;
    Ok(trace_of_product(op.matrix(), rho.matrix()))
}

/// Real expectation of a Hermitian observable; errors when the imaginary
/// part exceeds 1e−8.
pub fn expectation_real(op: &Operator, rho: &DensityMatrix) -> Result<f64> {
    let v = expectation(op, rho)?;
    if v.im.abs() > OBSERVABLE_IMAG_TOL {
        return Err(Error::NumericalGuard {
            time: f64::NAN,
            reason: format!("observable expectation has imaginary part {:e}", v.im),
        });
    }
    Ok(v.re)
}

/// `tr(A·B)` without forming the product.
pub(crate) fn trace_of_product(a: &DMatrix<C64>, b: &DMatrix<C64>) -> C64 {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..n {
        for k in 0..n {
            acc += a[(j, k)] * b[(k, j)];
        }
    }
    acc
}

/// Reduced density matrix over the subsystems in `keep` (kept in layout
/// order regardless of the order given).
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let layout = rho.layout();
    if keep.is_empty() {
        return Err(Error::InvalidSelection("keep set is empty".into()));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.len() != keep.len() {
        return Err(Error::InvalidSelection(format!("duplicate indices in {keep:?}")));
    }
    if let Some(&bad) = kept.iter().find(|&&k| k >= layout.len()) {
        return Err(Error::PositionOutOfRange { position: bad, len: layout.len() });
    }
    let traced: Vec<usize> = (0..layout.len()).filter(|k| !kept.contains(k)).collect();
    let kept_layout = SubsystemLayout::new(kept.iter().map(|&k| layout.dims()[k]).collect())?;
    if traced.is_empty() {
        return DensityMatrix::new_unchecked(kept_layout, rho.matrix().clone());
    }
    let traced_layout = SubsystemLayout::new(traced.iter().map(|&k| layout.dims()[k]).collect())?;

    // full index for every (kept, traced) pair
    let nk = kept_layout.total_dim();
    let nt = traced_layout.total_dim();
    let mut full = vec![0usize; nk * nt];
    for ik in 0..nk {
        for it in 0..nt {
            let mut idx = 0;
            for (slot, &pos) in kept.iter().enumerate() {
                idx += kept_layout.level(ik, slot) * layout.stride(pos);
            }
            for (slot, &pos) in traced.iter().enumerate() {
                idx += traced_layout.level(it, slot) * layout.stride(pos);
            }
            full[ik * nt + it] = idx;
        }
    }
    let m = rho.matrix();
    let out = DMatrix::from_fn(nk, nk, |r, c| {
        (0..nt).map(|t| m[(full[r * nt + t], full[c * nt + t])]).sum::<C64>()
    });
    DensityMatrix::new_unchecked(kept_layout, out)
}

/// `√⟨level|ρ_s|level⟩` with `ρ_s` the reduced state of `subsystem`.
pub fn sqrt_fidelity(rho: &DensityMatrix, subsystem: usize, level: usize) -> Result<f64> {
    let d = rho.layout().dim(subsystem)?;
    if level >= d {
        return Err(Error::InvalidSelection(format!("target level {level} outside subsystem dimension {d}")));
    }
    let reduced = partial_trace(rho, &[subsystem])?;
    Ok(reduced.population(level).clamp(0.0, 1.0).sqrt())
}

/// Population of the highest retained Fock level of `subsystem`.
pub fn top_level_population(rho: &DensityMatrix, subsystem: usize) -> Result<f64> {
    let d = rho.layout().dim(subsystem)?;
    let layout = rho.layout();
    let stride = layout.stride(subsystem);
    let total: f64 = (0..rho.dim())
        .filter(|&i| (i / stride) % d == d - 1)
        .map(|i| rho.matrix()[(i, i)].re)
        .sum();
    Ok(total)
}

/// Smallest eigenvalue of the Hermitian part of `m`.
pub fn min_eigenvalue(m: &DMatrix<C64>) -> f64 {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

/// `½‖a − b‖₁`, from the eigenvalues of the Hermitian difference.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    a.layout().check_same(b.layout())?;
    let diff = a.matrix() - b.matrix();
    let h = (&diff + diff.adjoint()) * C64::new(0.5, 0.0);
    Ok(0.5 * h.symmetric_eigenvalues().iter().map(|x| x.abs()).sum::<f64>())
}
