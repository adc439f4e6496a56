use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use super::generator::NetworkGenerator;
use crate::error::{Error, Result};
use crate::quantum::DensityMatrix;

/// Largest Hilbert dimension for which the dense superoperator is built.
pub const ORACLE_DIM_CAP: usize = 32;

/// Column-stacking superoperator: `vec(rhs(X)) = L · vec(X)` with
/// `vec(X)[r + c·n] = X[r, c]`.
pub fn liouvillian(gen: &NetworkGenerator) -> Result<DMatrix<C64>> {
    let n = gen.layout.total_dim();
    if n > ORACLE_DIM_CAP {
        return Err(Error::DimensionCap { dim: n, cap: ORACLE_DIM_CAP });
    }
    let mut l = DMatrix::<C64>::zeros(n * n, n * n);
    let mut basis = DMatrix::<C64>::zeros(n, n);
    for c in 0..n {
        for r in 0..n {
            basis[(r, c)] = C64::new(1.0, 0.0);
            let image = gen.apply(&basis);
            basis[(r, c)] = C64::new(0.0, 0.0);
            l.column_mut(r + c * n).copy_from_slice(image.as_slice());
        }
    }
    Ok(l)
}

/// `ρ(t) = unvec(exp(L t) vec(ρ₀))`, the exact propagator of the generator.
pub fn expm_oracle(gen: &NetworkGenerator, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    gen.layout.check_same(rho0.layout())?;
    let n = rho0.dim();
    let l = liouvillian(gen)?;
    let prop = (l * C64::new(t, 0.0)).exp();
    let v = DVector::from_column_slice(rho0.matrix().as_slice());
    let out = prop * v;
    DensityMatrix::new_unchecked(gen.layout.clone(), DMatrix::from_column_slice(n, n, out.as_slice()))
}
