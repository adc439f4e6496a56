use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::{layout::SubsystemLayout, operator::{DensityMatrix, Operator}};
use crate::error::{Error, Result};

/// Minimum number of extra Fock levels used when exponentiating the
/// displacement generator.
const MIN_DISPLACEMENT_PADDING: usize = 4;

/// Padding that keeps the truncation edge of `exp(αa† − α*a)` away from the
/// returned low-Fock block: grows with the photon number `|α|²` and its
/// spread.
pub(crate) fn displacement_padding(alpha_abs: f64) -> usize {
    MIN_DISPLACEMENT_PADDING.max((alpha_abs * alpha_abs + 6.0 * alpha_abs + 4.0).ceil() as usize)
}

/// Truncated bosonic lowering operator, `⟨n−1|a|n⟩ = √n`.
pub fn annihilation_op(dim: usize) -> Result<Operator> {
    if dim < 2 {
        return Err(Error::InvalidDimension { dim, reason: "annihilation operator needs dim >= 2" });
    }
    let mut m = DMatrix::<C64>::zeros(dim, dim);
    for n in 1..dim {
        m[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    Operator::single(m)
}

/// The qubit operators in the (|e⟩, |g⟩) basis.
#[derive(Clone, Debug)]
pub struct QubitOps {
    pub sigma_x: Operator,
    pub sigma_z: Operator,
    /// `|e⟩⟨g|`
    pub s_plus: Operator,
    /// `|g⟩⟨e|`
    pub s_minus: Operator,
}

pub fn qubit_ops() -> QubitOps {
    let op = |rows: &[&[f64]]| Operator::from_real_rows(rows).expect("2x2");
    QubitOps {
        sigma_x: op(&[&[0.0, 1.0], &[1.0, 0.0]]),
        sigma_z: op(&[&[1.0, 0.0], &[0.0, -1.0]]),
        s_plus: op(&[&[0.0, 1.0], &[0.0, 0.0]]),
        s_minus: op(&[&[0.0, 0.0], &[1.0, 0.0]]),
    }
}

/// Truncated Bose-Einstein populations `p_n ∝ n̄ⁿ/(1+n̄)^{n+1}`, renormalised
/// over `n = 0..dim`.
pub fn thermal_populations(nbar: f64, dim: usize) -> Result<Vec<f64>> {
    if !(nbar >= 0.0) || !nbar.is_finite() {
        return Err(Error::param("nbar", format!("must be finite and >= 0, got {nbar}")));
    }
    if dim == 0 {
        return Err(Error::InvalidDimension { dim, reason: "thermal state needs dim >= 1" });
    }
    let ratio = nbar / (1.0 + nbar);
    let mut p: Vec<f64> = (0..dim).map(|n| ratio.powi(n as i32) / (1.0 + nbar)).collect();
    let z: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= z);
    Ok(p)
}

pub fn thermal_state(nbar: f64, dim: usize) -> Result<DensityMatrix> {
    let p = thermal_populations(nbar, dim)?;
    let data = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(dim, p.into_iter().map(|x| C64::new(x, 0.0))));
    DensityMatrix::new_unchecked(SubsystemLayout::single(dim)?, data)
}

pub fn fock_state(n: usize, dim: usize) -> Result<DensityMatrix> {
    if n >= dim {
        return Err(Error::InvalidSelection(format!("Fock level {n} outside truncation {dim}")));
    }
    let mut data = DMatrix::<C64>::zeros(dim, dim);
    data[(n, n)] = C64::new(1.0, 0.0);
    DensityMatrix::new_unchecked(SubsystemLayout::single(dim)?, data)
}

/// `|e⟩⟨e|` when `excited`, else `|g⟩⟨g|`.
pub fn pure_qubit(excited: bool) -> DensityMatrix {
    fock_state(if excited { 0 } else { 1 }, 2).expect("qubit index in range")
}

/// Displacement operator `D(α) = exp(α a† − α* a)` at truncation `dim`,
/// evaluated by matrix exponential on a padded space and projected back.
pub fn displacement_op(alpha: C64, dim: usize) -> Result<Operator> {
    let big = dim + displacement_padding(alpha.norm());
    let a = annihilation_op(big)?;
    let gen = a.dagger().scale(alpha) - a.scale(alpha.conj());
    let full = gen.into_matrix().exp();
    Operator::single(full.view((0, 0), (dim, dim)).into_owned())
}

/// Truncated coherent state `|α⟩` with Fock amplitudes renormalised after
/// truncation.
pub fn coherent_state(alpha: C64, dim: usize) -> Result<DensityMatrix> {
    if dim == 0 {
        return Err(Error::InvalidDimension { dim, reason: "coherent state needs dim >= 1" });
    }
    let mut psi = Vec::with_capacity(dim);
    let mut amp = C64::new(1.0, 0.0);
    for n in 0..dim {
        if n > 0 {
            amp = amp * alpha / (n as f64).sqrt();
        }
        psi.push(amp);
    }
    DensityMatrix::from_pure(SubsystemLayout::single(dim)?, &psi)
}
