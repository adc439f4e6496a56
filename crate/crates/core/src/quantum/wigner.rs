use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::{
    operator::DensityMatrix,
    states::{annihilation_op, displacement_padding},
};
use crate::error::{Error, Result};

/// Rectangular sampling grid in the quadratures `x`, `p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub p_min: f64,
    pub p_max: f64,
    pub np: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { x_min: -3.0, x_max: 3.0, nx: 61, p_min: -3.0, p_max: 3.0, np: 61 }
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Wigner function sampled on a grid, `values[(ip, ix)] = W(x_ix, p_ip)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WignerGrid {
    pub x_values: Vec<f64>,
    pub p_values: Vec<f64>,
    pub values: DMatrix<f64>,
}

impl WignerGrid {
    pub fn dx(&self) -> f64 {
        step(&self.x_values)
    }

    pub fn dp(&self) -> f64 {
        step(&self.p_values)
    }

    /// Riemann sum `Σ W Δx Δp`.
    pub fn integral(&self) -> f64 {
        self.values.sum() * self.dx() * self.dp()
    }

    pub fn at(&self, ix: usize, ip: usize) -> f64 {
        self.values[(ip, ix)]
    }
}

fn step(v: &[f64]) -> f64 {
    if v.len() < 2 {
        1.0
    } else {
        v[1] - v[0]
    }
}

/// Wigner function of a single-mode state in the `(x, p)` convention with
/// `α = (x + ip)/√2`, normalised so `∫ W dx dp = 1`:
/// `W = (1/π) tr[ρ D(α) Π D(α)†] = (1/π) tr[ρ D(2α) Π]`.
///
/// `D(2α)` is the exponential of the displacement generator on a padded
/// Fock space, projected on the state's truncation. The padded exponential
/// is evaluated spectrally: with `α = r e^{iθ}`,
/// `D = R(θ) exp(−i r X) R(θ)†` where `X = i(a† − a)` is diagonalised once
/// and `R(θ) = e^{iθ a†a}`.
pub fn wigner(rho: &DensityMatrix, grid: &GridSpec) -> Result<WignerGrid> {
    if rho.layout().len() != 1 {
        return Err(Error::InvalidSelection(format!(
            "Wigner function needs a single-mode state, got layout {:?}",
            rho.layout().dims()
        )));
    }
    if grid.nx == 0 || grid.np == 0 {
        return Err(Error::param("grid", "grid must have at least one point per axis"));
    }
    let dim = rho.dim();
    let xs = linspace(grid.x_min, grid.x_max, grid.nx);
    let ps = linspace(grid.p_min, grid.p_max, grid.np);
    let reach = xs
        .iter()
        .flat_map(|x| ps.iter().map(move |p| (x * x + p * p).sqrt() * 2.0 * FRAC_1_SQRT_2))
        .fold(0.0, f64::max);
    let big = dim + displacement_padding(reach);

    let a = annihilation_op(big)?.into_matrix();
    let x_op = (a.adjoint() - &a) * C64::new(0.0, 1.0);
    let eig = x_op.symmetric_eigen();
    let vecs = &eig.eigenvectors;
    let lambdas = &eig.eigenvalues;

    let rho_m = rho.matrix();
    let mut values = DMatrix::<f64>::zeros(ps.len(), xs.len());
    let mut block = DMatrix::<C64>::zeros(dim, dim);
    for (ip, &p) in ps.iter().enumerate() {
        for (ix, &x) in xs.iter().enumerate() {
            // β = 2α
            let beta = C64::new(x, p) * (2.0 * FRAC_1_SQRT_2);
            let (r, theta) = beta.to_polar();
            let phases: Vec<C64> = lambdas.iter().map(|&l| C64::from_polar(1.0, -r * l)).collect();
            for m in 0..dim {
                for n in 0..dim {
                    let mut acc = C64::new(0.0, 0.0);
                    for k in 0..big {
                        acc += vecs[(m, k)] * phases[k] * vecs[(n, k)].conj();
                    }
                    block[(m, n)] = acc * C64::from_polar(1.0, theta * (m as f64 - n as f64));
                }
            }
            let mut w = C64::new(0.0, 0.0);
            for m in 0..dim {
                for n in 0..dim {
                    let parity = if n % 2 == 0 { 1.0 } else { -1.0 };
                    w += rho_m[(n, m)] * block[(m, n)] * parity;
                }
            }
            values[(ip, ix)] = w.re / PI;
        }
    }
    Ok(WignerGrid { x_values: xs, p_values: ps, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{fock_state, thermal_state, SubsystemLayout};

    fn origin_only() -> GridSpec {
        GridSpec { x_min: 0.0, x_max: 0.0, nx: 1, p_min: 0.0, p_max: 0.0, np: 1 }
    }

    #[test]
    fn vacuum_peak() {
        let w = wigner(&fock_state(0, 6).unwrap(), &GridSpec::default()).unwrap();
        assert!((w.at(30, 30) - 1.0 / PI).abs() < 0.01 / PI);
        assert!((w.integral() - 1.0).abs() < 0.02);
    }

    #[test]
    fn thermal_origin_value() {
        let nbar = 0.2;
        let w = wigner(&thermal_state(nbar, 20).unwrap(), &origin_only()).unwrap();
        let analytic = 1.0 / PI / (2.0 * nbar + 1.0);
        assert!((w.at(0, 0) - analytic).abs() < 1e-6);
    }

    #[test]
    fn single_photon_is_negative_at_origin() {
        let w = wigner(&fock_state(1, 6).unwrap(), &GridSpec::default()).unwrap();
        assert!((w.at(30, 30) + 1.0 / PI).abs() < 0.01 / PI);
        assert!((w.integral() - 1.0).abs() < 0.02);
    }

    #[test]
    fn spectral_route_matches_matrix_exponential() {
        use crate::quantum::{coherent_state, displacement_op, measure::trace_of_product};
        let rho = coherent_state(C64::new(0.4, 0.3), 8).unwrap();
        let grid = GridSpec { x_min: -1.0, x_max: 1.5, nx: 3, p_min: -0.5, p_max: 0.5, np: 2 };
        let w = wigner(&rho, &grid).unwrap();
        for (ip, &p) in w.p_values.iter().enumerate() {
            for (ix, &x) in w.x_values.iter().enumerate() {
                let alpha = C64::new(x, p) * FRAC_1_SQRT_2;
                let d = displacement_op(alpha * 2.0, 8).unwrap();
                let parity = DMatrix::from_fn(8, 8, |r, c| if r != c { C64::new(0.0, 0.0) } else if r % 2 == 0 { C64::new(1.0, 0.0) } else { C64::new(-1.0, 0.0) });
                let direct = trace_of_product(rho.matrix(), &(d.matrix() * parity)).re / PI;
                assert!((direct - w.at(ix, ip)).abs() < 1e-9, "{direct} vs {}", w.at(ix, ip));
            }
        }
    }

    #[test]
    fn coherent_state_peak_moves() {
        use crate::quantum::coherent_state;
        // |α⟩ with α = 1 peaks at x = √2, p = 0 with value 1/π
        let rho = coherent_state(C64::new(1.0, 0.0), 12).unwrap();
        let grid = GridSpec { x_min: 2f64.sqrt(), x_max: 2f64.sqrt(), nx: 1, p_min: 0.0, p_max: 0.0, np: 1 };
        let w = wigner(&rho, &grid).unwrap();
        assert!((w.at(0, 0) - 1.0 / PI).abs() < 1e-6);
    }

    #[test]
    fn rejects_multimode() {
        let rho = fock_state(0, 2).unwrap().kron(&fock_state(0, 2).unwrap());
        assert_eq!(rho.layout(), &SubsystemLayout::new(vec![2, 2]).unwrap());
        assert!(wigner(&rho, &origin_only()).is_err());
    }
}
