use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::{layout::SubsystemLayout, measure::min_eigenvalue, tol};
use crate::error::{Error, Result};

/// Dense complex operator tagged with the layout of the space it acts on.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    layout: SubsystemLayout,
    data: DMatrix<C64>,
}

impl Operator {
    pub fn new(layout: SubsystemLayout, data: DMatrix<C64>) -> Result<Self> {
        let n = layout.total_dim();
        if data.nrows() != data.ncols() {
            return Err(Error::InvalidDimension { dim: data.nrows(), reason: "operator matrix is not square" });
        }
        if data.nrows() != n {
            return Err(Error::InvalidDimension { dim: data.nrows(), reason: "matrix size differs from layout dimension" });
        }
        Ok(Self { layout, data })
    }

    /// Operator on a single subsystem whose dimension is the matrix size.
    pub fn single(data: DMatrix<C64>) -> Result<Self> {
        let layout = SubsystemLayout::single(data.nrows())?;
        Self::new(layout, data)
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let data = DMatrix::from_fn(n, n, |r, c| C64::new(rows[r][c], 0.0));
        Self::single(data)
    }

    pub fn identity(layout: &SubsystemLayout) -> Self {
        let n = layout.total_dim();
        Self { layout: layout.clone(), data: DMatrix::identity(n, n) }
    }

    pub fn zeros(layout: &SubsystemLayout) -> Self {
        let n = layout.total_dim();
        Self { layout: layout.clone(), data: DMatrix::zeros(n, n) }
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.data
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn dagger(&self) -> Self {
        Self { layout: self.layout.clone(), data: self.data.adjoint() }
    }

    pub fn scale(&self, c: impl Into<C64>) -> Self {
        Self { layout: self.layout.clone(), data: &self.data * c.into() }
    }

    pub fn commutator(&self, other: &Operator) -> Self {
        self * other - other * self
    }

    pub fn anticommutator(&self, other: &Operator) -> Self {
        self * other + other * self
    }

    /// `‖A − A†‖_max`.
    pub fn hermiticity_error(&self) -> f64 {
        max_abs(&(&self.data - self.data.adjoint()))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    pub fn trace(&self) -> C64 {
        self.data.trace()
    }

    /// Tensor product `self ⊗ other` over the concatenated layout.
    pub fn kron(&self, other: &Operator) -> Self {
        Self { layout: self.layout.concat(&other.layout), data: self.data.kronecker(&other.data) }
    }

    /// Conjugation `U · self · U†`.
    pub fn conjugate_by(&self, u: &Operator) -> Self {
        u * self * &u.dagger()
    }

    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        max_abs(&(&self.data - &other.data))
    }
}

pub(crate) fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

macro_rules! binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr<&Operator> for &Operator {
            type Output = Operator;
            fn $method(self, rhs: &Operator) -> Operator {
                assert_eq!(self.layout, rhs.layout, "operator layouts differ");
                Operator { layout: self.layout.clone(), data: &self.data $op &rhs.data }
            }
        }
        impl $tr<Operator> for Operator {
            type Output = Operator;
            fn $method(self, rhs: Operator) -> Operator {
                &self $op &rhs
            }
        }
        impl $tr<&Operator> for Operator {
            type Output = Operator;
            fn $method(self, rhs: &Operator) -> Operator {
                &self $op rhs
            }
        }
        impl $tr<Operator> for &Operator {
            type Output = Operator;
            fn $method(self, rhs: Operator) -> Operator {
                self $op &rhs
            }
        }
    };
}

// Combining operators of different layouts is a programming error and panics.
binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl Neg for Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        Operator { layout: self.layout, data: -self.data }
    }
}

impl Mul<Operator> for f64 {
    type Output = Operator;
    fn mul(self, rhs: Operator) -> Operator {
        rhs.scale(self)
    }
}

impl Mul<&Operator> for f64 {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        rhs.scale(self)
    }
}

impl Mul<&Operator> for C64 {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        rhs.scale(self)
    }
}

/// Embed a single-subsystem operator at `position` of `layout`, acting as
/// the identity on every other factor.
pub fn embed(op: &Operator, layout: &SubsystemLayout, position: usize) -> Result<Operator> {
    if op.layout.len() != 1 {
        return Err(Error::InvalidSelection(format!(
            "embed expects a single-subsystem operator, got layout {:?}",
            op.layout.dims()
        )));
    }
    let d = layout.dim(position)?;
    if d != op.dim() {
        return Err(Error::LayoutMismatch { expected: vec![d], found: vec![op.dim()] });
    }
    let right = layout.stride(position);
    let left = layout.total_dim() / (d * right);
    let n = layout.total_dim();
    let mut data = DMatrix::<C64>::zeros(n, n);
    for c in 0..d {
        for r in 0..d {
            let v = op.data[(r, c)];
            if v == C64::new(0.0, 0.0) {
                continue;
            }
            for l in 0..left {
                let base = l * d * right;
                for k in 0..right {
                    data[(base + r * right + k, base + c * right + k)] = v;
                }
            }
        }
    }
    Ok(Operator { layout: layout.clone(), data })
}

/// Density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    layout: SubsystemLayout,
    data: DMatrix<C64>,
}

impl DensityMatrix {
    /// Validating constructor; checks the Hermiticity, trace and eigenvalue
    /// floor invariants.
    pub fn new(layout: SubsystemLayout, data: DMatrix<C64>) -> Result<Self> {
        let rho = Self::new_unchecked(layout, data)?;
        let herm = max_abs(&(&rho.data - rho.data.adjoint()));
        if herm > tol::HERMITIAN {
            return Err(Error::NotADensityMatrix(format!("hermiticity error {herm:e}")));
        }
        let tr = rho.data.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > tol::TRACE {
            return Err(Error::NotADensityMatrix(format!("trace {tr}")));
        }
        let lmin = min_eigenvalue(&rho.data);
        if lmin < tol::EIGEN_FLOOR {
            return Err(Error::NotADensityMatrix(format!("minimum eigenvalue {lmin:e}")));
        }
        Ok(rho)
    }

    /// Checks only shape; used for intermediate integrator states, which are
    /// validated separately by the numerical guards.
    pub fn new_unchecked(layout: SubsystemLayout, data: DMatrix<C64>) -> Result<Self> {
        let op = Operator::new(layout, data)?;
        Ok(Self { layout: op.layout, data: op.data })
    }

    /// Pure state `|ψ⟩⟨ψ|` from a (not necessarily normalised) vector.
    pub fn from_pure(layout: SubsystemLayout, psi: &[C64]) -> Result<Self> {
        let n = layout.total_dim();
        if psi.len() != n {
            return Err(Error::InvalidDimension { dim: psi.len(), reason: "state vector length differs from layout" });
        }
        let norm2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if norm2 == 0.0 {
            return Err(Error::NotADensityMatrix("zero state vector".into()));
        }
        let data = DMatrix::from_fn(n, n, |r, c| psi[r] * psi[c].conj() / norm2);
        Self::new_unchecked(layout, data)
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.data
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn trace(&self) -> C64 {
        self.data.trace()
    }

    pub fn hermiticity_error(&self) -> f64 {
        max_abs(&(&self.data - self.data.adjoint()))
    }

    /// Tensor product `self ⊗ other`.
    pub fn kron(&self, other: &DensityMatrix) -> Self {
        Self { layout: self.layout.concat(&other.layout), data: self.data.kronecker(&other.data) }
    }

    /// `U ρ U†` for an operator on the same layout.
    pub fn transform(&self, u: &Operator) -> Result<Self> {
        self.layout.check_same(u.layout())?;
        Ok(Self { layout: self.layout.clone(), data: u.matrix() * &self.data * u.matrix().adjoint() })
    }

    pub fn as_operator(&self) -> Operator {
        Operator { layout: self.layout.clone(), data: self.data.clone() }
    }

    /// Population of basis state `index`.
    pub fn population(&self, index: usize) -> f64 {
        self.data[(index, index)].re
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{annihilation_op, qubit_ops};
    use proptest::prelude::*;

    fn random_op(dim: usize, seed: &[f64]) -> Operator {
        let data = DMatrix::from_fn(dim, dim, |r, c| {
            let k = (r * dim + c) * 2;
            C64::new(seed[k % seed.len()], seed[(k + 1) % seed.len()])
        });
        Operator::single(data).unwrap()
    }

    #[test]
    fn embed_dimension_is_product() {
        let q = qubit_ops();
        let layout = SubsystemLayout::node(4, 6).unwrap();
        let e = embed(&q.sigma_z, &layout, 0).unwrap();
        assert_eq!(e.dim(), 48);
    }

    #[test]
    fn embed_rejects_mismatch_and_range() {
        let a = annihilation_op(3).unwrap();
        let layout = SubsystemLayout::node(4, 6).unwrap();
        assert!(matches!(embed(&a, &layout, 1), Err(Error::LayoutMismatch { .. })));
        assert!(matches!(embed(&a, &layout, 3), Err(Error::PositionOutOfRange { .. })));
    }

    #[test]
    fn disjoint_embeddings_commute() {
        let layout = SubsystemLayout::new(vec![2, 3, 3]).unwrap();
        let a = annihilation_op(3).unwrap();
        let x = embed(&a, &layout, 1).unwrap();
        let y = embed(&a.dagger(), &layout, 2).unwrap();
        assert!((&x * &y).max_abs_diff(&(&y * &x)) < 1e-14);
    }

    #[test]
    fn embed_matches_kron() {
        let q = qubit_ops();
        let a = annihilation_op(3).unwrap();
        let i2 = Operator::identity(&SubsystemLayout::single(2).unwrap());
        let layout = SubsystemLayout::new(vec![2, 3, 2]).unwrap();
        let k = i2.kron(&a).kron(&q.sigma_x);
        let e = &embed(&a, &layout, 1).unwrap() * &embed(&q.sigma_x, &layout, 2).unwrap();
        assert!(k.max_abs_diff(&e) < 1e-15);
    }

    #[test]
    fn density_matrix_validation() {
        let l = SubsystemLayout::single(2).unwrap();
        let bad_trace = DMatrix::from_diagonal(&nalgebra::dvector![C64::new(0.7, 0.0), C64::new(0.7, 0.0)]);
        assert!(DensityMatrix::new(l.clone(), bad_trace).is_err());
        let negative = DMatrix::from_diagonal(&nalgebra::dvector![C64::new(1.5, 0.0), C64::new(-0.5, 0.0)]);
        assert!(DensityMatrix::new(l.clone(), negative).is_err());
        let mut nonherm = DMatrix::<C64>::identity(2, 2) * C64::new(0.5, 0.0);
        nonherm[(0, 1)] = C64::new(0.1, 0.0);
        assert!(DensityMatrix::new(l, nonherm).is_err());
    }

    proptest! {
        #[test]
        fn embedding_is_a_homomorphism(seed in proptest::collection::vec(-1.0f64..1.0, 18..19), pos in 0usize..3) {
            let layout = SubsystemLayout::new(vec![3, 3, 3]).unwrap();
            let a = random_op(3, &seed);
            let b = random_op(3, &seed[5..]);
            let lhs = embed(&(&a * &b), &layout, pos).unwrap();
            let rhs = &embed(&a, &layout, pos).unwrap() * &embed(&b, &layout, pos).unwrap();
            prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        }
    }
}
