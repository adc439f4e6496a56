use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered subsystem dimensions defining a tensor-product Hilbert space.
///
/// A single interface node is `(2, N_a, N_b)`: qubit, optical mode,
/// mechanical mode. Networks concatenate node layouts in node order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubsystemLayout {
    dims: Vec<usize>,
}

impl SubsystemLayout {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidDimension { dim: 0, reason: "layout has no subsystems" });
        }
        if let Some(&d) = dims.iter().find(|&&d| d == 0) {
            return Err(Error::InvalidDimension { dim: d, reason: "subsystem dimension must be positive" });
        }
        Ok(Self { dims })
    }

    /// A layout consisting of one subsystem.
    pub fn single(dim: usize) -> Result<Self> {
        Self::new(vec![dim])
    }

    /// Canonical node layout `(qubit = 2, optical = n_a, mechanical = n_b)`.
    pub fn node(n_a: usize, n_b: usize) -> Result<Self> {
        Self::new(vec![2, n_a, n_b])
    }

    pub fn concat(&self, other: &SubsystemLayout) -> SubsystemLayout {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        SubsystemLayout { dims }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn dim(&self, position: usize) -> Result<usize> {
        self.dims
            .get(position)
            .copied()
            .ok_or(Error::PositionOutOfRange { position, len: self.dims.len() })
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Index stride of subsystem `position` in the row-major composite index.
    pub fn stride(&self, position: usize) -> usize {
        self.dims[position + 1..].iter().product()
    }

    /// Local level of subsystem `position` inside composite `index`.
    pub fn level(&self, index: usize, position: usize) -> usize {
        (index / self.stride(position)) % self.dims[position]
    }

    pub(crate) fn check_same(&self, other: &SubsystemLayout) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::LayoutMismatch { expected: self.dims.clone(), found: other.dims.clone() })
        }
    }
}
