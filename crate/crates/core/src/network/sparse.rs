//! Compressed-row storage for applying the (very sparse) node operators to
//! dense column-major density matrices.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

#[derive(Clone, Debug)]
pub(crate) struct Csr {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl Csr {
    pub fn from_dense(m: &DMatrix<C64>) -> Self {
        let n = m.nrows();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for r in 0..n {
            for c in 0..n {
                let v = m[(r, c)];
                if v.re != 0.0 || v.im != 0.0 {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Self { n, row_ptr, cols, vals }
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    #[inline]
    fn row(&self, r: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()].iter().copied().zip(self.vals[span].iter().copied())
    }

    /// `out += f · self · x`
    pub fn left_acc(&self, x: &DMatrix<C64>, f: C64, out: &mut DMatrix<C64>) {
        let n = self.n;
        let xs = x.as_slice();
        let os = out.as_mut_slice();
        for c in 0..n {
            let xc = &xs[c * n..(c + 1) * n];
            let oc = &mut os[c * n..(c + 1) * n];
            for (r, o) in oc.iter_mut().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (k, v) in self.row(r) {
                    acc += v * xc[k];
                }
                *o += f * acc;
            }
        }
    }

    /// `out += f · x · self†`, one column of `out` at a time.
    pub fn right_adjoint_acc(&self, x: &DMatrix<C64>, f: C64, out: &mut DMatrix<C64>) {
        let n = self.n;
        let xs = x.as_slice();
        let os = out.as_mut_slice();
        for s in 0..n {
            let oc = &mut os[s * n..(s + 1) * n];
            for (l, v) in self.row(s) {
                let w = f * v.conj();
                for (o, xv) in oc.iter_mut().zip(&xs[l * n..(l + 1) * n]) {
                    *o += w * xv;
                }
            }
        }
    }

    /// `out += f · a · x · b†`
    pub fn sandwich_acc(a: &Csr, b: &Csr, x: &DMatrix<C64>, f: C64, out: &mut DMatrix<C64>) {
        let n = a.n;
        let xs = x.as_slice();
        let os = out.as_mut_slice();
        for s in 0..n {
            let oc = &mut os[s * n..(s + 1) * n];
            for (l, bv) in b.row(s) {
                let w = f * bv.conj();
                let xc = &xs[l * n..(l + 1) * n];
                for (r, o) in oc.iter_mut().enumerate() {
                    let mut acc = C64::new(0.0, 0.0);
                    for (k, av) in a.row(r) {
                        acc += av * xc[k];
                    }
                    *o += w * acc;
                }
            }
        }
    }
}
