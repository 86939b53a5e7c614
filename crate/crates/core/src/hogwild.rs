//! Lock-free shared parameter rows for multi-worker SGD.
//!
//! Workers copy a row out, update the copy and write it back. Concurrent writers
//! may overwrite each other's updates; values stay finite and are re-clamped by
//! the caller where needed.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::linalg::Matrix;

pub(crate) struct SharedMatrix {
    data: Vec<AtomicU64>,
    rows: usize,
    cols: usize,
}

impl SharedMatrix {
    pub fn new(m: Matrix) -> Self {
        let (rows, cols) = (m.rows(), m.cols());
        let data = m.into_vec().into_iter().map(|x| AtomicU64::new(x.to_bits())).collect();
        SharedMatrix { data, rows, cols }
    }

    pub fn snapshot(&self) -> Matrix {
        let data = self
            .data
            .iter()
            .map(|a| f64::from_bits(a.load(Ordering::Relaxed)))
            .collect();
        Matrix::from_vec(self.rows, self.cols, data)
    }

    pub fn into_matrix(self) -> Matrix {
        let data = self.data.into_iter().map(|a| f64::from_bits(a.into_inner())).collect();
        Matrix::from_vec(self.rows, self.cols, data)
    }

    #[inline]
    pub fn load_row(&self, r: usize, out: &mut [f64]) {
        let src = &self.data[r * self.cols..(r + 1) * self.cols];
        for (o, a) in out.iter_mut().zip(src) {
            *o = f64::from_bits(a.load(Ordering::Relaxed));
        }
    }

    #[inline]
    pub fn store_row(&self, r: usize, values: &[f64]) {
        let dst = &self.data[r * self.cols..(r + 1) * self.cols];
        for (a, v) in dst.iter().zip(values) {
            a.store(v.to_bits(), Ordering::Relaxed);
        }
    }

    pub fn all_finite(&self) -> bool {
        self.data
            .iter()
            .all(|a| f64::from_bits(a.load(Ordering::Relaxed)).is_finite())
    }
}
