//! Compensated (Neumaier) summation, so ensemble means do not depend on the
//! order samples are folded in beyond the last ulp.

use crate::linalg::{ComplexMatrix, C64};
use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct NeumaierSum {
    sum: f64,
    carry: f64,
}

impl NeumaierSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Entrywise compensated accumulator for matrices of a fixed shape.
#[derive(Debug, Clone)]
pub(crate) struct MatrixAccumulator {
    rows: usize,
    cols: usize,
    re: Vec<NeumaierSum>,
    im: Vec<NeumaierSum>,
}

impl MatrixAccumulator {
    pub(crate) fn new(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            re: vec![NeumaierSum::default(); rows * cols],
            im: vec![NeumaierSum::default(); rows * cols],
        }
    }

    pub(crate) fn add_scaled(&mut self, m: &ComplexMatrix, weight: f64) {
        debug_assert_eq!((m.rows(), m.cols()), (self.rows, self.cols));
        for (k, z) in m.as_slice().iter().enumerate() {
            self.re[k].add(weight * z.re);
            self.im[k].add(weight * z.im);
        }
    }

    pub(crate) fn finish(&self) -> ComplexMatrix {
        let data = self
            .re
            .iter()
            .zip(&self.im)
            .map(|(r, i)| C64::new(r.value(), i.value()))
            .collect();
        ComplexMatrix::from_vec(self.rows, self.cols, data).expect("accumulator shape")
    }
}

pub(crate) fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = NeumaierSum::default();
    for v in values {
        acc.add(v);
    }
    acc.value()
}
