//! Packed storage for the projection coefficients.
//!
//! A forward pass over `N` items produces one coefficient `r(n, m)` for every
//! pair `m < n`. They are stored flat, in the order the forward loops visit
//! them: outer `n` ascending, inner `m` ascending. Subscripts in this module
//! are 1-based, so `r(2, 1)` is the first stored value.

use crate::error::{Error, Result};

/// Cumulative coefficient count `0 + 1 + ... + x`.
///
/// `gfbr(x)` is the number of packed coefficients consumed by the first
/// `x + 1` items.
pub fn gfbr(x: u64) -> u64 {
    x * (x + 1) / 2
}

/// Number of packed coefficients for `n` items.
pub fn packed_len(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// 1-based flat position of `r(n, m)`.
///
/// # Panics
///
/// Unless `2 <= n` and `1 <= m < n`.
pub fn pack_index(n: usize, m: usize) -> usize {
    assert!(
        n >= 2 && m >= 1 && m < n,
        "pack_index({n}, {m}) out of range"
    );
    (n - 1) * (n - 2) / 2 + m
}

/// Flat coefficient vector of length `N(N-1)/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct PackedCoefficients {
    n_vectors: usize,
    values: Vec<f64>,
}

impl PackedCoefficients {
    pub fn new(n_vectors: usize, values: Vec<f64>) -> Result<Self> {
        let expected = packed_len(n_vectors);
        if values.len() != expected {
            return Err(Error::CoefficientCount {
                n_vectors,
                expected,
                found: values.len(),
            });
        }
        Ok(PackedCoefficients { n_vectors, values })
    }

    pub fn zeros(n_vectors: usize) -> Self {
        PackedCoefficients {
            n_vectors,
            values: vec![0.0; packed_len(n_vectors)],
        }
    }

    pub fn n_vectors(&self) -> usize {
        self.n_vectors
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// `r(n, m)` with 1-based subscripts, `m < n`.
    pub fn get(&self, n: usize, m: usize) -> f64 {
        self.values[pack_index(n, m) - 1]
    }

    /// Coefficients of row `n` (1-based): `r(n, 1), ..., r(n, n-1)`.
    pub fn row(&self, n: usize) -> &[f64] {
        let start = packed_len(n - 1);
        &self.values[start..start + n - 1]
    }

    pub fn triangular(&self) -> TriangularFactor<'_> {
        TriangularFactor { coeffs: self }
    }
}

/// Unit lower-triangular `N×N` view over packed coefficients: ones on the
/// diagonal, `r(n, m)` below it, zeros above.
///
/// With `U` holding the orthogonalized items as columns, `V = U · Tᵀ`.
#[derive(Debug, Clone, Copy)]
pub struct TriangularFactor<'a> {
    coeffs: &'a PackedCoefficients,
}

impl TriangularFactor<'_> {
    pub fn size(&self) -> usize {
        self.coeffs.n_vectors
    }

    /// Entry at 1-based `(row, col)`.
    pub fn get(&self, row: usize, col: usize) -> f64 {
        use std::cmp::Ordering::*;
        match col.cmp(&row) {
            Less => self.coeffs.get(row, col),
            Equal => 1.0,
            Greater => 0.0,
        }
    }

    /// Dense row-major copy.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.size();
        (1..=n)
            .map(|i| (1..=n).map(|j| self.get(i, j)).collect())
            .collect()
    }
}
