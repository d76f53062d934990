//! Column sets and block sets.
//!
//! Both containers store their items contiguously: a [`VectorSet`] keeps each
//! column as one slice, a [`BlockSet`] keeps each `M×B` block as one slice in
//! column-major order. The kernels in [`crate::ortho`] only ever see items as
//! flat slices plus a row count, which is what lets the vector and block
//! variants share one code path.

use crate::error::{Error, Result};

/// Sequential left-to-right dot product.
///
/// Every inner product in the crate goes through this function, so results
/// are deterministic for a given input regardless of the platform's SIMD
/// width.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

/// Frobenius inner product of two column-major items with `rows` rows.
///
/// Summed as per-column dot products accumulated in column order. With a
/// single column this is exactly [`dot`], which makes a one-column block set
/// bit-identical to the corresponding vector set.
#[inline]
pub fn frobenius(a: &[f64], b: &[f64], rows: usize) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut cols = a.chunks_exact(rows).zip(b.chunks_exact(rows));
    let Some((a0, b0)) = cols.next() else {
        return 0.0;
    };
    let mut acc = dot(a0, b0);
    for (x, y) in cols {
        acc += dot(x, y);
    }
    acc
}

/// A set of `N` equally shaped real items, each stored as a contiguous
/// column-major slice with `rows()` rows.
pub trait ItemSet: Clone {
    /// Rows per item (`M`).
    fn rows(&self) -> usize;
    /// Columns per item (`1` for vectors, `B` for blocks).
    fn item_cols(&self) -> usize;
    /// Number of items (`N`).
    fn len(&self) -> usize;
    fn as_slice(&self) -> &[f64];
    fn as_mut_slice(&mut self) -> &mut [f64];
    /// Dependence error naming item `index` (1-based).
    fn dependence_error(index: usize) -> Error;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn item_len(&self) -> usize {
        self.rows() * self.item_cols()
    }

    /// Item `n` (0-based).
    fn item(&self, n: usize) -> &[f64] {
        let len = self.item_len();
        &self.as_slice()[n * len..(n + 1) * len]
    }

    fn item_mut(&mut self, n: usize) -> &mut [f64] {
        let len = self.item_len();
        &mut self.as_mut_slice()[n * len..(n + 1) * len]
    }

    /// Inner product of items `a` and `b` (0-based).
    fn inner(&self, a: usize, b: usize) -> f64 {
        frobenius(self.item(a), self.item(b), self.rows())
    }

    fn same_shape(&self, other: &Self) -> bool {
        self.rows() == other.rows()
            && self.item_cols() == other.item_cols()
            && self.len() == other.len()
    }

    fn shape_string(&self) -> String;
}

fn check_finite(data: &[f64]) -> Result<()> {
    match data.iter().position(|x| !x.is_finite()) {
        Some(i) => Err(Error::NonFinite(i)),
        None => Ok(()),
    }
}

/// An `M×N` matrix whose columns are the vectors of the set.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorSet {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl VectorSet {
    /// Builds a set from column-major data (`data[n * rows + i]` is entry `i`
    /// of vector `n`).
    pub fn from_column_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidShape(format!(
                "vector set must be at least 1x1, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidShape(format!(
                "{rows}x{cols} vector set needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        check_finite(&data)?;
        Ok(VectorSet { rows, cols, data })
    }

    /// Builds a set from a list of columns.
    pub fn from_columns<C: AsRef<[f64]>>(columns: &[C]) -> Result<Self> {
        let rows = columns.first().map_or(0, |c| c.as_ref().len());
        if columns.iter().any(|c| c.as_ref().len() != rows) {
            return Err(Error::InvalidShape("columns have differing lengths".into()));
        }
        let data = columns
            .iter()
            .flat_map(|c| c.as_ref().iter().copied())
            .collect();
        Self::from_column_major(rows, columns.len(), data)
    }

    /// Builds a set from a list of matrix rows (row `i` holds entry `i` of
    /// every vector).
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.as_ref().len());
        if rows.iter().any(|r| r.as_ref().len() != n_cols) {
            return Err(Error::InvalidShape("rows have differing lengths".into()));
        }
        let mut data = vec![0.0; n_rows * n_cols];
        for (i, row) in rows.iter().enumerate() {
            for (n, &x) in row.as_ref().iter().enumerate() {
                data[n * n_rows + i] = x;
            }
        }
        Self::from_column_major(n_rows, n_cols, data)
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for n in 0..cols {
            for i in 0..rows {
                data.push(f(i, n));
            }
        }
        Self::from_column_major(rows, cols, data)
    }

    pub fn identity(size: usize) -> Result<Self> {
        Self::from_fn(size, size, |i, n| if i == n { 1.0 } else { 0.0 })
    }

    /// Vector dimension `M`.
    pub fn dim(&self) -> usize {
        self.rows
    }

    /// Number of vectors `N`.
    pub fn n_vectors(&self) -> usize {
        self.cols
    }

    /// Entry `i` of vector `n` (both 0-based).
    pub fn get(&self, i: usize, n: usize) -> f64 {
        self.data[n * self.rows + i]
    }

    pub fn column(&self, n: usize) -> &[f64] {
        self.item(n)
    }

    pub fn columns(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.rows)
    }

    /// Row `i` across all vectors.
    pub fn row(&self, i: usize) -> Vec<f64> {
        (0..self.cols).map(|n| self.get(i, n)).collect()
    }

    pub fn into_column_major(self) -> Vec<f64> {
        self.data
    }
}

impl ItemSet for VectorSet {
    fn rows(&self) -> usize {
        self.rows
    }
    fn item_cols(&self) -> usize {
        1
    }
    fn len(&self) -> usize {
        self.cols
    }
    fn as_slice(&self) -> &[f64] {
        &self.data
    }
    fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }
    fn dependence_error(index: usize) -> Error {
        Error::DependentVector(index)
    }
    fn shape_string(&self) -> String {
        format!("{}x{}", self.rows, self.cols)
    }
}

/// `N` matrices of shape `M×B`, the block analogue of [`VectorSet`].
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSet {
    rows: usize,
    block_cols: usize,
    blocks: usize,
    data: Vec<f64>,
}

impl BlockSet {
    /// `data` holds the blocks back to back, each in column-major order:
    /// entry `(i, j)` of block `n` is `data[n * rows * block_cols + j * rows + i]`.
    pub fn from_raw(rows: usize, block_cols: usize, blocks: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || block_cols == 0 || blocks == 0 {
            return Err(Error::InvalidShape(format!(
                "block set must be at least 1x1x1, got {rows}x{block_cols}x{blocks}"
            )));
        }
        if data.len() != rows * block_cols * blocks {
            return Err(Error::InvalidShape(format!(
                "{rows}x{block_cols}x{blocks} block set needs {} entries, got {}",
                rows * block_cols * blocks,
                data.len()
            )));
        }
        check_finite(&data)?;
        Ok(BlockSet {
            rows,
            block_cols,
            blocks,
            data,
        })
    }

    pub fn from_fn(
        rows: usize,
        block_cols: usize,
        blocks: usize,
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * block_cols * blocks);
        for n in 0..blocks {
            for j in 0..block_cols {
                for i in 0..rows {
                    data.push(f(i, j, n));
                }
            }
        }
        Self::from_raw(rows, block_cols, blocks, data)
    }

    /// `(M, B, N)`.
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.rows, self.block_cols, self.blocks)
    }

    pub fn n_blocks(&self) -> usize {
        self.blocks
    }

    /// Entry `(i, j)` of block `n`, all 0-based.
    pub fn get(&self, i: usize, j: usize, n: usize) -> f64 {
        self.data[(n * self.block_cols + j) * self.rows + i]
    }

    pub fn block(&self, n: usize) -> &[f64] {
        self.item(n)
    }

    /// Reinterprets a single-column block set as a vector set.
    pub fn to_vector_set(&self) -> Result<VectorSet> {
        if self.block_cols != 1 {
            return Err(Error::ShapeMismatch(format!(
                "only blocks with one column reduce to vectors, got {}",
                self.shape_string()
            )));
        }
        VectorSet::from_column_major(self.rows, self.blocks, self.data.clone())
    }
}

impl From<VectorSet> for BlockSet {
    fn from(v: VectorSet) -> Self {
        BlockSet {
            rows: v.rows,
            block_cols: 1,
            blocks: v.cols,
            data: v.data,
        }
    }
}

impl ItemSet for BlockSet {
    fn rows(&self) -> usize {
        self.rows
    }
    fn item_cols(&self) -> usize {
        self.block_cols
    }
    fn len(&self) -> usize {
        self.blocks
    }
    fn as_slice(&self) -> &[f64] {
        &self.data
    }
    fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }
    fn dependence_error(index: usize) -> Error {
        Error::DependentBlock(index)
    }
    fn shape_string(&self) -> String {
        format!("{}x{}x{}", self.rows, self.block_cols, self.blocks)
    }
}
