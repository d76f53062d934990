//! Reconstruction metrics and the orthogonality certificate.
//!
//! MAE and MSE are normalized by the total number of entries. PSNR uses the
//! largest absolute entry of the *first* (reference) argument as its peak, so
//! it is not symmetric in its arguments.

use crate::coeffs::packed_len;
use crate::error::{Error, Result};
use crate::sets::ItemSet;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsReport {
    pub mae: f64,
    pub mse: f64,
    /// Decibels; `+inf` when `mse == 0`.
    pub psnr: f64,
}

fn check_shapes<S: ItemSet>(v: &S, vhat: &S) -> Result<()> {
    if !v.same_shape(vhat) {
        return Err(Error::ShapeMismatch(format!(
            "cannot compare {} with {}",
            v.shape_string(),
            vhat.shape_string()
        )));
    }
    Ok(())
}

fn mean_of<S: ItemSet>(v: &S, vhat: &S, f: impl Fn(f64) -> f64) -> Result<f64> {
    check_shapes(v, vhat)?;
    let a = v.as_slice();
    let total: f64 = a.iter().zip(vhat.as_slice()).map(|(x, y)| f(x - y)).sum();
    Ok(total / a.len() as f64)
}

/// Mean absolute error.
pub fn mae<S: ItemSet>(v: &S, vhat: &S) -> Result<f64> {
    mean_of(v, vhat, f64::abs)
}

/// Mean squared error.
pub fn mse<S: ItemSet>(v: &S, vhat: &S) -> Result<f64> {
    mean_of(v, vhat, |d| d * d)
}

/// Largest absolute entry.
pub fn peak<S: ItemSet>(v: &S) -> f64 {
    v.as_slice().iter().fold(0.0, |m: f64, x| m.max(x.abs()))
}

/// PSNR in dB from a peak value and an MSE.
pub fn psnr_from_mse(peak: f64, mse: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (peak * peak / mse).log10()
    }
}

pub fn psnr<S: ItemSet>(v: &S, vhat: &S) -> Result<f64> {
    Ok(psnr_from_mse(peak(v), mse(v, vhat)?))
}

pub fn compare<S: ItemSet>(v: &S, vhat: &S) -> Result<MetricsReport> {
    let mse = mse(v, vhat)?;
    Ok(MetricsReport {
        mae: mae(v, vhat)?,
        mse,
        psnr: psnr_from_mse(peak(v), mse),
    })
}

/// Pairwise inner products `<u_n, u_m>` for `n < m`, outer `n` ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct PoVector {
    values: Vec<f64>,
}

impl PoVector {
    pub fn new(values: Vec<f64>) -> Self {
        PoVector { values }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `max |po_k|`, zero when empty.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m: f64, x| m.max(x.abs()))
    }
}

pub fn po<S: ItemSet>(u: &S) -> PoVector {
    let n_items = u.len();
    let mut values = Vec::with_capacity(packed_len(n_items));
    for n in 0..n_items {
        for m in n + 1..n_items {
            values.push(u.inner(n, m));
        }
    }
    PoVector { values }
}
