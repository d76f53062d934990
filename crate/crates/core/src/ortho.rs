//! Forward and inverse Gram-Schmidt kernels.
//!
//! Three forward recurrences are provided, all producing orthogonal (not
//! unit-norm) items `u` and packed coefficients `r`:
//!
//! * [`Method::Gsp`], classical: `r(n,m) = <v_n,u_m>/<u_m,u_m>`, the
//!   projections are accumulated first and subtracted from `v_n` once.
//! * [`Method::Egsp`], enhanced: `u_n` starts as `v_n` and each projection is
//!   subtracted as soon as it is computed. The numerator still uses the
//!   original `v_n`.
//! * [`Method::MgsStrict`], textbook modified Gram-Schmidt: like `Egsp` but
//!   the numerator uses the partially updated `u_n`.
//!
//! Any of them is undone by `v_n = u_n + sum_{m<n} r(n,m) u_m`, which only
//! needs `u` and `r`. [`igsp`] accumulates the sum before adding it, the
//! other inverses add term by term.
//!
//! Inner products are sequential left-to-right sums (see [`crate::sets::dot`])
//! and the item recurrence is sequential, so every result is deterministic.
//! The kernels are pure functions of their arguments.

use std::fmt;
use std::str::FromStr;

use crate::coeffs::{packed_len, PackedCoefficients};
use crate::error::{Error, Result};
use crate::sets::{frobenius, BlockSet, ItemSet, VectorSet};

/// Relative dependence threshold.
///
/// Item `n` is rejected when `<u_n,u_n> <= rel_dep² · <v_n,v_n>`, i.e. when
/// less than a `rel_dep` fraction of its norm survives the projections.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    rel_dep: f64,
}

impl Tolerance {
    pub const DEFAULT_REL_DEP: f64 = 1e-12;

    pub fn new(rel_dep: f64) -> Result<Self> {
        if rel_dep > 0.0 && rel_dep < 1.0 {
            Ok(Tolerance { rel_dep })
        } else {
            Err(Error::InvalidTolerance(rel_dep))
        }
    }

    pub fn rel_dep(&self) -> f64 {
        self.rel_dep
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rel_dep: Self::DEFAULT_REL_DEP,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Gsp,
    Egsp,
    MgsStrict,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Gsp, Method::Egsp, Method::MgsStrict];

    pub fn label(&self) -> &'static str {
        match self {
            Method::Gsp => "gsp",
            Method::Egsp => "egsp",
            Method::MgsStrict => "mgs",
        }
    }

    /// Runs this method's forward recurrence on any item set.
    pub fn forward<S: ItemSet>(&self, v: &S, tol: Tolerance) -> Result<(S, PackedCoefficients)> {
        forward(v, *self, tol)
    }

    /// Runs the inverse matching this method: accumulate-then-add for `Gsp`,
    /// incremental for the others.
    pub fn inverse<S: ItemSet>(&self, u: &S, r: &PackedCoefficients) -> Result<S> {
        match self {
            Method::Gsp => inverse(u, r, Accumulation::Deferred),
            Method::Egsp | Method::MgsStrict => inverse(u, r, Accumulation::Incremental),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "gsp" => Ok(Method::Gsp),
            "egsp" => Ok(Method::Egsp),
            "mgs" | "mgs_strict" => Ok(Method::MgsStrict),
            other => Err(format!(
                "unknown method `{other}` (expected gsp, egsp or mgs)"
            )),
        }
    }
}

/// Classical Gram-Schmidt on column vectors.
pub fn gsp(v: &VectorSet, tol: Tolerance) -> Result<(VectorSet, PackedCoefficients)> {
    forward(v, Method::Gsp, tol)
}

/// Inverse of [`gsp`].
pub fn igsp(u: &VectorSet, r: &PackedCoefficients) -> Result<VectorSet> {
    inverse(u, r, Accumulation::Deferred)
}

/// Enhanced Gram-Schmidt on column vectors.
pub fn egsp(v: &VectorSet, tol: Tolerance) -> Result<(VectorSet, PackedCoefficients)> {
    forward(v, Method::Egsp, tol)
}

/// Inverse of [`egsp`] (and of [`mgs_strict`]).
pub fn iegsp(u: &VectorSet, r: &PackedCoefficients) -> Result<VectorSet> {
    inverse(u, r, Accumulation::Incremental)
}

/// Modified Gram-Schmidt with the updated-vector numerator.
pub fn mgs_strict(v: &VectorSet, tol: Tolerance) -> Result<(VectorSet, PackedCoefficients)> {
    forward(v, Method::MgsStrict, tol)
}

/// Enhanced Gram-Schmidt on matrix blocks under the Frobenius inner product.
pub fn egsp2d(v: &BlockSet, tol: Tolerance) -> Result<(BlockSet, PackedCoefficients)> {
    forward(v, Method::Egsp, tol)
}

/// Inverse of [`egsp2d`].
pub fn iegsp2d(u: &BlockSet, r: &PackedCoefficients) -> Result<BlockSet> {
    inverse(u, r, Accumulation::Incremental)
}

fn forward<S: ItemSet>(v: &S, method: Method, tol: Tolerance) -> Result<(S, PackedCoefficients)> {
    let n_items = v.len();
    let len = v.item_len();
    let rows = v.rows();
    let threshold = tol.rel_dep * tol.rel_dep;

    let mut u = v.clone();
    let mut r = Vec::with_capacity(packed_len(n_items));
    // <u_m, u_m> for finished items
    let mut energy = Vec::with_capacity(n_items);
    let mut acc = vec![0.0; len];

    for n in 0..n_items {
        let vn = v.item(n);
        let (done, rest) = u.as_mut_slice().split_at_mut(n * len);
        let un = &mut rest[..len];
        let prev = |m: usize| &done[m * len..(m + 1) * len];

        match method {
            Method::Gsp => {
                acc.fill(0.0);
                for (m, &den) in energy.iter().enumerate() {
                    let um = prev(m);
                    let coeff = frobenius(vn, um, rows) / den;
                    r.push(coeff);
                    for (a, &x) in acc.iter_mut().zip(um) {
                        *a += coeff * x;
                    }
                }
                for ((out, &x), &a) in un.iter_mut().zip(vn).zip(&acc) {
                    *out = x - a;
                }
            }
            Method::Egsp | Method::MgsStrict => {
                for (m, &den) in energy.iter().enumerate() {
                    let um = prev(m);
                    let num = match method {
                        Method::Egsp => frobenius(vn, um, rows),
                        _ => frobenius(un, um, rows),
                    };
                    let coeff = num / den;
                    r.push(coeff);
                    for (out, &x) in un.iter_mut().zip(um) {
                        *out -= coeff * x;
                    }
                }
            }
        }

        let un_energy = frobenius(un, un, rows);
        let vn_energy = frobenius(vn, vn, rows);
        // false for a zero or NaN energy too, so later divisions are safe
        let independent = un_energy > threshold * vn_energy;
        if !independent {
            return Err(S::dependence_error(n + 1));
        }
        energy.push(un_energy);
    }

    let r = PackedCoefficients::new(n_items, r)?;
    Ok((u, r))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Accumulation {
    /// Sum all `r(n,m) u_m` first, then add to `u_n`.
    Deferred,
    /// Add each `r(n,m) u_m` to the running `v_n`.
    Incremental,
}

pub(crate) fn check_coeffs<S: ItemSet>(u: &S, r: &PackedCoefficients) -> Result<()> {
    if r.n_vectors() != u.len() {
        return Err(Error::ShapeMismatch(format!(
            "coefficients describe {} items but the set {} has {}",
            r.n_vectors(),
            u.shape_string(),
            u.len()
        )));
    }
    Ok(())
}

fn inverse<S: ItemSet>(u: &S, r: &PackedCoefficients, mode: Accumulation) -> Result<S> {
    check_coeffs(u, r)?;
    let len = u.item_len();
    let mut v = u.clone();
    let mut acc = vec![0.0; len];

    for n in 1..u.len() {
        let coeffs = r.row(n + 1);
        let vn = v.item_mut(n);
        match mode {
            Accumulation::Deferred => {
                acc.fill(0.0);
                for (m, &coeff) in coeffs.iter().enumerate() {
                    for (a, &x) in acc.iter_mut().zip(u.item(m)) {
                        *a += coeff * x;
                    }
                }
                for (out, &a) in vn.iter_mut().zip(&acc) {
                    *out += a;
                }
            }
            Accumulation::Incremental => {
                for (m, &coeff) in coeffs.iter().enumerate() {
                    for (out, &x) in vn.iter_mut().zip(u.item(m)) {
                        *out += coeff * x;
                    }
                }
            }
        }
    }
    Ok(v)
}
