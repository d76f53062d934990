//! Lossy reconstruction from the leading orthogonal components.
//!
//! Keeping `K` components means keeping `u_1..u_K` and the coefficients
//! `r(n, m)` with `m <= K`. Items `n <= K` come back exactly; an item `n > K`
//! is rebuilt as `sum_{m<=K} r(n,m) u_m`, i.e. its own component `u_n` and
//! every term on a discarded component are dropped. Terms are added in the
//! same order as [`crate::ortho::iegsp`], so `K = N` reproduces its output
//! bit for bit.

use crate::coeffs::PackedCoefficients;
use crate::error::{Error, Result};
use crate::ortho::check_coeffs;
use crate::sets::ItemSet;

pub fn prune_reconstruct<S: ItemSet>(u: &S, r: &PackedCoefficients, keep: usize) -> Result<S> {
    check_coeffs(u, r)?;
    let n_items = u.len();
    if keep == 0 || keep > n_items {
        return Err(Error::KeepOutOfRange { keep, n: n_items });
    }

    let mut v = u.clone();
    for n in 1..n_items {
        let coeffs = r.row(n + 1);
        let vn = v.item_mut(n);
        if n >= keep {
            vn.fill(0.0);
        }
        for (m, &coeff) in coeffs.iter().enumerate().take(keep) {
            for (out, &x) in vn.iter_mut().zip(u.item(m)) {
                *out += coeff * x;
            }
        }
    }
    Ok(v)
}
