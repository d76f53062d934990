//! Experiment harness: random bases, orthogonality and round-trip tables,
//! and a conditioning sweep across the three forward methods.
//!
//! Random entries come from ChaCha8 (`rand_chacha`) seeded with
//! `seed_from_u64`, drawn uniform on the open interval (0, 1) and filled
//! column by column. Trial `t` of a configuration uses seed `seed + t`
//! (wrapping), so the first trial of every run uses the configured seed.

use rand::distr::{Distribution, Open01};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::metrics::{compare, po, MetricsReport, PoVector};
use crate::ortho::{Method, Tolerance};
use crate::sets::VectorSet;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Vector dimension `M`.
    pub m: usize,
    /// Set sizes to evaluate, in output order.
    pub n_list: Vec<usize>,
    pub seed: u64,
    pub method: Method,
    /// Independent draws per set size; rows report the worst case.
    pub trials: usize,
    pub tol: Tolerance,
}

impl ExperimentConfig {
    /// `M = 20`, `N ∈ {5, 10, 15, 20}`, one trial of `egsp`.
    pub fn standard(seed: u64) -> Self {
        ExperimentConfig {
            m: 20,
            n_list: vec![5, 10, 15, 20],
            seed,
            method: Method::Egsp,
            trials: 1,
            tol: Tolerance::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_list.is_empty() {
            return Err(Error::InvalidConfig("n_list is empty".into()));
        }
        if let Some(&n) = self.n_list.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidConfig(format!(
                "every N must be at least 2, got {n}"
            )));
        }
        let max_n = self.n_list.iter().copied().max().unwrap_or(0);
        if self.m < max_n {
            return Err(Error::InvalidConfig(format!(
                "M = {} is smaller than the largest N = {max_n}",
                self.m
            )));
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        Ok(())
    }

    fn trial_seed(&self, trial: usize) -> u64 {
        self.seed.wrapping_add(trial as u64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    pub method: Method,
    pub seed: u64,
    pub m: usize,
    pub n: usize,
    /// Largest `|<u_n, u_m>|` over all pairs and trials.
    pub max_po: f64,
    /// Worst-case round-trip metrics over the trials; absent for
    /// orthogonality-only rows.
    pub metrics: Option<MetricsReport>,
}

/// A Table-I style row together with the certificate of its first trial.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalityRow {
    pub row: ExperimentRow,
    pub po: PoVector,
}

fn uniform_column(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    Open01.sample_iter(rng).take(m).collect()
}

/// `m×n` basis with i.i.d. uniform(0, 1) entries.
pub fn random_basis(m: usize, n: usize, seed: u64) -> Result<VectorSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<f64> = Open01.sample_iter(&mut rng).take(m * n).collect();
    VectorSet::from_column_major(m, n, data)
}

/// Table I protocol: orthogonalize a random basis for each `N` and record
/// `max |po(u)|`.
pub fn run_table1(cfg: &ExperimentConfig) -> Result<Vec<OrthogonalityRow>> {
    cfg.validate()?;
    cfg.n_list
        .iter()
        .map(|&n| {
            let mut max_po: f64 = 0.0;
            let mut first = None;
            for trial in 0..cfg.trials {
                let v = random_basis(cfg.m, n, cfg.trial_seed(trial))?;
                let (u, _) = cfg.method.forward(&v, cfg.tol)?;
                let p = po(&u);
                max_po = max_po.max(p.max_abs());
                first.get_or_insert(p);
            }
            Ok(OrthogonalityRow {
                row: ExperimentRow {
                    method: cfg.method,
                    seed: cfg.seed,
                    m: cfg.m,
                    n,
                    max_po,
                    metrics: None,
                },
                po: first.expect("at least one trial"),
            })
        })
        .collect()
}

/// Table II protocol: forward, matching inverse, then MAE/MSE/PSNR against
/// the original basis.
pub fn run_table2(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRow>> {
    cfg.validate()?;
    cfg.n_list
        .iter()
        .map(|&n| {
            let mut max_po: f64 = 0.0;
            let mut worst: Option<MetricsReport> = None;
            for trial in 0..cfg.trials {
                let v = random_basis(cfg.m, n, cfg.trial_seed(trial))?;
                let (u, r) = cfg.method.forward(&v, cfg.tol)?;
                let vhat = cfg.method.inverse(&u, &r)?;
                let report = compare(&v, &vhat)?;
                max_po = max_po.max(po(&u).max_abs());
                worst = Some(match worst {
                    None => report,
                    Some(w) => MetricsReport {
                        mae: w.mae.max(report.mae),
                        mse: w.mse.max(report.mse),
                        psnr: w.psnr.min(report.psnr),
                    },
                });
            }
            Ok(ExperimentRow {
                method: cfg.method,
                seed: cfg.seed,
                m: cfg.m,
                n,
                max_po,
                metrics: worst,
            })
        })
        .collect()
}

/// Basis `v_n = (1 - knob) · w + knob · z_n`.
///
/// The `z_n` are exactly [`random_basis`]`(m, n, seed)`, so `knob = 1`
/// reproduces the plain random basis. The common direction `w` is drawn
/// uniform(0, 1) from stream 1 of the same seed; small knobs push every
/// vector toward it.
pub fn near_dependent_basis(m: usize, n: usize, knob: f64, seed: u64) -> Result<VectorSet> {
    if !(knob > 0.0 && knob <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "condition knob must lie in (0, 1], got {knob}"
        )));
    }
    let z = random_basis(m, n, seed)?;
    if knob == 1.0 {
        return Ok(z);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let w = uniform_column(&mut rng, m);
    VectorSet::from_fn(m, n, |i, k| (1.0 - knob) * w[i] + knob * z.get(i, k))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityEntry {
    pub method: Method,
    pub max_po: f64,
}

/// Runs every forward method on the same [`near_dependent_basis`] and
/// reports `max |po(u)|` per method. No ranking is implied.
pub fn stability_sweep(
    m: usize,
    n: usize,
    knob: f64,
    seed: u64,
    tol: Tolerance,
) -> Result<Vec<StabilityEntry>> {
    let v = near_dependent_basis(m, n, knob, seed)?;
    Method::ALL
        .iter()
        .map(|&method| {
            let (u, _) = method.forward(&v, tol)?;
            Ok(StabilityEntry {
                method,
                max_po: po(&u).max_abs(),
            })
        })
        .collect()
}
