//! Acceptance suite. Each test checks one criterion and prints a single
//! `[criterion N] PASS|FAIL ...` line; run with `-- --nocapture` to see them.

use std::path::Path;
use std::process::Command;

use egsp::io::{self, Report};
use egsp::lab::{random_basis, run_table1, run_table2, ExperimentConfig};
use egsp::{
    egsp, egsp2d, gfbr, gsp, iegsp, iegsp2d, igsp, mse, pack_index, packed_len, po,
    prune_reconstruct, BlockSet, Error, ItemSet, Method, PackedCoefficients, PoVector, Tolerance,
    VectorSet,
};
use rand::distr::{Distribution, Open01, StandardUniform, Uniform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn verdict(id: &str, ok: bool, detail: String) {
    println!(
        "[criterion {id}] {} {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {id} failed: {detail}");
}

fn max_abs(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, |m: f64, x| m.max(x.abs()))
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    max_abs(a.iter().zip(b).map(|(x, y)| x - y))
}

/// Random `(M, N)` with `M ∈ [2, 50]`, `N ∈ [1, M]`, uniform(0,1) entries.
fn corpus(size: usize) -> Vec<VectorSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);
    (0..size)
        .map(|i| {
            let m = rng.random_range(2..=50);
            let n = rng.random_range(1..=m);
            random_basis(m, n, 10_000 + i as u64).unwrap()
        })
        .collect()
}

/// `U · Tᵀ` with `T` unit lower-triangular, as a plain triple loop.
fn factor_product(u: &VectorSet, r: &PackedCoefficients) -> Vec<f64> {
    let (m, n) = (u.dim(), u.n_vectors());
    let t = r.triangular().to_dense();
    let mut out = vec![0.0; m * n];
    for col in 0..n {
        for i in 0..m {
            let mut s = 0.0;
            // (U Tᵀ)[i, col] = Σ_k U[i, k] T[col, k]
            for (k, &t_ck) in t[col].iter().enumerate() {
                s += u.get(i, k) * t_ck;
            }
            out[col * m + i] = s;
        }
    }
    out
}

#[test]
fn criterion_01_table1_orthogonality() {
    let mut worst: f64 = 0.0;
    let mut per_n = Vec::new();
    for n in [5, 10, 15, 20] {
        let mut cell: f64 = 0.0;
        for seed in 0..100 {
            let cfg = ExperimentConfig {
                n_list: vec![n],
                ..ExperimentConfig::standard(seed)
            };
            cell = cell.max(run_table1(&cfg).unwrap()[0].row.max_po);
        }
        per_n.push(format!("N={n}:{cell:.3e}"));
        worst = worst.max(cell);
    }
    verdict(
        "1",
        worst <= 1e-13,
        format!("max|po| over 100 seeds {} (limit 1e-13)", per_n.join(" ")),
    );
}

#[test]
fn criterion_02_table2_round_trip_metrics() {
    let mut worst_mae: f64 = 0.0;
    let mut worst_mse: f64 = 0.0;
    let mut worst_psnr = f64::INFINITY;
    for n in [5, 10, 15, 20] {
        let cfg = ExperimentConfig {
            n_list: vec![n],
            trials: 100,
            ..ExperimentConfig::standard(0)
        };
        let m = run_table2(&cfg).unwrap()[0].metrics.unwrap();
        worst_mae = worst_mae.max(m.mae);
        worst_mse = worst_mse.max(m.mse);
        worst_psnr = worst_psnr.min(m.psnr);
    }
    verdict(
        "2",
        worst_mae <= 1e-13 && worst_mse <= 1e-26 && worst_psnr >= 250.0,
        format!("worst MAE {worst_mae:.3e} (<=1e-13), MSE {worst_mse:.3e} (<=1e-26), PSNR {worst_psnr:.2} dB (>=250)"),
    );
}

#[test]
fn criterion_03_round_trip_oracle() {
    let tol = Tolerance::default();
    let mut worst: f64 = 0.0;
    for v in corpus(1000) {
        let scale = max_abs(v.as_slice().iter().copied());
        let (u, r) = gsp(&v, tol).unwrap();
        let back = igsp(&u, &r).unwrap();
        worst = worst.max(max_abs_diff(back.as_slice(), v.as_slice()) / scale);
        let (u, r) = egsp(&v, tol).unwrap();
        let back = iegsp(&u, &r).unwrap();
        worst = worst.max(max_abs_diff(back.as_slice(), v.as_slice()) / scale);
    }
    verdict(
        "3",
        worst <= 1e-12,
        format!("worst relative max-norm error {worst:.3e} (limit 1e-12)"),
    );
}

#[test]
fn criterion_04_factorization_residual() {
    let tol = Tolerance::default();
    let mut worst: f64 = 0.0;
    for v in corpus(1000) {
        let scale = max_abs(v.as_slice().iter().copied());
        for method in Method::ALL {
            let (u, r) = method.forward(&v, tol).unwrap();
            let product = factor_product(&u, &r);
            worst = worst.max(max_abs_diff(&product, v.as_slice()) / scale);
        }
    }
    verdict(
        "4",
        worst <= 1e-12,
        format!("worst max|V - U T^T| / max|V| = {worst:.3e} (limit 1e-12)"),
    );
}

#[test]
fn criterion_05_classical_enhanced_equivalence() {
    let tol = Tolerance::default();
    let mut worst_u: f64 = 0.0;
    let mut worst_r: f64 = 0.0;
    for v in corpus(1000) {
        let (ug, rg) = gsp(&v, tol).unwrap();
        let (ue, re) = egsp(&v, tol).unwrap();
        let scale = max_abs(v.as_slice().iter().copied());
        worst_u = worst_u.max(max_abs_diff(ug.as_slice(), ue.as_slice()) / scale);
        let r_scale = max_abs(rg.as_slice().iter().copied()).max(1.0);
        worst_r = worst_r.max(max_abs_diff(rg.as_slice(), re.as_slice()) / r_scale);
    }
    verdict(
        "5",
        worst_u <= 1e-12 && worst_r <= 1e-12,
        format!("worst relative gap: u {worst_u:.3e}, r {worst_r:.3e} (limit 1e-12)"),
    );
}

#[test]
fn criterion_06_block_reduction() {
    let tol = Tolerance::default();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut bit_exact = true;
    for i in 0..100 {
        let m = rng.random_range(1..=30);
        let n = rng.random_range(1..=m);
        let v = random_basis(m, n, 600 + i).unwrap();
        let (u, r) = egsp(&v, tol).unwrap();
        let (ub, rb) = egsp2d(&BlockSet::from(v.clone()), tol).unwrap();
        let back = iegsp(&u, &r).unwrap();
        let back_b = iegsp2d(&ub, &rb).unwrap();
        let same = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits());
        bit_exact &= same(u.as_slice(), ub.as_slice())
            && same(r.as_slice(), rb.as_slice())
            && same(back.as_slice(), back_b.as_slice());
    }

    let mut worst: f64 = 0.0;
    for seed in 0..100 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data: Vec<f64> = Open01.sample_iter(&mut rng).take(4 * 4 * 3).collect();
        let v = BlockSet::from_raw(4, 4, 3, data).unwrap();
        let (u, r) = egsp2d(&v, tol).unwrap();
        let back = iegsp2d(&u, &r).unwrap();
        let scale = max_abs(v.as_slice().iter().copied());
        worst = worst.max(max_abs_diff(back.as_slice(), v.as_slice()) / scale);
    }
    verdict(
        "6",
        bit_exact && worst <= 1e-12,
        format!("B=1 bit-exact on 100 instances: {bit_exact}; 4x4x3 round-trip relative error {worst:.3e} (limit 1e-12)"),
    );
}

#[test]
fn criterion_07_counting_laws() {
    let gfbr_ok =
        (0..=10_000u64).all(|x| gfbr(x) == (0..=x).sum::<u64>() && gfbr(x) == x * (x + 1) / 2);

    let mut packed_ok = true;
    for n in 1..=200usize {
        let expected = n * (n - 1) / 2;
        packed_ok &= packed_len(n) == expected && PackedCoefficients::zeros(n).len() == expected;
        // loop-order enumeration visits 1..=expected once each, in order
        let mut k = 0;
        for row in 2..=n {
            for col in 1..row {
                k += 1;
                packed_ok &= pack_index(row, col) == k;
            }
        }
        packed_ok &= k == expected;
    }

    let mut forward_ok = true;
    let mut po_ok = true;
    for n in [1usize, 2, 3, 7, 20, 60, 200] {
        let v = random_basis(n, n, n as u64).unwrap();
        let (u, r) = egsp(&v, Tolerance::default()).unwrap();
        forward_ok &= r.len() == n * (n - 1) / 2;
        po_ok &= po(&u).len() == n * (n - 1) / 2;
    }
    for n in 1..=200usize {
        let u = VectorSet::from_fn(1, n, |_, k| k as f64 + 1.0).unwrap();
        po_ok &= po(&u).len() == n * (n - 1) / 2;
    }
    verdict(
        "7",
        gfbr_ok && packed_ok && forward_ok && po_ok,
        format!("gfbr {gfbr_ok}, pack_index/packed length {packed_ok}, forward r length {forward_ok}, po length {po_ok}"),
    );
}

#[test]
fn criterion_08_pruning_energy() {
    let tol = Tolerance::default();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut monotone = true;
    let mut exact_at_n = true;
    let mut worst_gap: f64 = 0.0;
    let mut worst_case = String::new();
    for i in 0..100 {
        let m = rng.random_range(2..=30);
        let n = rng.random_range(2..=m);
        let v = random_basis(m, n, 800 + i).unwrap();
        let (u, r) = egsp(&v, tol).unwrap();
        let scale = max_abs(v.as_slice().iter().copied());
        let mut prev = f64::INFINITY;
        for keep in 1..=n {
            let vhat = prune_reconstruct(&u, &r, keep).unwrap();
            let err = mse(&v, &vhat).unwrap();
            monotone &= err <= prev;
            prev = err;
            if keep == n {
                exact_at_n &= err <= 1e-24 * scale * scale;
            } else {
                let dropped: f64 = (keep..n).map(|k| u.inner(k, k)).sum();
                let oracle = dropped / (m * n) as f64;
                let gap = (err - oracle).abs() / oracle;
                if gap > worst_gap {
                    worst_gap = gap;
                    worst_case = format!("M={m} N={n} K={keep}");
                }
            }
        }
    }
    verdict(
        "8",
        monotone && exact_at_n && worst_gap <= 1e-10,
        format!(
            "non-increasing {monotone}, exact at K=N {exact_at_n}; worst |MSE - sum_(n>K)|u_n|^2/(MN)| relative gap {worst_gap:.3e} at {worst_case} (limit 1e-10)"
        ),
    );
}

fn exe() -> &'static str {
    env!("CARGO_BIN_EXE_egsp")
}

#[test]
fn criterion_09_dependence_errors() {
    let tol = Tolerance::default();
    let mut ok = true;
    let mut notes = Vec::new();

    // exact multiple of an earlier column
    for (dep, src) in [(2usize, 1usize), (3, 1), (5, 2)] {
        let base = random_basis(10, 6, dep as u64).unwrap();
        let v = VectorSet::from_fn(10, 6, |i, k| {
            if k + 1 == dep {
                2.0 * base.get(i, src - 1)
            } else {
                base.get(i, k)
            }
        })
        .unwrap();
        for method in Method::ALL {
            let got = method.forward(&v, tol).unwrap_err();
            ok &= got == Error::DependentVector(dep);
        }
    }
    notes.push("collinear".to_string());

    // pairwise angle ~1e-14, below the 1e-12 guard
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for dep in 2..=6usize {
        let base = random_basis(10, 6, 90 + dep as u64).unwrap();
        let z: Vec<f64> = (0..10)
            .map(|_| rng.sample::<f64, _>(StandardUniform) - 0.5)
            .collect();
        let v = VectorSet::from_fn(10, 6, |i, k| {
            if k + 1 == dep {
                base.get(i, 0) + 1e-14 * z[i]
            } else {
                base.get(i, k)
            }
        })
        .unwrap();
        for method in Method::ALL {
            ok &= method.forward(&v, tol).unwrap_err() == Error::DependentVector(dep);
        }
    }
    notes.push("near-collinear".to_string());

    // an angle well above the guard is accepted
    let v = VectorSet::from_columns(&[[1.0, 0.0], [1.0, 1e-9]]).unwrap();
    ok &= egsp(&v, tol).is_ok();

    // block variant names the block
    let base =
        BlockSet::from_raw(3, 2, 3, random_basis(6, 3, 77).unwrap().into_column_major()).unwrap();
    let b = BlockSet::from_fn(3, 2, 3, |i, j, n| {
        if n == 2 {
            2.0 * base.get(i, j, 0) - base.get(i, j, 1)
        } else {
            base.get(i, j, n)
        }
    })
    .unwrap();
    ok &= egsp2d(&b, tol).unwrap_err() == Error::DependentBlock(3);

    // CLI exit code 3 with the column in the message
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("collinear.csv");
    std::fs::write(&input, "1,2\n0,0\n").unwrap();
    let out = Command::new(exe())
        .args(["ortho", "--input"])
        .arg(&input)
        .arg("--output-u")
        .arg(dir.path().join("u.csv"))
        .arg("--output-r")
        .arg(dir.path().join("r.txt"))
        .output()
        .unwrap();
    let stderr = String::from_utf8_lossy(&out.stderr);
    let cli_ok = out.status.code() == Some(3) && stderr.contains("column 2");
    ok &= cli_ok;
    notes.push(format!("cli exit {:?}", out.status.code()));

    verdict("9", ok, notes.join(", "));
}

fn random_finite(rng: &mut ChaCha8Rng) -> f64 {
    // mix raw bit patterns (all finite doubles) with ordinary magnitudes
    if rng.random_bool(0.5) {
        loop {
            let x = f64::from_bits(rng.random::<u64>());
            if x.is_finite() {
                return x;
            }
        }
    } else {
        let e = Uniform::new(-30.0, 30.0).unwrap().sample(rng);
        (rng.random::<f64>() - 0.5) * 10f64.powf(e)
    }
}

fn bits(xs: &[f64]) -> Vec<u64> {
    xs.iter().map(|x| x.to_bits()).collect()
}

#[test]
fn criterion_10_io_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut ok = true;
    for _ in 0..1000 {
        let m = rng.random_range(1..=6);
        let b = rng.random_range(1..=4);
        let n = rng.random_range(1..=6);

        let v = VectorSet::from_fn(m, n, |_, _| random_finite(&mut rng)).unwrap();
        ok &= bits(io::parse_matrix(&io::render_matrix(&v)).unwrap().as_slice())
            == bits(v.as_slice());

        let t = BlockSet::from_fn(m, b, n, |_, _, _| random_finite(&mut rng)).unwrap();
        let t2 = io::parse_tensor(&io::render_tensor(&t)).unwrap();
        ok &= t2.dims() == t.dims() && bits(t2.as_slice()) == bits(t.as_slice());

        let r = PackedCoefficients::new(
            n,
            (0..packed_len(n))
                .map(|_| random_finite(&mut rng))
                .collect(),
        )
        .unwrap();
        let r2 = io::parse_coeffs(&io::render_coeffs(&r)).unwrap();
        ok &= r2.n_vectors() == n && bits(r2.as_slice()) == bits(r.as_slice());

        let report = Report {
            method: Method::ALL[rng.random_range(0..3)],
            seed: rng.random_bool(0.8).then(|| rng.random()),
            m: rng.random_range(1..1000),
            n: rng.random_range(1..1000),
            max_po: random_finite(&mut rng).abs(),
            mae: random_finite(&mut rng).abs(),
            mse: random_finite(&mut rng).abs(),
            psnr: if rng.random_bool(0.1) {
                f64::INFINITY
            } else {
                random_finite(&mut rng)
            },
        };
        let back = io::parse_report(&io::render_report(&report)).unwrap();
        ok &= back.method == report.method
            && back.seed == report.seed
            && back.m == report.m
            && back.n == report.n
            && bits(&[back.max_po, back.mae, back.mse, back.psnr])
                == bits(&[report.max_po, report.mae, report.mse, report.psnr]);

        let p = PoVector::new(
            (0..packed_len(n + 1))
                .map(|_| random_finite(&mut rng))
                .collect(),
        );
        ok &= bits(io::parse_plot(&io::render_plot(&p)).unwrap().as_slice()) == bits(p.as_slice());
    }
    verdict(
        "10",
        ok,
        "1000 random payloads per format, bitwise".to_string(),
    );
}

fn dir_snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn criterion_11_bench_determinism() {
    let root = tempfile::tempdir().unwrap();
    let mut snapshots = Vec::new();
    for run in ["a", "b"] {
        let out_dir = root.path().join(run);
        let status = Command::new(exe())
            .args([
                "bench",
                "--m",
                "20",
                "--n-list",
                "5,10,15,20",
                "--seed",
                "1234",
                "--out-dir",
            ])
            .arg(&out_dir)
            .output()
            .unwrap()
            .status;
        assert!(status.success());
        snapshots.push(dir_snapshot(&out_dir));
    }
    let identical = snapshots[0] == snapshots[1];
    verdict(
        "11",
        identical && snapshots[0].len() == 9,
        format!(
            "{} files per run, byte-identical: {identical}",
            snapshots[0].len()
        ),
    );
}
