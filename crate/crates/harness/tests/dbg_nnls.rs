//! Scratch diagnostics (not part of the suite; deleted before delivery).

use lp_core::init::point::{idiot_crash, idiot_start, PenaltySchedule};
use lp_core::init::InitVerdict;
use lp_core::linalg::lu_factor;
use lp_core::mat::{dot, norm2};
use lp_core::model::StandardLp;
use lp_core::{Mat, Settings};
use lp_harness::gen::{generate, split_seed, Instance, InstanceKind, InstanceSpec};
use lp_harness::oracle::{oracle, OracleVerdict, DEFAULT_ENUM_CAP};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MASTER_SEED: u64 = 0xACCE;

fn sized_spec(kind: InstanceKind, seed: u64) -> InstanceSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x517E);
    let m = rng.gen_range(2..=6usize);
    let n = rng.gen_range((m + 2).max(7)..=12usize);
    let density = rng.gen_range(0.4..0.9);
    InstanceSpec { m, n, density, seed, kind }
}

fn nnls_trace(lp: &StandardLp, x0: &[f64], settings: &Settings) {
    let m = lp.m();
    let n = lp.n();
    let tiny = 1e-11;
    let mut passive: Vec<bool> = x0.iter().map(|&v| v > 1e-9).collect();
    let mut x: Vec<f64> =
        x0.iter().zip(&passive).map(|(&v, &keep)| if keep { v } else { 0.0 }).collect();

    let solve_on = |p: &[usize]| -> Option<Vec<f64>> {
        let k = p.len();
        let mut g = Mat::zeros(k, k);
        let mut ridged = Mat::zeros(k, k);
        let mut rhs = vec![0.0; k];
        for (a_idx, &ja) in p.iter().enumerate() {
            let col_a = lp.a.col(ja);
            rhs[a_idx] = dot(col_a, &lp.b);
            for (b_idx, &jb) in p.iter().enumerate().skip(a_idx) {
                let v = dot(col_a, lp.a.col(jb));
                g.set(a_idx, b_idx, v);
                g.set(b_idx, a_idx, v);
                let r = v + if a_idx == b_idx { 1e-12 * (1.0 + v.abs()) } else { 0.0 };
                ridged.set(a_idx, b_idx, r);
                ridged.set(b_idx, a_idx, r);
            }
        }
        let lu = lu_factor(&ridged, settings.pivot_tol);
        let mut z = lu.solve(&rhs, false)?;
        for _ in 0..2 {
            let gz = g.mul_vec(&z);
            let gap: Vec<f64> = rhs.iter().zip(&gz).map(|(want, got)| want - got).collect();
            let dz = lu.solve(&gap, false)?;
            for (zi, di) in z.iter_mut().zip(&dz) {
                *zi += di;
            }
        }
        Some(z)
    };

    for outer in 0..3 * n + 10 {
        let mut inner = 0;
        loop {
            inner += 1;
            if inner > 100 {
                println!("  inner loop runaway");
                return;
            }
            let p: Vec<usize> = (0..n).filter(|&j| passive[j]).collect();
            if p.is_empty() {
                for v in x.iter_mut() {
                    *v = 0.0;
                }
                break;
            }
            let z = match solve_on(&p) {
                Some(z) => z,
                None => {
                    println!("  outer {}: singular solve with |P|={}", outer, p.len());
                    return;
                }
            };
            if z.iter().all(|&v| v > tiny) {
                for v in x.iter_mut() {
                    *v = 0.0;
                }
                for (k, &j) in p.iter().enumerate() {
                    x[j] = z[k];
                }
                break;
            }
            let mut alpha = 1.0f64;
            for (k, &j) in p.iter().enumerate() {
                if z[k] <= tiny && x[j] - z[k] > 0.0 {
                    alpha = alpha.min(x[j] / (x[j] - z[k]));
                }
            }
            for (k, &j) in p.iter().enumerate() {
                x[j] += alpha * (z[k] - x[j]);
            }
            for (k, &j) in p.iter().enumerate() {
                if z[k] <= tiny && x[j] <= tiny {
                    passive[j] = false;
                    x[j] = 0.0;
                }
            }
        }
        let r: Vec<f64> = (0..m).map(|i| dot(&lp.a.row(i), &x) - lp.b[i]).collect();
        let residual = norm2(&r);
        let mut pick = None;
        let mut w_max = 1e-10 * (1.0 + norm2(&lp.b));
        let mut w_best = f64::NEG_INFINITY;
        for j in 0..n {
            if !passive[j] {
                let w = -dot(lp.a.col(j), &r);
                w_best = w_best.max(w);
                if w > w_max {
                    w_max = w;
                    pick = Some(j);
                }
            }
        }
        println!(
            "  outer {}: |P|={} inner={} residual={:.3e} retired_w_max={:.3e} pick={:?}",
            outer,
            passive.iter().filter(|&&b| b).count(),
            inner,
            residual,
            w_best,
            pick
        );
        match pick {
            Some(j) => passive[j] = true,
            None => return,
        }
    }
    println!("  outer cap exhausted");
}

#[test]
fn hunt() {
    let settings = Settings::default();
    for t in 0..200u64 {
        let seed = split_seed(MASTER_SEED, t);
        let spec = sized_spec(InstanceKind::Feasible, seed);
        let g = generate(&spec, &settings).unwrap();
        let lp = match &g.instance {
            Instance::Standard(lp) => lp.clone(),
            _ => unreachable!(),
        };
        let orc = oracle(&lp, DEFAULT_ENUM_CAP, &settings).unwrap();
        let target = matches!(&orc, OracleVerdict::Optimal { value, .. }
            if (value + 7.211527242521866).abs() < 1e-9 || (value + 1.8750000000000049).abs() < 1e-9);
        if !target {
            continue;
        }
        println!("instance t={} m={} n={} density={:.3}", t, lp.m(), lp.n(), spec.density);
        let out = idiot_start(&lp, &settings);
        if let InitVerdict::Point { residual, .. } = &out.verdict {
            println!("  idiot_start residual {:.3e}", residual);
        }
        let raw = idiot_crash(&lp, &PenaltySchedule::for_problem(&lp), &settings);
        println!("  raw crash residual {:.3e}", raw.residual);
        nnls_trace(&lp, &raw.x, &settings);
    }
}
