use num_complex::Complex64;
use proptest::prelude::*;

use super::*;
use crate::conventional::dft_matrix;
use crate::model::{generate_channel, generate_noise, paper_gains, received_pilot_signal, sigma2_from_snr};
use crate::numerics::{dot, draw_cn, RandomStream};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn cfg(n: usize, gains: Vec<f64>, powers: Vec<f64>, sigma2: f64) -> SystemConfig {
    SystemConfig::new(8, gains.len(), n, sigma2, powers, gains).unwrap()
}

/// Random configuration and feasible pilots (each column strictly inside or on
/// its budget).
fn random_instance(seed: u64) -> (SystemConfig, PilotMatrix) {
    let mut s = RandomStream::new(seed, 0);
    let k = 1 + (s.uniform(0.0, 8.0) as usize);
    let n = 1 + (s.uniform(0.0, k as f64) as usize);
    let gains: Vec<f64> = (0..k).map(|_| s.uniform(0.05, 1.0)).collect();
    let powers: Vec<f64> = (0..k).map(|_| s.uniform(0.5, 2.0)).collect();
    let sigma2 = sigma2_from_snr(s.uniform(-10.0, 20.0), &powers);
    let cfg = SystemConfig::new(8, k, n, sigma2, powers, gains).unwrap();
    let x = initial_pilots(InitScheme::Random, &cfg, seed);
    (cfg, x)
}

fn random_unitary(n: usize, seed: u64) -> CMatrix {
    let g = draw_cn(&mut RandomStream::new(seed, 5), n, n);
    hermitian_eig(&(&g + &g.adjoint()).hermitian_part()).unwrap().vectors
}

#[test]
fn gram_examples() {
    let cf = cfg(3, vec![0.5, 0.5], vec![1.0, 1.0], 0.3);
    let a = gram_matrix(&PilotMatrix::new(CMatrix::zeros(3, 2)), &cf).unwrap();
    assert_eq!(a, CMatrix::identity(3).scale_real(0.3));

    let cf = cfg(1, vec![1.0], vec![1.0], 1.0);
    let a = gram_matrix(&PilotMatrix::new(CMatrix::identity(1)), &cf).unwrap();
    assert_eq!(a[(0, 0)], c(2.0, 0.0));

    // orthogonal columns: eigenvalues g_k P_k + σ²
    let cf = cfg(3, vec![0.2, 0.5, 0.9], vec![1.0, 2.0, 0.5], 0.1);
    let x = closed_form_nk(&cf).unwrap();
    let mut expect: Vec<f64> = (0..3).map(|k| cf.gains[k] * cf.powers[k] + 0.1).collect();
    expect.sort_by(f64::total_cmp);
    let e = hermitian_eig(&gram_matrix(&x, &cf).unwrap()).unwrap();
    for (a, b) in e.values.iter().zip(&expect) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn gram_singular_without_noise() {
    let cf = cfg(2, vec![1.0, 1.0], vec![1.0, 1.0], 0.0);
    let x = PilotMatrix::new(CMatrix::from_fn(2, 2, |i, _| if i == 0 { c(1.0, 0.0) } else { c(0.0, 0.0) }));
    assert!(matches!(gram_matrix(&x, &cf), Err(Error::Singular { .. })));
    assert!(gram_matrix(&closed_form_nk(&cf).unwrap(), &cf).is_ok());
}

#[test]
fn objective_examples() {
    let cf = cfg(4, vec![0.5; 2], vec![1.0; 2], 0.25);
    let v = objective(&PilotMatrix::new(CMatrix::zeros(4, 2)), &cf).unwrap();
    assert!((v - 16.0).abs() < 1e-12);

    let cf = cfg(1, vec![1.0], vec![1.0], 1.0);
    assert!((objective(&PilotMatrix::new(CMatrix::identity(1)), &cf).unwrap() - 0.5).abs() < 1e-15);

    let cf = cfg(2, vec![1.0, 0.5], vec![1.0, 1.0], 1.0);
    let x = PilotMatrix::new(CMatrix::identity(2));
    assert!((objective(&x, &cf).unwrap() - 7.0 / 6.0).abs() < 1e-14);
}

#[test]
fn leave_one_out_examples() {
    let cf = cfg(2, vec![0.7], vec![1.0], 0.4);
    let x = PilotMatrix::new(CMatrix::from_fn(2, 1, |_, _| c(0.5, 0.5)));
    assert_eq!(leave_one_out(&x, 0, &cf).unwrap(), CMatrix::identity(2).scale_real(0.4));

    let cf = cfg(2, vec![1.0, 1.0], vec![1.0, 1.0], 0.1);
    let mut x = PilotMatrix::new(CMatrix::zeros(2, 2));
    x.set_column(1, &[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
    x.set_column(0, &[c(0.3, 0.1), c(0.2, -0.4)]).unwrap();
    let q = leave_one_out(&x, 0, &cf).unwrap();
    assert!((&q - &CMatrix::from_diag(&[1.1, 0.1])).max_abs() < 1e-15);

    for seed in 0..20 {
        let (cf, x) = random_instance(seed);
        for k in 0..cf.k {
            let diff = &gram_matrix(&x, &cf).unwrap() - &leave_one_out(&x, k, &cf).unwrap();
            assert!((&diff - &user_contribution(&x, k, &cf)).max_abs() < 1e-12);
            if cf.n > 1 {
                let e = hermitian_eig(&diff.hermitian_part()).unwrap();
                let big = e.values.iter().filter(|v| v.abs() > 1e-10).count();
                assert!(big <= 1);
            }
        }
    }
}

#[test]
fn update_two_users_goes_orthogonal() {
    let cf = cfg(2, vec![1.0, 1.0], vec![1.0, 1.0], 0.1);
    let mut x = PilotMatrix::new(CMatrix::zeros(2, 2));
    x.set_column(0, &[c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
    x.set_column(1, &[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
    let up = rayleigh_update(&x, 0, &cf).unwrap();
    assert!(!up.degenerate);
    assert!(up.column[0].norm() < 1e-12);
    assert!((up.column[1].norm() - 1.0).abs() < 1e-12);
}

#[test]
fn update_single_user_is_degenerate() {
    let cf = cfg(3, vec![0.6], vec![2.0], 0.5);
    let prev = vec![c(0.1, 0.2), c(-0.3, 0.0), c(0.0, 0.5)];
    let x = PilotMatrix::new(CMatrix::from_columns(3, &[prev.clone()]).unwrap());
    let up = rayleigh_update(&x, 0, &cf).unwrap();
    assert!(up.degenerate);
    let scale = (2.0 / crate::numerics::norm_sqr(&prev)).sqrt();
    for (a, b) in up.column.iter().zip(&prev) {
        assert!((a - b * scale).norm() < 1e-12);
    }
}

#[test]
fn update_meets_power_exactly() {
    for seed in 0..50 {
        let (cf, x) = random_instance(seed);
        for k in 0..cf.k {
            let col = rayleigh_update(&x, k, &cf).unwrap().column;
            let e = crate::numerics::norm_sqr(&col);
            assert!((e - cf.powers[k]).abs() < 1e-12 * cf.powers[k].max(1.0), "seed {seed}");
        }
    }
}

#[test]
fn update_matches_min_eigenvector_oracle() {
    let mut checked = 0;
    for seed in 0..150 {
        let (cf, x) = random_instance(1000 + seed);
        if cf.n < 2 {
            continue;
        }
        for k in 0..cf.k {
            let up = rayleigh_update(&x, k, &cf).unwrap();
            if up.degenerate {
                continue;
            }
            let oracle = min_eigenvector_update(&x, k, &cf).unwrap();
            let overlap = dot(&up.column, &oracle).norm() / cf.powers[k];
            assert!(overlap > 1.0 - 1e-8, "seed {seed} user {k}: overlap {overlap}");
            checked += 1;
        }
    }
    assert!(checked >= 100);
}

#[test]
fn single_updates_never_increase_objective() {
    for seed in 0..100 {
        let (cf, mut x) = random_instance(2000 + seed);
        for k in 0..cf.k {
            let before = objective(&x, &cf).unwrap();
            let col = rayleigh_update(&x, k, &cf).unwrap().column;
            x.set_column(k, &col).unwrap();
            let after = objective(&x, &cf).unwrap();
            assert!(after <= before + 1e-12, "seed {seed}: {before} -> {after}");
        }
    }
}

#[test]
fn optimizer_requires_noise() {
    let cf = cfg(2, vec![1.0, 1.0], vec![1.0, 1.0], 0.0);
    let x = closed_form_nk(&cf).unwrap();
    assert!(matches!(optimize_pilots(&cf, &x, 1e-8, 10), Err(Error::Contract(_))));
}

#[test]
fn optimizer_rejects_infeasible_init() {
    let cf = cfg(2, vec![1.0, 1.0], vec![1.0, 1.0], 0.5);
    let x = PilotMatrix::new(CMatrix::identity(2).scale_real(2.0));
    assert!(optimize_pilots(&cf, &x, 1e-8, 10).is_err());
}

#[test]
fn optimizer_trace_shape() {
    let (cf, x) = random_instance(7);
    let (_, trace) = optimize_pilots(&cf, &x, 1e-10, 100).unwrap();
    assert_eq!(trace.updates(), trace.sweeps_completed * cf.k);
    assert!(trace.converged);
    assert!(trace.max_increase() <= 1e-12);
    let (_, capped) = optimize_pilots(&cf, &x, 0.0, 3).unwrap();
    assert_eq!(capped.sweeps_completed, 3);
}

#[test]
fn paper_scenario_converges_quickly() {
    let g = paper_gains();
    let cf = SystemConfig::uniform_power(128, 16, 1.0, 1.0, g).unwrap();
    let init = initial_pilots(InitScheme::DftReuse, &cf, 0);
    let (_, trace) = optimize_pilots(&cf, &init, DEFAULT_TOL, DEFAULT_MAX_SWEEPS).unwrap();
    assert!(trace.converged);
    assert!(trace.sweeps_to_within(1e-6) < 2.0, "{}", trace.sweeps_to_within(1e-6));
    assert!(trace.max_increase() <= 1e-12);
}

#[test]
fn combiner_examples() {
    let cf = cfg(1, vec![1.0], vec![1.0], 1.0);
    let x = PilotMatrix::new(CMatrix::identity(1));
    let u = combiner_u(&x, 0, &cf).unwrap();
    assert!((u[0] - c(0.5, 0.0)).norm() < 1e-15);

    let cf = cfg(3, vec![0.2, 0.5, 0.9], vec![1.0, 2.0, 0.5], 0.1);
    let x = closed_form_nk(&cf).unwrap();
    for k in 0..3 {
        let u = combiner_u(&x, k, &cf).unwrap();
        let s = cf.gains[k] / (cf.gains[k] * cf.powers[k] + cf.sigma2);
        for (a, b) in u.iter().zip(x.column(k)) {
            assert!((a - b * s).norm() < 1e-12);
        }
    }
}

/// Objective of the combiner problem: `|g x_kᴴ u|² / uᴴ A u`.
fn combiner_ratio(x: &PilotMatrix, k: usize, cf: &SystemConfig, u: &[Complex64]) -> f64 {
    let a = gram_matrix(x, cf).unwrap();
    (dot(&x.column(k), u) * cf.gains[k]).norm_sqr() / dot(u, &a.mul_vec(u).unwrap()).re
}

#[test]
fn combiner_is_locally_optimal() {
    let (cf, x) = random_instance(31);
    let mut s = RandomStream::new(31, 7);
    for k in 0..cf.k {
        let u = combiner_u(&x, k, &cf).unwrap();
        let best = combiner_ratio(&x, k, &cf, &u);
        for _ in 0..100 {
            let d = draw_cn(&mut s, cf.n, 1).column(0);
            let v: Vec<Complex64> = u.iter().zip(&d).map(|(a, b)| a + b * 1e-3).collect();
            assert!(combiner_ratio(&x, k, &cf, &v) <= best * (1.0 + 1e-14));
        }
    }
}

#[test]
fn receiver_scalar_examples() {
    for seed in 0..20 {
        let (cf, x) = random_instance(300 + seed);
        for k in 0..cf.k {
            let u = combiner_u(&x, k, &cf).unwrap();
            let ck = receiver_scalar(&x, &u, k, &cf).unwrap();
            assert!((ck - c(1.0, 0.0)).norm() < 1e-12);
        }
    }

    let cf = cfg(2, vec![1.0, 1.0], vec![1.0, 1.0], 1.0);
    let x = closed_form_nk(&cf).unwrap();
    let ck = receiver_scalar(&x, &x.column(0), 0, &cf).unwrap();
    assert!((ck - c(0.5, 0.0)).norm() < 1e-15);

    assert!(receiver_scalar(&x, &[c(0.0, 0.0); 2], 0, &cf).is_err());
}

#[test]
fn receiver_output_is_invariant_to_combiner_scaling() {
    let (cf, x) = random_instance(44);
    let d = draw_cn(&mut RandomStream::new(44, 9), cf.n, 1).column(0);
    let alpha = c(-0.7, 1.3);
    let du: Vec<Complex64> = d.iter().map(|z| z * alpha).collect();
    let c1 = receiver_scalar(&x, &d, 0, &cf).unwrap();
    let c2 = receiver_scalar(&x, &du, 0, &cf).unwrap();
    for (a, b) in d.iter().zip(&du) {
        assert!((a * c1.conj() - b * c2.conj()).norm() < 1e-12);
    }
}

#[test]
fn proposed_estimate_limits() {
    // near-noiseless orthogonal pilots recover the channel
    let cf = SystemConfig::uniform_power(16, 4, 1e-9, 1.0, vec![0.3, 0.6, 0.9, 0.5]).unwrap();
    let x = closed_form_nk(&cf).unwrap();
    let h = generate_channel(&cf, &mut RandomStream::new(2, 0));
    let y = received_pilot_signal(&h, &x, &CMatrix::zeros(16, 4)).unwrap();
    let est = proposed_estimate(&y, &x, &cf).unwrap();
    assert!((&est.0 - &h.0).frobenius_norm() < 1e-6);

    // scalar shrinkage g P/(g P + σ²) = 1/2
    let cf = SystemConfig::uniform_power(6, 1, 1.0, 1.0, vec![1.0]).unwrap();
    let x = PilotMatrix::new(CMatrix::identity(1));
    let h = generate_channel(&cf, &mut RandomStream::new(3, 0));
    let y = received_pilot_signal(&h, &x, &CMatrix::zeros(6, 1)).unwrap();
    let est = proposed_estimate(&y, &x, &cf).unwrap();
    assert!((&est.0 - &h.0.scale_real(0.5)).max_abs() < 1e-15);
}

#[test]
fn proposed_estimate_equals_direct_form() {
    let (cf, x) = random_instance(55);
    let h = generate_channel(&cf, &mut RandomStream::new(55, 0));
    let noise = generate_noise(&cf, &mut RandomStream::new(55, 1));
    let y = received_pilot_signal(&h, &x, &noise).unwrap();
    let est = proposed_estimate(&y, &x, &cf).unwrap();
    let a = gram_matrix(&x, &cf).unwrap();
    for k in 0..cf.k {
        let s = crate::numerics::solve_hermitian(&a, &CMatrix::from_columns(cf.n, &[x.column(k)]).unwrap()).unwrap();
        let direct = y.0.mul_vec(&s.column(0)).unwrap();
        for (e, d) in est.0.column(k).iter().zip(&direct) {
            assert!((e - d * cf.gains[k]).norm() < 1e-12 * (1.0 + d.norm()));
        }
    }
}

#[test]
fn proposed_per_user_mse_matches_analytic() {
    let cf = SystemConfig::uniform_power(32, 2, 0.5, 1.0, vec![0.9, 0.3, 0.6]).unwrap();
    let x = initial_pilots(InitScheme::DftReuse, &cf, 0);
    let report = analytic_wsmse(&x, &cf).unwrap();
    let trials = 10_000u64;
    let mut acc = vec![0.0; 3];
    let w = proposed_combining_matrix(&x, &cf).unwrap();
    for t in 0..trials {
        let h = generate_channel(&cf, &mut RandomStream::new(9, t));
        let n = generate_noise(&cf, &mut RandomStream::new(9, t + (1 << 32)));
        let y = received_pilot_signal(&h, &x, &n).unwrap();
        let e = &y.0 * &w;
        for k in 0..3 {
            let err: f64 = e.column(k).iter().zip(h.0.column(k)).map(|(a, b)| (a - b).norm_sqr()).sum();
            acc[k] += err / (32.0 * cf.gains[k]);
        }
    }
    for k in 0..3 {
        let emp = acc[k] / trials as f64;
        assert!((emp - report.per_user[k]).abs() < 0.02 * report.per_user[k], "user {k}: {emp} vs {}", report.per_user[k]);
    }
}

#[test]
fn analytic_examples() {
    let cf = cfg(1, vec![1.0], vec![1.0], 1.0);
    let x = PilotMatrix::new(CMatrix::identity(1));
    assert!((analytic_wsmse(&x, &cf).unwrap().normalized - 0.5).abs() < 1e-15);

    let cf = cfg(1, vec![1.0, 1.0], vec![1.0, 1.0], 1.0);
    let x = closed_form_n1(&cf).unwrap();
    assert!((analytic_wsmse(&x, &cf).unwrap().normalized - 2.0 / 3.0).abs() < 1e-15);

    let cf = cfg(1, vec![1.0], vec![1.0], 1e6);
    let x = PilotMatrix::new(CMatrix::identity(1));
    let w = analytic_wsmse(&x, &cf).unwrap().normalized;
    assert!((w - (1.0 - 1.0 / (1.0 + 1e6))).abs() < 1e-15);
}

#[test]
fn wsmse_identity_and_bounds() {
    for seed in 0..100 {
        let (cf, x) = random_instance(500 + seed);
        let r = analytic_wsmse(&x, &cf).unwrap();
        let via_trace = wsmse_from_objective(objective(&x, &cf).unwrap(), &cf);
        assert!((r.normalized - via_trace).abs() < 1e-12, "seed {seed}");
        assert!(r.per_user.iter().all(|&t| (-1e-12..=1.0 + 1e-12).contains(&t)));
        assert!((0.0..=1.0).contains(&r.normalized));
    }
}

#[test]
fn wsmse_decreases_with_gain_and_power() {
    let h = 1e-6;
    for seed in 0..30 {
        let (cf, x) = random_instance(700 + seed);
        let base = analytic_wsmse(&x, &cf).unwrap().normalized;
        for k in 0..cf.k {
            let mut g = cf.clone();
            g.gains[k] += h;
            assert!(analytic_wsmse(&x, &g).unwrap().normalized <= base + 1e-14);

            let mut xp = x.clone();
            let col: Vec<Complex64> = x.column(k).iter().map(|z| z * (1.0 + h)).collect();
            xp.set_column(k, &col).unwrap();
            let mut p = cf.clone();
            p.powers[k] *= (1.0 + h) * (1.0 + h);
            assert!(analytic_wsmse(&xp, &p).unwrap().normalized <= base + 1e-14);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn objective_is_unitarily_invariant(seed in 0u64..10_000) {
        let (cf, x) = random_instance(seed);
        let r = random_unitary(cf.n, seed);
        let rx = PilotMatrix::new(&r * x.matrix());
        let a = objective(&x, &cf).unwrap();
        let b = objective(&rx, &cf).unwrap();
        prop_assert!((a - b).abs() < 1e-10 * a.max(1.0));
    }

    #[test]
    fn per_user_phase_is_irrelevant(seed in 0u64..10_000, theta in 0.0f64..6.283) {
        let (cf, x) = random_instance(seed);
        let k = seed as usize % cf.k;
        let mut y = x.clone();
        let col: Vec<Complex64> = x.column(k).iter().map(|z| z * Complex64::from_polar(1.0, theta)).collect();
        y.set_column(k, &col).unwrap();
        let (a, b) = (objective(&x, &cf).unwrap(), objective(&y, &cf).unwrap());
        prop_assert!((a - b).abs() < 1e-12 * a.max(1.0));
        let (wa, wb) = (analytic_wsmse(&x, &cf).unwrap(), analytic_wsmse(&y, &cf).unwrap());
        prop_assert!((wa.normalized - wb.normalized).abs() < 1e-12);
    }

    #[test]
    fn optimizer_is_monotone(seed in 0u64..10_000) {
        let (cf, x) = random_instance(seed);
        let (xo, trace) = optimize_pilots(&cf, &x, 1e-10, 50).unwrap();
        prop_assert!(trace.max_increase() <= 1e-12);
        for k in 0..cf.k {
            prop_assert!((xo.column_energy(k) - cf.powers[k]).abs() < 1e-10);
        }
    }
}

#[test]
fn dft_columns_are_unitary() {
    let u = dft_matrix(5);
    assert!((&(&u.adjoint() * &u) - &CMatrix::identity(5)).max_abs() < 1e-14);
}
