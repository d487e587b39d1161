use proptest::prelude::*;
use specmom_core::analysis::regression_slope;
use specmom_core::market::{read_matrix_market_from, write_matrix_market};
use specmom_core::rates::*;
use specmom_core::{make_diag_descending, SparseMatrix};

fn symmetric_triplets() -> impl Strategy<Value = (usize, Vec<(usize, usize, f64)>)> {
    (2usize..12).prop_flat_map(|n| {
        let entry = (0..n, 0..n, -10.0f64..10.0);
        (Just(n), prop::collection::vec(entry, 0..40))
    })
}

fn build((n, t): &(usize, Vec<(usize, usize, f64)>)) -> SparseMatrix {
    let lower: Vec<_> = t.iter().map(|&(i, j, v)| (i.max(j), i.min(j), v)).collect();
    SparseMatrix::from_triplets(*n, &lower, true).unwrap()
}

proptest! {
    #[test]
    fn matvec_is_self_adjoint(spec in symmetric_triplets(), seed in any::<u64>()) {
        let a = build(&spec);
        let n = a.dim();
        let x: Vec<f64> = (0..n).map(|i| ((seed.wrapping_mul(i as u64 + 7) % 1000) as f64) / 500.0 - 1.0).collect();
        let y: Vec<f64> = (0..n).map(|i| ((seed.wrapping_add(31 * i as u64) % 997) as f64) / 400.0 - 1.2).collect();
        let ax = a.matvec(&x).unwrap();
        let ay = a.matvec(&y).unwrap();
        let l: f64 = ax.iter().zip(&y).map(|(p, q)| p * q).sum();
        let r: f64 = x.iter().zip(&ay).map(|(p, q)| p * q).sum();
        let scale: f64 = ax.iter().zip(&y).map(|(p, q)| (p * q).abs()).sum::<f64>().max(1e-300);
        prop_assert!((l - r).abs() <= 1e-12 * scale);
    }

    #[test]
    fn matrix_market_round_trip(spec in symmetric_triplets()) {
        let a = build(&spec);
        let mut buf = Vec::new();
        write_matrix_market(&a, &mut buf).unwrap();
        let b = read_matrix_market_from(buf.as_slice()).unwrap();
        prop_assert_eq!(b.dim(), a.dim());
        for i in 0..a.dim() {
            let mut e = vec![0.0; a.dim()];
            e[i] = 1.0;
            prop_assert_eq!(a.matvec(&e).unwrap(), b.matvec(&e).unwrap());
        }
    }

    #[test]
    fn fixed_point(r in 1e-6f64..0.999_999) {
        let back = r_of_rho(momentum_asymptotic_rate(r).unwrap()).unwrap();
        prop_assert!((back - r).abs() <= 1e-12);
    }

    #[test]
    fn contraction_above_threshold(rho in 0.486f64..1.0) {
        prop_assume!(rho > 0.486);
        prop_assert!(r_of_rho_derivative(rho).abs() < 1.0);
    }

    #[test]
    fn slope_ignores_positive_scaling(
        c in 1e-6f64..1e6,
        rate in -0.5f64..0.5,
        len in 2usize..50,
    ) {
        let s: Vec<(f64, f64)> = (0..len).map(|k| (k as f64, 10f64.powf(rate * k as f64 + 0.01 * ((k * k) % 7) as f64))).collect();
        let scaled: Vec<(f64, f64)> = s.iter().map(|&(k, v)| (k, c * v)).collect();
        let a = regression_slope(&s).unwrap();
        let b = regression_slope(&scaled).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
    }

    #[test]
    fn momentum_polynomial_is_scaled_chebyshev(n in 0usize..=25, t in -1.5f64..1.5, beta in 0.01f64..4.0) {
        let p = momentum_polynomial(n, 2.0 * beta.sqrt() * t, beta);
        let want = beta.powf(n as f64 / 2.0) * cheb_t_recurrence(n, t);
        prop_assert!((p - want).abs() <= 1e-10 * want.abs().max(beta.powf(n as f64 / 2.0)));
    }
}

#[test]
fn recurrence_agrees_with_closed_forms() {
    for n in 0..=30 {
        for t in [-3.0, -1.5, -1.0, -0.3, 0.0, 0.7, 1.0, 1.2, 3.0] {
            let a = cheb_t_recurrence(n, t);
            let b = cheb_t(n, t);
            assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0), "T_{n}({t}): {a} vs {b}");
        }
    }
}

#[test]
fn chebyshev_bounded_on_interval() {
    for n in 0..=100 {
        for k in 0..=400 {
            let t = -1.0 + k as f64 / 200.0;
            assert!(cheb_t(n, t).abs() <= 1.0 + 1e-12);
            assert!(cheb_t_recurrence(n, t).abs() <= 1.0 + 1e-12);
        }
    }
}

#[test]
fn log_form_matches_direct_evaluation() {
    for n in 1..=60 {
        for t in [1.0001, 1.3, 2.0, 7.5] {
            let direct = cheb_t(n, t).ln();
            let logged = log_cheb_t(n, t).unwrap();
            assert!((direct - logged).abs() <= 1e-12 * direct.abs().max(1.0));
        }
    }
}

#[test]
fn growth_sandwich() {
    let eps_grid = [1e-5, 3e-5, 1e-4, 1e-3, 1e-2, 0.1, 0.5];
    for n in 1..=200 {
        for &eps in &eps_grid {
            let (lo, hi) = cheb_growth_bounds(n, eps).unwrap();
            let mid = log_cheb_t(n, 1.0 + eps).unwrap();
            assert!(lo <= mid + 1e-12 && mid <= hi + 1e-12, "N={n} eps={eps}");
            if mid < 700.0 {
                let t = cheb_t(n, 1.0 + eps);
                assert!(lo.exp() <= t * (1.0 + 1e-12) && t <= hi.exp() * (1.0 + 1e-12));
            }
        }
    }
}

#[test]
fn rate_map_first_order_term() {
    for rho in [0.5, 0.9, 0.99] {
        let mut ratios = Vec::new();
        for eps in [1e-3, 1e-4] {
            let lhs = r_of_rho(rho + eps).unwrap_or(1.0) - r_of_rho(rho).unwrap();
            let err = (lhs - eps * r_of_rho_derivative(rho)).abs();
            ratios.push(err / (eps * eps));
        }
        // A bounded err / eps^2 confirms the first-order term.
        assert!(ratios.iter().all(|c| *c < 10.0), "rho {rho}: {ratios:?}");
    }
}

#[test]
fn log_rate_approaches_sqrt_two_eps() {
    let mut prev: Option<f64> = None;
    for eps in [1e-2, 1e-3, 1e-4] {
        let rate = momentum_asymptotic_rate(1.0 / (1.0 + eps)).unwrap();
        let residual = (-rate.ln() - (2.0 * eps).sqrt()).abs();
        assert!(residual <= eps, "eps {eps}: {residual}");
        if let Some(p) = prev {
            let shrink = p / residual;
            assert!(shrink >= 10.0, "eps {eps}: shrink {shrink}");
        }
        prev = Some(residual);
    }
}

#[test]
fn generator_spectrum_is_one_to_n() {
    for n in [2, 17, 1024] {
        let mut d = make_diag_descending(n).unwrap().diagonal().unwrap();
        d.sort_by(f64::total_cmp);
        let want: Vec<f64> = (1..=n).map(|k| k as f64).collect();
        assert_eq!(d, want);
    }
}

#[test]
fn growth_of_large_degree_is_finite() {
    let v = log_cheb_t(349, 1.0 + 2.0 * 6.10e-5).unwrap();
    let (lo, hi) = cheb_growth_bounds(349, 2.0 * 6.10e-5).unwrap();
    assert!(v.is_finite() && lo <= v && v <= hi);
}
