mod common;

use common::*;
use rand::Rng;
use ztstft::fourier::{
    character_integral, fourier_lattice_to_torus, fourier_lattice_to_torus_direct, fourier_torus_to_lattice,
    fourier_torus_to_lattice_box, plancherel_lattice, TrigPoly,
};
use ztstft::{Error, SupportBox, TorusGrid};

#[test]
fn fft_matches_term_by_term_sum_over_200_trials() {
    let mut r = rng(100);
    for trial in 0..200 {
        let n = 1 + trial % 3;
        let hw = r.random_range(0..=if n == 3 { 2 } else { 4 });
        let points = 2 * hw + 1 + r.random_range(0..6);
        let f = random_signal(&mut r, n, hw);
        let grid = TorusGrid::new(n, points);
        let fast = fourier_lattice_to_torus(&f, grid).unwrap();
        let direct = fourier_lattice_to_torus_direct(&f, grid).unwrap();
        let scale = f.norm_l1().max(1.0);
        for j in 0..grid.len() {
            let oracle = naive_fourier(&f, &grid.node(j));
            assert!((fast.values[j] - oracle).norm() <= 1e-12 * scale, "trial {trial} node {j}");
            assert!((direct.values[j] - oracle).norm() <= 1e-12 * scale, "trial {trial} node {j}");
        }
    }
}

#[test]
fn delta_transforms_to_constant_one() {
    let grid = TorusGrid::new(2, 8);
    let h = fourier_lattice_to_torus(&delta(2, &[0, 0]), grid).unwrap();
    assert!(h.values.iter().all(|v| (v - c(1.0, 0.0)).norm() < 1e-15));
}

#[test]
fn shifted_delta_gives_a_character() {
    let grid = TorusGrid::new(1, 16);
    let h = fourier_lattice_to_torus(&delta(1, &[3]), grid).unwrap();
    for j in 0..grid.len() {
        let w = j as f64 / 16.0;
        let expect = c((2.0 * std::f64::consts::PI * 3.0 * w).cos(), -(2.0 * std::f64::consts::PI * 3.0 * w).sin());
        assert!((h.values[j] - expect).norm() < 1e-14);
    }
}

#[test]
fn torus_to_lattice_recovers_coefficients() {
    let mut r = rng(101);
    for n in 1..=2 {
        let f = random_signal(&mut r, n, 3);
        let grid = TorusGrid::new(n, 7);
        let h = fourier_lattice_to_torus(&f, grid).unwrap();
        let back = fourier_torus_to_lattice_box(&h, SupportBox::new(n, 3)).unwrap();
        for (k, v) in f.iter() {
            assert!((back.get(&k) - v).norm() < 1e-13);
            assert!((fourier_torus_to_lattice(&h, &k) - v).norm() < 1e-13);
        }
    }
}

#[test]
fn plancherel_on_the_lattice() {
    let mut r = rng(102);
    for n in 1..=2 {
        let f = random_signal(&mut r, n, 2);
        let (torus, lattice) = plancherel_lattice(&f, TorusGrid::new(n, 9)).unwrap();
        assert_close(torus, lattice, 1e-12 * lattice, "energy");
        assert_close(lattice, f.norm_sq(), 1e-12 * lattice, "lattice norm");
    }
    assert_eq!(plancherel_lattice(&delta(1, &[0]), TorusGrid::new(1, 4)).unwrap(), (1.0, 1.0));
}

#[test]
fn under_resolved_grids_are_rejected() {
    let f = ones(1, 3);
    assert!(matches!(
        fourier_lattice_to_torus(&f, TorusGrid::new(1, 6)),
        Err(Error::UnderResolved { points: 6, required: 7 })
    ));
    assert!(matches!(
        plancherel_lattice(&f, TorusGrid::new(1, 12)),
        Err(Error::UnderResolved { .. })
    ));
}

#[test]
fn character_integrals_match_closed_form() {
    let mut r = rng(103);
    for _ in 0..100 {
        let q = r.random_range(-9..=9);
        let a = r.random_range(-1.0..1.0);
        let b = a + r.random_range(0.0..1.0);
        assert!((character_integral(q, a, b) - exp_integral(q, a, b)).norm() < 1e-14);
    }
}

#[test]
fn trig_poly_box_integrals_match_coefficientwise_oracle() {
    let mut r = rng(104);
    for _ in 0..20 {
        let f = random_signal(&mut r, 2, 2);
        let p = TrigPoly::from_lattice(&f);
        let lo = [r.random_range(-0.5..0.5), r.random_range(-0.5..0.5)];
        let hi = [lo[0] + r.random_range(0.0..1.0), lo[1] + r.random_range(0.0..1.0)];
        // p(w) = Σ_k f(k) e^{-2πi k·w}
        let oracle: num_complex::Complex64 = f
            .iter()
            .map(|(k, v)| v * exp_integral(-k[0], lo[0], hi[0]) * exp_integral(-k[1], lo[1], hi[1]))
            .sum();
        assert!((p.integrate_box(&lo, &hi) - oracle).norm() < 1e-13);
        let w = [r.random::<f64>(), r.random::<f64>()];
        assert!((p.evaluate(&w) - naive_fourier(&f, &w)).norm() < 1e-13);
    }
}

#[test]
fn trig_poly_from_samples_round_trips() {
    let mut r = rng(105);
    let f = random_signal(&mut r, 1, 3);
    let grid = TorusGrid::new(1, 8);
    let samples = fourier_lattice_to_torus(&f, grid).unwrap();
    let p = TrigPoly::from_samples(&samples.values, grid, 3).unwrap();
    assert!((p.mean() - f.get(&[0])).norm() < 1e-14);
    let fine = TorusGrid::new(1, 64);
    for (j, v) in p.sample_on(fine).iter().enumerate() {
        assert!((v - naive_fourier(&f, &fine.node(j))).norm() < 1e-13);
    }
    assert!(TrigPoly::from_samples(&samples.values, grid, 4).is_err());
}
