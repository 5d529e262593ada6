mod common;

use approx::assert_relative_eq;
use common::*;
use proptest::prelude::*;
use ztstft::fourier::TrigPoly;
use ztstft::lattice::measure;
use ztstft::operators::project_sigma;
use ztstft::stft::{stft, StftPlan};
use ztstft::uncertainty::ball_measure;
use ztstft::{LatticeSignal, SupportBox, Tile, TileSet};

fn signal(dim: usize, half_width: usize) -> impl Strategy<Value = LatticeSignal> {
    let len = (2 * half_width + 1).pow(dim as u32);
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len).prop_map(move |v| {
        LatticeSignal::from_values(SupportBox::new(dim, half_width), v.into_iter().map(|(a, b)| c(a, b)).collect())
            .unwrap()
    })
}

fn tile(dim: usize, reach: i64) -> impl Strategy<Value = Tile> {
    (
        prop::collection::vec(-reach..=reach, dim),
        prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), dim),
    )
        .prop_map(|(m, boxes)| {
            let lo: Vec<f64> = boxes.iter().map(|b| b.0).collect();
            let hi: Vec<f64> = boxes.iter().map(|b| b.0 + b.1).collect();
            fiber_tile(&m, &lo, &hi)
        })
}

fn tiles(dim: usize, reach: i64) -> impl Strategy<Value = TileSet> {
    prop::collection::vec(tile(dim, reach), 0..4).prop_map(set)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn plancherel_holds(f in signal(2, 2), g in signal(2, 1)) {
        let v = stft(&f, &g, &StftPlan::new(2, 2, 1)).unwrap();
        assert_relative_eq!(v.norm_sq(), f.norm_sq() * g.norm_sq(), max_relative = 1e-12);
    }

    #[test]
    fn sigma_projection_is_idempotent(f in signal(1, 3), g in signal(1, 1), sigma in tiles(1, 4)) {
        let v = stft(&f, &g, &StftPlan::new(1, 3, 1)).unwrap();
        let once = project_sigma(&v, &sigma).unwrap();
        let twice = project_sigma(&once, &sigma).unwrap();
        prop_assert_eq!(twice.values(), once.values());
        prop_assert!(once.norm_sq() <= v.norm_sq());
    }

    #[test]
    fn splitting_a_tile_keeps_the_measure(t in tile(2, 3), axis in 0usize..2, frac in 0.0f64..1.0) {
        let cut = t.lo[axis] + frac * (t.hi[axis] - t.lo[axis]);
        let mut left = t.clone();
        let mut right = t.clone();
        left.hi[axis] = cut;
        right.lo[axis] = cut;
        let whole = measure(&set(vec![t]));
        assert_relative_eq!(measure(&set(vec![left, right])), whole, epsilon = 1e-12);
    }

    #[test]
    fn ball_measure_is_monotone(r in 0.0f64..4.0, dr in 0.0f64..1.0, dim in 1usize..=3) {
        prop_assert!(ball_measure(r + dr, dim, 32) >= ball_measure(r, dim, 32) - 1e-9);
    }

    #[test]
    fn full_torus_integral_is_the_mean(f in signal(2, 2), shift in (-1.0f64..1.0, -1.0f64..1.0)) {
        let p = TrigPoly::from_lattice(&f);
        let lo = [shift.0, shift.1];
        let hi = [shift.0 + 1.0, shift.1 + 1.0];
        let integral = p.integrate_box(&lo, &hi);
        prop_assert!((integral - f.get(&[0, 0])).norm() < 1e-13);
        prop_assert!((p.mean() - f.get(&[0, 0])).norm() < 1e-15);
    }
}
