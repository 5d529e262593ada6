//! Independent oracles and generators shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ztstft::{LatticeSignal, MultiIndex, SupportBox, Tile, TileSet};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform entries in the unit square; independent of the library generators.
pub fn random_signal(rng: &mut ChaCha8Rng, dim: usize, half_width: usize) -> LatticeSignal {
    LatticeSignal::from_fn(SupportBox::new(dim, half_width), |_| {
        c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

pub fn delta(dim: usize, at: &[i64]) -> LatticeSignal {
    let hw = at.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0) as usize;
    LatticeSignal::delta(SupportBox::new(dim, hw), &MultiIndex::new(at.to_vec()))
}

pub fn ones(dim: usize, half_width: usize) -> LatticeSignal {
    LatticeSignal::from_fn(SupportBox::new(dim, half_width), |_| c(1.0, 0.0))
}

fn cis(theta: f64) -> Complex64 {
    c(theta.cos(), theta.sin())
}

/// `Σ_k f(k) conj(g(k - m)) e^{-2πi w·k}` term by term.
pub fn naive_stft(f: &LatticeSignal, g: &LatticeSignal, m: &[i64], w: &[f64]) -> Complex64 {
    let mut acc = c(0.0, 0.0);
    for (k, fk) in f.iter() {
        let d: Vec<i64> = k.iter().zip(m).map(|(a, b)| a - b).collect();
        let gk = g.get(&d);
        let phase: f64 = k.iter().zip(w).map(|(a, b)| *a as f64 * b).sum();
        acc += fk * gk.conj() * cis(-2.0 * PI * phase);
    }
    acc
}

/// `Σ_k f(k) e^{-2πi w·k}` term by term.
pub fn naive_fourier(f: &LatticeSignal, w: &[f64]) -> Complex64 {
    f.iter()
        .map(|(k, v)| {
            let phase: f64 = k.iter().zip(w).map(|(a, b)| *a as f64 * b).sum();
            v * cis(-2.0 * PI * phase)
        })
        .sum()
}

/// `(e^{2πiqb} - e^{2πiqa}) / (2πiq)`, or `b - a` when `q = 0`.
pub fn exp_integral(q: i64, a: f64, b: f64) -> Complex64 {
    if q == 0 {
        return c(b - a, 0.0);
    }
    let t = 2.0 * PI * q as f64;
    (cis(t * b) - cis(t * a)) / c(0.0, t)
}

pub fn lattice_points(dim: usize, half_width: usize) -> Vec<Vec<i64>> {
    let b = SupportBox::new(dim, half_width);
    (0..b.len()).map(|i| b.coords_of(i)).collect()
}

pub fn fiber_tile(m: &[i64], lo: &[f64], hi: &[f64]) -> Tile {
    Tile::new(MultiIndex::new(m.to_vec()), lo.to_vec(), hi.to_vec())
}

pub fn set(tiles: Vec<Tile>) -> TileSet {
    TileSet::new(tiles).expect("valid tiles")
}

/// A union of up to three random tiles inside the lattice box, of measure below 0.9.
pub fn random_small_set(rng: &mut ChaCha8Rng, dim: usize, reach: usize) -> TileSet {
    let count = rng.random_range(1..=3usize);
    let scale = (0.9 / count as f64).powf(1.0 / dim as f64);
    let r = reach as i64;
    let tiles = (0..count)
        .map(|_| {
            let m: Vec<i64> = (0..dim).map(|_| rng.random_range(-r..=r)).collect();
            let lo: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
            let hi: Vec<f64> = lo.iter().map(|a| a + scale * rng.random_range(0.05..1.0)).collect();
            fiber_tile(&m, &lo, &hi)
        })
        .collect();
    set(tiles)
}

/// Maximum eigenvalue of a Hermitian matrix given row-major.
pub fn hermitian_max_eigenvalue(n: usize, entries: Vec<Complex64>) -> f64 {
    let m = nalgebra::DMatrix::from_row_slice(n, n, &entries);
    nalgebra::SymmetricEigen::new(m)
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn assert_close(a: f64, b: f64, tol: f64, what: &str) {
    assert!((a - b).abs() <= tol, "{what}: {a} vs {b} (|Δ| = {:e} > {tol:e})", (a - b).abs());
}
