//! Signal, window, family and set generators named in experiment configs.

use std::path::Path;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::lattice::files::{read_signal, read_tileset};
use crate::lattice::{ball_tileset, LatticeSignal, MultiIndex, SupportBox, Tile, TileSet};

#[derive(Clone, Debug, PartialEq)]
pub enum SignalSpec {
    Delta,
    Gaussian(f64),
    RandomComplex,
    File(String),
}

/// Parses `delta`, `gaussian_sampled(σ)`, `random_complex`, or treats the text as a file path.
pub fn parse_signal_spec(text: &str) -> Result<SignalSpec> {
    let t = text.trim();
    match t {
        "delta" => return Ok(SignalSpec::Delta),
        "random_complex" => return Ok(SignalSpec::RandomComplex),
        _ => {}
    }
    if let Some(args) = call_args(t, "gaussian_sampled") {
        let [sigma] = parse_numbers::<1>(&args, t)?;
        if !(sigma > 0.0) {
            return Err(Error::InvalidParameter(format!("{t}: σ must be positive")));
        }
        return Ok(SignalSpec::Gaussian(sigma));
    }
    if t.is_empty() {
        return Err(Error::InvalidParameter("empty signal spec".into()));
    }
    Ok(SignalSpec::File(t.to_string()))
}

#[derive(Clone, Debug, PartialEq)]
pub enum SigmaSpec {
    Empty,
    Fiber,
    Box { half_width: usize, width: f64 },
    Ball { r: f64, resolution: usize },
    Random,
    File(String),
}

/// Parses `empty`, `fiber`, `box`, `box(h, width)`, `ball(r, resolution)`, `random`, or a file path.
pub fn parse_sigma_spec(text: &str) -> Result<SigmaSpec> {
    let t = text.trim();
    match t {
        "empty" => return Ok(SigmaSpec::Empty),
        "fiber" => return Ok(SigmaSpec::Fiber),
        "random" => return Ok(SigmaSpec::Random),
        "box" => return Ok(SigmaSpec::Box { half_width: 0, width: 0.5 }),
        _ => {}
    }
    if let Some(args) = call_args(t, "box") {
        let [h, width] = parse_numbers::<2>(&args, t)?;
        if h < 0.0 || h.fract() != 0.0 || !(0.0..=1.0).contains(&width) {
            return Err(Error::InvalidParameter(format!("{t}: need an integer h ≥ 0 and width in [0, 1]")));
        }
        return Ok(SigmaSpec::Box { half_width: h as usize, width });
    }
    if let Some(args) = call_args(t, "ball") {
        let [r, res] = parse_numbers::<2>(&args, t)?;
        if !(r > 0.0) || res < 1.0 || res.fract() != 0.0 {
            return Err(Error::InvalidParameter(format!("{t}: need r > 0 and an integer resolution ≥ 1")));
        }
        return Ok(SigmaSpec::Ball { r, resolution: res as usize });
    }
    if t.is_empty() {
        return Err(Error::InvalidParameter("empty sigma spec".into()));
    }
    Ok(SigmaSpec::File(t.to_string()))
}

fn call_args(text: &str, name: &str) -> Option<String> {
    let rest = text.strip_prefix(name)?.trim_start();
    let inner = rest.strip_prefix('(')?.strip_suffix(')')?;
    Some(inner.to_string())
}

fn parse_numbers<const K: usize>(args: &str, whole: &str) -> Result<[f64; K]> {
    let parts: Vec<&str> = args.split(',').map(str::trim).collect();
    if parts.len() != K {
        return Err(Error::InvalidParameter(format!("{whole}: expected {K} argument(s)")));
    }
    let mut out = [0.0; K];
    for (slot, p) in out.iter_mut().zip(&parts) {
        *slot = p
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("{whole}: {p:?} is not a number")))?;
    }
    Ok(out)
}

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

pub fn random_signal<R: Rng + ?Sized>(support: SupportBox, rng: &mut R) -> LatticeSignal {
    LatticeSignal::from_fn(support, |_| complex_normal(rng))
}

/// Builds a signal on the box of half-width `half_width`; files must fit inside it.
pub fn make_signal<R: Rng + ?Sized>(spec: &SignalSpec, dim: usize, half_width: usize, rng: &mut R) -> Result<LatticeSignal> {
    let support = SupportBox::new(dim, half_width);
    match spec {
        SignalSpec::Delta => Ok(LatticeSignal::delta(support, &MultiIndex::zero(dim))),
        SignalSpec::Gaussian(sigma) => Ok(LatticeSignal::from_fn(support, |k| {
            let r2: i64 = k.iter().map(|c| c * c).sum();
            Complex64::new((-(r2 as f64) / (2.0 * sigma * sigma)).exp(), 0.0)
        })),
        SignalSpec::RandomComplex => Ok(random_signal(support, rng)),
        SignalSpec::File(path) => {
            let s = read_signal(Path::new(path))?;
            if s.dim() != dim {
                return Err(Error::InvalidParameter(format!(
                    "{path}: dimension {} does not match the config dimension {dim}",
                    s.dim()
                )));
            }
            s.embed(half_width).map_err(|_| {
                Error::InvalidParameter(format!("{path}: support exceeds half-width {half_width}"))
            })
        }
    }
}

/// Orthonormal family of `size` signals on `support`.
///
/// `delta` gives impulses ordered by distance from the origin; other specs seed
/// the first member and fill the rest with random vectors before Gram–Schmidt.
pub fn make_family<R: Rng + ?Sized>(
    spec: &SignalSpec,
    support: SupportBox,
    size: usize,
    rng: &mut R,
) -> Result<Vec<LatticeSignal>> {
    if size > support.len() {
        return Err(Error::InvalidParameter(format!(
            "family of {size} does not fit a box of {} points",
            support.len()
        )));
    }
    if *spec == SignalSpec::Delta {
        let mut pts: Vec<MultiIndex> = support.iter().collect();
        pts.sort_by_key(|m| (m.norm_sq(), m.clone()));
        return Ok(pts
            .into_iter()
            .take(size)
            .map(|m| LatticeSignal::delta(support, &m))
            .collect());
    }
    let mut raw = Vec::with_capacity(size);
    if size > 0 && *spec != SignalSpec::RandomComplex {
        raw.push(make_signal(spec, support.dim(), support.half_width(), rng)?);
    }
    while raw.len() < size {
        raw.push(random_signal(support, rng));
    }
    gram_schmidt(raw)
}

/// Modified Gram–Schmidt with one re-orthogonalization pass.
pub fn gram_schmidt(vectors: Vec<LatticeSignal>) -> Result<Vec<LatticeSignal>> {
    let mut out: Vec<LatticeSignal> = Vec::with_capacity(vectors.len());
    for mut v in vectors {
        for _ in 0..2 {
            for q in &out {
                let c = v.inner(q);
                v = v.sub(&q.scaled(c));
            }
        }
        let n = v.norm_l2();
        if n < 1e-8 {
            return Err(Error::InvalidParameter("family is linearly dependent".into()));
        }
        out.push(v.scaled(Complex64::new(1.0 / n, 0.0)));
    }
    Ok(out)
}

/// Which random set family a check needs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RandomSet {
    /// A union of at most three tiles with measure below 0.9.
    Small,
    /// `Z × T` with one to three lattice points.
    Product,
}

pub fn random_tileset<R: Rng + ?Sized>(kind: RandomSet, lattice: SupportBox, rng: &mut R) -> Result<TileSet> {
    let n = lattice.dim();
    let pick = |rng: &mut R| lattice.point(rng.random_range(0..lattice.len()));
    let count = rng.random_range(1..=3usize);
    match kind {
        RandomSet::Small => {
            let scale = (0.9 / count as f64).powf(1.0 / n as f64);
            let tiles = (0..count)
                .map(|_| {
                    let m = pick(rng);
                    let lo: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
                    let hi = lo
                        .iter()
                        .map(|a| a + scale * rng.random_range(0.05..1.0))
                        .collect();
                    Tile::new(m, lo, hi)
                })
                .collect();
            TileSet::new(tiles)
        }
        RandomSet::Product => {
            let z: Vec<MultiIndex> = (0..count).map(|_| pick(rng)).collect();
            let lo: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            let hi: Vec<f64> = lo.iter().map(|a| a + rng.random_range(0.05..1.0)).collect();
            TileSet::product(z, &lo, &hi)
        }
    }
}

/// Builds Σ from its spec; `random` draws a set of the requested kind inside `lattice`.
pub fn make_sigma<R: Rng + ?Sized>(spec: &SigmaSpec, lattice: SupportBox, kind: RandomSet, rng: &mut R) -> Result<TileSet> {
    let n = lattice.dim();
    match spec {
        SigmaSpec::Empty => Ok(TileSet::empty()),
        SigmaSpec::Fiber => TileSet::full_fibers([MultiIndex::zero(n)]),
        SigmaSpec::Box { half_width, width } => {
            TileSet::product(SupportBox::new(n, *half_width).iter(), &vec![0.0; n], &vec![*width; n])
        }
        SigmaSpec::Ball { r, resolution } => ball_tileset(*r, n, *resolution),
        SigmaSpec::Random => random_tileset(kind, lattice, rng),
        SigmaSpec::File(path) => {
            let s = read_tileset(Path::new(path))?;
            if let Some(d) = s.dim() {
                if d != n {
                    return Err(Error::InvalidParameter(format!(
                        "{path}: dimension {d} does not match the config dimension {n}"
                    )));
                }
            }
            Ok(s)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn spec_parsing() {
        assert_eq!(parse_signal_spec("delta").unwrap(), SignalSpec::Delta);
        assert_eq!(parse_signal_spec("gaussian_sampled(1.5)").unwrap(), SignalSpec::Gaussian(1.5));
        assert!(parse_signal_spec("gaussian_sampled(-1)").is_err());
        assert_eq!(parse_sigma_spec("ball(1.5, 8)").unwrap(), SigmaSpec::Ball { r: 1.5, resolution: 8 });
        assert_eq!(parse_sigma_spec("box(1,0.25)").unwrap(), SigmaSpec::Box { half_width: 1, width: 0.25 });
        assert_eq!(parse_sigma_spec("x.json").unwrap(), SigmaSpec::File("x.json".into()));
    }

    #[test]
    fn random_families_are_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let fam = make_family(&SignalSpec::RandomComplex, SupportBox::new(2, 1), 5, &mut rng).unwrap();
        for (i, a) in fam.iter().enumerate() {
            for (j, b) in fam.iter().enumerate() {
                let t = if i == j { 1.0 } else { 0.0 };
                assert!((a.inner(b) - Complex64::new(t, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn small_random_sets_stay_below_unit_measure() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let s = random_tileset(RandomSet::Small, SupportBox::new(2, 3), &mut rng).unwrap();
            assert!(crate::lattice::measure(&s) < 0.9 + 1e-12);
            let p = random_tileset(RandomSet::Product, SupportBox::new(1, 3), &mut rng).unwrap();
            assert!(p.is_product_form());
        }
    }
}
