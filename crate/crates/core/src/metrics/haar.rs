//! Averages over pure single-qubit inputs under the uniform Bloch-sphere
//! measure `d(cos theta) d(phi) / 4 pi`.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::states::BlochParam;
use crate::teleport::AffineFidelity;

/// How an average over inputs is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AverageMethod {
    /// Exact moments; only for [`Integrand::Affine`].
    ClosedForm,
    /// Gauss-Legendre in `cos theta` times the trapezoid rule in `phi`.
    Quadrature { n_theta: usize, n_phi: usize },
    /// Seeded sampling; reproducible for a given `(samples, seed)`.
    MonteCarlo { samples: u64, seed: u64 },
}

impl AverageMethod {
    pub const MIN_NODES: usize = 8;
    pub const DEFAULT_NODES: usize = 64;

    pub fn quadrature(n: usize) -> Self {
        AverageMethod::Quadrature {
            n_theta: n,
            n_phi: n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            AverageMethod::ClosedForm => Ok(()),
            AverageMethod::Quadrature { n_theta, n_phi } => {
                for (name, n) in [("n_theta", n_theta), ("n_phi", n_phi)] {
                    if n < Self::MIN_NODES {
                        return Err(Error::param(name, n as f64, "quadrature node count >= 8"));
                    }
                }
                Ok(())
            }
            AverageMethod::MonteCarlo { samples, .. } => {
                if samples == 0 {
                    return Err(Error::param("samples", 0.0, "samples >= 1"));
                }
                Ok(())
            }
        }
    }
}

impl Default for AverageMethod {
    fn default() -> Self {
        AverageMethod::quadrature(Self::DEFAULT_NODES)
    }
}

/// A bounded function on the sphere.
#[derive(Clone, Copy)]
pub enum Integrand<'a> {
    Affine(AffineFidelity),
    Function(&'a (dyn Fn(BlochParam) -> f64 + Sync)),
}

impl Integrand<'_> {
    fn eval(&self, b: BlochParam) -> f64 {
        match self {
            Integrand::Affine(form) => form.eval(b),
            Integrand::Function(f) => f(b),
        }
    }
}

/// First two moments of an integrand, plus sampling errors for Monte Carlo.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub second: f64,
    central: f64,
    /// Standard error of `mean`; zero for deterministic methods.
    pub mean_std_error: f64,
    /// Standard error of [`Moments::deviation`] (delta method).
    pub deviation_std_error: f64,
}

impl Moments {
    fn exact(mean: f64, variance: f64) -> Self {
        let central = variance.max(0.0);
        Self {
            mean,
            second: central + mean * mean,
            central,
            mean_std_error: 0.0,
            deviation_std_error: 0.0,
        }
    }

    pub fn variance(&self) -> f64 {
        self.central
    }

    pub fn deviation(&self) -> f64 {
        self.variance().sqrt()
    }
}

pub fn haar_moments(f: Integrand<'_>, m: AverageMethod) -> Result<Moments> {
    m.validate()?;
    match m {
        AverageMethod::ClosedForm => match f {
            Integrand::Affine(form) => Ok(affine_moments(&form)),
            Integrand::Function(_) => Err(Error::NonAffineIntegrand),
        },
        AverageMethod::Quadrature { n_theta, n_phi } => Ok(quadrature_moments(&f, n_theta, n_phi)),
        AverageMethod::MonteCarlo { samples, seed } => Ok(monte_carlo_moments(&f, samples, seed)),
    }
}

pub fn haar_mean(f: Integrand<'_>, m: AverageMethod) -> Result<f64> {
    Ok(haar_moments(f, m)?.mean)
}

pub fn haar_second_moment(f: Integrand<'_>, m: AverageMethod) -> Result<f64> {
    Ok(haar_moments(f, m)?.second)
}

// E[sin^2] = 2/3, E[sin^4] = 8/15, E[cos 2phi] = 0, E[cos^2 2phi] = 1/2
fn affine_moments(form: &AffineFidelity) -> Moments {
    let (c, s, w) = (form.constant, form.sin2, form.cos2phi_sin2);
    let mean = c + 2.0 / 3.0 * s;
    // Var = (8/15 - 4/9) s^2 + (8/15)(1/2) w^2
    let variance = 4.0 / 45.0 * s * s + 4.0 / 15.0 * w * w;
    Moments::exact(mean, variance)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on `P_n` from the Chebyshev-like initial guesses.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let dp = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, dp)
}

fn quadrature_moments(f: &Integrand<'_>, n_theta: usize, n_phi: usize) -> Moments {
    let gl = GaussLegendre::new(n_theta);
    let shift = f.eval(BlochParam::wrapped(0.0, 0.0));
    let (mut m1, mut m2) = (0.0, 0.0);
    for (&x, &w) in gl.nodes.iter().zip(&gl.weights) {
        let theta = x.clamp(-1.0, 1.0).acos();
        let (mut r1, mut r2) = (0.0, 0.0);
        for j in 0..n_phi {
            let phi = TAU * j as f64 / n_phi as f64;
            let v = f.eval(BlochParam::wrapped(theta, phi)) - shift;
            r1 += v;
            r2 += v * v;
        }
        m1 += 0.5 * w * r1 / n_phi as f64;
        m2 += 0.5 * w * r2 / n_phi as f64;
    }
    Moments::exact(m1 + shift, m2 - m1 * m1)
}

const MC_CHUNK: u64 = 1 << 14;
// two u64 draws per sample = four ChaCha words
const WORDS_PER_SAMPLE: u128 = 4;

/// Haar-random input for sample `index` of the stream `seed`. Independent of
/// how samples are partitioned across workers.
pub fn haar_sample(seed: u64, index: u64) -> BlochParam {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_word_pos(index as u128 * WORDS_PER_SAMPLE);
    draw(&mut rng)
}

fn draw(rng: &mut ChaCha8Rng) -> BlochParam {
    let u: f64 = rng.gen();
    let v: f64 = rng.gen();
    let cos_theta = 2.0 * u - 1.0;
    BlochParam::wrapped(cos_theta.acos(), TAU * v)
}

#[derive(Default, Clone, Copy)]
struct PowerSums([f64; 4]);

impl PowerSums {
    fn push(&mut self, v: f64) {
        let v2 = v * v;
        self.0[0] += v;
        self.0[1] += v2;
        self.0[2] += v2 * v;
        self.0[3] += v2 * v2;
    }

    fn merge(mut self, other: PowerSums) -> PowerSums {
        for (a, b) in self.0.iter_mut().zip(other.0) {
            *a += b;
        }
        self
    }
}

fn monte_carlo_moments(f: &Integrand<'_>, samples: u64, seed: u64) -> Moments {
    let chunks = samples.div_ceil(MC_CHUNK);
    // Shifting by a typical value keeps the central moments from cancelling.
    let shift = f.eval(BlochParam::wrapped(0.0, 0.0));
    // Chunk sums are collected in index order, then reduced serially.
    let partial: Vec<PowerSums> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * MC_CHUNK;
            let end = (start + MC_CHUNK).min(samples);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_word_pos(start as u128 * WORDS_PER_SAMPLE);
            let mut sums = PowerSums::default();
            for _ in start..end {
                sums.push(f.eval(draw(&mut rng)) - shift);
            }
            sums
        })
        .collect();
    let total = partial
        .into_iter()
        .fold(PowerSums::default(), PowerSums::merge);
    let n = samples as f64;
    let [s1, s2, s3, s4] = total.0.map(|s| s / n);
    let var = (s2 - s1 * s1).max(0.0);
    let mu4 = (s4 - 4.0 * s1 * s3 + 6.0 * s1 * s1 * s2 - 3.0 * s1.powi(4)).max(0.0);
    let var_se = ((mu4 - var * var).max(0.0) / n).sqrt();
    let dev = var.sqrt();
    let mean = s1 + shift;
    Moments {
        mean,
        second: var + mean * mean,
        central: var,
        mean_std_error: (var / n).sqrt(),
        deviation_std_error: if dev > 0.0 { var_se / (2.0 * dev) } else { 0.0 },
    }
}
