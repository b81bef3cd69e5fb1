//! Average fidelity and fidelity deviation in closed form, written the way
//! they are usually derived: in terms of `s = sqrt(alpha (1 - alpha))`.
//!
//! Flip-noise expressions assume the second flip probability is 1.

use crate::states::SchmidtParam;

const SQRT_5: f64 = 2.236_067_977_499_79;

fn root(radicand: f64) -> f64 {
    radicand.max(0.0).sqrt()
}

pub fn noiseless_fidelity(a: SchmidtParam) -> f64 {
    2.0 / 3.0 + 2.0 / 3.0 * a.overlap()
}

pub fn noiseless_deviation(a: SchmidtParam) -> f64 {
    let (al, s) = (a.alpha(), a.overlap());
    root(1.0 + 4.0 * (1.0 - al) * al - 4.0 * s) / (3.0 * SQRT_5)
}

/// `2/3 + (2^n / 3) (alpha (1-alpha))^{n/2}`.
pub fn chain_fidelity(n: u32, a: SchmidtParam) -> f64 {
    let x = a.alpha() * (1.0 - a.alpha());
    let n = n as f64;
    2.0 / 3.0 + 2f64.powf(n) / 3.0 * x.powf(n / 2.0)
}

/// Chain deviation with radicand `1 + 4^n x^n - 2^{n+1} x^{n/2}`, a perfect
/// square equal to `(1 - 2^n x^{n/2})^2`; hence `D_n = (1 - F_n)/sqrt 5`.
pub fn chain_deviation(n: u32, a: SchmidtParam) -> f64 {
    let x = a.alpha() * (1.0 - a.alpha());
    let n = n as f64;
    let radicand = 1.0 + 4f64.powf(n) * x.powf(n) - 2f64.powf(n + 1.0) * x.powf(n / 2.0);
    root(radicand) / (3.0 * SQRT_5)
}

pub fn bit_flip_fidelity(a: SchmidtParam, p: f64) -> f64 {
    let s = a.overlap();
    (1.0 - p + 2.0 * p * (1.0 + s)) / 3.0
}

pub fn bit_flip_deviation(a: SchmidtParam, p: f64) -> f64 {
    let (al, s) = (a.alpha(), a.overlap());
    let x = (1.0 - al) * al;
    let radicand = 1.0 + 4.0 * x - 4.0 * s + 4.0 * (1.0 - p).powi(2) * (1.0 + 4.0 * x - 2.0 * s)
        - 4.0 * (1.0 - p) * (1.0 + 2.0 * x - 3.0 * s);
    root(radicand) / (3.0 * SQRT_5)
}

pub fn phase_flip_fidelity(a: SchmidtParam, p: f64) -> f64 {
    2.0 / 3.0 * (1.0 + (2.0 * p - 1.0) * a.overlap())
}

pub fn phase_flip_deviation(a: SchmidtParam, p: f64) -> f64 {
    let (al, s) = (a.alpha(), a.overlap());
    let c = (2.0 * p - 1.0).powi(2);
    let radicand = 1.0 + 4.0 * c * al - 4.0 * c * al * al - 4.0 * s + 8.0 * (1.0 - p) * s;
    root(radicand) / (3.0 * SQRT_5)
}

pub fn global_dep_fidelity(a: SchmidtParam, p: f64) -> f64 {
    2.0 * p / 3.0 * (1.0 + a.overlap()) + (1.0 - p) / 2.0
}

pub fn global_dep_deviation(a: SchmidtParam, p: f64) -> f64 {
    let (al, s) = (a.alpha(), a.overlap());
    p * root(1.0 - 4.0 * s + 4.0 * al * (1.0 - al)) / (3.0 * SQRT_5)
}

/// Published average fidelity for combined local and global depolarizing
/// noise. Disagrees with the simulated protocol whenever `p1 + p2 > 0`; kept
/// for comparison only.
pub fn combined_fidelity_published(a: SchmidtParam, p: f64, p1: f64, p2: f64) -> f64 {
    let s = a.overlap();
    2.0 / 3.0 * (1.0 + (1.0 - p) * s) - (p1 + p2) * (1.0 + 4.0 * s) / 8.0 - p / 6.0
}

/// Published deviation for combined depolarizing noise, verbatim. `None`
/// when the printed radicand goes negative.
pub fn combined_deviation_published(a: SchmidtParam, p: f64, p1: f64, p2: f64) -> Option<f64> {
    let (al, s) = (a.alpha(), a.overlap());
    let x = al * (1.0 - al);
    let sa = al.sqrt();
    let mixed = -7.0 * sa + 7.0 * al + 12.0 * (1.0 - al).sqrt();
    let radicand = (64.0 - 96.0 * p2 + 51.0 * p2 * p2)
        + 4.0 * (64.0 + 3.0 * p2 * (7.0 * p2 - 32.0)) * x
        - (256.0 - 384.0 * p2 + 144.0 * p2 * p2) * s
        + (64.0 * p * p + 32.0 * p * (3.0 * p1 + 3.0 * p2 - 4.0) - 96.0 * p1)
            * (1.0 - 4.0 * s + 4.0 * x)
        + p1 * p1 * (51.0 - 12.0 * sa * mixed)
        + p2 * (-17.0 + 4.0 * sa * mixed);
    (radicand >= 0.0).then(|| radicand.sqrt() / (24.0 * SQRT_5))
}

pub(crate) fn sqrt5() -> f64 {
    SQRT_5
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(a: f64) -> SchmidtParam {
        SchmidtParam::new(a).unwrap()
    }

    #[test]
    fn sqrt5_constant() {
        assert_eq!(SQRT_5, 5f64.sqrt());
    }

    #[test]
    fn reported_points() {
        assert_eq!(noiseless_fidelity(sp(0.5)), 1.0);
        assert_eq!(noiseless_deviation(sp(0.5)), 0.0);
        assert!((noiseless_fidelity(sp(0.0)) - 2.0 / 3.0).abs() < 1e-15);
        assert!((noiseless_deviation(sp(0.0)) - 1.0 / (3.0 * SQRT_5)).abs() < 1e-15);
        assert!((bit_flip_fidelity(sp(0.5), 0.7) - 0.8).abs() < 1e-15);
        assert!((bit_flip_deviation(sp(0.5), 0.7) - 0.6 / (3.0 * SQRT_5)).abs() < 1e-15);
        assert!((global_dep_fidelity(sp(0.0), 0.7) - (0.7 * 2.0 / 3.0 + 0.15)).abs() < 1e-15);
    }

    #[test]
    fn chain_reduces_to_single_link() {
        for i in 0..=50 {
            let a = sp(i as f64 / 100.0);
            assert!((chain_fidelity(1, a) - noiseless_fidelity(a)).abs() < 1e-15);
            assert!((chain_deviation(1, a) - noiseless_deviation(a)).abs() < 1e-12);
        }
    }

    #[test]
    fn combined_published_matches_global_without_local_terms() {
        for i in 0..=10 {
            let a = sp(0.05 * i as f64);
            let p = 0.3;
            let f = combined_fidelity_published(a, p, 0.0, 0.0);
            assert!((f - global_dep_fidelity(a, 1.0 - p)).abs() < 1e-12);
        }
    }
}
