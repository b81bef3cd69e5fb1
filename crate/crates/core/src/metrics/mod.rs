//! Average fidelity `F`, fidelity deviation `D`, the score `tau_k = F - k D`,
//! classical baselines and the sensitivity cutoff `k*`.

pub mod closed_form;
mod haar;

pub use haar::{
    haar_mean, haar_moments, haar_sample, haar_second_moment, AverageMethod, GaussLegendre,
    Integrand, Moments,
};

use serde::{Deserialize, Serialize};

use crate::channels::NoiseModel;
use crate::error::{check_range, Error, Result};
use crate::states::{BlochParam, SchmidtParam};
use crate::teleport::{chain_map, input_fidelity_form, ChainSpec, TeleportMap};
use crate::tolerance::ZERO_DEVIATION;

/// Best entanglement-free average fidelity.
pub const CLASSICAL_FIDELITY: f64 = 2.0 / 3.0;

/// Deviation of the classical measure-and-prepare scheme, `1/(3 sqrt 5)`.
pub fn classical_deviation() -> f64 {
    1.0 / (3.0 * closed_form::sqrt5())
}

/// What gets teleported through: one link or an `n`-link chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Resource {
    Schmidt(SchmidtParam),
    Chain(ChainSpec),
}

impl Resource {
    pub fn alpha(&self) -> SchmidtParam {
        match self {
            Resource::Schmidt(a) => *a,
            Resource::Chain(c) => c.alpha(),
        }
    }
}

impl From<SchmidtParam> for Resource {
    fn from(a: SchmidtParam) -> Self {
        Resource::Schmidt(a)
    }
}

impl From<ChainSpec> for Resource {
    fn from(c: ChainSpec) -> Self {
        Resource::Chain(c)
    }
}

/// How an [`Evaluation`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    ClosedForm,
    /// Quadrature over a per-input closed form.
    QuadratureFormula,
    /// Quadrature over the simulated protocol.
    QuadratureSimulation,
    MonteCarloSimulation,
}

impl Route {
    pub fn is_numeric(self) -> bool {
        self != Route::ClosedForm
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Route::ClosedForm => "closed_form",
            Route::QuadratureFormula => "quadrature_formula",
            Route::QuadratureSimulation => "quadrature_simulation",
            Route::MonteCarloSimulation => "monte_carlo_simulation",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub fidelity: f64,
    pub deviation: f64,
    pub route: Route,
    /// Monte Carlo standard errors of `(F, D)`.
    pub std_error: Option<(f64, f64)>,
}

/// The protocol as a map for `model` on `resource`, built by simulation.
pub fn simulated_map(model: &NoiseModel, resource: Resource) -> Result<TeleportMap> {
    let link = model.resource(resource.alpha())?;
    match resource {
        Resource::Schmidt(_) => TeleportMap::new(&link),
        Resource::Chain(c) => chain_map(&link, c.n()),
    }
}

/// Moments of the simulated per-input fidelity.
pub fn simulated_moments(
    model: &NoiseModel,
    resource: Resource,
    method: AverageMethod,
) -> Result<Moments> {
    if method == AverageMethod::ClosedForm {
        return Err(Error::NonAffineIntegrand);
    }
    let map = simulated_map(model, resource)?;
    let f = move |b: BlochParam| map.fidelity(b);
    haar_moments(Integrand::Function(&f), method)
}

fn from_moments(m: Moments, route: Route) -> Evaluation {
    Evaluation {
        fidelity: m.mean,
        deviation: m.deviation(),
        route,
        std_error: (route == Route::MonteCarloSimulation)
            .then_some((m.mean_std_error, m.deviation_std_error)),
    }
}

/// `F` and `D` for `model` on `resource`.
///
/// `ClosedForm` uses the catalog where one exists and falls back to 64x64
/// quadrature otherwise (reported through [`Evaluation::route`]). The other
/// methods average the simulated protocol.
pub fn evaluate(
    model: &NoiseModel,
    resource: Resource,
    method: AverageMethod,
) -> Result<Evaluation> {
    model.validate()?;
    method.validate()?;
    match method {
        AverageMethod::ClosedForm => catalog(model, resource),
        AverageMethod::Quadrature { .. } => Ok(from_moments(
            simulated_moments(model, resource, method)?,
            Route::QuadratureSimulation,
        )),
        AverageMethod::MonteCarlo { .. } => Ok(from_moments(
            simulated_moments(model, resource, method)?,
            Route::MonteCarloSimulation,
        )),
    }
}

fn catalog(model: &NoiseModel, resource: Resource) -> Result<Evaluation> {
    use closed_form as cf;
    let closed = |fidelity: f64, deviation: f64| Evaluation {
        fidelity,
        deviation,
        route: Route::ClosedForm,
        std_error: None,
    };
    let quad = AverageMethod::default();
    let a = match resource {
        Resource::Schmidt(a) => a,
        Resource::Chain(c) => {
            return match model {
                NoiseModel::Noiseless => Ok(closed(
                    cf::chain_fidelity(c.n(), c.alpha()),
                    cf::chain_deviation(c.n(), c.alpha()),
                )),
                _ => Ok(from_moments(
                    simulated_moments(model, resource, quad)?,
                    Route::QuadratureSimulation,
                )),
            };
        }
    };
    // The flip closed forms are symmetric in (p, q); one of them must be 1.
    let single_flip = |p: f64, q: f64| match (p, q) {
        (p, 1.0) => Some(p),
        (1.0, q) => Some(q),
        _ => None,
    };
    let formula_quadrature = || -> Result<Evaluation> {
        let form = input_fidelity_form(model, a)?;
        Ok(from_moments(
            haar_moments(Integrand::Affine(form), quad)?,
            Route::QuadratureFormula,
        ))
    };
    match *model {
        NoiseModel::Noiseless => Ok(closed(
            cf::noiseless_fidelity(a),
            cf::noiseless_deviation(a),
        )),
        NoiseModel::BitFlip { p, q } | NoiseModel::BitPhaseFlip { p, q } => match single_flip(p, q)
        {
            Some(p) => Ok(closed(
                cf::bit_flip_fidelity(a, p),
                cf::bit_flip_deviation(a, p),
            )),
            None => formula_quadrature(),
        },
        NoiseModel::PhaseFlip { p, q } => match single_flip(p, q) {
            Some(p) => Ok(closed(
                cf::phase_flip_fidelity(a, p),
                cf::phase_flip_deviation(a, p),
            )),
            None => formula_quadrature(),
        },
        NoiseModel::GlobalDepolarizing { p } => Ok(closed(
            cf::global_dep_fidelity(a, p),
            cf::global_dep_deviation(a, p),
        )),
        NoiseModel::AmplitudeDamping { .. }
        | NoiseModel::PhaseDamping { .. }
        | NoiseModel::CombinedDepolarizing { .. } => Ok(from_moments(
            simulated_moments(model, resource, quad)?,
            Route::QuadratureSimulation,
        )),
    }
}

pub fn avg_fidelity(model: &NoiseModel, resource: Resource) -> Result<f64> {
    Ok(evaluate(model, resource, AverageMethod::ClosedForm)?.fidelity)
}

pub fn fidelity_deviation(model: &NoiseModel, resource: Resource) -> Result<f64> {
    Ok(evaluate(model, resource, AverageMethod::ClosedForm)?.deviation)
}

fn check_k(k: f64) -> Result<()> {
    check_range("k", k, 0.0, f64::INFINITY, "k >= 0")
}

/// `tau_k = F - k D`.
pub fn tele_score(f: f64, d: f64, k: f64) -> Result<f64> {
    check_k(k)?;
    Ok(f - k * d)
}

/// `(2 - k / sqrt 5) / 3`.
pub fn classical_score(k: f64) -> Result<f64> {
    check_k(k)?;
    Ok((2.0 - k / closed_form::sqrt5()) / 3.0)
}

/// Beats both the classical fidelity and the classical score.
pub fn is_quantum_useful(f: f64, d: f64, k: f64) -> Result<bool> {
    Ok(f > CLASSICAL_FIDELITY && tele_score(f, d, k)? > classical_score(k)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreRecord {
    #[serde(rename = "F")]
    pub f: f64,
    #[serde(rename = "D")]
    pub d: f64,
    pub k: f64,
    pub tau: f64,
    pub tau_classical: f64,
    pub quantum_useful: bool,
}

impl ScoreRecord {
    pub fn new(f: f64, d: f64, k: f64) -> Result<Self> {
        Ok(Self {
            f,
            d,
            k,
            tau: tele_score(f, d, k)?,
            tau_classical: classical_score(k)?,
            quantum_useful: is_quantum_useful(f, d, k)?,
        })
    }
}

pub fn score(
    model: &NoiseModel,
    resource: Resource,
    k: f64,
    method: AverageMethod,
) -> Result<ScoreRecord> {
    let e = evaluate(model, resource, method)?;
    ScoreRecord::new(e.fidelity, e.deviation, k)
}

/// Minimum of `F/D` and where it is attained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KStar {
    pub k_star: f64,
    pub alpha: f64,
}

pub const K_STAR_GRID: usize = 1001;

/// `min F(alpha)/D(alpha)` over `[lo, hi]` (a sub-interval of `[0, 1/2]`):
/// a 1001-point grid, then golden-section refinement around the best point.
/// Points with `D < 1e-12` are skipped.
pub fn k_star(model: &NoiseModel, range: (f64, f64)) -> Result<KStar> {
    let (lo, hi) = range;
    check_range("alpha range start", lo, 0.0, 0.5, "0 <= lo <= hi <= 1/2")?;
    check_range("alpha range end", hi, lo, 0.5, "0 <= lo <= hi <= 1/2")?;
    let ratio = |alpha: f64| -> Result<f64> {
        let e = evaluate(
            model,
            SchmidtParam::new(alpha)?.into(),
            AverageMethod::ClosedForm,
        )?;
        Ok(if e.deviation < ZERO_DEVIATION {
            f64::INFINITY
        } else {
            e.fidelity / e.deviation
        })
    };

    let n = if hi > lo { K_STAR_GRID } else { 1 };
    let grid: Vec<f64> = (0..n)
        .map(|i| {
            if n == 1 {
                lo
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        })
        .collect();
    let values = grid.iter().map(|&a| ratio(a)).collect::<Result<Vec<_>>>()?;
    let (best_idx, &best_val) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty grid");
    if !best_val.is_finite() {
        return Err(Error::UnboundedSensitivity);
    }
    let mut best = KStar {
        k_star: best_val,
        alpha: grid[best_idx],
    };
    if n > 1 {
        let a = grid[best_idx.saturating_sub(1)];
        let b = grid[(best_idx + 1).min(n - 1)];
        let (x, v) = golden_section(|x| ratio(x).unwrap_or(f64::INFINITY), a, b, 1e-12);
        if v < best.k_star {
            best = KStar {
                k_star: v,
                alpha: x,
            };
        }
    }
    Ok(best)
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(a: f64) -> SchmidtParam {
        SchmidtParam::new(a).unwrap()
    }

    #[test]
    fn noiseless_points() {
        let m = NoiseModel::Noiseless;
        assert_eq!(avg_fidelity(&m, sp(0.5).into()).unwrap(), 1.0);
        assert_eq!(fidelity_deviation(&m, sp(0.5).into()).unwrap(), 0.0);
        let d0 = fidelity_deviation(&m, sp(0.0).into()).unwrap();
        assert!((d0 - 0.149_071_198_499_985_87).abs() < 1e-12);
        assert!((d0 - classical_deviation()).abs() < 1e-15);
    }

    #[test]
    fn bit_flip_points() {
        let m = NoiseModel::bit_flip(0.7, 1.0).unwrap();
        let e = evaluate(&m, sp(0.5).into(), AverageMethod::ClosedForm).unwrap();
        assert_eq!(e.route, Route::ClosedForm);
        assert!((e.fidelity - 0.8).abs() < 1e-15);
        assert!((e.deviation - 0.089_442_719_099_991_59).abs() < 1e-12);
        // p = 1 with q = 0.7 is the same configuration
        let swapped = NoiseModel::bit_flip(1.0, 0.7).unwrap();
        let s = evaluate(&swapped, sp(0.5).into(), AverageMethod::ClosedForm).unwrap();
        assert_eq!((s.fidelity, s.deviation), (e.fidelity, e.deviation));
    }

    #[test]
    fn global_dep_point() {
        let m = NoiseModel::global_depolarizing(0.7).unwrap();
        let f = avg_fidelity(&m, sp(0.0).into()).unwrap();
        assert!((f - 0.616_666_666_666_666_7).abs() < 1e-12);
    }

    #[test]
    fn numeric_routes_are_flagged() {
        let m = NoiseModel::amplitude_damping(0.2, 0.1).unwrap();
        let e = evaluate(&m, sp(0.3).into(), AverageMethod::ClosedForm).unwrap();
        assert_eq!(e.route, Route::QuadratureSimulation);
        assert!(e.route.is_numeric());
        let m = NoiseModel::bit_flip(0.7, 0.4).unwrap();
        let e = evaluate(&m, sp(0.3).into(), AverageMethod::ClosedForm).unwrap();
        assert_eq!(e.route, Route::QuadratureFormula);
    }

    #[test]
    fn score_examples() {
        assert_eq!(tele_score(1.0, 0.0, 7.0).unwrap(), 1.0);
        let t = tele_score(2.0 / 3.0, classical_deviation(), 2.5).unwrap();
        assert!((t - 0.293_988_670_416_701_7).abs() < 1e-12);
        assert_eq!(tele_score(0.8, 0.1, 0.0).unwrap(), 0.8);
        assert!(tele_score(0.8, 0.1, -1.0).is_err());

        let r5 = 5f64.sqrt();
        assert!((classical_score(0.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((classical_score(r5).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(classical_score(2.0 * r5).unwrap().abs() < 1e-15);

        assert!(is_quantum_useful(1.0, 0.0, 3.0).unwrap());
        assert!(!is_quantum_useful(2.0 / 3.0, 0.0, 1.0).unwrap());
        assert!(!is_quantum_useful(2.0 / 3.0, 0.5, 0.0).unwrap());
        assert!(is_quantum_useful(0.7, 0.13, 3.0).unwrap());
    }

    #[test]
    fn score_record_invariants() {
        let r = ScoreRecord::new(0.75, 0.05, 2.0).unwrap();
        assert_eq!(r.tau, 0.75 - 2.0 * 0.05);
        assert_eq!(r.quantum_useful, r.f > 2.0 / 3.0 && r.tau > r.tau_classical);
    }

    #[test]
    fn k_star_noiseless_at_left_end() {
        let ks = k_star(&NoiseModel::Noiseless, (0.0, 0.5)).unwrap();
        assert!((ks.k_star - 2.0 * 5f64.sqrt()).abs() < 1e-6);
        assert_eq!(ks.alpha, 0.0);
    }

    #[test]
    fn k_star_unbounded_when_deviation_vanishes() {
        assert!(matches!(
            k_star(&NoiseModel::Noiseless, (0.5, 0.5)),
            Err(Error::UnboundedSensitivity)
        ));
        assert!(k_star(&NoiseModel::Noiseless, (0.3, 0.2)).is_err());
        assert!(k_star(&NoiseModel::Noiseless, (0.0, 0.7)).is_err());
    }
}
