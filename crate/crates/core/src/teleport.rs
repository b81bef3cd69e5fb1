//! Standard teleportation: Bell measurement on (input, sender half), Pauli
//! correction on the receiver half, outcomes mixed by probability.
//!
//! Qubit order in the three-qubit register is (input, sender, receiver).

use num_complex::Complex64;

use crate::channels::NoiseModel;
use crate::error::{check_range, Error, Result};
use crate::qmath::{clamp_unit, expectation_complex, kron, pure_fidelity, CMatrix, QState, ZERO};
use crate::states::{bell_state, bloch_ket, schmidt_state, BellIndex, BlochParam, SchmidtParam};
use crate::tolerance::Tolerances;

/// Per-outcome probabilities (in [`BellIndex::ALL`] order) and the
/// corrected, outcome-averaged receiver state.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolOutcome {
    pub probabilities: [f64; 4],
    pub output: QState,
}

/// Runs the protocol on an arbitrary 2x2 operator. The protocol is linear,
/// so this also works for the matrix units used by [`TeleportMap`].
fn run_protocol(resource: &CMatrix, input: &CMatrix) -> ([Complex64; 4], CMatrix) {
    let full = kron(input, resource);
    let mut weights = [ZERO; 4];
    let mut out = CMatrix::zeros(2, 2);
    for (slot, outcome) in weights.iter_mut().zip(BellIndex::ALL) {
        let project = bell_projection(outcome);
        let receiver = project.conjugate(&full);
        *slot = receiver.trace();
        out = &out + &outcome.correction().conjugate(&receiver);
    }
    (weights, out)
}

/// `<B| (x) I`: maps the 8-dim register onto the receiver qubit.
fn bell_projection(outcome: BellIndex) -> CMatrix {
    let bell = bell_state(outcome);
    let mut v = CMatrix::zeros(2, 8);
    for (pair, amp) in bell.amplitudes().iter().enumerate() {
        for r in 0..2 {
            v[(r, pair * 2 + r)] = amp.conj();
        }
    }
    v
}

fn check_resource(resource: &QState) -> Result<()> {
    if resource.dim() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "teleportation resource must be a two-qubit state, got dimension {}",
            resource.dim()
        )));
    }
    Ok(())
}

/// Teleports a (possibly mixed) single-qubit state.
pub fn teleport_state(resource: &QState, input: &QState) -> Result<ProtocolOutcome> {
    check_resource(resource)?;
    if input.dim() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "input must be a single qubit, got dimension {}",
            input.dim()
        )));
    }
    let (weights, out) = run_protocol(resource.matrix(), input.matrix());
    let probabilities = weights.map(|w| w.re.max(0.0));
    let output = QState::new(out)?;
    Ok(ProtocolOutcome {
        probabilities,
        output,
    })
}

/// Receiver state after teleporting the pure input `|eta(theta, phi)>`.
pub fn teleport_output(resource: &QState, input: BlochParam) -> Result<QState> {
    let eta = QState::trusted(bloch_ket(input).projector());
    Ok(teleport_state(resource, &eta)?.output)
}

pub fn teleport_fidelity(resource: &QState, input: BlochParam) -> Result<f64> {
    pure_fidelity(&bloch_ket(input), &teleport_output(resource, input)?)
}

/// The protocol as a linear map on 2x2 operators, tabulated on the matrix
/// units. Built from the full simulation; evaluation afterwards is a handful
/// of flops, which is what the averaging routines need.
#[derive(Debug, Clone)]
pub struct TeleportMap {
    // images of |i><j|, index 2*i + j
    images: [CMatrix; 4],
}

impl TeleportMap {
    pub fn new(resource: &QState) -> Result<Self> {
        check_resource(resource)?;
        let images = std::array::from_fn(|idx| {
            let mut unit = CMatrix::zeros(2, 2);
            unit[(idx / 2, idx % 2)] = Complex64::new(1.0, 0.0);
            run_protocol(resource.matrix(), &unit).1
        });
        Ok(Self { images })
    }

    pub fn identity() -> Self {
        let images = std::array::from_fn(|idx| {
            let mut unit = CMatrix::zeros(2, 2);
            unit[(idx / 2, idx % 2)] = Complex64::new(1.0, 0.0);
            unit
        });
        Self { images }
    }

    pub fn apply(&self, input: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(2, 2);
        for (idx, image) in self.images.iter().enumerate() {
            let c = input[(idx / 2, idx % 2)];
            if c != ZERO {
                out = &out + &image.scale(c);
            }
        }
        out
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &TeleportMap) -> TeleportMap {
        TeleportMap {
            images: std::array::from_fn(|idx| next.apply(&self.images[idx])),
        }
    }

    /// Fidelity of the teleported `|eta>` with `|eta>`.
    pub fn fidelity(&self, input: BlochParam) -> f64 {
        let eta = bloch_ket(input);
        let v = eta.amplitudes();
        let mut f = 0.0;
        for (idx, image) in self.images.iter().enumerate() {
            let c = v[idx / 2] * v[idx % 2].conj();
            f += (c * expectation_complex(v, image)).re;
        }
        clamp_unit(f, Tolerances::DEFAULT.validity)
    }
}

/// `F(theta, phi) = constant + sin2 * sin^2(theta) + cos2phi_sin2 * cos(2 phi) sin^2(theta)`.
///
/// Every per-input fidelity in the catalog has this shape, which is what
/// makes exact Haar moments available.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineFidelity {
    pub constant: f64,
    pub sin2: f64,
    pub cos2phi_sin2: f64,
}

impl AffineFidelity {
    pub fn eval(&self, input: BlochParam) -> f64 {
        let s2 = input.sin2_theta();
        self.constant + self.sin2 * s2 + self.cos2phi_sin2 * (2.0 * input.phi()).cos() * s2
    }
}

fn noiseless_sin2(s: f64) -> f64 {
    -0.5 * (1.0 - 2.0 * s)
}

/// Per-input fidelity as an [`AffineFidelity`], for models that have one.
pub fn input_fidelity_form(model: &NoiseModel, a: SchmidtParam) -> Result<AffineFidelity> {
    model.validate()?;
    let s = a.overlap();
    let flip_weights = |p: f64, q: f64| (p * q + (1.0 - p) * (1.0 - q), p + q - 2.0 * p * q);
    let form = match *model {
        NoiseModel::Noiseless => AffineFidelity {
            constant: 1.0,
            sin2: noiseless_sin2(s),
            cos2phi_sin2: 0.0,
        },
        NoiseModel::BitFlip { p, q } | NoiseModel::BitPhaseFlip { p, q } => {
            let (same, flip) = flip_weights(p, q);
            // sigma^y on the sender half equals sigma^y on the receiver half
            // of the swapped resource, which flips the sign of the phase term.
            let sign = if matches!(model, NoiseModel::BitFlip { .. }) {
                1.0
            } else {
                -1.0
            };
            AffineFidelity {
                constant: same,
                sin2: same * noiseless_sin2(s) + 0.5 * flip,
                cos2phi_sin2: sign * flip * s,
            }
        }
        NoiseModel::PhaseFlip { p, q } => {
            let (same, flip) = flip_weights(p, q);
            AffineFidelity {
                constant: same + flip,
                sin2: same * noiseless_sin2(s) - 0.5 * flip * (1.0 + 2.0 * s),
                cos2phi_sin2: 0.0,
            }
        }
        NoiseModel::GlobalDepolarizing { p } => AffineFidelity {
            constant: p + 0.5 * (1.0 - p),
            sin2: p * noiseless_sin2(s),
            cos2phi_sin2: 0.0,
        },
        NoiseModel::AmplitudeDamping { .. }
        | NoiseModel::PhaseDamping { .. }
        | NoiseModel::CombinedDepolarizing { .. } => {
            return Err(Error::NoClosedForm {
                kind: model.kind_name(),
            })
        }
    };
    Ok(form)
}

pub fn analytic_input_fidelity(
    model: &NoiseModel,
    a: SchmidtParam,
    input: BlochParam,
) -> Result<f64> {
    Ok(input_fidelity_form(model, a)?.eval(input))
}

/// Optimal fidelity `(2f + 1)/3` from the singlet fraction `f`.
pub fn horodecki_fidelity(f: f64) -> Result<f64> {
    check_range("f", f, 0.25, 1.0, "1/4 <= f <= 1")?;
    Ok((2.0 * f + 1.0) / 3.0)
}

/// `n` identical noiseless links with Schmidt weight `alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainSpec {
    n: u32,
    alpha: SchmidtParam,
}

impl ChainSpec {
    pub fn new(n: u32, alpha: SchmidtParam) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("n", 0.0, "n >= 1"));
        }
        Ok(Self { n, alpha })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn alpha(&self) -> SchmidtParam {
        self.alpha
    }
}

/// Teleports through every link in turn, each output feeding the next link.
pub fn chain_output(spec: ChainSpec, input: BlochParam) -> Result<QState> {
    let resource = schmidt_state(spec.alpha);
    let mut state = QState::trusted(bloch_ket(input).projector());
    for _ in 0..spec.n {
        state = teleport_state(&resource, &state)?.output;
    }
    Ok(state)
}

/// `n`-fold composition of the protocol map for an arbitrary link resource.
pub fn chain_map(resource: &QState, n: u32) -> Result<TeleportMap> {
    let link = TeleportMap::new(resource)?;
    Ok((0..n).fold(TeleportMap::identity(), |acc, _| acc.then(&link)))
}

/// `(1 - sin^2(theta)/2) + 2^{n-1} (alpha(1-alpha))^{n/2} sin^2(theta)`.
pub fn chain_input_fidelity(spec: ChainSpec, input: BlochParam) -> f64 {
    let s2 = input.sin2_theta();
    let x = spec.alpha.alpha() * (1.0 - spec.alpha.alpha());
    let n = spec.n as f64;
    (1.0 - 0.5 * s2) + 2f64.powf(n - 1.0) * x.powf(n / 2.0) * s2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::global_depolarizing;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn sp(a: f64) -> SchmidtParam {
        SchmidtParam::new(a).unwrap()
    }

    fn bp(t: f64, p: f64) -> BlochParam {
        BlochParam::new(t, p).unwrap()
    }

    #[test]
    fn maximally_entangled_resource_is_perfect() {
        let res = schmidt_state(sp(0.5));
        for (t, p) in [(0.3, 1.0), (FRAC_PI_2, 0.0), (2.9, 5.0)] {
            let out = teleport_output(&res, bp(t, p)).unwrap();
            let want = bloch_ket(bp(t, p)).projector();
            assert!(out.matrix().max_abs_diff(&want) < 1e-12);
            assert!((teleport_fidelity(&res, bp(t, p)).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn white_noise_resource_gives_white_output() {
        let res = QState::maximally_mixed(4);
        let out = teleport_output(&res, bp(1.1, 2.2)).unwrap();
        assert!(
            out.matrix()
                .max_abs_diff(QState::maximally_mixed(2).matrix())
                < 1e-15
        );
    }

    #[test]
    fn partially_entangled_equator_input() {
        // 1 - (1/2)(1 - 2 sqrt(3/16))
        let want = 1.0 - 0.5 * (1.0 - 2.0 * (3.0f64 / 16.0).sqrt());
        let got = teleport_fidelity(&schmidt_state(sp(0.25)), bp(FRAC_PI_2, 0.0)).unwrap();
        assert!((got - want).abs() < 1e-12);
        assert!((want - 0.933_012_701_892_219_3).abs() < 1e-15);
    }

    #[test]
    fn pole_inputs_are_perfect() {
        for a in [0.0, 0.1, 0.37] {
            assert!(
                (teleport_fidelity(&schmidt_state(sp(a)), bp(0.0, 0.0)).unwrap() - 1.0).abs()
                    < 1e-12
            );
        }
    }

    #[test]
    fn outcome_probabilities_sum_to_one() {
        let res = NoiseModel::amplitude_damping(0.3, 0.6)
            .unwrap()
            .resource(sp(0.2))
            .unwrap();
        let input = QState::trusted(bloch_ket(bp(1.0, 0.5)).projector());
        let out = teleport_state(&res, &input).unwrap();
        assert!((out.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(out.probabilities.iter().all(|&p| (0.0..=1.0).contains(&p)));
    }

    #[test]
    fn rejects_wrong_dimensions() {
        let two = QState::maximally_mixed(2);
        assert!(teleport_output(&two, bp(0.0, 0.0)).is_err());
        assert!(teleport_state(&QState::maximally_mixed(4), &QState::maximally_mixed(4)).is_err());
    }

    #[test]
    fn catalog_examples() {
        let a = sp(0.25);
        let f = analytic_input_fidelity(&NoiseModel::Noiseless, a, bp(FRAC_PI_2, 0.0)).unwrap();
        assert!((f - 0.933_012_701_892_219_3).abs() < 1e-15);

        let bf = NoiseModel::bit_flip(0.7, 1.0).unwrap();
        for al in [0.0, 0.2, 0.5] {
            let f = analytic_input_fidelity(&bf, sp(al), bp(0.0, 1.0)).unwrap();
            assert!((f - 0.7).abs() < 1e-15);
        }

        let pf = NoiseModel::phase_flip(0.5, 0.5).unwrap();
        let f = analytic_input_fidelity(&pf, sp(0.0), bp(FRAC_PI_2, 0.0)).unwrap();
        assert!((f - 0.5).abs() < 1e-15);
        let sim = teleport_fidelity(&pf.resource(sp(0.0)).unwrap(), bp(FRAC_PI_2, 0.0)).unwrap();
        assert!((sim - 0.5).abs() < 1e-12);

        for m in [
            NoiseModel::amplitude_damping(0.1, 0.1).unwrap(),
            NoiseModel::phase_damping(0.1, 0.1).unwrap(),
            NoiseModel::combined_depolarizing(0.1, 0.1, 0.1).unwrap(),
        ] {
            assert!(matches!(
                analytic_input_fidelity(&m, a, bp(1.0, 1.0)),
                Err(Error::NoClosedForm { .. })
            ));
        }
    }

    #[test]
    fn simulation_matches_catalog_for_noisy_resources() {
        let a = sp(0.3);
        let input = bp(1.2, 0.7);
        let bf = NoiseModel::bit_flip(0.7, 1.0).unwrap();
        let sim = teleport_fidelity(&bf.resource(a).unwrap(), input).unwrap();
        assert!((sim - analytic_input_fidelity(&bf, a, input).unwrap()).abs() < 1e-12);

        let p = 0.6;
        let res = global_depolarizing(&schmidt_state(a), p).unwrap();
        let noiseless = analytic_input_fidelity(&NoiseModel::Noiseless, a, input).unwrap();
        let sim = teleport_fidelity(&res, input).unwrap();
        assert!((sim - (p * noiseless + (1.0 - p) / 2.0)).abs() < 1e-12);
    }

    #[test]
    fn teleport_map_agrees_with_simulation() {
        let res = NoiseModel::phase_damping(0.4, 0.2)
            .unwrap()
            .resource(sp(0.15))
            .unwrap();
        let map = TeleportMap::new(&res).unwrap();
        for (t, p) in [(0.0, 0.0), (0.4, 3.0), (2.0, 6.0), (PI, 1.0)] {
            let sim = teleport_fidelity(&res, bp(t, p)).unwrap();
            assert!((map.fidelity(bp(t, p)) - sim).abs() < 1e-13);
        }
    }

    #[test]
    fn horodecki_examples() {
        assert_eq!(horodecki_fidelity(1.0).unwrap(), 1.0);
        assert!((horodecki_fidelity(0.5).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((horodecki_fidelity(0.8).unwrap() - 13.0 / 15.0).abs() < 1e-15);
        assert!(horodecki_fidelity(0.2).is_err());
        assert!(horodecki_fidelity(1.01).is_err());
    }

    #[test]
    fn chain_examples() {
        let input = bp(0.8, 2.1);
        let spec = ChainSpec::new(1, sp(0.2)).unwrap();
        let one = chain_output(spec, input).unwrap();
        let direct = teleport_output(&schmidt_state(sp(0.2)), input).unwrap();
        assert!(one.matrix().max_abs_diff(direct.matrix()) < 1e-12);

        for n in 1..5 {
            let out = chain_output(ChainSpec::new(n, sp(0.5)).unwrap(), input).unwrap();
            assert!(out.matrix().max_abs_diff(&bloch_ket(input).projector()) < 1e-12);
        }

        let spec = ChainSpec::new(2, sp(0.25)).unwrap();
        let eq = bp(FRAC_PI_2, 0.0);
        assert!((chain_input_fidelity(spec, eq) - 0.875).abs() < 1e-15);
        let sim = pure_fidelity(&bloch_ket(eq), &chain_output(spec, eq).unwrap()).unwrap();
        assert!((sim - 0.875).abs() < 1e-12);

        let spec = ChainSpec::new(3, sp(0.5)).unwrap();
        assert!((chain_input_fidelity(spec, eq) - 1.0).abs() < 1e-15);

        for n in 1..6 {
            let spec = ChainSpec::new(n, sp(0.1)).unwrap();
            assert_eq!(chain_input_fidelity(spec, bp(0.0, 0.0)), 1.0);
        }
        assert!(ChainSpec::new(0, sp(0.1)).is_err());
    }

    #[test]
    fn chain_map_matches_iterated_simulation() {
        let spec = ChainSpec::new(3, sp(0.3)).unwrap();
        let map = chain_map(&schmidt_state(sp(0.3)), 3).unwrap();
        let input = bp(1.9, 4.4);
        let sim = pure_fidelity(&bloch_ket(input), &chain_output(spec, input).unwrap()).unwrap();
        assert!((map.fidelity(input) - sim).abs() < 1e-13);
    }
}
