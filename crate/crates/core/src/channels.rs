//! Noise channels acting on the two-qubit resource.
//!
//! Local Pauli flips and damping are Kraus channels built as tensor products
//! of single-qubit maps: the first factor acts on the sender's half, the
//! second on the receiver's. Global and combined depolarizing noise are
//! affine mixers on the state itself.

use std::fmt;
use std::str::FromStr;

use crate::error::{check_range, Error, Result};
use crate::qmath::{apply_kraus, kron, partial_trace, pauli_x, pauli_y, pauli_z, CMatrix, QState};
use crate::states::{schmidt_state, SchmidtParam};
use crate::tolerance::Tolerances;

/// Completeness-checked list of Kraus operators.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    dim: usize,
    operators: Vec<CMatrix>,
}

impl KrausChannel {
    pub fn new(operators: Vec<CMatrix>) -> Result<Self> {
        let dim = match operators.first() {
            Some(k) => k.rows(),
            None => return Err(Error::DimensionMismatch("empty Kraus list".into())),
        };
        if operators.iter().any(|k| k.rows() != dim || k.cols() != dim) {
            return Err(Error::DimensionMismatch(
                "Kraus operators must all be square with the same dimension".into(),
            ));
        }
        let deviation = completeness_deviation(&operators);
        if deviation > Tolerances::DEFAULT.validity {
            return Err(Error::IncompleteChannel { deviation });
        }
        Ok(Self { dim, operators })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    pub fn apply(&self, s: &QState) -> Result<QState> {
        apply_kraus(s, self)
    }
}

/// `max |sum_i K_i^dagger K_i - I|` over entries.
pub fn completeness_deviation(operators: &[CMatrix]) -> f64 {
    let Some(first) = operators.first() else {
        return f64::INFINITY;
    };
    let n = first.rows();
    let mut sum = CMatrix::zeros(n, n);
    for k in operators {
        sum = &sum + &k.adjoint().matmul(k);
    }
    sum.max_abs_diff(&CMatrix::identity(n))
}

pub fn check_completeness(ch: &KrausChannel) -> f64 {
    completeness_deviation(ch.operators())
}

fn check_prob(name: &'static str, v: f64) -> Result<()> {
    check_range(name, v, 0.0, 1.0, "0 <= value <= 1")
}

/// Two-sided Pauli flip: `P` on the first qubit with probability `1-p`, on
/// the second with probability `1-q`.
fn pauli_pair(pauli: CMatrix, p: f64, q: f64) -> Result<KrausChannel> {
    check_prob("p", p)?;
    check_prob("q", q)?;
    let id = CMatrix::identity(2);
    KrausChannel::new(vec![
        kron(&id, &id).scale_real((p * q).sqrt()),
        kron(&id, &pauli).scale_real((p * (1.0 - q)).sqrt()),
        kron(&pauli, &id).scale_real(((1.0 - p) * q).sqrt()),
        kron(&pauli, &pauli).scale_real(((1.0 - p) * (1.0 - q)).sqrt()),
    ])
}

pub fn bit_flip_pair(p: f64, q: f64) -> Result<KrausChannel> {
    pauli_pair(pauli_x(), p, q)
}

pub fn phase_flip_pair(p: f64, q: f64) -> Result<KrausChannel> {
    pauli_pair(pauli_z(), p, q)
}

pub fn bitphase_flip_pair(p: f64, q: f64) -> Result<KrausChannel> {
    pauli_pair(pauli_y(), p, q)
}

fn tensor_local(first: [CMatrix; 2], second: [CMatrix; 2]) -> Result<KrausChannel> {
    let ops = first
        .iter()
        .flat_map(|a| second.iter().map(move |b| kron(a, b)))
        .collect();
    KrausChannel::new(ops)
}

fn amplitude_damping(g: f64) -> [CMatrix; 2] {
    [
        CMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, (1.0 - g).sqrt()]).unwrap(),
        CMatrix::from_real(2, 2, &[0.0, g.sqrt(), 0.0, 0.0]).unwrap(),
    ]
}

fn phase_damping(l: f64) -> [CMatrix; 2] {
    [
        CMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, (1.0 - l).sqrt()]).unwrap(),
        CMatrix::from_real(2, 2, &[0.0, 0.0, 0.0, l.sqrt()]).unwrap(),
    ]
}

pub fn amplitude_damping_local(g1: f64, g2: f64) -> Result<KrausChannel> {
    check_prob("g1", g1)?;
    check_prob("g2", g2)?;
    tensor_local(amplitude_damping(g1), amplitude_damping(g2))
}

pub fn phase_damping_local(l1: f64, l2: f64) -> Result<KrausChannel> {
    check_prob("l1", l1)?;
    check_prob("l2", l2)?;
    tensor_local(phase_damping(l1), phase_damping(l2))
}

/// `p rho + (1 - p) I/4`.
pub fn global_depolarizing(s: &QState, p: f64) -> Result<QState> {
    check_prob("p", p)?;
    if s.dim() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "global depolarizing acts on two qubits, got dimension {}",
            s.dim()
        )));
    }
    let white = QState::maximally_mixed(4);
    let m = &s.matrix().scale_real(p) + &white.matrix().scale_real(1.0 - p);
    Ok(QState::trusted(m))
}

/// `p I/4 + (p1/2) I (x) Tr_1(rho) + (p2/2) Tr_2(rho) (x) I + (1-p-p1-p2) rho`
/// for the Schmidt resource `rho`.
pub fn combined_depolarizing(a: SchmidtParam, p: f64, p1: f64, p2: f64) -> Result<QState> {
    check_combined(p, p1, p2)?;
    let rho = schmidt_state(a);
    let second = partial_trace(&rho, &[1], &[2, 2])?;
    let first = partial_trace(&rho, &[0], &[2, 2])?;
    let id = CMatrix::identity(2);
    let terms = [
        CMatrix::identity(4).scale_real(p / 4.0),
        kron(&id, second.matrix()).scale_real(p1 / 2.0),
        kron(first.matrix(), &id).scale_real(p2 / 2.0),
        rho.matrix().scale_real(1.0 - p - p1 - p2),
    ];
    let m = terms
        .iter()
        .skip(1)
        .fold(terms[0].clone(), |acc, t| &acc + t);
    Ok(QState::trusted(m))
}

fn check_combined(p: f64, p1: f64, p2: f64) -> Result<()> {
    check_range("p", p, 0.0, 1.0, "p >= 0 and p + p1 + p2 <= 1")?;
    check_range("p1", p1, 0.0, 1.0, "p1 >= 0 and p + p1 + p2 <= 1")?;
    check_range("p2", p2, 0.0, 1.0, "p2 >= 0 and p + p1 + p2 <= 1")?;
    let total = p + p1 + p2;
    if total > 1.0 + 1e-15 {
        return Err(Error::param("p + p1 + p2", total, "p + p1 + p2 <= 1"));
    }
    Ok(())
}

/// Noise acting on the shared resource.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseModel {
    Noiseless,
    BitFlip { p: f64, q: f64 },
    PhaseFlip { p: f64, q: f64 },
    BitPhaseFlip { p: f64, q: f64 },
    AmplitudeDamping { g1: f64, g2: f64 },
    PhaseDamping { l1: f64, l2: f64 },
    GlobalDepolarizing { p: f64 },
    CombinedDepolarizing { p: f64, p1: f64, p2: f64 },
}

impl NoiseModel {
    pub fn bit_flip(p: f64, q: f64) -> Result<Self> {
        Self::BitFlip { p, q }.validated()
    }

    pub fn phase_flip(p: f64, q: f64) -> Result<Self> {
        Self::PhaseFlip { p, q }.validated()
    }

    pub fn bitphase_flip(p: f64, q: f64) -> Result<Self> {
        Self::BitPhaseFlip { p, q }.validated()
    }

    pub fn amplitude_damping(g1: f64, g2: f64) -> Result<Self> {
        Self::AmplitudeDamping { g1, g2 }.validated()
    }

    pub fn phase_damping(l1: f64, l2: f64) -> Result<Self> {
        Self::PhaseDamping { l1, l2 }.validated()
    }

    pub fn global_depolarizing(p: f64) -> Result<Self> {
        Self::GlobalDepolarizing { p }.validated()
    }

    pub fn combined_depolarizing(p: f64, p1: f64, p2: f64) -> Result<Self> {
        Self::CombinedDepolarizing { p, p1, p2 }.validated()
    }

    fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseModel::Noiseless => Ok(()),
            NoiseModel::BitFlip { p, q }
            | NoiseModel::PhaseFlip { p, q }
            | NoiseModel::BitPhaseFlip { p, q } => {
                check_prob("p", p)?;
                check_prob("q", q)
            }
            NoiseModel::AmplitudeDamping { g1, g2 } => {
                check_prob("g1", g1)?;
                check_prob("g2", g2)
            }
            NoiseModel::PhaseDamping { l1, l2 } => {
                check_prob("l1", l1)?;
                check_prob("l2", l2)
            }
            NoiseModel::GlobalDepolarizing { p } => check_prob("p", p),
            NoiseModel::CombinedDepolarizing { p, p1, p2 } => check_combined(p, p1, p2),
        }
    }

    /// Short kind name used by the model-spec grammar and CSV exports.
    pub fn kind_name(&self) -> &'static str {
        match self {
            NoiseModel::Noiseless => "noiseless",
            NoiseModel::BitFlip { .. } => "bit_flip",
            NoiseModel::PhaseFlip { .. } => "phase_flip",
            NoiseModel::BitPhaseFlip { .. } => "bitphase_flip",
            NoiseModel::AmplitudeDamping { .. } => "amp_damp",
            NoiseModel::PhaseDamping { .. } => "phase_damp",
            NoiseModel::GlobalDepolarizing { .. } => "global_dep",
            NoiseModel::CombinedDepolarizing { .. } => "combined_dep",
        }
    }

    pub fn params(&self) -> Vec<(&'static str, f64)> {
        match *self {
            NoiseModel::Noiseless => vec![],
            NoiseModel::BitFlip { p, q }
            | NoiseModel::PhaseFlip { p, q }
            | NoiseModel::BitPhaseFlip { p, q } => vec![("p", p), ("q", q)],
            NoiseModel::AmplitudeDamping { g1, g2 } => vec![("g1", g1), ("g2", g2)],
            NoiseModel::PhaseDamping { l1, l2 } => vec![("l1", l1), ("l2", l2)],
            NoiseModel::GlobalDepolarizing { p } => vec![("p", p)],
            NoiseModel::CombinedDepolarizing { p, p1, p2 } => {
                vec![("p", p), ("p1", p1), ("p2", p2)]
            }
        }
    }

    /// `key=value,...` part of the spec string.
    pub fn params_string(&self) -> String {
        self.params()
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(",")
    }

    /// The Kraus channel for local models; `None` for the affine ones.
    pub fn kraus_channel(&self) -> Result<Option<KrausChannel>> {
        self.validate()?;
        Ok(match *self {
            NoiseModel::BitFlip { p, q } => Some(bit_flip_pair(p, q)?),
            NoiseModel::PhaseFlip { p, q } => Some(phase_flip_pair(p, q)?),
            NoiseModel::BitPhaseFlip { p, q } => Some(bitphase_flip_pair(p, q)?),
            NoiseModel::AmplitudeDamping { g1, g2 } => Some(amplitude_damping_local(g1, g2)?),
            NoiseModel::PhaseDamping { l1, l2 } => Some(phase_damping_local(l1, l2)?),
            NoiseModel::Noiseless
            | NoiseModel::GlobalDepolarizing { .. }
            | NoiseModel::CombinedDepolarizing { .. } => None,
        })
    }

    /// The noisy resource produced from the Schmidt state at `a`.
    pub fn resource(&self, a: SchmidtParam) -> Result<QState> {
        self.validate()?;
        let rho = schmidt_state(a);
        match *self {
            NoiseModel::Noiseless => Ok(rho),
            NoiseModel::GlobalDepolarizing { p } => global_depolarizing(&rho, p),
            NoiseModel::CombinedDepolarizing { p, p1, p2 } => combined_depolarizing(a, p, p1, p2),
            _ => {
                let ch = self
                    .kraus_channel()?
                    .expect("local model has a Kraus channel");
                ch.apply(&rho)
            }
        }
    }
}

impl fmt::Display for NoiseModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params = self.params_string();
        if params.is_empty() {
            f.write_str(self.kind_name())
        } else {
            write!(f, "{}:{}", self.kind_name(), params)
        }
    }
}

impl FromStr for NoiseModel {
    type Err = Error;

    /// Grammar: `kind[:key=value[,key=value...]]`.
    fn from_str(spec: &str) -> Result<Self> {
        let bad = |reason: String| Error::ModelSpec {
            spec: spec.to_string(),
            reason,
        };
        let (kind, rest) = match spec.trim().split_once(':') {
            Some((k, r)) => (k.trim(), Some(r)),
            None => (spec.trim(), None),
        };
        let mut pairs: Vec<(String, f64)> = Vec::new();
        if let Some(rest) = rest {
            for item in rest.split(',') {
                let (key, value) = item
                    .split_once('=')
                    .ok_or_else(|| bad(format!("expected key=value, found `{}`", item.trim())))?;
                let key = key.trim().to_string();
                let value: f64 = value
                    .trim()
                    .parse()
                    .map_err(|_| bad(format!("value of key `{key}` is not a number")))?;
                if pairs.iter().any(|(k, _)| *k == key) {
                    return Err(bad(format!("key `{key}` given twice")));
                }
                pairs.push((key, value));
            }
        }

        let (allowed, required): (&[&str], &[&str]) = match kind {
            "noiseless" | "none" => (&[], &[]),
            "bit_flip" | "bitflip" | "phase_flip" | "phaseflip" | "bitphase_flip"
            | "bit_phase_flip" => (&["p", "q"], &["p"]),
            "amp_damp" | "amplitude_damping" => (&["g1", "g2"], &[]),
            "phase_damp" | "phase_damping" => (&["l1", "l2"], &[]),
            "global_dep" | "global_depolarizing" => (&["p"], &["p"]),
            "combined_dep" | "combined_depolarizing" => (&["p", "p1", "p2"], &[]),
            other => return Err(bad(format!("unknown model kind `{other}`"))),
        };
        if let Some((k, _)) = pairs.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
            return Err(bad(format!("unknown key `{k}` for kind `{kind}`")));
        }
        if let Some(k) = required
            .iter()
            .find(|r| !pairs.iter().any(|(k, _)| k == *r))
        {
            return Err(bad(format!("missing required key `{k}`")));
        }
        let get = |key: &str, default: f64| {
            pairs
                .iter()
                .find(|(k, _)| k == key)
                .map_or(default, |(_, v)| *v)
        };

        match kind {
            "noiseless" | "none" => Ok(NoiseModel::Noiseless),
            "bit_flip" | "bitflip" => NoiseModel::bit_flip(get("p", 1.0), get("q", 1.0)),
            "phase_flip" | "phaseflip" => NoiseModel::phase_flip(get("p", 1.0), get("q", 1.0)),
            "bitphase_flip" | "bit_phase_flip" => {
                NoiseModel::bitphase_flip(get("p", 1.0), get("q", 1.0))
            }
            "amp_damp" | "amplitude_damping" => {
                NoiseModel::amplitude_damping(get("g1", 0.0), get("g2", 0.0))
            }
            "phase_damp" | "phase_damping" => {
                NoiseModel::phase_damping(get("l1", 0.0), get("l2", 0.0))
            }
            "global_dep" | "global_depolarizing" => NoiseModel::global_depolarizing(get("p", 1.0)),
            _ => NoiseModel::combined_depolarizing(get("p", 0.0), get("p1", 0.0), get("p2", 0.0)),
        }
    }
}
