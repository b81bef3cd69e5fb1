//! Resource, input and Bell states.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::qmath::{pauli_x, pauli_z, CMatrix, Ket, QState};

/// Schmidt weight `alpha` of `sqrt(alpha)|00> + sqrt(1-alpha)|11>`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct SchmidtParam(f64);

impl SchmidtParam {
    pub fn new(alpha: f64) -> Result<Self> {
        check_range("alpha", alpha, 0.0, 1.0, "0 <= alpha <= 1")?;
        Ok(Self(alpha))
    }

    pub fn alpha(self) -> f64 {
        self.0
    }

    /// `sqrt(alpha (1 - alpha))`, the quantity every closed form is written in.
    pub fn overlap(self) -> f64 {
        (self.0 * (1.0 - self.0)).max(0.0).sqrt()
    }
}

impl TryFrom<f64> for SchmidtParam {
    type Error = Error;

    fn try_from(alpha: f64) -> Result<Self> {
        Self::new(alpha)
    }
}

impl From<SchmidtParam> for f64 {
    fn from(a: SchmidtParam) -> f64 {
        a.0
    }
}

/// Bloch angles of `cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochParam {
    theta: f64,
    phi: f64,
}

impl BlochParam {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        check_range("theta", theta, 0.0, PI, "0 <= theta <= pi")?;
        if !(phi.is_finite() && (0.0..TAU).contains(&phi)) {
            return Err(Error::param("phi", phi, "0 <= phi < 2 pi"));
        }
        Ok(Self { theta, phi })
    }

    /// Maps any finite angles into range (`phi` mod 2 pi, `theta` reflected).
    pub fn wrapped(theta: f64, phi: f64) -> Self {
        let mut t = theta.rem_euclid(TAU);
        let mut p = phi;
        if t > PI {
            t = TAU - t;
            p += PI;
        }
        Self {
            theta: t,
            phi: p.rem_euclid(TAU),
        }
    }

    pub fn theta(self) -> f64 {
        self.theta
    }

    pub fn phi(self) -> f64 {
        self.phi
    }

    pub fn sin2_theta(self) -> f64 {
        let s = self.theta.sin();
        s * s
    }
}

pub fn schmidt_ket(a: SchmidtParam) -> Ket {
    Ket::from_real(&[a.alpha().sqrt(), 0.0, 0.0, (1.0 - a.alpha()).sqrt()])
}

/// Density matrix of the Schmidt-form resource.
pub fn schmidt_state(a: SchmidtParam) -> QState {
    QState::trusted(schmidt_ket(a).projector())
}

pub fn bloch_ket(b: BlochParam) -> Ket {
    let half = b.theta / 2.0;
    Ket::new(vec![
        Complex64::new(half.cos(), 0.0),
        Complex64::from_polar(half.sin(), b.phi),
    ])
}

/// Bell basis, ordered as the protocol enumerates measurement outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BellIndex {
    PhiPlus,
    PsiPlus,
    PhiMinus,
    PsiMinus,
}

impl BellIndex {
    pub const ALL: [BellIndex; 4] = [
        BellIndex::PhiPlus,
        BellIndex::PsiPlus,
        BellIndex::PhiMinus,
        BellIndex::PsiMinus,
    ];

    pub fn from_index(index: usize) -> Result<Self> {
        Self::ALL.get(index).copied().ok_or(Error::param(
            "bell index",
            index as f64,
            "index in {0, 1, 2, 3}",
        ))
    }

    /// Pauli correction Bob applies after this outcome.
    pub fn correction(self) -> CMatrix {
        match self {
            BellIndex::PhiPlus => CMatrix::identity(2),
            BellIndex::PsiPlus => pauli_x(),
            BellIndex::PhiMinus => pauli_z(),
            BellIndex::PsiMinus => pauli_z().matmul(&pauli_x()),
        }
    }
}

pub fn bell_state(index: BellIndex) -> Ket {
    let h = FRAC_1_SQRT_2;
    match index {
        BellIndex::PhiPlus => Ket::from_real(&[h, 0.0, 0.0, h]),
        BellIndex::PsiPlus => Ket::from_real(&[0.0, h, h, 0.0]),
        BellIndex::PhiMinus => Ket::from_real(&[h, 0.0, 0.0, -h]),
        BellIndex::PsiMinus => Ket::from_real(&[0.0, h, -h, 0.0]),
    }
}

pub fn bell_state_at(index: usize) -> Result<Ket> {
    BellIndex::from_index(index).map(bell_state)
}

pub fn singlet_fraction_schmidt(a: SchmidtParam) -> f64 {
    0.5 + a.overlap()
}

pub fn concurrence_schmidt(a: SchmidtParam) -> f64 {
    2.0 * a.overlap()
}
