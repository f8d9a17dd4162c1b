use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{arg_err, Error};
use crate::Scalar;

/// Result of a Bell-basis measurement on an ordered qubit pair `(qa, qb)`.
///
/// `PhiPlus`/`PhiMinus` = (|00⟩ ± |11⟩)/√2 and `PsiPlus`/`PsiMinus` =
/// (|01⟩ ± |10⟩)/√2, where the left bit belongs to `qa`. For `PsiMinus` the
/// pair order matters: swapping `qa` and `qb` flips its sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BellOutcome {
    #[serde(rename = "phi+")]
    PhiPlus,
    #[serde(rename = "phi-")]
    PhiMinus,
    #[serde(rename = "psi+")]
    PsiPlus,
    #[serde(rename = "psi-")]
    PsiMinus,
}

impl BellOutcome {
    /// Lexicographic order used for enumeration and tables.
    pub const ALL: [BellOutcome; 4] = [
        BellOutcome::PhiPlus,
        BellOutcome::PhiMinus,
        BellOutcome::PsiPlus,
        BellOutcome::PsiMinus,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn token(self) -> &'static str {
        match self {
            BellOutcome::PhiPlus => "phi+",
            BellOutcome::PhiMinus => "phi-",
            BellOutcome::PsiPlus => "psi+",
            BellOutcome::PsiMinus => "psi-",
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BellOutcome::PhiPlus => "φ⁺",
            BellOutcome::PhiMinus => "φ⁻",
            BellOutcome::PsiPlus => "ψ⁺",
            BellOutcome::PsiMinus => "ψ⁻",
        }
    }

    /// Amplitudes on |00⟩, |01⟩, |10⟩, |11⟩ of the pair (all real).
    pub fn amplitudes<T: Scalar>(self) -> [T; 4] {
        let h = T::FRAC_1_SQRT_2();
        let z = T::zero();
        match self {
            BellOutcome::PhiPlus => [h, z, z, h],
            BellOutcome::PhiMinus => [h, z, z, -h],
            BellOutcome::PsiPlus => [z, h, h, z],
            BellOutcome::PsiMinus => [z, h, -h, z],
        }
    }

    /// Decodes a mixed-radix index into an outcome tuple of length `n`,
    /// the first sender being the most significant digit.
    pub fn tuple_from_index(mut index: usize, n: usize) -> Vec<BellOutcome> {
        let mut out = vec![BellOutcome::PhiPlus; n];
        for slot in out.iter_mut().rev() {
            *slot = Self::ALL[index % 4];
            index /= 4;
        }
        out
    }

    /// Parses a comma-separated list such as `"phi+,psi-"`.
    pub fn parse_list(s: &str) -> Result<Vec<BellOutcome>, Error> {
        s.split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(str::parse)
            .collect()
    }
}

impl fmt::Display for BellOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for BellOutcome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "phi+" => Ok(BellOutcome::PhiPlus),
            "phi-" => Ok(BellOutcome::PhiMinus),
            "psi+" => Ok(BellOutcome::PsiPlus),
            "psi-" => Ok(BellOutcome::PsiMinus),
            other => Err(arg_err!("unknown Bell outcome {other:?} (expected phi+, phi-, psi+ or psi-)")),
        }
    }
}
