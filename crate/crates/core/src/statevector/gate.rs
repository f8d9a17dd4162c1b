use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{arg_err, Result};
use crate::Scalar;

/// A 2×2 single-qubit gate, row-major: `m[row][col]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gate1Q<T> {
    m: [[Complex<T>; 2]; 2],
}

impl<T: Scalar> Gate1Q<T> {
    /// Builds a gate, rejecting matrices that are not unitary within the
    /// scalar's normalization tolerance.
    pub fn new(m: [[Complex<T>; 2]; 2]) -> Result<Self> {
        let g = Gate1Q { m };
        if !g.is_unitary(T::norm_tol()) {
            return Err(arg_err!("gate matrix is not unitary: {:?}", m));
        }
        Ok(g)
    }

    pub fn matrix(&self) -> &[[Complex<T>; 2]; 2] {
        &self.m
    }

    pub fn identity() -> Self {
        let (o, l) = (Complex::new(T::zero(), T::zero()), Complex::new(T::one(), T::zero()));
        Gate1Q { m: [[l, o], [o, l]] }
    }

    pub fn pauli_x() -> Self {
        let (o, l) = (Complex::new(T::zero(), T::zero()), Complex::new(T::one(), T::zero()));
        Gate1Q { m: [[o, l], [l, o]] }
    }

    pub fn pauli_y() -> Self {
        let o = Complex::new(T::zero(), T::zero());
        let i = Complex::new(T::zero(), T::one());
        Gate1Q { m: [[o, -i], [i, o]] }
    }

    pub fn pauli_z() -> Self {
        let (o, l) = (Complex::new(T::zero(), T::zero()), Complex::new(T::one(), T::zero()));
        Gate1Q { m: [[l, o], [o, -l]] }
    }

    pub fn hadamard() -> Self {
        let h = Complex::new(T::FRAC_1_SQRT_2(), T::zero());
        Gate1Q { m: [[h, h], [h, -h]] }
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let m = &self.m;
        Gate1Q {
            m: [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]],
        }
    }

    /// Checks U†U = I entrywise.
    pub fn is_unitary(&self, tol: T) -> bool {
        let d = self.dagger();
        for r in 0..2 {
            for c in 0..2 {
                let mut acc = Complex::new(T::zero(), T::zero());
                for k in 0..2 {
                    acc += d.m[r][k] * self.m[k][c];
                }
                let expected = if r == c { T::one() } else { T::zero() };
                if (acc - Complex::new(expected, T::zero())).norm() > tol {
                    return false;
                }
            }
        }
        true
    }
}
