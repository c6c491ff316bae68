//! Truncated polynomial rings `Q[ε]/(ε^N)`.
//!
//! Order 2 gives the dual numbers, where the derivative of a polynomial is
//! read off the `ε` coefficient of `f(x + ε)`. Higher orders carry the
//! Taylor coefficients `f^(k)(x)/k!`.

use crate::poly::Poly;
use crate::rational::{fmt_q, Q};
use num_traits::{One, Zero};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NilError {
    #[error("truncation order must be at least 2, got {0}")]
    OrderTooSmall(usize),
    #[error("truncation orders differ: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("{count} coefficients do not fit order {order}")]
    TooManyCoefficients { count: usize, order: usize },
}

/// `c0 + c1 ε + ... + c_{N-1} ε^{N-1}` with `ε^N = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruncatedPoly {
    coeffs: Vec<Q>,
}

impl TruncatedPoly {
    /// Pads `coeffs` with zeros up to `order`.
    pub fn new(mut coeffs: Vec<Q>, order: usize) -> Result<Self, NilError> {
        if order < 2 {
            return Err(NilError::OrderTooSmall(order));
        }
        if coeffs.len() > order {
            return Err(NilError::TooManyCoefficients {
                count: coeffs.len(),
                order,
            });
        }
        coeffs.resize(order, Q::zero());
        Ok(TruncatedPoly { coeffs })
    }

    pub fn constant(c: Q, order: usize) -> Result<Self, NilError> {
        Self::new(vec![c], order)
    }

    /// The nilpotent generator `ε`.
    pub fn epsilon(order: usize) -> Result<Self, NilError> {
        Self::new(vec![Q::zero(), Q::one()], order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &Q {
        &self.coeffs[k]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    fn check(&self, other: &Self) -> Result<(), NilError> {
        if self.order() == other.order() {
            Ok(())
        } else {
            Err(NilError::OrderMismatch(self.order(), other.order()))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, NilError> {
        self.check(other)?;
        Ok(TruncatedPoly {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn neg(&self) -> Self {
        TruncatedPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self, NilError> {
        self.add(&other.neg())
    }

    /// Product with every term of degree `>= N` dropped.
    pub fn mul(&self, other: &Self) -> Result<Self, NilError> {
        self.check(other)?;
        let n = self.order();
        let mut out = vec![Q::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..n - i].iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Ok(TruncatedPoly { coeffs: out })
    }

    pub fn pow(&self, k: u32) -> Self {
        let one = Self::constant(Q::one(), self.order()).expect("order already validated");
        (0..k).fold(one, |acc, _| acc.mul(self).expect("same order"))
    }
}

impl fmt::Display for TruncatedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(k, c)| *k == 0 || !c.is_zero())
            .map(|(k, c)| match k {
                0 => fmt_q(c),
                1 => format!("{}ε", fmt_q(c)),
                _ => format!("{}ε^{k}", fmt_q(c)),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// `f(x + ε)` in `Q[ε]/(ε^order)`.
pub fn lift_and_eval(f: &Poly, x: &Q, order: usize) -> Result<TruncatedPoly, NilError> {
    let arg = TruncatedPoly::new(vec![x.clone(), Q::one()], order)?;
    f.coeffs().iter().rev().try_fold(
        TruncatedPoly::constant(Q::zero(), order)?,
        |acc, c| acc.mul(&arg)?.add(&TruncatedPoly::constant(c.clone(), order)?),
    )
}

/// `f'(x)` as the `ε` coefficient of `f(x + ε)` over the dual numbers.
pub fn derivative(f: &Poly, x: &Q) -> Q {
    lift_and_eval(f, x, 2)
        .expect("order 2 is valid")
        .coeff(1)
        .clone()
}

/// Expansion of `d(yz) = (y + dy)(z + dz) - yz` over the dual numbers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeibnizTrace {
    pub y: TruncatedPoly,
    pub z: TruncatedPoly,
    /// `y dz`, coefficient of ε.
    pub y_dz: Q,
    /// `z dy`, coefficient of ε.
    pub z_dy: Q,
    /// `dy dz`, the ε² coefficient that truncation discards.
    pub discarded: Q,
    /// The ε coefficient of the truncated `(y + dy)(z + dz) - yz`.
    pub d_yz: Q,
    pub holds: bool,
}

/// Expands the product rule for two dual numbers and confirms that the
/// truncated product agrees with `y dz + z dy`.
pub fn leibniz_check(y: &TruncatedPoly, z: &TruncatedPoly) -> Result<LeibnizTrace, NilError> {
    y.check(z)?;
    if y.order() != 2 {
        return Err(NilError::OrderMismatch(y.order(), 2));
    }
    let (y0, y1) = (y.coeff(0), y.coeff(1));
    let (z0, z1) = (z.coeff(0), z.coeff(1));
    let base = TruncatedPoly::constant(y0 * z0, 2)?;
    let d = y.mul(z)?.sub(&base)?;
    let y_dz = y0 * z1;
    let z_dy = z0 * y1;
    let expected = TruncatedPoly::new(vec![Q::zero(), &y_dz + &z_dy], 2)?;
    Ok(LeibnizTrace {
        y: y.clone(),
        z: z.clone(),
        discarded: y1 * z1,
        d_yz: d.coeff(1).clone(),
        holds: d == expected,
        y_dz,
        z_dy,
    })
}
