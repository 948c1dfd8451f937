//! Entropy cost functions: the Bernoulli relative entropy `I_p` and its
//! sparse limit `h(x) = x log x − x + 1`, with first and second derivatives.
//!
//! Endpoint conventions follow the limits: `0 log 0 = 0`, so
//! `I_p(0) = log(1/(1−p))`, `I_p(1) = log(1/p)` and `h(0) = 1`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Derivative order requested from an entropy function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Order {
    Value,
    First,
    Second,
}

impl TryFrom<u8> for Order {
    type Error = Error;

    fn try_from(k: u8) -> Result<Self> {
        match k {
            0 => Ok(Order::Value),
            1 => Ok(Order::First),
            2 => Ok(Order::Second),
            _ => Err(invalid(format!("derivative order {k} not supported"))),
        }
    }
}

/// `x log x` with the limit value 0 at `x = 0`.
#[inline]
pub fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// The entropy cost of a graphon value: either `I_p` for a fixed edge
/// probability `p`, or the sparse limit `h`.
///
/// The methods here are unchecked and return `±inf` at the log singularities;
/// [`relative_entropy`] and [`sparse_entropy`] are the checked entry points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Entropy {
    FiniteP { p: f64 },
    Sparse,
}

impl Entropy {
    pub fn finite(p: f64) -> Result<Self> {
        if p > 0.0 && p < 1.0 {
            Ok(Entropy::FiniteP { p })
        } else {
            Err(invalid(format!("p = {p} must lie in (0, 1)")))
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match *self {
            Entropy::FiniteP { p } => {
                let a = if x == 0.0 { 0.0 } else { x * (x / p).ln() };
                let b = if x == 1.0 {
                    0.0
                } else {
                    (1.0 - x) * ((-x).ln_1p() - (-p).ln_1p())
                };
                a + b
            }
            Entropy::Sparse => xlogx(x) - x + 1.0,
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match *self {
            Entropy::FiniteP { p } => (x / p).ln() - ((-x).ln_1p() - (-p).ln_1p()),
            Entropy::Sparse => x.ln(),
        }
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        match *self {
            Entropy::FiniteP { .. } => 1.0 / (x * (1.0 - x)),
            Entropy::Sparse => 1.0 / x,
        }
    }

    pub fn eval(&self, x: f64, order: Order) -> f64 {
        match order {
            Order::Value => self.value(x),
            Order::First => self.derivative(x),
            Order::Second => self.second_derivative(x),
        }
    }

    /// Upper end of the value range a lower-tail minimizer can use: `p` for
    /// `I_p` (it increases past `p`), `1` for `h`.
    pub fn upper_value(&self) -> f64 {
        match *self {
            Entropy::FiniteP { p } => p,
            Entropy::Sparse => 1.0,
        }
    }
}

/// Checked `I_p(x)` and derivatives.
pub fn relative_entropy(p: f64, x: f64, order: Order) -> Result<f64> {
    let ent = Entropy::finite(p)?;
    let ok = match order {
        Order::Value => (0.0..=1.0).contains(&x),
        Order::First | Order::Second => x > 0.0 && x < 1.0,
    };
    if !ok {
        let (lo, hi) = if order == Order::Value {
            (0.0, 1.0)
        } else {
            (f64::MIN_POSITIVE, 1.0 - f64::EPSILON)
        };
        return Err(Error::Domain {
            what: "relative entropy",
            x,
            lo,
            hi,
        });
    }
    Ok(ent.eval(x, order))
}

/// Checked `h(x)` and derivatives.
pub fn sparse_entropy(x: f64, order: Order) -> Result<f64> {
    let ok = match order {
        Order::Value => x >= 0.0,
        Order::First | Order::Second => x > 0.0,
    };
    if !ok || x.is_nan() {
        return Err(Error::Domain {
            what: "sparse entropy",
            x,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    Ok(Entropy::Sparse.eval(x, order))
}
