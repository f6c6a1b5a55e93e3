//! Numeric fields that may be written as expressions, in units of π.

use std::fmt;

use exmex::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A number or an expression string such as `"1/6"` or `"3*chi"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Number(f64),
    Expr(String),
}

impl Value {
    pub fn eval(&self) -> Result<f64> {
        match self {
            Value::Number(x) => Ok(*x),
            Value::Expr(s) => eval(s),
        }
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Number(x)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Number(x) => write!(f, "{x}"),
            Value::Expr(s) => f.write_str(s),
        }
    }
}

/// `asin(1/4)` in units of π.
pub fn chi_pi() -> f64 {
    0.25_f64.asin() / std::f64::consts::PI
}

/// Evaluates `s`; the only free variable allowed is `chi`.
pub fn eval(s: &str) -> Result<f64> {
    let err = |reason: String| Error::Expression {
        value: s.to_string(),
        reason,
    };
    let e = exmex::parse::<f64>(s).map_err(|e| err(e.to_string()))?;
    let vars: Vec<f64> = e
        .var_names()
        .iter()
        .map(|v| match v.as_str() {
            "chi" => Ok(chi_pi()),
            other => Err(err(format!("unknown variable `{other}`"))),
        })
        .collect::<Result<_>>()?;
    let x = e.eval(&vars).map_err(|e| err(e.to_string()))?;
    if !x.is_finite() {
        return Err(err("not a finite number".into()));
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fractions_and_functions() {
        assert_eq!(eval("1/6").unwrap(), 1.0 / 6.0);
        assert_eq!(eval("-1/2").unwrap(), -0.5);
        assert!((eval("3*chi").unwrap() - 0.2413).abs() < 1e-4);
        assert!((eval("asin((14+sqrt(31))/20)/PI").unwrap() - 0.4337).abs() < 1e-4);
    }

    #[test]
    fn rejects_unknown_names() {
        assert!(eval("2*theta").is_err());
        assert!(eval("1/").is_err());
        assert!(eval("sqrt(-1)").is_err());
    }
}
