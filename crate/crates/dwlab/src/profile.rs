//! Coefficient profiles for the damping `a` and potential `q`.

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use serde::{Deserialize, Serialize};

/// Closed-form nonnegative coefficient profiles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Profile {
    /// `a(x) = c`
    Constant(f64),
    /// `a(x) = |x|^beta`
    Power { beta: f64 },
    /// `a(x) = <x>^beta = (1 + x^2)^{beta/2}`
    Bracket { beta: f64 },
    /// `a(x) = 2 x^2`
    Quadratic,
    /// `a(x) = x^2 + 1`
    ShiftedQuadratic,
    /// Indicator composite: `a = floor + bump` on `(-1, 1)`, `a = floor` outside.
    /// Requires `floor > 0` (uniform positivity away from the window) and
    /// `bump + floor > 0` (positive mass inside).
    Composite { bump: f64, floor: f64 },
}

impl Profile {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Profile::Constant(c) if c < 0.0 || !c.is_finite() => Err(Error::validation(format!(
                "constant profile must be nonnegative, got {c}"
            ))),
            Profile::Power { beta } | Profile::Bracket { beta } if beta <= 0.0 => Err(
                Error::validation(format!("profile exponent must be positive, got {beta}")),
            ),
            Profile::Composite { bump, floor } => {
                if floor <= 0.0 {
                    return Err(Error::validation(format!(
                        "composite floor must be positive, got {floor}"
                    )));
                }
                if bump + floor <= 0.0 {
                    return Err(Error::validation(
                        "composite profile must carry positive mass on (-1, 1)",
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Profile::Constant(c) => c,
            Profile::Power { beta } => x.abs().powf(beta),
            Profile::Bracket { beta } => (1.0 + x * x).powf(beta / 2.0),
            Profile::Quadratic => 2.0 * x * x,
            Profile::ShiftedQuadratic => x * x + 1.0,
            Profile::Composite { bump, floor } => {
                if x.abs() < 1.0 {
                    floor + bump
                } else {
                    floor
                }
            }
        }
    }

    /// Pointwise infimum over the line, used for spectral bounds.
    pub fn essential_infimum(&self) -> f64 {
        match *self {
            Profile::Constant(c) => c,
            Profile::Power { .. } | Profile::Quadratic => 0.0,
            Profile::Bracket { .. } | Profile::ShiftedQuadratic => 1.0,
            Profile::Composite { bump, floor } => floor.min(floor + bump),
        }
    }

    /// Parse a CLI profile code such as `const1`, `quad2`, `x2p1`,
    /// `const:0.5`, `pow:2`, `bracket:2`, `comp:3:1`.
    pub fn parse(code: &str) -> Result<Profile> {
        let p = match code {
            "const1" => Profile::Constant(1.0),
            "const0" | "zero" => Profile::Constant(0.0),
            "quad2" => Profile::Quadratic,
            "x2p1" => Profile::ShiftedQuadratic,
            _ => {
                let mut parts = code.split(':');
                let head = parts.next().unwrap_or_default();
                let args: Vec<&str> = parts.collect();
                let num = |s: &str| -> Result<f64> {
                    s.parse::<f64>()
                        .map_err(|_| Error::validation(format!("bad profile parameter {s:?}")))
                };
                match (head, args.as_slice()) {
                    ("const", [c]) => Profile::Constant(num(c)?),
                    ("pow", [b]) => Profile::Power { beta: num(b)? },
                    ("bracket", [b]) => Profile::Bracket { beta: num(b)? },
                    ("comp", [bump, floor]) => Profile::Composite {
                        bump: num(bump)?,
                        floor: num(floor)?,
                    },
                    _ => {
                        return Err(Error::validation(format!(
                            "unknown profile code {code:?}"
                        )))
                    }
                }
            }
        };
        p.validate()?;
        Ok(p)
    }
}

/// A profile sampled at the nodes of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientField {
    pub profile: Profile,
    pub values: Vec<f64>,
}

pub fn sample_coefficient(profile: Profile, grid: &Grid1D) -> Result<CoefficientField> {
    profile.validate()?;
    let values: Vec<f64> = (0..grid.len()).map(|i| profile.eval(grid.node(i))).collect();
    debug_assert!(values.iter().all(|&v| v >= 0.0));
    Ok(CoefficientField { profile, values })
}
