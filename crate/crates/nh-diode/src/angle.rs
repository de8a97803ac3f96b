//! Angles given as radians (`1.0472`) or as multiples of π (`2pi/3`,
//! `-pi/3`, `0.5pi`, `3*pi/4`, `π/6`).

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub fn parse_angle(text: &str) -> Result<f64, String> {
    let s: String = text
        .trim()
        .to_lowercase()
        .replace('π', "pi")
        .split_whitespace()
        .collect();
    let bad = || format!("invalid angle '{text}' (expected radians or e.g. 2pi/3)");
    let value = if let Some((coef, rest)) = s.split_once("pi") {
        let coef = coef.strip_suffix('*').unwrap_or(coef);
        let c = match coef {
            "" | "+" => 1.0,
            "-" => -1.0,
            _ => coef.parse::<f64>().map_err(|_| bad())?,
        };
        let d = match rest {
            "" => 1.0,
            _ => rest
                .strip_prefix('/')
                .ok_or_else(bad)?
                .parse::<f64>()
                .map_err(|_| bad())?,
        };
        if d == 0.0 {
            return Err(bad());
        }
        c * PI / d
    } else if let Some((n, d)) = s.split_once('/') {
        let n: f64 = n.parse().map_err(|_| bad())?;
        let d: f64 = d.parse().map_err(|_| bad())?;
        if d == 0.0 {
            return Err(bad());
        }
        n / d
    } else {
        s.parse().map_err(|_| bad())?
    };
    if !value.is_finite() {
        return Err(bad());
    }
    Ok(value)
}

/// An angle in radians that deserializes from a number or a string.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Angle(pub f64);

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.0)
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(Angle(x)),
            Raw::Text(t) => parse_angle(&t).map(Angle).map_err(serde::de::Error::custom),
        }
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
