//! Angles and dimensioned quantities as written on the command line or in a
//! config file: `0.416pi`, `1.307`, `62us`, `30kHz`.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Unit {
    Seconds,
    Hertz,
}

/// Radians from `"<x>pi"`, `"<x>π"`, `"pi"` or a bare number of radians.
pub fn parse_theta(text: &str) -> Result<f64, String> {
    let s = text.trim().to_ascii_lowercase();
    let value = if let Some(head) = s.strip_suffix("pi").or_else(|| s.strip_suffix('π')) {
        let head = head.trim().trim_end_matches('*');
        let factor = match head {
            "" => 1.0,
            "-" => -1.0,
            h => h
                .parse::<f64>()
                .map_err(|_| format!("invalid angle `{text}`"))?,
        };
        factor * PI
    } else {
        s.parse::<f64>()
            .map_err(|_| format!("invalid angle `{text}` (use radians or e.g. 0.416pi)"))?
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("invalid angle `{text}`"))
    }
}

/// Canonical text form, in multiples of π.
pub fn format_theta(theta: f64) -> String {
    let x = ((theta / PI) * 1e12).round() / 1e12;
    format!("{x}pi")
}

pub fn parse_quantity(text: &str, unit: Unit) -> Result<f64, String> {
    let s = text.trim();
    let split = s
        .char_indices()
        .rev()
        .find(|(_, c)| c.is_ascii_digit() || *c == '.')
        .map(|(i, c)| i + c.len_utf8())
        .unwrap_or(0);
    let (number, suffix) = s.split_at(split);
    let suffix = suffix.trim().to_lowercase();
    let scale = match (unit, suffix.as_str()) {
        (Unit::Seconds, "" | "s") => 1.0,
        (Unit::Seconds, "ms") => 1e-3,
        (Unit::Seconds, "us" | "µs" | "μs") => 1e-6,
        (Unit::Seconds, "ns") => 1e-9,
        (Unit::Hertz, "" | "hz") => 1.0,
        (Unit::Hertz, "khz") => 1e3,
        (Unit::Hertz, "mhz") => 1e6,
        (Unit::Hertz, "ghz") => 1e9,
        _ => return Err(format!("unknown unit in `{text}`")),
    };
    let value: f64 = number
        .trim()
        .parse()
        .map_err(|_| format!("invalid quantity `{text}`"))?;
    if value.is_finite() {
        Ok(value * scale)
    } else {
        Err(format!("invalid quantity `{text}`"))
    }
}

/// A config-file value that is either a bare number or text with a unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Number(f64),
    Text(String),
}

impl Value {
    pub fn theta(&self) -> Result<f64, String> {
        match self {
            Value::Number(x) => Ok(*x),
            Value::Text(s) => parse_theta(s),
        }
    }

    pub fn quantity(&self, unit: Unit) -> Result<f64, String> {
        match self {
            Value::Number(x) => Ok(*x),
            Value::Text(s) => parse_quantity(s, unit),
        }
    }
}
