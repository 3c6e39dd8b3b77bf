//! Signal values: decimal numbers with an optional unit tag, symbolic atoms,
//! and the distinguished `invalid` value.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::model::Identifier;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number { value: f64, unit: Option<String> },
    Symbol(Identifier),
    Invalid,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("`{0}` is not a signal value")]
pub struct ValueError(pub String);

impl Value {
    pub fn number(value: f64) -> Value {
        Value::Number { value, unit: None }
    }

    pub fn with_unit(value: f64, unit: &str) -> Value {
        Value::Number {
            value,
            unit: Some(unit.to_string()),
        }
    }

    pub fn symbol(name: &str) -> Value {
        Value::Symbol(Identifier::new(name).expect("valid symbol"))
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self, Value::Number { .. })
    }

    pub fn is_symbolic(&self) -> bool {
        matches!(self, Value::Symbol(_))
    }

    /// Ordering between two numbers carrying the same unit tag. `None` for
    /// every other combination.
    pub fn numeric_cmp(&self, other: &Value) -> Option<Ordering> {
        match (self, other) {
            (
                Value::Number { value: a, unit: ua },
                Value::Number { value: b, unit: ub },
            ) if ua == ub => a.partial_cmp(b),
            _ => None,
        }
    }
}

pub(crate) fn is_unit_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '%'
}

pub(crate) fn is_unit_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '%' | '/' | '_')
}

/// Splits `12.5km/h` into its number and unit parts.
pub(crate) fn split_number(text: &str) -> Option<(f64, Option<&str>)> {
    let bytes = text.as_bytes();
    let mut i = 0;
    if bytes.first() == Some(&b'-') {
        i = 1;
    }
    let digits_start = i;
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        i += 1;
    }
    if i == digits_start {
        return None;
    }
    if i < bytes.len() && bytes[i] == b'.' {
        let frac_start = i + 1;
        let mut j = frac_start;
        while j < bytes.len() && bytes[j].is_ascii_digit() {
            j += 1;
        }
        if j == frac_start {
            return None;
        }
        i = j;
    }
    let value: f64 = text[..i].parse().ok()?;
    let unit = &text[i..];
    if unit.is_empty() {
        return Some((value, None));
    }
    let mut chars = unit.chars();
    if !chars.next().is_some_and(is_unit_start) || !chars.all(is_unit_char) {
        return None;
    }
    Some((value, Some(unit)))
}

impl FromStr for Value {
    type Err = ValueError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "invalid" {
            return Ok(Value::Invalid);
        }
        if let Some((value, unit)) = split_number(s) {
            return Ok(Value::Number {
                value,
                unit: unit.map(str::to_string),
            });
        }
        Identifier::new(s)
            .map(Value::Symbol)
            .map_err(|_| ValueError(s.to_string()))
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Number { value, unit } => {
                write!(f, "{value}")?;
                if let Some(unit) = unit {
                    f.write_str(unit)?;
                }
                Ok(())
            }
            Value::Symbol(s) => f.write_str(s.as_str()),
            Value::Invalid => f.write_str("invalid"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_numbers_units_symbols() {
        assert_eq!("12km/h".parse::<Value>().unwrap(), Value::with_unit(12.0, "km/h"));
        assert_eq!("-3.25".parse::<Value>().unwrap(), Value::number(-3.25));
        assert_eq!("Close".parse::<Value>().unwrap(), Value::symbol("Close"));
        assert_eq!("invalid".parse::<Value>().unwrap(), Value::Invalid);
        assert!("12.".parse::<Value>().is_err());
        assert!("12km h".parse::<Value>().is_err());
        assert!("".parse::<Value>().is_err());
    }

    #[test]
    fn display_round_trips() {
        for text in ["10", "0.1", "12km/h", "-7.5%", "Open", "invalid"] {
            let v: Value = text.parse().unwrap();
            assert_eq!(v.to_string(), text);
        }
    }

    #[test]
    fn units_must_match_for_ordering() {
        let a = Value::with_unit(5.0, "km/h");
        assert_eq!(a.numeric_cmp(&Value::with_unit(10.0, "km/h")), Some(Ordering::Less));
        assert_eq!(a.numeric_cmp(&Value::number(10.0)), None);
        assert_eq!(a.numeric_cmp(&Value::Invalid), None);
    }
}
