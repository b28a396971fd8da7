//! Complex literals of the form `a+bi`, `a-bi`, `a`, `bi`, `i`.
//!
//! Whitespace is ignored, exponents are accepted (`1e-3-2.5E2i`) and
//! non-finite values are rejected. [`format_complex`] prints the shortest
//! decimal that reparses to the same bits, so `parse(format(z)) == z`
//! exactly, including signed zeros.

use crate::error::{Error, Result};
use crate::map::OrbitSeed;
use crate::C64;

fn parse_real(text: &str, whole: &str) -> Result<f64> {
    let v: f64 = text
        .parse()
        .map_err(|_| Error::Usage(format!("invalid complex literal '{whole}'")))?;
    if !v.is_finite() {
        return Err(Error::Usage(format!(
            "non-finite complex literal '{whole}'"
        )));
    }
    Ok(v)
}

fn parse_imag_coeff(text: &str, whole: &str) -> Result<f64> {
    match text {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        t => parse_real(t, whole),
    }
}

pub fn parse_complex(input: &str) -> Result<C64> {
    let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::Usage("empty complex literal".into()));
    }
    let Some(body) = s.strip_suffix('i') else {
        return Ok(C64::new(parse_real(&s, input)?, 0.0));
    };
    // split at the last sign that is neither leading nor part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => Ok(C64::new(
            parse_real(&body[..k], input)?,
            parse_imag_coeff(&body[k..], input)?,
        )),
        None => Ok(C64::new(0.0, parse_imag_coeff(body, input)?)),
    }
}

fn format_real(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

pub fn format_complex(z: C64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}i", format_real(z.re), sign, format_real(z.im.abs()))
}

/// `z_{-1},z_0` pairs.
pub fn parse_seed(input: &str) -> Result<OrbitSeed> {
    let mut parts = input.split(',');
    match (parts.next(), parts.next(), parts.next()) {
        (Some(a), Some(b), None) => OrbitSeed::new(parse_complex(a)?, parse_complex(b)?),
        _ => Err(Error::Usage(format!(
            "seed '{input}' must be two complex literals separated by a comma"
        ))),
    }
}

/// One or more seeds separated by `;`.
pub fn parse_seed_list(input: &str) -> Result<Vec<OrbitSeed>> {
    input
        .split(';')
        .filter(|s| !s.trim().is_empty())
        .map(parse_seed)
        .collect()
}

pub fn format_seed(seed: &OrbitSeed) -> String {
    format!(
        "{},{}",
        format_complex(seed.z_minus1),
        format_complex(seed.z_0)
    )
}

fn de_error<E: serde::de::Error>(e: Error) -> E {
    E::custom(e.to_string())
}

/// Serde adapter: a single complex number as a literal string.
pub mod serde_c64 {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(z: &C64, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_complex(*z))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<C64, D::Error> {
        let text = String::deserialize(d)?;
        parse_complex(&text).map_err(de_error)
    }
}

pub mod serde_opt_c64 {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(z: &Option<C64>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match z {
            Some(z) => s.serialize_some(&format_complex(*z)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Option<C64>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|t| parse_complex(&t).map_err(de_error))
            .transpose()
    }
}

pub mod serde_vec {
    use super::*;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[C64], s: S) -> std::result::Result<S::Ok, S::Error> {
        v.iter()
            .map(|z| format_complex(*z))
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<C64>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|t| parse_complex(t).map_err(de_error))
            .collect()
    }
}

pub mod serde_pair {
    use super::*;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &(C64, C64), s: S) -> std::result::Result<S::Ok, S::Error> {
        [format_complex(v.0), format_complex(v.1)].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<(C64, C64), D::Error> {
        let [a, b] = <[String; 2]>::deserialize(d)?;
        Ok((
            parse_complex(&a).map_err(de_error)?,
            parse_complex(&b).map_err(de_error)?,
        ))
    }
}

pub mod serde_seed {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &OrbitSeed, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_seed(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<OrbitSeed, D::Error> {
        parse_seed(&String::deserialize(d)?).map_err(de_error)
    }
}

pub mod serde_seeds {
    use super::*;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[OrbitSeed], s: S) -> std::result::Result<S::Ok, S::Error> {
        v.iter().map(format_seed).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<OrbitSeed>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|t| parse_seed(t).map_err(de_error))
            .collect()
    }
}
