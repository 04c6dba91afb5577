//! Text formats: field description files and digit strings.
//!
//! Both parsers are total (they return errors, never panic) and enforce hard
//! size caps, so they are safe to expose to untrusted input; the fuzz targets
//! under `fuzz/` exercise exactly these two entry points.
//!
//! # Field files
//!
//! Line-oriented `key = value` pairs; `#` starts a comment. Keys:
//!
//! ```text
//! p               = 3                       # odd prime
//! residue_poly    = [2, 2, 1]               # monic, little-endian over Z
//! eisenstein_poly = [3, 3, 1]               # little-endian; entries are either
//!                                           # integers or [c0, c1, ...] vectors
//!                                           # over omega-powers
//! precision       = 14                      # optional
//! ```
//!
//! # Digit strings
//!
//! An element Σ teich(d_h)·π^h is written `h:c0,c1,...` per digit with terms
//! separated by `;`, where `c0, c1, ...` are the 𝔽_p-coordinates of d_h in the
//! ω-power basis (trailing zeros may be omitted). Example: `1:1;3:0,2` means
//! teich(ω̄·2)·π³ + teich(1)·π. The literal `0` denotes zero.

use crate::error::{Error, Result};
use crate::padic::{Field, FieldSpec, FqElt, PadicElement};

const MAX_LIST: usize = 64;
const MAX_LEVEL: i64 = 10_000;
const MAX_INT: i64 = 1 << 40;

fn parse_i64(s: &str) -> Result<i64> {
    let t = s.trim();
    if t.is_empty() {
        return Err(Error::config("empty integer"));
    }
    let v: i64 = t.parse().map_err(|_| Error::config(format!("invalid integer `{t}`")))?;
    if v.abs() > MAX_INT {
        return Err(Error::config(format!("integer `{t}` out of supported range")));
    }
    Ok(v)
}

/// Parses `[a, b, c]` into a vector of bounded integers.
fn parse_int_list(s: &str) -> Result<Vec<i64>> {
    let t = s.trim();
    let inner = t
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| Error::config(format!("expected a [..] list, got `{t}`")))?;
    let inner = inner.trim();
    if inner.is_empty() {
        return Err(Error::config("empty list"));
    }
    let parts: Vec<&str> = inner.split(',').collect();
    if parts.len() > MAX_LIST {
        return Err(Error::config("list too long"));
    }
    parts.iter().map(|p| parse_i64(p)).collect()
}

/// Parses an Eisenstein coefficient entry: either an integer or a `[..]` list.
fn parse_coeff_entry(s: &str) -> Result<Vec<i64>> {
    let t = s.trim();
    if t.starts_with('[') {
        parse_int_list(t)
    } else {
        Ok(vec![parse_i64(t)?])
    }
}

/// Splits a top-level bracketed list on commas that are not nested in `[..]`.
fn split_top_level(s: &str) -> Result<Vec<String>> {
    let t = s.trim();
    let inner = t
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| Error::config(format!("expected a [..] list, got `{t}`")))?;
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in inner.chars() {
        match ch {
            '[' => {
                depth += 1;
                cur.push(ch);
            }
            ']' => {
                depth -= 1;
                if depth < 0 {
                    return Err(Error::config("unbalanced brackets"));
                }
                cur.push(ch);
            }
            ',' if depth == 0 => {
                parts.push(std::mem::take(&mut cur));
            }
            _ => cur.push(ch),
        }
        if parts.len() > MAX_LIST {
            return Err(Error::config("list too long"));
        }
    }
    if depth != 0 {
        return Err(Error::config("unbalanced brackets"));
    }
    if !cur.trim().is_empty() || parts.is_empty() {
        parts.push(cur);
    }
    Ok(parts)
}

/// Parses a field description file into a [`FieldSpec`].
pub fn parse_field_spec(text: &str) -> Result<FieldSpec> {
    if text.len() > 1 << 16 {
        return Err(Error::config("field file too large"));
    }
    let mut p: Option<u64> = None;
    let mut residue_poly: Option<Vec<i64>> = None;
    let mut eisenstein_poly: Option<Vec<Vec<i64>>> = None;
    let mut precision: Option<i64> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::config(format!("line {}: expected `key = value`", lineno + 1)))?;
        let key = key.trim();
        let value = value.trim();
        let dup = |name: &str| Error::config(format!("line {}: duplicate key `{name}`", lineno + 1));
        match key {
            "p" => {
                if p.is_some() {
                    return Err(dup("p"));
                }
                let v = parse_i64(value)?;
                if !(3..=1000).contains(&v) {
                    return Err(Error::config(format!("p = {v} out of supported range")));
                }
                if !crate::padic::fq::is_prime(v as u64) {
                    return Err(Error::config(format!("p = {v} is not prime")));
                }
                p = Some(v as u64);
            }
            "residue_poly" => {
                if residue_poly.is_some() {
                    return Err(dup("residue_poly"));
                }
                residue_poly = Some(parse_int_list(value)?);
            }
            "eisenstein_poly" => {
                if eisenstein_poly.is_some() {
                    return Err(dup("eisenstein_poly"));
                }
                let entries = split_top_level(value)?;
                let coeffs: Result<Vec<Vec<i64>>> =
                    entries.iter().map(|e| parse_coeff_entry(e)).collect();
                eisenstein_poly = Some(coeffs?);
            }
            "precision" => {
                if precision.is_some() {
                    return Err(dup("precision"));
                }
                let v = parse_i64(value)?;
                if !(1..=MAX_LEVEL).contains(&v) {
                    return Err(Error::config(format!("precision = {v} out of supported range")));
                }
                precision = Some(v);
            }
            other => {
                return Err(Error::config(format!("line {}: unknown key `{other}`", lineno + 1)));
            }
        }
    }
    Ok(FieldSpec {
        p: p.ok_or_else(|| Error::config("missing key `p`"))?,
        residue_poly: residue_poly.ok_or_else(|| Error::config("missing key `residue_poly`"))?,
        eisenstein_poly: eisenstein_poly
            .ok_or_else(|| Error::config("missing key `eisenstein_poly`"))?,
        precision,
    })
}

/// A parsed digit string, independent of any field: (level, coefficient
/// vector of the residue digit, not yet reduced mod p).
pub type RawDigits = Vec<(i64, Vec<i64>)>;

/// Parses a digit string into raw (level, coefficients) terms.
pub fn parse_digit_terms(text: &str) -> Result<RawDigits> {
    let t = text.trim();
    if t.len() > 1 << 14 {
        return Err(Error::config("digit string too large"));
    }
    if t.is_empty() {
        return Err(Error::config("empty digit string"));
    }
    if t == "0" {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for term in t.split(';') {
        let term = term.trim();
        if term.is_empty() {
            return Err(Error::config("empty digit term"));
        }
        let (level_s, coeffs_s) = term
            .split_once(':')
            .ok_or_else(|| Error::config(format!("digit term `{term}` must be `level:coeffs`")))?;
        let level = parse_i64(level_s)?;
        if !(0..=MAX_LEVEL).contains(&level) {
            return Err(Error::config(format!("digit level {level} out of range")));
        }
        let coeffs: Result<Vec<i64>> = coeffs_s.split(',').map(parse_i64).collect();
        let coeffs = coeffs?;
        if coeffs.is_empty() || coeffs.len() > MAX_LIST {
            return Err(Error::config("digit coefficient list has unsupported length"));
        }
        if out.len() >= MAX_LIST {
            return Err(Error::config("too many digit terms"));
        }
        out.push((level, coeffs));
    }
    out.sort_by_key(|(h, _)| *h);
    for w in out.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(Error::config(format!("duplicate digit level {}", w[0].0)));
        }
    }
    Ok(out)
}

/// Interprets raw digits in a field, producing Σ teich(d_h)·π^h.
pub fn digits_to_element(field: &Field, raw: &RawDigits) -> Result<PadicElement> {
    let mut terms: Vec<(i64, FqElt)> = Vec::with_capacity(raw.len());
    for (h, coeffs) in raw {
        if coeffs.len() > field.f {
            return Err(Error::config(format!(
                "digit at level {h} has {} coordinates but f = {}",
                coeffs.len(),
                field.f
            )));
        }
        let mut d = field.residue_field().zero();
        for (j, &c) in coeffs.iter().enumerate() {
            d[j] = c.rem_euclid(field.p as i64) as u64;
        }
        terms.push((*h, d));
    }
    field.from_digit_terms(&terms)
}

/// Parses a digit string directly into an element of 𝒪_K.
pub fn parse_element(field: &Field, text: &str) -> Result<PadicElement> {
    digits_to_element(field, &parse_digit_terms(text)?)
}

/// Formats an element as a digit string (inverse of [`parse_element`] up to
/// precision `limit`).
pub fn format_element(field: &Field, x: &PadicElement, limit: i64) -> Result<String> {
    let digits = field.digit_expansion(x, limit)?;
    if digits.is_empty() {
        return Ok("0".to_string());
    }
    let mut parts = Vec::with_capacity(digits.len());
    for (h, d) in digits {
        let mut coeffs: Vec<String> = d.iter().map(|c| c.to_string()).collect();
        while coeffs.len() > 1 && coeffs.last().map(|s| s == "0").unwrap_or(false) {
            coeffs.pop();
        }
        parts.push(format!("{h}:{}", coeffs.join(",")));
    }
    Ok(parts.join(";"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::testutil::std_field;

    #[test]
    fn parses_a_complete_field_file() {
        let text = "\
# Q_9(zeta_3)
p = 3
residue_poly = [2, 2, 1]
eisenstein_poly = [3, 3, 1]
precision = 9
";
        let spec = parse_field_spec(text).unwrap();
        assert_eq!(spec.p, 3);
        assert_eq!(spec.residue_poly, vec![2, 2, 1]);
        assert_eq!(spec.eisenstein_poly, vec![vec![3], vec![3], vec![1]]);
        assert_eq!(spec.precision, Some(9));
        assert!(Field::new(&spec).is_ok());
    }

    #[test]
    fn parses_nested_eisenstein_coefficients() {
        let text = "p = 3\nresidue_poly = [2, 2, 1]\neisenstein_poly = [[3, 3], 3, 1]\n";
        let spec = parse_field_spec(text).unwrap();
        assert_eq!(spec.eisenstein_poly, vec![vec![3, 3], vec![3], vec![1]]);
    }

    #[test]
    fn rejects_malformed_field_files() {
        for bad in [
            "",
            "p = 3",
            "p = 4\nresidue_poly = [2,2,1]\neisenstein_poly = [3,3,1]",
            "p = 3\np = 3\nresidue_poly = [2,2,1]\neisenstein_poly = [3,3,1]",
            "p = 3\nresidue_poly = [2,2,1]\neisenstein_poly = [3,3,1]\nbogus = 1",
            "p = 3\nresidue_poly = [2,2,1\neisenstein_poly = [3,3,1]",
            "p = 3\nresidue_poly = []\neisenstein_poly = [3,3,1]",
            "p = 3\nresidue_poly = [2,2,1]\neisenstein_poly = [[3,[3]],3,1]",
            "p = 99999999999999\nresidue_poly = [2,2,1]\neisenstein_poly = [3,3,1]",
        ] {
            assert!(parse_field_spec(bad).is_err(), "should reject: {bad:?}");
        }
    }

    #[test]
    fn digit_string_roundtrip() {
        let k = std_field();
        for s in ["1:1", "1:1;3:0,2", "0:2;2:1,1;5:2", "0"] {
            let x = parse_element(&k, s).unwrap();
            let back = format_element(&k, &x, k.n_prec).unwrap();
            assert_eq!(back, s, "digit string should round-trip canonically");
        }
    }

    #[test]
    fn rejects_malformed_digit_strings() {
        for bad in ["", ";", "1:", "x:1", "1:1;;2:1", "1:1;1:2", "-1:1", "20000:1", "1:1,2,3"] {
            let parsed = parse_digit_terms(bad);
            let k = std_field();
            let as_elt = parsed.and_then(|raw| digits_to_element(&k, &raw));
            assert!(as_elt.is_err(), "should reject digit string {bad:?}");
        }
    }

    #[test]
    fn digit_values_reduce_mod_p() {
        let k = std_field();
        let a = parse_element(&k, "2:4,-1").unwrap();
        let b = parse_element(&k, "2:1,2").unwrap();
        assert!(k.eq_mod(&a, &b, k.n_prec).unwrap());
    }
}
