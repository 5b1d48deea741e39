//! Basis and target-vector text formats.
//!
//! Native format: an optional first line holding the rank `n`, then `n`
//! whitespace-separated rows of `n` integers or rationals `a/b`; each row
//! is one basis vector. fplll-style bracketed matrices `[[...][...]]` are
//! accepted on input as well.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::Basis;
use crate::{Error, Result};

fn parse_entry(tok: &str) -> Result<BigRational> {
    let parse_int = |s: &str| -> Result<BigInt> {
        s.parse::<BigInt>()
            .map_err(|_| Error::Parse(format!("cannot parse entry {tok:?}")))
    };
    if let Some((num, den)) = tok.split_once('/') {
        let d = parse_int(den)?;
        if d == BigInt::from(0) {
            return Err(Error::Parse(format!("zero denominator in {tok:?}")));
        }
        Ok(BigRational::new(parse_int(num)?, d))
    } else {
        Ok(BigRational::from(parse_int(tok)?))
    }
}

/// Parses a basis from its text form. Rows of the file are basis vectors,
/// stored as the columns of the returned [`Basis`].
pub fn parse_basis(text: &str) -> Result<Basis> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(Error::Parse("empty basis file".into()));
    }
    if trimmed.starts_with('[') {
        return parse_fplll(trimmed);
    }

    let mut tokens: Vec<&str> = trimmed.split_whitespace().collect();
    // Optional leading rank marker: a single integer n with n·n entries after it.
    if let Ok(n) = tokens[0].parse::<usize>() {
        if n >= 1 && tokens.len() == n * n + 1 {
            tokens.remove(0);
            return build(&tokens, n);
        }
    }
    let count = tokens.len();
    let n = (count as f64).sqrt().round() as usize;
    if n < 1 || n * n != count {
        return Err(Error::Parse(format!(
            "expected n*n entries for a square basis, got {count}"
        )));
    }
    build(&tokens, n)
}

fn parse_fplll(text: &str) -> Result<Basis> {
    let inner = text
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| Error::Parse("unbalanced outer brackets".into()))?;
    let mut rows = Vec::new();
    let cleaned = inner.replace(',', " ");
    for chunk in cleaned.split('[').skip(1) {
        let row_text = chunk
            .split(']')
            .next()
            .ok_or_else(|| Error::Parse("unbalanced row brackets".into()))?;
        let row: Vec<BigRational> = row_text
            .split_whitespace()
            .map(parse_entry)
            .collect::<Result<_>>()?;
        if !row.is_empty() {
            rows.push(row);
        }
    }
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Parse("bracketed basis is not square".into()));
    }
    Basis::from_columns(rows)
}

fn build(tokens: &[&str], n: usize) -> Result<Basis> {
    let mut cols = Vec::with_capacity(n);
    for r in 0..n {
        let row: Vec<BigRational> = tokens[r * n..(r + 1) * n]
            .iter()
            .map(|t| parse_entry(t))
            .collect::<Result<_>>()?;
        cols.push(row);
    }
    Basis::from_columns(cols)
}

/// Formats a basis in the native text form (rank line plus one row per
/// basis vector, integers where possible, `a/b` otherwise).
pub fn format_basis(basis: &Basis) -> String {
    let n = basis.rank();
    let mut out = String::new();
    out.push_str(&format!("{n}\n"));
    for i in 0..n {
        let row: Vec<String> = basis
            .column(i)
            .iter()
            .map(|x| {
                if x.denom().is_one() {
                    x.numer().to_string()
                } else {
                    format!("{}/{}", x.numer(), x.denom())
                }
            })
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Parses a target vector: one line of whitespace-separated integers,
/// rationals `a/b`, or decimals.
pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    let toks: Vec<&str> = text.split_whitespace().collect();
    if toks.is_empty() {
        return Err(Error::Parse("empty target vector".into()));
    }
    toks.iter()
        .map(|t| {
            if t.contains('/') {
                use num_traits::ToPrimitive;
                parse_entry(t)?.to_f64().ok_or_else(|| {
                    Error::Parse(format!("entry {t:?} is not representable as f64"))
                })
            } else {
                t.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("cannot parse coordinate {t:?}")))
            }
        })
        .collect()
}
