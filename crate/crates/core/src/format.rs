//! Line-oriented text formats for algebras (`.rla`) and candidate bases (`.fmb`).
//!
//! ```text
//! # Heisenberg algebra in characteristic 2
//! field = F2
//! dim = 3
//! names = a b c
//! bracket a b = c
//! pmap a = 0
//! ```
//!
//! Omitted brackets and `p`-map values are zero. Scalars use the field's own
//! syntax, e.g. `(t^2+1)*z` over `F2(t)`.

use std::fmt::Write as _;

use thiserror::Error;

use crate::env::{split_top_level, EnvAlgebra, EnvElement};
use crate::field::{split_signed, Field, FieldError, PrimeField, RationalFunctionField};
use crate::liealg::{LieElement, LieError, RestrictedLieAlgebra};
use crate::linalg::Vector;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing `{0}` line")]
    Missing(&'static str),
    #[error("dim = {dim} but {names} names given")]
    NameCount { dim: usize, names: usize },
    #[error(transparent)]
    Invalid(#[from] LieError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

fn at(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Parse {
        line,
        message: message.into(),
    }
}

/// An algebra over whichever field its file names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnyAlgebra {
    Prime(RestrictedLieAlgebra<PrimeField>),
    RatFunc(RestrictedLieAlgebra<RationalFunctionField>),
}

/// Runs `$body` with `$alg` bound to the concrete algebra inside an [`AnyAlgebra`].
#[macro_export]
macro_rules! with_algebra {
    ($any:expr, $alg:ident => $body:expr) => {
        match $any {
            $crate::format::AnyAlgebra::Prime($alg) => $body,
            $crate::format::AnyAlgebra::RatFunc($alg) => $body,
        }
    };
}

impl AnyAlgebra {
    pub fn field_name(&self) -> String {
        with_algebra!(self, a => a.field().name())
    }

    pub fn dim(&self) -> usize {
        with_algebra!(self, a => a.dim())
    }

    pub fn render(&self) -> String {
        with_algebra!(self, a => render_algebra(a))
    }
}

/// Strips a trailing `#` comment and surrounding whitespace.
fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

fn parse_field_spec(spec: &str) -> Option<(u32, bool)> {
    let rest = spec.strip_prefix('F')?;
    let (digits, ratfunc) = match rest.strip_suffix("(t)") {
        Some(d) => (d, true),
        None => (rest, false),
    };
    Some((digits.parse().ok()?, ratfunc))
}

pub fn parse_algebra(text: &str) -> Result<AnyAlgebra, FormatError> {
    let field_line = text
        .lines()
        .enumerate()
        .find_map(|(i, l)| {
            let l = strip_comment(l);
            let (key, value) = l.split_once('=')?;
            (key.trim() == "field").then(|| (i + 1, value.trim().to_string()))
        })
        .ok_or(FormatError::Missing("field"))?;
    let (line, spec) = field_line;
    let (p, ratfunc) = parse_field_spec(&spec).ok_or_else(|| at(line, format!("unknown field `{spec}`")))?;
    if ratfunc {
        let f = RationalFunctionField::new(p).map_err(|e| at(line, e.to_string()))?;
        Ok(AnyAlgebra::RatFunc(parse_algebra_over(f, text)?))
    } else {
        let f = PrimeField::new(p).map_err(|e| at(line, e.to_string()))?;
        Ok(AnyAlgebra::Prime(parse_algebra_over(f, text)?))
    }
}

/// Parses a file whose `field` line must name `field`.
pub fn parse_algebra_over<F: Field>(field: F, text: &str) -> Result<RestrictedLieAlgebra<F>, FormatError> {
    let mut dim: Option<usize> = None;
    let mut names: Option<Vec<String>> = None;
    let mut brackets: Vec<(usize, (usize, usize), bool, String)> = Vec::new();
    let mut pmaps: Vec<(usize, usize, String)> = Vec::new();
    let mut pending_brackets: Vec<(usize, String, String, String)> = Vec::new();
    let mut pending_pmaps: Vec<(usize, String, String)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = strip_comment(raw);
        if l.is_empty() {
            continue;
        }
        let (lhs, rhs) = l
            .split_once('=')
            .ok_or_else(|| at(line, format!("expected `key = value`, found `{l}`")))?;
        let words: Vec<&str> = lhs.split_whitespace().collect();
        let rhs = rhs.trim().to_string();
        match words.as_slice() {
            ["field"] => {
                if rhs != field.name() {
                    return Err(at(line, format!("field `{rhs}` does not match {}", field.name())));
                }
            }
            ["dim"] => {
                let d = rhs.parse().map_err(|_| at(line, format!("bad dimension `{rhs}`")))?;
                if d == 0 {
                    return Err(at(line, "dimension must be positive"));
                }
                dim = Some(d);
            }
            ["names"] => {
                let list: Vec<String> = rhs.split_whitespace().map(String::from).collect();
                for n in &list {
                    if !is_identifier(n) {
                        return Err(at(line, format!("`{n}` is not an identifier")));
                    }
                }
                names = Some(list);
            }
            ["bracket", a, b] => pending_brackets.push((line, a.to_string(), b.to_string(), rhs)),
            ["pmap", a] => pending_pmaps.push((line, a.to_string(), rhs)),
            _ => return Err(at(line, format!("unrecognised line `{l}`"))),
        }
    }
    let names = names.ok_or(FormatError::Missing("names"))?;
    let dim = dim.ok_or(FormatError::Missing("dim"))?;
    if names.len() != dim {
        return Err(FormatError::NameCount {
            dim,
            names: names.len(),
        });
    }
    let lookup = |line: usize, n: &str| {
        names
            .iter()
            .position(|x| x == n)
            .ok_or_else(|| at(line, format!("unknown basis element `{n}`")))
    };
    for (line, a, b, rhs) in pending_brackets {
        let (i, j) = (lookup(line, &a)?, lookup(line, &b)?);
        if i == j {
            return Err(at(line, format!("[{a}, {a}] is always zero and cannot be assigned")));
        }
        let key = (i.min(j), i.max(j));
        if brackets.iter().any(|(_, k, _, _)| *k == key) {
            return Err(at(line, format!("bracket of {a} and {b} given twice")));
        }
        // stored as [x_lo, x_hi], negated when written the other way round
        brackets.push((line, key, i > j, rhs));
    }
    for (line, a, rhs) in pending_pmaps {
        let i = lookup(line, &a)?;
        if pmaps.iter().any(|(_, k, _)| *k == i) {
            return Err(at(line, format!("p-map of {a} given twice")));
        }
        pmaps.push((line, i, rhs));
    }

    let mut bracket_table = Vec::new();
    for (line, key, flip, rhs) in brackets {
        let mut v = parse_lincomb(&field, &names, &rhs).map_err(|m| at(line, m))?;
        if flip {
            v = v.iter().map(|c| field.neg(c)).collect();
        }
        bracket_table.push((key, v));
    }
    let mut pmap_table = vec![vec![field.zero(); dim]; dim];
    for (line, i, rhs) in pmaps {
        pmap_table[i] = parse_lincomb(&field, &names, &rhs).map_err(|m| at(line, m))?;
    }
    Ok(RestrictedLieAlgebra::new(field, names, bracket_table, pmap_table)?)
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
        && s != "t"
}

/// Parses `±c*id ± …`; `0` is the zero vector.
pub fn parse_lincomb<F: Field>(field: &F, names: &[String], s: &str) -> Result<Vector<F>, String> {
    let body: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let mut v = vec![field.zero(); names.len()];
    if body == "0" {
        return Ok(v);
    }
    if body.is_empty() {
        return Err("empty right-hand side".into());
    }
    for (neg, term) in split_signed(&body)? {
        let mut coef = field.one();
        let mut target = None;
        for factor in split_top_level(term, '*') {
            if let Some(k) = names.iter().position(|n| n == factor) {
                if target.replace(k).is_some() {
                    return Err(format!("term `{term}` is not linear"));
                }
            } else {
                let c = field.parse(factor).map_err(|e| e.to_string())?;
                coef = field.mul(&coef, &c);
            }
        }
        let k = target.ok_or_else(|| format!("term `{term}` names no basis element"))?;
        if neg {
            coef = field.neg(&coef);
        }
        v[k] = field.add(&v[k], &coef);
    }
    Ok(v)
}

/// Canonical text: every nonzero bracket `[x_i, x_j]` with `i < j` and every
/// nonzero `p`-map value, in basis order.
pub fn render_algebra<F: Field>(alg: &RestrictedLieAlgebra<F>) -> String {
    let f = alg.field();
    let mut out = String::new();
    let _ = writeln!(out, "field = {}", f.name());
    let _ = writeln!(out, "dim = {}", alg.dim());
    let _ = writeln!(out, "names = {}", alg.names().join(" "));
    for i in 0..alg.dim() {
        for j in i + 1..alg.dim() {
            let v = alg.bracket_basis(i, j);
            if v.iter().any(|c| !f.is_zero(c)) {
                let rhs = alg.render(&LieElement::new(v.clone()));
                let _ = writeln!(out, "bracket {} {} = {}", alg.names()[i], alg.names()[j], rhs);
            }
        }
    }
    for i in 0..alg.dim() {
        let v = alg.pmap_basis(i);
        if v.iter().any(|c| !f.is_zero(c)) {
            let rhs = alg.render(&LieElement::new(v.clone()));
            let _ = writeln!(out, "pmap {} = {}", alg.names()[i], rhs);
        }
    }
    out
}

/// One element per non-blank line, in the element syntax of [`EnvAlgebra::render`].
pub fn parse_basis<F: Field>(env: &EnvAlgebra<F>, text: &str) -> Result<Vec<EnvElement<F>>, FormatError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let l = strip_comment(raw);
        if l.is_empty() {
            continue;
        }
        out.push(env.parse_element(l).map_err(|e| at(i + 1, e.to_string()))?);
    }
    Ok(out)
}

pub fn render_basis<F: Field>(env: &EnvAlgebra<F>, basis: &[EnvElement<F>]) -> String {
    basis.iter().map(|b| env.render(b) + "\n").collect()
}
