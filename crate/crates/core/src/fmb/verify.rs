//! Checking a candidate filtered multiplicative basis.

use std::collections::HashMap;

use crate::env::EnvElement;
use crate::field::Field;
use crate::filtration::Analysis;
use crate::linalg::{IncrementalEchelon, Subspace};

use super::FmbError;

/// Everything the verifier found out about a candidate basis.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VerifyReport {
    pub contains_one: bool,
    /// The candidate spans `u(L)` (it already has the right size).
    pub independent: bool,
    /// Index pairs `(i, j)` with `b_i b_j` neither 0 nor in the candidate.
    pub closure_violations: Vec<(usize, usize)>,
    /// `m` such that the candidate elements lying in `ω^m` do not span `ω^m`.
    /// A failure at `m = 1` means the radical condition fails.
    pub filtration_failures: Vec<usize>,
    /// `(i, j, m)`: distinct `b_i, b_j` outside `ω^m` that agree modulo `ω^m`.
    pub congruence_collisions: Vec<(usize, usize, usize)>,
}

impl VerifyReport {
    /// The defining conditions: `1` in the basis, a basis of `u(L)`, closed
    /// under products up to 0, and its intersection with `ω` a basis of `ω`.
    pub fn is_valid(&self) -> bool {
        self.contains_one
            && self.independent
            && self.closure_violations.is_empty()
            && !self.filtration_failures.contains(&1)
    }

    /// Human-readable violations, citing products by their rendered values.
    pub fn describe<F: Field>(&self, analysis: &Analysis<F>, basis: &[EnvElement<F>]) -> Vec<String> {
        let show = |i: usize| analysis.render(&basis[i]);
        let mut out = Vec::new();
        if !self.contains_one {
            out.push("the basis does not contain 1".to_string());
        }
        if !self.independent {
            out.push("the elements are linearly dependent".to_string());
        }
        for &(i, j) in &self.closure_violations {
            let prod = analysis.env.mul(&basis[i], &basis[j]);
            out.push(format!(
                "({}) * ({}) = {} is neither 0 nor a basis element",
                show(i),
                show(j),
                analysis.render(&prod)
            ));
        }
        for &m in &self.filtration_failures {
            out.push(format!("basis elements in ω^{m} do not span ω^{m}"));
        }
        for &(i, j, m) in &self.congruence_collisions {
            out.push(format!("({}) and ({}) agree modulo ω^{m}", show(i), show(j)));
        }
        out
    }
}

/// Verifies a candidate basis of `u(L)` given in the adapted PBW basis of
/// `analysis.env`. Products must be literally basis elements.
pub fn is_fm_basis<F: Field>(analysis: &Analysis<F>, basis: &[EnvElement<F>]) -> Result<VerifyReport, FmbError> {
    let env = &analysis.env;
    let f = env.field();
    if basis.len() != env.dim() {
        return Err(FmbError::SizeMismatch {
            expected: env.dim(),
            got: basis.len(),
        });
    }
    for b in basis {
        if b.coords.len() != env.dim() {
            return Err(FmbError::Env(crate::env::EnvError::MixedAlgebras));
        }
    }
    let mut report = VerifyReport {
        contains_one: basis.contains(&env.one()),
        ..Default::default()
    };
    let mut ech = IncrementalEchelon::new(f.clone());
    report.independent = basis.iter().all(|b| ech.insert(&b.coords));

    let lookup: HashMap<&EnvElement<F>, usize> = basis.iter().enumerate().map(|(i, b)| (b, i)).collect();
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate() {
            let prod = env.mul(a, b);
            if !env.is_zero(&prod) && !lookup.contains_key(&prod) {
                report.closure_violations.push((i, j));
            }
        }
    }

    for m in 1..analysis.omega.len() {
        let power = analysis.omega_power(m);
        let inside: Vec<_> = basis
            .iter()
            .filter(|b| power.contains(&b.coords).unwrap_or(false))
            .map(|b| b.coords.clone())
            .collect();
        let span = Subspace::span(f.clone(), env.dim(), inside);
        if span.dim() != power.dim() {
            report.filtration_failures.push(m);
        }
        // agreement modulo ω^m among elements outside ω^m
        let mut seen: HashMap<Vec<F::Elem>, usize> = HashMap::new();
        for (i, b) in basis.iter().enumerate() {
            let r = power.reduce(&b.coords).expect("same ambient");
            if r.iter().all(|c| f.is_zero(c)) {
                continue;
            }
            if let Some(&j) = seen.get(&r) {
                report.congruence_collisions.push((j, i, m));
            } else {
                seen.insert(r, i);
            }
        }
    }
    Ok(report)
}
