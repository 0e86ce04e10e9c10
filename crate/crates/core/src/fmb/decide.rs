//! The decision pipeline.

use crate::abelian::{decompose, monomial_fmb, shape_criterion, AbelianError, CyclicDecomposition, ShapeDecision};
use crate::env::EnvElement;
use crate::field::Field;
use crate::filtration::Analysis;

use super::certificate::{Certificate, FoundRoute};
use super::obstruction::{class_two_obstruction, height_one_generators, quadratic_obstruction};
use super::search::{search_fmb, SearchBudget, SearchOutcome};
use super::{is_fm_basis, FmbError};

/// The truncated-polynomial basis of an abelian algebra over a prime field.
pub fn abelian_basis<F: Field>(
    analysis: &Analysis<F>,
) -> Result<(Vec<EnvElement<F>>, CyclicDecomposition<F>), FmbError> {
    let dec = decompose(&analysis.adapted)?;
    Ok((monomial_fmb(&analysis.env, &dec), dec))
}

fn verified<F: Field>(
    analysis: &Analysis<F>,
    basis: Vec<EnvElement<F>>,
    route: FoundRoute,
) -> Result<Certificate<F>, FmbError> {
    let report = is_fm_basis(analysis, &basis)?;
    if !report.is_valid() {
        return Err(FmbError::InternalInconsistency(format!(
            "constructed basis fails verification: {:?}",
            report
        )));
    }
    Ok(Certificate::FoundBasis { basis, route })
}

/// Runs, in order: cyclic decomposition for abelian algebras over `F_p`; the
/// shape criterion for abelian algebras over other fields; the class-two
/// obstruction for `p > 2`; the quadratic obstruction for powerful nonabelian
/// algebras; the exhaustive search. The first definite answer wins.
pub fn decide<F: Field>(analysis: &Analysis<F>, budget: &SearchBudget) -> Result<Certificate<F>, FmbError> {
    let alg = &analysis.adapted;
    let f = alg.field();
    let finite = f.elements().is_some();
    if alg.is_abelian() {
        if finite {
            let (basis, dec) = abelian_basis(analysis)?;
            return verified(
                analysis,
                basis,
                FoundRoute::CyclicDecomposition {
                    exponents: dec.exponents,
                },
            );
        }
        match shape_criterion(alg) {
            Ok(ShapeDecision::HasDecomposition(dec)) => {
                let basis = monomial_fmb(&analysis.env, &dec);
                return verified(
                    analysis,
                    basis,
                    FoundRoute::CyclicDecomposition {
                        exponents: dec.exponents,
                    },
                );
            }
            Ok(ShapeDecision::NoDecomposition { x, y, z, ratio }) => {
                return Ok(Certificate::NoCyclicDecomposition { x, y, z, ratio });
            }
            Err(AbelianError::ShapeMismatch) => {}
            Err(e) => return Err(e.into()),
        }
    }
    if let Some(report) = class_two_obstruction(analysis)? {
        return Ok(Certificate::OddClassTwo { report });
    }
    if analysis.structure.is_powerful && !alg.is_abelian() {
        let generators = height_one_generators(analysis);
        let report = quadratic_obstruction(analysis, &generators)?;
        if report.holds() {
            return Ok(Certificate::QuadraticObstruction { generators, report });
        }
    }
    Ok(match search_fmb(analysis, budget)? {
        SearchOutcome::Found { basis, nodes } => Certificate::FoundBasis {
            basis,
            route: FoundRoute::Search { nodes },
        },
        SearchOutcome::Exhausted { nodes, digest } => Certificate::Exhausted {
            nodes,
            budget: budget.max_nodes,
            digest,
        },
        SearchOutcome::BudgetExceeded { nodes } => Certificate::Inconclusive {
            reason: format!("search budget of {nodes} nodes exhausted"),
            nodes: Some(nodes),
        },
        SearchOutcome::NotApplicable(reason) => Certificate::Inconclusive { reason, nodes: None },
    })
}
