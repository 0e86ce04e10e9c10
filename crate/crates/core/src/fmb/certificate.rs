//! Outcomes of the decision pipeline, each with evidence that can be rechecked.

use crate::env::EnvElement;
use crate::field::Field;
use crate::filtration::Analysis;

use super::obstruction::{class_two_obstruction, quadratic_obstruction, ClassTwoReport, QuadraticReport};
use super::search::{search_fmb, SearchBudget, SearchOutcome};
use super::{is_fm_basis, FmbError};
use crate::abelian::{shape_criterion, ShapeDecision};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FoundRoute {
    /// Monomials in the generators of a cyclic decomposition.
    CyclicDecomposition {
        exponents: Vec<usize>,
    },
    Search {
        nodes: u64,
    },
}

/// Every variant except `Inconclusive` is a definite answer. Indices refer to
/// the adapted basis of the analysis, and elements live in `analysis.env`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate<F: Field> {
    FoundBasis {
        basis: Vec<EnvElement<F>>,
        route: FoundRoute,
    },
    /// Abelian `x^[p] = αz, y^[p] = βz, z^[p] = 0` with `α/β` not a `p`-th
    /// power: no cyclic decomposition, hence no basis.
    NoCyclicDecomposition {
        x: usize,
        y: usize,
        z: usize,
        ratio: F::Elem,
    },
    QuadraticObstruction {
        generators: Vec<EnvElement<F>>,
        report: QuadraticReport,
    },
    /// `p > 2` and nilpotency class 2.
    OddClassTwo {
        report: ClassTwoReport,
    },
    Exhausted {
        nodes: u64,
        budget: u64,
        digest: String,
    },
    Inconclusive {
        reason: String,
        nodes: Option<u64>,
    },
}

impl<F: Field> Certificate<F> {
    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::FoundBasis { .. } => "FoundBasis",
            Certificate::NoCyclicDecomposition { .. } => "NoBasis_NoCyclicDecomposition",
            Certificate::QuadraticObstruction { .. } => "NoBasis_QuadraticObstruction",
            Certificate::OddClassTwo { .. } => "NoBasis_OddClassTwo",
            Certificate::Exhausted { .. } => "NoBasis_Exhausted",
            Certificate::Inconclusive { .. } => "Inconclusive",
        }
    }

    pub fn is_definite(&self) -> bool {
        !matches!(self, Certificate::Inconclusive { .. })
    }

    pub fn has_basis(&self) -> Option<bool> {
        match self {
            Certificate::FoundBasis { .. } => Some(true),
            Certificate::Inconclusive { .. } => None,
            _ => Some(false),
        }
    }

    /// Basis elements rendered in the input basis, ordered by height and then
    /// by their text.
    pub fn rendered_basis(&self, analysis: &Analysis<F>) -> Vec<String> {
        let Certificate::FoundBasis { basis, .. } = self else {
            return Vec::new();
        };
        let mut items: Vec<(usize, String)> = basis
            .iter()
            .map(|b| {
                let h = analysis.element_height(&b.coords);
                let h = if h == usize::MAX { 0 } else { h };
                (h, analysis.render(b))
            })
            .collect();
        items.sort();
        items.into_iter().map(|(_, s)| s).collect()
    }

    /// One-line summary for the command line.
    pub fn summary(&self, analysis: &Analysis<F>) -> String {
        let names = analysis.adapted.names();
        let f = analysis.env.field();
        match self {
            Certificate::FoundBasis { .. } => {
                format!("FoundBasis: {{{}}}", self.rendered_basis(analysis).join(", "))
            }
            Certificate::NoCyclicDecomposition { ratio, .. } => format!(
                "NoBasis (no cyclic decomposition): {} is not a p-th power in {}",
                bare(&f.format(ratio)),
                f.name()
            ),
            Certificate::QuadraticObstruction { generators, .. } => {
                let gens: Vec<String> = generators.iter().map(|g| analysis.render(g)).collect();
                format!(
                    "NoBasis (quadratic obstruction): generators {} satisfy all three conditions modulo ω^3",
                    gens.join(", ")
                )
            }
            Certificate::OddClassTwo { report } => {
                let p = f.characteristic();
                match report.witness {
                    Some((r, s)) => format!(
                        "NoBasis (class two, p = {p}): [{}, {}] is not in L^[p]",
                        names[r], names[s]
                    ),
                    None => format!("NoBasis (class two, p = {p}): L is powerful"),
                }
            }
            Certificate::Exhausted { nodes, .. } => {
                format!("NoBasis (exhaustive search): no candidate closes after {nodes} nodes")
            }
            Certificate::Inconclusive { reason, .. } => format!("Inconclusive: {reason}"),
        }
    }

    /// Re-derives the evidence independently of how it was produced.
    pub fn recheck(&self, analysis: &Analysis<F>, threads: Option<usize>) -> Result<bool, FmbError> {
        Ok(match self {
            Certificate::FoundBasis { basis, .. } => is_fm_basis(analysis, basis)?.is_valid(),
            Certificate::NoCyclicDecomposition { x, y, z, ratio } => {
                let f = analysis.env.field();
                let alg = &analysis.adapted;
                let alpha = &alg.pmap_basis(*x)[*z];
                let beta = &alg.pmap_basis(*y)[*z];
                let same = f.div(alpha, beta).ok().as_ref() == Some(ratio);
                same && f.pth_root(ratio).is_none()
                    && matches!(shape_criterion(alg)?, ShapeDecision::NoDecomposition { .. })
            }
            Certificate::QuadraticObstruction { generators, report } => {
                let again = quadratic_obstruction(analysis, generators)?;
                again == *report && again.holds()
            }
            Certificate::OddClassTwo { report } => {
                class_two_obstruction(analysis)?.as_ref() == Some(report) && report.identity_holds
            }
            Certificate::Exhausted { nodes, budget, digest } => {
                let b = SearchBudget {
                    max_nodes: *budget,
                    threads,
                };
                match search_fmb(analysis, &b)? {
                    SearchOutcome::Exhausted { nodes: n, digest: d } => n == *nodes && d == *digest,
                    _ => false,
                }
            }
            Certificate::Inconclusive { .. } => true,
        })
    }
}

/// `(t)` becomes `t`; `(t)/(t+1)` is left alone.
fn bare(s: &str) -> &str {
    match s.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
        Some(inner) if !inner.contains(['(', ')']) => inner,
        _ => s,
    }
}
