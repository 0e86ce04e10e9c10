//! Obstructions that rule out a filtered multiplicative basis without search.

use crate::env::EnvElement;
use crate::field::Field;
use crate::filtration::{power_image, restricted_closure, Analysis};
use crate::linalg::{IncrementalEchelon, Subspace, Vector};

use super::FmbError;

/// The adapted basis vectors of height 1, embedded in `u(L)`. Their classes
/// form a basis of `ω/ω²`, so they minimally generate `ω`.
pub fn height_one_generators<F: Field>(analysis: &Analysis<F>) -> Vec<EnvElement<F>> {
    (0..analysis.adapted.dim())
        .filter(|&i| analysis.heights[i] == 1)
        .map(|i| analysis.env.generator(i))
        .collect()
}

/// Evaluation of the three quadratic conditions on a minimal generating set
/// `u_1, …, u_n` of `ω`:
/// commutators in `ω³`, no product `u_i u_j` in `ω³`, and
/// `span{u_i u_j : i < j} ∩ span{u_i²} ⊆ ω³`.
/// When all three hold, `ω` cannot have a filtered multiplicative basis:
/// the layer-one elements of such a basis would have to commute modulo `ω³`
/// and hence, by distinctness modulo `ω³`, commute outright.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticReport {
    /// Pairs `i < j` with `[u_i, u_j] ∉ ω³`.
    pub commutators_outside: Vec<(usize, usize)>,
    /// Ordered pairs with `u_i u_j ∈ ω³`.
    pub products_inside: Vec<(usize, usize)>,
    /// Dimension of the intersection of the two spans modulo `ω³`.
    pub meet_dim: usize,
}

impl QuadraticReport {
    pub fn holds(&self) -> bool {
        self.commutators_outside.is_empty() && self.products_inside.is_empty() && self.meet_dim == 0
    }

    /// The first condition that fails, as a short phrase.
    pub fn failure(&self) -> Option<String> {
        if let Some((i, j)) = self.commutators_outside.first() {
            return Some(format!("commutator of generators {i} and {j} is not in ω³"));
        }
        if let Some((i, j)) = self.products_inside.first() {
            return Some(format!("product of generators {i} and {j} lies in ω³"));
        }
        if self.meet_dim > 0 {
            return Some(format!(
                "mixed products and squares share a {}-dimensional subspace modulo ω³",
                self.meet_dim
            ));
        }
        None
    }
}

pub fn quadratic_obstruction<F: Field>(
    analysis: &Analysis<F>,
    gens: &[EnvElement<F>],
) -> Result<QuadraticReport, FmbError> {
    let env = &analysis.env;
    let f = env.field();
    let omega = analysis.omega_power(1);
    let omega2 = analysis.omega_power(2);
    let omega3 = analysis.omega_power(3);

    let layer_one = omega.dim() - omega2.dim();
    let mut ech = IncrementalEchelon::new(f.clone());
    for r in omega2.rows() {
        ech.insert(r);
    }
    let minimal = gens.len() == layer_one
        && gens
            .iter()
            .all(|g| omega.contains(&g.coords).unwrap_or(false) && ech.insert(&g.coords));
    if !minimal {
        return Err(FmbError::NotMinimalGenerating);
    }

    let in_cube = |v: &EnvElement<F>| omega3.contains(&v.coords).expect("same ambient");
    let mod_cube = |v: &EnvElement<F>| -> Vector<F> { omega3.reduce(&v.coords).expect("same ambient") };
    let n = gens.len();
    let mut report = QuadraticReport {
        commutators_outside: Vec::new(),
        products_inside: Vec::new(),
        meet_dim: 0,
    };
    let mut mixed = Vec::new();
    let mut squares = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let prod = env.mul(&gens[i], &gens[j]);
            if in_cube(&prod) {
                report.products_inside.push((i, j));
            }
            if i < j {
                if !in_cube(&env.commutator(&gens[i], &gens[j])) {
                    report.commutators_outside.push((i, j));
                }
                mixed.push(mod_cube(&prod));
            } else if i == j {
                squares.push(mod_cube(&prod));
            }
        }
    }
    let a = Subspace::span(f.clone(), env.dim(), mixed);
    let b = Subspace::span(f.clone(), env.dim(), squares);
    report.meet_dim = a.intersect(&b).expect("same ambient").dim();
    Ok(report)
}

/// Side conditions behind the odd-characteristic class-two obstruction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassTwoReport {
    /// Height-one adapted generators `(r, s)` with `[u_r, u_s] ∉ L^{[p]}`.
    /// `None` when every such bracket lies in `L^{[p]}`, i.e. `L` is powerful.
    pub witness: Option<(usize, usize)>,
    /// `u_s² u_r − 2 u_s u_r u_s + u_r u_s² = 0` on the witness pair (or the
    /// first pair of generators when there is no witness).
    pub identity_holds: bool,
}

/// Applies when `p > 2` and `L` has nilpotency class exactly 2; `u(L)` then
/// has no filtered multiplicative basis.
pub fn class_two_obstruction<F: Field>(analysis: &Analysis<F>) -> Result<Option<ClassTwoReport>, FmbError> {
    let alg = &analysis.adapted;
    if alg.p() == 2 || analysis.structure.nilpotency_class != Some(2) {
        return Ok(None);
    }
    let f = alg.field();
    let n = alg.dim();
    let full = Subspace::full(f.clone(), n);
    let image = power_image(alg, &full, 1)?;
    let rows: Vec<_> = image
        .rows()
        .iter()
        .map(|r| crate::liealg::LieElement::new(r.clone()))
        .collect();
    let powers = restricted_closure(alg, &rows)?;

    let gens: Vec<usize> = (0..n).filter(|&i| analysis.heights[i] == 1).collect();
    let mut witness = None;
    'outer: for (a, &r) in gens.iter().enumerate() {
        for &s in &gens[a + 1..] {
            let c = alg.bracket_vec(alg.basis(r).coords.as_slice(), alg.basis(s).coords.as_slice());
            if !powers.contains(&c).expect("same ambient") {
                witness = Some((r, s));
                break 'outer;
            }
        }
    }
    let (r, s) = witness.unwrap_or((gens[0], gens[gens.len().min(2) - 1]));
    let env = &analysis.env;
    let (ur, us) = (env.generator(r), env.generator(s));
    let v1 = env.mul(&env.mul(&us, &us), &ur);
    let v2 = env.mul(&env.mul(&us, &ur), &us);
    let v3 = env.mul(&ur, &env.mul(&us, &us));
    let two = f.from_i64(2);
    let total = env.add(&env.sub(&v1, &env.scale(&two, &v2)), &v3);
    Ok(Some(ClassTwoReport {
        witness,
        identity_holds: env.is_zero(&total),
    }))
}
