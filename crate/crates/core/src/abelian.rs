//! Abelian restricted Lie algebras: cyclic decomposition over `F_p` and the
//! truncated-polynomial basis of `u(L)` it produces.
//!
//! Over `F_p` the Frobenius twist is trivial, so on an abelian algebra the
//! `p`-map is a linear nilpotent operator `T` and a decomposition into cyclic
//! restricted subalgebras is a Jordan basis of `T`. Over `F_p(t)` the map is
//! only semilinear; there we decide the three-dimensional shape
//! `x^[p] = αz, y^[p] = βz, z^[p] = 0` directly.

use thiserror::Error;

use crate::env::{EnvAlgebra, EnvElement};
use crate::field::Field;
use crate::liealg::{LieElement, LieError, RestrictedLieAlgebra};
use crate::linalg::{add_scaled, unit, IncrementalEchelon, Subspace, Vector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AbelianError {
    #[error("algebra is not abelian")]
    NotAbelian,
    #[error("cyclic decomposition is only available over a prime field, not {0}")]
    NotPrimeField(String),
    #[error("the p-map is not nilpotent")]
    NotPNilpotent,
    #[error("algebra does not have the shape x^[p] = a*z, y^[p] = b*z, z^[p] = 0")]
    ShapeMismatch,
    #[error(transparent)]
    Lie(#[from] LieError),
}

/// `L = ⊕ ⟨g_i⟩_p` with `e(g_i) = exponents[i]`, exponents nonincreasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicDecomposition<F: Field> {
    pub generators: Vec<LieElement<F>>,
    pub exponents: Vec<usize>,
}

impl<F: Field> CyclicDecomposition<F> {
    /// The vectors `g_i^{[p]^k}`, `0 ≤ k < e_i`, block by block.
    pub fn chain_vectors(&self, alg: &RestrictedLieAlgebra<F>) -> Result<Vec<LieElement<F>>, LieError> {
        let mut out = Vec::new();
        for (g, &e) in self.generators.iter().zip(&self.exponents) {
            let mut v = g.clone();
            for _ in 0..e {
                out.push(v.clone());
                v = alg.pmap(&v)?;
            }
        }
        Ok(out)
    }

    /// Checks that every block has the stated exponent and that the blocks
    /// form a direct sum equal to `L`.
    pub fn verify(&self, alg: &RestrictedLieAlgebra<F>) -> Result<bool, LieError> {
        for (g, &e) in self.generators.iter().zip(&self.exponents) {
            if alg.exponent(g)? != e {
                return Ok(false);
            }
        }
        let chains = self.chain_vectors(alg)?;
        let span = Subspace::span(
            alg.field().clone(),
            alg.dim(),
            chains.iter().map(|v| v.coords.clone()).collect(),
        );
        Ok(chains.len() == alg.dim() && span.dim() == alg.dim())
    }
}

fn apply<F: Field>(f: &F, images: &[Vector<F>], v: &[F::Elem]) -> Vector<F> {
    let mut out = vec![f.zero(); v.len()];
    for (c, img) in v.iter().zip(images) {
        add_scaled(f, &mut out, c, img);
    }
    out
}

fn kernel<F: Field>(f: &F, images: &[Vector<F>]) -> Subspace<F> {
    // v ↦ Σ v_i images[i]; kernel from the echelon form of (images | I)
    let n = images.len();
    let rows = images
        .iter()
        .enumerate()
        .map(|(i, img)| {
            let mut r = img.clone();
            r.extend(unit(f, n, i));
            r
        })
        .collect();
    let s = Subspace::span(f.clone(), 2 * n, rows);
    let ker = s
        .rows()
        .iter()
        .zip(s.pivots())
        .filter(|(_, &pc)| pc >= n)
        .map(|(r, _)| r[n..].to_vec())
        .collect();
    Subspace::span(f.clone(), n, ker)
}

/// Cyclic decomposition of an abelian `p`-nilpotent algebra over `F_p`.
///
/// Blocks of length `k` come from completing `ker T^{k-1} + T(ker T^{k+1})`
/// to `ker T^k`, longest blocks first, using the echelon rows of `ker T^k`
/// in order.
pub fn decompose<F: Field>(alg: &RestrictedLieAlgebra<F>) -> Result<CyclicDecomposition<F>, AbelianError> {
    let f = alg.field();
    if !alg.is_abelian() {
        return Err(AbelianError::NotAbelian);
    }
    if f.elements().is_none() || !f.is_perfect() {
        return Err(AbelianError::NotPrimeField(f.name()));
    }
    let n = alg.dim();
    let t: Vec<Vector<F>> = (0..n).map(|i| alg.pmap_basis(i).clone()).collect();
    // powers[k] = matrix of T^k (rows are images of basis vectors)
    let mut powers = vec![(0..n).map(|i| unit(f, n, i)).collect::<Vec<_>>()];
    loop {
        let last = powers.last().expect("nonempty");
        if last.iter().all(|r| r.iter().all(|c| f.is_zero(c))) {
            break;
        }
        if powers.len() > n {
            return Err(AbelianError::NotPNilpotent);
        }
        let next = last.iter().map(|r| apply(f, &t, r)).collect();
        powers.push(next);
    }
    let depth = powers.len() - 1;
    let kernels: Vec<Subspace<F>> = powers.iter().map(|m| kernel(f, m)).collect();
    let image_of = |s: &Subspace<F>| Subspace::span(f.clone(), n, s.rows().iter().map(|r| apply(f, &t, r)).collect());

    let mut generators = Vec::new();
    let mut exponents = Vec::new();
    for k in (1..=depth).rev() {
        let above = &kernels[(k + 1).min(depth)];
        let base = kernels[k - 1].sum(&image_of(above)).expect("same ambient");
        let mut ech = IncrementalEchelon::new(f.clone());
        for r in base.rows() {
            ech.insert(r);
        }
        for r in kernels[k].rows() {
            if ech.insert(r) {
                generators.push(LieElement::new(r.clone()));
                exponents.push(k);
            }
        }
    }
    Ok(CyclicDecomposition { generators, exponents })
}

/// All products `g_1^{a_1}···g_k^{a_k}` with `0 ≤ a_i < p^{e_i}`, computed as
/// associative powers in `u(L)`; the first generator's exponent varies fastest.
pub fn monomial_fmb<F: Field>(env: &EnvAlgebra<F>, dec: &CyclicDecomposition<F>) -> Vec<EnvElement<F>> {
    let p = env.field().characteristic() as usize;
    let powers: Vec<Vec<EnvElement<F>>> = dec
        .generators
        .iter()
        .zip(&dec.exponents)
        .map(|(g, &e)| {
            let g = env.embed(g);
            let mut list = vec![env.one()];
            for _ in 1..p.pow(e as u32) {
                let next = env.mul(list.last().expect("nonempty"), &g);
                list.push(next);
            }
            list
        })
        .collect();
    let mut out = vec![env.one()];
    for block in &powers {
        out = block
            .iter()
            .flat_map(|b| out.iter().map(move |a| (a, b)))
            .map(|(a, b)| env.mul(a, b))
            .collect();
    }
    out
}

/// Outcome of the non-perfect-field shape criterion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ShapeDecision<F: Field> {
    HasDecomposition(CyclicDecomposition<F>),
    /// `x^[p] = αz`, `y^[p] = βz` with `α/β` not a `p`-th power: an element
    /// `k_1 x + k_2 y + k_3 z` has `p`-th power `(k_1^p α + k_2^p β) z`, which
    /// vanishes only for `k_1 = k_2 = 0`, so no cyclic summand complements `⟨y⟩_p`.
    NoDecomposition {
        x: usize,
        y: usize,
        z: usize,
        ratio: F::Elem,
    },
}

/// Matches `x^[p] = αz, y^[p] = βz, z^[p] = 0` with `β ≠ 0` on an abelian
/// three-dimensional algebra and decides whether it has a cyclic decomposition.
pub fn shape_criterion<F: Field>(alg: &RestrictedLieAlgebra<F>) -> Result<ShapeDecision<F>, AbelianError> {
    let f = alg.field();
    if !alg.is_abelian() {
        return Err(AbelianError::NotAbelian);
    }
    if alg.dim() != 3 {
        return Err(AbelianError::ShapeMismatch);
    }
    let is_zero = |v: &Vector<F>| v.iter().all(|c| f.is_zero(c));
    let multiple_of = |v: &Vector<F>, z: usize| v.iter().enumerate().all(|(k, c)| k == z || f.is_zero(c));
    for z in 0..3 {
        if !is_zero(alg.pmap_basis(z)) {
            continue;
        }
        let others: Vec<usize> = (0..3).filter(|&k| k != z).collect();
        if !others.iter().all(|&k| multiple_of(alg.pmap_basis(k), z)) {
            continue;
        }
        let coeff = |k: usize| alg.pmap_basis(k)[z].clone();
        let Some(&y) = others.iter().rev().find(|&&k| !f.is_zero(&coeff(k))) else {
            continue;
        };
        let x = others.iter().copied().find(|&k| k != y).expect("two others");
        let ratio = f.div(&coeff(x), &coeff(y)).expect("nonzero");
        return Ok(match f.pth_root(&ratio) {
            Some(r) => {
                // (x − r y)^[p] = (α − r^p β) z = 0
                let mut g = unit(f, 3, x);
                g[y] = f.neg(&r);
                ShapeDecision::HasDecomposition(CyclicDecomposition {
                    generators: vec![LieElement::new(unit(f, 3, y)), LieElement::new(g)],
                    exponents: vec![2, 1],
                })
            }
            None => ShapeDecision::NoDecomposition { x, y, z, ratio },
        });
    }
    Err(AbelianError::ShapeMismatch)
}
