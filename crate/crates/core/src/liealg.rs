//! Restricted Lie algebras given by structure constants and a basis `p`-map.

use std::fmt;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::env::Straightener;
use crate::field::Field;
use crate::linalg::{add_scaled, unit, Subspace, Vector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LieError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid restricted Lie algebra: {0}")]
    Invalid(ValidationReport),
    #[error("duplicate basis name `{0}`")]
    DuplicateName(String),
    #[error("element is not p-nilpotent within {0} iterations")]
    NotPNilpotent(usize),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("change of basis is singular")]
    SingularBasis,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LieElement<F: Field> {
    pub coords: Vector<F>,
}

impl<F: Field> LieElement<F> {
    pub fn new(coords: Vector<F>) -> Self {
        Self { coords }
    }

    pub fn zero(field: &F, n: usize) -> Self {
        Self::new(vec![field.zero(); n])
    }

    pub fn basis(field: &F, n: usize, i: usize) -> Self {
        Self::new(unit(field, n, i))
    }

    pub fn is_zero(&self, field: &F) -> bool {
        self.coords.iter().all(|c| field.is_zero(c))
    }
}

/// Outcome of checking the restricted Lie algebra axioms on a basis.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    /// Pairs `(i, j)` where `[x_j, x_i] ≠ −[x_i, x_j]` or `[x_i, x_i] ≠ 0`.
    pub antisymmetry_violations: Vec<(usize, usize)>,
    /// Triples `i < j < k` whose Jacobiator is nonzero.
    pub jacobi_violations: Vec<(usize, usize, usize)>,
    /// Indices `i` with `ad(x_i)^p ≠ ad(x_i^[p])`.
    pub restrictedness_violations: Vec<usize>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.antisymmetry_violations.is_empty()
            && self.jacobi_violations.is_empty()
            && self.restrictedness_violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return f.write_str("valid");
        }
        let mut parts = Vec::new();
        if let Some((i, j)) = self.antisymmetry_violations.first() {
            parts.push(format!("antisymmetry fails on ({i}, {j})"));
        }
        if let Some((i, j, k)) = self.jacobi_violations.first() {
            parts.push(format!("Jacobi identity fails on ({i}, {j}, {k})"));
        }
        if let Some(i) = self.restrictedness_violations.first() {
            parts.push(format!("ad(x_{i})^p differs from ad(x_{i}^[p])"));
        }
        f.write_str(&parts.join("; "))
    }
}

/// A finite-dimensional restricted Lie algebra over `F`.
///
/// `bracket[i][j]` holds the coordinates of `[x_i, x_j]` and `pmap[i]` those of
/// `x_i^[p]`. Values of `p`-maps on arbitrary elements are computed as
/// associative `p`-th powers in `u(L)`, whose multiplication table is built on
/// first use and shared with [`crate::env::EnvAlgebra`].
pub struct RestrictedLieAlgebra<F: Field> {
    field: F,
    names: Vec<String>,
    bracket: Vec<Vec<Vector<F>>>,
    pmap: Vec<Vector<F>>,
    straightener: OnceLock<Arc<Straightener<F>>>,
}

impl<F: Field> Clone for RestrictedLieAlgebra<F> {
    fn clone(&self) -> Self {
        Self {
            field: self.field.clone(),
            names: self.names.clone(),
            bracket: self.bracket.clone(),
            pmap: self.pmap.clone(),
            straightener: self.straightener.clone(),
        }
    }
}

impl<F: Field> PartialEq for RestrictedLieAlgebra<F> {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field
            && self.names == other.names
            && self.bracket == other.bracket
            && self.pmap == other.pmap
    }
}

impl<F: Field> Eq for RestrictedLieAlgebra<F> {}

impl<F: Field> fmt::Debug for RestrictedLieAlgebra<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RestrictedLieAlgebra")
            .field("field", &self.field.name())
            .field("names", &self.names)
            .field("bracket", &self.bracket)
            .field("pmap", &self.pmap)
            .finish()
    }
}

impl<F: Field> RestrictedLieAlgebra<F> {
    /// Builds and validates an algebra. `brackets` lists `((i, j), [x_i, x_j])`
    /// for `i < j`; unlisted brackets are zero. `[x_j, x_i]` is derived.
    pub fn new(
        field: F,
        names: Vec<String>,
        brackets: Vec<((usize, usize), Vector<F>)>,
        pmap: Vec<Vector<F>>,
    ) -> Result<Self, LieError> {
        let alg = Self::new_unchecked(field, names, brackets, pmap)?;
        let report = alg.validate();
        if report.is_valid() {
            Ok(alg)
        } else {
            Err(LieError::Invalid(report))
        }
    }

    /// Builds the tables without checking the Jacobi identity or restrictedness.
    pub fn new_unchecked(
        field: F,
        names: Vec<String>,
        brackets: Vec<((usize, usize), Vector<F>)>,
        pmap: Vec<Vector<F>>,
    ) -> Result<Self, LieError> {
        let n = names.len();
        for (k, name) in names.iter().enumerate() {
            if names[..k].contains(name) {
                return Err(LieError::DuplicateName(name.clone()));
            }
        }
        check_len(n, pmap.len())?;
        let zero = vec![field.zero(); n];
        let mut bracket = vec![vec![zero.clone(); n]; n];
        for ((i, j), v) in brackets {
            check_len(n, v.len())?;
            if i >= n || j >= n {
                return Err(LieError::DimensionMismatch {
                    expected: n,
                    got: i.max(j) + 1,
                });
            }
            let neg: Vector<F> = v.iter().map(|c| field.neg(c)).collect();
            bracket[i][j] = v;
            bracket[j][i] = neg;
        }
        for v in &pmap {
            check_len(n, v.len())?;
        }
        Ok(Self {
            field,
            names,
            bracket,
            pmap,
            straightener: OnceLock::new(),
        })
    }

    /// Overwrites one structure constant without revalidating.
    pub fn with_bracket_unchecked(&self, i: usize, j: usize, v: Vector<F>) -> Self {
        let mut out = self.clone();
        out.straightener = OnceLock::new();
        out.bracket[j][i] = v.iter().map(|c| self.field.neg(c)).collect();
        out.bracket[i][j] = v;
        out
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn p(&self) -> u32 {
        self.field.characteristic()
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn bracket_basis(&self, i: usize, j: usize) -> &Vector<F> {
        &self.bracket[i][j]
    }

    pub fn pmap_basis(&self, i: usize) -> &Vector<F> {
        &self.pmap[i]
    }

    pub fn basis(&self, i: usize) -> LieElement<F> {
        LieElement::basis(&self.field, self.dim(), i)
    }

    pub fn zero(&self) -> LieElement<F> {
        LieElement::zero(&self.field, self.dim())
    }

    pub fn is_abelian(&self) -> bool {
        self.bracket.iter().flatten().flatten().all(|c| self.field.is_zero(c))
    }

    pub(crate) fn straightener(&self) -> Arc<Straightener<F>> {
        self.straightener
            .get_or_init(|| Arc::new(Straightener::build(&self.field, &self.bracket, &self.pmap)))
            .clone()
    }

    fn check(&self, u: &LieElement<F>) -> Result<(), LieError> {
        check_len(self.dim(), u.coords.len())
    }

    /// Bilinear extension of the structure constants.
    pub fn bracket(&self, u: &LieElement<F>, v: &LieElement<F>) -> Result<LieElement<F>, LieError> {
        self.check(u)?;
        self.check(v)?;
        Ok(LieElement::new(self.bracket_vec(&u.coords, &v.coords)))
    }

    pub(crate) fn bracket_vec(&self, u: &[F::Elem], v: &[F::Elem]) -> Vector<F> {
        let f = &self.field;
        let mut out = vec![f.zero(); self.dim()];
        for (i, a) in u.iter().enumerate() {
            if f.is_zero(a) {
                continue;
            }
            for (j, b) in v.iter().enumerate() {
                if f.is_zero(b) || i == j {
                    continue;
                }
                add_scaled(f, &mut out, &f.mul(a, b), &self.bracket[i][j]);
            }
        }
        out
    }

    /// `u^[p]`, computed as the associative `p`-th power of `u` in `u(L)`.
    pub fn pmap(&self, u: &LieElement<F>) -> Result<LieElement<F>, LieError> {
        self.check(u)?;
        let st = self.straightener();
        let ix = st.indexer();
        let f = &self.field;
        let mut cur = vec![f.zero(); ix.dim()];
        cur[0] = f.one();
        for _ in 0..self.p() {
            cur = st.mul_lie(&cur, &u.coords);
        }
        let gens: Vec<usize> = (0..self.dim()).map(|i| ix.generator(i)).collect();
        if let Some((idx, _)) = cur
            .iter()
            .enumerate()
            .find(|(idx, c)| !f.is_zero(c) && !gens.contains(idx))
        {
            return Err(LieError::InternalInconsistency(format!(
                "p-th power has a component on PBW monomial {idx} outside L"
            )));
        }
        Ok(LieElement::new(gens.iter().map(|&g| cur[g].clone()).collect()))
    }

    /// The least `k` with `u^{[p]^k} = 0`; `e(0) = 0`.
    pub fn exponent(&self, u: &LieElement<F>) -> Result<usize, LieError> {
        let mut cur = u.clone();
        for k in 0..=self.dim() {
            if cur.is_zero(&self.field) {
                return Ok(k);
            }
            cur = self.pmap(&cur)?;
        }
        Err(LieError::NotPNilpotent(self.dim()))
    }

    /// Checks antisymmetry, the Jacobi identity on all basis triples, and
    /// `ad(x_i)^p = ad(x_i^[p])` for every basis vector.
    pub fn validate(&self) -> ValidationReport {
        let f = &self.field;
        let n = self.dim();
        let mut report = ValidationReport::default();
        for i in 0..n {
            for j in i..n {
                let sum: Vector<F> = self.bracket[i][j]
                    .iter()
                    .zip(&self.bracket[j][i])
                    .map(|(a, b)| f.add(a, b))
                    .collect();
                if sum.iter().any(|c| !f.is_zero(c)) {
                    report.antisymmetry_violations.push((i, j));
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let e = |a: usize| unit(f, n, a);
                    let t1 = self.bracket_vec(&e(i), &self.bracket[j][k]);
                    let t2 = self.bracket_vec(&e(j), &self.bracket[k][i]);
                    let t3 = self.bracket_vec(&e(k), &self.bracket[i][j]);
                    if t1
                        .iter()
                        .zip(&t2)
                        .zip(&t3)
                        .any(|((a, b), c)| !f.is_zero(&f.add(&f.add(a, b), c)))
                    {
                        report.jacobi_violations.push((i, j, k));
                    }
                }
            }
        }
        for i in 0..n {
            let ok = (0..n).all(|j| {
                let mut v = unit(f, n, j);
                for _ in 0..self.p() {
                    v = self.bracket_vec(&unit(f, n, i), &v);
                }
                v == self.bracket_vec(&self.pmap[i], &unit(f, n, j))
            });
            if !ok {
                report.restrictedness_violations.push(i);
            }
        }
        report
    }

    /// Re-expresses the algebra in a new basis `y_i = Σ_k rows[i][k] x_k`.
    pub fn change_basis(&self, rows: &[Vector<F>], names: Vec<String>) -> Result<Self, LieError> {
        let n = self.dim();
        check_len(n, rows.len())?;
        check_len(n, names.len())?;
        let f = &self.field;
        let span = Subspace::span(f.clone(), n, rows.to_vec());
        if span.dim() < n {
            return Err(LieError::SingularBasis);
        }
        // columns of the transpose; solve for new coordinates
        let transpose: Vec<Vector<F>> = (0..n).map(|k| rows.iter().map(|r| r[k].clone()).collect()).collect();
        let to_new = |v: &Vector<F>| -> Result<Vector<F>, LieError> {
            crate::linalg::solve(f, &transpose, v)
                .map_err(|e| LieError::InternalInconsistency(e.to_string()))?
                .ok_or(LieError::SingularBasis)
        };
        let mut brackets = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let b = self.bracket_vec(&rows[i], &rows[j]);
                brackets.push(((i, j), to_new(&b)?));
            }
        }
        let mut pmap = Vec::with_capacity(n);
        for r in rows {
            let v = self.pmap(&LieElement::new(r.clone()))?;
            pmap.push(to_new(&v.coords)?);
        }
        Self::new(f.clone(), names, brackets, pmap)
    }

    /// Human-readable rendering of a Lie element, e.g. `a + 2*c`.
    pub fn render(&self, u: &LieElement<F>) -> String {
        let f = &self.field;
        let parts: Vec<String> = u
            .coords
            .iter()
            .enumerate()
            .filter(|(_, c)| !f.is_zero(c))
            .map(|(i, c)| {
                if *c == f.one() {
                    self.names[i].clone()
                } else {
                    format!("{}*{}", f.format(c), self.names[i])
                }
            })
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

fn check_len(expected: usize, got: usize) -> Result<(), LieError> {
    if expected == got {
        Ok(())
    } else {
        Err(LieError::DimensionMismatch { expected, got })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, RationalFunctionField};

    fn names(s: &[&str]) -> Vec<String> {
        s.iter().map(|x| x.to_string()).collect()
    }

    fn heisenberg() -> RestrictedLieAlgebra<PrimeField> {
        let f = PrimeField::new(2).unwrap();
        RestrictedLieAlgebra::new(
            f,
            names(&["a", "b", "c"]),
            vec![((0, 1), vec![0, 0, 1])],
            vec![vec![0; 3]; 3],
        )
        .unwrap()
    }

    #[test]
    fn heisenberg_brackets() {
        let h = heisenberg();
        assert_eq!(h.bracket(&h.basis(0), &h.basis(1)).unwrap(), h.basis(2));
        let u = LieElement::new(vec![1, 1, 0]);
        assert!(h.bracket(&u, &u).unwrap().is_zero(h.field()));
        assert_eq!(h.bracket(&u, &h.basis(0)).unwrap(), h.basis(2));
        assert!(matches!(
            h.bracket(&u, &LieElement::new(vec![1])),
            Err(LieError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn p_map_of_a_sum_picks_up_the_commutator() {
        let h = heisenberg();
        assert_eq!(h.pmap(&LieElement::new(vec![1, 1, 0])).unwrap(), h.basis(2));
        assert_eq!(h.exponent(&h.basis(0)).unwrap(), 1);
        assert_eq!(h.exponent(&h.zero()).unwrap(), 0);
    }

    #[test]
    fn p3_algebra_with_central_p_power_is_valid() {
        let f = PrimeField::new(3).unwrap();
        let l = RestrictedLieAlgebra::new(
            f,
            names(&["x", "y", "z"]),
            vec![((0, 1), vec![0, 0, 1])],
            vec![vec![0, 0, 1], vec![0; 3], vec![0; 3]],
        );
        assert!(l.is_ok());
    }

    #[test]
    fn tampered_bracket_is_rejected() {
        let h = heisenberg().with_bracket_unchecked(0, 2, vec![1, 0, 0]);
        let report = h.validate();
        assert!(!report.is_valid());
        assert_eq!(report.jacobi_violations, vec![(0, 1, 2)]);
    }

    #[test]
    fn restrictedness_violation_is_reported() {
        let f = PrimeField::new(2).unwrap();
        // [x, y] = y gives ad(x)^2 = ad(x) ≠ 0, but x^[2] = 0
        let err = RestrictedLieAlgebra::new(
            f,
            names(&["x", "y"]),
            vec![((0, 1), vec![0, 1])],
            vec![vec![0, 0], vec![0, 0]],
        )
        .unwrap_err();
        let LieError::Invalid(report) = err else {
            panic!("expected invalid")
        };
        assert!(report.restrictedness_violations.contains(&0));
    }

    #[test]
    fn duplicate_names_rejected() {
        let f = PrimeField::new(2).unwrap();
        let err = RestrictedLieAlgebra::new(f, names(&["x", "x"]), vec![], vec![vec![0; 2]; 2]).unwrap_err();
        assert_eq!(err, LieError::DuplicateName("x".into()));
    }

    #[test]
    fn semilinear_p_map_over_ratfunc() {
        let f = RationalFunctionField::new(2).unwrap();
        let t = f.t();
        let l = RestrictedLieAlgebra::new(
            f,
            names(&["x", "y", "z"]),
            vec![],
            vec![
                vec![f.zero(), f.zero(), t.clone()],
                vec![f.zero(), f.zero(), f.one()],
                vec![f.zero(); 3],
            ],
        )
        .unwrap();
        let k1 = f.parse("t+1").unwrap();
        let k2 = f.parse("(1)/(t)").unwrap();
        let k3 = f.parse("t^2").unwrap();
        let u = LieElement::new(vec![k1.clone(), k2.clone(), k3]);
        let expected = f.add(&f.mul(&f.frobenius(&k1), &t), &f.frobenius(&k2));
        assert_eq!(l.pmap(&u).unwrap().coords, vec![f.zero(), f.zero(), expected]);
        assert_eq!(l.exponent(&l.basis(0)).unwrap(), 2);
    }

    #[test]
    fn change_of_basis_preserves_structure() {
        let h = heisenberg();
        let rows = vec![vec![1, 1, 0], vec![0, 1, 0], vec![0, 0, 1]];
        let g = h.change_basis(&rows, names(&["u", "v", "w"])).unwrap();
        assert_eq!(g.bracket_basis(0, 1), &vec![0, 0, 1]);
        assert_eq!(g.pmap_basis(0), &vec![0, 0, 1]);
        let singular = vec![vec![1, 1, 0], vec![1, 1, 0], vec![0, 0, 1]];
        assert_eq!(
            h.change_basis(&singular, names(&["u", "v", "w"])).unwrap_err(),
            LieError::SingularBasis
        );
    }
}
