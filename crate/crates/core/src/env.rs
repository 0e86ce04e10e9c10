//! The restricted enveloping algebra `u(L)` in a PBW monomial basis.
//!
//! A monomial `x_1^{e_1}···x_n^{e_n}` (every `e_i < p`) is indexed by
//! `Σ e_i p^i`, so index 0 is the unit and `p^i` is the generator `x_i`.
//! Products are brought to normal form by straightening: a generator is
//! pushed leftwards with `x_k x_j = x_j x_k + [x_k, x_j]`, and a `p`-th power
//! `x_j^p` is replaced by `x_j^[p]`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::field::{split_signed, Field};
use crate::liealg::{LieElement, RestrictedLieAlgebra};
use crate::linalg::{add_scaled, Subspace, Vector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnvError {
    #[error("elements belong to different enveloping algebras")]
    MixedAlgebras,
    #[error("augmentation ideal is not nilpotent (chain stalled at dimension {0})")]
    NotNilpotent(usize),
    #[error("cannot parse element `{0}`: {1}")]
    Parse(String, String),
}

pub(crate) type SparseVec<F> = Vec<(u32, <F as Field>::Elem)>;

/// PBW exponent vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PbwMonomial(pub Vec<u8>);

impl PbwMonomial {
    pub fn is_unit(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }
}

/// Index arithmetic for the PBW basis of a given `(p, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonomialIndexer {
    p: usize,
    n: usize,
    dim: usize,
}

impl MonomialIndexer {
    pub fn new(p: usize, n: usize) -> Self {
        Self {
            p,
            n,
            dim: p.pow(n as u32),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generator(&self, i: usize) -> usize {
        self.p.pow(i as u32)
    }

    pub fn exponents(&self, mut idx: usize) -> PbwMonomial {
        let mut e = vec![0u8; self.n];
        for x in e.iter_mut() {
            *x = (idx % self.p) as u8;
            idx /= self.p;
        }
        PbwMonomial(e)
    }

    pub fn index(&self, m: &PbwMonomial) -> usize {
        m.0.iter().rev().fold(0, |acc, &e| acc * self.p + e as usize)
    }

    pub fn exponent(&self, idx: usize, i: usize) -> usize {
        idx / self.p.pow(i as u32) % self.p
    }
}

/// Right multiplication of every PBW monomial by every generator, in normal form.
#[derive(Debug)]
pub struct Straightener<F: Field> {
    field: F,
    ix: MonomialIndexer,
    right: Vec<SparseVec<F>>,
}

struct StraightenBuild<'a, F: Field> {
    field: &'a F,
    ix: MonomialIndexer,
    bracket: &'a [Vec<Vector<F>>],
    pmap: &'a [Vector<F>],
    memo: Vec<Option<SparseVec<F>>>,
}

impl<F: Field> StraightenBuild<'_, F> {
    fn accumulate(&self, acc: &mut BTreeMap<u32, F::Elem>, c: &F::Elem, v: &SparseVec<F>) {
        for (idx, x) in v {
            let term = self.field.mul(c, x);
            let entry = acc.entry(*idx).or_insert_with(|| self.field.zero());
            *entry = self.field.add(entry, &term);
        }
    }

    fn finish(&self, acc: BTreeMap<u32, F::Elem>) -> SparseVec<F> {
        acc.into_iter().filter(|(_, c)| !self.field.is_zero(c)).collect()
    }

    /// `m · x_j`. Each recursive call has strictly smaller product degree,
    /// except the final reordering step whose largest variable is already `≤ k`.
    fn compute(&mut self, m: usize, j: usize) -> SparseVec<F> {
        let n = self.ix.n;
        if let Some(v) = &self.memo[m * n + j] {
            return v.clone();
        }
        let f = self.field;
        let p = self.ix.p;
        let top = (0..n).rev().find(|&i| self.ix.exponent(m, i) > 0);
        let result = match top {
            Some(k) if k > j => {
                // m = m0 · x_k, and x_k x_j = x_j x_k + [x_k, x_j]
                let m0 = m - self.ix.generator(k);
                let head = self.compute(m0, j);
                let mut acc = BTreeMap::new();
                for (r, c) in &head {
                    let v = self.compute(*r as usize, k);
                    self.accumulate(&mut acc, c, &v);
                }
                let br = self.bracket[k][j].clone();
                for (l, c) in br.iter().enumerate() {
                    if !f.is_zero(c) {
                        let v = self.compute(m0, l);
                        self.accumulate(&mut acc, c, &v);
                    }
                }
                self.finish(acc)
            }
            Some(k) if k == j && self.ix.exponent(m, j) + 1 == p => {
                // x_j^p = x_j^[p]
                let m2 = m - (p - 1) * self.ix.generator(j);
                let pm = self.pmap[j].clone();
                let mut acc = BTreeMap::new();
                for (l, c) in pm.iter().enumerate() {
                    if !f.is_zero(c) {
                        let v = self.compute(m2, l);
                        self.accumulate(&mut acc, c, &v);
                    }
                }
                self.finish(acc)
            }
            _ => vec![((m + self.ix.generator(j)) as u32, f.one())],
        };
        self.memo[m * n + j] = Some(result.clone());
        result
    }
}

impl<F: Field> Straightener<F> {
    pub(crate) fn build(field: &F, bracket: &[Vec<Vector<F>>], pmap: &[Vector<F>]) -> Self {
        let n = pmap.len();
        let ix = MonomialIndexer::new(field.characteristic() as usize, n);
        let mut b = StraightenBuild {
            field,
            ix,
            bracket,
            pmap,
            memo: vec![None; ix.dim() * n],
        };
        for m in 0..ix.dim() {
            for j in 0..n {
                b.compute(m, j);
            }
        }
        let right = b.memo.into_iter().map(|v| v.expect("filled")).collect();
        Self {
            field: field.clone(),
            ix,
            right,
        }
    }

    pub fn indexer(&self) -> MonomialIndexer {
        self.ix
    }

    /// `a · x_j` for a dense element `a`.
    pub fn mul_gen(&self, a: &[F::Elem], j: usize) -> Vector<F> {
        let f = &self.field;
        let n = self.ix.n;
        let mut out = vec![f.zero(); a.len()];
        for (m, c) in a.iter().enumerate() {
            if f.is_zero(c) {
                continue;
            }
            for (idx, x) in &self.right[m * n + j] {
                let slot = &mut out[*idx as usize];
                *slot = f.add(slot, &f.mul(c, x));
            }
        }
        out
    }

    /// `a · u` for `u ∈ L` given by coordinates.
    pub fn mul_lie(&self, a: &[F::Elem], u: &[F::Elem]) -> Vector<F> {
        let f = &self.field;
        let mut out = vec![f.zero(); a.len()];
        for (j, c) in u.iter().enumerate() {
            if !f.is_zero(c) {
                add_scaled(f, &mut out, c, &self.mul_gen(a, j));
            }
        }
        out
    }

    fn monomial_product(&self, m1: usize, m2: usize) -> SparseVec<F> {
        let f = &self.field;
        let mut cur = vec![f.zero(); self.ix.dim()];
        cur[m1] = f.one();
        let e = self.ix.exponents(m2);
        for (j, &k) in e.0.iter().enumerate() {
            for _ in 0..k {
                cur = self.mul_gen(&cur, j);
            }
        }
        cur.into_iter()
            .enumerate()
            .filter(|(_, c)| !f.is_zero(c))
            .map(|(i, c)| (i as u32, c))
            .collect()
    }
}

/// An element of `u(L)`: dense coordinates over the PBW basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EnvElement<F: Field> {
    pub coords: Vec<F::Elem>,
}

/// Dense products are precomputed for every monomial pair up to this dimension.
const MONOMIAL_TABLE_LIMIT: usize = 256;

/// `u(L)` with its multiplication tables.
#[derive(Debug)]
pub struct EnvAlgebra<F: Field> {
    base: Arc<RestrictedLieAlgebra<F>>,
    st: Arc<Straightener<F>>,
    table: Option<Vec<SparseVec<F>>>,
}

impl<F: Field> EnvAlgebra<F> {
    pub fn new(base: Arc<RestrictedLieAlgebra<F>>) -> Self {
        let st = base.straightener();
        let dim = st.ix.dim();
        let table = (dim <= MONOMIAL_TABLE_LIMIT)
            .then(|| (0..dim * dim).map(|k| st.monomial_product(k / dim, k % dim)).collect());
        Self { base, st, table }
    }

    pub fn base(&self) -> &Arc<RestrictedLieAlgebra<F>> {
        &self.base
    }

    pub fn field(&self) -> &F {
        self.base.field()
    }

    pub fn dim(&self) -> usize {
        self.st.ix.dim()
    }

    pub fn indexer(&self) -> MonomialIndexer {
        self.st.ix
    }

    pub fn same_algebra(&self, other: &Self) -> Result<(), EnvError> {
        if Arc::ptr_eq(&self.base, &other.base) || *self.base == *other.base {
            Ok(())
        } else {
            Err(EnvError::MixedAlgebras)
        }
    }

    fn check(&self, a: &EnvElement<F>) -> Result<(), EnvError> {
        if a.coords.len() == self.dim() {
            Ok(())
        } else {
            Err(EnvError::MixedAlgebras)
        }
    }

    pub fn zero(&self) -> EnvElement<F> {
        EnvElement {
            coords: vec![self.field().zero(); self.dim()],
        }
    }

    pub fn one(&self) -> EnvElement<F> {
        self.monomial(0)
    }

    pub fn monomial(&self, idx: usize) -> EnvElement<F> {
        let mut a = self.zero();
        a.coords[idx] = self.field().one();
        a
    }

    pub fn generator(&self, i: usize) -> EnvElement<F> {
        self.monomial(self.st.ix.generator(i))
    }

    pub fn from_coords(&self, coords: Vec<F::Elem>) -> Result<EnvElement<F>, EnvError> {
        let a = EnvElement { coords };
        self.check(&a)?;
        Ok(a)
    }

    pub fn is_zero(&self, a: &EnvElement<F>) -> bool {
        a.coords.iter().all(|c| self.field().is_zero(c))
    }

    /// Nonzero `(monomial index, coefficient)` pairs in increasing index order.
    pub fn terms<'a>(&'a self, a: &'a EnvElement<F>) -> impl Iterator<Item = (usize, &'a F::Elem)> + 'a {
        a.coords
            .iter()
            .enumerate()
            .filter(move |(_, c)| !self.field().is_zero(c))
    }

    pub fn embed(&self, u: &LieElement<F>) -> EnvElement<F> {
        let mut a = self.zero();
        for (i, c) in u.coords.iter().enumerate() {
            a.coords[self.st.ix.generator(i)] = c.clone();
        }
        a
    }

    /// The Lie element `a` represents, if `a` is a combination of generators.
    pub fn project_to_l(&self, a: &EnvElement<F>) -> Option<LieElement<F>> {
        let n = self.base.dim();
        let gens: Vec<usize> = (0..n).map(|i| self.st.ix.generator(i)).collect();
        for (idx, _) in self.terms(a) {
            if !gens.contains(&idx) {
                return None;
            }
        }
        Some(LieElement::new(
            gens.iter().map(|&g| a.coords[g].clone()).collect::<Vec<_>>(),
        ))
    }

    pub fn add(&self, a: &EnvElement<F>, b: &EnvElement<F>) -> EnvElement<F> {
        let f = self.field();
        EnvElement {
            coords: a.coords.iter().zip(&b.coords).map(|(x, y)| f.add(x, y)).collect(),
        }
    }

    pub fn sub(&self, a: &EnvElement<F>, b: &EnvElement<F>) -> EnvElement<F> {
        let f = self.field();
        EnvElement {
            coords: a.coords.iter().zip(&b.coords).map(|(x, y)| f.sub(x, y)).collect(),
        }
    }

    pub fn scale(&self, c: &F::Elem, a: &EnvElement<F>) -> EnvElement<F> {
        let f = self.field();
        EnvElement {
            coords: a.coords.iter().map(|x| f.mul(c, x)).collect(),
        }
    }

    pub fn checked_mul(&self, a: &EnvElement<F>, b: &EnvElement<F>) -> Result<EnvElement<F>, EnvError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul(a, b))
    }

    /// Normal-form product. Panics if either operand has the wrong length;
    /// see [`EnvAlgebra::checked_mul`].
    pub fn mul(&self, a: &EnvElement<F>, b: &EnvElement<F>) -> EnvElement<F> {
        assert_eq!(a.coords.len(), self.dim(), "element from another algebra");
        assert_eq!(b.coords.len(), self.dim(), "element from another algebra");
        let f = self.field();
        let dim = self.dim();
        let mut out = vec![f.zero(); dim];
        match &self.table {
            Some(table) => {
                for (i, ca) in a.coords.iter().enumerate() {
                    if f.is_zero(ca) {
                        continue;
                    }
                    for (j, cb) in b.coords.iter().enumerate() {
                        if f.is_zero(cb) {
                            continue;
                        }
                        let c = f.mul(ca, cb);
                        for (idx, x) in &table[i * dim + j] {
                            let slot = &mut out[*idx as usize];
                            *slot = f.add(slot, &f.mul(&c, x));
                        }
                    }
                }
            }
            None => {
                for (j, cb) in b.coords.iter().enumerate() {
                    if f.is_zero(cb) {
                        continue;
                    }
                    let mut cur = a.coords.clone();
                    for (g, &k) in self.st.ix.exponents(j).0.iter().enumerate() {
                        for _ in 0..k {
                            cur = self.st.mul_gen(&cur, g);
                        }
                    }
                    add_scaled(f, &mut out, cb, &cur);
                }
            }
        }
        EnvElement { coords: out }
    }

    pub fn commutator(&self, a: &EnvElement<F>, b: &EnvElement<F>) -> EnvElement<F> {
        self.sub(&self.mul(a, b), &self.mul(b, a))
    }

    pub fn power(&self, a: &EnvElement<F>, mut k: u64) -> EnvElement<F> {
        let mut base = a.clone();
        let mut acc = self.one();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// Brute-force powers of the augmentation ideal:
    /// `ω = span{nonunit monomials}`, `ω^{m+1} = span{g·w}` over nonunit
    /// monomials `g` and basis vectors `w` of `ω^m`. The chain ends with `0`.
    pub fn omega_powers_oracle(&self) -> Result<Vec<Subspace<F>>, EnvError> {
        let f = self.field().clone();
        let dim = self.dim();
        let mut chain = vec![Subspace::coordinate(f.clone(), dim, 1..dim)];
        while !chain.last().expect("nonempty").is_zero() {
            let cur = chain.last().expect("nonempty");
            let mut rows = Vec::new();
            for w in cur.rows() {
                let w = EnvElement { coords: w.clone() };
                for g in 1..dim {
                    rows.push(self.mul(&self.monomial(g), &w).coords);
                }
            }
            let next = Subspace::span(f.clone(), dim, rows);
            if next.dim() == cur.dim() || chain.len() > dim {
                return Err(EnvError::NotNilpotent(cur.dim()));
            }
            chain.push(next);
        }
        Ok(chain)
    }

    pub fn display<'a>(&'a self, a: &'a EnvElement<F>) -> DisplayElement<'a, F> {
        DisplayElement { env: self, a }
    }

    pub fn render(&self, a: &EnvElement<F>) -> String {
        self.display(a).to_string()
    }

    fn render_monomial(&self, idx: usize) -> String {
        let names = self.base.names();
        self.st
            .ix
            .exponents(idx)
            .0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| {
                if e == 1 {
                    names[i].clone()
                } else {
                    format!("{}^{}", names[i], e)
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }

    /// Parses `c*x^e*y + …`. Factors are multiplied in the order written, so
    /// non-normal products such as `b*a` are accepted.
    pub fn parse_element(&self, s: &str) -> Result<EnvElement<F>, EnvError> {
        let err = |m: String| EnvError::Parse(s.to_string(), m);
        let f = self.field();
        let body: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut acc = self.zero();
        for (neg, term) in split_signed(&body).map_err(err)? {
            let mut t = self.one();
            for factor in split_top_level(term, '*') {
                if factor.is_empty() {
                    return Err(err(format!("empty factor in `{term}`")));
                }
                let (name, exp) = match factor.rsplit_once('^') {
                    Some((n, e)) if !n.ends_with(')') => (n, Some(e)),
                    _ => (factor, None),
                };
                if let Some(i) = self.base.index_of(name) {
                    let k: u64 = match exp {
                        None => 1,
                        Some(e) => e.parse().map_err(|_| err(format!("bad exponent `{e}`")))?,
                    };
                    t = self.mul(&t, &self.power(&self.generator(i), k));
                } else {
                    let c = f.parse(factor).map_err(|e| err(e.to_string()))?;
                    t = self.scale(&c, &t);
                }
            }
            if neg {
                t = self.scale(&f.neg(&f.one()), &t);
            }
            acc = self.add(&acc, &t);
        }
        Ok(acc)
    }
}

pub(crate) fn split_top_level(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

pub struct DisplayElement<'a, F: Field> {
    env: &'a EnvAlgebra<F>,
    a: &'a EnvElement<F>,
}

impl<F: Field> fmt::Display for DisplayElement<'_, F> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let f = self.env.field();
        let mut first = true;
        for (idx, c) in self.env.terms(self.a) {
            if !first {
                out.write_str(" + ")?;
            }
            first = false;
            let mono = self.env.render_monomial(idx);
            let one = *c == f.one();
            match (mono.is_empty(), one) {
                (true, true) => out.write_str("1")?,
                (true, false) => write!(out, "{}", f.format(c))?,
                (false, true) => out.write_str(&mono)?,
                (false, false) => write!(out, "{}*{}", f.format(c), mono)?,
            }
        }
        if first {
            out.write_str("0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;

    fn heisenberg(p: u32) -> EnvAlgebra<PrimeField> {
        let f = PrimeField::new(p).unwrap();
        let names = ["a", "b", "c"].map(String::from).to_vec();
        let l = RestrictedLieAlgebra::new(f, names, vec![((0, 1), vec![0, 0, 1])], vec![vec![0; 3]; 3]).unwrap();
        EnvAlgebra::new(Arc::new(l))
    }

    #[test]
    fn straightening_in_heisenberg() {
        let u = heisenberg(2);
        let ba = u.mul(&u.generator(1), &u.generator(0));
        assert_eq!(u.render(&ba), "a*b + c");
        let x = u.parse_element("a*b + c").unwrap();
        assert_eq!(u.render(&u.mul(&x, &x)), "a*b*c");
        let s = u.parse_element("a + b").unwrap();
        assert_eq!(u.power(&s, 2), u.generator(2));
        assert_eq!(u.power(&s, 0), u.one());
    }

    #[test]
    fn truncation_by_the_p_map() {
        let f = PrimeField::new(3).unwrap();
        let l = RestrictedLieAlgebra::new(f, vec!["x".into(), "y".into()], vec![], vec![vec![0; 2]; 2]).unwrap();
        let u = EnvAlgebra::new(Arc::new(l));
        let x = u.generator(0);
        assert!(u.is_zero(&u.mul(&u.mul(&x, &x), &x)));
        assert_eq!(u.dim(), 9);
    }

    #[test]
    fn embedding_round_trip() {
        let u = heisenberg(2);
        let v = LieElement::new(vec![1, 0, 1]);
        assert_eq!(u.project_to_l(&u.embed(&v)), Some(v));
        assert!(u.is_zero(&u.embed(&LieElement::new(vec![0; 3]))));
        assert_eq!(u.project_to_l(&u.parse_element("a*b + c").unwrap()), None);
    }

    #[test]
    fn heisenberg_omega_chain() {
        let dims: Vec<usize> = heisenberg(2)
            .omega_powers_oracle()
            .unwrap()
            .iter()
            .map(|s| s.dim())
            .collect();
        assert_eq!(dims, vec![7, 5, 3, 1, 0]);
    }

    #[test]
    fn class_two_identity() {
        let u = heisenberg(3);
        let (r, s) = (u.generator(0), u.generator(1));
        let two = u.field().from_i64(2);
        let v1 = u.mul(&u.mul(&s, &s), &r);
        let v2 = u.mul(&u.mul(&s, &r), &s);
        let v3 = u.mul(&r, &u.mul(&s, &s));
        let sum = u.add(&u.sub(&v1, &u.scale(&two, &v2)), &v3);
        assert!(u.is_zero(&sum));
    }

    #[test]
    fn parse_errors_and_scalars() {
        let u = heisenberg(3);
        assert_eq!(u.render(&u.parse_element("2*a - a").unwrap()), "a");
        assert_eq!(u.render(&u.parse_element("b*a").unwrap()), "a*b + 2*c");
        assert!(matches!(u.parse_element("a*q"), Err(EnvError::Parse(..))));
        assert!(matches!(u.parse_element("a^x"), Err(EnvError::Parse(..))));
        assert_eq!(u.render(&u.zero()), "0");
    }
}
