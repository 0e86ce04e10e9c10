//! Structure theory of a restricted Lie algebra: lower central series,
//! `p`-power subalgebras, dimension subalgebras, heights, and the adapted
//! basis in which powers of the augmentation ideal become coordinate spans.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use thiserror::Error;

use crate::env::{EnvAlgebra, EnvElement, EnvError};
use crate::field::Field;
use crate::liealg::{LieElement, LieError, RestrictedLieAlgebra};
use crate::linalg::{unit, IncrementalEchelon, Subspace, Vector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FiltrationError {
    #[error("algebra is not p-nilpotent: dimension subalgebras do not reach 0 by index {0}")]
    NotPNilpotent(usize),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Env(#[from] EnvError),
}

/// The smallest restricted subalgebra containing `gens`.
///
/// A Lie subalgebra whose basis is closed under the `p`-map is restricted,
/// since `(u + v)^[p] − u^[p] − v^[p]` is a sum of Lie words in `u, v`.
pub fn restricted_closure<F: Field>(
    alg: &RestrictedLieAlgebra<F>,
    gens: &[LieElement<F>],
) -> Result<Subspace<F>, LieError> {
    let f = alg.field().clone();
    let n = alg.dim();
    let mut cur = Subspace::span(f.clone(), n, gens.iter().map(|g| g.coords.clone()).collect());
    loop {
        let rows = cur.rows().to_vec();
        let mut extra: Vec<Vector<F>> = Vec::new();
        for (a, u) in rows.iter().enumerate() {
            for v in &rows[a + 1..] {
                extra.push(alg.bracket_vec(u, v));
            }
            extra.push(alg.pmap(&LieElement::new(u.clone()))?.coords);
        }
        let next = Subspace::span(f.clone(), n, rows.into_iter().chain(extra).collect());
        if next.dim() == cur.dim() {
            return Ok(cur);
        }
        cur = next;
    }
}

/// `span{[u, v] : u ∈ a, v ∈ b}`.
pub fn bracket_span<F: Field>(alg: &RestrictedLieAlgebra<F>, a: &Subspace<F>, b: &Subspace<F>) -> Subspace<F> {
    let rows = a
        .rows()
        .iter()
        .flat_map(|u| b.rows().iter().map(move |v| alg.bracket_vec(u, v)))
        .collect();
    Subspace::span(alg.field().clone(), alg.dim(), rows)
}

/// `γ_1 = L`, `γ_{i+1} = [γ_i, L]`, ending at the first zero term or at the
/// first term equal to its successor.
pub fn lower_central_series<F: Field>(alg: &RestrictedLieAlgebra<F>) -> Vec<Subspace<F>> {
    let full = Subspace::full(alg.field().clone(), alg.dim());
    let mut series = vec![full.clone()];
    loop {
        let last = series.last().expect("nonempty");
        if last.is_zero() {
            return series;
        }
        let next = bracket_span(alg, last, &full);
        if next == *last {
            return series;
        }
        series.push(next);
    }
}

/// `span{v^{[p]^j} : v ∈ V}`.
///
/// The map `v ↦ v^{[p]^j}` is not additive, so the images of a spanning set
/// are not enough (in the Heisenberg algebra over `F_2`, `a` and `b` square
/// to 0 while `(a + b)^[2] = c`). Over a finite field every point of `V` is
/// evaluated. Over an infinite field the map is polynomial of degree at most
/// `p^j` in each coordinate, so a grid of `p^j + 1` distinct nodes per
/// coordinate spans the same space.
pub fn power_image<F: Field>(
    alg: &RestrictedLieAlgebra<F>,
    space: &Subspace<F>,
    j: u32,
) -> Result<Subspace<F>, LieError> {
    let f = alg.field();
    let n = alg.dim();
    if j == 0 || space.is_zero() {
        return Ok(space.clone());
    }
    let nodes = f
        .elements()
        .unwrap_or_else(|| f.distinct_elements(alg.p().pow(j) as usize + 1));
    let d = space.dim();
    let mut digits = vec![0usize; d];
    let mut images = IncrementalEchelon::new(f.clone());
    let mut found = Vec::new();
    'grid: loop {
        let mut v = vec![f.zero(); n];
        for (row, &k) in space.rows().iter().zip(&digits) {
            crate::linalg::add_scaled(f, &mut v, &nodes[k], row);
        }
        let mut u = LieElement::new(v);
        for _ in 0..j {
            u = alg.pmap(&u)?;
        }
        if images.insert(&u.coords) {
            found.push(u.coords);
            if found.len() == n {
                break 'grid;
            }
        }
        for k in digits.iter_mut() {
            *k += 1;
            if *k < nodes.len() {
                continue 'grid;
            }
            *k = 0;
        }
        break;
    }
    Ok(Subspace::span(f.clone(), n, found))
}

/// Basis of `L` adapted to the dimension subalgebras, in input coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdaptedBasis<F: Field> {
    pub vectors: Vec<LieElement<F>>,
    pub names: Vec<String>,
    pub heights: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiltrationData<F: Field> {
    pub lower_central: Vec<Subspace<F>>,
    /// `pth_powers[i - 1][j]` is `γ_i^{[p]^j}`, listed until it vanishes.
    pub pth_powers: Vec<Vec<Subspace<F>>>,
    /// `𝔇_1, 𝔇_2, …`; the last entry is 0 exactly when `L` is `p`-nilpotent.
    pub dim_subalgebras: Vec<Subspace<F>>,
    pub p_nilpotent: bool,
    pub adapted: Option<AdaptedBasis<F>>,
}

impl<F: Field> FiltrationData<F> {
    fn pth_power(&self, i: usize, j: usize) -> Option<&Subspace<F>> {
        let row = &self.pth_powers[i.min(self.pth_powers.len()) - 1];
        row.get(j)
    }

    /// `L^{[p]^j}`.
    pub fn power_subalgebra(&self, j: usize) -> Subspace<F> {
        match self.pth_power(1, j) {
            Some(s) => s.clone(),
            None => {
                let full = &self.lower_central[0];
                Subspace::zero(full.field().clone(), full.ambient())
            }
        }
    }

    /// `𝔇_m`, which is 0 past the end of the recorded chain.
    pub fn dim_subalgebra(&self, m: usize) -> Subspace<F> {
        assert!(m >= 1, "dimension subalgebras are indexed from 1");
        match self.dim_subalgebras.get(m - 1) {
            Some(s) => s.clone(),
            None => {
                let last = self.dim_subalgebras.last().expect("nonempty");
                Subspace::zero(last.field().clone(), last.ambient())
            }
        }
    }

    /// Height `ν(u)`: the largest `m` with `u ∈ 𝔇_m`; `None` for `u = 0` or
    /// when `u` lies in every recorded term.
    pub fn height(&self, u: &LieElement<F>) -> Option<usize> {
        let mut h = None;
        for (m, d) in self.dim_subalgebras.iter().enumerate() {
            if d.contains(&u.coords).ok()? {
                h = Some(m + 1);
            } else {
                return h;
            }
        }
        if self.p_nilpotent {
            h
        } else {
            None
        }
    }
}

/// Computes `𝔇_m(L) = Σ_{i p^j ≥ m} γ_i(L)^{[p]^j}` for `m = 1, 2, …` up to
/// `p^{dim L}`, and an adapted basis when the chain reaches 0.
pub fn dimension_subalgebras<F: Field>(alg: &RestrictedLieAlgebra<F>) -> Result<FiltrationData<F>, LieError> {
    let f = alg.field().clone();
    let n = alg.dim();
    let p = alg.p() as usize;
    let cap = p.checked_pow(n as u32).unwrap_or(usize::MAX).max(2);
    let lower_central = lower_central_series(alg);

    let mut pth_powers = Vec::with_capacity(lower_central.len());
    for gamma in &lower_central {
        let mut row = vec![gamma.clone()];
        for j in 1..=n as u32 {
            if row.last().expect("nonempty").is_zero() {
                break;
            }
            let image = power_image(alg, gamma, j)?;
            row.push(restricted_closure(alg, &to_elements(&image))?);
        }
        pth_powers.push(row);
    }
    let mut data = FiltrationData {
        lower_central,
        pth_powers,
        dim_subalgebras: Vec::new(),
        p_nilpotent: false,
        adapted: None,
    };

    let mut memo: HashMap<BTreeSet<(usize, usize)>, Subspace<F>> = HashMap::new();
    let rows_len = data.pth_powers.len();
    for m in 1..=cap {
        // the pairs (i, j) with j minimal subject to i p^j ≥ m
        let mut terms = BTreeSet::new();
        for i in 1..=m {
            let mut j = 0;
            let mut ip = i;
            while ip < m {
                ip *= p;
                j += 1;
            }
            let i_eff = i.min(rows_len);
            if data.pth_power(i_eff, j).is_some_and(|s| !s.is_zero()) {
                terms.insert((i_eff, j));
            }
        }
        let dm = match memo.get(&terms) {
            Some(s) => s.clone(),
            None => {
                let mut sum = Subspace::zero(f.clone(), n);
                for &(i, j) in &terms {
                    sum = sum
                        .sum(data.pth_power(i, j).expect("listed"))
                        .map_err(|e| LieError::InternalInconsistency(e.to_string()))?;
                }
                let closed = restricted_closure(alg, &to_elements(&sum))?;
                memo.insert(terms, closed.clone());
                closed
            }
        };
        let done = dm.is_zero();
        data.dim_subalgebras.push(dm);
        if done {
            data.p_nilpotent = true;
            break;
        }
    }
    if data.p_nilpotent {
        data.adapted = Some(adapted_basis(alg, &data.dim_subalgebras));
    }
    Ok(data)
}

fn to_elements<F: Field>(s: &Subspace<F>) -> Vec<LieElement<F>> {
    s.rows().iter().map(|r| LieElement::new(r.clone())).collect()
}

/// Extends echelon bases from the deepest nonzero `𝔇_m` outwards, preferring
/// input basis vectors, then orders the result by height. Vectors that are
/// not input basis vectors get primed names.
fn adapted_basis<F: Field>(alg: &RestrictedLieAlgebra<F>, chain: &[Subspace<F>]) -> AdaptedBasis<F> {
    let f = alg.field();
    let n = alg.dim();
    let mut ech = IncrementalEchelon::new(f.clone());
    // (height, standard index or n + insertion order, vector)
    let mut chosen: Vec<(usize, usize, Vector<F>)> = Vec::new();
    for m in (1..chain.len()).rev() {
        let d = &chain[m - 1];
        for k in 0..n {
            let e = unit(f, n, k);
            if d.contains(&e).unwrap_or(false) && ech.insert(&e) {
                chosen.push((m, k, e));
            }
        }
        for row in d.rows() {
            if ech.insert(row) {
                let key = n + chosen.len();
                chosen.push((m, key, row.clone()));
            }
        }
    }
    chosen.sort_by_key(|(h, key, _)| (*h, *key));
    let mut names: Vec<String> = Vec::with_capacity(n);
    for (_, key, v) in &chosen {
        if *key < n {
            names.push(alg.names()[*key].clone());
        } else {
            let lead = v.iter().position(|c| !f.is_zero(c)).expect("nonzero");
            let mut name = format!("{}'", alg.names()[lead]);
            while alg.names().contains(&name) || names.contains(&name) {
                name.push('\'');
            }
            names.push(name);
        }
    }
    AdaptedBasis {
        heights: chosen.iter().map(|(h, _, _)| *h).collect(),
        vectors: chosen.into_iter().map(|(_, _, v)| LieElement::new(v)).collect(),
        names,
    }
}

/// Structural predicates of an algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructReport<F: Field> {
    pub is_abelian: bool,
    /// `c` with `γ_{c+1} = 0`; `None` when the lower central series stalls.
    pub nilpotency_class: Option<usize>,
    pub is_p_nilpotent: bool,
    pub is_powerful: bool,
    /// Lifts of a basis of `L / 𝔇_2(L)`, in input coordinates.
    pub minimal_generators: Vec<LieElement<F>>,
}

pub fn predicates<F: Field>(alg: &RestrictedLieAlgebra<F>, data: &FiltrationData<F>) -> StructReport<F> {
    let f = alg.field();
    let n = alg.dim();
    let lcs = &data.lower_central;
    let nilpotency_class = lcs.last().expect("nonempty").is_zero().then(|| lcs.len() - 1);
    let full = Subspace::full(f.clone(), n);
    let derived = bracket_span(alg, &full, &full);
    let target = data.power_subalgebra(if alg.p() == 2 { 2 } else { 1 });
    let is_powerful = derived.is_subspace_of(&target).unwrap_or(false);

    let frattini = data.dim_subalgebra(2);
    let mut ech = IncrementalEchelon::new(f.clone());
    for r in frattini.rows() {
        ech.insert(r);
    }
    let minimal_generators = (0..n)
        .map(|k| unit(f, n, k))
        .filter(|e| ech.insert(e))
        .map(LieElement::new)
        .collect();
    StructReport {
        is_abelian: alg.is_abelian(),
        nilpotency_class,
        is_p_nilpotent: data.p_nilpotent,
        is_powerful,
        minimal_generators,
    }
}

/// Heights of PBW monomials: `ν(x_1^{a_1}···x_n^{a_n}) = Σ a_i ν(x_i)`.
pub fn monomial_heights<F: Field>(env: &EnvAlgebra<F>, generator_heights: &[usize]) -> Vec<usize> {
    let ix = env.indexer();
    (0..env.dim())
        .map(|idx| {
            ix.exponents(idx)
                .0
                .iter()
                .zip(generator_heights)
                .map(|(&e, &h)| e as usize * h)
                .sum()
        })
        .collect()
}

/// `ω, ω², …, 0` as coordinate spans of monomials of height at least `m`.
/// Valid when the generators of `env` form an adapted basis with the given heights.
pub fn omega_powers_fast<F: Field>(env: &EnvAlgebra<F>, generator_heights: &[usize]) -> Vec<Subspace<F>> {
    let heights = monomial_heights(env, generator_heights);
    let mut chain = Vec::new();
    for m in 1.. {
        let s = Subspace::coordinate(
            env.field().clone(),
            env.dim(),
            (0..env.dim()).filter(|&i| heights[i] >= m),
        );
        let done = s.is_zero();
        chain.push(s);
        if done {
            return chain;
        }
    }
    unreachable!()
}

/// `L ∩ W` for a subspace `W` of `u(L)`, in Lie coordinates.
pub fn lie_part<F: Field>(env: &EnvAlgebra<F>, w: &Subspace<F>) -> Subspace<F> {
    let n = env.base().dim();
    let ix = env.indexer();
    let gens = Subspace::coordinate(env.field().clone(), env.dim(), (0..n).map(|i| ix.generator(i)));
    let meet = gens.intersect(w).expect("same ambient");
    let rows = meet
        .rows()
        .iter()
        .map(|r| (0..n).map(|i| r[ix.generator(i)].clone()).collect())
        .collect();
    Subspace::span(env.field().clone(), n, rows)
}

/// Images of PBW monomials: adapted to input, then input to adapted.
type Conversion<F> = (Vec<EnvElement<F>>, Vec<EnvElement<F>>);

/// Everything downstream code needs about a `p`-nilpotent algebra: its
/// filtration, the same algebra rewritten in an adapted basis, the enveloping
/// algebra of the latter, and the powers of its augmentation ideal.
#[derive(Debug)]
pub struct Analysis<F: Field> {
    pub input: Arc<RestrictedLieAlgebra<F>>,
    pub filtration: FiltrationData<F>,
    pub structure: StructReport<F>,
    pub adapted: Arc<RestrictedLieAlgebra<F>>,
    /// Heights of the adapted basis vectors.
    pub heights: Vec<usize>,
    pub env: EnvAlgebra<F>,
    pub monomial_heights: Vec<usize>,
    /// `ω, ω², …, 0`.
    pub omega: Vec<Subspace<F>>,
    /// `u(L)` in the input basis, with the isomorphisms to and from `env`
    /// given by images of PBW monomials. `None` when the bases coincide.
    pub input_env: EnvAlgebra<F>,
    conversion: Option<Conversion<F>>,
}

impl<F: Field> Analysis<F> {
    pub fn new(input: Arc<RestrictedLieAlgebra<F>>) -> Result<Self, FiltrationError> {
        let filtration = dimension_subalgebras(&input)?;
        let structure = predicates(&input, &filtration);
        let Some(basis) = filtration.adapted.clone() else {
            return Err(FiltrationError::NotPNilpotent(filtration.dim_subalgebras.len()));
        };
        let rows: Vec<Vector<F>> = basis.vectors.iter().map(|v| v.coords.clone()).collect();
        let adapted = Arc::new(input.change_basis(&rows, basis.names.clone())?);
        let env = EnvAlgebra::new(adapted.clone());
        let monomial_heights = monomial_heights(&env, &basis.heights);
        let omega = omega_powers_fast(&env, &basis.heights);
        let input_env = EnvAlgebra::new(input.clone());
        let identity = basis.names == input.names()
            && basis
                .vectors
                .iter()
                .enumerate()
                .all(|(i, v)| v.coords == unit(input.field(), input.dim(), i));
        let conversion = if identity {
            None
        } else {
            let f = input.field();
            let n = input.dim();
            // column k of the inverse expresses x_k in the adapted basis
            let transpose: Vec<Vector<F>> = (0..n).map(|k| rows.iter().map(|r| r[k].clone()).collect()).collect();
            let mut inverse = Vec::with_capacity(n);
            for k in 0..n {
                let col = crate::linalg::solve(f, &transpose, &unit(f, n, k))
                    .map_err(|e| LieError::InternalInconsistency(e.to_string()))?
                    .ok_or(LieError::SingularBasis)?;
                inverse.push(col);
            }
            let to_input = monomial_images(&env, &input_env, &rows);
            let from_input = monomial_images(&input_env, &env, &inverse);
            Some((to_input, from_input))
        };
        Ok(Self {
            input,
            filtration,
            structure,
            adapted,
            heights: basis.heights,
            env,
            monomial_heights,
            omega,
            input_env,
            conversion,
        })
    }

    /// Rewrites an element of `env` in the PBW basis of the input algebra.
    pub fn to_input(&self, a: &EnvElement<F>) -> EnvElement<F> {
        match &self.conversion {
            None => a.clone(),
            Some((images, _)) => apply_images(&self.input_env, images, a),
        }
    }

    /// Rewrites an element of `input_env` in the adapted PBW basis.
    pub fn from_input(&self, a: &EnvElement<F>) -> EnvElement<F> {
        match &self.conversion {
            None => a.clone(),
            Some((_, images)) => apply_images(&self.env, images, a),
        }
    }

    /// Renders an element of `env` in the input basis.
    pub fn render(&self, a: &EnvElement<F>) -> String {
        self.input_env.render(&self.to_input(a))
    }

    /// `ω^m` for `m ≥ 1`; 0 past the end of the chain.
    pub fn omega_power(&self, m: usize) -> Subspace<F> {
        assert!(m >= 1, "powers are indexed from 1");
        self.omega
            .get(m - 1)
            .cloned()
            .unwrap_or_else(|| Subspace::zero(self.env.field().clone(), self.env.dim()))
    }

    /// `dim ω^m / ω^{m+1}` for `m = 1, …`, without the trailing zero.
    pub fn layer_dims(&self) -> Vec<usize> {
        self.omega.windows(2).map(|w| w[0].dim() - w[1].dim()).collect()
    }

    /// The height of an element of `u(L)`: the largest `m` with `a ∈ ω^m`.
    /// The unit and anything with a unit component have height 0.
    pub fn element_height(&self, coords: &[F::Elem]) -> usize {
        let f = self.env.field();
        coords
            .iter()
            .zip(&self.monomial_heights)
            .filter(|(c, _)| !f.is_zero(c))
            .map(|(_, &h)| h)
            .min()
            .unwrap_or(usize::MAX)
    }
}

/// Images of the PBW monomials of `from` under the algebra map sending
/// generator `i` to the Lie element `gens[i]` of `to`.
fn monomial_images<F: Field>(from: &EnvAlgebra<F>, to: &EnvAlgebra<F>, gens: &[Vector<F>]) -> Vec<EnvElement<F>> {
    let ix = from.indexer();
    let gens: Vec<EnvElement<F>> = gens.iter().map(|g| to.embed(&LieElement::new(g.clone()))).collect();
    (0..from.dim())
        .map(|idx| {
            let mut acc = to.one();
            for (i, &e) in ix.exponents(idx).0.iter().enumerate() {
                for _ in 0..e {
                    acc = to.mul(&acc, &gens[i]);
                }
            }
            acc
        })
        .collect()
}

fn apply_images<F: Field>(to: &EnvAlgebra<F>, images: &[EnvElement<F>], a: &EnvElement<F>) -> EnvElement<F> {
    let f = to.field();
    let mut out = to.zero();
    for (c, img) in a.coords.iter().zip(images) {
        crate::linalg::add_scaled(f, &mut out.coords, c, &img.coords);
    }
    out
}
