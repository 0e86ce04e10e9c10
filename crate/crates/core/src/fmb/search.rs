//! Exhaustive search for a filtered multiplicative basis.
//!
//! If `B` is such a basis with `1 ∈ B`, its elements outside `ω²` form a set
//! `G` of `d = dim ω/ω²` elements whose classes span `ω/ω²`, and every
//! nonzero word in `G` lies in `B`. Those words span `ω` (since `G`
//! generates it), while `B ∩ ω` is independent, so `B ∖ {1}` is exactly the
//! set of nonzero words in `G`. The search therefore only enumerates `G`:
//! each element is a nonzero leading part on the height-one generators plus
//! an arbitrary tail in `ω²`. Leading parts are taken in increasing order, so
//! every `G` is visited once. After each choice the words are closed under
//! right multiplication by `G`; a branch dies as soon as two words of the same
//! height become dependent modulo the next power of `ω`.

use std::collections::HashSet;
use std::hash::Hash;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::env::{EnvAlgebra, EnvElement};
use crate::field::Field;
use crate::filtration::Analysis;
use crate::linalg::IncrementalEchelon;

use super::{is_fm_basis, FmbError};

pub const DEFAULT_BUDGET: u64 = 2_000_000;

/// Tail digits enumerated inside one parallel branch; the remaining high
/// digits index the branches.
const LOW_TAIL_DIGITS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    /// Maximum number of nodes, where a node is one tentative choice of an
    /// element of `G`.
    pub max_nodes: u64,
    /// Worker threads; `None` uses the global pool. The outcome does not
    /// depend on this.
    pub threads: Option<usize>,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            max_nodes: DEFAULT_BUDGET,
            threads: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome<F: Field> {
    /// A verified basis (in the adapted PBW basis), with the node count at
    /// which it was found in enumeration order.
    Found {
        basis: Vec<EnvElement<F>>,
        nodes: u64,
    },
    /// Every candidate was rejected. The digest hashes the node count of each
    /// branch in order.
    Exhausted {
        nodes: u64,
        digest: String,
    },
    BudgetExceeded {
        nodes: u64,
    },
    NotApplicable(String),
}

/// Element arithmetic used by the search.
trait Arena: Sync {
    type E: Clone + Eq + Hash + Send + Sync;
    type Ech: Clone + Send;

    fn zero(&self) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn is_zero(&self, a: &Self::E) -> bool;
    /// Height of a nonzero element in `ω`.
    fn layer(&self, a: &Self::E) -> usize;
    /// `a += c · e_coord`.
    fn add_unit(&self, a: &mut Self::E, coord: usize, c: u32);
    fn new_echelon(&self) -> Self::Ech;
    /// Inserts the part of `a` of exact height `layer`; false if dependent.
    fn insert(&self, ech: &mut Self::Ech, a: &Self::E, layer: usize) -> bool;
}

const WORDS: usize = 4;
type Bits = [u64; WORDS];

/// `F_2` elements of `u(L)` with `dim u(L) ≤ 256` as bit sets.
struct BitArena {
    dim: usize,
    table: Vec<Bits>,
    heights: Vec<usize>,
    masks: Vec<Bits>,
}

fn bits_iter(a: &Bits) -> impl Iterator<Item = usize> + '_ {
    a.iter().enumerate().flat_map(|(w, &word)| {
        let mut x = word;
        std::iter::from_fn(move || {
            if x == 0 {
                return None;
            }
            let t = x.trailing_zeros() as usize;
            x &= x - 1;
            Some(w * 64 + t)
        })
    })
}

impl BitArena {
    fn new<F: Field>(env: &EnvAlgebra<F>, heights: &[usize]) -> Self {
        let dim = env.dim();
        let f = env.field();
        let to_bits = |e: &EnvElement<F>| {
            let mut b = [0u64; WORDS];
            for (i, c) in e.coords.iter().enumerate() {
                if !f.is_zero(c) {
                    b[i / 64] |= 1 << (i % 64);
                }
            }
            b
        };
        let monomials: Vec<EnvElement<F>> = (0..dim).map(|i| env.monomial(i)).collect();
        let table = (0..dim * dim)
            .map(|k| to_bits(&env.mul(&monomials[k / dim], &monomials[k % dim])))
            .collect();
        let top = heights.iter().copied().max().unwrap_or(0);
        let masks = (0..=top)
            .map(|h| {
                let mut b = [0u64; WORDS];
                for (i, &hi) in heights.iter().enumerate() {
                    if hi == h {
                        b[i / 64] |= 1 << (i % 64);
                    }
                }
                b
            })
            .collect();
        Self {
            dim,
            table,
            heights: heights.to_vec(),
            masks,
        }
    }
}

impl Arena for BitArena {
    type E = Bits;
    type Ech = Vec<(usize, Bits)>;

    fn zero(&self) -> Bits {
        [0; WORDS]
    }

    fn mul(&self, a: &Bits, b: &Bits) -> Bits {
        let mut out = [0u64; WORDS];
        for i in bits_iter(a) {
            let row = &self.table[i * self.dim..(i + 1) * self.dim];
            for j in bits_iter(b) {
                for (o, x) in out.iter_mut().zip(&row[j]) {
                    *o ^= x;
                }
            }
        }
        out
    }

    fn is_zero(&self, a: &Bits) -> bool {
        a.iter().all(|&w| w == 0)
    }

    fn layer(&self, a: &Bits) -> usize {
        bits_iter(a).map(|i| self.heights[i]).min().expect("nonzero")
    }

    fn add_unit(&self, a: &mut Bits, coord: usize, c: u32) {
        if c % 2 == 1 {
            a[coord / 64] ^= 1 << (coord % 64);
        }
    }

    fn new_echelon(&self) -> Self::Ech {
        Vec::new()
    }

    fn insert(&self, ech: &mut Self::Ech, a: &Bits, layer: usize) -> bool {
        let mut v = *a;
        for (w, m) in v.iter_mut().zip(&self.masks[layer]) {
            *w &= m;
        }
        for (pc, row) in ech.iter() {
            if v[pc / 64] >> (pc % 64) & 1 == 1 {
                for (x, y) in v.iter_mut().zip(row) {
                    *x ^= y;
                }
            }
        }
        let lead = bits_iter(&v).next();
        match lead {
            Some(pc) => {
                ech.push((pc, v));
                true
            }
            None => false,
        }
    }
}

/// Dense elements over any prime field.
struct DenseArena<'a, F: Field> {
    env: &'a EnvAlgebra<F>,
    heights: &'a [usize],
}

impl<F: Field> Arena for DenseArena<'_, F> {
    type E = EnvElement<F>;
    type Ech = IncrementalEchelon<F>;

    fn zero(&self) -> Self::E {
        self.env.zero()
    }

    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E {
        self.env.mul(a, b)
    }

    fn is_zero(&self, a: &Self::E) -> bool {
        self.env.is_zero(a)
    }

    fn layer(&self, a: &Self::E) -> usize {
        self.env.terms(a).map(|(i, _)| self.heights[i]).min().expect("nonzero")
    }

    fn add_unit(&self, a: &mut Self::E, coord: usize, c: u32) {
        let f = self.env.field();
        a.coords[coord] = f.add(&a.coords[coord], &f.from_i64(c as i64));
    }

    fn new_echelon(&self) -> Self::Ech {
        IncrementalEchelon::new(self.env.field().clone())
    }

    fn insert(&self, ech: &mut Self::Ech, a: &Self::E, layer: usize) -> bool {
        let f = self.env.field();
        let v: Vec<F::Elem> = a
            .coords
            .iter()
            .zip(self.heights)
            .map(|(c, &h)| if h == layer { c.clone() } else { f.zero() })
            .collect();
        ech.insert(&v)
    }
}

/// Words generated so far, with one echelon per height.
struct State<A: Arena> {
    gens: Vec<A::E>,
    words: Vec<A::E>,
    seen: HashSet<A::E>,
    layers: Vec<A::Ech>,
}

impl<A: Arena> Clone for State<A> {
    fn clone(&self) -> Self {
        State {
            gens: self.gens.clone(),
            words: self.words.clone(),
            seen: self.seen.clone(),
            layers: self.layers.clone(),
        }
    }
}

struct Space<'a, A: Arena> {
    arena: &'a A,
    p: u32,
    /// Monomial indices of the height-one generators.
    leading: Vec<usize>,
    /// Monomial indices spanning `ω²`.
    tail: Vec<usize>,
    target: usize,
    top_layer: usize,
}

#[derive(Clone, Copy)]
enum Step {
    Found,
    Exhausted,
    OverBudget,
    Cancelled,
}

impl<'a, A: Arena> Space<'a, A> {
    fn empty_state(&self) -> State<A> {
        State {
            gens: Vec::new(),
            words: Vec::new(),
            seen: HashSet::new(),
            layers: (0..=self.top_layer).map(|_| self.arena.new_echelon()).collect(),
        }
    }

    fn leading_element(&self, index: usize) -> A::E {
        let mut e = self.arena.zero();
        let mut k = index;
        for &coord in &self.leading {
            let d = (k % self.p as usize) as u32;
            k /= self.p as usize;
            if d != 0 {
                self.arena.add_unit(&mut e, coord, d);
            }
        }
        e
    }

    /// Adds `w` as a new word; false if it breaks independence within its height.
    fn add_word(&self, st: &mut State<A>, w: A::E) -> bool {
        let layer = self.arena.layer(&w);
        if layer >= st.layers.len() || !self.arena.insert(&mut st.layers[layer], &w, layer) {
            return false;
        }
        st.seen.insert(w.clone());
        st.words.push(w);
        st.words.len() <= self.target
    }

    /// Extends the state by generator `g` and closes under right
    /// multiplication by all generators.
    fn extend(&self, mut st: State<A>, g: A::E) -> Option<State<A>> {
        let new_gen = st.gens.len();
        st.gens.push(g.clone());
        let mut pending: Vec<(usize, usize)> = (0..st.words.len()).map(|w| (w, new_gen)).collect();
        if !st.seen.contains(&g) {
            if !self.add_word(&mut st, g) {
                return None;
            }
            let w = st.words.len() - 1;
            pending.extend((0..st.gens.len()).map(|k| (w, k)));
        }
        while let Some((w, k)) = pending.pop() {
            let prod = self.arena.mul(&st.words[w], &st.gens[k]);
            if self.arena.is_zero(&prod) || st.seen.contains(&prod) {
                continue;
            }
            if !self.add_word(&mut st, prod) {
                return None;
            }
            let nw = st.words.len() - 1;
            pending.extend((0..st.gens.len()).map(|k| (nw, k)));
        }
        Some(st)
    }

    fn tail_len(&self) -> usize {
        self.tail.len()
    }

    /// Depth-first search below `st`, choosing generators with leading index
    /// greater than `min_lead`. Tail digits `0..low` run in Gray-code order
    /// from `start`; `fixed_high` pins the first choice when set.
    #[allow(clippy::too_many_arguments)]
    fn dfs(
        &self,
        st: State<A>,
        min_lead: usize,
        first: Option<(usize, A::E, usize)>,
        nodes: &mut u64,
        cap: u64,
        interrupt: &dyn Fn(u64) -> Option<Step>,
        found: &mut Option<Vec<A::E>>,
    ) -> Step {
        let d = self.leading.len();
        if st.gens.len() == d {
            if st.words.len() == self.target {
                *found = Some(st.words);
                return Step::Found;
            }
            return Step::Exhausted;
        }
        let p = self.p as usize;
        let leads: Vec<usize> = match &first {
            Some((lead, _, _)) => vec![*lead],
            None => ((min_lead + 1)..p.pow(d as u32)).collect(),
        };
        for lead in leads {
            let (mut g, digits) = match &first {
                Some((_, base, low)) => (base.clone(), *low),
                None => (self.leading_element(lead), self.tail_len()),
            };
            // base-p counter of the previous step; the digit after its
            // trailing (p - 1) digits is the one that moves
            let mut counter = vec![0usize; digits];
            for step in 0usize.. {
                if step > 0 {
                    let t = counter.iter().take_while(|&&c| c == p - 1).count();
                    if t == digits {
                        break;
                    }
                    counter[..t].iter_mut().for_each(|c| *c = 0);
                    counter[t] += 1;
                    self.arena.add_unit(&mut g, self.tail[t], 1);
                }
                *nodes += 1;
                if *nodes > cap {
                    return Step::OverBudget;
                }
                if (*nodes).is_multiple_of(1024) {
                    if let Some(step) = interrupt(*nodes) {
                        return step;
                    }
                }
                let Some(next) = self.extend(st.clone(), g.clone()) else {
                    continue;
                };
                match self.dfs(next, lead, None, nodes, cap, interrupt, found) {
                    Step::Exhausted => {}
                    other => return other,
                }
            }
        }
        Step::Exhausted
    }
}

struct BranchResult<E> {
    nodes: u64,
    step: Step,
    found: Option<Vec<E>>,
}

/// Branches handed to the thread pool at a time.
const CHUNK: usize = 4096;

/// Branches are `(leading index, high tail digits)` in lexicographic order,
/// high digits little-endian. Each runs the low digits in Gray-code order.
fn run<A: Arena>(space: &Space<'_, A>, budget: &SearchBudget) -> (Option<Vec<A::E>>, u64, Option<String>) {
    let p = space.p as usize;
    let d = space.leading.len();
    let m = space.tail_len();
    let low = m.min(LOW_TAIL_DIGITS);
    let high = m - low;
    let cap = budget.max_nodes;
    let pool = budget.threads.map(|k| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .expect("thread pool")
    });

    let mut total: u64 = 0;
    let mut hasher = Sha256::new();
    let mut lead = 1usize;
    let mut digits = vec![0usize; high];
    let lead_end = p.pow(d as u32);
    while lead < lead_end {
        let mut chunk: Vec<(usize, Vec<usize>)> = Vec::with_capacity(CHUNK);
        while chunk.len() < CHUNK && lead < lead_end {
            chunk.push((lead, digits.clone()));
            let t = digits.iter().take_while(|&&c| c == p - 1).count();
            if t == high {
                digits.iter_mut().for_each(|c| *c = 0);
                lead += 1;
            } else {
                digits[..t].iter_mut().for_each(|c| *c = 0);
                digits[t] += 1;
            }
        }
        let remaining = cap - total;
        let stop_at = AtomicUsize::new(usize::MAX);
        // lower bounds on each branch's final node count
        let progress: Vec<AtomicU64> = chunk.iter().map(|_| AtomicU64::new(0)).collect();
        let explore = |(idx, (lead, high)): (usize, &(usize, Vec<usize>))| -> BranchResult<A::E> {
            if stop_at.load(Ordering::Relaxed) < idx {
                return BranchResult {
                    nodes: 0,
                    step: Step::Cancelled,
                    found: None,
                };
            }
            let mut base = space.leading_element(*lead);
            for (t, &digit) in high.iter().enumerate() {
                if digit != 0 {
                    space.arena.add_unit(&mut base, space.tail[low + t], digit as u32);
                }
            }
            let mut nodes = 0;
            let mut found = None;
            // Once the branches up to this one have together used more than
            // the budget, the merge is bound to stop at or before this branch.
            let interrupt = |n: u64| {
                progress[idx].store(n, Ordering::Relaxed);
                if stop_at.load(Ordering::Relaxed) < idx {
                    return Some(Step::Cancelled);
                }
                let prefix: u64 = progress[..=idx].iter().map(|c| c.load(Ordering::Relaxed)).sum();
                (prefix > remaining).then_some(Step::OverBudget)
            };
            let step = space.dfs(
                space.empty_state(),
                0,
                Some((*lead, base, low)),
                &mut nodes,
                remaining,
                &interrupt,
                &mut found,
            );
            progress[idx].store(nodes, Ordering::Relaxed);
            if matches!(step, Step::Found | Step::OverBudget) {
                stop_at.fetch_min(idx, Ordering::Relaxed);
            }
            BranchResult { nodes, step, found }
        };
        let results: Vec<BranchResult<A::E>> = match &pool {
            Some(pool) => pool.install(|| chunk.par_iter().enumerate().map(explore).collect()),
            None => chunk.par_iter().enumerate().map(explore).collect(),
        };

        // sequential semantics: stop at the first branch that finds a basis
        // or pushes the cumulative count past the budget
        for r in results {
            total += r.nodes;
            hasher.update(r.nodes.to_le_bytes());
            match r.step {
                _ if total > cap => return (None, cap, None),
                Step::Found => return (r.found, total, None),
                Step::OverBudget => return (None, cap, None),
                Step::Cancelled => unreachable!("cancelled branches follow a decisive one"),
                Step::Exhausted => {}
            }
        }
    }
    (None, total, Some(hex::encode(hasher.finalize())))
}

/// Searches for a filtered multiplicative basis of `u(L)`. Complete over
/// prime fields: `Exhausted` means no such basis exists.
pub fn search_fmb<F: Field>(analysis: &Analysis<F>, budget: &SearchBudget) -> Result<SearchOutcome<F>, FmbError> {
    let env = &analysis.env;
    let f = env.field();
    if f.elements().is_none() {
        return Ok(SearchOutcome::NotApplicable(format!(
            "search needs a finite field, not {}",
            f.name()
        )));
    }
    if env.dim() == 1 {
        let basis = vec![env.one()];
        return Ok(SearchOutcome::Found { basis, nodes: 0 });
    }
    let heights = &analysis.monomial_heights;
    let ix = env.indexer();
    let leading: Vec<usize> = (0..analysis.adapted.dim())
        .filter(|&i| analysis.heights[i] == 1)
        .map(|i| ix.generator(i))
        .collect();
    let tail: Vec<usize> = (0..env.dim()).filter(|&i| heights[i] >= 2).collect();
    let target = env.dim() - 1;
    let top_layer = heights.iter().copied().max().unwrap_or(0);
    let p = f.characteristic();

    let (words, nodes, digest) = if p == 2 && env.dim() <= WORDS * 64 {
        let arena = BitArena::new(env, heights);
        let space = Space {
            arena: &arena,
            p,
            leading,
            tail,
            target,
            top_layer,
        };
        let (w, n, d) = run(&space, budget);
        let words = w.map(|ws| {
            ws.iter()
                .map(|e| EnvElement {
                    coords: (0..env.dim())
                        .map(|i| {
                            if e[i / 64] >> (i % 64) & 1 == 1 {
                                f.one()
                            } else {
                                f.zero()
                            }
                        })
                        .collect(),
                })
                .collect::<Vec<_>>()
        });
        (words, n, d)
    } else {
        let arena = DenseArena { env, heights };
        let space = Space {
            arena: &arena,
            p,
            leading,
            tail,
            target,
            top_layer,
        };
        run(&space, budget)
    };

    match (words, digest) {
        (Some(words), _) => {
            let mut basis = vec![env.one()];
            basis.extend(words);
            let report = is_fm_basis(analysis, &basis)?;
            if !report.is_valid() {
                return Err(FmbError::InternalInconsistency(
                    "search produced a set the verifier rejects".into(),
                ));
            }
            Ok(SearchOutcome::Found { basis, nodes })
        }
        (None, Some(digest)) => Ok(SearchOutcome::Exhausted { nodes, digest }),
        (None, None) => Ok(SearchOutcome::BudgetExceeded { nodes }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;
    use crate::liealg::RestrictedLieAlgebra;
    use std::sync::Arc;

    fn analysis(
        p: u32,
        names: &[&str],
        brackets: Vec<((usize, usize), Vec<u32>)>,
        pmap: Vec<Vec<u32>>,
    ) -> Analysis<PrimeField> {
        let f = PrimeField::new(p).unwrap();
        let names = names.iter().map(|s| s.to_string()).collect();
        Analysis::new(Arc::new(RestrictedLieAlgebra::new(f, names, brackets, pmap).unwrap())).unwrap()
    }

    #[test]
    fn heisenberg_search_finds_the_twisted_basis() {
        let a = analysis(2, &["a", "b", "c"], vec![((0, 1), vec![0, 0, 1])], vec![vec![0; 3]; 3]);
        let SearchOutcome::Found { basis, .. } = search_fmb(&a, &SearchBudget::default()).unwrap() else {
            panic!("expected a basis");
        };
        let mut shown: Vec<String> = basis.iter().map(|b| a.render(b)).collect();
        shown.sort();
        assert_eq!(shown, ["1", "a", "a*b", "a*b + c", "a*b*c", "a*c", "b", "b*c"]);
    }

    #[test]
    fn small_abelian_cases() {
        let a = analysis(2, &["x", "y"], vec![], vec![vec![0; 2]; 2]);
        assert!(matches!(
            search_fmb(&a, &SearchBudget::default()).unwrap(),
            SearchOutcome::Found { .. }
        ));
        let a = analysis(2, &["x"], vec![], vec![vec![0]]);
        let SearchOutcome::Found { basis, nodes } = search_fmb(&a, &SearchBudget::default()).unwrap() else {
            panic!("expected a basis");
        };
        assert_eq!(basis.len(), 2);
        assert_eq!(nodes, 1);
    }

    #[test]
    fn tiny_budget_is_reported() {
        let a = analysis(3, &["x", "y", "z"], vec![((0, 1), vec![0, 0, 1])], vec![vec![0; 3]; 3]);
        let budget = SearchBudget {
            max_nodes: 50,
            threads: Some(2),
        };
        assert_eq!(
            search_fmb(&a, &budget).unwrap(),
            SearchOutcome::BudgetExceeded { nodes: 50 }
        );
    }

    #[test]
    fn outcome_does_not_depend_on_threads() {
        let a = analysis(
            2,
            &["x", "y", "z"],
            vec![],
            vec![vec![0, 0, 1], vec![0, 0, 1], vec![0; 3]],
        );
        let one = search_fmb(
            &a,
            &SearchBudget {
                max_nodes: 100_000,
                threads: Some(1),
            },
        )
        .unwrap();
        let many = search_fmb(
            &a,
            &SearchBudget {
                max_nodes: 100_000,
                threads: Some(4),
            },
        )
        .unwrap();
        assert_eq!(one, many);
    }
}
