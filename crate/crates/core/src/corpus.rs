//! Bundled example algebras and random generators for property tests.

use rand::Rng;

use crate::field::{Field, PrimeField};
use crate::format::{parse_algebra, AnyAlgebra};
use crate::liealg::RestrictedLieAlgebra;
use crate::linalg::{rref, Vector};

macro_rules! entry {
    ($name:literal) => {
        ($name, include_str!(concat!("../corpus/", $name, ".rla")))
    };
}

/// `(name, file text)` for every bundled algebra.
pub const CORPUS: &[(&str, &str)] = &[
    entry!("heisenberg_p2"),
    entry!("heisenberg_p3"),
    entry!("powerful_p3"),
    entry!("powerful_p2"),
    entry!("l_alpha_t"),
    entry!("l_alpha_t2"),
    entry!("l_alpha_f2"),
    entry!("abelian_cyclic_p2"),
    entry!("abelian_zero_p3"),
    entry!("filiform_p3"),
];

pub fn text(name: &str) -> Option<&'static str> {
    CORPUS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn load(name: &str) -> Option<AnyAlgebra> {
    text(name).map(|t| parse_algebra(t).expect("bundled algebras are valid"))
}

/// Loads a bundled algebra that is defined over a prime field.
pub fn load_prime(name: &str) -> Option<RestrictedLieAlgebra<PrimeField>> {
    match load(name)? {
        AnyAlgebra::Prime(a) => Some(a),
        AnyAlgebra::RatFunc(_) => None,
    }
}

pub fn all() -> Vec<(&'static str, AnyAlgebra)> {
    CORPUS
        .iter()
        .map(|(n, t)| (*n, parse_algebra(t).expect("bundled algebras are valid")))
        .collect()
}

fn names(dim: usize) -> Vec<String> {
    (0..dim).map(|i| format!("x{}", i + 1)).collect()
}

/// All valid algebras over `F_2` on `x1, x2, x3` with `[x1,x2] ∈ span{x3}`,
/// `x1^[2] ∈ span{x2,x3}`, `x2^[2] ∈ span{x3}`, `x3^[2] = 0`. Of the 16 tables
/// of this shape, the ones violating restrictedness are dropped.
pub fn triangular_f2_dim3() -> Vec<RestrictedLieAlgebra<PrimeField>> {
    let f = PrimeField::new(2).expect("2 is supported");
    let mut out = Vec::new();
    for code in 0u32..16 {
        let bit = |k: u32| (code >> k) & 1;
        let brackets = vec![((0, 1), vec![0, 0, bit(0)])];
        let pmap = vec![vec![0, bit(1), bit(2)], vec![0, 0, bit(3)], vec![0, 0, 0]];
        if let Ok(a) = RestrictedLieAlgebra::new(f, names(3), brackets, pmap) {
            out.push(a);
        }
    }
    out
}

/// A random valid algebra over `F_p` whose brackets and `p`-map strictly raise
/// the basis index, which makes it `p`-nilpotent. Tables failing validation
/// are redrawn.
pub fn random_triangular<R: Rng + ?Sized>(
    rng: &mut R,
    p: u32,
    dim: usize,
    abelian: bool,
) -> RestrictedLieAlgebra<PrimeField> {
    let f = PrimeField::new(p).expect("supported prime");
    loop {
        let above = |rng: &mut R, i: usize| -> Vector<PrimeField> {
            (0..dim).map(|k| if k > i { f.random(rng) } else { 0 }).collect()
        };
        let mut brackets = Vec::new();
        if !abelian {
            for i in 0..dim {
                for j in i + 1..dim {
                    brackets.push(((i, j), above(rng, j)));
                }
            }
        }
        let pmap = (0..dim).map(|i| above(rng, i)).collect();
        if let Ok(a) = RestrictedLieAlgebra::new(f, names(dim), brackets, pmap) {
            return a;
        }
    }
}

/// The same algebra presented in a random basis.
pub fn random_change_of_basis<F: Field, R: Rng + ?Sized>(
    rng: &mut R,
    alg: &RestrictedLieAlgebra<F>,
) -> RestrictedLieAlgebra<F> {
    let f = alg.field();
    let n = alg.dim();
    loop {
        let rows: Vec<Vector<F>> = (0..n).map(|_| (0..n).map(|_| f.random(rng)).collect()).collect();
        if rref(f, n, rows.clone()).expect("square rows").1 < n {
            continue;
        }
        let names = (0..n).map(|i| format!("y{}", i + 1)).collect();
        return alg.change_basis(&rows, names).expect("invertible change of basis");
    }
}
