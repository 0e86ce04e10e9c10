//! Exact scalar fields of positive characteristic.
//!
//! Two fields are supported: the prime field `F_p` (perfect) and the rational
//! function field `F_p(t)` (not perfect: `t` has no `p`-th root). Both are
//! exposed through the [`Field`] trait, which is a *context* object: elements
//! are plain values and all arithmetic goes through the field that owns them.

mod prime;
mod ratfunc;

pub use prime::PrimeField;
pub(crate) use ratfunc::split_signed;
pub use ratfunc::{Poly, RatFunc, RationalFunctionField};

use std::fmt::Debug;
use std::hash::Hash;

use rand::Rng;
use thiserror::Error;

/// Primes for which fields can be constructed.
pub const SUPPORTED_PRIMES: [u32; 4] = [2, 3, 5, 7];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields ({0} vs {1})")]
    MixedFields(String, String),
    #[error("unsupported characteristic {0}; expected one of 2, 3, 5, 7")]
    UnsupportedPrime(u32),
    #[error("cannot parse scalar `{0}`: {1}")]
    Parse(String, String),
}

pub trait Field: Clone + Debug + PartialEq + Eq + Hash + Send + Sync + 'static {
    type Elem: Clone + Debug + PartialEq + Eq + Hash + Ord + Send + Sync + 'static;

    fn characteristic(&self) -> u32;

    /// Short name used by the algebra file format, e.g. `F3` or `F2(t)`.
    fn name(&self) -> String;

    /// Whether every element has a `p`-th root.
    fn is_perfect(&self) -> bool;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    #[allow(clippy::wrong_self_convention)]
    fn from_i64(&self, v: i64) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem, FieldError>;

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem, FieldError> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    fn pow(&self, a: &Self::Elem, mut k: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            k >>= 1;
        }
        acc
    }

    /// `a ↦ a^p`.
    fn frobenius(&self, a: &Self::Elem) -> Self::Elem;

    /// The unique `r` with `r^p = a`, if it exists in the field.
    fn pth_root(&self, a: &Self::Elem) -> Option<Self::Elem>;

    /// All elements, for finite fields.
    fn elements(&self) -> Option<Vec<Self::Elem>>;

    /// `count` pairwise distinct elements (used as interpolation nodes).
    fn distinct_elements(&self, count: usize) -> Vec<Self::Elem>;

    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;

    fn format(&self, a: &Self::Elem) -> String;
    fn parse(&self, s: &str) -> Result<Self::Elem, FieldError>;

    /// True when `format(a)` must be parenthesised to act as a coefficient.
    fn needs_parens(&self, _a: &Self::Elem) -> bool {
        false
    }

    fn check_same(&self, other: &Self) -> Result<(), FieldError> {
        if self == other {
            Ok(())
        } else {
            Err(FieldError::MixedFields(self.name(), other.name()))
        }
    }
}

pub(crate) fn check_prime(p: u32) -> Result<(), FieldError> {
    if SUPPORTED_PRIMES.contains(&p) {
        Ok(())
    } else {
        Err(FieldError::UnsupportedPrime(p))
    }
}
