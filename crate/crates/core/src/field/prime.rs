use rand::Rng;

use super::{check_prime, Field, FieldError};

/// The prime field `F_p`, elements stored as residues in `[0, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self, FieldError> {
        check_prime(p)?;
        Ok(Self { p })
    }

    pub fn p(&self) -> u32 {
        self.p
    }
}

impl Field for PrimeField {
    type Elem = u32;

    fn characteristic(&self) -> u32 {
        self.p
    }

    fn name(&self) -> String {
        format!("F{}", self.p)
    }

    fn is_perfect(&self) -> bool {
        true
    }

    fn zero(&self) -> u32 {
        0
    }

    fn one(&self) -> u32 {
        1
    }

    fn from_i64(&self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }

    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }

    fn add(&self, a: &u32, b: &u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    fn sub(&self, a: &u32, b: &u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    fn neg(&self, a: &u32) -> u32 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }

    fn mul(&self, a: &u32, b: &u32) -> u32 {
        (a * b) % self.p
    }

    fn inv(&self, a: &u32) -> Result<u32, FieldError> {
        if *a == 0 {
            return Err(FieldError::DivisionByZero);
        }
        // a^(p-2)
        Ok(self.pow(a, (self.p - 2) as u64))
    }

    fn frobenius(&self, a: &u32) -> u32 {
        *a
    }

    fn pth_root(&self, a: &u32) -> Option<u32> {
        Some(*a)
    }

    fn elements(&self) -> Option<Vec<u32>> {
        Some((0..self.p).collect())
    }

    fn distinct_elements(&self, count: usize) -> Vec<u32> {
        (0..self.p).take(count).collect()
    }

    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        rng.gen_range(0..self.p)
    }

    fn format(&self, a: &u32) -> String {
        a.to_string()
    }

    fn parse(&self, s: &str) -> Result<u32, FieldError> {
        let s = s.trim();
        let v: i64 = s
            .parse()
            .map_err(|_| FieldError::Parse(s.to_string(), "expected an integer".into()))?;
        Ok(self.from_i64(v))
    }
}
