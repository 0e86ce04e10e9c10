//! `F_p(t)`: reduced fractions of dense polynomials over `F_p`.

use rand::Rng;

use super::{check_prime, Field, FieldError};

/// Dense polynomial over `F_p`, coefficients in ascending degree, no trailing
/// zeros. The zero polynomial is the empty vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Poly(pub Vec<u32>);

impl Poly {
    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn constant(c: u32) -> Self {
        let mut p = Poly(vec![c]);
        p.trim();
        p
    }

    /// `t^k`.
    pub fn monomial(k: usize) -> Self {
        let mut v = vec![0; k + 1];
        v[k] = 1;
        Poly(v)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn leading(&self) -> u32 {
        self.0.last().copied().unwrap_or(0)
    }

    fn trim(&mut self) {
        while self.0.last() == Some(&0) {
            self.0.pop();
        }
    }

    fn add(&self, other: &Poly, p: u32) -> Poly {
        let n = self.0.len().max(other.0.len());
        let mut out: Vec<u32> = (0..n)
            .map(|i| {
                let a = self.0.get(i).copied().unwrap_or(0);
                let b = other.0.get(i).copied().unwrap_or(0);
                (a + b) % p
            })
            .collect();
        while out.last() == Some(&0) {
            out.pop();
        }
        Poly(out)
    }

    fn neg(&self, p: u32) -> Poly {
        Poly(self.0.iter().map(|&c| (p - c) % p).collect())
    }

    fn mul(&self, other: &Poly, p: u32) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![0u32; self.0.len() + other.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.0.iter().enumerate() {
                out[i + j] = (out[i + j] + a * b) % p;
            }
        }
        let mut r = Poly(out);
        r.trim();
        r
    }

    fn scale(&self, c: u32, p: u32) -> Poly {
        let mut r = Poly(self.0.iter().map(|&a| a * c % p).collect());
        r.trim();
        r
    }

    /// Euclidean division; `divisor` must be nonzero.
    fn div_rem(&self, divisor: &Poly, p: u32) -> (Poly, Poly) {
        let dd = divisor.degree().expect("division by zero polynomial");
        let lead_inv = inv_mod(divisor.leading(), p);
        let mut rem = self.0.clone();
        if rem.len() < divisor.0.len() {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![0u32; rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            let c = rem[k] * lead_inv % p;
            if c == 0 {
                continue;
            }
            quot[k - dd] = c;
            for (i, &d) in divisor.0.iter().enumerate() {
                let idx = k - dd + i;
                rem[idx] = (rem[idx] + p - c * d % p) % p;
            }
        }
        let mut q = Poly(quot);
        q.trim();
        let mut r = Poly(rem);
        r.trim();
        (q, r)
    }

    fn monic(&self, p: u32) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(inv_mod(self.leading(), p), p)
    }

    /// Monic gcd; gcd(0, 0) = 0.
    pub fn gcd(&self, other: &Poly, p: u32) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b, p);
            a = b;
            b = r;
        }
        a.monic(p)
    }

    /// Substitute `t ↦ t^k` (coefficients unchanged).
    fn spread(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![0; (self.0.len() - 1) * k + 1];
        for (i, &c) in self.0.iter().enumerate() {
            out[i * k] = c;
        }
        Poly(out)
    }

    /// Inverse of [`Poly::spread`], if every exponent is divisible by `k`.
    fn compress(&self, k: usize) -> Option<Poly> {
        if self.0.iter().enumerate().any(|(i, &c)| c != 0 && i % k != 0) {
            return None;
        }
        Some(Poly(self.0.iter().step_by(k).copied().collect()))
    }

    fn format(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (i, &c) in self.0.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let var = match i {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{i}"),
            };
            parts.push(match (c, var.is_empty()) {
                (_, true) => c.to_string(),
                (1, false) => var,
                (_, false) => format!("{c}*{var}"),
            });
        }
        parts.join("+")
    }

    fn parse(s: &str, p: u32) -> Result<Poly, String> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err("empty polynomial".into());
        }
        let mut acc = Poly::zero();
        for (neg, term) in split_signed(&s)? {
            let mut t = parse_poly_term(term, p)?;
            if neg {
                t = t.neg(p);
            }
            acc = acc.add(&t, p);
        }
        Ok(acc)
    }
}

/// Splits `a+b-c` into signed terms. A leading sign is allowed.
pub(crate) fn split_signed(s: &str) -> Result<Vec<(bool, &str)>, String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let mut neg = false;
    let bytes = s.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        match b {
            b'(' => depth += 1,
            b')' => depth -= 1,
            b'+' | b'-' if depth == 0 => {
                // a sign directly after `^` or `*` is part of the term
                if i > 0 && matches!(bytes[i - 1], b'^' | b'*') {
                    continue;
                }
                if i > start {
                    out.push((neg, &s[start..i]));
                } else if i != 0 {
                    return Err(format!("dangling sign in `{s}`"));
                }
                neg = b == b'-';
                start = i + 1;
            }
            _ => {}
        }
        if depth < 0 {
            return Err(format!("unbalanced parentheses in `{s}`"));
        }
    }
    if depth != 0 {
        return Err(format!("unbalanced parentheses in `{s}`"));
    }
    if start >= s.len() {
        return Err(format!("dangling sign in `{s}`"));
    }
    out.push((neg, &s[start..]));
    Ok(out)
}

fn parse_poly_term(term: &str, p: u32) -> Result<Poly, String> {
    let (coef, var) = match term.find('t') {
        None => (term, ""),
        Some(pos) => (&term[..pos], &term[pos..]),
    };
    let coef = coef.strip_suffix('*').unwrap_or(coef);
    let c: u32 = if coef.is_empty() {
        1
    } else {
        let v: i64 = coef.parse().map_err(|_| format!("bad coefficient `{coef}`"))?;
        v.rem_euclid(p as i64) as u32
    };
    let k: usize = if var.is_empty() {
        0
    } else if var == "t" {
        1
    } else if let Some(e) = var.strip_prefix("t^") {
        e.parse().map_err(|_| format!("bad exponent in `{term}`"))?
    } else {
        return Err(format!("bad term `{term}`"));
    };
    Ok(Poly::monomial(k).scale(c, p))
}

fn inv_mod(a: u32, p: u32) -> u32 {
    assert!(!a.is_multiple_of(p), "inverse of zero");
    let mut r = 1u32;
    let mut b = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// A reduced fraction `num/den` with `den` monic and `gcd(num, den) = 1`.
/// Zero is `0/1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatFunc {
    pub num: Poly,
    pub den: Poly,
}

/// The rational function field `F_p(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RationalFunctionField {
    p: u32,
}

impl RationalFunctionField {
    pub fn new(p: u32) -> Result<Self, FieldError> {
        check_prime(p)?;
        Ok(Self { p })
    }

    /// The indeterminate `t`.
    pub fn t(&self) -> RatFunc {
        self.poly(Poly::monomial(1))
    }

    pub fn poly(&self, num: Poly) -> RatFunc {
        RatFunc {
            num,
            den: Poly::constant(1),
        }
    }

    /// Builds `num/den` in canonical form.
    pub fn fraction(&self, num: Poly, den: Poly) -> Result<RatFunc, FieldError> {
        if den.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(self.reduce(num, den))
    }

    fn reduce(&self, num: Poly, den: Poly) -> RatFunc {
        let p = self.p;
        if num.is_zero() {
            return self.zero();
        }
        let g = num.gcd(&den, p);
        let (mut n, _) = num.div_rem(&g, p);
        let (mut d, _) = den.div_rem(&g, p);
        let lc = inv_mod(d.leading(), p);
        n = n.scale(lc, p);
        d = d.scale(lc, p);
        RatFunc { num: n, den: d }
    }
}

impl Field for RationalFunctionField {
    type Elem = RatFunc;

    fn characteristic(&self) -> u32 {
        self.p
    }

    fn name(&self) -> String {
        format!("F{}(t)", self.p)
    }

    fn is_perfect(&self) -> bool {
        false
    }

    fn zero(&self) -> RatFunc {
        RatFunc {
            num: Poly::zero(),
            den: Poly::constant(1),
        }
    }

    fn one(&self) -> RatFunc {
        self.poly(Poly::constant(1))
    }

    fn from_i64(&self, v: i64) -> RatFunc {
        self.poly(Poly::constant(v.rem_euclid(self.p as i64) as u32))
    }

    fn is_zero(&self, a: &RatFunc) -> bool {
        a.num.is_zero()
    }

    fn add(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        let p = self.p;
        if a.den == b.den {
            return self.reduce(a.num.add(&b.num, p), a.den.clone());
        }
        let num = a.num.mul(&b.den, p).add(&b.num.mul(&a.den, p), p);
        self.reduce(num, a.den.mul(&b.den, p))
    }

    fn sub(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        self.add(a, &self.neg(b))
    }

    fn neg(&self, a: &RatFunc) -> RatFunc {
        RatFunc {
            num: a.num.neg(self.p),
            den: a.den.clone(),
        }
    }

    fn mul(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        let p = self.p;
        self.reduce(a.num.mul(&b.num, p), a.den.mul(&b.den, p))
    }

    fn inv(&self, a: &RatFunc) -> Result<RatFunc, FieldError> {
        if a.num.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(self.reduce(a.den.clone(), a.num.clone()))
    }

    fn frobenius(&self, a: &RatFunc) -> RatFunc {
        // coefficients are fixed by Frobenius on F_p
        let k = self.p as usize;
        RatFunc {
            num: a.num.spread(k),
            den: a.den.spread(k),
        }
    }

    fn pth_root(&self, a: &RatFunc) -> Option<RatFunc> {
        let k = self.p as usize;
        Some(RatFunc {
            num: a.num.compress(k)?,
            den: a.den.compress(k)?,
        })
    }

    fn elements(&self) -> Option<Vec<RatFunc>> {
        None
    }

    fn distinct_elements(&self, count: usize) -> Vec<RatFunc> {
        // polynomials enumerated by their base-p digit encoding
        (0..count)
            .map(|mut k| {
                let mut coeffs = Vec::new();
                while k > 0 {
                    coeffs.push((k % self.p as usize) as u32);
                    k /= self.p as usize;
                }
                self.poly(Poly(coeffs))
            })
            .collect()
    }

    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> RatFunc {
        let p = self.p;
        let mut rand_poly = |max_deg: usize| {
            let mut v: Vec<u32> = (0..=rng.gen_range(0..=max_deg)).map(|_| rng.gen_range(0..p)).collect();
            while v.last() == Some(&0) {
                v.pop();
            }
            Poly(v)
        };
        let num = rand_poly(2);
        let mut den = rand_poly(2);
        if den.is_zero() {
            den = Poly::constant(1);
        }
        self.reduce(num, den)
    }

    fn format(&self, a: &RatFunc) -> String {
        if a.den == Poly::constant(1) {
            format!("({})", a.num.format())
        } else {
            format!("({})/({})", a.num.format(), a.den.format())
        }
    }

    fn parse(&self, s: &str) -> Result<RatFunc, FieldError> {
        let err = |m: String| FieldError::Parse(s.to_string(), m);
        let body: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let (num_s, den_s) = match split_fraction(&body) {
            Some((n, d)) => (n, Some(d)),
            None => (body.as_str(), None),
        };
        let num = Poly::parse(strip_parens(num_s), self.p).map_err(err)?;
        let den = match den_s {
            Some(d) => Poly::parse(strip_parens(d), self.p).map_err(err)?,
            None => Poly::constant(1),
        };
        self.fraction(num, den)
    }
}

fn strip_parens(s: &str) -> &str {
    s.strip_prefix('(').and_then(|r| r.strip_suffix(')')).unwrap_or(s)
}

/// Splits `(a)/(b)` at the top-level slash.
fn split_fraction(s: &str) -> Option<(&str, &str)> {
    let mut depth = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            '/' if depth == 0 => return Some((&s[..i], &s[i + 1..])),
            _ => {}
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2t() -> RationalFunctionField {
        RationalFunctionField::new(2).unwrap()
    }

    #[test]
    fn common_denominator_sum() {
        let f = f2t();
        let a = f.parse("(t)/(t+1)").unwrap();
        let b = f.parse("(1)/(t+1)").unwrap();
        assert_eq!(f.add(&a, &b), f.one());
    }

    #[test]
    fn frobenius_examples() {
        let f = f2t();
        assert_eq!(f.frobenius(&f.parse("t+1").unwrap()), f.parse("t^2+1").unwrap());
        assert_eq!(f.frobenius(&f.parse("(1)/(t)").unwrap()), f.parse("(1)/(t^2)").unwrap());
    }

    #[test]
    fn pth_roots() {
        let f = f2t();
        assert_eq!(f.pth_root(&f.parse("t^2").unwrap()), Some(f.t()));
        assert_eq!(f.pth_root(&f.t()), None);
        assert_eq!(
            f.pth_root(&f.parse("(t^2+1)/(t^4)").unwrap()),
            Some(f.parse("(t+1)/(t^2)").unwrap())
        );
        let f3 = RationalFunctionField::new(3).unwrap();
        assert_eq!(f3.pth_root(&f3.parse("t^2").unwrap()), None);
        assert_eq!(f3.pth_root(&f3.parse("2*t^3").unwrap()), Some(f3.parse("2*t").unwrap()));
    }

    #[test]
    fn canonical_form() {
        let f = RationalFunctionField::new(3).unwrap();
        // (2t^2 + 2t)/(2t) = t + 1
        let a = f.parse("(2*t^2+2*t)/(2*t)").unwrap();
        assert_eq!(a, f.parse("t+1").unwrap());
        assert_eq!(f.format(&a), "(t+1)");
        let z = f.parse("(0)/(t+2)").unwrap();
        assert_eq!(z, f.zero());
        assert_eq!(f.parse("(1)/(0)"), Err(FieldError::DivisionByZero));
    }

    #[test]
    fn format_round_trip() {
        let f = RationalFunctionField::new(5).unwrap();
        for s in ["(3*t^2+t+4)/(t+2)", "(t)", "(0)", "(2)/(t^3+1)", "(4*t)"] {
            let a = f.parse(s).unwrap();
            assert_eq!(f.format(&a), s);
            assert_eq!(f.parse(&f.format(&a)).unwrap(), a);
        }
    }

    #[test]
    fn bad_scalars_rejected() {
        let f = f2t();
        assert!(f.parse("(t").is_err());
        assert!(f.parse("t^x").is_err());
        assert!(f.parse("q").is_err());
        assert!(f.parse("t+").is_err());
    }

    #[test]
    fn distinct_nodes_are_distinct() {
        let f = RationalFunctionField::new(3).unwrap();
        let nodes = f.distinct_elements(30);
        for i in 0..nodes.len() {
            for j in 0..i {
                assert_ne!(nodes[i], nodes[j]);
            }
        }
    }
}
