use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::surd::split_signed_terms;
use super::{ExactError, ParseError, Rat};

/// Dense univariate polynomial in `z` with exact coefficients, lowest degree
/// first. The zero polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Rat>,
}

impl Poly {
    pub fn from_coeffs(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(Rat::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Poly::from_coeffs(vec![c])
    }

    /// The identity polynomial `z`.
    pub fn z() -> Self {
        Poly::monomial(Rat::one(), 1)
    }

    pub fn monomial(c: Rat, n: usize) -> Self {
        let mut coeffs = vec![Rat::zero(); n + 1];
        coeffs[n] = c;
        Poly::from_coeffs(coeffs)
    }

    /// `z − c`
    pub fn linear_root(c: &Rat) -> Self {
        Poly::from_coeffs(vec![-c, Rat::one()])
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Rat {
        self.coeffs.get(n).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(Rat::is_one)
    }

    pub fn monic(&self) -> Poly {
        match self.leading() {
            Some(lc) => self.scale(&lc.recip()),
            None => Poly::zero(),
        }
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        self.coeffs
            .iter()
            .rev()
            .fold(Rat::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64())
    }

    pub fn derivative(&self) -> Poly {
        Poly::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rat::from(i as i64))
                .collect(),
        )
    }

    pub fn pow(&self, n: u32) -> Poly {
        (0..n).fold(Poly::one(), |acc, _| &acc * self)
    }

    /// Euclidean division. Errors on a zero divisor.
    pub fn div_rem(&self, divisor: &Poly) -> Result<(Poly, Poly), ExactError> {
        let dd = divisor.degree().ok_or(ExactError::DivisionByZero)?;
        let lc = divisor.leading().unwrap().recip();
        let mut rem = self.coeffs.clone();
        let Some(nd) = self.degree() else {
            return Ok((Poly::zero(), Poly::zero()));
        };
        if nd < dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut quo = vec![Rat::zero(); nd - dd + 1];
        for i in (0..=nd - dd).rev() {
            let c = &rem[i + dd] * &lc;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[i + j] -= &(&c * dc);
            }
            quo[i] = c;
        }
        rem.truncate(dd);
        Ok((Poly::from_coeffs(quo), Poly::from_coeffs(rem)))
    }

    /// Exact quotient; errors when the division leaves a remainder.
    pub fn div_exact(&self, divisor: &Poly) -> Result<Poly, ExactError> {
        let (q, r) = self.div_rem(divisor)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(ExactError::NonzeroRemainder)
        }
    }

    /// Monic greatest common divisor (zero only when both inputs are zero).
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).expect("nonzero divisor").1;
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// `P(z + c)`.
    pub fn taylor_shift(&self, c: &Rat) -> Poly {
        // Horner in the shifted variable
        let lin = Poly::from_coeffs(vec![c.clone(), Rat::one()]);
        self.coeffs.iter().rev().fold(Poly::zero(), |acc, k| {
            &(&acc * &lin) + &Poly::constant(k.clone())
        })
    }

    /// Multiplicity of `c` as a root (0 when `P(c) ≠ 0`; `None` for the zero
    /// polynomial).
    pub fn root_multiplicity(&self, c: &Rat) -> Option<u32> {
        if self.is_zero() {
            return None;
        }
        let shifted = self.taylor_shift(c);
        Some(shifted.coeffs.iter().take_while(|x| x.is_zero()).count() as u32)
    }

    /// All rational roots with multiplicity, found by the rational root
    /// test on the primitive integer multiple. Roots are returned in
    /// increasing order.
    pub fn rational_roots(&self) -> Vec<(Rat, u32)> {
        let mut roots = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return roots;
        }
        let mut rest = self.clone();
        let zeros = rest.coeffs.iter().take_while(|c| c.is_zero()).count();
        if zeros > 0 {
            roots.push((Rat::zero(), zeros as u32));
            rest = Poly::from_coeffs(rest.coeffs[zeros..].to_vec());
        }
        if rest.degree().unwrap_or(0) > 0 {
            let ints = rest.integer_coeffs();
            let lead = ints.last().unwrap().abs();
            let tail = ints[0].abs();
            for p in divisors(&tail) {
                for qd in divisors(&lead) {
                    for sign in [1i64, -1] {
                        let cand = Rat::new(&p * BigInt::from(sign), qd.clone());
                        let mut mult = 0;
                        while rest.degree().unwrap_or(0) > 0 && rest.eval(&cand).is_zero() {
                            rest = rest.div_exact(&Poly::linear_root(&cand)).unwrap();
                            mult += 1;
                        }
                        if mult > 0 {
                            roots.push((cand, mult));
                        }
                    }
                }
            }
        }
        roots.sort_by(|a, b| a.0.cmp(&b.0));
        roots
    }

    /// Integer multiple with coprime integer coefficients.
    fn integer_coeffs(&self) -> Vec<BigInt> {
        let lcm = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * Rat::from_int(lcm.clone())).numer().clone())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        ints.into_iter().map(|c| c / &g).collect()
    }
}

/// Positive divisors by trial division. Large prime cofactors are kept as a
/// single factor, so the list is complete whenever `n` has at most one
/// prime factor above the trial bound.
fn divisors(n: &BigInt) -> Vec<BigInt> {
    let mut primes: Vec<(BigInt, u32)> = Vec::new();
    let mut rest = n.abs();
    if rest.is_zero() {
        return vec![BigInt::one()];
    }
    let mut p = 2u64;
    while p <= 1_000_000 {
        let bp = BigInt::from(p);
        if &bp * &bp > rest {
            break;
        }
        let mut e = 0;
        while (&rest % &bp).is_zero() {
            rest /= &bp;
            e += 1;
        }
        if e > 0 {
            primes.push((bp, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if !rest.is_one() {
        primes.push((rest, 1));
    }
    let mut out = vec![BigInt::one()];
    for (prime, e) in primes {
        let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
        for d in &out {
            let mut pk = BigInt::one();
            for _ in 0..=e {
                next.push(d * &pk);
                pk *= &prime;
            }
        }
        out = next;
    }
    out.sort();
    out
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::from_coeffs((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::from_coeffs((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::from_coeffs(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (n, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let sep = match (first, c.is_negative()) {
                (true, false) => "",
                (true, true) => "-",
                (false, false) => " + ",
                (false, true) => " - ",
            };
            let var = match n {
                0 => String::new(),
                1 => "z".to_string(),
                _ => format!("z^{n}"),
            };
            let term = match (n, mag.is_one()) {
                (0, _) => mag.to_string(),
                (_, true) => var,
                (_, false) => format!("{mag}*{var}"),
            };
            write!(f, "{sep}{term}")?;
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl FromStr for Poly {
    type Err = ParseError;

    /// Parses sums of terms `c`, `c*z^n`, `z^n`, `c*z`; also accepts a plain
    /// comma-separated coefficient list, lowest degree first.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(ParseError::new(s, "empty polynomial"));
        }
        if !compact.contains('z') && compact.contains(',') {
            let coeffs = compact
                .split(',')
                .map(str::parse)
                .collect::<Result<Vec<Rat>, _>>()?;
            return Ok(Poly::from_coeffs(coeffs));
        }
        let mut acc = Poly::zero();
        for (sign, term) in split_signed_terms(&compact) {
            let (c, n) = parse_poly_term(term).map_err(|m| ParseError::new(s, m))?;
            let c = if sign < 0 { -c } else { c };
            acc = &acc + &Poly::monomial(c, n);
        }
        Ok(acc)
    }
}

fn parse_poly_term(term: &str) -> Result<(Rat, usize), &'static str> {
    let Some(pos) = term.find('z') else {
        return term
            .parse::<Rat>()
            .map(|c| (c, 0))
            .map_err(|_| "bad coefficient");
    };
    let prefix = &term[..pos];
    let suffix = &term[pos + 1..];
    let coeff = if prefix.is_empty() {
        Rat::one()
    } else {
        prefix
            .strip_suffix('*')
            .ok_or("expected '*' before z")?
            .parse::<Rat>()
            .map_err(|_| "bad coefficient")?
    };
    let power = if suffix.is_empty() {
        1
    } else {
        suffix
            .strip_prefix('^')
            .ok_or("expected '^' after z")?
            .parse::<usize>()
            .map_err(|_| "bad exponent")?
    };
    Ok((coeff, power))
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
