use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{ExactError, ParseError, Rat};

/// Trial-division bound used when extracting square factors from a radicand.
/// Cofactors left over after this bound are only checked for being a perfect
/// square, which is exact for every radicand below `TRIAL_LIMIT^3`.
const TRIAL_LIMIT: u64 = 1_000_000;

/// Exact element `a + b·√d` of a quadratic extension of the rationals.
///
/// Canonical form: `d` is a square-free integer different from 0 and 1, or
/// `b = 0` and `d = 1` for a plain rational. A negative `d` is the imaginary
/// case `a + b·i·√|d|`. Because the form is canonical, structural equality is
/// numeric equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Surd {
    a: Rat,
    b: Rat,
    d: BigInt,
}

impl Surd {
    pub fn rational(a: Rat) -> Self {
        Surd {
            a,
            b: Rat::zero(),
            d: BigInt::one(),
        }
    }

    pub fn zero() -> Self {
        Surd::rational(Rat::zero())
    }

    /// Canonical representative of `a + b·√r`.
    pub fn new(a: Rat, b: Rat, r: Rat) -> Self {
        if b.is_zero() || r.is_zero() {
            return Surd::rational(a);
        }
        // √(n/m) = √(n·m) / m
        let m = r.denom().clone();
        let prod = r.numer() * &m;
        let negative = prod.is_negative();
        let (square, free) = square_free_split(&prod.abs());
        let coeff = &b * Rat::new(square, m);
        match (free.is_one(), negative) {
            (true, false) => Surd::rational(a + coeff),
            (_, neg) => Surd {
                a,
                b: coeff,
                d: if neg { -free } else { free },
            },
        }
    }

    /// Canonical `√r`.
    pub fn sqrt(r: &Rat) -> Self {
        Surd::new(Rat::zero(), Rat::one(), r.clone())
    }

    pub fn a(&self) -> &Rat {
        &self.a
    }

    pub fn b(&self) -> &Rat {
        &self.b
    }

    /// Signed square-free radicand (`1` for rationals).
    pub fn discriminant(&self) -> &BigInt {
        &self.d
    }

    /// Canonical positive radicand `|d|`.
    pub fn radicand(&self) -> BigInt {
        self.d.abs()
    }

    pub fn is_imaginary(&self) -> bool {
        self.d.is_negative()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_real(&self) -> bool {
        !self.is_imaginary()
    }

    pub fn as_rational(&self) -> Option<&Rat> {
        self.is_rational().then_some(&self.a)
    }

    pub fn is_zero(&self) -> bool {
        self.is_rational() && self.a.is_zero()
    }

    /// Same quadratic field (rationals are compatible with every field).
    pub fn compatible(&self, other: &Surd) -> bool {
        self.is_rational() || other.is_rational() || self.d == other.d
    }

    fn field_of(&self, other: &Surd) -> Result<BigInt, ExactError> {
        if !self.compatible(other) {
            return Err(ExactError::IncompatibleRadicands {
                left: self.d.clone(),
                right: other.d.clone(),
            });
        }
        Ok(if self.is_rational() {
            other.d.clone()
        } else {
            self.d.clone()
        })
    }

    fn build(a: Rat, b: Rat, d: BigInt) -> Surd {
        if b.is_zero() {
            Surd::rational(a)
        } else {
            Surd { a, b, d }
        }
    }

    pub fn try_add(&self, other: &Surd) -> Result<Surd, ExactError> {
        let d = self.field_of(other)?;
        Ok(Surd::build(&self.a + &other.a, &self.b + &other.b, d))
    }

    pub fn try_sub(&self, other: &Surd) -> Result<Surd, ExactError> {
        let d = self.field_of(other)?;
        Ok(Surd::build(&self.a - &other.a, &self.b - &other.b, d))
    }

    pub fn try_mul(&self, other: &Surd) -> Result<Surd, ExactError> {
        let d = self.field_of(other)?;
        let dr = Rat::from_int(d.clone());
        let a = &self.a * &other.a + &self.b * &other.b * &dr;
        let b = &self.a * &other.b + &self.b * &other.a;
        Ok(Surd::build(a, b, d))
    }

    /// Field norm `a² − b²d`; nonzero for every nonzero element.
    pub fn norm(&self) -> Rat {
        &self.a * &self.a - &self.b * &self.b * Rat::from_int(self.d.clone())
    }

    pub fn conj(&self) -> Surd {
        Surd::build(self.a.clone(), -&self.b, self.d.clone())
    }

    pub fn try_div(&self, other: &Surd) -> Result<Surd, ExactError> {
        if other.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        let num = self.try_mul(&other.conj())?;
        let n = other.norm();
        Ok(Surd::build(&num.a / &n, &num.b / &n, num.d))
    }

    pub fn add_rat(&self, r: &Rat) -> Surd {
        Surd::build(&self.a + r, self.b.clone(), self.d.clone())
    }

    pub fn scale(&self, r: &Rat) -> Surd {
        Surd::build(&self.a * r, &self.b * r, self.d.clone())
    }

    /// Sign normalization: leading radical coefficient nonnegative, or the
    /// rational part nonnegative when there is no radical. The flag reports
    /// whether the sign was flipped.
    pub fn sign_normalized(&self) -> (Surd, bool) {
        let flip = if self.is_rational() {
            self.a.is_negative()
        } else {
            self.b.is_negative()
        };
        if flip {
            (-self.clone(), true)
        } else {
            (self.clone(), false)
        }
    }

    /// Integer witness `n` with `self = q + n`, when one exists.
    pub fn in_coset(&self, q: &Rat) -> Option<BigInt> {
        (self.as_rational()? - q).to_integer()
    }

    pub fn is_integer(&self) -> bool {
        self.as_rational().is_some_and(Rat::is_integer)
    }

    pub fn is_odd_integer(&self) -> bool {
        self.as_rational()
            .and_then(Rat::to_integer)
            .is_some_and(|n| n.is_odd())
    }

    /// Numeric value as `(re, im)`.
    pub fn to_complex_f64(&self) -> (f64, f64) {
        let root = self.radicand().to_f64().unwrap_or(f64::NAN).sqrt();
        let rad = self.b.to_f64() * root;
        if self.is_imaginary() {
            (self.a.to_f64(), rad)
        } else {
            (self.a.to_f64() + rad, 0.0)
        }
    }
}

impl std::ops::Neg for Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd::build(-self.a, -self.b, self.d)
    }
}

impl std::ops::Neg for &Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        -self.clone()
    }
}

impl From<Rat> for Surd {
    fn from(a: Rat) -> Self {
        Surd::rational(a)
    }
}

/// Splits `n > 0` as `square² · free` with `free` square-free.
fn square_free_split(n: &BigInt) -> (BigInt, BigInt) {
    if n.is_zero() {
        return (BigInt::zero(), BigInt::one());
    }
    let mut rest = n.clone();
    let mut square = BigInt::one();
    let mut free = BigInt::one();
    let mut p = 2u64;
    while p <= TRIAL_LIMIT {
        let bp = BigInt::from(p);
        if &bp * &bp > rest {
            break;
        }
        let mut e = 0u32;
        loop {
            let (quo, rem) = rest.div_rem(&bp);
            if !rem.is_zero() {
                break;
            }
            rest = quo;
            e += 1;
        }
        for _ in 0..e / 2 {
            square *= &bp;
        }
        if e % 2 == 1 {
            free *= &bp;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let s = rest.sqrt();
    if &s * &s == rest && !rest.is_one() {
        square *= s;
    } else {
        free *= rest;
    }
    (square, free)
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", self.a);
        }
        let unit = if self.is_imaginary() { "i*" } else { "" };
        let rad = self.radicand();
        let mag = self.b.abs();
        let radical = if mag.is_one() {
            format!("{unit}sqrt({rad})")
        } else {
            format!("{mag}*{unit}sqrt({rad})")
        };
        match (self.a.is_zero(), self.b.is_negative()) {
            (true, false) => write!(f, "{radical}"),
            (true, true) => write!(f, "-{radical}"),
            (false, false) => write!(f, "{} + {radical}", self.a),
            (false, true) => write!(f, "{} - {radical}", self.a),
        }
    }
}

impl fmt::Debug for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Surd {
    type Err = ParseError;

    /// Parses the rendering produced by `Display`, e.g. `1/2 - 3*sqrt(2)`,
    /// `i*sqrt(3)`, `-2/3`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(ParseError::new(s, "empty surd"));
        }
        let mut acc = Surd::zero();
        for (sign, term) in split_signed_terms(&compact) {
            let t = parse_surd_term(term).map_err(|m| ParseError::new(s, m))?;
            let t = if sign < 0 { -t } else { t };
            acc = acc
                .try_add(&t)
                .map_err(|e| ParseError::new(s, &e.to_string()))?;
        }
        Ok(acc)
    }
}

/// Splits `x+y-z` into signed terms, ignoring signs inside parentheses and
/// signs directly after `/`, `*` or `^`.
pub(crate) fn split_signed_terms(s: &str) -> Vec<(i32, &str)> {
    let bytes = s.as_bytes();
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0usize;
    let mut sign = 1;
    for (i, &c) in bytes.iter().enumerate() {
        match c {
            b'(' => depth += 1,
            b')' => depth -= 1,
            b'+' | b'-' if depth == 0 => {
                let prev = if i == 0 { None } else { Some(bytes[i - 1]) };
                if matches!(prev, Some(b'/' | b'*' | b'^')) {
                    continue;
                }
                if i > start {
                    out.push((sign, &s[start..i]));
                } else if i > 0 {
                    // consecutive signs such as "+-": fold into the next term
                    if c == b'-' {
                        sign = -sign;
                    }
                    start = i + 1;
                    continue;
                }
                sign = if c == b'-' { -1 } else { 1 };
                start = i + 1;
            }
            _ => {}
        }
    }
    if start < s.len() {
        out.push((sign, &s[start..]));
    }
    out
}

fn parse_surd_term(term: &str) -> Result<Surd, &'static str> {
    let Some(pos) = term.find("sqrt(") else {
        return term
            .parse::<Rat>()
            .map(Surd::rational)
            .map_err(|_| "bad rational term");
    };
    let inner = term[pos + 5..].strip_suffix(')').ok_or("unclosed sqrt(")?;
    let mut r: Rat = inner.parse().map_err(|_| "bad radicand")?;
    let mut prefix = &term[..pos];
    if let Some(p) = prefix.strip_suffix("i*") {
        prefix = p;
        r = -r;
    } else if prefix == "i" {
        prefix = "";
        r = -r;
    }
    let coeff = match prefix.strip_suffix('*') {
        Some(c) => c.parse::<Rat>().map_err(|_| "bad radical coefficient")?,
        None if prefix.is_empty() => Rat::one(),
        None => return Err("expected '*' before sqrt"),
    };
    Ok(Surd::new(Rat::zero(), coeff, r))
}

impl Serialize for Surd {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Surd {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
