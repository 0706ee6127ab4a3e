use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{ExactError, ParseError, Poly, Rat};

/// A point of the Riemann sphere with rational affine coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Point {
    Finite(Rat),
    Infinity,
}

/// Reduced rational function `num / den` with monic `den`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Result<Self, ExactError> {
        if den.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(RatFunc::zero());
        }
        let g = num.gcd(&den);
        let num = num.div_exact(&g)?;
        let den = den.div_exact(&g)?;
        let lc = den.leading().unwrap().recip();
        Ok(RatFunc {
            num: num.scale(&lc),
            den: den.scale(&lc),
        })
    }

    pub fn zero() -> Self {
        RatFunc {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn constant(c: Rat) -> Self {
        RatFunc::from_poly(Poly::constant(c))
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc {
            num: p,
            den: Poly::one(),
        }
    }

    /// `c / (z − at)^n`
    pub fn pole_term(c: Rat, at: &Rat, n: u32) -> Self {
        RatFunc::new(Poly::constant(c), Poly::linear_root(at).pow(n)).expect("nonzero denominator")
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn checked_div(&self, rhs: &RatFunc) -> Result<RatFunc, ExactError> {
        if rhs.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        RatFunc::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }

    pub fn scale(&self, c: &Rat) -> RatFunc {
        if c.is_zero() {
            return RatFunc::zero();
        }
        RatFunc {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn derivative(&self) -> RatFunc {
        let num = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        RatFunc::new(num, &self.den * &self.den).expect("nonzero denominator")
    }

    pub fn pow(&self, n: u32) -> RatFunc {
        RatFunc {
            num: self.num.pow(n),
            den: self.den.pow(n),
        }
    }

    /// Value at `x`, or `None` at a pole.
    pub fn eval(&self, x: &Rat) -> Option<Rat> {
        let d = self.den.eval(x);
        (!d.is_zero()).then(|| self.num.eval(x) / d)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.num.eval_f64(x) / self.den.eval_f64(x)
    }

    /// Signed order: pole order at a finite point (negative for a zero,
    /// 0 at a regular nonzero point); `deg den − deg num` at infinity.
    /// `None` for the zero function, whose order is infinite.
    pub fn order_at(&self, at: &Point) -> Option<i64> {
        let nd = self.num.degree()? as i64;
        match at {
            Point::Infinity => Some(self.den.degree().unwrap() as i64 - nd),
            Point::Finite(c) => {
                let pole = self.den.root_multiplicity(c).unwrap() as i64;
                let zero = self.num.root_multiplicity(c).unwrap() as i64;
                Some(pole - zero)
            }
        }
    }

    /// Poles with multiplicities; errors unless the denominator splits over
    /// the rationals.
    pub fn poles(&self) -> Result<Vec<(Rat, u32)>, ExactError> {
        let roots = self.den.rational_roots();
        let product = roots.iter().fold(Poly::one(), |acc, (c, m)| {
            &acc * &Poly::linear_root(c).pow(*m)
        });
        if product != self.den {
            return Err(ExactError::IrrationalPoles {
                den: self.den.to_string(),
            });
        }
        Ok(roots)
    }

    /// Partial fraction decomposition over the supplied pole data, which must
    /// factor the denominator exactly.
    pub fn partial_fractions(&self, roots: &[(Rat, u32)]) -> Result<PartialFractions, ExactError> {
        let product = roots.iter().fold(Poly::one(), |acc, (c, m)| {
            &acc * &Poly::linear_root(c).pow(*m)
        });
        let (polynomial, rem) = self.num.div_rem(&self.den)?;
        if product != self.den {
            // distinguish "does not divide" from "divides but incomplete"
            let (_, r) = self.den.div_rem(&product)?;
            return Err(if r.is_zero() {
                ExactError::IncompleteFactorization
            } else {
                ExactError::NonzeroRemainder
            });
        }
        let mut poles = Vec::with_capacity(roots.len());
        for (c, m) in roots {
            let m = *m as usize;
            let cofactor = self.den.div_exact(&Poly::linear_root(c).pow(m as u32))?;
            let r = rem.taylor_shift(c);
            let qd = cofactor.taylor_shift(c);
            let q0 = qd.coeff(0);
            // series of r/qd at w = 0 up to w^(m-1)
            let mut series: Vec<Rat> = Vec::with_capacity(m);
            for n in 0..m {
                let mut acc = r.coeff(n);
                for i in 1..=n {
                    acc -= &(qd.coeff(i) * &series[n - i]);
                }
                series.push(acc / &q0);
            }
            // coefficient of (z-c)^-j is series[m-j]
            let coeffs = (1..=m).map(|j| series[m - j].clone()).collect();
            poles.push(PoleTerms {
                at: c.clone(),
                coeffs,
            });
        }
        Ok(PartialFractions { polynomial, poles })
    }

    /// Leading coefficient of the expansion at infinity, i.e. the coefficient
    /// of `z^{-order}` where `order` is the order at infinity.
    pub fn leading_at_infinity(&self) -> Option<Rat> {
        Some(self.num.leading()?.clone() / self.den.leading().unwrap())
    }
}

/// The `(z − at)^{-j}` coefficients attached to one pole; `coeffs[j-1]`
/// multiplies `(z − at)^{-j}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoleTerms {
    pub at: Rat,
    pub coeffs: Vec<Rat>,
}

impl PoleTerms {
    /// Coefficient of `(z − at)^{-j}` (zero beyond the stored order).
    pub fn coeff(&self, j: usize) -> Rat {
        self.coeffs
            .get(j.wrapping_sub(1))
            .cloned()
            .unwrap_or_default()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialFractions {
    pub polynomial: Poly,
    pub poles: Vec<PoleTerms>,
}

impl PartialFractions {
    pub fn recompose(&self) -> RatFunc {
        let mut acc = RatFunc::from_poly(self.polynomial.clone());
        for p in &self.poles {
            for (j, c) in p.coeffs.iter().enumerate() {
                if !c.is_zero() {
                    acc = &acc + &RatFunc::pole_term(c.clone(), &p.at, j as u32 + 1);
                }
            }
        }
        acc
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        if self.den == rhs.den {
            return RatFunc::new(&self.num + &rhs.num, self.den.clone()).unwrap();
        }
        RatFunc::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
        .unwrap()
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        self + &(-rhs)
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        RatFunc::new(&self.num * &rhs.num, &self.den * &rhs.den).unwrap()
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Add for RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: RatFunc) -> RatFunc {
        &self + &rhs
    }
}

impl Sub for RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: RatFunc) -> RatFunc {
        &self - &rhs
    }
}

impl Mul for RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: RatFunc) -> RatFunc {
        &self * &rhs
    }
}

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        -&self
    }
}

impl From<Poly> for RatFunc {
    fn from(p: Poly) -> Self {
        RatFunc::from_poly(p)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFunc({self})")
    }
}

impl FromStr for RatFunc {
    type Err = ParseError;

    /// Accepts `(num) / (den)`, `num ; den` (either side a polynomial
    /// expression or a coefficient list), or a bare polynomial.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let (num, den) = if let Some((n, d)) = t.split_once(';') {
            (n, d)
        } else if let Some((n, d)) = split_paren_quotient(t) {
            (n, d)
        } else {
            (t, "1")
        };
        let num: Poly = num.parse()?;
        let den: Poly = den.parse()?;
        RatFunc::new(num, den).map_err(|e| ParseError::new(s, &e.to_string()))
    }
}

fn split_paren_quotient(t: &str) -> Option<(&str, &str)> {
    let inner = t.strip_prefix('(')?;
    let mut depth = 1;
    for (i, c) in inner.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 {
                    let num = &inner[..i];
                    let rest = inner[i + 1..].trim_start().strip_prefix('/')?.trim();
                    let den = rest.strip_prefix('(')?.strip_suffix(')')?;
                    return Some((num, den));
                }
            }
            _ => {}
        }
    }
    None
}

impl Serialize for RatFunc {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RatFunc {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Zero for RatFunc {
    fn zero() -> Self {
        RatFunc::zero()
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}
