use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::exactnum::{Poly, Rat};

/// Polynomial with exact coefficients in the phase-space variables
/// `u₁…u_m, v₁…v_m`. Monomials are exponent vectors of length `2m`
/// (u exponents first), kept in lexicographic order.
#[derive(Clone, PartialEq, Eq)]
pub struct PolyObservable {
    m: usize,
    terms: BTreeMap<Vec<u32>, Rat>,
}

impl PolyObservable {
    pub fn zero(m: usize) -> Self {
        PolyObservable {
            m,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(m: usize, c: Rat) -> Self {
        let mut p = PolyObservable::zero(m);
        p.add_term(vec![0; 2 * m], c);
        p
    }

    /// The coordinate `u_i` (0-based).
    pub fn u(m: usize, i: usize) -> Self {
        Self::var(m, i)
    }

    /// The momentum `v_i` (0-based).
    pub fn v(m: usize, i: usize) -> Self {
        Self::var(m, m + i)
    }

    fn var(m: usize, slot: usize) -> Self {
        assert!(slot < 2 * m, "variable index out of range");
        let mut e = vec![0; 2 * m];
        e[slot] = 1;
        let mut p = PolyObservable::zero(m);
        p.add_term(e, Rat::one());
        p
    }

    pub fn degrees_of_freedom(&self) -> usize {
        self.m
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &Rat)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    /// Coefficient of the monomial with the given exponent vector.
    pub fn coeff(&self, exps: &[u32]) -> Rat {
        self.terms.get(exps).cloned().unwrap_or_default()
    }

    fn add_term(&mut self, e: Vec<u32>, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        let mut out = PolyObservable::zero(self.m);
        for (e, x) in &self.terms {
            out.add_term(e.clone(), x * c);
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(PolyObservable::constant(self.m, Rat::one()), |acc, _| {
            &acc * self
        })
    }

    /// Partial derivative in slot `s` (u_i is slot i, v_i is slot m + i).
    fn partial(&self, s: usize) -> Self {
        let mut out = PolyObservable::zero(self.m);
        for (e, c) in &self.terms {
            if e[s] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[s] -= 1;
            out.add_term(e2, c * Rat::from(e[s] as i64));
        }
        out
    }

    pub fn d_du(&self, i: usize) -> Self {
        self.partial(i)
    }

    pub fn d_dv(&self, i: usize) -> Self {
        self.partial(self.m + i)
    }

    /// Exact value at a point given as `(u, v)`.
    pub fn eval(&self, u: &[Rat], v: &[Rat]) -> Rat {
        let xs: Vec<&Rat> = u.iter().chain(v).collect();
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter().zip(&xs).fold(
                    c.clone(),
                    |acc, (&k, x)| if k == 0 { acc } else { acc * x.pow(k as i32) },
                )
            })
            .sum()
    }

    pub fn eval_f64(&self, u: &[f64], v: &[f64]) -> f64 {
        let xs: Vec<f64> = u.iter().chain(v).copied().collect();
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(&xs)
                    .fold(c.to_f64(), |acc, (&k, x)| acc * x.powi(k as i32))
            })
            .sum()
    }

    /// Restriction to the line where every variable except `u_i` vanishes,
    /// as a polynomial in `u_i`.
    pub fn restrict_to_u_axis(&self, i: usize) -> Poly {
        let mut coeffs = Vec::new();
        for (e, c) in &self.terms {
            if e.iter().enumerate().any(|(s, &k)| s != i && k != 0) {
                continue;
            }
            let n = e[i] as usize;
            if coeffs.len() <= n {
                coeffs.resize(n + 1, Rat::zero());
            }
            coeffs[n] += c;
        }
        Poly::from_coeffs(coeffs)
    }
}

/// `{F, G} = Σ_l (∂F/∂v_l ∂G/∂u_l − ∂F/∂u_l ∂G/∂v_l)`.
pub fn poisson_bracket(f: &PolyObservable, g: &PolyObservable) -> PolyObservable {
    assert_eq!(f.m, g.m, "observables on different phase spaces");
    let mut out = PolyObservable::zero(f.m);
    for l in 0..f.m {
        out = &out + &(&f.d_dv(l) * &g.d_du(l));
        out = &out - &(&f.d_du(l) * &g.d_dv(l));
    }
    out
}

impl std::ops::Add for &PolyObservable {
    type Output = PolyObservable;
    fn add(self, rhs: &PolyObservable) -> PolyObservable {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl std::ops::Sub for &PolyObservable {
    type Output = PolyObservable;
    fn sub(self, rhs: &PolyObservable) -> PolyObservable {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }
}

impl std::ops::Mul for &PolyObservable {
    type Output = PolyObservable;
    fn mul(self, rhs: &PolyObservable) -> PolyObservable {
        assert_eq!(self.m, rhs.m, "observables on different phase spaces");
        let mut out = PolyObservable::zero(self.m);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }
}

impl fmt::Display for PolyObservable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let m = self.m;
        for (n, (e, c)) in self.terms.iter().rev().enumerate() {
            let mut vars = Vec::new();
            for (s, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let name = if s < m {
                    format!("u{}", s + 1)
                } else {
                    format!("v{}", s - m + 1)
                };
                vars.push(if k == 1 { name } else { format!("{name}^{k}") });
            }
            let (neg, mag) = (c.is_negative(), c.abs());
            let sign = match (n, neg) {
                (0, true) => "-",
                (0, false) => "",
                (_, true) => " - ",
                (_, false) => " + ",
            };
            let body = match (vars.is_empty(), mag.is_one()) {
                (true, _) => mag.to_string(),
                (false, true) => vars.join("*"),
                (false, false) => format!("{}*{}", mag, vars.join("*")),
            };
            write!(f, "{sign}{body}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for PolyObservable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for PolyObservable {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
