use serde::{Deserialize, Serialize};

use super::observable::PolyObservable;
use super::CritError;
use crate::exactnum::{Poly, Rat};

/// Parameters of `H = ½Σ(v_i² + μ_i u_i²) − (ε/2k)(Σu_j²)^k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemParams {
    pub k: u32,
    pub eps: i8,
    pub mu: Vec<Rat>,
}

impl SystemParams {
    pub fn new(k: u32, eps: i8, mu: Vec<Rat>) -> Result<Self, CritError> {
        let p = SystemParams { k, eps, mu };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), CritError> {
        if self.k < 2 {
            return Err(CritError::InvalidParams(format!(
                "k must be at least 2, got {}",
                self.k
            )));
        }
        if self.eps != 1 && self.eps != -1 {
            return Err(CritError::InvalidParams(format!(
                "eps must be +1 or -1, got {}",
                self.eps
            )));
        }
        if self.mu.is_empty() {
            return Err(CritError::InvalidParams(
                "mu must have at least one entry".into(),
            ));
        }
        Ok(())
    }

    pub fn m(&self) -> usize {
        self.mu.len()
    }

    pub fn eps_rat(&self) -> Rat {
        Rat::from(self.eps as i64)
    }

    pub(crate) fn check_index(&self, i: usize) -> Result<(), CritError> {
        if i >= self.m() {
            return Err(CritError::IndexOutOfRange {
                index: i + 1,
                m: self.m(),
            });
        }
        Ok(())
    }
}

/// `Σ u_j²`.
fn radius_squared(m: usize) -> PolyObservable {
    (0..m).fold(PolyObservable::zero(m), |acc, j| {
        let u = PolyObservable::u(m, j);
        &acc + &(&u * &u)
    })
}

/// Potential part `½Σμ_i u_i² − (ε/2k)(Σu_j²)^k`.
pub fn potential(p: &SystemParams) -> PolyObservable {
    let m = p.m();
    let half = Rat::new(1, 2);
    let quad = (0..m).fold(PolyObservable::zero(m), |acc, i| {
        let u = PolyObservable::u(m, i);
        &acc + &(&u * &u).scale(&(&half * &p.mu[i]))
    });
    let c = p.eps_rat() / Rat::from(2 * p.k as i64);
    &quad - &radius_squared(m).pow(p.k).scale(&c)
}

pub fn hamiltonian(p: &SystemParams) -> PolyObservable {
    let m = p.m();
    let half = Rat::new(1, 2);
    let kinetic = (0..m).fold(PolyObservable::zero(m), |acc, i| {
        let v = PolyObservable::v(m, i);
        &acc + &(&v * &v).scale(&half)
    });
    &kinetic + &potential(p)
}

/// `L_ij = u_i v_j − u_j v_i` (0-based indices).
pub fn angular_momentum(m: usize, i: usize, j: usize) -> PolyObservable {
    &(&PolyObservable::u(m, i) * &PolyObservable::v(m, j))
        - &(&PolyObservable::u(m, j) * &PolyObservable::v(m, i))
}

/// `(u', v')` with `u' = v`, `v'_i = −μ_i u_i + ε(Σu_j²)^{k−1} u_i`.
pub fn vector_field(p: &SystemParams, u: &[Rat], v: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let s: Rat = u.iter().map(|x| x * x).sum();
    let g = p.eps_rat() * s.pow(p.k as i32 - 1);
    let dv = u.iter().zip(&p.mu).map(|(x, mu)| (&g - mu) * x).collect();
    (v.to_vec(), dv)
}

/// Acceleration `v'` in floating point, written into `out`.
pub fn acceleration_f64(k: u32, eps: f64, mu: &[f64], u: &[f64], out: &mut [f64]) {
    let s: f64 = u.iter().map(|x| x * x).sum();
    let g = eps * s.powi(k as i32 - 1);
    for ((o, x), m) in out.iter_mut().zip(u).zip(mu) {
        *o = (g - m) * x;
    }
}

pub fn vector_field_f64(p: &SystemParams, u: &[f64], v: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mu: Vec<f64> = p.mu.iter().map(Rat::to_f64).collect();
    let mut dv = vec![0.0; u.len()];
    acceleration_f64(p.k, p.eps as f64, &mu, u, &mut dv);
    (v.to_vec(), dv)
}

/// The flow restricted to the invariant plane where only `(u_i, v_i)` is
/// nonzero: `u' = v`, `v' = −μ_i u + ε u^{2k−1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RestrictedSystem {
    pub pivot: usize,
    pub params: SystemParams,
}

impl RestrictedSystem {
    pub fn new(params: SystemParams, pivot: usize) -> Result<Self, CritError> {
        params.validate()?;
        params.check_index(pivot)?;
        Ok(RestrictedSystem { pivot, params })
    }

    pub fn mu(&self) -> &Rat {
        &self.params.mu[self.pivot]
    }

    /// `h = ½v² + ½μ_i u² − (ε/2k) u^{2k}`.
    pub fn energy(&self, u: &Rat, v: &Rat) -> Rat {
        let k = self.params.k as i32;
        let half = Rat::new(1, 2);
        &half * v * v + &half * self.mu() * u * u
            - self.params.eps_rat() / Rat::from(2 * k as i64) * u.pow(2 * k)
    }

    pub fn energy_f64(&self, u: f64, v: f64) -> f64 {
        let k = self.params.k as i32;
        0.5 * v * v + 0.5 * self.mu().to_f64() * u * u
            - self.params.eps as f64 / (2 * k) as f64 * u.powi(2 * k)
    }

    pub fn field(&self, u: &Rat, v: &Rat) -> (Rat, Rat) {
        let k = self.params.k as i32;
        (
            v.clone(),
            -(self.mu() * u) + self.params.eps_rat() * u.pow(2 * k - 1),
        )
    }

    /// Radicand `2h + (ε/k)u^{2k} − μ_i u²` of the time-of-flight integral,
    /// i.e. `v²` on the level set `h`, as a polynomial in `u`.
    pub fn radicand(&self, h: &Rat) -> Poly {
        let k = self.params.k as usize;
        &(&Poly::constant(Rat::from(2) * h)
            + &Poly::monomial(self.params.eps_rat() / Rat::from(k as i64), 2 * k))
            - &Poly::monomial(self.mu().clone(), 2)
    }

    /// Real equilibria of the restricted flow: `u = 0` and the real roots of
    /// `u^{2k−2} = μ_i/ε`.
    pub fn equilibria_f64(&self) -> Vec<f64> {
        self.symmetric_roots(self.mu().to_f64() * self.params.eps as f64)
    }

    /// Nonzero real roots of the zero-energy radicand, `u^{2k−2} = kμ_i/ε`.
    /// Together with `u = 0` these are the rest points of the first-order
    /// equation `u' = ±√(radicand)` on `h = 0`, i.e. turning points of the
    /// planar flow rather than its equilibria.
    pub fn zero_energy_turning_points_f64(&self) -> Vec<f64> {
        let c = self.params.k as f64 * self.mu().to_f64() * self.params.eps as f64;
        let mut r = self.symmetric_roots(c);
        r.retain(|x| *x != 0.0);
        r
    }

    fn symmetric_roots(&self, c: f64) -> Vec<f64> {
        let mut out = vec![0.0];
        if c > 0.0 {
            let x = c.powf(1.0 / (2 * self.params.k - 2) as f64);
            out.insert(0, -x);
            out.push(x);
        }
        out
    }
}
