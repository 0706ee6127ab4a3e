//! Variational equations along the invariant planes and their algebraic
//! form after the covering `z = c·u^{2k−2}`.
//!
//! Along the plane of `(u_i, v_i)` the variational system is
//! `ξ'' = A(u_i(t)) ξ` with `A = −Hess V` restricted to the plane. `A` is
//! diagonal there; dropping the tangential row leaves one scalar equation
//! `ξ_j'' = a_j(u) ξ_j` per other index `j`. Pulling back by a function
//! `z(t)` with `ż² = F(z)` turns each into
//! `ξ'' + F'/(2F) ξ' − a_j/F ξ = 0` in the variable `z`.

use serde::Serialize;

use super::system::{potential, RestrictedSystem, SystemParams};
use super::CritError;
use crate::exactnum::{Poly, Rat, RatFunc};
use crate::hypergeom::{exponent_differences, ExpDiffs, HGEquation};
use crate::kovacic::SLODE;

/// `ξ'' = A ξ` along the plane of the pivot, entries polynomial in `u_pivot`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VariationalMatrix {
    pub pivot: usize,
    pub entries: Vec<Vec<Poly>>,
}

impl VariationalMatrix {
    pub fn is_diagonal(&self) -> bool {
        self.entries
            .iter()
            .enumerate()
            .all(|(a, row)| row.iter().enumerate().all(|(b, e)| a == b || e.is_zero()))
    }

    /// Diagonal entries for the indices normal to the plane.
    pub fn normal_coefficients(&self) -> Vec<(usize, Poly)> {
        (0..self.entries.len())
            .filter(|&j| j != self.pivot)
            .map(|j| (j, self.entries[j][j].clone()))
            .collect()
    }
}

pub fn variational_matrix(p: &SystemParams, pivot: usize) -> Result<VariationalMatrix, CritError> {
    p.validate()?;
    p.check_index(pivot)?;
    let v = potential(p);
    let m = p.m();
    let grads: Vec<_> = (0..m).map(|a| v.d_du(a)).collect();
    let entries = (0..m)
        .map(|a| {
            (0..m)
                .map(|b| -grads[a].d_du(b).restrict_to_u_axis(pivot))
                .collect()
        })
        .collect();
    Ok(VariationalMatrix { pivot, entries })
}

/// Rewrites a polynomial in `u` that only involves powers of
/// `w = u^{2k−2}` as a polynomial in `z = c·w`.
fn in_covering_variable(f: &Poly, k: u32, c: &Rat) -> Result<Poly, CritError> {
    let step = 2 * k as usize - 2;
    let mut out = Vec::new();
    for (n, a) in f.coeffs().iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        if n % step != 0 {
            return Err(CritError::Covering(format!(
                "term u^{n} is not a power of u^{step}"
            )));
        }
        let e = n / step;
        if out.len() <= e {
            out.resize(e + 1, Rat::zero());
        }
        out[e] = a / c.pow(e as i32);
    }
    Ok(Poly::from_coeffs(out))
}

/// `F(z) = ż²` on the zero-energy level of the pivot plane, for
/// `z = c·u^{2k−2}`.
pub fn covering_square(p: &SystemParams, pivot: usize, c: &Rat) -> Result<Poly, CritError> {
    let rs = RestrictedSystem::new(p.clone(), pivot)?;
    let k = p.k;
    // ẇ² = (2k−2)² u^{4k−6} v² with v² the zero-energy radicand
    let lift = Poly::monomial(
        Rat::from(((2 * k - 2) * (2 * k - 2)) as i64),
        4 * k as usize - 6,
    );
    let w_sq = in_covering_variable(&(&lift * &rs.radicand(&Rat::zero())), k, c)?;
    Ok(w_sq.scale(&(c * c)))
}

/// `(F'/(2F), a/F)` for `ż² = F` and normal coefficient `a`.
fn pullback(f: &Poly, a: &Poly) -> (RatFunc, RatFunc) {
    let ff = RatFunc::from_poly(f.clone());
    let p = RatFunc::new(f.derivative(), f.scale(&Rat::from(2))).unwrap();
    let q = RatFunc::from_poly(a.clone()).checked_div(&ff).unwrap();
    (p, q)
}

/// Normal variational equation on the pivot plane for index `other`, in the
/// algebraic variable, together with its hypergeometric data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnveData {
    pub pivot: usize,
    pub other: usize,
    /// `c` in `z = c·u^{2k−2}`.
    pub scale: Rat,
    pub zdot_squared: Poly,
    /// `ξ'' + p ξ' + q ξ = 0`.
    pub p: RatFunc,
    pub q: RatFunc,
    pub equation: HGEquation,
    pub diffs: ExpDiffs,
}

fn check_anve_pre(p: &SystemParams, pivot: usize, other: usize) -> Result<(), CritError> {
    p.validate()?;
    p.check_index(pivot)?;
    p.check_index(other)?;
    if p.k < 3 {
        return Err(CritError::KTooSmall { k: p.k });
    }
    if pivot == other {
        return Err(CritError::SameIndex { index: pivot + 1 });
    }
    Ok(())
}

fn normal_coefficient(p: &SystemParams, pivot: usize, other: usize) -> Result<Poly, CritError> {
    let vm = variational_matrix(p, pivot)?;
    debug_assert!(vm.is_diagonal());
    Ok(vm.entries[other][other].clone())
}

pub fn anve_data(p: &SystemParams, pivot: usize, other: usize) -> Result<AnveData, CritError> {
    check_anve_pre(p, pivot, other)?;
    let mu = &p.mu[pivot];
    if mu.is_zero() {
        return Err(CritError::ZeroPivot { pivot: pivot + 1 });
    }
    let c = p.eps_rat() / (Rat::from(p.k as i64) * mu);
    let f = covering_square(p, pivot, &c)?;
    let a = in_covering_variable(&normal_coefficient(p, pivot, other)?, p.k, &c)?;
    let (pc, qa) = pullback(&f, &a);
    let q = -qa;
    let equation = HGEquation::from_coefficients(&pc, &q)?;
    let diffs = exponent_differences(&equation);
    Ok(AnveData {
        pivot,
        other,
        scale: c,
        zdot_squared: f,
        p: pc,
        q,
        equation,
        diffs,
    })
}

/// Hypergeometric equation obtained on the plane of `pivot` for index
/// `other` (0-based).
pub fn anve(p: &SystemParams, pivot: usize, other: usize) -> Result<HGEquation, CritError> {
    Ok(anve_data(p, pivot, other)?.equation)
}

/// The algebraic normal variational equation on a plane whose `μ` vanishes,
/// using `z = (ε/(2μ_ref)) u^{2k−2}`; returned as `y'' = a1 y' + a2 y`.
pub fn anve_degenerate(
    p: &SystemParams,
    pivot: usize,
    reference: usize,
    target: usize,
) -> Result<SLODE, CritError> {
    check_anve_pre(p, pivot, target)?;
    p.check_index(reference)?;
    if !p.mu[pivot].is_zero() {
        return Err(CritError::Degenerate(format!(
            "mu_{} is not zero",
            pivot + 1
        )));
    }
    let mu_ref = &p.mu[reference];
    if mu_ref.is_zero() {
        return Err(CritError::Degenerate(format!(
            "reference mu_{} is zero",
            reference + 1
        )));
    }
    let c = p.eps_rat() / (Rat::from(2) * mu_ref);
    let f = covering_square(p, pivot, &c)?;
    let a = in_covering_variable(&normal_coefficient(p, pivot, target)?, p.k, &c)?;
    let (pc, qa) = pullback(&f, &a);
    Ok(SLODE { a1: -pc, a2: qa })
}

/// Membership of `ratio` in `{((k−1)ℓ ± 1)² | ℓ ≥ 0} ∪ {(k−1)²(2ℓ+1)²/4 | ℓ ∈ ℤ}`,
/// by enumerating `ℓ` up to the size of `ratio`.
pub fn necessary_ratio_condition(k: u32, ratio: &Rat) -> bool {
    assert!(k >= 3, "defined for k >= 3");
    let km1 = Rat::from(k as i64 - 1);
    let mut l = 0i64;
    loop {
        let lr = Rat::from(l);
        let plus = &km1 * &lr + Rat::one();
        let minus = &km1 * &lr - Rat::one();
        let half_odd = &km1 * (Rat::from(2 * l + 1)) / Rat::from(2);
        let candidates = [&plus * &plus, &minus * &minus, &half_odd * &half_odd];
        if candidates.contains(ratio) {
            return true;
        }
        // all three families are increasing in ℓ from ℓ = 1 on
        if l >= 1 && candidates.iter().all(|c| c > ratio) {
            return false;
        }
        l += 1;
    }
}
