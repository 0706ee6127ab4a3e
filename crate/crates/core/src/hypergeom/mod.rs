//! Riemann–Gauss hypergeometric equations with singular points `0, 1, ∞`
//! and the Kimura test for solvability of the identity component of their
//! differential Galois group.
//!
//! An equation is stored through its six local exponents. The solvability
//! test looks only at the three exponent differences `ρ` (at 0), `τ` (at ∞)
//! and `ς` (at 1): either one of `±ρ ± τ ± ς` is an odd integer, or the
//! differences fit one of the fifteen Schwarz families (see [`schwarz`]).

pub mod schwarz;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::exactnum::{ExactError, Point, Poly, Rat, RatFunc, Surd};

pub use schwarz::{schwarz_table_match, Diff, SchwarzMatch, SchwarzRow, SlotFill, SCHWARZ_TABLE};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HypergeomError {
    #[error("exponents violate the Fuchs relation: they sum to {sum}, not 1")]
    FuchsViolation { sum: Rat },
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error("equation is not of hypergeometric form: {0}")]
    NotHypergeometric(String),
}

/// Sum and product of the two exponents at one singular point, i.e. the
/// indicial quadratic `x² − sum·x + product = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Indicial {
    pub sum: Rat,
    pub product: Rat,
}

impl Indicial {
    pub fn new(sum: Rat, product: Rat) -> Self {
        Indicial { sum, product }
    }

    /// Roots `(s ± √(s² − 4p)) / 2`, larger radical part first.
    fn roots(&self) -> (Surd, Surd) {
        let disc = &self.sum * &self.sum - Rat::from(4) * &self.product;
        let half = Rat::new(1, 2);
        let root = Surd::sqrt(&disc).scale(&half);
        let mid = &self.sum * &half;
        (root.add_rat(&mid), (-root).add_rat(&mid))
    }
}

/// Hypergeometric equation determined by its exponent pairs at `0`, `1`
/// and `∞`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HGEquation {
    /// (α, α̃) at z = 0
    pub exp0: (Surd, Surd),
    /// (γ, γ̃) at z = 1
    pub exp1: (Surd, Surd),
    /// (β, β̃) at z = ∞
    pub exp_inf: (Surd, Surd),
    pub indicial: [Indicial; 3],
}

impl HGEquation {
    /// Builds the equation from its three indicial quadratics (at `0`, `1`,
    /// `∞` in that order) and checks the Fuchs relation.
    pub fn from_indicial(
        at0: Indicial,
        at1: Indicial,
        at_inf: Indicial,
    ) -> Result<Self, HypergeomError> {
        let sum = &at0.sum + &at1.sum + &at_inf.sum;
        if !sum.is_one() {
            return Err(HypergeomError::FuchsViolation { sum });
        }
        let exp0 = at0.roots();
        let exp1 = at1.roots();
        let exp_inf = at_inf.roots();
        // all irrational exponents must share one quadratic field
        let mut field: Option<&Surd> = None;
        for e in [&exp0.0, &exp1.0, &exp_inf.0] {
            match field {
                Some(f) if !f.compatible(e) => {
                    return Err(ExactError::IncompatibleRadicands {
                        left: f.discriminant().clone(),
                        right: e.discriminant().clone(),
                    }
                    .into())
                }
                None if !e.is_rational() => field = Some(e),
                _ => {}
            }
        }
        Ok(HGEquation {
            exp0,
            exp1,
            exp_inf,
            indicial: [at0, at1, at_inf],
        })
    }

    /// Recognizes `ζ'' + p ζ' + q ζ = 0` as a hypergeometric equation with
    /// singular points `0, 1, ∞` and reads off its exponents. The input must
    /// coincide exactly with the canonical form rebuilt from those exponents.
    pub fn from_coefficients(p: &RatFunc, q: &RatFunc) -> Result<Self, HypergeomError> {
        let z = RatFunc::from_poly(Poly::z());
        let zm1 = RatFunc::from_poly(Poly::linear_root(&Rat::one()));
        let local = |f: &RatFunc, at: &Rat, what: &str| {
            f.eval(at).ok_or_else(|| {
                HypergeomError::NotHypergeometric(format!("{what} is not regular-singular"))
            })
        };
        let p0 = local(&(&z * p), &Rat::zero(), "z = 0")?;
        let q0 = local(&(&(&z * &z) * q), &Rat::zero(), "z = 0")?;
        let p1 = local(&(&zm1 * p), &Rat::one(), "z = 1")?;
        let q1 = local(&(&(&zm1 * &zm1) * q), &Rat::one(), "z = 1")?;
        let pinf = limit_at_infinity(&(&z * p)).ok_or_else(|| {
            HypergeomError::NotHypergeometric("z = ∞ is not regular-singular".into())
        })?;
        let qinf = limit_at_infinity(&(&(&z * &z) * q)).ok_or_else(|| {
            HypergeomError::NotHypergeometric("z = ∞ is not regular-singular".into())
        })?;
        let eq = HGEquation::from_indicial(
            Indicial::new(Rat::one() - p0, q0),
            Indicial::new(Rat::one() - p1, q1),
            Indicial::new(pinf - Rat::one(), qinf),
        )?;
        let (cp, cq) = eq.coefficients();
        if &cp != p || &cq != q {
            return Err(HypergeomError::NotHypergeometric(
                "extra singular points or terms outside the three-point form".into(),
            ));
        }
        Ok(eq)
    }

    /// Coefficients `(p, q)` of the canonical form
    /// `ζ'' + ((1−α−α̃)/z + (1−γ−γ̃)/(z−1)) ζ' + (αα̃/z² + γγ̃/(z−1)² + (ββ̃−αα̃−γγ̃)/(z(z−1))) ζ = 0`.
    pub fn coefficients(&self) -> (RatFunc, RatFunc) {
        let [at0, at1, at_inf] = &self.indicial;
        let zero = Rat::zero();
        let one = Rat::one();
        let p = &RatFunc::pole_term(&one - &at0.sum, &zero, 1)
            + &RatFunc::pole_term(&one - &at1.sum, &one, 1);
        let z_zm1 = RatFunc::new(Poly::one(), &Poly::z() * &Poly::linear_root(&one)).unwrap();
        let q = &(&RatFunc::pole_term(at0.product.clone(), &zero, 2)
            + &RatFunc::pole_term(at1.product.clone(), &one, 2))
            + &z_zm1.scale(&(&at_inf.product - &at0.product - &at1.product));
        (p, q)
    }

    /// Sum of all six exponents (always 1 for a constructed equation).
    pub fn exponent_sum(&self) -> Surd {
        [&self.exp0, &self.exp1, &self.exp_inf]
            .iter()
            .try_fold(Surd::zero(), |acc, (a, b)| acc.try_add(a)?.try_add(b))
            .expect("exponents share one field")
    }
}

fn limit_at_infinity(f: &RatFunc) -> Option<Rat> {
    match f.order_at(&Point::Infinity) {
        None => Some(Rat::zero()),
        Some(o) if o > 0 => Some(Rat::zero()),
        Some(0) => f.leading_at_infinity(),
        Some(_) => None,
    }
}

/// Exponent differences `ρ = α − α̃`, `τ = β − β̃`, `ς = γ − γ̃`, each sign
/// normalized (nonnegative radical coefficient, or nonnegative value when
/// rational). `flipped` records which signs were changed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpDiffs {
    pub rho: Surd,
    pub tau: Surd,
    pub sigma: Surd,
    #[serde(default)]
    pub flipped: [bool; 3],
}

impl ExpDiffs {
    /// Differences taken as given, without normalization.
    pub fn new(rho: Surd, tau: Surd, sigma: Surd) -> Self {
        ExpDiffs {
            rho,
            tau,
            sigma,
            flipped: [false; 3],
        }
    }

    pub fn get(&self, d: Diff) -> &Surd {
        match d {
            Diff::Rho => &self.rho,
            Diff::Tau => &self.tau,
            Diff::Sigma => &self.sigma,
        }
    }

    pub fn any_imaginary(&self) -> bool {
        [&self.rho, &self.tau, &self.sigma]
            .iter()
            .any(|s| s.is_imaginary())
    }
}

pub fn exponent_differences(eq: &HGEquation) -> ExpDiffs {
    let diff = |pair: &(Surd, Surd)| {
        pair.0
            .try_sub(&pair.1)
            .expect("pair shares a field")
            .sign_normalized()
    };
    let (rho, f0) = diff(&eq.exp0);
    let (tau, f1) = diff(&eq.exp_inf);
    let (sigma, f2) = diff(&eq.exp1);
    ExpDiffs {
        rho,
        tau,
        sigma,
        flipped: [f0, f1, f2],
    }
}

/// Which of the four signed sums was found to be an odd integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SumCombo {
    #[serde(rename = "rho+tau+sigma")]
    PlusPlusPlus,
    #[serde(rename = "-rho+tau+sigma")]
    MinusPlusPlus,
    #[serde(rename = "rho-tau+sigma")]
    PlusMinusPlus,
    #[serde(rename = "rho+tau-sigma")]
    PlusPlusMinus,
}

impl SumCombo {
    pub const ALL: [SumCombo; 4] = [
        SumCombo::PlusPlusPlus,
        SumCombo::MinusPlusPlus,
        SumCombo::PlusMinusPlus,
        SumCombo::PlusPlusMinus,
    ];

    fn signs(self) -> [bool; 3] {
        match self {
            SumCombo::PlusPlusPlus => [false, false, false],
            SumCombo::MinusPlusPlus => [true, false, false],
            SumCombo::PlusMinusPlus => [false, true, false],
            SumCombo::PlusPlusMinus => [false, false, true],
        }
    }

    pub fn evaluate(self, d: &ExpDiffs) -> Option<Surd> {
        let [nr, nt, ns] = self.signs();
        let pick = |s: &Surd, neg: bool| if neg { -s } else { s.clone() };
        pick(&d.rho, nr)
            .try_add(&pick(&d.tau, nt))
            .and_then(|x| x.try_add(&pick(&d.sigma, ns)))
            .ok()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OddWitness {
    pub combo: SumCombo,
    #[serde(with = "crate::exactnum::bigint_serde")]
    pub value: BigInt,
}

/// First of `ρ+τ+ς, −ρ+τ+ς, ρ−τ+ς, ρ+τ−ς` that is an odd integer.
pub fn kimura_condition_i(d: &ExpDiffs) -> Option<OddWitness> {
    if d.any_imaginary() {
        return None;
    }
    SumCombo::ALL.into_iter().find_map(|combo| {
        let v = combo.evaluate(d)?;
        v.is_odd_integer().then(|| OddWitness {
            combo,
            value: v.as_rational().unwrap().to_integer().unwrap(),
        })
    })
}

/// Route by which solvability was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Via {
    ConditionI,
    SchwarzRow(u8),
}

impl Serialize for Via {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Via::ConditionI => s.serialize_str("condition_i"),
            Via::SchwarzRow(n) => s.collect_str(&format_args!("schwarz_row_{n}")),
        }
    }
}

impl<'de> Deserialize<'de> for Via {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        if s == "condition_i" {
            return Ok(Via::ConditionI);
        }
        s.strip_prefix("schwarz_row_")
            .and_then(|n| n.parse().ok())
            .filter(|n| (1..=15).contains(n))
            .map(Via::SchwarzRow)
            .ok_or_else(|| serde::de::Error::custom(format!("unknown route {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Witness {
    Odd(OddWitness),
    Schwarz(SchwarzMatch),
}

/// Full Kimura evaluation: both conditions are always run and recorded.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KimuraVerdict {
    pub solvable: bool,
    pub via: Option<Via>,
    pub witness: Option<Witness>,
    pub condition_i: Option<OddWitness>,
    pub schwarz_matches: Vec<SchwarzMatch>,
}

impl KimuraVerdict {
    pub fn evaluate(d: &ExpDiffs) -> Self {
        let condition_i = kimura_condition_i(d);
        let schwarz_matches = schwarz_table_match(d);
        let (via, witness) = match (&condition_i, schwarz_matches.first()) {
            (Some(w), _) => (Some(Via::ConditionI), Some(Witness::Odd(w.clone()))),
            (None, Some(m)) => (
                Some(Via::SchwarzRow(m.row)),
                Some(Witness::Schwarz(m.clone())),
            ),
            (None, None) => (None, None),
        };
        KimuraVerdict {
            solvable: via.is_some(),
            via,
            witness,
            condition_i,
            schwarz_matches,
        }
    }

    /// Rows of the Schwarz table that matched, deduplicated, ascending.
    pub fn matched_rows(&self) -> Vec<u8> {
        let mut rows: Vec<u8> = self.schwarz_matches.iter().map(|m| m.row).collect();
        rows.dedup();
        rows
    }
}

/// Solvability of the identity component of the Galois group.
pub fn identity_component_solvable(eq: &HGEquation) -> KimuraVerdict {
    KimuraVerdict::evaluate(&exponent_differences(eq))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::q;
    use proptest::prelude::*;

    /// Indicial data of the algebraic normal variational equation for
    /// exponent `k` and ratio `μ_j/μ_i`, written out by hand.
    fn anve_indicial(k: i64, ratio: Rat) -> [Indicial; 3] {
        let km1sq = Rat::from((k - 1) * (k - 1));
        [
            Indicial::new(q(0, 1), -ratio / (Rat::from(4) * &km1sq)),
            Indicial::new(q(1, 2), q(0, 1)),
            Indicial::new(q(1, 2), -Rat::from(k) / (Rat::from(4) * &km1sq)),
        ]
    }

    fn anve_diffs(k: i64, ratio: Rat) -> ExpDiffs {
        let [a, b, c] = anve_indicial(k, ratio);
        exponent_differences(&HGEquation::from_indicial(a, b, c).unwrap())
    }

    fn rat(s: &str) -> Surd {
        s.parse().unwrap()
    }

    #[test]
    fn indicial_k3_ratio9() {
        let [a, b, c] = [
            Indicial::new(q(0, 1), q(-9, 16)),
            Indicial::new(q(1, 2), q(0, 1)),
            Indicial::new(q(1, 2), q(-3, 16)),
        ];
        let eq = HGEquation::from_indicial(a, b, c).unwrap();
        let d = exponent_differences(&eq);
        assert_eq!(d.rho, rat("3/2"));
        assert_eq!(d.sigma, rat("1/2"));
        assert_eq!(d.tau, rat("1"));
        assert_eq!(eq.exponent_sum(), Surd::rational(q(1, 1)));
    }

    #[test]
    fn zero_ratio_gives_zero_rho() {
        let eq = HGEquation::from_indicial(
            Indicial::new(q(0, 1), q(0, 1)),
            Indicial::new(q(1, 2), q(0, 1)),
            Indicial::new(q(1, 2), q(-5, 64)),
        )
        .unwrap();
        assert!(exponent_differences(&eq).rho.is_zero());
    }

    #[test]
    fn fuchs_violation_rejected() {
        let err = HGEquation::from_indicial(
            Indicial::new(q(1, 1), q(0, 1)),
            Indicial::new(q(1, 2), q(0, 1)),
            Indicial::new(q(1, 2), q(0, 1)),
        )
        .unwrap_err();
        assert_eq!(err, HypergeomError::FuchsViolation { sum: q(2, 1) });
    }

    #[test]
    fn incompatible_radicands_rejected() {
        let err = HGEquation::from_indicial(
            Indicial::new(q(0, 1), q(-2, 1)),
            Indicial::new(q(1, 2), q(-1, 1)),
            Indicial::new(q(1, 2), q(0, 1)),
        )
        .unwrap_err();
        assert!(matches!(
            err,
            HypergeomError::Exact(ExactError::IncompatibleRadicands { .. })
        ));
    }

    #[test]
    fn differences_for_anve_family() {
        assert_eq!(anve_diffs(3, q(9, 1)).rho, rat("3/2"));
        let d = anve_diffs(3, q(4, 1));
        assert_eq!((d.rho, d.tau, d.sigma), (rat("1"), rat("1"), rat("1/2")));
        for k in 3..10 {
            assert_eq!(anve_diffs(k, q(1, 1)).rho, Surd::rational(q(1, k - 1)));
        }
        // irrational ratio keeps its radical
        let d = anve_diffs(3, q(2, 1));
        assert_eq!(d.rho, rat("1/2*sqrt(2)"));
    }

    #[test]
    fn condition_i_examples() {
        let w = kimura_condition_i(&ExpDiffs::new(rat("3/2"), rat("1"), rat("1/2"))).unwrap();
        assert_eq!(w.combo, SumCombo::PlusPlusPlus);
        assert_eq!(w.value, BigInt::from(3));
        assert!(kimura_condition_i(&ExpDiffs::new(rat("1"), rat("1"), rat("1/2"))).is_none());
        assert!(kimura_condition_i(&ExpDiffs::new(rat("sqrt(2)"), rat("1"), rat("1/2"))).is_none());
    }

    #[test]
    fn solvability_examples() {
        let v = KimuraVerdict::evaluate(&anve_diffs(3, q(9, 1)));
        assert!(v.solvable);
        assert_eq!(v.via, Some(Via::ConditionI));
        assert!(!KimuraVerdict::evaluate(&anve_diffs(3, q(4, 1))).solvable);
        let neg = anve_diffs(3, q(-1, 1));
        assert!(neg.rho.is_imaginary());
        assert!(!KimuraVerdict::evaluate(&neg).solvable);
    }

    #[test]
    fn verdict_json_shape() {
        let v = KimuraVerdict::evaluate(&anve_diffs(3, q(9, 1)));
        let json = serde_json::to_value(&v).unwrap();
        assert_eq!(json["solvable"], true);
        assert_eq!(json["via"], "condition_i");
        assert_eq!(json["witness"]["value"], 3);
        let back: KimuraVerdict = serde_json::from_value(json).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn coefficients_round_trip_through_recognition() {
        let [a, b, c] = anve_indicial(5, q(7, 3));
        let eq = HGEquation::from_indicial(a, b, c).unwrap();
        let (p, qq) = eq.coefficients();
        assert_eq!(HGEquation::from_coefficients(&p, &qq).unwrap(), eq);
        // an extra pole at z = 2 is not hypergeometric
        let bad = &qq + &RatFunc::pole_term(q(1, 1), &q(2, 1), 1);
        assert!(HGEquation::from_coefficients(&p, &bad).is_err());
    }

    fn ratio() -> impl Strategy<Value = Rat> {
        (-30i64..60, 1i64..20).prop_map(|(n, d)| q(n, d))
    }

    proptest! {
        #[test]
        fn fuchs_and_infinity_relations(k in 3i64..15, r in ratio()) {
            let [a, b, c] = anve_indicial(k, r);
            let eq = HGEquation::from_indicial(a, b, c).unwrap();
            prop_assert_eq!(eq.exponent_sum(), Surd::rational(q(1, 1)));
            let (b0, b1) = &eq.exp_inf;
            prop_assert_eq!(b0.try_add(b1).unwrap(), Surd::rational(q(1, 2)));
            prop_assert_eq!(
                b0.try_mul(b1).unwrap(),
                Surd::rational(-Rat::from(k) / Rat::from(4 * (k - 1) * (k - 1)))
            );
        }

        #[test]
        fn verdict_invariant_under_signs_and_permutations(
            k in 3i64..13, r in ratio(), perm in 0usize..6, signs in 0u8..8,
        ) {
            let d = anve_diffs(k, r);
            let base = KimuraVerdict::evaluate(&d).solvable;
            let vals = [d.rho.clone(), d.tau.clone(), d.sigma.clone()];
            let order = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]][perm];
            let pick = |i: usize| {
                let v = vals[order[i]].clone();
                if signs >> i & 1 == 1 { -v } else { v }
            };
            let moved = ExpDiffs::new(pick(0), pick(1), pick(2));
            prop_assert_eq!(KimuraVerdict::evaluate(&moved).solvable, base);
        }

        #[test]
        fn odd_square_family_is_solvable_by_condition_i(k in 3i64..15, l in 0i64..12, plus in any::<bool>()) {
            let s = (k - 1) * l + if plus { 1 } else { -1 };
            let ratio = Rat::from(s * s);
            let v = KimuraVerdict::evaluate(&anve_diffs(k, ratio));
            prop_assert!(v.condition_i.is_some());
        }
    }
}
