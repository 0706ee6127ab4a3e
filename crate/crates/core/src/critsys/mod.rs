//! The Hamiltonian family
//! `H = ½Σ(v_i² + μ_i u_i²) − (ε/2k)(Σu_j²)^k`
//! and its integrability classification.
//!
//! The verdict itself is the closed-form rule (integrable exactly when
//! `k = 2` or all `μ_i` coincide, or trivially when `m = 1`). Every
//! non-integrable verdict carries the evidence that establishes it:
//!
//! * for a pair `μ_i ≠ μ_j` both nonzero, the hypergeometric normal
//!   variational equations on both invariant planes and their Kimura
//!   evaluations, at least one of which must fail;
//! * for a pair with one zero entry, the degenerate normal variational
//!   equation and its Kovacic classification, which must be type (iv).
//!
//! If the evidence does not establish the verdict, the certificate carries
//! a discrepancy note instead of silently agreeing.

mod observable;
mod system;
mod variational;

use serde::{Deserialize, Serialize};

use crate::exactnum::{Rat, RatFunc};
use crate::hypergeom::{ExpDiffs, HypergeomError, KimuraVerdict};
use crate::kovacic::{self, classify_galois, reduce_to_normal, GaloisVerdict, KovacicError, SLODE};

pub use observable::{poisson_bracket, PolyObservable};
pub use system::{
    acceleration_f64, angular_momentum, hamiltonian, potential, vector_field, vector_field_f64,
    RestrictedSystem, SystemParams,
};
pub use variational::{
    anve, anve_data, anve_degenerate, covering_square, necessary_ratio_condition,
    variational_matrix, AnveData, VariationalMatrix,
};

pub const CERTIFICATE_SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CritError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("index {index} out of range for m = {m}")]
    IndexOutOfRange { index: usize, m: usize },
    #[error("the algebraic variational equations need k >= 3 (got k = {k})")]
    KTooSmall { k: u32 },
    #[error("pivot and other index coincide ({index})")]
    SameIndex { index: usize },
    #[error(
        "mu_{pivot} is zero; use the degenerate path (anve_degenerate / kovacic) for this plane"
    )]
    ZeroPivot { pivot: usize },
    #[error("degenerate plane preconditions: {0}")]
    Degenerate(String),
    #[error("covering substitution failed: {0}")]
    Covering(String),
    #[error(transparent)]
    Hypergeom(#[from] HypergeomError),
    #[error(transparent)]
    Kovacic(#[from] KovacicError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Integrable,
    NonIntegrable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Reason {
    #[serde(rename = "single_degree")]
    SingleDegree,
    #[serde(rename = "k_equals_2")]
    KEquals2,
    #[serde(rename = "all_mu_equal")]
    AllMuEqual,
    #[serde(rename = "kimura_contradiction")]
    KimuraContradiction,
    #[serde(rename = "kovacic_type_iv")]
    KovacicTypeIV,
}

/// One plane of the two-plane argument. Indices are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectionEvidence {
    pub pivot: usize,
    pub other: usize,
    /// `μ_other / μ_pivot`.
    pub ratio: Rat,
    /// `ξ'' + p ξ' + q ξ = 0`.
    pub p: RatFunc,
    pub q: RatFunc,
    pub exp_diffs: ExpDiffs,
    pub kimura: KimuraVerdict,
    pub necessary_condition: bool,
}

/// Degenerate plane analysis. Indices are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KovacicEvidence {
    pub pivot: usize,
    pub reference: usize,
    pub target: usize,
    pub equation: SLODE,
    pub verdict: GaloisVerdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema: u32,
    pub verdict: Verdict,
    pub reason: Reason,
    pub k: u32,
    pub eps: i8,
    pub mu: Vec<Rat>,
    /// 1-based indices of the pair analysed.
    pub pair: Option<[usize; 2]>,
    pub forward: Option<DirectionEvidence>,
    pub reverse: Option<DirectionEvidence>,
    pub kovacic_trace: Option<KovacicEvidence>,
    pub negative_ratio: bool,
    /// Observations that do not affect the verdict (e.g. Schwarz rows other
    /// than the first matching on one plane).
    pub notes: Vec<String>,
    pub discrepancy: Option<String>,
}

impl Certificate {
    pub fn params(&self) -> SystemParams {
        SystemParams {
            k: self.k,
            eps: self.eps,
            mu: self.mu.clone(),
        }
    }

    pub fn is_integrable(&self) -> bool {
        self.verdict == Verdict::Integrable
    }
}

/// Closed-form rule: integrable iff `m = 1`, `k = 2`, or all `μ` equal.
pub fn closed_form_verdict(p: &SystemParams) -> (Verdict, Option<Reason>) {
    if p.m() == 1 {
        (Verdict::Integrable, Some(Reason::SingleDegree))
    } else if p.k == 2 {
        (Verdict::Integrable, Some(Reason::KEquals2))
    } else if p.mu.iter().all(|x| x == &p.mu[0]) {
        (Verdict::Integrable, Some(Reason::AllMuEqual))
    } else {
        (Verdict::NonIntegrable, None)
    }
}

fn direction(p: &SystemParams, pivot: usize, other: usize) -> Result<DirectionEvidence, CritError> {
    let d = anve_data(p, pivot, other)?;
    let ratio = &p.mu[other] / &p.mu[pivot];
    Ok(DirectionEvidence {
        pivot: pivot + 1,
        other: other + 1,
        necessary_condition: necessary_ratio_condition(p.k, &ratio),
        ratio,
        p: d.p,
        q: d.q,
        kimura: KimuraVerdict::evaluate(&d.diffs),
        exp_diffs: d.diffs,
    })
}

fn extra_rows(tag: &str, d: &DirectionEvidence) -> Option<String> {
    let rows: Vec<String> = d
        .kimura
        .matched_rows()
        .into_iter()
        .filter(|&r| r != 1)
        .map(|r| r.to_string())
        .collect();
    (!rows.is_empty()).then(|| {
        format!(
            "{tag} plane (pivot {}) matches Schwarz rows outside the first: {}",
            d.pivot,
            rows.join(", ")
        )
    })
}

pub fn classify_integrability(p: &SystemParams) -> Result<Certificate, CritError> {
    p.validate()?;
    let (verdict, reason) = closed_form_verdict(p);
    let mut cert = Certificate {
        schema: CERTIFICATE_SCHEMA,
        verdict,
        reason: reason.unwrap_or(Reason::KimuraContradiction),
        k: p.k,
        eps: p.eps,
        mu: p.mu.clone(),
        pair: None,
        forward: None,
        reverse: None,
        kovacic_trace: None,
        negative_ratio: false,
        notes: Vec::new(),
        discrepancy: None,
    };
    if verdict == Verdict::Integrable {
        return Ok(cert);
    }
    let m = p.m();
    let (i, j) = (0..m)
        .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
        .find(|&(i, j)| p.mu[i] != p.mu[j])
        .expect("unequal pair exists for a non-integrable verdict");
    cert.pair = Some([i + 1, j + 1]);
    let established = if !p.mu[i].is_zero() && !p.mu[j].is_zero() {
        let fwd = direction(p, i, j)?;
        let rev = direction(p, j, i)?;
        cert.negative_ratio = fwd.ratio.is_negative();
        cert.notes.extend(extra_rows("forward", &fwd));
        cert.notes.extend(extra_rows("reverse", &rev));
        let ok = !(fwd.kimura.solvable && rev.kimura.solvable);
        cert.forward = Some(fwd);
        cert.reverse = Some(rev);
        cert.reason = Reason::KimuraContradiction;
        ok
    } else {
        let (zero, reference) = if p.mu[i].is_zero() { (i, j) } else { (j, i) };
        let equation = anve_degenerate(p, zero, reference, reference)?;
        let verdict = classify_galois(&reduce_to_normal(&equation)?);
        let ok = verdict.is_type_iv();
        cert.kovacic_trace = Some(KovacicEvidence {
            pivot: zero + 1,
            reference: reference + 1,
            target: reference + 1,
            equation,
            verdict,
        });
        cert.reason = Reason::KovacicTypeIV;
        ok
    };
    if !established {
        cert.discrepancy = Some(match cert.reason {
            Reason::KimuraContradiction => {
                "both planes pass the Kimura test; no contradiction established".into()
            }
            _ => "degenerate plane is not shown to be of Galois type (iv)".into(),
        });
    }
    Ok(cert)
}

/// Outcome of replaying a certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub ok: bool,
    pub checks: Vec<(String, bool)>,
}

/// Replays every claim of a certificate from its own contents.
pub fn verify_certificate(c: &Certificate) -> VerifyReport {
    let mut checks = Vec::new();
    let p = c.params();
    checks.push(("schema version".to_string(), c.schema == CERTIFICATE_SCHEMA));
    let valid = p.validate().is_ok();
    checks.push(("parameters valid".to_string(), valid));
    if valid {
        let (v, reason) = closed_form_verdict(&p);
        checks.push(("verdict matches closed form".to_string(), v == c.verdict));
        if let Some(r) = reason {
            checks.push(("reason matches closed form".to_string(), r == c.reason));
        }
    }
    for (tag, d) in [("forward", &c.forward), ("reverse", &c.reverse)] {
        let Some(d) = d else { continue };
        checks.push((
            format!("{tag} Kimura verdict replays from exponent differences"),
            KimuraVerdict::evaluate(&d.exp_diffs) == d.kimura,
        ));
        let fresh = valid
            .then(|| direction(&p, d.pivot.wrapping_sub(1), d.other.wrapping_sub(1)).ok())
            .flatten();
        checks.push((
            format!("{tag} plane recomputes identically"),
            fresh.as_ref() == Some(d),
        ));
    }
    if let Some(kv) = &c.kovacic_trace {
        let replayed = kovacic::replay(&kv.verdict).unwrap_or(false);
        checks.push(("Kovacic verdict replays".to_string(), replayed));
        let normal = reduce_to_normal(&kv.equation).map(|n| n.r);
        checks.push((
            "normal form of embedded equation matches trace".to_string(),
            normal.as_ref() == Ok(&kv.verdict.trace().r),
        ));
        let fresh = valid
            .then(|| {
                anve_degenerate(
                    &p,
                    kv.pivot.wrapping_sub(1),
                    kv.reference.wrapping_sub(1),
                    kv.target.wrapping_sub(1),
                )
                .ok()
            })
            .flatten();
        checks.push((
            "degenerate equation recomputes identically".to_string(),
            fresh.as_ref() == Some(&kv.equation),
        ));
    }
    if c.verdict == Verdict::NonIntegrable {
        let established = match (&c.forward, &c.reverse, &c.kovacic_trace) {
            (Some(f), Some(r), _) => !(f.kimura.solvable && r.kimura.solvable),
            (_, _, Some(k)) => k.verdict.is_type_iv(),
            _ => false,
        };
        checks.push((
            "evidence establishes non-integrability".to_string(),
            established == c.discrepancy.is_none(),
        ));
    }
    VerifyReport {
        ok: checks.iter().all(|(_, b)| *b),
        checks,
    }
}
