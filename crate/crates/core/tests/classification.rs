use critint::critsys::{
    anve_data, classify_integrability, closed_form_verdict, verify_certificate, Certificate,
    Reason, SystemParams, Verdict,
};
use critint::exactnum::{q, Rat};
use critint::hypergeom::KimuraVerdict;
use critint::kovacic::{replay, GaloisVerdict};
use proptest::prelude::*;

fn params(k: u32, eps: i8, mu: Vec<Rat>) -> SystemParams {
    SystemParams::new(k, eps, mu).unwrap()
}

fn mu_value() -> impl Strategy<Value = Rat> {
    (-6i64..=9, 1i64..=4).prop_map(|(a, b)| q(a, b))
}

#[test]
fn certificate_json_survives_a_round_trip() {
    for (k, mu) in [
        (3, vec![q(1, 1), q(4, 1)]),
        (4, vec![q(0, 1), q(-2, 1)]),
        (2, vec![q(1, 1), q(3, 1)]),
    ] {
        let cert = classify_integrability(&params(k, -1, mu)).unwrap();
        let text = serde_json::to_string(&cert).unwrap();
        let back: Certificate = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cert);
        assert!(verify_certificate(&back).ok);
    }
}

#[test]
fn kovacic_trace_replays() {
    let cert = classify_integrability(&params(6, 1, vec![q(3, 1), q(0, 1), q(1, 1)])).unwrap();
    assert_eq!(cert.reason, Reason::KovacicTypeIV);
    let ev = cert.kovacic_trace.unwrap();
    assert!(matches!(ev.verdict, GaloisVerdict::TypeIV { .. }));
    assert!(replay(&ev.verdict).unwrap());
}

#[test]
fn extra_schwarz_row_does_not_break_the_contradiction() {
    let cert = classify_integrability(&params(7, 1, vec![q(1, 1), q(4, 1)])).unwrap();
    assert_eq!(cert.verdict, Verdict::NonIntegrable);
    assert!(cert.discrepancy.is_none());
    let fwd = cert.forward.unwrap();
    let rev = cert.reverse.unwrap();
    assert!(!(fwd.kimura.solvable && rev.kimura.solvable));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn verdict_matches_the_closed_form(k in 2u32..7, eps in prop::sample::select(vec![-1i8, 1]),
                                        mu in prop::collection::vec(mu_value(), 1..4)) {
        let p = params(k, eps, mu);
        let cert = classify_integrability(&p).unwrap();
        prop_assert_eq!(cert.verdict, closed_form_verdict(&p).0);
        prop_assert!(cert.discrepancy.is_none());
        prop_assert!(verify_certificate(&cert).ok);
    }

    #[test]
    fn at_most_one_plane_passes_kimura(k in 3u32..10, a in 1i64..50, b in 1i64..50) {
        prop_assume!(a != b);
        let p = params(k, 1, vec![q(a, 1), q(b, 1)]);
        let fwd = KimuraVerdict::evaluate(&anve_data(&p, 0, 1).unwrap().diffs);
        let rev = KimuraVerdict::evaluate(&anve_data(&p, 1, 0).unwrap().diffs);
        prop_assert!(!(fwd.solvable && rev.solvable));
    }
}
