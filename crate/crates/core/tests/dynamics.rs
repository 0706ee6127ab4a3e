use critint::critsys::{angular_momentum, hamiltonian, RestrictedSystem, SystemParams};
use critint::dynamics::{
    integrate, observable_drift, poincare_section, section_csv, time_of_flight, transit_time,
    ve_residual, DynamicsError, SectionSpec, State,
};
use critint::exactnum::q;
use proptest::prelude::*;

fn params(k: u32, eps: i8, mu: &[i64]) -> SystemParams {
    SystemParams::new(k, eps, mu.iter().map(|&x| q(x, 1)).collect()).unwrap()
}

#[test]
fn equal_mu_conserves_every_angular_momentum() {
    let p = params(3, -1, &[2, 2, 2]);
    let x0 = State::new(vec![0.5, -0.3, 0.2], vec![0.1, 0.4, -0.2]);
    let tr = integrate(&p, &x0, 1e-2, 30.0).unwrap();
    let dh = observable_drift(&tr, "H", &hamiltonian(&p)).max_drift;
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let d = observable_drift(&tr, "L", &angular_momentum(3, i, j)).max_drift;
        assert!(
            d <= dh.max(1e-12),
            "L{}{}: {d} vs energy drift {dh}",
            i + 1,
            j + 1
        );
    }
}

#[test]
fn invariant_plane_stays_invariant() {
    let p = params(4, 1, &[1, 3]);
    let x0 = State::new(vec![0.3, 0.0], vec![0.2, 0.0]);
    let tr = integrate(&p, &x0, 1e-2, 20.0).unwrap();
    assert!(tr.states.iter().all(|s| s.u[1] == 0.0 && s.v[1] == 0.0));
    assert!(ve_residual(&p, 0, &tr, 0.0).is_ok());
}

#[test]
fn perturbed_plane_is_rejected() {
    let p = params(3, 1, &[1, 2]);
    let tr = integrate(&p, &State::new(vec![0.0, 0.1], vec![0.5, 0.0]), 1e-2, 1.0).unwrap();
    assert!(matches!(
        ve_residual(&p, 0, &tr, 1e-6),
        Err(DynamicsError::OffManifold { .. })
    ));
}

#[test]
fn half_period_from_turning_point_quadrature() {
    // k = 2, ε = −1: time from the turning point back to the origin
    let p = params(2, -1, &[1]);
    let rs = RestrictedSystem::new(p.clone(), 0).unwrap();
    let amp = 0.8;
    let h = rs.energy_f64(amp, 0.0);
    let tq = time_of_flight(&rs, h, 0.0, amp).unwrap();
    let t_ode = transit_time(&p, &State::new(vec![amp], vec![0.0]), 0, 0.0, 1e-4, 10.0).unwrap();
    assert!((tq - t_ode).abs() / tq < 1e-6, "{tq} vs {t_ode}");
}

#[test]
fn section_csv_is_reproducible() {
    let p = params(3, -1, &[1, 4]);
    let seeds: Vec<State> = [0.1, 0.2, 0.3]
        .iter()
        .map(|&u2| {
            let h0 = 0.5;
            // place every seed on H = h0 with u1 = 0 and v2 = 0
            let pot = 2.0 * u2 * u2 + f64::powi(u2 * u2, 3) / 6.0;
            State::new(vec![0.0, u2], vec![(2.0 * (h0 - pot)).sqrt(), 0.0])
        })
        .collect();
    let spec = SectionSpec::new(0, 1, [1, 3]);
    let a = poincare_section(&p, &seeds, &spec, 1e-2, 50.0, 1e-9).unwrap();
    let b = poincare_section(&p, &seeds, &spec, 1e-2, 50.0, 1e-9).unwrap();
    assert_eq!(
        section_csv(2, &spec, &a).unwrap(),
        section_csv(2, &spec, &b).unwrap()
    );
    assert!(a.points.iter().any(|pt| pt.seed == 2));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn leapfrog_is_time_reversible(
        u in prop::collection::vec(-0.5f64..0.5, 2),
        v in prop::collection::vec(-0.5f64..0.5, 2),
        mu2 in 1i64..5,
    ) {
        let p = params(3, -1, &[1, mu2]);
        let x0 = State::new(u.clone(), v);
        let dt = 1e-2;
        let fwd = integrate(&p, &x0, dt, 5.0).unwrap();
        let mut back = fwd.last().clone();
        back.v.iter_mut().for_each(|x| *x = -*x);
        back.t = 0.0;
        let end = integrate(&p, &back, dt, 5.0).unwrap();
        let scale = u.iter().map(|x| x.abs()).fold(1.0, f64::max);
        for (a, b) in end.last().u.iter().zip(&u) {
            prop_assert!((a - b).abs() <= 10.0 * dt * dt * scale);
        }
    }

    #[test]
    fn energy_drift_shrinks_quadratically(amp in 0.2f64..0.9, mu2 in 1i64..4) {
        let p = params(2, -1, &[1, mu2]);
        let x0 = State::new(vec![amp, 0.1], vec![0.0, 0.3]);
        let h = hamiltonian(&p);
        let d1 = observable_drift(&integrate(&p, &x0, 2e-2, 10.0).unwrap(), "H", &h).max_drift;
        let d2 = observable_drift(&integrate(&p, &x0, 1e-2, 10.0).unwrap(), "H", &h).max_drift;
        let ratio = d1 / d2;
        prop_assert!((3.0..=5.0).contains(&ratio), "ratio {}", ratio);
    }

    #[test]
    fn time_of_flight_is_additive(a in -0.6f64..0.0, b in 0.0f64..0.6, c in 0.0f64..1.0) {
        let rs = RestrictedSystem::new(params(3, 1, &[1]), 0).unwrap();
        let h = 0.3;
        let m = a + c * (b - a);
        let whole = time_of_flight(&rs, h, a, b).unwrap();
        let parts = time_of_flight(&rs, h, a, m).unwrap() + time_of_flight(&rs, h, m, b).unwrap();
        prop_assert!((whole - parts).abs() <= 1e-10 * whole.max(1e-3));
    }
}
