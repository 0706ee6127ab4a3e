use std::cell::Cell;

use super::DynamicsError;
use crate::critsys::RestrictedSystem;

/// Dense f64 coefficients of `R(u) = 2h + (ε/k)u^{2k} − μ_i u²`.
fn radicand_coeffs(rs: &RestrictedSystem, h: f64) -> Vec<f64> {
    let k = rs.params.k as usize;
    let mut c = vec![0.0; 2 * k + 1];
    c[0] = 2.0 * h;
    c[2] -= rs.mu().to_f64();
    c[2 * k] += rs.params.eps as f64 / k as f64;
    c
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, a| acc * x + a)
}

/// Coefficients of `R(a + σx)` in `x`, for `σ = ±1`.
fn shifted(c: &[f64], a: f64, sigma: f64) -> Vec<f64> {
    let n = c.len();
    let mut d = c.to_vec();
    // repeated synthetic division gives the Taylor coefficients at a
    for i in 0..n {
        for j in (i..n - 1).rev() {
            d[j] += a * d[j + 1];
        }
    }
    let mut s = 1.0;
    for x in d.iter_mut() {
        *x *= s;
        s *= sigma;
    }
    d
}

struct Endpoint {
    turning: bool,
    /// `R(a + σx)/x` when `turning`, for the substitution `u = a + σs²`.
    quotient: Vec<f64>,
}

fn classify_endpoint(c: &[f64], a: f64, sigma: f64, scale: f64) -> Result<Endpoint, DynamicsError> {
    let d = shifted(c, a, sigma);
    let tol = 1e-12 * scale;
    if d[0].abs() > tol {
        if d[0] < 0.0 {
            return Err(DynamicsError::InvalidInterval(format!(
                "radicand is negative at u = {a}"
            )));
        }
        return Ok(Endpoint {
            turning: false,
            quotient: Vec::new(),
        });
    }
    // d[1] is σR'(a); it must point into the interval
    if d[1] <= tol {
        return Err(DynamicsError::NonSimpleTurningPoint { at: a });
    }
    Ok(Endpoint {
        turning: true,
        quotient: d[1..].to_vec(),
    })
}

/// Time to travel between `u_a` and `u_b` at energy `h` on the invariant
/// plane of `rs`: `∫ du/√R(u)` over the interval, always nonnegative.
///
/// Endpoints may be simple zeros of `R`; there the substitution
/// `u = u_turn ∓ s²` makes the integrand smooth. A zero of `R` inside the
/// open interval is an error, since the motion reverses there.
pub fn time_of_flight(
    rs: &RestrictedSystem,
    h: f64,
    u_a: f64,
    u_b: f64,
) -> Result<f64, DynamicsError> {
    if !(h.is_finite() && u_a.is_finite() && u_b.is_finite()) {
        return Err(DynamicsError::InvalidInterval("non-finite input".into()));
    }
    if u_a == u_b {
        return Ok(0.0);
    }
    let (a, b) = if u_a < u_b { (u_a, u_b) } else { (u_b, u_a) };
    let c = radicand_coeffs(rs, h);
    let umax = a.abs().max(b.abs()).max(1.0);
    let scale = c
        .iter()
        .enumerate()
        .map(|(j, x)| x.abs() * umax.powi(j as i32))
        .fold(0.0, f64::max);
    let left = classify_endpoint(&c, a, 1.0, scale)?;
    let right = classify_endpoint(&c, b, -1.0, scale)?;

    const SAMPLES: usize = 256;
    for i in 1..SAMPLES {
        let u = a + (b - a) * i as f64 / SAMPLES as f64;
        if horner(&c, u) <= 0.0 {
            return Err(DynamicsError::RadicandVanishes { at: u });
        }
    }

    let mid = 0.5 * (a + b);
    let tol = 1e-13;
    let bad: Cell<Option<f64>> = Cell::new(None);
    let piece = |end: &Endpoint, from: f64, sigma: f64| -> f64 {
        let len = (mid - from).abs();
        if end.turning {
            let q = &end.quotient;
            quadrature::integrate(
                |s| {
                    let y = horner(q, s * s);
                    let f = 2.0 / y.sqrt();
                    if !f.is_finite() && bad.get().is_none() {
                        bad.set(Some(from + sigma * s * s));
                    }
                    f
                },
                0.0,
                len.sqrt(),
                tol,
            )
            .integral
        } else {
            quadrature::integrate(
                |x| {
                    let u = from + sigma * x;
                    let f = 1.0 / horner(&c, u).sqrt();
                    if !f.is_finite() && bad.get().is_none() {
                        bad.set(Some(u));
                    }
                    f
                },
                0.0,
                len,
                tol,
            )
            .integral
        }
    };
    let t = piece(&left, a, 1.0) + piece(&right, b, -1.0);
    match bad.get() {
        Some(at) => Err(DynamicsError::RadicandVanishes { at }),
        None => Ok(t),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::critsys::SystemParams;
    use crate::exactnum::q;

    fn rs(k: u32, eps: i8, mu: i64) -> RestrictedSystem {
        RestrictedSystem::new(SystemParams::new(k, eps, vec![q(mu, 1)]).unwrap(), 0).unwrap()
    }

    #[test]
    fn taylor_shift_matches_direct_evaluation() {
        let c = radicand_coeffs(&rs(3, 1, 1), 0.3);
        let d = shifted(&c, 0.7, -1.0);
        for x in [0.0, 0.1, 0.45] {
            assert!((horner(&d, x) - horner(&c, 0.7 - x)).abs() < 1e-14);
        }
    }

    #[test]
    fn harmonic_quarter_period() {
        // k = 2, ε = −1 is not harmonic, so compare a tiny amplitude against π/2
        let s = rs(2, -1, 1);
        let amp = 1e-4;
        let h = s.energy_f64(amp, 0.0);
        let t = time_of_flight(&s, h, 0.0, amp).unwrap();
        assert!((t - std::f64::consts::FRAC_PI_2).abs() < 1e-6, "{t}");
    }

    #[test]
    fn empty_interval_and_orientation() {
        let s = rs(3, 1, 1);
        assert_eq!(time_of_flight(&s, 1.0 / 3.0, 0.4, 0.4).unwrap(), 0.0);
        let f = time_of_flight(&s, 1.0 / 3.0, 0.0, 0.9).unwrap();
        let r = time_of_flight(&s, 1.0 / 3.0, 0.9, 0.0).unwrap();
        assert_eq!(f, r);
    }

    #[test]
    fn symmetric_turning_interval_doubles() {
        let s = rs(3, 1, 1);
        let h = 0.125;
        let c = radicand_coeffs(&s, h);
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if horner(&c, mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let half = time_of_flight(&s, h, 0.0, lo).unwrap();
        let full = time_of_flight(&s, h, -lo, lo).unwrap();
        assert!((full - 2.0 * half).abs() < 1e-10 * full, "{full} vs {half}");
    }

    #[test]
    fn interior_zero_is_rejected() {
        let s = rs(3, 1, 1);
        let h = 0.1;
        // turning point lies below 0.9 at this energy
        assert!(matches!(
            time_of_flight(&s, h, 0.0, 0.9),
            Err(DynamicsError::RadicandVanishes { .. }) | Err(DynamicsError::InvalidInterval(_))
        ));
    }

    #[test]
    fn double_zero_endpoint_is_rejected() {
        // at h = 1/3 the saddle u = 1 is a double zero
        let s = rs(3, 1, 1);
        assert!(matches!(
            time_of_flight(&s, 1.0 / 3.0, 0.0, 1.0),
            Err(DynamicsError::NonSimpleTurningPoint { .. })
        ));
    }
}
