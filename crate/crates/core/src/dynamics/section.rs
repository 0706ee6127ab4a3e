use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::integrator::{check_step, IntegratorConfig, State, StepFailure, Stepper};
use super::DynamicsError;
use crate::critsys::{hamiltonian, SystemParams};

/// Hyperplane `x[index] = value` in phase space, crossed in `direction`
/// (`+1` increasing, `−1` decreasing, `0` both). Slots are `u_1…u_m` then
/// `v_1…v_m`, 0-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionSpec {
    pub index: usize,
    pub direction: i8,
    pub record: [usize; 2],
    #[serde(default)]
    pub value: f64,
}

impl SectionSpec {
    pub fn new(index: usize, direction: i8, record: [usize; 2]) -> Self {
        SectionSpec {
            index,
            direction,
            record,
            value: 0.0,
        }
    }

    pub fn validate(&self, m: usize) -> Result<(), DynamicsError> {
        let n = 2 * m;
        if self.index >= n || self.record.iter().any(|&r| r >= n) {
            return Err(DynamicsError::InvalidSection(format!(
                "slots must be below {n}"
            )));
        }
        if self.record.contains(&self.index) {
            return Err(DynamicsError::InvalidSection(
                "section coordinate cannot also be recorded".into(),
            ));
        }
        if !(-1..=1).contains(&self.direction) {
            return Err(DynamicsError::InvalidSection(
                "direction must be -1, 0 or 1".into(),
            ));
        }
        Ok(())
    }

    fn crosses(&self, before: f64, after: f64) -> bool {
        let up = before < 0.0 && after >= 0.0;
        let down = before > 0.0 && after <= 0.0;
        match self.direction {
            1 => up,
            -1 => down,
            _ => up || down,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionPoint {
    pub seed: usize,
    pub t: f64,
    pub coords: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedFailure {
    pub seed: usize,
    pub t: f64,
    pub message: String,
}

/// Crossings of every seed, ordered by seed then time. Seeds whose run
/// fails keep the points found before the failure.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SectionResult {
    pub points: Vec<SectionPoint>,
    pub failures: Vec<SeedFailure>,
}

fn run_seed(
    p: &SystemParams,
    seed: usize,
    x0: &State,
    spec: &SectionSpec,
    dt: f64,
    n: u64,
) -> (Vec<SectionPoint>, Option<SeedFailure>) {
    let cfg = IntegratorConfig::default();
    let mut st = Stepper::new(p, x0, dt);
    let mut pts = Vec::new();
    let mut g_prev = x0.coord(spec.index) - spec.value;
    let mut prev = x0.clone();
    for _ in 0..n {
        st.step();
        if let Err(f) = st.check(&cfg) {
            let message = match f {
                StepFailure::Escape => "escape detected",
                StepFailure::NonFinite => "non-finite state",
            };
            let failure = SeedFailure {
                seed,
                t: st.state.t,
                message: message.into(),
            };
            return (pts, Some(failure));
        }
        let cur = &st.state;
        let g = cur.coord(spec.index) - spec.value;
        if spec.crosses(g_prev, g) {
            let s = g_prev / (g_prev - g);
            let lerp = |slot: usize| prev.coord(slot) + s * (cur.coord(slot) - prev.coord(slot));
            pts.push(SectionPoint {
                seed,
                t: prev.t + s * dt,
                coords: [lerp(spec.record[0]), lerp(spec.record[1])],
            });
        }
        g_prev = g;
        prev.clone_from(cur);
    }
    (pts, None)
}

/// Integrates each seed over `[0, T]` in parallel and collects the
/// linearly interpolated section crossings. All seeds must share the
/// energy of the first one within `energy_tol`.
pub fn poincare_section(
    p: &SystemParams,
    seeds: &[State],
    spec: &SectionSpec,
    dt: f64,
    t_end: f64,
    energy_tol: f64,
) -> Result<SectionResult, DynamicsError> {
    p.validate()?;
    spec.validate(p.m())?;
    if seeds.is_empty() {
        return Ok(SectionResult::default());
    }
    let mut n = 0;
    for s in seeds {
        n = check_step(s, p, dt, t_end)?;
    }
    let h = hamiltonian(p);
    let h0 = h.eval_f64(&seeds[0].u, &seeds[0].v);
    for (i, s) in seeds.iter().enumerate() {
        let e = h.eval_f64(&s.u, &s.v);
        if (e - h0).abs() > energy_tol {
            return Err(DynamicsError::EnergyMismatch {
                seed: i,
                energy: e,
                expected: h0,
            });
        }
    }
    let runs: Vec<_> = seeds
        .par_iter()
        .enumerate()
        .map(|(i, s)| run_seed(p, i, s, spec, dt, n))
        .collect();
    let mut out = SectionResult::default();
    for (pts, fail) in runs {
        out.points.extend(pts);
        out.failures.extend(fail);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::q;

    fn params() -> SystemParams {
        SystemParams::new(2, -1, vec![q(1, 1), q(1, 1)]).unwrap()
    }

    #[test]
    fn equilibrium_seed_has_no_crossings() {
        let seeds = [State::new(vec![0.0, 0.0], vec![0.0, 0.0])];
        let r = poincare_section(
            &params(),
            &seeds,
            &SectionSpec::new(0, 1, [1, 3]),
            0.01,
            10.0,
            1e-9,
        )
        .unwrap();
        assert!(r.points.is_empty() && r.failures.is_empty());
    }

    #[test]
    fn crossings_lie_on_the_section_and_respect_direction() {
        let seeds = [State::new(vec![0.5, 0.1], vec![0.0, 0.3])];
        let spec = SectionSpec::new(0, 1, [1, 3]);
        let r = poincare_section(&params(), &seeds, &spec, 0.005, 30.0, 1e-9).unwrap();
        assert!(r.points.len() >= 3);
        for w in r.points.windows(2) {
            assert!(w[1].t > w[0].t);
        }
    }

    #[test]
    fn rejects_bad_specs_and_energy_mismatch() {
        let p = params();
        let seeds = [
            State::new(vec![0.5, 0.0], vec![0.0, 0.0]),
            State::new(vec![0.1, 0.0], vec![0.0, 0.0]),
        ];
        assert!(matches!(
            poincare_section(&p, &seeds, &SectionSpec::new(0, 1, [0, 3]), 0.01, 1.0, 1e-9),
            Err(DynamicsError::InvalidSection(_))
        ));
        assert!(matches!(
            poincare_section(&p, &seeds, &SectionSpec::new(0, 1, [1, 3]), 0.01, 1.0, 1e-9),
            Err(DynamicsError::EnergyMismatch { seed: 1, .. })
        ));
    }
}
