use serde::{Deserialize, Serialize};

use super::DynamicsError;
use crate::critsys::{acceleration_f64, PolyObservable, SystemParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub t: f64,
}

impl State {
    pub fn new(u: Vec<f64>, v: Vec<f64>) -> Self {
        assert_eq!(u.len(), v.len(), "u and v must have equal length");
        State { u, v, t: 0.0 }
    }

    /// Splits a flat `(u₁…u_m, v₁…v_m)` vector.
    pub fn from_flat(x: &[f64]) -> Self {
        let m = x.len() / 2;
        State::new(x[..m].to_vec(), x[m..2 * m].to_vec())
    }

    pub fn m(&self) -> usize {
        self.u.len()
    }

    /// Phase-space coordinate by slot (`u_i` is slot `i`, `v_i` is `m + i`).
    pub fn coord(&self, slot: usize) -> f64 {
        let m = self.m();
        if slot < m {
            self.u[slot]
        } else {
            self.v[slot - m]
        }
    }

    pub fn is_finite(&self) -> bool {
        self.u.iter().chain(&self.v).all(|x| x.is_finite())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub params_digest: String,
    pub dt: f64,
    pub states: Vec<State>,
}

impl Trajectory {
    pub fn last(&self) -> &State {
        self.states
            .last()
            .expect("trajectory holds the initial state")
    }

    pub fn duration(&self) -> f64 {
        self.last().t - self.states[0].t
    }
}

pub fn params_digest(p: &SystemParams) -> String {
    let mu: Vec<String> = p.mu.iter().map(|x| x.to_string()).collect();
    format!("k={};eps={};mu={}", p.k, p.eps, mu.join(","))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    /// Abort once some `|u_i|` exceeds this bound.
    pub escape_bound: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig { escape_bound: 1e6 }
    }
}

/// Kick-drift-kick leapfrog for `u'' = −μu + ε(Σu²)^{k−1} u`.
pub(crate) struct Stepper {
    k: u32,
    eps: f64,
    mu: Vec<f64>,
    dt: f64,
    pub(crate) state: State,
    acc: Vec<f64>,
    steps: u64,
    t0: f64,
}

impl Stepper {
    pub(crate) fn new(p: &SystemParams, x0: &State, dt: f64) -> Self {
        let mu: Vec<f64> = p.mu.iter().map(|m| m.to_f64()).collect();
        let mut acc = vec![0.0; x0.m()];
        acceleration_f64(p.k, p.eps as f64, &mu, &x0.u, &mut acc);
        Stepper {
            k: p.k,
            eps: p.eps as f64,
            mu,
            dt,
            state: x0.clone(),
            acc,
            steps: 0,
            t0: x0.t,
        }
    }

    pub(crate) fn step(&mut self) {
        let h = 0.5 * self.dt;
        let s = &mut self.state;
        for (v, a) in s.v.iter_mut().zip(&self.acc) {
            *v += h * a;
        }
        for (u, v) in s.u.iter_mut().zip(&s.v) {
            *u += self.dt * v;
        }
        acceleration_f64(self.k, self.eps, &self.mu, &s.u, &mut self.acc);
        for (v, a) in s.v.iter_mut().zip(&self.acc) {
            *v += h * a;
        }
        self.steps += 1;
        // stride-exact times, no accumulated rounding
        s.t = self.t0 + self.steps as f64 * self.dt;
    }

    pub(crate) fn check(&self, cfg: &IntegratorConfig) -> Result<(), StepFailure> {
        if !self.state.is_finite() {
            return Err(StepFailure::NonFinite);
        }
        if self.state.u.iter().any(|u| u.abs() > cfg.escape_bound) {
            return Err(StepFailure::Escape);
        }
        Ok(())
    }
}

pub(crate) enum StepFailure {
    Escape,
    NonFinite,
}

pub(crate) fn check_step(
    x0: &State,
    p: &SystemParams,
    dt: f64,
    t_end: f64,
) -> Result<u64, DynamicsError> {
    if x0.m() != p.m() {
        return Err(DynamicsError::Dimension {
            expected: p.m(),
            got: x0.m(),
        });
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(DynamicsError::InvalidStep(format!(
            "dt must be positive, got {dt}"
        )));
    }
    if !(t_end > dt && t_end.is_finite()) {
        return Err(DynamicsError::InvalidStep(format!(
            "T must exceed dt, got T = {t_end}, dt = {dt}"
        )));
    }
    if !x0.is_finite() {
        return Err(DynamicsError::NonFinite {
            t: x0.t,
            partial: None,
        });
    }
    Ok((t_end / dt).round() as u64)
}

pub fn integrate(
    p: &SystemParams,
    x0: &State,
    dt: f64,
    t_end: f64,
) -> Result<Trajectory, DynamicsError> {
    integrate_with(p, x0, dt, t_end, &IntegratorConfig::default())
}

/// Fixed-step leapfrog over `[t0, t0 + T]`, storing every step.
pub fn integrate_with(
    p: &SystemParams,
    x0: &State,
    dt: f64,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory, DynamicsError> {
    let n = check_step(x0, p, dt, t_end)?;
    let mut st = Stepper::new(p, x0, dt);
    let mut traj = Trajectory {
        params_digest: params_digest(p),
        dt,
        states: Vec::with_capacity(n as usize + 1),
    };
    traj.states.push(x0.clone());
    for _ in 0..n {
        st.step();
        if let Err(f) = st.check(cfg) {
            let t = st.state.t;
            let state = st.state.clone();
            let partial = Some(Box::new(traj));
            return Err(match f {
                StepFailure::Escape => DynamicsError::EscapeDetected { t, state, partial },
                StepFailure::NonFinite => DynamicsError::NonFinite { t, partial },
            });
        }
        traj.states.push(st.state.clone());
    }
    Ok(traj)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftReport {
    pub observable: String,
    pub max_drift: f64,
    /// `max_drift / |F(x₀)|` (absolute drift when `F(x₀) = 0`).
    pub relative: f64,
    pub dt: f64,
    #[serde(rename = "T")]
    pub t_end: f64,
}

/// `max_t |F(x(t)) − F(x(0))|` along the trajectory.
pub fn observable_drift(traj: &Trajectory, name: &str, f: &PolyObservable) -> DriftReport {
    let x0 = &traj.states[0];
    let f0 = f.eval_f64(&x0.u, &x0.v);
    let max_drift = traj
        .states
        .iter()
        .map(|s| (f.eval_f64(&s.u, &s.v) - f0).abs())
        .fold(0.0, f64::max);
    let relative = if f0 != 0.0 {
        max_drift / f0.abs()
    } else {
        max_drift
    };
    DriftReport {
        observable: name.to_string(),
        max_drift,
        relative,
        dt: traj.dt,
        t_end: traj.duration(),
    }
}

/// Residual of `ξ'' = (ε(2k−1)u^{2k−2} − μ_i) ξ` for `ξ = u_i'` along a
/// trajectory lying in the plane of `pivot`, with `ξ''` from central second
/// differences of `v_i`. Returns the maximum over interior samples.
pub fn ve_residual(
    p: &SystemParams,
    pivot: usize,
    traj: &Trajectory,
    tol: f64,
) -> Result<f64, DynamicsError> {
    let m = p.m();
    if pivot >= m {
        return Err(DynamicsError::Dimension {
            expected: m,
            got: pivot + 1,
        });
    }
    let offset = traj
        .states
        .iter()
        .flat_map(|s| {
            (0..m)
                .filter(move |&j| j != pivot)
                .flat_map(move |j| [s.u[j].abs(), s.v[j].abs()])
        })
        .fold(0.0, f64::max);
    if offset > tol {
        return Err(DynamicsError::OffManifold { max_offset: offset });
    }
    let k = p.k as i32;
    let eps = p.eps as f64;
    let mu = p.mu[pivot].to_f64();
    let dt2 = traj.dt * traj.dt;
    let res = traj
        .states
        .windows(3)
        .map(|w| {
            let xi = w[1].v[pivot];
            let xi_tt = (w[2].v[pivot] - 2.0 * xi + w[0].v[pivot]) / dt2;
            let u = w[1].u[pivot];
            (xi_tt - (eps * (2 * k - 1) as f64 * u.powi(2 * k - 2) - mu) * xi).abs()
        })
        .fold(0.0, f64::max);
    Ok(res)
}

/// First time the coordinate `slot` reaches `target`, located on the cubic
/// Hermite interpolant between steps. Errors if no crossing occurs by `t_max`.
pub fn transit_time(
    p: &SystemParams,
    x0: &State,
    slot: usize,
    target: f64,
    dt: f64,
    t_max: f64,
) -> Result<f64, DynamicsError> {
    let m = p.m();
    if slot >= m {
        return Err(DynamicsError::InvalidStep(
            "transit coordinate must be a position u_i".into(),
        ));
    }
    let n = check_step(x0, p, dt, t_max)?;
    let cfg = IntegratorConfig::default();
    let mut st = Stepper::new(p, x0, dt);
    let side = (x0.u[slot] - target).signum();
    for _ in 0..n {
        let prev = st.state.clone();
        st.step();
        if st.check(&cfg).is_err() {
            return Err(DynamicsError::EscapeDetected {
                t: st.state.t,
                state: st.state.clone(),
                partial: None,
            });
        }
        let cur = &st.state;
        if (cur.u[slot] - target).signum() != side || cur.u[slot] == target {
            let (y0, y1) = (prev.u[slot] - target, cur.u[slot] - target);
            let (d0, d1) = (prev.v[slot] * dt, cur.v[slot] * dt);
            let herm = |s: f64| {
                let s2 = s * s;
                let s3 = s2 * s;
                (2.0 * s3 - 3.0 * s2 + 1.0) * y0
                    + (s3 - 2.0 * s2 + s) * d0
                    + (-2.0 * s3 + 3.0 * s2) * y1
                    + (s3 - s2) * d1
            };
            let (mut lo, mut hi) = (0.0, 1.0);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if herm(mid).signum() == y0.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(prev.t + 0.5 * (lo + hi) * dt - x0.t);
        }
    }
    Err(DynamicsError::NoCrossing { t_max })
}
