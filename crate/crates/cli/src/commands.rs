use std::io::Read;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use critint::critsys::{
    angular_momentum, anve_data, classify_integrability, hamiltonian, verify_certificate,
    Certificate, CritError, PolyObservable, RestrictedSystem, SystemParams,
};
use critint::dynamics::{
    integrate, observable_drift, poincare_section, section_csv, time_of_flight, trajectory_csv,
    transit_time, DriftReport, DynamicsError, SectionSpec, State,
};
use critint::exactnum::RatFunc;
use critint::hypergeom::KimuraVerdict;
use critint::kovacic::{classify_galois, NormalODE};

use crate::io::{index, parse_floats, parse_rats, parse_slot, print_json, print_out, write_atomic};

pub const EXIT_NON_INTEGRABLE: u8 = 10;

/// Integrability classification and numerics for
/// H = ½Σ(v_i² + μ_i u_i²) − (ε/2k)(Σu_j²)^k.
#[derive(Debug, Parser)]
#[command(name = "critint", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify integrability and print the certificate (exit 0 integrable, 10 non-integrable).
    Classify(SystemArgs),
    /// Hypergeometric data and Kimura verdict on the plane of `pivot` for index `other`.
    Anve {
        #[command(flatten)]
        sys: SystemArgs,
        /// 1-based index whose μ is nonzero
        #[arg(long)]
        pivot: usize,
        /// 1-based index of the normal direction
        #[arg(long)]
        other: usize,
    },
    /// Kovacic analysis of χ'' = r χ with r given as "num;den" coefficient lists.
    Kovacic {
        /// e.g. "-3/32;0,0,0,1" or "1/4; z^2"
        #[arg(long, allow_hyphen_values = true)]
        r: String,
    },
    /// Integrate with leapfrog, write the trajectory CSV and report drift.
    Simulate {
        #[command(flatten)]
        sys: SystemArgs,
        #[command(flatten)]
        num: NumArgs,
        /// Initial state u1..um,v1..vm
        #[arg(long, allow_hyphen_values = true)]
        x0: String,
        /// Observables to monitor: H or Lij
        #[arg(long, default_value = "H", value_delimiter = ',')]
        monitor: Vec<String>,
        /// Trajectory CSV path
        #[arg(long)]
        out: Option<PathBuf>,
        /// Drift report JSON path
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Poincaré section crossings of several seeds.
    Poincare {
        #[command(flatten)]
        sys: SystemArgs,
        #[command(flatten)]
        num: NumArgs,
        /// Seeds separated by ';', each u1..um,v1..vm
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        seeds: String,
        /// Section coordinate, e.g. u1
        #[arg(long, default_value = "u1")]
        section: String,
        /// Crossing direction: 1, -1, or 0 for both
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        direction: i8,
        /// Two recorded coordinates, e.g. u2,v2
        #[arg(long, default_value = "u2,v2")]
        record: String,
        #[arg(long, default_value_t = 1e-8)]
        energy_tol: f64,
        /// Section CSV path
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Time of flight between two positions on the plane of `pivot`.
    Quadrature {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long, default_value_t = 1)]
        pivot: usize,
        /// Energy level
        #[arg(long, allow_hyphen_values = true)]
        h: f64,
        #[arg(long, allow_hyphen_values = true)]
        ua: f64,
        #[arg(long, allow_hyphen_values = true)]
        ub: f64,
        /// Also integrate the flow and report the relative deviation
        #[arg(long)]
        cross_check: bool,
        #[arg(long, default_value_t = 1e-4)]
        dt: f64,
        #[arg(long = "T", default_value_t = 100.0)]
        t_max: f64,
    },
    /// Replay a certificate (file path or '-' for stdin).
    Verify { cert: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct SystemArgs {
    #[arg(long)]
    pub k: u32,
    /// ε = ±1
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    pub eps: i8,
    /// Exact rationals, e.g. 1,-3/2,4
    #[arg(long, allow_hyphen_values = true)]
    pub mu: String,
}

impl SystemArgs {
    fn params(&self) -> Result<SystemParams> {
        Ok(SystemParams::new(self.k, self.eps, parse_rats(&self.mu)?)?)
    }
}

#[derive(Debug, Args)]
pub struct NumArgs {
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long = "T", default_value_t = 100.0)]
    pub t_end: f64,
}

pub fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Classify(sys) => classify(&sys),
        Command::Anve { sys, pivot, other } => anve(&sys, pivot, other),
        Command::Kovacic { r } => kovacic(&r),
        Command::Simulate {
            sys,
            num,
            x0,
            monitor,
            out,
            report,
            format,
        } => simulate(&sys, &num, &x0, &monitor, out, report, format),
        Command::Poincare {
            sys,
            num,
            seeds,
            section,
            direction,
            record,
            energy_tol,
            out,
            format,
        } => poincare(
            &sys, &num, &seeds, &section, direction, &record, energy_tol, out, format,
        ),
        Command::Quadrature {
            sys,
            pivot,
            h,
            ua,
            ub,
            cross_check,
            dt,
            t_max,
        } => quadrature(&sys, pivot, h, ua, ub, cross_check.then_some((dt, t_max))),
        Command::Verify { cert } => verify(&cert),
    }
}

fn classify(sys: &SystemArgs) -> Result<u8> {
    let cert = classify_integrability(&sys.params()?)?;
    print_json(&cert)?;
    if let Some(d) = &cert.discrepancy {
        eprintln!("warning: {d}");
    }
    Ok(if cert.is_integrable() {
        0
    } else {
        EXIT_NON_INTEGRABLE
    })
}

fn anve(sys: &SystemArgs, pivot: usize, other: usize) -> Result<u8> {
    let p = sys.params()?;
    let (i, j) = (index(pivot, p.m(), "pivot")?, index(other, p.m(), "other")?);
    let d = match anve_data(&p, i, j) {
        Err(CritError::ZeroPivot { pivot }) => {
            bail!("mu_{pivot} is zero, so this plane has no hypergeometric equation; `critint classify` runs the Kovacic analysis for it")
        }
        r => r?,
    };
    let kimura = KimuraVerdict::evaluate(&d.diffs);
    print_json(&json!({
        "pivot": pivot,
        "other": other,
        "ratio": &p.mu[j] / &p.mu[i],
        "scale": d.scale,
        "zdot_squared": d.zdot_squared,
        "coefficients": { "p": d.p, "q": d.q },
        "exponents": {
            "at_0": d.equation.exp0,
            "at_1": d.equation.exp1,
            "at_infinity": d.equation.exp_inf,
        },
        "differences": d.diffs,
        "kimura": kimura,
    }))?;
    Ok(0)
}

fn kovacic(r: &str) -> Result<u8> {
    let r: RatFunc = r.parse().context("parsing r")?;
    let n = NormalODE::new(r)?;
    print_json(&classify_galois(&n))?;
    Ok(0)
}

fn observable(name: &str, p: &SystemParams) -> Result<PolyObservable> {
    let m = p.m();
    if name == "H" {
        return Ok(hamiltonian(p));
    }
    let digits = name
        .strip_prefix('L')
        .filter(|d| d.len() == 2 && d.bytes().all(|b| b.is_ascii_digit()));
    let Some(d) = digits else {
        bail!("unknown observable {name:?}; use H or Lij with single-digit i, j");
    };
    let i = index((d.as_bytes()[0] - b'0') as usize, m, "observable")?;
    let j = index((d.as_bytes()[1] - b'0') as usize, m, "observable")?;
    if i == j {
        bail!("{name}: indices must differ");
    }
    Ok(angular_momentum(m, i, j))
}

fn state(s: &str, m: usize) -> Result<State> {
    let x = parse_floats(s)?;
    if x.len() != 2 * m {
        bail!("state {s:?} has {} entries, expected {}", x.len(), 2 * m);
    }
    Ok(State::from_flat(&x))
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    sys: &SystemArgs,
    num: &NumArgs,
    x0: &str,
    monitor: &[String],
    out: Option<PathBuf>,
    report: Option<PathBuf>,
    format: Format,
) -> Result<u8> {
    let p = sys.params()?;
    let x0 = state(x0, p.m())?;
    let monitors = monitor
        .iter()
        .map(|n| Ok((n.clone(), observable(n, &p)?)))
        .collect::<Result<Vec<_>>>()?;
    let (traj, failure) = match integrate(&p, &x0, num.dt, num.t_end) {
        Ok(t) => (t, None),
        Err(DynamicsError::EscapeDetected {
            t,
            partial: Some(tr),
            ..
        }) => (*tr, Some(("escape", t))),
        Err(DynamicsError::NonFinite {
            t,
            partial: Some(tr),
        }) => (*tr, Some(("non_finite", t))),
        Err(e) => return Err(e.into()),
    };
    let drift: Vec<DriftReport> = monitors
        .iter()
        .map(|(n, f)| observable_drift(&traj, n, f))
        .collect();
    let csv = trajectory_csv(&p, &traj)?;
    if let Some(path) = &out {
        write_atomic(path, &csv)?;
    }
    if let Some(path) = &report {
        write_atomic(path, &serde_json::to_string_pretty(&drift)?)?;
    }
    if format == Format::Csv && out.is_none() {
        print_out(&csv)?;
    } else {
        print_json(&json!({
            "params": traj.params_digest,
            "steps": traj.states.len() - 1,
            "drift": drift,
            "error": failure.map(|(kind, t)| json!({"kind": kind, "t": t})),
        }))?;
    }
    Ok(if failure.is_some() { 1 } else { 0 })
}

#[allow(clippy::too_many_arguments)]
fn poincare(
    sys: &SystemArgs,
    num: &NumArgs,
    seeds: &str,
    section: &str,
    direction: i8,
    record: &str,
    energy_tol: f64,
    out: Option<PathBuf>,
    format: Format,
) -> Result<u8> {
    let p = sys.params()?;
    let m = p.m();
    let seeds = seeds
        .split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|s| state(s, m))
        .collect::<Result<Vec<_>>>()?;
    let rec: Vec<&str> = record.split(',').collect();
    if rec.len() != 2 {
        bail!("--record needs exactly two coordinates");
    }
    let spec = SectionSpec::new(
        parse_slot(section, m)?,
        direction,
        [parse_slot(rec[0], m)?, parse_slot(rec[1], m)?],
    );
    let res = poincare_section(&p, &seeds, &spec, num.dt, num.t_end, energy_tol)?;
    let csv = section_csv(m, &spec, &res)?;
    if let Some(path) = &out {
        write_atomic(path, &csv)?;
    }
    if format == Format::Csv && out.is_none() {
        print_out(&csv)?;
    } else {
        print_json(&json!({
            "seeds": seeds.len(),
            "points": res.points.len(),
            "failures": res.failures,
        }))?;
    }
    Ok(if res.failures.is_empty() { 0 } else { 1 })
}

fn quadrature(
    sys: &SystemArgs,
    pivot: usize,
    h: f64,
    ua: f64,
    ub: f64,
    check: Option<(f64, f64)>,
) -> Result<u8> {
    let p = sys.params()?;
    let i = index(pivot, p.m(), "pivot")?;
    let rs = RestrictedSystem::new(p.clone(), i)?;
    let t = time_of_flight(&rs, h, ua, ub)?;
    let mut out = json!({ "pivot": pivot, "h": h, "ua": ua, "ub": ub, "time": t });
    if let Some((dt, t_max)) = check {
        // start at ua on the level set, moving toward ub
        let speed2 = 2.0 * (h - rs.energy_f64(ua, 0.0));
        let mut u = vec![0.0; p.m()];
        let mut v = vec![0.0; p.m()];
        u[i] = ua;
        v[i] = (ub - ua).signum() * speed2.max(0.0).sqrt();
        let t_ode = transit_time(&p, &State::new(u, v), i, ub, dt, t_max)?;
        let dev = if t == 0.0 {
            (t_ode - t).abs()
        } else {
            (t_ode - t).abs() / t
        };
        out["ode_time"] = json!(t_ode);
        out["relative_deviation"] = json!(dev);
        eprintln!("relative deviation {dev:e}");
    }
    print_json(&out)?;
    Ok(0)
}

fn verify(src: &str) -> Result<u8> {
    let text = if src == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        s
    } else {
        std::fs::read_to_string(src).with_context(|| format!("reading {src}"))?
    };
    let cert: Certificate = serde_json::from_str(&text).context("parsing certificate")?;
    let report = verify_certificate(&cert);
    print_json(&report)?;
    Ok(if report.ok { 0 } else { 1 })
}
