//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits nonzero if any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use critint::critsys::{
    angular_momentum, anve_data, anve_degenerate, classify_integrability, hamiltonian,
    necessary_ratio_condition, poisson_bracket, PolyObservable, RestrictedSystem, SystemParams,
    Verdict,
};
use critint::dynamics::{
    integrate, observable_drift, time_of_flight, transit_time, ve_residual, State,
};
use critint::exactnum::{q, Poly, Rat, RatFunc};
use critint::hypergeom::KimuraVerdict;
use critint::kovacic::{
    case2_candidates, case2_families, classify_galois, reduce_to_normal, GaloisVerdict, NormalODE,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn params(k: u32, eps: i8, mu: Vec<Rat>) -> SystemParams {
    SystemParams::new(k, eps, mu).expect("valid parameters")
}

/// All multisets of size `m` drawn from `pool`.
fn multisets(pool: &[Rat], m: usize) -> Vec<Vec<Rat>> {
    fn go(pool: &[Rat], start: usize, m: usize, cur: &mut Vec<Rat>, out: &mut Vec<Vec<Rat>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for i in start..pool.len() {
            cur.push(pool[i].clone());
            go(pool, i, m, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(pool, 0, m, &mut Vec::new(), &mut out);
    out
}

fn truth_table() -> Outcome {
    let pool: Vec<Rat> = [
        q(-2, 1),
        q(-1, 1),
        q(0, 1),
        q(1, 2),
        q(1, 1),
        q(2, 1),
        q(3, 1),
        q(4, 1),
        q(9, 1),
    ]
    .into();
    let mut cases = Vec::new();
    for k in 2..=8 {
        for m in [2, 3] {
            for mu in multisets(&pool, m) {
                for eps in [-1, 1] {
                    cases.push((k, eps, mu.clone()));
                }
            }
        }
    }
    let failures: Vec<String> = cases
        .par_iter()
        .filter_map(|(k, eps, mu)| {
            let p = params(*k, *eps, mu.clone());
            let expected = *k == 2 || mu.iter().all(|x| x == &mu[0]);
            match classify_integrability(&p) {
                Ok(c) if c.discrepancy.is_some() => {
                    Some(format!("{p:?}: {}", c.discrepancy.unwrap()))
                }
                Ok(c) if (c.verdict == Verdict::Integrable) != expected => {
                    Some(format!("{p:?}: {:?}", c.verdict))
                }
                Ok(_) => None,
                Err(e) => Some(format!("{p:?}: {e}")),
            }
        })
        .collect();
    ensure(failures.is_empty(), || {
        format!("{} mismatches, first: {}", failures.len(), failures[0])
    })?;
    Ok(format!("{} instances", cases.len()))
}

fn degenerate_normal_form(k: u32, eps: i8) -> NormalODE {
    let p = params(k, eps, vec![q(0, 1), q(1, 1)]);
    let eq = anve_degenerate(&p, 0, 1, 1).expect("degenerate equation");
    reduce_to_normal(&eq).expect("normal form")
}

fn degenerate_regression() -> Outcome {
    for k in 3..=12u32 {
        for eps in [-1, 1] {
            let n = degenerate_normal_form(k, eps);
            let fam = case2_families(&n);
            ensure(fam.finite.len() == 1, || {
                format!("k={k}: poles {:?}", fam.finite)
            })?;
            ensure(fam.at(&q(0, 1)) == Some(&BTreeSet::from([3])), || {
                format!("k={k}: E_0 = {:?}", fam.finite)
            })?;
            let e_inf: BTreeSet<i64> = if k == 3 { [0, 2, 4].into() } else { [2].into() };
            ensure(fam.infinity == e_inf, || {
                format!("k={k}: E_inf = {:?}", fam.infinity)
            })?;
            let cands = case2_candidates(&fam);
            ensure(
                cands.iter().all(|c| c.degree().is_none() && !c.retained),
                || format!("k={k}: a candidate has d in N: {cands:?}"),
            )?;
            let v = classify_galois(&n);
            ensure(v.is_type_iv(), || {
                format!("k={k}, eps={eps}: verdict {}", v.label())
            })?;
        }
    }
    Ok("k = 3..12, both signs of eps".into())
}

fn infinity_data() -> Outcome {
    for k in 4..=12i64 {
        let n = degenerate_normal_form(k as u32, 1);
        let b = n
            .infinity
            .laurent_b
            .clone()
            .ok_or(format!("k={k}: order at infinity {:?}", n.infinity.order))?;
        // the coefficient of 1/z² read off the closed form of r
        let closed = -q((k - 3) * (3 * k - 1), 16 * (k - 1) * (k - 1));
        ensure(b == closed, || {
            format!("k={k}: b = {b}, closed form {closed}")
        })?;
        let root = (Rat::one() + Rat::from(4) * &b).sqrt_exact();
        ensure(root == Some(q(k + 1, 2 * (k - 1))), || {
            format!("k={k}: sqrt(1+4b) = {root:?}")
        })?;
    }
    Ok("k = 4..12".into())
}

fn kimura_solvable(k: u32, ratio: &Rat) -> bool {
    let p = params(k, 1, vec![Rat::one(), ratio.clone()]);
    KimuraVerdict::evaluate(&anve_data(&p, 0, 1).expect("anve").diffs).solvable
}

fn reduced_ratios(max: i64) -> Vec<Rat> {
    let set: BTreeSet<Rat> = (1..=max)
        .flat_map(|a| (1..=max).map(move |b| q(a, b)))
        .collect();
    set.into_iter().filter(|r| !r.is_one()).collect()
}

fn kimura_scan() -> Outcome {
    let ratios = reduced_ratios(60);
    let jobs: Vec<(u32, Rat)> = (3..=12)
        .flat_map(|k| ratios.iter().map(move |r| (k, r.clone())))
        .collect();
    let bad: Vec<String> = jobs
        .par_iter()
        .filter(|(k, r)| {
            *r > Rat::one() && kimura_solvable(*k, r) && kimura_solvable(*k, &r.recip())
        })
        .map(|(k, r)| format!("k={k}, q={r}"))
        .collect();
    ensure(bad.is_empty(), || {
        format!("both planes solvable for {}", bad.join("; "))
    })?;
    Ok(format!("{} (k, q) pairs", jobs.len()))
}

fn necessary_set() -> Outcome {
    let mut jobs = Vec::new();
    for k in 3..=8u32 {
        let mut set = BTreeSet::new();
        for b in 1..=4 {
            for a in 1..=200 * b {
                set.insert(q(a, b));
            }
        }
        for b in 5..=12 {
            for a in 1..=60 {
                set.insert(q(a, b));
            }
        }
        jobs.extend(set.into_iter().map(|r| (k, r)));
    }
    let bad: Vec<String> = jobs
        .par_iter()
        .filter_map(|(k, r)| {
            let p = params(*k, 1, vec![Rat::one(), r.clone()]);
            let kv = KimuraVerdict::evaluate(&anve_data(&p, 0, 1).ok()?.diffs);
            let kimura = kv.condition_i.is_some() || kv.schwarz_matches.iter().any(|m| m.row == 1);
            (kimura != necessary_ratio_condition(*k, r))
                .then(|| format!("k={k}, q={r}: kimura {kimura}"))
        })
        .collect();
    ensure(bad.is_empty(), || {
        format!("{} disagreements, first {}", bad.len(), bad[0])
    })?;
    Ok(format!("{} (k, q) pairs", jobs.len()))
}

fn case2_positive_control() -> Outcome {
    let r: RatFunc = "1/4; z^2".parse().unwrap();
    let n = NormalODE::new(r.clone()).unwrap();
    let cert = match classify_galois(&n) {
        GaloisVerdict::TypeII { certificate, .. } => certificate,
        v => return Err(format!("verdict {}", v.label())),
    };
    let inv_z: RatFunc = "1; z".parse().unwrap();
    ensure(cert.d == 0, || format!("d = {}", cert.d))?;
    ensure(cert.p == Poly::one(), || format!("P = {:?}", cert.p))?;
    ensure(cert.theta == inv_z, || format!("theta = {}", cert.theta))?;
    // Step 3 left side with P = 1 reduces to θ'' + 3θθ' + θ³ − 4rθ − 2r'
    let t = &cert.theta;
    let (t1, t2) = (t.derivative(), t.derivative().derivative());
    let three = RatFunc::constant(q(3, 1));
    let lhs = &(&(&(&t2 + &(&three * &(t * &t1))) + &t.pow(3)) - &(&r * t).scale(&q(4, 1)))
        - &r.derivative().scale(&q(2, 1));
    ensure(lhs.is_zero(), || format!("Step 3 residual {lhs}"))?;
    ensure(cert.verify(&r), || "certificate does not verify".into())?;
    let (b, c) = &cert.omega;
    ensure(b == &-&inv_z, || format!("omega linear coefficient {b}"))?;
    ensure(c == &"-1/4; z^2".parse::<RatFunc>().unwrap(), || {
        format!("omega constant {c}")
    })?;
    Ok("d = 0, P = 1, theta = 1/z, omega^2 - omega/z - 1/(4z^2)".into())
}

/// Bracket recomputed on a plain monomial map, independent of the library's
/// derivative and product code.
fn brute_bracket(f: &PolyObservable, g: &PolyObservable, m: usize) -> BTreeMap<Vec<u32>, Rat> {
    let mut out: BTreeMap<Vec<u32>, Rat> = BTreeMap::new();
    for (ef, cf) in f.terms() {
        for (eg, cg) in g.terms() {
            for l in 0..m {
                // ∂f/∂v_l ∂g/∂u_l − ∂f/∂u_l ∂g/∂v_l
                for (sf, sg, sign) in [(m + l, l, 1i64), (l, m + l, -1)] {
                    if ef[sf] == 0 || eg[sg] == 0 {
                        continue;
                    }
                    let mut e: Vec<u32> = ef.iter().zip(eg).map(|(a, b)| a + b).collect();
                    e[sf] -= 1;
                    e[sg] -= 1;
                    let c = cf * cg * Rat::from(sign * ef[sf] as i64 * eg[sg] as i64);
                    *out.entry(e).or_insert_with(Rat::zero) += c;
                }
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn as_map(p: &PolyObservable) -> BTreeMap<Vec<u32>, Rat> {
    p.terms().map(|(e, c)| (e.to_vec(), c.clone())).collect()
}

fn bracket_oracle() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    for trial in 0..100 {
        let k = rng.gen_range(2..=6);
        let m = rng.gen_range(2..=4);
        let eps = if rng.gen_bool(0.5) { 1 } else { -1 };
        let mu: Vec<Rat> = (0..m)
            .map(|_| q(rng.gen_range(-9..=9), rng.gen_range(1..=5)))
            .collect();
        let p = params(k, eps, mu.clone());
        let h = hamiltonian(&p);
        let l12 = angular_momentum(m, 0, 1);
        let mut expected = BTreeMap::new();
        let mut e = vec![0; 2 * m];
        e[0] = 1;
        e[1] = 1;
        let coeff = &mu[1] - &mu[0];
        if !coeff.is_zero() {
            expected.insert(e, coeff);
        }
        let brute = brute_bracket(&l12, &h, m);
        ensure(brute == expected, || {
            format!("trial {trial}: brute bracket {brute:?}")
        })?;
        let lib = poisson_bracket(&l12, &h);
        ensure(as_map(&lib) == expected, || {
            format!("trial {trial}: library bracket {lib}")
        })?;
        ensure(poisson_bracket(&h, &h).is_zero(), || {
            format!("trial {trial}: {{H,H}} != 0")
        })?;
        ensure(brute_bracket(&h, &h, m).is_empty(), || {
            format!("trial {trial}: brute {{H,H}} != 0")
        })?;
    }
    Ok("100 random instances".into())
}

fn conservation() -> Outcome {
    let p = params(2, -1, vec![q(1, 1), q(1, 1)]);
    let x0 = State::new(vec![1.0, 0.0], vec![0.0, 1.0]);
    let h = hamiltonian(&p);
    let l12 = angular_momentum(2, 0, 1);
    let tr = integrate(&p, &x0, 1e-3, 100.0).map_err(|e| e.to_string())?;
    let dh = observable_drift(&tr, "H", &h);
    let dl = observable_drift(&tr, "L12", &l12);
    ensure(dh.relative <= 1e-6, || format!("H drift {:e}", dh.relative))?;
    ensure(dl.relative <= 1e-6, || {
        format!("L12 drift {:e}", dl.relative)
    })?;
    let tr2 = integrate(&p, &x0, 5e-4, 100.0).map_err(|e| e.to_string())?;
    let ratio = dh.max_drift / observable_drift(&tr2, "H", &h).max_drift;
    ensure((3.0..=5.0).contains(&ratio), || {
        format!("halving ratio {ratio}")
    })?;
    Ok(format!(
        "H {:.2e}, L12 {:.2e}, halving ratio {ratio:.3}",
        dh.relative, dl.relative
    ))
}

fn quadrature_oracle() -> Outcome {
    let p = params(3, 1, vec![q(1, 1)]);
    let rs = RestrictedSystem::new(p.clone(), 0).unwrap();
    let h: f64 = 1.0 / 3.0;
    let x0 = State::new(vec![0.0], vec![(2.0 * h).sqrt()]);
    let t_q = time_of_flight(&rs, h, 0.0, 0.9).map_err(|e| e.to_string())?;
    let t_ode = transit_time(&p, &x0, 0, 0.9, 1e-4, 10.0).map_err(|e| e.to_string())?;
    let rel = (t_q - t_ode).abs() / t_q;
    ensure(rel <= 1e-6, || {
        format!("quadrature {t_q}, ODE {t_ode}, relative {rel:e}")
    })?;
    Ok(format!("t = {t_q:.10}, relative deviation {rel:.2e}"))
}

fn ve_scaling() -> Outcome {
    let p = params(3, 1, vec![q(1, 1), q(2, 1)]);
    // bounded periodic arc on the first plane, energy 1/8 below the saddle
    let x0 = State::new(vec![0.0, 0.0], vec![0.5, 0.0]);
    let res = |dt: f64| -> Result<f64, String> {
        let tr = integrate(&p, &x0, dt, 10.0).map_err(|e| e.to_string())?;
        ve_residual(&p, 0, &tr, 1e-12).map_err(|e| e.to_string())
    };
    let (r1, r2) = (res(4e-3)?, res(2e-3)?);
    let ratio = r1 / r2;
    ensure((3.0..=5.0).contains(&ratio), || {
        format!("residuals {r1:e}, {r2:e}, ratio {ratio}")
    })?;
    Ok(format!("residuals {r1:.2e} -> {r2:.2e}, ratio {ratio:.3}"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("integrability truth table", truth_table),
        ("degenerate plane regression", degenerate_regression),
        ("closed-form data at infinity", infinity_data),
        ("two-plane Kimura contradiction scan", kimura_scan),
        ("necessary ratio set equivalence", necessary_set),
        ("Kovacic case II positive control", case2_positive_control),
        ("symbolic bracket oracle", bracket_oracle),
        ("numeric conservation", conservation),
        ("quadrature and ODE cross-oracle", quadrature_oracle),
        ("variational residual scaling", ve_scaling),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let secs = start.elapsed().as_secs_f64();
        match out {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.2}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
