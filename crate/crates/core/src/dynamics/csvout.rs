use super::{DynamicsError, SectionResult, SectionSpec, Trajectory};
use crate::critsys::{hamiltonian, SystemParams};

fn slot_name(m: usize, slot: usize) -> String {
    if slot < m {
        format!("u{}", slot + 1)
    } else {
        format!("v{}", slot - m + 1)
    }
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String, DynamicsError> {
    let bytes = w
        .into_inner()
        .map_err(|e| DynamicsError::Csv(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| DynamicsError::Csv(e.to_string()))
}

/// Columns `t,u1..um,v1..vm,H`, one row per stored state.
pub fn trajectory_csv(p: &SystemParams, traj: &Trajectory) -> Result<String, DynamicsError> {
    let m = p.m();
    let h = hamiltonian(p);
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["t".to_string()];
    header.extend((0..2 * m).map(|s| slot_name(m, s)));
    header.push("H".into());
    let csv_err = |e: csv::Error| DynamicsError::Csv(e.to_string());
    w.write_record(&header).map_err(csv_err)?;
    for s in &traj.states {
        let mut row = vec![s.t.to_string()];
        row.extend(s.u.iter().chain(&s.v).map(|x| x.to_string()));
        row.push(h.eval_f64(&s.u, &s.v).to_string());
        w.write_record(&row).map_err(csv_err)?;
    }
    finish(w)
}

/// Columns `seed,tcross,<c1>,<c2>` named after the recorded slots.
pub fn section_csv(
    m: usize,
    spec: &SectionSpec,
    res: &SectionResult,
) -> Result<String, DynamicsError> {
    let csv_err = |e: csv::Error| DynamicsError::Csv(e.to_string());
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "seed".to_string(),
        "tcross".to_string(),
        slot_name(m, spec.record[0]),
        slot_name(m, spec.record[1]),
    ])
    .map_err(csv_err)?;
    for pt in &res.points {
        w.write_record([
            pt.seed.to_string(),
            pt.t.to_string(),
            pt.coords[0].to_string(),
            pt.coords[1].to_string(),
        ])
        .map_err(csv_err)?;
    }
    finish(w)
}
