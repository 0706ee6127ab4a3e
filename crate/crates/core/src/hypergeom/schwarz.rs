//! The fifteen Schwarz families of exponent differences for which the
//! hypergeometric equation has a finite (or dihedral, row 1) monodromy.
//!
//! A triple `(ρ, τ, ς)` matches a row when, after some permutation and
//! some choice of signs, each difference lies in `column + ℤ`. Rows marked
//! with a parity condition additionally need the three integer shifts to
//! sum to an even number.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::ExpDiffs;
use crate::exactnum::{q, Rat, Surd};

/// One row of the table; `None` marks the arbitrary column of row 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SchwarzRow {
    pub index: u8,
    pub cols: [Option<(i64, i64)>; 3],
    pub parity: bool,
}

const fn row(index: u8, a: (i64, i64), b: (i64, i64), c: (i64, i64), parity: bool) -> SchwarzRow {
    SchwarzRow {
        index,
        cols: [Some(a), Some(b), Some(c)],
        parity,
    }
}

pub const SCHWARZ_TABLE: [SchwarzRow; 15] = [
    SchwarzRow {
        index: 1,
        cols: [Some((1, 2)), Some((1, 2)), None],
        parity: false,
    },
    row(2, (1, 2), (1, 3), (1, 3), false),
    row(3, (2, 3), (1, 3), (1, 3), true),
    row(4, (1, 2), (1, 3), (1, 4), false),
    row(5, (2, 3), (1, 4), (1, 4), true),
    row(6, (1, 2), (1, 3), (1, 5), false),
    row(7, (2, 5), (1, 3), (1, 3), true),
    row(8, (2, 3), (1, 5), (1, 5), true),
    row(9, (1, 2), (2, 5), (1, 5), true),
    row(10, (3, 5), (1, 3), (1, 5), true),
    row(11, (2, 5), (2, 5), (2, 5), true),
    row(12, (2, 3), (1, 3), (1, 5), true),
    row(13, (4, 5), (1, 5), (1, 5), true),
    row(14, (1, 2), (2, 5), (1, 3), true),
    row(15, (3, 5), (2, 5), (1, 3), true),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Diff {
    Rho,
    Tau,
    Sigma,
}

impl Diff {
    pub const ALL: [Diff; 3] = [Diff::Rho, Diff::Tau, Diff::Sigma];
}

/// Assignment of one exponent difference to one column: `sign·diff` equals
/// the column value plus `param`. The arbitrary column carries no param.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SlotFill {
    pub diff: Diff,
    pub sign: i8,
    #[serde(with = "crate::exactnum::bigint_serde::opt")]
    pub param: Option<BigInt>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchwarzMatch {
    pub row: u8,
    /// Slots in column order of the row.
    pub slots: [SlotFill; 3],
    pub parity_required: bool,
}

const PERMS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// Fractional part and floor of `±d`, when `d` is a real rational.
fn residues(d: &Surd) -> Option<[(Rat, BigInt); 2]> {
    let v = d.as_rational()?;
    let split = |x: Rat| {
        let f = x.floor();
        (x - Rat::from(f.clone()), f)
    };
    Some([split(v.clone()), split(-v)])
}

/// Every way the differences fit a row of the table, rows ascending.
pub fn schwarz_table_match(d: &ExpDiffs) -> Vec<SchwarzMatch> {
    let res: Vec<Option<[(Rat, BigInt); 2]>> =
        Diff::ALL.iter().map(|&x| residues(d.get(x))).collect();
    let mut out = Vec::new();
    for r in &SCHWARZ_TABLE {
        let cols: Vec<Option<Rat>> = r.cols.iter().map(|c| c.map(|(n, m)| q(n, m))).collect();
        let mut seen = HashSet::new();
        for perm in PERMS {
            for signs in 0u8..8 {
                let mut slots = Vec::with_capacity(3);
                for (slot, col) in cols.iter().enumerate() {
                    let di = perm[slot];
                    let neg = signs >> slot & 1 == 1;
                    match col {
                        None if neg => break,
                        None => slots.push(SlotFill {
                            diff: Diff::ALL[di],
                            sign: 1,
                            param: None,
                        }),
                        Some(c) => match &res[di] {
                            Some(pair) if &pair[neg as usize].0 == c => slots.push(SlotFill {
                                diff: Diff::ALL[di],
                                sign: if neg { -1 } else { 1 },
                                param: Some(pair[neg as usize].1.clone()),
                            }),
                            _ => break,
                        },
                    }
                }
                if slots.len() < 3 {
                    continue;
                }
                if r.parity {
                    let total: BigInt = slots.iter().filter_map(|s| s.param.clone()).sum();
                    if total.is_odd() {
                        continue;
                    }
                }
                // equal columns produce the same assignment under swaps
                let mut key: Vec<(SlotFill, Option<Rat>)> =
                    slots.iter().cloned().zip(cols.iter().cloned()).collect();
                key.sort_by_key(|a| a.0.diff);
                if !seen.insert(key) {
                    continue;
                }
                out.push(SchwarzMatch {
                    row: r.index,
                    slots: slots.try_into().unwrap(),
                    parity_required: r.parity,
                });
            }
        }
    }
    out
}
