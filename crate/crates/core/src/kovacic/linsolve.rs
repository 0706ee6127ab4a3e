use crate::exactnum::Rat;

/// One solution of `M x = b` over the rationals by Gauss–Jordan elimination,
/// with free variables set to zero; `None` when the system is inconsistent.
pub(crate) fn solve(
    mut rows: Vec<Vec<Rat>>,
    mut rhs: Vec<Rat>,
    unknowns: usize,
) -> Option<Vec<Rat>> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..unknowns {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        rhs.swap(r, p);
        let inv = rows[r][col].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        rhs[r] *= &inv;
        let pivot_row = rows[r].clone();
        let pivot_rhs = rhs[r].clone();
        for (i, (row, b)) in rows.iter_mut().zip(rhs.iter_mut()).enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (x, p) in row[col..unknowns].iter_mut().zip(&pivot_row[col..unknowns]) {
                *x -= &(&f * p);
            }
            *b -= &(&f * &pivot_rhs);
        }
        pivots.push(col);
        r += 1;
    }
    if rhs[r..].iter().any(|x| !x.is_zero()) {
        return None;
    }
    let mut x = vec![Rat::zero(); unknowns];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = rhs[i].clone();
    }
    Some(x)
}
