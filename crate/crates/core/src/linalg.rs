//! Small dense linear solves over floats and jets.

use crate::error::Error;
use crate::jet::Jet;

/// Solve `A x = b` by Gaussian elimination with partial pivoting.
pub fn solve_f64(a: &[Vec<f64>], b: &[f64]) -> Result<Vec<f64>, Error> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.iter().cloned().collect();
    let mut x: Vec<f64> = b.to_vec();
    for c in 0..n {
        let piv = (c..n)
            .max_by(|&i, &j| m[i][c].abs().partial_cmp(&m[j][c].abs()).unwrap())
            .unwrap();
        if m[piv][c].abs() < 1e-300 {
            return Err(Error::degenerate("singular matrix in solve"));
        }
        m.swap(c, piv);
        x.swap(c, piv);
        for r in (c + 1)..n {
            let f = m[r][c] / m[c][c];
            if f != 0.0 {
                for k in c..n {
                    let v = m[c][k];
                    m[r][k] -= f * v;
                }
                x[r] -= f * x[c];
            }
        }
    }
    for c in (0..n).rev() {
        for k in (c + 1)..n {
            let v = x[k];
            x[c] -= m[c][k] * v;
        }
        x[c] /= m[c][c];
    }
    Ok(x)
}

/// Solve a linear system whose entries are jets (derivatives propagate).
/// Pivoting is on the value parts.
pub fn solve_jets(a: &[Vec<Jet>], b: &[Jet]) -> Result<Vec<Jet>, Error> {
    let n = a.len();
    let mut m: Vec<Vec<Jet>> = a.to_vec();
    let mut x: Vec<Jet> = b.to_vec();
    for c in 0..n {
        let piv = (c..n)
            .max_by(|&i, &j| m[i][c].v.abs().partial_cmp(&m[j][c].v.abs()).unwrap())
            .unwrap();
        if m[piv][c].v.abs() < 1e-300 {
            return Err(Error::degenerate("singular jet matrix in solve"));
        }
        m.swap(c, piv);
        x.swap(c, piv);
        for r in (c + 1)..n {
            if m[r][c].v != 0.0 || m[r][c].g.iter().any(|&g| g != 0.0) {
                let f = m[r][c].div(&m[c][c]);
                for k in c..n {
                    let v = m[c][k].clone();
                    m[r][k] = m[r][k].sub(&f.mul(&v));
                }
                let v = x[c].clone();
                x[r] = x[r].sub(&f.mul(&v));
            }
        }
    }
    for c in (0..n).rev() {
        for k in (c + 1)..n {
            let v = x[k].clone();
            x[c] = x[c].sub(&m[c][k].mul(&v));
        }
        x[c] = x[c].div(&m[c][c]);
    }
    Ok(x)
}

/// Invert a jet matrix column by column.
pub fn invert_jets(a: &[Vec<Jet>]) -> Result<Vec<Vec<Jet>>, Error> {
    let n = a.len();
    let dim = a[0][0].n;
    let ord = a[0][0].ord;
    let mut cols: Vec<Vec<Jet>> = Vec::with_capacity(n);
    for j in 0..n {
        let e: Vec<Jet> = (0..n)
            .map(|i| Jet::constant(dim, ord, if i == j { 1.0 } else { 0.0 }))
            .collect();
        cols.push(solve_jets(a, &e)?);
    }
    // cols[j][i] = (A^-1)_{ij}; transpose into row-major
    Ok((0..n)
        .map(|i| (0..n).map(|j| cols[j][i].clone()).collect())
        .collect())
}
