//! Small dense helpers on 14×14 hermitian matrices.

use crate::model::{CVec14, Mat14, DIM};
use crate::C64;

/// Eigenpairs of a hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    pub vectors: Vec<CVec14>,
}

pub fn hermitian_eigen(m: &Mat14) -> EigenPairs {
    // symmetrize against rounding before the solver sees it
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let mut idx: Vec<usize> = (0..DIM).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    EigenPairs {
        values: idx.iter().map(|&i| eig.eigenvalues[i]).collect(),
        vectors: idx
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect(),
    }
}

/// Groups ascending values into clusters whose consecutive gaps are below `tol`.
pub fn cluster(values: &[f64], tol: f64) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (i, v) in values.iter().enumerate() {
        match out.last_mut() {
            Some(g) if (v - values[*g.last().unwrap()]).abs() <= tol => g.push(i),
            _ => out.push(vec![i]),
        }
    }
    out
}

pub fn outer(a: &CVec14, b: &CVec14) -> Mat14 {
    a * b.adjoint()
}

pub fn projector(vectors: &[&CVec14]) -> Mat14 {
    vectors
        .iter()
        .fold(Mat14::zeros(), |acc, v| acc + outer(v, v))
}

/// First-order variation of the spectral projector onto `group` when the
/// matrix moves by `x` (complex-linear in `x`).
pub fn projector_derivative(pairs: &EigenPairs, group: &[usize], x: &Mat14) -> Mat14 {
    let mut out = Mat14::zeros();
    for &a in group {
        let pa = outer(&pairs.vectors[a], &pairs.vectors[a]);
        for b in 0..DIM {
            if group.contains(&b) {
                continue;
            }
            let pb = outer(&pairs.vectors[b], &pairs.vectors[b]);
            let d = pairs.values[a] - pairs.values[b];
            out += (pb * x * pa + pa * x * pb) / C64::new(d, 0.0);
        }
    }
    out
}

/// Largest entry modulus.
pub fn max_abs(m: &Mat14) -> f64 {
    m.iter().fold(0.0f64, |a, z| a.max(z.norm()))
}

/// Spectral norm of a general complex matrix.
pub fn op_norm(m: &Mat14) -> f64 {
    let g = m.adjoint() * m;
    let e = hermitian_eigen(&g);
    e.values.last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(vals: &[f64]) -> Mat14 {
        let mut m = Mat14::zeros();
        for (i, v) in vals.iter().enumerate() {
            m[(i, i)] = C64::new(*v, 0.0);
        }
        m
    }

    #[test]
    fn clusters_by_gap() {
        let g = cluster(&[0.0, 1e-12, 1.0, 2.0, 2.0 + 1e-13], 1e-9);
        assert_eq!(g, vec![vec![0, 1], vec![2], vec![3, 4]]);
    }

    #[test]
    fn projector_derivative_matches_difference() {
        let vals: Vec<f64> = (0..DIM).map(|i| i as f64 * 0.7 - 3.0).collect();
        let m = diag(&vals);
        let mut x = Mat14::zeros();
        for i in 0..DIM {
            for j in 0..DIM {
                let v = ((i * 7 + j * 3) % 5) as f64 - 2.0;
                x[(i, j)] += C64::new(v, 0.1 * (i as f64 - j as f64));
            }
        }
        let x = (x + x.adjoint()) * C64::new(0.5, 0.0);
        let group = [2usize, 3];
        let h = 1e-6;
        let proj = |mm: &Mat14| {
            let p = hermitian_eigen(mm);
            projector(&group.iter().map(|&i| &p.vectors[i]).collect::<Vec<_>>())
        };
        let fd = (proj(&(m + x * C64::new(h, 0.0))) - proj(&(m - x * C64::new(h, 0.0))))
            / C64::new(2.0 * h, 0.0);
        let exact = projector_derivative(&hermitian_eigen(&m), &group, &x);
        assert!(max_abs(&(fd - exact)) < 1e-6);
    }
}
