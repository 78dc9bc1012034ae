//! Minimal symmetric sparse matrix (CSR) and a preconditioned conjugate
//! gradient solver, sized for meshes with a few hundred thousand entries.

use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds an n-by-n matrix from (row, col, value) triplets; duplicate
    /// entries are summed.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_counts = vec![0usize; n + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        let mut prev = None;
        for (r, c, v) in triplets {
            debug_assert!(r < n && c < n);
            if prev == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_counts[r + 1] += 1;
                prev = Some((r, c));
            }
        }
        for r in 0..n {
            row_counts[r + 1] += row_counts[r];
        }
        CsrMatrix {
            n,
            row_ptr: row_counts,
            col_idx,
            values,
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        for (r, yr) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            *yr = acc;
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let mut diag = vec![0.0; self.n];
        for (r, d) in diag.iter_mut().enumerate() {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                if self.col_idx[k] == r {
                    *d += self.values[k];
                }
            }
        }
        diag
    }

    /// Maximum absolute asymmetry `|a_ij - a_ji|`, for validation.
    pub fn asymmetry(&self) -> f64 {
        let mut max = 0.0f64;
        for r in 0..self.n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.col_idx[k];
                let transposed = self.entry(c, r);
                max = max.max((self.values[k] - transposed).abs());
            }
        }
        max
    }

    fn entry(&self, r: usize, c: usize) -> f64 {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.col_idx[range.clone()].binary_search(&c) {
            Ok(pos) => self.values[range.start + pos],
            Err(_) => 0.0,
        }
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// A symmetric linear operator usable by the conjugate gradient solver.
pub trait SymOp {
    fn size(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
    /// Diagonal for Jacobi preconditioning.
    fn diag(&self) -> Vec<f64>;
}

impl SymOp for CsrMatrix {
    fn size(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matvec(x, y);
    }

    fn diag(&self) -> Vec<f64> {
        self.diagonal()
    }
}

/// Jacobi-preconditioned conjugate gradients for symmetric positive
/// (semi-)definite systems. For a singular consistent system (stiffness with
/// constant kernel and right-hand side orthogonal to it) the iterates stay in
/// the complement of the kernel and converge to a particular solution.
///
/// Returns the iteration count. `x` holds the initial guess on entry.
/// A negative-curvature direction (`p' A p <= 0`) reports
/// [`Error::NoConvergence`] unless the residual is already near the target.
pub fn conjugate_gradient(
    a: &impl SymOp,
    b: &[f64],
    x: &mut [f64],
    rel_tol: f64,
    max_iter: usize,
) -> Result<usize> {
    let n = a.size();
    let inv_diag: Vec<f64> = a
        .diag()
        .into_iter()
        .map(|d| if d > 0.0 { 1.0 / d } else { 1.0 })
        .collect();

    let b_norm = norm(b);
    if b_norm == 0.0 {
        x.fill(0.0);
        return Ok(0);
    }
    let target = rel_tol * b_norm;

    let mut r = vec![0.0; n];
    a.apply(x, &mut r);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(ri, di)| ri * di).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];

    for it in 0..max_iter {
        if norm(&r) <= target {
            return Ok(it);
        }
        a.apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            // Singular direction: the Krylov space hit the kernel, which for
            // our consistent systems means we are already at the solution.
            if norm(&r) <= target * 16.0 {
                return Ok(it);
            }
            return Err(Error::NoConvergence {
                iterations: it,
                residual: norm(&r) / b_norm,
            });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    if norm(&r) <= target {
        return Ok(max_iter);
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        residual: norm(&r) / b_norm,
    })
}
