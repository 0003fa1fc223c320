//! Preconditioned conjugate gradients on a 9-point stencil with Dirichlet
//! nodes. The preconditioner inverts the tridiagonal coupling along each
//! η-column exactly (line Jacobi), which removes the stiff direction of thin
//! droplets.

use rayon::prelude::*;

use super::mesh::slot;
use crate::{Error, Result};

/// Fixed reduction chunk so sums do not depend on the thread count.
const CHUNK: usize = 4096;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let partial: Vec<f64> = a
        .par_chunks(CHUNK)
        .zip(b.par_chunks(CHUNK))
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>())
        .collect();
    partial.iter().sum()
}

pub(crate) struct System<'a> {
    pub nx: usize,
    pub ny: usize,
    pub coef: &'a [[f64; 9]],
    /// `true` for nodes whose value is prescribed.
    pub fixed: &'a [bool],
}

struct LineFactors {
    lower: Vec<f64>,
    upper: Vec<f64>,
    inv: Vec<f64>,
}

pub(crate) struct Outcome {
    pub iterations: usize,
    pub residual: f64,
}

impl System<'_> {
    /// `out = K u` on free nodes, 0 on fixed nodes.
    fn apply(&self, u: &[f64], out: &mut [f64]) {
        let ny = self.ny;
        let nx = self.nx;
        out.par_chunks_mut(ny).enumerate().for_each(|(i, col)| {
            let base = i * ny;
            let coef = &self.coef[base..base + ny];
            let fixed = &self.fixed[base..base + ny];
            let interior_column = i > 0 && i + 1 < nx;
            for j in 0..ny {
                if fixed[j] {
                    col[j] = 0.0;
                    continue;
                }
                let row = &coef[j];
                if interior_column && j > 0 && j + 1 < ny {
                    let l = base - ny + j;
                    let c = base + j;
                    let r = base + ny + j;
                    col[j] = row[0] * u[l - 1]
                        + row[1] * u[l]
                        + row[2] * u[l + 1]
                        + row[3] * u[c - 1]
                        + row[4] * u[c]
                        + row[5] * u[c + 1]
                        + row[6] * u[r - 1]
                        + row[7] * u[r]
                        + row[8] * u[r + 1];
                    continue;
                }
                let mut acc = 0.0;
                for di in -1isize..=1 {
                    let ii = i as isize + di;
                    if ii < 0 || ii >= nx as isize {
                        continue;
                    }
                    for dj in -1isize..=1 {
                        let jj = j as isize + dj;
                        if jj < 0 || jj >= ny as isize {
                            continue;
                        }
                        acc += row[slot(di, dj)] * u[ii as usize * ny + jj as usize];
                    }
                }
                col[j] = acc;
            }
        });
    }

    /// Factorizes the tridiagonal column blocks over runs of free nodes.
    /// Fixed nodes get zero entries so the sweep leaves them at 0.
    fn factorize(&self) -> LineFactors {
        let len = self.coef.len();
        let ny = self.ny;
        let mut lower = vec![0.0; len];
        let mut upper = vec![0.0; len];
        let mut inv = vec![0.0; len];
        for n in 0..len {
            if self.fixed[n] {
                continue;
            }
            let j = n % ny;
            let row = &self.coef[n];
            let has_prev = j > 0 && !self.fixed[n - 1];
            let has_next = j + 1 < ny && !self.fixed[n + 1];
            let a = if has_prev { row[slot(0, -1)] } else { 0.0 };
            let c = if has_next { row[slot(0, 1)] } else { 0.0 };
            let prev_upper = if has_prev { upper[n - 1] } else { 0.0 };
            let m = row[slot(0, 0)] - a * prev_upper;
            let m = if m.abs() > 0.0 { m } else { f64::MIN_POSITIVE };
            lower[n] = a;
            inv[n] = 1.0 / m;
            upper[n] = c / m;
        }
        LineFactors { lower, upper, inv }
    }

    fn precondition(&self, f: &LineFactors, r: &[f64], z: &mut [f64]) {
        let ny = self.ny;
        z.par_chunks_mut(ny).enumerate().for_each(|(i, zc)| {
            let base = i * ny;
            let lower = &f.lower[base..base + ny];
            let upper = &f.upper[base..base + ny];
            let inv = &f.inv[base..base + ny];
            let rc = &r[base..base + ny];
            let mut prev = 0.0;
            for k in 0..ny {
                prev = (rc[k] - lower[k] * prev) * inv[k];
                zc[k] = prev;
            }
            for k in (0..ny - 1).rev() {
                zc[k] -= upper[k] * zc[k + 1];
            }
        });
    }

    /// Minimizes `uᵀ K u` over free nodes, starting from `u` (which carries
    /// the prescribed values on fixed nodes). Stops at
    /// `‖r‖ ≤ tol ‖b‖` where `b` is the load produced by the fixed values.
    pub fn solve(&self, u: &mut [f64], tol: f64, max_iter: usize) -> Result<Outcome> {
        let len = u.len();
        let mut lift: Vec<f64> = u
            .iter()
            .zip(self.fixed)
            .map(|(v, &f)| if f { *v } else { 0.0 })
            .collect();
        let mut tmp = vec![0.0; len];
        self.apply(&lift, &mut tmp);
        let b_norm = dot(&tmp, &tmp).sqrt();
        lift.clear();

        let mut r = vec![0.0; len];
        self.apply(u, &mut r);
        r.par_iter_mut().for_each(|v| *v = -*v);
        let mut r_norm = dot(&r, &r).sqrt();
        let target = tol * b_norm;
        if r_norm <= target || r_norm == 0.0 {
            return Ok(Outcome {
                iterations: 0,
                residual: if b_norm > 0.0 { r_norm / b_norm } else { 0.0 },
            });
        }
        let factors = self.factorize();
        let mut z = vec![0.0; len];
        self.precondition(&factors, &r, &mut z);
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        let mut q = tmp;
        for it in 1..=max_iter {
            self.apply(&p, &mut q);
            let pq = dot(&p, &q);
            if !(pq > 0.0) {
                return Err(Error::SolverFailure {
                    iterations: it,
                    residual: r_norm / b_norm,
                });
            }
            let alpha = rz / pq;
            u.par_iter_mut()
                .zip(p.par_iter())
                .for_each(|(x, d)| *x += alpha * d);
            r.par_iter_mut()
                .zip(q.par_iter())
                .for_each(|(x, d)| *x -= alpha * d);
            r_norm = dot(&r, &r).sqrt();
            if r_norm <= target {
                return Ok(Outcome {
                    iterations: it,
                    residual: r_norm / b_norm,
                });
            }
            self.precondition(&factors, &r, &mut z);
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            p.par_iter_mut()
                .zip(z.par_iter())
                .for_each(|(x, d)| *x = d + beta * *x);
        }
        Err(Error::SolverFailure {
            iterations: max_iter,
            residual: r_norm / b_norm,
        })
    }
}
