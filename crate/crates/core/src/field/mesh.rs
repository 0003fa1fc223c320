//! Structured grid on the mapped rectangle of a graph domain `{0 < y < f(x)}`.
//!
//! Node `(i, j)` sits at `(ξ_i, η_j)` with uniform `η_j = j/(n_η − 1)`; its
//! physical position is `(ξ_i, η_j f_i)`. Fields are bilinear on each cell
//! and the transformed Dirichlet integrand
//! `f [(Θ_ξ − η (f'/f) Θ_η)² + (Θ_η / f)²]` is integrated with the 2×2
//! Gauss rule, using `f` and `f'` evaluated at the Gauss abscissae. The
//! resulting quadratic form is a sum of squares with positive weights
//! (symmetric positive semi-definite, exactly zero on constants) coupling
//! each node to its 8 neighbours.

const GAUSS: [f64; 2] = [0.211_324_865_405_187_1, 0.788_675_134_594_812_9];

/// Stencil offset `(di, dj)` to slot index.
#[inline]
pub(crate) fn slot(di: isize, dj: isize) -> usize {
    ((di + 1) * 3 + (dj + 1)) as usize
}

/// `(f, f')` at the two Gauss abscissae of each cell column.
pub(crate) type GaussData = [(f64, f64); 2];

/// Gauss abscissae of each cell column.
pub(crate) fn gauss_points(xs: &[f64]) -> Vec<[f64; 2]> {
    xs.windows(2)
        .map(|w| GAUSS.map(|s| w[0] + s * (w[1] - w[0])))
        .collect()
}

/// Gauss-point data by cubic Hermite interpolation of samples and slopes.
/// Falls back to linear interpolation where a slope is infinite or the
/// cubic is not positive.
pub(crate) fn hermite_gauss(xs: &[f64], fs: &[f64], slopes: &[f64]) -> Vec<GaussData> {
    (0..xs.len() - 1)
        .map(|i| {
            let h = xs[i + 1] - xs[i];
            let (f0, f1) = (fs[i], fs[i + 1]);
            let (d0, d1) = (slopes[i], slopes[i + 1]);
            GAUSS.map(|s| {
                let linear = (f0 + s * (f1 - f0), (f1 - f0) / h);
                if !(d0.is_finite() && d1.is_finite()) {
                    return linear;
                }
                let h00 = 2.0 * s * s * s - 3.0 * s * s + 1.0;
                let h10 = s * s * s - 2.0 * s * s + s;
                let h01 = -2.0 * s * s * s + 3.0 * s * s;
                let h11 = s * s * s - s * s;
                let f = h00 * f0 + h10 * h * d0 + h01 * f1 + h11 * h * d1;
                let g00 = 6.0 * s * s - 6.0 * s;
                let g10 = 3.0 * s * s - 4.0 * s + 1.0;
                let g01 = -6.0 * s * s + 6.0 * s;
                let g11 = 3.0 * s * s - 2.0 * s;
                let df = (g00 * f0 + g01 * f1) / h + g10 * d0 + g11 * d1;
                if f > 0.0 {
                    (f, df)
                } else {
                    linear
                }
            })
        })
        .collect()
}

#[derive(Debug, Clone)]
pub(crate) struct Mesh {
    pub xs: Vec<f64>,
    pub tops: Vec<f64>,
    pub ny: usize,
    gauss: Vec<GaussData>,
}

/// Coefficients of the two linear functionals `Θ_ξ − η r Θ_η` and `Θ_η / f`
/// at one Gauss point, over the cell nodes `00, 10, 01, 11`, and the weight.
struct Point {
    l1: [f64; 4],
    l2: [f64; 4],
    weight: f64,
}

impl Mesh {
    pub fn new(xs: Vec<f64>, tops: Vec<f64>, ny: usize, gauss: Vec<GaussData>) -> Self {
        debug_assert_eq!(gauss.len() + 1, xs.len());
        Mesh { xs, tops, ny, gauss }
    }

    pub fn nx(&self) -> usize {
        self.xs.len()
    }

    pub fn len(&self) -> usize {
        self.nx() * self.ny
    }

    pub fn eta(&self, j: usize) -> f64 {
        j as f64 / (self.ny - 1) as f64
    }

    pub fn d_eta(&self) -> f64 {
        1.0 / (self.ny - 1) as f64
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.ny + j
    }

    #[inline]
    pub fn point(&self, i: usize, j: usize) -> [f64; 2] {
        [self.xs[i], self.eta(j) * self.tops[i]]
    }

    /// Quadrature points of cell `(i, j)`.
    fn points(&self, i: usize, j: usize) -> impl Iterator<Item = Point> + '_ {
        let dx = self.xs[i + 1] - self.xs[i];
        let de = self.d_eta();
        let eta0 = self.eta(j);
        (0..2).flat_map(move |a| {
            let (f, df) = self.gauss[i][a];
            let s = GAUSS[a];
            (0..2).map(move |b| {
                let t = GAUSS[b];
                let eta = eta0 + t * de;
                // nodes 00, 10, 01, 11
                let d_xi = [-(1.0 - t) / dx, (1.0 - t) / dx, -t / dx, t / dx];
                let d_eta = [-(1.0 - s) / de, -s / de, (1.0 - s) / de, s / de];
                let r = df / f;
                let mut l1 = [0.0; 4];
                let mut l2 = [0.0; 4];
                for k in 0..4 {
                    l1[k] = d_xi[k] - eta * r * d_eta[k];
                    l2[k] = d_eta[k] / f;
                }
                Point {
                    l1,
                    l2,
                    weight: 0.25 * dx * de * f,
                }
            })
        })
    }

    fn cell_nodes(&self, i: usize, j: usize) -> [(usize, usize); 4] {
        [(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)]
    }

    /// Stiffness stencil of the quadratic form: `coef[n][slot(di, dj)]`.
    pub fn stiffness(&self) -> Vec<[f64; 9]> {
        let mut coef = vec![[0.0; 9]; self.len()];
        for i in 0..self.nx() - 1 {
            for j in 0..self.ny - 1 {
                let nodes = self.cell_nodes(i, j);
                for p in self.points(i, j) {
                    for a in 0..4 {
                        let n = self.index(nodes[a].0, nodes[a].1);
                        for b in 0..4 {
                            let di = nodes[b].0 as isize - nodes[a].0 as isize;
                            let dj = nodes[b].1 as isize - nodes[a].1 as isize;
                            coef[n][slot(di, dj)] +=
                                p.weight * (p.l1[a] * p.l1[b] + p.l2[a] * p.l2[b]);
                        }
                    }
                }
            }
        }
        coef
    }

    fn cell_energy(&self, i: usize, j: usize, u: &[f64]) -> f64 {
        let vals = self.cell_nodes(i, j).map(|(a, b)| u[self.index(a, b)]);
        let mut e = 0.0;
        for p in self.points(i, j) {
            let mut g1 = 0.0;
            let mut g2 = 0.0;
            for k in 0..4 {
                g1 += p.l1[k] * vals[k];
                g2 += p.l2[k] * vals[k];
            }
            e += p.weight * (g1 * g1 + g2 * g2);
        }
        e
    }

    /// Energy carried by each cell column `[ξ_i, ξ_{i+1}]`.
    pub fn column_energy(&self, u: &[f64]) -> Vec<f64> {
        (0..self.nx() - 1)
            .map(|i| (0..self.ny - 1).map(|j| self.cell_energy(i, j, u)).sum())
            .collect()
    }

    /// `∫|∇u|²` of the bilinear field with nodal values `u`.
    pub fn energy(&self, u: &[f64]) -> f64 {
        self.column_energy(u).iter().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(n: usize) -> Mesh {
        let xs: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let gauss = vec![[(1.0, 0.0); 2]; n - 1];
        Mesh::new(xs, vec![1.0; n], n, gauss)
    }

    #[test]
    fn stencil_rows_sum_to_zero_and_are_symmetric() {
        let xs: Vec<f64> = (0..9).map(|i| -1.0 + 0.25 * i as f64).collect();
        let fs: Vec<f64> = xs.iter().map(|x: &f64| 1.0 + 0.3 * x.cos()).collect();
        let ds: Vec<f64> = xs.iter().map(|x: &f64| -0.3 * x.sin()).collect();
        let m = Mesh::new(xs.clone(), fs.clone(), 6, hermite_gauss(&xs, &fs, &ds));
        let k = m.stiffness();
        for i in 0..m.nx() {
            for j in 0..m.ny {
                let row = &k[m.index(i, j)];
                assert!(row.iter().sum::<f64>().abs() < 1e-12);
                for di in -1isize..=1 {
                    for dj in -1isize..=1 {
                        let (ii, jj) = (i as isize + di, j as isize + dj);
                        if ii < 0 || jj < 0 || ii >= m.nx() as isize || jj >= m.ny as isize {
                            continue;
                        }
                        let other = &k[m.index(ii as usize, jj as usize)];
                        assert!((row[slot(di, dj)] - other[slot(-di, -dj)]).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn energy_of_linear_function_is_exact() {
        let m = square(7);
        let u: Vec<f64> = (0..m.len())
            .map(|n| {
                let p = m.point(n / m.ny, n % m.ny);
                2.0 * p[0] - 3.0 * p[1]
            })
            .collect();
        assert!((m.energy(&u) - 13.0).abs() < 1e-12);
    }

    #[test]
    fn hermite_reproduces_cubics() {
        let xs = [0.0, 0.5, 1.5];
        let p = |x: f64| 1.0 + x - 0.5 * x * x + 0.25 * x * x * x;
        let dp = |x: f64| 1.0 - x + 0.75 * x * x;
        let fs: Vec<f64> = xs.iter().map(|&x| p(x)).collect();
        let ds: Vec<f64> = xs.iter().map(|&x| dp(x)).collect();
        let g = hermite_gauss(&xs, &fs, &ds);
        let x = 0.5 + GAUSS[1];
        assert!((g[1][1].0 - p(x)).abs() < 1e-14);
        assert!((g[1][1].1 - dp(x)).abs() < 1e-13);
    }
}
