//! Small dense symmetric linear algebra: Cholesky solve, cyclic Jacobi
//! eigendecomposition, and the PSD square root.

use crate::{Error, Result};

/// Symmetric matrix stored as its packed lower triangle, so `get(i, j)` and
/// `get(j, i)` read the same entry.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

#[inline]
fn idx(i: usize, j: usize) -> usize {
    let (r, c) = if i >= j { (i, j) } else { (j, i) };
    r * (r + 1) / 2 + c
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * (n + 1) / 2],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, v) in d.iter().enumerate() {
            m.set(i, i, *v);
        }
        m
    }

    /// Builds the matrix from `f(i, j)` evaluated on the lower triangle.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in 0..=i {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    /// Reads the lower triangle of a dense row-major matrix.
    pub fn from_dense_lower(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        for r in rows {
            if r.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    got: r.len(),
                });
            }
        }
        Ok(Self::from_fn(n, |i, j| rows[i][j]))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[idx(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[idx(i, j)] = v;
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|v| f(*v)).collect(),
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// Max-abs-row-sum norm.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n, "dimension mismatch in mul_vec");
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    pub fn quad_form(&self, x: &[f64]) -> f64 {
        dot(x, &self.mul_vec(x))
    }

    /// Product `self · other`, symmetrized (exact when the factors commute).
    pub fn mul_sym(&self, other: &SymMatrix) -> SymMatrix {
        let n = self.n;
        SymMatrix::from_fn(n, |i, j| {
            let a: f64 = (0..n).map(|k| self.get(i, k) * other.get(k, j)).sum();
            let b: f64 = (0..n).map(|k| self.get(j, k) * other.get(k, i)).sum();
            0.5 * (a + b)
        })
    }

    /// `A B A` for symmetric A and B (always symmetric).
    pub fn sandwich(&self, inner: &SymMatrix) -> SymMatrix {
        let n = self.n;
        let dense_a = self.to_dense();
        let mut ab = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                ab[i][j] = (0..n).map(|k| dense_a[i][k] * inner.get(k, j)).sum();
            }
        }
        SymMatrix::from_fn(n, |i, j| (0..n).map(|k| ab[i][k] * dense_a[k][j]).sum())
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm_inf_vec(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Lower Cholesky factor as dense rows.
fn cholesky(a: &SymMatrix) -> Result<Vec<Vec<f64>>> {
    let n = a.dim();
    let mut l = vec![vec![0.0; n]; n];
    for j in 0..n {
        let mut d = a.get(j, j);
        for k in 0..j {
            d -= l[j][k] * l[j][k];
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::Singular { pivot: j, value: d });
        }
        let ljj = d.sqrt();
        l[j][j] = ljj;
        for i in (j + 1)..n {
            let mut s = a.get(i, j);
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            l[i][j] = s / ljj;
        }
    }
    Ok(l)
}

/// Solves `a x = b` for symmetric positive definite `a` by Cholesky, with one
/// step of iterative refinement.
pub fn solve_spd(a: &SymMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.dim();
    if b.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: b.len(),
        });
    }
    let l = cholesky(a)?;
    let solve = |rhs: &[f64]| -> Vec<f64> {
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut s = rhs[i];
            for k in 0..i {
                s -= l[i][k] * y[k];
            }
            y[i] = s / l[i][i];
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= l[k][i] * x[k];
            }
            x[i] = s / l[i][i];
        }
        x
    };
    let mut x = solve(b);
    let ax = a.mul_vec(&x);
    let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
    if norm_inf_vec(&r) > 0.0 {
        let dx = solve(&r);
        for (xi, d) in x.iter_mut().zip(dx) {
            *xi += d;
        }
    }
    Ok(x)
}

/// Eigendecomposition of a symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigen {
    /// Eigenvalues, descending.
    pub values: Vec<f64>,
    /// `vectors[k]` is the unit eigenvector for `values[k]`.
    pub vectors: Vec<Vec<f64>>,
}

/// Cyclic Jacobi eigensolver.
pub fn sym_eig(a: &SymMatrix) -> Result<Eigen> {
    let n = a.dim();
    let mut m = a.to_dense();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let scale = a.norm_inf().max(f64::MIN_POSITIVE);
    let mut converged = n <= 1;
    for _sweep in 0..100 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p][q];
                // negligible against both diagonal entries: annihilate
                if apq.abs() <= 1e-18 * scale
                    || apq.abs() <= f64::EPSILON * 1e-2 * (m[p][p].abs().min(m[q][q].abs()))
                {
                    m[p][q] = 0.0;
                    m[q][p] = 0.0;
                    continue;
                }
                rotated = true;
                let theta = (m[q][q] - m[p][p]) / (2.0 * apq);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                m[p][q] = 0.0;
                m[q][p] = 0.0;
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Convergence {
            what: "Jacobi eigensolver".into(),
            best_point: (0..n).map(|i| m[i][i]).collect(),
            best_value: f64::NAN,
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[j][j].partial_cmp(&m[i][i]).expect("finite eigenvalues"));
    let values = order.iter().map(|&k| m[k][k]).collect();
    let vectors = order
        .iter()
        .map(|&k| (0..n).map(|i| v[i][k]).collect())
        .collect();
    Ok(Eigen { values, vectors })
}

/// Rebuilds `Σ g(λ_k) v_k v_kᵀ`.
pub fn spectral_map(e: &Eigen, g: impl Fn(f64) -> f64) -> SymMatrix {
    let n = e.values.len();
    let gl: Vec<f64> = e.values.iter().map(|l| g(*l)).collect();
    SymMatrix::from_fn(n, |i, j| {
        (0..n)
            .map(|k| gl[k] * e.vectors[k][i] * e.vectors[k][j])
            .sum()
    })
}

/// Principal square root of a PSD matrix. Eigenvalues in
/// `[−1e-12·‖a‖, 0)` are treated as zero.
pub fn sqrt_spd(a: &SymMatrix) -> Result<SymMatrix> {
    let e = sym_eig(a)?;
    let floor = -1e-12 * a.norm_inf();
    if let Some(min) = e.values.last() {
        if *min < floor {
            return Err(Error::Domain(format!(
                "matrix has negative eigenvalue {min:e}"
            )));
        }
    }
    Ok(spectral_map(&e, |l| l.max(0.0).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_spd(n: usize, rng: &mut ChaCha8Rng) -> SymMatrix {
        let g: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        SymMatrix::from_fn(n, |i, j| {
            (0..n).map(|k| g[i][k] * g[j][k]).sum::<f64>() + if i == j { n as f64 * 0.1 } else { 0.0 }
        })
    }

    // Gaussian elimination with partial pivoting on the dense copy.
    fn gauss_elim(a: &SymMatrix, b: &[f64]) -> Vec<f64> {
        let n = a.dim();
        let mut m = a.to_dense();
        let mut rhs = b.to_vec();
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())
                .unwrap();
            m.swap(col, piv);
            rhs.swap(col, piv);
            for r in (col + 1)..n {
                let f = m[r][col] / m[col][col];
                for c in col..n {
                    m[r][c] -= f * m[col][c];
                }
                rhs[r] -= f * rhs[col];
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let s: f64 = ((i + 1)..n).map(|k| m[i][k] * x[k]).sum();
            x[i] = (rhs[i] - s) / m[i][i];
        }
        x
    }

    #[test]
    fn storage_is_symmetric() {
        let mut m = SymMatrix::zeros(3);
        m.set(0, 2, 5.0);
        assert_eq!(m.get(2, 0), 5.0);
    }

    #[test]
    fn solve_small_cases() {
        let b = [1.5, -2.0, 0.25];
        assert_eq!(solve_spd(&SymMatrix::identity(3), &b).unwrap(), b.to_vec());
        let a = SymMatrix::from_dense_lower(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let x = solve_spd(&a, &[3.0, 3.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn solve_against_elimination() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_spd(5, &mut rng);
        let b: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let x = solve_spd(&a, &b).unwrap();
        let y = gauss_elim(&a, &b);
        for (p, q) in x.iter().zip(&y) {
            assert!((p - q).abs() < 1e-9);
        }
    }

    #[test]
    fn solve_residual_up_to_63() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [1, 2, 7, 20, 40, 63] {
            let a = random_spd(n, &mut rng);
            let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let x = solve_spd(&a, &b).unwrap();
            let r: Vec<f64> = a.mul_vec(&x).iter().zip(&b).map(|(p, q)| p - q).collect();
            assert!(norm_inf_vec(&r) <= 1e-10 * norm_inf_vec(&b), "n={n}");
        }
    }

    #[test]
    fn non_pd_is_singular() {
        let a = SymMatrix::from_dense_lower(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(matches!(solve_spd(&a, &[1.0, 1.0]), Err(Error::Singular { pivot: 1, .. })));
    }

    #[test]
    fn eig_small_cases() {
        let e = sym_eig(&SymMatrix::from_diagonal(&[1.0, 3.0, 2.0])).unwrap();
        assert_eq!(e.values, vec![3.0, 2.0, 1.0]);
        let a = SymMatrix::from_dense_lower(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let e = sym_eig(&a).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-15 && (e.values[1] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn eig_reconstruction_and_orthonormality() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [10, 31, 63] {
            let a = SymMatrix::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
            let e = sym_eig(&a).unwrap();
            let back = spectral_map(&e, |l| l);
            let norm = a.norm_inf();
            for i in 0..n {
                for j in 0..n {
                    assert!((back.get(i, j) - a.get(i, j)).abs() <= 1e-9 * norm);
                    let g = dot(&e.vectors[i], &e.vectors[j]);
                    let target = if i == j { 1.0 } else { 0.0 };
                    assert!((g - target).abs() <= 1e-9);
                }
                let av = a.mul_vec(&e.vectors[i]);
                for k in 0..n {
                    assert!((av[k] - e.values[i] * e.vectors[i][k]).abs() <= 1e-9 * norm);
                }
            }
            assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn sqrt_cases() {
        let s = sqrt_spd(&SymMatrix::identity(4)).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((s.get(i, j) - if i == j { 1.0 } else { 0.0 }).abs() < 1e-15);
            }
        }
        let s = sqrt_spd(&SymMatrix::from_diagonal(&[4.0, 9.0])).unwrap();
        assert!((s.get(0, 0) - 2.0).abs() < 1e-15 && (s.get(1, 1) - 3.0).abs() < 1e-15);
        assert_eq!(s.get(0, 1), 0.0);

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_spd(12, &mut rng);
        let s = sqrt_spd(&a).unwrap();
        let ss = s.mul_sym(&s);
        for i in 0..12 {
            for j in 0..12 {
                assert!((ss.get(i, j) - a.get(i, j)).abs() <= 1e-9 * a.norm_inf());
            }
        }
        let bad = SymMatrix::from_diagonal(&[1.0, -0.5]);
        assert!(matches!(sqrt_spd(&bad), Err(Error::Domain(_))));
    }
}
