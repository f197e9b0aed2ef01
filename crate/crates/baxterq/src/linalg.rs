//! Dense complex matrices plus the two small eigensolvers the crate needs:
//! a cyclic Jacobi diagonalizer for Hermitian blocks and a shifted Hessenberg
//! QR iteration for companion matrices. Dimensions stay well below 100, so
//! simple O(n^3) routines are entirely adequate.

use num_complex::Complex64;

pub type C64 = Complex64;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// e^{i theta}
pub fn cis(theta: f64) -> C64 {
    C64::new(theta.cos(), theta.sin())
}

pub const C_ZERO: C64 = C64::new(0.0, 0.0);
pub const C_ONE: C64 = C64::new(1.0, 0.0);

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C_ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C_ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn mul(&self, rhs: &CMat) -> CMat {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in matrix product");
        let mut out = CMat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C_ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (o, r) in out.data.iter_mut().zip(rhs.data.iter()) {
            *o += r;
        }
        out
    }

    pub fn sub(&self, rhs: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (o, r) in out.data.iter_mut().zip(rhs.data.iter()) {
            *o -= r;
        }
        out
    }

    pub fn scale(&self, s: C64) -> CMat {
        let mut out = self.clone();
        for o in out.data.iter_mut() {
            *o *= s;
        }
        out
    }

    pub fn adjoint(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn fro_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// max-abs entry of [A, B] = AB - BA.
    pub fn commutator_max(&self, rhs: &CMat) -> f64 {
        self.mul(rhs).sub(&rhs.mul(self)).max_abs()
    }

    pub fn hermiticity_residual(&self) -> f64 {
        self.sub(&self.adjoint()).max_abs()
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        let mut out = vec![C_ZERO; self.rows];
        for i in 0..self.rows {
            let mut acc = C_ZERO;
            for j in 0..self.cols {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Extracts the square submatrix on the given index set.
    pub fn submatrix(&self, idx: &[usize]) -> CMat {
        CMat::from_fn(idx.len(), idx.len(), |i, j| self[(idx[i], idx[j])])
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
/// Returns eigenvalues ascending and the unitary of eigenvectors (columns),
/// so that A V = V diag(w).
pub fn eigh(a: &CMat) -> (Vec<f64>, CMat) {
    assert!(a.is_square());
    let n = a.rows();
    let mut h = a.clone();
    let mut v = CMat::identity(n);
    if n == 0 {
        return (vec![], v);
    }

    let scale = a.max_abs().max(1e-300);
    let tol = 1e-15 * scale;

    for _sweep in 0..80 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(h[(p, q)].norm());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = h[(p, q)];
                if apq.norm() <= tol * 1e-2 {
                    continue;
                }
                let app = h[(p, p)].re;
                let aqq = h[(q, q)].re;
                let phase = apq / apq.norm();
                let tau = (aqq - app) / (2.0 * apq.norm());
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let cth = 1.0 / (1.0 + t * t).sqrt();
                let sth = t * cth;
                // Unitary G: rows/cols p,q with entries
                //   [ c            s * phase ]
                //   [ -s * conj(phase)   c  ]
                // applied as H <- G^dagger H G.
                let gpp = c(cth, 0.0);
                let gpq = phase * sth;
                let gqp = -phase.conj() * sth;
                let gqq = c(cth, 0.0);
                // H <- G^† H G: first columns, then rows.
                for i in 0..n {
                    let hip = h[(i, p)];
                    let hiq = h[(i, q)];
                    h[(i, p)] = hip * gpp + hiq * gqp;
                    h[(i, q)] = hip * gpq + hiq * gqq;
                }
                for j in 0..n {
                    let hpj = h[(p, j)];
                    let hqj = h[(q, j)];
                    h[(p, j)] = gpp.conj() * hpj + gqp.conj() * hqj;
                    h[(q, j)] = gpq.conj() * hpj + gqq.conj() * hqj;
                }
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * gpp + viq * gqp;
                    v[(i, q)] = vip * gpq + viq * gqq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let evals: Vec<f64> = (0..n).map(|i| h[(i, i)].re).collect();
    order.sort_by(|&i, &j| evals[i].partial_cmp(&evals[j]).unwrap());
    let w: Vec<f64> = order.iter().map(|&i| evals[i]).collect();
    let vs = CMat::from_fn(n, n, |i, j| v[(i, order[j])]);
    (w, vs)
}

/// Eigenvalues of an upper Hessenberg complex matrix by shifted QR with
/// deflation. Used for companion matrices of modest degree.
pub fn hessenberg_eigenvalues(mut h: CMat) -> Vec<C64> {
    assert!(h.is_square());
    let n = h.rows();
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    let mut hi = n - 1;
    let mut iters_at = 0usize;
    let max_total = 100 * n + 200;
    let mut total = 0usize;

    loop {
        // deflate trailing 1x1 / 2x2 blocks
        loop {
            if hi == 0 {
                out.push(h[(0, 0)]);
                out.sort_by(|a, b| {
                    (a.re, a.im)
                        .partial_cmp(&(b.re, b.im))
                        .unwrap_or(std::cmp::Ordering::Equal)
                });
                return out;
            }
            let small = 1e-16 * (h[(hi - 1, hi - 1)].norm() + h[(hi, hi)].norm() + 1e-300);
            if h[(hi, hi - 1)].norm() <= small {
                out.push(h[(hi, hi)]);
                hi -= 1;
                iters_at = 0;
            } else if hi >= 1 && {
                let lead = if hi >= 2 {
                    h[(hi - 1, hi - 2)].norm()
                } else {
                    0.0
                };
                lead <= 1e-16 * (h[(hi - 1, hi - 1)].norm() + h[(hi, hi)].norm() + 1e-300)
                    && hi >= 1
            } {
                // 2x2 block [hi-1, hi]
                let a = h[(hi - 1, hi - 1)];
                let b = h[(hi - 1, hi)];
                let cc = h[(hi, hi - 1)];
                let d = h[(hi, hi)];
                let tr = a + d;
                let disc = ((a - d) * (a - d) + 4.0 * b * cc).sqrt();
                out.push((tr + disc) * 0.5);
                out.push((tr - disc) * 0.5);
                if hi == 1 {
                    out.sort_by(|a, b| {
                        (a.re, a.im)
                            .partial_cmp(&(b.re, b.im))
                            .unwrap_or(std::cmp::Ordering::Equal)
                    });
                    return out;
                }
                hi -= 2;
                iters_at = 0;
            } else {
                break;
            }
        }

        total += 1;
        iters_at += 1;
        if total > max_total {
            // Give back what we have; callers polish with Newton anyway.
            for i in 0..=hi {
                out.push(h[(i, i)]);
            }
            out.sort_by(|a, b| {
                (a.re, a.im)
                    .partial_cmp(&(b.re, b.im))
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
            return out;
        }

        // find the start of the active block
        let mut lo = hi;
        while lo > 0 {
            let small = 1e-16 * (h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm() + 1e-300);
            if h[(lo, lo - 1)].norm() <= small {
                break;
            }
            lo -= 1;
        }

        // Wilkinson shift from the trailing 2x2 of the active block,
        // with an occasional exceptional shift to break cycles.
        let mut mu = {
            let a = h[(hi - 1, hi - 1)];
            let b = h[(hi - 1, hi)];
            let cc = h[(hi, hi - 1)];
            let d = h[(hi, hi)];
            let tr = a + d;
            let disc = ((a - d) * (a - d) + 4.0 * b * cc).sqrt();
            let l1 = (tr + disc) * 0.5;
            let l2 = (tr - disc) * 0.5;
            if (l1 - d).norm() < (l2 - d).norm() {
                l1
            } else {
                l2
            }
        };
        if iters_at % 12 == 0 {
            mu += c(1.0 + 0.1 * iters_at as f64, 0.31) * h[(hi, hi - 1)].norm();
        }

        // QR step on the active window via Givens rotations.
        let k0 = lo;
        let k1 = hi;
        let mut gs: Vec<(C64, C64)> = Vec::with_capacity(k1 - k0);
        for i in k0..=k1 {
            h[(i, i)] -= mu;
        }
        for k in k0..k1 {
            let x = h[(k, k)];
            let y = h[(k + 1, k)];
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let (cs, sn) = if r == 0.0 {
                (C_ONE, C_ZERO)
            } else {
                (x.conj() / r, y.conj() / r)
            };
            gs.push((cs, sn));
            for j in k..=k1 {
                let a = h[(k, j)];
                let b = h[(k + 1, j)];
                h[(k, j)] = cs * a + sn * b;
                h[(k + 1, j)] = -sn.conj() * a + cs.conj() * b;
            }
        }
        for (k, (cs, sn)) in (k0..k1).zip(gs.iter()) {
            let top = (k + 2).min(k1);
            for i in k0..=top {
                let a = h[(i, k)];
                let b = h[(i, k + 1)];
                h[(i, k)] = a * cs.conj() + b * sn.conj();
                h[(i, k + 1)] = -a * *sn + b * *cs;
            }
        }
        for i in k0..=k1 {
            h[(i, i)] += mu;
        }
    }
}


/// Solves A x = b by Gaussian elimination with partial pivoting.
pub fn solve(a: &CMat, b: &[C64]) -> Option<Vec<C64>> {
    assert!(a.is_square());
    let n = a.rows();
    assert_eq!(b.len(), n);
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let (piv, piv_val) = (col..n)
            .map(|r| (r, m[(r, col)].norm()))
            .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
            .unwrap();
        if piv_val < 1e-300 {
            return None;
        }
        if piv != col {
            for j in 0..n {
                let tmp = m[(col, j)];
                m[(col, j)] = m[(piv, j)];
                m[(piv, j)] = tmp;
            }
            rhs.swap(col, piv);
        }
        let d = m[(col, col)];
        for r in (col + 1)..n {
            let f = m[(r, col)] / d;
            if f == C_ZERO {
                continue;
            }
            for j in col..n {
                let v = m[(col, j)];
                m[(r, j)] -= f * v;
            }
            let v = rhs[col];
            rhs[r] -= f * v;
        }
    }
    let mut x = vec![C_ZERO; n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for j in (row + 1)..n {
            acc -= m[(row, j)] * x[j];
        }
        x[row] = acc / m[(row, row)];
    }
    Some(x)
}

/// Matrix inverse via Gaussian elimination (small dimensions).
pub fn invert(a: &CMat) -> Option<CMat> {
    let n = a.rows();
    let mut out = CMat::zeros(n, n);
    for j in 0..n {
        let mut e = vec![C_ZERO; n];
        e[j] = C_ONE;
        let col = solve(a, &e)?;
        for i in 0..n {
            out[(i, j)] = col[i];
        }
    }
    Some(out)
}

/// Householder reduction of a general complex matrix to upper Hessenberg form
/// (eigenvalues preserved).
fn hessenberg_reduce(a: &CMat) -> CMat {
    let n = a.rows();
    let mut h = a.clone();
    for k in 0..n.saturating_sub(2) {
        // build the reflector annihilating column k below row k+1
        let mut x: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-300 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 {
            x[0] / x[0].norm()
        } else {
            C_ONE
        };
        x[0] += phase * norm;
        let vnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm < 1e-300 {
            continue;
        }
        for z in x.iter_mut() {
            *z /= vnorm;
        }
        // H <- (1 - 2 v v^dag) H (1 - 2 v v^dag)
        for j in 0..n {
            let dot: C64 = x
                .iter()
                .enumerate()
                .map(|(i, v)| v.conj() * h[(k + 1 + i, j)])
                .sum();
            for (i, v) in x.iter().enumerate() {
                let val = h[(k + 1 + i, j)] - 2.0 * v * dot;
                h[(k + 1 + i, j)] = val;
            }
        }
        for i in 0..n {
            let dot: C64 = x
                .iter()
                .enumerate()
                .map(|(jj, v)| h[(i, k + 1 + jj)] * v)
                .sum();
            for (jj, v) in x.iter().enumerate() {
                let val = h[(i, k + 1 + jj)] - 2.0 * dot * v.conj();
                h[(i, k + 1 + jj)] = val;
            }
        }
    }
    h
}

/// Eigenvalues of a general small complex matrix.
pub fn general_eigenvalues(a: &CMat) -> Vec<C64> {
    hessenberg_eigenvalues(hessenberg_reduce(a))
}

/// Eigenpairs of a small general complex matrix via inverse iteration on the
/// QR eigenvalues. Returns None when two eigenvalues collide within the
/// resolution threshold (the caller should try a different probe operator).
pub fn small_eigenpairs(a: &CMat, rel_tol: f64) -> Option<(Vec<C64>, CMat)> {
    let n = a.rows();
    let vals = general_eigenvalues(a);
    let scale = a.max_abs().max(1.0);
    for i in 0..n {
        for j in (i + 1)..n {
            if (vals[i] - vals[j]).norm() < rel_tol * scale {
                return None;
            }
        }
    }
    let mut vecs = CMat::zeros(n, n);
    for (j, &lam) in vals.iter().enumerate() {
        let shifted = {
            let mut s = a.clone();
            // small complex detuning keeps the solve nonsingular
            let eps = c(1e-11 * scale, 3e-12 * scale);
            for i in 0..n {
                s[(i, i)] -= lam + eps;
            }
            s
        };
        let mut v: Vec<C64> = (0..n)
            .map(|i| c(0.7 + 0.31 * ((i * 7 + j * 13) % 11) as f64, 0.21 * ((i + 2 * j) % 5) as f64))
            .collect();
        for _ in 0..3 {
            let next = solve(&shifted, &v)?;
            let nrm = next.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if nrm < 1e-300 {
                return None;
            }
            v = next.into_iter().map(|z| z / nrm).collect();
        }
        for i in 0..n {
            vecs[(i, j)] = v[i];
        }
    }
    Some((vals, vecs))
}
