//! Complex polynomials in one variable: evaluation, interpolation, and root
//! extraction through the companion matrix with Newton polishing.

use crate::error::{Error, Result};
use crate::linalg::{c, hessenberg_eigenvalues, CMat, C64, C_ONE, C_ZERO};

/// Coefficients ascending in the degree: p(z) = sum c_k z^k.
#[derive(Debug, Clone, PartialEq)]
pub struct CPoly {
    coeffs: Vec<C64>,
}

impl CPoly {
    pub fn new(coeffs: Vec<C64>) -> Self {
        let mut p = Self { coeffs };
        p.trim_exact_zeros();
        p
    }

    pub fn constant(v: C64) -> Self {
        Self::new(vec![v])
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![] }
    }

    fn trim_exact_zeros(&mut self) {
        while let Some(last) = self.coeffs.last() {
            if *last == C_ZERO {
                self.coeffs.pop();
            } else {
                break;
            }
        }
    }

    /// Drops high-order coefficients whose magnitude falls below `tol` relative
    /// to the largest coefficient. Interpolation noise lives there.
    pub fn trim_leading(&self, tol: f64) -> CPoly {
        let scale = self.coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mut coeffs = self.coeffs.clone();
        while let Some(last) = coeffs.last() {
            if last.norm() <= tol * scale.max(1.0) {
                coeffs.pop();
            } else {
                break;
            }
        }
        CPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Degree; the zero polynomial reports degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, z: C64) -> C64 {
        let mut acc = C_ZERO;
        for &ck in self.coeffs.iter().rev() {
            acc = acc * z + ck;
        }
        acc
    }

    pub fn derivative(&self) -> CPoly {
        if self.coeffs.len() <= 1 {
            return CPoly::zero();
        }
        CPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &ck)| ck * c(k as f64, 0.0))
                .collect(),
        )
    }

    pub fn mul(&self, rhs: &CPoly) -> CPoly {
        if self.is_zero() || rhs.is_zero() {
            return CPoly::zero();
        }
        let mut out = vec![C_ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        CPoly::new(out)
    }

    pub fn scale(&self, s: C64) -> CPoly {
        CPoly::new(self.coeffs.iter().map(|&ck| ck * s).collect())
    }

    pub fn from_roots(roots: &[C64]) -> CPoly {
        let mut coeffs = vec![C_ONE];
        for &r in roots {
            let mut next = vec![C_ZERO; coeffs.len() + 1];
            for (k, &ck) in coeffs.iter().enumerate() {
                next[k + 1] += ck;
                next[k] -= ck * r;
            }
            coeffs = next;
        }
        CPoly::new(coeffs)
    }

    /// All roots, via companion-matrix eigenvalues polished by two Newton steps.
    /// Degree 0 (or the zero polynomial) yields an empty multiset.
    pub fn roots(&self) -> Vec<C64> {
        let n = self.coeffs.len();
        if n <= 1 {
            return vec![];
        }
        if n == 2 {
            return vec![-self.coeffs[0] / self.coeffs[1]];
        }
        let deg = n - 1;
        let lead = self.coeffs[deg];
        let mut comp = CMat::zeros(deg, deg);
        for i in 1..deg {
            comp[(i, i - 1)] = C_ONE;
        }
        for i in 0..deg {
            comp[(i, deg - 1)] = -self.coeffs[i] / lead;
        }
        let mut roots = hessenberg_eigenvalues(comp);
        let dp = self.derivative();
        for r in roots.iter_mut() {
            for _ in 0..2 {
                let d = dp.eval(*r);
                if d.norm() > 1e-14 {
                    *r -= self.eval(*r) / d;
                }
            }
        }
        roots
    }
}

/// Newton-form interpolation through distinct nodes. Returns the unique
/// polynomial of degree < nodes.len() matching the samples.
pub fn interpolate(nodes: &[C64], values: &[C64]) -> Result<CPoly> {
    if nodes.len() != values.len() || nodes.is_empty() {
        return Err(Error::InvalidArgument(
            "interpolation needs matching, nonempty node/value lists".into(),
        ));
    }
    let n = nodes.len();
    for i in 0..n {
        for j in (i + 1)..n {
            if (nodes[i] - nodes[j]).norm() < 1e-12 {
                return Err(Error::InvalidArgument(format!(
                    "interpolation nodes {i} and {j} coincide"
                )));
            }
        }
    }
    // divided differences
    let mut dd = values.to_vec();
    for level in 1..n {
        for i in (level..n).rev() {
            dd[i] = (dd[i] - dd[i - 1]) / (nodes[i] - nodes[i - level]);
        }
    }
    // expand Newton form
    let mut poly = CPoly::zero();
    let mut basis = CPoly::constant(C_ONE);
    for (i, &coef) in dd.iter().enumerate() {
        let term = basis.scale(coef);
        let mut merged = vec![C_ZERO; poly.coeffs().len().max(term.coeffs().len())];
        for (k, &v) in poly.coeffs().iter().enumerate() {
            merged[k] += v;
        }
        for (k, &v) in term.coeffs().iter().enumerate() {
            merged[k] += v;
        }
        poly = CPoly::new(merged);
        if i + 1 < n {
            poly_mul_linear(&mut basis, nodes[i]);
        }
    }
    Ok(poly)
}

fn poly_mul_linear(p: &mut CPoly, root: C64) {
    let src = p.coeffs().to_vec();
    let mut out = vec![C_ZERO; src.len() + 1];
    for (k, &ck) in src.iter().enumerate() {
        out[k + 1] += ck;
        out[k] -= ck * root;
    }
    *p = CPoly::new(out);
}

/// Sampling nodes z_k = r e^{2 pi i k / count}, spread on a circle to keep the
/// interpolation well conditioned.
pub fn ring_nodes(count: usize, r: f64) -> Vec<C64> {
    (0..count)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * k as f64 / count as f64;
            c(r * th.cos(), r * th.sin())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_and_derivative() {
        let p = CPoly::new(vec![c(1.0, 0.0), c(-2.0, 0.0), c(3.0, 0.0)]); // 1 - 2z + 3z^2
        assert!((p.eval(c(2.0, 0.0)) - c(9.0, 0.0)).norm() < 1e-14);
        let dp = p.derivative();
        assert!((dp.eval(c(2.0, 0.0)) - c(10.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn constant_has_no_roots() {
        assert!(CPoly::constant(c(4.0, 1.0)).roots().is_empty());
    }

    #[test]
    fn linear_root() {
        // value at 0 equal to -0.3, monic degree 1: z - 0.3
        let p = CPoly::new(vec![c(-0.3, 0.0), C_ONE]);
        let r = p.roots();
        assert_eq!(r.len(), 1);
        assert!((r[0] - c(0.3, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn roots_roundtrip() {
        let roots = [c(0.3, 0.8), c(-1.2, 0.1), c(0.0, -0.7), c(2.0, 0.0), c(-0.4, -0.4)];
        let p = CPoly::from_roots(&roots);
        let mut found = p.roots();
        // re-expanding must reproduce the polynomial to relative accuracy
        let q = CPoly::from_roots(&found);
        let scale = p.coeffs().iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (a, b) in p.coeffs().iter().zip(q.coeffs().iter()) {
            assert!((a - b).norm() < 1e-9 * scale);
        }
        found.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        let mut expect = roots.to_vec();
        expect.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        for (f, e) in found.iter().zip(expect.iter()) {
            assert!((f - e).norm() < 1e-9);
        }
    }

    #[test]
    fn interpolation_recovers_polynomial() {
        let p = CPoly::new(vec![c(0.5, -1.0), c(0.0, 2.0), c(1.0, 0.0), c(-0.3, 0.3)]);
        let nodes = ring_nodes(6, 1.37);
        let values: Vec<C64> = nodes.iter().map(|&z| p.eval(z)).collect();
        let q = interpolate(&nodes, &values).unwrap().trim_leading(1e-10);
        assert_eq!(q.degree(), p.degree());
        for (a, b) in p.coeffs().iter().zip(q.coeffs().iter()) {
            assert!((a - b).norm() < 1e-10);
        }
    }
}
