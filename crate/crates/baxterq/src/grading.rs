//! Grading data for the Z2-graded vector space C^(n|m) and the boundary twist angles.
//!
//! Basis labels are 0-based internally: labels `0..n` are bosonic (parity 0),
//! labels `n..n+m` fermionic (parity 1). All user-facing output converts to the
//! 1-based convention.

use crate::error::{Error, Result};

pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// The pair (n|m) fixing the graded vector space C^(n|m).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GradingSignature {
    n: usize,
    m: usize,
}

impl GradingSignature {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if n + m == 0 {
            return Err(Error::InvalidArgument(
                "signature needs at least one basis label".into(),
            ));
        }
        Ok(Self { n, m })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Dimension n + m of the local space.
    pub fn dim(&self) -> usize {
        self.n + self.m
    }

    /// Parity p(a) of a 0-based label: 0 bosonic, 1 fermionic.
    pub fn parity(&self, label: usize) -> u8 {
        debug_assert!(label < self.dim());
        (label >= self.n) as u8
    }

    /// (-1)^p(a) as a float.
    pub fn sign(&self, label: usize) -> f64 {
        if self.parity(label) == 1 {
            -1.0
        } else {
            1.0
        }
    }

    pub fn labels(&self) -> std::ops::Range<usize> {
        0..self.dim()
    }
}

impl std::fmt::Display for GradingSignature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "gl({}|{})", self.n, self.m)
    }
}

/// Twist angles Phi_a (radians), one per basis label.
#[derive(Debug, Clone, PartialEq)]
pub struct TwistConfig {
    phi: Vec<f64>,
}

impl TwistConfig {
    pub fn new(phi: Vec<f64>) -> Self {
        Self { phi }
    }

    /// Default generic twists: Phi_A = A * golden ratio * 2 pi / (n+m+1), reduced
    /// mod 2 pi, with A the 1-based label. Pairwise differences stay away from
    /// multiples of 2 pi for every signature used here.
    pub fn generic(sig: GradingSignature) -> Self {
        let golden = 0.5 * (1.0 + 5.0_f64.sqrt());
        let d = sig.dim();
        let phi = (0..d)
            .map(|a| {
                let raw = (a as f64 + 1.0) * golden * TWO_PI / (d as f64 + 1.0);
                raw.rem_euclid(TWO_PI)
            })
            .collect();
        Self { phi }
    }

    pub fn zero(sig: GradingSignature) -> Self {
        Self {
            phi: vec![0.0; sig.dim()],
        }
    }

    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }

    pub fn angle(&self, label: usize) -> f64 {
        self.phi[label]
    }

    pub fn angles(&self) -> &[f64] {
        &self.phi
    }

    /// Same angles scaled by `factor` (used when continuing towards zero twist).
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            phi: self.phi.iter().map(|p| p * factor).collect(),
        }
    }

    /// Rejects any pair of labels whose angle difference vanishes mod 2 pi.
    /// Error reports 1-based labels.
    pub fn require_pairwise_generic(&self) -> Result<()> {
        for a in 0..self.phi.len() {
            for b in (a + 1)..self.phi.len() {
                let gap = ((self.phi[a] - self.phi[b]).rem_euclid(TWO_PI)).min(
                    (self.phi[b] - self.phi[a]).rem_euclid(TWO_PI),
                );
                // distance of e^{i dPhi} from 1
                let chord = 2.0 * (gap / 2.0).sin().abs();
                if chord < 1e-9 {
                    return Err(Error::SingularTwist {
                        a: a + 1,
                        b: b + 1,
                        gap: chord,
                    });
                }
            }
        }
        Ok(())
    }
}
