//! gl(I)-module choices for the auxiliary space of a Lax operator, together
//! with their twisted (unnormalized) supertrace functionals.
//!
//! Supported modules: the singlet (all generators zero), the fundamental of
//! gl(I), explicit user tables in a weight basis, and highest-weight modules
//! for |I| <= 2. A same-parity pair carries the infinite single-chain module
//! (states |k>, k >= 0) and a mixed pair the two-dimensional one. The
//! distinguished vector satisfies E_AA |0> = -(-1)^p(A) lambda_A |0> and is
//! annihilated by the transposed raising generator; the boundary-twist
//! operator acts as exp(-i sum_A Phi_A E_AA). These conventions make the
//! super-Vandermonde factorization of X+ into shifted Q-operators come out
//! with the weight shifts lambda_A + rho_A exactly.

use crate::error::{Error, Result};
use crate::grading::{GradingSignature, TwistConfig};
use crate::linalg::{c, cis, CMat, C64, C_ONE, C_ZERO};
use crate::poly::CPoly;
use std::collections::BTreeMap;

/// Module choice on gl(I), as requested by callers.
#[derive(Debug, Clone)]
pub enum ModuleSpec {
    /// One-dimensional trivial module: every generator acts as zero.
    Singlet,
    /// Fundamental of gl(I): graded matrix units on C^{|I|}.
    Fundamental,
    /// Highest-weight module with weights lambda_A, one per member of I.
    Verma(Vec<f64>),
    /// Explicit generator tables in a weight basis (diagonal Cartan action).
    Explicit(ExplicitRep),
}

/// Explicit representation data: generators keyed by global (row, col) labels.
#[derive(Debug, Clone)]
pub struct ExplicitRep {
    pub dim: usize,
    /// parity of each basis vector
    pub parities: Vec<u8>,
    pub gens: BTreeMap<(usize, usize), CMat>,
}

impl ExplicitRep {
    /// Validates the superalgebra relations
    /// [E_AB, E_CD] = E_AD d_CB - (-1)^{(A+B)(C+D)} E_CB d_AD
    /// to the stated residual, plus diagonal Cartan generators.
    pub fn validate(&self, sig: GradingSignature, subset: &[usize]) -> Result<()> {
        let zero = CMat::zeros(self.dim, self.dim);
        let get = |a: usize, b: usize| self.gens.get(&(a, b)).unwrap_or(&zero);
        for &a in subset {
            let eaa = get(a, a);
            for i in 0..self.dim {
                for j in 0..self.dim {
                    if i != j && eaa[(i, j)].norm() > 1e-12 {
                        return Err(Error::InvalidArgument(
                            "explicit module must present Cartan generators diagonally".into(),
                        ));
                    }
                }
            }
        }
        for &a in subset {
            for &b in subset {
                for &cc in subset {
                    for &d in subset {
                        let pab = (sig.parity(a) ^ sig.parity(b)) as u32;
                        let pcd = (sig.parity(cc) ^ sig.parity(d)) as u32;
                        let sign = if pab & pcd == 1 { -1.0 } else { 1.0 };
                        let lhs = get(a, b)
                            .mul(get(cc, d))
                            .sub(&get(cc, d).mul(get(a, b)).scale(c(sign, 0.0)));
                        let mut rhs = CMat::zeros(self.dim, self.dim);
                        if cc == b {
                            rhs = rhs.add(get(a, d));
                        }
                        if a == d {
                            rhs = rhs.sub(&get(cc, b).scale(c(sign, 0.0)));
                        }
                        if lhs.sub(&rhs).max_abs() > 1e-12 {
                            return Err(Error::InvalidArgument(format!(
                                "explicit module violates the gl(I) relations at E_{}{} , E_{}{}",
                                a + 1,
                                b + 1,
                                cc + 1,
                                d + 1
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// The module factor of one auxiliary term.
#[derive(Debug, Clone)]
pub enum ModPart {
    /// scalar multiple of the module identity
    Scalar(C64),
    /// chain operator |k> -> kpoly(k) |k + shift> on the infinite tower
    Chain { shift: i64, kpoly: CPoly },
    /// finite-dimensional operator with definite parity
    Mat { parity: u8, m: CMat },
}

impl ModPart {
    pub fn one() -> Self {
        ModPart::Scalar(C_ONE)
    }

    pub fn parity(&self) -> u8 {
        match self {
            ModPart::Scalar(_) | ModPart::Chain { .. } => 0,
            ModPart::Mat { parity, .. } => *parity,
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        match self {
            ModPart::Scalar(v) => ModPart::Scalar(v * s),
            ModPart::Chain { shift, kpoly } => ModPart::Chain {
                shift: *shift,
                kpoly: kpoly.scale(s),
            },
            ModPart::Mat { parity, m } => ModPart::Mat {
                parity: *parity,
                m: m.scale(s),
            },
        }
    }

    pub fn max_coeff(&self) -> f64 {
        match self {
            ModPart::Scalar(v) => v.norm(),
            ModPart::Chain { kpoly, .. } => {
                kpoly.coeffs().iter().map(|z| z.norm()).fold(0.0, f64::max)
            }
            ModPart::Mat { m, .. } => m.max_abs(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.max_coeff() == 0.0
    }

    /// merge key: parts with equal keys may be added
    pub fn key(&self) -> (u8, i64) {
        match self {
            ModPart::Scalar(_) => (0, 0),
            ModPart::Chain { shift, .. } => (1, *shift),
            ModPart::Mat { parity, .. } => (2, *parity as i64),
        }
    }

    pub fn add(&self, rhs: &ModPart) -> Result<ModPart> {
        match (self, rhs) {
            (ModPart::Scalar(a), ModPart::Scalar(b)) => Ok(ModPart::Scalar(a + b)),
            (
                ModPart::Chain { shift: s1, kpoly: p1 },
                ModPart::Chain { shift: s2, kpoly: p2 },
            ) if s1 == s2 => {
                let n = p1.coeffs().len().max(p2.coeffs().len());
                let mut coeffs = vec![C_ZERO; n];
                for (k, &v) in p1.coeffs().iter().enumerate() {
                    coeffs[k] += v;
                }
                for (k, &v) in p2.coeffs().iter().enumerate() {
                    coeffs[k] += v;
                }
                Ok(ModPart::Chain {
                    shift: *s1,
                    kpoly: CPoly::new(coeffs),
                })
            }
            (ModPart::Mat { parity: p1, m: m1 }, ModPart::Mat { parity: p2, m: m2 })
                if p1 == p2 =>
            {
                Ok(ModPart::Mat {
                    parity: *p1,
                    m: m1.add(m2),
                })
            }
            _ => Err(Error::ConstructionBug(
                "attempted to add incompatible module parts".into(),
            )),
        }
    }

    pub fn mul(&self, rhs: &ModPart) -> Result<ModPart> {
        match (self, rhs) {
            (ModPart::Scalar(a), other) => Ok(other.scale(*a)),
            (other, ModPart::Scalar(b)) => Ok(other.scale(*b)),
            (
                ModPart::Chain { shift: s1, kpoly: p1 },
                ModPart::Chain { shift: s2, kpoly: p2 },
            ) => {
                // (self . rhs)|k> = p2(k) p1(k + s2) |k + s1 + s2>
                let shifted = shift_argument(p1, *s2 as f64);
                Ok(ModPart::Chain {
                    shift: s1 + s2,
                    kpoly: shifted.mul(p2),
                })
            }
            (ModPart::Mat { parity: p1, m: m1 }, ModPart::Mat { parity: p2, m: m2 }) => {
                Ok(ModPart::Mat {
                    parity: p1 ^ p2,
                    m: m1.mul(m2),
                })
            }
            _ => Err(Error::ConstructionBug(
                "attempted to multiply chain and finite module parts".into(),
            )),
        }
    }
}

/// P(k + a) by binomial expansion.
fn shift_argument(p: &CPoly, a: f64) -> CPoly {
    if a == 0.0 {
        return p.clone();
    }
    let n = p.coeffs().len();
    let mut out = vec![C_ZERO; n];
    for (j, &cj) in p.coeffs().iter().enumerate() {
        // cj (k + a)^j
        let mut binom = 1.0f64;
        let mut apow = 1.0f64;
        for i in (0..=j).rev() {
            // coefficient of k^i: C(j, i) a^{j-i}
            out[i] += cj * c(binom * apow, 0.0);
            if i > 0 {
                binom = binom * i as f64 / (j - i + 1) as f64;
                apow *= a;
            }
        }
    }
    CPoly::new(out)
}

/// The realized module: generator tables plus the twisted trace functional.
#[derive(Debug, Clone)]
pub enum RealizedModule {
    Trivial,
    /// infinite chain for a same-parity pair (a1, a2): E_{a1 a1} = alpha + k,
    /// E_{a2 a2} = beta - k, E_{a1 a2} raises, E_{a2 a1} lowers
    ChainPair {
        labels: (usize, usize),
        alpha: C64,
        beta: C64,
    },
    /// two-dimensional module for a mixed pair
    OddPair {
        labels: (usize, usize),
        w1: C64,
        w2: C64,
    },
    /// single label, one-dimensional with E_aa = w
    Single { label: usize, w: C64 },
    /// finite-dimensional tables (fundamental or explicit)
    Finite {
        labels: Vec<usize>,
        dim: usize,
        parities: Vec<u8>,
        gens: BTreeMap<(usize, usize), CMat>,
    },
}

impl RealizedModule {
    pub fn realize(sig: GradingSignature, subset: &[usize], spec: &ModuleSpec) -> Result<Self> {
        match spec {
            ModuleSpec::Singlet => Ok(RealizedModule::Trivial),
            ModuleSpec::Fundamental => {
                let dim = subset.len();
                let mut gens = BTreeMap::new();
                for (i, &a) in subset.iter().enumerate() {
                    for (j, &b) in subset.iter().enumerate() {
                        let mut m = CMat::zeros(dim, dim);
                        m[(i, j)] = C_ONE;
                        gens.insert((a, b), m);
                    }
                }
                Ok(RealizedModule::Finite {
                    labels: subset.to_vec(),
                    dim,
                    parities: subset.iter().map(|&a| sig.parity(a)).collect(),
                    gens,
                })
            }
            ModuleSpec::Verma(lambda) => {
                if lambda.len() != subset.len() {
                    return Err(Error::InvalidArgument(
                        "weight count must match the subset size".into(),
                    ));
                }
                match subset.len() {
                    0 => Ok(RealizedModule::Trivial),
                    1 => {
                        let a = subset[0];
                        let w = c(-sig.sign(a) * lambda[0], 0.0);
                        Ok(RealizedModule::Single { label: a, w })
                    }
                    2 => {
                        let (a1, a2) = (subset[0], subset[1]);
                        if sig.parity(a1) == sig.parity(a2) {
                            let s = sig.sign(a1);
                            Ok(RealizedModule::ChainPair {
                                labels: (a1, a2),
                                alpha: c(-s * lambda[0], 0.0),
                                beta: c(-s * lambda[1], 0.0),
                            })
                        } else {
                            Ok(RealizedModule::OddPair {
                                labels: (a1, a2),
                                w1: c(-sig.sign(a1) * lambda[0], 0.0),
                                w2: c(-sig.sign(a2) * lambda[1], 0.0),
                            })
                        }
                    }
                    _ => Err(Error::Unsupported(
                        "highest-weight modules implemented for |I| <= 2".into(),
                    )),
                }
            }
            ModuleSpec::Explicit(rep) => {
                rep.validate(sig, subset)?;
                Ok(RealizedModule::Finite {
                    labels: subset.to_vec(),
                    dim: rep.dim,
                    parities: rep.parities.clone(),
                    gens: rep.gens.clone(),
                })
            }
        }
    }

    /// Generator E_{ab} as a module part; None when it acts as zero.
    pub fn generator(&self, a: usize, b: usize) -> Option<ModPart> {
        match self {
            RealizedModule::Trivial => None,
            RealizedModule::Single { label, w } => {
                if a == *label && b == *label && w.norm() > 0.0 {
                    Some(ModPart::Scalar(*w))
                } else {
                    None
                }
            }
            RealizedModule::ChainPair {
                labels: (a1, a2),
                alpha,
                beta,
            } => {
                let part = if a == *a1 && b == *a1 {
                    ModPart::Chain {
                        shift: 0,
                        kpoly: CPoly::new(vec![*alpha, C_ONE]),
                    }
                } else if a == *a2 && b == *a2 {
                    ModPart::Chain {
                        shift: 0,
                        kpoly: CPoly::new(vec![*beta, -C_ONE]),
                    }
                } else if a == *a1 && b == *a2 {
                    ModPart::Chain {
                        shift: 1,
                        kpoly: CPoly::constant(C_ONE),
                    }
                } else if a == *a2 && b == *a1 {
                    // E_{a2 a1} |k> = k (beta - alpha - k + 1) |k-1>
                    let d = beta - alpha;
                    ModPart::Chain {
                        shift: -1,
                        kpoly: CPoly::new(vec![C_ZERO, d + C_ONE, -C_ONE]),
                    }
                } else {
                    return None;
                };
                Some(part)
            }
            RealizedModule::OddPair {
                labels: (a1, a2),
                w1,
                w2,
            } => {
                let mk = |parity: u8, entries: [[C64; 2]; 2]| ModPart::Mat {
                    parity,
                    m: CMat::from_fn(2, 2, |i, j| entries[i][j]),
                };
                let part = if a == *a1 && b == *a1 {
                    mk(0, [[*w1, C_ZERO], [C_ZERO, *w1 + C_ONE]])
                } else if a == *a2 && b == *a2 {
                    mk(0, [[*w2, C_ZERO], [C_ZERO, *w2 - C_ONE]])
                } else if a == *a1 && b == *a2 {
                    mk(1, [[C_ZERO, C_ZERO], [C_ONE, C_ZERO]])
                } else if a == *a2 && b == *a1 {
                    mk(1, [[C_ZERO, *w1 + *w2], [C_ZERO, C_ZERO]])
                } else {
                    return None;
                };
                Some(part)
            }
            RealizedModule::Finite { labels, gens, .. } => {
                if !labels.contains(&a) || !labels.contains(&b) {
                    return None;
                }
                let m = gens.get(&(a, b))?;
                if m.max_abs() == 0.0 {
                    return None;
                }
                let parity = 0; // set below from labels when used in Lax entries
                let _ = parity;
                Some(ModPart::Mat {
                    parity: 0,
                    m: m.clone(),
                })
            }
        }
    }

    /// Unnormalized twisted supertrace of one module part, with the boundary
    /// operator exp(-i sum_{A in I} Phi_A E_AA) inserted.
    pub fn trace(&self, part: &ModPart, twists: &TwistConfig) -> Result<C64> {
        match self {
            RealizedModule::Trivial => match part {
                ModPart::Scalar(v) => Ok(*v),
                _ => Err(Error::ConstructionBug(
                    "nonscalar module part in the trivial module".into(),
                )),
            },
            RealizedModule::Single { label, w } => match part {
                ModPart::Scalar(v) => Ok(v * (-c(0.0, twists.angle(*label)) * w).exp()),
                _ => Err(Error::ConstructionBug(
                    "nonscalar module part in a one-dimensional module".into(),
                )),
            },
            RealizedModule::ChainPair {
                labels: (a1, a2),
                alpha,
                beta,
            } => {
                let q = cis(-(twists.angle(*a1) - twists.angle(*a2)));
                if (q - C_ONE).norm() < 1e-9 {
                    return Err(Error::SingularTwist {
                        a: *a1 + 1,
                        b: *a2 + 1,
                        gap: (q - C_ONE).norm(),
                    });
                }
                let prefactor = (-c(0.0, 1.0)
                    * (c(twists.angle(*a1), 0.0) * alpha + c(twists.angle(*a2), 0.0) * beta))
                    .exp();
                let poly = match part {
                    ModPart::Scalar(v) => CPoly::constant(*v),
                    ModPart::Chain { shift, kpoly } => {
                        if *shift != 0 {
                            return Ok(C_ZERO);
                        }
                        kpoly.clone()
                    }
                    ModPart::Mat { .. } => {
                        return Err(Error::ConstructionBug(
                            "finite part in a chain module".into(),
                        ))
                    }
                };
                Ok(prefactor * crate::trace::chain_sum(q, &poly)?)
            }
            RealizedModule::OddPair {
                labels: (a1, a2),
                w1,
                w2,
            } => {
                let (p1, p2) = (twists.angle(*a1), twists.angle(*a2));
                let d0 = (-c(0.0, 1.0) * (c(p1, 0.0) * w1 + c(p2, 0.0) * w2)).exp();
                let d1 = (-c(0.0, 1.0)
                    * (c(p1, 0.0) * (w1 + C_ONE) + c(p2, 0.0) * (w2 - C_ONE)))
                    .exp();
                let m = match part {
                    ModPart::Scalar(v) => CMat::identity(2).scale(*v),
                    ModPart::Mat { m, .. } => m.clone(),
                    ModPart::Chain { .. } => {
                        return Err(Error::ConstructionBug(
                            "chain part in a two-dimensional module".into(),
                        ))
                    }
                };
                // top state even, descendant odd
                Ok(d0 * m[(0, 0)] - d1 * m[(1, 1)])
            }
            RealizedModule::Finite {
                labels,
                dim,
                parities,
                gens,
            } => {
                // weight of basis vector k: sum_a Phi_a (E_aa)_kk
                let m = match part {
                    ModPart::Scalar(v) => CMat::identity(*dim).scale(*v),
                    ModPart::Mat { m, .. } => m.clone(),
                    ModPart::Chain { .. } => {
                        return Err(Error::ConstructionBug(
                            "chain part in a finite module".into(),
                        ))
                    }
                };
                let zero = CMat::zeros(*dim, *dim);
                let mut acc = C_ZERO;
                for k in 0..*dim {
                    let mut weight = C_ZERO;
                    for &a in labels {
                        let eaa = gens.get(&(a, a)).unwrap_or(&zero);
                        weight += c(twists.angle(a), 0.0) * eaa[(k, k)];
                    }
                    let sign = if parities[k] == 1 { -1.0 } else { 1.0 };
                    acc += c(sign, 0.0) * (-c(0.0, 1.0) * weight).exp() * m[(k, k)];
                }
                Ok(acc)
            }
        }
    }

    /// Parity to assign to E_{ab} parts in finite modules: p(a) + p(b).
    pub fn generator_with_parity(
        &self,
        sig: GradingSignature,
        a: usize,
        b: usize,
    ) -> Option<ModPart> {
        let part = self.generator(a, b)?;
        match part {
            ModPart::Mat { m, .. } => Some(ModPart::Mat {
                parity: sig.parity(a) ^ sig.parity(b),
                m,
            }),
            other => Some(other),
        }
    }
}

/// Twisted trace of one module part over the rank-<= 2 highest-weight module
/// with the given weights: chain sums evaluate in closed rational form, the
/// two-dimensional mixed-pair module exactly.
pub fn verma_chain_trace(
    sig: GradingSignature,
    subset: &[usize],
    lambda: &[f64],
    twists: &TwistConfig,
    part: &ModPart,
) -> Result<C64> {
    let module = RealizedModule::realize(sig, subset, &ModuleSpec::Verma(lambda.to_vec()))?;
    module.trace(part, twists)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_pair_relations() {
        // [E12, E21] = E11 - E22 on the chain realization
        let sig = GradingSignature::new(2, 0).unwrap();
        let md = RealizedModule::realize(sig, &[0, 1], &ModuleSpec::Verma(vec![0.4, -1.1])).unwrap();
        let e12 = md.generator(0, 1).unwrap();
        let e21 = md.generator(1, 0).unwrap();
        let e11 = md.generator(0, 0).unwrap();
        let e22 = md.generator(1, 1).unwrap();
        let lhs = e12.mul(&e21).unwrap().add(&e21.mul(&e12).unwrap().scale(-C_ONE));
        let rhs = e11.add(&e22.scale(-C_ONE)).unwrap();
        // compare as chain parts with shift 0
        match (lhs, rhs) {
            (Ok(ModPart::Chain { shift: 0, kpoly: a }), ModPart::Chain { shift: 0, kpoly: b }) => {
                let diff: f64 = a
                    .coeffs()
                    .iter()
                    .zip(b.coeffs().iter().chain(std::iter::repeat(&C_ZERO)))
                    .map(|(x, y)| (x - y).norm())
                    .fold(0.0, f64::max);
                assert!(diff < 1e-13);
            }
            other => panic!("unexpected shapes {other:?}"),
        }
    }

    #[test]
    fn odd_pair_anticommutator_is_central() {
        let sig = GradingSignature::new(1, 1).unwrap();
        let md = RealizedModule::realize(sig, &[0, 1], &ModuleSpec::Verma(vec![0.7, 0.2])).unwrap();
        let e12 = md.generator(0, 1).unwrap();
        let e21 = md.generator(1, 0).unwrap();
        let anti = e12
            .mul(&e21)
            .unwrap()
            .add(&e21.mul(&e12).unwrap())
            .unwrap();
        let e11 = md.generator(0, 0).unwrap();
        let e22 = md.generator(1, 1).unwrap();
        let central = e11.add(&e22).unwrap();
        match (anti, central) {
            (ModPart::Mat { m: a, .. }, ModPart::Mat { m: b, .. }) => {
                assert!(a.sub(&b).max_abs() < 1e-13);
            }
            other => panic!("unexpected shapes {other:?}"),
        }
    }

    #[test]
    fn fundamental_satisfies_relations_via_validator() {
        let sig = GradingSignature::new(1, 1).unwrap();
        let md = RealizedModule::realize(sig, &[0, 1], &ModuleSpec::Fundamental).unwrap();
        if let RealizedModule::Finite {
            dim,
            parities,
            gens,
            ..
        } = md
        {
            let rep = ExplicitRep {
                dim,
                parities,
                gens,
            };
            rep.validate(sig, &[0, 1]).unwrap();
        } else {
            panic!("fundamental should realize as a finite module");
        }
    }

    #[test]
    fn broken_explicit_rep_rejected() {
        let sig = GradingSignature::new(2, 0).unwrap();
        let mut gens = BTreeMap::new();
        gens.insert((0, 1), CMat::from_fn(2, 2, |i, j| if (i, j) == (0, 1) { c(2.0, 0.0) } else { C_ZERO }));
        gens.insert((1, 0), CMat::from_fn(2, 2, |i, j| if (i, j) == (1, 0) { C_ONE } else { C_ZERO }));
        gens.insert((0, 0), CMat::from_fn(2, 2, |i, j| if (i, j) == (0, 0) { C_ONE } else { C_ZERO }));
        gens.insert((1, 1), CMat::from_fn(2, 2, |i, j| if (i, j) == (1, 1) { C_ONE } else { C_ZERO }));
        let rep = ExplicitRep {
            dim: 2,
            parities: vec![0, 0],
            gens,
        };
        assert!(rep.validate(sig, &[0, 1]).is_err());
    }

    #[test]
    fn chain_trace_geometric() {
        // unnormalized chain trace of the identity at zero weights: the plain
        // geometric series, against the damped-sum oracle
        let sig = GradingSignature::new(2, 0).unwrap();
        let tw = TwistConfig::new(vec![0.0, 1.7]);
        let t = verma_chain_trace(sig, &[0, 1], &[0.0, 0.0], &tw, &ModPart::one()).unwrap();
        let q = cis(1.7);
        assert!((t - C_ONE / (C_ONE - q)).norm() < 1e-12);
        let oracle =
            crate::trace::damped_chain_sum(q, &CPoly::constant(C_ONE), 4000, 0.05).unwrap();
        assert!((t - oracle).norm() < 1e-7);
    }

    #[test]
    fn chain_trace_counting_weight() {
        // part |k> -> k |k>: differentiated geometric series q/(1-q)^2
        let sig = GradingSignature::new(2, 0).unwrap();
        let tw = TwistConfig::new(vec![0.0, 1.7]);
        let part = ModPart::Chain {
            shift: 0,
            kpoly: CPoly::new(vec![C_ZERO, C_ONE]),
        };
        let t = verma_chain_trace(sig, &[0, 1], &[0.0, 0.0], &tw, &part).unwrap();
        let q = cis(1.7);
        assert!((t - q / ((C_ONE - q) * (C_ONE - q))).norm() < 1e-12);
        let oracle = crate::trace::damped_chain_sum(
            q,
            &CPoly::new(vec![C_ZERO, C_ONE]),
            4000,
            0.05,
        )
        .unwrap();
        assert!((t - oracle).norm() < 1e-6);
    }

    #[test]
    fn mixed_pair_identity_supertrace_vanishes_untwisted() {
        // the two-dimensional module has one even and one odd state, so the
        // plain supertrace of the identity is zero
        let sig = GradingSignature::new(1, 1).unwrap();
        let tw = TwistConfig::zero(sig);
        let t = verma_chain_trace(sig, &[0, 1], &[0.5, 0.5], &tw, &ModPart::one()).unwrap();
        assert!(t.norm() < 1e-15);
    }

    #[test]
    fn chain_trace_needs_nontrivial_twist() {
        let sig = GradingSignature::new(2, 0).unwrap();
        let tw = TwistConfig::zero(sig);
        assert!(matches!(
            verma_chain_trace(sig, &[0, 1], &[0.0, 0.0], &tw, &ModPart::one()),
            Err(Error::SingularTwist { .. })
        ));
    }
}
