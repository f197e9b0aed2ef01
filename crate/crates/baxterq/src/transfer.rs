//! Transfer operators on the quantum space: monodromies over the auxiliary
//! algebra, twist-weighted supertraces, and the polynomial structure in the
//! spectral parameter.
//!
//! Every operator X_I(z) is built as
//!   e^{i z sum_{A in I} (-1)^p(A) Phi_A}
//!     Str_module StrHat_osc { D_I  L_I(z) (x) ... (x) L_I(z) },
//! the normalized oscillator supertrace carrying weights
//! q = e^{-i (Phi_A - Phi_Bdot)} per family and the module trace left
//! unnormalized. The singlet module gives the Q-operators, finite-dimensional
//! modules on the full label set the T-operators, and highest-weight modules
//! the X+ family.

use crate::aux::OpMatrix;
use crate::error::{Error, Result};
use crate::grading::{GradingSignature, TwistConfig};
use crate::lax::{lax_canonical, lax_full, Subset};
use crate::linalg::{c, C64};
use crate::module::ModuleSpec;
use crate::poly;
use crate::quantum::QuantumMatrix;
use crate::trace::TraceWeights;

/// Which transfer family an operator belongs to.
#[derive(Debug, Clone, PartialEq)]
pub enum TransferKind {
    Q,
    T(ModuleDescriptor),
    XPlus(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModuleDescriptor {
    Singlet,
    Fundamental,
    Explicit,
}

/// An explicit transfer operator at fixed spectral value.
#[derive(Debug, Clone)]
pub struct TransferOperator {
    pub sig: GradingSignature,
    pub subset: Subset,
    pub kind: TransferKind,
    pub chain_len: usize,
    pub twists: TwistConfig,
    pub z: C64,
    pub matrix: QuantumMatrix,
    pub prefactor_applied: bool,
}

impl TransferOperator {
    /// e^{i z sum_{A in I} (-1)^p(A) Phi_A}
    pub fn prefactor(sig: GradingSignature, subset: &Subset, twists: &TwistConfig, z: C64) -> C64 {
        let phase: f64 = subset
            .labels()
            .iter()
            .map(|&a| sig.sign(a) * twists.angle(a))
            .sum();
        (c(0.0, 1.0) * z * c(phase, 0.0)).exp()
    }

    /// The same operator with the exponential prefactor divided out, leaving
    /// the part polynomial in z.
    pub fn without_prefactor(&self) -> TransferOperator {
        if !self.prefactor_applied {
            return self.clone();
        }
        let pf = Self::prefactor(self.sig, &self.subset, &self.twists, self.z);
        let mut out = self.clone();
        out.matrix = self.matrix.scale(c(1.0, 0.0) / pf);
        out.prefactor_applied = false;
        out
    }

    fn same_family(&self, other: &TransferOperator) -> bool {
        self.sig == other.sig
            && self.subset == other.subset
            && self.kind == other.kind
            && self.chain_len == other.chain_len
            && self.twists == other.twists
    }
}

/// Monodromy: the L-fold graded tensor product of the canonical Lax operator,
/// all factors sharing one auxiliary space.
pub fn monodromy(
    sig: GradingSignature,
    subset: &Subset,
    module: &ModuleSpec,
    chain_len: usize,
    z: C64,
) -> Result<OpMatrix> {
    if chain_len < 1 {
        return Err(Error::InvalidArgument("chain length must be positive".into()));
    }
    let lax = lax_canonical(sig, subset, module, z)?;
    let mut m = lax.matrix.clone();
    for _ in 1..chain_len {
        m = m.kron(&lax.matrix)?;
    }
    Ok(m)
}

fn traced_transfer(
    sig: GradingSignature,
    subset: &Subset,
    module: &ModuleSpec,
    kind: TransferKind,
    chain_len: usize,
    twists: &TwistConfig,
    z: C64,
) -> Result<TransferOperator> {
    if twists.len() != sig.dim() {
        return Err(Error::InvalidArgument(
            "twist list length must equal n + m".into(),
        ));
    }
    let m = monodromy(sig, subset, module, chain_len, z)?;
    let weights = TraceWeights::for_families(&m.alg.fams, twists)?;
    let traced = m.trace_auxiliary(&weights, twists)?;
    let pf = TransferOperator::prefactor(sig, subset, twists, z);
    Ok(TransferOperator {
        sig,
        subset: subset.clone(),
        kind,
        chain_len,
        twists: twists.clone(),
        z,
        matrix: traced.scale(pf),
        prefactor_applied: true,
    })
}

/// Q_I(z): the transfer operator with the trivial gl(I) module, traced over
/// the twisted oscillator Fock spaces.
pub fn q_operator(
    sig: GradingSignature,
    subset: &Subset,
    chain_len: usize,
    twists: &TwistConfig,
    z: C64,
) -> Result<TransferOperator> {
    traced_transfer(
        sig,
        subset,
        &ModuleSpec::Singlet,
        TransferKind::Q,
        chain_len,
        twists,
        z,
    )
}

/// T(z): the full-set transfer operator over a finite-dimensional module.
pub fn t_operator(
    sig: GradingSignature,
    module: &ModuleSpec,
    chain_len: usize,
    twists: &TwistConfig,
    z: C64,
) -> Result<TransferOperator> {
    let descriptor = match module {
        ModuleSpec::Singlet => ModuleDescriptor::Singlet,
        ModuleSpec::Fundamental => ModuleDescriptor::Fundamental,
        ModuleSpec::Explicit(_) => ModuleDescriptor::Explicit,
        ModuleSpec::Verma(_) => {
            return Err(Error::InvalidArgument(
                "T-operators take finite-dimensional modules".into(),
            ))
        }
    };
    let _ = lax_full(sig, module, z)?; // validates the module choice
    traced_transfer(
        sig,
        &Subset::full(sig),
        module,
        TransferKind::T(descriptor),
        chain_len,
        twists,
        z,
    )
}

/// X+_I(z, Lambda): the transfer operator over the highest-weight gl(I)
/// module with weights Lambda (|I| <= 2).
pub fn x_plus_operator(
    sig: GradingSignature,
    subset: &Subset,
    lambda: &[f64],
    chain_len: usize,
    twists: &TwistConfig,
    z: C64,
) -> Result<TransferOperator> {
    if subset.len() > 2 {
        return Err(Error::Unsupported(
            "X+ operators are built for |I| <= 2".into(),
        ));
    }
    traced_transfer(
        sig,
        subset,
        &ModuleSpec::Verma(lambda.to_vec()),
        TransferKind::XPlus(lambda.to_vec()),
        chain_len,
        twists,
        z,
    )
}

/// Matrix-valued polynomial on the quantum space.
#[derive(Debug, Clone)]
pub struct MatrixPolynomial {
    pub coeffs: Vec<QuantumMatrix>,
}

impl MatrixPolynomial {
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, z: C64) -> QuantumMatrix {
        let sig = self.coeffs[0].space.sig;
        let sites = self.coeffs[0].space.sites;
        let mut acc = QuantumMatrix::zeros(sig, sites);
        for ck in self.coeffs.iter().rev() {
            acc = acc.scale(z).add(ck);
        }
        acc
    }
}

/// Default spectral sampling nodes: chain_len + 3 points on the circle of
/// radius 1.37 (chain_len + 2 interpolation nodes plus a degree-check node).
pub fn sampling_nodes(chain_len: usize) -> Vec<C64> {
    poly::ring_nodes(chain_len + 3, 1.37)
}

/// Entrywise polynomial interpolation of a family of transfer operators
/// sampled at distinct spectral values (prefactors divided out). Uses the
/// first chain_len + 1 samples and validates the remaining ones against the
/// interpolant; a mismatch signals that the operator family is not polynomial
/// of degree <= L, i.e. a construction defect.
pub fn interpolate_polynomial(samples: &[TransferOperator]) -> Result<MatrixPolynomial> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("no samples".into()));
    }
    let l = samples[0].chain_len;
    if samples.len() < l + 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least {} samples for chain length {l}",
            l + 2
        )));
    }
    for s in samples.iter().skip(1) {
        if !samples[0].same_family(s) {
            return Err(Error::InvalidArgument(
                "samples must share signature, subset, module, length, twists".into(),
            ));
        }
    }
    let stripped: Vec<TransferOperator> = samples.iter().map(|s| s.without_prefactor()).collect();
    let nodes: Vec<C64> = stripped.iter().take(l + 1).map(|s| s.z).collect();
    let dim = stripped[0].matrix.dim();
    let sig = stripped[0].sig;
    let sites = stripped[0].chain_len;

    let mut coeffs = vec![QuantumMatrix::zeros(sig, sites); l + 1];
    for r in 0..dim {
        for cidx in 0..dim {
            let values: Vec<C64> = stripped
                .iter()
                .take(l + 1)
                .map(|s| s.matrix.mat[(r, cidx)])
                .collect();
            let p = poly::interpolate(&nodes, &values)?;
            for (k, &v) in p.coeffs().iter().enumerate() {
                coeffs[k].mat[(r, cidx)] = v;
            }
        }
    }
    let mp = MatrixPolynomial { coeffs };

    // degree <= L: every extra sample must match the interpolant
    let scale = stripped
        .iter()
        .map(|s| s.matrix.mat.max_abs())
        .fold(1.0, f64::max);
    for s in stripped.iter().skip(l + 1) {
        let res = mp.eval(s.z).sub(&s.matrix).mat.max_abs();
        if res > 1e-9 * scale {
            return Err(Error::ConstructionBug(format!(
                "transfer operator fails the degree bound: extra-node residual {res:.3e}"
            )));
        }
    }
    Ok(mp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::build_hamiltonian;
    use crate::linalg::{cis, C_ONE};
    use crate::quantum::global_generator;

    fn all_subsets(sig: GradingSignature) -> Vec<Subset> {
        (0..(1u32 << sig.dim()))
            .map(|m| Subset::from_mask(sig, m))
            .collect()
    }

    #[test]
    fn empty_set_q_is_identity() {
        let sig = GradingSignature::new(2, 1).unwrap();
        let tw = TwistConfig::generic(sig);
        let q = q_operator(sig, &Subset::empty(), 3, &tw, c(0.71, -0.42)).unwrap();
        let id = QuantumMatrix::identity(sig, 3);
        assert!(q.matrix.sub(&id).mat.max_abs() < 1e-14);
    }

    #[test]
    fn full_set_q_is_prefactor_times_z_pow_l() {
        let sig = GradingSignature::new(1, 1).unwrap();
        let tw = TwistConfig::generic(sig);
        let z = c(0.83, 0.4);
        let l = 3;
        let q = q_operator(sig, &Subset::full(sig), l, &tw, z).unwrap();
        let phase: f64 = sig
            .labels()
            .map(|a| sig.sign(a) * tw.angle(a))
            .sum();
        let want = QuantumMatrix::identity(sig, l)
            .scale((c(0.0, 1.0) * z * c(phase, 0.0)).exp() * z.powu(l as u32));
        assert!(q.matrix.sub(&want).mat.max_abs() < 1e-12);
    }

    #[test]
    fn monodromy_at_length_one_is_the_lax() {
        let sig = GradingSignature::new(1, 1).unwrap();
        let subset = Subset::new(sig, &[0]).unwrap();
        let z = c(0.3, 0.5);
        let m = monodromy(sig, &subset, &ModuleSpec::Singlet, 1, z).unwrap();
        let lax = lax_canonical(sig, &subset, &ModuleSpec::Singlet, z).unwrap();
        assert!(m.sub(&lax.matrix).max_coeff() < 1e-15);
    }

    #[test]
    fn full_set_monodromy_is_diagonal_power() {
        // no oscillators for the full set with the singlet module: the
        // monodromy is z^L times the identity on the quantum space
        let sig = GradingSignature::new(1, 1).unwrap();
        let z = c(0.83, -0.36);
        let m = monodromy(sig, &Subset::full(sig), &ModuleSpec::Singlet, 3, z).unwrap();
        for s in 0..m.dim() {
            for t in 0..m.dim() {
                let e = m.at(s, t);
                if s == t {
                    match &e.terms()[0].md {
                        crate::module::ModPart::Scalar(v) => {
                            assert!((v - z.powu(3)).norm() < 1e-14)
                        }
                        other => panic!("unexpected {other:?}"),
                    }
                } else {
                    assert!(e.is_zero());
                }
            }
        }
    }

    #[test]
    fn interpolation_rejects_mixed_families() {
        let sig = GradingSignature::new(1, 1).unwrap();
        let tw = TwistConfig::generic(sig);
        let nodes = sampling_nodes(2);
        let mut samples: Vec<TransferOperator> = nodes
            .iter()
            .map(|&z| q_operator(sig, &Subset::full(sig), 2, &tw, z).unwrap())
            .collect();
        samples[1] = q_operator(sig, &Subset::empty(), 2, &tw, nodes[1]).unwrap();
        assert!(matches!(
            interpolate_polynomial(&samples),
            Err(crate::error::Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn monodromy_oscillator_degree_bounded_by_length() {
        let sig = GradingSignature::new(2, 1).unwrap();
        let subset = Subset::new(sig, &[0, 2]).unwrap();
        for l in 1..=3 {
            let m = monodromy(sig, &subset, &ModuleSpec::Singlet, l, c(0.4, 0.1)).unwrap();
            let mut max_deg = 0;
            for s in 0..m.dim() {
                for t in 0..m.dim() {
                    for term in m.at(s, t).terms() {
                        for &(_, r, smp) in term.osc.exps() {
                            max_deg = max_deg.max(r.max(smp));
                        }
                    }
                }
            }
            assert!(max_deg as usize <= l, "degree {max_deg} exceeds L={l}");
        }
    }

    #[test]
    fn q_commutes_with_hamiltonian_gl11() {
        let sig = GradingSignature::new(1, 1).unwrap();
        let tw = TwistConfig::generic(sig);
        let h = build_hamiltonian(sig, 2, &tw).unwrap();
        for subset in all_subsets(sig) {
            let q = q_operator(sig, &subset, 2, &tw, c(0.9, 0.33)).unwrap();
            let res = q.matrix.mat.commutator_max(&h.mat);
            assert!(
                res < 1e-11,
                "[Q_{}, H] = {res:.3e}",
                subset.display()
            );
        }
    }

    #[test]
    fn q_family_is_commuting() {
        let sig = GradingSignature::new(2, 1).unwrap();
        let tw = TwistConfig::generic(sig);
        let l = 2;
        let ops: Vec<TransferOperator> = all_subsets(sig)
            .iter()
            .map(|s| q_operator(sig, s, l, &tw, c(0.47, 0.19)).unwrap())
            .collect();
        let ops2: Vec<TransferOperator> = all_subsets(sig)
            .iter()
            .map(|s| q_operator(sig, s, l, &tw, c(-0.83, 0.64)).unwrap())
            .collect();
        for a in &ops {
            for b in &ops2 {
                let res = a.matrix.mat.commutator_max(&b.matrix.mat);
                assert!(
                    res < 1e-10,
                    "[Q_{}, Q_{}] = {res:.3e}",
                    a.subset.display(),
                    b.subset.display()
                );
            }
        }
    }

    #[test]
    fn transfer_operators_are_sector_blocked_and_even() {
        let sig = GradingSignature::new(2, 1).unwrap();
        let tw = TwistConfig::generic(sig);
        for subset in all_subsets(sig) {
            let q = q_operator(sig, &subset, 2, &tw, c(0.3, 0.7)).unwrap();
            assert!(q.matrix.off_sector_max() < 1e-12);
            assert!(q.matrix.odd_entry_max() < 1e-13);
        }
    }

    #[test]
    fn singlet_t_closed_form_gl11() {
        let sig = GradingSignature::new(1, 1).unwrap();
        let tw = TwistConfig::generic(sig);
        let z = c(1.21, -0.37);
        for l in 1..=3 {
            let t = t_operator(sig, &ModuleSpec::Singlet, l, &tw, z).unwrap();
            let want = QuantumMatrix::identity(sig, l)
                .scale((c(0.0, 1.0) * z * c(tw.angle(0) - tw.angle(1), 0.0)).exp() * z.powu(l as u32));
            assert!(t.matrix.sub(&want).mat.max_abs() < 1e-12);
        }
    }

    #[test]
    fn fundamental_t_commutes_with_h() {
        for (n, m) in [(2, 0), (1, 1), (2, 1)] {
            let sig = GradingSignature::new(n, m).unwrap();
            for tw in [TwistConfig::zero(sig), TwistConfig::generic(sig)] {
                let h = build_hamiltonian(sig, 3, &tw).unwrap();
                let t = t_operator(sig, &ModuleSpec::Fundamental, 3, &tw, c(0.52, 0.2)).unwrap();
                let res = t.matrix.mat.commutator_max(&h.mat);
                assert!(res < 1e-11, "gl({n}|{m}): [T, H] = {res:.3e}");
            }
        }
    }

    #[test]
    fn fundamental_t_single_site_hand_expansion() {
        // L = 1: T(z)_{ab} = pf(z) [ z d_ab Str(D) - (-1)^{p(a)} Str(D e_ab) ]
        //       = pf(z) d_ab [ z sum_c (-1)^p(c) e^{-i Phi_c} - e^{-i Phi_a} ]
        let sig = GradingSignature::new(2, 0).unwrap();
        let tw = TwistConfig::new(vec![0.41, 1.13]);
        let z = c(0.77, 0.31);
        let t = t_operator(sig, &ModuleSpec::Fundamental, 1, &tw, z).unwrap();
        let phase: f64 = sig.labels().map(|a| sig.sign(a) * tw.angle(a)).sum();
        let pf = (c(0.0, 1.0) * z * c(phase, 0.0)).exp();
        let str_d: C64 = sig
            .labels()
            .map(|a| c(sig.sign(a), 0.0) * cis(-tw.angle(a)))
            .sum();
        for a in 0..2 {
            for b in 0..2 {
                let want = if a == b {
                    pf * (z * str_d - cis(-tw.angle(a)))
                } else {
                    c(0.0, 0.0)
                };
                assert!((t.matrix.mat[(a, b)] - want).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn zero_twist_fundamental_t_has_global_symmetry() {
        let sig = GradingSignature::new(1, 1).unwrap();
        let tw = TwistConfig::zero(sig);
        let t = t_operator(sig, &ModuleSpec::Fundamental, 3, &tw, c(0.9, 0.0)).unwrap();
        for a in sig.labels() {
            for b in sig.labels() {
                let g = global_generator(sig, 3, a, b);
                let res = t.matrix.mat.commutator_max(&g.mat);
                assert!(res < 1e-10, "[T, E_{}{}] = {res:.3e}", a + 1, b + 1);
            }
        }
    }

    #[test]
    fn x_plus_single_label_is_shifted_q() {
        let sig = GradingSignature::new(2, 1).unwrap();
        let tw = TwistConfig::generic(sig);
        let l = 2;
        for label in sig.labels() {
            let subset = Subset::new(sig, &[label]).unwrap();
            let lambda = 0.63;
            let z = c(0.35, -0.8);
            let x = x_plus_operator(sig, &subset, &[lambda], l, &tw, z).unwrap();
            let q = q_operator(sig, &subset, l, &tw, z + c(lambda, 0.0)).unwrap();
            let res = x.matrix.sub(&q.matrix).mat.max_abs();
            assert!(res < 1e-11, "label {}: residual {res:.3e}", label + 1);
        }
    }

    #[test]
    fn interpolation_boundary_cases() {
        let sig = GradingSignature::new(1, 1).unwrap();
        let tw = TwistConfig::generic(sig);
        let l = 2;
        let nodes = sampling_nodes(l);
        // Q_full -> monomial z^L
        let samples: Vec<TransferOperator> = nodes
            .iter()
            .map(|&z| q_operator(sig, &Subset::full(sig), l, &tw, z).unwrap())
            .collect();
        let mp = interpolate_polynomial(&samples).unwrap();
        for (k, ck) in mp.coeffs.iter().enumerate() {
            if k == l {
                assert!(ck.sub(&QuantumMatrix::identity(sig, l)).mat.max_abs() < 1e-10);
            } else {
                assert!(ck.mat.max_abs() < 1e-10, "coefficient {k} should vanish");
            }
        }
        // Q_empty -> constant 1
        let samples: Vec<TransferOperator> = nodes
            .iter()
            .map(|&z| q_operator(sig, &Subset::empty(), l, &tw, z).unwrap())
            .collect();
        let mp = interpolate_polynomial(&samples).unwrap();
        assert!(mp.coeffs[0].sub(&QuantumMatrix::identity(sig, l)).mat.max_abs() < 1e-12);
        for ck in mp.coeffs.iter().skip(1) {
            assert!(ck.mat.max_abs() < 1e-12);
        }
    }

    #[test]
    fn q_eigenvalue_degree_tracks_subset_occupancy() {
        // On a basis of joint eigenstates, the degree of the Q_I eigenvalue
        // polynomial equals the number of sites holding species inside I.
        // Diagonal product states of the one-particle sectors suffice here:
        // check the two homogeneous states of gl(1|1), L = 2.
        let sig = GradingSignature::new(1, 1).unwrap();
        let tw = TwistConfig::generic(sig);
        let l = 2;
        let subset = Subset::new(sig, &[0]).unwrap();
        let nodes = sampling_nodes(l);
        let samples: Vec<TransferOperator> = nodes
            .iter()
            .map(|&z| q_operator(sig, &subset, l, &tw, z).unwrap())
            .collect();
        let mp = interpolate_polynomial(&samples).unwrap();
        let space = crate::quantum::StateSpace::new(sig, l);
        let all1 = space.index(&[0, 0]);
        let all2 = space.index(&[1, 1]);
        // |11>: two species-1 sites -> degree 2 (leading coefficient 1)
        assert!((mp.coeffs[2].mat[(all1, all1)] - C_ONE).norm() < 1e-10);
        // |22>: no species-1 sites -> constant eigenvalue 1
        assert!((mp.coeffs[0].mat[(all2, all2)] - C_ONE).norm() < 1e-10);
        assert!(mp.coeffs[1].mat[(all2, all2)].norm() < 1e-10);
        assert!(mp.coeffs[2].mat[(all2, all2)].norm() < 1e-10);
    }

    #[test]
    fn zero_twist_q_needs_regularization() {
        let sig = GradingSignature::new(1, 1).unwrap();
        let tw = TwistConfig::zero(sig);
        let subset = Subset::new(sig, &[0]).unwrap();
        assert!(matches!(
            q_operator(sig, &subset, 2, &tw, c(0.5, 0.0)),
            Err(Error::SingularTwist { .. })
        ));
    }
}
