//! Degenerate Lax operators labelled by subsets of the basis labels.
//!
//! For a subset I the operator has the block form (rows/cols in the natural
//! label order, undotted indices in I, dotted in the complement):
//!
//!   L_I(z)[A, B]       = z d_AB - (-1)^p(B) (E_AB + H_AB)     A, B in I
//!   L_I(z)[A, Bdot]    = xi^dag_{A Bdot}
//!   L_I(z)[Adot, B]    = -(-1)^p(B) xi_{Adot B}
//!   L_I(z)[Adot, Bdot] = d_{Adot Bdot}
//!
//! with H_AB = sum_{Ddot not in I} ( xi^dag_{A Ddot} xi_{Ddot B}
//!             + (1/2) (-1)^{p(A)+p(Ddot)} d_AB ).
//!
//! When the matrix participates in monodromies or the graded Yang-Baxter
//! equation, each entry additionally carries the assembly sign
//! (-1)^{p(A) p(B) + p(B)} relating the algebra elements to the matrix acting
//! on the graded space. The product-factorization identities of the fusion
//! procedure instead use the raw arrangement; both layouts are exposed.

use crate::aux::{AuxAlgebra, AuxElement, OpMatrix};
use crate::error::{Error, Result};
use crate::grading::GradingSignature;
use crate::linalg::{c, C64, C_ONE};
use crate::module::{ModPart, ModuleSpec, RealizedModule};
use crate::osc::{FamilySet, OscElement, OscMonomial};

/// An ordered subset of the basis labels {0, .., n+m-1}, stored ascending.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subset {
    labels: Vec<usize>,
}

impl Subset {
    pub fn new(sig: GradingSignature, labels: &[usize]) -> Result<Self> {
        let mut ls = labels.to_vec();
        ls.sort_unstable();
        ls.dedup();
        if ls.len() != labels.len() {
            return Err(Error::InvalidArgument("subset labels repeat".into()));
        }
        if ls.iter().any(|&a| a >= sig.dim()) {
            return Err(Error::InvalidArgument("subset label out of range".into()));
        }
        Ok(Self { labels: ls })
    }

    pub fn empty() -> Self {
        Self { labels: vec![] }
    }

    pub fn full(sig: GradingSignature) -> Self {
        Self {
            labels: sig.labels().collect(),
        }
    }

    pub fn from_mask(sig: GradingSignature, mask: u32) -> Self {
        Self {
            labels: sig.labels().filter(|&a| mask >> a & 1 == 1).collect(),
        }
    }

    pub fn mask(&self) -> u32 {
        self.labels.iter().fold(0u32, |m, &a| m | 1 << a)
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn contains(&self, a: usize) -> bool {
        self.labels.binary_search(&a).is_ok()
    }

    pub fn complement(&self, sig: GradingSignature) -> Subset {
        Subset {
            labels: sig.labels().filter(|&a| !self.contains(a)).collect(),
        }
    }

    pub fn union(&self, rhs: &Subset) -> Subset {
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&rhs.labels);
        labels.sort_unstable();
        labels.dedup();
        Subset { labels }
    }

    pub fn insert(&self, a: usize) -> Subset {
        let mut labels = self.labels.clone();
        labels.push(a);
        labels.sort_unstable();
        labels.dedup();
        Subset { labels }
    }

    pub fn bosonic_members(&self, sig: GradingSignature) -> Vec<usize> {
        self.labels
            .iter()
            .copied()
            .filter(|&a| sig.parity(a) == 0)
            .collect()
    }

    pub fn fermionic_members(&self, sig: GradingSignature) -> Vec<usize> {
        self.labels
            .iter()
            .copied()
            .filter(|&a| sig.parity(a) == 1)
            .collect()
    }

    /// 1-based display, e.g. {1,3}.
    pub fn display(&self) -> String {
        let inner: Vec<String> = self.labels.iter().map(|a| (a + 1).to_string()).collect();
        format!("{{{}}}", inner.join(","))
    }
}

/// A Lax operator at fixed spectral value.
#[derive(Debug, Clone)]
pub struct LaxOperator {
    pub sig: GradingSignature,
    pub subset: Subset,
    pub z: C64,
    /// single-site operator matrix with assembly signs applied
    pub matrix: OpMatrix,
}

fn assembly_sign(sig: GradingSignature, a: usize, b: usize) -> C64 {
    let e = (sig.parity(a) & sig.parity(b)) ^ sig.parity(b);
    if e == 1 {
        -C_ONE
    } else {
        C_ONE
    }
}

/// Entry table of the canonical Lax operator in the raw (fusion) arrangement,
/// over a caller-supplied family context (so two copies can coexist).
pub(crate) fn lax_entries_raw(
    sig: GradingSignature,
    subset: &Subset,
    module: &RealizedModule,
    z: C64,
    alg: &AuxAlgebra,
    copy: u8,
) -> Result<Vec<AuxElement>> {
    let d = sig.dim();
    let fam_idx = |row: usize, col: usize| -> Result<u16> {
        alg.fams
            .index_of(copy, row, col)
            .map(|i| i as u16)
            .ok_or_else(|| Error::ConstructionBug("family missing from context".into()))
    };
    let mut entries = vec![AuxElement::zero(); d * d];
    for a in 0..d {
        for b in 0..d {
            let e = &mut entries[a * d + b];
            match (subset.contains(a), subset.contains(b)) {
                (true, true) => {
                    let mut acc = AuxElement::zero();
                    if a == b {
                        acc = acc.add(&AuxElement::scalar(z));
                    }
                    let sgn_b = c(-sig.sign(b), 0.0);
                    if let Some(gen) = module.generator_with_parity(sig, a, b) {
                        acc = acc.add(&AuxElement::from_term(OscMonomial::unit(), gen.scale(sgn_b)));
                    }
                    // H_ab = sum_x xi^dag_(a,x) xi_(x,b) + (1/2)(-1)^{p(a)+p(x)} d_ab
                    for x in 0..d {
                        if subset.contains(x) {
                            continue;
                        }
                        let f_ax = fam_idx(a, x)?;
                        let f_bx = fam_idx(b, x)?;
                        let hop = AuxElement::from_osc(
                            &OscElement::monomial(OscMonomial::creator(f_ax), C_ONE).mul(
                                &OscElement::monomial(OscMonomial::annihilator(f_bx), C_ONE),
                                &alg.fams,
                            )?,
                        );
                        acc = acc.add(&hop.scale(sgn_b));
                        if a == b {
                            let shift = 0.5 * sig.sign(a) * sig.sign(x);
                            acc = acc.add(&AuxElement::scalar(sgn_b * c(shift, 0.0)));
                        }
                    }
                    *e = acc;
                }
                (true, false) => {
                    let f = fam_idx(a, b)?;
                    *e = AuxElement::from_term(OscMonomial::creator(f), ModPart::Scalar(C_ONE));
                }
                (false, true) => {
                    let f = fam_idx(b, a)?;
                    *e = AuxElement::from_term(
                        OscMonomial::annihilator(f),
                        ModPart::Scalar(c(-sig.sign(b), 0.0)),
                    );
                }
                (false, false) => {
                    if a == b {
                        *e = AuxElement::scalar(C_ONE);
                    }
                }
            }
        }
    }
    Ok(entries)
}

/// The canonical Lax operator L_I(z) with assembly signs, ready for
/// monodromies and the graded Yang-Baxter equation.
pub fn lax_canonical(
    sig: GradingSignature,
    subset: &Subset,
    module: &ModuleSpec,
    z: C64,
) -> Result<LaxOperator> {
    let realized = RealizedModule::realize(sig, subset.labels(), module)?;
    let fams = FamilySet::for_subset(sig, subset.labels(), 0);
    let alg = AuxAlgebra::new(fams, realized.clone());
    let entries = lax_entries_raw(sig, subset, &realized, z, &alg, 0)?;
    let d = sig.dim();
    let mut matrix = OpMatrix::zeros(sig, 1, alg);
    for a in 0..d {
        for b in 0..d {
            *matrix.at_mut(a, b) = entries[a * d + b].scale(assembly_sign(sig, a, b));
        }
    }
    let lax = LaxOperator {
        sig,
        subset: subset.clone(),
        z,
        matrix,
    };
    debug_assert!(lax.matrix.structural_parity_defect() == 0.0);
    Ok(lax)
}

/// Full-set Lax operator for T-operators: no oscillator content, entries
/// z d_AB - (-1)^p(B) E_AB in the chosen finite-dimensional module.
pub fn lax_full(sig: GradingSignature, module: &ModuleSpec, z: C64) -> Result<LaxOperator> {
    match module {
        ModuleSpec::Singlet | ModuleSpec::Fundamental | ModuleSpec::Explicit(_) => {}
        ModuleSpec::Verma(_) => {
            return Err(Error::InvalidArgument(
                "the full-set transfer operator needs a singlet, fundamental, or explicit module"
                    .into(),
            ))
        }
    }
    lax_canonical(sig, &Subset::full(sig), module, z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C_ZERO;
    use crate::module::ModPart;

    #[test]
    fn full_set_singlet_is_z_times_identity() {
        let sig = GradingSignature::new(2, 1).unwrap();
        let z = c(0.83, -0.21);
        let lax = lax_canonical(sig, &Subset::full(sig), &ModuleSpec::Singlet, z).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                let e = lax.matrix.at(a, b);
                if a == b {
                    assert_eq!(e.terms().len(), 1);
                    match &e.terms()[0].md {
                        ModPart::Scalar(v) => assert!((v - z).norm() < 1e-15),
                        other => panic!("unexpected part {other:?}"),
                    }
                } else {
                    assert!(e.is_zero());
                }
            }
        }
    }

    #[test]
    fn empty_set_is_identity() {
        let sig = GradingSignature::new(1, 2).unwrap();
        let lax =
            lax_canonical(sig, &Subset::empty(), &ModuleSpec::Singlet, c(1.7, 0.4)).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                let e = lax.matrix.at(a, b);
                if a == b {
                    match &e.terms()[0].md {
                        ModPart::Scalar(v) => assert!((v - C_ONE).norm() < 1e-15),
                        other => panic!("unexpected part {other:?}"),
                    }
                } else {
                    assert!(e.is_zero());
                }
            }
        }
    }

    #[test]
    fn gl11_first_label_matches_hand_form() {
        // L_{1}(z) = [[z - h, xi^dag], [-xi, 1]] with h = N - 1/2, before
        // assembly signs; rows/cols (1, 2).
        let sig = GradingSignature::new(1, 1).unwrap();
        let subset = Subset::new(sig, &[0]).unwrap();
        let realized = RealizedModule::Trivial;
        let fams = FamilySet::for_subset(sig, &[0], 0);
        let alg = AuxAlgebra::new(fams, realized.clone());
        let z = c(0.4, 0.9);
        let raw = lax_entries_raw(sig, &subset, &realized, z, &alg, 0).unwrap();
        // (0,0): z + 1/2 - N
        let e00 = &raw[0];
        let want00 = AuxElement::scalar(z + c(0.5, 0.0)).add(&AuxElement::from_term(
            OscMonomial::number(0),
            ModPart::Scalar(-C_ONE),
        ));
        assert!(e00.sub(&want00).max_coeff() < 1e-15);
        // (0,1): xi^dag ; (1,0): -(-1)^p(1) xi = +... p(col=0)=0 so -xi
        let e01 = &raw[1];
        assert_eq!(e01.terms().len(), 1);
        assert_eq!(e01.terms()[0].osc, OscMonomial::creator(0));
        let e10 = &raw[2];
        match &e10.terms()[0].md {
            ModPart::Scalar(v) => assert!((v + C_ONE).norm() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(e10.terms()[0].osc, OscMonomial::annihilator(0));
        // (1,1): 1
        match &raw[3].terms()[0].md {
            ModPart::Scalar(v) => assert!((v - C_ONE).norm() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn family_census_for_two_label_subset() {
        // subset {1,3} of gl(2|1): oscillator pairs (1,2) bosonic, (3,2) fermionic
        let sig = GradingSignature::new(2, 1).unwrap();
        let fams = FamilySet::for_subset(sig, &[0, 2], 0);
        assert_eq!(fams.len(), 2);
        let stats: Vec<bool> = fams.families().iter().map(|f| f.fermionic).collect();
        assert_eq!(stats, vec![false, true]);
    }

    #[test]
    fn spectral_difference_sits_on_inner_diagonal() {
        let sig = GradingSignature::new(2, 1).unwrap();
        let subset = Subset::new(sig, &[0, 2]).unwrap();
        let (z1, z2) = (c(0.3, 0.2), c(-1.1, 0.7));
        let l1 = lax_canonical(sig, &subset, &ModuleSpec::Singlet, z1).unwrap();
        let l2 = lax_canonical(sig, &subset, &ModuleSpec::Singlet, z2).unwrap();
        let diff = l1.matrix.sub(&l2.matrix);
        for a in 0..3 {
            for b in 0..3 {
                let e = diff.at(a, b);
                if a == b && subset.contains(a) {
                    // assembly sign is +1 on the diagonal
                    match &e.terms()[0].md {
                        ModPart::Scalar(v) => assert!((v - (z1 - z2)).norm() < 1e-15),
                        other => panic!("unexpected {other:?}"),
                    }
                } else {
                    assert!(e.is_zero(), "off-diagonal difference at ({a},{b})");
                }
            }
        }
    }

    #[test]
    fn entry_parity_is_structural() {
        let sig = GradingSignature::new(2, 1).unwrap();
        for mask in 0..8u32 {
            let subset = Subset::from_mask(sig, mask);
            let lax = lax_canonical(sig, &subset, &ModuleSpec::Singlet, c(0.6, -0.3)).unwrap();
            assert_eq!(lax.matrix.structural_parity_defect(), 0.0);
        }
    }

    #[test]
    fn verma_rejected_on_full_transfer_lax() {
        let sig = GradingSignature::new(1, 1).unwrap();
        assert!(lax_full(sig, &ModuleSpec::Verma(vec![0.1, 0.2]), C_ZERO).is_err());
    }
}
