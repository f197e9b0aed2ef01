//! Quantum-space matrices whose entries live in the auxiliary algebra
//! (superoscillators tensored with a gl(I)-module).
//!
//! Storage convention: an operator is the plain matrix of its action on the
//! product basis, with auxiliary coefficients collected to the left of the
//! quantum matrix units. Multiplying two such operators then costs the Koszul
//! sign (-1)^{(p(s)+p(u)) p_aux(Y_ut)} per entry pair, and appending a chain
//! site (the graded tensor product of parity-even operator-valued matrices)
//! costs (-1)^{p(s) (p(u)+p(v))}. Both rules follow from writing everything in
//! the graded tensor algebra of the auxiliary algebra with End of the quantum
//! space; they are validated downstream by the Yang-Baxter and functional
//! relation checks.

use crate::error::{Error, Result};
use crate::grading::{GradingSignature, TwistConfig};
use crate::linalg::{C64, C_ONE, C_ZERO};
use crate::module::{ModPart, RealizedModule};
use crate::osc::{FamilySet, OscElement, OscMonomial};
use crate::quantum::{QuantumMatrix, StateSpace};
use crate::trace::{family_trace, TraceWeights};
use std::collections::BTreeMap;

/// The auxiliary algebra context shared by all entries of an operator matrix.
#[derive(Debug, Clone)]
pub struct AuxAlgebra {
    pub fams: FamilySet,
    pub module: RealizedModule,
}

impl AuxAlgebra {
    pub fn new(fams: FamilySet, module: RealizedModule) -> Self {
        Self { fams, module }
    }

    pub fn oscillators_only(fams: FamilySet) -> Self {
        Self {
            fams,
            module: RealizedModule::Trivial,
        }
    }
}

/// One normal-ordered term: oscillator monomial times a module part. The
/// complex coefficient is folded into the module part.
#[derive(Debug, Clone)]
pub struct AuxTerm {
    pub osc: OscMonomial,
    pub md: ModPart,
}

impl AuxTerm {
    pub fn parity(&self, fams: &FamilySet) -> u8 {
        self.osc.parity(fams) ^ self.md.parity()
    }
}

/// A finite sum of auxiliary terms in canonical form.
#[derive(Debug, Clone)]
pub struct AuxElement {
    terms: Vec<AuxTerm>,
}

impl AuxElement {
    pub fn zero() -> Self {
        Self { terms: vec![] }
    }

    pub fn scalar(v: C64) -> Self {
        if v == C_ZERO {
            return Self::zero();
        }
        Self {
            terms: vec![AuxTerm {
                osc: OscMonomial::unit(),
                md: ModPart::Scalar(v),
            }],
        }
    }

    pub fn from_term(osc: OscMonomial, md: ModPart) -> Self {
        Self::canonicalize(vec![AuxTerm { osc, md }])
    }

    pub fn from_osc(e: &OscElement) -> Self {
        Self::canonicalize(
            e.terms()
                .iter()
                .map(|(m, v)| AuxTerm {
                    osc: m.clone(),
                    md: ModPart::Scalar(*v),
                })
                .collect(),
        )
    }

    fn canonicalize(terms: Vec<AuxTerm>) -> Self {
        let mut map: BTreeMap<(OscMonomial, (u8, i64)), AuxTerm> = BTreeMap::new();
        for t in terms {
            if t.md.is_zero() {
                continue;
            }
            let key = (t.osc.clone(), t.md.key());
            match map.get_mut(&key) {
                Some(existing) => {
                    existing.md = existing.md.add(&t.md).expect("merge keys matched");
                }
                None => {
                    map.insert(key, t);
                }
            }
        }
        Self {
            terms: map.into_values().filter(|t| !t.md.is_zero()).collect(),
        }
    }

    pub fn terms(&self) -> &[AuxTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_coeff(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.md.max_coeff())
            .fold(0.0, f64::max)
    }

    pub fn add(&self, rhs: &AuxElement) -> AuxElement {
        let mut all = self.terms.clone();
        all.extend(rhs.terms.iter().cloned());
        Self::canonicalize(all)
    }

    pub fn sub(&self, rhs: &AuxElement) -> AuxElement {
        self.add(&rhs.scale(-C_ONE))
    }

    pub fn scale(&self, s: C64) -> AuxElement {
        if s == C_ZERO {
            return Self::zero();
        }
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| AuxTerm {
                    osc: t.osc.clone(),
                    md: t.md.scale(s),
                })
                .collect(),
        }
    }

    /// Product: module parts slide right past oscillator monomials with a
    /// Koszul sign when both are odd; oscillators normal-order among
    /// themselves; module parts compose in their own space.
    pub fn mul(&self, rhs: &AuxElement, alg: &AuxAlgebra) -> Result<AuxElement> {
        let mut out: Vec<AuxTerm> = Vec::new();
        for a in &self.terms {
            let pa_mod = a.md.parity();
            let ea = OscElement::monomial(a.osc.clone(), C_ONE);
            for b in &rhs.terms {
                let pb_osc = b.osc.parity(&alg.fams);
                let sign = if pa_mod & pb_osc == 1 { -C_ONE } else { C_ONE };
                let osc_prod = ea.mul(&OscElement::monomial(b.osc.clone(), C_ONE), &alg.fams)?;
                let md_prod = a.md.mul(&b.md)?.scale(sign);
                for (mono, coeff) in osc_prod.terms() {
                    out.push(AuxTerm {
                        osc: mono.clone(),
                        md: md_prod.scale(*coeff),
                    });
                }
            }
        }
        Ok(Self::canonicalize(out))
    }

    /// Parity of a homogeneous element; None for zero or mixed sums.
    pub fn parity(&self, fams: &FamilySet) -> Option<u8> {
        let mut it = self.terms.iter();
        let first = it.next()?.parity(fams);
        for t in it {
            if t.parity(fams) != first {
                return None;
            }
        }
        Some(first)
    }

    /// Twisted normalized trace: oscillator families via their closed-form
    /// normalized supertrace, the module by its unnormalized twisted trace.
    pub fn trace(
        &self,
        alg: &AuxAlgebra,
        weights: &TraceWeights,
        twists: &TwistConfig,
    ) -> Result<C64> {
        let mut acc = C_ZERO;
        for t in &self.terms {
            let oscf = family_trace(
                &OscElement::monomial(t.osc.clone(), C_ONE),
                &alg.fams,
                weights,
            )?;
            if oscf == C_ZERO {
                continue;
            }
            acc += oscf * alg.module.trace(&t.md, twists)?;
        }
        Ok(acc)
    }
}

/// A quantum-space matrix with auxiliary-valued entries. All operators built
/// here are parity even: the entry at (s, t) is auxiliary-homogeneous of
/// parity p(s) + p(t).
#[derive(Debug, Clone)]
pub struct OpMatrix {
    pub space: StateSpace,
    pub alg: AuxAlgebra,
    entries: Vec<AuxElement>,
}

impl OpMatrix {
    pub fn zeros(sig: GradingSignature, sites: usize, alg: AuxAlgebra) -> Self {
        let space = StateSpace::new(sig, sites);
        let entries = vec![AuxElement::zero(); space.dim() * space.dim()];
        Self {
            space,
            alg,
            entries,
        }
    }

    pub fn identity(sig: GradingSignature, sites: usize, alg: AuxAlgebra) -> Self {
        let mut out = Self::zeros(sig, sites, alg);
        for s in 0..out.space.dim() {
            *out.at_mut(s, s) = AuxElement::scalar(C_ONE);
        }
        out
    }

    pub fn from_scalar(q: &QuantumMatrix, alg: AuxAlgebra) -> Self {
        let mut out = Self::zeros(q.space.sig, q.space.sites, alg);
        for s in 0..q.dim() {
            for t in 0..q.dim() {
                let v = q.mat[(s, t)];
                if v != C_ZERO {
                    *out.at_mut(s, t) = AuxElement::scalar(v);
                }
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn at(&self, s: usize, t: usize) -> &AuxElement {
        &self.entries[s * self.space.dim() + t]
    }

    pub fn at_mut(&mut self, s: usize, t: usize) -> &mut AuxElement {
        let d = self.space.dim();
        &mut self.entries[s * d + t]
    }

    pub fn add(&self, rhs: &OpMatrix) -> OpMatrix {
        let mut out = self.clone();
        for (o, r) in out.entries.iter_mut().zip(rhs.entries.iter()) {
            *o = o.add(r);
        }
        out
    }

    pub fn sub(&self, rhs: &OpMatrix) -> OpMatrix {
        let mut out = self.clone();
        for (o, r) in out.entries.iter_mut().zip(rhs.entries.iter()) {
            *o = o.sub(r);
        }
        out
    }

    pub fn scale(&self, s: C64) -> OpMatrix {
        let mut out = self.clone();
        for o in out.entries.iter_mut() {
            *o = o.scale(s);
        }
        out
    }

    pub fn max_coeff(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.max_coeff())
            .fold(0.0, f64::max)
    }

    /// Product of two parity-even operator matrices:
    /// (XY)_{st} = sum_u (-1)^{(p(s)+p(u)) (p(u)+p(t))} X_{su} Y_{ut},
    /// the sign being the structural auxiliary parity of the Y entry.
    pub fn mul(&self, rhs: &OpMatrix) -> Result<OpMatrix> {
        if self.dim() != rhs.dim() {
            return Err(Error::InvalidArgument("operator dimensions differ".into()));
        }
        let d = self.dim();
        let mut out = OpMatrix::zeros(self.space.sig, self.space.sites, self.alg.clone());
        for s in 0..d {
            let ps = self.space.state_parity(s);
            for u in 0..d {
                let x = self.at(s, u);
                if x.is_zero() {
                    continue;
                }
                let pu = self.space.state_parity(u);
                for t in 0..d {
                    let y = rhs.at(u, t);
                    if y.is_zero() {
                        continue;
                    }
                    let pt = self.space.state_parity(t);
                    let sign = if (ps ^ pu) & (pu ^ pt) == 1 {
                        -C_ONE
                    } else {
                        C_ONE
                    };
                    let prod = x.mul(y, &self.alg)?.scale(sign);
                    let cur = out.at(s, t).add(&prod);
                    *out.at_mut(s, t) = cur;
                }
            }
        }
        Ok(out)
    }

    /// Appends quantum sites: the graded tensor product of two parity-even
    /// operator-valued matrices,
    /// (X (x) Y)_{(s,u),(t,v)} = (-1)^{p(s) (p(u)+p(v))} X_{st} Y_{uv},
    /// with auxiliary entries multiplied left to right.
    pub fn kron(&self, rhs: &OpMatrix) -> Result<OpMatrix> {
        let sig = self.space.sig;
        let mut out = OpMatrix::zeros(sig, self.space.sites + rhs.space.sites, self.alg.clone());
        let (dx, dy) = (self.dim(), rhs.dim());
        for s in 0..dx {
            let ps = self.space.state_parity(s);
            for t in 0..dx {
                let x = self.at(s, t);
                if x.is_zero() {
                    continue;
                }
                for u in 0..dy {
                    for v in 0..dy {
                        let y = rhs.at(u, v);
                        if y.is_zero() {
                            continue;
                        }
                        let py = rhs.space.state_parity(u) ^ rhs.space.state_parity(v);
                        let sign = if ps & py == 1 { -C_ONE } else { C_ONE };
                        let prod = x.mul(y, &self.alg)?.scale(sign);
                        *out.at_mut(s * dy + u, t * dy + v) = prod;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Entrywise twisted trace over the auxiliary space, producing a plain
    /// quantum matrix.
    pub fn trace_auxiliary(
        &self,
        weights: &TraceWeights,
        twists: &TwistConfig,
    ) -> Result<QuantumMatrix> {
        let mut out = QuantumMatrix::zeros(self.space.sig, self.space.sites);
        for s in 0..self.dim() {
            for t in 0..self.dim() {
                let v = self.at(s, t).trace(&self.alg, weights, twists)?;
                out.mat[(s, t)] = v;
            }
        }
        Ok(out)
    }

    /// Checks that every entry is auxiliary-homogeneous of the structural
    /// parity p(s) + p(t); returns the worst offending magnitude.
    pub fn structural_parity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for s in 0..self.dim() {
            for t in 0..self.dim() {
                let want = self.space.state_parity(s) ^ self.space.state_parity(t);
                for term in self.at(s, t).terms() {
                    if term.parity(&self.alg.fams) != want {
                        worst = worst.max(term.md.max_coeff());
                    }
                }
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn scalar_matrices_multiply_plainly() {
        let sig = GradingSignature::new(1, 1).unwrap();
        let p = crate::quantum::graded_permutation(sig);
        let alg = AuxAlgebra::oscillators_only(FamilySet::empty());
        let p_op = OpMatrix::from_scalar(&p, alg.clone());
        let sq = p_op.mul(&p_op).unwrap();
        let id = OpMatrix::identity(sig, 2, alg);
        assert!(sq.sub(&id).max_coeff() < 1e-14);
    }

    #[test]
    fn kron_of_scalars_matches_even_operator_product() {
        // For parity-even scalar operators the graded kron must agree with the
        // scalar graded tensor product.
        let sig = GradingSignature::new(1, 1).unwrap();
        let r = crate::quantum::r_matrix(sig, c(0.37, 0.11));
        let alg = AuxAlgebra::oscillators_only(FamilySet::empty());
        let id1 = QuantumMatrix::identity(sig, 1);
        let left = OpMatrix::from_scalar(&r, alg.clone());
        let right = OpMatrix::from_scalar(&id1, alg.clone());
        let kr = left.kron(&right).unwrap();
        let want = crate::quantum::graded_kron(&r, &id1);
        let got = kr.trace_auxiliary(
            &TraceWeights::for_families(&FamilySet::empty(), &TwistConfig::new(vec![0.0, 1.0]))
                .unwrap(),
            &TwistConfig::new(vec![0.0, 1.0]),
        )
        .unwrap();
        assert!(got.sub(&want).mat.max_abs() < 1e-14);
    }
}
