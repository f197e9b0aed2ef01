//! Explicit (truncated) representations of the superoscillator families:
//! bosonic families act on Fock towers with a^dag |k> = |k+1>, a |k> = k |k-1>,
//! fermionic families on the two-dimensional space c^dag |0> = |1>, c |1> = |0>.
//! Odd operators carry Jordan-Wigner strings over the earlier fermionic
//! families so that distinct families supercommute.
//!
//! This layer backs the factorization checks and serves as an independent
//! matrix oracle for the symbolic normal-ordering arithmetic.

use crate::linalg::{c, CMat, C64, C_ZERO};
use crate::osc::{FamilySet, OscElement, OscMonomial};

#[derive(Debug, Clone)]
pub struct FockSpace {
    pub fams: FamilySet,
    dims: Vec<usize>,
    dim: usize,
}

impl FockSpace {
    /// Bosonic families truncated at occupation `bosonic_cutoff` (dimension
    /// cutoff + 1); fermionic families are exact.
    pub fn new(fams: FamilySet, bosonic_cutoff: usize) -> Self {
        let dims: Vec<usize> = fams
            .families()
            .iter()
            .map(|f| if f.fermionic { 2 } else { bosonic_cutoff + 1 })
            .collect();
        let dim = dims.iter().product::<usize>().max(1);
        Self { fams, dims, dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn occupancies(&self, mut idx: usize) -> Vec<usize> {
        let mut occ = vec![0usize; self.dims.len()];
        for f in (0..self.dims.len()).rev() {
            occ[f] = idx % self.dims[f];
            idx /= self.dims[f];
        }
        occ
    }

    pub fn index(&self, occ: &[usize]) -> usize {
        occ.iter()
            .zip(self.dims.iter())
            .fold(0usize, |acc, (&o, &d)| acc * d + o)
    }

    /// Total quanta in a basis state (bosonic plus fermionic).
    pub fn total_occupancy(&self, idx: usize) -> usize {
        self.occupancies(idx).iter().sum()
    }

    /// Applies one normal-ordered monomial (times `coeff`) to a state vector.
    /// States pushed past a bosonic truncation are dropped; callers restrict
    /// comparisons to windows where that cannot contribute.
    pub fn apply_monomial(&self, mono: &OscMonomial, coeff: C64, v: &[C64]) -> Vec<C64> {
        let mut out = vec![C_ZERO; self.dim];
        'state: for (idx, &amp) in v.iter().enumerate() {
            if amp == C_ZERO {
                continue;
            }
            let mut occ = self.occupancies(idx);
            let mut factor = coeff;
            // rightmost family block acts first
            for &(f, r, s) in mono.exps().iter().rev() {
                let fi = f as usize;
                let fam = self.fams.get(fi);
                // Jordan-Wigner string over earlier fermionic families, once
                // per odd ladder operator in this block.
                if fam.fermionic && (r + s) % 2 == 1 {
                    let mut string = 0usize;
                    for (j, g) in self.fams.families().iter().enumerate() {
                        if j < fi && g.fermionic {
                            string += occ[j];
                        }
                    }
                    if string % 2 == 1 {
                        factor = -factor;
                    }
                }
                // annihilate s times
                for _ in 0..s {
                    if occ[fi] == 0 {
                        continue 'state;
                    }
                    if !fam.fermionic {
                        factor *= c(occ[fi] as f64, 0.0);
                    }
                    occ[fi] -= 1;
                }
                // create r times
                for _ in 0..r {
                    if occ[fi] + 1 >= self.dims[fi] && fam.fermionic {
                        continue 'state;
                    }
                    if occ[fi] + 1 >= self.dims[fi] {
                        // bosonic truncation: state leaves the space
                        continue 'state;
                    }
                    occ[fi] += 1;
                }
            }
            out[self.index(&occ)] += factor * amp;
        }
        out
    }

    pub fn apply_element(&self, elem: &OscElement, v: &[C64]) -> Vec<C64> {
        let mut out = vec![C_ZERO; self.dim];
        for (mono, coeff) in elem.terms() {
            let t = self.apply_monomial(mono, *coeff, v);
            for (o, x) in out.iter_mut().zip(t.iter()) {
                *o += x;
            }
        }
        out
    }

    /// exp(series_sign * elem) applied to v, truncated at `order` powers.
    pub fn apply_exp_series(&self, elem: &OscElement, sign: f64, order: usize, v: &[C64]) -> Vec<C64> {
        let mut acc = v.to_vec();
        let mut term = v.to_vec();
        for k in 1..=order {
            term = self.apply_element(elem, &term);
            let w = c(sign, 0.0).powu(k as u32) / c(factorial(k), 0.0);
            let mut live = false;
            for (a, t) in acc.iter_mut().zip(term.iter()) {
                *a += w * t;
                if t.norm() > 0.0 {
                    live = true;
                }
            }
            if !live {
                break;
            }
        }
        acc
    }

    /// Dense matrix of an element (small spaces only).
    pub fn matrix_of(&self, elem: &OscElement) -> CMat {
        let mut m = CMat::zeros(self.dim, self.dim);
        let mut basis = vec![C_ZERO; self.dim];
        for j in 0..self.dim {
            basis[j] = c(1.0, 0.0);
            let col = self.apply_element(elem, &basis);
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = *x;
            }
            basis[j] = C_ZERO;
        }
        m
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|j| j as f64).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grading::GradingSignature;
    use crate::linalg::c;
    use crate::osc::OscFamily;

    fn fams_two_fermions() -> FamilySet {
        let sig = GradingSignature::new(1, 2).unwrap();
        // subset {0}: families (0,1), (0,2), both fermionic
        FamilySet::for_subset(sig, &[0], 0)
    }

    #[test]
    fn symbolic_product_matches_matrix_product() {
        // the normal-ordered product must agree with matrix multiplication in
        // the explicit representation, including cross-family signs
        let fams = fams_two_fermions();
        let space = FockSpace::new(fams.clone(), 0);
        let gens = [
            OscMonomial::creator(0),
            OscMonomial::annihilator(0),
            OscMonomial::creator(1),
            OscMonomial::annihilator(1),
            OscMonomial::number(1),
        ];
        for a in &gens {
            for b in &gens {
                let ea = OscElement::monomial(a.clone(), c(1.0, 0.0));
                let eb = OscElement::monomial(b.clone(), c(1.0, 0.0));
                let sym = ea.mul(&eb, &fams).unwrap();
                let lhs = space.matrix_of(&sym);
                let rhs = space.matrix_of(&ea).mul(&space.matrix_of(&eb));
                assert!(
                    lhs.sub(&rhs).max_abs() < 1e-13,
                    "mismatch for {a:?} * {b:?}"
                );
            }
        }
    }

    #[test]
    fn mixed_statistics_product_oracle() {
        let sig = GradingSignature::new(2, 1).unwrap();
        // subset {0, 2}: one bosonic family (0,1) and one fermionic (2,1)
        let fams = FamilySet::for_subset(sig, &[0, 2], 0);
        assert_eq!(fams.len(), 2);
        let space = FockSpace::new(fams.clone(), 6);
        let x = OscElement::monomial(OscMonomial::creator(0), c(0.7, 0.1))
            .add(&OscElement::monomial(OscMonomial::creator(1), c(0.0, 1.0)));
        let y = OscElement::monomial(OscMonomial::annihilator(1), c(1.0, -0.4))
            .add(&OscElement::monomial(OscMonomial::number(0), c(0.3, 0.0)));
        let sym = x.mul(&y, &fams).unwrap();
        let lhs = space.matrix_of(&sym);
        let rhs = space.matrix_of(&x).mul(&space.matrix_of(&y));
        // compare away from the truncation edge
        for i in 0..space.dim() {
            for j in 0..space.dim() {
                if space.total_occupancy(i) <= 4 && space.total_occupancy(j) <= 4 {
                    assert!((lhs[(i, j)] - rhs[(i, j)]).norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn bosonic_ladder_convention() {
        let sig = GradingSignature::new(2, 0).unwrap();
        let fams = FamilySet::for_subset(sig, &[0], 0);
        let space = FockSpace::new(fams, 5);
        // a |3> = 3 |2>
        let mut v = vec![C_ZERO; space.dim()];
        v[3] = c(1.0, 0.0);
        let lowered =
            space.apply_monomial(&OscMonomial::annihilator(0), c(1.0, 0.0), &v);
        assert!((lowered[2] - c(3.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn distinct_fermion_families_anticommute_in_matrices() {
        let fams = fams_two_fermions();
        let space = FockSpace::new(fams, 0);
        let c0 = space.matrix_of(&OscElement::monomial(OscMonomial::creator(0), c(1.0, 0.0)));
        let c1 = space.matrix_of(&OscElement::monomial(OscMonomial::creator(1), c(1.0, 0.0)));
        let anti = c0.mul(&c1).add(&c1.mul(&c0));
        assert!(anti.max_abs() < 1e-15);
    }

    #[test]
    fn unused_family_set_sanity() {
        let sig = GradingSignature::new(1, 1).unwrap();
        let fams = FamilySet::for_subset(sig, &[], 0);
        assert!(fams.is_empty());
        let _ = OscFamily {
            copy: 0,
            row: 0,
            col: 1,
            fermionic: true,
        };
    }
}
