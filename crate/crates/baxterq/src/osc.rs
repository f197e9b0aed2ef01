//! Symbolic superoscillator algebra in normal-ordered form.
//!
//! A family is one pair (xi_{A Bdot}, xi^dag_{A Bdot}) labelled by a row index
//! A in the subset I and a column index Bdot in its complement; its statistics
//! is the parity sum p(A) + p(Bdot) mod 2. Distinct families supercommute, and
//! within a family the supercommutator of xi with xi^dag is 1. Elements are
//! kept canonical: families ordered lexicographically, daggers to the left
//! inside each family, like monomials merged.

use crate::error::{Error, Result};
use crate::grading::GradingSignature;
use crate::linalg::{C64, C_ZERO};
use std::collections::BTreeMap;

/// Hard cap on any single exponent; hitting it means runaway symbolic growth.
pub const EXPONENT_CAP: u32 = 64;

/// One superoscillator pair. `copy` distinguishes independent tensor copies of
/// the algebra (used when multiplying two Lax operators with separate
/// auxiliary spaces); single-operator contexts use copy 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct OscFamily {
    pub copy: u8,
    /// row label, member of the subset I (0-based)
    pub row: usize,
    /// column label, member of the complement of I (0-based)
    pub col: usize,
    pub fermionic: bool,
}

/// The ordered family list for a given context.
#[derive(Debug, Clone, Default)]
pub struct FamilySet {
    fams: Vec<OscFamily>,
}

impl FamilySet {
    pub fn empty() -> Self {
        Self { fams: vec![] }
    }

    /// Families of the Lax operator for `subset`: one pair per (A in I,
    /// Bdot not in I), with statistics p(A) + p(Bdot) mod 2.
    pub fn for_subset(sig: GradingSignature, subset: &[usize], copy: u8) -> Self {
        let inside: Vec<usize> = subset.to_vec();
        let mut fams = Vec::new();
        for &a in &inside {
            for b in sig.labels() {
                if !inside.contains(&b) {
                    fams.push(OscFamily {
                        copy,
                        row: a,
                        col: b,
                        fermionic: (sig.parity(a) ^ sig.parity(b)) == 1,
                    });
                }
            }
        }
        fams.sort();
        Self { fams }
    }

    pub fn union(a: &FamilySet, b: &FamilySet) -> Self {
        let mut fams = a.fams.clone();
        fams.extend_from_slice(&b.fams);
        fams.sort();
        fams.dedup();
        Self { fams }
    }

    pub fn len(&self) -> usize {
        self.fams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fams.is_empty()
    }

    pub fn get(&self, idx: usize) -> OscFamily {
        self.fams[idx]
    }

    pub fn families(&self) -> &[OscFamily] {
        &self.fams
    }

    pub fn index_of(&self, copy: u8, row: usize, col: usize) -> Option<usize> {
        self.fams
            .iter()
            .position(|f| f.copy == copy && f.row == row && f.col == col)
    }
}

/// Normal-ordered monomial: per family the exponent pair (r, s) standing for
/// (xi^dag)^r xi^s; families listed in index order, (0,0) entries omitted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OscMonomial {
    exps: Vec<(u16, u32, u32)>,
}

impl OscMonomial {
    pub fn unit() -> Self {
        Self { exps: vec![] }
    }

    pub fn creator(fam: u16) -> Self {
        Self {
            exps: vec![(fam, 1, 0)],
        }
    }

    pub fn annihilator(fam: u16) -> Self {
        Self {
            exps: vec![(fam, 0, 1)],
        }
    }

    pub fn number(fam: u16) -> Self {
        Self {
            exps: vec![(fam, 1, 1)],
        }
    }

    pub fn exps(&self) -> &[(u16, u32, u32)] {
        &self.exps
    }

    pub fn is_unit(&self) -> bool {
        self.exps.is_empty()
    }

    /// Parity: over fermionic families, sum of (r + s) mod 2.
    pub fn parity(&self, fams: &FamilySet) -> u8 {
        let mut p = 0u8;
        for &(f, r, s) in &self.exps {
            if fams.get(f as usize).fermionic {
                p ^= ((r + s) % 2) as u8;
            }
        }
        p
    }

    pub fn total_degree(&self) -> u32 {
        self.exps.iter().map(|&(_, r, s)| r + s).sum()
    }

    fn block_parity(fam: &OscFamily, r: u32, s: u32) -> u8 {
        if fam.fermionic {
            ((r + s) % 2) as u8
        } else {
            0
        }
    }
}

/// A finite sum of normal-ordered monomials with complex coefficients, kept in
/// canonical form (sorted, merged, exact zeros dropped).
#[derive(Debug, Clone, PartialEq)]
pub struct OscElement {
    terms: Vec<(OscMonomial, C64)>,
}

impl OscElement {
    pub fn zero() -> Self {
        Self { terms: vec![] }
    }

    pub fn scalar(v: C64) -> Self {
        if v == C_ZERO {
            return Self::zero();
        }
        Self {
            terms: vec![(OscMonomial::unit(), v)],
        }
    }

    pub fn monomial(m: OscMonomial, v: C64) -> Self {
        Self::from_map([(m, v)].into_iter().collect())
    }

    fn from_map(map: BTreeMap<OscMonomial, C64>) -> Self {
        let terms = map.into_iter().filter(|(_, v)| *v != C_ZERO).collect();
        Self { terms }
    }

    pub fn terms(&self) -> &[(OscMonomial, C64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_coeff(&self) -> f64 {
        self.terms.iter().map(|(_, v)| v.norm()).fold(0.0, f64::max)
    }

    pub fn add(&self, rhs: &OscElement) -> OscElement {
        let mut map: BTreeMap<OscMonomial, C64> = self.terms.iter().cloned().collect();
        for (m, v) in &rhs.terms {
            *map.entry(m.clone()).or_insert(C_ZERO) += v;
        }
        Self::from_map(map)
    }

    pub fn sub(&self, rhs: &OscElement) -> OscElement {
        self.add(&rhs.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: C64) -> OscElement {
        if s == C_ZERO {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * s)).collect(),
        }
    }

    /// Parity of a homogeneous element; None for zero or mixed-parity sums.
    pub fn parity(&self, fams: &FamilySet) -> Option<u8> {
        let mut it = self.terms.iter();
        let first = it.next()?.0.parity(fams);
        for (m, _) in it {
            if m.parity(fams) != first {
                return None;
            }
        }
        Some(first)
    }

    /// Product in canonical normal-ordered form. Reordering across families
    /// uses Koszul signs; within a family the supercommutation relation is
    /// applied, so bosonic pairs contract with k! C(s,k) C(r,k) weights and
    /// fermionic exponents stay in {0, 1}.
    pub fn mul(&self, rhs: &OscElement, fams: &FamilySet) -> Result<OscElement> {
        let mut map: BTreeMap<OscMonomial, C64> = BTreeMap::new();
        for (ma, va) in &self.terms {
            for (mb, vb) in &rhs.terms {
                let coeff = va * vb;
                for (mono, w) in mul_monomials(ma, mb, fams)? {
                    let entry = map.entry(mono).or_insert(C_ZERO);
                    *entry += coeff * C64::new(w, 0.0);
                }
            }
        }
        Ok(Self::from_map(map))
    }
}

/// Expansion of one family's block product
/// (dag^ra xi^sa) (dag^rb xi^sb) -> sum_k coeff_k dag^{ra+rb-k} xi^{sa+sb-k}.
fn merge_family(fam: &OscFamily, ra: u32, sa: u32, rb: u32, sb: u32) -> Vec<(u32, u32, f64)> {
    if fam.fermionic {
        let mut out = Vec::new();
        if sa == 1 && rb == 1 {
            // xi xi^dag = 1 - xi^dag xi
            if ra + 0 <= 1 && sb <= 1 {
                out.push((ra, sb, 1.0));
            }
            if ra + 1 <= 1 && sb + 1 <= 1 {
                out.push((ra + 1, sb + 1, -1.0));
            }
        } else if ra + rb <= 1 && sa + sb <= 1 {
            out.push((ra + rb, sa + sb, 1.0));
        }
        out
    } else {
        // xi^s dag^r = sum_k k! C(s,k) C(r,k) dag^{r-k} xi^{s-k}
        let kmax = sa.min(rb);
        let mut out = Vec::with_capacity(kmax as usize + 1);
        for k in 0..=kmax {
            let mut w = 1.0f64;
            for j in 0..k {
                // k! C(sa,k) C(rb,k) accumulated incrementally
                w *= ((sa - j) as f64) * ((rb - j) as f64) / ((j + 1) as f64);
            }
            // multiply by k!
            for j in 1..=k {
                w *= j as f64;
            }
            out.push((ra + rb - k, sa + sb - k, w));
        }
        out
    }
}

fn mul_monomials(
    a: &OscMonomial,
    b: &OscMonomial,
    fams: &FamilySet,
) -> Result<Vec<(OscMonomial, f64)>> {
    // Koszul sign: each odd block of b slides left past every odd block of a
    // living at a strictly later family.
    let mut sign = 1.0f64;
    for &(fb, rb, sb) in b.exps() {
        if OscMonomial::block_parity(&fams.get(fb as usize), rb, sb) == 1 {
            for &(fa, ra, sa) in a.exps() {
                if fa > fb && OscMonomial::block_parity(&fams.get(fa as usize), ra, sa) == 1 {
                    sign = -sign;
                }
            }
        }
    }

    // union of involved families, in canonical order
    let mut famlist: Vec<u16> = a
        .exps()
        .iter()
        .map(|&(f, _, _)| f)
        .chain(b.exps().iter().map(|&(f, _, _)| f))
        .collect();
    famlist.sort_unstable();
    famlist.dedup();

    let lookup = |m: &OscMonomial, f: u16| -> (u32, u32) {
        m.exps()
            .iter()
            .find(|&&(g, _, _)| g == f)
            .map(|&(_, r, s)| (r, s))
            .unwrap_or((0, 0))
    };

    // cartesian product of the per-family expansions
    let mut partial: Vec<(Vec<(u16, u32, u32)>, f64)> = vec![(Vec::new(), sign)];
    for &f in &famlist {
        let fam = fams.get(f as usize);
        let (ra, sa) = lookup(a, f);
        let (rb, sb) = lookup(b, f);
        let options = merge_family(&fam, ra, sa, rb, sb);
        if options.is_empty() {
            return Ok(vec![]);
        }
        let mut next = Vec::with_capacity(partial.len() * options.len());
        for (exps, w) in &partial {
            for &(r, s, ow) in &options {
                if r > EXPONENT_CAP || s > EXPONENT_CAP {
                    return Err(Error::DegreeCap {
                        family: f as usize,
                        exponent: r.max(s),
                        cap: EXPONENT_CAP,
                    });
                }
                let mut e = exps.clone();
                if r > 0 || s > 0 {
                    e.push((f, r, s));
                }
                next.push((e, w * ow));
            }
        }
        partial = next;
    }

    Ok(partial
        .into_iter()
        .map(|(exps, w)| (OscMonomial { exps }, w))
        .collect())
}
