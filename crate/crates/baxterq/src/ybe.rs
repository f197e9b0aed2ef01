//! Graded Yang-Baxter verification and the fusion factorization of products
//! of Lax operators over disjoint subsets.

use crate::aux::{AuxAlgebra, AuxElement, OpMatrix};
use crate::error::{Error, Result};
use crate::fock::FockSpace;
use crate::grading::GradingSignature;
use crate::lax::{lax_canonical, lax_entries_raw, Subset};
use crate::linalg::{c, C64, C_ONE, C_ZERO};
use crate::module::{ModuleSpec, RealizedModule};
use crate::osc::{FamilySet, OscElement, OscMonomial};
use crate::quantum::r_matrix;

/// Product with the first factor on quantum copy 1 and the second on copy 2
/// but multiplied in the opposite auxiliary order:
/// entries (-1)^{(p(u)+p(v)) p(t)} Y_{uv} X_{st} at ((s,u),(t,v)).
fn kron_reversed(x: &OpMatrix, y: &OpMatrix) -> Result<OpMatrix> {
    let sig = x.space.sig;
    let mut out = OpMatrix::zeros(sig, x.space.sites + y.space.sites, x.alg.clone());
    let (dx, dy) = (x.dim(), y.dim());
    for s in 0..dx {
        for t in 0..dx {
            let xe = x.at(s, t);
            if xe.is_zero() {
                continue;
            }
            let pt = x.space.state_parity(t);
            for u in 0..dy {
                for v in 0..dy {
                    let ye = y.at(u, v);
                    if ye.is_zero() {
                        continue;
                    }
                    let py = y.space.state_parity(u) ^ y.space.state_parity(v);
                    let sign = if py & pt == 1 { -C_ONE } else { C_ONE };
                    *out.at_mut(s * dy + u, t * dy + v) = ye.mul(xe, &x.alg)?.scale(sign);
                }
            }
        }
    }
    Ok(out)
}

/// Residual of R(z1 - z2) L(z1) L(z2) = L(z2) L(z1) R(z1 - z2) for two
/// single-site operator matrices over a shared auxiliary algebra. The returned
/// value is the largest canonical-form coefficient of the difference, so the
/// check is exact up to floating-point arithmetic.
pub fn ybe_residual(l_z1: &OpMatrix, l_z2: &OpMatrix, z1: C64, z2: C64) -> Result<f64> {
    let sig = l_z1.space.sig;
    let r = OpMatrix::from_scalar(&r_matrix(sig, z1 - z2), l_z1.alg.clone());
    let lhs = r.mul(&l_z1.kron(l_z2)?)?;
    let rhs = kron_reversed(l_z1, l_z2)?.mul(&r)?;
    Ok(lhs.sub(&rhs).max_coeff())
}

/// Yang-Baxter residual for the canonical Lax operator of a subset.
pub fn check_ybe(
    sig: GradingSignature,
    subset: &Subset,
    module: &ModuleSpec,
    z1: C64,
    z2: C64,
) -> Result<f64> {
    let l1 = lax_canonical(sig, subset, module, z1)?;
    let l2 = lax_canonical(sig, subset, module, z2)?;
    ybe_residual(&l1.matrix, &l2.matrix, z1, z2)
}

/// Tagged two-copy context for products L^[1]_I L^[2]_J: copy 1 carries the
/// families of I, copy 2 those of J.
pub(crate) fn two_copy_algebra(
    sig: GradingSignature,
    i_set: &Subset,
    j_set: &Subset,
) -> AuxAlgebra {
    let f1 = FamilySet::for_subset(sig, i_set.labels(), 1);
    let f2 = FamilySet::for_subset(sig, j_set.labels(), 2);
    AuxAlgebra::oscillators_only(FamilySet::union(&f1, &f2))
}

fn creator(alg: &AuxAlgebra, copy: u8, row: usize, col: usize) -> Result<AuxElement> {
    let f = alg
        .fams
        .index_of(copy, row, col)
        .ok_or_else(|| Error::ConstructionBug("missing oscillator family".into()))?;
    Ok(AuxElement::from_term(
        OscMonomial::creator(f as u16),
        crate::module::ModPart::Scalar(C_ONE),
    ))
}

fn annihilator(alg: &AuxAlgebra, copy: u8, row: usize, col: usize) -> Result<AuxElement> {
    let f = alg
        .fams
        .index_of(copy, row, col)
        .ok_or_else(|| Error::ConstructionBug("missing oscillator family".into()))?;
    Ok(AuxElement::from_term(
        OscMonomial::annihilator(f as u16),
        crate::module::ModPart::Scalar(C_ONE),
    ))
}

/// Induced gl(I u J) generators realized on the copy-1 oscillators with
/// column indices inside J (plus the weight lambda), as produced by fusing
/// two singlet-module Lax operators over disjoint subsets.
pub fn induced_generators(
    sig: GradingSignature,
    i_set: &Subset,
    j_set: &Subset,
    lambda: f64,
    alg: &AuxAlgebra,
) -> Result<Vec<Vec<AuxElement>>> {
    let d = sig.dim();
    let mut gens = vec![vec![AuxElement::zero(); d]; d];
    let lam = c(lambda, 0.0);
    for a in 0..d {
        for b in 0..d {
            let in_a_i = i_set.contains(a);
            let in_b_i = i_set.contains(b);
            let in_a_j = j_set.contains(a);
            let in_b_j = j_set.contains(b);
            let e = &mut gens[a][b];
            if in_a_i && in_b_i {
                // E_AB = sum_{C in J} dag[1]_{A C} ann[1]_{C B}
                let mut acc = AuxElement::zero();
                for &cj in j_set.labels() {
                    acc = acc.add(
                        &creator(alg, 1, a, cj)?.mul(&annihilator(alg, 1, b, cj)?, alg)?,
                    );
                }
                *e = acc;
            } else if in_a_i && in_b_j {
                // E_{A Bdot} = (-1)^p(Bdot) lambda dag_{A Bdot}
                //   - (-1)^{(Bdot+Ddot)(Bdot+C)} dag_{A Ddot} dag_{C Bdot} ann_{Ddot C}
                let mut acc = creator(alg, 1, a, b)?.scale(lam * c(sig.sign(b), 0.0));
                for &dd in j_set.labels() {
                    for &cc in i_set.labels() {
                        let s = (sig.parity(b) ^ sig.parity(dd)) & (sig.parity(b) ^ sig.parity(cc));
                        let sgn = if s == 1 { -C_ONE } else { C_ONE };
                        let term = creator(alg, 1, a, dd)?
                            .mul(&creator(alg, 1, cc, b)?, alg)?
                            .mul(&annihilator(alg, 1, cc, dd)?, alg)?;
                        acc = acc.sub(&term.scale(sgn));
                    }
                }
                *e = acc;
            } else if in_a_j && in_b_i {
                *e = annihilator(alg, 1, b, a)?;
            } else if in_a_j && in_b_j {
                // E_{Adot Bdot} = lambda (-1)^p(Bdot) d_AB
                //   - (-1)^{(Adot+Bdot)(Bdot+C)} dag_{C Bdot} ann_{Adot... }
                let mut acc = if a == b {
                    AuxElement::scalar(lam * c(sig.sign(b), 0.0))
                } else {
                    AuxElement::zero()
                };
                for &cc in i_set.labels() {
                    let s = (sig.parity(a) ^ sig.parity(b)) & (sig.parity(b) ^ sig.parity(cc));
                    let sgn = if s == 1 { -C_ONE } else { C_ONE };
                    let term =
                        creator(alg, 1, cc, b)?.mul(&annihilator(alg, 1, cc, a)?, alg)?;
                    acc = acc.sub(&term.scale(sgn));
                }
                *e = acc;
            }
        }
    }
    Ok(gens)
}

/// Residual of the gl(I u J) supercommutation relations for the induced
/// generators, evaluated symbolically in canonical form.
pub fn induced_generator_relations_residual(
    sig: GradingSignature,
    i_set: &Subset,
    j_set: &Subset,
    lambda: f64,
) -> Result<f64> {
    let alg = two_copy_algebra(sig, i_set, j_set);
    let gens = induced_generators(sig, i_set, j_set, lambda, &alg)?;
    let union = i_set.union(j_set);
    let mut worst = 0.0f64;
    for &a in union.labels() {
        for &b in union.labels() {
            for &cc in union.labels() {
                for &d in union.labels() {
                    let pab = sig.parity(a) ^ sig.parity(b);
                    let pcd = sig.parity(cc) ^ sig.parity(d);
                    let sgn = if pab & pcd == 1 { -C_ONE } else { C_ONE };
                    let lhs = gens[a][b]
                        .mul(&gens[cc][d], &alg)?
                        .sub(&gens[cc][d].mul(&gens[a][b], &alg)?.scale(sgn));
                    let mut rhs = AuxElement::zero();
                    if cc == b {
                        rhs = rhs.add(&gens[a][d]);
                    }
                    if a == d {
                        rhs = rhs.sub(&gens[cc][b].scale(sgn));
                    }
                    worst = worst.max(lhs.sub(&rhs).max_coeff());
                }
            }
        }
    }
    Ok(worst)
}

/// Windowed check of the factorization
/// L^[1]_I(z + s_J) L^[2]_J(z - lambda - s_I) = S L_{I u J}(z) G S^{-1},
/// where s_K = (1/2) sum_{D in K} (-1)^p(D), the induced generators realize
/// gl(I u J) on the copy-1 oscillators, S is the creation-bilinear similarity
/// and G the upper-triangular annihilator dressing. Matrix elements are
/// compared only between states whose total occupancy keeps every
/// contribution inside the truncation, so the comparison is exact there.
pub fn verify_factorization(
    sig: GradingSignature,
    i_set: &Subset,
    j_set: &Subset,
    z: C64,
    lambda: f64,
    window_cutoff: usize,
) -> Result<f64> {
    if i_set.labels().iter().any(|a| j_set.contains(*a)) {
        return Err(Error::InvalidArgument(
            "factorization needs disjoint subsets".into(),
        ));
    }
    let d = sig.dim();
    let alg = two_copy_algebra(sig, i_set, j_set);
    let union = i_set.union(j_set);
    let rest = union.complement(sig);

    // shifted spectral arguments
    let s_j: f64 = 0.5 * j_set.labels().iter().map(|&x| sig.sign(x)).sum::<f64>();
    let s_i: f64 = 0.5 * i_set.labels().iter().map(|&x| sig.sign(x)).sum::<f64>();
    let z1 = z + c(s_j, 0.0);
    let z2 = z - c(lambda, 0.0) - c(s_i, 0.0);

    let trivial = RealizedModule::Trivial;
    let l1 = lax_entries_raw(sig, i_set, &trivial, z1, &alg, 1)?;
    let l2 = lax_entries_raw(sig, j_set, &trivial, z2, &alg, 2)?;

    // left side: plain matrix product, entries multiplied as algebra elements
    let mut lhs = vec![AuxElement::zero(); d * d];
    for a in 0..d {
        for b in 0..d {
            let mut acc = AuxElement::zero();
            for k in 0..d {
                acc = acc.add(&l1[a * d + k].mul(&l2[k * d + b], &alg)?);
            }
            lhs[a * d + b] = acc;
        }
    }

    // right side before dressing: canonical Lax of the union with the induced
    // generators; its own oscillators are the copy-1 families with columns
    // outside I u J for rows in I, and the copy-2 ones for rows in J.
    let gens = induced_generators(sig, i_set, j_set, lambda, &alg)?;
    let mut core = vec![AuxElement::zero(); d * d];
    for a in 0..d {
        for b in 0..d {
            let e = &mut core[a * d + b];
            match (union.contains(a), union.contains(b)) {
                (true, true) => {
                    let mut acc = AuxElement::zero();
                    if a == b {
                        acc = acc.add(&AuxElement::scalar(z));
                    }
                    let sgn_b = c(-sig.sign(b), 0.0);
                    acc = acc.add(&gens[a][b].scale(sgn_b));
                    for &x in rest.labels() {
                        let copy_a = if i_set.contains(a) { 1 } else { 2 };
                        let copy_b = if i_set.contains(b) { 1 } else { 2 };
                        let hop = creator(&alg, copy_a, a, x)?
                            .mul(&annihilator(&alg, copy_b, b, x)?, &alg)?;
                        acc = acc.add(&hop.scale(sgn_b));
                        if a == b {
                            let shift = 0.5 * sig.sign(a) * sig.sign(x);
                            acc = acc.add(&AuxElement::scalar(sgn_b * c(shift, 0.0)));
                        }
                    }
                    *e = acc;
                }
                (true, false) => {
                    let copy = if i_set.contains(a) { 1 } else { 2 };
                    *e = creator(&alg, copy, a, b)?;
                }
                (false, true) => {
                    let copy = if i_set.contains(b) { 1 } else { 2 };
                    *e = annihilator(&alg, copy, b, a)?.scale(c(-sig.sign(b), 0.0));
                }
                (false, false) => {
                    if a == b {
                        *e = AuxElement::scalar(C_ONE);
                    }
                }
            }
        }
    }

    // G: identity plus the decoupled copy-2 annihilators in the (I, J) block
    let mut g = vec![AuxElement::zero(); d * d];
    for a in 0..d {
        g[a * d + a] = AuxElement::scalar(C_ONE);
    }
    for &a in i_set.labels() {
        for &b in j_set.labels() {
            g[a * d + b] = annihilator(&alg, 2, b, a)?.scale(c(-sig.sign(b), 0.0));
        }
    }

    // core * G as a plain matrix product
    let mut core_g = vec![AuxElement::zero(); d * d];
    for a in 0..d {
        for b in 0..d {
            let mut acc = AuxElement::zero();
            for k in 0..d {
                acc = acc.add(&core[a * d + k].mul(&g[k * d + b], &alg)?);
            }
            core_g[a * d + b] = acc;
        }
    }

    // similarity generator: sum_{A in I, B in J} dag[1]_{A B} ( (-1)^p(A)
    // dag[2]_{B A} + sum_{C in rest} dag[2]_{B C} ann[1]_{C A} )
    let mut s_gen = AuxElement::zero();
    for &a in i_set.labels() {
        for &b in j_set.labels() {
            let mut inner = creator(&alg, 2, b, a)?.scale(c(sig.sign(a), 0.0));
            for &cr in rest.labels() {
                inner = inner.add(&creator(&alg, 2, b, cr)?.mul(&annihilator(&alg, 1, a, cr)?, &alg)?);
            }
            s_gen = s_gen.add(&creator(&alg, 1, a, b)?.mul(&inner, &alg)?);
        }
    }

    // separate the two kinds of osc content for trace/window purposes: the
    // elements are compared in explicit representations
    let space = FockSpace::new(alg.fams.clone(), window_cutoff);
    let window = window_cutoff.saturating_sub(6) / 3;
    let series_order = window + 2;

    let to_osc = |e: &AuxElement| -> OscElement {
        let mut acc = OscElement::zero();
        for t in e.terms() {
            if let crate::module::ModPart::Scalar(v) = &t.md {
                acc = acc.add(&OscElement::monomial(t.osc.clone(), *v));
            }
        }
        acc
    };
    let s_osc = to_osc(&s_gen);

    let mut worst = 0.0f64;
    let window_states: Vec<usize> = (0..space.dim())
        .filter(|&i| space.total_occupancy(i) <= window)
        .collect();

    for a in 0..d {
        for b in 0..d {
            let lhs_e = to_osc(&lhs[a * d + b]);
            let rhs_e = to_osc(&core_g[a * d + b]);
            for &col in &window_states {
                let mut v = vec![C_ZERO; space.dim()];
                v[col] = C_ONE;
                let lv = space.apply_element(&lhs_e, &v);
                // S (core G) S^{-1} |col>
                let w = space.apply_exp_series(&s_osc, -1.0, series_order, &v);
                let w = space.apply_element(&rhs_e, &w);
                let rv = space.apply_exp_series(&s_osc, 1.0, series_order, &w);
                for &row in &window_states {
                    worst = worst.max((lv[row] - rv[row]).norm());
                }
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lax::Subset;

    fn subsets(sig: GradingSignature) -> Vec<Subset> {
        (0..(1u32 << sig.dim()))
            .map(|mask| Subset::from_mask(sig, mask))
            .collect()
    }

    #[test]
    fn ybe_exact_for_gl11_first_label() {
        let sig = GradingSignature::new(1, 1).unwrap();
        let subset = Subset::new(sig, &[0]).unwrap();
        let res = check_ybe(sig, &subset, &ModuleSpec::Singlet, c(0.3, 0.0), c(-0.8, 0.0))
            .unwrap();
        assert!(res < 1e-12, "YBE residual {res}");
    }

    #[test]
    fn ybe_exact_for_all_gl21_subsets() {
        let sig = GradingSignature::new(2, 1).unwrap();
        for subset in subsets(sig) {
            let res = check_ybe(
                sig,
                &subset,
                &ModuleSpec::Singlet,
                c(0.3, 0.21),
                c(-0.8, 0.4),
            )
            .unwrap();
            assert!(res < 1e-12, "subset {} residual {res}", subset.display());
        }
    }

    #[test]
    fn ybe_holds_for_every_small_signature() {
        // all subsets of every signature with n + m <= 3; this is the
        // operational statement that all 2^(n+m) degenerate solutions exist
        for (n, m) in [(1, 0), (0, 1), (2, 0), (0, 2), (1, 1), (3, 0), (0, 3), (2, 1), (1, 2)] {
            let sig = GradingSignature::new(n, m).unwrap();
            for subset in subsets(sig) {
                for (z1, z2) in [(c(0.41, 0.12), c(-0.73, 0.6)), (c(-1.1, -0.2), c(0.35, 0.9))] {
                    let res = check_ybe(sig, &subset, &ModuleSpec::Singlet, z1, z2).unwrap();
                    assert!(
                        res < 1e-11,
                        "gl({n}|{m}) subset {}: residual {res}",
                        subset.display()
                    );
                }
            }
        }
    }

    #[test]
    fn ybe_trivial_for_empty_set() {
        let sig = GradingSignature::new(1, 2).unwrap();
        let res = check_ybe(
            sig,
            &Subset::empty(),
            &ModuleSpec::Singlet,
            c(0.2, 0.0),
            c(0.7, 0.0),
        )
        .unwrap();
        assert_eq!(res, 0.0);
    }

    #[test]
    fn ybe_detects_perturbation() {
        let sig = GradingSignature::new(2, 1).unwrap();
        let subset = Subset::new(sig, &[0]).unwrap();
        let (z1, z2) = (c(0.3, 0.0), c(-0.8, 0.0));
        let l1 = lax_canonical(sig, &subset, &ModuleSpec::Singlet, z1).unwrap();
        let mut l1p = l1.matrix.clone();
        let bumped = l1p.at(0, 0).add(&AuxElement::scalar(c(1e-3, 0.0)));
        *l1p.at_mut(0, 0) = bumped;
        let l2 = lax_canonical(sig, &subset, &ModuleSpec::Singlet, z2).unwrap();
        let res = ybe_residual(&l1p, &l2.matrix, z1, z2).unwrap();
        assert!(res >= 1e-4, "detector too dull: {res}");
    }

    #[test]
    fn ybe_with_fundamental_module() {
        let sig = GradingSignature::new(1, 1).unwrap();
        let res = check_ybe(
            sig,
            &Subset::full(sig),
            &ModuleSpec::Fundamental,
            c(1.0, 0.0),
            c(-0.4, 0.3),
        )
        .unwrap();
        assert!(res < 1e-12, "fundamental YBE residual {res}");
    }

    #[test]
    fn ybe_with_verma_chain_module() {
        let sig = GradingSignature::new(2, 0).unwrap();
        let res = check_ybe(
            sig,
            &Subset::full(sig),
            &ModuleSpec::Verma(vec![0.7, -0.4]),
            c(0.5, 0.1),
            c(-0.2, 0.8),
        )
        .unwrap();
        assert!(res < 1e-11, "verma YBE residual {res}");
    }
}

#[cfg(test)]
mod factorization_tests {
    use super::*;
    use crate::lax::Subset;

    #[test]
    fn gl11_factorization_is_exact() {
        // all-fermionic oscillator content: the similarity series terminates
        let sig = GradingSignature::new(1, 1).unwrap();
        let i_set = Subset::new(sig, &[0]).unwrap();
        let j_set = Subset::new(sig, &[1]).unwrap();
        for lambda in [0.0, 0.7] {
            let res =
                verify_factorization(sig, &i_set, &j_set, c(0.37, 0.18), lambda, 24).unwrap();
            assert!(res < 1e-12, "lambda {lambda}: residual {res}");
        }
    }

    #[test]
    fn gl20_factorization_windowed() {
        let sig = GradingSignature::new(2, 0).unwrap();
        let i_set = Subset::new(sig, &[0]).unwrap();
        let j_set = Subset::new(sig, &[1]).unwrap();
        for lambda in [0.0, 0.7] {
            let res =
                verify_factorization(sig, &i_set, &j_set, c(0.21, -0.4), lambda, 24).unwrap();
            assert!(res < 1e-10, "lambda {lambda}: residual {res}");
        }
    }

    #[test]
    fn gl21_factorization_windowed() {
        let sig = GradingSignature::new(2, 1).unwrap();
        let i_set = Subset::new(sig, &[0]).unwrap();
        let j_set = Subset::new(sig, &[2]).unwrap();
        let res = verify_factorization(sig, &i_set, &j_set, c(0.31, 0.11), 0.0, 14).unwrap();
        assert!(res < 1e-10, "residual {res}");
    }

    #[test]
    fn overlapping_subsets_rejected() {
        let sig = GradingSignature::new(2, 1).unwrap();
        let i_set = Subset::new(sig, &[0, 1]).unwrap();
        let j_set = Subset::new(sig, &[1]).unwrap();
        assert!(verify_factorization(sig, &i_set, &j_set, C_ZERO, 0.0, 10).is_err());
    }

    #[test]
    fn induced_generators_close_the_superalgebra() {
        let sig = GradingSignature::new(2, 1).unwrap();
        for (i_labels, j_labels) in [(vec![0], vec![2]), (vec![0], vec![1]), (vec![1], vec![2])] {
            let i_set = Subset::new(sig, &i_labels).unwrap();
            let j_set = Subset::new(sig, &j_labels).unwrap();
            for lambda in [0.0, 0.7] {
                let res =
                    induced_generator_relations_residual(sig, &i_set, &j_set, lambda).unwrap();
                assert!(
                    res < 1e-12,
                    "I={i_labels:?} J={j_labels:?} lambda {lambda}: residual {res}"
                );
            }
        }
    }
}
