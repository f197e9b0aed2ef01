//! Functional relations among the transfer operators, verified as matrix
//! identities on the quantum space.
//!
//! Each plaquette (I, I u {a}, I u {b}, I u {a,b}) of the Hasse diagram
//! carries one relation. With s(a,b) = (-1)^p(a) 2i sin((Phi_a - Phi_b)/2):
//!
//! same parity of a, b:
//!   s(a,b) Q_{Iab}(z) Q_I(z)
//!     = Q_{Ia}(z + 1/2) Q_{Ib}(z - 1/2) - Q_{Ia}(z - 1/2) Q_{Ib}(z + 1/2)
//!
//! mixed parity:
//!   s(a,b) Q_{Ia}(z) Q_{Ib}(z)
//!     = Q_{Iab}(z + 1/2) Q_I(z - 1/2) - Q_{Iab}(z - 1/2) Q_I(z + 1/2)
//!
//! Both orientations of each plaquette are exercised; the signs above are
//! taken literally and validated numerically across all small signatures.

use crate::error::{Error, Result};
use crate::grading::{GradingSignature, TwistConfig};
use crate::hasse::Plaquette;
use crate::lax::Subset;
use crate::linalg::{c, C64, C_ONE};
use crate::module::ModuleSpec;
use crate::quantum::QuantumMatrix;
use crate::transfer::{q_operator, t_operator, x_plus_operator};

fn sine_factor(sig: GradingSignature, twists: &TwistConfig, a: usize, b: usize) -> C64 {
    let s = ((twists.angle(a) - twists.angle(b)) / 2.0).sin();
    c(0.0, 2.0 * s) * c(sig.sign(a), 0.0)
}

/// Residual of the plaquette relation in one orientation, at one z.
fn qq_residual_oriented(
    sig: GradingSignature,
    chain_len: usize,
    twists: &TwistConfig,
    base: &Subset,
    a: usize,
    b: usize,
    z: C64,
    shift: f64,
) -> Result<f64> {
    let ia = base.insert(a);
    let ib = base.insert(b);
    let iab = ia.insert(b);
    let half = c(shift, 0.0);
    let q = |s: &Subset, w: C64| q_operator(sig, s, chain_len, twists, w);
    let pref = sine_factor(sig, twists, a, b);
    let (lhs, rhs): (QuantumMatrix, QuantumMatrix) =
        if sig.parity(a) == sig.parity(b) {
            let lhs = q(&iab, z)?.matrix.mul(&q(base, z)?.matrix).scale(pref);
            let rhs = q(&ia, z + half)?
                .matrix
                .mul(&q(&ib, z - half)?.matrix)
                .sub(&q(&ia, z - half)?.matrix.mul(&q(&ib, z + half)?.matrix));
            (lhs, rhs)
        } else {
            let lhs = q(&ia, z)?.matrix.mul(&q(&ib, z)?.matrix).scale(pref);
            let rhs = q(&iab, z + half)?
                .matrix
                .mul(&q(base, z - half)?.matrix)
                .sub(&q(&iab, z - half)?.matrix.mul(&q(base, z + half)?.matrix));
            (lhs, rhs)
        };
    Ok(lhs.sub(&rhs).mat.max_abs())
}

/// Residual of the relation of one plaquette in a single orientation (a, b),
/// over a list of spectral points.
pub fn verify_qq_oriented(
    sig: GradingSignature,
    chain_len: usize,
    twists: &TwistConfig,
    base: &Subset,
    a: usize,
    b: usize,
    zs: &[C64],
) -> Result<f64> {
    twists.require_pairwise_generic()?;
    let mut worst = 0.0f64;
    for &z in zs {
        worst = worst.max(qq_residual_oriented(sig, chain_len, twists, base, a, b, z, 0.5)?);
    }
    Ok(worst)
}

/// Verifies the relation of one plaquette at a list of spectral points, in
/// both orientations; returns the worst residual.
pub fn verify_qq(
    sig: GradingSignature,
    chain_len: usize,
    twists: &TwistConfig,
    plaquette: &Plaquette,
    zs: &[C64],
) -> Result<f64> {
    twists.require_pairwise_generic()?;
    let mut worst = 0.0f64;
    for &z in zs {
        for (a, b) in [(plaquette.a, plaquette.b), (plaquette.b, plaquette.a)] {
            let r = qq_residual_oriented(sig, chain_len, twists, &plaquette.base, a, b, z, 0.5)?;
            worst = worst.max(r);
        }
    }
    Ok(worst)
}

/// The same relation evaluated with a wrong shift in place of 1/2; used to
/// confirm the verifier actually resolves the shift structure.
pub fn qq_residual_with_shift(
    sig: GradingSignature,
    chain_len: usize,
    twists: &TwistConfig,
    plaquette: &Plaquette,
    z: C64,
    shift: f64,
) -> Result<f64> {
    qq_residual_oriented(
        sig,
        chain_len,
        twists,
        &plaquette.base,
        plaquette.a,
        plaquette.b,
        z,
        shift,
    )
}

/// Block-restricted residual of a plaquette relation on a single occupation
/// sector.
pub fn verify_qq_sector(
    sig: GradingSignature,
    chain_len: usize,
    twists: &TwistConfig,
    plaquette: &Plaquette,
    z: C64,
    sector_states: &[usize],
) -> Result<f64> {
    let (a, b) = (plaquette.a, plaquette.b);
    let base = &plaquette.base;
    let ia = base.insert(a);
    let ib = base.insert(b);
    let iab = ia.insert(b);
    let half = c(0.5, 0.0);
    let q = |s: &Subset, w: C64| -> Result<CMatBlock> {
        Ok(CMatBlock(
            q_operator(sig, s, chain_len, twists, w)?
                .matrix
                .mat
                .submatrix(sector_states),
        ))
    };
    let pref = sine_factor(sig, twists, a, b);
    let (lhs, rhs) = if sig.parity(a) == sig.parity(b) {
        (
            q(&iab, z)?.0.mul(&q(base, z)?.0).scale(pref),
            q(&ia, z + half)?
                .0
                .mul(&q(&ib, z - half)?.0)
                .sub(&q(&ia, z - half)?.0.mul(&q(&ib, z + half)?.0)),
        )
    } else {
        (
            q(&ia, z)?.0.mul(&q(&ib, z)?.0).scale(pref),
            q(&iab, z + half)?
                .0
                .mul(&q(base, z - half)?.0)
                .sub(&q(&iab, z - half)?.0.mul(&q(base, z + half)?.0)),
        )
    };
    Ok(lhs.sub(&rhs).max_abs())
}

struct CMatBlock(crate::linalg::CMat);

/// The gl(1|1) relations tying X+ to products of Q-operators:
///   X+(z, (eps + 1/2, 1/2 - eps)) = 2i sin((Phi_1 - Phi_2)/2) Q_1(z+eps) Q_2(z-eps)
/// and the eps = 0 degeneration
///   X+_0(z) = T_singlet(z + 1/2) - T_singlet(z - 1/2).
/// z-pairs are supplied as (z1, z2) with eps = (z1 - z2)/2, z = (z1 + z2)/2.
pub fn verify_tqq_gl11(
    chain_len: usize,
    twists: &TwistConfig,
    z_pairs: &[(C64, C64)],
) -> Result<f64> {
    let sig = GradingSignature::new(1, 1).expect("gl(1|1)");
    twists.require_pairwise_generic()?;
    let full = Subset::full(sig);
    let s1 = Subset::new(sig, &[0])?;
    let s2 = Subset::new(sig, &[1])?;
    let mut worst = 0.0f64;
    for &(z1, z2) in z_pairs {
        let eps = (z1 - z2) / 2.0;
        let z = (z1 + z2) / 2.0;
        if eps.im.abs() > 1e-12 {
            return Err(Error::InvalidArgument(
                "module weights are real: take z1 - z2 real".into(),
            ));
        }
        let lambda = [eps.re + 0.5, 0.5 - eps.re];
        let t_plus = x_plus_operator(sig, &full, &lambda, chain_len, twists, z)?;
        let qq = q_operator(sig, &s1, chain_len, twists, z1)?
            .matrix
            .mul(&q_operator(sig, &s2, chain_len, twists, z2)?.matrix);
        let pref = c(0.0, 2.0 * ((twists.angle(0) - twists.angle(1)) / 2.0).sin());
        worst = worst.max(t_plus.matrix.sub(&qq.scale(pref)).mat.max_abs());
    }
    // eps = 0 split against the singlet transfer operator
    for &(z1, z2) in z_pairs {
        let z = (z1 + z2) / 2.0;
        let t0 = x_plus_operator(sig, &full, &[0.5, 0.5], chain_len, twists, z)?;
        let h = c(0.5, 0.0);
        let tp = t_operator(sig, &ModuleSpec::Singlet, chain_len, twists, z + h)?;
        let tm = t_operator(sig, &ModuleSpec::Singlet, chain_len, twists, z - h)?;
        let split = tp.matrix.sub(&tm.matrix);
        worst = worst.max(t0.matrix.sub(&split).mat.max_abs());
    }
    Ok(worst)
}

/// Super-Vandermonde prefactor of the X+ factorization:
/// products of 2i sin((Phi_a - Phi_b)/2) over same-parity pairs of I divided
/// by the product over mixed pairs.
pub fn super_vandermonde(sig: GradingSignature, subset: &Subset, twists: &TwistConfig) -> C64 {
    let bs = subset.bosonic_members(sig);
    let fs = subset.fermionic_members(sig);
    let sin2i = |a: usize, b: usize| {
        c(
            0.0,
            2.0 * ((twists.angle(a) - twists.angle(b)) / 2.0).sin(),
        )
    };
    let mut num = C_ONE;
    for i in 0..bs.len() {
        for j in (i + 1)..bs.len() {
            num *= sin2i(bs[i], bs[j]);
        }
    }
    for i in 0..fs.len() {
        for j in (i + 1)..fs.len() {
            num *= sin2i(fs[i], fs[j]);
        }
    }
    let mut den = C_ONE;
    for &i in &bs {
        for &j in &fs {
            den *= sin2i(i, j);
        }
    }
    num / den
}

/// Weight shifts rho_k = (1/2) ( sum_{j > k} (-1)^p_j - sum_{j < k} (-1)^p_j )
/// over positions of the sorted subset.
pub fn weight_shifts(sig: GradingSignature, subset: &Subset) -> Vec<f64> {
    let labels = subset.labels();
    (0..labels.len())
        .map(|k| {
            let after: f64 = labels[k + 1..].iter().map(|&a| sig.sign(a)).sum();
            let before: f64 = labels[..k].iter().map(|&a| sig.sign(a)).sum();
            0.5 * (after - before)
        })
        .collect()
}

/// Residual of the factorization of X+ into shifted Q-operators:
/// Delta_I(Phi) X+(z, Lambda) = prod_k Q_{A_k}(z + lambda_k + rho_k).
pub fn verify_xqqq(
    sig: GradingSignature,
    subset: &Subset,
    lambda: &[f64],
    chain_len: usize,
    twists: &TwistConfig,
    z: C64,
) -> Result<f64> {
    if subset.len() > 2 {
        return Err(Error::Unsupported("X+ factorization built for |I| <= 2".into()));
    }
    if lambda.len() != subset.len() {
        return Err(Error::InvalidArgument(
            "one weight per subset member".into(),
        ));
    }
    twists.require_pairwise_generic()?;
    let delta = super_vandermonde(sig, subset, twists);
    let x = x_plus_operator(sig, subset, lambda, chain_len, twists, z)?;
    let rho = weight_shifts(sig, subset);
    let mut rhs = QuantumMatrix::identity(sig, chain_len);
    for (k, &a) in subset.labels().iter().enumerate() {
        let single = Subset::new(sig, &[a])?;
        let qk = q_operator(
            sig,
            &single,
            chain_len,
            twists,
            z + c(lambda[k] + rho[k], 0.0),
        )?;
        rhs = rhs.mul(&qk.matrix);
    }
    Ok(x.matrix.scale(delta).sub(&rhs).mat.max_abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hasse::build_hasse;
    use crate::quantum::StateSpace;

    fn zs() -> Vec<C64> {
        vec![
            c(0.37, 0.22),
            c(-0.81, 0.45),
            c(1.12, -0.3),
            c(0.05, 0.9),
            c(-0.44, -0.61),
        ]
    }

    #[test]
    fn gl11_square_plaquette() {
        let sig = GradingSignature::new(1, 1).unwrap();
        let tw = TwistConfig::generic(sig);
        let d = build_hasse(sig);
        let res = verify_qq(sig, 3, &tw, &d.plaquettes[0], &zs()).unwrap();
        assert!(res < 1e-9, "residual {res:.3e}");
    }

    #[test]
    fn gl20_bosonic_plaquette() {
        let sig = GradingSignature::new(2, 0).unwrap();
        let tw = TwistConfig::generic(sig);
        let d = build_hasse(sig);
        let res = verify_qq(sig, 3, &tw, &d.plaquettes[0], &zs()).unwrap();
        assert!(res < 1e-9, "residual {res:.3e}");
    }

    #[test]
    fn gl02_fermionic_plaquette() {
        let sig = GradingSignature::new(0, 2).unwrap();
        let tw = TwistConfig::generic(sig);
        let d = build_hasse(sig);
        let res = verify_qq(sig, 2, &tw, &d.plaquettes[0], &zs()).unwrap();
        assert!(res < 1e-9, "residual {res:.3e}");
    }

    #[test]
    fn all_gl21_plaquettes_both_orientations() {
        let sig = GradingSignature::new(2, 1).unwrap();
        let tw = TwistConfig::generic(sig);
        let d = build_hasse(sig);
        assert_eq!(d.plaquettes.len(), 6);
        for p in &d.plaquettes {
            let res = verify_qq(sig, 2, &tw, p, &zs()[..3]).unwrap();
            assert!(
                res < 1e-9,
                "plaquette base {} + ({},{}): residual {res:.3e}",
                p.base.display(),
                p.a + 1,
                p.b + 1
            );
        }
    }

    #[test]
    fn wrong_shift_is_detected() {
        let sig = GradingSignature::new(1, 1).unwrap();
        let tw = TwistConfig::generic(sig);
        let d = build_hasse(sig);
        let good = qq_residual_with_shift(sig, 3, &tw, &d.plaquettes[0], c(0.4, 0.2), 0.5).unwrap();
        let bad = qq_residual_with_shift(sig, 3, &tw, &d.plaquettes[0], c(0.4, 0.2), 0.4).unwrap();
        assert!(good < 1e-10);
        assert!(bad >= 1e-3, "shift detector too dull: {bad:.3e}");
    }

    #[test]
    fn plaquette_relations_hold_sector_by_sector() {
        let sig = GradingSignature::new(1, 1).unwrap();
        let tw = TwistConfig::generic(sig);
        let d = build_hasse(sig);
        let space = StateSpace::new(sig, 3);
        for (occ, states) in space.sectors() {
            let res =
                verify_qq_sector(sig, 3, &tw, &d.plaquettes[0], c(0.3, 0.6), &states).unwrap();
            assert!(res < 1e-9, "sector {occ:?}: residual {res:.3e}");
        }
    }

    #[test]
    fn tqq_relation_gl11() {
        let tw = TwistConfig::generic(GradingSignature::new(1, 1).unwrap());
        let pairs = [
            (c(0.31, 0.2), c(-0.45, 0.2)),
            (c(1.02, -0.4), c(0.3, -0.4)),
            (c(-0.2, 0.75), c(0.44, 0.75)),
            (c(0.8, 0.0), c(-0.9, 0.0)),
        ];
        for l in 1..=2 {
            let res = verify_tqq_gl11(l, &tw, &pairs).unwrap();
            assert!(res < 1e-10, "L={l}: residual {res:.3e}");
        }
    }

    #[test]
    fn xqqq_single_label_consistency() {
        let sig = GradingSignature::new(2, 1).unwrap();
        let tw = TwistConfig::generic(sig);
        for label in sig.labels() {
            let subset = Subset::new(sig, &[label]).unwrap();
            let res = verify_xqqq(sig, &subset, &[0.7], 2, &tw, c(0.4, -0.2)).unwrap();
            assert!(res < 1e-11, "label {}: residual {res:.3e}", label + 1);
        }
    }

    #[test]
    fn xqqq_gl11_pair() {
        let sig = GradingSignature::new(1, 1).unwrap();
        let tw = TwistConfig::generic(sig);
        let subset = Subset::full(sig);
        for lambda in [[0.0, 0.0], [0.9, -0.35]] {
            let res = verify_xqqq(sig, &subset, &lambda, 2, &tw, c(0.52, 0.31)).unwrap();
            assert!(res < 1e-10, "lambda {lambda:?}: residual {res:.3e}");
        }
    }

    #[test]
    fn xqqq_gl21_pairs() {
        let sig = GradingSignature::new(2, 1).unwrap();
        let tw = TwistConfig::generic(sig);
        for labels in [vec![0usize, 1], vec![0, 2], vec![1, 2]] {
            let subset = Subset::new(sig, &labels).unwrap();
            let res = verify_xqqq(sig, &subset, &[0.4, -1.1], 2, &tw, c(0.61, 0.27)).unwrap();
            assert!(
                res < 1e-8,
                "subset {}: residual {res:.3e}",
                subset.display()
            );
        }
    }

    #[test]
    fn gl20_verma_split_into_finite_plus_shifted_verma() {
        // For Lambda = (j, -j) with 2j + 1 a positive integer, the chain trace
        // splits as the (2j+1)-dimensional module plus the chain with
        // reflected weights (-j-1, j+1); check j = 1/2 against the explicit
        // two-dimensional quotient at L = 1.
        let sig = GradingSignature::new(2, 0).unwrap();
        let tw = TwistConfig::generic(sig);
        let full = Subset::full(sig);
        let z = c(0.37, 0.81);
        let j = 0.5;
        let xj = x_plus_operator(sig, &full, &[j, -j], 1, &tw, z).unwrap();
        let xr = x_plus_operator(sig, &full, &[-j - 1.0, j + 1.0], 1, &tw, z).unwrap();
        // quotient module: E_11 = diag(-1/2, 1/2), E_22 = diag(1/2, -1/2),
        // raising/lowering with coefficient 1 (weights descend from -lambda)
        let mut gens = std::collections::BTreeMap::new();
        let mk = |entries: [[f64; 2]; 2]| {
            crate::linalg::CMat::from_fn(2, 2, |i, jj| c(entries[i][jj], 0.0))
        };
        gens.insert((0usize, 0usize), mk([[-0.5, 0.0], [0.0, 0.5]]));
        gens.insert((1, 1), mk([[0.5, 0.0], [0.0, -0.5]]));
        gens.insert((0, 1), mk([[0.0, 0.0], [1.0, 0.0]]));
        gens.insert((1, 0), mk([[0.0, 1.0], [0.0, 0.0]]));
        let rep = crate::module::ExplicitRep {
            dim: 2,
            parities: vec![0, 0],
            gens,
        };
        let t = t_operator(sig, &ModuleSpec::Explicit(rep), 1, &tw, z).unwrap();
        let res = xj
            .matrix
            .sub(&xr.matrix)
            .sub(&t.matrix)
            .mat
            .max_abs();
        assert!(res < 1e-11, "split residual {res:.3e}");
    }
}
