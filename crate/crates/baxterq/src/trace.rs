//! Twist-weighted trace functionals over the auxiliary spaces, in closed form.
//!
//! Per oscillator family with twist weight q = e^{-i (Phi_row - Phi_col)} the
//! normalized supertrace of a normal-ordered block (dag^r xi^s) vanishes for
//! r != s and otherwise contributes
//!     bosonic:   r! (q / (1-q))^r
//!     fermionic: (-q / (1-q))^r        (r in {0, 1})
//! with the trace factorizing over families. Weights on the unit circle make
//! naive sums non-convergent, so the closed forms are the production path;
//! `abel_oracle` re-evaluates the same functional by damped summation with
//! extrapolation and exists to check the closed forms, not to replace them.

use crate::error::{Error, Result};
use crate::grading::TwistConfig;
use crate::linalg::{c, cis, C64, C_ONE, C_ZERO};
use crate::osc::{FamilySet, OscElement};
use crate::poly::CPoly;

/// Per-family unit-circle weights for a family set.
#[derive(Debug, Clone)]
pub struct TraceWeights {
    qs: Vec<C64>,
    labels: Vec<(usize, usize)>,
}

impl TraceWeights {
    /// Weights q = e^{-i (Phi_row - Phi_col)}; rejects any family whose twist
    /// combination degenerates to 1.
    pub fn for_families(fams: &FamilySet, twists: &TwistConfig) -> Result<Self> {
        let mut qs = Vec::with_capacity(fams.len());
        let mut labels = Vec::with_capacity(fams.len());
        for f in fams.families() {
            let q = cis(-(twists.angle(f.row) - twists.angle(f.col)));
            if (q - C_ONE).norm() < 1e-9 {
                return Err(Error::SingularTwist {
                    a: f.row + 1,
                    b: f.col + 1,
                    gap: (q - C_ONE).norm(),
                });
            }
            qs.push(q);
            labels.push((f.row, f.col));
        }
        Ok(Self { qs, labels })
    }

    pub fn q(&self, family: usize) -> C64 {
        self.qs[family]
    }

    pub fn family_labels(&self, family: usize) -> (usize, usize) {
        self.labels[family]
    }
}

fn family_factor(fermionic: bool, q: C64, r: u32, s: u32) -> C64 {
    if r != s {
        return C_ZERO;
    }
    if r == 0 {
        return C_ONE;
    }
    let base = q / (C_ONE - q);
    if fermionic {
        // r = s = 1
        -base
    } else {
        let mut acc = C_ONE;
        for j in 1..=r {
            acc *= base * c(j as f64, 0.0);
        }
        acc
    }
}

/// Normalized supertrace of an element over all its oscillator families.
/// Monomials unbalanced in any family trace to zero, so odd-parity elements
/// vanish automatically.
pub fn family_trace(x: &OscElement, fams: &FamilySet, w: &TraceWeights) -> Result<C64> {
    let mut acc = C_ZERO;
    for (mono, coeff) in x.terms() {
        let mut factor = *coeff;
        for &(f, r, s) in mono.exps() {
            let fam = fams.get(f as usize);
            if r >= 1 && r == s && (w.q(f as usize) - C_ONE).norm() < 1e-9 {
                let (a, b) = w.family_labels(f as usize);
                return Err(Error::SingularTwist {
                    a: a + 1,
                    b: b + 1,
                    gap: (w.q(f as usize) - C_ONE).norm(),
                });
            }
            factor *= family_factor(fam.fermionic, w.q(f as usize), r, s);
            if factor == C_ZERO {
                break;
            }
        }
        acc += factor;
    }
    Ok(acc)
}

/// Closed form of sum_{k >= 0} q^k k^j through falling factorials:
/// sum_k k^(m) q^k = m! q^m / (1-q)^{m+1}.
fn power_sum(q: C64, j: usize) -> C64 {
    // Stirling numbers of the second kind S(j, m)
    let mut stirling = vec![vec![0f64; j + 1]; j + 1];
    stirling[0][0] = 1.0;
    for n in 1..=j {
        for m in 1..=n {
            stirling[n][m] = stirling[n - 1][m - 1] + (m as f64) * stirling[n - 1][m];
        }
    }
    let omq = C_ONE - q;
    let mut acc = C_ZERO;
    for m in 0..=j {
        let s = if j == 0 {
            if m == 0 {
                1.0
            } else {
                0.0
            }
        } else {
            stirling[j][m]
        };
        if s == 0.0 {
            continue;
        }
        let mut term = c(s, 0.0) / omq;
        for i in 1..=m {
            term *= c(i as f64, 0.0) * q / omq;
        }
        acc += term;
    }
    acc
}

/// sum_{k >= 0} q^k P(k) in closed rational form (|q| = 1, q != 1 understood
/// in the Abel-regularized sense).
pub fn chain_sum(q: C64, poly: &CPoly) -> Result<C64> {
    if (q - C_ONE).norm() < 1e-9 {
        return Err(Error::InvalidArgument(
            "chain sum needs a nontrivial twist weight".into(),
        ));
    }
    let mut acc = C_ZERO;
    for (j, &cj) in poly.coeffs().iter().enumerate() {
        acc += cj * power_sum(q, j);
    }
    Ok(acc)
}

/// Ladder-action diagonal element <k| dag^r xi^s |k> in the conventions
/// a^dag |k> = |k+1>, a |k> = k |k-1> (and the two-dimensional fermionic
/// representation). Computed by walking the ladder, not from closed forms.
fn diag_element(fermionic: bool, r: u32, s: u32, k: usize) -> f64 {
    let mut level = k as i64;
    let mut factor = 1.0f64;
    for _ in 0..s {
        if level <= 0 {
            return 0.0;
        }
        if !fermionic {
            factor *= level as f64;
        }
        level -= 1;
    }
    for _ in 0..r {
        if fermionic && level >= 1 {
            return 0.0;
        }
        level += 1;
    }
    if level == k as i64 {
        factor
    } else {
        0.0
    }
}

/// Compensated (Neumaier) accumulator for one real component; the damped sums
/// cancel terms many orders larger than the result, so plain f64 accumulation
/// would leave noise the extrapolation then amplifies.
#[derive(Clone, Copy, Default)]
struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Clone, Copy, Default)]
struct KahanC {
    re: Kahan,
    im: Kahan,
}

impl KahanC {
    fn add(&mut self, z: C64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    fn value(&self) -> C64 {
        c(self.re.value(), self.im.value())
    }
}

/// (q e^{-eps})^k with the phase recomputed exactly every 64 steps so the
/// recurrence drift stays at the last-bit level.
struct DampedPower {
    damp: C64,
    theta: f64,
    eps: f64,
    k: usize,
    cur: C64,
}

impl DampedPower {
    fn new(q: C64, eps: f64) -> Self {
        Self {
            damp: q * c((-eps).exp(), 0.0),
            theta: q.arg(),
            eps,
            k: 0,
            cur: C_ONE,
        }
    }

    fn get(&self) -> C64 {
        self.cur
    }

    fn advance(&mut self) {
        self.k += 1;
        if self.k % 64 == 0 {
            let mag = (-self.eps * self.k as f64).exp();
            let ang = (self.theta * self.k as f64) % (2.0 * std::f64::consts::PI);
            self.cur = c(mag * ang.cos(), mag * ang.sin());
        } else {
            self.cur *= self.damp;
        }
    }
}

fn neville_to_zero(xs: &[f64], ys: &[C64]) -> (C64, C64) {
    let n = xs.len();
    let mut tab = ys.to_vec();
    let mut prev = tab[0];
    for level in 1..n {
        for i in 0..(n - level) {
            let x0 = xs[i];
            let x1 = xs[i + level];
            tab[i] = (tab[i + 1] * c(-x0, 0.0) - tab[i] * c(-x1, 0.0)) / c(x1 - x0, 0.0);
        }
        if level == n - 1 {
            return (tab[0], prev);
        }
        prev = tab[0];
    }
    (tab[0], prev)
}

/// Damped-sum evaluation of the same normalized trace: per family,
/// sum_{k <= cutoff} q^k e^{-eps k} <k| dag^r xi^s |k> over Fock occupancies,
/// normalized by the damped weight sum, at a ladder of damping values
/// descending from `damping`, extrapolated to eps = 0.
pub fn abel_oracle(
    x: &OscElement,
    fams: &FamilySet,
    w: &TraceWeights,
    cutoff: usize,
    damping: f64,
) -> Result<C64> {
    let max_exp = x
        .terms()
        .iter()
        .flat_map(|(m, _)| m.exps().iter().map(|&(_, r, s)| r.max(s)))
        .max()
        .unwrap_or(0) as usize;
    if cutoff < max_exp + 8 {
        return Err(Error::InvalidArgument(format!(
            "cutoff {cutoff} too small for exponent {max_exp}"
        )));
    }
    // Damping floor keeps the truncated tail at the e^{-30} level including
    // the polynomial growth k^r of the summand; the top of the ladder stays
    // well below the scale |1 - q| on which the summand varies, and the
    // levels spread geometrically so the extrapolation to zero does not
    // amplify level noise.
    let floor = (30.0 + max_exp as f64 * (cutoff as f64).ln()) / cutoff as f64;
    let mut min_gap = f64::INFINITY;
    for (mono, _) in x.terms() {
        for &(f, _, _) in mono.exps() {
            min_gap = min_gap.min((w.q(f as usize) - C_ONE).norm());
        }
    }
    if !min_gap.is_finite() {
        min_gap = 2.0;
    }
    let cap = damping.min(0.2 * min_gap);
    if cap < 2.0 * floor {
        return Err(Error::OracleFailure(format!(
            "damping ladder collapsed: cap {cap:.3e} vs floor {floor:.3e} (raise the cutoff)"
        )));
    }
    // The ladder spans at most a factor 16: wide enough for benign
    // extrapolation weights, narrow enough to keep the smallest level away
    // from the noisy deep-damping regime.
    let floor = floor.max(cap / 16.0);
    const LEVELS: usize = 8;
    let ratio = (cap / floor).powf(1.0 / (LEVELS - 1) as f64);
    let eps: Vec<f64> = (0..LEVELS).map(|j| floor * ratio.powi(j as i32)).collect();

    let value_at = |e: f64| -> C64 {
        let mut total = C_ZERO;
        for (mono, coeff) in x.terms() {
            let mut factor = *coeff;
            for &(f, r, s) in mono.exps() {
                let fam = fams.get(f as usize);
                let q = w.q(f as usize);
                let kmax = if fam.fermionic { 1 } else { cutoff };
                let mut num = KahanC::default();
                let mut den = KahanC::default();
                let mut qe = DampedPower::new(q, e);
                for k in 0..=kmax {
                    let sign = if fam.fermionic && k == 1 { -1.0 } else { 1.0 };
                    let d = diag_element(fam.fermionic, r, s, k);
                    if d != 0.0 {
                        num.add(qe.get() * c(sign * d, 0.0));
                    }
                    den.add(qe.get() * c(sign, 0.0));
                    qe.advance();
                }
                factor *= num.value() / den.value();
            }
            total += factor;
        }
        total
    };

    let ys: Vec<C64> = eps.iter().map(|&e| value_at(e)).collect();
    let (extrap, prev) = neville_to_zero(&eps, &ys);
    let scale = 1.0 + extrap.norm();
    if (extrap - prev).norm() > 2e-3 * scale {
        return Err(Error::OracleFailure(format!(
            "extrapolation unstable: last correction {:.3e}",
            (extrap - prev).norm() / scale
        )));
    }
    Ok(extrap)
}

/// Damped-sum oracle for the unnormalized chain sums used by the Verma traces.
pub fn damped_chain_sum(q: C64, poly: &CPoly, cutoff: usize, damping: f64) -> Result<C64> {
    let floor = (30.0 + poly.degree() as f64 * (cutoff as f64).ln()) / cutoff as f64;
    let cap = damping.min(0.2 * (q - C_ONE).norm());
    if cap < 2.0 * floor {
        return Err(Error::OracleFailure("damping ladder collapsed".into()));
    }
    let floor = floor.max(cap / 16.0);
    const LEVELS: usize = 8;
    let ratio = (cap / floor).powf(1.0 / (LEVELS - 1) as f64);
    let eps: Vec<f64> = (0..LEVELS).map(|j| floor * ratio.powi(j as i32)).collect();
    let ys: Vec<C64> = eps
        .iter()
        .map(|&e| {
            let mut qe = DampedPower::new(q, e);
            let mut acc = KahanC::default();
            for k in 0..=cutoff {
                acc.add(qe.get() * poly.eval(c(k as f64, 0.0)));
                qe.advance();
            }
            acc.value()
        })
        .collect();
    let (extrap, prev) = neville_to_zero(&eps, &ys);
    if (extrap - prev).norm() > 2e-3 * (1.0 + extrap.norm()) {
        return Err(Error::OracleFailure("chain-sum extrapolation unstable".into()));
    }
    Ok(extrap)
}
