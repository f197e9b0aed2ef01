//! The verification suites behind `baxterq verify`, and the deterministic
//! report they produce.

use crate::config::Tolerances;
use crate::outputs::{fmt_f64, json_string};
use baxterq::grading::{GradingSignature, TwistConfig};
use baxterq::hamiltonian::build_hamiltonian;
use baxterq::hasse::build_hasse;
use baxterq::lax::Subset;
use baxterq::linalg::{c, C64};
use baxterq::module::ModuleSpec;
use baxterq::osc::{FamilySet, OscElement, OscMonomial};
use baxterq::relations::{verify_qq_oriented, verify_tqq_gl11, verify_xqqq};
use baxterq::trace::{abel_oracle, family_trace, TraceWeights};
use baxterq::transfer::q_operator;
use baxterq::ybe::{check_ybe, verify_factorization};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub inputs: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub wall_ms: f64,
}

#[derive(Debug, Default)]
pub struct SuiteRunner {
    pub checks: Vec<CheckResult>,
}

impl SuiteRunner {
    pub fn record(&mut self, name: String, inputs: String, residual: f64, tolerance: f64, t0: Instant) {
        self.checks.push(CheckResult {
            name,
            inputs,
            residual,
            tolerance,
            pass: residual <= tolerance,
            wall_ms: t0.elapsed().as_secs_f64() * 1e3,
        });
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Canonical report: checks sorted by name, floats at 17 significant
    /// digits, wall times left out so identical configurations give
    /// byte-identical files.
    pub fn report_json(&self, seed: u64, tolerances: &Tolerances) -> String {
        let mut checks = self.checks.clone();
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let mut out = String::from("{\"seed\":");
        out.push_str(&seed.to_string());
        out.push_str(",\"tolerances\":{");
        for (i, (k, v)) in tolerances.entries().iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&format!("{}:{}", json_string(k), fmt_f64(*v)));
        }
        out.push_str("},\"checks\":[");
        for (i, ch) in checks.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&format!(
                "{{\"name\":{},\"inputs\":{},\"residual\":{},\"tolerance\":{},\"pass\":{}}}",
                json_string(&ch.name),
                json_string(&ch.inputs),
                fmt_f64(ch.residual),
                fmt_f64(ch.tolerance),
                ch.pass
            ));
        }
        let passed = self.checks.iter().filter(|c| c.pass).count();
        out.push_str(&format!(
            "],\"summary\":{{\"total\":{},\"passed\":{},\"failed\":{}}}}}\n",
            self.checks.len(),
            passed,
            self.checks.len() - passed
        ));
        out
    }

    pub fn print_summary(&self) {
        for ch in &self.checks {
            println!(
                "{} {:<46} residual {:>12.3e}  tol {:>8.1e}  [{}]  {:.1} ms",
                if ch.pass { "PASS" } else { "FAIL" },
                ch.name,
                ch.residual,
                ch.tolerance,
                ch.inputs,
                ch.wall_ms
            );
        }
        let passed = self.checks.iter().filter(|c| c.pass).count();
        println!(
            "{} / {} checks passed",
            passed,
            self.checks.len()
        );
    }
}

fn seeded_points(rng: &mut ChaCha8Rng, count: usize) -> Vec<C64> {
    (0..count)
        .map(|_| {
            c(
                rng.gen_range(-1.3..1.3),
                rng.gen_range(-0.9..0.9) + 0.1,
            )
        })
        .collect()
}

fn all_subsets(sig: GradingSignature) -> Vec<Subset> {
    (0..(1u32 << sig.dim()))
        .map(|m| Subset::from_mask(sig, m))
        .collect()
}

pub fn ybe_suite(
    runner: &mut SuiteRunner,
    sig: GradingSignature,
    seed: u64,
    tol: f64,
) -> Result<(), baxterq::Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9be1);
    for subset in all_subsets(sig) {
        let t0 = Instant::now();
        let mut worst = 0.0f64;
        for _ in 0..5 {
            let z1 = c(rng.gen_range(-1.2..1.2), rng.gen_range(-0.8..0.8));
            let z2 = c(rng.gen_range(-1.2..1.2), rng.gen_range(-0.8..0.8));
            worst = worst.max(check_ybe(sig, &subset, &ModuleSpec::Singlet, z1, z2)?);
        }
        runner.record(
            format!("ybe/{}/I={}", sig, subset.display()),
            "singlet module, 5 spectral pairs".into(),
            worst,
            tol,
            t0,
        );
    }
    Ok(())
}

pub fn commutativity_suite(
    runner: &mut SuiteRunner,
    sig: GradingSignature,
    chain_len: usize,
    twists: &TwistConfig,
    seed: u64,
    tol: f64,
) -> Result<(), baxterq::Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc033);
    let zs = seeded_points(&mut rng, 3);
    let ws = seeded_points(&mut rng, 3);
    let subsets = all_subsets(sig);
    let h = build_hamiltonian(sig, chain_len, twists)?;

    // cache operators per (subset, node)
    let mut qz = Vec::new();
    let mut qw = Vec::new();
    for s in &subsets {
        qz.push(
            zs.iter()
                .map(|&z| q_operator(sig, s, chain_len, twists, z))
                .collect::<Result<Vec<_>, _>>()?,
        );
        qw.push(
            ws.iter()
                .map(|&w| q_operator(sig, s, chain_len, twists, w))
                .collect::<Result<Vec<_>, _>>()?,
        );
    }
    for (i, si) in subsets.iter().enumerate() {
        let t0 = Instant::now();
        let mut worst = 0.0f64;
        for qi in &qz[i] {
            worst = worst.max(qi.matrix.mat.commutator_max(&h.mat));
        }
        runner.record(
            format!("commutativity/{}/L{}/QH/I={}", sig, chain_len, si.display()),
            "3 spectral points against H".into(),
            worst,
            tol,
            t0,
        );
        for (j, sj) in subsets.iter().enumerate().skip(i) {
            let t1 = Instant::now();
            let mut worst = 0.0f64;
            for qi in &qz[i] {
                for qj in &qw[j] {
                    worst = worst.max(qi.matrix.mat.commutator_max(&qj.matrix.mat));
                }
            }
            runner.record(
                format!(
                    "commutativity/{}/L{}/QQ/I={},J={}",
                    sig,
                    chain_len,
                    si.display(),
                    sj.display()
                ),
                "3 x 3 spectral pairs".into(),
                worst,
                tol,
                t1,
            );
        }
    }
    Ok(())
}

pub fn qq_suite(
    runner: &mut SuiteRunner,
    sig: GradingSignature,
    chain_len: usize,
    twists: &TwistConfig,
    seed: u64,
    tol: f64,
) -> Result<(), baxterq::Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7171);
    let zs = seeded_points(&mut rng, 5);
    let diagram = build_hasse(sig);
    for p in &diagram.plaquettes {
        for (a, b) in [(p.a, p.b), (p.b, p.a)] {
            let t0 = Instant::now();
            let res = verify_qq_oriented(sig, chain_len, twists, &p.base, a, b, &zs)?;
            let kind = match p.kind(sig) {
                baxterq::hasse::PlaquetteKind::SameParity => "same-parity",
                baxterq::hasse::PlaquetteKind::MixedParity => "mixed-parity",
            };
            runner.record(
                format!(
                    "qq/{}/L{}/base={}+({},{})",
                    sig,
                    chain_len,
                    p.base.display(),
                    a + 1,
                    b + 1
                ),
                format!("{kind}, 5 spectral points"),
                res,
                tol,
                t0,
            );
        }
    }
    Ok(())
}

pub fn tqq_suite(
    runner: &mut SuiteRunner,
    sig: GradingSignature,
    chain_len: usize,
    twists: &TwistConfig,
    seed: u64,
    tol: f64,
) -> Result<(), baxterq::Error> {
    if (sig.n(), sig.m()) != (1, 1) {
        return Ok(());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7a97);
    let pairs: Vec<(C64, C64)> = (0..4)
        .map(|_| {
            let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-0.7..0.7));
            let eps = rng.gen_range(-0.8..0.8);
            (z + c(eps, 0.0), z - c(eps, 0.0))
        })
        .collect();
    let t0 = Instant::now();
    let res = verify_tqq_gl11(chain_len, twists, &pairs)?;
    runner.record(
        format!("tqq/{}/L{}", sig, chain_len),
        "4 spectral pairs plus the eps=0 split".into(),
        res,
        tol,
        t0,
    );
    Ok(())
}

pub fn xqqq_suite(
    runner: &mut SuiteRunner,
    sig: GradingSignature,
    chain_len: usize,
    twists: &TwistConfig,
    seed: u64,
    tol: f64,
) -> Result<(), baxterq::Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x8b8b);
    for subset in all_subsets(sig) {
        if subset.is_empty() || subset.len() > 2 {
            continue;
        }
        let z = c(rng.gen_range(-0.9..0.9), rng.gen_range(-0.6..0.6));
        let lambda: Vec<f64> = (0..subset.len())
            .map(|_| rng.gen_range(-1.2..1.2))
            .collect();
        let t0 = Instant::now();
        let res = verify_xqqq(sig, &subset, &lambda, chain_len, twists, z)?;
        runner.record(
            format!("xqqq/{}/L{}/I={}", sig, chain_len, subset.display()),
            format!(
                "weights [{}]",
                lambda
                    .iter()
                    .map(|l| format!("{l:.3}"))
                    .collect::<Vec<_>>()
                    .join(",")
            ),
            res,
            tol,
            t0,
        );
    }
    Ok(())
}

pub fn factorization_suite(
    runner: &mut SuiteRunner,
    sig: GradingSignature,
    seed: u64,
    tol: f64,
) -> Result<(), baxterq::Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xfac7);
    let d = sig.dim();
    for a in 0..d {
        for b in 0..d {
            if a == b {
                continue;
            }
            let i_set = Subset::new(sig, &[a])?;
            let j_set = Subset::new(sig, &[b])?;
            let fams = FamilySet::for_subset(sig, &[a], 0).len()
                + FamilySet::for_subset(sig, &[b], 0).len();
            // all-fermionic contents terminate exactly; mixed ones get the
            // guarded window
            let cutoff = if fams <= 2 { 24 } else { 18 };
            let z = c(rng.gen_range(-0.8..0.8), rng.gen_range(-0.5..0.5));
            let lambda = if (a + b) % 2 == 0 { 0.0 } else { 0.7 };
            let t0 = Instant::now();
            let res = verify_factorization(sig, &i_set, &j_set, z, lambda, cutoff)?;
            runner.record(
                format!(
                    "factorization/{}/I={},J={}",
                    sig,
                    i_set.display(),
                    j_set.display()
                ),
                format!("lambda {lambda}, window cutoff {cutoff}"),
                res,
                tol,
                t0,
            );
        }
    }
    Ok(())
}

/// Random corpus comparison of the closed-form trace functional against the
/// damped-sum oracle, over a mixed bosonic/fermionic family pair.
pub fn traces_suite(
    runner: &mut SuiteRunner,
    seed: u64,
    tol: f64,
    corpus_size: usize,
) -> Result<(), baxterq::Error> {
    let sig = GradingSignature::new(2, 1).expect("gl(2|1)");
    let fams = FamilySet::for_subset(sig, &[0, 2], 0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0abe);
    let gens = [
        OscMonomial::creator(0),
        OscMonomial::annihilator(0),
        OscMonomial::number(0),
        OscMonomial::creator(1),
        OscMonomial::annihilator(1),
        OscMonomial::number(1),
    ];
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    for _ in 0..corpus_size {
        // twists giving both family weights |q - 1| > 0.1
        let twists = loop {
            let tw = TwistConfig::new(vec![
                rng.gen_range(0.0..std::f64::consts::TAU),
                rng.gen_range(0.0..std::f64::consts::TAU),
                rng.gen_range(0.0..std::f64::consts::TAU),
            ]);
            if let Ok(w) = TraceWeights::for_families(&fams, &tw) {
                if (w.q(0) - c(1.0, 0.0)).norm() > 0.1 && (w.q(1) - c(1.0, 0.0)).norm() > 0.1 {
                    break tw;
                }
            }
        };
        let w = TraceWeights::for_families(&fams, &twists)?;
        // random element of total degree <= 6
        let mut x = OscElement::scalar(c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let factors = rng.gen_range(1..=3);
        for _ in 0..factors {
            let g = &gens[rng.gen_range(0..gens.len())];
            let e = OscElement::monomial(g.clone(), c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            x = x.mul(&e, &fams)?;
            let extra = OscElement::monomial(
                gens[rng.gen_range(0..gens.len())].clone(),
                c(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)),
            );
            x = x.add(&extra);
        }
        let ft = family_trace(&x, &fams, &w)?;
        let ao = abel_oracle(&x, &fams, &w, 40000, 5e-2)?;
        let rel = (ft - ao).norm() / (1.0 + ft.norm().max(ao.norm()));
        worst = worst.max(rel);
    }
    runner.record(
        "traces/closed-form-vs-damped-oracle".into(),
        format!("{corpus_size} random elements, degree <= 6, |q-1| > 0.1"),
        worst,
        tol,
        t0,
    );
    Ok(())
}
