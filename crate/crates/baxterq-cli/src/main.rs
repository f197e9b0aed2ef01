//! Batch CLI over the transfer-operator library: verification suites,
//! spectrum extraction, the gl(2|1) t-J demonstration, operator export, and
//! Hasse-diagram inspection.

mod config;
mod outputs;
mod suites;

use clap::{Parser, Subcommand};
use config::{ConfigBuilder, RunConfig, Tolerances, TwistMode};
use outputs::{fmt_complex, fmt_f64, json_string, operator_json};
use std::path::PathBuf;

use baxterq::grading::{GradingSignature, TwistConfig};
use baxterq::hamiltonian::build_hamiltonian;
use baxterq::hasse::{build_hasse, enumerate_paths, grading_classes};
use baxterq::lax::Subset;
use baxterq::linalg::{c, eigh, C64};
use baxterq::spectrum::{continued_zero_twist_energies, cross_check_spectrum, SpectrumReport};
use baxterq::transfer::q_operator;

#[derive(Parser)]
#[command(
    name = "baxterq",
    about = "Q-operator hierarchy of graded gl(n|m) spin chains: build, verify, diagonalize"
)]
struct Cli {
    /// flat key-value JSON config; flags override config keys
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// bosonic label count
    #[arg(long, global = true)]
    n: Option<usize>,
    /// fermionic label count
    #[arg(long, global = true)]
    m: Option<usize>,
    /// chain length
    #[arg(long = "L", global = true)]
    chain_len: Option<usize>,
    /// 'generic', 'zero', or a comma list of angles in radians
    #[arg(long, global = true)]
    twists: Option<String>,
    /// seed for every randomized probe
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// overrides every tolerance for this invocation
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites; exit code 0 iff every check passes
    Verify {
        /// all | ybe | factorization | qq | tqq | xqqq | commutativity | traces
        #[arg(long)]
        suite: Option<String>,
    },
    /// Full spectral pipeline; writes spectrum.json and spectrum.csv
    Spectrum,
    /// The gl(2|1) t-J demonstration: cube, 6 paths, 3 Bethe systems
    TjDemo,
    /// Export one Q-operator matrix as JSON (sector blocks; --dense adds the full matrix)
    ExportOperator {
        /// subset as 1-based comma list, e.g. 1,3 (empty string for the empty set)
        #[arg(long)]
        subset: Option<String>,
        /// spectral point 're' or 're,im'
        #[arg(long)]
        z: Option<String>,
        #[arg(long, default_value_t = false)]
        dense: bool,
    },
    /// Print the subset diagram: nodes, edges, plaquettes, paths
    Hasse,
}

fn fail(msg: &str) -> ! {
    eprintln!("error: {msg}");
    std::process::exit(2);
}

fn merge_config(cli: &Cli) -> RunConfig {
    let file = cli
        .config
        .as_ref()
        .map(|p| config::load_config_file(p).unwrap_or_else(|e| fail(&e)));
    let b = ConfigBuilder::new(file);
    let n = b.usize_field("n", cli.n, 1).unwrap_or_else(|e| fail(&e));
    let m = b.usize_field("m", cli.m, 1).unwrap_or_else(|e| fail(&e));
    let chain_len = b
        .usize_field("L", cli.chain_len, 3)
        .unwrap_or_else(|e| fail(&e));
    let twists_str = b
        .string_field("twists", cli.twists.clone(), "generic")
        .unwrap_or_else(|e| fail(&e));
    let twists = TwistMode::parse(&twists_str).unwrap_or_else(|e| fail(&e));
    let seed = b.u64_field("seed", cli.seed, 42).unwrap_or_else(|e| fail(&e));
    let out_dir = cli
        .out
        .clone()
        .unwrap_or_else(|| {
            PathBuf::from(
                b.string_field("out", None, ".")
                    .unwrap_or_else(|e| fail(&e)),
            )
        });
    let mut tolerances = Tolerances::default();
    if let Some(t) = b.f64_field("tol", cli.tol).unwrap_or_else(|e| fail(&e)) {
        tolerances.override_all(t);
    }
    RunConfig {
        n,
        m,
        chain_len,
        twists,
        seed,
        out_dir,
        tolerances,
    }
}

fn signature(cfg: &RunConfig) -> GradingSignature {
    GradingSignature::new(cfg.n, cfg.m).unwrap_or_else(|e| fail(&format!("signature: {e}")))
}

fn realized_twists(cfg: &RunConfig, sig: GradingSignature) -> TwistConfig {
    cfg.twists.realize(sig).unwrap_or_else(|e| fail(&e))
}

fn write_out(cfg: &RunConfig, name: &str, content: &str) -> PathBuf {
    std::fs::create_dir_all(&cfg.out_dir)
        .unwrap_or_else(|e| fail(&format!("out dir {}: {e}", cfg.out_dir.display())));
    let path = cfg.out_dir.join(name);
    std::fs::write(&path, content)
        .unwrap_or_else(|e| fail(&format!("writing {}: {e}", path.display())));
    path
}

fn main() {
    let cli = Cli::parse();
    let cfg = merge_config(&cli);
    let code = match &cli.command {
        Command::Verify { suite } => cmd_verify(&cfg, suite.as_deref().unwrap_or("all")),
        Command::Spectrum => cmd_spectrum(&cfg),
        Command::TjDemo => cmd_tj_demo(&cfg),
        Command::ExportOperator { subset, z, dense } => {
            cmd_export(&cfg, subset.as_deref(), z.as_deref(), *dense)
        }
        Command::Hasse => cmd_hasse(&cfg),
    };
    std::process::exit(code);
}

fn cmd_verify(cfg: &RunConfig, suite: &str) -> i32 {
    let sig = signature(cfg);
    let twists = realized_twists(cfg, sig);
    if let Err(e) = twists.require_pairwise_generic() {
        fail(&format!("{e}"));
    }
    let tol = &cfg.tolerances;
    let mut runner = suites::SuiteRunner::default();
    let run = |runner: &mut suites::SuiteRunner, which: &str| -> baxterq::Result<()> {
        match which {
            "ybe" => suites::ybe_suite(runner, sig, cfg.seed, tol.ybe),
            "commutativity" => suites::commutativity_suite(
                runner,
                sig,
                cfg.chain_len,
                &twists,
                cfg.seed,
                tol.commutativity,
            ),
            "qq" => suites::qq_suite(runner, sig, cfg.chain_len, &twists, cfg.seed, tol.qq),
            "tqq" => suites::tqq_suite(runner, sig, cfg.chain_len, &twists, cfg.seed, tol.tqq),
            "xqqq" => suites::xqqq_suite(runner, sig, cfg.chain_len, &twists, cfg.seed, tol.xqqq),
            "factorization" => {
                suites::factorization_suite(runner, sig, cfg.seed, tol.factorization)
            }
            "traces" => suites::traces_suite(runner, cfg.seed, tol.traces, 100),
            other => fail(&format!(
                "unknown suite '{other}' (expected all, ybe, factorization, qq, tqq, xqqq, commutativity, traces)"
            )),
        }
    };
    let list: Vec<&str> = if suite == "all" {
        vec![
            "ybe",
            "factorization",
            "qq",
            "tqq",
            "xqqq",
            "commutativity",
            "traces",
        ]
    } else {
        vec![suite]
    };
    for which in list {
        if let Err(e) = run(&mut runner, which) {
            eprintln!("error: suite {which}: {e}");
            return 1;
        }
    }
    runner.print_summary();
    let path = write_out(cfg, "report.json", &runner.report_json(cfg.seed, tol));
    println!("report written to {}", path.display());
    if runner.all_pass() {
        0
    } else {
        1
    }
}

fn spectrum_json(
    cfg: &RunConfig,
    sig: GradingSignature,
    twists: &TwistConfig,
    report: &SpectrumReport,
) -> String {
    let mut out = String::from("{\"meta\":{");
    out.push_str(&format!(
        "\"n\":{},\"m\":{},\"L\":{},\"seed\":{},\"twists\":[{}]",
        sig.n(),
        sig.m(),
        cfg.chain_len,
        cfg.seed,
        twists
            .angles()
            .iter()
            .map(|&a| fmt_f64(a))
            .collect::<Vec<_>>()
            .join(",")
    ));
    out.push_str("},\"records\":[");
    for (i, (rec, chk)) in report.records.iter().zip(report.checks.iter()).enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&format!(
            "{{\"occupation\":[{}],\"energy\":{},\"energy_deviation\":{},\"path_spread\":{},\"bethe_residual\":{},\"flagged_paths\":{},\"q\":[",
            rec.occupation
                .iter()
                .map(|o| o.to_string())
                .collect::<Vec<_>>()
                .join(","),
            fmt_f64(rec.energy),
            fmt_f64(chk.energy_deviation),
            fmt_f64(chk.path_spread),
            fmt_f64(chk.bethe_residual),
            chk.flagged_paths
        ));
        let mut first = true;
        for (mask, poly) in &rec.q_polys {
            if !first {
                out.push(',');
            }
            first = false;
            let subset = Subset::from_mask(sig, *mask);
            out.push_str(&format!(
                "{{\"subset\":{},\"poly\":[{}],\"roots\":[{}]}}",
                json_string(&subset.display()),
                poly.coeffs()
                    .iter()
                    .map(|&z| fmt_complex(z))
                    .collect::<Vec<_>>()
                    .join(","),
                rec.roots[mask]
                    .iter()
                    .map(|&z| fmt_complex(z))
                    .collect::<Vec<_>>()
                    .join(",")
            ));
        }
        out.push_str("]}");
    }
    out.push_str(&format!(
        "],\"summary\":{{\"max_energy_deviation\":{},\"max_bethe_residual\":{},\"max_path_spread\":{}}}}}\n",
        fmt_f64(report.max_energy_deviation),
        fmt_f64(report.max_bethe_residual),
        fmt_f64(report.max_path_spread)
    ));
    out
}

fn cmd_spectrum(cfg: &RunConfig) -> i32 {
    let sig = signature(cfg);
    if matches!(cfg.twists, TwistMode::Zero) {
        return cmd_spectrum_continued(cfg, sig);
    }
    let twists = realized_twists(cfg, sig);
    if let Err(e) = twists.require_pairwise_generic() {
        fail(&format!("{e}"));
    }
    let paths = enumerate_paths(&build_hasse(sig));
    let report = match cross_check_spectrum(sig, cfg.chain_len, &twists, &paths, cfg.seed) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    println!(
        "{:<14} {:>12} {:>14} {:>14} {:>8}  roots/level",
        "sector", "energy", "max dev", "bethe res", "flagged"
    );
    for chk in &report.checks {
        println!(
            "{:<14} {:>12.6} {:>14.3e} {:>14.3e} {:>8}  {:?}",
            format!("{:?}", chk.occupation),
            chk.energy,
            chk.energy_deviation,
            chk.bethe_residual,
            chk.flagged_paths,
            chk.root_counts
        );
    }
    let jpath = write_out(cfg, "spectrum.json", &spectrum_json(cfg, sig, &twists, &report));
    let mut csv =
        String::from("occupation;energy;energy_deviation;bethe_residual;flagged_paths;root_counts\n");
    for chk in &report.checks {
        csv.push_str(&format!(
            "{};{};{};{};{};{}\n",
            chk.occupation
                .iter()
                .map(|o| o.to_string())
                .collect::<Vec<_>>()
                .join(","),
            fmt_f64(chk.energy),
            fmt_f64(chk.energy_deviation),
            fmt_f64(chk.bethe_residual),
            chk.flagged_paths,
            chk.root_counts
                .iter()
                .map(|r| r.to_string())
                .collect::<Vec<_>>()
                .join(",")
        ));
    }
    let cpath = write_out(cfg, "spectrum.csv", &csv);
    println!(
        "max energy deviation {:.3e}, max Bethe residual {:.3e}",
        report.max_energy_deviation, report.max_bethe_residual
    );
    println!("written: {} {}", jpath.display(), cpath.display());
    let ok = report.max_energy_deviation <= cfg.tolerances.spectrum_energy
        && report.max_bethe_residual <= cfg.tolerances.bethe;
    if ok {
        0
    } else {
        1
    }
}

fn cmd_spectrum_continued(cfg: &RunConfig, sig: GradingSignature) -> i32 {
    // Q-operators need the regulating fluxes; zero-twist spectra are reached
    // by continuing the generic-twist pipeline towards zero scale.
    let base = TwistConfig::generic(sig);
    let paths = enumerate_paths(&build_hasse(sig));
    let sectors = match continued_zero_twist_energies(sig, cfg.chain_len, &base, &paths, cfg.seed)
    {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let h = build_hamiltonian(sig, cfg.chain_len, &TwistConfig::zero(sig))
        .unwrap_or_else(|e| fail(&format!("{e}")));
    let space = baxterq::quantum::StateSpace::new(sig, cfg.chain_len);
    let mut worst = 0.0f64;
    let mut rows = String::from("occupation;continued_energy;direct_energy\n");
    println!("{:<14} {:>16} {:>16}", "sector", "continued E", "direct E");
    for (occ, es) in &sectors {
        let states: Vec<usize> = (0..space.dim())
            .filter(|&i| &space.occupation(i) == occ)
            .collect();
        let (direct, _) = eigh(&h.mat.submatrix(&states));
        for (a, b) in es.iter().zip(direct.iter()) {
            worst = worst.max((a - b).abs());
            println!("{:<14} {:>16.8} {:>16.8}", format!("{occ:?}"), a, b);
            rows.push_str(&format!(
                "{};{};{}\n",
                occ.iter().map(|o| o.to_string()).collect::<Vec<_>>().join(","),
                fmt_f64(*a),
                fmt_f64(*b)
            ));
        }
    }
    let cpath = write_out(cfg, "spectrum.csv", &rows);
    let json = format!(
        "{{\"meta\":{{\"n\":{},\"m\":{},\"L\":{},\"seed\":{},\"mode\":\"continued-zero-twist\"}},\"max_deviation\":{}}}\n",
        sig.n(),
        sig.m(),
        cfg.chain_len,
        cfg.seed,
        fmt_f64(worst)
    );
    let jpath = write_out(cfg, "spectrum.json", &json);
    println!(
        "continued-to-zero-twist max deviation {worst:.3e}; written: {} {}",
        jpath.display(),
        cpath.display()
    );
    if worst < 1e-5 {
        0
    } else {
        1
    }
}

fn cmd_tj_demo(cfg: &RunConfig) -> i32 {
    let sig = GradingSignature::new(2, 1).expect("gl(2|1)");
    let twists = TwistConfig::generic(sig);
    let diagram = build_hasse(sig);
    let paths = enumerate_paths(&diagram);
    let classes = grading_classes(&paths);
    println!("t-J chain, symmetry gl(2|1)");
    println!(
        "Hasse diagram: {} nodes, {} edges ({} bosonic, {} fermionic), {} plaquettes",
        diagram.nodes.len(),
        diagram.edges.len(),
        diagram.edges.iter().filter(|e| !e.fermionic).count(),
        diagram.edges.iter().filter(|e| e.fermionic).count(),
        diagram.plaquettes.len()
    );
    println!(
        "{} nesting paths in {} grading classes",
        paths.len(),
        classes.len()
    );

    // the 8 Q-operators at a reference point
    let z0 = c(0.73, 0.41);
    for node in &diagram.nodes {
        match q_operator(sig, node, 2, &twists, z0) {
            Ok(q) => println!(
                "  Q_{}(z0) built: {dim} x {dim} matrix, sector-blocked",
                node.display(),
                dim = q.matrix.dim()
            ),
            Err(e) => {
                eprintln!("error: Q_{}: {e}", node.display());
                return 1;
            }
        }
    }

    // diagram file
    let mut text =
        String::from("gl(2|1) subset diagram (====: bosonic label added, ---->: fermionic)\n");
    for e in &diagram.edges {
        text.push_str(&format!(
            "{} {} {}\n",
            e.from.display(),
            if e.fermionic { "---->" } else { "====>" },
            e.to.display()
        ));
    }
    text.push_str("\npaths (grading class):\n");
    for (g, members) in &classes {
        for &pi in members {
            let names: Vec<String> = paths[pi].sets.iter().map(|s| s.display()).collect();
            text.push_str(&format!("{} {:?}\n", names.join(" < "), g));
        }
    }
    let tpath = write_out(cfg, "tj_hasse.txt", &text);

    // the three Bethe systems (one per grading class) on every eigenstate
    let mut ok = true;
    let mut report = String::from("{\"systems\":[");
    for (li, chain_len) in [2usize, 3].iter().enumerate() {
        if li > 0 {
            report.push(',');
        }
        report.push_str(&format!("{{\"L\":{chain_len},\"classes\":["));
        for (ci, (g, members)) in classes.iter().enumerate() {
            let class_paths: Vec<_> = members.iter().map(|&i| paths[i].clone()).collect();
            let rep = match cross_check_spectrum(sig, *chain_len, &twists, &class_paths, cfg.seed)
            {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return 1;
                }
            };
            let pass = rep.max_bethe_residual <= cfg.tolerances.bethe
                && rep.max_energy_deviation <= cfg.tolerances.spectrum_energy;
            ok &= pass;
            println!(
                "L={chain_len} grading {:?}: {} states, bethe residual {:.3e}, energy deviation {:.3e} [{}]",
                g,
                rep.records.len(),
                rep.max_bethe_residual,
                rep.max_energy_deviation,
                if pass { "PASS" } else { "FAIL" }
            );
            if ci > 0 {
                report.push(',');
            }
            report.push_str(&format!(
                "{{\"grading\":[{}],\"bethe_residual\":{},\"energy_deviation\":{},\"pass\":{}}}",
                g.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","),
                fmt_f64(rep.max_bethe_residual),
                fmt_f64(rep.max_energy_deviation),
                pass
            ));
        }
        report.push_str("]}");
    }
    report.push_str("]}\n");
    let rpath = write_out(cfg, "tj_report.json", &report);
    println!("written: {} {}", tpath.display(), rpath.display());
    if ok {
        0
    } else {
        1
    }
}

fn cmd_export(cfg: &RunConfig, subset: Option<&str>, z: Option<&str>, dense: bool) -> i32 {
    let sig = signature(cfg);
    let twists = realized_twists(cfg, sig);
    let labels: Vec<usize> = match subset.unwrap_or("") {
        "" => vec![],
        s => s
            .split(',')
            .map(|p| {
                let v: usize = p
                    .trim()
                    .parse()
                    .unwrap_or_else(|_| fail(&format!("subset: bad label '{p}'")));
                if v == 0 {
                    fail("subset labels are 1-based");
                }
                v - 1
            })
            .collect(),
    };
    let subset = Subset::new(sig, &labels).unwrap_or_else(|e| fail(&format!("{e}")));
    let zval: C64 = match z.unwrap_or("0.5") {
        s if s.contains(',') => {
            let parts: Vec<&str> = s.split(',').collect();
            c(
                parts[0]
                    .trim()
                    .parse()
                    .unwrap_or_else(|_| fail("z: bad real part")),
                parts[1]
                    .trim()
                    .parse()
                    .unwrap_or_else(|_| fail("z: bad imaginary part")),
            )
        }
        s => c(
            s.trim().parse().unwrap_or_else(|_| fail("z: bad value")),
            0.0,
        ),
    };
    let q = match q_operator(sig, &subset, cfg.chain_len, &twists, zval) {
        Ok(q) => q,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let meta = vec![
        ("n", sig.n().to_string()),
        ("m", sig.m().to_string()),
        ("L", cfg.chain_len.to_string()),
        ("I", json_string(&subset.display())),
        ("z", fmt_complex(zval)),
        (
            "twists",
            format!(
                "[{}]",
                twists
                    .angles()
                    .iter()
                    .map(|&a| fmt_f64(a))
                    .collect::<Vec<_>>()
                    .join(",")
            ),
        ),
    ];
    let content = operator_json(&meta, &q.matrix, dense);
    let path = write_out(cfg, "operator.json", &content);
    println!("written: {}", path.display());
    0
}

fn cmd_hasse(cfg: &RunConfig) -> i32 {
    let sig = signature(cfg);
    let diagram = build_hasse(sig);
    let paths = enumerate_paths(&diagram);
    let classes = grading_classes(&paths);
    println!("{} subset diagram", sig);
    println!("nodes ({}):", diagram.nodes.len());
    for nd in &diagram.nodes {
        println!("  Q_{}", nd.display());
    }
    println!(
        "edges ({}; ====> bosonic, ----> fermionic):",
        diagram.edges.len()
    );
    for e in &diagram.edges {
        println!(
            "  {} {} {}",
            e.from.display(),
            if e.fermionic { "---->" } else { "====>" },
            e.to.display()
        );
    }
    println!("plaquettes ({}):", diagram.plaquettes.len());
    for p in &diagram.plaquettes {
        println!(
            "  base {} + labels ({},{})  [{:?}]",
            p.base.display(),
            p.a + 1,
            p.b + 1,
            p.kind(sig)
        );
    }
    println!(
        "{} maximal paths in {} grading classes",
        paths.len(),
        classes.len()
    );
    0
}
