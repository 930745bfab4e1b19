use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use avatar::report;
use avatar::{compare_zeros, load_zeros, run_parallel, Config, ZeroSource};
use avatar_core::eta_engine::HPoint;
use avatar_core::exactquad::{symbolic_diagnostics, symbolic_suite};
use avatar_core::sl2z::{CosetTable, Word, INDEX};
use avatar_core::tracer::{experiment_path, trace, verify_fixing, AVATAR};
use avatar_core::treepath::{build_path, find_c, pole_scan, CPoint};
use avatar_core::zeta::find_zeros;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

/// Level-15 avatars of the Riemann zeta function: verification suites,
/// evaluators and the zero-connecting continuation experiment.
#[derive(Parser, Debug)]
#[command(name = "avatar", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// Cap on scaled identity residuals.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol_residual: f64,
    /// Nominal steps along a tree path.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Modulus above which an avatar counts as blocked by a pole.
    #[arg(long, global = true)]
    pole_cap: Option<f64>,
    /// Zero file (one ordinate per line) instead of computed zeros.
    #[arg(long, global = true, alias = "zeros")]
    zeros_file: Option<PathBuf>,
    /// Output file: CSV for `path`, JSON lines for `experiment`, JSON otherwise.
    #[arg(long, global = true)]
    emit: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact identities over Q(√5).
    VerifySymbolic,
    /// Rebuild and check the 96-coset table.
    VerifyCosets,
    /// Evaluate one modular function at a point.
    Eval {
        #[arg(long = "fn", value_enum)]
        function: Function,
        /// Point as `re,im` with im > 0.
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        z: Complex64,
        /// Avatar index for `--fn avatar`.
        #[arg(long, required_if_eq("function", "avatar"), value_parser = clap::value_parser!(u32).range(1..=INDEX as i64))]
        n: Option<u32>,
    },
    /// Locate c on the arc and report j(c) and Z₄₁(c).
    FindC,
    /// Sample the tree path of a word.
    Path {
        #[arg(long)]
        word: Word,
        /// Also pole-scan this avatar along the path.
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=INDEX as i64))]
        scan: Option<u32>,
    },
    /// Compute the first zeros of ζ on the critical line.
    Zeros {
        #[arg(long, default_value_t = 30)]
        count: usize,
        /// Compare against a zero file.
        #[arg(long)]
        check: Option<PathBuf>,
    },
    /// Trace one path from ρ_m along P_A.
    Trace {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        m: u32,
        /// Follow A⁻¹ instead of A.
        #[arg(long)]
        reverse: bool,
    },
    /// Trace m = 1..=max-m in parallel.
    Experiment {
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u32).range(0..=300))]
        max_m: u32,
        #[arg(long)]
        reverse: bool,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Function {
    Eta,
    Tau,
    Lambda,
    Sigma,
    J,
    #[value(name = "Z", alias = "z")]
    Z,
    Avatar,
}

fn parse_point(s: &str) -> Result<Complex64, String> {
    let (re, im) = s
        .split_once(',')
        .ok_or_else(|| format!("expected re,im but got {s:?}"))?;
    let re: f64 = re
        .trim()
        .parse()
        .map_err(|e| format!("bad real part: {e}"))?;
    let im: f64 = im
        .trim()
        .parse()
        .map_err(|e| format!("bad imaginary part: {e}"))?;
    if im.is_nan() || im <= 0.0 {
        return Err(format!("imaginary part must be positive, got {im}"));
    }
    Ok(Complex64::new(re, im))
}

/// A finished command: its JSON document and whether every check passed.
struct Outcome {
    doc: Value,
    ok: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match config(&cli.global) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    match run(&cli.command, &cfg) {
        Ok(out) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&out.doc).expect("serializable")
            );
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            println!("{}", json!({ "error": format!("{e:#}") }));
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn config(g: &GlobalArgs) -> Result<Config> {
    let d = Config::default();
    let cfg = Config {
        tol_residual: g.tol_residual,
        samples: g.samples.unwrap_or(d.samples),
        pole_cap: g.pole_cap.unwrap_or(d.pole_cap),
        zeros: g
            .zeros_file
            .clone()
            .map_or(ZeroSource::Computed, ZeroSource::File),
        emit: g.emit.clone(),
        ..d
    };
    cfg.validate()?;
    Ok(cfg)
}

fn run(cmd: &Command, cfg: &Config) -> Result<Outcome> {
    let out = match cmd {
        Command::VerifySymbolic => verify_symbolic(),
        Command::VerifyCosets => verify_cosets(cfg)?,
        Command::Eval { function, z, n } => eval(cfg, *function, *z, *n)?,
        Command::FindC => find_c_cmd(cfg)?,
        Command::Path { word, scan } => return path_cmd(cfg, word, *scan),
        Command::Zeros { count, check } => zeros_cmd(cfg, *count, check.as_deref())?,
        Command::Trace { m, reverse } => trace_cmd(cfg, *m as usize, *reverse)?,
        Command::Experiment { max_m, reverse } => {
            return experiment_cmd(cfg, *max_m as usize, *reverse)
        }
    };
    if let Some(path) = &cfg.emit {
        let text = serde_json::to_string_pretty(&out.doc)?;
        std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(out)
}

fn verify_symbolic() -> Outcome {
    let suite = symbolic_suite();
    let ok = suite.iter().all(|c| c.ok);
    Outcome {
        doc: json!({
            "identities": report::identities(&suite),
            "passed": suite.iter().filter(|c| c.ok).count(),
            "total": suite.len(),
            "diagnostics": report::identities(&symbolic_diagnostics()),
            "all_ok": ok,
        }),
        ok,
    }
}

fn verify_cosets(cfg: &Config) -> Result<Outcome> {
    let table = CosetTable::embedded();
    let rep = table.verify();
    let ctx = cfg.context();
    let c = find_c(&ctx)?;
    let fix = verify_fixing(&ctx, AVATAR, c.c)?;
    let ok = rep.all_ok() && fix.ok(1e-8);
    let mut doc = report::coset_report(&rep);
    doc["fixing"] = report::fixing(&fix, 1e-8);
    doc["all_ok"] = json!(ok);
    Ok(Outcome { doc, ok })
}

fn eval(cfg: &Config, f: Function, z: Complex64, n: Option<u32>) -> Result<Outcome> {
    let ctx = cfg.context();
    let p = HPoint::new(z)?;
    let value = match f {
        Function::Eta => ctx.dedekind_eta(p),
        Function::Tau => ctx.tau(p),
        Function::Lambda => ctx.lambda_fn(p),
        Function::Sigma => ctx.sigma(p)?,
        Function::J => ctx.j_fricke(p)?,
        Function::Z => ctx.z_eval(p, None)?,
        Function::Avatar => {
            let Some(n) = n else {
                bail!("--fn avatar needs --n");
            };
            ctx.avatar_eval(n as usize, p, None)?
        }
    };
    let zv = ctx.z_eval(p, None)?;
    let res = ctx.residuals(p, zv)?;
    let ok = report::gated_residual(&res) < cfg.tol_residual;
    Ok(Outcome {
        doc: json!({
            "fn": format!("{f:?}").to_lowercase(),
            "z": report::complex(z),
            "n": n,
            "value": report::complex(value),
            "residuals": report::residuals(&res),
            "tol_residual": cfg.tol_residual,
            "ok": ok,
        }),
        ok,
    })
}

fn find_c_cmd(cfg: &Config) -> Result<Outcome> {
    let ctx = cfg.context();
    let c = find_c(&ctx)?;
    let z41 = ctx.avatar_eval(AVATAR, c.c, None)?;
    let p41c = c.c.apply(&ctx.table().rep(AVATAR));
    let tau = ctx.tau(p41c);
    let sigma = ctx.sigma(p41c)?;
    let tau_target = (5f64.sqrt() - 1.0) / 2.0;
    let ok = (c.j - c.j_target).norm() < 1e-8
        && c.theta > PI / 2.0
        && c.theta < 2.0 * PI / 3.0
        && z41.norm() < 1e-6
        && (tau - tau_target).norm() < 1e-8
        && sigma.norm() < 1e-6;
    let mut doc = report::c_point(&c);
    doc["abs_z41_c"] = json!(z41.norm());
    doc["tau_p41_c"] = report::complex(tau);
    doc["sigma_p41_c"] = report::complex(sigma);
    doc["ok"] = json!(ok);
    Ok(Outcome { doc, ok })
}

fn path_cmd(cfg: &Config, word: &Word, scan: Option<u32>) -> Result<Outcome> {
    let ctx = cfg.context();
    let c = find_c(&ctx)?;
    let path = build_path(word, c.theta)?;
    let grid = path.grid(cfg.samples);
    let mismatch = path.endpoint_mismatches().into_iter().fold(0.0, f64::max);
    let points: Vec<(f64, Complex64)> = grid.iter().map(|&t| (t, path.point(t).z())).collect();
    let mut doc = json!({
        "word": word.to_string(),
        "theta_c": c.theta,
        "edges": path.len(),
        "start": report::complex(path.start().z()),
        "end": report::complex(path.end().z()),
        "max_endpoint_mismatch": mismatch,
        "grid_points": points.len(),
    });
    let mut ok = mismatch < 1e-12;
    if let Some(n) = scan {
        match pole_scan(&ctx, &path, n as usize, cfg.samples, cfg.pole_cap) {
            Ok(s) => doc["pole_scan"] = report::pole_scan(&s),
            Err(e) => {
                doc["pole_scan"] = json!({ "error": e.to_string() });
                ok = false;
            }
        }
    }
    match &cfg.emit {
        Some(file) => {
            write_csv(file, &points)?;
            doc["emitted"] = json!(file.display().to_string());
        }
        None => {
            doc["points"] = points.iter().map(|(t, z)| json!([t, z.re, z.im])).collect();
        }
    }
    doc["ok"] = json!(ok);
    Ok(Outcome { doc, ok })
}

fn write_csv(file: &Path, points: &[(f64, Complex64)]) -> Result<()> {
    let mut w =
        BufWriter::new(File::create(file).with_context(|| format!("creating {}", file.display()))?);
    writeln!(w, "t,re_z,im_z")?;
    for (t, z) in points {
        writeln!(w, "{t},{},{}", z.re, z.im)?;
    }
    w.flush()?;
    Ok(())
}

fn zeros_cmd(cfg: &Config, count: usize, check: Option<&Path>) -> Result<Outcome> {
    let zeros = find_zeros(count)?;
    let max_residual = zeros.max_residual();
    let min_derivative = zeros.min_derivative();
    let mut ok = max_residual < 1e-8 && (zeros.is_empty() || min_derivative > 1e-3);
    let mut doc = json!({
        "count": zeros.len(),
        "ordinates": zeros.ordinates,
        "max_residual": max_residual,
        "min_derivative": if zeros.is_empty() { Value::Null } else { json!(min_derivative) },
    });
    let reference = check.map(Path::to_path_buf).or_else(|| match &cfg.zeros {
        ZeroSource::File(p) => Some(p.clone()),
        ZeroSource::Computed => None,
    });
    if let Some(file) = reference {
        let other = load_zeros(&file)?;
        let cmp = compare_zeros(&zeros, &other);
        let pass = cmp.compared == zeros.len() && cmp.max_deviation < cfg.match_tol;
        ok &= pass;
        doc["check"] = json!({
            "file": file.display().to_string(),
            "compared": cmp.compared,
            "max_deviation": cmp.max_deviation,
            "at": cmp.at,
            "ok": pass,
        });
    }
    doc["ok"] = json!(ok);
    Ok(Outcome { doc, ok })
}

fn trace_cmd(cfg: &Config, m: usize, reverse: bool) -> Result<Outcome> {
    let ctx = cfg.context();
    let zeros = cfg.zeros(m + 1)?;
    let c: CPoint = find_c(&ctx)?;
    let path = experiment_path(c.theta, reverse);
    let scan = pole_scan(&ctx, &path, AVATAR, cfg.samples, cfg.pole_cap)?;
    let started = std::time::Instant::now();
    let result = trace(&ctx, m, &path, &zeros, &cfg.trace_options(reverse));
    let timed = avatar::TimedTrace {
        entry: avatar_core::tracer::ExperimentEntry { m, result },
        wall: started.elapsed(),
    };
    let ok = if reverse {
        timed.entry.result.is_ok()
    } else {
        timed.entry.hit()
    };
    let mut doc = report::trace(&timed);
    doc["theta_c"] = json!(c.theta);
    doc["reverse"] = json!(reverse);
    doc["pole_scan"] = report::pole_scan(&scan);
    doc["ok"] = json!(ok);
    Ok(Outcome { doc, ok })
}

fn experiment_cmd(cfg: &Config, max_m: usize, reverse: bool) -> Result<Outcome> {
    let zeros = cfg.zeros(max_m + 1)?;
    let c = find_c(&cfg.context())?;
    let run = run_parallel(cfg, c.theta, &zeros, max_m, reverse)?;
    let records: Vec<Value> = run.traces.iter().map(report::trace).collect();
    let mut doc = report::experiment(&run);
    let ok = if reverse {
        run.traces.iter().all(|t| t.entry.result.is_ok())
    } else {
        run.summary().successes() == max_m
    };
    match &cfg.emit {
        Some(file) => {
            let mut w = BufWriter::new(
                File::create(file).with_context(|| format!("creating {}", file.display()))?,
            );
            for r in &records {
                writeln!(w, "{r}")?;
            }
            w.flush()?;
            doc["emitted"] = json!(file.display().to_string());
        }
        None => doc["records"] = Value::Array(records),
    }
    doc["ok"] = json!(ok);
    Ok(Outcome { doc, ok })
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_is_well_formed() {
        Cli::command().debug_assert();
    }

    #[test]
    fn point_parsing() {
        assert_eq!(parse_point("0.1,2").unwrap(), Complex64::new(0.1, 2.0));
        assert_eq!(parse_point("-0.5, 1").unwrap(), Complex64::new(-0.5, 1.0));
        assert!(parse_point("0.1").is_err());
        assert!(parse_point("0,-1").is_err());
        assert!(parse_point("0,0").is_err());
    }

    #[test]
    fn max_m_is_bounded() {
        assert!(Cli::try_parse_from(["avatar", "experiment", "--max-m", "300"]).is_ok());
        assert!(Cli::try_parse_from(["avatar", "experiment", "--max-m", "301"]).is_err());
        assert!(Cli::try_parse_from([
            "avatar", "eval", "--fn", "avatar", "--z", "0,1", "--n", "97"
        ])
        .is_err());
    }
}
