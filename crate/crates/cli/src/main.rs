mod args;
mod config_file;

use args::{
    Cli, Command, Common, EvalArgs, EvalMethod, Format, MeanSquareArgs, TildeArgs, VerifyArgs,
    WeightsMode,
};
use barnes_zeta::{
    analyze_weights, boundary_identity_check, eval_approx, eval_auto, eval_direct, eval_em,
    integrate_mean_square, parse_weight_list, tilde_zeta, validate_params, verify_mean_square,
    BarnesParams, Complex64, DeclaredMode, EvalConfig, MeanSquareConfig, WeightLiteral,
    WeightStructure,
};
use clap::Parser;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::process::ExitCode;

const TERM_CAP_ENV: &str = "BARNES_TERM_CAP";

enum Failure {
    Domain(String),
    Budget(String),
}

impl From<barnes_zeta::Error> for Failure {
    fn from(e: barnes_zeta::Error) -> Self {
        if e.is_budget() {
            Failure::Budget(e.to_string())
        } else {
            Failure::Domain(e.to_string())
        }
    }
}

type Outcome = Result<ExitCode, Failure>;

fn main() -> ExitCode {
    let raw: Vec<OsString> = std::env::args_os().collect();
    let merged = match config_file::merge(raw) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(merged) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Outcome {
    let common = match &cli.command {
        Command::Eval(a) => &a.common,
        Command::Tilde(a) => &a.common,
        Command::Meansquare(a) => &a.common,
        Command::Verify(a) => &a.common,
    };
    let pool = match common.workers {
        Some(0) => return Err(Failure::Domain("--workers must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Failure::Domain(format!("cannot start worker pool: {e}")))?,
        None => rayon::ThreadPoolBuilder::new()
            .build()
            .map_err(|e| Failure::Domain(format!("cannot start worker pool: {e}")))?,
    };
    pool.install(|| match cli.command {
        Command::Eval(a) => cmd_eval(&a),
        Command::Tilde(a) => cmd_tilde(&a),
        Command::Meansquare(a) => cmd_meansquare(&a),
        Command::Verify(a) => cmd_verify(&a),
    })
}

/// Term cap from the flag or config file, then the environment, then the default.
fn eval_config(common: &Common) -> Result<EvalConfig, Failure> {
    let mut cfg = EvalConfig::default();
    if let Some(cap) = common.term_cap {
        cfg.term_cap = cap;
    } else if let Ok(v) = std::env::var(TERM_CAP_ENV) {
        cfg.term_cap = v
            .trim()
            .parse()
            .map_err(|_| Failure::Domain(format!("{TERM_CAP_ENV} is not a number: {v:?}")))?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn float_params(a: f64, lits: &[WeightLiteral]) -> Result<BarnesParams, Failure> {
    let w: Vec<f64> = lits.iter().map(WeightLiteral::to_f64).collect();
    Ok(validate_params(a, &w)?)
}

fn structure_for(
    lits: &[WeightLiteral],
    mode: Option<WeightsMode>,
) -> Result<WeightStructure, Failure> {
    let declared = mode.map(|m| match m {
        WeightsMode::Independent => DeclaredMode::Independent,
        WeightsMode::Rational => DeclaredMode::Rational,
    });
    Ok(analyze_weights(lits, declared)?)
}

fn check_tol(name: &str, v: f64) -> Result<(), Failure> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Failure::Domain(format!(
            "--{name} must lie in (0, 1), got {v}"
        )))
    }
}

fn emit(common: &Common, text: &str) -> Result<(), Failure> {
    match &common.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::Domain(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("records serialize");
    s.push('\n');
    s
}

fn csv_header_comment<T: Serialize>(config: &T) -> String {
    format!(
        "# config={}\n",
        serde_json::to_string(config).expect("config serializes")
    )
}

#[derive(Serialize)]
struct Resolved<'a, A, C> {
    command: &'static str,
    args: &'a A,
    workers: usize,
    #[serde(flatten)]
    library: C,
}

fn resolved<'a, A, C>(command: &'static str, args: &'a A, library: C) -> Resolved<'a, A, C> {
    Resolved {
        command,
        args,
        workers: rayon::current_num_threads(),
        library,
    }
}

#[derive(Serialize)]
struct EvalLibConfig<'a> {
    eval_config: &'a EvalConfig,
    x: Option<f64>,
}

#[derive(Serialize)]
struct EvalRecord<'a> {
    re: f64,
    im: f64,
    err_estimate: f64,
    err_kind: barnes_zeta::ErrKind,
    method: barnes_zeta::Method,
    terms_used: u64,
    config: Resolved<'a, EvalArgs, EvalLibConfig<'a>>,
}

fn cmd_eval(args: &EvalArgs) -> Outcome {
    let cfg = eval_config(&args.common)?;
    check_tol("rel-tol", args.rel_tol)?;
    let lits = parse_weight_list(&args.w)?;
    let params = float_params(args.a, &lits)?;
    let s = Complex64::new(args.sigma, args.t);
    let mut x_used = None;
    let res = match args.method {
        EvalMethod::Auto => eval_auto(&params, s, args.rel_tol, &cfg)?,
        EvalMethod::Direct => eval_direct(&params, s, args.rel_tol, &cfg)?,
        EvalMethod::Em => eval_em(&params, s, args.rel_tol, &cfg)?,
        EvalMethod::Approx => {
            let x = args.x.unwrap_or_else(|| {
                cfg.x_min
                    .max(cfg.trunc_c * args.t.abs() / (2.0 * std::f64::consts::PI))
                    * cfg.x_safety
            });
            x_used = Some(x);
            eval_approx(&params, s, x, &cfg)?
        }
    };
    let rec = EvalRecord {
        re: res.value.re,
        im: res.value.im,
        err_estimate: res.err_estimate,
        err_kind: res.err_kind,
        method: res.method,
        terms_used: res.terms_used,
        config: resolved(
            "eval",
            args,
            EvalLibConfig {
                eval_config: &cfg,
                x: x_used,
            },
        ),
    };
    let text = match args.format {
        Format::Json => json(&rec),
        Format::Csv => format!(
            "{}re,im,err_estimate,err_kind,method,terms_used\n{:.16e},{:.16e},{:.16e},{},{},{}\n",
            csv_header_comment(&rec.config),
            rec.re,
            rec.im,
            rec.err_estimate,
            enum_name(&rec.err_kind),
            enum_name(&rec.method),
            rec.terms_used
        ),
        Format::Text => format!(
            "zeta_{}({} {} {}i) = {:.16e} {} {:.16e}i\nerror {:.3e} ({}), method {}, {} terms\n",
            params.rank(),
            args.sigma,
            if args.t < 0.0 { '-' } else { '+' },
            args.t.abs(),
            rec.re,
            if rec.im < 0.0 { '-' } else { '+' },
            rec.im.abs(),
            rec.err_estimate,
            enum_name(&rec.err_kind),
            enum_name(&rec.method),
            rec.terms_used
        ),
    };
    emit(&args.common, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn enum_name<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|j| j.as_str().map(str::to_owned))
        .unwrap_or_default()
}

/// Caveats for float weights treated as Q-linearly independent.
fn independence_warnings(lits: &[WeightLiteral]) -> Vec<String> {
    let floats: Vec<(usize, f64)> = lits
        .iter()
        .enumerate()
        .filter(|(_, l)| !l.is_exact())
        .map(|(i, l)| (i, l.to_f64()))
        .collect();
    if floats.is_empty() {
        return Vec::new();
    }
    let mut out = vec![
        "float weights are assumed linearly independent over Q; pass exact p/q weights if they are rationally related"
            .to_string(),
    ];
    let all: Vec<f64> = lits.iter().map(WeightLiteral::to_f64).collect();
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            let ratio = all[i] / all[j];
            if let Some(d) = (1..=12u32).find(|&d| {
                let n = ratio * d as f64;
                (n - n.round()).abs() <= 1e-9 * n.max(1.0)
            }) {
                let n = (ratio * d as f64).round();
                out.push(format!(
                    "weights {} and {} have ratio {n}/{d}; the diagonal sum of rationally related weights differs from the independent value",
                    i + 1,
                    j + 1
                ));
            }
        }
    }
    out
}

#[derive(Serialize)]
struct TildeLibConfig<'a> {
    eval_config: &'a EvalConfig,
    structure: &'a WeightStructure,
}

#[derive(Serialize)]
struct TildeRecord<'a> {
    value: f64,
    err_estimate: f64,
    path: barnes_zeta::TildePath,
    warnings: Vec<String>,
    config: Resolved<'a, TildeArgs, TildeLibConfig<'a>>,
}

fn cmd_tilde(args: &TildeArgs) -> Outcome {
    let cfg = eval_config(&args.common)?;
    check_tol("rel-tol", args.rel_tol)?;
    let lits = parse_weight_list(&args.w)?;
    let structure = structure_for(&lits, args.weights_mode)?;
    let params = float_params(args.a, &lits)?;
    let res = tilde_zeta(&params, args.sigma, &structure, args.rel_tol, &cfg)?;
    let warnings = match structure {
        WeightStructure::AssumedIndependent => independence_warnings(&lits),
        WeightStructure::Rational { .. } => Vec::new(),
    };
    let rec = TildeRecord {
        value: res.value,
        err_estimate: res.err_estimate,
        path: res.path,
        warnings,
        config: resolved(
            "tilde",
            args,
            TildeLibConfig {
                eval_config: &cfg,
                structure: &structure,
            },
        ),
    };
    let text = match args.format {
        Format::Json => json(&rec),
        Format::Csv => format!(
            "{}value,err_estimate,path\n{:.16e},{:.16e},{}\n",
            csv_header_comment(&rec.config),
            rec.value,
            rec.err_estimate,
            enum_name(&rec.path)
        ),
        Format::Text => {
            let mut t = format!(
                "tilde zeta = {:.16e} (error {:.3e}, {})\n",
                rec.value,
                rec.err_estimate,
                enum_name(&rec.path)
            );
            for w in &rec.warnings {
                let _ = writeln!(t, "warning: {w}");
            }
            t
        }
    };
    if args.format != Format::Text || args.common.out.is_some() {
        for w in &rec.warnings {
            eprintln!("warning: {w}");
        }
    }
    emit(&args.common, &text)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct MeanSquareLibConfig<'a> {
    mean_square_config: &'a MeanSquareConfig,
}

/// Fully resolved so that the recorded config reproduces the run.
fn mean_square_config(
    common: &Common,
    quad_tol: f64,
    eval_cap: Option<u64>,
    rank: usize,
) -> Result<MeanSquareConfig, Failure> {
    check_tol("quad-tol", quad_tol)?;
    let base = MeanSquareConfig::default();
    let eval = EvalConfig {
        term_cap: eval_config(common)?.term_cap,
        ..base.eval.clone()
    };
    let mut cfg = MeanSquareConfig {
        quad_tol,
        eval,
        eval_cap,
        ..base
    };
    cfg.inner_rel_tol = Some(cfg.inner_tol());
    cfg.eval_cap = Some(cfg.cap_for_rank(rank));
    Ok(cfg)
}

fn cmd_meansquare(args: &MeanSquareArgs) -> Outcome {
    let lits = parse_weight_list(&args.w)?;
    let params = float_params(args.a, &lits)?;
    let cfg = mean_square_config(&args.common, args.quad_tol, args.eval_cap, params.rank())?;
    let trace = integrate_mean_square(&params, args.sigma, args.t_max, &args.checkpoints, &cfg)?;
    let config = resolved(
        "meansquare",
        args,
        MeanSquareLibConfig {
            mean_square_config: &cfg,
        },
    );
    let text = match args.format {
        Format::Csv => format!("{}{}", csv_header_comment(&config), trace.to_csv()),
        Format::Json => {
            #[derive(Serialize)]
            struct Rec<'a> {
                #[serde(flatten)]
                trace: &'a barnes_zeta::MeanSquareTrace,
                config: Resolved<'a, MeanSquareArgs, MeanSquareLibConfig<'a>>,
            }
            json(&Rec {
                trace: &trace,
                config,
            })
        }
        Format::Text => {
            let mut t = format!(
                "{:>12}  {:>24}  {:>10}  {:>12}\n",
                "T", "I(T)", "evals", "I(T)/T"
            );
            for c in &trace.checkpoints {
                let _ = writeln!(
                    t,
                    "{:>12}  {:>24.16e}  {:>10}  {:>12.8}",
                    c.t,
                    c.integral,
                    c.evals,
                    c.integral / c.t
                );
            }
            t
        }
    };
    emit(&args.common, &text)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct SelfTestRecord<'a> {
    suite: &'static str,
    instances: usize,
    worst_scaled_gap: f64,
    tolerance: f64,
    pass: bool,
    config: Resolved<'a, VerifyArgs, ()>,
}

/// Boundary inclusion–exclusion identity on seeded random instances.
fn self_test(args: &VerifyArgs) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_607);
    let mut worst = 0.0f64;
    let mut instances = 0;
    for r in 1..=3usize {
        for _ in 0..100 {
            let a = rng.gen_range(0.1..3.0);
            let w: Vec<f64> = (0..r).map(|_| rng.gen_range(0.2..3.0)).collect();
            let x = rng.gen_range(1.0..20.0);
            let n = rng.gen_range(x..60.0);
            let s = Complex64::new(
                rng.gen_range(r as f64 - 1.0..r as f64 + 2.0),
                rng.gen_range(-30.0..30.0),
            );
            let (lhs, rhs) = boundary_identity_check(&validate_params(a, &w)?, s, x, n)?;
            worst = worst.max((lhs - rhs).norm() / rhs.norm().max(1.0));
            instances += 1;
        }
    }
    let tolerance = 1e-12;
    let rec = SelfTestRecord {
        suite: "boundary_identity",
        instances,
        worst_scaled_gap: worst,
        tolerance,
        pass: worst <= tolerance,
        config: resolved("verify", args, ()),
    };
    emit(&args.common, &json(&rec))?;
    Ok(if rec.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_verify(args: &VerifyArgs) -> Outcome {
    if args.self_test {
        return self_test(args);
    }
    let missing = |f: &str| Failure::Domain(format!("--{f} is required"));
    let a = args.a.ok_or_else(|| missing("a"))?;
    let w = args.w.as_deref().ok_or_else(|| missing("w"))?;
    let sigma = args.sigma.ok_or_else(|| missing("sigma"))?;
    let lits = parse_weight_list(w)?;
    let structure = structure_for(&lits, args.weights_mode)?;
    let params = float_params(a, &lits)?;
    let cfg = mean_square_config(&args.common, args.quad_tol, args.eval_cap, params.rank())?;
    let report = verify_mean_square(&params, sigma, &args.t_grid, &structure, &cfg)?;

    #[derive(Serialize)]
    struct Rec<'a> {
        #[serde(flatten)]
        report: &'a barnes_zeta::VerificationReport,
        config: Resolved<'a, VerifyArgs, TildeLibConfig<'a>>,
    }
    let rec = Rec {
        report: &report,
        config: resolved(
            "verify",
            args,
            TildeLibConfig {
                eval_config: &cfg.eval,
                structure: &structure,
            },
        ),
    };
    let text = match args.format {
        Format::Json | Format::Csv => json(&rec),
        Format::Text => {
            let mut t = format!(
                "regime {}: fitted slope {:.4}, bound {} + {} -> {}\n",
                enum_name(&report.regime),
                report.fitted_slope,
                report.predicted_slope_bound,
                report.slope_tolerance,
                if report.pass { "pass" } else { "FAIL" }
            );
            for (t_val, res) in &report.residuals {
                let _ = writeln!(t, "  T = {t_val:>10}  residual {res:.6e}");
            }
            for n in &report.notes {
                let _ = writeln!(t, "note: {n}");
            }
            t
        }
    };
    emit(&args.common, &text)?;
    Ok(if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
