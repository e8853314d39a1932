use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use tritronq_core::approximant::{residual, y0_eval, DomainId, DomainPoint, Value};
use tritronq_core::certificate::{BallJson, Status};
use tritronq_core::config::Config;
use tritronq_core::contraction::pc;
use tritronq_core::dag::{certificate_dag, Evaluation};
use tritronq_core::exact_scalars::{decimal, parse_rational, rational_string, MAX_PREC};
use tritronq_core::pieces::{gamma, x0};
use tritronq_core::{oracle, report, Ball, Error, Rational};

const EXIT_CERT: u8 = 2;
const EXIT_PREC: u8 = 3;
const EXIT_USAGE: u8 = 1;

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum Format {
    Json,
    Text,
}

#[derive(Parser, Debug)]
#[command(name = "tritronq", version, about = "Certified evaluator and proof checker for the Painleve-I tritronquee solution")]
struct Cli {
    #[arg(long, global = true, default_value_t = 128)]
    precision_bits: u32,
    /// Cap for automatic precision doubling.
    #[arg(long, global = true, default_value_t = MAX_PREC)]
    max_precision_bits: u32,
    #[arg(long, global = true, default_value_t = 20)]
    grid_n_d2: usize,
    #[arg(long, global = true, default_value_t = 5)]
    grid_n_d3: usize,
    /// Laplace cutoff for w0, as a rational.
    #[arg(long, global = true, default_value = "50")]
    tail_s: String,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Run the whole certificate graph and write the report.
    Certify {
        #[arg(long)]
        report: Option<PathBuf>,
        /// Node ids to skip (repeatable).
        #[arg(long = "disable")]
        disable: Vec<String>,
        /// Skip the floating-point cross-check.
        #[arg(long)]
        no_oracle: bool,
    },
    /// y0 at a point with its enclosure radius and the certified error band.
    Eval {
        /// Real point, as a rational (`11/2`, `-2.1`).
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
        /// Angle on the circle as a multiple of pi, in (0, 2].
        #[arg(long)]
        nu: Option<String>,
        #[arg(long, default_value = "auto")]
        domain: String,
    },
    /// Certified pole enclosure.
    Pole,
    /// Exact residual and its certified size on one domain.
    Residual {
        #[arg(long)]
        domain: String,
    },
    /// Floating-point cross-validation against the certificates.
    OracleCheck {
        /// Write the trajectory from L to x0 + r as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn config(cli: &Cli) -> anyhow::Result<Config> {
    if cli.precision_bits < 64 || cli.precision_bits > MAX_PREC {
        return Err(anyhow!("--precision-bits must lie in [64, {MAX_PREC}]"));
    }
    if cli.max_precision_bits < cli.precision_bits || cli.max_precision_bits > MAX_PREC {
        return Err(anyhow!("--max-precision-bits must lie in [--precision-bits, {MAX_PREC}]"));
    }
    if cli.grid_n_d2 == 0 || cli.grid_n_d3 == 0 {
        return Err(anyhow!("grid sizes must be positive"));
    }
    let tail_s = parse_rational(&cli.tail_s).map_err(|e| anyhow!("--tail-s: {e}"))?;
    if tail_s <= 0 {
        return Err(anyhow!("--tail-s must be positive"));
    }
    Ok(Config { prec: cli.precision_bits, max_prec: cli.max_precision_bits, grid_n_d2: cli.grid_n_d2, grid_n_d3: cli.grid_n_d3, tail_s, ..Config::default() })
}

fn exit_for(ev: &Evaluation) -> u8 {
    if ev.precision_exhausted() {
        EXIT_PREC
    } else if ev.passed() {
        0
    } else {
        EXIT_CERT
    }
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json"));
}

fn certify(cli: &Cli, mut cfg: Config, out: &Option<PathBuf>, disable: &[String], no_oracle: bool) -> anyhow::Result<u8> {
    let dag = certificate_dag();
    for d in disable {
        if !dag.nodes().iter().any(|n| n.id == d) {
            return Err(anyhow!("unknown node {d}"));
        }
        cfg.disabled.insert(d.clone());
    }
    let ev = dag.evaluate(&cfg);
    let orc = if no_oracle {
        None
    } else {
        match oracle::oracle_check() {
            Ok(o) => Some(o),
            Err(e) => {
                eprintln!("warning: oracle skipped: {e}");
                None
            }
        }
    };
    let rep = report::build(&cfg, &ev, orc.as_ref());
    if let Some(path) = out {
        fs::write(path, serde_json::to_string_pretty(&rep)? + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    match cli.format {
        Format::Json => print_json(&rep),
        Format::Text => {
            for r in ev.results.values() {
                let tag = match r.status {
                    Status::Pass => "pass",
                    Status::Fail => "FAIL",
                    Status::UnverifiedDependency => "unverified",
                    Status::Disabled => "disabled",
                };
                let extra = r.error.clone().or_else(|| r.blocked_by.as_ref().map(|b| format!("blocked by {b}")));
                println!("{tag:>10}  {}{}", r.id, extra.map(|e| format!("  ({e})")).unwrap_or_default());
            }
            let ledger = ev.ledger();
            println!("{} checks, {} failed", ledger.entries.len(), ledger.failed().len());
        }
    }
    Ok(exit_for(&ev))
}

/// Certified `|E|` band at a point of the given domain.
fn e_band(d: DomainId, x: Option<&Rational>, prec: u32) -> anyhow::Result<Ball> {
    Ok(match d {
        DomainId::D1 => {
            let xb = Ball::from_rational(x.expect("real point"), prec);
            xb.pow_rational(&Rational::from((-43, 4)))?.mul_rational(&(decimal("0.00682") * decimal("7.5")))
        }
        DomainId::D2 => pc("1.75e-7", prec),
        DomainId::D3 => {
            let z = Ball::from_rational(&Rational::from(x.expect("real point") - x0()), prec);
            &pc("4.01e-6", prec) * &z.pow_rational(&Rational::from(-gamma()))?
        }
        DomainId::D4 => pc("2.35e-5", prec),
    })
}

fn eval(cli: &Cli, cfg: &Config, x: &Option<String>, nu: &Option<String>, domain: &str) -> anyhow::Result<u8> {
    let prec = cfg.prec;
    let (point, xr) = match (x, nu) {
        (Some(s), None) => {
            let xr = parse_rational(s).map_err(|e| anyhow!("--x: {e}"))?;
            let p = if domain == "auto" {
                DomainPoint::real(xr.clone())?
            } else {
                DomainPoint::in_domain(domain.parse()?, xr.clone())?
            };
            (p, Some(xr))
        }
        (None, Some(s)) => (DomainPoint::circle(parse_rational(s).map_err(|e| anyhow!("--nu: {e}"))?)?, None),
        _ => return Err(anyhow!("give exactly one of --x or --nu")),
    };
    let d = point.domain();
    let band = e_band(d, xr.as_ref(), prec)?;
    let v = y0_eval(&point, 0, prec)?;
    let val = match v {
        Value::Real(b) => json!({"y0": BallJson::from(&b)}),
        Value::Complex(c) => {
            json!({"y0_re": BallJson::from(&c.re), "y0_im": BallJson::from(&c.im)})
        }
    };
    let out = json!({
        "x": xr.as_ref().map(rational_string),
        "nu_over_pi": nu,
        "domain": d.to_string(),
        "value": val,
        "E_bound": BallJson::from(&band),
    });
    match cli.format {
        Format::Json => print_json(&out),
        Format::Text => {
            println!("domain {d}");
            println!("{}", serde_json::to_string(&out["value"])?);
            println!("E bound {}", band.upper_decimal(6));
        }
    }
    Ok(0)
}

fn pole(cli: &Cli, cfg: &Config) -> anyhow::Result<u8> {
    let ev = certificate_dag().evaluate_subset(cfg, Some(&["pole"]));
    let r = &ev.results["pole"];
    match r.output.as_ref().and_then(|o| o.pole.as_ref()) {
        Some(p) => match cli.format {
            Format::Json => print_json(&serde_json::to_value(p.to_json())?),
            Format::Text => {
                println!("x0 = {}", rational_string(&p.center));
                println!("|x_p - x0| <= {}", p.radius_bound.upper_decimal(6));
                println!("count = {}", p.count);
                println!("{}", p.justification);
            }
        },
        None => {
            let why = r.error.clone().or_else(|| r.blocked_by.clone().map(|b| format!("blocked by {b}")));
            eprintln!("pole certificate {:?}: {}", r.status, why.unwrap_or_default());
        }
    }
    Ok(exit_for(&ev))
}

fn residual_cmd(cli: &Cli, cfg: &Config, domain: &str) -> anyhow::Result<u8> {
    let d: DomainId = domain.parse()?;
    let node = match d {
        DomainId::D2 => "D2.residual",
        DomainId::D3 => "D3.E02",
        DomainId::D4 => "D4.residual",
        DomainId::D1 => return Err(anyhow!("D1 has no polynomial residual")),
    };
    let res = residual(d)?;
    let ev = certificate_dag().evaluate_subset(cfg, Some(&[node]));
    let mut out = json!({
        "domain": d.to_string(),
        "node": node,
        "terms": res.poly.len(),
        "min_power": res.poly.min_exp(),
        "max_power": res.poly.max_exp(),
        "log_coefficient": rational_string(&res.log_coeff),
        "log_coefficient_decimal": Ball::from_rational(&res.log_coeff, cfg.prec).mid_decimal(12),
        "status": ev.status(node),
    });
    if let Some(o) = ev.output(node) {
        let vals: serde_json::Map<_, _> =
            o.values.iter().map(|(k, v)| (k.clone(), serde_json::to_value(BallJson::from(v)).unwrap())).collect();
        out["values"] = vals.into();
        out["checks"] = serde_json::to_value(o.checks.iter().map(|c| c.to_json()).collect::<Vec<_>>())?;
    }
    if let Some(e) = &ev.results[node].error {
        out["error"] = json!(e);
    }
    match cli.format {
        Format::Json => print_json(&out),
        Format::Text => {
            for (k, v) in out.as_object().unwrap() {
                if k != "checks" {
                    println!("{k}: {v}");
                }
            }
            if let Some(o) = ev.output(node) {
                for c in &o.checks {
                    println!("{}  {}", if c.pass { "pass" } else { "FAIL" }, c.name);
                }
            }
        }
    }
    Ok(exit_for(&ev))
}

fn oracle_cmd(cli: &Cli, csv: &Option<PathBuf>) -> anyhow::Result<u8> {
    let rep = oracle::oracle_check()?;
    if let Some(path) = csv {
        let traj = oracle::trajectory_to_junction()?;
        let f = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        oracle::write_csv(&traj, std::io::BufWriter::new(f))?;
    }
    match cli.format {
        Format::Json => print_json(&serde_json::to_value(&rep)?),
        Format::Text => {
            for (k, v) in serde_json::to_value(&rep)?.as_object().unwrap() {
                println!("{k}: {v}");
            }
        }
    }
    let ok = rep.band_ok && rep.xp_ok && rep.a2_ok && rep.circle_ok && rep.residue_ok;
    Ok(if ok { 0 } else { EXIT_CERT })
}

fn run(cli: &Cli) -> anyhow::Result<u8> {
    let cfg = config(cli)?;
    match &cli.cmd {
        Cmd::Certify { report, disable, no_oracle } => certify(cli, cfg, report, disable, *no_oracle),
        Cmd::Eval { x, nu, domain } => eval(cli, &cfg, x, nu, domain),
        Cmd::Pole => pole(cli, &cfg),
        Cmd::Residual { domain } => residual_cmd(cli, &cfg, domain),
        Cmd::OracleCheck { csv } => oracle_cmd(cli, csv),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(c) => ExitCode::from(c),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = match e.downcast_ref::<Error>() {
                Some(Error::PrecisionExhausted { .. }) => EXIT_PREC,
                Some(Error::CertificateFailed(_)) => EXIT_CERT,
                _ => EXIT_USAGE,
            };
            ExitCode::from(code)
        }
    }
}
