//! The `secmux` command-line front end.
//!
//! Every subcommand reads one JSON config (`--config`), writes JSON or CSV to
//! `--out` (atomically) or stdout, and returns an exit code: 0 when every
//! checked property holds, 1 when one fails, 2 on malformed input and 3 when
//! an enumeration guard trips.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::channel::{ChannelSpec, MarkovSpecJson};
use crate::dist::{Distribution, JointDist};
use crate::error::Error;
use crate::hash::{orbit_criterion_all, verify_two_universal, FamilyDescriptor};
use crate::info::{phi_extended, psi, LN_2};
use crate::layout::SubsetIndex;
use crate::pa::pa_check;
use crate::region::{
    bcc_membership, bcd_membership, certificate_csv, leakage_exponent, optimize_exponent, region_scan,
    smc_membership, BccRates, RateTuple, ScanConfig,
};
use crate::report::{fmt_num, CsvTable};
use crate::sim::{simulate, SimConfig};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_GUARD: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "secmux", version, about = "Secure multiplex coding toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for randomized commands.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; written atomically. Defaults to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Caps the number of worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Report information quantities in bits instead of nats.
    #[arg(long, global = true)]
    bits: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Hash-family checks.
    Hash {
        #[command(subcommand)]
        command: HashCommand,
    },
    /// Privacy-amplification checks.
    Pa {
        #[command(subcommand)]
        command: PaCommand,
    },
    /// Evaluates psi(rho, W, P).
    Psi,
    /// Evaluates phi(rho, W, P); rho = 1 uses the limit.
    Phi,
    /// Rate regions.
    Region {
        #[command(subcommand)]
        command: RegionCommand,
    },
    /// Leakage exponent and its optimum over rho.
    Exponent,
    /// Exact finite-n multiplex simulation.
    Simulate,
}

#[derive(Subcommand, Debug)]
enum HashCommand {
    /// Exhaustive two-universality and orbit checks.
    Verify,
}

#[derive(Subcommand, Debug)]
enum PaCommand {
    /// Exact left side versus the bound.
    Check,
}

#[derive(Subcommand, Debug)]
enum RegionCommand {
    /// Grid scan over auxiliary distributions.
    Scan,
    /// Membership certificate for one rate point.
    Member,
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Guard(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_guard() {
            Failure::Guard(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

struct Outcome {
    json: Value,
    csv: String,
    pass: bool,
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be >= 1");
            return EXIT_INPUT;
        }
        // Fails only if the pool was already built in this process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match dispatch(&cli).and_then(|o| emit(&cli, o)) {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_FAIL,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            EXIT_INPUT
        }
        Err(Failure::Guard(msg)) => {
            eprintln!("error: {msg}");
            EXIT_GUARD
        }
    }
}

fn dispatch(cli: &Cli) -> CliResult<Outcome> {
    let scale = if cli.bits { LN_2 } else { 1.0 };
    match &cli.command {
        Command::Hash { command: HashCommand::Verify } => hash_verify(load(cli)?),
        Command::Pa { command: PaCommand::Check } => pa(load(cli)?),
        Command::Psi => functional(load(cli)?, scale, false),
        Command::Phi => functional(load(cli)?, scale, true),
        Command::Region { command: RegionCommand::Scan } => scan(load(cli)?, scale),
        Command::Region { command: RegionCommand::Member } => member(load(cli)?, scale),
        Command::Exponent => exponent(load(cli)?, scale),
        Command::Simulate => {
            let seed = cli
                .seed
                .ok_or_else(|| Failure::Input("simulate needs --seed".into()))?;
            let cfg: SimConfig = load(cli)?;
            let report = simulate(&cfg, seed)?;
            Ok(Outcome {
                csv: report.to_csv(scale),
                pass: report.pass(),
                json: to_value(&report),
            })
        }
    }
}

fn load<T: DeserializeOwned>(cli: &Cli) -> CliResult<T> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Failure::Input("--config is required".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

/// Keys whose numeric contents are information quantities in nats.
const INFO_KEYS: &[&str] = &[
    "average_leakage",
    "bound",
    "conditional_entropy",
    "conditional_entropy_given_common",
    "ensemble_bound",
    "epsilon",
    "equivocation_floor",
    "equivocation_rate",
    "i_uy",
    "i_uz",
    "i_vy_given_u",
    "i_vz_given_u",
    "leakage",
    "leakage_given_common",
    "leakage_rate_bound",
    "leakage_thresholds",
    "log_size",
    "log_sum",
    "log_term",
    "mean_equivocation_rate",
    "mean_leakage",
    "member_information",
    "r0",
    "r_0",
    "r_i",
    "r_p",
    "r_total",
    "re",
    "slack",
    "value",
];

fn scale_all(v: &mut Value, scale: f64) {
    match v {
        Value::Number(n) => {
            if let Some(x) = n.as_f64() {
                *v = json!(x / scale);
            }
        }
        Value::Array(a) => a.iter_mut().for_each(|x| scale_all(x, scale)),
        Value::Object(o) => o.values_mut().for_each(|x| scale_all(x, scale)),
        _ => {}
    }
}

fn scale_info(v: &mut Value, scale: f64) {
    match v {
        Value::Array(a) => a.iter_mut().for_each(|x| scale_info(x, scale)),
        Value::Object(o) => {
            for (k, x) in o.iter_mut() {
                if INFO_KEYS.contains(&k.as_str()) {
                    scale_all(x, scale);
                } else {
                    scale_info(x, scale);
                }
            }
        }
        _ => {}
    }
}

fn emit(cli: &Cli, outcome: Outcome) -> CliResult<bool> {
    let text = match cli.format {
        Format::Csv => outcome.csv,
        Format::Json => {
            let mut result = outcome.json;
            if cli.bits {
                scale_info(&mut result, LN_2);
            }
            let doc = json!({
                "units": if cli.bits { "bits" } else { "nats" },
                "pass": outcome.pass,
                "result": result,
            });
            serde_json::to_string_pretty(&doc).expect("json values serialize") + "\n"
        }
    };
    match &cli.out {
        Some(path) => write_atomic(path, text.as_bytes())
            .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure::Input(format!("cannot write stdout: {e}")))?;
        }
    }
    Ok(outcome.pass)
}

/// Writes to a temporary file in the target directory, then renames it.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

fn yes() -> bool {
    true
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HashVerifyConfig {
    family: FamilyDescriptor,
    /// Defaults to every nonempty subset of `{1..T+1}`.
    #[serde(default)]
    subsets: Option<Vec<SubsetIndex>>,
    /// Also run the orbit criterion (linear families only).
    #[serde(default = "yes")]
    orbit: bool,
}

fn hash_verify(cfg: HashVerifyConfig) -> CliResult<Outcome> {
    let family = cfg.family.build()?;
    let subsets = cfg.subsets.unwrap_or_else(|| family.layout().all_subsets());
    let mut table = CsvTable::new(["subset", "max_ratio", "bound", "pass", "orbit_pass"]);
    let mut reports = Vec::new();
    let mut pass = true;
    for s in subsets {
        let r = verify_two_universal(&family, s)?;
        let orbit = if cfg.orbit && family.is_linear() {
            Some(orbit_criterion_all(&family, s)?.0)
        } else {
            None
        };
        pass &= r.pass;
        table.push(vec![
            s.label(),
            format!("{}/{}", r.max_ratio.numer(), r.max_ratio.denom()),
            format!("{}/{}", r.bound.numer(), r.bound.denom()),
            r.pass.to_string(),
            orbit.map_or(String::new(), |o| o.to_string()),
        ]);
        let mut v = to_value(&r);
        v["orbit_pass"] = json!(orbit);
        reports.push(v);
    }
    Ok(Outcome {
        json: json!({ "family": cfg.family, "size": family.size().to_string(), "subsets": reports }),
        csv: table.render(),
        pass,
    })
}

/// A joint over `(L, Z)`: either a channel driven by a prior (uniform by
/// default) or an explicit table.
#[derive(Deserialize)]
#[serde(untagged)]
enum JointSpec {
    Channel {
        channel: ChannelSpec,
        #[serde(default)]
        prior: Option<Vec<f64>>,
    },
    Table {
        dims: Vec<usize>,
        probs: Vec<f64>,
    },
}

impl JointSpec {
    fn build(&self, channels: &BTreeMap<String, ChannelSpec>) -> crate::Result<JointDist> {
        match self {
            JointSpec::Channel { channel, prior } => {
                let ch = channel.build(channels)?;
                let prior = match prior {
                    Some(p) => Distribution::new(p.clone())?,
                    None => Distribution::uniform(ch.inputs()),
                };
                ch.joint(&prior)
            }
            JointSpec::Table { dims, probs } => JointDist::new(dims.clone(), probs.clone()),
        }
    }
}

fn default_tolerance() -> f64 {
    1e-10
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PaConfig {
    family: FamilyDescriptor,
    joint: JointSpec,
    #[serde(default)]
    channels: BTreeMap<String, ChannelSpec>,
    rho: Vec<f64>,
    #[serde(default)]
    subsets: Option<Vec<SubsetIndex>>,
    /// A check fails when `lhs > rhs + tolerance`.
    #[serde(default = "default_tolerance")]
    tolerance: f64,
}

fn pa(cfg: PaConfig) -> CliResult<Outcome> {
    let family = cfg.family.build()?;
    let joint = cfg.joint.build(&cfg.channels)?;
    if cfg.rho.is_empty() {
        return Err(Failure::Input("empty rho list".into()));
    }
    let subsets = cfg.subsets.unwrap_or_else(|| family.layout().all_subsets());
    let mut table = CsvTable::new([
        "subset", "rho", "lhs", "rhs", "margin", "general", "uniform", "discrete", "pass",
    ]);
    let mut rows = Vec::new();
    let mut pass = true;
    for &s in &subsets {
        for &rho in &cfg.rho {
            let r = pa_check(&family, rho, &joint, s)?;
            let margin = r.margin().expect("lhs evaluated");
            let ok = margin >= -cfg.tolerance;
            pass &= ok;
            let opt = |x: Option<f64>| x.map_or(String::new(), fmt_num);
            table.push(vec![
                s.label(),
                fmt_num(rho),
                opt(r.lhs_exact),
                fmt_num(r.rhs_bound),
                fmt_num(margin),
                fmt_num(r.forms.general),
                opt(r.forms.uniform),
                opt(r.forms.discrete),
                ok.to_string(),
            ]);
            let mut v = to_value(&r);
            v["subset"] = to_value(&s);
            v["pass"] = json!(ok);
            rows.push(v);
        }
    }
    Ok(Outcome {
        json: json!({ "checks": rows }),
        csv: table.render(),
        pass,
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionalConfig {
    channel: ChannelSpec,
    /// Defaults to uniform.
    #[serde(default)]
    prior: Option<Vec<f64>>,
    #[serde(default)]
    channels: BTreeMap<String, ChannelSpec>,
    rho: Vec<f64>,
}

fn functional(cfg: FunctionalConfig, scale: f64, is_phi: bool) -> CliResult<Outcome> {
    let ch = cfg.channel.build(&cfg.channels)?;
    let prior = match cfg.prior {
        Some(p) => Distribution::new(p)?,
        None => Distribution::uniform(ch.inputs()),
    };
    let mut table = CsvTable::new(["rho", "value"]);
    let mut rows = Vec::new();
    for &rho in &cfg.rho {
        let value = if is_phi {
            phi_extended(rho, &ch, &prior)?
        } else {
            psi(rho, &ch, &prior)?
        };
        table.push(vec![fmt_num(rho), fmt_num(value / scale)]);
        rows.push(json!({ "rho": rho, "value": value }));
    }
    Ok(Outcome {
        json: json!({ "function": if is_phi { "phi" } else { "psi" }, "points": rows }),
        csv: table.render(),
        pass: true,
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScanCommandConfig {
    bob: ChannelSpec,
    eve: ChannelSpec,
    #[serde(default)]
    channels: BTreeMap<String, ChannelSpec>,
    scan: ScanConfig,
}

fn scan(cfg: ScanCommandConfig, scale: f64) -> CliResult<Outcome> {
    let bob = cfg.bob.build(&cfg.channels)?;
    let eve = cfg.eve.build(&cfg.channels)?;
    let result = region_scan(&bob, &eve, cfg.scan)?;
    Ok(Outcome {
        csv: result.to_csv(scale),
        json: to_value(&result),
        pass: true,
    })
}

#[derive(Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum MemberRates {
    Bcc(BccRates),
    Bcd { r0: f64, r1: f64 },
    Smc(RateTuple),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MemberConfig {
    markov: MarkovSpecJson,
    bob: ChannelSpec,
    eve: ChannelSpec,
    #[serde(default)]
    channels: BTreeMap<String, ChannelSpec>,
    rates: MemberRates,
}

fn member(cfg: MemberConfig, scale: f64) -> CliResult<Outcome> {
    let spec = cfg.markov.build(&cfg.channels)?;
    let bob = cfg.bob.build(&cfg.channels)?;
    let eve = cfg.eve.build(&cfg.channels)?;
    let cert = match &cfg.rates {
        MemberRates::Bcc(r) => bcc_membership(*r, &spec, &bob, &eve)?,
        MemberRates::Bcd { r0, r1 } => bcd_membership(*r0, *r1, &spec, &bob, &eve)?,
        MemberRates::Smc(r) => smc_membership(r, &spec, &bob, &eve)?,
    };
    Ok(Outcome {
        csv: certificate_csv(&cert, scale),
        pass: cert.pass,
        json: to_value(&cert),
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExponentConfig {
    markov: MarkovSpecJson,
    eve: ChannelSpec,
    #[serde(default)]
    channels: BTreeMap<String, ChannelSpec>,
    r_i: f64,
    r_p: f64,
    /// Points to evaluate in addition to the optimum.
    #[serde(default)]
    rho: Vec<f64>,
}

fn exponent(cfg: ExponentConfig, scale: f64) -> CliResult<Outcome> {
    let spec = cfg.markov.build(&cfg.channels)?;
    let eve = cfg.eve.build(&cfg.channels)?;
    let joint = spec.uvz_joint(&eve)?;
    let points = cfg
        .rho
        .iter()
        .map(|&rho| leakage_exponent(rho, cfg.r_i, cfg.r_p, &joint))
        .collect::<crate::Result<Vec<_>>>()?;
    let opt = optimize_exponent(cfg.r_i, cfg.r_p, &joint)?;
    let mut table = CsvTable::new(["kind", "rho", "value"]);
    for p in &points {
        table.push(vec!["point".into(), fmt_num(p.rho), fmt_num(p.value / scale)]);
    }
    table.push(vec!["optimum".into(), fmt_num(opt.rho), fmt_num(opt.value / scale)]);
    let grid: Vec<Value> = opt
        .grid
        .iter()
        .map(|&(rho, value)| json!({ "rho": rho, "value": value }))
        .collect();
    Ok(Outcome {
        json: json!({
            "points": points,
            "optimum": { "rho": opt.rho, "value": opt.value, "grid": grid },
        }),
        csv: table.render(),
        pass: true,
    })
}
