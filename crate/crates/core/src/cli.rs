//! Command-line front end.
//!
//! Exit codes: `0` success (for `classify`: separable), `1` negative outcome
//! (entangled, witness not found, self-test failure), `2` bad input.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::bell::{
    bell_params, classical_bound, classify_nonlocal_with, optimize_angles, q_ds, BellVerdict,
    DeviceAngles, Objective, DEFAULT_BELL_TOL,
};
use crate::ds_state::{jc_coefficients, jc_state, make_ds, DSState};
use crate::error::{Error, Result};
use crate::optimize::AngleSearch;
use crate::oracle::{dense_ds, dense_ppt, dense_pt, first_qubits, MAX_QUBITS};
use crate::scan::{
    emit, find_target, peres_report, scan, Format, FrontierAgreement, Region, ScanConfig,
    StrataCounts, Target,
};
use crate::selftest;
use crate::separability::{
    classify_with, n4_inequalities, n4_inequalities_raw, ppt_at, ClassifyOptions, Convention,
    Verdict, DEFAULT_PSD_TOL, DEFAULT_RANK_TOL,
};

/// Relative `--out` paths resolve against this directory when set.
pub const OUT_DIR_ENV: &str = "DICKE_PPT_OUT_DIR";

#[derive(Parser, Debug)]
#[command(
    name = "dicke-ppt",
    version,
    about = "Separability and Bell nonlocality of Dicke-diagonal states"
)]
pub struct Cli {
    /// JSON file with default tolerances, resolution, format and workers.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Fill the Hankel windows with raw p instead of p / C(n, k).
    #[arg(long, global = true)]
    force_p_convention: bool,
    #[arg(long, global = true)]
    psd_tol: Option<f64>,
    #[arg(long, global = true)]
    rank_tol: Option<f64>,
    #[arg(long, global = true)]
    bell_tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide separability of a DS state.
    Classify {
        #[command(flatten)]
        state: StateArgs,
        /// Write the dense partial transpose across the balanced cut as CSV.
        #[arg(long)]
        dump_pt: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate or optimize the two-body Bell inequality.
    Bell {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long)]
        k_ref: Option<usize>,
        #[arg(long, allow_negative_numbers = true)]
        theta: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        phi: Option<f64>,
        /// Minimize over angles (and over operators unless --k-ref is given).
        #[arg(long)]
        optimize: bool,
        /// One orientation for all entangled Dicke states, each under its
        /// own operator.
        #[arg(long)]
        common: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Grid scan of the four-qubit simplex.
    Scan {
        #[command(subcommand)]
        region: ScanRegion,
    },
    /// Search a simplex cut for a state with a given property.
    Witness {
        #[arg(long, value_enum, default_value = "peres")]
        target: Target,
        #[arg(long, default_value_t = 0.1)]
        p0: f64,
        #[arg(long, default_value_t = 0.1)]
        p4: f64,
        #[arg(long)]
        res: Option<usize>,
        /// Where to write the report when no Peres witness exists.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Run the built-in consistency suites.
    Selftest {
        #[arg(long)]
        quick: bool,
    },
}

#[derive(Subcommand, Debug)]
enum ScanRegion {
    /// Fixed s = p0 + p4.
    Slice {
        #[arg(long)]
        s: f64,
        #[command(flatten)]
        opts: ScanArgs,
    },
    /// Fixed p0 and p4.
    Simplex {
        #[arg(long)]
        p0: f64,
        #[arg(long)]
        p4: f64,
        #[command(flatten)]
        opts: ScanArgs,
    },
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[arg(long)]
    res: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<OutFormat>,
    /// Also write a gnuplot script here, reading the CSV named after it.
    #[arg(long)]
    plot: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    /// Print a stratum summary to stderr.
    #[arg(long)]
    summary: bool,
}

#[derive(Args, Debug, Default)]
struct StateArgs {
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated weights p0..pN, normalized if needed.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    p: Option<Vec<f64>>,
    /// Jaynes-Cummings state with parameters a,b.
    #[arg(long, value_delimiter = ',')]
    jc: Option<Vec<f64>>,
    /// Pure Dicke state n,k.
    #[arg(long, value_delimiter = ',')]
    dicke: Option<Vec<usize>>,
    /// File holding {"n":..,"p":[..]} or a CSV line n,p0,..,pN.
    #[arg(long)]
    state: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutFormat {
    Csv,
    Json,
}

/// Defaults read from `--config`; flags take precedence.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub psd_tol: Option<f64>,
    pub rank_tol: Option<f64>,
    pub bell_tol: Option<f64>,
    pub resolution: Option<usize>,
    pub format: Option<OutFormat>,
    pub workers: Option<usize>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path)?;
        let cfg: Config = serde_json::from_str(&text).map_err(|e| Error::Parse {
            location: format!("{}:{}:{}", path.display(), e.line(), e.column()),
            message: e.to_string(),
        })?;
        for (name, v) in [
            ("psd_tol", cfg.psd_tol),
            ("rank_tol", cfg.rank_tol),
            ("bell_tol", cfg.bell_tol),
        ] {
            if v.is_some_and(|x| x.is_nan() || x <= 0.0) {
                return Err(Error::InvalidParams(format!("{name} must be positive")));
            }
        }
        if cfg.resolution.is_some_and(|r| r < 8) {
            return Err(Error::InvalidParams("resolution must be at least 8".into()));
        }
        Ok(cfg)
    }
}

struct Settings {
    classify: ClassifyOptions,
    bell_tol: f64,
    resolution: Option<usize>,
    format: Option<OutFormat>,
    workers: Option<usize>,
}

impl Settings {
    fn scan_config(&self, workers: Option<usize>) -> ScanConfig {
        ScanConfig {
            classify: self.classify,
            bell_tol: self.bell_tol,
            search: AngleSearch::default(),
            workers: workers.or(self.workers),
        }
    }
}

fn settings(cli: &Cli) -> Result<Settings> {
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let pick = |flag: Option<f64>, file: Option<f64>, default: f64| -> Result<f64> {
        let v = flag.or(file).unwrap_or(default);
        if v.is_nan() || v < 0.0 {
            return Err(Error::InvalidParams(format!("tolerance {v} must be >= 0")));
        }
        Ok(v)
    };
    Ok(Settings {
        classify: ClassifyOptions {
            psd_tol: pick(cli.psd_tol, cfg.psd_tol, DEFAULT_PSD_TOL)?,
            rank_tol: pick(cli.rank_tol, cfg.rank_tol, DEFAULT_RANK_TOL)?,
            convention: if cli.force_p_convention {
                Convention::LiteralP
            } else {
                Convention::Canonical
            },
        },
        bell_tol: pick(cli.bell_tol, cfg.bell_tol, DEFAULT_BELL_TOL)?,
        resolution: cfg.resolution,
        format: cfg.format,
        workers: cfg.workers,
    })
}

fn read_state(args: &StateArgs) -> Result<DSState> {
    let given = [
        args.p.is_some(),
        args.jc.is_some(),
        args.dicke.is_some(),
        args.state.is_some(),
    ];
    if given.iter().filter(|&&g| g).count() != 1 {
        return Err(Error::InvalidParams(
            "give exactly one of --p (with --n), --jc, --dicke, --state".into(),
        ));
    }
    if let Some(p) = &args.p {
        let n = args.n.unwrap_or(p.len().saturating_sub(1));
        return make_ds(n, p);
    }
    if let Some(ab) = &args.jc {
        return match ab.as_slice() {
            [a, b] => jc_state(*a, *b),
            _ => Err(Error::InvalidParams("--jc expects a,b".into())),
        };
    }
    if let Some(nk) = &args.dicke {
        return match nk.as_slice() {
            [n, k] => DSState::dicke(*n, *k),
            _ => Err(Error::InvalidParams("--dicke expects n,k".into())),
        };
    }
    let path = args.state.as_ref().expect("checked above");
    let text = std::fs::read_to_string(path)?;
    DSState::parse(&text).map_err(|e| match e {
        Error::Parse { location, message } => Error::Parse {
            location: format!("{}: {location}", path.display()),
            message,
        },
        other => other,
    })
}

fn resolve_out(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn write_text(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => {
            let p = resolve_out(p);
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)?;
            }
            std::fs::write(p, text)?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                stdout.write_all(b"\n")?;
            }
        }
    }
    Ok(())
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON value serializes")
}

fn cmd_classify(
    set: &Settings,
    state: &StateArgs,
    dump_pt: Option<&PathBuf>,
    out: Option<&PathBuf>,
) -> Result<i32> {
    let s = read_state(state)?;
    let report = classify_with(&s, &set.classify)?;
    let mut v = report.to_json();
    let obj = v.as_object_mut().expect("report is an object");
    obj.insert("n".into(), json!(s.n()));
    obj.insert("p".into(), json!(s.p()));
    obj.insert("renormalized".into(), json!(s.was_renormalized()));
    if s.n() == 4 {
        obj.insert("det_m0".into(), json!(n4_inequalities(&s)?.det_m0));
    }
    if let Some([a, b]) = state.jc.as_deref() {
        let v = n4_inequalities_raw(&jc_coefficients(*a, *b)?);
        obj.insert("E_unnormalized".into(), json!([v.e1, v.e2, v.e3, v.f2]));
    }
    if s.n() >= 2 && s.n() <= 10 {
        let mut oracle = serde_json::Map::new();
        for t in 1..=s.n() / 2 {
            oracle.insert(
                t.to_string(),
                json!(dense_ppt(&s, first_qubits(t), set.classify.psd_tol)?),
            );
        }
        obj.insert("oracle_ppt".into(), Value::Object(oracle));
    }
    if let Some(path) = dump_pt {
        if s.n() < 2 || s.n() > MAX_QUBITS {
            return Err(Error::SizeCap {
                n: s.n(),
                cap: MAX_QUBITS,
            });
        }
        let pt = dense_pt(&dense_ds(&s)?, first_qubits(s.n() / 2))?;
        write_text(Some(path), &pt.to_csv())?;
    }
    write_text(out, &pretty(&v))?;
    Ok(if report.verdict == Verdict::Entangled {
        1
    } else {
        0
    })
}

fn verdict_json(v: &BellVerdict, s: &DSState, set: &Settings) -> Result<Value> {
    let mut j = serde_json::to_value(v).expect("verdict serializes");
    if s.n() >= 2 {
        j["ppt1"] = json!(ppt_at(s, 1, set.classify.psd_tol, set.classify.convention)?);
    }
    Ok(j)
}

#[allow(clippy::too_many_arguments)]
fn cmd_bell(
    set: &Settings,
    state: &StateArgs,
    k_ref: Option<usize>,
    theta: Option<f64>,
    phi: Option<f64>,
    optimize: bool,
    common: bool,
    out: Option<&PathBuf>,
) -> Result<i32> {
    let search = AngleSearch::default();
    if common {
        let n = match (&state.dicke, state.n) {
            (Some(nk), _) if !nk.is_empty() => nk[0],
            (_, Some(n)) => n,
            _ => return Err(Error::InvalidParams("--common needs --n or --dicke".into())),
        };
        let (a, worst) = optimize_angles(&Objective::CommonDicke { n }, &search)?;
        let per_k: Vec<Value> = (1..n)
            .map(|k| -> Result<Value> {
                let q = crate::bell::q_dicke(n, k, &bell_params(n, k)?, &a)?;
                Ok(json!({"k": k, "q": q}))
            })
            .collect::<Result<_>>()?;
        let v = json!({"theta": a.theta(), "phi": a.phi(), "max_q": worst, "dicke": per_k});
        write_text(out, &pretty(&v))?;
        return Ok(0);
    }

    let s = read_state(state)?;
    let default_k = || match &state.dicke {
        Some(nk) if nk.len() == 2 => nk[1],
        _ => s.n() / 2,
    };
    let verdict = if optimize {
        match k_ref {
            None => classify_nonlocal_with(&s, set.bell_tol, &search)?,
            Some(k) => {
                let params = bell_params(s.n(), k)?;
                let (angles, q) =
                    optimize_angles(&Objective::Mixture { state: &s, params }, &search)?;
                BellVerdict {
                    q_value: q,
                    violated: q < classical_bound(&params) - set.bell_tol,
                    params,
                    angles,
                }
            }
        }
    } else {
        let (Some(t), Some(p)) = (theta, phi) else {
            return Err(Error::InvalidParams(
                "give --theta and --phi, or --optimize".into(),
            ));
        };
        let params = bell_params(s.n(), k_ref.unwrap_or_else(default_k))?;
        let angles = DeviceAngles::new(t, p)?;
        let q = q_ds(&s, &params, &angles)?;
        BellVerdict {
            q_value: q,
            violated: q < classical_bound(&params) - set.bell_tol,
            params,
            angles,
        }
    };
    write_text(out, &pretty(&verdict_json(&verdict, &s, set)?))?;
    Ok(0)
}

fn cmd_scan(set: &Settings, region: &ScanRegion) -> Result<i32> {
    let (region, opts) = match region {
        ScanRegion::Slice { s, opts } => (
            Region::Slice {
                s: *s,
                res: opts.res.or(set.resolution).unwrap_or(64),
            },
            opts,
        ),
        ScanRegion::Simplex { p0, p4, opts } => (
            Region::Simplex {
                p0: *p0,
                p4: *p4,
                res: opts.res.or(set.resolution).unwrap_or(128),
            },
            opts,
        ),
    };
    region.validate()?;
    let cfg = set.scan_config(opts.workers);
    let records = scan(&region, &cfg)?;
    let format = match opts.format.or(set.format) {
        Some(OutFormat::Json) => Format::Json,
        _ => Format::Csv,
    };
    match &opts.out {
        Some(p) => {
            let p = resolve_out(p);
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)?;
            }
            emit(&records, format, &p)?;
        }
        None => {
            let text = match format {
                Format::Json => crate::scan::to_json(&records),
                _ => crate::scan::to_csv(&records)?,
            };
            write_text(None, &text)?;
        }
    }
    if let Some(plot) = &opts.plot {
        emit(&records, Format::Gnuplot, &resolve_out(plot))?;
    }
    if opts.summary {
        let summary = json!({
            "counts": StrataCounts::of(&records),
            "separable_fraction": StrataCounts::of(&records).separable_fraction(),
            "frontier": FrontierAgreement::of(&records, set.classify.psd_tol),
        });
        eprintln!("{}", pretty(&summary));
    }
    Ok(0)
}

fn cmd_witness(
    set: &Settings,
    target: Target,
    p0: f64,
    p4: f64,
    res: Option<usize>,
    report: Option<&PathBuf>,
    workers: Option<usize>,
) -> Result<i32> {
    let res = res.or(set.resolution).unwrap_or(128);
    let region = Region::Simplex { p0, p4, res };
    region.validate()?;
    let cfg = set.scan_config(workers);
    if target == Target::Peres {
        let rep = peres_report(p0, p4, res, &cfg)?;
        eprint!("{rep}");
        if let Some(path) = report {
            write_text(
                Some(path),
                &serde_json::to_string_pretty(&rep).expect("report serializes"),
            )?;
        }
        return Ok(match rep.witness() {
            Some((conv, w)) => {
                write_text(None, &pretty(&json!({"convention": conv, "record": w})))?;
                0
            }
            None => 1,
        });
    }
    match find_target(&region, &cfg, target) {
        Ok(w) => {
            write_text(
                None,
                &pretty(&serde_json::to_value(&w).expect("record serializes")),
            )?;
            Ok(0)
        }
        Err(Error::NotFound(msg)) => {
            eprintln!("not found: {msg}");
            Ok(1)
        }
        Err(e) => Err(e),
    }
}

fn cmd_selftest(set: &Settings, quick: bool) -> Result<i32> {
    let results = selftest::run(quick, &set.classify);
    let mut all = true;
    for r in &results {
        all &= r.passed;
        println!(
            "{:<4} {:<34} {:>8.2?}  {}",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.elapsed,
            r.detail
        );
    }
    println!(
        "{} of {} suites passed",
        results.iter().filter(|r| r.passed).count(),
        results.len()
    );
    Ok(if all { 0 } else { 1 })
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let outcome = settings(&cli).and_then(|set| match &cli.command {
        Command::Classify {
            state,
            dump_pt,
            out,
        } => cmd_classify(&set, state, dump_pt.as_ref(), out.as_ref()),
        Command::Bell {
            state,
            k_ref,
            theta,
            phi,
            optimize,
            common,
            out,
        } => cmd_bell(
            &set,
            state,
            *k_ref,
            *theta,
            *phi,
            *optimize,
            *common,
            out.as_ref(),
        ),
        Command::Scan { region } => cmd_scan(&set, region),
        Command::Witness {
            target,
            p0,
            p4,
            res,
            report,
            workers,
        } => cmd_witness(&set, *target, *p0, *p4, *res, report.as_ref(), *workers),
        Command::Selftest { quick } => cmd_selftest(&set, *quick),
    });
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
