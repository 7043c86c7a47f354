//! Command-line front end: composite roots, class systems, series,
//! verification and asymptotic constants.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context as _, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use polydiss::analytic::report::SERIES_TERMS;
use polydiss::analytic::{dissection_report, limit_law_report, outerplanar_report, AsymptoticReport};
use polydiss::fixtures::{count_columns, polynomial};
use polydiss::occurrence::DEFAULT_ORACLE_LIMIT;
use polydiss::pattern::{Pattern, PatternSet, PatternSpec};
use polydiss::roots::{generate_composite_roots, Mode, DEFAULT_H_CAP};
use polydiss::series::unrestricted_series;
use polydiss::solve::{check_system_against_census, solve_at, solve_marked};
use polydiss::system::{build_system, ClassSystem, TOTAL};
use polydiss::verify::{run_all, run_criterion};

#[derive(Parser)]
#[command(name = "polydiss", version, about = "Pattern-restricted polygon dissections: systems, series and asymptotics")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum, Default)]
enum ModeArg {
    #[default]
    Full,
    Avoid,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Full => Mode::Full,
            ModeArg::Avoid => Mode::Avoiding,
        }
    }
}

#[derive(Clone, Copy, ValueEnum, Default, PartialEq)]
enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct Common {
    /// Comma-separated pattern names (C3..C8, patternI, patternII) or JSON pattern files.
    #[arg(long, value_delimiter = ',')]
    patterns: Vec<String>,
    #[arg(long, value_enum, default_value_t)]
    mode: ModeArg,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Maximal composite roots with edge classes.
    Roots(Common),
    /// Grouped class system.
    System {
        #[command(flatten)]
        common: Common,
        /// Keep one variable per composite root.
        #[arg(long)]
        ungrouped: bool,
    },
    /// Coefficients of D; no patterns means unrestricted dissections.
    Series {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 20)]
        terms: usize,
        /// Keep occurrence marks symbolic.
        #[arg(long)]
        mark: bool,
    },
    /// Cross-checks against the census, fixtures or the full acceptance suite.
    Check {
        #[command(flatten)]
        common: Common,
        /// Largest n for the census comparison.
        #[arg(long, default_value_t = 10)]
        oracle_max: usize,
        /// Allow census sizes above the default limit.
        #[arg(long)]
        force: bool,
        /// p3, p4 or appendix.
        #[arg(long)]
        fixture: Option<String>,
        /// Series depth for polynomial fixtures.
        #[arg(long, default_value_t = 30)]
        terms: usize,
        /// System JSON to check instead of a generated one.
        #[arg(long)]
        system: Option<PathBuf>,
        /// Replay every acceptance criterion.
        #[arg(long)]
        all: bool,
        /// Replay a single acceptance criterion.
        #[arg(long)]
        criterion: Option<u8>,
    },
    /// Growth constants r and alpha.
    Constants(ReportArgs),
    /// Limit-law constants mu, sigma^2 and the covariance matrix.
    Limitlaw(ReportArgs),
    /// Outerplanar transfer: tau, rho, g or the limit-law constants.
    Outerplanar(ReportArgs),
}

#[derive(Args)]
struct ReportArgs {
    #[command(flatten)]
    common: Common,
    /// Series length for truncated sums and tail diagnostics.
    #[arg(long, default_value_t = SERIES_TERMS)]
    terms: usize,
    /// Digits after the decimal point in text output.
    #[arg(long, default_value_t = 15)]
    precision: usize,
}

/// Input problems exit with 2, failed checks with 1.
enum Failure {
    Input(anyhow::Error),
    Numeric(String),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.into())
    }
}

fn load_patterns(items: &[String]) -> Result<Vec<Pattern>> {
    let mut out = Vec::new();
    for item in items.iter().map(|s| s.trim()).filter(|s| !s.is_empty()) {
        if let Ok(p) = Pattern::by_name(item) {
            out.push(p);
            continue;
        }
        let path = Path::new(item);
        if !path.exists() {
            bail!("unknown pattern name or missing file: {item}");
        }
        let text = fs::read_to_string(path).with_context(|| format!("reading {item}"))?;
        let v: Value = serde_json::from_str(&text).with_context(|| format!("parsing {item}"))?;
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("pattern");
        let specs: Vec<PatternSpec> = match v {
            Value::Array(_) => serde_json::from_value(v)?,
            other => vec![serde_json::from_value(other)?],
        };
        for (i, s) in specs.iter().enumerate() {
            let name = if specs.len() == 1 { stem.to_string() } else { format!("{stem}{}", i + 1) };
            out.push(s.resolve(&name).with_context(|| format!("pattern file {item}"))?);
        }
    }
    Ok(out)
}

fn pattern_set(c: &Common) -> Result<PatternSet> {
    let ps = load_patterns(&c.patterns)?;
    if ps.is_empty() {
        bail!("--patterns is required");
    }
    Ok(PatternSet::new(ps)?)
}

fn emit(c: &Common, text: String) -> Result<()> {
    match &c.out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json") + "\n"
}

fn cmd_roots(c: &Common) -> Result<(), Failure> {
    let set = pattern_set(c)?;
    let cat = generate_composite_roots(&set, c.mode.into(), DEFAULT_H_CAP)?;
    let text = match c.format {
        Format::Json => pretty(&cat.to_json()),
        Format::Csv => {
            let mut s = String::from("label,chords,edge_classes,maximal\n");
            for r in &cat.roots {
                s += &format!("{},{:?},{:?},{}\n", r.label(), r.root.chords(), r.edge_class, r.maximal).replace(", ", " ");
            }
            s
        }
        Format::Text => {
            let mut s = format!("{} composite roots (H = {}, {:?})\n", cat.roots.len(), cat.h, cat.mode);
            for r in &cat.roots {
                let classes: String = r.edge_class.iter().map(|e| format!("{e:?}").chars().next().unwrap_or('?')).collect();
                s += &format!("{:<8} chords {:?} edges {classes}\n", r.label(), r.root.chords());
            }
            s
        }
    };
    emit(c, text)?;
    Ok(())
}

fn system_for(c: &Common, grouped: bool) -> Result<(PatternSet, ClassSystem)> {
    let set = pattern_set(c)?;
    let sys = build_system(&set, c.mode.into(), DEFAULT_H_CAP)?;
    Ok((set, if grouped { sys.group_classes() } else { sys }))
}

fn cmd_system(c: &Common, ungrouped: bool) -> Result<(), Failure> {
    let (_, sys) = system_for(c, !ungrouped)?;
    let text = match c.format {
        Format::Json => pretty(&sys.to_json()),
        _ => sys.to_string(),
    };
    emit(c, text)?;
    Ok(())
}

fn cmd_series(c: &Common, terms: usize, mark: bool) -> Result<(), Failure> {
    if terms < 2 {
        return Err(Failure::Input(anyhow!("--terms must be at least 2")));
    }
    // rows of (n, coefficient text)
    let rows: Vec<(usize, String)> = if c.patterns.is_empty() {
        let d = unrestricted_series(terms);
        (2..=terms).map(|n| (n, d.coeff(n).to_string())).collect()
    } else {
        let (_, sys) = system_for(c, true)?;
        if mark && sys.m() > 0 {
            let s = solve_marked(&sys, terms - 1)?;
            (2..=terms).map(|n| (n, s[TOTAL].coeff(n - 1).to_string())).collect()
        } else {
            let s = solve_at(&sys, terms - 1, &vec![1; sys.m()])?;
            (2..=terms).map(|n| (n, s[TOTAL].coeff(n - 1).to_string())).collect()
        }
    };
    let text = match c.format {
        Format::Json => pretty(&json!(rows.iter().map(|(n, v)| json!({"n": n, "coefficient": v})).collect::<Vec<_>>())),
        Format::Csv => std::iter::once("n,coefficient\n".to_string()).chain(rows.iter().map(|(n, v)| format!("{n},\"{v}\"\n"))).collect(),
        Format::Text => rows.iter().map(|(n, v)| format!("{n:>4}  {v}\n")).collect(),
    };
    emit(c, text)?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_check(
    c: &Common,
    oracle_max: usize,
    force: bool,
    fixture: Option<&str>,
    terms: usize,
    system: Option<&Path>,
    all: bool,
    criterion: Option<u8>,
) -> Result<(), Failure> {
    let mut lines = Vec::new();
    let mut ok = true;
    if all || criterion.is_some() {
        let results = match criterion {
            Some(id) => vec![run_criterion(id).ok_or_else(|| anyhow!("no criterion {id}; use 1..9"))?],
            None => run_all(),
        };
        for r in results {
            ok &= r.passed();
            lines.push(r.line());
            for f in r.failures() {
                lines.push(format!("    {}: {}", f.name, f.detail));
            }
        }
    } else if let Some(name) = fixture {
        match name {
            "appendix" => {
                for col in count_columns() {
                    let names: Vec<&str> = col.patterns.iter().map(String::as_str).collect();
                    let sys = build_system(&PatternSet::from_names(&names)?, Mode::Avoiding, DEFAULT_H_CAP)?.group_classes();
                    let s = solve_at(&sys, col.counts.len(), &[])?;
                    let good = (0..col.counts.len()).all(|i| *s[TOTAL].coeff(i + 1) == col.counts[i].into());
                    ok &= good;
                    lines.push(format!("{} {}", if good { "PASS" } else { "FAIL" }, col.patterns.join(",")));
                }
            }
            _ => {
                let p = polynomial(name).ok_or_else(|| anyhow!("unknown fixture {name}; use p3, p4 or appendix"))?;
                let (_, sys) = system_for(c, true)?;
                if sys.m() != 1 {
                    return Err(Failure::Input(anyhow!("polynomial fixtures need exactly one marked pattern")));
                }
                let s = solve_marked(&sys, terms)?;
                let res = p.residual(&s[TOTAL].shift_up(), terms);
                let bad = res.coeffs().iter().position(|x| !polydiss::coeff::Coeff::is_zero(x));
                ok = bad.is_none();
                lines.push(match bad {
                    None => format!("PASS {name} annihilates D through z^{terms}"),
                    Some(k) => format!("FAIL {name} residual nonzero at z^{k}"),
                });
            }
        }
    } else {
        if oracle_max > DEFAULT_ORACLE_LIMIT && !force {
            return Err(Failure::Input(anyhow!("--oracle-max {oracle_max} exceeds {DEFAULT_ORACLE_LIMIT}; pass --force")));
        }
        let limit = if force { oracle_max.max(DEFAULT_ORACLE_LIMIT) } else { DEFAULT_ORACLE_LIMIT };
        let set = pattern_set(c)?;
        let sys = match system {
            Some(p) => {
                let v: Value = serde_json::from_str(&fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?)?;
                ClassSystem::from_json(&v)?
            }
            None => build_system(&set, Mode::Full, DEFAULT_H_CAP)?.group_classes(),
        };
        match check_system_against_census(&sys, &set, oracle_max, limit) {
            Ok(k) => lines.push(format!("PASS census agrees for n = 2..{oracle_max} ({k} sizes)")),
            Err(polydiss::solve::CrosscheckError::Census(e)) => return Err(Failure::Input(e.into())),
            Err(e) => {
                ok = false;
                lines.push(format!("FAIL {e}"));
            }
        }
    }
    let text = match c.format {
        Format::Json => pretty(&json!({"passed": ok, "lines": lines})),
        _ => lines.iter().map(|l| format!("{l}\n")).collect(),
    };
    emit(c, text)?;
    if ok {
        Ok(())
    } else {
        Err(Failure::Numeric("verification failed".into()))
    }
}

fn report_text(r: &AsymptoticReport, digits: usize) -> String {
    let v = r.to_json();
    let mut s = String::new();
    let obj = v.as_object().expect("object");
    for (k, val) in obj {
        if k == "diagnostics" {
            continue;
        }
        let shown = match val {
            Value::Number(n) => format!("{:.*}", digits, n.as_f64().unwrap_or(f64::NAN)),
            Value::Array(a) => a
                .iter()
                .map(|x| match x {
                    Value::Number(n) => format!("{:.*}", digits, n.as_f64().unwrap_or(f64::NAN)),
                    Value::String(t) => t.clone(),
                    other => other.to_string(),
                })
                .collect::<Vec<_>>()
                .join(" "),
            other => other.to_string().trim_matches('"').to_string(),
        };
        s += &format!("{k:<10} {shown}\n");
    }
    s += &format!("diagnostics {}\n", obj["diagnostics"]);
    s
}

fn cmd_report(a: &ReportArgs, kind: &str) -> Result<(), Failure> {
    if a.precision < 15 {
        return Err(Failure::Input(anyhow!("--precision must be at least 15 digits")));
    }
    if a.terms < 200 {
        return Err(Failure::Input(anyhow!("--terms must be at least 200 for the tail diagnostics")));
    }
    let set = pattern_set(&a.common)?;
    let mode: Mode = a.common.mode.into();
    let rep = match kind {
        "constants" => dissection_report(&set, mode, a.terms),
        "limitlaw" => limit_law_report(&set),
        _ => outerplanar_report(&set, mode, a.terms),
    }
    .map_err(|e| match e {
        polydiss::analytic::ReportError::System(e) => Failure::Input(e.into()),
        polydiss::analytic::ReportError::Analytic(e) => Failure::Numeric(e.to_string()),
    })?;
    let text = match a.common.format {
        Format::Json | Format::Csv => pretty(&rep.to_json()),
        Format::Text => report_text(&rep, a.precision),
    };
    emit(&a.common, text)?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.cmd {
        Cmd::Roots(c) => cmd_roots(&c),
        Cmd::System { common, ungrouped } => cmd_system(&common, ungrouped),
        Cmd::Series { common, terms, mark } => cmd_series(&common, terms, mark),
        Cmd::Check { common, oracle_max, force, fixture, terms, system, all, criterion } => {
            cmd_check(&common, oracle_max, force, fixture.as_deref(), terms, system.as_deref(), all, criterion)
        }
        Cmd::Constants(a) => cmd_report(&a, "constants"),
        Cmd::Limitlaw(a) => cmd_report(&a, "limitlaw"),
        Cmd::Outerplanar(a) => cmd_report(&a, "outerplanar"),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
