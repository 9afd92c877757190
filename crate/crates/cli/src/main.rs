//! `mtorus`: compute, verify and sweep E¹ homology of Dehn-twist mapping
//! tori. Exit status is 0 when everything passes, 1 when a case fails and
//! 2 on usage or configuration errors.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use mtorus::closed_forms::{predict, ranks_x};
use mtorus::family::{build_e1, FamilySpec, SpecRecord};
use mtorus::verify::{
    emit_report, sweep, verify_against, verify_case, write_golden, FamilyKind, ReportFormat,
    SweepParams, VerificationReport,
};
use mtorus::CompareMode;

#[derive(Parser, Debug)]
#[command(
    name = "mtorus",
    version,
    about = "Exact E1 homology for Dehn-twist mapping tori"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Homology of one spec as JSON.
    Compute(Opts),
    /// Verify one spec against its closed form.
    Verify(Opts),
    /// Verify every spec in the given ranges.
    Sweep(Opts),
    /// Dump X(g,d) ranks, or predictions when a family is given.
    Table(Opts),
}

#[derive(Args, Debug, Default, Clone)]
struct Opts {
    /// Flat key=value file with the same keys as the flags; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Genus; sweeps and tables accept lists and ranges like `2..4`.
    #[arg(long)]
    g: Option<String>,
    /// Chern index; sweeps accept lists and ranges (default 1..g-1).
    #[arg(long, allow_hyphen_values = true)]
    k: Option<String>,
    /// identity, nonsep, pair or sep; sweeps accept a comma list.
    #[arg(long)]
    family: Option<String>,
    /// Twist exponent; sweeps use it as the exponent set.
    #[arg(long, allow_hyphen_values = true)]
    n: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    m: Option<String>,
    #[arg(long)]
    i: Option<String>,
    #[arg(long)]
    a: Option<String>,
    #[arg(long)]
    b: Option<String>,
    /// Depth for `table` without a family (default -1..g).
    #[arg(long, allow_hyphen_values = true)]
    d: Option<String>,
    /// relative or absolute.
    #[arg(long)]
    mode: Option<String>,
    /// json, csv or text.
    #[arg(long)]
    format: Option<String>,
    /// Output file (directory for --write-golden and --dump-complex).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps (0 = all cores).
    #[arg(long)]
    jobs: Option<String>,
    /// Regenerate the golden homology files into --out.
    #[arg(long)]
    write_golden: bool,
    /// Report measured wall time in "millis" (breaks byte-determinism).
    #[arg(long)]
    timings: bool,
    /// For `verify`: compare against this `degree,rank` CSV instead of the
    /// closed form.
    #[arg(long)]
    expect: Option<PathBuf>,
    /// Write generators.csv and boundary.csv of the built complex here.
    #[arg(long)]
    dump_complex: Option<PathBuf>,
}

/// Resolved option values: flags over config file.
struct Settings {
    values: BTreeMap<&'static str, String>,
    opts: Opts,
}

const KEYS: [&str; 13] = [
    "g", "k", "family", "n", "m", "i", "a", "b", "d", "mode", "format", "out", "jobs",
];

impl Settings {
    fn load(opts: Opts) -> Result<Self> {
        let mut values = BTreeMap::new();
        if let Some(path) = &opts.config {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (key, value) = line.split_once('=').ok_or_else(|| {
                    anyhow!("{}:{}: expected key=value", path.display(), lineno + 1)
                })?;
                let key = key.trim();
                let key = KEYS.iter().find(|k| **k == key).ok_or_else(|| {
                    anyhow!("{}:{}: unknown key {key:?}", path.display(), lineno + 1)
                })?;
                values.insert(*key, value.trim().to_string());
            }
        }
        let flags = [
            ("g", &opts.g),
            ("k", &opts.k),
            ("family", &opts.family),
            ("n", &opts.n),
            ("m", &opts.m),
            ("i", &opts.i),
            ("a", &opts.a),
            ("b", &opts.b),
            ("d", &opts.d),
            ("mode", &opts.mode),
            ("format", &opts.format),
            ("jobs", &opts.jobs),
        ];
        for (key, v) in flags {
            if let Some(v) = v {
                values.insert(key, v.clone());
            }
        }
        if let Some(out) = &opts.out {
            values.insert("out", out.display().to_string());
        }
        Ok(Self { values, opts })
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn int<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| anyhow!("--{key}: expected an integer, got {v:?}"))
            })
            .transpose()
    }

    fn list(&self, key: &str) -> Result<Option<Vec<i64>>> {
        self.get(key)
            .map(|v| parse_list(v).with_context(|| format!("--{key}")))
            .transpose()
    }

    fn mode(&self) -> Result<CompareMode> {
        match self.get("mode").unwrap_or("relative") {
            "relative" => Ok(CompareMode::Relative),
            "absolute" => Ok(CompareMode::Absolute),
            other => bail!("--mode: expected relative or absolute, got {other:?}"),
        }
    }

    fn format(&self) -> Result<ReportFormat> {
        let f = self.get("format").unwrap_or("json");
        ReportFormat::parse(f)
            .ok_or_else(|| anyhow!("--format: expected json, csv or text, got {f:?}"))
    }

    fn out(&self) -> Option<PathBuf> {
        self.get("out").map(PathBuf::from)
    }

    fn spec(&self) -> Result<FamilySpec> {
        let record = SpecRecord {
            family: self.get("family").unwrap_or("identity").to_string(),
            g: self.int("g")?.ok_or_else(|| anyhow!("--g is required"))?,
            k: self.int("k")?.ok_or_else(|| anyhow!("--k is required"))?,
            m: self.int("m")?,
            n: self.int("n")?,
            i: self.int("i")?,
            a: self.int("a")?,
            b: self.int("b")?,
        };
        Ok(FamilySpec::try_from(&record)?)
    }
}

/// Comma list of integers or inclusive ranges `lo..hi`.
fn parse_list(text: &str) -> Result<Vec<i64>> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((lo, hi)) = part.split_once("..") {
            let lo: i64 = lo
                .trim()
                .parse()
                .map_err(|_| anyhow!("bad range start in {part:?}"))?;
            let hi: i64 = hi
                .trim()
                .parse()
                .map_err(|_| anyhow!("bad range end in {part:?}"))?;
            out.extend(lo..=hi);
        } else {
            out.push(
                part.parse()
                    .map_err(|_| anyhow!("expected an integer, got {part:?}"))?,
            );
        }
    }
    Ok(out)
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Failure that maps to exit status 1 rather than 2.
#[derive(Debug)]
struct CasesFailed;

impl std::fmt::Display for CasesFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("one or more cases failed")
    }
}

impl std::error::Error for CasesFailed {}

fn finish(report: VerificationReport, s: &Settings) -> Result<()> {
    let report = if s.opts.timings {
        report.with_timings()
    } else {
        report
    };
    write_output(s.out().as_deref(), &emit_report(&report, s.format()?))?;
    if report.all_passed() {
        Ok(())
    } else {
        Err(CasesFailed.into())
    }
}

fn compute(s: &Settings) -> Result<()> {
    let spec = s.spec()?;
    let e1 = build_e1(&spec)?;
    if let Some(dir) = &s.opts.dump_complex {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for (name, text) in [
            ("generators.csv", e1.generators_csv()),
            ("boundary.csv", e1.boundary_csv()),
        ] {
            let path = dir.join(name);
            std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        }
    }
    let homology = e1.complex().homology()?;
    let text = match s.format()? {
        ReportFormat::Json => {
            let doc = serde_json::json!({
                "spec": SpecRecord::from(&spec),
                "generators": e1.len(),
                "homology": homology,
            });
            serde_json::to_string_pretty(&doc)? + "\n"
        }
        ReportFormat::Csv => homology.to_csv(),
        ReportFormat::Text => format!("{spec}: {homology}\n"),
    };
    write_output(s.out().as_deref(), &text)
}

fn verify(s: &Settings) -> Result<()> {
    let spec = s.spec()?;
    let result = match &s.opts.expect {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let expected = mtorus::GradedGroup::from_csv(&text)
                .ok_or_else(|| anyhow!("{}: expected degree,rank rows", path.display()))?;
            verify_against(&spec, &expected, s.mode()?)?
        }
        None => verify_case(&spec, s.mode()?)?,
    };
    let report = VerificationReport::new(None, vec![result]);
    if s.format()? == ReportFormat::Json {
        let report = if s.opts.timings {
            report.with_timings()
        } else {
            report
        };
        let text = serde_json::to_string_pretty(&report.cases[0])? + "\n";
        write_output(s.out().as_deref(), &text)?;
        return if report.all_passed() {
            Ok(())
        } else {
            Err(CasesFailed.into())
        };
    }
    finish(report, s)
}

fn sweep_params(s: &Settings) -> Result<SweepParams> {
    let genera = s
        .list("g")?
        .unwrap_or_else(|| vec![2, 3, 4])
        .into_iter()
        .map(|g| u32::try_from(g).map_err(|_| anyhow!("--g: genus {g} must be nonnegative")))
        .collect::<Result<Vec<u32>>>()?;
    let families = match s.get("family") {
        None | Some("all") => FamilyKind::ALL.to_vec(),
        Some(list) => list
            .split(',')
            .map(|f| {
                FamilyKind::parse(f.trim()).ok_or_else(|| anyhow!("--family: unknown family {f:?}"))
            })
            .collect::<Result<_>>()?,
    };
    let exponents = s.list("n")?.unwrap_or_else(|| vec![-2, -1, 1, 2]);
    if exponents.contains(&0) {
        bail!("--n: exponents must be nonzero");
    }
    Ok(SweepParams {
        genera,
        families,
        ks: s.list("k")?,
        exponents,
        mode: s.mode()?,
    })
}

fn run_sweep(s: &Settings) -> Result<()> {
    let params = sweep_params(s)?;
    let jobs = s.int::<usize>("jobs")?.unwrap_or(0);
    finish(sweep(&params, jobs), s)
}

fn table(s: &Settings) -> Result<()> {
    let format = s.format()?;
    let genera = s.list("g")?.ok_or_else(|| anyhow!("--g is required"))?;
    let mut rows: Vec<(serde_json::Value, mtorus::GradedGroup)> = Vec::new();
    if s.get("family").is_some() {
        for g in genera {
            let ks = s.list("k")?.unwrap_or_else(|| (1..g).collect());
            for k in ks {
                let mut single = Settings {
                    values: s.values.clone(),
                    opts: s.opts.clone(),
                };
                single.values.insert("g", g.to_string());
                single.values.insert("k", k.to_string());
                let spec = single.spec()?;
                let p = predict(&spec)?;
                rows.push((serde_json::to_value(SpecRecord::from(&spec))?, p.group));
            }
        }
    } else {
        for g in genera {
            let g = u32::try_from(g).map_err(|_| anyhow!("--g: genus must be nonnegative"))?;
            let ds = s.list("d")?.unwrap_or_else(|| (-1..=g as i64).collect());
            for d in ds {
                rows.push((serde_json::json!({ "g": g, "d": d }), ranks_x(g, d)));
            }
        }
    }
    let text = match format {
        ReportFormat::Json => {
            let doc: Vec<_> = rows
                .iter()
                .map(|(key, group)| serde_json::json!({ "key": key, "group": group }))
                .collect();
            serde_json::to_string_pretty(&doc)? + "\n"
        }
        ReportFormat::Csv => {
            let mut out = String::from("key,degree,rank\n");
            for (key, group) in &rows {
                let key = key_label(key);
                for (q, r) in group.ranks() {
                    out.push_str(&format!("{key},{q},{r}\n"));
                }
            }
            out
        }
        ReportFormat::Text => rows
            .iter()
            .map(|(key, group)| format!("{}: {group}\n", key_label(key)))
            .collect(),
    };
    write_output(s.out().as_deref(), &text)
}

fn key_label(key: &serde_json::Value) -> String {
    key.as_object()
        .map(|o| {
            o.iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .unwrap_or_default()
        .replace('"', "")
}

fn run(cli: Cli) -> Result<()> {
    let opts = match &cli.command {
        Command::Compute(o) | Command::Verify(o) | Command::Sweep(o) | Command::Table(o) => {
            o.clone()
        }
    };
    let settings = Settings::load(opts)?;
    if settings.opts.write_golden {
        let dir = settings
            .out()
            .ok_or_else(|| anyhow!("--write-golden needs --out DIR"))?;
        for name in write_golden(&dir)? {
            eprintln!("wrote {}", dir.join(name).display());
        }
        return Ok(());
    }
    match cli.command {
        Command::Compute(_) => compute(&settings),
        Command::Verify(_) => verify(&settings),
        Command::Sweep(_) => run_sweep(&settings),
        Command::Table(_) => table(&settings),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<CasesFailed>() => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
