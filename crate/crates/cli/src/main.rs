use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hnlift::base::{validate_structure, ChartManifold, PointwiseModel};
use hnlift::hsphere::tm_sectional_table;
use hnlift::lift::{ClassificationReport, TangentBundlePoint};
use hnlift::suite::{classify_target, run_verify, Target, Tolerances, VerifyConfig, VerifyReport, SCHEMA_VERSION};

/// Almost hypercomplex Hermitian-Norden structures on tangent bundles.
#[derive(Parser)]
#[command(name = "hnlift", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check on a base and its tangent bundle.
    Verify(Common),
    /// Print a sectional-curvature table or a classification report.
    Table {
        #[arg(value_enum)]
        kind: TableKind,
        #[command(flatten)]
        common: Common,
    },
    /// Summarize a base: components, validation and curvature magnitudes.
    Describe(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum TableKind {
    HsphereTm,
    Classify,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum Format {
    Json,
    Csv,
    Markdown,
}

#[derive(Args)]
struct Common {
    /// Built-in name, config path, or `hsphere`.
    #[arg(long, default_value = "hsphere")]
    manifold: String,
    #[arg(long, default_value_t = hnlift::suite::DEFAULT_SAMPLES)]
    samples: usize,
    #[arg(long, default_value_t = hnlift::suite::DEFAULT_SEED)]
    seed: u64,
    /// Fibre vector, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    u: Option<Vec<f64>>,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, allow_negative_numbers = true)]
    a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    b: Option<f64>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Tolerance override `<check>=<value>`; repeatable.
    #[arg(long = "tol")]
    tol: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Usage and configuration problems (exit 2).
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

impl Common {
    fn target(&self) -> Result<Target, UsageError> {
        if self.manifold == "hsphere" {
            let (Some(a), Some(b)) = (self.a, self.b) else {
                return Err(UsageError("hsphere needs --a and --b".into()));
            };
            return Ok(Target::Pointwise(PointwiseModel::hsphere(self.n, a, b)?));
        }
        if let Some(chart) = ChartManifold::builtin(&self.manifold) {
            return Ok(Target::Chart(chart?));
        }
        let path = Path::new(&self.manifold);
        if path.exists() {
            return Ok(Target::Chart(ChartManifold::from_path(path)?));
        }
        let known: Vec<_> = ChartManifold::builtin_names().collect();
        Err(UsageError(format!(
            "unknown manifold {:?}: not a built-in ({}), not a file, not `hsphere`",
            self.manifold,
            known.join(", ")
        )))
    }

    fn tolerances(&self) -> Result<Tolerances, UsageError> {
        let mut t = Tolerances::default();
        for spec in &self.tol {
            t.apply(spec)?;
        }
        Ok(t)
    }

    fn fibre(&self, dim: usize) -> Result<Vec<f64>, UsageError> {
        match &self.u {
            Some(u) if u.len() == dim => Ok(u.clone()),
            Some(u) => Err(UsageError(format!("--u has {} components, base dimension is {dim}", u.len()))),
            None => {
                let mut u = vec![0.0; dim];
                u[0] = 1.0;
                Ok(u)
            }
        }
    }

    fn emit(&self, text: &str) -> Result<(), UsageError> {
        match &self.out {
            Some(p) => std::fs::write(p, text).map_err(|e| UsageError(format!("{}: {e}", p.display()))),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn stamp(mut v: Value) -> Value {
    if let Value::Object(map) = &mut v {
        map.insert("schema_version".into(), json!(SCHEMA_VERSION));
        map.insert("timestamp".into(), json!(chrono::Utc::now().to_rfc3339()));
    }
    v
}

fn to_json(v: Value) -> String {
    let mut s = serde_json::to_string_pretty(&stamp(v)).expect("json");
    s.push('\n');
    s
}

fn csv_rows(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory csv");
    for r in rows {
        w.write_record(&r).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8")
}

fn render_verify(r: &VerifyReport, f: Format) -> String {
    match f {
        Format::Json => to_json(serde_json::to_value(r).expect("report serializes")),
        Format::Csv => csv_rows(
            &["check", "passed", "max_violation", "tolerance", "detail"],
            r.checks.iter().map(|c| {
                vec![
                    c.name.clone(),
                    c.passed.to_string(),
                    format!("{:e}", c.max_violation),
                    format!("{:e}", c.tolerance),
                    c.detail.clone().unwrap_or_default(),
                ]
            }),
        ),
        Format::Markdown => {
            let mut s = format!(
                "# verify {}\n\nseed {}, {} samples, {}\n\n| check | result | max violation | tolerance |\n|---|---|---|---|\n",
                r.manifold,
                r.seed,
                r.samples.len(),
                if r.passed { "all checks passed" } else { "FAILED" }
            );
            for c in &r.checks {
                let _ = writeln!(
                    s,
                    "| {} | {} | {:.3e} | {:.0e} |",
                    c.name,
                    if c.passed { "pass" } else { "FAIL" },
                    c.max_violation,
                    c.tolerance
                );
            }
            for w in &r.warnings {
                let _ = writeln!(s, "\n> {w}");
            }
            s
        }
    }
}

fn render_classify(r: &ClassificationReport, f: Format) -> String {
    let flags = &r.flags;
    let mut rows: Vec<(String, bool, f64)> = Vec::new();
    for (name, set) in [("N", &flags.nijenhuis), ("F", &flags.structure), ("theta", &flags.lee)] {
        for (k, fl) in set.iter().enumerate() {
            rows.push((format!("{name}{}", k + 1), fl.vanishes, fl.max_violation));
        }
    }
    for (name, fl) in [
        ("base_R", &flags.base_flat),
        ("base_nabla_J", &flags.base_j_parallel),
        ("base_rho", &flags.base_ricci_flat),
    ] {
        rows.push((name.into(), fl.vanishes, fl.max_violation));
    }
    match f {
        Format::Json => to_json(serde_json::to_value(r).expect("report serializes")),
        Format::Csv => csv_rows(
            &["tensor", "vanishes", "max_abs"],
            rows.into_iter()
                .map(|(n, v, m)| vec![n, v.to_string(), format!("{m:e}")]),
        ),
        Format::Markdown => {
            let mut s = String::from("| tensor | vanishes | max abs |\n|---|---|---|\n");
            for (n, v, m) in rows {
                let _ = writeln!(s, "| {n} | {} | {m:.3e} |", if v { "yes" } else { "no" });
            }
            let _ = writeln!(s, "\nlabels: {}", r.labels.join(", "));
            for note in &r.notes {
                let _ = writeln!(s, "\n> {note}");
            }
            s
        }
    }
}

fn describe(target: &Target, c: &Common) -> Result<String, UsageError> {
    let chart = target.chart()?;
    let tol = c.tolerances()?.get("structure");
    let points = target.base_points();
    let validation = validate_structure(&chart, &points, tol);
    let mut geometry = Vec::new();
    for p in &points {
        let g = target.geometry(p)?;
        geometry.push(json!({ "point": p, "magnitudes": g.magnitudes(), "tau": g.tau, "tau_star": g.tau_star }));
    }
    let body = json!({
        "manifold": target.name(),
        "dim": target.dim(),
        "config": chart.to_config_string(),
        "validation": validation,
        "geometry": geometry,
    });
    Ok(match c.format {
        Format::Json => to_json(body),
        Format::Csv => csv_rows(
            &["point", "curvature", "nabla_j", "ricci", "lee", "nijenhuis"],
            geometry.iter().map(|g| {
                let m = &g["magnitudes"];
                vec![
                    g["point"].to_string(),
                    m["curvature"].to_string(),
                    m["nabla_j"].to_string(),
                    m["ricci"].to_string(),
                    m["lee"].to_string(),
                    m["nijenhuis"].to_string(),
                ]
            }),
        ),
        Format::Markdown => {
            let mut s = format!("# {}\n\ndimension {}\n\n```text\n{}```\n", target.name(), target.dim(), chart.to_config_string());
            let _ = writeln!(
                s,
                "\nstructure validation at {} point(s): {}",
                points.len(),
                if validation.passed() { "passed" } else { "FAILED" }
            );
            s
        }
    })
}

fn run(cli: Cli) -> Result<bool, UsageError> {
    match cli.command {
        Command::Verify(c) => {
            let target = c.target()?;
            let cfg = VerifyConfig {
                samples: c.samples,
                seed: c.seed,
                tolerances: c.tolerances()?,
                ..VerifyConfig::default()
            };
            let report = run_verify(&target, &cfg)?;
            c.emit(&render_verify(&report, c.format))?;
            Ok(report.passed)
        }
        Command::Table { kind: TableKind::HsphereTm, common: c } => {
            let (Some(a), Some(b)) = (c.a, c.b) else {
                return Err(UsageError("hsphere-tm needs --n, --a and --b".into()));
            };
            let model = PointwiseModel::hsphere(c.n, a, b)?;
            let u = c.fibre(model.dim())?;
            let params = model.hsphere_params();
            let tbp = TangentBundlePoint::new(model.geometry()?, u.into())?;
            let table = tm_sectional_table(&tbp, params)?;
            let text = match c.format {
                Format::Json => to_json(table.to_json()),
                Format::Csv => table.to_csv(),
                Format::Markdown => table.to_markdown(),
            };
            c.emit(&text)?;
            Ok(table.max_deviation() <= c.tolerances()?.get("table"))
        }
        Command::Table { kind: TableKind::Classify, common: c } => {
            let target = c.target()?;
            let u = c.fibre(target.dim())?;
            let report = classify_target(&target, &u, c.tolerances()?.get("classify"))?;
            c.emit(&render_classify(&report, c.format))?;
            Ok(true)
        }
        Command::Describe(c) => {
            let target = c.target()?;
            let text = describe(&target, &c)?;
            c.emit(&text)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
