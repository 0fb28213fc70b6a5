//! `sollink` command-line front end.
//!
//! Exit codes: 0 on success, 1 on a computational inconsistency or a failed
//! self-test, 2 on a usage or input error.

mod parse;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};

use sollink::cycles::{self, LinkTable, TableContext};
use sollink::qfield::{make_field, FieldData};
use sollink::qseries::{self, InteriorTable, QExpansion, WEvalParams};
use sollink::rational::{self, Rational};
use sollink::selftest;
use sollink::sol::{self, FiberClass, IntMat2};

#[derive(Parser)]
#[command(name = "sollink", version, about = "Exact boundary linking numbers for Hilbert modular surfaces")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Fundamental unit and totally positive generator of Q(sqrt d).
    FieldInfo {
        #[arg(long)]
        d: i64,
    },
    /// Linking number of two fiber circles in the mapping torus of f.
    SolLink {
        /// Gluing matrix a,b,c,d (row-major).
        #[arg(long, value_parser = parse::matrix, allow_hyphen_values = true)]
        f: IntMat2,
        #[arg(long, value_parser = parse::class, allow_hyphen_values = true)]
        a: FiberClass,
        #[arg(long, value_parser = parse::class, allow_hyphen_values = true)]
        b: FiberClass,
    },
    /// Explicit rational cap bounding a fiber circle, with its checks.
    SolCap {
        #[arg(long, value_parser = parse::matrix, allow_hyphen_values = true)]
        f: IntMat2,
        #[arg(long, value_parser = parse::class, allow_hyphen_values = true)]
        a: FiberClass,
        /// Base point of the circle in the fiber.
        #[arg(long, value_parser = parse::point, allow_hyphen_values = true, default_value = "0,0")]
        offset: [Rational; 2],
        /// Extra test class for the intersection check.
        #[arg(long, value_parser = parse::class, allow_hyphen_values = true)]
        b: Option<FiberClass>,
        /// Fiber height of the test circles, strictly between 0 and 1.
        #[arg(long, value_parser = parse::rational_value, default_value = "1/2")]
        s_b: Rational,
    },
    /// Boundary circles of the special cycle C_n at the cusp.
    Boundary {
        #[arg(long)]
        d: i64,
        #[arg(long, value_parser = parse::rational_value)]
        n: Rational,
    },
    /// All Lk(dC_n, dC_m) for 1 <= n, m <= nmax.
    LkTable {
        #[arg(long)]
        d: i64,
        #[arg(long)]
        nmax: u32,
    },
    /// q-expansion of n -> Lk(dC_n, dC_m).
    Qexp {
        #[arg(long)]
        d: i64,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        nmax: u32,
    },
    /// Holomorphic part and beta-kernel sum of W(tau).
    WEval {
        #[arg(long)]
        d: i64,
        /// Point of the upper half plane, written RE+IMi.
        #[arg(long, value_parser = parse::tau, allow_hyphen_values = true)]
        tau: Complex64,
        #[arg(long, default_value_t = 60)]
        k_range: u32,
        #[arg(long = "box", default_value_t = 40)]
        box_: u32,
        #[arg(long, default_value_t = 40)]
        n_cut: u32,
    },
    /// Ratios of min-series coefficients to linking numbers.
    RatioTest {
        #[arg(long)]
        d: i64,
        #[arg(long)]
        nmax: u32,
        #[arg(long, default_value_t = 80)]
        k_range: u32,
    },
    /// Capped intersection numbers from an interior intersection table.
    Combine {
        #[arg(long)]
        d: i64,
        /// JSON file {"m": .., "entries": {"n": "p/q"}, "provenance": ..}.
        #[arg(long)]
        interior: PathBuf,
        #[arg(long)]
        nmax: u32,
    },
    /// Seeded consistency checks of every module.
    SelfTest {
        #[arg(long, default_value_t = 20240501)]
        seed: u64,
    },
}

enum Failure {
    Usage(String),
    Inconsistent(String),
}

impl From<sollink::Error> for Failure {
    fn from(e: sollink::Error) -> Self {
        match e {
            sollink::Error::InvalidInput(_) => Failure::Usage(e.to_string()),
            _ => Failure::Inconsistent(e.to_string()),
        }
    }
}

type Res<T> = Result<T, Failure>;

/// One result in every supported format.
struct Report {
    json: Value,
    text: String,
    csv: Option<String>,
    failed: bool,
}

impl Report {
    fn new(json: Value, text: String, csv: Option<String>) -> Self {
        Report { json, text, csv, failed: false }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => match emit(&cli, &report) {
            Ok(()) if report.failed => ExitCode::from(1),
            Ok(()) => ExitCode::SUCCESS,
            Err(f) => fail(f),
        },
        Err(f) => fail(f),
    }
}

fn fail(f: Failure) -> ExitCode {
    match f {
        Failure::Usage(m) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Failure::Inconsistent(m) => {
            eprintln!("inconsistency: {m}");
            ExitCode::from(1)
        }
    }
}

fn emit(cli: &Cli, report: &Report) -> Res<()> {
    let mut body = match cli.format {
        Format::Json => serde_json::to_string_pretty(&report.json).expect("report serializes"),
        Format::Text => report.text.clone(),
        Format::Csv => report
            .csv
            .clone()
            .ok_or_else(|| Failure::Usage("--format csv is not available for this command".into()))?,
    };
    if !body.ends_with('\n') {
        body.push('\n');
    }
    match &cli.output {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Res<Report> {
    match &cli.command {
        Command::FieldInfo { d } => field_info(*d),
        Command::SolLink { f, a, b } => sol_link(f, a, b),
        Command::SolCap { f, a, offset, b, s_b } => sol_cap(f, a, offset, b.as_ref(), s_b),
        Command::Boundary { d, n } => boundary(*d, n),
        Command::LkTable { d, nmax } => lk_table(*d, *nmax),
        Command::Qexp { d, m, nmax } => {
            let q = qseries::lk_qexpansion(&make_field(*d)?, *m, *nmax)?;
            qexp_report(&q)
        }
        Command::WEval { d, tau, k_range, box_, n_cut } => {
            w_eval(*d, WEvalParams { tau: *tau, k_range: *k_range, box_: *box_, n_cut: *n_cut })
        }
        Command::RatioTest { d, nmax, k_range } => ratio_test(*d, *nmax, *k_range),
        Command::Combine { d, interior, nmax } => combine(*d, interior, *nmax),
        Command::SelfTest { seed } => self_test(*seed),
    }
}

fn key_value_csv(rows: &[(&str, String)]) -> String {
    let mut s = String::from("key,value\n");
    for (k, v) in rows {
        let _ = writeln!(s, "{k},\"{}\"", v.replace('"', "\"\""));
    }
    s
}

fn field_json(fd: &FieldData) -> Value {
    json!({
        "d": fd.d(),
        "disc": fd.disc(),
        "omega": fd.omega_desc(),
        "eps0": fd.eps0.to_string(),
        "eps0_norm": fd.eps0_norm,
        "eps": fd.eps.to_string(),
    })
}

fn field_info(d: i64) -> Res<Report> {
    let fd = make_field(d)?;
    let rows = [
        ("d", fd.d().to_string()),
        ("disc", fd.disc().to_string()),
        ("omega", fd.omega_desc()),
        ("eps0", fd.eps0.to_string()),
        ("eps0_norm", fd.eps0_norm.to_string()),
        ("eps", fd.eps.to_string()),
    ];
    let text = rows.iter().map(|(k, v)| format!("{k} = {v}")).collect::<Vec<_>>().join("\n");
    Ok(Report::new(field_json(&fd), text, Some(key_value_csv(&rows))))
}

fn sol_link(f: &IntMat2, a: &FiberClass, b: &FiberClass) -> Res<Report> {
    let m = sol::make_sol(f.clone())?;
    let lk = rational::to_string(&sol::link_fiber(&m, a, b));
    let json = json!({
        "f": f.to_string(),
        "n_det": m.n_det.to_string(),
        "a": a.to_string(),
        "b": b.to_string(),
        "lk": lk,
    });
    Ok(Report::new(json, lk.clone(), Some(key_value_csv(&[("lk", lk)]))))
}

fn sol_cap(f: &IntMat2, a: &FiberClass, offset: &[Rational; 2], b: Option<&FiberClass>, s_b: &Rational) -> Res<Report> {
    let m = sol::make_sol(f.clone())?;
    let cap = sol::build_cap(&m, a, offset);
    let period = cap.area_period();
    let boundary_ok = cap.boundary() == cap.target();
    let mut probes = vec![FiberClass::new(1, 0), FiberClass::new(0, 1)];
    probes.extend(b.cloned());
    let mut checks = Vec::new();
    let mut all_ok = boundary_ok && period == Rational::from_integer(0.into());
    for p in &probes {
        let via_cap = sol::cap_intersect(&cap, &m, p, s_b)?;
        let lk = sol::link_fiber(&m, a, p);
        all_ok &= via_cap == lk;
        checks.push(json!({
            "b": p.to_string(),
            "cap_intersect": rational::to_string(&via_cap),
            "link_fiber": rational::to_string(&lk),
            "agree": via_cap == lk,
        }));
    }
    let mut text = format!(
        "cap for a = {a} in the mapping torus of f = {f}\nweight 1/N = {}\nmonodromy class = ({}, {})\nfiber correction = {}\narea period = {period}\nboundary equals circle: {boundary_ok}\n",
        cap.weight, cap.monodromy_class[0], cap.monodromy_class[1], cap.fiber_correction
    );
    for c in &checks {
        let _ = writeln!(
            text,
            "b = {}: cap intersection {}, linking number {}",
            c["b"].as_str().unwrap_or_default(),
            c["cap_intersect"].as_str().unwrap_or_default(),
            c["link_fiber"].as_str().unwrap_or_default()
        );
    }
    let _ = write!(text, "checks: {}", if all_ok { "ok" } else { "FAILED" });
    let json = json!({
        "cap": serde_json::to_value(&cap).expect("cap serializes"),
        "area_period": rational::to_string(&period),
        "boundary_matches": boundary_ok,
        "intersections": checks,
        "ok": all_ok,
    });
    let mut report = Report::new(json, text, None);
    report.failed = !all_ok;
    Ok(report)
}

fn boundary(d: i64, n: &Rational) -> Res<Report> {
    let fd = make_field(d)?;
    let comps = cycles::boundary_components(&fd, n)?;
    let mut text = format!("{} component(s) for n = {n}, d = {d}", comps.len());
    let mut csv = String::from("class,multiplicity,direction,fiber_label\n");
    let mut items = Vec::new();
    for c in &comps {
        let dir = format!("{},{}", c.direction.0[0], c.direction.0[1]);
        let _ = write!(
            text,
            "\nmu = {}: multiplicity {}, direction ({dir}), mu/mu' = {}",
            c.class.rep, c.multiplicity, c.fiber_label
        );
        let _ = writeln!(csv, "\"{}\",{},\"{dir}\",\"{}\"", c.class.rep, c.multiplicity, c.fiber_label);
        items.push(json!({
            "class": c.class.rep.to_string(),
            "multiplicity": c.multiplicity.to_string(),
            "direction": [c.direction.0[0].to_string(), c.direction.0[1].to_string()],
            "fiber_label": c.fiber_label.to_string(),
        }));
    }
    let json = json!({ "d": d, "n": rational::to_string(n), "components": items });
    Ok(Report::new(json, text, Some(csv)))
}

fn thread_count() -> Res<Option<usize>> {
    match std::env::var("SOLLINK_THREADS") {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Ok(s) => s
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n >= 1)
            .map(Some)
            .ok_or_else(|| Failure::Usage(format!("SOLLINK_THREADS must be an integer >= 1, got {s:?}"))),
        Err(e) => Err(Failure::Usage(format!("SOLLINK_THREADS: {e}"))),
    }
}

fn parallel_table(fd: &FieldData, nmax: u32) -> Res<LinkTable> {
    if nmax < 1 {
        return Err(Failure::Usage("--nmax must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count()?.unwrap_or(0))
        .build()
        .map_err(|e| Failure::Usage(format!("thread pool: {e}")))?;
    let ctx = TableContext::new(fd, nmax)?;
    let cells: Vec<(u32, u32)> = (1..=nmax).flat_map(|n| (1..=nmax).map(move |m| (n, m))).collect();
    let values = pool.install(|| cells.par_iter().map(|&(n, m)| ctx.cell(fd, n, m)).collect::<Vec<_>>());
    let mut entries = BTreeMap::new();
    for (cell, v) in cells.into_iter().zip(values) {
        entries.insert(cell, v?);
    }
    Ok(LinkTable { field: fd.clone(), nmax, n_det: ctx.n_det().clone(), entries })
}

fn lk_table(d: i64, nmax: u32) -> Res<Report> {
    let fd = make_field(d)?;
    let t = parallel_table(&fd, nmax)?;
    let mut text = format!("Lk(dC_n, dC_m) for d = {d}, N = {} (rows n, columns m)\n", t.n_det);
    let mut csv = String::from("n,m,lk\n");
    for n in 1..=nmax {
        let row: Vec<String> = (1..=nmax).map(|m| rational::to_string(&t.entries[&(n, m)])).collect();
        let _ = writeln!(text, "{n:>3}: {}", row.join(" "));
        for (m, v) in row.iter().enumerate() {
            let _ = writeln!(csv, "{n},{},{v}", m + 1);
        }
    }
    Ok(Report::new(t.to_json(), text, Some(csv)))
}

fn qexp_report(q: &QExpansion) -> Res<Report> {
    let mut text = format!("d = {}, m = {}, weight {}, nmax = {}", q.d, q.m, q.weight, q.nmax);
    for (n, c) in &q.coeffs {
        let _ = write!(text, "\n{n}: {c}");
    }
    let json: Value = serde_json::from_str(&q.to_json()).expect("q-expansion JSON parses");
    Ok(Report::new(json, text, Some(qseries::qexp_csv(q)?)))
}

fn complex_json(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

fn complex_text(z: Complex64) -> String {
    let im = if z.im == 0.0 { 0.0 } else { z.im };
    let sign = if im.is_sign_negative() { '-' } else { '+' };
    format!("{:e} {sign} {:e}i", z.re + 0.0, im.abs())
}

fn w_eval(d: i64, params: WEvalParams) -> Res<Report> {
    let fd = make_field(d)?;
    let w = qseries::eval_w(&fd, &params)?;
    let text = format!(
        "tau = {}, k_range = {}, box = {}, n_cut = {}\nholomorphic = {} (tail {:e})\nbeta_sum = {} (tail {:e})",
        complex_text(params.tau),
        params.k_range,
        params.box_,
        params.n_cut,
        complex_text(w.holomorphic),
        w.holomorphic_tail,
        complex_text(w.beta_sum),
        w.beta_tail
    );
    let json = json!({
        "d": d,
        "tau": complex_json(params.tau),
        "k_range": params.k_range,
        "box": params.box_,
        "n_cut": params.n_cut,
        "holomorphic": complex_json(w.holomorphic),
        "holomorphic_tail": w.holomorphic_tail,
        "beta_sum": complex_json(w.beta_sum),
        "beta_tail": w.beta_tail,
    });
    Ok(Report::new(json, text, Some(qseries::numeric_csv(&w.coefficients)?)))
}

fn ratio_test(d: i64, nmax: u32, k_range: u32) -> Res<Report> {
    let fd = make_field(d)?;
    let r = qseries::holomorphic_ratio_test(&fd, nmax, k_range)?;
    let mut text = String::new();
    let mut csv = String::from("n,ratio\n");
    for (n, v) in &r.ratios {
        let _ = writeln!(text, "{n}: {v:.15}");
        let _ = writeln!(csv, "{n},{v:e}");
    }
    let _ = write!(
        text,
        "mean {:.15}, relative spread {:e}\nomitted (zero linking number): {:?}\ninconsistent: {:?}",
        r.mean, r.relative_spread, r.omitted, r.inconsistent
    );
    let mut report = Report::new(serde_json::to_value(&r).expect("ratio report serializes"), text, Some(csv));
    report.failed = !r.inconsistent.is_empty();
    Ok(report)
}

fn combine(d: i64, path: &PathBuf, nmax: u32) -> Res<Report> {
    let raw = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let interior = InteriorTable::from_json(&raw)?;
    let q = qseries::combine_interior(&interior, &make_field(d)?, nmax)?;
    qexp_report(&q)
}

fn self_test(seed: u64) -> Res<Report> {
    let checks = selftest::run_quick(seed);
    let failed = checks.iter().any(|c| !c.passed);
    let mut text = String::new();
    for c in &checks {
        let _ = writeln!(text, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let passed = checks.iter().filter(|c| c.passed).count();
    let _ = write!(text, "{passed}/{} checks passed (seed {seed})", checks.len());
    let mut csv = String::from("check,passed,detail\n");
    for c in &checks {
        let _ = writeln!(csv, "\"{}\",{},\"{}\"", c.name, c.passed, c.detail.replace('"', "\"\""));
    }
    let json = json!({ "seed": seed, "checks": checks, "passed": !failed });
    let mut report = Report::new(json, text, Some(csv));
    report.failed = failed;
    Ok(report)
}
