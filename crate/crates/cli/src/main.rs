//! `lckv`: verification driver for lcK structures on low-dimensional Lie
//! algebras.

mod report;

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::Value;

use lck_core::catalog::{builtin_catalog, coverage, load_catalog, verify_catalog, CatalogEntry};
use lck_core::constructions::{
    aff_ot_spec, check_isomorphism, cokahler_mapping_torus, lck_extension, ot_algebra, ot_identification,
    unimodularity_check,
};
use lck_core::expr::{eval_rational, parse_form, parse_scalar, parse_structure};
use lck_core::hermitian::is_complex_structure;
use lck_core::lck::{lee_form, morse_novikov_betti, vaisman_test, verify_lck, LcKStructure};
use lck_core::liealg::split_top_level;
use lck_core::report::CheckRecord;
use lck_core::solver::{degeneracy_certificate, lck_space, twisted_closed_space};
use lck_core::specfile::{load_cokahler, load_extension_spec};
use lck_core::{Assignment, ComplexStructure, KForm, LieAlgebra, Matrix, Scalar};

use report::Report;

#[derive(Parser, Debug)]
#[command(name = "lckv", version, about = "Exact verification of lcK structures on Lie algebras")]
struct Cli {
    /// Write the machine-readable report to PATH (`-` for stdout).
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Verify the classification tables.
    VerifyTable {
        /// Restrict to one catalog entry.
        #[arg(long)]
        entry: Option<String>,
        /// Use a catalog file instead of the built-in one.
        #[arg(long, value_name = "FILE")]
        catalog: Option<PathBuf>,
    },
    /// Solve dΩ = θ ∧ Ω (and J-invariance when --J is given).
    Solve {
        #[arg(long, allow_hyphen_values = true)]
        algebra: String,
        #[arg(long, allow_hyphen_values = true)]
        theta: String,
        /// Complex structure: a catalog name for this algebra, or a file with n² entries.
        #[arg(long = "J", value_name = "NAME|FILE")]
        j: Option<String>,
    },
    /// Run the Vaisman test on a catalog family.
    Vaisman {
        #[arg(long)]
        entry: String,
        /// Only this witness (0-based).
        #[arg(long)]
        witness: Option<usize>,
    },
    /// Compute the Lee form of a nondegenerate 2-form.
    Lee {
        #[arg(long, allow_hyphen_values = true)]
        algebra: String,
        #[arg(long, allow_hyphen_values = true)]
        omega: String,
    },
    /// Morse-Novikov Betti numbers.
    Mn {
        #[arg(long, allow_hyphen_values = true)]
        algebra: String,
        #[arg(long, allow_hyphen_values = true)]
        theta: String,
    },
    /// Extend an lcK algebra by a Hermitian representation.
    Extend {
        #[arg(long, value_name = "FILE")]
        spec: PathBuf,
    },
    /// Build the Oeljeklaus-Toma algebra for c_1, ..., c_n.
    Ot {
        #[arg(long)]
        n: usize,
        /// Comma-separated rationals.
        #[arg(long, allow_hyphen_values = true)]
        c: String,
    },
    /// Mapping torus of a coKähler algebra.
    Cokahler {
        #[arg(long, value_name = "FILE")]
        spec: PathBuf,
    },
}

/// Bad input that is the caller's fault; exits with status 2.
#[derive(Debug)]
struct UsageError(String);

fn usage(msg: impl ToString) -> UsageError {
    UsageError(msg.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("LCKV_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // ignore failure: the pool may already be initialized
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let report = match run(&cli.command) {
        Ok(r) => r.finish(),
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    match &cli.json {
        Some(p) if p.as_os_str() == "-" => print!("{}", report.to_json()),
        Some(p) => {
            if let Err(e) = fs::write(p, report.to_json()) {
                eprintln!("error: cannot write {}: {e}", p.display());
                return ExitCode::from(2);
            }
            print!("{}", report.to_text());
        }
        None => print!("{}", report.to_text()),
    }
    ExitCode::from(report.exit_code as u8)
}

fn run(cmd: &Command) -> Result<Report, UsageError> {
    match cmd {
        Command::VerifyTable { entry, catalog } => verify_table(entry.as_deref(), catalog.as_deref()),
        Command::Solve { algebra, theta, j } => solve(algebra, theta, j.as_deref()),
        Command::Vaisman { entry, witness } => vaisman(entry, *witness),
        Command::Lee { algebra, omega } => lee(algebra, omega),
        Command::Mn { algebra, theta } => mn(algebra, theta),
        Command::Extend { spec } => extend(spec),
        Command::Ot { n, c } => ot(*n, c),
        Command::Cokahler { spec } => cokahler(spec),
    }
}

// ------------------------------------------------------------------ parsing

fn read(path: &Path) -> Result<String, UsageError> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

/// Parameters appearing in a structure-equation string.
fn structure_params(spec: &str) -> Result<BTreeSet<String>, UsageError> {
    let mut out = BTreeSet::new();
    for part in split_top_level(spec) {
        out.extend(parse_structure(part).map_err(usage)?.identifiers());
    }
    Ok(out)
}

fn form_params(src: &str) -> Result<BTreeSet<String>, UsageError> {
    Ok(lck_core::expr::parse(src).map_err(usage)?.identifiers())
}

fn algebra(spec: &str) -> Result<LieAlgebra, UsageError> {
    let params: Vec<String> = structure_params(spec)?.into_iter().collect();
    LieAlgebra::from_structure_equations("g", spec, &params).map_err(usage)
}

fn form(src: &str, g: &LieAlgebra, degree: usize, extra: &[String]) -> Result<KForm, UsageError> {
    let mut params: BTreeSet<String> = g.params().iter().cloned().collect();
    params.extend(form_params(src)?);
    params.extend(extra.iter().cloned());
    let params: Vec<String> = params.into_iter().collect();
    parse_form(src, g.dim(), degree, &params).map_err(usage)
}

fn complex_structure(arg: &str, g: &LieAlgebra) -> Result<(ComplexStructure, Vec<String>), UsageError> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = read(path)?;
        let entries: Vec<&str> = text.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
        let n = g.dim();
        if entries.len() != n * n {
            return Err(usage(format!("{arg}: expected {} entries, found {}", n * n, entries.len())));
        }
        let scalars = entries.iter().map(|s| parse_scalar(s, &[]).map_err(usage)).collect::<Result<Vec<_>, _>>()?;
        let m = Matrix::from_rows(scalars.chunks(n).map(|c| c.to_vec()).collect()).map_err(usage)?;
        return Ok((ComplexStructure::from_dual("J", m).map_err(usage)?, Vec::new()));
    }
    let cat = builtin_catalog();
    let target = g.structure_string();
    let entry = cat
        .iter()
        .find(|e| e.algebra.structure_string() == target)
        .ok_or_else(|| usage(format!("no catalog algebra matches `{target}`; pass J as a file")))?;
    let s = entry
        .structure(arg)
        .ok_or_else(|| usage(format!("entry `{}` has no complex structure `{arg}`", entry.id)))?;
    Ok((s.structure.clone(), s.params.clone()))
}

fn find_family(id: &str) -> Result<(CatalogEntry, usize), UsageError> {
    for e in builtin_catalog() {
        if let Some(i) = e.families.iter().position(|f| f.structure.id == id) {
            return Ok((e, i));
        }
    }
    Err(usage(format!("no catalog family `{id}`")))
}

fn one_form(coeffs: &[lck_core::Rational]) -> String {
    let s: Vec<Scalar> = coeffs.iter().cloned().map(Scalar::from_rational).collect();
    KForm::one_form(&s).to_string()
}

fn strings<T: ToString>(items: impl IntoIterator<Item = T>) -> Value {
    Value::Array(items.into_iter().map(|x| Value::String(x.to_string())).collect())
}

fn lck_checks(report: &mut Report, prefix: &str, s: &LcKStructure) {
    match is_complex_structure(&s.algebra, &s.j) {
        Ok(ok) => report.ok(format!("{prefix}/integrable"), ok, || "Nijenhuis tensor nonzero".into()),
        Err(e) => report.fail(format!("{prefix}/integrable"), e),
    }
    match verify_lck(s) {
        Ok(r) => {
            for (name, c) in [
                ("theta-closed", &r.theta_closed),
                ("twisted-closed", &r.twisted_closed),
                ("j-invariant", &r.j_invariant),
                ("positive", &r.positive),
            ] {
                let mut rec = CheckRecord::from_bool(format!("{prefix}/{name}"), c.pass, || {
                    c.residual.clone().unwrap_or_default()
                });
                if let Some(w) = &c.witness {
                    rec = rec.with_witness(w);
                }
                report.check(rec);
            }
        }
        Err(e) => report.fail(format!("{prefix}/lck"), e),
    }
}

fn not_vaisman(report: &mut Report, prefix: &str, s: &LcKStructure) {
    for (i, w) in s.witnesses.iter().enumerate() {
        match vaisman_test(s, w) {
            Ok(v) => report.ok(format!("{prefix}/not-vaisman[{i}]"), !v.vaisman, || "structure is Vaisman".into()),
            Err(e) => report.fail(format!("{prefix}/not-vaisman[{i}]"), e),
        }
    }
}

fn describe_structure(report: &mut Report, s: &LcKStructure) {
    report.detail("algebra", s.algebra.structure_string());
    report.detail("theta", s.theta.to_string());
    report.detail("omega", s.omega.to_string());
    report.detail("dimension", s.algebra.dim());
}

// ----------------------------------------------------------------- commands

fn verify_table(entry: Option<&str>, catalog: Option<&Path>) -> Result<Report, UsageError> {
    let mut report = Report::new("verify-table");
    let mut entries = match catalog {
        Some(p) => load_catalog(&read(p)?).map_err(usage)?,
        None => builtin_catalog(),
    };
    if let Some(id) = entry {
        entries.retain(|e| e.id == id);
        if entries.is_empty() {
            return Err(usage(format!("no catalog entry `{id}`")));
        }
    } else if catalog.is_none() {
        match coverage(&entries) {
            Ok(()) => report.check(CheckRecord::pass("table-coverage")),
            Err(problems) => report.fail("table-coverage", problems.join("; ")),
        }
    }
    let mut reports = verify_catalog(&entries);
    reports.sort_by(|a, b| a.entry.cmp(&b.entry));
    report.detail("entries", strings(reports.iter().map(|r| &r.entry)));
    for r in reports {
        for mut c in r.checks {
            if !c.id.starts_with(&r.entry) {
                c.id = format!("{}:{}", r.entry, c.id);
            }
            report.check(c);
        }
    }
    Ok(report)
}

fn solve(spec: &str, theta: &str, j: Option<&str>) -> Result<Report, UsageError> {
    let mut report = Report::new("solve");
    let g = algebra(spec)?;
    let js = j.map(|j| complex_structure(j, &g)).transpose()?;
    let extra = js.as_ref().map(|(_, p)| p.clone()).unwrap_or_default();
    let theta = form(theta, &g, 1, &extra)?;
    report.detail("algebra", g.structure_string());
    report.detail("theta", theta.to_string());
    let twisted = match twisted_closed_space(&g, &theta) {
        Ok(t) => t,
        Err(e) => {
            report.fail("solve/twisted", e);
            return Ok(report);
        }
    };
    report.check(CheckRecord::pass("solve/twisted"));
    report.detail("twisted_dim", twisted.len());
    report.detail("twisted_basis", strings(&twisted.basis));
    if let Some((j, _)) = &js {
        match lck_space(&g, &theta, j) {
            Ok(space) => {
                report.check(CheckRecord::pass("solve/lck"));
                report.detail("lck_dim", space.len());
                report.detail("lck_basis", strings(&space.basis));
                report.detail("nondegenerate_element", space.has_nondegenerate_element());
                let isotropic: Vec<String> = (1..=g.dim())
                    .filter(|&v| !space.is_empty() && degeneracy_certificate(&space, j, v).unwrap_or(false))
                    .map(|v| format!("e{v}"))
                    .collect();
                report.detail("isotropic_basis_vectors", strings(isotropic));
                report.detail("side_conditions", strings(&space.side_conditions));
            }
            Err(e) => report.fail("solve/lck", e),
        }
    }
    Ok(report)
}

fn vaisman(id: &str, witness: Option<usize>) -> Result<Report, UsageError> {
    let mut report = Report::new("vaisman");
    let (entry, i) = find_family(id)?;
    let f = &entry.families[i];
    let s = &f.structure;
    let indices: Vec<usize> = match witness {
        Some(k) if k < s.witnesses.len() => vec![k],
        Some(k) => return Err(usage(format!("`{id}` has {} witnesses, not {}", s.witnesses.len(), k + 1))),
        None => (0..s.witnesses.len()).collect(),
    };
    report.detail("expected", f.vaisman.describe());
    let mut lee_vectors = Vec::new();
    for k in indices {
        let w = &s.witnesses[k];
        let cid = format!("{id}/vaisman[{k}]");
        match (vaisman_test(s, w), f.vaisman.expected_at(w)) {
            (Ok(v), Ok(expected)) => {
                lee_vectors.push(format!("[{k}] A = {}", one_form(&v.anti_lee)));
                report.check(
                    CheckRecord::from_bool(cid, v.vaisman == expected, || {
                        format!("vaisman = {}, expected {expected}; {}", v.vaisman, v.residual.clone().unwrap_or_default())
                    })
                    .with_witness(w),
                );
            }
            (Err(e), _) => report.fail(cid, e),
            (_, Err(e)) => report.fail(cid, e),
        }
    }
    report.detail("anti_lee", strings(lee_vectors));
    Ok(report)
}

fn lee(spec: &str, omega: &str) -> Result<Report, UsageError> {
    let mut report = Report::new("lee");
    let g = algebra(spec)?;
    let omega = form(omega, &g, 2, &[])?;
    match lee_form(&g, &omega) {
        Ok(l) => {
            report.detail("theta", l.theta.to_string());
            report.ok("lee/closed", l.closed, || "d theta != 0".into());
        }
        Err(e) => report.fail("lee", e),
    }
    Ok(report)
}

fn mn(spec: &str, theta: &str) -> Result<Report, UsageError> {
    let mut report = Report::new("mn");
    let g = algebra(spec)?;
    if !g.params().is_empty() {
        return Err(usage("Morse-Novikov cohomology needs a numeric algebra"));
    }
    let theta = form(theta, &g, 1, &[])?;
    match morse_novikov_betti(&g, &theta, &Assignment::new()) {
        Ok(b) => {
            report.detail("betti", Value::Array(b.into_iter().map(Value::from).collect()));
            report.check(CheckRecord::pass("mn"));
        }
        Err(e) => report.fail("mn", e),
    }
    Ok(report)
}

fn extend(path: &Path) -> Result<Report, UsageError> {
    let mut report = Report::new("extend");
    let spec = load_extension_spec(&read(path)?).map_err(usage)?;
    match unimodularity_check(&spec, &Assignment::new()) {
        Ok(u) => report.detail("unimodular", u),
        Err(e) => report.fail("extend/unimodularity", e),
    }
    match lck_extension(&spec) {
        Ok(s) => {
            describe_structure(&mut report, &s);
            lck_checks(&mut report, "extend", &s);
            not_vaisman(&mut report, "extend", &s);
            if let Some(Value::Bool(u)) = report.details.get("unimodular").cloned() {
                report.ok("extend/unimodular-trace", s.algebra.is_unimodular() == u, || {
                    "trace criterion disagrees with tr ad".into()
                });
            }
        }
        Err(e) => report.fail("extend", e),
    }
    Ok(report)
}

fn ot(n: usize, c: &str) -> Result<Report, UsageError> {
    let mut report = Report::new("ot");
    let cs = c
        .split(',')
        .map(|s| eval_rational(s.trim(), &Assignment::new()).map_err(usage))
        .collect::<Result<Vec<_>, _>>()?;
    if cs.len() != n || n == 0 {
        return Err(usage(format!("--c needs exactly {n} values, found {}", cs.len())));
    }
    match ot_algebra(&cs) {
        Ok(s) => {
            describe_structure(&mut report, &s);
            lck_checks(&mut report, "ot", &s);
            report.ok("ot/unimodular", s.algebra.is_unimodular(), || "tr ad != 0".into());
            not_vaisman(&mut report, "ot", &s);
            match aff_ot_spec(&cs).and_then(|spec| lck_extension(&spec)) {
                Ok(ext) => match check_isomorphism(&ext, &s, &ot_identification(n)) {
                    Ok(iso) => report.ok("ot/aff-extension-isomorphic", iso.all(), || format!("{iso:?}")),
                    Err(e) => report.fail("ot/aff-extension-isomorphic", e),
                },
                Err(e) => report.fail("ot/aff-extension", e),
            }
        }
        Err(e) => report.fail("ot", e),
    }
    Ok(report)
}

fn cokahler(path: &Path) -> Result<Report, UsageError> {
    let mut report = Report::new("cokahler");
    let data = load_cokahler(&read(path)?).map_err(usage)?;
    match cokahler_mapping_torus(&data) {
        Ok(s) => {
            describe_structure(&mut report, &s);
            lck_checks(&mut report, "cokahler", &s);
            not_vaisman(&mut report, "cokahler", &s);
        }
        Err(e) => report.fail("cokahler", e),
    }
    Ok(report)
}
