//! Subcommand bodies. Each takes already-read input and returns the text to
//! emit together with an exit code; `main` only does I/O.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use crate::catalog::{self, CatalogEntry};
use crate::cohomology::{cohomology, random_cocycle, CohomologySummary, TwoCochain};
use crate::connection::FlatConnection;
use crate::expr::Assignment;
use crate::extension::{
    build_extension, check_bianchi, extension_nilpotency, ExtensionError, ExtensionTriple, IdealClass,
    SymplecticLieAlgebra,
};
use crate::linalg::Subspace;
use crate::sampling::RationalSampler;
use crate::spec::{parse_spec, parse_vector_list, BuildError, SpecError, SpecFile};
use crate::verify::{self, Exec, ReportRecord, VerifyOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub output: String,
    pub code: i32,
}

impl Outcome {
    fn new(output: String, ok: bool) -> Self {
        Outcome {
            output,
            code: if ok { EXIT_OK } else { EXIT_FAIL },
        }
    }
}

/// Problems with the input; all map to exit code 2.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Spec { path: String, source: SpecError },
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Extension(#[from] ExtensionError),
    #[error("{0}")]
    Input(String),
}

pub fn read_file(path: &std::path::Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn parse_named(path: &str, text: &str) -> Result<SpecFile, CliError> {
    parse_spec(text).map_err(|source| CliError::Spec {
        path: path.to_string(),
        source,
    })
}

/// Parameter values for building: every parameter must be fixed with
/// `name = value`.
fn bound_values(spec: &SpecFile) -> Result<Assignment, CliError> {
    let env = spec.fixed_values();
    if let Some(p) = spec.params.iter().find(|p| !env.contains_key(&p.name)) {
        return Err(CliError::Input(format!(
            "parameter `{}` has a constraint but no value; write `{} = VALUE`",
            p.name, p.name
        )));
    }
    Ok(env)
}

fn connection_of(spec: &SpecFile) -> Result<FlatConnection, CliError> {
    let env = bound_values(spec)?;
    Ok(spec.connection(&env)?)
}

fn line(out: &mut String, name: &str, ok: bool, witness: Option<String>) -> bool {
    let _ = write!(out, "{name}: {}", if ok { "pass" } else { "fail" });
    if let Some(w) = witness.filter(|_| !ok) {
        let _ = write!(out, "  {w}");
    }
    out.push('\n');
    ok
}

/// Checks the axioms for every block present in the file.
pub fn run_check(path: &str, text: &str) -> Result<Outcome, CliError> {
    let spec = parse_named(path, text)?;
    let env = bound_values(&spec)?;
    let mut out = String::new();
    let mut ok = true;
    let _ = writeln!(out, "algebra {} dim {}", spec.name, spec.dim);

    let alg = spec.algebra(&env)?;
    let jacobi = alg.check_jacobi();
    ok &= line(&mut out, "jacobi", jacobi.is_empty(), jacobi.first().map(ToString::to_string));

    let mut connection = None;
    if spec.connection.is_some() {
        let conflicts = spec.connection_conflicts();
        if !conflicts.is_empty() {
            for c in &conflicts {
                let _ = writeln!(out, "connection: conflict  {c}");
            }
            ok = false;
        } else {
            let conn = spec.connection(&env)?;
            let report = conn.check_flat_torsion_free();
            ok &= line(&mut out, "torsion", report.is_torsion_free(), report.torsion.first().map(|t| format!("torsion{t}")));
            ok &= line(&mut out, "flatness", report.is_flat(), report.curvature.first().map(|r| format!("curvature{r}")));
            if report.is_empty() {
                let ev = conn.is_geodesically_complete().map_err(ExtensionError::from)?;
                let complete = ev.complete && ev.all_nilpotent();
                let w = if ev.complete {
                    "∇ or ϱ not nilpotent".to_string()
                } else {
                    "tr ϱ ≠ 0".to_string()
                };
                ok &= line(&mut out, "completeness", complete, Some(w));
                connection = Some(conn);
            }
        }
    }

    if spec.cocycle.is_some() {
        let alpha = spec.cocycle(&env)?;
        match connection {
            Some(conn) => match ExtensionTriple::new(conn, alpha.clone()) {
                Ok(_) => {
                    line(&mut out, "cocycle", true, None);
                }
                Err(e) => ok &= line(&mut out, "cocycle", false, Some(e.to_string())),
            },
            None => {
                let _ = writeln!(out, "cocycle: skipped  needs a flat torsion-free connection");
            }
        }
        let _ = writeln!(out, "cyclic-sum-zero: {}", if check_bianchi(&alpha) { "yes" } else { "no" });
    }

    if spec.omega.is_some() {
        let s = spec.symplectic(&env)?;
        let viol = s.closedness_violations();
        ok &= line(&mut out, "closed", viol.is_empty(), viol.first().map(ToString::to_string));
        ok &= line(&mut out, "nondegenerate", s.is_nondegenerate(), Some("ω is degenerate".into()));
        if let Some(j) = &s.lagrangian_ideal {
            let v = s.classify_ideal(j);
            let _ = writeln!(out, "ideal: {}{}", v.class, if v.normal { ", normal" } else { "" });
        }
    } else if spec.ideal.is_some() {
        return Err(CliError::Input("an ideal block needs an omega block".into()));
    }
    Ok(Outcome::new(out, ok))
}

pub fn format_cohomology(s: &CohomologySummary) -> String {
    let mut out = String::new();
    for (name, v) in [
        ("dim C1", s.c1_dim),
        ("dim C1_L", s.c1l_dim),
        ("dim Z2", s.z2_dim),
        ("dim B2", s.b2_dim),
        ("dim H2", s.h2_dim),
        ("dim Z2_L", s.z2l_dim),
        ("dim B2_L", s.b2l_dim),
        ("dim H2_L", s.h2l_dim),
        ("rank H2_L -> H2", s.natural_map_rank),
    ] {
        let _ = writeln!(out, "{name} = {v}");
    }
    out
}

pub fn run_cohomology(path: &str, text: &str) -> Result<Outcome, CliError> {
    let spec = parse_named(path, text)?;
    let conn = connection_of(&spec)?;
    let rep = conn.dual_representation().map_err(ExtensionError::from)?;
    let mut out = format!("algebra {} dim {}\n", spec.name, spec.dim);
    out.push_str(&format_cohomology(&cohomology(&rep)));
    Ok(Outcome::new(out, true))
}

/// Where `extend` takes its cocycle from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CocycleSource {
    Zero,
    /// The `cocycle` block of a spec file (may be the input file itself).
    File(PathBuf),
    /// A seeded random element of `Z²_{L,ρ}`.
    Random(u64),
}

impl FromStr for CocycleSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "zero" {
            return Ok(CocycleSource::Zero);
        }
        if let Some(seed) = s.strip_prefix("random:") {
            return seed
                .parse()
                .map(CocycleSource::Random)
                .map_err(|_| format!("bad seed `{seed}`"));
        }
        if s.is_empty() {
            return Err("empty cocycle source".into());
        }
        Ok(CocycleSource::File(PathBuf::from(s)))
    }
}

/// Builds the extension and returns its spec preceded by a `#` summary.
pub fn run_extend(
    path: &str,
    text: &str,
    source: &CocycleSource,
    with_cohomology: bool,
) -> Result<Outcome, CliError> {
    let spec = parse_named(path, text)?;
    let conn = connection_of(&spec)?;
    let n = conn.dim();
    let (alpha, label) = match source {
        CocycleSource::Zero => (TwoCochain::zero(n), "zero".to_string()),
        CocycleSource::File(p) => {
            let other = read_file(p)?;
            let cs = parse_named(&p.display().to_string(), &other)?;
            if cs.dim != n {
                return Err(CliError::Input(format!("cocycle file has dim {}, connection has dim {n}", cs.dim)));
            }
            (cs.cocycle(&bound_values(&cs)?)?, p.display().to_string())
        }
        CocycleSource::Random(seed) => {
            let rep = conn.dual_representation().map_err(ExtensionError::from)?;
            let mut sampler = RationalSampler::new(*seed);
            (random_cocycle(&rep, &mut sampler, true), format!("random:{seed}"))
        }
    };
    let triple = ExtensionTriple::new(conn, alpha)?;
    let g = build_extension(&triple)?;
    let nil = extension_nilpotency(&triple)?;
    let viol = g.closedness_violations();

    let mut out = String::new();
    let _ = writeln!(out, "# extension of {} by cocycle {label}", spec.name);
    match nil.class {
        Some(c) => {
            let _ = writeln!(out, "# nilpotent: yes, class {c}");
        }
        None => out.push_str("# nilpotent: no\n"),
    }
    let dims: Vec<String> = nil.lcs_dims.iter().map(ToString::to_string).collect();
    let _ = writeln!(out, "# lower central series dims: {}", dims.join(" "));
    match viol.first() {
        None => out.push_str("# closed: yes\n"),
        Some(v) => {
            let _ = writeln!(out, "# closed: no, {v}");
        }
    }
    if with_cohomology {
        for l in format_cohomology(&cohomology(triple.rep())).lines() {
            let _ = writeln!(out, "# {l}");
        }
    }
    let mut named = g.clone();
    named.algebra = named.algebra.with_name(format!("g_{}", spec.name));
    out.push_str(&SpecFile::from_symplectic(&named).serialize());
    Ok(Outcome::new(out, viol.is_empty()))
}

/// Reduces a symplectic algebra by an isotropic ideal. For a Lagrangian
/// ideal the reduction is zero, so the induced flat connection on the
/// quotient is written instead.
pub fn run_reduce(path: &str, text: &str, ideal: &str) -> Result<Outcome, CliError> {
    let spec = parse_named(path, text)?;
    let env = bound_values(&spec)?;
    let s: SymplecticLieAlgebra = spec.symplectic(&env)?;
    let vectors = parse_vector_list(ideal, s.dim()).map_err(|source| CliError::Spec {
        path: "--ideal".into(),
        source,
    })?;
    let j = Subspace::span(s.dim(), &vectors);
    let v = s.classify_ideal(&j);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# ideal of dim {}: {}{}",
        j.dim(),
        v.class,
        if v.normal { ", normal" } else { "" }
    );
    match v.class {
        IdealClass::NotIdeal | IdealClass::NotIsotropic => return Ok(Outcome::new(out, false)),
        IdealClass::Lagrangian => {
            let conn = s.induced_flat_connection(&j)?;
            out.push_str("# induced flat connection on the quotient\n");
            out.push_str(&SpecFile::from_connection(&conn).serialize());
        }
        IdealClass::Isotropic => {
            if !v.normal {
                out.push_str("# orthogonal is not an ideal; no reduction\n");
                return Ok(Outcome::new(out, false));
            }
            let r = s.symplectic_reduction(&j)?;
            let _ = writeln!(out, "# reduced dim {}, closed: {}", r.dim(), if r.is_closed() { "yes" } else { "no" });
            out.push_str(&SpecFile::from_symplectic(&r).serialize());
        }
    }
    Ok(Outcome::new(out, true))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum ReportFormat {
    #[default]
    Text,
    Tsv,
}

pub fn verify_records(entry: Option<&str>, opts: &VerifyOptions) -> Result<Vec<ReportRecord>, CliError> {
    let entries: Vec<&CatalogEntry> = match entry {
        Some(label) => vec![catalog::entry(label).ok_or_else(|| CliError::Input(format!("no catalog entry `{label}`")))?],
        None => catalog::catalog_entries().iter().collect(),
    };
    Ok(verify::verify_entries(&entries, opts))
}

pub fn run_verify_catalog(
    samples: usize,
    seed: u64,
    entry: Option<&str>,
    format: ReportFormat,
    exec: Exec,
) -> Result<Outcome, CliError> {
    if samples == 0 {
        return Err(CliError::Input("--samples must be at least 1".into()));
    }
    let records = verify_records(entry, &VerifyOptions { samples, seed, exec })?;
    let output = match format {
        ReportFormat::Text => verify::format_text(&records),
        ReportFormat::Tsv => verify::format_tsv(&records),
    };
    Ok(Outcome::new(output, verify::all_passed(&records)))
}

pub fn catalog_export() -> &'static str {
    catalog::CATALOG_TEXT
}
