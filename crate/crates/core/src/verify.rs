//! Catalog verification: every entry, at every sample, through the nine
//! checks from connection axioms to the extension round trip.

use std::fmt::{self, Write as _};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::catalog::{CatalogEntry, InstantiateError, ParameterSample};
use crate::connection::FlatConnection;
use crate::extension::{
    build_extension, dual_half, extension_jacobi, extension_nilpotency, ExtensionTriple, IdealClass,
};
use crate::format_vector;
use crate::linalg::format_rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Check {
    Torsion,
    Flatness,
    BaseBracketMatch,
    Completeness,
    ExtensionJacobi,
    ExtensionClosed,
    LagrangianIdeal,
    ExtensionNilpotent,
    RoundTrip,
}

impl Check {
    pub const ALL: [Check; 9] = [
        Check::Torsion,
        Check::Flatness,
        Check::BaseBracketMatch,
        Check::Completeness,
        Check::ExtensionJacobi,
        Check::ExtensionClosed,
        Check::LagrangianIdeal,
        Check::ExtensionNilpotent,
        Check::RoundTrip,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Torsion => "torsion",
            Check::Flatness => "flatness",
            Check::BaseBracketMatch => "base-bracket-match",
            Check::Completeness => "completeness",
            Check::ExtensionJacobi => "extension-jacobi",
            Check::ExtensionClosed => "extension-closed",
            Check::LagrangianIdeal => "lagrangian-ideal",
            Check::ExtensionNilpotent => "extension-nilpotent",
            Check::RoundTrip => "round-trip",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Pass,
    Fail,
    Conflict,
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Conflict => "conflict",
            Status::Skipped => "skipped",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportRecord {
    pub entry: String,
    pub sample: usize,
    /// Parameter values, `-` when the entry has none.
    pub params: String,
    pub check: Check,
    pub status: Status,
    /// Violating indices and residual for failures; the conflict list for
    /// suspect rows; a short note otherwise.
    pub witness: String,
    /// Whether the entry is flagged as a suspect row.
    pub suspect: bool,
}

/// How entries are scheduled. Without the `parallel` feature both run
/// sequentially.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    #[default]
    Parallel,
    Sequential,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyOptions {
    pub samples: usize,
    pub seed: u64,
    pub exec: Exec,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            samples: 3,
            seed: 0,
            exec: Exec::Parallel,
        }
    }
}

struct Recorder<'a> {
    entry: &'a CatalogEntry,
    sample: usize,
    params: String,
    out: Vec<ReportRecord>,
}

impl Recorder<'_> {
    fn push(&mut self, check: Check, status: Status, witness: impl Into<String>) {
        self.out.push(ReportRecord {
            entry: self.entry.label.clone(),
            sample: self.sample,
            params: self.params.clone(),
            check,
            status,
            witness: witness.into(),
            suspect: self.entry.suspect,
        });
    }

    fn verdict(&mut self, check: Check, failure: Option<String>) -> bool {
        match failure {
            None => {
                self.push(check, Status::Pass, "");
                true
            }
            Some(w) => {
                self.push(check, Status::Fail, w);
                false
            }
        }
    }

    fn all(&mut self, checks: &[Check], status: Status, witness: &str) {
        for &c in checks {
            self.push(c, status, witness);
        }
    }
}

/// Records for one entry: nine per sample, in check order.
pub fn verify_entry(entry: &CatalogEntry, samples: usize, seed: u64) -> Vec<ReportRecord> {
    let drawn = match entry.sample_parameters(samples, seed) {
        Ok(s) => s,
        Err(e) => {
            let mut rec = Recorder { entry, sample: 0, params: "-".into(), out: Vec::new() };
            rec.all(&Check::ALL, Status::Fail, &e.to_string());
            return rec.out;
        }
    };
    drawn.iter().flat_map(|s| verify_sample(entry, s)).collect()
}

fn verify_sample(entry: &CatalogEntry, sample: &ParameterSample) -> Vec<ReportRecord> {
    let mut rec = Recorder {
        entry,
        sample: sample.id,
        params: sample.describe(),
        out: Vec::new(),
    };
    match entry.instantiate(sample) {
        Ok(conn) => run_checks(entry, &conn, &mut rec),
        Err(InstantiateError::Conflict { conflicts, .. }) => {
            let w = conflicts.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ");
            rec.all(&Check::ALL, Status::Conflict, &w);
        }
        Err(e @ InstantiateError::Build { .. }) => rec.all(&Check::ALL, Status::Fail, &e.to_string()),
    }
    rec.out
}

fn run_checks(entry: &CatalogEntry, conn: &FlatConnection, rec: &mut Recorder) {
    let report = conn.check_flat_torsion_free();
    let torsion_ok = rec.verdict(Check::Torsion, report.torsion.first().map(|t| format!("torsion{t}")));
    let flat_ok = rec.verdict(Check::Flatness, report.curvature.first().map(|r| format!("curvature{r}")));
    rec.verdict(Check::BaseBracketMatch, bracket_mismatch(entry, conn));

    if !(torsion_ok && flat_ok) {
        let failed = if torsion_ok { "flatness" } else { "torsion" };
        rec.all(&Check::ALL[3..], Status::Skipped, &format!("{failed} failed"));
        return;
    }

    match conn.is_geodesically_complete() {
        Ok(ev) => {
            let failure = if let Some(i) = ev.right_traces.iter().position(|t| !num_traits::Zero::is_zero(t)) {
                Some(format!("tr ϱ(e{}) = {}", i + 1, format_rational(&ev.right_traces[i])))
            } else if let Some(i) = ev.nabla_nilpotent.iter().position(|b| !b) {
                Some(format!("∇_e{} not nilpotent", i + 1))
            } else if let Some(i) = ev.right_nilpotent.iter().position(|b| !b) {
                Some(format!("ϱ(e{}) not nilpotent", i + 1))
            } else if ev.random_nabla_nilpotent.iter().any(|b| !b) {
                Some("∇_x not nilpotent for a sampled direction".into())
            } else {
                None
            };
            rec.verdict(Check::Completeness, failure);
        }
        Err(e) => {
            rec.verdict(Check::Completeness, Some(e.to_string()));
        }
    }

    let triple = match ExtensionTriple::zero(conn.clone()) {
        Ok(t) => t,
        Err(e) => {
            rec.all(&Check::ALL[4..], Status::Fail, &e.to_string());
            return;
        }
    };
    let jacobi = extension_jacobi(&triple);
    if !rec.verdict(Check::ExtensionJacobi, jacobi.first().map(ToString::to_string)) {
        rec.all(&Check::ALL[5..], Status::Skipped, "extension-jacobi failed");
        return;
    }
    let g = match build_extension(&triple) {
        Ok(g) => g,
        Err(e) => {
            rec.all(&Check::ALL[5..], Status::Fail, &e.to_string());
            return;
        }
    };
    let closed = g.closedness_violations();
    let closed_failure = closed
        .first()
        .map(ToString::to_string)
        .or_else(|| (!g.is_nondegenerate()).then(|| "ω is degenerate".to_string()));
    rec.verdict(Check::ExtensionClosed, closed_failure);

    let n = conn.dim();
    let verdict = g.classify_ideal(&dual_half(n));
    let ideal_failure = match (verdict.class, verdict.normal) {
        (IdealClass::Lagrangian, true) => None,
        (IdealClass::Lagrangian, false) => Some("h* is Lagrangian but not normal".to_string()),
        (class, _) => Some(format!("h* is {class}")),
    };
    rec.verdict(Check::LagrangianIdeal, ideal_failure);

    match extension_nilpotency(&triple) {
        Ok(v) if v.nilpotent => {
            let class = v.class.map_or("-".into(), |c| c.to_string());
            rec.push(Check::ExtensionNilpotent, Status::Pass, format!("class {class}"));
        }
        Ok(v) => {
            let dims = v.lcs_dims.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
            rec.push(Check::ExtensionNilpotent, Status::Fail, format!("lower central series dims {dims}"));
        }
        Err(e) => rec.push(Check::ExtensionNilpotent, Status::Fail, e.to_string()),
    }

    let round_trip = match g.induced_flat_connection(&dual_half(n)) {
        Ok(back) => gamma_mismatch(conn, &back),
        Err(e) => Some(e.to_string()),
    };
    rec.verdict(Check::RoundTrip, round_trip);
}

fn bracket_mismatch(entry: &CatalogEntry, conn: &FlatConnection) -> Option<String> {
    let induced = conn.induced_bracket();
    let declared = entry.base_algebra();
    let n = conn.dim();
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .find(|&(i, j)| induced.bracket_basis(i, j) != declared.bracket_basis(i, j))
        .map(|(i, j)| {
            format!(
                "[e{},e{}]: induced {} declared {}",
                i + 1,
                j + 1,
                format_vector(induced.bracket_basis(i, j)),
                format_vector(declared.bracket_basis(i, j))
            )
        })
}

fn gamma_mismatch(a: &FlatConnection, b: &FlatConnection) -> Option<String> {
    let n = a.dim();
    if b.dim() != n {
        return Some(format!("dimension {} recovered as {}", n, b.dim()));
    }
    for i in 0..n {
        for j in 0..n {
            let (x, y) = (a.product_basis(i, j), b.product_basis(i, j));
            if x != y {
                return Some(format!(
                    "∇_e{}e{}: {} recovered as {}",
                    i + 1,
                    j + 1,
                    format_vector(x),
                    format_vector(y)
                ));
            }
        }
    }
    None
}

/// Verifies `entries` and returns their records in the given order.
pub fn verify_entries(entries: &[&CatalogEntry], opts: &VerifyOptions) -> Vec<ReportRecord> {
    let per_entry = |e: &&CatalogEntry| verify_entry(e, opts.samples, opts.seed);
    let groups: Vec<Vec<ReportRecord>> = match opts.exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => entries.par_iter().map(per_entry).collect(),
        _ => entries.iter().map(per_entry).collect(),
    };
    groups.into_iter().flatten().collect()
}

/// True iff no non-suspect record failed.
pub fn all_passed(records: &[ReportRecord]) -> bool {
    !records.iter().any(|r| r.status == Status::Fail && !r.suspect)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Tally {
    pub pass: usize,
    pub fail: usize,
    pub conflict: usize,
    pub skipped: usize,
}

pub fn tally(records: &[ReportRecord]) -> Tally {
    let mut t = Tally::default();
    for r in records {
        match r.status {
            Status::Pass => t.pass += 1,
            Status::Fail => t.fail += 1,
            Status::Conflict => t.conflict += 1,
            Status::Skipped => t.skipped += 1,
        }
    }
    t
}

pub const TSV_HEADER: &str = "entry\tsample\tparams\tcheck\tstatus\twitness";

pub fn format_tsv(records: &[ReportRecord]) -> String {
    let mut out = String::new();
    out.push_str(TSV_HEADER);
    out.push('\n');
    for r in records {
        let witness = if r.witness.is_empty() { "-" } else { r.witness.as_str() };
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            r.entry, r.sample, r.params, r.check, r.status, witness
        );
    }
    out
}

pub fn format_text(records: &[ReportRecord]) -> String {
    let mut out = String::new();
    for r in records {
        let _ = write!(
            out,
            "{:<6} #{} {:<12} {:<20} {}",
            r.entry, r.sample, r.params, r.check.name(), r.status
        );
        if !r.witness.is_empty() {
            let _ = write!(out, "  {}", r.witness);
        }
        out.push('\n');
    }
    let t = tally(records);
    let mut entries: Vec<&str> = records.iter().map(|r| r.entry.as_str()).collect();
    entries.dedup();
    let _ = writeln!(
        out,
        "{} entries, {} records: {} pass, {} fail, {} conflict, {} skipped",
        entries.len(),
        records.len(),
        t.pass,
        t.fail,
        t.conflict,
        t.skipped
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::entry;

    fn run(label: &str) -> Vec<ReportRecord> {
        verify_entry(entry(label).unwrap(), 3, 0)
    }

    #[test]
    fn l26_passes_everything() {
        let r = run("l_26");
        assert_eq!(r.len(), 9);
        assert!(r.iter().all(|x| x.status == Status::Pass), "{r:#?}");
        assert_eq!(r[7].witness, "class 2");
    }

    #[test]
    fn suspect_rows_report_conflicts() {
        let r = run("l_29");
        assert_eq!(r.len(), 9);
        assert!(r.iter().all(|x| x.status == Status::Conflict));
        assert!(r[0].witness.contains("(e2,e2)"));
        assert!(all_passed(&r));
        let r = run("t_17");
        assert_eq!(r.len(), 27);
        assert!(r.iter().all(|x| x.status == Status::Conflict && x.suspect));
    }

    #[test]
    fn parametrized_entries_get_three_samples() {
        let r = run("l_3");
        assert_eq!(r.len(), 27);
        let samples: Vec<usize> = r.iter().map(|x| x.sample).collect();
        assert_eq!(&samples[..], &[[0; 9], [1; 9], [2; 9]].concat()[..]);
        assert!(all_passed(&r));
    }

    #[test]
    fn torsion_failure_skips_dependants() {
        let r = run("t_6");
        assert_eq!(r[0].status, Status::Fail);
        assert!(!r[0].witness.is_empty());
        assert!(r[3..].iter().all(|x| x.status == Status::Skipped));
        assert!(!all_passed(&r));
    }

    #[test]
    fn formats() {
        let r = run("a_10");
        let tsv = format_tsv(&r);
        assert!(tsv.starts_with(TSV_HEADER));
        assert_eq!(tsv.lines().count(), 10);
        assert!(tsv.lines().nth(1).unwrap().starts_with("a_10\t0\t-\ttorsion\tpass\t-"));
        let text = format_text(&r);
        assert!(text.ends_with("1 entries, 9 records: 9 pass, 0 fail, 0 conflict, 0 skipped\n"));
    }

    #[test]
    fn sequential_matches_parallel() {
        let es: Vec<&CatalogEntry> = ["a_3", "l_3", "l_29", "t_8"].iter().map(|l| entry(l).unwrap()).collect();
        let par = verify_entries(&es, &VerifyOptions::default());
        let seq = verify_entries(&es, &VerifyOptions { exec: Exec::Sequential, ..Default::default() });
        assert_eq!(par, seq);
    }
}
