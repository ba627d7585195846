//! Acceptance criteria. Runs as a plain binary so that every criterion
//! prints its line whether it passes or not; exits nonzero if any fails.

mod common;

use std::collections::BTreeMap;
use std::process::Command;
use std::time::{Duration, Instant};

use lagext::catalog::{base_algebra, entry, catalog_entries, BaseAlgebra};
use lagext::cohomology::{coboundary_1, cohomology, random_cocycle, OneCochain};
use lagext::connection::FlatConnection;
use lagext::extension::{
    adjusted_symplectic_form, build_extension, check_bianchi, dual_half, equivalence_map_psi, extension_algebra,
    standard_omega, ExtensionTriple, SymplecticLieAlgebra,
};
use lagext::lie::LieAlgebra;
use lagext::sampling::RationalSampler;
use lagext::verify::{verify_entries, Check, ReportRecord, Status, VerifyOptions};

const SAMPLES: usize = 3;
const SEED: u64 = 0;
/// Entries used for the random-cocycle criteria.
const SPREAD: [&str; 6] = ["a_3", "a_10", "l_3", "l_26", "t_8", "t_16"];

type Verdict = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Verdict + 'a>);

struct Sweep {
    records: Vec<ReportRecord>,
    elapsed: Duration,
}

fn sweep() -> Sweep {
    let entries: Vec<_> = catalog_entries().iter().collect();
    let start = Instant::now();
    let records = verify_entries(
        &entries,
        &VerifyOptions {
            samples: SAMPLES,
            seed: SEED,
            ..Default::default()
        },
    );
    Sweep {
        records,
        elapsed: start.elapsed(),
    }
}

fn within(limit: Duration, elapsed: Duration, detail: String) -> Verdict {
    if elapsed <= limit {
        Ok(detail)
    } else {
        Err(format!("{detail}; took {:.2?}, limit {:.0?}", elapsed, limit))
    }
}

/// Non-suspect records of the given checks that did not pass, grouped by
/// entry.
fn failures<'a>(records: &'a [ReportRecord], checks: &[Check]) -> BTreeMap<&'a str, Vec<&'a ReportRecord>> {
    let mut out: BTreeMap<&str, Vec<&ReportRecord>> = BTreeMap::new();
    for r in records.iter().filter(|r| !r.suspect && checks.contains(&r.check)) {
        if r.status != Status::Pass {
            out.entry(r.entry.as_str()).or_default().push(r);
        }
    }
    out
}

/// First non-passing record of each entry, with the total count.
fn describe(f: &BTreeMap<&str, Vec<&ReportRecord>>) -> String {
    f.iter()
        .map(|(e, rs)| {
            let r = rs[0];
            format!("{e} #{} {} {}: {} ({} records)", r.sample, r.check, r.status, r.witness, rs.len())
        })
        .collect::<Vec<_>>()
        .join("; ")
}

fn sample_counts_ok(records: &[ReportRecord]) -> Result<usize, String> {
    let mut samples: BTreeMap<&str, usize> = BTreeMap::new();
    for r in records.iter().filter(|r| !r.suspect && r.check == Check::Torsion) {
        *samples.entry(r.entry.as_str()).or_default() += 1;
    }
    for e in catalog_entries().iter().filter(|e| !e.suspect) {
        let want = if e.param_names().is_empty() { 1 } else { SAMPLES };
        if samples.get(e.label.as_str()) != Some(&want) {
            return Err(format!("{} has {:?} samples", e.label, samples.get(e.label.as_str())));
        }
    }
    Ok(samples.len())
}

fn criterion_1(s: &Sweep) -> Verdict {
    let entries = sample_counts_ok(&s.records)?;
    if entries != 67 {
        return Err(format!("{entries} non-suspect entries, expected 67"));
    }
    let suspects: Vec<&str> = catalog_entries().iter().filter(|e| e.suspect).map(|e| e.label.as_str()).collect();
    for label in &suspects {
        let ok = s
            .records
            .iter()
            .filter(|r| r.entry == *label)
            .all(|r| r.status == Status::Conflict);
        if !ok {
            return Err(format!("{label} did not produce conflict records"));
        }
    }
    let f = failures(
        &s.records,
        &[Check::Torsion, Check::Flatness, Check::BaseBracketMatch, Check::Completeness],
    );
    if !f.is_empty() {
        return Err(format!("{} entries fail: {}", f.len(), describe(&f)));
    }
    within(
        Duration::from_secs(10),
        s.elapsed,
        format!("67 entries sound, conflicts for {}", suspects.join(", ")),
    )
}

fn criterion_2(s: &Sweep) -> Verdict {
    let f = failures(
        &s.records,
        &[
            Check::ExtensionJacobi,
            Check::ExtensionClosed,
            Check::LagrangianIdeal,
            Check::ExtensionNilpotent,
        ],
    );
    if !f.is_empty() {
        return Err(format!("{} entries fail: {}", f.len(), describe(&f)));
    }
    within(Duration::from_secs(10), s.elapsed, "all extensions symplectic and nilpotent".into())
}

fn instantiate(label: &str) -> FlatConnection {
    let e = entry(label).unwrap();
    e.instantiate(&e.sample_parameters(1, SEED).unwrap()[0]).unwrap()
}

fn criterion_3(s: &Sweep) -> Verdict {
    let f = failures(&s.records, &[Check::RoundTrip]);
    let mut problems = Vec::new();
    if !f.is_empty() {
        problems.push(format!("{} entries fail: {}", f.len(), describe(&f)));
    }
    let mut count = 0;
    for (i, label) in SPREAD.iter().enumerate() {
        let c = instantiate(label);
        let rep = c.dual_representation().map_err(|e| e.to_string())?;
        for k in 0..4 {
            let mut sampler = RationalSampler::new(1000 + (i * 4 + k) as u64);
            let alpha = random_cocycle(&rep, &mut sampler, true);
            let g = build_extension(&ExtensionTriple::new(c.clone(), alpha).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            match g.induced_flat_connection(&dual_half(4)) {
                Ok(back) if back.gamma() == c.gamma() => count += 1,
                Ok(_) => problems.push(format!("{label} cocycle {k}: Γ differs")),
                Err(e) => problems.push(format!("{label} cocycle {k}: {e}")),
            }
        }
    }
    if problems.is_empty() {
        Ok(format!("all entries plus {count} random Lagrangian cocycles over {} entries", SPREAD.len()))
    } else {
        Err(problems.join("; "))
    }
}

fn criterion_4() -> Verdict {
    let start = Instant::now();
    let (mut closed, mut open, mut discrepancies) = (0, 0, Vec::new());
    for (i, label) in SPREAD.iter().enumerate() {
        let c = instantiate(label);
        let rep = c.dual_representation().map_err(|e| e.to_string())?;
        for k in 0..20 {
            let mut sampler = RationalSampler::new(2000 + (i * 20 + k) as u64);
            let alpha = random_cocycle(&rep, &mut sampler, k % 4 == 0);
            let bianchi = check_bianchi(&alpha);
            let g = build_extension(&ExtensionTriple::new(c.clone(), alpha).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            let is_closed = g.d_omega().iter().all(|r| num_traits::Zero::is_zero(&r.value));
            if is_closed != bianchi {
                discrepancies.push(format!("{label} #{k}"));
            }
            if is_closed {
                closed += 1;
            } else {
                open += 1;
            }
        }
    }
    if !discrepancies.is_empty() {
        return Err(format!("discrepancies: {}", discrepancies.join(", ")));
    }
    if closed == 0 || open == 0 {
        return Err(format!("one-sided sample: {closed} closed, {open} not closed"));
    }
    within(
        Duration::from_secs(30),
        start.elapsed(),
        format!("{} cocycles, {closed} closed, {open} not closed, 0 discrepancies", closed + open),
    )
}

fn criterion_5() -> Verdict {
    let start = Instant::now();
    let mut parts = Vec::new();
    for (n, z2, z2l) in [(2, 2, 2), (3, 9, 8), (4, 24, 20)] {
        let c = FlatConnection::zero(LieAlgebra::abelian("a", n));
        let s = cohomology(&c.dual_representation().map_err(|e| e.to_string())?);
        let oracle = common::cohomology_dims(&common::flat_of(&c));
        if (s.z2_dim, s.z2l_dim) != (z2, z2l) || (oracle.z2, oracle.z2l) != (z2, z2l) {
            return Err(format!(
                "n={n}: library {}/{}, oracle {}/{}, expected {z2}/{z2l}",
                s.z2_dim, s.z2l_dim, oracle.z2, oracle.z2l
            ));
        }
        parts.push(format!("{z2}/{z2l}"));
    }
    within(Duration::from_secs(1), start.elapsed(), format!("n=2,3,4: {}", parts.join(" ")))
}

fn criterion_6() -> Verdict {
    let start = Instant::now();
    let mut trials = 0;
    for (i, label) in SPREAD.iter().enumerate() {
        let c = instantiate(label);
        let rep = c.dual_representation().map_err(|e| e.to_string())?;
        for k in 0..4 {
            let mut sampler = RationalSampler::new(3000 + (i * 4 + k) as u64);
            let alpha = random_cocycle(&rep, &mut sampler, true);
            let source = ExtensionTriple::new(c.clone(), alpha).map_err(|e| e.to_string())?;
            let sigma = OneCochain::random(4, &mut sampler);
            let sigma_l = OneCochain::random_symmetric(4, &mut sampler);
            for s in [&sigma, &sigma_l] {
                let target = source
                    .with_cocycle(source.cocycle().sub(&coboundary_1(source.rep(), s)))
                    .map_err(|e| e.to_string())?;
                let psi = equivalence_map_psi(&source, &target, s).map_err(|e| format!("{label}: {e}"))?;
                let pulled = psi.matrix.transpose().mul(&standard_omega(4)).mul(&psi.matrix);
                if s.matrix().is_symmetric() && pulled != standard_omega(4) {
                    return Err(format!("{label} #{k}: Ψᵀ ω Ψ ≠ ω for symmetric σ"));
                }
            }
            let f = adjusted_symplectic_form(&source, &sigma, &sigma_l).map_err(|e| format!("{label}: {e}"))?;
            let bar = source.with_cocycle(f.bar_alpha.clone()).map_err(|e| e.to_string())?;
            let s = SymplecticLieAlgebra::new(extension_algebra(&bar), f.omega.clone());
            if !(f.omega.is_antisymmetric() && s.is_nondegenerate() && s.is_closed()) {
                return Err(format!("{label} #{k}: adjusted form not symplectic"));
            }
            trials += 1;
        }
    }
    within(
        Duration::from_secs(10),
        start.elapsed(),
        format!("{trials} σ and {trials} symmetric σ over {} entries", SPREAD.len()),
    )
}

fn criterion_7() -> Verdict {
    let start = Instant::now();
    let mut built = 0;
    let mut sampler = RationalSampler::new(4000);
    for e in catalog_entries() {
        for s in e.sample_parameters(SAMPLES, SEED).map_err(|e| e.to_string())? {
            let Ok(c) = e.instantiate(&s) else { continue };
            let Ok(zero) = ExtensionTriple::zero(c.clone()) else { continue };
            let rep = zero.rep().clone();
            let random = zero.with_cocycle(random_cocycle(&rep, &mut sampler, true)).map_err(|e| e.to_string())?;
            for t in [zero, random] {
                let Ok(g) = build_extension(&t) else { continue };
                let canonical = g.canonical_connection().map_err(|err| format!("{} #{}: {err}", e.label, s.id))?;
                let report = canonical.check_flat_torsion_free();
                if !report.is_empty() {
                    return Err(format!("{} #{}: {}", e.label, s.id, report.summary()));
                }
                built += 1;
            }
        }
    }
    within(Duration::from_secs(10), start.elapsed(), format!("{built} extensions"))
}

fn criterion_8() -> Verdict {
    let start = Instant::now();
    let f: Vec<_> = BaseAlgebra::ALL.iter().map(|&b| (b, base_algebra(b).fingerprint())).collect();
    for (b, fp) in &f {
        let (class, filiform) = match b {
            BaseAlgebra::A => (1, false),
            BaseAlgebra::L => (2, false),
            BaseAlgebra::T => (3, true),
        };
        if fp.nilpotency_class != Some(class) || fp.is_filiform != filiform {
            return Err(format!("{b}: class {:?}, filiform {}", fp.nilpotency_class, fp.is_filiform));
        }
    }
    if f[0].1 == f[1].1 || f[0].1 == f[2].1 || f[1].1 == f[2].1 {
        return Err("fingerprints collide".into());
    }
    within(Duration::from_secs(1), start.elapsed(), "classes 1, 2, 3; t filiform; fingerprints distinct".into())
}

fn criterion_9() -> Verdict {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_lagext"))
            .args(["verify-catalog", "--seed", "0", "--format", "tsv"])
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b) = (run()?, run()?);
    if a.stdout.is_empty() {
        return Err("empty report".into());
    }
    if a.stdout != b.stdout {
        return Err("reports differ".into());
    }
    Ok(format!("{} bytes identical", a.stdout.len()))
}

fn main() {
    let start = Instant::now();
    let s = sweep();
    let criteria: [Criterion; 9] = [
        ("catalog soundness", Box::new(|| criterion_1(&s))),
        ("extension sweep", Box::new(|| criterion_2(&s))),
        ("round trip", Box::new(|| criterion_3(&s))),
        ("bianchi iff closed", Box::new(criterion_4)),
        ("cohomology oracle", Box::new(criterion_5)),
        ("equivalence maps", Box::new(criterion_6)),
        ("canonical connection", Box::new(criterion_7)),
        ("filiform sanity", Box::new(criterion_8)),
        ("determinism", Box::new(criterion_9)),
    ];
    let mut failed = 0;
    println!("catalog sweep: {} records in {:.2?}", s.records.len(), s.elapsed);
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let v = run();
        let elapsed = t.elapsed();
        match v {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail}) [{elapsed:.2?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({why}) [{elapsed:.2?}]", i + 1);
            }
        }
    }
    println!("{} of 9 criteria passed in {:.2?}", 9 - failed, start.elapsed());
    if failed > 0 {
        std::process::exit(1);
    }
}
