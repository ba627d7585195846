//! The three 4-dimensional nilpotent Lie algebras and the catalog of
//! geodesically complete flat structures on them.

use std::fmt;
use std::sync::OnceLock;

use num_traits::{One, Signed, Zero};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::connection::FlatConnection;
use crate::expr::{Assignment, EvalError};
use crate::lie::LieAlgebra;
use crate::linalg::{format_rational, int, rat, Rational};
use crate::spec::{parse_documents, BuildError, Cell, Conflict, Constraint, ParamSpec, SpecFile};

/// Catalog source text, in the spec-file format.
pub const CATALOG_TEXT: &str = include_str!("../data/catalog.lagext");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BaseAlgebra {
    /// `R^4`.
    A,
    /// `[e1,e2] = e3`.
    L,
    /// `[e1,e4] = −e2`, `[e2,e4] = −e3`.
    T,
}

impl BaseAlgebra {
    pub const ALL: [BaseAlgebra; 3] = [BaseAlgebra::A, BaseAlgebra::L, BaseAlgebra::T];

    pub fn letter(self) -> &'static str {
        match self {
            BaseAlgebra::A => "a",
            BaseAlgebra::L => "l",
            BaseAlgebra::T => "t",
        }
    }

    pub fn from_letter(s: &str) -> Option<Self> {
        BaseAlgebra::ALL.into_iter().find(|b| b.letter() == s)
    }
}

impl fmt::Display for BaseAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.letter())
    }
}

pub fn base_algebra(b: BaseAlgebra) -> LieAlgebra {
    let m1 = -Rational::one();
    match b {
        BaseAlgebra::A => LieAlgebra::abelian("a", 4),
        BaseAlgebra::L => LieAlgebra::from_brackets("l", 4, &[(0, 1, Rational::one(), 2)]),
        BaseAlgebra::T => LieAlgebra::from_brackets("t", 4, &[(0, 3, m1.clone(), 1), (1, 3, m1, 2)]),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    /// Position in the catalog; also selects the sampler stream.
    pub index: usize,
    pub label: String,
    pub base: BaseAlgebra,
    pub spec: SpecFile,
    pub suspect: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParameterSample {
    pub values: Assignment,
    pub seed: u64,
    /// Position among the samples drawn for this entry.
    pub id: usize,
}

impl ParameterSample {
    pub fn describe(&self) -> String {
        if self.values.is_empty() {
            return "-".into();
        }
        self.values
            .iter()
            .map(|(k, v)| format!("{k}={}", format_rational(v)))
            .collect::<Vec<_>>()
            .join(",")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SampleError {
    #[error("no parameter values in the pool satisfy the constraints of {0}")]
    Unsatisfiable(String),
    #[error("sample count must be at least 1")]
    ZeroSamples,
}

/// Result of materializing an entry.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InstantiateError {
    #[error("{label}: {}", .conflicts.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Conflict { label: String, conflicts: Vec<Conflict> },
    #[error("{label}: {source}")]
    Build { label: String, source: BuildError },
}

impl CatalogEntry {
    /// `(i, j, coefficient, k)` as written, 0-based.
    pub fn gamma_triples(&self) -> Vec<(usize, usize, String, usize)> {
        self.cells()
            .iter()
            .flat_map(|c| c.terms.iter().map(move |t| (c.i, c.j, t.coef.to_string(), t.index)))
            .collect()
    }

    pub fn cells(&self) -> &[Cell] {
        self.spec.connection.as_deref().unwrap_or(&[])
    }

    pub fn param_names(&self) -> Vec<&str> {
        self.spec.params.iter().map(|p| p.name.as_str()).collect()
    }

    pub fn conflicts(&self) -> Vec<Conflict> {
        self.spec.connection_conflicts()
    }

    pub fn base_algebra(&self) -> LieAlgebra {
        base_algebra(self.base)
    }

    pub fn satisfies(&self, values: &Assignment) -> bool {
        self.spec.params.iter().all(|p| {
            let Some(v) = values.get(&p.name) else {
                return false;
            };
            match &p.spec {
                ParamSpec::Value(x) => v == x,
                ParamSpec::Constraint(c) => satisfies(c, v, values),
            }
        })
    }

    /// `k` distinct parameter assignments drawn from the pool
    /// `{1, 2, 1/3, −1, −1/2, 3}`, extended by `4, −2, 5, −3, …` until
    /// enough assignments satisfy the constraints and give finite
    /// coefficients. Entries without parameters yield one empty sample.
    pub fn sample_parameters(&self, k: usize, seed: u64) -> Result<Vec<ParameterSample>, SampleError> {
        if k == 0 {
            return Err(SampleError::ZeroSamples);
        }
        if self.spec.params.is_empty() {
            return Ok(vec![ParameterSample {
                values: Assignment::new(),
                seed,
                id: 0,
            }]);
        }
        let mut pool = vec![int(1), int(2), rat(1, 3), int(-1), rat(-1, 2), int(3)];
        let mut next = 4i64;
        loop {
            let candidates = self.candidates(&pool);
            if candidates.len() >= k || pool.len() >= MAX_POOL {
                if candidates.is_empty() {
                    return Err(SampleError::Unsatisfiable(self.label.clone()));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(self.index as u64);
                let mut picked = sample(&mut rng, candidates.len(), k.min(candidates.len())).into_vec();
                picked.sort_unstable();
                return Ok(picked
                    .into_iter()
                    .enumerate()
                    .map(|(id, c)| ParameterSample {
                        values: candidates[c].clone(),
                        seed,
                        id,
                    })
                    .collect());
            }
            pool.push(int(next));
            pool.push(int(2 - next));
            next += 1;
        }
    }

    fn candidates(&self, pool: &[Rational]) -> Vec<Assignment> {
        let mut out = vec![Assignment::new()];
        for p in &self.spec.params {
            let choices: Vec<Rational> = match &p.spec {
                ParamSpec::Value(v) => vec![v.clone()],
                ParamSpec::Constraint(c) => pool.iter().filter(|v| satisfies_alone(c, v)).cloned().collect(),
            };
            out = out
                .into_iter()
                .flat_map(|a| {
                    choices.iter().map(move |v| {
                        let mut a = a.clone();
                        a.insert(p.name.clone(), v.clone());
                        a
                    })
                })
                .collect();
        }
        out.retain(|a| self.satisfies(a) && self.coefficients_defined(a));
        out
    }

    fn coefficients_defined(&self, values: &Assignment) -> bool {
        self.cells()
            .iter()
            .flat_map(|c| &c.terms)
            .all(|t| !matches!(t.coef.eval(values), Err(EvalError::DivisionByZero)))
    }

    /// The connection for a sample, or the duplicated cells for rows that
    /// assign one cell twice.
    pub fn instantiate(&self, sample: &ParameterSample) -> Result<FlatConnection, InstantiateError> {
        let conflicts = self.conflicts();
        if !conflicts.is_empty() {
            return Err(InstantiateError::Conflict {
                label: self.label.clone(),
                conflicts,
            });
        }
        self.spec
            .connection(&sample.values)
            .map_err(|source| InstantiateError::Build {
                label: self.label.clone(),
                source,
            })
    }
}

const MAX_POOL: usize = 40;

fn satisfies_alone(c: &Constraint, v: &Rational) -> bool {
    match c {
        Constraint::Free | Constraint::Differs(_) => true,
        Constraint::Positive | Constraint::PositiveNonzero => v.is_positive(),
        Constraint::Nonzero => !v.is_zero(),
        Constraint::Excluded(xs) => !xs.contains(v),
        Constraint::Greater(r) => v > r,
        Constraint::Less(r) => v < r,
    }
}

fn satisfies(c: &Constraint, v: &Rational, env: &Assignment) -> bool {
    match c {
        Constraint::Differs(e) => e.eval(env).is_ok_and(|x| &x != v),
        other => satisfies_alone(other, v),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CatalogError {
    #[error(transparent)]
    Parse(#[from] crate::spec::SpecError),
    #[error("label `{0}` does not name a base algebra")]
    UnknownBase(String),
    #[error("label `{0}` appears twice")]
    DuplicateLabel(String),
    #[error("{0}: brackets do not match the base algebra")]
    BaseMismatch(String),
}

/// Parses catalog text. Labels are `<base>_<n>`.
pub fn parse_catalog(text: &str) -> Result<Vec<CatalogEntry>, CatalogError> {
    let docs = parse_documents(text)?;
    let mut out: Vec<CatalogEntry> = Vec::with_capacity(docs.len());
    for (index, spec) in docs.into_iter().enumerate() {
        let label = spec.name.clone();
        let base = label
            .split_once('_')
            .and_then(|(b, _)| BaseAlgebra::from_letter(b))
            .ok_or_else(|| CatalogError::UnknownBase(label.clone()))?;
        if out.iter().any(|e| e.label == label) {
            return Err(CatalogError::DuplicateLabel(label));
        }
        let declared = spec
            .algebra(&Assignment::new())
            .map_err(|_| CatalogError::BaseMismatch(label.clone()))?;
        if declared.tensor() != base_algebra(base).tensor() {
            return Err(CatalogError::BaseMismatch(label));
        }
        let suspect = !spec.connection_conflicts().is_empty();
        out.push(CatalogEntry {
            index,
            label,
            base,
            spec,
            suspect,
        });
    }
    Ok(out)
}

/// The embedded catalog, parsed once.
pub fn catalog_entries() -> &'static [CatalogEntry] {
    static ENTRIES: OnceLock<Vec<CatalogEntry>> = OnceLock::new();
    ENTRIES.get_or_init(|| parse_catalog(CATALOG_TEXT).expect("embedded catalog parses"))
}

pub fn entry(label: &str) -> Option<&'static CatalogEntry> {
    catalog_entries().iter().find(|e| e.label == label)
}

/// Symplectic forms of the 8-dimensional filiform algebras, kept verbatim
/// as reference strings. Their brackets are not available, so nothing is
/// checked against them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FiliformFormRecord {
    pub algebra: &'static str,
    pub form: &'static str,
    pub coefficients: &'static str,
    pub remarks: &'static str,
}

pub const FILIFORM_FORMS: [FiliformFormRecord; 5] = [
    FiliformFormRecord {
        algebra: "g_{8,80}^{a,b,c,d,lambda,mu,mu_1}",
        form: "kappa_1 e^13 + e^15 + kappa_2 e^23 + e^26 + e^37 + e^48",
        coefficients: "kappa_1 = c, kappa_2 = d - lambda",
        remarks: "b(mu_1 - 1)(mu + 1) != 0",
    },
    FiliformFormRecord {
        algebra: "g_{8,90}^{a,b,c,d,lambda}",
        form: "kappa_1 e^13 + e^15 + kappa_2 e^23 + e^26 + e^37 + e^48",
        coefficients: "kappa_1 = -c, kappa_2 = a - d",
        remarks: "lambda != 0",
    },
    FiliformFormRecord {
        algebra: "g_{8,91}^{a,b,c,d,lambda}",
        form: "e^15 + kappa e^23 + e^26 + e^37 + e^48",
        coefficients: "kappa = c - lambda",
        remarks: "b - d != 0",
    },
    FiliformFormRecord {
        algebra: "g_{8,93}^{a,b,c,d,lambda}",
        form: "e^15 + kappa e^23 + e^26 + e^37 + e^48",
        coefficients: "kappa = -d - 8c/5",
        remarks: "b != 0",
    },
    FiliformFormRecord {
        algebra: "g_{8,95}^{a,b,c,d,lambda}",
        form: "e^15 + kappa e^23 + e^26 + e^37 + e^48",
        coefficients: "kappa = b - d - (3a + 8c)/5",
        remarks: "b != 0",
    },
];
