//! Flat torsion-free connections, i.e. left-symmetric products `x·y = ∇_x y`.

use std::fmt;

use num_traits::{One, Zero};

use crate::lie::LieAlgebra;
use crate::linalg::{add_scaled, is_zero_vector, unit, RatMatrix, Rational, Vector};
use crate::sampling::RationalSampler;

/// Number of pseudo-random directions used to probe nilpotency of `∇_x`
/// beyond the basis vectors.
pub const RANDOM_DIRECTIONS: usize = 8;
pub const DIRECTION_SEED: u64 = 0x6c61_6765_7874;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConnectionError {
    #[error("Γ tensor has {found} entries, expected {expected}")]
    BadShape { expected: usize, found: usize },
    #[error("connection is not flat and torsion-free: {0}")]
    NotFlatTorsionFree(String),
    #[error("connection is not flat: {0}")]
    NotFlat(String),
}

/// `∇_{e_i} e_j = Σ_k Γ[i][j][k] e_k` over a base Lie algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatConnection {
    base: LieAlgebra,
    gamma: Vec<Rational>,
    params: Vec<(String, Rational)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairResidual {
    pub pair: (usize, usize),
    pub residual: Vector,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripleResidual {
    pub triple: (usize, usize, usize),
    pub residual: Vector,
}

impl fmt::Display for PairResidual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(e{},e{}) -> {}",
            self.pair.0 + 1,
            self.pair.1 + 1,
            crate::format_vector(&self.residual)
        )
    }
}

impl fmt::Display for TripleResidual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (i, j, k) = self.triple;
        write!(
            f,
            "(e{},e{},e{}) -> {}",
            i + 1,
            j + 1,
            k + 1,
            crate::format_vector(&self.residual)
        )
    }
}

/// Torsion and curvature residuals, plus the associator form of flatness.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConnectionReport {
    /// `T(e_i, e_j)` for `i < j`, nonzero entries only.
    pub torsion: Vec<PairResidual>,
    /// `R(e_i, e_j) e_k` for `i < j`, nonzero entries only.
    pub curvature: Vec<TripleResidual>,
    /// KV1: `x·y − y·x − [x,y]`, identical to torsion by definition but
    /// computed from the product.
    pub kv1: Vec<PairResidual>,
    /// KV2: `(x,y,z) − (y,x,z)` with the associator `(x·y)·z − x·(y·z)`.
    pub kv2: Vec<TripleResidual>,
}

impl ConnectionReport {
    pub fn is_torsion_free(&self) -> bool {
        self.torsion.is_empty()
    }

    pub fn is_flat(&self) -> bool {
        self.curvature.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.torsion.is_empty() && self.curvature.is_empty()
    }

    /// The curvature and associator formulations agree whenever torsion
    /// vanishes; disagreement points at a bug.
    pub fn formulations_agree(&self) -> bool {
        let kv_ok = self.kv1.is_empty() && self.kv2.is_empty();
        (self.is_empty() == kv_ok) && (self.torsion.is_empty() == self.kv1.is_empty())
    }

    pub fn summary(&self) -> String {
        let mut parts = Vec::new();
        if let Some(t) = self.torsion.first() {
            parts.push(format!("torsion {t}"));
        }
        if let Some(r) = self.curvature.first() {
            parts.push(format!("curvature {r}"));
        }
        if parts.is_empty() {
            "ok".to_string()
        } else {
            parts.join("; ")
        }
    }
}

/// Completeness verdict and the nilpotency evidence gathered on the way.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompletenessEvidence {
    /// `tr(ϱ_{e_i})` for each basis vector.
    pub right_traces: Vec<Rational>,
    pub complete: bool,
    pub nabla_nilpotent: Vec<bool>,
    pub right_nilpotent: Vec<bool>,
    /// Nilpotency of `∇_x` for seeded random directions `x`.
    pub random_nabla_nilpotent: Vec<bool>,
}

impl CompletenessEvidence {
    pub fn all_nilpotent(&self) -> bool {
        self.nabla_nilpotent.iter().all(|&b| b)
            && self.right_nilpotent.iter().all(|&b| b)
            && self.random_nabla_nilpotent.iter().all(|&b| b)
    }
}

/// `ρ(e_i) = −(∇_{e_i})ᵀ`, acting on coordinate vectors of `h*`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualRep {
    connection: FlatConnection,
    rho: Vec<RatMatrix>,
}

impl FlatConnection {
    pub fn new(base: LieAlgebra, gamma: Vec<Rational>) -> Result<Self, ConnectionError> {
        let n = base.dim();
        if gamma.len() != n * n * n {
            return Err(ConnectionError::BadShape {
                expected: n * n * n,
                found: gamma.len(),
            });
        }
        Ok(FlatConnection {
            base,
            gamma,
            params: Vec::new(),
        })
    }

    /// From `(i, j, coef, k)` triples meaning `∇_{e_i} e_j += coef e_k`.
    pub fn from_triples(base: LieAlgebra, triples: &[(usize, usize, Rational, usize)]) -> Self {
        let n = base.dim();
        let mut gamma = vec![Rational::zero(); n * n * n];
        for (i, j, coef, k) in triples {
            gamma[(i * n + j) * n + k] += coef;
        }
        FlatConnection {
            base,
            gamma,
            params: Vec::new(),
        }
    }

    pub fn zero(base: LieAlgebra) -> Self {
        let n = base.dim();
        FlatConnection {
            base,
            gamma: vec![Rational::zero(); n * n * n],
            params: Vec::new(),
        }
    }

    pub fn with_params(mut self, params: Vec<(String, Rational)>) -> Self {
        self.params = params;
        self
    }

    pub fn base(&self) -> &LieAlgebra {
        &self.base
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn gamma(&self) -> &[Rational] {
        &self.gamma
    }

    pub fn params(&self) -> &[(String, Rational)] {
        &self.params
    }

    pub fn coefficient(&self, i: usize, j: usize, k: usize) -> &Rational {
        let n = self.dim();
        &self.gamma[(i * n + j) * n + k]
    }

    /// Coordinates of `∇_{e_i} e_j`.
    pub fn product_basis(&self, i: usize, j: usize) -> &[Rational] {
        let n = self.dim();
        let start = (i * n + j) * n;
        &self.gamma[start..start + n]
    }

    /// `x·y = ∇_x y`.
    pub fn product(&self, x: &[Rational], y: &[Rational]) -> Vector {
        let n = self.dim();
        let mut out = vec![Rational::zero(); n];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if !yj.is_zero() {
                    add_scaled(&mut out, &(xi * yj), self.product_basis(i, j));
                }
            }
        }
        out
    }

    /// Matrix of `∇_{e_i}`; column `j` is `∇_{e_i} e_j`.
    pub fn nabla(&self, i: usize) -> RatMatrix {
        let n = self.dim();
        RatMatrix::from_fn(n, n, |k, j| self.coefficient(i, j, k).clone())
    }

    pub fn nabla_vec(&self, x: &[Rational]) -> RatMatrix {
        let n = self.dim();
        RatMatrix::from_fn(n, n, |k, j| {
            x.iter()
                .enumerate()
                .filter(|(_, xi)| !xi.is_zero())
                .map(|(i, xi)| xi * self.coefficient(i, j, k))
                .sum()
        })
    }

    /// Matrix of the right multiplication `ϱ_{e_j}: y ↦ y·e_j`.
    pub fn right_mult(&self, j: usize) -> RatMatrix {
        let n = self.dim();
        RatMatrix::from_fn(n, n, |k, i| self.coefficient(i, j, k).clone())
    }

    pub fn check_flat_torsion_free(&self) -> ConnectionReport {
        let n = self.dim();
        let base = &self.base;
        let mut report = ConnectionReport::default();
        let minus = -Rational::one();

        for i in 0..n {
            for j in i + 1..n {
                let mut t = self.product_basis(i, j).to_vec();
                add_scaled(&mut t, &minus, self.product_basis(j, i));
                add_scaled(&mut t, &minus, base.bracket_basis(i, j));
                if !is_zero_vector(&t) {
                    report.torsion.push(PairResidual {
                        pair: (i, j),
                        residual: t,
                    });
                }
                let (ei, ej) = (unit(n, i), unit(n, j));
                let mut kv1 = self.product(&ei, &ej);
                add_scaled(&mut kv1, &minus, &self.product(&ej, &ei));
                add_scaled(&mut kv1, &minus, &base.bracket(&ei, &ej));
                if !is_zero_vector(&kv1) {
                    report.kv1.push(PairResidual {
                        pair: (i, j),
                        residual: kv1,
                    });
                }
            }
        }

        let nablas: Vec<RatMatrix> = (0..n).map(|i| self.nabla(i)).collect();
        for i in 0..n {
            for j in i + 1..n {
                // R(e_i,e_j) = [∇_i, ∇_j] − ∇_{[e_i,e_j]}
                let comm = nablas[i].mul(&nablas[j]).sub(&nablas[j].mul(&nablas[i]));
                let r = comm.sub(&self.nabla_vec(base.bracket_basis(i, j)));
                for k in 0..n {
                    let col = r.column(k);
                    if !is_zero_vector(&col) {
                        report.curvature.push(TripleResidual {
                            triple: (i, j, k),
                            residual: col,
                        });
                    }
                }
                for k in 0..n {
                    let (ei, ej, ek) = (unit(n, i), unit(n, j), unit(n, k));
                    let assoc = |x: &Vector, y: &Vector| {
                        let mut a = self.product(&self.product(x, y), &ek);
                        add_scaled(&mut a, &minus, &self.product(x, &self.product(y, &ek)));
                        a
                    };
                    let mut d = assoc(&ei, &ej);
                    add_scaled(&mut d, &minus, &assoc(&ej, &ei));
                    if !is_zero_vector(&d) {
                        report.kv2.push(TripleResidual {
                            triple: (i, j, k),
                            residual: d,
                        });
                    }
                }
            }
        }
        report
    }

    /// The Lie algebra with bracket `x·y − y·x`.
    pub fn induced_bracket(&self) -> LieAlgebra {
        let n = self.dim();
        let mut c = vec![Rational::zero(); n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    c[(i * n + j) * n + k] = self.coefficient(i, j, k) - self.coefficient(j, i, k);
                }
            }
        }
        LieAlgebra::from_tensor(format!("{}/induced", self.base.name()), n, c)
            .expect("antisymmetrized tensor is antisymmetric")
    }

    /// Completeness via `tr ϱ_{e_i} = 0` for all `i`; nilpotency of `∇` and
    /// `ϱ` is recorded alongside.
    pub fn is_geodesically_complete(&self) -> Result<CompletenessEvidence, ConnectionError> {
        let report = self.check_flat_torsion_free();
        if !report.is_empty() {
            return Err(ConnectionError::NotFlatTorsionFree(report.summary()));
        }
        let n = self.dim();
        let right_traces: Vec<Rational> = (0..n).map(|j| self.right_mult(j).trace()).collect();
        let complete = right_traces.iter().all(Zero::is_zero);
        let nabla_nilpotent = (0..n).map(|i| self.nabla(i).is_nilpotent()).collect();
        let right_nilpotent = (0..n).map(|j| self.right_mult(j).is_nilpotent()).collect();
        let mut sampler = RationalSampler::new(DIRECTION_SEED);
        let random_nabla_nilpotent = (0..RANDOM_DIRECTIONS)
            .map(|_| self.nabla_vec(&sampler.vector(n)).is_nilpotent())
            .collect();
        Ok(CompletenessEvidence {
            right_traces,
            complete,
            nabla_nilpotent,
            right_nilpotent,
            random_nabla_nilpotent,
        })
    }

    pub fn dual_representation(&self) -> Result<DualRep, ConnectionError> {
        let report = self.check_flat_torsion_free();
        if !report.is_flat() {
            return Err(ConnectionError::NotFlat(report.summary()));
        }
        let rho = (0..self.dim()).map(|i| self.nabla(i).transpose().neg()).collect();
        Ok(DualRep {
            connection: self.clone(),
            rho,
        })
    }
}

impl DualRep {
    pub fn connection(&self) -> &FlatConnection {
        &self.connection
    }

    pub fn base(&self) -> &LieAlgebra {
        self.connection.base()
    }

    pub fn dim(&self) -> usize {
        self.connection.dim()
    }

    pub fn matrix(&self, i: usize) -> &RatMatrix {
        &self.rho[i]
    }

    pub fn matrices(&self) -> &[RatMatrix] {
        &self.rho
    }

    /// `ρ(x)` for an arbitrary `x ∈ h`.
    pub fn matrix_vec(&self, x: &[Rational]) -> RatMatrix {
        let n = self.dim();
        let mut m = RatMatrix::zeros(n, n);
        for (i, xi) in x.iter().enumerate() {
            if !xi.is_zero() {
                m = m.add(&self.rho[i].scale(xi));
            }
        }
        m
    }

    /// `ρ(e_i) ξ`.
    pub fn act(&self, i: usize, xi: &[Rational]) -> Vector {
        self.rho[i].mul_vec(xi)
    }

    /// Pairs `(i, j)` where `ρ([e_i,e_j]) ≠ [ρ(e_i), ρ(e_j)]`.
    pub fn representation_violations(&self) -> Vec<(usize, usize)> {
        let n = self.dim();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let lhs = self.matrix_vec(self.base().bracket_basis(i, j));
                let rhs = self.rho[i].mul(&self.rho[j]).sub(&self.rho[j].mul(&self.rho[i]));
                if lhs != rhs {
                    out.push((i, j));
                }
            }
        }
        out
    }
}
