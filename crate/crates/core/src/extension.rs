//! Lagrangian extensions `h ⊕_ρ h*` of flat Lie algebras and the symplectic
//! operations around them.
//!
//! Extension basis is `(e_1..e_n, e^1..e^n)`, so `e^k` has index `n + k − 1`,
//! and `ω(e_i, e^j) = −δ_ij`, `ω(e^i, e_j) = δ_ij`.

use std::fmt;

use num_traits::{One, Zero};

use crate::cohomology::{coboundary_1, coboundary_2, OneCochain, TwoCochain};
use crate::connection::{ConnectionError, DualRep, FlatConnection, DIRECTION_SEED, RANDOM_DIRECTIONS};
use crate::lie::{JacobiViolation, LieAlgebra, LieError};
use crate::linalg::{
    is_zero_vector, kernel_basis, unit, RatMatrix, Rational, Subspace, Vector,
};
use crate::sampling::RationalSampler;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExtensionError {
    #[error(transparent)]
    Connection(#[from] ConnectionError),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error("cochain is not a 2-cocycle: ∂α{} = {}", fmt_triple(.0.0), crate::format_vector(&.0.1))]
    NotACocycle(((usize, usize, usize), Vector)),
    #[error("dimension mismatch: connection on dim {connection}, cochain on dim {cochain}")]
    DimensionMismatch { connection: usize, cochain: usize },
    #[error("extension violates Jacobi: {0}")]
    Jacobi(String),
    #[error("form is not symplectic: {0}")]
    NotSymplectic(String),
    #[error("subspace is not a {0}")]
    BadIdeal(IdealClass),
    #[error("isotropic ideal is not normal")]
    NotNormal,
    #[error("pairing between quotient and ideal is degenerate")]
    DegeneratePairing,
    #[error("extensions are over different connections")]
    ConnectionMismatch,
    #[error("cocycles are not related by the given 1-cochain")]
    CoboundaryMismatch,
    #[error("integrity failure: {0}")]
    Integrity(String),
}

fn fmt_triple((i, j, k): (usize, usize, usize)) -> String {
    format!("(e{},e{},e{})", i + 1, j + 1, k + 1)
}

/// Lie algebra with a 2-form and, optionally, a distinguished ideal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymplecticLieAlgebra {
    pub algebra: LieAlgebra,
    pub omega: RatMatrix,
    pub lagrangian_ideal: Option<Subspace>,
}

/// `(h, ∇, α)` with `α ∈ Z²ρ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionTriple {
    connection: FlatConnection,
    rep: DualRep,
    cocycle: TwoCochain,
}

impl ExtensionTriple {
    /// Validates that the connection is flat and torsion-free and that the
    /// cochain is closed for the dual representation.
    pub fn new(connection: FlatConnection, cocycle: TwoCochain) -> Result<Self, ExtensionError> {
        if connection.dim() != cocycle.dim() {
            return Err(ExtensionError::DimensionMismatch {
                connection: connection.dim(),
                cochain: cocycle.dim(),
            });
        }
        let report = connection.check_flat_torsion_free();
        if !report.is_empty() {
            return Err(ConnectionError::NotFlatTorsionFree(report.summary()).into());
        }
        let rep = connection.dual_representation()?;
        if let Some(w) = coboundary_2(&rep, &cocycle).nonzero().into_iter().next() {
            return Err(ExtensionError::NotACocycle(w));
        }
        Ok(ExtensionTriple {
            connection,
            rep,
            cocycle,
        })
    }

    pub fn zero(connection: FlatConnection) -> Result<Self, ExtensionError> {
        let n = connection.dim();
        Self::new(connection, TwoCochain::zero(n))
    }

    pub fn connection(&self) -> &FlatConnection {
        &self.connection
    }

    pub fn rep(&self) -> &DualRep {
        &self.rep
    }

    pub fn cocycle(&self) -> &TwoCochain {
        &self.cocycle
    }

    pub fn dim(&self) -> usize {
        self.connection.dim()
    }

    pub fn with_cocycle(&self, cocycle: TwoCochain) -> Result<Self, ExtensionError> {
        Self::new(self.connection.clone(), cocycle)
    }
}

/// `[[0, −I], [I, 0]]`.
pub fn standard_omega(n: usize) -> RatMatrix {
    RatMatrix::from_fn(2 * n, 2 * n, |r, c| {
        if r < n && c == r + n {
            -Rational::one()
        } else if r >= n && c + n == r {
            Rational::one()
        } else {
            Rational::zero()
        }
    })
}

/// Subspace spanned by `e^1..e^n` inside the `2n`-dimensional extension.
pub fn dual_half(n: usize) -> Subspace {
    Subspace::coordinate(2 * n, &(n..2 * n).collect::<Vec<_>>())
}

/// Structure constants of `g_{∇,α}`:
/// `[x,y] = [x,y]_h + α(x,y)`, `[x,ξ] = ρ(x)ξ`, `[ξ,η] = 0`.
pub fn extension_algebra(triple: &ExtensionTriple) -> LieAlgebra {
    let n = triple.dim();
    let m = 2 * n;
    let base = triple.connection.base();
    let mut c = vec![Rational::zero(); m * m * m];
    let at = |a: usize, b: usize, k: usize| (a * m + b) * m + k;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                c[at(i, j, k)] = base.structure(i, j, k).clone();
                c[at(i, j, n + k)] = triple.cocycle.get(i, j, k).clone();
            }
        }
        let rho = triple.rep.matrix(i);
        for mm in 0..n {
            for k in 0..n {
                let v = &rho[(k, mm)];
                c[at(i, n + mm, n + k)] = v.clone();
                c[at(n + mm, i, n + k)] = -v;
            }
        }
    }
    let name = format!("{}+ext", base.name());
    LieAlgebra::from_tensor(name, m, c).expect("extension tensor is antisymmetric")
}

pub fn build_extension(triple: &ExtensionTriple) -> Result<SymplecticLieAlgebra, ExtensionError> {
    let algebra = extension_algebra(triple);
    let violations = algebra.check_jacobi();
    if let Some(v) = violations.first() {
        return Err(ExtensionError::Jacobi(v.to_string()));
    }
    let n = triple.dim();
    Ok(SymplecticLieAlgebra {
        algebra,
        omega: standard_omega(n),
        lagrangian_ideal: Some(dual_half(n)),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosednessResidual {
    pub triple: (usize, usize, usize),
    pub value: Rational,
}

impl fmt::Display for ClosednessResidual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "dω{} = {}", fmt_triple(self.triple), crate::linalg::format_rational(&self.value))
    }
}

impl SymplecticLieAlgebra {
    pub fn new(algebra: LieAlgebra, omega: RatMatrix) -> Self {
        assert_eq!(omega.rows(), algebra.dim());
        assert_eq!(omega.cols(), algebra.dim());
        SymplecticLieAlgebra {
            algebra,
            omega,
            lagrangian_ideal: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn form(&self, x: &[Rational], y: &[Rational]) -> Rational {
        let oy = self.omega.mul_vec(y);
        x.iter()
            .zip(&oy)
            .filter(|(a, b)| !a.is_zero() && !b.is_zero())
            .map(|(a, b)| a * b)
            .sum()
    }

    /// `dω(x,y,z) = ω(x,[y,z]) + ω(y,[z,x]) + ω(z,[x,y])` for every basis
    /// triple `a < b < c`.
    pub fn d_omega(&self) -> Vec<ClosednessResidual> {
        let m = self.dim();
        crate::cohomology::triples(m)
            .into_iter()
            .map(|(a, b, c)| {
                let (x, y, z) = (unit(m, a), unit(m, b), unit(m, c));
                let g = &self.algebra;
                let value = self.form(&x, g.bracket_basis(b, c))
                    + self.form(&y, g.bracket_basis(c, a))
                    + self.form(&z, g.bracket_basis(a, b));
                ClosednessResidual {
                    triple: (a, b, c),
                    value,
                }
            })
            .collect()
    }

    pub fn closedness_violations(&self) -> Vec<ClosednessResidual> {
        self.d_omega().into_iter().filter(|r| !r.value.is_zero()).collect()
    }

    pub fn is_closed(&self) -> bool {
        self.closedness_violations().is_empty()
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.omega.inverse().is_some()
    }

    /// Antisymmetric, non-degenerate and closed. `Err` carries the reason.
    pub fn check_symplectic(&self) -> Result<(), ExtensionError> {
        if !self.omega.is_antisymmetric() {
            return Err(ExtensionError::NotSymplectic("ω is not antisymmetric".into()));
        }
        if !self.is_nondegenerate() {
            return Err(ExtensionError::NotSymplectic("ω is degenerate".into()));
        }
        if let Some(r) = self.closedness_violations().first() {
            return Err(ExtensionError::NotSymplectic(r.to_string()));
        }
        Ok(())
    }

    pub fn is_symplectic(&self) -> bool {
        self.check_symplectic().is_ok()
    }

    pub fn symplectic_orthogonal(&self, j: &Subspace) -> Subspace {
        let m = self.dim();
        if j.dim() == 0 {
            return Subspace::full(m);
        }
        // ω(v, u) = vᵀ Ω u = 0 for each basis vector u of J.
        let rows: Vec<Vector> = j.basis().iter().map(|u| self.omega.mul_vec(u)).collect();
        kernel_basis(&RatMatrix::from_rows(m, &rows))
    }

    pub fn is_isotropic(&self, j: &Subspace) -> bool {
        let b = j.basis();
        (0..b.len()).all(|p| (p + 1..b.len()).all(|q| self.form(&b[p], &b[q]).is_zero()))
    }

    pub fn classify_ideal(&self, j: &Subspace) -> IdealVerdict {
        let normal = self.algebra.is_ideal(&self.symplectic_orthogonal(j));
        let class = if !self.is_isotropic(j) {
            IdealClass::NotIsotropic
        } else if !self.algebra.is_ideal(j) {
            IdealClass::NotIdeal
        } else if 2 * j.dim() == self.dim() {
            IdealClass::Lagrangian
        } else {
            IdealClass::Isotropic
        };
        IdealVerdict { class, normal }
    }

    /// `J^⊥ω / J` with the induced form.
    pub fn symplectic_reduction(&self, j: &Subspace) -> Result<SymplecticLieAlgebra, ExtensionError> {
        let verdict = self.classify_ideal(j);
        match verdict.class {
            IdealClass::Isotropic | IdealClass::Lagrangian => {}
            other => return Err(ExtensionError::BadIdeal(other)),
        }
        if !verdict.normal {
            return Err(ExtensionError::NotNormal);
        }
        let perp = self.symplectic_orthogonal(j);
        let (algebra, reps) = self.algebra.subquotient(&perp, j)?;
        let k = reps.len();
        let omega = RatMatrix::from_fn(k, k, |a, b| self.form(&reps[a], &reps[b]));
        Ok(SymplecticLieAlgebra {
            algebra: algebra.with_name(format!("{}//J", self.algebra.name())),
            omega,
            lagrangian_ideal: None,
        })
    }

    /// Flat torsion-free connection on `g / J` from
    /// `ω(∇_x y, u) = −ω(y, [x, u])`, `u ∈ J`.
    pub fn induced_flat_connection(&self, j: &Subspace) -> Result<FlatConnection, ExtensionError> {
        let verdict = self.classify_ideal(j);
        if verdict.class != IdealClass::Lagrangian {
            return Err(ExtensionError::BadIdeal(IdealClass::Lagrangian));
        }
        let quotient = self.algebra.quotient_algebra(j)?;
        let reps: Vec<Vector> = j
            .free_columns()
            .into_iter()
            .map(|c| unit(self.dim(), c))
            .collect();
        let ideal = j.basis();
        let n = reps.len();
        // pairing[c][d] = ω(r_c, u_d)
        let pairing = RatMatrix::from_fn(n, n, |c, d| self.form(&reps[c], &ideal[d]));
        let solver = pairing
            .transpose()
            .inverse()
            .ok_or(ExtensionError::DegeneratePairing)?;
        let mut gamma = vec![Rational::zero(); n * n * n];
        for a in 0..n {
            for b in 0..n {
                let rhs: Vector = ideal
                    .iter()
                    .map(|u| -self.form(&reps[b], &self.algebra.bracket(&reps[a], u)))
                    .collect();
                for (c, v) in solver.mul_vec(&rhs).into_iter().enumerate() {
                    gamma[(a * n + b) * n + c] = v;
                }
            }
        }
        let name = format!("{}/J", self.algebra.name());
        let conn = FlatConnection::new(quotient.with_name(name), gamma)?;
        let report = conn.check_flat_torsion_free();
        if !report.is_empty() {
            return Err(ExtensionError::Integrity(format!(
                "induced connection is not flat torsion-free: {}",
                report.summary()
            )));
        }
        if self.algebra.is_nilpotent() && !conn.is_geodesically_complete()?.complete {
            return Err(ExtensionError::Integrity(
                "induced connection on a nilpotent quotient is incomplete".into(),
            ));
        }
        Ok(conn)
    }

    /// `ω(∇_x y, z) = −ω(y, [x, z])` solved through `ω⁻¹`.
    pub fn canonical_connection(&self) -> Result<FlatConnection, ExtensionError> {
        self.check_symplectic()?;
        let m = self.dim();
        let solver = self
            .omega
            .transpose()
            .inverse()
            .expect("checked non-degenerate");
        let mut gamma = vec![Rational::zero(); m * m * m];
        for a in 0..m {
            for b in 0..m {
                let eb = unit(m, b);
                let rhs: Vector = (0..m)
                    .map(|d| -self.form(&eb, self.algebra.bracket_basis(a, d)))
                    .collect();
                for (c, v) in solver.mul_vec(&rhs).into_iter().enumerate() {
                    gamma[(a * m + b) * m + c] = v;
                }
            }
        }
        Ok(FlatConnection::new(self.algebra.clone(), gamma)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IdealClass {
    NotIdeal,
    NotIsotropic,
    Isotropic,
    Lagrangian,
}

impl fmt::Display for IdealClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IdealClass::NotIdeal => "not_ideal",
            IdealClass::NotIsotropic => "not_isotropic",
            IdealClass::Isotropic => "isotropic",
            IdealClass::Lagrangian => "lagrangian",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IdealVerdict {
    pub class: IdealClass,
    /// Whether `J^⊥ω` is an ideal.
    pub normal: bool,
}

/// Bianchi identity: `Σ_cycl α(x,y)(z) = 0`.
pub fn check_bianchi(alpha: &TwoCochain) -> bool {
    alpha.is_lagrangian()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NilpotencyVerdict {
    pub nilpotent: bool,
    /// Nilpotency class of the extension, from its lower central series.
    pub class: Option<usize>,
    pub lcs_dims: Vec<usize>,
    pub base_nilpotent: bool,
    pub complete: bool,
    /// The exponent used for the cocycle condition, when defined.
    pub exponent: Option<usize>,
    /// `Σ_{j<p} ρ(x)^j α(x, ad_x^{p−1−j} y) = 0` on every probed `x` and basis `y`.
    pub cocycle_condition: Option<bool>,
}

/// Decides nilpotency of `g_{∇,α}` from its lower central series and, as a
/// cross-check, from base nilpotency, completeness and the cocycle
/// condition. Disagreement is an integrity error.
pub fn extension_nilpotency(triple: &ExtensionTriple) -> Result<NilpotencyVerdict, ExtensionError> {
    let g = extension_algebra(triple);
    let lcs_dims: Vec<usize> = g.lower_central_series().iter().map(Subspace::dim).collect();
    let class = (lcs_dims.last() == Some(&0)).then(|| lcs_dims.len() - 1);
    let by_series = class.is_some();

    let h = triple.connection.base();
    let n = h.dim();
    let base_class = h.nilpotency_class();
    let complete = triple.connection.is_geodesically_complete()?.complete;
    let rho_index = word_nilpotency_index(triple.rep.matrices(), n);
    let exponent = match (base_class, rho_index) {
        (Some(a), Some(b)) => Some(a + b),
        _ => None,
    };
    let cocycle_condition = exponent.map(|p| {
        let mut sampler = RationalSampler::new(DIRECTION_SEED);
        let mut directions: Vec<Vector> = (0..n).map(|i| unit(n, i)).collect();
        directions.extend((0..RANDOM_DIRECTIONS).map(|_| sampler.vector(n)));
        directions
            .iter()
            .all(|x| cocycle_condition_holds(triple, x, p))
    });
    let by_conditions = base_class.is_some() && complete && cocycle_condition == Some(true);
    if by_series != by_conditions {
        return Err(ExtensionError::Integrity(format!(
            "nilpotency paths disagree: series says {by_series}, conditions say {by_conditions}"
        )));
    }
    Ok(NilpotencyVerdict {
        nilpotent: by_series,
        class,
        lcs_dims,
        base_nilpotent: base_class.is_some(),
        complete,
        exponent,
        cocycle_condition,
    })
}

fn cocycle_condition_holds(triple: &ExtensionTriple, x: &[Rational], p: usize) -> bool {
    let n = triple.dim();
    let ad = triple.connection.base().ad_vec(x);
    let rho = triple.rep.matrix_vec(x);
    (0..n).all(|yi| {
        let y = unit(n, yi);
        let mut total = vec![Rational::zero(); n];
        // ad_x^{p-1-j} y for j = p-1 down to 0
        let mut ad_powers = Vec::with_capacity(p);
        let mut cur = y.clone();
        for _ in 0..p {
            ad_powers.push(cur.clone());
            cur = ad.mul_vec(&cur);
        }
        let mut rho_pow = RatMatrix::identity(n);
        for j in 0..p {
            let term = rho_pow.mul_vec(&triple.cocycle.eval(x, &ad_powers[p - 1 - j]));
            crate::linalg::add_scaled(&mut total, &Rational::one(), &term);
            rho_pow = rho_pow.mul(&rho);
        }
        is_zero_vector(&total)
    })
}

/// Smallest `q` such that every product of `q` of the given matrices
/// vanishes, searched up to `limit + 1`.
fn word_nilpotency_index(mats: &[RatMatrix], limit: usize) -> Option<usize> {
    if mats.is_empty() || mats.iter().all(RatMatrix::is_zero) {
        return Some(1);
    }
    let n = mats[0].rows();
    let flatten = |m: &RatMatrix| m.entries().to_vec();
    let unflatten = |v: &[Rational]| RatMatrix::from_fn(n, n, |r, c| v[r * n + c].clone());
    let mut words = Subspace::span(n * n, &mats.iter().map(flatten).collect::<Vec<_>>());
    for q in 2..=limit + 1 {
        let next: Vec<Vector> = mats
            .iter()
            .flat_map(|a| words.basis().iter().map(move |w| (a, w)))
            .map(|(a, w)| flatten(&a.mul(&unflatten(w))))
            .collect();
        words = Subspace::span(n * n, &next);
        if words.dim() == 0 {
            return Some(q);
        }
    }
    None
}

/// Linear isomorphism between two extensions over the same connection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceMap {
    pub matrix: RatMatrix,
    /// `Ψᵀ ω Ψ = ω`.
    pub preserves_omega: bool,
}

/// `Ψ(x, ξ) = (x, ξ + σ(x))` from `g_{∇,α₁}` to `g_{∇,α₂}` where
/// `α₂ = α₁ − ∂σ`, verified bracket by bracket.
pub fn equivalence_map_psi(
    source: &ExtensionTriple,
    target: &ExtensionTriple,
    sigma: &OneCochain,
) -> Result<EquivalenceMap, ExtensionError> {
    if source.connection != target.connection {
        return Err(ExtensionError::ConnectionMismatch);
    }
    let expected = source.cocycle.sub(&coboundary_1(&source.rep, sigma));
    if expected != target.cocycle {
        return Err(ExtensionError::CoboundaryMismatch);
    }
    let n = source.dim();
    let psi = shear(n, sigma, &Rational::one());
    verify_homomorphism(&extension_algebra(source), &extension_algebra(target), &psi)?;
    let omega = standard_omega(n);
    let preserves_omega = psi.transpose().mul(&omega).mul(&psi) == omega;
    Ok(EquivalenceMap {
        matrix: psi,
        preserves_omega,
    })
}

/// `(x, ξ) ↦ (x, ξ + scale·σ(x))` as a `2n × 2n` matrix.
fn shear(n: usize, sigma: &OneCochain, scale: &Rational) -> RatMatrix {
    let mut psi = RatMatrix::identity(2 * n);
    for i in 0..n {
        for k in 0..n {
            psi[(n + k, i)] = scale * &sigma.value(i)[k];
        }
    }
    psi
}

fn verify_homomorphism(
    source: &LieAlgebra,
    target: &LieAlgebra,
    map: &RatMatrix,
) -> Result<(), ExtensionError> {
    let m = source.dim();
    let images: Vec<Vector> = (0..m).map(|a| map.column(a)).collect();
    for a in 0..m {
        for b in a + 1..m {
            let lhs = map.mul_vec(source.bracket_basis(a, b));
            let rhs = target.bracket(&images[a], &images[b]);
            if lhs != rhs {
                return Err(ExtensionError::Integrity(format!(
                    "map does not preserve [b{}, b{}]",
                    a + 1,
                    b + 1
                )));
            }
        }
    }
    Ok(())
}

/// Symplectic form attached to `[α]_L` on `g_{∇,ᾱ}`, `ᾱ = α − ∂σ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjustedForm {
    /// `Λ(e_i, e_j) = (σ − σ_L)(e_i)(e_j) − (σ − σ_L)(e_j)(e_i)`.
    pub lambda: RatMatrix,
    /// The form on `g_{∇,ᾱ}`; equals the standard form except on `h × h`.
    pub omega: RatMatrix,
    pub bar_alpha: TwoCochain,
    pub hat_alpha: TwoCochain,
}

/// Pulls the standard form on `g_{∇,α̂}` (`α̂ = α − ∂σ_L`) back along the
/// isomorphism `g_{∇,ᾱ} → g_{∇,α̂}`, `(x, ξ) ↦ (x, ξ − (σ − σ_L)(x))`,
/// and checks the result is symplectic on `g_{∇,ᾱ}`.
pub fn adjusted_symplectic_form(
    triple: &ExtensionTriple,
    sigma: &OneCochain,
    sigma_l: &OneCochain,
) -> Result<AdjustedForm, ExtensionError> {
    if !sigma_l.is_lagrangian() {
        return Err(ExtensionError::Integrity("σ_L is not symmetric".into()));
    }
    let n = triple.dim();
    let rep = &triple.rep;
    let bar_alpha = triple.cocycle.sub(&coboundary_1(rep, sigma));
    let hat_alpha = triple.cocycle.sub(&coboundary_1(rep, sigma_l));
    let diff = sigma.sub(sigma_l);
    let d = diff.matrix();
    let lambda = d.sub(&d.transpose());

    let psi = shear(n, &diff, &-Rational::one());
    let bar = triple.with_cocycle(bar_alpha.clone())?;
    let hat = triple.with_cocycle(hat_alpha.clone())?;
    verify_homomorphism(&extension_algebra(&bar), &extension_algebra(&hat), &psi)?;
    let omega = psi.transpose().mul(&standard_omega(n)).mul(&psi);

    let on_bar = SymplecticLieAlgebra::new(extension_algebra(&bar), omega.clone());
    on_bar.check_symplectic()?;
    Ok(AdjustedForm {
        lambda,
        omega,
        bar_alpha,
        hat_alpha,
    })
}

/// Jacobi violations of the extension algebra, without failing.
pub fn extension_jacobi(triple: &ExtensionTriple) -> Vec<JacobiViolation> {
    extension_algebra(triple).check_jacobi()
}
