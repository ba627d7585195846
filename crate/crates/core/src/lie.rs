//! Lie algebras given by structure constants over a fixed basis.

use std::fmt;

use num_traits::Zero;

use crate::linalg::{
    add_scaled, is_zero_vector, kernel_basis, quotient_basis, unit, RatMatrix, Rational, Subspace,
    Vector,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LieError {
    #[error("structure constants are not antisymmetric at (e{}, e{})", .0 + 1, .1 + 1)]
    NotAntisymmetric(usize, usize),
    #[error("structure tensor has {found} entries, expected {expected}")]
    BadShape { expected: usize, found: usize },
    #[error("subspace is not an ideal")]
    NotIdeal,
    #[error("subspace is not a subalgebra")]
    NotSubalgebra,
    #[error("change of basis matrix is singular or has the wrong size")]
    BadBasisChange,
}

/// `[e_i, e_j] = Σ_k c[i][j][k] e_k`, indices 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LieAlgebra {
    name: String,
    dim: usize,
    c: Vec<Rational>,
}

/// Nonzero cyclic sum `[e_i,[e_j,e_k]] + [e_j,[e_k,e_i]] + [e_k,[e_i,e_j]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JacobiViolation {
    pub triple: (usize, usize, usize),
    pub residual: Vector,
}

impl fmt::Display for JacobiViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (i, j, k) = self.triple;
        write!(
            f,
            "jacobi(e{},e{},e{}) = {}",
            i + 1,
            j + 1,
            k + 1,
            crate::format_vector(&self.residual)
        )
    }
}

/// Basis-independent invariants used to tell algebras apart.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Fingerprint {
    pub dim: usize,
    pub lcs_dims: Vec<usize>,
    pub ds_dims: Vec<usize>,
    pub center_dim: usize,
    pub derivation_dim: usize,
    /// `None` when the algebra is not nilpotent.
    pub nilpotency_class: Option<usize>,
    pub is_filiform: bool,
}

impl LieAlgebra {
    pub fn abelian(name: impl Into<String>, dim: usize) -> Self {
        LieAlgebra {
            name: name.into(),
            dim,
            c: vec![Rational::zero(); dim * dim * dim],
        }
    }

    /// Builds from a full tensor, rejecting non-antisymmetric input.
    pub fn from_tensor(name: impl Into<String>, dim: usize, c: Vec<Rational>) -> Result<Self, LieError> {
        if c.len() != dim * dim * dim {
            return Err(LieError::BadShape {
                expected: dim * dim * dim,
                found: c.len(),
            });
        }
        let alg = LieAlgebra {
            name: name.into(),
            dim,
            c,
        };
        if let Some((i, j)) = alg.antisymmetry_violation() {
            return Err(LieError::NotAntisymmetric(i, j));
        }
        Ok(alg)
    }

    /// Sets `[e_i, e_j] += coef e_k` and the antisymmetric partner for each
    /// listed `(i, j, coef, k)` (0-based).
    pub fn from_brackets(
        name: impl Into<String>,
        dim: usize,
        brackets: &[(usize, usize, Rational, usize)],
    ) -> Self {
        let mut alg = Self::abelian(name, dim);
        for (i, j, coef, k) in brackets {
            assert!(i != j, "bracket of a basis vector with itself");
            let a = alg.idx(*i, *j, *k);
            alg.c[a] += coef;
            let b = alg.idx(*j, *i, *k);
            alg.c[b] -= coef;
        }
        alg
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tensor(&self) -> &[Rational] {
        &self.c
    }

    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dim + j) * self.dim + k
    }

    pub fn structure(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.c[self.idx(i, j, k)]
    }

    /// Coordinates of `[e_i, e_j]`.
    pub fn bracket_basis(&self, i: usize, j: usize) -> &[Rational] {
        let start = self.idx(i, j, 0);
        &self.c[start..start + self.dim]
    }

    pub fn bracket(&self, x: &[Rational], y: &[Rational]) -> Vector {
        let mut out = vec![Rational::zero(); self.dim];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() || i == j {
                    continue;
                }
                add_scaled(&mut out, &(xi * yj), self.bracket_basis(i, j));
            }
        }
        out
    }

    /// Matrix of `ad_{e_i}`; column `j` holds `[e_i, e_j]`.
    pub fn ad(&self, i: usize) -> RatMatrix {
        RatMatrix::from_fn(self.dim, self.dim, |k, j| self.structure(i, j, k).clone())
    }

    pub fn ad_vec(&self, x: &[Rational]) -> RatMatrix {
        let mut m = RatMatrix::zeros(self.dim, self.dim);
        for (i, xi) in x.iter().enumerate() {
            if !xi.is_zero() {
                m = m.add(&self.ad(i).scale(xi));
            }
        }
        m
    }

    pub fn is_abelian(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }

    fn antisymmetry_violation(&self) -> Option<(usize, usize)> {
        for i in 0..self.dim {
            for j in i..self.dim {
                let ok = (0..self.dim)
                    .all(|k| *self.structure(i, j, k) == -self.structure(j, i, k));
                if !ok {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Every triple `i < j < k` whose Jacobi sum does not vanish.
    pub fn check_jacobi(&self) -> Vec<JacobiViolation> {
        let n = self.dim;
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let (ei, ej, ek) = (unit(n, i), unit(n, j), unit(n, k));
                    let mut r = self.bracket(&ei, self.bracket_basis(j, k));
                    let t2 = self.bracket(&ej, self.bracket_basis(k, i));
                    let t3 = self.bracket(&ek, self.bracket_basis(i, j));
                    add_scaled(&mut r, &num_traits::One::one(), &t2);
                    add_scaled(&mut r, &num_traits::One::one(), &t3);
                    if !is_zero_vector(&r) {
                        out.push(JacobiViolation {
                            triple: (i, j, k),
                            residual: r,
                        });
                    }
                }
            }
        }
        out
    }

    pub fn is_lie_algebra(&self) -> bool {
        self.antisymmetry_violation().is_none() && self.check_jacobi().is_empty()
    }

    /// `span{[a, b] : a ∈ A, b ∈ B}`.
    pub fn bracket_span(&self, a: &Subspace, b: &Subspace) -> Subspace {
        let mut vectors = Vec::new();
        for x in a.basis() {
            for y in b.basis() {
                let v = self.bracket(x, y);
                if !is_zero_vector(&v) {
                    vectors.push(v);
                }
            }
        }
        Subspace::span(self.dim, &vectors)
    }

    pub fn is_ideal(&self, ideal: &Subspace) -> bool {
        let whole = Subspace::full(self.dim);
        ideal.contains_subspace(&self.bracket_span(&whole, ideal))
    }

    pub fn is_subalgebra(&self, s: &Subspace) -> bool {
        s.contains_subspace(&self.bracket_span(s, s))
    }

    /// `C^0 = g`, `C^{p+1} = [g, C^p]`, stopping once the series stabilizes.
    pub fn lower_central_series(&self) -> Vec<Subspace> {
        let whole = Subspace::full(self.dim);
        self.descending(|cur| self.bracket_span(&whole, cur))
    }

    /// `D^0 = g`, `D^{p+1} = [D^p, D^p]`.
    pub fn derived_series(&self) -> Vec<Subspace> {
        self.descending(|cur| self.bracket_span(cur, cur))
    }

    fn descending(&self, step: impl Fn(&Subspace) -> Subspace) -> Vec<Subspace> {
        let mut series = vec![Subspace::full(self.dim)];
        loop {
            let last = series.last().expect("series is never empty");
            if last.dim() == 0 {
                break;
            }
            let next = step(last);
            if next.dim() == last.dim() {
                break;
            }
            series.push(next);
        }
        series
    }

    pub fn is_nilpotent(&self) -> bool {
        self.lower_central_series()
            .last()
            .is_some_and(|s| s.dim() == 0)
    }

    /// Length of the lower central series; 1 for abelian, 0 for the zero
    /// algebra, `None` when not nilpotent.
    pub fn nilpotency_class(&self) -> Option<usize> {
        let lcs = self.lower_central_series();
        (lcs.last()?.dim() == 0).then(|| lcs.len() - 1)
    }

    pub fn center(&self) -> Subspace {
        let n = self.dim;
        // v ↦ ([e_i, v])_i stacked.
        let m = RatMatrix::from_fn(n * n, n, |row, j| {
            let (i, k) = (row / n, row % n);
            self.structure(i, j, k).clone()
        });
        kernel_basis(&m)
    }

    /// Dimension of `{D : D[x,y] = [Dx,y] + [x,Dy]}`.
    pub fn derivation_dim(&self) -> usize {
        let n = self.dim;
        if n == 0 {
            return 0;
        }
        // Unknown D is n×n with D e_a = Σ_b d[b][a] e_b, variable index b*n + a.
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        let mut rows: Vec<Vector> = Vec::with_capacity(pairs.len() * n);
        for &(i, j) in &pairs {
            for k in 0..n {
                let mut row = vec![Rational::zero(); n * n];
                // D[e_i,e_j]_k = Σ_m c_ij^m d[k][m]
                for m in 0..n {
                    row[k * n + m] += self.structure(i, j, m);
                }
                // [De_i, e_j]_k = Σ_b d[b][i] c_bj^k
                for b in 0..n {
                    row[b * n + i] -= self.structure(b, j, k);
                }
                // [e_i, De_j]_k = Σ_b d[b][j] c_ib^k
                for b in 0..n {
                    row[b * n + j] -= self.structure(i, b, k);
                }
                rows.push(row);
            }
        }
        if rows.is_empty() {
            return n * n;
        }
        kernel_basis(&RatMatrix::from_rows(n * n, &rows)).dim()
    }

    pub fn fingerprint(&self) -> Fingerprint {
        let lcs_dims: Vec<usize> = self.lower_central_series().iter().map(Subspace::dim).collect();
        let ds_dims = self.derived_series().iter().map(Subspace::dim).collect();
        let nilpotency_class = (lcs_dims.last() == Some(&0)).then(|| lcs_dims.len() - 1);
        let is_filiform = self.dim >= 3 && nilpotency_class == Some(self.dim - 1);
        Fingerprint {
            dim: self.dim,
            lcs_dims,
            ds_dims,
            center_dim: self.center().dim(),
            derivation_dim: self.derivation_dim(),
            nilpotency_class,
            is_filiform,
        }
    }

    /// `g / I`, written in the basis of standard vectors on the non-pivot
    /// coordinates of `I`.
    pub fn quotient_algebra(&self, ideal: &Subspace) -> Result<LieAlgebra, LieError> {
        if !self.is_ideal(ideal) {
            return Err(LieError::NotIdeal);
        }
        self.subquotient(&Subspace::full(self.dim), ideal)
            .map(|(alg, _)| alg)
    }

    /// `S / I` for a subalgebra `S` containing an ideal `I` of `S`. Returns
    /// the algebra and the representatives (vectors of `S` reduced against
    /// `I`) that form its basis.
    pub fn subquotient(
        &self,
        sub: &Subspace,
        ideal: &Subspace,
    ) -> Result<(LieAlgebra, Vec<Vector>), LieError> {
        if !self.is_subalgebra(sub) {
            return Err(LieError::NotSubalgebra);
        }
        if !sub.contains_subspace(ideal) || !ideal.contains_subspace(&self.bracket_span(sub, ideal))
        {
            return Err(LieError::NotIdeal);
        }
        let reps = quotient_basis(sub, ideal).map_err(|_| LieError::NotIdeal)?;
        let reps_space = Subspace::span(self.dim, &reps);
        let m = reps.len();
        let mut c = vec![Rational::zero(); m * m * m];
        for a in 0..m {
            for b in 0..m {
                if a == b {
                    continue;
                }
                let reduced = ideal.reduce(&self.bracket(&reps[a], &reps[b]));
                let coords = reps_space.coordinates(&reduced);
                for (k, v) in coords.into_iter().enumerate() {
                    c[(a * m + b) * m + k] = v;
                }
            }
        }
        let name = format!("{}/quotient", self.name);
        Ok((LieAlgebra::from_tensor(name, m, c)?, reps))
    }

    /// Structure constants in the basis `f_a = Σ_i P[i][a] e_i`.
    pub fn change_basis(&self, p: &RatMatrix) -> Result<LieAlgebra, LieError> {
        let n = self.dim;
        if p.rows() != n || p.cols() != n {
            return Err(LieError::BadBasisChange);
        }
        let p_inv = p.inverse().ok_or(LieError::BadBasisChange)?;
        let cols: Vec<Vector> = (0..n).map(|a| p.column(a)).collect();
        let mut c = vec![Rational::zero(); n * n * n];
        for a in 0..n {
            for b in 0..n {
                let v = p_inv.mul_vec(&self.bracket(&cols[a], &cols[b]));
                for (k, x) in v.into_iter().enumerate() {
                    c[(a * n + b) * n + k] = x;
                }
            }
        }
        LieAlgebra::from_tensor(self.name.clone(), n, c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::base_algebra;
    use crate::catalog::BaseAlgebra;
    use crate::linalg::{int, one};

    fn dims(series: &[Subspace]) -> Vec<usize> {
        series.iter().map(Subspace::dim).collect()
    }

    #[test]
    fn jacobi_examples() {
        assert!(LieAlgebra::abelian("a", 4).check_jacobi().is_empty());
        let l = base_algebra(BaseAlgebra::L);
        assert!(l.check_jacobi().is_empty());
        let corrupted = LieAlgebra::from_brackets(
            "bad",
            4,
            &[(0, 1, one(), 2), (0, 2, one(), 0)],
        );
        let v = corrupted.check_jacobi();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].triple, (0, 1, 2));
        assert_eq!(v[0].residual, vec![int(0), int(0), int(1), int(0)]);
    }

    #[test]
    fn lower_central_series_examples() {
        assert_eq!(dims(&LieAlgebra::abelian("a", 4).lower_central_series()), vec![4, 0]);
        let t = base_algebra(BaseAlgebra::T);
        let lcs = t.lower_central_series();
        assert_eq!(dims(&lcs), vec![4, 2, 1, 0]);
        assert_eq!(lcs[1], Subspace::coordinate(4, &[1, 2]));
        assert_eq!(lcs[2], Subspace::coordinate(4, &[2]));
    }

    #[test]
    fn fingerprint_examples() {
        let l = base_algebra(BaseAlgebra::L).fingerprint();
        assert_eq!(l.lcs_dims, vec![4, 1, 0]);
        assert_eq!(l.ds_dims, vec![4, 1, 0]);
        assert_eq!(l.center_dim, 2);
        assert_eq!(l.nilpotency_class, Some(2));
        assert!(!l.is_filiform);

        let t = base_algebra(BaseAlgebra::T).fingerprint();
        assert_eq!(t.nilpotency_class, Some(3));
        assert!(t.is_filiform);

        let a = LieAlgebra::abelian("a", 4).fingerprint();
        assert_eq!(a.nilpotency_class, Some(1));
        assert_eq!(a.center_dim, 4);
        assert_eq!(a.derivation_dim, 16);
        assert!(!a.is_filiform);

        assert_eq!(LieAlgebra::abelian("0", 0).nilpotency_class(), Some(0));
        assert!(!LieAlgebra::abelian("r2", 2).fingerprint().is_filiform);
    }

    #[test]
    fn non_nilpotent_series_stops() {
        // [e1, e2] = e2
        let aff = LieAlgebra::from_brackets("aff", 2, &[(0, 1, one(), 1)]);
        assert_eq!(dims(&aff.lower_central_series()), vec![2, 1]);
        assert_eq!(aff.nilpotency_class(), None);
        assert_eq!(aff.fingerprint().ds_dims, vec![2, 1, 0]);
    }

    #[test]
    fn quotient_examples() {
        let l = base_algebra(BaseAlgebra::L);
        let whole = l.quotient_algebra(&Subspace::full(4)).unwrap();
        assert_eq!(whole.dim(), 0);
        let q = l.quotient_algebra(&Subspace::coordinate(4, &[2, 3])).unwrap();
        assert_eq!(q.dim(), 2);
        assert!(q.is_abelian());
        assert_eq!(
            l.quotient_algebra(&Subspace::coordinate(4, &[0])),
            Err(LieError::NotIdeal)
        );
    }

    #[test]
    fn from_tensor_rejects_asymmetric() {
        let mut c = vec![Rational::zero(); 8];
        c[1] = one();
        assert_eq!(
            LieAlgebra::from_tensor("x", 2, c),
            Err(LieError::NotAntisymmetric(0, 0))
        );
    }
}
