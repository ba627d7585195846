//! Low-degree cohomology of a flat Lie algebra `h` with coefficients in the
//! dual representation on `h*`, and its Lagrangian subcomplex.
//!
//! Two-cochains are flattened to coordinate vectors in the order
//! `(i<j lexicographic, then k)`; three-cochains the same way over `i<j<k`.
//! Every kernel, image and quotient below is taken in those coordinates.

use num_traits::{One, Zero};

use crate::connection::DualRep;
use crate::linalg::{
    add_scaled, is_zero_vector, kernel_basis, quotient_basis, solve_linear, RatMatrix, Rational,
    Subspace, Vector,
};
use crate::sampling::RationalSampler;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CochainError {
    #[error("cochain shape does not match dimension {0}")]
    BadShape(usize),
    #[error("two-cochain is not antisymmetric at (e{}, e{})", .0 + 1, .1 + 1)]
    NotAntisymmetric(usize, usize),
}

/// `σ: h → h*`, stored as `s[i][k] = σ(e_i)(e_k)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OneCochain {
    s: RatMatrix,
}

/// `α: Λ²h → h*`, stored as `a[i][j][k] = α(e_i, e_j)(e_k)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TwoCochain {
    n: usize,
    a: Vec<Rational>,
}

/// Values of a three-cochain on the triples `i<j<k`, in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreeCochain {
    n: usize,
    values: Vec<Vector>,
}

pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

pub fn triples(n: usize) -> Vec<(usize, usize, usize)> {
    (0..n)
        .flat_map(|i| (i + 1..n).flat_map(move |j| (j + 1..n).map(move |k| (i, j, k))))
        .collect()
}

impl OneCochain {
    pub fn zero(n: usize) -> Self {
        OneCochain {
            s: RatMatrix::zeros(n, n),
        }
    }

    pub fn from_matrix(s: RatMatrix) -> Result<Self, CochainError> {
        if !s.is_square() {
            return Err(CochainError::BadShape(s.rows()));
        }
        Ok(OneCochain { s })
    }

    /// Matrix unit: `σ(e_i) = e^k`.
    pub fn unit(n: usize, i: usize, k: usize) -> Self {
        let mut s = RatMatrix::zeros(n, n);
        s[(i, k)] = Rational::one();
        OneCochain { s }
    }

    pub fn random(n: usize, sampler: &mut RationalSampler) -> Self {
        OneCochain {
            s: RatMatrix::from_fn(n, n, |_, _| sampler.scalar()),
        }
    }

    pub fn random_symmetric(n: usize, sampler: &mut RationalSampler) -> Self {
        let mut s = RatMatrix::zeros(n, n);
        for i in 0..n {
            for k in i..n {
                let v = sampler.scalar();
                s[(k, i)] = v.clone();
                s[(i, k)] = v;
            }
        }
        OneCochain { s }
    }

    pub fn dim(&self) -> usize {
        self.s.rows()
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.s
    }

    /// Coordinates of `σ(e_i)` in the dual basis.
    pub fn value(&self, i: usize) -> &[Rational] {
        self.s.row(i)
    }

    pub fn apply(&self, x: &[Rational]) -> Vector {
        self.s.transpose().mul_vec(x)
    }

    /// Lagrangian 1-cochains satisfy `σ(x)(y) = σ(y)(x)`.
    pub fn is_lagrangian(&self) -> bool {
        self.s.is_symmetric()
    }

    pub fn sub(&self, other: &OneCochain) -> OneCochain {
        OneCochain {
            s: self.s.sub(&other.s),
        }
    }
}

impl TwoCochain {
    pub fn zero(n: usize) -> Self {
        TwoCochain {
            n,
            a: vec![Rational::zero(); n * n * n],
        }
    }

    pub fn from_tensor(n: usize, a: Vec<Rational>) -> Result<Self, CochainError> {
        if a.len() != n * n * n {
            return Err(CochainError::BadShape(n));
        }
        let c = TwoCochain { n, a };
        for i in 0..n {
            for j in i..n {
                if (0..n).any(|k| c.get(i, j, k) != &-c.get(j, i, k)) {
                    return Err(CochainError::NotAntisymmetric(i, j));
                }
            }
        }
        Ok(c)
    }

    /// Sets `α(e_i, e_j)(e_k) = v` and `α(e_j, e_i)(e_k) = −v`.
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: Rational) {
        assert!(i != j, "two-cochains vanish on the diagonal");
        let n = self.n;
        self.a[(j * n + i) * n + k] = -&v;
        self.a[(i * n + j) * n + k] = v;
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn tensor(&self) -> &[Rational] {
        &self.a
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.a[(i * self.n + j) * self.n + k]
    }

    /// Coordinates of `α(e_i, e_j)` in the dual basis.
    pub fn value(&self, i: usize, j: usize) -> &[Rational] {
        let start = (i * self.n + j) * self.n;
        &self.a[start..start + self.n]
    }

    pub fn eval(&self, x: &[Rational], y: &[Rational]) -> Vector {
        let mut out = vec![Rational::zero(); self.n];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if i != j && !yj.is_zero() {
                    add_scaled(&mut out, &(xi * yj), self.value(i, j));
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(Zero::is_zero)
    }

    /// `α(e_i,e_j)(e_k) + α(e_j,e_k)(e_i) + α(e_k,e_i)(e_j)`.
    pub fn cyclic_sum(&self, i: usize, j: usize, k: usize) -> Rational {
        self.get(i, j, k) + self.get(j, k, i) + self.get(k, i, j)
    }

    /// Bianchi identity: the cyclic sum vanishes on every triple.
    pub fn is_lagrangian(&self) -> bool {
        triples(self.n)
            .into_iter()
            .all(|(i, j, k)| self.cyclic_sum(i, j, k).is_zero())
    }

    pub fn add(&self, other: &TwoCochain) -> TwoCochain {
        assert_eq!(self.n, other.n);
        TwoCochain {
            n: self.n,
            a: self.a.iter().zip(&other.a).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn sub(&self, other: &TwoCochain) -> TwoCochain {
        assert_eq!(self.n, other.n);
        TwoCochain {
            n: self.n,
            a: self.a.iter().zip(&other.a).map(|(x, y)| x - y).collect(),
        }
    }

    pub fn flatten(&self) -> Vector {
        let n = self.n;
        pairs(n)
            .into_iter()
            .flat_map(|(i, j)| self.value(i, j).to_vec())
            .collect()
    }

    pub fn from_flat(n: usize, v: &[Rational]) -> Self {
        assert_eq!(v.len(), flat_two_dim(n));
        let mut c = TwoCochain::zero(n);
        for (p, (i, j)) in pairs(n).into_iter().enumerate() {
            for k in 0..n {
                c.set(i, j, k, v[p * n + k].clone());
            }
        }
        c
    }
}

impl ThreeCochain {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[Vector] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| is_zero_vector(v))
    }

    /// Nonzero entries as `((i, j, k), value)`.
    pub fn nonzero(&self) -> Vec<((usize, usize, usize), Vector)> {
        triples(self.n)
            .into_iter()
            .zip(&self.values)
            .filter(|(_, v)| !is_zero_vector(v))
            .map(|(t, v)| (t, v.clone()))
            .collect()
    }

    fn flatten(&self) -> Vector {
        self.values.iter().flatten().cloned().collect()
    }
}

pub fn flat_two_dim(n: usize) -> usize {
    n * n * n.saturating_sub(1) / 2
}

/// `(∂σ)(x,y) = ρ(x)σ(y) − ρ(y)σ(x) − σ([x,y])`.
pub fn coboundary_1(rep: &DualRep, sigma: &OneCochain) -> TwoCochain {
    let n = rep.dim();
    assert_eq!(sigma.dim(), n, "cochain dimension mismatch");
    let minus = -Rational::one();
    let mut out = TwoCochain::zero(n);
    for (i, j) in pairs(n) {
        let mut v = rep.act(i, sigma.value(j));
        add_scaled(&mut v, &minus, &rep.act(j, sigma.value(i)));
        add_scaled(&mut v, &minus, &sigma.apply(rep.base().bracket_basis(i, j)));
        for (k, x) in v.into_iter().enumerate() {
            out.set(i, j, k, x);
        }
    }
    out
}

/// `(∂α)(x,y,z) = ρ(x)α(y,z) + ρ(y)α(z,x) + ρ(z)α(x,y)
///              + α(x,[y,z]) + α(z,[x,y]) + α(y,[z,x])` on `i<j<k`.
pub fn coboundary_2(rep: &DualRep, alpha: &TwoCochain) -> ThreeCochain {
    let n = rep.dim();
    assert_eq!(alpha.dim(), n, "cochain dimension mismatch");
    let base = rep.base();
    let one = Rational::one();
    let values = triples(n)
        .into_iter()
        .map(|(i, j, k)| {
            let (ei, ej, ek) = (
                crate::linalg::unit(n, i),
                crate::linalg::unit(n, j),
                crate::linalg::unit(n, k),
            );
            let mut v = rep.act(i, alpha.value(j, k));
            add_scaled(&mut v, &one, &rep.act(j, alpha.value(k, i)));
            add_scaled(&mut v, &one, &rep.act(k, alpha.value(i, j)));
            add_scaled(&mut v, &one, &alpha.eval(&ei, base.bracket_basis(j, k)));
            add_scaled(&mut v, &one, &alpha.eval(&ek, base.bracket_basis(i, j)));
            add_scaled(&mut v, &one, &alpha.eval(&ej, base.bracket_basis(k, i)));
            v
        })
        .collect();
    ThreeCochain { n, values }
}

/// Matrix of `∂¹` from `C¹` (coordinates `s[i][k]` row-major) to flat `C²`.
pub fn coboundary_1_matrix(rep: &DualRep) -> RatMatrix {
    let n = rep.dim();
    let columns: Vec<Vector> = (0..n * n)
        .map(|u| coboundary_1(rep, &OneCochain::unit(n, u / n, u % n)).flatten())
        .collect();
    RatMatrix::from_columns(flat_two_dim(n), &columns)
}

/// Matrix of `∂²` from flat `C²` to flat `C³`.
pub fn coboundary_2_matrix(rep: &DualRep) -> RatMatrix {
    let n = rep.dim();
    let dim2 = flat_two_dim(n);
    let columns: Vec<Vector> = (0..dim2)
        .map(|u| {
            let mut e = vec![Rational::zero(); dim2];
            e[u] = Rational::one();
            coboundary_2(rep, &TwoCochain::from_flat(n, &e)).flatten()
        })
        .collect();
    RatMatrix::from_columns(triples(n).len() * n, &columns)
}

/// Matrix of the cyclic-sum map `C² → Λ³h*` (one row per `i<j<k`).
pub fn cyclic_sum_matrix(n: usize) -> RatMatrix {
    let dim2 = flat_two_dim(n);
    let ts = triples(n);
    let columns: Vec<Vector> = (0..dim2)
        .map(|u| {
            let mut e = vec![Rational::zero(); dim2];
            e[u] = Rational::one();
            let c = TwoCochain::from_flat(n, &e);
            ts.iter().map(|&(i, j, k)| c.cyclic_sum(i, j, k)).collect()
        })
        .collect();
    RatMatrix::from_columns(ts.len(), &columns)
}

/// Basis of symmetric 1-cochains: `E_ii` and `E_ik + E_ki` for `i < k`.
pub fn lagrangian_one_cochain_basis(n: usize) -> Vec<OneCochain> {
    let mut out = Vec::new();
    for i in 0..n {
        for k in i..n {
            let mut s = RatMatrix::zeros(n, n);
            s[(i, k)] = Rational::one();
            s[(k, i)] = Rational::one();
            out.push(OneCochain { s });
        }
    }
    out
}

/// `(Z²ρ, Z²_{L,ρ})` in flat coordinates.
pub fn cocycle_bases(rep: &DualRep) -> (Subspace, Subspace) {
    let n = rep.dim();
    let d2 = coboundary_2_matrix(rep);
    let z2 = kernel_basis(&d2);
    let cyc = cyclic_sum_matrix(n);
    let stacked_rows: Vec<Vector> = (0..d2.rows())
        .map(|r| d2.row(r).to_vec())
        .chain((0..cyc.rows()).map(|r| cyc.row(r).to_vec()))
        .collect();
    let z2l = if stacked_rows.is_empty() {
        Subspace::full(flat_two_dim(n))
    } else {
        kernel_basis(&RatMatrix::from_rows(flat_two_dim(n), &stacked_rows))
    };
    (z2, z2l)
}

/// `∂C¹` and `∂C¹_L` in flat coordinates.
pub fn coboundary_spaces(rep: &DualRep) -> (Subspace, Subspace) {
    let n = rep.dim();
    let d1 = coboundary_1_matrix(rep);
    let image: Vec<Vector> = (0..d1.cols()).map(|c| d1.column(c)).collect();
    let image_l: Vec<Vector> = lagrangian_one_cochain_basis(n)
        .iter()
        .map(|s| coboundary_1(rep, s).flatten())
        .collect();
    let dim2 = flat_two_dim(n);
    (Subspace::span(dim2, &image), Subspace::span(dim2, &image_l))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CohomologySummary {
    pub c1_dim: usize,
    pub c1l_dim: usize,
    pub z2_dim: usize,
    pub b2_dim: usize,
    pub b2l_dim: usize,
    pub z2l_dim: usize,
    pub h2_dim: usize,
    pub h2l_dim: usize,
    /// Rank of the natural map `H²_{L,ρ} → H²ρ`.
    pub natural_map_rank: usize,
    pub h2_representatives: Vec<TwoCochain>,
    pub h2l_representatives: Vec<TwoCochain>,
}

pub fn cohomology(rep: &DualRep) -> CohomologySummary {
    let n = rep.dim();
    let (z2, z2l) = cocycle_bases(rep);
    let (b2, b2l) = coboundary_spaces(rep);
    let reps = quotient_basis(&z2, &b2).expect("coboundaries are cocycles");
    let reps_l = quotient_basis(&z2l, &b2l).expect("Lagrangian coboundaries are Lagrangian cocycles");
    let natural_map_rank = z2l.sum(&b2).dim() - b2.dim();
    CohomologySummary {
        c1_dim: n * n,
        c1l_dim: n * (n + 1) / 2,
        z2_dim: z2.dim(),
        b2_dim: b2.dim(),
        b2l_dim: b2l.dim(),
        z2l_dim: z2l.dim(),
        h2_dim: z2.dim() - b2.dim(),
        h2l_dim: z2l.dim() - b2l.dim(),
        natural_map_rank,
        h2_representatives: reps.iter().map(|v| TwoCochain::from_flat(n, v)).collect(),
        h2l_representatives: reps_l.iter().map(|v| TwoCochain::from_flat(n, v)).collect(),
    }
}

/// Finds `σ` (symmetric when `lagrangian_only`) with `β = α − ∂σ`.
pub fn solve_coboundary(
    rep: &DualRep,
    alpha: &TwoCochain,
    beta: &TwoCochain,
    lagrangian_only: bool,
) -> Option<OneCochain> {
    let n = rep.dim();
    let target = alpha.sub(beta).flatten();
    if lagrangian_only {
        let basis = lagrangian_one_cochain_basis(n);
        let columns: Vec<Vector> = basis.iter().map(|s| coboundary_1(rep, s).flatten()).collect();
        let m = RatMatrix::from_columns(flat_two_dim(n), &columns);
        let coeffs = solve_linear(&m, &target)?;
        let mut s = RatMatrix::zeros(n, n);
        for (c, b) in coeffs.iter().zip(&basis) {
            s = s.add(&b.s.scale(c));
        }
        Some(OneCochain { s })
    } else {
        let x = solve_linear(&coboundary_1_matrix(rep), &target)?;
        Some(OneCochain {
            s: RatMatrix::from_fn(n, n, |i, k| x[i * n + k].clone()),
        })
    }
}

/// A random element of `Z²ρ` (or `Z²_{L,ρ}`): a seeded combination of the
/// echelon basis.
pub fn random_cocycle(rep: &DualRep, sampler: &mut RationalSampler, lagrangian: bool) -> TwoCochain {
    let (z2, z2l) = cocycle_bases(rep);
    random_element(rep.dim(), if lagrangian { &z2l } else { &z2 }, sampler)
}

/// Seeded combination of a flat-coordinate subspace's basis.
pub fn random_element(n: usize, space: &Subspace, sampler: &mut RationalSampler) -> TwoCochain {
    let coeffs = sampler.vector(space.dim());
    TwoCochain::from_flat(n, &space.combine(&coeffs))
}
