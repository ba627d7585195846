use num_traits::Zero;

use super::matrix::RatMatrix;
use super::rational::Rational;

pub type Vector = Vec<Rational>;

/// A linear subspace of Q^n held as a reduced echelon basis.
///
/// Basis vectors are the nonzero rows of an RREF matrix, so pivot columns are
/// strictly ascending and every basis vector has a 1 at its own pivot and 0 at
/// all other pivots.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<Vector>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        let basis = (0..ambient_dim).map(|i| unit(ambient_dim, i)).collect();
        Subspace {
            ambient_dim,
            basis,
            pivots: (0..ambient_dim).collect(),
        }
    }

    /// Span of arbitrary (possibly dependent) vectors.
    pub fn span<V: AsRef<[Rational]>>(ambient_dim: usize, vectors: &[V]) -> Self {
        if vectors.is_empty() {
            return Self::zero(ambient_dim);
        }
        let rows: Vec<Vector> = vectors
            .iter()
            .map(|v| {
                assert_eq!(v.as_ref().len(), ambient_dim, "vector outside ambient space");
                v.as_ref().to_vec()
            })
            .collect();
        let ech = RatMatrix::from_rows(ambient_dim, &rows).rref();
        let basis = (0..ech.pivots.len())
            .map(|r| ech.matrix.row(r).to_vec())
            .collect();
        Subspace {
            ambient_dim,
            basis,
            pivots: ech.pivots,
        }
    }

    /// Span of the standard basis vectors with the given indices.
    pub fn coordinate(ambient_dim: usize, indices: &[usize]) -> Self {
        let vectors: Vec<Vector> = indices.iter().map(|&i| unit(ambient_dim, i)).collect();
        Self::span(ambient_dim, &vectors)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Non-pivot coordinates; the standard vectors on these indices span a
    /// complement of this subspace.
    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.ambient_dim)
            .filter(|c| !self.pivots.contains(c))
            .collect()
    }

    /// Reduces `v` against the echelon basis: the result agrees with `v`
    /// modulo this subspace and vanishes on every pivot coordinate.
    pub fn reduce(&self, v: &[Rational]) -> Vector {
        assert_eq!(v.len(), self.ambient_dim);
        let mut out = v.to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if out[p].is_zero() {
                continue;
            }
            let factor = out[p].clone();
            for (o, b) in out.iter_mut().zip(row) {
                if !b.is_zero() {
                    *o -= &factor * b;
                }
            }
        }
        out
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    /// Coordinates of `v` in the echelon basis. Only meaningful when
    /// `self.contains(v)`.
    pub fn coordinates(&self, v: &[Rational]) -> Vector {
        self.pivots.iter().map(|&p| v[p].clone()).collect()
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient_dim, other.ambient_dim);
        let all: Vec<&Vector> = self.basis.iter().chain(&other.basis).collect();
        let owned: Vec<Vector> = all.into_iter().cloned().collect();
        Subspace::span(self.ambient_dim, &owned)
    }

    pub fn intersection(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient_dim, other.ambient_dim);
        if self.dim() == 0 || other.dim() == 0 {
            return Subspace::zero(self.ambient_dim);
        }
        // x ↦ reduce_other(Σ x_a b_a) is linear in x; its kernel gives the
        // combinations of self's basis lying in other.
        let columns: Vec<Vector> = self.basis.iter().map(|b| other.reduce(b)).collect();
        let map = RatMatrix::from_columns(self.ambient_dim, &columns);
        let kernel = super::kernel_basis(&map);
        let vectors: Vec<Vector> = kernel
            .basis()
            .iter()
            .map(|x| self.combine(x))
            .collect();
        Subspace::span(self.ambient_dim, &vectors)
    }

    /// Σ coeffs[a] · basis[a].
    pub fn combine(&self, coeffs: &[Rational]) -> Vector {
        assert_eq!(coeffs.len(), self.dim());
        let mut out = vec![Rational::zero(); self.ambient_dim];
        for (c, b) in coeffs.iter().zip(&self.basis) {
            if c.is_zero() {
                continue;
            }
            for (o, x) in out.iter_mut().zip(b) {
                if !x.is_zero() {
                    *o += c * x;
                }
            }
        }
        out
    }
}

pub fn unit(n: usize, i: usize) -> Vector {
    let mut v = vec![Rational::zero(); n];
    v[i] = num_traits::One::one();
    v
}

pub fn is_zero_vector(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

pub fn add_scaled(target: &mut [Rational], scale: &Rational, v: &[Rational]) {
    if scale.is_zero() {
        return;
    }
    for (t, x) in target.iter_mut().zip(v) {
        if !x.is_zero() {
            *t += scale * x;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rational::int;

    #[test]
    fn intersection_of_planes() {
        let a = Subspace::coordinate(3, &[0, 1]);
        let b = Subspace::span(3, &[vec![int(0), int(1), int(0)], vec![int(1), int(0), int(1)]]);
        let i = a.intersection(&b);
        assert_eq!(i.dim(), 1);
        assert!(i.contains(&[int(0), int(5), int(0)]));
    }

    #[test]
    fn reduce_kills_pivots() {
        let s = Subspace::span(3, &[vec![int(2), int(2), int(0)]]);
        let r = s.reduce(&[int(3), int(1), int(7)]);
        assert_eq!(r, vec![int(0), int(-2), int(7)]);
    }
}
