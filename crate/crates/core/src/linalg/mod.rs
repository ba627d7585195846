//! Exact linear algebra over Q: reduction, kernels, solving and quotients.

mod matrix;
mod rational;
mod subspace;

pub use matrix::{Echelon, RatMatrix};
pub use rational::{
    format_rational, int, is_lowest_terms, one, parse_rational, rat, zero, ParseRationalError,
    Rational,
};
pub use subspace::{add_scaled, is_zero_vector, unit, Subspace, Vector};

use num_traits::{One, Zero};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("subspace is not contained in the ambient subspace")]
    NotASubspace,
}

/// Basis of `{v : Mv = 0}` in reduced echelon form.
pub fn kernel_basis(m: &RatMatrix) -> Subspace {
    let ech = m.rref();
    let n = m.cols();
    let free: Vec<usize> = (0..n).filter(|c| !ech.pivots.contains(c)).collect();
    let vectors: Vec<Vector> = free
        .iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); n];
            v[f] = Rational::one();
            for (r, &p) in ech.pivots.iter().enumerate() {
                v[p] = -&ech.matrix[(r, f)];
            }
            v
        })
        .collect();
    Subspace::span(n, &vectors)
}

/// Solves `Mx = b`. Free variables are set to zero, so among all solutions
/// the one supported on pivot columns is returned. `None` if inconsistent.
pub fn solve_linear(m: &RatMatrix, b: &[Rational]) -> Option<Vector> {
    assert_eq!(b.len(), m.rows(), "right-hand side length mismatch");
    let n = m.cols();
    let aug = RatMatrix::from_fn(m.rows(), n + 1, |r, c| {
        if c < n {
            m[(r, c)].clone()
        } else {
            b[r].clone()
        }
    });
    let ech = aug.rref();
    if ech.pivots.last() == Some(&n) {
        return None;
    }
    let mut x = vec![Rational::zero(); n];
    for (r, &p) in ech.pivots.iter().enumerate() {
        x[p] = ech.matrix[(r, n)].clone();
    }
    Some(x)
}

/// Representatives of a basis of `W / V`, each reduced against `V`.
pub fn quotient_basis(w: &Subspace, v: &Subspace) -> Result<Vec<Vector>, LinalgError> {
    if !w.contains_subspace(v) {
        return Err(LinalgError::NotASubspace);
    }
    let reduced: Vec<Vector> = w
        .basis()
        .iter()
        .map(|b| v.reduce(b))
        .filter(|r| !is_zero_vector(r))
        .collect();
    let reps = Subspace::span(w.ambient_dim(), &reduced);
    debug_assert_eq!(reps.dim(), w.dim() - v.dim());
    Ok(reps.basis().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_of_identity_is_trivial() {
        assert_eq!(kernel_basis(&RatMatrix::identity(2)).dim(), 0);
    }

    #[test]
    fn kernel_of_row_of_ones() {
        let m = RatMatrix::from_rows(2, &[vec![int(1), int(1)]]);
        let k = kernel_basis(&m);
        assert_eq!(k.basis(), &[vec![int(1), int(-1)]]);
    }

    #[test]
    fn solve_examples() {
        let id = RatMatrix::identity(3);
        let b = vec![int(1), rat(-2, 3), int(5)];
        assert_eq!(solve_linear(&id, &b), Some(b.clone()));
        let ones = RatMatrix::from_rows(2, &[vec![int(1), int(1)]]);
        assert_eq!(solve_linear(&ones, &[int(2)]), Some(vec![int(2), int(0)]));
        let zeros = RatMatrix::zeros(1, 2);
        assert_eq!(solve_linear(&zeros, &[int(1)]), None);
    }

    #[test]
    fn quotient_examples() {
        let w = Subspace::full(2);
        assert!(quotient_basis(&w, &w).unwrap().is_empty());
        let v = Subspace::coordinate(2, &[0]);
        assert_eq!(quotient_basis(&w, &v).unwrap(), vec![vec![int(0), int(1)]]);
        assert_eq!(quotient_basis(&v, &w), Err(LinalgError::NotASubspace));
    }
}
