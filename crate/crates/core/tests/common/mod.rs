//! Brute-force reference computations for the tests. Written directly from
//! the defining formulas on plain `Vec<BigRational>` data, sharing no code
//! with the library beyond reading its inputs.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Echelon rows of the span of `rows` (each of length `width`).
pub fn row_space(mut rows: Vec<Vec<Q>>, width: usize) -> Vec<Vec<Q>> {
    let mut r = 0;
    for c in 0..width {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Q::one() / &rows[r][c];
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
        r += 1;
    }
    rows.truncate(r);
    rows
}

pub fn rank(rows: Vec<Vec<Q>>, width: usize) -> usize {
    row_space(rows, width).len()
}

/// Flat torsion-free connection on an `n`-dim algebra: `∇_{e_i}e_j = Σ_k g[i][j][k] e_k`.
pub struct Flat {
    pub n: usize,
    pub gamma: Vec<Q>,
}

impl Flat {
    pub fn g(&self, i: usize, j: usize, k: usize) -> Q {
        self.gamma[(i * self.n + j) * self.n + k].clone()
    }

    /// `[e_i, e_j]_k` read off from torsion-freeness.
    pub fn bracket(&self, i: usize, j: usize, k: usize) -> Q {
        self.g(i, j, k) - self.g(j, i, k)
    }

    /// `(ρ(e_i)ξ)_k = −(ξ∘∇_{e_i})(e_k) = −Σ_m Γ[i][k][m] ξ_m`.
    pub fn rho(&self, i: usize, xi: &[Q]) -> Vec<Q> {
        (0..self.n)
            .map(|k| -(0..self.n).map(|m| self.g(i, k, m) * &xi[m]).sum::<Q>())
            .collect()
    }
}

pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

pub fn triples(n: usize) -> Vec<(usize, usize, usize)> {
    (0..n)
        .flat_map(|a| (a + 1..n).flat_map(move |b| (b + 1..n).map(move |c| (a, b, c))))
        .collect()
}

/// A 2-cochain as `(i<j)`-indexed blocks of `n` values.
pub struct Cochain2<'a> {
    pub n: usize,
    pub v: &'a [Q],
}

impl Cochain2<'_> {
    pub fn at(&self, i: usize, j: usize) -> Vec<Q> {
        let n = self.n;
        if i == j {
            return vec![Q::zero(); n];
        }
        let (a, b, sign) = if i < j { (i, j, Q::one()) } else { (j, i, -Q::one()) };
        let p = pairs(n).iter().position(|&x| x == (a, b)).unwrap();
        self.v[p * n..(p + 1) * n].iter().map(|x| x * &sign).collect()
    }

    /// `α([e_i, e_j], e_l)`.
    fn at_bracket(&self, f: &Flat, i: usize, j: usize, l: usize) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.n];
        for m in 0..self.n {
            let c = f.bracket(i, j, m);
            if !c.is_zero() {
                for (o, x) in out.iter_mut().zip(self.at(m, l)) {
                    *o += &c * x;
                }
            }
        }
        out
    }
}

fn add(a: &mut [Q], b: &[Q], s: i64) {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y * Q::from_integer(s.into());
    }
}

/// `∂α` on triples `a<b<c`, flattened.
pub fn d2(f: &Flat, alpha: &[Q]) -> Vec<Q> {
    let n = f.n;
    let al = Cochain2 { n, v: alpha };
    let mut out = Vec::new();
    for (a, b, c) in triples(n) {
        let mut v = vec![Q::zero(); n];
        add(&mut v, &f.rho(a, &al.at(b, c)), 1);
        add(&mut v, &f.rho(b, &al.at(a, c)), -1);
        add(&mut v, &f.rho(c, &al.at(a, b)), 1);
        add(&mut v, &al.at_bracket(f, a, b, c), -1);
        add(&mut v, &al.at_bracket(f, a, c, b), 1);
        add(&mut v, &al.at_bracket(f, b, c, a), -1);
        out.extend(v);
    }
    out
}

/// `∂σ` for `σ(e_i)_k = s[i*n+k]`, flattened over pairs.
pub fn d1(f: &Flat, s: &[Q]) -> Vec<Q> {
    let n = f.n;
    let sigma = |i: usize| s[i * n..(i + 1) * n].to_vec();
    let mut out = Vec::new();
    for (i, j) in pairs(n) {
        let mut v = f.rho(i, &sigma(j));
        add(&mut v, &f.rho(j, &sigma(i)), -1);
        for m in 0..n {
            let c = f.bracket(i, j, m);
            for (x, y) in v.iter_mut().zip(sigma(m)) {
                *x -= &c * y;
            }
        }
        out.extend(v);
    }
    out
}

/// `α(e_a,e_b)(e_c) + α(e_b,e_c)(e_a) + α(e_c,e_a)(e_b)` on triples.
pub fn cyclic(n: usize, alpha: &[Q]) -> Vec<Q> {
    let al = Cochain2 { n, v: alpha };
    triples(n)
        .into_iter()
        .map(|(a, b, c)| al.at(a, b)[c].clone() + &al.at(b, c)[a] + &al.at(c, a)[b])
        .collect()
}

fn unit(len: usize, i: usize) -> Vec<Q> {
    let mut v = vec![Q::zero(); len];
    v[i] = Q::one();
    v
}

/// Transpose of a list of images, i.e. the matrix whose columns they are,
/// as rows of the transpose; rank is unaffected.
fn images(len: usize, f: impl Fn(&[Q]) -> Vec<Q>) -> Vec<Vec<Q>> {
    (0..len).map(|i| f(&unit(len, i))).collect()
}

#[derive(Debug, PartialEq, Eq)]
pub struct Dims {
    pub z2: usize,
    pub b2: usize,
    pub z2l: usize,
    pub b2l: usize,
}

pub fn cohomology_dims(f: &Flat) -> Dims {
    let n = f.n;
    let c2 = n * pairs(n).len();
    let t = n * triples(n).len();
    let ct = triples(n).len();
    // kernel dimension = c2 − rank of the map
    let z2 = c2 - rank(transpose(images(c2, |a| d2(f, a)), t), c2);
    let stacked = images(c2, |a| {
        let mut v = d2(f, a);
        v.extend(cyclic(n, a));
        v
    });
    let z2l = c2 - rank(transpose(stacked, t + ct), c2);
    let b2 = rank(images(n * n, |s| d1(f, s)), c2);
    let sym: Vec<Vec<Q>> = (0..n)
        .flat_map(|i| (i..n).map(move |k| (i, k)))
        .map(|(i, k)| {
            let mut s = vec![Q::zero(); n * n];
            s[i * n + k] = Q::one();
            s[k * n + i] = Q::one();
            d1(f, &s)
        })
        .collect();
    let b2l = rank(sym, c2);
    Dims { z2, b2, z2l, b2l }
}

fn transpose(cols: Vec<Vec<Q>>, height: usize) -> Vec<Vec<Q>> {
    (0..height).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect()
}

/// Structure tensor of `h ⊕ h*` with `[x,y] = [x,y]_h + α(x,y)`,
/// `[x, ξ] = ρ(x)ξ`; `e^k` at index `n + k`.
pub fn extension_tensor(f: &Flat, alpha: &[Q]) -> Vec<Q> {
    let n = f.n;
    let m = 2 * n;
    let al = Cochain2 { n, v: alpha };
    let mut c = vec![Q::zero(); m * m * m];
    let mut set = |a: usize, b: usize, k: usize, v: Q| {
        c[(b * m + a) * m + k] = -v.clone();
        c[(a * m + b) * m + k] = v;
    };
    for i in 0..n {
        for j in 0..n {
            if i < j {
                for (k, ak) in al.at(i, j).into_iter().enumerate() {
                    set(i, j, k, f.bracket(i, j, k));
                    set(i, j, n + k, ak);
                }
            }
            for (k, rk) in f.rho(i, &unit(n, j)).into_iter().enumerate() {
                set(i, n + j, n + k, rk);
            }
        }
    }
    c
}

pub fn bracket(m: usize, c: &[Q], x: &[Q], y: &[Q]) -> Vec<Q> {
    let mut out = vec![Q::zero(); m];
    for a in 0..m {
        for b in 0..m {
            let s = &x[a] * &y[b];
            if s.is_zero() {
                continue;
            }
            for k in 0..m {
                out[k] += &s * &c[(a * m + b) * m + k];
            }
        }
    }
    out
}

pub fn lcs_dims(m: usize, c: &[Q]) -> Vec<usize> {
    let mut cur: Vec<Vec<Q>> = (0..m).map(|i| unit(m, i)).collect();
    let mut dims = vec![m];
    loop {
        let next: Vec<Vec<Q>> = (0..m)
            .flat_map(|a| cur.iter().map(move |v| (a, v)))
            .map(|(a, v)| bracket(m, c, &unit(m, a), v))
            .collect();
        let next = row_space(next, m);
        if next.len() == *dims.last().unwrap() {
            return dims;
        }
        dims.push(next.len());
        if next.is_empty() {
            return dims;
        }
        cur = next;
    }
}

/// `ω(e_a,[e_b,e_c]) + ω(e_b,[e_c,e_a]) + ω(e_c,[e_a,e_b])` on every triple.
pub fn d_omega(m: usize, c: &[Q], omega: &dyn Fn(usize, usize) -> Q) -> Vec<((usize, usize, usize), Q)> {
    let w = |a: usize, v: Vec<Q>| (0..m).map(|l| omega(a, l) * &v[l]).sum::<Q>();
    triples(m)
        .into_iter()
        .map(|(a, b, d)| {
            let e = |i| unit(m, i);
            let v = w(a, bracket(m, c, &e(b), &e(d)))
                + w(b, bracket(m, c, &e(d), &e(a)))
                + w(d, bracket(m, c, &e(a), &e(b)));
            ((a, b, d), v)
        })
        .collect()
}

/// `ω(e_i, e^j) = −δ_ij`.
pub fn standard_omega(n: usize) -> impl Fn(usize, usize) -> Q {
    move |a, b| {
        if a < n && b == a + n {
            -Q::one()
        } else if b < n && a == b + n {
            Q::one()
        } else {
            Q::zero()
        }
    }
}

/// Flat torsion-free instantiations of every catalog entry at up to
/// `samples` samples, labelled `entry#sample`.
pub fn catalog_connections(samples: usize) -> Vec<(String, lagext::connection::FlatConnection)> {
    let mut out = Vec::new();
    for e in lagext::catalog::catalog_entries() {
        for s in e.sample_parameters(samples, 0).unwrap() {
            if let Ok(c) = e.instantiate(&s) {
                if c.check_flat_torsion_free().is_empty() {
                    out.push((format!("{}#{}", e.label, s.id), c));
                }
            }
        }
    }
    out
}

pub fn flat_of(c: &lagext::connection::FlatConnection) -> Flat {
    Flat {
        n: c.dim(),
        gamma: c.gamma().to_vec(),
    }
}

/// The library's `(i<j, k)`-flattened cochain in the oracle's layout, which
/// is the same ordering by construction of `pairs`.
pub fn oracle_cochain(alpha: &lagext::cohomology::TwoCochain) -> Vec<Q> {
    let n = alpha.dim();
    pairs(n)
        .into_iter()
        .flat_map(|(i, j)| (0..n).map(move |k| (i, j, k)))
        .map(|(i, j, k)| alpha.get(i, j, k).clone())
        .collect()
}
