mod common;

use std::sync::OnceLock;

use proptest::prelude::*;

use lagext::catalog::{base_algebra, catalog_entries, BaseAlgebra};
use lagext::cohomology::{coboundary_1, coboundary_2, random_cocycle, OneCochain};
use lagext::connection::FlatConnection;
use lagext::expr::{parse_expr, Assignment, Expr};
use lagext::extension::{
    adjusted_symplectic_form, build_extension, check_bianchi, dual_half, equivalence_map_psi, standard_omega,
    ExtensionTriple, SymplecticLieAlgebra,
};
use lagext::linalg::{kernel_basis, rat, RatMatrix, Rational};
use lagext::sampling::RationalSampler;
use lagext::spec::{parse_spec, SpecFile};

fn connections() -> &'static [(String, FlatConnection)] {
    static C: OnceLock<Vec<(String, FlatConnection)>> = OnceLock::new();
    C.get_or_init(|| common::catalog_connections(3))
}

fn connection() -> impl Strategy<Value = &'static (String, FlatConnection)> {
    (0..connections().len()).prop_map(|i| &connections()[i])
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| rat(n, d))
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = RatMatrix> {
    proptest::collection::vec(small_rational(), rows * cols)
        .prop_map(move |v| RatMatrix::from_fn(rows, cols, |r, c| v[r * cols + c].clone()))
}

fn any_matrix() -> impl Strategy<Value = RatMatrix> {
    (1usize..6, 1usize..6).prop_flat_map(|(r, c)| matrix(r, c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_plus_nullity(m in any_matrix()) {
        let k = kernel_basis(&m);
        prop_assert_eq!(m.rank() + k.dim(), m.cols());
        for v in k.basis() {
            prop_assert!(m.mul_vec(v).iter().all(num_traits::Zero::is_zero));
        }
    }

    #[test]
    fn fingerprint_invariant_under_basis_change(b in 0usize..3, p in matrix(4, 4)) {
        prop_assume!(p.inverse().is_some());
        let g = base_algebra(BaseAlgebra::ALL[b]);
        let h = g.change_basis(&p).unwrap();
        prop_assert!(h.check_jacobi().is_empty());
        prop_assert_eq!(h.fingerprint(), g.fingerprint());
    }

    #[test]
    fn sample_parameters_respect_constraints(i in 0usize..70, seed in any::<u64>()) {
        let e = &catalog_entries()[i];
        let s = e.sample_parameters(3, seed).unwrap();
        prop_assert_eq!(&s, &e.sample_parameters(3, seed).unwrap());
        let expected = if e.param_names().is_empty() { 1 } else { 3 };
        prop_assert_eq!(s.len(), expected);
        for (k, x) in s.iter().enumerate() {
            prop_assert!(e.satisfies(&x.values));
            prop_assert!(s[k + 1..].iter().all(|y| y.values != x.values));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn coboundary_squares_to_zero(c in connection(), seed in any::<u64>()) {
        let rep = c.1.dual_representation().unwrap();
        let sigma = OneCochain::random(4, &mut RationalSampler::new(seed));
        prop_assert!(coboundary_2(&rep, &coboundary_1(&rep, &sigma)).is_zero());
    }

    #[test]
    fn symmetric_cochains_have_lagrangian_coboundaries(c in connection(), seed in any::<u64>()) {
        let rep = c.1.dual_representation().unwrap();
        let sigma = OneCochain::random_symmetric(4, &mut RationalSampler::new(seed));
        prop_assert!(coboundary_1(&rep, &sigma).is_lagrangian());
    }

    #[test]
    fn bianchi_iff_closed(c in connection(), seed in any::<u64>(), lagrangian in any::<bool>()) {
        let rep = c.1.dual_representation().unwrap();
        let alpha = random_cocycle(&rep, &mut RationalSampler::new(seed), lagrangian);
        let g = build_extension(&ExtensionTriple::new(c.1.clone(), alpha.clone()).unwrap()).unwrap();
        prop_assert_eq!(g.is_closed(), check_bianchi(&alpha));
        if lagrangian {
            prop_assert!(g.is_closed());
        }
    }

    #[test]
    fn induced_connection_round_trip(c in connection(), seed in any::<u64>()) {
        let rep = c.1.dual_representation().unwrap();
        let alpha = random_cocycle(&rep, &mut RationalSampler::new(seed), true);
        let g = build_extension(&ExtensionTriple::new(c.1.clone(), alpha).unwrap()).unwrap();
        let back = g.induced_flat_connection(&dual_half(4)).unwrap();
        prop_assert_eq!(back.gamma(), c.1.gamma());
    }

    #[test]
    fn psi_is_an_isomorphism(c in connection(), seed in any::<u64>(), symmetric in any::<bool>()) {
        let mut sampler = RationalSampler::new(seed);
        let source = ExtensionTriple::new(c.1.clone(), random_cocycle(c.1.dual_representation().as_ref().unwrap(), &mut sampler, true)).unwrap();
        let sigma = if symmetric {
            OneCochain::random_symmetric(4, &mut sampler)
        } else {
            OneCochain::random(4, &mut sampler)
        };
        let target = source
            .with_cocycle(source.cocycle().sub(&coboundary_1(source.rep(), &sigma)))
            .unwrap();
        let psi = equivalence_map_psi(&source, &target, &sigma).unwrap();
        prop_assert!(psi.matrix.inverse().is_some());
        let pulled = psi.matrix.transpose().mul(&standard_omega(4)).mul(&psi.matrix);
        prop_assert_eq!(pulled == standard_omega(4), sigma.matrix().is_symmetric());
        prop_assert_eq!(psi.preserves_omega, sigma.matrix().is_symmetric());
    }

    #[test]
    fn adjusted_forms_are_symplectic(c in connection(), seed in any::<u64>()) {
        let mut sampler = RationalSampler::new(seed);
        let t = ExtensionTriple::zero(c.1.clone()).unwrap();
        let sigma = OneCochain::random(4, &mut sampler);
        let sigma_l = OneCochain::random_symmetric(4, &mut sampler);
        let f = adjusted_symplectic_form(&t, &sigma, &sigma_l).unwrap();
        prop_assert!(f.lambda.is_antisymmetric());
        prop_assert!(f.omega.is_antisymmetric());
        prop_assert!(f.omega.inverse().is_some());
        let bar = t.with_cocycle(f.bar_alpha.clone()).unwrap();
        let s = SymplecticLieAlgebra::new(lagext::extension::extension_algebra(&bar), f.omega.clone());
        prop_assert!(s.is_closed());
    }

    #[test]
    fn spec_round_trip(c in connection(), seed in any::<u64>()) {
        let rep = c.1.dual_representation().unwrap();
        let alpha = random_cocycle(&rep, &mut RationalSampler::new(seed), false);
        let spec = SpecFile::from_connection(&c.1).with_cocycle(&alpha);
        let parsed = parse_spec(&spec.serialize()).unwrap();
        prop_assert_eq!(&parsed, &spec);
        let env = parsed.fixed_values();
        let rebuilt = parsed.connection(&env).unwrap();
        prop_assert_eq!(rebuilt.gamma(), c.1.gamma());
        prop_assert_eq!(parsed.cocycle(&env).unwrap(), alpha.clone());

        let g = build_extension(&ExtensionTriple::new(c.1.clone(), alpha).unwrap()).unwrap();
        let spec = SpecFile::from_symplectic(&g);
        let parsed = parse_spec(&spec.serialize()).unwrap();
        prop_assert_eq!(&parsed, &spec);
        let back = parsed.symplectic(&Assignment::new()).unwrap();
        prop_assert_eq!(back.algebra.tensor(), g.algebra.tensor());
        prop_assert_eq!(back.omega, g.omega);
        prop_assert_eq!(back.lagrangian_ideal, g.lagrangian_ideal);
    }
}

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        small_rational().prop_map(Expr::Num),
        prop_oneof![Just("mu"), Just("t"), Just("mu_1")].prop_map(|v| Expr::Var(v.to_string())),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Div(Box::new(a), Box::new(b))),
            (inner, 0u32..4).prop_map(|(a, k)| Expr::Pow(Box::new(a), k)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn expressions_print_and_reparse(e in expr(), mu in small_rational(), t in small_rational(), mu1 in small_rational()) {
        let printed = e.to_string();
        let back = parse_expr(&printed).unwrap();
        let env: Assignment = [("mu", mu), ("t", t), ("mu_1", mu1)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        prop_assert_eq!(back.eval(&env), e.eval(&env), "{}", printed);
        prop_assert_eq!(parse_expr(&back.to_string()).unwrap(), back);
    }
}

