use std::sync::Arc;

use partpoisson::bistructures::{
    check_ppn1, concomitant, pn_hierarchy, torsion_from_lie_derivatives, torsion_on, PnStructure,
};
use partpoisson::fields::{d_oneform, d_twoform, lie_bracket, lie_derivative_oneform, pairing};
use partpoisson::geomops::{
    polynomial_casimirs, project_poisson, rank_report, restrict_poisson, AffineImmersion,
    LinearSubmersion, RestrictMode,
};
use partpoisson::liepoisson::{
    argument_translation_chain, casimir_check, frozen_anchor, half_norm_squared, killing_casimir,
    lp_anchor, modified_anchor,
};
use partpoisson::linalg;
use partpoisson::partial::{hamiltonian_field, is_admissible, partial_bracket};
use partpoisson::schouten::{
    cyclic_bracket_sum, is_compatible, is_poisson, jacobiator, jacobiator_coordinates,
    mixed_schouten,
};
use partpoisson::{
    frac, rat, Bivector, CocycleForm, CoflatBasis, LieAlgebraSpec, OneForm, OneOneTensor,
    PartialAnchor, Polynomial, Rational, VarSpace, VecField,
};
use proptest::prelude::*;

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

type Terms = Vec<(Vec<u32>, i64, i64)>;

fn terms(n: usize, max_deg: u32, max_terms: usize) -> impl Strategy<Value = Terms> {
    prop::collection::vec(
        (prop::collection::vec(0..=max_deg, n), -5i64..=5, 1i64..=4),
        0..=max_terms,
    )
    .prop_map(move |ts| {
        ts.into_iter()
            .filter(|(e, _, _)| e.iter().sum::<u32>() <= max_deg)
            .collect()
    })
}

fn poly(space: &Arc<VarSpace>, t: &Terms) -> Polynomial {
    Polynomial::from_terms(space, t.iter().map(|(e, n, d)| (e.clone(), frac(*n, *d))))
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=3).prop_map(|(n, d)| frac(n, d))
}

fn point(n: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(small_rational(), n)
}

fn field(space: &Arc<VarSpace>, ts: &[Terms]) -> VecField {
    VecField::new(space, ts.iter().map(|t| poly(space, t)).collect()).unwrap()
}

fn antisym(space: &Arc<VarSpace>, upper: &[Terms]) -> Bivector {
    let n = space.dim();
    let mut m = vec![vec![Polynomial::zero(space); n]; n];
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            let p = poly(space, &upper[k]);
            m[j][i] = -&p;
            m[i][j] = p;
            k += 1;
        }
    }
    Bivector::new(space, m).unwrap()
}

fn x3() -> Arc<VarSpace> {
    VarSpace::standard(3)
}

/// Known Lie algebras moved by a random change of basis.
fn lie_algebra() -> impl Strategy<Value = LieAlgebraSpec> {
    let base = prop_oneof![
        Just(LieAlgebraSpec::so3()),
        Just(LieAlgebraSpec::sl2()),
        Just(LieAlgebraSpec::heisenberg()),
        Just(LieAlgebraSpec::from_entries(3, &[(0, 1, 1, rat(1)), (0, 2, 2, rat(1))]).unwrap()),
    ];
    (base, prop::collection::vec(-2i64..=2, 9)).prop_filter_map(
        "singular change of basis",
        |(g, t)| {
            let t: Vec<Vec<Rational>> = t
                .chunks(3)
                .map(|r| r.iter().map(|&x| rat(x)).collect())
                .collect();
            let inv = linalg::inverse(&t)?;
            Some(change_basis(&g, &t, &inv))
        },
    )
}

/// `e'_i = sum_a T_ia e_a`.
fn change_basis(g: &LieAlgebraSpec, t: &[Vec<Rational>], inv: &[Vec<Rational>]) -> LieAlgebraSpec {
    let n = g.dim();
    let mut c = vec![vec![vec![rat(0); n]; n]; n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut s = rat(0);
                for a in 0..n {
                    for b in 0..n {
                        for m in 0..n {
                            s += &t[i][a] * &t[j][b] * g.constant(a, b, m) * &inv[m][k];
                        }
                    }
                }
                c[i][j][k] = s;
            }
        }
    }
    LieAlgebraSpec::new(c).unwrap()
}

/// Poisson anchors on R^3: `LP(g) + frozen(g, m0)`.
fn poisson3() -> impl Strategy<Value = PartialAnchor> {
    (lie_algebra(), point(3))
        .prop_map(|(g, m0)| lp_anchor(&g).add(&frozen_anchor(&g, &m0).unwrap()).unwrap())
}

proptest! {
    #![proptest_config(cfg(48))]

    #[test]
    fn ring_axioms(a in terms(3, 3, 5), b in terms(3, 3, 5), c in terms(3, 3, 5)) {
        let s = x3();
        let (a, b, c) = (poly(&s, &a), poly(&s, &b), poly(&s, &c));
        prop_assert!((&a * &(&b + &c) - (&a * &b + &a * &c)).is_zero());
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
    }

    #[test]
    fn evaluation_is_a_ring_homomorphism(a in terms(3, 3, 5), b in terms(3, 3, 5), x in point(3)) {
        let s = x3();
        let (a, b) = (poly(&s, &a), poly(&s, &b));
        prop_assert_eq!((&a * &b).eval(&x).unwrap(), a.eval(&x).unwrap() * b.eval(&x).unwrap());
        prop_assert_eq!((&a + &b).eval(&x).unwrap(), a.eval(&x).unwrap() + b.eval(&x).unwrap());
    }

    #[test]
    fn mixed_partials_commute(a in terms(3, 5, 8)) {
        let p = poly(&x3(), &a);
        for i in 0..3 {
            for j in 0..3 {
                prop_assert_eq!(p.d(i).d(j), p.d(j).d(i));
            }
        }
    }

    #[test]
    fn lie_bracket_satisfies_jacobi(
        xs in prop::collection::vec(terms(3, 2, 3), 3),
        ys in prop::collection::vec(terms(3, 2, 3), 3),
        zs in prop::collection::vec(terms(3, 2, 3), 3),
    ) {
        let s = x3();
        let (x, y, z) = (field(&s, &xs), field(&s, &ys), field(&s, &zs));
        let br = |a: &VecField, b: &VecField| lie_bracket(a, b).unwrap();
        let sum = br(&br(&x, &y), &z).add(&br(&br(&y, &z), &x)).add(&br(&br(&z, &x), &y));
        prop_assert!(sum.is_zero());
    }

    #[test]
    fn lie_derivative_obeys_cartan_identity(
        xs in prop::collection::vec(terms(3, 2, 3), 3),
        ys in prop::collection::vec(terms(3, 2, 3), 3),
        al in prop::collection::vec(terms(3, 2, 3), 3),
    ) {
        let s = x3();
        let (x, y) = (field(&s, &xs), field(&s, &ys));
        let a = OneForm::new(&s, al.iter().map(|t| poly(&s, t)).collect()).unwrap();
        let lhs = pairing(&lie_derivative_oneform(&x, &a).unwrap(), &y).unwrap();
        let rhs = x.apply(&pairing(&a, &y).unwrap()) - pairing(&a, &lie_bracket(&x, &y).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn exterior_derivative_squares_to_zero(al in prop::collection::vec(terms(4, 3, 4), 4)) {
        let s = VarSpace::standard(4);
        let a = OneForm::new(&s, al.iter().map(|t| poly(&s, t)).collect()).unwrap();
        prop_assert!(d_twoform(&d_oneform(&a)).is_zero());
    }

    #[test]
    fn full_bracket_matches_coordinates_and_leibniz(
        up in prop::collection::vec(terms(3, 2, 3), 3),
        f in terms(3, 2, 3), g in terms(3, 2, 3), h in terms(3, 2, 3),
    ) {
        let s = x3();
        let b = antisym(&s, &up);
        let p = PartialAnchor::from_bivector(&b);
        let (f, g, h) = (poly(&s, &f), poly(&s, &g), poly(&s, &h));
        let br = |u: &Polynomial, v: &Polynomial| partial_bracket(u, v, &p).unwrap();
        let mut direct = Polynomial::zero(&s);
        for i in 0..3 {
            for j in 0..3 {
                direct += &(b.entry(i, j) * &(&f.d(i) * &g.d(j)));
            }
        }
        prop_assert_eq!(br(&f, &g), direct);
        prop_assert_eq!(br(&f, &g), -br(&g, &f));
        prop_assert!((br(&f, &(&g * &h)) - &g * &br(&f, &h) - &h * &br(&f, &g)).is_zero());
    }

    #[test]
    fn partial_bracket_leibniz_on_admissible_functions(
        v01 in terms(3, 2, 3),
        free in prop::collection::vec(terms(3, 2, 3), 2),
        f in terms(2, 3, 4), g in terms(2, 3, 4), h in terms(2, 3, 4),
    ) {
        // E♭ = span{dx1, dx2}; images antisymmetric on E♭, third component free
        let s = x3();
        let c = poly(&s, &v01);
        let images = vec![
            VecField::new(&s, vec![Polynomial::zero(&s), c.clone(), poly(&s, &free[0])]).unwrap(),
            VecField::new(&s, vec![-c, Polynomial::zero(&s), poly(&s, &free[1])]).unwrap(),
        ];
        let basis = CoflatBasis::coordinates(&s, &[0, 1]).unwrap();
        let p = PartialAnchor::new(basis.clone(), images).unwrap();
        let lift = |t: &Terms| -> Polynomial {
            let t: Terms = t.iter().map(|(e, n, d)| (vec![e[0], e[1], 0], *n, *d)).collect();
            poly(&s, &t)
        };
        let (f, g, h) = (lift(&f), lift(&g), lift(&h));
        for u in [&f, &g, &h] {
            prop_assert!(is_admissible(u, &basis).is_admissible());
        }
        let br = |u: &Polynomial, v: &Polynomial| partial_bracket(u, v, &p).unwrap();
        prop_assert_eq!(br(&f, &g), -br(&g, &f));
        prop_assert!((br(&f, &(&g * &h)) - &g * &br(&f, &h) - &h * &br(&f, &g)).is_zero());
        for a in 0..basis.len() {
            prop_assert!(is_admissible(&basis.linear_function(a), &basis).is_admissible());
        }
    }

    #[test]
    fn jacobiator_formulas_agree(up in prop::collection::vec(terms(3, 2, 3), 3)) {
        let s = x3();
        let b = antisym(&s, &up);
        let p = PartialAnchor::from_bivector(&b);
        let sec = jacobiator(&p);
        let coord = jacobiator_coordinates(&b);
        prop_assert_eq!(sec.get(0, 1, 2), coord.get(0, 1, 2));
        prop_assert_eq!(cyclic_bracket_sum(&p, 0, 1, 2).unwrap(), sec.get(0, 1, 2));
    }

    #[test]
    fn polarization_identity(
        pu in prop::collection::vec(terms(3, 2, 3), 3),
        qu in prop::collection::vec(terms(3, 2, 3), 3),
    ) {
        let s = x3();
        let p = PartialAnchor::from_bivector(&antisym(&s, &pu));
        let q = PartialAnchor::from_bivector(&antisym(&s, &qu));
        let m = mixed_schouten(&p, &q).unwrap();
        let lhs = jacobiator(&p.add(&q).unwrap()).get(0, 1, 2)
            - jacobiator(&p).get(0, 1, 2)
            - jacobiator(&q).get(0, 1, 2)
            - m.get(0, 1, 2).scale(&rat(2));
        prop_assert!(lhs.is_zero());
    }

    #[test]
    fn every_planar_bivector_is_poisson(u in terms(2, 4, 5)) {
        let s = VarSpace::standard(2);
        let p = PartialAnchor::from_bivector(&antisym(&s, &[u]));
        prop_assert!(jacobiator(&p).is_zero());
        prop_assert!(is_poisson(&p).is_pass());
    }
}

proptest! {
    #![proptest_config(cfg(24))]

    #[test]
    fn hamiltonian_fields_are_a_morphism(p in poisson3(), f in terms(3, 2, 3), g in terms(3, 2, 3)) {
        let s = p.space().clone();
        let (f, g) = (poly(&s, &f), poly(&s, &g));
        prop_assert!(is_poisson(&p).is_pass());
        let lhs = hamiltonian_field(&partial_bracket(&f, &g, &p).unwrap(), &p).unwrap();
        let rhs = lie_bracket(&hamiltonian_field(&f, &p).unwrap(), &hamiltonian_field(&g, &p).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn torsion_formulas_agree(
        nt in prop::collection::vec(terms(3, 1, 3), 9),
        xs in prop::collection::vec(terms(3, 1, 2), 3),
        ys in prop::collection::vec(terms(3, 1, 2), 3),
    ) {
        let s = x3();
        let m: Vec<Vec<Polynomial>> = nt.chunks(3).map(|r| r.iter().map(|t| poly(&s, t)).collect()).collect();
        let n = OneOneTensor::new(&s, m).unwrap();
        let (x, y) = (field(&s, &xs), field(&s, &ys));
        prop_assert_eq!(torsion_on(&n, &x, &y).unwrap(), torsion_from_lie_derivatives(&n, &x, &y).unwrap());
    }

    #[test]
    fn identity_has_zero_concomitant(p in poisson3()) {
        let id = OneOneTensor::identity(p.space());
        for a in 0..3 {
            for b in 0..3 {
                prop_assert!(concomitant(&p, &id, a, b).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn hierarchy_anchors_keep_ppn1(p in poisson3(), c in small_rational()) {
        let n = OneOneTensor::scalar(&Polynomial::constant(p.space(), c));
        let pn = PnStructure::new(p, n.clone()).unwrap();
        let h = pn_hierarchy(&pn, 2).unwrap();
        for a in &h.anchors {
            prop_assert!(check_ppn1(a, &n).is_pass());
        }
    }

    #[test]
    fn lie_poisson_is_poisson_iff_jacobi(i in 0usize..3, j in 0usize..3, k in 0usize..3, v in small_rational()) {
        prop_assume!(i != j);
        let g = LieAlgebraSpec::so3().with_constant(i, j, k, v);
        let lp = lp_anchor(&g);
        prop_assert_eq!(is_poisson(&lp).is_pass(), g.jacobi_violation().is_none());
    }

    #[test]
    fn frozen_and_lie_poisson_are_compatible(g in lie_algebra(), m0 in point(3)) {
        prop_assert!(is_compatible(&lp_anchor(&g), &frozen_anchor(&g, &m0).unwrap()).unwrap().is_pass());
    }

    #[test]
    fn coboundary_modification_is_a_translation(g in lie_algebra(), beta in point(3)) {
        let w = CocycleForm::coboundary(&g, &beta);
        let m = modified_anchor(&g, &w).unwrap().to_bivector().unwrap();
        let lp = lp_anchor(&g).to_bivector().unwrap();
        let s = lp.space().clone();
        let shift: Vec<Polynomial> = (0..3)
            .map(|i| Polynomial::var(&s, i) + &Polynomial::constant(&s, beta[i].clone()))
            .collect();
        for i in 0..3 {
            for j in 0..3 {
                prop_assert_eq!(m.entry(i, j), &lp.entry(i, j).substitute(&shift).unwrap());
            }
        }
    }

    #[test]
    fn killing_casimir_is_a_casimir(g in lie_algebra()) {
        if let Some(c) = killing_casimir(&g).unwrap().casimir() {
            prop_assert!(casimir_check(c, &lp_anchor(&g)).unwrap().is_pass());
        }
    }

    #[test]
    fn chains_satisfy_the_pencil_identity(m0 in point(3)) {
        let c = half_norm_squared(3);
        let chain = argument_translation_chain(&LieAlgebraSpec::so3(), &m0, &c, 3).unwrap();
        prop_assert!(chain.pencil_identity.is_pass());
        prop_assert!(chain.verdict().is_pass());
    }

    #[test]
    fn poisson_ranks_are_even(p in poisson3(), seed in 0u64..1000) {
        prop_assert_eq!(rank_report(&p, 8, seed).unwrap().generic_rank % 2, 0);
    }

    #[test]
    fn casimir_solutions_are_casimirs_and_closed(p in poisson3()) {
        let found = polynomial_casimirs(&p, 2).unwrap();
        for c in &found {
            prop_assert!(casimir_check(c, &p).unwrap().is_pass());
        }
        for a in &found {
            for b in &found {
                let prod = a * b;
                if prod.degree().unwrap_or(0) <= 2 {
                    prop_assert!(casimir_check(&prod, &p).unwrap().is_pass());
                }
            }
        }
    }

    #[test]
    fn restriction_and_projection_outputs_are_poisson(p in poisson3(), axes in prop::sample::subsequence(vec![0usize, 1, 2], 2)) {
        let iota = AffineImmersion::coordinate_plane(3, &axes).unwrap();
        if let Some(r) = restrict_poisson(&p, &iota, RestrictMode::Exact).unwrap().accepted() {
            prop_assert!(is_poisson(r).is_pass());
        }
        let b = LinearSubmersion::onto_coordinates(3, &axes).unwrap();
        if let Some(r) = project_poisson(&p, &b).unwrap().accepted() {
            prop_assert!(is_poisson(r).is_pass());
        }
    }

    #[test]
    fn invertible_projection_is_a_change_of_coordinates(p in poisson3(), bm in prop::collection::vec(-2i64..=2, 9)) {
        let bq: Vec<Vec<Rational>> = bm.chunks(3).map(|r| r.iter().map(|&x| rat(x)).collect()).collect();
        prop_assume!(linalg::rank(&bq) == 3);
        let b = LinearSubmersion::new(bq.clone()).unwrap();
        let out = project_poisson(&p, &b).unwrap().into_accepted().expect("accepted");
        let pb = out.to_bivector().unwrap();
        let orig = p.to_bivector().unwrap();
        let s = orig.space().clone();
        let y: Vec<Polynomial> = bq.iter().map(|row| Polynomial::linear(&s, row)).collect();
        for i in 0..3 {
            for j in 0..3 {
                let mut bpb = Polynomial::zero(&s);
                for k in 0..3 {
                    for l in 0..3 {
                        bpb += &orig.entry(k, l).scale(&(&bq[i][k] * &bq[j][l]));
                    }
                }
                prop_assert_eq!(pb.entry(i, j).substitute(&y).unwrap(), bpb);
            }
        }
    }
}
