use germ_core::arith::rat::{int, rat};
use germ_core::arith::*;
use proptest::prelude::*;

fn up(cs: &[i64]) -> UniPoly<Rat> {
    UniPoly::from_ints(cs)
}

fn nup(cs: &[Num]) -> UniPoly<Num> {
    UniPoly::new(cs.to_vec())
}

#[test]
fn roots_of_z2_minus_2() {
    let r = isolate_real_roots(&up(&[-2, 0, 1])).unwrap();
    assert_eq!(r.len(), 2);
    assert!((r[0].0.to_f64() + 2f64.sqrt()).abs() < 1e-12);
    assert!((r[1].0.to_f64() - 2f64.sqrt()).abs() < 1e-12);
    assert_eq!((r[0].1, r[1].1), (1, 1));
    assert_eq!(r[0].0.sign(), -1);
}

#[test]
fn roots_of_sextic_with_unit_roots() {
    // z (z^3 - 1)(z^3 + 1) = z^7 - z
    let r = isolate_real_roots(&up(&[0, -1, 0, 0, 0, 0, 0, 1])).unwrap();
    let vals: Vec<Option<Rat>> = r.iter().map(|(a, _)| a.as_rat()).collect();
    assert_eq!(vals, vec![Some(int(-1)), Some(int(0)), Some(int(1))]);
    assert!(r.iter().all(|(_, m)| *m == 1));
}

#[test]
fn repeated_rational_root() {
    let r = isolate_real_roots(&up(&[-1, 3, -3, 1])).unwrap();
    assert_eq!(r.len(), 1);
    assert_eq!(r[0].0.as_rat(), Some(int(1)));
    assert_eq!(r[0].1, 3);
}

#[test]
fn non_dyadic_rational_root_is_found() {
    // (3z - 1)(z^2 - 2)
    let p = up(&[-1, 3]).mul(&up(&[-2, 0, 1]));
    let r = isolate_real_roots(&p).unwrap();
    assert_eq!(r[1].0.as_rat(), Some(rat(1, 3)));
    assert!(!r[0].0.is_rational());
}

#[test]
fn zero_polynomial_is_rejected() {
    assert!(isolate_real_roots(&UniPoly::zero()).is_err());
    assert!(distinct_complex_root_count(&UniPoly::<Rat>::zero()).is_err());
}

#[test]
fn distinct_root_counts() {
    assert_eq!(distinct_complex_root_count(&up(&[0, 2, 1])).unwrap(), 2);
    assert_eq!(distinct_complex_root_count(&up(&[1, -4, 6, -4, 1])).unwrap(), 1);
    assert_eq!(distinct_complex_root_count(&up(&[0, -1, 0, 0, 1])).unwrap(), 4);
}

#[test]
fn sign_at_examples() {
    let r = isolate_real_roots(&up(&[-2, 0, 1])).unwrap();
    let s2 = &r[1].0;
    assert_eq!(sign_at(&up(&[-2, 0, 1]), s2), 0);
    assert_eq!(sign_at(&up(&[-1, 1]), s2), 1);
    // t = 4: z^3 + 6 z^2 - 14, critical points 0 and -4.
    let p = up(&[-14, 0, 6, 1]);
    for (z, s) in [(0, -1), (-4, 1)] {
        assert_eq!(sign_at(&p, &Num::int(z)), s);
        assert_eq!(rat::sign(&rat::from_f64(p.eval_rat(&int(z)).to_f64())), s);
    }
}

#[test]
fn critical_value_in_a_quadratic_extension() {
    // t = 2: p = z^3 + 3 s z^2 + 2 (1 - 2 s), s = sqrt 2.
    let s = isolate_real_roots(&up(&[-2, 0, 1])).unwrap()[1].0.clone();
    let p = nup(&[
        Num::int(2).sub(&Num::int(4).mul(&s)),
        Num::int(0),
        Num::int(3).mul(&s),
        Num::int(1),
    ]);
    let crit = Num::real_roots(&p.derivative(), &Limits::default()).unwrap();
    assert_eq!(crit.len(), 2);
    let sf = 2f64.sqrt();
    let pf = |z: f64| z.powi(3) + 3.0 * sf * z * z + 2.0 * (1.0 - 2.0 * sf);
    for (c, _) in &crit {
        let v = p.eval(c);
        let f = pf(c.to_f64());
        assert!((v.to_f64() - f).abs() < 1e-9);
        assert_eq!(v.sign() as f64, f.signum());
    }
}

#[test]
fn tower_zero_test_and_inverse() {
    let s = isolate_real_roots(&up(&[-2, 0, 1])).unwrap()[1].0.clone();
    // Root of z^2 - s over Q(s): 2^(1/4).
    let q = Num::real_roots(&nup(&[s.neg(), Num::int(0), Num::int(1)]), &Limits::default()).unwrap();
    let r4 = q[1].0.clone();
    assert_eq!(r4.depth(), 2);
    assert_eq!(r4.mul(&r4).sub(&s).sign(), 0);
    assert_eq!(r4.mul(&r4).mul(&r4).mul(&r4).as_rat(), Some(int(2)));
    let inv = r4.inv();
    assert_eq!(inv.mul(&r4).sub(&Num::int(1)).sign(), 0);
    assert!((r4.to_f64() - 2f64.powf(0.25)).abs() < 1e-12);
}

#[test]
fn reducible_defining_polynomial_splits_on_zero_test() {
    // Generator built from (z^2 - 2)(z^2 - 3) picks sqrt 3 or sqrt 2; the zero
    // test must recognise z^2 - 3 = 0 at the right root only.
    let p = up(&[6, 0, -5, 0, 1]);
    let r = isolate_real_roots(&p).unwrap();
    assert_eq!(r.len(), 4);
    let top = &r[3].0;
    assert_eq!(sign_at(&up(&[-3, 0, 1]), top), 0);
    assert_eq!(sign_at(&up(&[-2, 0, 1]), top), 1);
}

#[test]
fn tower_depth_limit_is_reported() {
    let lim = Limits { max_tower_depth: 1, refine_cap: 256 };
    let s = Num::real_roots(&lift(&up(&[-2, 0, 1])), &lim).unwrap()[1].0.clone();
    let err = Num::real_roots(&nup(&[s.neg(), Num::int(0), Num::int(1)]), &lim).unwrap_err();
    assert!(matches!(err, germ_core::GermError::ResourceLimit(_)));
}

fn bp(ts: &[(u32, u32, i64)]) -> BiPoly {
    BiPoly::from_ints(ts)
}

#[test]
fn squarefree_bivariate_examples() {
    let x = BiPoly::x();
    let y = BiPoly::y();
    let f = x.pow(2).mul(&x.sub(&y).pow(3));
    let sf = squarefree_factor_bipoly(&f);
    assert_eq!(sf, vec![(x.clone(), 2), (x.sub(&y), 3)]);

    let g = bp(&[(4, 0, 1), (1, 5, -1)]);
    assert_eq!(squarefree_factor_bipoly(&g), vec![(g.clone(), 1)]);

    let h = bp(&[(2, 0, 1), (0, 2, 1)]);
    assert_eq!(squarefree_factor_bipoly(&h.pow(2)), vec![(h, 2)]);
}

#[test]
fn squarefree_with_pure_y_content() {
    let f = bp(&[(0, 1, 1)]).pow(2).mul(&bp(&[(2, 0, 1), (0, 3, -1)]));
    let sf = squarefree_factor_bipoly(&f);
    assert_eq!(sf.len(), 2);
    assert_eq!(sf[1], (bp(&[(0, 1, 1)]), 2));
}

/// Brute-force check that `f` has no repeated factor: a repeated factor would
/// divide `f`, `f_x` and `f_y`.
fn has_trivial_gcd_with_partials(f: &BiPoly) -> bool {
    let g = f.gcd(&f.dx()).gcd(&f.dy());
    g.total_degree() == Some(0)
}

#[test]
fn squarefree_oracle_for_x_times_cusp() {
    let g = bp(&[(4, 0, 1), (1, 5, -1)]);
    assert!(has_trivial_gcd_with_partials(&g));
    assert!(!has_trivial_gcd_with_partials(&g.mul(&bp(&[(1, 0, 1)]))));
}

fn small_upoly() -> impl Strategy<Value = UniPoly<Rat>> {
    prop::collection::vec(-6i64..=6, 1..6).prop_map(|v| UniPoly::from_ints(&v))
}

fn small_bipoly() -> impl Strategy<Value = BiPoly> {
    prop::collection::vec((0u32..3, 0u32..3, -3i64..=3), 1..4).prop_map(|v| BiPoly::from_ints(&v))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn distinct_count_plus_gcd_degree(a in small_upoly(), b in small_upoly()) {
        let p = a.mul(&a).mul(&b);
        prop_assume!(!p.is_zero() && p.degree().unwrap() > 0);
        let d = p.degree().unwrap();
        let g = p.gcd(&p.derivative()).degree().unwrap();
        prop_assert_eq!(p.distinct_complex_root_count() + g, d);
    }

    #[test]
    fn isolated_roots_enclose_zero(p in small_upoly()) {
        prop_assume!(p.degree().unwrap_or(0) > 0);
        for (r, _) in isolate_real_roots(&p).unwrap() {
            for prec in [8u32, 20, 40] {
                let (lo, hi) = r.enclose(prec);
                let a = p.eval_rat(&lo);
                let b = p.eval_rat(&hi);
                prop_assert!(rat::sign(&a) * rat::sign(&b) <= 0);
            }
        }
    }

    #[test]
    fn sign_at_matches_floats(p in small_upoly(), q in small_upoly()) {
        prop_assume!(p.degree().unwrap_or(0) > 0);
        for (r, _) in isolate_real_roots(&p).unwrap() {
            let exact = sign_at(&q, &r);
            let x = r.to_f64();
            let f: f64 = q.to_f64s().iter().rev().fold(0.0, |acc, c| acc * x + c);
            if f.abs() > 1e-6 {
                prop_assert_eq!(exact as f64, f.signum());
            }
        }
    }

    #[test]
    fn squarefree_reassembles(a in small_bipoly(), b in small_bipoly()) {
        let f = a.mul(&a).mul(&b);
        prop_assume!(!f.is_zero());
        let parts = squarefree_factor_bipoly(&f);
        let mut prod = BiPoly::constant(int(1));
        for (s, k) in &parts {
            prod = prod.mul(&s.pow(*k as u32));
        }
        prop_assert_eq!(prod.normalized(), f.normalized());
        for (i, (s, _)) in parts.iter().enumerate() {
            for (t, _) in &parts[i + 1..] {
                prop_assert_eq!(s.gcd(t).total_degree(), Some(0));
            }
        }
    }
}
