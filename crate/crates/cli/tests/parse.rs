use std::collections::BTreeMap;

use germ_cli::fmt_ranges;
use germ_cli::parse::{parse_binding, parse_branch, parse_poly};
use germ_core::arith::rat::{int, rat};
use germ_core::arith::{BiPoly, Field};
use proptest::prelude::*;

fn p(s: &str) -> BiPoly {
    parse_poly(s, &BTreeMap::new()).unwrap().poly
}

#[test]
fn literals() {
    assert_eq!(p("x^2 - y^3"), BiPoly::from_ints(&[(2, 0, 1), (0, 3, -1)]));
    assert_eq!(p("x*(x^3 - y^5)"), BiPoly::from_ints(&[(4, 0, 1), (1, 5, -1)]));
    assert_eq!(p("(x+y)^2"), BiPoly::from_ints(&[(2, 0, 1), (1, 1, 2), (0, 2, 1)]));
    assert_eq!(p("3/2*x - x/2"), BiPoly::from_ints(&[(1, 0, 1)]));
    assert_eq!(p("-x^2"), BiPoly::from_ints(&[(2, 0, -1)]));
    assert_eq!(p("x^(3)"), BiPoly::from_ints(&[(3, 0, 1)]));
}

#[test]
fn parameters() {
    let mut b = BTreeMap::new();
    let (k, v) = parse_binding("t=6").unwrap();
    b.insert(k, v);
    let k6 = parse_poly("x^4 + t*x^2*y^2 + y^4", &b).unwrap().poly;
    assert_eq!(k6, BiPoly::from_ints(&[(4, 0, 1), (2, 2, 6), (0, 4, 1)]));
    assert_eq!(parse_binding("s = -1/2").unwrap(), ("s".to_string(), rat(-1, 2)));
    assert!(parse_binding("x=1").is_err());
    assert!(parse_binding("t=1/0").is_err());
}

#[test]
fn errors_carry_positions() {
    let e = parse_poly("x^2 + t*y", &BTreeMap::new()).unwrap_err();
    assert_eq!(e.pos, 6);
    assert!(e.msg.contains("unbound"));
    let e = parse_poly("x^(1/2)", &BTreeMap::new()).unwrap_err();
    assert!(e.msg.contains("non-natural"));
    let e = parse_poly("x^-1", &BTreeMap::new()).unwrap_err();
    assert!(e.msg.contains("non-natural"));
    let e = parse_poly("(x + y", &BTreeMap::new()).unwrap_err();
    assert_eq!((e.pos, e.expected.as_str()), (6, "')'"));
    assert!(parse_poly("x / y", &BTreeMap::new()).is_err());
    assert!(parse_poly("x # y", &BTreeMap::new()).is_err());
    assert!(parse_poly("x y", &BTreeMap::new()).is_err());
}

#[test]
fn branches() {
    let b = parse_branch("y^(3/2)").unwrap();
    assert_eq!(b.series.terms().len(), 1);
    assert_eq!(b.series.terms()[0].0, rat(3, 2));
    let b = parse_branch("2*y - 1/3*y^(5/3) + sqrt(2)*y^2").unwrap();
    let ts = b.series.terms();
    assert_eq!(ts.iter().map(|t| t.0.clone()).collect::<Vec<_>>(), vec![int(1), rat(5, 3), int(2)]);
    assert!((ts[1].1.to_f64() + 1.0 / 3.0).abs() < 1e-15);
    assert!((ts[2].1.to_f64() - 2f64.sqrt()).abs() < 1e-12);
    assert!((parse_branch("3*sqrt(5)*y^2").unwrap().series.terms()[0].1.to_f64() - 3.0 * 5f64.sqrt()).abs() < 1e-12);
    assert!(parse_branch("0").unwrap().series.is_zero());
    assert!(parse_branch("y^(1/2)").is_err());
    assert!(parse_branch("sqrt(-1)*y").is_err());
}

#[test]
fn ranges() {
    assert_eq!(fmt_ranges(&[13, 22, 23, 24, 25]), "{13, 22..25}");
    assert_eq!(fmt_ranges(&[1, 2, 5]), "{1, 2, 5}");
    assert_eq!(fmt_ranges(&[]), "{}");
}

proptest! {
    #[test]
    fn display_round_trips(ts in prop::collection::vec((0u32..6, 0u32..6, -20i64..20, 1i64..5), 0..8)) {
        let mut f = BiPoly::zero();
        for (i, j, n, d) in ts {
            f = f.add(&BiPoly::monomial(rat(n, d), i, j));
        }
        prop_assert_eq!(p(&f.to_string()), f);
    }
}
