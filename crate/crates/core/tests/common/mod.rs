//! Fixtures and oracles shared by integration tests.
#![allow(dead_code)]

use germ_core::arith::rat::int;
use germ_core::arith::BiPoly;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn bp(ts: &[(u32, u32, i64)]) -> BiPoly {
    BiPoly::from_ints(ts)
}

pub fn x() -> BiPoly {
    BiPoly::x()
}

pub fn y() -> BiPoly {
    BiPoly::y()
}

/// `f(x - p(y), y)`.
pub fn shear(f: &BiPoly, p: &BiPoly) -> BiPoly {
    let sub = x().sub(p);
    let mut g = BiPoly::zero();
    for (&(i, j), c) in f.terms() {
        g = g.add(&sub.pow(i).mul(&y().pow(j)).scale(c));
    }
    g
}

pub fn cusp() -> BiPoly {
    bp(&[(2, 0, 1), (0, 3, -1)])
}

/// `x(x^3 - a y^5)(x^3 - b y^5)`.
pub fn septic(a: i64, b: i64) -> BiPoly {
    x().mul(&bp(&[(3, 0, 1), (0, 5, -a)])).mul(&bp(&[(3, 0, 1), (0, 5, -b)]))
}

/// `x(x^3 - y^5)((x^3 - y^5)^3 - y^17)`.
pub fn tridecic_f() -> BiPoly {
    let c = bp(&[(3, 0, 1), (0, 5, -1)]);
    x().mul(&c).mul(&c.pow(3).sub(&bp(&[(0, 17, 1)])))
}

/// `x(x^3 + a y^5)(x^3 - y^7)(x^6 + b y^10)`.
pub fn tridecic_g(a: i64, b: i64) -> BiPoly {
    x().mul(&bp(&[(3, 0, 1), (0, 5, a)]))
        .mul(&bp(&[(3, 0, 1), (0, 7, -1)]))
        .mul(&bp(&[(6, 0, 1), (0, 10, b)]))
}

/// Light fixtures with varied tree shapes.
pub fn corpus() -> Vec<BiPoly> {
    vec![
        cusp(),
        x().mul(&bp(&[(3, 0, 1), (0, 5, -1)])),
        x().mul(&bp(&[(3, 0, 1), (0, 5, 1)])),
        septic(1, -1),
        septic(1, 2),
        bp(&[(1, 1, 1)]),
        bp(&[(2, 0, 1), (0, 2, 1)]).pow(2).add(&bp(&[(0, 5, 1)])),
        cusp().pow(2).sub(&bp(&[(1, 5, 1)])),
        bp(&[(3, 0, 1), (1, 4, -3), (0, 6, 2)]),
        bp(&[(2, 0, 1), (0, 4, -1)]).mul(&bp(&[(1, 0, 1), (0, 3, -2)])),
    ]
}

/// Random nonzero germ without constant term, degree below 4 in x and 5 in y.
pub fn random_germ(rng: &mut ChaCha8Rng) -> BiPoly {
    loop {
        let n = rng.gen_range(1..=4);
        let ts: Vec<(u32, u32, i64)> =
            (0..n).map(|_| (rng.gen_range(0..4), rng.gen_range(0..5), rng.gen_range(-2..=2))).collect();
        let f = bp(&ts);
        if !f.is_zero() && f.coeff(0, 0) == int(0) {
            return f;
        }
    }
}

/// Random shear polynomial `p(y)` of order at least 2.
pub fn random_shear(rng: &mut ChaCha8Rng) -> BiPoly {
    loop {
        let p = bp(&[(0, 2, rng.gen_range(-2..=2)), (0, 3, rng.gen_range(-2..=2)), (0, 4, rng.gen_range(-1..=1))]);
        if !p.is_zero() {
            return p;
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// ord_t f(x(t), y(t)) for integer arcs, by truncated i128 series; `None`
/// past `bound` or on overflow.
pub fn arc_order(f: &BiPoly, xs: &[i128], ys: &[i128], bound: usize) -> Option<u64> {
    let n = bound + 1;
    let mul = |a: &[i128], b: &[i128]| -> Option<Vec<i128>> {
        let mut c = vec![0i128; n];
        for (i, ai) in a.iter().enumerate().filter(|(_, v)| **v != 0) {
            for (j, bj) in b.iter().enumerate().take(n - i) {
                c[i + j] = c[i + j].checked_add(ai.checked_mul(*bj)?)?;
            }
        }
        Some(c)
    };
    let pad = |v: &[i128]| {
        let mut p = v.to_vec();
        p.resize(n, 0);
        p
    };
    let (xs, ys) = (pad(xs), pad(ys));
    let dx = f.deg_x().unwrap_or(0) as usize;
    let dy = f.deg_y().unwrap_or(0) as usize;
    let mut px = vec![pad(&[1])];
    for _ in 0..dx {
        px.push(mul(px.last().unwrap(), &xs)?);
    }
    let mut py = vec![pad(&[1])];
    for _ in 0..dy {
        py.push(mul(py.last().unwrap(), &ys)?);
    }
    let mut total = vec![0i128; n];
    for (&(i, j), c) in f.terms() {
        let c: i128 = c.to_integer().try_into().ok()?;
        let term = mul(&px[i as usize], &py[j as usize])?;
        for k in 0..n {
            total[k] = total[k].checked_add(c.checked_mul(term[k])?)?;
        }
    }
    total.iter().position(|&v| v != 0).map(|k| k as u64)
}

/// Orders of a reduced arc corpus: monomial pairs plus seeded random arcs.
pub fn oracle(f: &BiPoly, bound: usize, samples: usize) -> std::collections::BTreeSet<u64> {
    let mut out = std::collections::BTreeSet::new();
    let mono = |c: i128, a: usize| {
        let mut v = vec![0i128; a + 1];
        v[a] = c;
        v
    };
    for a in 1..=6 {
        for b in 1..=6 {
            for c in [-2, -1, 1, 2] {
                for d in [-2, -1, 1, 2] {
                    if let Some(o) = arc_order(f, &mono(c, a), &mono(d, b), bound) {
                        out.insert(o);
                    }
                }
            }
        }
        for c in [-2, -1, 1, 2] {
            for (xs, ys) in [(mono(c, a), vec![0]), (vec![0], mono(c, a))] {
                if let Some(o) = arc_order(f, &xs, &ys, bound) {
                    out.insert(o);
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..samples {
        let mut xs = vec![0i128];
        let mut ys = vec![0i128];
        for _ in 1..=6 {
            xs.push(rng.gen_range(-2..=2));
            ys.push(rng.gen_range(-2..=2));
        }
        if let Some(o) = arc_order(f, &xs, &ys, bound) {
            out.insert(o);
        }
    }
    out
}

