//! Newton polygons relative to a demi-branch, order functions, Legendre
//! duality and edge polynomials.

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::arith::rat::{self, Rat};
use crate::arith::{BiPoly, Field, Num, UniPoly};
use crate::puiseux::{substitute, DemiBranch, FracBiPoly};
use crate::{GermError, Result};

/// Lower-left boundary of a Newton polygon: vertices by increasing `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct RelPolygon {
    pub vertices: Vec<(u32, Rat)>,
}

/// A compact face with its supporting exponent `ξ = -slope`.
#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub left: (u32, Rat),
    pub right: (u32, Rat),
    pub slope: Rat,
    pub xi: Rat,
}

impl RelPolygon {
    /// Polygon of a finite support set.
    pub fn from_support(pts: &[(u32, Rat)]) -> Self {
        let mut cols: std::collections::BTreeMap<u32, Rat> = std::collections::BTreeMap::new();
        for (i, j) in pts {
            cols.entry(*i).and_modify(|m| {
                if j < m {
                    *m = j.clone()
                }
            })
            .or_insert_with(|| j.clone());
        }
        let pts: Vec<(u32, Rat)> = cols.into_iter().collect();
        let mut hull: Vec<(u32, Rat)> = Vec::new();
        for p in pts {
            // Stop once j no longer decreases: the quadrant swallows the rest.
            if let Some(last) = hull.last() {
                if p.1 >= last.1 {
                    continue;
                }
            }
            while hull.len() >= 2 {
                let a = &hull[hull.len() - 2];
                let b = &hull[hull.len() - 1];
                // Drop b unless it lies strictly below segment a..p.
                let cross = (Rat::from_integer((b.0 - a.0).into())) * (&p.1 - &a.1)
                    - (Rat::from_integer((p.0 - a.0).into())) * (&b.1 - &a.1);
                if cross <= Rat::zero() {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        RelPolygon { vertices: hull }
    }

    pub fn edges(&self) -> Vec<Edge> {
        self.vertices
            .windows(2)
            .map(|w| {
                let di = rat::int((w[1].0 - w[0].0) as i64);
                let slope = (&w[1].1 - &w[0].1) / &di;
                Edge { left: w[0].clone(), right: w[1].clone(), xi: -slope.clone(), slope }
            })
            .collect()
    }

    /// `min (j + i ξ)` over the polygon.
    pub fn ord(&self, xi: &Rat) -> Rat {
        self.vertices
            .iter()
            .map(|(i, j)| j + rat::int(*i as i64) * xi)
            .min()
            .expect("nonempty polygon")
    }

    /// Height of the lower boundary at abscissa `x`; `None` left of the polygon.
    pub fn boundary_at(&self, x: &Rat) -> Option<Rat> {
        let first = self.vertices.first()?;
        if x < &rat::int(first.0 as i64) {
            return None;
        }
        for w in self.vertices.windows(2) {
            let (a, b) = (rat::int(w[0].0 as i64), rat::int(w[1].0 as i64));
            if x <= &b {
                return Some(&w[0].1 + (&w[1].1 - &w[0].1) * (x - &a) / (b - a));
            }
        }
        Some(self.vertices.last().unwrap().1.clone())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "vertices": self.vertices.iter().map(|(i, j)| json!([i, rat::fmt_rat(j)])).collect::<Vec<_>>(),
            "edges": self.edges().iter().map(|e| json!({
                "from": [e.left.0, rat::fmt_rat(&e.left.1)],
                "to": [e.right.0, rat::fmt_rat(&e.right.1)],
                "slope": rat::fmt_rat(&e.slope),
                "xi": rat::fmt_rat(&e.xi),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Concave piecewise-linear `ord(ξ)` on `[1, ∞)`: `value + slope·(ξ − start)`
/// on each piece, the last piece unbounded.
#[derive(Clone, Debug, PartialEq)]
pub struct OrderFn {
    /// `(ξ, ord(ξ))` at the start of each piece; the first has `ξ = 1`.
    pub breakpoints: Vec<(Rat, Rat)>,
    /// Slope on each piece (the `i` of the achieving vertex).
    pub slopes: Vec<u32>,
}

impl OrderFn {
    pub fn from_polygon(p: &RelPolygon) -> Self {
        let one = Rat::one();
        let mut breakpoints = vec![(one.clone(), p.ord(&one))];
        // Right-to-left edges have increasing ξ.
        for e in p.edges().iter().rev() {
            if e.xi > one {
                breakpoints.push((e.xi.clone(), p.ord(&e.xi)));
            }
        }
        let mut slopes: Vec<u32> = breakpoints
            .windows(2)
            .map(|w| {
                let s = (&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0);
                rat::floor_i64(&s) as u32
            })
            .collect();
        slopes.push(p.vertices.first().expect("nonempty polygon").0);
        OrderFn { breakpoints, slopes }
    }

    pub fn eval(&self, xi: &Rat) -> Rat {
        let mut k = 0;
        while k + 1 < self.breakpoints.len() && &self.breakpoints[k + 1].0 <= xi {
            k += 1;
        }
        let (x0, v0) = &self.breakpoints[k];
        v0 + rat::int(self.slopes[k] as i64) * (xi - x0)
    }

    /// Legendre transform `φ(x) = max_{ξ ≥ 1} (ord(ξ) − ξ x)`; `None` for +∞.
    pub fn legendre(&self, x: &Rat) -> Option<Rat> {
        let last = *self.slopes.last().unwrap();
        if x < &rat::int(last as i64) {
            return None;
        }
        self.breakpoints.iter().map(|(xi, v)| v - xi * x).max()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "breakpoints": self.breakpoints.iter().map(|(a, b)| json!([rat::fmt_rat(a), rat::fmt_rat(b)])).collect::<Vec<_>>(),
            "slopes": self.slopes,
        })
    }
}

/// Leading coefficient polynomial of `f(λ(y) + z y^ξ, y)`.
#[derive(Clone, Debug)]
pub struct EdgePoly {
    pub xi: Rat,
    pub ord: Rat,
    pub poly: UniPoly<Num>,
}

impl EdgePoly {
    pub fn to_json(&self) -> Value {
        json!({
            "xi": rat::fmt_rat(&self.xi),
            "ord": rat::fmt_rat(&self.ord),
            "poly": self.poly.to_string(),
            "coefficients": self.poly.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        })
    }
}

/// `f_m(1, 0) ≠ 0`.
pub fn is_mini_regular(f: &BiPoly) -> bool {
    match f.order() {
        Some(m) => !f.coeff(m, 0).is_zero(),
        None => false,
    }
}

/// Substituted polynomial, with input checks.
pub fn relative_expansion(f: &BiPoly, g: &DemiBranch) -> Result<FracBiPoly> {
    if f.is_zero() {
        return Err(GermError::InvalidInput("f is zero".into()));
    }
    if !g.is_allowable() {
        return Err(GermError::InvalidInput("branch is not allowable: lowest exponent below 1".into()));
    }
    // Mini-regularity matters only through faces with ξ < 1, which the
    // restriction to ξ ≥ 1 would silently lose.
    if !is_mini_regular(f) {
        let own = RelPolygon::from_support(&f.support().map(|(i, j)| (i, rat::int(j as i64))).collect::<Vec<_>>());
        if own.edges().iter().any(|e| e.xi < Rat::one()) {
            return Err(GermError::NotMiniRegular);
        }
    }
    Ok(substitute(f, &g.series))
}

/// Polygon of an expansion, certified against its validity bounds.
pub fn polygon_of(fx: &FracBiPoly) -> Result<RelPolygon> {
    let p = RelPolygon::from_support(&fx.support());
    if p.vertices.is_empty() {
        return Err(GermError::InsufficientTruncation { required: "more terms (no term certified)".into() });
    }
    for (k, v) in fx.validity() {
        match p.boundary_at(&rat::int(*k as i64)) {
            Some(h) if v >= &h => {}
            Some(h) => {
                return Err(GermError::InsufficientTruncation {
                    required: format!("({}) in the X^{k} coefficient", rat::fmt_rat(&h)),
                })
            }
            None => {
                return Err(GermError::InsufficientTruncation {
                    required: format!("an exact X^{k} coefficient"),
                })
            }
        }
    }
    Ok(p)
}

pub fn relative_polygon(f: &BiPoly, g: &DemiBranch) -> Result<RelPolygon> {
    polygon_of(&relative_expansion(f, g)?)
}

pub fn order_function(f: &BiPoly, g: &DemiBranch) -> Result<OrderFn> {
    Ok(OrderFn::from_polygon(&relative_polygon(f, g)?))
}

/// Edge polynomial of an expansion at `ξ`.
pub fn edge_poly_of(fx: &FracBiPoly, xi: &Rat) -> Result<EdgePoly> {
    let p = polygon_of(fx)?;
    let ord = p.ord(xi);
    for (k, v) in fx.validity() {
        if v + rat::int(*k as i64) * xi <= ord {
            return Err(GermError::InsufficientTruncation {
                required: format!("({}) in the X^{k} coefficient", rat::fmt_rat(&(&ord - rat::int(*k as i64) * xi))),
            });
        }
    }
    let mut cs: Vec<Num> = Vec::new();
    for ((i, j), c) in fx.terms() {
        if j + rat::int(*i as i64) * xi == ord {
            let i = *i as usize;
            if cs.len() <= i {
                cs.resize(i + 1, Num::zero_elem());
            }
            cs[i] = cs[i].add(c);
        }
    }
    Ok(EdgePoly { xi: xi.clone(), ord, poly: UniPoly::new(cs) })
}

pub fn edge_polynomial(f: &BiPoly, g: &DemiBranch, xi: &Rat) -> Result<EdgePoly> {
    if xi < &Rat::one() {
        return Err(GermError::InvalidInput("ξ must be at least 1".into()));
    }
    if let Some(t) = &g.generic_tail {
        if xi > t {
            return Err(GermError::InvalidInput("ξ lies beyond the branch's generic tail".into()));
        }
    }
    edge_poly_of(&relative_expansion(f, g)?, xi)
}

/// `Σ c_ij X^i Y^j` over support points on the compact faces.
pub fn initial_newton_polynomial(f: &BiPoly, g: &DemiBranch) -> Result<FracBiPoly> {
    let fx = relative_expansion(f, g)?;
    let p = polygon_of(&fx)?;
    let on_boundary = |i: u32, j: &Rat| {
        let first = p.vertices.first().unwrap().0;
        let last = p.vertices.last().unwrap().0;
        i >= first && i <= last && p.boundary_at(&rat::int(i as i64)).as_ref() == Some(j)
    };
    let mut rows: std::collections::BTreeMap<u32, Vec<(Rat, Num)>> = Default::default();
    for ((i, j), c) in fx.terms() {
        if on_boundary(*i, j) {
            rows.entry(*i).or_default().push((j.clone(), c.clone()));
        }
    }
    Ok(FracBiPoly::from_rows(
        rows.into_iter().map(|(k, t)| (k, crate::puiseux::FracSeries::exact(t))).collect(),
    ))
}

/// Whether the Legendre transform of `ord` reproduces the boundary of `p`.
pub fn legendre_roundtrip_check(p: &RelPolygon, ord: &OrderFn) -> bool {
    let (Some(first), Some(last)) = (p.vertices.first(), p.vertices.last()) else {
        return false;
    };
    if ord.legendre(&rat::int(first.0 as i64 - 1)).is_some() && first.0 > 0 {
        return false;
    }
    (first.0..=last.0).all(|i| {
        let x = rat::int(i as i64);
        ord.legendre(&x) == p.boundary_at(&x)
    })
}
