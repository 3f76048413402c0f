//! Fractional power series in `y`, substitution `f(X + λ(Y), Y)`, contact
//! orders and reparametrizations of the half-line.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::arith::rat::{self, Rat};
use crate::arith::{BiPoly, Field, Limits, Num, UniPoly};
use crate::{GermError, Result};

/// `Σ a_k y^{e_k}` with strictly increasing rational exponents and nonzero
/// coefficients, known below `trunc` (`None`: the series is exact).
#[derive(Clone, Debug)]
pub struct FracSeries {
    terms: Vec<(Rat, Num)>,
    trunc: Option<Rat>,
}

fn rmin(a: &Option<Rat>, b: &Option<Rat>) -> Option<Rat> {
    match (a, b) {
        (None, x) | (x, None) => x.clone(),
        (Some(x), Some(y)) => Some(rat::min_rat(x, y).clone()),
    }
}

impl FracSeries {
    pub fn new(terms: Vec<(Rat, Num)>, trunc: Option<Rat>) -> Self {
        let mut m: BTreeMap<Rat, Num> = BTreeMap::new();
        for (e, c) in terms {
            let slot = m.entry(e).or_insert_with(Num::zero_elem);
            *slot = slot.add(&c);
        }
        let terms = m
            .into_iter()
            .filter(|(e, c)| trunc.as_ref().map_or(true, |t| e < t) && !c.vanishes())
            .collect();
        FracSeries { terms, trunc }
    }

    pub fn exact(terms: Vec<(Rat, Num)>) -> Self {
        Self::new(terms, None)
    }

    pub fn zero() -> Self {
        Self::exact(Vec::new())
    }

    pub fn monomial(c: Num, e: Rat) -> Self {
        Self::exact(vec![(e, c)])
    }

    /// From `(numerator, denominator, coefficient)` triples.
    pub fn from_rats(ts: &[(i64, i64, i64)]) -> Self {
        Self::exact(ts.iter().map(|&(n, d, c)| (rat::rat(n, d), Num::int(c))).collect())
    }

    pub fn terms(&self) -> &[(Rat, Num)] {
        &self.terms
    }

    pub fn trunc(&self) -> Option<&Rat> {
        self.trunc.as_ref()
    }

    pub fn is_exact(&self) -> bool {
        self.trunc.is_none()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// lcm of the exponent denominators actually present.
    pub fn denominator(&self) -> u64 {
        self.terms.iter().fold(1, |n, (e, _)| rat::lcm_u64(n, rat::den_u64(e)))
    }

    pub fn lowest_exponent(&self) -> Option<&Rat> {
        self.terms.first().map(|(e, _)| e)
    }

    /// Smallest exponent that could carry a nonzero term.
    fn valuation(&self) -> Option<Rat> {
        match (self.lowest_exponent(), &self.trunc) {
            (Some(e), _) => Some(e.clone()),
            (None, t) => t.clone(),
        }
    }

    pub fn coeff_at(&self, e: &Rat) -> Num {
        self.terms.iter().find(|(x, _)| x == e).map_or_else(Num::zero_elem, |(_, c)| c.clone())
    }

    pub fn truncate(&self, t: &Rat) -> Self {
        Self::new(self.terms.clone(), rmin(&self.trunc, &Some(t.clone())))
    }

    /// Terms with exponent strictly below `t`, as an exact series.
    pub fn head(&self, t: &Rat) -> Self {
        Self::exact(self.terms.iter().filter(|(e, _)| e < t).cloned().collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut t = self.terms.clone();
        t.extend(o.terms.iter().cloned());
        Self::new(t, rmin(&self.trunc, &o.trunc))
    }

    pub fn neg(&self) -> Self {
        Self { terms: self.terms.iter().map(|(e, c)| (e.clone(), c.neg())).collect(), trunc: self.trunc.clone() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &Num) -> Self {
        Self::new(self.terms.iter().map(|(e, a)| (e.clone(), a.mul(c))).collect(), self.trunc.clone())
    }

    /// Multiply by `y^e`.
    pub fn shift(&self, e: &Rat) -> Self {
        Self {
            terms: self.terms.iter().map(|(x, c)| (x + e, c.clone())).collect(),
            trunc: self.trunc.as_ref().map(|t| t + e),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let trunc = {
            let a = match (&self.trunc, o.valuation()) {
                (Some(t), Some(v)) => Some(t + v),
                _ => None,
            };
            let b = match (&o.trunc, self.valuation()) {
                (Some(t), Some(v)) => Some(t + v),
                _ => None,
            };
            rmin(&a, &b)
        };
        let mut t = Vec::with_capacity(self.terms.len() * o.terms.len());
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e = e1 + e2;
                if trunc.as_ref().map_or(true, |tr| &e < tr) {
                    t.push((e, c1.mul(c2)));
                }
            }
        }
        Self::new(t, trunc)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::monomial(Num::one_elem(), Rat::zero());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// `s^e` for rational `e > 0`, requiring a positive leading coefficient;
    /// computed through exponents below `t`.
    pub fn pow_rat(&self, e: &Rat, t: &Rat, limits: &Limits) -> Result<Self> {
        let Some((e0, c0)) = self.terms.first().cloned() else {
            return Err(GermError::InvalidInput("power of a zero series".into()));
        };
        if c0.sign() <= 0 {
            return Err(GermError::InvalidInput("rational power needs a positive leading coefficient".into()));
        }
        let lead = pow_num(&c0, e, limits)?;
        // s = c0 y^e0 (1 + r)
        let r = self.scale(&c0.inv()).shift(&-&e0).sub(&Self::monomial(Num::one_elem(), Rat::zero()));
        let base_exp = &e0 * e;
        let budget = t - &base_exp;
        let mut acc = Self::monomial(Num::one_elem(), Rat::zero()).truncate(&budget);
        if let Some(rho) = r.valuation().filter(|v| v.is_positive()) {
            let mut term = Self::monomial(Num::one_elem(), Rat::zero());
            let mut binom = Rat::one();
            let mut k = 0i64;
            while Rat::from_integer(k.into()) * &rho < budget {
                k += 1;
                binom = binom * (e - rat::int(k - 1)) / rat::int(k);
                term = term.mul(&r).truncate(&budget);
                acc = acc.add(&term.scale(&Num::Q(binom.clone())));
            }
        }
        Ok(acc.scale(&lead).shift(&base_exp))
    }

    /// `self(u(y))` for `u` with positive leading coefficient and lowest
    /// exponent 1, through exponents below `t`.
    pub fn compose(&self, u: &Self, t: &Rat, limits: &Limits) -> Result<Self> {
        let mut acc = Self::zero().truncate(t);
        for (e, c) in &self.terms {
            acc = acc.add(&u.pow_rat(e, t, limits)?.scale(c));
        }
        if let Some(tr) = &self.trunc {
            acc = acc.truncate(tr);
        }
        Ok(acc.truncate(t))
    }

    pub fn eval_f64(&self, y: f64) -> f64 {
        self.terms.iter().map(|(e, c)| c.to_f64() * y.powf(rat::to_f64(e))).sum()
    }
}

/// `a^e` for `a > 0` and rational `e`.
pub fn pow_num(a: &Num, e: &Rat, limits: &Limits) -> Result<Num> {
    let d = rat::den_u64(e) as u32;
    let n = e.numer().clone();
    let np: u32 = num_traits::ToPrimitive::to_u32(&n.abs()).expect("small exponent");
    let neg = n.is_negative();
    let finish = |r: Num| {
        let mut acc = Num::one_elem();
        for _ in 0..np {
            acc = acc.mul(&r);
        }
        if neg {
            acc.inv()
        } else {
            acc
        }
    };
    if d == 1 {
        return Ok(finish(a.clone()));
    }
    if let Some(q) = a.as_rat() {
        if let Some(r) = rat_root(&q, d) {
            return Ok(finish(Num::Q(r)));
        }
        // One generator per (q, d) keeps repeated powers in a single tower.
        let key = (q.clone(), d);
        if let Some(r) = root_cache().lock().unwrap().get(&key) {
            return Ok(finish(r.clone()));
        }
        let r = positive_root(a, d, limits)?;
        root_cache().lock().unwrap().insert(key, r.clone());
        return Ok(finish(r));
    }
    Ok(finish(positive_root(a, d, limits)?))
}

fn root_cache() -> &'static std::sync::Mutex<std::collections::HashMap<(Rat, u32), Num>> {
    static CACHE: std::sync::OnceLock<std::sync::Mutex<std::collections::HashMap<(Rat, u32), Num>>> =
        std::sync::OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Positive real root of `z^d − a`.
fn positive_root(a: &Num, d: u32, limits: &Limits) -> Result<Num> {
    let mut cs = vec![Num::zero_elem(); d as usize + 1];
    cs[0] = a.neg();
    cs[d as usize] = Num::one_elem();
    let roots = Num::real_roots(&UniPoly::new(cs), limits)?;
    Ok(roots.into_iter().map(|(r, _)| r).last().expect("positive root exists"))
}

/// Exact rational `d`-th root of a positive rational, if any.
fn rat_root(q: &Rat, d: u32) -> Option<Rat> {
    let n = q.numer().nth_root(d);
    let m = q.denom().nth_root(d);
    if num_traits::pow(n.clone(), d as usize) == *q.numer() && num_traits::pow(m.clone(), d as usize) == *q.denom() {
        Some(Rat::new(n, m))
    } else {
        None
    }
}

impl PartialEq for FracSeries {
    fn eq(&self, o: &Self) -> bool {
        self.trunc == o.trunc
            && self.terms.len() == o.terms.len()
            && self.terms.iter().zip(&o.terms).all(|(a, b)| a.0 == b.0 && a.1 == b.1)
    }
}

fn fmt_exp(e: &Rat) -> String {
    if rat::is_integer(e) {
        format!("y^{e}")
    } else {
        format!("y^({e})")
    }
}

impl fmt::Display for FracSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        for (e, c) in &self.terms {
            let cs = c.to_string();
            let mon = if e.is_zero() { String::new() } else if e.is_one() { "y".into() } else { fmt_exp(e) };
            parts.push(match (cs.as_str(), mon.is_empty()) {
                (_, true) => cs.clone(),
                ("1", _) => mon,
                ("-1", _) => format!("-{mon}"),
                _ => format!("{cs}*{mon}"),
            });
        }
        if let Some(t) = &self.trunc {
            parts.push(format!("O({})", fmt_exp(t)));
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        let mut s = parts[0].clone();
        for p in &parts[1..] {
            match p.strip_prefix('-') {
                Some(rest) => {
                    s.push_str(" - ");
                    s.push_str(rest);
                }
                None => {
                    s.push_str(" + ");
                    s.push_str(p);
                }
            }
        }
        write!(f, "{s}")
    }
}

/// A demi-branch `x = λ(y)`, `y ≥ 0`, optionally ending in a generic
/// coefficient at `generic_tail`.
#[derive(Clone, Debug, PartialEq)]
pub struct DemiBranch {
    pub series: FracSeries,
    pub generic_tail: Option<Rat>,
}

impl DemiBranch {
    pub fn new(series: FracSeries) -> Self {
        DemiBranch { series, generic_tail: None }
    }

    pub fn with_tail(series: FracSeries, tail: Rat) -> Self {
        DemiBranch { series, generic_tail: Some(tail) }
    }

    /// The branch `x = 0`.
    pub fn axis() -> Self {
        Self::new(FracSeries::zero())
    }

    /// Transverse to the x-axis: no exponent below 1.
    pub fn is_allowable(&self) -> bool {
        self.series.lowest_exponent().map_or(true, |e| e >= &Rat::one())
    }
}

/// Contact order of two series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Contact {
    /// First exponent at which the series differ.
    At(Rat),
    /// Identical exact series.
    Infinite,
    /// Equal below this exponent; the data does not determine more.
    UndeterminedBeyond(Rat),
}

pub fn contact_order(a: &FracSeries, b: &FracSeries) -> Contact {
    let d = a.sub(b);
    match (d.lowest_exponent(), d.trunc()) {
        (Some(e), _) => Contact::At(e.clone()),
        (None, None) => Contact::Infinite,
        (None, Some(t)) => Contact::UndeterminedBeyond(t.clone()),
    }
}

/// `f(X + λ(Y), Y)` as a polynomial in `X` with fractional powers of `Y`.
/// Row `k` (the coefficient of `X^k`) is exact below `valid[k]` when present.
#[derive(Clone, Debug, Default)]
pub struct FracBiPoly {
    terms: BTreeMap<(u32, Rat), Num>,
    valid: BTreeMap<u32, Rat>,
}

impl FracBiPoly {
    pub fn from_rows(rows: Vec<(u32, FracSeries)>) -> Self {
        let mut p = FracBiPoly::default();
        for (k, s) in rows {
            p.add_row(k, &s);
        }
        p
    }

    fn add_row(&mut self, k: u32, s: &FracSeries) {
        if let Some(t) = s.trunc() {
            let v = self.valid.entry(k).or_insert_with(|| t.clone());
            if t < v {
                *v = t.clone();
            }
        }
        for (e, c) in s.terms() {
            let slot = self.terms.entry((k, e.clone())).or_insert_with(Num::zero_elem);
            *slot = slot.add(c);
        }
        let bound = self.valid.get(&k).cloned();
        self.terms.retain(|(i, e), c| {
            !(c.is_trivially_zero() || (*i == k && bound.as_ref().is_some_and(|b| e >= b)))
        });
    }

    /// The `X^k` coefficient as a series.
    pub fn row(&self, k: u32) -> FracSeries {
        FracSeries::new(
            self.terms.iter().filter(|((i, _), _)| *i == k).map(|((_, e), c)| (e.clone(), c.clone())).collect(),
            self.valid.get(&k).cloned(),
        )
    }

    pub fn rows(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.terms.keys().map(|(i, _)| *i).chain(self.valid.keys().copied()).collect();
        v.sort();
        v.dedup();
        v
    }

    /// Support points with exactly nonzero coefficients.
    pub fn support(&self) -> Vec<(u32, Rat)> {
        self.terms.iter().filter(|(_, c)| !c.vanishes()).map(|(k, _)| k.clone()).collect()
    }

    pub fn coeff(&self, i: u32, j: &Rat) -> Num {
        self.terms.get(&(i, j.clone())).cloned().unwrap_or_else(Num::zero_elem)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, Rat), &Num)> {
        self.terms.iter()
    }

    pub fn validity(&self) -> &BTreeMap<u32, Rat> {
        &self.valid
    }

    pub fn is_exact(&self) -> bool {
        self.valid.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut p = self.clone();
        for k in o.rows() {
            p.add_row(k, &o.row(k));
        }
        p
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut rows: BTreeMap<u32, FracSeries> = BTreeMap::new();
        for a in self.rows() {
            for b in o.rows() {
                let prod = self.row(a).mul(&o.row(b));
                let e = rows.entry(a + b).or_insert_with(FracSeries::zero);
                *e = e.add(&prod);
            }
        }
        Self::from_rows(rows.into_iter().collect())
    }

    pub fn eval_f64(&self, x: f64, y: f64) -> f64 {
        self.terms.iter().map(|((i, e), c)| c.to_f64() * x.powi(*i as i32) * y.powf(rat::to_f64(e))).sum()
    }
}

impl fmt::Display for FracBiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for ((i, e), c) in self.terms.iter().rev() {
            let mut mon = Vec::new();
            match i {
                0 => {}
                1 => mon.push("X".to_string()),
                _ => mon.push(format!("X^{i}")),
            }
            if !e.is_zero() {
                mon.push(if e.is_one() {
                    "Y".into()
                } else if rat::is_integer(e) {
                    format!("Y^{e}")
                } else {
                    format!("Y^({e})")
                });
            }
            let cs = c.to_string();
            parts.push(match (cs.as_str(), mon.is_empty()) {
                (_, true) => cs.clone(),
                ("1", _) => mon.join("*"),
                ("-1", _) => format!("-{}", mon.join("*")),
                _ => format!("{cs}*{}", mon.join("*")),
            });
        }
        for (k, v) in &self.valid {
            parts.push(format!("O(X^{k}*Y^({v}))"));
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        let mut s = parts[0].clone();
        for p in &parts[1..] {
            match p.strip_prefix('-') {
                Some(rest) => {
                    s.push_str(" - ");
                    s.push_str(rest);
                }
                None => {
                    s.push_str(" + ");
                    s.push_str(p);
                }
            }
        }
        write!(f, "{s}")
    }
}

/// `Σ c_ij (X + λ)^i Y^j`, exact where `λ` is.
pub fn substitute(f: &BiPoly, lambda: &FracSeries) -> FracBiPoly {
    let maxi = f.deg_x().unwrap_or(0);
    let mut pows = vec![FracSeries::monomial(Num::one_elem(), Rat::zero())];
    for n in 1..=maxi {
        let next = pows[n as usize - 1].mul(lambda);
        pows.push(next);
    }
    let mut rows: BTreeMap<u32, FracSeries> = BTreeMap::new();
    for (&(i, j), c) in f.terms() {
        for k in 0..=i {
            let coef = Num::Q(c * Rat::from_integer(rat::binomial(i, k)));
            let s = pows[(i - k) as usize].shift(&rat::int(j as i64)).scale(&coef);
            let e = rows.entry(k).or_insert_with(FracSeries::zero);
            *e = e.add(&s);
        }
    }
    FracBiPoly::from_rows(rows.into_iter().collect())
}

/// Inverse `u` of an orientation-preserving reparametrization `w(y) = c y + …`
/// (`c > 0`), with `w(u(ỹ)) = ỹ` through exponent `t`.
pub fn invert_reparametrization(w: &FracSeries, t: &Rat) -> Result<FracSeries> {
    let limits = Limits::default();
    let Some((e0, c)) = w.terms().first().cloned() else {
        return Err(GermError::InvalidInput("reparametrization is zero".into()));
    };
    if !e0.is_one() || c.sign() <= 0 {
        return Err(GermError::InvalidInput(
            "not an orientation-preserving reparametrization: need w = c*y + higher order with c > 0".into(),
        ));
    }
    let n = rat::int(w.denominator() as i64);
    let bound = (t * &n).floor() / &n + Rat::one() / &n;
    let bound = match w.trunc() {
        Some(wt) => rat::min_rat(&bound, &(wt.clone())).clone(),
        None => bound,
    };
    let cinv = c.inv();
    let higher = w.sub(&FracSeries::monomial(c.clone(), Rat::one()));
    let ident = FracSeries::monomial(Num::one_elem(), Rat::one());
    let mut u = ident.scale(&cinv).truncate(&bound);
    loop {
        let next = ident.sub(&higher.compose(&u, &bound, &limits)?).scale(&cinv).truncate(&bound);
        if next == u {
            return Ok(u);
        }
        u = next;
    }
}

/// A plane map acting on demi-branches.
#[derive(Clone, Debug)]
pub enum PlaneMap {
    /// `(x, y) ↦ (a x + b y, c x + d y)`.
    Linear { a: Rat, b: Rat, c: Rat, d: Rat },
    /// `(x, y) ↦ (x + p(y), y)`.
    Shear(UniPoly<Rat>),
}

/// Image of the demi-branch `x = λ(y)` under `σ`, exact through exponent `t`.
pub fn image_branch(sigma: &PlaneMap, g: &DemiBranch, t: &Rat) -> Result<DemiBranch> {
    let limits = Limits::default();
    let lam = &g.series;
    match sigma {
        PlaneMap::Shear(p) => {
            let ps = FracSeries::exact(
                p.coeffs().iter().enumerate().map(|(k, c)| (rat::int(k as i64), Num::Q(c.clone()))).collect(),
            );
            Ok(DemiBranch { series: lam.add(&ps), generic_tail: g.generic_tail.clone() })
        }
        PlaneMap::Linear { a, b, c, d } => {
            if (a * d - b * c).is_zero() {
                return Err(GermError::InvalidInput("linear map is singular".into()));
            }
            let ny = lam.scale(&Num::Q(c.clone())).add(&FracSeries::monomial(Num::Q(d.clone()), Rat::one()));
            let lead = ny.coeff_at(&Rat::one());
            if ny.lowest_exponent() != Some(&Rat::one()) || lead.sign() <= 0 {
                return Err(GermError::InvalidInput(
                    "image branch is tangent to the x-axis or leaves the half-plane y > 0".into(),
                ));
            }
            let u = invert_reparametrization(&ny, t)?;
            let top = u.trunc().cloned().unwrap_or_else(|| t + Rat::one());
            let nx = lam
                .compose(&u, &top, &limits)?
                .scale(&Num::Q(a.clone()))
                .add(&u.scale(&Num::Q(b.clone())));
            Ok(DemiBranch::new(nx.truncate(&top)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_product_tracks_truncation() {
        let a = FracSeries::new(vec![(rat::int(1), Num::int(1))], Some(rat::int(3)));
        let b = a.mul(&a);
        assert_eq!(b.trunc(), Some(&rat::int(4)));
        assert_eq!(b.terms().len(), 1);
    }

    #[test]
    fn rational_power_of_binomial() {
        // (y + y^2)^(1/2) = y^(1/2) (1 + y/2 - y^2/8 + ...)
        let s = FracSeries::from_rats(&[(1, 1, 1), (2, 1, 1)]);
        let r = s.pow_rat(&rat::rat(1, 2), &rat::rat(5, 2), &Limits::default()).unwrap();
        assert_eq!(r.coeff_at(&rat::rat(1, 2)).as_rat(), Some(rat::int(1)));
        assert_eq!(r.coeff_at(&rat::rat(3, 2)).as_rat(), Some(rat::rat(1, 2)));
        assert!(r.coeff_at(&rat::rat(5, 2)).is_trivially_zero());
        assert_eq!(r.trunc(), Some(&rat::rat(5, 2)));
    }

    #[test]
    fn rat_roots() {
        assert_eq!(rat_root(&rat::rat(4, 9), 2), Some(rat::rat(2, 3)));
        assert_eq!(rat_root(&rat::int(2), 2), None);
    }
}
