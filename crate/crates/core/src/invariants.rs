//! Fukui invariant sets, the C¹ transfer relation between edge polynomials,
//! and the bi-Lipschitz / C¹ classification of weighted homogeneous germs.

use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::arith::rat::{self, Rat};
use crate::arith::{isolate_real_roots, BiPoly, Field, Limits, Num, UniPoly};
use crate::polygon::EdgePoly;
use crate::puiseux::pow_num;
use crate::tree::{build_real_tree, Bar};
use crate::{GermError, Result};

/// Which arcs contribute to a Fukui set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignMode {
    All,
    NonNeg,
    NonPos,
}

impl SignMode {
    fn admits(&self, s: Signs) -> bool {
        match self {
            SignMode::All => s.neg || s.pos,
            SignMode::NonNeg => s.pos,
            SignMode::NonPos => s.neg,
        }
    }
}

/// Signs that `f` takes along some arc with a given order.
#[derive(Clone, Copy, Debug, Default)]
struct Signs {
    neg: bool,
    pos: bool,
}

impl Signs {
    fn both() -> Self {
        Signs { neg: true, pos: true }
    }

    fn of(s: i8) -> Self {
        Signs { neg: s < 0, pos: s > 0 }
    }

    /// Leading coefficient `lc·c^m` over all real `c ≠ 0`.
    fn power(m: usize, lc: i8) -> Self {
        if m % 2 == 1 {
            Self::both()
        } else {
            Self::of(lc)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FukuiSet {
    pub bound: u64,
    pub members: Vec<u64>,
    /// Every integer from here up to `bound` is a member, and this is
    /// certified to continue beyond `bound`.
    pub tail_from: Option<u64>,
    pub infinity: bool,
}

impl FukuiSet {
    pub fn to_json(&self) -> Value {
        json!({
            "bound": self.bound,
            "members": self.members,
            "tail_from": self.tail_from,
            "infinity": self.infinity,
        })
    }

    pub fn contains(&self, n: u64) -> bool {
        self.members.binary_search(&n).is_ok()
    }
}

/// Primitive orders along one bar: `N(ξ)·ord(ξ)` for `ξ ∈ (base, height]`.
fn bar_values(b: &Bar, bound: u64, out: &mut Vec<(u64, Signs)>) {
    let m = rat::int(b.multiplicity as i64);
    let bnd = rat::int(bound as i64);
    let top = match &b.height {
        Some(h) => h.clone(),
        None => &b.base + (&bnd - &b.ord_start) / &m,
    };
    for q in 1..=bound {
        let qr = rat::int(q as i64);
        let lo = rat::floor_i64(&(&b.base * &qr)) + 1;
        let hi = rat::floor_i64(&(&top * &qr));
        for p in lo..=hi {
            if p.gcd(&(q as i64)) != 1 {
                continue;
            }
            let xi = rat::rat(p, q as i64);
            let n = rat::lcm_u64(b.horn.head(&xi).denominator(), q);
            if n > bound {
                continue;
            }
            let v = (&b.ord_start + &m * (&xi - &b.base)) * rat::int(n as i64);
            debug_assert!(rat::is_integer(&v));
            if v > bnd {
                continue;
            }
            let signs = if b.height.as_ref() == Some(&xi) {
                if b.odd_real_root {
                    Signs::both()
                } else {
                    Signs::of(b.lc_sign)
                }
            } else {
                Signs::power(b.multiplicity, b.lc_sign)
            };
            out.push((rat::floor_i64(&v) as u64, signs));
        }
    }
    // Arcs that leave the bar above its height through z = 0.
    if let (Some(h), Some(e)) = (&b.height, &b.edge) {
        let c0 = e.poly.coeff(0);
        if !c0.vanishes() {
            let d = b.horn.head(h).denominator();
            let mut n = d;
            while n <= bound {
                let v = &e.ord * rat::int(n as i64);
                if v > bnd {
                    break;
                }
                if rat::is_integer(&v) {
                    out.push((rat::floor_i64(&v) as u64, Signs::of(c0.sign())));
                }
                n += d;
            }
        }
    }
    for t in &b.trunks {
        bar_values(&t.child, bound, out);
    }
}

/// Infinite progressions `start + step·n` of orders along arcs approaching a
/// real root.
fn root_progressions(b: &Bar, mode: SignMode, out: &mut Vec<(i64, i64)>) {
    if b.height.is_none() {
        if !mode.admits(Signs::power(b.multiplicity, b.lc_sign)) {
            return;
        }
        let m = b.multiplicity as i64;
        let nr = b.horn.denominator() as i64;
        for j in 1..=(m + 12) {
            let k = rat::int(j * nr);
            let start = &k * (&b.ord_start - rat::int(m) * &b.base)
                + rat::int(m) * rat::int(rat::floor_i64(&(&k * &b.base)) + 1);
            out.push((rat::floor_i64(&start), m));
        }
    }
    for t in &b.trunks {
        root_progressions(&t.child, mode, out);
    }
}

fn has_real_root(b: &Bar) -> bool {
    b.height.is_none() || b.trunks.iter().any(|t| has_real_root(&t.child))
}

/// Smallest `c` with every integer `≥ c` in one of the progressions.
fn covered_from(progs: &[(i64, i64)]) -> Option<i64> {
    let modulus = progs.iter().fold(1i64, |a, (_, s)| a.lcm(s));
    let mut c = i64::MIN;
    for r in 0..modulus {
        let earliest = progs
            .iter()
            .filter(|(st, s)| (r - st).rem_euclid(*s) == 0)
            .map(|(st, _)| st + (r - st).rem_euclid(modulus))
            .min()?;
        c = c.max(earliest - modulus + 1);
    }
    Some(c)
}

/// `A(f) ∩ [1, B]` (or `A_±(f)`), computed from the real tree.
pub fn fukui_set(f: &BiPoly, bound: u64, mode: SignMode) -> Result<FukuiSet> {
    if f.is_zero() {
        return Err(GermError::InvalidInput("f is zero".into()));
    }
    if f.coeff(0, 0) != Rat::zero() {
        return Err(GermError::InvalidInput("f does not vanish at the origin".into()));
    }
    let t = build_real_tree(f)?;
    let m = t.charts[0].order().unwrap_or(0) as u64;
    let mut prims: Vec<(u64, Signs)> = Vec::new();
    // Arcs in a generic direction, or tangent to the chart's x-axis.
    let generic = if t.ground.is_empty() {
        Signs::of(t.sign)
    } else {
        Signs { neg: t.sectors.iter().any(|&s| s < 0), pos: t.sectors.iter().any(|&s| s > 0) }
    };
    prims.push((m, generic));
    for d in &t.ground {
        bar_values(&d.bar, bound, &mut prims);
    }
    prims.retain(|(v, s)| *v >= 1 && mode.admits(*s));
    let members: Vec<u64> = (1..=bound).filter(|n| prims.iter().any(|(v, _)| n % v == 0)).collect();
    let mut progs = Vec::new();
    for d in &t.ground {
        root_progressions(&d.bar, mode, &mut progs);
    }
    let tail_from = covered_from(&progs).filter(|&c| c <= bound as i64 + 1).and_then(|_| {
        let mut n0 = None;
        for n in (1..=bound).rev() {
            if members.binary_search(&n).is_err() {
                break;
            }
            n0 = Some(n);
        }
        n0
    });
    let infinity = t.ground.iter().any(|d| has_real_root(&d.bar));
    Ok(FukuiSet { bound, members, tail_from, infinity })
}

/// Witness for `P(z) = e^{ord}·Q(δz / e^{ξ+1})`, kept exactly as
/// `P(z) = κ·Q(βz)` with `κ = e^{ord}`, `β = δ/e^{ξ+1}`.
#[derive(Clone, Debug)]
pub struct TransferWitness {
    pub kappa: Num,
    pub beta: Num,
    pub e: f64,
    pub delta: f64,
}

/// Real `β` with `β^n = ρ`.
fn real_nth_roots(rho: &Num, n: usize, limits: &Limits) -> Result<Vec<Num>> {
    let s = rho.sign();
    if s == 0 {
        return Ok(vec![Num::zero_elem()]);
    }
    let r = pow_num(&rho.mul(&Num::int(s as i64)), &rat::rat(1, n as i64), limits)?;
    Ok(match (s > 0, n % 2 == 0) {
        (true, true) => vec![r.clone(), r.neg()],
        (true, false) => vec![r],
        (false, false) => vec![r.neg()],
        (false, true) => vec![],
    })
}

fn num_pow(a: &Num, k: usize) -> Num {
    (0..k).fold(Num::one_elem(), |acc, _| acc.mul(a))
}

/// All `(κ, β)` with `κ > 0` (or any sign when `positive` is false),
/// `β ≠ 0` and `p(z) = κ·q(βz)`.
fn scale_matches(p: &UniPoly<Num>, q: &UniPoly<Num>, positive: bool, limits: &Limits) -> Result<Vec<(Num, Num)>> {
    let support = |u: &UniPoly<Num>| -> Vec<usize> {
        u.coeffs().iter().enumerate().filter(|(_, c)| !c.vanishes()).map(|(i, _)| i).collect()
    };
    let (sp, sq) = (support(p), support(q));
    if sp != sq || sp.is_empty() {
        return Ok(Vec::new());
    }
    let k1 = sp[0];
    let k2 = *sp.last().unwrap();
    let betas = if k1 == k2 {
        // A monomial fixes κβ^k only; β = ±1 covers every sign pattern.
        vec![Num::int(1), Num::int(-1)]
    } else {
        let rho = p.coeff(k2).mul(&q.coeff(k1)).div(&p.coeff(k1).mul(&q.coeff(k2)));
        real_nth_roots(&rho, k2 - k1, limits)?
    };
    let mut out = Vec::new();
    for beta in betas {
        let kappa = p.coeff(k1).div(&q.coeff(k1).mul(&num_pow(&beta, k1)));
        if positive && kappa.sign() <= 0 {
            continue;
        }
        if sp.iter().all(|&k| p.coeff(k).sub(&kappa.mul(&q.coeff(k)).mul(&num_pow(&beta, k))).vanishes()) {
            out.push((kappa, beta));
        }
    }
    Ok(out)
}

/// Whether two edge polynomials are related as under a C¹ diffeomorphism.
pub fn c1_transfer_check(p: &EdgePoly, q: &EdgePoly) -> Result<Option<TransferWitness>> {
    if p.xi != q.xi || p.ord != q.ord {
        return Err(GermError::InvalidInput("edge polynomials have different ξ or ord".into()));
    }
    if p.xi <= Rat::one() {
        return Err(GermError::InvalidInput("ξ must exceed 1".into()));
    }
    let found = scale_matches(&p.poly, &q.poly, true, &Limits::default())?;
    Ok(found.into_iter().next().map(|(kappa, beta)| {
        let e = kappa.to_f64().powf(1.0 / rat::to_f64(&p.ord));
        let delta = beta.to_f64() * e.powf(rat::to_f64(&p.xi) + 1.0);
        TransferWitness { kappa, beta, e, delta }
    }))
}

/// `f` weighted homogeneous: support on `q·i + p·j = d`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedData {
    pub p: u32,
    pub q: u32,
    pub d: u32,
    /// Power of `y` dividing `f`.
    pub l: u32,
    /// `P(z) = f(z, 1)`.
    pub assoc: UniPoly<Rat>,
    /// Weights came out with `p > q`; the data refer to `f(y, x)`.
    pub swapped: bool,
}

pub fn weighted_data(f: &BiPoly) -> Option<WeightedData> {
    let pts: Vec<(u32, u32)> = f.support().collect();
    let (&(i0, j0), rest) = pts.split_first()?;
    let (p, q) = match rest.first() {
        None => (1, 1),
        Some(&(i1, j1)) => {
            let (di, dj) = (i1 as i64 - i0 as i64, j1 as i64 - j0 as i64);
            if di * dj >= 0 {
                return None;
            }
            let g = di.gcd(&dj);
            ((di.abs() / g) as u32, (dj.abs() / g) as u32)
        }
    };
    let d = q * i0 + p * j0;
    if pts.iter().any(|&(i, j)| q * i + p * j != d) {
        return None;
    }
    if p > q {
        let mut w = weighted_data(&f.swap())?;
        w.swapped = true;
        return Some(w);
    }
    let l = pts.iter().map(|&(_, j)| j).min().unwrap_or(0);
    Some(WeightedData { p, q, d, l, assoc: f.dehomogenize_y(), swapped: false })
}

#[derive(Clone, Debug, PartialEq)]
pub enum MonomialLike {
    /// `A(ax + by)^k (cx + dy)^l`.
    Am { k: u32, l: u32 },
    /// `A(x + b y^q)^k y^l`.
    Bm { k: u32, l: u32, b: Rat },
    /// `A x^k y^l`.
    Cm { a: Rat, k: u32, l: u32 },
    None,
}

/// Projective roots of a binary form as squarefree factors of `f(z, 1)`
/// with multiplicities, plus the multiplicity at infinity.
fn projective_factors(f: &BiPoly) -> (Vec<(UniPoly<Rat>, usize)>, usize) {
    let p = f.dehomogenize_y();
    let d = f.total_degree().unwrap_or(0) as usize;
    let inf = d - p.degree().unwrap_or(0);
    (p.squarefree_decomposition().into_iter().filter(|(g, _)| g.degree().unwrap_or(0) > 0).collect(), inf)
}

pub fn monomial_like(f: &BiPoly) -> Result<MonomialLike> {
    let w = weighted_data(f).ok_or_else(|| GermError::InvalidInput("f is not weighted homogeneous".into()))?;
    let terms: Vec<_> = f.terms().iter().collect();
    if terms.len() == 1 {
        let (&(k, l), a) = terms[0];
        return Ok(MonomialLike::Cm { a: a.clone(), k, l });
    }
    if w.p == 1 && w.q == 1 {
        let (factors, inf) = projective_factors(f);
        let mut mults: Vec<u32> = Vec::new();
        for (g, k) in &factors {
            let deg = g.degree().unwrap();
            if isolate_real_roots(g)?.len() != deg {
                return Ok(MonomialLike::None);
            }
            mults.extend(std::iter::repeat_n(*k as u32, deg));
        }
        if inf > 0 {
            mults.push(inf as u32);
        }
        return Ok(match mults.as_slice() {
            [k] => MonomialLike::Am { k: *k, l: 0 },
            [k, l] => MonomialLike::Am { k: *k, l: *l },
            _ => MonomialLike::None,
        });
    }
    if w.p == 1 && !w.swapped {
        let p = &w.assoc;
        let sq = p.squarefree_part();
        if sq.degree() == Some(1) {
            let b = sq.coeff(0) / sq.coeff(1);
            return Ok(MonomialLike::Bm { k: p.degree().unwrap() as u32, l: w.l, b });
        }
    }
    Ok(MonomialLike::None)
}

/// Analytic normal form `±x^k y^l` of a monomial-like germ; the sign is 0
/// when a reflection can flip it.
fn normal_form(f: &BiPoly, ml: &MonomialLike) -> Option<(u32, u32, i8)> {
    let (k, l) = match ml {
        MonomialLike::Am { k, l } | MonomialLike::Bm { k, l, .. } | MonomialLike::Cm { k, l, .. } => (*k, *l),
        MonomialLike::None => return None,
    };
    let sign = if k % 2 == 1 || l % 2 == 1 {
        0
    } else {
        (1..20)
            .flat_map(|a| [(a, 1), (1, a), (a, -1), (-a, 1)])
            .map(|(a, b)| rat::sign(&f.eval(&rat::int(a), &rat::int(b))))
            .find(|&s| s != 0)
            .unwrap_or(0)
    };
    Some((k.min(l), k.max(l), sign))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    BiLipschitz,
    C1,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    /// With a JSON certificate.
    Equivalent(Value),
    NotEquivalent(String),
    Inconclusive(String),
}

/// `f(x - s y^q, y)`.
fn shear_x(f: &BiPoly, s: &Rat, q: u32) -> BiPoly {
    let x = BiPoly::x().sub(&BiPoly::monomial(s.clone(), 0, q));
    let mut out = BiPoly::zero();
    for (&(i, j), c) in f.terms() {
        out = out.add(&x.pow(i).mul(&BiPoly::monomial(c.clone(), 0, j)));
    }
    out
}

/// Shift making the roots of `f(z, 1)` average to 0.
fn centering_shift(w: &WeightedData) -> Rat {
    let n = w.assoc.degree().unwrap_or(0);
    if n == 0 {
        return Rat::zero();
    }
    // f(x - s y^q, y) has P(z - s); its z^{n-1} coefficient vanishes for
    // s = p_{n-1} / (n p_n).
    w.assoc.coeff(n - 1) / (rat::int(n as i64) * w.assoc.coeff(n))
}

/// Real `c1, c2 ≠ 0` with `f(x, y) = g(c1 x, c2 y)` exactly.
fn diagonal_match(f: &BiPoly, g: &BiPoly, oriented: bool, limits: &Limits) -> Result<Option<(Num, Num)>> {
    let sf: Vec<(u32, u32)> = f.support().collect();
    let sg: Vec<(u32, u32)> = g.support().collect();
    if sf != sg {
        return Ok(None);
    }
    let r: Vec<(u32, u32, Rat)> = sf.iter().map(|&(i, j)| (i, j, f.coeff(i, j) / g.coeff(i, j))).collect();
    let Some(pair) = r.iter().enumerate().find_map(|(a, x)| {
        r[a + 1..].iter().find(|y| x.0 as i64 * y.1 as i64 != y.0 as i64 * x.1 as i64).map(|y| (x, y))
    }) else {
        return Ok(None);
    };
    let ((i1, j1, r1), (i2, j2, r2)) = pair;
    let (r1, r2) = (rat::abs(r1), rat::abs(r2));
    let det = *i1 as i64 * *j2 as i64 - *i2 as i64 * *j1 as i64;
    let powi = |x: &Rat, e: i64| -> Rat {
        let p = rat::pow_rat(x, e.unsigned_abs() as u32);
        if e < 0 {
            p.recip()
        } else {
            p
        }
    };
    // u^det = r1^j2 / r2^j1 and v^det = r2^i1 / r1^i2.
    let ud = powi(&r1, *j2 as i64) / powi(&r2, *j1 as i64);
    let vd = powi(&r2, *i1 as i64) / powi(&r1, *i2 as i64);
    let u = pow_num(&Num::Q(ud), &rat::rat(1, det), limits)?;
    let v = pow_num(&Num::Q(vd), &rat::rat(1, det), limits)?;
    for e1 in [1i64, -1] {
        for e2 in [1i64, -1] {
            if oriented && e1 * e2 < 0 {
                continue;
            }
            let ok = r.iter().all(|(i, j, q)| {
                let s = (if i % 2 == 1 { e1 } else { 1 }) * (if j % 2 == 1 { e2 } else { 1 });
                rat::sign(q) as i64 == s
                    && num_pow(&u, *i as usize).mul(&num_pow(&v, *j as usize)).sub(&Num::Q(rat::abs(q))).vanishes()
            });
            if ok {
                return Ok(Some((u.mul(&Num::int(e1)), v.mul(&Num::int(e2)))));
            }
        }
    }
    Ok(None)
}

fn complex_roots(cs: &[f64]) -> Vec<Complex64> {
    let n = cs.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let lead = cs[n];
    let a: Vec<Complex64> = cs.iter().map(|c| Complex64::new(c / lead, 0.0)).collect();
    let eval = |z: Complex64| a.iter().rev().fold(Complex64::zero(), |acc, c| acc * z + c);
    let deval = |z: Complex64| {
        a.iter().enumerate().skip(1).rev().fold(Complex64::zero(), |acc, (k, c)| acc * z + c * k as f64)
    };
    let radius = 1.0 + a[..n].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> =
        (0..n).map(|k| Complex64::from_polar(radius, 0.4 + std::f64::consts::TAU * k as f64 / n as f64)).collect();
    // Aberth iteration.
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let ratio = eval(z[i]) / deval(z[i]);
            let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let w = ratio / (Complex64::one() - ratio * s);
            if w.is_finite() {
                z[i] -= w;
                moved = moved.max(w.norm());
            }
        }
        if moved < 1e-15 * radius {
            break;
        }
    }
    z
}

/// Point of the projective line, `[u : w]`.
type Proj = (Complex64, Complex64);

fn proj_roots(f: &BiPoly) -> Vec<(Proj, usize)> {
    let (factors, inf) = projective_factors(f);
    let mut out = Vec::new();
    for (g, k) in factors {
        for z in complex_roots(&g.to_f64s()) {
            out.push(((z, Complex64::one()), k));
        }
    }
    if inf > 0 {
        out.push(((Complex64::one(), Complex64::zero()), inf));
    }
    out
}

type M2 = [[Complex64; 2]; 2];

fn apply(m: &M2, p: &Proj) -> Proj {
    (m[0][0] * p.0 + m[0][1] * p.1, m[1][0] * p.0 + m[1][1] * p.1)
}

fn same_point(a: &Proj, b: &Proj) -> bool {
    let na = (a.0.norm_sqr() + a.1.norm_sqr()).sqrt();
    let nb = (b.0.norm_sqr() + b.1.norm_sqr()).sqrt();
    (a.0 * b.1 - a.1 * b.0).norm() <= 1e-7 * na * nb
}

/// Matrix sending `[1:0], [0:1], [1:1]` to `a, b, c`.
fn frame(a: &Proj, b: &Proj, c: &Proj) -> Option<M2> {
    let det = a.0 * b.1 - a.1 * b.0;
    if det.norm() < 1e-12 {
        return None;
    }
    let al = (c.0 * b.1 - c.1 * b.0) / det;
    let be = (a.0 * c.1 - a.1 * c.0) / det;
    Some([[a.0 * al, b.0 * be], [a.1 * al, b.1 * be]])
}

fn inverse(m: &M2) -> M2 {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    [[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]]
}

fn mat_mul(a: &M2, b: &M2) -> M2 {
    let mut out = [[Complex64::zero(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Coefficients of `g(a x + b y, c x + d y)` in floats.
fn substitute_f64(g: &BiPoly, m: &[[f64; 2]; 2]) -> std::collections::BTreeMap<(u32, u32), f64> {
    let mut out = std::collections::BTreeMap::new();
    let lin = |a: f64, b: f64, k: u32| -> Vec<f64> {
        // (a x + b y)^k as coefficients of x^i y^(k-i).
        (0..=k).map(|i| rat::to_f64(&Rat::from(rat::binomial(k, i))) * a.powi(i as i32) * b.powi((k - i) as i32)).collect()
    };
    for (&(i, j), c) in g.terms() {
        let px = lin(m[0][0], m[0][1], i);
        let py = lin(m[1][0], m[1][1], j);
        for (s, a) in px.iter().enumerate() {
            for (t, b) in py.iter().enumerate() {
                let key = (s as u32 + t as u32, (i - s as u32) + (j - t as u32));
                *out.entry(key).or_insert(0.0) += rat::to_f64(c) * a * b;
            }
        }
    }
    out
}

/// Real `A` with `f(v) = g(A v)` for homogeneous forms, by the triple search.
fn linear_match(f: &BiPoly, g: &BiPoly, oriented: bool) -> Option<[[f64; 2]; 2]> {
    let d = f.total_degree()?;
    if g.total_degree() != Some(d) {
        return None;
    }
    let rf = proj_roots(f);
    let rg = proj_roots(g);
    let mut mf: Vec<usize> = rf.iter().map(|r| r.1).collect();
    let mut mg: Vec<usize> = rg.iter().map(|r| r.1).collect();
    mf.sort();
    mg.sort();
    if mf != mg {
        return None;
    }
    if rf.len() < 3 {
        return definite_match(f, g, d, oriented);
    }
    let base = frame(&rf[0].0, &rf[1].0, &rf[2].0)?;
    let inv = inverse(&base);
    let n = rg.len();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if a == b || b == c || a == c || rg[a].1 != rf[0].1 || rg[b].1 != rf[1].1 || rg[c].1 != rf[2].1 {
                    continue;
                }
                let Some(tgt) = frame(&rg[a].0, &rg[b].0, &rg[c].0) else { continue };
                let t = mat_mul(&tgt, &inv);
                if let Some(m) = realize(f, g, &t, d, &rf, &rg, oriented) {
                    return Some(m);
                }
            }
        }
    }
    None
}

/// Scale a complex candidate to a real matrix and check it exactly enough.
fn realize(f: &BiPoly, g: &BiPoly, t: &M2, d: u32, rf: &[(Proj, usize)], rg: &[(Proj, usize)], oriented: bool) -> Option<[[f64; 2]; 2]> {
    if !rf.iter().all(|(p, k)| rg.iter().any(|(q, kq)| kq == k && same_point(&apply(t, p), q))) {
        return None;
    }
    let big = t.iter().flatten().copied().max_by(|a, b| a.norm().total_cmp(&b.norm()))?;
    let phase = big / big.norm();
    let scaled: Vec<Complex64> = t.iter().flatten().map(|z| z / phase).collect();
    if scaled.iter().any(|z| z.im.abs() > 1e-8 * big.norm()) {
        return None;
    }
    let m0 = [[scaled[0].re, scaled[1].re], [scaled[2].re, scaled[3].re]];
    let det = m0[0][0] * m0[1][1] - m0[0][1] * m0[1][0];
    // f(v) = μ^d g(m0 v) at a test vector where both are nonzero.
    let ratio = [(1.0, 0.3), (0.7, 1.0), (1.0, -0.6)].iter().find_map(|&(x, y)| {
        let gv = g.eval_f64(m0[0][0] * x + m0[0][1] * y, m0[1][0] * x + m0[1][1] * y);
        let fv = f.eval_f64(x, y);
        (gv.abs() > 1e-12 && fv.abs() > 1e-12).then_some(fv / gv)
    })?;
    let mut cands = Vec::new();
    if d % 2 == 1 {
        cands.push(ratio.signum() * ratio.abs().powf(1.0 / d as f64));
    } else if ratio > 0.0 {
        let mu = ratio.powf(1.0 / d as f64);
        cands.extend([mu, -mu]);
    }
    for mu in cands {
        let m = [[mu * m0[0][0], mu * m0[0][1]], [mu * m0[1][0], mu * m0[1][1]]];
        if oriented && det * mu * mu <= 0.0 {
            continue;
        }
        let got = substitute_f64(g, &m);
        let scale = f.terms().values().map(|c| rat::to_f64(c).abs()).fold(1.0, f64::max);
        let keys: std::collections::BTreeSet<(u32, u32)> = got.keys().copied().chain(f.support()).collect();
        if keys.iter().all(|k| {
            (got.get(k).copied().unwrap_or(0.0) - rat::to_f64(&f.coeff(k.0, k.1))).abs() <= 1e-8 * scale
        }) {
            return Some(m);
        }
    }
    None
}

/// Forms `c·q^k` with `q` definite quadratic: matched through Cholesky factors.
fn definite_match(f: &BiPoly, g: &BiPoly, d: u32, oriented: bool) -> Option<[[f64; 2]; 2]> {
    let split = |h: &BiPoly| -> Option<([f64; 3], f64)> {
        let (factors, inf) = projective_factors(h);
        if inf > 0 || factors.len() != 1 || factors[0].0.degree() != Some(2) {
            return None;
        }
        let q = &factors[0].0;
        let (a, b, c) = (rat::to_f64(&q.coeff(2)), rat::to_f64(&q.coeff(1)), rat::to_f64(&q.coeff(0)));
        if b * b - 4.0 * a * c >= 0.0 {
            return None;
        }
        let k = factors[0].1 as i32;
        let lead = rat::to_f64(&h.coeff(d, 0)) / a.powi(k);
        // Normalise q to be positive definite.
        let (q3, lead) = if a < 0.0 { ([-a, -b, -c], lead * (-1f64).powi(k)) } else { ([a, b, c], lead) };
        Some((q3, lead))
    };
    let (qf, cf) = split(f)?;
    let (qg, cg) = split(g)?;
    if cf.signum() != cg.signum() {
        return None;
    }
    // q(v) = |R v|^2 with R upper triangular.
    let chol = |q: [f64; 3]| -> [[f64; 2]; 2] {
        let r00 = q[0].sqrt();
        let r01 = q[1] / (2.0 * r00);
        let r11 = (q[2] - r01 * r01).sqrt();
        [[r00, r01], [0.0, r11]]
    };
    let rf = chol(qf);
    let rg = chol(qg);
    let rg_inv = {
        let det = rg[0][0] * rg[1][1];
        [[rg[1][1] / det, -rg[0][1] / det], [0.0, rg[0][0] / det]]
    };
    let mu = (cf / cg).powf(1.0 / d as f64);
    let mul = |a: [[f64; 2]; 2], b: [[f64; 2]; 2]| {
        let mut o = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                o[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        o
    };
    let mut m = mul(rg_inv, rf);
    if oriented && m[0][0] * m[1][1] - m[0][1] * m[1][0] < 0.0 {
        // A reflection between the factors keeps q and reverses orientation.
        m = mul(rg_inv, mul([[1.0, 0.0], [0.0, -1.0]], rf));
    }
    Some([[mu * m[0][0], mu * m[0][1]], [mu * m[1][0], mu * m[1][1]]])
}

/// `c·(x⁴ + t x²y² + y⁴)`, as `(c, t)`.
fn kt_shape(f: &BiPoly) -> Option<(Rat, Rat)> {
    let c = f.coeff(4, 0);
    if c.is_zero() || f.coeff(0, 4) != c || f.terms().keys().any(|k| !matches!(k, (4, 0) | (2, 2) | (0, 4))) {
        return None;
    }
    Some((c.clone(), f.coeff(2, 2) / c))
}

fn matrix_json(m: &[[f64; 2]; 2]) -> Value {
    json!([[m[0][0], m[0][1]], [m[1][0], m[1][1]]])
}

/// Classification of weighted homogeneous germs up to bi-Lipschitz or C¹
/// equivalence. With `oriented`, certificates must preserve orientation.
pub fn classify_weighted(f: &BiPoly, g: &BiPoly, relation: Relation, oriented: bool) -> Result<Verdict> {
    let wf = weighted_data(f).ok_or_else(|| GermError::InvalidInput("f is not weighted homogeneous".into()))?;
    let wg = weighted_data(g).ok_or_else(|| GermError::InvalidInput("g is not weighted homogeneous".into()))?;
    let (mf, mg) = (monomial_like(f)?, monomial_like(g)?);
    match (normal_form(f, &mf), normal_form(g, &mg)) {
        (Some(a), Some(b)) => {
            return Ok(if a == b {
                Verdict::Equivalent(json!({ "kind": "monomial-like", "normal_form": { "k": a.0, "l": a.1, "sign": a.2 } }))
            } else {
                Verdict::NotEquivalent("monomial-like normal forms differ".into())
            });
        }
        (Some(_), None) | (None, Some(_)) => {
            return Ok(Verdict::NotEquivalent("exactly one germ is monomial-like".into()));
        }
        (None, None) => {}
    }
    if (wf.p, wf.q, wf.d, wf.swapped) != (wg.p, wg.q, wg.d, wg.swapped) {
        return Ok(Verdict::NotEquivalent("weights or weighted degree differ".into()));
    }
    let cert = certificate(f, g, &wf, &wg, oriented)?;
    Ok(match (cert, relation) {
        (Some(c), _) => Verdict::Equivalent(c),
        (None, Relation::C1) => Verdict::NotEquivalent("no map of the required form relates f and g".into()),
        (None, Relation::BiLipschitz) => {
            Verdict::Inconclusive("same weights and degree, but no certificate from the classification".into())
        }
    })
}

fn certificate(f: &BiPoly, g: &BiPoly, wf: &WeightedData, wg: &WeightedData, oriented: bool) -> Result<Option<Value>> {
    let limits = Limits::default();
    if wf.p == 1 && wf.q == 1 {
        if let (Some((cf, t1)), Some((cg, t2))) = (kt_shape(f), kt_shape(g)) {
            if rat::sign(&cf) == rat::sign(&cg) {
                let rel = t1 == t2 || (&t1 + rat::int(2)) * (&t2 + rat::int(2)) == rat::int(16);
                if !rel {
                    return Ok(None);
                }
                let m = linear_match(f, g, oriented);
                return Ok(Some(json!({
                    "kind": "quartic-family",
                    "t1": rat::fmt_rat(&t1),
                    "t2": rat::fmt_rat(&t2),
                    "matrix": m.as_ref().map(matrix_json),
                })));
            }
        }
        return Ok(linear_match(f, g, oriented).map(|m| json!({ "kind": "linear", "matrix": matrix_json(&m) })));
    }
    let (f0, g0, sf, sg) = if wf.p == 1 && !wf.swapped {
        let (sf, sg) = (centering_shift(wf), centering_shift(wg));
        (shear_x(f, &sf, wf.q), shear_x(g, &sg, wg.q), sf, sg)
    } else {
        (f.clone(), g.clone(), Rat::zero(), Rat::zero())
    };
    let Some((c1, c2)) = diagonal_match(&f0, &g0, oriented, &limits)? else {
        return Ok(None);
    };
    // f(x, y) = g(c1 x - b y^q, c2 y) with b = s_g c2^q - c1 s_f.
    let b = Num::Q(sg).mul(&num_pow(&c2, wf.q as usize)).sub(&c1.mul(&Num::Q(sf)));
    let mut v = json!({
        "kind": "weighted-scaling",
        "c1": c1.to_f64(),
        "c2": c2.to_f64(),
        "b": b.to_f64(),
        "q": wf.q,
    });
    if wf.swapped {
        v["swapped"] = json!(true);
    }
    Ok(Some(v))
}

/// `f_m` and `g_m` linearly equivalent, for C¹-equivalent germs.
pub fn initial_forms_linearly_equivalent(f: &BiPoly, g: &BiPoly) -> Option<[[f64; 2]; 2]> {
    linear_match(&f.initial_form(), &g.initial_form(), false)
}
