//! Floating-point companion: critical values, critical-value matching for
//! two-parameter families, the conjugacy φ = Q⁻¹∘P and sampled checks of
//! σ(x, y) = (y^ξ φ(x / y^ξ), y).
//!
//! Root and inverse solves use bisection only.

use crate::arith::{rat, BiPoly, Rat};
use crate::{GermError, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Dense polynomial with `f64` coefficients, constant term first.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatPoly {
    coeffs: Vec<f64>,
}

impl FloatPoly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        assert!(coeffs.iter().all(|c| c.is_finite()), "non-finite coefficient");
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    /// `f(z, 1)` for a weighted homogeneous `f`.
    pub fn from_bipoly(f: &BiPoly) -> Self {
        Self::new(f.dehomogenize_y().to_f64s())
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, z: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect())
    }

    fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    /// Cauchy bound on the absolute value of real roots.
    fn root_bound(&self) -> f64 {
        let lc = self.leading().abs();
        let n = self.coeffs.len().saturating_sub(1);
        1.0 + self.coeffs[..n].iter().map(|c| c.abs() / lc).fold(0.0, f64::max)
    }

    /// `Σ |c_k| |z|^k`, the scale of rounding error in `eval(z)`.
    fn magnitude(&self, z: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * z.abs() + c.abs())
    }

    /// Distinct real roots, ascending.
    pub fn real_roots(&self) -> Vec<f64> {
        match self.degree() {
            None | Some(0) => Vec::new(),
            Some(1) => vec![-self.coeffs[0] / self.coeffs[1]],
            Some(_) => {
                let bound = self.root_bound();
                let mut knots = vec![-bound];
                knots.extend(self.derivative().real_roots().into_iter().filter(|c| c.abs() < bound));
                knots.push(bound);
                let mut out: Vec<f64> = Vec::new();
                let push = |r: f64, out: &mut Vec<f64>| {
                    if out.last().map_or(true, |l| r - l > 1e-9 * (1.0 + r.abs())) {
                        out.push(r);
                    }
                };
                for w in knots.windows(2) {
                    let (a, b) = (w[0], w[1]);
                    let (fa, fb) = (self.eval(a), self.eval(b));
                    if fa.abs() <= 1e-13 * self.magnitude(a) {
                        push(a, &mut out);
                    }
                    if fa * fb < 0.0 {
                        push(bisect(|z| self.eval(z), a, b), &mut out);
                    }
                }
                out
            }
        }
    }
}

/// Root of `f` on `[a, b]` given a sign change, to full precision.
fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let sa = f(a).signum();
    loop {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            return m;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == sa {
            a = m;
        } else {
            b = m;
        }
    }
}

/// Critical points of `p` with their values, ascending.
pub fn critical_data(p: &FloatPoly) -> Vec<(f64, f64)> {
    p.derivative().real_roots().into_iter().map(|z| (z, p.eval(z))).collect()
}

/// Critical points where `p′` changes sign.
pub fn extrema(p: &FloatPoly) -> Vec<(f64, f64)> {
    let d = p.derivative();
    let crit = critical_data(p);
    if crit.is_empty() {
        return crit;
    }
    let pts: Vec<f64> = crit.iter().map(|c| c.0).collect();
    let probe = |i: usize| -> f64 {
        // A point strictly between consecutive critical points.
        let lo = if i == 0 { pts[0] - 1.0 } else { pts[i - 1] };
        let hi = if i == pts.len() { pts[pts.len() - 1] + 1.0 } else { pts[i] };
        d.eval(0.5 * (lo + hi))
    };
    crit.iter()
        .enumerate()
        .filter(|(i, _)| probe(*i) * probe(i + 1) < 0.0)
        .map(|(_, c)| *c)
        .collect()
}

/// Two-parameter families with a scaling symmetry
/// `Q_{a,b}(αz) = α^d Q_{a/α^u, b/α^v}(z)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// `z(z³ − a)(z³ − b)`, subject to `0 < a < b`.
    TwoCubics,
    /// `z⁴(z³ + a)(z⁶ + b)`, subject to `a, b > 0` and `100a² < 273b`.
    Tridecic,
}

impl Family {
    pub fn poly(self, a: f64, b: f64) -> FloatPoly {
        match self {
            Family::TwoCubics => {
                let mut c = vec![0.0; 8];
                c[7] = 1.0;
                c[4] = -(a + b);
                c[1] = a * b;
                FloatPoly::new(c)
            }
            Family::Tridecic => {
                let mut c = vec![0.0; 14];
                c[13] = 1.0;
                c[10] = a;
                c[7] = b;
                c[4] = a * b;
                FloatPoly::new(c)
            }
        }
    }

    pub fn admissible(self, a: f64, b: f64) -> bool {
        match self {
            Family::TwoCubics => 0.0 < a && a < b,
            Family::Tridecic => a > 0.0 && b > 0.0 && 100.0 * a * a < 273.0 * b,
        }
    }

    /// `(d, u, v)` of the scaling symmetry.
    fn weights(self) -> (i32, i32, i32) {
        match self {
            Family::TwoCubics => (7, 3, 3),
            Family::Tridecic => (13, 3, 6),
        }
    }

    /// Non-zero critical values at extrema, by ascending critical point.
    pub fn values(self, a: f64, b: f64) -> Vec<f64> {
        let p = self.poly(a, b);
        let scale = p.coeffs().iter().map(|c| c.abs()).fold(0.0, f64::max);
        extrema(&p).into_iter().map(|c| c.1).filter(|v| v.abs() > 1e-12 * scale).collect()
    }

    /// The family member `(a, b)` rescaled so its values are multiplied by `s`.
    fn rescale(self, a: f64, b: f64, s: f64) -> (f64, f64) {
        let (d, u, v) = self.weights();
        let alpha = s.signum() * s.abs().powf(1.0 / d as f64);
        (a * alpha.powi(u), b * alpha.powi(v))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MatchResult {
    pub a: f64,
    pub b: f64,
    pub values: Vec<f64>,
    pub residual: f64,
}

/// Finds `(a, b)` whose critical values equal `target`.
///
/// The shape is solved first with `b = 1` fixed: `a ↦` the ratio of the
/// critical values is matched by bisection on a scanned bracket. The scaling
/// symmetry then fixes the magnitude.
pub fn match_critical_values(target: &[f64], family: Family, tol: f64) -> Result<MatchResult> {
    let (a0, b0) = match (family, target.len()) {
        (Family::Tridecic, 1) => (1.0, 1.0),
        (Family::TwoCubics, 2) => {
            let (t1, t2) = (target[0], target[1]);
            let h = |a: f64| {
                let v = family.values(a, 1.0);
                if v.len() == 2 {
                    Some(v[0] * t2 - v[1] * t1)
                } else {
                    None
                }
            };
            // Geometric near 0, uniform elsewhere.
            let mut grid: Vec<f64> = (9..40).rev().map(|j| 0.5f64.powi(j)).collect();
            grid.extend((1..256).map(|k| k as f64 / 256.0));
            let mut bracket = None;
            for w in grid.windows(2) {
                if let (Some(x), Some(y)) = (h(w[0]), h(w[1])) {
                    if x * y <= 0.0 {
                        bracket = Some((w[0], w[1]));
                        break;
                    }
                }
            }
            let (mut lo, mut hi) = bracket.ok_or_else(|| {
                GermError::Undetermined(format!("no sign change for a in [2^-39, 255/256] with b = 1, target {target:?}"))
            })?;
            let s_lo = h(lo).unwrap().signum();
            while hi - lo > tol {
                let m = 0.5 * (lo + hi);
                match h(m) {
                    Some(v) if v.signum() == s_lo => lo = m,
                    Some(_) => hi = m,
                    None => return Err(GermError::Undetermined(format!("critical points merge at a = {m}"))),
                }
            }
            (0.5 * (lo + hi), 1.0)
        }
        _ => {
            return Err(GermError::InvalidInput(format!(
                "{family:?} matches {} critical values, got {}",
                if family == Family::Tridecic { 1 } else { 2 },
                target.len()
            )))
        }
    };
    let v0 = family.values(a0, b0);
    if v0.len() != target.len() || v0[0] == 0.0 {
        return Err(GermError::Undetermined(format!("shape ({a0}, {b0}) has critical values {v0:?}")));
    }
    let (a, b) = family.rescale(a0, b0, target[0] / v0[0]);
    if !family.admissible(a, b) {
        return Err(GermError::Undetermined(format!("solution ({a}, {b}) violates the constraints")));
    }
    let values = family.values(a, b);
    if values.len() != target.len() {
        return Err(GermError::Undetermined(format!("rescaled member has critical values {values:?}")));
    }
    let residual = values.iter().zip(target).map(|(v, t)| (v - t).abs()).fold(0.0, f64::max);
    Ok(MatchResult { a, b, values, residual })
}

/// The increasing map φ with `P = Q∘φ`, evaluated piecewise by bisection.
#[derive(Clone, Debug)]
pub struct ConjugacyMap {
    pub p: FloatPoly,
    pub q: FloatPoly,
    pub p_breaks: Vec<f64>,
    pub q_breaks: Vec<f64>,
    pub xi: Rat,
    identical: bool,
}

/// Builds φ = Q⁻¹∘P. Rejects pairs whose extrema, critical values or end
/// behaviour differ.
pub fn build_phi(p: &FloatPoly, q: &FloatPoly, xi: Rat) -> Result<ConjugacyMap> {
    let (dp, dq) = match (p.degree(), q.degree()) {
        (Some(a), Some(b)) if a >= 1 && b >= 1 => (a, b),
        _ => return Err(GermError::InvalidInput("P and Q must be non-constant".into())),
    };
    if dp % 2 != dq % 2 || p.leading().signum() != q.leading().signum() {
        return Err(GermError::InvalidInput("P and Q have different end behaviour".into()));
    }
    let (ep, eq) = (extrema(p), extrema(q));
    if ep.len() != eq.len() {
        return Err(GermError::InvalidInput(format!("{} extrema against {}", ep.len(), eq.len())));
    }
    for (a, b) in ep.iter().zip(&eq) {
        if (a.1 - b.1).abs() > 1e-9 * (1.0 + a.1.abs()) {
            return Err(GermError::InvalidInput(format!("critical value {} against {}", a.1, b.1)));
        }
    }
    Ok(ConjugacyMap {
        p: p.clone(),
        q: q.clone(),
        p_breaks: ep.iter().map(|e| e.0).collect(),
        q_breaks: eq.iter().map(|e| e.0).collect(),
        xi,
        identical: p == q,
    })
}

impl ConjugacyMap {
    /// Index of the monotone piece containing `z`.
    fn piece(breaks: &[f64], z: f64) -> usize {
        breaks.iter().take_while(|b| **b < z).count()
    }

    pub fn eval(&self, z: f64) -> f64 {
        if self.identical {
            return z;
        }
        let i = Self::piece(&self.p_breaks, z);
        if let Some(k) = self.p_breaks.iter().position(|b| *b == z) {
            return self.q_breaks[k];
        }
        let target = self.p.eval(z);
        let q = &self.q;
        let n = self.q_breaks.len();
        // Bracket of piece i of Q, widened outward on unbounded sides.
        let mut lo = if i == 0 { None } else { Some(self.q_breaks[i - 1]) };
        let mut hi = if i == n { None } else { Some(self.q_breaks[i]) };
        let anchor = match (lo, hi) {
            (Some(l), _) => l,
            (None, Some(h)) => h,
            (None, None) => 0.0,
        };
        let dir = |w: f64| q.eval(w) - target;
        let mut step = 1.0 + z.abs();
        if lo.is_none() {
            let mut l = anchor - step;
            while (dir(l) > 0.0) == (dir(hi.unwrap_or(anchor + step)) > 0.0) && step < 1e300 {
                step *= 2.0;
                l = anchor - step;
            }
            lo = Some(l);
        }
        step = 1.0 + z.abs();
        if hi.is_none() {
            let mut h = anchor + step;
            while (dir(h) > 0.0) == (dir(lo.unwrap()) > 0.0) && step < 1e300 {
                step *= 2.0;
                h = anchor + step;
            }
            hi = Some(h);
        }
        let (lo, hi) = (lo.unwrap(), hi.unwrap());
        let (flo, fhi) = (dir(lo), dir(hi));
        // Matched critical values agree only to tolerance: clamp to the ends.
        if flo * fhi > 0.0 {
            return if flo.abs() < fhi.abs() { lo } else { hi };
        }
        if flo == 0.0 {
            return lo;
        }
        if fhi == 0.0 {
            return hi;
        }
        bisect(dir, lo, hi)
    }

    /// `σ(x, y) = (y^ξ φ(x / y^ξ), y)` for `y > 0`.
    pub fn sigma(&self, x: f64, y: f64) -> (f64, f64) {
        let s = y.powf(rat::to_f64(&self.xi));
        (s * self.eval(x / s), y)
    }

    /// Strict-increase violations of φ on a grid of `n` points over `[-r, r]`.
    pub fn monotonicity_violations(&self, r: f64, n: usize) -> usize {
        let vals: Vec<f64> = (0..n).map(|k| self.eval(-r + 2.0 * r * k as f64 / (n - 1) as f64)).collect();
        vals.windows(2).filter(|w| w[1] <= w[0]).count()
    }

    /// `max |P(z) − Q(φ(z))| / (1 + |P(z)|)` on a grid.
    pub fn max_residual(&self, r: f64, n: usize) -> f64 {
        (0..n)
            .map(|k| {
                let z = -r + 2.0 * r * k as f64 / (n - 1) as f64;
                let pz = self.p.eval(z);
                (pz - self.q.eval(self.eval(z))).abs() / (1.0 + pz.abs())
            })
            .fold(0.0, f64::max)
    }

    /// Finite-difference bounds on `|φ′(z)|` and `|φ(z) − zφ′(z)|` over
    /// `|z| ≤ r`, sampled at `n` points.
    pub fn derivative_bounds(&self, r: f64, n: usize) -> (f64, f64) {
        let mut b1: f64 = 0.0;
        let mut b2: f64 = 0.0;
        for k in 0..n {
            let z = -r + 2.0 * r * k as f64 / (n - 1) as f64;
            let h = 1e-6 * (1.0 + z.abs());
            let d = (self.eval(z + h) - self.eval(z - h)) / (2.0 * h);
            b1 = b1.max(d.abs());
            b2 = b2.max((self.eval(z) - z * d).abs());
        }
        (b1, b2)
    }
}

/// Sampling region `0 < y ≤ y_max`, `x = z·y^ξ` with `|z| ≤ z_max`.
#[derive(Clone, Copy, Debug)]
pub struct Region {
    pub y_max: f64,
    pub z_max: f64,
}

impl Default for Region {
    fn default() -> Self {
        Self { y_max: 0.125, z_max: 10.0 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub residual_max: f64,
    pub lipschitz_min: f64,
    pub lipschitz_max: f64,
    pub monotonicity_violations: usize,
    pub samples: usize,
    pub seed: u64,
}

/// Weighted degree of `f` for weights `(ξ, 1)`: the least `iξ + j`.
fn weighted_degree(f: &BiPoly, xi: f64) -> f64 {
    f.terms().keys().map(|&(i, j)| i as f64 * xi + j as f64).fold(f64::INFINITY, f64::min)
}

/// Sampled check of `f = g∘σ`: relative residuals, empirical Lipschitz ratios
/// over nearby pairs, and monotonicity of φ. Measures; certifies nothing.
pub fn verify_conjugacy(f: &BiPoly, g: &BiPoly, phi: &ConjugacyMap, region: Region, n: usize, seed: u64) -> VerifyReport {
    let xi = rat::to_f64(&phi.xi);
    let d = weighted_degree(f, xi);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut res, mut lmin, mut lmax) = (0.0f64, f64::INFINITY, 0.0f64);
    for _ in 0..n {
        let y = region.y_max * (1.0 - rng.gen::<f64>());
        let z = region.z_max * (2.0 * rng.gen::<f64>() - 1.0);
        let x = z * y.powf(xi);
        let (sx, sy) = phi.sigma(x, y);
        let fp = f.eval_f64(x, y);
        res = res.max((fp - g.eval_f64(sx, sy)).abs() / (fp.abs() + y.powf(d)));

        let theta = rng.gen::<f64>() * std::f64::consts::TAU;
        let h = 1e-6 * y;
        let (x2, y2) = (x + h * theta.cos(), y + h * theta.sin());
        let (tx, ty) = phi.sigma(x2, y2);
        let ratio = (tx - sx).hypot(ty - sy) / h;
        lmin = lmin.min(ratio);
        lmax = lmax.max(ratio);
    }
    VerifyReport {
        residual_max: res,
        lipschitz_min: lmin,
        lipschitz_max: lmax,
        monotonicity_violations: phi.monotonicity_violations(region.z_max, 10_001),
        samples: n,
        seed,
    }
}
