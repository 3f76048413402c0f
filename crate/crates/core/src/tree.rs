//! Newton-Puiseux root tracking, Puiseux characteristic data and the real
//! tree model, with canonical codes for deciding blow-analytic equivalence.
//!
//! The tree is built in a mini-regular chart `F(x, y) = f(x, y + c x)`. The
//! upper half-plane is read directly from `F`; the lower half-plane from
//! `F(-x, -y)`, a rotation by π, so left/right marks keep one orientation
//! throughout.

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::arith::rat::{self, Rat};
use crate::arith::{isolate_real_roots, BiPoly, Field, Limits, Num, UniPoly};
use crate::polygon::{edge_poly_of, polygon_of, EdgePoly};
use crate::puiseux::{substitute, DemiBranch, FracSeries};
use crate::{GermError, Result};

/// `(c, f(x, y + c x))` with `c ≥ 0` minimal such that the result is
/// mini-regular in `x`.
pub fn mini_regularize(f: &BiPoly) -> Result<(i64, BiPoly)> {
    if f.is_zero() {
        return Err(GermError::InvalidInput("f is zero".into()));
    }
    let fm = f.initial_form();
    let mut c = 0i64;
    while fm.eval(&Rat::one(), &rat::int(c)).is_zero() {
        c += 1;
    }
    if c == 0 {
        return Ok((0, f.clone()));
    }
    let (one, zero) = (Rat::one(), Rat::zero());
    Ok((c, f.linear_substitute(&one, &zero, &rat::int(c), &one)))
}

/// Which half-plane a root lives over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Half {
    /// `y ≥ 0`, roots of `f`.
    Pos,
    /// `y ≥ 0` for `f(x, -y)`.
    Neg,
}

/// Position of a trunk's coefficient relative to the marked 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Position {
    Left,
    Zero,
    Right,
}

impl Position {
    fn of(s: i8) -> Self {
        match s {
            s if s < 0 => Position::Left,
            0 => Position::Zero,
            _ => Position::Right,
        }
    }

    pub fn symbol(&self) -> &'static str {
        match self {
            Position::Left => "L",
            Position::Zero => "0",
            Position::Right => "R",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Trunk {
    pub multiplicity: usize,
    /// `None` when the bar carries no 0-mark: only the rank is meaningful.
    pub position: Option<Position>,
    pub coefficient: Num,
    pub child: Bar,
}

/// A bunch of roots sharing the horn truncation `horn` up to `height`.
#[derive(Clone, Debug)]
pub struct Bar {
    /// `None` for a bar of infinite height (a single real root).
    pub height: Option<Rat>,
    pub multiplicity: usize,
    pub zero_marked: bool,
    /// Roots of the edge polynomial that are not real.
    pub truncated: usize,
    pub trunks: Vec<Trunk>,
    /// Common truncation of the bunch (all exponents below `height`).
    pub horn: FracSeries,
    /// Height of the parent bar (1 for a direction).
    pub base: Rat,
    /// Order of `f` along the bunch at `base`.
    pub ord_start: Rat,
    /// Sign of the leading coefficient of `f` along the bunch between
    /// `base` and `height`.
    pub lc_sign: i8,
    /// Edge polynomial at the bar.
    pub edge: Option<EdgePoly>,
    /// The edge polynomial has a real root of odd multiplicity.
    pub odd_real_root: bool,
}

#[derive(Clone, Debug)]
pub struct DirectionTree {
    /// Root direction `x = slope·y` in the chart of its half.
    pub slope: Num,
    pub upper: bool,
    pub multiplicity: usize,
    pub bar: Bar,
}

/// Real tree model: direction subtrees in counterclockwise order starting
/// from the positive x-axis, `sectors[i]` the sign of `f` between direction
/// `i` and `i + 1` (cyclically).
#[derive(Clone, Debug)]
pub struct RealTree {
    pub source: BiPoly,
    pub shear: i64,
    /// `F` for the upper half, `F(-x,-y)` for the lower half.
    pub charts: [BiPoly; 2],
    pub ground: Vec<DirectionTree>,
    pub sectors: Vec<i8>,
    /// Sign of `f` near 0 when there is no real direction.
    pub sign: i8,
}

/// Multiplicity of `a` as a root of `p` (0 if not a root).
fn root_multiplicity(p: &UniPoly<Num>, a: &Num) -> usize {
    let mut q = p.clone();
    let mut k = 0;
    while !q.is_zero() && q.eval(a).vanishes() {
        q = q.derivative();
        k += 1;
    }
    k
}

/// Sign of the lowest nonvanishing Taylor coefficient of `p` at `a`,
/// of order `k`.
fn taylor_sign(p: &UniPoly<Num>, a: &Num, k: usize) -> i8 {
    let mut q = p.clone();
    for _ in 0..k {
        q = q.derivative();
    }
    q.eval(a).sign()
}

fn lift_rat(p: &UniPoly<Rat>) -> UniPoly<Num> {
    UniPoly::new(p.coeffs().iter().map(|c| Num::Q(c.clone())).collect())
}

fn fmt_height(h: &Option<Rat>) -> String {
    h.as_ref().map_or_else(|| "inf".to_string(), rat::fmt_rat)
}

fn sign_str(s: i8) -> &'static str {
    if s < 0 {
        "-"
    } else {
        "+"
    }
}

/// State of a bunch before its next splitting.
struct Bunch {
    prefix: FracSeries,
    base: Rat,
    m: usize,
    m_red: usize,
    ord_start: Rat,
    lc_sign: i8,
}

struct Chart<'a> {
    f: &'a BiPoly,
    f_red: &'a BiPoly,
    limits: &'a Limits,
}

impl Chart<'_> {
    /// Smallest edge exponent above `h` among the faces over `[0, m]`.
    fn next_xi(&self, g: &crate::puiseux::FracBiPoly, h: &Rat, m: usize) -> Result<Option<Rat>> {
        let p = polygon_of(g)?;
        Ok(p
            .edges()
            .into_iter()
            .filter(|e| &e.xi > h && e.right.0 as usize <= m)
            .map(|e| e.xi)
            .min())
    }

    fn build(&self, b: Bunch) -> Result<Bar> {
        // Chain steps keep `ord` linear with slope `m`, so the bar records the
        // bunch's original base.
        let Bunch { mut prefix, base: chain_base, m, m_red, ord_start, lc_sign } = b;
        let mut base = chain_base.clone();
        loop {
            if m_red == 1 {
                return Ok(Bar {
                    height: None,
                    multiplicity: m,
                    zero_marked: false,
                    truncated: 0,
                    trunks: Vec::new(),
                    horn: prefix,
                    base: chain_base,
                    ord_start: ord_start.clone(),
                    lc_sign,
                    edge: None,
                    odd_real_root: false,
                });
            }
            let g = substitute(self.f, &prefix);
            let xi = self.next_xi(&g, &base, m)?.ok_or_else(|| {
                GermError::Undetermined("bunch with several roots has no splitting face".into())
            })?;
            let p = edge_poly_of(&g, &xi)?;
            let roots = Num::real_roots(&p.poly, self.limits)?;
            if roots.len() == 1 && roots[0].1 == m {
                // One distinct root: the bunch continues along a longer truncation.
                prefix = prefix.add(&FracSeries::monomial(roots[0].0.clone(), xi.clone()));
                base = xi;
                continue;
            }
            let p_red = edge_poly_of(&substitute(self.f_red, &prefix), &xi)?;
            let zero_marked = !prefix.denominator().is_multiple_of(rat::den_u64(&xi));
            let mut trunks = Vec::new();
            let mut real = 0;
            for (z, s) in &roots {
                real += s;
                let child = Bunch {
                    prefix: prefix.add(&FracSeries::monomial(z.clone(), xi.clone())),
                    base: xi.clone(),
                    m: *s,
                    m_red: root_multiplicity(&p_red.poly, z),
                    ord_start: p.ord.clone(),
                    lc_sign: taylor_sign(&p.poly, z, *s),
                };
                trunks.push(Trunk {
                    multiplicity: *s,
                    position: zero_marked.then(|| Position::of(z.sign())),
                    coefficient: z.clone(),
                    child: self.build(child)?,
                });
            }
            return Ok(Bar {
                height: Some(xi),
                multiplicity: m,
                zero_marked,
                truncated: m - real,
                trunks,
                horn: prefix,
                base: chain_base,
                ord_start: ord_start.clone(),
                lc_sign,
                odd_real_root: roots.iter().any(|(_, s)| s % 2 == 1),
                edge: Some(p),
            });
        }
    }

    /// Real directions `x = a·y` of the chart with their bunches, by
    /// decreasing `a`.
    fn directions(&self) -> Result<Vec<DirectionTree>> {
        let fm = lift_rat(&self.f.initial_form().dehomogenize_y());
        let fm_red = lift_rat(&self.f_red.initial_form().dehomogenize_y());
        let m = self.f.order().unwrap_or(0);
        let mut out = Vec::new();
        for (a, mv) in isolate_real_roots(&self.f.initial_form().dehomogenize_y())? {
            let bunch = Bunch {
                prefix: FracSeries::monomial(a.clone(), Rat::one()),
                base: Rat::one(),
                m: mv,
                m_red: root_multiplicity(&fm_red, &a),
                ord_start: rat::int(m as i64),
                lc_sign: taylor_sign(&fm, &a, mv),
            };
            out.push(DirectionTree { slope: a, upper: true, multiplicity: mv, bar: self.build(bunch)? });
        }
        out.reverse();
        Ok(out)
    }
}

fn chart_tree(f: &BiPoly, limits: &Limits) -> Result<Vec<DirectionTree>> {
    let f_red = f.squarefree_part();
    Chart { f, f_red: &f_red, limits }.directions()
}

/// Rational strictly between two distinct reals.
fn rational_between(a: &Num, b: &Num) -> Rat {
    let mut prec = 8;
    loop {
        let (alo, ahi) = a.enclose(prec);
        let (blo, bhi) = b.enclose(prec);
        if ahi < blo {
            return rat::simple_between(&ahi, &blo);
        }
        if bhi < alo {
            return rat::simple_between(&bhi, &alo);
        }
        prec += 8;
    }
}

pub fn build_real_tree(f: &BiPoly) -> Result<RealTree> {
    build_real_tree_with(f, &Limits::default())
}

pub fn build_real_tree_with(f: &BiPoly, limits: &Limits) -> Result<RealTree> {
    let (shear, upper) = mini_regularize(f)?;
    let lower = upper.reflect(-1, -1);
    let mut ground = chart_tree(&upper, limits)?;
    let mut low = chart_tree(&lower, limits)?;
    for d in &mut low {
        d.upper = false;
    }
    let n_up = ground.len();
    ground.extend(low);
    let fm_up = upper.initial_form();
    let fm_low = lower.initial_form();
    let sign_at = |p: &BiPoly, x: Rat, y: Rat| rat::sign(&p.eval(&x, &y));
    let n = ground.len();
    let mut sectors = Vec::with_capacity(n);
    for i in 0..n {
        let j = (i + 1) % n;
        let s = if i + 1 == n_up && n_up < n {
            // From the last upper direction to the first lower one crosses -x.
            sign_at(&fm_up, rat::int(-1), Rat::zero())
        } else if j == 0 {
            // Wrapping through +x.
            sign_at(&fm_up, Rat::one(), Rat::zero())
        } else if i < n_up {
            sign_at(&fm_up, rational_between(&ground[i].slope, &ground[j].slope), Rat::one())
        } else {
            sign_at(&fm_low, rational_between(&ground[i].slope, &ground[j].slope), Rat::one())
        };
        sectors.push(s);
    }
    let sign = sign_at(&fm_up, Rat::one(), Rat::zero());
    Ok(RealTree { source: f.clone(), shear, charts: [upper, lower], ground, sectors, sign })
}

/// Which mode canonical codes are taken in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    OrientationPreserving,
    Free,
}

fn bar_json(b: &Bar, full: bool) -> Value {
    let mut v = json!({
        "height": fmt_height(&b.height),
        "multiplicity": b.multiplicity,
        "zero_marked": b.zero_marked,
        "truncated": b.truncated,
        "trunks": b.trunks.iter().map(|t| json!({
            "multiplicity": t.multiplicity,
            "position": t.position.map(|p| p.symbol()),
            "child": bar_json(&t.child, full),
        })).collect::<Vec<_>>(),
    });
    if full {
        v["horn"] = json!(b.horn.to_string());
        if let Some(e) = &b.edge {
            v["edge_poly"] = json!(e.poly.to_string());
        }
    }
    v
}

impl RealTree {
    pub fn to_json(&self) -> Value {
        json!({
            "shear": self.shear,
            "sign": sign_str(self.sign),
            "ground": self.ground.iter().zip(&self.sectors).map(|(d, s)| json!({
                "half": if d.upper { "upper" } else { "lower" },
                "slope": format!("{:.6}", d.slope.to_f64()),
                "multiplicity": d.multiplicity,
                "bar": bar_json(&d.bar, true),
                "sector_after": sign_str(*s),
            })).collect::<Vec<_>>(),
        })
    }

    /// Rotation-minimal encoding of the cyclic ground list.
    fn code_oriented(&self) -> String {
        if self.ground.is_empty() {
            return json!({ "sign": sign_str(self.sign) }).to_string();
        }
        let items: Vec<String> = self
            .ground
            .iter()
            .zip(&self.sectors)
            .map(|(d, s)| json!([bar_json(&d.bar, false), sign_str(*s)]).to_string())
            .collect();
        let n = items.len();
        (0..n)
            .map(|r| (0..n).map(|k| items[(r + k) % n].clone()).collect::<Vec<_>>())
            .min()
            .map(|v| format!("[{}]", v.join(",")))
            .unwrap()
    }

    /// Multiline drawing: bars as rules `── h=…`, trunks as `|` strokes with
    /// multiplicity and L/0/R marks.
    pub fn render_ascii(&self) -> String {
        fn bar(out: &mut String, b: &Bar, indent: usize) {
            let pad = " ".repeat(indent);
            out.push_str(&format!(
                "{pad}── h={} m={}{}{}\n",
                fmt_height(&b.height),
                b.multiplicity,
                if b.zero_marked { " [0]" } else { "" },
                if b.truncated > 0 { format!(" truncated={}", b.truncated) } else { String::new() },
            ));
            for t in &b.trunks {
                let mark = t.position.map_or("·", |p| p.symbol());
                out.push_str(&format!("{pad}   | x{} {}\n", t.multiplicity, mark));
                bar(out, &t.child, indent + 5);
            }
        }
        let mut out = String::from("ground\n");
        if self.ground.is_empty() {
            out.push_str(&format!("  sign {}\n", sign_str(self.sign)));
        }
        for (d, s) in self.ground.iter().zip(&self.sectors) {
            out.push_str(&format!(
                "  direction {} x = {:.4}·y (m={})\n",
                if d.upper { "y>0" } else { "y<0" },
                if d.upper { d.slope.to_f64() } else { 0.0 - d.slope.to_f64() },
                d.multiplicity
            ));
            bar(&mut out, &d.bar, 4);
            out.push_str(&format!("  sector {}\n", sign_str(*s)));
        }
        out
    }
}

/// Canonical code; in free mode the minimum with the tree of `f(-x, y)`.
pub fn canonical_code(t: &RealTree, mode: Mode) -> Result<Vec<u8>> {
    let own = t.code_oriented();
    let code = match mode {
        Mode::OrientationPreserving => own,
        Mode::Free => {
            let other = build_real_tree(&t.source.reflect(-1, 1))?.code_oriented();
            own.min(other)
        }
    };
    Ok(code.into_bytes())
}

pub fn blow_analytic_equivalent(f: &BiPoly, g: &BiPoly, mode: Mode) -> Result<bool> {
    let cf = canonical_code(&build_real_tree(f)?, Mode::OrientationPreserving)?;
    let candidates: Vec<BiPoly> = match mode {
        Mode::OrientationPreserving => vec![g.clone()],
        Mode::Free => vec![g.clone(), g.reflect(-1, 1), g.reflect(1, -1), g.reflect(-1, -1)],
    };
    for h in candidates {
        if canonical_code(&build_real_tree(&h)?, Mode::OrientationPreserving)? == cf {
            return Ok(true);
        }
    }
    Ok(false)
}

/// One root of `f` over a half-plane.
#[derive(Clone, Debug)]
pub struct Root {
    pub branch: DemiBranch,
    pub multiplicity: usize,
    /// Real analytic root; otherwise the maximal real truncation of
    /// non-real roots.
    pub real: bool,
}

/// Extend a determined real root by further single-root steps.
fn extend_root(f: &BiPoly, bar: &Bar, steps: usize, limits: &Limits) -> Result<FracSeries> {
    let mut prefix = bar.horn.clone();
    let mut h = bar.base.clone();
    let m = bar.multiplicity;
    for _ in 0..steps {
        let g = substitute(f, &prefix);
        if (0..m as u32).all(|k| g.row(k).is_zero()) {
            return Ok(prefix);
        }
        let poly = polygon_of(&g)?;
        let Some(xi) =
            poly.edges().into_iter().filter(|e| e.xi > h && e.right.0 as usize <= m).map(|e| e.xi).min()
        else {
            return Ok(prefix);
        };
        let p = edge_poly_of(&g, &xi)?;
        let roots = Num::real_roots(&p.poly, limits)?;
        match roots.as_slice() {
            [(z, s)] if *s == m => {
                prefix = prefix.add(&FracSeries::monomial(z.clone(), xi.clone()));
                h = xi;
            }
            _ => return Err(GermError::Undetermined("determined root split while extending".into())),
        }
    }
    let n = rat::int(prefix.denominator() as i64);
    let last = prefix.lowest_exponent().map_or(Rat::one(), |_| prefix.terms().last().unwrap().0.clone());
    let next = rat::max_rat(&last, &h).clone() + Rat::one() / n;
    Ok(prefix.truncate(&next))
}

fn collect_roots(f: &BiPoly, b: &Bar, limits: &Limits, out: &mut Vec<Root>) -> Result<()> {
    if b.height.is_none() {
        let series = extend_root(f, b, 8, limits)?;
        out.push(Root { branch: DemiBranch::new(series), multiplicity: b.multiplicity, real: true });
        return Ok(());
    }
    if b.truncated > 0 {
        out.push(Root {
            branch: DemiBranch::with_tail(b.horn.clone(), b.height.clone().unwrap()),
            multiplicity: b.truncated,
            real: false,
        });
    }
    for t in &b.trunks {
        collect_roots(f, &t.child, limits, out)?;
    }
    Ok(())
}

/// Roots of `f` (or of `f(x, -y)` for [`Half::Neg`]) as demi-branches over
/// `y ≥ 0`, with multiplicities summing to the order of `f`.
pub fn puiseux_roots(f: &BiPoly, half: Half) -> Result<Vec<Root>> {
    puiseux_roots_with(f, half, &Limits::default())
}

pub fn puiseux_roots_with(f: &BiPoly, half: Half, limits: &Limits) -> Result<Vec<Root>> {
    if !crate::polygon::is_mini_regular(f) {
        return Err(GermError::NotMiniRegular);
    }
    let f = match half {
        Half::Pos => f.clone(),
        Half::Neg => f.reflect(1, -1),
    };
    let dirs = chart_tree(&f, limits)?;
    let mut out = Vec::new();
    let real_dirs: usize = dirs.iter().map(|d| d.multiplicity).sum();
    let m = f.order().unwrap_or(0) as usize;
    if m > real_dirs {
        out.push(Root {
            branch: DemiBranch::with_tail(FracSeries::zero(), Rat::one()),
            multiplicity: m - real_dirs,
            real: false,
        });
    }
    for d in dirs.iter().rev() {
        collect_roots(&f, &d.bar, limits, &mut out)?;
    }
    Ok(out)
}

/// Puiseux characteristic pairs `(n_i, d_i)` with the signs of the
/// characteristic coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct CharSequence {
    pub pairs: Vec<(u64, u64)>,
    pub signs: Vec<i8>,
    /// Exponent beyond which the data does not determine further pairs.
    pub undetermined_beyond: Option<Rat>,
}

pub fn characteristic_data(g: &DemiBranch) -> Result<CharSequence> {
    if !g.is_allowable() {
        return Err(GermError::InvalidInput("branch is not allowable".into()));
    }
    let mut n_acc: u64 = 1;
    let mut pairs = Vec::new();
    let mut signs = Vec::new();
    for (e, c) in g.series.terms() {
        let den = rat::den_u64(e);
        if n_acc % den != 0 {
            let d = rat::lcm_u64(n_acc, den) / n_acc;
            let n = e * rat::int((n_acc * d) as i64);
            pairs.push((rat::floor_i64(&n) as u64, d));
            signs.push(c.sign());
            n_acc *= d;
        }
    }
    let undetermined_beyond = match (g.series.trunc(), &g.generic_tail) {
        (Some(t), Some(u)) => Some(rat::min_rat(t, u).clone()),
        (Some(t), None) => Some(t.clone()),
        (None, u) => u.clone(),
    };
    Ok(CharSequence { pairs, signs, undetermined_beyond })
}

/// `P₀(z) = z^k P̃₀(z^d)`: returns `(k, P̃₀)`, or `None` if `P₀` has no such
/// form.
pub fn lemma_puiseux_check<F: Field>(p0: &UniPoly<F>, d: usize) -> Option<(usize, UniPoly<F>)> {
    let p = p0.trimmed();
    if p.is_empty() || d == 0 {
        return None;
    }
    let cs = p.coeffs();
    let k = cs.iter().position(|c| !c.is_trivially_zero() && !c.vanishes())?;
    let mut out = Vec::new();
    for (i, c) in cs.iter().enumerate().skip(k) {
        if c.vanishes() {
            continue;
        }
        if (i - k) % d != 0 {
            return None;
        }
        let j = (i - k) / d;
        if out.len() <= j {
            out.resize(j + 1, F::zero_elem());
        }
        out[j] = c.clone();
    }
    Some((k, UniPoly::new(out)))
}

/// A horn `|x - λ_H(y)| ≤ N y^ξ`.
#[derive(Clone, Debug)]
pub struct Horn {
    pub truncation: FracSeries,
    pub xi: Rat,
}

/// Outcome of [`root_horn_test`]: `Some((h(B), m_B))` for a root horn.
pub fn root_horn_test(f: &BiPoly, h: &Horn) -> Result<Option<(Rat, usize)>> {
    if !crate::polygon::is_mini_regular(f) {
        return Err(GermError::NotMiniRegular);
    }
    if h.truncation.terms().iter().any(|(e, _)| e >= &h.xi) {
        return Err(GermError::InvalidInput("horn truncation reaches its exponent".into()));
    }
    let p = crate::polygon::edge_polynomial(f, &DemiBranch::new(h.truncation.clone()), &h.xi)?;
    if p.poly.distinct_complex_root_count() >= 2 {
        Ok(Some((h.xi.clone(), p.poly.degree().unwrap_or(0))))
    } else {
        Ok(None)
    }
}
