//! Exact real fields: the rationals and towers of real algebraic extensions.
//!
//! An element of a tower level is a polynomial in that level's generator with
//! coefficients from lower levels. The generator is a real root of a
//! squarefree polynomial over the parent level, selected by an isolating
//! interval. The defining polynomial may shrink to a factor when an exact zero
//! test splits it; this, and interval refinement, are cached behind a mutex and
//! never change the value an element denotes.

use std::fmt;
use std::sync::{Arc, Mutex};

use num_traits::{One, Signed, Zero};

use super::rat::{self, Rat};
use super::upoly::{Isolated, UniPoly};
use crate::GermError;

/// An ordered field with exact sign and rational enclosures.
pub trait Field: Clone + fmt::Debug + Send + Sync + 'static {
    fn zero_elem() -> Self;
    fn one_elem() -> Self;
    fn from_rat(r: Rat) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Panics on zero.
    fn inv(&self) -> Self;
    /// Exact zero test.
    fn vanishes(&self) -> bool {
        self.sign() == 0
    }
    /// Cheap structural test; `false` does not imply nonzero.
    fn is_trivially_zero(&self) -> bool;
    fn sign(&self) -> i8;
    /// Rational interval containing the value, of width roughly `2^-prec`.
    fn enclose(&self, prec: u32) -> (Rat, Rat);
    fn as_rat(&self) -> Option<Rat>;
    fn to_f64(&self) -> f64 {
        let (lo, hi) = self.enclose(60);
        rat::to_f64(&((lo + hi) / rat::int(2)))
    }
    fn div(&self, o: &Self) -> Self {
        self.mul(&o.inv())
    }
}

impl Field for Rat {
    fn zero_elem() -> Self {
        Zero::zero()
    }
    fn one_elem() -> Self {
        One::one()
    }
    fn from_rat(r: Rat) -> Self {
        r
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Self {
        assert!(!Zero::is_zero(self), "inverse of zero");
        self.recip()
    }
    fn vanishes(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_trivially_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn sign(&self) -> i8 {
        rat::sign(self)
    }
    fn enclose(&self, _prec: u32) -> (Rat, Rat) {
        (self.clone(), self.clone())
    }
    fn as_rat(&self) -> Option<Rat> {
        Some(self.clone())
    }
    fn to_f64(&self) -> f64 {
        rat::to_f64(self)
    }
}

/// Resource limits for tower arithmetic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Maximum number of stacked algebraic extensions.
    pub max_tower_depth: usize,
    /// Bisections tried by interval arithmetic before the exact zero test.
    pub refine_cap: u32,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_tower_depth: 12, refine_cap: 256 }
    }
}

/// One level of an extension tower.
pub struct Ext {
    parent: Option<Arc<Ext>>,
    depth: usize,
    refine_cap: u32,
    state: Mutex<ExtState>,
}

#[derive(Clone)]
struct ExtState {
    minpoly: UniPoly<Num>,
    lo: Rat,
    hi: Rat,
    sign_lo: i8,
    /// Set once the generator is known to equal a lower-level value.
    exact: Option<Num>,
    /// Copies of this level rebuilt on top of other towers.
    rebased: Vec<Arc<Ext>>,
}

impl fmt::Debug for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let st = self.state.lock().unwrap();
        write!(f, "Ext(depth {}, {} in ({}, {}))", self.depth, st.minpoly, st.lo, st.hi)
    }
}

impl Ext {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn parent(&self) -> Option<&Arc<Ext>> {
        self.parent.as_ref()
    }

    /// Current defining polynomial over the parent level (monic, squarefree).
    pub fn minpoly(&self) -> UniPoly<Num> {
        self.state.lock().unwrap().minpoly.clone()
    }

    /// Current isolating interval of the generator.
    pub fn interval(&self) -> (Rat, Rat) {
        let st = self.state.lock().unwrap();
        (st.lo.clone(), st.hi.clone())
    }

    fn exact(&self) -> Option<Num> {
        self.state.lock().unwrap().exact.clone()
    }

    fn is_ancestor_of(self: &Arc<Self>, other: &Arc<Ext>) -> bool {
        let mut cur = other.parent.clone();
        while let Some(e) = cur {
            if Arc::ptr_eq(&e, self) {
                return true;
            }
            cur = e.parent.clone();
        }
        false
    }

    /// Bisect until the interval width is at most `w` or the generator is
    /// found to be rational.
    fn refine_to(&self, w: &Rat) {
        let mut st = self.state.lock().unwrap();
        while st.exact.is_none() && &(&st.hi - &st.lo) > w {
            let mid = (&st.lo + &st.hi) / rat::int(2);
            let s = st.minpoly.sign_at_rat(&mid);
            if s == 0 {
                st.exact = Some(Num::Q(mid));
            } else if s == st.sign_lo {
                st.lo = mid;
            } else {
                st.hi = mid;
            }
        }
    }

    fn set_minpoly(&self, m: UniPoly<Num>) {
        let m = m.monic();
        let mut st = self.state.lock().unwrap();
        if m.len() == 2 {
            st.exact = Some(m.coeff(0).neg());
        } else {
            st.sign_lo = m.sign_at_rat(&st.lo);
        }
        st.minpoly = m;
    }

    /// Enclosure of the generator.
    fn gen_enclosure(&self, prec: u32) -> (Rat, Rat) {
        if let Some(v) = self.exact() {
            return v.enclose(prec);
        }
        self.refine_to(&rat::pow2_neg(prec));
        match self.exact() {
            Some(v) => v.enclose(prec),
            None => self.interval(),
        }
    }
}

/// A real number in ℚ or in a tower of real algebraic extensions of ℚ.
#[derive(Clone)]
pub enum Num {
    Q(Rat),
    /// Polynomial in the generator of the extension, coefficients at lower levels.
    A(Arc<Ext>, Vec<Num>),
}

/// Real algebraic number over ℚ or over a tower level.
pub type RealAlg = Num;

impl fmt::Debug for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Num::Q(r) => write!(f, "{r}"),
            Num::A(e, c) => write!(f, "A[d{}]{:?}~{}", e.depth, c, self.to_f64()),
        }
    }
}

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Num::Q(r) => write!(f, "{r}"),
            Num::A(..) => write!(f, "~{:.6}", self.to_f64()),
        }
    }
}

impl PartialEq for Num {
    fn eq(&self, o: &Self) -> bool {
        Field::sub(self, o).vanishes()
    }
}

impl From<Rat> for Num {
    fn from(r: Rat) -> Self {
        Num::Q(r)
    }
}

fn level(n: &Num) -> Option<&Arc<Ext>> {
    match n {
        Num::Q(_) => None,
        Num::A(e, _) => Some(e),
    }
}

fn in_chain(x: &Arc<Ext>, top: &Arc<Ext>) -> bool {
    Arc::ptr_eq(x, top) || x.is_ancestor_of(top)
}

/// `x` itself or a rebased copy of it inside the chain ending at `top`.
fn image_in(x: &Arc<Ext>, top: &Arc<Ext>) -> Option<Arc<Ext>> {
    if in_chain(x, top) {
        return Some(x.clone());
    }
    // Copies may themselves have been rebased again.
    let copies = x.state.lock().unwrap().rebased.clone();
    copies.iter().find_map(|r| image_in(r, top))
}

/// Top of a chain through `onto` that also contains an image of `y`,
/// copying the missing part of `y`'s chain on top of `onto`. A polynomial
/// squarefree over the old base stays squarefree over the new one.
fn rebase(y: &Arc<Ext>, onto: &Arc<Ext>) -> Arc<Ext> {
    if image_in(y, onto).is_some() {
        return onto.clone();
    }
    let parent = match &y.parent {
        Some(p) => rebase(p, onto),
        None => onto.clone(),
    };
    let st = y.state.lock().unwrap().clone();
    let minpoly = UniPoly::new(st.minpoly.coeffs().iter().map(|c| lift_into(c, &parent)).collect());
    let exact = st.exact.as_ref().map(|v| lift_into(v, &parent));
    let z = Arc::new(Ext {
        parent: Some(parent.clone()),
        depth: parent.depth + 1,
        refine_cap: y.refine_cap,
        state: Mutex::new(ExtState {
            minpoly,
            lo: st.lo,
            hi: st.hi,
            sign_lo: st.sign_lo,
            exact,
            rebased: Vec::new(),
        }),
    });
    y.state.lock().unwrap().rebased.push(z.clone());
    z
}

/// Rewrite `n` in terms of the chain ending at `top`.
fn lift_into(n: &Num, top: &Arc<Ext>) -> Num {
    match n {
        Num::Q(_) => n.clone(),
        Num::A(e, c) => {
            let img = image_in(e, top).expect("level has an image in the target tower");
            if Arc::ptr_eq(&img, e) {
                return n.clone();
            }
            let parent = img.parent.clone().expect("rebased level has a parent");
            Num::A(img, c.iter().map(|x| lift_into(x, &parent)).collect())
        }
    }
}

/// A level containing both arguments, building a joint tower if needed.
fn join(a: Option<&Arc<Ext>>, b: Option<&Arc<Ext>>) -> Option<Arc<Ext>> {
    match (a, b) {
        (None, x) | (x, None) => x.cloned(),
        (Some(x), Some(y)) => Some(if image_in(x, y).is_some() {
            y.clone()
        } else if image_in(y, x).is_some() {
            x.clone()
        } else if x.depth <= y.depth {
            rebase(x, y)
        } else {
            rebase(y, x)
        }),
    }
}

fn imul(a: &(Rat, Rat), b: &(Rat, Rat)) -> (Rat, Rat) {
    let p = [&a.0 * &b.0, &a.0 * &b.1, &a.1 * &b.0, &a.1 * &b.1];
    let mut lo = p[0].clone();
    let mut hi = p[0].clone();
    for x in &p[1..] {
        if x < &lo {
            lo = x.clone();
        }
        if x > &hi {
            hi = x.clone();
        }
    }
    (lo, hi)
}

impl Num {
    pub fn int(n: i64) -> Self {
        Num::Q(rat::int(n))
    }

    pub fn depth(&self) -> usize {
        level(self).map_or(0, |e| e.depth)
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Num::Q(_))
    }

    /// Rebuild from generator coefficients, reducing and collapsing.
    fn normalize(e: &Arc<Ext>, coeffs: Vec<Num>) -> Num {
        let p = UniPoly::new(coeffs);
        if let Some(v) = e.exact() {
            return p.eval(&v);
        }
        let m = e.minpoly();
        let p = if p.len() >= m.len() { p.rem(&m) } else { p };
        match p.len() {
            0 => Num::Q(<Rat as Zero>::zero()),
            1 => p.coeffs()[0].clone(),
            _ => Num::A(e.clone(), p.coeffs().to_vec()),
        }
    }

    fn as_poly_at(&self, e: &Arc<Ext>) -> Vec<Num> {
        match &lift_into(self, e) {
            Num::A(f, c) if Arc::ptr_eq(f, e) => c.clone(),
            other => vec![other.clone()],
        }
    }

    fn exact_zero_test(e: &Arc<Ext>, c: &[Num]) -> bool {
        let p = UniPoly::new(c.to_vec());
        let m = e.minpoly();
        let g = p.gcd(&m);
        if g.degree().unwrap_or(0) == 0 {
            return false;
        }
        let (lo, hi) = e.interval();
        if let Some(v) = e.exact() {
            return p.eval(&v).vanishes();
        }
        if g.count_roots(&lo, &hi) >= 1 {
            e.set_minpoly(g);
            true
        } else {
            e.set_minpoly(m.exact_div(&g));
            false
        }
    }

    /// Generator of a new extension: the unique root of the squarefree `p`
    /// in `(lo, hi)`.
    fn new_generator(p: &UniPoly<Num>, lo: Rat, hi: Rat, limits: &Limits) -> Result<Num, GermError> {
        let mut parent: Option<Arc<Ext>> = None;
        for c in p.coeffs() {
            parent = join(parent.as_ref(), level(c));
        }
        let depth = parent.as_ref().map_or(0, |e| e.depth) + 1;
        if depth > limits.max_tower_depth {
            return Err(GermError::ResourceLimit(format!(
                "algebraic tower depth {depth} exceeds the limit {}",
                limits.max_tower_depth
            )));
        }
        let p = match &parent {
            Some(e) => UniPoly::new(p.coeffs().iter().map(|c| lift_into(c, e)).collect()),
            None => p.clone(),
        };
        let m = p.monic();
        let sign_lo = m.sign_at_rat(&lo);
        let ext = Arc::new(Ext {
            parent,
            depth,
            refine_cap: limits.refine_cap,
            state: Mutex::new(ExtState { minpoly: m, lo, hi, sign_lo, exact: None, rebased: Vec::new() }),
        });
        Ok(Num::A(ext, vec![Num::Q(<Rat as Zero>::zero()), Num::Q(<Rat as One>::one())]))
    }

    /// Distinct real roots of `p` with multiplicities, ascending.
    pub fn real_roots(p: &UniPoly<Num>, limits: &Limits) -> Result<Vec<(Num, usize)>, GermError> {
        let p = p.trimmed();
        if p.is_empty() {
            return Err(GermError::InvalidInput("zero polynomial has no isolated roots".into()));
        }
        let parts = p.squarefree_decomposition();
        let sq = p.squarefree_part();
        let mut out = Vec::new();
        for iso in sq.isolate() {
            match iso {
                Isolated::Exact(r) => {
                    let mult = parts
                        .iter()
                        .find(|(s, _)| s.sign_at_rat(&r) == 0)
                        .map_or(1, |(_, k)| *k);
                    out.push((Num::Q(r), mult));
                }
                Isolated::Interval(lo, hi) => {
                    let (s, mult) = parts
                        .iter()
                        .find(|(s, _)| s.count_roots(&lo, &hi) == 1)
                        .cloned()
                        .unwrap_or((sq.clone(), 1));
                    out.push((Self::root_in(&s, lo, hi, limits)?, mult));
                }
            }
        }
        Ok(out)
    }

    /// The root of squarefree `s` inside `(lo, hi)`.
    fn root_in(s: &UniPoly<Num>, mut lo: Rat, mut hi: Rat, limits: &Limits) -> Result<Num, GermError> {
        if s.len() == 2 {
            return Ok(s.coeff(0).neg().div(&s.coeff(1)));
        }
        let qs: Option<Vec<Rat>> = s.coeffs().iter().map(|c| c.as_rat()).collect();
        if let Some(qs) = qs {
            // Rational root test: a rational root is k / L with L the leading
            // coefficient of the primitive integer polynomial.
            let prim = UniPoly::<Rat>::new(qs).primitive();
            let l = prim.lc();
            let sign_lo = prim.sign_at_rat(&lo);
            while (&hi - &lo) * &l >= rat::int(2) {
                let mid = (&lo + &hi) / rat::int(2);
                let sm = prim.sign_at_rat(&mid);
                if sm == 0 {
                    return Ok(Num::Q(mid));
                } else if sm == sign_lo {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let mut k = (&lo * &l).floor();
            while k <= (&hi * &l).ceil() {
                let cand = &k / &l;
                if cand > lo && cand < hi && prim.sign_at_rat(&cand) == 0 {
                    return Ok(Num::Q(cand));
                }
                k += <Rat as One>::one();
            }
        }
        Self::new_generator(s, lo, hi, limits)
    }
}

impl Field for Num {
    fn zero_elem() -> Self {
        Num::Q(<Rat as Zero>::zero())
    }

    fn one_elem() -> Self {
        Num::Q(<Rat as One>::one())
    }

    fn from_rat(r: Rat) -> Self {
        Num::Q(r)
    }

    fn add(&self, o: &Self) -> Self {
        match (self, o) {
            (Num::Q(a), Num::Q(b)) => Num::Q(a + b),
            _ => {
                let e = join(level(self), level(o)).expect("non-rational operand");
                let a = UniPoly::new(self.as_poly_at(&e));
                let b = UniPoly::new(o.as_poly_at(&e));
                Num::normalize(&e, a.add(&b).coeffs().to_vec())
            }
        }
    }

    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    fn mul(&self, o: &Self) -> Self {
        match (self, o) {
            (Num::Q(a), Num::Q(b)) => Num::Q(a * b),
            _ => {
                if self.is_trivially_zero() || o.is_trivially_zero() {
                    return Num::zero_elem();
                }
                let e = join(level(self), level(o)).expect("non-rational operand");
                let a = UniPoly::new(self.as_poly_at(&e));
                let b = UniPoly::new(o.as_poly_at(&e));
                Num::normalize(&e, a.mul(&b).coeffs().to_vec())
            }
        }
    }

    fn neg(&self) -> Self {
        match self {
            Num::Q(a) => Num::Q(-a),
            Num::A(e, c) => Num::A(e.clone(), c.iter().map(|x| x.neg()).collect()),
        }
    }

    fn inv(&self) -> Self {
        match self {
            Num::Q(a) => Num::Q(Field::inv(a)),
            Num::A(e, c) => {
                if let Some(v) = e.exact() {
                    return UniPoly::new(c.clone()).eval(&v).inv();
                }
                let p = UniPoly::new(c.clone());
                loop {
                    let m = e.minpoly();
                    let (g, s, _) = UniPoly::ext_gcd(&p, &m);
                    if g.degree().unwrap_or(0) == 0 {
                        return Num::normalize(e, s.coeffs().to_vec());
                    }
                    let (lo, hi) = e.interval();
                    assert!(g.count_roots(&lo, &hi) == 0, "inverse of zero");
                    e.set_minpoly(m.exact_div(&g));
                    if let Some(v) = e.exact() {
                        return p.eval(&v).inv();
                    }
                }
            }
        }
    }

    fn is_trivially_zero(&self) -> bool {
        match self {
            Num::Q(a) => Zero::is_zero(a),
            Num::A(..) => false,
        }
    }

    fn sign(&self) -> i8 {
        match self {
            Num::Q(a) => rat::sign(a),
            Num::A(e, c) => {
                if let Some(v) = e.exact() {
                    return UniPoly::new(c.clone()).eval(&v).sign();
                }
                for prec in [16, 32, 64] {
                    let (lo, hi) = self.enclose(prec);
                    if lo.is_positive() {
                        return 1;
                    }
                    if hi.is_negative() {
                        return -1;
                    }
                }
                if Num::exact_zero_test(e, c) {
                    return 0;
                }
                // Known nonzero: refinement must separate it from zero.
                let mut prec = 96;
                loop {
                    let (lo, hi) = self.enclose(prec);
                    if lo.is_positive() {
                        return 1;
                    }
                    if hi.is_negative() {
                        return -1;
                    }
                    prec += 32.max(e.refine_cap / 8);
                }
            }
        }
    }

    fn enclose(&self, prec: u32) -> (Rat, Rat) {
        match self {
            Num::Q(a) => (a.clone(), a.clone()),
            Num::A(e, c) => {
                let g = e.gen_enclosure(prec + 4);
                let mut acc = (<Rat as Zero>::zero(), <Rat as Zero>::zero());
                for x in c.iter().rev() {
                    let (l, h) = x.enclose(prec + 4);
                    let m = imul(&acc, &g);
                    acc = (m.0 + l, m.1 + h);
                }
                acc
            }
        }
    }

    fn as_rat(&self) -> Option<Rat> {
        match self {
            Num::Q(a) => Some(a.clone()),
            Num::A(e, c) => e.exact().and_then(|v| UniPoly::new(c.clone()).eval(&v).as_rat()),
        }
    }
}

/// Distinct real roots of a rational polynomial with multiplicities.
pub fn isolate_real_roots(p: &UniPoly<Rat>) -> Result<Vec<(Num, usize)>, GermError> {
    let q = UniPoly::<Num>::new(p.coeffs().iter().cloned().map(Num::Q).collect());
    Num::real_roots(&q, &Limits::default())
}

/// Exact sign of `p(a)`.
pub fn sign_at(p: &UniPoly<Rat>, a: &Num) -> i8 {
    let q = UniPoly::<Num>::new(p.coeffs().iter().cloned().map(Num::Q).collect());
    q.eval(a).sign()
}

/// Lift a rational polynomial into the tower.
pub fn lift(p: &UniPoly<Rat>) -> UniPoly<Num> {
    UniPoly::new(p.coeffs().iter().cloned().map(Num::Q).collect())
}
