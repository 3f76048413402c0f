//! Sparse bivariate polynomials over ℚ.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::rat::{self, Rat};
use super::upoly::UniPoly;

/// `Σ c_ij x^i y^j`, keyed by `(i, j)`. Stored coefficients are nonzero.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BiPoly {
    terms: BTreeMap<(u32, u32), Rat>,
}

impl BiPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rat) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn monomial(c: Rat, i: u32, j: u32) -> Self {
        let mut p = Self::zero();
        p.add_term(i, j, c);
        p
    }

    pub fn x() -> Self {
        Self::monomial(Rat::one(), 1, 0)
    }

    pub fn y() -> Self {
        Self::monomial(Rat::one(), 0, 1)
    }

    pub fn from_terms<I: IntoIterator<Item = ((u32, u32), Rat)>>(it: I) -> Self {
        let mut p = Self::zero();
        for ((i, j), c) in it {
            p.add_term(i, j, c);
        }
        p
    }

    /// From integer triples `(i, j, c)`.
    pub fn from_ints(ts: &[(u32, u32, i64)]) -> Self {
        Self::from_terms(ts.iter().map(|&(i, j, c)| ((i, j), rat::int(c))))
    }

    pub fn add_term(&mut self, i: u32, j: u32, c: Rat) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry((i, j)).or_insert_with(Rat::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn terms(&self) -> &BTreeMap<(u32, u32), Rat> {
        &self.terms
    }

    pub fn coeff(&self, i: u32, j: u32) -> Rat {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.terms.keys().copied()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut p = self.clone();
        for (&(i, j), c) in &o.terms {
            p.add_term(i, j, c.clone());
        }
        p
    }

    pub fn neg(&self) -> Self {
        Self { terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(k, a)| (*k, a * c)).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut p = Self::zero();
        for (&(i, j), a) in &self.terms {
            for (&(k, l), b) in &o.terms {
                p.add_term(i + k, j + l, a * b);
            }
        }
        p
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(Rat::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Total degree; `None` for zero.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, j)| i + j).max()
    }

    /// Multiplicity at the origin: lowest total degree of a term.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, j)| i + j).min()
    }

    pub fn deg_x(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, _)| i).max()
    }

    pub fn deg_y(&self) -> Option<u32> {
        self.terms.keys().map(|&(_, j)| j).max()
    }

    /// Homogeneous part of total degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> Self {
        Self::from_terms(self.terms.iter().filter(|(&(i, j), _)| i + j == d).map(|(k, c)| (*k, c.clone())))
    }

    /// Initial form `f_m`, `m` the order.
    pub fn initial_form(&self) -> Self {
        match self.order() {
            Some(m) => self.homogeneous_part(m),
            None => Self::zero(),
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        self.order() == self.total_degree()
    }

    pub fn eval(&self, x: &Rat, y: &Rat) -> Rat {
        self.terms
            .iter()
            .map(|(&(i, j), c)| c * rat::pow_rat(x, i) * rat::pow_rat(y, j))
            .fold(Rat::zero(), |a, b| a + b)
    }

    pub fn eval_f64(&self, x: f64, y: f64) -> f64 {
        self.terms
            .iter()
            .map(|(&(i, j), c)| rat::to_f64(c) * x.powi(i as i32) * y.powi(j as i32))
            .sum()
    }

    /// `f(z, 1)` as a polynomial in `z`.
    pub fn dehomogenize_y(&self) -> UniPoly<Rat> {
        let n = self.deg_x().unwrap_or(0) as usize;
        let mut v = vec![Rat::zero(); n + 1];
        for (&(i, _), c) in &self.terms {
            v[i as usize] += c;
        }
        UniPoly::new(v)
    }

    /// `f(1, z)` as a polynomial in `z`.
    pub fn dehomogenize_x(&self) -> UniPoly<Rat> {
        self.swap().dehomogenize_y()
    }

    /// `f(y, x)`.
    pub fn swap(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(&(i, j), c)| ((j, i), c.clone())))
    }

    /// `f(sx·x, sy·y)` for signs `sx, sy ∈ {1, -1}`.
    pub fn reflect(&self, sx: i8, sy: i8) -> Self {
        Self::from_terms(self.terms.iter().map(|(&(i, j), c)| {
            let mut c = c.clone();
            if sx < 0 && i % 2 == 1 {
                c = -c;
            }
            if sy < 0 && j % 2 == 1 {
                c = -c;
            }
            ((i, j), c)
        }))
    }

    /// `f(a x + b y, c x + d y)`.
    pub fn linear_substitute(&self, a: &Rat, b: &Rat, c: &Rat, d: &Rat) -> Self {
        let lx = Self::from_terms([((1, 0), a.clone()), ((0, 1), b.clone())]);
        let ly = Self::from_terms([((1, 0), c.clone()), ((0, 1), d.clone())]);
        let mut out = Self::zero();
        for (&(i, j), k) in &self.terms {
            out = out.add(&lx.pow(i).mul(&ly.pow(j)).scale(k));
        }
        out
    }

    pub fn dx(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|(&(i, _), _)| i > 0)
                .map(|(&(i, j), c)| ((i - 1, j), c * rat::int(i as i64))),
        )
    }

    pub fn dy(&self) -> Self {
        self.swap().dx().swap()
    }

    /// Leading term in lex order with `x > y`.
    fn lead(&self) -> Option<((u32, u32), Rat)> {
        self.terms.iter().next_back().map(|(k, c)| (*k, c.clone()))
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide.
    pub fn exact_div(&self, d: &Self) -> Option<Self> {
        let (dk, dc) = d.lead()?;
        let mut r = self.clone();
        let mut q = Self::zero();
        while let Some((k, c)) = r.lead() {
            if k.0 < dk.0 || k.1 < dk.1 {
                return None;
            }
            let t = Self::monomial(c / &dc, k.0 - dk.0, k.1 - dk.1);
            r = r.sub(&t.mul(d));
            q = q.add(&t);
        }
        Some(q)
    }

    /// Scale to integer coefficients with content 1 and positive lex-leading
    /// coefficient.
    pub fn normalized(&self) -> Self {
        let Some((_, lc)) = self.lead() else {
            return Self::zero();
        };
        let mut l = num_bigint::BigInt::one();
        for c in self.terms.values() {
            l = num_integer::Integer::lcm(&l, c.denom());
        }
        let mut g = num_bigint::BigInt::zero();
        for c in self.terms.values() {
            g = num_integer::Integer::gcd(&g, &(c * Rat::from_integer(l.clone())).to_integer());
        }
        let mut s = Rat::new(l, g);
        if lc.is_negative() {
            s = -s;
        }
        self.scale(&s)
    }

    fn to_xpoly(&self) -> Vec<UniPoly<Rat>> {
        let n = self.deg_x().map_or(0, |d| d as usize + 1);
        let mut rows: Vec<Vec<Rat>> = vec![Vec::new(); n];
        for (&(i, j), c) in &self.terms {
            let row = &mut rows[i as usize];
            if row.len() <= j as usize {
                row.resize(j as usize + 1, Rat::zero());
            }
            row[j as usize] = c.clone();
        }
        rows.into_iter().map(UniPoly::new).collect()
    }

    fn from_xpoly(rows: &[UniPoly<Rat>]) -> Self {
        let mut p = Self::zero();
        for (i, r) in rows.iter().enumerate() {
            for (j, c) in r.coeffs().iter().enumerate() {
                p.add_term(i as u32, j as u32, c.clone());
            }
        }
        p
    }

    fn from_ypoly(p: &UniPoly<Rat>) -> Self {
        Self::from_xpoly(std::slice::from_ref(p))
    }

    /// Content in ℚ[y] (gcd of the x-coefficients), monic.
    fn y_content(&self) -> UniPoly<Rat> {
        let mut g = UniPoly::zero();
        for r in self.to_xpoly() {
            g = g.gcd(&r);
        }
        g
    }

    fn x_primitive(&self) -> Self {
        let c = self.y_content();
        if c.degree().unwrap_or(0) == 0 {
            return self.clone();
        }
        self.exact_div(&Self::from_ypoly(&c)).expect("content divides")
    }

    /// Greatest common divisor, normalized.
    pub fn gcd(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.normalized();
        }
        if o.is_zero() {
            return self.normalized();
        }
        let cont = self.y_content().gcd(&o.y_content());
        let mut a = self.x_primitive();
        let mut b = o.x_primitive();
        if a.deg_x() < b.deg_x() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            if b.deg_x() == Some(0) {
                a = Self::constant(Rat::one());
                break;
            }
            let r = a.prem(&b);
            a = b;
            b = if r.is_zero() { r } else { r.x_primitive().normalized() };
        }
        a.x_primitive().mul(&Self::from_ypoly(&cont)).normalized()
    }

    /// Pseudo-remainder in x.
    fn prem(&self, b: &Self) -> Self {
        let db = b.deg_x().unwrap();
        let bl = b.to_xpoly()[db as usize].clone();
        let bl = Self::from_ypoly(&bl);
        let mut a = self.clone();
        while let Some(da) = a.deg_x() {
            if a.is_zero() || da < db {
                break;
            }
            let al = Self::from_ypoly(&a.to_xpoly()[da as usize]);
            let shift = Self::monomial(Rat::one(), da - db, 0);
            a = a.mul(&bl).sub(&al.mul(&shift).mul(b));
        }
        a
    }

    /// Squarefree decomposition: `f = unit · Π s_k^k` with the `s_k` pairwise
    /// coprime, squarefree and normalized. Factors are listed by multiplicity.
    pub fn squarefree_factor(&self) -> Vec<(Self, usize)> {
        assert!(!self.is_zero(), "squarefree factorization of zero");
        let mut by_mult: BTreeMap<usize, Self> = BTreeMap::new();
        let mut push = |f: Self, k: usize| {
            if f.total_degree().unwrap_or(0) == 0 {
                return;
            }
            let e = by_mult.entry(k).or_insert_with(|| Self::constant(Rat::one()));
            *e = e.mul(&f);
        };
        let cont = self.y_content();
        for (s, k) in cont.squarefree_decomposition() {
            push(Self::from_ypoly(&s), k);
        }
        let f = self.x_primitive();
        if f.deg_x().unwrap_or(0) > 0 {
            let fx = f.dx();
            let b = f.gcd(&fx);
            let mut c = f.exact_div(&b).expect("gcd divides");
            let mut d = fx.exact_div(&b).expect("gcd divides").sub(&c.dx());
            let mut i = 1;
            while c.deg_x().unwrap_or(0) > 0 {
                let a = c.gcd(&d);
                c = c.exact_div(&a).expect("gcd divides");
                d = d.exact_div(&a).expect("gcd divides").sub(&c.dx());
                push(a, i);
                i += 1;
            }
        }
        by_mult.into_iter().map(|(k, f)| (f.normalized(), k)).collect()
    }

    /// Product of the distinct irreducible factors.
    pub fn squarefree_part(&self) -> Self {
        self.squarefree_factor()
            .into_iter()
            .fold(Self::constant(Rat::one()), |acc, (f, _)| acc.mul(&f))
            .normalized()
    }
}

impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(i, j), c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let a = c.abs();
            let mut mon = Vec::new();
            match i {
                0 => {}
                1 => mon.push("x".to_string()),
                _ => mon.push(format!("x^{i}")),
            }
            match j {
                0 => {}
                1 => mon.push("y".to_string()),
                _ => mon.push(format!("y^{j}")),
            }
            let body = if mon.is_empty() {
                a.to_string()
            } else if a.is_one() {
                mon.join("*")
            } else {
                format!("{a}*{}", mon.join("*"))
            };
            if first {
                write!(f, "{}{}", if neg { "-" } else { "" }, body)?;
                first = false;
            } else {
                write!(f, " {} {}", if neg { "-" } else { "+" }, body)?;
            }
        }
        Ok(())
    }
}

/// Squarefree factorization of a nonzero bivariate polynomial.
pub fn squarefree_factor_bipoly(f: &BiPoly) -> Vec<(BiPoly, usize)> {
    f.squarefree_factor()
}
