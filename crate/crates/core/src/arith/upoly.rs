//! Dense univariate polynomials over an exact real field.

use std::fmt;

use num_traits::{One, Signed, Zero};

use super::field::Field;
use super::rat::{self, Rat};

/// Coefficients in ascending degree order. Trailing coefficients that are
/// structurally zero are dropped on construction; coefficients that are zero
/// only after an exact test are dropped by [`UniPoly::trimmed`].
#[derive(Clone, Debug, PartialEq)]
pub struct UniPoly<F> {
    coeffs: Vec<F>,
}

impl<F: Field> UniPoly<F> {
    pub fn new(mut coeffs: Vec<F>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_trivially_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: F) -> Self {
        Self::new(vec![c])
    }

    pub fn monomial(c: F, k: usize) -> Self {
        let mut v = vec![F::zero_elem(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    /// The polynomial `z`.
    pub fn z() -> Self {
        Self::monomial(F::one_elem(), 1)
    }

    pub fn from_rats(cs: &[Rat]) -> Self {
        Self::new(cs.iter().cloned().map(F::from_rat).collect())
    }

    pub fn from_ints(cs: &[i64]) -> Self {
        Self::new(cs.iter().map(|&c| F::from_rat(rat::int(c))).collect())
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> F {
        self.coeffs.get(k).cloned().unwrap_or_else(F::zero_elem)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Drop leading coefficients that are exactly zero.
    pub fn trimmed(&self) -> Self {
        let mut c = self.coeffs.clone();
        while c.last().is_some_and(|x| x.vanishes()) {
            c.pop();
        }
        UniPoly { coeffs: c }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.vanishes())
    }

    /// Exact degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        let t = self.trimmed();
        if t.coeffs.is_empty() {
            None
        } else {
            Some(t.coeffs.len() - 1)
        }
    }

    /// Leading coefficient after exact trimming.
    pub fn lc(&self) -> F {
        self.trimmed().coeffs.last().cloned().unwrap_or_else(F::zero_elem)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let v = (0..n)
            .map(|i| match (self.coeffs.get(i), o.coeffs.get(i)) {
                (Some(a), Some(b)) => a.add(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => F::zero_elem(),
            })
            .collect();
        Self::new(v)
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.neg()).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.coeffs.is_empty() || o.coeffs.is_empty() {
            return Self::zero();
        }
        let mut v = vec![F::zero_elem(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_trivially_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if b.is_trivially_zero() {
                    continue;
                }
                v[i + j] = v[i + j].add(&a.mul(b));
            }
        }
        Self::new(v)
    }

    pub fn scale(&self, c: &F) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(F::one_elem());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, x: &F) -> F {
        let mut acc = F::zero_elem();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    pub fn eval_rat(&self, x: &Rat) -> F {
        self.eval(&F::from_rat(x.clone()))
    }

    /// `p(z + a)`.
    pub fn shift(&self, a: &F) -> Self {
        let lin = Self::new(vec![a.clone(), F::one_elem()]);
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&lin).add(&Self::constant(c.clone()));
        }
        acc
    }

    /// `p(a z)`.
    pub fn scale_var(&self, a: &F) -> Self {
        let mut pw = F::one_elem();
        let mut v = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            v.push(c.mul(&pw));
            pw = pw.mul(a);
        }
        Self::new(v)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.mul(&F::from_rat(rat::int(i as i64))))
                .collect(),
        )
    }

    /// Euclidean division. Panics if `d` is exactly zero.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let d = d.trimmed();
        let dn = d.coeffs.len();
        assert!(dn > 0, "division by the zero polynomial");
        let inv = d.coeffs[dn - 1].inv();
        let mut r = self.coeffs.clone();
        if r.len() < dn {
            return (Self::zero(), Self::new(r));
        }
        let mut q = vec![F::zero_elem(); r.len() - dn + 1];
        for k in (0..q.len()).rev() {
            let top = r[k + dn - 1].clone();
            if top.is_trivially_zero() {
                continue;
            }
            let f = top.mul(&inv);
            for (i, dc) in d.coeffs.iter().enumerate().take(dn - 1) {
                r[k + i] = r[k + i].sub(&f.mul(dc));
            }
            r[k + dn - 1] = F::zero_elem();
            q[k] = f;
        }
        r.truncate(dn - 1);
        (Self::new(q), Self::new(r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.div_rem(d).1
    }

    /// Quotient of an exact division.
    pub fn exact_div(&self, d: &Self) -> Self {
        self.div_rem(d).0
    }

    pub fn monic(&self) -> Self {
        let t = self.trimmed();
        match t.coeffs.last() {
            None => t,
            Some(l) => {
                let inv = l.inv();
                let n = t.coeffs.len();
                let mut v: Vec<F> = t.coeffs[..n - 1].iter().map(|c| c.mul(&inv)).collect();
                v.push(F::one_elem());
                Self::new(v)
            }
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, o: &Self) -> Self {
        let mut a = self.trimmed();
        let mut b = o.trimmed();
        while !b.coeffs.is_empty() {
            let r = a.rem(&b).trimmed();
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `(g, s, t)` with `s*a + t*b = g`, `g` monic.
    pub fn ext_gcd(a: &Self, b: &Self) -> (Self, Self, Self) {
        let (mut r0, mut r1) = (a.trimmed(), b.trimmed());
        let (mut s0, mut s1) = (Self::constant(F::one_elem()), Self::zero());
        let (mut t0, mut t1) = (Self::zero(), Self::constant(F::one_elem()));
        while !r1.coeffs.is_empty() {
            let (q, r) = r0.div_rem(&r1);
            let r = r.trimmed();
            let s = s0.sub(&q.mul(&s1));
            let t = t0.sub(&q.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        match r0.coeffs.last() {
            None => (r0, s0, t0),
            Some(l) => {
                let inv = l.inv();
                (r0.scale(&inv).monic(), s0.scale(&inv), t0.scale(&inv))
            }
        }
    }

    /// Yun's algorithm: `p = lc * prod s_i^i` with `s_i` monic, squarefree and
    /// pairwise coprime. Returns the nonconstant `(s_i, i)`.
    pub fn squarefree_decomposition(&self) -> Vec<(Self, usize)> {
        let f = self.trimmed();
        let mut out = Vec::new();
        if f.coeffs.len() <= 1 {
            return out;
        }
        let df = f.derivative();
        let b = f.gcd(&df);
        let mut c = f.exact_div(&b);
        let mut d = df.exact_div(&b).sub(&c.derivative());
        let mut i = 1;
        while c.degree().unwrap_or(0) > 0 {
            let a = c.gcd(&d);
            c = c.exact_div(&a);
            d = d.exact_div(&a).sub(&c.derivative());
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.monic(), i));
            }
            i += 1;
        }
        out
    }

    pub fn squarefree_part(&self) -> Self {
        let f = self.trimmed();
        if f.coeffs.len() <= 1 {
            return f.monic();
        }
        f.exact_div(&f.gcd(&f.derivative())).monic()
    }

    /// Number of distinct complex roots: `deg(p / gcd(p, p'))`.
    pub fn distinct_complex_root_count(&self) -> usize {
        self.squarefree_part().degree().unwrap_or(0)
    }

    /// Exact sign of `p(x)` for rational `x`.
    pub fn sign_at_rat(&self, x: &Rat) -> i8 {
        self.eval_rat(x).sign()
    }

    pub fn sturm_sequence(&self) -> Vec<Self> {
        let p = self.trimmed();
        let mut seq = vec![p.clone()];
        let mut prev = p.clone();
        let mut cur = p.derivative().trimmed();
        while !cur.coeffs.is_empty() {
            seq.push(cur.clone());
            let r = prev.rem(&cur).neg().trimmed();
            prev = cur;
            cur = r;
        }
        seq
    }

    /// Cauchy bound: every real root lies in `(-M, M)`.
    pub fn root_bound(&self) -> Rat {
        let t = self.trimmed();
        let n = t.coeffs.len();
        if n <= 1 {
            return <Rat as One>::one();
        }
        let mut prec = 8;
        let lead_lo = loop {
            let (lo, hi) = t.coeffs[n - 1].enclose(prec);
            if lo.is_positive() {
                break lo;
            }
            if hi.is_negative() {
                break -hi;
            }
            prec += 16;
        };
        let mut m = <Rat as Zero>::zero();
        for c in &t.coeffs[..n - 1] {
            let (lo, hi) = c.enclose(8);
            let a = rat::max_rat(&lo.abs(), &hi.abs()).clone();
            if a > m {
                m = a;
            }
        }
        (m / lead_lo).ceil() + rat::int(2)
    }

    /// Real roots of `self` (any multiplicity) as isolating data, ascending.
    /// Each entry is either an exact rational root or an open interval
    /// `(lo, hi)` whose endpoints are not roots and which holds one root.
    pub fn isolate(&self) -> Vec<Isolated> {
        let sq = self.squarefree_part();
        if sq.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        let seq = sq.sturm_sequence();
        let m = sq.root_bound();
        let mut out = Vec::new();
        isolate_rec(&sq, &seq, -m.clone(), m, &mut out);
        out
    }

    /// Number of distinct real roots in `(a, b]`.
    pub fn count_roots(&self, a: &Rat, b: &Rat) -> usize {
        let sq = self.squarefree_part();
        if sq.degree().unwrap_or(0) == 0 {
            return 0;
        }
        let seq = sq.sturm_sequence();
        let va = variations(&seq, a);
        let vb = variations(&seq, b);
        va.saturating_sub(vb)
    }
}

/// Isolating data for one real root.
#[derive(Clone, Debug)]
pub enum Isolated {
    Exact(Rat),
    Interval(Rat, Rat),
}

fn variations<F: Field>(seq: &[UniPoly<F>], x: &Rat) -> usize {
    let mut last = 0i8;
    let mut v = 0;
    for p in seq {
        let s = p.sign_at_rat(x);
        if s != 0 {
            if last != 0 && s != last {
                v += 1;
            }
            last = s;
        }
    }
    v
}

fn isolate_rec<F: Field>(p: &UniPoly<F>, seq: &[UniPoly<F>], a: Rat, b: Rat, out: &mut Vec<Isolated>) {
    let n = variations(seq, &a).saturating_sub(variations(seq, &b));
    if n == 0 {
        return;
    }
    if n == 1 && p.sign_at_rat(&b) != 0 {
        out.push(Isolated::Interval(a, b));
        return;
    }
    let mid = (&a + &b) / rat::int(2);
    if p.sign_at_rat(&mid) == 0 {
        // Exact rational root: carve out a small window around it.
        let mut d = (&b - &a) / rat::int(4);
        loop {
            let lo = &mid - &d;
            let hi = &mid + &d;
            if p.sign_at_rat(&lo) != 0
                && p.sign_at_rat(&hi) != 0
                && variations(seq, &lo).saturating_sub(variations(seq, &hi)) == 1
            {
                isolate_rec(p, seq, a, lo, out);
                out.push(Isolated::Exact(mid.clone()));
                isolate_rec(p, seq, hi, b, out);
                return;
            }
            d /= rat::int(2);
        }
    }
    isolate_rec(p, seq, a, mid.clone(), out);
    isolate_rec(p, seq, mid, b, out);
}

impl UniPoly<Rat> {
    /// Scale to a primitive integer polynomial with positive leading coefficient.
    pub fn primitive(&self) -> Self {
        let t = self.trimmed();
        if t.coeffs.is_empty() {
            return t;
        }
        let mut l = num_bigint::BigInt::one();
        for c in &t.coeffs {
            l = num_integer::Integer::lcm(&l, c.denom());
        }
        let ints: Vec<num_bigint::BigInt> = t.coeffs.iter().map(|c| (c * Rat::from_integer(l.clone())).to_integer()).collect();
        let mut g = num_bigint::BigInt::zero();
        for c in &ints {
            g = num_integer::Integer::gcd(&g, c);
        }
        let s = if ints.last().unwrap().is_negative() { -g } else { g };
        Self::new(ints.into_iter().map(|c| Rat::from_integer(c / &s)).collect())
    }

    pub fn to_f64s(&self) -> Vec<f64> {
        self.coeffs.iter().map(rat::to_f64).collect()
    }
}

impl<F: Field + fmt::Display> fmt::Display for UniPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_trivially_zero() {
                continue;
            }
            let cs = c.to_string();
            let mon = match i {
                0 => String::new(),
                1 => "z".to_string(),
                _ => format!("z^{i}"),
            };
            let t = if i == 0 {
                cs
            } else if cs == "1" {
                mon
            } else if cs == "-1" {
                format!("-{mon}")
            } else {
                format!("{cs}*{mon}")
            };
            terms.push(t);
        }
        if terms.is_empty() {
            return write!(f, "0");
        }
        let mut s = terms[0].clone();
        for t in &terms[1..] {
            if let Some(rest) = t.strip_prefix('-') {
                s.push_str(" - ");
                s.push_str(rest);
            } else {
                s.push_str(" + ");
                s.push_str(t);
            }
        }
        write!(f, "{s}")
    }
}
