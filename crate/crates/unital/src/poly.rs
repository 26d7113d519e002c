//! Sparse multivariate polynomials over an exact coefficient field.
//!
//! Representation: a term list of (exponent vector, nonzero scalar) pairs,
//! strictly descending in the polynomial's active monomial order. The zero
//! polynomial is the empty list. Arity is fixed per polynomial and checked
//! on every binary operation.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One as _, Signed as _};

use crate::error::{Result, UnitalError};
use crate::scalar::{FieldDesc, FunFrac, Scalar};

/// Exponent vector with cached total degree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: Vec<u32>,
    deg: u32,
}

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Monomial {
        let deg = exps.iter().sum();
        Monomial { exps, deg }
    }

    pub fn one(nvars: usize) -> Monomial {
        Monomial { exps: vec![0; nvars], deg: 0 }
    }

    pub fn var(nvars: usize, i: usize) -> Monomial {
        let mut exps = vec![0; nvars];
        exps[i] = 1;
        Monomial { exps, deg: 1 }
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn deg(&self) -> u32 {
        self.deg
    }

    pub fn arity(&self) -> usize {
        self.exps.len()
    }

    pub fn is_one(&self) -> bool {
        self.deg == 0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.exps.len(), other.exps.len());
        let exps = self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect();
        Monomial { exps, deg: self.deg + other.deg }
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.deg <= other.deg && self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        if !other.divides(self) {
            return None;
        }
        let exps = self.exps.iter().zip(&other.exps).map(|(a, b)| a - b).collect();
        Some(Monomial { exps, deg: self.deg - other.deg })
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        let exps: Vec<u32> =
            self.exps.iter().zip(&other.exps).map(|(a, b)| *a.max(b)).collect();
        Monomial::new(exps)
    }

    pub fn weighted_deg(&self, weights: &[i64]) -> i64 {
        self.exps.iter().zip(weights).map(|(e, w)| *e as i64 * w).sum()
    }
}

/// Monomial orders. `Block(k)` is the elimination order that ranks the first
/// `k` variables above the rest (grevlex within each block).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum MonomialOrder {
    GrevLex,
    Lex,
    Block(usize),
}

fn grevlex_slice(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    match da.cmp(&db) {
        Ordering::Equal => {}
        o => return o,
    }
    for i in (0..a.len()).rev() {
        if a[i] != b[i] {
            // smaller exponent in the last differing position wins
            return if a[i] < b[i] { Ordering::Greater } else { Ordering::Less };
        }
    }
    Ordering::Equal
}

impl MonomialOrder {
    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        debug_assert_eq!(a.arity(), b.arity());
        match self {
            MonomialOrder::GrevLex => grevlex_slice(&a.exps, &b.exps),
            MonomialOrder::Lex => {
                for i in 0..a.exps.len() {
                    match a.exps[i].cmp(&b.exps[i]) {
                        Ordering::Equal => {}
                        o => return o,
                    }
                }
                Ordering::Equal
            }
            MonomialOrder::Block(k) => {
                let k = (*k).min(a.exps.len());
                grevlex_slice(&a.exps[..k], &b.exps[..k])
                    .then_with(|| grevlex_slice(&a.exps[k..], &b.exps[k..]))
            }
        }
    }
}

impl fmt::Display for MonomialOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MonomialOrder::GrevLex => write!(f, "grevlex"),
            MonomialOrder::Lex => write!(f, "lex"),
            MonomialOrder::Block(k) => write!(f, "block({})", k),
        }
    }
}

/// Sparse multivariate polynomial.
#[derive(Debug, Clone)]
pub struct Poly {
    nvars: usize,
    order: MonomialOrder,
    terms: Vec<(Monomial, Scalar)>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        if self.nvars != other.nvars {
            return false;
        }
        if self.order == other.order {
            return self.terms == other.terms;
        }
        self.with_order(MonomialOrder::GrevLex).terms
            == other.with_order(MonomialOrder::GrevLex).terms
    }
}

impl Poly {
    pub fn zero(nvars: usize, order: MonomialOrder) -> Poly {
        Poly { nvars, order, terms: Vec::new() }
    }

    pub fn constant(nvars: usize, order: MonomialOrder, c: Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero(nvars, order);
        }
        Poly { nvars, order, terms: vec![(Monomial::one(nvars), c)] }
    }

    pub fn var(nvars: usize, order: MonomialOrder, i: usize, one: Scalar) -> Poly {
        Poly { nvars, order, terms: vec![(Monomial::var(nvars, i), one)] }
    }

    pub fn monomial(nvars: usize, order: MonomialOrder, exps: &[u32], coeff: Scalar) -> Poly {
        if coeff.is_zero() {
            return Poly::zero(nvars, order);
        }
        Poly { nvars, order, terms: vec![(Monomial::new(exps.to_vec()), coeff)] }
    }

    /// Build from arbitrary terms: sorts, merges duplicates, drops zeros.
    pub fn from_terms(
        nvars: usize,
        order: MonomialOrder,
        mut terms: Vec<(Monomial, Scalar)>,
    ) -> Result<Poly> {
        terms.sort_by(|a, b| order.cmp(&b.0, &a.0));
        let mut out: Vec<(Monomial, Scalar)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            debug_assert_eq!(m.arity(), nvars);
            if let Some(last) = out.last_mut() {
                if last.0 == m {
                    last.1 = last.1.add(&c)?;
                    continue;
                }
            }
            out.push((m, c));
        }
        out.retain(|(_, c)| !c.is_zero());
        Ok(Poly { nvars, order, terms: out })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn terms(&self) -> &[(Monomial, Scalar)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.len() <= 1 && self.terms.iter().all(|(m, _)| m.is_one())
    }

    pub fn constant_value(&self) -> Option<&Scalar> {
        if self.terms.len() == 1 && self.terms[0].0.is_one() {
            Some(&self.terms[0].1)
        } else {
            None
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|(m, _)| m.deg()).max().unwrap_or(0)
    }

    pub fn deg_in(&self, var: usize) -> u32 {
        self.terms.iter().map(|(m, _)| m.exps()[var]).max().unwrap_or(0)
    }

    pub fn leading(&self) -> Option<(&Monomial, &Scalar)> {
        self.terms.first().map(|(m, c)| (m, c))
    }

    pub fn leading_coeff(&self) -> Option<&Scalar> {
        self.terms.first().map(|(_, c)| c)
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn with_order(&self, order: MonomialOrder) -> Poly {
        if order == self.order {
            return self.clone();
        }
        let mut terms = self.terms.clone();
        terms.sort_by(|a, b| order.cmp(&b.0, &a.0));
        Poly { nvars: self.nvars, order, terms }
    }

    fn check_ambient(&self, other: &Poly) -> Result<()> {
        if self.nvars != other.nvars || self.order != other.order {
            return Err(UnitalError::AmbientMismatch(format!(
                "{} vars {} vs {} vars {}",
                self.nvars, self.order, other.nvars, other.order
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Poly) -> Result<Poly> {
        self.check_ambient(other)?;
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            match self.order.cmp(&self.terms[i].0, &other.terms[j].0) {
                Ordering::Greater => {
                    out.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push(other.terms[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = self.terms[i].1.add(&other.terms[j].1)?;
                    if !c.is_zero() {
                        out.push((self.terms[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&other.terms[j..]);
        Ok(Poly { nvars: self.nvars, order: self.order, terms: out })
    }

    pub fn neg(&self) -> Poly {
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect();
        Poly { nvars: self.nvars, order: self.order, terms }
    }

    pub fn sub(&self, other: &Poly) -> Result<Poly> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Result<Poly> {
        self.check_ambient(other)?;
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                terms.push((ma.mul(mb), ca.mul(cb)?));
            }
        }
        Poly::from_terms(self.nvars, self.order, terms)
    }

    pub fn scalar_mul(&self, c: &Scalar) -> Result<Poly> {
        if c.is_zero() {
            return Ok(Poly::zero(self.nvars, self.order));
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, a)| Ok((m.clone(), a.mul(c)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Poly { nvars: self.nvars, order: self.order, terms })
    }

    pub fn term_mul(&self, m: &Monomial, c: &Scalar) -> Result<Poly> {
        if c.is_zero() {
            return Ok(Poly::zero(self.nvars, self.order));
        }
        let terms = self
            .terms
            .iter()
            .map(|(tm, tc)| Ok((tm.mul(m), tc.mul(c)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Poly { nvars: self.nvars, order: self.order, terms })
    }

    pub fn pow(&self, e: u32) -> Result<Poly> {
        let one = match self.leading_coeff() {
            Some(c) => c.mul(&c.inv()?)?,
            None => Scalar::rat_int(1), // 0^e below collapses to 0 for e > 0
        };
        let mut acc = Poly::constant(self.nvars, self.order, one);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Divide the leading coefficient out, producing a monic polynomial.
    pub fn monic(&self) -> Result<Poly> {
        match self.leading_coeff() {
            None => Ok(self.clone()),
            Some(lc) if lc.is_one() => Ok(self.clone()),
            Some(lc) => self.scalar_mul(&lc.inv()?),
        }
    }

    /// Exact single-divisor division: `Some(q)` iff `self = q * g`.
    pub fn exact_div(&self, g: &Poly) -> Option<Poly> {
        if g.is_zero() {
            return None;
        }
        let (gm, gc) = g.leading()?;
        let gc_inv = gc.inv().ok()?;
        let mut rem = self.clone();
        let mut q = Poly::zero(self.nvars, self.order);
        while let Some((rm, rc)) = rem.leading() {
            let m = rm.div(gm)?;
            let c = rc.mul(&gc_inv).ok()?;
            let t = Poly { nvars: self.nvars, order: self.order, terms: vec![(m.clone(), c.clone())] };
            q = q.add(&t).ok()?;
            rem = rem.sub(&g.term_mul(&m, &c).ok()?).ok()?;
        }
        Some(q)
    }

    /// Append `extra` fresh variables (exponent 0 everywhere).
    pub fn extend_vars(&self, extra: usize) -> Poly {
        let nv = self.nvars + extra;
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut exps = m.exps().to_vec();
                exps.extend(std::iter::repeat(0).take(extra));
                (Monomial::new(exps), c.clone())
            })
            .collect();
        let mut p = Poly { nvars: nv, order: self.order, terms };
        p.resort();
        p
    }

    /// Drop the first `k` variables; every term must have exponent 0 there.
    pub fn drop_front_vars(&self, k: usize) -> Option<Poly> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            if m.exps()[..k].iter().any(|e| *e != 0) {
                return None;
            }
            terms.push((Monomial::new(m.exps()[k..].to_vec()), c.clone()));
        }
        let mut p = Poly { nvars: self.nvars - k, order: MonomialOrder::GrevLex, terms };
        p.resort();
        Some(p)
    }

    /// Drop the last variable; every term must have exponent 0 there.
    pub fn truncate_last_var(&self) -> Option<Poly> {
        let n = self.nvars;
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            if m.exps()[n - 1] != 0 {
                return None;
            }
            terms.push((Monomial::new(m.exps()[..n - 1].to_vec()), c.clone()));
        }
        let mut p = Poly { nvars: n - 1, order: self.order, terms };
        p.resort();
        Some(p)
    }

    /// Reorder variables by `perm`: new position `i` holds old variable `perm[i]`.
    pub fn permute_vars(&self, perm: &[usize]) -> Poly {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let exps: Vec<u32> = perm.iter().map(|&old| m.exps()[old]).collect();
                (Monomial::new(exps), c.clone())
            })
            .collect();
        let mut p = Poly { nvars: self.nvars, order: self.order, terms };
        p.resort();
        p
    }

    fn resort(&mut self) {
        let order = self.order;
        self.terms.sort_by(|a, b| order.cmp(&b.0, &a.0));
    }

    /// Deterministic total comparison on canonical forms.
    pub fn canon_cmp(&self, other: &Poly) -> Ordering {
        let mut i = 0;
        loop {
            match (self.terms.get(i), other.terms.get(i)) {
                (None, None) => return Ordering::Equal,
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some((ma, ca)), Some((mb, cb))) => {
                    match self.order.cmp(ma, mb) {
                        Ordering::Equal => {}
                        o => return o,
                    }
                    match ca.canon_cmp(cb) {
                        Ordering::Equal => {}
                        o => return o,
                    }
                }
            }
            i += 1;
        }
    }

    /// Weighted-grading decomposition: maps each occurring weighted degree to
    /// the homogeneous component. Components re-sum to the input; the zero
    /// polynomial decomposes to the empty map.
    pub fn grading_decompose(&self, weights: &[i64]) -> Result<BTreeMap<i64, Poly>> {
        if weights.len() != self.nvars {
            return Err(UnitalError::AmbientMismatch(format!(
                "weight vector arity {} vs {} variables",
                weights.len(),
                self.nvars
            )));
        }
        let mut out: BTreeMap<i64, Vec<(Monomial, Scalar)>> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.weighted_deg(weights)).or_default().push((m.clone(), c.clone()));
        }
        Ok(out
            .into_iter()
            .map(|(d, terms)| {
                let mut p = Poly { nvars: self.nvars, order: self.order, terms };
                p.resort();
                (d, p)
            })
            .collect())
    }

    pub fn is_homogeneous(&self, weights: &[i64]) -> Result<bool> {
        Ok(self.grading_decompose(weights)?.len() <= 1)
    }

    /// Multivariate gcd over a field: primitive PRS, recursing on the main
    /// variable. The result is monic in the polynomial's own order.
    pub fn gcd(&self, other: &Poly) -> Result<Poly> {
        self.check_ambient(other)?;
        let g = gcd_inner(self, other)?;
        g.monic()
    }

    /// Collect as univariate in `var`: coefficient polys (exponent 0 at `var`)
    /// indexed by the `var`-degree, highest first omitted-zeros skipped.
    fn univar_coeffs(&self, var: usize) -> BTreeMap<u32, Poly> {
        let mut map: BTreeMap<u32, Vec<(Monomial, Scalar)>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.exps()[var];
            let mut exps = m.exps().to_vec();
            exps[var] = 0;
            map.entry(e).or_default().push((Monomial::new(exps), c.clone()));
        }
        map.into_iter()
            .map(|(e, terms)| {
                let mut p = Poly { nvars: self.nvars, order: self.order, terms };
                p.resort();
                (e, p)
            })
            .collect()
    }

    pub fn format_with(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let (neg, body) = term_string(m, c, names);
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push(if neg { '-' } else { '+' });
            }
            out.push_str(&body);
        }
        out
    }
}

fn mono_string(m: &Monomial, names: &[String]) -> String {
    let mut parts = Vec::new();
    for (i, e) in m.exps().iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(names[i].clone()),
            _ => parts.push(format!("{}^{}", names[i], e)),
        }
    }
    parts.join("*")
}

fn term_string(m: &Monomial, c: &Scalar, names: &[String]) -> (bool, String) {
    let mono = mono_string(m, names);
    match c {
        Scalar::Rat(r) => {
            let neg = r.is_negative();
            let abs = if neg { -r.clone() } else { r.clone() };
            if mono.is_empty() {
                (neg, format!("{}", abs))
            } else if abs.is_one() {
                (neg, mono)
            } else {
                (neg, format!("{}*{}", abs, mono))
            }
        }
        Scalar::Fp { v, .. } => {
            if mono.is_empty() {
                (false, format!("{}", v))
            } else if *v == 1 {
                (false, mono)
            } else {
                (false, format!("{}*{}", v, mono))
            }
        }
        Scalar::Frac(_) => {
            let s = format!("{}", c);
            let wrapped =
                if s.contains(['+', '-', '*', '/']) { format!("({})", s) } else { s };
            if mono.is_empty() {
                (false, wrapped)
            } else {
                (false, format!("{}*{}", wrapped, mono))
            }
        }
    }
}

fn gcd_inner(f: &Poly, g: &Poly) -> Result<Poly> {
    if f.is_zero() {
        return Ok(g.clone());
    }
    if g.is_zero() {
        return Ok(f.clone());
    }
    // main variable: highest index occurring in either
    let main = (0..f.nvars()).rev().find(|&v| f.deg_in(v) > 0 || g.deg_in(v) > 0);
    let Some(main) = main else {
        // both nonzero constants
        let one = f.leading_coeff().unwrap().mul(&f.leading_coeff().unwrap().inv()?)?;
        return Ok(Poly::constant(f.nvars(), f.order(), one));
    };
    if f.deg_in(main) == 0 || g.deg_in(main) == 0 {
        // one side is free of the main variable: gcd divides its content
        let (flat, other) = if f.deg_in(main) == 0 { (f, g) } else { (g, f) };
        let cont = content_in(other, main)?;
        return gcd_inner(flat, &cont);
    }
    let cont_f = content_in(f, main)?;
    let cont_g = content_in(g, main)?;
    let cont = gcd_inner(&cont_f, &cont_g)?;
    let mut a = f.exact_div(&cont_f).expect("content divides");
    let mut b = g.exact_div(&cont_g).expect("content divides");
    if a.deg_in(main) < b.deg_in(main) {
        std::mem::swap(&mut a, &mut b);
    }
    loop {
        if b.is_zero() {
            break;
        }
        let r = pseudo_rem(&a, &b, main)?;
        a = b;
        b = primitive_part(&r, main)?;
        if a.deg_in(main) < b.deg_in(main) {
            std::mem::swap(&mut a, &mut b);
        }
    }
    let pp = primitive_part(&a, main)?;
    cont.mul(&pp)
}

fn content_in(f: &Poly, var: usize) -> Result<Poly> {
    let coeffs = f.univar_coeffs(var);
    let mut acc = Poly::zero(f.nvars(), f.order());
    for (_, c) in coeffs {
        acc = gcd_inner(&acc, &c)?;
        if acc.is_constant() && !acc.is_zero() {
            break;
        }
    }
    acc.monic()
}

fn primitive_part(f: &Poly, var: usize) -> Result<Poly> {
    if f.is_zero() {
        return Ok(f.clone());
    }
    let cont = content_in(f, var)?;
    Ok(f.exact_div(&cont).expect("content divides"))
}

fn pseudo_rem(a: &Poly, b: &Poly, var: usize) -> Result<Poly> {
    let db = b.deg_in(var);
    let lcb = b.univar_coeffs(var).remove(&db).expect("nonzero divisor");
    let mut r = a.clone();
    while !r.is_zero() && r.deg_in(var) >= db {
        let dr = r.deg_in(var);
        let lcr = r.univar_coeffs(var).remove(&dr).expect("nonzero");
        // r <- lcb * r - lcr * x^(dr-db) * b
        let mut exps = vec![0u32; a.nvars()];
        exps[var] = dr - db;
        let shift = Monomial::new(exps);
        let one = lcb.leading_coeff().unwrap().mul(&lcb.leading_coeff().unwrap().inv()?)?;
        let lhs = r.mul(&lcb)?;
        let rhs = b.term_mul(&shift, &one)?.mul(&lcr)?;
        r = lhs.sub(&rhs)?;
    }
    Ok(r)
}

/// Quotient of polynomials, reduced on construction; equality is decided by
/// cross-multiplication so callers never depend on the reduction.
#[derive(Debug, Clone)]
pub struct PolyFrac {
    pub num: Poly,
    pub den: Poly,
}

impl PolyFrac {
    pub fn new(num: Poly, den: Poly) -> Result<PolyFrac> {
        if den.is_zero() {
            return Err(UnitalError::DivisionByZero);
        }
        if num.is_zero() {
            let one = den.leading_coeff().unwrap().mul(&den.leading_coeff().unwrap().inv()?)?;
            return Ok(PolyFrac { den: Poly::constant(num.nvars(), num.order(), one), num });
        }
        let g = num.gcd(&den)?;
        let (mut num, mut den) = if g.is_constant() {
            (num, den)
        } else {
            (num.exact_div(&g).expect("gcd divides"), den.exact_div(&g).expect("gcd divides"))
        };
        let lc = den.leading_coeff().unwrap().clone();
        if !lc.is_one() {
            let inv = lc.inv()?;
            num = num.scalar_mul(&inv)?;
            den = den.scalar_mul(&inv)?;
        }
        Ok(PolyFrac { num, den })
    }

    pub fn from_poly(p: Poly) -> PolyFrac {
        let one = p
            .leading_coeff()
            .map(|c| c.mul(&c.inv().unwrap()).unwrap())
            .unwrap_or(Scalar::rat_int(1));
        let den = Poly::constant(p.nvars(), p.order(), one);
        PolyFrac { num: p, den }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, other: &PolyFrac) -> Result<PolyFrac> {
        let num = self.num.mul(&other.den)?.add(&other.num.mul(&self.den)?)?;
        let den = self.den.mul(&other.den)?;
        PolyFrac::new(num, den)
    }

    pub fn sub(&self, other: &PolyFrac) -> Result<PolyFrac> {
        self.add(&PolyFrac { num: other.num.neg(), den: other.den.clone() })
    }

    pub fn mul(&self, other: &PolyFrac) -> Result<PolyFrac> {
        PolyFrac::new(self.num.mul(&other.num)?, self.den.mul(&other.den)?)
    }

    pub fn inv(&self) -> Result<PolyFrac> {
        PolyFrac::new(self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, e: u32) -> Result<PolyFrac> {
        let mut acc = PolyFrac::from_poly(Poly::constant(
            self.num.nvars(),
            self.num.order(),
            self.den.leading_coeff().unwrap().mul(&self.den.leading_coeff().unwrap().inv()?)?,
        ));
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    pub fn eq_cross(&self, other: &PolyFrac) -> Result<bool> {
        Ok(self.num.mul(&other.den)? == other.num.mul(&self.den)?)
    }

    /// If the fraction is actually polynomial, return it.
    pub fn as_poly(&self) -> Option<Poly> {
        if self.den.is_constant() {
            let c = self.den.constant_value()?.inv().ok()?;
            return self.num.scalar_mul(&c).ok();
        }
        self.num.exact_div(&self.den)
    }
}

/// Substitute each variable of `f` by the corresponding fraction. All images
/// must share one ambient ring; the result is exact and satisfies the
/// homomorphism laws.
pub fn substitute(f: &Poly, images: &[PolyFrac], target_nvars: usize) -> Result<PolyFrac> {
    if images.len() != f.nvars() {
        return Err(UnitalError::MissingImage(format!(
            "{} images for {} variables",
            images.len(),
            f.nvars()
        )));
    }
    let order = images.first().map(|i| i.num.order()).unwrap_or(MonomialOrder::GrevLex);
    let mut acc = PolyFrac::from_poly(Poly::zero(target_nvars, order));
    for (m, c) in f.terms() {
        let mut term = PolyFrac::from_poly(Poly::constant(target_nvars, order, c.clone()));
        for (i, e) in m.exps().iter().enumerate() {
            if *e > 0 {
                term = term.mul(&images[i].pow(*e)?)?;
            }
        }
        acc = acc.add(&term)?;
    }
    Ok(acc)
}

/// Move the variables in `promote` (indices into `old_names`) into the
/// coefficient field: the result lives in the remaining variables over
/// `new_field`, which must extend the old field by exactly those names.
pub fn promote_vars(
    f: &Poly,
    promote: &[usize],
    old_field: &FieldDesc,
    new_field: &FieldDesc,
) -> Result<Poly> {
    let keep: Vec<usize> = (0..f.nvars()).filter(|i| !promote.contains(i)).collect();
    let n_old_frac = old_field.frac_vars.len();
    let n_new_frac = new_field.frac_vars.len();
    debug_assert_eq!(n_new_frac, n_old_frac + promote.len());
    let mut terms = Vec::with_capacity(f.term_count());
    for (m, c) in f.terms() {
        let outer = Monomial::new(keep.iter().map(|&i| m.exps()[i]).collect());
        // lift the old coefficient into the extended field
        let lifted = match c {
            Scalar::Frac(fr) => {
                let num = fr.num.extend_vars(n_new_frac - n_old_frac);
                let den = fr.den.extend_vars(n_new_frac - n_old_frac);
                FunFrac::new(new_field.clone(), num, den)?
            }
            other => new_field.lift(other.clone()),
        };
        // multiply by the promoted-variable monomial inside the field
        let mut frac_exps = vec![0u32; n_new_frac];
        for (slot, &src) in promote.iter().enumerate() {
            frac_exps[n_old_frac + slot] = m.exps()[src];
        }
        let scale = new_field.frac_monomial(&frac_exps);
        terms.push((outer, lifted.mul(&scale)?));
    }
    Poly::from_terms(keep.len(), f.order(), terms)
}

/// Ambient polynomial ring descriptor: coefficient field, named variables,
/// and the active monomial order.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyRing {
    pub field: FieldDesc,
    pub vars: Vec<String>,
    pub order: MonomialOrder,
}

impl PolyRing {
    pub fn new(field: FieldDesc, vars: Vec<String>, order: MonomialOrder) -> PolyRing {
        PolyRing { field, vars, order }
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn zero(&self) -> Poly {
        Poly::zero(self.nvars(), self.order)
    }

    pub fn one(&self) -> Poly {
        Poly::constant(self.nvars(), self.order, self.field.one())
    }

    pub fn constant(&self, c: Scalar) -> Poly {
        Poly::constant(self.nvars(), self.order, c)
    }

    pub fn var_poly(&self, i: usize) -> Poly {
        Poly::var(self.nvars(), self.order, i, self.field.one())
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn format(&self, p: &Poly) -> String {
        p.format_with(&self.vars)
    }

    /// Convenience constructor from integer coefficients and exponent rows.
    pub fn from_int_terms(&self, terms: &[(i64, &[u32])]) -> Poly {
        let terms = terms
            .iter()
            .map(|(c, e)| (Monomial::new(e.to_vec()), self.field.from_int(*c)))
            .collect();
        Poly::from_terms(self.nvars(), self.order, terms).expect("same field")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qring(vars: &[&str]) -> PolyRing {
        PolyRing::new(
            FieldDesc::rational(),
            vars.iter().map(|s| s.to_string()).collect(),
            MonomialOrder::GrevLex,
        )
    }

    #[test]
    fn add_cancels() {
        let r = qring(&["x"]);
        let f = r.from_int_terms(&[(1, &[1]), (1, &[0])]); // x + 1
        assert!(f.sub(&f).unwrap().is_zero());
    }

    #[test]
    fn product_matches_example() {
        // (y - x) * y = y^2 - x*y in Q[x,y]
        let r = qring(&["x", "y"]);
        let f = r.from_int_terms(&[(1, &[0, 1]), (-1, &[1, 0])]);
        let y = r.var_poly(1);
        let prod = f.mul(&y).unwrap();
        let expect = r.from_int_terms(&[(1, &[0, 2]), (-1, &[1, 1])]);
        assert_eq!(prod, expect);
        // (x+1)(x-1) = x^2 - 1
        let r1 = qring(&["x"]);
        let a = r1.from_int_terms(&[(1, &[1]), (1, &[0])]);
        let b = r1.from_int_terms(&[(1, &[1]), (-1, &[0])]);
        assert_eq!(a.mul(&b).unwrap(), r1.from_int_terms(&[(1, &[2]), (-1, &[0])]));
    }

    #[test]
    fn ambient_mismatch_rejected() {
        let a = qring(&["x"]).one();
        let b = qring(&["x", "y"]).one();
        assert!(matches!(a.add(&b), Err(UnitalError::AmbientMismatch(_))));
    }

    #[test]
    fn order_properties_on_random_triples() {
        // total, multiplicative, 1 minimal -- for all three orders
        let mut state = 42u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            state
        };
        let orders =
            [MonomialOrder::GrevLex, MonomialOrder::Lex, MonomialOrder::Block(2)];
        for _ in 0..2000 {
            let rand_mono = |next: &mut dyn FnMut() -> u64| {
                Monomial::new((0..4).map(|_| (next() % 5) as u32).collect())
            };
            let a = rand_mono(&mut next);
            let b = rand_mono(&mut next);
            let c = rand_mono(&mut next);
            for ord in &orders {
                // totality + antisymmetry
                assert_eq!(ord.cmp(&a, &b), ord.cmp(&b, &a).reverse());
                // multiplicativity: a < b => ac < bc
                if ord.cmp(&a, &b) == Ordering::Less {
                    assert_eq!(ord.cmp(&a.mul(&c), &b.mul(&c)), Ordering::Less);
                }
                // 1 is minimal
                let one = Monomial::one(4);
                assert_ne!(ord.cmp(&a, &one), Ordering::Less);
            }
        }
    }

    #[test]
    fn substitution_node_relation_vanishes() {
        // f = y^2 - x^2 - x^3 with x -> t^2 - 1, y -> t^3 - t maps to 0
        let r = qring(&["x", "y"]);
        let f = r.from_int_terms(&[(1, &[0, 2]), (-1, &[2, 0]), (-1, &[3, 0])]);
        let t = qring(&["t"]);
        let im_x = PolyFrac::from_poly(t.from_int_terms(&[(1, &[2]), (-1, &[0])]));
        let im_y = PolyFrac::from_poly(t.from_int_terms(&[(1, &[3]), (-1, &[1])]));
        let out = substitute(&f, &[im_x, im_y], 1).unwrap();
        assert!(out.is_zero());
    }

    #[test]
    fn substitution_identity() {
        let r = qring(&["x"]);
        let f = r.var_poly(0);
        let out = substitute(&f, &[PolyFrac::from_poly(r.var_poly(0))], 1).unwrap();
        assert!(out.eq_cross(&PolyFrac::from_poly(r.var_poly(0))).unwrap());
    }

    #[test]
    fn substitution_chain_aux() {
        // f1 = y1*y2 - 1 with y1 -> (1+x1)/x2, y2 -> x2 gives x1
        let yr = qring(&["y1", "y2"]);
        let f1 = yr.from_int_terms(&[(1, &[1, 1]), (-1, &[0, 0])]);
        let xr = qring(&["x1", "x2"]);
        let im1 = PolyFrac::new(
            xr.from_int_terms(&[(1, &[1, 0]), (1, &[0, 0])]),
            xr.var_poly(1),
        )
        .unwrap();
        let im2 = PolyFrac::from_poly(xr.var_poly(1));
        let out = substitute(&f1, &[im1, im2], 2).unwrap();
        assert!(out.eq_cross(&PolyFrac::from_poly(xr.var_poly(0))).unwrap());
    }

    #[test]
    fn substitution_homomorphism_random() {
        let mut state = 7u64;
        let mut next = move || {
            state = state.wrapping_mul(2862933555777941757).wrapping_add(3037000493);
            state
        };
        let r = qring(&["x", "y"]);
        let t = qring(&["s", "t"]);
        for _ in 0..200 {
            let mut rand_poly = |ring: &PolyRing| {
                let mut terms = Vec::new();
                for _ in 0..3 {
                    let e0 = (next() % 3) as u32;
                    let e1 = (next() % 3) as u32;
                    let c = (next() % 7) as i64 - 3;
                    terms.push((c, vec![e0, e1]));
                }
                let refs: Vec<(i64, &[u32])> =
                    terms.iter().map(|(c, e)| (*c, e.as_slice())).collect();
                ring.from_int_terms(&refs)
            };
            let f = rand_poly(&r);
            let g = rand_poly(&r);
            let im0 = PolyFrac::from_poly(rand_poly(&t));
            let im1 = PolyFrac::from_poly(rand_poly(&t));
            let images = [im0, im1];
            let sub_fg = substitute(&f.mul(&g).unwrap(), &images, 2).unwrap();
            let prod = substitute(&f, &images, 2)
                .unwrap()
                .mul(&substitute(&g, &images, 2).unwrap())
                .unwrap();
            assert!(sub_fg.eq_cross(&prod).unwrap());
            let sub_sum = substitute(&f.add(&g).unwrap(), &images, 2).unwrap();
            let sum = substitute(&f, &images, 2)
                .unwrap()
                .add(&substitute(&g, &images, 2).unwrap())
                .unwrap();
            assert!(sub_sum.eq_cross(&sum).unwrap());
        }
    }

    #[test]
    fn grading_decompose_examples() {
        let r = qring(&["x", "y"]);
        // y^2 - x^3 with weights (2,3): homogeneous of degree 6
        let cusp = r.from_int_terms(&[(1, &[0, 2]), (-1, &[3, 0])]);
        let d = cusp.grading_decompose(&[2, 3]).unwrap();
        assert_eq!(d.len(), 1);
        assert!(d.contains_key(&6));
        assert!(cusp.is_homogeneous(&[2, 3]).unwrap());
        // y^2 - x^2 - x^3 with weights (2,3): components at 4 and 6
        let node = r.from_int_terms(&[(1, &[0, 2]), (-1, &[2, 0]), (-1, &[3, 0])]);
        let d = node.grading_decompose(&[2, 3]).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d[&4], r.from_int_terms(&[(-1, &[2, 0])]));
        assert_eq!(d[&6], r.from_int_terms(&[(1, &[0, 2]), (-1, &[3, 0])]));
        // zero decomposes to the empty map
        assert!(r.zero().grading_decompose(&[2, 3]).unwrap().is_empty());
        // components re-sum
        let mut acc = r.zero();
        for p in d.values() {
            acc = acc.add(p).unwrap();
        }
        assert_eq!(acc, node);
    }

    #[test]
    fn gcd_univariate_and_multivariate() {
        let r = qring(&["x"]);
        let f = r.from_int_terms(&[(1, &[2]), (-1, &[0])]); // x^2-1
        let g = r.from_int_terms(&[(1, &[2]), (2, &[1]), (1, &[0])]); // (x+1)^2
        let d = f.gcd(&g).unwrap();
        assert_eq!(d, r.from_int_terms(&[(1, &[1]), (1, &[0])]));

        let r2 = qring(&["x", "y"]);
        let a = r2.from_int_terms(&[(1, &[1, 1]), (1, &[0, 1])]); // xy + y = y(x+1)
        let b = r2.from_int_terms(&[(1, &[2, 0]), (2, &[1, 0]), (1, &[0, 0])]); // (x+1)^2
        let d2 = a.gcd(&b).unwrap();
        assert_eq!(d2, r2.from_int_terms(&[(1, &[1, 0]), (1, &[0, 0])]));
        // coprime
        let c = r2.from_int_terms(&[(1, &[0, 1]), (1, &[0, 0])]); // y+1
        assert!(b.gcd(&c).unwrap().is_constant());
    }

    #[test]
    fn exact_division() {
        let r = qring(&["x", "y"]);
        let f = r.from_int_terms(&[(1, &[2, 1]), (1, &[1, 2])]); // x^2y + xy^2
        let g = r.from_int_terms(&[(1, &[1, 0]), (1, &[0, 1])]); // x + y
        let q = f.exact_div(&g).unwrap();
        assert_eq!(q, r.from_int_terms(&[(1, &[1, 1])]));
        let h = r.from_int_terms(&[(1, &[1, 0]), (1, &[0, 0])]);
        assert!(f.exact_div(&h).is_none());
    }

    #[test]
    fn print_is_canonical() {
        let r = qring(&["x", "y"]);
        let f = r.from_int_terms(&[(-1, &[0, 0]), (-1, &[1, 1]), (1, &[0, 2])]);
        assert_eq!(r.format(&f), "y^2-x*y-1");
    }
}
