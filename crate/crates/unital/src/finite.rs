//! Exhaustive finite-ring oracle: small commutative rings as explicit
//! addition/multiplication tables, with brute-force audits of the structural
//! facts the symbolic engine relies on.
//!
//! Ring families: Z/n, binary products, Z/p[x]/(f), idealizations A(+)A/(g),
//! and table quotients by ideals. Ring axioms are verified on the full tables
//! at construction. Units, nilpotents, and the Jacobson radical are cached.

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;

use crate::error::{Result, UnitalError};

/// Structural description of a corpus ring, printable and rebuildable.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum FiniteDesc {
    Mod(u64),
    Product(Box<FiniteDesc>, Box<FiniteDesc>),
    /// Z/p[x]/(f) with monic f given by ascending coefficients (constant
    /// first, leading 1 omitted); degree = coeffs.len().
    PolyQuot { p: u64, coeffs: Vec<u64> },
    /// A(+)A/(g): idealization of the cyclic module A/(g).
    Idealization { base: Box<FiniteDesc>, module_gen: u64 },
    /// base/(g): quotient by the principal ideal generated by element #g.
    Quotient { base: Box<FiniteDesc>, gen: u64 },
}

impl fmt::Display for FiniteDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FiniteDesc::Mod(n) => write!(f, "Z/{}", n),
            FiniteDesc::Product(a, b) => write!(f, "prod({},{})", a, b),
            FiniteDesc::PolyQuot { p, coeffs } => {
                let mut s = format!("x^{}", coeffs.len());
                for (i, c) in coeffs.iter().enumerate().rev() {
                    if *c != 0 {
                        if i == 0 {
                            s.push_str(&format!("+{}", c));
                        } else if i == 1 {
                            s.push_str(&format!("+{}*x", c));
                        } else {
                            s.push_str(&format!("+{}*x^{}", c, i));
                        }
                    }
                }
                write!(f, "Z/{}[x]/({})", p, s)
            }
            FiniteDesc::Idealization { base, module_gen } => {
                write!(f, "idealize({},{})", base, module_gen)
            }
            FiniteDesc::Quotient { base, gen } => write!(f, "quot({},{})", base, gen),
        }
    }
}

/// A finite commutative ring as explicit tables over the carrier `0..n`.
#[derive(Debug, Clone)]
pub struct FiniteRing {
    pub desc: FiniteDesc,
    pub n: usize,
    add: Vec<u32>,
    mul: Vec<u32>,
    pub zero: usize,
    pub one: usize,
    neg: Vec<u32>,
    inv: Vec<Option<u32>>,
    nilpotent: Vec<bool>,
    jacobson: Vec<bool>,
    names: Vec<String>,
}

impl PartialEq for FiniteRing {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.add == other.add && self.mul == other.mul
    }
}

impl FiniteRing {
    pub fn add(&self, a: usize, b: usize) -> usize {
        self.add[a * self.n + b] as usize
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.n + b] as usize
    }

    pub fn neg(&self, a: usize) -> usize {
        self.neg[a] as usize
    }

    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg(b))
    }

    pub fn is_unit(&self, a: usize) -> bool {
        self.inv[a].is_some()
    }

    pub fn inverse(&self, a: usize) -> Option<usize> {
        self.inv[a].map(|x| x as usize)
    }

    pub fn is_nilpotent(&self, a: usize) -> bool {
        self.nilpotent[a]
    }

    pub fn in_jacobson(&self, a: usize) -> bool {
        self.jacobson[a]
    }

    pub fn units(&self) -> Vec<usize> {
        (0..self.n).filter(|&a| self.is_unit(a)).collect()
    }

    pub fn nilpotents(&self) -> Vec<usize> {
        (0..self.n).filter(|&a| self.is_nilpotent(a)).collect()
    }

    pub fn name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn is_field(&self) -> bool {
        self.n >= 2 && (0..self.n).all(|a| a == self.zero || self.is_unit(a))
    }

    /// Pairwise definition: every sum of two units is a unit or nilpotent.
    pub fn is_unit_additive(&self) -> bool {
        let units = self.units();
        for &u in &units {
            for &v in &units {
                let s = self.add(u, v);
                if !self.is_unit(s) && !self.is_nilpotent(s) {
                    return false;
                }
            }
        }
        true
    }

    fn from_tables(
        desc: FiniteDesc,
        n: usize,
        add: Vec<u32>,
        mul: Vec<u32>,
        names: Vec<String>,
    ) -> Result<FiniteRing> {
        if n == 0 {
            return Err(UnitalError::Internal("empty carrier".into()));
        }
        let idx = |a: usize, b: usize| a * n + b;
        // identities
        let zero = (0..n)
            .find(|&z| (0..n).all(|a| add[idx(z, a)] as usize == a))
            .ok_or_else(|| UnitalError::Internal(format!("{}: no additive identity", desc)))?;
        let one = (0..n)
            .find(|&o| (0..n).all(|a| mul[idx(o, a)] as usize == a))
            .ok_or_else(|| UnitalError::Internal(format!("{}: no multiplicative identity", desc)))?;
        // commutativity
        for a in 0..n {
            for b in 0..n {
                if add[idx(a, b)] != add[idx(b, a)] || mul[idx(a, b)] != mul[idx(b, a)] {
                    return Err(UnitalError::Internal(format!("{}: not commutative", desc)));
                }
            }
        }
        // associativity + distributivity on the full tables
        for a in 0..n {
            for b in 0..n {
                let ab_add = add[idx(a, b)] as usize;
                let ab_mul = mul[idx(a, b)] as usize;
                for c in 0..n {
                    if add[idx(ab_add, c)] != add[idx(a, add[idx(b, c)] as usize)] {
                        return Err(UnitalError::Internal(format!("{}: + not associative", desc)));
                    }
                    if mul[idx(ab_mul, c)] != mul[idx(a, mul[idx(b, c)] as usize)] {
                        return Err(UnitalError::Internal(format!("{}: * not associative", desc)));
                    }
                    let lhs = mul[idx(a, add[idx(b, c)] as usize)];
                    let rhs = add[idx(mul[idx(a, b)] as usize, mul[idx(a, c)] as usize)];
                    if lhs != rhs {
                        return Err(UnitalError::Internal(format!("{}: not distributive", desc)));
                    }
                }
            }
        }
        // additive inverses
        let mut neg = vec![0u32; n];
        for a in 0..n {
            let m = (0..n)
                .find(|&b| add[idx(a, b)] as usize == zero)
                .ok_or_else(|| UnitalError::Internal(format!("{}: missing -{}", desc, a)))?;
            neg[a] = m as u32;
        }
        // units: elements with a multiplicative inverse
        let mut inv = vec![None; n];
        for a in 0..n {
            inv[a] = (0..n).find(|&b| mul[idx(a, b)] as usize == one).map(|b| b as u32);
        }
        // nilpotents: repeated squaring reaches zero
        let mut nilpotent = vec![false; n];
        for a in 0..n {
            let mut x = a;
            for _ in 0..(usize::BITS - n.leading_zeros() + 1) {
                x = mul[idx(x, x)] as usize;
                if x == zero {
                    break;
                }
            }
            nilpotent[a] = x == zero || a == zero;
        }
        // Jacobson radical via quasi-regularity: x in Jac iff 1 - x*y is a
        // unit for every y.
        let unit_flag: Vec<bool> = inv.iter().map(|i| i.is_some()).collect();
        let mut jacobson = vec![false; n];
        for a in 0..n {
            jacobson[a] = (0..n).all(|y| {
                let xy = mul[idx(a, y)] as usize;
                let one_minus = add[idx(one, neg[xy] as usize)] as usize;
                unit_flag[one_minus]
            });
        }
        Ok(FiniteRing { desc, n, add, mul, zero, one, neg, inv, nilpotent, jacobson, names })
    }

    pub fn zmod(n: u64) -> Result<FiniteRing> {
        if n < 1 || n > 4096 {
            return Err(UnitalError::Unsupported(format!("Z/{} out of range", n)));
        }
        let n = n as usize;
        let mut add = vec![0u32; n * n];
        let mut mul = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                add[a * n + b] = ((a + b) % n) as u32;
                mul[a * n + b] = ((a * b) % n) as u32;
            }
        }
        let names = (0..n).map(|a| a.to_string()).collect();
        FiniteRing::from_tables(FiniteDesc::Mod(n as u64), n, add, mul, names)
    }

    pub fn product(a: &FiniteRing, b: &FiniteRing) -> Result<FiniteRing> {
        let n = a.n * b.n;
        if n > 4096 {
            return Err(UnitalError::Unsupported("product too large".into()));
        }
        let enc = |x: usize, y: usize| x * b.n + y;
        let mut add = vec![0u32; n * n];
        let mut mul = vec![0u32; n * n];
        for x1 in 0..a.n {
            for y1 in 0..b.n {
                for x2 in 0..a.n {
                    for y2 in 0..b.n {
                        let i = enc(x1, y1) * n + enc(x2, y2);
                        add[i] = enc(a.add(x1, x2), b.add(y1, y2)) as u32;
                        mul[i] = enc(a.mul(x1, x2), b.mul(y1, y2)) as u32;
                    }
                }
            }
        }
        let mut names = vec![String::new(); n];
        for x in 0..a.n {
            for y in 0..b.n {
                names[enc(x, y)] = format!("({},{})", a.name(x), b.name(y));
            }
        }
        let desc = FiniteDesc::Product(Box::new(a.desc.clone()), Box::new(b.desc.clone()));
        FiniteRing::from_tables(desc, n, add, mul, names)
    }

    /// Z/p[x]/(f): f monic of degree d = coeffs.len(), lower coefficients
    /// given ascending. Elements encode polynomials of degree < d in base p.
    pub fn polyquot(p: u64, coeffs: &[u64]) -> Result<FiniteRing> {
        let d = coeffs.len();
        if d == 0 || d > 3 {
            return Err(UnitalError::Unsupported("degree must be 1..=3".into()));
        }
        let pu = p as usize;
        let n = pu.pow(d as u32);
        if n > 4096 {
            return Err(UnitalError::Unsupported("quotient too large".into()));
        }
        let decode = |mut e: usize| {
            let mut v = vec![0usize; d];
            for c in v.iter_mut() {
                *c = e % pu;
                e /= pu;
            }
            v
        };
        let encode = |v: &[usize]| v.iter().rev().fold(0usize, |acc, &c| acc * pu + c);
        // x^d = -(lower coefficients); iterate for x^(d+1), ..., x^(2d-2)
        let base: Vec<usize> = coeffs.iter().map(|&c| ((p - (c % p)) % p) as usize).collect();
        let mut xpow: Vec<Vec<usize>> = vec![base.clone()];
        for _ in 1..d {
            let prev = xpow.last().unwrap().clone();
            let mut next = vec![0usize; d];
            for i in 0..d - 1 {
                next[i + 1] = prev[i];
            }
            let hi = prev[d - 1];
            for i in 0..d {
                next[i] = (next[i] + hi * base[i]) % pu;
            }
            xpow.push(next);
        }
        let mut add = vec![0u32; n * n];
        let mut mul = vec![0u32; n * n];
        for e1 in 0..n {
            let v1 = decode(e1);
            for e2 in 0..n {
                let v2 = decode(e2);
                let sum: Vec<usize> = v1.iter().zip(&v2).map(|(a, b)| (a + b) % pu).collect();
                add[e1 * n + e2] = encode(&sum) as u32;
                let mut prod = vec![0usize; 2 * d - 1];
                for (i, a) in v1.iter().enumerate() {
                    for (j, b) in v2.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + a * b) % pu;
                    }
                }
                let mut red = vec![0usize; d];
                red[..d].copy_from_slice(&prod[..d]);
                for (k, item) in prod.iter().enumerate().skip(d) {
                    let c = *item;
                    if c != 0 {
                        for i in 0..d {
                            red[i] = (red[i] + c * xpow[k - d][i]) % pu;
                        }
                    }
                }
                mul[e1 * n + e2] = encode(&red) as u32;
            }
        }
        let names = (0..n)
            .map(|e| {
                let v = decode(e);
                let mut parts = Vec::new();
                for (i, c) in v.iter().enumerate().rev() {
                    if *c != 0 {
                        parts.push(match i {
                            0 => c.to_string(),
                            1 if *c == 1 => "x".to_string(),
                            1 => format!("{}x", c),
                            _ if *c == 1 => format!("x^{}", i),
                            _ => format!("{}x^{}", c, i),
                        });
                    }
                }
                if parts.is_empty() {
                    "0".to_string()
                } else {
                    parts.join("+")
                }
            })
            .collect();
        let desc = FiniteDesc::PolyQuot { p, coeffs: coeffs.to_vec() };
        FiniteRing::from_tables(desc, n, add, mul, names)
    }

    /// The principal ideal (g) as a membership bitmap.
    pub fn principal_ideal(&self, g: usize) -> Vec<bool> {
        let mut m = vec![false; self.n];
        for r in 0..self.n {
            m[self.mul(r, g)] = true;
        }
        m
    }

    /// Smallest ideal containing the given elements.
    pub fn ideal_generated(&self, gens: &[usize]) -> Vec<bool> {
        let mut m = vec![false; self.n];
        m[self.zero] = true;
        for &g in gens {
            for r in 0..self.n {
                m[self.mul(r, g)] = true;
            }
        }
        let mut changed = true;
        while changed {
            changed = false;
            let members: Vec<usize> = (0..self.n).filter(|&i| m[i]).collect();
            for &a in &members {
                for &b in &members {
                    let s = self.add(a, b);
                    if !m[s] {
                        m[s] = true;
                        changed = true;
                    }
                }
            }
        }
        m
    }

    /// All ideals, as sorted element lists (exhaustive; intended for n <= 64).
    pub fn all_ideals(&self) -> Vec<Vec<usize>> {
        let mut set: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut frontier: Vec<Vec<usize>> = Vec::new();
        for g in 0..self.n {
            let m = self.principal_ideal(g);
            let v: Vec<usize> = (0..self.n).filter(|&i| m[i]).collect();
            if set.insert(v.clone()) {
                frontier.push(v);
            }
        }
        while let Some(i1) = frontier.pop() {
            for i2 in set.clone() {
                let gens: Vec<usize> = i1.iter().chain(i2.iter()).copied().collect();
                let m = self.ideal_generated(&gens);
                let v: Vec<usize> = (0..self.n).filter(|&i| m[i]).collect();
                if set.insert(v.clone()) {
                    frontier.push(v);
                }
            }
        }
        set.into_iter().collect()
    }

    /// All unital subrings (exhaustive; intended for n <= 64).
    pub fn subrings(&self) -> Vec<Vec<usize>> {
        let close = |seed: &[usize]| -> Vec<usize> {
            let mut m = vec![false; self.n];
            m[self.zero] = true;
            m[self.one] = true;
            for &s in seed {
                m[s] = true;
            }
            let mut changed = true;
            while changed {
                changed = false;
                let members: Vec<usize> = (0..self.n).filter(|&i| m[i]).collect();
                for &a in &members {
                    for &b in &members {
                        for x in [self.add(a, b), self.mul(a, b), self.sub(a, b)] {
                            if !m[x] {
                                m[x] = true;
                                changed = true;
                            }
                        }
                    }
                }
            }
            (0..self.n).filter(|&i| m[i]).collect()
        };
        let mut set: BTreeSet<Vec<usize>> = BTreeSet::new();
        let prime = close(&[]);
        let mut frontier = vec![prime.clone()];
        set.insert(prime);
        while let Some(s) = frontier.pop() {
            for x in 0..self.n {
                if !s.contains(&x) {
                    let bigger = close(&s.iter().copied().chain([x]).collect::<Vec<_>>());
                    if set.insert(bigger.clone()) {
                        frontier.push(bigger);
                    }
                }
            }
        }
        set.into_iter().collect()
    }

    /// Quotient by an ideal; returns the quotient and the projection map.
    pub fn quotient(&self, ideal: &[bool], desc: FiniteDesc) -> Result<(FiniteRing, Vec<usize>)> {
        let members: Vec<usize> = (0..self.n).filter(|&i| ideal[i]).collect();
        let mut rep = vec![usize::MAX; self.n];
        let mut reps: Vec<usize> = Vec::new();
        for a in 0..self.n {
            if rep[a] != usize::MAX {
                continue;
            }
            let mut coset: Vec<usize> = members.iter().map(|&i| self.add(a, i)).collect();
            coset.sort_unstable();
            coset.dedup();
            let canon = coset[0];
            if rep[canon] == usize::MAX {
                reps.push(canon);
            }
            for c in coset {
                rep[c] = canon;
            }
        }
        reps.sort_unstable();
        let index_of = |x: usize| reps.binary_search(&rep[x]).unwrap();
        let m = reps.len();
        let mut add = vec![0u32; m * m];
        let mut mul = vec![0u32; m * m];
        for (i, &a) in reps.iter().enumerate() {
            for (j, &b) in reps.iter().enumerate() {
                add[i * m + j] = index_of(self.add(a, b)) as u32;
                mul[i * m + j] = index_of(self.mul(a, b)) as u32;
            }
        }
        let names = reps.iter().map(|&r| format!("[{}]", self.name(r))).collect();
        let q = FiniteRing::from_tables(desc, m, add, mul, names)?;
        let proj: Vec<usize> = (0..self.n).map(index_of).collect();
        Ok((q, proj))
    }

    /// Idealization A(+)A/(g): pairs (a, m) with (a,m)(a',m') = (aa', am'+a'm).
    pub fn idealization(&self, g: usize) -> Result<FiniteRing> {
        let ideal = self.principal_ideal(g);
        let desc = FiniteDesc::Idealization {
            base: Box::new(self.desc.clone()),
            module_gen: g as u64,
        };
        let (module, proj) = self.quotient(
            &ideal,
            FiniteDesc::Quotient { base: Box::new(self.desc.clone()), gen: g as u64 },
        )?;
        let m = module.n;
        let n = self.n * m;
        if n > 4096 {
            return Err(UnitalError::Unsupported("idealization too large".into()));
        }
        let enc = |a: usize, x: usize| a * m + x;
        // module action a.x via the smallest lift of x
        let mut lift = vec![0usize; m];
        for (x, l) in lift.iter_mut().enumerate() {
            *l = (0..self.n).find(|&r| proj[r] == x).unwrap();
        }
        let act = |a: usize, x: usize| proj[self.mul(a, lift[x])];
        let mut add = vec![0u32; n * n];
        let mut mul = vec![0u32; n * n];
        for a1 in 0..self.n {
            for x1 in 0..m {
                for a2 in 0..self.n {
                    for x2 in 0..m {
                        let i = enc(a1, x1) * n + enc(a2, x2);
                        add[i] = enc(self.add(a1, a2), module.add(x1, x2)) as u32;
                        mul[i] = enc(self.mul(a1, a2), module.add(act(a1, x2), act(a2, x1))) as u32;
                    }
                }
            }
        }
        let mut names = vec![String::new(); n];
        for a in 0..self.n {
            for x in 0..m {
                names[enc(a, x)] = format!("({};{})", self.name(a), module.name(x));
            }
        }
        FiniteRing::from_tables(desc, n, add, mul, names)
    }

    pub fn build(desc: &FiniteDesc) -> Result<FiniteRing> {
        match desc {
            FiniteDesc::Mod(n) => FiniteRing::zmod(*n),
            FiniteDesc::Product(a, b) => {
                FiniteRing::product(&FiniteRing::build(a)?, &FiniteRing::build(b)?)
            }
            FiniteDesc::PolyQuot { p, coeffs } => FiniteRing::polyquot(*p, coeffs),
            FiniteDesc::Idealization { base, module_gen } => {
                FiniteRing::build(base)?.idealization(*module_gen as usize)
            }
            FiniteDesc::Quotient { base, gen } => {
                let b = FiniteRing::build(base)?;
                let ideal = b.principal_ideal(*gen as usize);
                Ok(b.quotient(&ideal, desc.clone())?.0)
            }
        }
    }
}

/// Report of one equivalence audit.
#[derive(Debug, Clone)]
pub struct EquivalenceReport {
    pub conditions: Vec<(String, bool)>,
    pub consistent: bool,
    pub unit_additive: bool,
}

/// Evaluate the equivalent characterizations of unit-additivity by brute
/// force and check they agree: (1) u+1 for all units, (2) pairwise sums,
/// (3) U ∪ N a subring, (4) U ∪ N a zero-dimensional local subring,
/// (5) all finite sums of units, and for reduced rings (6) U ∪ {0} a field.
pub fn audit_equivalences(r: &FiniteRing) -> EquivalenceReport {
    let units = r.units();
    let in_k = |x: usize| r.is_unit(x) || r.is_nilpotent(x);

    let c1 = units.iter().all(|&u| in_k(r.add(u, r.one)));
    let c2 = units.iter().all(|&u| units.iter().all(|&v| in_k(r.add(u, v))));
    let k: Vec<usize> = (0..r.n).filter(|&x| in_k(x)).collect();
    let c3 = k.iter().all(|&a| k.iter().all(|&b| in_k(r.sub(a, b)) && in_k(r.mul(a, b))));
    let c4 = if !c3 {
        false
    } else {
        // nonunits-within-k must form an ideal of k made of nilpotents
        let unit_in_k = |x: usize| r.inverse(x).map(in_k).unwrap_or(false);
        let m: Vec<usize> = k.iter().copied().filter(|&x| !unit_in_k(x)).collect();
        let additively_closed = m.iter().all(|&a| m.iter().all(|&b| m.contains(&r.sub(a, b))));
        let absorbs = m.iter().all(|&a| k.iter().all(|&b| m.contains(&r.mul(a, b))));
        let all_nilpotent = m.iter().all(|&a| r.is_nilpotent(a));
        additively_closed && absorbs && all_nilpotent
    };
    let c5 = {
        let mut sums = vec![false; r.n];
        let mut frontier: Vec<usize> = units.clone();
        for &u in &units {
            sums[u] = true;
        }
        while let Some(s) = frontier.pop() {
            for &u in &units {
                let t = r.add(s, u);
                if !sums[t] {
                    sums[t] = true;
                    frontier.push(t);
                }
            }
        }
        (0..r.n).filter(|&x| sums[x]).all(in_k)
    };
    let mut conditions = vec![
        ("units_plus_one".to_string(), c1),
        ("pairwise_sums".to_string(), c2),
        ("subring".to_string(), c3),
        ("zero_dim_local_subring".to_string(), c4),
        ("finite_sums".to_string(), c5),
    ];
    let reduced = r.nilpotents().len() == 1;
    if reduced {
        let f: Vec<usize> = units.iter().copied().chain([r.zero]).collect();
        let closed = f
            .iter()
            .all(|&a| f.iter().all(|&b| f.contains(&r.sub(a, b)) && f.contains(&r.mul(a, b))));
        let inverses =
            units.iter().all(|&u| r.inverse(u).map(|i| f.contains(&i)).unwrap_or(false));
        conditions.push(("reduced_subfield".to_string(), closed && inverses));
    }
    let first = conditions[0].1;
    let consistent = conditions.iter().all(|(_, b)| *b == first);
    EquivalenceReport { conditions, consistent, unit_additive: first }
}

/// Quotient-by-nilpotents invariance: for I ⊆ N(R), R is unit-additive iff
/// R/I is.
pub fn audit_quotient_nil(r: &FiniteRing, ideal: &[bool]) -> Result<bool> {
    for x in 0..r.n {
        if ideal[x] && !r.is_nilpotent(x) {
            return Err(UnitalError::Internal(format!(
                "{}: ideal member {} is not nilpotent",
                r.desc,
                r.name(x)
            )));
        }
    }
    let (q, _) =
        r.quotient(ideal, FiniteDesc::Quotient { base: Box::new(r.desc.clone()), gen: 0 })?;
    Ok(r.is_unit_additive() == q.is_unit_additive())
}

/// Idealization invariance: A unit-additive iff A(+)A/(g) is.
pub fn audit_idealization(a: &FiniteRing, g: usize) -> Result<bool> {
    let ideal = a.idealization(g)?;
    Ok(a.is_unit_additive() == ideal.is_unit_additive())
}

/// Saturation transfer along the surjection R -> R/I: the preimage of the
/// units equals the saturation of 1 + I.
pub fn audit_saturation(r: &FiniteRing, ideal: &[bool]) -> Result<bool> {
    let (q, proj) =
        r.quotient(ideal, FiniteDesc::Quotient { base: Box::new(r.desc.clone()), gen: 0 })?;
    let preimage: Vec<bool> = (0..r.n).map(|x| q.is_unit(proj[x])).collect();
    let w: Vec<bool> = (0..r.n).map(|x| ideal[r.sub(x, r.one)]).collect();
    let sat: Vec<bool> = (0..r.n).map(|x| (0..r.n).any(|y| w[r.mul(x, y)])).collect();
    Ok(preimage == sat)
}

/// Intersections of unit-additive subrings stay unit-additive. Checks all
/// pairs plus `extra` seeded random larger collections.
pub fn audit_intersection(s: &FiniteRing, extra: usize, seed: u64) -> Result<bool> {
    let subs = s.subrings();
    let mut ua_subs = Vec::new();
    for elems in &subs {
        let sub = table_subring(s, elems)?;
        if sub.is_unit_additive() {
            ua_subs.push(elems.clone());
        }
    }
    let check = |collection: &[&Vec<usize>]| -> Result<bool> {
        let mut inter: Vec<usize> = collection[0].clone();
        for c in &collection[1..] {
            inter.retain(|x| c.contains(x));
        }
        let sub = table_subring(s, &inter)?;
        Ok(sub.is_unit_additive())
    };
    for a in &ua_subs {
        for b in &ua_subs {
            if !check(&[a, b])? {
                return Ok(false);
            }
        }
    }
    let mut state = seed | 1;
    for _ in 0..extra {
        if ua_subs.is_empty() {
            break;
        }
        let mut pick = Vec::new();
        for _ in 0..3 {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            pick.push(&ua_subs[(state as usize) % ua_subs.len()]);
        }
        if !check(&pick)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Faithful-ideal pullback: for subrings R of S containing an ideal I of S
/// that is faithful over R, S unit-additive implies R unit-additive.
pub fn audit_pullback(s: &FiniteRing) -> Result<bool> {
    if !s.is_unit_additive() {
        return Ok(true); // implication is vacuous
    }
    let ideals = s.all_ideals();
    for elems in s.subrings() {
        let r = table_subring(s, &elems)?;
        for ideal in &ideals {
            if !ideal.iter().all(|x| elems.contains(x)) {
                continue;
            }
            if ideal.iter().all(|&i| i == s.zero) {
                continue;
            }
            let faithful = elems
                .iter()
                .all(|&rr| rr == s.zero || ideal.iter().any(|&i| s.mul(rr, i) != s.zero));
            if !faithful {
                continue;
            }
            if !r.is_unit_additive() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Restrict the tables of `s` to the subring on `elems`.
fn table_subring(s: &FiniteRing, elems: &[usize]) -> Result<FiniteRing> {
    let m = elems.len();
    let pos = |x: usize| elems.binary_search(&x).unwrap();
    let mut add = vec![0u32; m * m];
    let mut mul = vec![0u32; m * m];
    for (i, &a) in elems.iter().enumerate() {
        for (j, &b) in elems.iter().enumerate() {
            add[i * m + j] = pos(s.add(a, b)) as u32;
            mul[i * m + j] = pos(s.mul(a, b)) as u32;
        }
    }
    let names = elems.iter().map(|&e| s.name(e).to_string()).collect();
    FiniteRing::from_tables(s.desc.clone(), m, add, mul, names)
}

/// The standard audit corpus, as rebuildable descriptors.
pub fn standard_corpus() -> Vec<FiniteDesc> {
    let mut out = Vec::new();
    for n in 2..=128u64 {
        out.push(FiniteDesc::Mod(n));
    }
    for a in 2..=16u64 {
        for b in a..=256 / a {
            out.push(FiniteDesc::Product(
                Box::new(FiniteDesc::Mod(a)),
                Box::new(FiniteDesc::Mod(b)),
            ));
        }
    }
    for p in [2u64, 3, 5, 7, 11] {
        for c0 in 0..p {
            for c1 in 0..p {
                out.push(FiniteDesc::PolyQuot { p, coeffs: vec![c0, c1] });
            }
        }
    }
    for p in [2u64, 3, 5] {
        for c0 in 0..p {
            for c1 in 0..p {
                for c2 in 0..p {
                    out.push(FiniteDesc::PolyQuot { p, coeffs: vec![c0, c1, c2] });
                }
            }
        }
    }
    let bases: Vec<FiniteDesc> = out.clone();
    // quotients by nontrivial principal ideals
    for base in &bases {
        if let Ok(r) = FiniteRing::build(base) {
            let mut seen = BTreeSet::new();
            for g in 0..r.n {
                let ideal = r.principal_ideal(g);
                let members: Vec<usize> = (0..r.n).filter(|&i| ideal[i]).collect();
                if members.len() <= 1 || members.len() == r.n {
                    continue;
                }
                if seen.insert(members) {
                    out.push(FiniteDesc::Quotient { base: Box::new(base.clone()), gen: g as u64 });
                }
            }
        }
    }
    // idealizations, size-capped
    for base in &bases {
        if let Ok(r) = FiniteRing::build(base) {
            let mut seen = BTreeSet::new();
            for g in 0..r.n {
                let ideal = r.principal_ideal(g);
                let members: Vec<usize> = (0..r.n).filter(|&i| ideal[i]).collect();
                let quot_len = r.n / members.len();
                if r.n * quot_len > 256 {
                    continue;
                }
                if seen.insert(members) {
                    out.push(FiniteDesc::Idealization {
                        base: Box::new(base.clone()),
                        module_gen: g as u64,
                    });
                }
            }
        }
    }
    out
}

/// A small corpus for fast smoke tests.
pub fn small_corpus() -> Vec<FiniteDesc> {
    let mut out: Vec<FiniteDesc> = (2..=24u64).map(FiniteDesc::Mod).collect();
    for (a, b) in [(2, 2), (2, 3), (3, 3), (2, 6), (4, 6)] {
        out.push(FiniteDesc::Product(Box::new(FiniteDesc::Mod(a)), Box::new(FiniteDesc::Mod(b))));
    }
    out.push(FiniteDesc::PolyQuot { p: 2, coeffs: vec![1, 1] }); // F_4
    out.push(FiniteDesc::PolyQuot { p: 3, coeffs: vec![0, 0] }); // Z/3[x]/(x^2)
    out.push(FiniteDesc::Idealization { base: Box::new(FiniteDesc::Mod(4)), module_gen: 1 });
    out.push(FiniteDesc::Idealization { base: Box::new(FiniteDesc::Mod(6)), module_gen: 1 });
    out
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct AuditViolation {
    pub ring: String,
    pub audit: String,
    pub detail: String,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct AuditReport {
    pub rings_audited: usize,
    pub violations: Vec<AuditViolation>,
}

/// Run every audit over the corpus. Rings are independent, so the corpus is
/// processed in parallel; the report is merged in corpus order.
pub fn run_corpus_audits(corpus: &[FiniteDesc]) -> AuditReport {
    let results: Vec<Vec<AuditViolation>> = corpus.par_iter().map(audit_one).collect();
    AuditReport { rings_audited: corpus.len(), violations: results.into_iter().flatten().collect() }
}

fn audit_one(desc: &FiniteDesc) -> Vec<AuditViolation> {
    let mut violations = Vec::new();
    let mut fail = |audit: &str, detail: String| {
        violations.push(AuditViolation {
            ring: desc.to_string(),
            audit: audit.to_string(),
            detail,
        });
    };
    let r = match FiniteRing::build(desc) {
        Ok(r) => r,
        Err(e) => {
            fail("construction", e.to_string());
            return violations;
        }
    };
    let eq = audit_equivalences(&r);
    if !eq.consistent {
        fail("equivalences", format!("{:?}", eq.conditions));
    }
    for x in 0..r.n {
        if r.in_jacobson(x) != r.is_nilpotent(x) {
            fail("jacobson_eq_nilradical", format!("element {}", r.name(x)));
            break;
        }
    }
    let mut nil_ideals: BTreeSet<Vec<usize>> = BTreeSet::new();
    for &g in r.nilpotents().iter() {
        let ideal = r.principal_ideal(g);
        if (0..r.n).all(|i| !ideal[i] || r.is_nilpotent(i)) {
            nil_ideals.insert((0..r.n).filter(|&i| ideal[i]).collect());
        }
    }
    nil_ideals.insert(r.nilpotents());
    for members in &nil_ideals {
        let mut ideal = vec![false; r.n];
        for &m in members {
            ideal[m] = true;
        }
        match audit_quotient_nil(&r, &ideal) {
            Ok(true) => {}
            Ok(false) => fail("quotient_nil", format!("ideal {:?}", members)),
            Err(e) => fail("quotient_nil", e.to_string()),
        }
    }
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    for g in 0..r.n {
        let ideal = r.principal_ideal(g);
        let members: Vec<usize> = (0..r.n).filter(|&i| ideal[i]).collect();
        if !seen.insert(members.clone()) {
            continue;
        }
        match audit_saturation(&r, &ideal) {
            Ok(true) => {}
            Ok(false) => fail("saturation", format!("ideal {:?}", members)),
            Err(e) => fail("saturation", e.to_string()),
        }
    }
    if let FiniteDesc::Idealization { base, module_gen } = desc {
        match FiniteRing::build(base) {
            Ok(a) => match audit_idealization(&a, *module_gen as usize) {
                Ok(true) => {}
                Ok(false) => fail("idealization", format!("module gen {}", module_gen)),
                Err(e) => fail("idealization", e.to_string()),
            },
            Err(e) => fail("idealization", e.to_string()),
        }
    }
    if r.n <= 64 {
        match audit_intersection(&r, 8, 0x5eed) {
            Ok(true) => {}
            Ok(false) => fail("intersection", "some intersection not unit-additive".into()),
            Err(e) => fail("intersection", e.to_string()),
        }
        match audit_pullback(&r) {
            Ok(true) => {}
            Ok(false) => fail("pullback", "faithful-ideal pullback violated".into()),
            Err(e) => fail("pullback", e.to_string()),
        }
    }
    violations
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zmod4_is_unit_additive() {
        let r = FiniteRing::zmod(4).unwrap();
        // units {1,3}: 1+3=0, 1+1=2 with 2^2=0, 3+3=2
        assert!(r.is_unit_additive());
        let eq = audit_equivalences(&r);
        assert!(eq.consistent);
        assert!(eq.unit_additive);
    }

    #[test]
    fn zmod6_is_not_unit_additive() {
        let r = FiniteRing::zmod(6).unwrap();
        // 1+1 = 2 is neither a unit nor nilpotent
        assert!(!r.is_unit_additive());
        let eq = audit_equivalences(&r);
        assert!(eq.consistent);
        assert!(!eq.unit_additive);
    }

    #[test]
    fn f2_squared_is_unit_additive() {
        let f2 = FiniteRing::zmod(2).unwrap();
        let r = FiniteRing::product(&f2, &f2).unwrap();
        // only unit is (1,1); (1,1)+(1,1) = (0,0)
        assert_eq!(r.units().len(), 1);
        assert!(r.is_unit_additive());
        assert!(audit_equivalences(&r).consistent);
    }

    #[test]
    fn nilpotents_and_units_of_zmod4() {
        let r = FiniteRing::zmod(4).unwrap();
        assert!(r.is_nilpotent(2));
        assert!(r.is_nilpotent(0));
        assert!(!r.is_nilpotent(1));
        assert!(r.is_unit(3));
        assert!(!r.is_unit(2));
    }

    #[test]
    fn quotient_nil_examples() {
        let z4 = FiniteRing::zmod(4).unwrap();
        assert!(audit_quotient_nil(&z4, &z4.principal_ideal(2)).unwrap());
        let z12 = FiniteRing::zmod(12).unwrap();
        // (6): 6^2 = 36 = 0 mod 12
        assert!(audit_quotient_nil(&z12, &z12.principal_ideal(6)).unwrap());
        assert!(audit_quotient_nil(&z12, &z12.principal_ideal(0)).unwrap());
        assert!(audit_quotient_nil(&z12, &z12.principal_ideal(2)).is_err());
    }

    #[test]
    fn idealization_examples() {
        let z4 = FiniteRing::zmod(4).unwrap();
        assert!(audit_idealization(&z4, 1).unwrap());
        let z6 = FiniteRing::zmod(6).unwrap();
        assert!(audit_idealization(&z6, 1).unwrap());
        let f3 = FiniteRing::zmod(3).unwrap();
        assert!(audit_idealization(&f3, 1).unwrap());
        let ide = f3.idealization(1).unwrap();
        assert!(ide.is_unit_additive());
        assert_eq!(ide.n, 9);
    }

    #[test]
    fn saturation_examples() {
        let z12 = FiniteRing::zmod(12).unwrap();
        assert!(audit_saturation(&z12, &z12.principal_ideal(4)).unwrap());
        let z8 = FiniteRing::zmod(8).unwrap();
        assert!(audit_saturation(&z8, &z8.principal_ideal(2)).unwrap());
        assert!(audit_saturation(&z8, &z8.principal_ideal(0)).unwrap());
    }

    #[test]
    fn intersection_examples() {
        let z4 = FiniteRing::zmod(4).unwrap();
        assert!(audit_intersection(&z4, 4, 1).unwrap());
        let f2 = FiniteRing::zmod(2).unwrap();
        let s = FiniteRing::product(&f2, &f2).unwrap();
        assert!(audit_intersection(&s, 4, 1).unwrap());
    }

    #[test]
    fn pullback_examples() {
        let f4 = FiniteRing::polyquot(2, &[1, 1]).unwrap();
        assert!(f4.is_field());
        assert!(audit_pullback(&f4).unwrap());
        let z4 = FiniteRing::zmod(4).unwrap();
        assert!(audit_pullback(&z4).unwrap());
        let z6 = FiniteRing::zmod(6).unwrap();
        assert!(audit_pullback(&z6).unwrap());
    }

    #[test]
    fn f4_construction_is_a_field() {
        let f4 = FiniteRing::polyquot(2, &[1, 1]).unwrap();
        assert_eq!(f4.n, 4);
        assert_eq!(f4.units().len(), 3);
        // element 2 encodes x; x(x+1) = x^2+x = 1
        assert_eq!(f4.inverse(2), Some(3));
    }

    #[test]
    fn jacobson_matches_nilradical_on_small_corpus() {
        for desc in small_corpus() {
            let r = FiniteRing::build(&desc).unwrap();
            for x in 0..r.n {
                assert_eq!(r.in_jacobson(x), r.is_nilpotent(x), "{} at {}", desc, r.name(x));
            }
        }
    }

    #[test]
    fn small_corpus_has_no_violations() {
        let corpus = small_corpus();
        let report = run_corpus_audits(&corpus);
        assert_eq!(report.rings_audited, corpus.len());
        assert!(report.violations.is_empty(), "{:?}", report.violations);
    }

    #[test]
    fn standard_corpus_is_large_enough() {
        let corpus = standard_corpus();
        assert!(corpus.len() >= 5000, "corpus has only {} rings", corpus.len());
    }

    #[test]
    fn descriptors_rebuild() {
        for desc in small_corpus() {
            let a = FiniteRing::build(&desc).unwrap();
            let b = FiniteRing::build(&desc).unwrap();
            assert_eq!(a, b);
        }
    }
}
