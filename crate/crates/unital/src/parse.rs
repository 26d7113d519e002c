//! Ring-description DSL and polynomial syntax.
//!
//! Ring grammar:
//!
//! ```text
//! ring   := 'chain' '(' field ',' int ')'
//!         | 'Z_(' int ')' | 'Z/' int ('[x]/(' poly ')')?
//!         | 'ZZ' vartail? | field vartail?
//!         | 'prod(' ring ',' ring ')' | 'idealize(' ring ',' int ')'
//!         | 'quot(' ring ',' int ')'
//! field  := ('Q' | 'F_' int) ('(' vars ')')*
//! vartail:= '[' vars ']' ('/' '(' polylist ')')? ('[' '1/' poly ']')*
//! ```
//!
//! Polynomials use `^` for powers, `*` (optional between factors), integer
//! and rational literals, and identifiers for ring variables or adjoined
//! field generators. Printing is deterministic (terms descending in the
//! active order) and `print . parse` is the identity on canonical text.

use std::sync::Arc;

use crate::cert::ElemDoc;
use crate::error::{Result, UnitalError};
use crate::finite::{FiniteDesc, FiniteRing};
use crate::poly::{MonomialOrder, Poly, PolyFrac, PolyRing};
use crate::ring::{AffineIntRing, AffineRing, ElemRepr, RingElement, RingPresentation};
use crate::scalar::{is_prime_u64, BaseField, FieldDesc, Scalar};
use crate::tower;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(u64),
    LBracket,
    RBracket,
    LParen,
    RParen,
    Slash,
    Star,
    Caret,
    Plus,
    Minus,
    Comma,
}

#[derive(Debug, Clone)]
struct SpannedTok {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<SpannedTok>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let (mut line, mut col) = (1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (tline, tcol) = (line, col);
        let advance = |n: usize, i: &mut usize, line: &mut usize, col: &mut usize| {
            for k in 0..n {
                if chars[*i + k] == '\n' {
                    *line += 1;
                    *col = 1;
                } else {
                    *col += 1;
                }
            }
            *i += n;
        };
        if c.is_whitespace() {
            advance(1, &mut i, &mut line, &mut col);
            continue;
        }
        if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let s: String = chars[i..j].iter().collect();
            let n = s.parse::<u64>().map_err(|_| UnitalError::Parse {
                line: tline,
                col: tcol,
                msg: format!("integer literal {} out of range", s),
            })?;
            out.push(SpannedTok { tok: Tok::Int(n), line: tline, col: tcol });
            advance(j - i, &mut i, &mut line, &mut col);
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            let s: String = chars[i..j].iter().collect();
            out.push(SpannedTok { tok: Tok::Ident(s), line: tline, col: tcol });
            advance(j - i, &mut i, &mut line, &mut col);
            continue;
        }
        let tok = match c {
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '/' => Tok::Slash,
            '*' => Tok::Star,
            '^' => Tok::Caret,
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            ',' => Tok::Comma,
            other => {
                return Err(UnitalError::Parse {
                    line: tline,
                    col: tcol,
                    msg: format!("unexpected character '{}'", other),
                })
            }
        };
        out.push(SpannedTok { tok, line: tline, col: tcol });
        advance(1, &mut i, &mut line, &mut col);
    }
    Ok(out)
}

struct Cursor {
    toks: Vec<SpannedTok>,
    pos: usize,
    end_line: usize,
    end_col: usize,
}

impl Cursor {
    fn new(text: &str) -> Result<Cursor> {
        let toks = lex(text)?;
        let mut end_line = 1;
        let mut end_col = 1;
        for c in text.chars() {
            if c == '\n' {
                end_line += 1;
                end_col = 1;
            } else {
                end_col += 1;
            }
        }
        Ok(Cursor { toks, pos: 0, end_line, end_col })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|t| (t.line, t.col))
            .unwrap_or((self.end_line, self.end_col))
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        let (line, col) = self.here();
        Err(UnitalError::Parse { line, col, msg: msg.into() })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {}", what))
        }
    }

    fn expect_int(&mut self, what: &str) -> Result<u64> {
        match self.peek() {
            Some(Tok::Int(n)) => {
                let n = *n;
                self.pos += 1;
                Ok(n)
            }
            _ => self.err(format!("expected {}", what)),
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.err(format!("expected {}", what)),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }
}

/// Surface form of a ring description with elaborated polynomials.
#[derive(Debug, Clone, PartialEq)]
pub enum RingExpr {
    Affine { field: FieldDesc, vars: Vec<String>, relations: Vec<Poly>, inverted: Vec<Poly> },
    AffineInt { vars: Vec<String>, relations: Vec<Poly>, inverted: Vec<Poly> },
    Int,
    LocalInt(u64),
    Finite(FiniteDesc),
    Chain { field: FieldDesc, n: u32 },
}

pub fn parse_ring(text: &str) -> Result<RingExpr> {
    let mut cur = Cursor::new(text)?;
    let expr = parse_ring_expr(&mut cur)?;
    if !cur.at_end() {
        return cur.err("trailing input after ring description");
    }
    Ok(expr)
}

fn parse_ring_expr(cur: &mut Cursor) -> Result<RingExpr> {
    let Some(tok) = cur.peek().cloned() else {
        return cur.err("expected a ring description");
    };
    match tok {
        Tok::Ident(name) => match name.as_str() {
            "chain" => {
                cur.next();
                cur.expect(Tok::LParen, "'('")?;
                let field = parse_field(cur)?;
                cur.expect(Tok::Comma, "','")?;
                let n = cur.expect_int("chain length")?;
                cur.expect(Tok::RParen, "')'")?;
                if n == 0 {
                    return cur.err("chain length must be positive");
                }
                Ok(RingExpr::Chain { field, n: n as u32 })
            }
            "prod" => {
                cur.next();
                cur.expect(Tok::LParen, "'('")?;
                let a = parse_finite_operand(cur)?;
                cur.expect(Tok::Comma, "','")?;
                let b = parse_finite_operand(cur)?;
                cur.expect(Tok::RParen, "')'")?;
                Ok(RingExpr::Finite(FiniteDesc::Product(Box::new(a), Box::new(b))))
            }
            "idealize" => {
                cur.next();
                cur.expect(Tok::LParen, "'('")?;
                let a = parse_finite_operand(cur)?;
                cur.expect(Tok::Comma, "','")?;
                let g = cur.expect_int("module generator index")?;
                cur.expect(Tok::RParen, "')'")?;
                Ok(RingExpr::Finite(FiniteDesc::Idealization { base: Box::new(a), module_gen: g }))
            }
            "quot" => {
                cur.next();
                cur.expect(Tok::LParen, "'('")?;
                let a = parse_finite_operand(cur)?;
                cur.expect(Tok::Comma, "','")?;
                let g = cur.expect_int("ideal generator index")?;
                cur.expect(Tok::RParen, "')'")?;
                Ok(RingExpr::Finite(FiniteDesc::Quotient { base: Box::new(a), gen: g }))
            }
            "ZZ" => {
                cur.next();
                if cur.peek() == Some(&Tok::LBracket) {
                    let (vars, relations, inverted) =
                        parse_vartail(cur, &FieldDesc::rational())?;
                    Ok(RingExpr::AffineInt { vars, relations, inverted })
                } else {
                    Ok(RingExpr::Int)
                }
            }
            "Z_" => {
                cur.next();
                cur.expect(Tok::LParen, "'('")?;
                let p = cur.expect_int("prime")?;
                cur.expect(Tok::RParen, "')'")?;
                Ok(RingExpr::LocalInt(p))
            }
            "Z" => {
                cur.next();
                cur.expect(Tok::Slash, "'/'")?;
                let n = cur.expect_int("modulus")?;
                if cur.peek() == Some(&Tok::LBracket) {
                    // Z/p[x]/(f): finite polynomial quotient
                    let desc = parse_polyquot_tail(cur, n)?;
                    Ok(RingExpr::Finite(desc))
                } else {
                    Ok(RingExpr::Finite(FiniteDesc::Mod(n)))
                }
            }
            _ => {
                let field = parse_field(cur)?;
                if cur.peek() == Some(&Tok::LBracket) {
                    let (vars, relations, inverted) = parse_vartail(cur, &field)?;
                    Ok(RingExpr::Affine { field, vars, relations, inverted })
                } else {
                    Ok(RingExpr::Affine {
                        field,
                        vars: Vec::new(),
                        relations: Vec::new(),
                        inverted: Vec::new(),
                    })
                }
            }
        },
        _ => cur.err("expected a ring description"),
    }
}

fn parse_finite_operand(cur: &mut Cursor) -> Result<FiniteDesc> {
    match parse_ring_expr(cur)? {
        RingExpr::Finite(d) => Ok(d),
        _ => cur.err("expected a finite ring"),
    }
}

fn parse_polyquot_tail(cur: &mut Cursor, p: u64) -> Result<FiniteDesc> {
    cur.expect(Tok::LBracket, "'['")?;
    let var = cur.expect_ident("variable")?;
    cur.expect(Tok::RBracket, "']'")?;
    cur.expect(Tok::Slash, "'/'")?;
    cur.expect(Tok::LParen, "'('")?;
    let ring = PolyRing::new(FieldDesc::rational(), vec![var], MonomialOrder::GrevLex);
    let f = parse_poly_tokens(cur, &ring)?;
    cur.expect(Tok::RParen, "')'")?;
    let deg = f.total_degree() as usize;
    if deg == 0 {
        return cur.err("modulus polynomial must be nonconstant");
    }
    let mut coeffs = vec![0u64; deg];
    let mut leading = None;
    for (m, c) in f.terms() {
        let Scalar::Rat(r) = c else { return cur.err("integer coefficients required") };
        if !num_traits::One::is_one(r.denom()) {
            return cur.err("integer coefficients required");
        }
        let e = m.exps()[0] as usize;
        let v = ((r.numer() % BigInt::from(p) + BigInt::from(p)) % BigInt::from(p))
            .to_string()
            .parse::<u64>()
            .map_err(|_| UnitalError::Internal("residue".into()))?;
        if e == deg {
            leading = Some(v);
        } else {
            coeffs[e] = v;
        }
    }
    if leading != Some(1) {
        return cur.err("modulus polynomial must be monic");
    }
    Ok(FiniteDesc::PolyQuot { p, coeffs })
}

fn parse_field(cur: &mut Cursor) -> Result<FieldDesc> {
    let name = cur.expect_ident("field")?;
    let base = match name.as_str() {
        "Q" => BaseField::Rational,
        _ if name.starts_with("F_") => {
            let p: u64 = name[2..]
                .parse()
                .map_err(|_| {
                    let (line, col) = cur.here();
                    UnitalError::Parse { line, col, msg: format!("bad prime in {}", name) }
                })?;
            BaseField::prime(p)?
        }
        _ => return cur.err(format!("unknown field {}", name)),
    };
    let mut field = FieldDesc { base, frac_vars: Vec::new() };
    while cur.peek() == Some(&Tok::LParen) {
        cur.next();
        let mut vars = vec![cur.expect_ident("variable")?];
        while cur.peek() == Some(&Tok::Comma) {
            cur.next();
            vars.push(cur.expect_ident("variable")?);
        }
        cur.expect(Tok::RParen, "')'")?;
        field = field.extend_by_fractions(&vars)?;
    }
    Ok(field)
}

fn parse_vartail(
    cur: &mut Cursor,
    field: &FieldDesc,
) -> Result<(Vec<String>, Vec<Poly>, Vec<Poly>)> {
    cur.expect(Tok::LBracket, "'['")?;
    let mut vars = vec![cur.expect_ident("variable")?];
    while cur.peek() == Some(&Tok::Comma) {
        cur.next();
        vars.push(cur.expect_ident("variable")?);
    }
    cur.expect(Tok::RBracket, "']'")?;
    for v in &vars {
        if vars.iter().filter(|w| *w == v).count() > 1 || field.frac_vars.contains(v) {
            return Err(UnitalError::NameCollision(v.clone()));
        }
    }
    let ring = PolyRing::new(field.clone(), vars.clone(), MonomialOrder::GrevLex);
    let mut relations = Vec::new();
    if cur.peek() == Some(&Tok::Slash) {
        cur.next();
        cur.expect(Tok::LParen, "'('")?;
        relations.push(parse_poly_tokens(cur, &ring)?);
        while cur.peek() == Some(&Tok::Comma) {
            cur.next();
            relations.push(parse_poly_tokens(cur, &ring)?);
        }
        cur.expect(Tok::RParen, "')'")?;
    }
    let mut inverted = Vec::new();
    while cur.peek() == Some(&Tok::LBracket) {
        cur.next();
        match cur.peek() {
            Some(Tok::Int(1)) => {
                cur.next();
            }
            _ => return cur.err("expected '1/' in localization bracket"),
        }
        cur.expect(Tok::Slash, "'/'")?;
        inverted.push(parse_poly_tokens(cur, &ring)?);
        cur.expect(Tok::RBracket, "']'")?;
    }
    Ok((vars, relations, inverted))
}

/// Elaborate a surface expression into a presentation.
pub fn elaborate(expr: &RingExpr) -> Result<Arc<RingPresentation>> {
    elaborate_with_order(expr, MonomialOrder::GrevLex)
}

pub fn elaborate_with_order(
    expr: &RingExpr,
    order: MonomialOrder,
) -> Result<Arc<RingPresentation>> {
    match expr {
        RingExpr::Affine { field, vars, relations, inverted } => {
            let ring = PolyRing::new(field.clone(), vars.clone(), order);
            Ok(Arc::new(RingPresentation::Affine(AffineRing::new(
                ring,
                relations.clone(),
                inverted.clone(),
                true,
            )?)))
        }
        RingExpr::AffineInt { vars, relations, inverted } => {
            if !inverted.is_empty() {
                return Err(UnitalError::Unsupported(
                    "formal inversion over ZZ coefficients; localize over Q instead".into(),
                ));
            }
            Ok(Arc::new(RingPresentation::AffineInt(AffineIntRing::new(
                vars.clone(),
                relations.clone(),
            )?)))
        }
        RingExpr::Int => Ok(Arc::new(RingPresentation::Int)),
        RingExpr::LocalInt(p) => {
            if *p >= (1 << 31) {
                return Err(UnitalError::PrimeTooLarge(*p));
            }
            if !is_prime_u64(*p) {
                return Err(UnitalError::NotPrime(*p));
            }
            Ok(Arc::new(RingPresentation::LocalInt(*p as u32)))
        }
        RingExpr::Finite(desc) => {
            Ok(Arc::new(RingPresentation::Finite(FiniteRing::build(desc)?)))
        }
        RingExpr::Chain { field, n } => {
            let chain = tower::chain_ring(*n, field)?;
            Ok(Arc::new(RingPresentation::Affine(chain.ring)))
        }
    }
}

pub fn parse_ring_to_presentation(text: &str) -> Result<Arc<RingPresentation>> {
    elaborate(&parse_ring(text)?)
}

pub fn print_ring_expr(expr: &RingExpr) -> String {
    match expr {
        RingExpr::Affine { field, vars, relations, inverted } => {
            let ring = PolyRing::new(field.clone(), vars.clone(), MonomialOrder::GrevLex);
            print_affine(&ring, field, vars, relations, inverted, false)
        }
        RingExpr::AffineInt { vars, relations, inverted } => {
            let ring = PolyRing::new(FieldDesc::rational(), vars.clone(), MonomialOrder::GrevLex);
            print_affine(&ring, &FieldDesc::rational(), vars, relations, inverted, true)
        }
        RingExpr::Int => "ZZ".to_string(),
        RingExpr::LocalInt(p) => format!("Z_({})", p),
        RingExpr::Finite(d) => d.to_string(),
        RingExpr::Chain { field, n } => format!("chain({},{})", field, n),
    }
}

fn print_affine(
    ring: &PolyRing,
    field: &FieldDesc,
    vars: &[String],
    relations: &[Poly],
    inverted: &[Poly],
    over_int: bool,
) -> String {
    let mut s = if over_int { "ZZ".to_string() } else { field.to_string() };
    if !vars.is_empty() {
        s.push_str(&format!("[{}]", vars.join(",")));
    }
    if !relations.is_empty() {
        let rels: Vec<String> = relations.iter().map(|r| ring.format(r)).collect();
        s.push_str(&format!("/({})", rels.join(",")));
    }
    for d in inverted {
        let ds = ring.format(d);
        if ds.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            s.push_str(&format!("[1/{}]", ds));
        } else {
            s.push_str(&format!("[1/({})]", ds));
        }
    }
    s
}

pub fn print_presentation(pres: &RingPresentation) -> String {
    match pres {
        RingPresentation::Affine(a) => {
            if let Some(n) = a.chain_tag {
                return format!("chain({},{})", a.ring.field, n);
            }
            print_affine(&a.ring, &a.ring.field, &a.ring.vars, &a.relations, &a.inverted, false)
        }
        RingPresentation::AffineInt(z) => print_affine(
            &z.lift.ring,
            &FieldDesc::rational(),
            &z.lift.ring.vars,
            &z.lift.relations,
            &z.lift.inverted,
            true,
        ),
        RingPresentation::Int => "ZZ".to_string(),
        RingPresentation::LocalInt(p) => format!("Z_({})", p),
        RingPresentation::Finite(f) => f.desc.to_string(),
    }
}

/// Parse a polynomial over the given ring; identifiers resolve to ring
/// variables first, then to adjoined field generators.
pub fn parse_poly(ring: &PolyRing, text: &str) -> Result<Poly> {
    let mut cur = Cursor::new(text)?;
    let p = parse_poly_tokens(&mut cur, ring)?;
    if !cur.at_end() {
        return cur.err("trailing input after polynomial");
    }
    Ok(p)
}

fn parse_poly_tokens(cur: &mut Cursor, ring: &PolyRing) -> Result<Poly> {
    let frac = parse_frac_expr(cur, ring)?;
    match frac.as_poly() {
        Some(p) => Ok(p),
        None => cur.err("expected a polynomial, found a proper fraction"),
    }
}

/// Parse an expression as a fraction of polynomials over the ring.
pub fn parse_frac(ring: &PolyRing, text: &str) -> Result<PolyFrac> {
    let mut cur = Cursor::new(text)?;
    let f = parse_frac_expr(&mut cur, ring)?;
    if !cur.at_end() {
        return cur.err("trailing input after expression");
    }
    Ok(f)
}

fn parse_frac_expr(cur: &mut Cursor, ring: &PolyRing) -> Result<PolyFrac> {
    let mut negate = false;
    if cur.peek() == Some(&Tok::Minus) {
        cur.next();
        negate = true;
    }
    let mut acc = parse_frac_term(cur, ring)?;
    if negate {
        acc = PolyFrac { num: acc.num.neg(), den: acc.den };
    }
    loop {
        match cur.peek() {
            Some(Tok::Plus) => {
                cur.next();
                let t = parse_frac_term(cur, ring)?;
                acc = acc.add(&t)?;
            }
            Some(Tok::Minus) => {
                cur.next();
                let t = parse_frac_term(cur, ring)?;
                acc = acc.sub(&t)?;
            }
            _ => break,
        }
    }
    Ok(acc)
}

fn parse_frac_term(cur: &mut Cursor, ring: &PolyRing) -> Result<PolyFrac> {
    let mut acc = parse_frac_factor(cur, ring)?;
    loop {
        match cur.peek() {
            Some(Tok::Star) => {
                cur.next();
                let f = parse_frac_factor(cur, ring)?;
                acc = acc.mul(&f)?;
            }
            Some(Tok::Slash) => {
                cur.next();
                let f = parse_frac_factor(cur, ring)?;
                if f.is_zero() {
                    return cur.err("division by zero");
                }
                acc = acc.mul(&f.inv()?)?;
            }
            // implicit multiplication
            Some(Tok::Ident(_)) | Some(Tok::Int(_)) | Some(Tok::LParen) => {
                let f = parse_frac_factor(cur, ring)?;
                acc = acc.mul(&f)?;
            }
            _ => break,
        }
    }
    Ok(acc)
}

fn parse_frac_factor(cur: &mut Cursor, ring: &PolyRing) -> Result<PolyFrac> {
    let base = parse_frac_atom(cur, ring)?;
    if cur.peek() == Some(&Tok::Caret) {
        cur.next();
        let e = cur.expect_int("exponent")?;
        if e > u32::MAX as u64 {
            return cur.err("exponent out of range");
        }
        return base.pow(e as u32);
    }
    Ok(base)
}

fn parse_frac_atom(cur: &mut Cursor, ring: &PolyRing) -> Result<PolyFrac> {
    match cur.peek().cloned() {
        Some(Tok::Int(n)) => {
            cur.next();
            if n > i64::MAX as u64 {
                return cur.err("integer literal out of range");
            }
            Ok(PolyFrac::from_poly(ring.constant(ring.field.from_int(n as i64))))
        }
        Some(Tok::Ident(name)) => {
            cur.next();
            if let Some(i) = ring.var_index(&name) {
                return Ok(PolyFrac::from_poly(ring.var_poly(i)));
            }
            if let Some(i) = ring.field.frac_vars.iter().position(|v| *v == name) {
                return Ok(PolyFrac::from_poly(ring.constant(ring.field.frac_generator(i))));
            }
            let (line, col) = cur.here();
            Err(UnitalError::Parse {
                line,
                col,
                msg: format!("unknown variable {}", name),
            })
        }
        Some(Tok::LParen) => {
            cur.next();
            let inner = parse_frac_expr(cur, ring)?;
            cur.expect(Tok::RParen, "')'")?;
            Ok(inner)
        }
        Some(Tok::Minus) => {
            cur.next();
            let inner = parse_frac_atom(cur, ring)?;
            Ok(PolyFrac { num: inner.num.neg(), den: inner.den })
        }
        _ => cur.err("expected a number, variable, or '('"),
    }
}

/// Parse an element of a presented ring. For affine localizations the
/// denominator must be a product of the formally inverted elements.
pub fn parse_element(pres: &Arc<RingPresentation>, text: &str) -> Result<RingElement> {
    match pres.as_ref() {
        RingPresentation::Affine(a) => {
            let frac = parse_frac(&a.ring, text)?;
            element_from_frac(pres, a, frac)
        }
        RingPresentation::AffineInt(z) => {
            let p = parse_poly(&z.lift.ring, text)?;
            pres.element_from_poly(p)
        }
        RingPresentation::Int => {
            let r = parse_rational(text)?;
            if !num_traits::One::is_one(r.denom()) {
                return Err(UnitalError::Unsupported(format!("{} is not an integer", r)));
            }
            Ok(RingElement { ring: Arc::clone(pres), repr: ElemRepr::Int(r.numer().clone()) })
        }
        RingPresentation::LocalInt(p) => {
            let r = parse_rational(text)?;
            if (r.denom() % BigInt::from(*p)).is_zero() {
                return Err(UnitalError::Unsupported(format!(
                    "denominator of {} is divisible by {}",
                    r, p
                )));
            }
            Ok(RingElement { ring: Arc::clone(pres), repr: ElemRepr::LocalInt(r) })
        }
        RingPresentation::Finite(f) => {
            let n: usize = text
                .trim()
                .parse()
                .map_err(|_| UnitalError::Parse {
                    line: 1,
                    col: 1,
                    msg: format!("expected an element index 0..{}", f.n),
                })?;
            Ok(RingElement { ring: Arc::clone(pres), repr: ElemRepr::Finite(n % f.n) })
        }
    }
}

fn element_from_frac(
    pres: &Arc<RingPresentation>,
    a: &AffineRing,
    frac: PolyFrac,
) -> Result<RingElement> {
    let mut num = frac.num;
    let mut den = frac.den;
    let mut exps = vec![0u32; a.inverted.len()];
    // factor the denominator over the inverted list
    let mut progress = true;
    while progress && !den.is_constant() {
        progress = false;
        for (i, d) in a.inverted.iter().enumerate() {
            if d.is_constant() {
                continue;
            }
            while let Some(q) = den.exact_div(d) {
                den = q;
                exps[i] += 1;
                progress = true;
                if den.is_constant() {
                    break;
                }
            }
        }
    }
    let Some(c) = den.constant_value() else {
        return Err(UnitalError::Unsupported(format!(
            "denominator {} is not a product of inverted elements",
            a.ring.format(&den)
        )));
    };
    num = num.scalar_mul(&c.inv()?)?;
    pres.element_from_frac(num, exps)
}

pub fn parse_element_doc(pres: &Arc<RingPresentation>, doc: &ElemDoc) -> Result<RingElement> {
    match pres.as_ref() {
        RingPresentation::Affine(a) => {
            let num = parse_poly(&a.ring, &doc.num)?;
            let den = if doc.den.is_empty() { vec![0; a.inverted.len()] } else { doc.den.clone() };
            pres.element_from_frac(num, den)
        }
        _ => parse_element(pres, &doc.num),
    }
}

fn parse_rational(text: &str) -> Result<BigRational> {
    let mut cur = Cursor::new(text)?;
    let mut neg = false;
    if cur.peek() == Some(&Tok::Minus) {
        cur.next();
        neg = true;
    }
    let n = cur.expect_int("integer")?;
    let mut r = BigRational::from_integer(BigInt::from(n));
    if cur.peek() == Some(&Tok::Slash) {
        cur.next();
        let d = cur.expect_int("denominator")?;
        if d == 0 {
            return Err(UnitalError::DivisionByZero);
        }
        r /= BigRational::from_integer(BigInt::from(d));
    }
    if !cur.at_end() {
        return cur.err("trailing input after number");
    }
    Ok(if neg { -r } else { r })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_node_ring() {
        let expr = parse_ring("Q[x,y]/(y^2-x^2-x^3)").unwrap();
        let RingExpr::Affine { vars, relations, inverted, .. } = &expr else {
            panic!("affine expected")
        };
        assert_eq!(vars, &["x", "y"]);
        assert_eq!(relations.len(), 1);
        assert!(inverted.is_empty());
        assert_eq!(print_ring_expr(&expr), "Q[x,y]/(y^2-x^2-x^3)");
    }

    #[test]
    fn parses_localization() {
        let expr = parse_ring("Q[t][1/(t*(t-1))]").unwrap();
        let RingExpr::Affine { relations, inverted, .. } = &expr else { panic!() };
        assert!(relations.is_empty());
        assert_eq!(inverted.len(), 1);
        assert_eq!(print_ring_expr(&expr), "Q[t][1/(t^2-t)]");
        // printed form parses back to the same expression
        let again = parse_ring(&print_ring_expr(&expr)).unwrap();
        assert_eq!(expr, again);
    }

    #[test]
    fn syntax_error_has_position() {
        let err = parse_ring("Q[x]/(").unwrap_err();
        match err {
            UnitalError::Parse { line, col, .. } => {
                assert_eq!(line, 1);
                assert_eq!(col, 7);
            }
            other => panic!("expected parse error, got {:?}", other),
        }
    }

    #[test]
    fn parses_base_rings() {
        assert_eq!(parse_ring("ZZ").unwrap(), RingExpr::Int);
        assert_eq!(parse_ring("Z_(5)").unwrap(), RingExpr::LocalInt(5));
        assert_eq!(parse_ring("Z/12").unwrap(), RingExpr::Finite(FiniteDesc::Mod(12)));
        assert!(parse_ring("Z_(4)").is_ok()); // prime check happens at elaboration
        assert!(elaborate(&parse_ring("Z_(4)").unwrap()).is_err());
        let f5 = parse_ring("F_5[y1,y2][1/(y1*y2-1)]").unwrap();
        let RingExpr::Affine { field, .. } = &f5 else { panic!() };
        assert_eq!(field.to_string(), "F_5");
    }

    #[test]
    fn parses_integer_affine() {
        let expr = parse_ring("ZZ[x,y]/(x*y-2)").unwrap();
        let RingExpr::AffineInt { vars, relations, .. } = &expr else { panic!() };
        assert_eq!(vars.len(), 2);
        assert_eq!(relations.len(), 1);
        assert_eq!(print_ring_expr(&expr), "ZZ[x,y]/(x*y-2)");
        assert!(elaborate(&expr).is_ok());
    }

    #[test]
    fn parses_function_field_coefficients() {
        let expr = parse_ring("Q(x1)[x2]/(x2^2-x1)").unwrap();
        let RingExpr::Affine { field, .. } = &expr else { panic!() };
        assert_eq!(field.to_string(), "Q(x1)");
        assert!(elaborate(&expr).is_ok());
    }

    #[test]
    fn chain_shorthand() {
        let expr = parse_ring("chain(Q,2)").unwrap();
        assert_eq!(print_ring_expr(&expr), "chain(Q,2)");
        let pres = elaborate(&expr).unwrap();
        let a = pres.affine().unwrap();
        assert_eq!(a.ring.vars, vec!["y1", "y2"]);
        assert_eq!(a.inverted.len(), 1);
        assert_eq!(print_presentation(&pres), "chain(Q,2)");
    }

    #[test]
    fn poly_print_parse_round_trip_random() {
        let ring = PolyRing::new(
            FieldDesc::rational(),
            vec!["x".into(), "y".into(), "z".into()],
            MonomialOrder::GrevLex,
        );
        let mut state = 12345u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            state
        };
        for _ in 0..1000 {
            let mut terms = Vec::new();
            for _ in 0..(next() % 5 + 1) {
                let e = [(next() % 4) as u32, (next() % 4) as u32, (next() % 4) as u32];
                let c = (next() % 9) as i64 - 4;
                terms.push((c, e));
            }
            let refs: Vec<(i64, &[u32])> = terms.iter().map(|(c, e)| (*c, &e[..])).collect();
            let p = ring.from_int_terms(&refs);
            let printed = ring.format(&p);
            let reparsed = parse_poly(&ring, &printed).unwrap();
            assert_eq!(p, reparsed, "round trip failed for {}", printed);
        }
    }

    #[test]
    fn element_with_denominator() {
        let pres = parse_ring_to_presentation("Q[x][1/x]").unwrap();
        let e = parse_element(&pres, "1/x").unwrap();
        let ElemRepr::Affine { den, .. } = &e.repr else { panic!() };
        assert_eq!(den, &[1]);
        assert!(e.is_unit().unwrap().unit);
        // x/(x^2) reduces to exponent handling over the inverted list
        let e2 = parse_element(&pres, "(x+x^2)/x^2").unwrap();
        assert!(!e2.is_unit().unwrap().unit); // (1+x)/x is not a unit
        // denominators outside the inverted monoid are rejected
        assert!(parse_element(&pres, "1/(x+1)").is_err());
    }

    #[test]
    fn rational_coefficients() {
        let ring = PolyRing::new(FieldDesc::rational(), vec!["x".into()], MonomialOrder::GrevLex);
        let p = parse_poly(&ring, "1/2*x+1/3").unwrap();
        let doubled = p.scalar_mul(&Scalar::rat_int(6)).unwrap();
        assert_eq!(doubled, ring.from_int_terms(&[(3, &[1]), (2, &[0])]));
    }

    #[test]
    fn finite_descriptor_round_trip() {
        for text in ["prod(Z/2,Z/3)", "idealize(Z/4,1)", "quot(Z/12,2)", "Z/5[x]/(x^2+2*x+1)"] {
            let expr = parse_ring(text).unwrap();
            let printed = print_ring_expr(&expr);
            assert_eq!(parse_ring(&printed).unwrap(), expr, "{} vs {}", text, printed);
            assert!(elaborate(&expr).is_ok());
        }
    }
}
