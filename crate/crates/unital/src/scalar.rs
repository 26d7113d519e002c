//! Exact coefficient fields: arbitrary-precision rationals, prime fields,
//! and fraction fields of multivariate polynomial rings over those.
//!
//! Fraction-field towers are flattened at construction, so a field is always
//! `base` or `base(v1,...,vm)` with `base` one of Q or F_p. Every value is
//! immutable and canonically normalized: rationals in lowest terms with
//! positive denominator, prime-field residues in `0..p`, fractions reduced
//! with a monic (grevlex-leading) denominator.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Result, UnitalError};
use crate::poly::{MonomialOrder, Poly};

/// Deterministic primality check for moduli below 2^31.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BaseField {
    Rational,
    Prime(u32),
}

impl BaseField {
    pub fn prime(p: u64) -> Result<BaseField> {
        if p >= (1 << 31) {
            return Err(UnitalError::PrimeTooLarge(p));
        }
        if !is_prime_u64(p) {
            return Err(UnitalError::NotPrime(p));
        }
        Ok(BaseField::Prime(p as u32))
    }
}

impl fmt::Display for BaseField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseField::Rational => write!(f, "Q"),
            BaseField::Prime(p) => write!(f, "F_{}", p),
        }
    }
}

/// A computable field: a base field, possibly extended by a (flattened) list
/// of fraction-field variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldDesc {
    pub base: BaseField,
    pub frac_vars: Vec<String>,
}

impl FieldDesc {
    pub fn rational() -> FieldDesc {
        FieldDesc { base: BaseField::Rational, frac_vars: Vec::new() }
    }

    pub fn prime(p: u64) -> Result<FieldDesc> {
        Ok(FieldDesc { base: BaseField::prime(p)?, frac_vars: Vec::new() })
    }

    /// Extend by fraction-field variables; towers flatten into one list.
    pub fn extend_by_fractions(&self, vars: &[String]) -> Result<FieldDesc> {
        if vars.is_empty() {
            return Err(UnitalError::EmptyExtension);
        }
        let mut frac_vars = self.frac_vars.clone();
        for v in vars {
            if frac_vars.contains(v) {
                return Err(UnitalError::NameCollision(v.clone()));
            }
            frac_vars.push(v.clone());
        }
        Ok(FieldDesc { base: self.base.clone(), frac_vars })
    }

    pub fn is_fraction_field(&self) -> bool {
        !self.frac_vars.is_empty()
    }

    pub fn zero(&self) -> Scalar {
        self.from_int(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> Scalar {
        let base = match self.base {
            BaseField::Rational => Scalar::from_rational(BigRational::from_integer(BigInt::from(n))),
            BaseField::Prime(p) => Scalar::fp(p, n),
        };
        self.lift(base)
    }

    pub fn from_rat(&self, num: i64, den: i64) -> Result<Scalar> {
        if den == 0 {
            return Err(UnitalError::DivisionByZero);
        }
        let base = match self.base {
            BaseField::Rational => {
                Scalar::from_rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
            }
            BaseField::Prime(p) => Scalar::fp(p, num).div(&Scalar::fp(p, den))?,
        };
        Ok(self.lift(base))
    }

    /// Lift a base-field scalar into this field (constant fraction when the
    /// field has adjoined variables).
    pub fn lift(&self, s: Scalar) -> Scalar {
        if self.frac_vars.is_empty() {
            return s;
        }
        match s {
            Scalar::Frac(_) => s,
            base => {
                let n = self.frac_vars.len();
                let num = Poly::constant(n, MonomialOrder::GrevLex, base);
                let den = Poly::constant(n, MonomialOrder::GrevLex, self.base_one());
                Scalar::Frac(Box::new(FunFrac { field: self.clone(), num, den }))
            }
        }
    }

    /// Generator of the fraction field as a scalar, by index in `frac_vars`.
    pub fn frac_generator(&self, i: usize) -> Scalar {
        debug_assert!(i < self.frac_vars.len());
        let n = self.frac_vars.len();
        let num = Poly::var(n, MonomialOrder::GrevLex, i, self.base_one());
        let den = Poly::constant(n, MonomialOrder::GrevLex, self.base_one());
        FunFrac::new(self.clone(), num, den).expect("monomial over nonzero denominator")
    }

    /// A monomial in the fraction-field variables, as a scalar.
    pub fn frac_monomial(&self, exps: &[u32]) -> Scalar {
        debug_assert_eq!(exps.len(), self.frac_vars.len());
        let n = self.frac_vars.len();
        let num = Poly::monomial(n, MonomialOrder::GrevLex, exps, self.base_one());
        let den = Poly::constant(n, MonomialOrder::GrevLex, self.base_one());
        FunFrac::new(self.clone(), num, den).expect("monomial over nonzero denominator")
    }

    fn base_one(&self) -> Scalar {
        match self.base {
            BaseField::Rational => Scalar::from_rational(BigRational::one()),
            BaseField::Prime(p) => Scalar::fp(p, 1),
        }
    }

    /// Check a scalar belongs to this field, lifting base constants into
    /// fraction fields where needed.
    pub fn coerce(&self, s: &Scalar) -> Result<Scalar> {
        match (s, self.frac_vars.is_empty()) {
            (Scalar::Rat(_), true) if self.base == BaseField::Rational => Ok(s.clone()),
            (Scalar::Fp { p, .. }, true) if self.base == BaseField::Prime(*p) => Ok(s.clone()),
            (Scalar::Frac(fr), false) if fr.field == *self => Ok(s.clone()),
            (Scalar::Rat(_), false) if self.base == BaseField::Rational => Ok(self.lift(s.clone())),
            (Scalar::Fp { p, .. }, false) if self.base == BaseField::Prime(*p) => {
                Ok(self.lift(s.clone()))
            }
            _ => Err(UnitalError::DomainMismatch(s.field_name(), self.to_string())),
        }
    }
}

impl fmt::Display for FieldDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.base)?;
        if !self.frac_vars.is_empty() {
            write!(f, "({})", self.frac_vars.join(","))?;
        }
        Ok(())
    }
}

/// Element of a fraction field: a reduced quotient of polynomials over the
/// base field. `num` and `den` have arity `field.frac_vars.len()` and their
/// coefficients are base-field scalars (never nested fractions).
#[derive(Debug, Clone, PartialEq)]
pub struct FunFrac {
    pub field: FieldDesc,
    pub num: Poly,
    pub den: Poly,
}

impl FunFrac {
    pub fn new(field: FieldDesc, num: Poly, den: Poly) -> Result<Scalar> {
        if den.is_zero() {
            return Err(UnitalError::DivisionByZero);
        }
        let mut num = num;
        let mut den = den;
        if num.is_zero() {
            den = Poly::constant(den.nvars(), den.order(), field_base_one(&field));
        } else {
            let g = num.gcd(&den)?;
            if !g.is_constant() {
                num = num.exact_div(&g).expect("gcd divides numerator");
                den = den.exact_div(&g).expect("gcd divides denominator");
            }
            let lc = den.leading_coeff().expect("nonzero denominator").clone();
            if !lc.is_one() {
                let inv = lc.inv()?;
                num = num.scalar_mul(&inv)?;
                den = den.scalar_mul(&inv)?;
            }
        }
        Ok(Scalar::Frac(Box::new(FunFrac { field, num, den })))
    }
}

fn field_base_one(field: &FieldDesc) -> Scalar {
    match field.base {
        BaseField::Rational => Scalar::from_rational(BigRational::one()),
        BaseField::Prime(p) => Scalar::fp(p, 1),
    }
}

/// An element of some computable field.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Rat(BigRational),
    Fp { p: u32, v: u64 },
    Frac(Box<FunFrac>),
}

impl Scalar {
    pub fn from_rational(r: BigRational) -> Scalar {
        Scalar::Rat(r)
    }

    pub fn rat_int(n: i64) -> Scalar {
        Scalar::Rat(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn fp(p: u32, n: i64) -> Scalar {
        let m = p as i64;
        let v = ((n % m) + m) % m;
        Scalar::Fp { p, v: v as u64 }
    }

    pub fn field_name(&self) -> String {
        match self {
            Scalar::Rat(_) => "Q".to_string(),
            Scalar::Fp { p, .. } => format!("F_{}", p),
            Scalar::Frac(fr) => fr.field.to_string(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_zero(),
            Scalar::Fp { v, .. } => *v == 0,
            Scalar::Frac(fr) => fr.num.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_one(),
            Scalar::Fp { v, .. } => *v == 1,
            Scalar::Frac(fr) => {
                fr.num == fr.den
            }
        }
    }

    fn check_same(&self, other: &Scalar) -> Result<()> {
        let ok = match (self, other) {
            (Scalar::Rat(_), Scalar::Rat(_)) => true,
            (Scalar::Fp { p: a, .. }, Scalar::Fp { p: b, .. }) => a == b,
            (Scalar::Frac(a), Scalar::Frac(b)) => a.field == b.field,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(UnitalError::DomainMismatch(self.field_name(), other.field_name()))
        }
    }

    pub fn add(&self, other: &Scalar) -> Result<Scalar> {
        self.check_same(other)?;
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Ok(Scalar::Rat(a + b)),
            (Scalar::Fp { p, v: a }, Scalar::Fp { v: b, .. }) => {
                Ok(Scalar::Fp { p: *p, v: (a + b) % (*p as u64) })
            }
            (Scalar::Frac(a), Scalar::Frac(b)) => {
                // a/b + c/d = (ad + cb) / bd
                let num = a.num.mul(&b.den)?.add(&b.num.mul(&a.den)?)?;
                let den = a.den.mul(&b.den)?;
                FunFrac::new(a.field.clone(), num, den)
            }
            _ => unreachable!(),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Result<Scalar> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rat(a) => Scalar::Rat(-a),
            Scalar::Fp { p, v } => {
                let m = *p as u64;
                Scalar::Fp { p: *p, v: (m - v) % m }
            }
            Scalar::Frac(fr) => {
                Scalar::Frac(Box::new(FunFrac {
                    field: fr.field.clone(),
                    num: fr.num.neg(),
                    den: fr.den.clone(),
                }))
            }
        }
    }

    pub fn mul(&self, other: &Scalar) -> Result<Scalar> {
        self.check_same(other)?;
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Ok(Scalar::Rat(a * b)),
            (Scalar::Fp { p, v: a }, Scalar::Fp { v: b, .. }) => {
                Ok(Scalar::Fp { p: *p, v: (a * b) % (*p as u64) })
            }
            (Scalar::Frac(a), Scalar::Frac(b)) => {
                let num = a.num.mul(&b.num)?;
                let den = a.den.mul(&b.den)?;
                FunFrac::new(a.field.clone(), num, den)
            }
            _ => unreachable!(),
        }
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar> {
        self.mul(&other.inv()?)
    }

    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(UnitalError::DivisionByZero);
        }
        match self {
            Scalar::Rat(a) => Ok(Scalar::Rat(a.recip())),
            Scalar::Fp { p, v } => {
                // Fermat: v^(p-2) mod p.
                let m = *p as u64;
                let mut base = *v % m;
                let mut e = m - 2;
                let mut acc = 1u64;
                while e > 0 {
                    if e & 1 == 1 {
                        acc = acc * base % m;
                    }
                    base = base * base % m;
                    e >>= 1;
                }
                Ok(Scalar::Fp { p: *p, v: acc })
            }
            Scalar::Frac(fr) => FunFrac::new(fr.field.clone(), fr.den.clone(), fr.num.clone()),
        }
    }

    pub fn pow(&self, mut e: u32) -> Result<Scalar> {
        let mut acc = match self {
            Scalar::Rat(_) => Scalar::Rat(BigRational::one()),
            Scalar::Fp { p, .. } => Scalar::fp(*p, 1),
            Scalar::Frac(fr) => fr.field.one(),
        };
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            base = base.mul(&base)?;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Deterministic total order used for canonical sorting of terms,
    /// candidates and witnesses. Smaller ranks: 1, -1, 2, -2, 3/2, ...
    pub fn canon_cmp(&self, other: &Scalar) -> Ordering {
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => {
                let abs = a.abs().cmp(&b.abs());
                if abs != Ordering::Equal {
                    return abs;
                }
                // positive before negative
                b.signum().cmp(&a.signum())
            }
            (Scalar::Fp { v: a, .. }, Scalar::Fp { v: b, .. }) => a.cmp(b),
            (Scalar::Frac(a), Scalar::Frac(b)) => {
                a.num.canon_cmp(&b.num).then_with(|| a.den.canon_cmp(&b.den))
            }
            (Scalar::Rat(_), _) => Ordering::Less,
            (_, Scalar::Rat(_)) => Ordering::Greater,
            (Scalar::Fp { .. }, _) => Ordering::Less,
            (_, Scalar::Fp { .. }) => Ordering::Greater,
        }
    }

    /// Is this a constant of the base field (trivial denominator, degree 0)?
    pub fn is_base_constant(&self) -> bool {
        match self {
            Scalar::Frac(fr) => fr.num.total_degree() == 0 && fr.den.is_constant(),
            _ => true,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(r) => write!(f, "{}", r),
            Scalar::Fp { v, .. } => write!(f, "{}", v),
            Scalar::Frac(fr) => {
                let names = &fr.field.frac_vars;
                let num = fr.num.format_with(names);
                if fr.den.is_constant() {
                    write!(f, "{}", num)
                } else {
                    write!(f, "({})/({})", num, fr.den.format_with(names))
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::PolyRing;

    #[test]
    fn rational_arithmetic() {
        let half = Scalar::Rat(BigRational::new(BigInt::from(1), BigInt::from(2)));
        let third = Scalar::Rat(BigRational::new(BigInt::from(1), BigInt::from(3)));
        let sum = half.add(&third).unwrap();
        assert_eq!(sum, Scalar::Rat(BigRational::new(BigInt::from(5), BigInt::from(6))));
    }

    #[test]
    fn prime_field_arithmetic() {
        let a = Scalar::fp(5, 3);
        let b = Scalar::fp(5, 4);
        assert_eq!(a.mul(&b).unwrap(), Scalar::fp(5, 2));
        assert_eq!(a.inv().unwrap(), Scalar::fp(5, 2)); // 3*2 = 6 = 1 mod 5
    }

    #[test]
    fn mixed_fields_rejected() {
        let a = Scalar::rat_int(1);
        let b = Scalar::fp(5, 1);
        assert!(matches!(a.add(&b), Err(UnitalError::DomainMismatch(_, _))));
    }

    #[test]
    fn division_by_zero_rejected() {
        let a = Scalar::rat_int(1);
        assert!(matches!(a.div(&Scalar::rat_int(0)), Err(UnitalError::DivisionByZero)));
    }

    #[test]
    fn fraction_field_normalizes() {
        // (x^2 - 1)/(x - 1) -> x + 1, checked by cross-multiplication.
        let field = FieldDesc::rational().extend_by_fractions(&["x".to_string()]).unwrap();
        let ring = PolyRing::new(FieldDesc::rational(), vec!["x".to_string()], MonomialOrder::GrevLex);
        let num = ring.from_int_terms(&[(-1, &[0]), (1, &[2])]);
        let den = ring.from_int_terms(&[(-1, &[0]), (1, &[1])]);
        let s = FunFrac::new(field, num.clone(), den.clone()).unwrap();
        let Scalar::Frac(fr) = &s else { panic!("expected fraction") };
        // cross-multiplication oracle: (x^2-1) * reduced_den = reduced_num * (x-1)
        let lhs = num.mul(&fr.den).unwrap();
        let rhs = fr.num.mul(&den).unwrap();
        assert_eq!(lhs, rhs);
        // and the reduced value is exactly x + 1 over denominator 1
        let expect = ring.from_int_terms(&[(1, &[0]), (1, &[1])]);
        assert_eq!(fr.num, expect);
        assert!(fr.den.is_constant());
    }

    #[test]
    fn extension_flattens_and_validates() {
        let q = FieldDesc::rational();
        let qx = q.extend_by_fractions(&["x1".to_string()]).unwrap();
        assert_eq!(qx.to_string(), "Q(x1)");
        let f5 = FieldDesc::prime(5).unwrap();
        let f5x = f5.extend_by_fractions(&["x1".to_string()]).unwrap();
        let f5xy = f5x.extend_by_fractions(&["x2".to_string()]).unwrap();
        assert_eq!(f5xy.to_string(), "F_5(x1,x2)");
        assert!(matches!(q.extend_by_fractions(&[]), Err(UnitalError::EmptyExtension)));
        assert!(matches!(
            qx.extend_by_fractions(&["x1".to_string()]),
            Err(UnitalError::NameCollision(_))
        ));
    }

    #[test]
    fn primality_is_checked() {
        assert!(FieldDesc::prime(2).is_ok());
        assert!(FieldDesc::prime(2147483647).is_ok()); // 2^31 - 1
        assert!(matches!(FieldDesc::prime(4), Err(UnitalError::NotPrime(4))));
        assert!(matches!(FieldDesc::prime(1), Err(UnitalError::NotPrime(1))));
        assert!(matches!(FieldDesc::prime(1 << 31), Err(UnitalError::PrimeTooLarge(_))));
    }

    #[test]
    fn field_axioms_random() {
        // 10^4 random triples in Q and F_5: associativity, commutativity,
        // distributivity, and a/b*b = a. Exact equality throughout.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..10_000 {
            let (a, b, c) = (
                Scalar::rat_int((next() % 19) as i64 - 9),
                Scalar::rat_int((next() % 19) as i64 - 9),
                Scalar::rat_int((next() % 19) as i64 - 9),
            );
            let ab_c = a.add(&b).unwrap().add(&c).unwrap();
            let a_bc = a.add(&b.add(&c).unwrap()).unwrap();
            assert_eq!(ab_c, a_bc);
            assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
            let lhs = a.mul(&b.add(&c).unwrap()).unwrap();
            let rhs = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
            if !b.is_zero() {
                assert_eq!(a.div(&b).unwrap().mul(&b).unwrap(), a);
            }
            let (x, y, z) = (
                Scalar::fp(5, next() as i64 % 100),
                Scalar::fp(5, next() as i64 % 100),
                Scalar::fp(5, next() as i64 % 100),
            );
            assert_eq!(x.add(&y).unwrap().add(&z).unwrap(), x.add(&y.add(&z).unwrap()).unwrap());
            assert_eq!(x.mul(&y).unwrap(), y.mul(&x).unwrap());
            let l = x.mul(&y.add(&z).unwrap()).unwrap();
            let r = x.mul(&y).unwrap().add(&x.mul(&z).unwrap()).unwrap();
            assert_eq!(l, r);
            if !y.is_zero() {
                assert_eq!(x.div(&y).unwrap().mul(&y).unwrap(), x);
            }
        }
    }
}
