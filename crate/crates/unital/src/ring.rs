//! Presented rings and their elements; exact zero/nilpotent/unit tests with
//! certificates.
//!
//! Kinds: affine quotient-localizations k[x..]/P [1/D] over a computable
//! field (primeness of P is trusted input, recorded in every certificate),
//! the integers ZZ, the local integers Z_(p), integer-coefficient affine
//! quotients ZZ[x..]/P, and finite-ring handles backed by the table oracle.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::cert::{Certificate, ElemDoc};
use crate::error::{Result, UnitalError};
use crate::finite::FiniteRing;
use crate::groebner::{self, GbLimits, GroebnerBasis};
use crate::poly::{MonomialOrder, Poly, PolyFrac, PolyRing};
use crate::scalar::{is_prime_u64, FieldDesc, Scalar};

const MAX_WITNESS_POWER: u32 = 32;
const SMALL_PRIMES: [u64; 10] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29];

/// Affine quotient-localization: field, variables, relation ideal (with a
/// trusted prime-asserted flag), and formally inverted elements.
#[derive(Debug, Clone)]
pub struct AffineRing {
    pub ring: PolyRing,
    pub relations: Vec<Poly>,
    pub inverted: Vec<Poly>,
    /// extra divisor-pool elements exposed to the tower (e.g. chain f_j's)
    pub aux_pool: Vec<Poly>,
    pub prime_asserted: bool,
    /// printed as chain(field, n) when this presentation came from the
    /// chain-ring constructor
    pub chain_tag: Option<u32>,
    /// variables removed by substitution elimination, with their images
    pub eliminated: Vec<(String, PolyFrac)>,
    gb: Arc<GroebnerBasis>,
}

impl PartialEq for AffineRing {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring
            && self.relations == other.relations
            && self.inverted == other.inverted
    }
}

impl AffineRing {
    pub fn new(
        ring: PolyRing,
        relations: Vec<Poly>,
        inverted: Vec<Poly>,
        prime_asserted: bool,
    ) -> Result<AffineRing> {
        let relations: Vec<Poly> =
            relations.into_iter().filter(|r| !r.is_zero()).collect();
        let gb = groebner::buchberger(&relations, ring.nvars(), ring.order, GbLimits::default())?;
        if gb.is_unit_ideal() {
            return Err(UnitalError::UnitIdeal);
        }
        let gb = Arc::new(gb);
        for d in &inverted {
            let nf = groebner::normal_form(d, &gb)?;
            if nf.is_zero() {
                return Err(UnitalError::InvertedInIdeal(ring.format(d)));
            }
        }
        Ok(AffineRing {
            ring,
            relations,
            inverted,
            aux_pool: Vec::new(),
            prime_asserted,
            chain_tag: None,
            eliminated: Vec::new(),
            gb,
        })
    }

    pub fn gb(&self) -> &Arc<GroebnerBasis> {
        &self.gb
    }

    /// Normal form modulo the relation ideal.
    pub fn nf(&self, p: &Poly) -> Result<Poly> {
        groebner::normal_form(p, &self.gb)
    }

    /// Product of the distinct inverted elements; 1 when nothing is inverted.
    pub fn inverted_product(&self) -> Result<Poly> {
        let mut distinct: Vec<&Poly> = Vec::new();
        for d in &self.inverted {
            if !distinct.iter().any(|x| **x == *d) {
                distinct.push(d);
            }
        }
        let mut acc = self.ring.one();
        for d in distinct {
            acc = acc.mul(d)?;
        }
        Ok(acc)
    }

    /// Exact unit test for a numerator polynomial: g is a unit of the
    /// localization iff the inverted product lies in the radical of
    /// (relations + g). Produces an explicit cofactor witness or a failed
    /// radical membership.
    pub fn ring_is_unit(&self, g: &Poly) -> Result<UnitDecision> {
        let g = self.nf(g)?;
        let d = self.inverted_product()?;
        let mut gens = self.relations.clone();
        gens.push(g.clone());
        let elem_doc = ElemDoc { num: self.ring.format(&g), den: Vec::new() };
        let base_str = self.ring.format(&d);
        let member =
            groebner::radical_member(&d, &gens, self.ring.nvars(), GbLimits::default())?;
        if !member {
            return Ok(UnitDecision {
                unit: false,
                cert: Certificate::NonUnit { element: elem_doc, base: base_str, modulus: None },
            });
        }
        let tracked =
            groebner::buchberger(&gens, self.ring.nvars(), self.ring.order, GbLimits::default())?;
        for n in 0..=MAX_WITNESS_POWER {
            let dn = d.pow(n)?;
            if let Some(cof) = groebner::member_cofactors(&dn, &tracked)? {
                let h = self.nf(cof.last().expect("g is the last generator"))?;
                let check = g.mul(&h)?.sub(&dn)?;
                if !self.nf(&check)?.is_zero() {
                    return Err(UnitalError::Internal("unit witness failed verification".into()));
                }
                return Ok(UnitDecision {
                    unit: true,
                    cert: Certificate::UnitWitness {
                        element: elem_doc,
                        cofactor: self.ring.format(&h),
                        base: base_str,
                        power: n,
                    },
                });
            }
        }
        Err(UnitalError::Internal(format!(
            "radical membership holds but no witness within power {}",
            MAX_WITNESS_POWER
        )))
    }
}

/// Integer-coefficient affine quotient ZZ[x..]/P. Zero tests run in the
/// rational lift; unit tests combine the lift with mod-q reductions.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineIntRing {
    pub lift: AffineRing,
}

impl AffineIntRing {
    pub fn new(vars: Vec<String>, relations: Vec<Poly>) -> Result<AffineIntRing> {
        for r in &relations {
            for (_, c) in r.terms() {
                let Scalar::Rat(q) = c else {
                    return Err(UnitalError::Unsupported(
                        "ZZ presentations take rational literals".into(),
                    ));
                };
                if !q.denom().is_one() {
                    return Err(UnitalError::Unsupported(format!(
                        "non-integer coefficient {} over ZZ",
                        q
                    )));
                }
            }
        }
        let ring = PolyRing::new(FieldDesc::rational(), vars, MonomialOrder::GrevLex);
        let lift = AffineRing::new(ring, relations, Vec::new(), true)?;
        Ok(AffineIntRing { lift })
    }

    /// Reduce the presentation mod a prime q; None when the reduction is the
    /// zero ring.
    pub fn reduce_mod_prime(&self, q: u64) -> Result<Option<ModReduction>> {
        if !is_prime_u64(q) {
            return Err(UnitalError::NotPrime(q));
        }
        let field = FieldDesc::prime(q)?;
        let ring = PolyRing::new(field.clone(), self.lift.ring.vars.clone(), MonomialOrder::GrevLex);
        let mut relations = Vec::new();
        for r in &self.lift.relations {
            let red = reduce_poly_mod(r, q, &field)?;
            if !red.is_zero() {
                relations.push(red);
            }
        }
        match AffineRing::new(ring, relations, Vec::new(), false) {
            Ok(a) => Ok(Some(ModReduction { q, ring: a })),
            Err(UnitalError::UnitIdeal) => Ok(None),
            Err(e) => Err(e),
        }
    }
}

/// An affine presentation over F_q obtained by reducing integer coefficients.
#[derive(Debug, Clone)]
pub struct ModReduction {
    pub q: u64,
    pub ring: AffineRing,
}

impl ModReduction {
    pub fn reduce_poly(&self, p: &Poly) -> Result<Poly> {
        reduce_poly_mod(p, self.q, &self.ring.ring.field)
    }
}

fn reduce_poly_mod(p: &Poly, q: u64, field: &FieldDesc) -> Result<Poly> {
    let mut terms = Vec::new();
    for (m, c) in p.terms() {
        let Scalar::Rat(r) = c else {
            return Err(UnitalError::Unsupported("expected rational coefficients".into()));
        };
        let qi = BigInt::from(q);
        let num = r.numer().clone() % &qi;
        let num = ((num + &qi) % &qi)
            .to_string()
            .parse::<i64>()
            .map_err(|_| UnitalError::Internal("residue out of range".into()))?;
        terms.push((m.clone(), field.from_int(num)));
    }
    Poly::from_terms(p.nvars(), p.order(), terms)
}

/// A presented ring.
#[derive(Debug, Clone, PartialEq)]
pub enum RingPresentation {
    Affine(AffineRing),
    /// the integers
    Int,
    /// Z_(p): rationals with denominator prime to p
    LocalInt(u32),
    /// ZZ[x..]/P
    AffineInt(AffineIntRing),
    /// table-backed finite ring
    Finite(FiniteRing),
}

impl RingPresentation {
    pub fn prime_asserted(&self) -> bool {
        match self {
            RingPresentation::Affine(a) => a.prime_asserted,
            RingPresentation::Int | RingPresentation::LocalInt(_) => true,
            RingPresentation::AffineInt(_) => true,
            RingPresentation::Finite(_) => false,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            RingPresentation::Affine(_) => "affine",
            RingPresentation::Int => "integers",
            RingPresentation::LocalInt(_) => "local-integers",
            RingPresentation::AffineInt(_) => "affine-over-integers",
            RingPresentation::Finite(_) => "finite",
        }
    }

    pub fn affine(&self) -> Option<&AffineRing> {
        match self {
            RingPresentation::Affine(a) => Some(a),
            RingPresentation::AffineInt(z) => Some(&z.lift),
            _ => None,
        }
    }

    pub fn element_int(self: &Arc<Self>, n: i64) -> Result<RingElement> {
        let repr = match self.as_ref() {
            RingPresentation::Affine(a) => ElemRepr::Affine {
                num: a.ring.constant(a.ring.field.from_int(n)),
                den: vec![0; a.inverted.len()],
            },
            RingPresentation::AffineInt(z) => ElemRepr::Affine {
                num: z.lift.ring.constant(z.lift.ring.field.from_int(n)),
                den: Vec::new(),
            },
            RingPresentation::Int => ElemRepr::Int(BigInt::from(n)),
            RingPresentation::LocalInt(_) => {
                ElemRepr::LocalInt(BigRational::from_integer(BigInt::from(n)))
            }
            RingPresentation::Finite(f) => {
                let mut x = f.zero;
                let steps = n.rem_euclid(additive_order(f) as i64) as usize;
                for _ in 0..steps {
                    x = f.add(x, f.one);
                }
                ElemRepr::Finite(x)
            }
        };
        Ok(RingElement { ring: Arc::clone(self), repr })
    }

    pub fn element_from_poly(self: &Arc<Self>, p: Poly) -> Result<RingElement> {
        match self.as_ref() {
            RingPresentation::Affine(a) => Ok(RingElement {
                ring: Arc::clone(self),
                repr: ElemRepr::Affine { num: a.nf(&p)?, den: vec![0; a.inverted.len()] },
            }),
            RingPresentation::AffineInt(z) => Ok(RingElement {
                ring: Arc::clone(self),
                repr: ElemRepr::Affine { num: z.lift.nf(&p)?, den: Vec::new() },
            }),
            _ => Err(UnitalError::Unsupported(format!(
                "polynomial elements over {} presentation",
                self.kind_name()
            ))),
        }
    }

    pub fn element_from_frac(self: &Arc<Self>, num: Poly, den: Vec<u32>) -> Result<RingElement> {
        match self.as_ref() {
            RingPresentation::Affine(a) => {
                if den.len() != a.inverted.len() {
                    return Err(UnitalError::AmbientMismatch(
                        "denominator exponent arity".into(),
                    ));
                }
                Ok(RingElement {
                    ring: Arc::clone(self),
                    repr: ElemRepr::Affine { num: a.nf(&num)?, den },
                })
            }
            _ => self.element_from_poly(num),
        }
    }
}

fn additive_order(f: &FiniteRing) -> usize {
    // order of 1 in the additive group
    let mut x = f.one;
    let mut k = 1;
    while x != f.zero {
        x = f.add(x, f.one);
        k += 1;
    }
    k
}

/// Element payload, per presentation kind.
#[derive(Debug, Clone, PartialEq)]
pub enum ElemRepr {
    /// numerator in normal form; denominator = product of inverted elements
    /// with the given exponents
    Affine { num: Poly, den: Vec<u32> },
    Int(BigInt),
    LocalInt(BigRational),
    Finite(usize),
}

#[derive(Debug, Clone)]
pub struct RingElement {
    pub ring: Arc<RingPresentation>,
    pub repr: ElemRepr,
}

#[derive(Debug, Clone)]
pub struct UnitDecision {
    pub unit: bool,
    pub cert: Certificate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum SumClass {
    Unit,
    Nilpotent,
    Neither,
}

#[derive(Debug, Clone)]
pub struct SumClassification {
    pub class: SumClass,
    pub sum: RingElement,
    pub certificate: Option<Certificate>,
}

impl RingElement {
    fn same_ring(&self, other: &RingElement) -> Result<()> {
        if Arc::ptr_eq(&self.ring, &other.ring) || self.ring == other.ring {
            Ok(())
        } else {
            Err(UnitalError::AmbientMismatch(format!(
                "{} vs {}",
                self.ring.kind_name(),
                other.ring.kind_name()
            )))
        }
    }

    pub fn add(&self, other: &RingElement) -> Result<RingElement> {
        self.same_ring(other)?;
        let repr = match (&self.repr, &other.repr, self.ring.as_ref()) {
            (
                ElemRepr::Affine { num: an, den: ad },
                ElemRepr::Affine { num: bn, den: bd },
                pres,
            ) => {
                let a = pres.affine().expect("affine repr on affine ring");
                let maxd: Vec<u32> = ad.iter().zip(bd).map(|(x, y)| *x.max(y)).collect();
                let mut lhs = an.clone();
                let mut rhs = bn.clone();
                for (i, d) in a.inverted.iter().enumerate() {
                    if maxd[i] > ad[i] {
                        lhs = lhs.mul(&d.pow(maxd[i] - ad[i])?)?;
                    }
                    if maxd[i] > bd[i] {
                        rhs = rhs.mul(&d.pow(maxd[i] - bd[i])?)?;
                    }
                }
                let num = a.nf(&lhs.add(&rhs)?)?;
                let den = if num.is_zero() { vec![0; maxd.len()] } else { maxd };
                ElemRepr::Affine { num, den }
            }
            (ElemRepr::Int(a), ElemRepr::Int(b), _) => ElemRepr::Int(a + b),
            (ElemRepr::LocalInt(a), ElemRepr::LocalInt(b), _) => ElemRepr::LocalInt(a + b),
            (ElemRepr::Finite(a), ElemRepr::Finite(b), RingPresentation::Finite(f)) => {
                ElemRepr::Finite(f.add(*a, *b))
            }
            _ => return Err(UnitalError::Internal("element/ring kind mismatch".into())),
        };
        Ok(RingElement { ring: Arc::clone(&self.ring), repr })
    }

    pub fn neg(&self) -> Result<RingElement> {
        let repr = match (&self.repr, self.ring.as_ref()) {
            (ElemRepr::Affine { num, den }, _) => {
                ElemRepr::Affine { num: num.neg(), den: den.clone() }
            }
            (ElemRepr::Int(a), _) => ElemRepr::Int(-a),
            (ElemRepr::LocalInt(a), _) => ElemRepr::LocalInt(-a),
            (ElemRepr::Finite(a), RingPresentation::Finite(f)) => ElemRepr::Finite(f.neg(*a)),
            _ => return Err(UnitalError::Internal("element/ring kind mismatch".into())),
        };
        Ok(RingElement { ring: Arc::clone(&self.ring), repr })
    }

    pub fn sub(&self, other: &RingElement) -> Result<RingElement> {
        self.add(&other.neg()?)
    }

    pub fn mul(&self, other: &RingElement) -> Result<RingElement> {
        self.same_ring(other)?;
        let repr = match (&self.repr, &other.repr, self.ring.as_ref()) {
            (
                ElemRepr::Affine { num: an, den: ad },
                ElemRepr::Affine { num: bn, den: bd },
                pres,
            ) => {
                let a = pres.affine().expect("affine repr on affine ring");
                let num = a.nf(&an.mul(bn)?)?;
                let den: Vec<u32> = ad.iter().zip(bd).map(|(x, y)| x + y).collect();
                let den = if num.is_zero() { vec![0; den.len()] } else { den };
                ElemRepr::Affine { num, den }
            }
            (ElemRepr::Int(a), ElemRepr::Int(b), _) => ElemRepr::Int(a * b),
            (ElemRepr::LocalInt(a), ElemRepr::LocalInt(b), _) => ElemRepr::LocalInt(a * b),
            (ElemRepr::Finite(a), ElemRepr::Finite(b), RingPresentation::Finite(f)) => {
                ElemRepr::Finite(f.mul(*a, *b))
            }
            _ => return Err(UnitalError::Internal("element/ring kind mismatch".into())),
        };
        Ok(RingElement { ring: Arc::clone(&self.ring), repr })
    }

    pub fn is_zero(&self) -> Result<bool> {
        Ok(match (&self.repr, self.ring.as_ref()) {
            (ElemRepr::Affine { num, .. }, _) => num.is_zero(),
            (ElemRepr::Int(a), _) => a.is_zero(),
            (ElemRepr::LocalInt(a), _) => a.is_zero(),
            (ElemRepr::Finite(a), RingPresentation::Finite(f)) => *a == f.zero,
            _ => return Err(UnitalError::Internal("element/ring kind mismatch".into())),
        })
    }

    /// Exact equality: cross-multiplied difference reduces to zero.
    pub fn eq_elem(&self, other: &RingElement) -> Result<bool> {
        self.sub(other)?.is_zero()
    }

    /// Nilpotence: for prime-asserted presentations this is the zero test;
    /// finite handles consult the tables.
    pub fn is_nilpotent(&self) -> Result<bool> {
        match (&self.repr, self.ring.as_ref()) {
            (ElemRepr::Finite(a), RingPresentation::Finite(f)) => Ok(f.is_nilpotent(*a)),
            _ => self.is_zero(),
        }
    }

    pub fn is_unit(&self) -> Result<UnitDecision> {
        match (&self.repr, self.ring.as_ref()) {
            (ElemRepr::Affine { num, .. }, RingPresentation::Affine(a)) => a.ring_is_unit(num),
            (ElemRepr::Affine { num, .. }, RingPresentation::AffineInt(z)) => {
                affine_int_is_unit(z, num)
            }
            (ElemRepr::Int(n), _) => {
                let doc = ElemDoc { num: n.to_string(), den: Vec::new() };
                if n.abs().is_one() {
                    Ok(UnitDecision {
                        unit: true,
                        cert: Certificate::UnitWitness {
                            element: doc,
                            cofactor: n.to_string(),
                            base: "1".into(),
                            power: 1,
                        },
                    })
                } else {
                    Ok(UnitDecision {
                        unit: false,
                        cert: Certificate::NonUnit { element: doc, base: "1".into(), modulus: None },
                    })
                }
            }
            (ElemRepr::LocalInt(r), RingPresentation::LocalInt(p)) => {
                let doc = ElemDoc { num: format_rational(r), den: Vec::new() };
                let unit = !r.is_zero() && !(r.numer() % BigInt::from(*p)).is_zero();
                if unit {
                    Ok(UnitDecision {
                        unit: true,
                        cert: Certificate::UnitWitness {
                            element: doc,
                            cofactor: format_rational(&r.recip()),
                            base: "1".into(),
                            power: 1,
                        },
                    })
                } else {
                    Ok(UnitDecision {
                        unit: false,
                        cert: Certificate::NonUnit { element: doc, base: "1".into(), modulus: None },
                    })
                }
            }
            (ElemRepr::Finite(a), RingPresentation::Finite(f)) => {
                let doc = ElemDoc { num: a.to_string(), den: Vec::new() };
                match f.inverse(*a) {
                    Some(inv) => Ok(UnitDecision {
                        unit: true,
                        cert: Certificate::UnitWitness {
                            element: doc,
                            cofactor: inv.to_string(),
                            base: "1".into(),
                            power: 1,
                        },
                    }),
                    None => Ok(UnitDecision {
                        unit: false,
                        cert: Certificate::NonUnit { element: doc, base: "1".into(), modulus: None },
                    }),
                }
            }
            _ => Err(UnitalError::Internal("element/ring kind mismatch".into())),
        }
    }

    pub fn to_doc(&self) -> ElemDoc {
        match (&self.repr, self.ring.as_ref()) {
            (ElemRepr::Affine { num, den }, pres) => {
                let a = pres.affine().expect("affine");
                ElemDoc { num: a.ring.format(num), den: den.clone() }
            }
            (ElemRepr::Int(n), _) => ElemDoc { num: n.to_string(), den: Vec::new() },
            (ElemRepr::LocalInt(r), _) => ElemDoc { num: format_rational(r), den: Vec::new() },
            (ElemRepr::Finite(a), _) => ElemDoc { num: a.to_string(), den: Vec::new() },
        }
    }

    pub fn display(&self) -> String {
        match (&self.repr, self.ring.as_ref()) {
            (ElemRepr::Affine { num, den }, pres) => {
                let a = pres.affine().expect("affine");
                let num_s = a.ring.format(num);
                let mut den_parts = Vec::new();
                for (i, e) in den.iter().enumerate() {
                    if *e > 0 {
                        let d = a.ring.format(&a.inverted[i]);
                        let base = if d.contains(['+', '-']) { format!("({})", d) } else { d };
                        if *e == 1 {
                            den_parts.push(base);
                        } else {
                            den_parts.push(format!("{}^{}", base, e));
                        }
                    }
                }
                if den_parts.is_empty() {
                    num_s
                } else if num_s.contains(['+', '-']) {
                    format!("({})/({})", num_s, den_parts.join("*"))
                } else {
                    format!("{}/({})", num_s, den_parts.join("*"))
                }
            }
            _ => self.to_doc().num,
        }
    }
}

fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn affine_int_is_unit(z: &AffineIntRing, num: &Poly) -> Result<UnitDecision> {
    let g = z.lift.nf(num)?;
    let doc = ElemDoc { num: z.lift.ring.format(&g), den: Vec::new() };
    // integer constants: units of ZZ[..]/P restrict to +-1 once the ring is
    // nontrivial in some mod-q reduction
    if let Some(c) = g.constant_value() {
        if let Scalar::Rat(r) = c {
            if r.denom().is_one() && r.numer().abs().is_one() {
                return Ok(UnitDecision {
                    unit: true,
                    cert: Certificate::UnitWitness {
                        element: doc,
                        cofactor: z.lift.ring.format(&g),
                        base: "1".into(),
                        power: 1,
                    },
                });
            }
        }
    }
    // sound non-unit proof via the rational lift
    let lifted = z.lift.ring_is_unit(&g)?;
    if !lifted.unit {
        return Ok(UnitDecision {
            unit: false,
            cert: Certificate::NonUnit {
                element: doc,
                base: z.lift.ring.format(&z.lift.inverted_product()?),
                modulus: None,
            },
        });
    }
    // otherwise try small prime reductions
    for q in SMALL_PRIMES {
        let Some(red) = z.reduce_mod_prime(q)? else { continue };
        let gq = red.reduce_poly(&g)?;
        if !red.ring.ring_is_unit(&gq)?.unit {
            return Ok(UnitDecision {
                unit: false,
                cert: Certificate::NonUnit { element: doc, base: "1".into(), modulus: Some(q) },
            });
        }
    }
    Err(UnitalError::Unsupported(format!(
        "cannot decide unit-ness of {} over ZZ coefficients",
        z.lift.ring.format(&g)
    )))
}

/// Classify the sum of two verified units: Unit, Nilpotent, or Neither (with
/// a counterexample certificate proving the ambient ring not unit-additive).
pub fn classify_unit_sum(u: &RingElement, v: &RingElement) -> Result<SumClassification> {
    let du = u.is_unit()?;
    if !du.unit {
        return Err(UnitalError::NotAUnit(u.display()));
    }
    let dv = v.is_unit()?;
    if !dv.unit {
        return Err(UnitalError::NotAUnit(v.display()));
    }
    let sum = u.add(v)?;
    if sum.is_nilpotent()? {
        return Ok(SumClassification { class: SumClass::Nilpotent, sum, certificate: None });
    }
    let ds = sum.is_unit()?;
    if ds.unit {
        return Ok(SumClassification {
            class: SumClass::Unit,
            sum,
            certificate: Some(ds.cert),
        });
    }
    let cert = Certificate::SumCounterexample {
        u: u.to_doc(),
        v: v.to_doc(),
        sum: sum.to_doc(),
        u_unit: Box::new(du.cert),
        v_unit: Box::new(dv.cert),
        sum_nonunit: Box::new(ds.cert),
    };
    Ok(SumClassification { class: SumClass::Neither, sum, certificate: Some(cert) })
}

/// Kernel of the algebra map k[source vars] -> k[target vars] defined by the
/// given fraction images (generators of the target relation ideal empty).
pub fn polynomial_map_kernel(
    source: &PolyRing,
    images: &[PolyFrac],
    target: &PolyRing,
) -> Result<Vec<Poly>> {
    kernel_impl(target, &[], &[], images, source)
}

/// Kernel of the algebra map k[source vars] -> target, where target is an
/// affine quotient-localization and the images are fractions of target
/// polynomials. Image denominators must be units of the target.
pub fn algebra_map_kernel(
    target: &AffineRing,
    images: &[PolyFrac],
    source: &PolyRing,
) -> Result<Vec<Poly>> {
    // precondition: denominators invertible
    for img in images {
        if !img.den.is_constant() {
            let dec = target.ring_is_unit(&img.den)?;
            if !dec.unit {
                return Err(UnitalError::DenominatorNotUnit(format!(
                    "({})/({})",
                    target.ring.format(&img.num),
                    target.ring.format(&img.den)
                )));
            }
        }
    }
    let inverted = target.inverted_product()?;
    let to_invert = if inverted.is_constant() { vec![] } else { vec![inverted] };
    kernel_impl(&target.ring, &target.relations, &to_invert, images, source)
}

fn kernel_impl(
    target_ring: &PolyRing,
    target_relations: &[Poly],
    target_inverted: &[Poly],
    images: &[PolyFrac],
    source: &PolyRing,
) -> Result<Vec<Poly>> {
    if images.len() != source.nvars() {
        return Err(UnitalError::MissingImage(format!(
            "{} images for {} source variables",
            images.len(),
            source.nvars()
        )));
    }
    if source.field != target_ring.field {
        return Err(UnitalError::DomainMismatch(
            source.field.to_string(),
            target_ring.field.to_string(),
        ));
    }
    let nt = target_ring.nvars();
    let ns = source.nvars();
    // collect what must be invertible: nonconstant denominators and the
    // target's inverted product
    let mut invert = target_ring.one();
    for img in images {
        if !img.den.is_constant() {
            invert = invert.mul(&img.den)?;
        }
    }
    for d in target_inverted {
        invert = invert.mul(d)?;
    }
    let use_z = !invert.is_constant();
    let zslot = if use_z { 1 } else { 0 };
    let nvars = nt + zslot + ns;
    let order = MonomialOrder::Block(nt + zslot);
    let lift = |p: &Poly| p.extend_vars(zslot + ns).with_order(order);
    let mut gens: Vec<Poly> = target_relations.iter().map(&lift).collect();
    let one = source.field.one();
    for (i, img) in images.iter().enumerate() {
        // den_i * s_i - num_i
        let s_i = Poly::var(nvars, order, nt + zslot + i, one.clone());
        gens.push(lift(&img.den).mul(&s_i)?.sub(&lift(&img.num))?);
    }
    if use_z {
        let z = Poly::var(nvars, order, nt, one.clone());
        let one_p = Poly::constant(nvars, order, one);
        gens.push(z.mul(&lift(&invert))?.sub(&one_p)?);
    }
    let mut kernel = groebner::eliminate(&gens, nvars, nt + zslot, GbLimits::default())?;
    for k in kernel.iter_mut() {
        *k = k.with_order(source.order);
    }
    Ok(kernel)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counterexample_ring() -> Arc<RingPresentation> {
        // Q[X,Y]/(Y^2 - X*Y - 1)
        let ring = PolyRing::new(
            FieldDesc::rational(),
            vec!["x".into(), "y".into()],
            MonomialOrder::GrevLex,
        );
        let rel = ring.from_int_terms(&[(1, &[0, 2]), (-1, &[1, 1]), (-1, &[0, 0])]);
        Arc::new(RingPresentation::Affine(
            AffineRing::new(ring, vec![rel], vec![], true).unwrap(),
        ))
    }

    fn laurent_ring() -> Arc<RingPresentation> {
        // Q[x][1/x]
        let ring = PolyRing::new(FieldDesc::rational(), vec!["x".into()], MonomialOrder::GrevLex);
        let x = ring.var_poly(0);
        Arc::new(RingPresentation::Affine(AffineRing::new(ring, vec![], vec![x], true).unwrap()))
    }

    #[test]
    fn is_zero_examples() {
        let r = counterexample_ring();
        let a = r.affine().unwrap();
        let rel = a.ring.from_int_terms(&[(1, &[0, 2]), (-1, &[1, 1]), (-1, &[0, 0])]);
        assert!(r.element_from_poly(rel).unwrap().is_zero().unwrap());
        let x = r.element_from_poly(a.ring.var_poly(0)).unwrap();
        assert!(!x.is_zero().unwrap());
        assert!(r.element_int(0).unwrap().is_zero().unwrap());
    }

    #[test]
    fn unit_test_in_quotient() {
        let r = counterexample_ring();
        let a = r.affine().unwrap();
        // y is a unit: y(y - x) = y^2 - xy = 1
        let y = r.element_from_poly(a.ring.var_poly(1)).unwrap();
        let dec = y.is_unit().unwrap();
        assert!(dec.unit);
        crate::cert::replay_payload(&r, &dec.cert).unwrap();
        if let Certificate::UnitWitness { cofactor, power, .. } = &dec.cert {
            assert_eq!(*power, 0); // inverted set empty: base^0 = 1
            assert_eq!(cofactor, "y-x");
        } else {
            panic!("expected unit witness");
        }
        // x is not a unit
        let x = r.element_from_poly(a.ring.var_poly(0)).unwrap();
        let dec = x.is_unit().unwrap();
        assert!(!dec.unit);
        crate::cert::replay_payload(&r, &dec.cert).unwrap();
    }

    #[test]
    fn unit_test_in_localization() {
        let r = laurent_ring();
        let a = r.affine().unwrap();
        // x is a unit of Q[x][1/x]
        let x = r.element_from_poly(a.ring.var_poly(0)).unwrap();
        assert!(x.is_unit().unwrap().unit);
        // x + 1 is not (x is not in the radical of (x+1))
        let xp1 = r.element_from_poly(a.ring.from_int_terms(&[(1, &[1]), (1, &[0])])).unwrap();
        let dec = xp1.is_unit().unwrap();
        assert!(!dec.unit);
        crate::cert::replay_payload(&r, &dec.cert).unwrap();
    }

    #[test]
    fn nilpotent_matches_zero_for_domains() {
        // Q[x,y]/(y^2 - x^2 - x^3): x is nonzero hence non-nilpotent
        let ring = PolyRing::new(
            FieldDesc::rational(),
            vec!["x".into(), "y".into()],
            MonomialOrder::GrevLex,
        );
        let rel = ring.from_int_terms(&[(1, &[0, 2]), (-1, &[2, 0]), (-1, &[3, 0])]);
        let r = Arc::new(RingPresentation::Affine(
            AffineRing::new(ring, vec![rel], vec![], true).unwrap(),
        ));
        let a = r.affine().unwrap();
        let x = r.element_from_poly(a.ring.var_poly(0)).unwrap();
        assert!(!x.is_nilpotent().unwrap());
        assert!(r.element_int(0).unwrap().is_nilpotent().unwrap());
        // finite handle: 2 in Z/4 is nilpotent
        let z4 = Arc::new(RingPresentation::Finite(FiniteRing::zmod(4).unwrap()));
        let two = z4.element_int(2).unwrap();
        assert!(two.is_nilpotent().unwrap());
        assert!(!two.is_unit().unwrap().unit);
    }

    #[test]
    fn classify_sum_examples() {
        let r = counterexample_ring();
        let a = r.affine().unwrap();
        // (1, -1): nilpotent (sum zero)
        let one = r.element_int(1).unwrap();
        let minus = r.element_int(-1).unwrap();
        let c = classify_unit_sum(&one, &minus).unwrap();
        assert_eq!(c.class, SumClass::Nilpotent);
        // (y, x - y): sum x, neither
        let y = r.element_from_poly(a.ring.var_poly(1)).unwrap();
        let xmy = r
            .element_from_poly(a.ring.from_int_terms(&[(1, &[1, 0]), (-1, &[0, 1])]))
            .unwrap();
        let c = classify_unit_sum(&y, &xmy).unwrap();
        assert_eq!(c.class, SumClass::Neither);
        let cert = c.certificate.unwrap();
        crate::cert::replay_payload(&r, &cert).unwrap();
        // precondition: x is not a unit
        let x = r.element_from_poly(a.ring.var_poly(0)).unwrap();
        assert!(matches!(classify_unit_sum(&x, &y), Err(UnitalError::NotAUnit(_))));
    }

    #[test]
    fn classify_sum_in_laurent_ring() {
        let r = laurent_ring();
        let a = r.affine().unwrap();
        let x = r.element_from_poly(a.ring.var_poly(0)).unwrap();
        let one = r.element_int(1).unwrap();
        let c = classify_unit_sum(&x, &one).unwrap();
        assert_eq!(c.class, SumClass::Neither);
        crate::cert::replay_payload(&r, &c.certificate.unwrap()).unwrap();
    }

    #[test]
    fn unit_products_stay_units() {
        let r = counterexample_ring();
        let a = r.affine().unwrap();
        let y = r.element_from_poly(a.ring.var_poly(1)).unwrap();
        let two_y = r.element_from_poly(a.ring.from_int_terms(&[(2, &[0, 1])])).unwrap();
        assert!(y.is_unit().unwrap().unit);
        assert!(two_y.is_unit().unwrap().unit);
        assert!(y.mul(&two_y).unwrap().is_unit().unwrap().unit);
    }

    #[test]
    fn integers_and_local_integers() {
        let zz = Arc::new(RingPresentation::Int);
        let one = zz.element_int(1).unwrap();
        let two = zz.element_int(2).unwrap();
        assert!(one.is_unit().unwrap().unit);
        assert!(!two.is_unit().unwrap().unit);
        assert!(!two.is_nilpotent().unwrap());

        let z5 = Arc::new(RingPresentation::LocalInt(5));
        let two_l = z5.element_int(2).unwrap();
        let five = z5.element_int(5).unwrap();
        assert!(two_l.is_unit().unwrap().unit);
        assert!(!five.is_unit().unwrap().unit);
        assert!(!five.is_nilpotent().unwrap());
    }

    #[test]
    fn affine_int_units() {
        // ZZ[x,y]/(xy - 2)
        let ring = PolyRing::new(
            FieldDesc::rational(),
            vec!["x".into(), "y".into()],
            MonomialOrder::GrevLex,
        );
        let rel = ring.from_int_terms(&[(1, &[1, 1]), (-2, &[0, 0])]);
        let z = AffineIntRing::new(vec!["x".into(), "y".into()], vec![rel]).unwrap();
        let pres = Arc::new(RingPresentation::AffineInt(z));
        let one = pres.element_int(-1).unwrap();
        assert!(one.is_unit().unwrap().unit);
        // 2 is not a unit: reduction mod 2 gives F_2[x,y]/(xy), where 2 = 0
        let two = pres.element_int(2).unwrap();
        let dec = two.is_unit().unwrap();
        assert!(!dec.unit);
        crate::cert::replay_payload(&pres, &dec.cert).unwrap();
        // x is not a unit either (unit in the lift, refuted mod 2)
        let RingPresentation::AffineInt(zr) = pres.as_ref() else { unreachable!() };
        let x = pres.element_from_poly(zr.lift.ring.var_poly(0)).unwrap();
        let dec = x.is_unit().unwrap();
        assert!(!dec.unit);
        crate::cert::replay_payload(&pres, &dec.cert).unwrap();
    }

    #[test]
    fn kernel_of_torus_map_examples() {
        // t -> y in Q[X,Y]/(Y^2-XY-1): kernel 0
        let r = counterexample_ring();
        let a = r.affine().unwrap();
        let source =
            PolyRing::new(FieldDesc::rational(), vec!["t".into()], MonomialOrder::GrevLex);
        let image = PolyFrac::from_poly(a.ring.var_poly(1));
        let k = algebra_map_kernel(a, &[image], &source).unwrap();
        assert!(k.is_empty(), "kernel should be trivial: {:?}", k);
        // t -> 3 in Q[x]: kernel (t - 3)
        let qx = PolyRing::new(FieldDesc::rational(), vec!["x".into()], MonomialOrder::GrevLex);
        let qx_ring = AffineRing::new(qx.clone(), vec![], vec![], true).unwrap();
        let three = PolyFrac::from_poly(qx.from_int_terms(&[(3, &[0])]));
        let k = algebra_map_kernel(&qx_ring, &[three], &source).unwrap();
        assert_eq!(k.len(), 1);
        assert_eq!(k[0], source.from_int_terms(&[(1, &[1]), (-3, &[0])]));
        // t -> t in Q[t][1/t]: kernel 0
        let lr = laurent_ring();
        let la = lr.affine().unwrap();
        let ident = PolyFrac::from_poly(la.ring.var_poly(0));
        let k = algebra_map_kernel(la, &[ident], &source).unwrap();
        assert!(k.is_empty());
    }

    #[test]
    fn kernel_rejects_non_unit_denominator() {
        let r = counterexample_ring();
        let a = r.affine().unwrap();
        let source =
            PolyRing::new(FieldDesc::rational(), vec!["t".into()], MonomialOrder::GrevLex);
        // 1/x: x is not a unit there
        let img = PolyFrac::new(a.ring.one(), a.ring.var_poly(0)).unwrap();
        assert!(matches!(
            algebra_map_kernel(a, &[img], &source),
            Err(UnitalError::DenominatorNotUnit(_))
        ));
    }

    #[test]
    fn presentation_validation() {
        let ring = PolyRing::new(FieldDesc::rational(), vec!["x".into()], MonomialOrder::GrevLex);
        // 1 in P rejected
        let one = ring.one();
        assert!(matches!(
            AffineRing::new(ring.clone(), vec![one], vec![], true),
            Err(UnitalError::UnitIdeal)
        ));
        // inverted element in P rejected
        let x = ring.var_poly(0);
        assert!(matches!(
            AffineRing::new(ring.clone(), vec![x.clone()], vec![x], true),
            Err(UnitalError::InvertedInIdeal(_))
        ));
    }
}
