//! Verdicts, certificates, and the replay checker.
//!
//! Every True/False verdict carries a certificate that replays using only the
//! ideal-engine primitives: reductions, radical-membership runs, substitution
//! checks, or table scans. Certificates serialize to JSON with a fixed key
//! order and embed the full ring description, the bounds in force, and the
//! tool version, so a certificate file is self-contained.

use serde::{Deserialize, Serialize};

use crate::error::{Result, UnitalError};
use crate::groebner::{self, GbLimits};
use crate::parse;
use crate::poly::PolyFrac;
use crate::ring::{ElemRepr, RingPresentation, SumClass};

pub const TOOL_NAME: &str = "unital";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TruthValue {
    True,
    False,
    Unknown,
}

impl TruthValue {
    pub fn exit_code(&self) -> i32 {
        match self {
            TruthValue::True => 0,
            TruthValue::False => 1,
            TruthValue::Unknown => 2,
        }
    }
}

/// Bounds for the counterexample search, echoed in every verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBounds {
    pub max_summands: usize,
    pub max_degree: u32,
    pub max_terms: usize,
    pub max_candidates: usize,
    pub seed: u64,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds { max_summands: 2, max_degree: 2, max_terms: 2, max_candidates: 5000, seed: 0 }
    }
}

/// A ring element in serialized form: numerator polynomial plus formal
/// denominator exponents over the presentation's inverted list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElemDoc {
    pub num: String,
    #[serde(default)]
    pub den: Vec<u32>,
}

/// Replayable witness payloads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Certificate {
    /// The presented ring is a field.
    FieldCert { reason: String },
    /// Polynomial ring over a field: no relations, only scalar inversions.
    PolynomialRing { note: String },
    /// Positive weights making all relations homogeneous and all inverted
    /// elements degree-zero (scalars); the degree-0 part is the field.
    Grading { weights: Vec<i64> },
    /// Algebra map onto a subring of a polynomial ring: relation images
    /// vanish, inverted elements map to nonzero scalars, kernel is trivial.
    Embedding { target_vars: Vec<String>, images: Vec<(String, String)> },
    /// element * cofactor = base^power modulo the relation ideal.
    UnitWitness { element: ElemDoc, cofactor: String, base: String, power: u32 },
    /// Radical membership of `base` in (relations + element) fails, so the
    /// element is not a unit. `modulus` marks a mod-q reduction proof used by
    /// integer-coefficient presentations.
    NonUnit { element: ElemDoc, base: String, modulus: Option<u64> },
    /// Two verified units whose sum is neither a unit nor nilpotent.
    SumCounterexample {
        u: ElemDoc,
        v: ElemDoc,
        sum: ElemDoc,
        u_unit: Box<Certificate>,
        v_unit: Box<Certificate>,
        sum_nonunit: Box<Certificate>,
    },
    /// Jacobson-radical element j outside the nilradical: 1+j and -1 are
    /// units with sum j.
    JacobsonElement { element: String, unit_shift: String },
    /// Exhaustive pairwise scan over a finite ring.
    ExhaustiveCheck { size: u64, units: u64, unit_additive: bool },
}

/// Witness triple reported alongside False verdicts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessDoc {
    pub u: ElemDoc,
    pub v: ElemDoc,
    pub sum: ElemDoc,
}

/// Self-contained certificate file (also the JSON output of the query
/// subcommands). The embedded ring description, bounds, tool version, and
/// prime-asserted flag make it replayable on its own.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateDoc {
    pub tool: String,
    pub version: String,
    pub query: String,
    pub ring: String,
    pub prime_asserted: bool,
    pub verdict: TruthValue,
    pub rule: String,
    pub bounds: SearchBounds,
    #[serde(default)]
    pub hint_errors: Vec<String>,
    #[serde(default)]
    pub witness: Option<WitnessDoc>,
    #[serde(default)]
    pub certificate: Option<Certificate>,
}

impl CertificateDoc {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serialization")
    }
}

/// Replay a full certificate document: parse the embedded ring description
/// and verify the payload against it.
pub fn replay_doc(doc: &CertificateDoc) -> Result<()> {
    let Some(cert) = &doc.certificate else {
        return Err(UnitalError::ReplayFailed(
            "document carries no certificate (Unknown verdicts are not replayable)".into(),
        ));
    };
    let pres = parse::parse_ring_to_presentation(&doc.ring)?;
    replay_payload(&pres, cert)
}

/// Replay a certificate payload against an in-memory presentation.
pub fn replay_payload(pres: &std::sync::Arc<RingPresentation>, cert: &Certificate) -> Result<()> {
    match cert {
        Certificate::FieldCert { .. } => match pres.as_ref() {
            RingPresentation::Affine(a) => {
                if a.ring.nvars() == 0 && a.relations.is_empty() {
                    Ok(())
                } else {
                    Err(UnitalError::ReplayFailed("presentation is not visibly a field".into()))
                }
            }
            RingPresentation::Finite(f) => {
                if f.is_field() {
                    Ok(())
                } else {
                    Err(UnitalError::ReplayFailed("finite ring is not a field".into()))
                }
            }
            _ => Err(UnitalError::ReplayFailed("field certificate on a non-field kind".into())),
        },
        Certificate::PolynomialRing { .. } => match pres.as_ref() {
            RingPresentation::Affine(a) => {
                let ok = a.relations.is_empty()
                    && a.inverted.iter().all(|d| d.is_constant() && !d.is_zero());
                if ok {
                    Ok(())
                } else {
                    Err(UnitalError::ReplayFailed(
                        "relations present or non-scalar inversions".into(),
                    ))
                }
            }
            _ => Err(UnitalError::ReplayFailed("polynomial-ring certificate kind".into())),
        },
        Certificate::Grading { weights } => match pres.as_ref() {
            RingPresentation::Affine(a) => {
                if weights.len() != a.ring.nvars() {
                    return Err(UnitalError::ReplayFailed("weight arity".into()));
                }
                if weights.iter().any(|w| *w <= 0) {
                    return Err(UnitalError::ReplayFailed("weights must be positive".into()));
                }
                for r in &a.relations {
                    if !r.is_homogeneous(weights)? {
                        return Err(UnitalError::ReplayFailed(format!(
                            "relation {} is not homogeneous",
                            a.ring.format(r)
                        )));
                    }
                }
                for d in &a.inverted {
                    if !(d.is_constant() && !d.is_zero()) {
                        return Err(UnitalError::ReplayFailed(format!(
                            "inverted element {} is not a nonzero scalar",
                            a.ring.format(d)
                        )));
                    }
                }
                Ok(())
            }
            _ => Err(UnitalError::ReplayFailed("grading certificate kind".into())),
        },
        Certificate::Embedding { target_vars, images } => {
            replay_embedding(pres, target_vars, images)
        }
        Certificate::UnitWitness { element, cofactor, base, power } => {
            replay_unit_witness(pres, element, cofactor, base, *power)
        }
        Certificate::NonUnit { element, base, modulus } => {
            replay_non_unit(pres, element, base, *modulus)
        }
        Certificate::SumCounterexample { u, v, sum, u_unit, v_unit, sum_nonunit } => {
            let eu = parse::parse_element_doc(pres, u)?;
            let ev = parse::parse_element_doc(pres, v)?;
            let esum = parse::parse_element_doc(pres, sum)?;
            replay_payload(pres, u_unit)?;
            replay_payload(pres, v_unit)?;
            let computed = eu.add(&ev)?;
            if !computed.eq_elem(&esum)? {
                return Err(UnitalError::ReplayFailed(
                    "u + v does not equal the stated sum".into(),
                ));
            }
            if esum.is_nilpotent()? {
                return Err(UnitalError::ReplayFailed("stated sum is nilpotent".into()));
            }
            replay_payload(pres, sum_nonunit)
        }
        Certificate::JacobsonElement { element, unit_shift } => match pres.as_ref() {
            RingPresentation::LocalInt(p) => {
                let j = parse::parse_element(pres, element)?;
                let shifted = parse::parse_element(pres, unit_shift)?;
                let one = pres.element_int(1)?;
                if !shifted.eq_elem(&j.add(&one)?)? {
                    return Err(UnitalError::ReplayFailed("unit_shift is not 1 + j".into()));
                }
                if !shifted.is_unit()?.unit {
                    return Err(UnitalError::ReplayFailed("1 + j is not a unit".into()));
                }
                if j.is_unit()?.unit || j.is_nilpotent()? {
                    return Err(UnitalError::ReplayFailed(format!(
                        "j must avoid both units and nilpotents of Z_({})",
                        p
                    )));
                }
                Ok(())
            }
            _ => Err(UnitalError::ReplayFailed("jacobson certificate kind".into())),
        },
        Certificate::ExhaustiveCheck { size, units, unit_additive } => match pres.as_ref() {
            RingPresentation::Finite(f) => {
                if f.n as u64 != *size || f.units().len() as u64 != *units {
                    return Err(UnitalError::ReplayFailed("finite ring shape mismatch".into()));
                }
                if f.is_unit_additive() != *unit_additive {
                    return Err(UnitalError::ReplayFailed("exhaustive scan disagrees".into()));
                }
                Ok(())
            }
            _ => Err(UnitalError::ReplayFailed("exhaustive certificate kind".into())),
        },
    }
}

fn replay_embedding(
    pres: &std::sync::Arc<RingPresentation>,
    target_vars: &[String],
    images: &[(String, String)],
) -> Result<()> {
    let RingPresentation::Affine(a) = pres.as_ref() else {
        return Err(UnitalError::ReplayFailed("embedding certificate kind".into()));
    };
    let target = crate::poly::PolyRing::new(
        a.ring.field.clone(),
        target_vars.to_vec(),
        crate::poly::MonomialOrder::GrevLex,
    );
    let mut image_fracs = Vec::new();
    for v in &a.ring.vars {
        let img = images
            .iter()
            .find(|(name, _)| name == v)
            .ok_or_else(|| UnitalError::MissingImage(v.clone()))?;
        let p = parse::parse_poly(&target, &img.1)?;
        image_fracs.push(PolyFrac::from_poly(p));
    }
    for r in &a.relations {
        let out = crate::poly::substitute(r, &image_fracs, target.nvars())?;
        if !out.is_zero() {
            return Err(UnitalError::ReplayFailed(format!(
                "relation {} does not map to zero",
                a.ring.format(r)
            )));
        }
    }
    for d in &a.inverted {
        let out = crate::poly::substitute(d, &image_fracs, target.nvars())?;
        let poly = out.as_poly().ok_or_else(|| {
            UnitalError::ReplayFailed("inverted element maps to a proper fraction".into())
        })?;
        if !(poly.is_constant() && !poly.is_zero()) {
            return Err(UnitalError::ReplayFailed(format!(
                "inverted element {} does not map to a nonzero scalar",
                a.ring.format(d)
            )));
        }
    }
    // kernel triviality: the induced map must embed the quotient
    let kernel = crate::ring::polynomial_map_kernel(&a.ring, &image_fracs, &target)?;
    for k in &kernel {
        if !a.nf(k)?.is_zero() {
            return Err(UnitalError::ReplayFailed(format!(
                "kernel element {} does not lie in the relation ideal",
                a.ring.format(k)
            )));
        }
    }
    Ok(())
}

fn replay_unit_witness(
    pres: &std::sync::Arc<RingPresentation>,
    element: &ElemDoc,
    cofactor: &str,
    base: &str,
    power: u32,
) -> Result<()> {
    match pres.as_ref() {
        RingPresentation::Affine(a) => {
            let g = parse::parse_poly(&a.ring, &element.num)?;
            let h = parse::parse_poly(&a.ring, cofactor)?;
            let d = parse::parse_poly(&a.ring, base)?;
            let lhs = g.mul(&h)?;
            let rhs = d.pow(power)?;
            if a.nf(&lhs.sub(&rhs)?)?.is_zero() {
                Ok(())
            } else {
                Err(UnitalError::ReplayFailed(
                    "element * cofactor - base^power does not reduce to zero".into(),
                ))
            }
        }
        RingPresentation::AffineInt(z) => {
            let g = parse::parse_poly(&z.lift.ring, &element.num)?;
            let h = parse::parse_poly(&z.lift.ring, cofactor)?;
            if z.lift.nf(&g.mul(&h)?)? == z.lift.ring.one() {
                Ok(())
            } else {
                Err(UnitalError::ReplayFailed("product is not 1".into()))
            }
        }
        RingPresentation::Int | RingPresentation::LocalInt(_) => {
            let e = parse::parse_element(pres, &element.num)?;
            let h = parse::parse_element(pres, cofactor)?;
            let one = pres.element_int(1)?;
            if e.mul(&h)?.eq_elem(&one)? {
                Ok(())
            } else {
                Err(UnitalError::ReplayFailed("product is not 1".into()))
            }
        }
        RingPresentation::Finite(f) => {
            let e: usize = element
                .num
                .parse()
                .map_err(|_| UnitalError::ReplayFailed("bad finite element".into()))?;
            let h: usize = cofactor
                .parse()
                .map_err(|_| UnitalError::ReplayFailed("bad finite cofactor".into()))?;
            if e < f.n && h < f.n && f.mul(e, h) == f.one {
                Ok(())
            } else {
                Err(UnitalError::ReplayFailed("table product is not 1".into()))
            }
        }
    }
}

fn replay_non_unit(
    pres: &std::sync::Arc<RingPresentation>,
    element: &ElemDoc,
    base: &str,
    modulus: Option<u64>,
) -> Result<()> {
    match pres.as_ref() {
        RingPresentation::Affine(a) => {
            let g = a.nf(&parse::parse_poly(&a.ring, &element.num)?)?;
            let d = parse::parse_poly(&a.ring, base)?;
            let mut gens = a.relations.clone();
            gens.push(g);
            let member = groebner::radical_member(&d, &gens, a.ring.nvars(), GbLimits::default())?;
            if member {
                Err(UnitalError::ReplayFailed(
                    "radical membership holds; element is a unit".into(),
                ))
            } else {
                Ok(())
            }
        }
        RingPresentation::AffineInt(z) => {
            let q = modulus.ok_or_else(|| {
                UnitalError::ReplayFailed("integer-coefficient proof needs a modulus".into())
            })?;
            let e = parse::parse_poly(&z.lift.ring, &element.num)?;
            let reduced = z.reduce_mod_prime(q)?;
            let Some(reduced) = reduced else {
                return Err(UnitalError::ReplayFailed(format!(
                    "reduction mod {} collapses to the zero ring",
                    q
                )));
            };
            let e_red = reduced.reduce_poly(&e)?;
            let dec = reduced.ring.ring_is_unit(&e_red)?;
            if dec.unit {
                Err(UnitalError::ReplayFailed(format!("element is a unit mod {}", q)))
            } else {
                Ok(())
            }
        }
        RingPresentation::Int => {
            let e = parse::parse_element(pres, &element.num)?;
            let ElemRepr::Int(n) = &e.repr else {
                return Err(UnitalError::ReplayFailed("expected integer".into()));
            };
            if num_traits::Signed::abs(n) == num_bigint::BigInt::from(1) {
                Err(UnitalError::ReplayFailed("element is a unit of ZZ".into()))
            } else {
                Ok(())
            }
        }
        RingPresentation::LocalInt(_) => {
            let e = parse::parse_element(pres, &element.num)?;
            if e.is_unit()?.unit {
                Err(UnitalError::ReplayFailed("element is a unit".into()))
            } else {
                Ok(())
            }
        }
        RingPresentation::Finite(f) => {
            let e: usize = element
                .num
                .parse()
                .map_err(|_| UnitalError::ReplayFailed("bad finite element".into()))?;
            if e < f.n && !f.is_unit(e) {
                Ok(())
            } else {
                Err(UnitalError::ReplayFailed("element is a unit of the finite ring".into()))
            }
        }
    }
}

/// Verdict of a unit-additivity query.
#[derive(Debug, Clone, Serialize)]
pub struct UaVerdict {
    pub value: TruthValue,
    pub rule: String,
    pub bounds: SearchBounds,
    pub certificate: Option<Certificate>,
}

/// Outcome of classifying a sum of two units.
#[derive(Debug, Clone, Serialize)]
pub struct SumVerdict {
    pub class: SumClass,
    pub sum: ElemDoc,
    pub certificate: Option<Certificate>,
}
