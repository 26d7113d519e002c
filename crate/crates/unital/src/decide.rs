//! Three-valued unit-additivity verdicts: a pipeline of sound rules followed
//! by a bounded counterexample search, plus the torus-map construction.
//!
//! Rule order (first applicable wins, cheap certificates before search):
//! field rule, base-ring witnesses, polynomial-ring rule, graded rule,
//! embedding rule, counterexample search, Unknown. The embedding rule checks
//! kernel triviality in addition to the relation substitutions: a map with a
//! kernel lands in a subring of k[t..] but does not embed the quotient, so
//! relation checks alone would not be sound.

use std::cmp::Ordering;
use std::sync::Arc;

use crate::cert::{Certificate, ElemDoc, SearchBounds, TruthValue, UaVerdict};
use crate::error::{Result, UnitalError};
use crate::parse;
use crate::poly::{Monomial, MonomialOrder, Poly, PolyFrac, PolyRing};
use crate::ring::{
    algebra_map_kernel, AffineRing, ElemRepr, RingElement, RingPresentation, SumClass,
};
use crate::scalar::{BaseField, FieldDesc, Scalar};

/// Certificate hints supplied by the user: an embedding into a polynomial
/// ring and/or grading weights.
#[derive(Debug, Clone, Default, serde::Deserialize)]
pub struct Hints {
    #[serde(default)]
    pub embedding: Option<std::collections::BTreeMap<String, String>>,
    #[serde(default)]
    pub weights: Option<Vec<i64>>,
}

/// Pipeline outcome: the verdict plus any rejected hints (a malformed hint
/// does not abort the pipeline).
#[derive(Debug, Clone)]
pub struct DecideOutcome {
    pub verdict: UaVerdict,
    pub witness: Option<(ElemDoc, ElemDoc, ElemDoc)>,
    pub hint_errors: Vec<String>,
}

fn verdict(
    value: TruthValue,
    rule: &str,
    bounds: &SearchBounds,
    certificate: Option<Certificate>,
) -> UaVerdict {
    UaVerdict { value, rule: rule.to_string(), bounds: bounds.clone(), certificate }
}

/// The coefficient pool for candidate enumeration: small integers over the
/// rationals (and their extensions), all nonzero residues over a prime field.
pub fn coeff_pool(field: &FieldDesc, _bounds: &SearchBounds) -> Vec<Scalar> {
    match field.base {
        BaseField::Rational => {
            [1i64, -1, 2, -2].iter().map(|n| field.from_int(*n)).collect()
        }
        BaseField::Prime(p) => {
            let top = (p as i64 - 1).min(48);
            (1..=top).map(|n| field.from_int(n)).collect()
        }
    }
}

pub fn check_unit_additive(
    pres: &Arc<RingPresentation>,
    bounds: &SearchBounds,
    hints: &Hints,
    search_only: bool,
) -> Result<DecideOutcome> {
    let mut hint_errors = Vec::new();
    match pres.as_ref() {
        RingPresentation::Finite(f) => {
            // exhaustive mode: pairwise scan is exact on finite handles
            let units = f.units();
            for (j, &v) in units.iter().enumerate() {
                for &u in units.iter().take(j + 1) {
                    let s = f.add(u, v);
                    if !f.is_unit(s) && !f.is_nilpotent(s) {
                        let eu = RingElement { ring: Arc::clone(pres), repr: ElemRepr::Finite(u) };
                        let ev = RingElement { ring: Arc::clone(pres), repr: ElemRepr::Finite(v) };
                        let class = crate::ring::classify_unit_sum(&eu, &ev)?;
                        let cert = class.certificate.expect("neither carries a certificate");
                        return Ok(DecideOutcome {
                            verdict: verdict(TruthValue::False, "finite-exhaustive", bounds, Some(cert)),
                            witness: Some((eu.to_doc(), ev.to_doc(), class.sum.to_doc())),
                            hint_errors,
                        });
                    }
                }
            }
            let cert = Certificate::ExhaustiveCheck {
                size: f.n as u64,
                units: units.len() as u64,
                unit_additive: true,
            };
            return Ok(DecideOutcome {
                verdict: verdict(TruthValue::True, "finite-exhaustive", bounds, Some(cert)),
                witness: None,
                hint_errors,
            });
        }
        RingPresentation::Int => {
            let one = pres.element_int(1)?;
            let class = crate::ring::classify_unit_sum(&one, &one)?;
            debug_assert_eq!(class.class, SumClass::Neither);
            return Ok(DecideOutcome {
                verdict: verdict(TruthValue::False, "integer-ring", bounds, class.certificate),
                witness: Some((one.to_doc(), one.to_doc(), class.sum.to_doc())),
                hint_errors,
            });
        }
        RingPresentation::LocalInt(p) => {
            // j = p sits in the Jacobson radical but not the nilradical:
            // (1+p) + (-1) = p is a nonzero nonunit sum of units
            let shifted = pres.element_int(1 + *p as i64)?;
            let minus = pres.element_int(-1)?;
            let class = crate::ring::classify_unit_sum(&shifted, &minus)?;
            debug_assert_eq!(class.class, SumClass::Neither);
            let cert = Certificate::JacobsonElement {
                element: p.to_string(),
                unit_shift: format!("{}", 1 + *p as u64),
            };
            return Ok(DecideOutcome {
                verdict: verdict(TruthValue::False, "jacobson", bounds, Some(cert)),
                witness: Some((shifted.to_doc(), minus.to_doc(), class.sum.to_doc())),
                hint_errors,
            });
        }
        RingPresentation::AffineInt(_) => {
            // 1 + 1 = 2: a nonzero sum of units; a unit only if some prime
            // survives in no reduction
            let one = pres.element_int(1)?;
            match crate::ring::classify_unit_sum(&one, &one) {
                Ok(class) if class.class == SumClass::Neither => {
                    return Ok(DecideOutcome {
                        verdict: verdict(
                            TruthValue::False,
                            "integer-coefficients",
                            bounds,
                            class.certificate,
                        ),
                        witness: Some((one.to_doc(), one.to_doc(), class.sum.to_doc())),
                        hint_errors,
                    });
                }
                Ok(_) | Err(UnitalError::Unsupported(_)) => {
                    return Ok(DecideOutcome {
                        verdict: verdict(TruthValue::Unknown, "none", bounds, None),
                        witness: None,
                        hint_errors,
                    });
                }
                Err(e) => return Err(e),
            }
        }
        RingPresentation::Affine(_) => {}
    }
    let RingPresentation::Affine(a) = pres.as_ref() else { unreachable!() };

    if !search_only {
        // (R1) field rule: no variables survive the localization
        if a.ring.nvars() == 0 {
            let cert = Certificate::FieldCert {
                reason: format!("no variables remain; the ring is the field {}", a.ring.field),
            };
            return Ok(DecideOutcome {
                verdict: verdict(TruthValue::True, "field", bounds, Some(cert)),
                witness: None,
                hint_errors,
            });
        }
        // (R2) polynomial ring over a field, possibly with scalar inversions
        if a.relations.is_empty() && a.inverted.iter().all(|d| d.is_constant() && !d.is_zero()) {
            let cert = Certificate::PolynomialRing {
                note: format!("polynomial ring in {} variables over {}", a.ring.nvars(), a.ring.field),
            };
            return Ok(DecideOutcome {
                verdict: verdict(TruthValue::True, "polynomial-ring", bounds, Some(cert)),
                witness: None,
                hint_errors,
            });
        }
        // (R3) graded rule
        if let Some(weights) = &hints.weights {
            match grading_rule(a, weights) {
                Ok(()) => {
                    let cert = Certificate::Grading { weights: weights.clone() };
                    return Ok(DecideOutcome {
                        verdict: verdict(TruthValue::True, "graded", bounds, Some(cert)),
                        witness: None,
                        hint_errors,
                    });
                }
                Err(e) => hint_errors.push(format!("weights hint rejected: {}", e)),
            }
        }
        // (R4) embedding rule
        if let Some(embedding) = &hints.embedding {
            match embedding_rule(a, embedding) {
                Ok(cert) => {
                    return Ok(DecideOutcome {
                        verdict: verdict(TruthValue::True, "subalgebra", bounds, Some(cert)),
                        witness: None,
                        hint_errors,
                    });
                }
                Err(e) => hint_errors.push(format!("embedding hint rejected: {}", e)),
            }
        }
    }
    // (R5) bounded counterexample search
    if let Some((u, v, class)) = counterexample_search(pres, a, bounds)? {
        let cert = class.certificate.expect("neither carries a certificate");
        return Ok(DecideOutcome {
            verdict: verdict(TruthValue::False, "search", bounds, Some(cert)),
            witness: Some((u.to_doc(), v.to_doc(), class.sum.to_doc())),
            hint_errors,
        });
    }
    // (R6) out of rules
    Ok(DecideOutcome {
        verdict: verdict(TruthValue::Unknown, "none", bounds, None),
        witness: None,
        hint_errors,
    })
}

fn grading_rule(a: &AffineRing, weights: &[i64]) -> Result<()> {
    if weights.len() != a.ring.nvars() {
        return Err(UnitalError::HintRejected(format!(
            "{} weights for {} variables",
            weights.len(),
            a.ring.nvars()
        )));
    }
    if weights.iter().any(|w| *w <= 0) {
        return Err(UnitalError::HintRejected("weights must be positive".into()));
    }
    for r in &a.relations {
        if !r.is_homogeneous(weights)? {
            return Err(UnitalError::HintRejected(format!(
                "relation {} is not weighted-homogeneous",
                a.ring.format(r)
            )));
        }
    }
    for d in &a.inverted {
        if !(d.is_constant() && !d.is_zero()) {
            return Err(UnitalError::HintRejected(format!(
                "inverted element {} is not a degree-zero scalar",
                a.ring.format(d)
            )));
        }
    }
    Ok(())
}

fn embedding_rule(
    a: &AffineRing,
    embedding: &std::collections::BTreeMap<String, String>,
) -> Result<Certificate> {
    // the target polynomial ring is spanned by the identifiers appearing in
    // the images
    let mut target_vars: Vec<String> = Vec::new();
    for img in embedding.values() {
        for tok in img.split(|c: char| !(c.is_ascii_alphanumeric() || c == '_')) {
            if !tok.is_empty()
                && tok.chars().next().unwrap().is_ascii_alphabetic()
                && !target_vars.contains(&tok.to_string())
            {
                target_vars.push(tok.to_string());
            }
        }
    }
    target_vars.sort();
    let target = PolyRing::new(a.ring.field.clone(), target_vars.clone(), MonomialOrder::GrevLex);
    let mut images = Vec::new();
    let mut image_pairs = Vec::new();
    for v in &a.ring.vars {
        let img = embedding
            .get(v)
            .ok_or_else(|| UnitalError::MissingImage(v.clone()))?;
        let p = parse::parse_poly(&target, img)?;
        image_pairs.push((v.clone(), target.format(&p)));
        images.push(PolyFrac::from_poly(p));
    }
    for r in &a.relations {
        let out = crate::poly::substitute(r, &images, target.nvars())?;
        if !out.is_zero() {
            return Err(UnitalError::HintRejected(format!(
                "relation {} does not substitute to zero",
                a.ring.format(r)
            )));
        }
    }
    for d in &a.inverted {
        let out = crate::poly::substitute(d, &images, target.nvars())?;
        let ok = out
            .as_poly()
            .map(|p| p.is_constant() && !p.is_zero())
            .unwrap_or(false);
        if !ok {
            return Err(UnitalError::HintRejected(format!(
                "inverted element {} does not map to a nonzero scalar",
                a.ring.format(d)
            )));
        }
    }
    // kernel of the induced map must lie in the relation ideal
    let kernel = crate::ring::polynomial_map_kernel(&a.ring, &images, &target)?;
    for k in &kernel {
        if !a.nf(k)?.is_zero() {
            return Err(UnitalError::HintRejected(format!(
                "map has kernel element {} outside the relation ideal",
                a.ring.format(k)
            )));
        }
    }
    Ok(Certificate::Embedding { target_vars, images: image_pairs })
}

struct Candidate {
    poly: Poly,
    degree: u32,
}

/// Deterministic candidate enumeration: by total degree, then monomial
/// support, then coefficient-pool order. The seed shuffles only within
/// equal-degree blocks, and only when truncation to `max_candidates` is
/// active.
fn enumerate_candidates(ring: &PolyRing, bounds: &SearchBounds) -> Vec<Candidate> {
    let pool = coeff_pool(&ring.field, bounds);
    let nvars = ring.nvars();
    // all monomials of total degree <= max_degree, ascending canonical order
    let mut monos: Vec<Monomial> = Vec::new();
    let mut stack = vec![vec![0u32; 0]];
    while let Some(prefix) = stack.pop() {
        if prefix.len() == nvars {
            monos.push(Monomial::new(prefix));
            continue;
        }
        let used: u32 = prefix.iter().sum();
        for e in 0..=(bounds.max_degree - used) {
            let mut next = prefix.clone();
            next.push(e);
            stack.push(next);
        }
    }
    monos.sort_by(|x, y| MonomialOrder::GrevLex.cmp(x, y));
    let mut out: Vec<Candidate> = Vec::new();
    // supports of each size, coefficients from the pool in fixed order
    for t in 1..=bounds.max_terms.min(monos.len()) {
        let mut idx: Vec<usize> = (0..t).collect();
        loop {
            let support: Vec<&Monomial> = idx.iter().map(|&i| &monos[i]).collect();
            let mut coeffs = vec![0usize; t];
            loop {
                let terms: Vec<(Monomial, Scalar)> = support
                    .iter()
                    .zip(&coeffs)
                    .map(|(m, &c)| ((*m).clone(), pool[c].clone()))
                    .collect();
                if let Ok(p) = Poly::from_terms(nvars, ring.order, terms) {
                    if !p.is_zero() {
                        out.push(Candidate { degree: p.total_degree(), poly: p });
                    }
                }
                // advance coefficient tuple
                let mut k = 0;
                loop {
                    if k == t {
                        break;
                    }
                    coeffs[k] += 1;
                    if coeffs[k] < pool.len() {
                        break;
                    }
                    coeffs[k] = 0;
                    k += 1;
                }
                if k == t {
                    break;
                }
            }
            // advance support combination
            let mut k = t;
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                if idx[k] + (t - k) <= monos.len() - 1 {
                    idx[k] += 1;
                    for j in k + 1..t {
                        idx[j] = idx[j - 1] + 1;
                    }
                    break;
                }
                if k == 0 {
                    k = usize::MAX;
                    break;
                }
            }
            if k == usize::MAX {
                break;
            }
        }
    }
    out.sort_by(|x, y| {
        x.degree
            .cmp(&y.degree)
            .then_with(|| x.poly.canon_cmp(&y.poly))
    });
    out.dedup_by(|a, b| a.poly == b.poly);
    if out.len() > bounds.max_candidates {
        // shuffle within equal-degree blocks, then truncate
        let mut state = bounds.seed | 1;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let mut blocks: Vec<Vec<Candidate>> = Vec::new();
        for c in out {
            match blocks.last_mut() {
                Some(b) if b[0].degree == c.degree => b.push(c),
                _ => blocks.push(vec![c]),
            }
        }
        let mut shuffled = Vec::new();
        for mut b in blocks {
            let n = b.len();
            for i in (1..n).rev() {
                let j = (next() as usize) % (i + 1);
                b.swap(i, j);
            }
            shuffled.extend(b);
        }
        shuffled.truncate(bounds.max_candidates);
        shuffled
    } else {
        out
    }
}

type Neither = (RingElement, RingElement, crate::ring::SumClassification);

fn counterexample_search(
    pres: &Arc<RingPresentation>,
    a: &AffineRing,
    bounds: &SearchBounds,
) -> Result<Option<Neither>> {
    let candidates = enumerate_candidates(&a.ring, bounds);
    // keep the candidates that are units, with their certificates
    let mut units: Vec<(RingElement, Certificate)> = Vec::new();
    for c in &candidates {
        let elem = pres.element_from_poly(c.poly.clone())?;
        if elem.is_zero()? {
            continue;
        }
        let dec = elem.is_unit()?;
        if dec.unit {
            units.push((elem, dec.cert));
        }
    }
    // classify pairwise sums (max_summands = 2 explores pairs; larger bounds
    // add repeated summands of a single unit which multiples already cover)
    let mut best: Option<Neither> = None;
    let mut best_key: Option<(usize, u32, Poly)> = None;
    for j in 0..units.len() {
        for i in 0..=j {
            let (u, uc) = &units[i];
            let (v, vc) = &units[j];
            let sum = u.add(v)?;
            if sum.is_nilpotent()? {
                continue;
            }
            let ds = sum.is_unit()?;
            if ds.unit {
                continue;
            }
            let ElemRepr::Affine { num, .. } = &sum.repr else { unreachable!() };
            let key = (num.term_count(), num.total_degree(), num.clone());
            let better = match &best_key {
                None => true,
                Some((bt, bd, bp)) => {
                    (key.0, key.1).cmp(&(*bt, *bd)).then_with(|| key.2.canon_cmp(bp))
                        == Ordering::Less
                }
            };
            if better {
                // order the pair for reporting: fewer terms first, then
                // higher degree, then canonical
                let (first, second, cf, cs) = {
                    let ku = pair_key(u);
                    let kv = pair_key(v);
                    if ku <= kv {
                        (u.clone(), v.clone(), uc.clone(), vc.clone())
                    } else {
                        (v.clone(), u.clone(), vc.clone(), uc.clone())
                    }
                };
                let cert = Certificate::SumCounterexample {
                    u: first.to_doc(),
                    v: second.to_doc(),
                    sum: sum.to_doc(),
                    u_unit: Box::new(cf),
                    v_unit: Box::new(cs),
                    sum_nonunit: Box::new(ds.cert),
                };
                best = Some((
                    first,
                    second,
                    crate::ring::SumClassification {
                        class: SumClass::Neither,
                        sum: sum.clone(),
                        certificate: Some(cert),
                    },
                ));
                best_key = Some(key);
            }
        }
    }
    Ok(best)
}

fn pair_key(e: &RingElement) -> (usize, i64) {
    let ElemRepr::Affine { num, .. } = &e.repr else { return (0, 0) };
    (num.term_count(), -(num.total_degree() as i64))
}

/// Descriptor of the algebra map k[t,1/t] -> R sending t to a unit, with an
/// exact injectivity verdict via the elimination kernel.
#[derive(Debug, Clone, serde::Serialize)]
pub struct TorusMap {
    pub image_of_t: ElemDoc,
    pub unit_certificate: Certificate,
    pub kernel: Vec<String>,
    pub injective: bool,
}

pub fn build_torus_map(pres: &Arc<RingPresentation>, u: &RingElement) -> Result<TorusMap> {
    let dec = u.is_unit()?;
    if !dec.unit {
        return Err(UnitalError::NotAUnit(u.display()));
    }
    let RingPresentation::Affine(a) = pres.as_ref() else {
        return Err(UnitalError::Unsupported(format!(
            "torus maps over {} presentations",
            pres.kind_name()
        )));
    };
    let ElemRepr::Affine { num, den } = &u.repr else {
        return Err(UnitalError::Internal("affine element expected".into()));
    };
    let mut den_poly = a.ring.one();
    for (i, e) in den.iter().enumerate() {
        if *e > 0 {
            den_poly = den_poly.mul(&a.inverted[i].pow(*e)?)?;
        }
    }
    let source = PolyRing::new(a.ring.field.clone(), vec!["t".to_string()], MonomialOrder::GrevLex);
    let image = PolyFrac { num: num.clone(), den: den_poly };
    let kernel = algebra_map_kernel(a, &[image], &source)?;
    Ok(TorusMap {
        image_of_t: u.to_doc(),
        unit_certificate: dec.cert,
        kernel: kernel.iter().map(|k| source.format(k)).collect(),
        injective: kernel.is_empty(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cert::replay_payload;

    fn pres(text: &str) -> Arc<RingPresentation> {
        parse::parse_ring_to_presentation(text).unwrap()
    }

    #[test]
    fn polynomial_ring_rule() {
        let out = check_unit_additive(
            &pres("Q[x]"),
            &SearchBounds::default(),
            &Hints::default(),
            false,
        )
        .unwrap();
        assert_eq!(out.verdict.value, TruthValue::True);
        assert_eq!(out.verdict.rule, "polynomial-ring");
    }

    #[test]
    fn field_rule() {
        for text in ["Q", "F_7", "Q(x1,x2)"] {
            let out = check_unit_additive(
                &pres(text),
                &SearchBounds::default(),
                &Hints::default(),
                false,
            )
            .unwrap();
            assert_eq!(out.verdict.value, TruthValue::True, "{}", text);
            assert_eq!(out.verdict.rule, "field");
        }
    }

    #[test]
    fn integral_extension_counterexample() {
        let r = pres("Q[x,y]/(y^2-x*y-1)");
        let out =
            check_unit_additive(&r, &SearchBounds::default(), &Hints::default(), false).unwrap();
        assert_eq!(out.verdict.value, TruthValue::False);
        let (u, v, sum) = out.witness.unwrap();
        assert_eq!(u.num, "y");
        assert_eq!(v.num, "x-y");
        assert_eq!(sum.num, "x");
        replay_payload(&r, out.verdict.certificate.as_ref().unwrap()).unwrap();
    }

    #[test]
    fn laurent_ring_counterexample() {
        let r = pres("Q[x][1/x]");
        let out =
            check_unit_additive(&r, &SearchBounds::default(), &Hints::default(), false).unwrap();
        assert_eq!(out.verdict.value, TruthValue::False);
        let (u, v, _) = out.witness.unwrap();
        assert_eq!(u.num, "x");
        assert_eq!(v.num, "1");
        replay_payload(&r, out.verdict.certificate.as_ref().unwrap()).unwrap();
    }

    #[test]
    fn integers_counterexample() {
        let r = pres("ZZ");
        let out =
            check_unit_additive(&r, &SearchBounds::default(), &Hints::default(), false).unwrap();
        assert_eq!(out.verdict.value, TruthValue::False);
        let (u, v, sum) = out.witness.unwrap();
        assert_eq!((u.num.as_str(), v.num.as_str(), sum.num.as_str()), ("1", "1", "2"));
        replay_payload(&r, out.verdict.certificate.as_ref().unwrap()).unwrap();
    }

    #[test]
    fn local_integers_jacobson_rule() {
        let r = pres("Z_(5)");
        let out =
            check_unit_additive(&r, &SearchBounds::default(), &Hints::default(), false).unwrap();
        assert_eq!(out.verdict.value, TruthValue::False);
        assert_eq!(out.verdict.rule, "jacobson");
        replay_payload(&r, out.verdict.certificate.as_ref().unwrap()).unwrap();
    }

    #[test]
    fn node_ring_embedding_hint() {
        let r = pres("Q[x,y]/(y^2-x^2-x^3)");
        let mut embedding = std::collections::BTreeMap::new();
        embedding.insert("x".to_string(), "t^2-1".to_string());
        embedding.insert("y".to_string(), "t^3-t".to_string());
        let hints = Hints { embedding: Some(embedding), weights: None };
        let out = check_unit_additive(&r, &SearchBounds::default(), &hints, false).unwrap();
        assert_eq!(out.verdict.value, TruthValue::True);
        assert_eq!(out.verdict.rule, "subalgebra");
        assert!(out.hint_errors.is_empty());
        replay_payload(&r, out.verdict.certificate.as_ref().unwrap()).unwrap();
    }

    #[test]
    fn unsound_embedding_hint_rejected() {
        // relation substitutes to zero but the map has a kernel: x -> 0,
        // y -> 1 kills Y^2 - XY - 1, yet the ring is not unit-additive
        let r = pres("Q[x,y]/(y^2-x*y-1)");
        let mut embedding = std::collections::BTreeMap::new();
        embedding.insert("x".to_string(), "0".to_string());
        embedding.insert("y".to_string(), "1".to_string());
        let hints = Hints { embedding: Some(embedding), weights: None };
        let out = check_unit_additive(&r, &SearchBounds::default(), &hints, false).unwrap();
        assert_eq!(out.verdict.value, TruthValue::False, "search must still find the witness");
        assert_eq!(out.hint_errors.len(), 1);
        assert!(out.hint_errors[0].contains("kernel"));
    }

    #[test]
    fn grading_rule_on_cusp() {
        let r = pres("Q[x,y]/(y^2-x^3)");
        let hints = Hints { embedding: None, weights: Some(vec![2, 3]) };
        let out = check_unit_additive(&r, &SearchBounds::default(), &hints, false).unwrap();
        assert_eq!(out.verdict.value, TruthValue::True);
        assert_eq!(out.verdict.rule, "graded");
        replay_payload(&r, out.verdict.certificate.as_ref().unwrap()).unwrap();
        // node is not gradeable by (2,3): hint rejected, search takes over
        let node = pres("Q[x,y]/(y^2-x^2-x^3)");
        let hints = Hints { embedding: None, weights: Some(vec![2, 3]) };
        let out = check_unit_additive(&node, &SearchBounds::default(), &hints, false).unwrap();
        assert_eq!(out.hint_errors.len(), 1);
        assert_eq!(out.verdict.value, TruthValue::Unknown);
    }

    #[test]
    fn finite_handles_match_brute_force() {
        for n in 2..=24u64 {
            let r = pres(&format!("Z/{}", n));
            let out =
                check_unit_additive(&r, &SearchBounds::default(), &Hints::default(), false)
                    .unwrap();
            let f = crate::finite::FiniteRing::zmod(n).unwrap();
            let expect = if f.is_unit_additive() { TruthValue::True } else { TruthValue::False };
            assert_eq!(out.verdict.value, expect, "Z/{}", n);
            replay_payload(&r, out.verdict.certificate.as_ref().unwrap()).unwrap();
        }
    }

    #[test]
    fn search_only_flag_skips_rules() {
        let r = pres("Q[x]");
        let out =
            check_unit_additive(&r, &SearchBounds::default(), &Hints::default(), true).unwrap();
        // no counterexample exists; search-only cannot prove True
        assert_eq!(out.verdict.value, TruthValue::Unknown);
    }

    #[test]
    fn monotonic_in_bounds() {
        // enlarging bounds never flips False -> Unknown
        let r = pres("Q[x,y]/(y^2-x*y-1)");
        let small = SearchBounds::default();
        let big = SearchBounds { max_degree: 3, max_candidates: 20000, ..Default::default() };
        let a = check_unit_additive(&r, &small, &Hints::default(), false).unwrap();
        let b = check_unit_additive(&r, &big, &Hints::default(), false).unwrap();
        assert_eq!(a.verdict.value, TruthValue::False);
        assert_eq!(b.verdict.value, TruthValue::False);
    }

    #[test]
    fn torus_map_injectivity() {
        // from the witness unit y: injective
        let r = pres("Q[x,y]/(y^2-x*y-1)");
        let a = r.affine().unwrap();
        let y = r.element_from_poly(a.ring.var_poly(1)).unwrap();
        let tm = build_torus_map(&r, &y).unwrap();
        assert!(tm.injective);
        assert!(tm.kernel.is_empty());
        // from a constant unit in Q[x]: kernel (t - 3)
        let qx = pres("Q[x]");
        let three = qx.element_int(3).unwrap();
        let tm = build_torus_map(&qx, &three).unwrap();
        assert!(!tm.injective);
        assert_eq!(tm.kernel, vec!["t-3"]);
        // identity on Q[t][1/t]
        let lt = pres("Q[t][1/t]");
        let at = lt.affine().unwrap();
        let t = lt.element_from_poly(at.ring.var_poly(0)).unwrap();
        let tm = build_torus_map(&lt, &t).unwrap();
        assert!(tm.injective);
        // non-units rejected
        let x = qx.element_from_poly(qx.affine().unwrap().ring.var_poly(0)).unwrap();
        assert!(matches!(build_torus_map(&qx, &x), Err(UnitalError::NotAUnit(_))));
    }
}
