//! Independent brute-force oracles used by the test suites. These stay
//! deliberately separate from the Gröbner implementation path they check:
//! ideal membership is decided here by solving a dense linear system for
//! bounded-degree cofactors, and algebraic relations are found by nullspace
//! computation over the normal-form basis.

use crate::error::{Result, UnitalError};
use crate::poly::{Monomial, MonomialOrder, Poly};
use crate::scalar::Scalar;

/// All monomials in `nvars` variables of total degree at most `max_deg`.
pub fn monomials_up_to(nvars: usize, max_deg: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut stack: Vec<Vec<u32>> = vec![Vec::new()];
    while let Some(prefix) = stack.pop() {
        if prefix.len() == nvars {
            out.push(Monomial::new(prefix));
            continue;
        }
        let used: u32 = prefix.iter().sum();
        for e in 0..=(max_deg - used) {
            let mut next = prefix.clone();
            next.push(e);
            stack.push(next);
        }
    }
    out.sort_by(|a, b| MonomialOrder::GrevLex.cmp(a, b));
    out
}

/// Exact Gaussian elimination; returns the rank. Rows are mutated in place.
fn eliminate_rows(rows: &mut [Vec<Scalar>], cols: usize) -> Result<usize> {
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = rows[rank][col].inv()?;
        for c in col..rows[rank].len() {
            rows[rank][c] = rows[rank][c].mul(&inv)?;
        }
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let factor = rows[r][col].clone();
                for c in col..rows[r].len() {
                    let delta = rows[rank][c].mul(&factor)?;
                    rows[r][c] = rows[r][c].sub(&delta)?;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    Ok(rank)
}

/// Degree-bounded ideal membership by linear algebra: is there a cofactor
/// representation f = sum q_i * g_i with deg(q_i) <= cof_deg? Independent of
/// the Gröbner path.
pub fn linalg_ideal_member(
    f: &Poly,
    gens: &[Poly],
    nvars: usize,
    cof_deg: u32,
) -> Result<bool> {
    if f.is_zero() {
        return Ok(true);
    }
    if gens.is_empty() {
        return Ok(false);
    }
    let one = {
        let lc = f.leading_coeff().expect("nonzero");
        lc.mul(&lc.inv()?)?
    };
    let cof_monos = monomials_up_to(nvars, cof_deg);
    // columns: one unknown per (generator, cofactor monomial)
    let mut columns: Vec<Poly> = Vec::new();
    for g in gens {
        for m in &cof_monos {
            columns.push(g.term_mul(m, &one)?);
        }
    }
    // rows: every monomial occurring anywhere
    let mut row_monos: Vec<Monomial> = Vec::new();
    for p in columns.iter().chain([f]) {
        for (m, _) in p.terms() {
            if !row_monos.contains(m) {
                row_monos.push(m.clone());
            }
        }
    }
    row_monos.sort_by(|a, b| MonomialOrder::GrevLex.cmp(a, b));
    let zero = one.sub(&one)?;
    let coeff_of = |p: &Poly, m: &Monomial| -> Scalar {
        p.terms()
            .iter()
            .find(|(tm, _)| tm == m)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(|| zero.clone())
    };
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    for m in &row_monos {
        let mut row: Vec<Scalar> = columns.iter().map(|p| coeff_of(p, m)).collect();
        row.push(coeff_of(f, m));
        rows.push(row);
    }
    // consistent iff augmenting does not raise the rank
    let ncols = columns.len();
    let mut plain: Vec<Vec<Scalar>> = rows.iter().map(|r| r[..ncols].to_vec()).collect();
    let rank_plain = eliminate_rows(&mut plain, ncols)?;
    let rank_aug = eliminate_rows(&mut rows, ncols + 1)?;
    Ok(rank_plain == rank_aug)
}

/// Find a nontrivial exact linear dependence among the given polynomials,
/// returned as coefficients. None when they are linearly independent.
pub fn linear_dependence(polys: &[Poly]) -> Result<Option<Vec<Scalar>>> {
    if polys.is_empty() {
        return Ok(None);
    }
    let one = polys
        .iter()
        .find_map(|p| p.leading_coeff())
        .map(|lc| lc.mul(&lc.inv().unwrap()))
        .transpose()?
        .ok_or_else(|| UnitalError::Internal("all polynomials are zero".into()))?;
    let zero = one.sub(&one)?;
    let mut row_monos: Vec<Monomial> = Vec::new();
    for p in polys {
        for (m, _) in p.terms() {
            if !row_monos.contains(m) {
                row_monos.push(m.clone());
            }
        }
    }
    if row_monos.is_empty() {
        // all zero: the first polynomial alone is a dependence
        let mut sol = vec![zero; polys.len()];
        sol[0] = one;
        return Ok(Some(sol));
    }
    let n = polys.len();
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    for m in &row_monos {
        let row: Vec<Scalar> = polys
            .iter()
            .map(|p| {
                p.terms()
                    .iter()
                    .find(|(tm, _)| tm == m)
                    .map(|(_, c)| c.clone())
                    .unwrap_or_else(|| zero.clone())
            })
            .collect();
        rows.push(row);
    }
    let rank = eliminate_rows(&mut rows, n)?;
    if rank == n {
        return Ok(None);
    }
    // extract a nullspace vector: set the first free column to 1
    let mut pivot_col_of_row = Vec::new();
    let mut pivot_cols = Vec::new();
    for row in rows.iter().take(rank) {
        let col = (0..n).find(|&c| !row[c].is_zero()).expect("pivot row");
        pivot_col_of_row.push(col);
        pivot_cols.push(col);
    }
    let free = (0..n).find(|c| !pivot_cols.contains(c)).expect("rank deficient");
    let mut sol = vec![zero; n];
    sol[free] = one;
    for (r, &pc) in pivot_col_of_row.iter().enumerate() {
        // pivot row: x_pc + sum coeff * x_free = 0
        sol[pc] = rows[r][free].neg();
    }
    Ok(Some(sol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groebner::{self, GbLimits};
    use crate::poly::PolyRing;
    use crate::scalar::FieldDesc;

    fn qring(vars: &[&str]) -> PolyRing {
        PolyRing::new(
            FieldDesc::rational(),
            vars.iter().map(|s| s.to_string()).collect(),
            MonomialOrder::GrevLex,
        )
    }

    #[test]
    fn linalg_membership_agrees_with_groebner() {
        let r = qring(&["x", "y"]);
        let g1 = r.from_int_terms(&[(1, &[2, 0]), (-1, &[0, 1])]); // x^2 - y
        let g2 = r.from_int_terms(&[(1, &[1, 1]), (-1, &[0, 0])]); // xy - 1
        let gens = [g1.clone(), g2.clone()];
        let gb = groebner::buchberger(&gens, 2, MonomialOrder::GrevLex, GbLimits::default())
            .unwrap();
        let cases = [
            r.var_poly(0),
            r.var_poly(1),
            g1.clone(),
            g2.clone(),
            g1.mul(&r.var_poly(1)).unwrap().add(&g2).unwrap(),
            r.from_int_terms(&[(1, &[3, 0]), (-1, &[1, 1])]),
            r.from_int_terms(&[(1, &[0, 0])]),
        ];
        for f in &cases {
            let fast = groebner::ideal_member(f, &gb).unwrap();
            let slow = linalg_ideal_member(f, &gens, 2, 4).unwrap();
            assert_eq!(fast, slow, "disagreement on {}", r.format(f));
        }
    }

    #[test]
    fn dependence_oracle_finds_relations() {
        let r = qring(&["x"]);
        let p1 = r.from_int_terms(&[(1, &[1])]);
        let p2 = r.from_int_terms(&[(1, &[0])]);
        let p3 = r.from_int_terms(&[(1, &[1]), (2, &[0])]); // x + 2
        let dep = linear_dependence(&[p1.clone(), p2.clone(), p3.clone()]).unwrap().unwrap();
        let mut acc = r.zero();
        for (c, p) in dep.iter().zip([&p1, &p2, &p3]) {
            acc = acc.add(&p.scalar_mul(c).unwrap()).unwrap();
        }
        assert!(acc.is_zero());
        assert!(dep.iter().any(|c| !c.is_zero()));
        // independent set
        assert!(linear_dependence(&[p1, p2]).unwrap().is_none());
    }
}
