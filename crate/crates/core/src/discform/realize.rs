//! Concrete finite quadratic forms realizing a genus symbol.

use super::form::FiniteQuadraticForm;
use super::gauss::signature_mod8;
use super::primes::{non_residue, pow};
use super::symbol::{distribute_oddity, feasible_oddities, realize_units, GenusSymbol, Oddity, Sign};
use super::DiscError;

fn cyclic(order: u64, q: i64) -> FiniteQuadraticForm {
    FiniteQuadraticForm::from_numerators(vec![order], order, vec![q], vec![vec![q]])
}

/// Even 2-dimensional block `[[2a, 1], [1, 2c]] / 2^k`.
fn even_block(k: u32, a: i64) -> FiniteQuadraticForm {
    let d = pow(2, k);
    let qa = 2 * a;
    FiniteQuadraticForm::from_numerators(vec![d, d], d, vec![qa, qa], vec![vec![qa, 1], vec![1, qa]])
}

/// The orthogonal blocks of a form realizing `sym`, each of rank 1 or 2.
pub(crate) fn symbol_blocks(sym: &GenusSymbol) -> Result<Vec<FiniteQuadraticForm>, DiscError> {
    let mut blocks = Vec::new();
    let comps = sym.components();
    // choose per-constituent oddities: keep the given ones when each is
    // realizable, otherwise redistribute within the compartment
    let mut odd_of = vec![None; comps.len()];
    let mut i = 0;
    while i < comps.len() {
        if !comps[i].is_type_one() {
            i += 1;
            continue;
        }
        let mut j = i;
        while j + 1 < comps.len()
            && comps[j + 1].is_type_one()
            && comps[j + 1].prime == 2
            && comps[j + 1].exponent == comps[j].exponent + 1
        {
            j += 1;
        }
        let parts: Vec<(u32, Sign)> = comps[i..=j].iter().map(|c| (c.rank, c.sign)).collect();
        let given: Vec<u8> = comps[i..=j]
            .iter()
            .map(|c| match c.oddity {
                Some(Oddity::TypeI(t)) => t,
                _ => 0,
            })
            .collect();
        let ok = parts.iter().zip(&given).all(|(&(n, s), &t)| feasible_oddities(n, s) & (1 << t) != 0);
        let chosen = if ok {
            given
        } else {
            let total = (given.iter().map(|&t| t as u32).sum::<u32>() % 8) as u8;
            distribute_oddity(&parts, total)
                .ok_or_else(|| DiscError::Unrealizable(format!("2-adic compartment starting at scale {}", comps[i].scale())))?
        };
        for (x, t) in (i..=j).zip(chosen) {
            odd_of[x] = Some(t);
        }
        i = j + 1;
    }
    for (idx, c) in comps.iter().enumerate() {
        let d = c.scale();
        match c.oddity {
            None => {
                let r = non_residue(c.prime) as i64;
                for m in 0..c.rank {
                    let u = if m + 1 == c.rank && c.sign == Sign::Minus { r } else { 1 };
                    // even numerator congruent to the unit modulo p^k
                    let q = if u % 2 == 0 { u } else { u + d as i64 };
                    blocks.push(cyclic(d, q));
                }
            }
            Some(Oddity::TypeII) => {
                for m in 0..c.rank / 2 {
                    let a = if m == 0 && c.sign == Sign::Minus { 1 } else { 0 };
                    blocks.push(even_block(c.exponent, a));
                }
            }
            Some(Oddity::TypeI(_)) => {
                let t = odd_of[idx].expect("assigned above");
                let units = realize_units(c.rank, c.sign, t)
                    .ok_or_else(|| DiscError::Unrealizable(format!("constituent {c}")))?;
                for u in units {
                    blocks.push(cyclic(d, u as i64));
                }
            }
        }
    }
    Ok(blocks)
}

/// A finite quadratic form whose symbol canonicalizes to `sym`.
pub fn symbol_to_form(sym: &GenusSymbol) -> Result<FiniteQuadraticForm, DiscError> {
    Ok(symbol_blocks(sym)?.iter().fold(FiniteQuadraticForm::trivial(), |acc, b| acc.sum(b)))
}

/// Milgram signature of the forms described by `sym`.
pub fn symbol_signature_mod8(sym: &GenusSymbol) -> Result<u8, DiscError> {
    let mut s = 0u8;
    for b in symbol_blocks(sym)? {
        s = (s + signature_mod8(&b)?) % 8;
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discform::{canonicalize, parse_symbol, symbol_of_form};

    #[test]
    fn examples() {
        let f = symbol_to_form(&parse_symbol("2_7^+1").unwrap()).unwrap();
        assert_eq!(f.q_value(0), num_rational::Ratio::new(7, 2) - 2);
        assert_eq!(symbol_signature_mod8(&parse_symbol("2_7^+1").unwrap()).unwrap(), 7);
        assert_eq!(symbol_signature_mod8(&parse_symbol("2_II^+8").unwrap()).unwrap(), 0);
        assert_eq!(symbol_signature_mod8(&parse_symbol("").unwrap()).unwrap(), 0);
    }

    #[test]
    fn round_trip_through_forms() {
        for s in ["2_II^-6,4_3^-1", "2_7^+9", "3^-1,5^-2", "2_II^-2,8_5^-1", "2_1^+1,4_7^+5", "7^+3", "2_6^+2,4_II^-2,3^+1"] {
            let sym = parse_symbol(s).unwrap();
            let back = symbol_of_form(&symbol_to_form(&sym).unwrap()).unwrap();
            assert_eq!(canonicalize(&back).unwrap(), canonicalize(&sym).unwrap(), "{s}");
        }
    }
}
