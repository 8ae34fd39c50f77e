//! Independent naive evaluator used to cross-validate the rewrite engine.
//!
//! Given a relation list with the parameters already substituted by
//! rationals, this module re-orients each relation on its own and reduces
//! elements by repeated single-relation substitution at randomly chosen
//! positions and in randomly chosen rule order. On a confluent relation set
//! the result is the unique normal form, so it must agree with the memoised
//! engine followed by numeric substitution. None of the rewrite-system
//! machinery (interreduction, memoisation, worklists) is shared.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::ncalg::{AlgElement, Word};
use crate::rewrite::GeneratorOrder;
use crate::scalars::ParamScalar;

/// One relation turned into a substitution `lhs -> rest`.
struct NaiveRule {
    lhs: Word,
    rest: Vec<(Word, ParamScalar)>,
}

fn orient_one(order: &GeneratorOrder, rel: &AlgElement) -> Option<NaiveRule> {
    let (lead, coeff) = order.leading(rel)?;
    let lead = lead.clone();
    let inv = coeff.inv().ok()?;
    let mut rest = Vec::new();
    for (w, c) in rel.terms() {
        if *w == lead {
            continue;
        }
        rest.push((w.clone(), -&(c * &inv)));
    }
    Some(NaiveRule { lhs: lead, rest })
}

/// Reduces `x` by single-relation substitution until no relation applies,
/// choosing the word, position and rule at random each step.
pub fn naive_normal_form(
    rng: &mut impl Rng,
    order: &GeneratorOrder,
    relations: &[AlgElement],
    x: &AlgElement,
) -> AlgElement {
    let rules: Vec<NaiveRule> = relations
        .iter()
        .filter(|r| !r.is_zero())
        .filter_map(|r| orient_one(order, r))
        .collect();

    let mut terms: Vec<(Word, ParamScalar)> =
        x.terms().map(|(w, c)| (w.clone(), c.clone())).collect();
    loop {
        // Collapse duplicates so cancellation is visible to the scan.
        let mut collapsed = AlgElement::zero();
        for (w, c) in terms.drain(..) {
            collapsed.insert_add(w, c);
        }
        let mut list: Vec<(Word, ParamScalar)> = collapsed
            .terms()
            .map(|(w, c)| (w.clone(), c.clone()))
            .collect();
        list.shuffle(rng);

        let mut applied = false;
        let mut next: Vec<(Word, ParamScalar)> = Vec::new();
        for (w, c) in list {
            if applied {
                next.push((w, c));
                continue;
            }
            match find_random_redex(rng, &rules, &w) {
                None => next.push((w, c)),
                Some((pos, ri)) => {
                    applied = true;
                    let rule = &rules[ri];
                    let pre = &w.letters()[..pos];
                    let post = &w.letters()[pos + rule.lhs.len()..];
                    for (rw, rc) in &rule.rest {
                        let mut v = smallvec::SmallVec::new();
                        v.extend_from_slice(pre);
                        v.extend_from_slice(rw.letters());
                        v.extend_from_slice(post);
                        next.push((Word(v), &c * rc));
                    }
                }
            }
        }
        terms = next;
        if !applied {
            break;
        }
    }
    let mut out = AlgElement::zero();
    for (w, c) in terms {
        out.insert_add(w, c);
    }
    out
}

fn find_random_redex(rng: &mut impl Rng, rules: &[NaiveRule], w: &Word) -> Option<(usize, usize)> {
    let mut hits: Vec<(usize, usize)> = Vec::new();
    let letters = w.letters();
    for (ri, rule) in rules.iter().enumerate() {
        let l = rule.lhs.len();
        if l > letters.len() {
            continue;
        }
        for pos in 0..=letters.len() - l {
            if &letters[pos..pos + l] == rule.lhs.letters() {
                hits.push((pos, ri));
            }
        }
    }
    hits.choose(rng).copied()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncalg::{Alphabet, GenKind};
    use crate::rewrite::{Relation, RewriteSystem};
    use crate::scalars::rat;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn naive_agrees_with_engine_on_the_plane() {
        let mut ab = Alphabet::new();
        let x = ab.add("x", GenKind::Coordinate, 1).unwrap();
        let y = ab.add("y", GenKind::Coordinate, 0).unwrap();
        let order = GeneratorOrder::from_alphabet(&ab);

        // xy - yx - h y^2 at h = 1/3.
        let hv = rat(1, 3);
        let rv = rat(0, 1);
        let rel = AlgElement::gen(x)
            .mul(&AlgElement::gen(y))
            .sub(&AlgElement::gen(y).mul(&AlgElement::gen(x)))
            .sub(&AlgElement::gen(y).pow(2).scale(&ParamScalar::h()))
            .substitute(&hv, &rv)
            .unwrap();
        let sys = RewriteSystem::orient(
            "plane",
            &[Relation::new("xy", rel.clone())],
            GeneratorOrder::from_alphabet(&ab),
        )
        .unwrap();

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let e = AlgElement::word(Word::from_ids(&[y, x, y, x, y]));
        for _ in 0..4 {
            let naive = naive_normal_form(&mut rng, &order, &[rel.clone()], &e);
            assert_eq!(naive, sys.normal_form(&e));
        }
    }
}
