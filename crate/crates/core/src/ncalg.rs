//! The free associative *-algebra over the parameter field on named
//! noncommuting generators.
//!
//! An [`Alphabet`] fixes the generator set of a model: names, kinds, the
//! *-involution (stored per generator as a signed image so the star never
//! needs model context) and the termination weights used by the rewrite
//! layer. Elements are finite linear combinations of words; no reduction
//! happens here.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;

use num::BigRational;
use smallvec::SmallVec;
use thiserror::Error;

use crate::scalars::{ParamScalar, ScalarError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgError {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("star image of `{0}` is not an involution")]
    BadInvolution(String),
    #[error("duplicate generator name `{0}`")]
    DuplicateName(String),
}

/// Index of a generator inside its alphabet. The index order is the
/// precedence used by word comparison (smaller index = smaller letter).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GenId(pub u8);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenKind {
    Group,
    GroupStar,
    Coordinate,
    Derivative,
    Form,
}

/// A generator together with a sign, as produced by the *-involution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignedGen {
    pub gen: GenId,
    pub negated: bool,
}

#[derive(Debug, Clone)]
pub struct Generator {
    pub name: String,
    pub kind: GenKind,
    pub star: SignedGen,
    /// Termination weight for the rewrite order; see the rewrite module.
    pub weight: u32,
}

/// The generator set of one model, in precedence order.
#[derive(Debug, Clone, Default)]
pub struct Alphabet {
    gens: Vec<Generator>,
    by_name: BTreeMap<String, GenId>,
}

impl Alphabet {
    pub fn new() -> Self {
        Alphabet::default()
    }

    /// Appends a generator; its star defaults to itself with positive sign.
    pub fn add(&mut self, name: &str, kind: GenKind, weight: u32) -> Result<GenId, AlgError> {
        if self.by_name.contains_key(name) {
            return Err(AlgError::DuplicateName(name.into()));
        }
        let id = GenId(self.gens.len() as u8);
        self.gens.push(Generator {
            name: name.into(),
            kind,
            star: SignedGen {
                gen: id,
                negated: false,
            },
            weight,
        });
        self.by_name.insert(name.into(), id);
        Ok(id)
    }

    /// Declares `a* = sign * b` and `b* = sign * a`.
    pub fn set_star_pair(&mut self, a: GenId, b: GenId, negated: bool) {
        self.gens[a.0 as usize].star = SignedGen { gen: b, negated };
        self.gens[b.0 as usize].star = SignedGen { gen: a, negated };
    }

    /// Declares `g* = sign * g`.
    pub fn set_star_self(&mut self, g: GenId, negated: bool) {
        self.gens[g.0 as usize].star = SignedGen { gen: g, negated };
    }

    /// Checks that the declared star is an involution.
    pub fn validate(&self) -> Result<(), AlgError> {
        for (i, g) in self.gens.iter().enumerate() {
            let img = g.star;
            let back = self.gens[img.gen.0 as usize].star;
            if back.gen.0 as usize != i || back.negated != img.negated {
                return Err(AlgError::BadInvolution(g.name.clone()));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn generator(&self, id: GenId) -> &Generator {
        &self.gens[id.0 as usize]
    }

    pub fn name(&self, id: GenId) -> &str {
        &self.gens[id.0 as usize].name
    }

    pub fn lookup(&self, name: &str) -> Result<GenId, AlgError> {
        self.by_name
            .get(name)
            .copied()
            .ok_or_else(|| AlgError::UnknownGenerator(name.into()))
    }

    pub fn generators(&self) -> impl Iterator<Item = (GenId, &Generator)> {
        self.gens
            .iter()
            .enumerate()
            .map(|(i, g)| (GenId(i as u8), g))
    }

    pub fn weights(&self) -> Vec<u32> {
        self.gens.iter().map(|g| g.weight).collect()
    }

    /// The antimultiplicative involution: reverses words, maps each letter
    /// through its declared star image and fixes coefficients (the parameters
    /// are real).
    pub fn star(&self, x: &AlgElement) -> AlgElement {
        let mut out = AlgElement::zero();
        for (w, c) in x.terms() {
            let mut letters: SmallVec<[u8; 12]> = SmallVec::new();
            let mut neg = false;
            for &l in w.letters().iter().rev() {
                let img = self.gens[l as usize].star;
                letters.push(img.gen.0);
                neg ^= img.negated;
            }
            let coeff = if neg { -c } else { c.clone() };
            out.insert_add(Word(letters), coeff);
        }
        out
    }
}

/// A word in the free monoid on the alphabet. The empty word is the unit.
/// Ordered by length first, then lexicographically by generator precedence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(pub SmallVec<[u8; 12]>);

impl Word {
    pub fn empty() -> Self {
        Word(SmallVec::new())
    }

    pub fn single(g: GenId) -> Self {
        Word(SmallVec::from_slice(&[g.0]))
    }

    pub fn from_ids(ids: &[GenId]) -> Self {
        Word(ids.iter().map(|g| g.0).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.0.len(), &self.0).cmp(&(other.0.len(), &other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A finite linear combination of words with parameter-field coefficients.
/// No zero coefficients are stored; the term map itself is the canonical
/// form used for equality and display.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AlgElement {
    terms: BTreeMap<Word, ParamScalar>,
}

impl AlgElement {
    pub fn zero() -> Self {
        AlgElement::default()
    }

    pub fn one() -> Self {
        AlgElement::from_scalar(ParamScalar::one())
    }

    pub fn from_scalar(c: ParamScalar) -> Self {
        let mut e = AlgElement::zero();
        e.insert_add(Word::empty(), c);
        e
    }

    pub fn gen(g: GenId) -> Self {
        AlgElement::word(Word::single(g))
    }

    pub fn word(w: Word) -> Self {
        let mut e = AlgElement::zero();
        e.insert_add(w, ParamScalar::one());
        e
    }

    pub fn insert_add(&mut self, w: Word, c: ParamScalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &ParamScalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Maximum word length appearing in the element.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(|w| w.len()).max().unwrap_or(0)
    }

    /// The coefficient of the empty word, if the element is purely scalar.
    pub fn as_scalar(&self) -> Option<ParamScalar> {
        if self.terms.is_empty() {
            return Some(ParamScalar::zero());
        }
        if self.terms.len() == 1 {
            if let Some(c) = self.terms.get(&Word::empty()) {
                return Some(c.clone());
            }
        }
        None
    }

    pub fn coefficient(&self, w: &Word) -> ParamScalar {
        self.terms.get(w).cloned().unwrap_or_else(ParamScalar::zero)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.insert_add(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.insert_add(w.clone(), -c);
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = AlgElement::zero();
        for (w, c) in &self.terms {
            out.terms.insert(w.clone(), -c);
        }
        out
    }

    /// Free-algebra product: bilinear concatenation of words.
    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = AlgElement::zero();
        for (wa, ca) in &self.terms {
            for (wb, cb) in &rhs.terms {
                out.insert_add(wa.concat(wb), ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &ParamScalar) -> Self {
        if c.is_zero() {
            return AlgElement::zero();
        }
        let mut out = AlgElement::zero();
        for (w, v) in &self.terms {
            out.terms.insert(w.clone(), v * c);
        }
        out
    }

    /// `xy - yx`, unreduced.
    pub fn commutator(&self, rhs: &Self) -> Self {
        self.mul(rhs).sub(&rhs.mul(self))
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = AlgElement::one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Substitutes rational values for the parameters coefficient-wise.
    pub fn substitute(
        &self,
        h: &BigRational,
        r: &BigRational,
    ) -> Result<AlgElement, ScalarError> {
        let mut out = AlgElement::zero();
        for (w, c) in &self.terms {
            out.insert_add(w.clone(), c.substitute(h, r)?);
        }
        Ok(out)
    }

    /// Relabels every letter through the given map (used to build algebra
    /// copies on fresh generators).
    pub fn map_gens(&self, f: impl Fn(GenId) -> GenId) -> AlgElement {
        let mut out = AlgElement::zero();
        for (w, c) in &self.terms {
            let letters: SmallVec<[u8; 12]> =
                w.letters().iter().map(|&l| f(GenId(l)).0).collect();
            out.insert_add(Word(letters), c.clone());
        }
        out
    }
}

/// Renders a word using the alphabet's generator names, compressing runs of
/// equal letters with `^`.
pub fn render_word(ab: &Alphabet, w: &Word) -> String {
    if w.is_empty() {
        return "1".into();
    }
    let mut out = String::new();
    let letters = w.letters();
    let mut i = 0;
    let mut first = true;
    while i < letters.len() {
        let mut j = i;
        while j < letters.len() && letters[j] == letters[i] {
            j += 1;
        }
        if !first {
            out.push('*');
        }
        first = false;
        out.push_str(ab.name(GenId(letters[i])));
        if j - i > 1 {
            let _ = write!(out, "^{}", j - i);
        }
        i = j;
    }
    out
}

/// Renders an element in the CLI expression grammar; parsing the result
/// returns the same element.
pub fn render_element(ab: &Alphabet, e: &AlgElement) -> String {
    if e.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (w, c)) in e.terms().enumerate() {
        // Pull a leading minus out of single-monomial coefficients so terms
        // join with `-` rather than `+ -`.
        let disp = c.to_string();
        let (neg, mag) = match disp.strip_prefix('-') {
            Some(rest) if !rest.contains(" - ") && !rest.contains(" + ") => {
                (true, rest.to_string())
            }
            _ => (false, disp),
        };
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else if neg {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        let needs_parens = mag.contains(" + ") || mag.contains(" - ");
        let coeff_part = if needs_parens {
            format!("({})", mag)
        } else {
            mag.clone()
        };
        if w.is_empty() {
            out.push_str(&coeff_part);
        } else if mag == "1" {
            out.push_str(&render_word(ab, w));
        } else {
            out.push_str(&coeff_part);
            out.push('*');
            out.push_str(&render_word(ab, w));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::rat_int;
    use proptest::prelude::*;

    fn coords() -> (Alphabet, [GenId; 4]) {
        let mut ab = Alphabet::new();
        let al = ab.add("al", GenKind::Coordinate, 2).unwrap();
        let be = ab.add("be", GenKind::Coordinate, 1).unwrap();
        let ga = ab.add("ga", GenKind::Coordinate, 1).unwrap();
        let de = ab.add("de", GenKind::Coordinate, 0).unwrap();
        ab.set_star_self(al, false);
        ab.set_star_pair(be, ga, false);
        ab.set_star_self(de, false);
        ab.validate().unwrap();
        (ab, [al, be, ga, de])
    }

    fn derivs() -> (Alphabet, [GenId; 4]) {
        let mut ab = Alphabet::new();
        let da = ab.add("d_al", GenKind::Derivative, 0).unwrap();
        let db = ab.add("d_be", GenKind::Derivative, 0).unwrap();
        let dg = ab.add("d_ga", GenKind::Derivative, 0).unwrap();
        let dd = ab.add("d_de", GenKind::Derivative, 0).unwrap();
        ab.set_star_self(da, true);
        ab.set_star_pair(db, dg, true);
        ab.set_star_self(dd, true);
        ab.validate().unwrap();
        (ab, [da, db, dg, dd])
    }

    #[test]
    fn free_product_does_not_reduce() {
        let (_, [al, _, _, de]) = coords();
        let c = AlgElement::gen(al).commutator(&AlgElement::gen(de));
        assert_eq!(c.num_terms(), 2);
    }

    #[test]
    fn unit_law_and_distributivity() {
        let (_, [al, be, ga, _]) = coords();
        let x = AlgElement::gen(al).add(&AlgElement::gen(be));
        assert_eq!(x.mul(&AlgElement::one()), x);
        let lhs = x.mul(&AlgElement::gen(ga));
        let rhs = AlgElement::gen(al)
            .mul(&AlgElement::gen(ga))
            .add(&AlgElement::gen(be).mul(&AlgElement::gen(ga)));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn star_reverses_and_maps() {
        let (ab, [al, be, ga, _]) = coords();
        let x = AlgElement::gen(al).mul(&AlgElement::gen(be));
        let s = ab.star(&x);
        assert_eq!(s, AlgElement::gen(ga).mul(&AlgElement::gen(al)));
    }

    #[test]
    fn star_on_antihermitian_pair() {
        // star(d_be d_ga) = (-d_be)(-d_ga) = d_be d_ga.
        let (ab, [_, db, dg, _]) = derivs();
        let x = AlgElement::gen(db).mul(&AlgElement::gen(dg));
        assert_eq!(ab.star(&x), x);
    }

    #[test]
    fn commutator_basics() {
        let (_, [al, be, _, _]) = coords();
        let a = AlgElement::gen(al);
        assert!(a.commutator(&a).is_zero());
        let c = a.commutator(&AlgElement::gen(be));
        assert_eq!(c.num_terms(), 2);
    }

    #[test]
    fn render_examples() {
        let (ab, [al, be, _, de]) = coords();
        let h = ParamScalar::h();
        let e = AlgElement::gen(al)
            .mul(&AlgElement::gen(de))
            .add(&AlgElement::gen(be).mul(&AlgElement::gen(de)).scale(&h));
        assert_eq!(render_element(&ab, &e), "al*de + h*be*de");
        let sq = AlgElement::gen(de).pow(2).scale(&h);
        assert_eq!(render_element(&ab, &sq), "h*de^2");
    }

    fn arb_element() -> impl Strategy<Value = AlgElement> {
        let word = prop::collection::vec(0u8..4, 0..4);
        prop::collection::vec((word, -3i64..4), 0..4).prop_map(|ts| {
            let mut e = AlgElement::zero();
            for (ls, c) in ts {
                e.insert_add(
                    Word(SmallVec::from_vec(ls)),
                    ParamScalar::from_rat(rat_int(c)),
                );
            }
            e
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn multiplication_associative(x in arb_element(), y in arb_element(), z in arb_element()) {
            prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
        }

        #[test]
        fn star_is_anti_automorphism(x in arb_element(), y in arb_element()) {
            let (ab, _) = coords();
            prop_assert_eq!(ab.star(&x.mul(&y)), ab.star(&y).mul(&ab.star(&x)));
            prop_assert_eq!(ab.star(&x.add(&y)), ab.star(&x).add(&ab.star(&y)));
            prop_assert_eq!(ab.star(&ab.star(&x)), x);
        }

        #[test]
        fn commutator_antisymmetric(x in arb_element(), y in arb_element()) {
            prop_assert_eq!(x.commutator(&y), y.commutator(&x).neg());
        }

        #[test]
        fn substitution_is_ring_hom(x in arb_element(), y in arb_element()) {
            let (h, r) = (rat_int(0), rat_int(0));
            let lhs = x.mul(&y).substitute(&h, &r).unwrap();
            let rhs = x.substitute(&h, &r).unwrap().mul(&y.substitute(&h, &r).unwrap());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn render_word_is_stable(x in arb_element()) {
            let (ab, _) = coords();
            // Rendering never panics and is deterministic.
            let s1 = render_element(&ab, &x);
            let s2 = render_element(&ab, &x);
            prop_assert_eq!(s1, s2);
        }
    }
}
