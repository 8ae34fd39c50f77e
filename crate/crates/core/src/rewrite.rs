//! Oriented rewriting for quadratic (and inhomogeneous mixed) relation sets:
//! normal forms, overlap (diamond-lemma) confluence diagnostics and bounded
//! completion.
//!
//! Rules rewrite a word into strictly smaller elements under the term order
//! `(degree, weight, lex)`, where the per-generator weights come from the
//! alphabet. Degree is compared first, so inhomogeneous rules that drop a
//! constant still terminate; the weight layer is what lets relations whose
//! right-hand side contains the square of a *later* generator (for example
//! a rule sending a mixed pair to a square of the last coordinate) orient
//! while keeping the plain generator precedence for display.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::Mutex;

use thiserror::Error;

use crate::ncalg::{AlgElement, Alphabet, GenId, Word};
use crate::scalars::ParamScalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RewriteError {
    #[error("relation `{label}` cannot be oriented: {reason}")]
    NonOrientable { label: String, reason: String },
    #[error("system `{system}` is not confluent up to degree {degree}")]
    NotConfluent { system: String, degree: u32 },
    #[error("completion of `{system}` exceeded degree {degree}")]
    CompletionBound { system: String, degree: u32 },
}

/// A named relation `element = 0`.
#[derive(Debug, Clone)]
pub struct Relation {
    pub label: String,
    pub element: AlgElement,
}

impl Relation {
    pub fn new(label: impl Into<String>, element: AlgElement) -> Self {
        Relation {
            label: label.into(),
            element,
        }
    }
}

/// Word comparison data: generator precedence is the alphabet index order,
/// refined by per-generator termination weights.
#[derive(Debug, Clone)]
pub struct GeneratorOrder {
    weights: Vec<u32>,
}

impl GeneratorOrder {
    pub fn from_alphabet(ab: &Alphabet) -> Self {
        GeneratorOrder {
            weights: ab.weights(),
        }
    }

    pub fn word_weight(&self, w: &Word) -> u64 {
        w.letters()
            .iter()
            .map(|&l| self.weights[l as usize] as u64)
            .sum()
    }

    pub fn cmp_words(&self, a: &Word, b: &Word) -> std::cmp::Ordering {
        a.len()
            .cmp(&b.len())
            .then_with(|| self.word_weight(a).cmp(&self.word_weight(b)))
            .then_with(|| a.letters().cmp(b.letters()))
    }

    /// Largest term of an element under the order.
    pub fn leading<'e>(&self, e: &'e AlgElement) -> Option<(&'e Word, &'e ParamScalar)> {
        e.terms().max_by(|(wa, _), (wb, _)| self.cmp_words(wa, wb))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Leftmost,
    Rightmost,
}

/// An unresolved overlap: one word, two reductions, two distinct results.
#[derive(Debug, Clone)]
pub struct OverlapWitness {
    pub word: Word,
    pub rule_left: Word,
    pub rule_right: Word,
    pub left_nf: AlgElement,
    pub right_nf: AlgElement,
}

#[derive(Debug, Clone)]
pub struct ConfluenceReport {
    pub system: String,
    pub max_degree: u32,
    pub unresolved: Vec<OverlapWitness>,
}

impl ConfluenceReport {
    pub fn is_confluent(&self) -> bool {
        self.unresolved.is_empty()
    }
}

/// An oriented, interreduced rule set. Immutable once built; normal forms
/// are pure and safe to compute concurrently.
#[derive(Debug)]
pub struct RewriteSystem {
    pub name: String,
    order: GeneratorOrder,
    rules: BTreeMap<Word, AlgElement>,
    by_first: BTreeMap<u8, Vec<Word>>,
    confluent_to: Mutex<Option<u32>>,
}

impl Clone for RewriteSystem {
    fn clone(&self) -> Self {
        RewriteSystem {
            name: self.name.clone(),
            order: self.order.clone(),
            rules: self.rules.clone(),
            by_first: self.by_first.clone(),
            confluent_to: Mutex::new(*self.confluent_to.lock().unwrap()),
        }
    }
}

fn splice(w: &Word, pos: usize, len: usize, mid: &Word) -> Word {
    let mut v = smallvec::SmallVec::new();
    v.extend_from_slice(&w.letters()[..pos]);
    v.extend_from_slice(mid.letters());
    v.extend_from_slice(&w.letters()[pos + len..]);
    Word(v)
}

impl RewriteSystem {
    pub fn empty(name: impl Into<String>, order: GeneratorOrder) -> Self {
        RewriteSystem {
            name: name.into(),
            order,
            rules: BTreeMap::new(),
            by_first: BTreeMap::new(),
            confluent_to: Mutex::new(None),
        }
    }

    /// Orients a relation set into an interreduced system. Each relation is
    /// first reduced by the rules gathered so far; the residual's largest
    /// word becomes a new left-hand side.
    pub fn orient(
        name: impl Into<String>,
        relations: &[Relation],
        order: GeneratorOrder,
    ) -> Result<Self, RewriteError> {
        let mut sys = RewriteSystem::empty(name, order);
        let mut pending: VecDeque<(String, AlgElement)> = relations
            .iter()
            .map(|r| (r.label.clone(), r.element.clone()))
            .collect();
        while let Some((label, rel)) = pending.pop_front() {
            sys.insert_relation(&label, rel, &mut pending)?;
        }
        sys.renormalize_rhs();
        sys.validate_decreasing()?;
        Ok(sys)
    }

    fn insert_relation(
        &mut self,
        label: &str,
        rel: AlgElement,
        pending: &mut VecDeque<(String, AlgElement)>,
    ) -> Result<(), RewriteError> {
        let red = self.normal_form(&rel);
        if red.is_zero() {
            return Ok(());
        }
        let (lead, coeff) = {
            let (w, c) = self.order.leading(&red).expect("nonzero element");
            (w.clone(), c.clone())
        };
        if lead.is_empty() {
            return Err(RewriteError::NonOrientable {
                label: label.into(),
                reason: "relation reduces to a nonzero constant".into(),
            });
        }
        let inv = coeff.inv().expect("leading coefficient is nonzero");
        let mut rhs = red;
        rhs.insert_add(lead.clone(), -&coeff);
        let rhs = rhs.neg().scale(&inv);
        // Any longer rule whose left side contains the new one must be
        // re-derived from scratch.
        let displaced: Vec<Word> = self
            .rules
            .keys()
            .filter(|k| k.len() > lead.len() && contains_subword(k, &lead))
            .cloned()
            .collect();
        for k in displaced {
            let old = self.remove_rule(&k);
            pending.push_back((
                format!("displaced:{}", label),
                AlgElement::word(k).sub(&old),
            ));
        }
        self.add_rule(lead, rhs);
        Ok(())
    }

    fn add_rule(&mut self, lhs: Word, rhs: AlgElement) {
        let first = lhs.letters()[0];
        self.by_first.entry(first).or_default().push(lhs.clone());
        self.rules.insert(lhs, rhs);
        *self.confluent_to.lock().unwrap() = None;
    }

    fn remove_rule(&mut self, lhs: &Word) -> AlgElement {
        let first = lhs.letters()[0];
        if let Some(v) = self.by_first.get_mut(&first) {
            v.retain(|w| w != lhs);
        }
        *self.confluent_to.lock().unwrap() = None;
        self.rules.remove(lhs).expect("rule present")
    }

    fn renormalize_rhs(&mut self) {
        loop {
            let mut changed = false;
            let keys: Vec<Word> = self.rules.keys().cloned().collect();
            for k in keys {
                let rhs = self.rules[&k].clone();
                let nf = self.normal_form(&rhs);
                if nf != rhs {
                    self.rules.insert(k, nf);
                    changed = true;
                }
            }
            if !changed {
                return;
            }
        }
    }

    fn validate_decreasing(&self) -> Result<(), RewriteError> {
        for (lhs, rhs) in &self.rules {
            for (w, _) in rhs.terms() {
                if self.order.cmp_words(w, lhs) != std::cmp::Ordering::Less {
                    return Err(RewriteError::NonOrientable {
                        label: format!("{:?}", lhs),
                        reason: "right-hand side is not smaller than the left".into(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn order(&self) -> &GeneratorOrder {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn rules(&self) -> impl Iterator<Item = (&Word, &AlgElement)> {
        self.rules.iter()
    }

    /// The rule set re-expressed as relations `lhs - rhs = 0`.
    pub fn as_relations(&self) -> Vec<AlgElement> {
        self.rules
            .iter()
            .map(|(l, r)| AlgElement::word(l.clone()).sub(r))
            .collect()
    }

    fn find_redex(&self, w: &Word, strategy: Strategy) -> Option<(usize, usize, &AlgElement)> {
        let letters = w.letters();
        let scan = |pos: usize| -> Option<(usize, usize, &AlgElement)> {
            let cands = self.by_first.get(&letters[pos])?;
            for lhs in cands {
                let l = lhs.len();
                if pos + l <= letters.len() && &letters[pos..pos + l] == lhs.letters() {
                    return Some((pos, l, &self.rules[lhs]));
                }
            }
            None
        };
        match strategy {
            Strategy::Leftmost => (0..letters.len()).find_map(scan),
            Strategy::Rightmost => (0..letters.len()).rev().find_map(scan),
        }
    }

    /// Fully reduces an element (memoised, leftmost strategy).
    pub fn normal_form(&self, e: &AlgElement) -> AlgElement {
        Reducer::new(self).reduce(e)
    }

    /// One-word-at-a-time reduction under an explicit strategy; used to test
    /// strategy independence on confluent systems.
    pub fn normal_form_strategy(&self, e: &AlgElement, strategy: Strategy) -> AlgElement {
        let mut out = AlgElement::zero();
        let mut work: BTreeMap<Word, ParamScalar> =
            e.terms().map(|(w, c)| (w.clone(), c.clone())).collect();
        while let Some((w, c)) = work.pop_last() {
            if c.is_zero() {
                continue;
            }
            match self.find_redex(&w, strategy) {
                None => out.insert_add(w, c),
                Some((pos, len, rhs)) => {
                    let terms: Vec<(Word, ParamScalar)> = rhs
                        .terms()
                        .map(|(rw, rc)| (splice(&w, pos, len, rw), &c * rc))
                        .collect();
                    for (nw, nc) in terms {
                        match work.entry(nw) {
                            std::collections::btree_map::Entry::Vacant(v) => {
                                if !nc.is_zero() {
                                    v.insert(nc);
                                }
                            }
                            std::collections::btree_map::Entry::Occupied(mut o) => {
                                let s = o.get() + &nc;
                                if s.is_zero() {
                                    o.remove();
                                } else {
                                    *o.get_mut() = s;
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Enumerates every overlap word up to `max_degree` and reduces it both
    /// ways to full normal form.
    pub fn check_confluence(&self, max_degree: u32) -> ConfluenceReport {
        assert!(max_degree >= 3, "overlap analysis needs degree >= 3");
        let mut unresolved = Vec::new();
        let keys: Vec<&Word> = self.rules.keys().collect();
        let mut reducer = Reducer::new(self);
        for &u in &keys {
            for &v in &keys {
                let kmax = u.len().min(v.len());
                for k in 1..kmax.max(1) {
                    if u.letters()[u.len() - k..] != v.letters()[..k] {
                        continue;
                    }
                    let total = u.len() + v.len() - k;
                    if total > max_degree as usize {
                        continue;
                    }
                    // w = u . v[k..]; reduce via rule u at 0 and rule v at |u|-k.
                    let tail = Word(smallvec::SmallVec::from_slice(&v.letters()[k..]));
                    let head = Word(smallvec::SmallVec::from_slice(
                        &u.letters()[..u.len() - k],
                    ));
                    let via_u = self.rules[u].mul(&AlgElement::word(tail.clone()));
                    let via_v = AlgElement::word(head.clone()).mul(&self.rules[v]);
                    let nf_u = reducer.reduce(&via_u);
                    let nf_v = reducer.reduce(&via_v);
                    if nf_u != nf_v {
                        let mut wl = u.clone();
                        wl.0.extend_from_slice(tail.letters());
                        unresolved.push(OverlapWitness {
                            word: wl,
                            rule_left: u.clone(),
                            rule_right: v.clone(),
                            left_nf: nf_u,
                            right_nf: nf_v,
                        });
                    }
                }
            }
        }
        if unresolved.is_empty() {
            let mut cache = self.confluent_to.lock().unwrap();
            let prev = cache.unwrap_or(0);
            *cache = Some(prev.max(max_degree));
        }
        ConfluenceReport {
            system: self.name.clone(),
            max_degree,
            unresolved,
        }
    }

    /// Adds normal-formed overlap differences as new rules until the system
    /// is confluent, or fails beyond the degree bound. Returns the completed
    /// system together with the rules that had to be added.
    pub fn complete(
        mut self,
        max_degree: u32,
        max_rounds: u32,
    ) -> Result<(Self, Vec<(Word, AlgElement)>), RewriteError> {
        let mut added = Vec::new();
        for _ in 0..max_rounds {
            let report = self.check_confluence(max_degree);
            if report.is_confluent() {
                return Ok((self, added));
            }
            for ow in report.unresolved {
                let diff = ow.left_nf.sub(&ow.right_nf);
                let red = self.normal_form(&diff);
                if red.is_zero() {
                    continue;
                }
                if let Some((lead, _)) = self.order.leading(&red) {
                    if lead.len() > max_degree as usize {
                        return Err(RewriteError::CompletionBound {
                            system: self.name.clone(),
                            degree: max_degree,
                        });
                    }
                }
                let mut pending = VecDeque::new();
                self.insert_relation("completion", red, &mut pending)?;
                while let Some((label, rel)) = pending.pop_front() {
                    self.insert_relation(&label, rel, &mut pending)?;
                }
                if let Some((lhs, rhs)) = self.rules.iter().next_back() {
                    added.push((lhs.clone(), rhs.clone()));
                }
            }
            self.renormalize_rhs();
        }
        Err(RewriteError::NotConfluent {
            system: self.name.clone(),
            degree: max_degree,
        })
    }

    fn ensure_confluent(&self, degree: u32) -> Result<(), RewriteError> {
        let degree = degree.max(3);
        {
            let cache = self.confluent_to.lock().unwrap();
            if let Some(d) = *cache {
                if d >= degree {
                    return Ok(());
                }
            }
        }
        if self.check_confluence(degree).is_confluent() {
            Ok(())
        } else {
            Err(RewriteError::NotConfluent {
                system: self.name.clone(),
                degree,
            })
        }
    }

    /// `true` iff `x - y` reduces to zero. Requires confluence up to the
    /// degree of the inputs so a nonzero answer is meaningful.
    pub fn equivalent_modulo(&self, x: &AlgElement, y: &AlgElement) -> Result<bool, RewriteError> {
        let deg = x.degree().max(y.degree()) as u32;
        self.ensure_confluent(deg)?;
        Ok(self.normal_form(&x.sub(y)).is_zero())
    }

    /// Generators among `gens` that fail to commute with `x` modulo the
    /// system; empty means `x` is central.
    pub fn central_witnesses(
        &self,
        x: &AlgElement,
        gens: &[GenId],
    ) -> Result<Vec<GenId>, RewriteError> {
        self.ensure_confluent(x.degree() as u32 + 1)?;
        let mut out = Vec::new();
        for &g in gens {
            let c = x.commutator(&AlgElement::gen(g));
            if !self.normal_form(&c).is_zero() {
                out.push(g);
            }
        }
        Ok(out)
    }

    pub fn is_central(&self, x: &AlgElement, gens: &[GenId]) -> Result<bool, RewriteError> {
        Ok(self.central_witnesses(x, gens)?.is_empty())
    }

    /// Rules whose starred relation does not reduce to zero; empty means the
    /// relation ideal is invariant under the involution.
    pub fn star_violations(&self, ab: &Alphabet) -> Result<Vec<(Word, AlgElement)>, RewriteError> {
        let deg = self.rules.keys().map(|w| w.len()).max().unwrap_or(2) as u32 + 1;
        self.ensure_confluent(deg)?;
        let mut out = Vec::new();
        for (lhs, rhs) in &self.rules {
            let rel = AlgElement::word(lhs.clone()).sub(rhs);
            let starred = ab.star(&rel);
            let nf = self.normal_form(&starred);
            if !nf.is_zero() {
                out.push((lhs.clone(), nf));
            }
        }
        Ok(out)
    }

    pub fn closed_under_star(&self, ab: &Alphabet) -> Result<bool, RewriteError> {
        Ok(self.star_violations(ab)?.is_empty())
    }
}

fn contains_subword(hay: &Word, needle: &Word) -> bool {
    let h = hay.letters();
    let n = needle.letters();
    if n.len() > h.len() {
        return false;
    }
    (0..=h.len() - n.len()).any(|i| &h[i..i + n.len()] == n)
}

/// Memoised word-level reducer over one rewrite system.
pub struct Reducer<'a> {
    sys: &'a RewriteSystem,
    memo: HashMap<Word, AlgElement>,
}

impl<'a> Reducer<'a> {
    pub fn new(sys: &'a RewriteSystem) -> Self {
        Reducer {
            sys,
            memo: HashMap::new(),
        }
    }

    pub fn reduce(&mut self, e: &AlgElement) -> AlgElement {
        let mut out = AlgElement::zero();
        for (w, c) in e.terms() {
            let nf = self.reduce_word(w);
            for (nw, nc) in nf.terms() {
                out.insert_add(nw.clone(), nc * c);
            }
        }
        out
    }

    fn reduce_word(&mut self, w: &Word) -> AlgElement {
        if let Some(hit) = self.memo.get(w) {
            return hit.clone();
        }
        let sys = self.sys;
        let res = match sys.find_redex(w, Strategy::Leftmost) {
            None => AlgElement::word(w.clone()),
            Some((pos, len, rhs)) => {
                let mut acc = AlgElement::zero();
                for (rw, rc) in rhs.terms() {
                    let nw = splice(w, pos, len, rw);
                    let sub = self.reduce_word(&nw);
                    for (sw, sc) in sub.terms() {
                        acc.insert_add(sw.clone(), sc * rc);
                    }
                }
                acc
            }
        };
        self.memo.insert(w.clone(), res.clone());
        res
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncalg::GenKind;

    /// Two-generator quantum plane: xy = yx + h y^2.
    fn plane() -> (Alphabet, GenId, GenId) {
        let mut ab = Alphabet::new();
        let x = ab.add("x", GenKind::Coordinate, 1).unwrap();
        let y = ab.add("y", GenKind::Coordinate, 0).unwrap();
        (ab, x, y)
    }

    fn plane_system() -> (Alphabet, GenId, GenId, RewriteSystem) {
        let (ab, x, y) = plane();
        let h = ParamScalar::h();
        let rel = AlgElement::gen(x)
            .mul(&AlgElement::gen(y))
            .sub(&AlgElement::gen(y).mul(&AlgElement::gen(x)))
            .sub(&AlgElement::gen(y).pow(2).scale(&h));
        let sys = RewriteSystem::orient(
            "plane",
            &[Relation::new("xy", rel)],
            GeneratorOrder::from_alphabet(&ab),
        )
        .unwrap();
        (ab, x, y, sys)
    }

    #[test]
    fn orient_plane_and_reduce() {
        let (_ab, x, y, sys) = plane_system();
        assert_eq!(sys.len(), 1);
        // yx reduces to xy - h y^2.
        let nf = sys.normal_form(&AlgElement::word(Word::from_ids(&[y, x])));
        let expect = AlgElement::word(Word::from_ids(&[x, y]))
            .sub(&AlgElement::gen(y).pow(2).scale(&ParamScalar::h()));
        assert_eq!(nf, expect);
    }

    #[test]
    fn empty_system_is_identity() {
        let (ab, x, y) = plane();
        let sys = RewriteSystem::empty("none", GeneratorOrder::from_alphabet(&ab));
        let e = AlgElement::word(Word::from_ids(&[y, x, y]));
        assert_eq!(sys.normal_form(&e), e);
    }

    #[test]
    fn classical_commutation_is_confluent() {
        // Three commuting generators: all six ordered rules are xy -> yx.
        let mut ab = Alphabet::new();
        let ids: Vec<GenId> = ["p", "q", "s"]
            .iter()
            .map(|n| ab.add(n, GenKind::Coordinate, 0).unwrap())
            .collect();
        let mut rels = Vec::new();
        for i in 0..3 {
            for j in (i + 1)..3 {
                rels.push(Relation::new(
                    format!("[{},{}]", i, j),
                    AlgElement::gen(ids[i]).commutator(&AlgElement::gen(ids[j])),
                ));
            }
        }
        let sys =
            RewriteSystem::orient("classical", &rels, GeneratorOrder::from_alphabet(&ab)).unwrap();
        let rep = sys.check_confluence(4);
        assert!(rep.is_confluent());
        // Normal form sorts the word.
        let w = AlgElement::word(Word::from_ids(&[ids[2], ids[1], ids[0]]));
        let nf = sys.normal_form(&w);
        assert_eq!(nf, AlgElement::word(Word::from_ids(&[ids[0], ids[1], ids[2]])));
    }

    #[test]
    fn corrupted_rule_set_fails_confluence() {
        // Drop one term from a rule of a three-generator commuting system.
        let mut ab = Alphabet::new();
        let p = ab.add("p", GenKind::Coordinate, 0).unwrap();
        let q = ab.add("q", GenKind::Coordinate, 0).unwrap();
        let s = ab.add("s", GenKind::Coordinate, 0).unwrap();
        let order = GeneratorOrder::from_alphabet(&ab);
        let mut sys = RewriteSystem::empty("broken", order);
        sys.add_rule(Word::from_ids(&[q, p]), AlgElement::word(Word::from_ids(&[p, q])));
        // sq -> qs + p q  (deliberately inconsistent degree-2 tail)
        sys.add_rule(
            Word::from_ids(&[s, q]),
            AlgElement::word(Word::from_ids(&[q, s]))
                .add(&AlgElement::word(Word::from_ids(&[p, q]))),
        );
        sys.add_rule(Word::from_ids(&[s, p]), AlgElement::word(Word::from_ids(&[p, s])));
        let rep = sys.check_confluence(4);
        assert!(!rep.is_confluent());
        assert!(!rep.unresolved.is_empty());
    }

    #[test]
    fn strategy_independence_on_confluent_system() {
        let (_ab, x, y, sys) = plane_system();
        let e = AlgElement::word(Word::from_ids(&[y, x, y, x]))
            .add(&AlgElement::word(Word::from_ids(&[x, y, x])).scale(&ParamScalar::int(3)));
        let l = sys.normal_form_strategy(&e, Strategy::Leftmost);
        let r = sys.normal_form_strategy(&e, Strategy::Rightmost);
        let m = sys.normal_form(&e);
        assert_eq!(l, r);
        assert_eq!(l, m);
        // Idempotence.
        assert_eq!(sys.normal_form(&l), l);
    }

    #[test]
    fn equivalence_and_centrality_gates() {
        let (_ab, x, y, sys) = plane_system();
        let a = AlgElement::word(Word::from_ids(&[x, y]));
        let b = AlgElement::word(Word::from_ids(&[y, x]))
            .add(&AlgElement::gen(y).pow(2).scale(&ParamScalar::h()));
        assert!(sys.equivalent_modulo(&a, &b).unwrap());
        // y^2 is not central in the plane but y commutes with itself.
        assert!(sys.is_central(&AlgElement::gen(y), &[y]).unwrap());
        assert!(!sys.is_central(&AlgElement::gen(y), &[x, y]).unwrap());
    }

    #[test]
    fn completion_resolves_a_missing_consequence() {
        // A deliberately non-interreduced pair on three letters whose overlap
        // produces a new degree-2 consequence; completion must absorb it.
        let mut ab = Alphabet::new();
        let p = ab.add("p", GenKind::Coordinate, 0).unwrap();
        let q = ab.add("q", GenKind::Coordinate, 0).unwrap();
        let s = ab.add("s", GenKind::Coordinate, 0).unwrap();
        let order = GeneratorOrder::from_alphabet(&ab);
        let mut sys = RewriteSystem::empty("incomplete", order);
        sys.add_rule(Word::from_ids(&[q, p]), AlgElement::word(Word::from_ids(&[p, q])));
        sys.add_rule(
            Word::from_ids(&[s, q]),
            AlgElement::word(Word::from_ids(&[q, s]))
                .add(&AlgElement::word(Word::from_ids(&[p, q]))),
        );
        sys.add_rule(Word::from_ids(&[s, p]), AlgElement::word(Word::from_ids(&[p, s])));
        match sys.complete(4, 8) {
            Ok((done, added)) => {
                assert!(done.check_confluence(4).is_confluent());
                assert!(!added.is_empty());
            }
            Err(e) => panic!("completion failed: {e}"),
        }
    }

    #[test]
    fn reduction_step_count_is_bounded() {
        // Termination sanity: reducing a long misordered word finishes well
        // under a generous step budget.
        let (_ab, x, y, sys) = plane_system();
        let mut w = Vec::new();
        for _ in 0..5 {
            w.push(y);
            w.push(x);
        }
        let e = AlgElement::word(Word::from_ids(&w));
        let nf = sys.normal_form(&e);
        assert!(!nf.is_zero());
        assert!(nf.degree() == 10);
    }
}
