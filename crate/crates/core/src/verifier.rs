//! The identity suite: expands the defining reflection equations into scalar
//! relations, derives the algebra relation families, and checks every
//! structural property of the two models exactly.
//!
//! Every check is pure and deterministic; failures carry rendered witnesses.
//! Positive assertions reduce a difference to zero, which is sound for any
//! terminating rule set; negative assertions (non-centrality, non-reality)
//! first establish confluence of the system they reduce under.

use std::time::Instant;

use num::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::catalog::{Family, ModelSpec};
use crate::ncalg::{render_element, AlgElement, Alphabet, GenId, GenKind, Word};
use crate::oracle::naive_normal_form;
use crate::rewrite::{GeneratorOrder, Reducer, Relation, RewriteError, RewriteSystem};
use crate::scalars::{rat_int, ParamScalar};
use crate::tensor::AlgMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub id: String,
    pub status: CheckStatus,
    pub witnesses: Vec<String>,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub timing_micros: u64,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.status != CheckStatus::Fail
    }
}

/// Outcome of one check body, before timing is attached.
struct Outcome {
    status: CheckStatus,
    witnesses: Vec<String>,
    notes: Vec<String>,
}

impl Outcome {
    fn from_witnesses(witnesses: Vec<String>) -> Outcome {
        Outcome {
            status: if witnesses.is_empty() {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            witnesses,
            notes: Vec::new(),
        }
    }

    fn skipped(note: &str) -> Outcome {
        Outcome {
            status: CheckStatus::Skipped,
            witnesses: Vec::new(),
            notes: vec![note.into()],
        }
    }

    fn error(msg: String) -> Outcome {
        Outcome {
            status: CheckStatus::Fail,
            witnesses: vec![msg],
            notes: Vec::new(),
        }
    }
}

/// One side factor of a reflection-equation specification. Constant factors
/// are four-dimensional; generator matrices are embedded on a named leg.
#[derive(Debug, Clone)]
pub enum Factor {
    Const(AlgMatrix),
    Gen { matrix: AlgMatrix, leg: usize },
}

/// A two-sided matrix equation on two tensor legs, with an optional
/// inhomogeneous constant product added to the right side.
#[derive(Debug, Clone)]
pub struct ReflectionEqSpec {
    pub label: String,
    pub lhs: Vec<Factor>,
    pub rhs: Vec<Factor>,
    pub rhs_negated: bool,
    pub rhs_inhom: Option<Vec<Factor>>,
}

impl ReflectionEqSpec {
    pub fn new(label: &str, lhs: Vec<Factor>, rhs: Vec<Factor>) -> Self {
        ReflectionEqSpec {
            label: label.into(),
            lhs,
            rhs,
            rhs_negated: false,
            rhs_inhom: None,
        }
    }
}

fn expand_product(factors: &[Factor]) -> AlgMatrix {
    let mut acc = AlgMatrix::identity(4);
    for f in factors {
        let m = match f {
            Factor::Const(m) => m.clone(),
            Factor::Gen { matrix, leg } => matrix
                .leg_embed(2, &[*leg])
                .expect("generator matrices are 2x2"),
        };
        acc = acc.mul(&m);
    }
    acc
}

/// Expands both sides and returns the nonzero entries of their difference
/// as labelled relations.
pub fn derive_relations(eq: &ReflectionEqSpec) -> Vec<Relation> {
    let lhs = expand_product(&eq.lhs);
    let mut rhs = expand_product(&eq.rhs);
    if eq.rhs_negated {
        rhs = rhs.neg();
    }
    if let Some(extra) = &eq.rhs_inhom {
        rhs = rhs.add(&expand_product(extra));
    }
    let diff = lhs.sub(&rhs);
    let mut out = Vec::new();
    for ((i, j), e) in diff.entries() {
        if !e.is_zero() {
            out.push(Relation::new(
                format!("{}[{},{}]", eq.label, i, j),
                e.clone(),
            ));
        }
    }
    out
}

/// The derived relation families of one model.
#[derive(Debug, Clone)]
pub struct Derived {
    pub group_frt: Vec<Relation>,
    pub group_star_frt: Vec<Relation>,
    pub cross: Vec<Relation>,
    pub minkowski: Vec<Relation>,
    pub derivatives: Vec<Relation>,
    pub mixed: Vec<Relation>,
    pub forms_kdk: Vec<Relation>,
    pub forms_kdk_partner: Vec<Relation>,
    pub forms_dkdk: Vec<Relation>,
    pub braided_cross: Vec<Relation>,
}

impl Derived {
    pub fn build(spec: &ModelSpec) -> Result<Derived, String> {
        let m = spec.m();
        let md = spec.m_dagger();
        let k = spec.k();
        let kp = spec.k_copy();
        let y = spec.y();
        let dk = spec.dk();
        let r_h = spec.mats.r_h.clone();
        let r_h_t = r_h.transpose();
        let r2 = spec.mats.r2.clone();
        let r3 = spec.mats.r3.clone();
        let r2_inv = r2.invert_numeric().map_err(|e| e.to_string())?;
        let r3_inv = r3.invert_numeric().map_err(|e| e.to_string())?;
        let flip = spec.mats.flip.clone();

        let gen = |matrix: &AlgMatrix, leg: usize| Factor::Gen {
            matrix: matrix.clone(),
            leg,
        };
        let cst = |m: &AlgMatrix| Factor::Const(m.clone());

        let group_frt = derive_relations(&ReflectionEqSpec::new(
            "group",
            vec![cst(&r_h), gen(&m, 1), gen(&m, 2)],
            vec![gen(&m, 2), gen(&m, 1), cst(&r_h)],
        ));
        let group_star_frt = derive_relations(&ReflectionEqSpec::new(
            "group*",
            vec![cst(&r_h_t), gen(&md, 1), gen(&md, 2)],
            vec![gen(&md, 2), gen(&md, 1), cst(&r_h_t)],
        ));
        let mut cross = derive_relations(&ReflectionEqSpec::new(
            "cross2",
            vec![gen(&md, 1), cst(&r2), gen(&m, 2)],
            vec![gen(&m, 2), cst(&r2), gen(&md, 1)],
        ));
        cross.extend(derive_relations(&ReflectionEqSpec::new(
            "cross3",
            vec![gen(&md, 2), cst(&r3), gen(&m, 1)],
            vec![gen(&m, 1), cst(&r3), gen(&md, 2)],
        )));
        let minkowski = derive_relations(&ReflectionEqSpec::new(
            "minkowski",
            vec![cst(&r_h), gen(&k, 1), cst(&r2), gen(&k, 2)],
            vec![gen(&k, 2), cst(&r3), gen(&k, 1), cst(&r_h_t)],
        ));
        let derivatives = derive_relations(&ReflectionEqSpec::new(
            "derivatives",
            vec![cst(&r_h_t), gen(&y, 2), cst(&r2_inv), gen(&y, 1)],
            vec![gen(&y, 1), cst(&r3_inv), gen(&y, 2), cst(&r_h)],
        ));
        let mixed = derive_relations(&ReflectionEqSpec {
            label: "mixed".into(),
            lhs: vec![gen(&y, 2), cst(&r_h), gen(&k, 1), cst(&r2)],
            rhs: vec![cst(&r3), gen(&k, 1), cst(&r_h_t), gen(&y, 2)],
            rhs_negated: false,
            // Inhomogeneous part with the normalisation constant set to one.
            rhs_inhom: Some(vec![cst(&r3), cst(&flip)]),
        });
        let forms_kdk = derive_relations(&ReflectionEqSpec::new(
            "forms-kdk",
            vec![cst(&r_h), gen(&dk, 1), cst(&r2), gen(&k, 2)],
            vec![gen(&k, 2), cst(&r3), gen(&dk, 1), cst(&r_h_t)],
        ));
        let forms_kdk_partner = derive_relations(&ReflectionEqSpec::new(
            "forms-kdk-partner",
            vec![cst(&r_h), gen(&k, 1), cst(&r2), gen(&dk, 2)],
            vec![gen(&dk, 2), cst(&r3), gen(&k, 1), cst(&r_h_t)],
        ));
        let forms_dkdk = derive_relations(&ReflectionEqSpec {
            label: "forms-dkdk".into(),
            lhs: vec![cst(&r_h), gen(&dk, 1), cst(&r2), gen(&dk, 2)],
            rhs: vec![gen(&dk, 2), cst(&r3), gen(&dk, 1), cst(&r_h_t)],
            rhs_negated: true,
            rhs_inhom: None,
        });
        let braided_cross = derive_relations(&ReflectionEqSpec::new(
            "braided",
            vec![cst(&r_h), gen(&kp, 1), cst(&r2), gen(&k, 2)],
            vec![gen(&k, 2), cst(&r3), gen(&kp, 1), cst(&r_h_t)],
        ));

        Ok(Derived {
            group_frt,
            group_star_frt,
            cross,
            minkowski,
            derivatives,
            mixed,
            forms_kdk,
            forms_kdk_partner,
            forms_dkdk,
            braided_cross,
        })
    }
}

/// The rewrite systems shipped with a model.
#[derive(Debug, Clone)]
pub struct Systems {
    pub minkowski: RewriteSystem,
    pub derivatives: RewriteSystem,
    pub mixed: RewriteSystem,
    pub forms_kdk: RewriteSystem,
    pub forms_dkdk: RewriteSystem,
    pub braided: RewriteSystem,
    pub group_gl: RewriteSystem,
    pub group_sl: RewriteSystem,
}

impl Systems {
    pub fn shipped(&self) -> Vec<&RewriteSystem> {
        vec![
            &self.minkowski,
            &self.derivatives,
            &self.mixed,
            &self.forms_kdk,
            &self.forms_dkdk,
            &self.braided,
            &self.group_gl,
            &self.group_sl,
        ]
    }

    pub fn by_family(&self, family: Family) -> &RewriteSystem {
        match family {
            Family::Minkowski => &self.minkowski,
            Family::Derivatives => &self.derivatives,
            Family::MixedKY => &self.mixed,
            Family::FormsKdK => &self.forms_kdk,
            Family::FormsDKdK => &self.forms_dkdk,
            Family::BraidedCross => &self.braided,
            Family::Group => &self.group_gl,
            Family::LorentzCross => &self.group_sl,
        }
    }
}

fn star_relations(ab: &Alphabet, rels: &[Relation]) -> Vec<Relation> {
    rels.iter()
        .map(|r| Relation::new(format!("star({})", r.label), ab.star(&r.element)))
        .collect()
}

fn commuting_relations(label: &str, xs: &[GenId], ys: &[GenId]) -> Vec<Relation> {
    let mut out = Vec::new();
    for &x in xs {
        for &y in ys {
            out.push(Relation::new(
                format!("[{}({:?},{:?})]", label, x, y),
                AlgElement::gen(x).commutator(&AlgElement::gen(y)),
            ));
        }
    }
    out
}

pub struct Verifier {
    pub spec: ModelSpec,
    pub order: GeneratorOrder,
    pub derived: Derived,
    pub systems: Systems,
    pub completion_notes: Vec<String>,
}

impl Verifier {
    pub fn new(spec: ModelSpec) -> Result<Verifier, String> {
        let order = GeneratorOrder::from_alphabet(&spec.alphabet);
        let derived = Derived::build(&spec)?;
        let mut completion_notes = Vec::new();
        let systems = Self::build_systems(&spec, &derived, &mut completion_notes)?;
        Ok(Verifier {
            spec,
            order,
            derived,
            systems,
            completion_notes,
        })
    }

    fn build_one(
        name: &str,
        rels: &[Relation],
        order: &GeneratorOrder,
        notes: &mut Vec<String>,
        ab: &Alphabet,
    ) -> Result<RewriteSystem, String> {
        let sys = RewriteSystem::orient(name, rels, order.clone())
            .map_err(|e| format!("orienting `{name}`: {e}"))?;
        let before = sys.len();
        match sys.clone().complete(4, 40) {
            Ok((done, added)) => {
                if !added.is_empty() {
                    for (lhs, rhs) in &added {
                        notes.push(format!(
                            "{name}: completion added {} -> {}",
                            render_element(ab, &AlgElement::word(lhs.clone())),
                            render_element(ab, rhs)
                        ));
                    }
                }
                let _ = before;
                Ok(done)
            }
            Err(e) => {
                notes.push(format!("{name}: completion did not converge ({e})"));
                Ok(sys)
            }
        }
    }

    fn build_systems(
        spec: &ModelSpec,
        derived: &Derived,
        notes: &mut Vec<String>,
    ) -> Result<Systems, String> {
        let ab = &spec.alphabet;
        let order = GeneratorOrder::from_alphabet(ab);
        let mink = spec.printed_relations(Family::Minkowski).unwrap().to_vec();
        let derv = spec.printed_relations(Family::Derivatives).unwrap().to_vec();
        let group = spec.printed_relations(Family::Group).unwrap().to_vec();
        let cross = spec
            .printed_relations(Family::LorentzCross)
            .unwrap()
            .to_vec();

        let minkowski = Self::build_one("minkowski", &mink, &order, notes, ab)?;
        let derivatives = Self::build_one("derivatives", &derv, &order, notes, ab)?;

        let mut mixed_rels = mink.clone();
        mixed_rels.extend(derv.clone());
        mixed_rels.extend(derived.mixed.clone());
        let mixed = Self::build_one("mixed", &mixed_rels, &order, notes, ab)?;

        let mut kdk_rels = mink.clone();
        kdk_rels.extend(derived.forms_kdk.clone());
        let forms_kdk = Self::build_one("forms-kdk", &kdk_rels, &order, notes, ab)?;

        let forms_dkdk =
            Self::build_one("forms-dkdk", &derived.forms_dkdk, &order, notes, ab)?;

        let copy_map = {
            let coord = spec.gens.coord;
            let copy = spec.gens.coord_copy;
            move |g: GenId| {
                coord
                    .iter()
                    .position(|&c| c == g)
                    .map(|i| copy[i])
                    .unwrap_or(g)
            }
        };
        let mut braided_rels = mink.clone();
        braided_rels.extend(mink.iter().map(|r| {
            Relation::new(format!("copy({})", r.label), r.element.map_gens(copy_map))
        }));
        braided_rels.extend(derived.braided_cross.clone());
        let braided = Self::build_one("braided", &braided_rels, &order, notes, ab)?;

        let group_gl = Self::build_one("group-gl", &group, &order, notes, ab)?;

        let one = AlgElement::one();
        let det_one = Relation::new("det=1", spec.group_det().sub(&one));
        let det_one_star =
            Relation::new("det*=1", ab.star(&spec.group_det()).sub(&one));
        let mut sl_rels = group.clone();
        sl_rels.extend(star_relations(ab, &group));
        sl_rels.push(det_one);
        sl_rels.push(det_one_star);
        sl_rels.extend(cross.clone());
        sl_rels.extend(star_relations(ab, &cross));
        let group_sl = Self::build_one("group-sl", &sl_rels, &order, notes, ab)?;

        Ok(Systems {
            minkowski,
            derivatives,
            mixed,
            forms_kdk,
            forms_dkdk,
            braided,
            group_gl,
            group_sl,
        })
    }

    fn render(&self, e: &AlgElement) -> String {
        render_element(&self.spec.alphabet, e)
    }

    /// Nonzero normal forms of matrix entries, rendered as witnesses.
    fn matrix_residuals(&self, sys: &RewriteSystem, m: &AlgMatrix, what: &str) -> Vec<String> {
        let mut red = Reducer::new(sys);
        let mut out = Vec::new();
        for ((i, j), e) in m.entries() {
            let nf = red.reduce(e);
            if !nf.is_zero() {
                out.push(format!("{what}[{i},{j}] = {}", self.render(&nf)));
            }
        }
        out
    }

    fn exact_matrix_mismatches(a: &AlgMatrix, b: &AlgMatrix, what: &str) -> Vec<String> {
        let mut out = Vec::new();
        for ((i, j), e) in a.sub(b).entries() {
            if !e.is_zero() {
                out.push(format!("{what}[{i},{j}] differs"));
            }
        }
        out
    }

    /// Checks that every relation of `a` reduces to zero under a system
    /// oriented from `b`.
    fn consequences_of(
        &self,
        label: &str,
        a: &[Relation],
        b: &[Relation],
    ) -> Result<Vec<String>, RewriteError> {
        let sys = RewriteSystem::orient(label, b, self.order.clone())?;
        let mut red = Reducer::new(&sys);
        let mut out = Vec::new();
        for r in a {
            let nf = red.reduce(&r.element);
            if !nf.is_zero() {
                out.push(format!("{}: residual {}", r.label, self.render(&nf)));
            }
        }
        Ok(out)
    }

    fn mutual_consequence(
        &self,
        label: &str,
        a: &[Relation],
        b: &[Relation],
    ) -> Result<Vec<String>, RewriteError> {
        let mut w = self.consequences_of(&format!("{label}-fwd"), a, b)?;
        w.extend(self.consequences_of(&format!("{label}-bwd"), b, a)?);
        Ok(w)
    }

    // ----- individual checks -------------------------------------------

    fn ybe(r: &AlgMatrix) -> Vec<String> {
        let r12 = r.leg_embed(3, &[1, 2]).unwrap();
        let r13 = r.leg_embed(3, &[1, 3]).unwrap();
        let r23 = r.leg_embed(3, &[2, 3]).unwrap();
        let lhs = r12.mul(&r13).mul(&r23);
        let rhs = r23.mul(&r13).mul(&r12);
        Verifier::exact_matrix_mismatches(&lhs, &rhs, "ybe")
    }

    fn check_ybe(&self) -> Outcome {
        Outcome::from_witnesses(Self::ybe(&self.spec.mats.r_h))
    }

    fn check_triangularity(&self) -> Outcome {
        let m = &self.spec.mats;
        let prpr = m.flip.mul(&m.r_h).mul(&m.flip).mul(&m.r_h);
        Outcome::from_witnesses(Self::exact_matrix_mismatches(
            &prpr,
            &AlgMatrix::identity(4),
            "PRPR",
        ))
    }

    fn check_spectral(&self) -> Outcome {
        let m = &self.spec.mats;
        let mut w = Vec::new();
        w.extend(Self::exact_matrix_mismatches(
            &m.proj_plus.sub(&m.proj_minus),
            &m.rhat_h,
            "P+ - P-",
        ));
        w.extend(Self::exact_matrix_mismatches(
            &m.proj_plus.add(&m.proj_minus),
            &AlgMatrix::identity(4),
            "P+ + P-",
        ));
        w.extend(Self::exact_matrix_mismatches(
            &m.proj_plus.mul(&m.proj_plus),
            &m.proj_plus,
            "P+^2",
        ));
        w.extend(Self::exact_matrix_mismatches(
            &m.proj_minus.mul(&m.proj_minus),
            &m.proj_minus,
            "P-^2",
        ));
        if !m.proj_plus.mul(&m.proj_minus).is_zero() {
            w.push("P+ P- is nonzero".into());
        }
        w.extend(Self::exact_matrix_mismatches(
            &m.proj_plus.mul(&m.rhat_h),
            &m.proj_plus,
            "P+ Rhat",
        ));
        w.extend(Self::exact_matrix_mismatches(
            &m.proj_minus.mul(&m.rhat_h),
            &m.proj_minus.neg(),
            "P- Rhat",
        ));
        match (m.proj_minus.rank(), m.proj_plus.rank()) {
            (Ok(1), Ok(3)) => {}
            (rm, rp) => w.push(format!("ranks: P- {:?}, P+ {:?}", rm, rp)),
        }
        Outcome::from_witnesses(w)
    }

    fn check_quantum_plane(&self) -> Outcome {
        // Two-component vector relations: R X1X2 = X2X1 must reproduce the
        // single plane relation xy - yx - h y^2.
        let mut ab = Alphabet::new();
        let x = ab.add("x", GenKind::Coordinate, 1).unwrap();
        let y = ab.add("y", GenKind::Coordinate, 0).unwrap();
        let ids = [x, y];
        let r = self.spec.mats.r_h.clone();
        let x1x2 = AlgMatrix::from_fn(4, 1, |row, _| {
            AlgElement::word(Word::from_ids(&[ids[row / 2], ids[row % 2]]))
        });
        let x2x1 = AlgMatrix::from_fn(4, 1, |row, _| {
            AlgElement::word(Word::from_ids(&[ids[row % 2], ids[row / 2]]))
        });
        let diff = r.mul(&x1x2).sub(&x2x1);
        let derived: Vec<Relation> = diff
            .entries()
            .filter(|(_, e)| !e.is_zero())
            .map(|((i, _), e)| Relation::new(format!("plane[{i}]"), e.clone()))
            .collect();
        let h = self
            .spec
            .mats
            .r_h[(0, 2)]
            .as_scalar()
            .expect("scalar entry");
        let target = vec![Relation::new(
            "xy=yx+hy^2",
            AlgElement::word(Word::from_ids(&[x, y]))
                .sub(&AlgElement::word(Word::from_ids(&[y, x])))
                .sub(&AlgElement::gen(y).pow(2).scale(&h)),
        )];
        let order = GeneratorOrder::from_alphabet(&ab);
        let check = |a: &[Relation], b: &[Relation], tag: &str| -> Vec<String> {
            match RewriteSystem::orient(tag, b, order.clone()) {
                Err(e) => vec![format!("{tag}: {e}")],
                Ok(sys) => a
                    .iter()
                    .filter(|r| !sys.normal_form(&r.element).is_zero())
                    .map(|r| format!("{tag}: {} not a consequence", r.label))
                    .collect(),
            }
        };
        let mut w = check(&derived, &target, "derived-from-plane");
        w.extend(check(&target, &derived, "plane-from-derived"));
        Outcome::from_witnesses(w)
    }

    fn check_group_determinant(&self) -> Outcome {
        // The quantum determinant through the rank-1 projector: the product
        // P- M1 M2 is proportional to P-, the factor is the determinant, and
        // it is central.
        let m = self.spec.m();
        let pm = &self.spec.mats.proj_minus;
        let m1 = m.leg_embed(2, &[1]).unwrap();
        let m2 = m.leg_embed(2, &[2]).unwrap();
        let a = pm.mul(&m1).mul(&m2);
        let sys = &self.systems.group_gl;
        let mut w = Vec::new();
        match extract_proportionality(sys, &a, pm) {
            Err(e) => w.push(e),
            Ok(det) => {
                let expect = self.spec.group_det();
                if !sys.normal_form(&det.sub(&expect)).is_zero() {
                    w.push(format!(
                        "determinant mismatch: got {}",
                        self.render(&det)
                    ));
                }
                match sys.central_witnesses(&expect, &self.spec.gens.group) {
                    Err(e) => w.push(format!("centrality gate: {e}")),
                    Ok(bad) => {
                        for g in bad {
                            w.push(format!(
                                "determinant does not commute with {}",
                                self.spec.alphabet.name(g)
                            ));
                        }
                    }
                }
            }
        }
        Outcome::from_witnesses(w)
    }

    fn check_mixed_ybe(&self) -> Outcome {
        let m = &self.spec.mats;
        let r12 = m.r_h.leg_embed(3, &[1, 2]).unwrap();
        let r3_13 = m.r3.leg_embed(3, &[1, 3]).unwrap();
        let r3_23 = m.r3.leg_embed(3, &[2, 3]).unwrap();
        let lhs = r12.mul(&r3_13).mul(&r3_23);
        let rhs = r3_23.mul(&r3_13).mul(&r12);
        Outcome::from_witnesses(Self::exact_matrix_mismatches(&lhs, &rhs, "mixed-ybe"))
    }

    fn check_r3_reality(&self) -> Outcome {
        let m = &self.spec.mats;
        let prp = m.flip.mul(&m.r3).mul(&m.flip);
        Outcome::from_witnesses(Self::exact_matrix_mismatches(
            &prp,
            &m.r3.transpose(),
            "P R3 P vs R3^t",
        ))
    }

    fn check_r3_blocks(&self) -> Outcome {
        // The 2x2 blocks of the coupling matrix represent the group algebra:
        // they satisfy the six group relations under matrix arithmetic.
        let r3 = &self.spec.mats.r3;
        let block = |bi: usize, bj: usize| {
            AlgMatrix::from_fn(2, 2, |i, j| r3[(2 * bi + i, 2 * bj + j)].clone())
        };
        let a = block(0, 0);
        let b = block(0, 1);
        let cm = block(1, 0);
        let d = block(1, 1);
        let h = ParamScalar::h();
        let comm = |x: &AlgMatrix, y: &AlgMatrix| x.mul(y).sub(&y.mul(x));
        let xi = a.mul(&d).sub(&cm.mul(&b)).sub(&cm.mul(&d).scale(&h));
        let checks: Vec<(&str, AlgMatrix, AlgMatrix)> = vec![
            ("[A,B]", comm(&a, &b), xi.sub(&a.mul(&a)).scale(&h)),
            ("[A,C]", comm(&a, &cm), cm.mul(&cm).scale(&h)),
            (
                "[A,D]",
                comm(&a, &d),
                cm.mul(&d).sub(&cm.mul(&a)).scale(&h),
            ),
            (
                "[B,C]",
                comm(&b, &cm),
                a.mul(&cm).add(&cm.mul(&d)).scale(&h),
            ),
            ("[B,D]", comm(&b, &d), d.mul(&d).sub(&xi).scale(&h)),
            ("[C,D]", comm(&cm, &d), cm.mul(&cm).scale(&h).neg()),
        ];
        let mut w = Vec::new();
        for (label, lhs, rhs) in checks {
            w.extend(Self::exact_matrix_mismatches(&lhs, &rhs, label));
        }
        Outcome::from_witnesses(w)
    }

    fn check_group_relations(&self) -> Outcome {
        let printed = self.spec.printed_relations(Family::Group).unwrap();
        let starred = star_relations(&self.spec.alphabet, printed);
        let mut w = match self.mutual_consequence("group", &self.derived.group_frt, printed) {
            Ok(w) => w,
            Err(e) => return Outcome::error(e.to_string()),
        };
        match self.mutual_consequence("group*", &self.derived.group_star_frt, &starred) {
            Ok(more) => w.extend(more),
            Err(e) => return Outcome::error(e.to_string()),
        }
        Outcome::from_witnesses(w)
    }

    fn check_lorentz_cross(&self) -> Outcome {
        // The printed cross list generates the family only together with its
        // conjugates: the relation ideal of a *-algebra is star-closed.
        let printed = self.spec.printed_relations(Family::LorentzCross).unwrap();
        let mut closed = printed.to_vec();
        closed.extend(star_relations(&self.spec.alphabet, printed));
        match self.mutual_consequence("cross", &self.derived.cross, &closed) {
            Ok(w) => Outcome::from_witnesses(w),
            Err(e) => Outcome::error(e.to_string()),
        }
    }

    fn check_minkowski_relations(&self) -> Outcome {
        let printed = self.spec.printed_relations(Family::Minkowski).unwrap();
        match self.mutual_consequence("minkowski", &self.derived.minkowski, printed) {
            Ok(w) => Outcome::from_witnesses(w),
            Err(e) => Outcome::error(e.to_string()),
        }
    }

    fn check_derivative_relations(&self) -> Outcome {
        let printed = self.spec.printed_relations(Family::Derivatives).unwrap();
        match self.mutual_consequence("derivatives", &self.derived.derivatives, printed) {
            Ok(w) => Outcome::from_witnesses(w),
            Err(e) => Outcome::error(e.to_string()),
        }
    }

    fn check_mixed_relations(&self) -> Outcome {
        // The printed mixed list is a subset, so the check runs one way:
        // every printed relation must be a consequence of the derivation.
        let printed = self.spec.printed_relations(Family::MixedKY).unwrap();
        let sys = &self.systems.mixed;
        let mut red = Reducer::new(sys);
        let mut w = Vec::new();
        for r in printed {
            let nf = red.reduce(&r.element);
            if !nf.is_zero() {
                w.push(format!(
                    "printed {} is not a consequence: residual {}",
                    r.label,
                    self.render(&nf)
                ));
            }
        }
        Outcome::from_witnesses(w)
    }

    fn check_coaction_minkowski(&self) -> Outcome {
        // The transformed coordinate matrix satisfies the same reflection
        // equation, reduced in the combined group/coordinate algebra.
        let spec = &self.spec;
        let ab = &spec.alphabet;
        let mut rels = spec.printed_relations(Family::Group).unwrap().to_vec();
        rels.extend(star_relations(ab, &rels.clone()));
        let one = AlgElement::one();
        rels.push(Relation::new("det=1", spec.group_det().sub(&one)));
        rels.push(Relation::new(
            "det*=1",
            ab.star(&spec.group_det()).sub(&one),
        ));
        let cross = spec.printed_relations(Family::LorentzCross).unwrap();
        rels.extend(cross.to_vec());
        rels.extend(star_relations(ab, cross));
        rels.extend(spec.printed_relations(Family::Minkowski).unwrap().to_vec());
        let mut both_groups = spec.gens.group.to_vec();
        both_groups.extend_from_slice(&spec.gens.group_star);
        rels.extend(commuting_relations(
            "km",
            &spec.gens.coord,
            &both_groups,
        ));
        let sys = match RewriteSystem::orient("coaction", &rels, self.order.clone()) {
            Ok(s) => s,
            Err(e) => return Outcome::error(e.to_string()),
        };
        let kp = spec.m().mul(&spec.k()).mul(&spec.m_dagger());
        let k1 = kp.leg_embed(2, &[1]).unwrap();
        let k2 = kp.leg_embed(2, &[2]).unwrap();
        let m = &spec.mats;
        let lhs = m.r_h.mul(&k1).mul(&m.r2).mul(&k2);
        let rhs = k2.mul(&m.r3).mul(&k1).mul(&m.r_h.transpose());
        Outcome::from_witnesses(self.matrix_residuals(&sys, &lhs.sub(&rhs), "coaction"))
    }

    /// Extracts the deformed determinant of the coordinate matrix from the
    /// rank-1 projector identity.
    pub fn det_h_k(&self) -> Result<AlgElement, String> {
        let spec = &self.spec;
        let m = &spec.mats;
        let k1 = spec.k().leg_embed(2, &[1]).unwrap();
        let a = m
            .proj_minus
            .mul(&k1)
            .mul(&m.rhat3)
            .mul(&k1)
            .mul(&m.proj_minus.transpose())
            .neg();
        let b = m.proj_minus.mul(&m.proj_minus.transpose());
        extract_proportionality(&self.systems.minkowski, &a, &b)
    }

    fn check_det_h(&self) -> Outcome {
        let mut w = Vec::new();
        match self.det_h_k() {
            Err(e) => w.push(e),
            Ok(det) => {
                let sys = &self.systems.minkowski;
                if !sys.normal_form(&det.sub(&self.spec.det_display)).is_zero() {
                    w.push(format!(
                        "determinant mismatch: extracted {}",
                        self.render(&det)
                    ));
                }
            }
        }
        Outcome::from_witnesses(w)
    }

    fn check_centrality_reality(&self) -> Outcome {
        let spec = &self.spec;
        let sys = &self.systems.minkowski;
        let ab = &spec.alphabet;
        let coords = spec.gens.coord;
        let det = spec.det_display.clone();
        let mut w = Vec::new();
        match sys.central_witnesses(&det, &coords) {
            Err(e) => w.push(format!("gate: {e}")),
            Ok(bad) => {
                for g in bad {
                    w.push(format!("det_h K fails to commute with {}", ab.name(g)));
                }
            }
        }
        let det_star = ab.star(&det);
        if !sys.normal_form(&det_star.sub(&det)).is_zero() {
            w.push("det_h K is not star-fixed".into());
        }
        // The deformed trace of K is neither central nor real away from the
        // classical point.
        if !spec.is_classical_point() {
            let trace = spec.h_trace(&spec.k());
            match sys.central_witnesses(&trace, &coords) {
                Err(e) => w.push(format!("gate: {e}")),
                Ok(bad) => {
                    if bad.is_empty() {
                        w.push("tr_h K is unexpectedly central".into());
                    }
                }
            }
            let tr_star = ab.star(&trace);
            if sys.normal_form(&tr_star.sub(&trace)).is_zero() {
                w.push("tr_h K is unexpectedly star-fixed".into());
            }
        }
        Outcome::from_witnesses(w)
    }

    fn check_dh_matrix(&self) -> Outcome {
        let spec = &self.spec;
        let m = &spec.mats;
        let mut w = Vec::new();
        // (i) the partial-trace formula reproduces the stored matrix.
        let t1 = m.r_h.partial_transpose(1);
        match t1.invert_numeric() {
            Err(e) => w.push(format!("inverting R^t1: {e}")),
            Ok(inv) => {
                let back = inv.partial_transpose(1);
                let d = m.flip.mul(&back).partial_trace(2);
                w.extend(Self::exact_matrix_mismatches(&d, &m.d_h, "D_h formula"));
            }
        }
        // (ii) agreement with the symplectic-metric expression.
        let alt = m.eps.mul(&m.eps_inv.transpose()).neg();
        w.extend(Self::exact_matrix_mismatches(&alt, &m.d_h, "D_h symplectic"));
        // (iii) coinvariance D^t = M^t D^t (M^-1)^t in the group algebra.
        let sys = &self.systems.group_sl;
        let dt = m.d_h.transpose();
        let expr = spec
            .m()
            .transpose()
            .mul(&dt)
            .mul(&spec.m_inverse().transpose())
            .sub(&dt);
        w.extend(self.matrix_residuals(sys, &expr, "D_h coinvariance"));
        // (iv) trace invariance on a matrix of fresh central entries.
        let mut ab2 = spec.alphabet.clone();
        let names = ["t11", "t12", "t21", "t22"];
        let mut bg = [GenId(0); 4];
        for (i, n) in names.iter().enumerate() {
            bg[i] = ab2.add(n, GenKind::Coordinate, 0).expect("fresh name");
        }
        let mut both_groups = spec.gens.group.to_vec();
        both_groups.extend_from_slice(&spec.gens.group_star);
        let mut rels = spec.printed_relations(Family::Group).unwrap().to_vec();
        let one = AlgElement::one();
        rels.push(Relation::new("det=1", spec.group_det().sub(&one)));
        rels.extend(commuting_relations("tb", &bg, &both_groups));
        let order2 = GeneratorOrder::from_alphabet(&ab2);
        match RewriteSystem::orient("trace-invariance", &rels, order2) {
            Err(e) => w.push(format!("trace invariance system: {e}")),
            Ok(sys2) => {
                let b = AlgMatrix::from_gen_rows(&[vec![bg[0], bg[1]], vec![bg[2], bg[3]]]);
                let lhs = spec.h_trace(&spec.m().mul(&b).mul(&spec.m_inverse()));
                let rhs = spec.h_trace(&b);
                let nf = sys2.normal_form(&lhs.sub(&rhs));
                if !nf.is_zero() {
                    w.push(format!(
                        "tr_h(M B M^-1) != tr_h(B): residual {}",
                        render_element(&ab2, &nf)
                    ));
                }
            }
        }
        Outcome::from_witnesses(w)
    }

    /// The epsilon-twisted coupling matrix rebuilt from its definition.
    fn rhat_eps_formula(&self) -> AlgMatrix {
        let m = &self.spec.mats;
        let twist = AlgMatrix::identity(2).kron(&m.eps_inv.transpose());
        // For real entries the conjugate transpose is the transpose.
        twist.mul(&m.rhat3).mul(&twist)
    }

    fn check_keps_covariance(&self) -> Outcome {
        let spec = &self.spec;
        let m = &spec.mats;
        let mut w = Vec::new();
        w.extend(Self::exact_matrix_mismatches(
            &self.rhat_eps_formula(),
            &m.rhat_eps,
            "Rhat_eps formula vs display",
        ));
        // Contraction of the coordinates matches the displayed twist.
        let k = spec.k();
        let keps = AlgMatrix::from_fn(2, 2, |i, j| {
            let mut acc = AlgElement::zero();
            for kk in 0..2 {
                for l in 0..2 {
                    acc = acc.add(
                        &k[(kk, l)]
                            .scale(&m.rhat_eps[(2 * i + j, 2 * kk + l)].as_scalar().unwrap()),
                    );
                }
            }
            acc
        });
        w.extend(Self::exact_matrix_mismatches(
            &keps,
            &spec.keps_display,
            "K_eps display",
        ));
        // Covariance identity in the group algebra.
        let sys = &self.systems.group_sl;
        let ab = &spec.alphabet;
        let mm = spec.m();
        let m_conj = mm.dagger(ab).transpose();
        let lambda = mm.kron(&m_conj);
        let minv = spec.m_inverse();
        let minv_dag = minv.dagger(ab);
        let lhs = m.rhat_eps.mul(&lambda);
        let rhs = minv_dag.kron(&minv.transpose()).mul(&m.rhat_eps);
        w.extend(self.matrix_residuals(sys, &lhs.sub(&rhs), "keps covariance"));
        Outcome::from_witnesses(w)
    }

    fn metric_formula(&self) -> AlgMatrix {
        let m = &self.spec.mats;
        let pref = ParamScalar::one()
            .div(&(&ParamScalar::int(2) + &ParamScalar::h().pow(2)))
            .unwrap();
        m.d_h
            .transpose()
            .kron(&AlgMatrix::identity(2))
            .mul(&m.flip)
            .mul(&m.rhat_eps)
            .scale(&pref)
    }

    fn check_metric_invariance(&self) -> Outcome {
        let spec = &self.spec;
        let mut w = Vec::new();
        w.extend(Self::exact_matrix_mismatches(
            &self.metric_formula(),
            &spec.mats.metric,
            "metric formula vs display",
        ));
        let ab = &spec.alphabet;
        let mm = spec.m();
        let lambda = mm.kron(&mm.dagger(ab).transpose());
        let expr = lambda
            .transpose()
            .mul(&spec.mats.metric)
            .mul(&lambda)
            .sub(&spec.mats.metric);
        w.extend(self.matrix_residuals(&self.systems.group_sl, &expr, "metric invariance"));
        Outcome::from_witnesses(w)
    }

    fn check_length_consistency(&self) -> Outcome {
        let spec = &self.spec;
        let sys = &self.systems.minkowski;
        let mut w = Vec::new();
        let e1 = match self.det_h_k() {
            Ok(d) => d,
            Err(e) => return Outcome::error(e),
        };
        // Deformed trace of K K_eps with the displayed twist matrix.
        let k = spec.k();
        let m = &spec.mats;
        let keps = AlgMatrix::from_fn(2, 2, |i, j| {
            let mut acc = AlgElement::zero();
            for kk in 0..2 {
                for l in 0..2 {
                    acc = acc.add(
                        &k[(kk, l)]
                            .scale(&m.rhat_eps[(2 * i + j, 2 * kk + l)].as_scalar().unwrap()),
                    );
                }
            }
            acc
        });
        let pref = ParamScalar::one()
            .div(&(&ParamScalar::int(2) + &ParamScalar::h().pow(2)))
            .unwrap();
        let e2 = spec.h_trace(&k.mul(&keps)).scale(&pref);
        // Metric contraction, with the metric rebuilt from its formula.
        let g = self.metric_formula();
        let mut e3 = AlgElement::zero();
        for i in 0..2 {
            for j in 0..2 {
                for kk in 0..2 {
                    for l in 0..2 {
                        let coeff = g[(2 * i + j, 2 * kk + l)].as_scalar().unwrap();
                        e3 = e3.add(&k[(i, j)].mul(&k[(kk, l)]).scale(&coeff));
                    }
                }
            }
        }
        let mut red = Reducer::new(sys);
        let d12 = red.reduce(&e1.sub(&e2));
        if !d12.is_zero() {
            w.push(format!("det vs trace form: residual {}", self.render(&d12)));
        }
        let d13 = red.reduce(&e1.sub(&e3));
        if !d13.is_zero() {
            w.push(format!("det vs metric form: residual {}", self.render(&d13)));
        }
        Outcome::from_witnesses(w)
    }

    /// The deformed wave operator built from the twisted derivative matrix.
    pub fn box_operator(&self) -> Result<AlgElement, String> {
        let spec = &self.spec;
        let m = &spec.mats;
        let inv = m.rhat_eps.invert_numeric().map_err(|e| e.to_string())?;
        let y = spec.y();
        let yeps = AlgMatrix::from_fn(2, 2, |i, j| {
            let mut acc = AlgElement::zero();
            for kk in 0..2 {
                for l in 0..2 {
                    acc = acc.add(
                        &y[(kk, l)].scale(&inv[(2 * i + j, 2 * kk + l)].as_scalar().unwrap()),
                    );
                }
            }
            acc
        });
        let pref = ParamScalar::one()
            .div(&(&ParamScalar::int(2) + &ParamScalar::h().pow(2)))
            .unwrap();
        Ok(spec.h_trace(&yeps.mul(&y)).scale(&pref))
    }

    fn check_box(&self) -> Outcome {
        let spec = &self.spec;
        let ab = &spec.alphabet;
        let boxop = match self.box_operator() {
            Ok(b) => b,
            Err(e) => return Outcome::error(e),
        };
        let mut w = Vec::new();
        let dsys = &self.systems.derivatives;
        match dsys.central_witnesses(&boxop, &spec.gens.deriv) {
            Err(e) => w.push(format!("gate: {e}")),
            Ok(bad) => {
                for g in bad {
                    w.push(format!("box fails to commute with {}", ab.name(g)));
                }
            }
        }
        if !dsys.normal_form(&ab.star(&boxop).sub(&boxop)).is_zero() {
            w.push("box is not star-fixed".into());
        }
        // Invariance under the covariant transformation of derivatives.
        let mut rels = spec.printed_relations(Family::Group).unwrap().to_vec();
        rels.extend(star_relations(ab, &rels.clone()));
        let one = AlgElement::one();
        rels.push(Relation::new("det=1", spec.group_det().sub(&one)));
        rels.push(Relation::new(
            "det*=1",
            ab.star(&spec.group_det()).sub(&one),
        ));
        let cross = spec.printed_relations(Family::LorentzCross).unwrap();
        rels.extend(cross.to_vec());
        rels.extend(star_relations(ab, cross));
        rels.extend(spec.printed_relations(Family::Derivatives).unwrap().to_vec());
        let mut both_groups = spec.gens.group.to_vec();
        both_groups.extend_from_slice(&spec.gens.group_star);
        rels.extend(commuting_relations("ym", &spec.gens.deriv, &both_groups));
        let sys = match RewriteSystem::orient("box-invariance", &rels, self.order.clone()) {
            Ok(s) => s,
            Err(e) => return Outcome::error(e.to_string()),
        };
        let minv = spec.m_inverse();
        let y2 = minv.dagger(ab).mul(&spec.y()).mul(&minv);
        let m = &spec.mats;
        let inv = m.rhat_eps.invert_numeric().expect("twist invertible");
        let yeps2 = AlgMatrix::from_fn(2, 2, |i, j| {
            let mut acc = AlgElement::zero();
            for kk in 0..2 {
                for l in 0..2 {
                    acc = acc.add(
                        &y2[(kk, l)].scale(&inv[(2 * i + j, 2 * kk + l)].as_scalar().unwrap()),
                    );
                }
            }
            acc
        });
        let pref = ParamScalar::one()
            .div(&(&ParamScalar::int(2) + &ParamScalar::h().pow(2)))
            .unwrap();
        let box2 = spec.h_trace(&yeps2.mul(&y2)).scale(&pref);
        let nf = sys.normal_form(&box2.sub(&boxop));
        if !nf.is_zero() {
            w.push(format!("box not coaction-invariant: residual {}", self.render(&nf)));
        }
        Outcome::from_witnesses(w)
    }

    fn check_forms_and_d(&self) -> Outcome {
        let spec = &self.spec;
        let mut w = Vec::new();
        // (a) the partner equation follows, and the summed Leibniz identity
        // reduces to zero under the coordinate/form rules alone.
        let sys = &self.systems.forms_kdk;
        let mut red = Reducer::new(sys);
        for r in &self.derived.forms_kdk_partner {
            let nf = red.reduce(&r.element);
            if !nf.is_zero() {
                w.push(format!("partner {}: residual {}", r.label, self.render(&nf)));
            }
        }
        let m = &spec.mats;
        let k1 = spec.k().leg_embed(2, &[1]).unwrap();
        let k2 = spec.k().leg_embed(2, &[2]).unwrap();
        let w1 = spec.dk().leg_embed(2, &[1]).unwrap();
        let w2 = spec.dk().leg_embed(2, &[2]).unwrap();
        let rt = m.r_h.transpose();
        let leibniz = m
            .r_h
            .mul(&w1)
            .mul(&m.r2)
            .mul(&k2)
            .add(&m.r_h.mul(&k1).mul(&m.r2).mul(&w2))
            .sub(&w2.mul(&m.r3).mul(&k1).mul(&rt))
            .sub(&k2.mul(&m.r3).mul(&w1).mul(&rt));
        w.extend(self.matrix_residuals(sys, &leibniz, "leibniz"));
        // (b) the pure form relations are star-closed.
        match self.systems.forms_dkdk.star_violations(&spec.alphabet) {
            Err(e) => w.push(format!("star gate: {e}")),
            Ok(v) => {
                for (lhs, res) in v {
                    w.push(format!(
                        "form rule {} star residual {}",
                        self.render(&AlgElement::word(lhs)),
                        self.render(&res)
                    ));
                }
            }
        }
        // (c) the exterior derivative expands to the displayed combination.
        let d = spec.h_trace(&spec.dk().mul(&spec.y()));
        if d != spec.exterior_display {
            w.push(format!("exterior derivative expands to {}", self.render(&d)));
        }
        Outcome::from_witnesses(w)
    }

    fn check_braided_addition(&self) -> Outcome {
        let spec = &self.spec;
        let m = &spec.mats;
        let s = spec.k().add(&spec.k_copy());
        let s1 = s.leg_embed(2, &[1]).unwrap();
        let s2 = s.leg_embed(2, &[2]).unwrap();
        let lhs = m.r_h.mul(&s1).mul(&m.r2).mul(&s2);
        let rhs = s2.mul(&m.r3).mul(&s1).mul(&m.r_h.transpose());
        Outcome::from_witnesses(self.matrix_residuals(
            &self.systems.braided,
            &lhs.sub(&rhs),
            "braided sum",
        ))
    }

    fn check_star_closure(&self) -> Outcome {
        let ab = &self.spec.alphabet;
        let mut w = Vec::new();
        for sys in [
            &self.systems.minkowski,
            &self.systems.derivatives,
            &self.systems.mixed,
            &self.systems.forms_kdk,
            &self.systems.forms_dkdk,
            &self.systems.braided,
            &self.systems.group_sl,
        ] {
            match sys.star_violations(ab) {
                Err(e) => w.push(format!("{}: gate {e}", sys.name)),
                Ok(v) => {
                    for (lhs, res) in v {
                        w.push(format!(
                            "{}: rule {} star residual {}",
                            sys.name,
                            self.render(&AlgElement::word(lhs)),
                            self.render(&res)
                        ));
                    }
                }
            }
        }
        Outcome::from_witnesses(w)
    }

    fn check_confluence_all(&self) -> Outcome {
        let mut w = Vec::new();
        let mut notes = self.completion_notes.clone();
        for sys in self.systems.shipped() {
            let rep = sys.check_confluence(4);
            if !rep.is_confluent() {
                for ow in rep.unresolved.iter().take(4) {
                    w.push(format!(
                        "{}: overlap {} reduces two ways",
                        sys.name,
                        self.render(&AlgElement::word(ow.word.clone()))
                    ));
                }
            } else {
                notes.push(format!("{}: confluent ({} rules)", sys.name, sys.len()));
            }
        }
        let mut o = Outcome::from_witnesses(w);
        o.notes = notes;
        o
    }

    fn check_classical_limit(&self) -> Outcome {
        if self.spec.numeric.is_some() && !self.spec.is_classical_point() {
            return Outcome::skipped("requires symbolic parameters");
        }
        let zero = rat_int(0);
        let spec0 = match self.spec.at_point(&zero, &zero) {
            Ok(s) => s,
            Err(e) => return Outcome::error(e.to_string()),
        };
        let derived0 = match Derived::build(&spec0) {
            Ok(d) => d,
            Err(e) => return Outcome::error(e),
        };
        let g = &spec0.gens;
        let ab = &spec0.alphabet;
        let comm_set = |label: &str, xs: &[GenId]| -> Vec<Relation> {
            let mut out = Vec::new();
            for i in 0..xs.len() {
                for j in (i + 1)..xs.len() {
                    out.push(Relation::new(
                        format!("{label}[{i},{j}]"),
                        AlgElement::gen(xs[i]).commutator(&AlgElement::gen(xs[j])),
                    ));
                }
            }
            out
        };
        let anti_set = |label: &str, xs: &[GenId]| -> Vec<Relation> {
            let mut out = Vec::new();
            for i in 0..xs.len() {
                for j in i..xs.len() {
                    let x = AlgElement::gen(xs[i]);
                    let y = AlgElement::gen(xs[j]);
                    out.push(Relation::new(
                        format!("{label}{{{i},{j}}}"),
                        x.mul(&y).add(&y.mul(&x)),
                    ));
                }
            }
            out
        };
        let mixed_set = || -> Vec<Relation> {
            let mut out = Vec::new();
            for (i, &dv) in g.deriv.iter().enumerate() {
                for (j, &x) in g.coord.iter().enumerate() {
                    let mut e = AlgElement::gen(dv).commutator(&AlgElement::gen(x));
                    if i == j {
                        e = e.sub(&AlgElement::one());
                    }
                    out.push(Relation::new(format!("[d{i},x{j}]"), e));
                }
            }
            out
        };
        let cross_copy = commuting_relations("copy", &g.coord_copy, &g.coord);
        let kdk = commuting_relations("kdk", &g.form, &g.coord);
        let mut both = g.group.to_vec();
        both.extend_from_slice(&g.group_star);

        let cases: Vec<(&str, Vec<Relation>, Vec<Relation>)> = vec![
            (
                "minkowski",
                derived0.minkowski.clone(),
                comm_set("x", &g.coord),
            ),
            (
                "derivatives",
                derived0.derivatives.clone(),
                comm_set("d", &g.deriv),
            ),
            ("mixed", derived0.mixed.clone(), mixed_set()),
            ("group", derived0.group_frt.clone(), comm_set("g", &both)),
            ("cross", derived0.cross.clone(), {
                let mut v = Vec::new();
                for &x in &g.group {
                    for &y in &g.group_star {
                        v.push(Relation::new(
                            "cross".to_string(),
                            AlgElement::gen(x).commutator(&AlgElement::gen(y)),
                        ));
                    }
                }
                v
            }),
            ("braided", derived0.braided_cross.clone(), cross_copy),
            ("forms-kdk", derived0.forms_kdk.clone(), kdk),
            (
                "forms-dkdk",
                derived0.forms_dkdk.clone(),
                anti_set("w", &g.form),
            ),
        ];
        let order = GeneratorOrder::from_alphabet(ab);
        let mut w = Vec::new();
        for (label, derived_rels, expected) in cases {
            let fwd = RewriteSystem::orient(&format!("{label}-exp"), &expected, order.clone());
            let bwd = RewriteSystem::orient(&format!("{label}-der"), &derived_rels, order.clone());
            match (fwd, bwd) {
                (Ok(se), Ok(sd)) => {
                    for r in &derived_rels {
                        if !se.normal_form(&r.element).is_zero() {
                            w.push(format!("{label}: {} not classical", r.label));
                        }
                    }
                    for r in &expected {
                        if !sd.normal_form(&r.element).is_zero() {
                            w.push(format!("{label}: expected {} missing", r.label));
                        }
                    }
                }
                (Err(e), _) | (_, Err(e)) => w.push(format!("{label}: {e}")),
            }
        }
        Outcome::from_witnesses(w)
    }

    fn check_oracle_crossval(&self) -> Outcome {
        if self.spec.numeric.is_some() {
            return Outcome::skipped("parameters already substituted");
        }
        let mut rng = ChaCha8Rng::seed_from_u64(match self.spec.id {
            crate::catalog::ModelId::M1 => 0xC0FFEE,
            crate::catalog::ModelId::M2 => 0xBEEF,
        });
        let mut w = Vec::new();
        let mut points = Vec::new();
        while points.len() < 3 {
            let hn = rng.gen_range(-4i64..=4);
            let hd = rng.gen_range(1i64..=4);
            let rn = rng.gen_range(-4i64..=4);
            let rd = rng.gen_range(1i64..=4);
            if hn == 0 {
                continue;
            }
            points.push((crate::scalars::rat(hn, hd), crate::scalars::rat(rn, rd)));
        }
        let systems = self.systems.shipped();
        for sys in systems {
            // Letters the system's rules touch, for random test words.
            let mut letters: Vec<u8> = sys
                .rules()
                .flat_map(|(l, _)| l.letters().to_vec())
                .collect();
            letters.sort_unstable();
            letters.dedup();
            if letters.is_empty() {
                continue;
            }
            for (hv, rv) in &points {
                let rels: Vec<AlgElement> = sys
                    .as_relations()
                    .iter()
                    .map(|e| e.substitute(hv, rv).expect("polynomial rules"))
                    .collect();
                for _ in 0..3 {
                    let mut x = AlgElement::zero();
                    for _ in 0..3 {
                        let len = rng.gen_range(1..=3);
                        let wrd: Vec<u8> = (0..len)
                            .map(|_| letters[rng.gen_range(0..letters.len())])
                            .collect();
                        let c = rat_int(rng.gen_range(-3i64..=3));
                        if c.is_zero() {
                            continue;
                        }
                        x.insert_add(
                            Word(smallvec::SmallVec::from_vec(wrd)),
                            ParamScalar::from_rat(c),
                        );
                    }
                    let sym = sys
                        .normal_form(&x)
                        .substitute(hv, rv)
                        .expect("no poles at test points");
                    let xnum = x.substitute(hv, rv).expect("integer coefficients");
                    let naive = naive_normal_form(&mut rng, &self.order, &rels, &xnum);
                    if sym != naive {
                        w.push(format!(
                            "{} at h={hv}, r={rv}: engine and naive evaluator disagree on {}",
                            sys.name,
                            self.render(&x)
                        ));
                    }
                }
            }
        }
        Outcome::from_witnesses(w)
    }

    /// Runs the whole suite in a fixed order.
    pub fn run_suite(&self, filter: Option<&str>) -> Vec<CheckReport> {
        let checks: Vec<(&str, Box<dyn Fn(&Verifier) -> Outcome>)> = vec![
            ("ybe_r", Box::new(Verifier::check_ybe)),
            ("triangularity_r", Box::new(Verifier::check_triangularity)),
            ("spectral", Box::new(Verifier::check_spectral)),
            ("quantum_plane", Box::new(Verifier::check_quantum_plane)),
            ("group_determinant", Box::new(Verifier::check_group_determinant)),
            ("mixed_ybe", Box::new(Verifier::check_mixed_ybe)),
            ("r3_reality", Box::new(Verifier::check_r3_reality)),
            ("r3_blocks", Box::new(Verifier::check_r3_blocks)),
            ("group_relations", Box::new(Verifier::check_group_relations)),
            ("lorentz_cross_relations", Box::new(Verifier::check_lorentz_cross)),
            ("minkowski_relations", Box::new(Verifier::check_minkowski_relations)),
            ("derivative_relations", Box::new(Verifier::check_derivative_relations)),
            ("mixed_relations", Box::new(Verifier::check_mixed_relations)),
            ("coaction_minkowski", Box::new(Verifier::check_coaction_minkowski)),
            ("det_h", Box::new(Verifier::check_det_h)),
            ("centrality_reality", Box::new(Verifier::check_centrality_reality)),
            ("dh_matrix", Box::new(Verifier::check_dh_matrix)),
            ("keps_covariance", Box::new(Verifier::check_keps_covariance)),
            ("metric_invariance", Box::new(Verifier::check_metric_invariance)),
            ("length_consistency", Box::new(Verifier::check_length_consistency)),
            ("box_invariant", Box::new(Verifier::check_box)),
            ("forms_and_d", Box::new(Verifier::check_forms_and_d)),
            ("braided_addition", Box::new(Verifier::check_braided_addition)),
            ("star_closure", Box::new(Verifier::check_star_closure)),
            ("confluence", Box::new(Verifier::check_confluence_all)),
            ("classical_limit", Box::new(Verifier::check_classical_limit)),
            ("oracle_crossval", Box::new(Verifier::check_oracle_crossval)),
        ];
        let mut out = Vec::new();
        for (id, f) in checks {
            if let Some(flt) = filter {
                if flt != "all" && !id.contains(flt) {
                    continue;
                }
            }
            let start = Instant::now();
            let o = f(self);
            out.push(CheckReport {
                id: id.into(),
                status: o.status,
                witnesses: o.witnesses,
                notes: o.notes,
                timing_micros: start.elapsed().as_micros() as u64,
            });
        }
        out
    }
}

/// Finds the scalar of proportionality between an algebra-valued matrix and
/// a scalar matrix, verifying every entry modulo the given system.
fn extract_proportionality(
    sys: &RewriteSystem,
    a: &AlgMatrix,
    b: &AlgMatrix,
) -> Result<AlgElement, String> {
    let mut pivot = None;
    for ((i, j), e) in b.entries() {
        if let Some(s) = e.as_scalar() {
            if !s.is_zero() {
                pivot = Some(((i, j), s));
                break;
            }
        } else {
            return Err(format!("reference matrix entry ({i},{j}) is not scalar"));
        }
    }
    let ((pi, pj), ps) = pivot.ok_or("reference matrix is zero")?;
    let lambda = a[(pi, pj)].scale(&ps.inv().expect("pivot nonzero"));
    let lambda = sys.normal_form(&lambda);
    let mut red = Reducer::new(sys);
    for ((i, j), e) in b.entries() {
        let s = e.as_scalar().expect("checked above");
        let residual = red.reduce(&a[(i, j)].sub(&lambda.scale(&s)));
        if !residual.is_zero() {
            return Err(format!(
                "proportionality fails at entry ({i},{j})"
            ));
        }
    }
    Ok(lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::ModelId;

    fn verifier(id: ModelId) -> Verifier {
        Verifier::new(ModelSpec::build(id)).expect("verifier builds")
    }

    #[test]
    fn ybe_fails_on_perturbed_matrix() {
        let spec = ModelSpec::build(ModelId::M1);
        let mut r = spec.mats.r_h.clone();
        r[(0, 1)] = AlgElement::from_scalar(&ParamScalar::h() + &ParamScalar::one());
        assert!(!Verifier::ybe(&r).is_empty());
    }

    #[test]
    fn mixed_ybe_fails_with_inconsistent_parameter() {
        // Replacing r by r+1 in only one factor breaks the braid identity.
        let spec = ModelSpec::build(ModelId::M1);
        let r3 = &spec.mats.r3;
        let mut r3_shift = r3.clone();
        r3_shift[(1, 2)] = AlgElement::from_scalar(&ParamScalar::r() + &ParamScalar::one());
        let r12 = spec.mats.r_h.leg_embed(3, &[1, 2]).unwrap();
        let a13 = r3_shift.leg_embed(3, &[1, 3]).unwrap();
        let a23 = r3.leg_embed(3, &[2, 3]).unwrap();
        let lhs = r12.mul(&a13).mul(&a23);
        let rhs = a23.mul(&a13).mul(&r12);
        assert_ne!(lhs, rhs);
    }

    #[test]
    fn spectral_fails_with_swapped_projectors() {
        let spec = ModelSpec::build(ModelId::M2);
        let m = &spec.mats;
        // Swapping the projectors flips the sign of the decomposition.
        let swapped = m.proj_minus.sub(&m.proj_plus);
        assert_ne!(swapped, m.rhat_h);
    }

    #[test]
    fn derived_minkowski_matches_printed_for_m1() {
        let v = verifier(ModelId::M1);
        let printed = v.spec.printed_relations(Family::Minkowski).unwrap();
        let w = v
            .mutual_consequence("test", &v.derived.minkowski, printed)
            .unwrap();
        assert!(w.is_empty(), "witnesses: {w:?}");
    }

    #[test]
    fn derived_forms_reduce_classically_to_grassmann() {
        let zero = rat_int(0);
        let spec = ModelSpec::build(ModelId::M2).at_point(&zero, &zero).unwrap();
        let derived = Derived::build(&spec).unwrap();
        let order = GeneratorOrder::from_alphabet(&spec.alphabet);
        let sys = RewriteSystem::orient("dkdk0", &derived.forms_dkdk, order).unwrap();
        // Squares vanish and adjacent pairs anticommute.
        let [wa, wb, _, _] = spec.gens.form;
        assert!(sys
            .normal_form(&AlgElement::gen(wa).pow(2))
            .is_zero());
        let anti = AlgElement::gen(wa)
            .mul(&AlgElement::gen(wb))
            .add(&AlgElement::gen(wb).mul(&AlgElement::gen(wa)));
        assert!(sys.normal_form(&anti).is_zero());
    }

    #[test]
    fn star_violation_detected_when_derivatives_declared_hermitian() {
        // Re-declare the derivative matrix hermitian; the mixed family then
        // fails star closure.
        let spec = ModelSpec::build(ModelId::M2);
        let mut ab = spec.alphabet.clone();
        let [da, db, dg, dd] = spec.gens.deriv;
        ab.set_star_self(da, false);
        ab.set_star_pair(db, dg, false);
        ab.set_star_self(dd, false);
        ab.validate().unwrap();
        let v = verifier(ModelId::M2);
        let violations = v.systems.mixed.star_violations(&ab).unwrap();
        assert!(!violations.is_empty());
    }

    #[test]
    fn braided_fails_without_cross_relations() {
        let v = verifier(ModelId::M1);
        let spec = &v.spec;
        // Only the two copies, no exchange rules.
        let mut rels = spec.printed_relations(Family::Minkowski).unwrap().to_vec();
        let coord = spec.gens.coord;
        let copy = spec.gens.coord_copy;
        rels.extend(rels.clone().iter().map(|r| {
            Relation::new(
                format!("copy({})", r.label),
                r.element.map_gens(|g| {
                    coord
                        .iter()
                        .position(|&c| c == g)
                        .map(|i| copy[i])
                        .unwrap_or(g)
                }),
            )
        }));
        let sys = RewriteSystem::orient("no-cross", &rels, v.order.clone()).unwrap();
        let m = &spec.mats;
        let s = spec.k().add(&spec.k_copy());
        let s1 = s.leg_embed(2, &[1]).unwrap();
        let s2 = s.leg_embed(2, &[2]).unwrap();
        let lhs = m.r_h.mul(&s1).mul(&m.r2).mul(&s2);
        let rhs = s2.mul(&m.r3).mul(&s1).mul(&m.r_h.transpose());
        let residuals = v.matrix_residuals(&sys, &lhs.sub(&rhs), "no-cross");
        assert!(!residuals.is_empty());
    }
}
