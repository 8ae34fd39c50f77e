//! The model catalog: generator alphabets, constant matrices and the
//! printed relation sets of the two deformation models.
//!
//! `M1` carries the extra real parameter `r` (its coupling matrix has a
//! single off-diagonal entry); `M2` is the purely `h`-deformed model. Every
//! constant matrix is transcribed under the row-major, leg-1-slowest index
//! convention; a dedicated verifier check re-derives each displayed matrix
//! from its defining formula, so a transcription slip cannot survive the
//! suite.

use num::BigRational;
use thiserror::Error;

use crate::ncalg::{AlgElement, AlgError, Alphabet, GenId, GenKind, Word};
use crate::rewrite::Relation;
use crate::scalars::{ParamScalar, ScalarError};
use crate::tensor::AlgMatrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CatalogError {
    #[error("family `{0:?}` has no printed relations; it is derived only")]
    DerivedOnly(Family),
    #[error(transparent)]
    Alphabet(#[from] AlgError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelId {
    M1,
    M2,
}

impl ModelId {
    pub fn name(&self) -> &'static str {
        match self {
            ModelId::M1 => "M1",
            ModelId::M2 => "M2",
        }
    }

    pub fn parse(s: &str) -> Option<ModelId> {
        match s {
            "M1" | "m1" => Some(ModelId::M1),
            "M2" | "m2" => Some(ModelId::M2),
            _ => None,
        }
    }
}

/// Relation families of one model. The forms and braided families are not
/// printed anywhere; they exist only as reflection-equation derivations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Group,
    LorentzCross,
    Minkowski,
    Derivatives,
    MixedKY,
    FormsKdK,
    FormsDKdK,
    BraidedCross,
}

/// Generator handles of one model, grouped by role.
#[derive(Debug, Clone)]
pub struct ModelGens {
    pub group: [GenId; 4],      // a b c d
    pub group_star: [GenId; 4], // astar bstar cstar dstar
    pub coord: [GenId; 4],      // al be ga de
    pub coord_copy: [GenId; 4], // second copy for braided addition
    pub deriv: [GenId; 4],      // d_al d_be d_ga d_de
    pub form: [GenId; 4],       // w_al w_be w_ga w_de
}

/// The constant matrices of a model.
#[derive(Debug, Clone)]
pub struct ConstMats {
    /// Triangular R-matrix of the deformation.
    pub r_h: AlgMatrix,
    /// Flip composed with `r_h`.
    pub rhat_h: AlgMatrix,
    /// The two-leg flip operator.
    pub flip: AlgMatrix,
    /// Rank-3 spectral projector of `rhat_h`.
    pub proj_plus: AlgMatrix,
    /// Rank-1 spectral projector of `rhat_h`.
    pub proj_minus: AlgMatrix,
    /// Deformed symplectic 2x2 metric and its inverse.
    pub eps: AlgMatrix,
    pub eps_inv: AlgMatrix,
    /// Coupling matrix between the group and its conjugate copy.
    pub r3: AlgMatrix,
    /// Flip conjugate of `r3` (equals its transpose).
    pub r2: AlgMatrix,
    /// Flip composed with `r3`.
    pub rhat3: AlgMatrix,
    /// Trace-deformation 2x2 matrix.
    pub d_h: AlgMatrix,
    /// Epsilon-twisted form of `rhat3`, as displayed.
    pub rhat_eps: AlgMatrix,
    /// Invariant metric on coordinate pairs, as displayed.
    pub metric: AlgMatrix,
}

#[derive(Debug, Clone)]
pub struct ModelSpec {
    pub id: ModelId,
    pub alphabet: Alphabet,
    pub gens: ModelGens,
    pub mats: ConstMats,
    printed_group: Vec<Relation>,
    printed_cross: Vec<Relation>,
    printed_minkowski: Vec<Relation>,
    printed_derivatives: Vec<Relation>,
    printed_mixed_partial: Vec<Relation>,
    /// Displayed deformed determinant of the coordinate matrix.
    pub det_display: AlgElement,
    /// Displayed epsilon-twist of the coordinate matrix.
    pub keps_display: AlgMatrix,
    /// Displayed expansion of the exterior derivative.
    pub exterior_display: AlgElement,
    /// Set when the parameters have been substituted by rationals.
    pub numeric: Option<(BigRational, BigRational)>,
}

fn c(n: i64) -> ParamScalar {
    ParamScalar::int(n)
}

fn h() -> ParamScalar {
    ParamScalar::h()
}

fn h2() -> ParamScalar {
    ParamScalar::h().pow(2)
}

fn rp() -> ParamScalar {
    ParamScalar::r()
}

fn combo(terms: &[(ParamScalar, &[GenId])]) -> AlgElement {
    let mut e = AlgElement::zero();
    for (coeff, ids) in terms {
        e.insert_add(Word::from_ids(ids), coeff.clone());
    }
    e
}

fn comm(a: GenId, b: GenId) -> AlgElement {
    AlgElement::gen(a).commutator(&AlgElement::gen(b))
}

fn rel(label: &str, lhs: AlgElement, rhs: AlgElement) -> Relation {
    Relation::new(label, lhs.sub(&rhs))
}

/// Builds the shared generator alphabet. The index order is the rewrite
/// precedence: group letters, their conjugates, coordinates, the braided
/// copy, derivatives, one-forms. Weights make every printed relation
/// orient; the group block uses (1,2,0,1) and the coordinate-like blocks
/// (2,1,1,0), matching the scaling degree of the relations.
fn build_alphabet() -> Result<(Alphabet, ModelGens), AlgError> {
    let mut ab = Alphabet::new();
    let gw = [1u32, 2, 0, 1];
    let cw = [2u32, 1, 1, 0];

    let group_names = ["a", "b", "c", "d"];
    let star_names = ["astar", "bstar", "cstar", "dstar"];
    let coord_names = ["al", "be", "ga", "de"];
    let copy_names = ["alp", "bep", "gap", "dep"];
    let deriv_names = ["d_al", "d_be", "d_ga", "d_de"];
    let form_names = ["w_al", "w_be", "w_ga", "w_de"];

    let mut group = [GenId(0); 4];
    let mut group_star = [GenId(0); 4];
    let mut coord = [GenId(0); 4];
    let mut coord_copy = [GenId(0); 4];
    let mut deriv = [GenId(0); 4];
    let mut form = [GenId(0); 4];

    for i in 0..4 {
        group[i] = ab.add(group_names[i], GenKind::Group, gw[i])?;
    }
    for i in 0..4 {
        group_star[i] = ab.add(star_names[i], GenKind::GroupStar, gw[i])?;
    }
    for i in 0..4 {
        coord[i] = ab.add(coord_names[i], GenKind::Coordinate, cw[i])?;
    }
    for i in 0..4 {
        coord_copy[i] = ab.add(copy_names[i], GenKind::Coordinate, cw[i])?;
    }
    for i in 0..4 {
        deriv[i] = ab.add(deriv_names[i], GenKind::Derivative, 0)?;
    }
    for i in 0..4 {
        form[i] = ab.add(form_names[i], GenKind::Form, cw[i])?;
    }

    // Star structure: the group pairs with its conjugate copy; the
    // coordinate and form matrices are hermitian (diagonal fixed, the two
    // off-diagonal generators swap); the derivative matrix is antihermitian.
    for i in 0..4 {
        ab.set_star_pair(group[i], group_star[i], false);
    }
    for ids in [&coord, &coord_copy, &form] {
        ab.set_star_self(ids[0], false);
        ab.set_star_pair(ids[1], ids[2], false);
        ab.set_star_self(ids[3], false);
    }
    ab.set_star_self(deriv[0], true);
    ab.set_star_pair(deriv[1], deriv[2], true);
    ab.set_star_self(deriv[3], true);

    ab.validate()?;
    Ok((
        ab,
        ModelGens {
            group,
            group_star,
            coord,
            coord_copy,
            deriv,
            form,
        },
    ))
}

fn sm(rows: Vec<Vec<ParamScalar>>) -> AlgMatrix {
    AlgMatrix::from_scalar_rows(rows)
}

fn const_mats(id: ModelId) -> ConstMats {
    let r_h = sm(vec![
        vec![c(1), -&h(), h(), h2()],
        vec![c(0), c(1), c(0), -&h()],
        vec![c(0), c(0), c(1), h()],
        vec![c(0), c(0), c(0), c(1)],
    ]);
    let flip = AlgMatrix::flip(2, 1, 2);
    let rhat_h = flip.mul(&r_h);
    let id4 = AlgMatrix::identity(4);
    let half = ParamScalar::rational(1, 2);
    let proj_plus = id4.add(&rhat_h).scale(&half);
    let proj_minus = id4.sub(&rhat_h).scale(&half);
    let eps = sm(vec![vec![h(), c(1)], vec![c(-1), c(0)]]);
    let eps_inv = sm(vec![vec![c(0), c(-1)], vec![c(1), h()]]);
    let d_h = sm(vec![vec![c(1), &c(-2) * &h()], vec![c(0), c(1)]]);

    let r3 = match id {
        ModelId::M1 => sm(vec![
            vec![c(1), c(0), c(0), c(0)],
            vec![c(0), c(1), rp(), c(0)],
            vec![c(0), c(0), c(1), c(0)],
            vec![c(0), c(0), c(0), c(1)],
        ]),
        ModelId::M2 => sm(vec![
            vec![c(1), c(0), -&h(), c(0)],
            vec![-&h(), c(1), c(0), h()],
            vec![c(0), c(0), c(1), c(0)],
            vec![c(0), c(0), h(), c(1)],
        ]),
    };
    let r2 = flip.mul(&r3).mul(&flip);
    let rhat3 = flip.mul(&r3);

    let rhat_eps = match id {
        ModelId::M1 => sm(vec![
            vec![c(0), c(0), c(0), c(1)],
            vec![c(0), c(-1), c(0), h()],
            vec![c(0), c(0), c(-1), h()],
            vec![c(1), -&h(), -&h(), &h2() - &rp()],
        ]),
        ModelId::M2 => sm(vec![
            vec![c(0), c(0), c(0), c(1)],
            vec![c(0), c(-1), c(0), &c(2) * &h()],
            vec![c(0), c(0), c(-1), &c(2) * &h()],
            vec![c(1), c(0), c(0), h2()],
        ]),
    };

    let pref = ParamScalar::one()
        .div(&(&c(2) + &h2()))
        .expect("2 + h^2 is nonzero");
    let metric = match id {
        ModelId::M1 => sm(vec![
            vec![c(0), c(0), c(0), c(1)],
            vec![c(0), c(0), c(-1), h()],
            vec![c(0), c(-1), c(0), -&h()],
            vec![c(1), -&h(), h(), -&(&rp() + &h2())],
        ]),
        ModelId::M2 => sm(vec![
            vec![c(0), c(0), c(0), c(1)],
            vec![c(0), c(0), c(-1), &c(2) * &h()],
            vec![c(0), c(-1), c(0), c(0)],
            vec![c(1), c(0), &c(2) * &h(), &c(-3) * &h2()],
        ]),
    }
    .scale(&pref);

    ConstMats {
        r_h,
        rhat_h,
        flip,
        proj_plus,
        proj_minus,
        eps,
        eps_inv,
        r3,
        r2,
        rhat3,
        d_h,
        rhat_eps,
        metric,
    }
}

/// Group relations, written with the quantum determinant expanded.
fn group_relations(g: &[GenId; 4]) -> Vec<Relation> {
    let [a, b, cc, d] = *g;
    // xi = ad - cb - h cd
    let xi = combo(&[(c(1), &[a, d]), (c(-1), &[cc, b]), (-&h(), &[cc, d])]);
    vec![
        rel(
            "[a,b]",
            comm(a, b),
            xi.sub(&combo(&[(c(1), &[a, a])])).scale(&h()),
        ),
        rel("[a,c]", comm(a, cc), combo(&[(h(), &[cc, cc])])),
        rel(
            "[a,d]",
            comm(a, d),
            combo(&[(h(), &[cc, d]), (-&h(), &[cc, a])]),
        ),
        rel(
            "[b,c]",
            comm(b, cc),
            combo(&[(h(), &[a, cc]), (h(), &[cc, d])]),
        ),
        rel(
            "[b,d]",
            comm(b, d),
            combo(&[(h(), &[d, d])]).sub(&xi.scale(&h())),
        ),
        rel("[c,d]", comm(cc, d), combo(&[(-&h(), &[cc, cc])])),
    ]
}

/// Cross relations between the group and its conjugate copy, as printed.
/// The set generates the full cross family together with its image under
/// the involution.
fn cross_relations(id: ModelId, g: &[GenId; 4], s: &[GenId; 4]) -> Vec<Relation> {
    let [a, b, cc, d] = *g;
    let [as_, bs, cs, ds] = *s;
    match id {
        ModelId::M1 => vec![
            rel("[a,astar]", comm(a, as_), combo(&[(rp(), &[cs, cc])])),
            rel("[a,bstar]", comm(a, bs), combo(&[(rp(), &[ds, cc])])),
            rel("[a,dstar]", comm(a, ds), AlgElement::zero()),
            rel(
                "[b,bstar]",
                comm(b, bs),
                combo(&[(rp(), &[ds, d]), (-&rp(), &[a, as_])]),
            ),
            rel("[b,dstar]", comm(b, ds), combo(&[(-&rp(), &[cs, a])])),
            rel("[d,dstar]", comm(d, ds), combo(&[(-&rp(), &[cs, cc])])),
            rel("[c,astar]", comm(cc, as_), AlgElement::zero()),
            rel("[c,bstar]", comm(cc, bs), AlgElement::zero()),
            rel("[c,cstar]", comm(cc, cs), AlgElement::zero()),
            rel("[c,dstar]", comm(cc, ds), AlgElement::zero()),
        ],
        ModelId::M2 => vec![
            rel(
                "[a,astar]",
                comm(a, as_),
                combo(&[(-&h(), &[cs, a]), (-&h(), &[as_, cc])]),
            ),
            rel(
                "[a,bstar]",
                comm(a, bs),
                combo(&[(h(), &[a, as_]), (-&h(), &[ds, a]), (-&h(), &[bs, cc])]),
            ),
            rel("[a,cstar]", comm(a, cs), combo(&[(h(), &[cs, cc])])),
            rel(
                "[a,dstar]",
                comm(a, ds),
                combo(&[(h(), &[a, cs]), (h(), &[ds, cc])]),
            ),
            rel(
                "[b,bstar]",
                comm(b, bs),
                combo(&[
                    (-&h(), &[a, bs]),
                    (-&h(), &[b, as_]),
                    (-&h(), &[bs, d]),
                    (-&h(), &[ds, b]),
                ]),
            ),
            rel(
                "[b,cstar]",
                comm(b, cs),
                combo(&[(h(), &[cs, d]), (h(), &[a, cs])]),
            ),
            rel(
                "[b,dstar]",
                comm(b, ds),
                combo(&[(h(), &[ds, d]), (-&h(), &[a, ds]), (-&h(), &[b, cs])]),
            ),
            rel("[c,cstar]", comm(cc, cs), AlgElement::zero()),
            rel("[c,dstar]", comm(cc, ds), combo(&[(h(), &[cs, cc])])),
            rel(
                "[d,dstar]",
                comm(d, ds),
                combo(&[(-&h(), &[cc, ds]), (-&h(), &[d, cs])]),
            ),
        ],
    }
}

fn minkowski_relations(id: ModelId, k: &[GenId; 4]) -> Vec<Relation> {
    let [al, be, ga, de] = *k;
    match id {
        ModelId::M1 => vec![
            rel(
                "[al,be]",
                comm(al, be),
                combo(&[
                    (-&h(), &[be, be]),
                    (-&rp(), &[be, de]),
                    (h(), &[de, al]),
                    (-&h(), &[be, ga]),
                    (h2(), &[de, ga]),
                ]),
            ),
            rel(
                "[al,de]",
                comm(al, de),
                combo(&[(h(), &[de, ga]), (-&h(), &[be, de])]),
            ),
            rel(
                "[al,ga]",
                comm(al, ga),
                combo(&[
                    (h(), &[ga, ga]),
                    (rp(), &[de, ga]),
                    (-&h(), &[al, de]),
                    (h(), &[be, ga]),
                    (-&h2(), &[be, de]),
                ]),
            ),
            rel("[be,de]", comm(be, de), combo(&[(h(), &[de, de])])),
            rel(
                "[be,ga]",
                comm(be, ga),
                combo(&[(h(), &[de, ga]), (h(), &[de, be]), (rp(), &[de, de])]),
            ),
            rel("[ga,de]", comm(ga, de), combo(&[(-&h(), &[de, de])])),
        ],
        ModelId::M2 => vec![
            rel(
                "[al,be]",
                comm(al, be),
                combo(&[(&c(2) * &h(), &[al, de]), (h2(), &[be, de])]),
            ),
            rel(
                "[al,de]",
                comm(al, de),
                combo(&[(&c(2) * &h(), &[de, ga]), (&c(-2) * &h(), &[be, de])]),
            ),
            rel(
                "[al,ga]",
                comm(al, ga),
                combo(&[(-&h2(), &[de, ga]), (&c(-2) * &h(), &[de, al])]),
            ),
            rel(
                "[be,de]",
                comm(be, de),
                combo(&[(&c(2) * &h(), &[de, de])]),
            ),
            rel(
                "[be,ga]",
                comm(be, ga),
                combo(&[(&c(3) * &h2(), &[de, de])]),
            ),
            rel(
                "[ga,de]",
                comm(ga, de),
                combo(&[(&c(-2) * &h(), &[de, de])]),
            ),
        ],
    }
}

fn derivative_relations(id: ModelId, dv: &[GenId; 4]) -> Vec<Relation> {
    let [da, db, dg, dd] = *dv;
    match id {
        ModelId::M1 => vec![
            rel("[d_al,d_be]", comm(da, db), combo(&[(-&h(), &[da, da])])),
            rel(
                "[d_be,d_de]",
                comm(db, dd),
                combo(&[
                    (h(), &[db, db]),
                    (h(), &[db, dg]),
                    (-&h(), &[da, dd]),
                    (-&rp(), &[db, da]),
                    (-&h2(), &[da, dg]),
                ]),
            ),
            rel("[d_al,d_ga]", comm(da, dg), combo(&[(h(), &[da, da])])),
            rel(
                "[d_ga,d_de]",
                comm(dg, dd),
                combo(&[
                    (-&h(), &[dg, dg]),
                    (-&h(), &[db, dg]),
                    (h(), &[dd, da]),
                    (rp(), &[da, dg]),
                    (h2(), &[db, da]),
                ]),
            ),
            rel(
                "[d_al,d_de]",
                comm(da, dd),
                combo(&[(h(), &[da, db]), (-&h(), &[dg, da])]),
            ),
            rel(
                "[d_be,d_ga]",
                comm(db, dg),
                combo(&[(h(), &[da, db]), (h(), &[da, dg]), (-&rp(), &[da, da])]),
            ),
        ],
        ModelId::M2 => vec![
            rel(
                "[d_al,d_be]",
                comm(da, db),
                combo(&[(&c(-2) * &h(), &[da, da])]),
            ),
            rel(
                "[d_al,d_de]",
                comm(da, dd),
                combo(&[(&c(2) * &h(), &[db, da]), (&c(-2) * &h(), &[da, dg])]),
            ),
            rel(
                "[d_al,d_ga]",
                comm(da, dg),
                combo(&[(&c(2) * &h(), &[da, da])]),
            ),
            rel(
                "[d_be,d_de]",
                comm(db, dd),
                combo(&[(h2(), &[db, da]), (&c(-2) * &h(), &[dd, da])]),
            ),
            rel(
                "[d_be,d_ga]",
                comm(db, dg),
                combo(&[(&c(5) * &h2(), &[da, da])]),
            ),
            rel(
                "[d_ga,d_de]",
                comm(dg, dd),
                combo(&[(&c(2) * &h(), &[da, dd]), (-&h2(), &[da, dg])]),
            ),
        ],
    }
}

/// The printed part of the mixed coordinate-derivative relations. The lists
/// are explicitly partial; the full family comes from the inhomogeneous
/// reflection equation.
fn mixed_relations(id: ModelId, k: &[GenId; 4], dv: &[GenId; 4]) -> Vec<Relation> {
    let [al, be, ga, de] = *k;
    let [da, db, _dg, _dd] = *dv;
    let one = AlgElement::one();
    match id {
        ModelId::M1 => vec![
            rel(
                "[d_al,al]",
                comm(da, al),
                one.clone().add(&combo(&[
                    (h(), &[be, da]),
                    (-&h(), &[ga, da]),
                    (-&h2(), &[de, da]),
                ])),
            ),
            rel("[d_al,be]", comm(da, be), combo(&[(-&h(), &[de, da])])),
            rel("[d_al,ga]", comm(da, ga), combo(&[(h(), &[de, da])])),
            rel("[d_al,de]", comm(da, de), AlgElement::zero()),
            rel(
                "[d_be,al]",
                comm(db, al),
                combo(&[
                    (&rp() + &h2(), &[ga, da]),
                    (&h() * &(&rp() - &h2()), &[de, da]),
                    (-&h(), &[al, da]),
                    (-&h(), &[be, db]),
                    (-&h(), &[ga, db]),
                    (h2(), &[de, db]),
                    (h2(), &[be, da]),
                ]),
            ),
            rel(
                "[d_be,be]",
                comm(db, be),
                one.clone().add(&combo(&[
                    (&rp() - &h2(), &[de, da]),
                    (h(), &[be, da]),
                    (-&h(), &[de, db]),
                ])),
            ),
            rel(
                "[d_be,ga]",
                comm(db, ga),
                combo(&[
                    (-&h(), &[ga, da]),
                    (-&h(), &[de, db]),
                    (h2(), &[de, da]),
                ]),
            ),
            rel("[d_be,de]", comm(db, de), combo(&[(h(), &[de, da])])),
        ],
        ModelId::M2 => vec![
            rel(
                "[d_al,al]",
                comm(da, al),
                one.clone().add(&combo(&[
                    (&c(2) * &h(), &[be, da]),
                    (&c(-2) * &h(), &[ga, da]),
                    (&c(-4) * &h2(), &[de, da]),
                ])),
            ),
            rel(
                "[d_al,be]",
                comm(da, be),
                combo(&[(&c(-2) * &h(), &[de, da])]),
            ),
            rel(
                "[d_al,ga]",
                comm(da, ga),
                combo(&[(&c(2) * &h(), &[de, da])]),
            ),
            rel("[d_al,de]", comm(da, de), AlgElement::zero()),
            rel(
                "[d_be,al]",
                comm(db, al),
                combo(&[
                    (&c(-2) * &h(), &[al, da]),
                    (-&h2(), &[ga, da]),
                    (&c(-2) * &h().pow(3), &[de, da]),
                ]),
            ),
            rel(
                "[d_be,de]",
                comm(db, de),
                combo(&[(&c(2) * &h(), &[de, da])]),
            ),
            rel(
                "[d_be,be]",
                comm(db, be),
                one.add(&combo(&[(-&h2(), &[de, da])])),
            ),
            rel(
                "[d_be,ga]",
                comm(db, ga),
                combo(&[(&c(4) * &h2(), &[de, da])]),
            ),
        ],
    }
}

impl ModelSpec {
    /// Builds one of the two models with every constant matrix and printed
    /// relation family populated.
    pub fn build(id: ModelId) -> Self {
        let (alphabet, gens) = build_alphabet().expect("fixed alphabet is valid");
        let mats = const_mats(id);
        let printed_group = group_relations(&gens.group);
        let printed_cross = cross_relations(id, &gens.group, &gens.group_star);
        let printed_minkowski = minkowski_relations(id, &gens.coord);
        let printed_derivatives = derivative_relations(id, &gens.deriv);
        let printed_mixed_partial = mixed_relations(id, &gens.coord, &gens.deriv);

        let [al, be, ga, de] = gens.coord;
        let two_over = ParamScalar::int(2)
            .div(&(&h2() + &c(2)))
            .expect("h^2 + 2 is nonzero");
        let det_tail = match id {
            ModelId::M1 => combo(&[(h(), &[be, de])]),
            ModelId::M2 => combo(&[(&c(2) * &h(), &[be, de])]),
        };
        let det_display = combo(&[(c(1), &[al, de]), (c(-1), &[be, ga])])
            .add(&det_tail)
            .scale(&two_over);

        let keps_display = match id {
            ModelId::M1 => AlgMatrix::from_fn(2, 2, |i, j| match (i, j) {
                (0, 0) => AlgElement::gen(de),
                (0, 1) => combo(&[(c(-1), &[be]), (h(), &[de])]),
                (1, 0) => combo(&[(c(-1), &[ga]), (h(), &[de])]),
                _ => combo(&[
                    (c(1), &[al]),
                    (-&h(), &[be]),
                    (-&h(), &[ga]),
                    (&h2() - &rp(), &[de]),
                ]),
            }),
            ModelId::M2 => AlgMatrix::from_fn(2, 2, |i, j| match (i, j) {
                (0, 0) => AlgElement::gen(de),
                (0, 1) => combo(&[(c(-1), &[be]), (&c(2) * &h(), &[de])]),
                (1, 0) => combo(&[(c(-1), &[ga]), (&c(2) * &h(), &[de])]),
                _ => combo(&[(c(1), &[al]), (h2(), &[de])]),
            }),
        };

        let [wa, wb, wg, wd] = gens.form;
        let [da, db, dg, dd] = gens.deriv;
        let exterior_display = combo(&[
            (c(1), &[wa, da]),
            (c(1), &[wb, db]),
            (c(1), &[wg, dg]),
            (c(1), &[wd, dd]),
            (&c(-2) * &h(), &[wg, da]),
            (&c(-2) * &h(), &[wd, db]),
        ]);

        ModelSpec {
            id,
            alphabet,
            gens,
            mats,
            printed_group,
            printed_cross,
            printed_minkowski,
            printed_derivatives,
            printed_mixed_partial,
            det_display,
            keps_display,
            exterior_display,
            numeric: None,
        }
    }

    pub fn has_r_param(&self) -> bool {
        matches!(self.id, ModelId::M1)
    }

    /// Printed relations of a family; the forms and braided families are
    /// derived-only and return an error. The mixed list is a printed subset,
    /// not the full family.
    pub fn printed_relations(&self, family: Family) -> Result<&[Relation], CatalogError> {
        match family {
            Family::Group => Ok(&self.printed_group),
            Family::LorentzCross => Ok(&self.printed_cross),
            Family::Minkowski => Ok(&self.printed_minkowski),
            Family::Derivatives => Ok(&self.printed_derivatives),
            Family::MixedKY => Ok(&self.printed_mixed_partial),
            Family::FormsKdK | Family::FormsDKdK | Family::BraidedCross => {
                Err(CatalogError::DerivedOnly(family))
            }
        }
    }

    /// The group generator matrix.
    pub fn m(&self) -> AlgMatrix {
        let [a, b, cc, d] = self.gens.group;
        AlgMatrix::from_gen_rows(&[vec![a, b], vec![cc, d]])
    }

    pub fn m_dagger(&self) -> AlgMatrix {
        self.m().dagger(&self.alphabet)
    }

    /// Coordinate matrix (hermitian).
    pub fn k(&self) -> AlgMatrix {
        let [al, be, ga, de] = self.gens.coord;
        AlgMatrix::from_gen_rows(&[vec![al, be], vec![ga, de]])
    }

    /// Second coordinate copy used for braided addition.
    pub fn k_copy(&self) -> AlgMatrix {
        let [al, be, ga, de] = self.gens.coord_copy;
        AlgMatrix::from_gen_rows(&[vec![al, be], vec![ga, de]])
    }

    /// Derivative matrix (antihermitian); note the off-diagonal layout.
    pub fn y(&self) -> AlgMatrix {
        let [da, db, dg, dd] = self.gens.deriv;
        AlgMatrix::from_gen_rows(&[vec![da, dg], vec![db, dd]])
    }

    /// One-form matrix (hermitian, same layout as the coordinates).
    pub fn dk(&self) -> AlgMatrix {
        let [wa, wb, wg, wd] = self.gens.form;
        AlgMatrix::from_gen_rows(&[vec![wa, wb], vec![wg, wd]])
    }

    /// Group inverse through the deformed symplectic metric; valid once the
    /// quantum determinant is set to one.
    pub fn m_inverse(&self) -> AlgMatrix {
        self.mats
            .eps
            .mul(&self.m().transpose())
            .mul(&self.mats.eps_inv)
    }

    /// The quantum determinant of the group matrix.
    pub fn group_det(&self) -> AlgElement {
        let [a, b, cc, d] = self.gens.group;
        combo(&[(c(1), &[a, d]), (c(-1), &[cc, b]), (-&h(), &[cc, d])])
    }

    /// Deformed trace of a 2x2 matrix over the algebra.
    pub fn h_trace(&self, b: &AlgMatrix) -> AlgElement {
        self.mats.d_h.mul(b).trace()
    }

    /// Substitutes rational parameter values throughout the model.
    pub fn at_point(&self, hv: &BigRational, rv: &BigRational) -> Result<ModelSpec, CatalogError> {
        let sub_rels = |rels: &[Relation]| -> Result<Vec<Relation>, ScalarError> {
            rels.iter()
                .map(|r| {
                    Ok(Relation::new(
                        r.label.clone(),
                        r.element.substitute(hv, rv)?,
                    ))
                })
                .collect()
        };
        let m = &self.mats;
        let mats = ConstMats {
            r_h: m.r_h.substitute(hv, rv)?,
            rhat_h: m.rhat_h.substitute(hv, rv)?,
            flip: m.flip.clone(),
            proj_plus: m.proj_plus.substitute(hv, rv)?,
            proj_minus: m.proj_minus.substitute(hv, rv)?,
            eps: m.eps.substitute(hv, rv)?,
            eps_inv: m.eps_inv.substitute(hv, rv)?,
            r3: m.r3.substitute(hv, rv)?,
            r2: m.r2.substitute(hv, rv)?,
            rhat3: m.rhat3.substitute(hv, rv)?,
            d_h: m.d_h.substitute(hv, rv)?,
            rhat_eps: m.rhat_eps.substitute(hv, rv)?,
            metric: m.metric.substitute(hv, rv)?,
        };
        Ok(ModelSpec {
            id: self.id,
            alphabet: self.alphabet.clone(),
            gens: self.gens.clone(),
            mats,
            printed_group: sub_rels(&self.printed_group)?,
            printed_cross: sub_rels(&self.printed_cross)?,
            printed_minkowski: sub_rels(&self.printed_minkowski)?,
            printed_derivatives: sub_rels(&self.printed_derivatives)?,
            printed_mixed_partial: sub_rels(&self.printed_mixed_partial)?,
            det_display: self.det_display.substitute(hv, rv)?,
            keps_display: AlgMatrix::from_fn(2, 2, |i, j| {
                self.keps_display[(i, j)]
                    .substitute(hv, rv)
                    .expect("linear display has no poles")
            }),
            exterior_display: self.exterior_display.substitute(hv, rv)?,
            numeric: Some((hv.clone(), rv.clone())),
        })
    }

    pub fn is_classical_point(&self) -> bool {
        match &self.numeric {
            Some((h, _)) => h == &BigRational::from_integer(0.into()),
            None => false,
        }
    }

    /// Named matrix lookup for the command-line front end.
    pub fn matrix_by_name(&self, name: &str) -> Option<AlgMatrix> {
        let m = &self.mats;
        Some(match name {
            "R_h" => m.r_h.clone(),
            "Rhat_h" => m.rhat_h.clone(),
            "P" => m.flip.clone(),
            "P_plus" => m.proj_plus.clone(),
            "P_minus" => m.proj_minus.clone(),
            "eps_h" => m.eps.clone(),
            "eps_h_inv" => m.eps_inv.clone(),
            "R3" => m.r3.clone(),
            "R2" => m.r2.clone(),
            "Rhat3" => m.rhat3.clone(),
            "D_h" => m.d_h.clone(),
            "Rhat_eps" => m.rhat_eps.clone(),
            "g_h" => m.metric.clone(),
            "K_eps" => self.keps_display.clone(),
            "M" => self.m(),
            "M_dagger" => self.m_dagger(),
            "M_inv" => self.m_inverse(),
            "K" => self.k(),
            "K_copy" => self.k_copy(),
            "Y" => self.y(),
            "dK" => self.dk(),
            _ => return None,
        })
    }

    pub const MATRIX_NAMES: &'static [&'static str] = &[
        "R_h", "Rhat_h", "P", "P_plus", "P_minus", "eps_h", "eps_h_inv", "R3", "R2", "Rhat3",
        "D_h", "Rhat_eps", "g_h", "K_eps", "M", "M_dagger", "M_inv", "K", "K_copy", "Y", "dK",
    ];
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::{GeneratorOrder, RewriteSystem};
    use crate::scalars::rat_int;

    #[test]
    fn r3_shapes() {
        let m1 = ModelSpec::build(ModelId::M1);
        // Single off-diagonal r in the (2,3) position (1-based).
        for ((i, j), e) in m1.mats.r3.entries() {
            if i == j {
                assert!(e.as_scalar().unwrap().is_one());
            } else if (i, j) == (1, 2) {
                assert_eq!(e.as_scalar().unwrap(), ParamScalar::r());
            } else {
                assert!(e.is_zero());
            }
        }
    }

    #[test]
    fn coupling_matrix_reality() {
        for id in [ModelId::M1, ModelId::M2] {
            let spec = ModelSpec::build(id);
            // Flip conjugation equals the transpose (real entries).
            assert_eq!(spec.mats.r2, spec.mats.r3.transpose());
        }
    }

    #[test]
    fn projector_matches_symplectic_pattern() {
        // proj_minus[ij,kl] = -1/2 eps[ij] eps_inv[kl].
        let spec = ModelSpec::build(ModelId::M1);
        let eps = &spec.mats.eps;
        let eps_inv = &spec.mats.eps_inv;
        let pattern = AlgMatrix::from_fn(4, 4, |row, col| {
            let (i, j) = (row / 2, row % 2);
            let (k, l) = (col / 2, col % 2);
            eps[(i, j)]
                .mul(&eps_inv[(k, l)])
                .scale(&ParamScalar::rational(-1, 2))
        });
        assert_eq!(spec.mats.proj_minus, pattern);
    }

    #[test]
    fn trace_twist_from_symplectic_metric() {
        // D_h = -eps (eps^-1)^t.
        let spec = ModelSpec::build(ModelId::M2);
        let rhs = spec
            .mats
            .eps
            .mul(&spec.mats.eps_inv.transpose())
            .neg();
        assert_eq!(spec.mats.d_h, rhs);
    }

    #[test]
    fn projector_product_squares_to_scaled_projector() {
        let spec = ModelSpec::build(ModelId::M1);
        let p = &spec.mats.proj_minus;
        let pp = p.mul(&p.dagger(&spec.alphabet));
        let two_plus_h2 = &ParamScalar::int(2) + &ParamScalar::h().pow(2);
        let factor = two_plus_h2.div(&ParamScalar::int(2)).unwrap().pow(2);
        assert_eq!(pp.mul(&pp), pp.scale(&factor));
    }

    #[test]
    fn classical_limit_of_constants() {
        let zero = rat_int(0);
        for id in [ModelId::M1, ModelId::M2] {
            let spec = ModelSpec::build(id).at_point(&zero, &zero).unwrap();
            assert_eq!(spec.mats.r_h, AlgMatrix::identity(4));
            assert_eq!(spec.mats.r3, AlgMatrix::identity(4));
            assert_eq!(spec.mats.d_h, AlgMatrix::identity(2));
            assert_eq!(spec.mats.rhat_h, AlgMatrix::flip(2, 1, 2));
            // Flat antidiagonal metric with the off-diagonal pair at -1/2.
            let half = ParamScalar::rational(1, 2);
            let m = &spec.mats.metric;
            assert_eq!(m[(0, 3)].as_scalar().unwrap(), half);
            assert_eq!(m[(3, 0)].as_scalar().unwrap(), half);
            assert_eq!(m[(1, 2)].as_scalar().unwrap(), -&half);
            assert_eq!(m[(2, 1)].as_scalar().unwrap(), -&half);
        }
    }

    #[test]
    fn minkowski_system_matches_expected_rules() {
        let spec = ModelSpec::build(ModelId::M1);
        let rels = spec.printed_relations(Family::Minkowski).unwrap();
        let order = GeneratorOrder::from_alphabet(&spec.alphabet);
        let sys = RewriteSystem::orient("minkowski-m1", rels, order).unwrap();
        assert_eq!(sys.len(), 6);

        let [al, be, ga, de] = spec.gens.coord;
        // de*ga -> ga*de + h de^2
        let nf = sys.normal_form(&AlgElement::word(Word::from_ids(&[de, ga])));
        let expect = AlgElement::word(Word::from_ids(&[ga, de]))
            .add(&AlgElement::gen(de).pow(2).scale(&ParamScalar::h()));
        assert_eq!(nf, expect);

        // al*de - de*al reduces to h(de*ga - be*de) in normal form.
        let x = AlgElement::gen(al).commutator(&AlgElement::gen(de));
        let target = AlgElement::word(Word::from_ids(&[de, ga]))
            .sub(&AlgElement::word(Word::from_ids(&[be, de])))
            .scale(&ParamScalar::h());
        assert_eq!(sys.normal_form(&x), sys.normal_form(&target));

        // All four degree-3 overlap words resolve.
        assert!(sys.check_confluence(3).is_confluent());
    }

    #[test]
    fn classical_minkowski_rules_are_plain_commutation() {
        let zero = rat_int(0);
        let spec = ModelSpec::build(ModelId::M1).at_point(&zero, &zero).unwrap();
        let rels = spec.printed_relations(Family::Minkowski).unwrap();
        let order = GeneratorOrder::from_alphabet(&spec.alphabet);
        let sys = RewriteSystem::orient("classical", rels, order).unwrap();
        for (lhs, rhs) in sys.rules() {
            assert_eq!(lhs.len(), 2);
            assert_eq!(rhs.num_terms(), 1);
            let (w, cf) = rhs.terms().next().unwrap();
            assert_eq!(w.len(), 2);
            assert!(cf.is_one());
            let mut fl = lhs.letters().to_vec();
            fl.reverse();
            assert_eq!(w.letters(), fl.as_slice());
        }
    }

    #[test]
    fn derived_only_families_signal() {
        let spec = ModelSpec::build(ModelId::M2);
        assert!(matches!(
            spec.printed_relations(Family::FormsDKdK),
            Err(CatalogError::DerivedOnly(_))
        ));
    }

    #[test]
    fn m_inverse_classical_limit_is_adjugate() {
        let zero = rat_int(0);
        let spec = ModelSpec::build(ModelId::M1);
        let minv = spec.m_inverse();
        let [a, b, cc, d] = spec.gens.group;
        let sub = AlgMatrix::from_fn(2, 2, |i, j| minv[(i, j)].substitute(&zero, &zero).unwrap());
        let expect = AlgMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => AlgElement::gen(d),
            (0, 1) => AlgElement::gen(b).neg(),
            (1, 0) => AlgElement::gen(cc).neg(),
            _ => AlgElement::gen(a),
        });
        assert_eq!(sub, expect);
    }
}
