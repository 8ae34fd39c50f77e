//! Matrix calculus over algebra entries with the tensor-leg operations the
//! reflection-equation machinery needs: leg embeddings, the flip operator,
//! partial transpose and trace, dagger, Kronecker products and exact
//! inverses of parameter-valued matrices.
//!
//! Index convention: row-major with leg 1 slowest. A matrix on `n` legs of
//! dimension 2 is `2^n x 2^n`; the row index `(i_1 .. i_n)` flattens to
//! `i_1 * 2^(n-1) + ... + i_n`.

use num::BigRational;
use thiserror::Error;

use crate::ncalg::{render_element, AlgElement, Alphabet, GenId};
use crate::scalars::{ParamScalar, ScalarError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TensorError {
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("matrix is singular over the parameter field")]
    Singular,
    #[error("entry at ({0},{1}) is not a pure scalar")]
    NonScalarEntry(usize, usize),
    #[error("invalid leg selection {0:?} for {1} legs")]
    BadLegs(Vec<usize>, usize),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Dense rectangular matrix with free-algebra entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<AlgElement>,
}

impl AlgMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        AlgMatrix {
            rows,
            cols,
            entries: vec![AlgElement::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = AlgMatrix::zero(n, n);
        for i in 0..n {
            m[(i, i)] = AlgElement::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> AlgElement) -> Self {
        let mut m = AlgMatrix::zero(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_scalar_rows(rows: Vec<Vec<ParamScalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        AlgMatrix {
            rows: r,
            cols: c,
            entries: rows
                .into_iter()
                .flatten()
                .map(AlgElement::from_scalar)
                .collect(),
        }
    }

    pub fn from_gen_rows(rows: &[Vec<GenId>]) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        AlgMatrix {
            rows: r,
            cols: c,
            entries: rows
                .iter()
                .flatten()
                .map(|&g| AlgElement::gen(g))
                .collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), &AlgElement)> {
        self.entries
            .iter()
            .enumerate()
            .map(move |(k, e)| ((k / self.cols, k % self.cols), e))
    }

    pub fn try_mul(&self, rhs: &AlgMatrix) -> Result<AlgMatrix, TensorError> {
        if self.cols != rhs.rows {
            return Err(TensorError::DimMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = AlgMatrix::zero(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if b.is_zero() {
                        continue;
                    }
                    let prod = a.mul(b);
                    out[(i, j)] = out[(i, j)].add(&prod);
                }
            }
        }
        Ok(out)
    }

    pub fn mul(&self, rhs: &AlgMatrix) -> AlgMatrix {
        self.try_mul(rhs).expect("matrix dimensions agree")
    }

    pub fn add(&self, rhs: &AlgMatrix) -> AlgMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        AlgMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].add(&rhs[(i, j)]))
    }

    pub fn sub(&self, rhs: &AlgMatrix) -> AlgMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        AlgMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].sub(&rhs[(i, j)]))
    }

    pub fn neg(&self) -> AlgMatrix {
        AlgMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].neg())
    }

    pub fn scale(&self, c: &ParamScalar) -> AlgMatrix {
        AlgMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].scale(c))
    }

    pub fn transpose(&self) -> AlgMatrix {
        AlgMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    /// Transpose composed with the entrywise involution.
    pub fn dagger(&self, ab: &Alphabet) -> AlgMatrix {
        AlgMatrix::from_fn(self.cols, self.rows, |i, j| ab.star(&self[(j, i)]))
    }

    /// Kronecker product; left-factor entries multiply first, which matters
    /// for noncommuting entries.
    pub fn kron(&self, rhs: &AlgMatrix) -> AlgMatrix {
        AlgMatrix::from_fn(
            self.rows * rhs.rows,
            self.cols * rhs.cols,
            |i, j| {
                let (i1, i2) = (i / rhs.rows, i % rhs.rows);
                let (j1, j2) = (j / rhs.cols, j % rhs.cols);
                self[(i1, j1)].mul(&rhs[(i2, j2)])
            },
        )
    }

    pub fn trace(&self) -> AlgElement {
        assert_eq!(self.rows, self.cols);
        let mut t = AlgElement::zero();
        for i in 0..self.rows {
            t = t.add(&self[(i, i)]);
        }
        t
    }

    pub fn substitute(&self, h: &BigRational, r: &BigRational) -> Result<AlgMatrix, ScalarError> {
        let mut out = AlgMatrix::zero(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)].substitute(h, r)?;
            }
        }
        Ok(out)
    }

    pub fn map_gens(&self, f: impl Fn(GenId) -> GenId + Copy) -> AlgMatrix {
        AlgMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].map_gens(f))
    }

    /// Embeds a matrix on the named legs (1-based, ascending) of an
    /// `n_legs`-fold tensor space, acting as the identity elsewhere.
    pub fn leg_embed(&self, n_legs: usize, legs: &[usize]) -> Result<AlgMatrix, TensorError> {
        let dim = 1usize << n_legs;
        let k = legs.len();
        if self.rows != (1 << k) || self.cols != (1 << k) {
            return Err(TensorError::DimMismatch(format!(
                "matrix is {}x{}, needs {}x{} for {} legs",
                self.rows,
                self.cols,
                1 << k,
                1 << k,
                k
            )));
        }
        let ok = !legs.is_empty()
            && legs.windows(2).all(|w| w[0] < w[1])
            && legs.iter().all(|&l| l >= 1 && l <= n_legs);
        if !ok {
            return Err(TensorError::BadLegs(legs.to_vec(), n_legs));
        }
        let bit = |idx: usize, leg: usize| (idx >> (n_legs - leg)) & 1;
        let sub_index = |idx: usize| -> usize {
            legs.iter().fold(0, |acc, &l| (acc << 1) | bit(idx, l))
        };
        let mut out = AlgMatrix::zero(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                let off_legs_agree = (1..=n_legs)
                    .filter(|l| !legs.contains(l))
                    .all(|l| bit(i, l) == bit(j, l));
                if off_legs_agree {
                    out[(i, j)] = self[(sub_index(i), sub_index(j))].clone();
                }
            }
        }
        Ok(out)
    }

    /// The flip operator exchanging two legs.
    pub fn flip(n_legs: usize, a: usize, b: usize) -> AlgMatrix {
        let dim = 1usize << n_legs;
        let bit = |idx: usize, leg: usize| (idx >> (n_legs - leg)) & 1;
        AlgMatrix::from_fn(dim, dim, |i, j| {
            let swapped_match = (1..=n_legs).all(|l| {
                let jl = if l == a {
                    bit(j, b)
                } else if l == b {
                    bit(j, a)
                } else {
                    bit(j, l)
                };
                bit(i, l) == jl
            });
            if swapped_match {
                AlgElement::one()
            } else {
                AlgElement::zero()
            }
        })
    }

    fn n_legs(&self) -> usize {
        assert_eq!(self.rows, self.cols, "square matrix required");
        let n = self.rows.trailing_zeros() as usize;
        assert_eq!(1 << n, self.rows, "dimension must be a power of two");
        n
    }

    /// Transposes the row/column indices of one leg only.
    pub fn partial_transpose(&self, leg: usize) -> AlgMatrix {
        let n = self.n_legs();
        assert!(leg >= 1 && leg <= n);
        let shift = n - leg;
        let swap_leg = |i: usize, j: usize| {
            let bi = (i >> shift) & 1;
            let bj = (j >> shift) & 1;
            let i2 = (i & !(1 << shift)) | (bj << shift);
            let j2 = (j & !(1 << shift)) | (bi << shift);
            (i2, j2)
        };
        AlgMatrix::from_fn(self.rows, self.cols, |i, j| {
            let (si, sj) = swap_leg(i, j);
            self[(si, sj)].clone()
        })
    }

    /// Sums the matching indices of one leg, halving the dimension.
    pub fn partial_trace(&self, leg: usize) -> AlgMatrix {
        let n = self.n_legs();
        assert!(leg >= 1 && leg <= n);
        let shift = n - leg;
        let dim_out = self.rows / 2;
        let insert = |idx: usize, bitval: usize| {
            let hi = (idx >> shift) << (shift + 1);
            let lo = idx & ((1 << shift) - 1);
            hi | (bitval << shift) | lo
        };
        AlgMatrix::from_fn(dim_out, dim_out, |i, j| {
            let mut acc = AlgElement::zero();
            for t in 0..2 {
                acc = acc.add(&self[(insert(i, t), insert(j, t))]);
            }
            acc
        })
    }

    fn to_scalar_rows(&self) -> Result<Vec<Vec<ParamScalar>>, TensorError> {
        let mut out = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut row = Vec::with_capacity(self.cols);
            for j in 0..self.cols {
                match self[(i, j)].as_scalar() {
                    Some(s) => row.push(s),
                    None => return Err(TensorError::NonScalarEntry(i, j)),
                }
            }
            out.push(row);
        }
        Ok(out)
    }

    /// Rank over the rational-function field (entries must be scalars).
    pub fn rank(&self) -> Result<usize, TensorError> {
        let mut m = self.to_scalar_rows()?;
        let (rank, _, _) = gauss(&mut m, None);
        Ok(rank)
    }

    /// Determinant over the rational-function field.
    pub fn det(&self) -> Result<ParamScalar, TensorError> {
        if self.rows != self.cols {
            return Err(TensorError::DimMismatch("determinant of non-square".into()));
        }
        let mut m = self.to_scalar_rows()?;
        let (rank, det, _) = gauss(&mut m, None);
        if rank < self.rows {
            return Ok(ParamScalar::zero());
        }
        Ok(det)
    }

    /// Exact inverse over the rational-function field; the entries must be
    /// scalars (no generators).
    pub fn invert_numeric(&self) -> Result<AlgMatrix, TensorError> {
        if self.rows != self.cols {
            return Err(TensorError::DimMismatch("inverse of non-square".into()));
        }
        let n = self.rows;
        let mut m = self.to_scalar_rows()?;
        let mut aug: Vec<Vec<ParamScalar>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { ParamScalar::one() } else { ParamScalar::zero() })
                    .collect()
            })
            .collect();
        let (rank, _, _) = gauss(&mut m, Some(&mut aug));
        if rank < n {
            return Err(TensorError::Singular);
        }
        Ok(AlgMatrix::from_scalar_rows(aug))
    }
}

/// Gauss-Jordan elimination over the parameter field. Returns the rank, the
/// determinant (meaningful for square input of full rank) and leaves `aug`
/// holding the inverse image when provided.
fn gauss(
    m: &mut [Vec<ParamScalar>],
    mut aug: Option<&mut Vec<Vec<ParamScalar>>>,
) -> (usize, ParamScalar, ()) {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut det = ParamScalar::one();
    let mut pivot_row = 0;
    for col in 0..cols {
        let Some(p) = (pivot_row..rows).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        if p != pivot_row {
            m.swap(p, pivot_row);
            if let Some(a) = aug.as_deref_mut() {
                a.swap(p, pivot_row);
            }
            det = -&det;
        }
        let piv = m[pivot_row][col].clone();
        det = &det * &piv;
        let inv = piv.inv().expect("pivot nonzero");
        for j in 0..cols {
            m[pivot_row][j] = &m[pivot_row][j] * &inv;
        }
        if let Some(a) = aug.as_deref_mut() {
            for j in 0..a[pivot_row].len() {
                a[pivot_row][j] = &a[pivot_row][j] * &inv;
            }
        }
        for i in 0..rows {
            if i == pivot_row || m[i][col].is_zero() {
                continue;
            }
            let f = m[i][col].clone();
            for j in 0..cols {
                let t = &m[pivot_row][j] * &f;
                m[i][j] = &m[i][j] - &t;
            }
            if let Some(a) = aug.as_deref_mut() {
                for j in 0..a[i].len() {
                    let t = &a[pivot_row][j] * &f;
                    a[i][j] = &a[i][j] - &t;
                }
            }
        }
        pivot_row += 1;
        if pivot_row == rows {
            break;
        }
    }
    (pivot_row, det, ())
}

impl std::ops::Index<(usize, usize)> for AlgMatrix {
    type Output = AlgElement;
    fn index(&self, (i, j): (usize, usize)) -> &AlgElement {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for AlgMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut AlgElement {
        &mut self.entries[i * self.cols + j]
    }
}

/// Renders a matrix as bracketed rows of expressions.
pub fn render_matrix(ab: &Alphabet, m: &AlgMatrix) -> String {
    let mut rows = Vec::with_capacity(m.rows());
    for i in 0..m.rows() {
        let cells: Vec<String> = (0..m.cols())
            .map(|j| render_element(ab, &m[(i, j)]))
            .collect();
        rows.push(format!("[{}]", cells.join(", ")));
    }
    format!("[{}]", rows.join(",\n "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncalg::GenKind;

    fn s(n: i64) -> ParamScalar {
        ParamScalar::int(n)
    }

    fn h() -> ParamScalar {
        ParamScalar::h()
    }

    /// The triangular 4x4 R-matrix used throughout the crate.
    fn r_h() -> AlgMatrix {
        AlgMatrix::from_scalar_rows(vec![
            vec![s(1), -&h(), h(), &h() * &h()],
            vec![s(0), s(1), s(0), -&h()],
            vec![s(0), s(0), s(1), h()],
            vec![s(0), s(0), s(0), s(1)],
        ])
    }

    #[test]
    fn identity_law_and_associativity() {
        let r = r_h();
        assert_eq!(AlgMatrix::identity(4).mul(&r), r);
        let p = AlgMatrix::flip(2, 1, 2);
        let lhs = r.mul(&p).mul(&r);
        let rhs = r.mul(&p.mul(&r));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn flip_is_the_expected_permutation() {
        let p = AlgMatrix::flip(2, 1, 2);
        // Rows select components (11, 21, 12, 22) of the column index.
        let e = AlgMatrix::identity(4);
        let expect = AlgMatrix::from_fn(4, 4, |i, j| {
            let perm = [0usize, 2, 1, 3];
            e[(perm[i], j)].clone()
        });
        assert_eq!(p, expect);
        assert_eq!(p.mul(&p), AlgMatrix::identity(4));
    }

    #[test]
    fn triangularity_of_r() {
        // P R P = R^{-1}.
        let r = r_h();
        let p = AlgMatrix::flip(2, 1, 2);
        let prp = p.mul(&r).mul(&p);
        let rinv = r.invert_numeric().unwrap();
        assert_eq!(prp, rinv);
        assert_eq!(rinv.mul(&r), AlgMatrix::identity(4));
    }

    #[test]
    fn partial_transpose_involution_and_composition() {
        let r = r_h();
        let t1 = r.partial_transpose(1);
        assert_eq!(t1.partial_transpose(1), r);
        let full = r.partial_transpose(1).partial_transpose(2);
        assert_eq!(full, r.transpose());
    }

    #[test]
    fn partial_trace_of_kron() {
        let a = AlgMatrix::from_scalar_rows(vec![vec![s(1), s(2)], vec![s(3), s(4)]]);
        let b = AlgMatrix::from_scalar_rows(vec![vec![s(5), s(6)], vec![s(7), s(8)]]);
        let k = a.kron(&b);
        // tr over leg 2 gives tr(b) * a.
        let t2 = k.partial_trace(2);
        assert_eq!(t2, a.scale(&s(13)));
        // tr over leg 1 of the identity on two legs is 2*I.
        let t1 = AlgMatrix::identity(4).partial_trace(1);
        assert_eq!(t1, AlgMatrix::identity(2).scale(&s(2)));
    }

    #[test]
    fn leg_embedding_block_structure() {
        let r = r_h();
        let e = r.leg_embed(3, &[1, 2]).unwrap();
        // Embedding on legs {1,2} of three legs is R (x) I.
        assert_eq!(e, r.kron(&AlgMatrix::identity(2)));
        let e23 = r.leg_embed(3, &[2, 3]).unwrap();
        assert_eq!(e23, AlgMatrix::identity(2).kron(&r));
        assert!(r.leg_embed(3, &[2, 2]).is_err());
    }

    #[test]
    fn leg_embedding_commutes_for_disjoint_scalar_legs() {
        let a = AlgMatrix::from_scalar_rows(vec![vec![s(1), h()], vec![s(2), s(3)]]);
        let b = AlgMatrix::from_scalar_rows(vec![vec![s(0), s(1)], vec![s(5), -&h()]]);
        let a1 = a.leg_embed(2, &[1]).unwrap();
        let b2 = b.leg_embed(2, &[2]).unwrap();
        assert_eq!(a1.mul(&b2), b2.mul(&a1));
        assert_eq!(a1.mul(&b2), a.kron(&b));
    }

    #[test]
    fn dagger_on_hermitian_generator_matrix() {
        let mut ab = Alphabet::new();
        let al = ab.add("al", GenKind::Coordinate, 2).unwrap();
        let be = ab.add("be", GenKind::Coordinate, 1).unwrap();
        let ga = ab.add("ga", GenKind::Coordinate, 1).unwrap();
        let de = ab.add("de", GenKind::Coordinate, 0).unwrap();
        ab.set_star_self(al, false);
        ab.set_star_pair(be, ga, false);
        ab.set_star_self(de, false);
        let k = AlgMatrix::from_gen_rows(&[vec![al, be], vec![ga, de]]);
        assert_eq!(k.dagger(&ab), k);
        assert_eq!(k.dagger(&ab).dagger(&ab), k);
    }

    #[test]
    fn dagger_antimultiplicative() {
        let mut ab = Alphabet::new();
        let a = ab.add("a", GenKind::Group, 1).unwrap();
        let b = ab.add("b", GenKind::Group, 2).unwrap();
        let astar = ab.add("astar", GenKind::GroupStar, 1).unwrap();
        let bstar = ab.add("bstar", GenKind::GroupStar, 2).unwrap();
        ab.set_star_pair(a, astar, false);
        ab.set_star_pair(b, bstar, false);
        let m = AlgMatrix::from_gen_rows(&[vec![a, b], vec![b, a]]);
        let n = AlgMatrix::from_gen_rows(&[vec![b, a], vec![a, b]]);
        let lhs = m.mul(&n).dagger(&ab);
        let rhs = n.dagger(&ab).mul(&m.dagger(&ab));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn singular_matrix_reports_error() {
        let m = AlgMatrix::from_scalar_rows(vec![vec![s(1), s(2)], vec![s(2), s(4)]]);
        assert!(matches!(m.invert_numeric(), Err(TensorError::Singular)));
        assert_eq!(m.rank().unwrap(), 1);
    }

    #[test]
    fn mismatch_reports_error() {
        let a = AlgMatrix::zero(2, 3);
        let b = AlgMatrix::zero(2, 3);
        assert!(matches!(a.try_mul(&b), Err(TensorError::DimMismatch(_))));
    }

    #[test]
    fn double_partial_trace_is_full_trace() {
        let r = r_h();
        let x = r.kron(&AlgMatrix::identity(2));
        let t = x.partial_trace(1).partial_trace(1).partial_trace(1);
        assert_eq!(t.rows(), 1);
        let full = x.trace();
        assert_eq!(t[(0, 0)], full);
    }
}
