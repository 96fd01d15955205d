//! Formal t-connections with a second order pole and exact series methods
//! for them: normalization of a basis along the eigenvalue blocks of the
//! leading term, and order-by-order extension of a constant-term isomorphism
//! to a full series intertwiner with inconsistency and uniqueness
//! certificates.
//!
//! The second half of the module instantiates this machinery for the small
//! quantum ring of a (2,2) complete intersection threefold in projective
//! five-space and the quantum ring of a genus two curve: the quantum
//! connections of the pair, the frozen comparison data identifying them, the
//! intertwiner series, and the resulting coefficient series of the p-th
//! quantum power operation on the degree three classes, together with the
//! classical power operation on the curve for comparison.
//!
//! All computations are exact. Matrices are dense `Vec<Vec<F>>` over an
//! exact coefficient field; series are truncated at an explicit order and
//! every returned order is certified, never extrapolated.

use crate::linear::{sv_zero, Rref, SparseVec};
use crate::scalars::{Field, GaussRat, Rat, Series};
use std::fmt;

/// Dense square or rectangular matrix, row major.
pub type Mat<F> = Vec<Vec<F>>;

/// `n/d` in an arbitrary coefficient field. Panics when `d` maps to zero,
/// so callers must keep denominators invertible (all denominators in this
/// module are powers of two).
pub fn frac<F: Field>(n: i64, d: i64) -> F {
    F::from_i64(n)
        * F::from_i64(d)
            .inv()
            .expect("denominator must stay invertible in the coefficient field")
}

pub fn mat_zero<F: Field>(rows: usize, cols: usize) -> Mat<F> {
    vec![vec![F::zero(); cols]; rows]
}

pub fn mat_id<F: Field>(n: usize) -> Mat<F> {
    let mut m = mat_zero(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = F::one();
    }
    m
}

pub fn mat_add<F: Field>(a: &Mat<F>, b: &Mat<F>) -> Mat<F> {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| {
            ra.iter()
                .zip(rb)
                .map(|(x, y)| x.clone() + y.clone())
                .collect()
        })
        .collect()
}

pub fn mat_sub<F: Field>(a: &Mat<F>, b: &Mat<F>) -> Mat<F> {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| {
            ra.iter()
                .zip(rb)
                .map(|(x, y)| x.clone() - y.clone())
                .collect()
        })
        .collect()
}

pub fn mat_scale<F: Field>(a: &Mat<F>, c: &F) -> Mat<F> {
    a.iter()
        .map(|r| r.iter().map(|x| x.clone() * c.clone()).collect())
        .collect()
}

pub fn mat_mul<F: Field>(a: &Mat<F>, b: &Mat<F>) -> Mat<F> {
    let rows = a.len();
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    let mut out = mat_zero::<F>(rows, cols);
    for i in 0..rows {
        for (k, bk) in b.iter().enumerate().take(inner) {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..cols {
                out[i][j] = out[i][j].clone() + a[i][k].clone() * bk[j].clone();
            }
        }
    }
    out
}

pub fn mat_apply<F: Field>(a: &Mat<F>, v: &[F]) -> Vec<F> {
    a.iter()
        .map(|row| {
            let mut acc = F::zero();
            for (x, y) in row.iter().zip(v) {
                acc = acc + x.clone() * y.clone();
            }
            acc
        })
        .collect()
}

pub fn mat_transpose<F: Field>(a: &Mat<F>) -> Mat<F> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut out = mat_zero(cols, rows);
    for (i, row) in a.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            out[j][i] = x.clone();
        }
    }
    out
}

pub fn mat_is_zero<F: Field>(a: &Mat<F>) -> bool {
    a.iter().all(|r| r.iter().all(F::is_zero))
}

pub fn mat_map<F: Field, G: Field>(a: &Mat<F>, f: impl Fn(&F) -> G) -> Mat<G> {
    a.iter().map(|r| r.iter().map(&f).collect()).collect()
}

/// Inverse by exact Gauss-Jordan elimination. `None` when no invertible
/// pivot can be found in some column (singular matrix, or a column of zero
/// divisors over a non-field coefficient ring).
pub fn mat_inv<F: Field>(a: &Mat<F>) -> Option<Mat<F>> {
    let n = a.len();
    let mut m = a.clone();
    let mut inv = mat_id::<F>(n);
    for col in 0..n {
        let piv = (col..n).find(|&r| m[r][col].inv().is_some())?;
        m.swap(col, piv);
        inv.swap(col, piv);
        let c = m[col][col].inv()?;
        for j in 0..n {
            m[col][j] = m[col][j].clone() * c.clone();
            inv[col][j] = inv[col][j].clone() * c.clone();
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for j in 0..n {
                    m[r][j] = m[r][j].clone() - f.clone() * m[col][j].clone();
                    inv[r][j] = inv[r][j].clone() - f.clone() * inv[col][j].clone();
                }
            }
        }
    }
    Some(inv)
}

/// Matrix with entries reduced mod `P`. `None` when `P` divides one of the
/// denominators.
pub fn mat_mod<const P: u64>(m: &Mat<Rat>) -> Option<Mat<crate::scalars::Fp<P>>> {
    let mut out = Vec::with_capacity(m.len());
    for row in m {
        let mut r = Vec::with_capacity(row.len());
        for x in row {
            r.push(crate::scalars::rat_mod::<P>(x)?);
        }
        out.push(r);
    }
    Some(out)
}

/// Series with coefficients reduced mod `P`. `None` when `P` divides one of
/// the denominators.
pub fn series_mod<const P: u64>(s: &Series<Rat>) -> Option<Series<crate::scalars::Fp<P>>> {
    let mut c = Vec::with_capacity(s.c.len());
    for x in &s.c {
        c.push(crate::scalars::rat_mod::<P>(x)?);
    }
    Some(Series::from_coeffs(c))
}

/// Failure modes of the connection-level algorithms. Every rejection
/// carries the data needed to point at the offending order or entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConnectionError {
    /// The two connections (or the seed matrix) disagree in size.
    DimensionMismatch { left: usize, right: usize },
    /// The leading term is not block-diagonal over its diagonal values,
    /// or a block is not eigenvalue plus nilpotent; the entry at
    /// `(row, col)` witnesses the failure.
    BlockStructureBroken { row: usize, col: usize },
    /// A difference of two distinct leading-term eigenvalues has no
    /// inverse in the coefficient ring, so the normalization does not
    /// exist over these scalars.
    GapNotInvertible { gap: String },
    /// The intertwiner extension problem has no solution. The listed
    /// entries are the nonzero part of the first obstructed series order
    /// and certify the inconsistency.
    Inconsistent {
        order: usize,
        entries: Vec<(usize, usize, String)>,
    },
    /// The requested orders are not pinned down by the equations even
    /// after padding with extra orders.
    NotUniquelyDetermined { order: usize },
    /// The power operation needs an odd prime.
    OddPrimeRequired { given: u64 },
    /// The coefficient field does not have the requested characteristic.
    CharacteristicMismatch { field: u64, prime: u64 },
    /// The requested truncation is too short for the computation.
    TruncationTooSmall { given: usize, needed: usize },
    /// The coefficient series came out different for the two square-root
    /// normalizations; first differing order.
    EpsilonDependent { order: usize },
    /// A series that must be real kept an imaginary part; first bad order.
    ComplexResidue { order: usize },
}

impl fmt::Display for ConnectionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConnectionError::DimensionMismatch { left, right } => {
                write!(f, "dimension mismatch: {left} against {right}")
            }
            ConnectionError::BlockStructureBroken { row, col } => write!(
                f,
                "leading term is not block-diagonal with nilpotent blocks; see entry ({row}, {col})"
            ),
            ConnectionError::GapNotInvertible { gap } => {
                write!(f, "eigenvalue gap {gap} is not invertible over these scalars")
            }
            ConnectionError::Inconsistent { order, entries } => {
                write!(f, "no intertwiner extends the seed: obstruction at order {order}")?;
                for (i, j, v) in entries {
                    write!(f, "; entry ({i}, {j}) = {v}")?;
                }
                Ok(())
            }
            ConnectionError::NotUniquelyDetermined { order } => {
                write!(f, "intertwiner orders up to {order} are not uniquely determined")
            }
            ConnectionError::OddPrimeRequired { given } => {
                write!(f, "an odd prime is required, got {given}")
            }
            ConnectionError::CharacteristicMismatch { field, prime } => {
                write!(f, "field characteristic {field} does not match prime {prime}")
            }
            ConnectionError::TruncationTooSmall { given, needed } => {
                write!(f, "truncation order {given} is below the required {needed}")
            }
            ConnectionError::EpsilonDependent { order } => write!(
                f,
                "series depends on the square-root normalization at order {order}"
            ),
            ConnectionError::ComplexResidue { order } => {
                write!(f, "series has a nonzero imaginary part at order {order}")
            }
        }
    }
}

impl std::error::Error for ConnectionError {}

/// Connection `d/dt + A(t)/t^2` on a free module of rank `dim`, with
/// polynomial `A(t) = A_0 + A_1 t + ...`. The residue-scale grading
/// operator, when there is one, sits inside `A_1`.
#[derive(Clone, Debug, PartialEq)]
pub struct FormalConnection<F: Field> {
    pub dim: usize,
    pub coeffs: Vec<Mat<F>>,
}

impl<F: Field> FormalConnection<F> {
    pub fn new(coeffs: Vec<Mat<F>>) -> Self {
        assert!(!coeffs.is_empty(), "a connection needs at least A_0");
        let dim = coeffs[0].len();
        for m in &coeffs {
            assert_eq!(m.len(), dim, "coefficient matrices must share one size");
            for row in m {
                assert_eq!(row.len(), dim, "coefficient matrices must be square");
            }
        }
        FormalConnection { dim, coeffs }
    }

    /// Rank one connection `d/dt + c/t^2`; its horizontal sections scale
    /// like `exp(c/t)`.
    pub fn rank_one(c: F) -> Self {
        FormalConnection {
            dim: 1,
            coeffs: vec![vec![vec![c]]],
        }
    }

    /// `A_k`, zero beyond the stored coefficients.
    pub fn coeff(&self, k: usize) -> Mat<F> {
        if k < self.coeffs.len() {
            self.coeffs[k].clone()
        } else {
            mat_zero(self.dim, self.dim)
        }
    }

    /// Block sum; coefficient lists are padded to a common polynomial
    /// degree.
    pub fn direct_sum(parts: &[FormalConnection<F>]) -> Self {
        let dim: usize = parts.iter().map(|p| p.dim).sum();
        let deg = parts.iter().map(|p| p.coeffs.len()).max().unwrap_or(1);
        let mut coeffs = Vec::with_capacity(deg);
        for k in 0..deg {
            let mut m = mat_zero::<F>(dim, dim);
            let mut off = 0;
            for p in parts {
                let a = p.coeff(k);
                for i in 0..p.dim {
                    for j in 0..p.dim {
                        m[off + i][off + j] = a[i][j].clone();
                    }
                }
                off += p.dim;
            }
            coeffs.push(m);
        }
        FormalConnection::new(coeffs)
    }

    /// The same connection written in the constant basis given by the
    /// columns of `basis`: every coefficient becomes `B^{-1} A_k B`.
    /// `None` when the basis is singular.
    pub fn conjugate(&self, basis: &Mat<F>) -> Option<FormalConnection<F>> {
        let inv = mat_inv(basis)?;
        Some(FormalConnection::new(
            self.coeffs
                .iter()
                .map(|a| mat_mul(&inv, &mat_mul(a, basis)))
                .collect(),
        ))
    }
}

/// Series isomorphism `R(t) = R_0 + R_1 t + ...` carrying horizontal
/// sections of `src` to horizontal sections of `tgt`, truncated at
/// `orders.len() - 1` and exact in every stored order. The defining
/// identity is `t^2 R'(t) = R(t) A_src(t) - A_tgt(t) R(t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RMatrix<F: Field> {
    pub src: FormalConnection<F>,
    pub tgt: FormalConnection<F>,
    pub orders: Vec<Mat<F>>,
}

impl<F: Field> RMatrix<F> {
    pub fn t_order(&self) -> usize {
        self.orders.len() - 1
    }

    /// Coefficients of `t^2 R' - R A_src + A_tgt R` through `t^through`.
    /// All zero exactly when the intertwining identity holds to that
    /// order. Orders beyond the stored truncation treat the missing
    /// matrices as zero, so only `through <= t_order()` is meaningful.
    pub fn intertwining_defect(&self, through: usize) -> Vec<Mat<F>> {
        let n = self.src.dim;
        (0..=through)
            .map(|m| {
                let mut d = mat_zero::<F>(n, n);
                for (j, r) in self.orders.iter().enumerate().take(m + 1) {
                    let i = m - j;
                    let s = self.src.coeff(i);
                    let t = self.tgt.coeff(i);
                    d = mat_add(&d, &mat_sub(&mat_mul(r, &s), &mat_mul(&t, r)));
                }
                if m >= 1 && m - 1 < self.orders.len() {
                    let c = F::from_i64(m as i64 - 1);
                    d = mat_sub(&d, &mat_scale(&self.orders[m - 1], &c));
                }
                d
            })
            .collect()
    }

    /// Image of a constant source vector: one series per target
    /// coordinate, truncated like the intertwiner.
    pub fn apply(&self, v: &[F]) -> Vec<Series<F>> {
        let t_ord = self.t_order();
        (0..self.tgt.dim)
            .map(|i| {
                let mut c = vec![F::zero(); t_ord + 1];
                for (k, mat) in self.orders.iter().enumerate() {
                    for (j, x) in v.iter().enumerate() {
                        c[k] = c[k].clone() + mat[i][j].clone() * x.clone();
                    }
                }
                Series::from_coeffs(c)
            })
            .collect()
    }
}

/// Row and column labels of the extension system: (series order, row,
/// column) of an intertwiner coefficient.
type Lab = (usize, usize, usize);

fn acc_entry<F: Field>(col: &mut SparseVec<Lab, F>, lab: Lab, val: F) {
    if val.is_zero() {
        return;
    }
    let cur = col.remove(&lab).unwrap_or_else(F::zero);
    let s = cur + val;
    if !s.is_zero() {
        col.insert(lab, s);
    }
}

fn inconsistency_from_matrix<F: Field>(order: usize, d: &Mat<F>) -> ConnectionError {
    let mut entries = Vec::new();
    for (i, row) in d.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if !v.is_zero() {
                entries.push((i, j, format!("{v}")));
            }
        }
    }
    ConnectionError::Inconsistent { order, entries }
}

/// Extend the constant-term isomorphism `r0` to a series intertwiner from
/// `src` to `tgt`, solving `t^2 R' = R A_src - A_tgt R` order by order
/// through `t^t_order`.
///
/// The orders do not decouple when the two leading terms share
/// eigenvalues: an order-k coefficient can be pinned only by the
/// equations one or two orders higher. The solver therefore assembles
/// one exact linear system over all orders up to `t_order` plus a
/// padding margin, checks that no kernel vector of the padded system
/// touches the requested orders (retrying with a larger margin up to
/// two extra orders), and certifies the result: an inconsistent system
/// yields [`ConnectionError::Inconsistent`] with the first obstructed
/// order, and the returned series satisfies the identity exactly.
pub fn solve_intertwiner<F: Field>(
    src: &FormalConnection<F>,
    tgt: &FormalConnection<F>,
    r0: &Mat<F>,
    t_order: usize,
) -> Result<RMatrix<F>, ConnectionError> {
    let n = src.dim;
    if tgt.dim != n {
        return Err(ConnectionError::DimensionMismatch {
            left: n,
            right: tgt.dim,
        });
    }
    if r0.len() != n || r0.iter().any(|row| row.len() != n) {
        return Err(ConnectionError::DimensionMismatch {
            left: r0.len(),
            right: n,
        });
    }

    // The constant terms must already be intertwined by the seed.
    let d0 = mat_sub(&mat_mul(r0, &src.coeff(0)), &mat_mul(&tgt.coeff(0), r0));
    if !mat_is_zero(&d0) {
        return Err(inconsistency_from_matrix(0, &d0));
    }

    for pad in 2..=4 {
        let big = t_order + pad;
        let s: Vec<Mat<F>> = (0..=big).map(|k| src.coeff(k)).collect();
        let t: Vec<Mat<F>> = (0..=big).map(|k| tgt.coeff(k)).collect();

        // Unknowns R_m[a][b] for 1 <= m <= big; equation rows are the
        // entries of the order-k identity for 1 <= k <= big, with the
        // known R_0 terms moved to the right hand side.
        let mut rref: Rref<Lab, Lab, F> = Rref::new();
        let mut tainted = false;
        'cols: for m in 1..=big {
            for a in 0..n {
                for b in 0..n {
                    let mut col: SparseVec<Lab, F> = sv_zero();
                    for k in m..=big {
                        let i = k - m;
                        for j in 0..n {
                            acc_entry(&mut col, (k, a, j), s[i][b][j].clone());
                        }
                        for r in 0..n {
                            acc_entry(&mut col, (k, r, b), -t[i][r][a].clone());
                        }
                    }
                    if m + 1 <= big {
                        acc_entry(&mut col, (m + 1, a, b), F::from_i64(-(m as i64)));
                    }
                    if let Some(combo) = rref.push((m, a, b), col) {
                        if combo.keys().any(|(ord, _, _)| *ord <= t_order) {
                            tainted = true;
                            break 'cols;
                        }
                    }
                }
            }
        }
        if tainted {
            continue;
        }

        let mut rhs: SparseVec<Lab, F> = sv_zero();
        for k in 1..=big {
            let m = mat_sub(&mat_mul(&t[k], r0), &mat_mul(r0, &s[k]));
            for (i, row) in m.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    if !v.is_zero() {
                        rhs.insert((k, i, j), v.clone());
                    }
                }
            }
        }

        let (residue, x) = rref.reduce(&rhs);
        if !residue.is_empty() {
            let order = *residue.keys().map(|(k, _, _)| k).min().unwrap();
            let mut entries: Vec<(usize, usize, String)> = residue
                .iter()
                .filter(|((k, _, _), _)| *k == order)
                .map(|((_, i, j), v)| (*i, *j, format!("{v}")))
                .collect();
            entries.sort();
            return Err(ConnectionError::Inconsistent { order, entries });
        }

        let mut orders = vec![r0.clone()];
        for _ in 1..=t_order {
            orders.push(mat_zero(n, n));
        }
        for ((m, a, b), v) in &x {
            if *m <= t_order {
                orders[*m][*a][*b] = v.clone();
            }
        }
        let rm = RMatrix {
            src: src.clone(),
            tgt: tgt.clone(),
            orders,
        };
        let defect = rm.intertwining_defect(t_order);
        assert!(
            defect.iter().all(mat_is_zero),
            "solved intertwiner must satisfy the connection identity exactly"
        );
        return Ok(rm);
    }
    Err(ConnectionError::NotUniquelyDetermined { order: t_order })
}

/// Basis normalization along the eigenvalue blocks of the leading term.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockBasis<F: Field> {
    /// Distinct leading-term eigenvalues with their index blocks, in
    /// order of first appearance on the diagonal.
    pub blocks: Vec<(F, Vec<usize>)>,
    /// Gauge series `V_0 = 1, V_1, ...`; column j of `V(t)` is the
    /// extended basis vector starting at the j-th input basis vector.
    /// Every `V_k`, k >= 1, vanishes on the diagonal blocks, which is
    /// the normalization that pins the extension uniquely.
    pub gauge: Vec<Mat<F>>,
    /// The connection in the extended basis, through the same order.
    /// Every coefficient is block-diagonal; the constant term and the
    /// diagonal blocks of the linear term agree with the input.
    pub transformed: FormalConnection<F>,
}

/// Normalize `conn` along the eigenvalue blocks of its leading term.
///
/// The leading term must be block-diagonal over its diagonal values with
/// each block equal to eigenvalue plus nilpotent, and every gap between
/// distinct eigenvalues must be invertible; otherwise the corresponding
/// error is returned. The gauge is computed order by order: the
/// off-block part of `V_k` solves a commutator equation (a convergent
/// fixed-point iteration because the within-block parts are nilpotent)
/// and the diagonal-block part is set to zero.
pub fn extend_block_basis<F: Field>(
    conn: &FormalConnection<F>,
    t_order: usize,
) -> Result<BlockBasis<F>, ConnectionError> {
    let n = conn.dim;
    let a: Vec<Mat<F>> = (0..=t_order.max(conn.coeffs.len() - 1))
        .map(|k| conn.coeff(k))
        .collect();
    let a0 = &a[0];

    // Group equal diagonal values into blocks.
    let mut reps: Vec<F> = Vec::new();
    let mut block_id = vec![0usize; n];
    for i in 0..n {
        let d = a0[i][i].clone();
        match reps.iter().position(|r| *r == d) {
            Some(p) => block_id[i] = p,
            None => {
                block_id[i] = reps.len();
                reps.push(d);
            }
        }
    }
    let nblocks = reps.len();

    // Off-block entries of the leading term must vanish.
    for (i, row) in a0.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if block_id[i] != block_id[j] && !v.is_zero() {
                return Err(ConnectionError::BlockStructureBroken { row: i, col: j });
            }
        }
    }

    // Within-block off-diagonal parts must be nilpotent.
    let mut nil = mat_zero::<F>(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j && block_id[i] == block_id[j] {
                nil[i][j] = a0[i][j].clone();
            }
        }
    }
    let mut power = nil.clone();
    for _ in 1..n {
        power = mat_mul(&power, &nil);
    }
    for (i, row) in power.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if !v.is_zero() {
                return Err(ConnectionError::BlockStructureBroken { row: i, col: j });
            }
        }
    }

    // All eigenvalue gaps must be invertible.
    let mut gap_inv: Vec<Vec<Option<F>>> = vec![vec![None; nblocks]; nblocks];
    for bi in 0..nblocks {
        for bj in 0..nblocks {
            if bi == bj {
                continue;
            }
            let gap = reps[bi].clone() - reps[bj].clone();
            match gap.inv() {
                Some(g) => gap_inv[bi][bj] = Some(g),
                None => {
                    return Err(ConnectionError::GapNotInvertible {
                        gap: format!("{gap}"),
                    })
                }
            }
        }
    }

    let mut gauge: Vec<Mat<F>> = vec![mat_id(n)];
    let mut transformed: Vec<Mat<F>> = vec![a0.clone()];

    for k in 1..=t_order {
        // B_k collects every term of the order-k gauge identity except
        // the commutator with the leading term.
        let mut bk = mat_zero::<F>(n, n);
        for i in 1..=k {
            bk = mat_add(&bk, &mat_mul(&a[i], &gauge[k - i]));
        }
        bk = mat_add(&bk, &mat_scale(&gauge[k - 1], &F::from_i64(k as i64 - 1)));
        for i in 1..k {
            bk = mat_sub(&bk, &mat_mul(&gauge[i], &transformed[k - i]));
        }

        // Solve the off-block part of [A_0, V_k] = -B_k with V_k zero on
        // the diagonal blocks. The iteration stabilizes because the
        // within-block part of A_0 is nilpotent.
        let mut vk = mat_zero::<F>(n, n);
        let mut settled = false;
        for _pass in 0..(2 * n + 4) {
            let comm = mat_sub(&mat_mul(&nil, &vk), &mat_mul(&vk, &nil));
            let mut next = mat_zero::<F>(n, n);
            for i in 0..n {
                for j in 0..n {
                    if block_id[i] != block_id[j] {
                        let val = -(bk[i][j].clone()) - comm[i][j].clone();
                        next[i][j] = gap_inv[block_id[i]][block_id[j]]
                            .clone()
                            .expect("gap inverses exist for distinct blocks")
                            * val;
                    }
                }
            }
            if next == vk {
                settled = true;
                break;
            }
            vk = next;
        }
        assert!(settled, "gauge iteration must stabilize for nilpotent blocks");

        let at_k = mat_add(
            &mat_sub(&mat_mul(a0, &vk), &mat_mul(&vk, a0)),
            &bk,
        );
        for (i, row) in at_k.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                assert!(
                    block_id[i] == block_id[j] || v.is_zero(),
                    "transformed coefficients must be block-diagonal"
                );
            }
        }
        gauge.push(vk);
        transformed.push(at_k);
    }

    let mut blocks: Vec<(F, Vec<usize>)> = reps.into_iter().map(|r| (r, Vec::new())).collect();
    for (i, b) in block_id.iter().enumerate() {
        blocks[*b].1.push(i);
    }

    Ok(BlockBasis {
        blocks,
        gauge,
        transformed: FormalConnection::new(transformed),
    })
}

/// Basis labels for the quadrics quantum ring: the unit, the hyperplane
/// class and its higher cousins, then the four degree three classes.
pub const QUADRICS_BASIS: [&str; 8] = ["1", "h", "h4", "h6", "eta1", "eta2", "eta3", "eta4"];

/// Splitting basis of the even part: the two rank-one eigenvector
/// idempotent multiples, and the unit and nilpotent of the zero block.
pub const EVEN_BASIS: [&str; 4] = ["v1", "w", "v", "v4"];

/// Basis of the genus two side: the two exponential factors around the
/// quantum connection of the curve in the basis (-2H, 1).
pub const TARGET_BASIS: [&str; 4] = ["e+", "-2H", "1", "e-"];

/// Intersection pairing of the four degree three basis classes: the
/// first pairs with the third, the second with the fourth.
pub fn gamma_pairing(i: usize, j: usize) -> i64 {
    match (i, j) {
        (0, 2) | (1, 3) => 1,
        (2, 0) | (3, 1) => -1,
        _ => 0,
    }
}

/// Structure report for [`QuantumRing::verify`]; each field is one
/// machine-checked family of identities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingReport {
    pub unital: bool,
    pub graded_commutative: bool,
    pub associative: bool,
    pub pairing_invariant: bool,
    pub pairing_values: bool,
    pub zero_block_unit: bool,
    pub chern_eigenvalues: bool,
    pub quantum_filtration: bool,
}

impl RingReport {
    pub fn checks(&self) -> Vec<(&'static str, bool)> {
        vec![
            ("unital", self.unital),
            ("graded-commutative", self.graded_commutative),
            ("associative", self.associative),
            ("pairing-frobenius", self.pairing_invariant),
            ("pairing-values", self.pairing_values),
            ("zero-block-unit", self.zero_block_unit),
            ("chern-eigenvalues", self.chern_eigenvalues),
            ("quantum-filtration", self.quantum_filtration),
        ]
    }

    pub fn all(&self) -> bool {
        self.checks().iter().all(|(_, ok)| *ok)
    }
}

/// Small quantum ring data on a fixed basis: quantum and classical
/// product tables, cohomological degrees, grading eigenvalues, Poincare
/// pairing and first Chern class.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumRing<F: Field> {
    pub star_table: Vec<Vec<Vec<F>>>,
    pub cup_table: Vec<Vec<Vec<F>>>,
    pub degree: Vec<usize>,
    pub mu: Vec<F>,
    pub pairing: Mat<F>,
    pub c1: Vec<F>,
}

fn set_sym<F: Field>(tab: &mut [Vec<Vec<F>>], i: usize, j: usize, terms: &[(usize, i64)]) {
    let mut v = vec![F::zero(); tab.len()];
    for (k, c) in terms {
        v[*k] = F::from_i64(*c);
    }
    tab[i][j] = v.clone();
    tab[j][i] = v;
}

impl<F: Field> QuantumRing<F> {
    /// The quantum ring of the intersection of two quadric fourfolds in
    /// projective five-space, over any coefficient field in which two is
    /// invertible. Basis: 1, the hyperplane class h, one generator in
    /// each of degrees four and six normalized against h, and four
    /// degree three classes with the intersection pairing of
    /// [`gamma_pairing`].
    pub fn quadrics() -> Self {
        let n = 8;
        let zero_row = || vec![F::zero(); n];
        let mut star = vec![vec![zero_row(); n]; n];
        let mut cup = vec![vec![zero_row(); n]; n];
        for j in 0..n {
            let mut e = zero_row();
            e[j] = F::one();
            star[0][j] = e.clone();
            star[j][0] = e.clone();
            cup[0][j] = e.clone();
            cup[j][0] = e;
        }
        // Quantum products of the even generators.
        set_sym(&mut star, 1, 1, &[(2, 4), (0, 4)]);
        set_sym(&mut star, 1, 2, &[(3, 1), (1, 2)]);
        set_sym(&mut star, 1, 3, &[(2, 4), (0, 4)]);
        set_sym(&mut star, 2, 2, &[(2, 2), (0, 3)]);
        set_sym(&mut star, 2, 3, &[(1, 3)]);
        set_sym(&mut star, 3, 3, &[(2, 4), (0, 4)]);
        // The degree four generator acts as minus one on the degree
        // three classes; h and the degree six generator annihilate them.
        for e in 0..4 {
            set_sym(&mut star, 2, 4 + e, &[(4 + e, -1)]);
        }
        // Odd times odd lands in the even part through the intersection
        // pairing.
        for i in 0..4 {
            for j in 0..4 {
                let g = gamma_pairing(i, j);
                if g != 0 {
                    let mut v = zero_row();
                    v[3] = F::from_i64(g);
                    v[1] = F::from_i64(-g);
                    star[4 + i][4 + j] = v;
                }
            }
        }
        // Classical products: the graded pieces of the quantum ones.
        set_sym(&mut cup, 1, 1, &[(2, 4)]);
        set_sym(&mut cup, 1, 2, &[(3, 1)]);
        for i in 0..4 {
            for j in 0..4 {
                let g = gamma_pairing(i, j);
                if g != 0 {
                    let mut v = zero_row();
                    v[3] = F::from_i64(g);
                    cup[4 + i][4 + j] = v;
                }
            }
        }

        let degree = vec![0, 2, 4, 6, 3, 3, 3, 3];
        let mu = vec![
            frac::<F>(-3, 2),
            frac::<F>(-1, 2),
            frac::<F>(1, 2),
            frac::<F>(3, 2),
            F::zero(),
            F::zero(),
            F::zero(),
            F::zero(),
        ];
        let mut pairing = mat_zero::<F>(n, n);
        pairing[0][3] = F::one();
        pairing[3][0] = F::one();
        pairing[1][2] = F::one();
        pairing[2][1] = F::one();
        for i in 0..4 {
            for j in 0..4 {
                pairing[4 + i][4 + j] = F::from_i64(gamma_pairing(i, j));
            }
        }
        let mut c1 = vec![F::zero(); n];
        c1[1] = F::from_i64(2);

        QuantumRing {
            star_table: star,
            cup_table: cup,
            degree,
            mu,
            pairing,
            c1,
        }
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    fn bilinear(&self, tab: &[Vec<Vec<F>>], x: &[F], y: &[F]) -> Vec<F> {
        let n = self.dim();
        let mut out = vec![F::zero(); n];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let c = xi.clone() * yj.clone();
                for (k, t) in tab[i][j].iter().enumerate() {
                    out[k] = out[k].clone() + c.clone() * t.clone();
                }
            }
        }
        out
    }

    pub fn star(&self, x: &[F], y: &[F]) -> Vec<F> {
        self.bilinear(&self.star_table, x, y)
    }

    pub fn cup(&self, x: &[F], y: &[F]) -> Vec<F> {
        self.bilinear(&self.cup_table, x, y)
    }

    pub fn pair(&self, x: &[F], y: &[F]) -> F {
        let mut acc = F::zero();
        for (i, xi) in x.iter().enumerate() {
            for (j, yj) in y.iter().enumerate() {
                acc = acc + xi.clone() * self.pairing[i][j].clone() * yj.clone();
            }
        }
        acc
    }

    /// Matrix of quantum multiplication by `x` (columns are images of
    /// the basis).
    pub fn star_matrix(&self, x: &[F]) -> Mat<F> {
        let n = self.dim();
        let mut m = mat_zero::<F>(n, n);
        for j in 0..n {
            let mut e = vec![F::zero(); n];
            e[j] = F::one();
            let col = self.star(x, &e);
            for (i, v) in col.into_iter().enumerate() {
                m[i][j] = v;
            }
        }
        m
    }

    pub fn c1_matrix(&self) -> Mat<F> {
        self.star_matrix(&self.c1)
    }

    pub fn mu_matrix(&self) -> Mat<F> {
        let n = self.dim();
        let mut m = mat_zero::<F>(n, n);
        for (i, v) in self.mu.iter().enumerate() {
            m[i][i] = v.clone();
        }
        m
    }

    /// Quantum connection `d/dt + (-c1* + mu t)/t^2` in the ring basis.
    pub fn quantum_connection(&self) -> FormalConnection<F> {
        let c = self.c1_matrix();
        FormalConnection::new(vec![mat_scale(&c, &F::from_i64(-1)), self.mu_matrix()])
    }

    /// Eigenvector of quantum multiplication by c1 with eigenvalue -8.
    pub fn chern_eigenvector_neg(&self) -> Vec<F> {
        vec![
            F::one(),
            frac::<F>(-3, 4),
            F::one(),
            frac::<F>(-1, 4),
            F::zero(),
            F::zero(),
            F::zero(),
            F::zero(),
        ]
    }

    /// Eigenvector of quantum multiplication by c1 with eigenvalue 8.
    pub fn chern_eigenvector_pos(&self) -> Vec<F> {
        vec![
            F::one(),
            frac::<F>(3, 4),
            F::one(),
            frac::<F>(1, 4),
            F::zero(),
            F::zero(),
            F::zero(),
            F::zero(),
        ]
    }

    /// Idempotent projecting onto the kernel summand of quantum
    /// multiplication by c1; it is the unit of that summand.
    pub fn even_zero_idempotent(&self) -> Vec<F> {
        vec![
            frac::<F>(3, 4),
            F::zero(),
            frac::<F>(-1, 4),
            F::zero(),
            F::zero(),
            F::zero(),
            F::zero(),
            F::zero(),
        ]
    }

    /// Even nilpotent direction of the kernel summand, normalized so it
    /// pairs to 4 with the idempotent.
    pub fn even_zero_nilpotent(&self) -> Vec<F> {
        vec![
            F::zero(),
            F::from_i64(-4),
            F::zero(),
            F::from_i64(4),
            F::zero(),
            F::zero(),
            F::zero(),
            F::zero(),
        ]
    }

    /// Columns: the eigenvector for -8, the zero-block vectors (the
    /// idempotent, the degree three classes, the nilpotent), then the
    /// eigenvector for 8. In this basis the leading term of the quantum
    /// connection is block-diagonal with blocks of sizes 1, 6, 1.
    pub fn eigen_basis(&self) -> Mat<F> {
        let n = self.dim();
        let mut cols: Vec<Vec<F>> = Vec::with_capacity(n);
        cols.push(self.chern_eigenvector_neg());
        cols.push(self.even_zero_idempotent());
        for e in 0..4 {
            let mut v = vec![F::zero(); n];
            v[4 + e] = F::one();
            cols.push(v);
        }
        cols.push(self.even_zero_nilpotent());
        cols.push(self.chern_eigenvector_pos());
        let mut m = mat_zero::<F>(n, n);
        for (j, col) in cols.into_iter().enumerate() {
            for (i, v) in col.into_iter().enumerate() {
                m[i][j] = v;
            }
        }
        m
    }

    /// The quantum connection in the basis of [`Self::eigen_basis`].
    pub fn eigen_connection(&self) -> FormalConnection<F> {
        self.quantum_connection()
            .conjugate(&self.eigen_basis())
            .expect("the eigenvalue basis is invertible")
    }

    /// Change of basis on the even part (coordinates over 1, h, and the
    /// degree four and six generators): columns are the -8 eigenvector,
    /// the nilpotent, the idempotent, and the 8 eigenvector.
    pub fn even_basis(&self) -> Mat<F> {
        let cols = [
            self.chern_eigenvector_neg(),
            self.even_zero_nilpotent(),
            self.even_zero_idempotent(),
            self.chern_eigenvector_pos(),
        ];
        let mut m = mat_zero::<F>(4, 4);
        for (j, col) in cols.iter().enumerate() {
            for i in 0..4 {
                m[i][j] = col[i].clone();
            }
        }
        m
    }

    /// Even part of the quantum connection in the splitting basis of
    /// [`Self::even_basis`]. The even part is closed under quantum
    /// multiplication by c1 and under the grading, so this is a
    /// connection of rank four.
    pub fn even_connection(&self) -> FormalConnection<F> {
        let c = self.c1_matrix();
        let mut c_even = mat_zero::<F>(4, 4);
        for i in 0..4 {
            for j in 0..4 {
                c_even[i][j] = c[i][j].clone();
            }
        }
        let mut mu_even = mat_zero::<F>(4, 4);
        for i in 0..4 {
            mu_even[i][i] = self.mu[i].clone();
        }
        FormalConnection::new(vec![mat_scale(&c_even, &F::from_i64(-1)), mu_even])
            .conjugate(&self.even_basis())
            .expect("the even splitting basis is invertible")
    }

    /// Machine verification of the ring structure: unitality, graded
    /// commutativity, associativity of both products over every basis
    /// triple, invariance of the pairing, the splitting of quantum
    /// multiplication by c1 into eigenvalues -8, 0, 8 with ranks
    /// 1, 6, 1, and the statement that the quantum product deforms the
    /// classical one by terms whose degree drops by a positive multiple
    /// of four.
    pub fn verify(&self) -> RingReport {
        let n = self.dim();
        let basis: Vec<Vec<F>> = (0..n)
            .map(|i| {
                let mut e = vec![F::zero(); n];
                e[i] = F::one();
                e
            })
            .collect();

        let mut unital = true;
        for j in 0..n {
            unital &= self.star_table[0][j] == basis[j]
                && self.star_table[j][0] == basis[j]
                && self.cup_table[0][j] == basis[j]
                && self.cup_table[j][0] == basis[j];
        }

        let mut graded_commutative = true;
        for i in 0..n {
            for j in 0..n {
                let sign = if self.degree[i] % 2 == 1 && self.degree[j] % 2 == 1 {
                    -1
                } else {
                    1
                };
                let flip: Vec<F> = self.star_table[j][i]
                    .iter()
                    .map(|x| x.clone() * F::from_i64(sign))
                    .collect();
                graded_commutative &= self.star_table[i][j] == flip;
                let flip_cup: Vec<F> = self.cup_table[j][i]
                    .iter()
                    .map(|x| x.clone() * F::from_i64(sign))
                    .collect();
                graded_commutative &= self.cup_table[i][j] == flip_cup;
            }
        }

        let mut associative = true;
        let mut pairing_invariant = true;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let left = self.star(&self.star_table[i][j], &basis[k]);
                    let right = self.star(&basis[i], &self.star_table[j][k]);
                    associative &= left == right;
                    let cl = self.cup(&self.cup_table[i][j], &basis[k]);
                    let cr = self.cup(&basis[i], &self.cup_table[j][k]);
                    associative &= cl == cr;
                    pairing_invariant &= self.pair(&self.star_table[i][j], &basis[k])
                        == self.pair(&basis[i], &self.star_table[j][k]);
                }
            }
        }

        let v = self.even_zero_idempotent();
        let w = self.even_zero_nilpotent();
        let v1 = self.chern_eigenvector_neg();
        let v4 = self.chern_eigenvector_pos();
        let zero = vec![F::zero(); n];

        let mut pairing_values = self.pair(&v, &v).is_zero()
            && self.pair(&w, &w).is_zero()
            && self.pair(&v, &w) == F::from_i64(4);
        pairing_values &= mat_inv(&self.pairing).is_some();
        for i in 0..n {
            for j in 0..n {
                let sign = if self.degree[i] % 2 == 1 && self.degree[j] % 2 == 1 {
                    F::from_i64(-1)
                } else {
                    F::one()
                };
                pairing_values &=
                    self.pairing[i][j] == sign * self.pairing[j][i].clone();
            }
        }

        let mut zero_block_unit = self.star(&v, &v) == v && self.star(&v, &w) == w;
        for e in 0..4 {
            zero_block_unit &= self.star(&v, &basis[4 + e]) == basis[4 + e];
        }
        zero_block_unit &= self.star(&v, &v1) == zero && self.star(&v, &v4) == zero;

        let c = self.c1_matrix();
        let scale_vec = |x: &[F], s: i64| -> Vec<F> {
            x.iter().map(|t| t.clone() * F::from_i64(s)).collect()
        };
        let mut chern_eigenvalues = mat_apply(&c, &v1) == scale_vec(&v1, -8)
            && mat_apply(&c, &v4) == scale_vec(&v4, 8)
            && mat_apply(&c, &w) == zero;
        for e in 0..4 {
            chern_eigenvalues &= mat_apply(&c, &basis[4 + e]) == zero;
        }
        let cv = mat_apply(&c, &v);
        let minus_w_eighth: Vec<F> = w.iter().map(|t| t.clone() * frac::<F>(-1, 8)).collect();
        chern_eigenvalues &= cv == minus_w_eighth;
        chern_eigenvalues &= mat_inv(&self.eigen_basis()).is_some();

        let mut quantum_filtration = true;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if !self.cup_table[i][j][k].is_zero() {
                        quantum_filtration &=
                            self.degree[k] == self.degree[i] + self.degree[j];
                    }
                    let diff =
                        self.star_table[i][j][k].clone() - self.cup_table[i][j][k].clone();
                    if !diff.is_zero() {
                        let total = self.degree[i] + self.degree[j];
                        quantum_filtration &= self.degree[k] < total
                            && (total - self.degree[k]) % 4 == 0;
                    }
                }
            }
        }

        RingReport {
            unital,
            graded_commutative,
            associative,
            pairing_invariant,
            pairing_values,
            zero_block_unit,
            chern_eigenvalues,
            quantum_filtration,
        }
    }
}

/// Quantum connection of the comparison side: one exponential factor for
/// each nonzero eigenvalue around the quantum connection of a genus two
/// curve. The curve part is written in the basis (-2H, 1): the first
/// Chern class is -2H, quantum multiplication by it sends 1 to -2H and
/// -2H to zero (its square is a degree four class on a curve, hence
/// zero, and there are no quantum corrections), and the grading
/// eigenvalues are 1/2 and -1/2.
pub fn genus_two_target<F: Field>() -> FormalConnection<F> {
    let curve = FormalConnection::new(vec![
        vec![
            vec![F::zero(), F::from_i64(-1)],
            vec![F::zero(), F::zero()],
        ],
        vec![
            vec![frac::<F>(1, 2), F::zero()],
            vec![F::zero(), frac::<F>(-1, 2)],
        ],
    ]);
    FormalConnection::direct_sum(&[
        FormalConnection::rank_one(F::from_i64(8)),
        curve,
        FormalConnection::rank_one(F::from_i64(-8)),
    ])
}

/// Frozen comparison data between the quadrics side and the genus two
/// side. These values are input, not derived here: they record the
/// normalization of the comparison maps for one choice `epsilon` of the
/// square root of minus one, and everything computed from them is
/// conditional on that normalization.
#[derive(Clone, Debug, PartialEq)]
pub struct MirrorFixture {
    pub epsilon: i64,
    /// `epsilon * sqrt(-1)` as a Gaussian rational.
    pub root: GaussRat,
    /// Constant term of the intertwiner in the bases [`EVEN_BASIS`] to
    /// [`TARGET_BASIS`].
    pub constant_term: Mat<GaussRat>,
    /// Projection from [`TARGET_BASIS`] coordinates onto the curve
    /// factor in the basis (-2H, 1).
    pub projection: Mat<GaussRat>,
    /// The unit of the quadrics ring in [`EVEN_BASIS`] coordinates.
    pub unit_coords: Vec<GaussRat>,
    /// Closed-open comparison on the zero block: columns are the images
    /// of the idempotent and the nilpotent in curve coordinates (1, H).
    pub theta_even: Mat<GaussRat>,
    /// The ring-level comparison on the same vectors; it differs from
    /// the module-level one by the factor `-2 * root`.
    pub xi_even: Mat<GaussRat>,
    /// Comparison on the degree three classes against the curve's degree
    /// one basis; an anti-symplectic involution for [`gamma_pairing`].
    pub theta_odd: Mat<GaussRat>,
}

fn gq(n: i64, d: i64) -> GaussRat {
    GaussRat::from_rat(crate::scalars::rat(n, d))
}

fn gqi(n: i64, d: i64, epsilon: i64) -> GaussRat {
    GaussRat::new(<Rat as Field>::zero(), crate::scalars::rat(n * epsilon, d))
}

/// Build the comparison data for `epsilon` in `{1, -1}`.
pub fn mirror_fixture(epsilon: i64) -> MirrorFixture {
    assert!(epsilon == 1 || epsilon == -1, "epsilon is a sign");
    let root = gqi(1, 1, epsilon);
    let zero = GaussRat::zero;
    let mut constant_term = mat_zero::<GaussRat>(4, 4);
    constant_term[0][0] = gqi(1, 1, epsilon);
    constant_term[1][1] = gqi(-4, 1, epsilon);
    constant_term[2][2] = gqi(1, 2, epsilon);
    constant_term[3][3] = gqi(1, 1, epsilon);
    let projection = vec![
        vec![zero(), GaussRat::one(), zero(), zero()],
        vec![zero(), zero(), GaussRat::one(), zero()],
    ];
    let unit_coords = vec![gq(1, 8), zero(), gq(1, 1), gq(1, 8)];
    // Images of the idempotent and nilpotent in coordinates (1, H).
    let theta_even = vec![
        vec![gqi(1, 2, epsilon), zero()],
        vec![zero(), gqi(8, 1, epsilon)],
    ];
    let xi_even = vec![
        vec![gq(1, 1), zero()],
        vec![zero(), gq(16, 1)],
    ];
    let mut theta_odd = mat_zero::<GaussRat>(4, 4);
    theta_odd[0][0] = gq(1, 1);
    theta_odd[1][1] = gq(1, 1);
    theta_odd[2][2] = gq(-1, 1);
    theta_odd[3][3] = gq(-1, 1);
    MirrorFixture {
        epsilon,
        root,
        constant_term,
        projection,
        unit_coords,
        theta_even,
        xi_even,
        theta_odd,
    }
}

/// Frozen reference values of the even-part intertwiner through `t^4`,
/// stored as rational multiples of `epsilon * sqrt(-1)` with signs
/// folded in. `solve_intertwiner` reproduces all five orders from the
/// constant term alone; the CLI diff mode compares against this table.
const REFERENCE_INTERTWINER: [[[(i64, i64); 4]; 4]; 5] = [
    [
        [(1, 1), (0, 1), (0, 1), (0, 1)],
        [(0, 1), (-4, 1), (0, 1), (0, 1)],
        [(0, 1), (0, 1), (1, 2), (0, 1)],
        [(0, 1), (0, 1), (0, 1), (1, 1)],
    ],
    [
        [(7, 64), (-1, 2), (-1, 32), (0, 1)],
        [(-1, 16), (0, 1), (5, 512), (-1, 16)],
        [(1, 8), (2, 1), (0, 1), (-1, 8)],
        [(0, 1), (-1, 2), (1, 32), (-7, 64)],
    ],
    [
        [(-15, 8192), (-7, 128), (9, 2048), (1, 1024)],
        [(-27, 2048), (7, 128), (0, 1), (27, 2048)],
        [(1, 32), (0, 1), (-3, 512), (1, 32)],
        [(1, 1024), (7, 128), (9, 2048), (-15, 8192)],
    ],
    [
        [(389, 524288), (135, 16384), (-393, 262144), (-65, 65536)],
        [(-33, 8192), (0, 1), (435, 1048576), (-33, 8192)],
        [(9, 2048), (-3, 128), (0, 1), (-9, 2048)],
        [(65, 65536), (135, 16384), (393, 262144), (-389, 524288)],
    ],
    [
        [
            (-38421, 134217728),
            (-3069, 1048576),
            (11907, 16777216),
            (3537, 8388608),
        ],
        [(-7533, 4194304), (999, 262144), (0, 1), (7533, 4194304)],
        [(9, 8192), (0, 1), (-63, 524288), (9, 8192)],
        [
            (3537, 8388608),
            (3069, 1048576),
            (11907, 16777216),
            (-38421, 134217728),
        ],
    ],
];

/// The reference intertwiner orders `R_0 .. R_4` for a sign choice.
pub fn reference_even_intertwiner(epsilon: i64) -> Vec<Mat<GaussRat>> {
    assert!(epsilon == 1 || epsilon == -1, "epsilon is a sign");
    REFERENCE_INTERTWINER
        .iter()
        .map(|m| {
            m.iter()
                .map(|row| row.iter().map(|(n, d)| gqi(*n, *d, epsilon)).collect())
                .collect()
        })
        .collect()
}

/// Output of the quantum power series pipeline on the degree three
/// classes of the quadrics threefold.
#[derive(Clone, Debug, PartialEq)]
pub struct OddClassSeries {
    pub prime: u64,
    /// `(p - 1) / 2`, the power of t in front of the whole operation.
    pub t_power: usize,
    /// The normalized coefficient series; independent of the square
    /// root normalization, with rational coefficients. Its constant
    /// term is 1.
    pub c_series: Series<Rat>,
    /// `(-1)^{(p-1)/2} ((p-1)/2)! t^{(p-1)/2}` times the coefficient
    /// series: the scalar series multiplying each degree three class.
    pub assembled: Series<Rat>,
    /// Orders of `assembled` whose coefficient is nonzero in
    /// characteristic zero yet divisible by p.
    pub p_divisible: Vec<usize>,
}

/// Run the comparison pipeline for an odd prime: solve the intertwiner
/// for both square-root normalizations, push the unit through it,
/// project onto the unit coordinate of the curve factor, and assemble
/// the power-operation series. Verifies that the two normalizations
/// agree and that the series is real.
pub fn odd_class_series(prime: u64, t_order: usize) -> Result<OddClassSeries, ConnectionError> {
    if prime < 3 || prime % 2 == 0 {
        return Err(ConnectionError::OddPrimeRequired { given: prime });
    }
    if t_order < 4 {
        return Err(ConnectionError::TruncationTooSmall {
            given: t_order,
            needed: 4,
        });
    }

    let mut c_series: Option<Series<Rat>> = None;
    for epsilon in [1i64, -1] {
        let ring: QuantumRing<GaussRat> = QuantumRing::quadrics();
        let src = ring.even_connection();
        let tgt = genus_two_target::<GaussRat>();
        let fixture = mirror_fixture(epsilon);
        let r = solve_intertwiner(&src, &tgt, &fixture.constant_term, t_order)?;
        let images = r.apply(&fixture.unit_coords);
        // Unit coordinate of the curve factor, then the normalization
        // factor -2 * root; root^2 = -1 makes the result rational.
        let unit_row = images[2].clone();
        let scaled = unit_row.scale(&(GaussRat::from_i64(-2) * fixture.root.clone()));
        for k in 0..=t_order {
            if !scaled.coeff(k).is_real() {
                return Err(ConnectionError::ComplexResidue { order: k });
            }
        }
        let real = scaled.map(|g| g.re.clone());
        match &c_series {
            None => c_series = Some(real),
            Some(prev) => {
                if *prev != real {
                    let order = (0..=t_order)
                        .find(|k| prev.coeff(*k) != real.coeff(*k))
                        .unwrap_or(t_order);
                    return Err(ConnectionError::EpsilonDependent { order });
                }
            }
        }
    }
    let c_series = c_series.expect("both normalizations ran");

    let t_power = ((prime - 1) / 2) as usize;
    let mut factorial = <Rat as Field>::one();
    for k in 2..=t_power as i64 {
        factorial = factorial * <Rat as Field>::from_i64(k);
    }
    let sign = if t_power % 2 == 1 {
        <Rat as Field>::from_i64(-1)
    } else {
        <Rat as Field>::one()
    };
    let scale = sign * factorial;
    let mut assembled = Series::<Rat>::zero(t_order + t_power);
    for k in 0..=t_order {
        assembled.c[t_power + k] = scale.clone() * c_series.coeff(k);
    }
    let p_divisible: Vec<usize> = (0..=assembled.order())
        .filter(|k| {
            crate::scalars::rat_val_p(&assembled.coeff(*k), prime).is_some_and(|v| v >= 1)
        })
        .collect();

    Ok(OddClassSeries {
        prime,
        t_power,
        c_series,
        assembled,
        p_divisible,
    })
}

/// Basis labels for the cohomology of a genus two surface: the unit,
/// four degree one classes with intersection pairing [`gamma_pairing`],
/// and the point class.
pub const SURFACE_BASIS: [&str; 6] = ["1", "a1", "a2", "a3", "a4", "H"];

/// Cup product on the genus two surface in [`SURFACE_BASIS`]
/// coordinates.
pub fn surface_cup<F: Field>(x: &[F], y: &[F]) -> Vec<F> {
    let mut out = vec![F::zero(); 6];
    out[0] = x[0].clone() * y[0].clone();
    for e in 0..4 {
        out[1 + e] =
            x[0].clone() * y[1 + e].clone() + x[1 + e].clone() * y[0].clone();
    }
    let mut top = x[0].clone() * y[5].clone() + x[5].clone() * y[0].clone();
    for i in 0..4 {
        for j in 0..4 {
            let g = gamma_pairing(i, j);
            if g != 0 {
                top = top + F::from_i64(g) * x[1 + i].clone() * y[1 + j].clone();
            }
        }
    }
    out[5] = top;
    out
}

/// Matrix of cup multiplication by `x` on the surface basis.
pub fn surface_cup_matrix<F: Field>(x: &[F]) -> Mat<F> {
    let mut m = mat_zero::<F>(6, 6);
    for j in 0..6 {
        let mut e = vec![F::zero(); 6];
        e[j] = F::one();
        let col = surface_cup(x, &e);
        for (i, v) in col.into_iter().enumerate() {
            m[i][j] = v;
        }
    }
    m
}

/// The classical p-th power operation of a degree one class on the
/// genus two surface: a single matrix in front of one power of t.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfacePower<F: Field> {
    pub prime: u64,
    /// `(p - 1) / 2`.
    pub t_power: usize,
    /// `((p-1)/2)!` times cup multiplication by the coefficientwise
    /// Frobenius twist of the input class.
    pub matrix: Mat<F>,
}

/// Classical power operation on the surface for a degree one class `y`
/// given by its four coordinates on the degree one basis. The
/// coefficient field must have characteristic `prime`.
pub fn surface_steenrod<F: Field>(
    y: &[F],
    prime: u64,
) -> Result<SurfacePower<F>, ConnectionError> {
    if prime < 3 || prime % 2 == 0 {
        return Err(ConnectionError::OddPrimeRequired { given: prime });
    }
    if F::characteristic() != prime {
        return Err(ConnectionError::CharacteristicMismatch {
            field: F::characteristic(),
            prime,
        });
    }
    assert_eq!(y.len(), 4, "a degree one class has four coordinates");
    let mut twisted = vec![F::zero(); 6];
    for (e, c) in y.iter().enumerate() {
        twisted[1 + e] = c.frobenius();
    }
    let t_power = ((prime - 1) / 2) as usize;
    let mut factorial = F::one();
    for k in 2..=t_power as i64 {
        factorial = factorial * F::from_i64(k);
    }
    let matrix = mat_scale(&surface_cup_matrix(&twisted), &factorial);
    Ok(SurfacePower {
        prime,
        t_power,
        matrix,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{rat, rat_mod, Fp, FpI};
    use proptest::prelude::*;

    type F3 = Fp<3>;
    type F5 = Fp<5>;
    type F11 = Fp<11>;

    fn rv(entries: &[(i64, i64)]) -> Vec<Rat> {
        entries.iter().map(|(n, d)| rat(*n, *d)).collect()
    }

    fn rmat(rows: &[&[(i64, i64)]]) -> Mat<Rat> {
        rows.iter().map(|r| rv(r)).collect()
    }

    fn ring_checks_pass<F: Field>() {
        let ring: QuantumRing<F> = QuantumRing::quadrics();
        let report = ring.verify();
        for (name, ok) in report.checks() {
            assert!(ok, "ring check failed: {name}");
        }
    }

    #[test]
    fn quadrics_ring_passes_every_structural_check() {
        ring_checks_pass::<Rat>();
        ring_checks_pass::<GaussRat>();
        ring_checks_pass::<F3>();
        ring_checks_pass::<F5>();
        ring_checks_pass::<F11>();
    }

    #[test]
    fn quadrics_products_match_the_recorded_table() {
        let ring: QuantumRing<Rat> = QuantumRing::quadrics();
        let e = |i: usize| -> Vec<Rat> {
            let mut v = vec![<Rat as Field>::zero(); 8];
            v[i] = <Rat as Field>::one();
            v
        };
        let combo = |terms: &[(usize, i64)]| -> Vec<Rat> {
            let mut v = vec![<Rat as Field>::zero(); 8];
            for (k, c) in terms {
                v[*k] = <Rat as Field>::from_i64(*c);
            }
            v
        };
        assert_eq!(ring.star(&e(1), &e(1)), combo(&[(2, 4), (0, 4)]));
        assert_eq!(ring.star(&e(1), &e(2)), combo(&[(3, 1), (1, 2)]));
        assert_eq!(ring.star(&e(1), &e(3)), combo(&[(2, 4), (0, 4)]));
        assert_eq!(ring.star(&e(2), &e(2)), combo(&[(2, 2), (0, 3)]));
        assert_eq!(ring.star(&e(2), &e(3)), combo(&[(1, 3)]));
        assert_eq!(ring.star(&e(3), &e(3)), combo(&[(2, 4), (0, 4)]));
        assert_eq!(ring.star(&e(2), &e(5)), combo(&[(5, -1)]));
        assert_eq!(ring.star(&e(4), &e(6)), combo(&[(3, 1), (1, -1)]));
        assert_eq!(ring.star(&e(6), &e(4)), combo(&[(3, -1), (1, 1)]));
        assert_eq!(ring.star(&e(4), &e(5)), combo(&[]));
        assert_eq!(ring.cup(&e(1), &e(1)), combo(&[(2, 4)]));
        assert_eq!(ring.cup(&e(1), &e(2)), combo(&[(3, 1)]));
        assert_eq!(ring.cup(&e(4), &e(6)), combo(&[(3, 1)]));
        assert_eq!(ring.cup(&e(2), &e(2)), combo(&[]));

        // Multiplication by c1 chains the splitting vectors.
        let c = ring.c1_matrix();
        let v = ring.even_zero_idempotent();
        let w = ring.even_zero_nilpotent();
        let minus_w_eighth: Vec<Rat> = w.iter().map(|t| t.clone() * rat(-1, 8)).collect();
        assert_eq!(mat_apply(&c, &v), minus_w_eighth);
        assert_eq!(ring.pair(&v, &w), rat(4, 1));
    }

    #[test]
    fn even_connection_matches_the_hand_conjugation() {
        let ring: QuantumRing<Rat> = QuantumRing::quadrics();
        let conn = ring.even_connection();
        let a0 = rmat(&[
            &[(8, 1), (0, 1), (0, 1), (0, 1)],
            &[(0, 1), (0, 1), (1, 8), (0, 1)],
            &[(0, 1), (0, 1), (0, 1), (0, 1)],
            &[(0, 1), (0, 1), (0, 1), (-8, 1)],
        ]);
        let a1 = rmat(&[
            &[(0, 1), (-4, 1), (-3, 16), (0, 1)],
            &[(-3, 32), (1, 1), (0, 1), (3, 32)],
            &[(-2, 1), (0, 1), (-1, 1), (-2, 1)],
            &[(0, 1), (4, 1), (-3, 16), (0, 1)],
        ]);
        assert_eq!(conn.coeffs.len(), 2);
        assert_eq!(conn.coeffs[0], a0);
        assert_eq!(conn.coeffs[1], a1);

        // The unit decomposes over the splitting basis with the stored
        // fixture coordinates.
        let basis = ring.even_basis();
        let unit = mat_apply(
            &basis,
            &rv(&[(1, 8), (0, 1), (1, 1), (1, 8)]),
        );
        assert_eq!(unit, rv(&[(1, 1), (0, 1), (0, 1), (0, 1)]));
    }

    #[test]
    fn block_basis_extension_fixes_a_diagonal_connection() {
        let a0 = rmat(&[
            &[(0, 1), (0, 1), (0, 1)],
            &[(0, 1), (1, 1), (0, 1)],
            &[(0, 1), (0, 1), (3, 1)],
        ]);
        let a1 = rmat(&[
            &[(5, 1), (0, 1), (0, 1)],
            &[(0, 1), (7, 1), (0, 1)],
            &[(0, 1), (0, 1), (11, 1)],
        ]);
        let conn = FormalConnection::new(vec![a0.clone(), a1.clone()]);
        let ext = extend_block_basis(&conn, 3).unwrap();
        assert_eq!(
            ext.blocks,
            vec![
                (rat(0, 1), vec![0]),
                (rat(1, 1), vec![1]),
                (rat(3, 1), vec![2])
            ]
        );
        assert_eq!(ext.gauge[0], mat_id::<Rat>(3));
        for k in 1..=3 {
            assert!(mat_is_zero(&ext.gauge[k]));
        }
        assert_eq!(ext.transformed.coeff(0), a0);
        assert_eq!(ext.transformed.coeff(1), a1);
        assert!(mat_is_zero(&ext.transformed.coeff(2)));
        assert!(mat_is_zero(&ext.transformed.coeff(3)));
    }

    #[test]
    fn block_basis_extension_normalizes_the_quadrics_connection() {
        let ring: QuantumRing<Rat> = QuantumRing::quadrics();
        let conn = ring.eigen_connection();
        let ext = extend_block_basis(&conn, 4).unwrap();

        let sizes: Vec<usize> = ext.blocks.iter().map(|(_, ix)| ix.len()).collect();
        assert_eq!(sizes, vec![1, 6, 1]);
        assert_eq!(ext.blocks[0].0, rat(8, 1));
        assert_eq!(ext.blocks[1].0, rat(0, 1));
        assert_eq!(ext.blocks[2].0, rat(-8, 1));

        let block_of = |i: usize| -> usize {
            ext.blocks.iter().position(|(_, ix)| ix.contains(&i)).unwrap()
        };
        assert_eq!(ext.gauge[0], mat_id::<Rat>(8));
        for k in 1..=4 {
            for i in 0..8 {
                for j in 0..8 {
                    if block_of(i) == block_of(j) {
                        assert!(
                            ext.gauge[k][i][j].is_zero(),
                            "gauge must vanish on diagonal blocks"
                        );
                    }
                }
            }
        }
        assert_eq!(ext.transformed.coeff(0), conn.coeff(0));
        for k in 0..=4 {
            let m = ext.transformed.coeff(k);
            for i in 0..8 {
                for j in 0..8 {
                    if block_of(i) != block_of(j) {
                        assert!(m[i][j].is_zero(), "transformed must be block-diagonal");
                    }
                }
            }
        }
        // Diagonal blocks of the linear term survive the normalization.
        let a1 = conn.coeff(1);
        let t1 = ext.transformed.coeff(1);
        for i in 0..8 {
            for j in 0..8 {
                if block_of(i) == block_of(j) {
                    assert_eq!(a1[i][j], t1[i][j]);
                }
            }
        }
        // The gauge is a genuine intertwiner from the normalized
        // connection back to the input one.
        let rm = RMatrix {
            src: ext.transformed.clone(),
            tgt: conn.clone(),
            orders: ext.gauge.clone(),
        };
        assert!(rm.intertwining_defect(4).iter().all(mat_is_zero));

        // The ring basis itself is not an eigenvalue basis: the leading
        // term there is not block-diagonal plus nilpotent.
        let err = extend_block_basis(&ring.quantum_connection(), 2).unwrap_err();
        assert!(matches!(err, ConnectionError::BlockStructureBroken { .. }));
    }

    #[test]
    fn block_basis_extension_rejects_non_invertible_gaps() {
        type G2 = FpI<2>;
        let a0 = vec![
            vec![G2::i(), G2::zero()],
            vec![G2::zero(), G2::one()],
        ];
        let conn = FormalConnection::new(vec![a0]);
        let err = extend_block_basis(&conn, 2).unwrap_err();
        assert!(matches!(err, ConnectionError::GapNotInvertible { .. }));

        type G5 = FpI<5>;
        let zd = G5::new(Fp(1), Fp(2));
        let a0 = vec![
            vec![zd, G5::zero()],
            vec![G5::zero(), G5::zero()],
        ];
        let conn = FormalConnection::new(vec![a0]);
        let err = extend_block_basis(&conn, 2).unwrap_err();
        assert!(matches!(err, ConnectionError::GapNotInvertible { .. }));
    }

    #[test]
    fn intertwiner_for_equal_connections_is_the_identity() {
        let ring: QuantumRing<Rat> = QuantumRing::quadrics();
        let conn = ring.even_connection();
        let r = solve_intertwiner(&conn, &conn, &mat_id::<Rat>(4), 4).unwrap();
        assert_eq!(r.orders[0], mat_id::<Rat>(4));
        for k in 1..=4 {
            assert!(mat_is_zero(&r.orders[k]));
        }
    }

    #[test]
    fn reference_intertwiner_is_reproduced_for_both_sign_choices() {
        for epsilon in [1i64, -1] {
            let ring: QuantumRing<GaussRat> = QuantumRing::quadrics();
            let src = ring.even_connection();
            let tgt = genus_two_target::<GaussRat>();
            let fixture = mirror_fixture(epsilon);
            let r = solve_intertwiner(&src, &tgt, &fixture.constant_term, 4).unwrap();
            let reference = reference_even_intertwiner(epsilon);
            for k in 0..=4 {
                assert_eq!(r.orders[k], reference[k], "order {k}, epsilon {epsilon}");
            }
            // Named spot value: the (3, 1) entry of the t^2 order.
            assert_eq!(r.orders[2][2][0], gqi(1, 32, epsilon));
        }
    }

    #[test]
    fn intertwiner_orders_are_stable_under_deeper_truncation() {
        let ring: QuantumRing<GaussRat> = QuantumRing::quadrics();
        let src = ring.even_connection();
        let tgt = genus_two_target::<GaussRat>();
        let fixture = mirror_fixture(1);
        let shallow = solve_intertwiner(&src, &tgt, &fixture.constant_term, 4).unwrap();
        let deep = solve_intertwiner(&src, &tgt, &fixture.constant_term, 6).unwrap();
        for k in 0..=4 {
            assert_eq!(shallow.orders[k], deep.orders[k]);
        }
        assert!(deep.intertwining_defect(6).iter().all(mat_is_zero));
    }

    #[test]
    fn inconsistent_seed_matrices_are_rejected_with_certificates() {
        let ring: QuantumRing<GaussRat> = QuantumRing::quadrics();
        let src = ring.even_connection();
        let tgt = genus_two_target::<GaussRat>();

        // The identity does not intertwine the constant terms: the
        // nilpotent entries of the two leading terms differ.
        let err = solve_intertwiner(&src, &tgt, &mat_id::<GaussRat>(4), 4).unwrap_err();
        match err {
            ConnectionError::Inconsistent { order, entries } => {
                assert_eq!(order, 0);
                assert!(entries.iter().any(|(i, j, _)| (*i, *j) == (1, 2)));
            }
            other => panic!("expected an inconsistency, got {other}"),
        }

        // Shifting one grading eigenvalue on the target obstructs the
        // extension at order one.
        let fixture = mirror_fixture(1);
        let mut bad = tgt.clone();
        bad.coeffs[1][0][0] = bad.coeffs[1][0][0].clone() + GaussRat::one();
        let err = solve_intertwiner(&src, &bad, &fixture.constant_term, 4).unwrap_err();
        match err {
            ConnectionError::Inconsistent { order, entries } => {
                assert_eq!(order, 1);
                assert!(entries.iter().any(|(i, j, _)| (*i, *j) == (0, 0)));
            }
            other => panic!("expected an inconsistency, got {other}"),
        }
    }

    #[test]
    fn odd_class_series_matches_the_recorded_expansion() {
        let out = odd_class_series(3, 6).unwrap();
        assert_eq!(out.t_power, 1);
        assert_eq!(out.c_series.coeff(0), rat(1, 1));
        assert_eq!(out.c_series.coeff(1), rat(0, 1));
        assert_eq!(out.c_series.coeff(2), rat(1, 256));
        assert_eq!(out.c_series.coeff(3), rat(0, 1));
        assert_eq!(out.c_series.coeff(4), rat(81, 262144));
        assert_eq!(out.c_series.coeff(5), rat(0, 1));
        assert_eq!(out.assembled.coeff(0), rat(0, 1));
        assert_eq!(out.assembled.coeff(1), rat(-1, 1));
        assert_eq!(out.assembled.coeff(3), rat(-1, 256));
        assert_eq!(out.assembled.coeff(5), rat(-81, 262144));
        // 81 is divisible by 3, so the order five term vanishes mod 3
        // while staying nonzero rationally.
        assert!(out.p_divisible.contains(&5));
        let reduced = series_mod::<3>(&out.assembled).unwrap();
        assert_eq!(reduced.coeff(1), Fp::<3>::new(2));
        assert_eq!(reduced.coeff(3), Fp::<3>::new(2));
        assert_eq!(reduced.coeff(5), Fp::<3>::new(0));

        let out5 = odd_class_series(5, 4).unwrap();
        assert_eq!(out5.t_power, 2);
        assert_eq!(out5.assembled.coeff(2), rat(2, 1));
        let reduced5 = series_mod::<5>(&out5.assembled).unwrap();
        assert_eq!(reduced5.coeff(2), Fp::<5>::new(2));

        let out7 = odd_class_series(7, 4).unwrap();
        assert_eq!(out7.t_power, 3);
        assert_eq!(out7.assembled.coeff(3), rat(-6, 1));
        let reduced7 = series_mod::<7>(&out7.assembled).unwrap();
        assert_eq!(reduced7.coeff(3), Fp::<7>::new(1));

        assert!(matches!(
            odd_class_series(2, 6),
            Err(ConnectionError::OddPrimeRequired { given: 2 })
        ));
        assert!(matches!(
            odd_class_series(3, 3),
            Err(ConnectionError::TruncationTooSmall { given: 3, needed: 4 })
        ));
    }

    #[test]
    fn surface_power_operation_is_a_twisted_cup_action() {
        // Characteristic three with prime-field coefficients: the
        // Frobenius twist is the identity.
        let y: Vec<F3> = vec![Fp(1), Fp(2), Fp(0), Fp(1)];
        let op = surface_steenrod(&y, 3).unwrap();
        assert_eq!(op.t_power, 1);
        let mut embedded = vec![F3::zero(); 6];
        for e in 0..4 {
            embedded[1 + e] = y[e];
        }
        assert_eq!(op.matrix, surface_cup_matrix(&embedded));

        // Cup structure spot values: the first degree one class pairs
        // with the third.
        let e = |i: usize| -> Vec<F3> {
            let mut v = vec![F3::zero(); 6];
            v[i] = F3::one();
            v
        };
        let mut h = vec![F3::zero(); 6];
        h[5] = F3::one();
        assert_eq!(surface_cup(&e(1), &e(3)), h);
        let mut minus_h = vec![F3::zero(); 6];
        minus_h[5] = -F3::one();
        assert_eq!(surface_cup(&e(3), &e(1)), minus_h);
        assert_eq!(surface_cup(&e(1), &e(1)), vec![F3::zero(); 6]);
        assert_eq!(surface_cup(&e(1), &e(2)), vec![F3::zero(); 6]);

        // Quadratic extension of characteristic three: the twist cubes
        // the coefficients, so i goes to -i.
        type G3 = FpI<3>;
        let yi: Vec<G3> = vec![G3::i(), G3::zero(), G3::one(), G3::zero()];
        let op = surface_steenrod(&yi, 3).unwrap();
        let mut twisted = vec![G3::zero(); 6];
        twisted[1] = -G3::i();
        twisted[3] = G3::one();
        assert_eq!(op.matrix, surface_cup_matrix(&twisted));

        // Characteristic five: the factorial prefactor is two.
        let y5: Vec<F5> = vec![Fp(1), Fp(0), Fp(0), Fp(0)];
        let op5 = surface_steenrod(&y5, 5).unwrap();
        assert_eq!(op5.t_power, 2);
        let mut embedded5 = vec![F5::zero(); 6];
        embedded5[1] = Fp(1);
        assert_eq!(
            op5.matrix,
            mat_scale(&surface_cup_matrix(&embedded5), &Fp(2))
        );

        // Zero input gives the zero operation.
        let zero_op = surface_steenrod(&vec![F3::zero(); 4], 3).unwrap();
        assert!(mat_is_zero(&zero_op.matrix));

        // The coefficient field must match the prime.
        assert!(matches!(
            surface_steenrod(&y, 5),
            Err(ConnectionError::CharacteristicMismatch { field: 3, prime: 5 })
        ));
    }

    fn splitting_matches_mod_p<const P: u64>() {
        let ring_q: QuantumRing<Rat> = QuantumRing::quadrics();
        let ext_q = extend_block_basis(&ring_q.eigen_connection(), 4).unwrap();
        let ring_p: QuantumRing<Fp<P>> = QuantumRing::quadrics();
        let ext_p = extend_block_basis(&ring_p.eigen_connection(), 4).unwrap();

        assert_eq!(ext_q.blocks.len(), ext_p.blocks.len());
        for ((lq, iq), (lp, ip)) in ext_q.blocks.iter().zip(&ext_p.blocks) {
            assert_eq!(rat_mod::<P>(lq).unwrap(), *lp);
            assert_eq!(iq, ip);
        }
        for k in 0..=4 {
            assert_eq!(mat_mod::<P>(&ext_q.gauge[k]).unwrap(), ext_p.gauge[k]);
            assert_eq!(
                mat_mod::<P>(&ext_q.transformed.coeff(k)).unwrap(),
                ext_p.transformed.coeff(k)
            );
        }
    }

    #[test]
    fn reduced_block_bases_match_the_rational_computation() {
        splitting_matches_mod_p::<3>();
        splitting_matches_mod_p::<5>();
        splitting_matches_mod_p::<11>();
    }

    #[test]
    fn comparison_fixtures_respect_the_pairing_conventions() {
        let ring: QuantumRing<GaussRat> = QuantumRing::quadrics();
        for epsilon in [1i64, -1] {
            let fixture = mirror_fixture(epsilon);
            let root = fixture.root.clone();

            // The odd comparison reverses the intersection form.
            let j: Mat<GaussRat> = (0..4)
                .map(|i| {
                    (0..4)
                        .map(|k| GaussRat::from_i64(gamma_pairing(i, k)))
                        .collect()
                })
                .collect();
            let m = &fixture.theta_odd;
            let mtm = mat_mul(&mat_transpose(m), &mat_mul(&j, m));
            assert_eq!(mtm, mat_scale(&j, &GaussRat::from_i64(-1)));

            // Even part: the comparison reverses the pairing. Curve
            // pairing of (a + bH, c + dH) is ad + bc.
            let curve_pair = |x: &[GaussRat], y: &[GaussRat]| -> GaussRat {
                x[0].clone() * y[1].clone() + x[1].clone() * y[0].clone()
            };
            let v = ring.even_zero_idempotent();
            let w = ring.even_zero_nilpotent();
            let tv: Vec<GaussRat> =
                fixture.theta_even.iter().map(|r| r[0].clone()).collect();
            let tw: Vec<GaussRat> =
                fixture.theta_even.iter().map(|r| r[1].clone()).collect();
            assert_eq!(curve_pair(&tv, &tv), -ring.pair(&v, &v));
            assert_eq!(curve_pair(&tv, &tw), -ring.pair(&v, &w));
            assert_eq!(curve_pair(&tw, &tw), -ring.pair(&w, &w));

            // The ring-level comparison is -2 root times the module
            // level one.
            let scale = GaussRat::from_i64(-2) * root.clone();
            assert_eq!(fixture.xi_even, mat_scale(&fixture.theta_even, &scale));

            // Module property over the zero block: multiplying by c1
            // upstairs matches cup with the curve's first Chern class
            // (-2H) downstairs.
            let c = ring.c1_matrix();
            let cv = mat_apply(&c, &v);
            // cv = -w/8, so Theta(cv) = -Theta(w)/8.
            let theta_cv: Vec<GaussRat> = tw
                .iter()
                .map(|x| x.clone() * gq(-1, 8))
                .collect();
            let w_eighth: Vec<GaussRat> = w.iter().map(|x| x.clone() * gq(-1, 8)).collect();
            assert_eq!(cv, w_eighth);
            // Cup with -2H in coordinates (1, H): (a, b) goes to
            // (0, -2a).
            let cup_c1_tv = vec![
                GaussRat::zero(),
                tv[0].clone() * GaussRat::from_i64(-2),
            ];
            assert_eq!(cup_c1_tv, theta_cv);

            // The seed matrix stores the same even comparison data:
            // the nilpotent column in (-2H)-coordinates and the
            // idempotent column on the curve's unit.
            assert_eq!(fixture.constant_term[1][1], gqi(-4, 1, epsilon));
            assert_eq!(
                fixture.theta_even[1][1],
                gqi(-4, 1, epsilon) * GaussRat::from_i64(-2)
            );
            assert_eq!(fixture.constant_term[2][2], fixture.theta_even[0][0]);
        }
    }

    fn fpi3(re: u64, im: u64) -> FpI<3> {
        FpI::new(Fp(re as u64), Fp(im as u64))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn gauge_and_intertwiner_agree_on_random_block_connections(
            dim in 2usize..4,
            diag in proptest::collection::vec(0u64..101, 3),
            a1 in proptest::collection::vec(0u64..101, 9),
            a2 in proptest::collection::vec(0u64..101, 9),
        ) {
            type F = Fp<101>;
            prop_assume!(diag[0] != diag[1]);
            prop_assume!(dim < 3 || (diag[2] != diag[0] && diag[2] != diag[1]));
            let mut a0 = mat_zero::<F>(dim, dim);
            for i in 0..dim {
                a0[i][i] = Fp(diag[i]);
            }
            let mut m1 = mat_zero::<F>(dim, dim);
            let mut m2 = mat_zero::<F>(dim, dim);
            for i in 0..dim {
                for j in 0..dim {
                    m1[i][j] = Fp(a1[i * dim + j]);
                    m2[i][j] = Fp(a2[i * dim + j]);
                }
            }
            let conn = FormalConnection::new(vec![a0.clone(), m1, m2]);
            // Two orders deeper than the comparison: the solver pins its
            // top order through equations that read the normalized
            // coefficients two orders beyond it, so those must be honest
            // rather than truncated to zero.
            let ext = extend_block_basis(&conn, 5).unwrap();
            prop_assert_eq!(ext.transformed.coeff(0), a0);
            // Distinct eigenvalues force diagonal transformed
            // coefficients.
            for k in 0..=5 {
                let m = ext.transformed.coeff(k);
                for i in 0..dim {
                    for j in 0..dim {
                        if i != j {
                            prop_assert!(m[i][j].is_zero());
                        }
                    }
                }
            }
            // The gauge is the unique intertwiner with identity seed
            // from the normalized connection to the input.
            let r = solve_intertwiner(&ext.transformed, &conn, &mat_id::<F>(dim), 3).unwrap();
            prop_assert_eq!(&r.orders[..], &ext.gauge[..4]);
            prop_assert!(r.intertwining_defect(3).iter().all(mat_is_zero));
        }

        #[test]
        fn surface_power_is_frobenius_semilinear(
            y in proptest::collection::vec((0u64..3, 0u64..3), 4),
            z in proptest::collection::vec((0u64..3, 0u64..3), 4),
            a in (0u64..3, 0u64..3),
        ) {
            type G3 = FpI<3>;
            let ya: Vec<G3> = y.iter().map(|(r, i)| fpi3(*r, *i)).collect();
            let za: Vec<G3> = z.iter().map(|(r, i)| fpi3(*r, *i)).collect();
            let scalar = fpi3(a.0, a.1);

            let sum: Vec<G3> = ya
                .iter()
                .zip(&za)
                .map(|(p, q)| *p + *q)
                .collect();
            let m_sum = surface_steenrod(&sum, 3).unwrap().matrix;
            let m_y = surface_steenrod(&ya, 3).unwrap().matrix;
            let m_z = surface_steenrod(&za, 3).unwrap().matrix;
            prop_assert_eq!(m_sum, mat_add(&m_y, &m_z));

            let scaled: Vec<G3> = ya.iter().map(|p| *p * scalar).collect();
            let m_scaled = surface_steenrod(&scaled, 3).unwrap().matrix;
            prop_assert_eq!(m_scaled, mat_scale(&m_y, &scalar.frobenius()));
        }
    }
}
