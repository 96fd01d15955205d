//! Sparse exact linear algebra over any [`Field`].
//!
//! Vectors are ordered maps from an arbitrary label type to coefficients, so
//! complexes can use their natural basis labels (words, cells, matrix
//! positions) directly. Elimination keeps a fully reduced echelon form and
//! tracks, for every pivot column, an expression in the originally pushed
//! columns; this yields
//!
//! * solutions of inhomogeneous systems with the combination certificate,
//! * a left certificate (a covector annihilating the whole column span but
//!   not the right-hand side) whenever a system is inconsistent,
//! * kernel vectors as they appear, and
//! * homology bases with projection onto the chosen representatives.
//!
//! Label order fixes the pivot choice, so all results are deterministic.

use crate::scalars::Field;
use std::collections::BTreeMap;

pub type SparseVec<L, F> = BTreeMap<L, F>;

pub fn sv_zero<L: Ord, F: Field>() -> SparseVec<L, F> {
    BTreeMap::new()
}

pub fn sv_unit<L: Ord, F: Field>(l: L) -> SparseVec<L, F> {
    let mut v = BTreeMap::new();
    v.insert(l, F::one());
    v
}

pub fn sv_is_zero<L: Ord, F: Field>(v: &SparseVec<L, F>) -> bool {
    v.is_empty()
}

/// `dst += c * src`, dropping entries that cancel to zero.
pub fn sv_add_scaled<L: Ord + Clone, F: Field>(
    dst: &mut SparseVec<L, F>,
    src: &SparseVec<L, F>,
    c: &F,
) {
    if c.is_zero() {
        return;
    }
    for (l, x) in src {
        let add = x.clone() * c.clone();
        match dst.get_mut(l) {
            Some(cur) => {
                *cur = cur.clone() + add;
                if cur.is_zero() {
                    dst.remove(l);
                }
            }
            None => {
                if !add.is_zero() {
                    dst.insert(l.clone(), add);
                }
            }
        }
    }
}

pub fn sv_add<L: Ord + Clone, F: Field>(
    a: &SparseVec<L, F>,
    b: &SparseVec<L, F>,
) -> SparseVec<L, F> {
    let mut out = a.clone();
    sv_add_scaled(&mut out, b, &F::one());
    out
}

pub fn sv_sub<L: Ord + Clone, F: Field>(
    a: &SparseVec<L, F>,
    b: &SparseVec<L, F>,
) -> SparseVec<L, F> {
    let mut out = a.clone();
    sv_add_scaled(&mut out, b, &(-F::one()));
    out
}

pub fn sv_scale<L: Ord + Clone, F: Field>(v: &SparseVec<L, F>, c: &F) -> SparseVec<L, F> {
    if c.is_zero() {
        return BTreeMap::new();
    }
    v.iter()
        .map(|(l, x)| (l.clone(), x.clone() * c.clone()))
        .collect()
}

pub fn sv_neg<L: Ord + Clone, F: Field>(v: &SparseVec<L, F>) -> SparseVec<L, F> {
    v.iter()
        .map(|(l, x)| (l.clone(), -x.clone()))
        .collect()
}

pub fn sv_dot<L: Ord, F: Field>(a: &SparseVec<L, F>, b: &SparseVec<L, F>) -> F {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let mut acc = F::zero();
    for (l, x) in small {
        if let Some(y) = large.get(l) {
            acc = acc + x.clone() * y.clone();
        }
    }
    acc
}

/// Apply a sparse linear map given by `image` on basis labels.
pub fn sv_apply<L: Ord + Clone, M: Ord + Clone, F: Field>(
    v: &SparseVec<L, F>,
    image: impl Fn(&L) -> SparseVec<M, F>,
) -> SparseVec<M, F> {
    let mut out = BTreeMap::new();
    for (l, c) in v {
        sv_add_scaled(&mut out, &image(l), c);
    }
    out
}

struct Pivot<M: Ord + Clone, L: Ord + Clone, F: Field> {
    /// Fully reduced column: 1 at the pivot label, 0 at every other pivot
    /// label.
    col: SparseVec<M, F>,
    /// Expression of `col` as a combination of the pushed columns.
    expr: SparseVec<L, F>,
}

/// Incremental fully reduced echelon form of a set of pushed columns.
pub struct Rref<M: Ord + Clone, L: Ord + Clone, F: Field> {
    pivots: BTreeMap<M, Pivot<M, L, F>>,
}

impl<M: Ord + Clone, L: Ord + Clone, F: Field> Default for Rref<M, L, F> {
    fn default() -> Self {
        Rref::new()
    }
}

impl<M: Ord + Clone, L: Ord + Clone, F: Field> Rref<M, L, F> {
    pub fn new() -> Self {
        Rref {
            pivots: BTreeMap::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduce `v` against the pivots. Returns the residue `r` and an
    /// expression `x` in pushed-column labels with `v = r + A x`.
    pub fn reduce(&self, v: &SparseVec<M, F>) -> (SparseVec<M, F>, SparseVec<L, F>) {
        let mut r = v.clone();
        let mut x: SparseVec<L, F> = BTreeMap::new();
        loop {
            let hit = r
                .iter()
                .find(|(m, _)| self.pivots.contains_key(m))
                .map(|(m, c)| (m.clone(), c.clone()));
            let Some((m, c)) = hit else { break };
            let piv = &self.pivots[&m];
            sv_add_scaled(&mut r, &piv.col, &(-c.clone()));
            sv_add_scaled(&mut x, &piv.expr, &c);
        }
        (r, x)
    }

    /// Push the column `A e_l`. Returns `None` when the rank grew, and the
    /// kernel combination (including `e_l`) when the column was dependent.
    pub fn push(&mut self, l: L, col: SparseVec<M, F>) -> Option<SparseVec<L, F>> {
        let (r, x) = self.reduce(&col);
        let mut expr = sv_neg(&x);
        expr.insert(l, F::one());
        // expr now satisfies A expr = r.
        if r.is_empty() {
            return Some(expr);
        }
        let lead = r.keys().next().unwrap().clone();
        let cinv = r[&lead].inv().expect("field inverse of a nonzero pivot");
        let col_n = sv_scale(&r, &cinv);
        let expr_n = sv_scale(&expr, &cinv);
        let touch: Vec<M> = self
            .pivots
            .iter()
            .filter(|(_, p)| p.col.contains_key(&lead))
            .map(|(m, _)| m.clone())
            .collect();
        for m in touch {
            let c = self.pivots[&m].col[&lead].clone();
            let p = self.pivots.get_mut(&m).unwrap();
            let mut col = std::mem::take(&mut p.col);
            let mut expr = std::mem::take(&mut p.expr);
            sv_add_scaled(&mut col, &col_n, &(-c.clone()));
            sv_add_scaled(&mut expr, &expr_n, &(-c));
            let p = self.pivots.get_mut(&m).unwrap();
            p.col = col;
            p.expr = expr;
        }
        self.pivots.insert(
            lead,
            Pivot {
                col: col_n,
                expr: expr_n,
            },
        );
        None
    }

    /// Covector vanishing on every pushed column, with coefficient 1 at `m`.
    /// Only meaningful when `m` is not a pivot label (e.g. a label taken from
    /// a nonzero reduction residue).
    pub fn left_certificate(&self, m: &M) -> SparseVec<M, F> {
        let mut y = sv_unit(m.clone());
        for (lead, piv) in &self.pivots {
            if let Some(c) = piv.col.get(m) {
                y.insert(lead.clone(), -c.clone());
            }
        }
        y
    }
}

/// Outcome of an inhomogeneous solve.
pub enum SolveOutcome<M: Ord + Clone, L: Ord + Clone, F: Field> {
    /// `x` with `A x = rhs`.
    Solution(SparseVec<L, F>),
    /// `witness . A = 0` while `witness . rhs != 0`.
    Inconsistent {
        witness: SparseVec<M, F>,
        residue: SparseVec<M, F>,
    },
}

/// Solve `A x = rhs` for columns `A e_l` given by an iterator. Certified in
/// both directions: a returned solution multiplies out to `rhs` exactly, and
/// an inconsistency comes with a covector killing the column span but
/// pairing to 1 with the residue.
pub fn solve<M, L, F>(
    columns: impl IntoIterator<Item = (L, SparseVec<M, F>)>,
    rhs: &SparseVec<M, F>,
) -> SolveOutcome<M, L, F>
where
    M: Ord + Clone,
    L: Ord + Clone,
    F: Field,
{
    let mut rref = Rref::new();
    for (l, col) in columns {
        rref.push(l, col);
    }
    let (r, x) = rref.reduce(rhs);
    if r.is_empty() {
        SolveOutcome::Solution(x)
    } else {
        let m = r.keys().next().unwrap();
        SolveOutcome::Inconsistent {
            witness: rref.left_certificate(m),
            residue: r,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum ProjLabel {
    Boundary(usize),
    Rep(usize),
}

/// Homology of a based complex at one spot: kernel of the outgoing
/// differential modulo a supplied family of boundaries.
pub struct Homology<L: Ord + Clone, F: Field> {
    pub cycle_rank: usize,
    pub boundary_rank: usize,
    pub reps: Vec<SparseVec<L, F>>,
    proj: Rref<L, ProjLabel, F>,
}

impl<L: Ord + Clone, F: Field> Homology<L, F> {
    pub fn rank(&self) -> usize {
        self.reps.len()
    }

    /// Coordinates of the cycle `z` in the chosen representative basis,
    /// modulo boundaries. Fails with the unreducible residue when `z` is
    /// outside the span (not a cycle, or the boundary family was not big
    /// enough to exhaust the image).
    pub fn project(&self, z: &SparseVec<L, F>) -> Result<Vec<F>, SparseVec<L, F>> {
        let (r, expr) = self.proj.reduce(z);
        if !r.is_empty() {
            return Err(r);
        }
        let mut coords = vec![F::zero(); self.reps.len()];
        for (l, c) in expr {
            if let ProjLabel::Rep(j) = l {
                coords[j] = c;
            }
        }
        Ok(coords)
    }
}

/// Compute a homology basis at one spot of a complex.
///
/// `space` enumerates the basis of the middle term (its order fixes pivot
/// choice), `d_out` is the outgoing differential, and `boundaries` spans the
/// incoming image. Boundaries must be cycles; this is checked when debug
/// assertions are on.
pub fn homology_basis<L, M, F>(
    space: &[L],
    d_out: impl Fn(&L) -> SparseVec<M, F>,
    boundaries: impl IntoIterator<Item = SparseVec<L, F>>,
) -> Homology<L, F>
where
    L: Ord + Clone,
    M: Ord + Clone,
    F: Field,
{
    let mut proj: Rref<L, ProjLabel, F> = Rref::new();
    let mut boundary_rank = 0usize;
    for (i, b) in boundaries.into_iter().enumerate() {
        #[cfg(debug_assertions)]
        {
            let db = sv_apply(&b, &d_out);
            debug_assert!(db.is_empty(), "boundary family contains a non-cycle");
        }
        if proj.push(ProjLabel::Boundary(i), b).is_none() {
            boundary_rank += 1;
        }
    }

    let mut ker: Rref<M, usize, F> = Rref::new();
    let mut cycle_rank = 0usize;
    let mut reps: Vec<SparseVec<L, F>> = Vec::new();
    for (idx, l) in space.iter().enumerate() {
        let Some(combo) = ker.push(idx, d_out(l)) else {
            continue;
        };
        cycle_rank += 1;
        let v: SparseVec<L, F> = combo
            .into_iter()
            .map(|(i, c)| (space[i].clone(), c))
            .collect();
        let (r, _) = proj.reduce(&v);
        if !r.is_empty() {
            let j = reps.len();
            proj.push(ProjLabel::Rep(j), v.clone());
            reps.push(v);
        }
    }

    Homology {
        cycle_rank,
        boundary_rank,
        reps,
        proj,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{rat, Fp, Rat};

    fn col<const N: usize>(entries: [(u32, i64); N]) -> SparseVec<u32, Rat> {
        entries
            .into_iter()
            .filter(|(_, c)| *c != 0)
            .map(|(m, c)| (m, rat(c, 1)))
            .collect()
    }

    #[test]
    fn solve_certifies_solution() {
        // [1 2; 3 4] x = (5, 11) has x = (1, 2).
        let cols = vec![
            ("x", col([(0, 1), (1, 3)])),
            ("y", col([(0, 2), (1, 4)])),
        ];
        let rhs = col([(0, 5), (1, 11)]);
        match solve(cols.clone(), &rhs) {
            SolveOutcome::Solution(x) => {
                assert_eq!(x[&"x"], rat(1, 1));
                assert_eq!(x[&"y"], rat(2, 1));
                // re-multiply as an oracle
                let mut acc = sv_zero::<u32, Rat>();
                for (l, c) in [("x", x[&"x"].clone()), ("y", x[&"y"].clone())] {
                    let a = cols.iter().find(|(n, _)| *n == l).unwrap();
                    sv_add_scaled(&mut acc, &a.1, &c);
                }
                assert_eq!(acc, rhs);
            }
            _ => panic!("expected a solution"),
        }
    }

    #[test]
    fn solve_certifies_inconsistency() {
        // Columns span {(a, a)}: rhs (1, 0) is unreachable.
        let cols = vec![("x", col([(0, 1), (1, 1)])), ("y", col([(0, 2), (1, 2)]))];
        let rhs = col([(0, 1)]);
        match solve(cols.clone(), &rhs) {
            SolveOutcome::Inconsistent { witness, residue } => {
                for (_, c) in &cols {
                    assert!(sv_dot(&witness, c).is_zero());
                }
                assert!(!sv_dot(&witness, &rhs).is_zero());
                assert!(!residue.is_empty());
            }
            _ => panic!("expected inconsistency"),
        }
    }

    #[test]
    fn kernel_vectors_multiply_to_zero() {
        let cols = vec![
            (0usize, col([(0, 1), (1, 2)])),
            (1usize, col([(0, 2), (1, 4)])),
            (2usize, col([(0, 1), (1, 1)])),
        ];
        let mut rref: Rref<u32, usize, Rat> = Rref::new();
        let mut kers = Vec::new();
        for (l, c) in &cols {
            if let Some(k) = rref.push(*l, c.clone()) {
                kers.push(k);
            }
        }
        assert_eq!(kers.len(), 1);
        assert_eq!(rref.rank(), 2);
        for k in kers {
            let mut acc = sv_zero::<u32, Rat>();
            for (l, c) in k {
                sv_add_scaled(&mut acc, &cols[l].1, &c);
            }
            assert!(acc.is_empty());
        }
    }

    #[test]
    fn homology_of_a_three_step_complex() {
        // F_5^3 --d--> F_5^2, d(e0) = f0, d(e1) = f0, d(e2) = 0,
        // boundaries spanned by e0 - e1 and e2.
        // Kernel is 2-dimensional, so homology is 0 here.
        type F = Fp<5>;
        let space = vec![0u32, 1, 2];
        let d = |l: &u32| -> SparseVec<u32, F> {
            match l {
                0 | 1 => sv_unit(100),
                _ => sv_zero(),
            }
        };
        let b1: SparseVec<u32, F> = [(0u32, Fp(1)), (1u32, Fp(4))].into_iter().collect();
        let b2: SparseVec<u32, F> = sv_unit(2);
        let h = homology_basis(&space, d, vec![b1, b2]);
        assert_eq!(h.cycle_rank, 2);
        assert_eq!(h.boundary_rank, 2);
        assert_eq!(h.rank(), 0);

        // Without boundaries the same kernel gives rank 2 and projection
        // coordinates that reproduce each cycle.
        let h2 = homology_basis(&space, d, Vec::new());
        assert_eq!(h2.rank(), 2);
        let z: SparseVec<u32, F> = [(0u32, Fp(2)), (1u32, Fp(3)), (2u32, Fp(1))]
            .into_iter()
            .collect();
        let coords = h2.project(&z).unwrap();
        let mut acc = sv_zero::<u32, F>();
        for (j, c) in coords.iter().enumerate() {
            sv_add_scaled(&mut acc, &h2.reps[j], c);
        }
        assert_eq!(acc, z);
        // a non-cycle is rejected
        let nz: SparseVec<u32, F> = sv_unit(0);
        assert!(h2.project(&nz).is_err());
    }
}
