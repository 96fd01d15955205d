//! Workbench for the minimal model of a one-variable monomial potential.
//!
//! For the algebra with a single odd generator and one higher product of
//! arity N, the one-fold word complex has one homology class per power of
//! the odd generator below N-1, and each class lifts to a cycle in the
//! p-fold complex and further to an equivariant cycle over k[[t]] (x) L(th).
//! This module builds those generator families, projects equivariant cycles
//! onto them, and assembles the matrix of the equivariant cap action of the
//! unit-output cochain classes on the lifted basis.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::ainfty::{gen_words, Gen, MinimalModel};
use crate::equivariant::{eq_boundary, eq_cap_chain, eq_unit, EqChain, PFoldComplex};
use crate::hochschild::{boundary, Chain, Cochain, Word};
use crate::linear::{
    solve, sv_add_scaled, sv_is_zero, sv_neg, sv_unit, sv_zero, SolveOutcome, SparseVec,
};
use crate::pfold::collapse_full;
use crate::scalars::Field;

/// Parameters of one workbench run: the weight of the potential, the number
/// of tensor factors (an odd prime not dividing the weight), the truncation
/// order of the formal circle variable, and a word length bound for the
/// solver windows.
pub struct Workbench<F: Field> {
    pub weight: usize,
    pub fold: usize,
    pub t_order: usize,
    pub max_len: usize,
    pub model: MinimalModel<F>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WorkbenchError {
    FoldNotPrime { fold: usize },
    FoldDividesWeight { fold: usize, weight: usize },
    LengthBoundTooSmall { given: usize, needed: usize },
    WeightNotInvertible { weight: usize },
    /// A solver window capped by the length bound could not express the
    /// required chain; the bigrade that failed is reported.
    TruncationInsufficient { t: usize, theta: bool },
    CycleCheckFailed { family: &'static str, index: usize },
    DifferentialMismatch { family: &'static str, index: usize },
    /// A projection left a residue outside the generator span even though
    /// every bigrade was processed; the input was not a cycle.
    ProjectionIncomplete,
}

impl fmt::Display for WorkbenchError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WorkbenchError::FoldNotPrime { fold } => write!(f, "fold {fold} is not prime"),
            WorkbenchError::FoldDividesWeight { fold, weight } => {
                write!(f, "fold {fold} divides the weight {weight}")
            }
            WorkbenchError::LengthBoundTooSmall { given, needed } => {
                write!(f, "length bound {given} is below the required {needed}")
            }
            WorkbenchError::WeightNotInvertible { weight } => {
                write!(f, "the weight {weight} is not invertible in the coefficient field")
            }
            WorkbenchError::TruncationInsufficient { t, theta } => {
                write!(
                    f,
                    "solver window exhausted at t^{t}{}",
                    if *theta { " theta" } else { "" }
                )
            }
            WorkbenchError::CycleCheckFailed { family, index } => {
                write!(f, "{family} generator {index} is not a cycle")
            }
            WorkbenchError::DifferentialMismatch { family, index } => {
                write!(f, "{family} generator {index} has the wrong differential")
            }
            WorkbenchError::ProjectionIncomplete => {
                write!(f, "projection input is not a cycle in the truncated complex")
            }
        }
    }
}

impl std::error::Error for WorkbenchError {}

/// All four generator families, indexed 0..=weight-2.
pub struct GeneratorSet<F: Field> {
    pub hochschild_cycles: Vec<Chain<F>>,
    pub unit_cochains: Vec<Cochain<F>>,
    pub odd_cochains: Vec<Cochain<F>>,
    pub power_cycles: Vec<Chain<F>>,
    pub equivariant_cycles: Vec<EqChain<Word, F>>,
}

/// Position in the lifted basis: coefficient of t^t th^theta times the
/// equivariant generator with the given target index.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct CapCoord {
    pub target: usize,
    pub t: usize,
    pub theta: bool,
}

/// Matrix of an equivariant cap action in the lifted generator basis;
/// `columns[k]` holds the coordinates of the image of generator k.
#[derive(Clone, Debug, PartialEq)]
pub struct CapAction<F: Field> {
    pub dim: usize,
    pub t_order: usize,
    pub columns: Vec<SparseVec<CapCoord, F>>,
}

impl<F: Field> CapAction<F> {
    /// `self` applied after `inner`, with th^2 = 0 and t truncated.
    pub fn compose(&self, inner: &Self) -> Self {
        assert_eq!(self.dim, inner.dim);
        let mut columns = Vec::with_capacity(inner.columns.len());
        for col in &inner.columns {
            let mut out: SparseVec<CapCoord, F> = sv_zero();
            for (c1, v1) in col {
                for (c2, v2) in &self.columns[c1.target] {
                    if c1.theta && c2.theta {
                        continue;
                    }
                    let t = c1.t + c2.t;
                    if t > self.t_order {
                        continue;
                    }
                    let key = CapCoord {
                        target: c2.target,
                        t,
                        theta: c1.theta || c2.theta,
                    };
                    sv_add_scaled(&mut out, &sv_unit(key), &(v1.clone() * v2.clone()));
                }
            }
            columns.push(out);
        }
        CapAction {
            dim: self.dim,
            t_order: self.t_order,
            columns,
        }
    }
}

/// One projected column with its certificate: the coordinates, a chain
/// whose boundary is the defect, and the defect itself (input minus the
/// coordinate combination of generators).
pub struct ColumnWitness<F: Field> {
    pub coords: SparseVec<CapCoord, F>,
    pub witness: EqChain<Word, F>,
    pub defect: EqChain<Word, F>,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum StageLabel {
    Chain(Word),
    Class,
}

fn compositions(parts: usize, total: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(parts - 1, total - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn is_prime(n: usize) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// Chain concentrated in one (t, theta) bigrade.
pub fn at_bigrade<F: Field>(t: usize, theta: bool, c: &Chain<F>) -> EqChain<Word, F> {
    let mut out: EqChain<Word, F> = sv_zero();
    for (w, v) in c {
        sv_add_scaled(&mut out, &eq_unit(t, theta, w.clone()), v);
    }
    out
}

/// Component of an equivariant chain in one (t, theta) bigrade.
pub fn bigrade_component<F: Field>(v: &EqChain<Word, F>, t: usize, theta: bool) -> Chain<F> {
    let mut out: Chain<F> = sv_zero();
    for (k, c) in v {
        if k.t == t && k.theta == theta {
            sv_add_scaled(&mut out, &sv_unit(k.key.clone()), c);
        }
    }
    out
}

/// Multiplication by t^shift, dropping powers beyond the truncation order.
pub fn t_shift<F: Field>(v: &EqChain<Word, F>, shift: usize, t_order: usize) -> EqChain<Word, F> {
    let mut out: EqChain<Word, F> = sv_zero();
    for (k, c) in v {
        if k.t + shift <= t_order {
            sv_add_scaled(&mut out, &eq_unit(k.t + shift, k.theta, k.key.clone()), c);
        }
    }
    out
}

impl<F: Field> Workbench<F> {
    pub fn new(
        weight: usize,
        fold: usize,
        t_order: usize,
        max_len: usize,
    ) -> Result<Self, WorkbenchError> {
        if !is_prime(fold) {
            return Err(WorkbenchError::FoldNotPrime { fold });
        }
        if weight % fold == 0 {
            return Err(WorkbenchError::FoldDividesWeight { fold, weight });
        }
        let needed = 3 * weight + 3;
        if max_len < needed {
            return Err(WorkbenchError::LengthBoundTooSmall {
                given: max_len,
                needed,
            });
        }
        Ok(Workbench {
            weight,
            fold,
            t_order,
            max_len,
            model: MinimalModel::monomial(weight),
        })
    }

    /// Three tensor factors, truncation order 2, and a length window that
    /// fits every chain the column witnesses touch.
    pub fn with_defaults(weight: usize) -> Result<Self, WorkbenchError> {
        Workbench::new(weight, 3, 2, 4 * weight + 8)
    }

    /// The normalized word complex the workbench computes in.
    pub fn complex(&self) -> PFoldComplex<'_, F> {
        PFoldComplex {
            model: &self.model,
            fold: self.fold,
            normalized: true,
        }
    }

    fn weight_inverse(&self) -> Result<F, WorkbenchError> {
        F::from_i64(self.weight as i64)
            .inv()
            .ok_or(WorkbenchError::WeightNotInvertible {
                weight: self.weight,
            })
    }

    /// The one-fold cycle with a distinguished odd entry and k string
    /// entries.
    pub fn hochschild_cycle(&self, k: usize) -> Chain<F> {
        sv_unit(Word::single(Gen::D, vec![Gen::D; k]))
    }

    /// Sum of the words with the given bold entries over all distributions
    /// of `total` odd string entries.
    pub fn family(&self, bolds: &[Gen], total: usize) -> Chain<F> {
        assert_eq!(bolds.len(), self.fold);
        let mut out: Chain<F> = sv_zero();
        for comp in compositions(self.fold, total) {
            let w = Word::new(
                bolds
                    .iter()
                    .zip(&comp)
                    .map(|(b, n)| (*b, vec![Gen::D; *n]))
                    .collect(),
            );
            sv_add_scaled(&mut out, &sv_unit(w), &F::one());
        }
        out
    }

    /// Sum over compositions with the coefficient taken from one slot.
    pub fn weighted_family(&self, bolds: &[Gen], total: usize, slot: usize) -> Chain<F> {
        assert_eq!(bolds.len(), self.fold);
        let mut out: Chain<F> = sv_zero();
        for comp in compositions(self.fold, total) {
            let w = Word::new(
                bolds
                    .iter()
                    .zip(&comp)
                    .map(|(b, n)| (*b, vec![Gen::D; *n]))
                    .collect(),
            );
            sv_add_scaled(&mut out, &sv_unit(w), &F::from_i64(comp[slot] as i64));
        }
        out
    }

    /// The fold-level lift of `hochschild_cycle(k)`: one odd bold entry,
    /// unit bolds elsewhere, k odd string entries in every distribution.
    pub fn power_cycle(&self, k: usize) -> Chain<F> {
        let mut bolds = vec![Gen::E; self.fold - 1];
        bolds.push(Gen::D);
        self.family(&bolds, k)
    }

    /// All normalized words of this fold with the given number of odd
    /// entries, subject to the length bound.
    fn words_with_count(&self, count: usize) -> Vec<Word> {
        let mut out = Vec::new();
        for bolds in gen_words(self.fold) {
            let units = bolds.iter().filter(|g| **g == Gen::E).count();
            let bold_odd = self.fold - units;
            if count + units > self.max_len {
                continue;
            }
            let Some(string_total) = count.checked_sub(bold_odd) else {
                continue;
            };
            for comp in compositions(self.fold, string_total) {
                out.push(Word::new(
                    bolds
                        .iter()
                        .zip(&comp)
                        .map(|(b, n)| (*b, vec![Gen::D; *n]))
                        .collect(),
                ));
            }
        }
        out.sort();
        out
    }

    /// Solve `boundary(x) = rhs + c * class` for a chain x and a scalar c,
    /// over windows of words whose odd counts match the right hand side
    /// modulo the weight. Without a class column, c is zero.
    fn staged_solve(
        &self,
        rhs: &Chain<F>,
        class: Option<&Chain<F>>,
        t: usize,
        theta: bool,
    ) -> Result<(F, Chain<F>), WorkbenchError> {
        if sv_is_zero(rhs) {
            return Ok((F::zero(), sv_zero()));
        }
        let base: BTreeSet<usize> = rhs.keys().map(|w| w.odd_count()).collect();
        for extra in 1..=2usize {
            let mut counts = base.clone();
            for c in &base {
                for j in 1..=extra {
                    counts.insert(c + j * self.weight);
                }
            }
            let mut columns: Vec<(StageLabel, Chain<F>)> = Vec::new();
            for m in &counts {
                for w in self.words_with_count(*m) {
                    let col = boundary(&self.model, &sv_unit(w.clone()), true);
                    columns.push((StageLabel::Chain(w), col));
                }
            }
            if let Some(cl) = class {
                columns.push((StageLabel::Class, sv_neg(cl)));
            }
            match solve(columns, rhs) {
                SolveOutcome::Solution(x) => {
                    let mut chain: Chain<F> = sv_zero();
                    let mut coeff = F::zero();
                    for (l, c) in x {
                        match l {
                            StageLabel::Chain(w) => sv_add_scaled(&mut chain, &sv_unit(w), &c),
                            StageLabel::Class => coeff = -c,
                        }
                    }
                    return Ok((coeff, chain));
                }
                SolveOutcome::Inconsistent { .. } => continue,
            }
        }
        Err(WorkbenchError::TruncationInsufficient { t, theta })
    }

    /// Append terms at higher bigrades until the equivariant boundary of the
    /// seed vanishes. Each step clears the lowest remaining bigrade with a
    /// chain preimage, so the loop moves strictly up the (t, theta) order.
    pub fn complete_to_cycle(
        &self,
        seed: &EqChain<Word, F>,
    ) -> Result<EqChain<Word, F>, WorkbenchError> {
        let cx = self.complex();
        let mut z = seed.clone();
        for _ in 0..2 * (self.t_order + 2) {
            let r = eq_boundary(&cx, &z, self.t_order);
            if sv_is_zero(&r) {
                return Ok(z);
            }
            let (t, theta) = r
                .keys()
                .map(|k| (k.t, k.theta))
                .min()
                .expect("nonzero residual has a lowest bigrade");
            let res = bigrade_component(&r, t, theta);
            let (_, x) = self.staged_solve(&sv_neg(&res), None, t, theta)?;
            let step = at_bigrade(t, theta, &x);
            for (k, c) in step {
                sv_add_scaled(&mut z, &sv_unit(k), &c);
            }
        }
        Err(WorkbenchError::ProjectionIncomplete)
    }

    /// Equivariant cycle lifting `power_cycle(k)`. For three tensor factors
    /// the correction terms are closed forms: the theta term distributes
    /// weight-1 extra odd entries over words with odd bolds in the outer
    /// slots, scaled by the inverse weight, and the t term distributes twice
    /// as many over all-odd bolds, scaled by the inverse square. Other folds
    /// use the completion solver.
    pub fn equivariant_cycle(&self, k: usize) -> Result<EqChain<Word, F>, WorkbenchError> {
        let base = at_bigrade(0, false, &self.power_cycle(k));
        if self.fold != 3 {
            return self.complete_to_cycle(&base);
        }
        let ninv = self.weight_inverse()?;
        let n2inv = ninv.clone() * ninv.clone();
        let mut z = base;
        let mid = self.family(&[Gen::D, Gen::E, Gen::D], k + self.weight - 1);
        for (w, c) in &mid {
            sv_add_scaled(&mut z, &eq_unit(0, true, w.clone()), &(c.clone() * ninv.clone()));
        }
        if self.t_order >= 1 {
            let last = self.family(&[Gen::D, Gen::D, Gen::D], k + 2 * (self.weight - 1));
            for (w, c) in &last {
                sv_add_scaled(&mut z, &eq_unit(1, false, w.clone()), &(c.clone() * n2inv.clone()));
            }
        }
        if !sv_is_zero(&eq_boundary(&self.complex(), &z, self.t_order)) {
            return Err(WorkbenchError::CycleCheckFailed {
                family: "equivariant",
                index: k,
            });
        }
        Ok(z)
    }

    /// Builds and verifies all four generator families: the one-fold cycles,
    /// the unit- and odd-output cochains with their differentials, the
    /// fold-level cycles together with their collapse back to the one-fold
    /// generators, and the equivariant lifts.
    pub fn build_generators(&self) -> Result<GeneratorSet<F>, WorkbenchError> {
        let mut set = GeneratorSet {
            hochschild_cycles: Vec::new(),
            unit_cochains: Vec::new(),
            odd_cochains: Vec::new(),
            power_cycles: Vec::new(),
            equivariant_cycles: Vec::new(),
        };
        let arity_bound = self.weight + self.weight - 1;
        for k in 0..=self.weight - 2 {
            let h = self.hochschild_cycle(k);
            if !sv_is_zero(&boundary(&self.model, &h, true)) {
                return Err(WorkbenchError::CycleCheckFailed {
                    family: "one-fold",
                    index: k,
                });
            }
            let p = self.power_cycle(k);
            if !sv_is_zero(&boundary(&self.model, &p, true)) {
                return Err(WorkbenchError::CycleCheckFailed {
                    family: "power",
                    index: k,
                });
            }
            if collapse_full(&self.model, &p) != h {
                return Err(WorkbenchError::DifferentialMismatch {
                    family: "collapse",
                    index: k,
                });
            }
            let u = Cochain::basis(k, Gen::E);
            if !u.differential(&self.model, k + arity_bound).is_zero() {
                return Err(WorkbenchError::CycleCheckFailed {
                    family: "unit cochain",
                    index: k,
                });
            }
            let o = Cochain::<F>::basis(k, Gen::D);
            let mut d = o.differential(&self.model, k + arity_bound);
            let expected = Cochain::basis(k + self.weight - 1, Gen::E)
                .scale(&F::from_i64(self.weight as i64));
            d.add_scaled(&expected, &-F::one());
            if !d.is_zero() {
                return Err(WorkbenchError::DifferentialMismatch {
                    family: "odd cochain",
                    index: k,
                });
            }
            let z = self.equivariant_cycle(k)?;
            set.hochschild_cycles.push(h);
            set.unit_cochains.push(u);
            set.odd_cochains.push(o);
            set.power_cycles.push(p);
            set.equivariant_cycles.push(z);
        }
        Ok(set)
    }

    /// Coordinates of a closed equivariant chain in the lifted generator
    /// basis, together with a boundary witness for the defect. Bigrades are
    /// cleared in ascending order; at each one the solver decides between
    /// the boundary span and the single generator whose odd count matches
    /// the residue class, so the coordinates are forced, not guessed.
    pub fn project_class(
        &self,
        z: &EqChain<Word, F>,
    ) -> Result<ColumnWitness<F>, WorkbenchError> {
        let cx = self.complex();
        let mut residual = z.clone();
        let mut defect = z.clone();
        let mut witness: EqChain<Word, F> = sv_zero();
        let mut coords: SparseVec<CapCoord, F> = sv_zero();
        let mut reps: BTreeMap<(usize, bool), EqChain<Word, F>> = BTreeMap::new();
        for a in 0..=self.t_order {
            for e in [false, true] {
                let res = bigrade_component(&residual, a, e);
                if sv_is_zero(&res) {
                    continue;
                }
                let m0 = res
                    .keys()
                    .map(|w| w.odd_count())
                    .min()
                    .expect("nonzero component");
                let j = (m0 + self.weight - 1) % self.weight;
                let class_chain = (j + 2 <= self.weight).then(|| self.power_cycle(j));
                let (c, x) = self.staged_solve(&res, class_chain.as_ref(), a, e)?;
                if !sv_is_zero(&x) {
                    let step = at_bigrade(a, e, &x);
                    let db = eq_boundary(&cx, &step, self.t_order);
                    for (k, v) in &db {
                        sv_add_scaled(&mut residual, &sv_unit(k.clone()), &-v.clone());
                    }
                    for (k, v) in step {
                        sv_add_scaled(&mut witness, &sv_unit(k), &v);
                    }
                }
                if !c.is_zero() {
                    let rep = match reps.entry((j, e)) {
                        std::collections::btree_map::Entry::Occupied(o) => o.into_mut(),
                        std::collections::btree_map::Entry::Vacant(slot) => {
                            let built = if e {
                                self.complete_to_cycle(&at_bigrade(
                                    0,
                                    true,
                                    &self.power_cycle(j),
                                ))?
                            } else {
                                self.equivariant_cycle(j)?
                            };
                            slot.insert(built)
                        }
                    };
                    let shifted = t_shift(rep, a, self.t_order);
                    for (k, v) in &shifted {
                        let sub = -(v.clone() * c.clone());
                        sv_add_scaled(&mut residual, &sv_unit(k.clone()), &sub);
                        sv_add_scaled(&mut defect, &sv_unit(k.clone()), &sub);
                    }
                    sv_add_scaled(
                        &mut coords,
                        &sv_unit(CapCoord {
                            target: j,
                            t: a,
                            theta: e,
                        }),
                        &c,
                    );
                }
            }
        }
        if !sv_is_zero(&residual) {
            return Err(WorkbenchError::ProjectionIncomplete);
        }
        Ok(ColumnWitness {
            coords,
            witness,
            defect,
        })
    }

    /// Image of one equivariant generator under the cap action of the
    /// cochain, projected onto the lifted basis with a boundary witness.
    pub fn column_witness(
        &self,
        phi: &Cochain<F>,
        k: usize,
    ) -> Result<ColumnWitness<F>, WorkbenchError> {
        let arity = phi.comp.keys().max().copied().unwrap_or(0);
        let pm = phi.premorphism(&self.model, self.weight, self.weight + arity + 1);
        let z = self.equivariant_cycle(k)?;
        self.project_class(&eq_cap_chain(&pm, &z))
    }

    /// Matrix of the equivariant cap action of the cochain on the lifted
    /// generator basis.
    pub fn cap_action(&self, phi: &Cochain<F>) -> Result<CapAction<F>, WorkbenchError> {
        let arity = phi.comp.keys().max().copied().unwrap_or(0);
        let pm = phi.premorphism(&self.model, self.weight, self.weight + arity + 1);
        let mut columns = Vec::new();
        for k in 0..=self.weight - 2 {
            let z = self.equivariant_cycle(k)?;
            let cw = self.project_class(&eq_cap_chain(&pm, &z))?;
            columns.push(cw.coords);
        }
        Ok(CapAction {
            dim: self.weight - 1,
            t_order: self.t_order,
            columns,
        })
    }
}
