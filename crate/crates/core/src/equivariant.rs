//! Homotopy fixed points of a complex with a cyclic group action: formal
//! series in a degree-two variable t and an exterior degree-one variable
//! theta, with the differential mixing the underlying boundary, the
//! difference of the group generator and the identity, and the norm.
//! Includes the homotopy exhibiting the action as trivial up to homotopy,
//! the structure map pairing two fixed-point complexes into the fixed
//! points of the tensor product, the p-th tensor power of a cocycle, and
//! the equivariant cap product on multi-fold chain words.

use crate::ainfty::{MinimalModel, PreMor};
use crate::hochschild::{boundary_word, tau, Word};
use crate::linear::{sv_add_scaled, sv_apply, sv_unit, sv_zero, SparseVec};
use crate::pfold::cap_diagonal;
use crate::scalars::Field;
use crate::signs::{Parity, Sign};
use std::fmt;

/// A complex with a distinguished basis.
pub trait BasedComplex<F: Field> {
    type Key: Ord + Clone + fmt::Debug;

    fn parity(&self, k: &Self::Key) -> Parity;
    fn boundary(&self, k: &Self::Key) -> SparseVec<Self::Key, F>;
}

/// A based complex with an action of the cyclic group of a fixed order,
/// through a degree-zero chain map.
pub trait CyclicComplex<F: Field>: BasedComplex<F> {
    /// Order of the acting group.
    fn order(&self) -> usize;
    /// Action of the standard generator on a basis element.
    fn generator(&self, k: &Self::Key) -> SparseVec<Self::Key, F>;
}

/// Generator action extended to chains.
pub fn tau_chain<C, F>(c: &C, v: &SparseVec<C::Key, F>) -> SparseVec<C::Key, F>
where
    C: CyclicComplex<F>,
    F: Field,
{
    sv_apply(v, |k| c.generator(k))
}

/// Sum of all group translates of a chain.
pub fn norm_chain<C, F>(c: &C, v: &SparseVec<C::Key, F>) -> SparseVec<C::Key, F>
where
    C: CyclicComplex<F>,
    F: Field,
{
    let mut acc = v.clone();
    let mut cur = v.clone();
    for _ in 1..c.order() {
        cur = tau_chain(c, &cur);
        sv_add_scaled(&mut acc, &cur, &F::one());
    }
    acc
}

/// `(generator - 1)^k` applied to a chain. In characteristic p and with a
/// group of order p, the power with k = p - 1 equals the norm; the exact
/// test `power_rewriting_of_tau_minus_one` pins this rewriting.
pub fn tau_minus_one_power<C, F>(
    c: &C,
    v: &SparseVec<C::Key, F>,
    k: usize,
) -> SparseVec<C::Key, F>
where
    C: CyclicComplex<F>,
    F: Field,
{
    let mut cur = v.clone();
    for _ in 0..k {
        let mut next = tau_chain(c, &cur);
        sv_add_scaled(&mut next, &cur, &(-F::one()));
        cur = next;
    }
    cur
}

/// Basis label of the fixed-point complex: an underlying label times t^a,
/// optionally times theta.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct EqKey<K> {
    pub t: usize,
    pub theta: bool,
    pub key: K,
}

impl<K: fmt::Display> fmt::Display for EqKey<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.key)?;
        if self.t > 0 {
            write!(f, " t^{}", self.t)?;
        }
        if self.theta {
            write!(f, " th")?;
        }
        Ok(())
    }
}

pub type EqChain<K, F> = SparseVec<EqKey<K>, F>;

/// Chain concentrated in one series coefficient.
pub fn eq_unit<K: Ord, F: Field>(t: usize, theta: bool, key: K) -> EqChain<K, F> {
    sv_unit(EqKey { t, theta, key })
}

/// The fixed-point differential, truncated at t-power `trunc`. Terms with a
/// higher power are dropped; this is a quotient complex because the
/// differential never lowers the t-power, so the square still vanishes
/// after truncation.
pub fn eq_boundary<C, F>(c: &C, v: &EqChain<C::Key, F>, trunc: usize) -> EqChain<C::Key, F>
where
    C: CyclicComplex<F>,
    F: Field,
{
    let mut out = sv_zero();
    for (e, x) in v {
        for (k2, y) in c.boundary(&e.key) {
            let lbl = EqKey {
                t: e.t,
                theta: e.theta,
                key: k2,
            };
            sv_add_scaled(&mut out, &sv_unit(lbl), &(x.clone() * y));
        }
        let twist = Sign::from_parity(c.parity(&e.key));
        if !e.theta {
            let mut tm = c.generator(&e.key);
            sv_add_scaled(&mut tm, &sv_unit(e.key.clone()), &(-F::one()));
            for (k2, y) in tm {
                let lbl = EqKey {
                    t: e.t,
                    theta: true,
                    key: k2,
                };
                sv_add_scaled(&mut out, &sv_unit(lbl), &twist.apply(x.clone() * y));
            }
        } else if e.t + 1 <= trunc {
            for (k2, y) in norm_chain(c, &sv_unit(e.key.clone())) {
                let lbl = EqKey {
                    t: e.t + 1,
                    theta: false,
                    key: k2,
                };
                sv_add_scaled(&mut out, &sv_unit(lbl), &twist.apply(x.clone() * y));
            }
        }
    }
    out
}

/// Generator action on the fixed-point complex, t- and theta-linear.
pub fn eq_tau<C, F>(c: &C, v: &EqChain<C::Key, F>) -> EqChain<C::Key, F>
where
    C: CyclicComplex<F>,
    F: Field,
{
    sv_apply(v, |e| {
        c.generator(&e.key)
            .into_iter()
            .map(|(k2, y)| {
                (
                    EqKey {
                        t: e.t,
                        theta: e.theta,
                        key: k2,
                    },
                    y,
                )
            })
            .collect()
    })
}

/// The homotopy between the generator action and the identity: it kills the
/// theta-free part and strips theta with the parity sign of the underlying
/// label. Satisfies d h + h d = tau - id on the truncated complex.
pub fn eq_homotopy<C, F>(c: &C, v: &EqChain<C::Key, F>) -> EqChain<C::Key, F>
where
    C: CyclicComplex<F>,
    F: Field,
{
    let mut out = sv_zero();
    for (e, x) in v {
        if !e.theta {
            continue;
        }
        let lbl = EqKey {
            t: e.t,
            theta: false,
            key: e.key.clone(),
        };
        let twist = Sign::from_parity(c.parity(&e.key));
        sv_add_scaled(&mut out, &sv_unit(lbl), &twist.apply(x.clone()));
    }
    out
}

/// Tensor product of two complexes with the diagonal action of the same
/// group.
pub struct Diagonal<'a, A, B> {
    pub left: &'a A,
    pub right: &'a B,
}

impl<F, A, B> BasedComplex<F> for Diagonal<'_, A, B>
where
    F: Field,
    A: BasedComplex<F>,
    B: BasedComplex<F>,
{
    type Key = (A::Key, B::Key);

    fn parity(&self, k: &Self::Key) -> Parity {
        self.left.parity(&k.0) + self.right.parity(&k.1)
    }

    fn boundary(&self, k: &Self::Key) -> SparseVec<Self::Key, F> {
        let mut out = sv_zero();
        for (a2, y) in self.left.boundary(&k.0) {
            sv_add_scaled(&mut out, &sv_unit((a2, k.1.clone())), &y);
        }
        let twist = Sign::from_parity(self.left.parity(&k.0));
        for (b2, y) in self.right.boundary(&k.1) {
            sv_add_scaled(&mut out, &sv_unit((k.0.clone(), b2)), &twist.apply(y));
        }
        out
    }
}

impl<F, A, B> CyclicComplex<F> for Diagonal<'_, A, B>
where
    F: Field,
    A: CyclicComplex<F>,
    B: CyclicComplex<F>,
{
    fn order(&self) -> usize {
        let p = self.left.order();
        assert_eq!(p, self.right.order(), "diagonal action needs equal orders");
        p
    }

    fn generator(&self, k: &Self::Key) -> SparseVec<Self::Key, F> {
        let mut out = sv_zero();
        for (a2, y) in self.left.generator(&k.0) {
            for (b2, z) in self.right.generator(&k.1) {
                sv_add_scaled(&mut out, &sv_unit((a2.clone(), b2)), &(y.clone() * z));
            }
        }
        out
    }
}

/// Tensor power of a complex with the rotation action: the last factor
/// moves to the front with the Koszul sign of the rotation.
pub struct CyclicPower<'a, A> {
    pub base: &'a A,
    pub power: usize,
}

impl<F, A> BasedComplex<F> for CyclicPower<'_, A>
where
    F: Field,
    A: BasedComplex<F>,
{
    type Key = Vec<A::Key>;

    fn parity(&self, k: &Self::Key) -> Parity {
        let mut p = Parity::from_usize(0);
        for a in k {
            p += self.base.parity(a);
        }
        p
    }

    fn boundary(&self, k: &Self::Key) -> SparseVec<Self::Key, F> {
        assert_eq!(k.len(), self.power);
        let mut out = sv_zero();
        let mut left = Parity::from_usize(0);
        for i in 0..k.len() {
            let twist = Sign::from_parity(left);
            for (a2, y) in self.base.boundary(&k[i]) {
                let mut k2 = k.clone();
                k2[i] = a2;
                sv_add_scaled(&mut out, &sv_unit(k2), &twist.apply(y));
            }
            left += self.base.parity(&k[i]);
        }
        out
    }
}

impl<F, A> CyclicComplex<F> for CyclicPower<'_, A>
where
    F: Field,
    A: BasedComplex<F>,
{
    fn order(&self) -> usize {
        self.power
    }

    fn generator(&self, k: &Self::Key) -> SparseVec<Self::Key, F> {
        assert_eq!(k.len(), self.power);
        if k.len() <= 1 {
            return sv_unit(k.clone());
        }
        let last = k[k.len() - 1].clone();
        let moved = self.base.parity(&last);
        let mut rest = Parity::from_usize(0);
        for a in &k[..k.len() - 1] {
            rest += self.base.parity(a);
        }
        let sign = crate::signs::rotation(moved, rest);
        let mut k2 = Vec::with_capacity(k.len());
        k2.push(last);
        k2.extend_from_slice(&k[..k.len() - 1]);
        sv_unit(k2)
            .into_iter()
            .map(|(kk, c)| (kk, sign.apply(c)))
            .collect()
    }
}

/// The structure map of homotopy fixed points against tensor products: four
/// cases, splitting on which of the two factors carries theta. The t-powers
/// add; when both factors carry theta the output picks up one more power of
/// t and the double sum of staggered group translates.
pub fn lax_monoidal<F, A, B>(
    a: &A,
    b: &B,
    va: &EqChain<A::Key, F>,
    vb: &EqChain<B::Key, F>,
    trunc: usize,
) -> EqChain<(A::Key, B::Key), F>
where
    F: Field,
    A: CyclicComplex<F>,
    B: CyclicComplex<F>,
{
    let p = a.order();
    assert_eq!(p, b.order(), "the two factors carry actions of equal order");
    let mut out: EqChain<(A::Key, B::Key), F> = sv_zero();
    for (ea, ca) in va {
        for (eb, cb) in vb {
            let t = ea.t + eb.t;
            if t > trunc {
                continue;
            }
            let coeff = ca.clone() * cb.clone();
            let ysign = Sign::from_parity(b.parity(&eb.key));
            match (ea.theta, eb.theta) {
                (false, false) => {
                    let lbl = EqKey {
                        t,
                        theta: false,
                        key: (ea.key.clone(), eb.key.clone()),
                    };
                    sv_add_scaled(&mut out, &sv_unit(lbl), &coeff);
                }
                (true, false) => {
                    for (kb2, y) in b.generator(&eb.key) {
                        let lbl = EqKey {
                            t,
                            theta: true,
                            key: (ea.key.clone(), kb2),
                        };
                        sv_add_scaled(&mut out, &sv_unit(lbl), &ysign.apply(coeff.clone() * y));
                    }
                }
                (false, true) => {
                    let lbl = EqKey {
                        t,
                        theta: true,
                        key: (ea.key.clone(), eb.key.clone()),
                    };
                    sv_add_scaled(&mut out, &sv_unit(lbl), &coeff);
                }
                (true, true) => {
                    if t + 1 > trunc {
                        continue;
                    }
                    let mut xs: Vec<SparseVec<A::Key, F>> = vec![sv_unit(ea.key.clone())];
                    let mut ys: Vec<SparseVec<B::Key, F>> = vec![sv_unit(eb.key.clone())];
                    for i in 1..p {
                        xs.push(tau_chain(a, &xs[i - 1]));
                        ys.push(tau_chain(b, &ys[i - 1]));
                    }
                    for i in 0..p {
                        for j in i + 1..p {
                            for (ka2, cx) in &xs[i] {
                                for (kb2, cy) in &ys[j] {
                                    let lbl = EqKey {
                                        t: t + 1,
                                        theta: false,
                                        key: (ka2.clone(), kb2.clone()),
                                    };
                                    let z = coeff.clone() * cx.clone() * cy.clone();
                                    sv_add_scaled(&mut out, &sv_unit(lbl), &ysign.apply(z));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// p-th tensor power of a cocycle, landing in the rotation-action power
/// complex. The closedness precondition is checked; the nonzero boundary is
/// returned as the error otherwise.
pub fn pth_power<C, F>(
    c: &C,
    v: &SparseVec<C::Key, F>,
    p: usize,
) -> Result<SparseVec<Vec<C::Key>, F>, SparseVec<C::Key, F>>
where
    C: BasedComplex<F>,
    F: Field,
{
    let dv = sv_apply(v, |k| c.boundary(k));
    if !dv.is_empty() {
        return Err(dv);
    }
    let mut out: SparseVec<Vec<C::Key>, F> = sv_unit(Vec::new());
    for _ in 0..p {
        let mut next = sv_zero();
        for (w, x) in &out {
            for (k, y) in v {
                let mut w2 = w.clone();
                w2.push(k.clone());
                sv_add_scaled(&mut next, &sv_unit(w2), &(x.clone() * y.clone()));
            }
        }
        out = next;
    }
    Ok(out)
}

/// The multi-fold Hochschild complex of a minimal model, as a complex with
/// its block-rotation action.
pub struct PFoldComplex<'a, F: Field> {
    pub model: &'a MinimalModel<F>,
    pub fold: usize,
    pub normalized: bool,
}

impl<F: Field> BasedComplex<F> for PFoldComplex<'_, F> {
    type Key = Word;

    fn parity(&self, w: &Word) -> Parity {
        w.parity()
    }

    fn boundary(&self, w: &Word) -> SparseVec<Word, F> {
        boundary_word(self.model, w, self.normalized)
    }
}

impl<F: Field> CyclicComplex<F> for PFoldComplex<'_, F> {
    fn order(&self) -> usize {
        self.fold
    }

    fn generator(&self, w: &Word) -> SparseVec<Word, F> {
        tau(&sv_unit(w.clone()))
    }
}

/// Equivariant diagonal cap product on the fixed-point complex of multi-fold
/// words. The operator tuple carries no t or theta, so the pairing through
/// the structure map reduces to applying the diagonal cap to every series
/// coefficient.
pub fn eq_cap_chain<F: Field>(f: &PreMor<F>, v: &EqChain<Word, F>) -> EqChain<Word, F> {
    let mut out = sv_zero();
    for (e, x) in v {
        for (w2, y) in cap_diagonal(f, &e.key) {
            let lbl = EqKey {
                t: e.t,
                theta: e.theta,
                key: w2,
            };
            sv_add_scaled(&mut out, &sv_unit(lbl), &(x.clone() * y));
        }
    }
    out
}
