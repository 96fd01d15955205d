//! The standard periodic free resolution of the cyclic group of odd prime
//! order, its tensor square with the diagonal action, an equivariant
//! diagonal approximation constructed by recursive splitting, and the
//! correction chain family that measures the gap between the diagonal
//! approximation and the cross products of cells.
//!
//! Chains are finitely supported sums of group-algebra multiples of one
//! free generator per degree. Everything is exact over the prime field;
//! the contracting homotopy is a finite linear solve in each bounded
//! bidegree, so every produced identity is certified by construction and
//! re-checked by the callers' tests.

use crate::linear::{solve, sv_add_scaled, sv_is_zero, sv_zero, SolveOutcome, SparseVec};
use crate::scalars::{Field, Fp};
use std::fmt;

/// Label of one basis chain of the resolution: (degree, power of the
/// rotation acting on the degree's generator).
pub type WLabel = (usize, u64);

/// Label of one basis chain of the product complex: (left degree, right
/// degree, left rotation power, right rotation power).
pub type PLabel = (usize, usize, u64, u64);

/// Failure modes of the homotopy and chain-family solvers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DiagonalError {
    /// The input to the contracting homotopy has a nonzero boundary, so
    /// it cannot bound; `degree` is a total degree where the boundary
    /// does not vanish.
    NotACycle { degree: usize },
    /// A degree zero input bounds only when its augmentation vanishes.
    NonZeroAugmentation,
    /// A right-hand side of the correction recursion failed its cycle
    /// test; this indicates a defect in the caller-supplied data, since
    /// the recursion guarantees a cycle for a genuine chain map.
    RecursionDefect { step: usize },
}

impl fmt::Display for DiagonalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiagonalError::NotACycle { degree } => {
                write!(f, "input chain is not a cycle: boundary survives in degree {degree}")
            }
            DiagonalError::NonZeroAugmentation => {
                write!(f, "degree zero chain with nonzero augmentation does not bound")
            }
            DiagonalError::RecursionDefect { step } => {
                write!(f, "recursion right-hand side at step {step} is not a cycle")
            }
        }
    }
}

impl std::error::Error for DiagonalError {}

/// Chain in the standard periodic resolution: one free generator per
/// degree over the group algebra of the cyclic group of order `P`, with
/// boundary alternating between rotation-minus-one (odd degrees) and the
/// norm (positive even degrees).
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ResolutionChain<const P: u64> {
    pub terms: SparseVec<WLabel, Fp<P>>,
}

impl<const P: u64> ResolutionChain<P> {
    pub fn zero() -> Self {
        ResolutionChain { terms: sv_zero() }
    }

    /// The degree `i` generator with coefficient one and no rotation.
    pub fn generator(i: usize) -> Self {
        let mut terms = sv_zero();
        terms.insert((i, 0), Fp::<P>::one());
        ResolutionChain { terms }
    }

    pub fn is_zero(&self) -> bool {
        sv_is_zero(&self.terms)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        sv_add_scaled(&mut terms, &other.terms, &Fp::<P>::one());
        ResolutionChain { terms }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        sv_add_scaled(&mut terms, &other.terms, &(-Fp::<P>::one()));
        ResolutionChain { terms }
    }

    pub fn scale(&self, c: Fp<P>) -> Self {
        let mut terms = sv_zero();
        sv_add_scaled(&mut terms, &self.terms, &c);
        ResolutionChain { terms }
    }

    /// Multiply by the `a`-th power of the rotation.
    pub fn tau(&self, a: u64) -> Self {
        let shift = a % P;
        let mut terms = sv_zero();
        for (&(i, e), c) in &self.terms {
            let mut bucket = sv_zero();
            bucket.insert((i, (e + shift) % P), *c);
            sv_add_scaled(&mut terms, &bucket, &Fp::<P>::one());
        }
        ResolutionChain { terms }
    }

    /// Multiply by rotation minus one.
    pub fn tau_minus_one(&self) -> Self {
        self.tau(1).sub(self)
    }

    /// Multiply by the norm element (the sum of all rotation powers).
    pub fn norm(&self) -> Self {
        let mut out = Self::zero();
        for a in 0..P {
            out = out.add(&self.tau(a));
        }
        out
    }

    /// Boundary of the periodic resolution: rotation minus one out of
    /// odd degrees, the norm out of positive even degrees, zero out of
    /// degree zero.
    pub fn boundary(&self) -> Self {
        let mut out = Self::zero();
        for (&(i, e), c) in &self.terms {
            if i == 0 {
                continue;
            }
            let mut gen_below = Self::zero();
            gen_below.terms.insert((i - 1, e), *c);
            let piece = if i % 2 == 1 {
                gen_below.tau_minus_one()
            } else {
                gen_below.norm()
            };
            out = out.add(&piece);
        }
        out
    }
}

/// Chain in the tensor square of the resolution, with the product group
/// acting coordinatewise and the boundary carrying the parity sign of
/// the left degree on the right factor.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ProductChain<const P: u64> {
    pub terms: SparseVec<PLabel, Fp<P>>,
}

impl<const P: u64> ProductChain<P> {
    pub fn zero() -> Self {
        ProductChain { terms: sv_zero() }
    }

    pub fn is_zero(&self) -> bool {
        sv_is_zero(&self.terms)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        sv_add_scaled(&mut terms, &other.terms, &Fp::<P>::one());
        ProductChain { terms }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        sv_add_scaled(&mut terms, &other.terms, &(-Fp::<P>::one()));
        ProductChain { terms }
    }

    pub fn scale(&self, c: Fp<P>) -> Self {
        let mut terms = sv_zero();
        sv_add_scaled(&mut terms, &self.terms, &c);
        ProductChain { terms }
    }

    /// Cross product of two resolution chains; bilinear, no sign.
    pub fn pair(x: &ResolutionChain<P>, y: &ResolutionChain<P>) -> Self {
        let mut terms = sv_zero();
        for (&(i, e1), c1) in &x.terms {
            for (&(j, e2), c2) in &y.terms {
                let mut bucket = sv_zero();
                bucket.insert((i, j, e1, e2), *c1 * *c2);
                sv_add_scaled(&mut terms, &bucket, &Fp::<P>::one());
            }
        }
        ProductChain { terms }
    }

    /// Diagonal rotation: both coordinates shifted by `a`.
    pub fn diag_tau(&self, a: u64) -> Self {
        let shift = a % P;
        let mut terms = sv_zero();
        for (&(i, j, e1, e2), c) in &self.terms {
            let mut bucket = sv_zero();
            bucket.insert((i, j, (e1 + shift) % P, (e2 + shift) % P), *c);
            sv_add_scaled(&mut terms, &bucket, &Fp::<P>::one());
        }
        ProductChain { terms }
    }

    /// Sum of all diagonal rotation powers.
    pub fn diag_norm(&self) -> Self {
        let mut out = Self::zero();
        for a in 0..P {
            out = out.add(&self.diag_tau(a));
        }
        out
    }

    /// Tensor boundary: boundary on the left factor plus, with the sign
    /// of the left degree's parity, boundary on the right factor.
    pub fn boundary(&self) -> Self {
        let mut out = Self::zero();
        for (&(i, j, e1, e2), c) in &self.terms {
            if i > 0 {
                let mut left = ResolutionChain::<P>::zero();
                left.terms.insert((i, e1), *c);
                let mut right = ResolutionChain::<P>::zero();
                right.terms.insert((j, e2), Fp::<P>::one());
                out = out.add(&Self::pair(&left.boundary(), &right));
            }
            if j > 0 {
                let sign = if i % 2 == 1 {
                    -Fp::<P>::one()
                } else {
                    Fp::<P>::one()
                };
                let mut left = ResolutionChain::<P>::zero();
                left.terms.insert((i, e1), *c * sign);
                let mut right = ResolutionChain::<P>::zero();
                right.terms.insert((j, e2), Fp::<P>::one());
                out = out.add(&Self::pair(&left, &right.boundary()));
            }
        }
        out
    }

    /// Sum of the coefficients sitting in bidegree (0, 0); the chain
    /// bounds in degree zero exactly when this vanishes.
    pub fn augmentation(&self) -> Fp<P> {
        let mut acc = Fp::<P>::zero();
        for (&(i, j, _, _), c) in &self.terms {
            if i == 0 && j == 0 {
                acc = acc + *c;
            }
        }
        acc
    }

    /// Coefficients after killing both rotations: the image of the chain
    /// in the full coinvariant complex, indexed by bidegree. The
    /// coinvariant complex has zero differential, so for a chain map
    /// image this table is its homology class.
    pub fn coinvariant_table(&self) -> SparseVec<(usize, usize), Fp<P>> {
        let mut out = sv_zero();
        for (&(i, j, _, _), c) in &self.terms {
            let mut bucket = sv_zero();
            bucket.insert((i, j), *c);
            sv_add_scaled(&mut out, &bucket, &Fp::<P>::one());
        }
        out
    }
}

/// Split a cycle: return a chain whose boundary is the input. The input
/// must be a cycle, and its degree zero part must have zero
/// augmentation; the product of two acyclic augmented complexes is
/// acyclic, so under those preconditions a splitting always exists and
/// is found by an exact linear solve in each total degree.
pub fn contracting_homotopy<const P: u64>(
    b: &ProductChain<P>,
) -> Result<ProductChain<P>, DiagonalError> {
    if b.is_zero() {
        return Ok(ProductChain::zero());
    }
    let db = b.boundary();
    if !db.is_zero() {
        let degree = db
            .terms
            .keys()
            .map(|&(i, j, _, _)| i + j)
            .min()
            .expect("nonzero chain has a term");
        return Err(DiagonalError::NotACycle { degree });
    }
    if !b.augmentation().is_zero() {
        return Err(DiagonalError::NonZeroAugmentation);
    }

    // Group the input by total degree and split each part in the finite
    // window of bidegrees one higher.
    let mut parts: std::collections::BTreeMap<usize, SparseVec<PLabel, Fp<P>>> =
        std::collections::BTreeMap::new();
    for (&lab, c) in &b.terms {
        let (i, j, _, _) = lab;
        parts.entry(i + j).or_default().insert(lab, *c);
    }

    let mut out = ProductChain::<P>::zero();
    for (&n, part) in &parts {
        let mut columns: Vec<(PLabel, SparseVec<PLabel, Fp<P>>)> = Vec::new();
        for i in 0..=(n + 1) {
            let j = n + 1 - i;
            for e1 in 0..P {
                for e2 in 0..P {
                    let mut basis = ProductChain::<P>::zero();
                    basis.terms.insert((i, j, e1, e2), Fp::<P>::one());
                    columns.push(((i, j, e1, e2), basis.boundary().terms));
                }
            }
        }
        match solve(columns, part) {
            SolveOutcome::Solution(x) => {
                sv_add_scaled(&mut out.terms, &x, &Fp::<P>::one());
            }
            SolveOutcome::Inconsistent { .. } => {
                unreachable!("the product of two acyclic resolutions is acyclic")
            }
        }
    }
    debug_assert!(out.boundary().sub(b).is_zero());
    Ok(out)
}

/// Equivariant approximation of the diagonal: the image of each
/// generator, extended to arbitrary chains by linearity and the diagonal
/// rotation action.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalMap<const P: u64> {
    /// `images[i]` is the image of the degree `i` generator; a chain of
    /// total degree `i`.
    pub images: Vec<ProductChain<P>>,
}

impl<const P: u64> DiagonalMap<P> {
    pub fn max_degree(&self) -> usize {
        self.images.len() - 1
    }

    /// Apply to a chain; every term's degree must be within the built
    /// range.
    pub fn apply(&self, x: &ResolutionChain<P>) -> ProductChain<P> {
        let mut out = ProductChain::<P>::zero();
        for (&(i, e), c) in &x.terms {
            assert!(
                i <= self.max_degree(),
                "diagonal approximation was built only to degree {}",
                self.max_degree()
            );
            out = out.add(&self.images[i].diag_tau(e).scale(*c));
        }
        out
    }
}

/// Build the diagonal approximation degree by degree: the degree zero
/// generator goes to the product of the two degree zero generators, and
/// each higher image splits the image of the generator's boundary. The
/// result is a chain map, equivariant for the diagonal rotation by
/// construction.
pub fn diagonal_approximation<const P: u64>(max_degree: usize) -> DiagonalMap<P> {
    let mut images: Vec<ProductChain<P>> = Vec::with_capacity(max_degree + 1);
    let seed = ProductChain::<P>::pair(
        &ResolutionChain::<P>::generator(0),
        &ResolutionChain::<P>::generator(0),
    );
    images.push(seed);
    for i in 1..=max_degree {
        let partial = DiagonalMap {
            images: images.clone(),
        };
        let rhs = partial.apply(&ResolutionChain::<P>::generator(i).boundary());
        let image = contracting_homotopy(&rhs)
            .expect("the image of a boundary under a chain map is a cycle");
        images.push(image);
    }
    DiagonalMap { images }
}

/// The right-hand side of the correction recursion at step `i`: what the
/// boundary of the next correction chain must equal. Odd steps compare
/// the diagonal against all cross products plus single-rotation defect
/// terms and a diagonal-rotation defect of the previous correction; even
/// steps use only even-even cross products, the strictly ordered double
/// rotation sum on odd-odd pairs, and the full diagonal norm of the
/// previous correction.
pub fn recursion_rhs<const P: u64>(
    i: usize,
    delta: &DiagonalMap<P>,
    previous: &ProductChain<P>,
) -> ProductChain<P> {
    let gen = ResolutionChain::<P>::generator;
    let mut rhs = delta.apply(&gen(i));
    if i % 2 == 1 {
        for i1 in 0..=i {
            let i2 = i - i1;
            rhs = rhs.sub(&ProductChain::pair(&gen(i1), &gen(i2)));
        }
        for i1 in (1..=i).step_by(2) {
            let i2 = i - i1;
            rhs = rhs.sub(&ProductChain::pair(&gen(i1), &gen(i2).tau_minus_one()));
        }
        rhs = rhs.sub(&previous.diag_tau(1).sub(previous));
    } else {
        for i1 in (0..=i).step_by(2) {
            let i2 = i - i1;
            rhs = rhs.sub(&ProductChain::pair(&gen(i1), &gen(i2)));
        }
        for i1 in (1..=i).step_by(2) {
            let i2 = i - i1;
            for k in 0..P {
                for j in (k + 1)..P {
                    rhs = rhs.sub(&ProductChain::pair(&gen(i1).tau(k), &gen(i2).tau(j)));
                }
            }
        }
        rhs = rhs.sub(&previous.diag_norm());
    }
    rhs
}

/// The diagonal approximation together with its correction chain family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalChains<const P: u64> {
    pub delta: DiagonalMap<P>,
    /// `chains[i]` is the `i`-th correction chain; the first two are
    /// zero and each later one splits the recursion right-hand side of
    /// the previous step.
    pub chains: Vec<ProductChain<P>>,
}

/// Solve the correction recursion through the chain of index `max_i`.
/// Every right-hand side is verified to be a cycle before splitting; a
/// failure is reported as a defect, since a genuine equivariant chain
/// map makes each right-hand side a cycle.
pub fn solve_diagonal_chains<const P: u64>(
    max_i: usize,
) -> Result<DiagonalChains<P>, DiagonalError> {
    let delta = diagonal_approximation::<P>(max_i.max(1));
    let mut chains: Vec<ProductChain<P>> = vec![ProductChain::zero()];
    for i in 0..max_i {
        let rhs = recursion_rhs(i, &delta, &chains[i]);
        let next = match contracting_homotopy(&rhs) {
            Ok(x) => x,
            Err(_) => return Err(DiagonalError::RecursionDefect { step: i }),
        };
        chains.push(next);
    }
    Ok(DiagonalChains { delta, chains })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gen<const P: u64>(i: usize) -> ResolutionChain<P> {
        ResolutionChain::<P>::generator(i)
    }

    fn boundary_squares_to_zero<const P: u64>() {
        for i in 0..=8 {
            assert!(gen::<P>(i).boundary().boundary().is_zero());
        }
        for i in 0..=4 {
            for j in 0..=4 {
                let x = ProductChain::<P>::pair(&gen::<P>(i).tau(1), &gen::<P>(j));
                assert!(x.boundary().boundary().is_zero(), "bidegree ({i}, {j})");
            }
        }
    }

    #[test]
    fn resolution_boundary_matches_the_periodic_formulas() {
        // Rotation minus one out of odd degrees.
        let d3 = gen::<3>(3).boundary();
        assert_eq!(d3, gen::<3>(2).tau(1).sub(&gen::<3>(2)));
        // The norm out of positive even degrees.
        let d2 = gen::<3>(2).boundary();
        let norm = gen::<3>(1).add(&gen::<3>(1).tau(1)).add(&gen::<3>(1).tau(2));
        assert_eq!(d2, norm);
        // Degree zero is a cycle.
        assert!(gen::<3>(0).boundary().is_zero());
        // The composite vanishes because (rotation - 1) kills the norm.
        assert!(gen::<3>(4).boundary().boundary().is_zero());
        boundary_squares_to_zero::<3>();
        boundary_squares_to_zero::<5>();
        boundary_squares_to_zero::<7>();
    }

    #[test]
    fn product_boundary_carries_the_parity_sign_on_the_right_factor() {
        // Degree (1,1): the right factor's boundary enters negated.
        let x = ProductChain::<3>::pair(&gen::<3>(1), &gen::<3>(1));
        let expected = ProductChain::pair(&gen::<3>(1).boundary(), &gen::<3>(1)).sub(
            &ProductChain::pair(&gen::<3>(1), &gen::<3>(1).boundary()),
        );
        assert_eq!(x.boundary(), expected);
        // Degree (0,1): no sign.
        let y = ProductChain::<3>::pair(&gen::<3>(0), &gen::<3>(1));
        assert_eq!(
            y.boundary(),
            ProductChain::pair(&gen::<3>(0), &gen::<3>(1).boundary())
        );
        // Degree (2,1): even left degree, no sign.
        let z = ProductChain::<3>::pair(&gen::<3>(2), &gen::<3>(1));
        let expected = ProductChain::pair(&gen::<3>(2).boundary(), &gen::<3>(1)).add(
            &ProductChain::pair(&gen::<3>(2), &gen::<3>(1).boundary()),
        );
        assert_eq!(z.boundary(), expected);
    }

    #[test]
    fn contracting_homotopy_splits_verified_cycles() {
        // The zero chain splits as zero.
        assert_eq!(
            contracting_homotopy(&ProductChain::<3>::zero()).unwrap(),
            ProductChain::<3>::zero()
        );
        // A rotation defect of the bottom cell bounds.
        let bottom = ProductChain::<3>::pair(&gen::<3>(0), &gen::<3>(0));
        let b = bottom.diag_tau(1).sub(&bottom);
        let x = contracting_homotopy(&b).unwrap();
        assert_eq!(x.boundary(), b);
        // The bottom cell itself has augmentation one and does not
        // bound.
        assert_eq!(
            contracting_homotopy(&bottom).unwrap_err(),
            DiagonalError::NonZeroAugmentation
        );
        // A non-cycle is rejected with the degree where its boundary
        // survives.
        let not_cycle = ProductChain::<3>::pair(&gen::<3>(1), &gen::<3>(0));
        assert_eq!(
            contracting_homotopy(&not_cycle).unwrap_err(),
            DiagonalError::NotACycle { degree: 0 }
        );
        // Splitting the boundary of a known chain recovers some chain
        // with the same boundary.
        let witness = ProductChain::<5>::pair(&gen::<5>(2).tau(3), &gen::<5>(1))
            .add(&ProductChain::pair(&gen::<5>(0), &gen::<5>(3).tau(1)));
        let b = witness.boundary();
        let y = contracting_homotopy(&b).unwrap();
        assert_eq!(y.boundary(), b);
    }

    fn diagonal_is_chain_map<const P: u64>(max_degree: usize) {
        let delta = diagonal_approximation::<P>(max_degree);
        let seed = ProductChain::<P>::pair(&gen::<P>(0), &gen::<P>(0));
        assert_eq!(delta.images[0], seed);
        for i in 1..=max_degree {
            let lhs = delta.images[i].boundary();
            let rhs = delta.apply(&gen::<P>(i).boundary());
            assert_eq!(lhs, rhs, "chain map fails at degree {i}");
        }
        // Equivariance of the extension: rotating the input rotates the
        // output diagonally.
        let x = gen::<P>(max_degree).tau(2).add(&gen::<P>(1));
        assert_eq!(delta.apply(&x.tau(1)), delta.apply(&x).diag_tau(1));
    }

    #[test]
    fn diagonal_approximation_is_an_equivariant_chain_map() {
        diagonal_is_chain_map::<3>(8);
        diagonal_is_chain_map::<5>(8);
        diagonal_is_chain_map::<7>(8);
        // Named small instance: the degree two image's boundary equals
        // the image of the norm of the degree one generator.
        let delta = diagonal_approximation::<3>(2);
        assert_eq!(
            delta.images[2].boundary(),
            delta.apply(&gen::<3>(2).boundary())
        );
    }

    fn coinvariant_pattern_holds<const P: u64>(max_degree: usize) {
        let delta = diagonal_approximation::<P>(max_degree);
        for i in 0..=max_degree {
            let table = delta.images[i].coinvariant_table();
            for i1 in 0..=i {
                let i2 = i - i1;
                let got = table.get(&(i1, i2)).copied().unwrap_or_else(Fp::<P>::zero);
                let expected = if i % 2 == 1 || (i1 % 2 == 0 && i2 % 2 == 0) {
                    Fp::<P>::one()
                } else {
                    Fp::<P>::zero()
                };
                assert_eq!(
                    got, expected,
                    "coinvariant coefficient at ({i1}, {i2}) for degree {i}"
                );
            }
            // Nothing outside total degree i.
            for (&(a, b), c) in &table {
                if a + b != i {
                    assert!(c.is_zero());
                }
            }
        }
    }

    #[test]
    fn diagonal_approximation_reproduces_the_coinvariant_pattern() {
        coinvariant_pattern_holds::<3>(8);
        coinvariant_pattern_holds::<5>(8);
        coinvariant_pattern_holds::<7>(6);
    }

    fn recursion_holds<const P: u64>(max_i: usize) {
        let out = solve_diagonal_chains::<P>(max_i).unwrap();
        assert!(out.chains[0].is_zero());
        assert_eq!(out.chains.len(), max_i + 1);
        for i in 0..max_i {
            let rhs = recursion_rhs(i, &out.delta, &out.chains[i]);
            // The right-hand side is a cycle on its own.
            assert!(rhs.boundary().is_zero(), "right side at step {i}");
            // And the solved chain splits it exactly.
            assert_eq!(out.chains[i + 1].boundary(), rhs, "recursion at step {i}");
        }
    }

    #[test]
    fn chain_family_satisfies_the_recursion_exactly() {
        recursion_holds::<3>(6);
        recursion_holds::<5>(6);
        recursion_holds::<7>(4);
    }

    #[test]
    fn first_recursion_steps_match_the_hand_expansion() {
        // Step zero is trivial: the seed makes the right side vanish, so
        // the first correction chain is zero.
        let out = solve_diagonal_chains::<3>(2).unwrap();
        let rhs0 = recursion_rhs(0, &out.delta, &out.chains[0]);
        assert!(rhs0.is_zero());
        assert!(out.chains[1].is_zero());

        // Step one spelled out term by term: all cross products of total
        // degree one, the single rotation-defect term, and the rotation
        // defect of the (zero) previous chain.
        let g = gen::<3>;
        let rhs1 = out
            .delta
            .apply(&g(1))
            .sub(&ProductChain::pair(&g(0), &g(1)))
            .sub(&ProductChain::pair(&g(1), &g(0)))
            .sub(&ProductChain::pair(&g(1), &g(0).tau_minus_one()))
            .sub(&out.chains[1].diag_tau(1).sub(&out.chains[1]));
        assert_eq!(rhs1, recursion_rhs(1, &out.delta, &out.chains[1]));
        assert_eq!(out.chains[2].boundary(), rhs1);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn homotopy_splits_random_boundaries(
            support in proptest::collection::vec(
                (0usize..4, 0usize..4, 0u64..3, 0u64..3, 1u64..3),
                1..6,
            ),
        ) {
            let mut witness = ProductChain::<3>::zero();
            for (i, j, e1, e2, c) in support {
                let mut bucket = ProductChain::<3>::zero();
                bucket.terms.insert((i, j, e1, e2), Fp::<3>::new(c as i64));
                witness = witness.add(&bucket);
            }
            let b = witness.boundary();
            let y = contracting_homotopy(&b).unwrap();
            prop_assert_eq!(y.boundary(), b);
        }

        #[test]
        fn diagonal_application_is_equivariant_and_linear(
            terms in proptest::collection::vec((0usize..5, 0u64..3, 1u64..3), 1..5),
            shift in 0u64..3,
        ) {
            let delta = diagonal_approximation::<3>(5);
            let mut x = ResolutionChain::<3>::zero();
            for (i, e, c) in terms {
                let mut bucket = ResolutionChain::<3>::zero();
                bucket.terms.insert((i, e), Fp::<3>::new(c as i64));
                x = x.add(&bucket);
            }
            prop_assert_eq!(
                delta.apply(&x.tau(shift)),
                delta.apply(&x).diag_tau(shift)
            );
            // The applied map is a chain map on arbitrary chains, not
            // just generators.
            prop_assert_eq!(delta.apply(&x.boundary()), delta.apply(&x).boundary());
        }
    }
}
