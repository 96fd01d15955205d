//! Twisted de Rham side for a univariate monomial potential.
//!
//! The ring is k[[z]] truncated far above every degree a computation can
//! reach, with potential f = z^weight. Polyvector fields contract against
//! df, twisted forms carry a formal variable t with differential
//! t d - df (or t d + df: both target signs of the displayed action are
//! implemented, and the matrix comparison reports which one the lifted cap
//! action matches).
//!
//! Degree-1 twisted homology is a free truncated t-module on the classes of
//! z^k dz for k below weight-1; the function class z acts by multiplication
//! with z^fold. The resulting matrix is held in the same shape as the cap
//! action matrix of the minimal model so the two sides compare entry by
//! entry through the index-reversing dictionary.

use std::fmt;

use crate::an_model::{CapAction, CapCoord};
use crate::linear::{sv_add_scaled, sv_is_zero, sv_unit, sv_zero, Rref, SparseVec};
use crate::scalars::Field;

/// Truncated power series in z, sparsely supported.
pub type ZPoly<F> = SparseVec<usize, F>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DeRhamError {
    FoldDividesWeight { fold: usize, weight: usize },
    WeightNotInvertible { weight: usize },
    FoldNotOdd { fold: usize },
    /// A product or differential reached the z-truncation order, so the
    /// computation would no longer be exact.
    WindowExceeded { degree: usize, window: usize },
    /// A 1-form failed to reduce onto the generator classes.
    ReductionFailed,
    /// Input to a class-level operation had a function component.
    NotAForm,
}

impl fmt::Display for DeRhamError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeRhamError::FoldDividesWeight { fold, weight } => {
                write!(f, "fold {fold} divides the weight {weight}")
            }
            DeRhamError::WeightNotInvertible { weight } => {
                write!(f, "the weight {weight} is not invertible in the coefficient field")
            }
            DeRhamError::FoldNotOdd { fold } => write!(f, "fold {fold} is even"),
            DeRhamError::WindowExceeded { degree, window } => {
                write!(f, "degree {degree} reached the z-truncation window {window}")
            }
            DeRhamError::ReductionFailed => write!(f, "form lies outside the generator span"),
            DeRhamError::NotAForm => write!(f, "operand has a function component"),
        }
    }
}

impl std::error::Error for DeRhamError {}

/// An even function plus an odd vector field g0 + g1 d/dz.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct PolyVector<F: Field> {
    pub scalar: ZPoly<F>,
    pub vector: ZPoly<F>,
}

/// A truncated t-series of mixed forms: function parts and dz-parts, both
/// keyed by (t-power, z-exponent).
#[derive(Clone, Debug, PartialEq, Default)]
pub struct TwistedForm<F: Field> {
    pub functions: SparseVec<(usize, usize), F>,
    pub forms: SparseVec<(usize, usize), F>,
}

impl<F: Field> TwistedForm<F> {
    pub fn new() -> Self {
        TwistedForm {
            functions: sv_zero(),
            forms: sv_zero(),
        }
    }

    /// z^exp dz at t-power `t`.
    pub fn monomial_form(t: usize, exp: usize) -> Self {
        TwistedForm {
            functions: sv_zero(),
            forms: sv_unit((t, exp)),
        }
    }

    /// z^exp at t-power `t`.
    pub fn monomial_function(t: usize, exp: usize) -> Self {
        TwistedForm {
            functions: sv_unit((t, exp)),
            forms: sv_zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        sv_is_zero(&self.functions) && sv_is_zero(&self.forms)
    }

    pub fn add_scaled(&mut self, other: &Self, c: &F) {
        sv_add_scaled(&mut self.functions, &other.functions, c);
        sv_add_scaled(&mut self.forms, &other.forms, c);
    }
}

fn poly_mul<F: Field>(a: &ZPoly<F>, b: &ZPoly<F>, window: usize) -> Result<ZPoly<F>, DeRhamError> {
    let mut out: ZPoly<F> = sv_zero();
    for (i, x) in a {
        for (j, y) in b {
            let d = i + j;
            if d >= window {
                return Err(DeRhamError::WindowExceeded { degree: d, window });
            }
            sv_add_scaled(&mut out, &sv_unit(d), &(x.clone() * y.clone()));
        }
    }
    Ok(out)
}

fn poly_pow<F: Field>(g: &ZPoly<F>, e: usize, window: usize) -> Result<ZPoly<F>, DeRhamError> {
    let mut out: ZPoly<F> = sv_unit(0);
    for _ in 0..e {
        out = poly_mul(&out, g, window)?;
    }
    Ok(out)
}

fn poly_derivative<F: Field>(g: &ZPoly<F>) -> ZPoly<F> {
    let mut out: ZPoly<F> = sv_zero();
    for (i, x) in g {
        if *i >= 1 {
            sv_add_scaled(&mut out, &sv_unit(i - 1), &(x.clone() * F::from_i64(*i as i64)));
        }
    }
    out
}

/// Basis data of the contraction complex of polyvector fields: the function
/// quotient and the kernel rank of the contraction on vector fields.
pub struct KoszulBasis {
    pub function_exponents: Vec<usize>,
    pub vector_kernel_rank: usize,
}

/// One target sign of the twisted de Rham complex for f = z^weight, with
/// the generator reduction data built eagerly.
pub struct DeRham<F: Field> {
    pub weight: usize,
    pub fold: usize,
    pub t_order: usize,
    /// z-truncation; every product is checked to stay strictly below it.
    pub z_order: usize,
    /// Sign of the df-wedge term in the differential: false gives
    /// t d - df, true gives t d + df.
    pub target_plus: bool,
    /// Rank of degree-1 homology as a truncated module: (weight-1)(t_order+1).
    pub generator_count: usize,
    /// Kernel rank of the differential on degree-0 elements in the window.
    pub function_kernel_rank: usize,
    relations: Rref<(usize, usize), (usize, usize), F>,
    generators: Rref<(usize, usize), CapCoord, F>,
}

impl<F: Field> DeRham<F> {
    pub fn new(
        weight: usize,
        fold: usize,
        t_order: usize,
        target_plus: bool,
    ) -> Result<Self, DeRhamError> {
        if weight % fold == 0 {
            return Err(DeRhamError::FoldDividesWeight { fold, weight });
        }
        if F::from_i64(weight as i64).inv().is_none() {
            return Err(DeRhamError::WeightNotInvertible { weight });
        }
        let z_order = 3 * weight + fold * weight.saturating_sub(2);
        let mut ring = DeRham {
            weight,
            fold,
            t_order,
            z_order,
            target_plus,
            generator_count: 0,
            function_kernel_rank: 0,
            relations: Rref::new(),
            generators: Rref::new(),
        };
        // boundaries of every monomial function in the window span the
        // relations; kernel columns are counted as degree-0 homology
        for a in 0..=t_order {
            for j in 0..=z_order - weight {
                let d = ring
                    .twisted_boundary(&TwistedForm::monomial_function(a, j))
                    .expect("window bound keeps boundaries exact");
                if sv_is_zero(&d.forms) {
                    ring.function_kernel_rank += 1;
                } else {
                    let _ = ring.relations.push((a, j), d.forms);
                }
            }
        }
        // the low monomial forms reduce to independent residues
        for a in 0..=t_order {
            for k in 0..=weight - 2 {
                let (residue, _) = ring.relations.reduce(&sv_unit((a, k)));
                let label = CapCoord {
                    target: k,
                    t: a,
                    theta: false,
                };
                if ring.generators.push(label, residue).is_none() {
                    ring.generator_count += 1;
                }
            }
        }
        Ok(ring)
    }

    /// Contraction of the vector part against df = weight z^{weight-1}.
    pub fn contract_potential(&self, d: &PolyVector<F>) -> Result<ZPoly<F>, DeRhamError> {
        let mut df: ZPoly<F> = sv_zero();
        df.insert(self.weight - 1, F::from_i64(self.weight as i64));
        poly_mul(&d.vector, &df, self.z_order)
    }

    /// Contraction complex homology, computed by row reduction in the safe
    /// window: the function quotient modulo the contraction image, and the
    /// kernel of the contraction on vector fields.
    pub fn koszul(&self) -> KoszulBasis {
        let window = self.z_order - (self.weight - 1);
        let mut image: Rref<usize, usize, F> = Rref::new();
        let mut kernel = 0usize;
        for j in 0..window {
            let mut col: ZPoly<F> = sv_zero();
            sv_add_scaled(
                &mut col,
                &sv_unit(self.weight - 1 + j),
                &F::from_i64(self.weight as i64),
            );
            if image.push(j, col).is_some() {
                kernel += 1;
            }
        }
        let mut function_exponents = Vec::new();
        for m in 0..window {
            let (residue, _) = image.reduce(&sv_unit(m));
            if !sv_is_zero(&residue) {
                function_exponents.push(m);
            }
        }
        KoszulBasis {
            function_exponents,
            vector_kernel_rank: kernel,
        }
    }

    /// t d - df (or + df) on a mixed form; dz-parts map to zero since there
    /// are no 2-forms in one variable. Powers of t beyond the truncation
    /// order are dropped.
    pub fn twisted_boundary(&self, w: &TwistedForm<F>) -> Result<TwistedForm<F>, DeRhamError> {
        let mut out = TwistedForm::new();
        let wedge_sign = if self.target_plus {
            F::one()
        } else {
            -F::one()
        };
        for ((a, j), c) in &w.functions {
            if *j >= 1 && a + 1 <= self.t_order {
                sv_add_scaled(
                    &mut out.forms,
                    &sv_unit((a + 1, j - 1)),
                    &(c.clone() * F::from_i64(*j as i64)),
                );
            }
            let d = j + self.weight - 1;
            if d >= self.z_order {
                return Err(DeRhamError::WindowExceeded {
                    degree: d,
                    window: self.z_order,
                });
            }
            sv_add_scaled(
                &mut out.forms,
                &sv_unit((*a, d)),
                &(c.clone() * wedge_sign.clone() * F::from_i64(self.weight as i64)),
            );
        }
        Ok(out)
    }

    /// Coordinates of a closed degree-1 form on the generator classes
    /// [z^k dz] t^a.
    pub fn reduce(&self, w: &TwistedForm<F>) -> Result<SparseVec<CapCoord, F>, DeRhamError> {
        if !sv_is_zero(&w.functions) {
            return Err(DeRhamError::NotAForm);
        }
        let (residue, _) = self.relations.reduce(&w.forms);
        let (rest, coords) = self.generators.reduce(&residue);
        if !sv_is_zero(&rest) {
            return Err(DeRhamError::ReductionFailed);
        }
        Ok(coords)
    }

    /// Multiplication by the fold-th power of the function, reduced to the
    /// generator classes.
    pub fn function_action(
        &self,
        g: &ZPoly<F>,
        w: &TwistedForm<F>,
    ) -> Result<SparseVec<CapCoord, F>, DeRhamError> {
        if !sv_is_zero(&w.functions) {
            return Err(DeRhamError::NotAForm);
        }
        let gp = poly_pow(g, self.fold, self.z_order)?;
        let mut out = TwistedForm::new();
        for ((a, j), c) in &w.forms {
            for (i, x) in &gp {
                let d = i + j;
                if d >= self.z_order {
                    return Err(DeRhamError::WindowExceeded {
                        degree: d,
                        window: self.z_order,
                    });
                }
                sv_add_scaled(&mut out.forms, &sv_unit((*a, d)), &(c.clone() * x.clone()));
            }
        }
        self.reduce(&out)
    }

    /// Matrix of the action of the coordinate function on the generator
    /// basis, in the same shape as the cap action matrix.
    pub fn z_action_matrix(&self) -> Result<CapAction<F>, DeRhamError> {
        let z: ZPoly<F> = sv_unit(1);
        let mut columns = Vec::with_capacity(self.weight - 1);
        for k in 0..=self.weight - 2 {
            columns.push(self.function_action(&z, &TwistedForm::monomial_form(0, k))?);
        }
        Ok(CapAction {
            dim: self.weight - 1,
            t_order: self.t_order,
            columns,
        })
    }

    /// Lie derivative along g d/dz via the contraction and the untwisted
    /// exterior derivative: d iota + iota d.
    pub fn lie_derivative(
        &self,
        g: &ZPoly<F>,
        w: &TwistedForm<F>,
    ) -> Result<TwistedForm<F>, DeRhamError> {
        let contracted = self.contract_vector(g, w)?;
        let d_first = self.exterior_derivative(&contracted)?;
        let d_then = self.exterior_derivative(w)?;
        let mut out = self.contract_vector(g, &d_then)?;
        out.add_scaled(&d_first, &F::one());
        Ok(out)
    }

    /// iota_{g d/dz}: dz-parts become functions scaled by g; functions die.
    pub fn contract_vector(
        &self,
        g: &ZPoly<F>,
        w: &TwistedForm<F>,
    ) -> Result<TwistedForm<F>, DeRhamError> {
        let mut out = TwistedForm::new();
        for ((a, j), c) in &w.forms {
            for (i, x) in g {
                let d = i + j;
                if d >= self.z_order {
                    return Err(DeRhamError::WindowExceeded {
                        degree: d,
                        window: self.z_order,
                    });
                }
                sv_add_scaled(&mut out.functions, &sv_unit((*a, d)), &(c.clone() * x.clone()));
            }
        }
        Ok(out)
    }

    /// Plain exterior derivative (no t, no twist).
    pub fn exterior_derivative(&self, w: &TwistedForm<F>) -> Result<TwistedForm<F>, DeRhamError> {
        let mut out = TwistedForm::new();
        for ((a, j), c) in &w.functions {
            if *j >= 1 {
                sv_add_scaled(
                    &mut out.forms,
                    &sv_unit((*a, j - 1)),
                    &(c.clone() * F::from_i64(*j as i64)),
                );
            }
        }
        Ok(out)
    }

    /// The fold-th iterate of the derivation g d/dz, expressed by its value
    /// on the coordinate: returns h with (g d/dz)^fold = h d/dz as a
    /// derivation. The iterate is a derivation only in characteristic fold.
    pub fn iterated_derivation(&self, g: &ZPoly<F>) -> Result<ZPoly<F>, DeRhamError> {
        let mut h: ZPoly<F> = sv_unit(1);
        for _ in 0..self.fold {
            h = poly_mul(g, &poly_derivative(&h), self.z_order)?;
        }
        Ok(h)
    }

    /// Action of an odd twisted vector field g d/dz on a mixed form: the
    /// contraction by the fold-th iterate minus the (fold-1)-th Lie power of
    /// the plain contraction, shifted by t^((fold-1)/2). Returned at chain
    /// level; the output is a degree-0 form.
    pub fn vector_field_action(
        &self,
        g: &ZPoly<F>,
        w: &TwistedForm<F>,
    ) -> Result<TwistedForm<F>, DeRhamError> {
        if self.fold % 2 == 0 {
            return Err(DeRhamError::FoldNotOdd { fold: self.fold });
        }
        let h = self.iterated_derivation(g)?;
        let mut acc = self.contract_vector(&h, w)?;
        let mut lie = self.contract_vector(g, w)?;
        for _ in 0..self.fold - 1 {
            lie = self.lie_derivative(g, &lie)?;
        }
        acc.add_scaled(&lie, &-F::one());
        let shift = (self.fold - 1) / 2;
        let mut out = TwistedForm::new();
        for ((a, j), c) in &acc.functions {
            if a + shift <= self.t_order {
                sv_add_scaled(&mut out.functions, &sv_unit((a + shift, *j)), c);
            }
        }
        for ((a, j), c) in &acc.forms {
            if a + shift <= self.t_order {
                sv_add_scaled(&mut out.forms, &sv_unit((a + shift, *j)), c);
            }
        }
        Ok(out)
    }
}

/// Reindex a cap action matrix through the dictionary that pairs the
/// lifted generator k with the form class [z^{weight-2-k} dz]: both column
/// and target indices reverse. Returns None when a theta coordinate
/// appears, since the form side carries none.
pub fn reverse_dictionary<F: Field>(m: &CapAction<F>) -> Option<CapAction<F>> {
    let top = m.dim - 1;
    let mut columns = vec![sv_zero(); m.columns.len()];
    for (k, col) in m.columns.iter().enumerate() {
        let mut out: SparseVec<CapCoord, F> = sv_zero();
        for (c, v) in col {
            if c.theta {
                return None;
            }
            let key = CapCoord {
                target: top - c.target,
                t: c.t,
                theta: false,
            };
            sv_add_scaled(&mut out, &sv_unit(key), v);
        }
        columns[top - k] = out;
    }
    Some(CapAction {
        dim: m.dim,
        t_order: m.t_order,
        columns,
    })
}

/// The same matrix with t replaced by -t: entries at t^a pick up (-1)^a.
pub fn negate_t<F: Field>(m: &CapAction<F>) -> CapAction<F> {
    let columns = m
        .columns
        .iter()
        .map(|col| {
            let mut out: SparseVec<CapCoord, F> = sv_zero();
            for (c, v) in col {
                let s = if c.t % 2 == 1 { -v.clone() } else { v.clone() };
                sv_add_scaled(&mut out, &sv_unit(c.clone()), &s);
            }
            out
        })
        .collect();
    CapAction {
        dim: m.dim,
        t_order: m.t_order,
        columns,
    }
}
