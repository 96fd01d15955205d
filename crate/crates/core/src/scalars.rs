//! Exact coefficient arithmetic.
//!
//! Every computation in this crate is exact: arbitrary-precision rationals
//! (`Rat`), Gaussian rationals (`GaussRat`, needed wherever a square root of
//! -1 enters), prime fields `Fp<P>` and their imaginary quadratic extensions
//! `FpI<P>`, truncated power series in an even variable `t`, and pairs of
//! series recording an odd square-zero variable `theta`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

pub type Rat = BigRational;

/// Coefficient field contract.
///
/// `frobenius` is the p-th power map in characteristic p and the identity in
/// characteristic zero; it is total so that coefficientwise semilinear twists
/// can be applied uniformly.
pub trait Field:
    Sized
    + Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    fn is_zero(&self) -> bool;
    /// Multiplicative inverse; `None` exactly on zero (and on zero divisors
    /// of `FpI<P>` when -1 is a square mod P).
    fn inv(&self) -> Option<Self>;
    fn frobenius(&self) -> Self;
    fn characteristic() -> u64;
    fn to_json(&self) -> serde_json::Value;
}

fn bigint_json(n: &BigInt) -> serde_json::Value {
    serde_json::Value::String(n.to_string())
}

/// Canonical `"num/den"` form with a positive denominator, always including
/// the denominator so output is unambiguous.
pub fn rat_string(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

impl Field for Rat {
    fn zero() -> Self {
        <Rat as Zero>::zero()
    }
    fn one() -> Self {
        <Rat as One>::one()
    }
    fn from_i64(n: i64) -> Self {
        Rat::from_integer(BigInt::from(n))
    }
    fn is_zero(&self) -> bool {
        <Rat as Zero>::is_zero(self)
    }
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn frobenius(&self) -> Self {
        self.clone()
    }
    fn characteristic() -> u64 {
        0
    }
    fn to_json(&self) -> serde_json::Value {
        let _ = bigint_json(self.numer());
        serde_json::Value::String(rat_string(self))
    }
}

/// Gaussian rationals `re + im * i`, `i^2 = -1`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GaussRat {
    pub re: Rat,
    pub im: Rat,
}

impl GaussRat {
    pub fn new(re: Rat, im: Rat) -> Self {
        GaussRat { re, im }
    }
    pub fn from_rat(re: Rat) -> Self {
        GaussRat {
            re,
            im: <Rat as Zero>::zero(),
        }
    }
    pub fn i() -> Self {
        GaussRat {
            re: <Rat as Zero>::zero(),
            im: <Rat as One>::one(),
        }
    }
    pub fn conj(&self) -> Self {
        GaussRat {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }
    pub fn norm(&self) -> Rat {
        self.re.clone() * self.re.clone() + self.im.clone() * self.im.clone()
    }
    pub fn is_real(&self) -> bool {
        Zero::is_zero(&self.im)
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if Zero::is_zero(&self.im) {
            write!(f, "{}", rat_string(&self.re))
        } else if Zero::is_zero(&self.re) {
            write!(f, "{}*i", rat_string(&self.im))
        } else {
            write!(f, "{} + {}*i", rat_string(&self.re), rat_string(&self.im))
        }
    }
}

impl Add for GaussRat {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        GaussRat {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }
}
impl Sub for GaussRat {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        GaussRat {
            re: self.re - o.re,
            im: self.im - o.im,
        }
    }
}
impl Mul for GaussRat {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        GaussRat {
            re: self.re.clone() * o.re.clone() - self.im.clone() * o.im.clone(),
            im: self.re * o.im + self.im * o.re,
        }
    }
}
impl Neg for GaussRat {
    type Output = Self;
    fn neg(self) -> Self {
        GaussRat {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Field for GaussRat {
    fn zero() -> Self {
        GaussRat::from_rat(<Rat as Zero>::zero())
    }
    fn one() -> Self {
        GaussRat::from_rat(<Rat as One>::one())
    }
    fn from_i64(n: i64) -> Self {
        GaussRat::from_rat(<Rat as Field>::from_i64(n))
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(&self.re) && Zero::is_zero(&self.im)
    }
    fn inv(&self) -> Option<Self> {
        let n = self.norm();
        if Zero::is_zero(&n) {
            return None;
        }
        let c = self.conj();
        Some(GaussRat {
            re: c.re / n.clone(),
            im: c.im / n,
        })
    }
    fn frobenius(&self) -> Self {
        self.clone()
    }
    fn characteristic() -> u64 {
        0
    }
    fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "re": rat_string(&self.re),
            "im": rat_string(&self.im),
        })
    }
}

/// Prime field of order `P`. `P` must be an odd prime; inverses use
/// Fermat exponentiation.
#[derive(Clone, Copy, PartialEq, Eq, Debug, PartialOrd, Ord, Hash)]
pub struct Fp<const P: u64>(pub u64);

impl<const P: u64> Fp<P> {
    pub fn new(v: i64) -> Self {
        let p = P as i64;
        Fp(v.rem_euclid(p) as u64)
    }
    pub fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = Fp::<P>(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }
}

impl<const P: u64> fmt::Display for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u64> Add for Fp<P> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Fp((self.0 + o.0) % P)
    }
}
impl<const P: u64> Sub for Fp<P> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Fp((self.0 + P - o.0) % P)
    }
}
impl<const P: u64> Mul for Fp<P> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Fp(((self.0 as u128 * o.0 as u128) % P as u128) as u64)
    }
}
impl<const P: u64> Neg for Fp<P> {
    type Output = Self;
    fn neg(self) -> Self {
        Fp((P - self.0) % P)
    }
}

impl<const P: u64> Field for Fp<P> {
    fn zero() -> Self {
        Fp(0)
    }
    fn one() -> Self {
        Fp(1)
    }
    fn from_i64(n: i64) -> Self {
        Fp::new(n)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
    fn inv(&self) -> Option<Self> {
        if self.0 == 0 {
            None
        } else {
            Some(self.pow(P - 2))
        }
    }
    fn frobenius(&self) -> Self {
        self.pow(P)
    }
    fn characteristic() -> u64 {
        P
    }
    fn to_json(&self) -> serde_json::Value {
        serde_json::json!(self.0)
    }
}

/// `Fp[i]` with `i^2 = -1`. This is a field exactly when -1 is a non-square
/// mod P (P = 3 mod 4); otherwise it has zero divisors and `inv` reports
/// them by returning `None`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, PartialOrd, Ord, Hash)]
pub struct FpI<const P: u64> {
    pub re: Fp<P>,
    pub im: Fp<P>,
}

impl<const P: u64> FpI<P> {
    pub fn new(re: Fp<P>, im: Fp<P>) -> Self {
        FpI { re, im }
    }
    pub fn i() -> Self {
        FpI {
            re: Fp(0),
            im: Fp(1),
        }
    }
    pub fn conj(&self) -> Self {
        FpI {
            re: self.re,
            im: -self.im,
        }
    }
}

impl<const P: u64> fmt::Display for FpI<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}i", self.re, self.im)
    }
}

impl<const P: u64> Add for FpI<P> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        FpI {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }
}
impl<const P: u64> Sub for FpI<P> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        FpI {
            re: self.re - o.re,
            im: self.im - o.im,
        }
    }
}
impl<const P: u64> Mul for FpI<P> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        FpI {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
}
impl<const P: u64> Neg for FpI<P> {
    type Output = Self;
    fn neg(self) -> Self {
        FpI {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl<const P: u64> Field for FpI<P> {
    fn zero() -> Self {
        FpI {
            re: Fp(0),
            im: Fp(0),
        }
    }
    fn one() -> Self {
        FpI {
            re: Fp(1),
            im: Fp(0),
        }
    }
    fn from_i64(n: i64) -> Self {
        FpI {
            re: Fp::new(n),
            im: Fp(0),
        }
    }
    fn is_zero(&self) -> bool {
        self.re.0 == 0 && self.im.0 == 0
    }
    fn inv(&self) -> Option<Self> {
        let n = self.re * self.re + self.im * self.im;
        let ninv = n.inv()?;
        let c = self.conj();
        Some(FpI {
            re: c.re * ninv,
            im: c.im * ninv,
        })
    }
    fn frobenius(&self) -> Self {
        // (a + b i)^P = a + b i^P; i^P = i for P = 1 mod 4, -i for P = 3 mod 4.
        if P % 4 == 1 {
            *self
        } else {
            self.conj()
        }
    }
    fn characteristic() -> u64 {
        P
    }
    fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "re": self.re.0, "im": self.im.0 })
    }
}

/// Reduce a rational mod P. `None` when P divides the denominator.
pub fn rat_mod<const P: u64>(r: &Rat) -> Option<Fp<P>> {
    let p = BigInt::from(P);
    let num = r.numer().mod_floor(&p);
    let den = r.denom().mod_floor(&p);
    let num = Fp::<P>(num.to_string().parse::<u64>().unwrap());
    let den = Fp::<P>(den.to_string().parse::<u64>().unwrap());
    Some(num * den.inv()?)
}

/// Reduce a Gaussian rational mod P into `Fp[i]`.
pub fn gauss_mod<const P: u64>(g: &GaussRat) -> Option<FpI<P>> {
    Some(FpI {
        re: rat_mod::<P>(&g.re)?,
        im: rat_mod::<P>(&g.im)?,
    })
}

use num_integer::Integer;

/// Rational from an integer pair, reduced.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// `p`-adic valuation of a rational (bounded use: small primes).
pub fn rat_val_p(r: &Rat, p: u64) -> Option<i64> {
    if Zero::is_zero(r) {
        return None;
    }
    let p = BigInt::from(p);
    let mut v = 0i64;
    let mut n = r.numer().abs();
    while (&n).mod_floor(&p) == BigInt::zero() {
        n = n / &p;
        v += 1;
    }
    let mut d = r.denom().clone();
    while (&d).mod_floor(&p) == BigInt::zero() {
        d = d / &p;
        v -= 1;
    }
    Some(v)
}

/// Power series truncated at a fixed order: coefficients of `t^0 .. t^order`.
/// All arithmetic keeps the truncation order; mixed-order operands are a
/// programming error and panic.
#[derive(Clone, PartialEq, Debug)]
pub struct Series<F: Field> {
    pub c: Vec<F>,
}

impl<F: Field> Series<F> {
    pub fn zero(order: usize) -> Self {
        Series {
            c: vec![F::zero(); order + 1],
        }
    }
    pub fn one(order: usize) -> Self {
        let mut s = Series::zero(order);
        s.c[0] = F::one();
        s
    }
    pub fn from_coeffs(c: Vec<F>) -> Self {
        assert!(!c.is_empty());
        Series { c }
    }
    /// Single term `a * t^k`.
    pub fn monomial(order: usize, k: usize, a: F) -> Self {
        let mut s = Series::zero(order);
        if k <= order {
            s.c[k] = a;
        }
        s
    }
    pub fn order(&self) -> usize {
        self.c.len() - 1
    }
    pub fn coeff(&self, i: usize) -> F {
        if i < self.c.len() {
            self.c[i].clone()
        } else {
            F::zero()
        }
    }
    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }
    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.c.len(), o.c.len(), "series truncation mismatch");
        Series {
            c: self
                .c
                .iter()
                .zip(&o.c)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }
    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!(self.c.len(), o.c.len(), "series truncation mismatch");
        Series {
            c: self
                .c
                .iter()
                .zip(&o.c)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }
    pub fn neg(&self) -> Self {
        Series {
            c: self.c.iter().map(|a| -a.clone()).collect(),
        }
    }
    pub fn scale(&self, a: &F) -> Self {
        Series {
            c: self.c.iter().map(|x| x.clone() * a.clone()).collect(),
        }
    }
    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.c.len(), o.c.len(), "series truncation mismatch");
        let n = self.c.len();
        let mut c = vec![F::zero(); n];
        for i in 0..n {
            if self.c[i].is_zero() {
                continue;
            }
            for j in 0..n - i {
                if o.c[j].is_zero() {
                    continue;
                }
                c[i + j] = c[i + j].clone() + self.c[i].clone() * o.c[j].clone();
            }
        }
        Series { c }
    }
    /// Multiply by `t^k`; coefficients past the truncation order are dropped.
    pub fn shift(&self, k: usize) -> Self {
        let n = self.c.len();
        let mut c = vec![F::zero(); n];
        for i in 0..n.saturating_sub(k) {
            c[i + k] = self.c[i].clone();
        }
        Series { c }
    }
    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Series::one(self.order());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
    /// Substitute `g` for the variable; requires `g(0) = 0` so the result is
    /// well defined at the truncation order.
    pub fn compose(&self, g: &Self) -> Self {
        assert_eq!(self.c.len(), g.c.len(), "series truncation mismatch");
        assert!(g.c[0].is_zero(), "composition needs g(0) = 0");
        let mut acc = Series::zero(self.order());
        for i in (0..self.c.len()).rev() {
            acc = acc.mul(g);
            acc.c[0] = acc.c[0].clone() + self.c[i].clone();
        }
        acc
    }
    /// Multiplicative inverse; requires an invertible constant term.
    pub fn invert(&self) -> Option<Self> {
        let c0 = self.c[0].inv()?;
        let n = self.c.len();
        let mut out = Series::zero(self.order());
        out.c[0] = c0.clone();
        for k in 1..n {
            let mut acc = F::zero();
            for j in 1..=k {
                acc = acc + self.c[j].clone() * out.c[k - j].clone();
            }
            out.c[k] = -(c0.clone() * acc);
        }
        Some(out)
    }
    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Series<G> {
        Series {
            c: self.c.iter().map(f).collect(),
        }
    }
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(self.c.iter().map(|x| x.to_json()).collect())
    }
}

/// Element of `k[[t]] + k[[t]] theta` with `theta` odd and `theta^2 = 0`.
#[derive(Clone, PartialEq, Debug)]
pub struct ThetaSeries<F: Field> {
    pub plain: Series<F>,
    pub theta: Series<F>,
}

impl<F: Field> ThetaSeries<F> {
    pub fn zero(order: usize) -> Self {
        ThetaSeries {
            plain: Series::zero(order),
            theta: Series::zero(order),
        }
    }
    pub fn one(order: usize) -> Self {
        ThetaSeries {
            plain: Series::one(order),
            theta: Series::zero(order),
        }
    }
    pub fn is_zero(&self) -> bool {
        self.plain.is_zero() && self.theta.is_zero()
    }
    pub fn add(&self, o: &Self) -> Self {
        ThetaSeries {
            plain: self.plain.add(&o.plain),
            theta: self.theta.add(&o.theta),
        }
    }
    pub fn sub(&self, o: &Self) -> Self {
        ThetaSeries {
            plain: self.plain.sub(&o.plain),
            theta: self.theta.sub(&o.theta),
        }
    }
    /// Product in `k[[t, theta]]`: the theta * theta component vanishes.
    pub fn mul(&self, o: &Self) -> Self {
        ThetaSeries {
            plain: self.plain.mul(&o.plain),
            theta: self.plain.mul(&o.theta).add(&self.theta.mul(&o.plain)),
        }
    }
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "plain": self.plain.to_json(),
            "theta": self.theta.to_json(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_inverse_small_prime_matches_search() {
        // Independent oracle: brute-force inverse search in F_7.
        for a in 1..7u64 {
            let mut found = None;
            for b in 1..7u64 {
                if (a * b) % 7 == 1 {
                    found = Some(b);
                }
            }
            assert_eq!(Fp::<7>(a).inv().unwrap().0, found.unwrap());
        }
        assert_eq!(Fp::<7>(3).inv().unwrap().0, 5);
        assert_eq!(Fp::<7>(0).inv(), None);
    }

    #[test]
    fn frobenius_is_additive_and_binomial_collapses() {
        // (1 + z)^3 = 1 + z^3 over F_3, truncated at z^8.
        let one_plus_z = Series::<Fp<3>>::from_coeffs({
            let mut v = vec![Fp(0); 9];
            v[0] = Fp(1);
            v[1] = Fp(1);
            v
        });
        let cube = one_plus_z.pow(3);
        let mut expect = Series::<Fp<3>>::zero(8);
        expect.c[0] = Fp(1);
        expect.c[3] = Fp(1);
        assert_eq!(cube, expect);

        for a in 0..5u64 {
            for b in 0..5u64 {
                let lhs = (Fp::<5>(a) + Fp::<5>(b)).frobenius();
                let rhs = Fp::<5>(a).frobenius() + Fp::<5>(b).frobenius();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn gaussian_inverse_and_conjugation() {
        let x = GaussRat::new(rat(3, 1), rat(-4, 1));
        let xi = x.clone().inv().unwrap();
        assert_eq!(x * xi, <GaussRat as Field>::one());
        // i^P in F_p[i]: conjugation exactly for P = 3 mod 4.
        let i3 = FpI::<3>::i();
        assert_eq!(i3.frobenius(), i3.conj());
        let i5 = FpI::<5>::i();
        assert_eq!(i5.frobenius(), i5);
        // 2 + i is a zero divisor mod 5 (norm 5 = 0): no inverse.
        assert_eq!(FpI::<5>::new(Fp(2), Fp(1)).inv(), None);
        assert!(FpI::<3>::new(Fp(2), Fp(1)).inv().is_some());
    }

    #[test]
    fn series_truncation_and_inverse() {
        let s = Series::<Rat>::from_coeffs(vec![rat(1, 1), rat(2, 1), rat(0, 1), rat(5, 1)]);
        let inv = s.invert().unwrap();
        assert_eq!(s.mul(&inv), Series::one(3));
        // shift drops overflow past the truncation order
        let sh = s.shift(2);
        assert_eq!(sh.c, vec![rat(0, 1), rat(0, 1), rat(1, 1), rat(2, 1)]);
    }

    #[test]
    fn series_composition_is_substitution() {
        // f = z + z^2, g = 2z: f(g) = 2z + 4z^2.
        let f = Series::<Rat>::from_coeffs(vec![rat(0, 1), rat(1, 1), rat(1, 1), rat(0, 1)]);
        let g = Series::<Rat>::from_coeffs(vec![rat(0, 1), rat(2, 1), rat(0, 1), rat(0, 1)]);
        let fg = f.compose(&g);
        assert_eq!(
            fg.c,
            vec![rat(0, 1), rat(2, 1), rat(4, 1), rat(0, 1)]
        );
    }

    #[test]
    fn theta_squares_to_zero() {
        let t = ThetaSeries::<Rat> {
            plain: Series::zero(3),
            theta: Series::one(3),
        };
        assert!(t.mul(&t).is_zero());
        // (a + b theta)(c + d theta) has plain part ac
        let x = ThetaSeries::<Rat> {
            plain: Series::from_coeffs(vec![rat(1, 1), rat(1, 1)]),
            theta: Series::from_coeffs(vec![rat(3, 1), rat(0, 1)]),
        };
        let y = ThetaSeries::<Rat> {
            plain: Series::from_coeffs(vec![rat(2, 1), rat(0, 1)]),
            theta: Series::from_coeffs(vec![rat(0, 1), rat(1, 1)]),
        };
        let xy = x.mul(&y);
        assert_eq!(xy.plain.c, vec![rat(2, 1), rat(2, 1)]);
        assert_eq!(xy.theta.c, vec![rat(6, 1), rat(1, 1)]);
    }

    #[test]
    fn rational_reduction_mod_p() {
        // 3/4 mod 7: 4^{-1} = 2, so 3 * 2 = 6.
        assert_eq!(rat_mod::<7>(&rat(3, 4)).unwrap(), Fp(6));
        assert_eq!(rat_mod::<2>(&rat(1, 2)), None);
        assert_eq!(rat_val_p(&rat(12, 5), 2), Some(2));
        assert_eq!(rat_val_p(&rat(3, 8), 2), Some(-3));
        assert_eq!(rat_val_p(&rat(0, 1), 2), None);
    }

    #[test]
    fn json_forms_are_stable() {
        assert_eq!(rat(3, 4).to_json(), serde_json::json!("3/4"));
        assert_eq!(rat(-3, 4).to_json(), serde_json::json!("-3/4"));
        let g = GaussRat::new(rat(1, 2), rat(-1, 1));
        assert_eq!(
            g.to_json(),
            serde_json::json!({"re": "1/2", "im": "-1/1"})
        );
    }
}
