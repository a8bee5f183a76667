//! Truncated formal Laurent series in `1/z`.
//!
//! A series carries an optional *floor*: every exponent below the floor is
//! unknown (truncated away), every stored exponent at or above it is exact.
//! A series without a floor is an exact finite Laurent polynomial. All
//! operations propagate the weakest floor that is still correct, so a
//! coefficient is never reported when it depends on truncated data.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{KsError, Result};
use crate::exact::{int, RatMatrix, Rational};

/// Working floor used when an exact input produces an infinite result.
pub const DEFAULT_FLOOR: i64 = -16;

/// Coefficient ring of a series: rationals or rational matrices.
pub trait Coefficient: Clone + PartialEq + fmt::Debug + Send + Sync {
    type Shape: Copy + Eq + fmt::Debug + Send + Sync;

    fn shape(&self) -> Self::Shape;
    fn zero_of(shape: Self::Shape) -> Self;
    /// Multiplicative identity; `None` when the shape has none (non-square).
    fn one_of(shape: Self::Shape) -> Option<Self>;
    fn vanishes(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn negated(&self) -> Self;
    fn scaled(&self, c: &Rational) -> Self;
    fn times(&self, other: &Self) -> Self;
    /// `self += a·b`.
    fn accumulate(&mut self, a: &Self, b: &Self);
    fn product_shape(a: Self::Shape, b: Self::Shape) -> Option<Self::Shape>;
    fn try_inverse(&self) -> Option<Self>;
    /// Power at which a nilpotent element of this shape must vanish.
    fn nilpotency_bound(shape: Self::Shape) -> usize;
}

impl Coefficient for Rational {
    type Shape = ();

    fn shape(&self) {}
    fn zero_of(_: ()) -> Self {
        Rational::zero()
    }
    fn one_of(_: ()) -> Option<Self> {
        Some(Rational::one())
    }
    fn vanishes(&self) -> bool {
        Zero::is_zero(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn negated(&self) -> Self {
        -self
    }
    fn scaled(&self, c: &Rational) -> Self {
        self * c
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn accumulate(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
    fn product_shape(_: (), _: ()) -> Option<()> {
        Some(())
    }
    fn try_inverse(&self) -> Option<Self> {
        (!Zero::is_zero(self)).then(|| self.recip())
    }
    fn nilpotency_bound(_: ()) -> usize {
        1
    }
}

impl Coefficient for RatMatrix {
    type Shape = (usize, usize);

    fn shape(&self) -> (usize, usize) {
        RatMatrix::shape(self)
    }
    fn zero_of((r, c): (usize, usize)) -> Self {
        RatMatrix::zeros(r, c)
    }
    fn one_of((r, c): (usize, usize)) -> Option<Self> {
        (r == c).then(|| RatMatrix::identity(r))
    }
    fn vanishes(&self) -> bool {
        RatMatrix::is_zero(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn minus(&self, other: &Self) -> Self {
        self.sub(other)
    }
    fn negated(&self) -> Self {
        self.neg()
    }
    fn scaled(&self, c: &Rational) -> Self {
        self.scale(c)
    }
    fn times(&self, other: &Self) -> Self {
        self.mul(other)
    }
    fn accumulate(&mut self, a: &Self, b: &Self) {
        let p = a.mul(b);
        self.add_scaled(&p, &Rational::one());
    }
    fn product_shape(a: (usize, usize), b: (usize, usize)) -> Option<(usize, usize)> {
        (a.1 == b.0).then_some((a.0, b.1))
    }
    fn try_inverse(&self) -> Option<Self> {
        self.inverse()
    }
    fn nilpotency_bound((r, _): (usize, usize)) -> usize {
        r.max(1)
    }
}

/// Sparse truncated Laurent series with coefficients in `C`.
#[derive(Clone, PartialEq, Debug)]
pub struct Series<C: Coefficient> {
    shape: C::Shape,
    terms: BTreeMap<i64, C>,
    floor: Option<i64>,
}

pub type ScalarSeries = Series<Rational>;
pub type MatrixSeries = Series<RatMatrix>;

fn max_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl<C: Coefficient> Series<C> {
    pub fn zero(shape: C::Shape, floor: Option<i64>) -> Self {
        Self {
            shape,
            terms: BTreeMap::new(),
            floor,
        }
    }

    pub fn exact_zero(shape: C::Shape) -> Self {
        Self::zero(shape, None)
    }

    /// The exact constant series `c`.
    pub fn constant(c: C) -> Self {
        Self::monomial(c, 0)
    }

    /// The exact series `c·z^k`.
    pub fn monomial(c: C, k: i64) -> Self {
        let shape = c.shape();
        let mut terms = BTreeMap::new();
        if !c.vanishes() {
            terms.insert(k, c);
        }
        Self {
            shape,
            terms,
            floor: None,
        }
    }

    pub fn one(shape: C::Shape) -> Result<Self> {
        C::one_of(shape)
            .map(Self::constant)
            .ok_or_else(|| KsError::DimensionMismatch("no identity for a non-square shape".into()))
    }

    /// Builds a series from `(exponent, coefficient)` pairs. Repeated
    /// exponents are summed; entries below `floor` are rejected.
    pub fn from_terms(
        shape: C::Shape,
        terms: impl IntoIterator<Item = (i64, C)>,
        floor: Option<i64>,
    ) -> Result<Self> {
        let mut map: BTreeMap<i64, C> = BTreeMap::new();
        for (k, c) in terms {
            if c.shape() != shape {
                return Err(KsError::DimensionMismatch(format!(
                    "coefficient of shape {:?} in a series of shape {shape:?}",
                    c.shape()
                )));
            }
            if let Some(f) = floor {
                if k < f {
                    return Err(KsError::Contract(format!(
                        "term at exponent {k} lies below the floor {f}"
                    )));
                }
            }
            match map.get_mut(&k) {
                Some(existing) => *existing = existing.plus(&c),
                None => {
                    map.insert(k, c);
                }
            }
        }
        map.retain(|_, c| !c.vanishes());
        Ok(Self {
            shape,
            terms: map,
            floor,
        })
    }

    pub fn shape(&self) -> C::Shape {
        self.shape
    }

    /// Lowest known exponent; `None` for an exact series.
    pub fn floor(&self) -> Option<i64> {
        self.floor
    }

    pub fn is_exact(&self) -> bool {
        self.floor.is_none()
    }

    /// Nonzero known terms in increasing exponent order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, &C)> + '_ {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Exact coefficient of `z^k`. Fails below the floor, where the value is unknown.
    pub fn coeff(&self, k: i64) -> Result<C> {
        if let Some(f) = self.floor {
            if k < f {
                return Err(KsError::Truncation {
                    exponent: k,
                    floor: f,
                });
            }
        }
        Ok(self
            .terms
            .get(&k)
            .cloned()
            .unwrap_or_else(|| C::zero_of(self.shape)))
    }

    /// Highest exponent with a nonzero known coefficient.
    pub fn max_exponent(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn min_exponent(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    /// Highest exponent whose coefficient may be nonzero, counting the
    /// unknown region below the floor. `None` means the series is exactly zero.
    fn top(&self) -> Option<i64> {
        max_opt(self.max_exponent(), self.floor.map(|f| f - 1))
    }

    /// True when every known coefficient vanishes.
    pub fn is_known_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.terms.is_empty() && self.floor.is_none()
    }

    /// Forgets everything below `floor` (no-op if already coarser).
    pub fn truncate(&self, floor: i64) -> Self {
        let f = max_opt(self.floor, Some(floor));
        let cut = f.unwrap_or(floor);
        Self {
            shape: self.shape,
            terms: self.terms.range(cut..).map(|(k, c)| (*k, c.clone())).collect(),
            floor: f,
        }
    }

    /// Same series with the floor reset to `floor` if `floor` is at least as
    /// coarse as the current one.
    pub fn with_floor(mut self, floor: Option<i64>) -> Self {
        if let Some(f) = floor {
            self = self.truncate(f);
        }
        self
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.shape != other.shape {
            return Err(KsError::DimensionMismatch(format!(
                "series of shape {:?} and {:?}",
                self.shape, other.shape
            )));
        }
        Ok(())
    }

    fn combine(&self, other: &Self, f: impl Fn(&C, &C) -> C) -> Self {
        let floor = max_opt(self.floor, other.floor);
        let zero = C::zero_of(self.shape);
        let mut terms = BTreeMap::new();
        let keys = self.terms.keys().chain(other.terms.keys());
        for &k in keys {
            if floor.is_some_and(|fl| k < fl) || terms.contains_key(&k) {
                continue;
            }
            let a = self.terms.get(&k).unwrap_or(&zero);
            let b = other.terms.get(&k).unwrap_or(&zero);
            let c = f(a, b);
            if !c.vanishes() {
                terms.insert(k, c);
            }
        }
        Self {
            shape: self.shape,
            terms,
            floor,
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        Ok(self.combine(other, C::plus))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        Ok(self.combine(other, C::minus))
    }

    pub fn negated(&self) -> Self {
        self.map(C::negated)
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        if c.vanishes() {
            return Self::zero(self.shape, None);
        }
        self.map(|x| x.scaled(c))
    }

    fn map(&self, f: impl Fn(&C) -> C) -> Self {
        Self {
            shape: self.shape,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (*k, f(c)))
                .filter(|(_, c)| !c.vanishes())
                .collect(),
            floor: self.floor,
        }
    }

    /// Multiplication by `z^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self {
            shape: self.shape,
            terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(),
            floor: self.floor.map(|f| f + k),
        }
    }

    /// Exact product. A product coefficient is kept only when every
    /// contributing pair of factors is known.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let shape = C::product_shape(self.shape, other.shape).ok_or_else(|| {
            KsError::DimensionMismatch(format!(
                "cannot multiply series of shape {:?} by {:?}",
                self.shape, other.shape
            ))
        })?;
        let floor = product_floor(self.floor, self.top(), other.floor, other.top());
        let mut acc: BTreeMap<i64, C> = BTreeMap::new();
        for (i, a) in &self.terms {
            for (j, b) in other.terms.iter().rev() {
                let k = i + j;
                if floor.is_some_and(|f| k < f) {
                    break;
                }
                acc.entry(k)
                    .or_insert_with(|| C::zero_of(shape))
                    .accumulate(a, b);
            }
        }
        acc.retain(|_, c| !c.vanishes());
        Ok(Self {
            shape,
            terms: acc,
            floor,
        })
    }

    /// Product with a scalar series (the scalar acts on every coefficient).
    pub fn mul_scalar_series(&self, s: &ScalarSeries) -> Self {
        let floor = product_floor(self.floor, self.top(), s.floor, s.top());
        let mut acc: BTreeMap<i64, C> = BTreeMap::new();
        for (i, a) in &self.terms {
            for (j, q) in s.terms.iter().rev() {
                let k = i + j;
                if floor.is_some_and(|f| k < f) {
                    break;
                }
                let term = a.scaled(q);
                match acc.get_mut(&k) {
                    Some(e) => *e = e.plus(&term),
                    None => {
                        acc.insert(k, term);
                    }
                }
            }
        }
        acc.retain(|_, c| !c.vanishes());
        Self {
            shape: self.shape,
            terms: acc,
            floor,
        }
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        let mut out = Self::one(self.shape)?;
        for _ in 0..e {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// Termwise derivative in `z`; the floor drops by one.
    pub fn d_dz(&self) -> Self {
        Self {
            shape: self.shape,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| **k != 0)
                .map(|(k, c)| (k - 1, c.scaled(&int(*k))))
                .collect(),
            floor: self.floor.map(|f| f - 1),
        }
    }

    /// Splits into the parts strictly below, exactly at and strictly above `a`.
    pub fn split_at(&self, a: i64) -> (Self, Self, Self) {
        let part = |range: (std::ops::Bound<i64>, std::ops::Bound<i64>), unknown: bool| Self {
            shape: self.shape,
            terms: self
                .terms
                .range(range)
                .map(|(k, c)| (*k, c.clone()))
                .collect(),
            floor: if unknown { self.floor } else { None },
        };
        use std::ops::Bound::{Excluded, Included, Unbounded};
        let below = part((Unbounded, Excluded(a)), self.floor.is_some());
        let at = part((Included(a), Included(a)), self.floor.is_some_and(|f| a < f));
        let above = part((Excluded(a), Unbounded), self.floor.is_some_and(|f| a + 1 < f));
        (below, at, above)
    }

    /// Part supported in exponents `>= k` (exact if the floor is not above `k`).
    pub fn part_from(&self, k: i64) -> Self {
        let (_, at, above) = self.split_at(k);
        at.checked_add(&above).expect("same shape")
    }

    /// Part supported in exponents `< k`.
    pub fn part_below(&self, k: i64) -> Self {
        self.split_at(k).0
    }

    /// True if the two series agree on every exponent known to both.
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.check_shape(other).is_ok() && self.combine(other, C::minus).is_known_zero()
    }

    /// Multiplicative inverse.
    ///
    /// The leading (highest-exponent) coefficient must be invertible. Exact
    /// inputs whose inverse is an infinite series are cut at [`DEFAULT_FLOOR`].
    pub fn invert(&self) -> Result<Self> {
        self.invert_to(DEFAULT_FLOOR)
    }

    /// As [`Series::invert`], with `work_floor` as the cut for exact inputs.
    pub fn invert_to(&self, work_floor: i64) -> Result<Self> {
        let (k, lead) = self
            .terms
            .iter()
            .next_back()
            .map(|(k, c)| (*k, c.clone()))
            .ok_or_else(|| KsError::NotInvertible("series has no known nonzero term".into()))?;
        let lead_inv = lead.try_inverse().ok_or_else(|| {
            KsError::NotInvertible(format!("leading coefficient at z^{k} is singular"))
        })?;
        let one = Self::one(self.shape)?;
        // self = z^k·L·(1 + u)
        let u = Self::constant(lead_inv.clone())
            .mul(&self.shift(-k))?
            .checked_sub(&one)?;
        let geo_floor = match u.floor {
            Some(f) => Some(f),
            None if nilpotent(&u)? => None,
            None => Some(work_floor + k),
        };
        let u = match geo_floor {
            Some(f) => u.truncate(f),
            None => u,
        };
        let minus_u = u.negated();
        let mut sum = one.clone();
        let mut power = one;
        loop {
            power = power.mul(&minus_u)?;
            if let Some(f) = geo_floor {
                power = power.truncate(f);
            }
            if power.is_known_zero() {
                break;
            }
            sum = sum.checked_add(&power)?;
        }
        let sum = match geo_floor {
            Some(f) => sum.truncate(f),
            None => sum,
        };
        Ok(sum.mul(&Self::constant(lead_inv))?.shift(-k))
    }

    /// The sum `Σ c_k X^k` for `X` with support in negative exponents, where
    /// `coeff(k)` gives the scalar `c_k` (`c_0` is taken as 1).
    fn neg_power_sum(&self, coeff: impl Fn(u32) -> Rational, work_floor: i64) -> Result<Self> {
        if let Some(m) = self.max_exponent() {
            if m >= 0 {
                return Err(KsError::Contract(format!(
                    "argument has support at exponent {m} >= 0"
                )));
            }
        }
        if self.floor.is_some_and(|f| f > 0) {
            return Err(KsError::Contract("argument is unknown at exponent 0".into()));
        }
        let floor = match self.floor {
            Some(f) => Some(f),
            None if nilpotent(self)? => None,
            None => Some(work_floor),
        };
        let x = match floor {
            Some(f) => self.truncate(f),
            None => self.clone(),
        };
        let mut sum = Self::one(self.shape)?;
        if let Some(f) = floor {
            sum = sum.truncate(f);
        }
        let mut power = Self::one(self.shape)?;
        for k in 1.. {
            power = power.mul(&x)?;
            if let Some(f) = floor {
                power = power.truncate(f);
            }
            if power.is_known_zero() {
                break;
            }
            let c = coeff(k);
            if !c.vanishes() {
                sum = sum.checked_add(&power.scaled(&c))?;
            }
        }
        Ok(sum)
    }

    /// `exp(A) = Σ A^k/k!` for `A` supported in exponents `<= -1`.
    pub fn exp_neg(&self) -> Result<Self> {
        self.exp_neg_to(DEFAULT_FLOOR)
    }

    pub fn exp_neg_to(&self, work_floor: i64) -> Result<Self> {
        self.neg_power_sum(
            |k| {
                let fact = (1..=k as i64).fold(int(1), |acc, i| acc * int(i));
                fact.recip()
            },
            work_floor,
        )
    }

    /// Inverse of [`Series::exp_neg`]: `log(G)` for `G = 1 + (negative exponents)`.
    pub fn log_neg(&self) -> Result<Self> {
        self.log_neg_to(DEFAULT_FLOOR)
    }

    pub fn log_neg_to(&self, work_floor: i64) -> Result<Self> {
        let one = Self::one(self.shape)?;
        let b = self.checked_sub(&one)?;
        let series = b.neg_power_sum(
            |k| {
                let sign = if k % 2 == 1 { 1 } else { -1 };
                crate::exact::rat(sign, k as i64)
            },
            work_floor,
        )?;
        // neg_power_sum includes the constant term 1; remove it.
        series.checked_sub(&one.with_floor(series.floor))
    }
}

/// True if `x^n = 0` exactly for `n` the matrix dimension (or `x = 0` for scalars).
fn nilpotent<C: Coefficient>(x: &Series<C>) -> Result<bool> {
    if x.is_exact_zero() {
        return Ok(true);
    }
    if !x.is_exact() {
        return Ok(false);
    }
    let steps = C::nilpotency_bound(x.shape);
    let mut p = x.clone();
    for _ in 1..steps {
        p = p.mul(x)?;
        if p.is_exact_zero() {
            return Ok(true);
        }
    }
    Ok(p.is_exact_zero())
}

fn product_floor(
    fa: Option<i64>,
    top_a: Option<i64>,
    fb: Option<i64>,
    top_b: Option<i64>,
) -> Option<i64> {
    let c1 = fa.zip(top_b).map(|(f, t)| f + t);
    let c2 = fb.zip(top_a).map(|(f, t)| f + t);
    max_opt(c1, c2)
}

impl MatrixSeries {
    /// Square dimension `n` of an `n×n` matrix series.
    pub fn dim(&self) -> usize {
        self.shape.0
    }

    pub fn identity(n: usize) -> Self {
        Self::constant(RatMatrix::identity(n))
    }

    /// `[a, b] = ab − ba`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.checked_sub(&other.mul(self)?)
    }

    pub fn trace(&self) -> ScalarSeries {
        Series {
            shape: (),
            terms: self
                .terms
                .iter()
                .map(|(k, m)| (*k, m.trace()))
                .filter(|(_, t)| !t.vanishes())
                .collect(),
            floor: self.floor,
        }
    }

    /// Column series `e_j`-th column of every coefficient.
    pub fn column(&self, j: usize) -> Self {
        let rows = self.shape.0;
        Series {
            shape: (rows, 1),
            terms: self
                .terms
                .iter()
                .map(|(k, m)| (*k, RatMatrix::column(m.column_vec(j))))
                .filter(|(_, c)| !c.vanishes())
                .collect(),
            floor: self.floor,
        }
    }

    /// Scalar series of entry `(i, j)`.
    pub fn entry(&self, i: usize, j: usize) -> ScalarSeries {
        Series {
            shape: (),
            terms: self
                .terms
                .iter()
                .map(|(k, m)| (*k, m.get(i, j).clone()))
                .filter(|(_, c)| !c.vanishes())
                .collect(),
            floor: self.floor,
        }
    }

    /// Column vector series assembled from scalar component series.
    pub fn from_components(components: &[ScalarSeries]) -> Self {
        let n = components.len();
        let floor = components.iter().fold(None, |acc, c| max_opt(acc, c.floor));
        let mut terms: BTreeMap<i64, RatMatrix> = BTreeMap::new();
        for (i, comp) in components.iter().enumerate() {
            for (k, q) in comp.terms() {
                if floor.is_some_and(|f| k < f) {
                    continue;
                }
                terms
                    .entry(k)
                    .or_insert_with(|| RatMatrix::zeros(n, 1))
                    .set(i, 0, q.clone());
            }
        }
        Series {
            shape: (n, 1),
            terms,
            floor,
        }
    }

    /// Components of a column series.
    pub fn components(&self) -> Vec<ScalarSeries> {
        (0..self.shape.0).map(|i| self.entry(i, 0)).collect()
    }
}

impl ScalarSeries {
    pub fn scalar_zero(floor: Option<i64>) -> Self {
        Self::zero((), floor)
    }

    pub fn term(c: Rational, k: i64) -> Self {
        Self::monomial(c, k)
    }

    pub fn from_rational_terms(
        terms: impl IntoIterator<Item = (i64, Rational)>,
        floor: Option<i64>,
    ) -> Result<Self> {
        Self::from_terms((), terms, floor)
    }

    /// Promotes to a matrix series `self·M`.
    pub fn times_matrix(&self, m: &RatMatrix) -> MatrixSeries {
        Series {
            shape: m.shape(),
            terms: self
                .terms
                .iter()
                .map(|(k, q)| (*k, m.scale(q)))
                .filter(|(_, c)| !c.vanishes())
                .collect(),
            floor: self.floor,
        }
    }
}

impl<C: Coefficient> Add for &Series<C> {
    type Output = Series<C>;
    /// Panics on shape mismatch; see [`Series::checked_add`].
    fn add(self, rhs: Self) -> Series<C> {
        self.checked_add(rhs).expect("series shape mismatch")
    }
}

impl<C: Coefficient> Sub for &Series<C> {
    type Output = Series<C>;
    fn sub(self, rhs: Self) -> Series<C> {
        self.checked_sub(rhs).expect("series shape mismatch")
    }
}

impl<C: Coefficient> Neg for &Series<C> {
    type Output = Series<C>;
    fn neg(self) -> Series<C> {
        self.negated()
    }
}

impl<C: Coefficient> Mul for &Series<C> {
    type Output = Series<C>;
    /// Panics on shape mismatch; see [`Series::mul`].
    fn mul(self, rhs: Self) -> Series<C> {
        Series::mul(self, rhs).expect("series shape mismatch")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn s(terms: &[(i64, i64, i64)], floor: Option<i64>) -> ScalarSeries {
        ScalarSeries::from_rational_terms(terms.iter().map(|&(k, p, q)| (k, rat(p, q))), floor)
            .unwrap()
    }

    #[test]
    fn product_of_truncated_binomials() {
        let a = s(&[(0, 1, 1), (-1, 1, 1)], Some(-10));
        let b = s(&[(0, 1, 1), (-1, -1, 1)], Some(-10));
        let p = &a * &b;
        assert_eq!(p.coeff(0).unwrap(), int(1));
        assert_eq!(p.coeff(-1).unwrap(), int(0));
        assert_eq!(p.coeff(-2).unwrap(), int(-1));
        // Every pair contributing to z^-10 pairs an unknown factor with a known zero.
        assert_eq!(p.floor(), Some(-10));
        assert!(p.coeff(-11).is_err());
    }

    #[test]
    fn coeff_contract() {
        let a = s(&[(0, 1, 1), (-3, 2, 1)], None);
        assert_eq!(a.coeff(-3).unwrap(), int(2));
        let one = s(&[(0, 1, 1)], Some(-5));
        assert_eq!(one.coeff(-1).unwrap(), int(0));
        assert!(matches!(
            one.coeff(-6),
            Err(KsError::Truncation {
                exponent: -6,
                floor: -5
            })
        ));
    }

    #[test]
    fn derivative() {
        let z3 = s(&[(3, 1, 1)], None);
        assert_eq!(z3.d_dz(), s(&[(2, 3, 1)], None));
        assert!(s(&[(0, 5, 1)], None).d_dz().is_exact_zero());
        assert_eq!(s(&[(0, 1, 1)], Some(-4)).d_dz().floor(), Some(-5));
    }

    #[test]
    fn invert_geometric() {
        assert_eq!(s(&[(0, 1, 1)], None).invert().unwrap(), s(&[(0, 1, 1)], None));
        let d = rat(3, 7);
        let g = ScalarSeries::from_rational_terms([(0, int(1)), (-1, d.clone())], None).unwrap();
        let inv = g.invert().unwrap();
        assert_eq!(inv.floor(), Some(DEFAULT_FLOOR));
        for k in 0..=16 {
            let expected = {
                let mut p = int(1);
                for _ in 0..k {
                    p *= -d.clone();
                }
                p
            };
            assert_eq!(inv.coeff(-k).unwrap(), expected);
        }
        assert!((&g * &inv).agrees_with(&s(&[(0, 1, 1)], None)));
    }

    #[test]
    fn invert_with_shifted_leading_term() {
        let a = s(&[(2, 3, 1), (0, 1, 1)], Some(-8));
        let inv = a.invert().unwrap();
        let prod = &a * &inv;
        assert!(prod.agrees_with(&s(&[(0, 1, 1)], None)));
        assert_eq!(prod.coeff(0).unwrap(), int(1));
    }

    #[test]
    fn invert_rejects_singular_lead() {
        let m = MatrixSeries::constant(RatMatrix::from_i64_rows(&[&[1, 1], &[1, 1]]));
        assert!(matches!(m.invert(), Err(KsError::NotInvertible(_))));
        assert!(ScalarSeries::scalar_zero(None).invert().is_err());
    }

    #[test]
    fn exp_of_nilpotent_is_exact() {
        let n = RatMatrix::from_i64_rows(&[&[0, 1], &[0, 0]]);
        let a = MatrixSeries::monomial(n.clone(), -1);
        let e = a.exp_neg().unwrap();
        assert!(e.is_exact());
        let expected = &MatrixSeries::identity(2) + &MatrixSeries::monomial(n, -1);
        assert_eq!(e, expected);
        assert_eq!(MatrixSeries::exact_zero((2, 2)).exp_neg().unwrap(), MatrixSeries::identity(2));
    }

    #[test]
    fn exp_rejects_nonnegative_support() {
        let a = MatrixSeries::monomial(RatMatrix::identity(2), 0);
        assert!(matches!(a.exp_neg(), Err(KsError::Contract(_))));
    }

    #[test]
    fn split_recomposes() {
        let c2 = rat(2, 3);
        let c5 = rat(-5, 1);
        let f = ScalarSeries::from_rational_terms(
            [(1, int(1)), (-2, c2.clone()), (-5, c5.clone())],
            Some(-12),
        )
        .unwrap();
        let (below, at, above) = f.split_at(-2);
        assert!(below.agrees_with(&ScalarSeries::term(c5, -5)));
        assert_eq!(at, ScalarSeries::term(c2, -2));
        assert_eq!(above, ScalarSeries::term(int(1), 1));
        assert_eq!(&(&below + &at) + &above, f);
        let (b0, a0, u0) = ScalarSeries::scalar_zero(None).split_at(3);
        assert!(b0.is_exact_zero() && a0.is_exact_zero() && u0.is_exact_zero());
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let a = MatrixSeries::identity(2);
        let b = MatrixSeries::identity(3);
        assert!(matches!(a.mul(&b), Err(KsError::DimensionMismatch(_))));
        assert!(a.checked_add(&b).is_err());
    }
}
