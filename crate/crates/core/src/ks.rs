//! First-order operators `a(z)·∂_z + P(z)` acting on scalar or vector series.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{KsError, Result};
use crate::exact::{int, rat, RatMatrix, Rational};
use crate::laurent::{Coefficient, MatrixSeries, ScalarSeries, Series, DEFAULT_FLOOR};
use crate::lie::{AlgebraData, Gradation};

/// `deriv_coeff·∂_z + potential`.
#[derive(Clone, Debug, PartialEq)]
pub struct KsOperator<C: Coefficient> {
    pub deriv_coeff: ScalarSeries,
    pub potential: Series<C>,
}

pub type ScalarOperator = KsOperator<Rational>;
pub type MatrixOperator = KsOperator<RatMatrix>;

/// `1/(h z^{h−1})`, the derivative coefficient of `∂_{z^h}`.
pub fn reduced_deriv(h: i64) -> ScalarSeries {
    ScalarSeries::term(rat(1, h), 1 - h)
}

impl<C: Coefficient> KsOperator<C> {
    pub fn new(deriv_coeff: ScalarSeries, potential: Series<C>) -> Result<Self> {
        if deriv_coeff.is_known_zero() {
            return Err(KsError::Contract("derivative coefficient must be nonzero".into()));
        }
        if C::one_of(potential.shape()).is_none() {
            return Err(KsError::DimensionMismatch("potential must be square".into()));
        }
        Ok(Self {
            deriv_coeff,
            potential,
        })
    }

    /// Multiplication operator (no derivative part).
    pub fn multiplication(potential: Series<C>) -> Self {
        Self {
            deriv_coeff: ScalarSeries::scalar_zero(None),
            potential,
        }
    }

    /// Applies the operator to a series (scalar) or column series (matrix).
    pub fn apply(&self, v: &Series<C>) -> Result<Series<C>> {
        let d = v.d_dz().mul_scalar_series(&self.deriv_coeff);
        d.checked_add(&self.potential.mul(v)?)
    }

    /// `γ⁻¹·op·γ`: potential `γ⁻¹Pγ + a·γ⁻¹γ'`.
    pub fn conjugate(&self, gamma: &Series<C>) -> Result<Self> {
        self.conjugate_to(gamma, DEFAULT_FLOOR)
    }

    /// As [`KsOperator::conjugate`], cutting the inverse of an exact `γ` at `work_floor`.
    pub fn conjugate_to(&self, gamma: &Series<C>, work_floor: i64) -> Result<Self> {
        let inv = gamma.invert_to(work_floor)?;
        self.conjugate_with(gamma, &inv)
    }

    /// Conjugation with a known inverse.
    pub fn conjugate_with(&self, gamma: &Series<C>, gamma_inv: &Series<C>) -> Result<Self> {
        let inner = self
            .potential
            .mul(gamma)?
            .checked_add(&gamma.d_dz().mul_scalar_series(&self.deriv_coeff))?;
        Ok(Self {
            deriv_coeff: self.deriv_coeff.clone(),
            potential: gamma_inv.mul(&inner)?,
        })
    }

    /// Sum of potentials and of derivative coefficients.
    pub fn plus(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            deriv_coeff: self.deriv_coeff.checked_add(&other.deriv_coeff)?,
            potential: self.potential.checked_add(&other.potential)?,
        })
    }
}

impl ScalarOperator {
    /// `(1/(h z^{h−1}))∂_z + f`.
    pub fn reduced(h: i64, potential: ScalarSeries) -> Self {
        Self {
            deriv_coeff: reduced_deriv(h),
            potential,
        }
    }
}

impl MatrixOperator {
    /// `∂_z + P`.
    pub fn d_plus(potential: MatrixSeries) -> Self {
        Self {
            deriv_coeff: ScalarSeries::constant(Rational::one()),
            potential,
        }
    }

    pub fn dim(&self) -> usize {
        self.potential.dim()
    }
}

/// Finitely supported KP times `t_1, t_2, …`.
pub type FlowTimes = BTreeMap<u32, Rational>;

/// `f ↦ f − Σ (i/h) t_i z^{i−h}`.
pub fn kp_flow_apply(op: &ScalarOperator, t: &FlowTimes, h: i64) -> Result<ScalarOperator> {
    if t.contains_key(&0) {
        return Err(KsError::Contract("KP times are indexed from 1".into()));
    }
    let shift = ScalarSeries::from_rational_terms(
        t.iter()
            .map(|(&i, ti)| (i as i64 - h, ti * rat(i as i64, h))),
        None,
    )?;
    Ok(ScalarOperator {
        deriv_coeff: op.deriv_coeff.clone(),
        potential: op.potential.checked_sub(&shift)?,
    })
}

/// Summary of a gauge-term computation.
#[derive(Clone, Debug)]
pub struct GaugeTermReport {
    pub gauge_term: MatrixSeries,
    pub max_exponent: Option<i64>,
}

/// Checks that `γ⁻¹∂_zγ` for `γ = exp(A)` lies in the loop algebra with
/// support in exponents `≤ −2`.
pub fn gauge_term_degree_check(
    a: &MatrixSeries,
    alg: &AlgebraData,
    work_floor: i64,
) -> Result<GaugeTermReport> {
    alg.check_loop_element(a)?;
    if let Some(k) = a.max_exponent() {
        if k >= 0 {
            return Err(KsError::Contract(format!(
                "dressing exponent has support at z^{k}"
            )));
        }
    }
    let gamma = a.exp_neg_to(work_floor)?;
    let gamma_inv = a.negated().exp_neg_to(work_floor)?;
    let term = gamma_inv.mul(&gamma.d_dz())?;
    let bound = -1 - alg.twist_k * alg.kac_a0;
    for (k, c) in term.terms() {
        if k > bound {
            return Err(KsError::Contract(format!(
                "gauge term has coefficient {c} at z^{k} above z^{bound}"
            )));
        }
        alg.project(c).map_err(|e| {
            KsError::Contract(format!("gauge term coefficient {c} at z^{k} leaves the algebra: {e}"))
        })?;
    }
    Ok(GaugeTermReport {
        max_exponent: term.max_exponent(),
        gauge_term: term,
    })
}

/// One step of the gauge-fixing recursion: `d_i` fixed by the coefficient at `z^{i−h}`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugeStep {
    pub exponent: i64,
    pub index: i64,
    /// Coefficient multiplying `d_i` in the equation; nonzero, so `d_i` is unique.
    pub pivot: Rational,
    pub value: Rational,
}

#[derive(Clone, Debug)]
pub struct GaugeFix {
    pub gamma: ScalarSeries,
    pub fixed: ScalarOperator,
    pub steps: Vec<GaugeStep>,
}

/// Removes every exponent `< −h` from the potential of a scalar `h`-reduced
/// operator by conjugating with `γ = 1 + d_{−1}z^{−1} + …`.
///
/// Coefficients are fixed from `z^{−h−1}` downward to `floor`.
pub fn gauge_fix(op: &ScalarOperator, h: i64, floor: i64) -> Result<GaugeFix> {
    if h < 1 {
        return Err(KsError::Contract("h must be positive".into()));
    }
    if op.deriv_coeff != reduced_deriv(h) {
        return Err(KsError::Contract(format!(
            "gauge fixing needs derivative coefficient 1/({h} z^{})",
            h - 1
        )));
    }
    let floor = op.potential.floor().map_or(floor, |f| f.max(floor));
    let gamma_floor = floor + h;
    let mut d: BTreeMap<i64, Rational> = BTreeMap::new();
    let mut steps = Vec::new();
    // Scalars commute, so the conjugated potential is f + a·γ⁻¹γ'.
    let conj = |gamma: &ScalarSeries| -> Result<ScalarSeries> {
        let log_d = gamma.invert_to(gamma_floor)?.mul(&gamma.d_dz())?;
        op.potential
            .checked_add(&log_d.mul_scalar_series(&op.deriv_coeff))
    };
    let build = |d: &BTreeMap<i64, Rational>| -> Result<ScalarSeries> {
        ScalarSeries::from_rational_terms(
            std::iter::once((0, Rational::one())).chain(d.iter().map(|(k, v)| (*k, v.clone()))),
            None,
        )
    };
    for e in (floor..-h).rev() {
        let i = e + h;
        let gamma = build(&d)?;
        let c = conj(&gamma)?.coeff(e)?;
        // γ⁻¹γ' = i·d_i z^{i−1} + (terms in d_j, j > i) + lower.
        let pivot = rat(i, h);
        if !c.is_zero() {
            let value = -&c / &pivot;
            *d.entry(i).or_insert_with(Rational::zero) += &value;
            steps.push(GaugeStep {
                exponent: e,
                index: i,
                pivot,
                value,
            });
        }
    }
    let gamma = build(&d)?;
    let fixed = ScalarOperator {
        deriv_coeff: op.deriv_coeff.clone(),
        potential: conj(&gamma)?.truncate(floor),
    };
    if !fixed.potential.part_below(-h).is_known_zero() {
        return Err(KsError::Internal("gauge fixing left terms below −h".into()));
    }
    let gamma = if d.is_empty() { gamma } else { gamma.truncate(gamma_floor) };
    Ok(GaugeFix {
        gamma,
        fixed,
        steps,
    })
}

/// A derivation `d_i^s` realized as an operator on `C((1/z))^n`.
#[derive(Clone, Debug)]
pub struct Derivation {
    pub index: i64,
    pub gradation: Gradation,
    /// For `hom`: the unnormalized `z^{i+1}∂_z`. For `pri`: `∂_z + ρ∨/(hz)`.
    pub operator: MatrixOperator,
    /// Factor relating `operator` to the normalized derivation
    /// (`−1/h_s` for `hom`, `1` for `pri`).
    pub normalization: Rational,
}

pub fn derivation(i: i64, s: Gradation, alg: &AlgebraData) -> Result<Derivation> {
    let n = alg.n;
    match s {
        Gradation::Hom => Ok(Derivation {
            index: i,
            gradation: s,
            operator: MatrixOperator {
                deriv_coeff: ScalarSeries::term(Rational::one(), i + 1),
                potential: MatrixSeries::exact_zero((n, n)),
            },
            normalization: -Rational::from_integer(alg.gradation_period(s).into()).recip(),
        }),
        Gradation::Pri if i == -1 => {
            let ka0 = alg.twist_k * alg.kac_a0;
            let kh = alg.twist_k * alg.coxeter;
            Ok(Derivation {
                index: i,
                gradation: s,
                operator: MatrixOperator {
                    deriv_coeff: ScalarSeries::term(rat(1, ka0), 1 - ka0),
                    potential: MatrixSeries::monomial(alg.rho_vee.scale(&rat(1, kh)), -ka0),
                },
                normalization: Rational::one(),
            })
        }
        Gradation::Pri => Err(KsError::Unsupported(format!(
            "principal derivation d_{i} (only d_-1 is realized)"
        ))),
    }
}

/// `z^{i+1}∂_z` on scalar series.
pub fn witt_operator(i: i64) -> ScalarOperator {
    ScalarOperator {
        deriv_coeff: ScalarSeries::term(Rational::one(), i + 1),
        potential: ScalarSeries::scalar_zero(None),
    }
}

/// One failed instance of `[D_i, D_j] f = (j − i) D_{i+j} f`.
#[derive(Clone, Debug)]
pub struct WittFailure {
    pub i: i64,
    pub j: i64,
    pub sample: usize,
}

#[derive(Clone, Debug)]
pub struct WittReport {
    pub cases: usize,
    pub failures: Vec<WittFailure>,
}

impl WittReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks the Witt relations for `|i|, |j| ≤ bound` on the given test series.
pub fn witt_check(bound: i64, samples: &[ScalarSeries]) -> Result<WittReport> {
    let mut cases = 0;
    let mut failures = Vec::new();
    for i in -bound..=bound {
        for j in -bound..=bound {
            let di = witt_operator(i);
            let dj = witt_operator(j);
            let dij = witt_operator(i + j);
            for (idx, f) in samples.iter().enumerate() {
                let lhs = di.apply(&dj.apply(f)?)?.checked_sub(&dj.apply(&di.apply(f)?)?)?;
                let rhs = dij.apply(f)?.scaled(&int(j - i));
                cases += 1;
                if !lhs.agrees_with(&rhs) {
                    failures.push(WittFailure { i, j, sample: idx });
                }
            }
        }
    }
    Ok(WittReport { cases, failures })
}

/// Checks `[∂_z + ρ∨/(hz), X] v = (m/h)·X z^{−1} v` for `X` of principal degree `m`.
pub fn principal_eigen_check(
    alg: &AlgebraData,
    x: &MatrixSeries,
    vectors: &[MatrixSeries],
) -> Result<bool> {
    let split = alg.principal_degree_split(x)?;
    let m = match split.keys().collect::<Vec<_>>().as_slice() {
        [] => return Ok(true),
        [m] => **m,
        _ => return Err(KsError::Contract("X is not homogeneous".into())),
    };
    let d = derivation(-1, Gradation::Pri, alg)?.operator;
    let mult = MatrixOperator::multiplication(x.clone());
    let expected = MatrixOperator::multiplication(x.shift(-1).scaled(&rat(m, alg.coxeter)));
    for v in vectors {
        let lhs = d.apply(&mult.apply(v)?)?.checked_sub(&mult.apply(&d.apply(v)?)?)?;
        if !lhs.agrees_with(&expected.apply(v)?) {
            return Ok(false);
        }
    }
    Ok(true)
}
