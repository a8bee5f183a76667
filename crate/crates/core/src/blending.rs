//! The blending isomorphism `C((1/ζ)) → C((1/z))^h`, `ζ^h = z`.
//!
//! `ζ^{h−i}·f_i(ζ^h) ↦ e_i·f_i(z)` for `i = 1..h`.

use num_traits::{One, Zero};

use crate::error::{KsError, Result};
use crate::exact::{int, rat, RatMatrix, Rational};
use crate::ks::{reduced_deriv, MatrixOperator, ScalarOperator};
use crate::laurent::{MatrixSeries, ScalarSeries};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlendContext {
    h: i64,
}

impl BlendContext {
    pub fn new(h: i64) -> Result<Self> {
        if h < 2 {
            return Err(KsError::Contract(format!("blending needs h >= 2, got {h}")));
        }
        Ok(Self { h })
    }

    pub fn h(&self) -> i64 {
        self.h
    }

    fn dim(&self) -> usize {
        self.h as usize
    }

    /// 0-based component and `z`-exponent of `ζ^j`.
    pub fn slot(&self, j: i64) -> (usize, i64) {
        let r = j.rem_euclid(self.h);
        ((self.h - r - 1) as usize, j.div_euclid(self.h))
    }

    /// `ζ`-exponent of `e_{idx+1}·z^q`.
    pub fn zeta_exponent(&self, idx: usize, q: i64) -> i64 {
        self.h * q + self.h - 1 - idx as i64
    }

    /// Components of `ξ(f)`.
    pub fn blend(&self, f: &ScalarSeries) -> Result<Vec<ScalarSeries>> {
        let h = self.h;
        let mut parts: Vec<Vec<(i64, Rational)>> = vec![Vec::new(); self.dim()];
        for (j, c) in f.terms() {
            let (idx, q) = self.slot(j);
            parts[idx].push((q, c.clone()));
        }
        parts
            .into_iter()
            .enumerate()
            .map(|(idx, terms)| {
                let r = h - 1 - idx as i64;
                // smallest q with h·q + r >= floor
                let floor = f.floor().map(|fl| (fl - r).div_euclid(h) + i64::from((fl - r).rem_euclid(h) != 0));
                ScalarSeries::from_rational_terms(terms, floor)
            })
            .collect()
    }

    /// `ξ(f)` as an `h×1` column series.
    pub fn blend_column(&self, f: &ScalarSeries) -> Result<MatrixSeries> {
        Ok(MatrixSeries::from_components(&self.blend(f)?))
    }

    /// Inverse of [`BlendContext::blend`].
    pub fn unblend(&self, components: &[ScalarSeries]) -> Result<ScalarSeries> {
        if components.len() != self.dim() {
            return Err(KsError::DimensionMismatch(format!(
                "{} components for h = {}",
                components.len(),
                self.h
            )));
        }
        let mut floor: Option<i64> = None;
        let mut terms = Vec::new();
        for (idx, comp) in components.iter().enumerate() {
            if let Some(fq) = comp.floor() {
                let f = self.zeta_exponent(idx, fq) - self.h + 1;
                floor = Some(floor.map_or(f, |g: i64| g.max(f)));
            }
            for (q, c) in comp.terms() {
                terms.push((self.zeta_exponent(idx, q), c.clone()));
            }
        }
        if let Some(f) = floor {
            terms.retain(|(j, _)| *j >= f);
        }
        ScalarSeries::from_rational_terms(terms, floor)
    }

    pub fn unblend_column(&self, v: &MatrixSeries) -> Result<ScalarSeries> {
        if v.shape() != (self.dim(), 1) {
            return Err(KsError::DimensionMismatch("expected an h×1 column".into()));
        }
        self.unblend(&v.components())
    }

    /// `M = diag(h−1+hc, …, h−i+hc, …, hc)`.
    pub fn m_matrix(&self, c: &Rational) -> RatMatrix {
        let hc = int(self.h) * c;
        let diag: Vec<Rational> = (1..=self.h).map(|i| int(self.h - i) + &hc).collect();
        RatMatrix::diagonal(&diag)
    }

    /// The unique `c` with `trace(M) = 0`: `h(h−1)/2 + h²c = 0`.
    pub fn traceless_c(&self) -> Rational {
        rat(1 - self.h, 2 * self.h)
    }

    /// The matrix operator `O` with `ξ(op·f) = O·ξ(f)`.
    ///
    /// Built column by column from the images of `ζ^{h−i}` and `ζ^{2h−i}`,
    /// then checked on the monomials `ζ^j`, `|j| <= 3h`.
    pub fn blend_operator(&self, op: &ScalarOperator) -> Result<MatrixOperator> {
        let h = self.h;
        let n = self.dim();
        if !op.deriv_coeff.is_known_zero() && op.deriv_coeff != reduced_deriv(h) {
            return Err(KsError::Contract(format!(
                "scalar operator must have derivative coefficient 1/({h} ζ^{}) or none",
                h - 1
            )));
        }
        let mut potential = MatrixSeries::exact_zero((n, n));
        let mut deriv: Option<ScalarSeries> = None;
        for idx in 0..n {
            let base = ScalarSeries::term(Rational::one(), h - 1 - idx as i64);
            let col = self.blend(&op.apply(&base)?)?;
            for (row, s) in col.iter().enumerate() {
                potential = &potential + &s.times_matrix(&RatMatrix::unit(n, row, idx));
            }
            // O(z·e_i) = a·e_i + z·P·e_i
            let lifted = self.blend(&op.apply(&base.shift(h))?)?;
            for (row, s) in lifted.iter().enumerate() {
                let rest = s.checked_sub(&col[row].shift(1))?;
                if row == idx {
                    match &deriv {
                        None => deriv = Some(rest),
                        Some(a) if a.agrees_with(&rest) => {}
                        Some(_) => {
                            return Err(KsError::Internal(
                                "blended derivative part is not scalar".into(),
                            ))
                        }
                    }
                } else if !rest.is_known_zero() {
                    return Err(KsError::Internal(
                        "blended operator is not first order".into(),
                    ));
                }
            }
        }
        let out = MatrixOperator {
            deriv_coeff: deriv.expect("h >= 2"),
            potential,
        };
        for j in -3 * h..=3 * h {
            let f = ScalarSeries::term(Rational::one(), j);
            let lhs = self.blend_column(&op.apply(&f)?)?;
            let rhs = out.apply(&self.blend_column(&f)?)?;
            if !lhs.agrees_with(&rhs) {
                return Err(KsError::Internal(format!(
                    "intertwining fails on ζ^{j}"
                )));
            }
        }
        Ok(out)
    }

    /// `(1/(hζ^{h−1}))∂_ζ + c·ζ^{−h} + sign·ζ`.
    pub fn scalar_ks_operator(&self, c: &Rational, sign: i64) -> ScalarOperator {
        let mut terms = vec![(1, int(sign))];
        if !c.is_zero() {
            terms.push((-self.h, c.clone()));
        }
        ScalarOperator::reduced(
            self.h,
            ScalarSeries::from_rational_terms(terms, None).expect("exact terms"),
        )
    }
}
