//! Seeded random elements for property trials.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::exact::{rat, RatMatrix, Rational};
use crate::ks::MatrixOperator;
use crate::laurent::MatrixSeries;
use crate::lie::AlgebraData;

pub type TrialRng = ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 0x006b_736c_6162;

pub fn rng(seed: u64) -> TrialRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A small nonzero rational `p/q` with `|p| <= 5`, `1 <= q <= 4`.
pub fn small_rational(rng: &mut TrialRng) -> Rational {
    loop {
        let p: i64 = rng.random_range(-5..=5);
        if p != 0 {
            return rat(p, rng.random_range(1..=4));
        }
    }
}

/// A random catalog element with about `density` of its coordinates nonzero.
pub fn algebra_element(alg: &AlgebraData, rng: &mut TrialRng, density: f64) -> RatMatrix {
    let mut m = RatMatrix::zeros(alg.n, alg.n);
    for b in &alg.basis {
        if rng.random_bool(density) {
            m.add_scaled(&b.matrix, &small_rational(rng));
        }
    }
    m
}

/// Random loop element with `z`-exponents in `lo..=hi`.
pub fn loop_element(alg: &AlgebraData, rng: &mut TrialRng, lo: i64, hi: i64, density: f64) -> MatrixSeries {
    let terms = (lo..=hi).map(|k| (k, algebra_element(alg, rng, density)));
    MatrixSeries::from_terms((alg.n, alg.n), terms, None).expect("square terms")
}

/// A sparse random element of the loop algebra, homogeneous pieces of
/// principal degree between `lo` and `hi`, with at most `terms` monomials.
pub fn graded_element(alg: &AlgebraData, rng: &mut TrialRng, lo: i64, hi: i64, terms: usize) -> MatrixSeries {
    let mut out = MatrixSeries::exact_zero((alg.n, alg.n));
    for _ in 0..terms {
        let m = rng.random_range(lo..=hi);
        let piece = alg.graded_piece(m);
        if piece.basis.is_empty() {
            continue;
        }
        let b = &piece.basis[rng.random_range(0..piece.basis.len())];
        out = &out + &b.scaled(&small_rational(rng));
    }
    out
}

/// A perturbation `g` with the same gauge class as `Λ`:
/// `∂_z + ρ∨/(hz) + g = γ₀·(∂_z + ρ∨/(hz) + Λ)·γ₀⁻¹` for `γ₀ = exp(A₀)`,
/// `A₀` random of principal degree `<= −h − 1`.
pub struct GaugePerturbation {
    pub a0: MatrixSeries,
    pub g: MatrixSeries,
}

pub fn gauge_perturbation(alg: &AlgebraData, rng: &mut TrialRng, work_floor: i64) -> Result<GaugePerturbation> {
    let h = alg.coxeter;
    let mut a0 = graded_element(alg, rng, -3 * h, -h - 1, 3);
    if a0.is_known_zero() {
        a0 = alg.graded_piece(-h - 1).basis[0].clone();
    }
    let rho = MatrixSeries::monomial(alg.rho_vee.scale(&rat(1, h)), -1);
    let base = MatrixOperator::d_plus(&rho + &alg.lambda);
    let gamma = a0.exp_neg_to(work_floor)?;
    let gamma_inv = a0.negated().exp_neg_to(work_floor)?;
    let moved = base.conjugate_with(&gamma_inv, &gamma)?;
    let g = moved.potential.checked_sub(&rho)?;
    debug_assert!(alg.check_loop_element(&g).is_ok());
    Ok(GaugePerturbation { a0, g })
}
