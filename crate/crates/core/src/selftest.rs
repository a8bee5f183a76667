//! The structural invariant suite behind `ks-lab selftest`.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exact::{int, rat, RatMatrix};
use crate::ks::{principal_eigen_check, witt_check};
use crate::laurent::{MatrixSeries, ScalarSeries};
use crate::lie::{AlgebraData, LieType};
use crate::random::{self, TrialRng};
use crate::rigidity::trace_law_property;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub const SUITE: [(LieType, usize); 4] = [(LieType::A, 1), (LieType::A, 2), (LieType::A, 3), (LieType::C, 2)];

/// Classical exponents: `1..r` for `A_r`, `1, 3, …, 2r − 1` for `C_r`.
pub fn classical_exponents(t: LieType, r: usize) -> Vec<i64> {
    match t {
        LieType::A => (1..=r as i64).collect(),
        LieType::C => (1..=r as i64).map(|i| 2 * i - 1).collect(),
    }
}

fn kernel_dims(alg: &AlgebraData, expected_exponents: &[i64]) -> Result<Check> {
    let h = alg.coxeter;
    let mut bad = Vec::new();
    for m in -(2 * h + 1)..=(2 * h + 1) {
        let want = expected_exponents.iter().filter(|e| (m - **e).rem_euclid(h) == 0).count();
        let got = alg.ad_lambda_kernel_dim(m)?;
        if got != want {
            bad.push(format!("pdeg {m}: {got} != {want}"));
        }
    }
    Ok(Check {
        name: format!("{}: ker ad Λ dimensions", alg.label()),
        passed: bad.is_empty() && alg.exponents == expected_exponents,
        detail: if bad.is_empty() {
            format!("|pdeg| <= {} match exponents {:?} mod {h}", 2 * h + 1, alg.exponents)
        } else {
            bad.join("; ")
        },
    })
}

fn eigen(alg: &AlgebraData, rng: &mut TrialRng) -> Result<Check> {
    let vectors: Vec<MatrixSeries> = (0..3)
        .map(|_| random::loop_element(alg, rng, -2, 1, 0.5).column(0))
        .collect();
    let mut ok = true;
    for m in [-alg.coxeter - 1, -1, 1, 2] {
        let x = random::graded_element(alg, rng, m, m, 2);
        if x.is_known_zero() {
            continue;
        }
        ok &= principal_eigen_check(alg, &x, &vectors)?;
    }
    Ok(Check {
        name: format!("{}: principal eigenvalues of d_-1", alg.label()),
        passed: ok,
        detail: "[∂ + ρ∨/(hz), X] = (m/h) X/z on random vectors".into(),
    })
}

/// Runs every structural check with trials seeded by `seed`.
pub fn selftest(seed: u64) -> Result<SelftestReport> {
    let mut rng = random::rng(seed);
    let mut checks = Vec::new();
    for (t, r) in SUITE {
        let alg = AlgebraData::build(t, r)?;
        let verified = alg.verify();
        checks.push(Check {
            name: format!("{}: catalog relations", alg.label()),
            passed: verified.is_ok(),
            detail: match verified {
                Ok(()) => "Chevalley, Serre, [ρ∨, e_i] = e_i, trace zero, Λ homogeneous".into(),
                Err(e) => e.to_string(),
            },
        });
        if t == LieType::A {
            let power = alg.lambda.pow(alg.coxeter as u32)?;
            let zid = MatrixSeries::monomial(RatMatrix::identity(alg.n), 1);
            checks.push(Check {
                name: format!("{}: Λ^h = z·id", alg.label()),
                passed: power == zid,
                detail: format!("h = {}", alg.coxeter),
            });
        }
        checks.push(kernel_dims(&alg, &classical_exponents(t, r))?);
        checks.push(eigen(&alg, &mut rng)?);
    }

    let samples: Vec<ScalarSeries> = [(3, -2), (1, 0), (-1, 4)]
        .iter()
        .map(|&(a, b)| {
            ScalarSeries::from_rational_terms(
                [(a, int(1)), (b, rat(-1, 3))],
                None,
            )
        })
        .collect::<Result<_>>()?;
    let witt = witt_check(3, &samples)?;
    checks.push(Check {
        name: "Witt relations |i|, |j| <= 3".into(),
        passed: witt.passed(),
        detail: format!("{} cases, {} failures", witt.cases, witt.failures.len()),
    });

    for (t, r, trials) in [(LieType::A, 1, 50), (LieType::C, 2, 20)] {
        let alg = AlgebraData::build(t, r)?;
        let law = trace_law_property(&alg, trials, &mut rng)?;
        checks.push(Check {
            name: format!("{}: trace law", alg.label()),
            passed: law.passed(),
            detail: format!("{} trials, {} failures", law.trials, law.failures.len()),
        });
    }
    Ok(SelftestReport { seed, checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponents_of_c3() {
        assert_eq!(classical_exponents(LieType::C, 3), vec![1, 3, 5]);
    }

    #[test]
    fn suite_is_green() {
        let report = selftest(random::DEFAULT_SEED).unwrap();
        for c in &report.checks {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
