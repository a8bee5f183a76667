use ks_core::exact::{int, rat};
use ks_core::grassmann::{cartan_point, conjugation_dress, first_order, stabilization_residual, wk_point};
use ks_core::ks::MatrixOperator;
use ks_core::laurent::MatrixSeries;
use ks_core::random::{gauge_perturbation, rng};
use ks_core::{AlgebraData, LieType, RatMatrix};

fn algebras() -> Vec<AlgebraData> {
    [(LieType::A, 1), (LieType::A, 2), (LieType::A, 3), (LieType::C, 2)]
        .into_iter()
        .map(|(t, r)| AlgebraData::build(t, r).unwrap())
        .collect()
}

#[test]
fn wk_points_at_order_12() {
    for alg in algebras() {
        for sign in [1, -1] {
            let wk = wk_point(&alg, sign, 12).unwrap();
            assert!(wk.operator_residual.is_zero(), "{} sign {sign}", alg.label());
            assert!(wk.z_residual.is_zero(), "{} sign {sign}", alg.label());
            alg.check_loop_element(&wk.dressing.point.a).unwrap();
        }
    }
}

#[test]
fn cartan_points_at_order_12() {
    let a2 = AlgebraData::build(LieType::A, 2).unwrap();
    let h = RatMatrix::diagonal(&[rat(2, 3), rat(-5, 7), rat(1, 21)]);
    let d = cartan_point(&h, &a2, 12).unwrap();
    let op = first_order(&a2, &h, &int(1));
    assert!(stabilization_residual(&d.point, &op, 12).unwrap().is_zero());
}

#[test]
fn non_cartan_residue_is_rejected() {
    let a1 = AlgebraData::build(LieType::A, 1).unwrap();
    assert!(cartan_point(&a1.e[0], &a1, 4).is_err());
}

// Undoing a known gauge transformation: the source is built as
// γ₀(∂ + ρ∨/(hz) + Λ)γ₀⁻¹, so a dressing back to ∂ + Λ must exist.
#[test]
fn gauge_family_is_dressed() {
    for alg in algebras() {
        let mut r = rng(11);
        let p = gauge_perturbation(&alg, &mut r, -14).unwrap();
        let rho = MatrixSeries::monomial(alg.rho_vee.scale(&rat(1, alg.coxeter)), -1);
        let source = MatrixOperator::d_plus(&rho + &p.g);
        let target = MatrixOperator::d_plus(alg.lambda.clone());
        let d = conjugation_dress(&source, &target, &alg, 10)
            .unwrap()
            .dressing()
            .unwrap();
        assert!(d.residual.is_zero(), "{}", alg.label());
        assert!(stabilization_residual(&d.point, &source, 10).unwrap().is_zero());
    }
}
