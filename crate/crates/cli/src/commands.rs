use rayon::prelude::*;

use ks_core::blending::BlendContext;
use ks_core::exact::parse_rational;
use ks_core::grassmann::{cartan_point, first_order, stabilization_residual, unblend_point, wk_point, Dressing};
use ks_core::ks::{self, ScalarOperator};
use ks_core::random::{gauge_perturbation, rng, small_rational};
use ks_core::rigidity::{rigidity_certificate, RigidityReport, Verdict};
use ks_core::text::{parse_scalar_operator, parse_series, render_series, render_series_in};
use ks_core::{int, AlgebraData, KsError, LieType, MatrixSeries, RatMatrix, Rational, Result, ScalarSeries};

use crate::report::*;
use crate::{AlgebraArgs, Config, Expect, Format};

pub struct Outcome {
    pub text: String,
    pub code: u8,
}

fn emit<T: serde::Serialize>(cfg: &Config, command: &str, body: &T, text: impl FnOnce(&T) -> String, code: u8) -> Outcome {
    let text = match cfg.format {
        Format::Json => json(command, body),
        Format::Text => text(body),
    };
    Outcome { text, code }
}

fn algebra(a: &AlgebraArgs) -> Result<AlgebraData> {
    let t: LieType = a.lie_type.parse()?;
    AlgebraData::build(t, a.rank)
}

pub fn algebra_show(cfg: &Config, a: &AlgebraArgs) -> Result<Outcome> {
    let alg = algebra(a)?;
    let strs = |v: &[RatMatrix]| v.iter().map(|m| m.to_string()).collect();
    let rep = AlgebraReport {
        algebra: alg.label(),
        n: alg.n,
        dim: alg.dim(),
        coxeter: alg.coxeter,
        exponents: alg.exponents.clone(),
        kac_labels: alg.kac_labels.clone(),
        cartan: alg.cartan.clone(),
        e: strs(&alg.e),
        f: strs(&alg.f),
        h: strs(&alg.h),
        rho_vee: alg.rho_vee.to_string(),
        lambda: series(&alg.lambda),
        verified: alg.verify().is_ok(),
    };
    Ok(emit(cfg, "algebra show", &rep, AlgebraReport::text, 0))
}

pub fn blend_verify(cfg: &Config, h: i64) -> Result<Outcome> {
    let ctx = BlendContext::new(h)?;
    let alg = AlgebraData::build(LieType::A, (h - 1) as usize)?;
    let floor = -cfg.order;
    let c = ctx.traceless_c();
    let scalar = ctx.scalar_ks_operator(&c, 1);
    let blended = ctx.blend_operator(&scalar)?;
    let rho = MatrixSeries::monomial(alg.rho_vee.scale(&ks_core::rat(1, h)), -1);
    let matches = blended.deriv_coeff == ScalarSeries::constant(int(1)) && blended.potential == &rho + &alg.lambda;

    let mut r = rng(cfg.seed);
    let sample = ScalarSeries::from_rational_terms(
        (floor..=2 * h).map(|j| (j, small_rational(&mut r))),
        Some(floor),
    )?;
    let mut intertwining = true;
    for j in -3 * h..=3 * h {
        let f = ScalarSeries::term(int(1), j);
        intertwining &= ctx.blend_column(&scalar.apply(&f)?)?.agrees_with(&blended.apply(&ctx.blend_column(&f)?)?);
    }
    intertwining &= ctx
        .blend_column(&scalar.apply(&sample)?)?
        .agrees_with(&blended.apply(&ctx.blend_column(&sample)?)?);
    let round_trip = ctx.unblend(&ctx.blend(&sample)?)? == sample;

    let table = (-h..2 * h)
        .map(|j| {
            let (component, z_exponent) = ctx.slot(j);
            SlotRow {
                zeta_exponent: j,
                component: component + 1,
                z_exponent,
            }
        })
        .collect();
    let rep = BlendReport {
        h,
        floor,
        c: q(&c),
        table,
        scalar_operator: format!(
            "({}) d/dzeta + {}",
            render_series_in(&scalar.deriv_coeff, "zeta"),
            render_series_in(&scalar.potential, "zeta")
        ),
        deriv_coeff: render_series(&blended.deriv_coeff),
        potential: series(&blended.potential),
        matches_rho_lambda: matches,
        intertwining,
        round_trip,
        passed: matches && intertwining && round_trip,
    };
    let code = if rep.passed { 0 } else { 2 };
    Ok(emit(cfg, "blend verify", &rep, BlendReport::text, code))
}

pub enum OperatorInput {
    Potential(String),
    Operator(String),
}

pub fn gauge_fix(cfg: &Config, h: i64, input: &OperatorInput, floor: i64) -> Result<Outcome> {
    let op = match input {
        OperatorInput::Potential(p) => ScalarOperator::reduced(h, parse_series(p)?),
        OperatorInput::Operator(o) => parse_scalar_operator(o)?,
    };
    let fixed = ks::gauge_fix(&op, h, floor)?;
    let eliminated = fixed.fixed.potential.min_exponent().is_none_or(|k| k >= -h)
        && fixed.fixed.potential.floor().is_none_or(|fl| fl <= floor);
    let rep = GaugeReport {
        h,
        floor,
        input: OperatorJson::new(&op),
        gamma: render_series(&fixed.gamma),
        fixed: OperatorJson::new(&fixed.fixed),
        steps: fixed
            .steps
            .iter()
            .map(|s| GaugeStepRow {
                exponent: s.exponent,
                index: s.index,
                value: q(&s.value),
            })
            .collect(),
        eliminated,
    };
    Ok(emit(cfg, "gauge fix", &rep, GaugeReport::text, 0))
}

fn dress_report(alg: &AlgebraData, kind: &str, operator: &MatrixSeries, d: &Dressing, stabilized: bool) -> DressReport {
    DressReport {
        algebra: alg.label(),
        kind: kind.into(),
        operator: series(operator),
        order: d.order,
        a: series(&d.point.a),
        components: d
            .components
            .iter()
            .map(|(p, u)| ComponentRow {
                pdeg: *p,
                value: series(u),
            })
            .collect(),
        steps: d.steps.len(),
        kernel_normalization: "zero ker ad Λ component unless a later step requires one".into(),
        kernel_choices: d
            .kernel_choices
            .iter()
            .map(|k| KernelRow {
                pdeg: k.pdeg,
                fixed_at: k.fixed_at,
                component: series(&k.component),
            })
            .collect(),
        stabilized,
        z_stable: None,
        unblended_stable: None,
    }
}

pub fn dress_cartan(cfg: &Config, a: &AlgebraArgs, diag: &str) -> Result<Outcome> {
    let alg = algebra(a)?;
    let entries = diag.split(',').map(parse_rational).collect::<Result<Vec<Rational>>>()?;
    if entries.len() != alg.n {
        return Err(KsError::DimensionMismatch(format!("{} diagonal entries for n = {}", entries.len(), alg.n)));
    }
    let h_elem = RatMatrix::diagonal(&entries);
    let d = cartan_point(&h_elem, &alg, cfg.order)?;
    let op = first_order(&alg, &h_elem, &int(1));
    let ok = stabilization_residual(&d.point, &op, cfg.order)?.is_zero();
    let rep = dress_report(&alg, "cartan", &op.potential, &d, ok);
    Ok(emit(cfg, "dress cartan", &rep, DressReport::text, if ok { 0 } else { 2 }))
}

pub fn dress_wk(cfg: &Config, a: &AlgebraArgs, sign: i64) -> Result<Outcome> {
    let alg = algebra(a)?;
    let wk = wk_point(&alg, sign, cfg.order)?;
    let mut rep = dress_report(&alg, "witten-kontsevich", &wk.operator.potential, &wk.dressing, wk.operator_residual.is_zero());
    rep.z_stable = Some(wk.z_residual.is_zero());
    if alg.lie_type == LieType::A {
        let ctx = BlendContext::new(alg.coxeter)?;
        let scalar = ctx.scalar_ks_operator(&ctx.traceless_c(), sign);
        let basis = unblend_point(&wk.dressing.point, &ctx)?;
        rep.unblended_stable =
            Some(basis.residual(&scalar, cfg.order)?.is_zero() && basis.period_residual(cfg.order)?.is_zero());
    }
    let ok = rep.stabilized && rep.z_stable == Some(true) && rep.unblended_stable != Some(false);
    Ok(emit(cfg, "dress wk", &rep, DressReport::text, if ok { 0 } else { 2 }))
}

fn scan_item(r: &RigidityReport) -> ScanItem {
    ScanItem {
        star: q(&r.star),
        g: r.g_descriptor.clone(),
        verdict: r.verdict.to_string(),
        obstruction_trace: q(&r.obstruction_trace),
        expected_trace: q(&(int(r.n as i64) * &r.star)),
        proof_trace: r.proof_trace.clone(),
        certificate: r.certificate.as_ref().map(|c| CertificateRow {
            pdeg: c.pdeg,
            residue: series(&c.residue),
            null_covector: c.null_covector.iter().map(q).collect(),
            pairing: q(&c.pairing),
            trace_value: q(&c.trace_value),
        }),
        dressing: r.dressing.as_ref().map(|d| DressingRow {
            a: series(&d.point.a),
            steps: d.steps.len(),
            lookahead: d.kernel_choices.len(),
            residual_zero: d.residual.is_zero(),
        }),
    }
}

pub fn rigidity_scan(
    cfg: &Config,
    a: &AlgebraArgs,
    star_list: &str,
    samples: usize,
    expect: Option<Expect>,
) -> Result<Outcome> {
    let alg = algebra(a)?;
    let stars = star_list.split(',').map(parse_rational).collect::<Result<Vec<Rational>>>()?;
    let mut gs = vec![(alg.lambda.clone(), "Λ".to_string())];
    for s in 1..=samples {
        let mut r = rng(cfg.seed.wrapping_add(s as u64));
        let p = gauge_perturbation(&alg, &mut r, -cfg.order - 4)?;
        gs.push((p.g, format!("gauge(A0 = {})", series(&p.a0))));
    }
    let jobs: Vec<(&Rational, &(MatrixSeries, String))> = stars.iter().flat_map(|s| gs.iter().map(move |g| (s, g))).collect();
    let reports = jobs
        .par_iter()
        .map(|(star, (g, desc))| rigidity_certificate(&alg, star, g, desc, cfg.order))
        .collect::<Result<Vec<_>>>()?;
    let matched = reports.iter().all(|r| match expect {
        None => true,
        Some(Expect::Rigid) => r.verdict == Verdict::RigidConsistent,
        Some(Expect::Obstructed) => r.verdict == Verdict::Obstructed,
    });
    let rep = ScanReport {
        algebra: alg.label(),
        n: alg.n,
        order: cfg.order,
        seed: cfg.seed,
        items: reports.iter().map(scan_item).collect(),
        expect: expect.map(|e| match e {
            Expect::Rigid => Verdict::RigidConsistent.to_string(),
            Expect::Obstructed => Verdict::Obstructed.to_string(),
        }),
        matched,
    };
    Ok(emit(cfg, "rigidity scan", &rep, ScanReport::text, if matched { 0 } else { 2 }))
}

pub fn witt_check(cfg: &Config, bound: i64) -> Result<Outcome> {
    let mut r = rng(cfg.seed);
    let samples = (0..3)
        .map(|_| ScalarSeries::from_rational_terms((-3..=3).map(|j| (j, small_rational(&mut r))), None))
        .collect::<Result<Vec<_>>>()?;
    let rep = ks::witt_check(bound, &samples)?;
    let out = WittCheckReport {
        bound,
        cases: rep.cases,
        failures: rep.failures.iter().map(|f| format!("i = {}, j = {}, sample {}", f.i, f.j, f.sample)).collect(),
        passed: rep.passed(),
    };
    Ok(emit(cfg, "witt check", &out, WittCheckReport::text, if out.passed { 0 } else { 2 }))
}

pub fn selftest(cfg: &Config) -> Result<Outcome> {
    let rep = ks_core::selftest::selftest(cfg.seed)?;
    let out = SelftestOut {
        passed: rep.passed(),
        seed: rep.seed,
        checks: rep.checks,
    };
    Ok(emit(cfg, "selftest", &out, SelftestOut::text, if out.passed { 0 } else { 2 }))
}
