use serde::Serialize;

use ks_core::exact::render_rational;
use ks_core::rigidity::ProofStep;
use ks_core::selftest::Check;
use ks_core::ks::ScalarOperator;
use ks_core::text::{render_matrix_series, render_scalar_operator, render_series};
use ks_core::{MatrixSeries, Rational};

pub const SCHEMA: &str = "ks-lab/1";

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema: &'static str,
    command: &'a str,
    #[serde(flatten)]
    body: &'a T,
}

pub fn json<T: Serialize>(command: &str, body: &T) -> String {
    let env = Envelope {
        schema: SCHEMA,
        command,
        body,
    };
    let mut s = serde_json::to_string_pretty(&env).expect("reports serialize");
    s.push('\n');
    s
}

pub fn q(x: &Rational) -> String {
    render_rational(x)
}

pub fn series(x: &MatrixSeries) -> String {
    render_matrix_series(x)
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAILED"
    }
}

#[derive(Serialize)]
pub struct AlgebraReport {
    pub algebra: String,
    pub n: usize,
    pub dim: usize,
    pub coxeter: i64,
    pub exponents: Vec<i64>,
    pub kac_labels: Vec<i64>,
    pub cartan: Vec<Vec<i64>>,
    pub e: Vec<String>,
    pub f: Vec<String>,
    pub h: Vec<String>,
    pub rho_vee: String,
    pub lambda: String,
    pub verified: bool,
}

impl AlgebraReport {
    pub fn text(&self) -> String {
        let mut out = format!("algebra {} (n = {}, dim = {})\n", self.algebra, self.n, self.dim);
        out += &format!("coxeter number: {}\n", self.coxeter);
        out += &format!("exponents: {:?}\n", self.exponents);
        out += &format!("kac labels: {:?}\n", self.kac_labels);
        out += &format!("cartan matrix: {:?}\n", self.cartan);
        for (i, ((e, f), h)) in self.e.iter().zip(&self.f).zip(&self.h).enumerate() {
            out += &format!("e_{0} = {e}\nf_{0} = {f}\nh_{0} = {h}\n", i + 1);
        }
        out += &format!("rho_vee = {}\n", self.rho_vee);
        out += &format!("Lambda = {}\n", self.lambda);
        out += &format!("relations: {}\n", mark(self.verified));
        out
    }
}

#[derive(Serialize)]
pub struct SlotRow {
    pub zeta_exponent: i64,
    pub component: usize,
    pub z_exponent: i64,
}

#[derive(Serialize)]
pub struct BlendReport {
    pub h: i64,
    pub floor: i64,
    pub c: String,
    pub table: Vec<SlotRow>,
    pub scalar_operator: String,
    pub deriv_coeff: String,
    pub potential: String,
    pub matches_rho_lambda: bool,
    pub intertwining: bool,
    pub round_trip: bool,
    pub passed: bool,
}

impl BlendReport {
    pub fn text(&self) -> String {
        let mut out = format!("blending for h = {} at floor {}\n", self.h, self.floor);
        out += "  zeta^j   component   z^q\n";
        for r in &self.table {
            out += &format!("  {:>6}   {:>9}   {:>3}\n", r.zeta_exponent, r.component, r.z_exponent);
        }
        out += &format!("scalar operator: {}\n", self.scalar_operator);
        out += &format!("blended: ({}) d/dz + {}\n", self.deriv_coeff, self.potential);
        out += &format!("equals d/dz + rho_vee/(hz) + Lambda: {}\n", mark(self.matches_rho_lambda));
        out += &format!("intertwining on |j| <= 3h: {}\n", mark(self.intertwining));
        out += &format!("blend/unblend round trip: {}\n", mark(self.round_trip));
        out
    }
}

#[derive(Serialize)]
pub struct GaugeStepRow {
    pub exponent: i64,
    pub index: i64,
    pub value: String,
}

#[derive(Serialize)]
pub struct OperatorJson {
    pub text: String,
    pub deriv_coeff: String,
    pub potential: String,
    pub mode: String,
}

impl OperatorJson {
    pub fn new(op: &ScalarOperator) -> Self {
        Self {
            text: render_scalar_operator(op),
            deriv_coeff: render_series(&op.deriv_coeff),
            potential: render_series(&op.potential),
            mode: "scalar".into(),
        }
    }
}

#[derive(Serialize)]
pub struct GaugeReport {
    pub h: i64,
    pub floor: i64,
    pub input: OperatorJson,
    pub gamma: String,
    pub fixed: OperatorJson,
    pub steps: Vec<GaugeStepRow>,
    pub eliminated: bool,
}

impl GaugeReport {
    pub fn text(&self) -> String {
        let mut out = format!("gauge fixing for h = {} at floor {}\n", self.h, self.floor);
        out += &format!("operator: {}\n", self.input.text);
        out += &format!("gamma = {}\n", self.gamma);
        out += &format!("fixed: {}\n", self.fixed.text);
        for s in &self.steps {
            out += &format!("  z^{}: d_{} = {}\n", s.exponent, s.index, s.value);
        }
        out += &format!("exponents below -h eliminated: {}\n", mark(self.eliminated));
        out
    }
}

#[derive(Serialize)]
pub struct ComponentRow {
    pub pdeg: i64,
    pub value: String,
}

#[derive(Serialize)]
pub struct KernelRow {
    pub pdeg: i64,
    pub fixed_at: i64,
    pub component: String,
}

#[derive(Serialize)]
pub struct DressReport {
    pub algebra: String,
    pub kind: String,
    pub operator: String,
    pub order: i64,
    pub a: String,
    pub components: Vec<ComponentRow>,
    pub steps: usize,
    pub kernel_normalization: String,
    pub kernel_choices: Vec<KernelRow>,
    pub stabilized: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_stable: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unblended_stable: Option<bool>,
}

impl DressReport {
    pub fn text(&self) -> String {
        let mut out = format!("{} point for {} at order {}\n", self.kind, self.algebra, self.order);
        out += &format!("operator: d/dz + {}\n", self.operator);
        out += &format!("graded steps: {}\n", self.steps);
        out += &format!("kernel normalization: {}\n", self.kernel_normalization);
        for k in &self.kernel_choices {
            out += &format!("  kernel part of U[{}] fixed at step {}: {}\n", k.pdeg, k.fixed_at, k.component);
        }
        for c in &self.components {
            out += &format!("  U[{}] = {}\n", c.pdeg, c.value);
        }
        out += &format!("stabilization residual zero: {}\n", mark(self.stabilized));
        if let Some(z) = self.z_stable {
            out += &format!("zV in V: {}\n", mark(z));
        }
        if let Some(u) = self.unblended_stable {
            out += &format!("unblended scalar point stabilized: {}\n", mark(u));
        }
        out
    }
}

#[derive(Serialize)]
pub struct CertificateRow {
    pub pdeg: i64,
    pub residue: String,
    pub null_covector: Vec<String>,
    pub pairing: String,
    pub trace_value: String,
}

#[derive(Serialize)]
pub struct ScanItem {
    pub star: String,
    pub g: String,
    pub verdict: String,
    pub obstruction_trace: String,
    pub expected_trace: String,
    pub proof_trace: Vec<ProofStep>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dressing: Option<DressingRow>,
}

#[derive(Serialize)]
pub struct DressingRow {
    pub a: String,
    pub steps: usize,
    pub lookahead: usize,
    pub residual_zero: bool,
}

#[derive(Serialize)]
pub struct ScanReport {
    pub algebra: String,
    pub n: usize,
    pub order: i64,
    pub seed: u64,
    pub items: Vec<ScanItem>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expect: Option<String>,
    pub matched: bool,
}

impl ScanReport {
    pub fn text(&self) -> String {
        let mut out = format!("rigidity scan for {} at order {} (seed {})\n", self.algebra, self.order, self.seed);
        for it in &self.items {
            out += &format!(
                "star = {:<6} g = {:<28} {:<17} trace = {} (n*star = {})\n",
                it.star, it.g, it.verdict, it.obstruction_trace, it.expected_trace
            );
            if let Some(c) = &it.certificate {
                out += &format!("  obstructed at principal degree {}, pairing {}\n", c.pdeg, c.pairing);
            }
            for s in &it.proof_trace {
                out += &format!("  [{}] {}: {}\n", mark(s.passed), s.name, s.detail);
            }
        }
        if let Some(e) = &self.expect {
            out += &format!("expected {e}: {}\n", mark(self.matched));
        }
        out
    }
}

#[derive(Serialize)]
pub struct WittCheckReport {
    pub bound: i64,
    pub cases: usize,
    pub failures: Vec<String>,
    pub passed: bool,
}

impl WittCheckReport {
    pub fn text(&self) -> String {
        let mut out = format!("Witt relations for |i|, |j| <= {}: {} cases\n", self.bound, self.cases);
        for f in &self.failures {
            out += &format!("  failed: {f}\n");
        }
        out += &format!("result: {}\n", mark(self.passed));
        out
    }
}

#[derive(Serialize)]
pub struct SelftestOut {
    pub seed: u64,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl SelftestOut {
    pub fn text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out += &format!("[{}] {}: {}\n", mark(c.passed), c.name, c.detail);
        }
        out += &format!("selftest: {}\n", mark(self.passed));
        out
    }
}
