//! Big-cell points of the Sato Grassmannian and the graded dressing constructor.
//!
//! A point is stored either through a dressing `γ = exp(A)`, `V = γ·H⁺`, or
//! through an admissible basis reduced by leading-term elimination.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::blending::BlendContext;
use crate::error::{KsError, Result};
use crate::exact::{dot, int, mat_kernel, mat_solve, RatMatrix, Rational, Solution};
use crate::ks::{derivation, MatrixOperator, ScalarOperator};
use crate::laurent::{Coefficient, MatrixSeries, ScalarSeries, Series};
use crate::lie::{AlgebraData, Gradation, GradedPiece};

/// `V = γ·H⁺` with `γ = exp(A)`, `A` in the negative loop algebra.
#[derive(Clone, Debug)]
pub struct DressingRep {
    pub a: MatrixSeries,
    pub gamma: MatrixSeries,
    pub gamma_inv: MatrixSeries,
}

impl DressingRep {
    pub fn new(a: MatrixSeries, alg: &AlgebraData, work_floor: i64) -> Result<Self> {
        alg.check_loop_element(&a)?;
        if let Some(k) = a.max_exponent() {
            if k >= 0 {
                return Err(KsError::Contract(format!(
                    "dressing exponent has support at z^{k}"
                )));
            }
        }
        Ok(Self {
            gamma: a.exp_neg_to(work_floor)?,
            gamma_inv: a.negated().exp_neg_to(work_floor)?,
            a,
        })
    }

    /// The free point `H⁺`.
    pub fn identity(n: usize) -> Self {
        Self {
            a: MatrixSeries::exact_zero((n, n)),
            gamma: MatrixSeries::identity(n),
            gamma_inv: MatrixSeries::identity(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    /// Columns `γ·e_i`, an admissible basis over `C[z]`.
    pub fn basis(&self) -> VectorBasis {
        VectorBasis {
            generators: (0..self.dim()).map(|j| self.gamma.column(j)).collect(),
        }
    }
}

/// `V = span{z^q·g_i}` with `g_i = e_i + (negative powers of z)`.
#[derive(Clone, Debug)]
pub struct VectorBasis {
    pub generators: Vec<MatrixSeries>,
}

/// `V = span{ζ^{p·q}·g_r}` with `g_r = ζ^r + (lower powers)`, `r = 0..K`, `K ≥ p − 1`.
#[derive(Clone, Debug)]
pub struct ScalarBasis {
    pub period: i64,
    pub generators: Vec<ScalarSeries>,
}

/// A residual that should vanish, with the range where it is trustworthy.
#[derive(Clone, Debug, PartialEq)]
pub struct Residual<T> {
    /// Known part at exponents `−order..−1`; anything below is unknown, not zero.
    pub residual: T,
    pub order: i64,
}

pub type MatrixResidual = Residual<MatrixSeries>;

impl Residual<MatrixSeries> {
    pub fn is_zero(&self) -> bool {
        self.residual.is_known_zero()
    }
}

impl Residual<ScalarSeries> {
    pub fn is_zero(&self) -> bool {
        self.residual.is_known_zero()
    }
}

impl Residual<Vec<MatrixSeries>> {
    pub fn is_zero(&self) -> bool {
        self.residual.iter().all(|r| r.is_known_zero())
    }
}

impl Residual<Vec<ScalarSeries>> {
    pub fn is_zero(&self) -> bool {
        self.residual.iter().all(|r| r.is_known_zero())
    }
}

fn trusted<C: Coefficient>(s: &Series<C>, order: i64) -> Result<Series<C>> {
    if let Some(f) = s.floor() {
        if f > -order {
            return Err(KsError::Truncation {
                exponent: -order,
                floor: f,
            });
        }
    }
    Ok(s.part_below(0).truncate(-order))
}

/// Residual of `op` on `V = γH⁺`: the negative part of the potential of `γ⁻¹·op·γ`.
pub fn stabilization_residual(
    v: &DressingRep,
    op: &MatrixOperator,
    order: i64,
) -> Result<MatrixResidual> {
    if op.dim() != v.dim() {
        return Err(KsError::DimensionMismatch("operator and point differ in size".into()));
    }
    if op.deriv_coeff.min_exponent().is_some_and(|k| k < 0) {
        return Err(KsError::Unsupported(
            "derivative coefficients with negative powers".into(),
        ));
    }
    let conj = op.conjugate_with(&v.gamma, &v.gamma_inv)?;
    Ok(Residual {
        residual: trusted(&conj.potential, order)?,
        order,
    })
}

impl VectorBasis {
    fn pivots(&self) -> Result<usize> {
        let n = self.generators.len();
        for (i, g) in self.generators.iter().enumerate() {
            if g.shape() != (n, 1) {
                return Err(KsError::DimensionMismatch("generator is not an n×1 column".into()));
            }
            let lead_ok = g.max_exponent() == Some(0)
                && g.coeff(0)? == RatMatrix::column((0..n).map(|r| int(i64::from(r == i))).collect());
            if !lead_ok {
                return Err(KsError::Contract(format!(
                    "generator {i} does not lead with e_{}",
                    i + 1
                )));
            }
        }
        Ok(n)
    }

    /// Remainder of `w` after eliminating every nonnegative power of `z`.
    pub fn reduce(&self, w: &MatrixSeries) -> Result<MatrixSeries> {
        let n = self.pivots()?;
        let mut w = w.clone();
        while let Some(q) = w.max_exponent().filter(|&q| q >= 0) {
            let lead = w.coeff(q)?;
            for i in 0..n {
                let c = lead.get(i, 0).clone();
                if !c.is_zero() {
                    w = w.checked_sub(&self.generators[i].shift(q).scaled(&c))?;
                }
            }
        }
        Ok(w)
    }

    /// Residuals of `op·g_i` for every generator.
    pub fn residual(&self, op: &MatrixOperator, order: i64) -> Result<Residual<Vec<MatrixSeries>>> {
        let residual = self
            .generators
            .iter()
            .map(|g| trusted(&self.reduce(&op.apply(g)?)?, order))
            .collect::<Result<_>>()?;
        Ok(Residual { residual, order })
    }

    /// Residuals of `z·g_i`.
    pub fn z_residual(&self, order: i64) -> Result<Residual<Vec<MatrixSeries>>> {
        let residual = self
            .generators
            .iter()
            .map(|g| trusted(&self.reduce(&g.shift(1))?, order))
            .collect::<Result<_>>()?;
        Ok(Residual { residual, order })
    }
}

impl ScalarBasis {
    fn pivots(&self) -> Result<BTreeMap<i64, &ScalarSeries>> {
        if self.period < 1 {
            return Err(KsError::Contract("period must be positive".into()));
        }
        let mut map = BTreeMap::new();
        for g in &self.generators {
            let k = g
                .max_exponent()
                .ok_or_else(|| KsError::Contract("zero generator".into()))?;
            if g.coeff(k)? != Rational::one() {
                return Err(KsError::Contract(format!("generator leading at ζ^{k} is not monic")));
            }
            if map.insert(k, g).is_some() {
                return Err(KsError::Contract(format!("two generators lead at ζ^{k}")));
            }
        }
        for r in 0..self.period {
            if !map.contains_key(&r) {
                return Err(KsError::Contract(format!("no generator leads at ζ^{r}")));
            }
        }
        if map.keys().any(|&k| k < 0) {
            return Err(KsError::Contract("generator leads at a negative power".into()));
        }
        Ok(map)
    }

    /// Remainder of `w` after eliminating every nonnegative power of `ζ`.
    pub fn reduce(&self, w: &ScalarSeries) -> Result<ScalarSeries> {
        let pivots = self.pivots()?;
        let mut w = w.clone();
        while let Some(j) = w.max_exponent().filter(|&j| j >= 0) {
            let c = w.coeff(j)?;
            let (k, g) = pivots
                .range(..=j)
                .rev()
                .find(|(k, _)| (j - **k) % self.period == 0)
                .expect("residues 0..period are covered");
            w = w.checked_sub(&g.shift(j - k).scaled(&c))?;
        }
        Ok(w)
    }

    /// Residuals of `op·g` for every generator.
    pub fn residual(&self, op: &ScalarOperator, order: i64) -> Result<Residual<Vec<ScalarSeries>>> {
        let residual = self
            .generators
            .iter()
            .map(|g| trusted(&self.reduce(&op.apply(g)?)?, order))
            .collect::<Result<_>>()?;
        Ok(Residual { residual, order })
    }

    /// Residuals of `ζ^period·g`.
    pub fn period_residual(&self, order: i64) -> Result<Residual<Vec<ScalarSeries>>> {
        let residual = self
            .generators
            .iter()
            .map(|g| trusted(&self.reduce(&g.shift(self.period))?, order))
            .collect::<Result<_>>()?;
        Ok(Residual { residual, order })
    }
}

/// The scalar point `ξ⁻¹(V)` for `V = γH⁺` in `C((1/z))^h`.
pub fn unblend_point(v: &DressingRep, ctx: &BlendContext) -> Result<ScalarBasis> {
    let generators = (0..v.dim())
        .map(|j| ctx.unblend_column(&v.gamma.column(j)))
        .collect::<Result<_>>()?;
    Ok(ScalarBasis {
        period: ctx.h(),
        generators,
    })
}

/// The graded equation at `pdeg` has no solution.
#[derive(Clone, Debug)]
pub struct ObstructionCertificate {
    pub pdeg: i64,
    /// Degree-`pdeg` part of the residual that could not be removed.
    pub residue: MatrixSeries,
    /// Matrix-unit coordinates `(i, j, k)` the covector is indexed by.
    pub coordinates: Vec<(usize, usize, i64)>,
    /// Kills the image of every admissible correction, pairs nonzero with `residue`.
    pub null_covector: Vec<Rational>,
    pub pairing: Rational,
    /// Trace of the `z^{−1}` coefficient of the full residual at the failing step.
    pub trace_value: Rational,
    /// Dressing exponent accumulated before the failure.
    pub partial: MatrixSeries,
}

impl ObstructionCertificate {
    /// Recomputes the pairing from the stored data.
    pub fn verify(&self, alg: &AlgebraData) -> Result<bool> {
        let values = alg.coordinates_of(&self.residue, &self.coordinates)?;
        let pairing = dot(&self.null_covector, &values);
        Ok(!pairing.is_zero() && pairing == self.pairing)
    }
}

/// A kernel component fixed by a later equation.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelChoice {
    pub pdeg: i64,
    pub fixed_at: i64,
    pub component: MatrixSeries,
}

#[derive(Clone, Debug)]
pub struct DressStep {
    pub pdeg: i64,
    /// Dimension of the solution space of this step's linear system.
    pub freedom: usize,
    pub used_lookahead: bool,
}

#[derive(Clone, Debug)]
pub struct Dressing {
    pub point: DressingRep,
    /// Homogeneous pieces `U_i` of `A`, by principal degree.
    pub components: BTreeMap<i64, MatrixSeries>,
    pub steps: Vec<DressStep>,
    pub kernel_choices: Vec<KernelChoice>,
    /// `γ⁻¹·source·γ − target`, known part at exponents `−order..−1`.
    pub residual: MatrixResidual,
    pub order: i64,
}

#[derive(Clone, Debug)]
pub enum DressOutcome {
    Dressed(Box<Dressing>),
    Obstructed(Box<ObstructionCertificate>),
}

impl DressOutcome {
    pub fn dressing(self) -> Option<Dressing> {
        match self {
            DressOutcome::Dressed(d) => Some(*d),
            DressOutcome::Obstructed(_) => None,
        }
    }

    pub fn certificate(self) -> Option<ObstructionCertificate> {
        match self {
            DressOutcome::Dressed(_) => None,
            DressOutcome::Obstructed(c) => Some(*c),
        }
    }
}

/// Monomials of principal degree `m` whose power of `z` is negative.
fn negative_piece(alg: &AlgebraData, m: i64) -> GradedPiece {
    let full = alg.graded_piece(m);
    let keep: Vec<usize> = (0..full.labels.len())
        .filter(|&i| full.labels[i].1 <= -1)
        .collect();
    GradedPiece {
        pdeg: m,
        basis: keep.iter().map(|&i| full.basis[i].clone()).collect(),
        labels: keep.iter().map(|&i| full.labels[i]).collect(),
    }
}

fn columns_to_matrix(rows: usize, cols: Vec<Vec<Rational>>) -> Result<RatMatrix> {
    if cols.is_empty() {
        return Ok(RatMatrix::zeros(rows, 0));
    }
    Ok(RatMatrix::from_rows(cols)?.transpose())
}

struct Dresser<'a> {
    alg: &'a AlgebraData,
    scale: Rational,
}

impl Dresser<'_> {
    /// `exp(−x)·(∂_z + cur)·exp(x)`, potential only.
    fn step(&self, cur: &MatrixSeries, x: &MatrixSeries, work_floor: i64) -> Result<MatrixSeries> {
        let e = x.exp_neg_to(work_floor)?;
        let inv = x.negated().exp_neg_to(work_floor)?;
        Ok(MatrixOperator::d_plus(cur.clone()).conjugate_with(&e, &inv)?.potential)
    }

    /// Lowest `z`-exponent among the coordinates of principal degree `m`.
    fn min_exponent(&self, m: i64) -> i64 {
        let h = self.alg.coxeter;
        let lo = m - (h - 1);
        lo.div_euclid(h) + i64::from(lo.rem_euclid(h) != 0)
    }

    /// Kernel of `ad(cΛ)` on the negative part of principal degree `p`.
    fn kernel(&self, p: i64) -> Result<Vec<MatrixSeries>> {
        let piece = negative_piece(self.alg, p);
        let coords = self.alg.gl_coordinates(p + 1);
        let lam = self.alg.lambda.scaled(&self.scale);
        let cols = piece
            .basis
            .iter()
            .map(|b| self.alg.coordinates_of(&b.commutator(&lam)?, &coords))
            .collect::<Result<Vec<_>>>()?;
        let mat = columns_to_matrix(coords.len(), cols)?;
        Ok(mat_kernel(&mat)
            .iter()
            .map(|v| piece.combine(v, self.alg.n))
            .collect())
    }
}

/// Finds `γ = exp(Σ_{i<0} U_i)` with `γ⁻¹·source·γ = target` up to `z^{−order}`,
/// or the first principal degree where no such `γ` exists.
///
/// `target` must be `∂_z + c·Λ` with `c ≠ 0`, and `source − target` must have
/// only negative principal degrees. Components of `U_i` along `ker ad Λ` are
/// zero unless a later degree requires them.
pub fn conjugation_dress(
    source: &MatrixOperator,
    target: &MatrixOperator,
    alg: &AlgebraData,
    order: i64,
) -> Result<DressOutcome> {
    let n = alg.n;
    let h = alg.coxeter;
    if order < 1 {
        return Err(KsError::Contract("order must be positive".into()));
    }
    if source.dim() != n || target.dim() != n {
        return Err(KsError::DimensionMismatch("operators do not match the algebra".into()));
    }
    let one = ScalarSeries::constant(Rational::one());
    if source.deriv_coeff != one || target.deriv_coeff != one {
        return Err(KsError::Contract("source and target must both start with ∂_z".into()));
    }
    let target_split = alg.principal_degree_split(&target.potential)?;
    let scale = match target_split.get(&1) {
        Some(part) if target_split.len() == 1 => {
            let c = part.coeff(0)?;
            let e0 = &alg.e[0];
            let (idx, v) = e0
                .entries()
                .iter()
                .enumerate()
                .find(|(_, v)| !v.is_zero())
                .expect("e_1 is nonzero");
            let s = &c.entries()[idx] / v;
            if *part != alg.lambda.scaled(&s) {
                return Err(KsError::Contract("target potential must be a multiple of Λ".into()));
            }
            s
        }
        _ => return Err(KsError::Contract("target potential must be a multiple of Λ".into())),
    };
    let diff = source.potential.checked_sub(&target.potential)?;
    if let Some((&p, _)) = alg.gl_principal_split(&diff).iter().next_back() {
        if p >= 0 {
            return Err(KsError::Contract(format!(
                "source − target has a component of principal degree {p} >= 0"
            )));
        }
    }
    let dresser = Dresser {
        alg,
        scale: scale.clone(),
    };
    let lam = alg.lambda.scaled(&scale);

    let m_end = -order * h - (h - 1);
    let work_floor = dresser.min_exponent(m_end) - 2;
    let mut cur = source.potential.clone().with_floor(Some(work_floor));
    let mut gamma = MatrixSeries::identity(n).with_floor(Some(work_floor));
    let mut steps = Vec::new();
    let mut kernel_choices = Vec::new();

    for m in (m_end..=0).rev() {
        let r = cur.checked_sub(&target.potential)?;
        for (p, part) in alg.gl_principal_split(&r) {
            if p > m && !part.is_known_zero() {
                return Err(KsError::Unsupported(format!(
                    "graded recursion left a residue at principal degree {p} while solving degree {m}"
                )));
            }
        }
        let rm = alg.gl_component(&r, m)?;
        if rm.is_known_zero() {
            continue;
        }
        let coords = alg.gl_coordinates(m);
        let rhs = alg.coordinates_of(&rm, &coords)?;
        let piece = negative_piece(alg, m - 1);
        let mut cols = piece
            .basis
            .iter()
            .map(|b| alg.coordinates_of(&b.commutator(&lam)?, &coords))
            .collect::<Result<Vec<_>>>()?;
        let plain = columns_to_matrix(coords.len(), cols.clone())?;
        let mut kernel = Vec::new();
        let mut solution = mat_solve(&plain, &rhs)?;
        let lookahead_pdeg = m + h;
        if !solution.is_solved() && lookahead_pdeg <= -1 {
            kernel = dresser.kernel(lookahead_pdeg)?;
            if !kernel.is_empty() {
                for kappa in &kernel {
                    let shifted = dresser.step(&cur, kappa, work_floor)?.checked_sub(&target.potential)?;
                    let effect = alg.gl_component(&shifted, m)?.checked_sub(&rm)?;
                    let values = alg.coordinates_of(&effect, &coords)?;
                    cols.push(values.iter().map(|v| -v).collect());
                }
                solution = mat_solve(&columns_to_matrix(coords.len(), cols)?, &rhs)?;
            }
        }
        match solution {
            Solution::Solved { x, kernel: free } => {
                let (ys, ks) = x.split_at(piece.basis.len());
                let mut y = piece.combine(ys, n);
                let used = !kernel.is_empty();
                if used {
                    let kappa = kernel
                        .iter()
                        .zip(ks)
                        .filter(|(_, c)| !c.is_zero())
                        .fold(MatrixSeries::exact_zero((n, n)), |acc, (k, c)| &acc + &k.scaled(c));
                    if !kappa.is_known_zero() {
                        y = y.checked_add(&kappa)?;
                        kernel_choices.push(KernelChoice {
                            pdeg: lookahead_pdeg,
                            fixed_at: m,
                            component: kappa,
                        });
                    }
                }
                if !y.is_known_zero() {
                    cur = dresser.step(&cur, &y, work_floor)?;
                    gamma = gamma.mul(&y.exp_neg_to(work_floor)?)?;
                }
                steps.push(DressStep {
                    pdeg: m,
                    freedom: free.len(),
                    used_lookahead: used,
                });
            }
            Solution::Unsolvable { witness } => {
                let pairing = dot(&witness, &rhs);
                let trace_value = r.coeff(-1)?.trace();
                let a = gamma.log_neg_to(work_floor)?;
                return Ok(DressOutcome::Obstructed(Box::new(ObstructionCertificate {
                    pdeg: m,
                    residue: rm,
                    coordinates: coords,
                    null_covector: witness,
                    pairing,
                    trace_value,
                    partial: a,
                })));
            }
        }
    }

    let a = gamma.log_neg_to(work_floor)?;
    alg.check_loop_element(&a)?;
    let components = alg.principal_degree_split(&a)?;
    let work_floor = -order - 2;
    let point = DressingRep::new(a, alg, work_floor)?;
    let diff = source
        .conjugate_with(&point.gamma, &point.gamma_inv)?
        .potential
        .checked_sub(&target.potential)?;
    let residual = Residual {
        residual: trusted(&diff, order)?,
        order,
    };
    let top = diff.part_from(0);
    if !residual.is_zero() || !top.is_known_zero() {
        return Err(KsError::Internal(
            "graded recursion finished but re-conjugation does not reach the target".into(),
        ));
    }
    Ok(DressOutcome::Dressed(Box::new(Dressing {
        point,
        components,
        steps,
        kernel_choices,
        residual,
        order,
    })))
}

/// `∂_z + P/z + c·Λ`.
pub fn first_order(alg: &AlgebraData, residue: &RatMatrix, lambda_scale: &Rational) -> MatrixOperator {
    MatrixOperator::d_plus(
        &MatrixSeries::monomial(residue.clone(), -1) + &alg.lambda.scaled(lambda_scale),
    )
}

/// A point `V = μH⁺` with `(∂_z + H/z + Λ)V ⊆ V` for `H` in the Cartan subalgebra.
pub fn cartan_point(h_elem: &RatMatrix, alg: &AlgebraData, order: i64) -> Result<Dressing> {
    let coords = alg.project(h_elem)?;
    let outside = coords
        .iter()
        .zip(&alg.basis)
        .any(|(c, b)| !c.is_zero() && !b.is_cartan());
    if outside {
        return Err(KsError::Contract(format!(
            "{h_elem} is not in the Cartan subalgebra"
        )));
    }
    let source = first_order(alg, h_elem, &Rational::one());
    let target = first_order(alg, &RatMatrix::zeros(alg.n, alg.n), &Rational::one());
    match conjugation_dress(&source, &target, alg, order)? {
        DressOutcome::Dressed(d) => Ok(*d),
        DressOutcome::Obstructed(c) => Err(KsError::Internal(format!(
            "Cartan dressing obstructed at principal degree {} (pairing {})",
            c.pdeg, c.pairing
        ))),
    }
}

/// The Witten-Kontsevich point: `zV ⊆ V` and `(d_{−1}^{pri} + sign·Λ)V ⊆ V`.
#[derive(Clone, Debug)]
pub struct WkPoint {
    pub sign: i64,
    pub dressing: Dressing,
    pub operator: MatrixOperator,
    pub operator_residual: MatrixResidual,
    pub z_residual: Residual<Vec<MatrixSeries>>,
}

pub fn wk_point(alg: &AlgebraData, sign: i64, order: i64) -> Result<WkPoint> {
    if sign != 1 && sign != -1 {
        return Err(KsError::Contract("sign must be +1 or -1".into()));
    }
    let d = derivation(-1, Gradation::Pri, alg)?.operator;
    let operator = MatrixOperator::d_plus(&d.potential + &alg.lambda.scaled(&int(sign)));
    let target = first_order(alg, &RatMatrix::zeros(alg.n, alg.n), &int(sign));
    let dressing = match conjugation_dress(&operator, &target, alg, order)? {
        DressOutcome::Dressed(d) => *d,
        DressOutcome::Obstructed(c) => {
            return Err(KsError::Internal(format!(
                "Witten-Kontsevich dressing obstructed at principal degree {}",
                c.pdeg
            )))
        }
    };
    let operator_residual = stabilization_residual(&dressing.point, &operator, order)?;
    let z_residual = dressing.point.basis().z_residual(order)?;
    Ok(WkPoint {
        sign,
        operator,
        operator_residual,
        z_residual,
        dressing,
    })
}
