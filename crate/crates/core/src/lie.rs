//! Simple Lie algebras in trace-zero defining representations.
//!
//! [`AlgebraData::build`] constructs the Chevalley generators of type `A_r`
//! (`sl_{r+1}`) or `C_r` (`sp_{2r}`), then derives everything else from them
//! and checks it: the Cartan matrix, ρ∨, a root-space basis with root
//! coordinates, the Coxeter number, the exponents, the Kac labels and the
//! cyclic element `Λ = e_1 + … + e_r + E_0·z`.
//!
//! Loop-algebra elements are [`MatrixSeries`] whose coefficients lie in the
//! span of the catalog. Two gradations are used throughout: the principal one
//! (`deg E_α z^k = ht α + k·h`) and the homogeneous one (`deg = k`).

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{KsError, Result};
use crate::exact::{dot, int, mat_solve, RatMatrix, Rational, Solution};
use crate::laurent::MatrixSeries;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LieType {
    A,
    C,
}

impl fmt::Display for LieType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LieType::A => write!(f, "A"),
            LieType::C => write!(f, "C"),
        }
    }
}

impl std::str::FromStr for LieType {
    type Err = KsError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(LieType::A),
            "C" | "c" => Ok(LieType::C),
            other => Err(KsError::Unsupported(format!(
                "Lie type {other:?} (only A and C are cataloged)"
            ))),
        }
    }
}

/// A basis element of the finite-dimensional algebra: a root vector, or a
/// Cartan element (zero root).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootVector {
    pub matrix: RatMatrix,
    /// Coordinates of the root in the simple roots `α_1..α_r`.
    pub root: Vec<i64>,
}

impl RootVector {
    pub fn height(&self) -> i64 {
        self.root.iter().sum()
    }

    pub fn is_cartan(&self) -> bool {
        self.root.iter().all(|&m| m == 0)
    }
}

/// Which gradation of the loop algebra to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gradation {
    /// `s = (1, 0, …, 0)`: the degree is the power of `z`.
    Hom,
    /// `s = (1, …, 1)`: every affine Chevalley generator has degree one.
    Pri,
}

/// A simple Lie algebra with its defining representation and loop data.
#[derive(Clone, Debug)]
pub struct AlgebraData {
    pub lie_type: LieType,
    pub rank: usize,
    /// Dimension of the defining representation.
    pub n: usize,
    pub e: Vec<RatMatrix>,
    pub f: Vec<RatMatrix>,
    pub h: Vec<RatMatrix>,
    /// `[h_i, e_j] = cartan[i][j]·e_j`.
    pub cartan: Vec<Vec<i64>>,
    pub rho_vee: RatMatrix,
    pub coxeter: i64,
    pub exponents: Vec<i64>,
    /// Kac labels `a_0, …, a_r`.
    pub kac_labels: Vec<i64>,
    /// Generator of the lowest root space; `e_0 = E_0 ⊗ z`.
    pub lowest_root: RatMatrix,
    /// `Λ_{1,z} = Σ_{i≥1} e_i + E_0·z`.
    pub lambda: MatrixSeries,
    pub twist_k: i64,
    pub kac_a0: i64,
    /// Cartan elements first, then root vectors ordered by height.
    pub basis: Vec<RootVector>,
    basis_columns: RatMatrix,
    /// Principal degree of the matrix unit `E_ij`: `ρ_i − ρ_j`.
    unit_degree: Vec<Vec<i64>>,
}

fn flatten(m: &RatMatrix) -> Vec<Rational> {
    m.entries().to_vec()
}

fn cartan_table(lie_type: LieType, rank: usize) -> Vec<Vec<i64>> {
    let mut a = vec![vec![0; rank]; rank];
    for i in 0..rank {
        a[i][i] = 2;
        if i + 1 < rank {
            a[i][i + 1] = -1;
            a[i + 1][i] = -1;
        }
    }
    if lie_type == LieType::C && rank >= 2 {
        // α_r is the long simple root.
        a[rank - 2][rank - 1] = -2;
    }
    a
}

/// Scalar `c` with `x = c·y`, if any.
fn proportionality(x: &RatMatrix, y: &RatMatrix) -> Option<Rational> {
    let (idx, yv) = y.entries().iter().enumerate().find(|(_, v)| !v.is_zero())?;
    let c = &x.entries()[idx] / yv;
    (y.scale(&c) == *x).then_some(c)
}

fn generators(lie_type: LieType, rank: usize) -> (usize, Vec<RatMatrix>, RatMatrix) {
    match lie_type {
        LieType::A => {
            let n = rank + 1;
            let e = (0..rank).map(|i| RatMatrix::unit(n, i, i + 1)).collect();
            (n, e, RatMatrix::unit(n, n - 1, 0))
        }
        LieType::C => {
            // sp_{2r} preserving ω = Σ_{i≤r} (E_{i,i'} − E_{i',i}), i' = 2r+1−i.
            let n = 2 * rank;
            let prime = |i: usize| n - 1 - i;
            let mut e: Vec<RatMatrix> = (0..rank - 1)
                .map(|i| RatMatrix::unit(n, i, i + 1).sub(&RatMatrix::unit(n, prime(i + 1), prime(i))))
                .collect();
            e.push(RatMatrix::unit(n, rank - 1, rank));
            (n, e, RatMatrix::unit(n, n - 1, 0))
        }
    }
}

impl AlgebraData {
    /// Builds the untwisted algebra of the given type and rank.
    pub fn build(lie_type: LieType, rank: usize) -> Result<Self> {
        Self::build_with(lie_type, rank, 1, 1)
    }

    /// As [`AlgebraData::build`], with the twist order and first Kac label
    /// explicit. Only the untwisted case `k = a_0 = 1` is realized.
    pub fn build_with(lie_type: LieType, rank: usize, twist_k: i64, kac_a0: i64) -> Result<Self> {
        if twist_k != 1 || kac_a0 != 1 {
            return Err(KsError::Unsupported(format!(
                "untwisted only: got k = {twist_k}, a_0 = {kac_a0}"
            )));
        }
        match lie_type {
            LieType::A if rank >= 1 => {}
            LieType::C if rank >= 2 => {}
            _ => {
                return Err(KsError::Unsupported(format!(
                    "{lie_type}_{rank} is not in the catalog"
                )))
            }
        }
        let (n, e, lowest_root) = generators(lie_type, rank);
        let f: Vec<RatMatrix> = e.iter().map(RatMatrix::transpose).collect();
        let h: Vec<RatMatrix> = e.iter().zip(&f).map(|(x, y)| x.commutator(y)).collect();

        let expected = cartan_table(lie_type, rank);
        let mut cartan = vec![vec![0i64; rank]; rank];
        for i in 0..rank {
            for j in 0..rank {
                let c = proportionality(&h[i].commutator(&e[j]), &e[j]).ok_or_else(|| {
                    KsError::Internal(format!("[h_{}, e_{}] is not a multiple of e_{}", i + 1, j + 1, j + 1))
                })?;
                if !c.is_integer() {
                    return Err(KsError::Internal("non-integral Cartan entry".into()));
                }
                cartan[i][j] = c.to_integer().try_into().map_err(|_| {
                    KsError::Internal("Cartan entry out of range".into())
                })?;
            }
        }
        if cartan != expected {
            return Err(KsError::Internal(format!(
                "Cartan matrix {cartan:?} differs from the {lie_type}_{rank} table {expected:?}"
            )));
        }

        // ρ∨ = Σ c_i h_i with Σ_i c_i a_ij = 1 for every j.
        let at = RatMatrix::from_rows(
            (0..rank)
                .map(|j| (0..rank).map(|i| int(cartan[i][j])).collect())
                .collect(),
        )?;
        let ones = vec![Rational::one(); rank];
        let coeffs = match mat_solve(&at, &ones)? {
            Solution::Solved { x, .. } => x,
            Solution::Unsolvable { .. } => {
                return Err(KsError::Internal("no ρ∨ in the Cartan span".into()))
            }
        };
        let mut rho_vee = RatMatrix::zeros(n, n);
        for (c, hi) in coeffs.iter().zip(&h) {
            rho_vee.add_scaled(hi, c);
        }
        if !rho_vee.is_diagonal() {
            return Err(KsError::Internal("ρ∨ is not diagonal in the chosen basis".into()));
        }
        let rho = rho_vee.diagonal_entries();
        let mut unit_degree = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in 0..n {
                let d = &rho[i] - &rho[j];
                if !d.is_integer() {
                    return Err(KsError::Internal("ρ∨ eigenvalue gaps are not integral".into()));
                }
                unit_degree[i][j] = d.to_integer().try_into().unwrap_or(i64::MAX);
            }
        }

        let basis = root_basis(rank, &e, &f, &h)?;
        let highest = basis
            .iter()
            .max_by_key(|b| b.height())
            .expect("nonempty basis");
        let coxeter = highest.height() + 1;
        let mut kac_labels = vec![1];
        kac_labels.extend(highest.root.iter().copied());
        let exponents = exponents_from_heights(&basis, coxeter);

        let mut data = Self {
            lie_type,
            rank,
            n,
            e,
            f,
            h,
            cartan,
            rho_vee,
            coxeter,
            exponents,
            kac_labels,
            lowest_root: lowest_root.clone(),
            lambda: MatrixSeries::exact_zero((n, n)),
            twist_k,
            kac_a0,
            basis_columns: RatMatrix::zeros(0, 0),
            basis,
            unit_degree,
        };
        data.basis_columns = {
            let cols: Vec<Vec<Rational>> = data.basis.iter().map(|b| flatten(&b.matrix)).collect();
            RatMatrix::from_rows(cols)?.transpose()
        };
        let lowest_coords = data.project(&lowest_root)?;
        let lowest_ok = lowest_coords
            .iter()
            .zip(&data.basis)
            .all(|(c, b)| c.is_zero() || b.height() == 1 - coxeter);
        if !lowest_ok {
            return Err(KsError::Internal("E_0 is not a lowest root vector".into()));
        }
        let mut lambda = MatrixSeries::monomial(lowest_root, 1);
        for ei in &data.e {
            lambda = &lambda + &MatrixSeries::constant(ei.clone());
        }
        data.lambda = lambda;
        data.verify()?;
        Ok(data)
    }

    /// Short label such as `A_2`.
    pub fn label(&self) -> String {
        format!("{}_{}", self.lie_type, self.rank)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Checks the structural invariants of the catalog entry.
    pub fn verify(&self) -> Result<()> {
        let fail = |msg: String| Err(KsError::Internal(msg));
        let all = self
            .e
            .iter()
            .chain(&self.f)
            .chain(&self.h)
            .chain(std::iter::once(&self.rho_vee))
            .chain(std::iter::once(&self.lowest_root));
        for m in all {
            if !m.trace().is_zero() {
                return fail(format!("catalog matrix {m} has nonzero trace"));
            }
        }
        for i in 0..self.rank {
            for j in 0..self.rank {
                let ef = self.e[i].commutator(&self.f[j]);
                let expected = if i == j {
                    self.h[i].clone()
                } else {
                    RatMatrix::zeros(self.n, self.n)
                };
                if ef != expected {
                    return fail(format!("[e_{}, f_{}] != δ h", i + 1, j + 1));
                }
                let a = int(self.cartan[i][j]);
                if self.h[i].commutator(&self.e[j]) != self.e[j].scale(&a) {
                    return fail(format!("[h_{}, e_{}] != a e", i + 1, j + 1));
                }
                if self.h[i].commutator(&self.f[j]) != self.f[j].scale(&-a) {
                    return fail(format!("[h_{}, f_{}] != -a f", i + 1, j + 1));
                }
                if i != j {
                    // Serre: (ad e_i)^{1 - a_ij} e_j = 0.
                    let mut x = self.e[j].clone();
                    for _ in 0..(1 - self.cartan[i][j]) {
                        x = self.e[i].commutator(&x);
                    }
                    if !x.is_zero() {
                        return fail(format!("Serre relation fails for ({}, {})", i + 1, j + 1));
                    }
                }
            }
            if self.rho_vee.commutator(&self.e[i]) != self.e[i] {
                return fail(format!("[ρ∨, e_{}] != e_{}", i + 1, i + 1));
            }
            if self.rho_vee.commutator(&self.f[i]) != self.f[i].neg() {
                return fail(format!("[ρ∨, f_{}] != -f_{}", i + 1, i + 1));
            }
        }
        for b in &self.basis {
            if self.rho_vee.commutator(&b.matrix) != b.matrix.scale(&int(b.height())) {
                return fail(format!("ad ρ∨ eigenvalue of {} is not its height", b.matrix));
            }
        }
        if self.lambda_pdeg_check().is_err() {
            return fail("Λ is not homogeneous of principal degree 1".into());
        }
        if self.lie_type == LieType::A {
            let power = self.lambda.pow(self.coxeter as u32)?;
            if power != MatrixSeries::monomial(RatMatrix::identity(self.n), 1) {
                return fail("Λ^h != z·id".into());
            }
        }
        Ok(())
    }

    fn lambda_pdeg_check(&self) -> Result<()> {
        let split = self.principal_degree_split(&self.lambda)?;
        if split.len() == 1 && split.contains_key(&1) {
            Ok(())
        } else {
            Err(KsError::Internal("Λ inhomogeneous".into()))
        }
    }

    /// Principal degree of the matrix unit `E_ij ⊗ z^k`.
    pub fn unit_pdeg(&self, i: usize, j: usize, k: i64) -> i64 {
        self.unit_degree[i][j] + k * self.coxeter
    }

    /// Degree of `basis[idx] ⊗ z^k` in the gradation `s`.
    pub fn basis_degree(&self, s: Gradation, idx: usize, k: i64) -> i64 {
        let b = &self.basis[idx];
        match s {
            Gradation::Hom => k,
            Gradation::Pri => b.height() + k * self.coxeter,
        }
    }

    /// `h_s = k·Σ a_i s_i`.
    pub fn gradation_period(&self, s: Gradation) -> i64 {
        match s {
            Gradation::Hom => self.twist_k * self.kac_labels[0],
            Gradation::Pri => self.twist_k * self.kac_labels.iter().sum::<i64>(),
        }
    }

    /// Coordinates of `m` in the catalog basis.
    pub fn project(&self, m: &RatMatrix) -> Result<Vec<Rational>> {
        if m.shape() != (self.n, self.n) {
            return Err(KsError::DimensionMismatch(format!(
                "{}x{} matrix for a rank-{} representation",
                m.rows(),
                m.cols(),
                self.n
            )));
        }
        match mat_solve(&self.basis_columns, &flatten(m))? {
            Solution::Solved { x, .. } => Ok(x),
            Solution::Unsolvable { witness } => Err(KsError::Projection(format!(
                "{m} is not in {} (witness pairing {})",
                self.label(),
                crate::exact::render_rational(&dot(&witness, &flatten(m)))
            ))),
        }
    }

    pub fn in_span(&self, m: &RatMatrix) -> bool {
        self.project(m).is_ok()
    }

    /// Fails unless every known coefficient lies in the catalog span.
    pub fn check_loop_element(&self, x: &MatrixSeries) -> Result<()> {
        if x.shape() != (self.n, self.n) {
            return Err(KsError::DimensionMismatch("loop element of wrong size".into()));
        }
        for (k, m) in x.terms() {
            self.project(m).map_err(|e| match e {
                KsError::Projection(msg) => KsError::Projection(format!("coefficient of z^{k}: {msg}")),
                other => other,
            })?;
        }
        Ok(())
    }

    /// Decomposes a loop element by the gradation `s`, projecting every
    /// coefficient onto the catalog basis.
    pub fn gradation_split(
        &self,
        x: &MatrixSeries,
        s: Gradation,
    ) -> Result<BTreeMap<i64, MatrixSeries>> {
        let mut parts: BTreeMap<i64, Vec<(i64, RatMatrix)>> = BTreeMap::new();
        for (k, m) in x.terms() {
            let coords = self.project(m).map_err(|e| match e {
                KsError::Projection(msg) => KsError::Projection(format!(
                    "coefficient of z^{k} leaves the loop algebra: {msg}"
                )),
                other => other,
            })?;
            for (idx, c) in coords.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let deg = self.basis_degree(s, idx, k);
                parts
                    .entry(deg)
                    .or_default()
                    .push((k, self.basis[idx].matrix.scale(c)));
            }
        }
        parts
            .into_iter()
            .map(|(d, terms)| {
                let floor = match s {
                    Gradation::Hom => None,
                    Gradation::Pri => self.component_floor(d, x.floor()),
                };
                MatrixSeries::from_terms((self.n, self.n), terms, floor).map(|s| (d, s))
            })
            .collect()
    }

    /// Principal-degree components of a loop element (projection-checked).
    pub fn principal_degree_split(&self, x: &MatrixSeries) -> Result<BTreeMap<i64, MatrixSeries>> {
        self.gradation_split(x, Gradation::Pri)
    }

    /// Principal-degree components of an arbitrary `gl_n`-valued series,
    /// using the degrees of matrix units. Agrees with
    /// [`AlgebraData::principal_degree_split`] on the loop algebra.
    pub fn gl_principal_split(&self, x: &MatrixSeries) -> BTreeMap<i64, MatrixSeries> {
        let mut parts: BTreeMap<i64, BTreeMap<i64, RatMatrix>> = BTreeMap::new();
        for (k, m) in x.terms() {
            for i in 0..self.n {
                for j in 0..self.n {
                    let v = m.get(i, j);
                    if v.is_zero() {
                        continue;
                    }
                    parts
                        .entry(self.unit_pdeg(i, j, k))
                        .or_default()
                        .entry(k)
                        .or_insert_with(|| RatMatrix::zeros(self.n, self.n))
                        .set(i, j, v.clone());
                }
            }
        }
        parts
            .into_iter()
            .map(|(d, terms)| {
                let floor = self.component_floor(d, x.floor());
                let s = MatrixSeries::from_terms((self.n, self.n), terms, floor)
                    .expect("shapes agree");
                (d, s)
            })
            .collect()
    }

    /// Floor of the principal-degree `m` component of a series with floor
    /// `floor`: `None` when every coordinate of that degree is known.
    fn component_floor(&self, m: i64, floor: Option<i64>) -> Option<i64> {
        let f = floor?;
        let lo = self.gl_coordinates(m).iter().map(|c| c.2).min()?;
        (lo < f).then_some(f)
    }

    /// The principal-degree `m` component of a `gl_n`-valued series.
    ///
    /// Fails with a truncation error if part of that component is unknown.
    pub fn gl_component(&self, x: &MatrixSeries, m: i64) -> Result<MatrixSeries> {
        let coords = self.gl_coordinates(m);
        let mut terms: BTreeMap<i64, RatMatrix> = BTreeMap::new();
        for &(i, j, k) in &coords {
            let c = x.coeff(k)?;
            let v = c.get(i, j);
            if !v.is_zero() {
                terms
                    .entry(k)
                    .or_insert_with(|| RatMatrix::zeros(self.n, self.n))
                    .set(i, j, v.clone());
            }
        }
        MatrixSeries::from_terms((self.n, self.n), terms, None)
    }

    /// Matrix-unit coordinates `(i, j, k)` spanning principal degree `m` in `gl_n`.
    pub fn gl_coordinates(&self, m: i64) -> Vec<(usize, usize, i64)> {
        let h = self.coxeter;
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                let r = m - self.unit_degree[i][j];
                if r.rem_euclid(h) == 0 {
                    out.push((i, j, r.div_euclid(h)));
                }
            }
        }
        out.sort_by_key(|&(i, j, k)| (k, i, j));
        out
    }

    /// Values of `x` at the given coordinates.
    pub fn coordinates_of(
        &self,
        x: &MatrixSeries,
        coords: &[(usize, usize, i64)],
    ) -> Result<Vec<Rational>> {
        coords
            .iter()
            .map(|&(i, j, k)| x.coeff(k).map(|c| c.get(i, j).clone()))
            .collect()
    }

    /// Homogeneous piece of principal degree `m` in the loop algebra.
    pub fn graded_piece(&self, m: i64) -> GradedPiece {
        let h = self.coxeter;
        let mut labels = Vec::new();
        let mut basis = Vec::new();
        for (idx, b) in self.basis.iter().enumerate() {
            let r = m - b.height();
            if r.rem_euclid(h) == 0 {
                let k = r.div_euclid(h);
                labels.push((idx, k));
                basis.push(MatrixSeries::monomial(b.matrix.clone(), k));
            }
        }
        GradedPiece {
            pdeg: m,
            basis,
            labels,
        }
    }

    /// Matrix of `ad(c·Λ)` from principal degree `m − 1` to `gl_n` coordinates of degree `m`.
    pub fn ad_lambda_matrix(&self, m: i64, scale: &Rational) -> Result<(GradedPiece, RatMatrix)> {
        let piece = self.graded_piece(m - 1);
        let coords = self.gl_coordinates(m);
        let lam = self.lambda.scaled(scale);
        let mut cols = Vec::with_capacity(piece.basis.len());
        for b in &piece.basis {
            let image = b.commutator(&lam)?;
            cols.push(self.coordinates_of(&image, &coords)?);
        }
        let mat = if cols.is_empty() {
            RatMatrix::zeros(coords.len(), 0)
        } else {
            RatMatrix::from_rows(cols)?.transpose()
        };
        Ok((piece, mat))
    }

    /// Dimension of the kernel of `ad Λ` on the principal-degree `m` piece.
    pub fn ad_lambda_kernel_dim(&self, m: i64) -> Result<usize> {
        let (piece, mat) = self.ad_lambda_matrix(m + 1, &Rational::one())?;
        Ok(piece.basis.len() - mat.rank())
    }

    /// Solves `[Y, Λ] = X` for `X` homogeneous of principal degree `m`.
    pub fn ad_lambda_solve(&self, x: &MatrixSeries) -> Result<AdSolve> {
        self.ad_lambda_solve_scaled(x, &Rational::one())
    }

    /// Solves `[Y, c·Λ] = X`.
    pub fn ad_lambda_solve_scaled(&self, x: &MatrixSeries, scale: &Rational) -> Result<AdSolve> {
        if scale.is_zero() {
            return Err(KsError::Contract("Λ scale must be nonzero".into()));
        }
        let split = self.gl_principal_split(x);
        let m = match split.len() {
            0 => {
                return Ok(AdSolve::Solved {
                    y: MatrixSeries::exact_zero((self.n, self.n)),
                    kernel: Vec::new(),
                })
            }
            1 => *split.keys().next().expect("one key"),
            _ => {
                return Err(KsError::Contract(format!(
                    "right-hand side is not homogeneous: principal degrees {:?}",
                    split.keys().collect::<Vec<_>>()
                )))
            }
        };
        let coords = self.gl_coordinates(m);
        let (piece, mat) = self.ad_lambda_matrix(m, scale)?;
        let rhs = self.coordinates_of(x, &coords)?;
        match mat_solve(&mat, &rhs)? {
            Solution::Solved { x: sol, kernel } => {
                let combine = |v: &[Rational]| piece.combine(v, self.n);
                Ok(AdSolve::Solved {
                    y: combine(&sol),
                    kernel: kernel.iter().map(|k| combine(k)).collect(),
                })
            }
            Solution::Unsolvable { witness } => {
                let pairing = dot(&witness, &rhs);
                Ok(AdSolve::Obstructed(AdObstruction {
                    pdeg: m,
                    residue: self.gl_component(x, m)?,
                    coordinates: coords,
                    witness,
                    pairing,
                }))
            }
        }
    }
}

/// Builds a basis of the algebra: the `h_i`, then root vectors grown from the
/// simple ones by repeated brackets, each tagged with its root.
fn root_basis(
    rank: usize,
    e: &[RatMatrix],
    f: &[RatMatrix],
    h: &[RatMatrix],
) -> Result<Vec<RootVector>> {
    let mut basis: Vec<RootVector> = h
        .iter()
        .map(|m| RootVector {
            matrix: m.clone(),
            root: vec![0; rank],
        })
        .collect();
    for (gens, sign) in [(e, 1i64), (f, -1i64)] {
        let mut level: Vec<RootVector> = gens
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let mut root = vec![0; rank];
                root[i] = sign;
                RootVector {
                    matrix: m.clone(),
                    root,
                }
            })
            .collect();
        while !level.is_empty() {
            let mut next: Vec<RootVector> = Vec::new();
            for x in &level {
                for (i, g) in gens.iter().enumerate() {
                    let y = g.commutator(&x.matrix);
                    if y.is_zero() {
                        continue;
                    }
                    let mut root = x.root.clone();
                    root[i] += sign;
                    if next.iter().any(|r| r.root == root) {
                        continue;
                    }
                    next.push(RootVector { matrix: y, root });
                }
            }
            basis.append(&mut level);
            level = next;
        }
    }
    basis.sort_by_key(|b| (b.height() != 0, b.height()));
    let rows: Vec<Vec<Rational>> = basis.iter().map(|b| flatten(&b.matrix)).collect();
    let independent = RatMatrix::from_rows(rows)?.transpose().rank() == basis.len();
    if !independent {
        return Err(KsError::Internal("root vectors are linearly dependent".into()));
    }
    Ok(basis)
}

/// Exponents with multiplicity: `#{ht = m} − #{ht = m + 1}` copies of `m`.
fn exponents_from_heights(basis: &[RootVector], coxeter: i64) -> Vec<i64> {
    let count = |ht: i64| basis.iter().filter(|b| b.height() == ht).count() as i64;
    let mut out = Vec::new();
    for m in 1..coxeter {
        for _ in 0..(count(m) - count(m + 1)).max(0) {
            out.push(m);
        }
    }
    out
}

/// A homogeneous piece of the loop algebra in the principal gradation.
#[derive(Clone, Debug)]
pub struct GradedPiece {
    pub pdeg: i64,
    /// Monomials `B ⊗ z^k`, linearly independent, all of degree `pdeg`.
    pub basis: Vec<MatrixSeries>,
    /// `(catalog basis index, k)` for each monomial.
    pub labels: Vec<(usize, i64)>,
}

impl GradedPiece {
    pub fn combine(&self, coeffs: &[Rational], n: usize) -> MatrixSeries {
        self.basis
            .iter()
            .zip(coeffs)
            .filter(|(_, c)| !c.is_zero())
            .fold(MatrixSeries::exact_zero((n, n)), |acc, (b, c)| {
                &acc + &b.scaled(c)
            })
    }
}

/// Result of [`AlgebraData::ad_lambda_solve`].
#[derive(Clone, Debug)]
pub enum AdSolve {
    Solved {
        y: MatrixSeries,
        kernel: Vec<MatrixSeries>,
    },
    Obstructed(AdObstruction),
}

/// `X` is not in the image of `ad Λ`: a covector on the `gl_n` coordinates of
/// degree `pdeg` that kills the image but pairs nonzero with `X`.
#[derive(Clone, Debug)]
pub struct AdObstruction {
    pub pdeg: i64,
    pub residue: MatrixSeries,
    pub coordinates: Vec<(usize, usize, i64)>,
    pub witness: Vec<Rational>,
    pub pairing: Rational,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn sl2_catalog() {
        let a1 = AlgebraData::build(LieType::A, 1).unwrap();
        assert_eq!(a1.n, 2);
        assert_eq!(a1.coxeter, 2);
        assert_eq!(a1.rho_vee, RatMatrix::diagonal(&[rat(1, 2), rat(-1, 2)]));
        let expected = &MatrixSeries::constant(RatMatrix::unit(2, 0, 1))
            + &MatrixSeries::monomial(RatMatrix::unit(2, 1, 0), 1);
        assert_eq!(a1.lambda, expected);
        assert_eq!(a1.exponents, vec![1]);
    }

    #[test]
    fn sl3_rho_matches_closed_form() {
        let a2 = AlgebraData::build(LieType::A, 2).unwrap();
        assert_eq!(a2.coxeter, 3);
        assert_eq!(a2.exponents, vec![1, 2]);
        assert_eq!(a2.rho_vee, RatMatrix::diagonal(&[int(1), int(0), int(-1)]));
    }

    #[test]
    fn sp4_catalog() {
        let c2 = AlgebraData::build(LieType::C, 2).unwrap();
        assert_eq!(c2.n, 4);
        assert_eq!(c2.coxeter, 4);
        assert_eq!(c2.exponents, vec![1, 3]);
        assert_eq!(c2.cartan, vec![vec![2, -2], vec![-1, 2]]);
        assert_eq!(c2.kac_labels, vec![1, 2, 1]);
        assert_eq!(c2.dim(), 10);
    }

    #[test]
    fn rejects_unsupported() {
        assert!(matches!(
            AlgebraData::build(LieType::C, 1),
            Err(KsError::Unsupported(_))
        ));
        assert!(matches!(
            AlgebraData::build(LieType::A, 0),
            Err(KsError::Unsupported(_))
        ));
        assert!(matches!(
            AlgebraData::build_with(LieType::A, 2, 2, 1),
            Err(KsError::Unsupported(_))
        ));
    }

    #[test]
    fn splits() {
        let a1 = AlgebraData::build(LieType::A, 1).unwrap();
        let split = a1.principal_degree_split(&a1.lambda).unwrap();
        assert_eq!(split.keys().copied().collect::<Vec<_>>(), vec![1]);

        let rho_term = MatrixSeries::monomial(a1.rho_vee.scale(&rat(1, 2)), -1);
        let split = a1.principal_degree_split(&rho_term).unwrap();
        assert_eq!(split.keys().copied().collect::<Vec<_>>(), vec![-2]);

        let x = &MatrixSeries::constant(a1.e[0].clone()) + &MatrixSeries::monomial(a1.f[0].clone(), -1);
        let split = a1.principal_degree_split(&x).unwrap();
        assert_eq!(split.len(), 2);
        assert_eq!(split[&1], MatrixSeries::constant(a1.e[0].clone()));
        assert_eq!(split[&-3], MatrixSeries::monomial(a1.f[0].clone(), -1));
    }

    #[test]
    fn projection_failure_names_the_residual() {
        let a1 = AlgebraData::build(LieType::A, 1).unwrap();
        let id = MatrixSeries::monomial(RatMatrix::identity(2), -1);
        assert!(matches!(
            a1.principal_degree_split(&id),
            Err(KsError::Projection(_))
        ));
    }

    #[test]
    fn ad_lambda_examples() {
        let a1 = AlgebraData::build(LieType::A, 1).unwrap();
        let x = MatrixSeries::monomial(a1.rho_vee.scale(&rat(1, 2)), -1);
        let AdSolve::Solved { y, .. } = a1.ad_lambda_solve(&x).unwrap() else {
            panic!("ρ∨/(hz) must be in the image");
        };
        assert_eq!(y.commutator(&a1.lambda).unwrap(), x);

        let AdSolve::Obstructed(ob) = a1.ad_lambda_solve(&a1.lambda).unwrap() else {
            panic!("Λ is central in its own centralizer");
        };
        assert_eq!(ob.pdeg, 1);
        assert!(!ob.pairing.is_zero());

        let AdSolve::Solved { y, .. } = a1
            .ad_lambda_solve(&MatrixSeries::exact_zero((2, 2)))
            .unwrap()
        else {
            panic!()
        };
        assert!(y.is_exact_zero());

        let inhomogeneous = &a1.lambda + &x;
        assert!(matches!(
            a1.ad_lambda_solve(&inhomogeneous),
            Err(KsError::Contract(_))
        ));
    }
}
