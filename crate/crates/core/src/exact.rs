//! Exact rational scalars and dense rational matrices.
//!
//! Everything downstream (series coefficients, Lie algebra generators, the
//! graded solvers) is built on these two types. There is no floating point
//! anywhere in the crate.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{KsError, Result};

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rational = BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Renders `p/q`, or `p` when the denominator is one.
pub fn render_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `[+-]digits[/digits]`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let err = |msg: &str| KsError::Parse {
        pos: 0,
        msg: format!("{msg}: {text:?}"),
    };
    let t = text.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (t, None),
    };
    let valid_int = |s: &str, allow_sign: bool| {
        let digits = if allow_sign {
            s.strip_prefix(['-', '+']).unwrap_or(s)
        } else {
            s
        };
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !valid_int(num, true) {
        return Err(err("malformed numerator"));
    }
    let n = BigInt::from_str(num).map_err(|_| err("malformed numerator"))?;
    let d = match den {
        None => BigInt::one(),
        Some(d) => {
            if !valid_int(d, false) {
                return Err(err("malformed denominator"));
            }
            BigInt::from_str(d).map_err(|_| err("malformed denominator"))?
        }
    };
    if d.is_zero() {
        return Err(err("zero denominator"));
    }
    Ok(Rational::new(n, d))
}

/// Dense row-major rational matrix.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    /// The matrix unit with a single one at `(i, j)`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m.set(i, j, Rational::one());
        m
    }

    pub fn diagonal(diag: &[Rational]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m.set(i, i, d.clone());
        }
        m
    }

    pub fn from_entries(rows: usize, cols: usize, entries: Vec<Rational>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(KsError::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(KsError::DimensionMismatch("ragged rows".into()));
        }
        Self::from_entries(r, c, rows.into_iter().flatten().collect())
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let data = rows
            .iter()
            .map(|row| row.iter().map(|&x| int(x)).collect())
            .collect();
        Self::from_rows(data).expect("rectangular literal")
    }

    pub fn column(values: Vec<Rational>) -> Self {
        let n = values.len();
        Self {
            rows: n,
            cols: 1,
            entries: values,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Rational) {
        self.entries[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column_vec(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    pub fn diagonal_entries(&self) -> Vec<Rational> {
        (0..self.rows.min(self.cols))
            .map(|i| self.get(i, i).clone())
            .collect()
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows.min(self.cols)).fold(Rational::zero(), |acc, i| acc + self.get(i, i))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&Rational, &Rational) -> Rational) -> Self {
        assert_eq!(self.shape(), other.shape(), "matrix shape mismatch");
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn neg(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|a| -a).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|a| a * c).collect(),
        }
    }

    /// Adds `c * other` in place.
    pub fn add_scaled(&mut self, other: &Self, c: &Rational) {
        assert_eq!(self.shape(), other.shape(), "matrix shape mismatch");
        if c.is_zero() {
            return;
        }
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            if !b.is_zero() {
                *a += b * c;
            }
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(KsError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(self.mul(other))
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    /// `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn rank(&self) -> usize {
        self.cols - mat_kernel(self).len()
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut inv_cols = Vec::with_capacity(n);
        for j in 0..n {
            let mut e = vec![Rational::zero(); n];
            e[j] = Rational::one();
            match mat_solve(self, &e).ok()? {
                Solution::Solved { x, kernel } if kernel.is_empty() => inv_cols.push(x),
                _ => return None,
            }
        }
        let mut inv = Self::zeros(n, n);
        for (j, col) in inv_cols.into_iter().enumerate() {
            for (i, v) in col.into_iter().enumerate() {
                inv.set(i, j, v);
            }
        }
        Some(inv)
    }
}

impl fmt::Display for RatMatrix {
    /// Row-major bracketed form, e.g. `[[1, 0], [0, -1/2]]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", render_rational(self.get(i, j)))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Outcome of [`mat_solve`]: either a particular solution together with a
/// kernel basis, or a Fredholm witness `y` with `yᵀA = 0` and `yᵀb ≠ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution {
    Solved {
        x: Vec<Rational>,
        kernel: Vec<Vec<Rational>>,
    },
    Unsolvable {
        witness: Vec<Rational>,
    },
}

impl Solution {
    pub fn is_solved(&self) -> bool {
        matches!(self, Solution::Solved { .. })
    }
}

struct Reduction {
    /// Reduced row echelon form of A.
    rref: Vec<Vec<Rational>>,
    /// Row operations: transform · A = rref.
    transform: Vec<Vec<Rational>>,
    pivots: Vec<usize>,
}

fn row_reduce(a: &RatMatrix) -> Reduction {
    let (m, n) = a.shape();
    let mut r = a.to_rows();
    let mut t = RatMatrix::identity(m).to_rows();
    let mut pivots = Vec::new();
    let mut prow = 0;
    for col in 0..n {
        if prow == m {
            break;
        }
        let Some(found) = (prow..m).find(|&i| !r[i][col].is_zero()) else {
            continue;
        };
        r.swap(prow, found);
        t.swap(prow, found);
        let inv = r[prow][col].recip();
        for x in r[prow].iter_mut().chain(t[prow].iter_mut()) {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        for i in 0..m {
            if i == prow || r[i][col].is_zero() {
                continue;
            }
            let factor = r[i][col].clone();
            let (pr, pt) = (r[prow].clone(), t[prow].clone());
            for (x, p) in r[i].iter_mut().zip(&pr) {
                if !p.is_zero() {
                    *x -= p * &factor;
                }
            }
            for (x, p) in t[i].iter_mut().zip(&pt) {
                if !p.is_zero() {
                    *x -= p * &factor;
                }
            }
        }
        pivots.push(col);
        prow += 1;
    }
    Reduction {
        rref: r,
        transform: t,
        pivots,
    }
}

fn kernel_from(red: &Reduction, cols: usize) -> Vec<Vec<Rational>> {
    let free = (0..cols).filter(|c| !red.pivots.contains(c));
    free.map(|f| {
        let mut v = vec![Rational::zero(); cols];
        v[f] = Rational::one();
        for (row, &p) in red.pivots.iter().enumerate() {
            v[p] = -red.rref[row][f].clone();
        }
        v
    })
    .collect()
}

/// Solves `A·x = b` exactly by Gauss-Jordan elimination (first nonzero pivot).
pub fn mat_solve(a: &RatMatrix, b: &[Rational]) -> Result<Solution> {
    if a.rows() != b.len() {
        return Err(KsError::DimensionMismatch(format!(
            "system has {} rows but right-hand side has {} entries",
            a.rows(),
            b.len()
        )));
    }
    let red = row_reduce(a);
    let tb: Vec<Rational> = red
        .transform
        .iter()
        .map(|row| {
            row.iter()
                .zip(b)
                .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
        })
        .collect();
    let rank = red.pivots.len();
    if let Some(i) = (rank..a.rows()).find(|&i| !tb[i].is_zero()) {
        return Ok(Solution::Unsolvable {
            witness: red.transform[i].clone(),
        });
    }
    let mut x = vec![Rational::zero(); a.cols()];
    for (row, &p) in red.pivots.iter().enumerate() {
        x[p] = tb[row].clone();
    }
    Ok(Solution::Solved {
        x,
        kernel: kernel_from(&red, a.cols()),
    })
}

/// Basis of `ker A`, one vector per free column of the echelon form.
pub fn mat_kernel(a: &RatMatrix) -> Vec<Vec<Rational>> {
    kernel_from(&row_reduce(a), a.cols())
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Largest absolute numerator or denominator bit length; a cheap growth probe.
pub fn bit_size(q: &Rational) -> u64 {
    q.numer().abs().bits().max(q.denom().bits())
}
