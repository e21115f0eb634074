//! Exact rational arithmetic and small dense linear algebra.
//!
//! Everything here works over arbitrary-precision rationals; the catalog
//! coefficients run to fifty-odd digits, so no fixed-width type is enough.
//! Rank and linear solves use fraction-free (Bareiss) elimination on an
//! integer copy of the matrix.

use std::fmt;
use std::ops::Index;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Exact rational number, always kept in lowest terms with positive denominator.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("malformed rational literal {0:?}")]
    Parse(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("spectra overlap: Sylvester system is singular")]
    SpectraOverlap,
}

/// Shorthand for the rational `num/den`. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `p`, `p/q` or a decimal literal such as `-0.125` or `2.5e-3`.
/// Decimals are converted exactly: `"0.3"` is `3/10`.
pub fn parse_rational(text: &str) -> Result<Rational, ExactError> {
    let err = || ExactError::Parse(text.to_string());
    let s = text.trim();
    if s.is_empty() {
        return Err(err());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_integer(num.trim()).ok_or_else(err)?;
        let den_str = den.trim();
        if den_str.starts_with(['+', '-']) {
            return Err(err());
        }
        let den = parse_integer(den_str).ok_or_else(err)?;
        if den.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(num, den));
    }

    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i64 = s[pos + 1..].parse().map_err(|_| err())?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first() {
        Some(b'-') => (true, &mantissa[1..]),
        Some(b'+') => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(err());
    }
    if !whole.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(err());
    }
    let all_digits = format!("{whole}{frac}");
    let mut value = Rational::from_integer(all_digits.parse::<BigInt>().map_err(|_| err())?);
    let scale = exponent - frac.len() as i64;
    let ten = BigInt::from(10u32);
    if scale >= 0 {
        value *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if negative { -value } else { value })
}

fn parse_integer(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Nearest binary64 value.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Entrywise power `v^k`.
pub fn pow_entries(v: &[Rational], k: u32) -> Vec<Rational> {
    v.iter().map(|x| num_traits::pow(x.clone(), k as usize)).collect()
}

pub fn is_zero_vec(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// Dense row-major rational matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { Rational::one() } else { Rational::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self { rows, cols, entries }
    }

    /// Builds a matrix from rows; all rows must share one length.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, ExactError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(ExactError::Dimension("ragged rows".into()));
        }
        let n = rows.len();
        Ok(Self {
            rows: n,
            cols,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn column(v: &[Rational]) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            entries: v.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn set(&mut self, i: usize, j: usize, value: Rational) {
        self.entries[i * self.cols + j] = value;
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn is_zero(&self) -> bool {
        is_zero_vec(&self.entries)
    }

    pub fn mul(&self, other: &RMatrix) -> RMatrix {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut out = RMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out.entries[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    /// `M·v`
    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// `vᵀ·M`, returned as a plain vector.
    pub fn vec_mul(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.rows, v.len(), "vector-matrix dimension mismatch");
        let mut out = vec![Rational::zero(); self.cols];
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += vi * a;
            }
        }
        out
    }

    pub fn add(&self, other: &RMatrix) -> RMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        RMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &RMatrix) -> RMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        RMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, factor: &Rational) -> RMatrix {
        RMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|a| a * factor).collect(),
        }
    }

    /// Copy of the block `rows × cols`.
    pub fn block(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> RMatrix {
        RMatrix::from_fn(rows.len(), cols.len(), |i, j| {
            self[(rows.start + i, cols.start + j)].clone()
        })
    }

    /// Horizontal concatenation; all parts must share a row count.
    pub fn hstack(parts: &[&RMatrix]) -> RMatrix {
        let rows = parts.first().map_or(0, |m| m.rows);
        assert!(parts.iter().all(|m| m.rows == rows), "hstack row mismatch");
        let cols = parts.iter().map(|m| m.cols).sum();
        let mut out = RMatrix::zeros(rows, cols);
        let mut offset = 0;
        for m in parts {
            for i in 0..rows {
                for j in 0..m.cols {
                    out.set(i, offset + j, m[(i, j)].clone());
                }
            }
            offset += m.cols;
        }
        out
    }

    pub fn max_abs(&self) -> Rational {
        self.entries
            .iter()
            .map(Signed::abs)
            .max()
            .unwrap_or_else(Rational::zero)
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(to_f64).collect())
            .collect()
    }
}

impl Index<(usize, usize)> for RMatrix {
    type Output = Rational;

    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.entries[i * self.cols + j]
    }
}

impl fmt::Debug for RMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Clears denominators row by row, giving an integer matrix with the same
/// row space.
fn integer_rows(m: &RMatrix) -> Vec<Vec<BigInt>> {
    (0..m.rows)
        .map(|i| {
            let row = m.row(i);
            let lcm = row
                .iter()
                .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter()
                .map(|x| x.numer() * (&lcm / x.denom()))
                .collect()
        })
        .collect()
}

/// Fraction-free forward elimination. Only the first `pivot_cols` columns are
/// searched for pivots; trailing columns (right-hand sides) are carried along.
/// Returns the pivot column of each eliminated row.
fn bareiss_forward(mat: &mut [Vec<BigInt>], pivot_cols: usize) -> Vec<usize> {
    let nrows = mat.len();
    let ncols = mat.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..pivot_cols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !mat[i][col].is_zero()) else {
            continue;
        };
        mat.swap(r, p);
        let (top, bottom) = mat.split_at_mut(r + 1);
        let pivot_row = &top[r];
        let pivot = pivot_row[col].clone();
        for row in bottom.iter_mut() {
            let factor = row[col].clone();
            for j in col + 1..ncols {
                let num = &pivot * &row[j] - &factor * &pivot_row[j];
                debug_assert!((&num % &prev).is_zero(), "Bareiss division not exact");
                row[j] = num / &prev;
            }
            row[col] = BigInt::zero();
        }
        prev = pivot;
        pivots.push(col);
        r += 1;
    }
    pivots
}

/// Exact rank over the rationals.
pub fn rank(m: &RMatrix) -> usize {
    if m.rows == 0 || m.cols == 0 {
        return 0;
    }
    let mut mat = integer_rows(m);
    bareiss_forward(&mut mat, m.cols).len()
}

/// Solves `M·X = B` for square `M`. `Ok(None)` means `M` is singular.
pub fn solve_many(m: &RMatrix, rhs: &RMatrix) -> Result<Option<RMatrix>, ExactError> {
    if !m.is_square() {
        return Err(ExactError::Dimension(format!(
            "expected a square system, got {}x{}",
            m.rows, m.cols
        )));
    }
    if rhs.rows != m.rows {
        return Err(ExactError::Dimension(format!(
            "right-hand side has {} rows, system has {}",
            rhs.rows, m.rows
        )));
    }
    let n = m.rows;
    let k = rhs.cols;
    let augmented = RMatrix::hstack(&[m, rhs]);
    let mut mat = integer_rows(&augmented);
    let pivots = bareiss_forward(&mut mat, n);
    if pivots.len() < n {
        return Ok(None);
    }
    let mut x = RMatrix::zeros(n, k);
    for c in 0..k {
        for i in (0..n).rev() {
            let mut acc = Rational::from_integer(mat[i][n + c].clone());
            for j in i + 1..n {
                acc -= Rational::from_integer(mat[i][j].clone()) * &x[(j, c)];
            }
            x.set(i, c, acc / Rational::from_integer(mat[i][i].clone()));
        }
    }
    Ok(Some(x))
}

/// Solves `M·x = rhs`. `Ok(None)` flags a rank-deficient `M`.
pub fn solve_linear(m: &RMatrix, rhs: &[Rational]) -> Result<Option<Vec<Rational>>, ExactError> {
    Ok(solve_many(m, &RMatrix::column(rhs))?.map(|x| x.col(0)))
}

pub fn inverse(m: &RMatrix) -> Result<Option<RMatrix>, ExactError> {
    solve_many(m, &RMatrix::identity(m.rows))
}

/// Unique `X` with `P·X − X·Q = C`, via the vectorized `(mn)×(mn)` system.
pub fn solve_sylvester(p: &RMatrix, q: &RMatrix, c: &RMatrix) -> Result<RMatrix, ExactError> {
    let m = p.rows;
    let n = q.rows;
    if !p.is_square() || !q.is_square() || c.rows != m || c.cols != n {
        return Err(ExactError::Dimension(format!(
            "Sylvester shapes P {}x{}, Q {}x{}, C {}x{}",
            p.rows, p.cols, q.rows, q.cols, c.rows, c.cols
        )));
    }
    if m == 0 || n == 0 {
        return Ok(RMatrix::zeros(m, n));
    }
    // unknown X[i][k] lives at index i*n + k
    let size = m * n;
    let mut system = RMatrix::zeros(size, size);
    for i in 0..m {
        for k in 0..n {
            let row = i * n + k;
            for j in 0..m {
                let v = &system[(row, j * n + k)] + &p[(i, j)];
                system.set(row, j * n + k, v);
            }
            for l in 0..n {
                let v = &system[(row, i * n + l)] - &q[(l, k)];
                system.set(row, i * n + l, v);
            }
        }
    }
    let x = solve_linear(&system, c.entries())?.ok_or(ExactError::SpectraOverlap)?;
    Ok(RMatrix {
        rows: m,
        cols: n,
        entries: x,
    })
}

/// Column `j` holds `v^(first_power + j)` entrywise.
pub fn vandermonde_powers(v: &[Rational], first_power: u32, last_power: u32) -> RMatrix {
    assert!(first_power <= last_power, "first_power must not exceed last_power");
    let cols = (last_power - first_power + 1) as usize;
    RMatrix::from_fn(v.len(), cols, |i, j| {
        num_traits::pow(v[i].clone(), first_power as usize + j)
    })
}
