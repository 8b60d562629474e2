//! Dense linear algebra and linear-ODE kernel.
//!
//! Everything here works on small row-major matrices (the systems that show
//! up in a two-firm game have a few dozen rows at most). The three entry
//! points used by the rest of the crate are [`mat_exp`], [`phi1_apply`] and
//! [`solve_least_squares`].

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A dense vector of reals.
pub type Vector = Vec<f64>;

/// Dense real matrix stored row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diag(d: &[f64]) -> Self {
        let mut m = Matrix::zeros(d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = x;
        }
        m
    }

    /// Builds a matrix from row-major data, checking the length.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Builds a matrix from a list of equally long rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::Dimension(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn column(v: &[f64]) -> Self {
        Matrix {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vector {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)];
            }
        }
        t
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    /// `self * other`, checking conformability.
    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[f64]) -> Result<Vector> {
        if self.cols != v.len() {
            return Err(Error::Dimension(format!(
                "cannot apply {}x{} matrix to vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.cols)
            .map(|c| (0..self.rows).map(|r| self[(r, c)].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Copies `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Matrix) {
        for r in 0..block.rows {
            for c in 0..block.cols {
                self[(r0 + r, c0 + c)] = block[(r, c)];
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Matrix {
        let mut out = Matrix::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                out[(r, c)] = self[(r0 + r, c0 + c)];
            }
        }
        out
    }

    /// Applies `perm` to rows and columns: `out[i][j] = self[perm[i]][perm[j]]`.
    pub fn permute_symmetric(&self, perm: &[usize]) -> Matrix {
        let n = perm.len();
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = self[(perm[i], perm[j])];
            }
        }
        out
    }

    fn add_scaled(&mut self, s: f64, other: &Matrix) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

// The operator impls panic on shape mismatch; fallible callers use `matmul`.
impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.matmul(rhs).expect("matrix product shape mismatch")
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        out.add_scaled(1.0, rhs);
        out
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        out.add_scaled(-1.0, rhs);
        out
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        self.scale(-1.0)
    }
}

// ---------------------------------------------------------------------------
// Matrix exponential
// ---------------------------------------------------------------------------

const PADE3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const PADE9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

// 1-norm thresholds below which the Padé approximant of the given degree is
// accurate to unit roundoff in double precision.
const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.53939833006323e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA13: f64 = 5.371920351148152;

/// Returns `e^{M t}`.
///
/// Scaling and squaring with a diagonal Padé approximant of degree 3, 5, 7,
/// 9 or 13, chosen from the 1-norm of `M t`.
pub fn mat_exp(m: &Matrix, t: f64) -> Result<Matrix> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "matrix exponential needs a square matrix, got {}x{}",
            m.rows, m.cols
        )));
    }
    if !t.is_finite() {
        return Err(Error::Argument(format!("time must be finite, got {t}")));
    }
    let a = m.scale(t);
    let n = a.rows;
    if n == 0 {
        return Ok(Matrix::zeros(0, 0));
    }
    let norm = a.norm1();
    if norm == 0.0 {
        return Ok(Matrix::identity(n));
    }

    for &(deg, theta) in &THETA {
        if norm <= theta {
            let coeffs: &[f64] = match deg {
                3 => &PADE3,
                5 => &PADE5,
                7 => &PADE7,
                _ => &PADE9,
            };
            return pade_low(&a, coeffs);
        }
    }

    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let scaled = a.scale(0.5f64.powi(s));
    let mut r = pade13(&scaled)?;
    for _ in 0..s {
        r = &r * &r;
    }
    Ok(r)
}

fn pade_low(a: &Matrix, b: &[f64]) -> Result<Matrix> {
    let n = a.rows;
    let ident = Matrix::identity(n);
    let a2 = a * a;
    // Even powers I, A^2, A^4, ...
    let mut powers = vec![ident.clone(), a2.clone()];
    let half = b.len() / 2;
    while powers.len() < half {
        let next = &powers[powers.len() - 1] * &a2;
        powers.push(next);
    }
    let mut u_inner = Matrix::zeros(n, n);
    let mut v = Matrix::zeros(n, n);
    for k in 0..half {
        u_inner.add_scaled(b[2 * k + 1], &powers[k]);
        v.add_scaled(b[2 * k], &powers[k]);
    }
    let u = a * &u_inner;
    pade_solve(&u, &v)
}

fn pade13(a: &Matrix) -> Result<Matrix> {
    let b = &PADE13;
    let n = a.rows;
    let ident = Matrix::identity(n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let mut w1 = a6.scale(b[13]);
    w1.add_scaled(b[11], &a4);
    w1.add_scaled(b[9], &a2);
    let mut w2 = a6.scale(b[7]);
    w2.add_scaled(b[5], &a4);
    w2.add_scaled(b[3], &a2);
    w2.add_scaled(b[1], &ident);
    let mut u_inner = &a6 * &w1;
    u_inner.add_scaled(1.0, &w2);
    let u = a * &u_inner;

    let mut z1 = a6.scale(b[12]);
    z1.add_scaled(b[10], &a4);
    z1.add_scaled(b[8], &a2);
    let mut v = &a6 * &z1;
    v.add_scaled(b[6], &a6);
    v.add_scaled(b[4], &a4);
    v.add_scaled(b[2], &a2);
    v.add_scaled(b[0], &ident);
    pade_solve(&u, &v)
}

// Solves (V - U) X = (V + U).
fn pade_solve(u: &Matrix, v: &Matrix) -> Result<Matrix> {
    let p = v + u;
    let q = v - u;
    Lu::factor(&q)?.solve_mat(&p)
}

/// Returns `(e^{Mt} - I) M^{-1} v`, i.e. `∫_0^t e^{Mu} du · v`.
///
/// Computed by exponentiating the augmented matrix `[[M t, v t], [0, 0]]`
/// and reading the top-right column, so `M` may be singular.
pub fn phi1_apply(m: &Matrix, t: f64, v: &[f64]) -> Result<Vector> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "phi1 needs a square matrix, got {}x{}",
            m.rows, m.cols
        )));
    }
    let n = m.rows;
    if v.len() != n {
        return Err(Error::Dimension(format!(
            "vector of length {} does not match {n}x{n} matrix",
            v.len()
        )));
    }
    let mut aug = Matrix::zeros(n + 1, n + 1);
    aug.set_block(0, 0, m);
    for (i, &x) in v.iter().enumerate() {
        aug[(i, n)] = x;
    }
    let e = mat_exp(&aug, t)?;
    Ok((0..n).map(|i| e[(i, n)]).collect())
}

// ---------------------------------------------------------------------------
// LU with partial pivoting
// ---------------------------------------------------------------------------

/// LU factorization with partial pivoting of a square matrix.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: Matrix,
    perm: Vec<usize>,
    min_pivot: f64,
    max_pivot: f64,
}

impl Lu {
    pub fn factor(a: &Matrix) -> Result<Lu> {
        if !a.is_square() {
            return Err(Error::Dimension(format!(
                "LU needs a square matrix, got {}x{}",
                a.rows, a.cols
            )));
        }
        let n = a.rows;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut min_pivot = f64::INFINITY;
        let mut max_pivot = 0.0f64;
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|r| (r, lu[(r, k)].abs()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if p != k {
                for c in 0..n {
                    lu.data.swap(k * n + c, p * n + c);
                }
                perm.swap(k, p);
            }
            min_pivot = min_pivot.min(pmax);
            max_pivot = max_pivot.max(pmax);
            let piv = lu[(k, k)];
            if piv == 0.0 {
                continue;
            }
            for r in k + 1..n {
                let f = lu[(r, k)] / piv;
                lu[(r, k)] = f;
                if f != 0.0 {
                    for c in k + 1..n {
                        let x = lu[(k, c)];
                        lu[(r, c)] -= f * x;
                    }
                }
            }
        }
        if n == 0 {
            min_pivot = 0.0;
        }
        if a.data.iter().any(|x| !x.is_finite()) {
            min_pivot = f64::NAN;
            max_pivot = f64::NAN;
        }
        Ok(Lu {
            lu,
            perm,
            min_pivot,
            max_pivot,
        })
    }

    pub fn min_pivot(&self) -> f64 {
        self.min_pivot
    }

    pub fn max_pivot(&self) -> f64 {
        self.max_pivot
    }

    /// True when the smallest pivot is negligible relative to the largest,
    /// or the input was not finite.
    pub fn is_singular(&self) -> bool {
        let n = self.lu.rows as f64;
        self.min_pivot.is_nan()
            || self.min_pivot <= n * f64::EPSILON * self.max_pivot
            || self.min_pivot == 0.0
    }

    pub fn solve_mat(&self, b: &Matrix) -> Result<Matrix> {
        let n = self.lu.rows;
        if b.rows != n {
            return Err(Error::Dimension(format!(
                "right-hand side has {} rows, expected {n}",
                b.rows
            )));
        }
        if self.min_pivot == 0.0 && n > 0 {
            return Err(Error::Singular("zero pivot in LU".into()));
        }
        let m = b.cols;
        let mut x = Matrix::zeros(n, m);
        for (i, &p) in self.perm.iter().enumerate() {
            for c in 0..m {
                x[(i, c)] = b[(p, c)];
            }
        }
        for c in 0..m {
            for i in 0..n {
                let mut s = x[(i, c)];
                for k in 0..i {
                    s -= self.lu[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[(i, c)];
                for k in i + 1..n {
                    s -= self.lu[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s / self.lu[(i, i)];
            }
        }
        Ok(x)
    }

    pub fn solve_vec(&self, b: &[f64]) -> Result<Vector> {
        Ok(self.solve_mat(&Matrix::column(b))?.data)
    }
}

// ---------------------------------------------------------------------------
// Householder QR and least squares
// ---------------------------------------------------------------------------

struct Householder {
    r: Matrix,
    vs: Vec<Vec<f64>>,
    betas: Vec<f64>,
    perm: Vec<usize>,
}

impl Householder {
    fn factor(a: &Matrix, pivot: bool) -> Householder {
        let (m, n) = (a.rows, a.cols);
        let mut r = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let steps = m.min(n);
        let mut vs = Vec::with_capacity(steps);
        let mut betas = Vec::with_capacity(steps);
        for k in 0..steps {
            if pivot {
                let norms: Vec<f64> = (k..n)
                    .map(|c| (k..m).map(|i| r[(i, c)] * r[(i, c)]).sum::<f64>())
                    .collect();
                let (off, _) =
                    norms.iter().enumerate().fold(
                        (0, -1.0),
                        |acc, (i, &x)| if x > acc.1 { (i, x) } else { acc },
                    );
                let p = k + off;
                if p != k {
                    for i in 0..m {
                        r.data.swap(i * n + k, i * n + p);
                    }
                    perm.swap(k, p);
                }
            }
            let mut v: Vec<f64> = (k..m).map(|i| r[(i, k)]).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                vs.push(v);
                betas.push(0.0);
                continue;
            }
            let alpha = if v[0] >= 0.0 { -norm } else { norm };
            v[0] -= alpha;
            let vtv: f64 = v.iter().map(|x| x * x).sum();
            let beta = if vtv == 0.0 { 0.0 } else { 2.0 / vtv };
            for c in k..n {
                let dot: f64 = (k..m).map(|i| v[i - k] * r[(i, c)]).sum();
                let f = beta * dot;
                for i in k..m {
                    r[(i, c)] -= f * v[i - k];
                }
            }
            for i in k + 1..m {
                r[(i, k)] = 0.0;
            }
            vs.push(v);
            betas.push(beta);
        }
        Householder { r, vs, betas, perm }
    }

    fn apply_qt(&self, y: &mut Matrix) {
        for (k, (v, &beta)) in self.vs.iter().zip(&self.betas).enumerate() {
            if beta == 0.0 {
                continue;
            }
            for c in 0..y.cols {
                let dot: f64 = v.iter().enumerate().map(|(i, vi)| vi * y[(k + i, c)]).sum();
                let f = beta * dot;
                for (i, vi) in v.iter().enumerate() {
                    y[(k + i, c)] -= f * vi;
                }
            }
        }
    }

    fn apply_q(&self, y: &mut Matrix) {
        for (k, (v, &beta)) in self.vs.iter().zip(&self.betas).enumerate().rev() {
            if beta == 0.0 {
                continue;
            }
            for c in 0..y.cols {
                let dot: f64 = v.iter().enumerate().map(|(i, vi)| vi * y[(k + i, c)]).sum();
                let f = beta * dot;
                for (i, vi) in v.iter().enumerate() {
                    y[(k + i, c)] -= f * vi;
                }
            }
        }
    }
}

/// Result of [`solve_least_squares`].
#[derive(Debug, Clone)]
pub struct LeastSquares {
    pub solution: Matrix,
    pub rank: usize,
    pub rank_deficient: bool,
}

/// Minimum-norm solution of `min ‖A X − Y‖_F`.
///
/// Householder QR with column pivoting. Columns whose pivot falls below
/// `max(rows, cols) · ε · (largest column norm)` are treated as dependent;
/// the remaining trapezoidal system is solved for its minimum-norm solution
/// through a second QR of its transpose.
pub fn solve_least_squares(a: &Matrix, y: &Matrix) -> Result<LeastSquares> {
    let (m, n) = (a.rows, a.cols);
    if m < n {
        return Err(Error::Dimension(format!(
            "least squares needs rows >= cols, got {m}x{n}"
        )));
    }
    if y.rows != m {
        return Err(Error::Dimension(format!(
            "right-hand side has {} rows, expected {m}",
            y.rows
        )));
    }
    let max_col_norm = (0..n)
        .map(|c| (0..m).map(|r| a[(r, c)] * a[(r, c)]).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let tol = m.max(n) as f64 * f64::EPSILON * max_col_norm;

    let qr = Householder::factor(a, true);
    let rank = (0..n).take_while(|&k| qr.r[(k, k)].abs() > tol).count();

    let mut qty = y.clone();
    qr.apply_qt(&mut qty);
    let p = y.cols;

    let mut z = Matrix::zeros(n, p);
    if rank == n {
        for c in 0..p {
            for i in (0..n).rev() {
                let mut s = qty[(i, c)];
                for k in i + 1..n {
                    s -= qr.r[(i, k)] * z[(k, c)];
                }
                z[(i, c)] = s / qr.r[(i, i)];
            }
        }
    } else if rank > 0 {
        // W = R[0..rank, 0..n]; W^T = Q2 [R2; 0]  =>  z = Q2 [R2^{-T} rhs; 0].
        let wt = qr.r.block(0, 0, rank, n).transpose();
        let qr2 = Householder::factor(&wt, false);
        let mut w = Matrix::zeros(n, p);
        for c in 0..p {
            for i in 0..rank {
                let mut s = qty[(i, c)];
                for k in 0..i {
                    s -= qr2.r[(k, i)] * w[(k, c)];
                }
                w[(i, c)] = s / qr2.r[(i, i)];
            }
        }
        qr2.apply_q(&mut w);
        z = w;
    }

    let mut x = Matrix::zeros(n, p);
    for (j, &pj) in qr.perm.iter().enumerate() {
        for c in 0..p {
            x[(pj, c)] = z[(j, c)];
        }
    }
    Ok(LeastSquares {
        solution: x,
        rank,
        rank_deficient: rank < n,
    })
}
