use super::Interval;
use crate::error::{check_dim, Error, Result};

/// Largest dimension accepted by [`IntervalMatrix::det`].
pub const MAX_DET_DIM: usize = 6;

/// Dense row-major matrix of intervals.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Interval>,
}

impl IntervalMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Interval>) -> Result<Self> {
        check_dim(rows * cols, data.len(), "interval matrix entries")?;
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Interval::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Interval::ONE;
        }
        m
    }

    /// Lifts a point matrix (given as rows) to degenerate intervals.
    pub fn from_points(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            check_dim(cols, row.len(), "ragged point matrix")?;
            for &x in row {
                data.push(Interval::new(x, x)?);
            }
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Interval {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Interval) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Interval] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(Interval::is_finite)
    }

    pub fn matmul(&self, rhs: &IntervalMatrix) -> Result<IntervalMatrix> {
        check_dim(self.cols, rhs.rows, "interval matmul")?;
        let mut out = IntervalMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = Interval::ZERO;
                for k in 0..self.cols {
                    acc = acc + self.get(i, k) * rhs.get(k, j);
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    /// Point matrix (rows) times interval matrix.
    pub fn left_mul_points(weights: &[Vec<f64>], rhs: &IntervalMatrix) -> Result<IntervalMatrix> {
        let mut out = IntervalMatrix::zeros(weights.len(), rhs.cols);
        for (i, row) in weights.iter().enumerate() {
            check_dim(rhs.rows, row.len(), "point-interval matmul")?;
            for j in 0..rhs.cols {
                let mut acc = Interval::ZERO;
                for (k, &w) in row.iter().enumerate() {
                    acc = acc + rhs.get(k, j).scale(w);
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    /// `diag(d) * self`.
    pub fn scale_rows(&self, d: &[Interval]) -> Result<IntervalMatrix> {
        check_dim(self.rows, d.len(), "row scaling")?;
        let mut out = self.clone();
        for (r, s) in d.iter().enumerate() {
            for c in 0..self.cols {
                out.data[r * self.cols + c] = *s * self.get(r, c);
            }
        }
        Ok(out)
    }

    /// Whether a point matrix lies entrywise inside this one.
    pub fn contains_points(&self, m: &[Vec<f64>]) -> bool {
        m.len() == self.rows
            && m.iter().enumerate().all(|(r, row)| {
                row.len() == self.cols
                    && row.iter().enumerate().all(|(c, &v)| self.get(r, c).contains(v))
            })
    }

    /// Enclosure of `{det(A) : A ∈ self}` by cofactor expansion.
    pub fn det(&self) -> Result<Interval> {
        if self.rows != self.cols {
            return Err(Error::Unsupported(format!(
                "determinant of non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        if self.rows > MAX_DET_DIM {
            return Err(Error::Unsupported(format!(
                "determinant dimension {} exceeds {MAX_DET_DIM}",
                self.rows
            )));
        }
        let cols: Vec<usize> = (0..self.cols).collect();
        Ok(self.minor_det(0, &cols))
    }

    /// Determinant of the submatrix on rows `row..` and the given columns.
    fn minor_det(&self, row: usize, cols: &[usize]) -> Interval {
        match cols.len() {
            0 => Interval::ONE,
            1 => self.get(row, cols[0]),
            2 => {
                self.get(row, cols[0]) * self.get(row + 1, cols[1])
                    - self.get(row, cols[1]) * self.get(row + 1, cols[0])
            }
            n => {
                let mut acc = Interval::ZERO;
                let mut rest = Vec::with_capacity(n - 1);
                for (pos, &c) in cols.iter().enumerate() {
                    let entry = self.get(row, c);
                    if entry == Interval::ZERO {
                        continue;
                    }
                    rest.clear();
                    rest.extend(cols.iter().copied().filter(|&k| k != c));
                    let term = entry * self.minor_det(row + 1, &rest);
                    acc = if pos % 2 == 0 { acc + term } else { acc - term };
                }
                acc
            }
        }
    }
}
