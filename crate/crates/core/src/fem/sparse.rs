//! Compressed sparse row storage and a profile (skyline) Cholesky solver.

use alloc::vec;
use alloc::vec::Vec;

use super::FemError;

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Sums duplicate entries. The result does not depend on triplet order
    /// beyond floating-point summation order within each `(i, j)`.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by_key(|t| (t.0, t.1));
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::new();
        let mut values: Vec<f64> = Vec::new();
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in triplets {
            assert!(i < n && j < n, "triplet out of range");
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
            } else {
                cols.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self { n, row_ptr, cols, values }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.cols[r.clone()], &self.values[r])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(p) => vals[p],
            Err(_) => 0.0,
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.n) {
            let (cols, vals) = self.row(i);
            *yi = cols.iter().zip(vals).map(|(&j, v)| v * x[j]).sum();
        }
    }

    /// Largest `|a_ij - a_ji|` relative to the largest entry.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        let mut largest: f64 = 0.0;
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                largest = largest.max(v.abs());
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        if largest == 0.0 {
            0.0
        } else {
            worst / largest
        }
    }

    /// `a * self + b * other` on the union pattern.
    pub fn combine(&self, a: f64, other: &CsrMatrix, b: f64) -> CsrMatrix {
        assert_eq!(self.n, other.n);
        let mut t = Vec::with_capacity(self.nnz() + other.nnz());
        for i in 0..self.n {
            let (c, v) = self.row(i);
            t.extend(c.iter().zip(v).map(|(&j, &x)| (i, j, a * x)));
            let (c, v) = other.row(i);
            t.extend(c.iter().zip(v).map(|(&j, &x)| (i, j, b * x)));
        }
        CsrMatrix::from_triplets(self.n, t)
    }
}

/// Cholesky factor `L` of a symmetric positive definite matrix, stored row by
/// row from the first nonzero column to the diagonal.
#[derive(Debug, Clone)]
pub struct SkylineCholesky {
    first: Vec<usize>,
    start: Vec<usize>,
    data: Vec<f64>,
}

impl SkylineCholesky {
    /// Factors the submatrix of `a` on the rows and columns listed in `keep`
    /// (in that order).
    pub fn factor(a: &CsrMatrix, keep: &[usize]) -> Result<Self, FemError> {
        let n = keep.len();
        let mut local = vec![usize::MAX; a.dim()];
        for (p, &g) in keep.iter().enumerate() {
            local[g] = p;
        }
        let mut first = vec![0usize; n];
        for (p, &g) in keep.iter().enumerate() {
            let (cols, _) = a.row(g);
            first[p] = cols
                .iter()
                .map(|&j| local[j])
                .filter(|&q| q != usize::MAX && q <= p)
                .min()
                .unwrap_or(p);
        }
        let mut start = vec![0usize; n + 1];
        for p in 0..n {
            start[p + 1] = start[p] + (p - first[p] + 1);
        }
        let mut data = vec![0.0; start[n]];
        for (p, &g) in keep.iter().enumerate() {
            let (cols, vals) = a.row(g);
            for (&j, &v) in cols.iter().zip(vals) {
                let q = local[j];
                if q != usize::MAX && q <= p {
                    data[start[p] + q - first[p]] = v;
                }
            }
        }

        for i in 0..n {
            let fi = first[i];
            let row_i = start[i];
            for j in fi..i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let li = &data[row_i + k0 - fi..row_i + j - fi];
                let lj = &data[start[j] + k0 - fj..start[j] + j - fj];
                let dot: f64 = li.iter().zip(lj).map(|(a, b)| a * b).sum();
                let diag = data[start[j + 1] - 1];
                data[row_i + j - fi] = (data[row_i + j - fi] - dot) / diag;
            }
            let off = &data[row_i..row_i + i - fi];
            let sq: f64 = off.iter().map(|x| x * x).sum();
            let d = data[row_i + i - fi] - sq;
            if d.is_nan() || d <= 0.0 {
                return Err(FemError::NotPositiveDefinite { row: keep[i] });
            }
            data[row_i + i - fi] = libm::sqrt(d);
        }
        Ok(Self { first, start, data })
    }

    pub fn dim(&self) -> usize {
        self.first.len()
    }

    /// Stored entries of the factor.
    pub fn profile_size(&self) -> usize {
        self.data.len()
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.dim();
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.data[self.start[i]..self.start[i + 1]];
            let dot: f64 = row[..i - fi].iter().zip(&b[fi..i]).map(|(l, y)| l * y).sum();
            b[i] = (b[i] - dot) / row[i - fi];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let row = &self.data[self.start[i]..self.start[i + 1]];
            b[i] /= row[i - fi];
            let xi = b[i];
            for (bk, l) in b[fi..i].iter_mut().zip(&row[..i - fi]) {
                *bk -= l * xi;
            }
        }
    }
}
