//! Banded LU factorization with partial pivoting.
//!
//! The Newton systems are block two-component discretizations of elliptic
//! operators; with the unknowns interleaved per node they are banded with a
//! small bandwidth, and a direct banded factorization is both fast and
//! robust at desk scale.
//!
//! Storage follows the LAPACK band convention: column `j` lives in a strip
//! of height `2 kl + ku + 1`, with `kl` extra rows on top for the fill
//! produced by row pivoting.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum LinAlgError {
    #[error("zero pivot at column {column}: matrix is singular to working precision")]
    Singular { column: usize },
}

/// A square banded matrix with `kl` subdiagonals and `ku` superdiagonals.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn new(n: usize, kl: usize, ku: usize) -> Self {
        assert!(n > 0);
        let ldab = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            ldab,
            data: vec![0.0; ldab * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.n && j < self.n);
        debug_assert!(i + self.ku + self.kl >= j && j + self.kl >= i);
        j * self.ldab + (self.kl + self.ku + i - j)
    }

    /// Sets entry `(i, j)`; must lie within the declared band.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(
            i + self.ku >= j && j + self.kl >= i,
            "entry ({i},{j}) outside band kl={} ku={}",
            self.kl,
            self.ku
        );
        let at = self.idx(i, j);
        self.data[at] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(i + self.ku >= j && j + self.kl >= i);
        let at = self.idx(i, j);
        self.data[at] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i + self.ku >= j && j + self.kl >= i {
            self.data[self.idx(i, j)]
        } else {
            0.0
        }
    }

    /// Scales each row to unit max magnitude and returns the scale factors.
    ///
    /// Row equilibration keeps the factorization's backward error meaningful
    /// per equation when row magnitudes differ by many orders (stiff
    /// diffusion rows vs reaction rows). The right-hand side must be divided
    /// by the same factors.
    pub fn equilibrate_rows(&mut self) -> Vec<f64> {
        let mut scales = vec![1.0; self.n];
        for i in 0..self.n {
            let lo = i.saturating_sub(self.kl);
            let hi = (i + self.ku).min(self.n - 1);
            let mut peak = 0.0f64;
            for j in lo..=hi {
                peak = peak.max(self.data[self.idx(i, j)].abs());
            }
            if peak > 0.0 && peak.is_finite() {
                scales[i] = peak;
                for j in lo..=hi {
                    let at = self.idx(i, j);
                    self.data[at] /= peak;
                }
            }
        }
        scales
    }

    /// Dense matrix-vector product over the stored band (assembly form
    /// only; do not call after factoring).
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![0.0; self.n];
        for j in 0..self.n {
            let lo = j.saturating_sub(self.ku);
            let hi = (j + self.kl).min(self.n - 1);
            for i in lo..=hi {
                y[i] += self.data[self.idx(i, j)] * x[j];
            }
        }
        y
    }

    /// LU-factors in place with partial pivoting.
    pub fn factor(mut self) -> Result<BandLu, LinAlgError> {
        let (n, kl, ldab) = (self.n, self.kl, self.ldab);
        let kuw = self.kl + self.ku; // working upper bandwidth
        let mut ipiv = vec![0usize; n];

        for j in 0..n {
            let km = kl.min(n - 1 - j);
            // pivot search in column j
            let mut jp = 0usize;
            let mut best = 0.0f64;
            for t in 0..=km {
                let v = self.data[j * ldab + (kuw + j + t - j)].abs();
                if v > best {
                    best = v;
                    jp = t;
                }
            }
            ipiv[j] = j + jp;
            let col_base = j * ldab + kuw;
            let piv = self.data[col_base + jp];
            if piv == 0.0 || !piv.is_finite() {
                return Err(LinAlgError::Singular { column: j });
            }
            if jp != 0 {
                // swap rows j and j+jp across columns j..=min(n-1, j+kuw)
                let cend = (j + kuw).min(n - 1);
                for c in j..=cend {
                    let a = c * ldab + (kuw + j - c);
                    let b = c * ldab + (kuw + j + jp - c);
                    self.data.swap(a, b);
                }
            }
            // multipliers
            let inv = 1.0 / self.data[col_base];
            for t in 1..=km {
                self.data[col_base + t] *= inv;
            }
            // trailing update
            let cend = (j + kuw).min(n - 1);
            for c in (j + 1)..=cend {
                let alpha = self.data[c * ldab + (kuw + j - c)];
                if alpha != 0.0 {
                    let dst_base = c * ldab + (kuw + j - c);
                    for t in 1..=km {
                        let m = self.data[col_base + t];
                        self.data[dst_base + t] -= m * alpha;
                    }
                }
            }
        }

        Ok(BandLu {
            n,
            kl,
            kuw,
            ldab,
            data: self.data,
            ipiv,
        })
    }
}

/// The factored form; solves by forward/back substitution.
#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    kl: usize,
    kuw: usize,
    ldab: usize,
    data: Vec<f64>,
    ipiv: Vec<usize>,
}

impl BandLu {
    pub fn solve_in_place(&self, b: &mut [f64]) {
        assert_eq!(b.len(), self.n);
        let (n, ldab, kuw) = (self.n, self.ldab, self.kuw);
        // L y = P b
        for j in 0..n {
            if self.ipiv[j] != j {
                b.swap(j, self.ipiv[j]);
            }
            let km = self.kl.min(n - 1 - j);
            let bj = b[j];
            if bj != 0.0 {
                let base = j * ldab + kuw;
                for t in 1..=km {
                    b[j + t] -= self.data[base + t] * bj;
                }
            }
        }
        // U x = y
        for j in (0..n).rev() {
            b[j] /= self.data[j * ldab + kuw];
            let bj = b[j];
            if bj != 0.0 {
                let lo = j.saturating_sub(kuw);
                for i in lo..j {
                    b[i] -= self.data[j * ldab + (kuw + i - j)] * bj;
                }
            }
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    /// Dense Gaussian elimination with partial pivoting, as the oracle.
    fn dense_solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
        let n = b.len();
        let mut m: Vec<Vec<f64>> = a.iter().cloned().collect();
        let mut x = b.to_vec();
        for k in 0..n {
            let piv = (k..n).max_by(|&i, &j| m[i][k].abs().total_cmp(&m[j][k].abs())).unwrap();
            m.swap(k, piv);
            x.swap(k, piv);
            assert!(m[k][k].abs() > 1e-300, "oracle hit singular matrix");
            for i in k + 1..n {
                let f = m[i][k] / m[k][k];
                for j in k..n {
                    m[i][j] -= f * m[k][j];
                }
                x[i] -= f * x[k];
            }
        }
        for k in (0..n).rev() {
            for j in k + 1..n {
                let xj = x[j];
                x[k] -= m[k][j] * xj;
            }
            x[k] /= m[k][k];
        }
        x
    }

    #[test]
    fn pivoting_handles_zero_diagonal() {
        // [[0, 1], [1, 0]] x = [2, 3]
        let mut m = BandMatrix::new(2, 1, 1);
        m.set(0, 1, 1.0);
        m.set(1, 0, 1.0);
        let lu = m.factor().unwrap();
        let x = lu.solve(&[2.0, 3.0]);
        assert!((x[0] - 3.0).abs() < 1e-14 && (x[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn detects_singular() {
        let mut m = BandMatrix::new(3, 1, 1);
        // row of zeros in the middle
        m.set(0, 0, 1.0);
        m.set(2, 2, 1.0);
        assert!(matches!(m.factor(), Err(LinAlgError::Singular { .. })));
    }

    #[test]
    fn tridiagonal_poisson() {
        // -u'' = 1 on (0,1), u(0)=u(1)=0, n interior nodes.
        let n = 64;
        let h = 1.0 / (n as f64 + 1.0);
        let mut m = BandMatrix::new(n, 1, 1);
        for i in 0..n {
            m.set(i, i, 2.0 / (h * h));
            if i > 0 {
                m.set(i, i - 1, -1.0 / (h * h));
            }
            if i + 1 < n {
                m.set(i, i + 1, -1.0 / (h * h));
            }
        }
        let lu = m.factor().unwrap();
        let x = lu.solve(&vec![1.0; n]);
        // exact solution x(t) = t(1-t)/2
        for i in 0..n {
            let t = (i as f64 + 1.0) * h;
            assert!((x[i] - 0.5 * t * (1.0 - t)).abs() < 1e-10);
        }
    }

    #[test]
    fn random_band_matches_dense_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for &(n, kl, ku) in &[(5usize, 1usize, 1usize), (12, 2, 2), (30, 3, 1), (25, 1, 4), (40, 5, 5)] {
            for _ in 0..8 {
                let mut band = BandMatrix::new(n, kl, ku);
                let mut dense = vec![vec![0.0; n]; n];
                for i in 0..n {
                    for j in 0..n {
                        if i + ku >= j && j + kl >= i {
                            // occasional zeros to exercise pivoting
                            let v: f64 = if rng.gen::<f64>() < 0.15 {
                                0.0
                            } else {
                                rng.gen_range(-1.0..1.0)
                            };
                            band.set(i, j, v);
                            dense[i][j] = v;
                        }
                    }
                }
                // keep it invertible: bump the diagonal scale
                for i in 0..n {
                    dense[i][i] += 3.0;
                    band.add(i, i, 3.0);
                }
                let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();

                let y = band.matvec(&b);
                let mut dense_y = vec![0.0; n];
                for i in 0..n {
                    for j in 0..n {
                        dense_y[i] += dense[i][j] * b[j];
                    }
                }
                for i in 0..n {
                    assert!((y[i] - dense_y[i]).abs() < 1e-12);
                }

                let x = band.factor().unwrap().solve(&b);
                let x_ref = dense_solve(&dense, &b);
                for i in 0..n {
                    assert!(
                        (x[i] - x_ref[i]).abs() < 1e-9 * (1.0 + x_ref[i].abs()),
                        "n={n} kl={kl} ku={ku}: x[{i}]={} ref={}",
                        x[i],
                        x_ref[i]
                    );
                }
            }
        }
    }
}
