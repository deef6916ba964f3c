//! Banded LU with partial pivoting (LAPACK `gbtf2` layout).

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("matrix is singular at column {0}")]
    Singular(usize),
    #[error("entry ({row}, {col}) lies outside the band")]
    OutsideBand { row: usize, col: usize },
}

/// Square band matrix with `kl` sub- and `ku` super-diagonals, stored with
/// `kl` extra rows so the factorization can hold pivoting fill-in.
#[derive(Debug, Clone, PartialEq)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    ab: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let ldab = 2 * kl + ku + 1;
        BandMatrix {
            n,
            kl,
            ku,
            ldab,
            ab: vec![0.0; ldab * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidths(&self) -> (usize, usize) {
        (self.kl, self.ku)
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        (self.kl + self.ku + i - j) + j * self.ldab
    }

    fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && i <= j + self.kl && j <= i + self.ku
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_band(i, j) {
            self.ab[self.slot(i, j)]
        } else {
            0.0
        }
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) -> Result<(), LinalgError> {
        if !self.in_band(i, j) {
            return Err(LinalgError::OutsideBand { row: i, col: j });
        }
        let s = self.slot(i, j);
        self.ab[s] += v;
        Ok(())
    }

    /// `y = A x` using the original (unfactored) band.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for (j, &xj) in x.iter().enumerate().take(self.n) {
            if xj == 0.0 {
                continue;
            }
            let lo = j.saturating_sub(self.ku);
            let hi = (j + self.kl).min(self.n - 1);
            for (i, yi) in y.iter_mut().enumerate().take(hi + 1).skip(lo) {
                *yi += self.ab[self.slot(i, j)] * xj;
            }
        }
        y
    }

    /// Factors in place; pivots are relative to `tiny * max|a_ij|`.
    pub fn factor(mut self) -> Result<BandLu, LinalgError> {
        let n = self.n;
        let (kl, kv) = (self.kl, self.kl + self.ku);
        let scale = self.ab.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let tiny = f64::EPSILON * 1e-3 * scale.max(f64::MIN_POSITIVE);
        let mut ipiv = vec![0usize; n];
        let mut ju = 0usize;
        for j in 0..n {
            let km = kl.min(n - 1 - j);
            let mut jp = 0;
            let mut best = 0.0f64;
            for t in 0..=km {
                let v = self.ab[self.slot(j + t, j)].abs();
                if v > best {
                    best = v;
                    jp = t;
                }
            }
            ipiv[j] = j + jp;
            if !(best > tiny) {
                return Err(LinalgError::Singular(j));
            }
            ju = ju.max((j + self.ku + jp).min(n - 1));
            if jp != 0 {
                for c in j..=ju {
                    let (s1, s2) = (self.slot(j, c), self.slot(j + jp, c));
                    self.ab.swap(s1, s2);
                }
            }
            let piv = self.ab[self.slot(j, j)];
            for t in 1..=km {
                let s = self.slot(j + t, j);
                self.ab[s] /= piv;
            }
            for c in j + 1..=ju {
                let f = self.ab[self.slot(j, c)];
                if f == 0.0 {
                    continue;
                }
                for t in 1..=km {
                    let l = self.ab[self.slot(j + t, j)];
                    let s = self.slot(j + t, c);
                    self.ab[s] -= l * f;
                }
            }
        }
        debug_assert!(kv < self.ldab);
        Ok(BandLu { m: self, ipiv })
    }
}

/// LU factors of a [`BandMatrix`].
#[derive(Debug, Clone)]
pub struct BandLu {
    m: BandMatrix,
    ipiv: Vec<usize>,
}

impl BandLu {
    pub fn solve(&self, b: &mut [f64]) {
        let m = &self.m;
        let n = m.n;
        let kv = m.kl + m.ku;
        for j in 0..n {
            let p = self.ipiv[j];
            if p != j {
                b.swap(j, p);
            }
            let km = m.kl.min(n - 1 - j);
            let bj = b[j];
            if bj != 0.0 {
                for t in 1..=km {
                    b[j + t] -= m.ab[m.slot(j + t, j)] * bj;
                }
            }
        }
        for j in (0..n).rev() {
            b[j] /= m.ab[m.slot(j, j)];
            let bj = b[j];
            if bj != 0.0 {
                for i in j.saturating_sub(kv)..j {
                    b[i] -= m.ab[m.slot(i, j)] * bj;
                }
            }
        }
    }
}

/// Solves `A x = b` with up to three rounds of iterative refinement until
/// `‖A x − b‖ ≤ rel_tol ‖b‖`. Returns the solution and the achieved
/// relative residual.
pub fn solve_refined(a: &BandMatrix, b: &[f64], rel_tol: f64) -> Result<(Vec<f64>, f64), LinalgError> {
    let lu = a.clone().factor()?;
    let mut x = b.to_vec();
    lu.solve(&mut x);
    let bn = norm2(b).max(f64::MIN_POSITIVE);
    let mut rel = f64::INFINITY;
    for _ in 0..4 {
        let ax = a.mul_vec(&x);
        let mut r: Vec<f64> = b.iter().zip(&ax).map(|(bi, axi)| bi - axi).collect();
        rel = norm2(&r) / bn;
        if rel <= rel_tol {
            break;
        }
        lu.solve(&mut r);
        for (xi, di) in x.iter_mut().zip(&r) {
            *xi += di;
        }
    }
    Ok((x, rel))
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
