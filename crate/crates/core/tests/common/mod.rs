//! Independent reference implementations used by the integration tests.
//! Nothing here calls into the library's numerics.
#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Dense matrix as a vector of rows.
pub type Rows = Vec<Vec<Complex64>>;

/// Every `k`-subset of `0..n` in lexicographic order, by recursion.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// GFDM modulation by direct summation over subcarriers and subsymbols.
pub fn gfdm_modulate_loop(pulse: &[f64], subcarriers: usize, data: &[Complex64]) -> Vec<Complex64> {
    let q = pulse.len();
    let subsymbols = q / subcarriers;
    (0..q)
        .map(|sample| {
            let mut acc = c(0.0, 0.0);
            for l in 0..subsymbols {
                let delayed = pulse[(sample + q - l * subcarriers) % q];
                for n in 0..subcarriers {
                    let phase = 2.0 * PI * (n as f64) * (sample as f64) / subcarriers as f64;
                    acc += data[l * subcarriers + n] * delayed * Complex64::from_polar(1.0, phase);
                }
            }
            acc
        })
        .collect()
}

/// Circular convolution `y[i] = sum_v h[v] x[i - v]` by explicit loop.
pub fn convolve_loop(h: &[Complex64], x: &[Complex64]) -> Vec<Complex64> {
    let q = x.len() as isize;
    (0..q)
        .map(|i| {
            h.iter()
                .enumerate()
                .map(|(v, hv)| hv * x[(i - v as isize).rem_euclid(q) as usize])
                .sum()
        })
        .collect()
}

pub fn matvec(a: &Rows, x: &[Complex64]) -> Vec<Complex64> {
    a.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
}

pub fn matmul(a: &Rows, b: &Rows) -> Rows {
    let cols = b[0].len();
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| row.iter().enumerate().map(|(k, v)| v * b[k][j]).sum())
                .collect()
        })
        .collect()
}

pub fn adjoint(a: &Rows) -> Rows {
    let (r, cl) = (a.len(), a[0].len());
    (0..cl).map(|j| (0..r).map(|i| a[i][j].conj()).collect()).collect()
}

/// Gauss-Jordan elimination with partial pivoting on `[a | b]`.
pub fn gauss_jordan_solve(a: &Rows, b: &Rows) -> Rows {
    let n = a.len();
    let m = b[0].len();
    let mut aug: Rows = a
        .iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().chain(rb).copied().collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| aug[i][col].norm().total_cmp(&aug[j][col].norm()))
            .unwrap();
        aug.swap(col, pivot);
        let p = aug[col][col];
        aug[col].iter_mut().for_each(|v| *v /= p);
        for row in 0..n {
            if row != col {
                let f = aug[row][col];
                if f != c(0.0, 0.0) {
                    let pivot_row = aug[col].clone();
                    aug[row].iter_mut().zip(&pivot_row).for_each(|(v, pv)| *v -= f * pv);
                }
            }
        }
    }
    aug.into_iter().map(|r| r[n..n + m].to_vec()).collect()
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Deterministic source of test inputs, independent of the library's
/// seeding scheme.
pub struct TestRng(ChaCha12Rng);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        TestRng(ChaCha12Rng::seed_from_u64(seed))
    }

    pub fn uniform(&mut self) -> f64 {
        self.0.random()
    }

    pub fn complex(&mut self) -> Complex64 {
        c(self.0.random_range(-1.0..1.0), self.0.random_range(-1.0..1.0))
    }

    pub fn vector(&mut self, n: usize) -> Vec<Complex64> {
        (0..n).map(|_| self.complex()).collect()
    }

    pub fn rows(&mut self, r: usize, cl: usize) -> Rows {
        (0..r).map(|_| self.vector(cl)).collect()
    }

    pub fn bits(&mut self, n: usize) -> Vec<bool> {
        (0..n).map(|_| self.0.random()).collect()
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.0.random_range(0..n)
    }
}
