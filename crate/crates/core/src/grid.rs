//! Periodic grid fields on `[-L/2, L/2)^d` and the FFT plumbing behind every
//! Fourier multiplier in the crate.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{FujitaError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridField {
    pub d: usize,
    pub l: f64,
    pub n: usize,
    /// Row-major samples, last axis fastest.
    pub values: Vec<f64>,
}

pub(crate) fn check_grid(d: usize, l: f64, n: usize) -> Result<()> {
    if !(1..=3).contains(&d) {
        return Err(FujitaError::validation(format!("grid dimension must be 1..=3, got {d}")));
    }
    if !(l > 0.0 && l.is_finite()) {
        return Err(FujitaError::validation(format!("box side must be positive, got {l}")));
    }
    if n < 2 || !n.is_power_of_two() {
        return Err(FujitaError::validation(format!("points per axis must be a power of two, got {n}")));
    }
    Ok(())
}

impl GridField {
    pub fn zeros(d: usize, l: f64, n: usize) -> Result<Self> {
        check_grid(d, l, n)?;
        Ok(Self {
            d,
            l,
            n,
            values: vec![0.0; n.pow(d as u32)],
        })
    }

    pub fn from_values(d: usize, l: f64, n: usize, values: Vec<f64>) -> Result<Self> {
        check_grid(d, l, n)?;
        if values.len() != n.pow(d as u32) {
            return Err(FujitaError::validation(format!(
                "expected {} values, got {}",
                n.pow(d as u32),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(FujitaError::validation("grid values must be finite"));
        }
        Ok(Self { d, l, n, values })
    }

    /// Samples `f` at every node.
    pub fn from_fn<F: Fn(&[f64]) -> f64>(d: usize, l: f64, n: usize, f: F) -> Result<Self> {
        let mut field = Self::zeros(d, l, n)?;
        let mut x = vec![0.0; d];
        for idx in 0..field.values.len() {
            field.coords_into(idx, &mut x);
            field.values[idx] = f(&x);
        }
        if field.values.iter().any(|v| !v.is_finite()) {
            return Err(FujitaError::validation("sampled function is not finite on the grid"));
        }
        Ok(field)
    }

    pub fn spacing(&self) -> f64 {
        self.l / self.n as f64
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Coordinate of node `j` along one axis.
    pub fn node(&self, j: usize) -> f64 {
        -0.5 * self.l + j as f64 * self.spacing()
    }

    pub fn coords_into(&self, mut idx: usize, x: &mut [f64]) {
        for axis in (0..self.d).rev() {
            x[axis] = self.node(idx % self.n);
            idx /= self.n;
        }
    }

    pub fn coords(&self, idx: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.d];
        self.coords_into(idx, &mut x);
        x
    }

    /// Flat index of the node nearest to the origin-shifted multi-index.
    pub fn index(&self, multi: &[usize]) -> usize {
        multi.iter().fold(0, |acc, &j| acc * self.n + j)
    }

    /// Index of the node at the box centre (the origin).
    pub fn center_index(&self) -> usize {
        self.index(&vec![self.n / 2; self.d])
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Grid inner product `Σ f g h^d`.
    pub fn inner(&self, other: &GridField) -> f64 {
        let cell = self.spacing().powi(self.d as i32);
        self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum::<f64>() * cell
    }

    pub fn scaled(&self, factor: f64) -> GridField {
        GridField {
            values: self.values.iter().map(|v| v * factor).collect(),
            ..self.clone()
        }
    }

    /// Multilinear periodic interpolation at an arbitrary point.
    pub fn interpolate(&self, x: &[f64]) -> f64 {
        let h = self.spacing();
        let n = self.n as isize;
        let mut base = [0isize; 3];
        let mut frac = [0.0f64; 3];
        for axis in 0..self.d {
            let s = (x[axis] + 0.5 * self.l) / h;
            let fl = s.floor();
            frac[axis] = s - fl;
            base[axis] = (fl as isize).rem_euclid(n);
        }
        let corners = 1usize << self.d;
        let mut acc = 0.0;
        for corner in 0..corners {
            let mut weight = 1.0;
            let mut idx = 0usize;
            for axis in 0..self.d {
                let bit = (corner >> axis) & 1;
                let j = if bit == 1 { (base[axis] + 1) % n } else { base[axis] };
                weight *= if bit == 1 { frac[axis] } else { 1.0 - frac[axis] };
                idx = idx * self.n + j as usize;
            }
            if weight != 0.0 {
                acc += weight * self.values[idx];
            }
        }
        acc
    }
}

/// Reusable FFT plans and buffers for a fixed `(d, n)` grid.
pub struct SpectralWorkspace {
    d: usize,
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    buffer: Vec<Complex64>,
    line: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl SpectralWorkspace {
    pub fn new(d: usize, n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Self {
            d,
            n,
            forward,
            inverse,
            buffer: vec![Complex64::new(0.0, 0.0); n.pow(d as u32)],
            line: vec![Complex64::new(0.0, 0.0); n],
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        }
    }

    fn transform(&mut self, inverse: bool) {
        let fft = if inverse { &self.inverse } else { &self.forward };
        let n = self.n;
        let total = self.buffer.len();
        for axis in 0..self.d {
            let stride = n.pow((self.d - 1 - axis) as u32);
            if stride == 1 {
                for chunk in self.buffer.chunks_exact_mut(n) {
                    fft.process_with_scratch(chunk, &mut self.scratch);
                }
                continue;
            }
            let block = stride * n;
            for start in (0..total).step_by(block) {
                for offset in 0..stride {
                    let base = start + offset;
                    for j in 0..n {
                        self.line[j] = self.buffer[base + j * stride];
                    }
                    fft.process_with_scratch(&mut self.line, &mut self.scratch);
                    for j in 0..n {
                        self.buffer[base + j * stride] = self.line[j];
                    }
                }
            }
        }
    }

    /// Replaces `values` by the inverse transform of `multiplier ⊙ FFT(values)`.
    pub fn apply_multiplier(&mut self, values: &mut [f64], multiplier: &[f64]) {
        debug_assert_eq!(values.len(), self.buffer.len());
        for (b, v) in self.buffer.iter_mut().zip(values.iter()) {
            *b = Complex64::new(*v, 0.0);
        }
        self.transform(false);
        for (b, m) in self.buffer.iter_mut().zip(multiplier) {
            *b *= *m;
        }
        self.transform(true);
        let norm = 1.0 / self.buffer.len() as f64;
        for (v, b) in values.iter_mut().zip(&self.buffer) {
            *v = b.re * norm;
        }
    }
}

/// `‖k‖` for every FFT bin, in FFT (not centred) ordering.
pub fn wavenumber_norms(d: usize, n: usize) -> Vec<f64> {
    let signed = |j: usize| -> f64 {
        if j < n / 2 {
            j as f64
        } else {
            j as f64 - n as f64
        }
    };
    let total = n.pow(d as u32);
    let mut out = Vec::with_capacity(total);
    for idx in 0..total {
        let mut rest = idx;
        let mut sq = 0.0;
        for _ in 0..d {
            let k = signed(rest % n);
            sq += k * k;
            rest /= n;
        }
        out.push(sq.sqrt());
    }
    out
}

/// Fourier multiplier `m(2π‖k‖/L)` evaluated on every bin of a grid.
pub fn multiplier<F: Fn(f64) -> f64>(d: usize, l: f64, n: usize, symbol: F) -> Vec<f64> {
    let scale = 2.0 * std::f64::consts::PI / l;
    wavenumber_norms(d, n).into_iter().map(|k| symbol(scale * k)).collect()
}
