//! Uniform 1-D lattice, complex fields on it, and the unitary transform
//! between position and momentum representations.
//!
//! Units are dimensionless with ħ = 1. For `n` points on `[x_min, x_max)`:
//!
//! ```text
//! dx  = (x_max - x_min) / n          x_j = x_min + j dx
//! dp  = 2π / (n dx)                  p_k = (k - n/2) dp
//! ψ̃(p_k) = dx/√(2π) Σ_j ψ(x_j) exp(-i p_k x_j)
//! ψ(x_j) = dp/√(2π) Σ_k ψ̃(p_k) exp(+i p_k x_j)
//! ```
//!
//! With these weights both representations share one norm formula,
//! `Σ |a|² · step`, and the transform pair is exactly unitary.

use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_POINTS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    n: usize,
    x_min: f64,
    x_max: f64,
}

impl GridSpec {
    pub fn new(n: usize, x_min: f64, x_max: f64) -> Result<Self> {
        if n < MIN_POINTS {
            return Err(Error::InvalidGrid(format!("n = {n} is below the minimum of {MIN_POINTS}")));
        }
        if !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!("n = {n} must be even")));
        }
        if !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::InvalidGrid("bounds must be finite".into()));
        }
        if x_max <= x_min {
            return Err(Error::InvalidGrid(format!("x_max = {x_max} must exceed x_min = {x_min}")));
        }
        Ok(Self { n, x_min, x_max })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn dx(&self) -> f64 {
        self.length() / self.n as f64
    }

    pub fn dp(&self) -> f64 {
        TAU / self.length()
    }

    #[inline]
    pub fn x(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx()
    }

    #[inline]
    pub fn p(&self, k: usize) -> f64 {
        (k as f64 - (self.n / 2) as f64) * self.dp()
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    pub fn momenta(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.p(k)).collect()
    }

    /// Index of the node closest to momentum `p`, clamped to the grid.
    pub fn nearest_momentum_index(&self, p: f64) -> usize {
        let k = (p / self.dp() + (self.n / 2) as f64).round();
        k.clamp(0.0, (self.n - 1) as f64) as usize
    }

    /// Index of the node closest to position `x`, clamped to the grid.
    pub fn nearest_position_index(&self, x: f64) -> usize {
        let j = ((x - self.x_min) / self.dx()).round();
        j.clamp(0.0, (self.n - 1) as f64) as usize
    }

    pub fn step(&self, rep: Representation) -> f64 {
        match rep {
            Representation::Position => self.dx(),
            Representation::Momentum => self.dp(),
        }
    }

    /// `exp(-i p_k x_min)`, with the argument reduced modulo 2π before the
    /// trig call so large `|p_k x_min|` does not lose digits.
    fn offset_phase(&self, k: usize) -> Complex64 {
        let turns = (k as f64 - (self.n / 2) as f64) * self.x_min / self.length();
        let frac = turns - turns.round();
        Complex64::from_polar(1.0, -TAU * frac)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Position,
    Momentum,
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Representation::Position => f.write_str("position"),
            Representation::Momentum => f.write_str("momentum"),
        }
    }
}

/// Complex amplitudes sampled on a grid in one representation.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveFunction {
    grid: GridSpec,
    rep: Representation,
    amp: Vec<Complex64>,
}

impl WaveFunction {
    pub fn new(grid: GridSpec, rep: Representation, amp: Vec<Complex64>) -> Result<Self> {
        if amp.len() != grid.n() {
            return Err(Error::LengthMismatch {
                expected: grid.n(),
                found: amp.len(),
            });
        }
        if let Some(i) = amp.iter().position(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { grid, rep, amp })
    }

    pub fn zeros(grid: GridSpec, rep: Representation) -> Self {
        Self {
            grid,
            rep,
            amp: vec![Complex64::new(0.0, 0.0); grid.n()],
        }
    }

    /// A state with all weight in one node, normalized.
    pub fn single_bin(grid: GridSpec, rep: Representation, index: usize, amplitude: Complex64) -> Result<Self> {
        if index >= grid.n() {
            return Err(Error::InvalidArgument(format!("bin {index} outside grid of {}", grid.n())));
        }
        let mut wf = Self::zeros(grid, rep);
        wf.amp[index] = amplitude;
        wf.normalize()
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn rep(&self) -> Representation {
        self.rep
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amp
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amp
    }

    pub fn len(&self) -> usize {
        self.amp.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amp.is_empty()
    }

    pub fn step(&self) -> f64 {
        self.grid.step(self.rep)
    }

    /// Coordinates of the nodes in this field's representation.
    pub fn nodes(&self) -> Vec<f64> {
        match self.rep {
            Representation::Position => self.grid.positions(),
            Representation::Momentum => self.grid.momenta(),
        }
    }

    pub fn density(&self) -> Vec<f64> {
        self.amp.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.step()
    }

    /// `Σ conj(self_j) other_j · step`.
    pub fn inner(&self, other: &WaveFunction) -> Result<Complex64> {
        self.check_compatible(other)?;
        let s: Complex64 = self.amp.iter().zip(&other.amp).map(|(a, b)| a.conj() * b).sum();
        Ok(s * self.step())
    }

    pub fn normalize(&self) -> Result<WaveFunction> {
        let norm = self.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroNorm);
        }
        Ok(self.scale(Complex64::new(1.0 / norm, 0.0)))
    }

    pub fn scale(&self, factor: Complex64) -> WaveFunction {
        self.map(|a| a * factor)
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol
    }

    pub(crate) fn map(&self, f: impl Fn(Complex64) -> Complex64) -> WaveFunction {
        WaveFunction {
            grid: self.grid,
            rep: self.rep,
            amp: self.amp.iter().map(|&a| f(a)).collect(),
        }
    }

    pub(crate) fn with_amplitudes(&self, amp: Vec<Complex64>) -> WaveFunction {
        debug_assert_eq!(amp.len(), self.amp.len());
        WaveFunction {
            grid: self.grid,
            rep: self.rep,
            amp,
        }
    }

    pub fn check_compatible(&self, other: &WaveFunction) -> Result<()> {
        if self.grid != other.grid || self.rep != other.rep {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    pub(crate) fn expect_rep(&self, expected: Representation) -> Result<()> {
        if self.rep != expected {
            return Err(Error::WrongRepresentation {
                expected,
                found: self.rep,
            });
        }
        Ok(())
    }

    pub fn to_momentum(&self) -> Result<WaveFunction> {
        to_momentum(self)
    }

    pub fn to_position(&self) -> Result<WaveFunction> {
        to_position(self)
    }
}

/// Forward transform, position → momentum.
pub fn to_momentum(psi: &WaveFunction) -> Result<WaveFunction> {
    psi.expect_rep(Representation::Position)?;
    let grid = psi.grid;
    let n = grid.n();
    // exp(-i p_k x_j) = exp(-i p_k x_min) · (-1)^j · exp(-2πi jk/n)
    let mut buf: Vec<Complex64> = psi
        .amp
        .iter()
        .enumerate()
        .map(|(j, &a)| if j % 2 == 0 { a } else { -a })
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let weight = grid.dx() / (2.0 * PI).sqrt();
    for (k, v) in buf.iter_mut().enumerate() {
        *v *= grid.offset_phase(k) * weight;
    }
    Ok(WaveFunction {
        grid,
        rep: Representation::Momentum,
        amp: buf,
    })
}

/// Inverse transform, momentum → position.
pub fn to_position(psi: &WaveFunction) -> Result<WaveFunction> {
    psi.expect_rep(Representation::Momentum)?;
    let grid = psi.grid;
    let n = grid.n();
    let mut buf: Vec<Complex64> = psi
        .amp
        .iter()
        .enumerate()
        .map(|(k, &a)| a * grid.offset_phase(k).conj())
        .collect();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let weight = grid.dp() / (2.0 * PI).sqrt();
    for (j, v) in buf.iter_mut().enumerate() {
        let sign = if j % 2 == 0 { weight } else { -weight };
        *v *= sign;
    }
    Ok(WaveFunction {
        grid,
        rep: Representation::Position,
        amp: buf,
    })
}
