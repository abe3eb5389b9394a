//! Finite-dimensional observables: Hermitian operators, their eigenbasis,
//! expansion coefficients, Born probabilities and outcome sampling.
//!
//! Expectation values are available along two independent routes: the
//! quadratic form `⟨ψ|H|ψ⟩` computed directly from the matrix, and the
//! spectral sum `Σ |c_k|² λ_k` computed from the eigendecomposition. Agreement
//! of the two is the spectral theorem made numerical.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::grid::{Representation, WaveFunction};
use crate::rng::{derived_seeds, SplitMix64};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const NORMALIZATION_TOL: f64 = 1e-10;
pub const SWEEP_THRESHOLD: f64 = 1e-13;
pub const MAX_SWEEPS: usize = 100;
/// Eigenvalues closer than this (relative to the operator scale) are one
/// degenerate cluster for ordering purposes.
pub const DEGENERACY_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A dense `k × k` self-adjoint matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    dim: usize,
    entries: Vec<Complex64>,
}

impl HermitianOperator {
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::InvalidArgument("operator must have dimension ≥ 1".into()));
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            entries.extend(row);
        }
        Self::from_entries(dim, entries)
    }

    pub fn from_entries(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("operator has non-finite entries".into()));
        }
        let op = Self { dim, entries };
        let defect = op.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian(defect));
        }
        Ok(op)
    }

    /// Real diagonal matrix.
    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let k = values.len();
        let mut entries = vec![ZERO; k * k];
        for (i, &v) in values.iter().enumerate() {
            entries[i * k + i] = Complex64::new(v, 0.0);
        }
        Self::from_entries(k, entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        self.entries.chunks(self.dim).map(<[Complex64]>::to_vec).collect()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let k = self.dim;
        let mut worst = 0.0f64;
        for i in 0..k {
            for j in i..k {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_dim(v.len())?;
        Ok(self
            .entries
            .chunks(self.dim)
            .map(|row| row.iter().zip(v).map(|(h, x)| h * x).sum())
            .collect())
    }

    /// `U H U†` for a unitary `U` given row-major.
    pub fn conjugate_by(&self, u: &[Complex64]) -> Result<Self> {
        let k = self.dim;
        if u.len() != k * k {
            return Err(Error::DimensionMismatch {
                expected: k * k,
                found: u.len(),
            });
        }
        let mut uh = vec![ZERO; k * k];
        for i in 0..k {
            for j in 0..k {
                uh[i * k + j] = (0..k).map(|l| u[i * k + l] * self.get(l, j)).sum();
            }
        }
        let mut out = vec![ZERO; k * k];
        for i in 0..k {
            for j in 0..k {
                out[i * k + j] = (0..k).map(|l| uh[i * k + l] * u[j * k + l].conj()).sum();
            }
        }
        // restore exact self-adjointness lost to rounding
        for i in 0..k {
            out[i * k + i].im = 0.0;
            for j in (i + 1)..k {
                let avg = (out[i * k + j] + out[j * k + i].conj()) * 0.5;
                out[i * k + j] = avg;
                out[j * k + i] = avg.conj();
            }
        }
        Self::from_entries(k, out)
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found,
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    /// `eigenvectors[k]` is the k-th eigenvector.
    eigenvectors: Vec<Vec<Complex64>>,
    residual: f64,
    sweeps: usize,
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &[Vec<Complex64>] {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Largest off-diagonal magnitude left after the final sweep.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    /// `max |V†V - I|` elementwise.
    pub fn gram_defect(&self) -> f64 {
        let k = self.dim();
        let mut worst = 0.0f64;
        for a in 0..k {
            for b in 0..k {
                let dot: Complex64 = self.eigenvectors[a]
                    .iter()
                    .zip(&self.eigenvectors[b])
                    .map(|(x, y)| x.conj() * y)
                    .sum();
                let target = if a == b { ONE } else { ZERO };
                worst = worst.max((dot - target).norm());
            }
        }
        worst
    }

    /// `max |V diag(λ) V† - H|` elementwise.
    pub fn reconstruction_defect(&self, h: &HermitianOperator) -> f64 {
        let k = self.dim();
        let mut worst = 0.0f64;
        for i in 0..k {
            for j in 0..k {
                let v: Complex64 = (0..k)
                    .map(|m| self.eigenvectors[m][i] * self.eigenvalues[m] * self.eigenvectors[m][j].conj())
                    .sum();
                worst = worst.max((v - h.get(i, j)).norm());
            }
        }
        worst
    }
}

/// Cyclic complex Jacobi diagonalization.
///
/// Each rotation first removes the phase of `a_pq` with a diagonal unitary
/// and then applies a real Givens rotation, so the transformed matrix stays
/// Hermitian with a real diagonal. Sweeps run in fixed `(p, q)` row order
/// until the off-diagonal Frobenius norm drops below `SWEEP_THRESHOLD`
/// (relative to `‖H‖_F`), for at most `MAX_SWEEPS` sweeps.
pub fn eigendecompose(h: &HermitianOperator) -> Result<SpectralDecomposition> {
    let defect = h.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let k = h.dim();
    let mut a = h.entries().to_vec();
    for i in 0..k {
        a[i * k + i].im = 0.0;
    }
    let mut v = vec![ZERO; k * k];
    for i in 0..k {
        v[i * k + i] = ONE;
    }
    let scale = h.frobenius_norm().max(f64::MIN_POSITIVE);
    let off_norm = |a: &[Complex64]| -> f64 {
        let mut s = 0.0;
        for i in 0..k {
            for j in 0..k {
                if i != j {
                    s += a[i * k + j].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while off_norm(&a) > SWEEP_THRESHOLD * scale {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                residual: max_off_diagonal(&a, k),
            });
        }
        sweeps += 1;
        for p in 0..k {
            for q in (p + 1)..k {
                rotate(&mut a, &mut v, k, p, q);
            }
        }
    }

    let raw_values: Vec<f64> = (0..k).map(|i| a[i * k + i].re).collect();
    let raw_vectors: Vec<Vec<Complex64>> = (0..k).map(|c| (0..k).map(|r| v[r * k + c]).collect()).collect();
    let (eigenvalues, eigenvectors) = canonical_order(raw_values, raw_vectors, scale);
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
        residual: max_off_diagonal(&a, k),
        sweeps,
    })
}

fn max_off_diagonal(a: &[Complex64], k: usize) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..k {
        for j in 0..k {
            if i != j {
                worst = worst.max(a[i * k + j].norm());
            }
        }
    }
    worst
}

/// One Jacobi rotation zeroing `a[p][q]`; `a ← U† a U`, `v ← v U`.
fn rotate(a: &mut [Complex64], v: &mut [Complex64], k: usize, p: usize, q: usize) {
    let apq = a[p * k + q];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = a[p * k + p].re;
    let aqq = a[q * k + q].re;
    let phase = apq.conj() / r;
    let zeta = (aqq - app) / (2.0 * r);
    let t = if zeta >= 0.0 {
        1.0 / (zeta + zeta.hypot(1.0))
    } else {
        -1.0 / (-zeta + zeta.hypot(1.0))
    };
    let c = 1.0 / t.hypot(1.0);
    let s = t * c;

    let u_pp = Complex64::new(c, 0.0);
    let u_pq = Complex64::new(s, 0.0);
    let u_qp = phase * -s;
    let u_qq = phase * c;

    for i in 0..k {
        let aip = a[i * k + p];
        let aiq = a[i * k + q];
        a[i * k + p] = aip * u_pp + aiq * u_qp;
        a[i * k + q] = aip * u_pq + aiq * u_qq;
    }
    for j in 0..k {
        let apj = a[p * k + j];
        let aqj = a[q * k + j];
        a[p * k + j] = u_pp.conj() * apj + u_qp.conj() * aqj;
        a[q * k + j] = u_pq.conj() * apj + u_qq.conj() * aqj;
    }
    a[p * k + q] = ZERO;
    a[q * k + p] = ZERO;
    a[p * k + p] = Complex64::new(app - t * r, 0.0);
    a[q * k + q] = Complex64::new(aqq + t * r, 0.0);

    for i in 0..k {
        let vip = v[i * k + p];
        let viq = v[i * k + q];
        v[i * k + p] = vip * u_pp + viq * u_qp;
        v[i * k + q] = vip * u_pq + viq * u_qq;
    }
}

fn leading_index(vec: &[Complex64]) -> usize {
    let mut best = 0;
    let mut best_mod = -1.0;
    for (i, z) in vec.iter().enumerate() {
        let m = z.norm();
        if m > best_mod {
            best = i;
            best_mod = m;
        }
    }
    best
}

/// Ascending eigenvalues; inside a degenerate cluster, vectors ordered by
/// the index of their largest-modulus component. Every vector's phase is
/// fixed so that component is real positive.
fn canonical_order(values: Vec<f64>, vectors: Vec<Vec<Complex64>>, scale: f64) -> (Vec<f64>, Vec<Vec<Complex64>>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));

    let tol = DEGENERACY_TOL * scale.max(1.0);
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] - values[order[end - 1]] <= tol {
            end += 1;
        }
        order[start..end].sort_by_key(|&i| (leading_index(&vectors[i]), i));
        start = end;
    }

    let out_values = order.iter().map(|&i| values[i]).collect();
    let out_vectors = order
        .iter()
        .map(|&i| {
            let vec = &vectors[i];
            let lead = vec[leading_index(vec)];
            let rot = if lead.norm() > 0.0 { lead.conj() / lead.norm() } else { ONE };
            let mut fixed: Vec<Complex64> = vec.iter().map(|z| z * rot).collect();
            let li = leading_index(vec);
            fixed[li] = Complex64::new(fixed[li].norm(), 0.0);
            fixed
        })
        .collect();
    (out_values, out_vectors)
}

fn check_normalized(state: &[Complex64]) -> Result<()> {
    let n2: f64 = state.iter().map(|z| z.norm_sqr()).sum();
    if (n2 - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized(n2));
    }
    Ok(())
}

/// Expansion coefficients `c_k = ⟨v_k, state⟩`.
pub fn coefficients(d: &SpectralDecomposition, state: &[Complex64]) -> Result<Vec<Complex64>> {
    if state.len() != d.dim() {
        return Err(Error::DimensionMismatch {
            expected: d.dim(),
            found: state.len(),
        });
    }
    check_normalized(state)?;
    Ok(d.eigenvectors
        .iter()
        .map(|vk| vk.iter().zip(state).map(|(a, b)| a.conj() * b).sum())
        .collect())
}

/// Outcome probabilities with their labels (eigenvalues or bin ids).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityTable {
    probs: Vec<f64>,
    labels: Vec<f64>,
}

impl ProbabilityTable {
    pub fn new(probs: Vec<f64>, labels: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(probs, labels, NORMALIZATION_TOL)
    }

    pub fn with_tolerance(probs: Vec<f64>, labels: Vec<f64>, tol: f64) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidTable("table is empty".into()));
        }
        if probs.len() != labels.len() {
            return Err(Error::InvalidTable(format!(
                "{} probabilities but {} labels",
                probs.len(),
                labels.len()
            )));
        }
        if let Some((i, p)) = probs.iter().enumerate().find(|(_, p)| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidTable(format!("entry {i} = {p} outside [0, 1]")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > tol {
            return Err(Error::InvalidTable(format!("entries sum to {total}")));
        }
        Ok(Self { probs, labels })
    }

    /// Table labelled by outcome index `0..k`.
    pub fn indexed(probs: Vec<f64>) -> Result<Self> {
        let labels = (0..probs.len()).map(|i| i as f64).collect();
        Self::new(probs, labels)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub(crate) fn sampler(&self) -> InverseCdf {
        let cdf = self
            .probs
            .iter()
            .scan(0.0, |acc, p| {
                *acc += p;
                Some(*acc)
            })
            .collect();
        let last = self.probs.iter().rposition(|&p| p > 0.0).unwrap_or(self.probs.len() - 1);
        InverseCdf { cdf, last }
    }
}

/// Maps a uniform `u ∈ [0, 1)` to the first outcome whose cumulative
/// probability exceeds it. Rounding in the cumulative sum can leave
/// `cdf[k-1] < 1`; such `u` fall back to the last supported outcome.
pub(crate) struct InverseCdf {
    cdf: Vec<f64>,
    last: usize,
}

impl InverseCdf {
    #[inline]
    pub(crate) fn draw(&self, u: f64) -> usize {
        self.cdf.partition_point(|&c| c <= u).min(self.last)
    }
}

/// Born probabilities `|c_k|²`, labelled by `eigenvalues`.
pub fn born_table(c: &[Complex64], eigenvalues: &[f64]) -> Result<ProbabilityTable> {
    if c.len() != eigenvalues.len() {
        return Err(Error::DimensionMismatch {
            expected: eigenvalues.len(),
            found: c.len(),
        });
    }
    check_normalized(c)?;
    let probs = c.iter().map(|z| z.norm_sqr().min(1.0)).collect();
    ProbabilityTable::new(probs, eigenvalues.to_vec())
}

pub fn expectation_spectral(table: &ProbabilityTable) -> f64 {
    table.probs.iter().zip(&table.labels).map(|(p, l)| p * l).sum()
}

/// Tolerance on `|Im ⟨ψ|H|ψ⟩|`, relative to `max(1, ‖H‖_F)`.
pub const IMAGINARY_TOL: f64 = 1e-12;

/// `Re ⟨state|H|state⟩`.
pub fn expectation_matrix(h: &HermitianOperator, state: &[Complex64]) -> Result<f64> {
    let hs = h.apply(state)?;
    check_normalized(state)?;
    let z: Complex64 = state.iter().zip(&hs).map(|(a, b)| a.conj() * b).sum();
    if z.im.abs() > IMAGINARY_TOL * h.frobenius_norm().max(1.0) {
        return Err(Error::NotHermitian(z.im.abs()));
    }
    Ok(z.re)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridObservable {
    Position,
    Momentum,
    Kinetic { mass: f64 },
}

/// Expectation of a grid observable by rectangle-rule quadrature, in
/// whichever representation diagonalizes it.
pub fn expectation_grid(psi: &WaveFunction, observable: GridObservable) -> Result<f64> {
    if !psi.is_normalized(NORMALIZATION_TOL) {
        return Err(Error::NotNormalized(psi.norm_sqr()));
    }
    let target = match observable {
        GridObservable::Position => Representation::Position,
        GridObservable::Momentum | GridObservable::Kinetic { .. } => Representation::Momentum,
    };
    let converted;
    let field = if psi.rep() == target {
        psi
    } else {
        converted = match target {
            Representation::Position => psi.to_position()?,
            Representation::Momentum => psi.to_momentum()?,
        };
        &converted
    };
    let weight: Box<dyn Fn(f64) -> f64> = match observable {
        GridObservable::Position | GridObservable::Momentum => Box::new(|q| q),
        GridObservable::Kinetic { mass } => {
            if !(mass > 0.0) {
                return Err(Error::InvalidArgument(format!("mass must be positive, got {mass}")));
            }
            Box::new(move |p| p * p / (2.0 * mass))
        }
    };
    Ok(field
        .nodes()
        .into_iter()
        .zip(field.density())
        .map(|(q, d)| weight(q) * d)
        .sum::<f64>()
        * field.step())
}

/// `n` inverse-CDF draws from `table` on a single SplitMix64 stream.
pub fn sample_outcomes(table: &ProbabilityTable, n: u64, seed: u64) -> Result<Vec<u64>> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample count must be ≥ 1".into()));
    }
    let sampler = table.sampler();
    let mut counts = vec![0u64; table.len()];
    let mut rng = SplitMix64::new(seed);
    for _ in 0..n {
        counts[sampler.draw(rng.next_f64())] += 1;
    }
    Ok(counts)
}

/// Split schedule for sharded sampling: shard `i` draws `n / shards` samples
/// (the first `n % shards` shards take one more) seeded with the `i`-th
/// output of `SplitMix64::new(seed)`.
pub fn shard_schedule(n: u64, seed: u64, shards: usize) -> Vec<(u64, u64)> {
    let shards = shards.max(1);
    let base = n / shards as u64;
    let extra = n % shards as u64;
    derived_seeds(seed, shards)
        .into_iter()
        .enumerate()
        .map(|(i, s)| (base + u64::from((i as u64) < extra), s))
        .filter(|(len, _)| *len > 0)
        .collect()
}

/// Parallel sampling over [`shard_schedule`]; counts are summed, so the
/// result is independent of thread scheduling.
pub fn sample_outcomes_sharded(table: &ProbabilityTable, n: u64, seed: u64, shards: usize) -> Result<Vec<u64>> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample count must be ≥ 1".into()));
    }
    let parts: Vec<Vec<u64>> = shard_schedule(n, seed, shards)
        .into_par_iter()
        .map(|(len, s)| sample_outcomes(table, len, s))
        .collect::<Result<_>>()?;
    let mut total = vec![0u64; table.len()];
    for part in parts {
        for (t, c) in total.iter_mut().zip(part) {
            *t += c;
        }
    }
    Ok(total)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub critical_value: f64,
    pub passed: bool,
}

/// Pearson goodness-of-fit of `counts` against `table`, judged against the
/// `quantile` of the chi-square law with (supported outcomes − 1) degrees of
/// freedom.
pub fn chi_square_test(counts: &[u64], table: &ProbabilityTable, quantile: f64) -> Result<ChiSquareTest> {
    if counts.len() != table.len() {
        return Err(Error::DimensionMismatch {
            expected: table.len(),
            found: counts.len(),
        });
    }
    let n: u64 = counts.iter().sum();
    let mut stat = 0.0;
    let mut supported = 0usize;
    for (&o, &p) in counts.iter().zip(table.probs()) {
        let expected = p * n as f64;
        if expected > 0.0 {
            supported += 1;
            stat += (o as f64 - expected).powi(2) / expected;
        } else if o > 0 {
            stat = f64::INFINITY;
        }
    }
    let df = supported.saturating_sub(1);
    let critical = if df == 0 {
        0.0
    } else {
        ChiSquared::new(df as f64)
            .map_err(|e| Error::InvalidArgument(e.to_string()))?
            .inverse_cdf(quantile)
    };
    Ok(ChiSquareTest {
        statistic: stat,
        degrees_of_freedom: df,
        critical_value: critical,
        passed: stat <= critical,
    })
}

/// Random Hermitian matrix with entries uniform in `[-1, 1]` (real and
/// imaginary parts independently), drawn in row-major upper-triangle order.
pub fn random_hermitian(dim: usize, rng: &mut SplitMix64) -> HermitianOperator {
    let mut entries = vec![ZERO; dim * dim];
    for i in 0..dim {
        entries[i * dim + i] = Complex64::new(2.0 * rng.next_f64() - 1.0, 0.0);
        for j in (i + 1)..dim {
            let z = Complex64::new(2.0 * rng.next_f64() - 1.0, 2.0 * rng.next_f64() - 1.0);
            entries[i * dim + j] = z;
            entries[j * dim + i] = z.conj();
        }
    }
    HermitianOperator::from_entries(dim, entries).expect("constructed Hermitian")
}

/// Random unit vector with components uniform in the square, then normalized.
pub fn random_state(dim: usize, rng: &mut SplitMix64) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(2.0 * rng.next_f64() - 1.0, 2.0 * rng.next_f64() - 1.0))
            .collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-3 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::states::{gaussian_packet, PacketSpec};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pauli_x() -> HermitianOperator {
        HermitianOperator::from_rows(vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]]).unwrap()
    }

    #[test]
    fn pauli_x_spectrum() {
        let d = eigendecompose(&pauli_x()).unwrap();
        assert!((d.eigenvalues()[0] + 1.0).abs() < 1e-15);
        assert!((d.eigenvalues()[1] - 1.0).abs() < 1e-15);
        let v0 = &d.eigenvectors()[0];
        let v1 = &d.eigenvectors()[1];
        // (1, -1)/√2 and (1, 1)/√2 up to phase
        assert!(((v0[0] * v0[1].conj()).re + 0.5).abs() < 1e-14);
        assert!(((v1[0] * v1[1].conj()).re - 0.5).abs() < 1e-14);
        assert!(d.gram_defect() < 1e-14);
    }

    #[test]
    fn diagonal_operator_is_permuted() {
        let d = eigendecompose(&HermitianOperator::diagonal(&[3.0, 1.0, 2.0]).unwrap()).unwrap();
        assert_eq!(d.eigenvalues(), &[1.0, 2.0, 3.0]);
        assert_eq!(d.eigenvectors()[0], vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(d.eigenvectors()[1], vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(d.eigenvectors()[2], vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(d.sweeps(), 0);
    }

    #[test]
    fn degenerate_cluster_ordering() {
        let d = eigendecompose(&HermitianOperator::diagonal(&[2.0, 1.0, 2.0, 2.0]).unwrap()).unwrap();
        assert_eq!(d.eigenvalues(), &[1.0, 2.0, 2.0, 2.0]);
        let leads: Vec<usize> = d.eigenvectors().iter().map(|v| leading_index(v)).collect();
        assert_eq!(leads, vec![1, 0, 2, 3]);
        for v in d.eigenvectors() {
            let lead = v[leading_index(v)];
            assert!(lead.im == 0.0 && lead.re > 0.0);
        }
    }

    #[test]
    fn non_hermitian_rejected() {
        let rows = vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(2.0, 0.0), c(0.0, 0.0)]];
        assert!(matches!(HermitianOperator::from_rows(rows), Err(Error::NotHermitian(_))));
        let rows = vec![vec![c(1.0, 0.1)]];
        assert!(matches!(HermitianOperator::from_rows(rows), Err(Error::NotHermitian(_))));
        let ragged = vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0)]];
        assert!(HermitianOperator::from_rows(ragged).is_err());
    }

    #[test]
    fn random_matrices_decompose_cleanly() {
        let mut rng = SplitMix64::new(99);
        for k in 1..=12 {
            let h = random_hermitian(k, &mut rng);
            let d = eigendecompose(&h).unwrap();
            assert!(d.gram_defect() <= 1e-10, "k={k} gram {}", d.gram_defect());
            assert!(d.reconstruction_defect(&h) <= 1e-9);
            assert!(d.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
            assert!(d.sweeps() <= MAX_SWEEPS);
        }
    }

    #[test]
    fn deterministic_output() {
        let mut rng = SplitMix64::new(5);
        let h = random_hermitian(6, &mut rng);
        let a = eigendecompose(&h).unwrap();
        let b = eigendecompose(&h).unwrap();
        assert_eq!(a.eigenvalues(), b.eigenvalues());
        assert_eq!(a.eigenvectors(), b.eigenvectors());
    }

    #[test]
    fn coefficient_examples() {
        let mut rng = SplitMix64::new(3);
        let h = random_hermitian(4, &mut rng);
        let d = eigendecompose(&h).unwrap();
        let cs = coefficients(&d, &d.eigenvectors()[1].clone()).unwrap();
        for (i, z) in cs.iter().enumerate() {
            let target = if i == 1 { 1.0 } else { 0.0 };
            assert!((z - c(target, 0.0)).norm() < 1e-12);
        }

        let diag = eigendecompose(&HermitianOperator::diagonal(&[1.0, 2.0]).unwrap()).unwrap();
        let s = [c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)];
        let cs = coefficients(&diag, &s).unwrap();
        assert!((cs[0] - s[0]).norm() < 1e-15 && (cs[1] - s[1]).norm() < 1e-15);

        let s = [c(0.6, 0.0), c(0.0, 0.8)];
        let cs = coefficients(&diag, &s).unwrap();
        assert_eq!(cs, s.to_vec());
    }

    #[test]
    fn coefficient_errors() {
        let diag = eigendecompose(&HermitianOperator::diagonal(&[1.0, 2.0]).unwrap()).unwrap();
        assert!(matches!(coefficients(&diag, &[c(1.0, 0.0), c(1.0, 0.0)]), Err(Error::NotNormalized(_))));
        assert!(matches!(
            coefficients(&diag, &[c(1.0, 0.0)]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn born_table_examples() {
        let t = born_table(&[c(1.0, 0.0), c(0.0, 0.0)], &[0.0, 1.0]).unwrap();
        assert_eq!(t.probs(), &[1.0, 0.0]);
        let t = born_table(&[c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)], &[-1.0, 1.0]).unwrap();
        assert!((t.probs()[0] - 0.5).abs() < 1e-15 && (t.probs()[1] - 0.5).abs() < 1e-15);
        let t = born_table(&[c(0.6, 0.0), c(0.0, 0.8)], &[1.0, 2.0]).unwrap();
        assert!((t.probs()[0] - 0.36).abs() < 1e-15 && (t.probs()[1] - 0.64).abs() < 1e-15);
        assert!(born_table(&[c(1.0, 0.0), c(1.0, 0.0)], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn expectation_spectral_examples() {
        let t = ProbabilityTable::new(vec![0.5, 0.5], vec![-1.0, 1.0]).unwrap();
        assert_eq!(expectation_spectral(&t), 0.0);
        let t = ProbabilityTable::new(vec![1.0, 0.0], vec![5.0, 7.0]).unwrap();
        assert_eq!(expectation_spectral(&t), 5.0);
        let t = ProbabilityTable::new(vec![0.36, 0.64], vec![1.0, 2.0]).unwrap();
        assert!((expectation_spectral(&t) - 1.64).abs() < 1e-15);
    }

    #[test]
    fn expectation_matrix_examples() {
        assert_eq!(expectation_matrix(&pauli_x(), &[c(1.0, 0.0), c(0.0, 0.0)]).unwrap(), 0.0);
        let h = HermitianOperator::diagonal(&[1.0, 2.0]).unwrap();
        let e = expectation_matrix(&h, &[c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        assert!((e - 1.64).abs() < 1e-15);
        assert!(expectation_matrix(&h, &[c(1.0, 0.0), c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn two_paths_agree_on_examples() {
        let mut rng = SplitMix64::new(11);
        for k in 2..=8 {
            let h = random_hermitian(k, &mut rng);
            let s = random_state(k, &mut rng);
            let d = eigendecompose(&h).unwrap();
            let table = born_table(&coefficients(&d, &s).unwrap(), d.eigenvalues()).unwrap();
            let spectral = expectation_spectral(&table);
            let direct = expectation_matrix(&h, &s).unwrap();
            assert!((spectral - direct).abs() <= 1e-10);
        }
    }

    #[test]
    fn grid_expectations_of_gaussians() {
        let g = GridSpec::new(1024, -20.0, 20.0).unwrap();
        let psi = gaussian_packet(&PacketSpec::new(1.0, 0.0, 1.0), &g).unwrap();
        assert!((expectation_grid(&psi, GridObservable::Position).unwrap() - 1.0).abs() <= 1e-10);

        let psi = gaussian_packet(&PacketSpec::new(0.0, 2.0, 1.0), &g).unwrap();
        assert!((expectation_grid(&psi, GridObservable::Momentum).unwrap() - 2.0).abs() <= 1e-10);
        let kin = expectation_grid(&psi, GridObservable::Kinetic { mass: 1.0 }).unwrap();
        assert!((kin - 2.125).abs() <= 1e-6, "{kin}");

        // same answer from the momentum representation
        let mom = psi.to_momentum().unwrap();
        assert!((expectation_grid(&mom, GridObservable::Momentum).unwrap() - 2.0).abs() <= 1e-10);
        assert!((expectation_grid(&mom, GridObservable::Position).unwrap()).abs() <= 1e-10);
    }

    #[test]
    fn grid_expectation_rejects_unnormalized() {
        let g = GridSpec::new(64, -10.0, 10.0).unwrap();
        let psi = gaussian_packet(&PacketSpec::new(0.0, 0.0, 1.0), &g).unwrap().scale(c(2.0, 0.0));
        assert!(matches!(
            expectation_grid(&psi, GridObservable::Position),
            Err(Error::NotNormalized(_))
        ));
    }

    #[test]
    fn sampling_degenerate_and_deterministic() {
        let t = ProbabilityTable::indexed(vec![1.0, 0.0]).unwrap();
        assert_eq!(sample_outcomes(&t, 1000, 9).unwrap(), vec![1000, 0]);
        let t = ProbabilityTable::indexed(vec![0.0, 1.0]).unwrap();
        assert_eq!(sample_outcomes(&t, 1000, 9).unwrap(), vec![0, 1000]);
        let t = ProbabilityTable::indexed(vec![0.2, 0.3, 0.5]).unwrap();
        assert_eq!(sample_outcomes(&t, 5000, 1).unwrap(), sample_outcomes(&t, 5000, 1).unwrap());
        assert!(sample_outcomes(&t, 0, 1).is_err());
    }

    #[test]
    fn fair_coin_frequencies() {
        let t = ProbabilityTable::indexed(vec![0.5, 0.5]).unwrap();
        let n = 1_000_000;
        let counts = sample_outcomes(&t, n, 42).unwrap();
        for &cnt in &counts {
            assert!((cnt as f64 / n as f64 - 0.5).abs() <= 0.002);
        }
    }

    #[test]
    fn sharded_equals_sum_of_scheduled_streams() {
        let t = ProbabilityTable::indexed(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let sharded = sample_outcomes_sharded(&t, 100_003, 77, 8).unwrap();
        let mut manual = vec![0u64; 4];
        for (len, s) in shard_schedule(100_003, 77, 8) {
            for (m, c) in manual.iter_mut().zip(sample_outcomes(&t, len, s).unwrap()) {
                *m += c;
            }
        }
        assert_eq!(sharded, manual);
        assert_eq!(sharded.iter().sum::<u64>(), 100_003);
    }

    #[test]
    fn chi_square_critical_value() {
        let t = ProbabilityTable::indexed(vec![0.5, 0.5]).unwrap();
        let res = chi_square_test(&[500, 500], &t, 0.999).unwrap();
        assert_eq!(res.statistic, 0.0);
        assert_eq!(res.degrees_of_freedom, 1);
        // χ²₁ 99.9th percentile
        assert!((res.critical_value - 10.827_566_170_662_733).abs() < 1e-9);
        assert!(res.passed);
        let res = chi_square_test(&[900, 100], &t, 0.999).unwrap();
        assert!(!res.passed);
    }

    #[test]
    fn table_validation() {
        assert!(ProbabilityTable::indexed(vec![0.5, 0.6]).is_err());
        assert!(ProbabilityTable::indexed(vec![1.5, -0.5]).is_err());
        assert!(ProbabilityTable::indexed(vec![]).is_err());
        assert!(ProbabilityTable::new(vec![1.0], vec![]).is_err());
    }
}
