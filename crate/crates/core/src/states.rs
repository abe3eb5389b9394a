//! Free-particle wave packets and plane-wave phase bookkeeping.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, Representation, WaveFunction};

/// Half-widths (in units of `sigma_x`) that a packet must fit inside the grid.
pub const SUPPORT_SIGMAS: f64 = 8.0;

fn default_mass() -> f64 {
    1.0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketSpec {
    pub x0: f64,
    pub p0: f64,
    pub sigma_x: f64,
    #[serde(default = "default_mass")]
    pub m: f64,
    #[serde(default)]
    pub t: f64,
}

impl PacketSpec {
    pub fn new(x0: f64, p0: f64, sigma_x: f64) -> Self {
        Self {
            x0,
            p0,
            sigma_x,
            m: 1.0,
            t: 0.0,
        }
    }

    pub fn sigma_p(&self) -> f64 {
        1.0 / (2.0 * self.sigma_x)
    }

    /// Checks the packet's own parameters, without reference to a grid.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("x0", self.x0), ("p0", self.p0), ("t", self.t)] {
            if !v.is_finite() {
                return Err(Error::InvalidPacket(format!("{name} must be finite")));
            }
        }
        if !(self.sigma_x > 0.0 && self.sigma_x.is_finite()) {
            return Err(Error::InvalidPacket(format!("sigma_x = {} must be positive", self.sigma_x)));
        }
        if !(self.m > 0.0 && self.m.is_finite()) {
            return Err(Error::InvalidPacket(format!("m = {} must be positive", self.m)));
        }
        Ok(())
    }

    pub fn validate_for(&self, grid: &GridSpec) -> Result<()> {
        self.validate()?;
        let lo = self.x0 - SUPPORT_SIGMAS * self.sigma_x;
        let hi = self.x0 + SUPPORT_SIGMAS * self.sigma_x;
        if lo < grid.x_min() || hi > grid.x_max() {
            return Err(Error::InvalidPacket(format!(
                "support [{lo}, {hi}] does not fit grid [{}, {}]",
                grid.x_min(),
                grid.x_max()
            )));
        }
        Ok(())
    }
}

/// Normalized Gaussian packet in the position representation.
///
/// The global phase is chosen so that the amplitude at the largest-modulus
/// node is real and positive.
pub fn gaussian_packet(spec: &PacketSpec, grid: &GridSpec) -> Result<WaveFunction> {
    spec.validate_for(grid)?;
    let s2 = spec.sigma_x * spec.sigma_x;
    let c = (2.0 * PI * s2).powf(-0.25);
    let amp = grid
        .positions()
        .into_iter()
        .map(|x| {
            let env = c * (-(x - spec.x0).powi(2) / (4.0 * s2)).exp();
            Complex64::from_polar(env, spec.p0 * x)
        })
        .collect();
    let psi = WaveFunction::new(*grid, Representation::Position, amp)?.normalize()?;
    Ok(fix_gauge(&psi))
}

/// Rotates the global phase so the peak amplitude is real positive.
pub fn fix_gauge(psi: &WaveFunction) -> WaveFunction {
    let Some((idx, peak)) = psi
        .amplitudes()
        .iter()
        .copied()
        .enumerate()
        .max_by(|a, b| a.1.norm_sqr().total_cmp(&b.1.norm_sqr()))
    else {
        return psi.clone();
    };
    if peak.norm() == 0.0 {
        return psi.clone();
    }
    let rot = peak.conj() / peak.norm();
    let mut amp: Vec<Complex64> = psi.amplitudes().iter().map(|a| a * rot).collect();
    // rounding can leave a residual imaginary part at the peak
    amp[idx] = Complex64::new(peak.norm(), 0.0);
    psi.with_amplitudes(amp)
}

/// Normalized linear combination `Σ c_i ψ_i`.
pub fn superpose(terms: &[(Complex64, &WaveFunction)]) -> Result<WaveFunction> {
    let (_, first) = terms
        .first()
        .ok_or_else(|| Error::InvalidArgument("superposition needs at least one term".into()))?;
    let mut acc = vec![Complex64::new(0.0, 0.0); first.len()];
    for (coeff, psi) in terms {
        first.check_compatible(psi)?;
        for (slot, a) in acc.iter_mut().zip(psi.amplitudes()) {
            *slot += coeff * a;
        }
    }
    WaveFunction::new(*first.grid(), first.rep(), acc)?.normalize()
}

/// Even superposition of packets boosted to `+p0` and `-p0`.
pub fn cosine_packet(spec: &PacketSpec, grid: &GridSpec) -> Result<WaveFunction> {
    let plus = gaussian_packet(&PacketSpec { p0: spec.p0.abs(), ..*spec }, grid)?;
    let minus = gaussian_packet(&PacketSpec { p0: -spec.p0.abs(), ..*spec }, grid)?;
    let one = Complex64::new(1.0, 0.0);
    superpose(&[(one, &plus), (one, &minus)])
}

/// Plane-wave phase `E t - p x` with `E = p² / 2m`.
pub fn plane_wave_phase(p: f64, x: f64, t: f64, m: f64) -> Result<f64> {
    if !(m > 0.0) {
        return Err(Error::InvalidArgument(format!("mass must be positive, got {m}")));
    }
    Ok(p * p / (2.0 * m) * t - p * x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid() -> GridSpec {
        GridSpec::new(1024, -20.0, 20.0).unwrap()
    }

    fn moment(psi: &WaveFunction, power: i32) -> f64 {
        psi.nodes()
            .iter()
            .zip(psi.density())
            .map(|(x, d)| x.powi(power) * d)
            .sum::<f64>()
            * psi.step()
    }

    #[test]
    fn stationary_packet_is_normalized_and_centered() {
        let psi = gaussian_packet(&PacketSpec::new(0.0, 0.0, 1.0), &grid()).unwrap();
        assert!((psi.norm() - 1.0).abs() <= 1e-12);
        assert!(moment(&psi, 1).abs() <= 1e-12);
        let mom = psi.to_momentum().unwrap();
        assert!(moment(&mom, 1).abs() <= 1e-12);
    }

    #[test]
    fn displaced_packet_mean_position() {
        let psi = gaussian_packet(&PacketSpec::new(1.0, 0.0, 1.0), &grid()).unwrap();
        assert!((moment(&psi, 1) - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn boosted_packet_peaks_near_p0() {
        let g = grid();
        let psi = gaussian_packet(&PacketSpec::new(0.0, 2.0, 1.0), &g).unwrap();
        let mom = psi.to_momentum().unwrap();
        let argmax = mom
            .density()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        assert_eq!(argmax, g.nearest_momentum_index(2.0));
    }

    #[test]
    fn peak_gauge_is_real_positive() {
        let psi = gaussian_packet(&PacketSpec::new(0.3, 1.7, 0.8), &grid()).unwrap();
        let peak = psi
            .amplitudes()
            .iter()
            .max_by(|a, b| a.norm_sqr().total_cmp(&b.norm_sqr()))
            .unwrap();
        assert!(peak.re > 0.0 && peak.im == 0.0);
    }

    #[test]
    fn support_overflow_rejected() {
        let err = gaussian_packet(&PacketSpec::new(15.0, 0.0, 1.0), &grid()).unwrap_err();
        assert!(matches!(err, Error::InvalidPacket(_)));
        assert!(gaussian_packet(&PacketSpec::new(0.0, 0.0, -1.0), &grid()).is_err());
        let heavy = PacketSpec { m: 0.0, ..PacketSpec::new(0.0, 0.0, 1.0) };
        assert!(gaussian_packet(&heavy, &grid()).is_err());
    }

    #[test]
    fn superpose_same_state_is_idempotent() {
        let psi = gaussian_packet(&PacketSpec::new(0.5, 1.0, 1.2), &grid()).unwrap();
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let out = superpose(&[(h, &psi), (h, &psi)]).unwrap();
        for (a, b) in out.amplitudes().iter().zip(psi.amplitudes()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn superpose_disjoint_bins_splits_probability() {
        let g = GridSpec::new(16, -4.0, 4.0).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let a = WaveFunction::single_bin(g, Representation::Momentum, 3, one).unwrap();
        let b = WaveFunction::single_bin(g, Representation::Momentum, 11, one).unwrap();
        let s = superpose(&[(one, &a), (one, &b)]).unwrap();
        let probs: Vec<f64> = s.density().iter().map(|d| d * s.step()).collect();
        assert!((probs[3] - 0.5).abs() < 1e-15);
        assert!((probs[11] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn superpose_errors() {
        let g = grid();
        let psi = gaussian_packet(&PacketSpec::new(0.0, 0.0, 1.0), &g).unwrap();
        let one = Complex64::new(1.0, 0.0);
        assert!(matches!(
            superpose(&[(one, &psi), (-one, &psi)]),
            Err(Error::ZeroNorm)
        ));
        let mom = psi.to_momentum().unwrap();
        assert!(matches!(superpose(&[(one, &psi), (one, &mom)]), Err(Error::GridMismatch)));
        assert!(superpose(&[]).is_err());
    }

    #[test]
    fn cosine_packet_momentum_modulus_is_even() {
        let g = grid();
        let psi = cosine_packet(&PacketSpec::new(0.0, 3.0, 1.0), &g).unwrap();
        let mom = psi.to_momentum().unwrap();
        let amp = mom.amplitudes();
        // direct node-by-node comparison of |ψ̃(p)| and |ψ̃(-p)|
        for k in 1..g.n() {
            let mirror = g.n() - k;
            assert!((g.p(k) + g.p(mirror)).abs() < 1e-12);
            assert!((amp[k].norm() - amp[mirror].norm()).abs() <= 1e-10);
        }
    }

    #[test]
    fn plane_wave_phase_examples() {
        assert_eq!(plane_wave_phase(0.0, 3.0, 5.0, 1.0).unwrap(), 0.0);
        assert_eq!(plane_wave_phase(2.0, 3.0, 0.0, 1.0).unwrap(), -6.0);
        assert_eq!(plane_wave_phase(2.0, 3.0, 1.0, 1.0).unwrap(), -4.0);
        assert!(plane_wave_phase(1.0, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn uncertainty_product_of_constructed_gaussian() {
        let g = grid();
        for sigma in [0.7, 1.0, 1.5] {
            let psi = gaussian_packet(&PacketSpec::new(0.0, 0.0, sigma), &g).unwrap();
            let mom = psi.to_momentum().unwrap();
            let sx = (moment(&psi, 2) - moment(&psi, 1).powi(2)).sqrt();
            let sp = (moment(&mom, 2) - moment(&mom, 1).powi(2)).sqrt();
            assert!((sx * sp - 0.5).abs() <= 0.01, "σx σp = {}", sx * sp);
        }
    }

    proptest! {
        #[test]
        fn stationary_packets_have_even_momentum_modulus(
            x0 in -5.0f64..5.0,
            sigma in 0.5f64..1.5,
        ) {
            let g = grid();
            let psi = gaussian_packet(&PacketSpec::new(x0, 0.0, sigma), &g).unwrap();
            let mom = psi.to_momentum().unwrap();
            let amp = mom.amplitudes();
            for k in 1..g.n() {
                prop_assert!((amp[k].norm() - amp[g.n() - k].norm()).abs() <= 1e-10);
            }
        }

        #[test]
        fn phase_kinetic_term_even_momentum_term_odd(
            p in -10.0f64..10.0, x in -10.0f64..10.0, t in 0.0f64..10.0, m in 0.1f64..5.0,
        ) {
            let flipped = plane_wave_phase(-p, x, t, m).unwrap();
            prop_assert_eq!(flipped, p * p / (2.0 * m) * t + p * x);
        }
    }
}
