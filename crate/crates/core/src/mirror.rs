//! Apparatus image states and the mirror pathway `P(p) = ψ(p) ψ(-p)`.
//!
//! The apparatus image is built segment by segment: every momentum cell of
//! the particle hands its amplitude to the apparatus with momentum and phase
//! reversed. The result is compared against the Born density `|ψ(p)|²`;
//! nothing here assumes the two agree, the report measures how far apart
//! they are.
//!
//! Momentum reflection on the centered even grid pairs node `j` with node
//! `n - j`. Node `n/2` (p = 0) is its own partner, and node `0`
//! (p = -n/2·dp) has no partner on the grid and is mapped to itself. Weight
//! on that edge node makes reflection ambiguous and is reported.

use std::f64::consts::PI;
use std::fmt;

use log::{debug, warn};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Representation, WaveFunction};
use crate::spectral::NORMALIZATION_TOL;

pub const DEFAULT_TOLERANCE: f64 = 1e-8;
/// Modulus above which the unpaired edge node triggers a warning.
pub const EDGE_TOL: f64 = 1e-12;
/// Nodes below this fraction of the peak modulus are ignored when measuring
/// phase oddness (their phase is numerically meaningless).
pub const PHASE_SUPPORT_FRACTION: f64 = 1e-6;

/// Index of the node carrying momentum `-p_j`.
#[inline]
pub fn mirror_index(j: usize, n: usize) -> usize {
    if j == 0 {
        0
    } else {
        n - j
    }
}

pub fn edge_weight(psi: &WaveFunction) -> f64 {
    psi.amplitudes().first().map_or(0.0, |a| a.norm())
}

fn note_edge(psi: &WaveFunction) {
    let w = edge_weight(psi);
    if w > EDGE_TOL {
        debug!("unpaired edge momentum node carries |ψ| = {w:e}; reflection is grid-ambiguous");
    }
}

/// `ψ(p) → ψ(-p)` on momentum nodes. An involution.
pub fn reflect(psi: &WaveFunction) -> Result<WaveFunction> {
    psi.expect_rep(Representation::Momentum)?;
    note_edge(psi);
    let amp = psi.amplitudes();
    let n = amp.len();
    Ok(psi.with_amplitudes((0..n).map(|j| amp[mirror_index(j, n)]).collect()))
}

pub fn conjugate(psi: &WaveFunction) -> WaveFunction {
    psi.map(|a| a.conj())
}

/// Apparatus image assembled one momentum cell ("segment") at a time.
///
/// Segment `j` of the particle carries `a_j e^{iφ_j}` at momentum `p_j`. The
/// exchange reverses its momentum and its phase, so the apparatus cell at
/// `-p_j` receives `a_j e^{-iφ_j}`. The value is copied, never recomputed
/// from polar form, so the image equals `reflect(conjugate(ψ))` bit for bit.
pub fn apparatus_image_segmentwise(psi: &WaveFunction) -> Result<WaveFunction> {
    psi.expect_rep(Representation::Momentum)?;
    note_edge(psi);
    let amp = psi.amplitudes();
    let n = amp.len();
    let mut image = vec![Complex64::new(0.0, 0.0); n];
    for (j, segment) in amp.iter().enumerate() {
        image[mirror_index(j, n)] = segment.conj();
    }
    Ok(psi.with_amplitudes(image))
}

/// Momentum, energy and phase changes of one segment exchange.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExchangeRecord {
    pub dp_part: f64,
    pub dp_ap: f64,
    pub de_part: f64,
    pub de_ap: f64,
    pub dphi_part: f64,
    pub dphi_ap: f64,
}

impl ExchangeRecord {
    pub fn momentum_balance(&self) -> f64 {
        self.dp_part + self.dp_ap
    }

    pub fn energy_balance(&self) -> f64 {
        self.de_part + self.de_ap
    }

    pub fn phase_balance(&self) -> f64 {
        self.dphi_part + self.dphi_ap
    }
}

/// The particle loses `delta_p` and `delta_e` to the apparatus at a common
/// point `x` over a window `tau`; each side's phase change is
/// `dE·tau - dp·x`.
pub fn segment_exchange(delta_p: f64, delta_e: f64, x: f64, tau: f64) -> Result<ExchangeRecord> {
    if !(tau >= 0.0) {
        return Err(Error::InvalidArgument(format!("tau must be ≥ 0, got {tau}")));
    }
    let (dp_part, dp_ap) = (-delta_p, delta_p);
    let (de_part, de_ap) = (-delta_e, delta_e);
    Ok(ExchangeRecord {
        dp_part,
        dp_ap,
        de_part,
        de_ap,
        dphi_part: de_part * tau - dp_part * x,
        dphi_ap: de_ap * tau - dp_ap * x,
    })
}

/// Pointwise product `ψ_part · ψ_ap`, deliberately not renormalized.
pub fn joint_amplitude(psi: &WaveFunction, psi_ap: &WaveFunction) -> Result<Vec<Complex64>> {
    psi.check_compatible(psi_ap)?;
    Ok(psi
        .amplitudes()
        .iter()
        .zip(psi_ap.amplitudes())
        .map(|(a, b)| a * b)
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Fails,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MirrorReport {
    /// `max_j |ψ(-p_j) - ψ*(p_j)|`
    pub dev_reflect_conj: f64,
    /// `max_j |ψ(p_j)ψ(-p_j) - |ψ(p_j)|²|`
    pub dev_product: f64,
    /// `max_j |Im ψ(p_j)ψ(-p_j)|`
    pub max_imag: f64,
    /// `max_j ||ψ(-p_j)| - |ψ(p_j)||`
    pub evenness_defect: f64,
    /// `max |wrap(φ(p) + φ(-p))|` over nodes with non-negligible modulus.
    pub odd_phase_defect: f64,
    /// `Σ_j Re P_j · dp`
    pub mirror_mass: f64,
    /// `Σ_j |ψ_j|² · dp`
    pub born_mass: f64,
    pub edge_weight: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MirrorRow {
    pub p: f64,
    pub born_density: f64,
    pub mirror_re: f64,
    pub mirror_im: f64,
}

#[derive(Clone, Debug)]
pub struct MirrorComparison {
    pub report: MirrorReport,
    pub rows: Vec<MirrorRow>,
}

fn wrap_phase(phi: f64) -> f64 {
    let w = (phi + PI).rem_euclid(2.0 * PI) - PI;
    // -π and π describe the same angle
    if w <= -PI {
        w + 2.0 * PI
    } else {
        w
    }
}

/// Measure the mirror pathway against the Born density for a normalized
/// momentum-space state. The verdict is `Holds` iff
/// `dev_reflect_conj ≤ tolerance`.
pub fn born_compare(psi: &WaveFunction, tolerance: f64) -> Result<MirrorComparison> {
    psi.expect_rep(Representation::Momentum)?;
    if !psi.is_normalized(NORMALIZATION_TOL) {
        return Err(Error::NotNormalized(psi.norm_sqr()));
    }
    if !(tolerance >= 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be ≥ 0, got {tolerance}")));
    }
    let w = edge_weight(psi);
    if w > EDGE_TOL {
        warn!("unpaired edge momentum node carries |ψ| = {w:e}; reflection is grid-ambiguous");
    }
    let reflected = reflect(psi)?;
    let conj = conjugate(psi);
    let mirror = joint_amplitude(psi, &reflected)?;
    let born = joint_amplitude(psi, &conj)?;

    let amp = psi.amplitudes();
    let refl = reflected.amplitudes();
    let peak = amp.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let support = PHASE_SUPPORT_FRACTION * peak;

    let mut dev_reflect_conj = 0.0f64;
    let mut dev_product = 0.0f64;
    let mut max_imag = 0.0f64;
    let mut evenness_defect = 0.0f64;
    let mut odd_phase_defect = 0.0f64;
    for j in 0..amp.len() {
        dev_reflect_conj = dev_reflect_conj.max((refl[j] - conj.amplitudes()[j]).norm());
        dev_product = dev_product.max((mirror[j] - born[j].re).norm());
        max_imag = max_imag.max(mirror[j].im.abs());
        evenness_defect = evenness_defect.max((refl[j].norm() - amp[j].norm()).abs());
        if amp[j].norm() > support && refl[j].norm() > support {
            odd_phase_defect = odd_phase_defect.max(wrap_phase(amp[j].arg() + refl[j].arg()).abs());
        }
    }
    let dp = psi.step();
    let mirror_mass = mirror.iter().map(|z| z.re).sum::<f64>() * dp;
    let born_mass = born.iter().map(|z| z.re).sum::<f64>() * dp;

    let rows = psi
        .nodes()
        .into_iter()
        .zip(born.iter().zip(&mirror))
        .map(|(p, (b, m))| MirrorRow {
            p,
            born_density: b.re,
            mirror_re: m.re,
            mirror_im: m.im,
        })
        .collect();

    let verdict = if dev_reflect_conj <= tolerance {
        Verdict::Holds
    } else {
        Verdict::Fails
    };
    Ok(MirrorComparison {
        report: MirrorReport {
            dev_reflect_conj,
            dev_product,
            max_imag,
            evenness_defect,
            odd_phase_defect,
            mirror_mass,
            born_mass,
            edge_weight: edge_weight(psi),
            tolerance,
            verdict,
        },
        rows,
    })
}

pub const MIRROR_CSV_HEADER: &str = "p,born_density,mirror_re,mirror_im";

pub fn mirror_csv(rows: &[MirrorRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 96);
    out.push_str(MIRROR_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&crate::io::csv_line(&[r.p, r.born_density, r.mirror_re, r.mirror_im]));
    }
    out
}
