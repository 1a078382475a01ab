//! Log-normal shadowing channel, NCFSK radio reception and per-radio
//! hardware variability.
//!
//! The link SNR in dB is
//!
//! ```text
//! γ = T − PL(d0) − 10·η·log10(d/d0) − R + N(0, σ_ch)
//! ```
//!
//! where `T` is the transmitter's actual output power and `R` the receiver's
//! actual noise floor. With nominal hardware `T = P_t`, `R = P_n`. The frame
//! is received when every one of its `f` encoded bits is, so
//! `Ψ(γ) = (1 − β(γ))^f`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::gaussian_expectation;
use crate::units::db_to_linear;

/// Log-normal shadowing path loss parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelModel {
    /// Power decay at the reference distance (dB).
    pub pl_d0_db: f64,
    /// Reference distance (m).
    pub d0_m: f64,
    /// Path loss exponent.
    pub eta: f64,
    /// Shadowing standard deviation (dB).
    pub sigma_ch_db: f64,
}

impl ChannelModel {
    pub fn new(pl_d0_db: f64, d0_m: f64, eta: f64, sigma_ch_db: f64) -> Result<Self> {
        let model = Self {
            pl_d0_db,
            d0_m,
            eta,
            sigma_ch_db,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.pl_d0_db.is_finite() {
            return Err(Error::invalid("pl_d0_db", "must be finite"));
        }
        if !(self.d0_m > 0.0 && self.d0_m.is_finite()) {
            return Err(Error::invalid("d0_m", "must be positive"));
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::invalid("eta", "must be positive"));
        }
        if !(self.sigma_ch_db >= 0.0 && self.sigma_ch_db.is_finite()) {
            return Err(Error::invalid("sigma_ch_db", "must be non-negative"));
        }
        Ok(())
    }
}

/// Bit-error model of a modulation scheme, as a function of the linear SNR.
pub trait BitErrorModel {
    fn ber(&self, snr_linear: f64) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modulation {
    /// Non-coherent binary FSK: `β = ½·exp(−γ/2)`.
    #[default]
    Ncfsk,
}

impl BitErrorModel for Modulation {
    fn ber(&self, snr_linear: f64) -> f64 {
        match self {
            Modulation::Ncfsk => 0.5 * (-snr_linear / 2.0).exp(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    None,
    /// Two channel bits per payload bit.
    #[default]
    Manchester,
}

impl Encoding {
    pub fn encoded_bits(self, raw_bits: u32) -> u32 {
        match self {
            Encoding::None => raw_bits,
            Encoding::Manchester => raw_bits * 2,
        }
    }
}

impl std::str::FromStr for Encoding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(Encoding::None),
            "manchester" => Ok(Encoding::Manchester),
            other => Err(Error::invalid(
                "encoding",
                format!("unknown encoding '{other}' (expected none or manchester)"),
            )),
        }
    }
}

/// Nominal radio parameters. The frame size counts encoded (on-air) bits and
/// is derived from the raw payload at construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadioModel {
    /// Nominal output power (dBm).
    pub pt_dbm: f64,
    /// Average noise floor (dBm).
    pub pn_dbm: f64,
    frame_bits: u32,
    pub modulation: Modulation,
    encoding: Encoding,
}

impl RadioModel {
    pub fn from_raw_bits(
        pt_dbm: f64,
        pn_dbm: f64,
        raw_bits: u32,
        encoding: Encoding,
        modulation: Modulation,
    ) -> Result<Self> {
        if !pt_dbm.is_finite() {
            return Err(Error::invalid("pt_dbm", "must be finite"));
        }
        if !pn_dbm.is_finite() {
            return Err(Error::invalid("pn_dbm", "must be finite"));
        }
        if raw_bits == 0 {
            return Err(Error::invalid("payload_bytes", "frame must carry at least one bit"));
        }
        let frame_bits = raw_bits
            .checked_mul(match encoding {
                Encoding::None => 1,
                Encoding::Manchester => 2,
            })
            .ok_or_else(|| Error::invalid("payload_bytes", "frame too large"))?;
        Ok(Self {
            pt_dbm,
            pn_dbm,
            frame_bits,
            modulation,
            encoding,
        })
    }

    pub fn from_payload_bytes(pt_dbm: f64, pn_dbm: f64, payload_bytes: u32, encoding: Encoding) -> Result<Self> {
        let raw = payload_bytes
            .checked_mul(8)
            .ok_or_else(|| Error::invalid("payload_bytes", "frame too large"))?;
        Self::from_raw_bits(pt_dbm, pn_dbm, raw, encoding, Modulation::Ncfsk)
    }

    /// Encoded frame size `f` in bits.
    pub fn frame_bits(&self) -> u32 {
        self.frame_bits
    }

    pub fn encoding(&self) -> Encoding {
        self.encoding
    }
}

/// Covariance between a radio's output power and its noise floor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardwareVariability {
    cov: [[f64; 2]; 2],
    enabled: bool,
}

impl HardwareVariability {
    /// Output power / noise floor covariance measured on mote radios (dB²).
    pub const MEASURED_COV: [[f64; 2]; 2] = [[6.0, -3.3], [-3.3, 3.7]];

    pub fn new(cov: [[f64; 2]; 2], enabled: bool) -> Result<Self> {
        let [[a, b], [c, d]] = cov;
        if !cov.iter().flatten().all(|v| v.is_finite()) {
            return Err(Error::invalid("hw_cov", "entries must be finite"));
        }
        if b != c {
            return Err(Error::invalid("hw_cov", "matrix must be symmetric"));
        }
        if a < 0.0 || d < 0.0 {
            return Err(Error::invalid("hw_cov", "diagonal entries must be non-negative"));
        }
        let det = a * d - b * c;
        if det < -1e-12 * (a * d).max(1.0) {
            return Err(Error::invalid("hw_cov", "matrix must be positive semi-definite"));
        }
        Ok(Self { cov, enabled })
    }

    pub fn disabled() -> Self {
        Self {
            cov: [[0.0; 2]; 2],
            enabled: false,
        }
    }

    pub fn measured() -> Self {
        Self {
            cov: Self::MEASURED_COV,
            enabled: true,
        }
    }

    pub fn cov(&self) -> [[f64; 2]; 2] {
        self.cov
    }

    pub fn enabled(&self) -> bool {
        self.enabled
    }

    pub fn with_enabled(mut self, enabled: bool) -> Self {
        self.enabled = enabled;
        self
    }

    /// Output power variance σ_tx² (0 when disabled).
    pub fn sigma_tx2(&self) -> f64 {
        if self.enabled {
            self.cov[0][0]
        } else {
            0.0
        }
    }

    /// Noise floor variance σ_rx² (0 when disabled).
    pub fn sigma_rx2(&self) -> f64 {
        if self.enabled {
            self.cov[1][1]
        } else {
            0.0
        }
    }

    /// Lower-triangular Cholesky factor of the covariance. Handles the
    /// semi-definite case.
    fn cholesky(&self) -> [[f64; 2]; 2] {
        let [[a, b], [_, d]] = self.cov;
        let l11 = a.sqrt();
        let l21 = if l11 > 0.0 { b / l11 } else { 0.0 };
        let l22 = (d - l21 * l21).max(0.0).sqrt();
        [[l11, 0.0], [l21, l22]]
    }
}

/// Actual output power and noise floor of one drawn radio (or, for a link,
/// the transmitter's power and the receiver's noise floor).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadioInstance {
    pub t_actual_dbm: f64,
    pub r_actual_dbm: f64,
}

impl RadioInstance {
    pub fn nominal(radio: &RadioModel) -> Self {
        Self {
            t_actual_dbm: radio.pt_dbm,
            r_actual_dbm: radio.pn_dbm,
        }
    }

    /// Hardware seen by the link `tx -> rx`.
    pub fn link(tx: &RadioInstance, rx: &RadioInstance) -> Self {
        Self {
            t_actual_dbm: tx.t_actual_dbm,
            r_actual_dbm: rx.r_actual_dbm,
        }
    }
}

/// Channel, radio and hardware parameters of one environment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeploymentScenario {
    pub name: String,
    pub channel: ChannelModel,
    pub radio: RadioModel,
    pub hardware: HardwareVariability,
}

impl DeploymentScenario {
    pub const PRESETS: [&'static str; 2] = ["indoor", "outdoor"];

    /// Indoor preset: η = 3, σ_ch = 3.8 dB.
    pub fn indoor() -> Self {
        Self::preset_with("indoor", 3.0, 3.8)
    }

    /// Outdoor preset: η = 4, σ_ch = 2 dB.
    pub fn outdoor() -> Self {
        Self::preset_with("outdoor", 4.0, 2.0)
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "indoor" => Ok(Self::indoor()),
            "outdoor" => Ok(Self::outdoor()),
            other => Err(Error::invalid(
                "preset",
                format!("unknown preset '{other}' (expected indoor or outdoor)"),
            )),
        }
    }

    // Shared defaults: PL(d0) = 55 dB at 1 m, 0 dBm output, -105 dBm noise,
    // 50-byte Manchester-encoded payload, measured hardware covariance.
    fn preset_with(name: &str, eta: f64, sigma_ch_db: f64) -> Self {
        Self {
            name: name.to_string(),
            channel: ChannelModel {
                pl_d0_db: 55.0,
                d0_m: 1.0,
                eta,
                sigma_ch_db,
            },
            radio: RadioModel::from_payload_bytes(0.0, -105.0, 50, Encoding::Manchester)
                .expect("preset radio is valid"),
            hardware: HardwareVariability::measured(),
        }
    }

    pub fn with_hardware_enabled(mut self, enabled: bool) -> Self {
        self.hardware = self.hardware.with_enabled(enabled);
        self
    }

    pub fn with_sigma_ch(mut self, sigma_ch_db: f64) -> Self {
        self.channel.sigma_ch_db = sigma_ch_db;
        self
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.channel.eta = eta;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.channel.validate()?;
        HardwareVariability::new(self.hardware.cov, self.hardware.enabled)?;
        Ok(())
    }

    /// σ_hw² = σ_tx² + σ_rx².
    pub fn sigma_hw2(&self) -> f64 {
        self.hardware.sigma_tx2() + self.hardware.sigma_rx2()
    }

    /// σ_t = sqrt(σ_hw² + σ_ch²), the total SNR spread.
    pub fn sigma_total(&self) -> f64 {
        (self.sigma_hw2() + self.channel.sigma_ch_db.powi(2)).sqrt()
    }
}

fn check_distance(d: f64) -> Result<()> {
    if d > 0.0 && d.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "distance",
            value: d,
        })
    }
}

/// Deterministic part of the log-normal path loss at distance `d` (m).
pub fn mean_path_loss(d: f64, channel: &ChannelModel) -> Result<f64> {
    check_distance(d)?;
    Ok(channel.pl_d0_db + 10.0 * channel.eta * (d / channel.d0_m).log10())
}

#[inline]
fn link_budget(t_dbm: f64, path_loss_db: f64, r_dbm: f64) -> f64 {
    t_dbm - path_loss_db - r_dbm
}

/// Mean SNR μ(d) in dB with nominal hardware.
pub fn snr_mean(d: f64, scenario: &DeploymentScenario) -> Result<f64> {
    let pl = mean_path_loss(d, &scenario.channel)?;
    Ok(link_budget(scenario.radio.pt_dbm, pl, scenario.radio.pn_dbm))
}

/// Draws one radio's actual output power and noise floor from the bivariate
/// Gaussian around the nominal values. Disabled variability returns the
/// nominal pair without touching `rng`.
pub fn draw_radio_hardware<R: Rng + ?Sized>(
    hw: &HardwareVariability,
    nominal: &RadioModel,
    rng: &mut R,
) -> RadioInstance {
    if !hw.enabled {
        return RadioInstance::nominal(nominal);
    }
    let [[l11, _], [l21, l22]] = hw.cholesky();
    let z1: f64 = rng.sample(StandardNormal);
    let z2: f64 = rng.sample(StandardNormal);
    RadioInstance {
        t_actual_dbm: nominal.pt_dbm + l11 * z1,
        r_actual_dbm: nominal.pn_dbm + l21 * z1 + l22 * z2,
    }
}

/// Draws a transmitter and a receiver independently and returns the pair of
/// values that matter for the link between them.
pub fn draw_link_hardware<R: Rng + ?Sized>(
    hw: &HardwareVariability,
    nominal: &RadioModel,
    rng: &mut R,
) -> RadioInstance {
    let tx = draw_radio_hardware(hw, nominal, rng);
    let rx = draw_radio_hardware(hw, nominal, rng);
    RadioInstance::link(&tx, &rx)
}

/// One SNR sample (dB) at distance `d`.
///
/// With `hw_instance` the hardware is held fixed and only shadowing is
/// drawn. Without it, a fresh transmitter/receiver pair is drawn per call,
/// so the sample is distributed as `N(μ(d), σ_t)`.
pub fn sample_snr<R: Rng + ?Sized>(
    d: f64,
    scenario: &DeploymentScenario,
    hw_instance: Option<&RadioInstance>,
    rng: &mut R,
) -> Result<f64> {
    let pl = mean_path_loss(d, &scenario.channel)?;
    let hw = match hw_instance {
        Some(inst) => *inst,
        None => draw_link_hardware(&scenario.hardware, &scenario.radio, rng),
    };
    let shadow: f64 = rng.sample(StandardNormal);
    Ok(link_budget(hw.t_actual_dbm, pl, hw.r_actual_dbm) + scenario.channel.sigma_ch_db * shadow)
}

/// Bit-error rate for a linear SNR.
pub fn bit_error_rate<M: BitErrorModel + ?Sized>(gamma_linear: f64, modulation: &M) -> Result<f64> {
    if !(gamma_linear >= 0.0) {
        return Err(Error::Domain {
            what: "SNR ratio",
            value: gamma_linear,
        });
    }
    Ok(modulation.ber(gamma_linear))
}

/// Frame reception probability `(1 − β)^f` for an SNR in dB.
pub fn packet_reception_rate<M: BitErrorModel + ?Sized>(gamma_db: f64, frame_bits: u32, modulation: &M) -> f64 {
    debug_assert!(frame_bits >= 1);
    let beta = modulation.ber(db_to_linear(gamma_db));
    let success = 1.0 - beta;
    if frame_bits <= i32::MAX as u32 {
        success.powi(frame_bits as i32)
    } else {
        success.powf(frame_bits as f64)
    }
}

/// Mean and variance of the reception probability at distance `d`, taken
/// over the SNR spread `N(μ(d), σ_t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrrMoments {
    pub mean: f64,
    pub variance: f64,
}

pub fn expected_prr(d: f64, scenario: &DeploymentScenario) -> Result<PrrMoments> {
    let mu = snr_mean(d, scenario)?;
    let sd = scenario.sigma_total();
    let f = scenario.radio.frame_bits();
    let m = &scenario.radio.modulation;
    let mean = gaussian_expectation(mu, sd, |g| packet_reception_rate(g, f, m));
    let second = gaussian_expectation(mu, sd, |g| packet_reception_rate(g, f, m).powi(2));
    Ok(PrrMoments {
        mean,
        variance: (second - mean * mean).max(0.0),
    })
}
