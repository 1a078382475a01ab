//! Deployment scenario files.
//!
//! A scenario is a flat TOML table:
//!
//! ```toml
//! pl_d0_db = 55.0
//! d0_m = 1.0
//! eta = 3.0
//! sigma_ch_db = 3.8
//! pt_dbm = 0.0
//! pn_dbm = -105.0
//! payload_bytes = 50
//! encoding = "manchester"    # or "none"
//! hw_enabled = true
//! hw_cov = [[6.0, -3.3], [-3.3, 3.7]]
//! ```
//!
//! Every key is optional when the table is applied over a preset. Without a
//! preset the channel and radio keys are required.

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelModel, DeploymentScenario, Encoding, HardwareVariability, Modulation, RadioModel};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeploymentSpec {
    pub name: Option<String>,
    pub pl_d0_db: Option<f64>,
    pub d0_m: Option<f64>,
    pub eta: Option<f64>,
    pub sigma_ch_db: Option<f64>,
    pub pt_dbm: Option<f64>,
    pub pn_dbm: Option<f64>,
    pub payload_bytes: Option<u32>,
    pub encoding: Option<String>,
    pub hw_enabled: Option<bool>,
    pub hw_cov: Option<[[f64; 2]; 2]>,
}

impl DeploymentSpec {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.message().to_string()))
    }

    /// Builds a scenario from these overrides, falling back to `base` for any
    /// key left unset.
    pub fn resolve(&self, base: Option<&DeploymentScenario>) -> Result<DeploymentScenario> {
        fn pick<T: Copy>(v: Option<T>, fallback: Option<T>, key: &str) -> Result<T> {
            v.or(fallback).ok_or_else(|| Error::MissingField(key.to_string()))
        }
        let ch = base.map(|b| b.channel);
        let radio = base.map(|b| b.radio);

        let channel = ChannelModel::new(
            pick(self.pl_d0_db, ch.map(|c| c.pl_d0_db), "pl_d0_db")?,
            pick(self.d0_m, ch.map(|c| c.d0_m), "d0_m")?,
            pick(self.eta, ch.map(|c| c.eta), "eta")?,
            pick(self.sigma_ch_db, ch.map(|c| c.sigma_ch_db), "sigma_ch_db")?,
        )?;

        let encoding = match &self.encoding {
            Some(e) => e.parse()?,
            None => radio.map(|r| r.encoding()).unwrap_or_default(),
        };
        let raw_bits = match (self.payload_bytes, radio) {
            (Some(bytes), _) => bytes
                .checked_mul(8)
                .ok_or_else(|| Error::invalid("payload_bytes", "frame too large"))?,
            (None, Some(r)) => r.frame_bits() / r.encoding().encoded_bits(1),
            (None, None) => return Err(Error::MissingField("payload_bytes".into())),
        };
        let radio = RadioModel::from_raw_bits(
            pick(self.pt_dbm, radio.map(|r| r.pt_dbm), "pt_dbm")?,
            pick(self.pn_dbm, radio.map(|r| r.pn_dbm), "pn_dbm")?,
            raw_bits,
            encoding,
            Modulation::Ncfsk,
        )?;

        let base_hw = base.map(|b| b.hardware).unwrap_or_else(HardwareVariability::disabled);
        let hardware = HardwareVariability::new(
            self.hw_cov.unwrap_or(base_hw.cov()),
            self.hw_enabled.unwrap_or(base_hw.enabled()),
        )?;

        let name = self
            .name
            .clone()
            .or_else(|| base.map(|b| b.name.clone()))
            .unwrap_or_else(|| "custom".to_string());
        Ok(DeploymentScenario {
            name,
            channel,
            radio,
            hardware,
        })
    }
}

impl DeploymentScenario {
    /// Parses a complete scenario file (no preset fallback).
    pub fn from_toml_str(s: &str) -> Result<Self> {
        DeploymentSpec::from_toml_str(s)?.resolve(None)
    }

    pub fn to_spec(&self) -> DeploymentSpec {
        DeploymentSpec {
            name: Some(self.name.clone()),
            pl_d0_db: Some(self.channel.pl_d0_db),
            d0_m: Some(self.channel.d0_m),
            eta: Some(self.channel.eta),
            sigma_ch_db: Some(self.channel.sigma_ch_db),
            pt_dbm: Some(self.radio.pt_dbm),
            pn_dbm: Some(self.radio.pn_dbm),
            payload_bytes: Some(self.radio.frame_bits() / self.radio.encoding().encoded_bits(1) / 8),
            encoding: Some(
                match self.radio.encoding() {
                    Encoding::None => "none",
                    Encoding::Manchester => "manchester",
                }
                .to_string(),
            ),
            hw_enabled: Some(self.hardware.enabled()),
            hw_cov: Some(self.hardware.cov()),
        }
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(&self.to_spec()).expect("scenario serializes")
    }
}
