//! `key = value` configuration files overriding the reference operating point.
//!
//! ```text
//! n_i = 32
//! p_dbw = 20
//! kappa = 0.1        # sets kappa_s and kappa_d
//! kappa_d = 0.05     # applied after kappa
//! ```

use std::path::Path;

use serde::Deserialize;

use crate::channel::Geometry;
use crate::error::{Error, Result};
use crate::model::units::db_to_linear;
use crate::model::SystemConfig;

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    pub n_s: Option<usize>,
    pub n_i: Option<usize>,
    pub p_dbw: Option<f64>,
    pub kappa: Option<f64>,
    pub kappa_s: Option<f64>,
    pub kappa_d: Option<f64>,
    pub sigma_n2_dbw: Option<f64>,
    pub d0: Option<f64>,
    pub pl0_db: Option<f64>,
    pub gamma_si: Option<f64>,
    pub gamma_id: Option<f64>,
    pub gamma_sd: Option<f64>,
    pub d_si: Option<f64>,
    pub d_v: Option<f64>,
    pub d_sd_h: Option<f64>,
}

impl ConfigOverrides {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Applies the overrides and validates the result.
    pub fn apply(&self, cfg: &SystemConfig, geo: &Geometry) -> Result<(SystemConfig, Geometry)> {
        let (mut cfg, mut geo) = (*cfg, *geo);
        if let Some(v) = self.n_s {
            cfg.n_s = v;
        }
        if let Some(v) = self.n_i {
            cfg.n_i = v;
        }
        if let Some(v) = self.p_dbw {
            cfg.p = db_to_linear(v);
        }
        if let Some(v) = self.kappa {
            cfg = cfg.with_kappa(v);
        }
        if let Some(v) = self.kappa_s {
            cfg.kappa_s = v;
        }
        if let Some(v) = self.kappa_d {
            cfg.kappa_d = v;
        }
        if let Some(v) = self.sigma_n2_dbw {
            cfg.sigma_n2 = db_to_linear(v);
        }
        let geo_fields = [
            (self.d0, &mut geo.d0),
            (self.pl0_db, &mut geo.pl0_db),
            (self.gamma_si, &mut geo.gamma_si),
            (self.gamma_id, &mut geo.gamma_id),
            (self.gamma_sd, &mut geo.gamma_sd),
            (self.d_si, &mut geo.d_si),
            (self.d_v, &mut geo.d_v),
            (self.d_sd_h, &mut geo.d_sd_h),
        ];
        for (v, field) in geo_fields {
            if let Some(v) = v {
                *field = v;
            }
        }
        Ok((cfg.validate()?, geo.validate()?))
    }
}
