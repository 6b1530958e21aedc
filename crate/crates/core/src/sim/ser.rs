//! Symbol-level Monte-Carlo of the impaired link with QPSK.

use std::f64::consts::FRAC_1_SQRT_2;

use rand::Rng;

use crate::channel::sample_cn;
use crate::model::{ChannelSet, ReflectConfig, SystemConfig};
use crate::txbf::TransmitBeam;
use crate::{CVector, C64};

/// Error rate of guessing uniformly among four symbols.
pub const RANDOM_GUESS_SER: f64 = 0.75;

/// One transmitted symbol and the noise terms it met.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolTransmission {
    pub x: C64,
    pub z_s: CVector,
    pub z_d: C64,
    pub n: C64,
    /// Received signal before receive distortion.
    pub y_tilde: C64,
    pub y: C64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SerOutcome {
    pub ser: f64,
    pub errors: usize,
    pub symbols: usize,
    /// The effective gain `v^H w` was zero; `ser` is the random-guess value.
    pub degenerate: bool,
}

fn qpsk<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re = if rng.random::<bool>() {
        FRAC_1_SQRT_2
    } else {
        -FRAC_1_SQRT_2
    };
    let im = if rng.random::<bool>() {
        FRAC_1_SQRT_2
    } else {
        -FRAC_1_SQRT_2
    };
    C64::new(re, im)
}

/// Nearest QPSK point.
pub fn decide(z: C64) -> C64 {
    C64::new(
        if z.re >= 0.0 { FRAC_1_SQRT_2 } else { -FRAC_1_SQRT_2 },
        if z.im >= 0.0 { FRAC_1_SQRT_2 } else { -FRAC_1_SQRT_2 },
    )
}

/// Second moment of the received signal before receive distortion,
/// `|v^H w|^2 + ks sum_i |v_i|^2 |w_i|^2 + sigma^2`.
pub fn received_power(w: &TransmitBeam, v: &CVector, cfg: &SystemConfig) -> f64 {
    let w = w.vector();
    let per_antenna: f64 = v.iter().zip(w.iter()).map(|(a, b)| a.norm_sqr() * b.norm_sqr()).sum();
    v.dotc(w).norm_sqr() + cfg.kappa_s * per_antenna + cfg.sigma_n2
}

/// Sends one symbol over composite channel `v`. The receive distortion
/// variance is `kd` times the analytic second moment, not the instantaneous
/// power of this symbol.
pub fn transmit_symbol<R: Rng + ?Sized>(
    w: &TransmitBeam,
    v: &CVector,
    cfg: &SystemConfig,
    rng: &mut R,
) -> SymbolTransmission {
    let x = qpsk(rng);
    let z_s = CVector::from_iterator(
        w.vector().len(),
        w.vector().iter().map(|wi| sample_cn(rng, cfg.kappa_s * wi.norm_sqr())),
    );
    let n = sample_cn(rng, cfg.sigma_n2);
    let z_d = sample_cn(rng, cfg.kappa_d * received_power(w, v, cfg));
    let t = w.vector() * x + &z_s;
    let y_tilde = v.dotc(&t) + n;
    SymbolTransmission {
        x,
        z_s,
        z_d,
        n,
        y_tilde,
        y: y_tilde + z_d,
    }
}

/// Fraction of `n_symbols` QPSK symbols decided wrongly after zero-forcing
/// equalization by `v^H w`.
pub fn simulate_ser<R: Rng + ?Sized>(
    w: &TransmitBeam,
    theta: Option<&ReflectConfig>,
    ch: &ChannelSet,
    cfg: &SystemConfig,
    n_symbols: usize,
    rng: &mut R,
) -> SerOutcome {
    let v = ch.effective_channel(theta);
    let gain = v.dotc(w.vector());
    if gain.norm_sqr() == 0.0 || n_symbols == 0 {
        return SerOutcome {
            ser: RANDOM_GUESS_SER,
            errors: 0,
            symbols: n_symbols,
            degenerate: gain.norm_sqr() == 0.0,
        };
    }
    let mut errors = 0;
    for _ in 0..n_symbols {
        let s = transmit_symbol(w, &v, cfg, rng);
        if decide(s.y / gain) != s.x {
            errors += 1;
        }
    }
    SerOutcome {
        ser: errors as f64 / n_symbols as f64,
        errors,
        symbols: n_symbols,
        degenerate: false,
    }
}
