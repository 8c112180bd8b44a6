//! Real-argument special functions.

mod erf;
mod gamma;
mod log_value;

pub use erf::{
    erf, erfc, erfcx, log_erfc, log_erfcx, log_normal_sf, normal_cdf, normal_hazard, normal_pdf,
    normal_sf,
};
pub use gamma::{
    log_gamma, log_reg_upper_gamma_q, log_scaled_upper_gamma, log_upper_gamma, reg_upper_gamma_q,
};
pub use log_value::LogValue;

pub(crate) use gamma::{log1pmx, stirling_correction, HALF_LN_2PI};
