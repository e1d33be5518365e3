//! Closed-form propagators and the lab-frame oracle integrator.

mod analytic;
pub(crate) use analytic::sin_over;
mod oracle;

pub use analytic::{
    u0_dqd, u0_dqd_full, u_chain_driven, u_chain_exchange, u_single_drive, u_two_drive,
};
pub use oracle::{
    frame_transform, propagate_lab, propagate_lab_interval, propagate_lab_trajectory, Method,
    PropagationConfig, MAX_PHASE_PER_STEP,
};
