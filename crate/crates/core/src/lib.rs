//! Planning of joint pursuer strategies for visibility-based pursuit-evasion
//! that stay valid when any single pursuer fails.

pub mod geometry;
pub mod oracle;
pub mod rspeg;
pub mod shadows;
pub mod fixtures;
pub mod sampling;
pub mod planner;
