//! BAR-Nash equilibrium checkers for finite symmetric games, and an analytic
//! and simulated model of incentives in quorum-based block endorsement.

pub mod endorsement;
pub mod game;
pub mod simulator;
