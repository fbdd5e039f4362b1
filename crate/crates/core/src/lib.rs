//! Exact-rational engine for subjective expected utility on finite
//! decision problems.
//!
//! The crate covers preference checking against the classical postulates,
//! event orders and their agreement with probability measures, fitting
//! expected-utility representations, betting prices and Dutch books,
//! lottery scoring under expected utility and decision weights, Bayesian
//! conditioning, and a bisection protocol for eliciting betting prices.

pub mod axioms;
pub mod bayes;
pub mod coherence;
pub mod decision;
pub mod error;
pub mod lp;
pub mod measure;
pub mod order;
pub mod qualitative;
pub mod rational;
pub mod report;
pub mod representation;
pub mod scoring;
pub mod session;

pub use error::Error;
pub use rational::Rational;
