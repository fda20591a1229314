//! Social-sensing toolkit: information diffusion on networks, Bayesian social
//! learning on information-flow DAGs, and revealed-preference analysis.
//!
//! The crate is organized around three pillars:
//!
//! * **Diffusion** — [`network`] holds graph generation and degree statistics,
//!   [`diffusion`] runs agent-level susceptible-infected-susceptible dynamics
//!   and the matching mean-field difference equation, [`sampling`] estimates
//!   node-state distributions (uniform, social, and respondent-driven
//!   sampling), and [`timeseries`] fits ARX models that relate an infection
//!   series to an observed sensor series.
//! * **Social learning** — [`social_learning`] implements the sequential
//!   protocol (private belief, myopic action, public-belief filter, cascade
//!   detection) and the structural checks for monotone decision making;
//!   [`incest`] adds information-flow DAG machinery and the fair-rating
//!   algorithm that removes double counting from reputation systems.
//! * **Revealed preferences** — [`revealed_prefs`] tests datasets for utility
//!   maximization (GARP and the Afriat inequalities) and for Nash rationality
//!   in concave potential games, reconstructs utility/potential functions,
//!   and predicts responses; [`lp`] is the dense linear-programming core
//!   backing those tests.
//!
//! All randomized routines take explicit seeds and are deterministic given
//! the seed; see [`rng`].

pub mod diffusion;
pub mod incest;
pub mod io;
pub mod lp;
pub mod network;
pub mod revealed_prefs;
pub mod rng;
pub mod sampling;
pub mod social_learning;
pub mod timeseries;

pub(crate) mod linalg;
