//! SearchExpert: search-plan compilation and orchestration.
//!
//! The crate turns natural-language DAG search plans into executable,
//! measurable artifacts:
//!
//! - [`plan`] — grammar, validation, canonical serialization, DOT rendering,
//!   and token accounting for search plans.
//! - [`gateway`] — chat-completion clients (HTTP and deterministic mock),
//!   the prompt-template catalog, judge-score parsing, caching, rate limiting.
//! - [`exec`] — dependency-aware plan execution against pluggable search
//!   sources and response synthesis.
//! - [`reward`] — search-feedback reward: similarity and intrinsic judging,
//!   weighted geometric-mean combination, log-odds transform.
//! - [`pipeline`] — automated SFTS dataset construction and RLSF episode
//!   collection as resumable JSONL jobs.
//! - [`bench`] — benchmark construction, multiple-choice evaluation, and the
//!   weighted human-evaluation rubric.
//! - [`media`] — image captioning for query enrichment and figure generation
//!   client contracts.
//! - [`cli`] — the `searchexpert` command-line entry point.
//!
//! Start with the runnable examples (`cargo run --example parse_and_render`)
//! for a tour of each capability.

pub mod bench;
pub mod cli;
pub mod config;
pub mod exec;
pub mod gateway;
pub mod media;
pub mod pipeline;
pub mod plan;
pub mod reward;
pub mod util;
