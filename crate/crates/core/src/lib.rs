//! Diagnostic evaluation for image captioning on abstract-shape scenes.
//!
//! Worlds are sampled and rendered, captions are generated from a small grammar, and
//! candidate captions are scored for grammaticality (they parse), truthfulness (their
//! logical form holds in the world) and diversity (distinct constructions relative to
//! the references), alongside BLEU-4 and a scene-tuple F1.

pub mod cli;
pub mod datapipeline;
mod fixed;
pub mod grammar;
pub mod metrics;
pub mod renderer;
pub mod semantics;
pub mod worldmodel;
