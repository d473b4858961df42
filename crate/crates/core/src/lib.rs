//! Patch dissection: parses bug-fix diffs, measures them and tags the repair
//! actions and repair patterns they contain.

pub mod diff;
pub mod lcs;
pub mod text;
pub mod scan;
pub mod context;
pub mod metrics;
pub mod analysis;
pub mod actions;
pub mod patterns;
pub mod stats;
pub mod record;
pub mod corpus;
