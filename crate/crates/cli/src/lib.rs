//! Command-line front end for `quadtower`: triple verification, bounded
//! searches, and inspection of quadratic and multiquadratic fields, with a
//! persistent invariant cache.

pub mod app;
pub mod cache;

pub use app::{run, Format, Outcome};
pub use cache::{CacheEntry, CachedStore, Kind};
