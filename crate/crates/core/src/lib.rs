//! The fine hierarchy of k-partitions at desk scale.
//!
//! The crate is organised bottom-up:
//!
//! * [`ordinals`] — Cantor-normal-form ordinals below ε₀ used to name levels.
//! * [`trees`] — iterated labeled trees and the h-preorder.
//! * [`spaces`] — finite Alexandrov spaces and depth-bounded cylinder spaces.
//! * [`families`] — T-families, tilde components, reduction and determination.
//! * [`hierarchy`] — level membership Σ(X, T), witness search and non-collapse.
//! * [`category`] — Baire category on finite posets and level preservation.
//! * [`hausdorff`] — extraction of a tree family from a mind-change machine.
//! * [`cli`] — the command-line front end behind the `finehier` binary.

pub mod category;
pub mod cli;
pub mod families;
pub mod hausdorff;
pub mod hierarchy;
pub mod ordinals;
pub mod spaces;
pub mod trees;
