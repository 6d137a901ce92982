//! Finite cylindric-type atom structures, atomic networks, pebble games on
//! networks and basis search.

pub mod atoms;
pub mod bases;
pub mod budget;
pub mod canon;
pub mod corpus;
pub mod frame;
pub mod fullset;
pub mod games;
pub mod graph;
pub mod hints;
pub mod network;
pub mod ra;
pub mod rainbow;
pub mod split;
pub mod term;
pub mod validate;

pub use atoms::{AtomId, SetOfAtoms};
pub use frame::{CaAtomStructure, ExplicitCa, StructureError};
pub use network::Network;
pub use rainbow::{Colour, ColouredGraph, RainbowFrame, RainbowSignature};
pub use validate::{validate_ca_frame, ValidationReport};
