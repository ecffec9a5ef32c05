//! Dynamic descriptive complexity workbench: quantifier-free dynamic
//! programs over changing finite structures, a compiler from semi-positive
//! existential sentences to insertion-only programs, and Ramsey-style
//! lower-bound constructions.

pub mod compiler;
pub mod demo;
pub mod engine;
pub mod io;
pub mod logic;
pub mod padding;
pub mod ramsey;
pub mod structure;

pub use engine::{DynamicProgram, ProgramState};
pub use structure::{Elem, ModKind, Modification, Schema, Structure};
