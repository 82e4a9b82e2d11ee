//! Evolutionary synthesis of generalized planners for typed-STRIPS PDDL
//! domains, with a built-in optimal search baseline and IPC-style scoring.

pub mod benchmark;
pub mod evolution;
pub mod llm;
pub mod par;
pub mod pddl;
pub mod sandbox;
pub mod search;
