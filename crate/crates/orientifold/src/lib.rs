//! Exact evaluation of unoriented surface holonomy from Čech-style local
//! data, with the supporting twisted group cohomology and descent tools.
//!
//! The crate is organised bottom-up:
//!
//! * [`phase`] — exact rational phases (angles mod 1) and dense complex
//!   unitaries;
//! * [`group`] — finite groups with an orientation character and index
//!   actions;
//! * [`cover`] — triangulated surfaces, orientation double covers, and the
//!   choice spaces holonomy is swept over.

pub mod cohomology;
pub mod cover;
pub mod data;
pub mod descent;
pub mod scene;
pub mod holonomy;
pub mod subdivide;
pub mod group;
pub mod phase;
