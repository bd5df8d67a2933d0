//! Decision procedures for quantum modal logic (QML).
//!
//! * [`formula`]: syntax, parsing, admissible sets and a canonical numbering
//!   of formulas.
//! * [`structure`]: finite quantum modal structures, orthocomplements and
//!   exhaustive enumeration.
//! * [`semantics`]: truth at worlds and sequent satisfaction.
//! * [`filtration`]: the collapse of a structure by an admissible set.
//! * [`calculus`]: the sequent calculus, forward saturation and an
//!   independent derivation checker.
//! * [`decision`]: proof search and countermodel search run side by side.
//! * [`cli`]: the `qml` command-line front end.

pub mod calculus;
pub mod cli;
pub mod decision;
pub mod filtration;
pub mod formula;
pub mod semantics;
pub mod structure;
