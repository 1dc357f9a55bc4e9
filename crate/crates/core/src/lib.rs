//! Systems of equations over groups.
//!
//! Equations `v(x₁,…,xₘ) = 1` are words in unknowns and coefficient atoms.
//! Over finite groups the library counts solutions exactly, checks the
//! classical divisibility theorems (Solomon's theorem, the
//! Gordon–Rodríguez-Villegas theorem and its centralizer form), and
//! partitions solution sets into similarity classes of size `|H|`. Over the matrix groups SL₂, GL₂ and tori it encodes
//! the solution variety as a polynomial ideal and computes its dimension with
//! a Gröbner basis, checking the dimension lower bounds for that setting.

pub mod eqlang;
pub mod fingroup;
pub mod geomdim;
pub mod poly;
pub mod simclass;
pub mod solvecount;
pub mod verify;
pub mod word;
pub mod zlinalg;
