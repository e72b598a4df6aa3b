//! Grid topology, integer homology, and Runge-pair decisions for
//! conjugation-symmetric planar domains and their quaternionic rotations.

pub mod corpus;
pub mod domain;
pub mod homology;
pub mod intmat;
pub mod planar;
pub mod quat;
pub mod runge;
pub mod stem;
pub mod svg;
