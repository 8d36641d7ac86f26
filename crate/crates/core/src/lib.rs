pub mod cli;
pub mod error;
pub mod fci;
pub mod hamiltonian;
pub mod linalg;
pub mod rdm;
pub mod sdp;
pub mod shadow;
