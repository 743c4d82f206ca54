pub mod arith;
pub mod cli;
pub mod envelope;
pub mod gaudin;
pub mod holonomy;
pub mod liealg;
pub mod moduli;
pub mod reps;
pub mod spectra;
