pub mod amplitudes;
pub mod audit;
pub mod evolve;
pub mod fig3;
pub mod scan;
