//! Numerical side: integration of the evolution equation, radial gauge
//! fixing, energies and Laurent fitting.

pub mod energy;
pub mod evolve;
pub mod fit;
pub mod gauge;
pub mod quadrature;

pub use energy::{boundary_cs_density, chern_simons, collar_energy, energy_report, EnergyReport};
pub use evolve::{evolve, evolve_remainder, MetricModel, StepControl, Trajectory};
pub use fit::{laurent_fit, LaurentFit};
pub use gauge::{apply_gauge, radial_gauge_fix, GaugeJet};
