//! Simulation library for a measurement-assisted quantum Otto engine running
//! on a single trapped ion.
//!
//! The working medium couples an electronic qubit to one vibrational mode
//! truncated to two levels.  A cycle alternates four strokes: a dissipative
//! contact with a hot bath at fixed high field, a field ramp down, a
//! projective measurement of the electronic state that stands in for the cold
//! bath, and a field ramp back up.  The library integrates the master
//! equation for each stroke, books energy flows per stroke, and aggregates
//! cycle-level efficiencies including the thermodynamic cost of the
//! measurement reset.
//!
//! Layout:
//! - [`qcore`]: dense complex matrices, eigensolvers, density-matrix and
//!   entropy utilities for the 2- and 4-dimensional spaces used here.
//! - [`model`]: Hamiltonians, the field ramp, and the Lindblad generator.
//! - [`integrator`]: fixed-step RK4 propagation with accuracy monitoring.
//! - [`engine`]: strokes, cycles, energy bookkeeping, and multi-cycle runs.
//!
//! Units: `hbar = k_B = 1`; all energies are in units of the vibrational
//! quantum.

pub mod engine;
pub mod error;
pub mod integrator;
pub mod model;
pub mod qcore;

pub use error::{Error, Result};

pub use model::{
    adiabatic_time_bound, effective_temperature, h_full, h_system, EngineParams, FieldProfile,
    LindbladGenerator, RampSchedule,
};

pub use integrator::{convergence_order, evolve, EvolutionResult, StepPolicy};

pub use qcore::{
    expectation, gibbs_state, project_electronic_ground, relative_entropy, von_neumann_entropy,
    ComplexMatrix, DensityMatrix, MeasurementOutcome, StateLabel, Subsystem, C64,
};

pub use engine::{
    adiabatic_reference_state, curzon_ahlborn, initial_state, irr_work_energy, irr_work_entropy,
    run_cycle, run_cycles, stroke_heating, stroke_measurement, stroke_ramp, CycleRecord,
    MeasurementPolicy, MultiCycleReport, RampDirection, StrokeKind, StrokeRecord, StrokeTimes,
};
