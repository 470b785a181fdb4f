pub mod error;
pub mod num_core;
pub mod spectral;
pub mod averagers;
pub mod limits;
pub mod measure_model;
pub mod furstenberg;
pub mod dynamics;
pub mod experiments;

pub use error::{Error, Result};

pub use averagers::{
    adjoint_average, diagonal_average, entangled_average, entangled_average_oracle,
    mean_ergodic_average, power_chain_average, AverageMode, AverageResult, AverageValue,
    OperatorChain,
};
pub use experiments::{
    describe, emit_csv, run_experiment, ConvergenceReport, ExperimentConfig, ExperimentKind,
    ReportRow,
};
pub use limits::{
    cesaro_error_bound, conditional_expectation, entangled_limit, mean_ergodic_limit,
    power_chain_limit, DirichletMean,
};
pub use num_core::{haar_unitary, ComplexMatrix, ComplexVector};
pub use spectral::{Partition, SlotPattern, SpectralPoint, UnitaryOperator};
