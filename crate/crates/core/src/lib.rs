//! Open-system entanglement dynamics of a two-parameter qubit⊗qutrit state
//! family: Kraus noise channels, negativity, coherence and
//! entanglement-sudden-death thresholds, each cross-checked against closed
//! forms.

pub mod channels;
pub mod esd;
pub mod evolution;
pub mod linalg;
pub mod negativity;
pub mod states;
pub mod sweep;
pub mod validation;

pub use channels::{ChannelKind, KrausChannel, NoiseStrength, Side};
pub use esd::{
    classify_table1, esd_gamma, esd_report, reproduce_table1, Classification, EsdReport, EsdTable,
};
pub use evolution::{
    analytic_evolved, coherence_l1, evolve, ChannelScenario, Mode, NoiseSetting, Transcription,
};
pub use linalg::{ComplexMatrix, Spectrum};
pub use negativity::{negativity_analytic, negativity_numeric, NegativityResult};
pub use states::{initial_state, DensityMatrix, StateParams};
pub use sweep::{run_sweep, GammaGrid, SweepConfig, SweepResult, SweepRow};
pub use validation::{run_validation, ValidationReport};
