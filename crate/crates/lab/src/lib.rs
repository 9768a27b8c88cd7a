//! Experiment runner around `nonexp-core`: game files, configuration,
//! presets and CSV/JSON artifacts.

pub mod config;
pub mod error;
pub mod game_io;
pub mod output;
pub mod presets;
pub mod run;

pub use config::{ExperimentConfig, Task};
pub use error::{LabError, Result};
pub use run::{run, Outcome};
