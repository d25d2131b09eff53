//! Fixtures, scenes and the experiment protocol used by the CLI and the
//! runnable examples.

pub mod experiment;
pub mod fixture;
pub mod scene;

pub use experiment::{
    animate, run_experiment, run_oracle_check, write_csv, Experiment, ExperimentRecord,
    MissedContact, OracleReport, RecordWriter, CSV_COLUMNS, DEFAULT_REPEATS, ORACLE_MAX_SEGMENTS,
};
pub use fixture::{
    generate_fixture, generate_fixture_scaled, FixtureKind, FixtureSpec, FIXTURE_RADIUS,
};
pub use scene::{ContourSource, ObjectSpec, Scene, SceneFile};
