//! Trainers for the GSP and GEO objectives, with snapshot evaluation.

mod config;
mod fit;
mod models;
mod snapshot;
mod trainer;

pub use config::{BetaKind, Scaling, Task, TrainConfig};
pub use fit::{fit_geo_discriminator, fit_gsp_discriminator, DiscriminatorFit};
pub use models::{
    default_geo_discriminator, default_geo_pair, default_gsp_discriminator, default_gsp_pair, default_model,
    default_ratio_hidden,
};
pub use snapshot::{
    checkpoint_id, evaluate_snapshot, snapshot_header, snapshot_record, Snapshot, SnapshotWriter, Split,
};
pub use trainer::{
    prepare_beta, train_erm, train_geo, train_geo_with_beta, train_gsp, NoObserver, Observer, Player, TrainResult,
};
