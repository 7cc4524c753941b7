//! Episode persistence, standardization, fold planning, augmentation, and
//! sim/real mixing. Datasets are immutable after construction: every
//! operation returns a new value, so concurrent readers are safe.

mod csv;
mod dataset;
mod error;
mod folds;
mod io;
mod mix;
mod noise;

pub use csv::{import_episode_csv, import_external_dataset, parse_label_file};
pub use dataset::{ChannelStats, Dataset, STD_FLOOR};
pub use error::DataError;
pub use folds::{kfold_split, FoldPlan};
pub use io::{load_dataset, save_dataset, DATASET_MAGIC, DATASET_VERSION};
pub use mix::{mix_datasets, stiffness_from_force_displacement};
pub use noise::{add_gaussian_noise, NOISE_STD_ACCEL, NOISE_STD_GYRO};
