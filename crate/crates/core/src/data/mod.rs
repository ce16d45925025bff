//! File formats: datasets, images, saved models and result files.

pub mod dataset;
pub mod model;
pub mod ppm;
pub mod results;
pub mod synthetic;

pub use dataset::{
    load_delimited, load_delimited_dataset, load_manifest, load_split_files, DelimitedSchema, Manifest, ManifestLayout,
    Series, TimeSeriesDataset,
};
pub use model::{load_model, save_model, ModelFile, MODEL_FORMAT_VERSION};
pub use ppm::{bundled_patches, encode_ppm, load_ppm, parse_ppm, ImagePatch};
pub use results::{read_results, write_results, ResultFormat};
