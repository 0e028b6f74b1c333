//! A lossless multichannel audio codec built around short-frame linear
//! prediction, optional SVD projection of the residual block, and Rice
//! entropy coding. Streams can pack several renderings (mixes) of the same
//! content and predict each mix from the decoded one below it, so a 5.0
//! upmix is reconstructed hierarchically from a jointly stored 2.0 downmix.

pub mod bits;
pub mod block;
pub mod codec;
pub mod container;
pub mod error;
pub mod predictor;
pub mod rice;
pub mod solver;
pub mod transform;
pub mod wav;

pub use block::{
    compression_ratio, itu_downmix_5to2, normalize, round_half_away, BlockView, ChannelLayout,
    MixPair, SampleBlock,
};
pub use codec::{ChunkStats, MixConfig, DEFAULT_FRAME_SIZE};
pub use container::{
    decode_container, encode_container, encode_container_with_stats, inspect_mix, measure,
    ConfigMeasurement, ContainerHeader, MeasureParams, MixDescriptor, MEASURE_CONFIG_NAMES,
};
pub use error::{Error, Result};
pub use predictor::ResidualBlock;
pub use rice::RiceParam;
pub use solver::{CoefficientSet, ModelKind, ModelSpec, DEFAULT_DELTA, DEFAULT_ORDER};
pub use transform::ProjectionMatrix;
pub use wav::{read_wav, write_wav, WavInfo};
