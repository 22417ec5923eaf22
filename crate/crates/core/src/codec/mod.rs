//! Block-based lossy compression used to compare transforms on images.

mod batch;
mod block;
mod image;
mod quality;

pub use batch::{batch_csv, batch_run, load_corpus, BatchRow, BATCH_CSV_HEADER};
pub use block::{
    compress_image, forward_block, inverse_block, truncate, zigzag_order, BlockTransform,
    CompressionConfig,
};
pub use image::GrayImage;
pub use quality::{psnr, ssim};
