use std::fmt;

use super::{Dataset, DatasetError};

/// Dataset size counts and their ratios.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatasetStats {
    pub n_integral: u64,
    pub n_block: u64,
    pub n_image: u64,
    pub integral_per_block: f64,
    pub integral_per_image: f64,
    pub block_per_image: f64,
}

impl DatasetStats {
    pub fn from_counts(n_integral: u64, n_block: u64, n_image: u64) -> Result<Self, DatasetError> {
        if n_image == 0 || n_block == 0 {
            return Err(DatasetError::Empty);
        }
        Ok(DatasetStats {
            n_integral,
            n_block,
            n_image,
            integral_per_block: n_integral as f64 / n_block as f64,
            integral_per_image: n_integral as f64 / n_image as f64,
            block_per_image: n_block as f64 / n_image as f64,
        })
    }
}

impl fmt::Display for DatasetStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "integral: {}", self.n_integral)?;
        writeln!(f, "block: {}", self.n_block)?;
        writeln!(f, "image: {}", self.n_image)?;
        writeln!(f, "integral_per_block: {:.2}", self.integral_per_block)?;
        writeln!(f, "integral_per_image: {:.2}", self.integral_per_image)?;
        writeln!(f, "block_per_image: {:.2}", self.block_per_image)
    }
}

pub fn compute_stats(d: &Dataset) -> Result<DatasetStats, DatasetError> {
    let n_integral = d.images.iter().map(|i| i.units.len() as u64).sum();
    let n_block = d.images.iter().map(|i| i.blocks.len() as u64).sum();
    DatasetStats::from_counts(n_integral, n_block, d.images.len() as u64)
}
