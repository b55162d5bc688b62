//! In-memory dataset: an N×p feature matrix with optional labels.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone)]
pub struct Dataset {
    /// Row i is sample x_i.
    pub features: DMatrix<f64>,
    pub labels: Option<DVector<f64>>,
}

impl Dataset {
    pub fn new(features: DMatrix<f64>, labels: Option<DVector<f64>>) -> Result<Self> {
        if features.nrows() == 0 || features.ncols() == 0 {
            return Err(Error::invalid("dataset requires N >= 1 and p >= 1"));
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("dataset features must all be finite"));
        }
        if let Some(y) = &labels {
            if y.len() != features.nrows() {
                return Err(Error::invalid("label length must match N"));
            }
        }
        Ok(Dataset { features, labels })
    }

    pub fn n(&self) -> usize {
        self.features.nrows()
    }

    pub fn p(&self) -> usize {
        self.features.ncols()
    }

    /// Checks labels are in {+1, -1}, as classification kernels require.
    pub fn validate_binary_labels(&self) -> Result<()> {
        match &self.labels {
            None => Err(Error::invalid("dataset has no labels")),
            Some(y) => {
                for (i, &v) in y.iter().enumerate() {
                    if v != 1.0 && v != -1.0 {
                        return Err(Error::Data {
                            row: i,
                            column: "label".into(),
                            message: format!("binary label must be +1 or -1, got {v}"),
                        });
                    }
                }
                Ok(())
            }
        }
    }
}
