//! JSON storage of bodies by their coefficients.
//!
//! Index order of `coefficients`: in the plane `[a0, a1, b1, a2, b2, ...]`
//! for `h = a0 + sum a_k cos k theta + b_k sin k theta`; in space the real
//! spherical harmonic `Y_lm` sits at `l^2 + l + m`, so degrees ascend and
//! `m` runs from `-l` to `l`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::body::ConvexBody;
use crate::error::{GeometryError, Result};
use crate::sphere::{Coefficients, SphereGrid};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    Fourier,
    RealSphericalHarmonics,
}

impl Representation {
    pub fn for_dim(dim: usize) -> Result<Self> {
        match dim {
            2 => Ok(Representation::Fourier),
            3 => Ok(Representation::RealSphericalHarmonics),
            d => Err(GeometryError::UnsupportedDimension(d)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodyFile {
    pub format_version: u32,
    pub dimension: usize,
    pub representation: Representation,
    pub coefficients: Vec<f64>,
    #[serde(default)]
    pub metadata: BTreeMap<String, serde_json::Value>,
}

impl BodyFile {
    pub fn from_body(k: &ConvexBody, metadata: BTreeMap<String, serde_json::Value>) -> Result<Self> {
        Ok(BodyFile {
            format_version: FORMAT_VERSION,
            dimension: k.dim(),
            representation: Representation::for_dim(k.dim())?,
            coefficients: k.coefficients().values().to_vec(),
            metadata,
        })
    }

    pub fn coefficients(&self) -> Result<Coefficients> {
        if self.format_version != FORMAT_VERSION {
            return Err(GeometryError::InvalidParameter(format!(
                "unsupported format_version {}",
                self.format_version
            )));
        }
        if Representation::for_dim(self.dimension)? != self.representation {
            return Err(GeometryError::InvalidParameter(format!(
                "representation {:?} does not match dimension {}",
                self.representation, self.dimension
            )));
        }
        Coefficients::from_vec(self.dimension, self.coefficients.clone())
    }

    /// Validates the stored body on `grid`, or on the default grid.
    pub fn body(&self, grid: Option<Arc<SphereGrid>>) -> Result<ConvexBody> {
        let c = self.coefficients()?;
        match grid {
            Some(g) => {
                if g.dim() != self.dimension {
                    return Err(GeometryError::WrongDimension { expected: self.dimension, found: g.dim() });
                }
                ConvexBody::on_grid(g, c)
            }
            None => ConvexBody::from_coefficients(c),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("body files serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| GeometryError::InvalidParameter(format!("body file: {e}")))
    }
}
