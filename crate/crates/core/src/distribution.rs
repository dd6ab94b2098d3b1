use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{MomentumGrid, PhysicalConstants, PositionGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DistributionKind {
    Wigner,
    SobutiNasiri,
}

impl DistributionKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            DistributionKind::Wigner => "wigner",
            DistributionKind::SobutiNasiri => "sobouti-nasiri",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "wigner" => Some(DistributionKind::Wigner),
            "sobouti-nasiri" | "sn" => Some(DistributionKind::SobutiNasiri),
            _ => None,
        }
    }
}

/// Complex values on the `q × p` grid; row `j` is `q_j`, column `k` is `p_k` (ascending).
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpaceDistribution {
    kind: DistributionKind,
    qgrid: PositionGrid,
    pgrid: MomentumGrid,
    values: Array2<Complex64>,
    constants: PhysicalConstants,
}

impl PhaseSpaceDistribution {
    pub fn new(
        kind: DistributionKind,
        qgrid: PositionGrid,
        constants: PhysicalConstants,
        values: Array2<Complex64>,
    ) -> Result<Self> {
        let n = qgrid.len();
        if values.dim() != (n, n) {
            return Err(Error::GridMismatch(format!(
                "values of shape {:?} for a {n}x{n} phase-space grid",
                values.dim()
            )));
        }
        Ok(Self {
            kind,
            qgrid,
            pgrid: MomentumGrid::new(&qgrid, &constants),
            values,
            constants,
        })
    }

    pub fn kind(&self) -> DistributionKind {
        self.kind
    }

    pub fn qgrid(&self) -> &PositionGrid {
        &self.qgrid
    }

    pub fn pgrid(&self) -> &MomentumGrid {
        &self.pgrid
    }

    pub fn constants(&self) -> &PhysicalConstants {
        &self.constants
    }

    pub fn values(&self) -> &Array2<Complex64> {
        &self.values
    }

    pub fn into_values(self) -> Array2<Complex64> {
        self.values
    }

    /// Cell area `Δq Δp`.
    pub fn cell(&self) -> f64 {
        self.qgrid.spacing() * self.pgrid.spacing()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            values: self.values.mapv(|z| z * factor),
            ..self.clone()
        }
    }

    pub fn with_values(&self, values: Array2<Complex64>) -> Self {
        assert_eq!(values.dim(), self.values.dim());
        Self { values, ..self.clone() }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.values.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    /// `max|Im P| / max|P|`, the quantity bounded by the Wigner reality invariant.
    pub fn relative_imag(&self) -> f64 {
        let m = self.max_abs();
        if m == 0.0 {
            0.0
        } else {
            self.max_abs_imag() / m
        }
    }

    /// Value at the grid sample nearest to `(q, p)`.
    pub fn value_near(&self, q: f64, p: f64) -> Option<Complex64> {
        let j = self.qgrid.nearest_index(q)?;
        let k = self.pgrid.nearest_index(p)?;
        Some(self.values[[j, k]])
    }

    pub fn max_distance(&self, other: &PhaseSpaceDistribution) -> f64 {
        self.values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn same_grid(&self, other: &PhaseSpaceDistribution) -> bool {
        self.qgrid == other.qgrid && self.constants == other.constants
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarginalAxis {
    Position,
    Momentum,
}

/// A one-dimensional probability density on either grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalVector {
    pub axis: MarginalAxis,
    pub points: Vec<f64>,
    pub spacing: f64,
    pub values: Vec<f64>,
    /// Largest imaginary part discarded when the marginal was formed.
    pub imag_residual: f64,
}

impl MarginalVector {
    pub fn total(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.spacing
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_distance(&self, other: &MarginalVector) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_distance_to(&self, reference: &[f64]) -> f64 {
        self.values
            .iter()
            .zip(reference)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}
