use serde::{Deserialize, Serialize};

use super::ConfidenceGrid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisProjection {
    pub name: String,
    /// Smallest/largest accepted coordinate; `None` for an empty set.
    pub min: Option<f64>,
    pub max: Option<f64>,
    /// Smallest/largest lattice coordinate.
    pub axis_min: f64,
    pub axis_max: f64,
}

/// Share of accepted points among lattice points with each axis value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalProfile {
    pub name: String,
    pub values: Vec<f64>,
    pub accepted_fraction: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetSummary {
    pub level: f64,
    pub variant: String,
    /// Counts over the lattice only; extra points are listed separately.
    pub accepted: usize,
    pub total: usize,
    pub accepted_fraction: f64,
    pub errors: usize,
    pub projections: Vec<AxisProjection>,
    pub profiles: Vec<MarginalProfile>,
    pub extra_points: Vec<(Vec<f64>, bool)>,
}

pub fn set_summary(g: &ConfidenceGrid) -> SetSummary {
    let lattice = g.lattice();
    let accepted = lattice.iter().filter(|p| p.accept).count();
    let total = lattice.len();
    let errors = g.points.iter().filter(|p| p.error.is_some()).count();

    let mut projections = Vec::new();
    let mut profiles = Vec::new();
    for (k, axis) in g.spec.axes.iter().enumerate() {
        let values = axis.values().unwrap_or_default();
        let acc: Vec<f64> = lattice.iter().filter(|p| p.accept).map(|p| p.coords[k]).collect();
        projections.push(AxisProjection {
            name: axis.name.clone(),
            min: acc.iter().copied().reduce(f64::min),
            max: acc.iter().copied().reduce(f64::max),
            axis_min: values.first().copied().unwrap_or(f64::NAN),
            axis_max: values.last().copied().unwrap_or(f64::NAN),
        });
        // lattice is row-major, so the axis index of point i is (i / stride) % n
        let stride: usize = g.spec.axes[k + 1..].iter().map(|a| a.points).product();
        let n = axis.points;
        let mut hits = vec![0usize; n];
        let mut counts = vec![0usize; n];
        for (i, p) in lattice.iter().enumerate() {
            let j = (i / stride) % n;
            counts[j] += 1;
            hits[j] += p.accept as usize;
        }
        let accepted_fraction = hits.iter().zip(&counts).map(|(&h, &c)| if c > 0 { h as f64 / c as f64 } else { 0.0 }).collect();
        profiles.push(MarginalProfile { name: axis.name.clone(), values, accepted_fraction });
    }

    SetSummary {
        level: g.level,
        variant: g.variant.clone(),
        accepted,
        total,
        accepted_fraction: if total > 0 { accepted as f64 / total as f64 } else { 0.0 },
        errors,
        projections,
        profiles,
        extra_points: g.extras().iter().map(|p| (p.coords.clone(), p.accept)).collect(),
    }
}
