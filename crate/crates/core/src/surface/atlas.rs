use std::f64::consts::PI;

use super::CombSurface;
use crate::error::SurfaceError;
use crate::geometry::{check_psh, ComplexValue, DnPotential, Rect};

/// One polygonal component as a `D_n` chart. Slot `k` sits at the saddle
/// `exp(2 pi i k / n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub component: String,
    pub order: u32,
    pub slots: Vec<String>,
    potential: DnPotential,
}

impl Chart {
    pub fn potential(&self, z: ComplexValue) -> f64 {
        self.potential.eval(z)
    }

    pub fn saddle(&self, slot: usize) -> ComplexValue {
        ComplexValue::from_polar(1.0, 2.0 * PI * slot as f64 / self.order as f64)
    }
}

/// Identification of two chart neighbourhoods along an arc.
#[derive(Debug, Clone, PartialEq)]
pub struct Gluing {
    pub arc: String,
    pub from: (usize, usize),
    pub to: (usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteinAtlas {
    pub charts: Vec<Chart>,
    pub gluings: Vec<Gluing>,
}

impl SteinAtlas {
    /// Requires every component to be a disk; the chart order is its slot count.
    pub fn build(surface: &CombSurface, alpha: f64) -> Result<Self, SurfaceError> {
        let v = surface.validate();
        if !v.is_ok() {
            return Err(SurfaceError::Invalid(v.violations));
        }
        let mut charts = Vec::with_capacity(surface.components.len());
        for c in &surface.components {
            if c.genus != 0 || c.ends != 1 {
                return Err(SurfaceError::NotPolygonal(c.id.clone()));
            }
            let order = c.slots.len().max(1) as u32;
            charts.push(Chart {
                component: c.id.clone(),
                order,
                slots: c.slots.clone(),
                potential: DnPotential::new(order, alpha)?,
            });
        }
        let locate = |slot: &str| {
            charts.iter().enumerate().find_map(|(i, ch)| ch.slots.iter().position(|s| s == slot).map(|k| (i, k)))
        };
        let mut gluings = Vec::with_capacity(surface.arcs.len());
        for a in &surface.arcs {
            // validation guarantees both slots exist
            let from = locate(&a.slots[0]).expect("validated slot");
            let to = locate(&a.slots[1]).expect("validated slot");
            gluings.push(Gluing { arc: a.id.clone(), from, to });
        }
        Ok(SteinAtlas { charts, gluings })
    }

    /// Carries `z` near the `from` saddle to the other chart: rotate the saddle
    /// to 1, apply `z^{n} = 2 - w^{n'}` and rotate back.
    pub fn transport(&self, g: &Gluing, z: ComplexValue) -> ComplexValue {
        let (ci, ki) = g.from;
        let (ck, kk) = g.to;
        let (a, b) = (&self.charts[ci], &self.charts[ck]);
        let zeta = (z / a.saddle(ki)).powu(a.order);
        let w = (ComplexValue::new(2.0, 0.0) - zeta).powf(1.0 / b.order as f64);
        w * b.saddle(kk)
    }

    /// Smallest grid Laplacian of any chart potential over `rect`.
    pub fn min_laplacian(&self, rect: Rect, n: usize) -> Result<f64, SurfaceError> {
        let mut min = f64::INFINITY;
        for ch in &self.charts {
            let v = check_psh(|x, y| ch.potential(ComplexValue::new(x, y)), rect, n)?;
            min = min.min(v);
        }
        Ok(min)
    }
}
