//! Radially symmetric two-phase fields and the radial model state.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridFamily, RadialGrid};

/// Nodal values of one phase on its own grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseProfile {
    grid: RadialGrid,
    values: Vec<f64>,
}

impl PhaseProfile {
    pub fn new(grid: RadialGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidState(format!("{} values for a grid of {} nodes", values.len(), grid.len())));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidState(format!("non-finite value {v}")));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: RadialGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn nodes(&self) -> &[f64] {
        self.grid.nodes()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `sum_i w_i g(r_i, c_i)` with the grid's area weights.
    pub fn integrate(&self, g: impl Fn(f64, f64) -> f64) -> f64 {
        self.grid.area_weights().iter().zip(self.grid.nodes()).zip(&self.values).map(|((w, &r), &c)| w * g(r, c)).sum()
    }

    pub fn derivative(&self) -> Vec<f64> {
        self.grid.derivative(&self.values)
    }

    pub fn first(&self) -> f64 {
        self.values[0]
    }

    pub fn last(&self) -> f64 {
        self.values[self.values.len() - 1]
    }
}

/// A scalar field on the disk `r < R` and the annulus `R < r < R_C`, with
/// independent traces on either side of `r = R`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPhaseRadialField {
    inner: PhaseProfile,
    outer: PhaseProfile,
}

impl TwoPhaseRadialField {
    pub fn new(inner: PhaseProfile, outer: PhaseProfile) -> Result<Self> {
        let radius = inner.grid.end();
        let tol = 1e-12 * radius.max(1.0);
        let starts_at_centre = inner.grid.family() == GridFamily::PolarParity || inner.grid.start() == 0.0;
        if !starts_at_centre {
            return Err(Error::InvalidGrid(format!(
                "inner grid must start at r = 0, starts at {}",
                inner.grid.start()
            )));
        }
        if (outer.grid.start() - radius).abs() > tol {
            return Err(Error::InvalidGrid(format!(
                "inner grid ends at {radius} but outer grid starts at {}",
                outer.grid.start()
            )));
        }
        Ok(Self { inner, outer })
    }

    pub fn inner(&self) -> &PhaseProfile {
        &self.inner
    }

    pub fn outer(&self) -> &PhaseProfile {
        &self.outer
    }

    pub fn radius(&self) -> f64 {
        self.inner.grid.end()
    }

    pub fn container_radius(&self) -> f64 {
        self.outer.grid.end()
    }

    /// Inner trace minus outer trace at the interface.
    pub fn jump(&self) -> f64 {
        self.inner.last() - self.outer.first()
    }

    pub fn values(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let inner = self.inner.nodes().iter().copied().zip(self.inner.values().iter().copied());
        let outer = self.outer.nodes().iter().copied().zip(self.outer.values().iter().copied());
        inner.chain(outer)
    }
}

/// Interface radius, concentration and time of the radially symmetric model.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialState {
    c: TwoPhaseRadialField,
    t: f64,
}

impl RadialState {
    pub fn new(c: TwoPhaseRadialField, t: f64) -> Result<Self> {
        if !t.is_finite() {
            return Err(Error::InvalidState(format!("time {t} is not finite")));
        }
        if let Some((r, value)) = c.values().find(|&(_, v)| v < 0.0) {
            return Err(Error::NegativeConcentration { r, value });
        }
        Ok(Self { c, t })
    }

    /// Phase-wise constant concentrations on uniform grids with `intervals`
    /// cells per phase.
    pub fn constant(radius: f64, r_container: f64, intervals: usize, c_plus: f64, c_minus: f64) -> Result<Self> {
        Self::from_fns(
            RadialGrid::uniform(0.0, radius, intervals)?,
            RadialGrid::uniform(radius, r_container, intervals)?,
            |_| c_plus,
            |_| c_minus,
        )
    }

    pub fn from_fns(
        inner: RadialGrid,
        outer: RadialGrid,
        f_inner: impl Fn(f64) -> f64,
        f_outer: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let field =
            TwoPhaseRadialField::new(PhaseProfile::from_fn(inner, f_inner)?, PhaseProfile::from_fn(outer, f_outer)?)?;
        Self::new(field, 0.0)
    }

    pub fn concentration(&self) -> &TwoPhaseRadialField {
        &self.c
    }

    pub fn radius(&self) -> f64 {
        self.c.radius()
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn with_time(mut self, t: f64) -> Self {
        self.t = t;
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&StateDoc::from(self)).expect("state serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: StateDoc = serde_json::from_str(text).map_err(|e| Error::InvalidState(e.to_string()))?;
        doc.try_into()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileDoc {
    nodes: Vec<f64>,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateDoc {
    #[serde(rename = "R")]
    radius: f64,
    t: f64,
    inner: ProfileDoc,
    outer: ProfileDoc,
}

impl From<&RadialState> for StateDoc {
    fn from(s: &RadialState) -> Self {
        let doc = |p: &PhaseProfile| ProfileDoc { nodes: p.nodes().to_vec(), values: p.values().to_vec() };
        Self { radius: s.radius(), t: s.t, inner: doc(s.c.inner()), outer: doc(s.c.outer()) }
    }
}

impl TryFrom<StateDoc> for RadialState {
    type Error = Error;

    fn try_from(doc: StateDoc) -> Result<Self> {
        let inner = PhaseProfile::new(RadialGrid::from_nodes(doc.inner.nodes)?, doc.inner.values)?;
        let outer = PhaseProfile::new(RadialGrid::from_nodes(doc.outer.nodes)?, doc.outer.values)?;
        let field = TwoPhaseRadialField::new(inner, outer)?;
        if field.radius() != doc.radius {
            return Err(Error::InvalidState(format!(
                "R = {} disagrees with the interface node {}",
                doc.radius,
                field.radius()
            )));
        }
        RadialState::new(field, doc.t)
    }
}

impl Serialize for RadialState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        StateDoc::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for RadialState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        StateDoc::deserialize(d)?.try_into().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_is_bit_exact() {
        let s = RadialState::from_fns(
            RadialGrid::chebyshev(0.0, 1.1, 12).unwrap(),
            RadialGrid::uniform(1.1, 2.0, 9).unwrap(),
            |r| 2.0 + 0.1 * (3.0 * r).sin() / 7.0,
            |r| 1.0 / 3.0 + r.exp() * 1e-3,
        )
        .unwrap()
        .with_time(0.1 + 0.2);
        let back = RadialState::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.concentration().inner().grid().family(), GridFamily::Chebyshev);
    }

    #[test]
    fn rejects_negative_and_mismatched() {
        assert!(matches!(RadialState::constant(1.0, 2.0, 8, -1.0, 1.0), Err(Error::NegativeConcentration { .. })));
        let inner = PhaseProfile::from_fn(RadialGrid::uniform(0.0, 1.0, 8).unwrap(), |_| 1.0).unwrap();
        let outer = PhaseProfile::from_fn(RadialGrid::uniform(1.5, 2.0, 8).unwrap(), |_| 1.0).unwrap();
        assert!(TwoPhaseRadialField::new(inner, outer).is_err());
        assert!(RadialState::from_json(
            r#"{"R":1,"t":0,"inner":{"nodes":[0,1],"values":[1,1]},"outer":{"nodes":[1,2],"values":[1,1]}}"#
        )
        .is_err());
    }

    #[test]
    fn jump_uses_independent_traces() {
        let s = RadialState::constant(1.0, 2.0, 8, 2.0, 1.0).unwrap();
        assert_eq!(s.concentration().jump(), 1.0);
    }
}
