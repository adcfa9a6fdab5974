//! Classed map elements.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::geom::{Point, Polyline, Pose2D};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementClass {
    DividerDashed,
    DividerSolid,
    Boundary,
    Centerline,
    PedCrossing,
}

impl ElementClass {
    pub const ALL: [ElementClass; 5] = [
        ElementClass::DividerDashed,
        ElementClass::DividerSolid,
        ElementClass::Boundary,
        ElementClass::Centerline,
        ElementClass::PedCrossing,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ElementClass::DividerDashed => "divider_dashed",
            ElementClass::DividerSolid => "divider_solid",
            ElementClass::Boundary => "boundary",
            ElementClass::Centerline => "centerline",
            ElementClass::PedCrossing => "ped_crossing",
        }
    }

    /// Short column tag used in AP reports (`AP_dsh`, `AP_sol`, …).
    pub fn short_name(self) -> &'static str {
        match self {
            ElementClass::DividerDashed => "dsh",
            ElementClass::DividerSolid => "sol",
            ElementClass::Boundary => "bou",
            ElementClass::Centerline => "cen",
            ElementClass::PedCrossing => "ped",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for ElementClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ElementClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ElementClass::ALL
            .into_iter()
            .find(|c| c.as_str() == s || c.short_name() == s)
            .ok_or_else(|| Error::InvalidMap(format!("unknown element class {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapElement {
    pub id: String,
    pub class: ElementClass,
    #[serde(rename = "points")]
    pub geometry: Polyline,
}

impl MapElement {
    pub fn new(id: impl Into<String>, class: ElementClass, geometry: Polyline) -> Self {
        Self {
            id: id.into(),
            class,
            geometry,
        }
    }

    pub fn points(&self) -> &[Point] {
        self.geometry.points()
    }

    pub fn to_ego(&self, pose: &Pose2D) -> MapElement {
        MapElement {
            id: self.id.clone(),
            class: self.class,
            geometry: self.geometry.transform_to_ego(pose),
        }
    }

    /// Closes the ring of a pedestrian crossing if its last vertex differs
    /// from the first. Other classes are returned unchanged.
    pub fn closed_if_crossing(mut self) -> MapElement {
        if self.class == ElementClass::PedCrossing && !self.geometry.is_closed() {
            let mut pts = self.geometry.clone().into_points();
            pts.push(pts[0]);
            if let Some(g) = Polyline::from_points_dedup(pts) {
                self.geometry = g;
            }
        }
        self
    }
}
