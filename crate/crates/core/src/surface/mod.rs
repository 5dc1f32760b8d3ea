//! Surfaces presented as components glued along arcs, and the induced
//! decomposition of their symmetric squares.

mod atlas;
mod builtins;
mod decompose;

pub use atlas::{Chart, Gluing, SteinAtlas};
pub use builtins::{builtin, surface_from_code, BUILTIN_NAMES};
pub use decompose::{
    completion_of, enumerate_decomposition, fiber_of, lg_labels, mirror_label, total_fiber, CompletionDescription,
    Corner, Decomposition, DecompositionReport, FiberDescription, Hypersurface, Piece,
};

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::SurfaceError;

/// Genus and number of ends of a completed surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TopType {
    pub genus: u32,
    pub ends: u32,
}

impl TopType {
    pub fn euler(&self) -> i64 {
        2 - 2 * self.genus as i64 - self.ends as i64
    }
}

/// A piece of the surface cut along all arcs; carries one minimum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub id: String,
    /// Genus of the completion.
    pub genus: u32,
    /// Number of ends of the completion.
    pub ends: u32,
    /// Arc endpoints on this component's boundary.
    #[serde(default)]
    pub slots: Vec<String>,
}

impl Component {
    pub fn top_type(&self) -> TopType {
        TopType { genus: self.genus, ends: self.ends }
    }
}

/// An arc joining two slots; carries one saddle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Arc {
    pub id: String,
    pub slots: [String; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSurface")]
pub struct CombSurface {
    pub components: Vec<Component>,
    pub arcs: Vec<Arc>,
    /// Declared type of the whole surface, checked against the pieces.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total: Option<TopType>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawArc {
    Pair([String; 2]),
    Named { id: Option<String>, slots: [String; 2] },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSurface {
    components: Vec<Component>,
    #[serde(default)]
    arcs: Vec<RawArc>,
    #[serde(default)]
    total: Option<TopType>,
}

impl TryFrom<RawSurface> for CombSurface {
    type Error = String;

    fn try_from(raw: RawSurface) -> Result<Self, String> {
        let arcs = raw
            .arcs
            .into_iter()
            .enumerate()
            .map(|(k, a)| match a {
                RawArc::Pair(slots) => Arc { id: format!("s{}", k + 1), slots },
                RawArc::Named { id, slots } => Arc { id: id.unwrap_or_else(|| format!("s{}", k + 1)), slots },
            })
            .collect();
        Ok(CombSurface { components: raw.components, arcs, total: raw.total })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Violation {
    /// A slot no arc uses: it would leave a boundary circle.
    SlotUnpaired { slot: String, component: String },
    SlotReused { slot: String },
    UnknownSlot { slot: String, arc: String },
    DuplicateSlot { slot: String },
    DuplicateComponentId { id: String },
    DuplicateArcId { id: String },
    SelfPairedSlot { slot: String, arc: String },
    /// A component with no ends has a compact completion.
    EndsMissing { component: String },
    EulerMismatch { declared: i64, computed: i64 },
    NoComponents,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::SlotUnpaired { slot, component } => write!(f, "slot {slot} of {component} is not on any arc"),
            Violation::SlotReused { slot } => write!(f, "slot {slot} is used by more than one arc"),
            Violation::UnknownSlot { slot, arc } => write!(f, "arc {arc} uses unknown slot {slot}"),
            Violation::DuplicateSlot { slot } => write!(f, "slot {slot} is declared more than once"),
            Violation::DuplicateComponentId { id } => write!(f, "component id {id} is repeated"),
            Violation::DuplicateArcId { id } => write!(f, "arc id {id} is repeated"),
            Violation::SelfPairedSlot { slot, arc } => write!(f, "arc {arc} joins slot {slot} to itself"),
            Violation::EndsMissing { component } => write!(f, "component {component} has no ends"),
            Violation::EulerMismatch { declared, computed } => {
                write!(f, "declared Euler characteristic {declared} but pieces give {computed}")
            }
            Violation::NoComponents => write!(f, "surface has no components"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Warning {
    Disconnected { pieces: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Validation {
    pub violations: Vec<Violation>,
    pub warnings: Vec<Warning>,
}

impl Validation {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl CombSurface {
    pub fn from_json(text: &str) -> Result<Self, SurfaceError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn n_minima(&self) -> usize {
        self.components.len()
    }

    pub fn n_saddles(&self) -> usize {
        self.arcs.len()
    }

    pub fn component(&self, id: &str) -> Option<&Component> {
        self.components.iter().find(|c| c.id == id)
    }

    pub fn arc(&self, id: &str) -> Option<&Arc> {
        self.arcs.iter().find(|a| a.id == id)
    }

    /// Slot id -> component id.
    pub(crate) fn slot_owner(&self) -> BTreeMap<&str, &str> {
        let mut owner = BTreeMap::new();
        for c in &self.components {
            for s in &c.slots {
                owner.entry(s.as_str()).or_insert(c.id.as_str());
            }
        }
        owner
    }

    /// Components touched by the arc `arc`.
    pub fn arc_components(&self, arc: &Arc) -> BTreeSet<String> {
        let owner = self.slot_owner();
        arc.slots.iter().filter_map(|s| owner.get(s.as_str()).map(|c| c.to_string())).collect()
    }

    /// `chi(Sigma) = sum chi(completed pieces) - #arcs`.
    pub fn computed_euler(&self) -> i64 {
        self.components.iter().map(|c| c.top_type().euler()).sum::<i64>() - self.arcs.len() as i64
    }

    fn connected_pieces(&self) -> usize {
        let index: BTreeMap<&str, usize> =
            self.components.iter().enumerate().map(|(k, c)| (c.id.as_str(), k)).collect();
        let mut parent: Vec<usize> = (0..self.components.len()).collect();
        fn find(parent: &mut [usize], k: usize) -> usize {
            let mut r = k;
            while parent[r] != r {
                r = parent[r];
            }
            parent[k] = r;
            r
        }
        let owner = self.slot_owner();
        for arc in &self.arcs {
            let ends: Vec<usize> = arc
                .slots
                .iter()
                .filter_map(|s| owner.get(s.as_str()).and_then(|c| index.get(c)).copied())
                .collect();
            if let [a, b] = ends[..] {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra] = rb;
            }
        }
        (0..parent.len()).filter(|&k| find(&mut parent, k) == k).count()
    }

    /// Structural checks; never fails, reports every violation found.
    pub fn validate(&self) -> Validation {
        let mut violations = Vec::new();
        if self.components.is_empty() {
            violations.push(Violation::NoComponents);
        }
        let mut ids = BTreeSet::new();
        let mut declared = BTreeSet::new();
        for c in &self.components {
            if !ids.insert(c.id.as_str()) {
                violations.push(Violation::DuplicateComponentId { id: c.id.clone() });
            }
            if c.ends == 0 {
                violations.push(Violation::EndsMissing { component: c.id.clone() });
            }
            for s in &c.slots {
                if !declared.insert(s.as_str()) {
                    violations.push(Violation::DuplicateSlot { slot: s.clone() });
                }
            }
        }
        let mut arc_ids = BTreeSet::new();
        let mut used = BTreeSet::new();
        for arc in &self.arcs {
            if !arc_ids.insert(arc.id.as_str()) {
                violations.push(Violation::DuplicateArcId { id: arc.id.clone() });
            }
            if arc.slots[0] == arc.slots[1] {
                violations.push(Violation::SelfPairedSlot { slot: arc.slots[0].clone(), arc: arc.id.clone() });
            }
            for s in &arc.slots {
                if !declared.contains(s.as_str()) {
                    violations.push(Violation::UnknownSlot { slot: s.clone(), arc: arc.id.clone() });
                } else if !used.insert(s.as_str()) && arc.slots[0] != arc.slots[1] {
                    violations.push(Violation::SlotReused { slot: s.clone() });
                }
            }
        }
        for c in &self.components {
            for s in &c.slots {
                if !used.contains(s.as_str()) {
                    violations.push(Violation::SlotUnpaired { slot: s.clone(), component: c.id.clone() });
                }
            }
        }
        if let Some(total) = self.total {
            let computed = self.computed_euler();
            if computed != total.euler() {
                violations.push(Violation::EulerMismatch { declared: total.euler(), computed });
            }
        }
        let mut warnings = Vec::new();
        let pieces = self.connected_pieces();
        if pieces > 1 {
            warnings.push(Warning::Disconnected { pieces });
        }
        Validation { violations, warnings }
    }

    pub fn validated(self) -> Result<Self, SurfaceError> {
        let v = self.validate();
        if v.is_ok() {
            Ok(self)
        } else {
            Err(SurfaceError::Invalid(v.violations))
        }
    }
}
