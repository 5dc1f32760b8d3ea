use std::collections::BTreeMap;

use serde::Serialize;

use super::{builtin, CombSurface, TopType, Warning};
use crate::error::SurfaceError;

/// Sector `U_{m,m'}`: the closure of the stable manifold of the pair of minima.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Piece {
    pub minima: [String; 2],
}

impl Piece {
    pub fn key(&self) -> String {
        format!("U({},{})", self.minima[0], self.minima[1])
    }

    pub fn is_diagonal(&self) -> bool {
        self.minima[0] == self.minima[1]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiberDescription {
    pub expression: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub topology: Option<TopType>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompletionDescription {
    pub expression: String,
    /// Named model of the completion when the pieces are recognized.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub identification: Option<String>,
}

/// Stratum `H_{s,m}`: one point on the arc of `s`, the other near `m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Hypersurface {
    pub saddle: String,
    pub minimum: String,
    /// Whether the arc of `s` touches the component of `m`.
    pub adjacent: bool,
    pub fiber: FiberDescription,
}

impl Hypersurface {
    pub fn key(&self) -> String {
        format!("H({},{})", self.saddle, self.minimum)
    }
}

/// Corner `C_{s,s'} = H_s cap H_s'`, locally the product of the two arcs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Corner {
    pub saddles: [String; 2],
    pub form: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    pub pieces: Vec<Piece>,
    pub hypersurfaces: Vec<Hypersurface>,
    pub corners: Vec<Corner>,
    pub completions: BTreeMap<String, CompletionDescription>,
}

impl Decomposition {
    pub fn counts(&self) -> (usize, usize, usize) {
        (self.pieces.len(), self.hypersurfaces.len(), self.corners.len())
    }
}

fn type_name(t: TopType) -> Option<&'static str> {
    match (t.genus, t.ends) {
        (0, 1) => Some("C"),
        (0, 2) => Some("C*"),
        (0, 3) => Some("P"),
        _ => None,
    }
}

fn sym2_model(name: &str) -> Option<&'static str> {
    match name {
        "C" => Some("C^2"),
        "C*" => Some("C x C*"),
        "P" => Some("(C*)^2"),
        _ => None,
    }
}

fn adjacent(surface: &CombSurface, saddle: &str, minimum: &str) -> Result<bool, SurfaceError> {
    let unknown = || SurfaceError::UnknownHypersurface { saddle: saddle.into(), minimum: minimum.into() };
    let arc = surface.arc(saddle).ok_or_else(unknown)?;
    surface.component(minimum).ok_or_else(unknown)?;
    Ok(surface.arc_components(arc).contains(minimum))
}

/// Fiber of the stop on `H_{s,m}`.
pub fn fiber_of(surface: &CombSurface, saddle: &str, minimum: &str) -> Result<FiberDescription, SurfaceError> {
    let adj = adjacent(surface, saddle, minimum)?;
    Ok(fiber_given(surface, saddle, minimum, adj))
}

fn fiber_given(surface: &CombSurface, saddle: &str, minimum: &str, adj: bool) -> FiberDescription {
    let topology = surface.component(minimum).map(|c| c.top_type());
    let expression = if adj {
        format!("COMPLETION_OF(Sigma_{minimum} MINUS BAND({saddle}))")
    } else {
        format!("POINT({saddle}) x Sigma_{minimum}")
    };
    FiberDescription { expression, topology }
}

/// Fiber of the whole hypersurface `H_s`, the union over all minima.
pub fn total_fiber(surface: &CombSurface, saddle: &str) -> Result<String, SurfaceError> {
    surface.arc(saddle).ok_or_else(|| SurfaceError::UnknownHypersurface {
        saddle: saddle.into(),
        minimum: "*".into(),
    })?;
    Ok(format!("COMPLETION_OF(POINT({saddle}) x (Sigma MINUS BAND({saddle})))"))
}

/// Completion of the piece `U_{m,m'}`.
pub fn completion_of(surface: &CombSurface, m: &str, m2: &str) -> Result<CompletionDescription, SurfaceError> {
    let unknown = || SurfaceError::UnknownPiece(m.into(), m2.into());
    let a = surface.component(m).ok_or_else(unknown)?;
    let b = surface.component(m2).ok_or_else(unknown)?;
    let (na, nb) = (type_name(a.top_type()), type_name(b.top_type()));
    if m == m2 {
        let model = na.and_then(sym2_model);
        Ok(CompletionDescription {
            expression: format!("SYM2(Sigma_hat_{m})"),
            model: model.map(str::to_string),
            identification: na.zip(model).map(|(n, s)| format!("Sym2({n}) = {s}")),
        })
    } else {
        let model = na.zip(nb).map(|(x, y)| format!("{x} x {y}"));
        Ok(CompletionDescription {
            expression: format!("Sigma_hat_{m} x Sigma_hat_{m2}"),
            identification: model.clone(),
            model,
        })
    }
}

/// Pieces, hypersurfaces, corners, fibers and completions of Sym^2.
pub fn enumerate_decomposition(surface: &CombSurface) -> Result<Decomposition, SurfaceError> {
    let v = surface.validate();
    if !v.is_ok() {
        return Err(SurfaceError::Invalid(v.violations));
    }
    let minima: Vec<&str> = surface.components.iter().map(|c| c.id.as_str()).collect();
    let saddles: Vec<&str> = surface.arcs.iter().map(|a| a.id.as_str()).collect();
    let mut pieces = Vec::new();
    let mut completions = BTreeMap::new();
    for (i, a) in minima.iter().enumerate() {
        for b in &minima[i..] {
            let piece = Piece { minima: [a.to_string(), b.to_string()] };
            completions.insert(piece.key(), completion_of(surface, a, b)?);
            pieces.push(piece);
        }
    }
    let owner = surface.slot_owner();
    let mut hypersurfaces = Vec::new();
    for arc in &surface.arcs {
        let s = arc.id.as_str();
        for m in &minima {
            let adj = arc.slots.iter().any(|slot| owner.get(slot.as_str()) == Some(m));
            hypersurfaces.push(Hypersurface {
                saddle: s.to_string(),
                minimum: m.to_string(),
                adjacent: adj,
                fiber: fiber_given(surface, s, m, adj),
            });
        }
    }
    let mut corners = Vec::new();
    for (i, a) in saddles.iter().enumerate() {
        for b in &saddles[i + 1..] {
            corners.push(Corner { saddles: [a.to_string(), b.to_string()], form: format!("gamma_{a} x gamma_{b}") });
        }
    }
    Ok(Decomposition { pieces, hypersurfaces, corners, completions })
}

const FOUR_PUNCTURED: &str = "p1-minus-4pts";

fn is_four_punctured_sphere(surface: &CombSurface) -> bool {
    builtin(FOUR_PUNCTURED).map(|b| &b == surface).unwrap_or(false)
}

/// Landau-Ginzburg models of the sectors of Sym^2 of the four-punctured sphere;
/// empty for every other surface.
pub fn lg_labels(surface: &CombSurface) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    if is_four_punctured_sphere(surface) {
        out.insert("U(m+,m+)".into(), "W=u1 on C x C*".into());
        out.insert("U(m-,m-)".into(), "W=u1+u2 on (C*)^2".into());
        out.insert("U(m-,m+) u U(m+,m+)".into(), "P x (C* with one stop)".into());
    }
    out
}

/// Mirror of the whole symmetric square, where known.
pub fn mirror_label(surface: &CombSurface) -> Option<String> {
    is_four_punctured_sphere(surface).then(|| "{xyz=0} in C^3".to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counts {
    pub pieces: usize,
    pub hypersurfaces: usize,
    pub corners: usize,
}

/// Everything the `decompose` command prints.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionReport {
    pub surface: CombSurface,
    pub counts: Counts,
    pub expected_counts: Counts,
    pub decomposition: Decomposition,
    pub total_fibers: BTreeMap<String, String>,
    pub lg_labels: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mirror: Option<String>,
    pub euler_characteristic: i64,
    pub warnings: Vec<Warning>,
}

impl DecompositionReport {
    pub fn build(surface: &CombSurface) -> Result<Self, SurfaceError> {
        let decomposition = enumerate_decomposition(surface)?;
        let (p, h, c) = decomposition.counts();
        let (n, m) = (surface.n_minima(), surface.n_saddles());
        let mut total_fibers = BTreeMap::new();
        for arc in &surface.arcs {
            total_fibers.insert(arc.id.clone(), total_fiber(surface, &arc.id)?);
        }
        Ok(DecompositionReport {
            surface: surface.clone(),
            counts: Counts { pieces: p, hypersurfaces: h, corners: c },
            expected_counts: Counts {
                pieces: n * (n + 1) / 2,
                hypersurfaces: m * n,
                corners: m * m.saturating_sub(1) / 2,
            },
            decomposition,
            total_fibers,
            lg_labels: lg_labels(surface),
            mirror: mirror_label(surface),
            euler_characteristic: surface.computed_euler(),
            warnings: surface.validate().warnings,
        })
    }
}
