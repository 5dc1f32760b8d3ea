use super::{Arc, CombSurface, Component, TopType};
use crate::error::SurfaceError;

pub const BUILTIN_NAMES: [&str; 2] = ["p1-minus-4pts", "example-5.3"];

fn comp(id: &str, genus: u32, ends: u32, slots: &[&str]) -> Component {
    Component { id: id.into(), genus, ends, slots: slots.iter().map(|s| s.to_string()).collect() }
}

fn arc(id: &str, a: &str, b: &str) -> Arc {
    Arc { id: id.into(), slots: [a.into(), b.into()] }
}

/// Named instances.
///
/// `p1-minus-4pts`: the four-punctured sphere cut by one separating arc into a
/// pair of pants `m-` and a cylinder `m+`.
///
/// `example-5.3`: the plane with two arcs, i.e. three half-planes/strips in a
/// row, two saddles and three minima.
pub fn builtin(name: &str) -> Result<CombSurface, SurfaceError> {
    match name {
        "p1-minus-4pts" => Ok(CombSurface {
            components: vec![comp("m-", 0, 3, &["a-"]), comp("m+", 0, 2, &["a+"])],
            arcs: vec![arc("s", "a-", "a+")],
            total: Some(TopType { genus: 0, ends: 4 }),
        }),
        "example-5.3" => Ok(CombSurface {
            components: vec![
                comp("m1", 0, 1, &["s1a"]),
                comp("m2", 0, 1, &["s1b", "s2a"]),
                comp("m3", 0, 1, &["s2b"]),
            ],
            arcs: vec![arc("s1", "s1a", "s1b"), arc("s2", "s2a", "s2b")],
            total: Some(TopType { genus: 0, ends: 1 }),
        }),
        other => Err(SurfaceError::UnknownBuiltin(other.to_string())),
    }
}

/// The `code`-th way of attaching `m` arcs to `n` disks, counting codes in
/// base `n(n+1)/2`: each digit picks the unordered pair of components an arc
/// joins. Every code in `0..(n(n+1)/2)^m` gives a valid surface.
pub fn surface_from_code(n: usize, m: usize, mut code: u64) -> CombSurface {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let mut components: Vec<Component> = (0..n).map(|i| comp(&format!("m{}", i + 1), 0, 1, &[])).collect();
    let mut arcs = Vec::with_capacity(m);
    for k in 0..m {
        let (i, j) = pairs[(code % pairs.len() as u64) as usize];
        code /= pairs.len() as u64;
        let (a, b) = (format!("s{}a", k + 1), format!("s{}b", k + 1));
        components[i].slots.push(a.clone());
        components[j].slots.push(b.clone());
        arcs.push(Arc { id: format!("s{}", k + 1), slots: [a, b] });
    }
    CombSurface { components, arcs, total: None }
}
