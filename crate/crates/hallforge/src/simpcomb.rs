//! The augmented simplex category and the combinatorial correspondence
//! functor: augmentation, spines, fiber-block complexes for monotone maps,
//! and grids of inclusions for composable chains.
//!
//! Simplicial subsets are stored as explicit downward-closed families of
//! nonempty vertex subsets inside a standard simplex; in this range of
//! examples nondegenerate data is a plain subset family.

use crate::{Error, Result};
use serde::Serialize;
use std::collections::BTreeSet;

/// The object ⟨n⟩ of the augmented simplex category: a chain with n
/// elements (n = 0 is the empty set).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrdObj(pub usize);

/// The augmentation: maps to the two-point chain. ⟨n⟩ has n+1 of them; the
/// k-th sends the first k elements to 0. Vertex 0 is the constant-0 map
/// (the entry point), vertex n the constant-1 map (the exit point).
pub fn aug(x: OrdObj) -> usize {
    x.0 + 1
}

/// A weakly increasing map ⟨m⟩ -> ⟨n⟩, recorded by its values (0-based
/// element indices of the target).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotoneMap {
    pub source: usize,
    pub target: usize,
    pub values: Vec<usize>,
}

impl MonotoneMap {
    pub fn new(source: usize, target: usize, values: Vec<usize>) -> Result<MonotoneMap> {
        if values.len() != source {
            return Err(Error::BadInput(format!(
                "monotone map from a {source}-chain needs {source} values"
            )));
        }
        if values.windows(2).any(|w| w[0] > w[1]) || values.iter().any(|&v| v >= target.max(1)) {
            return Err(Error::NotMonotone(values));
        }
        if !values.is_empty() && target == 0 {
            return Err(Error::NotMonotone(values));
        }
        Ok(MonotoneMap {
            source,
            target,
            values,
        })
    }

    pub fn identity(n: usize) -> MonotoneMap {
        MonotoneMap {
            source: n,
            target: n,
            values: (0..n).collect(),
        }
    }

    /// Build from fiber sizes (k_1, ..., k_n) with sum m.
    pub fn from_fibers(fibers: &[usize]) -> MonotoneMap {
        let mut values = Vec::new();
        for (j, &k) in fibers.iter().enumerate() {
            values.extend(std::iter::repeat(j).take(k));
        }
        MonotoneMap {
            source: values.len(),
            target: fibers.len(),
            values,
        }
    }

    /// Fiber sizes over each target element.
    pub fn fiber_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.target];
        for &v in &self.values {
            sizes[v] += 1;
        }
        sizes
    }

    /// Cumulative fiber boundaries b_0 = 0 <= b_1 <= ... <= b_n = m.
    pub fn boundaries(&self) -> Vec<usize> {
        let mut out = vec![0usize];
        let mut acc = 0;
        for k in self.fiber_sizes() {
            acc += k;
            out.push(acc);
        }
        out
    }

    pub fn is_onto(&self) -> bool {
        self.fiber_sizes().iter().all(|&k| k > 0)
    }

    /// other ∘ self (self first).
    pub fn then(&self, other: &MonotoneMap) -> Result<MonotoneMap> {
        if self.target != other.source {
            return Err(Error::BadInput(format!(
                "maps not composable: {} -> {} then {} -> {}",
                self.source, self.target, other.source, other.target
            )));
        }
        MonotoneMap::new(
            self.source,
            other.target,
            self.values.iter().map(|&v| other.values[v]).collect(),
        )
    }
}

/// A downward-closed family of nonempty faces inside the standard simplex
/// with vertices 0..=ambient.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct SimplicialSubset {
    pub ambient: usize,
    pub faces: BTreeSet<Vec<u8>>,
}

impl SimplicialSubset {
    /// Close the generating faces downward.
    pub fn generated(ambient: usize, generators: &[Vec<u8>]) -> Result<SimplicialSubset> {
        let mut faces = BTreeSet::new();
        for g in generators {
            if g.is_empty() {
                return Err(Error::BadSimplicial("empty face".into()));
            }
            let mut sorted = g.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.iter().any(|&v| v as usize > ambient) {
                return Err(Error::BadSimplicial(format!(
                    "vertex out of range in face {sorted:?} (ambient {ambient})"
                )));
            }
            // all nonempty subsets
            let k = sorted.len();
            for mask in 1u32..(1 << k) {
                let sub: Vec<u8> = (0..k)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| sorted[i])
                    .collect();
                faces.insert(sub);
            }
        }
        Ok(SimplicialSubset { ambient, faces })
    }

    pub fn is_downward_closed(&self) -> bool {
        self.faces.iter().all(|f| {
            let k = f.len();
            (1u32..(1 << k)).all(|mask| {
                let sub: Vec<u8> = (0..k)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| f[i])
                    .collect();
                self.faces.contains(&sub)
            })
        })
    }

    pub fn contains_subset(&self, other: &SimplicialSubset) -> bool {
        other.faces.is_subset(&self.faces)
    }

    /// Inclusion-maximal faces, sorted by (min vertex, face).
    pub fn maximal_faces(&self) -> Vec<Vec<u8>> {
        let mut out: Vec<Vec<u8>> = self
            .faces
            .iter()
            .filter(|f| {
                !self
                    .faces
                    .iter()
                    .any(|g| g.len() > f.len() && f.iter().all(|v| g.contains(v)))
            })
            .cloned()
            .collect();
        out.sort_by_key(|f| (f[0], f.clone()));
        out
    }

    /// The full standard simplex on vertices 0..=n.
    pub fn full_simplex(n: usize) -> SimplicialSubset {
        let verts: Vec<u8> = (0..=n as u8).collect();
        SimplicialSubset::generated(n, &[verts]).expect("valid")
    }

    /// The full face on an arbitrary vertex subset.
    pub fn face_on(ambient: usize, vertices: &[u8]) -> SimplicialSubset {
        SimplicialSubset::generated(ambient, &[vertices.to_vec()]).expect("valid")
    }

    pub fn union(&self, other: &SimplicialSubset) -> SimplicialSubset {
        assert_eq!(self.ambient, other.ambient);
        SimplicialSubset {
            ambient: self.ambient,
            faces: self.faces.union(&other.faces).cloned().collect(),
        }
    }

    /// Shift all vertices by an offset into a larger ambient simplex.
    pub fn shifted(&self, offset: usize, new_ambient: usize) -> SimplicialSubset {
        SimplicialSubset {
            ambient: new_ambient,
            faces: self
                .faces
                .iter()
                .map(|f| f.iter().map(|&v| v + offset as u8).collect())
                .collect(),
        }
    }

    /// Sorted face lists (for JSON dumps).
    pub fn face_lists(&self) -> Vec<Vec<u8>> {
        self.faces.iter().cloned().collect()
    }
}

/// The spine of the standard n-simplex: all vertices plus the consecutive
/// edges {i-1, i}. This is the value of the correspondence functor on the
/// object ⟨n⟩.
pub fn hcomb_object(n: usize) -> SimplicialSubset {
    let mut gens: Vec<Vec<u8>> = vec![vec![0]];
    for i in 1..=n {
        gens.push(vec![i as u8 - 1, i as u8]);
    }
    SimplicialSubset::generated(n, &gens).expect("valid spine")
}

/// The correspondence attached to a monotone map f: ⟨m⟩ -> ⟨n⟩: the fiber
/// blocks of f, pasted along cut vertices, with the spine of the source
/// included on the left and the reindexed spine of the target on the right.
#[derive(Debug, Clone)]
pub struct HcombCorrespondence {
    pub apex: SimplicialSubset,
    /// spine of the source simplex, a subset of the apex
    pub left: SimplicialSubset,
    /// reindexed spine of the target: vertex j goes to boundary b_j
    pub right: SimplicialSubset,
    pub right_vertex_map: Vec<u8>,
}

pub fn hcomb_map(f: &MonotoneMap) -> HcombCorrespondence {
    let m = f.source;
    let b = f.boundaries();
    let mut gens: Vec<Vec<u8>> = Vec::new();
    for j in 0..f.target {
        let block: Vec<u8> = (b[j]..=b[j + 1]).map(|v| v as u8).collect();
        gens.push(block);
    }
    if f.target == 0 {
        gens.push(vec![0]);
    }
    let apex = SimplicialSubset::generated(m, &gens).expect("valid block complex");
    let left = hcomb_object(m);
    let right_vertex_map: Vec<u8> = b.iter().map(|&x| x as u8).collect();
    let mut right_gens: Vec<Vec<u8>> = vec![vec![right_vertex_map[0]]];
    for j in 1..right_vertex_map.len() {
        right_gens.push(vec![right_vertex_map[j - 1], right_vertex_map[j]]);
    }
    let right = SimplicialSubset::generated(m, &right_gens).expect("valid embedded spine");
    debug_assert!(apex.contains_subset(&left));
    debug_assert!(apex.contains_subset(&right));
    HcombCorrespondence {
        apex,
        left,
        right,
        right_vertex_map,
    }
}

/// The grid of a k-cell: for a chain of composable maps f_1, ..., f_k the
/// entry at (i, j), i <= j, is the block complex of the composite from
/// level i to level j, embedded in the ambient simplex of the chain source
/// via the boundary positions of level i. Arrows of the grid are the face
/// family inclusions entry(i,j) ⊆ entry(i',j') for i' <= i and j' >= j.
#[derive(Debug, Clone)]
pub struct CorrGrid {
    pub k: usize,
    pub ambient: usize,
    pub entries: Vec<Vec<Option<SimplicialSubset>>>,
}

impl CorrGrid {
    pub fn entry(&self, i: usize, j: usize) -> &SimplicialSubset {
        self.entries[i][j].as_ref().expect("i <= j")
    }

    pub fn apex(&self) -> &SimplicialSubset {
        self.entry(0, self.k)
    }
}

/// Composable chain: f_1: X_0 -> X_1, then f_2: X_1 -> X_2, etc.
pub fn hcomb_cell(chain: &[MonotoneMap]) -> Result<CorrGrid> {
    if chain.is_empty() {
        return Err(Error::BadInput("empty cell".into()));
    }
    for w in chain.windows(2) {
        if w[0].target != w[1].source {
            return Err(Error::BadInput(format!(
                "cell is not composable at {} -> {} / {} -> {}",
                w[0].source, w[0].target, w[1].source, w[1].target
            )));
        }
    }
    let k = chain.len();
    let m = chain[0].source;
    // level maps g_i : X_0 -> X_i (g_0 = id)
    let mut levels = vec![MonotoneMap::identity(m)];
    for f in chain {
        let prev = levels.last().unwrap();
        levels.push(prev.then(f)?);
    }
    // boundary positions of X_i's elements inside 0..m
    let boundary: Vec<Vec<usize>> = levels.iter().map(|g| g.boundaries()).collect();
    let mut entries: Vec<Vec<Option<SimplicialSubset>>> = vec![vec![None; k + 1]; k + 1];
    #[allow(clippy::needless_range_loop)]
    for i in 0..=k {
        for j in i..=k {
            // the composite X_i -> X_j; its fibers over X_j elements are
            // intervals of X_i elements, whose boundary positions embed in 0..m
            let comp = {
                let mut c = MonotoneMap::identity(levels[i].target);
                for f in &chain[i..j] {
                    c = c.then(f)?;
                }
                c
            };
            let bi = &boundary[i];
            let cb = comp.boundaries();
            let mut gens: Vec<Vec<u8>> = Vec::new();
            for t in 0..comp.target {
                let block: Vec<u8> = (cb[t]..=cb[t + 1]).map(|e| bi[e] as u8).collect();
                gens.push(block);
            }
            if comp.target == 0 {
                gens.push(vec![bi[0] as u8]);
            }
            entries[i][j] = Some(SimplicialSubset::generated(m, &gens)?);
        }
    }
    let grid = CorrGrid {
        k,
        ambient: m,
        entries,
    };
    // arrows are inclusions by construction; verify
    for i in 0..=k {
        for j in i..=k {
            for i2 in 0..=i {
                for j2 in j..=k {
                    if !grid.entry(i2, j2).contains_subset(grid.entry(i, j)) {
                        return Err(Error::BadSimplicial(format!(
                            "grid arrow ({i},{j}) -> ({i2},{j2}) is not an inclusion"
                        )));
                    }
                }
            }
        }
    }
    Ok(grid)
}

/// Wedge of simplicial subsets: identify the exit vertex of each with the
/// entry vertex of the next. Models disjoint union of chains.
pub fn glue_subsets(parts: &[SimplicialSubset]) -> Result<SimplicialSubset> {
    if parts.is_empty() {
        return Err(Error::BadInput("nothing to glue".into()));
    }
    let total: usize = parts.iter().map(|p| p.ambient).sum();
    let mut acc = SimplicialSubset {
        ambient: total,
        faces: BTreeSet::new(),
    };
    let mut offset = 0usize;
    for p in parts {
        acc = acc.union(&p.shifted(offset, total));
        offset += p.ambient;
    }
    Ok(acc)
}

/// Glue cells entrywise (shapes must agree).
pub fn glue_disjoint(cells: &[CorrGrid]) -> Result<CorrGrid> {
    if cells.is_empty() {
        return Err(Error::BadInput("nothing to glue".into()));
    }
    let k = cells[0].k;
    if cells.iter().any(|c| c.k != k) {
        return Err(Error::BadInput("cell shapes differ".into()));
    }
    let ambient: usize = cells.iter().map(|c| c.ambient).sum();
    let mut entries: Vec<Vec<Option<SimplicialSubset>>> = vec![vec![None; k + 1]; k + 1];
    #[allow(clippy::needless_range_loop)]
    for i in 0..=k {
        for j in i..=k {
            let parts: Vec<SimplicialSubset> =
                cells.iter().map(|c| c.entry(i, j).clone()).collect();
            entries[i][j] = Some(glue_subsets(&parts)?);
        }
    }
    Ok(CorrGrid {
        k,
        ambient,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aug_examples() {
        assert_eq!(aug(OrdObj(0)), 1);
        assert_eq!(aug(OrdObj(1)), 2);
        assert_eq!(aug(OrdObj(3)), 4);
    }

    #[test]
    fn hcomb_object_examples() {
        // n = 0: the vertex
        let v = hcomb_object(0);
        assert_eq!(v.face_lists(), vec![vec![0]]);
        // n = 1: the full edge
        let e = hcomb_object(1);
        assert_eq!(e, SimplicialSubset::full_simplex(1));
        // n = 2: the two-edge horn, no 2-face, no long edge
        let horn = hcomb_object(2);
        assert!(horn.faces.contains(&vec![0, 1]));
        assert!(horn.faces.contains(&vec![1, 2]));
        assert!(!horn.faces.contains(&vec![0, 2]));
        assert!(!horn.faces.contains(&vec![0, 1, 2]));
    }

    #[test]
    fn hcomb_map_identity_is_spine() {
        for n in 0..=4 {
            let id = MonotoneMap::identity(n);
            let corr = hcomb_map(&id);
            assert_eq!(corr.apex, hcomb_object(n), "n={n}");
        }
    }

    #[test]
    fn hcomb_map_onto_gives_full_simplex() {
        // f: ⟨2⟩ -> ⟨1⟩ gives the full 2-simplex
        let f = MonotoneMap::from_fibers(&[2]);
        let corr = hcomb_map(&f);
        assert_eq!(corr.apex, SimplicialSubset::full_simplex(2));
        assert_eq!(corr.left, hcomb_object(2));
        // the right leg is the long edge {0, 2}
        assert!(corr.right.faces.contains(&vec![0, 2]));
        for n in 1..=5 {
            let f = MonotoneMap::from_fibers(&[n]);
            assert_eq!(hcomb_map(&f).apex, SimplicialSubset::full_simplex(n));
        }
    }

    #[test]
    fn hcomb_map_with_empty_fiber() {
        // ⟨1⟩ -> ⟨2⟩ hitting the first element: blocks {0,1} and vertex {1}
        let f = MonotoneMap::from_fibers(&[1, 0]);
        let corr = hcomb_map(&f);
        let expect =
            SimplicialSubset::generated(1, &[vec![0, 1], vec![1]]).unwrap();
        assert_eq!(corr.apex, expect);
    }

    #[test]
    fn monoidality_of_spines() {
        for m in 0..=4usize {
            for n in 0..=(4 - m) {
                let glued = glue_subsets(&[hcomb_object(m), hcomb_object(n)]).unwrap();
                assert_eq!(glued, hcomb_object(m + n), "m={m} n={n}");
            }
        }
    }

    #[test]
    fn downward_closure_always_holds() {
        for n in 0..=4 {
            assert!(hcomb_object(n).is_downward_closed());
        }
        let f = MonotoneMap::from_fibers(&[2, 0, 1]);
        assert!(hcomb_map(&f).apex.is_downward_closed());
    }

    #[test]
    fn cell_apex_matches_composite() {
        // exhaustive over composable pairs with small sources
        for m in 1..=5usize {
            for n in 1..=m {
                for f_fibers in compositions(m, n) {
                    if f_fibers.iter().any(|&k| k == 0) {
                        continue;
                    }
                    for k2 in 1..=n {
                        for g_fibers in compositions(n, k2) {
                            if g_fibers.iter().any(|&k| k == 0) {
                                continue;
                            }
                            let f = MonotoneMap::from_fibers(&f_fibers);
                            let g = MonotoneMap::from_fibers(&g_fibers);
                            let grid = hcomb_cell(&[f.clone(), g.clone()]).unwrap();
                            let composite = f.then(&g).unwrap();
                            assert_eq!(
                                grid.apex(),
                                &hcomb_map(&composite).apex,
                                "f={f_fibers:?} g={g_fibers:?}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn cell_of_identity_chain_is_constant_spine() {
        let id = MonotoneMap::identity(2);
        let grid = hcomb_cell(&[id.clone(), id]).unwrap();
        for i in 0..=2 {
            for j in i..=2 {
                assert_eq!(grid.entry(i, j), &hcomb_object(2));
            }
        }
    }

    #[test]
    fn glue_with_point_is_identity() {
        let e = hcomb_object(1);
        let v = hcomb_object(0);
        assert_eq!(glue_subsets(&[e.clone(), v]).unwrap(), e);
    }

    fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
        if parts == 0 {
            return if total == 0 { vec![vec![]] } else { vec![] };
        }
        let mut out = Vec::new();
        for first in 0..=total {
            for rest in compositions(total - first, parts - 1) {
                let mut v = vec![first];
                v.extend(rest);
                out.push(v);
            }
        }
        out
    }
}
