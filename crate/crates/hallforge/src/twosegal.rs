//! Polygonal decompositions of convex polygons, the comparison functor into
//! the iterated fiber product over a decomposition, 2-Segal certification,
//! and the pullback-square check for cells ending in the one-element chain.
//!
//! A decomposition of the n-gon (vertices 0..n-1 in convex position) is a
//! set of pairwise non-crossing diagonals; its cells tile the polygon. The
//! comparison functor restricts a full flag to each cell; certification
//! checks it is an equivalence of groupoids at every total dimension within
//! the caps.

use crate::ffq::Prime;
use crate::groupoid::{
    is_equivalence, pseudo_pullback, ActionKind, Component, EquivReport, FiniteGroupoid, GEl,
    Group, GroupoidFunctor, Obj,
};
use crate::quiver::{DimVector, Quiver};
use crate::rep::SubquotCoords;
use crate::simpcomb::{hcomb_map, MonotoneMap, SimplicialSubset};
use crate::waldhausen::{
    family_restriction, filter_components, flag_family, s_extended, sext_restriction,
    transition_tuple, FlagFamily, RestrictionData, SExt,
};
use crate::{Ctx, Error, Result};
use serde::Serialize;
use std::collections::VecDeque;
use std::sync::Arc;

/// A polygonal decomposition: the cells, each listed by increasing vertex.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct PolygonalDecomposition {
    pub n: usize,
    pub polygons: Vec<Vec<usize>>,
}

impl PolygonalDecomposition {
    pub fn label(&self) -> String {
        let cells: Vec<String> = self
            .polygons
            .iter()
            .map(|p| {
                let verts: Vec<String> = p.iter().map(|v| v.to_string()).collect();
                format!("[{}]", verts.join(","))
            })
            .collect();
        format!("{}-gon:{}", self.n, cells.join(""))
    }

    /// The cell containing the closing boundary edge {0, n-1}; its
    /// restriction carries the total grading.
    pub fn root_polygon(&self) -> usize {
        self.polygons
            .iter()
            .position(|p| p.contains(&0) && p.contains(&(self.n - 1)))
            .expect("some cell contains the closing edge")
    }
}

fn diagonals(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in (a + 2)..n {
            if a == 0 && b == n - 1 {
                continue; // closing boundary edge, not a diagonal
            }
            out.push((a, b));
        }
    }
    out
}

fn chords_cross(x: (usize, usize), y: (usize, usize)) -> bool {
    let (a, b) = x;
    let (c, d) = y;
    (a < c && c < b && b < d) || (c < a && a < d && d < b)
}

/// Cells of the subdivision of the cyclic vertex list by a non-crossing
/// chord set.
fn cells_from_chords(vertices: &[usize], chords: &[(usize, usize)]) -> Vec<Vec<usize>> {
    if chords.is_empty() {
        return vec![vertices.to_vec()];
    }
    let (a, b) = chords[0];
    let ai = vertices.iter().position(|&v| v == a).unwrap();
    let bi = vertices.iter().position(|&v| v == b).unwrap();
    let (lo, hi) = if ai < bi { (ai, bi) } else { (bi, ai) };
    let side1: Vec<usize> = vertices[lo..=hi].to_vec();
    let mut side2: Vec<usize> = vertices[hi..].to_vec();
    side2.extend_from_slice(&vertices[..=lo]);
    let split = |side: &[usize]| -> Vec<(usize, usize)> {
        chords[1..]
            .iter()
            .filter(|(c, d)| side.contains(c) && side.contains(d))
            .copied()
            .collect()
    };
    let mut out = cells_from_chords(&side1, &split(&side1));
    out.extend(cells_from_chords(&side2, &split(&side2)));
    out
}

/// All polygonal decompositions of the n-gon: one per set of pairwise
/// non-crossing diagonals (including the empty set).
pub fn enumerate_decompositions(n: usize) -> Result<Vec<PolygonalDecomposition>> {
    if !(3..=8).contains(&n) {
        return Err(Error::BadInput(format!(
            "polygon size {n} out of the supported range 3..=8"
        )));
    }
    let diags = diagonals(n);
    let mut chord_sets: Vec<Vec<(usize, usize)>> = vec![vec![]];
    fn extend(
        diags: &[(usize, usize)],
        start: usize,
        current: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        for i in start..diags.len() {
            let d = diags[i];
            if current.iter().all(|&c| !chords_cross(c, d)) {
                current.push(d);
                out.push(current.clone());
                extend(diags, i + 1, current, out);
                current.pop();
            }
        }
    }
    extend(&diags, 0, &mut Vec::new(), &mut chord_sets);
    let vertices: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    for chords in chord_sets {
        let mut polygons: Vec<Vec<usize>> = cells_from_chords(&vertices, &chords)
            .into_iter()
            .map(|mut c| {
                c.sort_unstable();
                c.dedup();
                c
            })
            .collect();
        polygons.sort();
        out.push(PolygonalDecomposition { n, polygons });
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Remove one orbit from a family component (negative-control corruption;
/// orbits are action-closed, so the result is still an action groupoid).
pub fn drop_orbit(family: &FlagFamily, comp: usize, orbit_index: usize) -> FlagFamily {
    let c = &family.groupoid.components[comp];
    let orbits = c.orbits();
    let orbit = &orbits[orbit_index % orbits.len()];
    let objects: Vec<Obj> = c
        .objects
        .iter()
        .enumerate()
        .filter(|(i, _)| !orbit.contains(&(*i as u32)))
        .map(|(_, o)| o.clone())
        .collect();
    let kind = match &c.kind {
        ActionKind::Matrix { quiver, prime } => ActionKind::Matrix {
            quiver: quiver.clone(),
            prime: *prime,
        },
        _ => panic!("corruption targets flag components"),
    };
    let new_comp = Arc::new(Component::new(
        c.group.clone(),
        objects,
        kind,
        c.tag.clone(),
    ));
    let components: Vec<Arc<Component>> = family
        .groupoid
        .components
        .iter()
        .enumerate()
        .map(|(i, old)| if i == comp { new_comp.clone() } else { old.clone() })
        .collect();
    FlagFamily {
        quiver: family.quiver.clone(),
        prime: family.prime,
        n_steps: family.n_steps,
        groupoid: Arc::new(FiniteGroupoid { components }),
        patterns: family.patterns.clone(),
    }
}

/// Deterministically select an orbit for corruption from a seed.
pub fn pick_orbit(family: &FlagFamily, seed: u64) -> (usize, usize) {
    let mut all = Vec::new();
    for (ci, c) in family.groupoid.components.iter().enumerate() {
        for (oi, _) in c.orbits().iter().enumerate() {
            all.push((ci, oi));
        }
    }
    all[(seed as usize) % all.len()]
}

/// The iterated fiber product over a decomposition together with the
/// comparison functor from the full flag groupoid.
pub struct SPData {
    pub groupoid: Arc<FiniteGroupoid>,
    pub alpha: GroupoidFunctor,
}

/// Build S_P and the comparison α_P at total dimension γ. `source` is the
/// level-(n-1) family (possibly corrupted by the caller for negative
/// controls).
pub fn s_p(
    ctx: &Ctx,
    quiver: &Arc<Quiver>,
    p: Prime,
    decomp: &PolygonalDecomposition,
    gamma: &DimVector,
    source: &FlagFamily,
) -> Result<SPData> {
    let n = decomp.n;
    assert_eq!(source.n_steps, n - 1, "source is the level-(n-1) family");

    // tree order rooted at the cell carrying the total grading
    let root = decomp.root_polygon();
    let k = decomp.polygons.len();
    let mut order = vec![root];
    let mut parent: Vec<Option<(usize, (usize, usize))>> = vec![None; k];
    let mut seen = vec![false; k];
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(i) = queue.pop_front() {
        for j in 0..k {
            if seen[j] {
                continue;
            }
            let shared: Vec<usize> = decomp.polygons[i]
                .iter()
                .filter(|v| decomp.polygons[j].contains(v))
                .copied()
                .collect();
            if shared.len() == 2 {
                seen[j] = true;
                parent[j] = Some((i, (shared[0], shared[1])));
                order.push(j);
                queue.push_back(j);
            }
        }
    }
    if order.len() != k {
        return Err(Error::BadInput(format!(
            "decomposition {} is not chord-connected",
            decomp.label()
        )));
    }

    // per-polygon families and the restrictions from the source
    let mut poly_family: Vec<Option<FlagFamily>> = (0..k).map(|_| None).collect();
    let mut source_restr: Vec<Option<RestrictionData>> = (0..k).map(|_| None).collect();
    for &pi in &order {
        let verts = &decomp.polygons[pi];
        let fam = flag_family(ctx, quiver, p, verts.len() - 1, gamma, false)?;
        source_restr[pi] = Some(family_restriction(ctx, source, verts, &fam)?);
        poly_family[pi] = Some(fam);
    }
    let edge_family = flag_family(ctx, quiver, p, 1, gamma, false)?;

    // fold: start at the root filtered to total γ
    let root_fam = poly_family[root].as_ref().unwrap();
    let root_totals = root_fam.totals();
    let keep: Vec<bool> = root_totals.iter().map(|t| t == gamma).collect();
    let (stage0, stage0_remap) = filter_components(&root_fam.groupoid, &keep);

    // per polygon: the projection from the current stage into its family
    let mut proj: Vec<Option<GroupoidFunctor>> = (0..k).map(|_| None).collect();
    proj[root] = Some(GroupoidFunctor {
        source: stage0.clone(),
        target: root_fam.groupoid.clone(),
        comp_map: (0..root_fam.groupoid.components.len() as u32)
            .filter(|c| keep[*c as usize])
            .collect(),
        obj_maps: root_fam
            .groupoid
            .components
            .iter()
            .enumerate()
            .filter(|(i, _)| keep[*i])
            .map(|(_, c)| (0..c.size() as u32).collect())
            .collect(),
        mor_maps: (0..stage0.components.len())
            .map(|_| crate::groupoid::MorMap::Identity)
            .collect(),
    });

    let mut stage = stage0.clone();
    let mut stages: Vec<Arc<FiniteGroupoid>> = vec![stage.clone()];
    // chord restriction data per polygon in fold order (for the comparison)
    let mut chord_restr: Vec<Option<(RestrictionData, RestrictionData)>> =
        (0..k).map(|_| None).collect();

    for &pj in &order[1..] {
        let (pi, chord) = parent[pj].unwrap();
        let parent_verts = &decomp.polygons[pi];
        let child_verts = &decomp.polygons[pj];
        let marks_parent: Vec<usize> = [chord.0, chord.1]
            .iter()
            .map(|v| parent_verts.iter().position(|w| w == v).unwrap())
            .collect();
        let marks_child: Vec<usize> = [chord.0, chord.1]
            .iter()
            .map(|v| child_verts.iter().position(|w| w == v).unwrap())
            .collect();
        let parent_to_chord = family_restriction(
            ctx,
            poly_family[pi].as_ref().unwrap(),
            &marks_parent,
            &edge_family,
        )?;
        let child_to_chord = family_restriction(
            ctx,
            poly_family[pj].as_ref().unwrap(),
            &marks_child,
            &edge_family,
        )?;
        let left = crate::groupoid::compose(&parent_to_chord.functor, proj[pi].as_ref().unwrap());
        let (w, p1, p2) = pseudo_pullback(&left, &child_to_chord.functor, &ctx.caps)?;
        for slot in proj.iter_mut() {
            if let Some(old) = slot.take() {
                *slot = Some(crate::groupoid::compose(&old, &p1));
            }
        }
        proj[pj] = Some(p2);
        chord_restr[pj] = Some((parent_to_chord, child_to_chord));
        stage = w;
        stages.push(stage.clone());
    }

    // the comparison: mediate the source restrictions along the same fold
    let root_restr = source_restr[root].as_ref().unwrap();
    let mut alpha = GroupoidFunctor {
        source: source.groupoid.clone(),
        target: stage0.clone(),
        comp_map: root_restr
            .functor
            .comp_map
            .iter()
            .map(|c| *stage0_remap.get(c).expect("γ-graded image survives"))
            .collect(),
        obj_maps: root_restr.functor.obj_maps.clone(),
        mor_maps: root_restr
            .functor
            .mor_maps
            .iter()
            .map(crate::groupoid::clone_mormap)
            .collect(),
    };
    for (step, &pj) in order.iter().enumerate().skip(1) {
        let (pi, _chord) = parent[pj].unwrap();
        let (parent_to_chord, child_to_chord) = chord_restr[pj].as_ref().unwrap();
        let restr_i = source_restr[pi].as_ref().unwrap();
        let restr_j = source_restr[pj].as_ref().unwrap();
        let nv = quiver.n_vertices();
        // φ per source object: transition from the through-parent chord
        // coordinates to the through-child chord coordinates
        let mut phis: Vec<Vec<GEl>> = Vec::new();
        for (ci, comp) in source.groupoid.components.iter().enumerate() {
            let mut row = Vec::with_capacity(comp.size());
            for o in 0..comp.size() {
                let (pci, poi) = restr_i.functor.apply_obj(ci as u32, o as u32);
                let c1: Vec<SubquotCoords> = (0..nv)
                    .map(|v| {
                        SubquotCoords::compose(
                            &restr_i.coords[ci][o][v],
                            &parent_to_chord.coords[pci as usize][poi as usize][v],
                        )
                    })
                    .collect();
                let (qci, qoi) = restr_j.functor.apply_obj(ci as u32, o as u32);
                let c2: Vec<SubquotCoords> = (0..nv)
                    .map(|v| {
                        SubquotCoords::compose(
                            &restr_j.coords[ci][o][v],
                            &child_to_chord.coords[qci as usize][qoi as usize][v],
                        )
                    })
                    .collect();
                let trans = transition_tuple(nv, &c1, &c2, None);
                let zc = parent_to_chord.functor.comp_map[pci as usize] as usize;
                let Group::Explicit(zg) = &edge_family.groupoid.components[zc].group else {
                    panic!("chord groups are explicit")
                };
                let leaf = zg
                    .tuple_index(&trans)
                    .expect("transition is invertible and listed");
                row.push(GEl::Leaf(leaf));
            }
            phis.push(row);
        }
        alpha = crate::groupoid::mediate_into_pullback(
            &stages[step],
            &restr_j.functor,
            &alpha,
            &restr_j.functor,
            |ci, o| phis[ci as usize][o as usize].clone(),
        )?;
    }

    Ok(SPData {
        groupoid: stage,
        alpha,
    })
}

/// Per-(decomposition, γ) verdict with certificate digest.
#[derive(Debug, Clone, Serialize)]
pub struct SegalReport {
    pub decomposition: String,
    pub gamma: String,
    pub pass: bool,
    pub certificate_digest: Option<String>,
    pub witness: Option<String>,
}

/// Check one decomposition at one total dimension: cardinality fast filter,
/// then the full equivalence certificate.
pub fn check_decomposition(
    ctx: &Ctx,
    quiver: &Arc<Quiver>,
    p: Prime,
    decomp: &PolygonalDecomposition,
    gamma: &DimVector,
    source: &FlagFamily,
) -> Result<SegalReport> {
    let sp = s_p(ctx, quiver, p, decomp, gamma, source)?;
    let card_src = source.groupoid.cardinality();
    let card_tgt = sp.groupoid.cardinality();
    if card_src != card_tgt {
        return Ok(SegalReport {
            decomposition: decomp.label(),
            gamma: gamma.to_string(),
            pass: false,
            certificate_digest: None,
            witness: Some(format!(
                "groupoid cardinalities differ: {} vs {}",
                crate::groupoid::rational_to_string(&card_src),
                crate::groupoid::rational_to_string(&card_tgt)
            )),
        });
    }
    let report = is_equivalence(&sp.alpha, &ctx.caps)?;
    Ok(SegalReport {
        decomposition: decomp.label(),
        gamma: gamma.to_string(),
        pass: report.ok,
        certificate_digest: if report.ok { Some(report.digest()) } else { None },
        witness: report.witness,
    })
}

/// Run every decomposition with 3..=n_max vertices against every total
/// dimension within the cap. Failures are data, not errors.
pub fn two_segal_report(
    ctx: &Ctx,
    quiver: &Arc<Quiver>,
    p: Prime,
    n_max: usize,
    gamma_cap: &DimVector,
) -> Result<Vec<SegalReport>> {
    let mut out = Vec::new();
    for n in 3..=n_max {
        for decomp in enumerate_decompositions(n)? {
            for gamma in gamma_cap.all_leq() {
                let source = crate::waldhausen::s_level(ctx, quiver, p, n - 1, &gamma)?;
                out.push(check_decomposition(
                    ctx, quiver, p, &decomp, &gamma, &source,
                )?);
            }
        }
    }
    Ok(out)
}

/// The verdict of the pullback-square check for a cell (f, g) ending at the
/// one-element chain.
#[derive(Debug, Clone, Serialize)]
pub struct SquareReport {
    pub cell: String,
    pub gamma: String,
    pub pass: bool,
    pub matching_decomposition: String,
    pub certificate_digest: Option<String>,
    pub witness: Option<String>,
}

/// The polygonal decomposition matching a cell (f: <m>-><n>, g: <n>-><1>):
/// the inner (n+1)-gon on the fiber boundaries of f plus one cell per fiber
/// block with at least three vertices.
pub fn matching_decomposition(f: &MonotoneMap) -> PolygonalDecomposition {
    let b = f.boundaries();
    let mut polygons = Vec::new();
    if b.len() >= 3 {
        polygons.push(b.clone());
    }
    for j in 1..b.len() {
        if b[j] - b[j - 1] >= 2 {
            polygons.push((b[j - 1]..=b[j]).collect());
        }
    }
    if polygons.is_empty() {
        polygons.push((0..=f.source).collect());
    }
    let mut polygons: Vec<Vec<usize>> = polygons;
    polygons.sort();
    polygons.dedup();
    PolygonalDecomposition {
        n: f.source + 1,
        polygons,
    }
}

/// Check that the Waldhausen evaluation sends the square of the 2-cell
/// (f, g) to a pullback square: certify the mediating comparison from the
/// evaluated apex into the pseudo-pullback of the cospan.
///
/// `source_family` is the level-m family evaluated at the apex, exposed so
/// negative controls can corrupt it.
pub fn hgeo_square_check(
    ctx: &Ctx,
    quiver: &Arc<Quiver>,
    p: Prime,
    f: &MonotoneMap,
    g: &MonotoneMap,
    gamma: &DimVector,
    source_family: Option<FlagFamily>,
) -> Result<SquareReport> {
    if !f.is_onto() || !g.is_onto() || g.target != 1 || f.target != g.source {
        return Err(Error::BadInput(
            "square check expects onto maps f: <m> -> <n>, g: <n> -> <1>".into(),
        ));
    }
    let m = f.source;
    let corr = hcomb_map(f);
    let cell_label = format!("<{}>-><{}>-><1> fibers {:?}", m, f.target, f.fiber_sizes());

    // the four corners inside the ambient m-simplex
    let k_br = SimplicialSubset::full_simplex(m);
    let b: Vec<u8> = corr.right_vertex_map.clone();
    let k_bl = SimplicialSubset::face_on(m, &b);
    let k_tr = corr.apex.clone();
    let k_tl = corr.right.clone();

    let br = match source_family {
        Some(fam) => s_extended_with_root_family(ctx, &k_br, gamma, fam)?,
        None => s_extended(ctx, quiver, p, &k_br, gamma)?,
    };
    let bl = s_extended(ctx, quiver, p, &k_bl, gamma)?;
    let tr = s_extended(ctx, quiver, p, &k_tr, gamma)?;
    let tl = s_extended(ctx, quiver, p, &k_tl, gamma)?;

    let r_tr = sext_restriction(ctx, &br, &tr)?;
    let r_bl = sext_restriction(ctx, &br, &bl)?;
    let r1 = sext_restriction(ctx, &tr, &tl)?;
    let r2 = sext_restriction(ctx, &bl, &tl)?;

    let (pb, _q1, _q2) = pseudo_pullback(&r1.functor, &r2.functor, &ctx.caps)?;

    // fast filter: cardinalities must agree for a pass
    let card_apex = br.groupoid.cardinality();
    let card_pb = pb.cardinality();
    let decomp = matching_decomposition(f);
    if card_apex != card_pb {
        return Ok(SquareReport {
            cell: cell_label,
            gamma: gamma.to_string(),
            pass: false,
            matching_decomposition: decomp.label(),
            certificate_digest: None,
            witness: Some(format!(
                "apex and pullback cardinalities differ: {} vs {}",
                crate::groupoid::rational_to_string(&card_apex),
                crate::groupoid::rational_to_string(&card_pb)
            )),
        });
    }

    // mediating functor with the canonical comparison morphisms
    let nv = quiver.n_vertices();
    let mut phis: Vec<Vec<GEl>> = Vec::new();
    for (ci, comp) in br.groupoid.components.iter().enumerate() {
        let mut row = Vec::with_capacity(comp.size());
        for o in 0..comp.size() {
            let (tci, toi) = r_tr.functor.apply_obj(ci as u32, o as u32);
            let (bci, boi) = r_bl.functor.apply_obj(ci as u32, o as u32);
            let mut leaves: Vec<GEl> = Vec::new();
            for fi in 0..tl.block_faces.len() {
                let c1: Vec<SubquotCoords> = (0..nv)
                    .map(|v| {
                        SubquotCoords::compose(
                            &r_tr.coords[ci][o][containing_face_index(&tr, &tl, fi)][v],
                            &r1.coords[tci as usize][toi as usize][fi][v],
                        )
                    })
                    .collect();
                let c2: Vec<SubquotCoords> = (0..nv)
                    .map(|v| {
                        SubquotCoords::compose(
                            &r_bl.coords[ci][o][containing_face_index(&bl, &tl, fi)][v],
                            &r2.coords[bci as usize][boi as usize][fi][v],
                        )
                    })
                    .collect();
                let trans = transition_tuple(nv, &c1, &c2, None);
                let zc = r1.functor.comp_map[tci as usize] as usize;
                let pat = &tl.comp_patterns[zc][fi];
                let fci = tl.face_families[fi]
                    .component_for_pattern(pat)
                    .expect("pattern component exists");
                let Group::Explicit(zg) = &tl.face_families[fi].groupoid.components[fci].group
                else {
                    panic!("face groups are explicit")
                };
                let leaf = zg
                    .tuple_index(&trans)
                    .expect("transition is invertible and listed");
                leaves.push(GEl::Leaf(leaf));
            }
            row.push(assemble_nested(&leaves, &tl));
        }
        phis.push(row);
    }
    let mediated = crate::groupoid::mediate_into_pullback(
        &pb,
        &r1.functor,
        &r_tr.functor,
        &r_bl.functor,
        |ci, o| phis[ci as usize][o as usize].clone(),
    )?;
    let report: EquivReport = is_equivalence(&mediated, &ctx.caps)?;
    Ok(SquareReport {
        cell: cell_label,
        gamma: gamma.to_string(),
        pass: report.ok,
        matching_decomposition: decomp.label(),
        certificate_digest: if report.ok { Some(report.digest()) } else { None },
        witness: report.witness,
    })
}

/// Index of the block face of `big` containing block face `fi` of `small`.
fn containing_face_index(big: &SExt, small: &SExt, fi: usize) -> usize {
    let sface = &small.block_faces[fi];
    big.block_faces
        .iter()
        .position(|bface| sface.iter().all(|v| bface.contains(v)))
        .expect("small faces lie in big faces")
}

/// Fold leaf comparison elements into the nested pair shape of the fold
/// product of the cospan base.
fn assemble_nested(leaves: &[GEl], tl: &SExt) -> GEl {
    assert_eq!(leaves.len(), tl.block_faces.len());
    let mut acc = leaves[0].clone();
    for leaf in &leaves[1..] {
        acc = GEl::Pair(Box::new(acc), Box::new(leaf.clone()));
    }
    acc
}

/// Wrap a (possibly corrupted) level family as the evaluation of the full
/// simplex: the single block face is the whole vertex range.
pub fn s_extended_with_root_family(
    ctx: &Ctx,
    complex: &SimplicialSubset,
    gamma: &DimVector,
    family: FlagFamily,
) -> Result<SExt> {
    let _ = ctx;
    let blocks = crate::waldhausen::tiling_blocks(complex)?;
    let block_faces: Vec<Vec<u8>> = blocks.iter().filter(|f| f.len() >= 2).cloned().collect();
    if block_faces.len() != 1 {
        return Err(Error::BadSimplicial(
            "root-family override needs a single block face".into(),
        ));
    }
    let totals = family.totals();
    let keep: Vec<bool> = totals.iter().map(|t| t == gamma).collect();
    let (final_g, final_remap) = filter_components(&family.groupoid, &keep);
    let comp_patterns: Vec<Vec<Vec<DimVector>>> = family
        .patterns
        .iter()
        .zip(&keep)
        .filter(|(_, k)| **k)
        .map(|(pat, _)| vec![pat.clone()])
        .collect();
    let stage = family.groupoid.clone();
    let proj = GroupoidFunctor {
        source: final_g.clone(),
        target: family.groupoid.clone(),
        comp_map: (0..family.groupoid.components.len() as u32)
            .filter(|c| keep[*c as usize])
            .collect(),
        obj_maps: family
            .groupoid
            .components
            .iter()
            .enumerate()
            .filter(|(i, _)| keep[*i])
            .map(|(_, c)| (0..c.size() as u32).collect())
            .collect(),
        mor_maps: (0..final_g.components.len())
            .map(|_| crate::groupoid::MorMap::Identity)
            .collect(),
    };
    Ok(SExt {
        complex: complex.clone(),
        gamma: gamma.clone(),
        groupoid: final_g,
        block_faces,
        face_families: vec![family],
        face_projections: vec![proj],
        stages: vec![stage],
        final_remap,
        comp_patterns,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::waldhausen::s_level;

    fn ctx() -> Ctx {
        Ctx::default()
    }

    fn p2() -> Prime {
        Prime::new(2).unwrap()
    }

    #[test]
    fn decomposition_counts() {
        assert_eq!(enumerate_decompositions(3).unwrap().len(), 1);
        assert_eq!(enumerate_decompositions(4).unwrap().len(), 3);
        assert_eq!(enumerate_decompositions(5).unwrap().len(), 11);
    }

    #[test]
    fn decomposition_cells_are_sane() {
        for decomp in enumerate_decompositions(5).unwrap() {
            assert!(decomp.polygons.iter().all(|p| p.len() >= 3));
            let mut edge_count = 0usize;
            for p in &decomp.polygons {
                for i in 0..p.len() {
                    let a = p[i];
                    let b = p[(i + 1) % p.len()];
                    let (lo, hi) = (a.min(b), a.max(b));
                    let boundary = hi - lo == 1 || (lo == 0 && hi == 4);
                    if boundary {
                        edge_count += 1;
                    }
                }
            }
            assert_eq!(edge_count, 5, "{}", decomp.label());
        }
    }

    #[test]
    fn trivial_decomposition_alpha_is_identity_like() {
        let c = ctx();
        let q = Quiver::linear(1);
        let gamma = DimVector(vec![2]);
        let decomp = &enumerate_decompositions(3).unwrap()[0];
        let source = s_level(&c, &q, p2(), 2, &gamma).unwrap();
        let sp = s_p(&c, &q, p2(), decomp, &gamma, &source).unwrap();
        sp.alpha.validate().unwrap();
        let report = is_equivalence(&sp.alpha, &c.caps).unwrap();
        assert!(report.ok);
        for (ci, comp) in source.groupoid.components.iter().enumerate() {
            for o in 0..comp.size() as u32 {
                let (tci, toi) = sp.alpha.apply_obj(ci as u32, o);
                assert_eq!(
                    sp.groupoid.components[tci as usize].objects[toi as usize],
                    comp.objects[o as usize]
                );
            }
        }
    }

    #[test]
    fn square_decompositions_pass_a1() {
        let c = ctx();
        let q = Quiver::linear(1);
        let gamma = DimVector(vec![2]);
        for decomp in enumerate_decompositions(4).unwrap() {
            let source = s_level(&c, &q, p2(), 3, &gamma).unwrap();
            let report = check_decomposition(&c, &q, p2(), &decomp, &gamma, &source).unwrap();
            assert!(
                report.pass,
                "{} γ={} {:?}",
                report.decomposition, report.gamma, report.witness
            );
        }
    }

    #[test]
    fn corrupted_source_fails_with_witness() {
        let c = ctx();
        let q = Quiver::linear(1);
        let gamma = DimVector(vec![2]);
        let decomp = enumerate_decompositions(4).unwrap()[1].clone();
        let source = s_level(&c, &q, p2(), 3, &gamma).unwrap();
        let (comp, orbit) = pick_orbit(&source, 7);
        let corrupted = drop_orbit(&source, comp, orbit);
        let report = check_decomposition(&c, &q, p2(), &decomp, &gamma, &corrupted).unwrap();
        assert!(!report.pass);
        assert!(report.witness.is_some());
    }

    #[test]
    fn matching_decomposition_of_a_two_cell() {
        let f = MonotoneMap::from_fibers(&[2, 1]);
        let d = matching_decomposition(&f);
        assert_eq!(d.n, 4);
        assert_eq!(d.polygons, vec![vec![0, 1, 2], vec![0, 2, 3]]);
    }

    #[test]
    fn square_check_trivial_cell_passes() {
        let c = ctx();
        let q = Quiver::linear(1);
        let gamma = DimVector(vec![2]);
        let f = MonotoneMap::from_fibers(&[2]); // <2> -> <1>
        let g = MonotoneMap::identity(1);
        let report = hgeo_square_check(&c, &q, p2(), &f, &g, &gamma, None).unwrap();
        assert!(report.pass, "{:?}", report.witness);
    }

    #[test]
    fn square_check_matches_polygonal_verdict() {
        let c = ctx();
        let q = Quiver::linear(1);
        let gamma = DimVector(vec![2]);
        let f = MonotoneMap::from_fibers(&[2, 1]);
        let g = MonotoneMap::from_fibers(&[2]);
        let sq = hgeo_square_check(&c, &q, p2(), &f, &g, &gamma, None).unwrap();
        assert!(sq.pass, "{:?}", sq.witness);
        let decomp = matching_decomposition(&f);
        let source = s_level(&c, &q, p2(), 3, &gamma).unwrap();
        let poly = check_decomposition(&c, &q, p2(), &decomp, &gamma, &source).unwrap();
        assert_eq!(sq.pass, poly.pass);
    }
}
