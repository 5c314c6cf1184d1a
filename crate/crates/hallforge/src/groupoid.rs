//! Finite groupoids presented as disjoint unions of action groupoids, with
//! functors, pseudo-pullbacks, equivalence certificates, groupoid
//! cardinality and the pull-push transfer on functions.
//!
//! Every groupoid here is a finite disjoint union of components, each the
//! action groupoid of a finite group on a finite object set. Groups are
//! either explicit (a materialized element list) or formal binary products;
//! products arise from pseudo-pullbacks and are never materialized.
//!
//! Functors carry per-component morphism maps. A morphism map may be a
//! plain homomorphism table or an object-dependent cocycle
//! `c(g, x)` with `c(gh, x) = c(g, h.x) c(h, x)`; cocycles are exactly what
//! restriction-to-subquotient functors between flag groupoids need.

use crate::ffq::{FqMatrix, Prime};
use crate::quiver::Quiver;
use crate::rep::{GlTuple, SubRep};
use crate::{Caps, Error, Result};
use num::{BigRational, BigUint, One, Zero};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

pub type Rational = BigRational;

pub fn rational_to_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// A group element: a leaf index into an explicit group's element list, or
/// a pair of elements of a product.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GEl {
    Leaf(u32),
    Pair(Box<GEl>, Box<GEl>),
}

impl fmt::Debug for GEl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GEl::Leaf(i) => write!(f, "{i}"),
            GEl::Pair(a, b) => write!(f, "({a:?},{b:?})"),
        }
    }
}

/// An explicitly materialized finite group.
pub enum GroupElems {
    /// Tuples of invertible matrices, one per quiver vertex.
    Matrices {
        prime: Prime,
        dims: Vec<usize>,
        elements: Vec<GlTuple>,
        index: HashMap<GlTuple, u32>,
        inverse: Vec<u32>,
    },
    /// An abstract group given by its multiplication table.
    Table {
        mul: Vec<Vec<u32>>,
        inv: Vec<u32>,
        id: u32,
    },
}

pub struct ExplicitGroup {
    pub elems: GroupElems,
    generators: Vec<u32>,
}

impl ExplicitGroup {
    /// The product GL group for per-vertex dimensions over F_p, all elements
    /// materialized in canonical order.
    pub fn gl_product(dims: &[usize], p: Prime, caps: &Caps) -> Result<ExplicitGroup> {
        let order = crate::rep::group_order(dims, p);
        if order > caps.max_group as u128 {
            return Err(Error::CapExceeded {
                what: format!("GL product group for dims {dims:?} over F_{p}"),
                estimate: order.to_string(),
                cap: caps.max_group.to_string(),
            });
        }
        let per_vertex: Vec<Vec<FqMatrix>> = dims
            .iter()
            .map(|&d| {
                let mut v: Vec<FqMatrix> = FqMatrix::enumerate_all(d, d, p)
                    .filter(|m| m.is_invertible())
                    .collect();
                v.sort();
                v
            })
            .collect();
        let mut elements: Vec<GlTuple> = vec![Vec::new()];
        for glist in &per_vertex {
            let mut next = Vec::with_capacity(elements.len() * glist.len());
            for tuple in &elements {
                for m in glist {
                    let mut t = tuple.clone();
                    t.push(m.clone());
                    next.push(t);
                }
            }
            elements = next;
        }
        let index: HashMap<GlTuple, u32> = elements
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i as u32))
            .collect();
        let inverse: Vec<u32> = elements
            .iter()
            .map(|e| {
                let inv: GlTuple = e.iter().map(|m| m.inverse().expect("invertible")).collect();
                index[&inv]
            })
            .collect();
        // generators: transvections and one diagonal unit per vertex
        let gens = crate::rep::gl_generators(dims, p);
        let generators: Vec<u32> = gens.iter().map(|(g, _)| index[g]).collect();
        Ok(ExplicitGroup {
            elems: GroupElems::Matrices {
                prime: p,
                dims: dims.to_vec(),
                elements,
                index,
                inverse,
            },
            generators,
        })
    }

    /// The cyclic group Z/n as a multiplication table.
    pub fn cyclic(n: u32) -> ExplicitGroup {
        let mul = (0..n)
            .map(|a| (0..n).map(|b| (a + b) % n).collect())
            .collect();
        let inv = (0..n).map(|a| (n - a) % n).collect();
        ExplicitGroup {
            elems: GroupElems::Table { mul, inv, id: 0 },
            generators: if n > 1 { vec![1] } else { vec![] },
        }
    }

    pub fn trivial() -> ExplicitGroup {
        ExplicitGroup::cyclic(1)
    }

    pub fn order(&self) -> u64 {
        match &self.elems {
            GroupElems::Matrices { elements, .. } => elements.len() as u64,
            GroupElems::Table { inv, .. } => inv.len() as u64,
        }
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        match &self.elems {
            GroupElems::Matrices {
                elements, index, ..
            } => {
                let prod: GlTuple = elements[a as usize]
                    .iter()
                    .zip(&elements[b as usize])
                    .map(|(x, y)| x.mul(y))
                    .collect();
                index[&prod]
            }
            GroupElems::Table { mul, .. } => mul[a as usize][b as usize],
        }
    }

    pub fn inv(&self, a: u32) -> u32 {
        match &self.elems {
            GroupElems::Matrices { inverse, .. } => inverse[a as usize],
            GroupElems::Table { inv, .. } => inv[a as usize],
        }
    }

    pub fn id(&self) -> u32 {
        match &self.elems {
            GroupElems::Matrices { index, elements, .. } => {
                // identity tuple
                let e: GlTuple = elements[0]
                    .iter()
                    .map(|m| FqMatrix::identity(m.rows, m.prime()))
                    .collect();
                index[&e]
            }
            GroupElems::Table { id, .. } => *id,
        }
    }

    pub fn matrix_tuple(&self, a: u32) -> Option<&GlTuple> {
        match &self.elems {
            GroupElems::Matrices { elements, .. } => Some(&elements[a as usize]),
            GroupElems::Table { .. } => None,
        }
    }

    pub fn tuple_index(&self, t: &GlTuple) -> Option<u32> {
        match &self.elems {
            GroupElems::Matrices { index, .. } => index.get(t).copied(),
            GroupElems::Table { .. } => None,
        }
    }
}

/// A finite group, possibly a formal product.
#[derive(Clone)]
pub enum Group {
    Explicit(Arc<ExplicitGroup>),
    Product(Arc<Group>, Arc<Group>),
}

impl Group {
    pub fn trivial() -> Group {
        Group::Explicit(Arc::new(ExplicitGroup::trivial()))
    }

    pub fn order(&self) -> BigUint {
        match self {
            Group::Explicit(g) => BigUint::from(g.order()),
            Group::Product(a, b) => a.order() * b.order(),
        }
    }

    pub fn id(&self) -> GEl {
        match self {
            Group::Explicit(g) => GEl::Leaf(g.id()),
            Group::Product(a, b) => GEl::Pair(Box::new(a.id()), Box::new(b.id())),
        }
    }

    pub fn mul(&self, x: &GEl, y: &GEl) -> GEl {
        match (self, x, y) {
            (Group::Explicit(g), GEl::Leaf(a), GEl::Leaf(b)) => GEl::Leaf(g.mul(*a, *b)),
            (Group::Product(ga, gb), GEl::Pair(xa, xb), GEl::Pair(ya, yb)) => GEl::Pair(
                Box::new(ga.mul(xa, ya)),
                Box::new(gb.mul(xb, yb)),
            ),
            _ => panic!("group element shape does not match group"),
        }
    }

    pub fn inv(&self, x: &GEl) -> GEl {
        match (self, x) {
            (Group::Explicit(g), GEl::Leaf(a)) => GEl::Leaf(g.inv(*a)),
            (Group::Product(ga, gb), GEl::Pair(a, b)) => {
                GEl::Pair(Box::new(ga.inv(a)), Box::new(gb.inv(b)))
            }
            _ => panic!("group element shape does not match group"),
        }
    }

    pub fn generators(&self) -> Vec<GEl> {
        match self {
            Group::Explicit(g) => g.generators.iter().map(|&i| GEl::Leaf(i)).collect(),
            Group::Product(a, b) => {
                let mut out: Vec<GEl> = a
                    .generators()
                    .into_iter()
                    .map(|g| GEl::Pair(Box::new(g), Box::new(b.id())))
                    .collect();
                out.extend(
                    b.generators()
                        .into_iter()
                        .map(|g| GEl::Pair(Box::new(a.id()), Box::new(g))),
                );
                out
            }
        }
    }

    /// All elements, if the group is small enough to list.
    pub fn elements(&self, cap: u64) -> Result<Vec<GEl>> {
        let order = self.order();
        if order > BigUint::from(cap) {
            return Err(Error::CapExceeded {
                what: "group element enumeration".into(),
                estimate: order.to_string(),
                cap: cap.to_string(),
            });
        }
        Ok(match self {
            Group::Explicit(g) => (0..g.order() as u32).map(GEl::Leaf).collect(),
            Group::Product(a, b) => {
                let ea = a.elements(cap)?;
                let eb = b.elements(cap)?;
                let mut out = Vec::with_capacity(ea.len() * eb.len());
                for x in &ea {
                    for y in &eb {
                        out.push(GEl::Pair(Box::new(x.clone()), Box::new(y.clone())));
                    }
                }
                out
            }
        })
    }
}

/// A flag object: a representation point together with a chain of nested
/// invariant subrepresentations (cumulative, excluding 0 and the whole).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct FlagObj {
    pub point: Vec<FqMatrix>,
    pub chain: Vec<SubRep>,
}

/// An object of a groupoid component.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Obj {
    Token(u32),
    Flag(FlagObj),
    /// pseudo-pullback triple: object indices in the two factor components
    /// plus the mediating morphism in the base component.
    Triple(u32, u32, GEl),
}

/// Identifying metadata for a component; drives deterministic ordering and
/// component matching across constructions.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum CompTag {
    Point,
    Token(String),
    /// flags of the given step pattern (per-step dimension vectors, flattened)
    Flag(Vec<Vec<usize>>),
    Pullback(u32, u32),
}

pub struct PullbackCtx {
    pub x: Arc<Component>,
    pub y: Arc<Component>,
    pub z: Arc<Component>,
    pub f_obj: Vec<u32>,
    pub f_mor: MorMap,
    pub g_obj: Vec<u32>,
    pub g_mor: MorMap,
}

pub enum ActionKind {
    /// per-element permutation tables, indexed [leaf element][object]
    Perm(Vec<Vec<u32>>),
    /// flag objects acted on by matrix tuples of an explicit GL product
    Matrix { quiver: Arc<Quiver>, prime: Prime },
    Pullback(Arc<PullbackCtx>),
}

/// One action-groupoid component.
pub struct Component {
    pub group: Group,
    pub objects: Vec<Obj>,
    pub index: HashMap<Obj, u32>,
    pub kind: ActionKind,
    pub tag: CompTag,
}

impl Component {
    pub fn new(group: Group, objects: Vec<Obj>, kind: ActionKind, tag: CompTag) -> Component {
        let index = objects
            .iter()
            .enumerate()
            .map(|(i, o)| (o.clone(), i as u32))
            .collect();
        Component {
            group,
            objects,
            index,
            kind,
            tag,
        }
    }

    /// Single object, trivial group.
    pub fn point(tag: CompTag) -> Component {
        Component::new(
            Group::trivial(),
            vec![Obj::Token(0)],
            ActionKind::Perm(vec![vec![0]]),
            tag,
        )
    }

    pub fn size(&self) -> usize {
        self.objects.len()
    }

    /// Action of a group element on an object, by index.
    pub fn act(&self, g: &GEl, obj: u32) -> u32 {
        match (&self.kind, g) {
            (ActionKind::Perm(tables), GEl::Leaf(i)) => tables[*i as usize][obj as usize],
            (ActionKind::Matrix { quiver, .. }, GEl::Leaf(i)) => {
                let Group::Explicit(grp) = &self.group else {
                    panic!("matrix action needs an explicit group")
                };
                let tuple = grp.matrix_tuple(*i).expect("matrix group");
                let inv_idx = grp.inv(*i);
                let inv = grp.matrix_tuple(inv_idx).expect("matrix group");
                let Obj::Flag(f) = &self.objects[obj as usize] else {
                    panic!("matrix action needs flag objects")
                };
                let point = crate::rep::act_point(&f.point, tuple, inv, quiver);
                let chain = f
                    .chain
                    .iter()
                    .map(|sub| SubRep {
                        spaces: sub
                            .spaces
                            .iter()
                            .enumerate()
                            .map(|(v, s)| s.image_under(&tuple[v]))
                            .collect(),
                    })
                    .collect();
                self.index[&Obj::Flag(FlagObj { point, chain })]
            }
            (ActionKind::Pullback(ctx), GEl::Pair(gx, gy)) => {
                let Obj::Triple(x, y, phi) = &self.objects[obj as usize] else {
                    panic!("pullback action needs triple objects")
                };
                let nx = ctx.x.act(gx, *x);
                let ny = ctx.y.act(gy, *y);
                let rho_f = ctx.f_mor.apply(gx, *x);
                let rho_g = ctx.g_mor.apply(gy, *y);
                let zg = &ctx.z.group;
                let nphi = zg.mul(&rho_g, &zg.mul(phi, &zg.inv(&rho_f)));
                self.index[&Obj::Triple(nx, ny, nphi)]
            }
            _ => panic!("element shape does not match action"),
        }
    }

    /// Orbits of the group action, each sorted, in canonical order.
    pub fn orbits(&self) -> Vec<Vec<u32>> {
        let gens = self.group.generators();
        let mut seen = vec![false; self.objects.len()];
        let mut orbits = Vec::new();
        for start in 0..self.objects.len() as u32 {
            if seen[start as usize] {
                continue;
            }
            let mut orbit = vec![start];
            seen[start as usize] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(o) = queue.pop_front() {
                for g in &gens {
                    let n = self.act(g, o);
                    if !seen[n as usize] {
                        seen[n as usize] = true;
                        orbit.push(n);
                        queue.push_back(n);
                    }
                }
            }
            orbit.sort_unstable();
            orbits.push(orbit);
        }
        orbits
    }

    /// Stabilizer subgroup of an object, as an explicit element list.
    pub fn stabilizer(&self, obj: u32, caps: &Caps) -> Result<Vec<GEl>> {
        match &self.kind {
            ActionKind::Perm(_) => {
                let elems = self.group.elements(caps.max_group)?;
                Ok(elems
                    .into_iter()
                    .filter(|g| self.act(g, obj) == obj)
                    .collect())
            }
            ActionKind::Matrix { quiver, prime } => {
                let Group::Explicit(grp) = &self.group else {
                    panic!("matrix action needs an explicit group")
                };
                let Obj::Flag(f) = &self.objects[obj as usize] else {
                    panic!("matrix action needs flag objects")
                };
                let dims: Vec<usize> = match &grp.elems {
                    GroupElems::Matrices { dims, .. } => dims.clone(),
                    _ => panic!("matrix group expected"),
                };
                let tuples =
                    stabilizer_tuples(quiver, *prime, &dims, f, caps)?;
                Ok(tuples
                    .into_iter()
                    .map(|t| GEl::Leaf(grp.tuple_index(&t).expect("stabilizer element listed")))
                    .collect())
            }
            ActionKind::Pullback(ctx) => {
                let Obj::Triple(x, y, phi) = &self.objects[obj as usize] else {
                    panic!("pullback action needs triples")
                };
                let sx = ctx.x.stabilizer(*x, caps)?;
                let sy = ctx.y.stabilizer(*y, caps)?;
                let zg = &ctx.z.group;
                let mut out = Vec::new();
                for gx in &sx {
                    let rho_f = ctx.f_mor.apply(gx, *x);
                    let want = zg.mul(phi, &zg.mul(&rho_f, &zg.inv(phi)));
                    for gy in &sy {
                        let rho_g = ctx.g_mor.apply(gy, *y);
                        if rho_g == want {
                            out.push(GEl::Pair(Box::new(gx.clone()), Box::new(gy.clone())));
                        }
                    }
                }
                Ok(out)
            }
        }
    }
}

/// Invertible endomorphism tuples of a flag object: solutions of the
/// intertwining equations filtered by invertibility and chain preservation.
fn stabilizer_tuples(
    quiver: &Quiver,
    p: Prime,
    dims: &[usize],
    f: &FlagObj,
    caps: &Caps,
) -> Result<Vec<GlTuple>> {
    // unknowns: one d_i x d_i matrix per vertex
    let offsets: Vec<usize> = {
        let mut acc = 0;
        let mut v = Vec::new();
        for &d in dims {
            v.push(acc);
            acc += d * d;
        }
        v
    };
    let n_unknowns: usize = dims.iter().map(|&d| d * d).sum();
    // equations: g_t y_h = y_h g_s entrywise
    let mut rows: Vec<Vec<i64>> = Vec::new();
    for (h, m) in quiver.arrows.iter().zip(&f.point) {
        let (dt, ds) = (dims[h.tgt], dims[h.src]);
        for r in 0..dt {
            for c in 0..ds {
                let mut row = vec![0i64; n_unknowns];
                // (g_t y)_{rc} = sum_k g_t[r,k] y[k,c]
                for k in 0..dt {
                    row[offsets[h.tgt] + r * dt + k] += m.at(k, c) as i64;
                }
                // (y g_s)_{rc} = sum_k y[r,k] g_s[k,c]
                for k in 0..ds {
                    row[offsets[h.src] + k * ds + c] -= m.at(r, k) as i64;
                }
                rows.push(row);
            }
        }
    }
    let sys = FqMatrix::from_rows(&rows, p);
    let kernel = if n_unknowns == 0 {
        FqMatrix::zero(0, 0, p)
    } else if rows.is_empty() {
        FqMatrix::identity(n_unknowns, p)
    } else {
        sys.kernel_basis()
    };
    let dim = kernel.rows;
    let count = (p.get() as u64).checked_pow(dim as u32).unwrap_or(u64::MAX);
    caps.check_points("endomorphism space enumeration", count)?;
    let mut out = Vec::new();
    for code in 0..count {
        let mut coeffs = vec![0u8; dim];
        let mut c = code;
        for x in coeffs.iter_mut() {
            *x = (c % p.get() as u64) as u8;
            c /= p.get() as u64;
        }
        let mut flat = vec![0i64; n_unknowns];
        for (k, &ck) in coeffs.iter().enumerate() {
            if ck != 0 {
                for j in 0..n_unknowns {
                    flat[j] += ck as i64 * kernel.at(k, j) as i64;
                }
            }
        }
        let tuple: GlTuple = dims
            .iter()
            .enumerate()
            .map(|(i, &d)| {
                let mut m = FqMatrix::zero(d, d, p);
                for r in 0..d {
                    for cidx in 0..d {
                        m.set(r, cidx, ((flat[offsets[i] + r * d + cidx]) % p.get() as i64) as u8);
                    }
                }
                m
            })
            .collect();
        if !tuple.iter().all(|m| m.is_invertible()) {
            continue;
        }
        // must fix every chain member setwise
        let fixes_chain = f.chain.iter().all(|sub| {
            sub.spaces
                .iter()
                .enumerate()
                .all(|(v, s)| s.image_under(&tuple[v]) == *s)
        });
        if fixes_chain {
            out.push(tuple);
        }
    }
    Ok(out)
}

/// A finite groupoid: a disjoint union of action components.
#[derive(Clone)]
pub struct FiniteGroupoid {
    pub components: Vec<Arc<Component>>,
}

/// A reference to an isomorphism class: component index plus the minimal
/// object index of its orbit.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ClassId {
    pub comp: u32,
    pub rep_obj: u32,
}

impl FiniteGroupoid {
    pub fn one_component(c: Component) -> FiniteGroupoid {
        FiniteGroupoid {
            components: vec![Arc::new(c)],
        }
    }

    pub fn point() -> FiniteGroupoid {
        FiniteGroupoid::one_component(Component::point(CompTag::Point))
    }

    pub fn n_objects(&self) -> usize {
        self.components.iter().map(|c| c.size()).sum()
    }

    /// Groupoid cardinality: sum over components of |objects| / |group|.
    /// (Equivalently, the sum of 1/|Aut| over isomorphism classes.)
    pub fn cardinality(&self) -> Rational {
        let mut acc = Rational::zero();
        for c in &self.components {
            if c.size() == 0 {
                continue;
            }
            let num = BigUint::from(c.size() as u64);
            acc += Rational::new(num.into(), c.group.order().into());
        }
        acc
    }

    /// Cardinality computed the slow way, as the sum of inverse stabilizer
    /// orders over orbit representatives. Test oracle for `cardinality`.
    pub fn cardinality_by_orbits(&self) -> Rational {
        let mut acc = Rational::zero();
        for c in &self.components {
            let order = c.group.order();
            for orbit in c.orbits() {
                let stab = &order / BigUint::from(orbit.len() as u64);
                acc += Rational::new(BigUint::one().into(), stab.into());
            }
        }
        acc
    }

    /// All isomorphism classes with orbit sizes, in canonical order.
    pub fn iso_classes(&self) -> Vec<(ClassId, u64)> {
        let mut out = Vec::new();
        for (ci, c) in self.components.iter().enumerate() {
            for orbit in c.orbits() {
                out.push((
                    ClassId {
                        comp: ci as u32,
                        rep_obj: orbit[0],
                    },
                    orbit.len() as u64,
                ));
            }
        }
        out
    }

    /// Map each object to the ClassId of its orbit.
    pub fn class_lookup(&self) -> HashMap<(u32, u32), ClassId> {
        let mut map = HashMap::new();
        for (ci, c) in self.components.iter().enumerate() {
            for orbit in c.orbits() {
                let id = ClassId {
                    comp: ci as u32,
                    rep_obj: orbit[0],
                };
                for &o in &orbit {
                    map.insert((ci as u32, o), id);
                }
            }
        }
        map
    }

    /// |Aut| of the class of the given object.
    pub fn aut_order_of(&self, comp: u32, obj: u32) -> BigUint {
        let c = &self.components[comp as usize];
        // orbit of obj
        let gens = c.group.generators();
        let mut seen = HashMap::new();
        seen.insert(obj, ());
        let mut queue = VecDeque::from([obj]);
        while let Some(o) = queue.pop_front() {
            for g in &gens {
                let n = c.act(g, o);
                if !seen.contains_key(&n) {
                    seen.insert(n, ());
                    queue.push_back(n);
                }
            }
        }
        c.group.order() / BigUint::from(seen.len() as u64)
    }
}

/// A morphism map of a functor, per source component.
pub enum MorMap {
    /// object-independent homomorphism, indexed by leaf elements
    Hom(Vec<GEl>),
    /// object-dependent cocycle, indexed [leaf element][object]
    Cocycle(Vec<Vec<GEl>>),
    /// projections out of a product group
    First,
    Second,
    /// fan-out into a product group
    Pair(Box<MorMap>, Box<MorMap>),
    /// composite: outer after inner, transporting the object along
    /// `inner_obj`
    Through {
        outer: Box<MorMap>,
        inner: Box<MorMap>,
        inner_obj: Vec<u32>,
    },
    Identity,
    /// constant map to the identity of the target group
    Const(GEl),
}

impl MorMap {
    pub fn apply(&self, g: &GEl, obj: u32) -> GEl {
        match self {
            MorMap::Hom(table) => match g {
                GEl::Leaf(i) => table[*i as usize].clone(),
                _ => panic!("Hom mor-map needs leaf elements"),
            },
            MorMap::Cocycle(table) => match g {
                GEl::Leaf(i) => table[*i as usize][obj as usize].clone(),
                _ => panic!("Cocycle mor-map needs leaf elements"),
            },
            MorMap::First => match g {
                GEl::Pair(a, _) => (**a).clone(),
                _ => panic!("First mor-map needs pair elements"),
            },
            MorMap::Second => match g {
                GEl::Pair(_, b) => (**b).clone(),
                _ => panic!("Second mor-map needs pair elements"),
            },
            MorMap::Pair(f, s) => GEl::Pair(
                Box::new(f.apply(g, obj)),
                Box::new(s.apply(g, obj)),
            ),
            MorMap::Through {
                outer,
                inner,
                inner_obj,
            } => {
                let mid = inner.apply(g, obj);
                outer.apply(&mid, inner_obj[obj as usize])
            }
            MorMap::Identity => g.clone(),
            MorMap::Const(e) => {
                let _ = g;
                e.clone()
            }
        }
    }
}

/// A functor between finite groupoids: componentwise object maps plus
/// morphism maps (homomorphisms or cocycles).
pub struct GroupoidFunctor {
    pub source: Arc<FiniteGroupoid>,
    pub target: Arc<FiniteGroupoid>,
    pub comp_map: Vec<u32>,
    pub obj_maps: Vec<Vec<u32>>,
    pub mor_maps: Vec<MorMap>,
}

impl GroupoidFunctor {
    pub fn identity(g: Arc<FiniteGroupoid>) -> GroupoidFunctor {
        let comp_map = (0..g.components.len() as u32).collect();
        let obj_maps = g
            .components
            .iter()
            .map(|c| (0..c.size() as u32).collect())
            .collect();
        let mor_maps = g.components.iter().map(|_| MorMap::Identity).collect();
        GroupoidFunctor {
            source: g.clone(),
            target: g,
            comp_map,
            obj_maps,
            mor_maps,
        }
    }

    pub fn apply_obj(&self, comp: u32, obj: u32) -> (u32, u32) {
        (
            self.comp_map[comp as usize],
            self.obj_maps[comp as usize][obj as usize],
        )
    }

    pub fn apply_mor(&self, comp: u32, g: &GEl, obj: u32) -> GEl {
        self.mor_maps[comp as usize].apply(g, obj)
    }

    /// Equivariance and the cocycle law, checked on generators. Generator
    /// checks extend to all elements by induction on word length.
    pub fn validate(&self) -> Result<()> {
        for (ci, comp) in self.source.components.iter().enumerate() {
            let tc = &self.target.components[self.comp_map[ci] as usize];
            let gens = comp.group.generators();
            for g in &gens {
                for o in 0..comp.size() as u32 {
                    let lhs = self.obj_maps[ci][comp.act(g, o) as usize];
                    let rho = self.apply_mor(ci as u32, g, o);
                    let rhs = tc.act(&rho, self.obj_maps[ci][o as usize]);
                    if lhs != rhs {
                        return Err(Error::BadInput(format!(
                            "functor is not equivariant at component {ci}, object {o}"
                        )));
                    }
                }
            }
            // cocycle law c(g h, x) = c(g, h.x) c(h, x) for generators g and
            // a sample of h (all elements when the group is explicit & small)
            if let Group::Explicit(grp) = &comp.group {
                if grp.order() <= 512 {
                    for g in &gens {
                        for h_idx in 0..grp.order() as u32 {
                            let h = GEl::Leaf(h_idx);
                            let gh = comp.group.mul(g, &h);
                            for o in 0..comp.size() as u32 {
                                let lhs = self.apply_mor(ci as u32, &gh, o);
                                let ho = comp.act(&h, o);
                                let rhs = tc.group.mul(
                                    &self.apply_mor(ci as u32, g, ho),
                                    &self.apply_mor(ci as u32, &h, o),
                                );
                                if lhs != rhs {
                                    return Err(Error::BadInput(format!(
                                        "morphism map violates the cocycle law at component {ci}"
                                    )));
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// g_after ∘ f.
pub fn compose(g_after: &GroupoidFunctor, f: &GroupoidFunctor) -> GroupoidFunctor {
    let comp_map: Vec<u32> = f
        .comp_map
        .iter()
        .map(|&c| g_after.comp_map[c as usize])
        .collect();
    let obj_maps: Vec<Vec<u32>> = f
        .comp_map
        .iter()
        .enumerate()
        .map(|(ci, &fc)| {
            f.obj_maps[ci]
                .iter()
                .map(|&o| g_after.obj_maps[fc as usize][o as usize])
                .collect()
        })
        .collect();
    let mor_maps: Vec<MorMap> = f
        .comp_map
        .iter()
        .enumerate()
        .map(|(ci, &fc)| MorMap::Through {
            outer: Box::new(clone_mormap(&g_after.mor_maps[fc as usize])),
            inner: Box::new(clone_mormap(&f.mor_maps[ci])),
            inner_obj: f.obj_maps[ci].clone(),
        })
        .collect();
    GroupoidFunctor {
        source: f.source.clone(),
        target: g_after.target.clone(),
        comp_map,
        obj_maps,
        mor_maps,
    }
}

pub fn clone_mormap(m: &MorMap) -> MorMap {
    match m {
        MorMap::Hom(t) => MorMap::Hom(t.clone()),
        MorMap::Cocycle(t) => MorMap::Cocycle(t.clone()),
        MorMap::First => MorMap::First,
        MorMap::Second => MorMap::Second,
        MorMap::Pair(a, b) => MorMap::Pair(Box::new(clone_mormap(a)), Box::new(clone_mormap(b))),
        MorMap::Through {
            outer,
            inner,
            inner_obj,
        } => MorMap::Through {
            outer: Box::new(clone_mormap(outer)),
            inner: Box::new(clone_mormap(inner)),
            inner_obj: inner_obj.clone(),
        },
        MorMap::Identity => MorMap::Identity,
        MorMap::Const(e) => MorMap::Const(e.clone()),
    }
}

/// Functor equality: same component/object maps, and morphism maps agreeing
/// on all generators at all objects. Sufficient for homomorphic maps.
pub fn functors_equal(f: &GroupoidFunctor, g: &GroupoidFunctor) -> bool {
    if f.comp_map != g.comp_map || f.obj_maps != g.obj_maps {
        return false;
    }
    for (ci, comp) in f.source.components.iter().enumerate() {
        for gen in comp.group.generators() {
            for o in 0..comp.size() as u32 {
                if f.apply_mor(ci as u32, &gen, o) != g.apply_mor(ci as u32, &gen, o) {
                    return false;
                }
            }
        }
    }
    true
}

/// Pseudo-pullback of F: X -> Z, G: Y -> Z. Objects of the result are
/// triples (x, y, φ) with φ : F(x) -> G(y) a morphism of Z; the group is the
/// product, acting by (g,h)·(x,y,φ) = (gx, hy, ρ_G(h) φ ρ_F(g)^{-1}).
///
/// Returns the pullback with its two projections. The base Z must have
/// explicitly enumerable component groups.
pub fn pseudo_pullback(
    f: &GroupoidFunctor,
    g: &GroupoidFunctor,
    caps: &Caps,
) -> Result<(Arc<FiniteGroupoid>, GroupoidFunctor, GroupoidFunctor)> {
    let x = &f.source;
    let y = &g.source;
    let z = &f.target;

    let mut components = Vec::new();
    let mut proj_x: Vec<(u32, Vec<u32>)> = Vec::new(); // per new comp: (x comp, obj map)
    let mut proj_y: Vec<(u32, Vec<u32>)> = Vec::new();

    for (cxi, cx) in x.components.iter().enumerate() {
        for (cyi, cy) in y.components.iter().enumerate() {
            if f.comp_map[cxi] != g.comp_map[cyi] {
                continue;
            }
            let czi = f.comp_map[cxi] as usize;
            let cz = &z.components[czi];
            let z_elems = cz.group.elements(caps.max_group)?;

            // transporter table: for each needed z-object, the action of all
            // z-elements on it
            let mut act_table: HashMap<u32, Vec<(GEl, u32)>> = HashMap::new();
            let mut objects = Vec::new();
            // bucket y-objects by their image in Z
            let mut buckets: HashMap<u32, Vec<u32>> = HashMap::new();
            for oy in 0..cy.size() as u32 {
                buckets
                    .entry(g.obj_maps[cyi][oy as usize])
                    .or_default()
                    .push(oy);
            }
            for ox in 0..cx.size() as u32 {
                let zx = f.obj_maps[cxi][ox as usize];
                let moved = act_table.entry(zx).or_insert_with(|| {
                    z_elems
                        .iter()
                        .map(|k| (k.clone(), cz.act(k, zx)))
                        .collect()
                });
                for (k, zy) in moved.iter() {
                    if let Some(ys) = buckets.get(zy) {
                        for &oy in ys {
                            objects.push(Obj::Triple(ox, oy, k.clone()));
                        }
                    }
                }
            }
            objects.sort();
            let ctx = Arc::new(PullbackCtx {
                x: cx.clone(),
                y: cy.clone(),
                z: cz.clone(),
                f_obj: f.obj_maps[cxi].clone(),
                f_mor: clone_mormap(&f.mor_maps[cxi]),
                g_obj: g.obj_maps[cyi].clone(),
                g_mor: clone_mormap(&g.mor_maps[cyi]),
            });
            let group = Group::Product(
                Arc::new(cx.group.clone()),
                Arc::new(cy.group.clone()),
            );
            let comp = Component::new(
                group,
                objects,
                ActionKind::Pullback(ctx),
                CompTag::Pullback(cxi as u32, cyi as u32),
            );
            let ox_map: Vec<u32> = comp
                .objects
                .iter()
                .map(|o| match o {
                    Obj::Triple(a, _, _) => *a,
                    _ => unreachable!(),
                })
                .collect();
            let oy_map: Vec<u32> = comp
                .objects
                .iter()
                .map(|o| match o {
                    Obj::Triple(_, b, _) => *b,
                    _ => unreachable!(),
                })
                .collect();
            proj_x.push((cxi as u32, ox_map));
            proj_y.push((cyi as u32, oy_map));
            components.push(Arc::new(comp));
        }
    }

    let w = Arc::new(FiniteGroupoid { components });
    let p1 = GroupoidFunctor {
        source: w.clone(),
        target: x.clone(),
        comp_map: proj_x.iter().map(|(c, _)| *c).collect(),
        obj_maps: proj_x.into_iter().map(|(_, m)| m).collect(),
        mor_maps: w.components.iter().map(|_| MorMap::First).collect(),
    };
    let p2 = GroupoidFunctor {
        source: w.clone(),
        target: y.clone(),
        comp_map: proj_y.iter().map(|(c, _)| *c).collect(),
        obj_maps: proj_y.into_iter().map(|(_, m)| m).collect(),
        mor_maps: w.components.iter().map(|_| MorMap::Second).collect(),
    };
    Ok((w, p1, p2))
}

/// Mediating functor T -> W into a pseudo-pullback W of (f, g), given legs
/// a: T -> X, b: T -> Y and, per object, the comparison morphism
/// φ_t : f(a(t)) -> g(b(t)) supplied by `phi`.
pub fn mediate_into_pullback(
    w: &Arc<FiniteGroupoid>,
    f: &GroupoidFunctor,
    a: &GroupoidFunctor,
    b: &GroupoidFunctor,
    phi: impl Fn(u32, u32) -> GEl,
) -> Result<GroupoidFunctor> {
    let t = &a.source;
    let mut comp_map = Vec::new();
    let mut obj_maps = Vec::new();
    let mut mor_maps = Vec::new();
    let _ = f;
    for (ci, comp) in t.components.iter().enumerate() {
        let cx = a.comp_map[ci];
        let cy = b.comp_map[ci];
        // locate the pullback component tagged (cx, cy)
        let wi = w
            .components
            .iter()
            .position(|c| c.tag == CompTag::Pullback(cx, cy))
            .ok_or_else(|| {
                Error::BadInput(format!(
                    "no pullback component for pair ({cx}, {cy})"
                ))
            })?;
        let wc = &w.components[wi];
        let mut objs = Vec::with_capacity(comp.size());
        for o in 0..comp.size() as u32 {
            let triple = Obj::Triple(
                a.obj_maps[ci][o as usize],
                b.obj_maps[ci][o as usize],
                phi(ci as u32, o),
            );
            let idx = wc.index.get(&triple).ok_or_else(|| {
                Error::BadInput(
                    "mediating comparison morphism does not land in the pullback".into(),
                )
            })?;
            objs.push(*idx);
        }
        comp_map.push(wi as u32);
        obj_maps.push(objs);
        mor_maps.push(MorMap::Pair(
            Box::new(clone_mormap(&a.mor_maps[ci])),
            Box::new(clone_mormap(&b.mor_maps[ci])),
        ));
    }
    Ok(GroupoidFunctor {
        source: t.clone(),
        target: w.clone(),
        comp_map,
        obj_maps,
        mor_maps,
    })
}

/// One matched class in an equivalence certificate.
#[derive(Debug, Clone, Serialize)]
pub struct ClassMatch {
    pub source_class: String,
    pub target_class: String,
    pub aut_order: String,
}

/// The certificate (or counterexample) produced by `is_equivalence`.
#[derive(Debug, Clone, Serialize)]
pub struct EquivReport {
    pub ok: bool,
    pub classes: Vec<ClassMatch>,
    pub witness: Option<String>,
}

impl EquivReport {
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(serde_json::to_vec(self).expect("serializable"));
        hex::encode(&h.finalize()[..8])
    }
}

fn class_name(comp: u32, rep_obj: u32) -> String {
    format!("c{comp}.o{rep_obj}")
}

/// Equivalence check with certificate: F is an equivalence iff it induces a
/// bijection on isomorphism classes and, on each class, an isomorphism of
/// stabilizer groups. Stabilizers are compared by brute force: the induced
/// map must be injective with image of full order.
pub fn is_equivalence(fct: &GroupoidFunctor, caps: &Caps) -> Result<EquivReport> {
    let src = &fct.source;
    let tgt = &fct.target;
    let tgt_lookup = tgt.class_lookup();
    let src_classes = src.iso_classes();
    let tgt_classes = tgt.iso_classes();

    let mut matched: BTreeMap<ClassId, ClassId> = BTreeMap::new();
    let mut classes = Vec::new();
    for (cid, orbit_size) in &src_classes {
        let (tc, tobj) = fct.apply_obj(cid.comp, cid.rep_obj);
        let t_id = tgt_lookup[&(tc, tobj)];
        if let Some(prev) = matched.insert(t_id, *cid) {
            let _ = prev;
            return Ok(EquivReport {
                ok: false,
                classes,
                witness: Some(format!(
                    "two source classes map to target class {}",
                    class_name(t_id.comp, t_id.rep_obj)
                )),
            });
        }
        // stabilizer orders must agree
        let src_comp = &src.components[cid.comp as usize];
        let s_aut = src_comp.group.order() / BigUint::from(*orbit_size);
        let t_aut = tgt.aut_order_of(tc, tobj);
        if s_aut != t_aut {
            return Ok(EquivReport {
                ok: false,
                classes,
                witness: Some(format!(
                    "stabilizer orders differ on class {}: {} vs {}",
                    class_name(cid.comp, cid.rep_obj),
                    s_aut,
                    t_aut
                )),
            });
        }
        // stabilizer isomorphism: the induced map is a homomorphism into the
        // target stabilizer; injectivity plus equal order gives bijectivity.
        let stab = src_comp.stabilizer(cid.rep_obj, caps)?;
        assert_eq!(
            BigUint::from(stab.len() as u64),
            s_aut,
            "stabilizer enumeration matches orbit-stabilizer"
        );
        let mut image = std::collections::BTreeSet::new();
        let t_comp = &tgt.components[tc as usize];
        for s in &stab {
            let img = fct.apply_mor(cid.comp, s, cid.rep_obj);
            // image must fix the target object
            if t_comp.act(&img, tobj) != tobj {
                return Ok(EquivReport {
                    ok: false,
                    classes,
                    witness: Some(format!(
                        "morphism image does not stabilize the target on class {}",
                        class_name(cid.comp, cid.rep_obj)
                    )),
                });
            }
            image.insert(img);
        }
        if image.len() != stab.len() {
            return Ok(EquivReport {
                ok: false,
                classes,
                witness: Some(format!(
                    "stabilizer map not injective on class {}",
                    class_name(cid.comp, cid.rep_obj)
                )),
            });
        }
        classes.push(ClassMatch {
            source_class: class_name(cid.comp, cid.rep_obj),
            target_class: class_name(tc, tobj),
            aut_order: s_aut.to_string(),
        });
    }
    if matched.len() != tgt_classes.len() {
        let missing = tgt_classes
            .iter()
            .find(|(id, _)| !matched.contains_key(id))
            .map(|(id, _)| class_name(id.comp, id.rep_obj));
        return Ok(EquivReport {
            ok: false,
            classes,
            witness: missing.map(|m| format!("target class {m} is not hit")),
        });
    }
    Ok(EquivReport {
        ok: true,
        classes,
        witness: None,
    })
}

/// A correspondence A <- C -> B.
pub struct Correspondence {
    pub left: GroupoidFunctor,  // C -> A
    pub right: GroupoidFunctor, // C -> B
}

/// A finitely supported function on the isomorphism classes of a groupoid,
/// with exact rational values.
#[derive(Clone)]
pub struct FnSpace {
    pub base: Arc<FiniteGroupoid>,
    pub values: BTreeMap<ClassId, Rational>,
}

impl FnSpace {
    pub fn zero(base: Arc<FiniteGroupoid>) -> FnSpace {
        FnSpace {
            base,
            values: BTreeMap::new(),
        }
    }

    pub fn delta(base: Arc<FiniteGroupoid>, class: ClassId) -> FnSpace {
        let mut values = BTreeMap::new();
        values.insert(class, Rational::one());
        FnSpace { base, values }
    }

    pub fn get(&self, class: &ClassId) -> Rational {
        self.values.get(class).cloned().unwrap_or_else(Rational::zero)
    }
}

/// The inclusion of a single object (with trivial automorphisms) into a
/// groupoid; pseudo-pulling back along it computes the homotopy fiber over
/// that object.
pub fn object_inclusion(
    base: &Arc<FiniteGroupoid>,
    comp: u32,
    obj: u32,
) -> GroupoidFunctor {
    let pt = Arc::new(FiniteGroupoid::point());
    let id_el = base.components[comp as usize].group.id();
    GroupoidFunctor {
        source: pt,
        target: base.clone(),
        comp_map: vec![comp],
        obj_maps: vec![vec![obj]],
        mor_maps: vec![MorMap::Const(id_el)],
    }
}

/// Pull-push transfer along a correspondence: pull back along the left leg,
/// integrate along the fibers of the right leg with inverse-automorphism
/// weights.
pub fn transfer_apply(corr: &Correspondence, f: &FnSpace, caps: &Caps) -> Result<FnSpace> {
    let b = &corr.right.target;
    let a_lookup = corr.left.target.class_lookup();
    let mut out = FnSpace::zero(b.clone());
    for (b_class, _) in b.iso_classes() {
        let incl = object_inclusion(b, b_class.comp, b_class.rep_obj);
        let (fiber, to_c, _to_pt) = pseudo_pullback(&corr.right, &incl, caps)?;
        let mut acc = Rational::zero();
        for (w_class, orbit_size) in fiber.iso_classes() {
            let wc = &fiber.components[w_class.comp as usize];
            let aut = wc.group.order() / BigUint::from(orbit_size);
            // value of the pulled-back function at this fiber object
            let (cc, co) = to_c.apply_obj(w_class.comp, w_class.rep_obj);
            let (ac, ao) = corr.left.apply_obj(cc, co);
            let val = f.get(&a_lookup[&(ac, ao)]);
            if !val.is_zero() {
                acc += val * Rational::new(BigUint::one().into(), aut.into());
            }
        }
        if !acc.is_zero() {
            out.values.insert(b_class, acc);
        }
    }
    Ok(out)
}

/// Compose two correspondences via the pseudo-pullback of the middle legs.
pub fn compose_correspondences(
    c1: &Correspondence,
    c2: &Correspondence,
    caps: &Caps,
) -> Result<Correspondence> {
    let (_w, p1, p2) = pseudo_pullback(&c1.right, &c2.left, caps)?;
    Ok(Correspondence {
        left: compose(&c1.left, &p1),
        right: compose(&c2.right, &p2),
    })
}

/// JSON serialization of a small groupoid: objects, group elements as the
/// permutations they induce on objects, and the action table.
pub fn groupoid_to_json(g: &FiniteGroupoid, caps: &Caps) -> Result<serde_json::Value> {
    let mut comps = Vec::new();
    for c in &g.components {
        let elems = c.group.elements(caps.max_group)?;
        let perm_words: Vec<Vec<u32>> = elems
            .iter()
            .map(|e| (0..c.size() as u32).map(|o| c.act(e, o)).collect())
            .collect();
        comps.push(serde_json::json!({
            "tag": format!("{:?}", c.tag),
            "objects": (0..c.size()).map(|i| format!("o{i}")).collect::<Vec<_>>(),
            "group_order": c.group.order().to_string(),
            "elements_as_permutations": perm_words,
        }));
    }
    Ok(serde_json::json!({
        "components": comps,
        "cardinality": rational_to_string(&g.cardinality()),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn caps() -> Caps {
        Caps::default()
    }

    /// point // (Z/n): one object with automorphism group Z/n.
    fn point_mod(n: u32) -> Arc<FiniteGroupoid> {
        let grp = Group::Explicit(Arc::new(ExplicitGroup::cyclic(n)));
        let comp = Component::new(
            grp,
            vec![Obj::Token(0)],
            ActionKind::Perm(vec![vec![0]; n as usize]),
            CompTag::Token(format!("pt mod {n}")),
        );
        Arc::new(FiniteGroupoid::one_component(comp))
    }

    #[test]
    fn cardinality_examples() {
        assert_eq!(FiniteGroupoid::point().cardinality(), Rational::one());
        let half = point_mod(2).cardinality();
        assert_eq!(half, Rational::new(1.into(), 2.into()));
        // a 6-element group on a point: 1/6
        let sixth = point_mod(6).cardinality();
        assert_eq!(sixth, Rational::new(1.into(), 6.into()));
    }

    #[test]
    fn cardinality_matches_orbit_sum() {
        // Z/4 acting on 4 tokens by rotation plus a fixed point
        let grp = Group::Explicit(Arc::new(ExplicitGroup::cyclic(4)));
        let tables: Vec<Vec<u32>> = (0..4)
            .map(|k| {
                (0..5u32)
                    .map(|o| if o == 4 { 4 } else { (o + k) % 4 })
                    .collect()
            })
            .collect();
        let comp = Component::new(
            grp,
            (0..5).map(Obj::Token).collect(),
            ActionKind::Perm(tables),
            CompTag::Token("rotation".into()),
        );
        let g = FiniteGroupoid::one_component(comp);
        assert_eq!(g.cardinality(), g.cardinality_by_orbits());
        // one free orbit (1/1... actually 4 objects / group 4 = 1) plus a
        // fixed point with stabilizer 4
        assert_eq!(
            g.cardinality(),
            Rational::one() + Rational::new(1.into(), 4.into())
        );
    }

    #[test]
    fn pullback_along_identity_is_equivalence() {
        let z = point_mod(2);
        let id = GroupoidFunctor::identity(z.clone());
        let id2 = GroupoidFunctor::identity(z.clone());
        let (w, p1, _p2) = pseudo_pullback(&id, &id2, &caps()).unwrap();
        // cardinality is preserved
        assert_eq!(w.cardinality(), z.cardinality());
        let report = is_equivalence(&p1, &caps()).unwrap();
        assert!(report.ok, "{:?}", report.witness);
    }

    #[test]
    fn pullback_of_points_over_z2() {
        // X = Y = point, Z = point // (Z/2): pullback has 2 objects with
        // trivial groups, cardinality 2
        let z = point_mod(2);
        let pt = Arc::new(FiniteGroupoid::point());
        let f = GroupoidFunctor {
            source: pt.clone(),
            target: z.clone(),
            comp_map: vec![0],
            obj_maps: vec![vec![0]],
            mor_maps: vec![MorMap::Const(GEl::Leaf(0))],
        };
        let g = GroupoidFunctor {
            source: pt.clone(),
            target: z.clone(),
            comp_map: vec![0],
            obj_maps: vec![vec![0]],
            mor_maps: vec![MorMap::Const(GEl::Leaf(0))],
        };
        let (w, _, _) = pseudo_pullback(&f, &g, &caps()).unwrap();
        assert_eq!(w.n_objects(), 2);
        assert_eq!(w.cardinality(), Rational::from_integer(2.into()));
    }

    #[test]
    fn inequivalent_points_detected() {
        // point -> point // (Z/2) with trivial maps: not an equivalence
        let z = point_mod(2);
        let pt = Arc::new(FiniteGroupoid::point());
        let f = GroupoidFunctor {
            source: pt,
            target: z,
            comp_map: vec![0],
            obj_maps: vec![vec![0]],
            mor_maps: vec![MorMap::Const(GEl::Leaf(0))],
        };
        let report = is_equivalence(&f, &caps()).unwrap();
        assert!(!report.ok);
        assert!(report.witness.unwrap().contains("stabilizer orders"));
    }

    #[test]
    fn identity_is_equivalence() {
        let z = point_mod(3);
        let report = is_equivalence(&GroupoidFunctor::identity(z), &caps()).unwrap();
        assert!(report.ok);
        assert_eq!(report.classes.len(), 1);
        assert_eq!(report.classes[0].aut_order, "3");
    }

    #[test]
    fn transfer_identity_fixes_functions() {
        let z = point_mod(2);
        let corr = Correspondence {
            left: GroupoidFunctor::identity(z.clone()),
            right: GroupoidFunctor::identity(z.clone()),
        };
        let class = z.iso_classes()[0].0;
        let f = FnSpace::delta(z.clone(), class);
        let out = transfer_apply(&corr, &f, &caps()).unwrap();
        assert_eq!(out.get(&class), Rational::one());
    }

    #[test]
    fn transfer_weights_by_fiber_automorphisms() {
        // A = B = point, C = point // Z2, both legs trivial: 1 -> 1/2
        let pt = Arc::new(FiniteGroupoid::point());
        let c = point_mod(2);
        let leg = |target: Arc<FiniteGroupoid>| GroupoidFunctor {
            source: c.clone(),
            target,
            comp_map: vec![0],
            obj_maps: vec![vec![0]],
            mor_maps: vec![MorMap::Const(GEl::Leaf(0))],
        };
        let corr = Correspondence {
            left: leg(pt.clone()),
            right: leg(pt.clone()),
        };
        let class = pt.iso_classes()[0].0;
        let out = transfer_apply(&corr, &FnSpace::delta(pt.clone(), class), &caps()).unwrap();
        assert_eq!(out.get(&class), Rational::new(1.into(), 2.into()));
    }

    #[test]
    fn cardinality_multiplicative() {
        let a = point_mod(2);
        let b = point_mod(3);
        // product = pullback over the point
        let pt = Arc::new(FiniteGroupoid::point());
        let to_pt = |g: &Arc<FiniteGroupoid>| GroupoidFunctor {
            source: g.clone(),
            target: pt.clone(),
            comp_map: vec![0],
            obj_maps: vec![vec![0; g.n_objects()]],
            mor_maps: vec![MorMap::Const(GEl::Leaf(0))],
        };
        let (w, _, _) = pseudo_pullback(&to_pt(&a), &to_pt(&b), &caps()).unwrap();
        assert_eq!(w.cardinality(), a.cardinality() * b.cardinality());
    }
}
