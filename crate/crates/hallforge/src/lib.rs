//! Exact computations with Ringel-Hall algebras of quiver representations
//! over small prime fields.
//!
//! The crate is organized bottom-up:
//!
//! * [`ffq`] — linear algebra over F_p for p in {2, 3, 5, 7},
//! * [`quiver`] — quivers, dimension vectors, the Euler form,
//! * [`rep`] — representation points, orbit enumeration, subrepresentations,
//!   Hall numbers and flags,
//! * [`groupoid`] — finite action groupoids, functors, pseudo-pullbacks,
//!   equivalence certificates and the pull-push transfer,
//! * [`simpcomb`] — the augmented simplex category and the combinatorial
//!   correspondence functor on objects, arrows and cells,
//! * [`waldhausen`] — truncated Waldhausen flag groupoids and their
//!   evaluation on finite simplicial subsets,
//! * [`twosegal`] — polygonal decompositions and 2-Segal certification,
//! * [`hall`] — the Hall algebra, its twisted product and coproduct,
//!   Green-twist discovery, quantum Serre relations, stack dimensions and
//!   the transfer comparison.
//!
//! Everything is exact: scalars are residues mod p, weights are
//! arbitrary-precision rationals, coefficients are Laurent polynomials in a
//! formal variable `v` with the evaluation `v^2 -> q`.

pub mod cache;
pub mod ffq;
pub mod groupoid;
pub mod hall;
pub mod quiver;
pub mod rep;
pub mod simpcomb;
pub mod twosegal;
pub mod waldhausen;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use ffq::Prime;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0} is not a supported prime (expected one of 2, 3, 5, 7)")]
    BadPrime(u64),
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("enumeration cap exceeded: {what} would need ~{estimate} states (cap {cap})")]
    CapExceeded {
        what: String,
        estimate: String,
        cap: String,
    },
    #[error("invalid quiver: {0}")]
    BadQuiver(String),
    #[error("map is not monotone: {0:?}")]
    NotMonotone(Vec<usize>),
    #[error("invalid simplicial data: {0}")]
    BadSimplicial(String),
    #[error("invalid input: {0}")]
    BadInput(String),
    #[error("point-count validation failed: {0}")]
    FitFailure(String),
    #[error("cache error: {0}")]
    Cache(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Enumeration caps. These are configuration, not constants: every
/// exhaustive routine consults them before materializing anything.
#[derive(Debug, Clone)]
pub struct Caps {
    /// Maximum ambient total dimension per prime (sum over vertices).
    pub max_total_dim: HashMap<u8, usize>,
    /// Absolute bound on the number of points enumerated in one sweep.
    pub max_points: u64,
    /// Bound on the size of an explicitly materialized group.
    pub max_group: u64,
}

impl Default for Caps {
    fn default() -> Self {
        let mut max_total_dim = HashMap::new();
        max_total_dim.insert(2u8, 6usize);
        max_total_dim.insert(3u8, 4usize);
        max_total_dim.insert(5u8, 4usize);
        max_total_dim.insert(7u8, 3usize);
        Caps {
            max_total_dim,
            max_points: 1 << 22,
            max_group: 1 << 18,
        }
    }
}

impl Caps {
    pub fn total_dim_cap(&self, p: Prime) -> usize {
        *self.max_total_dim.get(&p.get()).unwrap_or(&3)
    }

    pub fn check_total_dim(&self, what: &str, total: usize, p: Prime) -> Result<()> {
        let cap = self.total_dim_cap(p);
        if total > cap {
            return Err(Error::CapExceeded {
                what: what.to_string(),
                estimate: format!("total dimension {total} over F_{}", p.get()),
                cap: format!("total dimension {cap}"),
            });
        }
        Ok(())
    }

    pub fn check_points(&self, what: &str, estimate: u64) -> Result<()> {
        if estimate > self.max_points {
            return Err(Error::CapExceeded {
                what: what.to_string(),
                estimate: estimate.to_string(),
                cap: self.max_points.to_string(),
            });
        }
        Ok(())
    }
}

/// Shared computation context: caps plus memoized group tables.
///
/// All operations are pure; the context only caches immutable values, so a
/// single `Ctx` can be shared freely across threads.
pub struct Ctx {
    pub caps: Caps,
    pub cache: cache::Cache,
    pub(crate) gl_groups: Mutex<HashMap<(Vec<usize>, u8), Arc<groupoid::ExplicitGroup>>>,
    pub(crate) rep_tables: Mutex<HashMap<(String, u8, Vec<usize>), Arc<rep::RepTable>>>,
    pub(crate) hall_tables: Mutex<HashMap<(String, u8, Vec<usize>, Vec<usize>), Arc<hall::GradedHallTable>>>,
}

impl Default for Ctx {
    fn default() -> Self {
        Ctx::with_caps(Caps::default())
    }
}

impl Ctx {
    pub fn with_caps(caps: Caps) -> Self {
        Ctx {
            caps,
            cache: cache::Cache::disabled(),
            gl_groups: Mutex::new(HashMap::new()),
            rep_tables: Mutex::new(HashMap::new()),
            hall_tables: Mutex::new(HashMap::new()),
        }
    }

    /// The product GL group for per-vertex dimensions `dims` over F_p, as an
    /// explicitly materialized element list. Memoized.
    pub fn gl_group(&self, dims: &[usize], p: Prime) -> Result<Arc<groupoid::ExplicitGroup>> {
        let key = (dims.to_vec(), p.get());
        if let Some(g) = self.gl_groups.lock().unwrap().get(&key) {
            return Ok(g.clone());
        }
        let g = Arc::new(groupoid::ExplicitGroup::gl_product(dims, p, &self.caps)?);
        self.gl_groups
            .lock()
            .unwrap()
            .insert(key, g.clone());
        Ok(g)
    }
}
