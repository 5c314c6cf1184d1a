//! Quivers, dimension vectors and the Euler form.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

/// A directed arrow between vertex indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Arrow {
    pub src: usize,
    pub tgt: usize,
}

/// A finite quiver without loop arrows.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Quiver {
    pub name: String,
    pub vertices: Vec<String>,
    pub arrows: Vec<Arrow>,
}

impl Quiver {
    pub fn new(name: &str, vertices: Vec<String>, arrows: Vec<Arrow>) -> Result<Quiver> {
        for a in &arrows {
            if a.src >= vertices.len() || a.tgt >= vertices.len() {
                return Err(Error::BadQuiver(format!(
                    "arrow {}->{} out of range",
                    a.src, a.tgt
                )));
            }
            if a.src == a.tgt {
                return Err(Error::BadQuiver(format!(
                    "loop arrow at vertex {}",
                    vertices[a.src]
                )));
            }
        }
        Ok(Quiver {
            name: name.to_string(),
            vertices,
            arrows,
        })
    }

    /// Linear A_n quiver 1 -> 2 -> ... -> n.
    pub fn linear(n: usize) -> Arc<Quiver> {
        let vertices: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
        let arrows: Vec<Arrow> = (0..n.saturating_sub(1))
            .map(|i| Arrow { src: i, tgt: i + 1 })
            .collect();
        Arc::new(Quiver::new(&format!("A{n}"), vertices, arrows).expect("linear quiver is valid"))
    }

    /// Built-in presets "A1", "A2", "A3".
    pub fn preset(name: &str) -> Option<Arc<Quiver>> {
        match name {
            "A1" => Some(Quiver::linear(1)),
            "A2" => Some(Quiver::linear(2)),
            "A3" => Some(Quiver::linear(3)),
            _ => None,
        }
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_index(&self, label: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == label)
    }

    /// Parse the JSON input format:
    /// `{"vertices": ["1","2"], "arrows": [{"src":"1","tgt":"2"}]}`.
    pub fn from_json(name: &str, text: &str) -> Result<Quiver> {
        #[derive(Deserialize)]
        struct ArrowJson {
            src: String,
            tgt: String,
        }
        #[derive(Deserialize)]
        struct QuiverJson {
            vertices: Vec<String>,
            arrows: Vec<ArrowJson>,
        }
        let qj: QuiverJson = serde_json::from_str(text)
            .map_err(|e| Error::BadQuiver(format!("json parse: {e}")))?;
        let mut arrows = Vec::new();
        for a in qj.arrows {
            let src = qj
                .vertices
                .iter()
                .position(|v| *v == a.src)
                .ok_or_else(|| Error::BadQuiver(format!("unknown source vertex {}", a.src)))?;
            let tgt = qj
                .vertices
                .iter()
                .position(|v| *v == a.tgt)
                .ok_or_else(|| Error::BadQuiver(format!("unknown target vertex {}", a.tgt)))?;
            arrows.push(Arrow { src, tgt });
        }
        Quiver::new(name, qj.vertices, arrows)
    }
}

/// Per-vertex nonnegative dimensions.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DimVector(pub Vec<usize>);

impl fmt::Debug for DimVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for DimVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, ")")
    }
}

impl DimVector {
    pub fn zero(n: usize) -> DimVector {
        DimVector(vec![0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&d| d == 0)
    }

    pub fn add(&self, other: &DimVector) -> DimVector {
        assert_eq!(self.len(), other.len());
        DimVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub_checked(&self, other: &DimVector) -> Option<DimVector> {
        if !other.leq(self) {
            return None;
        }
        Some(DimVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a - b)
                .collect(),
        ))
    }

    /// Componentwise comparison.
    pub fn leq(&self, other: &DimVector) -> bool {
        self.len() == other.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// All dimension vectors componentwise <= `self`, in lexicographic order.
    pub fn all_leq(&self) -> Vec<DimVector> {
        let mut out = vec![DimVector(Vec::new())];
        for &cap in &self.0 {
            let mut next = Vec::new();
            for v in &out {
                for d in 0..=cap {
                    let mut w = v.0.clone();
                    w.push(d);
                    next.push(DimVector(w));
                }
            }
            out = next;
        }
        out
    }

    /// All ordered splittings of `self` into `parts` componentwise-nonnegative
    /// summands, in lexicographic order.
    pub fn splittings(&self, parts: usize) -> Vec<Vec<DimVector>> {
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
        // per-vertex compositions, then cartesian product over vertices
        let per_vertex: Vec<Vec<Vec<usize>>> = self
            .0
            .iter()
            .map(|&d| compositions(d, parts))
            .collect();
        let mut out: Vec<Vec<DimVector>> = vec![vec![DimVector(Vec::new()); parts]];
        for comps in &per_vertex {
            let mut next = Vec::new();
            for partial in &out {
                for comp in comps {
                    let mut ext = partial.clone();
                    for (j, part) in ext.iter_mut().enumerate() {
                        part.0.push(comp[j]);
                    }
                    next.push(ext);
                }
            }
            out = next;
        }
        out
    }
}

/// Euler form <a,b> = sum_i a_i b_i - sum_{h in arrows} a_{s(h)} b_{t(h)}.
pub fn euler_form(q: &Quiver, a: &DimVector, b: &DimVector) -> Result<i64> {
    if a.len() != q.n_vertices() || b.len() != q.n_vertices() {
        return Err(Error::DimMismatch(format!(
            "euler_form on {} expects {} components, got {} and {}",
            q.name,
            q.n_vertices(),
            a.len(),
            b.len()
        )));
    }
    let mut acc: i64 = 0;
    for i in 0..q.n_vertices() {
        acc += a.0[i] as i64 * b.0[i] as i64;
    }
    for h in &q.arrows {
        acc -= a.0[h.src] as i64 * b.0[h.tgt] as i64;
    }
    Ok(acc)
}

/// Symmetrized Euler form <a,b> + <b,a>.
pub fn symmetric_euler_form(q: &Quiver, a: &DimVector, b: &DimVector) -> Result<i64> {
    Ok(euler_form(q, a, b)? + euler_form(q, b, a)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets() {
        let a2 = Quiver::preset("A2").unwrap();
        assert_eq!(a2.n_vertices(), 2);
        assert_eq!(a2.arrows, vec![Arrow { src: 0, tgt: 1 }]);
        assert!(Quiver::preset("D4").is_none());
    }

    #[test]
    fn loops_rejected() {
        let err = Quiver::new(
            "loopy",
            vec!["1".into()],
            vec![Arrow { src: 0, tgt: 0 }],
        );
        assert!(err.is_err());
    }

    #[test]
    fn euler_form_examples() {
        let a1 = Quiver::linear(1);
        let one = DimVector(vec![1]);
        assert_eq!(euler_form(&a1, &one, &one).unwrap(), 1);

        let a2 = Quiver::linear(2);
        let e1 = DimVector(vec![1, 0]);
        let e2 = DimVector(vec![0, 1]);
        assert_eq!(euler_form(&a2, &e1, &e2).unwrap(), -1);
        assert_eq!(euler_form(&a2, &e2, &e1).unwrap(), 0);
    }

    #[test]
    fn euler_form_is_bilinear() {
        let a2 = Quiver::linear(2);
        let a = DimVector(vec![1, 2]);
        let b = DimVector(vec![2, 1]);
        let c = DimVector(vec![1, 1]);
        let lhs = euler_form(&a2, &a.add(&b), &c).unwrap();
        let rhs = euler_form(&a2, &a, &c).unwrap() + euler_form(&a2, &b, &c).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn json_roundtrip() {
        let text = r#"{"vertices": ["1","2"], "arrows": [{"src":"1","tgt":"2"}]}"#;
        let q = Quiver::from_json("custom", text).unwrap();
        assert_eq!(q.arrows, vec![Arrow { src: 0, tgt: 1 }]);
    }

    #[test]
    fn splittings_count() {
        // (2) into 3 parts: C(4,2) = 6 compositions
        let d = DimVector(vec![2]);
        assert_eq!(d.splittings(3).len(), 6);
        // (1,1) into 2 parts: 2 * 2 = 4
        let d = DimVector(vec![1, 1]);
        assert_eq!(d.splittings(2).len(), 4);
        for s in d.splittings(2) {
            assert_eq!(s[0].add(&s[1]), d);
        }
    }
}
