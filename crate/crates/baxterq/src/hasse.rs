//! The hypercubic Hasse diagram of subsets ordered by inclusion: one
//! Q-operator per node, one functional relation per plaquette, one nested
//! Bethe system per maximal path.

use crate::grading::GradingSignature;
use crate::lax::Subset;

/// An edge I -> I u {a}, tagged by the parity of the added label.
#[derive(Debug, Clone, PartialEq)]
pub struct HasseEdge {
    pub from: Subset,
    pub to: Subset,
    pub added: usize,
    pub fermionic: bool,
}

/// A four-cycle (I, I u {a}, I u {b}, I u {a,b}) with a < b.
#[derive(Debug, Clone, PartialEq)]
pub struct Plaquette {
    pub base: Subset,
    pub a: usize,
    pub b: usize,
}

/// Relation kind carried by a plaquette, fixed by the parities of the two
/// added labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlaquetteKind {
    SameParity,
    MixedParity,
}

impl Plaquette {
    pub fn kind(&self, sig: GradingSignature) -> PlaquetteKind {
        if sig.parity(self.a) == sig.parity(self.b) {
            PlaquetteKind::SameParity
        } else {
            PlaquetteKind::MixedParity
        }
    }

    pub fn top(&self) -> Subset {
        self.base.insert(self.a).insert(self.b)
    }
}

/// The full diagram for a signature.
#[derive(Debug, Clone)]
pub struct HasseDiagram {
    pub sig: GradingSignature,
    pub nodes: Vec<Subset>,
    pub edges: Vec<HasseEdge>,
    pub plaquettes: Vec<Plaquette>,
}

pub fn build_hasse(sig: GradingSignature) -> HasseDiagram {
    let d = sig.dim();
    let mut nodes: Vec<Subset> = (0..(1u32 << d)).map(|m| Subset::from_mask(sig, m)).collect();
    nodes.sort_by_key(|s| (s.len(), s.mask()));
    let mut edges = Vec::new();
    let mut plaquettes = Vec::new();
    for node in &nodes {
        for a in sig.labels() {
            if node.contains(a) {
                continue;
            }
            edges.push(HasseEdge {
                from: node.clone(),
                to: node.insert(a),
                added: a,
                fermionic: sig.parity(a) == 1,
            });
            for b in (a + 1)..d {
                if !node.contains(b) {
                    plaquettes.push(Plaquette {
                        base: node.clone(),
                        a,
                        b,
                    });
                }
            }
        }
    }
    HasseDiagram {
        sig,
        nodes,
        edges,
        plaquettes,
    }
}

/// A maximal chain empty set = I_0 < I_1 < ... < I_{n+m} = full set, with the
/// parity sequence of the added labels (the Dynkin grading of the path).
#[derive(Debug, Clone, PartialEq)]
pub struct NestingPath {
    pub sets: Vec<Subset>,
    pub added: Vec<usize>,
    pub grading: Vec<u8>,
}

/// All (n+m)! maximal chains, each with its grading sequence.
pub fn enumerate_paths(diagram: &HasseDiagram) -> Vec<NestingPath> {
    let sig = diagram.sig;
    let d = sig.dim();
    let mut out = Vec::new();
    let mut order: Vec<usize> = Vec::with_capacity(d);
    let mut used = vec![false; d];
    fn rec(
        sig: GradingSignature,
        d: usize,
        order: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<NestingPath>,
    ) {
        if order.len() == d {
            let mut sets = vec![Subset::empty()];
            for &a in order.iter() {
                sets.push(sets.last().unwrap().insert(a));
            }
            out.push(NestingPath {
                sets,
                added: order.clone(),
                grading: order.iter().map(|&a| sig.parity(a)).collect(),
            });
            return;
        }
        for a in 0..d {
            if !used[a] {
                used[a] = true;
                order.push(a);
                rec(sig, d, order, used, out);
                order.pop();
                used[a] = false;
            }
        }
    }
    rec(sig, d, &mut order, &mut used, &mut out);
    out
}

/// Groups paths by their grading sequence (the Dynkin diagram class).
pub fn grading_classes(paths: &[NestingPath]) -> Vec<(Vec<u8>, Vec<usize>)> {
    let mut classes: Vec<(Vec<u8>, Vec<usize>)> = Vec::new();
    for (i, p) in paths.iter().enumerate() {
        match classes.iter_mut().find(|(g, _)| *g == p.grading) {
            Some((_, members)) => members.push(i),
            None => classes.push((p.grading.clone(), vec![i])),
        }
    }
    classes
}
