//! Triangulated surfaces, their orientation double covers, and the choice
//! machinery for unoriented holonomy.
//!
//! Conventions, fixed once and used by every downstream module:
//!
//! * Cells are slot-based.  A face is an ordered triple of *sides*, each side
//!   a reference to an edge with a traversal flag; loops (edges with equal
//!   endpoints) and repeated incidences are legal, and no endpoint logic may
//!   compare vertex sets instead of slots.
//! * Every cell of Σ has exactly two lifts in the double Σ̂, numbered by a
//!   parity bit; the involution σ flips the bit.  σ preserves the start/end
//!   slots of lifted edges (it is orientation-reversing on faces, where it
//!   reverses the cyclic side order, not on edges).
//! * A lifted face of parity 0 traverses its sides in listed order with their
//!   listed directions; parity 1 traverses them in reversed order, each side
//!   direction flipped.
//! * Boundary circles of Σ̂ are oriented by the face-induced direction of
//!   their edges (each lifted boundary edge is traversed the way its unique
//!   adjacent lifted face traverses it), chained end to start.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

#[derive(Debug, PartialEq, Eq, thiserror::Error)]
pub enum SurfaceError {
    #[error("unknown model {0:?}")]
    UnknownModel(String),
    #[error("face {0} references side {1} out of range")]
    SideOutOfRange(usize, usize),
    #[error("side ({0},{1}) used more than once across identifications/boundary")]
    SideReused(usize, usize),
    #[error("side ({0},{1}) is neither identified nor listed as boundary")]
    SideUnaccounted(usize, usize),
    #[error("identification of ({0},{1}) and ({2},{3}) is inconsistent with vertex labels")]
    InconsistentIdentification(usize, usize, usize, usize),
    #[error("a side cannot be identified with itself")]
    SelfIdentification,
    #[error("vertex {0} is isolated (not a corner of any face)")]
    IsolatedVertex(usize),
    #[error("surface has no faces")]
    Empty,
    #[error("vertex {0} has a non-manifold link")]
    NonManifoldVertex(usize),
    #[error("face {0} sides do not chain (end of one side must start the next)")]
    SidesDoNotChain(usize),
    #[error("boundary circle has inconsistent lifts")]
    BadBoundaryLift,
}

#[derive(Debug, PartialEq, Eq, thiserror::Error)]
pub enum ChoiceError {
    #[error("sheet vector has wrong length")]
    SheetShape,
    #[error("boundary lift vector has wrong length")]
    BoundaryShape,
    #[error("vertex lift vector has wrong length")]
    VertexShape,
    #[error("edge lift keys must be exactly the orientation-reversing edges of the sheet")]
    EdgeLiftKeys,
    #[error("lift parity must be 0 or 1")]
    BadParity,
    #[error("index assignment shape mismatch")]
    IndexShape,
    #[error("index {index} not admissible for {cell}")]
    NotAdmissible { cell: String, index: usize },
    #[error("index scheme: k is not an involution")]
    KNotInvolution,
    #[error("index scheme: admissible set empty for {0}")]
    EmptyAdmissible(String),
    #[error("index scheme: admissible sets not equivariant at {0}")]
    NotEquivariant(String),
    #[error("index scheme: admissible sets not nested at {0}")]
    NotNested(String),
    #[error("index scheme shape mismatch")]
    SchemeShape,
}

/// One edge identification in a surface spec: glue side `a = [face, side]` to
/// side `b`.  `reversing: false` means the two faces traverse the common edge
/// in opposite directions (the orientable way); `true` means the same
/// direction (a cross-identification).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Identification {
    pub a: [usize; 2],
    pub b: [usize; 2],
    pub reversing: bool,
}

/// Raw triangulation data: faces as global vertex triples (side `s` of a face
/// runs from corner `s` to corner `s+1 mod 3`), edge identifications, and the
/// list of free (boundary) sides.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(default)]
    pub faces: Vec<[usize; 3]>,
    #[serde(default)]
    pub identifications: Vec<Identification>,
    #[serde(default)]
    pub boundary: Vec<[usize; 2]>,
}

impl SurfaceSpec {
    /// The built-in desk-scale models.
    pub fn named(name: &str) -> Result<SurfaceSpec, SurfaceError> {
        let spec = match name {
            "disk" => SurfaceSpec {
                model: Some("disk".into()),
                faces: vec![[0, 1, 2]],
                identifications: vec![],
                boundary: vec![[0, 0], [0, 1], [0, 2]],
            },
            "sphere" => SurfaceSpec {
                model: Some("sphere".into()),
                faces: vec![[0, 1, 2], [2, 1, 0]],
                identifications: vec![
                    Identification { a: [0, 0], b: [1, 1], reversing: false },
                    Identification { a: [0, 1], b: [1, 0], reversing: false },
                    Identification { a: [0, 2], b: [1, 2], reversing: false },
                ],
                boundary: vec![],
            },
            // Square models on one vertex: two triangles with boundary words
            // a·b·d̄ and d·a̅·b̅ (torus) — flipping the a-pair to a same-direction
            // gluing produces the Klein bottle.
            "torus" => SurfaceSpec {
                model: Some("torus".into()),
                faces: vec![[0, 0, 0], [0, 0, 0]],
                identifications: vec![
                    Identification { a: [0, 0], b: [1, 1], reversing: false },
                    Identification { a: [0, 1], b: [1, 2], reversing: false },
                    Identification { a: [0, 2], b: [1, 0], reversing: false },
                ],
                boundary: vec![],
            },
            "klein" => SurfaceSpec {
                model: Some("klein".into()),
                faces: vec![[0, 0, 0], [0, 0, 0]],
                identifications: vec![
                    Identification { a: [0, 0], b: [1, 1], reversing: true },
                    Identification { a: [0, 1], b: [1, 2], reversing: false },
                    Identification { a: [0, 2], b: [1, 0], reversing: false },
                ],
                boundary: vec![],
            },
            // Antipodal square on two vertices: word a·b·a·b.
            "rp2" => SurfaceSpec {
                model: Some("rp2".into()),
                faces: vec![[0, 1, 0], [0, 0, 1]],
                identifications: vec![
                    Identification { a: [0, 0], b: [1, 1], reversing: true },
                    Identification { a: [0, 1], b: [1, 2], reversing: true },
                    Identification { a: [0, 2], b: [1, 0], reversing: false },
                ],
                boundary: vec![],
            },
            // Rectangle with the vertical sides glued (flipped for the Möbius
            // strip, straight for the annulus); horizontal sides free.
            "mobius" => SurfaceSpec {
                model: Some("mobius".into()),
                faces: vec![[0, 1, 0], [0, 0, 1]],
                identifications: vec![
                    Identification { a: [0, 1], b: [1, 2], reversing: true },
                    Identification { a: [0, 2], b: [1, 0], reversing: false },
                ],
                boundary: vec![[0, 0], [1, 1]],
            },
            "annulus" => SurfaceSpec {
                model: Some("annulus".into()),
                faces: vec![[0, 0, 1], [0, 1, 1]],
                identifications: vec![
                    Identification { a: [0, 1], b: [1, 2], reversing: false },
                    Identification { a: [0, 2], b: [1, 0], reversing: false },
                ],
                boundary: vec![[0, 0], [1, 1]],
            },
            other => return Err(SurfaceError::UnknownModel(other.to_string())),
        };
        Ok(spec)
    }
}

/// A side of a face as stored on a built surface: which edge, and whether the
/// face traverses it start→end (`forward`) at that side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SideRef {
    pub edge: usize,
    pub forward: bool,
}

#[derive(Debug, Clone)]
pub struct EdgeCell {
    /// `[start, end]` vertex ids; loops (`start == end`) are allowed.
    pub ends: [usize; 2],
    pub boundary: bool,
}

#[derive(Debug, Clone)]
pub struct FaceCell {
    /// Sides in cyclic order; the end vertex of side `s` is the start vertex
    /// of side `s+1`, and corner `c` of the face is the start of side `c`.
    pub sides: [SideRef; 3],
}

/// A built triangulated surface with resolved edge cells.
///
/// Edge ids are assigned deterministically: identified pairs first, in input
/// order, then boundary sides in input order.
#[derive(Debug, Clone)]
pub struct Surface {
    nv: usize,
    edges: Vec<EdgeCell>,
    faces: Vec<FaceCell>,
    model: Option<String>,
}

impl Surface {
    pub fn build(spec: &SurfaceSpec) -> Result<Surface, SurfaceError> {
        let spec = match &spec.model {
            Some(name) if spec.faces.is_empty() => SurfaceSpec::named(name)?,
            _ => spec.clone(),
        };
        if spec.faces.is_empty() {
            return Err(SurfaceError::Empty);
        }
        let nf = spec.faces.len();
        let side_ok = |f: usize, s: usize| f < nf && s < 3;
        // role of each side: Some(edge id, forward)
        let mut roles: Vec<[Option<SideRef>; 3]> = vec![[None; 3]; nf];
        let mut edges: Vec<EdgeCell> = Vec::new();
        let side_verts = |f: usize, s: usize| -> [usize; 2] {
            let vs = spec.faces[f];
            [vs[s], vs[(s + 1) % 3]]
        };
        for id in &spec.identifications {
            let [fa, sa] = id.a;
            let [fb, sb] = id.b;
            if !side_ok(fa, sa) {
                return Err(SurfaceError::SideOutOfRange(fa, sa));
            }
            if !side_ok(fb, sb) {
                return Err(SurfaceError::SideOutOfRange(fb, sb));
            }
            if (fa, sa) == (fb, sb) {
                return Err(SurfaceError::SelfIdentification);
            }
            if roles[fa][sa].is_some() {
                return Err(SurfaceError::SideReused(fa, sa));
            }
            if roles[fb][sb].is_some() {
                return Err(SurfaceError::SideReused(fb, sb));
            }
            let va = side_verts(fa, sa);
            let vb = side_verts(fb, sb);
            // reversing = both faces run the edge the same way
            let consistent = if id.reversing {
                va == vb
            } else {
                va == [vb[1], vb[0]]
            };
            if !consistent {
                return Err(SurfaceError::InconsistentIdentification(fa, sa, fb, sb));
            }
            let e = edges.len();
            edges.push(EdgeCell { ends: va, boundary: false });
            roles[fa][sa] = Some(SideRef { edge: e, forward: true });
            roles[fb][sb] = Some(SideRef { edge: e, forward: id.reversing });
        }
        for &[f, s] in &spec.boundary {
            if !side_ok(f, s) {
                return Err(SurfaceError::SideOutOfRange(f, s));
            }
            if roles[f][s].is_some() {
                return Err(SurfaceError::SideReused(f, s));
            }
            let e = edges.len();
            edges.push(EdgeCell { ends: side_verts(f, s), boundary: true });
            roles[f][s] = Some(SideRef { edge: e, forward: true });
        }
        let mut faces = Vec::with_capacity(nf);
        for (f, role) in roles.iter().enumerate() {
            let mut sides = [SideRef { edge: 0, forward: true }; 3];
            for (s, r) in role.iter().enumerate() {
                sides[s] = r.ok_or(SurfaceError::SideUnaccounted(f, s))?;
            }
            faces.push(FaceCell { sides });
        }
        let nv = spec
            .faces
            .iter()
            .flat_map(|vs| vs.iter())
            .copied()
            .max()
            .map(|m| m + 1)
            .unwrap_or(0);
        let mut used = vec![false; nv];
        for vs in &spec.faces {
            for &v in vs {
                used[v] = true;
            }
        }
        if let Some(v) = used.iter().position(|&u| !u) {
            return Err(SurfaceError::IsolatedVertex(v));
        }
        Surface::from_parts(nv, edges, faces, spec.model.clone())
    }

    /// Internal constructor for already-resolved cells (used by subdivision);
    /// checks the chaining invariant.
    pub fn from_parts(
        nv: usize,
        edges: Vec<EdgeCell>,
        faces: Vec<FaceCell>,
        model: Option<String>,
    ) -> Result<Surface, SurfaceError> {
        for (f, face) in faces.iter().enumerate() {
            for s in 0..3 {
                let cur = face.sides[s];
                let nxt = face.sides[(s + 1) % 3];
                let end = edges[cur.edge].ends[if cur.forward { 1 } else { 0 }];
                let start = edges[nxt.edge].ends[if nxt.forward { 0 } else { 1 }];
                if end != start {
                    return Err(SurfaceError::SidesDoNotChain(f));
                }
            }
        }
        Ok(Surface { nv, edges, faces, model })
    }

    pub fn num_vertices(&self) -> usize {
        self.nv
    }
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }
    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }
    pub fn edge(&self, e: usize) -> &EdgeCell {
        &self.edges[e]
    }
    pub fn face(&self, f: usize) -> &FaceCell {
        &self.faces[f]
    }
    pub fn model(&self) -> Option<&str> {
        self.model.as_deref()
    }
    pub fn euler_characteristic(&self) -> i64 {
        self.nv as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }
    /// Corner `c` of face `f` is the start vertex of side `c`.
    pub fn corner_vertex(&self, f: usize, c: usize) -> usize {
        let side = self.faces[f].sides[c];
        self.edges[side.edge].ends[if side.forward { 0 } else { 1 }]
    }
    pub fn boundary_edges(&self) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.edges[e].boundary).collect()
    }

    /// Spec form of this surface (inverse of `build` up to side ordering).
    pub fn to_spec(&self) -> SurfaceSpec {
        let mut sides_of_edge: Vec<Vec<(usize, usize)>> = vec![Vec::new(); self.edges.len()];
        for (f, face) in self.faces.iter().enumerate() {
            for (s, side) in face.sides.iter().enumerate() {
                sides_of_edge[side.edge].push((f, s));
            }
        }
        let mut identifications = Vec::new();
        let mut boundary = Vec::new();
        for (e, sides) in sides_of_edge.iter().enumerate() {
            if self.edges[e].boundary {
                boundary.push([sides[0].0, sides[0].1]);
            } else {
                let (f0, s0) = sides[0];
                let (f1, s1) = sides[1];
                let reversing = self.faces[f0].sides[s0].forward == self.faces[f1].sides[s1].forward;
                identifications.push(Identification { a: [f0, s0], b: [f1, s1], reversing });
            }
        }
        let faces = (0..self.faces.len())
            .map(|f| [self.corner_vertex(f, 0), self.corner_vertex(f, 1), self.corner_vertex(f, 2)])
            .collect();
        SurfaceSpec { model: self.model.clone(), faces, identifications, boundary }
    }
}

fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn union(parent: &mut Vec<usize>, a: usize, b: usize) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        parent[hi] = lo;
    }
}

/// The oriented double cover Σ̂ of a surface Σ, with cell lift tables and the
/// orientation-reversing involution σ (parity flip on every lift id).
///
/// Lift ids: face lift `2t + p`, edge lift `2e + p`, vertex lift `2v + p`
/// with parity `p ∈ {0, 1}`.  Parity anchoring: for each edge, the lift of
/// parity `p` is the one contained in parity-`p` lift of the edge's first
/// face side (in (face, side) lexicographic order); vertex parities are
/// anchored at the least corner lift of the vertex.
#[derive(Debug, Clone)]
pub struct DoubleCover {
    surface: Surface,
    /// per face lift: sides in traversal order as (edge lift id, forward)
    face_sides: Vec<Vec<(usize, bool)>>,
    /// per edge lift: `[start, end]` vertex lift ids (slots, σ-equivariant)
    edge_ends: Vec<[usize; 2]>,
    /// per edge lift: adjacent face lift ids (two for interior, one for boundary)
    edge_faces: Vec<Vec<usize>>,
    /// downstairs boundary circles: sorted edge ids per circle
    circles: Vec<Vec<usize>>,
    /// circle id per boundary edge
    circle_of_edge: Vec<Option<usize>>,
    /// lifted boundary circles: per downstairs circle, two traversal orders
    /// (parity 0/1), each a cyclic list of (edge lift, forward) in
    /// face-induced orientation, chained end to start
    lifted_circles: Vec<[Vec<(usize, bool)>; 2]>,
    /// parity of the lifted circle containing each boundary edge lift
    lift_circle_parity: Vec<Option<u8>>,
    /// vertex lift at corner `c` of face lift `fl`, indexed `3·fl + c`
    corner_lifts: Vec<usize>,
}

impl DoubleCover {
    pub fn new(surface: Surface) -> Result<DoubleCover, SurfaceError> {
        let ne = surface.num_edges();
        let nf = surface.num_faces();
        // adjacency per edge: (face, side, forward), first entry is primary
        let mut adj: Vec<Vec<(usize, usize, bool)>> = vec![Vec::new(); ne];
        for f in 0..nf {
            for s in 0..3 {
                let side = surface.faces[f].sides[s];
                adj[side.edge].push((f, s, side.forward));
            }
        }
        for (e, a) in adj.iter().enumerate() {
            let expected = if surface.edges[e].boundary { 1 } else { 2 };
            if a.len() != expected {
                return Err(SurfaceError::SideReused(
                    a.first().map(|x| x.0).unwrap_or(0),
                    e,
                ));
            }
        }
        // Which lift of edge `e` lies in face lift (f, parity) at side s?
        // Primary side: the lift parity equals the face parity (anchor).
        // Secondary side: the parity that makes the two adjacent lifted faces
        // traverse the shared lift in opposite directions.
        let lift_in = |e: usize, which: usize, parity: u8| -> usize {
            let (_, _, dp) = adj[e][0];
            if which == 0 {
                2 * e + parity as usize
            } else {
                let (_, _, dq) = adj[e][1];
                let dq_dir = dq ^ (parity == 1);
                let l = dp ^ !dq_dir; // primary direction at lift l is dp ^ l
                2 * e + l as usize
            }
        };
        // face lift side tables
        let mut face_sides: Vec<Vec<(usize, bool)>> = vec![Vec::new(); 2 * nf];
        for f in 0..nf {
            for parity in 0..2u8 {
                let order: [usize; 3] = if parity == 0 { [0, 1, 2] } else { [2, 1, 0] };
                let mut sides = Vec::with_capacity(3);
                for &s in &order {
                    let side = surface.faces[f].sides[s];
                    let e = side.edge;
                    let which = adj[e]
                        .iter()
                        .position(|&(af, as_, _)| (af, as_) == (f, s))
                        .expect("side present in adjacency");
                    let lift = lift_in(e, which, parity);
                    let dir = side.forward ^ (parity == 1);
                    sides.push((lift, dir));
                }
                face_sides[2 * f + parity as usize] = sides;
            }
        }
        // adjacent face lifts per edge lift
        let mut edge_faces: Vec<Vec<usize>> = vec![Vec::new(); 2 * ne];
        for (fl, sides) in face_sides.iter().enumerate() {
            for &(el, _) in sides {
                edge_faces[el].push(fl);
            }
        }
        for (el, fs) in edge_faces.iter().enumerate() {
            let expected = if surface.edges[el / 2].boundary { 1 } else { 2 };
            if fs.len() != expected {
                return Err(SurfaceError::NonManifoldVertex(el));
            }
        }
        // vertex lifts via union-find on corner lifts (f, c, parity)
        let nclift = 6 * nf;
        let corner_id = |f: usize, c: usize, p: usize| (f * 3 + c) * 2 + p;
        let mut parent: Vec<usize> = (0..nclift).collect();
        for (e, a) in adj.iter().enumerate() {
            if surface.edges[e].boundary {
                continue;
            }
            let (fp, sp, dp) = a[0];
            let (fq, sq, dq) = a[1];
            // corner at the start slot of e on a side, per that side's direction
            let start_corner = |s: usize, d: bool| if d { s } else { (s + 1) % 3 };
            let end_corner = |s: usize, d: bool| if d { (s + 1) % 3 } else { s };
            for parity_q in 0..2usize {
                let l = lift_in(e, 1, parity_q as u8) - 2 * e; // lift parity
                let parity_p = l; // primary face lift containing this lift
                union(
                    &mut parent,
                    corner_id(fp, start_corner(sp, dp), parity_p),
                    corner_id(fq, start_corner(sq, dq), parity_q),
                );
                union(
                    &mut parent,
                    corner_id(fp, end_corner(sp, dp), parity_p),
                    corner_id(fq, end_corner(sq, dq), parity_q),
                );
            }
        }
        // classes per vertex: exactly two, swapped by the parity flip
        let nv = surface.num_vertices();
        let mut class_of_vertex: Vec<Vec<usize>> = vec![Vec::new(); nv];
        for f in 0..nf {
            for c in 0..3 {
                let v = surface.corner_vertex(f, c);
                for p in 0..2 {
                    let root = find(&mut parent, corner_id(f, c, p));
                    if !class_of_vertex[v].contains(&root) {
                        class_of_vertex[v].push(root);
                    }
                }
            }
        }
        let mut vlift_of_class: BTreeMap<usize, usize> = BTreeMap::new();
        for v in 0..nv {
            class_of_vertex[v].sort_unstable();
            if class_of_vertex[v].len() != 2 {
                return Err(SurfaceError::NonManifoldVertex(v));
            }
            // the flip must swap the two classes (no cross-cap pinch)
            let a = class_of_vertex[v][0];
            // `a` is a root, hence also a corner id; its flip:
            let flip_a = find(&mut parent, a ^ 1);
            if flip_a == a {
                return Err(SurfaceError::NonManifoldVertex(v));
            }
            // parity 0 lift = class of the least corner lift (which is the
            // least root, since roots are minimal in their class)
            vlift_of_class.insert(a, 2 * v);
            vlift_of_class.insert(class_of_vertex[v][1], 2 * v + 1);
        }
        // σ must swap the two vertex lifts: guaranteed because the flip is an
        // involution exchanging the classes; record edge endpoint slots.
        let mut edge_ends: Vec<[usize; 2]> = vec![[usize::MAX; 2]; 2 * ne];
        for (e, a) in adj.iter().enumerate() {
            let (fp, sp, dp) = a[0];
            let sc = if dp { sp } else { (sp + 1) % 3 };
            let ec = if dp { (sp + 1) % 3 } else { sp };
            for l in 0..2usize {
                let start_root = find(&mut parent, corner_id(fp, sc, l));
                let end_root = find(&mut parent, corner_id(fp, ec, l));
                edge_ends[2 * e + l] = [vlift_of_class[&start_root], vlift_of_class[&end_root]];
            }
            // σ-equivariance of slots: flipping the lift must flip both ends
            debug_assert_eq!(edge_ends[2 * e] [0] ^ 1, edge_ends[2 * e + 1][0]);
            debug_assert_eq!(edge_ends[2 * e] [1] ^ 1, edge_ends[2 * e + 1][1]);
        }
        // corner lift table: vertex lift at each corner of each face lift
        let mut corner_lifts: Vec<usize> = vec![usize::MAX; nclift];
        for f in 0..nf {
            for c in 0..3 {
                for p in 0..2usize {
                    let root = find(&mut parent, corner_id(f, c, p));
                    corner_lifts[3 * (2 * f + p) + c] = vlift_of_class[&root];
                }
            }
        }
        // downstairs boundary circles (walk via slot ends)
        let boundary: Vec<usize> = surface.boundary_edges();
        let mut circle_of_edge: Vec<Option<usize>> = vec![None; ne];
        let mut circles: Vec<Vec<usize>> = Vec::new();
        {
            // at each boundary vertex there must be exactly two boundary edge
            // endpoint slots; walk them
            let mut slots_at: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
            for &e in &boundary {
                for slot in 0..2 {
                    slots_at
                        .entry(surface.edges[e].ends[slot])
                        .or_default()
                        .push((e, slot));
                }
            }
            for slots in slots_at.values() {
                if slots.len() != 2 {
                    return Err(SurfaceError::NonManifoldVertex(slots[0].0));
                }
            }
            for &e0 in &boundary {
                if circle_of_edge[e0].is_some() {
                    continue;
                }
                let id = circles.len();
                let mut circle = Vec::new();
                let mut cur = e0;
                let mut enter_slot = 0usize; // walk out of the end slot
                loop {
                    circle.push(cur);
                    circle_of_edge[cur] = Some(id);
                    let v = surface.edges[cur].ends[1 - enter_slot];
                    let next = slots_at[&v]
                        .iter()
                        .copied()
                        .find(|&(e, s)| !(e == cur && s == 1 - enter_slot))
                        .expect("two slots per boundary vertex");
                    if next.0 == e0 && next.1 == 0 {
                        break;
                    }
                    cur = next.0;
                    enter_slot = next.1;
                    if circle_of_edge[cur].is_some() {
                        return Err(SurfaceError::BadBoundaryLift);
                    }
                }
                circle.sort_unstable();
                circles.push(circle);
            }
        }
        // lifted boundary circles, oriented by face-induced direction
        let mut lift_circle_parity: Vec<Option<u8>> = vec![None; 2 * ne];
        let mut lifted_circles: Vec<[Vec<(usize, bool)>; 2]> = vec![[Vec::new(), Vec::new()]; circles.len()];
        {
            // face-induced direction of each boundary edge lift
            let mut induced: BTreeMap<usize, bool> = BTreeMap::new();
            for (fl, sides) in face_sides.iter().enumerate() {
                let _ = fl;
                for &(el, dir) in sides {
                    if surface.edges[el / 2].boundary {
                        induced.insert(el, dir);
                    }
                }
            }
            // oriented start vertex lift -> edge lift
            let mut outgoing: BTreeMap<usize, usize> = BTreeMap::new();
            for (&el, &dir) in &induced {
                let start = edge_ends[el][if dir { 0 } else { 1 }];
                if outgoing.insert(start, el).is_some() {
                    return Err(SurfaceError::BadBoundaryLift);
                }
            }
            let mut seen: Vec<bool> = vec![false; 2 * ne];
            for (&el0, _) in &induced {
                if seen[el0] {
                    continue;
                }
                let mut walk = Vec::new();
                let mut cur = el0;
                loop {
                    let dir = induced[&cur];
                    walk.push((cur, dir));
                    seen[cur] = true;
                    let end = edge_ends[cur][if dir { 1 } else { 0 }];
                    let next = *outgoing.get(&end).ok_or(SurfaceError::BadBoundaryLift)?;
                    if next == el0 {
                        break;
                    }
                    cur = next;
                    if seen[cur] {
                        return Err(SurfaceError::BadBoundaryLift);
                    }
                }
                // the lifted circle must project bijectively to one circle
                let down: Vec<usize> = walk.iter().map(|&(el, _)| el / 2).collect();
                let circle_id = circle_of_edge[down[0]].ok_or(SurfaceError::BadBoundaryLift)?;
                let mut down_sorted = down.clone();
                down_sorted.sort_unstable();
                if down_sorted != circles[circle_id] {
                    return Err(SurfaceError::BadBoundaryLift);
                }
                // parity convention: the lifted circle containing parity-0
                // lift of the circle's least edge is the parity-0 circle
                let least = circles[circle_id][0];
                let parity = if walk.iter().any(|&(el, _)| el == 2 * least) { 0u8 } else { 1u8 };
                // canonical starting point: least edge lift id
                let start_pos = walk
                    .iter()
                    .enumerate()
                    .min_by_key(|(_, &(el, _))| el)
                    .map(|(i, _)| i)
                    .unwrap();
                walk.rotate_left(start_pos);
                for &(el, _) in &walk {
                    lift_circle_parity[el] = Some(parity);
                }
                lifted_circles[circle_id][parity as usize] = walk;
            }
        }
        Ok(DoubleCover {
            surface,
            face_sides,
            edge_ends,
            edge_faces,
            circles,
            circle_of_edge,
            lifted_circles,
            lift_circle_parity,
            corner_lifts,
        })
    }

    pub fn surface(&self) -> &Surface {
        &self.surface
    }
    pub fn num_face_lifts(&self) -> usize {
        self.face_sides.len()
    }
    pub fn num_edge_lifts(&self) -> usize {
        self.edge_ends.len()
    }
    pub fn num_vertex_lifts(&self) -> usize {
        2 * self.surface.num_vertices()
    }
    /// σ on any lift id (face, edge, or vertex): flip the parity bit.
    pub fn sigma(&self, lift: usize) -> usize {
        lift ^ 1
    }
    /// Sides of a lifted face, in traversal order: (edge lift, forward).
    pub fn face_lift_sides(&self, face_lift: usize) -> &[(usize, bool)] {
        &self.face_sides[face_lift]
    }
    /// `[start, end]` vertex lifts of an edge lift.
    pub fn edge_lift_ends(&self, edge_lift: usize) -> [usize; 2] {
        self.edge_ends[edge_lift]
    }
    /// Face lifts adjacent to an edge lift (1 for boundary, 2 for interior).
    pub fn edge_lift_faces(&self, edge_lift: usize) -> &[usize] {
        &self.edge_faces[edge_lift]
    }
    /// Vertex lift sitting at corner `c` (downstairs corner index, 0..3) of a
    /// face lift.
    pub fn corner_vertex_lift(&self, face_lift: usize, c: usize) -> usize {
        self.corner_lifts[3 * face_lift + c]
    }
    /// Downstairs boundary circles as sorted edge-id sets.
    pub fn boundary_circles(&self) -> &[Vec<usize>] {
        &self.circles
    }
    pub fn circle_of_edge(&self, e: usize) -> Option<usize> {
        self.circle_of_edge.get(e).copied().flatten()
    }
    /// The lifted boundary circle of a given downstairs circle and parity, as
    /// (edge lift, forward) in face-induced traversal order.
    pub fn lifted_circle(&self, circle: usize, parity: u8) -> &[(usize, bool)] {
        &self.lifted_circles[circle][parity as usize]
    }
    /// Parity of the lifted circle containing a boundary edge lift.
    pub fn lift_circle_parity(&self, edge_lift: usize) -> Option<u8> {
        self.lift_circle_parity.get(edge_lift).copied().flatten()
    }
    /// Face-induced traversal direction of a boundary edge lift.
    pub fn boundary_lift_direction(&self, edge_lift: usize) -> Option<bool> {
        if !self.surface.edges[edge_lift / 2].boundary {
            return None;
        }
        let fl = self.edge_faces[edge_lift][0];
        self.face_sides[fl]
            .iter()
            .find(|&&(el, _)| el == edge_lift)
            .map(|&(_, dir)| dir)
    }
    /// Number of connected components of Σ̂ (2 per downstairs component iff
    /// orientable).
    pub fn num_components(&self) -> usize {
        let n = self.num_face_lifts();
        let mut parent: Vec<usize> = (0..n).collect();
        for fl in 0..n {
            for &(el, _) in &self.face_sides[fl] {
                for &other in &self.edge_faces[el] {
                    union(&mut parent, fl, other);
                }
            }
        }
        let mut roots: Vec<usize> = (0..n).map(|x| find(&mut parent, x)).collect();
        roots.sort_unstable();
        roots.dedup();
        roots.len()
    }
    /// True iff Σ is orientable (per downstairs component the double splits).
    pub fn is_orientable(&self) -> bool {
        self.num_components() == 2 * self.downstairs_components()
    }
    fn downstairs_components(&self) -> usize {
        let n = self.surface.num_faces();
        let mut parent: Vec<usize> = (0..n).collect();
        for f in 0..n {
            for side in &self.surface.faces[f].sides {
                // union via downstairs edges
                for g in 0..n {
                    if g != f
                        && self.surface.faces[g].sides.iter().any(|sg| sg.edge == side.edge)
                    {
                        union(&mut parent, f, g);
                    }
                }
            }
        }
        let mut roots: Vec<usize> = (0..n).map(|x| find(&mut parent, x)).collect();
        roots.sort_unstable();
        roots.dedup();
        roots.len()
    }

    /// A coherent orientation section (face → lift parity) if Σ is
    /// orientable: adjacent faces share their chosen edge lifts.
    pub fn orientation_section(&self) -> Option<Vec<u8>> {
        let nf = self.surface.num_faces();
        let mut sheet: Vec<Option<u8>> = vec![None; nf];
        for start in 0..nf {
            if sheet[start].is_some() {
                continue;
            }
            sheet[start] = Some(0);
            let mut stack = vec![start];
            while let Some(f) = stack.pop() {
                let p = sheet[f].unwrap();
                for &(el, _) in &self.face_sides[2 * f + p as usize] {
                    if self.surface.edges[el / 2].boundary {
                        continue;
                    }
                    for &gl in &self.edge_faces[el] {
                        let g = gl / 2;
                        let gp = (gl % 2) as u8;
                        match sheet[g] {
                            None => {
                                sheet[g] = Some(gp);
                                stack.push(g);
                            }
                            Some(q) if q != gp => return None,
                            _ => {}
                        }
                    }
                }
            }
        }
        Some(sheet.into_iter().map(|p| p.unwrap()).collect())
    }
}

/// Admissible index sets for every lifted cell, plus the index involution k.
/// Invariants (checked by `validate`): k is an involution on `0..count`;
/// every admissible set is nonempty and sorted; equivariance
/// `adm(σx̂) = k(adm(x̂))`; nesting `adm(face lift) ⊆ adm(side edge lifts)`
/// and `adm(edge lift) ⊆ adm(endpoint vertex lifts)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexScheme {
    pub count: usize,
    pub k: Vec<usize>,
    /// per face, indexed `[2f + parity]` flattened: `adm_faces[f][parity]`
    pub adm_faces: Vec<[Vec<usize>; 2]>,
    pub adm_edges: Vec<[Vec<usize>; 2]>,
    pub adm_vertices: Vec<[Vec<usize>; 2]>,
}

impl IndexScheme {
    pub fn adm_face(&self, face_lift: usize) -> &[usize] {
        &self.adm_faces[face_lift / 2][face_lift % 2]
    }
    pub fn adm_edge(&self, edge_lift: usize) -> &[usize] {
        &self.adm_edges[edge_lift / 2][edge_lift % 2]
    }
    pub fn adm_vertex(&self, vertex_lift: usize) -> &[usize] {
        &self.adm_vertices[vertex_lift / 2][vertex_lift % 2]
    }

    /// The constant scheme: every lifted cell admits every index.
    pub fn full(dc: &DoubleCover, count: usize, k: Vec<usize>) -> IndexScheme {
        let all: Vec<usize> = (0..count).collect();
        let pair = || [all.clone(), all.clone()];
        IndexScheme {
            count,
            k,
            adm_faces: (0..dc.surface().num_faces()).map(|_| pair()).collect(),
            adm_edges: (0..dc.surface().num_edges()).map(|_| pair()).collect(),
            adm_vertices: (0..dc.surface().num_vertices()).map(|_| pair()).collect(),
        }
    }

    /// A seeded random scheme with `count` indices and involution `k`.
    ///
    /// Every admissible set contains the k-orbit of index 0 (so the nesting
    /// intersections can never be empty); beyond that, vertex sets are
    /// enriched at random, edge sets draw from their endpoint intersections,
    /// and face sets from their side intersections.
    pub fn random(dc: &DoubleCover, count: usize, k: Vec<usize>, seed: u64) -> IndexScheme {
        assert!(count >= 1 && k.len() == count);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = dc.surface();
        let seed_orbit: Vec<usize> = {
            let mut o = vec![0, k[0]];
            o.sort_unstable();
            o.dedup();
            o
        };
        let mut scheme = IndexScheme {
            count,
            k: k.clone(),
            adm_faces: vec![[Vec::new(), Vec::new()]; s.num_faces()],
            adm_edges: vec![[Vec::new(), Vec::new()]; s.num_edges()],
            adm_vertices: vec![[Vec::new(), Vec::new()]; s.num_vertices()],
        };
        let enrich = |base: &[usize], pool: &[usize], rng: &mut ChaCha8Rng| -> [Vec<usize>; 2] {
            let mut set: Vec<usize> = base.to_vec();
            for &i in pool {
                if !set.contains(&i) && rng.gen_bool(0.4) {
                    set.push(i);
                }
            }
            set.sort_unstable();
            let mut image: Vec<usize> = set.iter().map(|&i| k[i]).collect();
            image.sort_unstable();
            [set, image]
        };
        let all: Vec<usize> = (0..count).collect();
        for v in 0..s.num_vertices() {
            scheme.adm_vertices[v] = enrich(&seed_orbit, &all, &mut rng);
        }
        let get_v = |scheme: &IndexScheme, vl: usize| scheme.adm_vertices[vl / 2][vl % 2].clone();
        for e in 0..s.num_edges() {
            let [a, b] = dc.edge_lift_ends(2 * e);
            let pa = get_v(&scheme, a);
            let pb = get_v(&scheme, b);
            let pool: Vec<usize> = pa.iter().filter(|i| pb.contains(i)).copied().collect();
            scheme.adm_edges[e] = enrich(&seed_orbit, &pool, &mut rng);
        }
        for t in 0..s.num_faces() {
            let sides = dc.face_lift_sides(2 * t);
            let mut pool: Vec<usize> = all.clone();
            for &(el, _) in sides {
                let adm = scheme.adm_edges[el / 2][el % 2].clone();
                pool.retain(|i| adm.contains(i));
            }
            scheme.adm_faces[t] = enrich(&seed_orbit, &pool, &mut rng);
        }
        debug_assert_eq!(scheme.validate(dc), Ok(()));
        scheme
    }

    pub fn validate(&self, dc: &DoubleCover) -> Result<(), ChoiceError> {
        let s = dc.surface();
        if self.k.len() != self.count
            || self.adm_faces.len() != s.num_faces()
            || self.adm_edges.len() != s.num_edges()
            || self.adm_vertices.len() != s.num_vertices()
        {
            return Err(ChoiceError::SchemeShape);
        }
        for i in 0..self.count {
            if self.k[i] >= self.count || self.k[self.k[i]] != i {
                return Err(ChoiceError::KNotInvolution);
            }
        }
        let check_pair = |pair: &[Vec<usize>; 2], what: String| -> Result<(), ChoiceError> {
            for adm in pair {
                if adm.is_empty() {
                    return Err(ChoiceError::EmptyAdmissible(what.clone()));
                }
                if adm.windows(2).any(|w| w[0] >= w[1]) || adm.iter().any(|&i| i >= self.count) {
                    return Err(ChoiceError::SchemeShape);
                }
            }
            let mut mapped: Vec<usize> = pair[0].iter().map(|&i| self.k[i]).collect();
            mapped.sort_unstable();
            if mapped != pair[1] {
                return Err(ChoiceError::NotEquivariant(what));
            }
            Ok(())
        };
        for (f, pair) in self.adm_faces.iter().enumerate() {
            check_pair(pair, format!("face {f}"))?;
        }
        for (e, pair) in self.adm_edges.iter().enumerate() {
            check_pair(pair, format!("edge {e}"))?;
        }
        for (v, pair) in self.adm_vertices.iter().enumerate() {
            check_pair(pair, format!("vertex {v}"))?;
        }
        let subset = |a: &[usize], b: &[usize]| a.iter().all(|x| b.binary_search(x).is_ok());
        for fl in 0..dc.num_face_lifts() {
            for &(el, _) in dc.face_lift_sides(fl) {
                if !subset(self.adm_face(fl), self.adm_edge(el)) {
                    return Err(ChoiceError::NotNested(format!("face lift {fl} vs edge lift {el}")));
                }
            }
        }
        for el in 0..dc.num_edge_lifts() {
            for vl in dc.edge_lift_ends(el) {
                if !subset(self.adm_edge(el), self.adm_vertex(vl)) {
                    return Err(ChoiceError::NotNested(format!("edge lift {el} vs vertex lift {vl}")));
                }
            }
        }
        Ok(())
    }
}

/// One full set of evaluation choices: fundamental domain (sheet), boundary
/// lift, free interior-edge lifts, vertex lifts, and the index assignment.
///
/// Indices are stored for parity-0 lifts only; the parity-1 index is `k`
/// applied to the parity-0 index (equivariance is built in, not checked per
/// cell).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainChoice {
    pub sheet: Vec<u8>,
    /// chosen lifted-circle parity per downstairs boundary circle
    pub boundary_lift: Vec<u8>,
    /// chosen lift parity per orientation-reversing edge (keys = E exactly)
    pub edge_lift: BTreeMap<usize, u8>,
    pub vertex_lift: Vec<u8>,
    pub face_index: Vec<usize>,
    pub edge_index: Vec<usize>,
    pub vertex_index: Vec<usize>,
}

impl DomainChoice {
    /// Index assigned to a face lift under the equivariant extension.
    pub fn index_of_face_lift(&self, scheme: &IndexScheme, face_lift: usize) -> usize {
        let i0 = self.face_index[face_lift / 2];
        if face_lift % 2 == 0 { i0 } else { scheme.k[i0] }
    }
    pub fn index_of_edge_lift(&self, scheme: &IndexScheme, edge_lift: usize) -> usize {
        let i0 = self.edge_index[edge_lift / 2];
        if edge_lift % 2 == 0 { i0 } else { scheme.k[i0] }
    }
    pub fn index_of_vertex_lift(&self, scheme: &IndexScheme, vertex_lift: usize) -> usize {
        let i0 = self.vertex_index[vertex_lift / 2];
        if vertex_lift % 2 == 0 { i0 } else { scheme.k[i0] }
    }
    /// The chosen lift of a vertex.
    pub fn vertex_lift_of(&self, v: usize) -> usize {
        2 * v + self.vertex_lift[v] as usize
    }
    /// The chosen face lift of a face.
    pub fn face_lift_of(&self, t: usize) -> usize {
        2 * t + self.sheet[t] as usize
    }
}

/// Orientation-reversing edges for a given sheet: interior edges whose two
/// adjacent chosen face lifts share no lift of the edge.  Slot-based, so an
/// edge with both sides on one face is classified correctly.
pub fn orientation_reversing_edges(dc: &DoubleCover, sheet: &[u8]) -> Vec<usize> {
    let s = dc.surface();
    let mut out = Vec::new();
    for e in 0..s.num_edges() {
        if s.edge(e).boundary {
            continue;
        }
        // lifts of e contained in the chosen lifts of its two sides
        let mut lifts = Vec::with_capacity(2);
        for l in [2 * e, 2 * e + 1] {
            for &fl in dc.edge_lift_faces(l) {
                if sheet[fl / 2] as usize == fl % 2 {
                    lifts.push(l);
                }
            }
        }
        debug_assert_eq!(lifts.len(), 2);
        if lifts[0] != lifts[1] {
            out.push(e);
        }
    }
    out
}

/// `(B, B̄)`: all boundary edges, and those whose face-induced lift is not on
/// the chosen boundary lift.
pub fn boundary_sets(dc: &DoubleCover, choice: &DomainChoice) -> (Vec<usize>, Vec<usize>) {
    let s = dc.surface();
    let b: Vec<usize> = s.boundary_edges();
    let mut bbar = Vec::new();
    for &e in &b {
        let f_lift = {
            // unique adjacent face of a boundary edge
            let fl0 = dc.edge_lift_faces(2 * e)[0];
            let f = fl0 / 2;
            2 * e + if choice.sheet[f] as usize == fl0 % 2 { 0 } else { 1 }
        };
        let circle = dc.circle_of_edge(e).expect("boundary edge lies on a circle");
        let on_chosen = dc.lift_circle_parity(f_lift) == Some(choice.boundary_lift[circle]);
        if !on_chosen {
            bbar.push(e);
        }
    }
    (b, bbar)
}

/// One arc of F̄: a downstairs edge of `E ∪ B̄` with its evaluation lift `⊓e`
/// and the face-induced traversal direction of that lift.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FBarArc {
    pub edge: usize,
    pub lift: usize,
    pub forward: bool,
}

/// The arcs of F̄ in canonical (edge id) order.  For `e ∈ E` the lift is the
/// free choice `edge_lift[e]`; for `e ∈ B̄` it is the face-induced lift.  In
/// both cases the orientation comes from the unique adjacent chosen face lift.
pub fn f_bar(dc: &DoubleCover, choice: &DomainChoice) -> Vec<FBarArc> {
    let e_set = orientation_reversing_edges(dc, &choice.sheet);
    let (_, bbar) = boundary_sets(dc, choice);
    let mut ids: Vec<(usize, usize)> = Vec::new();
    for &e in &e_set {
        ids.push((e, 2 * e + choice.edge_lift[&e] as usize));
    }
    for &e in &bbar {
        let fl0 = dc.edge_lift_faces(2 * e)[0];
        let f = fl0 / 2;
        let lift = 2 * e + if choice.sheet[f] as usize == fl0 % 2 { 0 } else { 1 };
        ids.push((e, lift));
    }
    ids.sort_unstable();
    ids.into_iter()
        .map(|(e, lift)| {
            // unique chosen face lift adjacent to this lift
            let fl = dc
                .edge_lift_faces(lift)
                .iter()
                .copied()
                .find(|&fl| choice.sheet[fl / 2] as usize == fl % 2)
                .expect("F̄ lift must touch exactly one chosen face lift");
            let forward = dc
                .face_lift_sides(fl)
                .iter()
                .find(|&&(el, _)| el == lift)
                .map(|&(_, d)| d)
                .expect("adjacent face lift traverses the lift");
            FBarArc { edge: e, lift, forward }
        })
        .collect()
}

pub fn validate_choice(
    dc: &DoubleCover,
    scheme: &IndexScheme,
    choice: &DomainChoice,
) -> Result<(), ChoiceError> {
    let s = dc.surface();
    if choice.sheet.len() != s.num_faces() {
        return Err(ChoiceError::SheetShape);
    }
    if choice.boundary_lift.len() != dc.boundary_circles().len() {
        return Err(ChoiceError::BoundaryShape);
    }
    if choice.vertex_lift.len() != s.num_vertices() {
        return Err(ChoiceError::VertexShape);
    }
    if choice.face_index.len() != s.num_faces()
        || choice.edge_index.len() != s.num_edges()
        || choice.vertex_index.len() != s.num_vertices()
    {
        return Err(ChoiceError::IndexShape);
    }
    if choice.sheet.iter().any(|&p| p > 1)
        || choice.boundary_lift.iter().any(|&p| p > 1)
        || choice.vertex_lift.iter().any(|&p| p > 1)
        || choice.edge_lift.values().any(|&p| p > 1)
    {
        return Err(ChoiceError::BadParity);
    }
    let e_set = orientation_reversing_edges(dc, &choice.sheet);
    let keys: Vec<usize> = choice.edge_lift.keys().copied().collect();
    if keys != e_set {
        return Err(ChoiceError::EdgeLiftKeys);
    }
    let admissible = |adm: &[usize], i: usize| adm.binary_search(&i).is_ok();
    for t in 0..s.num_faces() {
        for parity in 0..2usize {
            let fl = 2 * t + parity;
            let i = choice.index_of_face_lift(scheme, fl);
            if !admissible(scheme.adm_face(fl), i) {
                return Err(ChoiceError::NotAdmissible { cell: format!("face lift {fl}"), index: i });
            }
        }
    }
    for e in 0..s.num_edges() {
        for parity in 0..2usize {
            let el = 2 * e + parity;
            let i = choice.index_of_edge_lift(scheme, el);
            if !admissible(scheme.adm_edge(el), i) {
                return Err(ChoiceError::NotAdmissible { cell: format!("edge lift {el}"), index: i });
            }
        }
    }
    for v in 0..s.num_vertices() {
        for parity in 0..2usize {
            let vl = 2 * v + parity;
            let i = choice.index_of_vertex_lift(scheme, vl);
            if !admissible(scheme.adm_vertex(vl), i) {
                return Err(ChoiceError::NotAdmissible { cell: format!("vertex lift {vl}"), index: i });
            }
        }
    }
    Ok(())
}

/// Result of a choice enumeration: the materialized choices and whether they
/// are the complete space or a seeded sample.
#[derive(Debug, Clone)]
pub struct ChoiceSweep {
    pub choices: Vec<DomainChoice>,
    pub exhaustive: bool,
    /// exact size of the choice space if it was not larger than the cap
    pub total: Option<u128>,
}

/// Exact size of the choice space, or `None` as soon as it exceeds `cap`.
pub fn count_choices(dc: &DoubleCover, scheme: &IndexScheme, cap: u128) -> Option<u128> {
    let s = dc.surface();
    let nf = s.num_faces();
    let mut base: u128 = 1;
    let mul = |acc: &mut u128, k: u128| -> Option<()> {
        *acc = acc.checked_mul(k)?;
        if *acc > cap {
            None
        } else {
            Some(())
        }
    };
    for f in 0..nf {
        mul(&mut base, scheme.adm_faces[f][0].len() as u128)?;
    }
    for e in 0..s.num_edges() {
        mul(&mut base, scheme.adm_edges[e][0].len() as u128)?;
    }
    for v in 0..s.num_vertices() {
        mul(&mut base, scheme.adm_vertices[v][0].len() as u128)?;
    }
    if dc.boundary_circles().len() >= 64 || s.num_vertices() >= 64 {
        return None;
    }
    mul(&mut base, 1u128 << dc.boundary_circles().len())?;
    mul(&mut base, 1u128 << s.num_vertices())?;
    if nf > 24 {
        return None; // 2^nf alone dwarfs any desk-scale cap
    }
    let mut total: u128 = 0;
    let mut sheet = vec![0u8; nf];
    for mask in 0..(1u64 << nf) {
        for (t, st) in sheet.iter_mut().enumerate() {
            *st = ((mask >> t) & 1) as u8;
        }
        let e_count = orientation_reversing_edges(dc, &sheet).len() as u32;
        let term = base.checked_mul(1u128 << e_count)?;
        total = total.checked_add(term)?;
        if total > cap {
            return None;
        }
    }
    Some(total)
}

fn sample_choice<R: Rng>(dc: &DoubleCover, scheme: &IndexScheme, rng: &mut R) -> DomainChoice {
    let s = dc.surface();
    let sheet: Vec<u8> = (0..s.num_faces()).map(|_| rng.gen_range(0..2u8)).collect();
    let boundary_lift: Vec<u8> = (0..dc.boundary_circles().len())
        .map(|_| rng.gen_range(0..2u8))
        .collect();
    let vertex_lift: Vec<u8> = (0..s.num_vertices()).map(|_| rng.gen_range(0..2u8)).collect();
    let edge_lift: BTreeMap<usize, u8> = orientation_reversing_edges(dc, &sheet)
        .into_iter()
        .map(|e| (e, rng.gen_range(0..2u8)))
        .collect();
    let pick = |adm: &[usize], rng: &mut R| adm[rng.gen_range(0..adm.len())];
    let face_index = (0..s.num_faces()).map(|f| pick(&scheme.adm_faces[f][0], rng)).collect();
    let edge_index = (0..s.num_edges()).map(|e| pick(&scheme.adm_edges[e][0], rng)).collect();
    let vertex_index = (0..s.num_vertices())
        .map(|v| pick(&scheme.adm_vertices[v][0], rng))
        .collect();
    DomainChoice {
        sheet,
        boundary_lift,
        edge_lift,
        vertex_lift,
        face_index,
        edge_index,
        vertex_index,
    }
}

/// Enumerates the choice space.  If its exact size is at most `cap` the
/// result is exhaustive, in a fixed canonical order; otherwise it is
/// `samples` seeded draws (componentwise uniform).  `cap = 0` yields an
/// empty sweep.  The same arguments always produce the same sequence.
pub fn enumerate_choices(
    dc: &DoubleCover,
    scheme: &IndexScheme,
    cap: u128,
    samples: usize,
    seed: u64,
) -> ChoiceSweep {
    if cap == 0 {
        return ChoiceSweep { choices: Vec::new(), exhaustive: false, total: None };
    }
    if let Some(total) = count_choices(dc, scheme, cap) {
        let s = dc.surface();
        let nf = s.num_faces();
        let mut out = Vec::with_capacity(total as usize);
        let mut sheet = vec![0u8; nf];
        for mask in 0..(1u64 << nf) {
            for (t, st) in sheet.iter_mut().enumerate() {
                *st = ((mask >> t) & 1) as u8;
            }
            let e_set = orientation_reversing_edges(dc, &sheet);
            let ncirc = dc.boundary_circles().len();
            let nv = s.num_vertices();
            for bmask in 0..(1u64 << ncirc) {
                let boundary_lift: Vec<u8> =
                    (0..ncirc).map(|c| ((bmask >> c) & 1) as u8).collect();
                for vmask in 0..(1u64 << nv) {
                    let vertex_lift: Vec<u8> =
                        (0..nv).map(|v| ((vmask >> v) & 1) as u8).collect();
                    for emask in 0..(1u64 << e_set.len()) {
                        let edge_lift: BTreeMap<usize, u8> = e_set
                            .iter()
                            .enumerate()
                            .map(|(i, &e)| (e, ((emask >> i) & 1) as u8))
                            .collect();
                        // odometer over index assignments
                        let cells: Vec<&Vec<usize>> = (0..nf)
                            .map(|f| &scheme.adm_faces[f][0])
                            .chain((0..s.num_edges()).map(|e| &scheme.adm_edges[e][0]))
                            .chain((0..nv).map(|v| &scheme.adm_vertices[v][0]))
                            .collect();
                        let mut pos = vec![0usize; cells.len()];
                        loop {
                            let face_index: Vec<usize> =
                                (0..nf).map(|f| cells[f][pos[f]]).collect();
                            let edge_index: Vec<usize> = (0..s.num_edges())
                                .map(|e| cells[nf + e][pos[nf + e]])
                                .collect();
                            let off = nf + s.num_edges();
                            let vertex_index: Vec<usize> =
                                (0..nv).map(|v| cells[off + v][pos[off + v]]).collect();
                            out.push(DomainChoice {
                                sheet: sheet.clone(),
                                boundary_lift: boundary_lift.clone(),
                                edge_lift: edge_lift.clone(),
                                vertex_lift: vertex_lift.clone(),
                                face_index,
                                edge_index,
                                vertex_index,
                            });
                            // advance odometer
                            let mut c = cells.len();
                            loop {
                                if c == 0 {
                                    break;
                                }
                                c -= 1;
                                pos[c] += 1;
                                if pos[c] < cells[c].len() {
                                    break;
                                }
                                pos[c] = 0;
                                if c == 0 {
                                    c = usize::MAX;
                                    break;
                                }
                            }
                            if c == usize::MAX {
                                break;
                            }
                        }
                    }
                }
            }
        }
        debug_assert_eq!(out.len() as u128, total);
        ChoiceSweep { choices: out, exhaustive: true, total: Some(total) }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let choices = (0..samples).map(|_| sample_choice(dc, scheme, &mut rng)).collect();
        ChoiceSweep { choices, exhaustive: false, total: None }
    }
}

/// The lexicographically first choice (all parities 0, least admissible
/// indices): the canonical single evaluation point.
pub fn canonical_choice(dc: &DoubleCover, scheme: &IndexScheme) -> DomainChoice {
    let s = dc.surface();
    let sheet = vec![0u8; s.num_faces()];
    let edge_lift = orientation_reversing_edges(dc, &sheet)
        .into_iter()
        .map(|e| (e, 0u8))
        .collect();
    DomainChoice {
        sheet,
        boundary_lift: vec![0; dc.boundary_circles().len()],
        edge_lift,
        vertex_lift: vec![0; s.num_vertices()],
        face_index: (0..s.num_faces()).map(|f| scheme.adm_faces[f][0][0]).collect(),
        edge_index: (0..s.num_edges()).map(|e| scheme.adm_edges[e][0][0]).collect(),
        vertex_index: (0..s.num_vertices()).map(|v| scheme.adm_vertices[v][0][0]).collect(),
    }
}
