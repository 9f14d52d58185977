//! Edge bisection of a triangulated surface together with the transfer of
//! local data onto the refined complex.
//!
//! Splitting an edge `e = [a,b]` inserts a vertex `w`, replaces `e` by the
//! halves `e₁ = [a,w]` (which keeps e's id) and `e₂ = [w,b]`, and cuts each
//! adjacent face along a median from `w` to the opposite corner.  The child
//! triangle containing `a` keeps the parent's face id; the other child and
//! the medians get fresh ids.
//!
//! Data transfer keeps every relation intact: values on untouched cells are
//! copied along the canonical lift correspondence, half-edge and child-face
//! values are multiplicative splits of the parent (optionally randomised, so
//! refinement invariance is tested against genuinely new cocycle
//! representatives), and each remaining value is forced by exactly one
//! relation.  A final validation pass guards the whole construction.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cover::{DoubleCover, EdgeCell, FaceCell, IndexScheme, SideRef, Surface};
use crate::data::{DatumError, OrientifoldDatum, Transport};
use crate::phase::{random_phase, random_unitary, Phase};

/// One split face, downstairs: parent `f` (kept by the child containing the
/// half `[a,w]`), the appended child `u`, the side position `q` of the split
/// edge, its traversal flag `dq` there, and the median edge id `m`.
#[derive(Debug, Clone, Copy)]
struct SplitFace {
    f: usize,
    u: usize,
    q: usize,
    dq: bool,
    m: usize,
}

fn draw_phase(rng: &mut Option<ChaCha8Rng>) -> Phase {
    match rng {
        Some(r) => random_phase(r),
        None => Phase::one(),
    }
}

fn draw_transport(rng: &mut Option<ChaCha8Rng>, rank: usize) -> Transport {
    match rng {
        Some(r) if rank == 1 => Transport::Exact(random_phase(r)),
        Some(r) => Transport::Mat(random_unitary(r, rank)),
        None => Transport::identity(rank),
    }
}

/// The side of face lift `fl` lying over downstairs side `s` of its face.
fn side_at(dc: &DoubleCover, fl: usize, s: usize) -> (usize, bool) {
    let pos = if fl % 2 == 0 { s } else { 2 - s };
    dc.face_lift_sides(fl)[pos]
}

/// Record a lift correspondence, insisting that repeated views agree.
fn record(map: &mut [usize], key: usize, val: usize) -> Result<(), DatumError> {
    if map[key] != usize::MAX && map[key] != val {
        return Err(DatumError::Invalid(format!(
            "inconsistent lift correspondence at {key}: {} vs {val}",
            map[key]
        )));
    }
    map[key] = val;
    Ok(())
}

/// Bisect edge `e` of `dc` and transfer `d` onto the refinement.  With
/// `seed: Some(_)` the parent values are split by seeded random factors;
/// with `None` the split is neutral (first halves inherit the parent value
/// trivially), so a neutral split of the all-identity datum is again the
/// all-identity datum.
///
/// The transferred datum validates clean whenever `d` does, and has the same
/// holonomy for every domain choice.
pub fn subdivide(
    d: &OrientifoldDatum,
    dc: &DoubleCover,
    e: usize,
    seed: Option<u64>,
) -> Result<(OrientifoldDatum, DoubleCover), DatumError> {
    let surface = dc.surface();
    let (nv, ne, nf) = (surface.num_vertices(), surface.num_edges(), surface.num_faces());
    if e >= ne {
        return Err(DatumError::NoSuchEdge(e));
    }
    let mut adjacent: Vec<(usize, usize)> = Vec::new();
    for f in 0..nf {
        for q in 0..3 {
            if surface.face(f).sides[q].edge == e {
                adjacent.push((f, q));
            }
        }
    }
    if adjacent.len() == 2 && adjacent[0].0 == adjacent[1].0 {
        return Err(DatumError::SelfGluedEdge(e));
    }

    // ---- downstairs refinement -------------------------------------------
    let w = nv;
    let e2 = ne;
    let [a, b] = surface.edge(e).ends;
    let _ = (a, b);
    let eb = surface.edge(e).boundary;
    let mut edges: Vec<EdgeCell> = (0..ne).map(|i| surface.edge(i).clone()).collect();
    edges[e] = EdgeCell { ends: [surface.edge(e).ends[0], w], boundary: eb };
    edges.push(EdgeCell { ends: [w, surface.edge(e).ends[1]], boundary: eb });
    let mut faces: Vec<FaceCell> = (0..nf).map(|i| surface.face(i).clone()).collect();
    let mut splits: Vec<SplitFace> = Vec::new();
    for (idx, &(f, q)) in adjacent.iter().enumerate() {
        let old = faces[f].clone();
        let dq = old.sides[q].forward;
        let beta = old.sides[(q + 1) % 3];
        let gamma = old.sides[(q + 2) % 3];
        let cv = surface.corner_vertex(f, (q + 2) % 3);
        let m = edges.len();
        edges.push(EdgeCell { ends: [w, cv], boundary: false });
        // halves in parent traversal order: A→w then w→B
        let (first, second) = if dq {
            (SideRef { edge: e, forward: true }, SideRef { edge: e2, forward: true })
        } else {
            (SideRef { edge: e2, forward: false }, SideRef { edge: e, forward: false })
        };
        faces[f] = FaceCell { sides: [first, SideRef { edge: m, forward: true }, gamma] };
        faces.push(FaceCell { sides: [second, beta, SideRef { edge: m, forward: false }] });
        splits.push(SplitFace { f, u: nf + idx, q, dq, m });
    }
    let new_surface = Surface::from_parts(nv + 1, edges, faces, None)
        .map_err(|err| DatumError::Invalid(err.to_string()))?;
    let new_dc =
        DoubleCover::new(new_surface).map_err(|err| DatumError::Invalid(err.to_string()))?;

    // ---- lift correspondence --------------------------------------------
    // Children keep the parent lift's parity: the preserved β/γ side flags
    // pin the orientation of each child lift to its parent, and the gluing
    // relation across any unsplit edge (and across the halves of `e`) is the
    // same parity equation before and after the split.
    let mut edge_map: Vec<usize> = vec![usize::MAX; dc.num_edge_lifts()];
    let mut vert_map: Vec<usize> = vec![usize::MAX; dc.num_vertex_lifts()];
    let mut l1 = [usize::MAX; 2]; // e₁-lift corresponding to old lift 2e+p
    let mut l2 = [usize::MAX; 2]; // e₂-lift
    let split_of_face = |f: usize| splits.iter().find(|sp| sp.f == f).copied();
    for fl in 0..dc.num_face_lifts() {
        let f = fl / 2;
        match split_of_face(f) {
            None => {
                for s in 0..3 {
                    let (old_el, _) = side_at(dc, fl, s);
                    let (new_el, _) = side_at(&new_dc, fl, s);
                    record(&mut edge_map, old_el, new_el)?;
                }
                for c in 0..3 {
                    record(
                        &mut vert_map,
                        dc.corner_vertex_lift(fl, c),
                        new_dc.corner_vertex_lift(fl, c),
                    )?;
                }
            }
            Some(sp) => {
                let ul = 2 * sp.u + fl % 2;
                let (old_gamma, _) = side_at(dc, fl, (sp.q + 2) % 3);
                let (new_gamma, _) = side_at(&new_dc, fl, 2);
                record(&mut edge_map, old_gamma, new_gamma)?;
                let (old_beta, _) = side_at(dc, fl, (sp.q + 1) % 3);
                let (new_beta, _) = side_at(&new_dc, ul, 1);
                record(&mut edge_map, old_beta, new_beta)?;
                let (old_e, _) = side_at(dc, fl, sp.q);
                let (t0, _) = side_at(&new_dc, fl, 0);
                let (u0, _) = side_at(&new_dc, ul, 0);
                let (half1, half2) = if sp.dq { (t0, u0) } else { (u0, t0) };
                record(&mut l1, old_e - 2 * e, half1)?;
                record(&mut l2, old_e - 2 * e, half2)?;
                record(
                    &mut vert_map,
                    dc.corner_vertex_lift(fl, sp.q),
                    new_dc.corner_vertex_lift(fl, 0),
                )?;
                record(
                    &mut vert_map,
                    dc.corner_vertex_lift(fl, (sp.q + 1) % 3),
                    new_dc.corner_vertex_lift(ul, 1),
                )?;
                record(
                    &mut vert_map,
                    dc.corner_vertex_lift(fl, (sp.q + 2) % 3),
                    new_dc.corner_vertex_lift(fl, 2),
                )?;
                debug_assert_eq!(
                    new_dc.corner_vertex_lift(fl, 1),
                    new_dc.corner_vertex_lift(ul, 0)
                );
            }
        }
    }
    let w_lift = [new_dc.edge_lift_ends(l1[0])[1], new_dc.edge_lift_ends(l1[1])[1]];
    debug_assert_eq!(new_dc.sigma(w_lift[0]), w_lift[1]);
    debug_assert_eq!(new_dc.sigma(l1[0]), l1[1]);
    debug_assert_eq!(new_dc.sigma(l2[0]), l2[1]);
    debug_assert_eq!(new_dc.edge_lift_ends(l2[0])[0], w_lift[0]);
    debug_assert!(edge_map
        .iter()
        .enumerate()
        .all(|(el, &x)| el / 2 == e || x != usize::MAX));
    debug_assert!(vert_map.iter().all(|&x| x != usize::MAX));

    // ---- admissibility transfer ------------------------------------------
    let scheme = &d.scheme;
    let n_medians = splits.len();
    let mut adm_faces: Vec<[Vec<usize>; 2]> = vec![[Vec::new(), Vec::new()]; nf + n_medians];
    let mut adm_edges: Vec<[Vec<usize>; 2]> = vec![[Vec::new(), Vec::new()]; ne + 1 + n_medians];
    let mut adm_vertices: Vec<[Vec<usize>; 2]> = vec![[Vec::new(), Vec::new()]; nv + 1];
    for fl in 0..dc.num_face_lifts() {
        let adm = scheme.adm_face(fl).to_vec();
        adm_faces[fl / 2][fl % 2] = adm.clone();
        if let Some(sp) = split_of_face(fl / 2) {
            let ul = 2 * sp.u + fl % 2;
            adm_faces[ul / 2][ul % 2] = adm.clone();
            let (mel, _) = side_at(&new_dc, fl, 1);
            adm_edges[mel / 2][mel % 2] = adm;
        }
    }
    for el in 0..dc.num_edge_lifts() {
        let adm = scheme.adm_edge(el).to_vec();
        if el / 2 == e {
            let p = el - 2 * e;
            adm_edges[l1[p] / 2][l1[p] % 2] = adm.clone();
            adm_edges[l2[p] / 2][l2[p] % 2] = adm;
        } else {
            let nel = edge_map[el];
            adm_edges[nel / 2][nel % 2] = adm;
        }
    }
    for vl in 0..dc.num_vertex_lifts() {
        let nvl = vert_map[vl];
        adm_vertices[nvl / 2][nvl % 2] = scheme.adm_vertex(vl).to_vec();
    }
    for p in 0..2 {
        adm_vertices[w_lift[p] / 2][w_lift[p] % 2] = scheme.adm_edge(2 * e + p).to_vec();
    }
    let new_scheme = IndexScheme {
        count: scheme.count,
        k: scheme.k.clone(),
        adm_faces,
        adm_edges,
        adm_vertices,
    };
    new_scheme.validate(&new_dc).map_err(|err| DatumError::Invalid(err.to_string()))?;

    // ---- datum transfer --------------------------------------------------
    let mut rng = seed.map(ChaCha8Rng::seed_from_u64);
    let k = scheme.k.clone();
    let mut out = OrientifoldDatum::identity(&new_dc, &new_scheme, d.rank);

    // copy untouched cells; split face values multiplicatively per index
    for ((fl, i), v) in &d.face_b {
        match split_of_face(fl / 2) {
            None => {
                out.face_b.insert((*fl, *i), v.clone());
            }
            Some(sp) => {
                let ul = 2 * sp.u + fl % 2;
                let r = draw_phase(&mut rng);
                out.face_b.insert((*fl, *i), v.mul(&r));
                out.face_b.insert((ul, *i), r.inv());
            }
        }
    }
    for ((el, i, j), v) in &d.edge_a {
        if el / 2 != e {
            out.edge_a.insert((edge_map[*el], *i, *j), v.clone());
        }
    }
    for ((el, i), v) in &d.edge_pi {
        if el / 2 != e {
            out.edge_pi.insert((edge_map[*el], *i), v.clone());
        }
    }
    for ((el, i), v) in &d.edge_t {
        if el / 2 != e {
            out.edge_t.insert((edge_map[*el], *i), v.clone());
        }
    }
    for ((vl, i, j, l), v) in &d.g_v {
        out.g_v.insert((vert_map[*vl], *i, *j, *l), v.clone());
    }
    for ((vl, i, j), v) in &d.chi_v {
        out.chi_v.insert((vert_map[*vl], *i, *j), v.clone());
    }
    for ((vl, i), v) in &d.f_v {
        out.f_v.insert((vert_map[*vl], *i), v.clone());
    }
    for ((vl, i, j), v) in &d.g_big {
        out.g_big.insert((vert_map[*vl], *i, *j), v.clone());
    }
    for ((vl, i), v) in &d.h_big {
        out.h_big.insert((vert_map[*vl], *i), v.clone());
    }

    let (wa, wb) = (w_lift[0], w_lift[1]);
    let adm_wa: Vec<usize> = new_scheme.adm_vertex(wa).to_vec();
    let adm_wb: Vec<usize> = new_scheme.adm_vertex(wb).to_vec();

    // fV at the new vertex: free on one lift, R9 on the other
    for &i in &adm_wa {
        let r = draw_phase(&mut rng);
        out.f_v.insert((wa, i), r.clone());
        out.f_v.insert((wb, k[i]), r.inv());
    }
    // chiV: free on one lift, R8 on the other
    for (ai, &i) in adm_wa.iter().enumerate() {
        for &j in &adm_wa[ai + 1..] {
            out.chi_v.insert((wa, i, j), draw_phase(&mut rng));
        }
    }
    for (ai, &i) in adm_wb.iter().enumerate() {
        for &j in &adm_wb[ai + 1..] {
            let v = out
                .chi_v(wa, k[i], k[j])?
                .mul(&out.f_v(wa, k[i])?)
                .mul(&out.f_v(wa, k[j])?.inv());
            out.chi_v.insert((wb, i, j), v);
        }
    }

    // edgeA / edgePi: random split on the parity-0 parent lift, σ-partners
    // solved from R5/R7
    let adm_half: Vec<usize> = new_scheme.adm_edge(l1[0]).to_vec();
    for (ai, &i) in adm_half.iter().enumerate() {
        for &j in &adm_half[ai + 1..] {
            let s = draw_phase(&mut rng);
            out.edge_a.insert((l1[0], i, j), s.clone());
            out.edge_a.insert((l2[0], i, j), d.edge_a(2 * e, i, j)?.mul(&s.inv()));
        }
    }
    for &i in &adm_half {
        let p = draw_phase(&mut rng);
        out.edge_pi.insert((l1[0], i), p.clone());
        out.edge_pi.insert((l2[0], i), d.edge_pi(2 * e, i)?.mul(&p.inv()));
    }
    for half in [l1, l2] {
        let [start, end] = new_dc.edge_lift_ends(half[0]);
        let adm_sig: Vec<usize> = new_scheme.adm_edge(half[1]).to_vec();
        for &i in &adm_sig {
            let v = out
                .edge_pi(half[0], k[i])?
                .mul(&out.f_v(start, k[i])?.inv())
                .mul(&out.f_v(end, k[i])?);
            out.edge_pi.insert((half[1], i), v);
        }
        for (ai, &i) in adm_sig.iter().enumerate() {
            for &j in &adm_sig[ai + 1..] {
                let rhs = out
                    .edge_pi(half[0], k[j])?
                    .mul(&out.edge_pi(half[0], k[i])?.inv())
                    .mul(&out.chi_v(end, k[i], k[j])?)
                    .mul(&out.chi_v(start, k[i], k[j])?.inv());
                let v = out.edge_a(half[0], k[i], k[j])?.inv().mul(&rhs.inv());
                out.edge_a.insert((half[1], i, j), v);
            }
        }
    }

    // gV at the new vertex, forced by R2 along the first half
    for (wl, l1l) in [(wa, l1[0]), (wb, l1[1])] {
        let start = new_dc.edge_lift_ends(l1l)[0];
        let adm: Vec<usize> = new_scheme.adm_vertex(wl).to_vec();
        for (ai, &i) in adm.iter().enumerate() {
            for (aj, &j) in adm[ai + 1..].iter().enumerate() {
                for &l in &adm[ai + 1 + aj + 1..] {
                    let combo = out
                        .edge_a(l1l, i, j)?
                        .mul(&out.edge_a(l1l, i, l)?.inv())
                        .mul(&out.edge_a(l1l, j, l)?);
                    let v = out.g_v(start, i, j, l)?.mul(&combo.inv());
                    out.g_v.insert((wl, i, j, l), v);
                }
            }
        }
    }

    // median A and Π, forced by R1/R4 on the child keeping the parent id
    for sp in &splits {
        for fl in [2 * sp.f, 2 * sp.f + 1] {
            let (mel, mdir) = side_at(&new_dc, fl, 1);
            let adm: Vec<usize> = new_scheme.adm_face(fl).to_vec();
            let known = |skip: usize,
                         out: &OrientifoldDatum,
                         factor: &dyn Fn(&OrientifoldDatum, usize) -> Result<Phase, DatumError>|
             -> Result<Phase, DatumError> {
                let mut acc = Phase::one();
                for &(el, dir) in new_dc.face_lift_sides(fl) {
                    if el == skip {
                        continue;
                    }
                    let v = factor(out, el)?;
                    acc = acc.mul(&if dir { v } else { v.inv() });
                }
                Ok(acc)
            };
            for (ai, &i) in adm.iter().enumerate() {
                for &j in &adm[ai + 1..] {
                    let ratio = out.face_b(fl, j)?.mul(&out.face_b(fl, i)?.inv());
                    let rest = known(mel, &out, &|o, el| o.edge_a(el, i, j))?;
                    let solved = ratio.mul(&rest.inv());
                    out.edge_a.insert((mel, i, j), if mdir { solved } else { solved.inv() });
                }
            }
            for &i in &adm {
                let ratio =
                    out.face_b(new_dc.sigma(fl), k[i])?.mul(&out.face_b(fl, i)?.inv());
                let rest = known(mel, &out, &|o, el| o.edge_pi(el, i))?;
                let solved = ratio.mul(&rest.inv());
                out.edge_pi.insert((mel, i), if mdir { solved } else { solved.inv() });
            }
        }
    }

    // module layer: only a boundary split touches it
    if eb {
        for &i in &adm_half {
            let t = draw_transport(&mut rng, d.rank);
            out.edge_t.insert((l1[0], i), t.clone());
            out.edge_t.insert((l2[0], i), d.edge_t(2 * e, i)?.mul(&t.inv()));
        }
        for &i in &adm_wa {
            let h = draw_transport(&mut rng, d.rank);
            out.h_big.insert((wa, i), h.clone());
            out.h_big.insert((wb, k[i]), h.inv().scale(&out.f_v(wa, i)?).conj());
        }
        for half in [l1, l2] {
            let [start, end] = new_dc.edge_lift_ends(half[0]);
            let adm_sig: Vec<usize> = new_scheme.adm_edge(half[1]).to_vec();
            for &i in &adm_sig {
                let v = out
                    .h_big(end, k[i])?
                    .inv()
                    .mul(&out.edge_t(half[0], k[i])?)
                    .mul(&out.h_big(start, k[i])?)
                    .scale(&out.edge_pi(half[0], k[i])?.inv())
                    .conj();
                out.edge_t.insert((half[1], i), v);
            }
        }
        for (wl, l1l) in [(wa, l1[0]), (wb, l1[1])] {
            let start = new_dc.edge_lift_ends(l1l)[0];
            let adm: Vec<usize> = new_scheme.adm_vertex(wl).to_vec();
            for (ai, &i) in adm.iter().enumerate() {
                for &j in &adm[ai + 1..] {
                    let v = out
                        .edge_t(l1l, i)?
                        .mul(&out.g_big(start, i, j)?)
                        .scale(&out.edge_a(l1l, i, j)?.inv())
                        .mul(&out.edge_t(l1l, j)?.inv());
                    out.g_big.insert((wl, i, j), v);
                }
            }
        }
    }

    let report = out.validate(&new_dc, 1e-9);
    if !report.is_clean() {
        return Err(DatumError::Invalid(format!(
            "subdivision produced {} violations, first: {:?}",
            report.violations.len(),
            report.violations.first()
        )));
    }
    Ok((out, new_dc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::SurfaceSpec;
    use crate::data::generate_pure_gauge;

    fn cover(name: &str) -> DoubleCover {
        DoubleCover::new(Surface::build(&SurfaceSpec::named(name).unwrap()).unwrap()).unwrap()
    }

    fn full_scheme(dc: &DoubleCover, count: usize, swap: bool) -> IndexScheme {
        let k: Vec<usize> =
            if swap { (0..count).map(|i| count - 1 - i).collect() } else { (0..count).collect() };
        IndexScheme::full(dc, count, k)
    }

    #[test]
    fn neutral_split_of_identity_is_identity() {
        for name in ["mobius", "torus", "klein", "annulus", "disk"] {
            let dc = cover(name);
            let scheme = full_scheme(&dc, 2, true);
            let d = OrientifoldDatum::identity(&dc, &scheme, 1);
            for e in 0..dc.surface().num_edges() {
                let Ok((nd, _ndc)) = subdivide(&d, &dc, e, None) else {
                    continue; // self-glued edges are refused
                };
                assert!(nd.face_b.values().all(|v| v.is_one()), "{name} e={e}");
                assert!(nd.edge_a.values().all(|v| v.is_one()), "{name} e={e}");
                assert!(nd.g_v.values().all(|v| v.is_one()), "{name} e={e}");
                assert!(nd.edge_pi.values().all(|v| v.is_one()), "{name} e={e}");
                assert!(nd.chi_v.values().all(|v| v.is_one()), "{name} e={e}");
                assert!(nd.f_v.values().all(|v| v.is_one()), "{name} e={e}");
                assert!(nd.edge_t.values().all(|t| t == &Transport::identity(1)));
            }
        }
    }

    #[test]
    fn random_splits_stay_clean_on_every_edge() {
        for name in ["mobius", "klein", "rp2", "annulus"] {
            let dc = cover(name);
            let scheme = full_scheme(&dc, 2, true);
            let d = generate_pure_gauge(&dc, &scheme, 1, 3, None).unwrap();
            let mut tried = 0;
            for e in 0..dc.surface().num_edges() {
                match subdivide(&d, &dc, e, Some(17 + e as u64)) {
                    Ok((nd, ndc)) => {
                        tried += 1;
                        assert!(nd.validate(&ndc, 1e-9).is_clean(), "{name} e={e}");
                    }
                    Err(DatumError::SelfGluedEdge(_)) => {}
                    Err(err) => panic!("{name} e={e}: {err}"),
                }
            }
            assert!(tried > 0, "{name}: no subdividable edge");
        }
    }

    #[test]
    fn boundary_split_carries_the_module_layer() {
        let dc = cover("mobius");
        let scheme = full_scheme(&dc, 2, true);
        for rank in [1usize, 2] {
            let d = generate_pure_gauge(&dc, &scheme, rank, 5, None).unwrap();
            let be = dc.surface().boundary_edges()[0];
            let (nd, ndc) = subdivide(&d, &dc, be, Some(9)).unwrap();
            assert!(nd.validate(&ndc, 1e-9).is_clean(), "rank {rank}");
            assert_eq!(ndc.boundary_circles().len(), dc.boundary_circles().len());
            assert!(nd.edge_t.len() > d.edge_t.len());
        }
    }

    #[test]
    fn repeated_subdivision_stays_clean() {
        let dc = cover("klein");
        let scheme = full_scheme(&dc, 2, true);
        let mut d = generate_pure_gauge(&dc, &scheme, 1, 8, None).unwrap();
        let mut cur = dc;
        for round in 0..3 {
            let e = (round * 2) % cur.surface().num_edges();
            let (nd, ndc) = match subdivide(&d, &cur, e, Some(round as u64)) {
                Ok(x) => x,
                Err(DatumError::SelfGluedEdge(_)) => subdivide(&d, &cur, e + 1, Some(round as u64)).unwrap(),
                Err(err) => panic!("{err}"),
            };
            assert!(nd.validate(&ndc, 1e-9).is_clean(), "round {round}");
            d = nd;
            cur = ndc;
        }
        assert_eq!(cur.surface().euler_characteristic(), 0);
        assert!(!cur.is_orientable());
    }

    #[test]
    fn bad_edges_are_refused() {
        let dc = cover("torus");
        let scheme = full_scheme(&dc, 2, true);
        let d = OrientifoldDatum::identity(&dc, &scheme, 1);
        assert!(matches!(
            subdivide(&d, &dc, 999, None).unwrap_err(),
            DatumError::NoSuchEdge(999)
        ));
    }
}
