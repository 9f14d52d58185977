//! The local holonomy formula on an unoriented surface, its oriented
//! specialisation, and the evaluation on the oriented double.
//!
//! The unoriented value is a product of three lines, each read off the
//! chosen fundamental domain:
//!
//! 1. per chosen face lift: the face phase, the transition phases along its
//!    boundary with the traversal sign, and vertex `gV` corrections at both
//!    slots of every side, signed by traversal times slot incidence;
//! 2. per arc of `E ∪ B̄`: the reflection phase `edgePi` along the arc, `chiV`
//!    corrections at both slots (opposite sign), and an `fV` factor at a slot
//!    exactly when that slot is the chosen lift of its vertex;
//! 3. per boundary circle: the trace of the path-ordered product of edge
//!    transports conjugated by the vertex connectors `GV` along the chosen
//!    lifted circle.
//!
//! All sign conventions are fixed here once, and their self-consistency is
//! certified by the invariance suite: the value is independent of every part
//! of the domain choice, gauge invariant, and squares to the value on the
//! oriented double.

use num_complex::Complex64;

use crate::cover::{
    enumerate_choices, f_bar, orientation_reversing_edges, validate_choice, ChoiceError,
    DomainChoice, DoubleCover,
};
use crate::data::{DatumError, OrientifoldDatum, Transport};
use crate::phase::Phase;

/// Validation tolerance used when an operation refuses an unvalidated datum.
const VALIDATE_TOL: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
pub enum HolonomyError {
    #[error("datum failed validation ({0} violations; first: {1})")]
    InvalidDatum(usize, String),
    #[error("invalid domain choice: {0}")]
    Choice(#[from] ChoiceError),
    #[error("sheet is not a coherent orientation section")]
    NotASection,
    #[error(transparent)]
    Datum(#[from] DatumError),
}

/// A holonomy value: exact rational phase at rank 1, complex number at rank
/// ≥ 2 (the boundary traces make it generally non-unimodular).
#[derive(Debug, Clone, PartialEq)]
pub enum HolonomyValue {
    Exact(Phase),
    Complex(Complex64),
}

impl HolonomyValue {
    pub fn to_complex(&self) -> Complex64 {
        match self {
            HolonomyValue::Exact(p) => p.to_complex(),
            HolonomyValue::Complex(z) => *z,
        }
    }
    pub fn squared(&self) -> HolonomyValue {
        match self {
            HolonomyValue::Exact(p) => HolonomyValue::Exact(p.mul(p)),
            HolonomyValue::Complex(z) => HolonomyValue::Complex(z * z),
        }
    }
    /// Exact equality when both values are exact, complex distance otherwise.
    pub fn agrees(&self, other: &HolonomyValue, tol: f64) -> bool {
        match (self, other) {
            (HolonomyValue::Exact(a), HolonomyValue::Exact(b)) => a == b,
            _ => (self.to_complex() - other.to_complex()).norm() <= tol,
        }
    }
}

fn refuse_invalid(d: &OrientifoldDatum, dc: &DoubleCover) -> Result<(), HolonomyError> {
    let report = d.validate(dc, VALIDATE_TOL);
    if !report.is_clean() {
        let first = report
            .violations
            .first()
            .map(|v| format!("{} at {}", v.relation, v.location))
            .unwrap_or_default();
        return Err(HolonomyError::InvalidDatum(report.violations.len(), first));
    }
    Ok(())
}

/// Line 1 over the given face lifts.
fn face_line<FT, FE, FV>(
    d: &OrientifoldDatum,
    dc: &DoubleCover,
    face_lifts: &[usize],
    it: FT,
    ie: FE,
    iv: FV,
) -> Result<Phase, DatumError>
where
    FT: Fn(usize) -> usize,
    FE: Fn(usize) -> usize,
    FV: Fn(usize) -> usize,
{
    let mut acc = Phase::one();
    for &fl in face_lifts {
        let i_t = it(fl);
        acc = acc.mul(&d.face_b(fl, i_t)?);
        for &(el, dir) in dc.face_lift_sides(fl) {
            let i_e = ie(el);
            let s: i64 = if dir { 1 } else { -1 };
            acc = acc.mul(&d.edge_a(el, i_t, i_e)?.pow_sign(s));
            let [start, end] = dc.edge_lift_ends(el);
            for (vl, eps) in [(start, -1i64), (end, 1i64)] {
                acc = acc.mul(&d.g_v(vl, i_t, i_e, iv(vl))?.pow_sign(s * eps));
            }
        }
    }
    Ok(acc)
}

/// Line 2 over the arcs of `E ∪ B̄`.
fn arc_line(
    d: &OrientifoldDatum,
    dc: &DoubleCover,
    choice: &DomainChoice,
) -> Result<Phase, DatumError> {
    let scheme = &d.scheme;
    let mut acc = Phase::one();
    for arc in f_bar(dc, choice) {
        let s: i64 = if arc.forward { 1 } else { -1 };
        let i_e = choice.index_of_edge_lift(scheme, arc.lift);
        acc = acc.mul(&d.edge_pi(arc.lift, i_e)?.pow_sign(s));
        let [start, end] = dc.edge_lift_ends(arc.lift);
        for (vl, eps) in [(start, -1i64), (end, 1i64)] {
            let i_v = choice.index_of_vertex_lift(scheme, vl);
            acc = acc.mul(&d.chi_v(vl, i_e, i_v)?.pow_sign(-s * eps));
            if choice.vertex_lift_of(vl / 2) == vl {
                acc = acc.mul(&d.f_v(vl, i_v)?.pow_sign(s * eps));
            }
        }
    }
    Ok(acc)
}

/// Line 3: one path-ordered product per listed lifted circle
/// (first-traversed factor rightmost).
fn wilson_line<FE, FV>(
    d: &OrientifoldDatum,
    dc: &DoubleCover,
    circles: &[(usize, u8)],
    ie: FE,
    iv: FV,
) -> Result<Vec<Transport>, DatumError>
where
    FE: Fn(usize) -> usize,
    FV: Fn(usize) -> usize,
{
    let mut out = Vec::new();
    for &(c, p) in circles {
        let mut acc = Transport::identity(d.rank);
        for &(el, fwd) in dc.lifted_circle(c, p) {
            let i_e = ie(el);
            let [start, end] = dc.edge_lift_ends(el);
            let conn = d
                .g_big(end, i_e, iv(end))?
                .inv()
                .mul(&d.edge_t(el, i_e)?)
                .mul(&d.g_big(start, i_e, iv(start))?);
            let f = if fwd { conn } else { conn.inv() };
            acc = f.mul(&acc);
        }
        out.push(acc);
    }
    Ok(out)
}

fn combine(rank: usize, phase: Phase, loops: Vec<Transport>) -> HolonomyValue {
    if rank == 1 {
        let mut p = phase;
        for t in &loops {
            p = p.mul(t.as_exact().expect("rank-1 transports are exact"));
        }
        HolonomyValue::Exact(p)
    } else {
        let mut z = phase.to_complex();
        for t in &loops {
            z *= t.trace();
        }
        HolonomyValue::Complex(z)
    }
}

/// Holonomy for one domain choice, without re-validating the datum.  The
/// caller is responsible for having validated `d`; sweeps use this after one
/// up-front validation.
pub fn holonomy_unchecked(
    d: &OrientifoldDatum,
    dc: &DoubleCover,
    choice: &DomainChoice,
) -> Result<HolonomyValue, DatumError> {
    let scheme = &d.scheme;
    let face_lifts: Vec<usize> =
        (0..dc.surface().num_faces()).map(|t| choice.face_lift_of(t)).collect();
    let phase = face_line(
        d,
        dc,
        &face_lifts,
        |fl| choice.index_of_face_lift(scheme, fl),
        |el| choice.index_of_edge_lift(scheme, el),
        |vl| choice.index_of_vertex_lift(scheme, vl),
    )?
    .mul(&arc_line(d, dc, choice)?);
    let circles: Vec<(usize, u8)> =
        (0..dc.boundary_circles().len()).map(|c| (c, choice.boundary_lift[c])).collect();
    let loops = wilson_line(
        d,
        dc,
        &circles,
        |el| choice.index_of_edge_lift(scheme, el),
        |vl| choice.index_of_vertex_lift(scheme, vl),
    )?;
    Ok(combine(d.rank, phase, loops))
}

/// Holonomy of a validated datum for one domain choice.  Refuses an
/// unvalidated datum and an invalid choice.
pub fn holonomy(
    d: &OrientifoldDatum,
    dc: &DoubleCover,
    choice: &DomainChoice,
) -> Result<HolonomyValue, HolonomyError> {
    refuse_invalid(d, dc)?;
    validate_choice(dc, &d.scheme, choice)?;
    Ok(holonomy_unchecked(d, dc, choice)?)
}

/// Oriented holonomy: the choice's sheet must be a coherent orientation
/// section; only lines 1 and 3 are evaluated, with the boundary lifts forced
/// to the section-induced ones.  This is deliberately an independent
/// implementation against which the unoriented formula reduces.
pub fn holonomy_oriented(
    d: &OrientifoldDatum,
    dc: &DoubleCover,
    choice: &DomainChoice,
) -> Result<HolonomyValue, HolonomyError> {
    refuse_invalid(d, dc)?;
    validate_choice(dc, &d.scheme, choice)?;
    if !orientation_reversing_edges(dc, &choice.sheet).is_empty() {
        return Err(HolonomyError::NotASection);
    }
    let scheme = &d.scheme;
    let face_lifts: Vec<usize> =
        (0..dc.surface().num_faces()).map(|t| choice.face_lift_of(t)).collect();
    let phase = face_line(
        d,
        dc,
        &face_lifts,
        |fl| choice.index_of_face_lift(scheme, fl),
        |el| choice.index_of_edge_lift(scheme, el),
        |vl| choice.index_of_vertex_lift(scheme, vl),
    )?;
    // section-induced boundary lifts: the lift of each circle containing the
    // face-induced lifts of the section
    let mut circles = Vec::new();
    for (c, edges) in dc.boundary_circles().iter().enumerate() {
        let e = edges[0];
        let fl0 = dc.edge_lift_faces(2 * e)[0];
        let lift = 2 * e + if choice.sheet[fl0 / 2] as usize == fl0 % 2 { 0 } else { 1 };
        let parity = dc.lift_circle_parity(lift).expect("boundary edge lies on a lifted circle");
        circles.push((c, parity));
    }
    let loops = wilson_line(
        d,
        dc,
        &circles,
        |el| choice.index_of_edge_lift(scheme, el),
        |vl| choice.index_of_vertex_lift(scheme, vl),
    )?;
    Ok(combine(d.rank, phase, loops))
}

/// Holonomy of the oriented double itself: all face lifts and all lifted
/// circles, with the least admissible index assigned to every lifted cell.
/// The unoriented holonomy squares to this value for every domain choice.
pub fn holonomy_double(
    d: &OrientifoldDatum,
    dc: &DoubleCover,
) -> Result<HolonomyValue, HolonomyError> {
    refuse_invalid(d, dc)?;
    let scheme = &d.scheme;
    let face_lifts: Vec<usize> = (0..dc.num_face_lifts()).collect();
    let phase = face_line(
        d,
        dc,
        &face_lifts,
        |fl| scheme.adm_face(fl)[0],
        |el| scheme.adm_edge(el)[0],
        |vl| scheme.adm_vertex(vl)[0],
    )?;
    let mut circles = Vec::new();
    for c in 0..dc.boundary_circles().len() {
        circles.push((c, 0u8));
        circles.push((c, 1u8));
    }
    let loops = wilson_line(
        d,
        dc,
        &circles,
        |el| scheme.adm_edge(el)[0],
        |vl| scheme.adm_vertex(vl)[0],
    )?;
    Ok(combine(d.rank, phase, loops))
}

/// Result of sweeping the holonomy over many (or all) domain choices.
#[derive(Debug, Clone)]
pub struct SweepReport {
    pub value: HolonomyValue,
    pub rank: usize,
    pub choices_swept: usize,
    pub invariant: bool,
    /// whether the sweep covered the whole choice space
    pub exhaustive: bool,
}

/// Evaluate the holonomy over the whole choice space if it has at most `cap`
/// elements, else over `samples` seeded random choices, and report whether
/// all values agree (exactly at rank 1, within `1e-9·rank` otherwise).
pub fn holonomy_sweep(
    d: &OrientifoldDatum,
    dc: &DoubleCover,
    cap: u128,
    samples: usize,
    seed: u64,
) -> Result<SweepReport, HolonomyError> {
    refuse_invalid(d, dc)?;
    let sweep = enumerate_choices(dc, &d.scheme, cap, samples, seed);
    let tol = 1e-9 * d.rank as f64;
    let mut value: Option<HolonomyValue> = None;
    let mut invariant = true;
    let mut swept = 0usize;
    for choice in &sweep.choices {
        let v = holonomy_unchecked(d, dc, choice)?;
        swept += 1;
        match &value {
            None => value = Some(v),
            Some(v0) => {
                if !v0.agrees(&v, tol) {
                    invariant = false;
                }
            }
        }
    }
    let value = match value {
        Some(v) => v,
        None => {
            let c = crate::cover::canonical_choice(dc, &d.scheme);
            swept = 1;
            holonomy_unchecked(d, dc, &c)?
        }
    };
    Ok(SweepReport { value, rank: d.rank, choices_swept: swept, invariant, exhaustive: sweep.exhaustive })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::{canonical_choice, IndexScheme, Surface, SurfaceSpec};
    use crate::data::generate_pure_gauge;
    use crate::phase::{random_unitary, Unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cover(name: &str) -> DoubleCover {
        DoubleCover::new(Surface::build(&SurfaceSpec::named(name).unwrap()).unwrap()).unwrap()
    }

    fn full_scheme(dc: &DoubleCover, count: usize, swap: bool) -> IndexScheme {
        let k: Vec<usize> =
            if swap { (0..count).map(|i| count - 1 - i).collect() } else { (0..count).collect() };
        IndexScheme::full(dc, count, k)
    }

    const MODELS: [&str; 7] = ["disk", "sphere", "torus", "klein", "rp2", "mobius", "annulus"];

    #[test]
    fn identity_datum_has_unit_holonomy() {
        for name in MODELS {
            let dc = cover(name);
            let scheme = full_scheme(&dc, 2, true);
            let d = crate::data::OrientifoldDatum::identity(&dc, &scheme, 1);
            let c = canonical_choice(&dc, &scheme);
            assert_eq!(holonomy(&d, &dc, &c).unwrap(), HolonomyValue::Exact(Phase::one()));
            assert_eq!(holonomy_double(&d, &dc).unwrap(), HolonomyValue::Exact(Phase::one()));
        }
    }

    #[test]
    fn pure_gauge_is_trivial_for_every_choice() {
        // möbius: the value must be exactly 1 across the whole choice space
        let dc = cover("mobius");
        let scheme = full_scheme(&dc, 2, true);
        let d = generate_pure_gauge(&dc, &scheme, 1, 21, None).unwrap();
        let rep = holonomy_sweep(&d, &dc, 1 << 21, 0, 0).unwrap();
        assert!(rep.exhaustive, "choice space unexpectedly large");
        assert!(rep.invariant);
        assert_eq!(rep.value, HolonomyValue::Exact(Phase::one()));
        assert!(rep.choices_swept > 100);
    }

    #[test]
    fn face_phases_multiply_on_closed_oriented_surfaces() {
        // with A = g = Π = ... trivial and B constant per face pair, the
        // holonomy is the plain product of chosen face phases
        let dc = cover("torus");
        let scheme = full_scheme(&dc, 2, true);
        let mut d = crate::data::OrientifoldDatum::identity(&dc, &scheme, 1);
        let b0 = Phase::new(1, 3).unwrap();
        let b1 = Phase::new(1, 7).unwrap();
        for (key, v) in d.face_b.iter_mut() {
            *v = if key.0 / 2 == 0 { b0.clone() } else { b1.clone() };
        }
        assert!(d.validate(&dc, 1e-9).is_clean());
        let c = canonical_choice(&dc, &scheme);
        let expected = b0.mul(&b1);
        assert_eq!(holonomy(&d, &dc, &c).unwrap(), HolonomyValue::Exact(expected.clone()));
        assert_eq!(
            holonomy_oriented(&d, &dc, &c).unwrap(),
            HolonomyValue::Exact(expected.clone())
        );
        assert_eq!(
            holonomy_double(&d, &dc).unwrap(),
            HolonomyValue::Exact(expected.mul(&expected))
        );
    }

    #[test]
    fn boundary_traces_multiply_on_the_annulus() {
        // trivial datum except one transport per boundary circle
        let dc = cover("annulus");
        let scheme = full_scheme(&dc, 2, true);
        let mut d = crate::data::OrientifoldDatum::identity(&dc, &scheme, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut expected = Complex64::new(1.0, 0.0);
        for circle in 0..2 {
            let e = dc.boundary_circles()[circle][0];
            let u: Unitary = random_unitary(&mut rng, 2);
            for i in 0..scheme.count {
                d.edge_t.insert((2 * e, i), Transport::Mat(u.clone()));
                d.edge_t.insert((2 * e + 1, i), Transport::Mat(u.conj()));
            }
            expected *= u.trace();
        }
        assert!(d.validate(&dc, 1e-9).is_clean());
        let c = canonical_choice(&dc, &scheme);
        let got = holonomy(&d, &dc, &c).unwrap();
        assert!((got.to_complex() - expected).norm() < 1e-9, "{got:?} vs {expected}");
    }

    #[test]
    fn oriented_reduction_agrees_exactly() {
        for name in ["torus", "annulus", "disk", "sphere"] {
            let dc = cover(name);
            let scheme = full_scheme(&dc, 2, true);
            let d = generate_pure_gauge(&dc, &scheme, 1, 13, None).unwrap();
            let section = dc.orientation_section().expect("orientable model");
            let mut c = canonical_choice(&dc, &scheme);
            c.sheet = section;
            c.edge_lift = orientation_reversing_edges(&dc, &c.sheet)
                .into_iter()
                .map(|e| (e, 0u8))
                .collect();
            assert!(c.edge_lift.is_empty(), "{name}: section must leave E empty");
            // align the free boundary lifts with the induced ones so that the
            // two implementations see the same domain
            for (circle, edges) in dc.boundary_circles().iter().enumerate() {
                let e = edges[0];
                let fl0 = dc.edge_lift_faces(2 * e)[0];
                let lift = 2 * e + if c.sheet[fl0 / 2] as usize == fl0 % 2 { 0 } else { 1 };
                c.boundary_lift[circle] = dc.lift_circle_parity(lift).unwrap();
            }
            let full = holonomy(&d, &dc, &c).unwrap();
            let oriented = holonomy_oriented(&d, &dc, &c).unwrap();
            assert_eq!(full, oriented, "{name}");
            assert_eq!(full, HolonomyValue::Exact(Phase::one()), "{name}: pure gauge");
        }
        // non-sections are refused
        let dc = cover("klein");
        let scheme = full_scheme(&dc, 2, true);
        let d = generate_pure_gauge(&dc, &scheme, 1, 2, None).unwrap();
        let c = canonical_choice(&dc, &scheme);
        assert!(matches!(
            holonomy_oriented(&d, &dc, &c).unwrap_err(),
            HolonomyError::NotASection
        ));
    }

    #[test]
    fn square_law_holds_exactly_at_rank_one() {
        for name in MODELS {
            let dc = cover(name);
            let scheme = full_scheme(&dc, 2, true);
            let d = generate_pure_gauge(&dc, &scheme, 1, 31, None).unwrap();
            let double = holonomy_double(&d, &dc).unwrap();
            let c = canonical_choice(&dc, &scheme);
            let v = holonomy(&d, &dc, &c).unwrap();
            assert_eq!(v.squared(), double, "{name}");
        }
    }

    #[test]
    fn gauge_transformations_preserve_holonomy() {
        for name in ["klein", "mobius", "rp2", "annulus"] {
            for rank in [1usize, 2] {
                let dc = cover(name);
                let scheme = full_scheme(&dc, 2, true);
                let d = generate_pure_gauge(&dc, &scheme, rank, 7, None).unwrap();
                let g = crate::data::GaugeDatum::random(&dc, &scheme, rank, 99);
                let d2 = d.apply_gauge(&dc, &g).unwrap();
                let c = canonical_choice(&dc, &scheme);
                let v1 = holonomy(&d, &dc, &c).unwrap();
                let v2 = holonomy(&d2, &dc, &c).unwrap();
                if rank == 1 {
                    assert_eq!(v1, v2, "{name} rank {rank}");
                } else {
                    assert!(v1.agrees(&v2, 1e-9), "{name} rank {rank}: {v1:?} vs {v2:?}");
                }
            }
        }
    }

    #[test]
    fn twist_shift_follows_the_fold_class() {
        // The nontrivial twist class multiplies the holonomy by (−1) raised
        // to the mod-2 self-intersection of the fold curve — the Poincaré
        // dual of w₁.  That pairing is 1 on RP² and the Möbius strip and 0 on
        // the Klein bottle, so the twist negates the former two and leaves
        // the latter unchanged.  All statements are exhaustive over the whole
        // choice space of each model.
        let group = crate::group::OrientifoldGroup::jandl();
        let mut a = crate::cohomology::TwistedCochain::zero(&group, 2);
        a.set(&group, &[1, 1], Phase::new(1, 2).unwrap());
        for (name, shift) in [("klein", Phase::one()), ("rp2", Phase::new(1, 2).unwrap()),
                              ("mobius", Phase::new(1, 2).unwrap())] {
            let dc = cover(name);
            let scheme = full_scheme(&dc, 2, true);
            let plain = generate_pure_gauge(&dc, &scheme, 1, 5, None).unwrap();
            let twisted = generate_pure_gauge(&dc, &scheme, 1, 5, Some((&group, &a))).unwrap();
            let rep_p = holonomy_sweep(&plain, &dc, 1 << 22, 0, 0).unwrap();
            let rep_t = holonomy_sweep(&twisted, &dc, 1 << 22, 0, 0).unwrap();
            assert!(rep_p.exhaustive && rep_t.exhaustive, "{name}");
            assert!(rep_p.invariant && rep_t.invariant, "{name}");
            assert_eq!(rep_p.value, HolonomyValue::Exact(Phase::one()), "{name}");
            assert_eq!(rep_t.value, HolonomyValue::Exact(shift), "{name}");
        }
    }

    #[test]
    fn holonomy_survives_subdivision() {
        let dc = cover("rp2");
        let scheme = full_scheme(&dc, 2, true);
        let group = crate::group::OrientifoldGroup::jandl();
        let mut a = crate::cohomology::TwistedCochain::zero(&group, 2);
        a.set(&group, &[1, 1], Phase::new(1, 2).unwrap());
        // twisted so that the preserved value is not the trivial phase
        let d = generate_pure_gauge(&dc, &scheme, 1, 11, Some((&group, &a))).unwrap();
        let v0 = holonomy_sweep(&d, &dc, 1 << 22, 0, 0).unwrap();
        assert_eq!(v0.value, HolonomyValue::Exact(Phase::new(1, 2).unwrap()));
        let (d1, dc1) = crate::subdivide::subdivide(&d, &dc, 1, Some(77)).unwrap();
        let rep = holonomy_sweep(&d1, &dc1, 1 << 16, 200, 3).unwrap();
        assert!(rep.invariant);
        assert_eq!(rep.value, v0.value);
        // and once more on a boundary surface with a module layer
        let dc = cover("mobius");
        let scheme = full_scheme(&dc, 2, true);
        let d = generate_pure_gauge(&dc, &scheme, 2, 11, None).unwrap();
        let c = canonical_choice(&dc, &scheme);
        let v0 = holonomy(&d, &dc, &c).unwrap();
        let (d1, dc1) = crate::subdivide::subdivide(&d, &dc, 0, Some(8)).unwrap();
        let c1 = canonical_choice(&dc1, &d1.scheme);
        let v1 = holonomy(&d1, &dc1, &c1).unwrap();
        assert!(v0.agrees(&v1, 1e-9), "{v0:?} vs {v1:?}");
    }

    #[test]
    fn square_law_at_higher_rank() {
        for name in ["mobius", "annulus", "klein"] {
            let dc = cover(name);
            let scheme = full_scheme(&dc, 2, true);
            let d = generate_pure_gauge(&dc, &scheme, 2, 17, None).unwrap();
            let c = canonical_choice(&dc, &scheme);
            let v = holonomy(&d, &dc, &c).unwrap();
            let double = holonomy_double(&d, &dc).unwrap();
            assert!(v.squared().agrees(&double, 1e-7), "{name}: {v:?}² vs {double:?}");
        }
    }

    #[test]
    fn unvalidated_data_are_refused() {
        let dc = cover("torus");
        let scheme = full_scheme(&dc, 2, true);
        let mut d = crate::data::OrientifoldDatum::identity(&dc, &scheme, 1);
        let key = *d.face_b.keys().next().unwrap();
        d.face_b.insert(key, Phase::new(1, 5).unwrap());
        let c = canonical_choice(&dc, &scheme);
        assert!(matches!(
            holonomy(&d, &dc, &c).unwrap_err(),
            HolonomyError::InvalidDatum(..)
        ));
    }
}
