//! Local data on the double cover and everything that manipulates it:
//! storage, the R1–R13 validator, the gauge action, and the seeded
//! pure-gauge generator.
//!
//! Conventions (fixed here once; the validator, generator, and holonomy
//! engine all read them from this module):
//!
//! * `edgeA`, `chiV` are antisymmetric in their index pair (swapping inverts),
//!   `gV` is totally antisymmetric, `GV` inverts under swap; diagonal entries
//!   are identity *by convention* and never stored.
//! * Canonical storage keys use strictly increasing index tuples; accessors
//!   resolve every other arrangement.  A missing canonical entry is a hard
//!   error, never a silent identity.
//! * The incidence sign ε(v̂, ê) is −1 at the start slot of an edge lift and
//!   +1 at the end slot.
//! * Matrix-valued data (`Transport`) stay exact rational phases at rank 1
//!   and become dense unitaries from rank 2 on.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cohomology::{is_cocycle, TwistedCochain};
use crate::cover::{DoubleCover, IndexScheme};
use crate::group::OrientifoldGroup;
use crate::phase::{random_phase, random_unitary, Phase, Unitary};

#[derive(Debug, PartialEq, Eq, thiserror::Error)]
pub enum DatumError {
    #[error("missing {table} entry at {key}")]
    Missing { table: &'static str, key: String },
    #[error("rank must be at least 1")]
    BadRank,
    #[error("rank-1 module data must be exact phases, rank-n data matrices of size n")]
    RankMismatch,
    #[error("datum failed validation: {0}")]
    Invalid(String),
    #[error("twist must be a 2-cocycle")]
    TwistNotCocycle,
    #[error("twist is only supported for the two-element reflection group")]
    TwistGroup,
    #[error("gauge moduleR must be odd under the involution")]
    GaugeRhoNotOdd,
    #[error("gauge moduleR must multiply to 1 around each lifted boundary circle")]
    GaugeRhoCircle,
    #[error("edge {0} is not subdividable: both sides lie on one face")]
    SelfGluedEdge(usize),
    #[error("no such edge {0}")]
    NoSuchEdge(usize),
}

/// A parallel transport: exact phase at rank 1, dense unitary at rank ≥ 2.
/// Keeping rank 1 in the exact arm is what makes every rank-1 criterion a
/// zero-tolerance statement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Transport {
    Exact(Phase),
    Mat(Unitary),
}

impl Transport {
    pub fn identity(rank: usize) -> Transport {
        if rank == 1 {
            Transport::Exact(Phase::one())
        } else {
            Transport::Mat(Unitary::identity(rank))
        }
    }
    pub fn rank(&self) -> usize {
        match self {
            Transport::Exact(_) => 1,
            Transport::Mat(u) => u.dim(),
        }
    }
    pub fn mul(&self, other: &Transport) -> Transport {
        match (self, other) {
            (Transport::Exact(a), Transport::Exact(b)) => Transport::Exact(a.mul(b)),
            (Transport::Mat(a), Transport::Mat(b)) => Transport::Mat(a.mul(b)),
            _ => panic!("mixed transport ranks"),
        }
    }
    pub fn inv(&self) -> Transport {
        match self {
            Transport::Exact(a) => Transport::Exact(a.inv()),
            Transport::Mat(a) => Transport::Mat(a.dagger()),
        }
    }
    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Transport {
        match self {
            Transport::Exact(a) => Transport::Exact(a.inv()),
            Transport::Mat(a) => Transport::Mat(a.conj()),
        }
    }
    pub fn scale(&self, p: &Phase) -> Transport {
        match self {
            Transport::Exact(a) => Transport::Exact(a.mul(p)),
            Transport::Mat(a) => Transport::Mat(a.scale_by_phase(p)),
        }
    }
    /// Exact equality at rank 1, tolerance comparison at rank ≥ 2.
    pub fn agrees(&self, other: &Transport, tol: f64) -> bool {
        match (self, other) {
            (Transport::Exact(a), Transport::Exact(b)) => a == b,
            (Transport::Mat(a), Transport::Mat(b)) => a.approx_eq(b, tol),
            _ => false,
        }
    }
    pub fn trace(&self) -> num_complex::Complex64 {
        match self {
            Transport::Exact(a) => a.to_complex(),
            Transport::Mat(a) => a.trace(),
        }
    }
    pub fn as_exact(&self) -> Option<&Phase> {
        match self {
            Transport::Exact(p) => Some(p),
            Transport::Mat(_) => None,
        }
    }
}

/// One reported relation violation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub relation: String,
    pub location: String,
    pub detail: String,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
    fn push(&mut self, relation: &str, location: String, detail: String) {
        self.violations.push(Violation { relation: relation.to_string(), location, detail });
    }
}

/// The full set of local data for one surface: gerbe layer (faceB, edgeA,
/// gV), the reflection-structure layer (edgePi, chiV, fV), and the boundary
/// module layer (edgeT, GV, HV).
///
/// Keys are (lift id, index…) with strictly increasing index tuples for the
/// antisymmetric tables.
#[derive(Debug, Clone, PartialEq)]
pub struct OrientifoldDatum {
    pub rank: usize,
    pub scheme: IndexScheme,
    pub face_b: BTreeMap<(usize, usize), Phase>,
    pub edge_a: BTreeMap<(usize, usize, usize), Phase>,
    pub g_v: BTreeMap<(usize, usize, usize, usize), Phase>,
    pub edge_pi: BTreeMap<(usize, usize), Phase>,
    pub chi_v: BTreeMap<(usize, usize, usize), Phase>,
    pub f_v: BTreeMap<(usize, usize), Phase>,
    pub edge_t: BTreeMap<(usize, usize), Transport>,
    pub g_big: BTreeMap<(usize, usize, usize), Transport>,
    pub h_big: BTreeMap<(usize, usize), Transport>,
}

/// Sort a triple, returning the permutation sign.
fn sort3(i: usize, j: usize, l: usize) -> ([usize; 3], i64) {
    let mut arr = [(i, 0), (j, 1), (l, 2)];
    arr.sort_unstable_by_key(|&(x, _)| x);
    let perm = [arr[0].1, arr[1].1, arr[2].1];
    let sign = match perm {
        [0, 1, 2] | [1, 2, 0] | [2, 0, 1] => 1,
        _ => -1,
    };
    ([arr[0].0, arr[1].0, arr[2].0], sign)
}

impl OrientifoldDatum {
    // ---- accessors with convention resolution ----

    pub fn face_b(&self, face_lift: usize, i: usize) -> Result<Phase, DatumError> {
        self.face_b
            .get(&(face_lift, i))
            .cloned()
            .ok_or(DatumError::Missing { table: "faceB", key: format!("({face_lift},{i})") })
    }

    pub fn edge_a(&self, edge_lift: usize, i: usize, j: usize) -> Result<Phase, DatumError> {
        if i == j {
            return Ok(Phase::one());
        }
        let (a, b, invert) = if i < j { (i, j, false) } else { (j, i, true) };
        let v = self
            .edge_a
            .get(&(edge_lift, a, b))
            .ok_or(DatumError::Missing { table: "edgeA", key: format!("({edge_lift},{a},{b})") })?;
        Ok(if invert { v.inv() } else { v.clone() })
    }

    pub fn g_v(&self, vertex_lift: usize, i: usize, j: usize, l: usize) -> Result<Phase, DatumError> {
        if i == j || j == l || i == l {
            return Ok(Phase::one());
        }
        let ([a, b, c], sign) = sort3(i, j, l);
        let v = self.g_v.get(&(vertex_lift, a, b, c)).ok_or(DatumError::Missing {
            table: "gV",
            key: format!("({vertex_lift},{a},{b},{c})"),
        })?;
        Ok(v.pow_sign(sign))
    }

    pub fn edge_pi(&self, edge_lift: usize, i: usize) -> Result<Phase, DatumError> {
        self.edge_pi
            .get(&(edge_lift, i))
            .cloned()
            .ok_or(DatumError::Missing { table: "edgePi", key: format!("({edge_lift},{i})") })
    }

    pub fn chi_v(&self, vertex_lift: usize, i: usize, j: usize) -> Result<Phase, DatumError> {
        if i == j {
            return Ok(Phase::one());
        }
        let (a, b, invert) = if i < j { (i, j, false) } else { (j, i, true) };
        let v = self
            .chi_v
            .get(&(vertex_lift, a, b))
            .ok_or(DatumError::Missing { table: "chiV", key: format!("({vertex_lift},{a},{b})") })?;
        Ok(if invert { v.inv() } else { v.clone() })
    }

    pub fn f_v(&self, vertex_lift: usize, i: usize) -> Result<Phase, DatumError> {
        self.f_v
            .get(&(vertex_lift, i))
            .cloned()
            .ok_or(DatumError::Missing { table: "fV", key: format!("({vertex_lift},{i})") })
    }

    pub fn edge_t(&self, edge_lift: usize, i: usize) -> Result<Transport, DatumError> {
        self.edge_t
            .get(&(edge_lift, i))
            .cloned()
            .ok_or(DatumError::Missing { table: "edgeT", key: format!("({edge_lift},{i})") })
    }

    pub fn g_big(&self, vertex_lift: usize, i: usize, j: usize) -> Result<Transport, DatumError> {
        if i == j {
            return Ok(Transport::identity(self.rank));
        }
        let (a, b, invert) = if i < j { (i, j, false) } else { (j, i, true) };
        let v = self
            .g_big
            .get(&(vertex_lift, a, b))
            .ok_or(DatumError::Missing { table: "GV", key: format!("({vertex_lift},{a},{b})") })?;
        Ok(if invert { v.inv() } else { v.clone() })
    }

    pub fn h_big(&self, vertex_lift: usize, i: usize) -> Result<Transport, DatumError> {
        self.h_big
            .get(&(vertex_lift, i))
            .cloned()
            .ok_or(DatumError::Missing { table: "HV", key: format!("({vertex_lift},{i})") })
    }

    // ---- construction ----

    /// Every stored entry the identity/one, over the full admissible domains.
    pub fn identity(dc: &DoubleCover, scheme: &IndexScheme, rank: usize) -> OrientifoldDatum {
        let mut d = OrientifoldDatum {
            rank,
            scheme: scheme.clone(),
            face_b: BTreeMap::new(),
            edge_a: BTreeMap::new(),
            g_v: BTreeMap::new(),
            edge_pi: BTreeMap::new(),
            chi_v: BTreeMap::new(),
            f_v: BTreeMap::new(),
            edge_t: BTreeMap::new(),
            g_big: BTreeMap::new(),
            h_big: BTreeMap::new(),
        };
        for fl in 0..dc.num_face_lifts() {
            for &i in scheme.adm_face(fl) {
                d.face_b.insert((fl, i), Phase::one());
            }
        }
        for el in 0..dc.num_edge_lifts() {
            let adm = scheme.adm_edge(el);
            for (ai, &i) in adm.iter().enumerate() {
                d.edge_pi.insert((el, i), Phase::one());
                for &j in &adm[ai + 1..] {
                    d.edge_a.insert((el, i, j), Phase::one());
                }
            }
        }
        for vl in 0..dc.num_vertex_lifts() {
            let adm = scheme.adm_vertex(vl);
            for (ai, &i) in adm.iter().enumerate() {
                d.f_v.insert((vl, i), Phase::one());
                for (bj, &j) in adm.iter().enumerate().skip(ai + 1) {
                    d.chi_v.insert((vl, i, j), Phase::one());
                    for &l in &adm[bj + 1..] {
                        d.g_v.insert((vl, i, j, l), Phase::one());
                    }
                }
            }
        }
        for el in boundary_edge_lifts(dc) {
            for &i in scheme.adm_edge(el) {
                d.edge_t.insert((el, i), Transport::identity(rank));
            }
        }
        for vl in boundary_vertex_lifts(dc) {
            let adm = scheme.adm_vertex(vl);
            for (ai, &i) in adm.iter().enumerate() {
                d.h_big.insert((vl, i), Transport::identity(rank));
                for &j in &adm[ai + 1..] {
                    d.g_big.insert((vl, i, j), Transport::identity(rank));
                }
            }
        }
        d
    }
}

/// Edge lifts of boundary edges.
pub fn boundary_edge_lifts(dc: &DoubleCover) -> Vec<usize> {
    let mut out = Vec::new();
    for e in dc.surface().boundary_edges() {
        out.push(2 * e);
        out.push(2 * e + 1);
    }
    out
}

/// Vertex lifts incident to boundary edge lifts.
pub fn boundary_vertex_lifts(dc: &DoubleCover) -> Vec<usize> {
    let mut set = std::collections::BTreeSet::new();
    for el in boundary_edge_lifts(dc) {
        for vl in dc.edge_lift_ends(el) {
            set.insert(vl);
        }
    }
    set.into_iter().collect()
}

// ---- validation ------------------------------------------------------------

/// Oriented product of per-side phase factors around a face lift:
/// `∏_sides factor(edge lift, side direction)^{±1}`.
fn side_product<F>(dc: &DoubleCover, face_lift: usize, mut factor: F) -> Result<Phase, DatumError>
where
    F: FnMut(usize) -> Result<Phase, DatumError>,
{
    let mut acc = Phase::one();
    for &(el, fwd) in dc.face_lift_sides(face_lift) {
        let f = factor(el)?;
        acc = acc.mul(&if fwd { f } else { f.inv() });
    }
    Ok(acc)
}

impl OrientifoldDatum {
    /// Full validation: scheme, shape/completeness, then R1–R13.  Phase
    /// relations are exact; transport relations are exact at rank 1 and use
    /// `tol` at rank ≥ 2.
    pub fn validate(&self, dc: &DoubleCover, tol: f64) -> ValidationReport {
        let mut report = ValidationReport::default();
        if self.rank == 0 {
            report.push("shape", "rank".into(), "rank must be >= 1".into());
            return report;
        }
        if let Err(e) = self.scheme.validate(dc) {
            report.push("scheme", "index scheme".into(), e.to_string());
            return report;
        }
        self.completeness(dc, &mut report);
        if !report.is_clean() {
            return report;
        }
        self.check_gerbe_layer(dc, &mut report);
        self.check_jandl_layer(dc, &mut report);
        self.check_module_layer(dc, tol, &mut report);
        report
    }

    fn completeness(&self, dc: &DoubleCover, report: &mut ValidationReport) {
        use std::collections::BTreeSet;
        let scheme = &self.scheme;
        let reference = OrientifoldDatum::identity(dc, scheme, self.rank);
        let check_keys = |name: &str,
                          have: BTreeSet<String>,
                          want: BTreeSet<String>,
                          report: &mut ValidationReport| {
            for k in want.difference(&have) {
                report.push("complete", format!("{name} {k}"), "missing entry".into());
            }
            for k in have.difference(&want) {
                report.push("complete", format!("{name} {k}"), "entry outside domain".into());
            }
        };
        macro_rules! keys {
            ($map:expr) => {
                $map.keys().map(|k| format!("{k:?}")).collect::<BTreeSet<_>>()
            };
        }
        check_keys("faceB", keys!(self.face_b), keys!(reference.face_b), report);
        check_keys("edgeA", keys!(self.edge_a), keys!(reference.edge_a), report);
        check_keys("gV", keys!(self.g_v), keys!(reference.g_v), report);
        check_keys("edgePi", keys!(self.edge_pi), keys!(reference.edge_pi), report);
        check_keys("chiV", keys!(self.chi_v), keys!(reference.chi_v), report);
        check_keys("fV", keys!(self.f_v), keys!(reference.f_v), report);
        check_keys("edgeT", keys!(self.edge_t), keys!(reference.edge_t), report);
        check_keys("GV", keys!(self.g_big), keys!(reference.g_big), report);
        check_keys("HV", keys!(self.h_big), keys!(reference.h_big), report);
        // transports must match the rank arm
        for (k, t) in self.edge_t.iter().chain(self.h_big.iter()) {
            if t.rank() != self.rank {
                report.push("shape", format!("transport {k:?}"), "rank mismatch".into());
            }
        }
        for (k, t) in self.g_big.iter() {
            if t.rank() != self.rank {
                report.push("shape", format!("transport {k:?}"), "rank mismatch".into());
            }
        }
    }

    fn check_gerbe_layer(&self, dc: &DoubleCover, report: &mut ValidationReport) {
        let scheme = &self.scheme;
        // R1: oriented edgeA product around a face lift = faceB(j)/faceB(i)
        for fl in 0..dc.num_face_lifts() {
            let adm = scheme.adm_face(fl);
            for (ai, &i) in adm.iter().enumerate() {
                for &j in &adm[ai + 1..] {
                    let lhs = match side_product(dc, fl, |el| self.edge_a(el, i, j)) {
                        Ok(p) => p,
                        Err(e) => {
                            report.push("R1", format!("face lift {fl}"), e.to_string());
                            continue;
                        }
                    };
                    let rhs = match (self.face_b(fl, j), self.face_b(fl, i)) {
                        (Ok(bj), Ok(bi)) => bj.mul(&bi.inv()),
                        _ => continue,
                    };
                    if lhs != rhs {
                        report.push(
                            "R1",
                            format!("face lift {fl}, indices ({i},{j})"),
                            format!("product {lhs} != faceB ratio {rhs}"),
                        );
                    }
                }
            }
        }
        // R2: δ(edgeA) across an edge lift = gV(start)/gV(end)
        for el in 0..dc.num_edge_lifts() {
            let adm = scheme.adm_edge(el);
            let [start, end] = dc.edge_lift_ends(el);
            for (ai, &i) in adm.iter().enumerate() {
                for (bj, &j) in adm.iter().enumerate().skip(ai + 1) {
                    for &l in &adm[bj + 1..] {
                        let r = (|| -> Result<(Phase, Phase), DatumError> {
                            let lhs = self
                                .edge_a(el, i, j)?
                                .mul(&self.edge_a(el, i, l)?.inv())
                                .mul(&self.edge_a(el, j, l)?);
                            let rhs =
                                self.g_v(start, i, j, l)?.mul(&self.g_v(end, i, j, l)?.inv());
                            Ok((lhs, rhs))
                        })();
                        match r {
                            Ok((lhs, rhs)) if lhs != rhs => report.push(
                                "R2",
                                format!("edge lift {el}, indices ({i},{j},{l})"),
                                format!("{lhs} != {rhs}"),
                            ),
                            Err(e) => report.push("R2", format!("edge lift {el}"), e.to_string()),
                            _ => {}
                        }
                    }
                }
            }
        }
        // R3: gV is a cocycle at each vertex lift
        for vl in 0..dc.num_vertex_lifts() {
            let adm = scheme.adm_vertex(vl);
            let n = adm.len();
            for a in 0..n {
                for b in a + 1..n {
                    for c in b + 1..n {
                        for d4 in c + 1..n {
                            let (i, j, l, m) = (adm[a], adm[b], adm[c], adm[d4]);
                            let r = (|| -> Result<Phase, DatumError> {
                                Ok(self
                                    .g_v(vl, j, l, m)?
                                    .mul(&self.g_v(vl, i, l, m)?.inv())
                                    .mul(&self.g_v(vl, i, j, m)?)
                                    .mul(&self.g_v(vl, i, j, l)?.inv()))
                            })();
                            match r {
                                Ok(p) if !p.is_one() => report.push(
                                    "R3",
                                    format!("vertex lift {vl}, indices ({i},{j},{l},{m})"),
                                    format!("cocycle defect {p}"),
                                ),
                                Err(e) => {
                                    report.push("R3", format!("vertex lift {vl}"), e.to_string())
                                }
                                _ => {}
                            }
                        }
                    }
                }
            }
        }
    }

    fn check_jandl_layer(&self, dc: &DoubleCover, report: &mut ValidationReport) {
        let scheme = &self.scheme;
        let k = &scheme.k;
        // R4: oriented edgePi product around a face lift = faceB(σt̂,ki)/faceB(t̂,i)
        for fl in 0..dc.num_face_lifts() {
            for &i in scheme.adm_face(fl) {
                let r = (|| -> Result<(Phase, Phase), DatumError> {
                    let lhs = side_product(dc, fl, |el| self.edge_pi(el, i))?;
                    let rhs = self.face_b(dc.sigma(fl), k[i])?.mul(&self.face_b(fl, i)?.inv());
                    Ok((lhs, rhs))
                })();
                match r {
                    Ok((lhs, rhs)) if lhs != rhs => report.push(
                        "R4",
                        format!("face lift {fl}, index {i}"),
                        format!("{lhs} != {rhs}"),
                    ),
                    Err(e) => report.push("R4", format!("face lift {fl}"), e.to_string()),
                    _ => {}
                }
            }
        }
        // R5 / R7 on edge lifts
        for el in 0..dc.num_edge_lifts() {
            let adm = scheme.adm_edge(el);
            let [start, end] = dc.edge_lift_ends(el);
            let sel = dc.sigma(el);
            for (ai, &i) in adm.iter().enumerate() {
                // R7: edgePi(σê,ki)⁻¹ · edgePi(ê,i) = fV(start,i)·fV(end,i)⁻¹
                let r = (|| -> Result<(Phase, Phase), DatumError> {
                    let lhs = self.edge_pi(sel, k[i])?.inv().mul(&self.edge_pi(el, i)?);
                    let rhs = self.f_v(start, i)?.mul(&self.f_v(end, i)?.inv());
                    Ok((lhs, rhs))
                })();
                match r {
                    Ok((lhs, rhs)) if lhs != rhs => report.push(
                        "R7",
                        format!("edge lift {el}, index {i}"),
                        format!("{lhs} != {rhs}"),
                    ),
                    Err(e) => report.push("R7", format!("edge lift {el}"), e.to_string()),
                    _ => {}
                }
                for &j in &adm[ai + 1..] {
                    // R5
                    let r = (|| -> Result<(Phase, Phase), DatumError> {
                        let lhs = self
                            .edge_a(sel, k[i], k[j])?
                            .inv()
                            .mul(&self.edge_a(el, i, j)?.inv());
                        let rhs = self
                            .edge_pi(el, j)?
                            .mul(&self.edge_pi(el, i)?.inv())
                            .mul(&self.chi_v(end, i, j)?)
                            .mul(&self.chi_v(start, i, j)?.inv());
                        Ok((lhs, rhs))
                    })();
                    match r {
                        Ok((lhs, rhs)) if lhs != rhs => report.push(
                            "R5",
                            format!("edge lift {el}, indices ({i},{j})"),
                            format!("{lhs} != {rhs}"),
                        ),
                        Err(e) => report.push("R5", format!("edge lift {el}"), e.to_string()),
                        _ => {}
                    }
                }
            }
        }
        // R6 / R8 / R9 on vertex lifts
        for vl in 0..dc.num_vertex_lifts() {
            let adm = scheme.adm_vertex(vl);
            let svl = dc.sigma(vl);
            for (ai, &i) in adm.iter().enumerate() {
                // R9: fV(σv̂,ki) = fV(v̂,i)⁻¹
                let r = (|| -> Result<(Phase, Phase), DatumError> {
                    Ok((self.f_v(svl, k[i])?, self.f_v(vl, i)?.inv()))
                })();
                match r {
                    Ok((lhs, rhs)) if lhs != rhs => report.push(
                        "R9",
                        format!("vertex lift {vl}, index {i}"),
                        format!("{lhs} != {rhs}"),
                    ),
                    Err(e) => report.push("R9", format!("vertex lift {vl}"), e.to_string()),
                    _ => {}
                }
                for (bj, &j) in adm.iter().enumerate().skip(ai + 1) {
                    // R8: chiV(σv̂,ki,kj)⁻¹ · chiV(v̂,i,j) = fV(i)⁻¹·fV(j)
                    let r = (|| -> Result<(Phase, Phase), DatumError> {
                        let lhs = self.chi_v(svl, k[i], k[j])?.inv().mul(&self.chi_v(vl, i, j)?);
                        let rhs = self.f_v(vl, i)?.inv().mul(&self.f_v(vl, j)?);
                        Ok((lhs, rhs))
                    })();
                    match r {
                        Ok((lhs, rhs)) if lhs != rhs => report.push(
                            "R8",
                            format!("vertex lift {vl}, indices ({i},{j})"),
                            format!("{lhs} != {rhs}"),
                        ),
                        Err(e) => report.push("R8", format!("vertex lift {vl}"), e.to_string()),
                        _ => {}
                    }
                    for &l in &adm[bj + 1..] {
                        // R6: gV(σv̂,k·)⁻¹ · gV(v̂,·)⁻¹ = χ_ij⁻¹ χ_il χ_jl⁻¹
                        let r = (|| -> Result<(Phase, Phase), DatumError> {
                            let lhs = self
                                .g_v(svl, k[i], k[j], k[l])?
                                .inv()
                                .mul(&self.g_v(vl, i, j, l)?.inv());
                            let rhs = self
                                .chi_v(vl, i, j)?
                                .inv()
                                .mul(&self.chi_v(vl, i, l)?)
                                .mul(&self.chi_v(vl, j, l)?.inv());
                            Ok((lhs, rhs))
                        })();
                        match r {
                            Ok((lhs, rhs)) if lhs != rhs => report.push(
                                "R6",
                                format!("vertex lift {vl}, indices ({i},{j},{l})"),
                                format!("{lhs} != {rhs}"),
                            ),
                            Err(e) => {
                                report.push("R6", format!("vertex lift {vl}"), e.to_string())
                            }
                            _ => {}
                        }
                    }
                }
            }
        }
    }

    fn check_module_layer(&self, dc: &DoubleCover, tol: f64, report: &mut ValidationReport) {
        let scheme = &self.scheme;
        let k = &scheme.k;
        for el in boundary_edge_lifts(dc) {
            let adm = scheme.adm_edge(el);
            let [start, end] = dc.edge_lift_ends(el);
            let sel = dc.sigma(el);
            for (ai, &i) in adm.iter().enumerate() {
                // R10: conj(T(σê,ki)) = H(end,i)⁻¹ T(ê,i) H(start,i) Π(ê,i)⁻¹
                let r = (|| -> Result<(Transport, Transport), DatumError> {
                    let lhs = self.edge_t(sel, k[i])?.conj();
                    let rhs = self
                        .h_big(end, i)?
                        .inv()
                        .mul(&self.edge_t(el, i)?)
                        .mul(&self.h_big(start, i)?)
                        .scale(&self.edge_pi(el, i)?.inv());
                    Ok((lhs, rhs))
                })();
                match r {
                    Ok((lhs, rhs)) if !lhs.agrees(&rhs, tol) => report.push(
                        "R10",
                        format!("edge lift {el}, index {i}"),
                        "transport mismatch".into(),
                    ),
                    Err(e) => report.push("R10", format!("edge lift {el}"), e.to_string()),
                    _ => {}
                }
                for &j in &adm[ai + 1..] {
                    // R13 (edge): T(ê,j) = G(end,i,j)⁻¹ T(ê,i) G(start,i,j) A(ê,i,j)⁻¹
                    let r = (|| -> Result<(Transport, Transport), DatumError> {
                        let lhs = self.edge_t(el, j)?;
                        let rhs = self
                            .g_big(end, i, j)?
                            .inv()
                            .mul(&self.edge_t(el, i)?)
                            .mul(&self.g_big(start, i, j)?)
                            .scale(&self.edge_a(el, i, j)?.inv());
                        Ok((lhs, rhs))
                    })();
                    match r {
                        Ok((lhs, rhs)) if !lhs.agrees(&rhs, tol) => report.push(
                            "R13",
                            format!("edge lift {el}, indices ({i},{j})"),
                            "edge transport cocycle mismatch".into(),
                        ),
                        Err(e) => report.push("R13", format!("edge lift {el}"), e.to_string()),
                        _ => {}
                    }
                }
            }
        }
        for vl in boundary_vertex_lifts(dc) {
            let adm = scheme.adm_vertex(vl);
            let svl = dc.sigma(vl);
            for (ai, &i) in adm.iter().enumerate() {
                // R12: H(v̂,i)·conj(H(σv̂,ki)) = fV(v̂,i)·1
                let r = (|| -> Result<(Transport, Transport), DatumError> {
                    let lhs = self.h_big(vl, i)?.mul(&self.h_big(svl, k[i])?.conj());
                    let rhs = Transport::identity(self.rank).scale(&self.f_v(vl, i)?);
                    Ok((lhs, rhs))
                })();
                match r {
                    Ok((lhs, rhs)) if !lhs.agrees(&rhs, tol) => report.push(
                        "R12",
                        format!("vertex lift {vl}, index {i}"),
                        "reflection square mismatch".into(),
                    ),
                    Err(e) => report.push("R12", format!("vertex lift {vl}"), e.to_string()),
                    _ => {}
                }
                for (bj, &j) in adm.iter().enumerate().skip(ai + 1) {
                    // R11: conj(G(σv̂,ki,kj)) = H(i)⁻¹ G(i,j) H(j) χ(i,j)⁻¹
                    let r = (|| -> Result<(Transport, Transport), DatumError> {
                        let lhs = self.g_big(svl, k[i], k[j])?.conj();
                        let rhs = self
                            .h_big(vl, i)?
                            .inv()
                            .mul(&self.g_big(vl, i, j)?)
                            .mul(&self.h_big(vl, j)?)
                            .scale(&self.chi_v(vl, i, j)?.inv());
                        Ok((lhs, rhs))
                    })();
                    match r {
                        Ok((lhs, rhs)) if !lhs.agrees(&rhs, tol) => report.push(
                            "R11",
                            format!("vertex lift {vl}, indices ({i},{j})"),
                            "equivariance transport mismatch".into(),
                        ),
                        Err(e) => report.push("R11", format!("vertex lift {vl}"), e.to_string()),
                        _ => {}
                    }
                    for &l in &adm[bj + 1..] {
                        // R13 (vertex): G(i,j)·G(j,l) = gV(i,j,l)·G(i,l)
                        let r = (|| -> Result<(Transport, Transport), DatumError> {
                            let lhs = self.g_big(vl, i, j)?.mul(&self.g_big(vl, j, l)?);
                            let rhs =
                                self.g_big(vl, i, l)?.scale(&self.g_v(vl, i, j, l)?);
                            Ok((lhs, rhs))
                        })();
                        match r {
                            Ok((lhs, rhs)) if !lhs.agrees(&rhs, tol) => report.push(
                                "R13",
                                format!("vertex lift {vl}, indices ({i},{j},{l})"),
                                "vertex transport cocycle mismatch".into(),
                            ),
                            Err(e) => {
                                report.push("R13", format!("vertex lift {vl}"), e.to_string())
                            }
                            _ => {}
                        }
                    }
                }
            }
        }
    }
}

// ---- gauge transformations -------------------------------------------------

/// A gauge transformation.  `u_v` is antisymmetric in its index pair
/// (canonical storage i < j); `module_r` must be odd under σ and multiply to
/// 1 around every lifted boundary circle — those two constraints are exactly
/// what keeps R10 and the boundary holonomy intact.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeDatum {
    pub edge_w: BTreeMap<(usize, usize), Phase>,
    pub u_v: BTreeMap<(usize, usize, usize), Phase>,
    pub h_v: BTreeMap<(usize, usize), Phase>,
    pub module_u: BTreeMap<(usize, usize), Transport>,
    pub module_r: BTreeMap<usize, Phase>,
}

impl GaugeDatum {
    pub fn edge_w(&self, edge_lift: usize, i: usize) -> Result<Phase, DatumError> {
        self.edge_w
            .get(&(edge_lift, i))
            .cloned()
            .ok_or(DatumError::Missing { table: "edgeW", key: format!("({edge_lift},{i})") })
    }
    pub fn u_v(&self, vertex_lift: usize, i: usize, j: usize) -> Result<Phase, DatumError> {
        if i == j {
            return Ok(Phase::one());
        }
        let (a, b, invert) = if i < j { (i, j, false) } else { (j, i, true) };
        let v = self
            .u_v
            .get(&(vertex_lift, a, b))
            .ok_or(DatumError::Missing { table: "uV", key: format!("({vertex_lift},{a},{b})") })?;
        Ok(if invert { v.inv() } else { v.clone() })
    }
    pub fn h_v(&self, vertex_lift: usize, i: usize) -> Result<Phase, DatumError> {
        self.h_v
            .get(&(vertex_lift, i))
            .cloned()
            .ok_or(DatumError::Missing { table: "hV", key: format!("({vertex_lift},{i})") })
    }
    pub fn module_u(&self, vertex_lift: usize, i: usize) -> Result<Transport, DatumError> {
        self.module_u
            .get(&(vertex_lift, i))
            .cloned()
            .ok_or(DatumError::Missing { table: "moduleU", key: format!("({vertex_lift},{i})") })
    }
    pub fn module_r(&self, edge_lift: usize) -> Result<Phase, DatumError> {
        self.module_r
            .get(&edge_lift)
            .cloned()
            .ok_or(DatumError::Missing { table: "moduleR", key: format!("({edge_lift})") })
    }

    /// Identity gauge over the full domains of a scheme.
    pub fn identity(dc: &DoubleCover, scheme: &IndexScheme, rank: usize) -> GaugeDatum {
        let mut g = GaugeDatum {
            edge_w: BTreeMap::new(),
            u_v: BTreeMap::new(),
            h_v: BTreeMap::new(),
            module_u: BTreeMap::new(),
            module_r: BTreeMap::new(),
        };
        for el in 0..dc.num_edge_lifts() {
            for &i in scheme.adm_edge(el) {
                g.edge_w.insert((el, i), Phase::one());
            }
        }
        for vl in 0..dc.num_vertex_lifts() {
            let adm = scheme.adm_vertex(vl);
            for (ai, &i) in adm.iter().enumerate() {
                g.h_v.insert((vl, i), Phase::one());
                for &j in &adm[ai + 1..] {
                    g.u_v.insert((vl, i, j), Phase::one());
                }
            }
        }
        for vl in boundary_vertex_lifts(dc) {
            for &i in scheme.adm_vertex(vl) {
                g.module_u.insert((vl, i), Transport::identity(rank));
            }
        }
        for el in boundary_edge_lifts(dc) {
            g.module_r.insert(el, Phase::one());
        }
        g
    }

    /// Seeded random gauge.  `module_r` is built as ρ(end)·ρ(start)⁻¹ from a
    /// σ-odd random vertex phase ρ, which yields both required invariants.
    pub fn random(dc: &DoubleCover, scheme: &IndexScheme, rank: usize, seed: u64) -> GaugeDatum {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = GaugeDatum::identity(dc, scheme, rank);
        for v in g.edge_w.values_mut() {
            *v = random_phase(&mut rng);
        }
        for v in g.u_v.values_mut() {
            *v = random_phase(&mut rng);
        }
        for v in g.h_v.values_mut() {
            *v = random_phase(&mut rng);
        }
        for v in g.module_u.values_mut() {
            *v = if rank == 1 {
                Transport::Exact(random_phase(&mut rng))
            } else {
                Transport::Mat(random_unitary(&mut rng, rank))
            };
        }
        let mut rho: BTreeMap<usize, Phase> = BTreeMap::new();
        for vl in boundary_vertex_lifts(dc) {
            if vl % 2 == 0 {
                let p = random_phase(&mut rng);
                rho.insert(dc.sigma(vl), p.inv());
                rho.insert(vl, p);
            } else if !rho.contains_key(&vl) {
                let p = random_phase(&mut rng);
                rho.insert(dc.sigma(vl), p.inv());
                rho.insert(vl, p);
            }
        }
        for (&el, v) in g.module_r.iter_mut() {
            let [start, end] = dc.edge_lift_ends(el);
            *v = rho[&end].mul(&rho[&start].inv());
        }
        g
    }

    /// Check the two `module_r` invariants.
    pub fn validate(&self, dc: &DoubleCover) -> Result<(), DatumError> {
        for (&el, v) in &self.module_r {
            let partner = self.module_r(dc.sigma(el))?;
            if partner != v.inv() {
                return Err(DatumError::GaugeRhoNotOdd);
            }
        }
        for circle in 0..dc.boundary_circles().len() {
            for parity in 0..2u8 {
                let mut acc = Phase::one();
                for &(el, fwd) in dc.lifted_circle(circle, parity) {
                    let r = self.module_r(el)?;
                    acc = acc.mul(&if fwd { r } else { r.inv() });
                }
                if !acc.is_one() {
                    return Err(DatumError::GaugeRhoCircle);
                }
            }
        }
        Ok(())
    }

    /// Pointwise composition: applying `self` then `other` equals applying
    /// the composite (transport parts compose as U₁·U₂).
    pub fn compose(&self, other: &GaugeDatum) -> GaugeDatum {
        let mut g = self.clone();
        for (k, v) in g.edge_w.iter_mut() {
            *v = v.mul(&other.edge_w[k]);
        }
        for (k, v) in g.u_v.iter_mut() {
            *v = v.mul(&other.u_v[k]);
        }
        for (k, v) in g.h_v.iter_mut() {
            *v = v.mul(&other.h_v[k]);
        }
        for (k, v) in g.module_u.iter_mut() {
            *v = v.mul(&other.module_u[k]);
        }
        for (k, v) in g.module_r.iter_mut() {
            *v = v.mul(&other.module_r[k]);
        }
        g
    }
}

impl OrientifoldDatum {
    /// The gauge action on every layer.  Gauge-transformed data satisfy
    /// exactly the same relations (exactly at rank 1) and have the same
    /// holonomy.
    pub fn apply_gauge(&self, dc: &DoubleCover, g: &GaugeDatum) -> Result<OrientifoldDatum, DatumError> {
        g.validate(dc)?;
        let k = &self.scheme.k;
        let mut out = self.clone();
        for ((fl, i), v) in out.face_b.iter_mut() {
            let w = side_product(dc, *fl, |el| g.edge_w(el, *i))?;
            *v = v.mul(&w);
        }
        for ((el, i, j), v) in out.edge_a.iter_mut() {
            let [start, end] = dc.edge_lift_ends(*el);
            *v = v
                .mul(&g.u_v(end, *i, *j)?)
                .mul(&g.u_v(start, *i, *j)?.inv())
                .mul(&g.edge_w(*el, *j)?)
                .mul(&g.edge_w(*el, *i)?.inv());
        }
        for ((vl, i, j, l), v) in out.g_v.iter_mut() {
            *v = v
                .mul(&g.u_v(*vl, *j, *l)?.inv())
                .mul(&g.u_v(*vl, *i, *l)?)
                .mul(&g.u_v(*vl, *i, *j)?.inv());
        }
        for ((el, i), v) in out.edge_pi.iter_mut() {
            let [start, end] = dc.edge_lift_ends(*el);
            *v = v
                .mul(&g.edge_w(dc.sigma(*el), k[*i])?.inv())
                .mul(&g.edge_w(*el, *i)?.inv())
                .mul(&g.h_v(end, *i)?)
                .mul(&g.h_v(start, *i)?.inv());
        }
        for ((vl, i, j), v) in out.chi_v.iter_mut() {
            *v = v
                .mul(&g.u_v(dc.sigma(*vl), k[*i], k[*j])?.inv())
                .mul(&g.u_v(*vl, *i, *j)?.inv())
                .mul(&g.h_v(*vl, *i)?)
                .mul(&g.h_v(*vl, *j)?.inv());
        }
        for ((vl, i), v) in out.f_v.iter_mut() {
            *v = v.mul(&g.h_v(dc.sigma(*vl), k[*i])?).mul(&g.h_v(*vl, *i)?.inv());
        }
        for ((el, i), t) in out.edge_t.iter_mut() {
            let [start, end] = dc.edge_lift_ends(*el);
            *t = g
                .module_u(end, *i)?
                .inv()
                .mul(t)
                .mul(&g.module_u(start, *i)?)
                .scale(&g.edge_w(*el, *i)?.inv())
                .scale(&g.module_r(*el)?.inv());
        }
        for ((vl, i, j), t) in out.g_big.iter_mut() {
            *t = g
                .module_u(*vl, *i)?
                .inv()
                .mul(t)
                .mul(&g.module_u(*vl, *j)?)
                .scale(&g.u_v(*vl, *i, *j)?.inv());
        }
        for ((vl, i), t) in out.h_big.iter_mut() {
            *t = g
                .module_u(*vl, *i)?
                .inv()
                .mul(t)
                .mul(&g.module_u(dc.sigma(*vl), k[*i])?.conj())
                .scale(&g.h_v(*vl, *i)?.inv());
        }
        Ok(out)
    }

    /// Twist the reflection structure by the constant `c = a(k,k)` of a flat
    /// 2-cocycle class: every fV value is multiplied by c, and HV values on
    /// the parity-1 lifted boundary circles are rescaled by c to keep
    /// R10–R12.  The cocycle condition for the two-element reflection group
    /// is exactly c² = 1.
    pub fn twist(&self, dc: &DoubleCover, c: &Phase) -> Result<OrientifoldDatum, DatumError> {
        if !c.mul(c).is_one() {
            return Err(DatumError::TwistNotCocycle);
        }
        let mut out = self.clone();
        for v in out.f_v.values_mut() {
            *v = v.mul(c);
        }
        let parity = boundary_vertex_circle_parity(dc);
        for ((vl, _), t) in out.h_big.iter_mut() {
            if parity.get(vl) == Some(&1) {
                *t = t.scale(c);
            }
        }
        Ok(out)
    }

    /// The datum obtained by relabelling every cell by σ and every index by
    /// k.  Face values are inverted along the way because σ reverses the
    /// orientation of every face lift; edge lifts keep their direction (σ
    /// preserves start/end slots) and vertex values relabel untouched.  The
    /// image always has the same validate status; for a clean datum its fV
    /// is the pointwise inverse of the original (R9).
    pub fn sigma_image(&self, dc: &DoubleCover) -> Result<OrientifoldDatum, DatumError> {
        let k = &self.scheme.k;
        let mut out = OrientifoldDatum::identity(dc, &self.scheme, self.rank);
        for (fl, i) in out.face_b.keys().cloned().collect::<Vec<_>>() {
            let v = self.face_b(dc.sigma(fl), k[i])?;
            out.face_b.insert((fl, i), v.inv());
        }
        for (el, i, j) in out.edge_a.keys().cloned().collect::<Vec<_>>() {
            let v = self.edge_a(dc.sigma(el), k[i], k[j])?;
            out.edge_a.insert((el, i, j), v);
        }
        for (vl, i, j, l) in out.g_v.keys().cloned().collect::<Vec<_>>() {
            let v = self.g_v(dc.sigma(vl), k[i], k[j], k[l])?;
            out.g_v.insert((vl, i, j, l), v);
        }
        for (el, i) in out.edge_pi.keys().cloned().collect::<Vec<_>>() {
            let v = self.edge_pi(dc.sigma(el), k[i])?;
            out.edge_pi.insert((el, i), v);
        }
        for (vl, i, j) in out.chi_v.keys().cloned().collect::<Vec<_>>() {
            let v = self.chi_v(dc.sigma(vl), k[i], k[j])?;
            out.chi_v.insert((vl, i, j), v);
        }
        for (vl, i) in out.f_v.keys().cloned().collect::<Vec<_>>() {
            let v = self.f_v(dc.sigma(vl), k[i])?;
            out.f_v.insert((vl, i), v);
        }
        for (el, i) in out.edge_t.keys().cloned().collect::<Vec<_>>() {
            let v = self.edge_t(dc.sigma(el), k[i])?;
            out.edge_t.insert((el, i), v);
        }
        for (vl, i, j) in out.g_big.keys().cloned().collect::<Vec<_>>() {
            let v = self.g_big(dc.sigma(vl), k[i], k[j])?;
            out.g_big.insert((vl, i, j), v);
        }
        for (vl, i) in out.h_big.keys().cloned().collect::<Vec<_>>() {
            let v = self.h_big(dc.sigma(vl), k[i])?;
            out.h_big.insert((vl, i), v);
        }
        Ok(out)
    }
}

/// Parity of the lifted boundary circle through each boundary vertex lift.
pub fn boundary_vertex_circle_parity(dc: &DoubleCover) -> BTreeMap<usize, u8> {
    let mut out = BTreeMap::new();
    for el in boundary_edge_lifts(dc) {
        if let Some(p) = dc.lift_circle_parity(el) {
            for vl in dc.edge_lift_ends(el) {
                out.insert(vl, p);
            }
        }
    }
    out
}

/// Seeded validate-clean datum: the all-identity datum pushed through a
/// random gauge, optionally twisted by the constant of a flat 2-cocycle of
/// the two-element reflection group.
pub fn generate_pure_gauge(
    dc: &DoubleCover,
    scheme: &IndexScheme,
    rank: usize,
    seed: u64,
    twist: Option<(&OrientifoldGroup, &TwistedCochain)>,
) -> Result<OrientifoldDatum, DatumError> {
    if rank == 0 {
        return Err(DatumError::BadRank);
    }
    let base = OrientifoldDatum::identity(dc, scheme, rank);
    let gauge = GaugeDatum::random(dc, scheme, rank, seed);
    let mut d = base.apply_gauge(dc, &gauge)?;
    if let Some((group, a)) = twist {
        if group.order() != 2 || !group.has_reflection() {
            return Err(DatumError::TwistGroup);
        }
        if a.degree != 2
            || a.check_shape(group).is_err()
            || !a.is_normalized(group)
            || !is_cocycle(group, a)
        {
            return Err(DatumError::TwistNotCocycle);
        }
        let c = a.get(group, &[1, 1]).clone();
        d = d.twist(dc, &c)?;
    }
    Ok(d)
}
