//! Quotients of flat equivariant local data.
//!
//! This module works one level below the surface machinery: there is no
//! cover and no cell complex, only a finite index set `I` carrying an
//! action of an orientifold group `(Γ, ε)` and total tables of exact
//! phases over it.  A [`FlatEquivariantDatum`] consists of a Čech
//! 2-cocycle `g` on `I³`, comparison phases `chi^γ` on `I²` for every
//! group element, coherence phases `f^{γ₁,γ₂}` on `I`, and an optional
//! module layer `(G, H^γ)`.  When the sign kernel `Γ₀ = ker ε` acts
//! freely the whole structure descends to the orbit set `I' = I/Γ₀`,
//! yielding a [`FlatJandlDatum`] — the same kind of table with the
//! residual reflection acting through an involution of `I'` — or a plain
//! cocycle ([`FlatGerbeDatum`]) when `ε` is trivial.
//!
//! Design points, fixed here once:
//!
//! * All tables are **total** maps (every tuple, repeated indices
//!   included); no antisymmetry conventions.  Instead, normalization is
//!   part of validity: identity-slot entries (`chi^1`, `f^{1,γ}`,
//!   `f^{γ,1}`, `H^1`) are trivial, and `g` is trivial on triples with an
//!   adjacent repeated index.  The latter is what makes
//!   `quotient ∘ canonical_pullback` the identity on the nose rather
//!   than up to exact coboundaries concentrated on degenerate triples.
//! * Orbit bookkeeping is canonical and deterministic: the section
//!   through an orbit is its least element, and the reflection used to
//!   build the quotient involution is the least `ε = -1` element.
//! * Rank-1 module entries stay exact phases, so every rank-1 statement
//!   in the tests is a zero-tolerance statement.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cohomology::{self, CohomologyError, TwistedCochain};
use crate::data::{Transport, ValidationReport, Violation};
use crate::group::{GroupError, IndexAction, OrientifoldGroup};
use crate::phase::{random_phase, random_unitary, Phase};

#[derive(Debug, PartialEq, Eq, thiserror::Error)]
pub enum DescentError {
    #[error("table sizes do not match the index set and group")]
    Shape,
    #[error("rank must be at least 1")]
    BadRank,
    #[error("the sign kernel does not act freely on the index set")]
    KernelNotFree,
    #[error("the group has no reflection; this path needs a nontrivial sign character")]
    NoReflection,
    #[error("the group has a reflection; the plain path needs a trivial sign character")]
    UnexpectedReflection,
    #[error("index maps are incompatible: {0}")]
    IncompatibleIndexMap(String),
    #[error("group action: {0}")]
    Action(#[from] GroupError),
    #[error("constants must form a normalized 2-cocycle")]
    ClassNotCocycle,
    #[error("the closed-form generator needs an abelian group")]
    NotAbelian,
    #[error("cohomology: {0}")]
    Cohomology(#[from] CohomologyError),
    #[error("gauge tables must be normalized: unit diagonal and trivial identity row")]
    GaugeShape,
}

fn ix2(n: usize, i: usize, j: usize) -> usize {
    i * n + j
}

fn ix3(n: usize, i: usize, j: usize, k: usize) -> usize {
    (i * n + j) * n + k
}

/// `t` or its entrywise complex conjugate, depending on a `±1` sign.
fn conj_sign(t: &Transport, sign: i8) -> Transport {
    if sign == -1 {
        t.conj()
    } else {
        t.clone()
    }
}

fn flag(report: &mut ValidationReport, relation: &str, location: String, detail: &str) {
    report.violations.push(Violation {
        relation: relation.to_string(),
        location,
        detail: detail.to_string(),
    });
}

/// Optional module layer over an index set: transports `G` on pairs and
/// equivariance transports `H` (one row per group element upstairs, a
/// single reflection row downstairs).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlatModule {
    pub big_g: Vec<Transport>,
    pub big_h: Vec<Transport>,
}

/// Flat local data over an index set `I` with an action of `(Γ, ε)`.
///
/// Table layout (dense, row-major): `g[(i·n + j)·n + k]`,
/// `chi[(γ·n + i)·n + j]`, `f[(γ₁·|Γ| + γ₂)·n + i]`, module
/// `big_g[i·n + j]`, `big_h[γ·n + i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlatEquivariantDatum {
    pub group: OrientifoldGroup,
    pub action: IndexAction,
    pub rank: usize,
    pub g: Vec<Phase>,
    pub chi: Vec<Phase>,
    pub f: Vec<Phase>,
    pub module: Option<FlatModule>,
}

impl FlatEquivariantDatum {
    pub fn size(&self) -> usize {
        self.action.count()
    }

    pub fn g(&self, i: usize, j: usize, k: usize) -> &Phase {
        &self.g[ix3(self.size(), i, j, k)]
    }

    pub fn chi(&self, gamma: usize, i: usize, j: usize) -> &Phase {
        let n = self.size();
        &self.chi[gamma * n * n + ix2(n, i, j)]
    }

    pub fn f(&self, g1: usize, g2: usize, i: usize) -> &Phase {
        &self.f[(g1 * self.group.order() + g2) * self.size() + i]
    }

    fn big_g(&self, i: usize, j: usize) -> &Transport {
        &self.module.as_ref().expect("module layer").big_g[ix2(self.size(), i, j)]
    }

    fn big_h(&self, gamma: usize, i: usize) -> &Transport {
        &self.module.as_ref().expect("module layer").big_h[gamma * self.size() + i]
    }

    pub fn identity(
        group: &OrientifoldGroup,
        action: &IndexAction,
        rank: usize,
        with_module: bool,
    ) -> FlatEquivariantDatum {
        let n = action.count();
        let ord = group.order();
        let module = with_module.then(|| FlatModule {
            big_g: vec![Transport::identity(rank); n * n],
            big_h: vec![Transport::identity(rank); ord * n],
        });
        FlatEquivariantDatum {
            group: group.clone(),
            action: action.clone(),
            rank,
            g: vec![Phase::one(); n * n * n],
            chi: vec![Phase::one(); ord * n * n],
            f: vec![Phase::one(); ord * ord * n],
            module,
        }
    }

    /// Seeded random valid datum.  Built from a free parameterization —
    /// an antisymmetric potential `q` for `g`, per-element potentials
    /// `m^γ` for `chi`, a normalized 2-cocycle of constants for `f`, and
    /// unitaries `V_i` plus per-element scalars `w^γ` for the module — so
    /// the output is validator-clean by construction, exactly at rank 1.
    ///
    /// With a module the constants are forced to be the coboundary of
    /// `w`; without one they are sampled across all of `H²(Γ, U(1)_ε)`.
    /// The closed-form solution behind this generator needs `Γ` abelian.
    pub fn random(
        group: &OrientifoldGroup,
        action: &IndexAction,
        rank: usize,
        with_module: bool,
        seed: u64,
    ) -> Result<FlatEquivariantDatum, DescentError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let constants = if with_module {
            None
        } else {
            let mut c = random_normalized_coboundary(group, &mut rng);
            for rep in &cohomology::cohomology(group, 2)?.representatives {
                let k = rng.gen_range(0..4i64);
                let powered = TwistedCochain {
                    degree: 2,
                    values: rep.values.iter().map(|p| p.pow(k)).collect(),
                };
                c = c.mul(&powered);
            }
            Some(c)
        };
        FlatEquivariantDatum::from_potentials(group, action, rank, with_module, constants, &mut rng)
    }

    /// Like [`FlatEquivariantDatum::random`], but the coherence constants
    /// land in the class of the supplied normalized 2-cocycle (times a
    /// random coboundary) — the way to prescribe the twist class.  No
    /// module layer: a nontrivial class obstructs one.
    pub fn random_twisted(
        group: &OrientifoldGroup,
        action: &IndexAction,
        rank: usize,
        seed: u64,
        class: &TwistedCochain,
    ) -> Result<FlatEquivariantDatum, DescentError> {
        if class.degree != 2
            || class.check_shape(group).is_err()
            || !class.is_normalized(group)
            || !cohomology::is_cocycle(group, class)
        {
            return Err(DescentError::ClassNotCocycle);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let constants = Some(random_normalized_coboundary(group, &mut rng).mul(class));
        FlatEquivariantDatum::from_potentials(group, action, rank, false, constants, &mut rng)
    }

    fn from_potentials(
        group: &OrientifoldGroup,
        action: &IndexAction,
        rank: usize,
        with_module: bool,
        constants: Option<TwistedCochain>,
        rng: &mut ChaCha8Rng,
    ) -> Result<FlatEquivariantDatum, DescentError> {
        if rank == 0 {
            return Err(DescentError::BadRank);
        }
        let ord = group.order();
        let one = group.identity();
        for a in 0..ord {
            for b in 0..ord {
                if group.mul(a, b) != group.mul(b, a) {
                    return Err(DescentError::NotAbelian);
                }
            }
        }
        let n = action.count();

        // Antisymmetric potential for the plain cocycle: q_ii = 1,
        // q_ji = q_ij^{-1}; this is what keeps g trivial on adjacent
        // repeats.
        let mut q = vec![Phase::one(); n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let p = random_phase(rng);
                q[ix2(n, i, j)] = p.clone();
                q[ix2(n, j, i)] = p.inv();
            }
        }
        // Per-element potentials for chi; trivial on the identity row.
        let mut m = vec![Phase::one(); ord * n];
        for gamma in 0..ord {
            if gamma == one {
                continue;
            }
            for i in 0..n {
                m[gamma * n + i] = random_phase(rng);
            }
        }
        // Coherence constants: either the supplied cocycle or the
        // coboundary of the module scalars w (so the module relations can
        // close).
        let mut w = vec![Phase::one(); ord];
        let constants = match constants {
            Some(c) => c,
            None => {
                let mut wc = TwistedCochain::zero(group, 1);
                for gamma in 0..ord {
                    if gamma != one {
                        let p = random_phase(rng);
                        w[gamma] = p.clone();
                        wc.set(group, &[gamma], p);
                    }
                }
                cohomology::delta(group, &wc)
            }
        };

        let mut g = vec![Phase::one(); n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    g[ix3(n, i, j, k)] =
                        q[ix2(n, j, k)].mul(&q[ix2(n, i, k)].inv()).mul(&q[ix2(n, i, j)]);
                }
            }
        }
        let mut chi = vec![Phase::one(); ord * n * n];
        for gamma in 0..ord {
            let e = group.epsilon(gamma) as i64;
            for i in 0..n {
                for j in 0..n {
                    let gi = action.act(gamma, i);
                    let gj = action.act(gamma, j);
                    chi[gamma * n * n + ix2(n, i, j)] = q[ix2(n, gi, gj)]
                        .pow_sign(-e)
                        .mul(&q[ix2(n, i, j)])
                        .mul(&m[gamma * n + j])
                        .mul(&m[gamma * n + i].inv());
                }
            }
        }
        let mut f = vec![Phase::one(); ord * ord * n];
        for g1 in 0..ord {
            let e1 = group.epsilon(g1) as i64;
            for g2 in 0..ord {
                let g12 = group.mul(g1, g2);
                let c = constants.get(group, &[g1, g2]);
                for i in 0..n {
                    let g1i = action.act(g1, i);
                    f[(g1 * ord + g2) * n + i] = m[g2 * n + g1i]
                        .pow_sign(e1)
                        .mul(&m[g12 * n + i].inv())
                        .mul(&m[g1 * n + i])
                        .mul(c);
                }
            }
        }

        let module = with_module.then(|| {
            let v: Vec<Transport> = (0..n)
                .map(|_| {
                    if rank == 1 {
                        Transport::Exact(random_phase(rng))
                    } else {
                        Transport::Mat(random_unitary(rng, rank))
                    }
                })
                .collect();
            let mut big_g = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    big_g.push(if i == j {
                        Transport::identity(rank)
                    } else {
                        v[i].inv().mul(&v[j]).scale(&q[ix2(n, i, j)])
                    });
                }
            }
            let mut big_h = Vec::with_capacity(ord * n);
            for gamma in 0..ord {
                for i in 0..n {
                    big_h.push(if gamma == one {
                        Transport::identity(rank)
                    } else {
                        let gi = action.act(gamma, i);
                        let scalar = m[gamma * n + i].mul(&w[gamma]);
                        v[i].inv()
                            .mul(&conj_sign(&v[gi], group.epsilon(gamma)))
                            .scale(&scalar)
                    });
                }
            }
            FlatModule { big_g, big_h }
        });

        Ok(FlatEquivariantDatum {
            group: group.clone(),
            action: action.clone(),
            rank,
            g,
            chi,
            f,
            module,
        })
    }

    fn check_shape(&self) -> Result<(), DescentError> {
        let n = self.size();
        let ord = self.group.order();
        if self.rank == 0 {
            return Err(DescentError::BadRank);
        }
        if self.g.len() != n * n * n
            || self.chi.len() != ord * n * n
            || self.f.len() != ord * ord * n
        {
            return Err(DescentError::Shape);
        }
        if let Some(module) = &self.module {
            if module.big_g.len() != n * n || module.big_h.len() != ord * n {
                return Err(DescentError::Shape);
            }
            if module
                .big_g
                .iter()
                .chain(module.big_h.iter())
                .any(|t| t.rank() != self.rank)
            {
                return Err(DescentError::Shape);
            }
        }
        Ok(())
    }

    /// Full relation check.  Phase layers are exact; the module layer is
    /// exact at rank 1 and compared within `tol` from rank 2 on.
    ///
    /// Relations: `U1` (plain cocycle), `U2` (cocycle vs. chi), `U3`
    /// (chi vs. f), `U4` (f cocycle), `N` (normalization, including the
    /// adjacent-repeat triviality of `g`), `M1`–`M3` (module layer).
    pub fn validate(&self, tol: f64) -> ValidationReport {
        let mut report = ValidationReport::default();
        if let Err(e) = self.check_shape() {
            flag(&mut report, "shape", e.to_string(), "tables unusable; no relations checked");
            return report;
        }
        let n = self.size();
        let ord = self.group.order();
        let one = self.group.identity();

        for i in 0..n {
            for j in 0..n {
                if !self.g(i, i, j).is_one() || !self.g(i, j, j).is_one() {
                    flag(
                        &mut report,
                        "N",
                        format!("g near ({i}, {j})"),
                        "adjacent repeated index must give the unit phase",
                    );
                }
                if !self.chi(one, i, j).is_one() {
                    flag(
                        &mut report,
                        "N",
                        format!("chi^1 at ({i}, {j})"),
                        "identity row of chi must be trivial",
                    );
                }
            }
        }
        for gamma in 0..ord {
            for i in 0..n {
                if !self.f(one, gamma, i).is_one() || !self.f(gamma, one, i).is_one() {
                    flag(
                        &mut report,
                        "N",
                        format!("f with identity slot at ({}, {i})", self.group.name(gamma)),
                        "identity slots of f must be trivial",
                    );
                }
            }
        }

        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let lhs = self.g(i, j, l).mul(self.g(j, k, l));
                        let rhs = self.g(i, k, l).mul(self.g(i, j, k));
                        if lhs != rhs {
                            flag(
                                &mut report,
                                "U1",
                                format!("({i}, {j}, {k}, {l})"),
                                "cocycle relation for g fails",
                            );
                        }
                    }
                }
            }
        }

        for gamma in 0..ord {
            let e = self.group.epsilon(gamma) as i64;
            for i in 0..n {
                let gi = self.action.act(gamma, i);
                for j in 0..n {
                    let gj = self.action.act(gamma, j);
                    for k in 0..n {
                        let gk = self.action.act(gamma, k);
                        let lhs = self.g(gi, gj, gk).pow_sign(e).mul(&self.g(i, j, k).inv());
                        let rhs = self
                            .chi(gamma, j, k)
                            .inv()
                            .mul(self.chi(gamma, i, k))
                            .mul(&self.chi(gamma, i, j).inv());
                        if lhs != rhs {
                            flag(
                                &mut report,
                                "U2",
                                format!("({}; {i}, {j}, {k})", self.group.name(gamma)),
                                "chi does not compare g with its pullback",
                            );
                        }
                    }
                }
            }
        }

        for g1 in 0..ord {
            let e1 = self.group.epsilon(g1) as i64;
            for g2 in 0..ord {
                let g12 = self.group.mul(g1, g2);
                for i in 0..n {
                    let g1i = self.action.act(g1, i);
                    for j in 0..n {
                        let g1j = self.action.act(g1, j);
                        let lhs = self
                            .chi(g2, g1i, g1j)
                            .pow_sign(e1)
                            .mul(&self.chi(g12, i, j).inv())
                            .mul(self.chi(g1, i, j));
                        let rhs = self.f(g1, g2, i).inv().mul(self.f(g1, g2, j));
                        if lhs != rhs {
                            flag(
                                &mut report,
                                "U3",
                                format!(
                                    "({}, {}; {i}, {j})",
                                    self.group.name(g1),
                                    self.group.name(g2)
                                ),
                                "f does not mediate the chi composition",
                            );
                        }
                    }
                }
            }
        }

        for g1 in 0..ord {
            let e1 = self.group.epsilon(g1) as i64;
            for g2 in 0..ord {
                let g12 = self.group.mul(g1, g2);
                for g3 in 0..ord {
                    let g23 = self.group.mul(g2, g3);
                    for i in 0..n {
                        let g1i = self.action.act(g1, i);
                        let total = self
                            .f(g2, g3, g1i)
                            .pow_sign(e1)
                            .mul(&self.f(g12, g3, i).inv())
                            .mul(self.f(g1, g23, i))
                            .mul(&self.f(g1, g2, i).inv());
                        if !total.is_one() {
                            flag(
                                &mut report,
                                "U4",
                                format!(
                                    "({}, {}, {}; {i})",
                                    self.group.name(g1),
                                    self.group.name(g2),
                                    self.group.name(g3)
                                ),
                                "twisted cocycle relation for f fails",
                            );
                        }
                    }
                }
            }
        }

        if self.module.is_some() {
            self.validate_module(tol, &mut report);
        }
        report
    }

    fn validate_module(&self, tol: f64, report: &mut ValidationReport) {
        let n = self.size();
        let ord = self.group.order();
        let one = self.group.identity();
        let id = Transport::identity(self.rank);

        for i in 0..n {
            if !self.big_h(one, i).agrees(&id, tol) {
                flag(report, "N", format!("H^1 at {i}"), "identity row of H must be trivial");
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let lhs = self.big_g(i, j).mul(self.big_g(j, k));
                    let rhs = self.big_g(i, k).scale(self.g(i, j, k));
                    if !lhs.agrees(&rhs, tol) {
                        flag(
                            report,
                            "M1",
                            format!("({i}, {j}, {k})"),
                            "module transports do not compose over g",
                        );
                    }
                }
            }
        }
        for gamma in 0..ord {
            let e = self.group.epsilon(gamma);
            for i in 0..n {
                let gi = self.action.act(gamma, i);
                for j in 0..n {
                    let gj = self.action.act(gamma, j);
                    let lhs = conj_sign(self.big_g(gi, gj), e);
                    let rhs = self
                        .big_h(gamma, i)
                        .inv()
                        .mul(self.big_g(i, j))
                        .mul(self.big_h(gamma, j))
                        .scale(&self.chi(gamma, i, j).inv());
                    if !lhs.agrees(&rhs, tol) {
                        flag(
                            report,
                            "M2",
                            format!("({}; {i}, {j})", self.group.name(gamma)),
                            "H does not intertwine the transports",
                        );
                    }
                }
            }
        }
        for g1 in 0..ord {
            let e1 = self.group.epsilon(g1);
            for g2 in 0..ord {
                let g12 = self.group.mul(g1, g2);
                for i in 0..n {
                    let g1i = self.action.act(g1, i);
                    let lhs = self.big_h(g12, i).clone();
                    let rhs = self
                        .big_h(g1, i)
                        .mul(&conj_sign(self.big_h(g2, g1i), e1))
                        .scale(&self.f(g1, g2, i).inv());
                    if !lhs.agrees(&rhs, tol) {
                        flag(
                            report,
                            "M3",
                            format!("({}, {}; {i})", self.group.name(g1), self.group.name(g2)),
                            "H does not compose over f",
                        );
                    }
                }
            }
        }
    }

    /// Gauge action.  `u` shifts the plain layer by its coboundary, `h`
    /// reshuffles the reflection layers; validity is preserved, and so is
    /// every normalization this module enforces — which is why the gauge
    /// tables themselves must be normalized.
    pub fn apply_gauge(&self, gauge: &FlatGauge) -> Result<FlatEquivariantDatum, DescentError> {
        let n = self.size();
        let ord = self.group.order();
        let one = self.group.identity();
        if gauge.u.len() != n * n || gauge.h.len() != ord * n {
            return Err(DescentError::Shape);
        }
        if (0..n).any(|i| !gauge.u[ix2(n, i, i)].is_one())
            || (0..n).any(|i| !gauge.h[one * n + i].is_one())
        {
            return Err(DescentError::GaugeShape);
        }
        let u = |i: usize, j: usize| &gauge.u[ix2(n, i, j)];
        let h = |gamma: usize, i: usize| &gauge.h[gamma * n + i];

        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    out.g[ix3(n, i, j, k)] = self
                        .g(i, j, k)
                        .mul(u(j, k))
                        .mul(&u(i, k).inv())
                        .mul(u(i, j));
                }
            }
        }
        for gamma in 0..ord {
            let e = self.group.epsilon(gamma) as i64;
            for i in 0..n {
                let gi = self.action.act(gamma, i);
                for j in 0..n {
                    let gj = self.action.act(gamma, j);
                    out.chi[gamma * n * n + ix2(n, i, j)] = self
                        .chi(gamma, i, j)
                        .mul(&u(gi, gj).pow_sign(-e))
                        .mul(u(i, j))
                        .mul(h(gamma, i))
                        .mul(&h(gamma, j).inv());
                }
            }
        }
        for g1 in 0..ord {
            let e1 = self.group.epsilon(g1) as i64;
            for g2 in 0..ord {
                let g12 = self.group.mul(g1, g2);
                for i in 0..n {
                    let g1i = self.action.act(g1, i);
                    let shift = h(g2, g1i)
                        .pow_sign(e1)
                        .mul(&h(g12, i).inv())
                        .mul(h(g1, i));
                    out.f[(g1 * ord + g2) * n + i] = self.f(g1, g2, i).mul(&shift.inv());
                }
            }
        }
        if let Some(module) = &mut out.module {
            for i in 0..n {
                for j in 0..n {
                    module.big_g[ix2(n, i, j)] = self.big_g(i, j).scale(u(i, j));
                }
            }
            for gamma in 0..ord {
                for i in 0..n {
                    module.big_h[gamma * n + i] =
                        self.big_h(gamma, i).scale(&h(gamma, i).inv());
                }
            }
        }
        Ok(out)
    }
}

/// Flat Jandl data over an index set `I'` with an involution: the
/// two-element specialization of the equivariant tables, stored with the
/// redundant layers dropped (`chi` is the reflection row, `f` the
/// reflection-square row, `big_h` the single reflection transport).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlatJandlDatum {
    pub involution: Vec<usize>,
    pub rank: usize,
    pub g: Vec<Phase>,
    pub chi: Vec<Phase>,
    pub f: Vec<Phase>,
    pub module: Option<FlatModule>,
}

impl FlatJandlDatum {
    pub fn size(&self) -> usize {
        self.involution.len()
    }

    pub fn g(&self, i: usize, j: usize, k: usize) -> &Phase {
        &self.g[ix3(self.size(), i, j, k)]
    }

    pub fn chi(&self, i: usize, j: usize) -> &Phase {
        &self.chi[ix2(self.size(), i, j)]
    }

    pub fn f(&self, i: usize) -> &Phase {
        &self.f[i]
    }

    pub fn identity(involution: Vec<usize>, rank: usize, with_module: bool) -> FlatJandlDatum {
        let n = involution.len();
        let module = with_module.then(|| FlatModule {
            big_g: vec![Transport::identity(rank); n * n],
            big_h: vec![Transport::identity(rank); n],
        });
        FlatJandlDatum {
            involution,
            rank,
            g: vec![Phase::one(); n * n * n],
            chi: vec![Phase::one(); n * n],
            f: vec![Phase::one(); n],
            module,
        }
    }

    /// Seeded random valid datum over the given involution, produced by
    /// the equivariant generator on the two-element reflection group.
    pub fn random(
        involution: Vec<usize>,
        rank: usize,
        with_module: bool,
        seed: u64,
    ) -> Result<FlatJandlDatum, DescentError> {
        let group = OrientifoldGroup::jandl();
        let ident: Vec<usize> = (0..involution.len()).collect();
        let action = IndexAction::new(&group, vec![ident, involution])?;
        let eq = FlatEquivariantDatum::random(&group, &action, rank, with_module, seed)?;
        Ok(FlatJandlDatum::from_equivariant(&eq))
    }

    /// View as an equivariant datum for the two-element reflection group
    /// (identity layers filled in).  Fails when the stored involution is
    /// not one.
    pub fn to_equivariant(&self) -> Result<FlatEquivariantDatum, DescentError> {
        let n = self.size();
        if self.g.len() != n * n * n || self.chi.len() != n * n || self.f.len() != n {
            return Err(DescentError::Shape);
        }
        let group = OrientifoldGroup::jandl();
        let ident: Vec<usize> = (0..n).collect();
        let action = IndexAction::new(&group, vec![ident, self.involution.clone()])?;
        let mut chi = vec![Phase::one(); 2 * n * n];
        chi[n * n..].clone_from_slice(&self.chi);
        let mut f = vec![Phase::one(); 4 * n];
        f[3 * n..].clone_from_slice(&self.f);
        let module = match &self.module {
            None => None,
            Some(m) => {
                if m.big_g.len() != n * n || m.big_h.len() != n {
                    return Err(DescentError::Shape);
                }
                let mut big_h = vec![Transport::identity(self.rank); n];
                big_h.extend(m.big_h.iter().cloned());
                Some(FlatModule { big_g: m.big_g.clone(), big_h })
            }
        };
        Ok(FlatEquivariantDatum {
            group,
            action,
            rank: self.rank,
            g: self.g.clone(),
            chi,
            f,
            module,
        })
    }

    fn from_equivariant(eq: &FlatEquivariantDatum) -> FlatJandlDatum {
        let n = eq.size();
        let involution: Vec<usize> = (0..n).map(|i| eq.action.act(1, i)).collect();
        let module = eq.module.as_ref().map(|m| FlatModule {
            big_g: m.big_g.clone(),
            big_h: m.big_h[n..].to_vec(),
        });
        FlatJandlDatum {
            involution,
            rank: eq.rank,
            g: eq.g.clone(),
            chi: eq.chi[n * n..].to_vec(),
            f: eq.f[3 * n..].to_vec(),
            module,
        }
    }

    /// Relation check `J1`–`J4` plus normalization and module layer,
    /// performed on the equivariant view.
    pub fn validate(&self, tol: f64) -> ValidationReport {
        match self.to_equivariant() {
            Err(e) => {
                let mut report = ValidationReport::default();
                flag(&mut report, "shape", e.to_string(), "tables unusable; no relations checked");
                report
            }
            Ok(eq) => {
                let mut report = eq.validate(tol);
                for v in &mut report.violations {
                    if let Some(rest) = v.relation.strip_prefix('U') {
                        v.relation = format!("J{rest}");
                    }
                }
                report
            }
        }
    }

    pub fn apply_gauge(&self, gauge: &JandlGauge) -> Result<FlatJandlDatum, DescentError> {
        let n = self.size();
        if gauge.u.len() != n * n || gauge.h.len() != n {
            return Err(DescentError::Shape);
        }
        let eq = self.to_equivariant()?;
        let mut h = vec![Phase::one(); 2 * n];
        h[n..].clone_from_slice(&gauge.h);
        let out = eq.apply_gauge(&FlatGauge { u: gauge.u.clone(), h })?;
        Ok(FlatJandlDatum::from_equivariant(&out))
    }
}

/// Flat plain-gerbe data: just the cocycle (and optionally module
/// transports) over an index set with no group in sight.  This is what a
/// quotient along a trivial sign character produces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlatGerbeDatum {
    pub size: usize,
    pub rank: usize,
    pub g: Vec<Phase>,
    pub module: Option<Vec<Transport>>,
}

impl FlatGerbeDatum {
    pub fn g(&self, i: usize, j: usize, k: usize) -> &Phase {
        &self.g[ix3(self.size, i, j, k)]
    }

    pub fn identity(size: usize, rank: usize, with_module: bool) -> FlatGerbeDatum {
        FlatGerbeDatum {
            size,
            rank,
            g: vec![Phase::one(); size * size * size],
            module: with_module.then(|| vec![Transport::identity(rank); size * size]),
        }
    }

    pub fn random(
        size: usize,
        rank: usize,
        with_module: bool,
        seed: u64,
    ) -> Result<FlatGerbeDatum, DescentError> {
        let group = OrientifoldGroup::trivial();
        let action = IndexAction::new(&group, vec![(0..size).collect()])?;
        let eq = FlatEquivariantDatum::random(&group, &action, rank, with_module, seed)?;
        Ok(FlatGerbeDatum {
            size,
            rank,
            g: eq.g,
            module: eq.module.map(|m| m.big_g),
        })
    }

    pub fn validate(&self, tol: f64) -> ValidationReport {
        let mut report = ValidationReport::default();
        let n = self.size;
        let mut bad_shape = self.rank == 0 || self.g.len() != n * n * n;
        if let Some(module) = &self.module {
            bad_shape |= module.len() != n * n || module.iter().any(|t| t.rank() != self.rank);
        }
        if bad_shape {
            flag(
                &mut report,
                "shape",
                DescentError::Shape.to_string(),
                "tables unusable; no relations checked",
            );
            return report;
        }
        for i in 0..n {
            for j in 0..n {
                if !self.g(i, i, j).is_one() || !self.g(i, j, j).is_one() {
                    flag(
                        &mut report,
                        "N",
                        format!("g near ({i}, {j})"),
                        "adjacent repeated index must give the unit phase",
                    );
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let lhs = self.g(i, j, l).mul(self.g(j, k, l));
                        let rhs = self.g(i, k, l).mul(self.g(i, j, k));
                        if lhs != rhs {
                            flag(
                                &mut report,
                                "U1",
                                format!("({i}, {j}, {k}, {l})"),
                                "cocycle relation for g fails",
                            );
                        }
                    }
                }
            }
        }
        if let Some(module) = &self.module {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let lhs = module[ix2(n, i, j)].mul(&module[ix2(n, j, k)]);
                        let rhs = module[ix2(n, i, k)].scale(self.g(i, j, k));
                        if !lhs.agrees(&rhs, tol) {
                            flag(
                                &mut report,
                                "M1",
                                format!("({i}, {j}, {k})"),
                                "module transports do not compose over g",
                            );
                        }
                    }
                }
            }
        }
        report
    }
}

/// What a quotient produces: Jandl data when the group reflects, plain
/// data when it does not.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum QuotientOutput {
    Jandl(FlatJandlDatum),
    Plain(FlatGerbeDatum),
}

/// Orbit bookkeeping for a subgroup action: the projection `I -> I'`
/// (orbit index, orbits ordered by least element) and the section
/// `I' -> I` picking each orbit's least element.
fn orbit_tables(action: &IndexAction, subgroup: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let orbits = action.orbits_of(subgroup);
    let mut pi = vec![0usize; action.count()];
    let mut section = Vec::with_capacity(orbits.len());
    for (idx, orbit) in orbits.iter().enumerate() {
        section.push(orbit[0]);
        for &i in orbit {
            pi[i] = idx;
        }
    }
    (pi, section)
}

/// Descend a flat equivariant datum along the free action of the sign
/// kernel.  With a reflection present the output is Jandl data over the
/// orbit set; with a trivial sign character it is a plain cocycle.
///
/// The phase layers descend by evaluation on the canonical sections,
/// with two non-obvious ingredients (both forced by requiring the
/// validator to pass on the output and the pullback round trip to be
/// exact):
///
/// * the reflection comparison picks up two cocycle connectors mediating
///   between the reflected section point and the section through the
///   reflected orbit;
/// * the reflection-square phases are anchored at the base orbit,
///   corrected by the telescoped `J3` ratio, and finished with a global
///   half-angle fix so `J4` holds; when a module is present its own
///   square relation picks between the two admissible anchors.
pub fn quotient(d: &FlatEquivariantDatum) -> Result<QuotientOutput, DescentError> {
    d.check_shape()?;
    let kernel = d.group.kernel();
    if !d.action.is_free_on(&d.group, &kernel) {
        return Err(DescentError::KernelNotFree);
    }
    let (pi, section) = orbit_tables(&d.action, &kernel);
    let np = section.len();

    if !d.group.has_reflection() {
        let mut g = Vec::with_capacity(np * np * np);
        for &a in &section {
            for &b in &section {
                for &c in &section {
                    g.push(d.g(a, b, c).clone());
                }
            }
        }
        let module = d.module.as_ref().map(|_| {
            let mut big_g = Vec::with_capacity(np * np);
            for &a in &section {
                for &b in &section {
                    big_g.push(d.big_g(a, b).clone());
                }
            }
            big_g
        });
        return Ok(QuotientOutput::Plain(FlatGerbeDatum {
            size: np,
            rank: d.rank,
            g,
            module,
        }));
    }

    let r = d.group.reflections()[0];
    // Per-orbit geometry: a = section point, t = its image under the
    // chosen reflection, sb = the section through the reflected orbit.
    let involution: Vec<usize> = (0..np).map(|ip| pi[d.action.act(r, section[ip])]).collect();
    let a = |ip: usize| section[ip];
    let t = |ip: usize| d.action.act(r, section[ip]);
    let sb = |ip: usize| section[involution[ip]];

    let mut g = Vec::with_capacity(np * np * np);
    for ip in 0..np {
        for jp in 0..np {
            for kp in 0..np {
                g.push(d.g(a(ip), a(jp), a(kp)).clone());
            }
        }
    }

    let mut chi = Vec::with_capacity(np * np);
    for ip in 0..np {
        for jp in 0..np {
            chi.push(
                d.chi(r, a(ip), a(jp))
                    .mul(d.g(sb(ip), t(ip), t(jp)))
                    .mul(&d.g(sb(ip), sb(jp), t(jp)).inv()),
            );
        }
    }

    // f-layer: anchor at the base orbit, telescope the J3 ratio, then fix
    // the global square so J4 holds; the defect is a half turn at most.
    let fq0 = |ip: usize| d.f(r, r, a(ip)).clone();
    let corr = |ip: usize| -> Phase {
        chi[ix2(np, involution[0], involution[ip])]
            .inv()
            .mul(&chi[ix2(np, 0, ip)])
            .mul(&fq0(0))
            .mul(&fq0(ip).inv())
    };
    let cand: Vec<Phase> = (0..np).map(|ip| fq0(ip).mul(&corr(ip))).collect();
    let defect = cand[involution[0]].mul(&cand[0]);
    let mut anchor = defect.inv().halve();

    let module = match &d.module {
        None => None,
        Some(_) => {
            let mut big_g = Vec::with_capacity(np * np);
            for ip in 0..np {
                for jp in 0..np {
                    big_g.push(d.big_g(a(ip), a(jp)).clone());
                }
            }
            let h0 = d.big_h(r, a(0)).mul(&d.big_g(t(0), sb(0)).conj());
            let mut big_h = Vec::with_capacity(np);
            for ip in 0..np {
                big_h.push(if ip == 0 {
                    h0.clone()
                } else {
                    big_g[ix2(np, 0, ip)]
                        .inv()
                        .mul(&h0)
                        .mul(&big_g[ix2(np, involution[0], involution[ip])].conj())
                        .scale(&chi[ix2(np, 0, ip)])
                });
            }
            // The module, when it exists, knows which of the two J4
            // anchors is right: compare its square relation at the base.
            let square = big_h[0].mul(&big_h[involution[0]].conj());
            let target = cand[0].mul(&anchor);
            let flip = Phase::new(1, 2).expect("1/2 is a phase");
            match square.as_exact() {
                Some(p) => {
                    if *p != target && *p == target.mul(&flip) {
                        anchor = anchor.mul(&flip);
                    }
                }
                None => {
                    let s = square.trace() / square.rank() as f64;
                    let plain = target.to_complex();
                    let flipped = target.mul(&flip).to_complex();
                    if (s - flipped).norm() < (s - plain).norm() {
                        anchor = anchor.mul(&flip);
                    }
                }
            }
            Some(FlatModule { big_g, big_h })
        }
    };

    let f: Vec<Phase> = cand.iter().map(|p| p.mul(&anchor)).collect();

    Ok(QuotientOutput::Jandl(FlatJandlDatum {
        involution,
        rank: d.rank,
        g,
        chi,
        f,
        module,
    }))
}

/// The canonical equivariant structure on the pullback of Jandl data
/// along an index map: trivial layers over the sign kernel, the Jandl
/// layers pulled back over the reflections.  The supplied action must
/// have a free sign kernel whose orbit set matches `d` (orbits ordered
/// by least element, reflections inducing the stored involution).
///
/// `quotient(canonical_pullback(d, ..)) == d`, exactly.
pub fn canonical_pullback(
    d: &FlatJandlDatum,
    group: &OrientifoldGroup,
    action: &IndexAction,
) -> Result<FlatEquivariantDatum, DescentError> {
    if !group.has_reflection() {
        return Err(DescentError::NoReflection);
    }
    let kernel = group.kernel();
    if !action.is_free_on(group, &kernel) {
        return Err(DescentError::KernelNotFree);
    }
    let (pi, section) = orbit_tables(action, &kernel);
    if section.len() != d.size() {
        return Err(DescentError::IncompatibleIndexMap(format!(
            "{} kernel orbits for {} quotient indices",
            section.len(),
            d.size()
        )));
    }
    let n = action.count();
    let ord = group.order();
    for gamma in group.reflections() {
        for i in 0..n {
            if pi[action.act(gamma, i)] != d.involution[pi[i]] {
                return Err(DescentError::IncompatibleIndexMap(format!(
                    "element {} does not cover the involution at index {i}",
                    group.name(gamma)
                )));
            }
        }
    }

    let mut g = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                g.push(d.g(pi[i], pi[j], pi[k]).clone());
            }
        }
    }
    let mut chi = vec![Phase::one(); ord * n * n];
    let mut f = vec![Phase::one(); ord * ord * n];
    for gamma in 0..ord {
        if group.epsilon(gamma) == 1 {
            continue;
        }
        for i in 0..n {
            for j in 0..n {
                chi[gamma * n * n + ix2(n, i, j)] = d.chi(pi[i], pi[j]).clone();
            }
        }
    }
    for g1 in 0..ord {
        for g2 in 0..ord {
            if group.epsilon(g1) == 1 || group.epsilon(g2) == 1 {
                continue;
            }
            for i in 0..n {
                f[(g1 * ord + g2) * n + i] = d.f(pi[i]).clone();
            }
        }
    }
    let module = match &d.module {
        None => None,
        Some(m) => {
            let mut big_g = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    big_g.push(m.big_g[ix2(d.size(), pi[i], pi[j])].clone());
                }
            }
            let mut big_h = Vec::with_capacity(ord * n);
            for gamma in 0..ord {
                for i in 0..n {
                    big_h.push(if group.epsilon(gamma) == 1 {
                        Transport::identity(d.rank)
                    } else {
                        m.big_h[pi[i]].clone()
                    });
                }
            }
            Some(FlatModule { big_g, big_h })
        }
    };

    Ok(FlatEquivariantDatum {
        group: group.clone(),
        action: action.clone(),
        rank: d.rank,
        g,
        chi,
        f,
        module,
    })
}

/// Plain-data counterpart of [`canonical_pullback`]: trivial reflection
/// layers everywhere, for a group with a trivial sign character acting
/// freely.
pub fn canonical_pullback_plain(
    d: &FlatGerbeDatum,
    group: &OrientifoldGroup,
    action: &IndexAction,
) -> Result<FlatEquivariantDatum, DescentError> {
    if group.has_reflection() {
        return Err(DescentError::UnexpectedReflection);
    }
    let kernel = group.kernel();
    if !action.is_free_on(group, &kernel) {
        return Err(DescentError::KernelNotFree);
    }
    let (pi, section) = orbit_tables(action, &kernel);
    if section.len() != d.size {
        return Err(DescentError::IncompatibleIndexMap(format!(
            "{} orbits for {} quotient indices",
            section.len(),
            d.size
        )));
    }
    let n = action.count();
    let mut out = FlatEquivariantDatum::identity(group, action, d.rank, d.module.is_some());
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                out.g[ix3(n, i, j, k)] = d.g(pi[i], pi[j], pi[k]).clone();
            }
        }
    }
    if let (Some(module), Some(src)) = (&mut out.module, &d.module) {
        for i in 0..n {
            for j in 0..n {
                module.big_g[ix2(n, i, j)] = src[ix2(d.size, pi[i], pi[j])].clone();
            }
        }
    }
    Ok(out)
}

/// A flat gauge: a phase `u` per index pair (unit diagonal) and a phase
/// `h` per group element and index (trivial identity row).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlatGauge {
    pub u: Vec<Phase>,
    pub h: Vec<Phase>,
}

impl FlatGauge {
    pub fn identity(group: &OrientifoldGroup, size: usize) -> FlatGauge {
        FlatGauge {
            u: vec![Phase::one(); size * size],
            h: vec![Phase::one(); group.order() * size],
        }
    }

    pub fn random(group: &OrientifoldGroup, size: usize, seed: u64) -> FlatGauge {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = FlatGauge::identity(group, size);
        for i in 0..size {
            for j in 0..size {
                if i != j {
                    out.u[ix2(size, i, j)] = random_phase(&mut rng);
                }
            }
        }
        for gamma in 0..group.order() {
            if gamma == group.identity() {
                continue;
            }
            for i in 0..size {
                out.h[gamma * size + i] = random_phase(&mut rng);
            }
        }
        out
    }

    /// The pullback of a quotient-level gauge along the orbit projection:
    /// `u` composed with the projection, `h` trivial over the kernel and
    /// pulled back over the reflections.  Quotient and gauge then
    /// commute — this is the shape of induced gauge the descent respects.
    pub fn pulled_back(
        group: &OrientifoldGroup,
        action: &IndexAction,
        gauge: &JandlGauge,
    ) -> Result<FlatGauge, DescentError> {
        if !group.has_reflection() {
            return Err(DescentError::NoReflection);
        }
        let kernel = group.kernel();
        if !action.is_free_on(group, &kernel) {
            return Err(DescentError::KernelNotFree);
        }
        let (pi, section) = orbit_tables(action, &kernel);
        let np = section.len();
        if gauge.h.len() != np || gauge.u.len() != np * np {
            return Err(DescentError::Shape);
        }
        let n = action.count();
        let mut out = FlatGauge::identity(group, n);
        for i in 0..n {
            for j in 0..n {
                out.u[ix2(n, i, j)] = gauge.u[ix2(np, pi[i], pi[j])].clone();
            }
        }
        for gamma in group.reflections() {
            for i in 0..n {
                out.h[gamma * n + i] = gauge.h[pi[i]].clone();
            }
        }
        Ok(out)
    }
}

/// Gauge data for flat Jandl tables: `u` per index pair, `h` per index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JandlGauge {
    pub u: Vec<Phase>,
    pub h: Vec<Phase>,
}

impl JandlGauge {
    pub fn identity(size: usize) -> JandlGauge {
        JandlGauge {
            u: vec![Phase::one(); size * size],
            h: vec![Phase::one(); size],
        }
    }

    pub fn random(size: usize, seed: u64) -> JandlGauge {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = JandlGauge::identity(size);
        for i in 0..size {
            for j in 0..size {
                if i != j {
                    out.u[ix2(size, i, j)] = random_phase(&mut rng);
                }
            }
        }
        for i in 0..size {
            out.h[i] = random_phase(&mut rng);
        }
        out
    }
}

/// A random coboundary `δb` with `b` vanishing on the identity — a
/// normalized 2-cocycle in the trivial class.
fn random_normalized_coboundary(group: &OrientifoldGroup, rng: &mut ChaCha8Rng) -> TwistedCochain {
    let mut b = TwistedCochain::zero(group, 1);
    for gamma in 0..group.order() {
        if gamma != group.identity() {
            b.set(group, &[gamma], random_phase(rng));
        }
    }
    cohomology::delta(group, &b)
}
