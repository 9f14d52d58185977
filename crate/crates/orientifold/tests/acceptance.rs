//! Acceptance gate: one test per criterion, each finishing with a single
//! `[PASS]`/`[FAIL]` line (run with `--nocapture` to see the lines for
//! passing criteria; a failing criterion carries its line in the panic
//! message).
//!
//! Criterion 8 currently fails, deliberately: the twist construction shifts
//! holonomy by the twist constant raised to the Euler characteristic mod 2,
//! which is trivial on the Klein bottle (χ = 0).  The test verifies the
//! mechanism on RP² and the Möbius strip, where the shift is exactly 1/2,
//! and then asserts the stated Klein-bottle requirement so the gap stays
//! visible instead of being papered over.  See README, "Known failures".

#[path = "support/cohomology_oracle.rs"]
#[allow(dead_code)]
mod oracle;

use orientifold::cohomology::{cohomology, delta, TwistedCochain};
use orientifold::cover::{
    canonical_choice, enumerate_choices, DoubleCover, IndexScheme, Surface, SurfaceSpec,
};
use orientifold::data::{generate_pure_gauge, GaugeDatum, OrientifoldDatum, Transport};
use orientifold::descent::{
    canonical_pullback, quotient, FlatEquivariantDatum, FlatJandlDatum, QuotientOutput,
};
use orientifold::group::{IndexAction, OrientifoldGroup};
use orientifold::holonomy::{
    holonomy, holonomy_double, holonomy_oriented, holonomy_sweep, HolonomyError, HolonomyValue,
};
use orientifold::phase::Phase;
use orientifold::subdivide::subdivide;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SURFACES: [&str; 6] = ["mobius", "klein", "rp2", "annulus", "torus", "disk"];
const EXHAUSTIVE_CAP: u128 = 1 << 14;

fn build(name: &str) -> DoubleCover {
    let spec = SurfaceSpec::named(name).expect("named model");
    DoubleCover::new(Surface::build(&spec).expect("build")).expect("double cover")
}

fn scheme_for(dc: &DoubleCover) -> IndexScheme {
    IndexScheme::full(dc, 2, vec![1, 0])
}

fn half() -> Phase {
    Phase::new(1, 2).unwrap()
}

/// Pure-gauge datum, optionally twisted by the degree-2 class with constant
/// `c` on the reflection pair.
fn pure(
    dc: &DoubleCover,
    scheme: &IndexScheme,
    rank: usize,
    seed: u64,
    twist: Option<Phase>,
) -> OrientifoldDatum {
    match twist {
        None => generate_pure_gauge(dc, scheme, rank, seed, None).expect("generator"),
        Some(c) => {
            let g = OrientifoldGroup::jandl();
            let mut cochain = TwistedCochain::zero(&g, 2);
            cochain.set(&g, &[1, 1], c);
            generate_pure_gauge(dc, scheme, rank, seed, Some((&g, &cochain))).expect("generator")
        }
    }
}

fn exact(v: &HolonomyValue) -> &Phase {
    match v {
        HolonomyValue::Exact(p) => p,
        HolonomyValue::Complex(_) => panic!("rank-1 holonomy must be exact"),
    }
}

#[test]
fn criterion_1_holonomy_is_choice_independent() {
    let mut exhaustive_surfaces = 0;
    for (s_idx, name) in SURFACES.iter().enumerate() {
        let dc = build(name);
        let scheme = scheme_for(&dc);
        let mut exhaustive = false;
        for i in 0..25u64 {
            let seed = 1000 * s_idx as u64 + i;
            let d = pure(&dc, &scheme, 1, seed, None);
            let sw = holonomy_sweep(&d, &dc, EXHAUSTIVE_CAP, 1000, seed).expect("sweep");
            assert!(
                matches!(sw.value, HolonomyValue::Exact(_)),
                "[FAIL] criterion 1: rank-1 value not exact on {name}"
            );
            assert!(
                sw.invariant,
                "[FAIL] criterion 1: holonomy varies across {} choices on {name} (seed {seed})",
                sw.choices_swept
            );
            exhaustive = sw.exhaustive;
        }
        if exhaustive {
            exhaustive_surfaces += 1;
        }
    }
    println!(
        "[PASS] criterion 1: holonomy exactly choice-independent on 6 surfaces x 25 data \
         ({exhaustive_surfaces}/6 surfaces swept exhaustively, rest sampled 1000x)"
    );
}

#[test]
fn criterion_2_holonomy_is_gauge_invariant() {
    let mut checked = 0;
    for (s_idx, name) in SURFACES.iter().enumerate() {
        let dc = build(name);
        let scheme = scheme_for(&dc);
        for i in 0..25u64 {
            let rank = (i % 3) as usize + 1;
            let twist = if i % 2 == 1 { Some(half()) } else { None };
            let seed = 2000 + 1000 * s_idx as u64 + i;
            let d = pure(&dc, &scheme, rank, seed, twist);
            let choice = canonical_choice(&dc, &scheme);
            let base = holonomy(&d, &dc, &choice).expect("holonomy");
            for j in 0..10u64 {
                let g = GaugeDatum::random(&dc, &scheme, rank, seed ^ (j + 1));
                let dg = d.apply_gauge(&dc, &g).expect("gauge");
                let after = holonomy(&dg, &dc, &choice).expect("holonomy");
                match (&base, &after) {
                    (HolonomyValue::Exact(a), HolonomyValue::Exact(b)) => assert_eq!(
                        a, b,
                        "[FAIL] criterion 2: rank-1 gauge shift on {name} (seed {seed}, gauge {j})"
                    ),
                    (HolonomyValue::Complex(a), HolonomyValue::Complex(b)) => assert!(
                        (a - b).norm() <= 1e-9,
                        "[FAIL] criterion 2: rank-{rank} gauge shift {} on {name} (seed {seed})",
                        (a - b).norm()
                    ),
                    _ => panic!("[FAIL] criterion 2: value kind changed under gauge"),
                }
                checked += 1;
            }
        }
    }
    println!("[PASS] criterion 2: holonomy gauge-invariant in {checked} datum/gauge pairs (ranks 1-3)");
}

#[test]
fn criterion_3_square_law_against_the_double() {
    let mut checked = 0;
    for (s_idx, name) in SURFACES.iter().enumerate() {
        let dc = build(name);
        let scheme = scheme_for(&dc);
        // the datum families of criteria 1 and 2, regenerated seed-for-seed
        let mut data: Vec<OrientifoldDatum> = Vec::new();
        for i in 0..25u64 {
            data.push(pure(&dc, &scheme, 1, 1000 * s_idx as u64 + i, None));
        }
        for i in 0..25u64 {
            let rank = (i % 3) as usize + 1;
            let twist = if i % 2 == 1 { Some(half()) } else { None };
            data.push(pure(&dc, &scheme, rank, 2000 + 1000 * s_idx as u64 + i, twist));
        }
        let choice = canonical_choice(&dc, &scheme);
        for d in &data {
            let h = holonomy(d, &dc, &choice).expect("holonomy");
            let hd = holonomy_double(d, &dc).expect("double");
            match (&h, &hd) {
                (HolonomyValue::Exact(p), HolonomyValue::Exact(q)) => assert_eq!(
                    &p.mul(p),
                    q,
                    "[FAIL] criterion 3: rank-1 square law broken on {name}"
                ),
                (HolonomyValue::Complex(z), HolonomyValue::Complex(w)) => assert!(
                    (z * z - w).norm() <= 1e-7,
                    "[FAIL] criterion 3: rank-{} square law off by {} on {name}",
                    d.rank,
                    (z * z - w).norm()
                ),
                _ => panic!("[FAIL] criterion 3: value kinds disagree on {name}"),
            }
            checked += 1;
        }
    }
    println!("[PASS] criterion 3: holonomy(S)^2 = holonomy(double cover) for {checked} data");
}

#[test]
fn criterion_4_oriented_reduction_and_empty_boundary_factor() {
    // (a) on orientable surfaces with section-induced choices, the general
    // formula reduces to the independent oriented implementation, exactly
    let mut compared = 0;
    for name in ["torus", "annulus", "disk"] {
        let dc = build(name);
        let scheme = scheme_for(&dc);
        let mut here = 0;
        for seed in 0..5u64 {
            let d = pure(&dc, &scheme, 1, 4000 + seed, None);
            let sweep = enumerate_choices(&dc, &scheme, 1 << 12, 400, seed);
            for choice in &sweep.choices {
                match holonomy_oriented(&d, &dc, choice) {
                    Ok(oriented) => {
                        let general = holonomy(&d, &dc, choice).expect("holonomy");
                        assert_eq!(
                            exact(&general),
                            exact(&oriented),
                            "[FAIL] criterion 4: oriented reduction differs on {name}"
                        );
                        here += 1;
                    }
                    Err(HolonomyError::NotASection) => continue,
                    Err(e) => panic!("[FAIL] criterion 4: unexpected error {e} on {name}"),
                }
            }
        }
        assert!(here >= 2, "[FAIL] criterion 4: no section-induced choices found on {name}");
        compared += here;
    }

    // (b) closed surfaces have no boundary circles, so the boundary factor
    // is the empty product: rank-2 values stay unimodular
    for name in ["torus", "klein", "rp2", "sphere"] {
        let dc = build(name);
        assert!(
            dc.boundary_circles().is_empty(),
            "[FAIL] criterion 4: {name} reports boundary circles"
        );
        let scheme = scheme_for(&dc);
        let d = pure(&dc, &scheme, 2, 4100, None);
        match holonomy(&d, &dc, &canonical_choice(&dc, &scheme)).expect("holonomy") {
            HolonomyValue::Complex(z) => assert!(
                (z.norm() - 1.0).abs() <= 1e-12,
                "[FAIL] criterion 4: boundary factor not empty on closed {name} (|z| = {})",
                z.norm()
            ),
            HolonomyValue::Exact(_) => panic!("rank-2 value should be complex"),
        }
    }
    println!(
        "[PASS] criterion 4: oriented reduction exact in {compared} section choices; \
         closed surfaces carry the empty boundary product"
    );
}

#[test]
fn criterion_5_holonomy_survives_edge_subdivision() {
    let mut chains = 0;
    for (s_idx, name) in ["mobius", "klein", "rp2"].iter().enumerate() {
        for trial in 0..3u64 {
            let mut dc = build(name);
            let scheme = scheme_for(&dc);
            let seed = 5000 + 100 * s_idx as u64 + trial;
            let twist = if s_idx > 0 { Some(half()) } else { None };
            let mut d = pure(&dc, &scheme, 1, seed, twist);
            let reference = exact(
                &holonomy(&d, &dc, &canonical_choice(&dc, &d.scheme)).expect("holonomy"),
            )
            .clone();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for step in 0..5u64 {
                let e = rng.gen_range(0..dc.surface().num_edges());
                let (nd, ndc) = subdivide(&d, &dc, e, Some(seed + step)).expect("subdivide");
                d = nd;
                dc = ndc;
                let value = exact(
                    &holonomy(&d, &dc, &canonical_choice(&dc, &d.scheme)).expect("holonomy"),
                )
                .clone();
                assert_eq!(
                    value, reference,
                    "[FAIL] criterion 5: value drifted after subdividing edge {e} \
                     (step {step}, {name}, seed {seed})"
                );
            }
            chains += 1;
        }
    }
    println!("[PASS] criterion 5: holonomy exactly invariant along {chains} chains of 5 subdivisions");
}

#[test]
fn criterion_6_validator_flags_exactly_the_broken_data() {
    let third = Phase::new(1, 3).unwrap();
    let mut clean_trials = 0;
    let mut flagged_trials = 0;
    for t in 0..1000u64 {
        let name = SURFACES[(t % 6) as usize];
        let dc = build(name);
        let scheme = scheme_for(&dc);
        let rank = (t % 3) as usize + 1;
        let twist = if t % 5 == 0 { Some(half()) } else { None };
        let d = pure(&dc, &scheme, rank, 6000 + t, twist);
        let tol = if rank == 1 { 0.0 } else { 1e-9 };
        assert!(
            d.validate(&dc, tol).is_clean(),
            "[FAIL] criterion 6: false positive on {name} (seed {}, rank {rank})",
            6000 + t
        );
        clean_trials += 1;

        // perturb one entry of one map; every entry sits in at least one
        // relation, so exactly this must be reported
        let mut bad = d.clone();
        let entry = (t / 9) as usize;
        let mut hit = None;
        for shift in 0..9usize {
            let which = (t as usize + shift) % 9;
            if perturb(&mut bad, which, entry, &third) {
                hit = Some(which);
                break;
            }
        }
        let which = hit.expect("some map is nonempty");
        assert!(
            !bad.validate(&dc, tol).is_clean(),
            "[FAIL] criterion 6: false negative on {name} (seed {}, map {which}, entry {entry})",
            6000 + t
        );
        flagged_trials += 1;
    }
    println!(
        "[PASS] criterion 6: validator sound over {clean_trials} clean + {flagged_trials} \
         perturbed trials (0 false positives, 0 false negatives)"
    );
}

/// Multiply one stored entry of the `which`-th map by `c`; false if that map
/// is empty on this surface.
fn perturb(d: &mut OrientifoldDatum, which: usize, entry: usize, c: &Phase) -> bool {
    fn tweak_phase<K: Ord + Copy>(
        m: &mut std::collections::BTreeMap<K, Phase>,
        entry: usize,
        c: &Phase,
    ) -> bool {
        if m.is_empty() {
            return false;
        }
        let k = *m.keys().nth(entry % m.len()).unwrap();
        let v = m.get_mut(&k).unwrap();
        *v = v.mul(c);
        true
    }
    fn tweak_transport<K: Ord + Copy>(
        m: &mut std::collections::BTreeMap<K, Transport>,
        entry: usize,
        c: &Phase,
    ) -> bool {
        if m.is_empty() {
            return false;
        }
        let k = *m.keys().nth(entry % m.len()).unwrap();
        let v = m.get_mut(&k).unwrap();
        *v = v.scale(c);
        true
    }
    match which {
        0 => tweak_phase(&mut d.face_b, entry, c),
        1 => tweak_phase(&mut d.edge_a, entry, c),
        2 => tweak_phase(&mut d.g_v, entry, c),
        3 => tweak_phase(&mut d.edge_pi, entry, c),
        4 => tweak_phase(&mut d.chi_v, entry, c),
        5 => tweak_phase(&mut d.f_v, entry, c),
        6 => tweak_transport(&mut d.edge_t, entry, c),
        7 => tweak_transport(&mut d.g_big, entry, c),
        _ => tweak_transport(&mut d.h_big, entry, c),
    }
}

#[test]
fn criterion_7_cohomology_tables_and_oracle_agreement() {
    // fixed small tables, against both pipelines
    let plus = OrientifoldGroup::cyclic(2, false).unwrap();
    let minus = OrientifoldGroup::jandl();
    let known: Vec<(&OrientifoldGroup, usize, Vec<u64>)> = vec![
        (&plus, 1, vec![2]),
        (&minus, 2, vec![2]),
        (&minus, 3, vec![]),
        (&plus, 3, vec![2]),
    ];
    for (g, n, expect) in &known {
        let snf = cohomology(g, *n).expect("cohomology").invariant_factors;
        let brute = oracle::invariant_factors(g, *n);
        assert_eq!(&snf, expect, "[FAIL] criterion 7: H^{n} table (SNF)");
        assert_eq!(&brute, expect, "[FAIL] criterion 7: H^{n} table (oracle)");
    }

    // Z2 x Z2 with the projection character: SNF vs brute force
    let z2z2 = OrientifoldGroup::z2z2_projection();
    let mut z2z2_report = Vec::new();
    for n in [2usize, 3] {
        let snf = cohomology(&z2z2, n).expect("cohomology").invariant_factors;
        let brute = oracle::invariant_factors(&z2z2, n);
        assert_eq!(
            snf, brute,
            "[FAIL] criterion 7: H^{n}(Z2xZ2, projection) disagrees with the oracle"
        );
        z2z2_report.push(format!("H^{n}={snf:?}"));
    }

    // delta o delta = 0 on every basis cochain, |Gamma| <= 8
    let mut groups = vec![
        OrientifoldGroup::trivial(),
        plus.clone(),
        minus.clone(),
        OrientifoldGroup::cyclic(3, false).unwrap(),
        OrientifoldGroup::cyclic(4, false).unwrap(),
        OrientifoldGroup::cyclic(4, true).unwrap(),
        z2z2.clone(),
        OrientifoldGroup::cyclic(5, false).unwrap(),
        OrientifoldGroup::cyclic(6, false).unwrap(),
        OrientifoldGroup::cyclic(6, true).unwrap(),
        OrientifoldGroup::symmetric_3(),
        OrientifoldGroup::cyclic(7, false).unwrap(),
    ];
    groups.push(OrientifoldGroup::cyclic(8, false).unwrap());
    groups.push(OrientifoldGroup::cyclic(8, true).unwrap());
    let mut basis_checks = 0u64;
    for g in &groups {
        for degree in 0..=2usize {
            let slots = g.order().pow(degree as u32);
            for t in 0..slots {
                for m in [2i64, 3] {
                    let mut c = TwistedCochain::zero(g, degree);
                    c.values[t] = Phase::new(1, m).unwrap();
                    assert!(
                        delta(g, &delta(g, &c)).is_zero(),
                        "[FAIL] criterion 7: delta^2 != 0 (|G|={}, degree {degree}, slot {t})",
                        g.order()
                    );
                    basis_checks += 1;
                }
            }
        }
    }
    println!(
        "[PASS] criterion 7: cohomology tables match the brute-force oracle \
         (Z2 cases + Z2xZ2 {}); delta^2 = 0 on {basis_checks} basis cochains across \
         {} groups of order <= 8",
        z2z2_report.join(", "),
        groups.len()
    );
}

#[test]
fn criterion_8_klein_bottle_separates_the_two_twist_classes() {
    // the two degree-2 classes for the order-2 reflection group
    let classes = [None, Some(half())];

    // positive control: the same two classes are separated by exactly 1/2
    // on RP^2 and the Moebius strip
    for name in ["rp2", "mobius"] {
        let dc = build(name);
        let scheme = scheme_for(&dc);
        for seed in 0..5u64 {
            let mut values = Vec::new();
            for twist in &classes {
                let d = pure(&dc, &scheme, 1, 8000 + seed, twist.clone());
                let sw = holonomy_sweep(&d, &dc, EXHAUSTIVE_CAP, 1000, seed).expect("sweep");
                assert!(sw.invariant, "twisted holonomy not choice-invariant on {name}");
                values.push(exact(&sw.value).clone());
            }
            assert_eq!(
                values[1].mul(&values[0].inv()),
                half(),
                "control: twist classes should differ by 1/2 on {name}"
            );
        }
    }
    println!(
        "note: criterion 8 control — the two twist classes differ by exactly 1/2 \
         on RP2 and the Moebius strip, and every value is choice-invariant"
    );

    // the stated requirement, on the Klein bottle
    let dc = build("klein");
    let scheme = scheme_for(&dc);
    let mut values = Vec::new();
    for twist in &classes {
        let d = pure(&dc, &scheme, 1, 8100, twist.clone());
        let sw = holonomy_sweep(&d, &dc, EXHAUSTIVE_CAP, 1000, 8100).expect("sweep");
        assert!(sw.exhaustive, "Klein choice space should be exhaustible");
        assert!(sw.invariant, "twisted holonomy not choice-invariant on klein");
        values.push(exact(&sw.value).clone());
    }
    let shift = values[1].mul(&values[0].inv());
    assert_eq!(
        shift,
        half(),
        "[FAIL] criterion 8: on the Klein bottle the two twist classes yield \
         holonomies differing by {shift} instead of 1/2.  The twist multiplies the \
         holonomy by the class constant raised to the Euler characteristic mod 2; \
         chi(Klein) = 0, so the two classes are indistinguishable there (verified \
         exhaustively over all 1536 choices).  The 1/2 separation does hold on RP2 \
         and the Moebius strip (chi = 1), as checked above.  See README, \"Known \
         failures\".",
    );
    println!("[PASS] criterion 8: twist classes separated by 1/2 on the Klein bottle");
}

#[test]
fn criterion_9_descent_quotients_validate_and_roundtrip() {
    let group = OrientifoldGroup::z2z2_projection();
    // eight indices carrying the regular-ish free action: t flips the low
    // bit, k flips the middle bit
    let perms: Vec<Vec<usize>> = vec![
        (0..8).collect(),
        (0..8).map(|i| i ^ 2).collect(),
        (0..8).map(|i| i ^ 1).collect(),
        (0..8).map(|i| i ^ 3).collect(),
    ];
    let action = IndexAction::new(&group, perms).expect("action");

    // quotients of 100 random equivariant data pass the flat Jandl validator
    for seed in 0..100u64 {
        let with_module = seed % 2 == 0;
        let d = FlatEquivariantDatum::random(&group, &action, 1, with_module, seed)
            .expect("random equivariant datum");
        match quotient(&d).expect("quotient") {
            QuotientOutput::Jandl(j) => {
                let report = j.validate(0.0);
                assert!(
                    report.is_clean(),
                    "[FAIL] criterion 9: quotient fails the Jandl validator (seed {seed}): {:?}",
                    report.violations.first()
                );
            }
            QuotientOutput::Plain(_) => {
                panic!("[FAIL] criterion 9: reflection group must give a Jandl quotient")
            }
        }
    }

    // quotient o canonical_pullback = identity, exactly, on 100 random flat
    // Jandl data over the 4-point orbit space
    let involution = vec![1usize, 0, 3, 2];
    for seed in 0..100u64 {
        let with_module = seed % 2 == 1;
        let downstairs = FlatJandlDatum::random(involution.clone(), 1, with_module, 10_000 + seed)
            .expect("random Jandl datum");
        let upstairs =
            canonical_pullback(&downstairs, &group, &action).expect("canonical pullback");
        match quotient(&upstairs).expect("quotient") {
            QuotientOutput::Jandl(j) => assert_eq!(
                j, downstairs,
                "[FAIL] criterion 9: quotient(pullback(d)) != d (seed {})",
                10_000 + seed
            ),
            QuotientOutput::Plain(_) => {
                panic!("[FAIL] criterion 9: reflection group must give a Jandl quotient")
            }
        }
    }
    println!(
        "[PASS] criterion 9: 100 quotients validate cleanly; 100 pullback/quotient \
         roundtrips are exact"
    );
}
