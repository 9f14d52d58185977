//! C ABI over the orientifold holonomy library.
//!
//! The surface is deliberately small: load or generate a scene behind an
//! opaque [`OfScene`] handle, validate it, evaluate holonomy (exact angle
//! or complex value), and run the cohomology and descent pipelines through
//! JSON strings in the same schemas the CLI uses.
//!
//! Conventions, mirrored in `include/orientifold.h`:
//!
//! * every fallible call returns an [`OfStatus`]; `OF_STATUS_OK` is 0 and
//!   the semantic/input codes match the CLI exit codes (1 and 2),
//! * on any non-OK return, [`of_last_error`] gives a message describing
//!   what went wrong (thread-local, valid until the next failing call on
//!   the same thread),
//! * strings returned through `char **` are owned by the caller and must
//!   be released with [`of_string_free`]; handles with [`of_scene_free`],
//! * all entry points catch panics and turn them into `OF_STATUS_PANIC`
//!   rather than unwinding across the boundary.
//!
//! `include/orientifold.h` is maintained by hand against this file (the
//! build environment pins its dependency set, so the header is committed
//! rather than generated); `tests/ffi.rs` compiles and runs a C program
//! against it to keep the two in sync.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use orientifold::cohomology::{cohomology, TwistedCochain};
use orientifold::cover::{canonical_choice, DoubleCover, Surface, SurfaceSpec};
use orientifold::data::generate_pure_gauge;
use orientifold::descent::{quotient, QuotientOutput};
use orientifold::group::OrientifoldGroup;
use orientifold::holonomy::{holonomy, holonomy_sweep, HolonomyValue};
use orientifold::phase::Phase;
use orientifold::scene::{
    default_scheme, group_ref, load_scene, to_canonical_json, CochainWire, CohomologyFile,
    DescendFile, FlatFile, LoadedScene, ValidationFile, SCHEMA_COHOMOLOGY, SCHEMA_DESCEND,
    SCHEMA_FLAT, SCHEMA_VALIDATION, SWEEP_ALL_CAP,
};

/// Status codes shared by every fallible entry point.
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OfStatus {
    /// success
    Ok = 0,
    /// the inputs were well-formed but the mathematics refused them
    /// (validation failure, non-invariant sweep, ...)
    Fail = 1,
    /// malformed input: missing file, bad JSON, unknown name, bad argument
    Input = 2,
    /// a required pointer argument was null
    NullArg = 3,
    /// a `char *` argument was not valid UTF-8
    Utf8 = 4,
    /// an internal panic was caught at the boundary
    Panic = 5,
}

/// Opaque scene handle: a built double cover plus a local datum on it.
pub struct OfScene {
    loaded: LoadedScene,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let owned = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = owned);
}

fn fail(code: OfStatus, msg: &str) -> OfStatus {
    set_error(msg);
    code
}

fn guard<F: FnOnce() -> OfStatus>(f: F) -> OfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(OfStatus::Panic, "internal panic caught at the FFI boundary"),
    }
}

/// `Ok(s)` if `ptr` is a readable UTF-8 C string.
unsafe fn read_str<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, OfStatus> {
    if ptr.is_null() {
        return Err(fail(OfStatus::NullArg, &format!("{what} is null")));
    }
    unsafe { CStr::from_ptr(ptr) }
        .to_str()
        .map_err(|_| fail(OfStatus::Utf8, &format!("{what} is not valid UTF-8")))
}

fn give_string(out: *mut *mut c_char, s: String) -> OfStatus {
    let c = match CString::new(s) {
        Ok(c) => c,
        Err(_) => return fail(OfStatus::Panic, "interior NUL in produced string"),
    };
    unsafe { *out = c.into_raw() };
    OfStatus::Ok
}

fn scene_error(e: &orientifold::scene::SceneError) -> OfStatus {
    let code = if e.exit_code() == 1 { OfStatus::Fail } else { OfStatus::Input };
    fail(code, &e.to_string())
}

/// Message for the most recent failure on this thread.  Empty until a call
/// fails; the pointer stays valid until the next failing call on the same
/// thread.
#[no_mangle]
pub extern "C" fn of_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn of_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Releases a string returned through a `char **` out-parameter.
///
/// # Safety
///
/// `s` must be null or a pointer previously returned by this library; it
/// must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn of_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Loads a scene file (schema `orientifold/scene/1`), resolving referenced
/// surface/datum/choice files against the scene's directory and generating
/// a pure-gauge datum when none is referenced.
///
/// # Safety
///
/// `path` must be a readable NUL-terminated string and `out` a valid
/// location for one pointer.  On `OF_STATUS_OK`, `*out` owns the scene and
/// must be released with [`of_scene_free`].
#[no_mangle]
pub unsafe extern "C" fn of_scene_load(path: *const c_char, out: *mut *mut OfScene) -> OfStatus {
    guard(|| {
        if out.is_null() {
            return fail(OfStatus::NullArg, "out is null");
        }
        let path = match unsafe { read_str(path, "path") } {
            Ok(s) => s,
            Err(code) => return code,
        };
        let (file, base) = match load_scene(Path::new(path)) {
            Ok(v) => v,
            Err(e) => return scene_error(&e),
        };
        match file.resolve(&base, None, None) {
            Ok(loaded) => {
                unsafe { *out = Box::into_raw(Box::new(OfScene { loaded })) };
                OfStatus::Ok
            }
            Err(e) => scene_error(&e),
        }
    })
}

/// Builds a named surface model (`"klein"`, `"rp2"`, `"mobius"`, ...) and
/// generates a rank-`rank` pure-gauge datum on it, optionally twisted by
/// the degree-2 class with constant `twist` (a rational angle like
/// `"1/2"`; pass null for the trivial class).
///
/// # Safety
///
/// `surface` must be a readable NUL-terminated string, `twist` null or the
/// same, and `out` a valid location for one pointer.  On `OF_STATUS_OK`,
/// `*out` must be released with [`of_scene_free`].
#[no_mangle]
pub unsafe extern "C" fn of_scene_generate(
    surface: *const c_char,
    rank: u32,
    seed: u64,
    twist: *const c_char,
    out: *mut *mut OfScene,
) -> OfStatus {
    guard(|| {
        if out.is_null() {
            return fail(OfStatus::NullArg, "out is null");
        }
        let name = match unsafe { read_str(surface, "surface") } {
            Ok(s) => s,
            Err(code) => return code,
        };
        if rank == 0 {
            return fail(OfStatus::Input, "rank must be at least 1");
        }
        let spec = match SurfaceSpec::named(name) {
            Ok(s) => s,
            Err(e) => return fail(OfStatus::Input, &e.to_string()),
        };
        let cover = match Surface::build(&spec).and_then(DoubleCover::new) {
            Ok(c) => c,
            Err(e) => return fail(OfStatus::Input, &e.to_string()),
        };
        let scheme = default_scheme(&cover);
        let twist_data = if twist.is_null() {
            None
        } else {
            let text = match unsafe { read_str(twist, "twist") } {
                Ok(s) => s,
                Err(code) => return code,
            };
            let c: Phase = match text.parse() {
                Ok(p) => p,
                Err(e) => return fail(OfStatus::Input, &format!("twist: {e}")),
            };
            let g = OrientifoldGroup::jandl();
            let mut cochain = TwistedCochain::zero(&g, 2);
            cochain.set(&g, &[1, 1], c);
            Some((g, cochain))
        };
        let datum = match generate_pure_gauge(
            &cover,
            &scheme,
            rank as usize,
            seed,
            twist_data.as_ref().map(|(g, c)| (g, c)),
        ) {
            Ok(d) => d,
            Err(e) => return fail(OfStatus::Input, &e.to_string()),
        };
        let loaded = LoadedScene {
            cover,
            datum,
            choice: None,
            group: None,
            seed,
            rank: rank as usize,
            datum_from_file: false,
        };
        unsafe { *out = Box::into_raw(Box::new(OfScene { loaded })) };
        OfStatus::Ok
    })
}

/// Releases a scene handle; null is a no-op.
///
/// # Safety
///
/// `scene` must be null or a pointer from [`of_scene_load`] /
/// [`of_scene_generate`], and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn of_scene_free(scene: *mut OfScene) {
    if !scene.is_null() {
        drop(unsafe { Box::from_raw(scene) });
    }
}

/// Bundle rank of the scene's datum, or 0 if `scene` is null.
///
/// # Safety
///
/// `scene` must be null or a live scene handle.
#[no_mangle]
pub unsafe extern "C" fn of_scene_rank(scene: *const OfScene) -> u32 {
    if scene.is_null() {
        return 0;
    }
    unsafe { &*scene }.loaded.datum.rank as u32
}

unsafe fn borrow_scene<'a>(scene: *const OfScene) -> Result<&'a LoadedScene, OfStatus> {
    if scene.is_null() {
        return Err(fail(OfStatus::NullArg, "scene is null"));
    }
    Ok(&unsafe { &*scene }.loaded)
}

fn validation_report(loaded: &LoadedScene, tolerance: f64) -> ValidationFile {
    let report = loaded.datum.validate(&loaded.cover, tolerance);
    ValidationFile {
        schema: SCHEMA_VALIDATION.into(),
        rank: loaded.datum.rank,
        clean: report.is_clean(),
        violations: report.violations,
    }
}

/// Runs the full validator at the given tolerance (rank-1 data are exact;
/// 1e-9 is the conventional tolerance for matrix ranks) and sets `*clean`.
///
/// # Safety
///
/// `scene` must be a live scene handle and `clean` a valid `bool` slot.
#[no_mangle]
pub unsafe extern "C" fn of_validate(
    scene: *const OfScene,
    tolerance: f64,
    clean: *mut bool,
) -> OfStatus {
    guard(|| {
        if clean.is_null() {
            return fail(OfStatus::NullArg, "clean is null");
        }
        let loaded = match unsafe { borrow_scene(scene) } {
            Ok(l) => l,
            Err(code) => return code,
        };
        unsafe { *clean = validation_report(loaded, tolerance).clean };
        OfStatus::Ok
    })
}

/// Like [`of_validate`] but returns the full validation report as
/// canonical JSON (schema `orientifold/validation-report/1`).
///
/// # Safety
///
/// `scene` must be a live scene handle and `out` a valid `char *` slot;
/// release `*out` with [`of_string_free`].
#[no_mangle]
pub unsafe extern "C" fn of_validation_json(
    scene: *const OfScene,
    tolerance: f64,
    out: *mut *mut c_char,
) -> OfStatus {
    guard(|| {
        if out.is_null() {
            return fail(OfStatus::NullArg, "out is null");
        }
        let loaded = match unsafe { borrow_scene(scene) } {
            Ok(l) => l,
            Err(code) => return code,
        };
        give_string(out, to_canonical_json(&validation_report(loaded, tolerance)))
    })
}

fn checked_holonomy(loaded: &LoadedScene) -> Result<HolonomyValue, OfStatus> {
    let tol = if loaded.datum.rank == 1 { 0.0 } else { 1e-9 };
    if !loaded.datum.validate(&loaded.cover, tol).is_clean() {
        return Err(fail(OfStatus::Fail, "datum fails validation; holonomy refused"));
    }
    let choice = match &loaded.choice {
        Some(c) => c.clone(),
        None => canonical_choice(&loaded.cover, &loaded.datum.scheme),
    };
    holonomy(&loaded.datum, &loaded.cover, &choice).map_err(|e| fail(OfStatus::Fail, &e.to_string()))
}

/// Evaluates holonomy at the scene's domain choice (or the canonical one)
/// and writes the value as a complex number.  Exact rank-1 angles are
/// converted with `exp(2 pi i angle)`.
///
/// # Safety
///
/// `scene` must be a live scene handle; `re` and `im` valid `double`
/// slots.
#[no_mangle]
pub unsafe extern "C" fn of_holonomy(
    scene: *const OfScene,
    re: *mut f64,
    im: *mut f64,
) -> OfStatus {
    guard(|| {
        if re.is_null() || im.is_null() {
            return fail(OfStatus::NullArg, "re/im is null");
        }
        let loaded = match unsafe { borrow_scene(scene) } {
            Ok(l) => l,
            Err(code) => return code,
        };
        let z = match checked_holonomy(loaded) {
            Ok(HolonomyValue::Exact(p)) => p.to_complex(),
            Ok(HolonomyValue::Complex(z)) => z,
            Err(code) => return code,
        };
        unsafe {
            *re = z.re;
            *im = z.im;
        }
        OfStatus::Ok
    })
}

/// Evaluates rank-1 holonomy and returns the exact angle as a rational
/// string like `"3/4"`.  Fails with `OF_STATUS_FAIL` when the value is not
/// exact (rank at least 2).
///
/// # Safety
///
/// `scene` must be a live scene handle and `out` a valid `char *` slot;
/// release `*out` with [`of_string_free`].
#[no_mangle]
pub unsafe extern "C" fn of_holonomy_angle(
    scene: *const OfScene,
    out: *mut *mut c_char,
) -> OfStatus {
    guard(|| {
        if out.is_null() {
            return fail(OfStatus::NullArg, "out is null");
        }
        let loaded = match unsafe { borrow_scene(scene) } {
            Ok(l) => l,
            Err(code) => return code,
        };
        match checked_holonomy(loaded) {
            Ok(HolonomyValue::Exact(p)) => give_string(out, p.to_string()),
            Ok(HolonomyValue::Complex(_)) => {
                fail(OfStatus::Fail, "holonomy is not exact at rank >= 2")
            }
            Err(code) => code,
        }
    })
}

/// Sweeps the space of domain choices: exhaustively when it has at most
/// 2^20 points, otherwise over `samples` seeded draws.  Sets whether the
/// value was invariant, how many choices were visited, and whether the
/// sweep was exhaustive.
///
/// # Safety
///
/// `scene` must be a live scene handle; `invariant`, `swept` and
/// `exhaustive` valid slots of the respective types.
#[no_mangle]
pub unsafe extern "C" fn of_holonomy_sweep(
    scene: *const OfScene,
    samples: u64,
    invariant: *mut bool,
    swept: *mut u64,
    exhaustive: *mut bool,
) -> OfStatus {
    guard(|| {
        if invariant.is_null() || swept.is_null() || exhaustive.is_null() {
            return fail(OfStatus::NullArg, "invariant/swept/exhaustive is null");
        }
        let loaded = match unsafe { borrow_scene(scene) } {
            Ok(l) => l,
            Err(code) => return code,
        };
        let tol = if loaded.datum.rank == 1 { 0.0 } else { 1e-9 };
        if !loaded.datum.validate(&loaded.cover, tol).is_clean() {
            return fail(OfStatus::Fail, "datum fails validation; sweep refused");
        }
        let report = match holonomy_sweep(
            &loaded.datum,
            &loaded.cover,
            SWEEP_ALL_CAP,
            samples as usize,
            loaded.seed,
        ) {
            Ok(r) => r,
            Err(e) => return fail(OfStatus::Fail, &e.to_string()),
        };
        unsafe {
            *invariant = report.invariant;
            *swept = report.choices_swept as u64;
            *exhaustive = report.exhaustive;
        }
        if report.invariant {
            OfStatus::Ok
        } else {
            fail(OfStatus::Fail, "holonomy varies across domain choices")
        }
    })
}

/// Computes twisted group cohomology for a named group (`"jandl"`,
/// `"z2z2-projection"`, `"cyclic-N"`, `"reflecting-cyclic-N"`, ...) or a
/// group file path, in the given degree (1 to 3), and returns the report
/// as canonical JSON (schema `orientifold/cohomology-report/1`).
///
/// # Safety
///
/// `group` must be a readable NUL-terminated string and `out` a valid
/// `char *` slot; release `*out` with [`of_string_free`].
#[no_mangle]
pub unsafe extern "C" fn of_cohomology_json(
    group: *const c_char,
    degree: u32,
    out: *mut *mut c_char,
) -> OfStatus {
    guard(|| {
        if out.is_null() {
            return fail(OfStatus::NullArg, "out is null");
        }
        let arg = match unsafe { read_str(group, "group") } {
            Ok(s) => s,
            Err(code) => return code,
        };
        let g = match group_ref(arg) {
            Ok(g) => g,
            Err(e) => return scene_error(&e),
        };
        let h = match cohomology(&g, degree as usize) {
            Ok(h) => h,
            Err(e) => return fail(OfStatus::Input, &e.to_string()),
        };
        let report = CohomologyFile {
            schema: SCHEMA_COHOMOLOGY.into(),
            group: arg.to_string(),
            epsilon: (0..g.order()).map(|a| g.epsilon(a)).collect(),
            degree: degree as usize,
            order: h.order(),
            invariant_factors: h.invariant_factors.clone(),
            representatives: h.representatives.iter().map(CochainWire::from_cochain).collect(),
        };
        give_string(out, to_canonical_json(&report))
    })
}

/// Quotients a flat equivariant datum (schema
/// `orientifold/flat-equivariant/1`, passed as a JSON string) down the
/// free kernel action and returns the descent report with the resulting
/// flat Jandl or plain gerbe datum embedded (schema
/// `orientifold/descend-report/1`).
///
/// Returns `OF_STATUS_FAIL` when the input or the quotient fails its
/// validator; `OF_STATUS_INPUT` for malformed JSON or shape mismatches.
///
/// # Safety
///
/// `flat_json` must be a readable NUL-terminated string and `out` a valid
/// `char *` slot; release `*out` with [`of_string_free`].
#[no_mangle]
pub unsafe extern "C" fn of_descend_json(
    flat_json: *const c_char,
    out: *mut *mut c_char,
) -> OfStatus {
    guard(|| {
        if out.is_null() {
            return fail(OfStatus::NullArg, "out is null");
        }
        let text = match unsafe { read_str(flat_json, "flat_json") } {
            Ok(s) => s,
            Err(code) => return code,
        };
        let file: FlatFile = match serde_json::from_str(text) {
            Ok(f) => f,
            Err(e) => return fail(OfStatus::Input, &format!("flat datum: {e}")),
        };
        if file.schema != SCHEMA_FLAT {
            return fail(
                OfStatus::Input,
                &format!("flat datum: schema {:?}, want {SCHEMA_FLAT:?}", file.schema),
            );
        }
        let input_report = file.datum.validate(1e-9);
        if !input_report.is_clean() {
            return fail(OfStatus::Fail, "equivariant datum fails validation; descent refused");
        }
        let (kind, clean, violations, jandl, plain) = match quotient(&file.datum) {
            Ok(QuotientOutput::Jandl(j)) => {
                let r = j.validate(1e-9);
                ("jandl", r.is_clean(), r.violations, Some(j), None)
            }
            Ok(QuotientOutput::Plain(p)) => {
                let r = p.validate(1e-9);
                ("plain", r.is_clean(), r.violations, None, Some(p))
            }
            Err(e) => {
                let as_scene = orientifold::scene::SceneError::Descent(e);
                return scene_error(&as_scene);
            }
        };
        let report = DescendFile {
            schema: SCHEMA_DESCEND.into(),
            kind: kind.into(),
            clean,
            violations,
            written: None,
            jandl,
            plain,
        };
        let json = to_canonical_json(&report);
        if clean {
            give_string(out, json)
        } else {
            let _ = give_string(out, json);
            fail(OfStatus::Fail, "quotient fails the flat validator")
        }
    })
}
