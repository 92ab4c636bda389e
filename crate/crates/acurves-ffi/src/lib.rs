//! C ABI over the acurves library.
//!
//! Curves live behind the opaque [`AcCurve`] handle. Every fallible call
//! returns an [`AcStatus`]; on failure the message is available from
//! [`ac_last_error`] on the same thread until the next failing call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use acurves::degeneration::{self, ClosedStatus};
use acurves::{aut, canon, enumerate, Curve, Error};

/// Opaque curve handle.
pub struct AcCurve {
    curve: Curve,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AcStatus {
    Ok = 0,
    NullPointer = 1,
    Utf8 = 2,
    Document = 3,
    InvalidCurve = 4,
    NotStable = 5,
    MissingRole = 6,
    InvalidArgument = 7,
    ResourceBound = 8,
    Other = 9,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AcClosed {
    Closed = 0,
    NotClosed = 1,
    SpecialUnproven = 2,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn fail(err: Error) -> AcStatus {
    let status = match &err {
        Error::Document(_) => AcStatus::Document,
        Error::Invalid(_) | Error::UnknownSingularity(_) => AcStatus::InvalidCurve,
        Error::NotPrestable(_) | Error::NotStable(_) => AcStatus::NotStable,
        Error::MissingRole { .. } => AcStatus::MissingRole,
        Error::InvalidArgument(_) | Error::Profile(_) | Error::BadAssignment(_) => {
            AcStatus::InvalidArgument
        }
        Error::ResourceBound(_) => AcStatus::ResourceBound,
        Error::NoTorus => AcStatus::Other,
    };
    set_error(err.to_string());
    status
}

fn null() -> AcStatus {
    set_error("null pointer argument".into());
    AcStatus::NullPointer
}

/// Runs `f` on the curve behind `handle` and writes its result to `out`.
///
/// # Safety
/// `handle` must be null or a live handle and `out` null or writable.
unsafe fn with_curve<T>(
    handle: *const AcCurve,
    out: *mut T,
    f: impl FnOnce(&Curve) -> acurves::Result<T>,
) -> AcStatus {
    let (Some(h), false) = (handle.as_ref(), out.is_null()) else {
        return null();
    };
    match f(&h.curve) {
        Ok(v) => {
            out.write(v);
            AcStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Parses a curve document and returns a new handle in `out`.
///
/// # Safety
/// `json` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ac_curve_from_json(
    json: *const c_char,
    out: *mut *mut AcCurve,
) -> AcStatus {
    if json.is_null() || out.is_null() {
        return null();
    }
    let Ok(text) = CStr::from_ptr(json).to_str() else {
        set_error("document is not UTF-8".into());
        return AcStatus::Utf8;
    };
    let parsed = Curve::from_json(text).and_then(|c| match c.validate() {
        v if v.is_empty() => Ok(c),
        v => Err(Error::Invalid(v)),
    });
    match parsed {
        Ok(curve) => {
            out.write(Box::into_raw(Box::new(AcCurve { curve })));
            AcStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `handle` must be null or come from `ac_curve_from_json` and not be used again.
#[no_mangle]
pub unsafe extern "C" fn ac_curve_free(handle: *mut AcCurve) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// # Safety
/// `handle` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ac_curve_genus(handle: *const AcCurve, out: *mut u32) -> AcStatus {
    with_curve(handle, out, Curve::arithmetic_genus)
}

/// # Safety
/// `handle` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ac_curve_is_stable(
    handle: *const AcCurve,
    r: u32,
    out: *mut bool,
) -> AcStatus {
    with_curve(handle, out, |c| c.is_stable(r))
}

/// Torus rank and unipotent part of the identity component of the
/// automorphism group.
///
/// # Safety
/// `handle` must be a live handle; `torus_rank` and `unipotent` writable.
#[no_mangle]
pub unsafe extern "C" fn ac_curve_aut(
    handle: *const AcCurve,
    r: u32,
    torus_rank: *mut u32,
    unipotent: *mut bool,
) -> AcStatus {
    if unipotent.is_null() {
        return null();
    }
    with_curve(handle, torus_rank, |c| {
        let desc = aut::aut_identity_component(c, r)?;
        unipotent.write(desc.unipotent);
        Ok(desc.torus_rank)
    })
}

/// # Safety
/// `handle` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ac_curve_is_special(
    handle: *const AcCurve,
    r: u32,
    out: *mut bool,
) -> AcStatus {
    with_curve(handle, out, |c| degeneration::is_special(c, r))
}

/// # Safety
/// `handle` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ac_curve_closed_status(
    handle: *const AcCurve,
    r: u32,
    out: *mut AcClosed,
) -> AcStatus {
    with_curve(handle, out, |c| {
        Ok(match degeneration::closed_point_status(c, r)? {
            ClosedStatus::Closed => AcClosed::Closed,
            ClosedStatus::NotClosed => AcClosed::NotClosed,
            ClosedStatus::SpecialButConverseUnproven => AcClosed::SpecialUnproven,
        })
    })
}

/// Number of one-step isotrivial specializations.
///
/// # Safety
/// `handle` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ac_curve_move_count(
    handle: *const AcCurve,
    r: u32,
    out: *mut usize,
) -> AcStatus {
    with_curve(handle, out, |c| {
        Ok(degeneration::one_step_specializations(c, r)?.len())
    })
}

/// Canonically relabelled curve as JSON, to be released with `ac_string_free`.
///
/// # Safety
/// `handle` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ac_curve_canonical_json(
    handle: *const AcCurve,
    out: *mut *mut c_char,
) -> AcStatus {
    with_curve(handle, out, |c| {
        let (_, canon) = canon::canonicalize(c)?;
        Ok(CString::new(canon.to_json())
            .expect("json has no nul")
            .into_raw())
    })
}

/// Whether two curves are isomorphic as decorated curves.
///
/// # Safety
/// Both handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ac_curve_isomorphic(
    a: *const AcCurve,
    b: *const AcCurve,
    out: *mut bool,
) -> AcStatus {
    let Some(b) = b.as_ref() else {
        return null();
    };
    with_curve(a, out, |a| canon::isomorphic(a, &b.curve))
}

/// Number of stable types of genus `g` with `n` markings, singularities up
/// to `A_r` and at most `max_components` components.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ac_enumerate_count(
    g: u32,
    n: u32,
    r: u32,
    max_components: u32,
    out: *mut usize,
) -> AcStatus {
    if out.is_null() {
        return null();
    }
    match enumerate::enumerate_keyed(g, n, r, max_components) {
        Ok(types) => {
            out.write(types.len());
            AcStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or come from this library and not be used again.
#[no_mangle]
pub unsafe extern "C" fn ac_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ac_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn handle(json: &str) -> *mut AcCurve {
        let text = CString::new(json).unwrap();
        let mut h = ptr::null_mut();
        assert_eq!(
            unsafe { ac_curve_from_json(text.as_ptr(), &mut h) },
            AcStatus::Ok
        );
        h
    }

    fn even_atom_json(h: u32) -> String {
        acurves::catalog::even_atom(h, false).to_json()
    }

    #[test]
    fn genus_and_aut_of_even_atom() {
        let h = handle(&even_atom_json(3));
        let (mut g, mut stable, mut rank, mut uni) = (0, false, 0, true);
        unsafe {
            assert_eq!(ac_curve_genus(h, &mut g), AcStatus::Ok);
            assert_eq!(ac_curve_is_stable(h, 6, &mut stable), AcStatus::Ok);
            assert_eq!(ac_curve_aut(h, 6, &mut rank, &mut uni), AcStatus::Ok);
            ac_curve_free(h);
        }
        assert_eq!(g, 3);
        assert!(stable);
        assert_eq!((rank, uni), (1, false));
    }

    #[test]
    fn closed_status_and_moves() {
        let h = handle(&even_atom_json(2));
        let mut status = AcClosed::NotClosed;
        let mut moves = 9;
        unsafe {
            assert_eq!(ac_curve_closed_status(h, 4, &mut status), AcStatus::Ok);
            assert_eq!(ac_curve_move_count(h, 4, &mut moves), AcStatus::Ok);
            ac_curve_free(h);
        }
        assert_eq!(status, AcClosed::Closed);
        assert_eq!(moves, 0);
    }

    #[test]
    fn errors_are_reported() {
        let text = CString::new("{\"components\": 3}").unwrap();
        let mut h = ptr::null_mut();
        let status = unsafe { ac_curve_from_json(text.as_ptr(), &mut h) };
        assert_eq!(status, AcStatus::Document);
        assert!(h.is_null());
        assert!(!ac_last_error().is_null());

        let h = handle(&even_atom_json(1));
        let mut stable = true;
        unsafe {
            assert_eq!(ac_curve_is_stable(h, 2, &mut stable), AcStatus::Ok);
            assert!(!stable);
            let mut special = false;
            assert_eq!(ac_curve_is_special(h, 2, &mut special), AcStatus::NotStable);
            assert_eq!(ac_curve_is_stable(h, 1, &mut stable), AcStatus::NotStable);
            assert_eq!(
                ac_curve_genus(ptr::null(), ptr::null_mut()),
                AcStatus::NullPointer
            );
            ac_curve_free(h);
        }
        let mut count = 0;
        assert_eq!(
            unsafe { ac_enumerate_count(9, 0, 3, 2, &mut count) },
            AcStatus::ResourceBound
        );
    }

    #[test]
    fn canonical_json_round_trip() {
        let a = handle(&even_atom_json(2));
        let mut s = ptr::null_mut();
        let mut iso = false;
        unsafe {
            assert_eq!(ac_curve_canonical_json(a, &mut s), AcStatus::Ok);
            let b = handle(CStr::from_ptr(s).to_str().unwrap());
            assert_eq!(ac_curve_isomorphic(a, b, &mut iso), AcStatus::Ok);
            ac_string_free(s);
            ac_curve_free(a);
            ac_curve_free(b);
        }
        assert!(iso);
    }
}
