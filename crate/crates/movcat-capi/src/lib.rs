//! C ABI for the movcat toolkit.
//!
//! Workspaces are opaque handles; strings cross the boundary as
//! NUL-terminated UTF-8.  Strings returned through out-parameters are
//! owned by the caller and released with [`movcat_string_free`];
//! handles are released with [`movcat_workspace_free`].
//!
//! Functions report a [`MovcatStatus`].  The first three variants
//! mirror the command-line exit statuses; the rest are API-level
//! failures.  On any non-`Ok` outcome a human-readable message is
//! stored per thread and retrieved with [`movcat_last_error`].
//! Every entry point catches panics and turns them into
//! [`MovcatStatus::Panic`] rather than unwinding across the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use movcat::cli;
use movcat::movability::{decide_movable, decide_uniformly_movable};
use movcat::workspace::{parse_workspace, witness_entry, WorkspaceFile};
use movcat::{fincat, shipped};

/// Outcome of a call.  `Ok`, `Refuted` and `Invalid` match the
/// command-line exit statuses `0`, `1` and `2`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MovcatStatus {
    /// The property holds or the construction succeeded.
    Ok = 0,
    /// The property was refuted; the report carries a certificate.
    Refuted = 1,
    /// The input was invalid.
    Invalid = 2,
    /// A required pointer argument was null.
    NullArgument = 3,
    /// A string argument was not valid UTF-8.
    BadUtf8 = 4,
    /// A panic was caught at the boundary; see `movcat_last_error`.
    Panic = 5,
}

/// An opaque, loaded workspace.
pub struct MovcatWorkspace {
    inner: WorkspaceFile,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).expect("nul bytes replaced");
    });
}

fn clear_error() {
    LAST_ERROR.with(|slot| slot.borrow_mut().clear_with_default());
}

trait ClearWithDefault {
    fn clear_with_default(&mut self);
}

impl ClearWithDefault for CString {
    fn clear_with_default(&mut self) {
        *self = CString::default();
    }
}

fn guarded(body: impl FnOnce() -> MovcatStatus) -> MovcatStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(panic) => {
            let message = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic with a non-string payload".to_string());
            set_error(&message);
            MovcatStatus::Panic
        }
    }
}

/// Reads a required `*const c_char` argument as UTF-8.
unsafe fn read_str<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, MovcatStatus> {
    if ptr.is_null() {
        set_error(&format!("`{what}` is null"));
        return Err(MovcatStatus::NullArgument);
    }
    match CStr::from_ptr(ptr).to_str() {
        Ok(s) => Ok(s),
        Err(_) => {
            set_error(&format!("`{what}` is not valid UTF-8"));
            Err(MovcatStatus::BadUtf8)
        }
    }
}

fn give_string(out: *mut *mut c_char, s: String) {
    if out.is_null() {
        return;
    }
    let c = CString::new(s.replace('\0', " ")).expect("nul bytes replaced");
    unsafe { *out = c.into_raw() };
}

/// The most recent error message on this thread, as a string the
/// caller owns (release with `movcat_string_free`).  Empty when the
/// last call succeeded.
#[no_mangle]
pub extern "C" fn movcat_last_error() -> *mut c_char {
    LAST_ERROR.with(|slot| {
        CString::new(slot.borrow().as_bytes()).expect("stored error has no nul").into_raw()
    })
}

/// Releases a string returned by this library.  Null is ignored.
///
/// # Safety
/// `s` must be a pointer previously returned by this library and not
/// yet freed.
#[no_mangle]
pub unsafe extern "C" fn movcat_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses workspace text into a fresh handle.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be a valid
/// pointer to receive the handle.
#[no_mangle]
pub unsafe extern "C" fn movcat_workspace_parse(
    text: *const c_char,
    out: *mut *mut MovcatWorkspace,
) -> MovcatStatus {
    guarded(|| {
        clear_error();
        if out.is_null() {
            set_error("`out` is null");
            return MovcatStatus::NullArgument;
        }
        *out = ptr::null_mut();
        let text = match read_str(text, "text") {
            Ok(s) => s,
            Err(status) => return status,
        };
        match parse_workspace(text) {
            Ok(ws) => {
                *out = Box::into_raw(Box::new(MovcatWorkspace { inner: ws }));
                MovcatStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                MovcatStatus::Invalid
            }
        }
    })
}

/// A handle holding the fixture set shipped inside the library.
///
/// # Safety
/// `out` must be a valid pointer to receive the handle.
#[no_mangle]
pub unsafe extern "C" fn movcat_workspace_embedded(out: *mut *mut MovcatWorkspace) -> MovcatStatus {
    guarded(|| {
        clear_error();
        if out.is_null() {
            set_error("`out` is null");
            return MovcatStatus::NullArgument;
        }
        *out = Box::into_raw(Box::new(MovcatWorkspace { inner: shipped::embedded_workspace() }));
        MovcatStatus::Ok
    })
}

/// Parses `text` and merges its entries into an existing handle.  On
/// any failure the handle is left unchanged.
///
/// # Safety
/// `ws` must be a live handle from this library; `text` a
/// NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn movcat_workspace_extend(
    ws: *mut MovcatWorkspace,
    text: *const c_char,
) -> MovcatStatus {
    guarded(|| {
        clear_error();
        if ws.is_null() {
            set_error("`ws` is null");
            return MovcatStatus::NullArgument;
        }
        let text = match read_str(text, "text") {
            Ok(s) => s,
            Err(status) => return status,
        };
        let part = match parse_workspace(text) {
            Ok(part) => part,
            Err(e) => {
                set_error(&e.to_string());
                return MovcatStatus::Invalid;
            }
        };
        let ws = &mut *ws;
        match shipped::merge(vec![ws.inner.clone(), part]) {
            Ok(merged) => {
                ws.inner = merged;
                MovcatStatus::Ok
            }
            Err(message) => {
                set_error(&message);
                MovcatStatus::Invalid
            }
        }
    })
}

/// Releases a workspace handle.  Null is ignored.
///
/// # Safety
/// `ws` must be a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn movcat_workspace_free(ws: *mut MovcatWorkspace) {
    if !ws.is_null() {
        drop(Box::from_raw(ws));
    }
}

fn verdict_status(code: i32) -> MovcatStatus {
    match code {
        0 => MovcatStatus::Ok,
        1 => MovcatStatus::Refuted,
        _ => MovcatStatus::Invalid,
    }
}

/// Runs one command — the same surface as the command-line tool, given
/// as `argc` arguments like `"check-movable", "--cat", "FIX-A",
/// "--object", "s1"` — against the workspace, writing the JSON report
/// to `report_out`.  The status mirrors the exit status; a usage error
/// is `Invalid` with no report.
///
/// # Safety
/// `ws` must be a live handle; `argv` must point to `argc` valid
/// NUL-terminated strings; `report_out` must be valid to receive a
/// string or null if the report is not wanted.
#[no_mangle]
pub unsafe extern "C" fn movcat_run_json(
    ws: *const MovcatWorkspace,
    argv: *const *const c_char,
    argc: usize,
    report_out: *mut *mut c_char,
) -> MovcatStatus {
    guarded(|| {
        clear_error();
        if !report_out.is_null() {
            *report_out = ptr::null_mut();
        }
        if ws.is_null() {
            set_error("`ws` is null");
            return MovcatStatus::NullArgument;
        }
        if argv.is_null() && argc > 0 {
            set_error("`argv` is null");
            return MovcatStatus::NullArgument;
        }
        let mut args = Vec::with_capacity(argc);
        for i in 0..argc {
            match read_str(*argv.add(i), &format!("argv[{i}]")) {
                Ok(s) => args.push(s.to_string()),
                Err(status) => return status,
            }
        }
        let ws = &(*ws).inner;
        match cli::run_args(ws, args) {
            Ok(report) => {
                if let Some(cert) = &report.certificate {
                    set_error(cert);
                } else if let Some(error) = &report.error {
                    set_error(error);
                }
                let doc = serde_json::to_string(&report).expect("reports serialize");
                give_string(report_out, doc);
                verdict_status(report.exit_code())
            }
            Err(usage) => {
                set_error(&usage);
                MovcatStatus::Invalid
            }
        }
    })
}

/// Decides movability (uniform movability with `uniform`) of `object`
/// in `category`.  On `Ok` writes the witness as JSON; on `Refuted`
/// writes the refutation as JSON and stores the certificate as the
/// last error.
///
/// # Safety
/// `ws` must be a live handle; `category` and `object` NUL-terminated
/// strings; `json_out` valid to receive a string, or null.
#[no_mangle]
pub unsafe extern "C" fn movcat_check_movable(
    ws: *const MovcatWorkspace,
    category: *const c_char,
    object: *const c_char,
    uniform: bool,
    json_out: *mut *mut c_char,
) -> MovcatStatus {
    guarded(|| {
        clear_error();
        if !json_out.is_null() {
            *json_out = ptr::null_mut();
        }
        if ws.is_null() {
            set_error("`ws` is null");
            return MovcatStatus::NullArgument;
        }
        let category = match read_str(category, "category") {
            Ok(s) => s,
            Err(status) => return status,
        };
        let object = match read_str(object, "object") {
            Ok(s) => s,
            Err(status) => return status,
        };
        let ws = &(*ws).inner;
        let cat: fincat::FinCategory = match ws.build_category(category) {
            Ok(cat) => cat,
            Err(e) => {
                set_error(&e.to_string());
                return MovcatStatus::Invalid;
            }
        };
        let x = match cat.object(object) {
            Ok(x) => x,
            Err(e) => {
                set_error(&e.to_string());
                return MovcatStatus::Invalid;
            }
        };
        let outcome = if uniform {
            decide_uniformly_movable(&cat, x).map(|w| w.0)
        } else {
            decide_movable(&cat, x)
        };
        match outcome {
            Ok(w) => {
                let entry = witness_entry(&cat, object, &w, uniform);
                give_string(json_out, serde_json::to_string(&entry).expect("entries serialize"));
                MovcatStatus::Ok
            }
            Err(r) => {
                set_error(&r.to_string());
                give_string(json_out, serde_json::to_string(&r).expect("refutations serialize"));
                MovcatStatus::Refuted
            }
        }
    })
}
