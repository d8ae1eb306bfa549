//! C ABI for the plumbstein library. Graphs travel as opaque handles;
//! results come back as UTF-8 strings (JSON or decimal) allocated by Rust
//! and released with [`ps_string_free`]. Functions return a [`PsStatus`];
//! on failure, [`ps_last_error`] yields a human-readable message.
//!
//! Status codes mirror the CLI exit codes: 1 validation failure, 2 parse
//! error, 3 unsupported shape.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use plumbstein::graph::{decompose, torus_classes, validate, PlumbingGraph, ViolationKind};
use plumbstein::stein::{assemble, enumerate_stein, lower_bound, DiagramError};
use plumbstein::torsion::{detect_family_y, mintwist_upper_bound, torsion_upper_bound};
use plumbstein::wrap::{wrap, WrapError};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsStatus {
    Ok = 0,
    ValidationFailed = 1,
    ParseError = 2,
    UnsupportedShape = 3,
    NullPointer = 4,
    InvalidUtf8 = 5,
    InternalError = 6,
}

/// Counting modes for [`ps_graph_count`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsCountMode {
    /// Product of (a_v - 1): the Stein fillable lower bound.
    Lower = 0,
    /// Minimally twisting upper bound (four-legged chain family only).
    Mintwist = 1,
    /// m/2-twisting upper bound (four-legged chain family only).
    Torsion = 2,
}

/// Opaque parsed plumbing graph.
pub struct PsGraph {
    inner: PlumbingGraph,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let cstring = CString::new(message.replace('\0', " "))
        .unwrap_or_else(|_| CString::new("error").expect("static"));
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(cstring));
}

fn clear_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

fn string_out(text: String, out: *mut *mut c_char) -> PsStatus {
    match CString::new(text) {
        Ok(cstring) => {
            unsafe { *out = cstring.into_raw() };
            PsStatus::Ok
        }
        Err(_) => {
            set_error("result contained an interior NUL byte".into());
            PsStatus::InternalError
        }
    }
}

fn graph_ref<'a>(graph: *const PsGraph) -> Option<&'a PlumbingGraph> {
    unsafe { graph.as_ref() }.map(|g| &g.inner)
}

fn validation_status(g: &PlumbingGraph) -> Option<PsStatus> {
    let report = validate(g);
    if report.ok {
        return None;
    }
    set_error(serde_json::to_string(&report).unwrap_or_default());
    Some(if report.has(ViolationKind::ValenceExceeded) {
        PsStatus::UnsupportedShape
    } else {
        PsStatus::ValidationFailed
    })
}

/// Last error message for this thread, or NULL when the previous call
/// succeeded. Free with [`ps_string_free`].
#[no_mangle]
pub extern "C" fn ps_last_error() -> *mut c_char {
    LAST_ERROR.with(|slot| match slot.borrow().as_ref() {
        Some(msg) => msg.clone().into_raw(),
        None => ptr::null_mut(),
    })
}

/// Frees a string returned by this library. NULL is accepted.
///
/// # Safety
/// `text` must have been allocated by this library and not freed before.
#[no_mangle]
pub unsafe extern "C" fn ps_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(unsafe { CString::from_raw(text) });
    }
}

/// Parses a graph file (NUL-terminated UTF-8). On success `*out` owns a
/// handle that must be released with [`ps_graph_free`].
///
/// # Safety
/// `text` must point to a NUL-terminated buffer; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ps_graph_parse(text: *const c_char, out: *mut *mut PsGraph) -> PsStatus {
    clear_error();
    if text.is_null() || out.is_null() {
        set_error("null pointer argument".into());
        return PsStatus::NullPointer;
    }
    let bytes = unsafe { CStr::from_ptr(text) };
    let Ok(source) = bytes.to_str() else {
        set_error("input is not valid UTF-8".into());
        return PsStatus::InvalidUtf8;
    };
    match PlumbingGraph::parse(source) {
        Ok(graph) => {
            unsafe { *out = Box::into_raw(Box::new(PsGraph { inner: graph })) };
            PsStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            PsStatus::ParseError
        }
    }
}

/// Releases a graph handle. NULL is accepted.
///
/// # Safety
/// `graph` must come from [`ps_graph_parse`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ps_graph_free(graph: *mut PsGraph) {
    if !graph.is_null() {
        drop(unsafe { Box::from_raw(graph) });
    }
}

/// Number of vertices in the graph; 0 for a NULL handle.
#[no_mangle]
pub extern "C" fn ps_graph_vertex_count(graph: *const PsGraph) -> usize {
    graph_ref(graph).map_or(0, |g| g.vertex_count())
}

/// Validation report as JSON. Returns Ok even for invalid graphs; the
/// report itself carries the violations.
///
/// # Safety
/// `out` must be writable; the result is freed with [`ps_string_free`].
#[no_mangle]
pub unsafe extern "C" fn ps_graph_validate_json(
    graph: *const PsGraph,
    out: *mut *mut c_char,
) -> PsStatus {
    clear_error();
    let Some(g) = graph_ref(graph) else {
        set_error("null graph handle".into());
        return PsStatus::NullPointer;
    };
    if out.is_null() {
        set_error("null output pointer".into());
        return PsStatus::NullPointer;
    }
    string_out(
        serde_json::to_string(&validate(g)).expect("serializable"),
        out,
    )
}

/// Incompressible-torus classes as a JSON array of vertex-id paths.
///
/// # Safety
/// As for [`ps_graph_validate_json`].
#[no_mangle]
pub unsafe extern "C" fn ps_graph_tori_json(
    graph: *const PsGraph,
    out: *mut *mut c_char,
) -> PsStatus {
    clear_error();
    let Some(g) = graph_ref(graph) else {
        set_error("null graph handle".into());
        return PsStatus::NullPointer;
    };
    if out.is_null() {
        set_error("null output pointer".into());
        return PsStatus::NullPointer;
    }
    if let Some(status) = validation_status(g) {
        return status;
    }
    let classes = torus_classes(g).expect("validated");
    string_out(serde_json::to_string(&classes).expect("serializable"), out)
}

/// Cluster/tree/connector decomposition as JSON.
///
/// # Safety
/// As for [`ps_graph_validate_json`].
#[no_mangle]
pub unsafe extern "C" fn ps_graph_decompose_json(
    graph: *const PsGraph,
    out: *mut *mut c_char,
) -> PsStatus {
    clear_error();
    let Some(g) = graph_ref(graph) else {
        set_error("null graph handle".into());
        return PsStatus::NullPointer;
    };
    if out.is_null() {
        set_error("null output pointer".into());
        return PsStatus::NullPointer;
    }
    if let Some(status) = validation_status(g) {
        return status;
    }
    let d = decompose(g).expect("validated");
    string_out(serde_json::to_string(&d).expect("serializable"), out)
}

/// Wrapped-up forms of all clusters as a JSON array.
///
/// # Safety
/// As for [`ps_graph_validate_json`].
#[no_mangle]
pub unsafe extern "C" fn ps_graph_wrap_json(
    graph: *const PsGraph,
    out: *mut *mut c_char,
) -> PsStatus {
    clear_error();
    let Some(g) = graph_ref(graph) else {
        set_error("null graph handle".into());
        return PsStatus::NullPointer;
    };
    if out.is_null() {
        set_error("null output pointer".into());
        return PsStatus::NullPointer;
    }
    if let Some(status) = validation_status(g) {
        return status;
    }
    let d = decompose(g).expect("validated");
    let mut wrapped = Vec::new();
    for cluster in plumbstein::graph::cluster_graphs(g, &d) {
        match wrap(&cluster) {
            Ok(w) => wrapped.push(w),
            Err(WrapError::NonPlanar(cert)) => {
                set_error(serde_json::to_string(&cert).unwrap_or_default());
                return PsStatus::UnsupportedShape;
            }
            Err(e) => {
                set_error(e.to_string());
                return PsStatus::UnsupportedShape;
            }
        }
    }
    string_out(serde_json::to_string(&wrapped).expect("serializable"), out)
}

/// Handlebody diagram, with the Stein enumeration when `enumerate` is set:
/// `{"count": "...", "smooth": {...}, "enumeration": {...}?}`.
///
/// # Safety
/// As for [`ps_graph_validate_json`].
#[no_mangle]
pub unsafe extern "C" fn ps_graph_stein_json(
    graph: *const PsGraph,
    enumerate: bool,
    out: *mut *mut c_char,
) -> PsStatus {
    clear_error();
    let Some(g) = graph_ref(graph) else {
        set_error("null graph handle".into());
        return PsStatus::NullPointer;
    };
    if out.is_null() {
        set_error("null output pointer".into());
        return PsStatus::NullPointer;
    }
    if let Some(status) = validation_status(g) {
        return status;
    }
    let d = decompose(g).expect("validated");
    let diagram = match assemble(g, &d) {
        Ok(h) => h,
        Err(DiagramError::UnsupportedNonplanar(cert)) => {
            set_error(serde_json::to_string(&cert).unwrap_or_default());
            return PsStatus::UnsupportedShape;
        }
        Err(e) => {
            set_error(e.to_string());
            return PsStatus::UnsupportedShape;
        }
    };
    #[derive(serde::Serialize)]
    struct Out {
        count: String,
        smooth: plumbstein::stein::HandlebodyDiagram,
        #[serde(skip_serializing_if = "Option::is_none")]
        enumeration: Option<plumbstein::stein::SteinEnumeration>,
    }
    let payload = Out {
        count: lower_bound(g).expect("validated").to_string(),
        enumeration: enumerate.then(|| enumerate_stein(&diagram)),
        smooth: diagram,
    };
    string_out(serde_json::to_string(&payload).expect("serializable"), out)
}

/// Contact-structure count or bound as a decimal string. The twisting
/// modes require the four-legged chain family shape.
///
/// # Safety
/// As for [`ps_graph_validate_json`].
#[no_mangle]
pub unsafe extern "C" fn ps_graph_count(
    graph: *const PsGraph,
    mode: PsCountMode,
    m: u64,
    out: *mut *mut c_char,
) -> PsStatus {
    clear_error();
    let Some(g) = graph_ref(graph) else {
        set_error("null graph handle".into());
        return PsStatus::NullPointer;
    };
    if out.is_null() {
        set_error("null output pointer".into());
        return PsStatus::NullPointer;
    }
    if let Some(status) = validation_status(g) {
        return status;
    }
    let value = match mode {
        PsCountMode::Lower => lower_bound(g).expect("validated"),
        PsCountMode::Mintwist | PsCountMode::Torsion => {
            let y = match detect_family_y(g) {
                Ok(y) => y,
                Err(e) => {
                    set_error(e.to_string());
                    return PsStatus::UnsupportedShape;
                }
            };
            if mode == PsCountMode::Mintwist {
                mintwist_upper_bound(&y)
            } else {
                match torsion_upper_bound(&y, m) {
                    Ok(v) => v,
                    Err(e) => {
                        set_error(e.to_string());
                        return PsStatus::ParseError;
                    }
                }
            }
        }
    };
    string_out(value.to_string(), out)
}
