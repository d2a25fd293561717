//! C ABI over the `thurston` library.
//!
//! Graphs and representations cross the boundary as opaque handles created
//! by `*_from_json` or `*_new` functions and released with the matching
//! `*_free`. Every fallible function returns a [`ThurstonStatus`]; on failure
//! the message is kept per thread and read back with [`thurston_last_error`].
//! Results are written through caller-provided pointers and are left
//! untouched when the call fails.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use nalgebra::DMatrix;

use thurston::flow::{dth_flow, max_cycle_ratio, SuspensionFlow};
use thurston::io::{parse_functional, parse_graph, parse_rep, GraphInput};
use thurston::rep::{schottky_sl2, sym_power, MatrixRep};
use thurston::repmetrics::{dth_reps, entropy_estimate};
use thurston::sft::{pressure, EdgePotential, RoofFunction};
use thurston::words::Word;

/// Outcome of a call through the C interface.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThurstonStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8, or a size was out of range.
    InvalidArgument = 2,
    /// An input document or word could not be parsed.
    Parse = 3,
    /// The computation rejected its input or failed to converge.
    Domain = 4,
    /// An output buffer is shorter than the result.
    BufferTooSmall = 5,
    /// The library panicked; the handle arguments should be considered lost.
    Panic = 6,
}

/// A subshift graph together with its named edge potentials.
pub struct ThurstonGraph {
    input: GraphInput,
}

/// A representation of a free group into `PGL(d, ℝ)`.
pub struct ThurstonRep {
    rep: MatrixRep,
}

#[derive(Debug, thiserror::Error)]
enum FfiError {
    #[error("argument `{0}` is a null pointer")]
    Null(&'static str),
    #[error("argument `{0}` is not valid UTF-8")]
    Utf8(&'static str),
    #[error("{0}")]
    InvalidArgument(String),
    #[error("output buffer holds {got} values, {needed} are required")]
    BufferTooSmall { needed: usize, got: usize },
    #[error(transparent)]
    Core(#[from] thurston::Error),
}

impl FfiError {
    fn status(&self) -> ThurstonStatus {
        match self {
            FfiError::Null(_) => ThurstonStatus::NullPointer,
            FfiError::Utf8(_) | FfiError::InvalidArgument(_) => ThurstonStatus::InvalidArgument,
            FfiError::BufferTooSmall { .. } => ThurstonStatus::BufferTooSmall,
            FfiError::Core(thurston::Error::Parse(_)) => ThurstonStatus::Parse,
            FfiError::Core(_) => ThurstonStatus::Domain,
        }
    }
}

type FfiResult<T> = Result<T, FfiError>;

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_last_error(message: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = message);
}

/// Runs `f`, records any error or panic and converts the outcome to a status.
fn guard(f: impl FnOnce() -> FfiResult<()>) -> ThurstonStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error(String::new());
            ThurstonStatus::Ok
        }
        Ok(Err(e)) => {
            set_last_error(e.to_string());
            e.status()
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {message}"));
            ThurstonStatus::Panic
        }
    }
}

/// # Safety
/// `p` is null or points to a NUL-terminated string.
unsafe fn required_str<'a>(p: *const c_char, name: &'static str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(FfiError::Null(name));
    }
    CStr::from_ptr(p).to_str().map_err(|_| FfiError::Utf8(name))
}

/// # Safety
/// `p` is null or points to a NUL-terminated string.
unsafe fn optional_str<'a>(p: *const c_char, name: &'static str) -> FfiResult<Option<&'a str>> {
    if p.is_null() {
        Ok(None)
    } else {
        required_str(p, name).map(Some)
    }
}

/// # Safety
/// `p` is null or valid for reads of `T`.
unsafe fn handle<'a, T>(p: *const T, name: &'static str) -> FfiResult<&'a T> {
    p.as_ref().ok_or(FfiError::Null(name))
}

/// # Safety
/// `p` is null or valid for writes of `T`.
unsafe fn write<T>(p: *mut T, name: &'static str, value: T) -> FfiResult<()> {
    if p.is_null() {
        return Err(FfiError::Null(name));
    }
    p.write(value);
    Ok(())
}

fn roof(graph: &ThurstonGraph, name: Option<&str>) -> FfiResult<SuspensionFlow> {
    let (_, potential) = graph.input.potential(name)?;
    Ok(SuspensionFlow::new(
        graph.input.graph.clone(),
        RoofFunction::new(potential)?,
    )?)
}

/// Version of the library as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn thurston_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the message of the last failed call on this thread into `buf`,
/// truncated and NUL-terminated, and returns the buffer size the full message
/// needs including the terminator. The message is empty after a successful
/// call. `buf` may be null when `len` is zero.
///
/// # Safety
/// `buf` is null or valid for writes of `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn thurston_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let message = e.borrow();
        let bytes = message.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        bytes.len() + 1
    })
}

/// Parses a graph document (`states`, `edges`, `potentials`) from JSON text.
///
/// # Safety
/// `json` is a NUL-terminated string and `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn thurston_graph_from_json(
    json: *const c_char,
    out: *mut *mut ThurstonGraph,
) -> ThurstonStatus {
    guard(|| {
        let input = parse_graph(required_str(json, "json")?)?;
        write(out, "out", Box::into_raw(Box::new(ThurstonGraph { input })))
    })
}

/// Releases a graph. Null is ignored.
///
/// # Safety
/// `graph` is null or was returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn thurston_graph_free(graph: *mut ThurstonGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// Number of states and of edges of the graph.
///
/// # Safety
/// `graph` is a live handle; `states` and `edges` are valid for writes.
#[no_mangle]
pub unsafe extern "C" fn thurston_graph_size(
    graph: *const ThurstonGraph,
    states: *mut usize,
    edges: *mut usize,
) -> ThurstonStatus {
    guard(|| {
        let g = &handle(graph, "graph")?.input.graph;
        if edges.is_null() {
            return Err(FfiError::Null("edges"));
        }
        write(states, "states", g.num_states())?;
        write(edges, "edges", g.num_edges())
    })
}

/// Topological pressure of the named potential; a null name selects the
/// zero potential, whose pressure is the topological entropy.
///
/// # Safety
/// `graph` is a live handle, `potential` is null or a NUL-terminated string
/// and `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn thurston_graph_pressure(
    graph: *const ThurstonGraph,
    potential: *const c_char,
    out: *mut f64,
) -> ThurstonStatus {
    guard(|| {
        let g = handle(graph, "graph")?;
        let f = match optional_str(potential, "potential")? {
            Some(name) => g.input.potential(Some(name))?.1,
            None => EdgePotential::zero(&g.input.graph),
        };
        write(out, "out", pressure(&g.input.graph, &f)?)
    })
}

/// Entropy of the suspension flow under the named roof; a null name selects
/// the first potential of the document.
///
/// # Safety
/// As for [`thurston_graph_pressure`].
#[no_mangle]
pub unsafe extern "C" fn thurston_flow_entropy(
    graph: *const ThurstonGraph,
    roof_name: *const c_char,
    out: *mut f64,
) -> ThurstonStatus {
    guard(|| {
        let g = handle(graph, "graph")?;
        let flow = roof(g, optional_str(roof_name, "roof_name")?)?;
        write(out, "out", flow.entropy()?)
    })
}

/// Maximum over cycles of `Σ numerator / Σ denominator`, with the
/// denominator a strictly positive potential.
///
/// # Safety
/// `graph` is a live handle, both names are NUL-terminated strings and `out`
/// is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn thurston_max_cycle_ratio(
    graph: *const ThurstonGraph,
    numerator: *const c_char,
    denominator: *const c_char,
    out: *mut f64,
) -> ThurstonStatus {
    guard(|| {
        let g = handle(graph, "graph")?;
        let (_, num) = g
            .input
            .potential(Some(required_str(numerator, "numerator")?))?;
        let (_, den) = g
            .input
            .potential(Some(required_str(denominator, "denominator")?))?;
        let ratio = max_cycle_ratio(&g.input.graph, &num, &RoofFunction::new(den)?)?;
        write(out, "out", ratio.value)
    })
}

/// Asymmetric distance from the flow under `roof1` to the flow under `roof2`.
///
/// # Safety
/// As for [`thurston_max_cycle_ratio`].
#[no_mangle]
pub unsafe extern "C" fn thurston_flow_dth(
    graph: *const ThurstonGraph,
    roof1: *const c_char,
    roof2: *const c_char,
    out: *mut f64,
) -> ThurstonStatus {
    guard(|| {
        let g = handle(graph, "graph")?;
        let f1 = roof(g, Some(required_str(roof1, "roof1")?))?;
        let f2 = roof(g, Some(required_str(roof2, "roof2")?))?;
        write(out, "out", dth_flow(&f1, &f2)?.value)
    })
}

/// Parses a representation document (`rank`, `dim`, `generators`) from JSON.
///
/// # Safety
/// `json` is a NUL-terminated string and `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn thurston_rep_from_json(
    json: *const c_char,
    out: *mut *mut ThurstonRep,
) -> ThurstonStatus {
    guard(|| {
        let rep = parse_rep(required_str(json, "json")?)?.rep;
        write(out, "out", Box::into_raw(Box::new(ThurstonRep { rep })))
    })
}

/// Builds a representation from `rank` generators of size `dim × dim`, stored
/// one after another in row-major order in `entries`.
///
/// # Safety
/// `entries` is valid for reads of `rank * dim * dim` doubles and `out` is
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn thurston_rep_new(
    rank: usize,
    dim: usize,
    entries: *const f64,
    out: *mut *mut ThurstonRep,
) -> ThurstonStatus {
    guard(|| {
        if entries.is_null() {
            return Err(FfiError::Null("entries"));
        }
        let block = dim
            .checked_mul(dim)
            .filter(|_| rank > 0 && dim > 0)
            .ok_or_else(|| FfiError::InvalidArgument(format!("bad shape {rank} x {dim}")))?;
        let total = block
            .checked_mul(rank)
            .ok_or_else(|| FfiError::InvalidArgument("shape overflows".into()))?;
        let values = std::slice::from_raw_parts(entries, total);
        let generators = values
            .chunks(block)
            .map(|c| DMatrix::from_row_slice(dim, dim, c))
            .collect();
        let rep = MatrixRep::new(generators, None)?;
        write(out, "out", Box::into_raw(Box::new(ThurstonRep { rep })))
    })
}

/// The two-generator Schottky representation `a = diag(e^{t_a/2}, e^{−t_a/2})`,
/// `b` = the same shape with translation length `t_b` rotated by `theta`.
/// Fails with [`ThurstonStatus::Domain`] when the ping-pong certificate fails.
///
/// # Safety
/// `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn thurston_rep_schottky(
    t_a: f64,
    t_b: f64,
    theta: f64,
    out: *mut *mut ThurstonRep,
) -> ThurstonStatus {
    guard(|| {
        let rep = schottky_sl2(t_a, t_b, theta)?.certified()?.clone();
        write(out, "out", Box::into_raw(Box::new(ThurstonRep { rep })))
    })
}

/// The composition of a two-dimensional representation with the irreducible
/// representation into dimension `d`.
///
/// # Safety
/// `rep` is a live handle and `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn thurston_rep_sym_power(
    rep: *const ThurstonRep,
    d: usize,
    out: *mut *mut ThurstonRep,
) -> ThurstonStatus {
    guard(|| {
        let lifted = sym_power(&handle(rep, "rep")?.rep, d)?;
        write(
            out,
            "out",
            Box::into_raw(Box::new(ThurstonRep { rep: lifted })),
        )
    })
}

/// Releases a representation. Null is ignored.
///
/// # Safety
/// `rep` is null or was returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn thurston_rep_free(rep: *mut ThurstonRep) {
    if !rep.is_null() {
        drop(Box::from_raw(rep));
    }
}

/// Rank of the free group and dimension of the representation.
///
/// # Safety
/// `rep` is a live handle; `rank` and `dim` are valid for writes.
#[no_mangle]
pub unsafe extern "C" fn thurston_rep_shape(
    rep: *const ThurstonRep,
    rank: *mut usize,
    dim: *mut usize,
) -> ThurstonStatus {
    guard(|| {
        let r = &handle(rep, "rep")?.rep;
        if dim.is_null() {
            return Err(FfiError::Null("dim"));
        }
        write(rank, "rank", r.rank())?;
        write(dim, "dim", r.dim())
    })
}

/// Jordan projection of the image of `word` (letters `a, b, …` with inverses
/// in upper case): `dim` log-moduli of eigenvalues, nonincreasing, summing to
/// zero. `len` is the capacity of `out` in doubles.
///
/// # Safety
/// `rep` is a live handle, `word` is a NUL-terminated string and `out` is
/// valid for writes of `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn thurston_rep_jordan(
    rep: *const ThurstonRep,
    word: *const c_char,
    out: *mut f64,
    len: usize,
) -> ThurstonStatus {
    guard(|| {
        let r = &handle(rep, "rep")?.rep;
        let w = Word::parse(r.rank(), required_str(word, "word")?)?;
        let lambda = r.jordan(&w)?;
        if out.is_null() {
            return Err(FfiError::Null("out"));
        }
        if len < lambda.dim() {
            return Err(FfiError::BufferTooSmall {
                needed: lambda.dim(),
                got: len,
            });
        }
        std::ptr::copy_nonoverlapping(lambda.values().as_ptr(), out, lambda.dim());
        Ok(())
    })
}

/// Length of `word` for a functional given as a preset name (`hilbert`,
/// `lambda1`, `two_lambda1`, …), a comma-separated coefficient list, inline
/// JSON or the path of a JSON file.
///
/// # Safety
/// `rep` is a live handle, `functional` and `word` are NUL-terminated strings
/// and `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn thurston_rep_length(
    rep: *const ThurstonRep,
    functional: *const c_char,
    word: *const c_char,
    out: *mut f64,
) -> ThurstonStatus {
    guard(|| {
        let r = &handle(rep, "rep")?.rep;
        let phi = parse_functional(required_str(functional, "functional")?, r.dim())?;
        let w = Word::parse(r.rank(), required_str(word, "word")?)?;
        write(out, "out", phi.eval(&r.jordan(&w)?)?)
    })
}

/// Entropy of the length spectrum, estimated from all conjugacy classes of
/// word length at most `cutoff`. `stderr` may be null.
///
/// # Safety
/// `rep` is a live handle, `functional` is a NUL-terminated string, `out` is
/// valid for writes and `stderr` is null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn thurston_rep_entropy(
    rep: *const ThurstonRep,
    functional: *const c_char,
    cutoff: usize,
    out: *mut f64,
    stderr: *mut f64,
) -> ThurstonStatus {
    guard(|| {
        let r = &handle(rep, "rep")?.rep;
        let phi = parse_functional(required_str(functional, "functional")?, r.dim())?;
        if out.is_null() {
            return Err(FfiError::Null("out"));
        }
        let estimate = entropy_estimate(r, &phi, cutoff)?;
        write(out, "out", estimate.value)?;
        if !stderr.is_null() {
            stderr.write(estimate.stderr);
        }
        Ok(())
    })
}

/// Asymmetric distance from `rep1` to `rep2` over conjugacy classes of word
/// length at most `cutoff`.
///
/// # Safety
/// `rep1` and `rep2` are live handles, `functional` is a NUL-terminated
/// string and `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn thurston_rep_dth(
    rep1: *const ThurstonRep,
    rep2: *const ThurstonRep,
    functional: *const c_char,
    cutoff: usize,
    out: *mut f64,
) -> ThurstonStatus {
    guard(|| {
        let r1 = &handle(rep1, "rep1")?.rep;
        let r2 = &handle(rep2, "rep2")?.rep;
        let phi = parse_functional(required_str(functional, "functional")?, r1.dim())?;
        write(out, "out", dth_reps(r1, r2, &phi, cutoff)?.value)
    })
}
