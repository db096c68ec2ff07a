//! C interface to the homology engine.
//!
//! Every entry point returns an integer status (`GHK_OK` on success) and
//! never unwinds across the boundary. Tables are opaque handles released
//! with `ghk_homology_free`.

use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ghk_core::canonical::normal_form;
use ghk_core::complex::{ChainComplex, HomologyTable, Mode};
use ghk_core::exactrank::RankConfig;
use ghk_core::multigraph::read_records;

pub const GHK_OK: i32 = 0;
pub const GHK_ERR_NULL: i32 = 1;
pub const GHK_ERR_UTF8: i32 = 2;
pub const GHK_ERR_INVALID_ARGUMENT: i32 = 3;
pub const GHK_ERR_PARSE: i32 = 4;
pub const GHK_ERR_COMPUTE: i32 = 5;
pub const GHK_ERR_BUFFER_TOO_SMALL: i32 = 6;
pub const GHK_ERR_OUT_OF_RANGE: i32 = 7;
pub const GHK_ERR_PANIC: i32 = 8;

pub const GHK_MODE_QUOTIENT: i32 = 0;
pub const GHK_MODE_FULL: i32 = 1;
pub const GHK_MODE_CUT_ONLY: i32 = 2;

/// Ranks from this one on need `extended != 0`.
pub const GHK_EXTENDED_RANK: u32 = 7;

/// Opaque homology table.
pub struct GhkHomology {
    table: HomologyTable,
}

/// One degree of a homology table.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GhkHomologyRow {
    pub degree: u64,
    pub dim: u64,
    pub boundary_rank_out: u64,
    pub betti: u64,
}

fn guarded(f: impl FnOnce() -> i32) -> i32 {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(GHK_ERR_PANIC)
}

fn mode_of(code: i32) -> Option<Mode> {
    match code {
        GHK_MODE_QUOTIENT => Some(Mode::Quotient),
        GHK_MODE_FULL => Some(Mode::Full),
        GHK_MODE_CUT_ONLY => Some(Mode::CutOnly),
        _ => None,
    }
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn ghk_status_message(code: i32) -> *const c_char {
    let s: &'static CStr = match code {
        GHK_OK => c"ok",
        GHK_ERR_NULL => c"null pointer argument",
        GHK_ERR_UTF8 => c"input is not valid UTF-8",
        GHK_ERR_INVALID_ARGUMENT => c"invalid argument",
        GHK_ERR_PARSE => c"malformed graph record",
        GHK_ERR_COMPUTE => c"computation failed",
        GHK_ERR_BUFFER_TOO_SMALL => c"output buffer too small",
        GHK_ERR_OUT_OF_RANGE => c"index out of range",
        GHK_ERR_PANIC => c"internal error",
        _ => c"unknown status",
    };
    s.as_ptr()
}

/// Computes the homology table of the given rank and mode.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle. On
/// success `*out` owns a table that must be released with
/// `ghk_homology_free`; on failure `*out` is set to null.
#[no_mangle]
pub unsafe extern "C" fn ghk_homology_compute(rank: u32, mode: i32, extended: i32, out: *mut *mut GhkHomology) -> i32 {
    if out.is_null() {
        return GHK_ERR_NULL;
    }
    *out = ptr::null_mut();
    let Some(mode) = mode_of(mode) else {
        return GHK_ERR_INVALID_ARGUMENT;
    };
    if rank < 2 || (rank >= GHK_EXTENDED_RANK && extended == 0) {
        return GHK_ERR_INVALID_ARGUMENT;
    }
    guarded(|| {
        let table = ChainComplex::new(rank as usize, mode).and_then(|cx| cx.homology(&RankConfig::default()));
        match table {
            Ok(table) => {
                *out = Box::into_raw(Box::new(GhkHomology { table }));
                GHK_OK
            }
            Err(_) => GHK_ERR_COMPUTE,
        }
    })
}

/// Number of degrees (rows) in the table, top degree first.
///
/// # Safety
/// `h` must be null or a live handle from `ghk_homology_compute`; `count`
/// must be null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn ghk_homology_row_count(h: *const GhkHomology, count: *mut usize) -> i32 {
    if h.is_null() || count.is_null() {
        return GHK_ERR_NULL;
    }
    *count = (*h).table.rows.len();
    GHK_OK
}

/// Copies row `index` (0 = top degree) into `row`.
///
/// # Safety
/// `h` must be null or a live handle; `row` must be null or valid for one
/// write.
#[no_mangle]
pub unsafe extern "C" fn ghk_homology_row(h: *const GhkHomology, index: usize, row: *mut GhkHomologyRow) -> i32 {
    if h.is_null() || row.is_null() {
        return GHK_ERR_NULL;
    }
    let table = &(*h).table;
    let Some(r) = table.rows.get(index) else {
        return GHK_ERR_OUT_OF_RANGE;
    };
    *row = GhkHomologyRow {
        degree: r.degree as u64,
        dim: r.dim as u64,
        boundary_rank_out: r.boundary_rank_out as u64,
        betti: r.betti as u64,
    };
    GHK_OK
}

/// Rank of the graphs the table describes.
///
/// # Safety
/// `h` must be null or a live handle; `rank` must be null or valid for one
/// write.
#[no_mangle]
pub unsafe extern "C" fn ghk_homology_rank(h: *const GhkHomology, rank: *mut u32) -> i32 {
    if h.is_null() || rank.is_null() {
        return GHK_ERR_NULL;
    }
    *rank = (*h).table.rank as u32;
    GHK_OK
}

/// Releases a table. Null is ignored.
///
/// # Safety
/// `h` must be null or a handle from `ghk_homology_compute` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ghk_homology_free(h: *mut GhkHomology) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Writes the canonical key of the single graph in `record` (graph text
/// format) as a NUL-terminated string. `*needed` receives the buffer size
/// required including the terminator, also when the buffer is too small.
///
/// # Safety
/// `record` must be a NUL-terminated string; `buf` must be valid for `len`
/// bytes (it may be null when `len` is 0); `needed` must be null or valid
/// for one write.
#[no_mangle]
pub unsafe extern "C" fn ghk_canonical_key(record: *const c_char, buf: *mut c_char, len: usize, needed: *mut usize) -> i32 {
    if record.is_null() || (buf.is_null() && len > 0) {
        return GHK_ERR_NULL;
    }
    let Ok(text) = CStr::from_ptr(record).to_str() else {
        return GHK_ERR_UTF8;
    };
    guarded(|| {
        let graphs = match read_records(text.as_bytes()) {
            Ok(g) if g.len() == 1 => g,
            Ok(_) => return GHK_ERR_INVALID_ARGUMENT,
            Err(_) => return GHK_ERR_PARSE,
        };
        let key = normal_form(&graphs[0]).0.key();
        let size = key.len() + 1;
        if !needed.is_null() {
            *needed = size;
        }
        if len < size {
            return GHK_ERR_BUFFER_TOO_SMALL;
        }
        ptr::copy_nonoverlapping(key.as_ptr().cast::<c_char>(), buf, key.len());
        *buf.add(key.len()) = 0;
        GHK_OK
    })
}
