//! C ABI over the linkscope library.
//!
//! A dataset handle owns the loaded roster, link graph and computed report.
//! Every fallible call returns an [`LsStatus`]; on failure a message is kept
//! per thread and can be read with [`ls_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::BufWriter;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use linkscope::export::write_report;
use linkscope::pipeline::{load_inputs, Inputs};
use linkscope::report::{analyze, AnalysisParams, IngestSummary, ReferenceInput};
use linkscope::{ComponentSummary, PipelineConfig, RosterSource, Stage, StatsReport};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LsStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    InvalidConfig = 3,
    RosterError = 4,
    IngestError = 5,
    GraphError = 6,
    ReferenceError = 7,
    AnalysisError = 8,
    IoError = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LsComponentKind {
    Weak = 0,
    Strong = 1,
}

/// Analysis knobs; obtain defaults from [`ls_default_params`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LsParams {
    pub bin_width: f64,
    pub max_span_years: f64,
    pub power_law_xmin: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LsComponentSummary {
    pub count: u64,
    pub giant_size: u64,
    pub giant_fraction: f64,
    pub singleton_count: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LsReciprocity {
    pub mirrored_count: u64,
    pub unique_count: u64,
    pub mirrored_share: f64,
}

/// Shares are NaN when undefined (no directed spans, no known spans).
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LsTemporal {
    pub past_count: u64,
    pub future_count: u64,
    pub same_count: u64,
    pub unknown_count: u64,
    pub past_share: f64,
    pub future_share: f64,
    pub first_bin_share: f64,
    pub kept_edges: u64,
    pub retention_share_of_known: f64,
    pub retention_share_of_all: f64,
}

/// Opaque handle to a loaded and analysed dataset.
pub struct LsDataset {
    inputs: Inputs,
    report: StatsReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

fn fail(status: LsStatus, msg: impl Into<String>) -> LsStatus {
    set_error(msg);
    status
}

fn status_of(stage: Stage) -> LsStatus {
    match stage {
        Stage::Config => LsStatus::InvalidConfig,
        Stage::Roster => LsStatus::RosterError,
        Stage::Ingest => LsStatus::IngestError,
        Stage::Graph => LsStatus::GraphError,
        Stage::Reference => LsStatus::ReferenceError,
        Stage::Analysis => LsStatus::AnalysisError,
        Stage::Report | Stage::Filter | Stage::Layout | Stage::Render => LsStatus::IoError,
    }
}

/// Run `body`, turning a panic into `LsStatus::Panic`.
fn guarded(body: impl FnOnce() -> LsStatus) -> LsStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => fail(LsStatus::Panic, "internal panic"),
    }
}

unsafe fn path_arg(p: *const c_char, what: &str) -> Result<Option<PathBuf>, LsStatus> {
    if p.is_null() {
        return Ok(None);
    }
    match CStr::from_ptr(p).to_str() {
        Ok(s) => Ok(Some(PathBuf::from(s))),
        Err(_) => Err(fail(LsStatus::InvalidUtf8, format!("{what} is not valid UTF-8"))),
    }
}

fn summary(s: &ComponentSummary) -> LsComponentSummary {
    LsComponentSummary {
        count: s.count as u64,
        giant_size: s.giant_size as u64,
        giant_fraction: s.giant_fraction,
        singleton_count: s.singleton_count as u64,
    }
}

/// Default analysis parameters (bin width 37.5, max span 75, xmin 1).
#[no_mangle]
pub extern "C" fn ls_default_params() -> LsParams {
    let d = AnalysisParams::default();
    LsParams { bin_width: d.bin_width, max_span_years: d.max_span_years, power_law_xmin: d.power_law_xmin }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ls_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or NULL. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn ls_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |m| m.as_ptr()))
}

/// Load a link dump and roster CSV (plus optional reference edges CSV) and
/// compute the report.
///
/// # Safety
/// String arguments must be NULL or NUL-terminated; `params` must be NULL or
/// valid; `out` must be a valid pointer. On success `*out` receives a handle
/// to release with [`ls_dataset_free`].
#[no_mangle]
pub unsafe extern "C" fn ls_dataset_load(
    links_path: *const c_char,
    roster_csv_path: *const c_char,
    reference_csv_path: *const c_char,
    params: *const LsParams,
    out: *mut *mut LsDataset,
) -> LsStatus {
    guarded(|| {
        if out.is_null() {
            return fail(LsStatus::NullArgument, "out is NULL");
        }
        *out = ptr::null_mut();
        let links = match path_arg(links_path, "links_path") {
            Ok(Some(p)) => p,
            Ok(None) => return fail(LsStatus::NullArgument, "links_path is NULL"),
            Err(s) => return s,
        };
        let roster = match path_arg(roster_csv_path, "roster_csv_path") {
            Ok(Some(p)) => p,
            Ok(None) => return fail(LsStatus::NullArgument, "roster_csv_path is NULL"),
            Err(s) => return s,
        };
        let reference = match path_arg(reference_csv_path, "reference_csv_path") {
            Ok(p) => p,
            Err(s) => return s,
        };

        let mut config = PipelineConfig::new(vec![links], RosterSource::Csv(roster), PathBuf::new());
        config.ulan_edges = reference;
        if let Some(p) = params.as_ref() {
            config.analysis.bin_width = p.bin_width;
            config.analysis.max_span_years = p.max_span_years;
            config.analysis.power_law_xmin = p.power_law_xmin;
        }
        if let Err(e) = config.validate() {
            return fail(status_of(e.stage), e.to_string());
        }
        let inputs = match load_inputs(&config) {
            Ok(i) => i,
            Err(e) => return fail(status_of(e.stage), e.to_string()),
        };
        let analysis = analyze(
            &inputs.graph,
            inputs.build_tally,
            IngestSummary { links_parse: inputs.links_parse, roster_size: inputs.roster.len() as u64 },
            &inputs.roster.birth_years(),
            inputs.reference.as_ref().map(|r| ReferenceInput {
                graph: &r.graph,
                load_tally: r.load_tally,
                build_tally: r.build_tally,
            }),
            &config.analysis,
        );
        match analysis {
            Ok(a) => {
                *out = Box::into_raw(Box::new(LsDataset { inputs, report: a.report }));
                LsStatus::Ok
            }
            Err(e) => fail(LsStatus::AnalysisError, e.to_string()),
        }
    })
}

/// Release a handle. NULL is ignored.
///
/// # Safety
/// `ds` must be NULL or a handle from [`ls_dataset_load`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ls_dataset_free(ds: *mut LsDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// Number of rostered entities (graph nodes); 0 for NULL.
///
/// # Safety
/// `ds` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ls_dataset_node_count(ds: *const LsDataset) -> u64 {
    ds.as_ref().map_or(0, |d| d.inputs.graph.node_count() as u64)
}

/// Number of distinct directed links; 0 for NULL.
///
/// # Safety
/// `ds` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ls_dataset_edge_count(ds: *const LsDataset) -> u64 {
    ds.as_ref().map_or(0, |d| d.inputs.graph.edge_count() as u64)
}

/// # Safety
/// `ds` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ls_dataset_components(
    ds: *const LsDataset,
    kind: LsComponentKind,
    out: *mut LsComponentSummary,
) -> LsStatus {
    guarded(|| {
        let (Some(d), false) = (ds.as_ref(), out.is_null()) else {
            return fail(LsStatus::NullArgument, "dataset or out is NULL");
        };
        *out = match kind {
            LsComponentKind::Weak => summary(&d.report.wcc),
            LsComponentKind::Strong => summary(&d.report.scc),
        };
        LsStatus::Ok
    })
}

/// # Safety
/// `ds` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ls_dataset_reciprocity(ds: *const LsDataset, out: *mut LsReciprocity) -> LsStatus {
    guarded(|| {
        let (Some(d), false) = (ds.as_ref(), out.is_null()) else {
            return fail(LsStatus::NullArgument, "dataset or out is NULL");
        };
        let r = &d.report.reciprocity;
        *out = LsReciprocity {
            mirrored_count: r.mirrored_count,
            unique_count: r.unique_count,
            mirrored_share: r.mirrored_share,
        };
        LsStatus::Ok
    })
}

/// # Safety
/// `ds` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ls_dataset_temporal(ds: *const LsDataset, out: *mut LsTemporal) -> LsStatus {
    guarded(|| {
        let (Some(d), false) = (ds.as_ref(), out.is_null()) else {
            return fail(LsStatus::NullArgument, "dataset or out is NULL");
        };
        let t = &d.report.temporal;
        let s = &t.direction_shares;
        let r = &t.filter_retention;
        *out = LsTemporal {
            past_count: s.past_count,
            future_count: s.future_count,
            same_count: s.same_count,
            unknown_count: s.unknown_count,
            past_share: s.past_share.unwrap_or(f64::NAN),
            future_share: s.future_share.unwrap_or(f64::NAN),
            first_bin_share: t.first_bin_share.unwrap_or(f64::NAN),
            kept_edges: r.kept,
            retention_share_of_known: r.share_of_known.unwrap_or(f64::NAN),
            retention_share_of_all: r.share_of_all.unwrap_or(f64::NAN),
        };
        LsStatus::Ok
    })
}

/// Write the canonical report JSON to `path`.
///
/// # Safety
/// `ds` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ls_write_report(ds: *const LsDataset, path: *const c_char) -> LsStatus {
    guarded(|| {
        let Some(d) = ds.as_ref() else {
            return fail(LsStatus::NullArgument, "dataset is NULL");
        };
        let path = match path_arg(path, "path") {
            Ok(Some(p)) => p,
            Ok(None) => return fail(LsStatus::NullArgument, "path is NULL"),
            Err(s) => return s,
        };
        let file = match File::create(&path) {
            Ok(f) => f,
            Err(e) => return fail(LsStatus::IoError, format!("{}: {e}", path.display())),
        };
        match write_report(&d.report, BufWriter::new(file)) {
            Ok(_) => LsStatus::Ok,
            Err(e) => fail(LsStatus::IoError, format!("{}: {e}", path.display())),
        }
    })
}
