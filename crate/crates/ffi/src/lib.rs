//! C ABI over the `tbdag` crate.
//!
//! Conventions: every fallible call returns a [`TbStatus`] and writes its
//! result through an out-pointer. On failure the message is kept per thread
//! and can be fetched with [`tb_last_error_message`]. Strings returned by
//! the library are owned by the caller and released with [`tb_string_free`];
//! handles are released with their matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use serde_json::json;
use tbdag::game::{analyze, parse_game, serialize_game, Game, Side, SplitMode};
use tbdag::solver::{solve_with, Algorithm, Setup, SolveConfig, SolveReport, UpdateMode};
use tbdag::tbdag::{build_tbdag, BuildOptions, EDGE_BUDGET, FANOUT_CAP};
use tbdag::zoo::{generate, preset};
use tbdag::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Malformed = 3,
    InvalidGame = 4,
    InvalidParams = 5,
    Unsupported = 6,
    Budget = 7,
    NonFinite = 8,
    Io = 9,
    Panic = 10,
    BufferTooSmall = 11,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TbSide {
    Max = 0,
    Min = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TbSplit {
    Observation = 0,
    Public = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TbAlgorithm {
    Cfr = 0,
    CfrPlus = 1,
    PcfrPlus = 2,
    CfrMwu = 3,
}

/// Solver settings; obtain defaults from [`tb_solve_config_default`].
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct TbSolveConfig {
    pub algorithm: TbAlgorithm,
    pub eps: f64,
    pub max_iters: u64,
    pub log_every: u64,
    /// Nonzero for alternating updates.
    pub alternating: u8,
    pub split: TbSplit,
    /// Nonzero to apply the DAG reductions.
    pub reduce: u8,
    pub edge_budget: usize,
}

/// Sizes of one side's TB-DAG.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct TbDagStats {
    pub decision_points: usize,
    pub observation_points: usize,
    pub edges: usize,
    pub max_belief: usize,
    pub max_fanout: usize,
    pub k: usize,
}

/// Opaque game handle.
pub struct TbGame {
    game: Game,
}

/// Opaque solver result handle.
pub struct TbSolveResult {
    report: SolveReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> TbStatus {
    match e {
        Error::Malformed(_) => TbStatus::Malformed,
        Error::Invalid(_) => TbStatus::InvalidGame,
        Error::Params(_) => TbStatus::InvalidParams,
        Error::Unsupported(_) => TbStatus::Unsupported,
        Error::Budget { .. } => TbStatus::Budget,
        Error::NonFinite(_) => TbStatus::NonFinite,
        Error::Io(_) => TbStatus::Io,
    }
}

/// Runs `f`, recording any error or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), (TbStatus, String)>) -> TbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TbStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            TbStatus::Panic
        }
    }
}

fn lib(e: Error) -> (TbStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (TbStatus, String) {
    (TbStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (TbStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|e| (TbStatus::InvalidUtf8, format!("{what}: {e}")))
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

unsafe fn game_ref<'a>(g: *const TbGame) -> Result<&'a Game, (TbStatus, String)> {
    g.as_ref().map(|g| &g.game).ok_or_else(|| null("game"))
}

fn side_of(s: TbSide) -> Side {
    match s {
        TbSide::Max => Side::Max,
        TbSide::Min => Side::Min,
    }
}

fn split_of(s: TbSplit) -> SplitMode {
    match s {
        TbSplit::Observation => SplitMode::Observation,
        TbSplit::Public => SplitMode::Public,
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copy of the calling thread's last error message, or NULL if none.
/// Free with [`tb_string_free`].
#[no_mangle]
pub extern "C" fn tb_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map(|c| c.clone().into_raw()).unwrap_or(ptr::null_mut()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn tb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a game from its JSON document.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_game_from_json(json: *const c_char, out: *mut *mut TbGame) -> TbStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let text = read_str(json, "json")?;
        let game = parse_game(text).map_err(lib)?;
        *out = Box::into_raw(Box::new(TbGame { game }));
        Ok(())
    })
}

/// Generates a preset game such as "fig2", "3K3[1,3]" or "wc-k1-b2-d5".
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_game_from_preset(name: *const c_char, out: *mut *mut TbGame) -> TbStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let name = read_str(name, "name")?;
        let game = preset(name).and_then(|s| generate(&s)).map_err(lib)?;
        *out = Box::into_raw(Box::new(TbGame { game }));
        Ok(())
    })
}

/// # Safety
/// `game` must come from a `tb_game_*` constructor, or be NULL.
#[no_mangle]
pub unsafe extern "C" fn tb_game_free(game: *mut TbGame) {
    if !game.is_null() {
        drop(Box::from_raw(game));
    }
}

/// Node count, or 0 for NULL.
///
/// # Safety
/// `game` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn tb_game_num_nodes(game: *const TbGame) -> usize {
    game.as_ref().map_or(0, |g| g.game.num_nodes())
}

/// Terminal count, or 0 for NULL. Realization buffers use this length.
///
/// # Safety
/// `game` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn tb_game_num_terminals(game: *const TbGame) -> usize {
    game.as_ref().map_or(0, |g| g.game.terminals().len())
}

/// Serializes the game to JSON. Free the string with [`tb_string_free`].
///
/// # Safety
/// `game` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_game_to_json(game: *const TbGame, out: *mut *mut c_char) -> TbStatus {
    guard(|| {
        let g = game_ref(game)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = to_c_string(serialize_game(g));
        Ok(())
    })
}

/// Builds one side's TB-DAG and reports its sizes.
///
/// # Safety
/// `game` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_build_stats(
    game: *const TbGame,
    side: TbSide,
    split: TbSplit,
    reduce: u8,
    edge_budget: usize,
    out: *mut TbDagStats,
) -> TbStatus {
    guard(|| {
        let g = game_ref(game)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let an = analyze(g, side_of(side)).map_err(lib)?;
        let opts = BuildOptions { split: split_of(split), reduce: reduce != 0, edge_budget, fanout_cap: FANOUT_CAP };
        let dag = build_tbdag(g, &an, opts).map_err(lib)?;
        *out = TbDagStats {
            decision_points: dag.stats.num_dec,
            observation_points: dag.stats.num_obs,
            edges: dag.stats.edges,
            max_belief: dag.stats.max_belief,
            max_fanout: dag.stats.max_fanout,
            k: an.k(),
        };
        Ok(())
    })
}

/// Default solver settings (PCFR+, eps 1e-3, observation split, reduced).
#[no_mangle]
pub extern "C" fn tb_solve_config_default() -> TbSolveConfig {
    let d = SolveConfig::default();
    TbSolveConfig {
        algorithm: TbAlgorithm::PcfrPlus,
        eps: d.eps,
        max_iters: d.max_iters,
        log_every: d.log_every,
        alternating: 0,
        split: TbSplit::Observation,
        reduce: 1,
        edge_budget: EDGE_BUDGET,
    }
}

fn to_config(c: &TbSolveConfig) -> SolveConfig {
    SolveConfig {
        algorithm: match c.algorithm {
            TbAlgorithm::Cfr => Algorithm::Cfr,
            TbAlgorithm::CfrPlus => Algorithm::CfrPlus,
            TbAlgorithm::PcfrPlus => Algorithm::PcfrPlus,
            TbAlgorithm::CfrMwu => Algorithm::CfrMwu,
        },
        eps: c.eps,
        max_iters: c.max_iters,
        log_every: c.log_every,
        mode: if c.alternating != 0 { UpdateMode::Alternating } else { UpdateMode::Simultaneous },
        seed: 0,
        split: split_of(c.split),
        reduce: c.reduce != 0,
        edge_budget: c.edge_budget,
        fanout_cap: FANOUT_CAP,
    }
}

/// Builds both TB-DAGs and runs self-play. `config` may be NULL for the
/// defaults.
///
/// # Safety
/// `game` must be a live handle, `config` valid or NULL, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tb_solve(
    game: *const TbGame,
    config: *const TbSolveConfig,
    out: *mut *mut TbSolveResult,
) -> TbStatus {
    guard(|| {
        let g = game_ref(game)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let c = config.as_ref().copied().unwrap_or_else(|| tb_solve_config_default());
        let config = to_config(&c);
        config.validate().map_err(lib)?;
        let setup = Setup::new(g, config.build_options()).map_err(lib)?;
        let report = solve_with(g, &setup, &config, |_| {}).map_err(lib)?;
        *out = Box::into_raw(Box::new(TbSolveResult { report }));
        Ok(())
    })
}

/// # Safety
/// `result` must come from [`tb_solve`], or be NULL.
#[no_mangle]
pub unsafe extern "C" fn tb_result_free(result: *mut TbSolveResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// MAX's expected utility under the average strategies (NaN for NULL).
///
/// # Safety
/// `result` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn tb_result_value(result: *const TbSolveResult) -> f64 {
    result.as_ref().map_or(f64::NAN, |r| r.report.value)
}

/// Certified saddle gap of the average strategies (NaN for NULL).
///
/// # Safety
/// `result` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn tb_result_gap(result: *const TbSolveResult) -> f64 {
    result.as_ref().map_or(f64::NAN, |r| r.report.gap)
}

/// # Safety
/// `result` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn tb_result_iterations(result: *const TbSolveResult) -> u64 {
    result.as_ref().map_or(0, |r| r.report.iterations)
}

/// 1 if the gap target was reached.
///
/// # Safety
/// `result` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn tb_result_converged(result: *const TbSolveResult) -> u8 {
    result.as_ref().map_or(0, |r| r.report.converged as u8)
}

/// Copies one side's average realization per terminal into `buf`, which
/// must hold `tb_game_num_terminals` entries.
///
/// # Safety
/// `result` must be a live handle; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn tb_result_realization(
    result: *const TbSolveResult,
    side: TbSide,
    buf: *mut f64,
    len: usize,
) -> TbStatus {
    guard(|| {
        let r = result.as_ref().ok_or_else(|| null("result"))?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let src = match side {
            TbSide::Max => &r.report.x_avg,
            TbSide::Min => &r.report.y_avg,
        };
        if len < src.len() {
            return Err((TbStatus::BufferTooSmall, format!("buffer holds {len}, need {}", src.len())));
        }
        ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
        Ok(())
    })
}

/// Summary and convergence log as JSON. Free with [`tb_string_free`].
///
/// # Safety
/// `result` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_result_to_json(result: *const TbSolveResult, out: *mut *mut c_char) -> TbStatus {
    guard(|| {
        let r = result.as_ref().ok_or_else(|| null("result"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let rep = &r.report;
        let doc = json!({
            "algorithm": rep.algorithm,
            "iterations": rep.iterations,
            "converged": rep.converged,
            "gap": rep.gap,
            "value": rep.value,
            "log": rep.log,
            "max_realization": rep.x_avg,
            "min_realization": rep.y_avg,
        });
        *out = to_c_string(doc.to_string());
        Ok(())
    })
}
