//! C ABI for the chatter-tda core.
//!
//! Conventions: every fallible call returns a [`CtStatus`] and writes its
//! result through out-pointers; heap objects travel as opaque handles with
//! explicit `_free` functions; the message for the most recent failure on the
//! current thread is available through [`ct_last_error_message`]. Panics are
//! caught at the boundary and surfaced as [`CtStatus::Panic`].
//!
//! The header is generated into `include/chatter_tda.h` by the build script.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use chatter_tda::classifier::LogisticModel;
use chatter_tda::embedding::EmbeddingConfig;
use chatter_tda::features::{Normalizer, FEATURE_DIM};
use chatter_tda::pipeline::features_for_series;
use chatter_tda::stability::{analytic_min_b, min_boundary_at};
use chatter_tda::turning::{
    simulate_deterministic, simulate_stochastic, InitialHistory, SimConfig, StochasticParams,
    TimeSeries, TurningParams,
};
use chatter_tda::Error;

/// Status code returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CtStatus {
    Ok = 0,
    /// Input outside a function's mathematical domain.
    Domain = 1,
    /// |y| exceeded the blow-up bound during integration.
    SimulationDiverged = 2,
    InsufficientSamples = 3,
    /// Constant series; the embedding delay is undefined.
    ZeroVariance = 4,
    /// Point cloud exceeds the H1 capacity limit.
    CapacityExceeded = 5,
    InvalidDiagram = 6,
    SingleClass = 7,
    Config = 8,
    Parse = 9,
    Io = 10,
    Json = 11,
    /// A required pointer argument was null.
    NullArgument = 12,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 13,
    /// A panic was caught at the FFI boundary.
    Panic = 14,
}

/// Pre-cut history selector for [`CtSimConfig`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CtHistoryMode {
    /// Tool at the unloaded position y = 0 before the cut.
    Zero = 0,
    /// Tool at equilibrium plus `history_offset` before the cut.
    EquilibriumOffset = 1,
}

/// Turning model parameters. Field-for-field mirror of the core struct.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CtTurningParams {
    /// Damping ratio ζ.
    pub zeta: f64,
    /// Nondimensional depth of cut b ≥ 0.
    pub b: f64,
    /// Nondimensional feed ρ.
    pub rho: f64,
    /// Force-law exponent α ∈ (0, 1].
    pub alpha: f64,
    /// Speed ratio Ω/ωₙ.
    pub speed_ratio: f64,
}

/// Integration settings. `ct_sim_config_default` fills the standard values.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CtSimConfig {
    /// Integration steps per delay interval.
    pub steps_per_delay: u32,
    /// Horizon in delay intervals.
    pub horizon_delays: u32,
    /// RNG seed (stochastic runs only).
    pub seed: u64,
    /// Divergence bound on |y|.
    pub blowup: f64,
    /// Pre-cut history selector.
    pub history_mode: CtHistoryMode,
    /// Offset above equilibrium; read only in EQUILIBRIUM_OFFSET mode.
    pub history_offset: f64,
}

/// Opaque simulated time series.
pub struct CtSeries {
    inner: TimeSeries,
}

/// Opaque classifier: a logistic model plus the normalizer it was fitted with.
pub struct CtClassifier {
    model: LogisticModel,
    normalizer: Normalizer,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: &str) {
    let owned = CString::new(msg).unwrap_or_else(|_| CString::new("invalid error text").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(owned));
}

fn fail(err: &Error) -> CtStatus {
    set_last_error(&err.to_string());
    match err {
        Error::Domain(_) => CtStatus::Domain,
        Error::SimulationDiverged { .. } => CtStatus::SimulationDiverged,
        Error::InsufficientSamples(_) => CtStatus::InsufficientSamples,
        Error::ZeroVariance => CtStatus::ZeroVariance,
        Error::CapacityExceeded { .. } => CtStatus::CapacityExceeded,
        Error::InvalidDiagram(_) => CtStatus::InvalidDiagram,
        Error::SingleClass => CtStatus::SingleClass,
        Error::Config(_) => CtStatus::Config,
        Error::Parse(_) => CtStatus::Parse,
        Error::Io(_) => CtStatus::Io,
        Error::Json(_) => CtStatus::Json,
    }
}

fn guard<F: FnOnce() -> CtStatus>(f: F) -> CtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_last_error("panic caught at the FFI boundary");
            CtStatus::Panic
        }
    }
}

macro_rules! nonnull {
    ($ptr:expr) => {
        if $ptr.is_null() {
            set_last_error(concat!("null argument: ", stringify!($ptr)));
            return CtStatus::NullArgument;
        }
    };
}

impl CtTurningParams {
    fn to_core(self) -> TurningParams {
        TurningParams {
            zeta: self.zeta,
            b: self.b,
            rho: self.rho,
            alpha: self.alpha,
            speed_ratio: self.speed_ratio,
        }
    }
}

impl CtSimConfig {
    fn to_core(self) -> SimConfig {
        SimConfig {
            steps_per_delay: self.steps_per_delay,
            horizon_delays: self.horizon_delays,
            seed: self.seed,
            blowup: self.blowup,
            history: match self.history_mode {
                CtHistoryMode::Zero => InitialHistory::Zero,
                CtHistoryMode::EquilibriumOffset => {
                    InitialHistory::EquilibriumOffset { offset: self.history_offset }
                }
            },
        }
    }
}

/// Library version as a static NUL-terminated string. Never fails.
#[no_mangle]
pub extern "C" fn ct_version() -> *const c_char {
    const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr() as *const c_char
}

/// Length of the feature vector produced by `ct_series_features` and
/// consumed by `ct_classifier_predict`.
#[no_mangle]
pub extern "C" fn ct_feature_dim() -> usize {
    FEATURE_DIM
}

/// Copies the message of the most recent failure on this thread into `buf`
/// (NUL-terminated, truncated to `cap` bytes) and returns the buffer size the
/// full message needs, including the NUL. Returns 0 if no failure has been
/// recorded. `buf` may be null to query the size.
#[no_mangle]
pub unsafe extern "C" fn ct_last_error_message(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let slot = slot.borrow();
        let Some(msg) = slot.as_ref() else { return 0 };
        let bytes = msg.as_bytes_with_nul();
        if !buf.is_null() && cap > 0 {
            let n = cap.min(bytes.len());
            ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, n);
            // Always terminate, even when truncating.
            *buf.add(n - 1) = 0;
        }
        bytes.len()
    })
}

/// Default integration settings.
#[no_mangle]
pub extern "C" fn ct_sim_config_default() -> CtSimConfig {
    let core = SimConfig::default();
    let (history_mode, history_offset) = match core.history {
        InitialHistory::Zero => (CtHistoryMode::Zero, 0.0),
        InitialHistory::EquilibriumOffset { offset } => {
            (CtHistoryMode::EquilibriumOffset, offset)
        }
    };
    CtSimConfig {
        steps_per_delay: core.steps_per_delay,
        horizon_delays: core.horizon_delays,
        seed: core.seed,
        blowup: core.blowup,
        history_mode,
        history_offset,
    }
}

/// Integrates the deterministic model and writes a new series handle to
/// `out`. The caller owns the handle and must release it with
/// `ct_series_free`.
#[no_mangle]
pub unsafe extern "C" fn ct_simulate_deterministic(
    params: CtTurningParams,
    config: CtSimConfig,
    out: *mut *mut CtSeries,
) -> CtStatus {
    guard(|| {
        nonnull!(out);
        match simulate_deterministic(&params.to_core(), &config.to_core()) {
            Ok(ts) => {
                *out = Box::into_raw(Box::new(CtSeries { inner: ts }));
                CtStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Integrates the stochastic model with diffusion coefficient `delta` and
/// writes a new series handle to `out`. The caller owns the handle.
#[no_mangle]
pub unsafe extern "C" fn ct_simulate_stochastic(
    params: CtTurningParams,
    delta: f64,
    config: CtSimConfig,
    out: *mut *mut CtSeries,
) -> CtStatus {
    guard(|| {
        nonnull!(out);
        let sparams = StochasticParams { base: params.to_core(), delta };
        match simulate_stochastic(&sparams, &config.to_core()) {
            Ok(ts) => {
                *out = Box::into_raw(Box::new(CtSeries { inner: ts }));
                CtStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Number of samples in the series; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn ct_series_len(series: *const CtSeries) -> usize {
    if series.is_null() {
        return 0;
    }
    (*series).inner.values.len()
}

/// Sample spacing; NaN for a null handle.
#[no_mangle]
pub unsafe extern "C" fn ct_series_dt(series: *const CtSeries) -> f64 {
    if series.is_null() {
        return f64::NAN;
    }
    (*series).inner.dt
}

/// Time of the first sample; NaN for a null handle.
#[no_mangle]
pub unsafe extern "C" fn ct_series_t0(series: *const CtSeries) -> f64 {
    if series.is_null() {
        return f64::NAN;
    }
    (*series).inner.t0
}

/// Copies up to `cap` samples into `buf` and returns the series length, so a
/// short return value ≤ cap means the copy was complete. `buf` may be null to
/// query the length.
#[no_mangle]
pub unsafe extern "C" fn ct_series_values(
    series: *const CtSeries,
    buf: *mut f64,
    cap: usize,
) -> usize {
    if series.is_null() {
        return 0;
    }
    let values = &(*series).inner.values;
    if !buf.is_null() && cap > 0 {
        let n = cap.min(values.len());
        ptr::copy_nonoverlapping(values.as_ptr(), buf, n);
    }
    values.len()
}

/// Releases a series handle. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn ct_series_free(series: *mut CtSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// Runs the full feature map on a series — truncate to the second half,
/// subsample, delay-embed, persistence, diagram features — and writes
/// `ct_feature_dim()` values to `out`. Pass 0 for `subsample_count` or
/// `embed_dim` to use the standard values (264 and 3).
#[no_mangle]
pub unsafe extern "C" fn ct_series_features(
    series: *const CtSeries,
    subsample_count: usize,
    embed_dim: usize,
    out: *mut f64,
) -> CtStatus {
    guard(|| {
        nonnull!(series);
        nonnull!(out);
        let defaults = EmbeddingConfig::default();
        let cfg = EmbeddingConfig {
            subsample_count: if subsample_count == 0 { defaults.subsample_count } else { subsample_count },
            embed_dim: if embed_dim == 0 { defaults.embed_dim } else { embed_dim },
        };
        match features_for_series(&(*series).inner, &cfg) {
            Ok(row) => {
                ptr::copy_nonoverlapping(row.as_ptr(), out, FEATURE_DIM);
                CtStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Builds a classifier from the JSON forms of a trained model and its
/// normalizer (the `model.json` / `normalizer.json` files written by the
/// CLI). The caller owns the handle and must release it with
/// `ct_classifier_free`.
#[no_mangle]
pub unsafe extern "C" fn ct_classifier_from_json(
    model_json: *const c_char,
    normalizer_json: *const c_char,
    out: *mut *mut CtClassifier,
) -> CtStatus {
    guard(|| {
        nonnull!(model_json);
        nonnull!(normalizer_json);
        nonnull!(out);
        let model_str = match std::ffi::CStr::from_ptr(model_json).to_str() {
            Ok(s) => s,
            Err(_) => {
                set_last_error("model JSON is not valid UTF-8");
                return CtStatus::InvalidUtf8;
            }
        };
        let norm_str = match std::ffi::CStr::from_ptr(normalizer_json).to_str() {
            Ok(s) => s,
            Err(_) => {
                set_last_error("normalizer JSON is not valid UTF-8");
                return CtStatus::InvalidUtf8;
            }
        };
        let model: LogisticModel = match serde_json::from_str(model_str) {
            Ok(m) => m,
            Err(e) => return fail(&Error::Json(e)),
        };
        let normalizer: Normalizer = match serde_json::from_str(norm_str) {
            Ok(n) => n,
            Err(e) => return fail(&Error::Json(e)),
        };
        if let Err(e) = model.validate() {
            return fail(&e);
        }
        if let Err(e) = normalizer.validate() {
            return fail(&e);
        }
        *out = Box::into_raw(Box::new(CtClassifier { model, normalizer }));
        CtStatus::Ok
    })
}

/// Classifies one raw (un-normalized) feature row of `ct_feature_dim()`
/// values. Writes the chatter probability to `probability` and the hard
/// label (probability ≥ 0.5) to `label`; either out-pointer may be null if
/// that output is not needed.
#[no_mangle]
pub unsafe extern "C" fn ct_classifier_predict(
    classifier: *const CtClassifier,
    features: *const f64,
    probability: *mut f64,
    label: *mut bool,
) -> CtStatus {
    guard(|| {
        nonnull!(classifier);
        nonnull!(features);
        let clf = &*classifier;
        let raw = slice::from_raw_parts(features, FEATURE_DIM);
        let mut row = [0.0f64; FEATURE_DIM];
        row.copy_from_slice(raw);
        let z = clf.normalizer.apply(&row);
        let p = clf.model.predict_proba(&z);
        if !probability.is_null() {
            *probability = p;
        }
        if !label.is_null() {
            *label = p >= 0.5;
        }
        CtStatus::Ok
    })
}

/// Releases a classifier handle. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn ct_classifier_free(classifier: *mut CtClassifier) {
    if !classifier.is_null() {
        drop(Box::from_raw(classifier));
    }
}

/// Closed-form global minimum of the stability boundary,
/// b_min = 2ζ(1+ζ)/(α ρ^(α−1)). Returns NaN (and records an error) for
/// parameters outside the model's domain.
#[no_mangle]
pub extern "C" fn ct_stability_min_b(zeta: f64, rho: f64, alpha: f64) -> f64 {
    if !(zeta > 0.0) || !(rho > 0.0) || !(alpha > 0.0 && alpha <= 1.0) {
        set_last_error("min_b needs zeta > 0, rho > 0 and alpha in (0, 1]");
        return f64::NAN;
    }
    analytic_min_b(zeta, rho, alpha)
}

/// Critical depth of cut b_lim at one spindle speed ratio: the lower
/// envelope of the stability lobes evaluated exactly at `speed_ratio`.
#[no_mangle]
pub unsafe extern "C" fn ct_stability_b_lim(
    zeta: f64,
    rho: f64,
    alpha: f64,
    speed_ratio: f64,
    out: *mut f64,
) -> CtStatus {
    guard(|| {
        nonnull!(out);
        if !(speed_ratio > 0.0) {
            return fail(&Error::Domain(format!(
                "speed ratio must be positive, got {speed_ratio}"
            )));
        }
        // A sliver of a range around the query point; the requested speed is
        // spliced into the grid, so the envelope is evaluated exactly there.
        let range = (speed_ratio * 0.999, speed_ratio * 1.001);
        match min_boundary_at(zeta, rho, alpha, range, 2, &[speed_ratio]) {
            Ok(boundary) => {
                *out = boundary.b_lim_at(speed_ratio);
                CtStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}
