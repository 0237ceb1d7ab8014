//! C ABI for the topiceval toolkit.
//!
//! Every fallible function returns a [`TeStatus`]. On failure a message is
//! kept per thread and can be fetched with [`te_last_error_message`].
//! Strings handed out by this library must be released with
//! [`te_string_free`]; models with [`te_model_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use topiceval::classifiers::{
    gradcheck_model, load_model, random_gradcheck_model, GradcheckOptions, ModelKind, TopicModel,
};
use topiceval::dialog::{Conversation, ConversationRecord};
use topiceval::metrics::{compute_report, correlate_tsv, spearman};
use topiceval::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Parse = 4,
    Load = 5,
    Data = 6,
    Config = 7,
    Shape = 8,
    MissingTopic = 9,
    /// Too few points for a statistic.
    Insufficient = 10,
    /// Statistic undefined, e.g. zero rank variance.
    Undefined = 11,
    BufferTooSmall = 12,
    Panic = 13,
}

/// Opaque handle to a loaded DAN or ADAN classifier.
pub struct TeModel {
    inner: TopicModel,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let msg = CString::new(message.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn fail(status: TeStatus, message: impl Into<String>) -> TeStatus {
    set_error(message);
    status
}

fn status_of(err: &Error) -> TeStatus {
    match err {
        Error::Io { .. } => TeStatus::Io,
        Error::Parse { .. } | Error::Json(_) => TeStatus::Parse,
        Error::Load(_) => TeStatus::Load,
        Error::Data(_) | Error::EmptyUtterance => TeStatus::Data,
        Error::Config(_) => TeStatus::Config,
        Error::Shape(_) => TeStatus::Shape,
        Error::MissingTopic { .. } => TeStatus::MissingTopic,
    }
}

fn from_error(err: Error) -> TeStatus {
    fail(status_of(&err), err.to_string())
}

/// Runs `f`, converting panics into `TeStatus::Panic`.
fn guard(f: impl FnOnce() -> Result<(), TeStatus>) -> TeStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TeStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(TeStatus::Panic, "internal panic"),
    }
}

unsafe fn read_str<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, TeStatus> {
    if ptr.is_null() {
        return Err(fail(TeStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| fail(TeStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn write_string(out: *mut *mut c_char, value: String) -> Result<(), TeStatus> {
    if out.is_null() {
        return Err(fail(TeStatus::NullPointer, "output pointer is null"));
    }
    let c = CString::new(value).map_err(|_| fail(TeStatus::Data, "result contains a NUL byte"))?;
    *out = c.into_raw();
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn te_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copy of the calling thread's last error message, or NULL if the last
/// call succeeded. Free with `te_string_free`.
#[no_mangle]
pub extern "C" fn te_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().clone().map_or(std::ptr::null_mut(), CString::into_raw))
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn te_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Loads a model file and stores a new handle in `*out`.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn te_model_load(path: *const c_char, out: *mut *mut TeModel) -> TeStatus {
    guard(|| {
        let path = read_str(path, "path")?;
        if out.is_null() {
            return Err(fail(TeStatus::NullPointer, "output pointer is null"));
        }
        let inner = load_model(Path::new(path)).map_err(from_error)?;
        *out = Box::into_raw(Box::new(TeModel { inner }));
        Ok(())
    })
}

/// # Safety
/// `model` must be NULL or a handle from `te_model_load`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn te_model_free(model: *mut TeModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

unsafe fn model_ref<'a>(model: *const TeModel) -> Result<&'a TopicModel, TeStatus> {
    model
        .as_ref()
        .map(|m| &m.inner)
        .ok_or_else(|| fail(TeStatus::NullPointer, "model is null"))
}

/// Number of topic labels of the model.
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn te_model_num_labels(model: *const TeModel, out: *mut usize) -> TeStatus {
    guard(|| {
        let m = model_ref(model)?;
        if out.is_null() {
            return Err(fail(TeStatus::NullPointer, "output pointer is null"));
        }
        *out = m.labels().len();
        Ok(())
    })
}

/// Topic probabilities of `text`, written to `probs[0..len]`. `len` must
/// equal the number of labels.
///
/// # Safety
/// `model` must be a live handle, `text` NUL-terminated and `probs` valid
/// for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn te_model_probs(
    model: *const TeModel,
    text: *const c_char,
    probs: *mut f64,
    len: usize,
) -> TeStatus {
    guard(|| {
        let m = model_ref(model)?;
        let text = read_str(text, "text")?;
        if probs.is_null() {
            return Err(fail(TeStatus::NullPointer, "probs is null"));
        }
        if len != m.labels().len() {
            return Err(fail(
                TeStatus::BufferTooSmall,
                format!("buffer holds {len} values, model has {} labels", m.labels().len()),
            ));
        }
        let p = m.predict(text);
        std::slice::from_raw_parts_mut(probs, len).copy_from_slice(&p.probs);
        Ok(())
    })
}

/// Prediction for `text` as a JSON object with `topic`, `probs`,
/// `normalized_entropy`, `keywords` (ADAN only) and `empty`.
///
/// # Safety
/// `model` must be a live handle, `text` NUL-terminated, `out_json`
/// writable. Free the result with `te_string_free`.
#[no_mangle]
pub unsafe extern "C" fn te_model_predict(
    model: *const TeModel,
    text: *const c_char,
    n_keywords: usize,
    out_json: *mut *mut c_char,
) -> TeStatus {
    guard(|| {
        let m = model_ref(model)?;
        let text = read_str(text, "text")?;
        let p = m.predict_with_keywords(text, n_keywords.max(1), None);
        let keywords = p
            .keywords
            .map(|ks| ks.into_iter().map(|k| serde_json::json!({"token": k.token, "saliency": k.saliency})).collect::<Vec<_>>());
        let value = serde_json::json!({
            "topic": p.topic,
            "labels": m.labels(),
            "probs": p.probs,
            "normalized_entropy": p.normalized_entropy,
            "keywords": keywords,
            "empty": p.empty,
        });
        write_string(out_json, value.to_string())
    })
}

fn parse_conversations(jsonl: &str) -> Result<Vec<Conversation>, TeStatus> {
    jsonl
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            let rec: ConversationRecord = serde_json::from_str(line)
                .map_err(|e| fail(TeStatus::Parse, format!("line {}: {e}", i + 1)))?;
            Conversation::try_from(rec).map_err(|e| fail(status_of(&e), format!("line {}: {e}", i + 1)))
        })
        .collect()
}

/// Per-bot metrics for classified conversations given as JSONL text.
/// `canonical_topics` is a comma-separated list (may be empty). Either
/// output pointer may be NULL to skip that format.
///
/// # Safety
/// String arguments must be NUL-terminated; non-NULL outputs writable.
#[no_mangle]
pub unsafe extern "C" fn te_metrics_report(
    conversations_jsonl: *const c_char,
    canonical_topics: *const c_char,
    out_json: *mut *mut c_char,
    out_tsv: *mut *mut c_char,
) -> TeStatus {
    guard(|| {
        let jsonl = read_str(conversations_jsonl, "conversations")?;
        let topics: Vec<String> = read_str(canonical_topics, "canonical_topics")?
            .split(',')
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect();
        let convs = parse_conversations(jsonl)?;
        let report = compute_report(&convs, &topics).map_err(from_error)?;
        if !out_json.is_null() {
            write_string(out_json, report.to_json().map_err(from_error)?)?;
        }
        if !out_tsv.is_null() {
            write_string(out_tsv, report.to_tsv())?;
        }
        Ok(())
    })
}

/// Correlates every metric column of a per-bot TSV with its `mean_rating`
/// column; the result is a TSV of `metric, rho, n_bots, status`.
///
/// # Safety
/// `metrics_tsv` must be NUL-terminated; `out_tsv` writable.
#[no_mangle]
pub unsafe extern "C" fn te_correlate_tsv(metrics_tsv: *const c_char, out_tsv: *mut *mut c_char) -> TeStatus {
    guard(|| {
        let text = read_str(metrics_tsv, "metrics_tsv")?;
        let (_, out) = correlate_tsv(text).map_err(from_error)?;
        write_string(out_tsv, out)
    })
}

/// Spearman rank correlation with average ranks for ties.
///
/// # Safety
/// `x` and `y` must be valid for `n` reads; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn te_spearman(x: *const f64, y: *const f64, n: usize, out: *mut f64) -> TeStatus {
    guard(|| {
        if x.is_null() || y.is_null() || out.is_null() {
            return Err(fail(TeStatus::NullPointer, "null argument"));
        }
        if n < 2 {
            return Err(fail(TeStatus::Insufficient, format!("need at least 2 points, got {n}")));
        }
        let (xs, ys) = (std::slice::from_raw_parts(x, n), std::slice::from_raw_parts(y, n));
        if xs.iter().chain(ys).any(|v| !v.is_finite()) {
            return Err(fail(TeStatus::Data, "non-finite input"));
        }
        *out = spearman(xs, ys).ok_or_else(|| fail(TeStatus::Undefined, "zero rank variance"))?;
        Ok(())
    })
}

/// Gradient check of a small random model (`"dan"` or `"adan"`); writes
/// the largest relative error.
///
/// # Safety
/// `kind` must be NUL-terminated; `max_relative_error` writable.
#[no_mangle]
pub unsafe extern "C" fn te_gradcheck(kind: *const c_char, seed: u64, max_relative_error: *mut f64) -> TeStatus {
    guard(|| {
        let kind: ModelKind = read_str(kind, "kind")?.parse().map_err(from_error)?;
        if max_relative_error.is_null() {
            return Err(fail(TeStatus::NullPointer, "output pointer is null"));
        }
        let (model, examples) = random_gradcheck_model(kind, seed);
        let options = GradcheckOptions {
            seed,
            ..Default::default()
        };
        let report = gradcheck_model(&model, &examples, &options).map_err(from_error)?;
        *max_relative_error = report.max_relative_error;
        Ok(())
    })
}
