//! C ABI over `noisy-ea`.
//!
//! Every fallible function returns an [`NeaStatus`]; on failure the message
//! is kept per thread and can be read with [`nea_last_error`]. Objects that
//! own memory are opaque handles released by their matching `*_free`.
//!
//! Bitstrings cross the boundary as `n` bytes, each 0 or 1, position 1 first.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use noisy_ea::experiment::render_csv;
use noisy_ea::{
    BitString, Error, ExperimentConfig, HitCriterion, NoiseSpec, Pmf, ProblemKind, ResultRow, RunConfig,
    SamplingSpec,
};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NeaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    SupportTooLarge = 3,
    Io = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NeaProblem {
    OneMax = 0,
    LeadingOnes = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NeaNoiseKind {
    None = 0,
    OneBit = 1,
    BitWise = 2,
}

/// `q` is ignored unless `kind` is bit-wise.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NeaNoise {
    pub kind: NeaNoiseKind,
    pub p: f64,
    pub q: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NeaRunConfig {
    pub problem: NeaProblem,
    pub n: usize,
    pub noise: NeaNoise,
    /// Sample size, at least 1.
    pub m: u64,
    /// 0 selects the library default.
    pub max_evaluations: u64,
    pub seed: u64,
    /// Count the first evaluation of an optimal offspring as the hit.
    pub hit_on_evaluation: bool,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct NeaRunResult {
    pub iterations: u64,
    pub evaluations: u64,
    pub hit: bool,
    pub censored: bool,
    pub final_true_fitness: usize,
    pub seed: u64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NeaComparison {
    pub p_ge: f64,
    pub p_gt: f64,
    pub p_eq: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NeaCondition {
    pub satisfied: bool,
    pub margin: f64,
    pub parameters_in_range: bool,
}

/// Mirrors one CSV row. `q` is NaN for one-bit noise.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NeaResultRow {
    pub n: usize,
    pub p: f64,
    pub q: f64,
    pub m: u64,
    pub runs: u64,
    pub hits: u64,
    pub censored: u64,
    pub mean_evaluations: f64,
    pub median_evaluations: f64,
    pub stddev_evaluations: f64,
    pub normalized: f64,
    pub master_seed: u64,
}

/// Opaque law of a noisy fitness value.
pub struct NeaPmf(Pmf);

/// Opaque sweep configuration plus, once run, its rows.
pub struct NeaExperiment {
    config: ExperimentConfig,
    rows: Vec<ResultRow>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(NeaStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::SupportTooLarge { .. } => NeaStatus::SupportTooLarge,
            Error::Io { .. } => NeaStatus::Io,
            _ => NeaStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(NeaStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(NeaStatus::InvalidArgument, msg.into())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> NeaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NeaStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            NeaStatus::Panic
        }
    }
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn bits(ptr: *const u8, n: usize) -> Result<BitString, Failure> {
    if ptr.is_null() {
        return Err(null("bits"));
    }
    if n == 0 {
        return Err(invalid("bitstring length must be positive"));
    }
    let raw = std::slice::from_raw_parts(ptr, n);
    let mut v = Vec::with_capacity(n);
    for (i, &b) in raw.iter().enumerate() {
        match b {
            0 => v.push(false),
            1 => v.push(true),
            _ => return Err(invalid(format!("bit {} is {b}, expected 0 or 1", i + 1))),
        }
    }
    Ok(BitString::from_bits(&v)?)
}

unsafe fn text<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if ptr.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| invalid(format!("{what} is not valid UTF-8")))
}

fn problem(p: NeaProblem) -> ProblemKind {
    match p {
        NeaProblem::OneMax => ProblemKind::OneMax,
        NeaProblem::LeadingOnes => ProblemKind::LeadingOnes,
    }
}

fn noise(n: NeaNoise) -> Result<NoiseSpec, Failure> {
    let spec = match n.kind {
        NeaNoiseKind::None => NoiseSpec::Noiseless,
        NeaNoiseKind::OneBit => NoiseSpec::OneBit { p: n.p },
        NeaNoiseKind::BitWise => NoiseSpec::BitWise { p: n.p, q: n.q },
    };
    spec.validate()?;
    Ok(spec)
}

fn row(r: &ResultRow) -> NeaResultRow {
    NeaResultRow {
        n: r.n,
        p: r.p,
        q: r.q.unwrap_or(f64::NAN),
        m: r.m,
        runs: r.runs,
        hits: r.hits,
        censored: r.censored,
        mean_evaluations: r.mean_evaluations,
        median_evaluations: r.median_evaluations,
        stddev_evaluations: r.stddev_evaluations,
        normalized: r.normalized,
        master_seed: r.master_seed,
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn nea_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failure on this thread, or null if none. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn nea_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `bits` must point to `n` readable bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nea_true_fitness(p: NeaProblem, bits_ptr: *const u8, n: usize, out: *mut usize) -> NeaStatus {
    guard(|| {
        let x = bits(bits_ptr, n)?;
        write(out, noisy_ea::true_fitness(problem(p), &x))
    })
}

/// One run of the (1+1)-EA.
///
/// # Safety
/// `config` must be readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nea_run(config: *const NeaRunConfig, out: *mut NeaRunResult) -> NeaStatus {
    guard(|| {
        let c = config.as_ref().ok_or_else(|| null("config"))?;
        let mut rc = RunConfig::new(problem(c.problem), c.n, noise(c.noise)?)
            .with_sampling(SamplingSpec::new(c.m)?)
            .with_seed(c.seed)
            .with_hit(if c.hit_on_evaluation {
                HitCriterion::Evaluation
            } else {
                HitCriterion::State
            });
        if c.max_evaluations > 0 {
            rc = rc.with_max_evaluations(c.max_evaluations);
        }
        let r = noisy_ea::run(&rc)?;
        write(
            out,
            NeaRunResult {
                iterations: r.iterations,
                evaluations: r.evaluations,
                hit: r.hit,
                censored: r.censored,
                final_true_fitness: r.final_true_fitness,
                seed: r.seed,
            },
        )
    })
}

/// Exact law of the noisy fitness of `bits`. Release with [`nea_pmf_free`].
///
/// # Safety
/// `bits` must point to `n` readable bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nea_pmf_new(
    p: NeaProblem,
    bits_ptr: *const u8,
    n: usize,
    noise_model: NeaNoise,
    out: *mut *mut NeaPmf,
) -> NeaStatus {
    guard(|| {
        let x = bits(bits_ptr, n)?;
        let d = noisy_ea::noisy_pmf(problem(p), &x, noise(noise_model)?);
        write(out, Box::into_raw(Box::new(NeaPmf(d))))
    })
}

/// Law of the sum of `m` independent copies.
///
/// # Safety
/// `pmf` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nea_pmf_m_fold(pmf: *const NeaPmf, m: u64, out: *mut *mut NeaPmf) -> NeaStatus {
    guard(|| {
        let d = pmf.as_ref().ok_or_else(|| null("pmf"))?;
        let s = noisy_ea::m_fold_sum_pmf(&d.0, m)?;
        write(out, Box::into_raw(Box::new(NeaPmf(s))))
    })
}

/// # Safety
/// `pmf` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nea_pmf_free(pmf: *mut NeaPmf) {
    if !pmf.is_null() {
        drop(Box::from_raw(pmf));
    }
}

/// Number of support points `0..=max`, i.e. `max + 1`; 0 for null.
///
/// # Safety
/// `pmf` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nea_pmf_len(pmf: *const NeaPmf) -> usize {
    pmf.as_ref().map_or(0, |d| d.0.masses().len())
}

/// Copies the masses into `buf`. Fails with `BUFFER_TOO_SMALL` if `len` is
/// below [`nea_pmf_len`].
///
/// # Safety
/// `pmf` must be a live handle; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn nea_pmf_masses(pmf: *const NeaPmf, buf: *mut f64, len: usize) -> NeaStatus {
    guard(|| {
        let d = pmf.as_ref().ok_or_else(|| null("pmf"))?;
        let masses = d.0.masses();
        if buf.is_null() {
            return Err(null("buf"));
        }
        if len < masses.len() {
            return Err(Failure(
                NeaStatus::BufferTooSmall,
                format!("need {} slots, got {len}", masses.len()),
            ));
        }
        ptr::copy_nonoverlapping(masses.as_ptr(), buf, masses.len());
        Ok(())
    })
}

/// # Safety
/// `pmf` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nea_pmf_mean(pmf: *const NeaPmf, out: *mut f64) -> NeaStatus {
    guard(|| {
        let d = pmf.as_ref().ok_or_else(|| null("pmf"))?;
        write(out, d.0.mean())
    })
}

/// `P(A >= B)`, `P(A > B)`, `P(A == B)` for independent `A ~ a`, `B ~ b`.
///
/// # Safety
/// Both handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nea_compare(a: *const NeaPmf, b: *const NeaPmf, out: *mut NeaComparison) -> NeaStatus {
    guard(|| {
        let a = a.as_ref().ok_or_else(|| null("a"))?;
        let b = b.as_ref().ok_or_else(|| null("b"))?;
        let c = noisy_ea::comparison_probability(&a.0, &b.0);
        write(
            out,
            NeaComparison {
                p_ge: c.p_ge,
                p_gt: c.p_gt,
                p_eq: c.p_eq,
            },
        )
    })
}

/// Probability that `offspring` replaces `parent` with sample size `m`.
///
/// # Safety
/// Both bit arrays must hold `n` bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nea_acceptance_probability(
    p: NeaProblem,
    parent: *const u8,
    offspring: *const u8,
    n: usize,
    noise_model: NeaNoise,
    m: u64,
    out: *mut f64,
) -> NeaStatus {
    guard(|| {
        let x = bits(parent, n)?;
        let y = bits(offspring, n)?;
        let spec = noise(noise_model)?;
        let v = noisy_ea::sampled_acceptance_probability(problem(p), &x, &y, spec, m)?;
        write(out, v)
    })
}

fn condition(r: noisy_ea::ConditionReport) -> NeaCondition {
    NeaCondition {
        satisfied: r.satisfied,
        margin: r.margin,
        parameters_in_range: r.parameters_in_range,
    }
}

/// Improvement hypothesis on LeadingOnes prefix states.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nea_check_lemma4(
    n: usize,
    noise_model: NeaNoise,
    m: u64,
    c: f64,
    l: f64,
    out: *mut NeaCondition,
) -> NeaStatus {
    guard(|| {
        let r = noisy_ea::check_lemma4(n, noise(noise_model)?, m, c, l)?;
        write(out, condition(r))
    })
}

/// Bounded-progress hypothesis near the optimum.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nea_check_lemma5(
    n: usize,
    noise_model: NeaNoise,
    m: u64,
    c: f64,
    l: f64,
    out: *mut NeaCondition,
) -> NeaStatus {
    guard(|| {
        let r = noisy_ea::check_lemma5(n, noise(noise_model)?, m, c, l)?;
        write(out, condition(r))
    })
}

/// Smallest expected-fitness gap between a prefix state and any shorter one.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nea_sampling_gap(n: usize, noise_model: NeaNoise, out: *mut f64) -> NeaStatus {
    guard(|| write(out, noisy_ea::sampling_gap(n, noise(noise_model)?)?))
}

/// Parses a key=value sweep configuration. Release with
/// [`nea_experiment_free`].
///
/// # Safety
/// `config_text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nea_experiment_parse(config_text: *const c_char, out: *mut *mut NeaExperiment) -> NeaStatus {
    guard(|| {
        let config: ExperimentConfig = text(config_text, "config_text")?.parse()?;
        config.validate()?;
        write(out, Box::into_raw(Box::new(NeaExperiment { config, rows: Vec::new() })))
    })
}

/// Overrides one configuration key, as `--set key=value` does on the CLI.
///
/// # Safety
/// `exp` must be a live handle; `key` and `value` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn nea_experiment_set(
    exp: *mut NeaExperiment,
    key: *const c_char,
    value: *const c_char,
) -> NeaStatus {
    guard(|| {
        let e = exp.as_mut().ok_or_else(|| null("experiment"))?;
        e.config.set(text(key, "key")?, text(value, "value")?)?;
        Ok(())
    })
}

/// Runs the sweep on `workers` threads, replacing any earlier rows.
///
/// # Safety
/// `exp` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn nea_experiment_run(exp: *mut NeaExperiment, workers: usize) -> NeaStatus {
    guard(|| {
        let e = exp.as_mut().ok_or_else(|| null("experiment"))?;
        e.rows = noisy_ea::run_experiment(&e.config, workers)?;
        Ok(())
    })
}

/// # Safety
/// `exp` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nea_experiment_row_count(exp: *const NeaExperiment) -> usize {
    exp.as_ref().map_or(0, |e| e.rows.len())
}

/// # Safety
/// `exp` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nea_experiment_row(exp: *const NeaExperiment, index: usize, out: *mut NeaResultRow) -> NeaStatus {
    guard(|| {
        let e = exp.as_ref().ok_or_else(|| null("experiment"))?;
        let r = e
            .rows
            .get(index)
            .ok_or_else(|| invalid(format!("row {index} out of range ({} rows)", e.rows.len())))?;
        write(out, row(r))
    })
}

/// Writes the rows as CSV to `path`.
///
/// # Safety
/// `exp` must be a live handle; `path` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn nea_experiment_write_csv(exp: *const NeaExperiment, path: *const c_char) -> NeaStatus {
    guard(|| {
        let e = exp.as_ref().ok_or_else(|| null("experiment"))?;
        noisy_ea::write_csv(&e.rows, Path::new(text(path, "path")?))?;
        Ok(())
    })
}

/// The rows as CSV text. Release with [`nea_string_free`].
///
/// # Safety
/// `exp` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nea_experiment_csv(exp: *const NeaExperiment, out: *mut *mut c_char) -> NeaStatus {
    guard(|| {
        let e = exp.as_ref().ok_or_else(|| null("experiment"))?;
        let s = CString::new(render_csv(&e.rows)).map_err(|_| invalid("CSV contains NUL"))?;
        write(out, s.into_raw())
    })
}

/// # Safety
/// `exp` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nea_experiment_free(exp: *mut NeaExperiment) {
    if !exp.is_null() {
        drop(Box::from_raw(exp));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nea_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
