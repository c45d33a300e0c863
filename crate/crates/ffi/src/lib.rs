//! C ABI over `effhedge-core`.
//!
//! Every fallible call returns an [`EhStatus`] and writes results through out
//! pointers. On failure the message is available from
//! [`eh_last_error_message`] on the same thread until the next failure.
//! Handles are opaque; release them with the matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use effhedge::analytic_pricing::{norm_cdf, perfect_hedge_price};
use effhedge::efficient_hedging::{calibrate_linear, calibrate_power, DMode, HedgePlan};
use effhedge::monte_carlo::{generator_for, mc_price, McConfig, Measure, PathGrid};
use effhedge::term_structure::{Breakpoint, CoefficientCurve, MarketModel};
use effhedge::{Error, ErrorKind};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EhStatus {
    Ok = 0,
    NullPointer = 1,
    Validation = 2,
    Numerical = 3,
    Io = 4,
    Panic = 5,
}

/// Threshold rule for the linear-loss plan.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EhLinearMode {
    Min = 0,
    Max = 1,
}

/// Integrated volatility quantities of the window `[t, T]`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EhIntegrated {
    pub sigma_total: f64,
    pub theta_total: f64,
    pub alpha: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EhMcEstimate {
    pub mean: f64,
    pub std_error: f64,
}

/// Opaque market model.
pub struct EhModel(MarketModel);

/// Opaque calibrated hedging plan.
pub struct EhPlan(HedgePlan);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

enum Failure {
    Null(&'static str),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn set_last_error(message: String) {
    let message = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = message);
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> EhStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => EhStatus::Ok,
        Ok(Err(Failure::Null(name))) => {
            set_last_error(format!("null pointer passed as `{name}`"));
            EhStatus::NullPointer
        }
        Ok(Err(Failure::Core(e))) => {
            set_last_error(e.to_string());
            match e.kind() {
                ErrorKind::Validation => EhStatus::Validation,
                ErrorKind::Numerical => EhStatus::Numerical,
                ErrorKind::Io => EhStatus::Io,
            }
        }
        Err(_) => {
            set_last_error("internal panic".into());
            EhStatus::Panic
        }
    }
}

unsafe fn out_ref<'a, T>(ptr: *mut T, name: &'static str) -> Result<&'a mut T, Failure> {
    ptr.as_mut().ok_or(Failure::Null(name))
}

unsafe fn in_ref<'a, T>(ptr: *const T, name: &'static str) -> Result<&'a T, Failure> {
    ptr.as_ref().ok_or(Failure::Null(name))
}

unsafe fn slice<'a>(ptr: *const f64, len: usize, name: &'static str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(Failure::Null(name));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Message of the last failed call on this thread, or an empty string.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn eh_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn eh_norm_cdf(z: f64) -> f64 {
    norm_cdf(z)
}

/// Constant-coefficient model.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn eh_model_standard(
    m: f64,
    sigma: f64,
    spot: f64,
    strike: f64,
    horizon: f64,
    out: *mut *mut EhModel,
) -> EhStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = boxed(EhModel(MarketModel::standard(
            m, sigma, spot, strike, horizon,
        )?));
        Ok(())
    })
}

/// Piecewise-constant coefficients: on `[times[i], times[i+1])` the drift is
/// `m[i]` and the volatility `sigma[i]`; the last piece runs to `domain_end`.
///
/// # Safety
/// `times`, `m` and `sigma` must each point to `len` readable values; `out`
/// must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn eh_model_time_varying(
    times: *const f64,
    m: *const f64,
    sigma: *const f64,
    len: usize,
    domain_end: f64,
    spot: f64,
    strike: f64,
    horizon: f64,
    out: *mut *mut EhModel,
) -> EhStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let (times, m, sigma) = (
            slice(times, len, "times")?,
            slice(m, len, "m")?,
            slice(sigma, len, "sigma")?,
        );
        let breakpoints = (0..len)
            .map(|i| Breakpoint {
                t: times[i],
                m: m[i],
                sigma: sigma[i],
            })
            .collect();
        let curve = CoefficientCurve::new(breakpoints, domain_end)?;
        *out = boxed(EhModel(MarketModel::time_varying(
            curve, spot, strike, horizon,
        )?));
        Ok(())
    })
}

/// Fractional model with Hurst index in `(1/2, 1)`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn eh_model_fractional(
    m: f64,
    sigma: f64,
    hurst: f64,
    spot: f64,
    strike: f64,
    horizon: f64,
    out: *mut *mut EhModel,
) -> EhStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = boxed(EhModel(MarketModel::fractional(
            m, sigma, hurst, spot, strike, horizon,
        )?));
        Ok(())
    })
}

/// # Safety
/// `model` must be null or a handle from an `eh_model_*` constructor that
/// has not been freed.
#[no_mangle]
pub unsafe extern "C" fn eh_model_free(model: *mut EhModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// `model` must be a live handle; `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn eh_integrated_quantities(
    model: *const EhModel,
    t: f64,
    out: *mut EhIntegrated,
) -> EhStatus {
    guard(|| {
        let model = in_ref(model, "model")?;
        let out = out_ref(out, "out")?;
        let iq = model.0.window(t)?;
        *out = EhIntegrated {
            sigma_total: iq.sigma_total(),
            theta_total: iq.theta_total(),
            alpha: iq.alpha(),
        };
        Ok(())
    })
}

/// # Safety
/// `model` must be a live handle; `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn eh_perfect_hedge_price(
    model: *const EhModel,
    t: f64,
    x: f64,
    out: *mut f64,
) -> EhStatus {
    guard(|| {
        let model = in_ref(model, "model")?;
        let out = out_ref(out, "out")?;
        *out = perfect_hedge_price(&model.0, t, x)?;
        Ok(())
    })
}

/// Power-loss plan costing `budget`.
///
/// # Safety
/// `model` must be a live handle; `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn eh_calibrate_power(
    model: *const EhModel,
    p: f64,
    budget: f64,
    out: *mut *mut EhPlan,
) -> EhStatus {
    guard(|| {
        let model = in_ref(model, "model")?;
        let out = out_ref(out, "out")?;
        *out = boxed(EhPlan(calibrate_power(&model.0, p, budget)?));
        Ok(())
    })
}

/// Linear-loss plan costing `budget`.
///
/// # Safety
/// `model` must be a live handle; `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn eh_calibrate_linear(
    model: *const EhModel,
    budget: f64,
    mode: EhLinearMode,
    out: *mut *mut EhPlan,
) -> EhStatus {
    guard(|| {
        let model = in_ref(model, "model")?;
        let out = out_ref(out, "out")?;
        let mode = match mode {
            EhLinearMode::Min => DMode::Min,
            EhLinearMode::Max => DMode::Max,
        };
        *out = boxed(EhPlan(calibrate_linear(&model.0, budget, mode)?));
        Ok(())
    })
}

/// # Safety
/// `plan` must be a live handle; `value` and `delta` must be null or valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn eh_plan_value_and_delta(
    plan: *const EhPlan,
    t: f64,
    x: f64,
    value: *mut f64,
    delta: *mut f64,
) -> EhStatus {
    guard(|| {
        let plan = in_ref(plan, "plan")?;
        let value = out_ref(value, "value")?;
        let delta = out_ref(delta, "delta")?;
        (*value, *delta) = plan.0.value_and_delta(t, x)?;
        Ok(())
    })
}

/// # Safety
/// `plan` must be a live handle; `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn eh_plan_budget(plan: *const EhPlan, out: *mut f64) -> EhStatus {
    guard(|| {
        let plan = in_ref(plan, "plan")?;
        *out_ref(out, "out")? = plan.0.budget();
        Ok(())
    })
}

/// # Safety
/// `plan` must be null or a handle from a calibration call that has not been
/// freed.
#[no_mangle]
pub unsafe extern "C" fn eh_plan_free(plan: *mut EhPlan) {
    if !plan.is_null() {
        drop(Box::from_raw(plan));
    }
}

/// Monte Carlo price of the model's call under the pricing measure on a
/// uniform grid. Deterministic in `seed` for any `workers`.
///
/// # Safety
/// `model` must be a live handle; `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn eh_mc_price_call(
    model: *const EhModel,
    n_paths: u64,
    steps: usize,
    seed: u64,
    workers: usize,
    out: *mut EhMcEstimate,
) -> EhStatus {
    guard(|| {
        let model = &in_ref(model, "model")?.0;
        let out = out_ref(out, "out")?;
        let grid = PathGrid::uniform(model.horizon(), steps)?;
        let generator = generator_for(model, grid, Measure::RiskNeutral)?;
        let mc = McConfig::new(n_paths, seed).with_workers(workers);
        let strike = model.strike();
        let est = mc_price(&mc, generator.as_ref(), |p| {
            (p.terminal() - strike).max(0.0)
        })?;
        *out = EhMcEstimate {
            mean: est.mean,
            std_error: est.std_error,
        };
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CStr;
    use std::ptr;

    #[test]
    fn status_codes_match_core_error_kinds() {
        assert_eq!(EhStatus::Validation as i32, ErrorKind::Validation.code());
        assert_eq!(EhStatus::Numerical as i32, ErrorKind::Numerical.code());
        assert_eq!(EhStatus::Io as i32, ErrorKind::Io.code());
    }

    #[test]
    fn panics_are_contained() {
        let status = guard(|| panic!("boom"));
        assert_eq!(status, EhStatus::Panic);
        let msg = unsafe { CStr::from_ptr(eh_last_error_message()) };
        assert_eq!(msg.to_str().unwrap(), "internal panic");
    }

    #[test]
    fn null_out_pointer_is_reported() {
        let status = unsafe { eh_model_standard(0.08, 0.2, 100.0, 100.0, 1.0, ptr::null_mut()) };
        assert_eq!(status, EhStatus::NullPointer);
    }
}
