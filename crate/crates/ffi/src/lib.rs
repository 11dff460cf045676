//! C ABI over `inclusion-lab`.
//!
//! Every function returns an [`IlStatus`]; results go through out-pointers.
//! Grids and trajectories are opaque handles owned by the caller and
//! released with their `_free` function. On failure the message is kept per
//! thread and can be copied out with [`il_last_error_message`]. Panics never
//! cross the boundary; they surface as `IL_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use inclusion_lab::discretize::{assemble, Grid, OperatorMatrices};
use inclusion_lab::equilibria::{Equilibrium, Sign};
use inclusion_lab::inclusion::{simulate, SolverConfig, Trajectory};
use inclusion_lab::spectral::{characteristic, find_eigenvalues, perturbation_direction, zero_not_eigenvalue};
use inclusion_lab::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Numerical = 3,
    BufferTooSmall = 4,
    OutOfRange = 5,
    Panic = 6,
}

/// Opaque grid with its assembled operators.
pub struct IlGrid {
    ops: OperatorMatrices,
}

/// Opaque result of [`il_simulate`].
pub struct IlTrajectory {
    inner: Trajectory,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(err: &Error) -> IlStatus {
    match err {
        Error::InvalidMesh(_)
        | Error::DimensionMismatch { .. }
        | Error::OutOfDomain(_)
        | Error::InvalidArgument(_)
        | Error::InvalidConfig(_)
        | Error::TooManyEigenpairs { .. }
        | Error::NotAnEigenvalue { .. } => IlStatus::InvalidArgument,
        _ => IlStatus::Numerical,
    }
}

/// Runs `f`, recording errors and containing panics.
fn guard(f: impl FnOnce() -> Result<(), IlStatus>) -> IlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => IlStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("panic inside inclusion-lab");
            IlStatus::Panic
        }
    }
}

fn lift<T>(r: inclusion_lab::Result<T>) -> Result<T, IlStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), IlStatus> {
    if p.is_null() {
        set_error(format!("{name} is null"));
        return Err(IlStatus::NullPointer);
    }
    Ok(())
}

fn sign_of(sign: i32) -> Result<Sign, IlStatus> {
    match sign {
        1 => Ok(Sign::Plus),
        -1 => Ok(Sign::Minus),
        _ => {
            set_error(format!("sign must be 1 or -1, got {sign}"));
            Err(IlStatus::InvalidArgument)
        }
    }
}

/// Copies the last error of this thread, NUL-terminated and truncated to
/// `capacity`. Returns the full message length in bytes, excluding the NUL.
///
/// # Safety
/// `buffer` must be null or point to `capacity` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn il_last_error_message(buffer: *mut c_char, capacity: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buffer.is_null() && capacity > 0 {
            let n = msg.len().min(capacity - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr() as *const c_char, buffer, n);
            *buffer.add(n) = 0;
        }
        msg.len()
    })
}

/// Aligned grid with `per_subinterval` cells on each `[k/n, (k+1)/n]`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn il_grid_new(n: usize, per_subinterval: usize, out: *mut *mut IlGrid) -> IlStatus {
    guard(|| {
        non_null(out, "out")?;
        let grid = lift(Grid::new(n, per_subinterval))?;
        *out = Box::into_raw(Box::new(IlGrid { ops: assemble(&grid) }));
        Ok(())
    })
}

/// # Safety
/// `grid` must be null or a handle from [`il_grid_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn il_grid_free(grid: *mut IlGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Number of interior nodes.
///
/// # Safety
/// `grid` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn il_grid_interior_len(grid: *const IlGrid, out: *mut usize) -> IlStatus {
    guard(|| {
        non_null(grid, "grid")?;
        non_null(out, "out")?;
        *out = (*grid).ops.grid.interior_len();
        Ok(())
    })
}

/// `D(λ)` for `n ≥ 2`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn il_characteristic(n: usize, lambda: f64, out: *mut f64) -> IlStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = lift(characteristic(n, lambda))?;
        Ok(())
    })
}

/// The `count` lowest eigenvalues of the linearization at `vₙ±`.
///
/// # Safety
/// `buffer` must hold `capacity` doubles; `written` and `negative_count`
/// must be writable (`negative_count` may be null).
#[no_mangle]
pub unsafe extern "C" fn il_find_eigenvalues(
    n: usize,
    count: usize,
    buffer: *mut f64,
    capacity: usize,
    written: *mut usize,
    negative_count: *mut usize,
) -> IlStatus {
    guard(|| {
        non_null(buffer, "buffer")?;
        non_null(written, "written")?;
        if capacity < count {
            set_error(format!("buffer holds {capacity} values, {count} requested"));
            return Err(IlStatus::BufferTooSmall);
        }
        let search = lift(find_eigenvalues(n, count, None))?;
        let k = search.eigenvalues.len();
        std::ptr::copy_nonoverlapping(search.eigenvalues.as_ptr(), buffer, k);
        *written = k;
        if !negative_count.is_null() {
            *negative_count = search.negative_count;
        }
        Ok(())
    })
}

/// `vₙ±(x)`; `sign` is `1` or `-1`, ignored for `n = 0`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn il_equilibrium_eval(n: usize, sign: i32, x: f64, out: *mut f64) -> IlStatus {
    guard(|| {
        non_null(out, "out")?;
        let s = if n == 0 { Sign::Plus } else { sign_of(sign)? };
        *out = lift(Equilibrium::new(n, s).eval(x))?;
        Ok(())
    })
}

/// Determinant of the zero-mode system, `n ≥ 2`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn il_zero_mode_determinant(n: usize, out: *mut f64) -> IlStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = lift(zero_not_eigenvalue(n))?.determinant;
        Ok(())
    })
}

/// Runs from `vₙ± + amplitude·e_index` on `grid` (aligned for `n`).
///
/// # Safety
/// `grid` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn il_simulate(
    grid: *const IlGrid,
    sign: i32,
    eigen_index: usize,
    amplitude: f64,
    dt: f64,
    t_end: f64,
    record_stride: usize,
    out: *mut *mut IlTrajectory,
) -> IlStatus {
    guard(|| {
        non_null(grid, "grid")?;
        non_null(out, "out")?;
        let ops = &(*grid).ops;
        let n = ops.grid.mode_n();
        let eq = Equilibrium::new(n, sign_of(sign)?);
        let cfg = lift(SolverConfig::new(dt, t_end).and_then(|c| c.with_stride(record_stride)))?;
        let w = lift(perturbation_direction(n, eigen_index, ops))?;
        let u0: Vec<f64> = eq.sample(&ops.grid).iter().zip(&w).map(|(a, b)| a + amplitude * b).collect();
        let traj = lift(simulate(&u0, &cfg, ops, eq))?;
        *out = Box::into_raw(Box::new(IlTrajectory { inner: traj }));
        Ok(())
    })
}

/// # Safety
/// `traj` must be null or a handle from [`il_simulate`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn il_trajectory_free(traj: *mut IlTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Number of stored snapshots.
///
/// # Safety
/// `traj` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn il_trajectory_len(traj: *const IlTrajectory, out: *mut usize) -> IlStatus {
    guard(|| {
        non_null(traj, "traj")?;
        non_null(out, "out")?;
        *out = (*traj).inner.len();
        Ok(())
    })
}

/// Time, `L²` distance to the reference equilibrium and energy of snapshot
/// `index`. Any of the out-pointers may be null.
///
/// # Safety
/// `traj` must be a live handle; non-null out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn il_trajectory_record(
    traj: *const IlTrajectory,
    index: usize,
    time: *mut f64,
    dist_l2: *mut f64,
    energy: *mut f64,
) -> IlStatus {
    guard(|| {
        non_null(traj, "traj")?;
        let t = &(*traj).inner;
        if index >= t.len() {
            set_error(format!("snapshot {index} of {}", t.len()));
            return Err(IlStatus::OutOfRange);
        }
        for (p, v) in [(time, t.times[index]), (dist_l2, t.dist_l2[index]), (energy, t.energies[index])] {
            if !p.is_null() {
                *p = v;
            }
        }
        Ok(())
    })
}

/// Copies the interior nodal values of snapshot `index`.
///
/// # Safety
/// `traj` must be a live handle, `buffer` must hold `capacity` doubles and
/// `written` must be writable.
#[no_mangle]
pub unsafe extern "C" fn il_trajectory_state(
    traj: *const IlTrajectory,
    index: usize,
    buffer: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> IlStatus {
    guard(|| {
        non_null(traj, "traj")?;
        non_null(buffer, "buffer")?;
        non_null(written, "written")?;
        let t = &(*traj).inner;
        let state = t.states.get(index).ok_or_else(|| {
            set_error(format!("snapshot {index} of {}", t.len()));
            IlStatus::OutOfRange
        })?;
        if capacity < state.len() {
            set_error(format!("buffer holds {capacity} values, state has {}", state.len()));
            return Err(IlStatus::BufferTooSmall);
        }
        std::ptr::copy_nonoverlapping(state.as_ptr(), buffer, state.len());
        *written = state.len();
        Ok(())
    })
}
