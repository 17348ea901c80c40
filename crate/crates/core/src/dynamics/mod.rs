//! Time integration of the master equation and the Schrödinger equation.

mod lindblad;
pub mod ode;

use num_complex::Complex;

use crate::hamiltonian::{CollapseSet, HamiltonianModel};
use crate::quantum::{
    is_positive_within, purity, DensityMatrix, OperatorMatrix, StateVector, NEGATIVITY_TOL,
};
use crate::scalar::Real;
use crate::{Error, Result};
use lindblad::{LindbladRhs, SchrodingerRhs};
use ode::{DormandPrince, Rk4};

/// Trace drift that aborts a run.
pub const TRACE_ABORT_TOL: f64 = 1e-5;

/// Minimum number of fixed steps per period of the fastest frequency.
pub const MIN_STEPS_PER_PERIOD: f64 = 20.0;

/// Default number of fixed steps per period of the fastest frequency.
pub const DEFAULT_STEPS_PER_PERIOD: f64 = 40.0;

/// Largest `‖H‖ dt` of a fixed RK4 step at the minimum step density when
/// the norm sets the time scale.
pub const MAX_PHASE_PER_STEP: f64 = 0.03;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Method<T> {
    /// Classical RK4 with step `dt`; a record every `sample_stride` steps.
    FixedRk4 { dt: T, sample_stride: usize },
    /// Dormand–Prince 5(4); records on `samples` equal intervals.
    Adaptive { rtol: T, atol: T, samples: usize },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegrationConfig<T> {
    pub method: Method<T>,
    pub t_final: T,
    /// Keep the density matrix of every record.
    pub store_states: bool,
}

impl<T: Real> IntegrationConfig<T> {
    /// Fixed RK4 whose step divides `t_final` exactly, is at most
    /// `(2π/ω_max)/steps_per_period`, and yields roughly `samples` records.
    pub fn fixed_rk4(omega_max: T, t_final: T, steps_per_period: T, samples: usize) -> Result<Self> {
        if !(t_final > T::zero()) || !(omega_max > T::zero()) || !(steps_per_period > T::zero()) {
            return Err(Error::Parameter(
                "t_final, the frequency bound and steps per period must be positive".into(),
            ));
        }
        let dt_max = T::TAU() / omega_max / steps_per_period;
        let needed = (t_final / dt_max).ceil().to_usize().unwrap_or(usize::MAX).max(1);
        let samples = samples.max(1);
        let stride = needed.div_ceil(samples).max(1);
        let steps = needed.div_ceil(stride) * stride;
        Ok(Self {
            method: Method::FixedRk4 {
                dt: t_final / T::from_usize_lossy(steps),
                sample_stride: stride,
            },
            t_final,
            store_states: false,
        })
    }

    /// Fixed RK4 sized from the model's frequency bound.
    ///
    /// When the Hamiltonian norm is itself the fastest scale (effective and
    /// reduced tiers) the step is further capped so that `‖H‖ dt` stays below
    /// [`MAX_PHASE_PER_STEP`] at 20 steps per period, and proportionally less
    /// at higher densities. Without the cap a step of `2π/20` of a period
    /// leaves local errors near `1e-5`, enough to push the zero eigenvalues
    /// of a near-pure state below the positivity guard. Models with faster
    /// sidebands already take steps well below that.
    pub fn for_model<H: HamiltonianModel<T>>(
        model: &H,
        t_final: T,
        steps_per_period: T,
        samples: usize,
    ) -> Result<Self> {
        if !(steps_per_period > T::zero()) {
            return Err(Error::Parameter("steps per period must be positive".into()));
        }
        let omega = model.max_frequency();
        let omega = if model.norm_bound() < omega {
            omega
        } else {
            model.norm_bound() * T::TAU() / T::lit(MIN_STEPS_PER_PERIOD * MAX_PHASE_PER_STEP)
        };
        Self::fixed_rk4(omega, t_final, steps_per_period, samples)
    }

    pub fn adaptive(t_final: T, rtol: T, atol: T, samples: usize) -> Self {
        Self {
            method: Method::Adaptive {
                rtol,
                atol,
                samples: samples.max(1),
            },
            t_final,
            store_states: false,
        }
    }

    /// Number of fixed steps, if fixed-step.
    pub fn steps(&self) -> Option<usize> {
        match self.method {
            Method::FixedRk4 { dt, .. } => (self.t_final / dt).round().to_usize(),
            Method::Adaptive { .. } => None,
        }
    }

    /// Same run with the fixed step halved.
    pub fn halved(&self) -> Self {
        let mut out = *self;
        if let Method::FixedRk4 { dt, sample_stride } = self.method {
            out.method = Method::FixedRk4 {
                dt: dt * T::lit(0.5),
                sample_stride: sample_stride * 2,
            };
        }
        out
    }

    /// Rejects a step larger than `(2π/ω_max)/20` or one that does not
    /// divide `t_final`.
    pub fn validate(&self, omega_max: T) -> Result<()> {
        if !(self.t_final > T::zero()) {
            return Err(Error::Parameter("t_final must be positive".into()));
        }
        match self.method {
            Method::FixedRk4 { dt, sample_stride } => {
                if !(dt > T::zero()) || sample_stride == 0 {
                    return Err(Error::Parameter("dt and sample stride must be positive".into()));
                }
                let limit = T::TAU() / omega_max / T::lit(MIN_STEPS_PER_PERIOD);
                if dt > limit * T::lit(1.0 + 1e-12) {
                    return Err(Error::StepSize {
                        dt: dt.to_f64_lossy(),
                        limit: limit.to_f64_lossy(),
                    });
                }
                let n = (self.t_final / dt).round();
                if (n * dt - self.t_final).abs() > self.t_final * T::lit(1e-9) {
                    return Err(Error::Parameter("dt must divide t_final".into()));
                }
            }
            Method::Adaptive { rtol, atol, samples } => {
                if !(rtol > T::zero()) || !(atol > T::zero()) || samples == 0 {
                    return Err(Error::Parameter(
                        "tolerances and sample count must be positive".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Scalar observable recorded along a trajectory (typically a fidelity).
pub trait Observer<T: Real> {
    fn on_density(&self, t: T, rho: &OperatorMatrix<T>) -> T;

    fn on_pure(&self, t: T, psi: &StateVector<T>) -> T {
        self.on_density(t, psi.projector().matrix())
    }
}

/// Records nothing useful; the fidelity column is zero.
pub struct NoObserver;

impl<T: Real> Observer<T> for NoObserver {
    fn on_density(&self, _t: T, _rho: &OperatorMatrix<T>) -> T {
        T::zero()
    }

    fn on_pure(&self, _t: T, _psi: &StateVector<T>) -> T {
        T::zero()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Record<T> {
    pub fidelity: T,
    pub trace: T,
    pub purity: T,
    /// `max |ρ − ρ†|`; zero for pure-state runs.
    pub hermiticity: T,
    pub state: Option<DensityMatrix<T>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum FinalState<T> {
    Density(DensityMatrix<T>),
    Pure(StateVector<T>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<T> {
    pub times: Vec<T>,
    pub records: Vec<Record<T>>,
    pub final_state: FinalState<T>,
}

impl<T: Real> Trajectory<T> {
    pub fn final_record(&self) -> &Record<T> {
        self.records.last().expect("trajectories hold at least one record")
    }

    pub fn final_fidelity(&self) -> T {
        self.final_record().fidelity
    }

    pub fn max_trace_error(&self) -> T {
        self.records
            .iter()
            .map(|r| (r.trace - T::one()).abs())
            .fold(T::zero(), T::max)
    }

    pub fn max_hermiticity_error(&self) -> T {
        self.records.iter().map(|r| r.hermiticity).fold(T::zero(), T::max)
    }

    pub fn final_density(&self) -> Option<&DensityMatrix<T>> {
        match &self.final_state {
            FinalState::Density(rho) => Some(rho),
            FinalState::Pure(_) => None,
        }
    }

    pub fn final_ket(&self) -> Option<&StateVector<T>> {
        match &self.final_state {
            FinalState::Pure(psi) => Some(psi),
            FinalState::Density(_) => None,
        }
    }
}

fn check_dims<T: Real, H: HamiltonianModel<T>>(model: &H, dim: usize) -> Result<()> {
    if model.dim() != dim {
        return Err(Error::Dimension {
            expected: model.dim(),
            found: dim,
        });
    }
    Ok(())
}

/// Sample times and, for fixed steps, the number of steps between samples.
fn sample_plan<T: Real>(cfg: &IntegrationConfig<T>) -> (Vec<T>, usize, T) {
    match cfg.method {
        Method::FixedRk4 { dt, sample_stride } => {
            let steps = cfg.steps().expect("fixed step");
            let n_samples = steps.div_ceil(sample_stride);
            let mut times: Vec<T> = (0..n_samples)
                .map(|k| T::from_usize_lossy(k * sample_stride) * dt)
                .collect();
            times.push(cfg.t_final);
            (times, sample_stride, dt)
        }
        Method::Adaptive { samples, .. } => {
            let times = (0..=samples)
                .map(|k| cfg.t_final * T::from_usize_lossy(k) / T::from_usize_lossy(samples))
                .collect();
            (times, 0, T::zero())
        }
    }
}

/// Integrates the master equation from `rho0` and records the observer,
/// trace, purity and Hermiticity on the sample grid.
///
/// Aborts when the trace drifts by more than `1e-5` or when a sample has an
/// eigenvalue below `−1e-8`.
pub fn evolve<T: Real, H: HamiltonianModel<T>>(
    rho0: &DensityMatrix<T>,
    model: &H,
    collapse: &CollapseSet<T>,
    cfg: &IntegrationConfig<T>,
    observer: &impl Observer<T>,
) -> Result<Trajectory<T>> {
    check_dims(model, rho0.dim())?;
    if let Some(op) = collapse.ops.first() {
        check_dims(model, op.operator.dim())?;
    }
    cfg.validate(model.max_frequency())?;
    let n = rho0.dim();
    let (times, stride, dt) = sample_plan(cfg);
    let mut rhs = LindbladRhs::new(model, collapse);
    let mut y = rho0.matrix().as_slice().to_vec();
    let mut records = Vec::with_capacity(times.len());
    let mut rk = Rk4::new(n * n);
    let mut dp = match cfg.method {
        Method::Adaptive { rtol, atol, .. } => Some(DormandPrince::new(n * n, rtol, atol)),
        Method::FixedRk4 { .. } => None,
    };
    let mut h_adapt = T::TAU() / model.max_frequency() / T::lit(MIN_STEPS_PER_PERIOD);
    let mut t = T::zero();
    let mut step = 0usize;
    let total = cfg.steps().unwrap_or(0);
    for (k, &ts) in times.iter().enumerate() {
        if k > 0 {
            match &mut dp {
                None => {
                    let target = if k + 1 == times.len() { total } else { k * stride };
                    while step < target {
                        rk.step(&mut rhs, t, dt, &mut y);
                        step += 1;
                        t = T::from_usize_lossy(step) * dt;
                    }
                }
                Some(dp) => {
                    h_adapt = dp.advance(&mut rhs, t, ts, &mut y, h_adapt).map_err(Error::Integration)?;
                    t = ts;
                }
            }
        }
        let rho = OperatorMatrix::from_vec(n, y.clone())?;
        records.push(density_record(ts, rho, observer, cfg.store_states)?);
    }
    let rho = DensityMatrix::from_matrix_unchecked(OperatorMatrix::from_vec(n, y)?);
    Ok(Trajectory {
        times,
        records,
        final_state: FinalState::Density(rho),
    })
}

fn density_record<T: Real>(
    t: T,
    rho: OperatorMatrix<T>,
    observer: &impl Observer<T>,
    store: bool,
) -> Result<Record<T>> {
    let trace = rho.trace();
    let drift = (trace.re - T::one()).abs().max(trace.im.abs());
    if !(drift <= T::lit(TRACE_ABORT_TOL)) {
        return Err(Error::TraceDrift {
            t: t.to_f64_lossy(),
            trace: trace.re.to_f64_lossy(),
        });
    }
    if !is_positive_within(&rho, T::lit(NEGATIVITY_TOL)) {
        return Err(Error::Positivity {
            t: t.to_f64_lossy(),
            tolerance: NEGATIVITY_TOL,
        });
    }
    let fidelity = observer.on_density(t, &rho);
    Ok(Record {
        fidelity,
        trace: trace.re,
        purity: purity(&rho),
        hermiticity: rho.hermiticity_error(),
        state: store.then(|| DensityMatrix::from_matrix_unchecked(rho)),
    })
}

/// Schrödinger-equation counterpart of [`evolve`]; `trace` records `‖ψ‖²`.
pub fn evolve_pure<T: Real, H: HamiltonianModel<T>>(
    psi0: &StateVector<T>,
    model: &H,
    cfg: &IntegrationConfig<T>,
    observer: &impl Observer<T>,
) -> Result<Trajectory<T>> {
    check_dims(model, psi0.dim())?;
    cfg.validate(model.max_frequency())?;
    let n = psi0.dim();
    let (times, stride, dt) = sample_plan(cfg);
    let mut rhs = SchrodingerRhs::new(model);
    let mut y = psi0.amplitudes().to_vec();
    let mut rk = Rk4::new(n);
    let mut dp = match cfg.method {
        Method::Adaptive { rtol, atol, .. } => Some(DormandPrince::new(n, rtol, atol)),
        Method::FixedRk4 { .. } => None,
    };
    let mut h_adapt = T::TAU() / model.max_frequency() / T::lit(MIN_STEPS_PER_PERIOD);
    let mut t = T::zero();
    let mut step = 0usize;
    let total = cfg.steps().unwrap_or(0);
    let mut records = Vec::with_capacity(times.len());
    for (k, &ts) in times.iter().enumerate() {
        if k > 0 {
            match &mut dp {
                None => {
                    let target = if k + 1 == times.len() { total } else { k * stride };
                    while step < target {
                        rk.step(&mut rhs, t, dt, &mut y);
                        step += 1;
                        t = T::from_usize_lossy(step) * dt;
                    }
                }
                Some(dp) => {
                    h_adapt = dp.advance(&mut rhs, t, ts, &mut y, h_adapt).map_err(Error::Integration)?;
                    t = ts;
                }
            }
        }
        let norm_sqr: T = y.iter().map(|z| z.norm_sqr()).sum();
        if !((norm_sqr - T::one()).abs() <= T::lit(TRACE_ABORT_TOL)) {
            return Err(Error::TraceDrift {
                t: ts.to_f64_lossy(),
                trace: norm_sqr.to_f64_lossy(),
            });
        }
        let psi = StateVector::from_raw(y.clone());
        records.push(Record {
            fidelity: observer.on_pure(ts, &psi),
            trace: norm_sqr,
            purity: T::one(),
            hermiticity: T::zero(),
            state: cfg.store_states.then(|| psi.projector()),
        });
    }
    Ok(Trajectory {
        times,
        records,
        final_state: FinalState::Pure(StateVector::from_raw(y)),
    })
}

/// Fixed-step RK4 propagation of a pure state from `t0` to `t1` (either
/// direction) in `steps` equal steps.
pub fn propagate_pure<T: Real, H: HamiltonianModel<T>>(
    psi: &StateVector<T>,
    model: &H,
    t0: T,
    t1: T,
    steps: usize,
) -> Result<StateVector<T>> {
    check_dims(model, psi.dim())?;
    if steps == 0 {
        return Err(Error::Parameter("at least one step is required".into()));
    }
    let dt = (t1 - t0) / T::from_usize_lossy(steps);
    let mut rhs = SchrodingerRhs::new(model);
    let mut rk = Rk4::new(psi.dim());
    let mut y: Vec<Complex<T>> = psi.amplitudes().to_vec();
    for k in 0..steps {
        rk.step(&mut rhs, t0 + T::from_usize_lossy(k) * dt, dt, &mut y);
    }
    Ok(StateVector::from_raw(y))
}
