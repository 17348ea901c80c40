//! Explicit integrators on flat complex buffers.

use num_complex::Complex;

use crate::scalar::{cr, Real};

/// Right-hand side `dy/dt = f(t, y)` writing into `dy`.
pub trait Rhs<T: Real> {
    fn eval(&mut self, t: T, y: &[Complex<T>], dy: &mut [Complex<T>]);
}

impl<T: Real, F: FnMut(T, &[Complex<T>], &mut [Complex<T>])> Rhs<T> for F {
    fn eval(&mut self, t: T, y: &[Complex<T>], dy: &mut [Complex<T>]) {
        self(t, y, dy)
    }
}

fn axpy_into<T: Real>(out: &mut [Complex<T>], y: &[Complex<T>], h: T, k: &[Complex<T>]) {
    for ((o, &a), &b) in out.iter_mut().zip(y).zip(k) {
        *o = a + b * h;
    }
}

/// Classical fourth-order Runge–Kutta.
pub struct Rk4<T> {
    k1: Vec<Complex<T>>,
    k2: Vec<Complex<T>>,
    k3: Vec<Complex<T>>,
    k4: Vec<Complex<T>>,
    tmp: Vec<Complex<T>>,
}

impl<T: Real> Rk4<T> {
    pub fn new(len: usize) -> Self {
        let z = vec![cr(T::zero()); len];
        Self {
            k1: z.clone(),
            k2: z.clone(),
            k3: z.clone(),
            k4: z.clone(),
            tmp: z,
        }
    }

    #[allow(clippy::needless_range_loop)] // four stage buffers share one index
    pub fn step(&mut self, f: &mut impl Rhs<T>, t: T, dt: T, y: &mut [Complex<T>]) {
        let half = dt * T::lit(0.5);
        f.eval(t, y, &mut self.k1);
        axpy_into(&mut self.tmp, y, half, &self.k1);
        f.eval(t + half, &self.tmp, &mut self.k2);
        axpy_into(&mut self.tmp, y, half, &self.k2);
        f.eval(t + half, &self.tmp, &mut self.k3);
        axpy_into(&mut self.tmp, y, dt, &self.k3);
        f.eval(t + dt, &self.tmp, &mut self.k4);
        let sixth = dt / T::lit(6.0);
        let two = T::lit(2.0);
        for i in 0..y.len() {
            y[i] = y[i] + (self.k1[i] + (self.k2[i] + self.k3[i]) * two + self.k4[i]) * sixth;
        }
    }
}

/// Dormand–Prince 5(4) with an elementary step-size controller.
pub struct DormandPrince<T> {
    k: [Vec<Complex<T>>; 7],
    tmp: Vec<Complex<T>>,
    y5: Vec<Complex<T>>,
    pub rtol: T,
    pub atol: T,
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

impl<T: Real> DormandPrince<T> {
    pub fn new(len: usize, rtol: T, atol: T) -> Self {
        let z = vec![cr(T::zero()); len];
        Self {
            k: std::array::from_fn(|_| z.clone()),
            tmp: z.clone(),
            y5: z,
            rtol,
            atol,
        }
    }

    /// Attempts one step; on acceptance `y` is advanced. Returns the scaled
    /// error norm (accepted when `≤ 1`).
    #[allow(clippy::needless_range_loop)] // seven stage buffers share one index
    pub fn try_step(&mut self, f: &mut impl Rhs<T>, t: T, dt: T, y: &mut [Complex<T>]) -> T {
        let n = y.len();
        for s in 0..7 {
            self.tmp.copy_from_slice(y);
            for (r, &a) in A[s].iter().enumerate().take(s) {
                if a != 0.0 {
                    let w = dt * T::lit(a);
                    for (x, &k) in self.tmp.iter_mut().zip(&self.k[r]) {
                        *x = *x + k * w;
                    }
                }
            }
            f.eval(t + dt * T::lit(C[s]), &self.tmp, &mut self.k[s]);
        }
        let mut err = T::zero();
        for i in 0..n {
            let mut y5 = y[i];
            let mut e = cr(T::zero());
            for s in 0..7 {
                y5 = y5 + self.k[s][i] * (dt * T::lit(B5[s]));
                e = e + self.k[s][i] * (dt * T::lit(B5[s] - B4[s]));
            }
            self.y5[i] = y5;
            let scale = self.atol + self.rtol * y[i].norm().max(y5.norm());
            err = err.max(e.norm() / scale);
        }
        if err <= T::one() {
            y.copy_from_slice(&self.y5);
        }
        err
    }

    /// Advances `y` from `t0` to `t1`, adapting the step; returns the last
    /// successful step size.
    pub fn advance(
        &mut self,
        f: &mut impl Rhs<T>,
        t0: T,
        t1: T,
        y: &mut [Complex<T>],
        mut dt: T,
    ) -> Result<T, String> {
        let mut t = t0;
        let span = t1 - t0;
        let mut steps = 0usize;
        while (t1 - t) > span.abs() * T::lit(1e-14) {
            let h = dt.min(t1 - t);
            let err = self.try_step(f, t, h, y);
            let factor = if err == T::zero() {
                T::lit(5.0)
            } else {
                (T::lit(0.9) * err.powf(T::lit(-0.2))).max(T::lit(0.2)).min(T::lit(5.0))
            };
            if err <= T::one() {
                t = t + h;
            }
            dt = h * factor;
            steps += 1;
            if !dt.is_finite() || dt <= span.abs() * T::lit(1e-14) || steps > 10_000_000 {
                return Err(format!("adaptive step collapsed at t = {t}"));
            }
        }
        Ok(dt)
    }
}
