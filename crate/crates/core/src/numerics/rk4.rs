use std::ops::{Add, Mul};

use super::{Complex64, NumericsError};

/// Element types whose finiteness can be checked.
pub trait Finite {
    fn is_finite_value(&self) -> bool;
}

impl Finite for f64 {
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl Finite for Complex64 {
    fn is_finite_value(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Uniform step layout over `[0, t_end]`: `steps` steps of size `h <= dt`,
/// with a sample every `sample_stride` steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepPlan {
    pub steps: usize,
    pub h: f64,
    pub sample_stride: usize,
}

impl StepPlan {
    pub fn new(t_end: f64, dt: f64, sample_every: f64) -> Result<Self, NumericsError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(NumericsError::InvalidStep(format!("dt must be positive, got {dt}")));
        }
        if !(t_end >= 0.0 && t_end.is_finite()) {
            return Err(NumericsError::InvalidStep(format!(
                "t_end must be non-negative, got {t_end}"
            )));
        }
        if !(sample_every > 0.0 && sample_every.is_finite()) {
            return Err(NumericsError::InvalidStep(format!(
                "sample interval must be positive, got {sample_every}"
            )));
        }
        let ratio = t_end / dt;
        let steps = if (ratio - ratio.round()).abs() < 1e-9 * ratio.max(1.0) {
            ratio.round() as usize
        } else {
            ratio.ceil() as usize
        };
        let h = if steps == 0 { dt } else { t_end / steps as f64 };
        let stride = (sample_every / h).round();
        if stride < 1.0 || (stride * h - sample_every).abs() > 1e-9 * sample_every.max(1.0) {
            return Err(NumericsError::InvalidStep(format!(
                "sample interval {sample_every} is not a multiple of the step {h}"
            )));
        }
        Ok(Self {
            steps,
            h,
            sample_stride: stride as usize,
        })
    }
}

/// Classic fourth-order Runge-Kutta stepper with preallocated stage buffers.
#[derive(Debug, Clone)]
pub struct Rk4<T> {
    k1: Vec<T>,
    k2: Vec<T>,
    k3: Vec<T>,
    k4: Vec<T>,
    tmp: Vec<T>,
}

impl<T> Rk4<T>
where
    T: Copy + Default + Add<Output = T> + Mul<f64, Output = T>,
{
    pub fn new(len: usize) -> Self {
        Self {
            k1: vec![T::default(); len],
            k2: vec![T::default(); len],
            k3: vec![T::default(); len],
            k4: vec![T::default(); len],
            tmp: vec![T::default(); len],
        }
    }

    /// Advances `y` from `t` to `t + h` in place.
    pub fn step<F>(&mut self, f: &mut F, t: f64, y: &mut [T], h: f64)
    where
        F: FnMut(f64, &[T], &mut [T]),
    {
        let half = 0.5 * h;
        f(t, y, &mut self.k1);
        for ((tmp, &yi), &k) in self.tmp.iter_mut().zip(y.iter()).zip(&self.k1) {
            *tmp = yi + k * half;
        }
        f(t + half, &self.tmp, &mut self.k2);
        for ((tmp, &yi), &k) in self.tmp.iter_mut().zip(y.iter()).zip(&self.k2) {
            *tmp = yi + k * half;
        }
        f(t + half, &self.tmp, &mut self.k3);
        for ((tmp, &yi), &k) in self.tmp.iter_mut().zip(y.iter()).zip(&self.k3) {
            *tmp = yi + k * h;
        }
        f(t + h, &self.tmp, &mut self.k4);
        let sixth = h / 6.0;
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = *yi + (self.k1[i] + self.k2[i] * 2.0 + self.k3[i] * 2.0 + self.k4[i]) * sixth;
        }
    }
}

/// States recorded at the sample times of an integration.
#[derive(Debug, Clone, PartialEq)]
pub struct Rk4Trajectory<T> {
    pub times: Vec<f64>,
    pub states: Vec<Vec<T>>,
}

impl<T> Rk4Trajectory<T> {
    /// The sample recorded at time `t` (to within 1e-9), if any.
    pub fn state_at(&self, t: f64) -> Option<&[T]> {
        self.times
            .iter()
            .position(|&s| (s - t).abs() <= 1e-9 * t.abs().max(1.0))
            .map(|k| self.states[k].as_slice())
    }

    pub fn final_state(&self) -> &[T] {
        self.states.last().expect("a trajectory always holds the initial state")
    }
}

/// Integrates `y' = f(t, y)` from `t = 0` to `t_end` with fixed steps no larger
/// than `dt`, recording the state every `sample_every` and at `t_end`.
pub fn rk4_integrate<T, F>(
    mut f: F,
    y0: Vec<T>,
    t_end: f64,
    dt: f64,
    sample_every: f64,
) -> Result<Rk4Trajectory<T>, NumericsError>
where
    T: Copy + Default + Add<Output = T> + Mul<f64, Output = T> + Finite,
    F: FnMut(f64, &[T], &mut [T]),
{
    let plan = StepPlan::new(t_end, dt, sample_every)?;
    let mut y = y0;
    let mut stepper = Rk4::new(y.len());
    let mut traj = Rk4Trajectory {
        times: vec![0.0],
        states: vec![y.clone()],
    };
    for n in 1..=plan.steps {
        let t = (n - 1) as f64 * plan.h;
        stepper.step(&mut f, t, &mut y, plan.h);
        let t_next = n as f64 * plan.h;
        if !y.iter().all(Finite::is_finite_value) {
            return Err(NumericsError::NonFiniteState { t: t_next });
        }
        if n % plan.sample_stride == 0 || n == plan.steps {
            traj.times.push(t_next);
            traj.states.push(y.clone());
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decay_error(dt: f64) -> f64 {
        let traj = rk4_integrate(|_, y: &[f64], dy: &mut [f64]| dy[0] = -y[0], vec![1.0], 1.0, dt, dt)
            .unwrap();
        (traj.final_state()[0] - (-1.0f64).exp()).abs()
    }

    #[test]
    fn exponential_decay_matches_exp() {
        assert!(decay_error(1e-3) < 1e-8);
    }

    #[test]
    fn zero_field_is_constant() {
        let traj = rk4_integrate(
            |_, _: &[f64], dy: &mut [f64]| dy.iter_mut().for_each(|d| *d = 0.0),
            vec![0.25, -3.0],
            2.0,
            0.1,
            0.5,
        )
        .unwrap();
        assert_eq!(traj.times, vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert!(traj.states.iter().all(|s| s == &[0.25, -3.0]));
    }

    #[test]
    fn fourth_order_convergence() {
        let ratio = decay_error(0.1) / decay_error(0.05);
        assert!((14.0..=18.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn complex_rotation_conserves_modulus() {
        let traj = rk4_integrate(
            |_, y: &[Complex64], dy: &mut [Complex64]| dy[0] = Complex64::new(0.0, -1.0) * y[0],
            vec![Complex64::new(1.0, 0.0)],
            std::f64::consts::PI,
            1e-3,
            std::f64::consts::PI,
        )
        .unwrap();
        let z = traj.final_state()[0];
        assert!((z - Complex64::new(-1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn blow_up_is_reported() {
        let err = rk4_integrate(|_, y: &[f64], dy: &mut [f64]| dy[0] = y[0] * y[0], vec![1.0], 2.0, 0.01, 0.01)
            .unwrap_err();
        assert!(matches!(err, NumericsError::NonFiniteState { .. }));
    }

    #[test]
    fn state_lookup_by_time() {
        let traj = rk4_integrate(|_, y: &[f64], dy: &mut [f64]| dy[0] = -y[0], vec![1.0], 1.0, 0.01, 0.25)
            .unwrap();
        assert!(traj.state_at(0.5).is_some());
        assert!(traj.state_at(0.3).is_none());
    }

    #[test]
    fn step_plan_rejects_bad_input() {
        assert!(StepPlan::new(1.0, 0.0, 0.1).is_err());
        assert!(StepPlan::new(-1.0, 0.1, 0.1).is_err());
        assert!(StepPlan::new(1.0, 0.1, 0.15).is_err());
        let plan = StepPlan::new(250.0, 1e-3, 0.025).unwrap();
        assert_eq!((plan.steps, plan.sample_stride), (250_000, 25));
    }
}
