//! Dormand–Prince 5(4) with PI step-size control and fourth-order dense
//! output, over flat complex state vectors.

use crate::error::{Error, Result};
use crate::spin_algebra::C64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorOptions {
    pub rtol: f64,
    pub atol: f64,
    /// First trial step; `None` means `T / 10⁴`.
    pub initial_step: Option<f64>,
    pub max_steps: usize,
    /// Upper bound on any single step; `None` means unbounded.
    pub max_step: Option<f64>,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-8,
            atol: 1e-10,
            initial_step: None,
            max_steps: 10_000_000,
            max_step: None,
        }
    }
}

impl IntegratorOptions {
    pub fn with_tolerances(rtol: f64, atol: f64) -> Self {
        Self {
            rtol,
            atol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, reason: &str| {
            Err(Error::InvalidValue {
                key: key.into(),
                reason: reason.into(),
            })
        };
        if !(self.rtol > 0.0) {
            return bad("rtol", "must be positive");
        }
        if !(self.atol > 0.0) {
            return bad("atol", "must be positive");
        }
        if self.max_steps == 0 {
            return bad("max_steps", "must be positive");
        }
        if matches!(self.initial_step, Some(h) if !(h > 0.0)) {
            return bad("initial_step", "must be positive");
        }
        if matches!(self.max_step, Some(h) if !(h > 0.0)) {
            return bad("max_step", "must be positive");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct IntegratorStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evaluations: usize,
    /// Steps after which the `project` hook altered the state.
    pub projections: usize,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO1: f64 = 0.2 - BETA * 0.75;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

/// Integrates `y' = f(t, y)` from `t0` to `t1`, returning the state at each of
/// the (ascending, in-range) `samples`.
///
/// `project` runs after every accepted step and may modify the state in
/// place (renormalization); it returns `true` when it did.
pub fn integrate<F, P>(
    mut rhs: F,
    mut project: P,
    t0: f64,
    t1: f64,
    y0: &[C64],
    samples: &[f64],
    opts: &IntegratorOptions,
) -> Result<(Vec<Vec<C64>>, IntegratorStats)>
where
    F: FnMut(f64, &[C64], &mut [C64]) -> Result<()>,
    P: FnMut(f64, &mut [C64]) -> bool,
{
    opts.validate()?;
    let n = y0.len();
    let span = t1 - t0;
    let mut stats = IntegratorStats::default();
    let mut out = Vec::with_capacity(samples.len());
    let mut next_sample = 0;
    while next_sample < samples.len() && samples[next_sample] <= t0 {
        out.push(y0.to_vec());
        next_sample += 1;
    }
    if span <= 0.0 {
        while out.len() < samples.len() {
            out.push(y0.to_vec());
        }
        return Ok((out, stats));
    }

    let h_max = opts.max_step.unwrap_or(span).min(span);
    let mut h = opts.initial_step.unwrap_or(span * 1e-4).min(h_max);

    let mut y = y0.to_vec();
    let mut ynew = vec![C64::default(); n];
    let mut tmp = vec![C64::default(); n];
    let mut k = [(); 7].map(|_| vec![C64::default(); n]);
    let mut cont = [(); 5].map(|_| vec![C64::default(); n]);

    let mut t = t0;
    rhs(t, &y, &mut k[0])?;
    stats.rhs_evaluations += 1;
    let mut fac_old = 1e-4;
    let mut last_rejected = false;

    while t < t1 {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::StepLimit {
                max_steps: opts.max_steps,
                t,
            });
        }
        let last = t + h >= t1 - 1e-14 * span;
        if last {
            h = t1 - t;
        }
        if h <= f64::EPSILON * t.abs().max(span) {
            return Err(Error::StepUnderflow { t });
        }

        stage(&mut tmp, &y, h, &k, &[A21]);
        rhs(t + C2 * h, &tmp, &mut k[1])?;
        stage(&mut tmp, &y, h, &k, &[A31, A32]);
        rhs(t + C3 * h, &tmp, &mut k[2])?;
        stage(&mut tmp, &y, h, &k, &[A41, A42, A43]);
        rhs(t + C4 * h, &tmp, &mut k[3])?;
        stage(&mut tmp, &y, h, &k, &[A51, A52, A53, A54]);
        rhs(t + C5 * h, &tmp, &mut k[4])?;
        stage(&mut tmp, &y, h, &k, &[A61, A62, A63, A64, A65]);
        rhs(t + h, &tmp, &mut k[5])?;
        stage(&mut ynew, &y, h, &k, &[A71, 0.0, A73, A74, A75, A76]);
        rhs(t + h, &ynew, &mut k[6])?;
        stats.rhs_evaluations += 6;

        let mut err2 = 0.0;
        for i in 0..n {
            let e = (k[0][i] * E1
                + k[2][i] * E3
                + k[3][i] * E4
                + k[4][i] * E5
                + k[5][i] * E6
                + k[6][i] * E7)
                * h;
            let sc = opts.atol + opts.rtol * y[i].norm().max(ynew[i].norm());
            err2 += (e.norm() / sc).powi(2);
        }
        let err = (err2 / n as f64).sqrt();
        if !err.is_finite() {
            return Err(Error::NonFinite { t });
        }

        let fac11 = err.powf(EXPO1);
        if err <= 1.0 {
            let fac = (fac11 / (fac_old as f64).powf(BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            let mut h_new = h / fac;
            fac_old = err.max(1e-4);

            if next_sample < samples.len() && samples[next_sample] <= t + h {
                for i in 0..n {
                    let dy = ynew[i] - y[i];
                    let bspl = k[0][i] * h - dy;
                    cont[0][i] = y[i];
                    cont[1][i] = dy;
                    cont[2][i] = bspl;
                    cont[3][i] = dy - k[6][i] * h - bspl;
                    cont[4][i] = (k[0][i] * D1
                        + k[2][i] * D3
                        + k[3][i] * D4
                        + k[4][i] * D5
                        + k[5][i] * D6
                        + k[6][i] * D7)
                        * h;
                }
                while next_sample < samples.len() && samples[next_sample] <= t + h {
                    let theta = ((samples[next_sample] - t) / h).clamp(0.0, 1.0);
                    let th1 = 1.0 - theta;
                    let v: Vec<C64> = (0..n)
                        .map(|i| {
                            cont[0][i]
                                + (cont[1][i]
                                    + (cont[2][i] + (cont[3][i] + cont[4][i] * th1) * theta) * th1)
                                    * theta
                        })
                        .collect();
                    out.push(v);
                    next_sample += 1;
                }
            }

            std::mem::swap(&mut y, &mut ynew);
            k.swap(0, 6);
            t = if last { t1 } else { t + h };
            stats.accepted += 1;
            if project(t, &mut y) {
                stats.projections += 1;
                rhs(t, &y, &mut k[0])?;
                stats.rhs_evaluations += 1;
            }
            if y.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite { t });
            }
            if last_rejected {
                h_new = h_new.min(h);
            }
            last_rejected = false;
            h = h_new.min(h_max);
        } else {
            h /= (fac11 / SAFETY).min(1.0 / FAC_MIN);
            last_rejected = true;
            stats.rejected += 1;
        }
    }
    while out.len() < samples.len() {
        out.push(y.clone());
    }
    Ok((out, stats))
}

fn stage(dst: &mut [C64], y: &[C64], h: f64, k: &[Vec<C64>; 7], coeffs: &[f64]) {
    dst.copy_from_slice(y);
    for (kj, &a) in k.iter().zip(coeffs) {
        if a == 0.0 {
            continue;
        }
        let ha = h * a;
        for (d, kv) in dst.iter_mut().zip(kj) {
            *d += kv * ha;
        }
    }
}

/// Uniform grid of `n` points covering `[0, t_end]`, `n ≥ 2`.
pub fn uniform_grid(t_end: f64, n: usize) -> Vec<f64> {
    let last = (n.max(2) - 1) as f64;
    (0..n.max(2))
        .map(|i| if i as f64 == last { t_end } else { t_end * i as f64 / last })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oscillator(omega: f64) -> impl FnMut(f64, &[C64], &mut [C64]) -> Result<()> {
        move |_, y, dy| {
            dy[0] = y[0] * C64::new(0.0, -omega);
            Ok(())
        }
    }

    #[test]
    fn phase_rotation_is_accurate() {
        let samples = uniform_grid(10.0, 11);
        let (ys, stats) = integrate(
            oscillator(3.0),
            |_, _| false,
            0.0,
            10.0,
            &[C64::new(1.0, 0.0)],
            &samples,
            &IntegratorOptions::with_tolerances(1e-10, 1e-12),
        )
        .unwrap();
        assert_eq!(ys.len(), 11);
        for (t, y) in samples.iter().zip(&ys) {
            let want = C64::new(0.0, -3.0 * t).exp();
            assert!((y[0] - want).norm() < 1e-8, "t={t}: {}", (y[0] - want).norm());
        }
        assert!(stats.accepted > 0);
    }

    #[test]
    fn dense_output_between_steps() {
        // exponential growth, loose steps so samples fall inside steps
        let samples: Vec<f64> = (0..=40).map(|i| i as f64 * 0.05).collect();
        let (ys, stats) = integrate(
            |_, y: &[C64], dy: &mut [C64]| {
                dy[0] = y[0];
                Ok(())
            },
            |_, _| false,
            0.0,
            2.0,
            &[C64::new(1.0, 0.0)],
            &samples,
            &IntegratorOptions::with_tolerances(1e-9, 1e-12),
        )
        .unwrap();
        assert!(stats.accepted < samples.len());
        for (t, y) in samples.iter().zip(&ys) {
            assert!((y[0].re - t.exp()).abs() < 1e-7 * t.exp());
        }
    }

    #[test]
    fn tighter_tolerance_is_not_worse() {
        let run = |tol: f64| {
            let (ys, _) = integrate(
                |t, y: &[C64], dy: &mut [C64]| {
                    dy[0] = y[0] * C64::new(0.0, -(1.0 + t));
                    Ok(())
                },
                |_, _| false,
                0.0,
                5.0,
                &[C64::new(1.0, 0.0)],
                &[5.0],
                &IntegratorOptions::with_tolerances(tol, tol * 1e-2),
            )
            .unwrap();
            let want = C64::new(0.0, -(5.0 + 12.5)).exp();
            (ys[0][0] - want).norm()
        };
        let coarse = run(1e-6);
        let fine = run(1e-9);
        assert!(fine <= coarse * 2.0);
        assert!(fine < 1e-7);
    }

    #[test]
    fn step_limit_reported() {
        let opts = IntegratorOptions {
            max_steps: 5,
            ..IntegratorOptions::with_tolerances(1e-12, 1e-14)
        };
        let r = integrate(
            oscillator(100.0),
            |_, _| false,
            0.0,
            100.0,
            &[C64::new(1.0, 0.0)],
            &[100.0],
            &opts,
        );
        assert!(matches!(r, Err(Error::StepLimit { .. })));
    }

    #[test]
    fn invalid_options_rejected() {
        let opts = IntegratorOptions {
            rtol: 0.0,
            ..Default::default()
        };
        assert!(opts.validate().is_err());
    }

    #[test]
    fn projection_hook_counts() {
        let (_, stats) = integrate(
            oscillator(1.0),
            |_, y: &mut [C64]| {
                let n = y[0].norm();
                y[0] /= n;
                true
            },
            0.0,
            1.0,
            &[C64::new(1.0, 0.0)],
            &[1.0],
            &IntegratorOptions::default(),
        )
        .unwrap();
        assert_eq!(stats.projections, stats.accepted);
    }
}
