//! Fixed-step classical Runge-Kutta.

use nalgebra::SVector;

/// One RK4 step of `x' = f(t, x)`. The first error returned by `f` aborts
/// the step.
pub fn rk4_step<const N: usize, E>(
    t: f64,
    x: &SVector<f64, N>,
    dt: f64,
    mut f: impl FnMut(f64, &SVector<f64, N>) -> Result<SVector<f64, N>, E>,
) -> Result<SVector<f64, N>, E> {
    let half = 0.5 * dt;
    let k1 = f(t, x)?;
    let k2 = f(t + half, &(x + k1 * half))?;
    let k3 = f(t + half, &(x + k2 * half))?;
    let k4 = f(t + dt, &(x + k3 * dt))?;
    Ok(x + (k1 + (k2 + k3) * 2.0 + k4) * (dt / 6.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Vector1;
    use std::convert::Infallible;

    #[test]
    fn exact_for_cubic_in_time() {
        // x' = 3 t^2 integrates to t^3 with no truncation error
        let mut x = Vector1::new(0.0);
        let dt = 0.25;
        for k in 0..8 {
            x = rk4_step(k as f64 * dt, &x, dt, |t, _| Ok::<_, Infallible>(Vector1::new(3.0 * t * t))).unwrap();
        }
        assert!((x[0] - 8.0).abs() < 1e-12);
    }

    #[test]
    fn fourth_order_on_decay() {
        let run = |dt: f64| {
            let n = (1.0 / dt).round() as usize;
            let mut x = Vector1::new(1.0);
            for k in 0..n {
                x = rk4_step(k as f64 * dt, &x, dt, |_, x| Ok::<_, Infallible>(-x)).unwrap();
            }
            (x[0] - (-1.0f64).exp()).abs()
        };
        let ratio = run(0.1) / run(0.05);
        assert!((12.0..20.0).contains(&ratio), "ratio {ratio}");
    }
}
