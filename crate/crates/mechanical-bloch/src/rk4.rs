//! Fixed-step classical Runge-Kutta (RK4) over small state arrays.
//!
//! All three simulation layers are non-stiff at the parameter ratios of
//! interest, so a fixed step tied to the carrier period is sufficient and
//! keeps runs bit-reproducible across platforms.

/// One RK4 step of y' = f(t, y).
pub fn rk4_step<const N: usize, F>(f: &F, t: f64, y: &[f64; N], dt: f64) -> [f64; N]
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let k1 = f(t, y);
    let mut y2 = *y;
    for i in 0..N {
        y2[i] = y[i] + 0.5 * dt * k1[i];
    }
    let k2 = f(t + 0.5 * dt, &y2);
    for i in 0..N {
        y2[i] = y[i] + 0.5 * dt * k2[i];
    }
    let k3 = f(t + 0.5 * dt, &y2);
    for i in 0..N {
        y2[i] = y[i] + dt * k3[i];
    }
    let k4 = f(t + dt, &y2);
    let mut out = *y;
    for i in 0..N {
        out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Integrate y' = f(t, y) from t0 over `steps` fixed steps, collecting every
/// state including the initial one.
pub fn rk4_integrate<const N: usize, F>(
    f: &F,
    t0: f64,
    y0: [f64; N],
    dt: f64,
    steps: usize,
) -> Vec<(f64, [f64; N])>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let mut out = Vec::with_capacity(steps + 1);
    let mut y = y0;
    out.push((t0, y));
    for i in 0..steps {
        let t = t0 + i as f64 * dt;
        y = rk4_step(f, t, &y, dt);
        out.push((t0 + (i + 1) as f64 * dt, y));
    }
    out
}
