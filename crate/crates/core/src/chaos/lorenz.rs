use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Lorenz system parameters and integration settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LorenzConfig {
    pub sigma: f64,
    pub rho: f64,
    pub beta: f64,
    /// Initial steps thrown away before recording.
    pub transient: usize,
}

impl Default for LorenzConfig {
    fn default() -> Self {
        Self {
            sigma: 10.0,
            rho: 28.0,
            beta: 8.0 / 3.0,
            transient: 1000,
        }
    }
}

impl LorenzConfig {
    fn derivative(&self, s: [f64; 3]) -> [f64; 3] {
        [
            self.sigma * (s[1] - s[0]),
            s[0] * (self.rho - s[2]) - s[1],
            s[0] * s[1] - self.beta * s[2],
        ]
    }

    fn rk4_step(&self, s: [f64; 3], dt: f64) -> [f64; 3] {
        let add =
            |a: [f64; 3], b: [f64; 3], h: f64| [a[0] + h * b[0], a[1] + h * b[1], a[2] + h * b[2]];
        let k1 = self.derivative(s);
        let k2 = self.derivative(add(s, k1, dt / 2.0));
        let k3 = self.derivative(add(s, k2, dt / 2.0));
        let k4 = self.derivative(add(s, k3, dt));
        let mut out = s;
        for i in 0..3 {
            out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        out
    }
}

/// x-component of a fixed-step RK4 integration of the Lorenz equations,
/// recorded for `steps` steps after the configured transient.
pub fn lorenz_series(
    steps: usize,
    dt: f64,
    initial: [f64; 3],
    config: &LorenzConfig,
) -> Result<Vec<f64>> {
    if !(dt > 0.0 && dt <= 0.05) {
        return Err(Error::param(format!(
            "Lorenz step must be in (0, 0.05], got {dt}"
        )));
    }
    if steps == 0 {
        return Err(Error::param("Lorenz series needs at least one step"));
    }
    let mut state = initial;
    let mut out = Vec::with_capacity(steps);
    for step in 0..(config.transient + steps) {
        state = config.rk4_step(state, dt);
        if state.iter().any(|v| !v.is_finite()) {
            return Err(Error::Integration { step });
        }
        if step >= config.transient {
            out.push(state[0]);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_point_stays_put() {
        let s = lorenz_series(100, 0.01, [0.0; 3], &LorenzConfig::default()).unwrap();
        assert!(s.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn deterministic() {
        let c = LorenzConfig::default();
        let a = lorenz_series(500, 0.01, [1.0, 1.0, 1.0], &c).unwrap();
        let b = lorenz_series(500, 0.01, [1.0, 1.0, 1.0], &c).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 500);
    }

    #[test]
    fn stays_on_attractor() {
        let s = lorenz_series(5000, 0.01, [1.0, 1.0, 1.0], &LorenzConfig::default()).unwrap();
        assert!(s.iter().all(|v| v.abs() < 30.0));
        assert!(s.iter().any(|&v| v > 10.0) && s.iter().any(|&v| v < -10.0));
    }

    #[test]
    fn rejects_bad_step() {
        let c = LorenzConfig::default();
        assert!(lorenz_series(10, 0.0, [1.0; 3], &c).is_err());
        assert!(lorenz_series(10, 0.06, [1.0; 3], &c).is_err());
        assert!(lorenz_series(0, 0.01, [1.0; 3], &c).is_err());
    }

    #[test]
    fn blow_up_is_reported() {
        let c = LorenzConfig {
            rho: 1e200,
            transient: 0,
            ..LorenzConfig::default()
        };
        assert!(matches!(
            lorenz_series(100, 0.05, [1.0; 3], &c),
            Err(Error::Integration { .. })
        ));
    }
}
