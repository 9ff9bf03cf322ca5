use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};

/// Transverse profile W on (−1, 1); the ditch potential is −(1/ε)W(u/ε).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    /// W = strength/2 on (−1, 1).
    Square { strength: f64 },
    /// W = (strength/2)(1 + cos πt).
    CosineBump { strength: f64 },
    /// Piecewise-linear through equally spaced values on [−1, 1].
    Table { values: Vec<f64> },
}

impl Default for Profile {
    fn default() -> Self {
        Profile::Square { strength: 1.0 }
    }
}

impl Profile {
    pub fn validate(&self) -> Result<()> {
        match self {
            Profile::Square { strength } | Profile::CosineBump { strength } => {
                ensure(strength.is_finite(), || "profile strength must be finite".into())
            }
            Profile::Table { values } => {
                ensure(values.len() >= 2, || "profile table needs at least two values".into())?;
                ensure(values.iter().all(|v| v.is_finite()), || {
                    "profile table values must be finite".into()
                })
            }
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        if !(t > -1.0 && t < 1.0) {
            return 0.0;
        }
        match self {
            Profile::Square { strength } => 0.5 * strength,
            Profile::CosineBump { strength } => 0.5 * strength * (1.0 + (std::f64::consts::PI * t).cos()),
            Profile::Table { values } => {
                let m = values.len() - 1;
                let x = (t + 1.0) * 0.5 * m as f64;
                let i = (x.floor() as usize).min(m - 1);
                let f = x - i as f64;
                values[i] * (1.0 - f) + values[i + 1] * f
            }
        }
    }

    /// α_eff = ∫ W over (−1, 1).
    pub fn coupling(&self) -> f64 {
        match self {
            Profile::Square { strength } | Profile::CosineBump { strength } => *strength,
            Profile::Table { values } => {
                let m = (values.len() - 1) as f64;
                let inner: f64 = values.windows(2).map(|w| 0.5 * (w[0] + w[1])).sum();
                inner * 2.0 / m
            }
        }
    }

    /// Scaled potential −(1/ε)W(u/ε).
    pub fn potential(&self, u: f64, epsilon: f64) -> f64 {
        -self.value(u / epsilon) / epsilon
    }

    /// Points of [−1, 1] where W or its derivative may jump.
    fn knots(&self) -> Vec<f64> {
        match self {
            Profile::Square { .. } | Profile::CosineBump { .. } => vec![-1.0, 1.0],
            Profile::Table { values } => {
                let m = values.len() - 1;
                (0..=m).map(|k| -1.0 + 2.0 * k as f64 / m as f64).collect()
            }
        }
    }

    /// Mean of −(1/ε)W(u/ε) over an axis-aligned square cell of side `h`
    /// centred where u = `u0`, with u linear across the cell along the unit
    /// normal (`a`, `b`). The offset aX + bY of uniform X, Y has a
    /// trapezoidal density, integrated piecewise by Gauss–Legendre.
    pub fn cell_average(&self, u0: f64, a: f64, b: f64, h: f64, epsilon: f64) -> f64 {
        let (p, q) = {
            let (x, y) = (0.5 * h * a.abs(), 0.5 * h * b.abs());
            (x.max(y), x.min(y))
        };
        let reach = p + q;
        if u0.abs() >= epsilon + reach {
            return 0.0;
        }
        if reach == 0.0 {
            return self.potential(u0, epsilon);
        }
        let thin = q <= 1e-12 * p;
        let density = |t: f64| {
            if thin {
                0.5 / p
            } else {
                ((t + p).min(q) - (t - p).max(-q)).max(0.0) / (4.0 * p * q)
            }
        };
        let mut cuts = vec![-reach, reach];
        if !thin {
            cuts.push(q - p);
            cuts.push(p - q);
        }
        cuts.extend(self.knots().iter().map(|k| k * epsilon - u0));
        cuts.retain(|c| (-reach..=reach).contains(c));
        cuts.sort_by(f64::total_cmp);
        let mut total = 0.0;
        for w in cuts.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            if hi <= lo {
                continue;
            }
            let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
            for (x, g) in GAUSS6_NODES.iter().zip(GAUSS6_WEIGHTS) {
                let t = mid + half * x;
                total += half * g * self.potential(u0 + t, epsilon) * density(t);
            }
        }
        total
    }

    /// Same shape with ∫W multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Profile {
        match self {
            Profile::Square { strength } => Profile::Square {
                strength: strength * factor,
            },
            Profile::CosineBump { strength } => Profile::CosineBump {
                strength: strength * factor,
            },
            Profile::Table { values } => Profile::Table {
                values: values.iter().map(|v| v * factor).collect(),
            },
        }
    }
}

const GAUSS6_NODES: [f64; 6] = [
    -0.932469514203152,
    -0.6612093864662645,
    -0.23861918608319693,
    0.23861918608319693,
    0.6612093864662645,
    0.932469514203152,
];
const GAUSS6_WEIGHTS: [f64; 6] = [
    0.17132449237916975,
    0.36076157304813894,
    0.46791393457269137,
    0.46791393457269137,
    0.36076157304813894,
    0.17132449237916975,
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn couplings() {
        assert_eq!(Profile::Square { strength: 1.0 }.coupling(), 1.0);
        let t = Profile::Table {
            values: vec![0.0, 1.0, 0.0],
        };
        assert!((t.coupling() - 1.0).abs() < 1e-15);
        assert_eq!(t.value(0.0), 1.0);
        assert_eq!(t.value(0.5), 0.5);
        assert_eq!(t.value(1.0), 0.0);
        let c = Profile::CosineBump { strength: 2.0 };
        let n = 100_000;
        let q: f64 = (0..n)
            .map(|k| c.value(-1.0 + (k as f64 + 0.5) * 2.0 / n as f64) * 2.0 / n as f64)
            .sum();
        assert!((q - 2.0).abs() < 1e-8);
    }

    #[test]
    fn cell_average_matches_brute_force() {
        let (a, b) = (0.6f64, 0.8f64);
        let h = 0.05;
        for profile in [
            Profile::Square { strength: 1.0 },
            Profile::CosineBump { strength: 1.0 },
            Profile::Table {
                values: vec![0.0, 2.0, -1.0, 0.5],
            },
        ] {
            for &u0 in &[0.0, 0.17, -0.21, 0.24, 0.3] {
                let exact = profile.cell_average(u0, a, b, h, 0.2);
                let n = 1200;
                let mut brute = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        let x = h * ((i as f64 + 0.5) / n as f64 - 0.5);
                        let y = h * ((j as f64 + 0.5) / n as f64 - 0.5);
                        brute += profile.potential(u0 + a * x + b * y, 0.2);
                    }
                }
                brute /= (n * n) as f64;
                assert!(
                    (exact - brute).abs() < 2e-3 * (1.0 + brute.abs()),
                    "{u0}: {exact} vs {brute}"
                );
            }
        }
        // axis-aligned normal reduces to a one-dimensional average
        let s = Profile::Square { strength: 1.0 };
        assert!((s.cell_average(0.2, 1.0, 0.0, 0.1, 0.2) + 0.5 * 2.5).abs() < 1e-12);
    }
}
