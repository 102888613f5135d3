use crate::error::{Error, Result};

/// Parameters of an iARMA process: autoregressive coefficient `phi`,
/// moving-average coefficient `theta`, innovation scale `sigma2` and level `mu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    phi: f64,
    theta: f64,
    sigma2: f64,
    mu: f64,
}

pub(crate) fn check_coefficient(name: &'static str, value: f64) -> Result<()> {
    if (0.0..1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            range: "[0, 1)",
        })
    }
}

impl ModelParams {
    /// Zero-mean parameters. Requires `0 <= phi < 1`, `0 <= theta < 1` and `sigma2 > 0`.
    pub fn new(phi: f64, theta: f64, sigma2: f64) -> Result<Self> {
        check_coefficient("phi", phi)?;
        check_coefficient("theta", theta)?;
        if !(sigma2 > 0.0 && sigma2.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "sigma2",
                value: sigma2,
                range: "(0, inf)",
            });
        }
        Ok(Self {
            phi,
            theta,
            sigma2,
            mu: 0.0,
        })
    }

    pub fn with_mu(self, mu: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::InvalidParameter {
                name: "mu",
                value: mu,
                range: "finite",
            });
        }
        Ok(Self { mu, ..self })
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Stationary variance factor `c_1 = (1 + 2 phi theta + theta^2) / (1 - phi^2)`.
    pub fn c1(&self) -> f64 {
        c1(self.phi, self.theta)
    }
}

/// `1 - phi^2` is formed as `(1 - phi)(1 + phi)`, which stays accurate to a
/// few ulps as `phi` approaches one.
#[inline]
pub(crate) fn c1(phi: f64, theta: f64) -> f64 {
    (1.0 + 2.0 * phi * theta + theta * theta) / ((1.0 - phi) * (1.0 + phi))
}
