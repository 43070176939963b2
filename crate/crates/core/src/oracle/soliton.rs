use statrs::function::gamma::ln_gamma;

use super::OracleError;

/// The line soliton `A sech^{2/(p-2)}(c x)` solving `-u'' - u^{p-1} + omega u = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Soliton {
    p: f64,
    omega: f64,
}

/// `int_R sech^k(y) dy = sqrt(pi) Gamma(k/2) / Gamma((k+1)/2)`.
fn sech_power_integral(k: f64) -> f64 {
    std::f64::consts::PI.sqrt() * (ln_gamma(0.5 * k) - ln_gamma(0.5 * (k + 1.0))).exp()
}

impl Soliton {
    pub fn new(p: f64, omega: f64) -> Result<Self, OracleError> {
        if !(p > 2.0 && p.is_finite()) {
            return Err(OracleError::InvalidArgument(format!("p>2 required, got p={p}")));
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(OracleError::InvalidArgument(format!("omega>0 required, got {omega}")));
        }
        Ok(Soliton { p, omega })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// `((p/2) omega)^{1/(p-2)}`.
    pub fn amplitude(&self) -> f64 {
        (0.5 * self.p * self.omega).powf(1.0 / (self.p - 2.0))
    }

    /// `((p-2)/2) sqrt(omega)`.
    pub fn inverse_width(&self) -> f64 {
        0.5 * (self.p - 2.0) * self.omega.sqrt()
    }

    fn exponent(&self) -> f64 {
        2.0 / (self.p - 2.0)
    }

    pub fn value(&self, x: f64) -> f64 {
        let s = 1.0 / (self.inverse_width() * x).cosh();
        self.amplitude() * s.powf(self.exponent())
    }

    pub fn derivative(&self, x: f64) -> f64 {
        -self.omega.sqrt() * (self.inverse_width() * x).tanh() * self.value(x)
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        let c = self.inverse_width();
        let k = self.exponent();
        let t = (c * x).tanh();
        let s = 1.0 / (c * x).cosh();
        self.amplitude() * k * c * c * s.powf(k) * (k * t * t - s * s)
    }

    /// `|-u'' - u^{p-1} + omega u|` at `x`.
    pub fn residual(&self, x: f64) -> f64 {
        let u = self.value(x);
        (-self.second_derivative(x) - u.powf(self.p - 1.0) + self.omega * u).abs()
    }

    /// Inflection point on `(0, inf)`, where `sech^2(c x) = 2/p`.
    pub fn inflection(&self) -> f64 {
        (self.p / 2.0).sqrt().acosh() / self.inverse_width()
    }

    /// `int_R u^r`.
    pub fn power_integral(&self, r: f64) -> f64 {
        self.amplitude().powf(r) / self.inverse_width() * sech_power_integral(r * self.exponent())
    }

    pub fn mass(&self) -> f64 {
        self.power_integral(2.0)
    }

    /// `E = omega M (p - 6) / (2 (p + 2))`, from the Nehari and Pohozaev identities.
    pub fn energy(&self) -> f64 {
        self.omega * self.mass() * (self.p - 6.0) / (2.0 * (self.p + 2.0))
    }

    pub fn action(&self) -> f64 {
        self.energy() + 0.5 * self.omega * self.mass()
    }
}

pub fn soliton_mass(p: f64, omega: f64) -> Result<f64, OracleError> {
    Ok(Soliton::new(p, omega)?.mass())
}

pub fn soliton_energy(p: f64, omega: f64) -> Result<f64, OracleError> {
    Ok(Soliton::new(p, omega)?.energy())
}

/// Frequency of the line soliton of mass `mu`, using `M(omega) = M(1) omega^{(6-p)/(2(p-2))}`.
pub fn soliton_omega_at_mass(p: f64, mu: f64) -> Result<f64, OracleError> {
    if !(p > 2.0 && p < 6.0) {
        return Err(OracleError::InvalidArgument(format!(
            "the mass-frequency map is invertible only for 2<p<6, got p={p}"
        )));
    }
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(OracleError::InvalidArgument(format!("mass must be positive, got {mu}")));
    }
    let unit = Soliton::new(p, 1.0)?.mass();
    let exponent = (6.0 - p) / (2.0 * (p - 2.0));
    Ok((mu / unit).powf(1.0 / exponent))
}

/// Energy of the line soliton with mass `mu`; the comparison level for star graphs.
pub fn soliton_energy_at_mass(p: f64, mu: f64) -> Result<f64, OracleError> {
    soliton_energy(p, soliton_omega_at_mass(p, mu)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_closed_forms() {
        let s = Soliton::new(4.0, 1.0).unwrap();
        assert!((s.amplitude() - 2f64.sqrt()).abs() < 1e-15);
        assert!((s.mass() - 4.0).abs() < 1e-12);
        assert!((s.energy() + 2.0 / 3.0).abs() < 1e-12);
        assert!((soliton_mass(4.0, 4.0).unwrap() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn critical_mass_is_frequency_independent() {
        for omega in [0.37, 1.0, 5.0] {
            let s = Soliton::new(6.0, omega).unwrap();
            assert!((s.mass() - 3f64.sqrt() * std::f64::consts::PI / 2.0).abs() < 1e-12);
            assert!(s.energy().abs() < 1e-12);
        }
    }

    #[test]
    fn inflection_zeroes_second_derivative() {
        for p in [3.0, 4.0, 7.0] {
            let s = Soliton::new(p, 1.3).unwrap();
            assert!(s.second_derivative(s.inflection()).abs() < 1e-12);
        }
    }

    #[test]
    fn mass_inversion() {
        let omega = soliton_omega_at_mass(4.0, 4.0).unwrap();
        assert!((omega - 1.0).abs() < 1e-12);
        assert!(soliton_omega_at_mass(6.0, 1.0).is_err());
        assert!(Soliton::new(2.0, 1.0).is_err());
        assert!(Soliton::new(4.0, 0.0).is_err());
    }
}
