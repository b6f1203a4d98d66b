//! Scattering amplitudes `A(alpha', alpha)` as functions and as tables.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{uniform_angles, wrap_angle, Vec2};

/// Anything that can report the scattering amplitude for an observation
/// direction `alpha_prime` and an incident direction `alpha`.
pub trait AmplitudeSource: Sync {
    fn wavenumber(&self) -> f64;
    fn amplitude(&self, alpha_prime: Vec2, alpha: Vec2) -> Result<Complex64>;

    /// Amplitudes for one incident direction at several observation directions.
    fn amplitudes(&self, observations: &[Vec2], alpha: Vec2) -> Result<Vec<Complex64>> {
        observations.iter().map(|&o| self.amplitude(o, alpha)).collect()
    }
}

/// Amplitudes sampled on uniform incident and observation angle grids.
#[derive(Debug, Clone, PartialEq)]
pub struct FarFieldTable {
    pub k: f64,
    /// Incident polar angles `beta`.
    pub incident: Vec<f64>,
    /// Observation polar angles `theta`.
    pub observation: Vec<f64>,
    /// Row-major by incident angle: `values[i * n_obs + j] = A(theta_j, beta_i)`.
    pub values: Vec<Complex64>,
}

const ANGLE_MATCH: f64 = 1e-9;

impl FarFieldTable {
    /// Samples `source` on `n_in` incident and `n_out` observation angles.
    pub fn from_source<S: AmplitudeSource + ?Sized>(source: &S, n_in: usize, n_out: usize) -> Result<Self> {
        if n_in == 0 || n_out == 0 {
            return Err(Error::InvalidInput("direction counts must be positive".into()));
        }
        let incident = uniform_angles(n_in);
        let observation = uniform_angles(n_out);
        let directions: Vec<Vec2> = observation.iter().map(|&t| Vec2::polar(t)).collect();
        let values = incident
            .par_iter()
            .map(|&b| source.amplitudes(&directions, Vec2::polar(b)))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        Ok(Self {
            k: source.wavenumber(),
            incident,
            observation,
            values,
        })
    }

    pub fn new(k: f64, incident: Vec<f64>, observation: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != incident.len() * observation.len() {
            return Err(Error::InvalidInput(format!(
                "{} values for a {} x {} direction grid",
                values.len(),
                incident.len(),
                observation.len()
            )));
        }
        if !(k > 0.0) {
            return Err(Error::InvalidInput(format!("wavenumber must be positive, got {k}")));
        }
        Ok(Self {
            k,
            incident,
            observation,
            values,
        })
    }

    pub fn get(&self, i_in: usize, i_out: usize) -> Complex64 {
        self.values[i_in * self.observation.len() + i_out]
    }

    fn find(angles: &[f64], target: f64) -> Option<usize> {
        let t = wrap_angle(target);
        angles.iter().position(|&a| {
            let d = (wrap_angle(a) - t).abs();
            d < ANGLE_MATCH || (std::f64::consts::TAU - d) < ANGLE_MATCH
        })
    }

    pub fn incident_index(&self, beta: f64) -> Option<usize> {
        Self::find(&self.incident, beta)
    }

    pub fn observation_index(&self, theta: f64) -> Option<usize> {
        Self::find(&self.observation, theta)
    }
}

impl AmplitudeSource for FarFieldTable {
    fn wavenumber(&self) -> f64 {
        self.k
    }

    fn amplitude(&self, alpha_prime: Vec2, alpha: Vec2) -> Result<Complex64> {
        let i = self.incident_index(alpha.angle()).ok_or_else(|| {
            Error::InvalidInput(format!("incident angle {} is not on the table grid", alpha.angle()))
        })?;
        let j = self.observation_index(alpha_prime.angle()).ok_or_else(|| {
            Error::InvalidInput(format!(
                "observation angle {} is not on the table grid",
                alpha_prime.angle()
            ))
        })?;
        Ok(self.get(i, j))
    }
}

/// `sqrt(2/(pi k)) e^{-i pi/4}`, the common far-field prefactor.
pub fn far_field_prefactor(k: f64) -> Complex64 {
    Complex64::from_polar((2.0 / (std::f64::consts::PI * k)).sqrt(), -std::f64::consts::FRAC_PI_4)
}
