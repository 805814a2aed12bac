//! Initial data used by the experiments.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::Result;
use crate::spectral::{self, Field, GridSpec};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DataProfile {
    /// `e^{i xi_1 x_1}` on the lowest nonzero mode.
    PlaneWave,
    /// `prod_i sech(x_i)`.
    Sech,
    /// `e^{-|x|^2/2}`.
    Gaussian,
    /// Random spectrum with exact decay `e^{-sigma ||xi||}`, unit `L^2` norm.
    RandomGevrey { sigma: f64, seed: u64 },
}

impl fmt::Display for DataProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataProfile::PlaneWave => f.write_str("plane_wave"),
            DataProfile::Sech => f.write_str("sech"),
            DataProfile::Gaussian => f.write_str("gaussian"),
            DataProfile::RandomGevrey { sigma, seed } => write!(f, "random_gevrey({sigma:?}, {seed})"),
        }
    }
}

impl FromStr for DataProfile {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "plane_wave" => return Ok(DataProfile::PlaneWave),
            "sech" => return Ok(DataProfile::Sech),
            "gaussian" => return Ok(DataProfile::Gaussian),
            _ => {}
        }
        let args = s
            .trim()
            .strip_prefix("random_gevrey(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| format!("unknown data profile `{s}`"))?;
        let (sigma, seed) = args
            .split_once(',')
            .ok_or_else(|| format!("random_gevrey takes (sigma, seed), got `{args}`"))?;
        let sigma: f64 = sigma.trim().parse().map_err(|e| format!("bad sigma `{sigma}`: {e}"))?;
        let seed: u64 = seed.trim().parse().map_err(|e| format!("bad seed `{seed}`: {e}"))?;
        if !(sigma > 0.0) {
            return Err(format!("random_gevrey sigma must be > 0, got {sigma}"));
        }
        Ok(DataProfile::RandomGevrey { sigma, seed })
    }
}

impl DataProfile {
    pub fn build(&self, grid: &GridSpec) -> Result<Field> {
        let d = grid.dim();
        match *self {
            DataProfile::PlaneWave => {
                let xi = grid.xi(1);
                Field::from_fn(*grid, |x| Complex64::from_polar(1.0, xi * x[0]))
            }
            DataProfile::Sech => Field::from_fn(*grid, |x| Complex64::from(x[..d].iter().map(|v| 1.0 / v.cosh()).product::<f64>())),
            DataProfile::Gaussian => {
                Field::from_fn(*grid, |x| Complex64::from((-0.5 * x[..d].iter().map(|v| v * v).sum::<f64>()).exp()))
            }
            DataProfile::RandomGevrey { sigma, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let half = (grid.n() / 2) as i64;
                let spectrum: Vec<Complex64> = grid
                    .wavevectors()
                    .into_iter()
                    .map(|k| {
                        let re: f64 = StandardNormal.sample(&mut rng);
                        let im: f64 = StandardNormal.sample(&mut rng);
                        if k[0] == -half || (d == 2 && k[1] == -half) {
                            return Complex64::default();
                        }
                        let w = (-sigma * spectral::l1([grid.xi(k[0]), grid.xi(k[1])])).exp();
                        Complex64::new(re, im) * w
                    })
                    .collect();
                let f = Field::from_spectrum(*grid, spectrum)?;
                let norm = f.l2_norm();
                Ok(f.scale(Complex64::from(1.0 / norm)))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::{estimate_radius, FitConfig};
    use crate::spectral::make_grid;

    #[test]
    fn display_parse_roundtrip() {
        for p in [
            DataProfile::PlaneWave,
            DataProfile::Sech,
            DataProfile::Gaussian,
            DataProfile::RandomGevrey { sigma: 0.25, seed: 9 },
        ] {
            assert_eq!(p.to_string().parse::<DataProfile>().unwrap(), p);
        }
        assert!("random_gevrey(0.3)".parse::<DataProfile>().is_err());
        assert!("random_gevrey(-1, 2)".parse::<DataProfile>().is_err());
        assert!("cosine".parse::<DataProfile>().is_err());
    }

    #[test]
    fn profiles_have_expected_shape() {
        let g = make_grid(1, 256, 20.0).unwrap();
        let sech = DataProfile::Sech.build(&g).unwrap();
        assert!((sech.values()[128].re - 1.0).abs() < 1e-15);
        let r = DataProfile::RandomGevrey { sigma: 0.2, seed: 3 }.build(&g).unwrap();
        assert!((r.l2_norm() - 1.0).abs() < 1e-12);
        let again = DataProfile::RandomGevrey { sigma: 0.2, seed: 3 }.build(&g).unwrap();
        assert_eq!(r.values(), again.values());
        let fit = estimate_radius(&r, &FitConfig::default()).unwrap();
        assert!(!fit.saturated);
        assert!((fit.sigma_est - 0.2).abs() < 0.05, "{fit:?}");
        let g2 = make_grid(2, 32, 10.0).unwrap();
        let gauss = DataProfile::Gaussian.build(&g2).unwrap();
        assert!((gauss.max_abs() - 1.0).abs() < 1e-15);
    }
}
