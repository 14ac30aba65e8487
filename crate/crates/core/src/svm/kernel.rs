use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Kernel function used in place of the plain inner product.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelSpec {
    #[default]
    Linear,
    Rbf {
        gamma: f64,
    },
}

impl KernelSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Linear => Ok(()),
            KernelSpec::Rbf { gamma } if gamma > 0.0 && gamma.is_finite() => Ok(()),
            KernelSpec::Rbf { gamma } => Err(Error::InvalidParams(format!("rbf gamma must be positive and finite, got {gamma}"))),
        }
    }

    /// Unchecked evaluation; callers guarantee equal lengths.
    #[inline]
    pub(crate) fn apply(&self, x: &[f64], y: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), y.len());
        match *self {
            KernelSpec::Linear => dot(x, y),
            KernelSpec::Rbf { gamma } => {
                let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
                (-gamma * d2).exp()
            }
        }
    }
}

#[inline]
pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Evaluates `kernel` on two feature vectors.
///
/// Linear kernels return the dot product, rbf kernels `exp(-gamma * |x - y|^2)`.
pub fn kernel_eval(kernel: &KernelSpec, x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    Ok(kernel.apply(x, y))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_is_dot_product() {
        assert_eq!(kernel_eval(&KernelSpec::Linear, &[1.0, 2.0], &[3.0, 4.0]).unwrap(), 11.0);
        assert_eq!(kernel_eval(&KernelSpec::Linear, &[0.0, 0.0], &[5.0, -7.0]).unwrap(), 0.0);
    }

    #[test]
    fn rbf_of_identical_points_is_one() {
        let k = KernelSpec::Rbf { gamma: 0.5 };
        assert_eq!(kernel_eval(&k, &[0.3, -1.2], &[0.3, -1.2]).unwrap(), 1.0);
        let far = kernel_eval(&k, &[0.0], &[2.0]).unwrap();
        assert!((far - (-2.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn mismatch_names_both_lengths() {
        let err = kernel_eval(&KernelSpec::Linear, &[1.0, 2.0], &[1.0]).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains('2') && msg.contains('1'), "{msg}");
    }

    #[test]
    fn rbf_gamma_must_be_positive() {
        assert!(KernelSpec::Rbf { gamma: 0.0 }.validate().is_err());
        assert!(KernelSpec::Rbf { gamma: -1.0 }.validate().is_err());
        assert!(KernelSpec::Rbf { gamma: 0.1 }.validate().is_ok());
    }
}
