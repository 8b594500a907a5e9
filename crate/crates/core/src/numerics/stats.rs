use super::{Matrix, NumericsError};

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Sample variance with the `n - 1` divisor.
pub fn sample_variance(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (x.len() as f64 - 1.0)
}

/// Centered values and their sum of squares, or `None` when the spread is
/// indistinguishable from rounding noise.
fn centered(x: &[f64]) -> Option<(Vec<f64>, f64)> {
    let m = mean(x);
    let d: Vec<f64> = x.iter().map(|v| v - m).collect();
    let ss: f64 = d.iter().map(|v| v * v).sum();
    let scale = x.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let floor = (f64::EPSILON * scale).powi(2) * x.len() as f64;
    (ss > floor).then_some((d, ss))
}

/// Pearson product-moment correlation of two equal-length samples.
pub fn pearson(x1: &[f64], x2: &[f64]) -> Result<f64, NumericsError> {
    if x1.len() != x2.len() {
        return Err(NumericsError::DimensionMismatch {
            expected: x1.len(),
            found: x2.len(),
        });
    }
    if x1.len() < 2 {
        return Err(NumericsError::TooFewObservations {
            needed: 2,
            found: x1.len(),
        });
    }
    let (d1, s1) = centered(x1).ok_or(NumericsError::ConstantColumn { column: 0 })?;
    let (d2, s2) = centered(x2).ok_or(NumericsError::ConstantColumn { column: 1 })?;
    let cross: f64 = d1.iter().zip(&d2).map(|(a, b)| a * b).sum();
    Ok((cross / (s1.sqrt() * s2.sqrt())).clamp(-1.0, 1.0))
}

/// Rescales to zero mean and unit sample standard deviation.
pub fn standardize(x: &[f64]) -> Result<Vec<f64>, NumericsError> {
    if x.len() < 2 {
        return Err(NumericsError::TooFewObservations {
            needed: 2,
            found: x.len(),
        });
    }
    let (d, ss) = centered(x).ok_or(NumericsError::ConstantColumn { column: 0 })?;
    let sd = (ss / (x.len() as f64 - 1.0)).sqrt();
    Ok(d.into_iter().map(|v| v / sd).collect())
}

/// Correlation matrix of the columns of `x`: symmetric, unit diagonal.
///
/// A constant column is reported by its index.
pub fn correlation_matrix(x: &Matrix) -> Result<Matrix, NumericsError> {
    let n = x.nrows();
    let p = x.ncols();
    let columns = (0..p)
        .map(|j| {
            standardize(&x.column(j)).map_err(|e| match e {
                NumericsError::ConstantColumn { .. } => NumericsError::ConstantColumn { column: j },
                other => other,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut r = Matrix::identity(p);
    for j in 0..p {
        for k in (j + 1)..p {
            let s: f64 = columns[j].iter().zip(&columns[k]).map(|(a, b)| a * b).sum();
            let v = (s / (n as f64 - 1.0)).clamp(-1.0, 1.0);
            r[(j, k)] = v;
            r[(k, j)] = v;
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pearson_self_and_negation() {
        let x = [1.0, 4.0, 2.0, 8.0, 5.0];
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((pearson(&x, &x).unwrap() - 1.0).abs() < 1e-15);
        assert!((pearson(&x, &neg).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn pearson_hand_value() {
        // sums: x=[1,2,3] y=[1,2,4]; Sxy = 3, Sxx = 2, Syy = 14/3
        // r = 3 / sqrt(2 * 14/3) = 3 / sqrt(28/3)
        let expected = 3.0 / (28.0_f64 / 3.0).sqrt();
        let r = pearson(&[1.0, 2.0, 3.0], &[1.0, 2.0, 4.0]).unwrap();
        assert!((r - expected).abs() < 1e-15);
        assert!((r - 0.981_980_506).abs() < 1e-9);
    }

    #[test]
    fn pearson_constant_is_error() {
        assert_eq!(
            pearson(&[1.0, 2.0, 3.0], &[2.0, 2.0, 2.0]),
            Err(NumericsError::ConstantColumn { column: 1 })
        );
    }

    #[test]
    fn standardize_simple() {
        let z = standardize(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(z, vec![-1.0, 0.0, 1.0]);
        let again = standardize(&z).unwrap();
        for (a, b) in z.iter().zip(&again) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn standardize_constant_is_error() {
        assert!(matches!(standardize(&[5.0, 5.0, 5.0]), Err(NumericsError::ConstantColumn { .. })));
        assert!(matches!(standardize(&[0.1, 0.1, 0.1, 0.1]), Err(NumericsError::ConstantColumn { .. })));
    }

    #[test]
    fn correlation_matrix_cases() {
        // Orthogonal standardized columns.
        let x = Matrix::from_columns(&[vec![1.0, -1.0, 1.0, -1.0], vec![1.0, 1.0, -1.0, -1.0]]).unwrap();
        assert_eq!(correlation_matrix(&x).unwrap(), Matrix::identity(2));

        let a = vec![0.3, 1.7, 2.2, 0.9, 4.1];
        let b = vec![1.0, 0.2, 3.3, 2.8, 0.4];
        let r = correlation_matrix(&Matrix::from_columns(&[a.clone(), b.clone(), a.clone()]).unwrap()).unwrap();
        assert!((r[(0, 2)] - 1.0).abs() < 1e-15);
        assert!((r[(0, 1)] - pearson(&a, &b).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn correlation_matrix_names_constant_column() {
        let x = Matrix::from_columns(&[vec![1.0, 2.0, 3.0], vec![4.0, 4.0, 4.0]]).unwrap();
        assert_eq!(correlation_matrix(&x), Err(NumericsError::ConstantColumn { column: 1 }));
    }

    proptest! {
        #[test]
        fn standardize_moments(x in proptest::collection::vec(-1e3f64..1e3, 3..50)) {
            prop_assume!(sample_variance(&x) > 1e-6);
            let z = standardize(&x).unwrap();
            prop_assert!(mean(&z).abs() < 1e-12);
            prop_assert!((sample_variance(&z).sqrt() - 1.0).abs() < 1e-9);
        }

        #[test]
        fn pearson_affine_invariance(
            xy in proptest::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 3..40),
            slope in 0.01f64..100.0,
            shift in -50.0f64..50.0,
        ) {
            let (x, y): (Vec<f64>, Vec<f64>) = xy.into_iter().unzip();
            prop_assume!(sample_variance(&x) > 1e-3 && sample_variance(&y) > 1e-3);
            let r = pearson(&x, &y).unwrap();
            prop_assert!((-1.0..=1.0).contains(&r));
            prop_assert!((r - pearson(&y, &x).unwrap()).abs() < 1e-15);
            let up: Vec<f64> = x.iter().map(|v| slope * v + shift).collect();
            let down: Vec<f64> = x.iter().map(|v| -slope * v + shift).collect();
            prop_assert!((pearson(&up, &y).unwrap() - r).abs() < 1e-10);
            prop_assert!((pearson(&down, &y).unwrap() + r).abs() < 1e-10);
        }
    }
}
