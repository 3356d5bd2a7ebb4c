use nalgebra::{Complex, Matrix2};
use proptest::prelude::*;

use ptcd_core::metrics::{bloch_trace_distance, trace_distance, DensityMatrix};
use ptcd_core::{Mat2, Vec2, C64};

fn state() -> impl Strategy<Value = Vec2> {
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0)
        .prop_filter("nonzero", |(a, b, c, d)| a * a + b * b + c * c + d * d > 1e-3)
        .prop_map(|(a, b, c, d)| Vec2::new(C64::new(a, b), C64::new(c, d)))
}

fn mixed() -> impl Strategy<Value = [f64; 3]> {
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0).prop_map(|(x, y, z)| {
        let n = (x * x + y * y + z * z).sqrt();
        if n > 1.0 {
            [x / n, y / n, z / n]
        } else {
            [x, y, z]
        }
    })
}

// half the sum of |eigenvalues| of the Hermitian difference
fn eigen_distance(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    let c = |z: C64| Complex::new(z.re, z.im);
    let m = *a.matrix() - *b.matrix();
    let na = Matrix2::new(c(m.0[0][0]), c(m.0[0][1]), c(m.0[1][0]), c(m.0[1][1]));
    na.symmetric_eigenvalues().iter().map(|l| l.abs()).sum::<f64>() / 2.0
}

proptest! {
    #[test]
    fn pure_state_distance(a in state(), b in state()) {
        let (ra, rb) = (DensityMatrix::from_state(&a).unwrap(), DensityMatrix::from_state(&b).unwrap());
        let ov = a.normalized().inner(&b.normalized()).norm();
        let expected = (1.0 - ov * ov).max(0.0).sqrt();
        prop_assert!((trace_distance(&ra, &rb) - expected).abs() < 1e-10);
    }

    #[test]
    fn symmetric_and_bounded(p in mixed(), q in mixed()) {
        let (a, b) = (DensityMatrix::from_pauli(p).unwrap(), DensityMatrix::from_pauli(q).unwrap());
        let d = trace_distance(&a, &b);
        prop_assert!((d - trace_distance(&b, &a)).abs() < 1e-15);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&d));
        prop_assert!((d - eigen_distance(&a, &b)).abs() < 1e-10);
        prop_assert!((d - bloch_trace_distance(p, q)).abs() < 1e-12);
    }

    #[test]
    fn triangle_inequality(p in mixed(), q in mixed(), r in mixed()) {
        let [a, b, c] = [p, q, r].map(|v| DensityMatrix::from_pauli(v).unwrap());
        prop_assert!(trace_distance(&a, &c) <= trace_distance(&a, &b) + trace_distance(&b, &c) + 1e-12);
    }

    #[test]
    fn zero_only_for_equal_states(p in mixed(), q in mixed()) {
        let (a, b) = (DensityMatrix::from_pauli(p).unwrap(), DensityMatrix::from_pauli(q).unwrap());
        prop_assert_eq!(trace_distance(&a, &a), 0.0);
        let sep = p.iter().zip(q).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        if sep > 1e-9 {
            prop_assert!(trace_distance(&a, &b) > 0.0);
        }
    }
}

#[test]
fn rejects_non_density_matrices() {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    assert!(DensityMatrix::new(Mat2::new(one, z, z, one)).is_err());
    assert!(DensityMatrix::new(Mat2::new(one, one, z, z)).is_err());
    assert!(DensityMatrix::from_pauli([0.0, 0.0, 1.5]).is_err());
}
