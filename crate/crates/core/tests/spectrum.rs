use nalgebra::{Complex, Matrix2};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use ptcd_core::spectrum::{build_hamiltonian, chiral_checks, eigensystem, mixing_angle, overlap_angle, SystemParams};
use ptcd_core::{Mat2, Vec2, C64};

fn random_params(rng: &mut StdRng, with_phase: bool) -> SystemParams {
    loop {
        let delta = rng.gen_range(-50.0..50.0);
        let amp = rng.gen_range(0.0..50.0);
        let kappa = rng.gen_range(0.0..1.0);
        let phase = if with_phase { rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI) } else { 0.0 };
        let p = SystemParams::with_phase(delta, amp, phase, kappa).unwrap();
        if p.discriminant().norm() >= 1e-3 {
            return p;
        }
    }
}

fn to_na(m: &Mat2) -> Matrix2<Complex<f64>> {
    let c = |z: C64| Complex::new(z.re, z.im);
    Matrix2::new(c(m.0[0][0]), c(m.0[0][1]), c(m.0[1][0]), c(m.0[1][1]))
}

#[test]
fn eigenstructure_identities_on_random_samples() {
    let mut rng = StdRng::seed_from_u64(7);
    let mut worst = [0.0f64; 5];
    for k in 0..1000 {
        let p = random_params(&mut rng, k % 2 == 1);
        let a = mixing_angle(&p, None).unwrap();
        let e = eigensystem(&p, &a).unwrap();
        let b = e.biorthogonality();
        for (n, row) in b.iter().enumerate() {
            for (m, v) in row.iter().enumerate() {
                let target = if n == m { 1.0 } else { 0.0 };
                worst[0] = worst[0].max((v - target).norm());
            }
        }
        for plus in [true, false] {
            let r = e.right(plus);
            worst[1] = worst[1].max((r.inner(r) - a.im.cosh()).norm());
        }
        let overlap = e.right_minus.inner(&e.right_plus);
        worst[2] = worst[2].max((overlap - C64::new(0.0, a.im.sinh())).norm());

        let h = build_hamiltonian(&p);
        for plus in [true, false] {
            let r = e.right(plus);
            let res = (h.apply(r) - *r * e.lambda(plus)).norm();
            worst[3] = worst[3].max(res / (1.0 + e.lambda(plus).norm()));
        }
        let chiral = chiral_checks(&p);
        worst[4] = worst[4].max(chiral.anticommutation);
        assert!(chiral.involution < 1e-15);
        let eig = chiral.eigen.unwrap();
        for v in [eig.exchange_plus, eig.exchange_minus, eig.energy_identity, eig.coupling_identity, eig.xi_eigen] {
            assert!(v < 1e-10, "{v}");
        }
    }
    assert!(worst[0] < 1e-10, "biorthonormality {}", worst[0]);
    assert!(worst[1] < 1e-10, "norm {}", worst[1]);
    assert!(worst[2] < 1e-10, "overlap {}", worst[2]);
    assert!(worst[3] < 1e-10, "spectral {}", worst[3]);
    assert!(worst[4] < 1e-12, "chiral {}", worst[4]);
}

#[test]
fn agrees_with_generic_eigensolver() {
    let mut rng = StdRng::seed_from_u64(11);
    for k in 0..300 {
        let p = random_params(&mut rng, k % 3 == 0);
        let e = eigensystem(&p, &mixing_angle(&p, None).unwrap()).unwrap();
        let h = to_na(&build_hamiltonian(&p));
        let ev = h.schur().eigenvalues().expect("complex Schur form has eigenvalues");
        let ours = [e.lambda_plus, e.lambda_minus];
        for lam in ours {
            let scale = 1.0 + lam.norm();
            let d = ev.iter().map(|z| (C64::new(z.re, z.im) - lam).norm()).fold(f64::INFINITY, f64::min);
            assert!(d < 1e-10 * scale, "{lam} vs {ev:?}");

            // null vector of H − λI from an SVD, compared up to complex scale
            let shifted = h - Matrix2::identity() * Complex::new(lam.re, lam.im);
            let svd = shifted.svd(false, true);
            let vt = svd.v_t.unwrap();
            let (i_min, _) = svd.singular_values.argmin();
            let null = Vec2::new(
                C64::new(vt[(i_min, 0)].re, -vt[(i_min, 0)].im),
                C64::new(vt[(i_min, 1)].re, -vt[(i_min, 1)].im),
            );
            let plus = lam == e.lambda_plus;
            let ours = e.normalized_right(plus);
            assert!((ours.inner(&null).norm() - 1.0).abs() < 1e-8, "eigenvector mismatch at {p:?}");
        }
    }
}

#[test]
fn gap_closes_toward_eps_along_rays() {
    let kappa = 0.4;
    for &(dj, dd) in &[(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.6, -0.8)] {
        for j_ep in [kappa, -kappa] {
            let mut last = f64::INFINITY;
            for s in [1e-1, 1e-2, 1e-3, 1e-4, 1e-5] {
                let p = SystemParams::real(dd * s, j_ep + dj * s, kappa).unwrap();
                let e = eigensystem(&p, &mixing_angle(&p, None).unwrap()).unwrap();
                let gap = (e.lambda_plus - e.lambda_minus).norm();
                assert!(gap < last);
                last = gap;
            }
            assert!(last < 1e-2);
        }
    }
    let at = SystemParams::real(0.0, kappa, kappa).unwrap();
    assert_eq!(at.discriminant().norm(), 0.0);
}

#[test]
fn overlap_angle_of_normalized_eigenvectors() {
    let mut rng = StdRng::seed_from_u64(3);
    for _ in 0..200 {
        let p = random_params(&mut rng, true);
        let a = mixing_angle(&p, None).unwrap();
        let e = eigensystem(&p, &a).unwrap();
        let o = overlap_angle(&a);
        let ov = e.normalized_right(false).inner(&e.normalized_right(true)).norm();
        assert!((ov - o.theta.cos()).abs() < 1e-10);
        assert!((ov * ov - o.transition_probability).abs() < 1e-10);
    }
}
