use std::ffi::CStr;
use std::ptr;

use rabivar_ffi::*;

fn model(omega_q: f64, g: f64) -> RabivarModel {
    RabivarModel { omega_c: 1.0, omega_q, g }
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(rabivar_last_error_message()) }.to_string_lossy().into_owned()
}

#[test]
fn scalars() {
    let m = model(20.0, 1.0);
    let mut out = 0.0;
    unsafe {
        assert_eq!(rabivar_g_star(&m, 0, &mut out), RabivarStatus::Ok);
        assert!((out - 20f64.sqrt() / 2.0).abs() < 1e-15);
        assert_eq!(rabivar_weak_coupling_squeeze(&m, &mut out), RabivarStatus::Ok);
        assert!((out - 0.05594257852625472).abs() < 1e-12);
        let mut dim = 0usize;
        assert_eq!(rabivar_truncation_dim(&model(1.0, 4.0), &mut dim), RabivarStatus::Ok);
        assert_eq!(dim, 80);
    }
    assert!(last_error().is_empty());
    let version = unsafe { CStr::from_ptr(rabivar_version()) }.to_str().unwrap();
    assert_eq!(version, env!("CARGO_PKG_VERSION"));
}

#[test]
fn errors_are_reported() {
    let mut out = 0.0;
    unsafe {
        assert_eq!(rabivar_g_star(ptr::null(), 0, &mut out), RabivarStatus::NullPointer);
        assert!(last_error().contains("model"));
        assert_eq!(rabivar_g_star(&model(-1.0, 1.0), 0, &mut out), RabivarStatus::InvalidParameter);
        assert!(last_error().contains("omega_q"));
        assert_eq!(rabivar_g_star(&model(0.5, 1.0), 1, &mut out), RabivarStatus::InvalidRegime);
        assert_eq!(rabivar_weak_coupling_squeeze(&model(20.0, 3.0), &mut out), RabivarStatus::InvalidRegime);
        assert_eq!(rabivar_g_star(&model(20.0, 1.0), 0, ptr::null_mut()), RabivarStatus::NullPointer);
    }
}

#[test]
fn state_handles() {
    let m = model(10.0, 10f64.sqrt() / 2.0);
    unsafe {
        let mut ground = ptr::null_mut();
        let mut e0 = 0.0;
        assert_eq!(rabivar_ground_state(&m, &mut ground, &mut e0), RabivarStatus::Ok);
        let mut dim = 0usize;
        assert_eq!(rabivar_state_dim(ground, &mut dim), RabivarStatus::Ok);

        let mut energy = 0.0;
        assert_eq!(rabivar_state_energy(ground, &m, &mut energy), RabivarStatus::Ok);
        assert!((energy - e0).abs() < 1e-9);

        let mut buf = vec![0.0; 4 * dim];
        assert_eq!(rabivar_state_amplitudes(ground, buf.as_mut_ptr(), buf.len() - 1), RabivarStatus::BufferTooSmall);
        assert_eq!(rabivar_state_amplitudes(ground, buf.as_mut_ptr(), buf.len()), RabivarStatus::Ok);
        let norm: f64 = buf.iter().map(|x| x * x).sum();
        assert!((norm - 1.0).abs() < 1e-12);

        let mut fit = std::mem::zeroed::<RabivarFit>();
        assert_eq!(rabivar_optimize_noq(&m, 0, &mut fit), RabivarStatus::Ok);
        assert!(fit.infidelity < 1e-3 && fit.converged);
        assert!(fit.energy_error >= -1e-9);

        // a smaller NOQ state is padded for the overlap
        let mut noq = ptr::null_mut();
        assert_eq!(rabivar_noq_ground(&fit.noq, 40, &mut noq), RabivarStatus::Ok);
        let mut f = 0.0;
        assert_eq!(rabivar_fidelity(noq, ground, &mut f), RabivarStatus::Ok);
        assert!((1.0 - f - fit.infidelity).abs() < 1e-6);

        let mut mu = 0.0;
        assert_eq!(rabivar_state_cavity_purity(noq, &mut mu), RabivarStatus::Ok);
        assert!((mu - (fit.p_minus.powi(2) + (1.0 - fit.p_minus).powi(2))).abs() < 1e-8);

        let mut ecs = ptr::null_mut();
        assert_eq!(rabivar_ecs_ground(0.0, 20, &mut ecs), RabivarStatus::Ok);
        assert_eq!(rabivar_state_cavity_purity(ecs, &mut mu), RabivarStatus::Ok);
        assert!((mu - 1.0).abs() < 1e-12);

        rabivar_state_free(ground);
        rabivar_state_free(noq);
        rabivar_state_free(ecs);
        rabivar_state_free(ptr::null_mut());
    }
}

#[test]
fn energy_functions() {
    let m = model(176.0, 5.0 * 176f64.sqrt() / 2.0);
    unsafe {
        let mut fit = std::mem::zeroed::<RabivarFit>();
        assert_eq!(rabivar_minimize_energy(&m, 1, &mut fit), RabivarStatus::Ok);
        let expected = m.g * (1.0 - 0.2f64.powi(4)).sqrt();
        assert!((fit.noq.alpha_c - expected).abs() / expected < 0.02);

        let s = RabivarSchmidt { p_minus: 1.0, alpha_c: 0.0, r: 0.0 };
        let mut e = 0.0;
        assert_eq!(rabivar_energy_analytic(&s, &m, &mut e), RabivarStatus::Ok);
        assert!((e + 88.0).abs() < 1e-12);
        let bad = RabivarSchmidt { p_minus: 0.2, ..s };
        assert_eq!(rabivar_energy_analytic(&bad, &m, &mut e), RabivarStatus::InvalidParameter);
    }
}
