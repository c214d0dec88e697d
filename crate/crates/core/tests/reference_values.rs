use open_moyal::closed_forms::{drift_correction, symbol_q2, SystemParams};
use open_moyal::nonmarkovian::{kernel_poles, symbol_p_nonmarkov, ExpKernel};
use open_moyal::symbol_algebra::PhasePoint;

fn close(got: f64, want: f64, tol: f64) {
    assert!((got - want).abs() <= tol, "got {got:.17e}, want {want:.17e}");
}

#[test]
fn exponential_kernel_poles() {
    // Roots of s^2 + 100 s + 100.
    let (s1, s2) = kernel_poles(&ExpKernel::new(1.0, 100.0, 1.0).unwrap());
    close(s1.re, -1.010_205_144_336_440_2, 1e-12);
    close(s2.re, -98.989_794_855_663_56, 1e-10);
    assert_eq!((s1.im, s2.im), (0.0, 0.0));
}

#[test]
fn short_time_momentum_symbol() {
    let k = ExpKernel::new(1.0, 100.0, 1.0).unwrap();
    close(symbol_p_nonmarkov(0.02, &k).averaged(PhasePoint::new(1.0, 0.0)), -0.844_863_39, 1e-8);
}

#[test]
fn position_variance_at_unit_time() {
    // 2 - 3 - e^-2 + 4 e^-1 with m = gamma = kBT = 1.
    let params = SystemParams::new(1.0, 1.0, 1.0).unwrap();
    close(symbol_q2(1.0, PhasePoint::origin(), &params), 0.336_182_481_449_156_6, 1e-14);
}

#[test]
fn drift_under_unit_force() {
    let params = SystemParams::new(1.0, 1.0, 0.0).unwrap().with_force(1.0);
    let (dq, dp) = drift_correction(1.0, &params);
    close(dq, 0.367_879_441_171_442_33, 1e-15);
    close(dp, 0.632_120_558_828_557_7, 1e-15);
}
