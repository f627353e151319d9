use std::ffi::{CStr, CString};
use std::ptr;

use scaling_laws_ffi::*;

fn message() -> String {
    unsafe { CStr::from_ptr(sl_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

const PUBLISHED: SlDataLawParams = SlDataLawParams {
    a: 0.492415,
    alpha: 0.086236,
    c_inf: 0.168059,
};

fn fixture() -> *mut SlPoints {
    let mut points = ptr::null_mut();
    let name = CString::new("table1").unwrap();
    assert_eq!(
        unsafe { sl_points_from_fixture(name.as_ptr(), &mut points) },
        SlStatus::Ok
    );
    points
}

#[test]
fn fit_through_handles_matches_library() {
    let points = fixture();
    let opts = sl_fit_options_default();
    let mut fit = ptr::null_mut();
    unsafe {
        assert_eq!(sl_fit_data_law(points, &opts, &mut fit), SlStatus::Ok);
        let mut s = std::mem::zeroed::<SlFitSummary>();
        assert_eq!(sl_fit_summary(fit, &mut s), SlStatus::Ok);

        let lib_fit = scaling_laws::fit_data_law(
            &scaling_laws::builtin_fixture("table1").unwrap(),
            &scaling_laws::FitOptions::default(),
        )
        .unwrap();
        assert_eq!(s.params.a.to_bits(), lib_fit.params.a().to_bits());
        assert_eq!(s.sse.to_bits(), lib_fit.sse.to_bits());
        assert!(s.converged && s.sse <= 5e-6);

        let mut len = 0usize;
        assert_eq!(sl_fit_residuals(fit, ptr::null_mut(), 0, &mut len), SlStatus::Ok);
        assert_eq!(len, 4);
        let mut r = vec![0.0; len];
        assert_eq!(
            sl_fit_residuals(fit, r.as_mut_ptr(), r.len(), &mut len),
            SlStatus::Ok
        );
        let sse: f64 = r.iter().map(|v| v * v).sum();
        assert!((sse - s.sse).abs() <= 1e-15);

        let mut direct = 0.0;
        assert_eq!(sl_sse(&s.params, points, &mut direct), SlStatus::Ok);
        assert!((direct - s.sse).abs() <= 1e-15 * s.sse);

        sl_fit_free(fit);
        sl_points_free(points);
    }
}

#[test]
fn published_law_evaluates_and_inverts() {
    let mut sse = 0.0;
    let points = fixture();
    unsafe {
        assert_eq!(sl_sse(&PUBLISHED, points, &mut sse), SlStatus::Ok);
        sl_points_free(points);
    }
    assert!((sse - 4.4e-6).abs() <= 0.3e-6);

    let mut e = 0.0;
    assert_eq!(unsafe { sl_eval_data_law(&PUBLISHED, 2e6, &mut e) }, SlStatus::Ok);
    assert!((e - 0.309).abs() <= 5e-4);
    let mut n = 0.0;
    assert_eq!(unsafe { sl_invert_data_law(&PUBLISHED, e, &mut n) }, SlStatus::Ok);
    assert!((n - 2e6).abs() / 2e6 <= 1e-10);

    assert_eq!(
        unsafe { sl_invert_data_law(&PUBLISHED, 0.10, &mut n) },
        SlStatus::Unreachable
    );
    assert!(message().contains("unreachable below irreducible error"));
}

#[test]
fn envelope_and_joint_law() {
    let env = SlEnvelopeParams { eps0: 0.5, eta: 0.3 };
    let mut v = 0.0;
    assert_eq!(unsafe { sl_envelope(0.3, &env, &mut v) }, SlStatus::Ok);
    assert!((v - 0.5 / 2f64.sqrt()).abs() <= 1e-12);
    assert_eq!(
        unsafe { sl_envelope(-1.0, &env, &mut v) },
        SlStatus::InvalidArgument
    );

    let joint = SlJointLawParams {
        a: 0.4,
        alpha: 0.1,
        b: 0.3,
        beta: 0.2,
        c_inf: 0.05,
    };
    assert_eq!(
        unsafe { sl_eval_joint_law(&joint, 1.0, 1.0, &mut v) },
        SlStatus::Ok
    );
    assert!((v - 0.75).abs() <= 1e-15);
}

#[test]
fn pushed_points_validate_and_round_trip_through_csv() {
    let points = sl_points_new();
    unsafe {
        for (n, e) in [(1e3, 0.5), (1e4, 0.4), (1e5, 0.35), (1e6, 0.33)] {
            assert_eq!(sl_points_push(points, n, e, f64::NAN), SlStatus::Ok);
        }
        assert_eq!(sl_points_push(points, 0.5, 0.3, -1.0), SlStatus::InvalidArgument);
        assert_eq!(sl_points_push(points, 10.0, 1.3, -1.0), SlStatus::InvalidArgument);
        assert_eq!(sl_points_len(points), 4);

        let dir = tempfile::tempdir().unwrap();
        let path = CString::new(dir.path().join("p.csv").to_str().unwrap()).unwrap();
        assert_eq!(sl_points_write_csv(points, path.as_ptr()), SlStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(sl_points_read_csv(path.as_ptr(), &mut back), SlStatus::Ok);
        assert_eq!(sl_points_len(back), 4);
        let (mut n, mut e) = (0.0, 0.0);
        assert_eq!(sl_points_get(back, 1, &mut n, &mut e), SlStatus::Ok);
        assert_eq!((n, e), (1e4, 0.4));
        assert_eq!(sl_points_get(back, 9, &mut n, &mut e), SlStatus::InvalidArgument);

        sl_points_free(back);
        sl_points_free(points);
    }
}

#[test]
fn failing_calls_leave_outputs_null() {
    let mut out = 1 as *mut SlPoints;
    let name = CString::new("table9").unwrap();
    assert_eq!(
        unsafe { sl_points_from_fixture(name.as_ptr(), &mut out) },
        SlStatus::UnknownFixture
    );
    assert!(out.is_null());
    assert!(message().contains("unknown fixture"));

    let missing = CString::new("/nonexistent/points.csv").unwrap();
    assert_eq!(
        unsafe { sl_points_read_csv(missing.as_ptr(), &mut out) },
        SlStatus::Io
    );

    let empty = sl_points_new();
    let mut fit = ptr::null_mut();
    assert_eq!(
        unsafe { sl_fit_data_law(empty, ptr::null(), &mut fit) },
        SlStatus::EmptyObservations
    );
    assert!(fit.is_null());
    unsafe { sl_points_free(empty) };
}

#[test]
fn invalid_options_are_rejected() {
    let points = fixture();
    let mut opts = sl_fit_options_default();
    opts.mse_stop = -1.0;
    let mut fit = ptr::null_mut();
    unsafe {
        assert_eq!(
            sl_fit_data_law(points, &opts, &mut fit),
            SlStatus::InvalidArgument
        );
        opts = sl_fit_options_default();
        opts.init.alpha = -0.1;
        assert_eq!(
            sl_fit_data_law(points, &opts, &mut fit),
            SlStatus::InvalidArgument
        );
        opts = sl_fit_options_default();
        opts.inverse_variance = true;
        let status = sl_fit_data_law(points, &opts, &mut fit);
        assert_ne!(status, SlStatus::Ok, "table1 lacks std on the last row");
        sl_points_free(points);
    }
}
