use std::ffi::CStr;
use std::ptr;

use liouskin_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(liouskin_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

fn model(bc: LiouskinBoundary, l: usize, m: usize, phi: f64) -> *mut LiouskinModel {
    let mut out = ptr::null_mut();
    let s = unsafe { liouskin_model_new(bc as i32, l, m, 1.0, phi, 0.0, 0.0, &mut out) };
    assert_eq!(s, LiouskinStatus::Ok, "{}", last_error());
    out
}

// One magnon on a ring of four at φ = 0: E = 2(cos k − 1), k = 0, ±π/2, π.
#[test]
fn ring_magnon_spectrum_and_roots() {
    let m = model(LiouskinBoundary::Periodic, 4, 1, 0.0);
    unsafe {
        let mut op = ptr::null_mut();
        assert_eq!(liouskin_operator_new(m, &mut op), LiouskinStatus::Ok);
        assert_eq!(liouskin_operator_dim(op), 4);
        let mut spec = ptr::null_mut();
        assert_eq!(liouskin_spectrum_new(op, &mut spec), LiouskinStatus::Ok);
        let n = liouskin_spectrum_len(spec);
        let (mut re, mut im) = (vec![0.0; n], vec![0.0; n]);
        assert_eq!(
            liouskin_spectrum_values(spec, re.as_mut_ptr(), im.as_mut_ptr(), n),
            LiouskinStatus::Ok
        );
        for (got, want) in re.iter().zip([-4.0, -2.0, -2.0, 0.0]) {
            assert!((got - want).abs() < 1e-12, "{re:?}");
        }
        assert!(im.iter().all(|x| x.abs() < 1e-12));

        let mut roots = ptr::null_mut();
        assert_eq!(
            liouskin_roots_new(m, &mut roots),
            LiouskinStatus::Ok,
            "{}",
            last_error()
        );
        assert_eq!(liouskin_roots_count(roots), 4);
        let mut energies = Vec::new();
        for i in 0..4 {
            let (mut er, mut ei, mut res) = (0.0, 0.0, 1.0);
            assert_eq!(
                liouskin_roots_energy(roots, i, &mut er, &mut ei, &mut res),
                LiouskinStatus::Ok
            );
            let (mut kr, mut ki) = (0.0, 0.0);
            assert_eq!(
                liouskin_roots_momenta(roots, i, &mut kr, &mut ki, 1),
                LiouskinStatus::Ok
            );
            assert!((2.0 * (kr.cos() - 1.0) - er).abs() < 1e-10);
            assert!(res < 1e-10 && ei.abs() < 1e-10);
            energies.push(er);
        }
        energies.sort_by(f64::total_cmp);
        for (got, want) in energies.iter().zip([-4.0, -2.0, -2.0, 0.0]) {
            assert!((got - want).abs() < 1e-10, "{energies:?}");
        }
        assert_eq!(
            liouskin_roots_energy(roots, 4, ptr::null_mut(), ptr::null_mut(), ptr::null_mut()),
            LiouskinStatus::InvalidArgument
        );
        assert!(last_error().contains("out of range"));

        liouskin_roots_free(roots);
        liouskin_spectrum_free(spec);
        liouskin_operator_free(op);
        liouskin_model_free(m);
    }
}

// Two sites, one particle, open: the weights are 1 : e^{2φ} toward the right.
#[test]
fn two_site_steady_state() {
    let phi = 0.4;
    let m = model(LiouskinBoundary::Open, 2, 1, phi);
    unsafe {
        let mut st = ptr::null_mut();
        assert_eq!(
            liouskin_steady_new(m, &mut st),
            LiouskinStatus::Ok,
            "{}",
            last_error()
        );
        assert_eq!(liouskin_steady_dim(st), 2);
        assert_eq!(liouskin_steady_sites(st), 2);
        let mut configs = [0u32; 2];
        let mut probs = [0.0; 2];
        assert_eq!(
            liouskin_steady_probabilities(st, configs.as_mut_ptr(), probs.as_mut_ptr(), 2),
            LiouskinStatus::Ok
        );
        assert_eq!(configs, [0b01, 0b10]);
        assert!((probs[1] / probs[0] - (2.0 * phi).exp()).abs() < 1e-10);
        let (mut imb, mut res) = (0.0, 1.0);
        assert_eq!(
            liouskin_steady_summary(st, &mut imb, &mut res),
            LiouskinStatus::Ok
        );
        assert!((imb - phi.tanh()).abs() < 1e-10);
        assert!(res < 1e-10);
        liouskin_steady_free(st);
        liouskin_model_free(m);
    }
}

#[test]
fn operator_triplets_round_trip() {
    let m = model(LiouskinBoundary::Open, 2, 1, 0.3);
    unsafe {
        let mut op = ptr::null_mut();
        assert_eq!(liouskin_operator_new(m, &mut op), LiouskinStatus::Ok);
        let nnz = liouskin_operator_nnz(op);
        assert_eq!(nnz, 4);
        let (mut r, mut c, mut re, mut im) = (
            vec![0usize; nnz],
            vec![0usize; nnz],
            vec![0.0; nnz],
            vec![0.0; nnz],
        );
        let s = liouskin_operator_triplets(
            op,
            r.as_mut_ptr(),
            c.as_mut_ptr(),
            re.as_mut_ptr(),
            im.as_mut_ptr(),
            nnz - 1,
        );
        assert_eq!(s, LiouskinStatus::BufferTooSmall);
        assert!(last_error().contains("needs 4"));
        let s = liouskin_operator_triplets(
            op,
            r.as_mut_ptr(),
            c.as_mut_ptr(),
            re.as_mut_ptr(),
            im.as_mut_ptr(),
            nnz,
        );
        assert_eq!(s, LiouskinStatus::Ok);
        // Probability is conserved: every column sums to zero.
        let mut sums = [0.0; 2];
        for k in 0..nnz {
            sums[c[k]] += re[k];
        }
        assert!(sums.iter().all(|s| s.abs() < 1e-14), "{sums:?}");
        let mut configs = [0u32; 2];
        assert_eq!(
            liouskin_operator_configs(op, configs.as_mut_ptr(), 2),
            LiouskinStatus::Ok
        );
        assert_eq!(configs, [1, 2]);
        liouskin_operator_free(op);
        liouskin_model_free(m);
    }
}

#[test]
fn invalid_input_sets_status_and_message() {
    unsafe {
        let mut out = ptr::null_mut();
        let s = liouskin_model_new(
            LiouskinBoundary::Open as i32,
            1,
            0,
            1.0,
            0.0,
            0.0,
            0.0,
            &mut out,
        );
        assert_eq!(s, LiouskinStatus::InvalidArgument);
        assert!(out.is_null());
        assert!(!last_error().is_empty());

        let s = liouskin_model_new(3, 4, 2, 1.0, 0.0, 0.0, 0.0, &mut out);
        assert_eq!(s, LiouskinStatus::InvalidArgument);
        assert!(last_error().contains("unknown boundary code 3"));

        let s = liouskin_model_new(
            LiouskinBoundary::Open as i32,
            4,
            2,
            1.0,
            0.0,
            0.0,
            0.0,
            ptr::null_mut(),
        );
        assert_eq!(s, LiouskinStatus::NullPointer);

        let mut op = ptr::null_mut();
        assert_eq!(
            liouskin_operator_new(ptr::null(), &mut op),
            LiouskinStatus::NullPointer
        );
        assert!(last_error().contains("model is null"));
        assert_eq!(liouskin_operator_dim(ptr::null()), 0);
        assert_eq!(liouskin_spectrum_len(ptr::null()), 0);
        assert_eq!(liouskin_roots_count(ptr::null()), 0);

        liouskin_model_free(ptr::null_mut());
        liouskin_operator_free(ptr::null_mut());
        liouskin_spectrum_free(ptr::null_mut());
        liouskin_steady_free(ptr::null_mut());
        liouskin_roots_free(ptr::null_mut());
    }
}

#[test]
fn roots_beyond_two_magnons_are_unsupported() {
    let m = model(LiouskinBoundary::Periodic, 6, 3, 0.5);
    unsafe {
        let mut roots = ptr::null_mut();
        let s = liouskin_roots_new(m, &mut roots);
        assert_ne!(s, LiouskinStatus::Ok);
        assert!(roots.is_null());
        liouskin_model_free(m);
    }
}

#[test]
fn errors_are_per_thread() {
    unsafe {
        let mut op = ptr::null_mut();
        assert_eq!(
            liouskin_operator_new(ptr::null(), &mut op),
            LiouskinStatus::NullPointer
        );
    }
    let other = std::thread::spawn(last_error).join().unwrap();
    assert_eq!(other, "");
    assert!(last_error().contains("model is null"));
}

#[test]
fn version_matches_the_crate() {
    let v = unsafe { CStr::from_ptr(liouskin_version()) }
        .to_str()
        .unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
