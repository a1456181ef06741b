mod common;

use approx::assert_abs_diff_eq;
use common::{dim, gaussian_vector, sic, unit_vector};
use sicprob::io::{parse_document, sic_doc, sic_from_doc, to_json_pretty};
use sicprob::linalg::C64;
use sicprob::search::{frame_potential_gradient, local_minimize, search_with_jobs, SearchConfig};
use sicprob::sic::{
    builtin_fiducial, frame_potential, frame_potential_minimum, frame_potential_of, orbit,
    verify_sic, Fiducial,
};

fn finite_difference_gradient(psi: &[C64], h: f64) -> Vec<C64> {
    let mut out = Vec::with_capacity(psi.len());
    for k in 0..psi.len() {
        let mut component = [0.0; 2];
        for (part, delta) in [C64::new(h, 0.0), C64::new(0.0, h)].into_iter().enumerate() {
            let mut plus = psi.to_vec();
            let mut minus = psi.to_vec();
            plus[k] += delta;
            minus[k] -= delta;
            component[part] = (frame_potential_of(&plus) - frame_potential_of(&minus)) / (2.0 * h);
        }
        out.push(C64::new(component[0], component[1]));
    }
    out
}

fn relative_error(analytic: &[C64], numeric: &[C64]) -> f64 {
    let diff: f64 = analytic
        .iter()
        .zip(numeric)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let scale: f64 = numeric.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    diff / scale
}

#[test]
fn analytic_gradient_matches_central_differences() {
    for d in 2..=5 {
        for point in 0..20u64 {
            let psi = unit_vector(d, 1000 * d as u64 + point);
            let err = relative_error(
                &frame_potential_gradient(&psi),
                &finite_difference_gradient(&psi, 1e-6),
            );
            assert!(err <= 1e-5, "d={d} point={point}: relative error {err:e}");
        }
    }
}

#[test]
fn gradient_is_exact_off_the_sphere() {
    let psi = gaussian_vector(3, 7);
    let err = relative_error(
        &frame_potential_gradient(&psi),
        &finite_difference_gradient(&psi, 1e-6),
    );
    assert!(err <= 1e-5, "relative error {err:e}");
}

#[test]
fn builtin_minima_are_exact() {
    for (d, expected) in [(2, 4.0 / 3.0), (3, 4.5)] {
        let f = builtin_fiducial(dim(d)).unwrap();
        assert_abs_diff_eq!(frame_potential(&f), expected, epsilon = 1e-10);
        assert_abs_diff_eq!(frame_potential_minimum(dim(d)), expected, epsilon = 1e-15);
    }
}

#[test]
fn potential_excess_equals_gap_and_bounds_residual() {
    for d in 2..=6 {
        let start = Fiducial::new(unit_vector(d, 40 + d as u64)).unwrap();
        let config = SearchConfig {
            max_iterations: 50,
            ..SearchConfig::new(dim(d), 0)
        };
        let local = local_minimize(&start, &config);
        let excess = frame_potential(&local.fiducial) - frame_potential_minimum(dim(d));
        assert!((excess - local.frame_potential_gap).abs() <= 1e-10 * (1.0 + excess.abs()));
        let dd = (d * d) as f64;
        assert!(local.frame_potential_gap <= dd * (dd - 1.0) * local.residual.powi(2) + 1e-14);
        assert!(local.frame_potential_gap >= dd * local.residual.powi(2) - 1e-14);
    }
}

#[test]
fn accepted_potentials_never_increase() {
    let start = Fiducial::new(unit_vector(4, 3)).unwrap();
    let local = local_minimize(&start, &SearchConfig::new(dim(4), 0));
    assert!(local.accepted.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn global_phase_does_not_change_the_orbit() {
    for d in 2..=5 {
        let psi = unit_vector(d, 9);
        let phase = C64::from_polar(1.0, 0.7 + d as f64);
        let rotated: Vec<C64> = psi.iter().map(|z| z * phase).collect();
        let a = orbit(&Fiducial::new(psi).unwrap());
        let b = orbit(&Fiducial::new(rotated).unwrap());
        for (p, q) in a.projectors().iter().zip(b.projectors()) {
            assert!(p.max_abs_diff(q) <= 1e-12);
        }
        assert_abs_diff_eq!(a.residual(), b.residual(), epsilon = 1e-12);
    }
}

#[test]
fn reverification_is_idempotent() {
    for d in 2..=6 {
        let s = sic(d);
        let first = verify_sic(s.projectors(), s.dim()).unwrap();
        let second = verify_sic(s.projectors(), s.dim()).unwrap();
        assert_eq!(first, second);
        let reread = sic_from_doc(&parse_document(&to_json_pretty(&sic_doc(s))).unwrap()).unwrap();
        assert_eq!(reread.report(), s.report());
    }
}

#[test]
fn search_ignores_thread_count() {
    let config = SearchConfig::new(dim(4), 11);
    let reference = search_with_jobs(&config, 1).unwrap();
    for jobs in [2, 3, 8] {
        assert_eq!(search_with_jobs(&config, jobs).unwrap(), reference);
    }
}
