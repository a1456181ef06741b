#![allow(dead_code)]

use std::sync::OnceLock;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use sicprob::linalg::C64;
use sicprob::quantum::HilbertDim;
use sicprob::search::{search_with_jobs, SearchConfig, SearchStatus};
use sicprob::sic::{builtin_sic, orbit, SicStructure};

pub fn dim(d: usize) -> HilbertDim {
    HilbertDim::new(d).unwrap()
}

/// A certified SIC for 2 ≤ d ≤ 8, built once per process.
pub fn sic(d: usize) -> &'static SicStructure {
    static CACHE: [OnceLock<SicStructure>; 9] = [const { OnceLock::new() }; 9];
    CACHE[d].get_or_init(|| {
        if let Ok(s) = builtin_sic(dim(d)) {
            return s;
        }
        let result = search_with_jobs(&SearchConfig::new(dim(d), 0), 1).unwrap();
        assert_eq!(
            result.status,
            SearchStatus::Found,
            "seed-0 search failed in d={d}"
        );
        orbit(result.fiducial.as_ref().unwrap())
    })
}

pub fn gaussian_vector(d: usize, seed: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..d)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            C64::new(re, im)
        })
        .collect()
}

pub fn unit_vector(d: usize, seed: u64) -> Vec<C64> {
    let v = gaussian_vector(d, seed);
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}
