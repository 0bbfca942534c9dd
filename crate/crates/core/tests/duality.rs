use seedbank::diffusion::{estimate_mixed_moments, Boundary, DiffusionState, Monomial};
use seedbank::dual::dual_moments;
use seedbank::params::ScaledParams;

#[test]
fn diffusion_moments_match_dual_for_small_degrees() {
    let dt = 1e-3;
    let times = [0.25, 1.0, 2.0];
    let monomials: Vec<Monomial> = (0..=3u32)
        .flat_map(|n| (0..=3u32).map(move |m| Monomial { n, m }))
        .filter(|mono| mono.n + mono.m > 0)
        .collect();
    for (seed, &(c, k, x, y)) in [(1.0, 2.0, 0.3, 0.6), (0.5, 1.0, 0.8, 0.2)].iter().enumerate() {
        let p = ScaledParams::new(c, k).unwrap();
        let start = DiffusionState::new(x, y).unwrap();
        let est = estimate_mixed_moments(&p, start, &monomials, &times, dt, Boundary::Clamp, 20_000, 31 + seed as u64).unwrap();
        for (j, mono) in monomials.iter().enumerate() {
            let exact = dual_moments(&p, mono.n as u64, mono.m as u64, x, y, &times).unwrap();
            for (i, t) in times.iter().enumerate() {
                let s = &est[i][j];
                let tol = 3.0 * s.standard_error + 5.0 * dt;
                assert!(
                    (s.mean - exact[i]).abs() <= tol,
                    "{mono} at t = {t}, c = {c}, K = {k}: {} vs {}",
                    s.mean,
                    exact[i]
                );
            }
        }
    }
}
