use polclass_core::diffusion::{diffusion_step, EvolutionParams};
use polclass_core::{CovarianceField, Grid, HermitianMatrix3};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Scalar five-point update with clamped indices, written against plain
/// nested vectors.
fn scalar_stencil(u: &[Vec<f64>], r: f64) -> Vec<Vec<f64>> {
    let h = u.len() as isize;
    let w = u[0].len() as isize;
    let at = |y: isize, x: isize| u[y.clamp(0, h - 1) as usize][x.clamp(0, w - 1) as usize];
    (0..h)
        .map(|y| {
            (0..w)
                .map(|x| {
                    let lap = at(y, x + 1) + at(y, x - 1) + at(y + 1, x) + at(y - 1, x) - 4.0 * at(y, x);
                    at(y, x) + r * lap
                })
                .collect()
        })
        .collect()
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

fn random_field(seed: u64, w: usize, h: usize) -> CovarianceField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Grid::from_fn(w, h, |_, _| {
        let mut v = [0.0; 9];
        for x in v.iter_mut().take(3) {
            *x = 2.0 + uniform(&mut rng);
        }
        for x in v.iter_mut().skip(3) {
            *x = uniform(&mut rng) - 0.5;
        }
        HermitianMatrix3::from_array9(v)
    })
}

#[test]
fn diffusion_matches_entrywise_scalar_stencil() {
    let params = EvolutionParams { alpha: 0.5, dt: 0.37, ..Default::default() };
    let r = params.alpha * params.dt;
    for seed in 0..10 {
        let field = random_field(seed, 64, 64);
        let out = diffusion_step(&field, &params).unwrap();
        for k in 0..9 {
            let plane: Vec<Vec<f64>> = field.rows().map(|row| row.iter().map(|z| z.to_array9()[k]).collect()).collect();
            let expected = scalar_stencil(&plane, r);
            for (y, row) in expected.iter().enumerate() {
                for (x, e) in row.iter().enumerate() {
                    let got = out.get(x, y).to_array9()[k];
                    assert!((got - e).abs() < 1e-12, "seed {seed} entry {k} at ({x}, {y})");
                }
            }
        }
    }
}
