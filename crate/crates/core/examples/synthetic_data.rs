// Seeded Kronecker-Gaussian samples: the same seed gives the same draws,
// and the sample covariance approaches the model as T grows.

use kronrisk::covariance::full_covariance;
use kronrisk::synthetic::{
    brute_force_covariance, random_model, sample_kronecker_gaussian, GaussianStream,
    GeneratorConfig, STREAM_ALGORITHM,
};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut stream = GaussianStream::new(42);
    let first: Vec<String> = (0..4)
        .map(|_| format!("{:+.6}", stream.next_standard_normal()))
        .collect();
    println!("{STREAM_ALGORITHM}, seed 42: {}", first.join(" "));

    let model = random_model(&[4, 3], 5)?;
    let sigma = full_covariance(&model);
    for t in [100, 1_000, 10_000] {
        let cfg = GeneratorConfig {
            model: model.clone(),
            sample_count: t,
            seed: 9,
        };
        let samples = sample_kronecker_gaussian(&cfg)?;
        let c = brute_force_covariance(&samples, false)?;
        println!(
            "T = {t:>6}: relative covariance error {:.4}",
            (&c - &sigma).norm() / sigma.norm()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
