// Country-by-country PCA against the global maturity factors. Under a
// separable model every domestic curve has the same principal axes.

use kronrisk::covariance::estimate;
use kronrisk::factors::{decompose, domestic_pca, domestic_table, variance_table, Domain};
use kronrisk::synthetic::{
    default_countries, desk_model, sample_kronecker_gaussian, GeneratorConfig,
};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let truth = desk_model(15, 8)?;
    let samples = sample_kronecker_gaussian(&GeneratorConfig {
        model: truth,
        sample_count: 5_000,
        seed: 11,
    })?;
    let countries = default_countries(8);

    println!("{}", domestic_table(&samples, &countries)?.render());

    let global = decompose(&estimate(&samples, true)?)?;
    println!(
        "{}",
        variance_table(&global, Domain::Maturity)?
            .leading(3)
            .render()
    );

    let um = global.domain_eigenvectors(Domain::Maturity);
    println!("|cos| between domestic and global factors:");
    for (j, name) in countries.iter().enumerate() {
        let pca = domestic_pca(&samples, j)?;
        let cos: Vec<String> = (0..3)
            .map(|k| format!("{:.4}", pca.eigenvectors.column(k).dot(&um.column(k)).abs()))
            .collect();
        println!("  {name}: {}", cos.join("  "));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
