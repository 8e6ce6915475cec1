// Per-domain factors of a separable model and the global factors they
// compose into.

use kronrisk::factors::{
    all_composed_eigenpairs, decompose, factor_scores, reconstruct_sample, variance_table, Domain,
};
use kronrisk::synthetic::{desk_model, sample_kronecker_gaussian, GeneratorConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let model = desk_model(15, 8)?;
    let d = decompose(&model)?;

    println!(
        "{}",
        variance_table(&d, Domain::Maturity)?.leading(3).render()
    );
    println!("{}", variance_table(&d, Domain::Country)?.render());

    let maturities = model.labels_for(0);
    let level = d.domain_eigenvectors(Domain::Maturity).column(0);
    let slope = d.domain_eigenvectors(Domain::Maturity).column(1);
    println!("maturity  level   slope");
    for (j, m) in maturities.iter().enumerate() {
        println!("{m:>8}  {:+.3}  {:+.3}", level[j], slope[j]);
    }

    let total: f64 = model.sigma2();
    println!("\nleading global factors (share of total variance):");
    for f in all_composed_eigenpairs(&d)?.iter().take(5) {
        println!(
            "  u{}^(c) x u{}^(m): {:.2}%",
            f.country_index + 1,
            f.maturity_index + 1,
            100.0 * f.eigenvalue / total
        );
    }

    // Scores are the sample expressed in the factor basis.
    let x = &sample_kronecker_gaussian(&GeneratorConfig {
        model: model.clone(),
        sample_count: 1,
        seed: 1,
    })?[0];
    let scores = factor_scores(x, &d)?;
    let back = reconstruct_sample(&scores, &d)?;
    println!(
        "\nscore round trip error {:.1e}",
        x.sub(&back)?.frobenius_norm()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
