// Long one asset, short the rest so the book is self-financed and blind to
// the leading factors of its domain.

use kronrisk::covariance::KroneckerCovarianceModel;
use kronrisk::factors::{decompose, Domain};
use kronrisk::portfolio::{hedge, HedgeOptions, HedgeSpec};
use kronrisk::synthetic::desk_model;
use nalgebra::DMatrix;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let model = desk_model(15, 8)?;
    let d = decompose(&model)?;
    let labels = model.labels_for(0);

    // Long the 10-year, hedged against level, slope and curvature.
    let spec = HedgeSpec {
        decomposition: &d,
        domain: Domain::Maturity,
        target: 9,
        factors_hedged: 3,
    };
    let res = hedge(&spec, &HedgeOptions::default())?;
    println!("long {}y, hedge level/slope/curvature:", labels[9]);
    for (m, w) in labels.iter().zip(res.weights.iter()) {
        println!("  {m:>4}: {w:+.4}");
    }
    println!(
        "residual {:.1e}, exposures {:?}",
        res.residual, res.exposures
    );

    // Country domain: long the last economy against the common factor.
    let spec = HedgeSpec {
        decomposition: &d,
        domain: Domain::Country,
        target: 7,
        factors_hedged: 1,
    };
    let res = hedge(&spec, &HedgeOptions::default())?;
    println!("\ncountry hedge weights {:?}", res.weights.as_slice());

    // With nothing hedged the answer is long one, equally short the others.
    let small = decompose(&desk_model(3, 2)?)?;
    let spec = HedgeSpec {
        decomposition: &small,
        domain: Domain::Maturity,
        target: 2,
        factors_hedged: 0,
    };
    println!(
        "\nthree maturities, r = 0: {:?}",
        hedge(&spec, &HedgeOptions::default())?.weights.as_slice()
    );

    // A factor that is exactly the target asset cannot be hedged away.
    let diag = KroneckerCovarianceModel::new(
        1.0,
        vec![
            DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.6, 0.3, 0.1])),
            DMatrix::identity(2, 2) * 0.5,
        ],
    )?;
    let dd = decompose(&diag)?;
    let spec = HedgeSpec {
        decomposition: &dd,
        domain: Domain::Maturity,
        target: 0,
        factors_hedged: 1,
    };
    let res = hedge(&spec, &HedgeOptions::default())?;
    println!(
        "inconsistent system: consistent = {}, residual {:.3}",
        res.consistent, res.residual
    );
    let strict = HedgeOptions {
        strict: true,
        ..HedgeOptions::default()
    };
    if let Err(e) = hedge(&spec, &strict) {
        println!("strict mode: {e}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
