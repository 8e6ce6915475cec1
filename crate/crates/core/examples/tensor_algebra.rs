// Unfolding, folding, mode products and the Kronecker form of a
// multi-mode product on a small order-3 tensor.

use kronrisk::tensor::{fold, kronecker_reversed, mode_n_product, multi_mode_product, DenseTensor};
use nalgebra::DMatrix;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let x = DenseTensor::from_fn(vec![2, 3, 2], |i| (i[0] + 10 * i[1] + 100 * i[2]) as f64)?;
    println!("tensor dims {:?}, norm {:.3}", x.dims(), x.frobenius_norm());

    for mode in 0..x.order() {
        let u = x.unfold(mode)?;
        println!("mode-{mode} unfolding:{}", u.matrix);
        assert_eq!(fold(&u.matrix, mode, x.dims())?, x);
    }

    let a = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, -1.0]);
    let b = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 1.0]);
    let c = DMatrix::identity(2, 2);
    let y = multi_mode_product(&x, &[a.clone(), b.clone(), c.clone()])?;
    println!("X x0 A x1 B x2 I has dims {:?}: {:?}", y.dims(), y.data());

    // The same product one mode at a time.
    let step = mode_n_product(&mode_n_product(&mode_n_product(&x, &a, 0)?, &b, 1)?, &c, 2)?;
    assert_eq!(step.data(), y.data());

    // And as a matrix-vector product with (C ⊗ B ⊗ A).
    let k = kronecker_reversed(&[a, b, c])?;
    let v = k * x.vectorize();
    println!("Kronecker form agrees: {}", v.as_slice() == y.data());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
