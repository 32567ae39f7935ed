//! A weighted lasso path on a small regression problem: where each
//! coefficient enters and how the fit improves as lambda falls.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use srlpac::prelude::*;

fn main() -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (r, q) = (200, 8);
    let x = DMatrix::from_fn(r, q, |_, _| rng.sample::<f64, _>(StandardNormal));
    let truth = [1.5, 0.0, -1.0, 0.0, 0.0, 0.5, 0.0, 0.0];
    let y = DVector::from_fn(r, |i, _| {
        let signal: f64 = (0..q).map(|j| truth[j] * x[(i, j)]).sum();
        signal + rng.sample::<f64, _>(StandardNormal)
    });
    // column 0 is left unpenalized, the last two are penalized heavily
    let w = [0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 4.0, 4.0];

    let problem = LassoProblem::with_default_grid(&x, &y, &w)?;
    let path = fit_path(&problem)?;

    println!("{:>10} {:>3} {:>10}  coefficients", "lambda", "df", "rss");
    for l in (0..path.len()).step_by(10) {
        let coefs: Vec<String> = path.betas[l].iter().map(|b| format!("{b:+.3}")).collect();
        println!(
            "{:>10.5} {:>3} {:>10.3}  {}",
            path.lambdas[l],
            path.df[l],
            path.rss[l],
            coefs.join(" ")
        );
    }
    for j in 1..q {
        match path.betas.iter().position(|b| b[j] != 0.0) {
            Some(l) => println!("x{j} enters at lambda {:.5}", path.lambdas[l]),
            None => println!("x{j} never enters"),
        }
    }
    Ok(())
}
