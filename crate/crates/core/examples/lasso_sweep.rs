// Lambda sweep of the sparse feature-weighting solver on a synthetic problem.

use mic_utility::lasso::{
    lambda_sweep, LassoProblem, SolverSettings, TrialWeighting, SWEEP_LAMBDAS,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn run() -> mic_utility::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let truth = [0.08, 0.0, -0.05, 0.0, 0.0, 0.02, 0.0, 0.0];
    let mut problem = LassoProblem::new(truth.len(), TrialWeighting::Mean);
    let rows = 2000;
    for _ in 0..rows {
        let row: Vec<f64> = (0..truth.len())
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        let noise: f64 = StandardNormal.sample(&mut rng);
        let target = row.iter().zip(&truth).map(|(x, w)| x * w).sum::<f64>() + 0.01 * noise;
        problem.push_row(&row, target, 1.0 / rows as f64)?;
    }
    println!("lambda_max {:.5}", problem.lambda_max());
    for fit in lambda_sweep(&problem, &SWEEP_LAMBDAS, SolverSettings::default())? {
        let w: Vec<String> = fit.w.iter().map(|v| format!("{v:+.3}")).collect();
        println!(
            "lambda {:<7} support {:>2}  w [{}]",
            fit.lambda,
            fit.support().len(),
            w.join(" ")
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> mic_utility::Result<()> {
    run()
}
