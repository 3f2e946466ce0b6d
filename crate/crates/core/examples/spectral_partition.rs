// Fiedler-vector bipartition of a planted two-cluster graph.

use mic_utility::estimator::{disambiguate_sign, fiedler_vector, ncut_score, SimilarityGraph};
use nalgebra::DMatrix;

pub fn run() -> mic_utility::Result<()> {
    let n = 6;
    let w = DMatrix::from_fn(n, n, |p, q| {
        if p == q {
            1.0
        } else if (p < 3) == (q < 3) {
            0.8
        } else {
            0.05
        }
    });
    let graph = SimilarityGraph::from_adjacency(w.clone());
    let fiedler = fiedler_vector(&graph)?;
    let side: Vec<f64> = (0..n).map(|p| if p < 3 { 1.0 } else { -1.0 }).collect();
    let oriented = disambiguate_sign(&fiedler.vector, &side);
    let subset: Vec<bool> = oriented.u.iter().map(|&v| v > 0.0).collect();

    println!("eigenvalue {:.5}", fiedler.eigenvalue);
    println!(
        "utility    {:?}",
        oriented
            .u
            .iter()
            .map(|v| format!("{v:.3}"))
            .collect::<Vec<_>>()
    );
    println!("ncut of sign partition {:.5}", ncut_score(&w, &subset));
    Ok(())
}

#[allow(dead_code)]
fn main() -> mic_utility::Result<()> {
    run()
}
