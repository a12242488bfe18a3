//! Preference probabilities for the four-arm example: current arm a0 with
//! similarities 0.4, 0.55 and 0.6 to a1, a2 and a3.
//!
//! ```bash
//! cargo run --example worked_example
//! ```

use manyarm::preference::{PreferenceSpace, SimilarityRow};

fn main() -> manyarm::Result<()> {
    let row = SimilarityRow::new(0, vec![1, 2, 3], vec![0.4, 0.55, 0.6]);

    for eps in [0.5, 0.6] {
        let space = PreferenceSpace::new(row.clone(), eps)?;
        let p = &space.partition;
        println!("eps = {eps}");
        println!("  pi = {:.3}  pi_bar = {:.3}", p.mass_above, p.mass_below);
        for (j, k) in [(0, 1), (0, 2), (1, 2)] {
            println!(
                "  p(a{}, a{}) = {:.3}",
                space.arm(j),
                space.arm(k),
                space.joint(j, k)?
            );
        }
        let marginals = space.marginals();
        for (j, m) in marginals.iter().enumerate() {
            println!("  P(a{}) = {m:.3}", space.arm(j));
        }
        println!("  sum of marginals = {:.12}", marginals.iter().sum::<f64>());
        println!("  ln g({{a1,a2,a3}}) = {:.4}", space.log_set_probability(&[0, 1, 2])?);
    }
    Ok(())
}
