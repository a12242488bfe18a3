//! Candidate-set size schedules.
//!
//! ```bash
//! cargo run --example k_schedules
//! cargo run --example k_schedules -- "anytime:beta=2,exponent=half,kmax=400"
//! ```

use manyarm::selection::KSchedule;

fn main() -> manyarm::Result<()> {
    let mut schedules: Vec<KSchedule> = vec![
        "exact:alpha=2,kmax=250".parse()?,
        "scaled:alpha=2,tau=50,kmax=250".parse()?,
        "anytime:beta=1,exponent=ratio,kmax=250".parse()?,
        "fixed:250".parse()?,
    ];
    for arg in std::env::args().skip(1) {
        schedules.push(arg.parse()?);
    }

    let ts = [1u64, 2, 5, 10, 25, 50, 100, 200, 500, 1000, 10_000];
    print!("{:<42}", "t");
    for t in ts {
        print!("{t:>7}");
    }
    println!();
    for s in &schedules {
        print!("{:<42}", s.to_string());
        for t in ts {
            print!("{:>7}", s.k_at(t));
        }
        println!();
    }
    Ok(())
}
