//! Run registered experiments: a single point, a ladder with its fitted
//! constant, and the JSON report.
//!
//!     cargo run --release --example verify_lemmas

use pri_lab::verify::{self, ExperimentName};

fn main() -> pri_lab::error::Result<()> {
    for e in ExperimentName::ALL {
        println!("{:<18} {:<16} O({})", e.as_str(), e.alias(), e.bound_expr());
    }

    let name = ExperimentName::TdisInfo;
    for sweep in verify::run_sweeps(name, &name.default_config(), 0)? {
        println!(
            "\n{name}: C = {:?}, stable = {}, pass = {}",
            sweep.fitted_c,
            sweep.stable(),
            sweep.passed()
        );
        for r in &sweep.points {
            println!(
                "  m = {}: TD = {:.5} <= {:.5}",
                r.config.m, r.measured, r.bound_value
            );
        }
    }

    let cfg = ExperimentName::OuterCompQuery.default_config();
    let report = verify::run_outer_zero(&cfg, 0)?.without_timing();
    println!("\n{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}
