//! Connection probability against obstacle density for windows 0, 20 and
//! 100 m. Runs the shipped sweep configs and writes the CSVs and one chart to
//! the directory given as the first argument (default: target/window-sweep).

use std::fs::File;
use std::path::PathBuf;

use mmwave_connectivity::experiment::{run_experiment, write_csv, ExperimentConfig};
use mmwave_connectivity::plot::emit_svg_plot;

fn main() {
    let out_dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("target/window-sweep"));
    std::fs::create_dir_all(&out_dir).unwrap();
    let configs = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs");

    let mut csvs = Vec::new();
    for kappa in [0, 20, 100] {
        let name = format!("lambda_sweep_kappa{kappa}");
        let text = std::fs::read_to_string(configs.join(format!("{name}.json"))).unwrap();
        let config = ExperimentConfig::from_json_str(&text).unwrap();
        let rows = run_experiment(&config).unwrap();
        let csv = out_dir.join(format!("{name}.csv"));
        write_csv(&rows, File::create(&csv).unwrap()).unwrap();
        for r in &rows {
            println!(
                "kappa {kappa:>3} lambda {:<8} simulated {:.4}  bound {:.4}  p_los {:.4}",
                r.sweep_value, r.estimate.mean, r.bounds.unconditional.value, r.bounds.p_los.value
            );
        }
        csvs.push(csv);
    }

    let svg = out_dir.join("lambda_sweep.svg");
    emit_svg_plot(&csvs, "sweep_value", &["mc_mean".to_string()], &svg).unwrap();
    println!("wrote {}", svg.display());
}
