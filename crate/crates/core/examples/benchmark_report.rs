//! Repeated runs over an m sweep, written as CSV and JSON reports.

use logdet::bench::{InputSource, RunConfig};
use logdet::report::write_report;
use logdet::{run_benchmark, EstimatorConfig, Family, GeneratorSpec, OutputFormat};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let input = InputSource::Generated(GeneratorSpec {
        family: Family::DenseDd,
        n: 500,
        nnz_target: None,
        seed: 1,
    });
    let mut config = RunConfig::new(input, EstimatorConfig::new(4, 0.5).with_probes(60));
    config.sweep = Some(vec![1, 2, 3, 4, 8]);
    config.repeats = 10;

    let outcome = run_benchmark(&config)?;
    let mut stdout = std::io::stdout();
    write_report(&outcome.records, OutputFormat::Csv, &mut stdout)?;
    println!();
    write_report(&outcome.records[..1], OutputFormat::Json, &mut stdout)?;
    Ok(())
}
