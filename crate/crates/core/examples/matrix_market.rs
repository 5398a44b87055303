//! Writing, validating and reloading Matrix Market files.

use logdet::matrix::market::read_matrix_market;
use logdet::{cmd_validate, generators, load_matrix_market, save_matrix_market, LogDetError};

fn main() -> Result<(), LogDetError> {
    let dir = std::env::temp_dir().join("logdet-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("sparse.mtx");

    let a = generators::rand_spd_sparse(1000, 8000, 4)?;
    save_matrix_market(&a, &path)?;
    println!("{}\n", cmd_validate(&path)?);

    let data = read_matrix_market(&path)?;
    println!(
        "header {:?}, {} stored entries",
        data.header,
        data.entries.len()
    );
    let b = load_matrix_market(&path)?;
    assert_eq!(a.to_dense(), b.to_dense());

    let broken = dir.join("broken.mtx");
    std::fs::write(
        &broken,
        "%%MatrixMarket matrix coordinate real symmetric\n3 3 2\n1 1 2.0\n4 1 1.0\n",
    )?;
    if let Err(e) = cmd_validate(&broken) {
        println!("rejected: {e}");
    }
    Ok(())
}
