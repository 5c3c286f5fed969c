//! Exhaustive census of small operation tables: n-racks, n-shelves, and
//! tables whose induced map is an n-solution.

use braidforge::setsol::{enumerate_tables, TableFilter};

fn main() -> braidforge::Result<()> {
    for (m, n) in [(2, 2), (3, 2), (2, 3), (4, 2)] {
        let racks = enumerate_tables(m, n, TableFilter::Nrack, false)?;
        let sols = enumerate_tables(m, n, TableFilter::Nsolution, false)?;
        let shelves = enumerate_tables(m, n, TableFilter::Nshelf, false)?;
        println!("m={m} n={n}: {} n-racks, {} n-solutions, {} n-shelves", racks.count, sols.count, shelves.count);
    }
    let dump = enumerate_tables(2, 2, TableFilter::Nrack, true)?;
    println!("binary racks on two elements: {:?}", dump.tables.unwrap_or_default());
    Ok(())
}
