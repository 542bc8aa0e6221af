//! Prints average-entanglement curves for the ladder and rectangle families.
//!
//!   cargo run --release -p rvb-core --example curves

use rvb_core::{sweep, Boundary, Lattice, SweepOptions};

fn main() {
    let families: [&[(usize, usize)]; 2] = [
        &[(3, 2), (4, 2), (5, 2), (6, 2), (7, 2), (8, 2), (9, 2), (10, 2)],
        &[(4, 3), (4, 4), (5, 4), (6, 4)],
    ];
    for family in families {
        for &(r, c) in family {
            let lat = Lattice::new(r, c, Boundary::Open).expect("valid lattice");
            let t = std::time::Instant::now();
            let curve = sweep(&lat, lat.num_sites(), &SweepOptions::default()).expect("sweep");
            let peak = curve.peak().expect("hole-free point exists");
            print!("{r}x{c} peak={} ({:.2?}):", peak.num_holes, t.elapsed());
            for p in &curve.points {
                print!(" {}:{:.4}[-{}]", p.num_holes, p.avg_entanglement, p.excluded_count);
            }
            println!();
        }
    }
}
