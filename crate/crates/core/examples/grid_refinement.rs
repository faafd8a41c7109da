//! Mesh refinement of the three zero-flux Lagrangian routes on a
//! constant-drift ring.

use nonrev::fokker_planck::{exl_check, GridModel};

fn main() -> Result<(), nonrev::error::Error> {
    println!("{:>5} {:>20} {:>11} {:>11} {:>11}", "n", "L(rho,0)", "|i-ii|", "|ii-iii|", "orth");
    for n in [32usize, 64, 128, 256] {
        let m = GridModel::constant(n, 1.0f64, 1.0)?;
        let rho = m.density_from_fn(|x| {
            let t = 2.0 * std::f64::consts::PI * x;
            (0.8 * (t - 1.9).cos() + 0.4 * (2.0 * t).sin()).exp()
        })?;
        let r = exl_check(&m, &rho)?;
        println!(
            "{n:>5} {:>20.14} {:>11.3e} {:>11.3e} {:>11.3e}",
            r.route_i, r.defect_i_ii, r.defect_ii_iii, r.orthogonality_defect
        );
    }
    Ok(())
}
