//! Midpoint quadrature on the lattice, ball families and the near/far split.

use morrey_lab::lattice::{
    integrate, integrate_detailed, make_ball_family, split_at_ball, Ball, FamilySpec, GridFunction, Lattice, Region,
};

fn main() -> morrey_lab::Result<()> {
    for points in [33, 65, 129, 257] {
        let l = Lattice::new(1, 2.0, points)?;
        let square = GridFunction::from_fn(&l, |x| x[0] * x[0])?;
        // ∫_{-1}^{1} x² = 2/3
        let ball = Ball::centered(1, 1.0)?;
        let q = integrate_detailed(&square, Region::Ball(&ball));
        // strict membership drops the nodes at ±1, so the error is O(h)
        println!(
            "N = {points:3}: ∫ x² over B(0,1) = {:.6} from {} nodes, error {:.2e}, h = {:.2e}",
            q.value,
            q.nodes,
            2.0 / 3.0 - q.value,
            l.spacing()
        );
    }

    let l = Lattice::new(2, 1.0, 81)?;
    let one = GridFunction::constant(&l, 1.0);
    let disc = Ball::centered(2, 0.5)?;
    println!("area of B(0, 1/2) in the plane: {:.5} (π/4 = {:.5})", integrate(&one, Region::Ball(&disc)), disc.volume());

    let l = Lattice::new(1, 2.0, 65)?;
    let family = make_ball_family(&l, &FamilySpec::new(8, l.spacing(), 4))?;
    println!("family: {} balls, {:?}", family.len(), family.provenance());

    let f = GridFunction::from_fn(&l, |x| (-x[0] * x[0]).exp())?;
    let (near, far) = split_at_ball(&f, &Ball::new(vec![0.5], 0.25)?);
    println!(
        "split at B(0.5, 0.25): near mass {:.5} + far mass {:.5} = {:.5}",
        integrate(&near, Region::Domain),
        integrate(&far, Region::Domain),
        integrate(&f, Region::Domain)
    );
    Ok(())
}
