//! Integrating a path in so(3), Φ1 = Ad_h ∘ Φ0, and the sampled flow.

use algebroid_kit::groupcase::{expm, flow_homotopy, integrate_path, verify_ad, MatrixLieAlgebra};
use algebroid_kit::poly::{parse_poly, Polynomial, Ring};
use nalgebra::DMatrix;

fn main() -> algebroid_kit::Result<()> {
    let g = MatrixLieAlgebra::so3();
    let ring = Ring::new(["t"]);
    let theta = vec![Polynomial::zero(&ring), Polynomial::zero(&ring), Polynomial::one(&ring)];
    for steps in [10, 20, 1000] {
        let h = integrate_path(&g, &theta, steps)?;
        let err = (&h.matrix - expm(&g.basis_f64(2))).amax();
        println!("steps {steps:5}: |h - exp(E3)| = {err:.3e}");
    }
    let h = integrate_path(&g, &theta, 1000)?;
    let phi0 = DMatrix::identity(3, 3);
    let phi1 = g.adjoint(&h.matrix)?;
    print!("{}", verify_ad(&g, &phi0, &phi1, &h, 1e-6)?);

    let wobble = vec![parse_poly("t", &ring)?, parse_poly("1 - t", &ring)?, Polynomial::zero(&ring)];
    let flow = flow_homotopy(&g, &phi0, &wobble, 1000, 10)?;
    print!("{}", flow.check(&g, 1e-4, 1e-6)?);
    Ok(())
}
