//! The algebroid differential on so(3) and on a tangent bundle, and the
//! two equivalent validity checks.

use algebroid_kit::algebroid::LieAlgebroid;
use algebroid_kit::exterior::AlgebroidForm;
use algebroid_kit::groupcase::MatrixLieAlgebra;
use algebroid_kit::poly::{parse_poly, rational};
use algebroid_kit::tangentcase::tangent_algebroid;

fn main() -> algebroid_kit::Result<()> {
    let so3 = MatrixLieAlgebra::so3().to_algebroid();
    for c in 0..3 {
        println!("d e^{} = {}", c + 1, so3.covector_differential(c));
    }
    print!("{}", so3.validate_dga());

    let r2 = tangent_algebroid(2);
    let f = parse_poly("x1^2*x2 - 3*x2", r2.ring())?;
    println!("d f = {}", r2.function_differential(&f));
    let w = AlgebroidForm::monomial(parse_poly("x1*x2", r2.ring())?, 2, &[0]);
    println!("d (x1*x2 e^1) = {}", r2.differential(&w)?);

    // a bracket that breaks Jacobi: both checks reject it
    let zero = rational(0, 1);
    let one = rational(1, 1);
    let broken = LieAlgebroid::lie_algebra(
        3,
        &[(0, 1, vec![zero.clone(), zero.clone(), one.clone()]), (1, 2, vec![zero.clone(), one, zero])],
    )?;
    print!("{}", broken.validate_dga());
    print!("{}", broken.bracket_axioms_oracle());
    Ok(())
}
