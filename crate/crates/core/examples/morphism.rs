//! Pullback along a bundle map and the morphism check.

use std::sync::Arc;

use algebroid_kit::bundlemap::BundleMap;
use algebroid_kit::exterior::AlgebroidForm;
use algebroid_kit::poly::parse_poly;
use algebroid_kit::tangentcase::tangent_algebroid;

fn main() -> algebroid_kit::Result<()> {
    let m = Arc::new(tangent_algebroid(2));
    let n = Arc::new(tangent_algebroid(1));
    let r = m.ring();
    // φ(x1, x2) = x1*x2 with its Jacobian on the fibres
    let phi = vec![parse_poly("x1*x2", r)?];
    let jacobian = vec![vec![parse_poly("x2", r)?, parse_poly("x1", r)?]];
    let good = BundleMap::new(m.clone(), n.clone(), phi.clone(), jacobian)?;
    let w = AlgebroidForm::monomial(parse_poly("x1^2", n.ring())?, 1, &[0]);
    println!("pullback of {w} = {}", good.pullback(&w)?);
    print!("{}", good.is_morphism());

    // the same base map with a wrong fibre component
    let wrong = BundleMap::new(m.clone(), n, phi, vec![vec![parse_poly("x2", r)?, parse_poly("0", r)?]])?;
    print!("{}", wrong.is_morphism());
    Ok(())
}
