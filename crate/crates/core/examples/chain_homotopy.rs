//! The operator Θ = ∫ i dt and the identity Φ1* − Φ0* = dΘ + Θd.

use std::sync::Arc;

use algebroid_kit::exterior::AlgebroidForm;
use algebroid_kit::poly::parse_poly;
use algebroid_kit::tangentcase::{homotopy_from_map, tangent_algebroid};

fn main() -> algebroid_kit::Result<()> {
    let m = Arc::new(tangent_algebroid(2));
    let r = m.ring();
    let phi = vec![parse_poly("(1 - t)*x1 + t*x2", r)?, parse_poly("x2 + t^2*x1", r)?];
    let h = homotopy_from_map(m.clone(), m.clone(), phi)?;
    let w = AlgebroidForm::monomial(parse_poly("x1*x2", r)?, 2, &[0, 1]);
    println!("w = {w}");
    println!("Theta w = {}", h.chain_homotopy_operator(&w)?);
    print!("{}", h.verify_chain_homotopy(&w));
    Ok(())
}
