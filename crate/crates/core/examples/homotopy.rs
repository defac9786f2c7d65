//! Natural homotopies: one induced by a smooth homotopy of base maps, and
//! one with a mismatched θ that fails the homotopy condition.

use std::sync::Arc;

use algebroid_kit::bundlemap::SupportedSection;
use algebroid_kit::homotopy::NaturalHomotopy;
use algebroid_kit::poly::parse_poly;
use algebroid_kit::tangentcase::{homotopy_from_map, tangent_algebroid};

fn main() -> algebroid_kit::Result<()> {
    let m = Arc::new(tangent_algebroid(2));
    let r = m.ring();
    let phi = vec![parse_poly("x1 + t*x2^2", r)?, parse_poly("(1 - t)*x2", r)?];
    let h = homotopy_from_map(m.clone(), m.clone(), phi)?;
    print!("{}", h.check_homotopy());

    let piece = h.single()?;
    let bad_theta = vec![parse_poly("x2", r)?, parse_poly("0", r)?];
    let section = SupportedSection::new(piece.map(), bad_theta)?;
    let bad = NaturalHomotopy::new(piece.map().clone(), section)?;
    print!("{}", bad.check_homotopy());
    Ok(())
}
