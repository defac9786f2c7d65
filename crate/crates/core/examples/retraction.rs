//! Deformation retraction of ℝ^3 onto the x1 axis and the rank condition.

use std::sync::Arc;

use algebroid_kit::tangentcase::{
    check_retraction, check_transversality, homotopy_from_map, tangent_algebroid, SubalgebroidPresentation,
};
use algebroid_kit::poly::parse_poly;

fn main() -> algebroid_kit::Result<()> {
    let m = Arc::new(tangent_algebroid(3));
    let r = m.ring();
    let phi = vec![parse_poly("x1", r)?, parse_poly("(1 - t)*x2", r)?, parse_poly("(1 - t)*x3", r)?];
    let h = homotopy_from_map(m.clone(), m.clone(), phi)?;
    // R = {x2 = x3 = 0}, A_R spanned by e1
    let axis = SubalgebroidPresentation::new(m.clone(), &[1, 2], &[0])?;
    print!("{}", check_retraction(&h, &axis));

    let check = axis.factor(&h.end_map())?;
    let samples = vec![vec![1.0, 2.0, 3.0], vec![-0.5, 0.0, 4.0]];
    print!("{}", check_transversality(check.base_map(), axis.subalgebroid(), &samples));

    // keeping e2 instead of e1 is not a subalgebroid over the axis
    let wrong = SubalgebroidPresentation::new(m, &[1, 2], &[1])?;
    print!("{}", check_retraction(&h, &wrong));
    Ok(())
}
