//! Cones, fans and the fan constructions used by the vanishing checks.

mod cone;
mod construct;
mod fan;
pub mod io;

pub use cone::Cone;
#[allow(unused_imports)]
pub(crate) use cone::fmt_rays;
pub use construct::{
    complete_from_convex, fans_equal_under, gamma_pi, graph_fans, hirzebruch_fan, product_fan, projective_space_fan,
    quotient_fan, star_removal, star_subdivision, transform_fan, Completion, GraphFans, QuotientFan,
};
pub use fan::{Fan, FacetIncidence};
