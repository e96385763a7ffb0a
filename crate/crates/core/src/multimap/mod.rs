//! Multivalued mappings, the distance function `d_F`, step selection and
//! map-wide checks.

mod checks;
mod map;
mod selection;

pub use checks::{
    check_ab_contraction, check_ab_mapping, check_hausdorff_contraction, embed_hausdorff,
    lower_semicontinuity_gap, perturb_at, MapCheckKind, MapCheckReport, EMBED_CAP,
    EMBED_DENOMINATOR_FLOOR,
};
pub use map::{d_f, Branch, Domain, ImageExpr, MapJson, MapSpec, MultivaluedMap};
pub use selection::{candidates, select_step, SelectionRecord};
