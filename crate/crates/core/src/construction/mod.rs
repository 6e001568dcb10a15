//! The c.e.-set construction: a presentation `F` of `l^p` relative to which
//! computing `e_0`, or any surjective isometry from the standard presentation,
//! is exactly as hard as deciding `C`.

mod ceset;
mod e0;
mod extract;
mod twisted;

pub use ceset::{gamma_approx, AccessMode, CeKind, CeSession, CeSet, SessionCounts};
pub use e0::{approx_e0, e0_rep, inverse_scale, E0Approx};
pub use extract::{
    decide_membership, descriptor_family_over_f, descriptor_map_over_f, extract_scale, extract_scale_traced,
    gamma_from_scale, gamma_positive, recover_bits, scale_real, BitReport, ExtractTrace,
};
pub use twisted::{
    epsilon_j, expansion_residual, twist_weight, twisted_genset, twisted_norm, twisted_norm_enclosure,
    DisciplineCounts, DisciplineLog, TwistedGenSet,
};
