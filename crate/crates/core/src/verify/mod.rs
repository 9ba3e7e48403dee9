//! Step-function models of `(f, g, e)` and numerical checks of the
//! sharpened Hölder inequalities.
//!
//! Functions live on `[0, 1]` with Lebesgue measure, so every average is an
//! exact finite sum. The checkers report the slack of
//!
//! * `Hold3`: `‖f‖^r - |⟨f, N_θ(e)⟩|^r >= c inf_α ‖f - αe‖^r`,
//! * `Hold4`: `‖f‖^r - |⟨N_θ(f), e⟩|^{r/(θ-1)} >= d inf_α ‖f - αe‖^r`,
//!
//! for `e` of unit `L^θ` norm.

mod campaign;
mod holder;
mod oracle;
mod step;

pub use campaign::{run_campaign, seeded_pairs, trial_pair, CampaignConfig, CampaignReport, Inequality, VIOLATION_TOL};
pub use holder::{
    alpha_min, check_hold3, check_hold4, extremal_pair_c, near_extremal_hold3, near_extremal_hold4,
    witness_pair_rlessthan2, witness_pair_rlessthanp, witness_rlessthan2, witness_rlessthanp, AlphaMin, HolderSlack,
    ALPHA_TOL,
};
pub use oracle::{oracle_bellman_c, oracle_bellman_d, OracleResult, FEASIBILITY_TOL, MAX_ATOMS};
pub use step::{moments, MomentVector, StepFunction, WEIGHT_TOL};
