//! Discrete-time Wright-Fisher model with a geometric seed-bank.
//!
//! Each generation `N - c` plants are drawn with replacement from the old
//! plants, `c` seeds germinate (drawn without replacement) and fill the
//! remaining plant slots, `c` new seeds produced by uniformly chosen plants
//! take the vacated seed slots, and the other `M - c` seeds persist.

mod ancestry;
mod frequency;
mod generator;
mod population;

pub use ancestry::{
    exact_one_step_probabilities, extract_ancestral_process, tally_transitions, EventTally,
    SampleGenealogyState,
};
pub use frequency::{
    count_alleles, enumerate_transitions, step_frequency, transition_pmf, FrequencyState,
    TransitionLaw, ENUMERATION_LIMIT,
};
pub use generator::{discrete_generator_apply, GeneratorEstimate, GeneratorMode};
pub use population::{
    apply_ancestry, check_ancestry, sample_ancestry, step_population, Allele, GenerationAncestry,
    PlantSource, PopulationConfig, SeedSource,
};
