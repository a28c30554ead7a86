use alloc::vec::Vec;

/// The optimal score of a problem instance and every solution attaining it.
///
/// Scores are always "higher is better"; for the TSP the score is the negated
/// tour length.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimumRecord<S> {
    pub best_score: f64,
    pub optima: Vec<S>,
}
