use rand::Rng;

use super::table::{QError, QTable, StateSpace};

/// ε-greedy action choice where `epsilon` is the probability of exploiting.
///
/// One uniform draw decides between exploiting and exploring. Exploiting
/// takes the argmax over `valid_actions`; ties among maximizers cost one
/// more draw. Exploring takes a uniform draw over `valid_actions`.
pub fn select_action<S: StateSpace, R: Rng + ?Sized>(
    table: &QTable<S>,
    state: S,
    valid_actions: &[S::Action],
    epsilon: f64,
    rng: &mut R,
) -> Result<S::Action, QError> {
    if valid_actions.is_empty() {
        return Err(QError::NoActions { model: table.model().to_string() });
    }
    let u: f64 = rng.gen();
    if u >= epsilon {
        return Ok(valid_actions[rng.gen_range(0..valid_actions.len())]);
    }
    let best = table.greedy_actions(state, valid_actions)?;
    if best.len() == 1 {
        Ok(best[0])
    } else {
        Ok(best[rng.gen_range(0..best.len())])
    }
}
