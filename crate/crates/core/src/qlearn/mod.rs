//! Tabular Q-learning: the value table, ε-greedy selection, and the
//! per-interaction tutor step that couples the level and word models.

mod params;
mod policy;
mod session;
mod table;

pub use params::{LearningParams, ParamsError, TutorParams, WordSelection};
pub use policy::select_action;
pub use session::{
    next_item, record_outcome, InteractionRecord, Presentation, SessionError, SessionState, WordModel,
};
pub use table::{td_update, QError, QTable, StateSpace};
