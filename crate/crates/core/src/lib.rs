//! Polyadic description logics over finite structures: relation-algebra
//! evaluation, model checking, reification to ALCQI, tableau
//! satisfiability, unraveling, algebra bridges and comparison games.

pub mod bridge;
pub mod cli;
pub mod corpus;
pub mod game;
pub mod gra;
pub mod model;
pub mod reify;
pub mod semantics;
pub mod syntax;
pub mod tableau;
pub mod unravel;

use thiserror::Error;

/// Any error the library reports, for callers that do not care which
/// stage failed.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Syntax(#[from] syntax::SyntaxError),
    #[error(transparent)]
    Model(#[from] model::ModelError),
    #[error(transparent)]
    Gra(#[from] gra::GraError),
    #[error(transparent)]
    Semantics(#[from] semantics::SemanticsError),
    #[error(transparent)]
    Reify(#[from] reify::ReifyError),
    #[error(transparent)]
    Unravel(#[from] unravel::UnravelError),
    #[error(transparent)]
    Tableau(#[from] tableau::TableauError),
    #[error(transparent)]
    Bridge(#[from] bridge::BridgeError),
    #[error(transparent)]
    Game(#[from] game::GameError),
    #[error("{0}")]
    Usage(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Whether the failure is a budget or cap rather than bad input.
    pub fn is_budget(&self) -> bool {
        use semantics::SemanticsError as S;
        matches!(
            self,
            Error::Gra(gra::GraError::Budget { .. })
                | Error::Semantics(S::Budget(_) | S::Grounding(_))
                | Error::Unravel(unravel::UnravelError::TooLarge)
                | Error::Tableau(
                    tableau::TableauError::KCap { .. }
                        | tableau::TableauError::Steps(_)
                        | tableau::TableauError::Semantics(S::Budget(_) | S::Grounding(_))
                )
                | Error::Game(game::GameError::Steps(_) | game::GameError::Budget(_))
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
