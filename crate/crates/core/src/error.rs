use alloc::string::String;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("malformed model: {0}")]
    Model(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("invalid instance: {0}")]
    Instance(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("enumeration ceiling exceeded: {size} > {ceiling}")]
    CeilingExceeded { size: u128, ceiling: u128 },
}

impl Error {
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded(_))
    }
}

pub type Result<T> = core::result::Result<T, Error>;
