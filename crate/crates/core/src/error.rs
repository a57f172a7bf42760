use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("grid too small: {0}")]
    GridTooSmall(String),
    #[error("degenerate one-body spectrum: {0}")]
    DegenerateSpectrum(String),
    #[error("eigensolver did not converge: {0}")]
    NonconvergedEigensolver(String),
    #[error("no closed form for trap kind {0}")]
    UnsupportedKind(String),
    #[error("trap is not reflection symmetric")]
    AsymmetricTrap,
    #[error("size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("label {0} not in composition")]
    LabelNotInComposition(usize),
    #[error("shape/alphabet mismatch: {0}")]
    ShapeAlphabetMismatch(String),
    #[error("unsupported particle number {0}")]
    UnsupportedN(usize),
    #[error("empty one-body spectrum")]
    EmptySpectrum,
    #[error("no table entry for parity pattern {0}")]
    UnknownClass(String),
    #[error("emergent degeneracy count needs a harmonic trap")]
    UnsupportedTrap,
    #[error("state {0} outside solved range ({1} states)")]
    StateOutOfRange(usize, usize),
    #[error("kernel undersampled: {0}")]
    KernelUndersampled(String),
    #[error("missing two-body element {0:?}")]
    MissingElement([usize; 4]),
    #[error("empty sector: {0}")]
    EmptySector(String),
    #[error("block of dimension {0} exceeds dense limit")]
    BlockTooLarge(usize),
    #[error("repeated label in composition")]
    RepeatedLabel,
    #[error("negative tunneling amplitude")]
    NegativeAmplitude,
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Errors caused by malformed user input rather than numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::Invalid(_)
                | Error::UnsupportedKind(_)
                | Error::UnsupportedN(_)
                | Error::UnsupportedTrap
                | Error::AsymmetricTrap
                | Error::RepeatedLabel
                | Error::StateOutOfRange(..)
                | Error::LabelNotInComposition(_)
                | Error::SizeMismatch(..)
                | Error::ShapeAlphabetMismatch(_)
        )
    }
}
