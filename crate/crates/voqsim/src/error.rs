use thiserror::Error;

/// Errors produced by state construction, optical elements, measurement and
/// the protocol pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate mode name `{0}` in registry")]
    DuplicateMode(String),
    #[error("unknown mode `{0}`")]
    UnknownMode(String),
    #[error("occupation vector has {got} entries, registry has {expected} modes")]
    OccupationLength { got: usize, expected: usize },
    #[error("occupation {occ} on mode `{mode}` exceeds photon cap {cap}")]
    PhotonCapExceeded { mode: String, occ: u8, cap: u8 },
    #[error("states indexed against different mode registries")]
    RegistryMismatch,
    #[error("registries overlap on mode `{0}`; tensor factors must be disjoint")]
    OverlappingRegistries(String),
    #[error("superposition with no terms")]
    EmptySuperposition,
    #[error("state has zero norm")]
    ZeroNorm,
    #[error("beam splitter amplitudes r={r}, t={t} violate r^2 + t^2 = 1")]
    InvalidBeamSplitter { r: f64, t: f64 },
    #[error("beam splitter ports must be distinct (got `{0}` twice)")]
    DegeneratePorts(String),
    #[error("beam splitter output ports must equal the input pair or be disjoint from it")]
    MixedPorts,
    #[error("beam splitter output mode `{0}` is occupied; it must be vacuum")]
    OutputModeOccupied(String),
    #[error("efficiency {0} outside [0, 1]")]
    InvalidEfficiency(f64),
    #[error("sigma_z on mode `{mode}` undefined: found occupation {occ} outside the qubit subspace")]
    NonQubitOccupation { mode: String, occ: u8 },
    #[error("pattern (1,1) is impossible under ideal two-photon interference; reaching it signals a simulator bug")]
    ImpossiblePattern,
    #[error("Alice pattern ({0},{1}) carries more than two photons")]
    InvalidAlicePattern(u8, u8),
    #[error("unknown detector `{0}` in distribution")]
    UnknownDetector(String),
    #[error("distributions defined over different detector sets")]
    DetectorSetMismatch,
    #[error("wavelength must be positive, got {0}")]
    InvalidWavelength(f64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("fit error: {0}")]
    Fit(String),
    #[error("malformed CSV at line {line}: {msg}")]
    CsvParse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
