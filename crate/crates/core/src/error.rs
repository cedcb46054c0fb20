use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    #[error("no order given for the pair ({0}, {1})")]
    MissingPair(String, String),
    #[error("order given twice for the pair ({0}, {1})")]
    DuplicatePair(String, String),
    #[error("bad order {order} for the pair ({i}, {j}); right-angled diagrams allow only 2 or inf")]
    BadOrder { i: String, j: String, order: String },
    #[error("diagram needs at least one generator")]
    EmptyDiagram,
    #[error("too many generators ({0}); at most {max} are supported", max = crate::coxeter::MAX_GENERATORS)]
    TooManyGenerators(usize),
    #[error("unknown type `{0}`")]
    UnknownType(String),
    #[error("exponent {exp} out of range for type {ty} (thickness {q})")]
    ExponentOutOfRange { ty: usize, exp: u32, q: u16 },
    #[error("thickness {q} for type {ty} is below 2")]
    BadThickness { ty: usize, q: u32 },
    #[error("chamber does not belong to this building")]
    SpecMismatch,
    #[error("diagram is not irreducible")]
    NotIrreducible,
    #[error("diagram is spherical")]
    Spherical,
    #[error("the boundary walls of the two half-spaces do not cross")]
    WallsDoNotCross,
    #[error("half-space sides must be adjacent Weyl elements")]
    BadHalfSpace,
    #[error("residue of type {0} is not spherical")]
    NonSpherical(String),
    #[error("enumeration exceeded the cap of {cap} chambers")]
    ResourceLimit { cap: usize },
    #[error("apartment growth failed: {0}")]
    GrowthFailure(String),
    #[error("bad apartment assignment: {0}")]
    BadAssignment(String),
    #[error("not a bijection on the panel: {0}")]
    NotABijection(String),
    #[error("chamber outside the certified radius {radius}")]
    UncertifiedRegion { radius: usize },
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("no room to place a sample: {0}")]
    NoRoom(String),
    #[error("strong transitivity match failed: {0}")]
    MatchFailure(String),
    #[error("panel pair is not admissible: {0}")]
    NotAdmissible(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("unknown check `{0}`")]
    UnknownCheck(String),
    #[error("bad check configuration: {0}")]
    BadConfig(String),
}
