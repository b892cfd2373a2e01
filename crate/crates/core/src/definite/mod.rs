//! Algorithms for definite lattices: reduction, short vectors, automorphisms
//! and isometries, neighbours and genus enumeration.

pub mod genus;
pub mod gram;
pub mod isom;
pub mod neighbor;
pub mod profile;
pub mod short;

pub use genus::{enumerate_genus, Fingerprint, GenusClass, GenusClassCatalog, GenusStrategy};
pub use gram::Gram;
pub use isom::{automorphism_group, is_isometric, isometry, AutomorphismGroup};
pub use neighbor::{isotropic_lines, p_neighbors};
pub use short::{minimum, short_vectors, ShortVectorList};
