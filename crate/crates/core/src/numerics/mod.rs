//! Polynomial arithmetic, root finding, elimination, finite differences and
//! root tracking.

pub mod elim;
pub mod fd;
pub mod grid;
pub mod mpoly;
pub mod poly;
pub mod resultant;
pub mod roots;
pub mod track;

pub use elim::{solve_system, system_eliminant, SystemSolution};
pub use fd::{fd_gradient, fd_jacobian, fd_second, Point4};
pub use grid::Grid4;
pub use mpoly::MPoly;
pub use poly::{CPoly, C64};
pub use resultant::{discriminant, eliminate, resultant, Eliminated};
pub use roots::{poly_roots, poly_roots_with, Root, RootSet};
pub use track::{root_track, TrackEvent, TrackEventKind, Tracked, Trajectory};
