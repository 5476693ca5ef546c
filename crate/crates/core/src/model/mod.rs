//! Shared signal, geometry and control types.

mod envelope;
mod geometry;
mod schedule;

pub use envelope::ComplexEnvelope;
pub use geometry::{Orientation, Point3, PointRole, PointSet, SurfaceGeometry};
pub use schedule::{CoefficientSchedule, ReflectionCoefficient};
