//! Variational layer: actions, Euler-Lagrange residual operators, exact
//! solution builders, Gateaux derivatives, gauge-symmetry deltas and the
//! fiber-average cancellation mechanism for the three models.

pub mod maxwell;
pub mod cancel;
pub mod eym;
pub mod ym;
pub mod quad;
