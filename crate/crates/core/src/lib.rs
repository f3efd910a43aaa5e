//! Čech cochain algebra over finite groups on networks of users.
//!
//! The crate models key schedules as cochains on the complete vertex-tuple complex of a
//! directed graph: torsor schedules (1-cocycles), gerbe-style schedules whose failure of
//! the composition law is a band-valued 2-cocycle, and towers obtained by iterated
//! lifting along `Z/p^k`. On top of that sit the protocols (link encryption, a key
//! distribution center, public-key agreement), the attacks against them, and an exact
//! rational secrecy and entropy analysis.
//!
//! This is a mathematical simulator at toy scale. Nothing here is suitable for
//! protecting real data.

pub mod attack;
pub mod cochain;
pub mod gerbe_tower;
pub mod groups;
pub mod kdc;
pub mod linkcrypt;
pub mod network;
pub mod pubkey;
pub mod secrecy;
