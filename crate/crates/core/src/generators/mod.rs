//! Instance generators and the independent oracles that go with them.

mod horn;
mod machine;
mod random;

pub use horn::{classical_horn_bottom, random_horn, HornAtom, HornClause, HornParams};
pub use machine::{
    bounded_halting_instance, encode_phi, halting_query, halts_within_bound, numeral,
    phi_conjuncts, random_machine, simulate, Config, Instr, MachineError, Register, SimResult,
    TwoRegisterMachine, HALT_STATE,
};
pub use random::{random_instance, RandomInstance, RandomParams};
