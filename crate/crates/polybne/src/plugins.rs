//! Games compiled into the binary and selectable by name from a config.
//!
//! Add an entry to [`REGISTRY`] to expose a custom [`GameSpec`].

use polybne_core::GameSpec;

pub type Constructor = fn() -> GameSpec;

pub static REGISTRY: &[(&str, Constructor)] = &[];

pub fn lookup(name: &str) -> Option<GameSpec> {
    REGISTRY.iter().find(|(n, _)| *n == name).map(|(_, make)| make())
}
