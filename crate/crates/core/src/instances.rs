//! The bundled instances, embedded so every command runs without external
//! files.

pub const TOY_VERTICAL: &str = include_str!("../instances/toy-vertical.json");
pub const I2_CHAIN: &str = include_str!("../instances/i2-chain.json");
pub const QUADRIC_NET: &str = include_str!("../instances/quadric-net.json");

pub const NAMES: [&str; 3] = ["toy-vertical", "i2-chain", "quadric-net"];

pub fn bundled(name: &str) -> Option<&'static str> {
    match name {
        "toy-vertical" => Some(TOY_VERTICAL),
        "i2-chain" => Some(I2_CHAIN),
        "quadric-net" => Some(QUADRIC_NET),
        _ => None,
    }
}

/// Load a bundled instance by name.
pub fn load(
    name: &str,
) -> crate::error::Result<(crate::varmodel::VarietyInstance, crate::varmodel::ValidationSummary)> {
    let text = bundled(name)
        .ok_or_else(|| crate::error::Error::input(format!("unknown bundled instance {name:?}")))?;
    crate::varmodel::load_and_validate(text, name)
}
