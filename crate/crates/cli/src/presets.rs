//! Named parameter studies of the warm-bath, cold-bath, DM and field
//! families.

use std::fmt::Write as _;

use crate::config::{RunConfig, SweepAxis, SweepConfig};

pub const PRESET_NAMES: [&str; 10] = [
    "fig2a", "fig2b", "fig2c", "fig3a", "fig3b", "fig3c", "fig4a", "fig4b", "fig5a", "fig5b",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownPreset(pub String);

impl std::fmt::Display for UnknownPreset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "unknown preset '{}' (valid presets: {})",
            self.0,
            PRESET_NAMES.join(", ")
        )
    }
}

impl std::error::Error for UnknownPreset {}

struct Family {
    system_temperature: f64,
    bath_temperature: f64,
    coupling: f64,
    memory_rate: f64,
    dm: f64,
    field: f64,
}

const WARM_SMALL: Family = Family {
    system_temperature: 10.0,
    bath_temperature: 80.0,
    coupling: 0.003,
    memory_rate: 5.0,
    dm: 0.0,
    field: 0.0,
};

const COLD_SMALL: Family = Family {
    system_temperature: 100.0,
    bath_temperature: 10.0,
    coupling: 0.005,
    memory_rate: 10.0,
    dm: 0.0,
    field: 0.0,
};

const WARM_DM: Family = Family {
    system_temperature: 20.0,
    bath_temperature: 80.0,
    coupling: 0.005,
    memory_rate: 2.0,
    dm: 0.0,
    field: 1.0,
};

const COLD_DM: Family = Family {
    system_temperature: 80.0,
    bath_temperature: 20.0,
    ..WARM_DM
};

const WARM_FIELD: Family = Family {
    dm: 0.3,
    field: 0.0,
    ..WARM_DM
};

const COLD_FIELD: Family = Family {
    dm: 0.3,
    field: 0.0,
    ..COLD_DM
};

/// `(family, axis, grid, grid values that are fixed inputs)`
fn table(name: &str) -> Option<(Family, SweepAxis, &'static [f64], &'static [f64])> {
    use SweepAxis::*;
    Some(match name {
        "fig2a" => (WARM_SMALL, MemoryRate, &[0.5, 1.0, 2.0, 5.0], &[0.5, 5.0]),
        "fig2b" => (WARM_SMALL, BathTemperature, &[20.0, 40.0, 80.0], &[80.0]),
        "fig2c" => (
            WARM_SMALL,
            CouplingStrength,
            &[0.001, 0.003, 0.01],
            &[0.003],
        ),
        "fig3a" => (COLD_SMALL, MemoryRate, &[1.0, 2.0, 5.0, 10.0], &[10.0]),
        "fig3b" => (COLD_SMALL, BathTemperature, &[10.0, 40.0, 80.0], &[10.0]),
        "fig3c" => (
            COLD_SMALL,
            CouplingStrength,
            &[0.001, 0.003, 0.005, 0.01],
            &[0.005],
        ),
        "fig4a" => (WARM_DM, DmStrength, &[0.0, 0.25, 0.5, 0.75, 1.0], &[]),
        "fig4b" => (COLD_DM, DmStrength, &[0.0, 0.25, 0.5, 0.75, 1.0], &[]),
        "fig5a" => (
            WARM_FIELD,
            FieldStrength,
            &[0.0, 1.0, 2.0, 3.0, 5.0],
            &[1.0, 2.0, 5.0],
        ),
        "fig5b" => (
            COLD_FIELD,
            FieldStrength,
            &[0.0, 1.0, 2.0, 3.0, 5.0],
            &[1.0, 2.0, 5.0],
        ),
        _ => return None,
    })
}

/// Sweep for a named preset with the default integration grid.
pub fn preset(name: &str) -> Result<SweepConfig, UnknownPreset> {
    let (family, axis, grid, _) = table(name).ok_or_else(|| UnknownPreset(name.to_string()))?;
    let mut base = RunConfig {
        label: name.to_string(),
        ..RunConfig::default()
    };
    base.chain.dm_strength = family.dm;
    base.chain.field_strength = family.field;
    base.bath.coupling_strength = family.coupling;
    base.bath.memory_rate = family.memory_rate;
    base.bath.bath_temperature = family.bath_temperature;
    base.init.system_temperature = family.system_temperature;
    Ok(SweepConfig {
        base,
        axis,
        values: grid.to_vec(),
    })
}

/// One line per preset with its fixed parameters and sweep grid; grid points
/// that are not fixed inputs are marked "chosen".
pub fn help_text() -> String {
    let mut out = String::from("Presets (J = 1, N = 4, periodic chain):\n");
    for name in PRESET_NAMES {
        let (_, _, _, reference) = table(name).expect("every listed preset has a table entry");
        let sweep = preset(name).expect("listed preset");
        let b = &sweep.base;
        let grid: Vec<String> = sweep
            .values
            .iter()
            .map(|v| {
                if reference.contains(v) {
                    v.to_string()
                } else {
                    format!("{v} (chosen)")
                }
            })
            .collect();
        let fixed: Vec<String> = [
            (
                "T_s",
                b.init.system_temperature,
                SweepAxis::SystemTemperature,
            ),
            ("T_b", b.bath.bath_temperature, SweepAxis::BathTemperature),
            ("gamma", b.bath.memory_rate, SweepAxis::MemoryRate),
            (
                "Gamma",
                b.bath.coupling_strength,
                SweepAxis::CouplingStrength,
            ),
            ("D_z", b.chain.dm_strength, SweepAxis::DmStrength),
            ("B_z", b.chain.field_strength, SweepAxis::FieldStrength),
        ]
        .into_iter()
        .filter(|(_, _, axis)| *axis != sweep.axis)
        .map(|(k, v, _)| format!("{k}={v}"))
        .collect();
        writeln!(
            out,
            "  {name}: {} in [{}]; {}",
            sweep.axis,
            grid.join(", "),
            fixed.join(" ")
        )
        .expect("writing to a String cannot fail");
    }
    out
}
