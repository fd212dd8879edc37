//! JSON Schema documents for the subcommand configs, printed by `--schema`.

use serde_json::{json, Value};

fn number(desc: &str) -> Value {
    json!({"type": "number", "description": desc})
}

fn integer(desc: &str) -> Value {
    json!({"type": "integer", "minimum": 0, "description": desc})
}

fn complex(desc: &str) -> Value {
    json!({"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2, "description": desc})
}

fn object(title: &str, properties: Value, required: &[&str]) -> Value {
    json!({
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "title": title,
        "type": "object",
        "additionalProperties": false,
        "properties": properties,
        "required": required,
    })
}

fn compile_options() -> Value {
    json!({
        "type": "object",
        "additionalProperties": false,
        "description": "Laser settings used for every compiled pulse (trap-frequency units)",
        "properties": {
            "rabi": number("Rabi frequency"),
            "lamb_dicke": number("Lamb-Dicke parameter"),
            "validity_threshold": number("largest accepted (rabi*eta/(sqrt(N)*nu))^2, default 0.05"),
        },
        "required": ["rabi", "lamb_dicke"],
    })
}

fn trap_config() -> Value {
    let triple = |d: &str| json!({"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 3, "description": d});
    json!({
        "type": "object",
        "additionalProperties": false,
        "description": "SI units; U and U~ are effective amplitudes that absorb the electrode geometry (V/m^2)",
        "properties": {
            "dc_amplitude": number("effective static amplitude U"),
            "rf_amplitude": number("effective rf amplitude U~"),
            "rf_frequency": number("rf drive, rad/s"),
            "dc_geometry": triple("static geometry factors, summing to 0"),
            "rf_geometry": triple("rf geometry factors, summing to 0"),
            "ion_mass": number("kg"),
            "charge_state": {"type": "integer", "minimum": 1},
        },
        "required": ["dc_amplitude", "rf_amplitude", "rf_frequency", "dc_geometry", "rf_geometry", "ion_mass", "charge_state"],
    })
}

fn pulse_spec() -> Value {
    json!({
        "type": "object",
        "additionalProperties": false,
        "properties": {
            "kind": {"enum": ["carrier", "red_sideband", "blue_sideband", "lamb_dicke_full", "cirac_zoller", "multimode_standing_wave"]},
            "target_ion": integer("addressed ion"),
            "polarization": {"enum": ["plus", "minus"]},
            "rabi": number("Rabi frequency"),
            "lamb_dicke": number("Lamb-Dicke parameter"),
            "phase": number("laser phase, rad"),
            "detuning": number("laser detuning; omitted means on the named resonance"),
            "duration": number("pulse length, inverse trap-frequency units"),
            "mode": integer("mode for single-mode kinds"),
        },
        "required": ["kind", "target_ion", "rabi", "duration"],
    })
}

fn gate_spec() -> Value {
    json!({
        "type": "object",
        "description": "tagged by `gate`: rotation{ion,k,phi}, x|y|z|h{ion}, cnot|cz_phase{control,target}, sideband{ion,k,polarization,phi}, prepare_chi{ion,a,b}",
        "properties": {
            "gate": {"enum": ["rotation", "x", "y", "z", "h", "cnot", "cz_phase", "sideband", "prepare_chi"]},
            "ion": integer("target ion"),
            "control": integer("control ion"),
            "target": integer("target ion"),
            "k": number("pulse area in units of pi"),
            "phi": number("laser phase, rad"),
            "polarization": {"enum": ["plus", "minus"]},
            "a": complex("amplitude of |0>"),
            "b": complex("amplitude of |1>"),
        },
        "required": ["gate"],
    })
}

/// Schema for `subcommand`, or `None` when the name is unknown.
pub fn schema_for(subcommand: &str) -> Option<Value> {
    Some(match subcommand {
        "trap-sim" => object(
            "trap-sim",
            json!({
                "trap": trap_config(),
                "mathieu": {
                    "type": "object",
                    "additionalProperties": false,
                    "properties": {"a": number("Mathieu a"), "q": number("Mathieu q"), "rf_frequency": number("rad/s")},
                    "required": ["a", "q", "rf_frequency"],
                },
                "axis": {"enum": ["x", "y", "z"]},
                "amplitude": number("secular amplitude A, m"),
                "duration": number("s; default one secular period"),
                "dt": number("s; default rf period / 200, at most rf period / 50"),
            }),
            &["amplitude"],
        ),
        "modes" => object(
            "modes",
            json!({"n": integer("number of ions"), "secular_frequency": number("trap frequency, default 1")}),
            &["n"],
        ),
        "pulse" => object(
            "pulse",
            json!({
                "n_ions": integer("default 1"),
                "levels_per_ion": integer("2 or 3, default 2"),
                "n_modes": integer("default 1"),
                "fock_cutoff": integer("largest Fock number kept"),
                "secular_frequency": number("default 1"),
                "initial": {
                    "type": "object",
                    "additionalProperties": false,
                    "properties": {
                        "levels": {"type": "array", "items": {"enum": ["ground", "excited", "auxiliary"]}},
                        "fock": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                    },
                    "required": ["levels"],
                },
                "pulse": pulse_spec(),
                "samples": integer("CSV rows after t = 0, default 200"),
            }),
            &["fock_cutoff", "initial", "pulse"],
        ),
        "gate" => object(
            "gate",
            json!({
                "n_ions": integer("register size"),
                "fock_cutoff": integer("default 5"),
                "compile": compile_options(),
                "gates": {"type": "array", "items": gate_spec()},
                "input": {
                    "description": "{\"bits\": [..]} or {\"amplitudes\": [[re, im], ..]}, ion 0 most significant",
                    "type": "object",
                },
            }),
            &["n_ions", "gates", "input"],
        ),
        "teleport" => object(
            "teleport",
            json!({
                "a": complex("amplitude of |0> in the state to send"),
                "b": complex("amplitude of |1>"),
                "branch": {"type": "array", "items": {"enum": [0, 1]}, "minItems": 2, "maxItems": 2},
                "fock_cutoff": integer("default 5"),
                "compile": compile_options(),
            }),
            &["a", "b"],
        ),
        "bell" => object(
            "bell",
            json!({
                "labels": {"type": "array", "items": {"enum": [0, 1]}, "minItems": 2, "maxItems": 2},
                "fock_cutoff": integer("default 5"),
                "compile": compile_options(),
            }),
            &[],
        ),
        "cz-bound" => object(
            "cz-bound",
            json!({
                "n_ions": integer("number of ions"),
                "secular_frequency": number("default 1"),
                "lamb_dicke": number("Lamb-Dicke parameter"),
                "rabi": number("Rabi frequency"),
                "simulate_cutoff": integer("also simulate leakage with this Fock cutoff"),
            }),
            &["n_ions", "lamb_dicke", "rabi"],
        ),
        "selftest" => object(
            "selftest",
            json!({
                "only": {"type": "array", "items": {"type": "string"}, "description": "criterion ids"},
                "jobs": integer("worker threads"),
            }),
            &[],
        ),
        "scenario" => object(
            "scenario",
            json!({
                "subcommand": {"enum": ["trap-sim", "modes", "pulse", "gate", "teleport", "bell", "cz-bound", "selftest"]},
                "input": {"type": "string", "description": "config path, relative to the scenario file"},
                "output_dir": {"type": "string"},
                "seed": integer("measurement seed"),
                "tolerances": {
                    "type": "object",
                    "additionalProperties": false,
                    "properties": {"validity_threshold": number("gate compiler threshold")},
                },
            }),
            &["subcommand"],
        ),
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_subcommand_has_a_schema() {
        for name in ["trap-sim", "modes", "pulse", "gate", "teleport", "bell", "cz-bound", "selftest", "scenario"] {
            let s = schema_for(name).unwrap();
            assert_eq!(s["additionalProperties"], Value::Bool(false), "{name}");
        }
        assert!(schema_for("nope").is_none());
    }
}
