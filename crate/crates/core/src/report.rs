//! JSON shapes shared by the CLI and the registry.

use serde_json::{json, Map, Value};

use crate::solver::FactorizationResult;

pub const SCHEMA_VERSION: u32 = 1;

/// `{status, q: {k: RatFunc string}, diagnostics}`.
pub fn result_json(r: &FactorizationResult) -> Value {
    let q: Map<String, Value> = r.q.iter().map(|(k, v)| (k.to_string(), Value::String(v.to_string()))).collect();
    json!({
        "status": r.status,
        "middle": r.middle.label(),
        "middle_lower": r.middle_lower.label(),
        "q": q,
        "diagnostics": {
            "pivots": r.pivots,
            "cone": r.cone.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
            "denominators": r.formula_denominators().iter().map(|d| d.to_string()).collect::<Vec<_>>(),
            "sparsity": r.sparsity(),
            "max_nonzero_height": r.max_nonzero_height(),
            "in_semisimple_part": r.in_semisimple_part(),
            "verification": r.verification,
        }
    })
}

/// Wraps a payload with the schema version and command name.
pub fn envelope(command: &str, payload: Value) -> Value {
    json!({ "schema_version": SCHEMA_VERSION, "command": command, "result": payload })
}
