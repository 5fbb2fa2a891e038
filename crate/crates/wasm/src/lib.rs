//! Browser bindings. Graphs cross the boundary as JSON:
//! `{"vertices":[{"id":0,"x":..,"y":..}],"edges":[[0,1]]}`.

use serde_json::json;
use wasm_bindgen::prelude::*;

use plysweep::io::GraphJson;
use plysweep::layout::{circular_fallback, layout, refine_ply, Algorithm};
use plysweep::{compute_ply, derive_disks, LayoutConfig, RefineConfig};

fn parse(graph_json: &str) -> Result<GraphJson, String> {
    serde_json::from_str(graph_json).map_err(|e| e.to_string())
}

pub fn ply_json(graph_json: &str) -> Result<String, String> {
    let (g, d) = parse(graph_json)?.into_parts().map_err(|e| e.to_string())?;
    let report = compute_ply(&g, &d).map_err(|e| e.to_string())?;
    let disks = derive_disks(&g, &d).map_err(|e| e.to_string())?;
    Ok(json!({ "report": report, "disks": disks }).to_string())
}

pub fn layout_json(graph_json: &str, algorithm: &str, seed: u64) -> Result<String, String> {
    let alg = algorithm.parse::<Algorithm>().map_err(|e| e.to_string())?;
    let (g, _) = parse(graph_json)?.into_parts().map_err(|e| e.to_string())?;
    let d = layout(&g, &LayoutConfig::with(alg, seed));
    serde_json::to_string(&GraphJson::new(&g, &d)).map_err(|e| e.to_string())
}

/// `iterations` bounds the refinement; there is no wall clock here.
pub fn refine_json(graph_json: &str, iterations: u32, seed: u64) -> Result<String, String> {
    let (g, d) = parse(graph_json)?.into_parts().map_err(|e| e.to_string())?;
    let cfg = RefineConfig { seed, ..RefineConfig::with_iterations(iterations as u64) };
    let mut result = refine_ply(&g, &d, &cfg);
    circular_fallback(&g, &LayoutConfig::default(), &mut result);
    Ok(json!({
        "graph": GraphJson::new(&g, &result.drawing),
        "ply": result.ply,
        "fallback": result.fallback,
        "trajectory": result.trajectory,
    })
    .to_string())
}

#[wasm_bindgen(js_name = computePly)]
pub fn compute_ply_js(graph_json: &str) -> Result<String, JsError> {
    ply_json(graph_json).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = layoutGraph)]
pub fn layout_js(graph_json: &str, algorithm: &str, seed: u32) -> Result<String, JsError> {
    layout_json(graph_json, algorithm, seed as u64).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = refinePly)]
pub fn refine_js(graph_json: &str, iterations: u32, seed: u32) -> Result<String, JsError> {
    refine_json(graph_json, iterations, seed as u64).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    const K3: &str = r#"{"vertices":[{"id":0,"x":0,"y":0},{"id":1,"x":2,"y":0},{"id":2,"x":1,"y":1.7320508075688772}],"edges":[[0,1],[1,2],[0,2]]}"#;

    #[test]
    fn k3_has_ply_one() {
        let v: Value = serde_json::from_str(&ply_json(K3).unwrap()).unwrap();
        assert_eq!(v["report"]["ply"], 1);
        assert_eq!(v["disks"].as_array().unwrap().len(), 3);
    }

    #[test]
    fn layout_round_trips() {
        let a = layout_json(K3, "random", 3).unwrap();
        assert_eq!(a, layout_json(K3, "random", 3).unwrap());
        let v: Value = serde_json::from_str(&ply_json(&a).unwrap()).unwrap();
        assert!(v["report"]["ply"].as_u64().unwrap() >= 1);
        assert!(layout_json(K3, "spiral", 0).is_err());
    }

    #[test]
    fn refine_never_worsens() {
        let g = plysweep::generate::gnm(30, 45, 1);
        let d = layout(&g, &LayoutConfig::with(Algorithm::Random, 1));
        let input = serde_json::to_string(&GraphJson::new(&g, &d)).unwrap();
        let before = compute_ply(&g, &d).unwrap().ply as u64;
        let v: Value = serde_json::from_str(&refine_json(&input, 200, 0).unwrap()).unwrap();
        let after = v["ply"].as_u64().unwrap();
        assert!(after <= before);
        let again: Value = serde_json::from_str(&ply_json(&v["graph"].to_string()).unwrap()).unwrap();
        assert_eq!(again["report"]["ply"].as_u64().unwrap(), after);
    }

    #[test]
    fn bad_input_is_an_error() {
        assert!(ply_json("{").is_err());
        assert!(ply_json(r#"{"vertices":[{"id":0,"x":0,"y":0}],"edges":[[0,4]]}"#).is_err());
    }
}
