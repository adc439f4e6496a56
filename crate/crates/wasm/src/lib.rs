use optomag::scenario::{self, ResultBundle, ScenarioConfig, ScenarioKind};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn to_js(e: optomag::Error) -> JsValue {
    JsValue::from_str(&e.to_string())
}

fn swap_config(g: f64, lambda: f64, nbar: f64, t_end: f64) -> ScenarioConfig {
    ScenarioConfig {
        scenario: Some(ScenarioKind::SingleNodeSwap),
        G: Some(g),
        Lambda: Some(lambda),
        nbar_init: Some(nbar),
        t_end: Some(t_end),
        ..Default::default()
    }
}

fn trajectory_json(bundle: &ResultBundle) -> Value {
    let mut map = serde_json::Map::new();
    if let Some(traj) = &bundle.trajectory {
        map.insert("t".into(), json!(traj.times));
        for (name, col) in &traj.columns {
            map.insert(name.clone(), json!(col));
        }
    }
    json!({ "columns": map, "summary": bundle.summary_json() })
}

/// Single-node swap trajectory as JSON: `{columns: {t, pop_e, ...}, summary}`.
#[wasm_bindgen]
pub fn single_node_swap(g: f64, lambda: f64, nbar: f64, t_end: f64) -> Result<String, JsValue> {
    let bundle = scenario::run(&swap_config(g, lambda, nbar, t_end)).map_err(to_js)?;
    Ok(trajectory_json(&bundle).to_string())
}

/// Wigner function of the cavity or mechanics at time `t`.
#[wasm_bindgen]
pub fn wigner_snapshot(g: f64, lambda: f64, nbar: f64, t: f64, subsystem: &str, points: usize) -> Result<String, JsValue> {
    let mut cfg = swap_config(g, lambda, nbar, t.max(1e-3));
    cfg.wigner_snapshots = Some(vec![t]);
    cfg.wigner_points = Some(points);
    let bundle = scenario::run(&cfg).map_err(to_js)?;
    let snap = bundle
        .wigners
        .iter()
        .find(|w| w.subsystem == subsystem)
        .ok_or_else(|| JsValue::from_str(&format!("no subsystem `{subsystem}`")))?;
    let g = &snap.grid;
    let rows: Vec<Vec<f64>> = (0..g.p_values.len()).map(|ip| (0..g.x_values.len()).map(|ix| g.at(ix, ip)).collect()).collect();
    Ok(json!({ "x": g.x_values, "p": g.p_values, "w": rows, "time": snap.time }).to_string())
}

/// Derived device parameters for a mirror geometry (SI units).
#[wasm_bindgen]
pub fn device_report(radius: f64, thickness: f64, temperature: f64) -> Result<String, JsValue> {
    let cfg = ScenarioConfig {
        scenario: Some(ScenarioKind::DesignReport),
        radius: Some(radius),
        thickness: Some(thickness),
        temperature: Some(temperature),
        ..Default::default()
    };
    let bundle = scenario::run(&cfg).map_err(to_js)?;
    Ok(bundle.summary_json().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn swap_json_has_columns() {
        let v: Value = serde_json::from_str(&single_node_swap(5.0, 5.0, 0.2, 0.1).unwrap()).unwrap();
        assert_eq!(v["columns"]["t"][0], 0.0);
        assert!(v["columns"]["pop_e"].as_array().unwrap().len() > 2);
    }

    #[test]
    fn wigner_grid_shape() {
        let v: Value = serde_json::from_str(&wigner_snapshot(5.0, 5.0, 0.0, 0.0, "cavity", 9).unwrap()).unwrap();
        assert_eq!(v["w"].as_array().unwrap().len(), 9);
        assert_eq!(v["x"].as_array().unwrap().len(), 9);
    }

    #[test]
    fn device_values() {
        let v: Value = serde_json::from_str(&device_report(5e-6, 7e-6, 0.01).unwrap()).unwrap();
        let nu = v["device"]["nu_m_hz"]["formula"].as_f64().unwrap();
        assert!((nu / 366.4e6 - 1.0).abs() < 0.01);
    }
}
