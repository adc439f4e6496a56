//! Device report: physical geometry to model rates, with quoted values
//! alongside.

use std::f64::consts::PI;

use serde_json::{json, Value};

use super::bundle::{ResultBundle, Table};
use super::config::{ParamEcho, ScenarioConfig, ScenarioKind, Source};
use crate::device::{derive, required_drive_power, KappaUnits, MaterialProps, MirrorGeometry, OperatingPoint};
use crate::error::{Error, Result};

/// Relative difference above which a formula value and a quoted value are
/// flagged as divergent.
pub const DIVERGENCE_FLAG: f64 = 0.1;

pub fn run_design_report(cfg: &ScenarioConfig) -> Result<ResultBundle> {
    let mut echo = ParamEcho::default();
    let geometry = MirrorGeometry {
        radius: echo.pick("radius", cfg.radius, 5e-6),
        thickness: echo.pick("thickness", cfg.thickness, 7e-6),
        cavity_length: echo.pick("cavity_length", cfg.cavity_length, 10e-6),
        wavelength: echo.pick("wavelength", cfg.wavelength, 1064e-9),
        finesse: echo.pick("finesse", cfg.finesse, 2e5),
    };
    let material = MaterialProps {
        density: echo.pick("density", cfg.density, 4200.0),
        sound_speed: echo.pick("sound_speed", cfg.sound_speed, 5130.0),
    };
    let temperature = echo.pick("temperature", cfg.temperature, 0.010);
    let units = KappaUnits::from_linewidth_hz(echo.pick("kappa_hz", cfg.kappa_hz, 10e6)).map_err(|e| Error::Config(e.to_string()))?;
    geometry.validate().map_err(|e| Error::Config(e.to_string()))?;
    material.validate().map_err(|e| Error::Config(e.to_string()))?;

    // operating point in κ-units; Δ_c defaults to a tenth of the derived ω_m
    let g_kappa = echo.pick("G", cfg.G, 1.8);
    let lambda = echo.pick("Lambda", cfg.Lambda, 4.0);
    let omega_m_si = 2.0 * PI * material.sound_speed / (2.0 * geometry.thickness);
    let delta_c_kappa = match cfg.Delta_c {
        Some(v) => {
            echo.record("Delta_c", v, Source::Config);
            v
        }
        None => {
            let v = 0.1 * units.to_kappa(omega_m_si);
            echo.derived("Delta_c", v);
            v
        }
    };
    let op = OperatingPoint {
        temperature,
        kappa: units.kappa,
        g: units.to_si(g_kappa),
        delta_c: units.to_si(delta_c_kappa),
    };
    let d = derive(&geometry, &material, &op).map_err(|e| Error::Config(e.to_string()))?;

    let overrides: Vec<(&str, Option<f64>)> = vec![
        ("m_eff_kg", cfg.override_m_eff_kg),
        ("nu_m_hz", cfg.override_nu_m_hz),
        ("nbar_th", cfg.override_nbar_th),
        ("g0_hz", cfg.override_g0_hz),
        ("p_in_w", cfg.override_p_in_w),
        ("kappa_fwhm_hz", cfg.override_kappa_fwhm_hz),
    ];
    for (name, v) in &overrides {
        if let Some(v) = v {
            if !(*v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("override_{name} must be positive")));
            }
            echo.record(&format!("override_{name}"), *v, Source::Quoted);
        }
    }
    let quoted = |name: &str| overrides.iter().find(|(n, _)| *n == name).and_then(|(_, v)| *v);

    let formula = [
        ("m_eff_kg", d.m_eff),
        ("nu_m_hz", d.nu_m),
        ("nbar_th", d.nbar_th),
        ("g0_hz", d.g0 / (2.0 * PI)),
        ("p_in_w", d.p_in),
        ("kappa_fwhm_hz", d.kappa_fwhm_from_finesse / (2.0 * PI)),
    ];

    let mut bundle = ResultBundle::new(ScenarioKind::DesignReport, echo);
    let mut rows = serde_json::Map::new();
    let mut flagged = Vec::new();
    for (name, value) in formula {
        let mut row = serde_json::Map::new();
        row.insert("formula".into(), json!(value));
        if let Some(q) = quoted(name) {
            let rel = (value - q) / q;
            row.insert("quoted".into(), json!(q));
            row.insert("relative_difference".into(), json!(rel));
            let diverges = rel.abs() > DIVERGENCE_FLAG;
            row.insert("diverges".into(), json!(diverges));
            if diverges {
                flagged.push(name.to_string());
                bundle.warnings.push(format!("{name}: formula {value:.4e} differs from quoted {q:.4e} by {:.0}%", 100.0 * rel));
            }
        }
        rows.insert(name.into(), Value::Object(row));
    }
    // drive power evaluated with the quoted g0, when one is given
    if let Some(g0_q) = quoted("g0_hz") {
        let p = required_drive_power(op.g, 2.0 * PI * g0_q, op.delta_c, op.kappa, geometry.wavelength)?;
        let mut row = serde_json::Map::new();
        row.insert("formula".into(), json!(p));
        if let Some(q) = quoted("p_in_w") {
            row.insert("quoted".into(), json!(q));
            row.insert("relative_difference".into(), json!((p - q) / q));
        }
        rows.insert("p_in_w_at_quoted_g0".into(), Value::Object(row));
    }
    bundle.set("device", Value::Object(rows));
    bundle.set("flagged", json!(flagged));
    bundle.set("x_zp_m", d.x_zp);
    bundle.set("omega_m_kappa", units.to_kappa(d.omega_m));
    bundle.set("g0_kappa", units.to_kappa(d.g0));
    bundle.set("Lambda_hz", units.to_si(lambda) / (2.0 * PI));
    bundle.set("G_hz", op.g / (2.0 * PI));
    bundle.set("Delta_c_hz", op.delta_c / (2.0 * PI));
    bundle.set("alpha_s", op.g / d.g0);

    let mut table = Table { headers: ["formula", "quoted"].map(String::from).to_vec(), rows: Vec::new() };
    let mut names = Vec::new();
    for (name, value) in formula {
        names.push(name);
        table.rows.push(vec![value, quoted(name).unwrap_or(f64::NAN)]);
    }
    table.headers.insert(0, "quantity_index".into());
    for (i, row) in table.rows.iter_mut().enumerate() {
        row.insert(0, i as f64);
    }
    bundle.set("table_quantities", json!(names));
    bundle.tables.push(("device".into(), table));
    Ok(bundle)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formula_only_without_overrides() {
        let cfg = ScenarioConfig::from_toml_str("scenario = \"design_report\"\n").unwrap();
        let b = run_design_report(&cfg).unwrap();
        let dev = &b.summary["device"];
        assert!(dev["g0_hz"].get("quoted").is_none());
        assert!(dev.get("p_in_w_at_quoted_g0").is_none());
        assert!(b.warnings.is_empty());
        let m = dev["m_eff_kg"]["formula"].as_f64().unwrap();
        assert!((m / 7.70e-13 - 1.0).abs() < 0.02);
    }

    #[test]
    fn quoted_values_are_compared() {
        let cfg = ScenarioConfig::from_toml_str(
            "scenario = \"design_report\"\noverride_g0_hz = 8.3e3\noverride_p_in_w = 16e-3\noverride_nu_m_hz = 366e6\n",
        )
        .unwrap();
        let b = run_design_report(&cfg).unwrap();
        let flagged: Vec<String> = serde_json::from_value(b.summary["flagged"].clone()).unwrap();
        assert!(flagged.contains(&"g0_hz".to_string()));
        assert!(!flagged.contains(&"nu_m_hz".to_string()));
        let p = b.summary["device"]["p_in_w_at_quoted_g0"]["formula"].as_f64().unwrap();
        assert!((p / 4.0e-4 - 1.0).abs() < 0.05, "{p}");
        assert_eq!(b.echo.entries["override_g0_hz"].source, Source::Quoted);
    }

    #[test]
    fn bad_geometry_is_a_config_error() {
        let cfg = ScenarioConfig::from_toml_str("scenario = \"design_report\"\nwavelength = 1.0\n").unwrap();
        assert!(matches!(run_design_report(&cfg), Err(Error::Config(_))));
    }
}
