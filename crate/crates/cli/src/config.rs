//! Flat `key = value` configuration files with dotted section keys.
//!
//! Grammar, line by line: blank lines and `#` comments are ignored;
//! everything else must be `key = value`. Values are numbers,
//! comma-separated number lists, `true`/`false`, or a formula-mode token
//! (`db-consistent` / `literal`). Distances are kilometers and speeds
//! km/h, matching the parameter tables; parsing converts to SI. Unknown
//! and duplicate keys are hard errors with line numbers. Missing keys
//! take the documented defaults, and every value's provenance (file line
//! or named default) is recorded for result metadata.

use std::collections::BTreeMap;
use std::path::Path;

use dude_core::linkbudget::FormulaMode;
use dude_core::scenario::ScenarioConfig;

use crate::CliError;

/// Every accepted key with the provenance note used when it defaults.
const KEYS: &[(&str, &str)] = &[
    ("layout.macro_dl_dbm", "default 40 dBm; simulation parameter table: Macro downlink transmit power"),
    ("layout.small_dl_dbm", "default 20 dBm; simulation parameter table: small cell downlink transmit power"),
    ("layout.macro_radius_km", "default 1 km; simulation parameter table: Macro coverage radius"),
    ("layout.small_radius_km", "default 0.035 km; simulation parameter table: small cell coverage radius"),
    ("layout.small_cell_distance_km", "default 0.75 km; chosen placement; keeps the decoupling region inside Macro coverage"),
    ("pc.p0_dbm", "default -80 dBm; chosen open-loop target in the typical LTE range; not listed in the parameter tables"),
    ("pc.alpha", "default 0.7; simulation parameter table: Macro and small cell power control parameter"),
    ("pc.pmax_dbm", "default 23 dBm; simulation parameter table: maximum UE uplink transmit power"),
    ("pc.num_rbs", "default 10; simulation parameter table: number of RBs"),
    ("pc.noise_dbm", "default -102 dBm; chosen noise floor over the assigned bandwidth"),
    ("pc.mode", "default db-consistent; chosen formula mode"),
    ("d2d.pair_density_per_km2", "default 100 per km^2; chosen; the model leaves the pair density free"),
    ("mobility.step_mean_km", "default 0.01 km; mobility model table: half-normal step distance mean"),
    ("mobility.speed_classes_kmph", "default 20,30,50 km/h; mobility model table: half-normal velocity means"),
    ("mobility.heading_halfwidth_rad", "default 0.7853981633974483 rad; mobility model table: rotation angle uniform within pi/4 of the bearing to the small cell"),
    ("mobility.devices_per_class", "default 100; devices per velocity class"),
    ("mobility.max_time_s", "default 20000 s; chosen walk cutoff"),
    ("mobility.start_inner_frac", "default 0.65; chosen start band (fraction of Macro radius)"),
    ("mobility.start_outer_frac", "default 0.9; chosen start band (fraction of Macro radius)"),
    ("mobility.start_half_angle_rad", "default 1.0471975511965976 rad; chosen start sector on the far side from the small cell"),
    ("mobility.refine_crossings", "default false; hold each sample's association for its whole step"),
    ("transit.speeds_kmph", "default 30,35,40,45,50,55,60 km/h; transit speed sweep"),
    ("transit.start_km", "default 0.1 km; transit start distance from the Macro"),
    ("transit.end_km", "default 0.74 km; transit end distance from the Macro"),
    ("transit.spacing_km", "default 0.001 km; transit sample spacing"),
    ("transit.target_sinr_db", "default 0 dB; uplink SINR target for the transmit-power trace"),
    ("transit.with_interference", "default false; noise-only uplinks"),
    ("transit.interferer_for_macro_km", "default 0.76 km; optional interferer served by the small cell"),
    ("transit.interferer_for_small_km", "default 0.2 km; optional interferer served by the Macro"),
    ("zones.macro_radius_km", "default 0.8 km; D2D parameter table: Macro coverage radius"),
    ("zones.small_cell_distance_km", "default 0.8 km; chosen so the device distances straddle the region boundary"),
    ("zones.device_distances_km", "default 0.6,0.73 km; D2D parameter table: distance of decoupling device from Macro"),
    ("zones.thresholds_dbm", "default -90,-95 dBm; D2D parameter table: D2D interference thresholds"),
    ("region.samples", "default 1000000; Monte Carlo samples for the region area"),
    ("compare.d_m_km", "default 0.2,0.6,1.0 km; comparison grid Macro distances"),
    ("compare.ds_over_dm", "default 0.25,0.5,1.0; comparison grid distance ratios"),
    ("compare.alphas", "default 0.5,0.7,1.0; comparison grid compensation factors"),
    ("compare.p0_dbm", "default -90,-80,-70 dBm; comparison grid targets"),
    ("compare.num_rbs", "default 1,10; comparison grid RB counts"),
    ("compare.lambda_dbm", "default -90 dBm; threshold for the comparison zone columns"),
    ("seed", "default 42; master seed"),
];

fn parse_f64(raw: &str) -> Result<f64, String> {
    raw.trim()
        .parse::<f64>()
        .map_err(|_| format!("expected a number, got '{raw}'"))
}

fn parse_list_f64(raw: &str) -> Result<Vec<f64>, String> {
    let items: Vec<f64> = raw.split(',').map(parse_f64).collect::<Result<_, _>>()?;
    if items.is_empty() {
        return Err("expected a non-empty list".into());
    }
    Ok(items)
}

fn parse_u32(raw: &str) -> Result<u32, String> {
    raw.trim()
        .parse::<u32>()
        .map_err(|_| format!("expected a non-negative integer, got '{raw}'"))
}

fn parse_u64(raw: &str) -> Result<u64, String> {
    raw.trim()
        .parse::<u64>()
        .map_err(|_| format!("expected a non-negative integer, got '{raw}'"))
}

fn parse_bool(raw: &str) -> Result<bool, String> {
    match raw.trim() {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(format!("expected true or false, got '{other}'")),
    }
}

fn parse_mode(raw: &str) -> Result<FormulaMode, String> {
    match raw.trim() {
        "db-consistent" => Ok(FormulaMode::DbConsistent),
        "literal" => Ok(FormulaMode::Literal),
        other => Err(format!("expected db-consistent or literal, got '{other}'")),
    }
}

fn in_unit_interval(name: &str, v: f64) -> Result<f64, String> {
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err(format!("{name} must be in (0, 1], got {v}"))
    }
}

const KM: f64 = 1000.0;
const KMPH: f64 = 1.0 / 3.6;

/// Applies one parsed `key = value` pair.
fn apply_key(cfg: &mut ScenarioConfig, key: &str, raw: &str) -> Result<(), String> {
    match key {
        "layout.macro_dl_dbm" => cfg.layout.macro_radio.dl_tx_power_dbm = parse_f64(raw)?,
        "layout.small_dl_dbm" => cfg.layout.small_radio.dl_tx_power_dbm = parse_f64(raw)?,
        "layout.macro_radius_km" => cfg.layout.macro_radio.coverage_radius_m = parse_f64(raw)? * KM,
        "layout.small_radius_km" => cfg.layout.small_radio.coverage_radius_m = parse_f64(raw)? * KM,
        "layout.small_cell_distance_km" => {
            cfg.layout.small_pos.x = cfg.layout.macro_pos.x + parse_f64(raw)? * KM
        }
        "pc.p0_dbm" => cfg.pc.p0_dbm = parse_f64(raw)?,
        "pc.alpha" => cfg.pc.alpha = in_unit_interval("alpha", parse_f64(raw)?)?,
        "pc.pmax_dbm" => cfg.pc.pmax_dbm = parse_f64(raw)?,
        "pc.num_rbs" => {
            let k = parse_u32(raw)?;
            if k < 1 {
                return Err("num_rbs must be >= 1".into());
            }
            cfg.pc.num_rbs = k;
        }
        "pc.noise_dbm" => cfg.pc.noise_dbm = parse_f64(raw)?,
        "pc.mode" => cfg.pc.mode = parse_mode(raw)?,
        "d2d.pair_density_per_km2" => {
            cfg.d2d.pair_density_per_m2 = parse_f64(raw)? / 1e6;
            if cfg.d2d.pair_density_per_m2 < 0.0 {
                return Err("pair density must be non-negative".into());
            }
        }
        "mobility.step_mean_km" => cfg.mobility.step_mean_m = parse_f64(raw)? * KM,
        "mobility.speed_classes_kmph" => {
            cfg.mobility.speed_classes_mps =
                parse_list_f64(raw)?.into_iter().map(|v| v * KMPH).collect()
        }
        "mobility.heading_halfwidth_rad" => cfg.mobility.heading_halfwidth_rad = parse_f64(raw)?,
        "mobility.devices_per_class" => cfg.mobility.devices_per_class = parse_u32(raw)?,
        "mobility.max_time_s" => cfg.mobility.max_time_s = parse_f64(raw)?,
        "mobility.start_inner_frac" => cfg.mobility.start_band.inner_frac = parse_f64(raw)?,
        "mobility.start_outer_frac" => cfg.mobility.start_band.outer_frac = parse_f64(raw)?,
        "mobility.start_half_angle_rad" => cfg.mobility.start_band.half_angle_rad = parse_f64(raw)?,
        "mobility.refine_crossings" => cfg.mobility.refine_crossings = parse_bool(raw)?,
        "transit.speeds_kmph" => cfg.transit.speeds_kmph = parse_list_f64(raw)?,
        "transit.start_km" => cfg.transit.start_m = parse_f64(raw)? * KM,
        "transit.end_km" => cfg.transit.end_m = parse_f64(raw)? * KM,
        "transit.spacing_km" => cfg.transit.spacing_m = parse_f64(raw)? * KM,
        "transit.target_sinr_db" => cfg.transit.target_sinr_db = parse_f64(raw)?,
        "transit.with_interference" => cfg.transit.with_interference = parse_bool(raw)?,
        "transit.interferer_for_macro_km" => {
            cfg.transit.interferer_for_macro_m = parse_f64(raw)? * KM
        }
        "transit.interferer_for_small_km" => {
            cfg.transit.interferer_for_small_m = parse_f64(raw)? * KM
        }
        "zones.macro_radius_km" => cfg.zones.macro_radius_m = parse_f64(raw)? * KM,
        "zones.small_cell_distance_km" => cfg.zones.small_cell_distance_m = parse_f64(raw)? * KM,
        "zones.device_distances_km" => {
            cfg.zones.device_distances_m =
                parse_list_f64(raw)?.into_iter().map(|d| d * KM).collect()
        }
        "zones.thresholds_dbm" => cfg.zones.thresholds_dbm = parse_list_f64(raw)?,
        "region.samples" => cfg.region.n_samples = parse_u64(raw)?,
        "compare.d_m_km" => {
            cfg.compare.d_m_m = parse_list_f64(raw)?.into_iter().map(|d| d * KM).collect()
        }
        "compare.ds_over_dm" => cfg.compare.ds_over_dm = parse_list_f64(raw)?,
        "compare.alphas" => cfg.compare.alphas = parse_list_f64(raw)?,
        "compare.p0_dbm" => cfg.compare.p0_dbm = parse_list_f64(raw)?,
        "compare.num_rbs" => {
            cfg.compare.num_rbs = raw.split(',').map(parse_u32).collect::<Result<_, _>>()?
        }
        "compare.lambda_dbm" => cfg.compare.lambda_dbm = parse_f64(raw)?,
        "seed" => cfg.seed = parse_u64(raw)?,
        _ => return Err(format!("unknown key '{key}'")),
    }
    Ok(())
}

/// The default configuration with full default provenance, used when no
/// config file is given.
pub fn default_config() -> ScenarioConfig {
    let mut cfg = ScenarioConfig::default();
    for (key, note) in KEYS {
        cfg.provenance.insert((*key).into(), (*note).into());
    }
    cfg
}

/// Parses a config file on top of the defaults. Unknown keys, duplicate
/// keys, malformed values, and invariant violations all fail with the
/// offending line number.
pub fn parse_config(path: &Path) -> Result<ScenarioConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config '{}': {e}", path.display())))?;
    parse_config_str(&text, &path.display().to_string())
}

/// Parser over in-memory text; `origin` names the source in messages.
pub fn parse_config_str(text: &str, origin: &str) -> Result<ScenarioConfig, CliError> {
    let mut cfg = ScenarioConfig::default();
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Config(format!(
                "{origin}:{line_no}: expected 'key = value', got '{line}'"
            ))
        })?;
        let key = key.trim();
        let value = value.trim();
        if !KEYS.iter().any(|(k, _)| *k == key) {
            return Err(CliError::Config(format!(
                "{origin}:{line_no}: unknown key '{key}'"
            )));
        }
        if let Some(first) = seen.insert(key.to_string(), line_no) {
            return Err(CliError::Config(format!(
                "{origin}:{line_no}: duplicate key '{key}' (first set on line {first})"
            )));
        }
        apply_key(&mut cfg, key, value)
            .map_err(|msg| CliError::Config(format!("{origin}:{line_no}: {key}: {msg}")))?;
    }

    cfg.validate()
        .map_err(|e| CliError::Config(format!("{origin}: invalid configuration: {e}")))?;

    for (key, note) in KEYS {
        let entry = match seen.get(*key) {
            Some(line) => format!("set ({origin} line {line})"),
            None => (*note).to_string(),
        };
        cfg.provenance.insert((*key).into(), entry);
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_gives_full_defaults() {
        let cfg = parse_config_str("", "test").unwrap();
        assert_eq!(cfg, {
            let mut d = default_config();
            // parse_config_str and default_config fill identical notes.
            d.provenance = cfg.provenance.clone();
            d
        });
        assert_eq!(cfg.pc.pmax_dbm, 23.0);
        assert_eq!(cfg.layout.macro_radio.coverage_radius_m, 1000.0);
        assert!(cfg.provenance["pc.pmax_dbm"].contains("23 dBm"));
    }

    #[test]
    fn comments_and_overrides() {
        let text = "\n# power control\npc.alpha = 0.8  # fractional\nseed=7\nmobility.speed_classes_kmph = 10, 20\n";
        let cfg = parse_config_str(text, "test").unwrap();
        assert_eq!(cfg.pc.alpha, 0.8);
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.mobility.speed_classes_mps, vec![10.0 / 3.6, 20.0 / 3.6]);
        assert!(cfg.provenance["pc.alpha"].contains("line 3"));
        assert!(cfg.provenance["pc.p0_dbm"].contains("default -80"));
    }

    #[test]
    fn unknown_key_is_named_with_line() {
        let err = parse_config_str("betta = 0.5", "cfg").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("betta"), "{msg}");
        assert!(msg.contains("cfg:1"), "{msg}");
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn alpha_out_of_range_is_line_precise() {
        let err = parse_config_str("pc.alpha = 1.5", "cfg").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("cfg:1"), "{msg}");
        assert!(msg.contains("(0, 1]"), "{msg}");
    }

    #[test]
    fn duplicate_and_malformed_lines_fail() {
        let err = parse_config_str("seed = 1\nseed = 2", "cfg").unwrap_err();
        assert!(err.to_string().contains("duplicate"), "{err}");
        let err = parse_config_str("just words", "cfg").unwrap_err();
        assert!(err.to_string().contains("key = value"), "{err}");
        let err = parse_config_str("pc.alpha = fast", "cfg").unwrap_err();
        assert!(err.to_string().contains("expected a number"), "{err}");
    }

    #[test]
    fn cross_field_validation_still_applies() {
        // Small cell pushed outside Macro coverage.
        let err = parse_config_str("layout.small_cell_distance_km = 2.0", "cfg").unwrap_err();
        assert!(err.to_string().contains("invalid configuration"), "{err}");
    }

    #[test]
    fn distances_convert_from_km() {
        let cfg = parse_config_str(
            "zones.device_distances_km = 0.5,0.6\ntransit.spacing_km = 0.002",
            "cfg",
        )
        .unwrap();
        assert_eq!(cfg.zones.device_distances_m, vec![500.0, 600.0]);
        assert_eq!(cfg.transit.spacing_m, 2.0);
    }

    #[test]
    fn every_registered_key_applies_cleanly() {
        // Exercise each key once with a value accepted by its parser.
        let sample: Vec<(&str, &str)> = vec![
            ("layout.macro_dl_dbm", "41"),
            ("layout.small_dl_dbm", "21"),
            ("layout.macro_radius_km", "1.2"),
            ("layout.small_radius_km", "0.04"),
            ("layout.small_cell_distance_km", "0.7"),
            ("pc.p0_dbm", "-78"),
            ("pc.alpha", "0.9"),
            ("pc.pmax_dbm", "24"),
            ("pc.num_rbs", "5"),
            ("pc.noise_dbm", "-100"),
            ("pc.mode", "literal"),
            ("d2d.pair_density_per_km2", "50"),
            ("mobility.step_mean_km", "0.02"),
            ("mobility.speed_classes_kmph", "15,25"),
            ("mobility.heading_halfwidth_rad", "0.5"),
            ("mobility.devices_per_class", "10"),
            ("mobility.max_time_s", "1000"),
            ("mobility.start_inner_frac", "0.5"),
            ("mobility.start_outer_frac", "0.8"),
            ("mobility.start_half_angle_rad", "0.9"),
            ("mobility.refine_crossings", "true"),
            ("transit.speeds_kmph", "40,50"),
            ("transit.start_km", "0.2"),
            ("transit.end_km", "0.65"),
            ("transit.spacing_km", "0.005"),
            ("transit.target_sinr_db", "3"),
            ("transit.with_interference", "true"),
            ("transit.interferer_for_macro_km", "0.72"),
            ("transit.interferer_for_small_km", "0.25"),
            ("zones.macro_radius_km", "0.9"),
            ("zones.small_cell_distance_km", "0.85"),
            ("zones.device_distances_km", "0.55,0.7"),
            ("zones.thresholds_dbm", "-85,-92"),
            ("region.samples", "5000"),
            ("compare.d_m_km", "0.3"),
            ("compare.ds_over_dm", "0.5"),
            ("compare.alphas", "0.6"),
            ("compare.p0_dbm", "-75"),
            ("compare.num_rbs", "2,4"),
            ("compare.lambda_dbm", "-88"),
            ("seed", "9"),
        ];
        assert_eq!(sample.len(), KEYS.len(), "sample must cover the registry");
        let text: String = sample.iter().map(|(k, v)| format!("{k} = {v}\n")).collect();
        let cfg = parse_config_str(&text, "cfg").unwrap();
        for (key, _) in KEYS {
            assert!(
                cfg.provenance[*key].starts_with("set ("),
                "{key} should be marked as user-set"
            );
        }
    }
}
