//! Scenarios shipped with the binary.

pub const NAMES: [&str; 3] = ["mimo2x2_16qam", "sdc_5mhz", "integrated_switch"];

pub fn get(name: &str) -> Option<&'static str> {
    Some(match name {
        "mimo2x2_16qam" => include_str!("../scenarios/mimo2x2_16qam.json"),
        "sdc_5mhz" => include_str!("../scenarios/sdc_5mhz.json"),
        "integrated_switch" => include_str!("../scenarios/integrated_switch.json"),
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::Scenario;

    #[test]
    fn all_bundled_parse_and_validate() {
        for name in NAMES {
            let s = Scenario::from_json_str(get(name).unwrap()).unwrap();
            assert_eq!(s.name, name);
            assert_eq!(s.validate(), vec![], "{name}");
        }
    }
}
