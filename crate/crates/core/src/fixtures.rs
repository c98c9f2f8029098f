//! The bundled cyber-system fixtures, compiled in.

use crate::mapping::ModelDocument;
use crate::specified_model::MisdSpec;

pub const MINI_CCO_TTL: &str = include_str!("../../../fixtures/mini_cco.ttl");
pub const DEFII_TTL: &str = include_str!("../../../fixtures/defii.ttl");
pub const CYBER_SYSTEM_JSON: &str = include_str!("../../../fixtures/cyber_system.json");
pub const CYBER_SYSTEM_INFERRED_JSON: &str = include_str!("../../../fixtures/cyber_system_inferred.json");
pub const CVSS_MISD_JSON: &str = include_str!("../../../fixtures/cvss_misd.json");
pub const SEEDED_QUERY_TEXT: &str = include_str!("../../../fixtures/seeded_vulnerability.rq");

/// `(name, turtle text)` for every bundled ontology document.
pub const ONTOLOGIES: &[(&str, &str)] = &[("mini_cco.ttl", MINI_CCO_TTL), ("defii.ttl", DEFII_TTL)];

pub fn cyber_system() -> ModelDocument {
    ModelDocument::from_json(CYBER_SYSTEM_JSON).expect("bundled fixture parses")
}

/// Same model, but the browser carries a subclass stereotype so its
/// `InternetExplorerWebBrowser` typing exists only after reasoning.
pub fn cyber_system_inferred() -> ModelDocument {
    ModelDocument::from_json(CYBER_SYSTEM_INFERRED_JSON).expect("bundled fixture parses")
}

pub fn cvss_misd() -> MisdSpec {
    MisdSpec::from_json(CVSS_MISD_JSON).expect("bundled fixture parses")
}

/// The seeded-vulnerability query with other version/patch constants.
pub fn seeded_query_with(version: i64, patch: i64) -> String {
    SEEDED_QUERY_TEXT
        .replace("BIND(100 AS ?cyberVersion)", &format!("BIND({version} AS ?cyberVersion)"))
        .replace("BIND(104 AS ?cyberPatch)", &format!("BIND({patch} AS ?cyberPatch)"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_misd_matches_model_document() {
        let doc = cyber_system();
        assert_eq!(doc.misds.len(), 1);
        assert_eq!(MisdSpec::from_value(&doc.misds[0]).unwrap(), cvss_misd());
        assert!(doc.violations().is_empty());
        assert!(cyber_system_inferred().violations().is_empty());
    }

    #[test]
    fn one_internet_explorer_stereotype() {
        let n = cyber_system()
            .elements
            .iter()
            .filter(|e| e.stereotypes.iter().any(|s| s == "InternetExplorerWebBrowser"))
            .count();
        assert_eq!(n, 1);
    }

    #[test]
    fn query_substitution() {
        assert!(seeded_query_with(99, 104).contains("BIND(99 AS ?cyberVersion)"));
        assert_eq!(seeded_query_with(100, 104), SEEDED_QUERY_TEXT);
    }
}
