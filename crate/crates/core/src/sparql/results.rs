use serde_json::{json, Map, Value};

use super::SolutionTable;
use crate::term::Term;
use crate::vocab::xsd;

/// W3C SPARQL 1.1 JSON results document. Unbound variables are omitted from
/// their binding object.
pub fn to_json_results(table: &SolutionTable) -> Value {
    let bindings: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            let mut obj = Map::new();
            for (name, term) in table.variables.iter().zip(row) {
                if let Some(term) = term {
                    obj.insert(name.clone(), term_json(term));
                }
            }
            Value::Object(obj)
        })
        .collect();
    json!({ "head": { "vars": table.variables }, "results": { "bindings": bindings } })
}

fn term_json(term: &Term) -> Value {
    match term {
        Term::Iri(iri) => json!({ "type": "uri", "value": iri.as_str() }),
        Term::Blank(label) => json!({ "type": "bnode", "value": label }),
        Term::Literal(lit) => {
            let mut obj = Map::new();
            obj.insert("type".into(), "literal".into());
            obj.insert("value".into(), lit.lexical().into());
            if let Some(lang) = lit.language() {
                obj.insert("xml:lang".into(), lang.into());
            } else if lit.datatype().as_str() != xsd::STRING {
                obj.insert("datatype".into(), lit.datatype().as_str().into());
            }
            Value::Object(obj)
        }
    }
}
