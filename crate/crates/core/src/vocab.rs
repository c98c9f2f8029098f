//! Vocabulary IRIs used across the engine.

pub mod rdf {
    pub const NS: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
    pub const TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
    pub const LANG_STRING: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";
}

pub mod rdfs {
    pub const NS: &str = "http://www.w3.org/2000/01/rdf-schema#";
    pub const CLASS: &str = "http://www.w3.org/2000/01/rdf-schema#Class";
    pub const SUB_CLASS_OF: &str = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
    pub const SUB_PROPERTY_OF: &str = "http://www.w3.org/2000/01/rdf-schema#subPropertyOf";
    pub const DOMAIN: &str = "http://www.w3.org/2000/01/rdf-schema#domain";
    pub const RANGE: &str = "http://www.w3.org/2000/01/rdf-schema#range";
    pub const LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";
}

pub mod owl {
    pub const NS: &str = "http://www.w3.org/2002/07/owl#";
    pub const CLASS: &str = "http://www.w3.org/2002/07/owl#Class";
    pub const OBJECT_PROPERTY: &str = "http://www.w3.org/2002/07/owl#ObjectProperty";
    pub const DATATYPE_PROPERTY: &str = "http://www.w3.org/2002/07/owl#DatatypeProperty";
    pub const TRANSITIVE_PROPERTY: &str = "http://www.w3.org/2002/07/owl#TransitiveProperty";
    pub const SYMMETRIC_PROPERTY: &str = "http://www.w3.org/2002/07/owl#SymmetricProperty";
    pub const FUNCTIONAL_PROPERTY: &str = "http://www.w3.org/2002/07/owl#FunctionalProperty";
    pub const INVERSE_FUNCTIONAL_PROPERTY: &str =
        "http://www.w3.org/2002/07/owl#InverseFunctionalProperty";
    pub const INVERSE_OF: &str = "http://www.w3.org/2002/07/owl#inverseOf";
    pub const SAME_AS: &str = "http://www.w3.org/2002/07/owl#sameAs";
}

pub mod xsd {
    pub const NS: &str = "http://www.w3.org/2001/XMLSchema#";
    pub const STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
    pub const BOOLEAN: &str = "http://www.w3.org/2001/XMLSchema#boolean";
    pub const INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";
    pub const DECIMAL: &str = "http://www.w3.org/2001/XMLSchema#decimal";
    pub const DOUBLE: &str = "http://www.w3.org/2001/XMLSchema#double";
    pub const FLOAT: &str = "http://www.w3.org/2001/XMLSchema#float";

    const INTEGER_DERIVED: &[&str] = &[
        "int", "long", "short", "byte", "nonNegativeInteger", "positiveInteger",
        "nonPositiveInteger", "negativeInteger", "unsignedInt", "unsignedLong",
        "unsignedShort", "unsignedByte",
    ];

    pub fn is_integer(datatype: &str) -> bool {
        datatype == INTEGER
            || datatype
                .strip_prefix(NS)
                .is_some_and(|local| INTEGER_DERIVED.contains(&local))
    }

    pub fn is_numeric(datatype: &str) -> bool {
        is_integer(datatype) || datatype == DECIMAL || datatype == DOUBLE || datatype == FLOAT
    }
}

/// Source-graph vocabulary for raw tool data.
pub mod tool {
    pub const NS: &str = "http://defii.org/tool#";
    pub const HAS_NAME: &str = "http://defii.org/tool#hasName";
    pub const HAS_KIND: &str = "http://defii.org/tool#hasKind";
    pub const HAS_TOOL: &str = "http://defii.org/tool#hasTool";
    pub const HAS_ELEMENT: &str = "http://defii.org/tool#hasElement";
    pub const ELEMENT_ID: &str = "http://defii.org/tool#elementId";
    pub const ORDINAL: &str = "http://defii.org/tool#ordinal";
    pub const APPLIED_STEREOTYPE: &str = "http://defii.org/tool#appliedStereotype";
    pub const HAS_VALUE_PROPERTY: &str = "http://defii.org/tool#hasValueProperty";
    pub const VALUE_TYPE: &str = "http://defii.org/tool#valueType";
    pub const HAS_SLOT: &str = "http://defii.org/tool#hasSlot";
    pub const SLOT_PROPERTY: &str = "http://defii.org/tool#slotProperty";
    pub const SLOT_VALUE: &str = "http://defii.org/tool#slotValue";
    pub const HAS_PART: &str = "http://defii.org/tool#hasPart";
    pub const CLASSIFIED_BY: &str = "http://defii.org/tool#classifiedBy";
    pub const MISD_DOCUMENT: &str = "http://defii.org/tool#misdDocument";
    pub const MODEL: &str = "http://defii.org/tool#Model";
}

/// Framework vocabulary: back-links and specified-model bookkeeping.
pub mod defii {
    pub const NS: &str = "http://defii.org/ontology#";
    pub const MAPPED_FROM: &str = "http://defii.org/ontology#mappedFrom";
    pub const MODEL_SPECIFICATION: &str = "http://defii.org/ontology#ModelSpecification";
    pub const MODEL_INSTANCE: &str = "http://defii.org/ontology#ModelInstance";
    pub const INSTANCE_OF: &str = "http://defii.org/ontology#instanceOf";
    pub const HAS_PORT: &str = "http://defii.org/ontology#hasPort";
    pub const PORT_NAME: &str = "http://defii.org/ontology#portName";
    pub const PORT_DIRECTION: &str = "http://defii.org/ontology#portDirection";
}

/// Common Core terms the mapping rules emit.
pub mod cco {
    pub const NS: &str = "http://www.ontologyrepository.com/CommonCoreOntologies/";
    pub const DIRECTIVE_ICE: &str =
        "http://www.ontologyrepository.com/CommonCoreOntologies/DirectiveInformationContentEntity";
    pub const PRESCRIBES: &str = "http://www.ontologyrepository.com/CommonCoreOntologies/prescribes";
    pub const DESIGNATED_BY: &str =
        "http://www.ontologyrepository.com/CommonCoreOntologies/designated_by";
}

/// Test ontology namespace used by the bundled fixtures.
pub mod test {
    pub const NS: &str = "http://testontology.org/test#";
    pub const HAS_VALUE: &str = "http://testontology.org/test#has_value";
    pub const PART_OF: &str = "http://testontology.org/test#part_of";
}

/// Named graphs.
pub mod graph {
    pub const NS: &str = "urn:defii:graph:";
    pub const SOURCE: &str = "urn:defii:graph:source";
    pub const MAPPED: &str = "urn:defii:graph:mapped";
}
