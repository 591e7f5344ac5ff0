//! A hand-built reference vocabulary about people, organizations, places and
//! events, with a handful of γ-CGs over it. Used by the tests, the acceptance
//! harness and the CLI's `--fixture` option.

use std::collections::BTreeSet;

use crate::gamma::{Domain, GammaCG, Variable, VariableTarget};
use crate::graph::{ConceptualGraph, NodeId};
use crate::vocab::{MarkerId, Vocabulary};

const CONCEPTS: &[(&str, &str)] = &[
    ("Entity", "Top"),
    ("Event", "Top"),
    ("Attribute", "Top"),
    ("Agent", "Entity"),
    ("Artifact", "Entity"),
    ("Place", "Entity"),
    ("Person", "Agent"),
    ("Organization", "Agent"),
    ("Student", "Person"),
    ("Researcher", "Person"),
    ("Politician", "Person"),
    ("Company", "Organization"),
    ("University", "Organization"),
    ("Document", "Artifact"),
    ("Product", "Artifact"),
    ("Article", "Document"),
    ("Book", "Document"),
    ("Software", "Product"),
    ("Vehicle", "Product"),
    ("Region", "Place"),
    ("Building", "Place"),
    ("Country", "Region"),
    ("City", "Region"),
    ("Continent", "Region"),
    ("Museum", "Building"),
    ("Hospital", "Building"),
    ("School", "Building"),
    ("SocialEvent", "Event"),
    ("NaturalEvent", "Event"),
    ("Conference", "SocialEvent"),
    ("Election", "SocialEvent"),
    ("Ceremony", "SocialEvent"),
    ("Earthquake", "NaturalEvent"),
    ("Nationality", "Attribute"),
    ("Profession", "Attribute"),
    ("Quantity", "Attribute"),
    ("Date", "Quantity"),
    ("Money", "Quantity"),
];

/// (label, parent, signature); the first entry of each arity is its root.
const RELATIONS: &[(&str, Option<&str>, &[&str])] = &[
    ("link", None, &["Top", "Top"]),
    ("agentRelation", Some("link"), &["Agent", "Top"]),
    ("memberOf", Some("agentRelation"), &["Person", "Organization"]),
    ("worksFor", Some("memberOf"), &["Person", "Company"]),
    ("studiesAt", Some("memberOf"), &["Student", "University"]),
    ("employedBy", Some("memberOf"), &["Researcher", "University"]),
    ("created", Some("agentRelation"), &["Agent", "Artifact"]),
    ("authored", Some("created"), &["Person", "Document"]),
    ("wrote", Some("authored"), &["Researcher", "Article"]),
    ("developed", Some("created"), &["Organization", "Product"]),
    ("involvedIn", Some("agentRelation"), &["Agent", "Top"]),
    ("participatedIn", Some("involvedIn"), &["Agent", "Event"]),
    ("attended", Some("participatedIn"), &["Person", "Conference"]),
    ("candidateIn", Some("participatedIn"), &["Politician", "Election"]),
    ("hasAttribute", Some("involvedIn"), &["Agent", "Attribute"]),
    ("hasNationality", Some("hasAttribute"), &["Person", "Nationality"]),
    ("hasProfession", Some("hasAttribute"), &["Person", "Profession"]),
    ("situated", Some("link"), &["Top", "Place"]),
    ("locatedIn", Some("situated"), &["Entity", "Place"]),
    ("livesIn", Some("locatedIn"), &["Person", "Place"]),
    ("bornIn", Some("livesIn"), &["Person", "City"]),
    ("headquarteredIn", Some("locatedIn"), &["Organization", "City"]),
    ("partOf", Some("locatedIn"), &["Place", "Region"]),
    ("cityOf", Some("partOf"), &["City", "Country"]),
    ("countryOf", Some("partOf"), &["Country", "Continent"]),
    ("occurredIn", Some("situated"), &["Event", "Place"]),
    ("heldIn", Some("occurredIn"), &["Conference", "City"]),
    ("struck", Some("occurredIn"), &["Earthquake", "Region"]),
    ("dated", Some("link"), &["Top", "Date"]),
    ("happenedOn", Some("dated"), &["Event", "Date"]),
    ("property", None, &["Top"]),
    ("famous", Some("property"), &["Agent"]),
    ("international", Some("property"), &["Event"]),
    ("transaction", None, &["Agent", "Agent", "Top"]),
    ("sold", Some("transaction"), &["Organization", "Agent", "Product"]),
];

const MARKERS: &[(&str, &str)] = &[
    ("alice", "Researcher"),
    ("bob", "Student"),
    ("carol", "Politician"),
    ("dave", "Person"),
    ("erin", "Researcher"),
    ("acme", "Company"),
    ("globex", "Company"),
    ("northU", "University"),
    ("southU", "University"),
    ("france", "Country"),
    ("japan", "Country"),
    ("paris", "City"),
    ("lyon", "City"),
    ("tokyo", "City"),
    ("europe", "Continent"),
    ("asia", "Continent"),
    ("kgConf", "Conference"),
    ("vote2022", "Election"),
    ("quake95", "Earthquake"),
    ("paper42", "Article"),
    ("novel7", "Book"),
    ("editorX", "Software"),
    ("roadster", "Vehicle"),
    ("louvre", "Museum"),
    ("french", "Nationality"),
    ("japanese", "Nationality"),
    ("chemist", "Profession"),
    ("d2020", "Date"),
    ("d2021", "Date"),
    ("usd100", "Money"),
];

/// The reference vocabulary: 39 concept types and 35 relation types of arity
/// 1, 2 and 3, both spread over five levels with one to three children per
/// inner type, and 30 markers.
pub fn reference_vocabulary() -> Vocabulary {
    let mut b = Vocabulary::builder();
    b.concept("Top", Vec::<String>::new());
    for &(label, parent) in CONCEPTS {
        b.concept(label, [parent]);
    }
    for &(label, parent, sig) in RELATIONS {
        b.relation(label, parent, sig.iter().copied());
    }
    for &(m, t) in MARKERS {
        b.marker(m, t);
    }
    b.build().expect("reference vocabulary is well formed")
}

#[derive(Clone, Copy)]
enum Var<'a> {
    Rel(usize, &'a [&'a str]),
    Concept(usize, &'a [&'a str]),
    Marker(usize, &'a [&'a str]),
}

/// Builds a γ-CG from labels. Concept nodes get ids in list order, relation
/// nodes follow; variable slots index into the respective list.
fn build(
    vocab: &Vocabulary,
    name: &str,
    concepts: &[(&str, Option<&str>)],
    relations: &[(&str, &[usize])],
    vars: &[Var<'_>],
) -> GammaCG {
    let mut g = ConceptualGraph::new();
    let cs: Vec<NodeId> = concepts
        .iter()
        .map(|&(t, m)| g.add_concept(vocab.lookup_concept(t).expect(t), m.map(MarkerId::new)))
        .collect();
    let rs: Vec<NodeId> = relations
        .iter()
        .map(|&(r, args)| {
            let r = vocab.lookup_relation(r).expect(r);
            g.add_relation(r, args.iter().map(|&i| cs[i]).collect()).expect("arity")
        })
        .collect();
    let mut gcg = GammaCG::new(name, g);
    for &v in vars {
        let (target, domain) = match v {
            Var::Rel(i, vals) => (
                VariableTarget::RelationType(rs[i]),
                Domain::RelationTypes(vals.iter().map(|&l| vocab.lookup_relation(l).expect(l)).collect()),
            ),
            Var::Concept(i, vals) => (
                VariableTarget::ConceptType(cs[i]),
                Domain::ConceptTypes(vals.iter().map(|&l| vocab.lookup_concept(l).expect(l)).collect()),
            ),
            Var::Marker(i, vals) => (
                VariableTarget::Marker(cs[i]),
                Domain::Markers(vals.iter().map(|&m| MarkerId::new(m)).collect::<BTreeSet<_>>()),
            ),
        };
        let name = gcg.fresh_variable_name();
        gcg.variables.push(Variable { name, target, domain });
    }
    gcg
}

/// Ten γ-CGs over [`reference_vocabulary`], each with one to three
/// variables over small domains.
pub fn reference_gammas(vocab: &Vocabulary) -> Vec<GammaCG> {
    use Var::*;
    vec![
        build(
            vocab,
            "employment",
            &[("Person", None), ("Company", None), ("City", None)],
            &[("worksFor", &[0, 1]), ("livesIn", &[0, 2])],
            &[
                Rel(0, &["worksFor", "memberOf", "agentRelation"]),
                Concept(0, &["Person", "Researcher", "Politician"]),
                Concept(2, &["City", "Country"]),
            ],
        ),
        build(
            vocab,
            "birth",
            &[("Person", Some("dave")), ("City", Some("paris"))],
            &[("bornIn", &[0, 1])],
            &[Marker(1, &["paris", "lyon", "tokyo"]), Concept(0, &["Person", "Student"])],
        ),
        build(
            vocab,
            "publication",
            &[("Researcher", None), ("Article", None), ("Date", Some("d2020"))],
            &[("wrote", &[0, 1]), ("dated", &[1, 2])],
            &[Rel(0, &["wrote", "authored"]), Marker(2, &["d2020", "d2021"])],
        ),
        build(
            vocab,
            "conference",
            &[("Person", None), ("Conference", None), ("City", Some("tokyo"))],
            &[("attended", &[0, 1]), ("heldIn", &[1, 2])],
            &[Marker(2, &["tokyo", "paris"]), Concept(0, &["Person", "Researcher", "Student"])],
        ),
        build(
            vocab,
            "election",
            &[
                ("Politician", Some("carol")),
                ("Election", None),
                ("Country", Some("france")),
                ("Nationality", Some("french")),
            ],
            &[("candidateIn", &[0, 1]), ("occurredIn", &[1, 2]), ("hasNationality", &[0, 3])],
            &[Marker(2, &["france", "japan"])],
        ),
        build(
            vocab,
            "company",
            &[("Company", None), ("City", None), ("Product", None)],
            &[("headquarteredIn", &[0, 1]), ("developed", &[0, 2]), ("famous", &[0])],
            &[Concept(2, &["Product", "Software", "Vehicle"]), Rel(1, &["developed", "created"])],
        ),
        build(
            vocab,
            "geography",
            &[("City", Some("lyon")), ("Country", None), ("Continent", None)],
            &[("cityOf", &[0, 1]), ("countryOf", &[1, 2])],
            &[Marker(0, &["lyon", "paris"])],
        ),
        build(
            vocab,
            "study",
            &[("Student", None), ("University", None), ("Profession", None)],
            &[("studiesAt", &[0, 1]), ("hasProfession", &[0, 2])],
            &[Rel(0, &["studiesAt", "memberOf"])],
        ),
        build(
            vocab,
            "sale",
            &[("Company", None), ("Person", None), ("Software", None)],
            &[("sold", &[0, 1, 2])],
            &[Concept(2, &["Software", "Vehicle", "Product"])],
        ),
        build(
            vocab,
            "quake",
            &[("Earthquake", None), ("Region", None), ("Date", None)],
            &[("struck", &[0, 1]), ("happenedOn", &[0, 2])],
            &[Concept(1, &["Region", "Country", "Continent"])],
        ),
    ]
}

/// Two variable-free graphs that share the marker `dave`, typed `Person` on
/// the left and `Researcher` on the right, each with its own neighborhood.
pub fn shared_marker_pair(vocab: &Vocabulary) -> (ConceptualGraph, ConceptualGraph) {
    let left = build(
        vocab,
        "left",
        &[("Person", Some("dave")), ("City", Some("paris"))],
        &[("livesIn", &[0, 1])],
        &[],
    );
    let right = build(
        vocab,
        "right",
        &[("Researcher", Some("dave")), ("Article", Some("paper42"))],
        &[("wrote", &[0, 1])],
        &[],
    );
    (left.graph, right.graph)
}
