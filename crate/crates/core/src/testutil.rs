use crate::vocab::Vocabulary;

/// Small hand-built vocabulary shared by unit tests.
pub(crate) fn people() -> Vocabulary {
    let mut b = Vocabulary::builder();
    b.concept("Top", Vec::<String>::new())
        .concept("Person", ["Top"])
        .concept("Place", ["Top"])
        .concept("City", ["Place"])
        .concept("Village", ["Place"])
        .relation("link", Vec::<String>::new(), ["Top", "Top"])
        .relation("livesIn", ["link"], ["Person", "Place"])
        .relation("bornIn", ["livesIn"], ["Person", "City"])
        .relation("near", ["link"], ["Place", "Place"])
        .relation("named", Vec::<String>::new(), ["Top"])
        .marker("paris", "City")
        .marker("lyon", "City")
        .marker("ann", "Person");
    b.build().unwrap()
}
