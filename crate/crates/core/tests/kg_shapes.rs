mod common;

use std::collections::BTreeSet;

use common::{county_georef, day};
use outagekg_core::ingest::CountyRegistry;
use outagekg_core::kg::{geo, ExternalLinks, KgBuilder, KgConfig, KgError, Vocabulary};
use outagekg_core::model::{FipsCode, OutageMapGrid, OutageRecordRow, PixelState, RadianceGrid, TimeStamp};
use outagekg_core::rdf::{xsd, Term, Triple, RDF_TYPE};

fn builder_with(config: &KgConfig) -> KgBuilder {
    let links = ExternalLinks::new(config, &CountyRegistry::florida()).unwrap();
    KgBuilder::new(config.vocab.clone(), links)
}

fn lee_row() -> OutageRecordRow {
    OutageRecordRow {
        fips: FipsCode::new(12071).unwrap(),
        county: "Lee".into(),
        state: "Florida".into(),
        customers_out: 103485,
        run_start_time: TimeStamp::parse("2022-09-28T15:45:00Z").unwrap(),
    }
}

fn lee_grid() -> RadianceGrid {
    let reg = CountyRegistry::florida();
    let lee = reg.get(FipsCode::new(12071).unwrap()).unwrap();
    RadianceGrid::new(lee.fips, day("2022-09-29"), county_georef(lee, 2, 3), vec![Some(1.0); 6]).unwrap()
}

fn objects<'a>(triples: &'a [Triple], pred: &str) -> Vec<&'a Term> {
    triples.iter().filter(|t| t.predicate_iri() == pred).map(Triple::object).collect()
}

#[test]
fn record_triples_in_full() {
    let b = builder_with(&KgConfig::default());
    let v = b.vocab().clone();
    let triples = b.emit_record(&lee_row()).unwrap();
    let subject = "https://example.org/geooutagekg/outagerecord.12071.2022-09-28T15-45-00Z";
    assert!(triples.iter().all(|t| t.subject_iri() == subject), "{triples:?}");
    assert_eq!(objects(&triples, RDF_TYPE), [&Term::iri(v.geo(geo::OUTAGE_RECORD))]);
    assert_eq!(objects(&triples, &v.geo(geo::CUSTOMERS_OUT)), [&Term::integer(103485)]);
    assert_eq!(
        objects(&triples, &v.geo(geo::RUN_START_TIME)),
        [&Term::typed("2022-09-28T15:45:00Z", xsd::DATE_TIME)]
    );
    assert_eq!(
        objects(&triples, &v.geo(geo::REPRESENTS_COUNTY)),
        [&Term::iri("http://dbpedia.org/resource/Lee_County,_Florida")]
    );
    assert_eq!(objects(&triples, &v.geo(geo::FIPS_CODE)), [&Term::plain("12071")]);
}

#[test]
fn map_links_back_to_its_image() {
    let b = builder_with(&KgConfig::default());
    let v = b.vocab().clone();
    let grid = lee_grid();
    let pixels = vec![PixelState::Severity(0.5), PixelState::Severity(1.0), PixelState::Unlit, PixelState::Missing, PixelState::Severity(0.0), PixelState::Unlit];
    let map = OutageMapGrid::new(grid.fips, grid.date, grid.georef, pixels, Some("Hurricane Ian".into())).unwrap();
    let triples = b.emit_map(&map, "maps/12071/2022-09-29.map.csv").unwrap();
    assert_eq!(objects(&triples, &v.geo(geo::DERIVED_FROM_IMAGE)), [&Term::iri(b.image_iri(&grid))]);
    assert_eq!(objects(&triples, &v.geo(geo::MEAN_SEVERITY)), [&Term::typed("0.5", xsd::DECIMAL)]);
    assert_eq!(objects(&triples, &v.geo(geo::EVENT_LABEL)), [&Term::plain("Hurricane Ian")]);
    let mut unlabelled = map;
    unlabelled.event_label = None;
    assert!(matches!(b.emit_map(&unlabelled, "x"), Err(KgError::MissingEventLabel)));
}

#[test]
fn schema_covers_every_instance_term() {
    let b = builder_with(&KgConfig::default());
    let schema = b.emit_schema();
    let declared: BTreeSet<&str> = schema.iter().map(Triple::subject_iri).collect();
    let grid = lee_grid();
    let map = OutageMapGrid::new(grid.fips, grid.date, grid.georef, vec![PixelState::Unlit; 6], Some("Ian".into())).unwrap();
    let mut instances = b.emit_record(&lee_row()).unwrap();
    instances.extend(b.emit_image(&grid, "ntl/a").unwrap());
    instances.extend(b.emit_map(&map, "maps/a").unwrap());
    for t in &instances {
        let p = t.predicate_iri();
        if b.vocab().is_external_predicate(p) {
            assert!(p == RDF_TYPE || p.starts_with(&b.vocab().ma), "{p}");
        } else if p != RDF_TYPE {
            assert!(declared.contains(p), "undeclared predicate {p}");
        } else {
            let class = t.object().as_iri().unwrap();
            assert!(declared.contains(class), "undeclared class {class}");
        }
    }
}

#[test]
fn configuration_moves_namespaces_and_links() {
    let config = KgConfig::parse(
        "# alternate deployment\n\
         prefix.ex = http://kg.test/id/\n\
         prefix.geo = http://kg.test/onto#\n\
         satellite = http://sat.test/npp\n\
         county.12071 = http://www.wikidata.org/entity/Q488874\n",
    )
    .unwrap();
    let b = builder_with(&config);
    let triples = b.emit_record(&lee_row()).unwrap();
    assert!(triples[0].subject_iri().starts_with("http://kg.test/id/outagerecord."));
    assert!(triples.iter().any(|t| t.predicate_iri() == "http://kg.test/onto#customersOut"));
    assert!(triples.iter().any(|t| t.object() == &Term::iri("http://www.wikidata.org/entity/Q488874")));
    let image = b.emit_image(&lee_grid(), "ntl/a").unwrap();
    assert!(image.iter().any(|t| t.object() == &Term::iri("http://sat.test/npp")));
    assert_eq!(Vocabulary::default().ex, "https://example.org/geooutagekg/");
}

#[test]
fn config_errors_carry_line_numbers() {
    match KgConfig::parse("prefix.ex = http://a/\nnonsense\n") {
        Err(KgError::Config { line, .. }) => assert_eq!(line, 2),
        other => panic!("{other:?}"),
    }
}
