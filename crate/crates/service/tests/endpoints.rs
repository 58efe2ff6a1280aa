mod common;

use std::collections::BTreeMap;

use common::{fixture_config, fixture_json, items, json, Server, ACM};
use serde_json::{json, Value};
use upsell_core::domain::{
    parse_recommendation, Catalog, CatalogItem, ItemId, Rating, RatingsMatrix, RecommendationKind,
    ReservationNumber, Stars,
};
use upsell_core::recommend::{recommend_cbr, recommend_iicf, recommend_uucf, RecommenderConfig};

const SAMPLE_RESPONSE: &str = r#"{ "accommodationId": "smp", "recommendedWines": ["DI_MIN_PAL_WIN_46", "DI_MIN_PAL_WIN_33"], "reservationNumber": "151792", "timestamp": "2018-07-10T11:44:12.856229", "type": "kbr"}"#;

async fn fixture_server() -> (tempfile::TempDir, Server) {
    let dir = tempfile::tempdir().unwrap();
    let server = Server::start(&fixture_config(dir.path())).await;
    (dir, server)
}

fn fixture_ratings() -> Vec<Rating> {
    serde_json::from_value(fixture_json("ratings.json")).unwrap()
}

fn fixture_catalog() -> Catalog {
    let items: Vec<CatalogItem> = serde_json::from_value(fixture_json("catalog.json")).unwrap();
    Catalog::new("smp".parse().unwrap(), items).unwrap()
}

fn engine_lists(
    map: BTreeMap<ReservationNumber, Vec<upsell_core::recommend::Recommendation>>,
) -> BTreeMap<String, Vec<String>> {
    map.into_iter()
        .map(|(r, recs)| (r.to_string(), recs.into_iter().map(|x| x.item.to_string()).collect()))
        .collect()
}

fn served_lists(body: &Value) -> BTreeMap<String, Vec<String>> {
    body.as_object()
        .unwrap()
        .iter()
        .map(|(r, doc)| {
            assert_eq!(doc["reservationNumber"], r.as_str());
            (r.clone(), items(doc))
        })
        .collect()
}

fn order(reservation: &str, lines: &[&str]) -> Value {
    json!({
        "accommodationId": ACM,
        "reservationNumber": reservation,
        "lines": lines,
        "openedAt": "2018-07-10T20:00:00+03:00",
    })
}

#[tokio::test]
async fn kbr_reproduces_the_recorded_response() {
    let (_dir, server) = fixture_server().await;
    let response = server.get("/wine/kbr?acm=smp&reservation=151792&limit=2").await;
    assert_eq!(response.status(), 200);
    assert_eq!(response.headers()["content-type"], "application/json");
    let body = response.text().await.unwrap();
    assert_eq!(body, SAMPLE_RESPONSE);
    let doc = parse_recommendation(&body).unwrap();
    assert_eq!(doc.kind, RecommendationKind::Kbr);
    assert_eq!(doc.items, [ItemId::new("DI_MIN_PAL_WIN_46").unwrap(), ItemId::new("DI_MIN_PAL_WIN_33").unwrap()]);

    let (status, problem) = json(server.get("/wine/kbr?acm=smp&reservation=4711").await).await;
    assert_eq!(status, 404);
    assert_eq!(problem["code"], "NoProfile");
    let (status, problem) = json(server.get("/wine/kbr?acm=xyz&reservation=151792").await).await;
    assert_eq!((status, problem["code"].as_str()), (404, Some("UnknownAccommodation")));
    assert_eq!(server.get("/wine/kbr?acm=smp").await.status(), 422);
    assert_eq!(server.get("/wine/kbr?acm=smp&reservation=151792&limit=0").await.status(), 422);
    server.stop().await;
}

#[tokio::test]
async fn posted_profile_is_served() {
    let (_dir, server) = fixture_server().await;
    let profile = json!({
        "accommodationId": "smp", "reservationNumber": "200001", "profileName": "Nikos",
        "preferences": { "color": 3, "tannins": 3, "fruitness": 3, "acidity": 1, "body": 3,
            "earthy": 3, "spices": 3, "herbal": 1, "floral": 1, "oaky": 3, "price": "over_120" },
        "dateTime": "2018-07-09T10:00:00.000+03:00"
    });
    assert_eq!(server.post("/wine/profiles", &profile).await.status(), 201);
    let (status, doc) = json(server.get("/wine/kbr?acm=smp&reservation=200001&limit=1").await).await;
    assert_eq!(status, 200);
    assert_eq!(items(&doc), ["DI_MIN_PAL_WIN_64"]);

    let mut bad = profile.clone();
    bad["preferences"]["price"] = json!("free");
    assert_eq!(server.post("/wine/profiles", &bad).await.status(), 422);
    server.stop().await;
}

#[tokio::test]
async fn cbr_and_its_fallbacks() {
    let (_dir, server) = fixture_server().await;
    let matrix = RatingsMatrix::from_ratings(&fixture_ratings());
    let expected: Vec<String> = recommend_cbr(&"151792".parse().unwrap(), &matrix, &fixture_catalog(), 5)
        .unwrap()
        .into_iter()
        .map(|r| r.item.to_string())
        .collect();
    let response = server.get("/wine/cbr?acm=smp&reservation=151792").await;
    assert!(response.headers().get("x-upsell-explain").is_none());
    let (status, doc) = json(response).await;
    assert_eq!(status, 200);
    assert_eq!(doc["type"], "cbr");
    assert_eq!(items(&doc), expected);

    let response = server.get("/wine/cbr?acm=smp&reservation=777").await;
    assert!(response.headers().get("x-upsell-explain").is_some());
    let (status, doc) = json(response).await;
    assert_eq!(status, 200);
    assert_eq!(doc["type"], "pos_pop");
    assert!(!items(&doc).is_empty());

    for wine in ["DI_MIN_PAL_WIN_46", "DI_MIN_PAL_WIN_12"] {
        let rating = json!({ "reservationNumber": "778", "item": wine, "stars": 3 });
        assert_eq!(server.post("/ratings?acm=smp", &rating).await.status(), 201);
    }
    let (_, doc) = json(server.get("/wine/cbr?acm=smp&reservation=778").await).await;
    assert_eq!(doc["type"], "pos_pop");
    let listed = items(&doc);
    assert!(!listed.contains(&"DI_MIN_PAL_WIN_46".to_string()));
    server.stop().await;
}

#[tokio::test]
async fn collaborative_lists_match_the_engine() {
    let (_dir, server) = fixture_server().await;
    let config = RecommenderConfig::default();
    let ratings = fixture_ratings();
    let matrix = RatingsMatrix::from_ratings(&ratings);

    let (status, body) = json(server.get("/wine/uucf?acm=smp").await).await;
    assert_eq!(status, 200);
    assert_eq!(served_lists(&body), engine_lists(recommend_uucf(&matrix, &config, 5)));
    let (_, body) = json(server.get("/wine/iicf?acm=smp").await).await;
    assert_eq!(served_lists(&body), engine_lists(recommend_iicf(&matrix, &config, 5)));
    server.stop().await;
}

#[tokio::test]
async fn a_new_rating_moves_a_neighbor() {
    let (_dir, server) = fixture_server().await;
    let config = RecommenderConfig::default();
    let ratings = fixture_ratings();
    let before = engine_lists(recommend_uucf(&RatingsMatrix::from_ratings(&ratings), &config, 5));
    let wines: Vec<String> = fixture_catalog().wines().map(|w| w.id.to_string()).collect();

    // First unrated (guest, wine, stars) whose addition changes some other
    // guest's list according to the engine.
    let mut pick = None;
    'search: for guest in before.keys() {
        for wine in &wines {
            if ratings.iter().any(|r| r.reservation.as_str() == guest && r.item.as_str() == wine) {
                continue;
            }
            for stars in [1u8, 5] {
                let mut extended = ratings.clone();
                extended.push(Rating {
                    reservation: guest.parse().unwrap(),
                    item: ItemId::new(wine.as_str()).unwrap(),
                    stars: Stars::new(i64::from(stars)).unwrap(),
                    at: common::sample_instant(),
                });
                let after = engine_lists(recommend_uucf(&RatingsMatrix::from_ratings(&extended), &config, 5));
                if before.iter().any(|(g, list)| g != guest && after.get(g) != Some(list)) {
                    pick = Some((guest.clone(), wine.clone(), stars, after));
                    break 'search;
                }
            }
        }
    }
    let (guest, wine, stars, after) = pick.expect("fixture has a rating that moves a neighbor");

    let (_, served) = json(server.get("/wine/uucf?acm=smp").await).await;
    assert_eq!(served_lists(&served), before);
    let rating = json!({ "reservationNumber": guest, "item": wine, "stars": stars });
    assert_eq!(server.post("/ratings?acm=smp", &rating).await.status(), 201);
    let (_, served) = json(server.get("/wine/uucf?acm=smp").await).await;
    assert_eq!(served_lists(&served), after);

    let unknown = json!({ "reservationNumber": "1", "item": "NOPE", "stars": 4 });
    assert_eq!(server.post("/ratings?acm=smp", &unknown).await.status(), 422);
    let out_of_range = json!({ "reservationNumber": "1", "item": "DI_MIN_PAL_WIN_46", "stars": 6 });
    assert_eq!(server.post("/ratings?acm=smp", &out_of_range).await.status(), 422);
    server.stop().await;
}

#[tokio::test]
async fn order_completion() {
    let (_dir, server) = fixture_server().await;

    // Recount co-purchases with the main course straight from the fixture.
    let mut together: BTreeMap<String, usize> = BTreeMap::new();
    for order in fixture_json("purchases.json").as_array().unwrap() {
        let lines: Vec<&str> = order["lines"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
        if lines.contains(&"DI_MIN_PAL_MAIN_01") {
            for line in lines.iter().filter(|l| **l != "DI_MIN_PAL_MAIN_01") {
                *together.entry(line.to_string()).or_default() += 1;
            }
        }
    }
    let best = together.iter().max_by_key(|(item, n)| (**n, std::cmp::Reverse(*item))).unwrap().0;
    assert_eq!(best, "DI_MIN_PAL_DES_01");

    let (status, doc) = json(server.post("/pos/iicf", &order("9001", &["DI_MIN_PAL_MAIN_01"])).await).await;
    assert_eq!(status, 200);
    assert_eq!(doc["type"], "pos_iicf");
    let listed = items(&doc);
    assert_eq!(&listed[0], best);
    assert!(!listed.contains(&"DI_MIN_PAL_MAIN_01".to_string()));
    assert!(listed.iter().all(|i| together.contains_key(i)));

    let everything: Vec<String> = fixture_catalog().items().iter().map(|i| i.id.to_string()).collect();
    let all: Vec<&str> = everything.iter().map(String::as_str).collect();
    let (_, doc) = json(server.post("/pos/iicf", &order("9002", &all)).await).await;
    assert!(items(&doc).is_empty());
    let (_, doc) = json(server.post("/pos/pop", &order("9002", &all)).await).await;
    assert!(items(&doc).is_empty());

    let (status, doc) = json(server.post("/pos/pop", &order("9003", &["DI_MIN_PAL_MAIN_01"])).await).await;
    assert_eq!(status, 200);
    assert_eq!(doc["type"], "pos_pop");
    assert!(!items(&doc).contains(&"DI_MIN_PAL_MAIN_01".to_string()));

    assert_eq!(server.post("/pos/iicf", &json!({ "accommodationId": "smp" })).await.status(), 422);
    assert_eq!(server.post("/pos/iicf", &order("9004", &[])).await.status(), 422);
    let dup = order("9005", &["DI_MIN_PAL_MAIN_01", "DI_MIN_PAL_MAIN_01"]);
    assert_eq!(server.post("/pos/iicf", &dup).await.status(), 422);
    let response = server
        .http
        .post(server.url("/pos/iicf"))
        .header("content-type", "application/json")
        .body("{not json")
        .send()
        .await
        .unwrap();
    assert_eq!(response.status(), 422);
    server.stop().await;
}

#[tokio::test]
async fn update_state_counts_ingested_feedback() {
    let (_dir, server) = fixture_server().await;
    let fixture_count = fixture_ratings().len();
    assert_eq!(server.post("/pos/update_state?acm=nowhere", &json!(null)).await.status(), 404);

    let rating = json!({ "reservationNumber": "300", "item": "DI_MIN_PAL_WIN_21", "stars": 4 });
    assert_eq!(server.post("/ratings?acm=smp", &rating).await.status(), 201);
    let purchase = order("300", &["DI_MIN_PAL_MAIN_02", "DI_MIN_PAL_DES_02"]);
    assert_eq!(server.post("/pos/purchases", &purchase).await.status(), 201);

    let later = chrono::DateTime::parse_from_rfc3339("2018-07-11T09:00:00+03:00").unwrap();
    server.clock.set(later);
    let (status, body) = json(server.post("/pos/update_state?acm=smp", &json!(null)).await).await;
    assert_eq!(status, 200);
    assert_eq!(body["sourceRatingCount"], fixture_count + 1);
    assert_eq!(body["builtAt"], "2018-07-11T09:00:00+03:00");

    let (_, snapshot) = json(server.get("/pos/snapshot?acm=smp").await).await;
    assert_eq!(snapshot["sourceRatingCount"], fixture_count + 1);
    server.stop().await;
}

#[tokio::test]
async fn ad_suggestions_match_the_frozen_mock_output() {
    let (_dir, server) = fixture_server().await;
    let golden_path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/golden/couples_massage_seed7.json");
    let golden: Value = serde_json::from_str(&std::fs::read_to_string(golden_path).unwrap()).unwrap();
    let (status, copies) = json(server.post("/ads/suggest", &golden["spec"]).await).await;
    assert_eq!(status, 200);
    assert_eq!(copies, golden["copies"]);

    let mut none = golden["spec"].clone();
    none["copies"] = json!(0);
    let (status, problem) = json(server.post("/ads/suggest", &none).await).await;
    assert_eq!((status, problem["code"].as_str()), (422, Some("InvalidSpec")));
    server.stop().await;
}

#[tokio::test]
async fn quiz_assigns_a_category() {
    let (_dir, server) = fixture_server().await;
    let urgent = json!({ "answers": [
        { "question": "q1", "option": "a" },
        { "question": "q2", "option": "a" },
        { "question": "q3", "option": "a" },
    ]});
    let (status, category) = json(server.post("/guests/151792/quiz", &urgent).await).await;
    assert_eq!(status, 200);
    assert_eq!(category, json!({ "emotion": "Fear", "subEmotion": "Urgency", "principle": "scarcity" }));
    let (status, guest) = json(server.get("/guests/151792").await).await;
    assert_eq!(status, 200);
    assert_eq!(guest["persuasion"], category);
    let (status, directive) = json(server.get("/guests/151792/directive").await).await;
    assert_eq!(status, 200);
    assert_eq!(directive["category"], category);

    let (status, problem) = json(server.post("/guests/5/quiz", &json!({ "answers": [] })).await).await;
    assert_eq!((status, problem["code"].as_str()), (422, Some("EmptySheet")));
    let unknown = json!({ "answers": [{ "question": "q9", "option": "a" }] });
    assert_eq!(server.post("/guests/5/quiz", &unknown).await.status(), 422);
    let mismatch = json!({ "reservationNumber": "6", "answers": [{ "question": "q1", "option": "a" }] });
    assert_eq!(server.post("/guests/5/quiz", &mismatch).await.status(), 422);
    assert_eq!(server.get("/guests/999999").await.status(), 404);
    server.stop().await;
}

#[tokio::test]
async fn campaign_lifecycle() {
    let (_dir, server) = fixture_server().await;
    let draft = json!({ "accommodationId": "smp", "name": "Spa week", "title": { "en": "<b>Relax</b> now" } });
    let (status, message) = json(server.post("/messages", &draft).await).await;
    assert_eq!(status, 201);
    let id = message["id"].as_str().unwrap().to_string();
    let (_, listed) = json(server.get("/messages?acm=smp").await).await;
    assert_eq!(listed, json!([message.clone()]));
    let (_, fetched) = json(server.get(&format!("/messages/{id}")).await).await;
    assert_eq!(fetched, message);
    let (status, problem) = json(server.post("/messages", &draft).await).await;
    assert_eq!((status, problem["code"].as_str()), (409, Some("DuplicateName")));

    let enable = json!({ "status": "enabled" });
    let (status, problem) = json(server.put(&format!("/messages/{id}/status"), &enable).await).await;
    assert_eq!((status, problem["code"].as_str()), (409, Some("InvariantViolation")));

    let (_, copies) = json(server.post("/ads/suggest", &json!({
        "task": "a special offer of -20%", "topic": "Couples Massage", "emotion": "urgency",
        "tone": "friendly", "language": "English", "lengthWords": 12, "includeEmoticon": false
    })).await).await;
    let body = json!({ "spec": null, "variants": copies });
    assert_eq!(server.put(&format!("/messages/{id}/variants"), &body).await.status(), 200);
    let pick = json!({ "chosenVariant": 2 });
    assert_eq!(server.put(&format!("/messages/{id}/variant"), &pick).await.status(), 200);
    let channels = json!({ "channels": ["wifi", "tv"] });
    assert_eq!(server.put(&format!("/messages/{id}/channels"), &channels).await.status(), 200);
    let title = json!({ "title": "<i>Entspannen</i>" });
    assert_eq!(server.put(&format!("/messages/{id}/translations/de"), &title).await.status(), 200);
    let bad_title = json!({ "title": "<script>x</script>" });
    assert_eq!(server.put(&format!("/messages/{id}/translations/de"), &bad_title).await.status(), 422);
    let (status, enabled) = json(server.put(&format!("/messages/{id}/status"), &enable).await).await;
    assert_eq!(status, 200);
    assert_eq!(enabled["status"], "enabled");
    let (status, _) = json(server.put(&format!("/messages/{id}/channels"), &json!({ "channels": [] })).await).await;
    assert_eq!(status, 409);

    let event = |reservation: &str, kind: &str| {
        json!({ "message": id, "reservationNumber": reservation, "kind": kind, "at": "2018-07-10T12:00:00+03:00" })
    };
    let (status, problem) = json(server.post("/events", &event("1", "conversion")).await).await;
    assert_eq!((status, problem["code"].as_str()), (409, Some("OrphanConversion")));
    for guest in 0..20 {
        assert_eq!(server.post("/events", &event(&guest.to_string(), "impression")).await.status(), 201);
    }
    assert_eq!(server.post("/events", &event("3", "click")).await.status(), 201);
    assert_eq!(server.post("/events", &event("3", "conversion")).await.status(), 201);
    let (_, stats) = json(server.get(&format!("/messages/{id}/stats")).await).await;
    assert_eq!(stats, json!({ "impressions": 20, "clicks": 1, "conversions": 1, "conversionRate": 0.05 }));
    let (_, guest) = json(server.get("/guests/3").await).await;
    assert_eq!(guest["direct"].as_array().unwrap().len(), 3);

    assert_eq!(server.get("/messages/smp-9999").await.status(), 404);
    assert_eq!(server.post("/messages", &json!({ "accommodationId": "zzz", "name": "x" })).await.status(), 404);
    server.stop().await;
}

#[tokio::test]
async fn reads_are_repeatable() {
    let (_dir, server) = fixture_server().await;
    for path in [
        "/wine/kbr?acm=smp&reservation=151792",
        "/wine/cbr?acm=smp&reservation=151792",
        "/wine/uucf?acm=smp",
        "/wine/iicf?acm=smp",
        "/pos/snapshot?acm=smp",
        "/messages?acm=smp",
        "/healthz",
    ] {
        let first = server.get(path).await.text().await.unwrap();
        let second = server.get(path).await.text().await.unwrap();
        assert_eq!(first, second, "{path}");
    }
    assert_eq!(server.get("/no/such/thing").await.status(), 404);
    server.stop().await;
}
