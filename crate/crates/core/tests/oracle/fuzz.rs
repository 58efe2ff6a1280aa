//! Random accommodations for exclusion and determinism checks.

use std::collections::BTreeMap;
use std::fmt::Write;

use chrono::{DateTime, Duration, FixedOffset, NaiveDate};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use upsell_core::domain::{
    serialize_recommendation, AccommodationId, Attribute, Catalog, CatalogItem, ItemCategory,
    ItemId, Level, Order, PriceBuckets, Rating, RatingsMatrix, RecommendationKind,
    ReservationNumber, Stars, AttributeVector, WinePreferenceProfile,
};
use upsell_core::recommend::{
    complete_order_iicf, recommend_cbr, recommend_iicf, recommend_kbr, recommend_pop,
    recommend_uucf, update_state, Recommendation, RecommendError, RecommenderConfig,
};

const BUCKETS: [&str; 3] = ["less_60", "60_120", "over_120"];

pub fn acm() -> AccommodationId {
    AccommodationId::new("fuzz").unwrap()
}

pub fn epoch() -> DateTime<FixedOffset> {
    DateTime::parse_from_rfc3339("2024-03-01T12:00:00+01:00").unwrap()
}

pub fn random_wine(rng: &mut ChaCha8Rng, id: &str) -> CatalogItem {
    let attributes: BTreeMap<Attribute, Level> = Attribute::ALL
        .iter()
        .map(|&a| (a, Level::new(rng.gen_range(1..=3)).unwrap()))
        .collect();
    CatalogItem {
        id: ItemId::new(id).unwrap(),
        accommodation: acm(),
        category: ItemCategory::Wine,
        attributes,
        price_bucket: BUCKETS[rng.gen_range(0..3)].to_string(),
        display_name: id.to_string(),
    }
}

pub fn random_profile(rng: &mut ChaCha8Rng, reservation: &str) -> WinePreferenceProfile {
    let mut levels = [1u8; 10];
    for l in &mut levels {
        *l = rng.gen_range(1..=3);
    }
    WinePreferenceProfile {
        accommodation: acm(),
        reservation: ReservationNumber::new(reservation).unwrap(),
        profile_name: "guest".into(),
        preferences: AttributeVector::from_levels(levels).unwrap(),
        price: PriceBuckets::default().bucket(BUCKETS[rng.gen_range(0..3)]).unwrap(),
        captured_at: epoch(),
    }
}

pub struct World {
    pub catalog: Catalog,
    pub ratings: Vec<Rating>,
    pub purchases: Vec<Order>,
    pub orders: Vec<Order>,
    pub profiles: Vec<WinePreferenceProfile>,
}

pub fn random_world(seed: u64) -> World {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_items = rng.gen_range(1..=12);
    let ids: Vec<String> = (0..n_items).map(|i| format!("IT_{i:02}")).collect();
    let items = ids.iter().map(|id| random_wine(&mut rng, id)).collect();
    let catalog = Catalog::new(acm(), items).unwrap();
    let guests: Vec<String> = (0..rng.gen_range(1..=8)).map(|g| (1000 + g).to_string()).collect();

    let mut ratings = Vec::new();
    for _ in 0..rng.gen_range(0..=40) {
        ratings.push(Rating {
            reservation: ReservationNumber::new(guests.choose(&mut rng).unwrap()).unwrap(),
            item: ItemId::new(ids.choose(&mut rng).unwrap()).unwrap(),
            stars: Stars::new(rng.gen_range(1..=5)).unwrap(),
            at: epoch() + Duration::minutes(rng.gen_range(0..600)),
        });
    }
    let order = |rng: &mut ChaCha8Rng| {
        let len = rng.gen_range(1..=n_items.min(4));
        let lines = ids
            .choose_multiple(rng, len)
            .map(|id| ItemId::new(id).unwrap())
            .collect();
        Order {
            accommodation: acm(),
            reservation: ReservationNumber::new(guests.choose(rng).unwrap()).unwrap(),
            lines,
            opened_at: epoch(),
        }
    };
    let purchases = (0..rng.gen_range(0..=30)).map(|_| order(&mut rng)).collect();
    let orders = (0..3).map(|_| order(&mut rng)).collect();
    let profiles = guests.iter().map(|g| random_profile(&mut rng, g)).collect();
    World {
        catalog,
        ratings,
        purchases,
        orders,
        profiles,
    }
}

fn stamp() -> chrono::NaiveDateTime {
    NaiveDate::from_ymd_opt(2024, 3, 1)
        .unwrap()
        .and_hms_micro_opt(12, 0, 0, 123456)
        .unwrap()
}

fn emit(out: &mut String, reservation: &ReservationNumber, kind: RecommendationKind, recs: &[Recommendation]) {
    let items: Vec<ItemId> = recs.iter().map(|r| r.item.clone()).collect();
    out.push_str(&serialize_recommendation(&acm(), &items, reservation, kind, stamp()));
    for r in recs {
        write!(out, " {:.17}", r.score).unwrap();
    }
    out.push('\n');
}

/// Runs every recommender on the world for `seed`, checking that no result
/// contains an item the guest rated (cbr, uucf, iicf) or already ordered
/// (pos). Returns the serialized results for determinism comparisons.
pub fn exclusion_case(seed: u64) -> Result<String, String> {
    let world = random_world(seed);
    let cfg = RecommenderConfig::default();
    let matrix = RatingsMatrix::from_ratings(&world.ratings);
    let snapshot = update_state(&acm(), &world.ratings, &world.purchases, &cfg, epoch());
    let mut out = snapshot.to_json();

    for profile in &world.profiles {
        let recs = recommend_kbr(profile, &world.catalog, 5, 0.5).map_err(|e| e.to_string())?;
        emit(&mut out, &profile.reservation, RecommendationKind::Kbr, &recs);

        let rated: Vec<ItemId> = matrix
            .rated_by(&profile.reservation)
            .into_iter()
            .map(|(item, _)| item.clone())
            .collect();
        match recommend_cbr(&profile.reservation, &matrix, &world.catalog, 5) {
            Ok(recs) => {
                if let Some(bad) = recs.iter().find(|r| rated.contains(&r.item)) {
                    return Err(format!("seed {seed}: cbr returned rated {}", bad.item));
                }
                emit(&mut out, &profile.reservation, RecommendationKind::Cbr, &recs);
            }
            Err(RecommendError::ColdStartNoRatings) => out.push_str("cold\n"),
            Err(e) => return Err(format!("seed {seed}: cbr {e}")),
        }
    }
    for (kind, lists) in [
        (RecommendationKind::Uucf, recommend_uucf(&matrix, &cfg, 5)),
        (RecommendationKind::Iicf, recommend_iicf(&matrix, &cfg, 5)),
    ] {
        for (reservation, recs) in &lists {
            for r in recs {
                if matrix.get(reservation, &r.item).is_some() {
                    return Err(format!("seed {seed}: {kind:?} returned rated {}", r.item));
                }
            }
            emit(&mut out, reservation, kind, recs);
        }
    }
    for order in &world.orders {
        let recs = complete_order_iicf(order, &snapshot, 5).map_err(|e| e.to_string())?;
        let pop = recommend_pop(order, &snapshot, 5);
        for r in recs.iter().chain(&pop) {
            if order.contains(&r.item) {
                return Err(format!("seed {seed}: pos returned ordered {}", r.item));
            }
        }
        emit(&mut out, &order.reservation, RecommendationKind::PosIicf, &recs);
        emit(&mut out, &order.reservation, RecommendationKind::PosPop, &pop);
    }
    Ok(out)
}
