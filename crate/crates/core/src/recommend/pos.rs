use crate::domain::{Order, RecommendationKind};

use super::{rank, ModelSnapshot, Recommendation, RecommendError};

/// Completes an order with items that are bought together with its lines.
///
/// `score(c) = Σ_l co(c, l) / pop(l)` over order lines `l`, i.e. the summed
/// share of each line's purchases that also contained `c`. Items already in
/// the order and items with no co-purchase evidence are skipped.
pub fn complete_order_iicf(
    order: &Order,
    snapshot: &ModelSnapshot,
    top_n: usize,
) -> Result<Vec<Recommendation>, RecommendError> {
    if order.accommodation != snapshot.accommodation {
        return Err(RecommendError::StaleSnapshot {
            expected: order.accommodation.clone(),
            found: snapshot.accommodation.clone(),
        });
    }
    let mut scored = Vec::new();
    for candidate in snapshot.popularity.keys() {
        if order.contains(candidate) {
            continue;
        }
        let Some(partners) = snapshot.co_purchase.get(candidate) else {
            continue;
        };
        let mut score = 0.0;
        let mut supporting = 0;
        for line in &order.lines {
            let together = partners.get(line).copied().unwrap_or(0);
            let bought = snapshot.popularity.get(line).copied().unwrap_or(0);
            if together > 0 && bought > 0 {
                score += together as f64 / bought as f64;
                supporting += 1;
            }
        }
        if supporting > 0 {
            scored.push(Recommendation {
                item: candidate.clone(),
                score,
                kind: RecommendationKind::PosIicf,
                explain: format!("bought with {supporting} of the order's items"),
            });
        }
    }
    Ok(rank(scored, top_n))
}

/// Best sellers that are not already in the order.
pub fn recommend_pop(order: &Order, snapshot: &ModelSnapshot, top_n: usize) -> Vec<Recommendation> {
    let candidates = snapshot
        .popularity
        .iter()
        .filter(|(item, count)| **count > 0 && !order.contains(item))
        .map(|(item, count)| Recommendation {
            item: item.clone(),
            score: *count as f64,
            kind: RecommendationKind::PosPop,
            explain: format!("purchased {count} times"),
        })
        .collect();
    rank(candidates, top_n)
}

#[cfg(test)]
mod tests {
    use chrono::DateTime;

    use super::*;
    use crate::domain::{AccommodationId, ItemId, ReservationNumber};

    fn order(acm: &str, lines: &[&str]) -> Order {
        Order {
            accommodation: AccommodationId::new(acm).unwrap(),
            reservation: ReservationNumber::new("1").unwrap(),
            lines: lines.iter().map(|l| ItemId::new(*l).unwrap()).collect(),
            opened_at: DateTime::parse_from_rfc3339("2024-01-01T20:00:00+02:00").unwrap(),
        }
    }

    fn snapshot(pop: &[(&str, u64)], co: &[(&str, &str, u64)]) -> ModelSnapshot {
        let mut s = ModelSnapshot::empty(
            AccommodationId::new("smp").unwrap(),
            DateTime::parse_from_rfc3339("2024-01-01T00:00:00+00:00").unwrap(),
        );
        for (item, count) in pop {
            s.popularity.insert(ItemId::new(*item).unwrap(), *count);
        }
        for (a, b, count) in co {
            let (a, b) = (ItemId::new(*a).unwrap(), ItemId::new(*b).unwrap());
            s.co_purchase.entry(a.clone()).or_default().insert(b.clone(), *count);
            s.co_purchase.entry(b).or_default().insert(a, *count);
        }
        s
    }

    #[test]
    fn dominant_dessert_first() {
        let s = snapshot(
            &[("M", 12), ("D", 10), ("E", 2)],
            &[("D", "M", 10), ("E", "M", 2)],
        );
        let recs = complete_order_iicf(&order("smp", &["M"]), &s, 5).unwrap();
        let ids: Vec<&str> = recs.iter().map(|r| r.item.as_str()).collect();
        assert_eq!(ids, ["D", "E"]);
    }

    #[test]
    fn full_order_gets_nothing() {
        let s = snapshot(&[("M", 3), ("D", 2)], &[("D", "M", 2)]);
        assert!(complete_order_iicf(&order("smp", &["M", "D"]), &s, 5)
            .unwrap()
            .is_empty());
        assert!(recommend_pop(&order("smp", &["M", "D"]), &s, 5).is_empty());
    }

    #[test]
    fn wrong_accommodation() {
        let s = snapshot(&[], &[]);
        assert!(matches!(
            complete_order_iicf(&order("other", &["M"]), &s, 5),
            Err(RecommendError::StaleSnapshot { .. })
        ));
    }

    #[test]
    fn popularity_excludes_order() {
        let s = snapshot(&[("A", 9), ("B", 5), ("C", 1)], &[]);
        let recs = recommend_pop(&order("smp", &["A"]), &s, 5);
        let ids: Vec<&str> = recs.iter().map(|r| r.item.as_str()).collect();
        assert_eq!(ids, ["B", "C"]);
        assert!(recommend_pop(&order("smp", &["A"]), &snapshot(&[], &[]), 5).is_empty());
    }
}
