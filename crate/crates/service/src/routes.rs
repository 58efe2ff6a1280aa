use std::collections::BTreeSet;
use std::sync::Arc;

use axum::extract::State;
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use chrono::{DateTime, FixedOffset};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use upsell_core::campaign::{
    CampaignMessage, Channel, DeliveryEvent, EventKind, MessageDraft, MessageStatus, RichText,
};
use upsell_core::domain::{
    parse_wine_profile, serialize_recommendation, serialize_wine_profile, AccommodationId,
    GuestProfile, InteractionEvent, InteractionKind, ItemCategory, ItemId, Order, Rating,
    RatingsMatrix, RecommendationDocument, RecommendationKind, ReservationNumber, Stars,
};
use upsell_core::influence::{categorize_guest, QuizAnswer, QuizAnswerSheet};
use upsell_core::prompt::{generate_copies, AdCopy, AdCopySpec, GenerationOptions};
use upsell_core::recommend::{
    complete_order_iicf, popularity_fallback, recommend_cbr, recommend_iicf, recommend_kbr,
    recommend_pop, recommend_uucf, Recommendation, RecommendError,
};

use crate::error::{ApiError, ApiJson, ApiPath, ApiQuery};
use crate::state::{Accommodation, AppState};

/// Header carrying a short note when a fallback answered the request.
pub const EXPLAIN_HEADER: &str = "x-upsell-explain";
const MAX_LIMIT: usize = 100;

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/healthz", get(healthz))
        .route("/wine/kbr", get(wine_kbr))
        .route("/wine/cbr", get(wine_cbr))
        .route("/wine/uucf", get(wine_uucf))
        .route("/wine/iicf", get(wine_iicf))
        .route("/wine/profiles", post(put_profile))
        .route("/ratings", post(add_rating))
        .route("/pos/iicf", post(pos_iicf))
        .route("/pos/pop", post(pos_pop))
        .route("/pos/update_state", post(update_state))
        .route("/pos/snapshot", get(export_snapshot))
        .route("/pos/purchases", post(add_purchase))
        .route("/ads/suggest", post(suggest))
        .route("/guests/{reservation}", get(get_guest))
        .route("/guests/{reservation}/quiz", post(submit_quiz))
        .route("/guests/{reservation}/directive", get(guest_directive))
        .route("/messages", post(create_message).get(list_messages))
        .route("/messages/{id}", get(get_message))
        .route("/messages/{id}/status", put(set_status))
        .route("/messages/{id}/channels", put(set_channels))
        .route("/messages/{id}/variant", put(choose_variant))
        .route("/messages/{id}/variants", put(set_variants))
        .route("/messages/{id}/translations/{lang}", put(set_translation))
        .route("/messages/{id}/stats", get(message_stats))
        .route("/events", post(record_event))
        .fallback(|| async { ApiError::not_found("NoRoute", "no such endpoint") })
        .with_state(state)
}

type ApiResult<T> = Result<T, ApiError>;

#[derive(Debug, Deserialize)]
struct AcmQuery {
    acm: String,
    limit: Option<usize>,
}

#[derive(Debug, Deserialize)]
struct ReservationQuery {
    acm: String,
    reservation: String,
    limit: Option<usize>,
}

#[derive(Debug, Deserialize)]
struct LimitQuery {
    limit: Option<usize>,
}

impl AppState {
    fn lookup(&self, acm: &str) -> ApiResult<Arc<Accommodation>> {
        let id: AccommodationId = acm
            .parse()
            .map_err(|_| ApiError::malformed(format!("invalid accommodation id {acm:?}")))?;
        self.lookup_id(&id)
    }

    fn lookup_id(&self, id: &AccommodationId) -> ApiResult<Arc<Accommodation>> {
        self.accommodation(id)
            .ok_or_else(|| ApiError::not_found("UnknownAccommodation", format!("unknown accommodation {id}")))
    }

    fn limit(&self, requested: Option<usize>) -> ApiResult<usize> {
        match requested {
            None => Ok(self.top_n),
            Some(n) if (1..=MAX_LIMIT).contains(&n) => Ok(n),
            Some(n) => Err(ApiError::malformed(format!("limit must be in 1..={MAX_LIMIT}, got {n}"))),
        }
    }

    fn now(&self) -> DateTime<FixedOffset> {
        self.clock.now()
    }
}

fn reservation(raw: &str) -> ApiResult<ReservationNumber> {
    raw.parse()
        .map_err(|_| ApiError::malformed(format!("invalid reservation number {raw:?}")))
}

fn document(
    state: &AppState,
    acm: &AccommodationId,
    recs: &[Recommendation],
    reservation: &ReservationNumber,
    kind: RecommendationKind,
) -> String {
    let items: Vec<ItemId> = recs.iter().map(|r| r.item.clone()).collect();
    serialize_recommendation(acm, &items, reservation, kind, state.now().naive_local())
}

fn json_text(body: String) -> Response {
    ([(header::CONTENT_TYPE, HeaderValue::from_static("application/json"))], body).into_response()
}

/// Ratings restricted to the accommodation's wines.
fn wine_matrix(acm: &Accommodation) -> RatingsMatrix {
    let data = acm.data();
    let wines: Vec<Rating> = data
        .ratings
        .iter()
        .filter(|r| acm.catalog.get(&r.item).is_some_and(|i| i.category == ItemCategory::Wine))
        .cloned()
        .collect();
    RatingsMatrix::from_ratings(&wines)
}

async fn healthz() -> Json<Value> {
    Json(json!({ "status": "ok" }))
}

async fn wine_kbr(State(state): State<AppState>, ApiQuery(q): ApiQuery<ReservationQuery>) -> ApiResult<Response> {
    let acm = state.lookup(&q.acm)?;
    let reservation = reservation(&q.reservation)?;
    let n = state.limit(q.limit)?;
    let profile = acm.data().profiles.get(&reservation).cloned().ok_or_else(|| {
        ApiError::not_found("NoProfile", format!("no wine profile for reservation {reservation}"))
    })?;
    let recs = recommend_kbr(&profile, &acm.catalog, n, state.recommender.kbr.price_penalty)?;
    Ok(json_text(document(&state, &acm.id, &recs, &reservation, RecommendationKind::Kbr)))
}

async fn wine_cbr(State(state): State<AppState>, ApiQuery(q): ApiQuery<ReservationQuery>) -> ApiResult<Response> {
    let acm = state.lookup(&q.acm)?;
    let reservation = reservation(&q.reservation)?;
    let n = state.limit(q.limit)?;
    let matrix = wine_matrix(&acm);
    match recommend_cbr(&reservation, &matrix, &acm.catalog, n) {
        Ok(recs) => Ok(json_text(document(&state, &acm.id, &recs, &reservation, RecommendationKind::Cbr))),
        Err(RecommendError::ColdStartNoRatings) => {
            let mut recs = popularity_fallback(&matrix, &reservation, usize::MAX);
            recs.truncate(n);
            let body = document(&state, &acm.id, &recs, &reservation, RecommendationKind::PosPop);
            let mut response = json_text(body);
            response.headers_mut().insert(
                EXPLAIN_HEADER,
                HeaderValue::from_static("cold start: no informative ratings, most-rated wines instead"),
            );
            Ok(response)
        }
        Err(err) => Err(err.into()),
    }
}

fn all_reservations(
    state: &AppState,
    acm: &Accommodation,
    lists: std::collections::BTreeMap<ReservationNumber, Vec<Recommendation>>,
    kind: RecommendationKind,
) -> Json<Value> {
    let now = state.now().naive_local();
    let mut out = Map::new();
    for (reservation, recs) in lists {
        // Guests without any neighbor-based prediction are served by the
        // popularity fallback and labelled accordingly.
        let kind = recs.first().map_or(kind, |r| r.kind);
        let doc = RecommendationDocument {
            accommodation: acm.id.clone(),
            items: recs.into_iter().map(|r| r.item).collect(),
            reservation: reservation.clone(),
            timestamp: now,
            kind,
        };
        out.insert(reservation.to_string(), doc.to_value());
    }
    Json(Value::Object(out))
}

async fn wine_uucf(State(state): State<AppState>, ApiQuery(q): ApiQuery<AcmQuery>) -> ApiResult<Json<Value>> {
    let acm = state.lookup(&q.acm)?;
    let n = state.limit(q.limit)?;
    let matrix = wine_matrix(&acm);
    let config = state.recommender.clone();
    let lists = tokio::task::spawn_blocking(move || recommend_uucf(&matrix, &config, n))
        .await
        .map_err(|e| ApiError::internal(e.to_string()))?;
    Ok(all_reservations(&state, &acm, lists, RecommendationKind::Uucf))
}

async fn wine_iicf(State(state): State<AppState>, ApiQuery(q): ApiQuery<AcmQuery>) -> ApiResult<Json<Value>> {
    let acm = state.lookup(&q.acm)?;
    let n = state.limit(q.limit)?;
    let matrix = wine_matrix(&acm);
    let config = state.recommender.clone();
    let lists = tokio::task::spawn_blocking(move || recommend_iicf(&matrix, &config, n))
        .await
        .map_err(|e| ApiError::internal(e.to_string()))?;
    Ok(all_reservations(&state, &acm, lists, RecommendationKind::Iicf))
}

async fn put_profile(State(state): State<AppState>, ApiJson(body): ApiJson<Value>) -> ApiResult<Response> {
    let profile = parse_wine_profile(&body.to_string(), &state.buckets)?;
    let acm = state.lookup_id(&profile.accommodation)?;
    let stored = serialize_wine_profile(&profile, None);
    acm.put_profile(profile).map_err(|e| ApiError::internal(e.to_string()))?;
    let mut response = json_text(stored);
    *response.status_mut() = StatusCode::CREATED;
    Ok(response)
}

#[derive(Debug, Deserialize)]
struct RatingInput {
    #[serde(rename = "reservationNumber")]
    reservation: ReservationNumber,
    item: ItemId,
    stars: Stars,
    at: Option<DateTime<FixedOffset>>,
}

#[derive(Debug, Deserialize)]
struct AcmOnly {
    acm: String,
}

async fn add_rating(
    State(state): State<AppState>,
    ApiQuery(q): ApiQuery<AcmOnly>,
    ApiJson(input): ApiJson<RatingInput>,
) -> ApiResult<(StatusCode, Json<Rating>)> {
    let acm = state.lookup(&q.acm)?;
    if acm.catalog.get(&input.item).is_none() {
        return Err(ApiError::malformed(format!("item {} is not in the catalog", input.item)));
    }
    let rating = Rating {
        reservation: input.reservation,
        item: input.item,
        stars: input.stars,
        at: input.at.unwrap_or_else(|| state.now()),
    };
    acm.add_rating(rating.clone()).map_err(|e| ApiError::internal(e.to_string()))?;
    note_interaction(
        &state,
        &rating.reservation,
        rating.at,
        InteractionKind::Rated { item: rating.item.clone(), stars: rating.stars },
    );
    Ok((StatusCode::CREATED, Json(rating)))
}

fn checked_order(state: &AppState, order: &Order, need_lines: bool) -> ApiResult<Arc<Accommodation>> {
    let acm = state.lookup_id(&order.accommodation)?;
    order.validate()?;
    if need_lines && order.lines.is_empty() {
        return Err(ApiError::malformed("order has no lines"));
    }
    Ok(acm)
}

async fn pos_iicf(
    State(state): State<AppState>,
    ApiQuery(q): ApiQuery<LimitQuery>,
    ApiJson(order): ApiJson<Order>,
) -> ApiResult<Response> {
    let acm = checked_order(&state, &order, true)?;
    let n = state.limit(q.limit)?;
    let recs = complete_order_iicf(&order, &acm.snapshot(), n)?;
    Ok(json_text(document(&state, &acm.id, &recs, &order.reservation, RecommendationKind::PosIicf)))
}

async fn pos_pop(
    State(state): State<AppState>,
    ApiQuery(q): ApiQuery<LimitQuery>,
    ApiJson(order): ApiJson<Order>,
) -> ApiResult<Response> {
    let acm = checked_order(&state, &order, false)?;
    let n = state.limit(q.limit)?;
    let recs = recommend_pop(&order, &acm.snapshot(), n);
    Ok(json_text(document(&state, &acm.id, &recs, &order.reservation, RecommendationKind::PosPop)))
}

async fn add_purchase(State(state): State<AppState>, ApiJson(order): ApiJson<Order>) -> ApiResult<(StatusCode, Json<Order>)> {
    let acm = checked_order(&state, &order, true)?;
    if let Some(unknown) = order.lines.iter().find(|l| acm.catalog.get(l).is_none()) {
        return Err(ApiError::malformed(format!("item {unknown} is not in the catalog")));
    }
    acm.add_purchase(order.clone()).map_err(|e| ApiError::internal(e.to_string()))?;
    Ok((StatusCode::CREATED, Json(order)))
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct RebuildSummary {
    built_at: DateTime<FixedOffset>,
    source_rating_count: usize,
}

async fn update_state(State(state): State<AppState>, ApiQuery(q): ApiQuery<AcmOnly>) -> ApiResult<Json<RebuildSummary>> {
    let acm = state.lookup(&q.acm)?;
    let snapshot = acm.rebuild(&state.recommender, state.now()).await;
    Ok(Json(RebuildSummary {
        built_at: snapshot.built_at,
        source_rating_count: snapshot.source_rating_count,
    }))
}

async fn export_snapshot(State(state): State<AppState>, ApiQuery(q): ApiQuery<AcmOnly>) -> ApiResult<Response> {
    let acm = state.lookup(&q.acm)?;
    Ok(json_text(acm.snapshot().to_json()))
}

#[derive(Debug, Deserialize)]
struct SeedQuery {
    seed: Option<u64>,
}

async fn suggest(
    State(state): State<AppState>,
    ApiQuery(q): ApiQuery<SeedQuery>,
    ApiJson(spec): ApiJson<AdCopySpec>,
) -> ApiResult<Json<Vec<AdCopy>>> {
    spec.validate()?;
    let backend = state.backend.clone();
    let options = GenerationOptions {
        temperature: state.temperature,
        seed: q.seed,
    };
    let copies = tokio::task::spawn_blocking(move || generate_copies(&spec, backend.as_ref(), options))
        .await
        .map_err(|e| ApiError::internal(e.to_string()))??;
    Ok(Json(copies))
}

#[derive(Debug, Deserialize)]
struct QuizSubmission {
    #[serde(rename = "reservationNumber")]
    reservation: Option<ReservationNumber>,
    answers: Vec<QuizAnswer>,
}

async fn submit_quiz(
    State(state): State<AppState>,
    ApiPath(raw): ApiPath<String>,
    ApiJson(body): ApiJson<QuizSubmission>,
) -> ApiResult<Json<Value>> {
    let reservation = reservation(&raw)?;
    if body.reservation.as_ref().is_some_and(|r| *r != reservation) {
        return Err(ApiError::malformed("reservationNumber does not match the path"));
    }
    let sheet = QuizAnswerSheet { reservation: reservation.clone(), answers: body.answers };
    let category = categorize_guest(&sheet, &state.quiz, &state.model.taxonomy)?;
    let mut guests = state.guests.write();
    let guest = guests
        .entry(reservation.clone())
        .or_insert_with(|| GuestProfile::new(reservation));
    guest.indirect = sheet.answers;
    guest.persuasion = Some(category.clone());
    Ok(Json(serde_json::to_value(category).expect("category serializes")))
}

fn guest(state: &AppState, raw: &str) -> ApiResult<GuestProfile> {
    let reservation = reservation(raw)?;
    state
        .guests
        .read()
        .get(&reservation)
        .cloned()
        .ok_or_else(|| ApiError::not_found("UnknownGuest", format!("no profile for reservation {reservation}")))
}

async fn get_guest(State(state): State<AppState>, ApiPath(raw): ApiPath<String>) -> ApiResult<Json<GuestProfile>> {
    Ok(Json(guest(&state, &raw)?))
}

async fn guest_directive(State(state): State<AppState>, ApiPath(raw): ApiPath<String>) -> ApiResult<Json<Value>> {
    let category = guest(&state, &raw)?
        .persuasion
        .ok_or_else(|| ApiError::not_found("NoCategory", "guest has not taken the quiz"))?;
    let directive = state.model.directive_for(&category);
    Ok(Json(serde_json::to_value(directive).expect("directive serializes")))
}

fn note_interaction(state: &AppState, reservation: &ReservationNumber, at: DateTime<FixedOffset>, kind: InteractionKind) {
    let mut guests = state.guests.write();
    let guest = guests
        .entry(reservation.clone())
        .or_insert_with(|| GuestProfile::new(reservation.clone()));
    if guest.record(InteractionEvent { at, kind }).is_err() {
        tracing::debug!(%reservation, "interaction older than the guest's last one; not logged");
    }
}

async fn create_message(
    State(state): State<AppState>,
    ApiJson(draft): ApiJson<MessageDraft>,
) -> ApiResult<(StatusCode, Json<CampaignMessage>)> {
    state.lookup_id(&draft.accommodation)?;
    let now = state.now();
    let message = state.campaigns.lock().create_message(draft, now)?;
    Ok((StatusCode::CREATED, Json(message)))
}

#[derive(Debug, Deserialize)]
struct ListQuery {
    acm: String,
}

async fn list_messages(State(state): State<AppState>, ApiQuery(q): ApiQuery<ListQuery>) -> ApiResult<Json<Vec<CampaignMessage>>> {
    let acm = state.lookup(&q.acm)?;
    let store = state.campaigns.lock();
    Ok(Json(store.list(&acm.id).into_iter().cloned().collect()))
}

async fn get_message(State(state): State<AppState>, ApiPath(id): ApiPath<String>) -> ApiResult<Json<CampaignMessage>> {
    Ok(Json(state.campaigns.lock().get(&id)?.clone()))
}

#[derive(Debug, Deserialize)]
struct StatusBody {
    status: MessageStatus,
}

async fn set_status(
    State(state): State<AppState>,
    ApiPath(id): ApiPath<String>,
    ApiJson(body): ApiJson<StatusBody>,
) -> ApiResult<Json<CampaignMessage>> {
    let now = state.now();
    Ok(Json(state.campaigns.lock().set_status(&id, body.status, now)?))
}

#[derive(Debug, Deserialize)]
struct ChannelsBody {
    channels: BTreeSet<Channel>,
}

async fn set_channels(
    State(state): State<AppState>,
    ApiPath(id): ApiPath<String>,
    ApiJson(body): ApiJson<ChannelsBody>,
) -> ApiResult<Json<CampaignMessage>> {
    let now = state.now();
    Ok(Json(state.campaigns.lock().set_channels(&id, body.channels, now)?))
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase")]
struct VariantBody {
    chosen_variant: Option<u32>,
}

async fn choose_variant(
    State(state): State<AppState>,
    ApiPath(id): ApiPath<String>,
    ApiJson(body): ApiJson<VariantBody>,
) -> ApiResult<Json<CampaignMessage>> {
    let now = state.now();
    Ok(Json(state.campaigns.lock().choose_variant(&id, body.chosen_variant, now)?))
}

#[derive(Debug, Deserialize)]
struct VariantsBody {
    spec: Option<AdCopySpec>,
    variants: Vec<AdCopy>,
}

async fn set_variants(
    State(state): State<AppState>,
    ApiPath(id): ApiPath<String>,
    ApiJson(body): ApiJson<VariantsBody>,
) -> ApiResult<Json<CampaignMessage>> {
    let now = state.now();
    Ok(Json(state.campaigns.lock().set_variants(&id, body.spec, body.variants, now)?))
}

#[derive(Debug, Deserialize)]
struct TitleBody {
    title: RichText,
}

async fn set_translation(
    State(state): State<AppState>,
    ApiPath((id, lang)): ApiPath<(String, String)>,
    ApiJson(body): ApiJson<TitleBody>,
) -> ApiResult<Json<CampaignMessage>> {
    let now = state.now();
    Ok(Json(state.campaigns.lock().set_title(&id, &lang, body.title, now)?))
}

async fn message_stats(State(state): State<AppState>, ApiPath(id): ApiPath<String>) -> ApiResult<Json<Value>> {
    let stats = state.campaigns.lock().message_stats(&id)?;
    Ok(Json(serde_json::to_value(stats).expect("stats serialize")))
}

async fn record_event(
    State(state): State<AppState>,
    ApiJson(event): ApiJson<DeliveryEvent>,
) -> ApiResult<(StatusCode, Json<Value>)> {
    let stats = state.campaigns.lock().record_event(event.clone())?;
    let message = event.message.clone();
    let kind = match event.kind {
        EventKind::Impression => InteractionKind::MessageShown { message },
        EventKind::Click => InteractionKind::MessageClicked { message },
        EventKind::Conversion => InteractionKind::MessageConverted { message },
    };
    note_interaction(&state, &event.reservation, event.at, kind);
    Ok((StatusCode::CREATED, Json(serde_json::to_value(stats).expect("stats serialize"))))
}
