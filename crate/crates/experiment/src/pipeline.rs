use std::collections::{BTreeMap, BTreeSet};
use std::time::Duration;

use chrono::{DateTime, FixedOffset};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::json;
use upsell_core::campaign::{
    CampaignMessage, CampaignStore, Channel, DeliveryEvent, MessageDraft, MessageStats,
    MessageStatus,
};
use upsell_core::domain::ReservationNumber;
use upsell_core::influence::{
    categorize_guest, InfluentialModel, MessageDirective, PersuasionCategory, QuizAnswerSheet,
    QuizDefinition,
};
use upsell_core::prompt::{generate_copies, AdCopy, AdCopySpec, GenerationOptions, MockBackend};

use crate::population::synthetic_quiz;
use crate::HarnessError;

/// The service operations a run needs, either wired in-process or over HTTP.
pub trait Pipeline {
    fn categorize(&mut self, sheet: &QuizAnswerSheet) -> Result<PersuasionCategory, HarnessError>;
    fn directive(&mut self, reservation: &ReservationNumber) -> Result<MessageDirective, HarnessError>;
    fn suggest(&mut self, spec: &AdCopySpec) -> Result<Vec<AdCopy>, HarnessError>;
    fn create_message(&mut self, draft: &MessageDraft) -> Result<CampaignMessage, HarnessError>;
    /// Stores `variants`, picks the first, puts it on `channel` and enables it.
    fn publish(&mut self, id: &str, variants: Vec<AdCopy>, channel: Channel) -> Result<CampaignMessage, HarnessError>;
    fn record(&mut self, event: &DeliveryEvent) -> Result<(), HarnessError>;
    fn stats(&mut self, id: &str) -> Result<MessageStats, HarnessError>;
}

/// Core library calls against an in-memory campaign store and the mock
/// text backend.
pub struct InProcessPipeline {
    model: InfluentialModel,
    quiz: QuizDefinition,
    backend: MockBackend,
    store: CampaignStore,
    guests: BTreeMap<ReservationNumber, PersuasionCategory>,
    now: DateTime<FixedOffset>,
}

impl InProcessPipeline {
    pub fn new(taxonomy: &str, mock_seed: u64) -> Result<Self, HarnessError> {
        let model = InfluentialModel::preset(taxonomy)?;
        let quiz = synthetic_quiz(&model.taxonomy);
        Ok(Self {
            model,
            quiz,
            backend: MockBackend::new(mock_seed),
            store: CampaignStore::in_memory(),
            guests: BTreeMap::new(),
            now: DateTime::parse_from_rfc3339("2024-05-01T09:00:00+02:00").expect("valid instant"),
        })
    }
}

impl Pipeline for InProcessPipeline {
    fn categorize(&mut self, sheet: &QuizAnswerSheet) -> Result<PersuasionCategory, HarnessError> {
        let category = categorize_guest(sheet, &self.quiz, &self.model.taxonomy)?;
        self.guests.insert(sheet.reservation.clone(), category.clone());
        Ok(category)
    }

    fn directive(&mut self, reservation: &ReservationNumber) -> Result<MessageDirective, HarnessError> {
        let category = self.guests.get(reservation).ok_or_else(|| HarnessError::Service {
            status: 404,
            body: format!("guest {reservation} has not taken the quiz"),
        })?;
        Ok(self.model.directive_for(category))
    }

    fn suggest(&mut self, spec: &AdCopySpec) -> Result<Vec<AdCopy>, HarnessError> {
        Ok(generate_copies(spec, &self.backend, GenerationOptions::default())?)
    }

    fn create_message(&mut self, draft: &MessageDraft) -> Result<CampaignMessage, HarnessError> {
        Ok(self.store.create_message(draft.clone(), self.now)?)
    }

    fn publish(&mut self, id: &str, variants: Vec<AdCopy>, channel: Channel) -> Result<CampaignMessage, HarnessError> {
        self.store.set_variants(id, None, variants, self.now)?;
        self.store.choose_variant(id, Some(1), self.now)?;
        self.store.set_channels(id, BTreeSet::from([channel]), self.now)?;
        Ok(self.store.set_status(id, MessageStatus::Enabled, self.now)?)
    }

    fn record(&mut self, event: &DeliveryEvent) -> Result<(), HarnessError> {
        self.store.record_event(event.clone())?;
        Ok(())
    }

    fn stats(&mut self, id: &str) -> Result<MessageStats, HarnessError> {
        Ok(self.store.message_stats(id)?)
    }
}

/// A running upsell service. The service must be configured with the
/// synthetic quiz (see `experiment quiz`) and must know the accommodation.
pub struct HttpPipeline {
    base: String,
    client: reqwest::blocking::Client,
}

impl HttpPipeline {
    pub fn new(base: impl Into<String>) -> Result<Self, HarnessError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(30))
            .build()
            .map_err(|e| HarnessError::ServiceUnreachable(e.to_string()))?;
        Ok(Self {
            base: base.into().trim_end_matches('/').to_string(),
            client,
        })
    }

    fn send<T: DeserializeOwned>(&self, request: reqwest::blocking::RequestBuilder) -> Result<T, HarnessError> {
        let response = request.send().map_err(|e| {
            if e.is_connect() || e.is_timeout() {
                HarnessError::ServiceUnreachable(e.to_string())
            } else {
                HarnessError::Service { status: 0, body: e.to_string() }
            }
        })?;
        let status = response.status();
        let body = response
            .text()
            .map_err(|e| HarnessError::ServiceUnreachable(e.to_string()))?;
        if !status.is_success() {
            return Err(HarnessError::Service { status: status.as_u16(), body });
        }
        serde_json::from_str(&body).map_err(|e| HarnessError::Service {
            status: status.as_u16(),
            body: format!("{e}: {body}"),
        })
    }

    fn get<T: DeserializeOwned>(&self, path: &str) -> Result<T, HarnessError> {
        self.send(self.client.get(format!("{}{path}", self.base)))
    }

    fn post<T: DeserializeOwned>(&self, path: &str, body: &impl Serialize) -> Result<T, HarnessError> {
        self.send(self.client.post(format!("{}{path}", self.base)).json(body))
    }

    fn put<T: DeserializeOwned>(&self, path: &str, body: &impl Serialize) -> Result<T, HarnessError> {
        self.send(self.client.put(format!("{}{path}", self.base)).json(body))
    }
}

impl Pipeline for HttpPipeline {
    fn categorize(&mut self, sheet: &QuizAnswerSheet) -> Result<PersuasionCategory, HarnessError> {
        self.post(&format!("/guests/{}/quiz", sheet.reservation), sheet)
    }

    fn directive(&mut self, reservation: &ReservationNumber) -> Result<MessageDirective, HarnessError> {
        self.get(&format!("/guests/{reservation}/directive"))
    }

    fn suggest(&mut self, spec: &AdCopySpec) -> Result<Vec<AdCopy>, HarnessError> {
        self.post("/ads/suggest", spec)
    }

    fn create_message(&mut self, draft: &MessageDraft) -> Result<CampaignMessage, HarnessError> {
        self.post("/messages", draft)
    }

    fn publish(&mut self, id: &str, variants: Vec<AdCopy>, channel: Channel) -> Result<CampaignMessage, HarnessError> {
        let _: CampaignMessage = self.put(&format!("/messages/{id}/variants"), &json!({ "spec": null, "variants": variants }))?;
        let _: CampaignMessage = self.put(&format!("/messages/{id}/variant"), &json!({ "chosenVariant": 1 }))?;
        let _: CampaignMessage = self.put(&format!("/messages/{id}/channels"), &json!({ "channels": [channel] }))?;
        self.put(&format!("/messages/{id}/status"), &json!({ "status": "enabled" }))
    }

    fn record(&mut self, event: &DeliveryEvent) -> Result<(), HarnessError> {
        let _: MessageStats = self.post("/events", event)?;
        Ok(())
    }

    fn stats(&mut self, id: &str) -> Result<MessageStats, HarnessError> {
        self.get(&format!("/messages/{id}/stats"))
    }
}
