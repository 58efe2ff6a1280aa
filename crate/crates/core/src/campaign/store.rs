use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{DateTime, FixedOffset};
use serde::{Deserialize, Serialize};

use super::{
    CampaignError, CampaignMessage, Channel, DeliveryEvent, EventKind, MessageDraft, MessageStats,
    MessageStatus, RichText,
};
use crate::domain::{AccommodationId, ReservationNumber};
use crate::prompt::{AdCopy, AdCopySpec};

pub const STORE_FORMAT_VERSION: u32 = 1;
pub const MESSAGE_SNAPSHOT_FILE: &str = "messages.snapshot";
pub const EVENT_LOG_FILE: &str = "events.log";

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct SnapshotFile {
    format_version: u32,
    accommodation_id: AccommodationId,
    next_seq: u64,
    messages: Vec<CampaignMessage>,
}

#[derive(Serialize)]
struct LogLineOut<'a> {
    v: u32,
    #[serde(flatten)]
    event: &'a DeliveryEvent,
}

#[derive(Deserialize)]
struct LogLineIn {
    v: u32,
    #[serde(flatten)]
    event: DeliveryEvent,
}

#[derive(Debug, Default)]
struct Ledger {
    next_seq: u64,
    messages: BTreeMap<String, CampaignMessage>,
    stats: BTreeMap<String, MessageStats>,
    shown: HashSet<(String, ReservationNumber)>,
}

impl Ledger {
    fn check_event(&self, event: &DeliveryEvent) -> Result<(), CampaignError> {
        if !self.messages.contains_key(&event.message) {
            return Err(CampaignError::NotFound(event.message.clone()));
        }
        if event.kind == EventKind::Conversion
            && !self
                .shown
                .contains(&(event.message.clone(), event.reservation.clone()))
        {
            return Err(CampaignError::OrphanConversion {
                message: event.message.clone(),
                reservation: event.reservation.to_string(),
            });
        }
        Ok(())
    }

    fn apply_event(&mut self, event: &DeliveryEvent) -> MessageStats {
        if event.kind == EventKind::Impression {
            self.shown
                .insert((event.message.clone(), event.reservation.clone()));
        }
        let stats = self.stats.entry(event.message.clone()).or_default();
        stats.count(event.kind);
        *stats
    }
}

/// Campaign messages and delivery events, grouped by accommodation.
///
/// Built with [`CampaignStore::open`], every change is written through to
/// disk before it becomes visible. [`CampaignStore::in_memory`] keeps
/// everything in process.
#[derive(Debug, Default)]
pub struct CampaignStore {
    root: Option<PathBuf>,
    ledgers: BTreeMap<AccommodationId, Ledger>,
}

impl CampaignStore {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Opens (or creates) a store rooted at `root`, replaying each event log.
    pub fn open(root: impl AsRef<Path>) -> Result<Self, CampaignError> {
        let root = root.as_ref().to_path_buf();
        fs::create_dir_all(&root)?;
        let mut ledgers = BTreeMap::new();
        let mut dirs: Vec<_> = fs::read_dir(&root)?
            .filter_map(|entry| entry.ok())
            .filter(|entry| entry.path().is_dir())
            .collect();
        dirs.sort_by_key(|entry| entry.file_name());
        for entry in dirs {
            let Some(name) = entry.file_name().to_str().map(str::to_string) else {
                continue;
            };
            let Ok(acm) = name.parse::<AccommodationId>() else {
                continue;
            };
            let ledger = load_ledger(&entry.path(), &acm)?;
            ledgers.insert(acm, ledger);
        }
        Ok(Self {
            root: Some(root),
            ledgers,
        })
    }

    pub fn is_persistent(&self) -> bool {
        self.root.is_some()
    }

    pub fn create_message(
        &mut self,
        draft: MessageDraft,
        now: DateTime<FixedOffset>,
    ) -> Result<CampaignMessage, CampaignError> {
        let name = draft.name.trim().to_string();
        if name.is_empty() {
            return Err(CampaignError::Invalid("name is empty".into()));
        }
        for lang in draft.title.keys() {
            check_language(lang)?;
        }
        if let Some(spec) = &draft.spec {
            spec.validate()
                .map_err(|err| CampaignError::Invalid(err.to_string()))?;
        }
        let ledger = self.ledgers.entry(draft.accommodation.clone()).or_default();
        if ledger.messages.values().any(|m| m.name == name) {
            return Err(CampaignError::DuplicateName(name));
        }
        let seq = ledger.next_seq + 1;
        let message = CampaignMessage {
            id: format!("{}-{:04}", draft.accommodation, seq),
            accommodation: draft.accommodation,
            name,
            status: MessageStatus::Paused,
            channels: BTreeSet::new(),
            title: draft.title,
            spec: draft.spec,
            variants: draft.variants,
            chosen_variant: None,
            category: draft.category,
            created_at: now,
            updated_at: now,
        };
        let acm = message.accommodation.clone();
        let mut next = ledger.messages.clone();
        next.insert(message.id.clone(), message.clone());
        self.persist_messages(&acm, seq, &next)?;
        let ledger = self.ledgers.get_mut(&acm).expect("ledger created above");
        ledger.next_seq = seq;
        ledger.messages = next;
        Ok(message)
    }

    pub fn get(&self, id: &str) -> Result<&CampaignMessage, CampaignError> {
        self.ledger_of(id)
            .and_then(|ledger| ledger.messages.get(id))
            .ok_or_else(|| CampaignError::NotFound(id.to_string()))
    }

    /// Messages of one accommodation in id order.
    pub fn list(&self, accommodation: &AccommodationId) -> Vec<&CampaignMessage> {
        self.ledgers
            .get(accommodation)
            .map(|ledger| ledger.messages.values().collect())
            .unwrap_or_default()
    }

    pub fn set_status(
        &mut self,
        id: &str,
        status: MessageStatus,
        now: DateTime<FixedOffset>,
    ) -> Result<CampaignMessage, CampaignError> {
        self.update(id, now, |m| {
            m.status = status;
            Ok(())
        })
    }

    pub fn set_channels(
        &mut self,
        id: &str,
        channels: BTreeSet<Channel>,
        now: DateTime<FixedOffset>,
    ) -> Result<CampaignMessage, CampaignError> {
        self.update(id, now, |m| {
            m.channels = channels;
            Ok(())
        })
    }

    /// Picks the variant (1-based) to deliver, or clears the choice.
    pub fn choose_variant(
        &mut self,
        id: &str,
        variant: Option<u32>,
        now: DateTime<FixedOffset>,
    ) -> Result<CampaignMessage, CampaignError> {
        self.update(id, now, |m| {
            m.chosen_variant = variant;
            Ok(())
        })
    }

    pub fn set_title(
        &mut self,
        id: &str,
        language: &str,
        title: RichText,
        now: DateTime<FixedOffset>,
    ) -> Result<CampaignMessage, CampaignError> {
        check_language(language)?;
        self.update(id, now, |m| {
            m.title.insert(language.to_string(), title);
            Ok(())
        })
    }

    /// Replaces the generated variants. The previous choice is cleared, so an
    /// enabled message must be paused first.
    pub fn set_variants(
        &mut self,
        id: &str,
        spec: Option<AdCopySpec>,
        variants: Vec<AdCopy>,
        now: DateTime<FixedOffset>,
    ) -> Result<CampaignMessage, CampaignError> {
        if let Some(spec) = &spec {
            spec.validate()
                .map_err(|err| CampaignError::Invalid(err.to_string()))?;
        }
        self.update(id, now, |m| {
            if spec.is_some() {
                m.spec = spec;
            }
            m.variants = variants;
            m.chosen_variant = None;
            Ok(())
        })
    }

    /// Appends a delivery event and returns the message's updated counters.
    pub fn record_event(&mut self, event: DeliveryEvent) -> Result<MessageStats, CampaignError> {
        let acm = self
            .acm_of(&event.message)
            .ok_or_else(|| CampaignError::NotFound(event.message.clone()))?;
        let ledger = self
            .ledgers
            .get(&acm)
            .ok_or_else(|| CampaignError::NotFound(event.message.clone()))?;
        ledger.check_event(&event)?;
        if let Some(root) = &self.root {
            let dir = root.join(acm.as_str());
            fs::create_dir_all(&dir)?;
            let mut line = serde_json::to_string(&LogLineOut {
                v: STORE_FORMAT_VERSION,
                event: &event,
            })
            .map_err(|err| CampaignError::Io(err.to_string()))?;
            line.push('\n');
            let mut file = OpenOptions::new()
                .create(true)
                .append(true)
                .open(dir.join(EVENT_LOG_FILE))?;
            file.write_all(line.as_bytes())?;
            file.flush()?;
        }
        let ledger = self.ledgers.get_mut(&acm).expect("checked above");
        Ok(ledger.apply_event(&event))
    }

    pub fn message_stats(&self, id: &str) -> Result<MessageStats, CampaignError> {
        let ledger = self
            .ledger_of(id)
            .filter(|ledger| ledger.messages.contains_key(id))
            .ok_or_else(|| CampaignError::NotFound(id.to_string()))?;
        Ok(ledger.stats.get(id).copied().unwrap_or_default())
    }

    fn update(
        &mut self,
        id: &str,
        now: DateTime<FixedOffset>,
        change: impl FnOnce(&mut CampaignMessage) -> Result<(), CampaignError>,
    ) -> Result<CampaignMessage, CampaignError> {
        let acm = self
            .acm_of(id)
            .ok_or_else(|| CampaignError::NotFound(id.to_string()))?;
        let ledger = &self.ledgers[&acm];
        let mut message = ledger
            .messages
            .get(id)
            .cloned()
            .ok_or_else(|| CampaignError::NotFound(id.to_string()))?;
        change(&mut message)?;
        message
            .check_invariants()
            .map_err(CampaignError::InvariantViolation)?;
        message.updated_at = now;
        let mut next = ledger.messages.clone();
        next.insert(id.to_string(), message.clone());
        let seq = ledger.next_seq;
        self.persist_messages(&acm, seq, &next)?;
        self.ledgers.get_mut(&acm).expect("exists").messages = next;
        Ok(message)
    }

    fn acm_of(&self, id: &str) -> Option<AccommodationId> {
        let (acm, _) = id.rsplit_once('-')?;
        let acm: AccommodationId = acm.parse().ok()?;
        self.ledgers.contains_key(&acm).then_some(acm)
    }

    fn ledger_of(&self, id: &str) -> Option<&Ledger> {
        self.acm_of(id).and_then(|acm| self.ledgers.get(&acm))
    }

    fn persist_messages(
        &self,
        acm: &AccommodationId,
        next_seq: u64,
        messages: &BTreeMap<String, CampaignMessage>,
    ) -> Result<(), CampaignError> {
        let Some(root) = &self.root else {
            return Ok(());
        };
        let dir = root.join(acm.as_str());
        fs::create_dir_all(&dir)?;
        let file = SnapshotFile {
            format_version: STORE_FORMAT_VERSION,
            accommodation_id: acm.clone(),
            next_seq,
            messages: messages.values().cloned().collect(),
        };
        let body =
            serde_json::to_vec_pretty(&file).map_err(|err| CampaignError::Io(err.to_string()))?;
        let tmp = dir.join(format!("{MESSAGE_SNAPSHOT_FILE}.tmp"));
        fs::write(&tmp, body)?;
        fs::rename(&tmp, dir.join(MESSAGE_SNAPSHOT_FILE))?;
        Ok(())
    }
}

fn check_language(lang: &str) -> Result<(), CampaignError> {
    let ok = !lang.is_empty()
        && lang.len() <= 8
        && lang.chars().all(|c| c.is_ascii_alphabetic() || c == '-');
    if ok {
        Ok(())
    } else {
        Err(CampaignError::Invalid(format!("bad language code {lang:?}")))
    }
}

fn load_ledger(dir: &Path, acm: &AccommodationId) -> Result<Ledger, CampaignError> {
    let mut ledger = Ledger::default();
    let snapshot_path = dir.join(MESSAGE_SNAPSHOT_FILE);
    if snapshot_path.exists() {
        let raw = fs::read(&snapshot_path)?;
        let file: SnapshotFile = serde_json::from_slice(&raw)
            .map_err(|err| CampaignError::Corrupt(format!("{}: {err}", snapshot_path.display())))?;
        if file.format_version != STORE_FORMAT_VERSION {
            return Err(CampaignError::Corrupt(format!(
                "unsupported snapshot version {}",
                file.format_version
            )));
        }
        if &file.accommodation_id != acm {
            return Err(CampaignError::Corrupt(format!(
                "snapshot in {} belongs to {}",
                dir.display(),
                file.accommodation_id
            )));
        }
        ledger.next_seq = file.next_seq;
        for message in file.messages {
            ledger.messages.insert(message.id.clone(), message);
        }
    }
    let log_path = dir.join(EVENT_LOG_FILE);
    if log_path.exists() {
        let raw = fs::read_to_string(&log_path)?;
        let complete = raw.ends_with('\n');
        let lines: Vec<&str> = raw.lines().collect();
        for (n, line) in lines.iter().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let parsed = serde_json::from_str::<LogLineIn>(line);
            // A torn final write is dropped rather than failing the open.
            let torn = !complete && n + 1 == lines.len();
            let record = match parsed {
                Ok(record) => record,
                Err(_) if torn => break,
                Err(err) => {
                    return Err(CampaignError::Corrupt(format!(
                        "{} line {}: {err}",
                        log_path.display(),
                        n + 1
                    )))
                }
            };
            if record.v != STORE_FORMAT_VERSION {
                return Err(CampaignError::Corrupt(format!(
                    "{} line {}: version {}",
                    log_path.display(),
                    n + 1,
                    record.v
                )));
            }
            ledger.check_event(&record.event).map_err(|err| {
                CampaignError::Corrupt(format!("{} line {}: {err}", log_path.display(), n + 1))
            })?;
            ledger.apply_event(&record.event);
        }
    }
    Ok(ledger)
}
