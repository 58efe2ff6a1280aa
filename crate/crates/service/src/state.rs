//! Everything the handlers share.

use std::collections::BTreeMap;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::ops::Deref;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use chrono::{DateTime, FixedOffset, Local};
use parking_lot::{Mutex, RwLock, RwLockReadGuard};
use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;
use upsell_core::campaign::{CampaignError, CampaignStore};
use upsell_core::domain::{
    parse_wine_profile, serialize_wine_profile, AccommodationId, Catalog, GuestProfile, Order,
    PriceBuckets, Rating, ReservationNumber, WinePreferenceProfile,
};
use upsell_core::influence::{
    EmotionTaxonomy, InfluenceGrid, InfluentialModel, QuizDefinition,
};
use upsell_core::prompt::{LlmBackend, MockBackend};
use upsell_core::recommend::{update_state, ModelSnapshot, RecommenderConfig};

use crate::config::{BackendKind, ServiceConfig};
use crate::live::LiveBackend;

const RATINGS_LOG: &str = "ratings.ndjson";
const PURCHASES_LOG: &str = "purchases.ndjson";
const PROFILES_LOG: &str = "profiles.ndjson";

#[derive(Debug, Error)]
pub enum StartupError {
    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),
    #[error("{path}: {message}")]
    Input { path: PathBuf, message: String },
    #[error("campaign store: {0}")]
    Campaigns(#[from] CampaignError),
    #[error("influence model: {0}")]
    Influence(#[from] upsell_core::influence::InfluenceError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

pub trait Clock: Send + Sync {
    fn now(&self) -> DateTime<FixedOffset>;
}

pub struct SystemClock;

impl Clock for SystemClock {
    fn now(&self) -> DateTime<FixedOffset> {
        Local::now().fixed_offset()
    }
}

/// A clock that only moves when told to.
pub struct ManualClock(Mutex<DateTime<FixedOffset>>);

impl ManualClock {
    pub fn new(at: DateTime<FixedOffset>) -> Self {
        Self(Mutex::new(at))
    }

    pub fn set(&self, at: DateTime<FixedOffset>) {
        *self.0.lock() = at;
    }
}

impl Clock for ManualClock {
    fn now(&self) -> DateTime<FixedOffset> {
        *self.0.lock()
    }
}

/// Feedback ingested for one accommodation. `version` bumps on every change.
#[derive(Debug, Default)]
pub struct FeedData {
    pub ratings: Vec<Rating>,
    pub purchases: Vec<Order>,
    pub profiles: BTreeMap<ReservationNumber, WinePreferenceProfile>,
    pub version: u64,
}

pub struct Accommodation {
    pub id: AccommodationId,
    pub catalog: Catalog,
    feed_dir: Option<PathBuf>,
    data: RwLock<FeedData>,
    snapshot: RwLock<Arc<ModelSnapshot>>,
    /// Data version the current snapshot was built from.
    built_version: tokio::sync::Mutex<u64>,
    rebuilds: AtomicU64,
}

impl Accommodation {
    pub fn data(&self) -> RwLockReadGuard<'_, FeedData> {
        self.data.read()
    }

    pub fn snapshot(&self) -> Arc<ModelSnapshot> {
        self.snapshot.read().clone()
    }

    /// Completed rebuilds since startup, not counting the initial build.
    pub fn rebuild_count(&self) -> u64 {
        self.rebuilds.load(Ordering::SeqCst)
    }

    pub fn add_rating(&self, rating: Rating) -> std::io::Result<()> {
        let mut data = self.data.write();
        self.append(RATINGS_LOG, &serde_json::to_string(&rating)?)?;
        data.ratings.push(rating);
        data.version += 1;
        Ok(())
    }

    pub fn add_purchase(&self, order: Order) -> std::io::Result<()> {
        let mut data = self.data.write();
        self.append(PURCHASES_LOG, &serde_json::to_string(&order)?)?;
        data.purchases.push(order);
        data.version += 1;
        Ok(())
    }

    pub fn put_profile(&self, profile: WinePreferenceProfile) -> std::io::Result<()> {
        // Profiles feed kbr directly and never enter the snapshot, so the
        // data version is left alone.
        let mut data = self.data.write();
        self.append(PROFILES_LOG, &serialize_wine_profile(&profile, None))?;
        data.profiles.insert(profile.reservation.clone(), profile);
        Ok(())
    }

    fn append(&self, file: &str, line: &str) -> std::io::Result<()> {
        let Some(dir) = &self.feed_dir else {
            return Ok(());
        };
        fs::create_dir_all(dir)?;
        let mut f = OpenOptions::new().create(true).append(true).open(dir.join(file))?;
        f.write_all(line.as_bytes())?;
        f.write_all(b"\n")
    }

    /// Brings the snapshot up to date with the feed. Concurrent callers
    /// coalesce: whoever waits for a running rebuild reuses its result when
    /// that rebuild already covers the data they saw.
    pub async fn rebuild(&self, config: &RecommenderConfig, now: DateTime<FixedOffset>) -> Arc<ModelSnapshot> {
        let wanted = self.data.read().version;
        let mut built = self.built_version.lock().await;
        if *built >= wanted {
            return self.snapshot();
        }
        let (ratings, purchases, version) = {
            let data = self.data.read();
            (data.ratings.clone(), data.purchases.clone(), data.version)
        };
        let id = self.id.clone();
        let config = config.clone();
        let snapshot = tokio::task::spawn_blocking(move || {
            update_state(&id, &ratings, &purchases, &config, now)
        })
        .await
        .expect("snapshot build does not panic");
        let snapshot = Arc::new(snapshot);
        *self.snapshot.write() = snapshot.clone();
        *built = version;
        self.rebuilds.fetch_add(1, Ordering::SeqCst);
        snapshot
    }
}

pub struct Shared {
    pub accommodations: BTreeMap<AccommodationId, Arc<Accommodation>>,
    pub model: InfluentialModel,
    pub quiz: QuizDefinition,
    pub buckets: PriceBuckets,
    pub recommender: RecommenderConfig,
    pub top_n: usize,
    pub backend: Arc<dyn LlmBackend>,
    pub temperature: f64,
    pub seed: u64,
    pub campaigns: Mutex<CampaignStore>,
    pub guests: RwLock<BTreeMap<ReservationNumber, GuestProfile>>,
    pub clock: Arc<dyn Clock>,
}

#[derive(Clone)]
pub struct AppState(Arc<Shared>);

impl Deref for AppState {
    type Target = Shared;

    fn deref(&self) -> &Shared {
        &self.0
    }
}

fn read_input(path: &Path) -> Result<String, StartupError> {
    fs::read_to_string(path).map_err(|e| StartupError::Input {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn json_array<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, StartupError> {
    serde_json::from_str(&read_input(path)?).map_err(|e| StartupError::Input {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn ndjson<T>(path: &Path, parse: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, StartupError> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    read_input(path)?
        .lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(n, line)| {
            parse(line).map_err(|message| StartupError::Input {
                path: path.to_path_buf(),
                message: format!("line {}: {message}", n + 1),
            })
        })
        .collect()
}

fn scoped<T: Serialize>(items: &[T], acm: &AccommodationId, of: impl Fn(&T) -> &AccommodationId, path: &Path) -> Result<(), StartupError> {
    match items.iter().find(|i| of(i) != acm) {
        Some(item) => Err(StartupError::Input {
            path: path.to_path_buf(),
            message: format!("{} belongs to {}", serde_json::to_string(item).unwrap_or_default(), of(item)),
        }),
        None => Ok(()),
    }
}

impl AppState {
    pub fn from_config(config: &ServiceConfig) -> Result<Self, StartupError> {
        Self::with_clock(config, Arc::new(SystemClock))
    }

    pub fn with_clock(config: &ServiceConfig, clock: Arc<dyn Clock>) -> Result<Self, StartupError> {
        config.validate()?;
        let buckets = PriceBuckets::new(config.price_buckets.iter().cloned());

        let taxonomy = match &config.taxonomy_file {
            Some(path) => EmotionTaxonomy::from_json(&read_input(path)?)?,
            None => EmotionTaxonomy::preset(&config.taxonomy)?,
        };
        let grid = match &config.grid_file {
            Some(path) => InfluenceGrid::from_json(&read_input(path)?)?,
            None => InfluenceGrid::default(),
        };
        let model = InfluentialModel::new(taxonomy, grid)?;
        let quiz = match &config.quiz {
            Some(path) => QuizDefinition::from_json(&read_input(path)?, &model.taxonomy)?,
            None => QuizDefinition { questions: Vec::new() },
        };

        fs::create_dir_all(&config.data_dir)?;
        let now = clock.now();
        let mut accommodations = BTreeMap::new();
        for acm in &config.accommodations {
            let catalog = Catalog::from_json(acm.id.clone(), &read_input(&acm.catalog)?).map_err(|e| {
                StartupError::Input { path: acm.catalog.clone(), message: e.to_string() }
            })?;
            let feed_dir = config.data_dir.join(acm.id.as_str());

            let mut ratings: Vec<Rating> = match &acm.ratings {
                Some(path) => json_array(path)?,
                None => Vec::new(),
            };
            ratings.extend(ndjson(&feed_dir.join(RATINGS_LOG), |l| {
                serde_json::from_str(l).map_err(|e| e.to_string())
            })?);

            let mut purchases: Vec<Order> = match &acm.purchases {
                Some(path) => json_array(path)?,
                None => Vec::new(),
            };
            if let Some(path) = &acm.purchases {
                scoped(&purchases, &acm.id, |o| &o.accommodation, path)?;
            }
            purchases.extend(ndjson(&feed_dir.join(PURCHASES_LOG), |l| {
                serde_json::from_str(l).map_err(|e| e.to_string())
            })?);

            let mut profiles = BTreeMap::new();
            if let Some(path) = &acm.profiles {
                let docs: Vec<serde_json::Value> = json_array(path)?;
                for doc in docs {
                    let profile = parse_wine_profile(&doc.to_string(), &buckets).map_err(|e| {
                        StartupError::Input { path: path.clone(), message: e.to_string() }
                    })?;
                    profiles.insert(profile.reservation.clone(), profile);
                }
            }
            for profile in ndjson(&feed_dir.join(PROFILES_LOG), |l| {
                parse_wine_profile(l, &buckets).map_err(|e| e.to_string())
            })? {
                profiles.insert(profile.reservation.clone(), profile);
            }
            if let Some(p) = profiles.values().find(|p| p.accommodation != acm.id) {
                return Err(StartupError::Input {
                    path: feed_dir.clone(),
                    message: format!("profile {} belongs to {}", p.reservation, p.accommodation),
                });
            }

            let snapshot = update_state(&acm.id, &ratings, &purchases, &config.recommender, now);
            accommodations.insert(
                acm.id.clone(),
                Arc::new(Accommodation {
                    id: acm.id.clone(),
                    catalog,
                    feed_dir: Some(feed_dir),
                    data: RwLock::new(FeedData { ratings, purchases, profiles, version: 0 }),
                    snapshot: RwLock::new(Arc::new(snapshot)),
                    built_version: tokio::sync::Mutex::new(0),
                    rebuilds: AtomicU64::new(0),
                }),
            );
        }

        let backend: Arc<dyn LlmBackend> = match config.backend.kind {
            BackendKind::Mock => Arc::new(MockBackend::new(config.seed)),
            BackendKind::Live => Arc::new(LiveBackend::from_config(&config.backend)),
        };
        let campaigns = CampaignStore::open(&config.data_dir)?;

        Ok(Self(Arc::new(Shared {
            accommodations,
            model,
            quiz,
            buckets,
            recommender: config.recommender.clone(),
            top_n: config.top_n,
            backend,
            temperature: config.backend.temperature,
            seed: config.seed,
            campaigns: Mutex::new(campaigns),
            guests: RwLock::new(BTreeMap::new()),
            clock,
        })))
    }

    pub fn accommodation(&self, id: &AccommodationId) -> Option<Arc<Accommodation>> {
        self.accommodations.get(id).cloned()
    }
}
