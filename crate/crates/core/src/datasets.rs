//! Bundled workshop datasets and externally registered CSV links.

use std::borrow::Cow;
use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::table::{
    fetch_csv_url, is_http_url, parse_csv, CsvError, CsvOptions, DType, FetchError, FetchLimits,
    Provenance, Table,
};

pub const DEFAULT_BASE_URL: &str = "http://localhost:8080";

struct Bundled {
    id: &'static str,
    csv: &'static str,
    manifest: &'static str,
}

macro_rules! bundled {
    ($($id:literal),* $(,)?) => {
        &[$(Bundled {
            id: $id,
            csv: include_str!(concat!("../assets/datasets/", $id, "/", $id, ".csv")),
            manifest: include_str!(concat!("../assets/datasets/", $id, "/manifest.json")),
        }),*]
    };
}

const BUNDLED: &[Bundled] = bundled![
    "players",
    "forest_area",
    "plastic_production",
    "city_bikes",
    "research_budgets"
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaEntry {
    pub column: String,
    pub dtype: DType,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub id: String,
    pub title: String,
    pub description: String,
    pub schema: Vec<SchemaEntry>,
    pub source_note: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sdg_tags: Option<Vec<u8>>,
}

impl DatasetManifest {
    pub fn schema_pairs(&self) -> Vec<(String, DType)> {
        self.schema
            .iter()
            .map(|e| (e.column.clone(), e.dtype))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DatasetError {
    #[error("no dataset with id `{0}`")]
    NotFound(String),
    #[error("dataset id `{0}` is already registered")]
    DuplicateId(String),
    #[error("`{0}` is not an http(s) link")]
    BadScheme(String),
    #[error("dataset `{id}`: {source}")]
    Csv { id: String, source: CsvError },
    #[error("dataset `{id}`: schema does not match its manifest")]
    SchemaMismatch { id: String },
    #[error("dataset `{id}`: {source}")]
    Fetch { id: String, source: FetchError },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Clone)]
enum Body {
    Static(&'static str),
    Owned(Vec<u8>),
    Remote(String),
}

#[derive(Debug, Clone)]
struct Dataset {
    manifest: DatasetManifest,
    body: Body,
}

/// Datasets addressable by id, by `{id}.csv` file name, or by their served link.
#[derive(Debug, Clone)]
pub struct DatasetRegistry {
    datasets: BTreeMap<String, Dataset>,
    base_url: String,
}

impl Default for DatasetRegistry {
    fn default() -> Self {
        DatasetRegistry::bundled()
    }
}

impl DatasetRegistry {
    pub fn empty() -> DatasetRegistry {
        DatasetRegistry {
            datasets: BTreeMap::new(),
            base_url: DEFAULT_BASE_URL.to_string(),
        }
    }

    /// The five workshop datasets.
    pub fn bundled() -> DatasetRegistry {
        let mut registry = DatasetRegistry::empty();
        for b in BUNDLED {
            let manifest: DatasetManifest =
                serde_json::from_str(b.manifest).expect("bundled manifest parses");
            debug_assert_eq!(manifest.id, b.id);
            registry.datasets.insert(
                b.id.to_string(),
                Dataset {
                    manifest,
                    body: Body::Static(b.csv),
                },
            );
        }
        registry
    }

    /// Base used for the links this registry serves, e.g. `http://10.0.0.5:8080`.
    pub fn with_base_url(mut self, base_url: impl Into<String>) -> DatasetRegistry {
        self.base_url = base_url.into().trim_end_matches('/').to_string();
        self
    }

    pub fn base_url(&self) -> &str {
        &self.base_url
    }

    /// Adds every `<dir>/<id>/<id>.csv` + `<dir>/<id>/manifest.json` pair, checking
    /// each CSV against its manifest schema.
    pub fn load_dir(&mut self, dir: &Path) -> Result<usize, DatasetError> {
        let io = |path: &Path, e: std::io::Error| DatasetError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        };
        let mut entries: Vec<_> = fs::read_dir(dir)
            .map_err(|e| io(dir, e))?
            .filter_map(Result::ok)
            .map(|e| e.path())
            .filter(|p| p.join("manifest.json").is_file())
            .collect();
        entries.sort();
        let mut added = 0;
        for sub in entries {
            let manifest_path = sub.join("manifest.json");
            let text = fs::read_to_string(&manifest_path).map_err(|e| io(&manifest_path, e))?;
            let manifest: DatasetManifest =
                serde_json::from_str(&text).map_err(|e| DatasetError::Io {
                    path: manifest_path.display().to_string(),
                    message: e.to_string(),
                })?;
            let csv_path = sub.join(format!("{}.csv", manifest.id));
            let bytes = fs::read(&csv_path).map_err(|e| io(&csv_path, e))?;
            self.insert(Dataset {
                manifest,
                body: Body::Owned(bytes),
            })?;
            added += 1;
        }
        Ok(added)
    }

    fn insert(&mut self, dataset: Dataset) -> Result<(), DatasetError> {
        let id = dataset.manifest.id.clone();
        if self.datasets.contains_key(&id) {
            return Err(DatasetError::DuplicateId(id));
        }
        if let Body::Owned(bytes) = &dataset.body {
            let table = parse_csv(bytes, CsvOptions::default(), Provenance::File(id.clone()))
                .map_err(|source| DatasetError::Csv {
                    id: id.clone(),
                    source,
                })?;
            if table.schema() != dataset.manifest.schema_pairs() {
                return Err(DatasetError::SchemaMismatch { id });
            }
        }
        self.datasets.insert(id, dataset);
        Ok(())
    }

    /// Registers an external CSV link. Its manifest schema is trusted for validation.
    pub fn register_url(
        &mut self,
        id: &str,
        url: &str,
        mut manifest: DatasetManifest,
    ) -> Result<(), DatasetError> {
        if self.datasets.contains_key(id) {
            return Err(DatasetError::DuplicateId(id.to_string()));
        }
        if !is_http_url(url) {
            return Err(DatasetError::BadScheme(url.to_string()));
        }
        manifest.id = id.to_string();
        self.insert(Dataset {
            manifest,
            body: Body::Remote(url.to_string()),
        })
    }

    pub fn list(&self) -> Vec<&DatasetManifest> {
        self.datasets.values().map(|d| &d.manifest).collect()
    }

    pub fn manifest(&self, id: &str) -> Result<&DatasetManifest, DatasetError> {
        self.get(id).map(|d| &d.manifest)
    }

    fn get(&self, id: &str) -> Result<&Dataset, DatasetError> {
        self.datasets
            .get(id)
            .ok_or_else(|| DatasetError::NotFound(id.to_string()))
    }

    /// The link an `open_csv_url` card uses for this dataset.
    pub fn dataset_url(&self, id: &str) -> Result<String, DatasetError> {
        match &self.get(id)?.body {
            Body::Remote(url) => Ok(url.clone()),
            _ => Ok(format!("{}/datasets/{id}.csv", self.base_url)),
        }
    }

    /// Raw CSV bytes; remote datasets are fetched.
    pub fn raw_bytes(&self, id: &str, limits: FetchLimits) -> Result<Cow<'_, [u8]>, DatasetError> {
        match &self.get(id)?.body {
            Body::Static(s) => Ok(Cow::Borrowed(s.as_bytes())),
            Body::Owned(b) => Ok(Cow::Borrowed(b)),
            Body::Remote(url) => fetch_csv_url(url, limits)
                .map(Cow::Owned)
                .map_err(|source| DatasetError::Fetch {
                    id: id.to_string(),
                    source,
                }),
        }
    }

    pub fn load_dataset(&self, id: &str, limits: FetchLimits) -> Result<Table, DatasetError> {
        let bytes = self.raw_bytes(id, limits)?;
        let provenance = match &self.get(id)?.body {
            Body::Remote(url) => Provenance::Url(url.clone()),
            _ => Provenance::File(format!("{id}.csv")),
        };
        parse_csv(&bytes, CsvOptions::default(), provenance).map_err(|source| DatasetError::Csv {
            id: id.to_string(),
            source,
        })
    }

    /// Maps an `open_csv_file` argument (`players`, `players.csv`) to a dataset id.
    pub fn resolve_file(&self, file: &str) -> Option<&str> {
        let stem = file.strip_suffix(".csv").unwrap_or(file);
        self.datasets.get_key_value(stem).map(|(k, _)| k.as_str())
    }

    /// Maps a link to a dataset id. Registered links match exactly; served links
    /// match on `/datasets/<id>.csv` under the base URL or any loopback host.
    pub fn resolve_url(&self, link: &str) -> Option<&str> {
        if let Some((id, _)) = self
            .datasets
            .iter()
            .find(|(_, d)| matches!(&d.body, Body::Remote(u) if u == link))
        {
            return Some(id.as_str());
        }
        let parsed = url::Url::parse(link).ok()?;
        let id = parsed
            .path()
            .strip_prefix("/datasets/")?
            .strip_suffix(".csv")?;
        let (key, dataset) = self.datasets.get_key_value(id)?;
        if matches!(dataset.body, Body::Remote(_)) {
            return None;
        }
        let loopback = matches!(
            parsed.host(),
            Some(url::Host::Domain("localhost"))
                | Some(url::Host::Ipv4(std::net::Ipv4Addr::LOCALHOST))
                | Some(url::Host::Ipv6(std::net::Ipv6Addr::LOCALHOST))
        );
        let under_base = link.starts_with(&format!("{}/", self.base_url));
        (loopback || under_base).then_some(key.as_str())
    }
}
