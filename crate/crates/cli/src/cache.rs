//! On-disk cache of numerically inverted calibration entries.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use specbound::calibration::{CalibrationEntry, RHO_GRID_POINTS, THETA_WIDTH};

/// Overrides the directory holding the cache file.
pub const DIR_ENV: &str = "SPECBOUND_DATA_DIR";

#[derive(Debug, Default, Serialize, Deserialize)]
struct CacheFile {
    version: String,
    grid_points: usize,
    theta_width: f64,
    entries: Vec<CalibrationEntry>,
}

pub struct CalibrationCache {
    path: Option<PathBuf>,
    file: CacheFile,
    dirty: bool,
}

fn data_dir() -> Option<PathBuf> {
    if let Some(d) = std::env::var_os(DIR_ENV) {
        return Some(PathBuf::from(d));
    }
    if let Some(d) = std::env::var_os("XDG_DATA_HOME") {
        return Some(PathBuf::from(d).join("specbound"));
    }
    std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".local/share/specbound"))
}

fn fresh() -> CacheFile {
    CacheFile {
        version: env!("CARGO_PKG_VERSION").to_string(),
        grid_points: RHO_GRID_POINTS,
        theta_width: THETA_WIDTH,
        entries: Vec::new(),
    }
}

impl CalibrationCache {
    /// Opens the cache; a missing, unreadable or stale file yields an empty
    /// cache. `None` disables persistence.
    pub fn open(enabled: bool) -> Self {
        let path = enabled.then(data_dir).flatten().map(|d| {
            d.join(format!(
                "calibration-v{}-g{}-w{:e}.json",
                env!("CARGO_PKG_VERSION"),
                RHO_GRID_POINTS,
                THETA_WIDTH
            ))
        });
        let want = fresh();
        let file = path
            .as_deref()
            .and_then(|p| fs::read_to_string(p).ok())
            .and_then(|t| serde_json::from_str::<CacheFile>(&t).ok())
            .filter(|f| {
                f.version == want.version
                    && f.grid_points == want.grid_points
                    && f.theta_width == want.theta_width
            })
            .unwrap_or(want);
        Self {
            path,
            file,
            dirty: false,
        }
    }

    pub fn get(&self, kind: specbound::EstimatorKind, delta: f64) -> Option<&CalibrationEntry> {
        self.file
            .entries
            .iter()
            .find(|e| e.kind == kind && e.delta == delta)
    }

    pub fn insert(&mut self, entry: CalibrationEntry) {
        self.file.entries.push(entry);
        self.dirty = true;
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    /// Writes the cache back if it changed. Failures are reported but not fatal.
    pub fn save(&self) {
        let Some(path) = self.path.as_deref().filter(|_| self.dirty) else {
            return;
        };
        let result = path
            .parent()
            .map_or(Ok(()), fs::create_dir_all)
            .and_then(|_| {
                let text = serde_json::to_string_pretty(&self.file).map_err(std::io::Error::other)?;
                fs::write(path, text)
            });
        if let Err(e) = result {
            eprintln!("warning: cannot write calibration cache {}: {e}", path.display());
        }
    }
}
