use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use indexmap::IndexMap;
use mlogs_core::dataset::{apply_limits, concat_wells, rename_curve, select_curves, union_curve_names};
use mlogs_core::las_io::{dataset_to_las, merge_to_csv, parse_las_bytes, to_dataset, write_las};
use mlogs_core::model::{build_matrix, depth_block_split, evaluate, predict, train_named};
use mlogs_core::outliers::{apply_removal, brush_select, combine, flag_curve, CurveScope, RemovalMode, SetOp};
use mlogs_core::{BrushRect, Metrics, ModelKind, ModelSpec, Provenance, SelectionSet, TrainedModel, WellDataset};
use serde::{Deserialize, Serialize};

use crate::error::ServiceError;
use crate::storage;

type Result<T> = std::result::Result<T, ServiceError>;

pub const DEFAULT_SPLIT: f64 = 0.8;

#[derive(Debug, Clone, PartialEq)]
pub struct WellEntry {
    pub data: Arc<WellDataset>,
    pub undo: Option<Arc<WellDataset>>,
}

/// A selection together with the id of the well it indexes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoredSelection {
    pub well_id: String,
    pub selection: SelectionSet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoredModel {
    pub id: String,
    pub wells: Vec<String>,
    pub split_fraction: f64,
    pub train_metrics: Metrics,
    pub test_metrics: Metrics,
    pub model: TrainedModel,
}

/// One immutable revision of a project. Mutations build a new value and
/// swap it in whole.
#[derive(Debug, Clone, PartialEq)]
pub struct Project {
    pub id: String,
    pub name: String,
    pub revision: u64,
    pub wells: IndexMap<String, WellEntry>,
    pub selections: IndexMap<String, Arc<StoredSelection>>,
    pub models: IndexMap<String, Arc<StoredModel>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ProjectManifest {
    id: String,
    name: String,
    revision: u64,
    wells: Vec<String>,
    undo: Vec<String>,
    selections: Vec<String>,
    models: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveInfo {
    pub name: String,
    /// True for the depth index, listed first.
    pub index: bool,
    pub unit: String,
    pub description: String,
    pub present: usize,
    pub missing: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WellInfo {
    pub id: String,
    pub name: String,
    pub depth_name: String,
    pub depth_unit: String,
    pub rows: usize,
    pub depth_range: Option<[f64; 2]>,
    pub curves: Vec<CurveInfo>,
    pub can_undo: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProjectSummary {
    pub id: String,
    pub name: String,
    pub revision: u64,
    pub wells: usize,
    pub selections: usize,
    pub models: usize,
}

fn new_id() -> String {
    uuid::Uuid::new_v4().simple().to_string()
}

impl Project {
    pub fn summary(&self) -> ProjectSummary {
        ProjectSummary {
            id: self.id.clone(),
            name: self.name.clone(),
            revision: self.revision,
            wells: self.wells.len(),
            selections: self.selections.len(),
            models: self.models.len(),
        }
    }

    /// Resolves a well by id, or by name when exactly one well carries it.
    pub fn well_id(&self, key: &str) -> Result<String> {
        if self.wells.contains_key(key) {
            return Ok(key.to_string());
        }
        let mut hits = self.wells.iter().filter(|(_, w)| w.data.well() == key);
        match (hits.next(), hits.next()) {
            (Some((id, _)), None) => Ok(id.clone()),
            (Some(_), Some(_)) => Err(ServiceError::AmbiguousWell(key.to_string())),
            _ => Err(ServiceError::UnknownWell(key.to_string())),
        }
    }

    pub fn well(&self, key: &str) -> Result<(String, &Arc<WellDataset>)> {
        let id = self.well_id(key)?;
        let data = &self.wells[&id].data;
        Ok((id, data))
    }

    pub fn selection(&self, id: &str) -> Result<&StoredSelection> {
        self.selections
            .get(id)
            .map(|s| s.as_ref())
            .ok_or_else(|| ServiceError::UnknownSelection(id.to_string()))
    }

    pub fn model(&self, id: &str) -> Result<&StoredModel> {
        self.models
            .get(id)
            .map(|m| m.as_ref())
            .ok_or_else(|| ServiceError::UnknownModel(id.to_string()))
    }

    pub fn well_info(&self, id: &str) -> Result<WellInfo> {
        let entry = self.wells.get(id).ok_or_else(|| ServiceError::UnknownWell(id.to_string()))?;
        let ds = &entry.data;
        Ok(WellInfo {
            id: id.to_string(),
            name: ds.well().to_string(),
            depth_name: ds.depth_name().to_string(),
            depth_unit: ds.depth_unit().to_string(),
            rows: ds.row_count(),
            depth_range: ds.depth().first().zip(ds.depth().last()).map(|(a, b)| [*a, *b]),
            curves: std::iter::once(CurveInfo {
                name: ds.depth_name().to_string(),
                index: true,
                unit: ds.depth_unit().to_string(),
                description: String::new(),
                present: ds.row_count(),
                missing: 0,
            })
            .chain(ds.curves().map(|(name, c)| CurveInfo {
                name: name.to_string(),
                index: false,
                unit: c.unit.clone(),
                description: c.description.clone(),
                present: c.present_count(),
                missing: c.missing_count(),
            }))
            .collect(),
            can_undo: entry.undo.is_some(),
        })
    }

    pub fn well_infos(&self) -> Vec<WellInfo> {
        self.wells.keys().map(|id| self.well_info(id).expect("listed well")).collect()
    }

    /// Datasets for the given keys, or every well when `keys` is empty.
    pub fn datasets(&self, keys: &[String]) -> Result<(Vec<String>, Vec<WellDataset>)> {
        let ids: Vec<String> = if keys.is_empty() {
            self.wells.keys().cloned().collect()
        } else {
            keys.iter().map(|k| self.well_id(k)).collect::<Result<_>>()?
        };
        if ids.is_empty() {
            return Err(ServiceError::Validation("project has no wells".into()));
        }
        let data = ids.iter().map(|id| (*self.wells[id].data).clone()).collect();
        Ok((ids, data))
    }

    /// Replaces a well's dataset, keeping the previous one as the undo slot.
    fn replace_well(&mut self, id: &str, next: WellDataset) {
        let entry = self.wells.get_mut(id).expect("resolved well");
        entry.undo = Some(entry.data.clone());
        entry.data = Arc::new(next);
    }
}

struct Slot {
    writer: Mutex<()>,
    current: RwLock<Arc<Project>>,
}

/// All projects under one data directory. Readers take an `Arc` snapshot of
/// a whole revision; writers on a project are serialized by its own mutex.
pub struct Workbench {
    root: PathBuf,
    projects: RwLock<IndexMap<String, Arc<Slot>>>,
}

#[derive(Debug, Deserialize)]
pub struct SelectionRequest {
    pub well: Option<String>,
    #[serde(default)]
    pub rows: Option<Vec<usize>>,
    #[serde(default)]
    pub rect: Option<BrushRect>,
    #[serde(default)]
    pub method: Option<Provenance>,
    #[serde(default)]
    pub curve: Option<String>,
    #[serde(default)]
    pub param: Option<f64>,
    #[serde(default)]
    pub combine: Option<CombineRequest>,
}

#[derive(Debug, Deserialize)]
pub struct CombineRequest {
    pub a: String,
    pub b: String,
    pub op: SetOp,
}

#[derive(Debug, Default, Deserialize)]
pub struct ApplyRequest {
    #[serde(default)]
    pub mode: RemovalMode,
    #[serde(default)]
    pub curves: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
pub struct TrainRequest {
    #[serde(default)]
    pub wells: Vec<String>,
    pub features: Vec<String>,
    pub target: String,
    pub kind: ModelKind,
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default)]
    pub split_fraction: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExportFormat {
    Las,
    Csv,
}

/// A file produced by an export.
#[derive(Debug, Clone, PartialEq)]
pub struct Export {
    pub file_name: String,
    pub content_type: &'static str,
    pub body: String,
}

pub const ALL_WELLS: &str = "ALL";

impl Workbench {
    /// Opens (creating if needed) a data directory and loads every project in it.
    pub fn open(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(|e| ServiceError::storage(&root, e))?;
        if !root.is_dir() {
            return Err(ServiceError::storage(&root, "not a directory"));
        }
        storage::write_atomic(&root.join(".probe"), b"ok")?;
        storage::remove_file(&root.join(".probe"))?;
        let mut projects = IndexMap::new();
        let mut dirs: Vec<PathBuf> = fs::read_dir(&root)
            .map_err(|e| ServiceError::storage(&root, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.join("project.json").is_file())
            .collect();
        dirs.sort();
        for dir in dirs {
            let project = load_project(&dir)?;
            projects.insert(
                project.id.clone(),
                Arc::new(Slot {
                    writer: Mutex::new(()),
                    current: RwLock::new(Arc::new(project)),
                }),
            );
        }
        Ok(Workbench {
            root,
            projects: RwLock::new(projects),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn slot(&self, id: &str) -> Result<Arc<Slot>> {
        self.projects
            .read()
            .expect("project table lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ServiceError::UnknownProject(id.to_string()))
    }

    /// The current revision of a project.
    pub fn snapshot(&self, id: &str) -> Result<Arc<Project>> {
        Ok(self.slot(id)?.current.read().expect("snapshot lock").clone())
    }

    pub fn list(&self) -> Vec<ProjectSummary> {
        let slots: Vec<Arc<Slot>> = self.projects.read().expect("project table lock").values().cloned().collect();
        slots
            .iter()
            .map(|s| s.current.read().expect("snapshot lock").summary())
            .collect()
    }

    pub fn create_project(&self, name: &str) -> Result<Arc<Project>> {
        let name = name.trim();
        if name.is_empty() {
            return Err(ServiceError::Validation("project name must not be empty".into()));
        }
        let project = Project {
            id: new_id(),
            name: name.to_string(),
            revision: 0,
            wells: IndexMap::new(),
            selections: IndexMap::new(),
            models: IndexMap::new(),
        };
        let dir = self.root.join(&project.id);
        persist(&dir, None, &project)?;
        let project = Arc::new(project);
        self.projects.write().expect("project table lock").insert(
            project.id.clone(),
            Arc::new(Slot {
                writer: Mutex::new(()),
                current: RwLock::new(project.clone()),
            }),
        );
        Ok(project)
    }

    /// Runs one mutation: clone the current revision, edit it, persist the
    /// difference, bump the revision and publish. A failed edit leaves both
    /// memory and disk untouched.
    fn mutate<T>(&self, id: &str, edit: impl FnOnce(&mut Project) -> Result<T>) -> Result<(Arc<Project>, T)> {
        let slot = self.slot(id)?;
        let _writer = slot.writer.lock().unwrap_or_else(|e| e.into_inner());
        let prev = slot.current.read().expect("snapshot lock").clone();
        let mut next = (*prev).clone();
        let out = edit(&mut next)?;
        next.revision = prev.revision + 1;
        persist(&self.root.join(id), Some(&prev), &next)?;
        let next = Arc::new(next);
        *slot.current.write().expect("snapshot lock") = next.clone();
        Ok((next, out))
    }

    /// Parses every file before storing any of them; returns the new well ids.
    pub fn upload(&self, project: &str, files: Vec<(Option<String>, Vec<u8>)>) -> Result<(Arc<Project>, Vec<String>)> {
        if files.is_empty() {
            return Err(ServiceError::BadRequest("no file in upload".into()));
        }
        let mut parsed = Vec::with_capacity(files.len());
        for (name, bytes) in &files {
            let label = name.clone().unwrap_or_else(|| "upload".into());
            let in_file = |source| ServiceError::InFile {
                file: label.clone(),
                source,
            };
            let las = parse_las_bytes(bytes).map_err(in_file)?;
            parsed.push(to_dataset(&las, name.as_deref()).map_err(in_file)?);
        }
        self.mutate(project, |p| {
            let mut ids = Vec::new();
            for ds in parsed {
                let id = new_id();
                p.wells.insert(
                    id.clone(),
                    WellEntry {
                        data: Arc::new(ds),
                        undo: None,
                    },
                );
                ids.push(id);
            }
            Ok(ids)
        })
    }

    fn edit_well<T>(
        &self,
        project: &str,
        well: &str,
        edit: impl FnOnce(&WellDataset) -> Result<(WellDataset, T)>,
    ) -> Result<(Arc<Project>, String, T)> {
        let (p, (id, out)) = self.mutate(project, |p| {
            let (id, ds) = p.well(well)?;
            let (next, out) = edit(ds)?;
            p.replace_well(&id, next);
            Ok((id, out))
        })?;
        Ok((p, id, out))
    }

    pub fn rename(&self, project: &str, well: &str, old: &str, new: &str) -> Result<(Arc<Project>, String)> {
        let (p, id, ()) = self.edit_well(project, well, |ds| Ok((rename_curve(ds, old, new)?, ())))?;
        Ok((p, id))
    }

    pub fn limits(&self, project: &str, well: &str, curve: &str, lo: f64, hi: f64) -> Result<(Arc<Project>, String, usize)> {
        self.edit_well(project, well, |ds| Ok(apply_limits(ds, curve, lo, hi)?))
    }

    pub fn select_curves(&self, project: &str, well: &str, curves: &[String]) -> Result<(Arc<Project>, String)> {
        let (p, id, ()) = self.edit_well(project, well, |ds| Ok((select_curves(ds, curves)?, ())))?;
        Ok((p, id))
    }

    pub fn undo(&self, project: &str, well: &str) -> Result<(Arc<Project>, String)> {
        self.mutate(project, |p| {
            let id = p.well_id(well)?;
            let entry = p.wells.get_mut(&id).expect("resolved well");
            let prev = entry.undo.take().ok_or_else(|| ServiceError::NothingToUndo(id.clone()))?;
            entry.data = prev;
            Ok(id)
        })
    }

    pub fn save_selection(&self, project: &str, req: SelectionRequest) -> Result<(Arc<Project>, StoredSelection)> {
        self.mutate(project, |p| {
            let stored = resolve_selection(p, req)?;
            p.selections.insert(stored.selection.id.clone(), Arc::new(stored.clone()));
            Ok(stored)
        })
    }

    pub fn apply_selection(
        &self,
        project: &str,
        selection: &str,
        req: ApplyRequest,
    ) -> Result<(Arc<Project>, String, mlogs_core::outliers::RemovalReport)> {
        let (p, (id, report)) = self.mutate(project, |p| {
            let stored = p.selection(selection)?.clone();
            let ds = p
                .wells
                .get(&stored.well_id)
                .ok_or_else(|| ServiceError::UnknownWell(stored.well_id.clone()))?
                .data
                .clone();
            let scope = match req.curves {
                Some(names) if !names.is_empty() => CurveScope::Named(names),
                _ => CurveScope::All,
            };
            let (next, report) = apply_removal(&ds, &stored.selection, req.mode, &scope)?;
            p.replace_well(&stored.well_id, next);
            Ok((stored.well_id, report))
        })?;
        Ok((p, id, report))
    }

    pub fn train(&self, project: &str, req: TrainRequest) -> Result<(Arc<Project>, Arc<StoredModel>)> {
        let snapshot = self.snapshot(project)?;
        let stored = Arc::new(train_model(&snapshot, req)?);
        let (p, ()) = self.mutate(project, |p| {
            p.models.insert(stored.id.clone(), stored.clone());
            Ok(())
        })?;
        Ok((p, stored))
    }

    pub fn predict(&self, project: &str, model: &str, well: &str) -> Result<(Arc<Project>, String)> {
        self.mutate(project, |p| {
            let stored = p.model(model)?.model.clone();
            let (id, ds) = p.well(well)?;
            let next = predict(&stored, ds)?;
            p.replace_well(&id, next);
            Ok(id)
        })
    }

    /// LAS holds a single well; CSV merges any number in long format.
    pub fn export(&self, project: &str, well: &str, format: ExportFormat, curves: &[String]) -> Result<(Arc<Project>, Export)> {
        let p = self.snapshot(project)?;
        let keys: Vec<String> = if well.is_empty() || well == ALL_WELLS {
            Vec::new()
        } else {
            well.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
        };
        let (_, datasets) = p.datasets(&keys)?;
        let export = match format {
            ExportFormat::Csv => {
                let curves = if curves.is_empty() { union_curve_names(&datasets) } else { curves.to_vec() };
                let (_, body) = merge_to_csv(&datasets, &curves)?;
                Export {
                    file_name: format!("{}.csv", file_stem(&p.name)),
                    content_type: "text/csv; charset=utf-8",
                    body,
                }
            }
            ExportFormat::Las => {
                let [ds] = datasets.as_slice() else {
                    return Err(ServiceError::Validation(format!(
                        "LAS export holds one well but {} were requested; pick a well or use csv",
                        datasets.len()
                    )));
                };
                let ds = if curves.is_empty() { ds.clone() } else { select_curves(ds, curves)? };
                Export {
                    file_name: format!("{}.las", file_stem(ds.well())),
                    content_type: "text/plain; charset=utf-8",
                    body: write_las(&dataset_to_las(&ds)?)?,
                }
            }
        };
        Ok((p, export))
    }
}

fn file_stem(name: &str) -> String {
    let stem: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect();
    if stem.is_empty() { "export".into() } else { stem }
}

fn resolve_selection(p: &Project, req: SelectionRequest) -> Result<StoredSelection> {
    if let Some(c) = req.combine {
        let a = p.selection(&c.a)?;
        let b = p.selection(&c.b)?;
        if a.well_id != b.well_id {
            return Err(mlogs_core::Error::WellMismatch {
                selection: b.well_id.clone(),
                dataset: a.well_id.clone(),
            }
            .into());
        }
        return Ok(StoredSelection {
            well_id: a.well_id.clone(),
            selection: combine(&a.selection, &b.selection, c.op)?,
        });
    }
    let well = req
        .well
        .ok_or_else(|| ServiceError::Validation("selection needs a well".into()))?;
    let (well_id, ds) = p.well(&well)?;
    let given = [req.rows.is_some(), req.rect.is_some(), req.method.is_some()];
    if given.iter().filter(|g| **g).count() != 1 {
        return Err(ServiceError::Validation(
            "give exactly one of rows, rect or method".into(),
        ));
    }
    let selection = if let Some(rows) = req.rows {
        let s = SelectionSet::new(ds.well(), rows, Provenance::Manual, "manual");
        s.validate(ds.row_count())?;
        s
    } else if let Some(rect) = req.rect {
        brush_select(ds, &rect)?
    } else {
        let method = req.method.expect("checked above");
        let curve = req
            .curve
            .ok_or_else(|| ServiceError::Validation("statistical selection needs a curve".into()))?;
        let param = req.param.unwrap_or(match method {
            Provenance::Iqr => 1.5,
            _ => 3.0,
        });
        flag_curve(ds, &curve, method, param)?
    };
    Ok(StoredSelection { well_id, selection })
}

fn train_model(p: &Project, req: TrainRequest) -> Result<StoredModel> {
    let (well_ids, datasets) = p.datasets(&req.wells)?;
    let depth_names: Vec<&str> = datasets.iter().map(|d| d.depth_name()).collect();
    let mut curves: Vec<String> = Vec::new();
    for name in req.features.iter().chain(std::iter::once(&req.target)) {
        if name != "DEPT" && !depth_names.contains(&name.as_str()) && !curves.contains(name) {
            curves.push(name.clone());
        }
    }
    let table = concat_wells(&datasets, &curves)?;
    let (matrix, target) = build_matrix(&table, &req.features, &req.target)?;
    let fraction = req.split_fraction.unwrap_or(DEFAULT_SPLIT);
    let ((train_m, train_y), (test_m, test_y)) = depth_block_split(&matrix, &target, fraction)?;
    let model = train_named(&train_m, &train_y, &req.target, ModelSpec { kind: req.kind, k: req.k })?;
    let train_metrics = evaluate(&model, &train_m, &train_y)?;
    let test_metrics = evaluate(&model, &test_m, &test_y)?;
    Ok(StoredModel {
        id: new_id(),
        wells: well_ids,
        split_fraction: fraction,
        train_metrics,
        test_metrics,
        model,
    })
}

fn load_project(dir: &Path) -> Result<Project> {
    let manifest: ProjectManifest = storage::read_json(&dir.join("project.json"))?;
    let wells_dir = dir.join("wells");
    let mut wells = IndexMap::new();
    for id in &manifest.wells {
        let data = Arc::new(storage::read_dataset(&wells_dir, id)?);
        let undo = if manifest.undo.contains(id) {
            Some(Arc::new(storage::read_dataset(&wells_dir, &format!("{id}.undo"))?))
        } else {
            None
        };
        wells.insert(id.clone(), WellEntry { data, undo });
    }
    let mut selections = IndexMap::new();
    for id in &manifest.selections {
        let s: StoredSelection = storage::read_json(&dir.join("selections").join(format!("{id}.json")))?;
        selections.insert(id.clone(), Arc::new(s));
    }
    let mut models = IndexMap::new();
    for id in &manifest.models {
        let path = dir.join("models").join(format!("{id}.json"));
        let m: StoredModel = storage::read_json(&path)?;
        m.model.validate().map_err(|e| ServiceError::storage(&path, e))?;
        models.insert(id.clone(), Arc::new(m));
    }
    Ok(Project {
        id: manifest.id,
        name: manifest.name,
        revision: manifest.revision,
        wells,
        selections,
        models,
    })
}

fn ptr_changed<T>(a: Option<&Arc<T>>, b: Option<&Arc<T>>) -> bool {
    match (a, b) {
        (Some(a), Some(b)) => !Arc::ptr_eq(a, b),
        (None, None) => false,
        _ => true,
    }
}

/// Writes whatever differs between `prev` and `next`, then the manifest.
/// Unchanged artifacts are detected by pointer identity and skipped.
fn persist(dir: &Path, prev: Option<&Project>, next: &Project) -> Result<()> {
    let wells_dir = dir.join("wells");
    let empty = IndexMap::new();
    let prev_wells = prev.map_or(&empty, |p| &p.wells);
    for (id, entry) in &next.wells {
        let old = prev_wells.get(id);
        if ptr_changed(old.map(|o| &o.data), Some(&entry.data)) {
            storage::write_dataset(&wells_dir, id, &entry.data)?;
        }
        if ptr_changed(old.and_then(|o| o.undo.as_ref()), entry.undo.as_ref()) {
            match &entry.undo {
                Some(u) => storage::write_dataset(&wells_dir, &format!("{id}.undo"), u)?,
                None => storage::remove_dataset(&wells_dir, &format!("{id}.undo"))?,
            }
        }
    }
    let mut stale: HashMap<&str, ()> = prev_wells.keys().map(|k| (k.as_str(), ())).collect();
    for id in next.wells.keys() {
        stale.remove(id.as_str());
    }
    for id in stale.keys() {
        storage::remove_dataset(&wells_dir, id)?;
        storage::remove_dataset(&wells_dir, &format!("{id}.undo"))?;
    }
    for (id, s) in &next.selections {
        if prev.is_none_or(|p| ptr_changed(p.selections.get(id), Some(s))) {
            storage::write_json(&dir.join("selections").join(format!("{id}.json")), s.as_ref())?;
        }
    }
    for (id, m) in &next.models {
        if prev.is_none_or(|p| ptr_changed(p.models.get(id), Some(m))) {
            storage::write_json(&dir.join("models").join(format!("{id}.json")), m.as_ref())?;
        }
    }
    let manifest = ProjectManifest {
        id: next.id.clone(),
        name: next.name.clone(),
        revision: next.revision,
        wells: next.wells.keys().cloned().collect(),
        undo: next
            .wells
            .iter()
            .filter(|(_, w)| w.undo.is_some())
            .map(|(id, _)| id.clone())
            .collect(),
        selections: next.selections.keys().cloned().collect(),
        models: next.models.keys().cloned().collect(),
    };
    storage::write_json(&dir.join("project.json"), &manifest)
}
