//! Log ASCII Standard (LAS) 1.2 / 2.0 reading and writing.
//!
//! [`parse_las`] keeps the document as-is, null sentinels included;
//! [`to_dataset`] is where sentinels become missing cells. The writer
//! always produces unwrapped LAS 2.0 with six-decimal fixed-width columns.

use std::fmt::Write as _;
use std::path::Path;

use indexmap::IndexMap;
use serde::Serialize;

use crate::dataset::{concat_wells, is_valid_mnemonic, CurveData, MultiWellTable, TableRow, WellDataset};
use crate::error::{Error, Result};

/// Sentinel used when a file has no `NULL` line, and by the writer.
pub const DEFAULT_NULL: f64 = -999.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LasVersion {
    V1_2,
    V2_0,
}

/// One `MNEM.UNIT VALUE : DESCRIPTION` header entry.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct HeaderItem {
    pub unit: String,
    pub value: String,
    pub description: String,
}

impl HeaderItem {
    pub fn new(unit: impl Into<String>, value: impl Into<String>, description: impl Into<String>) -> Self {
        HeaderItem {
            unit: unit.into(),
            value: value.into(),
            description: description.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CurveSpec {
    pub mnemonic: String,
    pub unit: String,
    pub description: String,
}

/// In-memory image of a LAS document. `data` is row-major, one entry per
/// curve in every row, with the first curve being depth.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LasFile {
    pub version: LasVersion,
    pub wrap: bool,
    pub well_meta: IndexMap<String, HeaderItem>,
    pub curves: Vec<CurveSpec>,
    pub params: IndexMap<String, HeaderItem>,
    pub other: Vec<String>,
    pub data: Vec<Vec<f64>>,
}

impl LasFile {
    /// The null sentinel declared by the `NULL` well entry, or -999.25.
    pub fn null_value(&self) -> f64 {
        self.well_meta
            .get("NULL")
            .and_then(|item| item.value.trim().parse::<f64>().ok())
            .unwrap_or(DEFAULT_NULL)
    }

    /// The `WELL` entry. LAS 1.2 puts the information after the colon
    /// (`WELL. WELL: ANY ET AL`), so for 1.2 files a non-empty description wins.
    pub fn well_name(&self) -> Option<&str> {
        let item = self.well_meta.get("WELL")?;
        let value = item.value.trim();
        let desc = item.description.trim();
        if self.version == LasVersion::V1_2 && !desc.is_empty() {
            return Some(desc);
        }
        (!value.is_empty()).then_some(value)
    }

    pub fn validate(&self) -> Result<()> {
        if self.curves.is_empty() {
            return Err(Error::InvalidFile("no curves".into()));
        }
        for c in &self.curves {
            if !is_valid_mnemonic(&c.mnemonic) {
                return Err(Error::InvalidFile(format!("invalid curve mnemonic {:?}", c.mnemonic)));
            }
            if c.unit.chars().any(char::is_whitespace) || c.unit.contains(':') {
                return Err(Error::InvalidFile(format!("invalid unit {:?}", c.unit)));
            }
        }
        for (i, row) in self.data.iter().enumerate() {
            if row.len() != self.curves.len() {
                return Err(Error::InvalidFile(format!(
                    "row {i} has {} values for {} curves",
                    row.len(),
                    self.curves.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidFile(format!("row {i} has a non-finite value")));
            }
        }
        if let Some(item) = self.well_meta.get("NULL") {
            if !item.value.trim().parse::<f64>().is_ok_and(f64::is_finite) {
                return Err(Error::InvalidFile(format!("NULL value {:?} is not a number", item.value)));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Preamble,
    Version,
    Well,
    Curve,
    Parameter,
    Other,
    Ascii,
    Unknown,
}

struct HeaderLine {
    mnemonic: String,
    item: HeaderItem,
}

/// Splits `MNEM.UNIT VALUE : DESCRIPTION`. The mnemonic ends at the first
/// dot, the unit at the first whitespace after it, the value at the last colon.
fn parse_header_line(line: &str, lineno: usize) -> Result<HeaderLine> {
    let malformed = || Error::MalformedHeaderLine {
        line: lineno,
        text: line.to_string(),
    };
    let dot = line.find('.').ok_or_else(malformed)?;
    let mnemonic = line[..dot].trim();
    if mnemonic.is_empty() {
        return Err(malformed());
    }
    let after_dot = &line[dot + 1..];
    let colon = after_dot.rfind(':').ok_or_else(malformed)?;
    let head = &after_dot[..colon];
    let unit_end = head.find(char::is_whitespace).unwrap_or(head.len());
    Ok(HeaderLine {
        mnemonic: mnemonic.to_string(),
        item: HeaderItem {
            unit: head[..unit_end].to_string(),
            value: head[unit_end..].trim().to_string(),
            description: after_dot[colon + 1..].trim().to_string(),
        },
    })
}

fn section_for(line: &str) -> Section {
    match line[1..].chars().next().map(|c| c.to_ascii_uppercase()) {
        Some('V') => Section::Version,
        Some('W') => Section::Well,
        Some('C') => Section::Curve,
        Some('P') => Section::Parameter,
        Some('O') => Section::Other,
        Some('A') => Section::Ascii,
        _ => Section::Unknown,
    }
}

fn parse_version(value: &str) -> Result<LasVersion> {
    let v = value.trim();
    match v.parse::<f64>() {
        Ok(x) if x == 1.2 => Ok(LasVersion::V1_2),
        Ok(x) if x == 2.0 => Ok(LasVersion::V2_0),
        _ => Err(Error::UnsupportedVersion(v.to_string())),
    }
}

/// Makes curve mnemonics unique: the first keeps its name, later repeats get `_1`, `_2`, ...
fn dedup_mnemonics(curves: &mut [CurveSpec]) {
    let mut seen: IndexMap<String, usize> = IndexMap::new();
    for c in curves.iter_mut() {
        if let Some(n) = seen.get_mut(&c.mnemonic) {
            let base = c.mnemonic.clone();
            let mut k = *n;
            let renamed = loop {
                let candidate = format!("{base}_{k}");
                k += 1;
                if !seen.contains_key(&candidate) {
                    break candidate;
                }
            };
            seen[&base] = k;
            seen.insert(renamed.clone(), 1);
            c.mnemonic = renamed;
        } else {
            seen.insert(c.mnemonic.clone(), 1);
        }
    }
}

/// Parses raw bytes, replacing invalid UTF-8 sequences.
pub fn parse_las_bytes(bytes: &[u8]) -> Result<LasFile> {
    parse_las(&String::from_utf8_lossy(bytes))
}

pub fn parse_las(text: &str) -> Result<LasFile> {
    let mut section = Section::Preamble;
    let mut version_items: IndexMap<String, HeaderItem> = IndexMap::new();
    let mut well_meta = IndexMap::new();
    let mut params = IndexMap::new();
    let mut curves = Vec::new();
    let mut other = Vec::new();
    let mut data_lines: Vec<(usize, &str)> = Vec::new();
    let (mut seen_v, mut seen_c, mut seen_a) = (false, false, false);

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if section != Section::Ascii && line.starts_with('~') {
            section = section_for(line);
            match section {
                Section::Version => seen_v = true,
                Section::Curve => seen_c = true,
                Section::Ascii => seen_a = true,
                _ => {}
            }
            continue;
        }
        match section {
            Section::Version => {
                let h = parse_header_line(line, lineno)?;
                version_items.insert(h.mnemonic.to_ascii_uppercase(), h.item);
            }
            Section::Well => {
                let h = parse_header_line(line, lineno)?;
                well_meta.insert(h.mnemonic, h.item);
            }
            Section::Parameter => {
                let h = parse_header_line(line, lineno)?;
                params.insert(h.mnemonic, h.item);
            }
            Section::Curve => {
                let h = parse_header_line(line, lineno)?;
                curves.push(CurveSpec {
                    mnemonic: h.mnemonic.split_whitespace().collect::<Vec<_>>().join("_"),
                    unit: h.item.unit,
                    description: h.item.description,
                });
            }
            Section::Other => other.push(line.to_string()),
            Section::Ascii => data_lines.push((lineno, line)),
            Section::Preamble | Section::Unknown => {}
        }
    }

    if !seen_v {
        return Err(Error::MissingSection("~V"));
    }
    let version = match version_items.get("VERS") {
        Some(item) => parse_version(&item.value)?,
        None => return Err(Error::UnsupportedVersion("missing VERS".into())),
    };
    let wrap = version_items
        .get("WRAP")
        .is_some_and(|item| item.value.trim().eq_ignore_ascii_case("YES"));
    if !seen_c {
        return Err(Error::MissingSection("~C"));
    }
    if !seen_a {
        return Err(Error::MissingSection("~A"));
    }
    if curves.is_empty() {
        return Err(Error::InvalidFile("~C section defines no curves".into()));
    }
    dedup_mnemonics(&mut curves);

    let data = parse_data(&data_lines, curves.len(), wrap)?;
    let file = LasFile {
        version,
        wrap,
        well_meta,
        curves,
        params,
        other,
        data,
    };
    if let Some(item) = file.well_meta.get("NULL") {
        if !item.value.trim().parse::<f64>().is_ok_and(f64::is_finite) {
            return Err(Error::InvalidFile(format!("NULL value {:?} is not a number", item.value)));
        }
    }
    Ok(file)
}

fn parse_data(lines: &[(usize, &str)], ncurves: usize, wrap: bool) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    let mut current: Vec<f64> = Vec::with_capacity(ncurves);
    let mut row_start = 0;
    for &(lineno, line) in lines {
        let before = current.len();
        if before == 0 {
            row_start = lineno;
        }
        for tok in line.split_whitespace() {
            let v = tok
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::BadValue {
                    line: lineno,
                    token: tok.to_string(),
                })?;
            current.push(v);
        }
        let complete = if wrap {
            current.len() >= ncurves
        } else {
            true
        };
        if complete {
            if current.len() != ncurves {
                return Err(Error::ColumnMismatch {
                    line: lineno,
                    expected: ncurves,
                    found: if wrap { current.len() } else { current.len() - before },
                });
            }
            rows.push(std::mem::replace(&mut current, Vec::with_capacity(ncurves)));
        }
    }
    if !current.is_empty() {
        return Err(Error::ColumnMismatch {
            line: row_start,
            expected: ncurves,
            found: current.len(),
        });
    }
    Ok(rows)
}

fn format_cell(v: f64) -> String {
    format!("{v:.6}")
}

/// Up to six decimals, trailing zeros dropped.
fn format_header_number(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn write_items(out: &mut String, items: impl Iterator<Item = (String, String, String, String)>) {
    let items: Vec<_> = items.collect();
    let head_width = items
        .iter()
        .map(|(m, u, _, _)| m.len() + u.len() + 1)
        .max()
        .unwrap_or(0);
    let value_width = items.iter().map(|(_, _, v, _)| v.len()).max().unwrap_or(0);
    for (mnemonic, unit, value, description) in items {
        let head = format!("{mnemonic}.{unit}");
        // descriptions may not contain the value/description delimiter
        let description = description.replace(':', ";");
        let _ = writeln!(out, " {head:<head_width$} {value:>value_width$} : {description}");
    }
}

/// Serializes as unwrapped LAS 2.0.
pub fn write_las(file: &LasFile) -> Result<String> {
    file.validate()?;
    let mut out = String::new();
    out.push_str("~Version Information\n");
    write_items(
        &mut out,
        [
            ("VERS", "2.0", "CWLS LOG ASCII STANDARD - VERSION 2.0"),
            ("WRAP", "NO", "ONE LINE PER DEPTH STEP"),
        ]
        .into_iter()
        .map(|(m, v, d)| (m.to_string(), String::new(), v.to_string(), d.to_string())),
    );
    out.push_str("~Well Information\n");
    write_items(
        &mut out,
        file.well_meta
            .iter()
            .map(|(m, it)| (m.clone(), it.unit.clone(), it.value.clone(), it.description.clone())),
    );
    out.push_str("~Curve Information\n");
    write_items(
        &mut out,
        file.curves
            .iter()
            .map(|c| (c.mnemonic.clone(), c.unit.clone(), String::new(), c.description.clone())),
    );
    if !file.params.is_empty() {
        out.push_str("~Parameter Information\n");
        write_items(
            &mut out,
            file.params
                .iter()
                .map(|(m, it)| (m.clone(), it.unit.clone(), it.value.clone(), it.description.clone())),
        );
    }
    if !file.other.is_empty() {
        out.push_str("~Other Information\n");
        for line in &file.other {
            let _ = writeln!(out, "{line}");
        }
    }

    let cells: Vec<Vec<String>> = file
        .data
        .iter()
        .map(|row| row.iter().copied().map(format_cell).collect())
        .collect();
    let width = cells
        .iter()
        .flatten()
        .map(String::len)
        .chain(file.curves.iter().map(|c| c.mnemonic.len()))
        .max()
        .unwrap_or(0);
    out.push_str("~A");
    for c in &file.curves {
        let _ = write!(out, " {:>width$}", c.mnemonic);
    }
    out.push('\n');
    for row in &cells {
        out.push_str("  ");
        for cell in row {
            let _ = write!(out, " {cell:>width$}");
        }
        out.push('\n');
    }
    Ok(out)
}

/// Converts a parsed file into a dataset. Cells equal to the NULL sentinel
/// become missing, rows with a null depth are dropped, and a decreasing
/// depth log is flipped to increasing. `source_name` supplies the well name
/// when the file has none.
pub fn to_dataset(file: &LasFile, source_name: Option<&str>) -> Result<WellDataset> {
    file.validate()?;
    let null = file.null_value();
    let rows: Vec<&Vec<f64>> = file.data.iter().filter(|r| r[0] != null).collect();
    let mut order: Vec<usize> = (0..rows.len()).collect();
    if rows.len() >= 2 {
        let increasing = rows[1][0] > rows[0][0];
        for i in 1..rows.len() {
            let (prev, cur) = (rows[i - 1][0], rows[i][0]);
            if cur == prev {
                return Err(Error::DuplicateDepth { row: i, depth: cur });
            }
            if (cur > prev) != increasing {
                return Err(Error::NonMonotoneDepth { row: i });
            }
        }
        if !increasing {
            order.reverse();
        }
    }

    let well = file
        .well_name()
        .map(str::to_string)
        .or_else(|| {
            source_name
                .and_then(|s| Path::new(s).file_stem())
                .map(|s| s.to_string_lossy().into_owned())
        })
        .unwrap_or_else(|| "WELL".to_string());
    let depth_spec = &file.curves[0];
    let depth: Vec<f64> = order.iter().map(|&i| rows[i][0]).collect();
    let mut ds = WellDataset::new(well, depth, depth_spec.unit.clone())?.with_depth_name(depth_spec.mnemonic.clone());
    for (col, spec) in file.curves.iter().enumerate().skip(1) {
        let values = order
            .iter()
            .map(|&i| {
                let v = rows[i][col];
                (v != null).then_some(v)
            })
            .collect();
        let curve = CurveData::new(values, spec.unit.clone())?.with_description(spec.description.clone());
        ds = ds.with_curve(spec.mnemonic.clone(), curve)?;
    }
    Ok(ds)
}

/// Builds a LAS image of a dataset; missing cells become -999.25.
pub fn dataset_to_las(ds: &WellDataset) -> Result<LasFile> {
    let depth = ds.depth();
    if depth.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let start = depth[0];
    let stop = depth[depth.len() - 1];
    let step = regular_step(depth).unwrap_or(0.0);
    let unit = ds.depth_unit().to_string();
    let mut well_meta = IndexMap::new();
    well_meta.insert("STRT".into(), HeaderItem::new(&unit, format_header_number(start), "START DEPTH"));
    well_meta.insert("STOP".into(), HeaderItem::new(&unit, format_header_number(stop), "STOP DEPTH"));
    well_meta.insert("STEP".into(), HeaderItem::new(&unit, format_header_number(step), "STEP"));
    well_meta.insert("NULL".into(), HeaderItem::new("", format_header_number(DEFAULT_NULL), "NULL VALUE"));
    well_meta.insert("WELL".into(), HeaderItem::new("", ds.well(), "WELL"));

    let mut curves = vec![CurveSpec {
        mnemonic: ds.depth_name().to_string(),
        unit,
        description: "DEPTH".into(),
    }];
    curves.extend(ds.curves().map(|(name, c)| CurveSpec {
        mnemonic: name.to_string(),
        unit: c.unit.clone(),
        description: c.description.clone(),
    }));
    let columns: Vec<&[Option<f64>]> = ds.curves().map(|(_, c)| c.values()).collect();
    let data = depth
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            std::iter::once(d)
                .chain(columns.iter().map(|c| c[i].unwrap_or(DEFAULT_NULL)))
                .collect()
        })
        .collect();
    Ok(LasFile {
        version: LasVersion::V2_0,
        wrap: false,
        well_meta,
        curves,
        params: IndexMap::new(),
        other: Vec::new(),
        data,
    })
}

/// The common spacing if every step agrees with the first to 1e-6 relative.
fn regular_step(depth: &[f64]) -> Option<f64> {
    if depth.len() < 2 {
        return None;
    }
    let first = depth[1] - depth[0];
    depth
        .windows(2)
        .all(|w| ((w[1] - w[0]) - first).abs() <= 1e-6 * first.abs())
        .then_some(first)
}

fn format_csv_number(v: f64) -> String {
    v.to_string()
}

/// Serializes a table as comma-separated text with a header row, LF line
/// endings and empty fields for missing cells.
pub fn table_to_csv(table: &MultiWellTable) -> Result<String> {
    let mut wtr = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    wtr.write_record(table.columns())?;
    let mut record: Vec<String> = Vec::with_capacity(table.curves.len() + 2);
    for row in &table.rows {
        record.clear();
        record.push(row.well.clone());
        record.push(format_csv_number(row.depth));
        record.extend(row.values.iter().map(|v| v.map(format_csv_number).unwrap_or_default()));
        wtr.write_record(&record)?;
    }
    let bytes = wtr.into_inner().map_err(|e| Error::Csv(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Csv(e.to_string()))
}

/// Pools the wells into a long table and renders it as CSV.
pub fn merge_to_csv<S: AsRef<str>>(datasets: &[WellDataset], curves: &[S]) -> Result<(MultiWellTable, String)> {
    let table = concat_wells(datasets, curves)?;
    let text = table_to_csv(&table)?;
    Ok((table, text))
}

/// Reads CSV in the layout produced by [`table_to_csv`]. Row indices are
/// assigned per well in file order.
pub fn read_table_csv(text: &str) -> Result<MultiWellTable> {
    let mut rdr = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let headers = rdr.headers()?.clone();
    if headers.len() < 2 || &headers[0] != "WELL" || &headers[1] != "DEPT" {
        return Err(Error::Csv("header must start with WELL,DEPT".into()));
    }
    let curves: Vec<String> = headers.iter().skip(2).map(str::to_string).collect();
    let mut counters: IndexMap<String, usize> = IndexMap::new();
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let number = |field: &str| -> Result<f64> {
            field
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::BadValue {
                    line,
                    token: field.to_string(),
                })
        };
        let well = rec[0].to_string();
        let depth = number(&rec[1])?;
        let values = rec
            .iter()
            .skip(2)
            .map(|f| if f.trim().is_empty() { Ok(None) } else { number(f).map(Some) })
            .collect::<Result<Vec<_>>>()?;
        let counter = counters.entry(well.clone()).or_insert(0);
        rows.push(TableRow {
            well,
            row_index: *counter,
            depth,
            values,
        });
        *counter += 1;
    }
    Ok(MultiWellTable { curves, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "~VERSION INFORMATION
 VERS.   2.0 : CWLS LOG ASCII STANDARD - VERSION 2.0
 WRAP.   NO  : ONE LINE PER DEPTH STEP
~WELL INFORMATION
 STRT.M   100.0 : START DEPTH
 STOP.M   101.0 : STOP DEPTH
 STEP.M     0.5 : STEP
 NULL.  -999.25 : NULL VALUE
 WELL.   ALPHA-1 : WELL
~CURVE INFORMATION
 DEPT.M     : DEPTH
 GR  .GAPI  : GAMMA RAY
~A  DEPT  GR
 100.0  45.2
 100.5  -999.25
 101.0  60.0
";

    #[test]
    fn header_line_grammar() {
        let h = parse_header_line(" DATE.  12:30 : LOG TIME", 3).unwrap();
        assert_eq!(h.mnemonic, "DATE");
        assert_eq!(h.item, HeaderItem::new("", "12:30", "LOG TIME"));
        let h = parse_header_line("STRT.M  1670.0 : START", 1).unwrap();
        assert_eq!(h.item.unit, "M");
        assert_eq!(h.item.value, "1670.0");
        let h = parse_header_line("RHOB.G/C3:", 1).unwrap();
        assert_eq!((h.item.unit.as_str(), h.item.value.as_str()), ("G/C3", ""));
        assert!(matches!(
            parse_header_line("NO DELIMITERS HERE", 9),
            Err(Error::MalformedHeaderLine { line: 9, .. })
        ));
        assert!(matches!(
            parse_header_line("GR.GAPI gamma", 4),
            Err(Error::MalformedHeaderLine { line: 4, .. })
        ));
    }

    #[test]
    fn sentinel_is_kept_raw() {
        let f = parse_las(MINIMAL).unwrap();
        assert_eq!(f.version, LasVersion::V2_0);
        assert_eq!(f.data[1][1], -999.25);
        let ds = to_dataset(&f, None).unwrap();
        assert_eq!(ds.curve("GR").unwrap().missing_count(), 1);
        assert_eq!(ds.well(), "ALPHA-1");
    }

    #[test]
    fn version_three_rejected() {
        let text = MINIMAL.replace("VERS.   2.0", "VERS.   3.0");
        assert_eq!(parse_las(&text), Err(Error::UnsupportedVersion("3.0".into())));
    }

    #[test]
    fn missing_sections() {
        let no_a = MINIMAL.split("~A").next().unwrap();
        assert_eq!(parse_las(no_a), Err(Error::MissingSection("~A")));
        let no_c: String = MINIMAL.replace("~CURVE INFORMATION", "~PARAMETER INFORMATION");
        assert_eq!(parse_las(&no_c), Err(Error::MissingSection("~C")));
    }

    #[test]
    fn column_mismatch_reports_line() {
        let text = MINIMAL.replace(" 100.5  -999.25", " 100.5  -999.25 7");
        assert_eq!(
            parse_las(&text),
            Err(Error::ColumnMismatch {
                line: 15,
                expected: 2,
                found: 3
            })
        );
    }

    #[test]
    fn duplicate_mnemonics_get_suffixes() {
        let text = MINIMAL
            .replace(" GR  .GAPI  : GAMMA RAY", " GR.GAPI : A\n GR.GAPI : B\n GR.GAPI : C")
            .replace(" 100.0  45.2", " 100.0 1 2 3")
            .replace(" 100.5  -999.25", " 100.5 1 2 3")
            .replace(" 101.0  60.0", " 101.0 1 2 3");
        let f = parse_las(&text).unwrap();
        let names: Vec<_> = f.curves.iter().map(|c| c.mnemonic.as_str()).collect();
        assert_eq!(names, ["DEPT", "GR", "GR_1", "GR_2"]);
    }

    #[test]
    fn decreasing_depth_is_flipped() {
        let text = MINIMAL
            .replace(" 100.0  45.2", " 100.5  45.2")
            .replace(" 100.5  -999.25", " 100.0  50.0")
            .replace(" 101.0  60.0", " 99.5  60.0");
        let ds = to_dataset(&parse_las(&text).unwrap(), None).unwrap();
        assert_eq!(ds.depth(), &[99.5, 100.0, 100.5]);
        assert_eq!(ds.curve("GR").unwrap().values(), &[Some(60.0), Some(50.0), Some(45.2)]);
    }

    #[test]
    fn non_monotone_and_duplicate_depth() {
        let zig = MINIMAL.replace(" 101.0  60.0", " 100.2  60.0");
        assert!(matches!(
            to_dataset(&parse_las(&zig).unwrap(), None),
            Err(Error::NonMonotoneDepth { row: 2 })
        ));
        let dup = MINIMAL.replace(" 101.0  60.0", " 100.5  60.0");
        assert!(matches!(
            to_dataset(&parse_las(&dup).unwrap(), None),
            Err(Error::DuplicateDepth { row: 2, .. })
        ));
    }

    #[test]
    fn filename_fallback_for_well_name() {
        let text = MINIMAL.replace(" WELL.   ALPHA-1 : WELL\n", "");
        let ds = to_dataset(&parse_las(&text).unwrap(), Some("dir/bravo.las")).unwrap();
        assert_eq!(ds.well(), "bravo");
    }

    #[test]
    fn writer_emits_sentinel_token() {
        let f = parse_las(MINIMAL).unwrap();
        let out = write_las(&f).unwrap();
        assert!(out.contains("-999.250000"));
        assert!(out.contains("WRAP.") && out.contains(" NO : "));
        let back = parse_las(&out).unwrap();
        assert_eq!(back.data, f.data);
        assert_eq!(back.well_meta, f.well_meta);
    }

    #[test]
    fn irregular_step_is_zero() {
        let ds = WellDataset::new("W", vec![0.0, 0.5, 1.7], "M")
            .unwrap()
            .with_curve("GR", CurveData::new(vec![Some(1.0), None, Some(3.0)], "GAPI").unwrap())
            .unwrap();
        let f = dataset_to_las(&ds).unwrap();
        assert_eq!(f.well_meta["STEP"].value, "0");
        assert_eq!(f.data[1][1], DEFAULT_NULL);
        let regular = WellDataset::new("W", vec![0.0, 0.1524, 0.3048], "M").unwrap();
        assert_eq!(dataset_to_las(&regular).unwrap().well_meta["STEP"].value, "0.1524");
        let empty = WellDataset::new("W", vec![], "M").unwrap();
        assert_eq!(dataset_to_las(&empty), Err(Error::EmptyDataset));
    }

    #[test]
    fn csv_layout() {
        let ds = to_dataset(&parse_las(MINIMAL).unwrap(), None).unwrap();
        let (table, text) = merge_to_csv(&[ds], &["GR"]).unwrap();
        assert_eq!(table.rows.len(), 3);
        assert_eq!(text, "WELL,DEPT,GR\nALPHA-1,100,45.2\nALPHA-1,100.5,\nALPHA-1,101,60\n");
        let back = read_table_csv(&text).unwrap();
        assert_eq!(back, table);
    }
}
