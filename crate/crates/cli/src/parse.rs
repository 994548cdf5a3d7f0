//! Line-oriented file formats.
//!
//! Schema files (`.fd`):
//! ```text
//! # comment
//! attributes: A1 A2 A3
//! fd: A1 -> A2
//! fd: A1 A2 -> A3
//! ```
//!
//! Decomposition files (`.dec`):
//! ```text
//! table R1: A1 A2
//! table R2: A1 A3
//! ```

use fdnf_core::closure::Limits;
use fdnf_core::schema::{Attribute, AttributeSet, Decomposition, Fd, FdSet, RelationSchema, Schema};

/// A parse problem tied to a source position (1-based line and column).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, col: usize, message: impl Into<String>) -> ParseError {
        ParseError { line, col, message: message.into() }
    }
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.col, self.message)
    }
}

/// A parsed schema file, remembering where each declaration came from.
#[derive(Clone, PartialEq, Debug)]
pub struct SchemaDocument {
    pub schema: Schema,
    /// Line number of the `attributes:` declaration.
    pub attributes_line: usize,
    /// Line number of each dependency, in declaration order.
    pub fd_lines: Vec<(usize, Fd)>,
}

/// Splits a line into whitespace-separated tokens with their 1-based
/// character columns. Everything from `#` on is a comment.
fn tokens(line: &str) -> Vec<(usize, String)> {
    let cut = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let mut out = Vec::new();
    let mut col = 0usize;
    let mut cur = String::new();
    let mut cur_col = 0usize;
    for ch in cut.chars() {
        col += 1;
        if ch.is_whitespace() {
            if !cur.is_empty() {
                out.push((cur_col, std::mem::take(&mut cur)));
            }
        } else {
            if cur.is_empty() {
                cur_col = col;
            }
            cur.push(ch);
        }
    }
    if !cur.is_empty() {
        out.push((cur_col, cur));
    }
    out
}

fn parse_name(
    line_no: usize,
    col: usize,
    raw: &str,
    errors: &mut Vec<ParseError>,
) -> Option<Attribute> {
    match Attribute::new(raw) {
        Ok(a) => Some(a),
        Err(_) => {
            errors.push(ParseError::new(
                line_no,
                col,
                format!("invalid attribute name `{raw}` (letter, then letters/digits/underscores)"),
            ));
            None
        }
    }
}

/// Parses a schema file, collecting every problem rather than stopping at
/// the first one.
pub fn parse_schema_file(text: &str) -> Result<SchemaDocument, Vec<ParseError>> {
    let mut errors: Vec<ParseError> = Vec::new();
    let mut declared: Option<(usize, AttributeSet)> = None;
    // (line, col-of-keyword, lhs tokens, rhs tokens)
    type RawFd = (usize, Vec<(usize, String)>, Vec<(usize, String)>);
    let mut raw_fds: Vec<RawFd> = Vec::new();

    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let toks = tokens(line);
        if toks.is_empty() {
            continue;
        }
        let (kw_col, keyword) = (&toks[0].0, toks[0].1.as_str());
        match keyword {
            "attributes:" => {
                if let Some((first, _)) = declared {
                    errors.push(ParseError::new(
                        line_no,
                        *kw_col,
                        format!("duplicate `attributes:` line (first one is on line {first})"),
                    ));
                    continue;
                }
                let mut universe = AttributeSet::empty();
                for (col, raw) in &toks[1..] {
                    if let Some(a) = parse_name(line_no, *col, raw, &mut errors) {
                        if universe.contains(&a) {
                            errors.push(ParseError::new(
                                line_no,
                                *col,
                                format!("attribute `{a}` declared twice"),
                            ));
                        } else {
                            universe.insert(a);
                        }
                    }
                }
                if universe.is_empty() && toks.len() == 1 {
                    errors.push(ParseError::new(
                        line_no,
                        *kw_col,
                        "at least one attribute is required",
                    ));
                }
                declared = Some((line_no, universe));
            }
            "fd:" => {
                let arrow = toks[1..].iter().position(|(_, t)| t == "->");
                match arrow {
                    None => errors.push(ParseError::new(
                        line_no,
                        *kw_col,
                        "expected `->` between the two sides of the dependency",
                    )),
                    Some(i) => {
                        let lhs: Vec<(usize, String)> = toks[1..1 + i].to_vec();
                        let rhs: Vec<(usize, String)> = toks[2 + i..].to_vec();
                        let arrow_col = toks[1 + i].0;
                        if lhs.is_empty() {
                            errors.push(ParseError::new(
                                line_no,
                                arrow_col,
                                "the left side of a dependency must name at least one attribute",
                            ));
                        }
                        if rhs.is_empty() {
                            errors.push(ParseError::new(
                                line_no,
                                arrow_col,
                                "the right side of a dependency must name at least one attribute",
                            ));
                        }
                        if !lhs.is_empty() && !rhs.is_empty() {
                            raw_fds.push((line_no, lhs, rhs));
                        }
                    }
                }
            }
            other => errors.push(ParseError::new(
                line_no,
                *kw_col,
                format!("expected `attributes:` or `fd:`, found `{other}`"),
            )),
        }
    }

    let (attributes_line, universe) = match declared {
        Some(d) => d,
        None => {
            errors.push(ParseError::new(1, 1, "missing `attributes:` line"));
            return Err(errors);
        }
    };

    let mut fd_lines = Vec::new();
    let mut fds = FdSet::empty();
    for (line_no, lhs_toks, rhs_toks) in raw_fds {
        let side = |toks: &[(usize, String)], errors: &mut Vec<ParseError>| -> AttributeSet {
            let mut out = AttributeSet::empty();
            for (col, raw) in toks {
                if let Some(a) = parse_name(line_no, *col, raw, errors) {
                    if universe.contains(&a) {
                        out.insert(a);
                    } else {
                        errors.push(ParseError::new(
                            line_no,
                            *col,
                            format!("unknown attribute `{a}` (not in the `attributes:` line)"),
                        ));
                    }
                }
            }
            out
        };
        let lhs = side(&lhs_toks, &mut errors);
        let rhs = side(&rhs_toks, &mut errors);
        if !lhs.is_empty() && !rhs.is_empty() {
            let fd = Fd::new(lhs, rhs);
            fds.insert(fd.clone());
            fd_lines.push((line_no, fd));
        }
    }

    if !errors.is_empty() {
        return Err(errors);
    }
    let schema = Schema::new(universe, fds).expect("parser pre-validates every schema rule");
    Ok(SchemaDocument { schema, attributes_line, fd_lines })
}

/// Why a decomposition file could not be turned into a [`Decomposition`].
#[derive(Debug)]
pub enum DecompositionError {
    /// Malformed lines or names not in the schema.
    Parse(Vec<ParseError>),
    /// Well-formed, but the tables do not cover the schema's attributes.
    Incomplete(AttributeSet),
    /// A size limit tripped while deriving table keys.
    Limit(fdnf_core::Error),
}

impl std::fmt::Display for DecompositionError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DecompositionError::Parse(errors) => {
                for (i, e) in errors.iter().enumerate() {
                    if i > 0 {
                        writeln!(f)?;
                    }
                    write!(f, "{e}")?;
                }
                Ok(())
            }
            DecompositionError::Incomplete(missing) => write!(
                f,
                "decomposition does not cover the schema: missing {}",
                missing.braced()
            ),
            DecompositionError::Limit(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for DecompositionError {}

/// Parses a decomposition file against an already-parsed schema. Table
/// keys are always computed from the schema's dependencies, never declared.
pub fn parse_decomposition_file(
    text: &str,
    schema: &Schema,
    limits: &Limits,
) -> Result<Decomposition, DecompositionError> {
    let mut errors: Vec<ParseError> = Vec::new();
    let mut tables: Vec<(String, AttributeSet)> = Vec::new();

    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let toks = tokens(line);
        if toks.is_empty() {
            continue;
        }
        if toks[0].1 != "table" {
            errors.push(ParseError::new(
                line_no,
                toks[0].0,
                format!("expected `table`, found `{}`", toks[0].1),
            ));
            continue;
        }
        if toks.len() < 2 || !toks[1].1.ends_with(':') {
            errors.push(ParseError::new(
                line_no,
                toks[0].0,
                "expected a table name followed by `:`",
            ));
            continue;
        }
        let name = toks[1].1.trim_end_matches(':').to_string();
        if Attribute::new(&name).is_err() {
            errors.push(ParseError::new(line_no, toks[1].0, format!("invalid table name `{name}`")));
            continue;
        }
        if tables.iter().any(|(n, _)| n == &name) {
            errors.push(ParseError::new(
                line_no,
                toks[1].0,
                format!("table `{name}` declared twice"),
            ));
            continue;
        }
        let mut attrs = AttributeSet::empty();
        for (col, raw) in &toks[2..] {
            if let Some(a) = parse_name(line_no, *col, raw, &mut errors) {
                if schema.universe().contains(&a) {
                    attrs.insert(a);
                } else {
                    errors.push(ParseError::new(
                        line_no,
                        *col,
                        format!("unknown attribute `{a}` (not in the schema)"),
                    ));
                }
            }
        }
        if attrs.is_empty() && toks.len() == 2 {
            errors.push(ParseError::new(line_no, toks[1].0, "a table needs at least one attribute"));
        }
        if !attrs.is_empty() {
            tables.push((name, attrs));
        }
    }

    if tables.is_empty() && errors.is_empty() {
        errors.push(ParseError::new(1, 1, "no `table` lines found"));
    }
    if !errors.is_empty() {
        return Err(DecompositionError::Parse(errors));
    }

    let mut relations = Vec::new();
    for (name, attrs) in tables {
        let rel = RelationSchema::derive(&name, attrs, schema.fds(), limits)
            .map_err(DecompositionError::Limit)?;
        relations.push(rel);
    }
    Decomposition::untagged(relations, schema.universe()).map_err(|e| match e {
        fdnf_core::ValidationError::NotAttributePreserving { missing } => {
            DecompositionError::Incomplete(missing)
        }
        other => DecompositionError::Parse(vec![ParseError::new(1, 1, other.to_string())]),
    })
}

/// The schema in file syntax; `parse_schema_file` reads it back to an
/// equal schema.
pub fn render_schema(schema: &Schema) -> String {
    let mut out = String::from("attributes:");
    for a in schema.universe().iter() {
        out.push(' ');
        out.push_str(a.name());
    }
    out.push('\n');
    for fd in schema.fds().iter() {
        out.push_str("fd:");
        for a in fd.lhs().iter() {
            out.push(' ');
            out.push_str(a.name());
        }
        out.push_str(" ->");
        for a in fd.rhs().iter() {
            out.push(' ');
            out.push_str(a.name());
        }
        out.push('\n');
    }
    out
}

/// The decomposition in file syntax; `parse_decomposition_file` reads it
/// back to the same tables.
pub fn render_decomposition(d: &Decomposition) -> String {
    let mut out = String::new();
    for rel in d.relations() {
        out.push_str("table ");
        out.push_str(rel.name());
        out.push(':');
        for a in rel.attrs().iter() {
            out.push(' ');
            out.push_str(a.name());
        }
        out.push('\n');
    }
    out
}
