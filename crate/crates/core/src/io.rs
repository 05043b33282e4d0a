//! Text formats for matrices and probe states.
//!
//! A matrix file starts with `dim d` and continues with `d` rows of `d`
//! whitespace-separated complex entries written `re+imj` (e.g. `0.5-0.5j`;
//! bare reals and pure-imaginary entries are accepted).  A state file starts
//! with `weights w_0 .. w_{d-1}` and continues with either a single
//! `pure a_0 .. a_{d-1}` amplitude line or a matrix block of the same
//! dimension.  Blank lines are ignored; parse errors carry 1-based line
//! numbers.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, DensityMatrix, HermitianOperator};
use crate::states::{ProbeState, U1Generator};

/// Render a complex number as `re+imj`, or a bare real when exact.
///
/// Uses shortest round-trip decimals, so `parse_complex` recovers the value
/// bit-exactly.
pub fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im < 0.0 {
        format!("{}{}j", z.re, z.im)
    } else {
        format!("{}+{}j", z.re, z.im)
    }
}

/// Parse `re+imj`, a bare real, or a pure-imaginary `imj` token.
pub fn parse_complex(token: &str) -> Result<Complex64> {
    complex_from_token(token)
        .ok_or_else(|| Error::InvalidArgument(format!("unreadable complex number {token:?}")))
}

fn complex_from_token(token: &str) -> Option<Complex64> {
    let t = token.trim();
    let (re, im): (f64, f64) = if let Some(body) = t.strip_suffix(['j', 'J']) {
        match split_imaginary(body) {
            Some((re_part, im_part)) => (re_part.parse().ok()?, im_part.parse().ok()?),
            None => (0.0, body.parse().ok()?),
        }
    } else {
        (t.parse().ok()?, 0.0)
    };
    if re.is_finite() && im.is_finite() {
        Some(Complex64::new(re, im))
    } else {
        None
    }
}

/// Split `re+im` at the sign that separates the parts, ignoring a leading
/// sign and signs inside exponents.
fn split_imaginary(body: &str) -> Option<(&str, &str)> {
    let bytes = body.as_bytes();
    for i in (1..bytes.len()).rev() {
        if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
            return Some((&body[..i], &body[i..]));
        }
    }
    None
}

/// Render a matrix in the `dim d` + rows format.
pub fn format_matrix(m: &ComplexMatrix) -> String {
    let d = m.dim();
    let mut out = format!("dim {d}\n");
    for i in 0..d {
        let row: Vec<String> = (0..d).map(|j| format_complex(m.get(i, j))).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Render a probe state: `weights ...` then a `pure` amplitude line when the
/// state was built pure, otherwise its density matrix block.
pub fn format_state(probe: &ProbeState) -> String {
    let weights: Vec<String> =
        probe.generator().weights().iter().map(|w| w.to_string()).collect();
    let mut out = format!("weights {}\n", weights.join(" "));
    match probe.amplitudes() {
        Some(amps) => {
            let row: Vec<String> = amps.iter().map(|&a| format_complex(a)).collect();
            out.push_str("pure ");
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        None => out.push_str(&format_matrix(probe.state().matrix())),
    }
    out
}

/// Numbered non-blank lines of a text block.
struct Cursor<'a> {
    items: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        let items = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty())
            .collect();
        Self { items, pos: 0 }
    }

    fn next(&mut self) -> Option<(usize, &'a str)> {
        let item = self.items.get(self.pos).copied();
        if item.is_some() {
            self.pos += 1;
        }
        item
    }

    fn peek(&self) -> Option<(usize, &'a str)> {
        self.items.get(self.pos).copied()
    }

    fn last_line(&self) -> usize {
        self.items.last().map_or(0, |(n, _)| *n)
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Parse a matrix in the `dim d` + rows format.
pub fn parse_matrix(text: &str) -> Result<ComplexMatrix> {
    let mut cursor = Cursor::new(text);
    let m = parse_matrix_block(&mut cursor)?;
    if let Some((line, _)) = cursor.peek() {
        return Err(parse_err(line, "unexpected content after the matrix rows"));
    }
    Ok(m)
}

fn parse_matrix_block(cursor: &mut Cursor) -> Result<ComplexMatrix> {
    let (line, header) = cursor
        .next()
        .ok_or_else(|| parse_err(cursor.last_line(), "expected a `dim d` header"))?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() != 2 || tokens[0] != "dim" {
        return Err(parse_err(line, format!("expected `dim d`, got {header:?}")));
    }
    let d: usize = tokens[1]
        .parse()
        .map_err(|_| parse_err(line, format!("unreadable dimension {:?}", tokens[1])))?;
    if d == 0 {
        return Err(parse_err(line, "dimension must be at least 1"));
    }
    let mut m = ComplexMatrix::zeros(d);
    for i in 0..d {
        let (line, row) = cursor
            .next()
            .ok_or_else(|| parse_err(cursor.last_line(), format!("expected {d} matrix rows")))?;
        let entries: Vec<&str> = row.split_whitespace().collect();
        if entries.len() != d {
            return Err(parse_err(
                line,
                format!("row {i} has {} entries, expected {d}", entries.len()),
            ));
        }
        for (j, tok) in entries.iter().enumerate() {
            let z = complex_from_token(tok).ok_or_else(|| {
                parse_err(line, format!("unreadable complex entry {tok:?} at column {j}"))
            })?;
            m.set(i, j, z);
        }
    }
    Ok(m)
}

/// A parsed state file: the generator weights plus either pure amplitudes or
/// a Hermitian matrix (not necessarily normalized — alternatives in the
/// testing problem may carry trace other than 1).
#[derive(Debug, Clone)]
pub enum StateFile {
    Pure { weights: Vec<i64>, amplitudes: Vec<Complex64> },
    Matrix { weights: Vec<i64>, operator: HermitianOperator },
}

impl StateFile {
    pub fn weights(&self) -> &[i64] {
        match self {
            StateFile::Pure { weights, .. } | StateFile::Matrix { weights, .. } => weights,
        }
    }

    pub fn generator(&self) -> Result<U1Generator> {
        U1Generator::new(self.weights().to_vec())
    }

    /// Interpret as a normalized probe state.
    pub fn into_probe(self, label: impl Into<String>) -> Result<ProbeState> {
        let generator = self.generator()?;
        match self {
            StateFile::Pure { amplitudes, .. } => ProbeState::pure(amplitudes, generator, label),
            StateFile::Matrix { operator, .. } => {
                ProbeState::new(DensityMatrix::new(operator)?, generator, label)
            }
        }
    }

    /// Interpret as a (possibly unnormalized) Hermitian alternative.
    pub fn into_operator(self) -> Result<(HermitianOperator, U1Generator)> {
        let generator = self.generator()?;
        let op = match self {
            StateFile::Pure { amplitudes, .. } => HermitianOperator::outer(&amplitudes),
            StateFile::Matrix { operator, .. } => operator,
        };
        Ok((op, generator))
    }
}

/// Parse a state file (`weights ...` then `pure ...` or a matrix block).
pub fn parse_state(text: &str) -> Result<StateFile> {
    let mut cursor = Cursor::new(text);
    let (line, header) = cursor
        .next()
        .ok_or_else(|| parse_err(0, "expected a `weights ...` header"))?;
    let mut tokens = header.split_whitespace();
    if tokens.next() != Some("weights") {
        return Err(parse_err(line, format!("expected `weights ...`, got {header:?}")));
    }
    let weights: Vec<i64> = tokens
        .map(|t| t.parse().map_err(|_| parse_err(line, format!("unreadable weight {t:?}"))))
        .collect::<Result<_>>()?;
    if weights.is_empty() {
        return Err(parse_err(line, "need at least one weight"));
    }
    let (body_line, body) = cursor
        .peek()
        .ok_or_else(|| parse_err(cursor.last_line(), "expected `pure ...` or a matrix block"))?;
    if let Some(rest) = body.strip_prefix("pure") {
        cursor.next();
        let amplitudes: Vec<Complex64> = rest
            .split_whitespace()
            .map(|t| {
                complex_from_token(t).ok_or_else(|| {
                    parse_err(body_line, format!("unreadable complex amplitude {t:?}"))
                })
            })
            .collect::<Result<_>>()?;
        if amplitudes.len() != weights.len() {
            return Err(parse_err(
                body_line,
                format!("{} amplitudes for {} weights", amplitudes.len(), weights.len()),
            ));
        }
        if let Some((line, _)) = cursor.peek() {
            return Err(parse_err(line, "unexpected content after the amplitude line"));
        }
        Ok(StateFile::Pure { weights, amplitudes })
    } else {
        let m = parse_matrix_block(&mut cursor)?;
        if m.dim() != weights.len() {
            return Err(parse_err(
                body_line,
                format!("matrix dimension {} does not match {} weights", m.dim(), weights.len()),
            ));
        }
        if let Some((line, _)) = cursor.peek() {
            return Err(parse_err(line, "unexpected content after the matrix rows"));
        }
        Ok(StateFile::Matrix { weights, operator: HermitianOperator::try_new(m)? })
    }
}
