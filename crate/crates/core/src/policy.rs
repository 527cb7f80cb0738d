//! Policy layer: imperative actions, declarative goals and an intent
//! grammar that compiles to goals.
//!
//! The intent language is one statement per string:
//!
//! ```text
//! intent  := "guarantee" subject metric cmp NUMBER unit
//!          | "prioritize" subject
//! subject := "flow" IDENT
//! metric  := "throughput" | "latency"
//! cmp     := "at-least" | "at-most"
//! unit    := "mbps" | "kbps" | "ms"
//! ```
//!
//! Keywords are case-insensitive. IDENT is a run of `[A-Za-z0-9_.:-]`.
//! NUMBER is an unsigned decimal with optional fraction and exponent.
//! "prioritize" compiles to a throughput floor at the flow's declared
//! demand. Goal values are stored canonically (b/s and ms); the source
//! unit is kept so a goal can be rendered back to the exact intent text.

use serde::{Deserialize, Serialize};

use crate::si::ActionKind;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IntentError {
    #[error("parse error at byte {offset}: expected {expected:?}, found {found:?}")]
    Parse {
        offset: usize,
        expected: Vec<&'static str>,
        found: Option<String>,
    },
    #[error("semantic error: {reason}")]
    Semantic { reason: String },
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PolicyError {
    #[error("policy #{index}: {source}")]
    Intent { index: usize, source: IntentError },
    #[error("duplicate goal id {id:?} (policies #{first} and #{second})")]
    DuplicateGoal {
        id: String,
        first: usize,
        second: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Throughput,
    Latency,
}

impl Metric {
    fn keyword(self) -> &'static str {
        match self {
            Metric::Throughput => "throughput",
            Metric::Latency => "latency",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparator {
    AtLeast,
    AtMost,
}

impl Comparator {
    fn keyword(self) -> &'static str {
        match self {
            Comparator::AtLeast => "at-least",
            Comparator::AtMost => "at-most",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Unit {
    Mbps,
    Kbps,
    Ms,
}

impl Unit {
    pub fn scale(self) -> f64 {
        match self {
            Unit::Mbps => 1.0e6,
            Unit::Kbps => 1.0e3,
            Unit::Ms => 1.0,
        }
    }

    fn keyword(self) -> &'static str {
        match self {
            Unit::Mbps => "mbps",
            Unit::Kbps => "kbps",
            Unit::Ms => "ms",
        }
    }
}

/// A service-level goal. `value` is canonical (b/s for throughput, ms for
/// latency); `unit` remembers how the author wrote it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Goal {
    pub id: String,
    pub subject: String,
    pub metric: Metric,
    pub comparator: Comparator,
    pub value: f64,
    pub unit: Unit,
}

impl Goal {
    /// Canonical constructor; derives the id from subject and metric.
    pub fn new(
        subject: impl Into<String>,
        metric: Metric,
        comparator: Comparator,
        value: f64,
        unit: Unit,
    ) -> Goal {
        let subject = subject.into();
        Goal {
            id: format!("{}-{}", subject, metric.keyword()),
            subject,
            metric,
            comparator,
            value,
            unit,
        }
    }

    /// Renders the goal back to intent text. The numeric literal is chosen
    /// so that parsing the text reproduces `value` bit for bit; see
    /// [`render_number`].
    pub fn to_intent_text(&self) -> String {
        format!(
            "guarantee flow {} {} {} {} {}",
            self.subject,
            self.metric.keyword(),
            self.comparator.keyword(),
            render_number(self.value, self.unit.scale()),
            self.unit.keyword()
        )
    }
}

/// Shortest decimal literal `s` such that `parse(s) * scale == value`
/// exactly. Any value that entered through the parser equals some literal
/// times `scale`, and that literal sits within two ulps of `value / scale`
/// (one rounding each from the original multiply and this divide), so a
/// short outward probe always recovers it. Falls back to the plain
/// quotient for values no literal can reach, which no parsed goal holds.
fn render_number(value: f64, scale: f64) -> String {
    let q = value / scale;
    let (mut up, mut down) = (q, q);
    for _ in 0..4 {
        for cand in [up, down] {
            if cand * scale == value {
                return format!("{cand}");
            }
        }
        up = up.next_up();
        down = down.next_down();
    }
    format!("{q}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GoalStatus {
    Satisfied,
    Violated,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckResult {
    pub status: GoalStatus,
    /// Relative headroom: positive means inside the goal, negative outside.
    /// For `at-least`, `(mean - value) / value`; for `at-most`, the mirror.
    pub margin: f64,
}

/// Evaluates a goal against a windowed mean. Boundary values satisfy the
/// goal (margin zero).
pub fn check(goal: &Goal, windowed_mean: f64) -> CheckResult {
    let margin = match goal.comparator {
        Comparator::AtLeast => (windowed_mean - goal.value) / goal.value,
        Comparator::AtMost => (goal.value - windowed_mean) / goal.value,
    };
    let status = if margin >= 0.0 {
        GoalStatus::Satisfied
    } else {
        GoalStatus::Violated
    };
    CheckResult { status, margin }
}

/// One policy statement. Imperative policies fire once at activation;
/// declarative and intent policies become monitored goals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Policy {
    Imperative { action: ActionKind },
    Declarative { goal: Goal },
    Intent { text: String },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Compiled {
    pub goals: Vec<Goal>,
    /// Actions to issue at activation time, in declaration order.
    pub immediate: Vec<ActionKind>,
}

/// Compiles a policy list into monitored goals plus immediate actions.
/// `demand_of` resolves a flow id to its declared demand in b/s, used by
/// "prioritize" intents.
pub fn compile(
    policies: &[Policy],
    demand_of: impl Fn(&str) -> Option<f64>,
) -> Result<Compiled, PolicyError> {
    let mut out = Compiled::default();
    let mut goal_origin: Vec<usize> = Vec::new();
    for (index, policy) in policies.iter().enumerate() {
        let goal = match policy {
            Policy::Imperative { action } => {
                out.immediate.push(action.clone());
                continue;
            }
            Policy::Declarative { goal } => goal.clone(),
            Policy::Intent { text } => parse_intent(text, &demand_of)
                .map_err(|source| PolicyError::Intent { index, source })?,
        };
        if let Some(pos) = out.goals.iter().position(|g| g.id == goal.id) {
            return Err(PolicyError::DuplicateGoal {
                id: goal.id,
                first: goal_origin[pos],
                second: index,
            });
        }
        goal_origin.push(index);
        out.goals.push(goal);
    }
    Ok(out)
}

struct Cursor<'a> {
    len: usize,
    tokens: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(input: &'a str) -> Self {
        let mut tokens = Vec::new();
        let mut start = None;
        for (i, c) in input.char_indices() {
            if c.is_whitespace() {
                if let Some(s) = start.take() {
                    tokens.push((s, &input[s..i]));
                }
            } else if start.is_none() {
                start = Some(i);
            }
        }
        if let Some(s) = start {
            tokens.push((s, &input[s..]));
        }
        Cursor {
            len: input.len(),
            tokens,
            pos: 0,
        }
    }

    fn peek(&self) -> Option<(usize, &'a str)> {
        self.tokens.get(self.pos).copied()
    }

    fn error(&self, expected: &[&'static str]) -> IntentError {
        let (offset, found) = match self.peek() {
            Some((o, t)) => (o, Some(t.to_owned())),
            None => (self.len, None),
        };
        IntentError::Parse {
            offset,
            expected: expected.to_vec(),
            found,
        }
    }

    fn keyword(&mut self, options: &[&'static str]) -> Result<usize, IntentError> {
        if let Some((_, tok)) = self.peek() {
            for (i, kw) in options.iter().enumerate() {
                if tok.eq_ignore_ascii_case(kw) {
                    self.pos += 1;
                    return Ok(i);
                }
            }
        }
        Err(self.error(options))
    }

    fn ident(&mut self) -> Result<&'a str, IntentError> {
        if let Some((_, tok)) = self.peek() {
            let ok = !tok.is_empty()
                && tok
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.' | ':'));
            if ok {
                self.pos += 1;
                return Ok(tok);
            }
        }
        Err(self.error(&["<flow-id>"]))
    }

    fn number(&mut self) -> Result<f64, IntentError> {
        if let Some((_, tok)) = self.peek() {
            let starts_numeric = tok
                .chars()
                .next()
                .is_some_and(|c| c.is_ascii_digit() || c == '.');
            if starts_numeric {
                if let Ok(v) = tok.parse::<f64>() {
                    if v.is_finite() {
                        self.pos += 1;
                        return Ok(v);
                    }
                }
            }
        }
        Err(self.error(&["<number>"]))
    }

    fn end(&mut self) -> Result<(), IntentError> {
        if self.peek().is_none() {
            Ok(())
        } else {
            Err(self.error(&["<end of intent>"]))
        }
    }
}

fn semantic(reason: impl Into<String>) -> IntentError {
    IntentError::Semantic {
        reason: reason.into(),
    }
}

/// Parses one intent statement. Never panics; malformed input yields a
/// [`IntentError::Parse`] whose offset points into the input, well-formed
/// but contradictory input yields [`IntentError::Semantic`].
pub fn parse_intent(
    text: &str,
    demand_of: impl Fn(&str) -> Option<f64>,
) -> Result<Goal, IntentError> {
    let mut cur = Cursor::new(text);
    let verb = cur.keyword(&["guarantee", "prioritize"])?;
    cur.keyword(&["flow"])?;
    let subject = cur.ident()?.to_owned();
    if verb == 1 {
        cur.end()?;
        let demand = demand_of(&subject)
            .ok_or_else(|| semantic(format!("cannot prioritize unknown flow {subject:?}")))?;
        if !(demand.is_finite() && demand > 0.0) {
            return Err(semantic(format!(
                "flow {subject:?} has no positive demand to prioritize"
            )));
        }
        return Ok(Goal::new(
            subject,
            Metric::Throughput,
            Comparator::AtLeast,
            demand,
            Unit::Mbps,
        ));
    }
    let metric = match cur.keyword(&["throughput", "latency"])? {
        0 => Metric::Throughput,
        _ => Metric::Latency,
    };
    let comparator = match cur.keyword(&["at-least", "at-most"])? {
        0 => Comparator::AtLeast,
        _ => Comparator::AtMost,
    };
    let number = cur.number()?;
    let unit = match cur.keyword(&["mbps", "kbps", "ms"])? {
        0 => Unit::Mbps,
        1 => Unit::Kbps,
        _ => Unit::Ms,
    };
    cur.end()?;

    match metric {
        Metric::Throughput => {
            if unit == Unit::Ms {
                return Err(semantic("throughput is measured in mbps or kbps, not ms"));
            }
            if comparator != Comparator::AtLeast {
                return Err(semantic("throughput goals are floors; use at-least"));
            }
        }
        Metric::Latency => {
            if unit != Unit::Ms {
                return Err(semantic("latency is measured in ms"));
            }
            if comparator != Comparator::AtMost {
                return Err(semantic("latency goals are ceilings; use at-most"));
            }
        }
    }
    if number <= 0.0 {
        return Err(semantic("goal values must be positive"));
    }
    Ok(Goal::new(
        subject,
        metric,
        comparator,
        number * unit.scale(),
        unit,
    ))
}
