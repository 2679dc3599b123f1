use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::{self, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::PathBuf;
use std::sync::{Arc, Mutex, RwLock};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::grade::{grade_answer, AnswerPayload, GradeError, GradeResult, Verdict};
use super::{Question, QuestionBank, QuestionKind};
use crate::chart::{ChartElement, ChartElementCard};
use crate::pipeline::Engine;

/// Each hint card costs one point.
pub const HINT_COST: i64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeBonus {
    pub points: i64,
    pub window_secs: i64,
}

impl Default for TimeBonus {
    fn default() -> Self {
        TimeBonus {
            points: 2,
            window_secs: 120,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ScoringPolicy {
    /// Replaces every question's own base points when set.
    #[serde(default)]
    pub base_points: Option<i64>,
    #[serde(default)]
    pub time_bonus: Option<TimeBonus>,
}

impl ScoringPolicy {
    pub fn hint_cost(&self) -> i64 {
        HINT_COST
    }
}

/// A hint handed to a participant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Hint {
    Element { card: ChartElementCard },
    Tip { card_id: String, text: String },
}

impl Hint {
    fn key(&self) -> String {
        match self {
            Hint::Element { card } => card.element.as_str().to_string(),
            Hint::Tip { card_id, .. } => card_id.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum SessionEvent {
    Created {
        session: String,
        at: DateTime<Utc>,
        policy: ScoringPolicy,
    },
    Joined {
        participant: String,
        at: DateTime<Utc>,
    },
    QuestionOpened {
        question: String,
        at: DateTime<Utc>,
    },
    Submitted {
        participant: String,
        question: String,
        at: DateTime<Utc>,
        answer: AnswerPayload,
        grade: GradeResult,
        #[serde(default)]
        time_bonus: i64,
    },
    HintTaken {
        participant: String,
        question: String,
        at: DateTime<Utc>,
        hint: Hint,
        cost: i64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubmissionRecord {
    pub question: String,
    pub at: DateTime<Utc>,
    pub verdict: Verdict,
    pub points: i64,
    pub answer: AnswerPayload,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ParticipantState {
    pub score: i64,
    /// Questions answered correctly or handed to the moderator.
    pub answered: BTreeSet<String>,
    pub hints: BTreeMap<String, Vec<String>>,
    pub submissions: Vec<SubmissionRecord>,
    #[serde(skip)]
    latest_missing: BTreeMap<String, Option<Vec<ChartElement>>>,
}

impl ParticipantState {
    pub fn hint_count(&self, question: &str) -> usize {
        self.hints.get(question).map_or(0, Vec::len)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SessionError {
    #[error("no session `{0}`")]
    UnknownSession(String),
    #[error("`{0}` has not joined this session")]
    UnknownParticipant(String),
    #[error("no question `{0}`")]
    UnknownQuestion(String),
    #[error("participant name is empty")]
    EmptyParticipant,
    #[error("`{participant}` already answered `{question}`")]
    AlreadyAnswered {
        participant: String,
        question: String,
    },
    #[error("no hint is available for this question")]
    NoHint,
    #[error(transparent)]
    Grade(#[from] GradeError),
    #[error("session log: {0}")]
    Log(String),
}

/// Session state, derived only by applying events in order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub id: String,
    pub created_at: DateTime<Utc>,
    pub policy: ScoringPolicy,
    pub roster: Vec<String>,
    pub participants: BTreeMap<String, ParticipantState>,
    pub opened: BTreeMap<String, DateTime<Utc>>,
    #[serde(skip)]
    events: Vec<SessionEvent>,
}

impl Session {
    pub fn create(id: impl Into<String>, policy: ScoringPolicy, at: DateTime<Utc>) -> Session {
        let id = id.into();
        let mut s = Session::blank(&id, policy, at);
        s.record(SessionEvent::Created {
            session: id,
            at,
            policy,
        });
        s
    }

    fn blank(id: &str, policy: ScoringPolicy, at: DateTime<Utc>) -> Session {
        Session {
            id: id.to_string(),
            created_at: at,
            policy,
            roster: Vec::new(),
            participants: BTreeMap::new(),
            opened: BTreeMap::new(),
            events: Vec::new(),
        }
    }

    /// Rebuilds a session from its log. The first event must be `Created`.
    pub fn replay(events: &[SessionEvent]) -> Result<Session, SessionError> {
        let Some(SessionEvent::Created {
            session,
            at,
            policy,
        }) = events.first()
        else {
            return Err(SessionError::Log(
                "log does not start with a created event".into(),
            ));
        };
        let mut s = Session::blank(session, *policy, *at);
        for e in events {
            s.record(e.clone());
        }
        Ok(s)
    }

    pub fn events(&self) -> &[SessionEvent] {
        &self.events
    }

    pub fn participant(&self, id: &str) -> Result<&ParticipantState, SessionError> {
        self.participants
            .get(id)
            .ok_or_else(|| SessionError::UnknownParticipant(id.to_string()))
    }

    pub fn score(&self, participant: &str) -> Result<i64, SessionError> {
        Ok(self.participant(participant)?.score)
    }

    fn record(&mut self, event: SessionEvent) {
        self.apply(&event);
        self.events.push(event);
    }

    fn apply(&mut self, event: &SessionEvent) {
        match event {
            SessionEvent::Created { .. } => {}
            SessionEvent::Joined { participant, .. } => {
                if !self.participants.contains_key(participant) {
                    self.roster.push(participant.clone());
                    self.participants
                        .insert(participant.clone(), ParticipantState::default());
                }
            }
            SessionEvent::QuestionOpened { question, at } => {
                self.opened.insert(question.clone(), *at);
            }
            SessionEvent::Submitted {
                participant,
                question,
                at,
                answer,
                grade,
                time_bonus,
            } => {
                let p = self.participants.entry(participant.clone()).or_default();
                let points = grade.points_awarded + time_bonus;
                p.score += points;
                if grade.verdict != Verdict::Incorrect {
                    p.answered.insert(question.clone());
                }
                p.latest_missing
                    .insert(question.clone(), grade.missing.clone());
                p.submissions.push(SubmissionRecord {
                    question: question.clone(),
                    at: *at,
                    verdict: grade.verdict,
                    points,
                    answer: answer.clone(),
                });
            }
            SessionEvent::HintTaken {
                participant,
                question,
                hint,
                cost,
                ..
            } => {
                let p = self.participants.entry(participant.clone()).or_default();
                p.score -= cost;
                p.hints
                    .entry(question.clone())
                    .or_default()
                    .push(hint.key());
            }
        }
    }

    /// Joining twice is a no-op and adds no event.
    pub fn join(
        &mut self,
        participant: &str,
        at: DateTime<Utc>,
    ) -> Result<Option<&SessionEvent>, SessionError> {
        let participant = participant.trim();
        if participant.is_empty() {
            return Err(SessionError::EmptyParticipant);
        }
        if self.participants.contains_key(participant) {
            return Ok(None);
        }
        self.record(SessionEvent::Joined {
            participant: participant.to_string(),
            at,
        });
        Ok(self.events.last())
    }

    /// Starts the clock for the time bonus.
    pub fn open_question(
        &mut self,
        bank: &QuestionBank,
        question: &str,
        at: DateTime<Utc>,
    ) -> Result<&SessionEvent, SessionError> {
        bank.get(question)
            .ok_or_else(|| SessionError::UnknownQuestion(question.to_string()))?;
        self.record(SessionEvent::QuestionOpened {
            question: question.to_string(),
            at,
        });
        Ok(self.events.last().expect("just recorded"))
    }

    fn lookup<'b>(
        &self,
        bank: &'b QuestionBank,
        participant: &str,
        question: &str,
    ) -> Result<&'b Question, SessionError> {
        let state = self.participant(participant)?;
        let q = bank
            .get(question)
            .ok_or_else(|| SessionError::UnknownQuestion(question.to_string()))?;
        if state.answered.contains(question) {
            return Err(SessionError::AlreadyAnswered {
                participant: participant.to_string(),
                question: question.to_string(),
            });
        }
        Ok(q)
    }

    /// Grades and records one answer. Returns the grade and the points added.
    pub fn submit(
        &mut self,
        engine: &Engine,
        bank: &QuestionBank,
        participant: &str,
        question: &str,
        answer: AnswerPayload,
        at: DateTime<Utc>,
    ) -> Result<(GradeResult, i64), SessionError> {
        let q = self.lookup(bank, participant, question)?;
        let mut grade = grade_answer(q, &answer, engine)?;
        if grade.verdict == Verdict::Correct && grade.points_awarded > 0 {
            if let Some(base) = self.policy.base_points {
                grade.points_awarded = base;
            }
        }
        let time_bonus = match (self.policy.time_bonus, self.opened.get(question)) {
            (Some(bonus), Some(opened))
                if grade.verdict == Verdict::Correct && grade.points_awarded > 0 =>
            {
                let elapsed = (at - *opened).num_seconds();
                if (0..=bonus.window_secs).contains(&elapsed) {
                    bonus.points
                } else {
                    0
                }
            }
            _ => 0,
        };
        let delta = grade.points_awarded + time_bonus;
        self.record(SessionEvent::Submitted {
            participant: participant.to_string(),
            question: question.to_string(),
            at,
            answer,
            grade: grade.clone(),
            time_bonus,
        });
        Ok((grade, delta))
    }

    /// Hands out the next hint and charges for it. Each element or tip is charged once,
    /// and a question already answered gets none.
    pub fn request_hint(
        &mut self,
        engine: &Engine,
        bank: &QuestionBank,
        participant: &str,
        question: &str,
        at: DateTime<Utc>,
    ) -> Result<Hint, SessionError> {
        let q = match self.lookup(bank, participant, question) {
            Err(SessionError::AlreadyAnswered { .. }) => return Err(SessionError::NoHint),
            other => other?,
        };
        let state = self.participant(participant)?;
        let taken: &[String] = state.hints.get(question).map_or(&[], Vec::as_slice);
        let hint = next_hint(engine, q, state.latest_missing.get(question), taken)
            .ok_or(SessionError::NoHint)?;
        let cost = self.policy.hint_cost();
        self.record(SessionEvent::HintTaken {
            participant: participant.to_string(),
            question: question.to_string(),
            at,
            hint: hint.clone(),
            cost,
        });
        Ok(hint)
    }
}

fn next_hint(
    engine: &Engine,
    q: &Question,
    latest_missing: Option<&Option<Vec<ChartElement>>>,
    taken: &[String],
) -> Option<Hint> {
    let fresh = |key: &str| !taken.iter().any(|t| t == key);
    if let Some(kind) = q.expected_chart_kind {
        let missing = match latest_missing {
            Some(Some(missing)) => missing.clone(),
            _ => kind.required_elements().to_vec(),
        };
        return missing
            .into_iter()
            .filter(|e| fresh(e.as_str()))
            .find_map(|e| ChartElementCard::from_catalog(engine.catalog(), e))
            .map(|card| Hint::Element { card });
    }
    if q.kind != QuestionKind::Pipeline {
        return None;
    }
    let pipeline = q.canonical_pipeline.as_ref()?;
    pipeline
        .cards
        .iter()
        .filter(|c| fresh(&c.card))
        .find_map(|c| {
            let spec = engine.catalog().get_card(&c.card).ok()?;
            let text = spec.tips.clone().unwrap_or_else(|| spec.definition.clone());
            Some(Hint::Tip {
                card_id: spec.id.clone(),
                text: format!("{}: {text}", spec.title),
            })
        })
}

/// All live sessions. Each session is locked on its own, so sessions never wait on each other.
#[derive(Debug)]
pub struct SessionStore {
    engine: Arc<Engine>,
    bank: Arc<QuestionBank>,
    policy: ScoringPolicy,
    log_dir: Option<PathBuf>,
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
}

impl SessionStore {
    pub fn new(
        engine: Arc<Engine>,
        bank: Arc<QuestionBank>,
        policy: ScoringPolicy,
    ) -> SessionStore {
        SessionStore {
            engine,
            bank,
            policy,
            log_dir: None,
            sessions: RwLock::new(HashMap::new()),
        }
    }

    /// Keeps one JSON-lines log per session in `dir` and replays the ones already there.
    pub fn with_log_dir(mut self, dir: impl Into<PathBuf>) -> Result<SessionStore, SessionError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| SessionError::Log(e.to_string()))?;
        let mut entries: Vec<PathBuf> = fs::read_dir(&dir)
            .map_err(|e| SessionError::Log(e.to_string()))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
            .collect();
        entries.sort();
        {
            let mut sessions = self.sessions.write().expect("session map lock");
            for path in entries {
                let file = fs::File::open(&path).map_err(|e| SessionError::Log(e.to_string()))?;
                let mut events = Vec::new();
                for line in BufReader::new(file).lines() {
                    let line = line.map_err(|e| SessionError::Log(e.to_string()))?;
                    if line.trim().is_empty() {
                        continue;
                    }
                    let event: SessionEvent = serde_json::from_str(&line)
                        .map_err(|e| SessionError::Log(format!("{}: {e}", path.display())))?;
                    events.push(event);
                }
                let session = Session::replay(&events)?;
                sessions.insert(session.id.clone(), Arc::new(Mutex::new(session)));
            }
        }
        self.log_dir = Some(dir);
        Ok(self)
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    pub fn bank(&self) -> &QuestionBank {
        &self.bank
    }

    pub fn policy(&self) -> ScoringPolicy {
        self.policy
    }

    fn persist(&self, id: &str, events: &[SessionEvent]) -> Result<(), SessionError> {
        let Some(dir) = &self.log_dir else {
            return Ok(());
        };
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(dir.join(format!("{id}.jsonl")))
            .map_err(|e| SessionError::Log(e.to_string()))?;
        for e in events {
            let line = serde_json::to_string(e).expect("events serialize");
            writeln!(file, "{line}").map_err(|e| SessionError::Log(e.to_string()))?;
        }
        Ok(())
    }

    pub fn create(&self) -> Result<Session, SessionError> {
        let id = uuid::Uuid::new_v4().simple().to_string();
        let session = Session::create(&id, self.policy, Utc::now());
        self.persist(&id, session.events())?;
        self.sessions
            .write()
            .expect("session map lock")
            .insert(id, Arc::new(Mutex::new(session.clone())));
        Ok(session)
    }

    fn handle(&self, id: &str) -> Result<Arc<Mutex<Session>>, SessionError> {
        self.sessions
            .read()
            .expect("session map lock")
            .get(id)
            .cloned()
            .ok_or_else(|| SessionError::UnknownSession(id.to_string()))
    }

    /// Runs `f` with the session locked and appends whatever events it recorded.
    fn with_session<T>(
        &self,
        id: &str,
        f: impl FnOnce(&mut Session, &Engine, &QuestionBank) -> Result<T, SessionError>,
    ) -> Result<T, SessionError> {
        let handle = self.handle(id)?;
        let mut session = handle.lock().expect("session lock");
        let before = session.events().len();
        let out = f(&mut session, &self.engine, &self.bank)?;
        self.persist(id, &session.events()[before..])?;
        Ok(out)
    }

    pub fn get(&self, id: &str) -> Result<Session, SessionError> {
        let handle = self.handle(id)?;
        let session = handle.lock().expect("session lock");
        Ok(session.clone())
    }

    pub fn join(&self, id: &str, participant: &str) -> Result<Session, SessionError> {
        self.with_session(id, |s, _, _| {
            s.join(participant, Utc::now())?;
            Ok(s.clone())
        })
    }

    pub fn open_question(&self, id: &str, question: &str) -> Result<DateTime<Utc>, SessionError> {
        self.with_session(id, |s, _, bank| {
            let at = Utc::now();
            s.open_question(bank, question, at)?;
            Ok(at)
        })
    }

    pub fn submit(
        &self,
        id: &str,
        participant: &str,
        question: &str,
        answer: AnswerPayload,
    ) -> Result<(GradeResult, i64, i64), SessionError> {
        self.with_session(id, |s, engine, bank| {
            let (grade, delta) =
                s.submit(engine, bank, participant, question, answer, Utc::now())?;
            Ok((grade, delta, s.score(participant)?))
        })
    }

    /// `Ok(None)` when no hint is left; nothing is charged then.
    pub fn request_hint(
        &self,
        id: &str,
        participant: &str,
        question: &str,
    ) -> Result<Option<(Hint, i64)>, SessionError> {
        self.with_session(id, |s, engine, bank| {
            match s.request_hint(engine, bank, participant, question, Utc::now()) {
                Ok(hint) => Ok(Some((hint, s.score(participant)?))),
                Err(SessionError::NoHint) => Ok(None),
                Err(e) => Err(e),
            }
        })
    }
}
