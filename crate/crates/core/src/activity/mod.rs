//! Question bank, grading and scored classroom sessions.

mod bank;
mod grade;
mod session;

pub use self::bank::{BankError, Question, QuestionBank, QuestionKind};
pub use self::grade::{
    equivalent, grade_answer, grade_m_answer, grade_mc_answer, reals_close, scalars_equal,
    AnswerPayload, GradeError, GradeResult, Verdict, REAL_TOLERANCE,
};
pub use self::session::{
    Hint, ParticipantState, ScoringPolicy, Session, SessionError, SessionEvent, SessionStore,
    SubmissionRecord, TimeBonus, HINT_COST,
};
