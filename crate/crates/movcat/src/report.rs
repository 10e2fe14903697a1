//! Command verdicts and reports.
//!
//! Every command produces one [`Report`]: a verdict that fixes the exit
//! status, prose notes, an optional refutation certificate or input
//! diagnostic, and structured details for machine consumption.  The
//! same report renders as indented text or as a single JSON document.
//!
//! Commands whose job is to produce a workspace (`gen`, `comma`,
//! `product`, `dual`) also carry the canonical text; in human mode the
//! verdict and notes are then emitted as `#` comments so the whole
//! stream is itself a loadable workspace file.

use std::io::{self, Write};

use serde::Serialize;

/// Outcome of one command.  The variants map onto the exit statuses
/// `0`, `1` and `2` in order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// The queried property holds, or the construction succeeded.
    Ok,
    /// The property fails; the report carries a certificate.
    Refuted,
    /// The input could not be interpreted.
    Invalid,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Ok => 0,
            Verdict::Refuted => 1,
            Verdict::Invalid => 2,
        }
    }

    fn word(self) -> &'static str {
        match self {
            Verdict::Ok => "ok",
            Verdict::Refuted => "refuted",
            Verdict::Invalid => "invalid",
        }
    }
}

/// What one command invocation has to say.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    /// Why a `Refuted` verdict is right, in re-checkable terms.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<String>,
    /// What was wrong with the input, for an `Invalid` verdict.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "serde_json::Value::is_null")]
    pub details: serde_json::Value,
    /// Canonical workspace text, for commands that produce one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
}

impl Report {
    pub fn ok(command: &'static str) -> Report {
        Report {
            command,
            verdict: Verdict::Ok,
            notes: Vec::new(),
            certificate: None,
            error: None,
            details: serde_json::Value::Null,
            text: None,
        }
    }

    pub fn refuted(command: &'static str, certificate: impl Into<String>) -> Report {
        Report {
            verdict: Verdict::Refuted,
            certificate: Some(certificate.into()),
            ..Report::ok(command)
        }
    }

    pub fn invalid(command: &'static str, error: impl Into<String>) -> Report {
        Report { verdict: Verdict::Invalid, error: Some(error.into()), ..Report::ok(command) }
    }

    pub fn note(mut self, line: impl Into<String>) -> Report {
        self.notes.push(line.into());
        self
    }

    pub fn details(mut self, details: serde_json::Value) -> Report {
        self.details = details;
        self
    }

    pub fn text(mut self, text: String) -> Report {
        self.text = Some(text);
        self
    }

    pub fn exit_code(&self) -> i32 {
        self.verdict.exit_code()
    }

    pub fn render(&self, json: bool, out: &mut dyn Write) -> io::Result<()> {
        if json {
            let doc = serde_json::to_string_pretty(self).expect("reports serialize");
            return writeln!(out, "{doc}");
        }
        if let Some(text) = &self.text {
            writeln!(out, "# {}: {}", self.command, self.verdict.word())?;
            for n in &self.notes {
                writeln!(out, "# {n}")?;
            }
            return write!(out, "{text}");
        }
        writeln!(out, "{}: {}", self.command, self.verdict.word())?;
        for n in &self.notes {
            writeln!(out, "  {n}")?;
        }
        if let Some(error) = &self.error {
            for line in error.lines() {
                writeln!(out, "  {line}")?;
            }
        }
        if let Some(cert) = &self.certificate {
            writeln!(out, "certificate:")?;
            for line in cert.lines() {
                writeln!(out, "  {line}")?;
            }
        }
        Ok(())
    }

    /// The rendered report as a string, for callers without a stream.
    pub fn rendered(&self, json: bool) -> String {
        let mut buf = Vec::new();
        self.render(json, &mut buf).expect("writing to a buffer");
        String::from_utf8(buf).expect("reports are text")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts_map_onto_the_exit_statuses() {
        assert_eq!(Verdict::Ok.exit_code(), 0);
        assert_eq!(Verdict::Refuted.exit_code(), 1);
        assert_eq!(Verdict::Invalid.exit_code(), 2);
    }

    #[test]
    fn human_rendering_indents_notes_and_certificates() {
        let report = Report::refuted("check-movable", "s1 is not movable:\n  (s2, m): why")
            .note("category FIX-A, object s1");
        assert_eq!(
            report.rendered(false),
            "check-movable: refuted\n  category FIX-A, object s1\ncertificate:\n  s1 is not movable:\n    (s2, m): why\n"
        );
    }

    #[test]
    fn workspace_text_turns_the_preamble_into_comments() {
        let report = Report::ok("gen").note("seed 7").text("movcat-workspace 1\n".into());
        assert_eq!(report.rendered(false), "# gen: ok\n# seed 7\nmovcat-workspace 1\n");
    }

    #[test]
    fn json_rendering_skips_absent_fields() {
        let doc: serde_json::Value =
            serde_json::from_str(&Report::ok("validate").rendered(true)).unwrap();
        assert_eq!(doc["command"], "validate");
        assert_eq!(doc["verdict"], "ok");
        assert!(doc.get("certificate").is_none());
        assert!(doc.get("error").is_none());
        assert!(doc.get("details").is_none());
        assert!(doc.get("text").is_none());
    }

    #[test]
    fn refutations_and_diagnostics_serialize_under_their_own_keys() {
        let refuted: serde_json::Value =
            serde_json::from_str(&Report::refuted("system-check", "index 1").rendered(true))
                .unwrap();
        assert_eq!(refuted["verdict"], "refuted");
        assert_eq!(refuted["certificate"], "index 1");
        let invalid: serde_json::Value =
            serde_json::from_str(&Report::invalid("validate", "no such file").rendered(true))
                .unwrap();
        assert_eq!(invalid["verdict"], "invalid");
        assert_eq!(invalid["error"], "no such file");
    }
}
