//! The `.csm` text language and the JSON interchange form.
//!
//! ```text
//! model "Hotel and agency" {
//!   role Hotel
//!   role Agency
//!   class Booking dynamic { decision }
//!   process MakeBooking {
//!     owner Hotel
//!     responsible Agency
//!     output Booking
//!   }
//!   grant Hotel on Booking { creation, reference, reference+ }
//! }
//! ```

mod json;
mod lexer;
mod parser;
mod printer;
pub(crate) mod resolve;

pub use json::{emit_json, parse_json};
pub use printer::emit_text;

use crate::diagnostic::{has_errors, Diagnostic};
use crate::model::Model;

/// A model (present iff there are no errors) and the findings that led to it.
#[derive(Debug, Clone)]
pub struct ParseResult {
    pub model: Option<Model>,
    pub diagnostics: Vec<Diagnostic>,
}

impl ParseResult {
    pub fn is_ok(&self) -> bool {
        self.model.is_some()
    }

    pub fn into_result(self) -> Result<Model, Vec<Diagnostic>> {
        self.model.ok_or(self.diagnostics)
    }
}

/// Parses `.csm` text. `file_label` is used in source spans.
pub fn parse_text(source: &str, file_label: &str) -> ParseResult {
    let (tokens, mut diagnostics) = lexer::tokenize(source, file_label);
    let mut parser = parser::Parser::new(&tokens, file_label);
    let raw = parser.parse_model();
    diagnostics.append(&mut parser.diagnostics);
    let (model, mut resolved) = resolve::resolve(raw);
    diagnostics.append(&mut resolved);
    diagnostics.sort_by_key(|d| d.span.as_ref().map(|s| (s.line, s.column)));

    let model = if has_errors(&diagnostics) { None } else { model };
    ParseResult { model, diagnostics }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostic::Code;
    use crate::model::{ClassDef, ProcessDef};
    use crate::privilege::{Privilege, PrivilegeSet, StatusPoint, TransformMode};

    fn codes(r: &ParseResult) -> Vec<Code> {
        r.diagnostics.iter().map(|d| d.code).collect()
    }

    #[test]
    fn minimal_model() {
        let r = parse_text(r#"model "M" { role GP }"#, "t.csm");
        assert!(r.diagnostics.is_empty(), "{:?}", r.diagnostics);
        let m = r.model.unwrap();
        assert_eq!(m.name, "M");
        assert_eq!(m.roles, [crate::names::RoleName::from("GP")]);
    }

    #[test]
    fn empty_model_text() {
        assert_eq!(emit_text(&Model::new("M")), "model \"M\" {\n}\n");
    }

    #[test]
    fn full_grant_uses_canonical_privilege_order() {
        let m = Model::new("M")
            .with_role("R")
            .with_class(ClassDef::new("C"))
            .with_grant("R", "C", PrivilegeSet::all());
        let text = emit_text(&m);
        assert!(text.contains(
            "grant R on C { creation, modification, reference, suppression, modification+, reference+, suppression+ }"
        ));
        assert_eq!(parse_text(&text, "t").model.unwrap(), m);
    }

    #[test]
    fn missing_transform_mode() {
        let src = "model \"M\" {\n  class Booking dynamic\n  class CancelledBooking dynamic\n  process Cancel {\n    input Booking\n    output CancelledBooking\n    transform Booking -> CancelledBooking\n  }\n}\n";
        let r = parse_text(src, "m.csm");
        assert!(r.model.is_none());
        assert_eq!(codes(&r), [Code::TransformMode]);
        let span = r.diagnostics[0].span.as_ref().unwrap();
        assert_eq!((span.line, span.column), (7, 5));
        assert_eq!(span.length as usize, "transform Booking -> CancelledBooking".len());
        assert_eq!(span.file, "m.csm");
    }

    #[test]
    fn misspelt_mode_is_a_mode_error() {
        let src = "model \"M\" { class A dynamic class B dynamic process P { input A output B transform A -> B remainig } }";
        assert_eq!(codes(&parse_text(src, "t")), [Code::TransformMode]);
    }

    #[test]
    fn transform_endpoint_errors() {
        let src = "model \"M\" { class A class B process P { input A transform A -> B leaving transform A -> A leaving } }";
        let r = parse_text(src, "t");
        assert_eq!(codes(&r), [Code::TransformEndpoint, Code::TransformEndpoint]);
    }

    #[test]
    fn recovers_to_report_every_broken_item() {
        let src = "model \"M\" {\n  role GP\n  role \"GP2\"\n  class Y { sleepy }\n  grant GP on X { reading }\n  process P { owner GP bogus Q input X }\n  class X\n  role Lab\n}\n";
        let r = parse_text(src, "t");
        assert_eq!(codes(&r), [Code::Syntax; 4]);
        let lines: Vec<u32> = r
            .diagnostics
            .iter()
            .map(|d| d.span.as_ref().unwrap().line)
            .collect();
        assert_eq!(lines, [3, 4, 5, 6]);
    }

    #[test]
    fn references_and_duplicates() {
        let src = r#"model "M" {
  role GP
  role GP
  class X
  process P { owner Nobody input Y }
  grant GP on Bookng { reference }
}"#;
        let r = parse_text(src, "t");
        assert_eq!(
            codes(&r),
            [Code::Duplicate, Code::Reference, Code::Reference, Code::Reference]
        );
        assert!(r.diagnostics.iter().all(|d| d.span.is_some()));
    }

    #[test]
    fn role_cannot_be_owner_and_responsible() {
        let src = "model \"M\" { role A process P { owner A responsible A } }";
        assert_eq!(codes(&parse_text(src, "t")), [Code::Duplicate]);
    }

    #[test]
    fn header_and_trailing_errors() {
        assert_eq!(codes(&parse_text("model { role A }", "t")), [Code::Syntax]);
        assert_eq!(
            codes(&parse_text("model \"M\" { role A } extra", "t")),
            [Code::Syntax]
        );
        assert_eq!(codes(&parse_text("model \"M\" { role A", "t")), [Code::Syntax]);
        assert!(!parse_text("", "t").is_ok());
    }

    #[test]
    fn comments_and_layout_are_ignored() {
        let src = "# header\nmodel \"M\" { # c\n role\n GP # trailing\n class X dynamic {waiting,fail}\n}";
        let m = parse_text(src, "t").model.unwrap();
        let x = m.class("X").unwrap();
        assert!(x.dynamic && x.is(StatusPoint::Waiting) && x.is(StatusPoint::Fail));
    }

    #[test]
    fn quoted_names_round_trip() {
        let m = Model::new("a \"quoted\"\\ name\n");
        assert_eq!(parse_text(&emit_text(&m), "t").model.unwrap(), m);
    }

    #[test]
    fn text_round_trip_with_everything() {
        let m = Model::new("M")
            .with_role("B")
            .with_role("A")
            .with_class(ClassDef::new("Y").dynamic().with_point(StatusPoint::Decision))
            .with_class(ClassDef::new("X").dynamic())
            .with_process(
                ProcessDef::new("P")
                    .owner("A")
                    .owner("B")
                    .input("X")
                    .output("Y")
                    .transform("X", "Y", TransformMode::Remaining),
            )
            .with_process(ProcessDef::new("G").responsible("A").output("X"))
            .with_grant("A", "X", [Privilege::Creation, Privilege::Reference]);
        let text = emit_text(&m);
        let back = parse_text(&text, "t").model.unwrap();
        assert_eq!(back, m);
        assert_eq!(emit_text(&back), text);
    }

    #[test]
    fn json_minimal_and_missing_name() {
        let r = parse_json(br#"{"name":"M","roles":["GP"],"classes":[],"processes":[],"grants":[]}"#);
        let m = r.model.unwrap();
        assert_eq!(m, Model::new("M").with_role("GP"));

        let r = parse_json(br#"{"roles":["GP"]}"#);
        assert_eq!(codes(&r), [Code::Json]);
        assert_eq!(codes(&parse_json(b"{not json")), [Code::Json]);
        assert_eq!(codes(&parse_json(br#"{"name":"M","roles":["no good"]}"#)), [Code::Json]);
    }

    #[test]
    fn json_reference_and_mode_errors() {
        let r = parse_json(
            br#"{"name":"M","classes":[{"name":"A"},{"name":"B"}],
                "processes":[{"name":"P","inputs":["A"],"outputs":["B"],
                              "transforms":[{"from":"A","to":"B"}],"owners":["Ghost"]}]}"#,
        );
        assert_eq!(codes(&r), [Code::Reference, Code::TransformMode]);
    }

    #[test]
    fn json_output_is_sorted_and_stable() {
        let m = Model::new("M")
            .with_role("GP")
            .with_class(ClassDef::new("X").with_point(StatusPoint::Fail))
            .with_grant("GP", "X", [Privilege::ReferencePlus, Privilege::Creation]);
        let bytes = emit_json(&m);
        let text = String::from_utf8(bytes.clone()).unwrap();
        let classes = text.find("\"classes\"").unwrap();
        let grants = text.find("\"grants\"").unwrap();
        let name = text.find("\n  \"name\"").unwrap();
        assert!(classes < grants && grants < name);
        assert!(text.contains("\"creation\",\n        \"reference+\""));
        let back = parse_json(&bytes).model.unwrap();
        assert_eq!(emit_json(&back), bytes);
    }
}
