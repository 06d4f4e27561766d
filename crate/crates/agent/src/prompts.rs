//! Prompt templates shipped as text assets, filled by plain `{name}`
//! substitution.

pub const RELEVANCE: &str = include_str!("../assets/prompts/relevance.txt");
pub const GLOBAL_FILTER: &str = include_str!("../assets/prompts/global_filter.txt");
pub const TESTGEN: &str = include_str!("../assets/prompts/testgen.txt");
pub const CODEGEN: &str = include_str!("../assets/prompts/codegen.txt");
pub const REFINE: &str = include_str!("../assets/prompts/refine.txt");

/// System text sent with every prompt that is itself a user message.
pub const SYSTEM: &str = "You are a helpful assistant for graph algorithm tasks.";

/// Replace each `{name}` whose name appears in `values`; other braces are
/// left untouched. Substituted text is never rescanned, so values may
/// contain braces of their own.
pub fn render(template: &str, values: &[(&str, &str)]) -> String {
    let mut out = String::with_capacity(template.len());
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let after = &rest[open + 1..];
        let hit = after.find('}').and_then(|close| {
            let name = &after[..close];
            values
                .iter()
                .find(|(k, _)| *k == name)
                .map(|(_, v)| (close, *v))
        });
        match hit {
            Some((close, value)) => {
                out.push_str(value);
                rest = &after[close + 1..];
            }
            None => {
                out.push('{');
                rest = after;
            }
        }
    }
    out.push_str(rest);
    out
}

/// Placeholder names in `template`, in order of first appearance.
pub fn placeholders(template: &str) -> Vec<String> {
    let mut names: Vec<String> = Vec::new();
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        let after = &rest[open + 1..];
        match after.find('}') {
            Some(close) => {
                let name = &after[..close];
                if !name.is_empty()
                    && !name.contains(['{', '\n', '"'])
                    && !names.iter().any(|n| n == name)
                {
                    names.push(name.to_string());
                }
                rest = &after[close + 1..];
            }
            None => break,
        }
    }
    names
}
