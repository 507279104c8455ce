//! Single Classification Ripple Down Rules tree.
//!
//! Text form, one node per line, two spaces of indentation per exception
//! level:
//!
//! ```text
//! SCRDR 1
//! DEFAULT
//!   EXCEPT t0=N : N
//!     EXCEPT w-1=quanh : V
//!   IF-NOT t0=V : V
//! ```
//!
//! An `EXCEPT` line is the first exception of the nearest node one level up;
//! an `IF-NOT` line follows the previous node on its own level.

use std::fmt::Write as _;

use super::rule::{Rule, RuleCondition};
use super::ScrdrError;
use crate::corpus::Tag;
use crate::features::Context;

pub const TREE_HEADER: &str = "SCRDR 1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Edge {
    Except,
    IfNot,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    /// `None` only for the root, whose condition always holds and whose
    /// conclusion is the initial tag.
    pub rule: Option<Rule>,
    pub except: Option<usize>,
    pub if_not: Option<usize>,
    /// Parent node and the edge leading here.
    pub parent: Option<(usize, Edge)>,
    /// Number of exception edges from the root.
    pub depth: usize,
}

impl Node {
    pub fn fires(&self, ctx: &Context<'_>) -> bool {
        self.rule.as_ref().is_none_or(|r| r.condition.fires(ctx))
    }

    pub fn conclusion(&self) -> Option<&Tag> {
        self.rule.as_ref().map(|r| &r.conclusion)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScrdrTree {
    nodes: Vec<Node>,
}

impl Default for ScrdrTree {
    fn default() -> Self {
        ScrdrTree::new()
    }
}

impl ScrdrTree {
    /// A tree holding only the default rule.
    pub fn new() -> ScrdrTree {
        ScrdrTree {
            nodes: vec![Node {
                rule: None,
                except: None,
                if_not: None,
                parent: None,
                depth: 0,
            }],
        }
    }

    /// Default rule plus `t0=T → T` for each tag, in label order.
    pub fn with_first_layer<'a>(tags: impl IntoIterator<Item = &'a Tag>) -> ScrdrTree {
        let mut tags: Vec<&Tag> = tags.into_iter().collect();
        tags.sort();
        tags.dedup();
        let mut tree = ScrdrTree::new();
        for t in tags {
            tree.add_exception(
                0,
                Rule {
                    condition: RuleCondition::current_tag(t.as_str()),
                    conclusion: t.clone(),
                },
            );
        }
        tree
    }

    pub const ROOT: usize = 0;

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &Node {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of rules below the first layer.
    pub fn exception_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.depth >= 2).count()
    }

    /// Children reached from `id` through its exception edge and the
    /// if-not chain that follows it.
    pub fn exceptions_of(&self, id: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut cur = self.nodes[id].except;
        while let Some(c) = cur {
            out.push(c);
            cur = self.nodes[c].if_not;
        }
        out
    }

    /// Append `rule` at the end of `parent`'s exception chain.
    pub fn add_exception(&mut self, parent: usize, rule: Rule) -> usize {
        let id = self.nodes.len();
        let depth = self.nodes[parent].depth + 1;
        let link = match self.exceptions_of(parent).last() {
            Some(&last) => {
                self.nodes[last].if_not = Some(id);
                (last, Edge::IfNot)
            }
            None => {
                self.nodes[parent].except = Some(id);
                (parent, Edge::Except)
            }
        };
        self.nodes.push(Node {
            rule: Some(rule),
            except: None,
            if_not: None,
            parent: Some(link),
            depth,
        });
        id
    }

    /// Id of the last node whose condition fires on the walk.
    pub fn last_fired(&self, ctx: &Context<'_>) -> usize {
        let mut last = Self::ROOT;
        let mut cur = self.nodes[Self::ROOT].except;
        while let Some(i) = cur {
            let n = &self.nodes[i];
            if n.fires(ctx) {
                last = i;
                cur = n.except;
            } else {
                cur = n.if_not;
            }
        }
        last
    }

    /// Conclusion of the last fired node; `None` means keep the initial tag.
    pub fn classify(&self, ctx: &Context<'_>) -> Option<&Tag> {
        self.nodes[self.last_fired(ctx)].conclusion()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(TREE_HEADER);
        out.push('\n');
        out.push_str("DEFAULT\n");
        // Depth-first: a node, its exception subtree, then its if-not sibling.
        let mut stack: Vec<usize> = self.nodes[Self::ROOT].except.into_iter().collect();
        while let Some(id) = stack.pop() {
            let n = &self.nodes[id];
            let rule = n.rule.as_ref().expect("only the root lacks a rule");
            let edge = match n.parent {
                Some((_, Edge::IfNot)) => "IF-NOT",
                _ => "EXCEPT",
            };
            let indent = "  ".repeat(n.depth);
            let _ = writeln!(out, "{indent}{edge} {} : {}", rule.condition, rule.conclusion.as_str());
            if let Some(s) = n.if_not {
                stack.push(s);
            }
            if let Some(e) = n.except {
                stack.push(e);
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<ScrdrTree, ScrdrError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l))
            .filter(|(_, l)| !l.trim().is_empty());
        let err = |line: usize, path: String, message: String| ScrdrError::Parse { line, path, message };

        match lines.next() {
            None => return Err(ScrdrError::EmptyTree),
            Some((_, l)) if l.trim_end() == TREE_HEADER => {}
            Some((n, l)) => {
                return Err(err(n, String::new(), format!("expected `{TREE_HEADER}`, found `{l}`")))
            }
        }
        match lines.next() {
            Some((_, l)) if l.trim_end() == "DEFAULT" => {}
            Some((n, l)) => return Err(err(n, "root".into(), format!("expected `DEFAULT`, found `{l}`"))),
            None => return Err(err(1, "root".into(), "missing `DEFAULT` line".into())),
        }

        let mut tree = ScrdrTree::new();
        // levels[d] = last node seen at depth d.
        let mut levels: Vec<usize> = vec![Self::ROOT];
        for (line_no, line) in lines {
            let body = line.trim_start_matches(' ');
            let spaces = line.len() - body.len();
            let path = tree.path_to(*levels.last().unwrap());
            if spaces % 2 != 0 || spaces == 0 {
                return Err(err(line_no, path, "indentation must be a positive multiple of two spaces".into()));
            }
            let depth = spaces / 2;
            let tokens: Vec<&str> = body.split_whitespace().collect();
            if tokens.len() < 4 || tokens[tokens.len() - 2] != ":" {
                return Err(err(line_no, path, "expected `EDGE condition : TAG`".into()));
            }
            let condition: RuleCondition = tokens[1..tokens.len() - 2]
                .join(" ")
                .parse()
                .map_err(|m| err(line_no, path.clone(), m))?;
            let conclusion = Tag::new(tokens[tokens.len() - 1])
                .ok_or_else(|| err(line_no, path.clone(), "invalid conclusion tag".into()))?;
            let rule = Rule { condition, conclusion };
            let id = match tokens[0] {
                "EXCEPT" => {
                    if depth > levels.len() {
                        return Err(err(line_no, path, "skips an exception level".into()));
                    }
                    let parent = levels[depth - 1];
                    if tree.nodes[parent].except.is_some() {
                        return Err(err(line_no, tree.path_to(parent), "node already has an exception".into()));
                    }
                    tree.add_exception(parent, rule)
                }
                "IF-NOT" => {
                    if depth >= levels.len() {
                        return Err(err(line_no, path, "IF-NOT without a preceding node on its level".into()));
                    }
                    let parent = levels[depth - 1];
                    let prev = levels[depth];
                    if tree.nodes[prev].depth != depth || tree.exceptions_of(parent).last() != Some(&prev) {
                        return Err(err(line_no, tree.path_to(prev), "IF-NOT does not follow a sibling".into()));
                    }
                    tree.add_exception(parent, rule)
                }
                other => return Err(err(line_no, path, format!("unknown edge `{other}`"))),
            };
            levels.truncate(depth);
            levels.push(id);
        }
        Ok(tree)
    }

    /// Edges from the root to `id`, e.g. `root > EXCEPT > IF-NOT`.
    pub fn path_to(&self, id: usize) -> String {
        let mut edges = Vec::new();
        let mut cur = id;
        while let Some((p, e)) = self.nodes[cur].parent {
            edges.push(match e {
                Edge::Except => "EXCEPT",
                Edge::IfNot => "IF-NOT",
            });
            cur = p;
        }
        let mut out = String::from("root");
        for e in edges.iter().rev() {
            out.push_str(" > ");
            out.push_str(e);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scrdr::rule::Slot;

    fn rule(cond: &str, tag: &str) -> Rule {
        Rule {
            condition: cond.parse().unwrap(),
            conclusion: Tag::new(tag).unwrap(),
        }
    }

    const GOLDEN: &str = "SCRDR 1\nDEFAULT\n  EXCEPT t0=N : N\n    EXCEPT w-1=quanh : V\n  IF-NOT t0=V : V\n";

    #[test]
    fn golden_three_rule_file() {
        let tree = ScrdrTree::parse(GOLDEN).unwrap();
        assert_eq!(tree.len(), 4);
        let n = tree.node(1);
        assert_eq!(n.depth, 1);
        assert_eq!(n.rule.as_ref().unwrap().condition.conjuncts(), &[(Slot::Tag(0), "N".to_string())]);
        assert_eq!(n.except, Some(2));
        assert_eq!(n.if_not, Some(3));
        assert_eq!(tree.node(2).depth, 2);
        assert_eq!(tree.node(2).rule.as_ref().unwrap().conclusion.as_str(), "V");
        assert_eq!(tree.node(3).parent, Some((1, Edge::IfNot)));
        assert_eq!(tree.to_text(), GOLDEN);
        assert_eq!(tree.path_to(3), "root > EXCEPT > IF-NOT");
    }

    #[test]
    fn walk_last_fired_wins() {
        let tree = ScrdrTree::parse(GOLDEN).unwrap();
        let words = ["quanh", "bàn"];
        let ctx = Context::new(&words, &["E", "N"], 1);
        assert_eq!(tree.classify(&ctx).unwrap().as_str(), "V");
        let ctx = Context::new(&words, &["E", "A"], 1);
        assert_eq!(tree.classify(&ctx), None);
        let ctx = Context::new(&["cái", "bàn"], &["Nc", "N"], 1);
        assert_eq!(tree.classify(&ctx).unwrap().as_str(), "N");
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(ScrdrTree::parse(""), Err(ScrdrError::EmptyTree)));
        assert!(matches!(ScrdrTree::parse("\n  \n"), Err(ScrdrError::EmptyTree)));
        let cases = [
            ("SCRDR 2\nDEFAULT\n", 1),
            ("SCRDR 1\nDEFAULT\n    EXCEPT t0=N : N\n", 3),
            ("SCRDR 1\nDEFAULT\n  IF-NOT t0=N : N\n", 3),
            ("SCRDR 1\nDEFAULT\n  EXCEPT t0=N N\n", 3),
            ("SCRDR 1\nDEFAULT\n  EXCEPT t0=N : N\n  EXCEPT t0=V : V\n", 4),
            ("SCRDR 1\nDEFAULT\n  EXCEPT t0=N : N\n   EXCEPT w0=a : V\n", 4),
            ("SCRDR 1\nDEFAULT\n  EXCEPT t0=N : N\n    EXCEPT bad=a : V\n", 4),
        ];
        for (text, line) in cases {
            match ScrdrTree::parse(text) {
                Err(ScrdrError::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
        match ScrdrTree::parse("SCRDR 1\nDEFAULT\n  EXCEPT t0=N : N\n    EXCEPT w9=a : V\n") {
            Err(ScrdrError::Parse { path, .. }) => assert_eq!(path, "root > EXCEPT"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn add_exception_builds_chains() {
        let mut t = ScrdrTree::new();
        let a = t.add_exception(0, rule("t0=N", "N"));
        let b = t.add_exception(0, rule("t0=V", "V"));
        let c = t.add_exception(a, rule("w0=x", "V"));
        let d = t.add_exception(a, rule("w0=y & t+1=N", "A"));
        assert_eq!(t.exceptions_of(0), [a, b]);
        assert_eq!(t.exceptions_of(a), [c, d]);
        assert_eq!(t.node(d).depth, 2);
        // Parsing numbers nodes in file order, so compare the text forms.
        assert_eq!(ScrdrTree::parse(&t.to_text()).unwrap().to_text(), t.to_text());
    }
}
