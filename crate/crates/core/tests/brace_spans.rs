use corpusforge_core::clean::strip_braces;
use proptest::prelude::*;

#[derive(Debug, Clone)]
enum Piece {
    Text(String),
    Braced(Vec<Piece>),
}

fn render(pieces: &[Piece], out: &mut String) {
    for p in pieces {
        match p {
            Piece::Text(t) => out.push_str(t),
            Piece::Braced(inner) => {
                out.push_str("{{");
                render(inner, out);
                out.push_str("}}");
            }
        }
    }
}

/// What remains once every top-level braced piece is gone.
fn outside(pieces: &[Piece]) -> String {
    pieces
        .iter()
        .filter_map(|p| match p {
            Piece::Text(t) => Some(t.as_str()),
            Piece::Braced(_) => None,
        })
        .collect()
}

fn pieces() -> impl Strategy<Value = Vec<Piece>> {
    let text = "[a-zčšž |=\\[\\]<>]{0,6}".prop_map(Piece::Text);
    // Recursion depth 9 under a top level gives at most ten nested levels.
    let piece = text.prop_recursive(9, 64, 4, |inner| prop::collection::vec(inner, 0..4).prop_map(Piece::Braced));
    prop::collection::vec(piece, 0..6)
}

proptest! {
    #[test]
    fn balanced_spans_are_removed_whole(tree in pieces()) {
        let mut text = String::new();
        render(&tree, &mut text);
        prop_assert_eq!(strip_braces(&text), outside(&tree));
    }

    #[test]
    fn lone_opener_survives(tree in pieces(), lead in "[a-z ]{1,5}") {
        let mut text = format!("{{{{{lead}");
        render(&tree, &mut text);
        let expected = format!("{{{{{lead}{}", outside(&tree));
        prop_assert_eq!(strip_braces(&text), expected);
    }
}
