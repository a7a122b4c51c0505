//! Compiles without diagnostics.

fn main() {
    let words = vec!["borrow", "move"];
    for w in &words {
        println!("{}", w);
    }
}
