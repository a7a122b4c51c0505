//! One unsupported type error and one supported ownership error.

fn wrong() -> u32 {
    "text"
}

fn moved() {
    let s = String::new();
    let t = s;
    println!("{} {}", s, t);
}

fn main() {
    wrong();
    moved();
}
