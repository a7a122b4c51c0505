//! Only an unsupported type error.

fn wrong() -> u32 {
    "text"
}

fn main() {
    println!("{}", wrong());
}
