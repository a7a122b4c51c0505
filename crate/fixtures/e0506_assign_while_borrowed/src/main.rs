//! Assigning to a value while it is borrowed.

fn main() {
    let mut total = 10;
    let r = &total;
    total = 20;
    println!("{} {}", r, total);
}
