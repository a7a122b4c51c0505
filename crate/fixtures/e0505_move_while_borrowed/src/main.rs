//! Moving a value out while a borrow of it is still used.

fn eat(_s: String) {}

fn main() {
    let s = String::from("hi");
    let r = &s;
    eat(s);
    println!("{}", r);
}
