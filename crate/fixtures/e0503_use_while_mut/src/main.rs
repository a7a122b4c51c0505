//! Reading a value while it is mutably borrowed.

fn main() {
    let mut count = 1;
    let r = &mut count;
    let copy = count + 1;
    *r += copy;
    println!("{}", count);
}
