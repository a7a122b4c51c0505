//! Two live mutable borrows of the same vector.

fn main() {
    let mut items = vec![1, 2, 3];
    let first = &mut items;
    let second = &mut items;
    first.push(4);
    second.push(5);
    println!("{:?}", items);
}
