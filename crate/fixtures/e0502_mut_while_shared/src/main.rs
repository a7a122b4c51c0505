//! Pushing to a vector while a shared borrow of an element is live.

fn main() {
    let mut items = vec![1, 2, 3];
    let head = &items[0];
    items.push(4);
    println!("{}", head);
}
