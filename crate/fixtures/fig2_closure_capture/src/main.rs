//! Returning a closure that borrows a local variable.

fn base(seed: u32) -> u32 {
    seed * 10
}

fn make_counter(seed: u32) -> impl FnMut() -> u32 {
    let mut count = base(seed);
    println!("counter starts at {}", count);
    let counter = || {
        count += 1;
        count
    };
    counter
}

fn main() {
    let mut next = make_counter(1);
    println!("{}", next());
}
