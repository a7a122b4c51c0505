//! A reference that outlives the block declaring its referent.

fn main() {
    let r;
    {
        let x = 5;
        r = &x;
    }
    println!("{}", r);
}
