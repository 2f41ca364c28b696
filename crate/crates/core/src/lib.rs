pub mod terms;
pub mod theory;
pub mod smt;
pub mod frontend;
pub mod rewrite;
pub mod confluence;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/input.md")]
    mod input {}
    #[doc = include_str!("../../../book/src/critical_pairs.md")]
    mod critical_pairs {}
    #[doc = include_str!("../../../book/src/rewriting.md")]
    mod rewriting {}
    #[doc = include_str!("../../../book/src/criteria.md")]
    mod criteria {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
