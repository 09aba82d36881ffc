//! The closed value universe: types, values, surface expressions and the
//! enumeration of finite carriers.

mod enumerate;
mod expr;
mod ty;
mod value;

pub use enumerate::{
    carrier_size, enumerate_carrier, enumerate_fn_tables, enumerate_fn_values, Bounds, Carrier, CarrierDecl,
    Domains,
};
pub use expr::{eval_expr, Env, Expr, WfLit};
pub use ty::Ty;
pub use value::{apply_writer_fn, decide_eq, name, reduce, FnTable, Head, Name, Value, WriterFn};
