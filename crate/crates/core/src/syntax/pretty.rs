//! Concrete syntax printing. Output parses back to the same tree.

use std::fmt;

use super::{Binding, Context, Side, Term, Type};

fn side_str(s: Side) -> &'static str {
    match s {
        Side::Left => "1",
        Side::Right => "2",
    }
}

impl Type {
    fn level(&self) -> u8 {
        match self {
            Type::Forall(..) | Type::Fun(..) => 0,
            Type::Sum(..) => 1,
            Type::Prod(..) => 2,
            Type::Says(..) | Type::ActsFor(..) => 3,
            Type::Unit | Type::Var(_) => 4,
        }
    }

    pub(crate) fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.level() < min {
            f.write_str("(")?;
            self.fmt_at(f, 0)?;
            return f.write_str(")");
        }
        match self {
            Type::ActsFor(p, q) => write!(f, "{p} |> {q}"),
            Type::Unit => f.write_str("unit"),
            Type::Var(x) => f.write_str(x),
            Type::Sum(a, b) => {
                a.fmt_at(f, 1)?;
                f.write_str(" + ")?;
                b.fmt_at(f, 2)
            }
            Type::Prod(a, b) => {
                a.fmt_at(f, 2)?;
                f.write_str(" * ")?;
                b.fmt_at(f, 3)
            }
            Type::Fun(a, pc, b) => {
                a.fmt_at(f, 1)?;
                write!(f, " [{pc}]-> ")?;
                b.fmt_at(f, 0)
            }
            Type::Says(l, t) => {
                write!(f, "{l} says ")?;
                t.fmt_at(f, 3)
            }
            Type::Forall(x, pc, t) => {
                write!(f, "forall {x} [{pc}]. ")?;
                t.fmt_at(f, 0)
            }
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

impl Term {
    fn level(&self) -> u8 {
        match self {
            Term::Lam { .. } | Term::TLam { .. } | Term::Case { .. } | Term::Bind { .. } | Term::Assume(..) => 0,
            Term::Where(..) => 1,
            Term::App(..) | Term::TApp(..) => 2,
            Term::Proj(..) | Term::Inj(..) | Term::UnitM(..) | Term::Sealed(..) | Term::ProtCtx(..) => 3,
            Term::Var(_)
            | Term::Unit
            | Term::Pair(..)
            | Term::Del(..)
            | Term::Bracket(..)
            | Term::Hole(_)
            | Term::Opaque => 4,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.level() < min {
            f.write_str("(")?;
            self.fmt_at(f, 0)?;
            return f.write_str(")");
        }
        match self {
            Term::Var(x) => f.write_str(x),
            Term::Unit => f.write_str("()"),
            Term::Pair(a, b) => {
                f.write_str("<")?;
                a.fmt_at(f, 0)?;
                f.write_str(", ")?;
                b.fmt_at(f, 0)?;
                f.write_str(">")
            }
            Term::Proj(s, e) => {
                write!(f, "proj{} ", side_str(*s))?;
                e.fmt_at(f, 3)
            }
            Term::Inj(s, t, e) => {
                write!(f, "inj{} @", side_str(*s))?;
                t.fmt_at(f, 4)?;
                f.write_str(" ")?;
                e.fmt_at(f, 3)
            }
            Term::Case { scrutinee, binder, left, right } => {
                f.write_str("case ")?;
                scrutinee.fmt_at(f, 0)?;
                write!(f, " of {binder}. ")?;
                left.fmt_at(f, 0)?;
                write!(f, " | {binder}. ")?;
                right.fmt_at(f, 0)
            }
            Term::Lam { param, ty, pc, body } => {
                write!(f, "\\{param}: {ty} [{pc}]. ")?;
                body.fmt_at(f, 0)
            }
            Term::App(a, b) => {
                a.fmt_at(f, 2)?;
                f.write_str(" ")?;
                b.fmt_at(f, 4)
            }
            Term::TLam { tvar, pc, body } => {
                write!(f, "/\\{tvar} [{pc}]. ")?;
                body.fmt_at(f, 0)
            }
            Term::TApp(e, t) => {
                e.fmt_at(f, 2)?;
                f.write_str(" ")?;
                t.fmt_at(f, 4)
            }
            Term::Del(p, q) => write!(f, "<{p} |> {q}>"),
            Term::UnitM(l, e) => {
                write!(f, "eta[{l}] ")?;
                e.fmt_at(f, 3)
            }
            Term::Sealed(l, e) => {
                write!(f, "sealed[{l}] ")?;
                e.fmt_at(f, 3)
            }
            Term::Bind { binder, bound, body } => {
                write!(f, "bind {binder} = ")?;
                bound.fmt_at(f, 0)?;
                f.write_str(" in ")?;
                body.fmt_at(f, 0)
            }
            Term::Assume(a, b) => {
                f.write_str("assume ")?;
                a.fmt_at(f, 0)?;
                f.write_str(" in ")?;
                b.fmt_at(f, 0)
            }
            Term::Where(e, v) => {
                e.fmt_at(f, 1)?;
                f.write_str(" where ")?;
                v.fmt_at(f, 4)
            }
            Term::ProtCtx(l, e) => {
                write!(f, "ctx[{l}] ")?;
                e.fmt_at(f, 3)
            }
            Term::Bracket(a, b) => {
                f.write_str("{")?;
                a.fmt_at(f, 0)?;
                f.write_str(" | ")?;
                b.fmt_at(f, 0)?;
                f.write_str("}")
            }
            Term::Hole(t) => write!(f, "hole[{t}]"),
            Term::Opaque => f.write_str("#"),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, b) in self.bindings().iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            match b {
                Binding::Var(x, t) => write!(f, "{x} : {t}")?,
                Binding::TyVar(x) => f.write_str(x)?,
            }
        }
        f.write_str("]")
    }
}
