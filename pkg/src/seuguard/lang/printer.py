from __future__ import annotations

from .ast import (
    Assert, Assign, Binary, BoolLit, Decl, Hook, If, Input, IntLit, Observe,
    Output, Print, Program, ReplayInput, Return, ShareParam, Unary, Var, While,
)


def format_expr(e) -> str:
    if isinstance(e, IntLit):
        return str(e.value)
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Input):
        return "input()"
    if isinstance(e, ReplayInput):
        return "replay_input()"
    if isinstance(e, Unary):
        inner = format_expr(e.operand)
        if isinstance(e.operand, (Binary, Unary)) or (isinstance(e.operand, IntLit) and e.operand.value < 0):
            inner = f"({inner})"
        return f"{e.op}{inner}"
    if isinstance(e, Binary):
        parts = []
        for side in (e.left, e.right):
            s = format_expr(side)
            parts.append(f"({s})" if isinstance(side, Binary) else s)
        return f"{parts[0]} {e.op} {parts[1]}"
    raise TypeError(e)


def format_stmts(stmts, indent: int = 1) -> list[str]:
    pad = "  " * indent
    out = []
    for s in stmts:
        if isinstance(s, Decl):
            out.append(f"{pad}{s.type} {s.name} = {format_expr(s.init)};")
        elif isinstance(s, Assign):
            out.append(f"{pad}{s.name} = {format_expr(s.expr)};")
        elif isinstance(s, If):
            out.append(f"{pad}if ({format_expr(s.cond)}) {{")
            out += format_stmts(s.then, indent + 1)
            if s.orelse:
                out.append(f"{pad}}} else {{")
                out += format_stmts(s.orelse, indent + 1)
            out.append(f"{pad}}}")
        elif isinstance(s, While):
            for h in s.cond_hooks:
                out.append(f"{pad}mimic_seu_effect(&{h.site.var});  // before loop test")
            out.append(f"{pad}while ({format_expr(s.cond)}) {{")
            out += format_stmts(s.body, indent + 1)
            for h in s.cond_hooks:
                out.append(f"{pad}  mimic_seu_effect(&{h.site.var});  // before loop test")
            out.append(f"{pad}}}")
        elif isinstance(s, Output):
            out.append(f"{pad}output {format_expr(s.expr)};")
        elif isinstance(s, Return):
            out.append(f"{pad}return {format_expr(s.expr)};")
        elif isinstance(s, Print):
            out.append(f"{pad}print {format_expr(s.expr)};")
        elif isinstance(s, Hook):
            out.append(f"{pad}mimic_seu_effect(&{s.site.var});")
        elif isinstance(s, Observe):
            buf, phi = ("O", "phi") if s.copy == "base" else ("O'", "phi'")
            out.append(f"{pad}{buf}.append({format_expr(s.expr)}); {phi} = {phi} && Phi({buf});")
        elif isinstance(s, ShareParam):
            out.append(f"{pad}{s.name} = {s.source};")
        elif isinstance(s, Assert):
            out.append(f"{pad}assert(!(phi ^ phi'));")
        else:
            raise TypeError(s)
    return out


def pretty(program: Program) -> str:
    params = ", ".join(f"{t} {n}" for n, t in program.params)
    lines = [f"{program.ret_type} {program.name}({params}) {{"]
    lines += format_stmts(program.body)
    lines.append("}")
    return "\n".join(lines) + "\n"
