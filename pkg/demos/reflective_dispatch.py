"""A reflective message delivery service: each class decides the order in
which its instances' nodes are searched, and the choice stays local."""

from braid import new_interpreter

METHODS = """
let meth ma u = ["A"]
let meth mb u = "B" :: send (next, "m", u)
let meth mc u = "C" :: send (next, "m", u)
let meth md u = "D" :: send (next, "m", u)
"""


def diamond(meta, suffix):
    return f"""
let a{suffix} = send ({meta}, "new", [[object], [], "m" |-> ma])
let b{suffix} = send ({meta}, "new", [[a{suffix}], [], "m" |-> mb])
let c{suffix} = send ({meta}, "new", [[a{suffix}], [], "m" |-> mc])
let d{suffix} = send ({meta}, "new", [[b{suffix}, c{suffix}], [], "m" |-> md])
"""


interp = new_interpreter("asmirs", trace_send=False)
interp.run_source(METHODS + diamond("class", "1") + diamond("c", "2"), echo=False)

print("-- the default metaclass searches in final-occurrence order")
interp.run_source('send (send (d1, "new", []), "m", ())')
print("-- the metaclass c searches in first-occurrence order")
interp.run_source('send (send (d2, "new", []), "m", ())')

print("-- a strategy written in the language: search the root last")
interp.run_source("""
let rev l = foldl (\\acc x. x :: acc) (\\x. x) [] l
let meth ron o = rev (onr (repof o))
let r = send (class, "new", [[class], [], "on" |-> ron])
let meth first u = "defined first"
let meth second u = "defined second"
let p = send (r, "new", [[object], [], "m" |-> first])
let q = send (r, "new", [[p], [], "m" |-> second])
send (send (q, "new", []), "m", ())
""")

print("-- the first diamond is unaffected")
interp.run_source('send (send (d1, "new", []), "m", ())')
