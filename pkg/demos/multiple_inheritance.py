"""Multiple inheritance over object graphs: a diamond, its two orders,
the next-chain through it and the single shared instance variable."""

from braid import new_interpreter
from braid import asmi_braid as MI
from braid import graphlib as G

interp = new_interpreter("asmi")
interp.run_source("""
let meth ma u = ["A"]
let meth mb u = "B" :: send (next, "m", u)
let meth mc u = "C" :: send (next, "m", u)
let meth md u = "D" :: send (next, "m", u)
let meth seta v = va := v
let meth geta () = va
let a = send (class, "new", [[object], ["va"], ("m" |-> ma) & ("set" |-> seta) & ("get" |-> geta)])
let b = send (class, "new", [[a], [], "m" |-> mb])
let c = send (class, "new", [[a], [], "m" |-> mc])
let d = send (class, "new", [[b, c], [], "m" |-> md])
let o = send (d, "new", [])
""", echo=False)

names = {MI.graph_of(interp.eval_source(n)).ident: n for n in ["a", "b", "c", "d", "object"]}
g = MI.class_graph(interp.eval_source("d"))
print("final-occurrence order:", [names[x] for x in G.order_final(g)])
print("first-occurrence order:", [names[x] for x in G.order_first(g)])

print("-- m and its next-chain follow the final-occurrence order")
interp.run_source('send (o, "m", ())')

print("-- va lives in one node, whichever path reaches it")
interp.run_source("""
send (o, "set", 7)
send (o, "get", ())
""")

print("-- single inheritance emulated with per-class metaclasses")
interp.run_source("""
let meth make u = send (self, "new", [])
let meth tag u = "made by the metaclass"
let k = send (asc, "new", ("make" |-> make, [object], [], "tag" |-> tag))
let j = send (asc, "new", ({}, [k], [], {}))
send (send (j, "make", ()), "tag", ())
""")
