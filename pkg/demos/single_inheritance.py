"""Single inheritance with metaclasses: a point class, its onion of layers,
and the links between the eight bootstrapped classes."""

from braid import new_interpreter
from braid import as_braid as AS
from braid.values import domain, force, lookup

interp = new_interpreter("as")

print("-- a point with two instance variables")
interp.run_source("""
let meth pinit (a :: b :: v) = x := a; y := b; send (next, "init", v)
let meth getx () = x
let meth gety () = y
let point = send (object, "subclass",
      ({}, ["x", "y"], ("init" |-> pinit) & ("x" |-> getx) & ("y" |-> gety)))
let p = send (point, "new", [10, 100])
send (p, "x", ())
send (p, "y", ())
""")

print("-- layers of p, outermost first")
for layer in AS.layers(interp.eval_source("p"))[:-1]:
    print("  ivars", domain(layer.ienv), "methods", sorted(domain(layer.menv)))

print("-- superclass and class of each bootstrapped class")
names = ["nullclass", "object", "cd", "mc", "class", "oc", "cdc", "mcc", "cc"]
by_id = {id(interp.eval_source(n)): n for n in names}
for name in names[1:]:
    env = AS.getallenv(interp.eval_source(name))
    sup, cls = (by_id[id(force(lookup(env, k).value))] for k in ("super", "class"))
    print(f"  {name:6} super {sup:9} class {cls}")
